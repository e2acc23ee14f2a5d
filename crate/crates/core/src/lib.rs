//! Quantum correlations of two atoms under collective spontaneous emission.

pub mod dynamics;
pub mod exec;
pub mod harness;
pub mod linalg;
pub mod measures;
pub mod optimize;
pub mod qstate;
pub mod scenarios;

#[cfg(test)]
mod testing;
