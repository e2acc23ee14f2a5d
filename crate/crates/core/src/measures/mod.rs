//! Concurrence, trace-distance discord and local quantum uncertainty, each
//! with a slow search-based counterpart used as an oracle.

pub mod concurrence;
pub mod lqu;
pub mod tqd;

pub use concurrence::{concurrence, spin_flip, wootters_roots};
pub use lqu::{
    lqu, lqu_bruteforce, lqu_x, skew_information, w_matrix, w_matrix_x, LocalObservable, LquGrid, WMatrix,
};
pub use tqd::{tqd_bruteforce, tqd_from_elements, tqd_x, CorrelationElements, TqdBudget};

use thiserror::Error;

use crate::qstate::StateError;

/// Values this close outside `[0, 1]` are snapped onto the interval.
pub const CLAMP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("search budget too small: {0}")]
    BudgetTooSmall(String),
    #[error("observable direction has norm {0}, expected 1")]
    NonUnitObservable(f64),
}

/// Snaps `[−1e-9, 0)` to 0 and `(1, 1+1e-9]` to 1; anything else is returned
/// unchanged.
pub fn clamp_measure(v: f64) -> f64 {
    if (-CLAMP_TOL..0.0).contains(&v) {
        0.0
    } else if v > 1.0 && v <= 1.0 + CLAMP_TOL {
        1.0
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamping() {
        assert_eq!(clamp_measure(-5e-10), 0.0);
        assert_eq!(clamp_measure(1.0 + 5e-10), 1.0);
        assert_eq!(clamp_measure(0.5), 0.5);
        assert_eq!(clamp_measure(-1e-3), -1e-3);
    }
}
