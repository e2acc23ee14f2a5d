//! Shared proptest strategies for unit tests.

use proptest::prelude::*;

use crate::linalg::C64;
use crate::qstate::XState;

/// Random X states, including rank-deficient blocks.
pub fn arb_xstate() -> impl Strategy<Value = XState> {
    (
        prop::array::uniform4(0.0f64..1.0),
        0.0f64..=1.0,
        0.0f64..=1.0,
        -3.2f64..3.2,
        -3.2f64..3.2,
    )
        .prop_filter("nonzero weight", |(w, ..)| w.iter().sum::<f64>() > 1e-3)
        .prop_map(|(w, f14, f23, ph14, ph23)| {
            let s: f64 = w.iter().sum();
            let p = w.map(|x| x / s);
            let c14 = C64::from_polar(f14 * (p[0] * p[3]).sqrt(), ph14);
            let c23 = C64::from_polar(f23 * (p[1] * p[2]).sqrt(), ph23);
            XState::new_unchecked(p[0], p[1], p[2], p[3], c14, c23)
        })
}
