#![allow(dead_code)]

use crisis_bargain::{EliminationMode, ModelParams};
use proptest::prelude::*;

pub fn set_b(c_r: f64, c_d: f64) -> ModelParams<f64> {
    ModelParams::baseline(0.9, 0.3, 0.7, 0.8, 0.6, c_r, c_d)
}

pub fn small_demo() -> ModelParams<f64> {
    ModelParams::baseline(0.5, 0.2, 0.6, 0.5, 0.5, 1.0, 1.0)
}

/// Valid baseline points (`rho = 0`, `theta = 1`).
pub fn baseline_params() -> impl Strategy<Value = ModelParams<f64>> {
    (0.5f64..0.95, 0.0f64..0.9, 0.01f64..1.0, 0.01f64..=1.0, 0.01f64..0.99, 0.0f64..20.0, 0.0f64..60.0).prop_map(
        |(delta, p, shift, mu, h0, c_r, c_d)| {
            let p1 = p + (1.0 - p) * shift;
            ModelParams::baseline(delta, p, p1, mu, h0, c_r, c_d)
        },
    )
}

/// Valid points with both extensions active some of the time.
pub fn extended_params() -> impl Strategy<Value = ModelParams<f64>> {
    (baseline_params(), prop_oneof![Just(0.0), 0.0f64..=1.0], prop_oneof![Just(None), (0.0f64..=1.0).prop_map(Some)])
        .prop_map(|(base, rho, theta_pos)| with_extensions(base, rho, theta_pos))
        .prop_filter("valid", |p| p.is_valid())
}

/// `theta_pos` places theta within `[max(floor, 0.05), 1/p1]`.
pub fn with_extensions(base: ModelParams<f64>, rho: f64, theta_pos: Option<f64>) -> ModelParams<f64> {
    let theta = match theta_pos {
        None => 1.0,
        Some(u) => {
            let lo = base.theta_floor().unwrap_or(0.0).max(0.05);
            let hi = 1.0 / base.p1;
            lo + (hi - lo) * u
        }
    };
    ModelParams { rho, theta, elimination_mode: EliminationMode::Unilateral, ..base }
}
