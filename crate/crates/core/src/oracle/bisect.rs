//! Threshold re-derivation by bisection on the deviation checks.
//!
//! Each threshold is the boundary of one family of deviations as a single
//! cost varies: D's rejection gain in the efficient profile (`cbar_D`), D's
//! rejection gain in the inefficient profile (`clow_D`), and R's
//! remove-and-fight gain in the inefficient profile (`Clow`, found in `c_R`
//! with `c_D` held at a value where D accepts). Costs may go negative while
//! probing; the primitives do not care.

use serde::Serialize;

use super::{OracleError, Period1, DEFAULT_TOLERANCE};
use crate::engine::payoff::Primitives;
use crate::engine::ProfileMode;
use crate::params::ModelParams;

/// Largest |cost| tried while looking for a sign change.
const BRACKET_LIMIT: f64 = 1e6;
/// Points of the monotonicity scan over the initial bracket.
const SCAN_POINTS: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bracketed {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub evaluations: u32,
}

/// A pass region that is not an up-set in the probed cost.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Anomaly {
    pub threshold: &'static str,
    pub at: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleThresholds {
    #[serde(rename = "cbar_D")]
    pub cbar_d: Bracketed,
    #[serde(rename = "clow_D")]
    pub clow_d: Bracketed,
    #[serde(rename = "Clow")]
    pub clow_joint: Bracketed,
    /// `c_D` at which the joint threshold was probed.
    pub joint_probe_c_d: f64,
    pub search_tol: f64,
    pub anomalies: Vec<Anomaly>,
}

struct Search<'a> {
    name: &'static str,
    pass: Box<dyn Fn(f64) -> bool + 'a>,
    evaluations: std::cell::Cell<u32>,
}

impl Search<'_> {
    fn eval(&self, x: f64) -> bool {
        self.evaluations.set(self.evaluations.get() + 1);
        (self.pass)(x)
    }

    /// Expands `[-1, 1]` by doubling until the lower end fails and the upper
    /// end passes.
    fn bracket(&self) -> Result<(f64, f64), OracleError> {
        let no_bracket = OracleError::NoBracket { threshold: self.name, limit: BRACKET_LIMIT };
        let mut hi = 1.0;
        while !self.eval(hi) {
            hi *= 2.0;
            if hi > BRACKET_LIMIT {
                return Err(no_bracket);
            }
        }
        let mut lo = -1.0;
        while self.eval(lo) {
            lo *= 2.0;
            if lo < -BRACKET_LIMIT {
                return Err(no_bracket);
            }
        }
        Ok((lo, hi))
    }

    fn scan(&self, lo: f64, hi: f64, anomalies: &mut Vec<Anomaly>) {
        let mut passed_at: Option<f64> = None;
        for i in 0..=SCAN_POINTS {
            let x = lo + (hi - lo) * i as f64 / SCAN_POINTS as f64;
            let pass = self.eval(x);
            match (passed_at, pass) {
                (None, true) => passed_at = Some(x),
                (Some(first), false) => anomalies.push(Anomaly {
                    threshold: self.name,
                    at: x,
                    detail: format!("fails at {x} after passing at {first}"),
                }),
                _ => {}
            }
        }
    }

    fn run(&self, tol: f64, anomalies: &mut Vec<Anomaly>) -> Result<Bracketed, OracleError> {
        let (mut lo, mut hi) = self.bracket()?;
        self.scan(lo, hi, anomalies);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.eval(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Bracketed { estimate: 0.5 * (lo + hi), lo, hi, evaluations: self.evaluations.get() })
    }
}

/// Bisects each threshold to a bracket narrower than `search_tol`.
pub fn oracle_thresholds(params: &ModelParams<f64>, search_tol: f64) -> Result<OracleThresholds, OracleError> {
    params.validate()?;
    if !(search_tol > 0.0) {
        return Err(OracleError::BadTolerance(search_tol));
    }
    let gain_tol = DEFAULT_TOLERANCE;
    let base = Primitives::new(params);
    let at = |c_r: f64, c_d: f64| Period1::new(&base.with_costs(c_r, c_d));
    let mut anomalies = Vec::new();

    let cbar = Search {
        name: "cbar_D",
        pass: Box::new(|c_d| at(params.c_r, c_d).reject_gain(ProfileMode::EfficientPeace) <= gain_tol),
        evaluations: Default::default(),
    }
    .run(search_tol, &mut anomalies)?;

    let clow = Search {
        name: "clow_D",
        pass: Box::new(|c_d| at(params.c_r, c_d).reject_gain(ProfileMode::InefficientPeace) <= gain_tol),
        evaluations: Default::default(),
    }
    .run(search_tol, &mut anomalies)?;

    // any c_D where D accepts the inefficient offer will do
    let probe_c_d = params.c_d.max(clow.hi);
    let joint = Search {
        name: "Clow",
        pass: Box::new(|c_r| at(c_r, probe_c_d).eliminate_war_gain(ProfileMode::InefficientPeace) <= gain_tol),
        evaluations: Default::default(),
    }
    .run(search_tol, &mut anomalies)?;
    let joint = Bracketed {
        estimate: probe_c_d + joint.estimate,
        lo: probe_c_d + joint.lo,
        hi: probe_c_d + joint.hi,
        evaluations: joint.evaluations,
    };

    Ok(OracleThresholds {
        cbar_d: cbar,
        clow_d: clow,
        clow_joint: joint,
        joint_probe_c_d: probe_c_d,
        search_tol,
        anomalies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set_b() -> ModelParams<f64> {
        ModelParams::baseline(0.9, 0.3, 0.7, 0.8, 0.6, 1.0, 25.0)
    }

    #[test]
    fn set_b_thresholds_by_bisection() {
        let o = oracle_thresholds(&set_b(), 1e-8).unwrap();
        assert!((o.cbar_d.estimate - 33.0).abs() < 1e-6, "{o:?}");
        assert!((o.clow_d.estimate - 21.6).abs() < 1e-6, "{o:?}");
        assert!((o.clow_joint.estimate + 1.14).abs() < 1e-6, "{o:?}");
        assert!(o.anomalies.is_empty());
        assert!(o.cbar_d.hi - o.cbar_d.lo <= 1e-8);
    }

    #[test]
    fn barrier_power_raises_the_cd_threshold() {
        let o = oracle_thresholds(&ModelParams { theta: 1.2, ..set_b() }, 1e-8).unwrap();
        assert!((o.clow_d.estimate - 32.52).abs() < 1e-6, "{o:?}");
        assert!((o.cbar_d.estimate - 33.0).abs() < 1e-6);
    }

    #[test]
    fn full_renormalization_uses_unit_postwar_value() {
        let params = ModelParams { rho: 1.0, ..set_b() };
        let o = oracle_thresholds(&params, 1e-8).unwrap();
        let mu_one = ModelParams { mu: 1.0, ..set_b() };
        let reference = oracle_thresholds(&mu_one, 1e-8).unwrap();
        assert!((o.clow_d.estimate - reference.clow_d.estimate).abs() < 1e-7);
        // [9 (0.7 - 0.3) - 0.3 * 0.6] / 0.1
        assert!((o.clow_d.estimate - 34.2).abs() < 1e-6);
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert_eq!(oracle_thresholds(&set_b(), 0.0).unwrap_err(), OracleError::BadTolerance(0.0));
    }
}
