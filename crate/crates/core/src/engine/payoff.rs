//! Payoff primitives (discounting, war lotteries, postwar streams) and the
//! closed-form value of equilibrium play.
//!
//! The primitives are what the oracle builds on; they never consult the
//! threshold formulas.

use serde::Serialize;

use super::profile::{ProfileError, ProfileMode};
use crate::classifier::classify_with;
use crate::params::ModelParams;
use crate::scalar::Scalar;
use crate::thresholds::ThresholdSet;

/// Present value of a constant flow received every period from now on.
pub fn perpetuity(delta: f64, flow: f64) -> f64 {
    flow / (1.0 - delta)
}

/// D's chance of winning a war fought in period `t`.
pub fn war_win_prob_d(params: &ModelParams<f64>, t: u32, barrier_present: bool) -> f64 {
    let p = if t <= 1 { params.p1 } else { params.p };
    if barrier_present {
        params.theta * p
    } else {
        p
    }
}

/// Value, seen from the period after a war, of the resource stream the
/// winner inherits.
///
/// Without the barrier this is a unit perpetuity. With it, each period the
/// relationship renormalizes for good with probability `rho` and otherwise
/// yields a barrier draw of mean `mu`; the value solves
/// `V = rho/(1-delta) + (1-rho)(mu + delta V)` and is found by iteration.
pub fn postwar_stream_value(params: &ModelParams<f64>, barrier_present: bool) -> f64 {
    let free = perpetuity(params.delta, 1.0);
    if !barrier_present {
        return free;
    }
    let (rho, mu, delta) = (params.rho, params.mu, params.delta);
    let mut v = 0.0;
    for _ in 0..100_000 {
        let next = rho * free + (1.0 - rho) * (mu + delta * v);
        let settled = (next - v).abs() <= f64::EPSILON * next.abs();
        v = next;
        if settled {
            break;
        }
    }
    v
}

/// Expected war payoff: win probability times current plus discounted future
/// prize, minus the one-time cost.
pub fn war_value(win_prob: f64, current: f64, future: f64, delta: f64, cost: f64) -> f64 {
    win_prob * (current + delta * future) - cost
}

/// Primitives for one parameter point with the postwar stream value cached.
#[derive(Clone, Debug)]
pub struct Primitives {
    params: ModelParams<f64>,
    postwar_barrier: f64,
}

impl Primitives {
    pub fn new(params: &ModelParams<f64>) -> Self {
        Primitives { params: params.clone(), postwar_barrier: postwar_stream_value(params, true) }
    }

    pub fn params(&self) -> &ModelParams<f64> {
        &self.params
    }

    /// Same point with different war costs; the postwar value is reused.
    pub fn with_costs(&self, c_r: f64, c_d: f64) -> Self {
        Primitives { params: self.params.with_costs(c_r, c_d), postwar_barrier: self.postwar_barrier }
    }

    pub fn postwar(&self, barrier_present: bool) -> f64 {
        if barrier_present {
            self.postwar_barrier
        } else {
            perpetuity(self.params.delta, 1.0)
        }
    }

    /// War values `(R, D)` of fighting in period `t` over resource `y`.
    pub fn war_values(&self, t: u32, barrier_present: bool, y: f64) -> (f64, f64) {
        let params = &self.params;
        let win_d = war_win_prob_d(params, t, barrier_present);
        let future = self.postwar(barrier_present);
        let d = war_value(win_d, y, future, params.delta, params.c_d);
        let r = war_value(1.0 - win_d, y, future, params.delta, params.c_r);
        (r, d)
    }

    /// Continuation values `(R, D)` of the post-shift phase with the barrier
    /// gone, where D is held to its war value every period.
    pub fn stationary_values(&self) -> (f64, f64) {
        let (_, d) = self.war_values(2, false, 1.0);
        (perpetuity(self.params.delta, 1.0) - d, d)
    }

    /// Smallest offer D accepts in the given state when peace is followed
    /// by the post-shift stationary phase.
    pub fn acceptance_cutoff(&self, t: u32, barrier_present: bool, y: f64) -> f64 {
        let (_, war_d) = self.war_values(t, barrier_present, y);
        let (_, cont_d) = self.stationary_values();
        war_d - self.params.delta * cont_d
    }
}

pub fn war_values(params: &ModelParams<f64>, t: u32, barrier_present: bool, y: f64) -> (f64, f64) {
    Primitives::new(params).war_values(t, barrier_present, y)
}

pub fn stationary_values(params: &ModelParams<f64>) -> (f64, f64) {
    Primitives::new(params).stationary_values()
}

pub fn acceptance_cutoff(params: &ModelParams<f64>, t: u32, barrier_present: bool, y: f64) -> f64 {
    Primitives::new(params).acceptance_cutoff(t, barrier_present, y)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalyticPayoffs<S> {
    pub v_r: S,
    pub v_d: S,
    pub first_offer: S,
    pub stationary_offer: S,
}

/// Present values of on-path play of a built-in profile, from the
/// closed-form indifference offers. Refused when the profile's existence
/// condition fails.
pub fn analytic_payoffs<S: Scalar>(params: &ModelParams<S>, mode: ProfileMode) -> Result<AnalyticPayoffs<S>, ProfileError> {
    params.validate()?;
    let thresholds = ThresholdSet::compute(params);
    let report = classify_with(params, &thresholds);
    mode.check_existence(&report, &thresholds)?;
    Ok(analytic_payoffs_unchecked(params, mode, &thresholds))
}

pub(crate) fn analytic_payoffs_unchecked<S: Scalar>(
    params: &ModelParams<S>,
    mode: ProfileMode,
    thresholds: &ThresholdSet<S>,
) -> AnalyticPayoffs<S> {
    let one = S::one();
    let (y1, x1) = match mode {
        ProfileMode::EfficientPeace => (one.clone(), thresholds.offers.offer1_efficient.raw.clone()),
        ProfileMode::InefficientPeace | ProfileMode::CooperativeInefficient => {
            (params.h0.clone(), thresholds.offers.offer1_inefficient.raw.clone())
        }
    };
    let s = thresholds.offers.offer_stationary.raw.clone();
    let weight = params.delta.clone() / (one.clone() - params.delta.clone());
    AnalyticPayoffs {
        v_r: y1 - x1.clone() + weight.clone() * (one - s.clone()),
        v_d: x1.clone() + weight * s.clone(),
        first_offer: x1,
        stationary_offer: s,
    }
}
