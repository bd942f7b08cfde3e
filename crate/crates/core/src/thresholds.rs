//! Closed-form equilibrium thresholds and indifference offers.
//!
//! Every formula is written against [`Scalar`] so the same code runs in
//! `f64` and in exact rational arithmetic. The postwar-renormalization
//! probability `rho` enters only through [`effective_mu`], which replaces
//! `mu` wherever a war locks the barrier in.

use serde::Serialize;

use crate::params::ModelParams;
use crate::scalar::Scalar;

/// Which model variant a threshold set belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extension {
    Baseline,
    PostwarCooperation,
    BarrierPower,
    /// Both `rho > 0` and `theta != 1`; the two extensions are combined by
    /// substituting the postwar mean into the barrier-power formulas.
    Composed,
}

impl Extension {
    pub fn of<S: Scalar>(params: &ModelParams<S>) -> Self {
        let rho_active = !params.rho.is_zero();
        let theta_active = params.theta != S::one();
        match (rho_active, theta_active) {
            (false, false) => Extension::Baseline,
            (true, false) => Extension::PostwarCooperation,
            (false, true) => Extension::BarrierPower,
            (true, true) => Extension::Composed,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Extension::Baseline => "baseline",
            Extension::PostwarCooperation => "extension: postwar cooperation",
            Extension::BarrierPower => "extension: barrier power",
            Extension::Composed => "extension: composed",
        }
    }
}

/// An indifference offer before and after clamping to `[0, y]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Offer<S> {
    pub raw: S,
    pub clamped: S,
}

impl<S: Scalar> Offer<S> {
    fn within(raw: S, y: S) -> Self {
        let clamped = S::min_of(S::max_of(raw.clone(), S::zero()), y);
        Offer { raw, clamped }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndifferenceOffers<S> {
    /// Period-1 offer after the barrier is removed (`y_1 = 1`).
    pub offer1_efficient: Offer<S>,
    /// Period-1 offer with the barrier kept (`y_1 = h0`).
    pub offer1_inefficient: Offer<S>,
    /// Per-period offer once the power shift has happened and `y_t = 1`.
    pub offer_stationary: Offer<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdSet<S> {
    #[serde(rename = "cbar_D")]
    pub cbar_d: S,
    #[serde(rename = "clow_D")]
    pub clow_d: S,
    #[serde(rename = "Clow")]
    pub clow_joint: S,
    pub postwar_mean: S,
    pub theta_floor: Option<S>,
    pub offers: IndifferenceOffers<S>,
    /// Joint cost below which the rising power would rather keep the
    /// barrier and fight than remove it and fight.
    pub keep_war_joint: S,
    pub extension: Extension,
}

impl<S: Scalar> ThresholdSet<S> {
    pub fn compute(params: &ModelParams<S>) -> Self {
        ThresholdSet {
            cbar_d: efficient_peace_threshold(params),
            clow_d: inefficient_cd_threshold(params),
            clow_joint: inefficient_joint_threshold(params),
            postwar_mean: effective_mu(params),
            theta_floor: theta_floor(params),
            offers: indifference_offers(params),
            keep_war_joint: keep_war_joint_threshold(params),
            extension: Extension::of(params),
        }
    }
}

fn one<S: Scalar>() -> S {
    S::one()
}

/// `delta / (1 - delta)`: present value of a unit flow starting next period.
fn future_weight<S: Scalar>(params: &ModelParams<S>) -> S {
    params.delta.clone() / (one::<S>() - params.delta.clone())
}

/// Per-period mean value of the resource after a war fought with the
/// barrier in place: `[(1-rho)(1-delta)mu + rho] / [1 - (1-rho)delta]`.
///
/// Written as `mu + rho(1-mu)/(1-(1-rho)delta)` so that `rho = 0` returns
/// `mu` exactly; `rho = 1` returns exactly one.
pub fn effective_mu<S: Scalar>(params: &ModelParams<S>) -> S {
    let rho = params.rho.clone();
    if rho.is_zero() {
        return params.mu.clone();
    }
    if rho == one() {
        return one();
    }
    let denom = one::<S>() - (one::<S>() - rho.clone()) * params.delta.clone();
    let value = params.mu.clone() + rho * (one::<S>() - params.mu.clone()) / denom;
    S::min_of(value, one())
}

/// `((p1 - delta p)/(1 - delta) - 1)/(1 - delta)`.
pub fn efficient_peace_threshold<S: Scalar>(params: &ModelParams<S>) -> S {
    let slack = one::<S>() - params.delta.clone();
    ((params.p1.clone() - params.delta.clone() * params.p.clone()) / slack.clone() - one()) / slack
}

/// `[delta/(1-delta) (x theta p1 - p) - (1 - theta p1) h0] / (1 - delta)`
/// with `x` the postwar mean.
pub fn inefficient_cd_threshold<S: Scalar>(params: &ModelParams<S>) -> S {
    let x = effective_mu(params);
    let tp1 = params.theta.clone() * params.p1.clone();
    let spoils = (x * params.theta.clone()) * params.p1.clone() - params.p.clone();
    (future_weight(params) * spoils - (one::<S>() - tp1) * params.h0.clone()) / (one::<S>() - params.delta.clone())
}

/// `{1 - p1 - [(1-delta) h0 (1 - theta p1) + delta (1 - x theta p1)]} / (1 - delta)`,
/// evaluated as `(1 - p1) - h0 (1 - theta p1) - delta/(1-delta) p1 (1 - theta x)`
/// so nothing is divided by `1 - delta` after a cancellation.
pub fn inefficient_joint_threshold<S: Scalar>(params: &ModelParams<S>) -> S {
    let x = effective_mu(params);
    let tp1 = params.theta.clone() * params.p1.clone();
    let kept = params.h0.clone() * (one::<S>() - tp1);
    let lost = future_weight(params) * params.p1.clone() * (one::<S>() - params.theta.clone() * x);
    (one::<S>() - params.p1.clone()) - kept - lost
}

/// `(1 - theta p1)(h0 + delta x/(1-delta)) - (1 - p1)/(1 - delta)`.
pub fn keep_war_joint_threshold<S: Scalar>(params: &ModelParams<S>) -> S {
    let x = effective_mu(params);
    let tp1 = params.theta.clone() * params.p1.clone();
    let barrier_prize = params.h0.clone() + future_weight(params) * x;
    (one::<S>() - tp1) * barrier_prize - (one::<S>() - params.p1.clone()) / (one::<S>() - params.delta.clone())
}

/// Forms as printed for the baseline game (`theta = 1`); kept separate so
/// the general formulas can be checked against them.
pub mod main_text {
    use super::*;

    /// `[delta/(1-delta)(mu p1 - p) - (1 - p1) h0]/(1 - delta)`.
    pub fn inefficient_cd_threshold<S: Scalar>(params: &ModelParams<S>) -> S {
        let x = effective_mu(params);
        let spoils = x * params.p1.clone() - params.p.clone();
        (future_weight(params) * spoils - (one::<S>() - params.p1.clone()) * params.h0.clone())
            / (one::<S>() - params.delta.clone())
    }

    /// `(1 - p1)(1 - h0) - delta/(1-delta) p1 (1 - mu)`.
    pub fn inefficient_joint_threshold<S: Scalar>(params: &ModelParams<S>) -> S {
        let x = effective_mu(params);
        (one::<S>() - params.p1.clone()) * (one::<S>() - params.h0.clone())
            - future_weight(params) * params.p1.clone() * (one::<S>() - x)
    }
}

pub fn indifference_offers<S: Scalar>(params: &ModelParams<S>) -> IndifferenceOffers<S> {
    let slack = one::<S>() - params.delta.clone();
    let cost_now = slack.clone() * params.c_d.clone();

    let efficient = (params.p1.clone() - params.delta.clone() * params.p.clone()) / slack - cost_now.clone();

    let x = effective_mu(params);
    let tp1 = params.theta.clone() * params.p1.clone();
    let inefficient = tp1 * params.h0.clone() - cost_now.clone()
        + future_weight(params) * ((x * params.theta.clone()) * params.p1.clone() - params.p.clone());

    let stationary = params.p.clone() - cost_now;

    IndifferenceOffers {
        offer1_efficient: Offer::within(efficient, one()),
        offer1_inefficient: Offer::within(inefficient, params.h0.clone()),
        offer_stationary: Offer::within(stationary, one()),
    }
}

/// `(mu + p - 1)/(mu p)`, or `None` when `mu p = 0` (any `theta > 0` is
/// admissible).
pub fn theta_floor<S: Scalar>(params: &ModelParams<S>) -> Option<S> {
    params.theta_floor()
}
