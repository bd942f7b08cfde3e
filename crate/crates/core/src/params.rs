//! Model parameters, their admissibility rules, and the barrier-value
//! distribution family.

use std::fmt;

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Who may remove the trade barrier.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EliminationMode {
    /// The rising power decides alone.
    #[default]
    Unilateral,
    /// Both sides must say yes in the same period.
    Cooperative,
}

/// Full parameter vector of the game.
///
/// `p` and `p1` are the declining power's war-win probabilities after and
/// before the power shift. Costs are one-time and measured in per-period
/// resource units. `rho` (postwar renormalization) and `theta` (barrier effect
/// on war odds) default to the baseline values 0 and 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<S> {
    pub delta: S,
    pub p: S,
    pub p1: S,
    pub mu: S,
    pub h0: S,
    #[serde(rename = "c_R")]
    pub c_r: S,
    #[serde(rename = "c_D")]
    pub c_d: S,
    pub rho: S,
    pub theta: S,
    #[serde(default)]
    pub elimination_mode: EliminationMode,
}

impl<S: Scalar> ModelParams<S> {
    /// Baseline game (`rho = 0`, `theta = 1`, unilateral elimination).
    pub fn baseline(delta: S, p: S, p1: S, mu: S, h0: S, c_r: S, c_d: S) -> Self {
        ModelParams {
            delta,
            p,
            p1,
            mu,
            h0,
            c_r,
            c_d,
            rho: S::zero(),
            theta: S::one(),
            elimination_mode: EliminationMode::Unilateral,
        }
    }

    pub fn with_costs(&self, c_r: S, c_d: S) -> Self {
        ModelParams { c_r, c_d, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), Violations> {
        validate(self)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Lowest admissible `theta`, `(mu + p - 1) / (mu p)`; `None` when
    /// `mu p = 0` and every positive `theta` is admissible.
    pub fn theta_floor(&self) -> Option<S> {
        let denom = self.mu.clone() * self.p.clone();
        if denom.is_zero() {
            return None;
        }
        Some((self.mu.clone() + self.p.clone() - S::one()) / denom)
    }

    pub fn to_f64(&self) -> ModelParams<f64> {
        ModelParams {
            delta: self.delta.to_f64_lossy(),
            p: self.p.to_f64_lossy(),
            p1: self.p1.to_f64_lossy(),
            mu: self.mu.to_f64_lossy(),
            h0: self.h0.to_f64_lossy(),
            c_r: self.c_r.to_f64_lossy(),
            c_d: self.c_d.to_f64_lossy(),
            rho: self.rho.to_f64_lossy(),
            theta: self.theta.to_f64_lossy(),
            elimination_mode: self.elimination_mode,
        }
    }
}

impl ModelParams<f64> {
    /// Exact rational image of these (binary) parameter values.
    pub fn to_exact(&self) -> ModelParams<num_rational::BigRational> {
        let q = |v: f64| <num_rational::BigRational as Scalar>::from_f64_exact(v).expect("finite parameter");
        ModelParams {
            delta: q(self.delta),
            p: q(self.p),
            p1: q(self.p1),
            mu: q(self.mu),
            h0: q(self.h0),
            c_r: q(self.c_r),
            c_d: q(self.c_d),
            rho: q(self.rho),
            theta: q(self.theta),
            elimination_mode: self.elimination_mode,
        }
    }
}

/// One violated admissibility constraint.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Violation {
    NonFinite { field: &'static str },
    DeltaOutOfRange { delta: f64 },
    ProbabilityOutOfRange { field: &'static str, value: f64 },
    NoPowerShift { p: f64, p1: f64 },
    H0OutOfRange { h0: f64 },
    MuOutOfRange { mu: f64 },
    NegativeCost { field: &'static str, value: f64 },
    RhoOutOfRange { rho: f64 },
    ThetaNotPositive { theta: f64 },
    ScaledProbabilityAboveOne { field: &'static str, value: f64 },
    ThetaBelowFloor { theta: f64, floor: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { field } => write!(f, "{field} must be finite"),
            Violation::DeltaOutOfRange { delta } => write!(f, "0 < delta < 1 required (delta = {delta})"),
            Violation::ProbabilityOutOfRange { field, value } => {
                write!(f, "0 <= {field} <= 1 required ({field} = {value})")
            }
            Violation::NoPowerShift { p, p1 } => write!(f, "p1 > p required (p = {p}, p1 = {p1})"),
            Violation::H0OutOfRange { h0 } => write!(f, "0 < h0 < 1 required (h0 = {h0})"),
            Violation::MuOutOfRange { mu } => write!(f, "0 < mu <= 1 required (mu = {mu})"),
            Violation::NegativeCost { field, value } => write!(f, "{field} >= 0 required ({field} = {value})"),
            Violation::RhoOutOfRange { rho } => write!(f, "0 <= rho <= 1 required (rho = {rho})"),
            Violation::ThetaNotPositive { theta } => write!(f, "theta > 0 required (theta = {theta})"),
            Violation::ScaledProbabilityAboveOne { field, value } => {
                write!(f, "theta*{field} <= 1 required (theta*{field} = {value})")
            }
            Violation::ThetaBelowFloor { theta, floor } => {
                write!(f, "theta below floor {floor} (theta = {theta})")
            }
        }
    }
}

/// Nonempty list of violations.
#[derive(Clone, Debug, PartialEq, Serialize, Error)]
#[serde(transparent)]
pub struct Violations(pub Vec<Violation>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "invalid parameters: {}", parts.join("; "))
    }
}

impl Violations {
    pub fn iter(&self) -> impl Iterator<Item = &Violation> {
        self.0.iter()
    }
}

/// Checks every admissibility constraint and collects all failures.
pub fn validate<S: Scalar>(params: &ModelParams<S>) -> Result<(), Violations> {
    let zero = S::zero();
    let one = S::one();
    let mut out = Vec::new();

    let fields: [(&'static str, &S); 9] = [
        ("delta", &params.delta),
        ("p", &params.p),
        ("p1", &params.p1),
        ("mu", &params.mu),
        ("h0", &params.h0),
        ("c_R", &params.c_r),
        ("c_D", &params.c_d),
        ("rho", &params.rho),
        ("theta", &params.theta),
    ];
    for (field, value) in fields {
        if !value.is_finite_value() {
            out.push(Violation::NonFinite { field });
        }
    }
    if !out.is_empty() {
        return Err(Violations(out));
    }

    let f = |v: &S| v.to_f64_lossy();
    if !(params.delta > zero && params.delta < one) {
        out.push(Violation::DeltaOutOfRange { delta: f(&params.delta) });
    }
    for (field, value) in [("p", &params.p), ("p1", &params.p1)] {
        if !(*value >= zero && *value <= one) {
            out.push(Violation::ProbabilityOutOfRange { field, value: f(value) });
        }
    }
    if !(params.p1 > params.p) {
        out.push(Violation::NoPowerShift { p: f(&params.p), p1: f(&params.p1) });
    }
    if !(params.h0 > zero && params.h0 < one) {
        out.push(Violation::H0OutOfRange { h0: f(&params.h0) });
    }
    if !(params.mu > zero && params.mu <= one) {
        out.push(Violation::MuOutOfRange { mu: f(&params.mu) });
    }
    for (field, value) in [("c_R", &params.c_r), ("c_D", &params.c_d)] {
        if !(*value >= zero) {
            out.push(Violation::NegativeCost { field, value: f(value) });
        }
    }
    if !(params.rho >= zero && params.rho <= one) {
        out.push(Violation::RhoOutOfRange { rho: f(&params.rho) });
    }
    if !(params.theta > zero) {
        out.push(Violation::ThetaNotPositive { theta: f(&params.theta) });
    }
    for (field, value) in [("p1", &params.p1), ("p", &params.p)] {
        let scaled = params.theta.clone() * value.clone();
        if !(scaled <= one) {
            out.push(Violation::ScaledProbabilityAboveOne { field, value: f(&scaled) });
        }
    }
    if params.theta != one {
        if let Some(floor) = params.theta_floor() {
            if params.theta < floor {
                out.push(Violation::ThetaBelowFloor { theta: f(&params.theta), floor: f(&floor) });
            }
        }
    }

    if out.is_empty() {
        Ok(())
    } else {
        Err(Violations(out))
    }
}

/// Shape of the barrier-value distribution `F` on `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistributionKind {
    Degenerate { mu: f64 },
    Uniform { lo: f64, hi: f64 },
    ScaledBeta { alpha: f64, beta: f64 },
}

#[derive(Debug, Error, PartialEq)]
pub enum DistributionError {
    #[error("support must lie in [0, 1] (got [{lo}, {hi}])")]
    Support { lo: f64, hi: f64 },
    #[error("beta shape parameters must be positive (alpha = {alpha}, beta = {beta})")]
    Shape { alpha: f64, beta: f64 },
    #[error("distribution mean {mean} does not match mu = {mu}")]
    MeanMismatch { mean: f64, mu: f64 },
}

/// Tolerance on `|mean(F) - mu|`.
pub const MEAN_TOLERANCE: f64 = 1e-12;

/// Barrier-value distribution with a cached sampler.
#[derive(Clone, Debug)]
pub struct BarrierDistribution {
    kind: DistributionKind,
    beta: Option<Beta<f64>>,
}

impl BarrierDistribution {
    pub fn new(kind: DistributionKind) -> Result<Self, DistributionError> {
        let beta = match kind {
            DistributionKind::Degenerate { mu } => {
                if !(0.0..=1.0).contains(&mu) {
                    return Err(DistributionError::Support { lo: mu, hi: mu });
                }
                None
            }
            DistributionKind::Uniform { lo, hi } => {
                if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                    return Err(DistributionError::Support { lo, hi });
                }
                None
            }
            DistributionKind::ScaledBeta { alpha, beta } => {
                let sampler = Beta::new(alpha, beta).map_err(|_| DistributionError::Shape { alpha, beta })?;
                if !(alpha > 0.0 && beta > 0.0) {
                    return Err(DistributionError::Shape { alpha, beta });
                }
                Some(sampler)
            }
        };
        Ok(BarrierDistribution { kind, beta })
    }

    /// Builds the distribution and checks its mean against `mu`.
    pub fn with_mean(kind: DistributionKind, mu: f64) -> Result<Self, DistributionError> {
        let dist = Self::new(kind)?;
        dist.check_mean(mu)?;
        Ok(dist)
    }

    pub fn degenerate(mu: f64) -> Result<Self, DistributionError> {
        Self::new(DistributionKind::Degenerate { mu })
    }

    /// Uniform on `[mu - half_width, mu + half_width]`.
    pub fn uniform_around(mu: f64, half_width: f64) -> Result<Self, DistributionError> {
        Self::new(DistributionKind::Uniform { lo: mu - half_width, hi: mu + half_width })
    }

    /// Beta with the given mean and `alpha + beta = concentration`.
    pub fn beta_with_mean(mu: f64, concentration: f64) -> Result<Self, DistributionError> {
        Self::new(DistributionKind::ScaledBeta { alpha: mu * concentration, beta: (1.0 - mu) * concentration })
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn mean(&self) -> f64 {
        match self.kind {
            DistributionKind::Degenerate { mu } => mu,
            DistributionKind::Uniform { lo, hi } => 0.5 * (lo + hi),
            DistributionKind::ScaledBeta { alpha, beta } => alpha / (alpha + beta),
        }
    }

    pub fn variance(&self) -> f64 {
        match self.kind {
            DistributionKind::Degenerate { .. } => 0.0,
            DistributionKind::Uniform { lo, hi } => (hi - lo).powi(2) / 12.0,
            DistributionKind::ScaledBeta { alpha, beta } => {
                let s = alpha + beta;
                alpha * beta / (s * s * (s + 1.0))
            }
        }
    }

    pub fn check_mean(&self, mu: f64) -> Result<(), DistributionError> {
        let mean = self.mean();
        if (mean - mu).abs() <= MEAN_TOLERANCE {
            Ok(())
        } else {
            Err(DistributionError::MeanMismatch { mean, mu })
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            DistributionKind::Degenerate { mu } => mu,
            DistributionKind::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            DistributionKind::ScaledBeta { .. } => {
                let sampler = self.beta.as_ref().expect("beta sampler built at construction");
                sampler.sample(rng).clamp(0.0, 1.0)
            }
        }
    }
}

/// One draw of the barrier value `h_t`.
pub fn sample_h<R: Rng + ?Sized>(dist: &BarrierDistribution, rng: &mut R) -> f64 {
    dist.sample(rng)
}
