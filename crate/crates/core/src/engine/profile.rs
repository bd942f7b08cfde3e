//! Strategy profiles: the built-in equilibrium constructions and custom
//! callback profiles.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::payoff::Primitives;
use super::state::{GameState, PeriodRecord, Response};
use crate::classifier::{classify_with, EquilibriumReport};
use crate::params::{EliminationMode, ModelParams, Violations};
use crate::scalar::Scalar;
use crate::thresholds::ThresholdSet;

/// Elimination votes cast this period; `None` when no vote was taken
/// (barrier already gone, or D in unilateral mode).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Votes {
    pub elim_r: Option<bool>,
    pub elim_d: Option<bool>,
}

/// Behaviour of both players. The offer and response are asked for after
/// the elimination votes, with `state` reflecting their outcome.
pub trait Strategy: Send + Sync {
    fn eliminate_r(&self, state: &GameState, history: &[PeriodRecord]) -> bool;

    fn eliminate_d(&self, _state: &GameState, _history: &[PeriodRecord]) -> bool {
        true
    }

    fn offer(&self, state: &GameState, votes: &Votes, history: &[PeriodRecord]) -> f64;

    fn respond(&self, state: &GameState, votes: &Votes, offer: f64, history: &[PeriodRecord]) -> Response;

    /// A priori bound on absolute per-period flows, used to pick a horizon.
    fn flow_bound(&self) -> Option<f64> {
        None
    }

    /// Elimination rule the profile is built for, if it insists on one.
    fn elimination_mode(&self) -> Option<EliminationMode> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMode {
    EfficientPeace,
    InefficientPeace,
    CooperativeInefficient,
}

impl ProfileMode {
    pub const ALL: [ProfileMode; 3] =
        [ProfileMode::EfficientPeace, ProfileMode::InefficientPeace, ProfileMode::CooperativeInefficient];

    pub fn as_str(self) -> &'static str {
        match self {
            ProfileMode::EfficientPeace => "efficient",
            ProfileMode::InefficientPeace => "inefficient",
            ProfileMode::CooperativeInefficient => "cooperative",
        }
    }

    /// R removes the barrier in period 1 on path.
    pub fn eliminates_first(self) -> bool {
        self == ProfileMode::EfficientPeace
    }

    /// Refuses when the existence condition for this kind of peace fails,
    /// naming the binding threshold.
    pub fn check_existence<S: Scalar>(self, report: &EquilibriumReport<S>, t: &ThresholdSet<S>) -> Result<(), ProfileError> {
        let m = &report.margins;
        let zero = S::zero();
        let failed = match self {
            ProfileMode::EfficientPeace => {
                (m.efficient < zero).then(|| format!("c_D >= cbar_D = {}", t.cbar_d.to_f64_lossy()))
            }
            _ => {
                if m.cd < zero {
                    Some(format!("c_D >= clow_D = {}", t.clow_d.to_f64_lossy()))
                } else if m.joint < zero {
                    Some(format!("c_D + c_R >= Clow = {}", t.clow_joint.to_f64_lossy()))
                } else {
                    None
                }
            }
        };
        match failed {
            Some(condition) => Err(ProfileError::Refused { mode: self, condition }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for ProfileMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProfileMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "efficient" | "efficient_peace" => Ok(ProfileMode::EfficientPeace),
            "inefficient" | "inefficient_peace" => Ok(ProfileMode::InefficientPeace),
            "cooperative" | "cooperative_inefficient" => Ok(ProfileMode::CooperativeInefficient),
            other => Err(format!("unknown profile `{other}` (expected efficient, inefficient or cooperative)")),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ProfileError {
    #[error(transparent)]
    InvalidParams(#[from] Violations),
    #[error("{mode} profile refused: requires {condition}")]
    Refused { mode: ProfileMode, condition: String },
}

/// One of the equilibrium constructions.
///
/// R keeps or removes the barrier in period 1 as the mode prescribes and
/// removes it at the first chance afterwards; every offer is D's indifference
/// cutoff, capped at the resource. D accepts an offer at or above its cutoff
/// unless an elimination vote has ever departed from the prescription, in
/// which case it fights.
#[derive(Clone, Debug)]
pub struct BuiltinProfile {
    mode: ProfileMode,
    primitives: Primitives,
    flow_bound: f64,
}

/// Built-in profile after checking its existence condition.
pub fn equilibrium_profile(params: &ModelParams<f64>, mode: ProfileMode) -> Result<BuiltinProfile, ProfileError> {
    params.validate()?;
    let thresholds = ThresholdSet::compute(params);
    mode.check_existence(&classify_with(params, &thresholds), &thresholds)?;
    Ok(BuiltinProfile::candidate(params, mode))
}

impl BuiltinProfile {
    /// The construction without the existence check; used to probe points
    /// where it may fail.
    pub fn candidate(params: &ModelParams<f64>, mode: ProfileMode) -> Self {
        let primitives = Primitives::new(params);
        let bound = [
            primitives.acceptance_cutoff(1, true, params.h0),
            primitives.acceptance_cutoff(1, false, 1.0),
            primitives.acceptance_cutoff(2, false, 1.0),
        ]
        .iter()
        .fold(1.0f64, |acc, x| acc.max(1.0 + x.abs()));
        BuiltinProfile { mode, primitives, flow_bound: bound }
    }

    pub fn mode(&self) -> ProfileMode {
        self.mode
    }

    pub fn params(&self) -> &ModelParams<f64> {
        self.primitives.params()
    }

    pub fn cutoff(&self, state: &GameState) -> f64 {
        self.primitives.acceptance_cutoff(state.t, state.barrier_present, state.y)
    }

    fn prescribed_r(&self, t: u32) -> bool {
        t > 1 || self.mode.eliminates_first()
    }

    fn votes_conform(&self, t: u32, elim_r: Option<bool>, elim_d: Option<bool>) -> bool {
        let Some(r) = elim_r else { return true };
        let r_ok = r == self.prescribed_r(t);
        let d_ok = match (self.mode, elim_d) {
            (ProfileMode::CooperativeInefficient, Some(d)) => d,
            _ => true,
        };
        r_ok && d_ok
    }

    fn triggered(&self, state: &GameState, votes: &Votes, history: &[PeriodRecord]) -> bool {
        !self.votes_conform(state.t, votes.elim_r, votes.elim_d)
            || history.iter().any(|rec| {
                let voted = rec.barrier_present || rec.eliminated_now;
                voted && !self.votes_conform(rec.t, Some(rec.actions.elim_r), rec.actions.elim_d)
            })
    }
}

impl Strategy for BuiltinProfile {
    fn eliminate_r(&self, state: &GameState, _history: &[PeriodRecord]) -> bool {
        self.prescribed_r(state.t)
    }

    fn offer(&self, state: &GameState, _votes: &Votes, _history: &[PeriodRecord]) -> f64 {
        self.cutoff(state).min(state.y)
    }

    fn respond(&self, state: &GameState, votes: &Votes, offer: f64, history: &[PeriodRecord]) -> Response {
        if self.triggered(state, votes, history) || offer < self.cutoff(state) {
            Response::Reject
        } else {
            Response::Accept
        }
    }

    fn flow_bound(&self) -> Option<f64> {
        Some(self.flow_bound)
    }

    fn elimination_mode(&self) -> Option<EliminationMode> {
        Some(match self.mode {
            ProfileMode::CooperativeInefficient => EliminationMode::Cooperative,
            _ => EliminationMode::Unilateral,
        })
    }
}

type Rule<T> = Box<dyn Fn(&GameState, &[PeriodRecord]) -> T + Send + Sync>;
type OfferRule = Box<dyn Fn(&GameState, &Votes, &[PeriodRecord]) -> f64 + Send + Sync>;
type ResponseRule = Box<dyn Fn(&GameState, &Votes, f64, &[PeriodRecord]) -> Response + Send + Sync>;

/// Profile assembled from callbacks; simulated, never solved.
pub struct CustomProfile {
    pub eliminate_r: Rule<bool>,
    pub eliminate_d: Rule<bool>,
    pub offer: OfferRule,
    pub respond: ResponseRule,
    pub flow_bound: Option<f64>,
}

impl CustomProfile {
    /// Keeps the barrier, offers nothing and has D fight at once.
    pub fn always_reject() -> Self {
        CustomProfile {
            eliminate_r: Box::new(|_, _| false),
            eliminate_d: Box::new(|_, _| false),
            offer: Box::new(|_, _, _| 0.0),
            respond: Box::new(|_, _, _, _| Response::Reject),
            flow_bound: Some(1.0),
        }
    }

    /// Keeps the barrier for `periods` periods (offering `share` of the
    /// resource), then removes it and offers `share` forever; D always accepts.
    pub fn delayed_elimination(periods: u32, share: f64) -> Self {
        CustomProfile {
            eliminate_r: Box::new(move |state, _| state.t > periods),
            eliminate_d: Box::new(move |state, _| state.t > periods),
            offer: Box::new(move |state, _, _| share * state.y),
            respond: Box::new(|_, _, _, _| Response::Accept),
            flow_bound: Some(1.0),
        }
    }
}

impl fmt::Debug for CustomProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomProfile").field("flow_bound", &self.flow_bound).finish_non_exhaustive()
    }
}

impl Strategy for CustomProfile {
    fn eliminate_r(&self, state: &GameState, history: &[PeriodRecord]) -> bool {
        (self.eliminate_r)(state, history)
    }

    fn eliminate_d(&self, state: &GameState, history: &[PeriodRecord]) -> bool {
        (self.eliminate_d)(state, history)
    }

    fn offer(&self, state: &GameState, votes: &Votes, history: &[PeriodRecord]) -> f64 {
        (self.offer)(state, votes, history)
    }

    fn respond(&self, state: &GameState, votes: &Votes, offer: f64, history: &[PeriodRecord]) -> Response {
        (self.respond)(state, votes, offer, history)
    }

    fn flow_bound(&self) -> Option<f64> {
        self.flow_bound
    }
}
