//! Independent certification of the built-in profiles by enumerating
//! deviations, and re-derivation of the thresholds by bisection.
//!
//! Everything here is computed from the engine's payoff primitives
//! (discounting, war lotteries, postwar streams); the threshold formulas are
//! never consulted. D always best-responds, so a profile only passes if it
//! survives deviations even when D's prescribed off-path punishment would
//! not be credible.

mod bisect;

pub use bisect::{oracle_thresholds, Anomaly, Bracketed, OracleThresholds};

use serde::Serialize;
use thiserror::Error;

use crate::engine::payoff::Primitives;
use crate::engine::{Player, ProfileMode};
use crate::params::{ModelParams, Violations};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_GRID: usize = 10_000;
pub const MIN_GRID: usize = 1_000;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    InvalidParams(#[from] Violations),
    #[error("offer grid needs at least {MIN_GRID} intervals (got {0})")]
    GridTooCoarse(usize),
    #[error("search tolerance must be positive (got {0})")]
    BadTolerance(f64),
    #[error("no sign change for {threshold} within |cost| <= {limit}")]
    NoBracket { threshold: &'static str, limit: f64 },
}

/// What a deviating player does in period 1 (or in the stationary phase).
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeviationAction {
    /// R's elimination choice and offer; `war` when D's best response is
    /// to reject it.
    Offer { eliminate: bool, offer: f64, war: bool },
    /// D rejects the on-path period-1 offer.
    Reject,
    /// D votes against elimination in period 1 (cooperative mode).
    VoteAgainst,
    /// R underbids in the stationary phase, provoking war.
    StationaryUnderbid,
    /// D rejects the stationary offer.
    StationaryReject,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Deviation {
    pub player: Player,
    pub action: DeviationAction,
    pub gain: f64,
}

/// Best gain within each family of deviations; `None` when the family is
/// empty (no feasible offer is acceptable).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassGains {
    pub eliminate_war: f64,
    pub eliminate_peace: Option<f64>,
    pub keep_war: f64,
    pub keep_peace: Option<f64>,
    pub reject: f64,
    pub stationary_r: f64,
    pub stationary_d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OnPath {
    pub eliminate: bool,
    pub resource: f64,
    pub offer: f64,
    /// D's indifference offer in the on-path branch.
    pub cutoff: f64,
    /// Whether the cutoff fits within the resource.
    pub feasible: bool,
    pub payoff_r: f64,
    pub payoff_d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub mode: ProfileMode,
    pub grid_n: usize,
    pub tol: f64,
    pub pass: bool,
    pub max_gain_r: f64,
    pub max_gain_d: f64,
    pub best_deviation_r: Deviation,
    pub best_deviation_d: Deviation,
    pub class_gains: ClassGains,
    pub on_path: OnPath,
    /// Players with a deviation gaining more than `tol`.
    pub gaining: Vec<Player>,
    /// R's gain from keeping the barrier one more period at `t = 2` (with
    /// D best-responding). Outside the period-1 scope, so it does not
    /// affect `pass`; `None` when the barrier is already gone by then.
    pub delay_gain: Option<f64>,
}

/// Period-1 values of one elimination choice.
#[derive(Clone, Copy, Debug)]
struct Branch {
    eliminate: bool,
    y: f64,
    war_r: f64,
    war_d: f64,
}

/// Values that every period-1 deviation is measured with.
#[derive(Clone, Debug)]
pub(crate) struct Period1 {
    delta: f64,
    cont_r: f64,
    cont_d: f64,
    keep: Branch,
    elim: Branch,
    stationary_war_r: f64,
    stationary_war_d: f64,
    delay: (f64, f64, f64),
}

impl Period1 {
    pub(crate) fn new(prim: &Primitives) -> Self {
        let params = prim.params();
        let branch = |eliminate: bool| {
            let y = if eliminate { 1.0 } else { params.h0 };
            let (war_r, war_d) = prim.war_values(1, !eliminate, y);
            Branch { eliminate, y, war_r, war_d }
        };
        let (cont_r, cont_d) = prim.stationary_values();
        let (stationary_war_r, stationary_war_d) = prim.war_values(2, false, 1.0);
        let (delay_war_r, delay_war_d) = prim.war_values(2, true, params.mu);
        Period1 {
            delta: params.delta,
            cont_r,
            cont_d,
            keep: branch(false),
            elim: branch(true),
            stationary_war_r,
            stationary_war_d,
            delay: (params.mu, delay_war_r, delay_war_d),
        }
    }

    fn branch(&self, eliminate: bool) -> Branch {
        if eliminate {
            self.elim
        } else {
            self.keep
        }
    }

    /// D's best response to `offer` and the resulting payoffs. Compared
    /// against the cutoff itself so that the indifference offer is accepted
    /// however `offer + delta cont_d` happens to round.
    fn outcome(&self, b: Branch, offer: f64) -> (f64, f64, bool) {
        if offer >= self.cutoff(b) {
            (b.y - offer + self.delta * self.cont_r, offer + self.delta * self.cont_d, true)
        } else {
            (b.war_r, b.war_d, false)
        }
    }

    fn cutoff(&self, b: Branch) -> f64 {
        b.war_d - self.delta * self.cont_d
    }

    fn on_path(&self, mode: ProfileMode) -> OnPath {
        let b = self.branch(mode.eliminates_first());
        let cutoff = self.cutoff(b);
        let offer = cutoff.min(b.y);
        OnPath {
            eliminate: b.eliminate,
            resource: b.y,
            offer,
            cutoff,
            feasible: cutoff <= b.y,
            payoff_r: b.y - offer + self.delta * self.cont_r,
            payoff_d: offer + self.delta * self.cont_d,
        }
    }

    /// D's gain from rejecting the on-path offer.
    pub(crate) fn reject_gain(&self, mode: ProfileMode) -> f64 {
        let path = self.on_path(mode);
        self.branch(path.eliminate).war_d - path.payoff_d
    }

    /// R's gain from removing the barrier and provoking war.
    pub(crate) fn eliminate_war_gain(&self, mode: ProfileMode) -> f64 {
        self.elim.war_r - self.on_path(mode).payoff_r
    }
}

/// Certifies period-1 play of a built-in profile against every one-shot
/// deviation, plus the stationary phase.
///
/// R's deviations are {keep, remove} times offers on a uniform grid of
/// `grid_n + 1` points over `[0, y_1]`, D's cutoff whenever it fits, and an
/// offer just below the cutoff. D's deviation is rejecting the on-path
/// offer. Gains are measured against the payoffs the profile claims on path.
pub fn verify_period1(
    params: &ModelParams<f64>,
    mode: ProfileMode,
    grid_n: usize,
    tol: f64,
) -> Result<VerificationReport, OracleError> {
    params.validate()?;
    if grid_n < MIN_GRID {
        return Err(OracleError::GridTooCoarse(grid_n));
    }
    let p1 = Period1::new(&Primitives::new(params));
    Ok(report(&p1, mode, grid_n, tol))
}

fn report(p1: &Period1, mode: ProfileMode, grid_n: usize, tol: f64) -> VerificationReport {
    let on_path = p1.on_path(mode);

    let mut best_r: Option<Deviation> = None;
    let mut class = |eliminate: bool| -> (f64, Option<f64>) {
        let b = p1.branch(eliminate);
        let cutoff = p1.cutoff(b);
        let mut offers: Vec<f64> = (0..=grid_n).map(|i| b.y * i as f64 / grid_n as f64).collect();
        if cutoff <= b.y {
            offers.push(cutoff);
        }
        offers.push(cutoff.min(b.y) - 1.0);

        let mut war = f64::NEG_INFINITY;
        let mut peace: Option<f64> = None;
        for offer in offers {
            if eliminate == on_path.eliminate && offer == on_path.offer {
                continue;
            }
            let (payoff_r, _, accepted) = p1.outcome(b, offer);
            let gain = payoff_r - on_path.payoff_r;
            if accepted {
                peace = Some(peace.map_or(gain, |g| g.max(gain)));
            } else {
                war = war.max(gain);
            }
            if best_r.as_ref().is_none_or(|d| gain > d.gain) {
                best_r = Some(Deviation {
                    player: Player::R,
                    action: DeviationAction::Offer { eliminate, offer, war: !accepted },
                    gain,
                });
            }
        }
        (war, peace)
    };
    let (keep_war, keep_peace) = class(false);
    let (eliminate_war, eliminate_peace) = class(true);

    let stationary_r = p1.stationary_war_r - p1.cont_r;
    let stationary_offer = p1.stationary_war_d - p1.delta * p1.cont_d;
    let stationary_d = p1.stationary_war_d - (stationary_offer + p1.delta * p1.cont_d);
    let reject = p1.reject_gain(mode);

    let mut best_r = best_r.expect("grid is nonempty");
    if stationary_r > best_r.gain {
        best_r = Deviation { player: Player::R, action: DeviationAction::StationaryUnderbid, gain: stationary_r };
    }
    let mut candidates_d = vec![
        Deviation { player: Player::D, action: DeviationAction::Reject, gain: reject },
        Deviation { player: Player::D, action: DeviationAction::StationaryReject, gain: stationary_d },
    ];
    if mode == ProfileMode::CooperativeInefficient {
        // R already keeps the barrier, so D's veto changes nothing
        candidates_d.push(Deviation { player: Player::D, action: DeviationAction::VoteAgainst, gain: 0.0 });
    }
    let best_d = candidates_d
        .into_iter()
        .reduce(|a, b| if b.gain > a.gain { b } else { a })
        .expect("nonempty");

    let delay_gain = (!on_path.eliminate).then(|| {
        let (mu, war_r, war_d) = p1.delay;
        let cutoff = war_d - p1.delta * p1.cont_d;
        let payoff = if cutoff <= mu { mu - cutoff + p1.delta * p1.cont_r } else { war_r };
        payoff - p1.cont_r
    });

    let mut gaining = Vec::new();
    if best_r.gain > tol {
        gaining.push(Player::R);
    }
    if best_d.gain > tol {
        gaining.push(Player::D);
    }
    VerificationReport {
        mode,
        grid_n,
        tol,
        pass: gaining.is_empty(),
        max_gain_r: best_r.gain,
        max_gain_d: best_d.gain,
        best_deviation_r: best_r,
        best_deviation_d: best_d,
        class_gains: ClassGains {
            eliminate_war,
            eliminate_peace,
            keep_war,
            keep_peace,
            reject,
            stationary_r,
            stationary_d,
        },
        on_path,
        gaining,
        delay_gain,
    }
}
