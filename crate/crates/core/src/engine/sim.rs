//! Seeded, parallel Monte Carlo estimation of discounted payoffs.

use std::collections::BTreeMap;
use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::profile::{Strategy, Votes};
use super::state::{ActionRecord, EngineError, Game, PeriodRecord};
use crate::params::{BarrierDistribution, ModelParams};

/// Runs per parallel work item; fixed so results do not depend on the
/// thread count.
const CHUNK: u64 = 256;

/// Target for the truncation tail relative to total surplus `1/(1-delta)`.
pub const TAIL_FRACTION: f64 = 1e-8;

/// Plays until war or the horizon.
pub fn play<S: Strategy + ?Sized>(game: &mut Game, strategy: &S) -> Result<(), EngineError> {
    let cooperative = game.params().elimination_mode == crate::params::EliminationMode::Cooperative;
    while !game.is_over() {
        let state = game.state().clone();
        let history = game.history();
        let votes = if state.barrier_present {
            Votes {
                elim_r: Some(strategy.eliminate_r(&state, history)),
                elim_d: cooperative.then(|| strategy.eliminate_d(&state, history)),
            }
        } else {
            Votes::default()
        };
        let staged = game.staged(votes.elim_r.unwrap_or(false), votes.elim_d);
        let offer = strategy.offer(&staged, &votes, history);
        let response = strategy.respond(&staged, &votes, offer, history);
        game.step(&ActionRecord { elim_r: votes.elim_r.unwrap_or(false), elim_d: votes.elim_d, offer, response })?;
    }
    Ok(())
}

/// Smallest horizon with `delta^T * flow_bound < TAIL_FRACTION`.
pub fn default_horizon(delta: f64, flow_bound: f64) -> u32 {
    let t = (TAIL_FRACTION / flow_bound.max(1.0)).ln() / delta.ln();
    (t.ceil().max(1.0) as u32).saturating_add(1)
}

/// `delta^T * max_flow / (1 - delta)`: most that periods after `T` can add.
pub fn tail_bound(delta: f64, horizon: u32, max_flow: f64) -> f64 {
    delta.powi(horizon.min(i32::MAX as u32) as i32) * max_flow / (1.0 - delta)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

/// Running mean and sum of squared deviations, mergeable in any grouping.
#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        Moments {
            n,
            mean: self.mean + delta * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64,
        }
    }

    fn estimate(&self) -> Estimate {
        let std_error = if self.n > 1 { (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt() } else { 0.0 };
        Estimate { mean: self.mean, std_error }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EliminationCount {
    /// `None` when the barrier was never removed (war or horizon first).
    pub period: Option<u32>,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimStats {
    pub n_runs: u64,
    pub horizon: u32,
    pub seed: u64,
    pub payoff_r: Estimate,
    pub payoff_d: Estimate,
    pub war_frequency: f64,
    pub elimination_periods: Vec<EliminationCount>,
    pub max_flow: f64,
    pub tail_bound: f64,
    pub periods_checked: u64,
    /// Peaceful periods whose flows did not add up to the resource exactly.
    pub conservation_failures: u64,
}

#[derive(Clone, Debug, Default)]
struct Partial {
    r: Moments,
    d: Moments,
    wars: u64,
    eliminations: BTreeMap<Option<u32>, u64>,
    max_flow: f64,
    periods: u64,
    failures: u64,
}

impl Partial {
    fn merge(mut self, other: Partial) -> Partial {
        self.r = self.r.merge(other.r);
        self.d = self.d.merge(other.d);
        self.wars += other.wars;
        for (k, v) in other.eliminations {
            *self.eliminations.entry(k).or_default() += v;
        }
        self.max_flow = self.max_flow.max(other.max_flow);
        self.periods += other.periods;
        self.failures += other.failures;
        self
    }
}

fn run_rng(seed: u64, run: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    rng
}

fn game_params<S: Strategy + ?Sized>(strategy: &S, params: &ModelParams<f64>) -> ModelParams<f64> {
    match strategy.elimination_mode() {
        Some(mode) => ModelParams { elimination_mode: mode, ..params.clone() },
        None => params.clone(),
    }
}

/// Plays run `run` of a simulation and returns the finished game.
pub fn play_run<S: Strategy + ?Sized>(
    strategy: &S,
    params: &ModelParams<f64>,
    dist: &BarrierDistribution,
    horizon: u32,
    seed: u64,
    run: u64,
) -> Result<Game, EngineError> {
    let mut game = Game::new(&game_params(strategy, params), dist, run_rng(seed, run), horizon)?;
    play(&mut game, strategy)?;
    Ok(game)
}

/// Monte Carlo estimate of both players' discounted payoffs. `horizon`
/// defaults to [`default_horizon`] for the strategy's flow bound.
pub fn simulate<S: Strategy + ?Sized>(
    strategy: &S,
    params: &ModelParams<f64>,
    dist: &BarrierDistribution,
    horizon: Option<u32>,
    n_runs: u64,
    seed: u64,
) -> Result<SimStats, EngineError> {
    params.validate()?;
    let n_runs = n_runs.max(1);
    let bound = strategy.flow_bound().unwrap_or(1.0);
    let horizon = horizon.unwrap_or_else(|| default_horizon(params.delta, bound)).max(1);
    let chunks = n_runs.div_ceil(CHUNK);

    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|chunk| -> Result<Partial, EngineError> {
            let mut part = Partial::default();
            for run in chunk * CHUNK..((chunk + 1) * CHUNK).min(n_runs) {
                let game = play_run(strategy, params, dist, horizon, seed, run)?;
                let (r, d) = game.payoffs();
                part.r.push(r);
                part.d.push(d);
                part.wars += u64::from(game.state().war_occurred);
                let eliminated = game.history().iter().find(|rec| rec.eliminated_now).map(|rec| rec.t);
                *part.eliminations.entry(eliminated).or_default() += 1;
                part.max_flow = part.max_flow.max(game.max_flow());
                for rec in game.history() {
                    if let Some(flows) = &rec.flows {
                        part.periods += 1;
                        part.failures += u64::from(!flows.conserves(rec.y));
                    }
                }
            }
            Ok(part)
        })
        .collect::<Result<_, _>>()?;
    let total = partials.into_iter().fold(Partial::default(), Partial::merge);

    let max_flow = total.max_flow.max(bound);
    Ok(SimStats {
        n_runs,
        horizon,
        seed,
        payoff_r: total.r.estimate(),
        payoff_d: total.d.estimate(),
        war_frequency: total.wars as f64 / n_runs as f64,
        elimination_periods: total
            .eliminations
            .into_iter()
            .map(|(period, count)| EliminationCount { period, count })
            .collect(),
        max_flow,
        tail_bound: tail_bound(params.delta, horizon, max_flow),
        periods_checked: total.periods,
        conservation_failures: total.failures,
    })
}

/// One line of a trajectory log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryLine<'a> {
    pub run: u64,
    #[serde(flatten)]
    pub record: &'a PeriodRecord,
}

/// Writes records as line-delimited JSON.
pub fn write_jsonl<W: Write>(mut out: W, run: u64, records: &[PeriodRecord]) -> io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut out, &TrajectoryLine { run, record }).map_err(io::Error::other)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
