//! The stage game as a state machine: elimination, offer, response.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::conservation::Flows;
use super::payoff;
use crate::params::{BarrierDistribution, EliminationMode, ModelParams, Violations};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Player {
    /// Rising power, the proposer.
    R,
    /// Declining power, the responder.
    D,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    Accept,
    Reject,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GameState {
    pub t: u32,
    pub barrier_present: bool,
    /// Resource on the table this period.
    pub y: f64,
    /// Most recent barrier draw (`None` before the first draw).
    pub h_prev: Option<f64>,
    pub war_occurred: bool,
    pub winner: Option<Player>,
}

impl GameState {
    pub fn initial(h0: f64) -> Self {
        GameState { t: 1, barrier_present: true, y: h0, h_prev: None, war_occurred: false, winner: None }
    }

    /// The same period after the barrier has been removed.
    pub fn after_elimination(&self) -> Self {
        GameState { barrier_present: false, y: 1.0, ..self.clone() }
    }
}

/// Everything chosen in one period.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionRecord {
    /// R's vote on elimination (false once the barrier is gone).
    pub elim_r: bool,
    /// D's vote; present only in cooperative mode while the barrier stands.
    pub elim_d: Option<bool>,
    pub offer: f64,
    pub response: Response,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WarRecord {
    pub winner: Player,
    pub win_prob_d: f64,
    /// Winner's discounted prize within the horizon, current period included.
    pub prize: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodRecord {
    pub t: u32,
    /// Resource after this period's elimination decision.
    pub y: f64,
    pub barrier_present: bool,
    pub eliminated_now: bool,
    pub actions: ActionRecord,
    pub flows: Option<Flows>,
    pub war: Option<WarRecord>,
}

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    InvalidParams(#[from] Violations),
    #[error("offer {offer} exceeds the resource {y}")]
    OfferAboveResource { offer: f64, y: f64 },
    #[error("offer must be finite (got {0})")]
    NonFiniteOffer(f64),
    #[error("the game ended in war; no further actions are accepted")]
    GameOver,
    #[error("cooperative elimination needs D's vote while the barrier stands")]
    MissingVote,
    #[error("D does not vote on elimination in unilateral mode")]
    UnexpectedVote,
}

/// One play of the game with its own random stream and a payoff ledger.
///
/// Offers are bounded above by the resource but not below: a negative offer
/// is a transfer from D to R, which the indifference offers require once war
/// costs are large.
#[derive(Clone, Debug)]
pub struct Game {
    params: ModelParams<f64>,
    dist: BarrierDistribution,
    rng: ChaCha8Rng,
    horizon: u32,
    state: GameState,
    history: Vec<PeriodRecord>,
    discount: f64,
    payoff_r: f64,
    payoff_d: f64,
    max_flow: f64,
}

/// Fresh game at period 1 with the barrier in place and `y_1 = h0`.
pub fn new_game(params: &ModelParams<f64>, dist: &BarrierDistribution, seed: u64) -> Result<Game, EngineError> {
    Game::new(params, dist, ChaCha8Rng::seed_from_u64(seed), u32::MAX)
}

impl Game {
    pub fn new(
        params: &ModelParams<f64>,
        dist: &BarrierDistribution,
        rng: ChaCha8Rng,
        horizon: u32,
    ) -> Result<Self, EngineError> {
        params.validate()?;
        Ok(Game {
            params: params.clone(),
            dist: dist.clone(),
            rng,
            horizon,
            state: GameState::initial(params.h0),
            history: Vec::new(),
            discount: 1.0,
            payoff_r: 0.0,
            payoff_d: 0.0,
            max_flow: 0.0,
        })
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn history(&self) -> &[PeriodRecord] {
        &self.history
    }

    pub fn params(&self) -> &ModelParams<f64> {
        &self.params
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// Discounted payoffs accumulated so far, war costs included.
    pub fn payoffs(&self) -> (f64, f64) {
        (self.payoff_r, self.payoff_d)
    }

    /// Largest absolute per-period flow seen so far.
    pub fn max_flow(&self) -> f64 {
        self.max_flow
    }

    pub fn is_over(&self) -> bool {
        self.state.war_occurred || self.state.t > self.horizon
    }

    /// Whether the given votes remove the barrier under the current mode.
    pub fn eliminates(&self, elim_r: bool, elim_d: Option<bool>) -> bool {
        self.state.barrier_present
            && match self.params.elimination_mode {
                EliminationMode::Unilateral => elim_r,
                EliminationMode::Cooperative => elim_r && elim_d.unwrap_or(false),
            }
    }

    /// State the proposer faces after the elimination votes.
    pub fn staged(&self, elim_r: bool, elim_d: Option<bool>) -> GameState {
        if self.eliminates(elim_r, elim_d) {
            self.state.after_elimination()
        } else {
            self.state.clone()
        }
    }

    pub fn step(&mut self, actions: &ActionRecord) -> Result<&PeriodRecord, EngineError> {
        if self.state.war_occurred {
            return Err(EngineError::GameOver);
        }
        if self.state.barrier_present {
            match (self.params.elimination_mode, actions.elim_d) {
                (EliminationMode::Cooperative, None) => return Err(EngineError::MissingVote),
                (EliminationMode::Unilateral, Some(_)) => return Err(EngineError::UnexpectedVote),
                _ => {}
            }
        }
        if !actions.offer.is_finite() {
            return Err(EngineError::NonFiniteOffer(actions.offer));
        }
        let staged = self.staged(actions.elim_r, actions.elim_d);
        if actions.offer > staged.y {
            return Err(EngineError::OfferAboveResource { offer: actions.offer, y: staged.y });
        }
        let eliminated_now = self.state.barrier_present && !staged.barrier_present;
        self.state = staged;

        let mut record = PeriodRecord {
            t: self.state.t,
            y: self.state.y,
            barrier_present: self.state.barrier_present,
            eliminated_now,
            actions: actions.clone(),
            flows: None,
            war: None,
        };
        match actions.response {
            Response::Accept => {
                let flows = Flows::split(self.state.y, actions.offer);
                self.payoff_r += self.discount * flows.r_total();
                self.payoff_d += self.discount * flows.d;
                self.max_flow = self.max_flow.max(flows.r.abs()).max(flows.d.abs());
                record.flows = Some(flows);
                self.advance();
            }
            Response::Reject => record.war = Some(self.fight()),
        }
        self.history.push(record);
        Ok(self.history.last().expect("just pushed"))
    }

    fn advance(&mut self) {
        if self.state.barrier_present {
            let h = self.dist.sample(&mut self.rng);
            self.state.h_prev = Some(h);
            self.state.y = h;
        } else {
            self.state.y = 1.0;
        }
        self.state.t += 1;
        self.discount *= self.params.delta;
    }

    /// Terminal lottery: the winner keeps the current resource and every
    /// later one, which stays behind the barrier (with per-period chance
    /// `rho` of renormalizing for good) if the barrier was standing.
    fn fight(&mut self) -> WarRecord {
        let params = &self.params;
        let win_prob_d = payoff::war_win_prob_d(params, self.state.t, self.state.barrier_present);
        let winner = if self.rng.random::<f64>() < win_prob_d { Player::D } else { Player::R };

        let mut prize = self.discount * self.state.y;
        let mut discount = self.discount;
        let mut renormalized = !self.state.barrier_present;
        for _ in self.state.t..self.horizon.min(self.state.t.saturating_add(100_000)) {
            discount *= params.delta;
            if !renormalized && self.rng.random::<f64>() < params.rho {
                renormalized = true;
            }
            let flow = if renormalized { 1.0 } else { self.dist.sample(&mut self.rng) };
            prize += discount * flow;
            if discount == 0.0 {
                break;
            }
        }
        self.max_flow = self.max_flow.max(1.0);

        match winner {
            Player::R => self.payoff_r += prize,
            Player::D => self.payoff_d += prize,
        }
        self.payoff_r -= self.discount * params.c_r;
        self.payoff_d -= self.discount * params.c_d;
        self.state.war_occurred = true;
        self.state.winner = Some(winner);
        WarRecord { winner, win_prob_d, prize }
    }
}
