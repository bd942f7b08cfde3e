//! Stage-game execution, strategy profiles and Monte Carlo simulation.

pub mod conservation;
pub mod payoff;
pub mod profile;
pub mod sim;
pub mod state;

pub use conservation::Flows;
pub use payoff::{analytic_payoffs, AnalyticPayoffs, Primitives};
pub use profile::{equilibrium_profile, BuiltinProfile, CustomProfile, ProfileError, ProfileMode, Strategy, Votes};
pub use sim::{simulate, SimStats};
pub use state::{new_game, ActionRecord, EngineError, Game, GameState, PeriodRecord, Player, Response};
