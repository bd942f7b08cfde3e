mod common;

use common::{baseline_params, set_b};
use crisis_bargain::engine::payoff::war_values;
use crisis_bargain::engine::sim::{play_run, tail_bound};
use crisis_bargain::engine::{analytic_payoffs, equilibrium_profile, simulate, CustomProfile, ProfileMode, SimStats};
use crisis_bargain::BarrierDistribution;
use proptest::prelude::*;

const RUNS: u64 = 20_000;

fn families(mu: f64) -> [BarrierDistribution; 3] {
    [
        BarrierDistribution::degenerate(mu).unwrap(),
        BarrierDistribution::uniform_around(mu, mu.min(1.0 - mu)).unwrap(),
        BarrierDistribution::beta_with_mean(mu, 4.0).unwrap(),
    ]
}

fn within_3se(stats: &SimStats, r: f64, d: f64) -> bool {
    let slack = |se: f64| 3.0 * se + stats.tail_bound + 1e-9;
    (stats.payoff_r.mean - r).abs() <= slack(stats.payoff_r.std_error)
        && (stats.payoff_d.mean - d).abs() <= slack(stats.payoff_d.std_error)
}

#[test]
fn builtin_profiles_match_closed_forms_under_every_family() {
    for (params, mode) in [(set_b(1.0, 25.0), ProfileMode::InefficientPeace), (set_b(1.0, 35.0), ProfileMode::EfficientPeace)] {
        let profile = equilibrium_profile(&params, mode).unwrap();
        let expected = analytic_payoffs(&params, mode).unwrap();
        for dist in families(params.mu) {
            let stats = simulate(&profile, &params, &dist, None, 2_000, 7).unwrap();
            assert!(stats.tail_bound < 1e-8 * 10.0 / (1.0 - params.delta));
            assert!((stats.payoff_r.mean - expected.v_r).abs() <= 1e-6, "{mode:?} {stats:?}");
            assert!((stats.payoff_d.mean - expected.v_d).abs() <= 1e-6, "{mode:?} {stats:?}");
            assert_eq!(stats.war_frequency, 0.0);
            assert_eq!(stats.conservation_failures, 0);
        }
    }
}

#[test]
fn immediate_war_is_distribution_invariant() {
    let params = set_b(1.0, 25.0);
    let (r, d) = war_values(&params, 1, true, params.h0);
    for dist in families(params.mu) {
        let stats = simulate(&CustomProfile::always_reject(), &params, &dist, None, RUNS, 11).unwrap();
        assert_eq!(stats.war_frequency, 1.0);
        assert!(within_3se(&stats, r, d), "{:?}: {stats:?} vs ({r}, {d})", dist.kind());
    }
}

#[test]
fn delayed_elimination_is_distribution_invariant() {
    let params = set_b(1.0, 25.0);
    let (delta, mu, h0, share) = (params.delta, params.mu, params.h0, 0.4);
    // resource h0, then two barrier draws, then 1 forever
    let stream = h0 + delta * mu + delta * delta * mu + delta.powi(3) / (1.0 - delta);
    for dist in families(mu) {
        let stats = simulate(&CustomProfile::delayed_elimination(3, share), &params, &dist, None, RUNS, 5).unwrap();
        assert!(within_3se(&stats, (1.0 - share) * stream, share * stream), "{:?}: {stats:?}", dist.kind());
        assert_eq!(stats.conservation_failures, 0);
        assert!(stats.periods_checked > 0);
    }
}

#[test]
fn truncation_error_is_within_the_reported_bound() {
    let params = set_b(1.0, 25.0);
    let profile = equilibrium_profile(&params, ProfileMode::InefficientPeace).unwrap();
    let expected = analytic_payoffs(&params, ProfileMode::InefficientPeace).unwrap();
    let dist = BarrierDistribution::degenerate(params.mu).unwrap();
    for horizon in [20, 100, 400] {
        let stats = simulate(&profile, &params, &dist, Some(horizon), 10, 1).unwrap();
        let bound = tail_bound(params.delta, horizon, stats.max_flow);
        assert_eq!(stats.tail_bound, bound);
        assert!((stats.payoff_r.mean - expected.v_r).abs() <= bound + 1e-9);
        assert!((stats.payoff_d.mean - expected.v_d).abs() <= bound + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cooperative_path_equals_unilateral_path(params in baseline_params(), seed in any::<u64>()) {
        let unilateral = equilibrium_profile(&params, ProfileMode::InefficientPeace);
        prop_assume!(unilateral.is_ok());
        let unilateral = unilateral.unwrap();
        let cooperative = equilibrium_profile(&params, ProfileMode::CooperativeInefficient).unwrap();
        let dist = BarrierDistribution::uniform_around(params.mu, params.mu.min(1.0 - params.mu)).unwrap();

        let a = play_run(&unilateral, &params, &dist, 60, seed, 0).unwrap();
        let b = play_run(&cooperative, &params, &dist, 60, seed, 0).unwrap();
        prop_assert_eq!(a.history().len(), b.history().len());
        for (x, y) in a.history().iter().zip(b.history()) {
            prop_assert_eq!((x.t, x.y, x.barrier_present, x.eliminated_now), (y.t, y.y, y.barrier_present, y.eliminated_now));
            prop_assert_eq!((x.actions.elim_r, x.actions.offer, x.actions.response), (y.actions.elim_r, y.actions.offer, y.actions.response));
            prop_assert_eq!(&x.flows, &y.flows);
            prop_assert_eq!(&x.war, &y.war);
        }
        prop_assert_eq!(a.payoffs(), b.payoffs());
    }

    #[test]
    fn flows_always_sum_to_the_resource(params in baseline_params(), seed in any::<u64>(), share in -1.0f64..1.0) {
        let dist = BarrierDistribution::beta_with_mean(params.mu.min(0.99), 3.0).unwrap();
        let game = play_run(&CustomProfile::delayed_elimination(4, share), &params, &dist, 50, seed, 3).unwrap();
        for record in game.history() {
            let flows = record.flows.as_ref().unwrap();
            prop_assert!(flows.conserves(record.y), "{record:?}");
        }
    }
}
