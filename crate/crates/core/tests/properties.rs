mod common;

use common::{baseline_params, extended_params, set_b, with_extensions};
use crisis_bargain::classifier::{classify, classify_with, RegionLabel};
use crisis_bargain::engine::{new_game, ActionRecord, EngineError, Response};
use crisis_bargain::scalar::ratio;
use crisis_bargain::thresholds::{effective_mu, main_text, ThresholdSet};
use crisis_bargain::{BarrierDistribution, BigRational, EliminationMode, ModelParams};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn any_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        -2.0f64..2.0,
        Just(f64::NAN),
        Just(f64::INFINITY),
        Just(f64::NEG_INFINITY),
        Just(0.0),
        Just(1.0),
        any::<f64>(),
    ]
}

/// Random rational in `[lo, hi]` with denominator up to 1000.
fn rational_in(lo: i64, hi: i64) -> impl Strategy<Value = BigRational> {
    (1i64..=1000).prop_flat_map(move |den| (lo * den..=hi * den).prop_map(move |num| ratio(num, den)))
}

fn exact_baseline() -> impl Strategy<Value = ModelParams<BigRational>> {
    (1i64..99, 0i64..99, 1i64..100, 1i64..=100, 1i64..100, rational_in(0, 20), rational_in(0, 60)).prop_filter_map(
        "p < p1",
        |(d, p, p1, mu, h0, c_r, c_d)| {
            let params = ModelParams::baseline(
                ratio(d, 100),
                ratio(p, 100),
                ratio(p1, 100),
                ratio(mu, 100),
                ratio(h0, 100),
                c_r,
                c_d,
            );
            params.is_valid().then_some(params)
        },
    )
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn validate_is_total(
        delta in any_f64(), p in any_f64(), p1 in any_f64(), mu in any_f64(), h0 in any_f64(),
        c_r in any_f64(), c_d in any_f64(), rho in any_f64(), theta in any_f64(),
    ) {
        let params = ModelParams { rho, theta, ..ModelParams::baseline(delta, p, p1, mu, h0, c_r, c_d) };
        match params.validate() {
            Ok(()) => prop_assert!(params.is_valid()),
            Err(v) => prop_assert!(v.iter().next().is_some()),
        }
    }

    #[test]
    fn joint_threshold_forms_agree(params in baseline_params()) {
        let general = ThresholdSet::compute(&params);
        prop_assert!(relative_gap(general.clow_joint, main_text::inefficient_joint_threshold(&params)) <= 1e-12);
        prop_assert!(relative_gap(general.clow_d, main_text::inefficient_cd_threshold(&params)) <= 1e-12);
    }

    #[test]
    fn baseline_reduction_is_exact(params in exact_baseline()) {
        let t = ThresholdSet::compute(&params);
        prop_assert_eq!(&t.clow_d, &main_text::inefficient_cd_threshold(&params));
        prop_assert_eq!(&t.clow_joint, &main_text::inefficient_joint_threshold(&params));
    }

    #[test]
    fn joint_threshold_is_scaled_band_width(params in exact_baseline(), rho in 0i64..=100) {
        let params = ModelParams { rho: ratio(rho, 100), ..params };
        let t = ThresholdSet::compute(&params);
        let width = (BigRational::one() - params.delta.clone()) * (t.clow_d.clone() - t.cbar_d.clone());
        prop_assert_eq!(t.clow_joint, width);
    }

    #[test]
    fn feasibility_equivalence(params in exact_baseline(), on_boundary in any::<bool>()) {
        let params = if on_boundary {
            let c_d = ThresholdSet::compute(&params).clow_d;
            ModelParams { c_d, ..params }
        } else {
            params
        };
        let t = ThresholdSet::compute(&params);
        let feasible = t.offers.offer1_inefficient.raw <= params.h0;
        prop_assert_eq!(feasible, params.c_d >= t.clow_d);
    }

    #[test]
    fn thresholds_rise_with_theta(base in baseline_params()) {
        let mut last: Option<(f64, f64)> = None;
        for i in 0..100 {
            let params = with_extensions(base.clone(), 0.0, Some(i as f64 / 99.0));
            prop_assume!(params.is_valid());
            let t = ThresholdSet::compute(&params);
            if let Some((cd, joint)) = last {
                prop_assert!(t.clow_d >= cd && t.clow_joint >= joint, "theta {}", params.theta);
            }
            last = Some((t.clow_d, t.clow_joint));
        }
    }

    #[test]
    fn thresholds_rise_with_effective_mu(base in baseline_params()) {
        let mut last_x = f64::NEG_INFINITY;
        let mut last: Option<(f64, f64)> = None;
        for i in 0..100 {
            let rho = i as f64 / 99.0;
            let params = ModelParams { rho, ..base.clone() };
            let x = effective_mu(&params);
            prop_assert!(x >= last_x);
            // one step in rho moves x by at most (1 - mu) / (1 - delta) times the step
            if last_x.is_finite() {
                prop_assert!(x - last_x <= (1.0 - base.mu) / (1.0 - base.delta) / 99.0 + 1e-12);
            }
            last_x = x;
            let t = ThresholdSet::compute(&params);
            if let Some((cd, joint)) = last {
                prop_assert!(t.clow_d >= cd && t.clow_joint >= joint);
            }
            last = Some((t.clow_d, t.clow_joint));
        }
    }

    #[test]
    fn thresholds_fall_with_p(base in baseline_params()) {
        let mut last: Option<(f64, f64)> = None;
        for i in 0..100 {
            let p = base.p1 * i as f64 / 100.0;
            let t = ThresholdSet::compute(&ModelParams { p, ..base.clone() });
            if let Some((cbar, cd)) = last {
                prop_assert!(t.cbar_d <= cbar && t.clow_d <= cd);
            }
            last = Some((t.cbar_d, t.clow_d));
        }
    }

    #[test]
    fn efficient_threshold_ignores_barrier_parameters(
        base in baseline_params(), mu in 0.01f64..=1.0, h0 in 0.0f64..1.0, rho in 0.0f64..=1.0, theta in 0.05f64..=1.0,
    ) {
        let varied = ModelParams { mu, h0, rho, theta, ..base.clone() };
        let a = ThresholdSet::compute(&base).cbar_d;
        let b = ThresholdSet::compute(&varied).cbar_d;
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn labels_follow_margins(params in extended_params()) {
        let report = classify(&params).unwrap();
        let m = &report.margins;
        prop_assert_eq!(report.efficient_peace_exists, m.efficient >= 0.0);
        prop_assert_eq!(report.inefficient_peace_exists, m.cd >= 0.0 && m.joint >= 0.0);
        prop_assert_eq!(report.war_inevitable, !report.efficient_peace_exists && !report.inefficient_peace_exists);
        prop_assert_eq!(report.label(), RegionLabel::from_flags(m.efficient >= 0.0, m.cd >= 0.0 && m.joint >= 0.0));
        prop_assert!(report.regime_choice.efficient_spne <= report.efficient_peace_exists);
        prop_assert!(report.regime_choice.inefficient_spne <= report.inefficient_peace_exists);
    }

    #[test]
    fn labels_change_in_order_along_cd(base in baseline_params(), c_r in 0.0f64..20.0) {
        let t = ThresholdSet::compute(&base);
        prop_assume!(t.clow_d < t.cbar_d);
        let rank = |label: RegionLabel| match label {
            RegionLabel::War => 0,
            RegionLabel::InefficientPeace => 1,
            RegionLabel::Both => 2,
            other => panic!("unexpected label {other:?}"),
        };
        let top = 1.5 * t.cbar_d.abs().max(t.clow_d.abs()).max(1.0);
        let mut last = 0;
        for i in 0..=400 {
            let c_d = top * i as f64 / 400.0;
            let params = base.with_costs(c_r, c_d);
            let label = classify_with(&params, &t).label();
            let r = rank(label);
            prop_assert!(r >= last, "{label:?} after rank {last} at c_D = {c_d}");
            last = r;
        }
    }

    #[test]
    fn war_is_absorbing(offer in -5.0f64..1.0, seed in any::<u64>()) {
        let dist = BarrierDistribution::degenerate(0.8).unwrap();
        let mut game = new_game(&set_b(1.0, 25.0), &dist, seed).unwrap();
        game.step(&ActionRecord { elim_r: false, elim_d: None, offer: 0.0, response: Response::Reject }).unwrap();
        let state = game.state().clone();
        let history = game.history().len();
        let payoffs = game.payoffs();
        let again = game.step(&ActionRecord { elim_r: false, elim_d: None, offer, response: Response::Accept });
        prop_assert!(matches!(again, Err(EngineError::GameOver)));
        prop_assert_eq!(game.state(), &state);
        prop_assert_eq!(game.history().len(), history);
        prop_assert_eq!(game.payoffs(), payoffs);
    }
}

#[test]
fn exact_endpoints_of_effective_mu() {
    let params = ModelParams::baseline(ratio(9, 10), ratio(3, 10), ratio(7, 10), ratio(4, 5), ratio(3, 5), ratio(1, 1), ratio(25, 1));
    assert_eq!(effective_mu(&ModelParams { rho: BigRational::zero(), ..params.clone() }), ratio(4, 5));
    assert_eq!(effective_mu(&ModelParams { rho: BigRational::one(), ..params }), BigRational::one());
    for mu in [0.01, 0.37, 0.8, 1.0] {
        let p = ModelParams { mu, ..set_b(1.0, 25.0) };
        assert_eq!(effective_mu(&ModelParams { rho: 0.0, ..p.clone() }).to_bits(), mu.to_bits());
        assert_eq!(effective_mu(&ModelParams { rho: 1.0, ..p }).to_bits(), 1f64.to_bits());
    }
}

#[test]
fn cooperative_mode_leaves_thresholds_alone() {
    let unilateral = set_b(1.0, 25.0);
    let cooperative = ModelParams { elimination_mode: EliminationMode::Cooperative, ..unilateral.clone() };
    assert_eq!(ThresholdSet::compute(&unilateral), ThresholdSet::compute(&cooperative));
}
