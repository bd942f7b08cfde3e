//! Equilibrium taxonomy for single parameter points, region rasters over
//! the cost plane, comparative statics, and the band-intersection search.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::params::{ModelParams, Violations};
use crate::scalar::Scalar;
use crate::thresholds::ThresholdSet;

/// Signed distances to each existence condition; `>= 0` means satisfied.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Margins<S> {
    /// `c_D - cbar_D`
    #[serde(rename = "margin_efficient")]
    pub efficient: S,
    /// `c_D - clow_D`
    #[serde(rename = "margin_cd")]
    pub cd: S,
    /// `c_D + c_R - Clow`
    #[serde(rename = "margin_joint")]
    pub joint: S,
}

impl<S: Scalar> Margins<S> {
    pub fn efficient_holds(&self) -> bool {
        self.efficient >= S::zero()
    }

    pub fn inefficient_holds(&self) -> bool {
        self.cd >= S::zero() && self.joint >= S::zero()
    }
}

/// Existence once the rising power's period-1 switch between the two
/// peaceful regimes is also taken into account.
///
/// Above `cbar_D` both peaceful paths are individually feasible, but the
/// rising power can always steer period 1 into whichever it prefers. With
/// `Clow > 0` it prefers removing the barrier, with `Clow < 0` keeping it.
/// Below `cbar_D` (and for the inefficient regime everywhere below `cbar_D`)
/// the refined and unrefined conditions coincide, apart from the
/// keep-and-fight option covered by `keep_war_joint`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegimeChoice {
    pub efficient_spne: bool,
    pub inefficient_spne: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquilibriumReport<S> {
    pub efficient_peace_exists: bool,
    pub inefficient_peace_exists: bool,
    pub war_inevitable: bool,
    /// `c_D < cbar_D`, the restriction maintained throughout the main analysis.
    pub assumption_holds: bool,
    pub margins: Margins<S>,
    pub regime_choice: RegimeChoice,
}

impl<S: Scalar> EquilibriumReport<S> {
    pub fn label(&self) -> RegionLabel {
        RegionLabel::from_flags(self.efficient_peace_exists, self.inefficient_peace_exists)
    }
}

/// Classifies a point; invalid parameters are refused with their violations.
pub fn classify<S: Scalar>(params: &ModelParams<S>) -> Result<EquilibriumReport<S>, Violations> {
    params.validate()?;
    Ok(classify_with(params, &ThresholdSet::compute(params)))
}

/// Classification from precomputed thresholds; no validation.
pub fn classify_with<S: Scalar>(params: &ModelParams<S>, t: &ThresholdSet<S>) -> EquilibriumReport<S> {
    let zero = S::zero();
    let joint_cost = params.c_d.clone() + params.c_r.clone();
    let margins = Margins {
        efficient: params.c_d.clone() - t.cbar_d.clone(),
        cd: params.c_d.clone() - t.clow_d.clone(),
        joint: joint_cost.clone() - t.clow_joint.clone(),
    };
    let efficient = margins.efficient_holds();
    let inefficient = margins.inefficient_holds();

    let efficient_spne = efficient
        && if margins.cd >= zero {
            t.clow_joint >= zero
        } else {
            joint_cost >= t.keep_war_joint
        };
    let inefficient_spne = inefficient && (!efficient || t.clow_joint <= zero);

    EquilibriumReport {
        efficient_peace_exists: efficient,
        inefficient_peace_exists: inefficient,
        war_inevitable: !efficient && !inefficient,
        assumption_holds: !efficient,
        margins,
        regime_choice: RegimeChoice { efficient_spne, inefficient_spne },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionLabel {
    War,
    InefficientPeace,
    EfficientPeace,
    Both,
    Skipped,
}

impl RegionLabel {
    pub fn from_flags(efficient: bool, inefficient: bool) -> Self {
        match (efficient, inefficient) {
            (true, true) => RegionLabel::Both,
            (true, false) => RegionLabel::EfficientPeace,
            (false, true) => RegionLabel::InefficientPeace,
            (false, false) => RegionLabel::War,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::War => "war",
            RegionLabel::InefficientPeace => "inefficient_peace",
            RegionLabel::EfficientPeace => "efficient_peace",
            RegionLabel::Both => "both",
            RegionLabel::Skipped => "skipped",
        }
    }

    /// Figure convention: coexistence is drawn as efficient peace.
    pub fn for_figure(self) -> Self {
        match self {
            RegionLabel::Both => RegionLabel::EfficientPeace,
            other => other,
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegionLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "war" => RegionLabel::War,
            "inefficient_peace" => RegionLabel::InefficientPeace,
            "efficient_peace" => RegionLabel::EfficientPeace,
            "both" => RegionLabel::Both,
            "skipped" => RegionLabel::Skipped,
            other => return Err(format!("unknown region label `{other}`")),
        })
    }
}

/// Closed interval sampled at `cells` cell centers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, cells: usize) -> Self {
        Axis { lo, hi, cells }
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.step()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridCell {
    pub c_r: f64,
    pub c_d: f64,
    pub label: RegionLabel,
    pub margins: Option<Margins<f64>>,
}

/// Boundary lines of the cost-plane partition: two horizontals and the
/// slanted joint-cost line `c_D + c_R = Clow`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Boundaries {
    pub cbar_d: f64,
    pub clow_d: f64,
    pub clow_joint: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionGrid {
    pub base: ModelParams<f64>,
    pub c_r_axis: Axis,
    pub c_d_axis: Axis,
    /// Row-major: all `c_R` cells for the lowest `c_D` row first.
    pub cells: Vec<GridCell>,
    pub boundaries: Boundaries,
}

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("resolution must be positive on both axes")]
    EmptyResolution,
    #[error(transparent)]
    InvalidBase(#[from] Violations),
}

impl RegionGrid {
    pub fn cell(&self, i_d: usize, i_r: usize) -> &GridCell {
        &self.cells[i_d * self.c_r_axis.cells + i_r]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[GridCell]> {
        self.cells.chunks(self.c_r_axis.cells)
    }
}

/// Rasterizes the `(c_R, c_D)` plane around `base`; invalid cells are
/// labeled [`RegionLabel::Skipped`].
pub fn region_grid(
    base: &ModelParams<f64>,
    c_r_range: (f64, f64),
    c_d_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<RegionGrid, GridError> {
    let (n_r, n_d) = resolution;
    if n_r == 0 || n_d == 0 {
        return Err(GridError::EmptyResolution);
    }
    base.validate()?;
    let c_r_axis = Axis::new(c_r_range.0, c_r_range.1, n_r);
    let c_d_axis = Axis::new(c_d_range.0, c_d_range.1, n_d);
    let thresholds = ThresholdSet::compute(base);

    let cells: Vec<GridCell> = (0..n_r * n_d)
        .into_par_iter()
        .map(|idx| {
            let c_r = c_r_axis.center(idx % n_r);
            let c_d = c_d_axis.center(idx / n_r);
            match classify(&base.with_costs(c_r, c_d)) {
                Ok(report) => GridCell { c_r, c_d, label: report.label(), margins: Some(report.margins) },
                Err(_) => GridCell { c_r, c_d, label: RegionLabel::Skipped, margins: None },
            }
        })
        .collect();

    Ok(RegionGrid {
        base: base.clone(),
        c_r_axis,
        c_d_axis,
        cells,
        boundaries: Boundaries {
            cbar_d: thresholds.cbar_d,
            clow_d: thresholds.clow_d,
            clow_joint: thresholds.clow_joint,
        },
    })
}

/// Parameter that a comparative-statics sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Knob {
    Mu,
    P,
    P1,
    Delta,
    H0,
    #[serde(rename = "c_D")]
    CD,
    #[serde(rename = "c_R")]
    CR,
    Rho,
    Theta,
}

#[derive(Debug, Error, PartialEq)]
#[error("unknown knob `{0}` (expected one of mu, p, p1, delta, h0, c_D, c_R, rho, theta)")]
pub struct UnknownKnob(pub String);

impl FromStr for Knob {
    type Err = UnknownKnob;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "mu" => Knob::Mu,
            "p" => Knob::P,
            "p1" => Knob::P1,
            "delta" => Knob::Delta,
            "h0" => Knob::H0,
            "c_D" | "c-d" | "cd" => Knob::CD,
            "c_R" | "c-r" | "cr" => Knob::CR,
            "rho" => Knob::Rho,
            "theta" => Knob::Theta,
            other => return Err(UnknownKnob(other.to_string())),
        })
    }
}

impl Knob {
    pub fn name(self) -> &'static str {
        match self {
            Knob::Mu => "mu",
            Knob::P => "p",
            Knob::P1 => "p1",
            Knob::Delta => "delta",
            Knob::H0 => "h0",
            Knob::CD => "c_D",
            Knob::CR => "c_R",
            Knob::Rho => "rho",
            Knob::Theta => "theta",
        }
    }

    pub fn apply<S: Scalar>(self, base: &ModelParams<S>, value: S) -> ModelParams<S> {
        let mut params = base.clone();
        match self {
            Knob::Mu => params.mu = value,
            Knob::P => params.p = value,
            Knob::P1 => params.p1 = value,
            Knob::Delta => params.delta = value,
            Knob::H0 => params.h0 = value,
            Knob::CD => params.c_d = value,
            Knob::CR => params.c_r = value,
            Knob::Rho => params.rho = value,
            Knob::Theta => params.theta = value,
        }
        params
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub thresholds: ThresholdSet<f64>,
    pub report: Option<EquilibriumReport<f64>>,
    pub violations: Option<Violations>,
}

/// Thresholds and classification along one knob. Invalid points keep their
/// thresholds (which may be meaningless) and carry the violations instead of
/// a report.
pub fn comparative_static(base: &ModelParams<f64>, knob: Knob, values: &[f64]) -> Vec<SweepPoint> {
    values
        .iter()
        .map(|&value| {
            let params = knob.apply(base, value);
            let thresholds = ThresholdSet::compute(&params);
            match params.validate() {
                Ok(()) => SweepPoint {
                    value,
                    report: Some(classify_with(&params, &thresholds)),
                    thresholds,
                    violations: None,
                },
                Err(v) => SweepPoint { value, thresholds, report: None, violations: Some(v) },
            }
        })
        .collect()
}

/// Same as [`comparative_static`] but with the knob given by name.
pub fn comparative_static_by_name(
    base: &ModelParams<f64>,
    knob: &str,
    values: &[f64],
) -> Result<Vec<SweepPoint>, UnknownKnob> {
    Ok(comparative_static(base, knob.parse()?, values))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntersectionSearch {
    pub found: bool,
    pub witness: Option<(f64, f64)>,
    /// `[lo, hi)` band of `c_D` values searched (empty when `hi <= lo`).
    pub c_d_band: (f64, f64),
    pub c_r_max: f64,
    pub band_empty: bool,
}

/// Grid search for a point with `clow_D <= c_D < cbar_D`, `c_D >= 0` and
/// `c_D + c_R >= Clow`. A `false` result over a nonempty band is reported
/// together with the box that was searched.
pub fn intersection_nonempty(base: &ModelParams<f64>) -> IntersectionSearch {
    const STEPS: usize = 256;
    let t = ThresholdSet::compute(base);
    let lo = t.clow_d.max(0.0);
    let hi = t.cbar_d;
    let c_r_max = 10.0 * t.clow_joint.abs().max(1.0);
    let band_empty = !(hi > lo);
    let mut search = IntersectionSearch { found: false, witness: None, c_d_band: (lo, hi), c_r_max, band_empty };
    if band_empty {
        return search;
    }
    for j in 0..=STEPS {
        let c_r = c_r_max * j as f64 / STEPS as f64;
        for k in 0..STEPS {
            let c_d = lo + (hi - lo) * k as f64 / STEPS as f64;
            if c_d + c_r >= t.clow_joint && c_d >= t.clow_d && c_d < t.cbar_d {
                search.found = true;
                search.witness = Some((c_r, c_d));
                return search;
            }
        }
    }
    search
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::decimal;
    use num_rational::BigRational;

    fn set_b(c_r: f64, c_d: f64) -> ModelParams<f64> {
        ModelParams::baseline(0.9, 0.3, 0.7, 0.8, 0.6, c_r, c_d)
    }

    #[test]
    fn set_b_middle_band() {
        let report = classify(&set_b(1.0, 25.0)).unwrap();
        assert!(!report.efficient_peace_exists);
        assert!(report.inefficient_peace_exists);
        assert!(!report.war_inevitable);
        assert!(report.assumption_holds);
        assert_eq!(report.label(), RegionLabel::InefficientPeace);
        assert!((report.margins.efficient + 8.0).abs() < 1e-12);
        assert!((report.margins.cd - 3.4).abs() < 1e-12);
        assert!((report.margins.joint - 27.14).abs() < 1e-12);
        assert!(report.regime_choice.inefficient_spne && !report.regime_choice.efficient_spne);
    }

    #[test]
    fn set_b_above_cbar_reports_both() {
        let report = classify(&set_b(1.0, 35.0)).unwrap();
        assert!(report.efficient_peace_exists && report.inefficient_peace_exists);
        assert_eq!(report.label(), RegionLabel::Both);
        assert!(!report.assumption_holds);
        // Clow < 0: keeping the barrier is what the rising power would pick
        assert!(!report.regime_choice.efficient_spne);
        assert!(report.regime_choice.inefficient_spne);
    }

    #[test]
    fn set_b_low_cost_is_war() {
        let report = classify(&set_b(1.0, 10.0)).unwrap();
        assert!(report.war_inevitable);
        assert_eq!(report.label(), RegionLabel::War);
    }

    #[test]
    fn classification_refuses_invalid_points() {
        let err = classify(&set_b(-1.0, 25.0)).unwrap_err();
        assert!(err.to_string().contains("c_R >= 0"));
    }

    #[test]
    fn exact_boundary_is_on_the_weak_side() {
        let q = |s: &str| decimal(s).unwrap();
        let base: ModelParams<BigRational> =
            ModelParams::baseline(q("0.9"), q("0.3"), q("0.7"), q("0.8"), q("0.6"), q("0"), q("21.6"));
        let report = classify(&base).unwrap();
        assert!(report.margins.cd == BigRational::from_integer(0.into()));
        assert!(report.inefficient_peace_exists);
        let at_cbar = classify(&ModelParams { c_d: q("33"), ..base }).unwrap();
        assert!(at_cbar.efficient_peace_exists);
    }

    #[test]
    fn labels_rederive_from_margins() {
        for c_d in [0.0, 10.0, 21.6, 25.0, 33.0, 40.0] {
            let report = classify(&set_b(0.5, c_d)).unwrap();
            let m = &report.margins;
            assert_eq!(report.efficient_peace_exists, m.efficient_holds());
            assert_eq!(report.inefficient_peace_exists, m.inefficient_holds());
        }
    }

    #[test]
    fn set_b_grid_has_three_bands() {
        let grid = region_grid(&set_b(0.0, 0.0), (0.0, 10.0), (0.0, 40.0), (10, 80)).unwrap();
        assert_eq!(grid.cells.len(), 800);
        for cell in &grid.cells {
            let expected = if cell.c_d < 21.6 {
                RegionLabel::War
            } else if cell.c_d < 33.0 {
                RegionLabel::InefficientPeace
            } else {
                RegionLabel::Both
            };
            assert_eq!(cell.label, expected, "{cell:?}");
        }
        // row-major by c_D, then c_R
        assert!(grid.cells[0].c_d < grid.cells[10].c_d);
        assert!(grid.cells[0].c_r < grid.cells[1].c_r);
    }

    #[test]
    fn single_cell_grid_matches_classify() {
        let grid = region_grid(&set_b(0.0, 0.0), (2.0, 2.0), (25.0, 25.0), (1, 1)).unwrap();
        assert_eq!(grid.cells.len(), 1);
        assert_eq!(grid.cells[0].label, classify(&set_b(2.0, 25.0)).unwrap().label());
    }

    #[test]
    fn positive_joint_threshold_comes_with_an_empty_band() {
        // Clow = (1 - delta)(clow_D - cbar_D), so Clow > 0 empties the middle
        // band and the joint-cost line never carves war out of it
        let base: ModelParams<f64> = ModelParams::baseline(0.8, 0.1, 0.4, 0.9, 0.1, 0.0, 0.0);
        let t = ThresholdSet::compute(&base);
        assert!(t.clow_joint > 0.0 && t.clow_d > t.cbar_d, "{t:?}");
        let grid = region_grid(&base, (0.0, 2.0), (0.0, 8.0), (20, 80)).unwrap();
        for cell in &grid.cells {
            let expected = if cell.c_d < t.cbar_d {
                RegionLabel::War
            } else if cell.c_d < t.clow_d {
                RegionLabel::EfficientPeace
            } else {
                RegionLabel::Both
            };
            assert_eq!(cell.label, expected, "{cell:?}");
        }
    }

    #[test]
    fn grid_rejects_zero_resolution() {
        assert_eq!(
            region_grid(&set_b(0.0, 0.0), (0.0, 1.0), (0.0, 1.0), (0, 3)).unwrap_err(),
            GridError::EmptyResolution
        );
    }

    #[test]
    fn knob_names_round_trip() {
        for knob in [Knob::Mu, Knob::P, Knob::P1, Knob::Delta, Knob::H0, Knob::CD, Knob::CR, Knob::Rho, Knob::Theta] {
            assert_eq!(knob.name().parse::<Knob>().unwrap(), knob);
        }
        assert!(comparative_static_by_name(&set_b(0.0, 0.0), "gamma", &[1.0]).is_err());
    }

    #[test]
    fn sweep_over_mu_lowers_both_inefficient_thresholds() {
        let values: Vec<f64> = (0..20).map(|i| 1.0 - 0.04 * i as f64).collect();
        let trace = comparative_static(&set_b(1.0, 25.0), Knob::Mu, &values);
        for w in trace.windows(2) {
            assert!(w[1].thresholds.clow_d <= w[0].thresholds.clow_d);
            assert!(w[1].thresholds.clow_joint <= w[0].thresholds.clow_joint);
            assert_eq!(w[1].thresholds.cbar_d.to_bits(), w[0].thresholds.cbar_d.to_bits());
        }
    }

    #[test]
    fn sweep_over_p_lowers_both_cd_thresholds() {
        let values: Vec<f64> = (0..20).map(|i| 0.05 + 0.03 * i as f64).collect();
        let trace = comparative_static(&set_b(1.0, 25.0), Knob::P, &values);
        for w in trace.windows(2) {
            assert!(w[1].thresholds.cbar_d <= w[0].thresholds.cbar_d);
            assert!(w[1].thresholds.clow_d <= w[0].thresholds.clow_d);
        }
    }

    #[test]
    fn sweep_over_h0_moves_thresholds_in_opposite_directions() {
        let values: Vec<f64> = (1..10).map(|i| 0.1 * i as f64).collect();
        let trace = comparative_static(&set_b(1.0, 25.0), Knob::H0, &values);
        for w in trace.windows(2) {
            assert!(w[1].thresholds.clow_d < w[0].thresholds.clow_d);
            assert!(w[1].thresholds.clow_joint < w[0].thresholds.clow_joint);
        }
    }

    #[test]
    fn sweep_marks_invalid_points() {
        let trace = comparative_static(&set_b(1.0, 25.0), Knob::P, &[0.2, 0.7, 0.9]);
        assert!(trace[0].report.is_some());
        assert!(trace[1].violations.is_some());
        assert!(trace[2].violations.is_some());
    }

    #[test]
    fn intersection_in_set_b() {
        let search = intersection_nonempty(&set_b(0.0, 0.0));
        assert!(search.found);
        let (c_r, c_d) = search.witness.unwrap();
        assert_eq!(c_r, 0.0);
        assert!((21.6..33.0).contains(&c_d));
        let report = classify(&set_b(c_r, c_d)).unwrap();
        assert!(report.inefficient_peace_exists && report.assumption_holds);
    }

    #[test]
    fn empty_band_is_reported() {
        // cbar_D = 3 < clow_D = 4.9
        let base: ModelParams<f64> = ModelParams::baseline(0.8, 0.1, 0.4, 0.9, 0.1, 0.0, 0.0);
        let t = ThresholdSet::compute(&base);
        assert!(t.cbar_d <= t.clow_d.max(0.0));
        let search = intersection_nonempty(&base);
        assert!(!search.found && search.band_empty && search.witness.is_none());
    }
}
