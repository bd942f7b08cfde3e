//! Region figures: one raster per panel, drawn as SVG with a CSV twin.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crisis_bargain::classifier::{region_grid, Knob, RegionGrid, RegionLabel};
use crisis_bargain::thresholds::ThresholdSet;
use crisis_bargain::ModelParams;
use serde::Serialize;

use crate::args::FigureId;
use crate::emit::sig12;
use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct FigureSpec {
    pub id: &'static str,
    pub base: ModelParams<f64>,
    /// Knob varied across panels, with one value per panel.
    pub knob: Option<&'static str>,
    pub values: Vec<f64>,
    pub svg: PathBuf,
    /// One CSV per panel, in panel order.
    pub csv: Vec<PathBuf>,
    pub cells: usize,
    pub c_r_max: f64,
    pub c_d_max: f64,
}

/// The sweep behind each figure id.
pub fn recipe(id: FigureId) -> Option<(Knob, [f64; 2])> {
    match id {
        FigureId::Regions => None,
        FigureId::MuShift => Some((Knob::Mu, [0.5, 0.8])),
        FigureId::PShift => Some((Knob::P, [0.2, 0.4])),
    }
}

/// Smallest of 1, 2, 2.5, 5 times a power of ten that is at least `x`.
fn nice_ceiling(x: f64) -> f64 {
    let scale = 10f64.powf(x.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * scale).find(|v| *v >= x).unwrap_or(10.0 * scale)
}

fn panel_params(base: &ModelParams<f64>, id: FigureId) -> Vec<ModelParams<f64>> {
    match recipe(id) {
        None => vec![base.clone()],
        Some((knob, values)) => values.iter().map(|v| knob.apply(base, *v)).collect(),
    }
}

/// Plot box that shows every panel's horizontal boundaries with some room
/// above, and the joint-cost line when it enters the positive quadrant.
pub fn default_box(panels: &[ModelParams<f64>]) -> (f64, f64) {
    let mut top: f64 = 1.0;
    let mut joint: f64 = 0.0;
    for params in panels {
        let t = ThresholdSet::compute(params);
        top = top.max(t.cbar_d).max(t.clow_d).max(t.clow_joint);
        joint = joint.max(t.clow_joint);
    }
    let c_d_max = nice_ceiling(1.25 * top);
    let c_r_max = nice_ceiling((0.25 * c_d_max).max(2.0 * joint));
    (c_r_max, c_d_max)
}

pub fn spec(
    id: FigureId,
    base: &ModelParams<f64>,
    svg: PathBuf,
    csv: Option<PathBuf>,
    cells: usize,
    c_r_max: Option<f64>,
    c_d_max: Option<f64>,
) -> FigureSpec {
    let panels = panel_params(base, id);
    let (auto_r, auto_d) = default_box(&panels);
    let csv_base = csv.unwrap_or_else(|| svg.with_extension("csv"));
    let (knob, values) = match recipe(id) {
        None => (None, Vec::new()),
        Some((knob, values)) => (Some(knob.name()), values.to_vec()),
    };
    let csv = if values.is_empty() {
        vec![csv_base]
    } else {
        values.iter().map(|v| panel_csv_path(&csv_base, knob.unwrap_or_default(), *v)).collect()
    };
    FigureSpec {
        id: id.name(),
        base: base.clone(),
        knob,
        values,
        svg,
        csv,
        cells,
        c_r_max: c_r_max.unwrap_or(auto_r),
        c_d_max: c_d_max.unwrap_or(auto_d),
    }
}

/// `fig.csv` becomes `fig_mu0.5.csv` for the `mu = 0.5` panel.
fn panel_csv_path(path: &Path, knob: &str, value: f64) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("figure");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_{knob}{}.{ext}", sig12(value)))
}

pub struct Panel {
    pub title: String,
    pub grid: RegionGrid,
}

pub fn panels(spec: &FigureSpec, id: FigureId) -> Result<Vec<Panel>, CliError> {
    let titles: Vec<String> = match (spec.knob, spec.values.is_empty()) {
        (Some(knob), false) => spec.values.iter().map(|v| format!("{knob} = {}", sig12(*v))).collect(),
        _ => vec!["Equilibria".to_string()],
    };
    panel_params(&spec.base, id)
        .into_iter()
        .zip(titles)
        .map(|(params, title)| {
            let grid = region_grid(&params, (0.0, spec.c_r_max), (0.0, spec.c_d_max), (spec.cells, spec.cells))?;
            Ok(Panel { title, grid })
        })
        .collect()
}

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 400.0;
const LEFT: f64 = 60.0;
const TOP: f64 = 40.0;
const PLOT_W: f64 = 330.0;
const PLOT_H: f64 = 300.0;
const LEGEND_H: f64 = 70.0;
const TICKS: usize = 5;

fn fill(label: RegionLabel) -> &'static str {
    match label.for_figure() {
        RegionLabel::War => "#d7301f",
        RegionLabel::InefficientPeace => "#fdae61",
        RegionLabel::EfficientPeace | RegionLabel::Both => "#66bd63",
        RegionLabel::Skipped => "#bdbdbd",
    }
}

fn legend_name(label: RegionLabel) -> &'static str {
    match label {
        RegionLabel::War => "War",
        RegionLabel::InefficientPeace => "Inefficient peace",
        RegionLabel::EfficientPeace | RegionLabel::Both => "Efficient peace",
        RegionLabel::Skipped => "Invalid",
    }
}

struct Frame {
    x0: f64,
    grid_r: (f64, f64),
    grid_d: (f64, f64),
}

impl Frame {
    fn x(&self, c_r: f64) -> f64 {
        self.x0 + LEFT + (c_r - self.grid_r.0) / (self.grid_r.1 - self.grid_r.0) * PLOT_W
    }

    fn y(&self, c_d: f64) -> f64 {
        TOP + PLOT_H - (c_d - self.grid_d.0) / (self.grid_d.1 - self.grid_d.0) * PLOT_H
    }

    fn contains_d(&self, c_d: f64) -> bool {
        self.grid_d.0 <= c_d && c_d <= self.grid_d.1
    }
}

/// End points of `c_R + c_D = level` inside the plot box, if it crosses it.
pub fn joint_segment(level: f64, r: (f64, f64), d: (f64, f64)) -> Option<((f64, f64), (f64, f64))> {
    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut push = |p: (f64, f64)| {
        let inside = r.0 <= p.0 && p.0 <= r.1 && d.0 <= p.1 && p.1 <= d.1;
        if inside && !points.iter().any(|q| (q.0 - p.0).abs() < 1e-12 && (q.1 - p.1).abs() < 1e-12) {
            points.push(p);
        }
    };
    push((r.0, level - r.0));
    push((r.1, level - r.1));
    push((level - d.0, d.0));
    push((level - d.1, d.1));
    match points.as_slice() {
        [a, b, ..] => Some((*a, *b)),
        _ => None,
    }
}

fn render_panel(svg: &mut String, panel: &Panel, index: usize) {
    let grid = &panel.grid;
    let frame = Frame {
        x0: index as f64 * PANEL_W,
        grid_r: (grid.c_r_axis.lo, grid.c_r_axis.hi),
        grid_d: (grid.c_d_axis.lo, grid.c_d_axis.hi),
    };
    let (step_r, step_d) = (grid.c_r_axis.step(), grid.c_d_axis.step());
    let _ = writeln!(svg, r#"<g class="panel" data-title="{}">"#, panel.title);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        frame.x0 + LEFT + PLOT_W / 2.0,
        panel.title
    );

    // raster: one rect per run of equal color along each row
    for (i_d, row) in grid.rows().enumerate() {
        let lo_d = grid.c_d_axis.lo + i_d as f64 * step_d;
        let mut start = 0;
        while start < row.len() {
            let color = fill(row[start].label);
            let mut end = start + 1;
            while end < row.len() && fill(row[end].label) == color {
                end += 1;
            }
            let (x1, x2) = (frame.x(grid.c_r_axis.lo + start as f64 * step_r), frame.x(grid.c_r_axis.lo + end as f64 * step_r));
            let (y_top, y_bottom) = (frame.y(lo_d + step_d), frame.y(lo_d));
            let _ = writeln!(
                svg,
                r#"<rect x="{x1:.2}" y="{y_top:.2}" width="{:.2}" height="{:.2}" fill="{color}" stroke="none"/>"#,
                x2 - x1,
                y_bottom - y_top
            );
            start = end;
        }
    }

    let b = &grid.boundaries;
    let (x_left, x_right) = (frame.x(frame.grid_r.0), frame.x(frame.grid_r.1));
    for (class, value, name) in [("boundary-efficient", b.cbar_d, "cbar_D"), ("boundary-inefficient", b.clow_d, "clow_D")] {
        if frame.contains_d(value) {
            let y = frame.y(value);
            let _ = writeln!(
                svg,
                r#"<line class="{class}" data-c-d="{}" x1="{x_left:.2}" y1="{y:.2}" x2="{x_right:.2}" y2="{y:.2}" stroke="black" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
                sig12(value)
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="11">{name} = {}</text>"#,
                x_right - 95.0,
                y - 4.0,
                sig12(value)
            );
        }
    }
    match joint_segment(b.clow_joint, frame.grid_r, frame.grid_d) {
        Some(((r1, d1), (r2, d2))) => {
            let _ = writeln!(
                svg,
                r#"<line class="boundary-joint" data-level="{}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1.5"/>"#,
                sig12(b.clow_joint),
                frame.x(r1),
                frame.y(d1),
                frame.x(r2),
                frame.y(d2)
            );
        }
        None => {
            let _ = writeln!(
                svg,
                r#"<text class="joint-note" x="{:.2}" y="{:.2}" font-size="10">c_D + c_R = {} lies outside the box</text>"#,
                frame.x0 + LEFT + 4.0,
                TOP + PLOT_H - 6.0,
                sig12(b.clow_joint)
            );
        }
    }

    // axes and ticks
    let _ = writeln!(
        svg,
        r#"<rect x="{:.2}" y="{TOP:.2}" width="{PLOT_W:.2}" height="{PLOT_H:.2}" fill="none" stroke="black"/>"#,
        frame.x0 + LEFT
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let c_r = frame.grid_r.0 + f * (frame.grid_r.1 - frame.grid_r.0);
        let c_d = frame.grid_d.0 + f * (frame.grid_d.1 - frame.grid_d.0);
        let (x, y) = (frame.x(c_r), frame.y(c_d));
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle" font-size="10">{}</text>"#,
            TOP + PLOT_H + 14.0,
            sig12(c_r)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{}</text>"#,
            frame.x0 + LEFT - 4.0,
            y + 3.0,
            sig12(c_d)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">c_R</text>"#,
        frame.x0 + LEFT + PLOT_W / 2.0,
        TOP + PLOT_H + 32.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13" transform="rotate(-90 {:.2} {:.2})">c_D</text>"#,
        frame.x0 + 18.0,
        TOP + PLOT_H / 2.0,
        frame.x0 + 18.0,
        TOP + PLOT_H / 2.0
    );
    svg.push_str("</g>\n");
}

/// Byte-stable SVG of all panels side by side with a shared legend.
pub fn render_svg(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len().max(1) as f64;
    let height = PANEL_H + LEGEND_H;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#);
    for (i, panel) in panels.iter().enumerate() {
        render_panel(&mut svg, panel, i);
    }

    svg.push_str("<g class=\"legend\">\n");
    let y = PANEL_H + 10.0;
    let entries = [RegionLabel::War, RegionLabel::InefficientPeace, RegionLabel::EfficientPeace];
    for (k, label) in entries.into_iter().enumerate() {
        let x = 20.0 + [0.0, 70.0, 210.0][k];
        let _ = writeln!(svg, r#"<rect x="{x:.2}" y="{y:.2}" width="14" height="14" fill="{}" stroke="black"/>"#, fill(label));
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="12">{}</text>"#, x + 20.0, y + 11.0, legend_name(label));
    }
    let y2 = y + 34.0;
    let _ = writeln!(
        svg,
        r#"<line x1="20.00" y1="{y2:.2}" x2="50.00" y2="{y2:.2}" stroke="black" stroke-dasharray="6 4"/>"#
    );
    let _ = writeln!(svg, r#"<text x="56.00" y="{:.2}" font-size="12">cbar_D (top), clow_D (bottom)</text>"#, y2 + 4.0);
    let x3 = 230.0;
    let _ = writeln!(svg, r#"<line x1="{x3:.2}" y1="{y2:.2}" x2="{:.2}" y2="{y2:.2}" stroke="black"/>"#, x3 + 30.0);
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="12">c_D + c_R = Clow</text>"#, x3 + 36.0, y2 + 4.0);
    svg.push_str("</g>\n</svg>\n");
    svg
}
