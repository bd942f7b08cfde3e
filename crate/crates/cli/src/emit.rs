//! CSV emission and number formatting.

use std::io::{Read, Write};

use crisis_bargain::classifier::{Margins, RegionGrid, RegionLabel, SweepPoint};
use serde::Deserialize;

pub const REGION_HEADER: [&str; 6] = ["c_R", "c_D", "label", "margin_efficient", "margin_cd", "margin_joint"];

/// Rounds to 12 significant digits and prints the shortest decimal that
/// reads back as the rounded value.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

fn margin_fields(margins: Option<&Margins<f64>>) -> [String; 3] {
    match margins {
        Some(m) => [sig12(m.efficient), sig12(m.cd), sig12(m.joint)],
        None => Default::default(),
    }
}

/// One row per cell, lowest `c_D` row first and `c_R` increasing within it.
pub fn write_region_csv<W: Write>(grid: &RegionGrid, out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(REGION_HEADER)?;
    for cell in &grid.cells {
        let [e, cd, j] = margin_fields(cell.margins.as_ref());
        writer.write_record([sig12(cell.c_r), sig12(cell.c_d), cell.label.as_str().to_string(), e, cd, j])?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct RegionRow {
    #[serde(rename = "c_R")]
    pub c_r: f64,
    #[serde(rename = "c_D")]
    pub c_d: f64,
    pub label: String,
    pub margin_efficient: Option<f64>,
    pub margin_cd: Option<f64>,
    pub margin_joint: Option<f64>,
}

impl RegionRow {
    pub fn label(&self) -> Result<RegionLabel, String> {
        self.label.parse()
    }

    /// Label implied by the margins, with ties on the satisfied side.
    pub fn label_from_margins(&self) -> Option<RegionLabel> {
        let (e, cd, j) = (self.margin_efficient?, self.margin_cd?, self.margin_joint?);
        Some(RegionLabel::from_flags(e >= 0.0, cd >= 0.0 && j >= 0.0))
    }
}

pub fn read_region_csv<R: Read>(input: R) -> csv::Result<Vec<RegionRow>> {
    csv::Reader::from_reader(input).deserialize().collect()
}

pub fn write_sweep_csv<W: Write>(knob: &str, points: &[SweepPoint], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record([knob, "cbar_D", "clow_D", "Clow", "label", "margin_efficient", "margin_cd", "margin_joint"])?;
    for point in points {
        let t = &point.thresholds;
        let (label, margins) = match &point.report {
            Some(report) => (report.label(), Some(&report.margins)),
            None => (RegionLabel::Skipped, None),
        };
        let [e, cd, j] = margin_fields(margins);
        writer.write_record([
            sig12(point.value),
            sig12(t.cbar_d),
            sig12(t.clow_d),
            sig12(t.clow_joint),
            label.as_str().to_string(),
            e,
            cd,
            j,
        ])?;
    }
    writer.flush()?;
    Ok(())
}
