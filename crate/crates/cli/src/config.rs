//! Presets and the flag > config > preset > default layering.

use std::fs;
use std::path::Path;

use crisis_bargain::{EliminationMode, ModelParams};
use serde::{Deserialize, Serialize};

use crate::args::ParamArgs;
use crate::CliError;

pub const DEFAULT_PRESET: &str = "demo-b";

#[derive(Clone, Debug, Serialize)]
pub struct Preset {
    pub name: &'static str,
    pub annotation: &'static str,
    pub params: ModelParams<f64>,
}

pub fn presets() -> Vec<Preset> {
    vec![
        Preset {
            name: "demo-b",
            annotation: "worked example: cbar_D = 33, clow_D = 21.6, Clow = -1.14; at c_D = 25 only inefficient peace exists",
            params: ModelParams::baseline(0.9, 0.3, 0.7, 0.8, 0.6, 1.0, 25.0),
        },
        Preset {
            name: "small-demo",
            annotation: "small hand-checkable point: cbar_D = 0, clow_D = -0.2, Clow = -0.1",
            params: ModelParams::baseline(0.5, 0.2, 0.6, 0.5, 0.5, 1.0, 1.0),
        },
        Preset {
            name: "pre-wto",
            annotation: "illustrative, not calibrated: low expected market value, costly war, strong declining power",
            params: ModelParams::baseline(0.9, 0.4, 0.7, 0.5, 0.5, 2.0, 30.0),
        },
        Preset {
            name: "post-wto",
            annotation: "illustrative, not calibrated: market value near one, cheaper war, weaker declining power",
            params: ModelParams::baseline(0.9, 0.25, 0.7, 0.95, 0.6, 2.0, 15.0),
        },
        Preset {
            name: "empty-band",
            annotation: "clow_D > cbar_D, so Clow > 0 and the joint-cost line enters the positive quadrant; no inefficient-only band",
            params: ModelParams::baseline(0.8, 0.1, 0.4, 0.9, 0.1, 0.0, 4.0),
        },
    ]
}

pub fn preset(name: &str) -> Result<Preset, CliError> {
    presets()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| CliError::UnknownPreset(name.to_string()))
}

/// Any subset of the parameter fields, as found in a config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Layer {
    delta: Option<f64>,
    p: Option<f64>,
    p1: Option<f64>,
    mu: Option<f64>,
    h0: Option<f64>,
    #[serde(rename = "c_R")]
    c_r: Option<f64>,
    #[serde(rename = "c_D")]
    c_d: Option<f64>,
    rho: Option<f64>,
    theta: Option<f64>,
    elimination_mode: Option<EliminationMode>,
}

impl Layer {
    fn from_flags(args: &ParamArgs) -> Self {
        Layer {
            delta: args.delta,
            p: args.p,
            p1: args.p1,
            mu: args.mu,
            h0: args.h0,
            c_r: args.c_r,
            c_d: args.c_d,
            rho: args.rho,
            theta: args.theta,
            elimination_mode: args.cooperative.then_some(EliminationMode::Cooperative),
        }
    }

    fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Config {
            path: path.display().to_string(),
            reason: source.to_string(),
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::Config {
            path: path.display().to_string(),
            reason: source.to_string(),
        })
    }

    fn apply(self, params: &mut ModelParams<f64>) {
        let fields = [
            (self.delta, &mut params.delta),
            (self.p, &mut params.p),
            (self.p1, &mut params.p1),
            (self.mu, &mut params.mu),
            (self.h0, &mut params.h0),
            (self.c_r, &mut params.c_r),
            (self.c_d, &mut params.c_d),
            (self.rho, &mut params.rho),
            (self.theta, &mut params.theta),
        ];
        for (value, slot) in fields {
            if let Some(v) = value {
                *slot = v;
            }
        }
        if let Some(mode) = self.elimination_mode {
            params.elimination_mode = mode;
        }
    }
}

/// Resolves the parameter layers without validating the result.
pub fn layered_params(args: &ParamArgs) -> Result<ModelParams<f64>, CliError> {
    let mut params = preset(args.preset.as_deref().unwrap_or(DEFAULT_PRESET))?.params;
    if let Some(path) = &args.config {
        Layer::read(path)?.apply(&mut params);
    }
    Layer::from_flags(args).apply(&mut params);
    Ok(params)
}

/// Layered parameters, refused with their violations when invalid.
pub fn resolve_params(args: &ParamArgs) -> Result<ModelParams<f64>, CliError> {
    let params = layered_params(args)?;
    params.validate()?;
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn shipped_presets_validate() {
        for p in presets() {
            assert!(p.params.validate().is_ok(), "{}", p.name);
        }
    }

    #[test]
    fn flags_beat_config_beat_preset() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{"mu": 0.5, "c_D": 30}}"#).unwrap();
        let args = ParamArgs {
            preset: Some("small-demo".into()),
            config: Some(file.path().to_path_buf()),
            c_d: Some(2.0),
            ..Default::default()
        };
        let params = resolve_params(&args).unwrap();
        assert_eq!(params.delta, 0.5); // preset
        assert_eq!(params.mu, 0.5); // config
        assert_eq!(params.c_d, 2.0); // flag
    }

    #[test]
    fn defaults_are_the_worked_example() {
        let params = resolve_params(&ParamArgs::default()).unwrap();
        assert_eq!(params, preset("demo-b").unwrap().params);
    }

    #[test]
    fn unknown_config_keys_are_refused() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, r#"{{"mu": 0.5, "cD": 30}}"#).unwrap();
        let args = ParamArgs { config: Some(file.path().to_path_buf()), ..Default::default() };
        assert!(matches!(resolve_params(&args), Err(CliError::Config { .. })));
    }

    #[test]
    fn unknown_preset_is_an_error() {
        assert!(matches!(preset("nope"), Err(CliError::UnknownPreset(_))));
    }
}
