//! Run configuration: JSON file merged with command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ambient::ChartKind;
use crate::error::{GeomError, Result};
use crate::gallery::inline::{InlineCurve, InlineSurface};

pub const DEFAULT_STEP: f64 = 1e-2;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 41;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Json,
}

/// A surface named from the gallery or given inline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SurfaceSpec {
    Named {
        gallery: String,
        #[serde(default)]
        kappa: Option<f64>,
        #[serde(default)]
        tau: Option<f64>,
        #[serde(default, rename = "H")]
        mean: Option<f64>,
        #[serde(default)]
        kg: Option<f64>,
    },
    Inline(InlineSurface),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SideSpec {
    pub surface: SurfaceSpec,
    pub curve: InlineCurve,
}

/// The two sides of an intersection, sharing one curve parameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurvePairSpec {
    pub first: SideSpec,
    pub second: SideSpec,
    pub range: (f64, f64),
}

/// Every option a command can take. Flags override the file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kappa: Option<f64>,
    pub tau: Option<f64>,
    pub chart: Option<ChartKind>,
    pub gallery: Option<String>,
    #[serde(rename = "H")]
    pub mean: Option<f64>,
    pub kg: Option<f64>,
    pub h: Option<f64>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub samples: Option<usize>,
    pub mutate: Option<f64>,
    pub families: Option<Vec<String>>,
    pub surface: Option<InlineSurface>,
    pub curves: Option<CurvePairSpec>,
}

macro_rules! overlay {
    ($base:expr, $top:expr, $($f:ident),*) => {
        RunConfig { $($f: $top.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| GeomError::Spec(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GeomError::Spec(format!("config: {e}")))
    }

    /// `top` wins wherever it is set.
    pub fn overlaid(self, top: RunConfig) -> Self {
        overlay!(
            self, top, kappa, tau, chart, gallery, mean, kg, h, tol, out, format, samples, mutate, families, surface,
            curves
        )
    }

    pub fn step(&self) -> f64 {
        self.h.unwrap_or(DEFAULT_STEP)
    }

    pub fn tolerance(&self) -> f64 {
        self.tol.unwrap_or(DEFAULT_TOL)
    }

    pub fn sample_count(&self) -> usize {
        self.samples.unwrap_or(DEFAULT_SAMPLES)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step() > 0.0) {
            return Err(GeomError::Spec(format!("grid step must be positive, got {}", self.step())));
        }
        if !(self.tolerance() > 0.0) {
            return Err(GeomError::Spec(format!("tolerance must be positive, got {}", self.tolerance())));
        }
        if self.sample_count() < 3 {
            return Err(GeomError::Spec("need at least 3 samples".into()));
        }
        if let Some(m) = self.mutate {
            if !m.is_finite() {
                return Err(GeomError::Spec("mutation size must be finite".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file = RunConfig::parse(r#"{"kappa": -1, "H": 0.5, "tol": 1e-7, "chart": "cartan"}"#).unwrap();
        let flags = RunConfig { mean: Some(0.25), ..Default::default() };
        let c = file.overlaid(flags);
        assert_eq!(c.mean, Some(0.25));
        assert_eq!(c.kappa, Some(-1.0));
        assert_eq!(c.chart, Some(ChartKind::CartanEktau));
        assert_eq!(c.tolerance(), 1e-7);
        assert_eq!(c.step(), DEFAULT_STEP);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(RunConfig::parse(r#"{"kapa": 1}"#).is_err());
        assert!(RunConfig::parse(r#"{"tol": -1}"#).unwrap().validate().is_err());
        assert!(RunConfig::parse(r#"{"samples": 2}"#).unwrap().validate().is_err());
    }

    #[test]
    fn named_and_inline_sides_parse() {
        let c = RunConfig::parse(
            r#"{"curves": {
                "first": {"surface": {"gallery": "nilplane"}, "curve": {"u": [], "v": [{"c": 1, "pow": [1, 0]}]}},
                "second": {"surface": {"chart": "cartan", "tau": 0.5, "coords": [[], [{"c": 1}], []], "domain": [[-1, 1], [-1, 1]]},
                           "curve": {"u": [], "v": []}},
                "range": [-1, 1]}}"#,
        )
        .unwrap();
        let cp = c.curves.unwrap();
        assert!(matches!(cp.first.surface, SurfaceSpec::Named { .. }));
        assert!(matches!(cp.second.surface, SurfaceSpec::Inline(_)));
    }
}
