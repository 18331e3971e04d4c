//! Experiment configuration: a JSON document with defaults for every key but
//! `symbol` and `profile`.

use std::fs;
use std::path::{Path, PathBuf};

use conewave_core::band_profile::{make_profile, Shape};
use conewave_core::wavepacket::{optimal_origin, ConeSpec, SOLUTION_TOL};
use conewave_core::{BandProfile, Symbol};
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolConfig {
    FreeSchrodinger,
    KleinGordon { mass: f64 },
    /// A named entry of [`catalog`].
    Custom { name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Bump,
    ShiftedBump,
    ChirpedBump,
    QuadraticChirp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub shape: ShapeKind,
    pub p1: f64,
    pub p2: f64,
    /// Spatial shift for `shifted_bump`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xc: Option<f64>,
    /// Refocusing time for `chirped_bump`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// Chirp rate for `quadratic_chirp`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AutoKeyword {
    #[serde(rename = "auto")]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OriginConfig {
    Auto(AutoKeyword),
    Fixed([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeConfig {
    #[serde(default = "default_padding")]
    pub padding_fraction: f64,
    #[serde(default = "default_origin")]
    pub origin: OriginConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signs {
    Positive,
    Negative,
    Alternating,
}

/// `count` offsets `|t - t0|` log-spaced in `[min, max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogSpaced {
    #[serde(default = "default_log_min")]
    pub min: f64,
    #[serde(default = "default_log_max")]
    pub max: f64,
    #[serde(default = "default_log_count")]
    pub count: usize,
    #[serde(default = "default_signs")]
    pub signs: Signs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimesConfig {
    /// Absolute times.
    List(Vec<f64>),
    /// Offsets from the cone origin time.
    LogSpaced { log_spaced: LogSpaced },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_quadrature")]
    pub quadrature: f64,
    #[serde(default = "default_slack")]
    pub certification_slack: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub symbol: SymbolConfig,
    pub profile: ProfileConfig,
    #[serde(default)]
    pub cone: ConeConfig,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub times: TimesConfig,
    #[serde(default = "default_x_samples")]
    pub x_samples: usize,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_padding() -> f64 {
    0.1
}
fn default_origin() -> OriginConfig {
    OriginConfig::Auto(AutoKeyword::Auto)
}
fn default_log_min() -> f64 {
    10.0
}
fn default_log_max() -> f64 {
    1e4
}
fn default_log_count() -> usize {
    16
}
fn default_signs() -> Signs {
    Signs::Positive
}
fn default_quadrature() -> f64 {
    SOLUTION_TOL
}
fn default_slack() -> f64 {
    1e-9
}
fn default_directory() -> PathBuf {
    PathBuf::from("conewave-out")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}
fn default_delta() -> f64 {
    0.625
}
fn default_x_samples() -> usize {
    9
}

impl Default for ConeConfig {
    fn default() -> Self {
        Self { padding_fraction: default_padding(), origin: default_origin() }
    }
}

impl Default for LogSpaced {
    fn default() -> Self {
        Self { min: default_log_min(), max: default_log_max(), count: default_log_count(), signs: default_signs() }
    }
}

impl Default for TimesConfig {
    fn default() -> Self {
        TimesConfig::LogSpaced { log_spaced: LogSpaced::default() }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { quadrature: default_quadrature(), certification_slack: default_slack() }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_directory(), formats: default_formats() }
    }
}

impl LogSpaced {
    pub fn offsets(&self) -> Vec<f64> {
        let (a, b) = (self.min.ln(), self.max.ln());
        (0..self.count)
            .map(|k| {
                let mag = if self.count == 1 { self.min } else { (a + (b - a) * k as f64 / (self.count - 1) as f64).exp() };
                match self.signs {
                    Signs::Positive => mag,
                    Signs::Negative => -mag,
                    Signs::Alternating if k % 2 == 1 => -mag,
                    Signs::Alternating => mag,
                }
            })
            .collect()
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if !(self.delta > 0.5 && self.delta < 0.75) {
            return bad("delta must lie in (0.5, 0.75)");
        }
        if !(self.cone.padding_fraction > 0.0) || !self.cone.padding_fraction.is_finite() {
            return bad("cone.padding_fraction must be positive");
        }
        if !(self.profile.p1 < self.profile.p2) {
            return bad("profile needs p1 < p2");
        }
        if self.x_samples == 0 {
            return bad("x_samples must be at least 1");
        }
        if !(self.tolerances.quadrature > 0.0) || !(self.tolerances.certification_slack >= 0.0) {
            return bad("tolerances must be positive");
        }
        match &self.times {
            TimesConfig::List(ts) if ts.is_empty() || ts.iter().any(|t| !t.is_finite()) => {
                return bad("times must be a non-empty list of finite reals")
            }
            TimesConfig::LogSpaced { log_spaced: l } if !(l.min > 0.0 && l.max >= l.min && l.count > 0) => {
                return bad("times.log_spaced needs 0 < min <= max and count > 0")
            }
            _ => {}
        }
        if let SymbolConfig::KleinGordon { mass } = self.symbol {
            if !(mass > 0.0) {
                return bad("klein_gordon mass must be positive");
            }
        }
        self.shape()?;
        self.build_symbol()?;
        Ok(())
    }

    pub fn shape(&self) -> CliResult<Shape> {
        let p = &self.profile;
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| CliError::Config(format!("profile.{key} is required for this shape")))
        };
        Ok(match p.shape {
            ShapeKind::Bump => Shape::Bump,
            ShapeKind::ShiftedBump => Shape::ShiftedBump { xc: need(p.xc, "xc")? },
            ShapeKind::ChirpedBump => Shape::ChirpedBump { tau: need(p.tau, "tau")? },
            ShapeKind::QuadraticChirp => Shape::QuadraticChirp { beta: need(p.beta, "beta")? },
        })
    }

    pub fn build_symbol(&self) -> CliResult<Symbol> {
        match &self.symbol {
            SymbolConfig::FreeSchrodinger => Ok(Symbol::FreeSchrodinger),
            SymbolConfig::KleinGordon { mass } => Ok(Symbol::klein_gordon(*mass)?),
            SymbolConfig::Custom { name } => catalog::lookup(name)
                .ok_or_else(|| CliError::Config(format!("unknown custom symbol '{name}'; known: {}", catalog::NAMES.join(", ")))),
        }
    }
}

/// Everything a subcommand needs, built once from the config.
pub struct Scenario {
    pub config: ExperimentConfig,
    pub symbol: Symbol,
    pub profile: BandProfile,
    pub cone: ConeSpec,
    /// Whether the origin came from the closed-form optimum.
    pub auto_origin: bool,
}

impl Scenario {
    pub fn build(config: ExperimentConfig) -> CliResult<Self> {
        config.validate()?;
        let symbol = config.build_symbol()?;
        let band = (config.profile.p1, config.profile.p2);
        let profile = make_profile(band.0, band.1, config.shape()?, &symbol)?;
        let (origin, auto_origin) = match config.cone.origin {
            OriginConfig::Auto(_) => {
                let o = optimal_origin(&symbol, &profile)?;
                ((o.t_star, o.x_star), true)
            }
            OriginConfig::Fixed([t0, x0]) => ((t0, x0), false),
        };
        let cone = ConeSpec::with_padding(band, config.cone.padding_fraction, origin)?;
        cone.velocity_gap(&symbol)?;
        Ok(Self { config, symbol, profile, cone, auto_origin })
    }

    /// Absolute evaluation times.
    pub fn times(&self) -> Vec<f64> {
        match &self.config.times {
            TimesConfig::List(ts) => ts.clone(),
            TimesConfig::LogSpaced { log_spaced } => {
                log_spaced.offsets().into_iter().map(|d| self.cone.origin.0 + d).collect()
            }
        }
    }

    /// `x_samples` points per time slice with velocities `(x - x0)/(t - t0)`
    /// spread uniformly over the padded cone widened by half its width on each side.
    pub fn x_grid(&self, t: f64) -> Vec<f64> {
        let (t0, x0) = self.cone.origin;
        let n = self.config.x_samples;
        let (va, vb) = (self.symbol.df(self.cone.padded.0), self.symbol.df(self.cone.padded.1));
        let w = vb - va;
        let (lo, hi) = (va - 0.5 * w, vb + 0.5 * w);
        let scale = if t == t0 { 1.0 } else { t - t0 };
        (0..n)
            .map(|k| {
                let v = if n == 1 { 0.5 * (lo + hi) } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 };
                x0 + v * scale
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"symbol": {"kind": "free_schrodinger"}, "profile": {"shape": "bump", "p1": 1, "p2": 2}}"#;

    #[test]
    fn defaults_fill_missing_keys() {
        let c = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(c.delta, 0.625);
        assert_eq!(c.cone.padding_fraction, 0.1);
        assert_eq!(c.cone.origin, OriginConfig::Auto(AutoKeyword::Auto));
        assert_eq!(c.x_samples, 9);
        let TimesConfig::LogSpaced { log_spaced } = &c.times else { panic!() };
        let o = log_spaced.offsets();
        assert_eq!(o.len(), 16);
        assert!((o[0] - 10.0).abs() < 1e-12 && (o[15] - 1e4).abs() < 1e-8);
    }

    #[test]
    fn explicit_origin_and_times() {
        let c = ExperimentConfig::from_json(
            r#"{"symbol": {"kind": "klein_gordon", "mass": 1}, "profile": {"shape": "chirped_bump", "p1": 1, "p2": 2, "tau": 2},
                "cone": {"origin": [1.5, -2]}, "times": [3, 4]}"#,
        )
        .unwrap();
        assert_eq!(c.cone.origin, OriginConfig::Fixed([1.5, -2.0]));
        let s = Scenario::build(c).unwrap();
        assert_eq!(s.times(), vec![3.0, 4.0]);
        assert!(!s.auto_origin);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        for bad in [
            r#"{"symbol": {"kind": "free_schrodinger"}, "profile": {"shape": "bump", "p1": 2, "p2": 1}}"#,
            r#"{"symbol": {"kind": "free_schrodinger"}, "profile": {"shape": "bump", "p1": 1, "p2": 2}, "delta": 0.8}"#,
            r#"{"symbol": {"kind": "free_schrodinger"}, "profile": {"shape": "shifted_bump", "p1": 1, "p2": 2}}"#,
            r#"{"symbol": {"kind": "custom", "name": "nope"}, "profile": {"shape": "bump", "p1": 1, "p2": 2}}"#,
            r#"{"symbol": {"kind": "free_schrodinger"}, "profile": {"shape": "bump", "p1": 1, "p2": 2}, "colour": 1}"#,
            r#"{"symbol": {"kind": "free_schrodinger"}, "profile": {"shape": "bump", "p1": 1, "p2": 2}, "cone": {"padding_fraction": 0}}"#,
        ] {
            assert!(matches!(ExperimentConfig::from_json(bad), Err(CliError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn x_grid_spans_both_sides_of_the_cone() {
        let s = Scenario::build(ExperimentConfig::from_json(MINIMAL).unwrap()).unwrap();
        let xs = s.x_grid(100.0);
        assert_eq!(xs.len(), 9);
        assert!((xs[4] - 150.0).abs() < 1e-9);
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }
}
