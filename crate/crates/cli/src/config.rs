//! Run configuration: a TOML document plus command-line overrides.

use std::path::{Path, PathBuf};

use qes_core::{DeltaMode, Parity, QesModel};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        source: Box<toml::de::Error>,
    },
    #[error("invalid model: {0}")]
    Model(String),
    #[error("QES condition not satisfied: the couplings imply n = {implied_n}, the configuration has n = {n}")]
    Condition { implied_n: f64, n: u32 },
    #[error("degree {degree} is inconsistent with {parity} parity")]
    ParityDegree { parity: ParityName, degree: usize },
    #[error("invalid scan window [{lo}, {hi}] with step {step}")]
    Window { lo: f64, hi: f64, step: f64 },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid report layout: {0}")]
    Report(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ParityName {
    Even,
    Odd,
}

impl std::fmt::Display for ParityName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ParityName::Even => "even",
            ParityName::Odd => "odd",
        })
    }
}

impl From<ParityName> for Parity {
    fn from(p: ParityName) -> Self {
        match p {
            ParityName::Even => Parity::Even,
            ParityName::Odd => Parity::Odd,
        }
    }
}

/// Couplings of `-d²/dx² + σ/x² + αx² + βx⁴ + γx⁶` and the sector degree `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub n: u32,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let m = QesModel::double_well();
        Self {
            alpha: m.alpha,
            beta: m.beta,
            gamma: m.gamma,
            sigma: m.sigma,
            n: m.n,
        }
    }
}

impl ModelConfig {
    pub fn model(&self) -> Result<QesModel, ConfigError> {
        QesModel::new(self.alpha, self.beta, self.gamma, self.sigma, self.n).map_err(|e| ConfigError::Model(e.to_string()))
    }

    /// The model, additionally required to satisfy the QES condition.
    pub fn qes_model(&self) -> Result<QesModel, ConfigError> {
        let m = self.model()?;
        let check = qes_core::qes::qes_condition(&m);
        if !check.satisfied {
            return Err(ConfigError::Condition {
                implied_n: check.implied_n,
                n: m.n,
            });
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub parity: ParityName,
    /// Polynomial degree of the truncated state.
    pub degree: usize,
    pub window: [f64; 2],
    pub step: f64,
    /// Divide the residual by the weighted norm of the state.
    pub normalize_delta: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            parity: ParityName::Odd,
            degree: 9,
            window: [-12.0, -4.0],
            step: 0.01,
            normalize_delta: false,
        }
    }
}

impl ScanConfig {
    pub fn mode(&self) -> DeltaMode {
        if self.normalize_delta {
            DeltaMode::Normalized
        } else {
            DeltaMode::Raw
        }
    }

    pub fn window(&self) -> (f64, f64) {
        (self.window[0], self.window[1])
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let parity_bit = match self.parity {
            ParityName::Even => 0,
            ParityName::Odd => 1,
        };
        if self.degree % 2 != parity_bit {
            return Err(ConfigError::ParityDegree {
                parity: self.parity,
                degree: self.degree,
            });
        }
        let [lo, hi] = self.window;
        let finite = lo.is_finite() && hi.is_finite() && self.step.is_finite();
        if !finite || lo >= hi || self.step <= 0.0 {
            return Err(ConfigError::Window { lo, hi, step: self.step });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Half-width `L` of the box `[-L, L]` (`(0, L]` with a barrier).
    pub length: f64,
    /// Interior points `N` of the coarse grid; the fine grid has `2N + 1`.
    pub points: usize,
    /// Absolute bisection tolerance.
    pub tol: f64,
    /// Number of levels to compute.
    pub levels: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            length: qes_core::reference::DEFAULT_L,
            points: qes_core::reference::DEFAULT_N,
            tol: qes_core::reference::DEFAULT_TOL,
            levels: 20,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(ConfigError::Grid(format!("L = {} must be positive", self.length)));
        }
        if self.points < 3 {
            return Err(ConfigError::Grid(format!("N = {} must be at least 3", self.points)));
        }
        if !(self.tol > 0.0) {
            return Err(ConfigError::Grid(format!("tol = {} must be positive", self.tol)));
        }
        if self.levels == 0 || self.levels > self.points {
            return Err(ConfigError::Grid(format!("levels = {} must lie in 1..={}", self.levels, self.points)));
        }
        Ok(())
    }
}

/// One row of the variational table: a level and the window its minimum is searched in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelWindow {
    pub level: usize,
    pub window: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReportConfig {
    /// Compute the finite-difference reference; deviations are unavailable without it.
    pub reference: bool,
    pub degrees: Vec<usize>,
    pub levels: Vec<LevelWindow>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            reference: true,
            degrees: vec![5, 9, 13],
            levels: vec![
                LevelWindow { level: 1, window: [-12.0, -4.0] },
                LevelWindow { level: 3, window: [0.0, 6.0] },
                LevelWindow { level: 5, window: [10.0, 18.0] },
            ],
        }
    }
}

impl ReportConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for w in &self.levels {
            let [lo, hi] = w.window;
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ConfigError::Report(format!("level {} has window [{lo}, {hi}]", w.level)));
            }
        }
        if self.degrees.is_empty() {
            return Err(ConfigError::Report("no degrees listed".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub scan: ScanConfig,
    pub grid: GridConfig,
    pub report: ReportConfig,
    /// Where to write the result; standard output when absent.
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            source: Box::new(e),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml(&text, path)
    }

    pub fn apply(&mut self, o: &Overrides) {
        let m = &mut self.model;
        macro_rules! set {
            ($dst:expr, $src:expr) => {
                if let Some(v) = $src {
                    $dst = v;
                }
            };
        }
        set!(m.alpha, o.alpha);
        set!(m.beta, o.beta);
        set!(m.gamma, o.gamma);
        set!(m.sigma, o.sigma);
        set!(m.n, o.n);
        set!(self.scan.parity, o.parity);
        set!(self.scan.degree, o.degree);
        set!(self.scan.window, o.window.map(|w| [w.0, w.1]));
        set!(self.scan.step, o.step);
        set!(self.grid.length, o.grid_length);
        set!(self.grid.points, o.grid_points);
        if o.normalize_delta {
            self.scan.normalize_delta = true;
        }
        if let Some(p) = &o.output {
            self.output = Some(p.clone());
        }
    }
}

/// `lo,hi`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowArg(pub f64, pub f64);

impl std::str::FromStr for WindowArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected lo,hi, got {s:?}"))?;
        let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
        Ok(WindowArg(parse(lo)?, parse(hi)?))
    }
}

/// Flags shared by every subcommand; each one overrides the config document.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// TOML configuration document
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, value_enum)]
    pub parity: Option<ParityName>,
    #[arg(long)]
    pub degree: Option<usize>,
    /// Energy window as lo,hi
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<WindowArg>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Box half-width L
    #[arg(long = "grid-L")]
    pub grid_length: Option<f64>,
    /// Coarse interior point count N
    #[arg(long = "grid-N")]
    pub grid_points: Option<usize>,
    /// Divide the residual by the weighted norm of the state
    #[arg(long)]
    pub normalize_delta: bool,
    /// Output file (standard output when absent)
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        config.apply(self);
        Ok(config)
    }
}
