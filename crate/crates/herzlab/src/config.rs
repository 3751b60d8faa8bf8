//! Experiment configuration files (TOML). The grammar is documented in
//! `docs/config.md`.

use std::path::{Path, PathBuf};

use herzlab_core::embedlab::Theorem;
use herzlab_core::{Exponent, Family, Grid, HerzParams, SpaceParams};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Norm,
    Decompose,
    Phitransform,
    Seqnorm,
    EmbedSweep,
    Necessity,
    MaximalCheck,
    PpnCheck,
    HardyCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Decompose => "decompose",
            Command::Phitransform => "phitransform",
            Command::Seqnorm => "seqnorm",
            Command::EmbedSweep => "embed-sweep",
            Command::Necessity => "necessity",
            Command::MaximalCheck => "maximal-check",
            Command::PpnCheck => "ppn-check",
            Command::HardyCheck => "hardy-check",
        }
    }

    /// Commands whose results depend on a random ensemble.
    pub fn needs_seed(self) -> bool {
        matches!(self, Command::Seqnorm | Command::EmbedSweep | Command::MaximalCheck | Command::HardyCheck)
    }
}

/// A number or the strings `"inf"`, `"infinity"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ExpValue {
    Num(f64),
    Text(String),
}

impl ExpValue {
    fn exponent(&self) -> Result<Exponent, CliError> {
        match self {
            ExpValue::Num(v) => Exponent::new(*v).map_err(CliError::from),
            ExpValue::Text(s) => s.parse::<Exponent>().map_err(|e| CliError::Config(format!("exponent {s:?}: {e}"))),
        }
    }
}

/// A scalar broadcast to every axis, or one value per axis.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PerAxis<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> PerAxis<T> {
    fn expand(&self, n: usize, what: &str) -> Result<Vec<T>, CliError> {
        match self {
            PerAxis::One(v) => Ok(vec![v.clone(); n]),
            PerAxis::Many(v) if v.len() == n => Ok(v.clone()),
            PerAxis::Many(v) => Err(CliError::Config(format!("{what}: expected {n} values, got {}", v.len()))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    #[serde(rename = "L")]
    pub period: f64,
    #[serde(rename = "G")]
    pub points: usize,
}

impl GridSection {
    pub fn grid(&self) -> Result<Grid, CliError> {
        Ok(Grid::new(self.n, self.period, self.points)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Zero,
    Witness,
    Random,
    Cube,
    Snapshot,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    pub kind: FieldKind,
    /// Witness dilation level `N`.
    pub level: Option<usize>,
    pub seed: Option<u64>,
    /// Spectral radius of a random band-limited field.
    pub radius: Option<f64>,
    /// Dyadic cube `Q_{v,m}`.
    pub cube_level: Option<i32>,
    pub cube_index: Option<Vec<i64>>,
    /// Binary field snapshot.
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum FamilyName {
    B,
    F,
}

/// A Herz parameter set, optionally extended to a smoothness space.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub p: PerAxis<ExpValue>,
    pub alpha: PerAxis<f64>,
    pub q: PerAxis<ExpValue>,
    pub family: Option<FamilyName>,
    pub s: Option<f64>,
    pub beta: Option<ExpValue>,
}

impl SpaceSection {
    pub fn herz(&self, n: usize) -> Result<HerzParams, CliError> {
        let p = self.p.expand(n, "p")?.iter().map(ExpValue::exponent).collect::<Result<Vec<_>, _>>()?;
        let q = self.q.expand(n, "q")?.iter().map(ExpValue::exponent).collect::<Result<Vec<_>, _>>()?;
        Ok(HerzParams::new(p, self.alpha.expand(n, "alpha")?, q)?)
    }

    pub fn space(&self, n: usize) -> Result<SpaceParams, CliError> {
        let family = match self.family {
            Some(FamilyName::B) => Family::B,
            Some(FamilyName::F) => Family::F,
            None => return Err(CliError::Config("smoothness space needs `family = \"B\"` or `\"F\"`".into())),
        };
        let s = self.s.ok_or_else(|| CliError::Config("smoothness space needs `s`".into()))?;
        let beta = self
            .beta
            .as_ref()
            .ok_or_else(|| CliError::Config("smoothness space needs `beta`".into()))?
            .exponent()?;
        Ok(SpaceParams::new(self.herz(n)?, s, beta, family)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Resolution,
    FjPair,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub kind: SystemKind,
    pub levels: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub seed: Option<u64>,
    pub size: Option<usize>,
    /// Depths `K` for level sweeps, or the single depth of a draw.
    pub levels: Option<Vec<usize>>,
    /// Index of a single draw (seqnorm).
    pub index: Option<u64>,
    /// Sequence length (hardy-check) or family size (maximal-check).
    pub length: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSection {
    pub theorem: Option<String>,
    #[serde(default)]
    pub control: bool,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    /// λ* parameters.
    pub r: Option<ExpValue>,
    pub d: Option<f64>,
    pub window: Option<usize>,
    /// Maximal inequality: fine index and exponent, grid sizes.
    pub beta: Option<ExpValue>,
    pub t: Option<f64>,
    pub points: Option<Vec<usize>>,
    /// Hardy: ratios and exponents.
    pub a: Option<Vec<f64>>,
    pub q: Option<Vec<ExpValue>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    /// Where `phitransform` writes the coefficient file.
    pub coeffs: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffsSection {
    pub path: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    pub grid: Option<GridSection>,
    pub field: Option<FieldSection>,
    pub coeffs: Option<CoeffsSection>,
    pub source: Option<SpaceSection>,
    pub target: Option<SpaceSection>,
    pub system: Option<SystemSection>,
    pub ensemble: Option<EnsembleSection>,
    pub check: Option<CheckSection>,
    pub output: Option<OutputSection>,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base: PathBuf,
    /// The file as read, echoed into reports.
    #[serde(skip)]
    pub text: String,
}

impl ExperimentConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.base = base.to_path_buf();
        cfg.text = text.to_string();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn require<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        section
            .as_ref()
            .ok_or_else(|| CliError::Config(format!("missing [{name}] section")))
    }

    pub fn theorem(&self) -> Result<Theorem, CliError> {
        let check = Self::require(&self.check, "check")?;
        let name = check
            .theorem
            .as_deref()
            .ok_or_else(|| CliError::Config("[check] needs `theorem`".into()))?;
        name.parse().map_err(|e: herzlab_core::Error| CliError::Config(e.to_string()))
    }
}

pub(crate) fn exponent(v: &ExpValue) -> Result<Exponent, CliError> {
    v.exponent()
}
