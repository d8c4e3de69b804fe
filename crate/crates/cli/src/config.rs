use std::f64::consts::LN_2;
use std::fmt;
use std::path::{Path, PathBuf};

use fockfluct_core::multimode::SpectrumDocument;
use fockfluct_core::{ModeSpectrum, Region};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Thermal,
    Bipartite,
    Multimode,
    Verify,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Thermal => "thermal",
            Experiment::Bipartite => "bipartite",
            Experiment::Multimode => "multimode",
            Experiment::Verify => "verify",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// The JSON document passed with `--config`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub parameters: Value,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            context: format!("reading {}", path.display()),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Parses the `parameters` object, falling back to the experiment's defaults when absent.
pub fn parameters<T: DeserializeOwned + Default>(value: &Value) -> Result<T, CliError> {
    if value.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(value.clone()).map_err(|e| CliError::Config(format!("parameters: {e}")))
}

/// A real number that may also be written as `"inf"` in JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(if self.0 > 0.0 { "inf" } else { "-inf" })
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(x) => Ok(Real(x)),
            Raw::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" => Ok(Real(f64::INFINITY)),
                "-inf" | "-infinity" => Ok(Real(f64::NEG_INFINITY)),
                other => Err(serde::de::Error::custom(format!(
                    "expected a number or \"inf\", got {other:?}"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

/// Either explicit points or `{"start", "stop", "count"}` with both ends included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Points(Vec<Real>),
    Linspace(Linspace),
}

impl Grid {
    pub fn values(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let values: Vec<f64> = match self {
            Grid::Points(points) => points.iter().map(|r| r.0).collect(),
            Grid::Linspace(Linspace { start, stop, count }) => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
                    .collect(),
            },
        };
        if values.is_empty() {
            return Err(CliError::Config(format!("grid {name} is empty")));
        }
        if let Some(bad) = values.iter().find(|x| x.is_nan()) {
            return Err(CliError::Config(format!("grid {name} contains {bad}")));
        }
        Ok(values)
    }
}

fn one() -> f64 {
    1.0
}

fn default_tail_tol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalParams {
    pub beta_omega: Grid,
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    #[serde(default)]
    pub zero_point: bool,
}

impl Default for ThermalParams {
    fn default() -> Self {
        ThermalParams {
            beta_omega: Grid::Linspace(Linspace {
                start: 0.05,
                stop: 5.0,
                count: 50,
            }),
            omega: 1.0,
            tail_tol: default_tail_tol(),
            zero_point: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BipartiteParams {
    pub a: Grid,
    pub n: Vec<usize>,
    #[serde(default = "one")]
    pub omega: f64,
}

impl Default for BipartiteParams {
    fn default() -> Self {
        BipartiteParams {
            a: Grid::Points(vec![Real(0.1), Real(0.5), Real(LN_2), Real(1.0), Real(2.5)]),
            n: vec![2, 10, 60],
            omega: 1.0,
        }
    }
}

/// `"full"`, an explicit site list, or `{"start", "len"}` wrapping around the ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionSpec {
    Named(String),
    Sites(Vec<usize>),
    Range { start: usize, len: usize },
}

impl RegionSpec {
    pub fn resolve(&self, modes: usize) -> Result<Region, CliError> {
        let region = match self {
            RegionSpec::Named(name) if name == "full" => Region::full(modes),
            RegionSpec::Named(name) => return Err(CliError::Config(format!("unknown region {name:?}"))),
            RegionSpec::Sites(sites) => Region::new(sites.iter().copied(), modes),
            RegionSpec::Range { start, len } => Region::contiguous(*start, *len, modes),
        };
        region.map_err(|e| CliError::Config(format!("region {self}: {e}")))
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegionSpec::Named(name) => f.write_str(name),
            RegionSpec::Sites(sites) => {
                let parts: Vec<String> = sites.iter().map(|s| s.to_string()).collect();
                write!(f, "{{{}}}", parts.join(" "))
            }
            RegionSpec::Range { start, len } => write!(f, "{start}+{len}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultimodeParams {
    pub spectrum: SpectrumDocument,
    #[serde(default = "full_region")]
    pub regions: Vec<RegionSpec>,
}

fn full_region() -> Vec<RegionSpec> {
    vec![RegionSpec::Named("full".into())]
}

impl Default for MultimodeParams {
    fn default() -> Self {
        MultimodeParams {
            spectrum: SpectrumDocument {
                modes: 64,
                occupations: None,
                uniform: Some(2),
            },
            regions: vec![
                RegionSpec::Named("full".into()),
                RegionSpec::Range { start: 0, len: 32 },
                RegionSpec::Range { start: 0, len: 1 },
            ],
        }
    }
}

impl MultimodeParams {
    pub fn spectrum(&self) -> Result<ModeSpectrum, CliError> {
        ModeSpectrum::try_from(self.spectrum.clone()).map_err(|e| CliError::Config(format!("spectrum: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Thermal,
    Bipartite,
    FourthMoment,
    PairCorrelation,
    Subvolume,
    ScaledSubvolume,
    CoincidentGap,
    ProductNullity,
    GlobalStillness,
}

impl Check {
    pub const ALL: [Check; 9] = [
        Check::Thermal,
        Check::Bipartite,
        Check::FourthMoment,
        Check::PairCorrelation,
        Check::Subvolume,
        Check::ScaledSubvolume,
        Check::CoincidentGap,
        Check::ProductNullity,
        Check::GlobalStillness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Thermal => "thermal",
            Check::Bipartite => "bipartite",
            Check::FourthMoment => "fourth_moment",
            Check::PairCorrelation => "pair_correlation",
            Check::Subvolume => "subvolume",
            Check::ScaledSubvolume => "scaled_subvolume",
            Check::CoincidentGap => "coincident_gap",
            Check::ProductNullity => "product_nullity",
            Check::GlobalStillness => "global_stillness",
        }
    }
}

fn all_checks() -> Vec<Check> {
    Check::ALL.to_vec()
}

fn default_tolerance() -> f64 {
    1e-10
}

fn three() -> usize {
    3
}

fn three_quanta() -> u64 {
    3
}

fn hundred() -> usize {
    100
}

fn twenty() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyParams {
    #[serde(default = "all_checks")]
    pub checks: Vec<Check>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "three")]
    pub max_modes: usize,
    #[serde(default = "three_quanta")]
    pub max_occupation: u64,
    #[serde(default = "hundred")]
    pub random_states: usize,
    #[serde(default = "twenty")]
    pub random_spectra: usize,
    /// Spectra checked in addition to the enumerated ones.
    #[serde(default)]
    pub extra_spectra: Vec<SpectrumDocument>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            checks: all_checks(),
            tolerance: default_tolerance(),
            max_modes: three(),
            max_occupation: three_quanta(),
            random_states: hundred(),
            random_spectra: twenty(),
            extra_spectra: Vec::new(),
        }
    }
}

impl VerifyParams {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.checks.is_empty() {
            return Err(CliError::Config("verify needs at least one check".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(CliError::Config(format!(
                "tolerance must be nonnegative, got {}",
                self.tolerance
            )));
        }
        if self.max_modes == 0 {
            return Err(CliError::Config("max_modes must be at least 1".into()));
        }
        let count = (1..=self.max_modes as u32)
            .map(|m| (self.max_occupation as f64 + 1.0).powi(m as i32))
            .sum::<f64>();
        if count > 1e5 {
            return Err(CliError::Config(format!(
                "max_modes {} with max_occupation {} enumerates {count:.0} spectra",
                self.max_modes, self.max_occupation
            )));
        }
        Ok(())
    }
}
