//! TOML experiment configs: one table per subcommand, flat `key = value`
//! entries, unknown keys rejected.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use serde::Deserialize;
use timesq_core::{SequenceSpec, TargetTag};

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Subcommand {
    Orbit,
    Entropy,
    Padic,
    Density,
    Measure,
    Dim,
    Pipeline,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Orbit => "orbit",
            Subcommand::Entropy => "entropy",
            Subcommand::Padic => "padic",
            Subcommand::Density => "density",
            Subcommand::Measure => "measure",
            Subcommand::Dim => "dim",
            Subcommand::Pipeline => "pipeline",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Subcommand> {
        <Subcommand as clap::ValueEnum>::from_str(s, false)
            .map_err(|_| LabError::config(format!("unknown subcommand `{s}`")))
    }
}

/// A sequence given in its structured-text form.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "String")]
pub struct Spec(pub SequenceSpec);

impl TryFrom<String> for Spec {
    type Error = timesq_core::Error;

    fn try_from(s: String) -> Result<Spec, Self::Error> {
        s.parse().map(Spec)
    }
}

/// `sqrt2`, `sqrt3`, `golden` or an explicit `num/den`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "String")]
pub struct Target(pub TargetTag);

impl TryFrom<String> for Target {
    type Error = timesq_core::Error;

    fn try_from(s: String) -> Result<Target, Self::Error> {
        s.parse().map(Target)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntOrString {
    Int(i64),
    Str(String),
}

/// An exact rational: an integer, `"num/den"` or `"num"`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "IntOrString")]
pub struct Ratio(pub BigRational);

impl TryFrom<IntOrString> for Ratio {
    type Error = String;

    fn try_from(v: IntOrString) -> Result<Ratio, String> {
        match v {
            IntOrString::Int(n) => Ok(Ratio(BigRational::from_integer(n.into()))),
            IntOrString::Str(s) => parse_ratio(&s).map(Ratio),
        }
    }
}

pub fn parse_ratio(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let int = |t: &str| t.trim().parse::<num_bigint::BigInt>().map_err(|_| format!("bad rational `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = int(d)?;
            if d == 0.into() {
                return Err(format!("zero denominator in `{s}`"));
            }
            Ok(BigRational::new(int(n)?, d))
        }
        None => Ok(BigRational::from_integer(int(s)?)),
    }
}

/// A non-negative integer: a TOML integer, a decimal string or `"b^e"`.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(try_from = "IntOrString")]
pub struct BigInteger(pub BigUint);

impl TryFrom<IntOrString> for BigInteger {
    type Error = String;

    fn try_from(v: IntOrString) -> Result<BigInteger, String> {
        match v {
            IntOrString::Int(n) => {
                u64::try_from(n).map(|n| BigInteger(n.into())).map_err(|_| format!("{n} must be non-negative"))
            }
            IntOrString::Str(s) => parse_big(&s).map(BigInteger),
        }
    }
}

pub fn parse_big(s: &str) -> Result<BigUint, String> {
    let s = s.trim();
    let bad = || format!("bad integer `{s}`");
    match s.split_once('^') {
        Some((b, e)) => {
            let b: BigUint = b.trim().parse().map_err(|_| bad())?;
            let e: u32 = e.trim().parse().map_err(|_| bad())?;
            Ok(num_traits::pow(b, e as usize))
        }
        None => s.parse().map_err(|_| bad()),
    }
}

fn default_digits() -> u32 {
    100
}

fn default_threshold() -> Ratio {
    Ratio(timesq_core::entropy::default_threshold_fraction())
}

fn default_slope() -> Ratio {
    Ratio(timesq_core::padic::default_slope())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitConfig {
    pub x: Target,
    #[serde(default = "default_digits")]
    pub digits: u32,
    pub q: u64,
    pub length: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntropyConfig {
    pub spec: Spec,
    pub q: u64,
    pub n_max: u32,
    #[serde(default = "default_k_factor")]
    pub k_factor: u64,
    #[serde(default = "default_k_cap")]
    pub k_cap: u64,
    /// Overrides the scaled policy with a fixed cutoff.
    pub k_fixed: Option<u64>,
    #[serde(default = "default_threshold")]
    pub threshold: Ratio,
}

fn default_k_factor() -> u64 {
    4
}

fn default_k_cap() -> u64 {
    1_000_000
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PadicConfig {
    pub a: u64,
    pub p: u64,
    #[serde(default = "default_precision")]
    pub precision: u32,
    /// Rows of the `f(n)` versus `a^{Sn}` table.
    #[serde(default = "default_eval_terms")]
    pub eval_terms: u64,
    /// Optional sequence for the Mahler continuity screen.
    pub spec: Option<Spec>,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_slope")]
    pub slope: Ratio,
}

fn default_precision() -> u32 {
    20
}

fn default_eval_terms() -> u64 {
    16
}

fn default_k_max() -> usize {
    64
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityConfig {
    pub x: Target,
    #[serde(default = "default_digits")]
    pub digits: u32,
    pub a: Spec,
    pub b: Spec,
    pub c: Spec,
    pub a_range: [u64; 2],
    pub b_range: [u64; 2],
    pub c_range: [u64; 2],
    pub max_product: BigInteger,
    /// Weyl sums for `1 <= h <= weyl_max`.
    #[serde(default = "default_weyl_max")]
    pub weyl_max: i64,
    /// Weyl sums are skipped on clouds larger than this.
    #[serde(default = "default_weyl_cap")]
    pub weyl_cap: usize,
    pub scan: Option<ScanConfig>,
    pub epsilon: Option<EpsilonConfig>,
}

fn default_weyl_max() -> i64 {
    4
}

fn default_weyl_cap() -> usize {
    20_000
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub spec: Spec,
    pub lo: Ratio,
    pub hi: Ratio,
    pub grid: u64,
    pub terms: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonConfig {
    pub spec: Spec,
    pub x0: Ratio,
    pub eps: Ratio,
    #[serde(default = "default_bound")]
    pub bound: u64,
}

fn default_bound() -> u64 {
    timesq_core::density::DEFAULT_SEARCH_BOUND
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureConfig {
    pub x: Target,
    #[serde(default = "default_measure_digits")]
    pub digits: u32,
    pub q: u64,
    pub a: Spec,
    pub levels: [u32; 2],
    pub delta: Option<Ratio>,
    pub prime: Option<u64>,
    pub orbit_steps: Option<u32>,
    pub terms: Option<u64>,
    pub search_len: Option<usize>,
    pub h_max: Option<u64>,
    /// Randomized entropy-inequality cases drawn from the seed.
    #[serde(default)]
    pub property_cases: u32,
}

fn default_measure_digits() -> u32 {
    200
}

impl MeasureConfig {
    pub fn growth(&self) -> GrowthOptions {
        GrowthOptions {
            delta: self.delta.clone(),
            prime: self.prime,
            orbit_steps: self.orbit_steps,
            terms: self.terms,
            search_len: self.search_len,
            h_max: self.h_max,
        }
    }
}

/// Optional overrides of the growth experiment defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthOptions {
    pub delta: Option<Ratio>,
    pub prime: Option<u64>,
    pub orbit_steps: Option<u32>,
    pub terms: Option<u64>,
    pub search_len: Option<usize>,
    pub h_max: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimConfig {
    pub delta_min: Ratio,
    pub delta_max: Ratio,
    pub scales: usize,
    pub cloud: CloudSource,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CloudSource {
    /// Left endpoints of the level-`level` middle-thirds intervals.
    Cantor {
        level: u32,
    },
    /// `{j/size : 0 <= j < size}`.
    Grid {
        size: u64,
    },
    Orbit {
        x: Target,
        #[serde(default = "default_digits")]
        digits: u32,
        q: u64,
        length: usize,
    },
    Points {
        points: Vec<String>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub q: u64,
    pub a: Spec,
    pub b: Spec,
    pub x: Target,
    #[serde(default = "default_measure_digits")]
    pub digits: u32,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default = "default_threshold")]
    pub threshold: Ratio,
    /// Mahler coefficients examined for `b`.
    #[serde(default = "default_pipeline_k_max")]
    pub k_max: usize,
    #[serde(default = "default_slope")]
    pub slope: Ratio,
    /// Terms of `b` whose valuations feed the `‖b_k‖_p → 0` check.
    #[serde(default = "default_norm_terms")]
    pub norm_terms: u64,
    #[serde(default = "default_levels")]
    pub levels: [u32; 2],
    #[serde(default)]
    pub growth: GrowthOptions,
    pub triple: TripleConfig,
}

fn default_n_max() -> u32 {
    8
}

fn default_pipeline_k_max() -> usize {
    16
}

fn default_norm_terms() -> u64 {
    10
}

fn default_levels() -> [u32; 2] {
    [1, 3]
}

/// Index ranges for `q^n a_m b_k x`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleConfig {
    pub n_range: [u64; 2],
    pub m_range: [u64; 2],
    pub k_range: [u64; 2],
    pub max_product: BigInteger,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub orbit: Option<OrbitConfig>,
    pub entropy: Option<EntropyConfig>,
    pub padic: Option<PadicConfig>,
    pub density: Option<DensityConfig>,
    pub measure: Option<MeasureConfig>,
    pub dim: Option<DimConfig>,
    pub pipeline: Option<PipelineConfig>,
}

/// A validated config together with its verbatim source text.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub subcommand: Subcommand,
    pub seed: u64,
    pub text: String,
    pub file: ConfigFile,
}

impl ExperimentConfig {
    /// Parses `text`; `seed` overrides the file's `seed` key, which defaults to 0.
    pub fn parse(subcommand: Subcommand, text: &str, seed: Option<u64>) -> Result<ExperimentConfig> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| LabError::config(e.to_string()))?;
        let present = match subcommand {
            Subcommand::Orbit => file.orbit.is_some(),
            Subcommand::Entropy => file.entropy.is_some(),
            Subcommand::Padic => file.padic.is_some(),
            Subcommand::Density => file.density.is_some(),
            Subcommand::Measure => file.measure.is_some(),
            Subcommand::Dim => file.dim.is_some(),
            Subcommand::Pipeline => file.pipeline.is_some(),
        };
        if !present {
            return Err(LabError::config(format!("missing [{subcommand}] table")));
        }
        let seed = seed.or(file.seed).unwrap_or(0);
        Ok(ExperimentConfig { subcommand, seed, text: text.to_string(), file })
    }
}

/// `[lo, hi]` as an inclusive range, rejecting `lo > hi`.
pub fn range<T: PartialOrd + Copy + fmt::Display>(name: &str, r: [T; 2]) -> Result<std::ops::RangeInclusive<T>> {
    if r[0] > r[1] {
        return Err(LabError::config(format!("{name}: {} > {}", r[0], r[1])));
    }
    Ok(r[0]..=r[1])
}
