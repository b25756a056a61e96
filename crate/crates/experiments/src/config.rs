//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use simplicial_core::geometry::SimplexConfig;
use simplicial_core::grid::{GeneratorSpec, GridShape};
use simplicial_core::littlewood_paley::Increment;
use simplicial_core::variation::Exponent;

use crate::error::{ExperimentError, Result};

/// The configuration shipped with the binary.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "defaults::seed")]
    pub seed: u64,
    /// Copy-set cache; overridden by `SIMPLICIAL_CACHE_DIR` and `--cache-dir`.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
    /// Where reports and CSV tables go; overridden by `--out`.
    #[serde(default = "defaults::output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub simplex: SimplexSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub enumerate: EnumerateConfig,
    #[serde(default)]
    pub scaling: ScalingConfig,
    #[serde(default)]
    pub multiplier_check: MultiplierCheckConfig,
    #[serde(default)]
    pub variation: VariationConfig,
    #[serde(default)]
    pub jump: JumpConfig,
    #[serde(default)]
    pub decay: DecayConfig,
    #[serde(default)]
    pub local_sup: LocalSupConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ExperimentError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
            .map_err(|e| ExperimentError::config(format!("{}: {e}", path.display())))
    }

    pub fn bundled() -> Self {
        Self::from_toml(DEFAULT_CONFIG).expect("bundled config parses")
    }

    pub fn simplex(&self) -> Result<SimplexConfig> {
        self.simplex.build()
    }

    /// The grid `Z_N^{nk}` the dense experiments run on.
    pub fn shape(&self) -> Result<GridShape> {
        let s = self.simplex()?;
        GridShape::new(self.grid.period, s.dim())
            .map_err(|e| ExperimentError::config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexSpec {
    #[serde(default = "defaults::n")]
    pub n: usize,
    /// Vertices `s_1, ..., s_k`; the origin is implicit. Defaults to `[e_1]`.
    #[serde(default)]
    pub vertices: Option<Vec<Vec<i64>>>,
    /// Run the theorem experiments even when `n < 2k + 3`.
    #[serde(default)]
    pub allow_low_dimension: bool,
}

impl Default for SimplexSpec {
    fn default() -> Self {
        Self {
            n: defaults::n(),
            vertices: None,
            allow_low_dimension: false,
        }
    }
}

impl SimplexSpec {
    pub fn build(&self) -> Result<SimplexConfig> {
        let s = match &self.vertices {
            None => SimplexConfig::unit(self.n),
            Some(v) => SimplexConfig::new(self.n, v.clone()),
        };
        s.map_err(|e| ExperimentError::config(format!("simplex: {e}")))
    }

    /// Rejects simplices outside `n >= 2k + 3` unless explicitly allowed.
    pub fn check_regime(&self) -> Result<SimplexConfig> {
        let s = self.build()?;
        if !s.regime_ok() && !self.allow_low_dimension {
            return Err(ExperimentError::config(format!(
                "simplex: n = {} < 2k + 3 = {}; set allow_low_dimension to run anyway",
                s.n(),
                2 * s.k() + 3
            )));
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Period `N` of the torus `Z_N^{nk}`.
    #[serde(default = "defaults::period")]
    pub period: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            period: defaults::period(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnumerateConfig {
    #[serde(default = "defaults::enumerate_lambda_sq")]
    pub lambda_sq: Vec<u64>,
}

impl Default for EnumerateConfig {
    fn default() -> Self {
        Self {
            lambda_sq: defaults::enumerate_lambda_sq(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    #[serde(default = "defaults::lambdas")]
    pub lambdas: Vec<u64>,
    /// Largest admissible max/min of the normalised counts.
    #[serde(default = "defaults::band")]
    pub band: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            lambdas: defaults::lambdas(),
            band: defaults::band(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplierCheckConfig {
    /// Bands `j` of the square sum.
    #[serde(default = "defaults::bands")]
    pub bands: Vec<u32>,
    /// Frequency-grid dimensions `kn`.
    #[serde(default = "defaults::dims")]
    pub dims: Vec<usize>,
    #[serde(default = "defaults::points_per_axis")]
    pub points_per_axis: usize,
    /// The sum runs over `l = 2^j, ..., 2^j + l_span`.
    #[serde(default = "defaults::l_span")]
    pub l_span: u32,
    /// Extra scales for the tail check.
    #[serde(default = "defaults::l_extension")]
    pub l_extension: u32,
    #[serde(default = "defaults::tail_tolerance")]
    pub tail_tolerance: f64,
    #[serde(default = "defaults::increment")]
    pub increment: Increment,
    /// Also record the other increment, unchecked.
    #[serde(default = "defaults::yes")]
    pub record_other_increment: bool,
    #[serde(default = "defaults::telescoping_period")]
    pub telescoping_period: usize,
    #[serde(default = "defaults::telescoping_dim")]
    pub telescoping_dim: usize,
    #[serde(default = "defaults::telescoping_scales")]
    pub telescoping_scales: Vec<u32>,
    #[serde(default = "defaults::exact_tolerance")]
    pub telescoping_tolerance: f64,
    /// `[l, j, N]` triples checked for plateau and support exactness on `Z_N`.
    #[serde(default = "defaults::plateau_cases")]
    pub plateau_cases: Vec<[u64; 3]>,
}

impl Default for MultiplierCheckConfig {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariationConfig {
    #[serde(default = "defaults::trials")]
    pub trials: usize,
    /// Dilations `lambda`.
    #[serde(default = "defaults::variation_scales")]
    pub scales: Vec<u64>,
    /// Must extend `scales`.
    #[serde(default = "defaults::extended_scales")]
    pub extended_scales: Vec<u64>,
    #[serde(default = "defaults::r")]
    pub r: Vec<Exponent>,
    /// Largest admissible ratio of the extended to the base maximum.
    #[serde(default = "defaults::growth_limit")]
    pub growth_limit: f64,
    #[serde(default = "defaults::generator")]
    pub generator: GeneratorSpec,
}

impl Default for VariationConfig {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    #[serde(default = "defaults::trials")]
    pub trials: usize,
    #[serde(default = "defaults::jump_scales")]
    pub scales: Vec<u64>,
    /// Absolute jump sizes. When absent each trial uses
    /// `2 |f|_inf * lam_ratio^-i`, `i = 0..lam_count`.
    #[serde(default)]
    pub lams: Option<Vec<f64>>,
    #[serde(default = "defaults::lam_count")]
    pub lam_count: usize,
    #[serde(default = "defaults::lam_ratio")]
    pub lam_ratio: f64,
    #[serde(default = "defaults::generator")]
    pub generator: GeneratorSpec,
}

impl Default for JumpConfig {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    #[serde(default = "defaults::decay_trials")]
    pub trials: usize,
    /// Smoothing scales `l`.
    #[serde(default = "defaults::decay_levels")]
    pub levels: Vec<u32>,
    /// Martingale difference levels `m >= 1`.
    #[serde(default = "defaults::decay_differences")]
    pub differences: Vec<u32>,
    /// Scales at which the smoothed kernel mass is checked.
    #[serde(default = "defaults::mass_levels")]
    pub mass_levels: Vec<u32>,
    #[serde(default = "defaults::mass_tolerance")]
    pub mass_tolerance: f64,
    #[serde(default = "defaults::generator")]
    pub generator: GeneratorSpec,
}

impl Default for DecayConfig {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalSupConfig {
    #[serde(default = "defaults::decay_trials")]
    pub trials: usize,
    #[serde(default = "defaults::local_l")]
    pub l: u32,
    #[serde(default = "defaults::local_bands")]
    pub bands: Vec<u32>,
    /// Step between consecutive `lambda^2` in `[4^l, 4^{l+1}]`.
    #[serde(default = "defaults::stride")]
    pub stride: u64,
}

impl Default for LocalSupConfig {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

mod defaults {
    use super::*;

    pub fn seed() -> u64 {
        20_240_601
    }
    pub fn output_dir() -> PathBuf {
        PathBuf::from("simplicial-out")
    }
    pub fn n() -> usize {
        5
    }
    pub fn period() -> usize {
        16
    }
    pub fn yes() -> bool {
        true
    }
    pub fn enumerate_lambda_sq() -> Vec<u64> {
        vec![1, 2, 4, 9, 16]
    }
    pub fn lambdas() -> Vec<u64> {
        vec![2, 4, 8, 16]
    }
    pub fn band() -> f64 {
        8.0
    }
    pub fn bands() -> Vec<u32> {
        vec![0, 1, 2]
    }
    pub fn dims() -> Vec<usize> {
        vec![1, 2]
    }
    pub fn points_per_axis() -> usize {
        2048
    }
    pub fn l_span() -> u32 {
        16
    }
    pub fn l_extension() -> u32 {
        8
    }
    pub fn tail_tolerance() -> f64 {
        0.01
    }
    pub fn increment() -> Increment {
        Increment::Scale
    }
    pub fn telescoping_period() -> usize {
        24
    }
    pub fn telescoping_dim() -> usize {
        2
    }
    pub fn telescoping_scales() -> Vec<u32> {
        vec![1, 2, 3, 5, 8, 13, 31]
    }
    pub fn exact_tolerance() -> f64 {
        1e-12
    }
    pub fn plateau_cases() -> Vec<[u64; 3]> {
        vec![[3, 0, 64], [6, 1, 96], [9, 2, 240]]
    }
    pub fn trials() -> usize {
        50
    }
    pub fn variation_scales() -> Vec<u64> {
        vec![1, 2]
    }
    pub fn extended_scales() -> Vec<u64> {
        vec![1, 2, 4]
    }
    pub fn r() -> Vec<Exponent> {
        vec![Exponent::Finite(3.0)]
    }
    pub fn growth_limit() -> f64 {
        1.25
    }
    pub fn generator() -> GeneratorSpec {
        GeneratorSpec::named("gaussian-iid")
    }
    pub fn jump_scales() -> Vec<u64> {
        vec![1, 2, 4]
    }
    pub fn lam_count() -> usize {
        12
    }
    pub fn lam_ratio() -> f64 {
        std::f64::consts::SQRT_2
    }
    pub fn decay_trials() -> usize {
        3
    }
    pub fn decay_levels() -> Vec<u32> {
        vec![1, 2, 3]
    }
    pub fn decay_differences() -> Vec<u32> {
        vec![1, 2, 3]
    }
    pub fn mass_levels() -> Vec<u32> {
        vec![0, 1, 2]
    }
    pub fn mass_tolerance() -> f64 {
        1e-8
    }
    pub fn local_l() -> u32 {
        2
    }
    pub fn local_bands() -> Vec<u32> {
        vec![1, 2, 3]
    }
    pub fn stride() -> u64 {
        1
    }
}
