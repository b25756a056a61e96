use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{dft_inverse, DenseFunction, GridError, GridShape, LatticeFunction, Spectrum};

/// Seed for trial `i` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, i: u64) -> u64 {
    seed ^ i
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    /// Side length of the box for `box-indicator`; defaults to `N / 2`.
    #[serde(default)]
    pub box_side: Option<usize>,
    /// Flat frequency indices carrying the spectrum for `fourier-band`.
    #[serde(default)]
    pub band: Vec<usize>,
    /// Draw complex rather than real Gaussian values.
    #[serde(default)]
    pub complex: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    #[serde(default)]
    pub params: GeneratorParams,
}

impl GeneratorSpec {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            params: GeneratorParams::default(),
        }
    }

    pub fn fourier_band(band: Vec<usize>) -> Self {
        Self {
            name: "fourier-band".into(),
            params: GeneratorParams {
                band,
                ..Default::default()
            },
        }
    }
}

pub trait TestFunctionGenerator: Send + Sync {
    fn name(&self) -> &'static str;
    fn generate(
        &self,
        rng: &mut ChaCha8Rng,
        shape: GridShape,
        params: &GeneratorParams,
    ) -> Result<DenseFunction, GridError>;
}

fn gaussian(rng: &mut ChaCha8Rng, complex: bool) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = if complex {
        rng.sample(StandardNormal)
    } else {
        0.0
    };
    Complex64::new(re, im)
}

struct GaussianIid;

impl TestFunctionGenerator for GaussianIid {
    fn name(&self) -> &'static str {
        "gaussian-iid"
    }

    fn generate(
        &self,
        rng: &mut ChaCha8Rng,
        shape: GridShape,
        params: &GeneratorParams,
    ) -> Result<DenseFunction, GridError> {
        let values = (0..shape.len())
            .map(|_| gaussian(rng, params.complex))
            .collect();
        DenseFunction::from_values(shape, values)
    }
}

struct Delta;

impl TestFunctionGenerator for Delta {
    fn name(&self) -> &'static str {
        "delta"
    }

    fn generate(
        &self,
        _: &mut ChaCha8Rng,
        shape: GridShape,
        _: &GeneratorParams,
    ) -> Result<DenseFunction, GridError> {
        Ok(DenseFunction::delta(shape))
    }
}

/// Indicator of `[0, side)^d`.
struct BoxIndicator;

impl TestFunctionGenerator for BoxIndicator {
    fn name(&self) -> &'static str {
        "box-indicator"
    }

    fn generate(
        &self,
        _: &mut ChaCha8Rng,
        shape: GridShape,
        params: &GeneratorParams,
    ) -> Result<DenseFunction, GridError> {
        let side = params.box_side.unwrap_or(shape.period() / 2).max(1);
        if side > shape.period() {
            return Err(GridError::GeneratorParams {
                generator: self.name().into(),
                reason: format!("box side {side} exceeds period {}", shape.period()),
            });
        }
        let mut idx = vec![0; shape.dim()];
        let values = (0..shape.len())
            .map(|flat| {
                shape.multi_index(flat, &mut idx);
                if idx.iter().all(|&c| c < side) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        DenseFunction::from_real(shape, values)
    }
}

/// Gaussian coefficients on the listed frequencies, zero elsewhere.
struct FourierBand;

impl TestFunctionGenerator for FourierBand {
    fn name(&self) -> &'static str {
        "fourier-band"
    }

    fn generate(
        &self,
        rng: &mut ChaCha8Rng,
        shape: GridShape,
        params: &GeneratorParams,
    ) -> Result<DenseFunction, GridError> {
        let mut coefficients = vec![Complex64::default(); shape.len()];
        for &a in &params.band {
            let slot = coefficients
                .get_mut(a)
                .ok_or_else(|| GridError::GeneratorParams {
                    generator: self.name().into(),
                    reason: format!("frequency index {a} outside grid of {} points", shape.len()),
                })?;
            *slot = gaussian(rng, true);
        }
        Ok(dft_inverse(&Spectrum::from_values(shape, coefficients)?))
    }
}

/// Test-function generators by name.
pub struct GeneratorRegistry {
    generators: BTreeMap<&'static str, Arc<dyn TestFunctionGenerator>>,
}

impl GeneratorRegistry {
    pub fn empty() -> Self {
        Self {
            generators: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(GaussianIid));
        r.register(Arc::new(Delta));
        r.register(Arc::new(BoxIndicator));
        r.register(Arc::new(FourierBand));
        r
    }

    pub fn register(&mut self, g: Arc<dyn TestFunctionGenerator>) {
        self.generators.insert(g.name(), g);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn TestFunctionGenerator>, GridError> {
        self.generators
            .get(name)
            .cloned()
            .ok_or_else(|| GridError::UnknownGenerator(name.into()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.generators.keys().copied()
    }

    pub fn generate(
        &self,
        seed: u64,
        shape: GridShape,
        spec: &GeneratorSpec,
    ) -> Result<LatticeFunction, GridError> {
        let g = self.get(&spec.name)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(g.generate(&mut rng, shape, &spec.params)?.into())
    }
}

/// Deterministic test function on `Z_N^d` from the built-in generators.
pub fn random_test_function(
    seed: u64,
    shape: GridShape,
    spec: &GeneratorSpec,
) -> Result<LatticeFunction, GridError> {
    GeneratorRegistry::with_builtins().generate(seed, shape, spec)
}
