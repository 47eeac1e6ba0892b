//! JSON scenario files.
//!
//! ```json
//! {
//!   "name": "pt_linear_gain_loss",
//!   "grid": { "n": [401], "dx": [0.05], "origin": [-10.0], "bc": ["dirichlet"] },
//!   "V": { "preset": "harmonic" },
//!   "W": { "preset": "linear", "slope": 0.3 },
//!   "transform": { "kind": "parity" },
//!   "initial": { "type": "gaussian", "center": [0.5], "width": 0.7 },
//!   "dt": 0.001,
//!   "steps": 1000,
//!   "kinds": ["mixed", "bilocal_f_c", "combined_ft_b"]
//! }
//! ```
//!
//! `steps` is the number of steps taken in each time direction, so the
//! trajectory covers `t ∈ [-steps·dt, steps·dt]`. Relative `file` paths are
//! resolved against the directory of the scenario file.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conservation::PairingTag;
use crate::error::{Error, Result};
use crate::grid::{Axis, Boundary, ComplexField, Grid, C64};
use crate::hamiltonian::{Hamiltonian, Preset, Profile, Sign};
use crate::lagrangian::PhaseDilation;
use crate::propagator::{stationary_state, Scheme};
use crate::symmetry::{SpatialTransform, TransformSpec};

/// Grid as parallel per-axis lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: Vec<usize>,
    pub dx: Vec<f64>,
    pub origin: Vec<f64>,
    pub bc: Vec<Boundary>,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        let dim = self.n.len();
        if [self.dx.len(), self.origin.len(), self.bc.len()].iter().any(|&l| l != dim) {
            return Err(Error::Config("grid: `n`, `dx`, `origin` and `bc` must have the same length".into()));
        }
        let axes = (0..dim)
            .map(|a| Axis::new(self.n[a], self.dx[a], self.origin[a], self.bc[a]))
            .collect::<Result<Vec<_>>>()?;
        Grid::new(axes)
    }
}

fn default_amplitude() -> f64 {
    1.0
}

fn default_eigen_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    500
}

/// Initial condition for `ψ(t = 0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// `A · exp(-|x - c|² / 4σ² + i k·x)`
    Gaussian {
        center: Vec<f64>,
        width: f64,
        #[serde(default)]
        momentum: Vec<f64>,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// `exp(i k·x)`
    PlaneWave { k: Vec<f64> },
    /// Eigenvector of the discrete `H±` nearest to the complex shift.
    Eigenstate {
        shift: f64,
        #[serde(default)]
        shift_im: f64,
        #[serde(default = "default_eigen_tol")]
        tol: f64,
        #[serde(default = "default_max_iter")]
        max_iter: usize,
        #[serde(default = "default_sign")]
        sign: Sign,
    },
    /// `Σ c_j ψ_j` with `coefficient = [re, im]`.
    Superposition { terms: Vec<Term> },
    /// Independent uniform samples in `[-A, A] + i[-A, A]`, drawn from the
    /// scenario seed.
    Random {
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// Snapshot CSV on the scenario grid.
    File { file: PathBuf },
}

fn default_sign() -> Sign {
    Sign::Plus
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coefficient: [f64; 2],
    pub state: InitialSpec,
}

fn zero_profile() -> Profile {
    Profile::Preset(Preset::Zero)
}

fn default_true() -> bool {
    true
}

fn default_stride() -> usize {
    10
}

fn default_threshold() -> f64 {
    1e-8
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub grid: GridSpec,
    #[serde(rename = "V", default = "zero_profile")]
    pub v: Profile,
    #[serde(rename = "W", default = "zero_profile")]
    pub w: Profile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transform: Option<TransformSpec>,
    pub initial: InitialSpec,
    /// `ψ₋(0)` for dual runs; defaults to `initial`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minus_initial: Option<InitialSpec>,
    /// Evolve `ψ₋` under `H₋` alongside `ψ₊`. Otherwise a single field is
    /// evolved under `H₊` and `ψ₋(t) = ψ*(-t)` is used where needed.
    #[serde(default = "default_true")]
    pub dual: bool,
    pub dt: f64,
    pub steps: usize,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub kinds: Vec<PairingTag>,
    /// Kinds evaluated even when the classification rejects them; they are
    /// expected to come out VIOLATED.
    #[serde(default)]
    pub negative_controls: Vec<PairingTag>,
    /// Snapshot files are written for `m ≡ -steps (mod stride)`.
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub phi_samples: Vec<PhaseDilation>,
    /// Extra random `φ` samples (`|φr| ≤ 5`, `φi ∈ [-π, π]`) from the seed.
    #[serde(default)]
    pub random_phi: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threshold")]
    pub drift_threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

/// Command-line adjustments applied after loading.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub dt: Option<f64>,
    pub steps: Option<usize>,
    pub refine: u32,
    pub seed: Option<u64>,
}

/// Scenario with every input sampled and checked.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub scenario: Scenario,
    pub refine: u32,
    pub grid: Arc<Grid>,
    pub hamiltonian: Hamiltonian,
    pub transform: Option<SpatialTransform>,
    pub plus0: ComplexField,
    pub minus0: ComplexField,
    pub phi: Vec<PhaseDilation>,
}

impl Scenario {
    pub fn from_json(text: &str, origin: &Path) -> Result<Scenario> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Scenario::from_json(&text, path)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Checks that do not need any sampling.
    pub fn check(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive and finite, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        if self.stride == 0 {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        if !(self.drift_threshold > 0.0) {
            return Err(Error::Config("drift_threshold must be positive".into()));
        }
        for k in &self.kinds {
            if k.requires_transform() && self.transform.is_none() {
                return Err(Error::Config(format!("kind `{k}` needs a `transform`")));
            }
        }
        for k in &self.negative_controls {
            if !self.kinds.contains(k) {
                return Err(Error::Config(format!("negative control `{k}` is not listed in `kinds`")));
            }
        }
        Ok(())
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(dt) = o.dt {
            self.dt = dt;
        }
        if let Some(steps) = o.steps {
            self.steps = steps;
        }
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        self.check()
    }

    /// Builds everything needed for a run; `base` resolves relative files.
    /// Each refinement level halves every spacing and `dt` and doubles
    /// `steps`, keeping the simulated time span.
    pub fn prepare(&self, refine: u32, base: Option<&Path>) -> Result<Prepared> {
        self.check()?;
        let mut scenario = self.clone();
        let mut grid = self.grid.build()?;
        for _ in 0..refine {
            grid = grid.refined();
        }
        let factor = 2usize.pow(refine);
        scenario.dt = self.dt / factor as f64;
        scenario.steps = self.steps * factor;
        scenario.stride = self.stride * factor;
        let grid = Arc::new(grid);
        let hamiltonian = Hamiltonian::from_profiles(&grid, &self.v.resolved(base), &self.w.resolved(base))?;
        let transform = self.transform.as_ref().map(|t| t.build(&grid)).transpose()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let plus0 = build_initial(&self.initial, &hamiltonian, base, &mut rng)?;
        let minus0 = match &self.minus_initial {
            Some(spec) => build_initial(spec, &hamiltonian, base, &mut rng)?,
            None => plus0.clone(),
        };
        let mut phi = self.phi_samples.clone();
        for _ in 0..self.random_phi {
            phi.push(PhaseDilation::new(
                rng.gen_range(-5.0..=5.0),
                rng.gen_range(-std::f64::consts::PI..=std::f64::consts::PI),
            ));
        }
        Ok(Prepared {
            scenario,
            refine,
            grid,
            hamiltonian,
            transform,
            plus0,
            minus0,
            phi,
        })
    }
}

trait Resolve {
    fn resolved(&self, base: Option<&Path>) -> Self;
}

impl Resolve for Profile {
    fn resolved(&self, base: Option<&Path>) -> Profile {
        match (self, base) {
            (Profile::File { file }, Some(dir)) if file.is_relative() => Profile::File { file: dir.join(file) },
            (Profile::Preset(Preset::Sum { terms }), _) => Profile::Preset(Preset::Sum {
                terms: terms.iter().map(|t| t.resolved(base)).collect(),
            }),
            _ => self.clone(),
        }
    }
}

fn coord_vec(v: &[f64], a: usize) -> f64 {
    v.get(a).copied().unwrap_or(0.0)
}

fn build_initial(
    spec: &InitialSpec,
    h: &Hamiltonian,
    base: Option<&Path>,
    rng: &mut ChaCha8Rng,
) -> Result<ComplexField> {
    let grid = h.grid();
    let dim = grid.dim();
    let field = match spec {
        InitialSpec::Gaussian {
            center,
            width,
            momentum,
            amplitude,
        } => {
            if !(*width > 0.0) {
                return Err(Error::Config(format!("gaussian width must be positive, got {width}")));
            }
            ComplexField::from_fn(grid.clone(), |x| {
                let (mut r2, mut phase) = (0.0, 0.0);
                for a in 0..dim {
                    let d = x[a] - coord_vec(center, a);
                    r2 += d * d;
                    phase += coord_vec(momentum, a) * x[a];
                }
                C64::from_polar(amplitude * (-r2 / (4.0 * width * width)).exp(), phase)
            })
        }
        InitialSpec::PlaneWave { k } => ComplexField::from_fn(grid.clone(), |x| {
            let phase: f64 = (0..dim).map(|a| coord_vec(k, a) * x[a]).sum();
            C64::from_polar(1.0, phase)
        }),
        InitialSpec::Eigenstate {
            shift,
            shift_im,
            tol,
            max_iter,
            sign,
        } => stationary_state(h, *sign, C64::new(*shift, *shift_im), *tol, *max_iter)?.field,
        InitialSpec::Superposition { terms } => {
            let mut acc = ComplexField::zeros(grid.clone());
            for t in terms {
                let f = build_initial(&t.state, h, base, rng)?;
                acc = &acc + &f.scale(C64::new(t.coefficient[0], t.coefficient[1]));
            }
            acc
        }
        InitialSpec::Random { amplitude } => ComplexField::from_fn(grid.clone(), |_| {
            C64::new(
                rng.gen_range(-1.0..=1.0) * amplitude,
                rng.gen_range(-1.0..=1.0) * amplitude,
            )
        }),
        InitialSpec::File { file } => {
            let path = match base {
                Some(dir) if file.is_relative() => dir.join(file),
                _ => file.clone(),
            };
            let f = crate::io::read_field_csv(&path)?;
            if f.grid().as_ref() != grid.as_ref() {
                return Err(Error::Config(format!(
                    "initial field in {} is on a different grid",
                    path.display()
                )));
            }
            ComplexField::new(grid.clone(), f.into_values())?
        }
    };
    if !field.is_finite() {
        return Err(Error::Config("initial condition is not finite".into()));
    }
    if field.max_abs() == 0.0 {
        return Err(Error::Config("initial condition vanishes identically".into()));
    }
    Ok(field.with_time(0.0))
}

/// Scenarios shipped with the crate.
pub const BUNDLED: [(&str, &str); 6] = [
    ("hermitian_parity_box", include_str!("../scenarios/hermitian_parity_box.json")),
    ("pt_linear_gain_loss", include_str!("../scenarios/pt_linear_gain_loss.json")),
    ("pure_loss_uniform", include_str!("../scenarios/pure_loss_uniform.json")),
    ("lattice_translation", include_str!("../scenarios/lattice_translation.json")),
    ("rotation90_2d", include_str!("../scenarios/rotation90_2d.json")),
    (
        "no_symmetry_negative_control",
        include_str!("../scenarios/no_symmetry_negative_control.json"),
    ),
];

pub fn bundled(name: &str) -> Option<Scenario> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(n, text)| {
        Scenario::from_json(text, Path::new(n)).expect("bundled scenarios parse")
    })
}

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}
