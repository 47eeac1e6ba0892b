//! Dual non-Hermitian Hamiltonians `H± = -½∇² + V ± iW` on a grid.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{ensure_same_grid, inner, laplacian, ComplexField, Grid, RealField, C64};
use crate::symmetry::{apply_transform_real, SpatialTransform};

/// Which of the two dual Hamiltonians: `+` for `H∘ + iW`, `-` for `H∘ - iW`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        })
    }
}

/// Closed-form potential profiles. Coordinates are absolute grid coordinates;
/// 1D profiles ignore the second coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum Preset {
    Zero,
    Constant {
        value: f64,
    },
    /// `½ ω² |x - c|²`
    Harmonic {
        #[serde(default = "one")]
        omega: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `height` outside the box `[lo, hi]` (per axis), zero inside.
    Box {
        height: f64,
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// `depth · Σ_axes cos(2π x / period)`
    LatticeCosine {
        depth: f64,
        period: f64,
    },
    /// `slope · (x_axis - center)`
    Linear {
        slope: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        axis: usize,
    },
    /// `amplitude · exp(-|x - c|² / (2 width²))`
    Gaussian {
        amplitude: f64,
        #[serde(default)]
        center: Vec<f64>,
        width: f64,
    },
    /// `Σ_k coeffs[k] · x_axis^k`
    Polynomial {
        coeffs: Vec<f64>,
        #[serde(default)]
        axis: usize,
    },
    /// `amplitude · ((x-cx)² - (y-cy)²) · exp(-r² / (2 width²))`, odd under
    /// quarter turns about `c`.
    Quadrupole {
        amplitude: f64,
        #[serde(default)]
        center: Vec<f64>,
        width: f64,
    },
    Sum {
        terms: Vec<Profile>,
    },
}

fn one() -> f64 {
    1.0
}

/// A real profile: either a preset or a field CSV (real column used).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    File { file: PathBuf },
    Preset(Preset),
}

impl From<Preset> for Profile {
    fn from(p: Preset) -> Self {
        Profile::Preset(p)
    }
}

fn center_at(c: &[f64], a: usize) -> f64 {
    c.get(a).copied().unwrap_or(0.0)
}

impl Preset {
    pub fn eval(&self, x: [f64; 2], dim: usize) -> f64 {
        match self {
            Preset::Zero => 0.0,
            Preset::Constant { value } => *value,
            Preset::Harmonic { omega, center } => {
                let r2: f64 = (0..dim).map(|a| (x[a] - center_at(center, a)).powi(2)).sum();
                0.5 * omega * omega * r2
            }
            Preset::Box { height, lo, hi } => {
                let inside = (0..dim).all(|a| x[a] >= center_at(lo, a) && x[a] <= center_at(hi, a));
                if inside {
                    0.0
                } else {
                    *height
                }
            }
            Preset::LatticeCosine { depth, period } => (0..dim)
                .map(|a| depth * (2.0 * std::f64::consts::PI * x[a] / period).cos())
                .sum(),
            Preset::Linear {
                slope,
                center,
                axis,
            } => slope * (x[*axis] - center),
            Preset::Gaussian {
                amplitude,
                center,
                width,
            } => {
                let r2: f64 = (0..dim).map(|a| (x[a] - center_at(center, a)).powi(2)).sum();
                amplitude * (-r2 / (2.0 * width * width)).exp()
            }
            Preset::Polynomial { coeffs, axis } => {
                coeffs.iter().rev().fold(0.0, |acc, c| acc * x[*axis] + c)
            }
            Preset::Quadrupole {
                amplitude,
                center,
                width,
            } => {
                let dx = x[0] - center_at(center, 0);
                let dy = x[1] - center_at(center, 1);
                let r2 = dx * dx + dy * dy;
                amplitude * (dx * dx - dy * dy) * (-r2 / (2.0 * width * width)).exp()
            }
            Preset::Sum { terms } => terms
                .iter()
                .map(|t| match t {
                    Profile::Preset(p) => p.eval(x, dim),
                    // files cannot be evaluated pointwise; sample() handles them
                    Profile::File { .. } => f64::NAN,
                })
                .sum(),
        }
    }
}

impl Profile {
    /// Samples the profile on `grid`. Relative file paths resolve against `base`.
    pub fn sample(&self, grid: &Arc<Grid>, base: Option<&std::path::Path>) -> Result<RealField> {
        match self {
            Profile::File { file } => {
                let path = match base {
                    Some(b) if file.is_relative() => b.join(file),
                    _ => file.clone(),
                };
                let f = crate::io::read_field_csv(&path)?;
                if f.grid().as_ref() != grid.as_ref() {
                    return Err(Error::Config(format!(
                        "profile file {} is on a different grid",
                        path.display()
                    )));
                }
                Ok(f.re())
            }
            Profile::Preset(Preset::Sum { terms }) => {
                let mut acc = vec![0.0; grid.len()];
                for t in terms {
                    for (a, v) in acc.iter_mut().zip(t.sample(grid, base)?.values()) {
                        *a += v;
                    }
                }
                RealField::new(grid.clone(), acc)
            }
            Profile::Preset(p) => {
                if matches!(p, Preset::Quadrupole { .. }) && grid.dim() != 2 {
                    return Err(Error::Config("quadrupole profile needs a 2D grid".into()));
                }
                if let Preset::Linear { axis, .. } | Preset::Polynomial { axis, .. } = p {
                    if *axis >= grid.dim() {
                        return Err(Error::Config(format!("axis {axis} out of range")));
                    }
                }
                let dim = grid.dim();
                RealField::from_fn(grid.clone(), |x| p.eval(x, dim)).checked()
            }
        }
    }
}

/// Real potential `V` and gain/loss profile `W` on a common grid.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    grid: Arc<Grid>,
    potential: RealField,
    gain_loss: RealField,
}

impl Hamiltonian {
    pub fn new(potential: RealField, gain_loss: RealField) -> Result<Self> {
        ensure_same_grid(potential.grid(), gain_loss.grid())?;
        Ok(Hamiltonian {
            grid: potential.grid().clone(),
            potential,
            gain_loss,
        })
    }

    pub fn from_profiles(grid: &Arc<Grid>, v: &Profile, w: &Profile) -> Result<Self> {
        Hamiltonian::new(v.sample(grid, None)?, w.sample(grid, None)?)
    }

    pub fn from_fns(
        grid: &Arc<Grid>,
        v: impl FnMut([f64; 2]) -> f64,
        w: impl FnMut([f64; 2]) -> f64,
    ) -> Result<Self> {
        Hamiltonian::new(
            RealField::from_fn(grid.clone(), v).checked()?,
            RealField::from_fn(grid.clone(), w).checked()?,
        )
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn potential(&self) -> &RealField {
        &self.potential
    }

    pub fn gain_loss(&self) -> &RealField {
        &self.gain_loss
    }

    pub fn is_hermitian(&self) -> bool {
        self.gain_loss.values().iter().all(|&w| w == 0.0)
    }

    /// The same profiles with `W` negated, i.e. the roles of `H+` and `H-` swapped.
    pub fn mirrored(&self) -> Hamiltonian {
        Hamiltonian {
            grid: self.grid.clone(),
            potential: self.potential.clone(),
            gain_loss: RealField::from_raw(
                self.grid.clone(),
                self.gain_loss.values().iter().map(|w| -w).collect(),
            ),
        }
    }

    /// Default tolerance for [`classify_symmetry`].
    pub fn default_tolerance(&self) -> f64 {
        1e-12 * 1f64.max(self.potential.max_abs()).max(self.gain_loss.max_abs())
    }

    /// Complex diagonal `V ± iW` of `H±`.
    pub fn diagonal(&self, sign: Sign) -> Vec<C64> {
        let s = sign.value();
        self.potential
            .values()
            .iter()
            .zip(self.gain_loss.values())
            .map(|(&v, &w)| C64::new(v, s * w))
            .collect()
    }
}

/// `H± f = -½∇²f + V f ± i W f`.
pub fn apply_hamiltonian(h: &Hamiltonian, f: &ComplexField, sign: Sign) -> Result<ComplexField> {
    ensure_same_grid(h.grid(), f.grid())?;
    apply_with(h, f, sign, true)
}

/// `H∘ f = -½∇²f + V f`.
pub fn apply_hermitian_part(h: &Hamiltonian, f: &ComplexField) -> Result<ComplexField> {
    ensure_same_grid(h.grid(), f.grid())?;
    apply_with(h, f, Sign::Plus, false)
}

fn apply_with(h: &Hamiltonian, f: &ComplexField, sign: Sign, with_w: bool) -> Result<ComplexField> {
    let lap = laplacian(f);
    let s = if with_w { sign.value() } else { 0.0 };
    let out = lap
        .values()
        .iter()
        .zip(f.values())
        .zip(h.potential.values().iter().zip(h.gain_loss.values()))
        .map(|((&l, &fv), (&v, &w))| l * -0.5 + fv * C64::new(v, s * w))
        .collect();
    let mut g = ComplexField::from_raw(f.grid().clone(), out);
    g.time = f.time;
    Ok(g)
}

/// Table rows: (a) no symmetry, (b) `F H F⁻¹ = H`, (c) `F H F⁻¹ = H*`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SymmetryCase {
    #[serde(rename = "no_symmetry_a")]
    NoSymmetry,
    #[serde(rename = "f_symmetric_b")]
    FSymmetric,
    #[serde(rename = "ft_symmetric_c")]
    FtSymmetric,
}

impl SymmetryCase {
    pub fn row(self) -> char {
        match self {
            SymmetryCase::NoSymmetry => 'a',
            SymmetryCase::FSymmetric => 'b',
            SymmetryCase::FtSymmetric => 'c',
        }
    }
}

impl fmt::Display for SymmetryCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryCase::NoSymmetry => "no_symmetry_a",
            SymmetryCase::FSymmetric => "f_symmetric_b",
            SymmetryCase::FtSymmetric => "ft_symmetric_c",
        })
    }
}

/// Result of [`classify_symmetry`] with the defects that decided it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryVerdict {
    pub cases: BTreeSet<SymmetryCase>,
    /// `max |V∘F - V|`
    pub potential_defect: f64,
    /// `max |W∘F - W|`
    pub even_defect: f64,
    /// `max |W∘F + W|`
    pub odd_defect: f64,
    pub tolerance: f64,
}

impl SymmetryVerdict {
    pub fn contains(&self, case: SymmetryCase) -> bool {
        self.cases.contains(&case)
    }
}

impl fmt::Display for SymmetryVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.cases.iter().map(|c| c.row().to_string()).collect();
        write!(f, "{{{}}}", rows.join(","))
    }
}

fn max_defect(a: &RealField, b: &RealField, s: f64) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x + s * y).abs())
        .fold(0.0, f64::max)
}

/// Classifies `H` under `F`; `tol = None` uses [`Hamiltonian::default_tolerance`].
pub fn classify_symmetry(h: &Hamiltonian, f_map: &SpatialTransform, tol: Option<f64>) -> Result<SymmetryVerdict> {
    let tol = tol.unwrap_or_else(|| h.default_tolerance());
    let v_f = apply_transform_real(f_map, h.potential())?;
    let w_f = apply_transform_real(f_map, h.gain_loss())?;
    let potential_defect = max_defect(&v_f, h.potential(), -1.0);
    let even_defect = max_defect(&w_f, h.gain_loss(), -1.0);
    let odd_defect = max_defect(&w_f, h.gain_loss(), 1.0);
    let mut cases = BTreeSet::new();
    if potential_defect <= tol {
        if even_defect <= tol {
            cases.insert(SymmetryCase::FSymmetric);
        }
        if odd_defect <= tol {
            cases.insert(SymmetryCase::FtSymmetric);
        }
    }
    if cases.is_empty() {
        cases.insert(SymmetryCase::NoSymmetry);
    }
    Ok(SymmetryVerdict {
        cases,
        potential_defect,
        even_defect,
        odd_defect,
        tolerance: tol,
    })
}

/// `H̄ = ∫ ψ₋* H₊ ψ₊`.
pub fn mixed_expectation(h: &Hamiltonian, minus: &ComplexField, plus: &ComplexField) -> Result<C64> {
    inner(minus, &apply_hamiltonian(h, plus, Sign::Plus)?)
}
