//! Uniform rectilinear grids in one or two dimensions, the fields that live
//! on them, and second-order central-difference calculus.
//!
//! Dirichlet axes carry an implicit zero ghost value one step outside the
//! stored range; periodic axes wrap. All stencils are symmetric, so the
//! discrete Laplacian is a real symmetric matrix with respect to [`inner`].

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Boundary condition of one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Dirichlet => f.write_str("dirichlet"),
            Boundary::Periodic => f.write_str("periodic"),
        }
    }
}

/// One axis of a grid: `n` points at `origin + i * dx`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub n: usize,
    pub dx: f64,
    pub origin: f64,
    pub bc: Boundary,
}

impl Axis {
    pub fn new(n: usize, dx: f64, origin: f64, bc: Boundary) -> Result<Self> {
        let axis = Axis { n, dx, origin, bc };
        axis.validate()?;
        Ok(axis)
    }

    /// Dirichlet axis whose stored points run from `min` to `max` inclusive.
    pub fn dirichlet(min: f64, max: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 4 points, got {n}")));
        }
        Axis::new(n, (max - min) / (n - 1) as f64, min, Boundary::Dirichlet)
    }

    /// Periodic axis of period `length` starting at `origin`.
    pub fn periodic(origin: f64, length: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("need at least 4 points, got 0".into()));
        }
        Axis::new(n, length / n as f64, origin, Boundary::Periodic)
    }

    fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidGrid(format!(
                "need at least 4 points per axis, got {}",
                self.n
            )));
        }
        if !(self.dx.is_finite() && self.dx > 0.0) {
            return Err(Error::InvalidGrid(format!("spacing must be positive, got {}", self.dx)));
        }
        if !self.origin.is_finite() {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.dx
    }

    /// Natural symmetry center: the midpoint of the stored points for
    /// Dirichlet axes, the midpoint of the period cell for periodic ones.
    pub fn center(&self) -> f64 {
        match self.bc {
            Boundary::Dirichlet => self.origin + (self.n - 1) as f64 * self.dx / 2.0,
            Boundary::Periodic => self.origin + self.n as f64 * self.dx / 2.0,
        }
    }

    /// Period for periodic axes; wall-to-wall distance for Dirichlet axes.
    pub fn length(&self) -> f64 {
        match self.bc {
            Boundary::Dirichlet => (self.n + 1) as f64 * self.dx,
            Boundary::Periodic => self.n as f64 * self.dx,
        }
    }

    /// Same domain with half the spacing. Dirichlet walls stay put, so old
    /// point `i` becomes point `2i + 1`; periodic point `i` becomes `2i`.
    pub fn refined(&self) -> Axis {
        let dx = self.dx / 2.0;
        match self.bc {
            Boundary::Dirichlet => Axis {
                n: 2 * self.n + 1,
                dx,
                origin: self.origin - dx,
                ..*self
            },
            Boundary::Periodic => Axis {
                n: 2 * self.n,
                dx,
                ..*self
            },
        }
    }
}

/// A rectilinear 1D or 2D grid. Values are stored row-major with axis 0
/// varying slowest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Axis>", into = "Vec<Axis>")]
pub struct Grid {
    axes: Vec<Axis>,
}

impl TryFrom<Vec<Axis>> for Grid {
    type Error = Error;

    fn try_from(axes: Vec<Axis>) -> Result<Self> {
        Grid::new(axes)
    }
}

impl From<Grid> for Vec<Axis> {
    fn from(g: Grid) -> Self {
        g.axes
    }
}

impl Grid {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {}",
                axes.len()
            )));
        }
        for a in &axes {
            a.validate()?;
        }
        Ok(Grid { axes })
    }

    pub fn line(axis: Axis) -> Self {
        Grid { axes: vec![axis] }
    }

    pub fn plane(x: Axis, y: Axis) -> Self {
        Grid { axes: vec![x, y] }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, a: usize) -> &Axis {
        &self.axes[a]
    }

    /// Total number of points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.dx).product()
    }

    pub fn is_periodic(&self) -> bool {
        self.axes.iter().all(|a| a.bc == Boundary::Periodic)
    }

    /// Flat-index stride of axis `a`.
    pub fn stride(&self, a: usize) -> usize {
        self.axes[a + 1..].iter().map(|ax| ax.n).product()
    }

    /// Per-axis indices of flat index `p` (unused slot is 0 in 1D).
    pub fn unflatten(&self, p: usize) -> [usize; 2] {
        match self.dim() {
            1 => [p, 0],
            _ => [p / self.axes[1].n, p % self.axes[1].n],
        }
    }

    pub fn flatten(&self, idx: [usize; 2]) -> usize {
        match self.dim() {
            1 => idx[0],
            _ => idx[0] * self.axes[1].n + idx[1],
        }
    }

    /// Coordinates of flat index `p` (unused slot is 0 in 1D).
    pub fn coords(&self, p: usize) -> [f64; 2] {
        let idx = self.unflatten(p);
        let mut x = [0.0; 2];
        for (a, axis) in self.axes.iter().enumerate() {
            x[a] = axis.coord(idx[a]);
        }
        x
    }

    pub fn refined(&self) -> Grid {
        Grid {
            axes: self.axes.iter().map(Axis::refined).collect(),
        }
    }

    /// Neighbor of `p` one step along axis `a` in direction `dir` (±1);
    /// `None` for the Dirichlet ghost point.
    #[inline]
    pub fn neighbor(&self, p: usize, a: usize, dir: i8) -> Option<usize> {
        let axis = &self.axes[a];
        let s = self.stride(a);
        let i = (p / s) % axis.n;
        match (dir > 0, axis.bc) {
            (true, _) if i + 1 < axis.n => Some(p + s),
            (true, Boundary::Periodic) => Some(p + s - axis.n * s),
            (false, _) if i > 0 => Some(p - s),
            (false, Boundary::Periodic) => Some(p + (axis.n - 1) * s),
            _ => None,
        }
    }
}

/// Complex samples on a grid at one time instant.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: Arc<Grid>,
    values: Vec<C64>,
    pub time: Option<f64>,
}

impl ComplexField {
    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        ComplexField {
            grid,
            values: vec![C64::new(0.0, 0.0); n],
            time: None,
        }
    }

    pub fn new(grid: Arc<Grid>, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(ComplexField {
            grid,
            values,
            time: None,
        })
    }

    /// Samples `f` at every grid point; `f` receives the coordinates.
    pub fn from_fn(grid: Arc<Grid>, mut f: impl FnMut([f64; 2]) -> C64) -> Self {
        let values = (0..grid.len()).map(|p| f(grid.coords(p))).collect();
        ComplexField {
            grid,
            values,
            time: None,
        }
    }

    pub(crate) fn from_raw(grid: Arc<Grid>, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ComplexField {
            grid,
            values,
            time: None,
        }
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete L² norm, `sqrt(inner(f, f))`.
    pub fn norm(&self) -> f64 {
        let sq: Vec<C64> = self.values.iter().map(|v| C64::new(v.norm_sqr(), 0.0)).collect();
        (pairwise_sum(&sq).re * self.grid.cell_volume()).sqrt()
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|v| v * s)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        ComplexField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            time: self.time,
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &ComplexField, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid)?;
        Ok(ComplexField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            time: self.time,
        })
    }

    pub fn re(&self) -> RealField {
        RealField::from_raw(self.grid.clone(), self.values.iter().map(|v| v.re).collect())
    }

    pub fn im(&self) -> RealField {
        RealField::from_raw(self.grid.clone(), self.values.iter().map(|v| v.im).collect())
    }
}

impl Add for &ComplexField {
    type Output = ComplexField;

    fn add(self, rhs: &ComplexField) -> ComplexField {
        self.zip_with(rhs, |a, b| a + b).expect("grid mismatch in field addition")
    }
}

impl Sub for &ComplexField {
    type Output = ComplexField;

    fn sub(self, rhs: &ComplexField) -> ComplexField {
        self.zip_with(rhs, |a, b| a - b).expect("grid mismatch in field subtraction")
    }
}

impl Mul<C64> for &ComplexField {
    type Output = ComplexField;

    fn mul(self, rhs: C64) -> ComplexField {
        self.scale(rhs)
    }
}

/// Real samples on a grid: potentials, gain/loss profiles, Lagrangian densities.
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl RealField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(RealField { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let n = grid.len();
        RealField {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: Arc<Grid>, mut f: impl FnMut([f64; 2]) -> f64) -> Self {
        let values = (0..grid.len()).map(|p| f(grid.coords(p))).collect();
        RealField { grid, values }
    }

    pub(crate) fn from_raw(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        RealField { grid, values }
    }

    /// Fails with [`Error::NonFinite`] if any sample is NaN or infinite.
    pub fn checked(self) -> Result<Self> {
        match self.values.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(self),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn to_complex(&self) -> ComplexField {
        ComplexField::from_raw(
            self.grid.clone(),
            self.values.iter().map(|&v| C64::new(v, 0.0)).collect(),
        )
    }

    pub fn integrate(&self) -> f64 {
        integrate(&self.to_complex()).re
    }
}

/// One complex component array per spatial axis.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    grid: Arc<Grid>,
    components: Vec<Vec<C64>>,
}

impl VectorField {
    pub fn new(grid: Arc<Grid>, components: Vec<Vec<C64>>) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(Error::InvalidGrid(format!(
                "vector field needs {} components, got {}",
                grid.dim(),
                components.len()
            )));
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::LengthMismatch {
                    expected: grid.len(),
                    actual: c.len(),
                });
            }
        }
        Ok(VectorField { grid, components })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn components(&self) -> &[Vec<C64>] {
        &self.components
    }

    pub fn component(&self, a: usize) -> ComplexField {
        ComplexField::from_raw(self.grid.clone(), self.components[a].clone())
    }

    /// Pointwise combination, component by component.
    pub fn zip_with(&self, other: &VectorField, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        Ok(VectorField {
            grid: self.grid.clone(),
            components,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn ensure_same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

#[inline]
fn shifted(grid: &Grid, values: &[C64], p: usize, a: usize, dir: i8) -> C64 {
    grid.neighbor(p, a, dir)
        .map_or(C64::new(0.0, 0.0), |q| values[q])
}

fn central_difference(grid: &Grid, values: &[C64], a: usize) -> Vec<C64> {
    let inv = 1.0 / (2.0 * grid.axis(a).dx);
    (0..values.len())
        .map(|p| (shifted(grid, values, p, a, 1) - shifted(grid, values, p, a, -1)) * inv)
        .collect()
}

/// Central second-order gradient, one component per axis.
pub fn gradient(f: &ComplexField) -> VectorField {
    let grid = f.grid();
    let components = (0..grid.dim())
        .map(|a| central_difference(grid, f.values(), a))
        .collect();
    VectorField {
        grid: grid.clone(),
        components,
    }
}

/// Sum over axes of the central difference of each component.
pub fn divergence(v: &VectorField) -> ComplexField {
    let grid = v.grid();
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    for (a, comp) in v.components().iter().enumerate() {
        for (o, d) in out.iter_mut().zip(central_difference(grid, comp, a)) {
            *o += d;
        }
    }
    ComplexField::from_raw(grid.clone(), out)
}

/// 3-point (1D) / 5-point (2D) Laplacian.
pub fn laplacian(f: &ComplexField) -> ComplexField {
    let grid = f.grid();
    let vals = f.values();
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    for a in 0..grid.dim() {
        let inv = 1.0 / (grid.axis(a).dx * grid.axis(a).dx);
        for (p, o) in out.iter_mut().enumerate() {
            let s = shifted(grid, vals, p, a, 1) + shifted(grid, vals, p, a, -1);
            *o += (s - vals[p] * 2.0) * inv;
        }
    }
    ComplexField::from_raw(grid.clone(), out)
}

/// Quadrature over the grid: `Σ f · Π dx`, summed pairwise in a fixed order.
///
/// The zero-valued Dirichlet walls sit one step outside the stored range,
/// so the trapezoid rule over the closed domain gives every stored point
/// the full weight.
pub fn integrate(f: &ComplexField) -> C64 {
    pairwise_sum(f.values()) * f.grid().cell_volume()
}

/// `integrate(conj(f) · g)`.
pub fn inner(f: &ComplexField, g: &ComplexField) -> Result<C64> {
    ensure_same_grid(f.grid(), g.grid())?;
    let prod: Vec<C64> = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a.conj() * b)
        .collect();
    Ok(pairwise_sum(&prod) * f.grid().cell_volume())
}

/// Deterministic pairwise summation (left-to-right below 8 terms).
pub fn pairwise_sum(xs: &[C64]) -> C64 {
    if xs.len() <= 8 {
        xs.iter().fold(C64::new(0.0, 0.0), |acc, &x| acc + x)
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}
