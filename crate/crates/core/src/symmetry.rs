//! Grid-exact spatial transformations realized as index permutations.
//!
//! A transform `F` acts on fields by `apply(F, f)(x) = f(Fx)`. Only maps that
//! send lattice points to lattice points are constructible, so every identity
//! involving `F` holds without interpolation error.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Boundary, ComplexField, Grid, RealField};

#[derive(Clone, Debug, PartialEq)]
pub enum TransformKind {
    Identity,
    /// Point inversion `x -> 2c - x` through `center` (one entry per axis).
    Parity { center: Vec<f64> },
    /// `x -> x + offset * dx` on periodic axes.
    Translation { offset: Vec<i64> },
    /// Rotation by `quarter_turns * 90°` about the grid center (2D, square).
    Rotation90 { quarter_turns: u8 },
    Composite,
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformKind::Identity => write!(f, "identity"),
            TransformKind::Parity { center } => write!(f, "parity{center:?}"),
            TransformKind::Translation { offset } => write!(f, "translation{offset:?}"),
            TransformKind::Rotation90 { quarter_turns } => write!(f, "rotation90x{quarter_turns}"),
            TransformKind::Composite => write!(f, "composite"),
        }
    }
}

/// Scenario-file form of a transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSpec {
    pub kind: TransformName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quarter_turns: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformName {
    Identity,
    Parity,
    Translation,
    Rotation90,
}

impl TransformSpec {
    pub fn identity() -> Self {
        TransformSpec {
            kind: TransformName::Identity,
            offset: None,
            quarter_turns: None,
            center: None,
        }
    }

    pub fn build(&self, grid: &Arc<Grid>) -> Result<SpatialTransform> {
        let kind = match self.kind {
            TransformName::Identity => TransformKind::Identity,
            TransformName::Parity => TransformKind::Parity {
                center: match &self.center {
                    Some(c) => c.clone(),
                    None => grid.axes().iter().map(|a| a.center()).collect(),
                },
            },
            TransformName::Translation => {
                let raw = self
                    .offset
                    .as_ref()
                    .ok_or_else(|| Error::Config("translation needs an `offset`".into()))?;
                let mut offset = Vec::with_capacity(raw.len());
                for (axis, &value) in raw.iter().enumerate() {
                    if value.fract() != 0.0 || !value.is_finite() {
                        return Err(Error::NonIntegerOffset { axis, value });
                    }
                    offset.push(value as i64);
                }
                TransformKind::Translation { offset }
            }
            TransformName::Rotation90 => {
                let k = self.quarter_turns.unwrap_or(1);
                if !(1..=3).contains(&k) {
                    return Err(Error::Config(format!("quarter_turns must be 1, 2 or 3, got {k}")));
                }
                TransformKind::Rotation90 {
                    quarter_turns: k as u8,
                }
            }
        };
        make_transform(kind, grid)
    }
}

/// A validated bijection of grid indices.
#[derive(Clone, Debug)]
pub struct SpatialTransform {
    kind: TransformKind,
    grid: Arc<Grid>,
    perm: Vec<usize>,
}

impl PartialEq for SpatialTransform {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.perm == other.perm
    }
}

impl SpatialTransform {
    pub fn kind(&self) -> &TransformKind {
        &self.kind
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// `permutation()[i]` is the flat index of `F x_i`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Smallest `k ≥ 1` with `F^k = I`.
    pub fn order(&self) -> usize {
        let mut cur = self.clone();
        let mut k = 1;
        while !cur.is_identity() {
            cur = compose(&cur, self).expect("same grid");
            k += 1;
        }
        k
    }
}

/// Index of `2c - i` along one axis, where `twice_c = 2c` in index units.
fn reflect_index(i: usize, twice_c: i64, n: usize, bc: Boundary) -> Option<usize> {
    let j = twice_c - i as i64;
    match bc {
        Boundary::Periodic => Some(j.rem_euclid(n as i64) as usize),
        Boundary::Dirichlet => (0..n as i64).contains(&j).then_some(j as usize),
    }
}

/// Twice the center position in index units, when it lands on the half-lattice.
fn twice_center_index(grid: &Grid, a: usize, center: f64) -> Result<i64> {
    let axis = grid.axis(a);
    let t = 2.0 * (center - axis.origin) / axis.dx;
    let r = t.round();
    if (t - r).abs() > 1e-9 * t.abs().max(1.0) {
        return Err(Error::IncompatibleGrid(format!(
            "parity center {center} on axis {a} is not on the half-lattice"
        )));
    }
    let r = r as i64;
    if axis.bc == Boundary::Dirichlet && r != axis.n as i64 - 1 {
        return Err(Error::IncompatibleGrid(format!(
            "parity center {center} on Dirichlet axis {a} must be the grid midpoint {}",
            axis.center()
        )));
    }
    Ok(r)
}

/// Builds and validates the permutation for `kind` on `grid`.
pub fn make_transform(kind: TransformKind, grid: &Arc<Grid>) -> Result<SpatialTransform> {
    let n = grid.len();
    let perm: Vec<usize> = match &kind {
        TransformKind::Identity => (0..n).collect(),
        TransformKind::Parity { center } => {
            if center.len() != grid.dim() {
                return Err(Error::IncompatibleGrid(format!(
                    "parity center has {} coordinates on a {}D grid",
                    center.len(),
                    grid.dim()
                )));
            }
            let twice: Vec<i64> = (0..grid.dim())
                .map(|a| twice_center_index(grid, a, center[a]))
                .collect::<Result<_>>()?;
            (0..n)
                .map(|p| {
                    let idx = grid.unflatten(p);
                    let mut out = [0usize; 2];
                    for a in 0..grid.dim() {
                        let ax = grid.axis(a);
                        out[a] = reflect_index(idx[a], twice[a], ax.n, ax.bc)
                            .expect("midpoint reflection stays on the grid");
                    }
                    grid.flatten(out)
                })
                .collect()
        }
        TransformKind::Translation { offset } => {
            if offset.len() != grid.dim() {
                return Err(Error::IncompatibleGrid(format!(
                    "translation offset has {} entries on a {}D grid",
                    offset.len(),
                    grid.dim()
                )));
            }
            for (a, &o) in offset.iter().enumerate() {
                if o != 0 && grid.axis(a).bc != Boundary::Periodic {
                    return Err(Error::IncompatibleGrid(format!(
                        "translation along non-periodic axis {a}"
                    )));
                }
            }
            (0..n)
                .map(|p| {
                    let idx = grid.unflatten(p);
                    let mut out = [0usize; 2];
                    for a in 0..grid.dim() {
                        let na = grid.axis(a).n as i64;
                        out[a] = (idx[a] as i64 + offset[a]).rem_euclid(na) as usize;
                    }
                    grid.flatten(out)
                })
                .collect()
        }
        TransformKind::Rotation90 { quarter_turns } => {
            if grid.dim() != 2 {
                return Err(Error::IncompatibleGrid("rotation needs a 2D grid".into()));
            }
            let (ax, ay) = (grid.axis(0), grid.axis(1));
            if ax.n != ay.n || ax.dx != ay.dx || ax.bc != ay.bc {
                return Err(Error::IncompatibleGrid(
                    "rotation needs a square grid (equal n, dx and boundary on both axes)".into(),
                ));
            }
            if !(1..=3).contains(quarter_turns) {
                return Err(Error::IncompatibleGrid(format!(
                    "quarter_turns must be 1..=3, got {quarter_turns}"
                )));
            }
            // Rotate about the natural center of each axis; both axes must
            // share the same center offset in index units.
            let tx = twice_center_index(grid, 0, ax.center())?;
            let ty = twice_center_index(grid, 1, ay.center())?;
            if tx != ty {
                return Err(Error::IncompatibleGrid("axes have different centers".into()));
            }
            let nn = ax.n;
            let bc = ax.bc;
            // (x, y) -> (-y, x) about the center, applied k times.
            let quarter = |i: usize, j: usize| {
                (
                    reflect_index(j, tx, nn, bc).expect("square grid"),
                    i,
                )
            };
            (0..n)
                .map(|p| {
                    let [mut i, mut j] = grid.unflatten(p);
                    for _ in 0..*quarter_turns {
                        (i, j) = quarter(i, j);
                    }
                    grid.flatten([i, j])
                })
                .collect()
        }
        TransformKind::Composite => {
            return Err(Error::IncompatibleGrid(
                "composite transforms come from compose(), not construction".into(),
            ))
        }
    };
    check_bijection(&perm)?;
    Ok(SpatialTransform {
        kind,
        grid: grid.clone(),
        perm,
    })
}

fn check_bijection(perm: &[usize]) -> Result<()> {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::IncompatibleGrid("map is not a bijection".into()));
        }
    }
    Ok(())
}

/// `apply(F, f)(x) = f(Fx)`.
pub fn apply_transform(f_map: &SpatialTransform, f: &ComplexField) -> Result<ComplexField> {
    crate::grid::ensure_same_grid(&f_map.grid, f.grid())?;
    let vals = f.values();
    let out = f_map.perm.iter().map(|&p| vals[p]).collect();
    let mut g = ComplexField::from_raw(f.grid().clone(), out);
    g.time = f.time;
    Ok(g)
}

pub fn apply_transform_real(f_map: &SpatialTransform, f: &RealField) -> Result<RealField> {
    crate::grid::ensure_same_grid(&f_map.grid, f.grid())?;
    let vals = f.values();
    Ok(RealField::from_raw(
        f.grid().clone(),
        f_map.perm.iter().map(|&p| vals[p]).collect(),
    ))
}

pub fn invert(f_map: &SpatialTransform) -> SpatialTransform {
    let mut inv = vec![0; f_map.perm.len()];
    for (i, &p) in f_map.perm.iter().enumerate() {
        inv[p] = i;
    }
    let kind = match &f_map.kind {
        TransformKind::Identity => TransformKind::Identity,
        TransformKind::Parity { center } => TransformKind::Parity {
            center: center.clone(),
        },
        TransformKind::Translation { offset } => TransformKind::Translation {
            offset: offset.iter().map(|o| -o).collect(),
        },
        TransformKind::Rotation90 { quarter_turns } => TransformKind::Rotation90 {
            quarter_turns: 4 - quarter_turns,
        },
        TransformKind::Composite => TransformKind::Composite,
    };
    SpatialTransform {
        kind,
        grid: f_map.grid.clone(),
        perm: inv,
    }
}

/// The transform with `apply(compose(F, G), f) = apply(F, apply(G, f))`,
/// i.e. `x -> G(F x)`.
pub fn compose(f_map: &SpatialTransform, g_map: &SpatialTransform) -> Result<SpatialTransform> {
    crate::grid::ensure_same_grid(&f_map.grid, &g_map.grid)?;
    let perm: Vec<usize> = f_map.perm.iter().map(|&p| g_map.perm[p]).collect();
    let grid = f_map.grid.clone();
    let identity = perm.iter().enumerate().all(|(i, &p)| i == p);
    let kind = if identity {
        TransformKind::Identity
    } else {
        match (&f_map.kind, &g_map.kind) {
            (TransformKind::Identity, k) | (k, TransformKind::Identity) => k.clone(),
            (TransformKind::Translation { offset: a }, TransformKind::Translation { offset: b }) => {
                let offset = a
                    .iter()
                    .zip(b)
                    .enumerate()
                    .map(|(ax, (x, y))| (x + y).rem_euclid(grid.axis(ax).n as i64))
                    .collect();
                TransformKind::Translation { offset }
            }
            (
                TransformKind::Rotation90 { quarter_turns: a },
                TransformKind::Rotation90 { quarter_turns: b },
            ) => TransformKind::Rotation90 {
                quarter_turns: (a + b) % 4,
            },
            _ => TransformKind::Composite,
        }
    };
    Ok(SpatialTransform { kind, grid, perm })
}
