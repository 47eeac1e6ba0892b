//! Generalized densities, currents and continuity residuals.
//!
//! Every pairing has the form `ρ = φ ψ`, `J = (φ ∇ψ - ψ ∇φ) / 2i` where
//! `ψ = Ψ(x, t)` and the partner `φ` depends on the kind:
//!
//! | kind            | partner `φ(x, t)`  | conserved when            |
//! |-----------------|--------------------|---------------------------|
//! | `Ordinary`      | `Ψ*(x, t)`         | `W = 0`                   |
//! | `Mixed`         | `Ψ₋*(x, t)`        | always (dual pair)        |
//! | `BitemporalT_a` | `Ψ(x, -t)`         | always                    |
//! | `BilocalF_c`    | `Ψ*(Fx, t)`        | `V∘F = V`, `W∘F = -W`     |
//! | `CombinedFT_b`  | `Ψ(Fx, -t)`        | `V∘F = V`, `W∘F = W`      |
//!
//! The gradient of a transformed partner is taken after the transform, so
//! `∇φ` means the derivative of `x ↦ Ψ(Fx)` at `x`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{divergence, gradient, integrate, Boundary, ComplexField, Grid, VectorField, C64};
use crate::hamiltonian::{classify_symmetry, Hamiltonian, SymmetryCase, SymmetryVerdict};
use crate::propagator::{StationaryState, Trajectory};
use crate::symmetry::{apply_transform, SpatialTransform};

/// Name of a pairing, without its transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PairingTag {
    #[serde(rename = "ordinary")]
    Ordinary,
    #[serde(rename = "mixed")]
    Mixed,
    #[serde(rename = "bitemporal_t_a")]
    BitemporalTa,
    #[serde(rename = "bilocal_f_c")]
    BilocalFc,
    #[serde(rename = "combined_ft_b")]
    CombinedFtb,
}

impl PairingTag {
    pub const ALL: [PairingTag; 5] = [
        PairingTag::Ordinary,
        PairingTag::Mixed,
        PairingTag::BitemporalTa,
        PairingTag::BilocalFc,
        PairingTag::CombinedFtb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PairingTag::Ordinary => "ordinary",
            PairingTag::Mixed => "mixed",
            PairingTag::BitemporalTa => "bitemporal_t_a",
            PairingTag::BilocalFc => "bilocal_f_c",
            PairingTag::CombinedFtb => "combined_ft_b",
        }
    }

    pub fn requires_transform(self) -> bool {
        matches!(self, PairingTag::BilocalFc | PairingTag::CombinedFtb)
    }

    /// Whether the pairing is conserved for `h` under the given
    /// classification. `Mixed` and `BitemporalT_a` always are.
    pub fn applies(self, h: &Hamiltonian, verdict: &SymmetryVerdict) -> bool {
        match self {
            PairingTag::Ordinary => h.is_hermitian(),
            PairingTag::Mixed | PairingTag::BitemporalTa => true,
            PairingTag::BilocalFc => verdict.contains(SymmetryCase::FtSymmetric),
            PairingTag::CombinedFtb => verdict.contains(SymmetryCase::FSymmetric),
        }
    }

    /// Attaches a transform where one is needed.
    pub fn with_transform(self, f_map: Option<&SpatialTransform>) -> Result<Pairing> {
        Ok(match self {
            PairingTag::Ordinary => Pairing::Ordinary,
            PairingTag::Mixed => Pairing::Mixed,
            PairingTag::BitemporalTa => Pairing::BitemporalTa,
            PairingTag::BilocalFc => {
                Pairing::BilocalFc(f_map.ok_or(Error::MissingTransform(self.name()))?.clone())
            }
            PairingTag::CombinedFtb => {
                Pairing::CombinedFtb(f_map.ok_or(Error::MissingTransform(self.name()))?.clone())
            }
        })
    }
}

impl fmt::Display for PairingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PairingTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PairingTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown pairing kind `{s}`")))
    }
}

/// A density/current pairing together with its spatial transform.
#[derive(Clone, Debug, PartialEq)]
pub enum Pairing {
    Ordinary,
    Mixed,
    BitemporalTa,
    BilocalFc(SpatialTransform),
    CombinedFtb(SpatialTransform),
}

impl Pairing {
    pub fn tag(&self) -> PairingTag {
        match self {
            Pairing::Ordinary => PairingTag::Ordinary,
            Pairing::Mixed => PairingTag::Mixed,
            Pairing::BitemporalTa => PairingTag::BitemporalTa,
            Pairing::BilocalFc(_) => PairingTag::BilocalFc,
            Pairing::CombinedFtb(_) => PairingTag::CombinedFtb,
        }
    }

    pub fn transform(&self) -> Option<&SpatialTransform> {
        match self {
            Pairing::BilocalFc(t) | Pairing::CombinedFtb(t) => Some(t),
            _ => None,
        }
    }

    /// Classification of `h` under this pairing's transform (identity when
    /// it has none) and whether the pairing is conserved.
    pub fn check(&self, h: &Hamiltonian) -> Result<(SymmetryVerdict, bool)> {
        let verdict = match self.transform() {
            Some(t) => classify_symmetry(h, t, None)?,
            None => {
                let id = crate::symmetry::make_transform(crate::symmetry::TransformKind::Identity, h.grid())?;
                classify_symmetry(h, &id, None)?
            }
        };
        let ok = self.tag().applies(h, &verdict);
        Ok((verdict, ok))
    }
}

/// `(φ, ψ)` for the pairing at time index `m`.
fn partners(pairing: &Pairing, traj: &Trajectory, m: i64) -> Result<(ComplexField, ComplexField)> {
    if let Some(t) = pairing.transform() {
        crate::grid::ensure_same_grid(t.grid(), traj.grid())?;
    }
    let psi = traj.primary(m)?;
    let phi = match pairing {
        Pairing::Ordinary => psi.conj(),
        Pairing::Mixed => {
            let (plus, minus) = traj.dual(m)?;
            return Ok((minus.conj(), plus));
        }
        Pairing::BitemporalTa => traj.primary(-m)?.clone(),
        Pairing::BilocalFc(f) => apply_transform(f, psi)?.conj(),
        Pairing::CombinedFtb(f) => apply_transform(f, traj.primary(-m)?)?,
    };
    Ok((phi, psi.clone()))
}

fn density_of(phi: &ComplexField, psi: &ComplexField) -> ComplexField {
    phi.zip_with(psi, |a, b| a * b).expect("partners share a grid")
}

fn current_of(phi: &ComplexField, psi: &ComplexField) -> VectorField {
    let dphi = gradient(phi);
    let dpsi = gradient(psi);
    let inv = C64::new(0.0, -0.5); // 1 / 2i
    let components = dphi
        .components()
        .iter()
        .zip(dpsi.components())
        .map(|(gp, gs)| {
            phi.values()
                .iter()
                .zip(psi.values())
                .zip(gp.iter().zip(gs))
                .map(|((f, s), (df, ds))| (f * ds - s * df) * inv)
                .collect()
        })
        .collect();
    VectorField::new(phi.grid().clone(), components).expect("component lengths match the grid")
}

pub fn pair_density(pairing: &Pairing, traj: &Trajectory, m: i64) -> Result<ComplexField> {
    let (phi, psi) = partners(pairing, traj, m)?;
    Ok(density_of(&phi, &psi).with_time(traj.time(m)))
}

pub fn pair_current(pairing: &Pairing, traj: &Trajectory, m: i64) -> Result<VectorField> {
    let (phi, psi) = partners(pairing, traj, m)?;
    Ok(current_of(&phi, &psi))
}

/// Weighted L² norm `(Σ |f|² ΔV)^{1/2}`.
pub fn l2_norm(f: &ComplexField) -> f64 {
    f.norm()
}

/// `(ρ(m+1) - ρ(m-1)) / 2dt + ∇·J(m)` and its L² norm.
///
/// Valid for `|m| ≤ M - 1`.
pub fn continuity_residual(pairing: &Pairing, traj: &Trajectory, m: i64) -> Result<(ComplexField, f64)> {
    let max = traj.half_steps() as i64 - 1;
    if m.abs() > max {
        return Err(Error::IndexOutOfRange { m, min: -max, max });
    }
    let ahead = pair_density(pairing, traj, m + 1)?;
    let behind = pair_density(pairing, traj, m - 1)?;
    let div = divergence(&pair_current(pairing, traj, m)?);
    let inv = 1.0 / (2.0 * traj.dt());
    let values = ahead
        .values()
        .iter()
        .zip(behind.values())
        .zip(div.values())
        .map(|((a, b), d)| (a - b) * inv + d)
        .collect();
    let r = ComplexField::new(traj.grid().clone(), values)?.with_time(traj.time(m));
    let norm = l2_norm(&r);
    Ok((r, norm))
}

/// Net outward flux of `J` through the Dirichlet walls.
///
/// The normal component is extrapolated to each wall (one step outside the
/// stored range) with the quadratic through the three nearest nodes.
/// Periodic axes contribute nothing.
pub fn boundary_flux(current: &VectorField) -> C64 {
    let grid = current.grid();
    let mut total = C64::new(0.0, 0.0);
    for a in 0..grid.dim() {
        let axis = grid.axis(a);
        if axis.bc == Boundary::Periodic {
            continue;
        }
        let comp = &current.components()[a];
        let n = axis.n;
        // transverse measure: product of the other spacings
        let cross: f64 = (0..grid.dim()).filter(|&b| b != a).map(|b| grid.axis(b).dx).product();
        let lines = grid.len() / n;
        for l in 0..lines {
            let at = |i: usize| -> C64 {
                let mut idx = [0usize; 2];
                idx[a] = i;
                if grid.dim() == 2 {
                    idx[1 - a] = l;
                }
                comp[grid.flatten(idx)]
            };
            let right = at(n - 1) * 3.0 - at(n - 2) * 3.0 + at(n - 3);
            let left = at(0) * 3.0 - at(1) * 3.0 + at(2);
            total += (right - left) * cross;
        }
    }
    total
}

/// Charges, fluxes and residuals of one pairing over a trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct ConservationReport {
    pub kind: PairingTag,
    pub times: Vec<f64>,
    pub charge: Vec<C64>,
    pub boundary_flux: Vec<C64>,
    /// `None` at the two ends, where no central time difference exists.
    pub residual_norm: Vec<Option<f64>>,
    /// `|ΔC/Δt + flux|` with a central difference; `None` at the ends.
    pub bookkeeping: Vec<Option<f64>>,
    pub max_residual: f64,
    /// `max |C(t) - C(0)| / |C(0)|`; absolute when `C(0) = 0`.
    pub drift: f64,
}

impl ConservationReport {
    pub fn charge_at_zero(&self) -> C64 {
        self.charge[self.charge.len() / 2]
    }

    pub fn max_bookkeeping(&self) -> f64 {
        self.bookkeeping.iter().flatten().copied().fold(0.0, f64::max)
    }
}

/// Relative spread `max |c - c(0)| / |c(0)|` of a series (absolute when the
/// reference vanishes).
pub fn relative_drift(series: &[C64], reference: C64) -> f64 {
    let scale = if reference.norm() > 0.0 { reference.norm() } else { 1.0 };
    series
        .iter()
        .map(|c| (c - reference).norm() / scale)
        .fold(0.0, f64::max)
}

pub fn charge_series(pairing: &Pairing, traj: &Trajectory) -> Result<ConservationReport> {
    let mm = traj.half_steps() as i64;
    let mut times = Vec::new();
    let mut charge = Vec::new();
    let mut flux = Vec::new();
    let mut residual = Vec::new();
    for m in -mm..=mm {
        let (phi, psi) = partners(pairing, traj, m)?;
        times.push(traj.time(m));
        charge.push(integrate(&density_of(&phi, &psi)));
        flux.push(boundary_flux(&current_of(&phi, &psi)));
        residual.push(if m.abs() < mm {
            Some(continuity_residual(pairing, traj, m)?.1)
        } else {
            None
        });
    }
    let n = charge.len();
    let bookkeeping = (0..n)
        .map(|k| {
            (k > 0 && k + 1 < n).then(|| {
                ((charge[k + 1] - charge[k - 1]) / (2.0 * traj.dt()) + flux[k]).norm()
            })
        })
        .collect();
    let c0 = charge[n / 2];
    Ok(ConservationReport {
        kind: pairing.tag(),
        times,
        drift: relative_drift(&charge, c0),
        max_residual: residual.iter().flatten().copied().fold(0.0, f64::max),
        charge,
        boundary_flux: flux,
        residual_norm: residual,
        bookkeeping,
    })
}

/// Spatial part of a bilocal or combined current for a time-independent
/// profile `Ψ(x)`, with its spread over interior points.
///
/// The spread is the diameter of the bounding box of the complex values,
/// skipping the two Dirichlet end nodes whose central difference reaches
/// into the wall.
pub fn spatial_current_profile(pairing: &Pairing, field: &ComplexField) -> Result<(VectorField, f64)> {
    let grid = field.grid();
    if grid.dim() != 1 {
        return Err(Error::NotOneDimensional);
    }
    let phi = match pairing {
        Pairing::BilocalFc(f) => {
            crate::grid::ensure_same_grid(f.grid(), grid)?;
            apply_transform(f, field)?.conj()
        }
        Pairing::CombinedFtb(f) => {
            crate::grid::ensure_same_grid(f.grid(), grid)?;
            apply_transform(f, field)?
        }
        other => {
            return Err(Error::InvalidArgument(format!(
                "stationary profiles are defined for bilocal_f_c and combined_ft_b, not {}",
                other.tag()
            )))
        }
    };
    let current = current_of(&phi, field);
    let spread = interior_spread(grid, &current.components()[0]);
    Ok((current, spread))
}

/// [`spatial_current_profile`] of a computed eigenstate.
pub fn stationary_current_profile(pairing: &Pairing, state: &StationaryState) -> Result<(VectorField, f64)> {
    spatial_current_profile(pairing, &state.field)
}

fn interior_spread(grid: &Arc<Grid>, values: &[C64]) -> f64 {
    let interior = match grid.axis(0).bc {
        Boundary::Dirichlet => &values[1..values.len() - 1],
        Boundary::Periodic => values,
    };
    let (mut lo, mut hi) = (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for v in interior {
        lo = C64::new(lo.re.min(v.re), lo.im.min(v.im));
        hi = C64::new(hi.re.max(v.re), hi.im.max(v.im));
    }
    (hi - lo).norm()
}
