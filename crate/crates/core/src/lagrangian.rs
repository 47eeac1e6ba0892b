//! Two-field Lagrangian `L = Re[Ψ₋* (i∂ₜ - H) Ψ₊]` and the identities that
//! follow from it, evaluated on sampled data.
//!
//! Time derivatives always come from central differences of stored
//! snapshots, never from the equations of motion.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::conservation::{continuity_residual, Pairing};
use crate::error::{Error, Result};
use crate::grid::{divergence, ensure_same_grid, gradient, ComplexField, Grid, RealField, C64};
use crate::hamiltonian::{apply_hamiltonian, apply_hermitian_part, Hamiltonian, Sign};
use crate::propagator::Trajectory;

/// Global dilatation `φr` and phase `φi`, with `φ = φr + iφi`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseDilation {
    pub re: f64,
    pub im: f64,
}

impl PhaseDilation {
    pub fn new(re: f64, im: f64) -> Self {
        PhaseDilation { re, im }
    }

    fn factor(self, sign: Sign) -> C64 {
        C64::new(sign.value() * self.re, self.im).exp()
    }
}

/// Pointwise `Re[ψ₋* (i ∂ₜψ₊ - H₊ψ₊)]`.
pub fn two_field_lagrangian_density(
    h: &Hamiltonian,
    plus: &ComplexField,
    minus: &ComplexField,
    dt_plus: &ComplexField,
) -> Result<RealField> {
    ensure_same_grid(plus.grid(), minus.grid())?;
    ensure_same_grid(plus.grid(), dt_plus.grid())?;
    let hp = apply_hamiltonian(h, plus, Sign::Plus)?;
    let values = minus
        .values()
        .iter()
        .zip(dt_plus.values())
        .zip(hp.values())
        .map(|((m, d), hv)| (m.conj() * (C64::i() * d - hv)).re)
        .collect();
    RealField::new(plus.grid().clone(), values)
}

/// Single-field `Re[ψ* (i ∂ₜψ - H∘ψ)]`, written in real components.
pub fn single_field_lagrangian_density(
    h: &Hamiltonian,
    psi: &ComplexField,
    dt_psi: &ComplexField,
) -> Result<RealField> {
    ensure_same_grid(psi.grid(), dt_psi.grid())?;
    let hr = apply_hermitian_part(h, &psi.re().to_complex())?;
    let hi = apply_hermitian_part(h, &psi.im().to_complex())?;
    let values = (0..psi.len())
        .map(|p| {
            let (r, i) = (psi.values()[p].re, psi.values()[p].im);
            let (dr, di) = (dt_psi.values()[p].re, dt_psi.values()[p].im);
            i * (dr - hi.values()[p].re) - r * (di + hr.values()[p].re)
        })
        .collect();
    RealField::new(psi.grid().clone(), values)
}

/// `ψ± ↦ e^{±φr} R(φi) ψ±`, applied to real and imaginary parts with the
/// rotation matrix.
pub fn apply_phase_dilation(p: PhaseDilation, plus: &ComplexField, minus: &ComplexField) -> (ComplexField, ComplexField) {
    let (s, c) = p.im.sin_cos();
    let act = |f: &ComplexField, sign: f64| {
        let scale = (sign * p.re).exp();
        f.map(|z| C64::new(scale * (c * z.re - s * z.im), scale * (s * z.re + c * z.im)))
    };
    (act(plus, 1.0), act(minus, -1.0))
}

/// The same map as [`apply_phase_dilation`] through `e^{±φr + iφi}`.
pub fn apply_phase_dilation_complex(
    p: PhaseDilation,
    plus: &ComplexField,
    minus: &ComplexField,
) -> (ComplexField, ComplexField) {
    (plus.scale(p.factor(Sign::Plus)), minus.scale(p.factor(Sign::Minus)))
}

/// Central difference `(f(m+1) - f(m-1)) / 2dt` of a trajectory slot.
fn time_derivative(next: &ComplexField, prev: &ComplexField, dt: f64) -> ComplexField {
    let inv = 1.0 / (2.0 * dt);
    next.zip_with(prev, |a, b| (a - b) * inv).expect("snapshots share a grid")
}

fn check_interior(traj: &Trajectory, m: i64) -> Result<()> {
    let max = traj.half_steps() as i64 - 1;
    if m.abs() > max {
        return Err(Error::IndexOutOfRange { m, min: -max, max });
    }
    Ok(())
}

/// `(ψ₊, ψ₋, ∂ₜψ₊)` at an interior time index.
fn lagrangian_inputs(traj: &Trajectory, m: i64) -> Result<(ComplexField, ComplexField, ComplexField)> {
    check_interior(traj, m)?;
    let (plus, minus) = traj.dual(m)?;
    let (next, _) = traj.dual(m + 1)?;
    let (prev, _) = traj.dual(m - 1)?;
    Ok((plus, minus, time_derivative(&next, &prev, traj.dt())))
}

/// `∫ L` at time index `m`.
pub fn lagrangian_integral(h: &Hamiltonian, traj: &Trajectory, m: i64) -> Result<f64> {
    let (plus, minus, dplus) = lagrangian_inputs(traj, m)?;
    Ok(two_field_lagrangian_density(h, &plus, &minus, &dplus)?.integrate())
}

/// Change of `∫ L` under the transformation, with its natural scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Invariance {
    /// `|∫ L̃ - ∫ L|`
    pub absolute: f64,
    /// `∫ |ψ₋* (i∂ₜψ₊ - H₊ψ₊)|`, the size of the terms being summed.
    pub scale: f64,
}

impl Invariance {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.absolute / self.scale
        } else {
            self.absolute
        }
    }
}

/// Invariance check on explicit fields. `∂ₜψ₊` is transformed like `ψ₊`.
pub fn invariance_residual_fields(
    h: &Hamiltonian,
    plus: &ComplexField,
    minus: &ComplexField,
    dt_plus: &ComplexField,
    p: PhaseDilation,
) -> Result<Invariance> {
    let before = two_field_lagrangian_density(h, plus, minus, dt_plus)?.integrate();
    let (tp, tm) = apply_phase_dilation(p, plus, minus);
    let (tdp, _) = apply_phase_dilation(p, dt_plus, minus);
    let after = two_field_lagrangian_density(h, &tp, &tm, &tdp)?.integrate();
    let hp = apply_hamiltonian(h, plus, Sign::Plus)?;
    let terms: Vec<f64> = minus
        .values()
        .iter()
        .zip(dt_plus.values())
        .zip(hp.values())
        .map(|((m, d), hv)| (m.conj() * (C64::i() * d - hv)).norm())
        .collect();
    let scale = RealField::new(plus.grid().clone(), terms)?.integrate();
    Ok(Invariance {
        absolute: (after - before).abs(),
        scale,
    })
}

/// Invariance check at time index `m` of a trajectory.
pub fn invariance_residual(h: &Hamiltonian, traj: &Trajectory, p: PhaseDilation, m: i64) -> Result<Invariance> {
    let (plus, minus, dplus) = lagrangian_inputs(traj, m)?;
    invariance_residual_fields(h, &plus, &minus, &dplus, p)
}

/// L² norms of the four real Euler–Lagrange residuals at `m`:
/// `∂ₜΨʳ± - (H∘Ψⁱ± ± WΨʳ±)` and `∂ₜΨⁱ± - (-H∘Ψʳ± ± WΨⁱ±)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EulerLagrange {
    pub re_plus: f64,
    pub im_plus: f64,
    pub re_minus: f64,
    pub im_minus: f64,
}

impl EulerLagrange {
    pub fn as_array(&self) -> [f64; 4] {
        [self.re_plus, self.im_plus, self.re_minus, self.im_minus]
    }

    pub fn max(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }
}

fn real_l2(grid: &Grid, values: &[f64]) -> f64 {
    (values.iter().map(|v| v * v).sum::<f64>() * grid.cell_volume()).sqrt()
}

/// Residual fields `(Re, Im)` of the component equations for one sign.
fn euler_lagrange_fields(
    h: &Hamiltonian,
    sign: Sign,
    field: &ComplexField,
    dfield: &ComplexField,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let hr = apply_hermitian_part(h, &field.re().to_complex())?;
    let hi = apply_hermitian_part(h, &field.im().to_complex())?;
    let w = h.gain_loss().values();
    let s = sign.value();
    let (mut rr, mut ri) = (Vec::with_capacity(field.len()), Vec::with_capacity(field.len()));
    for p in 0..field.len() {
        let (r, i) = (field.values()[p].re, field.values()[p].im);
        let d = dfield.values()[p];
        rr.push(d.re - (hi.values()[p].re + s * w[p] * r));
        ri.push(d.im - (-hr.values()[p].re + s * w[p] * i));
    }
    Ok((rr, ri))
}

pub fn euler_lagrange_residual(h: &Hamiltonian, traj: &Trajectory, m: i64) -> Result<EulerLagrange> {
    check_interior(traj, m)?;
    ensure_same_grid(h.grid(), traj.grid())?;
    let (plus, minus) = traj.dual(m)?;
    let (np, nm) = traj.dual(m + 1)?;
    let (pp, pm) = traj.dual(m - 1)?;
    let g = traj.grid();
    let (a, b) = euler_lagrange_fields(h, Sign::Plus, &plus, &time_derivative(&np, &pp, traj.dt()))?;
    let (c, d) = euler_lagrange_fields(h, Sign::Minus, &minus, &time_derivative(&nm, &pm, traj.dt()))?;
    Ok(EulerLagrange {
        re_plus: real_l2(g, &a),
        im_plus: real_l2(g, &b),
        re_minus: real_l2(g, &c),
        im_minus: real_l2(g, &d),
    })
}

/// Residuals of the two real continuity equations obtained from phase and
/// dilatation invariance.
#[derive(Clone, Debug)]
pub struct SplitResiduals {
    /// `∂ₜ(Ψʳ₋Ψʳ₊ + Ψⁱ₋Ψⁱ₊) + ½∇·[Ψʳ₊∇Ψⁱ₋ - Ψⁱ₋∇Ψʳ₊ + Ψʳ₋∇Ψⁱ₊ - Ψⁱ₊∇Ψʳ₋]`
    pub phase: RealField,
    /// `∂ₜ(Ψʳ₋Ψⁱ₊ - Ψⁱ₋Ψʳ₊) - ½∇·[Ψʳ₋∇Ψʳ₊ - Ψʳ₊∇Ψʳ₋ + Ψⁱ₋∇Ψⁱ₊ - Ψⁱ₊∇Ψⁱ₋]`
    pub dilatation: RealField,
    pub phase_norm: f64,
    pub dilatation_norm: f64,
    /// `max |r_phase + i r_dilatation - r_mixed|` over the grid.
    pub reconstruction_defect: f64,
}

struct Parts {
    rp: Vec<f64>,
    ip: Vec<f64>,
    rm: Vec<f64>,
    im: Vec<f64>,
}

impl Parts {
    fn of(plus: &ComplexField, minus: &ComplexField) -> Parts {
        Parts {
            rp: plus.values().iter().map(|z| z.re).collect(),
            ip: plus.values().iter().map(|z| z.im).collect(),
            rm: minus.values().iter().map(|z| z.re).collect(),
            im: minus.values().iter().map(|z| z.im).collect(),
        }
    }

    fn densities(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.rp.len();
        let phase = (0..n).map(|p| self.rm[p] * self.rp[p] + self.im[p] * self.ip[p]).collect();
        let dil = (0..n).map(|p| self.rm[p] * self.ip[p] - self.im[p] * self.rp[p]).collect();
        (phase, dil)
    }
}

fn real_gradient(grid: &Arc<Grid>, v: &[f64]) -> Vec<Vec<f64>> {
    let f = ComplexField::new(grid.clone(), v.iter().map(|&x| C64::new(x, 0.0)).collect())
        .expect("finite real field");
    gradient(&f)
        .components()
        .iter()
        .map(|c| c.iter().map(|z| z.re).collect())
        .collect()
}

fn real_divergence(grid: &Arc<Grid>, comps: Vec<Vec<f64>>) -> Vec<f64> {
    let v = crate::grid::VectorField::new(
        grid.clone(),
        comps
            .into_iter()
            .map(|c| c.into_iter().map(|x| C64::new(x, 0.0)).collect())
            .collect(),
    )
    .expect("component lengths match");
    divergence(&v).values().iter().map(|z| z.re).collect()
}

pub fn split_continuity_residuals(traj: &Trajectory, m: i64) -> Result<SplitResiduals> {
    check_interior(traj, m)?;
    let grid = traj.grid().clone();
    let (plus, minus) = traj.dual(m)?;
    let (np, nm) = traj.dual(m + 1)?;
    let (pp, pm) = traj.dual(m - 1)?;
    let (ahead_phase, ahead_dil) = Parts::of(&np, &nm).densities();
    let (behind_phase, behind_dil) = Parts::of(&pp, &pm).densities();

    let now = Parts::of(&plus, &minus);
    let g_rp = real_gradient(&grid, &now.rp);
    let g_ip = real_gradient(&grid, &now.ip);
    let g_rm = real_gradient(&grid, &now.rm);
    let g_im = real_gradient(&grid, &now.im);
    let n = grid.len();
    let mut phase_current = Vec::new();
    let mut dil_current = Vec::new();
    for a in 0..grid.dim() {
        phase_current.push(
            (0..n)
                .map(|p| {
                    0.5 * (now.rp[p] * g_im[a][p] - now.im[p] * g_rp[a][p] + now.rm[p] * g_ip[a][p]
                        - now.ip[p] * g_rm[a][p])
                })
                .collect::<Vec<f64>>(),
        );
        dil_current.push(
            (0..n)
                .map(|p| {
                    -0.5 * (now.rm[p] * g_rp[a][p] - now.rp[p] * g_rm[a][p] + now.im[p] * g_ip[a][p]
                        - now.ip[p] * g_im[a][p])
                })
                .collect::<Vec<f64>>(),
        );
    }
    let div_phase = real_divergence(&grid, phase_current);
    let div_dil = real_divergence(&grid, dil_current);
    let inv = 1.0 / (2.0 * traj.dt());
    let phase: Vec<f64> = (0..n)
        .map(|p| (ahead_phase[p] - behind_phase[p]) * inv + div_phase[p])
        .collect();
    let dilatation: Vec<f64> = (0..n)
        .map(|p| (ahead_dil[p] - behind_dil[p]) * inv + div_dil[p])
        .collect();

    let (mixed, _) = continuity_residual(&Pairing::Mixed, traj, m)?;
    let reconstruction_defect = (0..n)
        .map(|p| (C64::new(phase[p], dilatation[p]) - mixed.values()[p]).norm())
        .fold(0.0, f64::max);
    Ok(SplitResiduals {
        phase_norm: real_l2(&grid, &phase),
        dilatation_norm: real_l2(&grid, &dilatation),
        phase: RealField::new(grid.clone(), phase)?,
        dilatation: RealField::new(grid, dilatation)?,
        reconstruction_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Axis;
    use crate::propagator::{evolve_dual, evolve_two_sided};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line() -> Arc<Grid> {
        Arc::new(Grid::line(Axis::dirichlet(-5.0, 5.0, 81).unwrap()))
    }

    fn random(g: &Arc<Grid>, rng: &mut ChaCha8Rng) -> ComplexField {
        ComplexField::from_fn(g.clone(), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn zero_partner_gives_zero_density() {
        let g = line();
        let h = Hamiltonian::from_fns(&g, |x| x[0] * x[0], |x| x[0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = random(&g, &mut rng);
        let d = random(&g, &mut rng);
        let l = two_field_lagrangian_density(&h, &f, &ComplexField::zeros(g.clone()), &d).unwrap();
        assert!(l.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hermitian_two_field_reduces_to_single_field() {
        let g = line();
        let h = Hamiltonian::from_fns(&g, |x| 0.5 * x[0] * x[0], |_| 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = random(&g, &mut rng);
        let d = random(&g, &mut rng);
        let two = two_field_lagrangian_density(&h, &f, &f, &d).unwrap();
        let one = single_field_lagrangian_density(&h, &f, &d).unwrap();
        for (a, b) in two.values().iter().zip(one.values()) {
            assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn phase_dilation_trivial_cases() {
        let g = line();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (p, m) = (random(&g, &mut rng), random(&g, &mut rng));
        let (a, b) = apply_phase_dilation(PhaseDilation::default(), &p, &m);
        assert_eq!((a, b), (p.clone(), m.clone()));
        let (a, b) = apply_phase_dilation(PhaseDilation::new(0.0, std::f64::consts::PI), &p, &m);
        assert!((&a + &p).max_abs() < 1e-15 && (&b + &m).max_abs() < 1e-15);
    }

    #[test]
    fn matrix_and_exponential_forms_agree() {
        let g = line();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let (p, m) = (random(&g, &mut rng), random(&g, &mut rng));
            let phi = PhaseDilation::new(rng.gen_range(-3.0..3.0), rng.gen_range(-7.0..7.0));
            let (a, b) = apply_phase_dilation(phi, &p, &m);
            let (c, d) = apply_phase_dilation_complex(phi, &p, &m);
            assert!((&a - &c).max_abs() <= 1e-14 * a.max_abs());
            assert!((&b - &d).max_abs() <= 1e-14 * b.max_abs());
        }
    }

    #[test]
    fn invariance_holds_off_shell() {
        let g = line();
        let h = Hamiltonian::from_fns(&g, |x| x[0] * x[0], |x| (0.3 * x[0]).sin()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (p, m, d) = (random(&g, &mut rng), random(&g, &mut rng), random(&g, &mut rng));
        for phi in [PhaseDilation::new(0.0, 1.3), PhaseDilation::new(5.0, -2.0), PhaseDilation::new(-5.0, 0.4)] {
            let r = invariance_residual_fields(&h, &p, &m, &d, phi).unwrap();
            assert!(r.relative() < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn split_residuals_reconstruct_mixed() {
        let g = line();
        let h = Hamiltonian::from_fns(&g, |x| 0.5 * x[0] * x[0], |x| 0.2 * x[0]).unwrap();
        let f = ComplexField::from_fn(g.clone(), |x| C64::new(0.0, x[0]).exp() * (-(x[0] - 0.5).powi(2)).exp());
        let t = evolve_dual(&h, &f, &f.conj(), 0.01, 4).unwrap();
        for m in -3..=3 {
            let s = split_continuity_residuals(&t, m).unwrap();
            assert!(s.reconstruction_defect < 1e-12, "{}", s.reconstruction_defect);
        }
    }

    #[test]
    fn real_symmetric_data_has_no_dilatation_density() {
        let g = line();
        let f = ComplexField::from_fn(g.clone(), |x| C64::new((-x[0] * x[0]).exp(), 0.0));
        let (d_phase, d_dil) = Parts::of(&f, &f).densities();
        assert!(d_dil.iter().all(|&v| v == 0.0));
        assert!(d_phase.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn euler_lagrange_detects_fault() {
        let g = line();
        let h = Hamiltonian::from_fns(&g, |x| 0.5 * x[0] * x[0], |x| 0.1 * x[0]).unwrap();
        let f = ComplexField::from_fn(g.clone(), |x| (-(x[0] - 0.3).powi(2)).exp().into());
        let mut t = evolve_two_sided(&h, Sign::Plus, &f, 0.005, 6).unwrap();
        let clean = euler_lagrange_residual(&h, &t, 2).unwrap().max();
        let bad = t.primary(3).unwrap().scale(C64::new(1.01, 0.0));
        t.replace(crate::propagator::Slot::Primary, 3, bad).unwrap();
        let dirty = euler_lagrange_residual(&h, &t, 2).unwrap().max();
        assert!(dirty > 10.0 * clean, "{clean} -> {dirty}");
        assert!(matches!(euler_lagrange_residual(&h, &t, 6), Err(Error::IndexOutOfRange { .. })));
    }
}
