//! Checks against dense-matrix and closed-form oracles built here from the
//! stencil definitions, independently of the library's banded solvers.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symcurrent::grid::{Axis, Boundary, ComplexField, Grid, C64};
use symcurrent::hamiltonian::{mixed_expectation, Hamiltonian, Sign};
use symcurrent::propagator::{
    cn_step, evolve_dual, evolve_two_sided, evolve_two_sided_with, stationary_state, CnStepper, EvolveOptions, Scheme,
};

const I: C64 = C64::new(0.0, 1.0);

/// Dense `H±` straight from the 3-point stencil.
fn dense(h: &Hamiltonian, sign: Sign) -> DMatrix<C64> {
    let g = h.grid();
    let axis = g.axis(0);
    let n = axis.n;
    let k = 0.5 / (axis.dx * axis.dx);
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(2.0 * k + h.potential().values()[i], sign.value() * h.gain_loss().values()[i]);
        if i + 1 < n {
            m[(i, i + 1)] = C64::new(-k, 0.0);
            m[(i + 1, i)] = C64::new(-k, 0.0);
        }
    }
    if axis.bc == Boundary::Periodic {
        m[(0, n - 1)] = C64::new(-k, 0.0);
        m[(n - 1, 0)] = C64::new(-k, 0.0);
    }
    m
}

fn real_part(m: &DMatrix<C64>) -> DMatrix<f64> {
    m.map(|z| z.re)
}

fn cayley(dt: f64, e: C64) -> C64 {
    (1.0 - I * dt * e / 2.0) / (1.0 + I * dt * e / 2.0)
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn line(min: f64, max: f64, n: usize) -> Arc<Grid> {
    Arc::new(Grid::line(Axis::dirichlet(min, max, n).unwrap()))
}

#[test]
fn cayley_factor_on_dense_eigenvectors() {
    let g = line(-4.0, 4.0, 60);
    let h = Hamiltonian::from_fns(&g, |x| 0.5 * x[0] * x[0] + 0.2 * x[0], |_| 0.0).unwrap();
    let eig = real_part(&dense(&h, Sign::Plus)).symmetric_eigen();
    let dt = 0.03;
    let stepper = CnStepper::new(&h, Sign::Plus, dt).unwrap();
    for j in [0, 1, 7, 30, 59] {
        let v: Vec<C64> = eig.eigenvectors.column(j).iter().map(|&x| C64::new(x, 0.0)).collect();
        let f = ComplexField::new(g.clone(), v.clone()).unwrap();
        let (out, _) = stepper.step(&f).unwrap();
        let factor = cayley(dt, C64::new(eig.eigenvalues[j], 0.0));
        let expect: Vec<C64> = v.iter().map(|x| x * factor).collect();
        assert!(max_diff(out.values(), &expect) < 1e-12, "mode {j}");
    }
}

#[test]
fn uniform_gain_shifts_the_cayley_energy() {
    let g = line(-3.0, 3.0, 40);
    let w0 = 0.4;
    let h = Hamiltonian::from_fns(&g, |_| 0.0, |_| w0).unwrap();
    let eig = real_part(&dense(&h, Sign::Plus)).symmetric_eigen();
    let dt = 0.05;
    for sign in [Sign::Plus, Sign::Minus] {
        let v: Vec<C64> = eig.eigenvectors.column(2).iter().map(|&x| C64::new(x, 0.0)).collect();
        let f = ComplexField::new(g.clone(), v.clone()).unwrap();
        let out = cn_step(&h, sign, &f, dt).unwrap();
        let factor = cayley(dt, C64::new(eig.eigenvalues[2], sign.value() * w0));
        let expect: Vec<C64> = v.iter().map(|x| x * factor).collect();
        assert!(max_diff(out.values(), &expect) < 1e-12);
    }
}

#[test]
fn periodic_step_matches_dense_solve() {
    let g = Arc::new(Grid::line(Axis::periodic(0.0, 6.4, 32).unwrap()));
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let v: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let w: Vec<f64> = (0..32).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let h = Hamiltonian::new(
        symcurrent::grid::RealField::new(g.clone(), v).unwrap(),
        symcurrent::grid::RealField::new(g.clone(), w).unwrap(),
    )
    .unwrap();
    let f: Vec<C64> = (0..32).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let dt = 0.07;
    for sign in [Sign::Plus, Sign::Minus] {
        let m = dense(&h, sign);
        let id = DMatrix::<C64>::identity(32, 32);
        let lhs = &id + &m * (I * dt / 2.0);
        let rhs = (&id - &m * (I * dt / 2.0)) * DVector::from_vec(f.clone());
        let expect = lhs.lu().solve(&rhs).unwrap();
        let out = cn_step(&h, sign, &ComplexField::new(g.clone(), f.clone()).unwrap(), dt).unwrap();
        assert!(max_diff(out.values(), expect.as_slice()) < 1e-12);
    }
}

#[test]
fn pt_ground_energy_is_real_and_matches_dense_spectrum() {
    let g = line(-8.0, 8.0, 121);
    let h = Hamiltonian::from_fns(&g, |x| 0.5 * x[0] * x[0], |x| 0.1 * x[0]).unwrap();
    let m = dense(&h, Sign::Plus);
    let n = m.nrows();
    // Real 2n×2n embedding [[Re, -Im], [Im, Re]] carries the spectrum of H and of H*.
    let mut embed = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            embed[(i, j)] = m[(i, j)].re;
            embed[(i + n, j + n)] = m[(i, j)].re;
            embed[(i, j + n)] = -m[(i, j)].im;
            embed[(i + n, j)] = m[(i, j)].im;
        }
    }
    let spectrum = embed.complex_eigenvalues();
    let state = stationary_state(&h, Sign::Plus, C64::new(0.4, 0.0), 1e-11, 500).unwrap();
    let nearest = spectrum
        .iter()
        .copied()
        .min_by(|a, b| (a - state.energy).norm().total_cmp(&(b - state.energy).norm()))
        .unwrap();
    assert!((nearest - state.energy).norm() < 1e-9, "{} vs {}", state.energy, nearest);
    assert!(nearest.im.abs() < 1e-9, "dense ground energy {nearest}");
    assert!(state.energy.im.abs() < 1e-9, "{}", state.energy);
    // The λx² shift of the continuum problem: E = 1/2 + λ²/2 for W = λx.
    assert!((state.energy.re - 0.505).abs() < 1e-3);
}

#[test]
fn box_ground_state_is_the_discrete_sine() {
    let n = 99;
    let g = line(0.0, 1.0, n);
    let dx = g.axis(0).dx;
    let walls = (n + 1) as f64 * dx;
    let h = Hamiltonian::from_fns(&g, |_| 0.0, |_| 0.0).unwrap();
    let e = (1.0 - (std::f64::consts::PI * dx / walls).cos()) / (dx * dx);
    let s = stationary_state(&h, Sign::Plus, C64::new(0.9 * e, 0.0), 1e-10, 500).unwrap();
    assert!((s.energy - e).norm() < 1e-10);
    let sine: Vec<f64> = (0..n).map(|i| (std::f64::consts::PI * (i + 1) as f64 / (n + 1) as f64).sin()).collect();
    let scale = s.field.values()[n / 2].re / sine[n / 2];
    for (v, w) in s.field.values().iter().zip(&sine) {
        assert!((v - C64::new(scale * w, 0.0)).norm() < 1e-9);
    }
}

#[test]
fn mixed_expectation_of_ground_state_is_the_dense_ground_energy() {
    let g = line(-5.0, 5.0, 81);
    let h = Hamiltonian::from_fns(&g, |x| 0.5 * x[0] * x[0] + 0.3 * x[0].powi(4), |_| 0.0).unwrap();
    let e0 = real_part(&dense(&h, Sign::Plus)).symmetric_eigen().eigenvalues.min();
    let s = stationary_state(&h, Sign::Plus, C64::new(0.3, 0.0), 1e-12, 500).unwrap();
    let hbar = mixed_expectation(&h, &s.field, &s.field).unwrap();
    assert!((hbar - e0).norm() < 1e-10, "{hbar} vs {e0}");
    assert!(hbar.im.abs() < 1e-14);
}

#[test]
fn dual_amplification_factors_are_reciprocal() {
    let g = Arc::new(Grid::line(Axis::periodic(0.0, 10.0, 50).unwrap()));
    let dx = g.axis(0).dx;
    let w0 = 0.3;
    let k = 2.0 * std::f64::consts::PI * 4.0 / 10.0;
    let h = Hamiltonian::from_fns(&g, |_| 0.0, |_| w0).unwrap();
    let wave = ComplexField::from_fn(g.clone(), |x| C64::new(0.0, k * x[0]).exp());
    let dt = 0.02;
    let traj = evolve_dual(&h, &wave, &wave, dt, 25).unwrap();
    let e = (1.0 - (k * dx).cos()) / (dx * dx);
    let a_plus = cayley(dt, C64::new(e, w0));
    let a_minus = cayley(dt, C64::new(e, -w0));
    assert!((a_minus.conj() * a_plus - 1.0).norm() < 1e-15);
    assert!(a_plus.norm() > 1.0 && a_minus.norm() < 1.0);
    for m in traj.indices() {
        let (plus, minus) = traj.dual(m).unwrap();
        let ep = a_plus.powi(m as i32);
        let em = a_minus.powi(m as i32);
        let want_p: Vec<C64> = wave.values().iter().map(|z| z * ep).collect();
        let want_m: Vec<C64> = wave.values().iter().map(|z| z * em).collect();
        assert!(max_diff(plus.values(), &want_p) < 1e-12, "m = {m}");
        assert!(max_diff(minus.values(), &want_m) < 1e-12, "m = {m}");
    }
}

#[test]
fn two_sided_eigenstate_has_a_time_symmetric_product() {
    let g = line(-6.0, 6.0, 97);
    let h = Hamiltonian::from_fns(&g, |x| 0.5 * x[0] * x[0], |x| 0.05 * x[0]).unwrap();
    let s = stationary_state(&h, Sign::Plus, C64::new(1.4, 0.0), 1e-13, 500).unwrap();
    let dt = 0.01;
    let traj = evolve_two_sided(&h, Sign::Plus, &s.field, dt, 40).unwrap();
    let a = cayley(dt, s.energy);
    let square: Vec<C64> = s.field.values().iter().map(|z| z * z).collect();
    for m in 0..=40i64 {
        let ahead = traj.primary(m).unwrap();
        let want: Vec<C64> = s.field.values().iter().map(|z| z * a.powi(m as i32)).collect();
        assert!(max_diff(ahead.values(), &want) < 1e-10);
        let behind = traj.primary(-m).unwrap();
        let product: Vec<C64> = ahead.values().iter().zip(behind.values()).map(|(x, y)| x * y).collect();
        assert!(max_diff(&product, &square) < 1e-10, "m = {m}");
    }
}

#[test]
fn real_even_data_reverses_by_conjugation_without_gain() {
    let g = line(-5.0, 5.0, 101);
    let h = Hamiltonian::from_fns(&g, |x| 0.5 * x[0] * x[0], |_| 0.0).unwrap();
    let psi = ComplexField::from_fn(g.clone(), |x| C64::new((-x[0] * x[0]).exp() * (1.0 + x[0] * x[0]), 0.0));
    let traj = evolve_two_sided(&h, Sign::Plus, &psi, 0.01, 30).unwrap();
    for m in 1..=30 {
        let fwd = traj.primary(m).unwrap().conj();
        assert!(max_diff(fwd.values(), traj.primary(-m).unwrap().values()) < 1e-13);
    }
}

/// Richardson extrapolation in `dt` removes the time error of both schemes;
/// what remains is the finite-difference versus spectral Laplacian, which
/// shrinks at second order in `dx`.
#[test]
fn split_step_and_crank_nicolson_share_the_continuum_limit() {
    let t_end = 0.5;
    let mut gaps = Vec::new();
    for n in [128usize, 256] {
        let g = Arc::new(Grid::line(Axis::periodic(-10.0, 20.0, n).unwrap()));
        let h = Hamiltonian::from_fns(
            &g,
            |x| 0.5 * (2.0 * std::f64::consts::PI * x[0] / 20.0).cos(),
            |x| 0.1 * (2.0 * std::f64::consts::PI * x[0] / 10.0).sin(),
        )
        .unwrap();
        let psi = ComplexField::from_fn(g.clone(), |x| C64::new(-x[0] * x[0] / 2.0, 0.8 * x[0]).exp());
        let extrapolated = |scheme: Scheme| -> Vec<C64> {
            let opts = EvolveOptions { scheme, ..EvolveOptions::default() };
            let end = |steps: usize| {
                let t = evolve_two_sided_with(&h, Sign::Plus, &psi, t_end / steps as f64, steps, &opts).unwrap();
                t.primary(steps as i64).unwrap().values().to_vec()
            };
            let (coarse, fine) = (end(200), end(400));
            coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
        };
        let cn = extrapolated(Scheme::CrankNicolson);
        let split = extrapolated(Scheme::SplitStep);
        gaps.push(max_diff(&cn, &split));
    }
    assert!(gaps[0] / gaps[1] >= 3.5, "{gaps:?}");
}
