//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.
//!
//! Run with `cargo test --test acceptance`.

use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use symcurrent::conservation::{
    charge_series, continuity_residual, pair_density, spatial_current_profile, stationary_current_profile, Pairing,
    PairingTag,
};
use symcurrent::grid::{Axis, ComplexField, Grid, C64};
use symcurrent::hamiltonian::{Hamiltonian, Sign};
use symcurrent::lagrangian::{euler_lagrange_residual, invariance_residual_fields, PhaseDilation};
use symcurrent::propagator::{evolve_dual, stationary_state, Slot, Trajectory};
use symcurrent::runner::{evolve, run};
use symcurrent::scenario::{bundled, bundled_names, Prepared, Scenario};
use symcurrent::symmetry::{TransformKind, TransformName, TransformSpec};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type Check = fn() -> Result<Outcome, symcurrent::Error>;

fn scenario(v: Value) -> Scenario {
    Scenario::from_json(&v.to_string(), Path::new("acceptance")).expect("scenario json")
}

/// Dirichlet box on [-8, 8] with a moving Gaussian, the common setup of the
/// refinement studies.
fn box_scenario(v: Value, w: Value, dual: bool) -> Scenario {
    scenario(json!({
        "name": "refinement",
        "grid": { "n": [161], "dx": [0.1], "origin": [-8.0], "bc": ["dirichlet"] },
        "V": v,
        "W": w,
        "transform": { "kind": "parity" },
        "initial": { "type": "gaussian", "center": [0.5], "width": 0.7, "momentum": [0.5] },
        "dual": dual,
        "dt": 0.01,
        "steps": 40,
    }))
}

fn harmonic() -> Value {
    json!({ "preset": "harmonic" })
}

fn levels(s: &Scenario) -> Result<Vec<(Prepared, Trajectory)>, symcurrent::Error> {
    (0..3)
        .map(|k| {
            let p = s.prepare(k, None)?;
            let t = evolve(&p)?;
            Ok((p, t))
        })
        .collect()
}

/// Largest residual over the time indices shared by every level.
fn coarse_max(
    runs: &[(Prepared, Trajectory)],
    base_steps: i64,
    mut f: impl FnMut(&Prepared, &Trajectory, i64) -> Result<f64, symcurrent::Error>,
) -> Result<Vec<f64>, symcurrent::Error> {
    runs.iter()
        .map(|(p, t)| {
            let factor = 1i64 << p.refine;
            let mut worst = 0.0f64;
            for m in -(base_steps - 1)..=(base_steps - 1) {
                worst = worst.max(f(p, t, m * factor)?);
            }
            Ok(worst)
        })
        .collect()
}

fn ratios(r: &[f64]) -> Vec<f64> {
    r.windows(2).map(|w| w[0] / w[1]).collect()
}

fn residual_ladder(s: &Scenario, kind: PairingTag) -> Result<Vec<f64>, symcurrent::Error> {
    let runs = levels(s)?;
    coarse_max(&runs, s.steps as i64, |p, t, m| {
        let pairing = kind.with_transform(p.transform.as_ref())?;
        Ok(continuity_residual(&pairing, t, m)?.1)
    })
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

/// `V = x²/2`, `W = w_slope·x` on 401 points over [-10, 10] with a moving Gaussian.
fn pt_setup(w_slope: f64) -> (Hamiltonian, ComplexField) {
    let grid = std::sync::Arc::new(Grid::line(Axis::dirichlet(-10.0, 10.0, 401).unwrap()));
    let h = Hamiltonian::from_fns(&grid, |x| 0.5 * x[0] * x[0], |x| w_slope * x[0]).unwrap();
    let psi = ComplexField::from_fn(grid, |x| {
        let r = x[0] - 0.5;
        C64::new(-r * r / (4.0 * 0.49), 0.5 * x[0]).exp()
    });
    (h, psi)
}

fn c1_mixed_charge() -> Result<Outcome, symcurrent::Error> {
    let start = Instant::now();
    let (h, psi) = pt_setup(0.3);
    let traj = evolve_dual(&h, &psi, &psi, 1e-3, 2000)?;
    let report = charge_series(&Pairing::Mixed, &traj)?;
    let elapsed = start.elapsed();
    Ok(outcome(
        report.drift < 1e-10 && elapsed < Duration::from_secs(5),
        format!("drift {:.3e} over 2x2000 steps in {:.2}s", report.drift, elapsed.as_secs_f64()),
    ))
}

fn c2_hermitian_reduction() -> Result<Outcome, symcurrent::Error> {
    let (h, psi) = pt_setup(0.0);
    let traj = evolve_dual(&h, &psi, &psi, 1e-3, 2000)?;
    let norm = charge_series(&Pairing::Ordinary, &traj)?;
    let mut agreement = 0.0f64;
    for m in traj.indices() {
        let a = pair_density(&Pairing::Ordinary, &traj, m)?;
        let b = pair_density(&Pairing::Mixed, &traj, m)?;
        for (x, y) in a.values().iter().zip(b.values()) {
            agreement = agreement.max((x - y).norm());
        }
    }
    Ok(outcome(
        norm.drift < 1e-10 && agreement < 1e-14,
        format!("norm drift {:.3e}, max |rho_mixed - rho_ordinary| {:.3e}", norm.drift, agreement),
    ))
}

fn c3_bilocal_pt() -> Result<Outcome, symcurrent::Error> {
    let start = Instant::now();
    let s = box_scenario(harmonic(), json!({ "preset": "linear", "slope": 0.3 }), true);
    let residuals = residual_ladder(&s, PairingTag::BilocalFc)?;
    let finest = s.prepare(2, None)?;
    let traj = evolve(&finest)?;
    let pairing = PairingTag::BilocalFc.with_transform(finest.transform.as_ref())?;
    let drift = charge_series(&pairing, &traj)?.drift;
    let r = ratios(&residuals);
    let elapsed = start.elapsed();
    Ok(outcome(
        r.iter().all(|&x| x >= 3.5) && drift < 1e-8 && elapsed < Duration::from_secs(60),
        format!(
            "residuals [{}], ratios [{}], finest drift {:.3e}, {:.2}s",
            fmt_list(&residuals),
            fmt_list(&r),
            drift,
            elapsed.as_secs_f64()
        ),
    ))
}

fn c4_combined_even_w() -> Result<Outcome, symcurrent::Error> {
    let even = box_scenario(harmonic(), json!({ "preset": "gaussian", "amplitude": 0.2, "width": 0.7 }), true);
    let odd = box_scenario(harmonic(), json!({ "preset": "linear", "slope": 0.3 }), true);
    let good = ratios(&residual_ladder(&even, PairingTag::CombinedFtb)?);
    let control = ratios(&residual_ladder(&odd, PairingTag::CombinedFtb)?);
    Ok(outcome(
        good.iter().all(|&x| x >= 3.5) && control.iter().all(|&x| x < 1.5),
        format!("even W ratios [{}], odd W control ratios [{}]", fmt_list(&good), fmt_list(&control)),
    ))
}

fn c5_bitemporal_general() -> Result<Outcome, symcurrent::Error> {
    let s = box_scenario(
        json!({ "preset": "polynomial", "coeffs": [0.0, 0.0, 0.5, 0.1] }),
        json!({ "preset": "gaussian", "amplitude": 0.2, "center": [0.5], "width": 0.7 }),
        false,
    );
    let residuals = residual_ladder(&s, PairingTag::BitemporalTa)?;
    let r = ratios(&residuals);
    Ok(outcome(
        r.iter().all(|&x| x >= 3.5),
        format!("residuals [{}], ratios [{}]", fmt_list(&residuals), fmt_list(&r)),
    ))
}

fn c6_stationary_invariants() -> Result<Outcome, symcurrent::Error> {
    // (i) even bound state of the harmonic well.
    let grid = std::sync::Arc::new(Grid::line(Axis::dirichlet(-8.0, 8.0, 321)?));
    let h = Hamiltonian::from_fns(&grid, |x| 0.5 * x[0] * x[0], |_| 0.0)?;
    let parity = TransformSpec { kind: TransformName::Parity, offset: None, quarter_turns: None, center: None };
    let ground = stationary_state(&h, Sign::Plus, C64::new(0.3, 0.0), 1e-12, 500)?;
    let (_, even_spread) = stationary_current_profile(&Pairing::BilocalFc(parity.build(&grid)?), &ground)?;

    // (ii) A e^{ikx} + B e^{-ikx} on a ring, against the closed form of the
    // central-difference current.
    let (a, b) = (C64::new(1.0, 0.0), C64::new(2.0, 0.0));
    let ring = std::sync::Arc::new(Grid::line(Axis::periodic(-10.0, 20.0, 128)?));
    let dx = ring.axis(0).dx;
    let k = 2.0 * std::f64::consts::PI * 3.0 / 20.0;
    let state = ComplexField::from_fn(ring.clone(), |x| a * C64::new(0.0, k * x[0]).exp() + b * C64::new(0.0, -k * x[0]).exp());
    let flip = parity.build(&ring)?;
    let c = match flip.kind() {
        TransformKind::Parity { center } => center[0],
        other => unreachable!("{other}"),
    };
    let s = (k * dx).sin() / dx;
    let e2 = C64::new(0.0, 2.0 * k * c).exp();
    let ft_expected = (a * a * e2 - b * b / e2) * s;
    let bilocal_expected = (a * b.conj() * e2 - b * a.conj() / e2) * s;
    let mut free_err = 0.0f64;
    for (pairing, expected) in [
        (Pairing::CombinedFtb(flip.clone()), ft_expected),
        (Pairing::BilocalFc(flip.clone()), bilocal_expected),
    ] {
        let (current, _) = spatial_current_profile(&pairing, &state)?;
        for v in &current.components()[0] {
            free_err = free_err.max((v - expected).norm());
        }
    }

    // (iii) ground state of the bundled lattice, translated by one cell.
    let lattice = bundled("lattice_translation").expect("bundled lattice").prepare(0, None)?;
    let bloch = stationary_state(&lattice.hamiltonian, Sign::Plus, C64::new(-1.0, 0.0), 1e-12, 2000)?;
    let pairing = PairingTag::BilocalFc.with_transform(lattice.transform.as_ref())?;
    let (_, lattice_spread) = stationary_current_profile(&pairing, &bloch)?;

    Ok(outcome(
        even_spread < 1e-10 && free_err < 1e-10 && lattice_spread < 1e-8,
        format!(
            "even-state spread {even_spread:.3e}; free state J_FT = {:.6}{:+.6}i, max error {free_err:.3e}; lattice spread {lattice_spread:.3e} (E = {:.6})",
            ft_expected.re, ft_expected.im, bloch.energy
        ),
    ))
}

fn random_field(grid: &std::sync::Arc<Grid>, rng: &mut ChaCha8Rng) -> ComplexField {
    ComplexField::from_fn(grid.clone(), |_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn c7_lagrangian_invariance() -> Result<Outcome, symcurrent::Error> {
    let grid = std::sync::Arc::new(Grid::line(Axis::dirichlet(-5.0, 5.0, 101)?));
    let h = Hamiltonian::from_fns(&grid, |x| 0.5 * x[0] * x[0] + 0.1 * x[0].powi(3), |x| 0.3 * x[0] - 0.1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let plus = random_field(&grid, &mut rng);
        let minus = random_field(&grid, &mut rng);
        let dplus = random_field(&grid, &mut rng);
        for _ in 0..20 {
            let phi = PhaseDilation::new(rng.gen_range(-5.0..=5.0), rng.gen_range(-10.0..10.0));
            worst = worst.max(invariance_residual_fields(&h, &plus, &minus, &dplus, phi)?.relative());
        }
    }
    Ok(outcome(worst < 1e-10, format!("max relative residual {worst:.3e} over 100 pairs x 20 phi")))
}

fn c8_noether_closure() -> Result<Outcome, symcurrent::Error> {
    let mut lines = Vec::new();
    let mut worst = 0.0f64;
    for name in bundled_names() {
        let out = run(bundled(name).expect("bundled").prepare(0, None)?)?;
        let d = out.lagrangian.iter().map(|r| r.reconstruction_defect).fold(0.0, f64::max);
        worst = worst.max(d);
        lines.push(format!("{name} {d:.1e}"));
    }
    Ok(outcome(worst < 1e-12, format!("max defect {worst:.3e} ({})", lines.join(", "))))
}

fn c9_euler_lagrange() -> Result<Outcome, symcurrent::Error> {
    let s = box_scenario(harmonic(), json!({ "preset": "linear", "slope": 0.3 }), true);
    let runs = levels(&s)?;
    let mut components = [[0.0f64; 3]; 4];
    for (level, (p, t)) in runs.iter().enumerate() {
        let factor = 1i64 << p.refine;
        for m in -(s.steps as i64 - 1)..=(s.steps as i64 - 1) {
            let el = euler_lagrange_residual(&p.hamiltonian, t, m * factor)?.as_array();
            for c in 0..4 {
                components[c][level] = components[c][level].max(el[c]);
            }
        }
    }
    let all_ratios: Vec<f64> = components.iter().flat_map(|c| ratios(c)).collect();

    let (p, mut t) = runs.into_iter().next().expect("three levels");
    let m0 = 5;
    let clean = euler_lagrange_residual(&p.hamiltonian, &t, m0)?.max();
    let bumped = t.get(Slot::Primary, m0 + 1)?.scale(C64::new(1.01, 0.0));
    t.replace(Slot::Primary, m0 + 1, bumped)?;
    let dirty = euler_lagrange_residual(&p.hamiltonian, &t, m0)?.max();
    Ok(outcome(
        all_ratios.iter().all(|&x| x >= 3.5) && dirty >= 10.0 * clean,
        format!("component ratios [{}], fault {clean:.3e} -> {dirty:.3e}", fmt_list(&all_ratios)),
    ))
}

fn c10_eigensolver() -> Result<Outcome, symcurrent::Error> {
    let grid = std::sync::Arc::new(Grid::line(Axis::dirichlet(-10.0, 10.0, 401)?));
    let dx = grid.axis(0).dx;
    let h = Hamiltonian::from_fns(&grid, |x| 0.5 * x[0] * x[0], |_| 0.0)?;
    let state = stationary_state(&h, Sign::Plus, C64::new(0.4, 0.0), 1e-12, 500)?;

    let n = grid.len();
    let mut dense = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let x = grid.axis(0).coord(i);
        dense[(i, i)] = 1.0 / (dx * dx) + 0.5 * x * x;
        if i + 1 < n {
            dense[(i, i + 1)] = -0.5 / (dx * dx);
            dense[(i + 1, i)] = -0.5 / (dx * dx);
        }
    }
    let oracle = dense.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let e = state.energy;
    let continuum = (e.re - 0.5).abs();
    let vs_oracle = (e - oracle).norm();
    Ok(outcome(
        continuum <= 2.0 * dx * dx && vs_oracle < 1e-10,
        format!("E = {:.12}, |E - 0.5| = {continuum:.3e} (bound {:.3e}), |E - dense| = {vs_oracle:.3e}", e.re, 2.0 * dx * dx),
    ))
}

fn c11_mixed_expectation() -> Result<Outcome, symcurrent::Error> {
    let out = run(bundled("pt_linear_gain_loss").expect("bundled").prepare(0, None)?)?;
    let mixed = out.kinds.iter().find(|k| k.kind == PairingTag::Mixed).expect("mixed kind listed");
    let varies = out.mixed_expectation_variation();
    Ok(outcome(
        varies > 1e-3 && mixed.report.drift < 1e-10,
        format!(
            "H_bar relative variation {varies:.3e} (needs > 1e-3), C drift {:.3e}; hermitian-part expectation varies by {:.3e}",
            mixed.report.drift,
            out.hermitian_expectation_variation()
        ),
    ))
}

fn main() {
    let checks: [(&str, Check); 11] = [
        ("mixed-charge conservation", c1_mixed_charge),
        ("hermitian reduction", c2_hermitian_reduction),
        ("bilocal PT conservation under refinement", c3_bilocal_pt),
        ("combined FT conservation and odd-W control", c4_combined_even_w),
        ("bitemporal conservation for a generic H", c5_bitemporal_general),
        ("stationary domainwise invariants", c6_stationary_invariants),
        ("lagrangian phase-dilation invariance", c7_lagrangian_invariance),
        ("split residual reconstruction", c8_noether_closure),
        ("euler-lagrange residuals", c9_euler_lagrange),
        ("inverse-iteration eigensolver", c10_eigensolver),
        ("mixed expectation variation", c11_mixed_expectation),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let (status, detail) = match check() {
            Ok(o) => (if o.pass { "PASS" } else { "FAIL" }, o.detail),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} [{:>2}] {name}: {detail} ({:.2}s)", i + 1, start.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
