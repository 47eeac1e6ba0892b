//! The two-field Lagrangian on a dual trajectory: it vanishes on shell, is
//! unchanged by `ψ± -> e^{±φr} e^{iφi} ψ±`, and its phase and dilatation
//! continuity equations recombine into the mixed one.

use std::sync::Arc;

use symcurrent::prelude::*;

fn main() -> Result<()> {
    let grid = Arc::new(Grid::line(Axis::dirichlet(-8.0, 8.0, 161)?));
    let h = Hamiltonian::from_fns(&grid, |x| 0.5 * x[0] * x[0], |x| 0.3 * x[0])?;
    let plus0 = ComplexField::from_fn(grid.clone(), |x| (-(x[0] - 0.4).powi(2)).exp().into());
    let minus0 = ComplexField::from_fn(grid.clone(), |x| C64::from_polar((-(x[0] + 0.3).powi(2)).exp(), -0.5 * x[0]));
    let traj = evolve_dual(&h, &plus0, &minus0, 0.01, 40)?;

    let m = 10;
    let el = euler_lagrange_residual(&h, &traj, m)?;
    let parts: Vec<String> = el.as_array().iter().map(|r| format!("{r:.2e}")).collect();
    println!("Euler–Lagrange residuals at t = {:.2}: {}", traj.time(m), parts.join(" "));

    for (re, im) in [(0.0, 1.0), (2.0, -0.5), (5.0, 3.0)] {
        let inv = invariance_residual(&h, &traj, PhaseDilation::new(re, im), m)?;
        println!("φ = {re:+}{im:+}i: |Δ∫L| / scale = {:.2e}", inv.relative());
    }

    let split = split_continuity_residuals(&traj, m)?;
    println!(
        "phase residual {:.2e}, dilatation residual {:.2e}, recombination defect {:.1e}",
        split.phase_norm, split.dilatation_norm, split.reconstruction_defect
    );
    Ok(())
}
