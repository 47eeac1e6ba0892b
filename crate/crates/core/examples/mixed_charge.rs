//! A gain/loss pair `ψ±` evolved together. Neither norm is conserved, but
//! the mixed charge `∫ψ₋*ψ₊` is, to rounding.

use std::sync::Arc;

use symcurrent::prelude::*;

fn main() -> Result<()> {
    let grid = Arc::new(Grid::line(Axis::dirichlet(-10.0, 10.0, 401)?));
    let h = Hamiltonian::from_fns(&grid, |x| 0.5 * x[0] * x[0], |x| 0.3 * x[0] + 0.1)?;
    let psi0 = ComplexField::from_fn(grid.clone(), |x| {
        C64::from_polar((-(x[0] - 0.5).powi(2) / (2.0 * 0.49)).exp(), 0.5 * x[0])
    });

    let traj = evolve_dual(&h, &psi0, &psi0, 1e-3, 1000)?;
    let mixed = charge_series(&Pairing::Mixed, &traj)?;
    let ordinary = charge_series(&Pairing::Ordinary, &traj)?;

    println!("{:>8} {:>14} {:>14}", "t", "|ψ₊|²", "∫ψ₋*ψ₊");
    for i in (0..mixed.times.len()).step_by(250) {
        println!("{:>8.3} {:>14.8} {:>14.10}", mixed.times[i], ordinary.charge[i].re, mixed.charge[i].re);
    }
    println!("ordinary drift {:.3e}", ordinary.drift);
    println!("mixed drift    {:.3e}", mixed.drift);
    println!("mixed continuity residual (max over t) {:.3e}", mixed.max_residual);
    Ok(())
}
