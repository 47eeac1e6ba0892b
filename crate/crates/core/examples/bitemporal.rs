//! The bitemporal charge `∫ψ(-t)ψ(t)` needs no spatial symmetry at all: an
//! asymmetric potential with gain and loss still conserves it.

use std::sync::Arc;

use symcurrent::prelude::*;

fn main() -> Result<()> {
    let grid = Arc::new(Grid::line(Axis::dirichlet(-8.0, 8.0, 321)?));
    let h = Hamiltonian::from_fns(
        &grid,
        |x| 0.5 * x[0] * x[0] + 0.1 * x[0].powi(3),
        |x| 0.2 * (-(x[0] - 0.5).powi(2) / 0.49).exp(),
    )?;
    let psi0 = ComplexField::from_fn(grid.clone(), |x| {
        C64::from_polar((-(x[0] - 0.5).powi(2) / 0.98).exp(), 0.5 * x[0])
    });
    let traj = evolve_two_sided(&h, Sign::Plus, &psi0, 0.005, 400)?;

    let bitemporal = charge_series(&Pairing::BitemporalTa, &traj)?;
    let ordinary = charge_series(&Pairing::Ordinary, &traj)?;
    println!("ordinary   drift {:.3e}", ordinary.drift);
    println!("bitemporal drift {:.3e}  C = {:+.8}", bitemporal.drift, bitemporal.charge_at_zero());

    let m = 200;
    let (_, r) = continuity_residual(&Pairing::BitemporalTa, &traj, m)?;
    println!("bitemporal continuity residual at t = {:.2}: {r:.3e}", traj.time(m));
    Ok(())
}
