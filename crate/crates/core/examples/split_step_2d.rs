//! Split-step evolution on a periodic square. A quadrupolar gain/loss is
//! odd under a quarter turn, so the bilocal rotation charge is conserved
//! while the ordinary norm is not.

use std::sync::Arc;

use symcurrent::prelude::*;

fn main() -> Result<()> {
    let axis = Axis::periodic(-6.0, 12.0, 48)?;
    let grid = Arc::new(Grid::plane(axis, axis));
    let h = Hamiltonian::from_fns(
        &grid,
        |x| 0.5 * (x[0] * x[0] + x[1] * x[1]),
        |x| 0.2 * (x[0] * x[0] - x[1] * x[1]) * (-(x[0] * x[0] + x[1] * x[1]) / 4.5).exp(),
    )?;
    let rotation = make_transform(TransformKind::Rotation90 { quarter_turns: 1 }, &grid)?;
    println!("symmetry rows under a quarter turn: {}", classify_symmetry(&h, &rotation, None)?);

    let psi0 = ComplexField::from_fn(grid.clone(), |x| {
        C64::from_polar((-((x[0] - 0.8).powi(2) + (x[1] - 0.3).powi(2)) / 1.28).exp(), 0.5 * x[1])
    });
    let opts = EvolveOptions {
        scheme: Scheme::SplitStep,
        ..EvolveOptions::default()
    };
    let traj = evolve_dual_with(&h, &psi0, &psi0, 0.01, 50, &opts)?;
    for pairing in [Pairing::Ordinary, Pairing::Mixed, Pairing::BilocalFc(rotation)] {
        let report = charge_series(&pairing, &traj)?;
        println!("{:<14} drift {:.3e}", pairing.tag().name(), report.drift);
    }
    Ok(())
}
