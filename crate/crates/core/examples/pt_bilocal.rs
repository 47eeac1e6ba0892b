//! PT-symmetric well `V = ½x²`, `W = 0.3x`: the bilocal parity charge
//! `∫ conj(ψ(-x)) ψ(x)` is conserved from a single field, while the
//! combined pairing (which needs an even `W`) drifts.

use std::sync::Arc;

use symcurrent::prelude::*;

fn main() -> Result<()> {
    let grid = Arc::new(Grid::line(Axis::dirichlet(-10.0, 10.0, 401)?));
    let h = Hamiltonian::from_fns(&grid, |x| 0.5 * x[0] * x[0], |x| 0.3 * x[0])?;
    let parity = make_transform(TransformKind::Parity { center: vec![0.0] }, &grid)?;
    println!("symmetry rows: {}", classify_symmetry(&h, &parity, None)?);

    let psi0 = ComplexField::from_fn(grid.clone(), |x| (-(x[0] - 0.5).powi(2) / (2.0 * 0.49)).exp().into());
    let traj = evolve_two_sided(&h, Sign::Plus, &psi0, 1e-3, 1000)?;

    for pairing in [Pairing::BilocalFc(parity.clone()), Pairing::CombinedFtb(parity)] {
        let (_, applies) = pairing.check(&h)?;
        let report = charge_series(&pairing, &traj)?;
        println!(
            "{:<14} applies={:<5} C(0)={:+.6}  drift={:.3e}",
            pairing.tag().name(),
            applies,
            report.charge_at_zero(),
            report.drift
        );
    }
    Ok(())
}
