//! Stationary states: the ground state of a PT well has a spatially
//! constant bilocal current, and a free standing wave on a ring has the
//! closed-form combined current `s(A²e^{2ikc} - B²e^{-2ikc})`.

use std::sync::Arc;

use symcurrent::prelude::*;

fn main() -> Result<()> {
    let grid = Arc::new(Grid::line(Axis::dirichlet(-10.0, 10.0, 401)?));
    let h = Hamiltonian::from_fns(&grid, |x| 0.5 * x[0] * x[0], |x| 0.2 * x[0])?;
    let state = stationary_state(&h, Sign::Plus, C64::new(0.4, 0.0), 1e-12, 200)?;
    println!(
        "PT ground state: E = {:.10} {:+.2e}i, residual {:.2e}, {} iterations",
        state.energy.re, state.energy.im, state.residual, state.iterations
    );
    let parity = make_transform(TransformKind::Parity { center: vec![0.0] }, &grid)?;
    let (current, spread) = stationary_current_profile(&Pairing::BilocalFc(parity), &state)?;
    println!("bilocal current ≈ {:+.3e}, spread {spread:.2e}", current.components()[0][200]);

    let ring = Arc::new(Grid::line(Axis::periodic(-10.0, 20.0, 128)?));
    let dx = ring.axis(0).dx;
    let k = 2.0 * std::f64::consts::PI * 3.0 / 20.0;
    let (a, b) = (C64::new(1.0, 0.0), C64::new(0.5, 1.0));
    let wave = ComplexField::from_fn(ring.clone(), |x| a * C64::from_polar(1.0, k * x[0]) + b * C64::from_polar(1.0, -k * x[0]));
    let c = 0.0;
    let parity = make_transform(TransformKind::Parity { center: vec![c] }, &ring)?;
    let (current, spread) = spatial_current_profile(&Pairing::CombinedFtb(parity), &wave)?;
    let s = (k * dx).sin() / dx;
    let expected = s * (a * a * C64::from_polar(1.0, 2.0 * k * c) - b * b * C64::from_polar(1.0, -2.0 * k * c));
    println!(
        "free wave combined current {:+.6}, closed form {:+.6}, spread {spread:.1e}",
        current.components()[0][0],
        expected
    );
    Ok(())
}
