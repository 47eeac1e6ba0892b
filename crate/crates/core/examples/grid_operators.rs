//! Finite-difference operators on a periodic line, checked against the
//! exact symbols of the central stencils for a plane wave.

use std::sync::Arc;

use symcurrent::prelude::*;

fn main() -> Result<()> {
    let n = 64;
    let grid = Arc::new(Grid::line(Axis::periodic(0.0, 2.0 * std::f64::consts::PI, n)?));
    let dx = grid.axis(0).dx;
    let k = 5.0;
    let wave = ComplexField::from_fn(grid.clone(), |x| C64::from_polar(1.0, k * x[0]));

    let grad = gradient(&wave).component(0);
    let lap = laplacian(&wave);
    let grad_symbol = C64::new(0.0, (k * dx).sin() / dx);
    let lap_symbol = -2.0 * (1.0 - (k * dx).cos()) / (dx * dx);

    let grad_err = grad
        .values()
        .iter()
        .zip(wave.values())
        .map(|(g, w)| (g - grad_symbol * w).norm())
        .fold(0.0, f64::max);
    let lap_err = lap
        .values()
        .iter()
        .zip(wave.values())
        .map(|(l, w)| (l - lap_symbol * w).norm())
        .fold(0.0, f64::max);

    println!("grid: {n} points, dx = {dx:.5}");
    println!("gradient symbol  i sin(k dx)/dx = {:.6}i  (continuum {k})", grad_symbol.im);
    println!("laplacian symbol              = {lap_symbol:.6}  (continuum {})", -k * k);
    println!("max stencil error: gradient {grad_err:.2e}, laplacian {lap_err:.2e}");

    // A periodic divergence sums to zero; the integral of |e^{ikx}|² is the length.
    let div = divergence(&gradient(&wave));
    println!("∫ div(grad ψ) = {:.2e}", integrate(&div).norm());
    println!("⟨ψ, ψ⟩ = {:.12}", inner(&wave, &wave)?.re);
    Ok(())
}
