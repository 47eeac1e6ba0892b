//! Lattice transforms and the symmetry classification of a few
//! Hamiltonians under parity.

use std::sync::Arc;

use symcurrent::prelude::*;

fn main() -> Result<()> {
    let ring = Arc::new(Grid::line(Axis::periodic(0.0, 12.0, 12)?));
    let shift = make_transform(TransformKind::Translation { offset: vec![4] }, &ring)?;
    println!("translation by 4 cells on a 12-point ring has order {}", shift.order());
    let back = compose(&shift, &invert(&shift))?;
    println!("translation ∘ inverse is identity: {}", back.is_identity());

    let square = Arc::new(Grid::plane(Axis::periodic(-3.0, 6.0, 12)?, Axis::periodic(-3.0, 6.0, 12)?));
    let quarter = make_transform(TransformKind::Rotation90 { quarter_turns: 1 }, &square)?;
    println!("quarter turn on a 12x12 square has order {}", quarter.order());

    let line = Arc::new(Grid::line(Axis::dirichlet(-5.0, 5.0, 101)?));
    let parity = make_transform(TransformKind::Parity { center: vec![0.0] }, &line)?;
    let bump = ComplexField::from_fn(line.clone(), |x| C64::new((-(x[0] - 1.0).powi(2)).exp(), 0.0));
    let mirrored = apply_transform(&parity, &bump)?;
    println!(
        "parity moves a bump at x = 1 to x = {:.2}",
        line.coords(argmax(&mirrored))[0]
    );

    type Profile1d = fn(f64) -> f64;
    let cases: [(&str, Profile1d, Profile1d); 4] = [
        ("harmonic, no gain/loss", |x| 0.5 * x * x, |_| 0.0),
        ("harmonic, W = 0.3x", |x| 0.5 * x * x, |x| 0.3 * x),
        ("harmonic, W = 0.2 e^{-x²}", |x| 0.5 * x * x, |x| 0.2 * (-x * x).exp()),
        ("anharmonic x² + x³, W = 0.3x", |x| x * x + x * x * x, |x| 0.3 * x),
    ];
    for (label, v, w) in cases {
        let h = Hamiltonian::from_fns(&line, move |x| v(x[0]), move |x| w(x[0]))?;
        let verdict = classify_symmetry(&h, &parity, None)?;
        let kinds: Vec<&str> = PairingTag::ALL
            .iter()
            .filter(|k| k.applies(&h, &verdict))
            .map(|k| k.name())
            .collect();
        println!("{label:<30} rows {verdict:<6} conserved kinds: {}", kinds.join(", "));
    }
    Ok(())
}

fn argmax(f: &ComplexField) -> usize {
    (0..f.len())
        .max_by(|&a, &b| f.values()[a].norm().total_cmp(&f.values()[b].norm()))
        .unwrap()
}
