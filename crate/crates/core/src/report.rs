//! Output files of a scenario run.
//!
//! ```text
//! DIR/
//!   summary.json
//!   index.csv                     m, t, max|ψ| per field, solve residual
//!   snapshots/<field>_<m>.csv     every `stride` time indices
//!   conservation_<kind>.csv       t, Re(C), Im(C), Re(flux), Im(flux), residual_L2
//!   conservation_<kind>.json      drift, max residual, classification, verdict
//!   lagrangian.csv                Euler–Lagrange, split and invariance diagnostics
//!   mixed_expectation.csv         t, Re/Im of ∫ψ₋*H₊ψ₊ and ∫ψ₋*H∘ψ₊
//! ```
//!
//! Nothing depends on the clock or on absolute paths, so identical inputs
//! produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::error::{Error, Result};
use crate::io::write_field_csv;
use crate::propagator::{Slot, Trajectory};
use crate::runner::{KindOutcome, RunOutput};

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn snapshot_name(field: &str, m: i64) -> String {
    format!("{field}_{m:+06}.csv")
}

/// Writes snapshot CSVs for `m ≡ -M (mod stride)` plus `index.csv`.
pub fn write_trajectory(traj: &Trajectory, stride: usize, dir: &Path) -> Result<Vec<PathBuf>> {
    let snap_dir = dir.join("snapshots");
    fs::create_dir_all(&snap_dir).map_err(|e| Error::io(&snap_dir, e))?;
    let mm = traj.half_steps() as i64;
    let slots: Vec<(&str, Slot)> = if traj.is_pair() {
        vec![("plus", Slot::Primary), ("minus", Slot::Minus)]
    } else {
        vec![("psi", Slot::Primary)]
    };
    let mut written = Vec::new();
    for m in traj.indices() {
        if (m + mm) % stride as i64 != 0 {
            continue;
        }
        for (name, slot) in &slots {
            let path = snap_dir.join(snapshot_name(name, m));
            write_field_csv(&path, traj.get(*slot, m)?)?;
            written.push(path);
        }
    }

    let mut index = String::from("m,t");
    for (name, _) in &slots {
        write!(index, ",max_abs_{name}").unwrap();
    }
    index.push_str(",solve_residual\n");
    for r in traj.records() {
        write!(index, "{},{:e}", r.m, r.t).unwrap();
        for v in &r.max_abs {
            write!(index, ",{v:e}").unwrap();
        }
        writeln!(index, ",{:e}", r.solve_residual).unwrap();
    }
    let path = dir.join("index.csv");
    write(&path, &index)?;
    written.push(path);
    Ok(written)
}

fn conservation_csv(k: &KindOutcome) -> String {
    let r = &k.report;
    let mut s = String::from("t,Re(C),Im(C),Re(flux),Im(flux),residual_L2\n");
    for i in 0..r.times.len() {
        let residual = r.residual_norm[i].map(|v| format!("{v:e}")).unwrap_or_default();
        writeln!(
            s,
            "{:e},{:e},{:e},{:e},{:e},{}",
            r.times[i], r.charge[i].re, r.charge[i].im, r.boundary_flux[i].re, r.boundary_flux[i].im, residual
        )
        .unwrap();
    }
    s
}

fn kind_json(k: &KindOutcome) -> serde_json::Value {
    json!({
        "kind": k.kind,
        "verdict": k.verdict,
        "negative_control": k.negative_control,
        "drift": k.report.drift,
        "max_residual": k.report.max_residual,
        "max_bookkeeping": k.report.max_bookkeeping(),
        "charge_at_zero": [k.report.charge_at_zero().re, k.report.charge_at_zero().im],
        "classification": {
            "cases": k.classification.cases,
            "potential_defect": k.classification.potential_defect,
            "even_defect": k.classification.even_defect,
            "odd_defect": k.classification.odd_defect,
            "tolerance": k.classification.tolerance,
        },
    })
}

fn lagrangian_csv(out: &RunOutput) -> String {
    let mut s = String::from(
        "m,t,el_re_plus,el_im_plus,el_re_minus,el_im_minus,phase_residual,dilatation_residual,reconstruction_defect,lagrangian_integral",
    );
    for k in 0..out.prepared.phi.len() {
        write!(s, ",invariance_{k}").unwrap();
    }
    s.push('\n');
    for row in &out.lagrangian {
        write!(s, "{},{:e}", row.m, row.t).unwrap();
        for v in row.euler_lagrange.as_array() {
            write!(s, ",{v:e}").unwrap();
        }
        write!(
            s,
            ",{:e},{:e},{:e},{:e}",
            row.phase_residual, row.dilatation_residual, row.reconstruction_defect, row.integral
        )
        .unwrap();
        for v in &row.invariance {
            write!(s, ",{v:e}").unwrap();
        }
        s.push('\n');
    }
    s
}

fn expectation_csv(out: &RunOutput) -> String {
    let mut s = String::from("t,Re(H_mixed),Im(H_mixed),Re(H_hermitian),Im(H_hermitian)\n");
    for ((t, a), (_, b)) in out.mixed_expectation.iter().zip(&out.hermitian_expectation) {
        writeln!(s, "{t:e},{:e},{:e},{:e},{:e}", a.re, a.im, b.re, b.im).unwrap();
    }
    s
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

/// `summary.json` contents.
pub fn summary(out: &RunOutput) -> serde_json::Value {
    let p = &out.prepared;
    let rows = &out.lagrangian;
    let el: Vec<f64> = (0..4)
        .map(|i| max_of(rows.iter().map(|r| r.euler_lagrange.as_array()[i])))
        .collect();
    json!({
        "scenario": p.scenario.name,
        "refine": p.refine,
        "seed": p.scenario.seed,
        "dt": p.scenario.dt,
        "steps": p.scenario.steps,
        "dual": p.scenario.dual,
        "grid": p.grid.axes(),
        "verdicts": out.kinds.iter().map(kind_json).collect::<Vec<_>>(),
        "mixed_expectation_variation": out.mixed_expectation_variation(),
        "hermitian_expectation_variation": out.hermitian_expectation_variation(),
        "lagrangian": {
            "phi_samples": p.phi,
            "max_euler_lagrange": el,
            "max_phase_residual": max_of(rows.iter().map(|r| r.phase_residual)),
            "max_dilatation_residual": max_of(rows.iter().map(|r| r.dilatation_residual)),
            "max_reconstruction_defect": max_of(rows.iter().map(|r| r.reconstruction_defect)),
            "max_invariance": max_of(rows.iter().flat_map(|r| r.invariance.iter().copied())),
        },
    })
}

/// Writes every output file into `dir` (created if needed) and returns
/// their paths in a fixed order.
pub fn write_report(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = write_trajectory(&out.trajectory, out.prepared.scenario.stride, dir)?;
    for k in &out.kinds {
        let csv = dir.join(format!("conservation_{}.csv", k.kind));
        write(&csv, &conservation_csv(k))?;
        let js = dir.join(format!("conservation_{}.json", k.kind));
        write(&js, &pretty(&kind_json(k)))?;
        written.extend([csv, js]);
    }
    let lag = dir.join("lagrangian.csv");
    write(&lag, &lagrangian_csv(out))?;
    let hbar = dir.join("mixed_expectation.csv");
    write(&hbar, &expectation_csv(out))?;
    let sum = dir.join("summary.json");
    write(&sum, &pretty(&summary(out)))?;
    written.extend([lag, hbar, sum]);
    Ok(written)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}
