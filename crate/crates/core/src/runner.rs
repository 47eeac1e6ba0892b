//! Scenario pipeline: classify, evolve, analyze.

use serde::Serialize;

use crate::conservation::{charge_series, relative_drift, ConservationReport, PairingTag};
use crate::error::{Error, Result};
use crate::grid::{inner, C64};
use crate::hamiltonian::{apply_hermitian_part, mixed_expectation, Sign, SymmetryVerdict};
use crate::lagrangian::{
    euler_lagrange_residual, invariance_residual, lagrangian_integral, split_continuity_residuals, EulerLagrange,
};
use crate::propagator::{evolve_dual_with, evolve_two_sided_with, EvolveOptions, Trajectory};
use crate::scenario::Prepared;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "CONSERVED")]
    Conserved,
    #[serde(rename = "VIOLATED")]
    Violated,
    #[serde(rename = "NOT-APPLICABLE")]
    NotApplicable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Conserved => "CONSERVED",
            Verdict::Violated => "VIOLATED",
            Verdict::NotApplicable => "NOT-APPLICABLE",
        })
    }
}

/// Analysis of one pairing kind.
#[derive(Clone, Debug)]
pub struct KindOutcome {
    pub kind: PairingTag,
    pub verdict: Verdict,
    pub negative_control: bool,
    pub classification: SymmetryVerdict,
    pub report: ConservationReport,
}

impl KindOutcome {
    /// One-line verdict as printed by the CLI.
    pub fn line(&self) -> String {
        format!(
            "{:<15} {:<14} drift={:.3e} max_residual={:.3e} classification={}",
            self.kind.name(),
            self.verdict.to_string(),
            self.report.drift,
            self.report.max_residual,
            self.classification
        )
    }
}

/// Lagrangian diagnostics at one interior time index.
#[derive(Clone, Debug, Serialize)]
pub struct LagrangianRow {
    pub m: i64,
    pub t: f64,
    pub euler_lagrange: EulerLagrange,
    pub phase_residual: f64,
    pub dilatation_residual: f64,
    pub reconstruction_defect: f64,
    pub integral: f64,
    /// Relative invariance residual for each `φ` sample.
    pub invariance: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub prepared: Prepared,
    pub trajectory: Trajectory,
    pub kinds: Vec<KindOutcome>,
    pub lagrangian: Vec<LagrangianRow>,
    /// `(t, ∫ψ₋* H₊ ψ₊)`
    pub mixed_expectation: Vec<(f64, C64)>,
    /// `(t, ∫ψ₋* H∘ ψ₊)`
    pub hermitian_expectation: Vec<(f64, C64)>,
}

impl RunOutput {
    /// `max |H̄(t) - H̄(0)| / |H̄(0)|`.
    pub fn mixed_expectation_variation(&self) -> f64 {
        variation(&self.mixed_expectation)
    }

    pub fn hermitian_expectation_variation(&self) -> f64 {
        variation(&self.hermitian_expectation)
    }
}

fn variation(series: &[(f64, C64)]) -> f64 {
    let values: Vec<C64> = series.iter().map(|(_, c)| *c).collect();
    relative_drift(&values, values[values.len() / 2])
}

/// Evolves the prepared scenario.
pub fn evolve(p: &Prepared) -> Result<Trajectory> {
    let opts = EvolveOptions {
        scheme: p.scenario.scheme,
        ..EvolveOptions::default()
    };
    let (dt, m) = (p.scenario.dt, p.scenario.steps);
    if p.scenario.dual {
        evolve_dual_with(&p.hamiltonian, &p.plus0, &p.minus0, dt, m, &opts)
    } else {
        evolve_two_sided_with(&p.hamiltonian, Sign::Plus, &p.plus0, dt, m, &opts)
    }
}

/// Charge, flux and residual report for one kind with its verdict.
pub fn analyze_kind(p: &Prepared, traj: &Trajectory, kind: PairingTag) -> Result<KindOutcome> {
    let pairing = kind.with_transform(p.transform.as_ref())?;
    let (classification, applies) = pairing.check(&p.hamiltonian)?;
    let negative_control = p.scenario.negative_controls.contains(&kind);
    let report = charge_series(&pairing, traj)?;
    let verdict = if !applies && !negative_control {
        Verdict::NotApplicable
    } else if report.drift < p.scenario.drift_threshold {
        Verdict::Conserved
    } else {
        Verdict::Violated
    };
    Ok(KindOutcome {
        kind,
        verdict,
        negative_control,
        classification,
        report,
    })
}

pub fn lagrangian_rows(p: &Prepared, traj: &Trajectory) -> Result<Vec<LagrangianRow>> {
    let h = &p.hamiltonian;
    let mm = traj.half_steps() as i64;
    (-(mm - 1)..=(mm - 1))
        .map(|m| {
            let split = split_continuity_residuals(traj, m)?;
            let invariance = p
                .phi
                .iter()
                .map(|phi| invariance_residual(h, traj, *phi, m).map(|r| r.relative()))
                .collect::<Result<Vec<_>>>()?;
            Ok(LagrangianRow {
                m,
                t: traj.time(m),
                euler_lagrange: euler_lagrange_residual(h, traj, m)?,
                phase_residual: split.phase_norm,
                dilatation_residual: split.dilatation_norm,
                reconstruction_defect: split.reconstruction_defect,
                integral: lagrangian_integral(h, traj, m)?,
                invariance,
            })
        })
        .collect()
}

/// Runs everything after preparation. An overflow is returned as
/// [`Error::FieldOverflow`] carrying the completed window.
pub fn run(prepared: Prepared) -> Result<RunOutput> {
    let trajectory = evolve(&prepared)?;
    let kinds = prepared
        .scenario
        .kinds
        .iter()
        .map(|&k| analyze_kind(&prepared, &trajectory, k))
        .collect::<Result<Vec<_>>>()?;
    let lagrangian = lagrangian_rows(&prepared, &trajectory)?;
    let mut mixed = Vec::new();
    let mut hermitian = Vec::new();
    for m in trajectory.indices() {
        let (plus, minus) = trajectory.dual(m)?;
        let t = trajectory.time(m);
        mixed.push((t, mixed_expectation(&prepared.hamiltonian, &minus, &plus)?));
        hermitian.push((t, inner(&minus, &apply_hermitian_part(&prepared.hamiltonian, &plus)?)?));
    }
    Ok(RunOutput {
        prepared,
        trajectory,
        kinds,
        lagrangian,
        mixed_expectation: mixed,
        hermitian_expectation: hermitian,
    })
}

/// Process exit status for an error: 3 for overflow, 2 for solver
/// failures, 1 for everything else (configuration and I/O).
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::FieldOverflow { .. } => 3,
        Error::Step { source, .. } if matches!(**source, Error::FieldOverflow { .. }) => 3,
        Error::Step { .. }
        | Error::SolverBreakdown { .. }
        | Error::NoConvergence { .. }
        | Error::ShiftIsEigenvalue { .. }
        | Error::NonPeriodicGrid
        | Error::NotOneDimensional => 2,
        _ => 1,
    }
}
