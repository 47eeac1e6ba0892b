//! Generalized continuity equations for dual non-Hermitian Schrödinger
//! fields on 1D and 2D grids.
//!
//! The crate evolves pairs `ψ±` under `H± = -½∇² + V ± iW`, builds the
//! mixed, bitemporal, bilocal and combined densities and currents, and
//! checks their continuity equations, charges, and the two-field Lagrangian
//! identities on the sampled data.
//!
//! ```no_run
//! use std::sync::Arc;
//! use symcurrent::prelude::*;
//!
//! let grid = Arc::new(Grid::line(Axis::dirichlet(-10.0, 10.0, 401)?));
//! let h = Hamiltonian::from_fns(&grid, |x| 0.5 * x[0] * x[0], |x| 0.3 * x[0])?;
//! let psi0 = ComplexField::from_fn(grid.clone(), |x| (-(x[0] - 0.5).powi(2)).exp().into());
//! let traj = evolve_dual(&h, &psi0, &psi0, 1e-3, 500)?;
//! let report = charge_series(&Pairing::Mixed, &traj)?;
//! assert!(report.drift < 1e-10);
//! # Ok::<(), symcurrent::Error>(())
//! ```

pub mod conservation;
pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod io;
pub mod lagrangian;
pub mod linalg;
pub mod propagator;
pub mod report;
pub mod runner;
pub mod scenario;
pub mod symmetry;

pub use error::{Error, Result};

/// The names most programs need.
pub mod prelude {
    pub use crate::conservation::{
        boundary_flux, charge_series, continuity_residual, pair_current, pair_density, spatial_current_profile,
        stationary_current_profile, ConservationReport, Pairing, PairingTag,
    };
    pub use crate::error::{Error, Result};
    pub use crate::grid::{
        divergence, gradient, inner, integrate, laplacian, Axis, Boundary, ComplexField, Grid, RealField,
        VectorField, C64,
    };
    pub use crate::hamiltonian::{
        apply_hamiltonian, apply_hermitian_part, classify_symmetry, mixed_expectation, Hamiltonian, Preset,
        Profile, Sign, SymmetryCase, SymmetryVerdict,
    };
    pub use crate::lagrangian::{
        apply_phase_dilation, apply_phase_dilation_complex, euler_lagrange_residual, invariance_residual,
        invariance_residual_fields, split_continuity_residuals, two_field_lagrangian_density, PhaseDilation,
    };
    pub use crate::propagator::{
        cn_step, evolve_dual, evolve_dual_with, evolve_two_sided, evolve_two_sided_with, stationary_state,
        step_splitstep, EvolveOptions, Scheme, Slot, StationaryState, Trajectory,
    };
    pub use crate::symmetry::{
        apply_transform, compose, invert, make_transform, SpatialTransform, TransformKind, TransformSpec,
    };
}
