//! Time evolution under `i ∂ₜψ± = H± ψ±` and stationary states.
//!
//! One-dimensional grids use Crank–Nicolson (the Cayley map
//! `(1 + iτH)⁻¹(1 - iτH)`, `τ = dt/2`) with a tridiagonal solve; periodic
//! grids of any dimension can use Strang split-step instead.
//!
//! For the dual pair the Cayley maps satisfy `U₋† U₊ = I` whenever
//! `H₋† = H₊`, which holds for every real `V`, `W`. The mixed charge
//! `⟨ψ₋, ψ₊⟩` is therefore conserved up to solver rounding, independently of
//! the step size. The split-step maps share the property: each factor of
//! `U₋†` inverts the matching factor of `U₊`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{inner, Boundary, ComplexField, Grid, C64};
use crate::hamiltonian::{apply_hamiltonian, Hamiltonian, Sign};
use crate::linalg::{PivotedLu, Thomas, Tridiagonal, TridiagonalSolver};

/// Time-stepping scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Crank–Nicolson in 1D, split-step on periodic 2D grids.
    #[default]
    Auto,
    CrankNicolson,
    SplitStep,
}

/// Matrix of `H±` on a 1D grid (cyclic corners on periodic grids).
pub fn hamiltonian_matrix(h: &Hamiltonian, sign: Sign) -> Result<Tridiagonal> {
    let grid = h.grid();
    if grid.dim() != 1 {
        return Err(Error::NotOneDimensional);
    }
    let axis = grid.axis(0);
    let n = axis.n;
    let kin = 1.0 / (axis.dx * axis.dx);
    let off = C64::new(-0.5 * kin, 0.0);
    let diag = h
        .diagonal(sign)
        .into_iter()
        .map(|d| d + kin)
        .collect();
    Ok(Tridiagonal {
        sub: vec![off; n - 1],
        diag,
        sup: vec![off; n - 1],
        corner: (axis.bc == Boundary::Periodic).then_some((off, off)),
    })
}

/// `a · I + b · M` for a tridiagonal `M`.
fn affine(m: &Tridiagonal, a: C64, b: C64) -> Tridiagonal {
    Tridiagonal {
        sub: m.sub.iter().map(|x| x * b).collect(),
        diag: m.diag.iter().map(|x| a + x * b).collect(),
        sup: m.sup.iter().map(|x| x * b).collect(),
        corner: m.corner.map(|(p, q)| (p * b, q * b)),
    }
}

/// Crank–Nicolson stepper with the implicit matrix factored once.
#[derive(Clone, Debug)]
pub struct CnStepper {
    grid: Arc<Grid>,
    implicit: Tridiagonal,
    explicit: Tridiagonal,
    solver: TridiagonalSolver<Thomas>,
}

impl CnStepper {
    pub fn new(h: &Hamiltonian, sign: Sign, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        let m = hamiltonian_matrix(h, sign)?;
        let one = C64::new(1.0, 0.0);
        let implicit = affine(&m, one, C64::new(0.0, dt / 2.0));
        let explicit = affine(&m, one, C64::new(0.0, -dt / 2.0));
        let solver = TridiagonalSolver::new(&implicit)?;
        Ok(CnStepper {
            grid: h.grid().clone(),
            implicit,
            explicit,
            solver,
        })
    }

    /// Advances `f` by one step; also returns the relative residual of the
    /// linear solve (max-norm).
    pub fn step(&self, f: &ComplexField) -> Result<(ComplexField, f64)> {
        crate::grid::ensure_same_grid(&self.grid, f.grid())?;
        let rhs = self.explicit.mul(f.values());
        let mut x = rhs.clone();
        self.solver.solve_in_place(&mut x);
        let back = self.implicit.mul(&x);
        let scale = rhs.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let err = back
            .iter()
            .zip(&rhs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let rel = if scale > 0.0 { err / scale } else { 0.0 };
        Ok((ComplexField::from_raw(self.grid.clone(), x), rel))
    }
}

/// Strang split-step stepper for fully periodic grids.
pub struct SplitStepper {
    grid: Arc<Grid>,
    half_potential: Vec<C64>,
    kinetic: Vec<C64>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for SplitStepper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SplitStepper").field("grid", &self.grid).finish_non_exhaustive()
    }
}

/// Spectral wavenumbers of a periodic axis in FFT order.
fn wavenumbers(n: usize, dx: f64) -> Vec<f64> {
    let l = n as f64 * dx;
    (0..n)
        .map(|j| {
            let m = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
            2.0 * std::f64::consts::PI * m as f64 / l
        })
        .collect()
}

impl SplitStepper {
    pub fn new(h: &Hamiltonian, sign: Sign, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        let grid = h.grid().clone();
        if !grid.is_periodic() {
            return Err(Error::NonPeriodicGrid);
        }
        let half_potential = h
            .diagonal(sign)
            .into_iter()
            .map(|d| (C64::new(0.0, -dt / 2.0) * d).exp())
            .collect();
        let ks: Vec<Vec<f64>> = grid.axes().iter().map(|a| wavenumbers(a.n, a.dx)).collect();
        let norm = 1.0 / grid.len() as f64;
        let kinetic = (0..grid.len())
            .map(|p| {
                let idx = grid.unflatten(p);
                let k2: f64 = (0..grid.dim()).map(|a| ks[a][idx[a]].powi(2)).sum();
                C64::new(0.0, -dt * k2 / 2.0).exp() * norm
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = grid.axes().iter().map(|a| planner.plan_fft_forward(a.n)).collect();
        let inverse = grid.axes().iter().map(|a| planner.plan_fft_inverse(a.n)).collect();
        Ok(SplitStepper {
            grid,
            half_potential,
            kinetic,
            forward,
            inverse,
        })
    }

    fn transform(&self, data: &mut [C64], plans: &[Arc<dyn Fft<f64>>]) {
        match self.grid.dim() {
            1 => plans[0].process(data),
            _ => {
                let (n0, n1) = (self.grid.axis(0).n, self.grid.axis(1).n);
                // rows (axis 1) are contiguous
                plans[1].process(data);
                let mut t = vec![C64::new(0.0, 0.0); data.len()];
                for i in 0..n0 {
                    for j in 0..n1 {
                        t[j * n0 + i] = data[i * n1 + j];
                    }
                }
                plans[0].process(&mut t);
                for i in 0..n0 {
                    for j in 0..n1 {
                        data[i * n1 + j] = t[j * n0 + i];
                    }
                }
            }
        }
    }

    pub fn step(&self, f: &ComplexField) -> Result<ComplexField> {
        crate::grid::ensure_same_grid(&self.grid, f.grid())?;
        let mut v: Vec<C64> = f
            .values()
            .iter()
            .zip(&self.half_potential)
            .map(|(a, b)| a * b)
            .collect();
        self.transform(&mut v, &self.forward);
        for (a, k) in v.iter_mut().zip(&self.kinetic) {
            *a *= k;
        }
        self.transform(&mut v, &self.inverse);
        for (a, b) in v.iter_mut().zip(&self.half_potential) {
            *a *= b;
        }
        Ok(ComplexField::from_raw(self.grid.clone(), v))
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if dt == 0.0 || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("time step must be finite and nonzero, got {dt}")));
    }
    Ok(())
}

/// A single-step propagator of either scheme.
#[derive(Debug)]
pub enum Stepper {
    CrankNicolson(CnStepper),
    SplitStep(SplitStepper),
}

impl Stepper {
    pub fn new(h: &Hamiltonian, sign: Sign, dt: f64, scheme: Scheme) -> Result<Self> {
        let grid = h.grid();
        match scheme {
            Scheme::CrankNicolson => Ok(Stepper::CrankNicolson(CnStepper::new(h, sign, dt)?)),
            Scheme::SplitStep => Ok(Stepper::SplitStep(SplitStepper::new(h, sign, dt)?)),
            Scheme::Auto if grid.dim() == 1 => Ok(Stepper::CrankNicolson(CnStepper::new(h, sign, dt)?)),
            Scheme::Auto => Ok(Stepper::SplitStep(SplitStepper::new(h, sign, dt)?)),
        }
    }

    /// One step; the second value is the linear-solve residual (0 for split-step).
    pub fn step(&self, f: &ComplexField) -> Result<(ComplexField, f64)> {
        match self {
            Stepper::CrankNicolson(s) => s.step(f),
            Stepper::SplitStep(s) => Ok((s.step(f)?, 0.0)),
        }
    }
}

/// One Crank–Nicolson step (split-step on 2D periodic grids).
pub fn cn_step(h: &Hamiltonian, sign: Sign, f: &ComplexField, dt: f64) -> Result<ComplexField> {
    crate::grid::ensure_same_grid(h.grid(), f.grid())?;
    Ok(Stepper::new(h, sign, dt, Scheme::Auto)?.step(f)?.0)
}

/// One Strang split-step.
pub fn step_splitstep(h: &Hamiltonian, sign: Sign, f: &ComplexField, dt: f64) -> Result<ComplexField> {
    crate::grid::ensure_same_grid(h.grid(), f.grid())?;
    SplitStepper::new(h, sign, dt)?.step(f)
}

/// Per-snapshot diagnostics.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct StepRecord {
    pub m: i64,
    pub t: f64,
    /// `max |ψ|` of each stored field (one entry for single trajectories).
    pub max_abs: Vec<f64>,
    /// Largest relative linear-solve residual of the step that produced
    /// this snapshot (0 at `m = 0` and for split-step).
    pub solve_residual: f64,
}

#[derive(Clone, Debug)]
enum Fields {
    Single { sign: Sign, snapshots: Vec<ComplexField> },
    Pair { plus: Vec<ComplexField>, minus: Vec<ComplexField> },
}

/// Which stored field of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    /// The only field of a single trajectory, or `ψ₊` of a pair.
    Primary,
    /// `ψ₋` of a pair.
    Minus,
}

/// Snapshots at `t = m·dt` for `m ∈ [-M, M]`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    grid: Arc<Grid>,
    dt: f64,
    half_steps: usize,
    fields: Fields,
    records: Vec<StepRecord>,
}

impl Trajectory {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn half_steps(&self) -> usize {
        self.half_steps
    }

    pub fn time(&self, m: i64) -> f64 {
        m as f64 * self.dt
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i64> {
        let mm = self.half_steps as i64;
        -mm..=mm
    }

    pub fn is_pair(&self) -> bool {
        matches!(self.fields, Fields::Pair { .. })
    }

    /// Sign of the Hamiltonian that evolved the primary field.
    pub fn primary_sign(&self) -> Sign {
        match &self.fields {
            Fields::Single { sign, .. } => *sign,
            Fields::Pair { .. } => Sign::Plus,
        }
    }

    pub fn records(&self) -> &[StepRecord] {
        &self.records
    }

    fn offset(&self, m: i64) -> Result<usize> {
        let mm = self.half_steps as i64;
        if m < -mm || m > mm {
            return Err(Error::MissingSnapshot(format!("m = {m} (trajectory has |m| <= {mm})")));
        }
        Ok((m + mm) as usize)
    }

    pub fn get(&self, slot: Slot, m: i64) -> Result<&ComplexField> {
        let k = self.offset(m)?;
        match (&self.fields, slot) {
            (Fields::Single { snapshots, .. }, Slot::Primary) => Ok(&snapshots[k]),
            (Fields::Pair { plus, .. }, Slot::Primary) => Ok(&plus[k]),
            (Fields::Pair { minus, .. }, Slot::Minus) => Ok(&minus[k]),
            (Fields::Single { .. }, Slot::Minus) => {
                Err(Error::MissingSnapshot("ψ₋ of a single-field trajectory".into()))
            }
        }
    }

    /// The primary field at `m`.
    pub fn primary(&self, m: i64) -> Result<&ComplexField> {
        self.get(Slot::Primary, m)
    }

    /// `(ψ₊(m), ψ₋(m))`. A single trajectory evolved with `+` supplies
    /// `ψ₋(x, t) = ψ*(x, -t)`, which solves the `-` equation; with `-` the
    /// roles are mirrored.
    pub fn dual(&self, m: i64) -> Result<(ComplexField, ComplexField)> {
        match &self.fields {
            Fields::Pair { .. } => Ok((self.get(Slot::Primary, m)?.clone(), self.get(Slot::Minus, m)?.clone())),
            Fields::Single { sign, .. } => {
                let here = self.primary(m)?.clone();
                let mut mirror = self.primary(-m)?.conj();
                mirror.time = Some(self.time(m));
                Ok(match sign {
                    Sign::Plus => (here, mirror),
                    Sign::Minus => (mirror, here),
                })
            }
        }
    }

    /// Replaces one stored snapshot (fault injection, external data).
    pub fn replace(&mut self, slot: Slot, m: i64, field: ComplexField) -> Result<()> {
        crate::grid::ensure_same_grid(&self.grid, field.grid())?;
        let k = self.offset(m)?;
        let t = self.time(m);
        let target = match (&mut self.fields, slot) {
            (Fields::Single { snapshots, .. }, Slot::Primary) => &mut snapshots[k],
            (Fields::Pair { plus, .. }, Slot::Primary) => &mut plus[k],
            (Fields::Pair { minus, .. }, Slot::Minus) => &mut minus[k],
            (Fields::Single { .. }, Slot::Minus) => {
                return Err(Error::MissingSnapshot("ψ₋ of a single-field trajectory".into()))
            }
        };
        *target = field.with_time(t);
        Ok(())
    }

    /// Trajectory made of two single trajectories evolved separately, e.g.
    /// for negative controls with a deliberately wrong sign.
    pub fn pair_from(plus: &Trajectory, minus: &Trajectory) -> Result<Trajectory> {
        crate::grid::ensure_same_grid(&plus.grid, &minus.grid)?;
        if plus.dt != minus.dt || plus.half_steps != minus.half_steps {
            return Err(Error::InvalidArgument("trajectories differ in dt or length".into()));
        }
        let take = |t: &Trajectory| match &t.fields {
            Fields::Single { snapshots, .. } => Ok(snapshots.clone()),
            Fields::Pair { .. } => Err(Error::InvalidArgument("expected a single-field trajectory".into())),
        };
        let records = plus
            .records
            .iter()
            .zip(&minus.records)
            .map(|(a, b)| StepRecord {
                m: a.m,
                t: a.t,
                max_abs: a.max_abs.iter().chain(&b.max_abs).copied().collect(),
                solve_residual: a.solve_residual.max(b.solve_residual),
            })
            .collect();
        Ok(Trajectory {
            grid: plus.grid.clone(),
            dt: plus.dt,
            half_steps: plus.half_steps,
            fields: Fields::Pair {
                plus: take(plus)?,
                minus: take(minus)?,
            },
            records,
        })
    }
}

/// Evolution settings.
#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    pub scheme: Scheme,
    /// Abort once `max|ψ|` exceeds this multiple of its initial value.
    pub overflow_factor: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            scheme: Scheme::Auto,
            overflow_factor: 1e12,
        }
    }
}

struct Lane {
    sign: Sign,
    ahead: Vec<ComplexField>,
    behind: Vec<ComplexField>,
    fwd_res: Vec<f64>,
    bwd_res: Vec<f64>,
    limit: f64,
}

impl Lane {
    /// Snapshots `-m_done..=m_done` in time order.
    fn window(&self, m_done: usize) -> Vec<ComplexField> {
        self.behind[1..=m_done]
            .iter()
            .rev()
            .chain(&self.ahead[..=m_done])
            .cloned()
            .collect()
    }
}

fn assemble(grid: &Arc<Grid>, lanes: &[Lane], dt: f64, m_done: usize) -> Trajectory {
    let fields = match lanes {
        [single] => Fields::Single {
            sign: single.sign,
            snapshots: single.window(m_done),
        },
        [plus, minus] => Fields::Pair {
            plus: plus.window(m_done),
            minus: minus.window(m_done),
        },
        _ => unreachable!("one or two lanes"),
    };
    let mm = m_done as i64;
    let records = (-mm..=mm)
        .map(|m| {
            let k = m.unsigned_abs() as usize;
            let (snap, res): (Vec<f64>, Vec<f64>) = lanes
                .iter()
                .map(|l| {
                    if m < 0 {
                        (l.behind[k].max_abs(), l.bwd_res[k])
                    } else {
                        (l.ahead[k].max_abs(), l.fwd_res[k])
                    }
                })
                .unzip();
            StepRecord {
                m,
                t: m as f64 * dt,
                max_abs: snap,
                solve_residual: res.into_iter().fold(0.0, f64::max),
            }
        })
        .collect();
    Trajectory {
        grid: grid.clone(),
        dt,
        half_steps: m_done,
        fields,
        records,
    }
}

fn evolve_lanes(
    h: &Hamiltonian,
    initial: Vec<(Sign, ComplexField)>,
    dt: f64,
    half_steps: usize,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    check_dt(dt)?;
    let grid = h.grid();
    let mut steppers = Vec::with_capacity(initial.len());
    let mut lanes = Vec::with_capacity(initial.len());
    for (sign, psi0) in initial {
        crate::grid::ensure_same_grid(grid, psi0.grid())?;
        let wrap = |step| move |e| Error::Step { step, source: Box::new(e) };
        steppers.push((
            Stepper::new(h, sign, dt, opts.scheme).map_err(wrap(1))?,
            Stepper::new(h, sign, -dt, opts.scheme).map_err(wrap(-1))?,
        ));
        let limit = opts.overflow_factor * psi0.max_abs();
        let start = psi0.with_time(0.0);
        lanes.push(Lane {
            sign,
            ahead: vec![start.clone()],
            behind: vec![start],
            fwd_res: vec![0.0],
            bwd_res: vec![0.0],
            limit,
        });
    }
    // Forward and backward steps alternate so that an abort always leaves a
    // symmetric window behind.
    for j in 1..=half_steps {
        for k in 0..lanes.len() {
            for step in [j as i64, -(j as i64)] {
                let lane = &lanes[k];
                let (stepper, prev) = if step > 0 {
                    (&steppers[k].0, &lane.ahead[j - 1])
                } else {
                    (&steppers[k].1, &lane.behind[j - 1])
                };
                let (next, r) = stepper.step(prev).map_err(|e| Error::Step {
                    step,
                    source: Box::new(e),
                })?;
                let max_abs = next.max_abs();
                if !next.is_finite() || (lane.limit > 0.0 && max_abs > lane.limit) {
                    return Err(Error::FieldOverflow {
                        step,
                        max_abs,
                        window: Box::new(assemble(grid, &lanes, dt, j - 1)),
                    });
                }
                let lane = &mut lanes[k];
                let next = next.with_time(step as f64 * dt);
                if step > 0 {
                    lane.ahead.push(next);
                    lane.fwd_res.push(r);
                } else {
                    lane.behind.push(next);
                    lane.bwd_res.push(r);
                }
            }
        }
    }
    Ok(assemble(grid, &lanes, dt, half_steps))
}

/// Evolves `ψ₊` under `H₊` and `ψ₋` under `H₋` to `t = ±M·dt`.
pub fn evolve_dual(
    h: &Hamiltonian,
    plus0: &ComplexField,
    minus0: &ComplexField,
    dt: f64,
    half_steps: usize,
) -> Result<Trajectory> {
    evolve_dual_with(h, plus0, minus0, dt, half_steps, &EvolveOptions::default())
}

pub fn evolve_dual_with(
    h: &Hamiltonian,
    plus0: &ComplexField,
    minus0: &ComplexField,
    dt: f64,
    half_steps: usize,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    evolve_lanes(
        h,
        vec![(Sign::Plus, plus0.clone()), (Sign::Minus, minus0.clone())],
        dt,
        half_steps,
        opts,
    )
}

/// Evolves a single field under `H_sign` forward and backward from `t = 0`.
pub fn evolve_two_sided(
    h: &Hamiltonian,
    sign: Sign,
    psi0: &ComplexField,
    dt: f64,
    half_steps: usize,
) -> Result<Trajectory> {
    evolve_two_sided_with(h, sign, psi0, dt, half_steps, &EvolveOptions::default())
}

pub fn evolve_two_sided_with(
    h: &Hamiltonian,
    sign: Sign,
    psi0: &ComplexField,
    dt: f64,
    half_steps: usize,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    evolve_lanes(h, vec![(sign, psi0.clone())], dt, half_steps, opts)
}

/// Eigenpair of the discrete `H±`.
#[derive(Clone, Debug)]
pub struct StationaryState {
    /// Normalized so that `inner(field, field) = 1` with the largest
    /// component real and positive.
    pub field: ComplexField,
    pub energy: C64,
    /// `‖Hψ - Eψ‖ / ‖ψ‖`
    pub residual: f64,
    pub iterations: usize,
    pub sign: Sign,
    /// The shift actually used; differs from the request if it had to be
    /// perturbed off an eigenvalue.
    pub shift: C64,
    pub shift_perturbed: bool,
}

fn normalize_phase(f: &mut ComplexField) {
    let norm = f.norm();
    let peak = f
        .values()
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .unwrap_or(C64::new(1.0, 0.0));
    let rot = if peak.norm() > 0.0 { peak.conj() / peak.norm() } else { C64::new(1.0, 0.0) };
    let s = rot / norm;
    for v in f.values_mut() {
        *v *= s;
    }
}

/// Shifted inverse iteration on the 1D discrete `H±`, stopping once the
/// eigen-residual drops below `tol`.
pub fn stationary_state(
    h: &Hamiltonian,
    sign: Sign,
    shift: C64,
    tol: f64,
    max_iter: usize,
) -> Result<StationaryState> {
    let grid = h.grid().clone();
    if grid.dim() != 1 {
        return Err(Error::NotOneDimensional);
    }
    let m = hamiltonian_matrix(h, sign)?;
    let shifted = |s: C64| affine(&m, -s, C64::new(1.0, 0.0));
    let (solver, used, perturbed) = match TridiagonalSolver::<PivotedLu>::new(&shifted(shift)) {
        Ok(s) => (s, shift, false),
        Err(Error::SolverBreakdown { .. }) => {
            let moved = shift + C64::new(tol.max(f64::EPSILON), 0.0);
            match TridiagonalSolver::<PivotedLu>::new(&shifted(moved)) {
                Ok(s) => (s, moved, true),
                Err(_) => return Err(Error::ShiftIsEigenvalue { shift }),
            }
        }
        Err(e) => return Err(e),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let start = (0..grid.len())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut v = ComplexField::from_raw(grid.clone(), start);
    normalize_phase(&mut v);
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let mut w = v.values().to_vec();
        solver.solve_in_place(&mut w);
        let mut next = ComplexField::from_raw(grid.clone(), w);
        if !next.is_finite() || next.norm() == 0.0 {
            return Err(Error::ShiftIsEigenvalue { shift: used });
        }
        normalize_phase(&mut next);
        let hv = apply_hamiltonian(h, &next, sign)?;
        let energy = inner(&next, &hv)? / inner(&next, &next)?;
        residual = (&hv - &next.scale(energy)).norm() / next.norm();
        v = next;
        if residual < tol {
            return Ok(StationaryState {
                field: v,
                energy,
                residual,
                iterations: it,
                sign,
                shift: used,
                shift_perturbed: perturbed,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
    })
}
