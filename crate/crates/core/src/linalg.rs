//! Complex tridiagonal and cyclic-tridiagonal solvers.

use crate::error::{Error, Result};
use crate::grid::C64;

/// `sub[i]` couples row `i + 1` to column `i`, `sup[i]` couples row `i` to
/// column `i + 1`. `corner` holds the cyclic entries `(A[0][n-1], A[n-1][0])`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<C64>,
    pub diag: Vec<C64>,
    pub sup: Vec<C64>,
    pub corner: Option<(C64, C64)>,
}

impl Tridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul(&self, x: &[C64]) -> Vec<C64> {
        let n = self.len();
        let mut y: Vec<C64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n - 1 {
            y[i] += self.sup[i] * x[i + 1];
            y[i + 1] += self.sub[i] * x[i];
        }
        if let Some((top_right, bottom_left)) = self.corner {
            y[0] += top_right * x[n - 1];
            y[n - 1] += bottom_left * x[0];
        }
        y
    }
}

/// Thomas elimination without pivoting. Reports a zero pivot rather than
/// regularizing it.
#[derive(Clone, Debug)]
pub struct Thomas {
    sub: Vec<C64>,
    sup_scaled: Vec<C64>,
    pivot_inv: Vec<C64>,
}

impl Thomas {
    pub fn factor(sub: &[C64], diag: &[C64], sup: &[C64]) -> Result<Self> {
        let n = diag.len();
        let mut sup_scaled = vec![C64::new(0.0, 0.0); n.saturating_sub(1)];
        let mut pivot_inv = vec![C64::new(0.0, 0.0); n];
        let mut pivot = diag[0];
        for i in 0..n {
            if i > 0 {
                pivot = diag[i] - sub[i - 1] * sup_scaled[i - 1];
            }
            if pivot.norm() == 0.0 || !pivot.is_finite() {
                return Err(Error::SolverBreakdown { row: i });
            }
            pivot_inv[i] = pivot.inv();
            if i + 1 < n {
                sup_scaled[i] = sup[i] * pivot_inv[i];
            }
        }
        Ok(Thomas {
            sub: sub.to_vec(),
            sup_scaled,
            pivot_inv,
        })
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = b.len();
        b[0] *= self.pivot_inv[0];
        for i in 1..n {
            b[i] = (b[i] - self.sub[i - 1] * b[i - 1]) * self.pivot_inv[i];
        }
        for i in (0..n - 1).rev() {
            b[i] -= self.sup_scaled[i] * b[i + 1];
        }
    }
}

/// Tridiagonal LU with partial pivoting (the `gttrf`/`gttrs` scheme). Used
/// for shifted systems that are far from diagonally dominant.
#[derive(Clone, Debug)]
pub struct PivotedLu {
    dl: Vec<C64>,
    d: Vec<C64>,
    du: Vec<C64>,
    du2: Vec<C64>,
    swapped: Vec<bool>,
}

fn cabs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

impl PivotedLu {
    pub fn factor(sub: &[C64], diag: &[C64], sup: &[C64]) -> Result<Self> {
        let n = diag.len();
        let mut dl = sub.to_vec();
        let mut d = diag.to_vec();
        let mut du = sup.to_vec();
        let mut du2 = vec![C64::new(0.0, 0.0); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if cabs1(d[i]) >= cabs1(dl[i]) {
                if d[i].norm() != 0.0 {
                    let fact = dl[i] / d[i];
                    dl[i] = fact;
                    d[i + 1] -= fact * du[i];
                }
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if let Some(row) = d.iter().position(|p| p.norm() == 0.0 || !p.is_finite()) {
            return Err(Error::SolverBreakdown { row });
        }
        Ok(PivotedLu {
            dl,
            d,
            du,
            du2,
            swapped,
        })
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = b.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Factorization of a plain tridiagonal matrix.
pub trait BandFactor: Sized {
    fn factor(sub: &[C64], diag: &[C64], sup: &[C64]) -> Result<Self>;
    fn solve_in_place(&self, b: &mut [C64]);
}

impl BandFactor for Thomas {
    fn factor(sub: &[C64], diag: &[C64], sup: &[C64]) -> Result<Self> {
        Thomas::factor(sub, diag, sup)
    }

    fn solve_in_place(&self, b: &mut [C64]) {
        Thomas::solve_in_place(self, b)
    }
}

impl BandFactor for PivotedLu {
    fn factor(sub: &[C64], diag: &[C64], sup: &[C64]) -> Result<Self> {
        PivotedLu::factor(sub, diag, sup)
    }

    fn solve_in_place(&self, b: &mut [C64]) {
        PivotedLu::solve_in_place(self, b)
    }
}

/// Solver for a [`Tridiagonal`] system, cyclic or not. Cyclic systems use a
/// Sherman–Morrison rank-one correction on top of the band factorization.
#[derive(Clone, Debug)]
pub struct TridiagonalSolver<F> {
    band: F,
    cyclic: Option<Cyclic>,
}

#[derive(Clone, Debug)]
struct Cyclic {
    // v = (1, 0, ..., 0, v_last); z solves T z = u
    v_last: C64,
    z: Vec<C64>,
    denom_inv: C64,
}

impl<F: BandFactor> TridiagonalSolver<F> {
    pub fn new(m: &Tridiagonal) -> Result<Self> {
        let n = m.len();
        match m.corner {
            None => Ok(TridiagonalSolver {
                band: F::factor(&m.sub, &m.diag, &m.sup)?,
                cyclic: None,
            }),
            Some((top_right, bottom_left)) => {
                let gamma = if m.diag[0].norm() != 0.0 {
                    -m.diag[0]
                } else {
                    C64::new(-1.0, 0.0)
                };
                let mut diag = m.diag.clone();
                diag[0] -= gamma;
                diag[n - 1] -= bottom_left * top_right / gamma;
                let band = F::factor(&m.sub, &diag, &m.sup)?;
                let mut z = vec![C64::new(0.0, 0.0); n];
                z[0] = gamma;
                z[n - 1] = bottom_left;
                band.solve_in_place(&mut z);
                let v_last = top_right / gamma;
                let denom = C64::new(1.0, 0.0) + z[0] + v_last * z[n - 1];
                if denom.norm() == 0.0 || !denom.is_finite() {
                    return Err(Error::SolverBreakdown { row: n - 1 });
                }
                Ok(TridiagonalSolver {
                    band,
                    cyclic: Some(Cyclic {
                        v_last,
                        z,
                        denom_inv: denom.inv(),
                    }),
                })
            }
        }
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        self.band.solve_in_place(b);
        if let Some(c) = &self.cyclic {
            let n = b.len();
            let factor = (b[0] + c.v_last * b[n - 1]) * c.denom_inv;
            for (bi, zi) in b.iter_mut().zip(&c.z) {
                *bi -= factor * zi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rc(rng: &mut ChaCha8Rng) -> C64 {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn random_system(n: usize, cyclic: bool, dominant: bool, seed: u64) -> (Tridiagonal, Vec<C64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sub: Vec<C64> = (0..n - 1).map(|_| rc(&mut rng)).collect();
        let sup: Vec<C64> = (0..n - 1).map(|_| rc(&mut rng)).collect();
        let diag: Vec<C64> = (0..n)
            .map(|_| if dominant { rc(&mut rng) + 4.0 } else { rc(&mut rng) * 0.1 })
            .collect();
        let corner = cyclic.then(|| (rc(&mut rng), rc(&mut rng)));
        let x: Vec<C64> = (0..n).map(|_| rc(&mut rng)).collect();
        (Tridiagonal { sub, diag, sup, corner }, x)
    }

    fn check<F: BandFactor>(m: &Tridiagonal, x: &[C64], tol: f64) {
        let mut b = m.mul(x);
        TridiagonalSolver::<F>::new(m).unwrap().solve_in_place(&mut b);
        for (u, v) in b.iter().zip(x) {
            assert!((u - v).norm() < tol, "{u} vs {v}");
        }
    }

    #[test]
    fn thomas_solves_dominant_systems() {
        for (n, cyc) in [(4, false), (9, false), (50, true), (5, true)] {
            let (m, x) = random_system(n, cyc, true, n as u64);
            check::<Thomas>(&m, &x, 1e-12);
        }
    }

    #[test]
    fn pivoted_solves_indefinite_systems() {
        for (n, cyc) in [(4, false), (31, false), (40, true)] {
            let (m, x) = random_system(n, cyc, false, 100 + n as u64);
            check::<PivotedLu>(&m, &x, 1e-9);
        }
    }

    #[test]
    fn zero_pivot_is_reported() {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let err = Thomas::factor(&[one, one, one], &[one, one, zero, one], &[one, one, one]);
        // second pivot is 1 - 1*1 = 0
        assert!(matches!(err, Err(Error::SolverBreakdown { row: 1 })));
        // pivoting steps over it
        assert!(PivotedLu::factor(&[one, one, one], &[one, one, zero, one], &[one, one, one]).is_ok());
        // but a singular matrix still fails
        let err = PivotedLu::factor(&[zero, zero, zero], &[one, zero, one, one], &[zero, zero, zero]);
        assert!(matches!(err, Err(Error::SolverBreakdown { row: 1 })));
    }
}
