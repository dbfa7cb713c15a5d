use crate::error::{Error, Result};
use crate::real::{ordered_sum, Real};

#[derive(Clone, Copy, Debug)]
pub struct CgOptions<T> {
    /// Stop when `||r||_2 <= rel_tol * ||b||_2`.
    pub rel_tol: T,
    pub max_iter: usize,
}

impl<T: Real> Default for CgOptions<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-13),
            max_iter: 10_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CgOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    /// `||b - A x||_2 / ||b||_2` recomputed from the returned `x`.
    pub relative_residual: T,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    ordered_sum(a.iter().zip(b).map(|(&x, &y)| x * y))
}

/// Jacobi-preconditioned conjugate gradients for a symmetric operator.
///
/// A non-positive curvature `p^T A p <= 0` means the operator is not positive
/// definite; this is reported as [`Error::SolverBreakdown`] with the Rayleigh
/// quotient of the offending direction.
pub fn conjugate_gradient<T: Real>(
    apply: impl Fn(&[T], &mut [T]),
    diagonal: &[T],
    b: &[T],
    opts: CgOptions<T>,
) -> Result<CgOutcome<T>> {
    let n = b.len();
    let b_norm = dot(b, b).sqrt();
    let mut x = vec![T::zero(); n];
    if b_norm == T::zero() {
        return Ok(CgOutcome {
            x,
            iterations: 0,
            relative_residual: T::zero(),
        });
    }
    let inv_diag: Vec<T> = diagonal
        .iter()
        .map(|&d| if d > T::zero() { d.recip() } else { T::one() })
        .collect();
    let mut r = b.to_vec();
    let mut z: Vec<T> = r.iter().zip(&inv_diag).map(|(&a, &w)| a * w).collect();
    let mut p = z.clone();
    let mut ap = vec![T::zero(); n];
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if dot(&r, &r).sqrt() <= opts.rel_tol * b_norm {
            break;
        }
        apply(&p, &mut ap);
        let curvature = dot(&p, &ap);
        if !(curvature > T::zero()) {
            return Err(Error::SolverBreakdown {
                iteration: iterations,
                curvature: (curvature / dot(&p, &p)).to_f64_lossy(),
            });
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] = x[i] + alpha * p[i];
            r[i] = r[i] - alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        iterations += 1;
    }
    apply(&x, &mut ap);
    let true_res: Vec<T> = b.iter().zip(&ap).map(|(&bi, &ai)| bi - ai).collect();
    let relative_residual = dot(&true_res, &true_res).sqrt() / b_norm;
    if iterations >= opts.max_iter && relative_residual > opts.rel_tol {
        return Err(Error::NotConverged {
            what: "conjugate gradient",
            iterations,
            residual: relative_residual.to_f64_lossy(),
        });
    }
    Ok(CgOutcome {
        x,
        iterations,
        relative_residual,
    })
}
