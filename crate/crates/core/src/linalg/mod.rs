//! Small self-contained solvers: matrix-free preconditioned conjugate
//! gradients, banded LU with partial pivoting, and Householder least squares.

mod band;
mod cg;
mod lstsq;

pub use band::BandMatrix;
pub use cg::{conjugate_gradient, CgOptions, CgOutcome};
pub use lstsq::least_squares;

use crate::real::Real;

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope<T: Real>(points: &[(T, T)]) -> T {
    let n = T::from_usize_lossy(points.len());
    let (sx, sy) = points
        .iter()
        .fold((T::zero(), T::zero()), |(sx, sy), &(x, y)| {
            (sx + x.ln(), sy + y.ln())
        });
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points
        .iter()
        .fold((T::zero(), T::zero()), |(num, den), &(x, y)| {
            let dx = x.ln() - mx;
            (num + dx * (y.ln() - my), den + dx * dx)
        });
    num / den
}
