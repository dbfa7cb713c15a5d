use crate::error::{Error, Result};
use crate::real::Real;

/// Minimises `||A x - b||_2` for a column-major `rows x cols` matrix with
/// `rows >= cols` by Householder QR. Returns `(x, ||A x - b||_2)`.
pub fn least_squares<T: Real>(a: &[Vec<T>], b: &[T]) -> Result<(Vec<T>, T)> {
    let cols = a.len();
    let rows = b.len();
    if cols == 0 {
        let r = b.iter().fold(T::zero(), |s, &v| s + v * v).sqrt();
        return Ok((Vec::new(), r));
    }
    if rows < cols || a.iter().any(|c| c.len() != rows) {
        return Err(Error::Invalid(format!(
            "least squares needs rows >= cols (got {rows} x {cols})"
        )));
    }
    let mut q: Vec<Vec<T>> = a.to_vec();
    let mut rhs = b.to_vec();
    let scale = q
        .iter()
        .flat_map(|c| c.iter())
        .fold(T::zero(), |m, v| m.max(v.abs()));
    for k in 0..cols {
        let norm = q[k][k..].iter().fold(T::zero(), |s, &v| s + v * v).sqrt();
        if !(norm > T::epsilon() * scale * T::from_usize_lossy(rows)) {
            return Err(Error::Invalid(format!(
                "rank-deficient design at column {k}"
            )));
        }
        let alpha = if q[k][k] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = q[k][k..].to_vec();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(T::zero(), |s, &x| s + x * x);
        if vnorm2 > T::zero() {
            for col in q.iter_mut().skip(k) {
                let proj = v
                    .iter()
                    .zip(&col[k..])
                    .fold(T::zero(), |s, (&x, &y)| s + x * y);
                let f = (proj + proj) / vnorm2;
                for (c, &vi) in col[k..].iter_mut().zip(&v) {
                    *c = *c - f * vi;
                }
            }
            let proj = v
                .iter()
                .zip(&rhs[k..])
                .fold(T::zero(), |s, (&x, &y)| s + x * y);
            let f = (proj + proj) / vnorm2;
            for (c, &vi) in rhs[k..].iter_mut().zip(&v) {
                *c = *c - f * vi;
            }
        }
    }
    let mut x = vec![T::zero(); cols];
    for k in (0..cols).rev() {
        let mut acc = rhs[k];
        for j in k + 1..cols {
            acc = acc - q[j][k] * x[j];
        }
        x[k] = acc / q[k][k];
    }
    let residual = rhs[cols..].iter().fold(T::zero(), |s, &v| s + v * v).sqrt();
    Ok((x, residual))
}
