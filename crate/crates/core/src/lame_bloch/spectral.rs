use serde::Serialize;

use super::BlochSystem;
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::real::{ordered_sum, Real};

/// Poles closer than this (in `m^2`) are treated as one.
const MERGE_TOLERANCE: f64 = 1e-10;

/// Weights `B_l >= 0`, `sum B_l = 1`, of `G(p) = sum_l B_l / (p_hat^2 + m_l^2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralDecomposition<T> {
    pub weights: Vec<T>,
    /// Distinct pole masses, ascending.
    pub masses: Vec<T>,
    pub normalization_defect: T,
    /// `||fit - data||_2 / ||data||_2`.
    pub fit_residual: T,
}

/// Sorted distinct masses; neighbours within `1e-10` collapse onto the first.
pub fn merge_poles<T: Real>(masses: &[T]) -> Vec<T> {
    let mut sorted = masses.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite masses"));
    let mut out: Vec<T> = Vec::with_capacity(sorted.len());
    for m in sorted {
        match out.last() {
            Some(&last) if m - last <= T::lit(MERGE_TOLERANCE) => {}
            _ => out.push(m),
        }
    }
    out
}

impl<T: Real> BlochSystem<T> {
    /// Pole masses `m2_eff + (lambda/2) b^2 sn^2(l |p0| a)` for `|l| <= N`.
    pub fn pole_masses(&self, a: T) -> Vec<T> {
        let step = self.wave_number() * a;
        let n = self.band as i64;
        (-n..=n)
            .map(|l| self.local_mass(T::from_i64(l).expect("band index") * step))
            .collect()
    }
}

/// Least squares `min ||A x - y||` over `x` supported on `free` with `sum x = 1`,
/// by eliminating the last free variable.
fn constrained_solve<T: Real>(columns: &[Vec<T>], y: &[T], free: &[usize]) -> Result<Vec<T>> {
    let mut x = vec![T::zero(); columns.len()];
    let (&last, rest) = free.split_last().expect("non-empty free set");
    let pivot = &columns[last];
    let reduced: Vec<Vec<T>> = rest
        .iter()
        .map(|&i| columns[i].iter().zip(pivot).map(|(&c, &p)| c - p).collect())
        .collect();
    let rhs: Vec<T> = y.iter().zip(pivot).map(|(&v, &p)| v - p).collect();
    let (sol, _) = least_squares(&reduced, &rhs)?;
    for (&i, &v) in rest.iter().zip(&sol) {
        x[i] = v;
    }
    x[last] = T::one() - ordered_sum(sol.iter().copied());
    Ok(x)
}

fn gradient<T: Real>(columns: &[Vec<T>], y: &[T], x: &[T]) -> (Vec<T>, T) {
    let residual: Vec<T> = (0..y.len())
        .map(|s| ordered_sum(columns.iter().zip(x).map(|(c, &w)| c[s] * w)) - y[s])
        .collect();
    let grad = columns
        .iter()
        .map(|c| ordered_sum(c.iter().zip(&residual).map(|(&a, &r)| a * r)))
        .collect();
    let norm = ordered_sum(residual.iter().map(|&r| r * r)).sqrt();
    (grad, norm)
}

/// Fits Källén-Lehmann weights to `(p_hat^2, G(p))` samples at fixed pole masses.
///
/// Masses are merged first. The weights solve the least-squares problem with
/// `B >= 0` and `sum B = 1` by an active-set iteration.
pub fn spectral_fit<T: Real>(samples: &[(T, T)], masses: &[T]) -> Result<SpectralDecomposition<T>> {
    let masses = merge_poles(masses);
    if masses.is_empty() {
        return Err(Error::Invalid(
            "spectral fit needs at least one pole".into(),
        ));
    }
    if samples.len() < masses.len() {
        return Err(Error::Invalid(format!(
            "{} samples cannot determine {} weights",
            samples.len(),
            masses.len()
        )));
    }
    let y: Vec<T> = samples.iter().map(|s| s.1).collect();
    let columns: Vec<Vec<T>> = masses
        .iter()
        .map(|&m| samples.iter().map(|&(p2, _)| (p2 + m).recip()).collect())
        .collect();
    let n = masses.len();
    let tol = T::lit(1e-14);

    let mut x = vec![T::one() / T::from_usize_lossy(n); n];
    let mut free: Vec<usize> = (0..n).collect();
    for _ in 0..4 * n + 8 {
        let mut z = constrained_solve(&columns, &y, &free)?;
        // Step back towards feasibility while the candidate has negative weights.
        while free.iter().any(|&i| z[i] < T::zero()) {
            let alpha = free
                .iter()
                .filter(|&&i| z[i] < T::zero())
                .map(|&i| x[i] / (x[i] - z[i]))
                .fold(T::one(), |a, b| a.min(b));
            for i in 0..n {
                x[i] = x[i] + alpha * (z[i] - x[i]);
            }
            free.retain(|&i| x[i] > tol);
            for i in 0..n {
                if !free.contains(&i) {
                    x[i] = T::zero();
                }
            }
            if free.is_empty() {
                return Err(Error::Invalid(
                    "active-set iteration emptied the free set".into(),
                ));
            }
            z = constrained_solve(&columns, &y, &free)?;
        }
        x = z;
        let (grad, _) = gradient(&columns, &y, &x);
        // Multiplier of the sum constraint from the free set; lower-bound multipliers on the rest.
        let nu = -ordered_sum(free.iter().map(|&i| grad[i])) / T::from_usize_lossy(free.len());
        let scale = grad
            .iter()
            .fold(T::zero(), |m, g| m.max(g.abs()))
            .max(T::tiny());
        let entering = (0..n)
            .filter(|i| !free.contains(i))
            .map(|i| (i, grad[i] + nu))
            .filter(|&(_, mu)| mu < -T::lit(1e-12) * scale)
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite multipliers"));
        match entering {
            Some((i, _)) => {
                free.push(i);
                free.sort_unstable();
            }
            None => {
                let (_, res) = gradient(&columns, &y, &x);
                let y_norm = ordered_sum(y.iter().map(|&v| v * v)).sqrt().max(T::tiny());
                return Ok(SpectralDecomposition {
                    normalization_defect: (ordered_sum(x.iter().copied()) - T::one()).abs(),
                    weights: x,
                    masses,
                    fit_residual: res / y_norm,
                });
            }
        }
    }
    Err(Error::NotConverged {
        what: "spectral fit active set",
        iterations: 4 * n + 8,
        residual: f64::NAN,
    })
}
