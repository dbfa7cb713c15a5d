//! Complete elliptic integrals and the nome via the arithmetic-geometric mean.

use crate::error::{Error, Result};
use crate::real::Real;

const MAX_AGM_STEPS: usize = 64;

/// Runs the AGM of `(1, sqrt(1 - m))`. Returns the limit and `sum 2^(n-1) c_n^2`
/// with `c_0^2 = m`, which gives `E = K (1 - sum)`.
fn agm_with_sum<T: Real>(m: T) -> (T, T) {
    let mut a = T::one();
    let mut b = (T::one() - m).sqrt();
    let mut sum = m * T::lit(0.5);
    let mut weight = T::lit(0.5);
    for _ in 0..MAX_AGM_STEPS {
        let c = (a - b) * T::lit(0.5);
        if c.abs() <= T::epsilon() * a {
            break;
        }
        let a_next = (a + b) * T::lit(0.5);
        b = (a * b).sqrt();
        a = a_next;
        weight = weight + weight;
        sum = sum + weight * c * c;
    }
    (a, sum)
}

/// Complete elliptic integral of the first kind, parameter convention `m = k^2`.
///
/// Valid for every `m < 1`, including negative parameters.
pub fn complete_k<T: Real>(m: T) -> Result<T> {
    if !(m < T::one()) || m.is_nan() {
        return Err(Error::domain("complete_K", m));
    }
    if m == T::zero() {
        return Ok(T::FRAC_PI_2());
    }
    let (agm, _) = agm_with_sum(m);
    Ok(T::PI() / (agm + agm))
}

/// Complete elliptic integral of the second kind for `m <= 1`.
pub fn complete_e<T: Real>(m: T) -> Result<T> {
    if !(m <= T::one()) || m.is_nan() {
        return Err(Error::domain("complete_E", m));
    }
    if m == T::one() {
        return Ok(T::one());
    }
    if m == T::zero() {
        return Ok(T::FRAC_PI_2());
    }
    let (agm, sum) = agm_with_sum(m);
    let k = T::PI() / (agm + agm);
    Ok(k * (T::one() - sum))
}

/// Maps a negative parameter onto `(0, 1)`: `mu = -m / (1 - m)`.
///
/// The imaginary-modulus transformation then reads
/// `sn(u|m) = sd(u sqrt(1-m)|mu) / sqrt(1-m)`.
pub(crate) fn mapped_parameter<T: Real>(m: T) -> T {
    -m / (T::one() - m)
}

/// Magnitude of the nome `q = exp(-pi K'/K)`.
///
/// For `m < 0` the analytic nome is `-q(mu)`; this returns `q(mu)`, the real
/// number that appears in the alternating Fourier series.
/// `K(1 - m)` for `m` in `(0, 1]`, still finite when `1 - m` rounds to 1.
pub(crate) fn complementary_k<T: Real>(m: T) -> Result<T> {
    if T::one() - m < T::one() {
        return complete_k(T::one() - m);
    }
    // Logarithmic singularity: K(1 - m) = L + (L - 1) m / 4 + O(m^2 L), L = ln(4/sqrt(m)).
    let l = (T::lit(4.0) / m.sqrt()).ln();
    Ok(l + (l - T::one()) * m / T::lit(4.0))
}

pub fn nome<T: Real>(m: T) -> Result<T> {
    if !(m < T::one()) || m < -T::one() || m.is_nan() {
        return Err(Error::domain("nome", m));
    }
    if m == T::zero() {
        return Ok(T::zero());
    }
    let mu = if m < T::zero() {
        mapped_parameter(m)
    } else {
        m
    };
    let k = complete_k(mu)?;
    let kp = complementary_k(mu)?;
    Ok((-T::PI() * kp / k).exp())
}
