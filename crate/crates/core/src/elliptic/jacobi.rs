//! Jacobi elliptic functions by descending Landen transformation.

use crate::error::{Error, Result};
use crate::real::Real;

use super::agm::{complete_k, mapped_parameter};

const MAX_LANDEN_DEPTH: usize = 32;

/// `(sn, cn, dn)` for `0 <= m < 1` via the AGM form of the descending Landen
/// recursion. The modulus is reduced until `c_N <= eps a_N`, far below `m = 1e-14`.
fn sncndn_real<T: Real>(u: T, m: T) -> (T, T, T) {
    if m == T::zero() {
        return (u.sin(), u.cos(), T::one());
    }
    let mut a = [T::zero(); MAX_LANDEN_DEPTH + 1];
    let mut c = [T::zero(); MAX_LANDEN_DEPTH + 1];
    a[0] = T::one();
    c[0] = m.sqrt();
    let mut b = (T::one() - m).sqrt();
    let mut depth = 0;
    while depth < MAX_LANDEN_DEPTH && c[depth].abs() > T::epsilon() * a[depth] {
        let (an, bn) = (a[depth], b);
        a[depth + 1] = (an + bn) * T::lit(0.5);
        c[depth + 1] = (an - bn) * T::lit(0.5);
        b = (an * bn).sqrt();
        depth += 1;
    }
    let mut phi = T::lit(2f64.powi(depth as i32)) * a[depth] * u;
    for n in (1..=depth).rev() {
        let ratio = (c[n] / a[n] * phi.sin()).max(-T::one()).min(T::one());
        phi = (phi + ratio.asin()) * T::lit(0.5);
    }
    let (s, co) = phi.sin_cos();
    // dn > 0 on the real line for 0 <= m < 1; the Landen ratio form is 0/0 at u = K.
    (s, co, (T::one() - m * s * s).sqrt())
}

/// Returns `(sn, cn, dn)(u | m)` for `m` in `[-1, 1)`.
///
/// Negative parameters go through the imaginary-modulus transformation
/// `sn(u|m) = sd(v|mu)/sqrt(1-m)`, `cn(u|m) = cd(v|mu)`, `dn(u|m) = nd(v|mu)`
/// with `v = u sqrt(1-m)` and `mu = -m/(1-m)`; only real arithmetic is used.
pub fn jacobi_sncndn<T: Real>(u: T, m: T) -> Result<(T, T, T)> {
    if !u.is_finite() {
        return Err(Error::domain("jacobi argument", u));
    }
    if !(m < T::one()) || m < -T::one() || m.is_nan() {
        return Err(Error::domain("jacobi parameter", m));
    }
    if m < T::zero() {
        let scale = (T::one() - m).sqrt();
        let mu = mapped_parameter(m);
        let (s, c, d) = sncndn_real(reduce(u * scale, mu)?, mu);
        return Ok((s / (d * scale), c / d, T::one() / d));
    }
    Ok(sncndn_real(reduce(u, m)?, m))
}

/// Shifts `u` into `[-2K, 2K]` using the real period `4K(m)`.
fn reduce<T: Real>(u: T, m: T) -> Result<T> {
    let period = T::lit(4.0) * complete_k(m)?;
    Ok(u - period * (u / period).round())
}

pub fn jacobi_sn<T: Real>(u: T, m: T) -> Result<T> {
    jacobi_sncndn(u, m).map(|(s, _, _)| s)
}

pub fn jacobi_cn<T: Real>(u: T, m: T) -> Result<T> {
    jacobi_sncndn(u, m).map(|(_, c, _)| c)
}

pub fn jacobi_dn<T: Real>(u: T, m: T) -> Result<T> {
    jacobi_sncndn(u, m).map(|(_, _, d)| d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// RK4 integration of sn' = cn dn, cn' = -sn dn, dn' = -m sn cn from the
    /// origin. Independent of the Landen path; accurate to ~1e-13 here.
    fn sncndn_ode(u: f64, m: f64) -> (f64, f64, f64) {
        let steps = 20_000;
        let h = u / steps as f64;
        let f = |y: [f64; 3]| [y[1] * y[2], -y[0] * y[2], -m * y[0] * y[1]];
        let mut y = [0.0, 1.0, 1.0];
        for _ in 0..steps {
            let k1 = f(y);
            let k2 = f([
                y[0] + 0.5 * h * k1[0],
                y[1] + 0.5 * h * k1[1],
                y[2] + 0.5 * h * k1[2],
            ]);
            let k3 = f([
                y[0] + 0.5 * h * k2[0],
                y[1] + 0.5 * h * k2[1],
                y[2] + 0.5 * h * k2[2],
            ]);
            let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1], y[2] + h * k3[2]]);
            for i in 0..3 {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        (y[0], y[1], y[2])
    }

    #[test]
    fn circular_limit() {
        for &z in &[0.3, 1.0, 2.5] {
            assert_abs_diff_eq!(jacobi_sn(z, 0.0).unwrap(), f64::sin(z), epsilon = 1e-16);
        }
    }

    #[test]
    fn quarter_period() {
        let k = complete_k(0.5).unwrap();
        assert_abs_diff_eq!(jacobi_sn(k, 0.5).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(jacobi_cn(k, 0.5).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(jacobi_dn(k, 0.5).unwrap(), 0.5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn matches_ode_oracle() {
        for &m in &[-1.0, -0.5, 0.1, 0.5, 0.9] {
            for &u in &[0.2, 0.7, 1.3, 2.1] {
                let (s, c, d) = jacobi_sncndn(u, m).unwrap();
                let (so, co, dono) = sncndn_ode(u, m);
                assert_abs_diff_eq!(s, so, epsilon = 1e-11);
                assert_abs_diff_eq!(c, co, epsilon = 1e-11);
                assert_abs_diff_eq!(d, dono, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn imaginary_modulus_route() {
        // sn(u, i) = sd(u sqrt2 | 1/2) / sqrt2 evaluated by hand from the m = 1/2 functions.
        let u = 0.7;
        let (s, _, d) = jacobi_sncndn(u * 2f64.sqrt(), 0.5).unwrap();
        let expected = s / d / 2f64.sqrt();
        assert_abs_diff_eq!(jacobi_sn(u, -1.0).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(jacobi_sn(0.1, 1.0).is_err());
        assert!(jacobi_sn(0.1, -1.5).is_err());
        assert!(jacobi_sn(f64::NAN, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn pythagorean_identities(u in -10.0f64..10.0, m in -1.0f64..0.99) {
            let (s, c, d) = jacobi_sncndn(u, m).unwrap();
            prop_assert!((s * s + c * c - 1.0).abs() < 1e-12);
            prop_assert!((d * d + m * s * s - 1.0).abs() < 1e-12);
        }

        #[test]
        fn parity_and_period(u in -4.0f64..4.0, m in 0.01f64..0.95) {
            let (s, c, d) = jacobi_sncndn(u, m).unwrap();
            let (sm, cm, dm) = jacobi_sncndn(-u, m).unwrap();
            prop_assert!((s + sm).abs() < 1e-13);
            prop_assert!((c - cm).abs() < 1e-13);
            prop_assert!((d - dm).abs() < 1e-13);
            let k4 = 4.0 * complete_k(m).unwrap();
            prop_assert!((jacobi_sn(u + k4, m).unwrap() - s).abs() < 1e-12);
            prop_assert!(s.abs() <= 1.0 + 1e-15);
        }
    }
}
