//! Jacobi elliptic functions, complete integrals, the nome and the Fourier
//! series representations used by the classical and Bloch modules.
//!
//! The parameter convention is `m = k^2`. The only non-real modulus that is
//! supported is `k = i` (`m = -1`), handled through the imaginary-modulus
//! transformation onto `m = 1/2`; more generally any `m` in `[-1, 0)` maps to
//! `mu = -m/(1-m)` in `(0, 1/2]`.

mod agm;
mod jacobi;
mod series;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;

pub use agm::{complete_e, complete_k, nome};
pub use jacobi::{jacobi_cn, jacobi_dn, jacobi_sn, jacobi_sncndn};
pub use series::{
    imaginary_unit_sn_cubed_series, imaginary_unit_sn_series, series_coeffs,
    sn_cubed_identity_residual, FourierSeries, SeriesKind, DEFAULT_TRUNCATION,
};

/// Modulus parameter with its complete integrals and nome cached.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EllipticModulus<T> {
    m: T,
    k: T,
    k_prime: T,
    e: T,
    q: T,
}

impl<T: Real> EllipticModulus<T> {
    /// Accepts `m` in `[-1, 1)`.
    pub fn new(m: T) -> Result<Self> {
        if m.is_nan() || m < -T::one() || !(m < T::one()) {
            return Err(Error::domain("elliptic parameter", m));
        }
        let k = complete_k(m)?;
        let e = complete_e(m)?;
        let k_prime = if m == T::zero() {
            T::infinity()
        } else if m < T::zero() {
            let mu = agm::mapped_parameter(m);
            agm::complementary_k(mu)? / (T::one() - m).sqrt()
        } else {
            agm::complementary_k(m)?
        };
        let q = nome(m)?;
        Ok(Self {
            m,
            k,
            k_prime,
            e,
            q,
        })
    }

    /// `m = k^2`.
    pub fn m(&self) -> T {
        self.m
    }

    /// `|k| = sqrt(|m|)`.
    pub fn k_abs(&self) -> T {
        self.m.abs().sqrt()
    }

    /// Quarter period `K(m)`.
    pub fn quarter_period(&self) -> T {
        self.k
    }

    /// `K'(m)`; for `m < 0` the mapped value `K(1-mu)/sqrt(1-m)`.
    pub fn quarter_period_prime(&self) -> T {
        self.k_prime
    }

    pub fn complete_e(&self) -> T {
        self.e
    }

    /// Magnitude of the nome. For `m < 0` the series alternate in sign.
    pub fn nome(&self) -> T {
        self.q
    }

    /// True when the Fourier series carry the `(-1)^n` factors of the
    /// imaginary-modulus branch.
    pub fn is_imaginary(&self) -> bool {
        self.m < T::zero()
    }

    /// Real period `4K` of sn and cn.
    pub fn period(&self) -> T {
        T::lit(4.0) * self.k
    }

    pub fn sncndn(&self, u: T) -> (T, T, T) {
        jacobi_sncndn(u, self.m).expect("modulus validated at construction")
    }

    pub fn sn(&self, u: T) -> T {
        self.sncndn(u).0
    }
}
