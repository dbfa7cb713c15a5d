//! Fourier series of sn, sn^3, sn^2, sn' and cn' in the nome.
//!
//! For `m < 0` the analytic nome is negative; coefficients are written with
//! `|q|` and explicit `(-1)^n` factors so that everything stays real.

use serde::Serialize;

use super::EllipticModulus;
use crate::error::{Error, Result};
use crate::real::Real;

/// Default number of retained harmonics.
pub const DEFAULT_TRUNCATION: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SeriesKind {
    Sn,
    SnCubed,
    SnSquared,
    SnPrime,
    CnPrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Basis {
    Sin,
    Cos,
}

impl SeriesKind {
    fn basis(self) -> Basis {
        match self {
            SeriesKind::Sn | SeriesKind::SnCubed | SeriesKind::CnPrime => Basis::Sin,
            SeriesKind::SnSquared | SeriesKind::SnPrime => Basis::Cos,
        }
    }

    /// Integer multiple of the fundamental carried by coefficient `i`.
    fn harmonic(self, i: usize) -> usize {
        match self {
            SeriesKind::SnSquared => i + 1,
            _ => 2 * i + 1,
        }
    }
}

/// Truncated trigonometric series `constant + sum_i c_i trig(h_i * fundamental * z)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierSeries<T> {
    pub kind: SeriesKind,
    pub constant: T,
    pub coefficients: Vec<T>,
    /// `pi/(2K)` for the odd-harmonic kinds, `pi/K` for `SnSquared`.
    pub fundamental: T,
    pub truncation: usize,
}

fn coefficient<T: Real>(kind: SeriesKind, modulus: &EllipticModulus<T>, i: usize) -> T {
    let q = modulus.nome();
    let m = modulus.m();
    let big_k = modulus.quarter_period();
    let pi = T::PI();
    let alternating = modulus.is_imaginary();
    let sign = |p: usize| {
        if alternating && p % 2 == 1 {
            -T::one()
        } else {
            T::one()
        }
    };
    let h = T::from_usize_lossy(kind.harmonic(i));
    match kind {
        SeriesKind::SnSquared => {
            let r = h;
            let qr = q.powi(kind.harmonic(i) as i32);
            -(T::lit(2.0) * pi * pi / (m * big_k * big_k)) * sign(kind.harmonic(i)) * r * qr
                / (T::one() - qr * qr)
        }
        _ => {
            let q_half = q.powf(T::from_usize_lossy(i) + T::lit(0.5));
            let q_odd = q_half * q_half;
            // 1 - q^{2n+1} for sn-type, 1 + q^{2n+1} for cn-type, with q -> -|q| when m < 0.
            let signed_odd = if alternating { -q_odd } else { q_odd };
            let base = sign(i) * q_half / modulus.k_abs();
            let sn_coeff = T::lit(2.0) * pi / big_k * base / (T::one() - signed_odd);
            let omega = h * pi / (T::lit(2.0) * big_k);
            match kind {
                SeriesKind::Sn => sn_coeff,
                SeriesKind::SnCubed => {
                    sn_coeff * (-(omega * omega) + T::one() + m) / (T::lit(2.0) * m)
                }
                SeriesKind::SnPrime => sn_coeff * omega,
                SeriesKind::CnPrime => {
                    -(pi * pi / (big_k * big_k)) * h * base / (T::one() + signed_odd)
                }
                SeriesKind::SnSquared => unreachable!(),
            }
        }
    }
}

/// First `n` coefficients of the requested series.
pub fn series_coeffs<T: Real>(
    kind: SeriesKind,
    modulus: &EllipticModulus<T>,
    n: usize,
) -> Result<FourierSeries<T>> {
    if n == 0 {
        return Err(Error::Invalid(
            "series truncation must be at least 1".into(),
        ));
    }
    if modulus.m() == T::zero() {
        return Err(Error::domain(
            "Fourier series modulus (1/k singular)",
            modulus.m(),
        ));
    }
    let big_k = modulus.quarter_period();
    let (constant, fundamental) = match kind {
        SeriesKind::SnSquared => (
            (T::one() - modulus.complete_e() / big_k) / modulus.m(),
            T::PI() / big_k,
        ),
        _ => (T::zero(), T::PI() / (T::lit(2.0) * big_k)),
    };
    let coefficients = (0..n).map(|i| coefficient(kind, modulus, i)).collect();
    Ok(FourierSeries {
        kind,
        constant,
        coefficients,
        fundamental,
        truncation: n,
    })
}

impl<T: Real> FourierSeries<T> {
    pub fn eval(&self, z: T) -> T {
        self.eval_derivative(z, 0)
    }

    /// Term-wise `d^order/dz^order` of the partial sum.
    pub fn eval_derivative(&self, z: T, order: u32) -> T {
        let basis = self.kind.basis();
        // Rotation of the basis under differentiation: sin -> cos -> -sin -> -cos.
        let phase = (order + if basis == Basis::Cos { 1 } else { 0 }) % 4;
        let mut acc = if order == 0 { self.constant } else { T::zero() };
        for (i, &c) in self.coefficients.iter().enumerate() {
            let omega = T::from_usize_lossy(self.kind.harmonic(i)) * self.fundamental;
            let (s, co) = (omega * z).sin_cos();
            let trig = match phase {
                0 => s,
                1 => co,
                2 => -s,
                _ => -co,
            };
            acc = acc + c * omega.powi(order as i32) * trig;
        }
        acc
    }

    /// Sum of the magnitudes of the next 64 omitted coefficients.
    pub fn tail_estimate(&self, modulus: &EllipticModulus<T>) -> T {
        let n = self.truncation;
        (n..n + 64)
            .map(|i| coefficient(self.kind, modulus, i).abs())
            .fold(T::zero(), |a, b| a + b)
    }
}

/// `|sn^3 - (sn'' + (1+k^2) sn) / (2k^2)|` with `sn''` from the term-wise
/// differentiated series and `sn` evaluated directly.
pub fn sn_cubed_identity_residual<T: Real>(z: T, modulus: &EllipticModulus<T>) -> Result<T> {
    sn_cubed_identity_residual_with(z, modulus, DEFAULT_TRUNCATION)
}

pub fn sn_cubed_identity_residual_with<T: Real>(
    z: T,
    modulus: &EllipticModulus<T>,
    n: usize,
) -> Result<T> {
    let m = modulus.m();
    if m == T::zero() {
        return Err(Error::domain("sn^3 identity (1/k^2 singular)", m));
    }
    let series = series_coeffs(SeriesKind::Sn, modulus, n)?;
    let sn = modulus.sn(z);
    let sn_pp = series.eval_derivative(z, 2);
    Ok((sn * sn * sn - (sn_pp + (T::one() + m) * sn) / (T::lit(2.0) * m)).abs())
}

/// The alternating `k = i` series of sn with explicit `exp(-(n+1/2) pi)` weights.
pub fn imaginary_unit_sn_series<T: Real>(z: T, n: usize) -> T {
    let big_k = super::complete_k(-T::one()).expect("K(-1) finite");
    let pi = T::PI();
    let mut acc = T::zero();
    for i in 0..n {
        let h = T::from_usize_lossy(2 * i + 1);
        let sign = if i % 2 == 0 { T::one() } else { -T::one() };
        let w = (-(T::from_usize_lossy(i) + T::lit(0.5)) * pi).exp() / (T::one() + (-h * pi).exp());
        acc = acc + sign * w * (h * pi * z / (T::lit(2.0) * big_k)).sin();
    }
    T::lit(2.0) * pi / big_k * acc
}

/// The `k = i` series of sn^3 with weights `pi^3 (2n+1)^2 / (4 K^3)`.
pub fn imaginary_unit_sn_cubed_series<T: Real>(z: T, n: usize) -> T {
    let big_k = super::complete_k(-T::one()).expect("K(-1) finite");
    let pi = T::PI();
    let mut acc = T::zero();
    for i in 0..n {
        let h = T::from_usize_lossy(2 * i + 1);
        let sign = if i % 2 == 0 { T::one() } else { -T::one() };
        let w = (-(T::from_usize_lossy(i) + T::lit(0.5)) * pi).exp() / (T::one() + (-h * pi).exp());
        acc = acc + sign * h * h * w * (h * pi * z / (T::lit(2.0) * big_k)).sin();
    }
    pi * pi * pi / (T::lit(4.0) * big_k.powi(3)) * acc
}
