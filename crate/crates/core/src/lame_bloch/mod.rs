//! Fluctuations around an sn-wave background: the Fourier expansion of the
//! `sn^2` potential, the banded momentum system it induces, Källén-Lehmann
//! weights, and the homogeneous Lamé modes.
//!
//! For a `d`-dimensional background momentum `p0` the wave is
//! `sn(p0 . x + theta)`, so the phase advance along `p0` per lattice step is
//! `|p0| a`. The Bloch index `n` shifts the momentum by `n P`, `P = (pi/K) p0`.

mod homogeneous;
mod spectral;

use serde::Serialize;

use crate::elliptic::{series_coeffs, EllipticModulus, SeriesKind};
use crate::error::{Error, Result};
use crate::lattice::{hat_p_squared, LatticeSpec};
use crate::linalg::BandMatrix;
use crate::real::{ordered_sum, Real};

pub use homogeneous::{lame_homogeneous_residual, zero_mode_mass, LameMode};
pub use spectral::{merge_poles, spectral_fit, SpectralDecomposition};

/// Default number of potential harmonics.
pub const DEFAULT_HARMONICS: usize = 40;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlochSystem<T> {
    pub lambda: T,
    pub b: T,
    pub p0: Vec<T>,
    pub modulus: EllipticModulus<T>,
    /// `m^2 + (lambda/2) G_nn`, site-independent.
    pub m2_eff: T,
    /// `m2_eff` plus the mean of the potential.
    pub mbar2: T,
    /// Reciprocal-lattice step `(pi/K) p0`.
    pub shift: Vec<T>,
    /// `V_1 .. V_R`.
    pub couplings: Vec<T>,
    /// Band half-width `N` of the truncated solve.
    pub band: usize,
}

/// Builds the system with `R = harmonics` couplings and band `N = 3R`.
pub fn build_bloch_system<T: Real>(
    lambda: T,
    b: T,
    p0: Vec<T>,
    modulus: EllipticModulus<T>,
    m2: T,
    gnn: T,
    harmonics: usize,
) -> Result<BlochSystem<T>> {
    if harmonics == 0 {
        return Err(Error::Invalid(
            "need at least one potential harmonic".into(),
        ));
    }
    if p0.is_empty() {
        return Err(Error::Invalid(
            "background momentum has no components".into(),
        ));
    }
    let m2_eff = m2 + T::lit(0.5) * lambda * gnn;
    let sq = series_coeffs(SeriesKind::SnSquared, &modulus, harmonics)?;
    let strength = T::lit(0.5) * lambda * b * b;
    let mbar2 = m2_eff + strength * sq.constant;
    let couplings = sq
        .coefficients
        .iter()
        .map(|&c| T::lit(0.5) * strength * c)
        .collect();
    let shift = p0
        .iter()
        .map(|&p| T::PI() / modulus.quarter_period() * p)
        .collect();
    Ok(BlochSystem {
        lambda,
        b,
        p0,
        modulus,
        m2_eff,
        mbar2,
        shift,
        couplings,
        band: 3 * harmonics,
    })
}

impl<T: Real> BlochSystem<T> {
    pub fn harmonics(&self) -> usize {
        self.couplings.len()
    }

    pub fn with_band(mut self, band: usize) -> Self {
        self.band = band;
        self
    }

    /// `|p0|`.
    pub fn wave_number(&self) -> T {
        ordered_sum(self.p0.iter().map(|&p| p * p)).sqrt()
    }

    /// Local mass `m2_eff + (lambda/2) b^2 sn^2(u)`.
    pub fn local_mass(&self, u: T) -> T {
        let s = self.modulus.sn(u);
        self.m2_eff + T::lit(0.5) * self.lambda * self.b * self.b * s * s
    }

    /// Geometric bound on `2 sum_{r > R} |V_r|`.
    pub fn tail_bound(&self) -> T {
        let q = self.modulus.nome();
        if q == T::zero() {
            return T::zero();
        }
        let big_k = self.modulus.quarter_period();
        let c = (T::lit(0.5) * self.lambda * self.b * self.b * T::PI() * T::PI()
            / (self.modulus.m() * big_k * big_k))
            .abs();
        let r = T::from_usize_lossy(self.harmonics());
        let one = T::one();
        let series = q.powf(r + one) * ((r + one) - r * q) / ((one - q) * (one - q));
        T::lit(2.0) * c * series / (one - q * q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResummationCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub gap: T,
    pub tail_bound: T,
}

/// Compares `mbar2 + 2 sum_r V_r cos(pi r l |p0| a / K)` with the local mass at
/// phase `l |p0| a`.
pub fn potential_resummation_check<T: Real>(
    sys: &BlochSystem<T>,
    ell: i64,
    a: T,
) -> ResummationCheck<T> {
    let u = T::from_i64(ell).expect("finite integer") * sys.wave_number() * a;
    let base = T::PI() * u / sys.modulus.quarter_period();
    let harmonics = sys
        .couplings
        .iter()
        .enumerate()
        .map(|(i, &v)| v * (T::from_usize_lossy(i + 1) * base).cos());
    let lhs = sys.mbar2 + T::lit(2.0) * ordered_sum(harmonics);
    let rhs = sys.local_mass(u);
    ResummationCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
        tail_bound: sys.tail_bound(),
    }
}

/// Band components `G_n`, `n = -N ..= N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlochSolution<T> {
    pub band: usize,
    pub components: Vec<T>,
    pub diagonally_dominant: bool,
}

impl<T: Real> BlochSolution<T> {
    pub fn component(&self, n: i64) -> T {
        self.components[(n + self.band as i64) as usize]
    }

    pub fn g0(&self) -> T {
        self.component(0)
    }
}

/// Solves `(p_hat^2(p + nP) + mbar2) G_n + sum_r V_r (G_{n+r} + G_{n-r}) = delta_n0`
/// for `|n| <= N`, with `G` zero outside the band.
pub fn bloch_solve<T: Real>(
    p: &[T],
    sys: &BlochSystem<T>,
    lattice: &LatticeSpec<T>,
) -> Result<BlochSolution<T>> {
    if p.len() != lattice.dim() || sys.shift.len() != lattice.dim() {
        return Err(Error::ShapeMismatch(format!(
            "momentum ({}) and background ({}) must match lattice dimension {}",
            p.len(),
            sys.shift.len(),
            lattice.dim()
        )));
    }
    let n_band = sys.band;
    let size = 2 * n_band + 1;
    let r_max = sys.harmonics().min(size - 1);
    let mut mat = BandMatrix::zeros(size, r_max, r_max);
    for row in 0..size {
        let n = T::from_i64(row as i64 - n_band as i64).expect("band index");
        let shifted: Vec<T> = p
            .iter()
            .zip(&sys.shift)
            .map(|(&pm, &s)| pm + n * s)
            .collect();
        mat.set(row, row, hat_p_squared(&shifted, lattice) + sys.mbar2);
        for r in 1..=r_max {
            let v = sys.couplings[r - 1];
            if row + r < size {
                mat.set(row, row + r, v);
            }
            if row >= r {
                mat.set(row, row - r, v);
            }
        }
    }
    let mut rhs = vec![T::zero(); size];
    rhs[n_band] = T::one();
    let components = mat.solve(&rhs)?;
    Ok(BlochSolution {
        band: n_band,
        components,
        diagonally_dominant: mat.is_diagonally_dominant(),
    })
}
