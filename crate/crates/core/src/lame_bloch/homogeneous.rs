use serde::Serialize;

use crate::elliptic::EllipticModulus;
use crate::error::{Error, Result};
use crate::lattice::{laplacian_apply, LatticeSpec, ScalarField};
use crate::real::{ordered_sum, Real};

/// Candidate solutions of the homogeneous Lamé equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LameMode {
    /// `cn dn`, the derivative of the background (translation mode).
    CnDn,
    /// `sn dn`.
    SnDn,
}

/// Mass at which the mode is a zero mode of `-Delta + M^2 + 6 k^2 p^2 sn^2`
/// in the continuum: `-(1+k^2) p^2` for `cn dn`, `-(1+4k^2) p^2` for `sn dn`.
pub fn zero_mode_mass<T: Real>(mode: LameMode, p: &[T], modulus: &EllipticModulus<T>) -> T {
    let p2 = ordered_sum(p.iter().map(|&x| x * x));
    let k2 = modulus.m();
    match mode {
        LameMode::CnDn => -(T::one() + k2) * p2,
        LameMode::SnDn => -(T::one() + T::lit(4.0) * k2) * p2,
    }
}

/// `(-Delta_L + M^2 + (lambda/2) b^2 sn^2(p.x + theta)) c` with `c` the chosen mode.
#[allow(clippy::too_many_arguments)]
pub fn lame_homogeneous_residual<T: Real>(
    mode: LameMode,
    b: T,
    p: &[T],
    theta: T,
    modulus: &EllipticModulus<T>,
    m2_eff: T,
    lambda: T,
    lattice: &LatticeSpec<T>,
) -> Result<ScalarField<T>> {
    if p.len() != lattice.dim() {
        return Err(Error::ShapeMismatch(format!(
            "momentum has {} components on a d={} lattice",
            p.len(),
            lattice.dim()
        )));
    }
    let phase = |x: &[T]| ordered_sum(p.iter().zip(x).map(|(&a, &b)| a * b)) + theta;
    let candidate = ScalarField::from_positions(lattice, |x| {
        let (sn, cn, dn) = modulus.sncndn(phase(x));
        match mode {
            LameMode::CnDn => cn * dn,
            LameMode::SnDn => sn * dn,
        }
    });
    let potential = ScalarField::from_positions(lattice, |x| {
        let sn = modulus.sn(phase(x));
        m2_eff + T::lit(0.5) * lambda * b * b * sn * sn
    });
    let lap = laplacian_apply(&candidate);
    let out = (0..candidate.len())
        .map(|n| -lap[n] + potential[n] * candidate[n])
        .collect();
    ScalarField::new(lattice.clone(), out)
}
