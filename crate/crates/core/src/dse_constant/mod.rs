//! Truncated Dyson-Schwinger system on a constant background.
//!
//! Propagators use the Kronecker normalisation `(-Delta_L + mu^2) G = delta_nm`,
//! so `G_nn = (1/V) sum_p 1/(p_hat^2 + mu^2)` with `V = L^d` sites.
//!
//! The gap mass is taken as displayed in momentum space, `mu^2 = 2 m^2 + lambda G_nn`.
//! The position-space form of the same equation carries the opposite sign
//! (`-2 m^2 - lambda G_nn`), which is what the vev equation actually produces in
//! the broken phase. With the displayed convention `vev^2 = -3 mu^2 / lambda`,
//! so the automatic phase selection of [`solve_constant_background`] always
//! lands in the symmetric phase; [`cumulant_scan`] therefore takes the
//! background value explicitly.

mod cumulants;
mod residuals;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{hat_p_squared, LatticeSpec};
use crate::real::{ordered_sum, Real};

pub use cumulants::{
    c3_coincident, c3_coincident_direct, c3_coincident_position, c3_grid, c3_momentum,
    c3_momentum_grid, cumulant_scan, CumulantReport,
};
pub use residuals::{
    c3_equation_residual, one_point_residual, one_point_residual_field, two_point_mass,
    two_point_residual,
};

const MAX_BISECTIONS: usize = 400;
const MAX_BRACKET_DOUBLINGS: usize = 200;

/// `-(6/lambda) m^2 - 3 G_nn`. Negative values mean no real broken-phase vev.
pub fn vev_squared<T: Real>(m2: T, lambda: T, gnn: T) -> Result<T> {
    if lambda == T::zero() {
        return Err(Error::domain("vev equation needs lambda != 0", lambda));
    }
    Ok(-T::lit(6.0) / lambda * m2 - T::lit(3.0) * gnn)
}

/// How the gap mass depends on `m^2` and `G_nn`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MassConvention {
    /// `mu^2 = 2 m^2 + lambda G_nn`.
    Displayed,
    /// `mu^2 = m^2 + (lambda/2) G_nn`: the two-point equation at `phi = 0`.
    Symmetric,
}

impl MassConvention {
    pub fn mu2<T: Real>(self, m2: T, lambda: T, gnn: T) -> T {
        match self {
            Self::Displayed => T::lit(2.0) * m2 + lambda * gnn,
            Self::Symmetric => m2 + T::lit(0.5) * lambda * gnn,
        }
    }

    fn mass_and_slope<T: Real>(self, m2: T, lambda: T) -> (T, T) {
        match self {
            Self::Displayed => (T::lit(2.0) * m2, lambda),
            Self::Symmetric => (m2, T::lit(0.5) * lambda),
        }
    }
}

/// Self-consistent coincident-point propagator.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapSolution<T: Real> {
    pub m2: T,
    pub lambda: T,
    pub gnn: T,
    pub mu2: T,
    pub fixed_point_residual: T,
    pub convention: MassConvention,
    pub iterations: usize,
    pub lattice: LatticeSpec<T>,
}

impl<T: Real> GapSolution<T> {
    /// Wraps a given `G_nn` (not necessarily a fixed point), e.g. for evaluating
    /// kernels at hand-chosen parameters.
    pub fn with_gnn(
        m2: T,
        lambda: T,
        gnn: T,
        lattice: &LatticeSpec<T>,
        convention: MassConvention,
    ) -> Result<Self> {
        let mu2 = convention.mu2(m2, lambda, gnn);
        if !(mu2 > T::zero()) {
            return Err(Error::domain("gap mass mu^2 must be positive", mu2));
        }
        let fixed_point_residual = (coincident_sum(lattice, mu2) - gnn).abs();
        Ok(Self {
            m2,
            lambda,
            gnn,
            mu2,
            fixed_point_residual,
            convention,
            iterations: 0,
            lattice: lattice.clone(),
        })
    }

    /// `1 / (p_hat^2 + mu^2)` at every grid momentum.
    pub fn propagator_grid(&self) -> Vec<T> {
        self.lattice
            .hat_p_squared_grid()
            .into_iter()
            .map(|p2| (p2 + self.mu2).recip())
            .collect()
    }
}

/// `(1/V) sum_p 1/(p_hat^2 + mu2)`.
pub fn coincident_sum<T: Real>(lattice: &LatticeSpec<T>, mu2: T) -> T {
    let v = T::from_usize_lossy(lattice.volume());
    ordered_sum(
        lattice
            .hat_p_squared_grid()
            .into_iter()
            .map(|p2| (p2 + mu2).recip()),
    ) / v
}

/// Gap equation with the displayed mass convention.
pub fn gap_solve<T: Real>(
    m2: T,
    lambda: T,
    lattice: &LatticeSpec<T>,
    tol: T,
) -> Result<GapSolution<T>> {
    gap_solve_with(m2, lambda, lattice, tol, MassConvention::Displayed)
}

/// Bisection on `g(G) = (1/V) sum_p 1/(p_hat^2 + c m^2 + s lambda G) - G`,
/// strictly decreasing for `lambda >= 0`.
pub fn gap_solve_with<T: Real>(
    m2: T,
    lambda: T,
    lattice: &LatticeSpec<T>,
    tol: T,
    convention: MassConvention,
) -> Result<GapSolution<T>> {
    if !(tol > T::zero()) {
        return Err(Error::domain("gap tolerance must be positive", tol));
    }
    if lambda < T::zero() || !lambda.is_finite() {
        return Err(Error::domain("gap equation needs lambda >= 0", lambda));
    }
    let (mass, slope) = convention.mass_and_slope(m2, lambda);
    let p2 = lattice.hat_p_squared_grid();
    let v = T::from_usize_lossy(lattice.volume());
    let g = |gnn: T| {
        let mu2 = mass + slope * gnn;
        ordered_sum(p2.iter().map(|&p| (p + mu2).recip())) / v - gnn
    };
    let finish = |gnn: T, iterations: usize| {
        let mu2 = convention.mu2(m2, lambda, gnn);
        GapSolution {
            m2,
            lambda,
            gnn,
            mu2,
            fixed_point_residual: g(gnn).abs(),
            convention,
            iterations,
            lattice: lattice.clone(),
        }
    };

    if lambda == T::zero() {
        if !(mass > T::zero()) {
            return Err(Error::NoSolution {
                lo: 0.0,
                hi: f64::INFINITY,
                g_lo: f64::NAN,
                g_hi: f64::NAN,
            });
        }
        let gnn = coincident_sum(lattice, mass);
        return Ok(finish(gnn, 0));
    }

    // g -> +inf at the lower end when the bare mass is not positive.
    let (mut lo, mut hi) = if mass > T::zero() {
        (T::zero(), coincident_sum(lattice, mass))
    } else {
        let floor = -mass / slope;
        let mut width = floor.max(T::one());
        let mut found = None;
        for _ in 0..MAX_BRACKET_DOUBLINGS {
            if g(floor + width) < T::zero() {
                found = Some(floor + width);
                break;
            }
            width = width + width;
        }
        match found {
            Some(hi) => (floor, hi),
            None => {
                return Err(Error::NoSolution {
                    lo: floor.to_f64_lossy(),
                    hi: (floor + width).to_f64_lossy(),
                    g_lo: f64::INFINITY,
                    g_hi: g(floor + width).to_f64_lossy(),
                })
            }
        }
    };
    let g_hi = g(hi);
    if g_hi > T::zero() {
        return Err(Error::NoSolution {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
            g_lo: g(lo).to_f64_lossy(),
            g_hi: g_hi.to_f64_lossy(),
        });
    }
    if g_hi == T::zero() {
        return Ok(finish(hi, 0));
    }

    let mut best = (hi, g_hi.abs());
    for it in 1..=MAX_BISECTIONS {
        let mid = lo + (hi - lo) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm.abs() < best.1 {
            best = (mid, gm.abs());
        }
        if gm.abs() <= tol * T::lit(1e-3) {
            return Ok(finish(mid, it));
        }
        if gm > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if best.1 <= tol {
        return Ok(finish(best.0, MAX_BISECTIONS));
    }
    Err(Error::NotConverged {
        what: "gap equation bisection",
        iterations: MAX_BISECTIONS,
        residual: best.1.to_f64_lossy(),
    })
}

/// `1 / (p_hat^2 + mu^2)` at an arbitrary momentum.
pub fn propagator_momentum<T: Real>(p: &[T], sol: &GapSolution<T>) -> T {
    (hat_p_squared(p, &sol.lattice) + sol.mu2).recip()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Broken,
    Symmetric,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantBackground<T: Real> {
    pub phase: Phase,
    pub phi: T,
    /// From the displayed-convention solution; negative selects the symmetric phase.
    pub vev_squared: T,
    pub gap: GapSolution<T>,
}

/// Solves the gap equation, evaluates the vev, and falls back to the
/// symmetric phase (`phi = 0`, `mu^2 = m^2 + lambda G/2`) when the vev is imaginary.
pub fn solve_constant_background<T: Real>(
    m2: T,
    lambda: T,
    lattice: &LatticeSpec<T>,
    tol: T,
) -> Result<ConstantBackground<T>> {
    if lambda != T::zero() {
        if let Ok(gap) = gap_solve(m2, lambda, lattice, tol) {
            let v2 = vev_squared(m2, lambda, gap.gnn)?;
            if v2 >= T::zero() {
                return Ok(ConstantBackground {
                    phase: Phase::Broken,
                    phi: v2.sqrt(),
                    vev_squared: v2,
                    gap,
                });
            }
            let gap = gap_solve_with(m2, lambda, lattice, tol, MassConvention::Symmetric)?;
            return Ok(ConstantBackground {
                phase: Phase::Symmetric,
                phi: T::zero(),
                vev_squared: v2,
                gap,
            });
        }
    }
    let gap = gap_solve_with(m2, lambda, lattice, tol, MassConvention::Symmetric)?;
    let vev_squared = if lambda == T::zero() {
        T::neg_infinity()
    } else {
        vev_squared(m2, lambda, gap.gnn)?
    };
    Ok(ConstantBackground {
        phase: Phase::Symmetric,
        phi: T::zero(),
        vev_squared,
        gap,
    })
}
