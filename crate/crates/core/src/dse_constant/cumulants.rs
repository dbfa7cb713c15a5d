use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::{gap_solve, GapSolution};
use crate::error::{Error, Result};
use crate::lattice::{hat_p_squared, inverse_dft, LatticeSpec};
use crate::linalg::loglog_slope;
use crate::real::{ordered_sum, Real};

/// Above this volume the coincident sum goes through position space.
const DIRECT_SUM_MAX_VOLUME: usize = 4096;

fn inverse_propagator<T: Real>(p: &[T], sol: &GapSolution<T>) -> T {
    hat_p_squared(p, &sol.lattice) + sol.mu2
}

/// `-lambda phi / (D(p) D(q) D(p+q))` with `D(k) = k_hat^2 + mu^2`.
pub fn c3_momentum<T: Real>(p: &[T], q: &[T], phi: T, sol: &GapSolution<T>) -> T {
    let pq: Vec<T> = p.iter().zip(q).map(|(&a, &b)| a + b).collect();
    -sol.lambda * phi
        / (inverse_propagator(p, sol) * inverse_propagator(q, sol) * inverse_propagator(&pq, sol))
}

/// Same kernel at grid momentum labels, with `p + q` wrapped into the Brillouin zone.
pub fn c3_momentum_grid<T: Real>(p: usize, q: usize, phi: T, sol: &GapSolution<T>) -> T {
    let lat = &sol.lattice;
    let d = |k: usize| lat.hat_p_squared_at(k) + sol.mu2;
    -sol.lambda * phi / (d(p) * d(q) * d(lat.momentum_add(p, q)))
}

/// The kernel on every grid pair, row-major in `(p, q)`.
pub fn c3_grid<T: Real>(phi: T, sol: &GapSolution<T>) -> Vec<T> {
    let v = sol.lattice.volume();
    (0..v * v)
        .map(|i| c3_momentum_grid(i / v, i % v, phi, sol))
        .collect()
}

/// `(1/V^2) sum_{p,q} C3(p, q)`: the three-point cumulant at coincident sites.
pub fn c3_coincident<T: Real>(phi: T, sol: &GapSolution<T>) -> T {
    if sol.lattice.volume() <= DIRECT_SUM_MAX_VOLUME {
        c3_coincident_direct(phi, sol)
    } else {
        c3_coincident_position(phi, sol)
    }
}

/// Plain double loop over the momentum grid.
pub fn c3_coincident_direct<T: Real>(phi: T, sol: &GapSolution<T>) -> T {
    if phi == T::zero() || sol.lambda == T::zero() {
        return T::zero();
    }
    let lat = &sol.lattice;
    let v = lat.volume();
    let g: Vec<T> = sol.propagator_grid();
    let rows: Vec<T> = (0..v)
        .into_par_iter()
        .map(|p| g[p] * ordered_sum((0..v).map(|q| g[q] * g[lat.momentum_add(p, q)])))
        .collect();
    let vv = T::from_usize_lossy(v);
    -sol.lambda * phi * ordered_sum(rows) / (vv * vv)
}

/// `-lambda phi sum_x G(x)^3`, with `G(x)` from an inverse DFT of the propagator.
pub fn c3_coincident_position<T: Real>(phi: T, sol: &GapSolution<T>) -> T {
    if phi == T::zero() || sol.lambda == T::zero() {
        return T::zero();
    }
    let spectrum: Vec<Complex<T>> = sol
        .propagator_grid()
        .into_iter()
        .map(|g| Complex::new(g, T::zero()))
        .collect();
    let g_x = inverse_dft(&sol.lattice, &spectrum);
    -sol.lambda * phi * ordered_sum(g_x.iter().map(|c| c.re * c.re * c.re))
}

/// Volume dependence of the coincident three-point cumulant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CumulantReport<T> {
    pub dimension: usize,
    pub spacing: T,
    pub m2: T,
    pub lambda: T,
    pub phi: T,
    pub volumes: Vec<usize>,
    pub gnn: Vec<T>,
    pub mu2: Vec<T>,
    pub c3_nnn: Vec<T>,
    /// Slope of `ln|C3|` against `ln L^d`; `None` if any value is zero.
    pub fitted_exponent: Option<T>,
}

/// Solves the gap equation on each `L` and evaluates the coincident cumulant at background `phi`.
pub fn cumulant_scan<T: Real>(
    d: usize,
    extents: &[usize],
    a: T,
    m2: T,
    lambda: T,
    phi: T,
    tol: T,
) -> Result<CumulantReport<T>> {
    if extents.is_empty() {
        return Err(Error::Invalid(
            "cumulant scan needs at least one extent".into(),
        ));
    }
    let mut gnn = Vec::new();
    let mut mu2 = Vec::new();
    let mut c3 = Vec::new();
    for &l in extents {
        let lattice = LatticeSpec::new(d, l, a)?;
        let sol = gap_solve(m2, lambda, &lattice, tol)?;
        c3.push(c3_coincident(phi, &sol));
        gnn.push(sol.gnn);
        mu2.push(sol.mu2);
    }
    let fitted_exponent = if extents.len() >= 2 && c3.iter().all(|c| *c != T::zero()) {
        let pts: Vec<(T, T)> = extents
            .iter()
            .zip(&c3)
            .map(|(&l, c)| (T::from_usize_lossy(l).powi(d as i32), c.abs()))
            .collect();
        Some(loglog_slope(&pts))
    } else {
        None
    };
    Ok(CumulantReport {
        dimension: d,
        spacing: a,
        m2,
        lambda,
        phi,
        volumes: extents.to_vec(),
        gnn,
        mu2,
        c3_nnn: c3,
        fitted_exponent,
    })
}
