use rayon::prelude::*;

use super::{LatticeSpec, ScalarField};
use crate::error::Result;
use crate::real::{ordered_sum, Real};

/// Volumes above this are processed with rayon; results do not depend on it.
const PARALLEL_SITES: usize = 1 << 14;

pub(crate) fn map_sites<T: Real>(volume: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    if volume >= PARALLEL_SITES {
        (0..volume).into_par_iter().map(f).collect()
    } else {
        (0..volume).map(f).collect()
    }
}

/// Neighbour sum minus `2d f_n`, without the `1/a^2`.
#[inline]
pub(crate) fn stencil<T: Real>(lattice: &LatticeSpec<T>, v: &[T], site: usize) -> T {
    let nb = lattice.neighbors(site);
    let sum = nb.iter().fold(T::zero(), |acc, &j| acc + v[j]);
    sum - T::from_usize_lossy(nb.len()) * v[site]
}

/// `(Delta_L f)_n = a^-2 sum_mu (f_{n+mu} + f_{n-mu} - 2 f_n)`.
pub fn laplacian_apply<T: Real>(f: &ScalarField<T>) -> ScalarField<T> {
    let lattice = f.lattice();
    let inv_a2 = (lattice.spacing() * lattice.spacing()).recip();
    let v = f.values();
    let out = map_sites(v.len(), |s| stencil(lattice, v, s) * inv_a2);
    ScalarField::new(lattice.clone(), out).expect("shape preserved")
}

/// `(4/a^2) sum_mu sin^2(p_mu a / 2)`; accepts off-grid momenta.
pub fn hat_p_squared<T: Real>(p: &[T], lattice: &LatticeSpec<T>) -> T {
    let a = lattice.spacing();
    let half = T::lit(0.5) * a;
    T::lit(4.0) / (a * a) * ordered_sum(p.iter().map(|&pm| (pm * half).sin().powi(2)))
}

/// `a^d sum_n [ phi(-Delta_L)phi/2 + m2 phi^2/2 + lambda phi^4/24 ]`.
pub fn action<T: Real>(f: &ScalarField<T>, m2: T, lambda: T) -> T {
    let lap = laplacian_apply(f);
    let half = T::lit(0.5);
    let quartic = lambda / T::lit(24.0);
    let density = f.values().iter().zip(lap.values()).map(|(&phi, &l)| {
        let phi2 = phi * phi;
        -half * phi * l + half * m2 * phi2 + quartic * phi2 * phi2
    });
    f.lattice().cell_volume() * ordered_sum(density)
}

/// The action written with forward differences `(phi_{n+mu} - phi_n)^2 / (2a^2)`.
pub fn action_difference_form<T: Real>(f: &ScalarField<T>, m2: T, lambda: T) -> T {
    let lattice = f.lattice();
    let v = f.values();
    let inv_2a2 = (T::lit(2.0) * lattice.spacing() * lattice.spacing()).recip();
    let half = T::lit(0.5);
    let quartic = lambda / T::lit(24.0);
    let density = (0..v.len()).map(|n| {
        let kinetic = ordered_sum((0..lattice.dim()).map(|mu| {
            let diff = v[lattice.neighbor(n, mu, true)] - v[n];
            diff * diff
        }));
        let phi2 = v[n] * v[n];
        kinetic * inv_2a2 + half * m2 * phi2 + quartic * phi2 * phi2
    });
    lattice.cell_volume() * ordered_sum(density)
}

/// `-Delta_L f + m2 f + (lambda/6) f^3 - j`.
pub fn eom_residual<T: Real>(
    f: &ScalarField<T>,
    m2: T,
    lambda: T,
    j: &ScalarField<T>,
) -> Result<ScalarField<T>> {
    f.lattice().check_same(j.lattice())?;
    let lap = laplacian_apply(f);
    let sixth = lambda / T::lit(6.0);
    let v = f.values();
    let out = (0..v.len())
        .map(|n| -lap[n] + m2 * v[n] + sixth * v[n] * v[n] * v[n] - j[n])
        .collect();
    ScalarField::new(f.lattice().clone(), out)
}
