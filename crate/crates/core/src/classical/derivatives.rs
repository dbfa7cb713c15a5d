use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::ops::{map_sites, stencil};
use crate::lattice::{eom_residual, ScalarField};
use crate::linalg::{conjugate_gradient, CgOptions};
use crate::real::Real;

const NEWTON_MAX_ITER: usize = 100;

/// `-Delta_L + m^2 + (lambda/2) phi_n^2` around a fixed background, applied
/// without forming the matrix.
#[derive(Clone, Debug)]
pub struct FluctuationOperator<'a, T> {
    background: &'a ScalarField<T>,
    m2: T,
    lambda: T,
    inv_a2: T,
}

impl<'a, T: Real> FluctuationOperator<'a, T> {
    pub fn new(background: &'a ScalarField<T>, m2: T, lambda: T) -> Self {
        let a = background.lattice().spacing();
        Self {
            background,
            m2,
            lambda,
            inv_a2: (a * a).recip(),
        }
    }

    fn local_mass(&self, site: usize) -> T {
        let phi = self.background[site];
        self.m2 + T::lit(0.5) * self.lambda * phi * phi
    }

    pub fn apply(&self, v: &[T], out: &mut [T]) {
        let lattice = self.background.lattice();
        let res = map_sites(v.len(), |s| {
            -stencil(lattice, v, s) * self.inv_a2 + self.local_mass(s) * v[s]
        });
        out.copy_from_slice(&res);
    }

    pub fn diagonal(&self) -> Vec<T> {
        let two_d = T::from_usize_lossy(2 * self.background.lattice().dim());
        (0..self.background.len())
            .map(|s| two_d * self.inv_a2 + self.local_mass(s))
            .collect()
    }

    /// Solves `M x = b` by conjugate gradients.
    pub fn solve(&self, b: &[T], opts: CgOptions<T>) -> Result<Vec<T>> {
        Ok(conjugate_gradient(|v, out| self.apply(v, out), &self.diagonal(), b, opts)?.x)
    }
}

pub fn hessian_apply<T: Real>(
    background: &ScalarField<T>,
    v: &ScalarField<T>,
    m2: T,
    lambda: T,
) -> Result<ScalarField<T>> {
    background.lattice().check_same(v.lattice())?;
    let mut out = vec![T::zero(); v.len()];
    FluctuationOperator::new(background, m2, lambda).apply(v.values(), &mut out);
    ScalarField::new(v.lattice().clone(), out)
}

/// Column `source_site` of the inverse fluctuation operator, `d phi_n / d j_m`.
pub fn classical_propagator_column<T: Real>(
    background: &ScalarField<T>,
    source_site: usize,
    m2: T,
    lambda: T,
) -> Result<ScalarField<T>> {
    classical_propagator_column_with(background, source_site, m2, lambda, CgOptions::default())
}

pub fn classical_propagator_column_with<T: Real>(
    background: &ScalarField<T>,
    source_site: usize,
    m2: T,
    lambda: T,
    opts: CgOptions<T>,
) -> Result<ScalarField<T>> {
    let lattice = background.lattice();
    if source_site >= lattice.volume() {
        return Err(Error::Invalid(format!(
            "source site {source_site} outside a lattice of {} sites",
            lattice.volume()
        )));
    }
    let e = ScalarField::delta(lattice, source_site);
    let x = FluctuationOperator::new(background, m2, lambda).solve(e.values(), opts)?;
    ScalarField::new(lattice.clone(), x)
}

/// `d^2 phi_n / d j_m d j_l = -sum_r G_nr lambda phi_r G_rm G_rl` with `G = M^-1`.
pub fn second_functional_derivative<T: Real>(
    background: &ScalarField<T>,
    site_m: usize,
    site_l: usize,
    m2: T,
    lambda: T,
) -> Result<ScalarField<T>> {
    let g_m = classical_propagator_column(background, site_m, m2, lambda)?;
    let g_l = if site_l == site_m {
        g_m.clone()
    } else {
        classical_propagator_column(background, site_l, m2, lambda)?
    };
    let vertex: Vec<T> = (0..background.len())
        .map(|r| lambda * background[r] * g_m[r] * g_l[r])
        .collect();
    let op = FluctuationOperator::new(background, m2, lambda);
    let x = op.solve(&vertex, CgOptions::default())?;
    ScalarField::new(
        background.lattice().clone(),
        x.into_iter().map(|v| -v).collect(),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct NewtonSolution<T> {
    pub field: ScalarField<T>,
    pub iterations: usize,
    /// Max-norm of the final EOM residual.
    pub residual: T,
}

/// Solves `-Delta_L phi + m^2 phi + (lambda/6) phi^3 = j` by Newton's method.
pub fn newton_solve_eom<T: Real>(
    j: &ScalarField<T>,
    guess: &ScalarField<T>,
    m2: T,
    lambda: T,
    tol: T,
) -> Result<NewtonSolution<T>> {
    if !(tol > T::zero()) {
        return Err(Error::domain("Newton tolerance must be positive", tol));
    }
    j.lattice().check_same(guess.lattice())?;
    let mut phi = guess.clone();
    let opts = CgOptions {
        rel_tol: T::lit(1e-14).max(T::epsilon() * T::lit(4.0)),
        max_iter: 10_000,
    };
    for iterations in 0..=NEWTON_MAX_ITER {
        let r = eom_residual(&phi, m2, lambda, j)?;
        let residual = r.max_abs();
        if residual <= tol {
            return Ok(NewtonSolution {
                field: phi,
                iterations,
                residual,
            });
        }
        if iterations == NEWTON_MAX_ITER {
            return Err(Error::NotConverged {
                what: "Newton solve of the lattice EOM",
                iterations,
                residual: residual.to_f64_lossy(),
            });
        }
        let step = FluctuationOperator::new(&phi, m2, lambda).solve(r.values(), opts)?;
        phi.values_mut()
            .iter_mut()
            .zip(&step)
            .for_each(|(p, &d)| *p = *p - d);
    }
    unreachable!()
}
