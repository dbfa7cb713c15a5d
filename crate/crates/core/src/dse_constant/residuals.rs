use super::GapSolution;
use crate::error::{Error, Result};
use crate::lattice::{laplacian_apply, LatticeSpec, ScalarField};
use crate::real::Real;

/// `m^2 phi + (lambda/6)(phi^3 + 3 phi G_nn + C3_nnn) - j` for a constant background.
pub fn one_point_residual<T: Real>(phi: T, gnn: T, c3_nnn: T, m2: T, lambda: T, j: T) -> T {
    m2 * phi + lambda / T::lit(6.0) * (phi * phi * phi + T::lit(3.0) * phi * gnn + c3_nnn) - j
}

/// Site-wise `(-Delta_L + m^2) phi + (lambda/6)(phi^3 + 3 phi G_nn + C3_nnn) - j`.
pub fn one_point_residual_field<T: Real>(
    phi: &ScalarField<T>,
    gnn: &ScalarField<T>,
    c3_nnn: &ScalarField<T>,
    m2: T,
    lambda: T,
    j: &ScalarField<T>,
) -> Result<ScalarField<T>> {
    let lat = phi.lattice();
    for other in [gnn, c3_nnn, j] {
        lat.check_same(other.lattice())?;
    }
    let lap = laplacian_apply(phi);
    let sixth = lambda / T::lit(6.0);
    let out = (0..phi.len())
        .map(|n| {
            let p = phi[n];
            -lap[n] + m2 * p + sixth * (p * p * p + T::lit(3.0) * p * gnn[n] + c3_nnn[n]) - j[n]
        })
        .collect();
    ScalarField::new(lat.clone(), out)
}

/// `m^2 + (lambda/2)(phi^2 + G_nn)`: the mass term of the two-point equation.
pub fn two_point_mass<T: Real>(m2: T, lambda: T, phi: T, gnn: T) -> T {
    m2 + T::lit(0.5) * lambda * (phi * phi + gnn)
}

fn check_len<T>(what: &str, values: &[T], v: usize) -> Result<()> {
    if values.len() != v {
        return Err(Error::ShapeMismatch(format!(
            "{what} has {} entries for {v} grid momenta",
            values.len()
        )));
    }
    Ok(())
}

/// Per grid momentum: `(p_hat^2 + m^2 + (lambda/2)(phi^2 + G_nn)) G(p) - 1 +
/// (lambda/2) phi C3(p) + (lambda/6) C4(p)`. Missing cumulants are the
/// Gaussian truncation (zero).
#[allow(clippy::too_many_arguments)]
pub fn two_point_residual<T: Real>(
    g: &[T],
    phi: T,
    gnn: T,
    c3: Option<&[T]>,
    c4: Option<&[T]>,
    m2: T,
    lambda: T,
    lattice: &LatticeSpec<T>,
) -> Result<Vec<T>> {
    let v = lattice.volume();
    check_len("propagator", g, v)?;
    if let Some(c) = c3 {
        check_len("C3", c, v)?;
    }
    if let Some(c) = c4 {
        check_len("C4", c, v)?;
    }
    let mass = two_point_mass(m2, lambda, phi, gnn);
    let half = T::lit(0.5) * lambda;
    let sixth = lambda / T::lit(6.0);
    Ok(lattice
        .hat_p_squared_grid()
        .into_iter()
        .enumerate()
        .map(|(p, p2)| {
            let mut r = (p2 + mass) * g[p] - T::one();
            if let Some(c) = c3 {
                r = r + half * phi * c[p];
            }
            if let Some(c) = c4 {
                r = r + sixth * c[p];
            }
            r
        })
        .collect())
}

/// `D(p+q) C3(p, q) + lambda phi G(p) G(q)` on every grid pair, row-major,
/// with `D` and `G` from the gap solution.
pub fn c3_equation_residual<T: Real>(c3: &[T], phi: T, sol: &GapSolution<T>) -> Result<Vec<T>> {
    let lat = &sol.lattice;
    let v = lat.volume();
    check_len("C3 table", c3, v * v)?;
    let d: Vec<T> = lat
        .hat_p_squared_grid()
        .into_iter()
        .map(|p2| p2 + sol.mu2)
        .collect();
    Ok((0..v * v)
        .map(|i| {
            let (p, q) = (i / v, i % v);
            d[lat.momentum_add(p, q)] * c3[i] + sol.lambda * phi / (d[p] * d[q])
        })
        .collect())
}
