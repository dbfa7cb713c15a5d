//! Periodic hypercubic lattices, real fields over their sites, the lattice
//! Laplacian and the lattice action.
//!
//! Sites are stored flat in row-major order: the coordinate along axis 0
//! varies slowest. Grid momenta `p_mu = 2 pi k_mu / (L a)` use the same
//! ordering of the integer vector `k`.

mod field;
mod fourier;
mod io;
pub(crate) mod ops;

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;

pub use field::ScalarField;
pub use fourier::{dft, inverse_dft, power_spectrum};
pub use io::{read_field, write_field};
pub use ops::{action, action_difference_form, eom_residual, hat_p_squared, laplacian_apply};

/// Geometry of a `d`-dimensional periodic lattice with `L` sites per axis.
#[derive(Clone, Debug, Serialize)]
pub struct LatticeSpec<T> {
    d: usize,
    #[serde(rename = "L")]
    l: usize,
    a: T,
    #[serde(skip)]
    neighbors: Arc<[usize]>,
}

impl<T: Real> PartialEq for LatticeSpec<T> {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.l == other.l && self.a == other.a
    }
}

impl<T: Real> LatticeSpec<T> {
    pub fn new(d: usize, l: usize, a: T) -> Result<Self> {
        if d == 0 || l == 0 {
            return Err(Error::Invalid(format!(
                "lattice needs d >= 1 and L >= 1 (got d={d}, L={l})"
            )));
        }
        if !(a > T::zero()) || !a.is_finite() {
            return Err(Error::domain("lattice spacing", a));
        }
        let volume = u32::try_from(d)
            .ok()
            .and_then(|d| l.checked_pow(d))
            .ok_or_else(|| Error::Invalid(format!("L^d overflows for L={l}, d={d}")))?;
        let mut neighbors = Vec::with_capacity(volume * 2 * d);
        let mut coords = vec![0usize; d];
        for site in 0..volume {
            decode(site, l, &mut coords);
            for mu in 0..d {
                let stride = l.pow((d - 1 - mu) as u32);
                let c = coords[mu];
                let up = if c + 1 == l {
                    site - (l - 1) * stride
                } else {
                    site + stride
                };
                let down = if c == 0 {
                    site + (l - 1) * stride
                } else {
                    site - stride
                };
                neighbors.push(up);
                neighbors.push(down);
            }
        }
        Ok(Self {
            d,
            l,
            a,
            neighbors: neighbors.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Sites per axis.
    pub fn extent(&self) -> usize {
        self.l
    }

    pub fn spacing(&self) -> T {
        self.a
    }

    /// Number of sites, `L^d`.
    pub fn volume(&self) -> usize {
        self.neighbors.len() / (2 * self.d)
    }

    /// `a^d`.
    pub fn cell_volume(&self) -> T {
        self.a.powi(self.d as i32)
    }

    /// The `2d` neighbours of `site`, ordered `(+0, -0, +1, -1, ...)`.
    #[inline]
    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.neighbors[site * 2 * self.d..(site + 1) * 2 * self.d]
    }

    #[inline]
    pub fn neighbor(&self, site: usize, mu: usize, forward: bool) -> usize {
        self.neighbors[site * 2 * self.d + 2 * mu + usize::from(!forward)]
    }

    pub fn coords(&self, site: usize) -> Vec<usize> {
        let mut c = vec![0; self.d];
        decode(site, self.l, &mut c);
        c
    }

    /// Row-major index of an integer coordinate vector (wrapped periodically).
    pub fn site_index(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * self.l + c % self.l)
    }

    /// Physical position `x_n = a n`.
    pub fn position(&self, site: usize) -> Vec<T> {
        self.coords(site)
            .into_iter()
            .map(|c| self.a * T::from_usize_lossy(c))
            .collect()
    }

    /// Grid momentum with integer label `index` (same ordering as sites).
    pub fn momentum(&self, index: usize) -> Vec<T> {
        let scale = T::lit(2.0) * T::PI() / (T::from_usize_lossy(self.l) * self.a);
        self.coords(index)
            .into_iter()
            .map(|k| scale * T::from_usize_lossy(k))
            .collect()
    }

    /// Label of `p_i + p_j` on the momentum grid.
    pub fn momentum_add(&self, i: usize, j: usize) -> usize {
        let (ci, cj) = (self.coords(i), self.coords(j));
        let sum: Vec<usize> = ci.iter().zip(&cj).map(|(a, b)| (a + b) % self.l).collect();
        self.site_index(&sum)
    }

    /// Label of `-p_i`.
    pub fn momentum_neg(&self, i: usize) -> usize {
        let c: Vec<usize> = self
            .coords(i)
            .iter()
            .map(|&k| (self.l - k) % self.l)
            .collect();
        self.site_index(&c)
    }

    /// `p_hat^2` for grid momentum `index`.
    pub fn hat_p_squared_at(&self, index: usize) -> T {
        hat_p_squared(&self.momentum(index), self)
    }

    /// `p_hat^2` for every grid momentum, in label order.
    pub fn hat_p_squared_grid(&self) -> Vec<T> {
        (0..self.volume())
            .map(|i| self.hat_p_squared_at(i))
            .collect()
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "(d={}, L={}, a={}) vs (d={}, L={}, a={})",
                self.d, self.l, self.a, other.d, other.l, other.a
            )))
        }
    }
}

fn decode(mut site: usize, l: usize, out: &mut [usize]) {
    for c in out.iter_mut().rev() {
        *c = site % l;
        site /= l;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry() {
        let lat = LatticeSpec::<f64>::new(3, 4, 0.5).unwrap();
        assert_eq!(lat.volume(), 64);
        for site in 0..lat.volume() {
            let nb = lat.neighbors(site);
            assert_eq!(nb.len(), 6);
            for mu in 0..3 {
                let up = lat.neighbor(site, mu, true);
                assert_eq!(lat.neighbor(up, mu, false), site);
                let mut c = lat.coords(site);
                c[mu] = (c[mu] + 1) % 4;
                assert_eq!(lat.site_index(&c), up);
            }
        }
        assert_eq!(
            lat.position(lat.site_index(&[1, 2, 3])),
            vec![0.5, 1.0, 1.5]
        );
    }

    #[test]
    fn momentum_grid() {
        let lat = LatticeSpec::<f64>::new(2, 6, 1.0).unwrap();
        assert_eq!(lat.hat_p_squared_grid().len(), 36);
        for i in 0..36 {
            let j = lat.momentum_neg(i);
            assert_eq!(lat.momentum_add(i, j), 0);
            assert!((lat.hat_p_squared_at(i) - lat.hat_p_squared_at(j)).abs() < 1e-14);
        }
    }

    #[test]
    fn tiny_lattices() {
        let one = LatticeSpec::<f64>::new(1, 1, 1.0).unwrap();
        assert_eq!(one.neighbors(0), &[0, 0]);
        let two = LatticeSpec::<f64>::new(1, 2, 1.0).unwrap();
        assert_eq!(two.neighbors(0), &[1, 1]);
        assert!(LatticeSpec::<f64>::new(0, 2, 1.0).is_err());
        assert!(LatticeSpec::<f64>::new(1, 2, -1.0).is_err());
    }
}
