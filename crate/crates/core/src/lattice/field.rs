use std::ops::{Index, IndexMut};

use serde::Serialize;

use super::LatticeSpec;
use crate::error::{Error, Result};
use crate::real::{max_abs, ordered_sum, Real};

/// A real value on every site of a lattice. Also used for sources `j_n`.
#[derive(Clone, Debug, Serialize)]
pub struct ScalarField<T> {
    lattice: LatticeSpec<T>,
    values: Vec<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn new(lattice: LatticeSpec<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != lattice.volume() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for a lattice of {} sites",
                values.len(),
                lattice.volume()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!(
                "non-finite field value at site {bad}"
            )));
        }
        Ok(Self { lattice, values })
    }

    pub fn zeros(lattice: &LatticeSpec<T>) -> Self {
        Self::constant(lattice, T::zero())
    }

    pub fn constant(lattice: &LatticeSpec<T>, c: T) -> Self {
        Self {
            values: vec![c; lattice.volume()],
            lattice: lattice.clone(),
        }
    }

    /// Unit source `e_site`.
    pub fn delta(lattice: &LatticeSpec<T>, site: usize) -> Self {
        let mut f = Self::zeros(lattice);
        f.values[site] = T::one();
        f
    }

    pub fn from_fn(lattice: &LatticeSpec<T>, f: impl FnMut(usize) -> T) -> Self {
        Self {
            values: (0..lattice.volume()).map(f).collect(),
            lattice: lattice.clone(),
        }
    }

    /// Evaluates `f` at the physical position of every site.
    pub fn from_positions(lattice: &LatticeSpec<T>, mut f: impl FnMut(&[T]) -> T) -> Self {
        Self::from_fn(lattice, |s| f(&lattice.position(s)))
    }

    /// `sin(p . x_n + phase)` for grid momentum label `k`.
    pub fn plane_wave(lattice: &LatticeSpec<T>, k: usize, phase: T) -> Self {
        let p = lattice.momentum(k);
        Self::from_positions(lattice, |x| (dot(&p, x) + phase).sin())
    }

    pub fn lattice(&self) -> &LatticeSpec<T> {
        &self.lattice
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(mut self, f: impl Fn(T) -> T) -> Self {
        self.values.iter_mut().for_each(|v| *v = f(*v));
        self
    }

    /// Site-wise combination of two fields on the same lattice.
    pub fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.lattice.check_same(&other.lattice)?;
        Ok(Self {
            lattice: self.lattice.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// Plain site sum `sum_n f_n g_n` (no `a^d`), in site order.
    pub fn dot(&self, other: &Self) -> T {
        ordered_sum(self.values.iter().zip(&other.values).map(|(&a, &b)| a * b))
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.values)
    }

    pub fn scaled(&self, c: T) -> Self {
        self.clone().map(|v| v * c)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: T, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + c * b)
    }

    /// Cyclic translation by an integer lattice vector: `out[n + shift] = self[n]`.
    pub fn translated(&self, shift: &[usize]) -> Self {
        let l = self.lattice.extent();
        let mut out = vec![T::zero(); self.values.len()];
        for (site, &v) in self.values.iter().enumerate() {
            let c: Vec<usize> = self
                .lattice
                .coords(site)
                .iter()
                .zip(shift)
                .map(|(c, s)| (c + s) % l)
                .collect();
            out[self.lattice.site_index(&c)] = v;
        }
        Self {
            lattice: self.lattice.clone(),
            values: out,
        }
    }
}

impl<T: Real> PartialEq for ScalarField<T> {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice && self.values == other.values
    }
}

impl<T> Index<usize> for ScalarField<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.values[i]
    }
}

impl<T> IndexMut<usize> for ScalarField<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.values[i]
    }
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    ordered_sum(a.iter().zip(b).map(|(&x, &y)| x * y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        let lat = LatticeSpec::<f64>::new(1, 4, 1.0).unwrap();
        assert!(ScalarField::new(lat.clone(), vec![0.0; 3]).is_err());
        assert!(ScalarField::new(lat.clone(), vec![0.0, f64::NAN, 0.0, 0.0]).is_err());
        let f = ScalarField::new(lat.clone(), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(f.translated(&[1]).values(), &[4.0, 1.0, 2.0, 3.0]);
        let other = LatticeSpec::<f64>::new(1, 4, 0.5).unwrap();
        assert!(f.zip_with(&ScalarField::zeros(&other), |a, _| a).is_err());
    }
}
