use crate::error::{Error, Result};
use crate::real::Real;

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
///
/// Storage keeps room for the `kl` extra super-diagonals created by row
/// interchanges during factorisation.
#[derive(Clone, Debug)]
pub struct BandMatrix<T> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Real> BandMatrix<T> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![T::zero(); n * width],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.ku + self.kl || j >= self.n {
            None
        } else {
            Some(i * self.width + (j + self.kl - i))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.data[s])
    }

    /// Sets an entry inside the declared band.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "({i}, {j}) outside band"
        );
        let s = self.slot(i, j).expect("inside band");
        self.data[s] = v;
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + 1).min(self.n);
                (lo..hi).fold(T::zero(), |acc, j| acc + self.get(i, j) * x[j])
            })
            .collect()
    }

    /// Strict row diagonal dominance `|a_ii| > sum_{j != i} |a_ij|`.
    pub fn is_diagonally_dominant(&self) -> bool {
        (0..self.n).all(|i| {
            let lo = i.saturating_sub(self.kl);
            let hi = (i + self.ku + 1).min(self.n);
            let off = (lo..hi)
                .filter(|&j| j != i)
                .fold(T::zero(), |acc, j| acc + self.get(i, j).abs());
            self.get(i, i).abs() > off
        })
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut a = self.clone();
        let mut x = b.to_vec();
        let scale = a.data.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        let threshold = T::epsilon() * scale * T::from_usize_lossy(n.max(1));
        for k in 0..n {
            let last = (k + a.kl).min(n - 1);
            let (mut p, mut best) = (k, a.get(k, k).abs());
            for i in k + 1..=last {
                let v = a.get(i, k).abs();
                if v > best {
                    p = i;
                    best = v;
                }
            }
            if !(best > threshold) {
                return Err(Error::SingularBand {
                    row: k,
                    pivot: a.get(p, k).to_f64_lossy(),
                });
            }
            let right = (k + a.ku + a.kl).min(n - 1);
            if p != k {
                for j in k..=right {
                    let (vk, vp) = (a.get(k, j), a.get(p, j));
                    a.put(k, j, vp);
                    a.put(p, j, vk);
                }
                x.swap(k, p);
            }
            let pivot = a.get(k, k);
            for i in k + 1..=last {
                let factor = a.get(i, k) / pivot;
                if factor == T::zero() {
                    continue;
                }
                a.put(i, k, T::zero());
                for j in k + 1..=right {
                    let v = a.get(i, j) - factor * a.get(k, j);
                    a.put(i, j, v);
                }
                x[i] = x[i] - factor * x[k];
            }
        }
        for k in (0..n).rev() {
            let right = (k + a.ku + a.kl).min(n - 1);
            let mut acc = x[k];
            for j in k + 1..=right {
                acc = acc - a.get(k, j) * x[j];
            }
            x[k] = acc / a.get(k, k);
        }
        Ok(x)
    }

    #[inline]
    fn put(&mut self, i: usize, j: usize, v: T) {
        if let Some(s) = self.slot(i, j) {
            self.data[s] = v;
        } else {
            debug_assert!(v == T::zero(), "fill outside storage at ({i}, {j})");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_band_systems() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &(n, kl, ku) in &[(1, 0, 0), (7, 2, 2), (30, 3, 1), (25, 5, 5)] {
            let mut m = BandMatrix::<f64>::zeros(n, kl, ku);
            for i in 0..n {
                for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                    m.set(i, j, rng.gen_range(-1.0..1.0));
                }
            }
            let x_true: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b = m.matvec(&x_true);
            let x = m.solve(&b).unwrap();
            let err = x
                .iter()
                .zip(&x_true)
                .fold(0.0f64, |e, (a, b)| e.max((a - b).abs()));
            assert!(err < 1e-9, "n={n} err={err}");
        }
    }

    #[test]
    fn singular_reports_pivot() {
        let mut m = BandMatrix::<f64>::zeros(3, 1, 1);
        m.set(0, 0, 1.0);
        m.set(0, 1, 1.0);
        m.set(1, 0, 1.0);
        m.set(1, 1, 1.0);
        m.set(2, 2, 1.0);
        assert!(matches!(
            m.solve(&[1.0, 1.0, 1.0]),
            Err(Error::SingularBand { row: 1, .. })
        ));
    }
}
