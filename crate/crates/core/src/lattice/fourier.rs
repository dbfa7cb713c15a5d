//! Separable discrete Fourier transform over the lattice, in integer units:
//! `F(k) = sum_n f(n) exp(-2 pi i k.n / L)`.
//!
//! Cost is `O(V d L)`, which is ample for the volumes used here.

use num_complex::Complex;

use super::{LatticeSpec, ScalarField};
use crate::real::Real;

fn transform<T: Real>(lattice: &LatticeSpec<T>, data: &mut [Complex<T>], sign: T) {
    let l = lattice.extent();
    let d = lattice.dim();
    let volume = data.len();
    let twiddle: Vec<Complex<T>> = (0..l)
        .map(|j| {
            let angle =
                sign * T::lit(2.0) * T::PI() * T::from_usize_lossy(j) / T::from_usize_lossy(l);
            Complex::new(angle.cos(), angle.sin())
        })
        .collect();
    let mut line = vec![Complex::new(T::zero(), T::zero()); l];
    for mu in 0..d {
        let stride = l.pow((d - 1 - mu) as u32);
        for base in 0..volume {
            // Visit each line once: from the site whose axis-mu coordinate is 0.
            if !(base / stride).is_multiple_of(l) {
                continue;
            }
            for (k, out) in line.iter_mut().enumerate() {
                let mut acc = Complex::new(T::zero(), T::zero());
                for n in 0..l {
                    acc = acc + data[base + n * stride] * twiddle[(k * n) % l];
                }
                *out = acc;
            }
            for (n, &v) in line.iter().enumerate() {
                data[base + n * stride] = v;
            }
        }
    }
}

/// Forward transform of a real field; output indexed by momentum label.
pub fn dft<T: Real>(f: &ScalarField<T>) -> Vec<Complex<T>> {
    let mut data: Vec<Complex<T>> = f
        .values()
        .iter()
        .map(|&v| Complex::new(v, T::zero()))
        .collect();
    transform(f.lattice(), &mut data, -T::one());
    data
}

/// Inverse transform including the `1/V` normalisation.
pub fn inverse_dft<T: Real>(lattice: &LatticeSpec<T>, spectrum: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut data = spectrum.to_vec();
    transform(lattice, &mut data, T::one());
    let inv_v = T::from_usize_lossy(data.len()).recip();
    data.iter_mut().for_each(|z| *z = *z * inv_v);
    data
}

/// `(a^d / V) |sum_n f_n exp(-i p.x_n)|^2` per momentum: the single-configuration
/// estimator of the momentum-space propagator.
pub fn power_spectrum<T: Real>(f: &ScalarField<T>) -> Vec<T> {
    let lattice = f.lattice();
    let norm = lattice.cell_volume() / T::from_usize_lossy(lattice.volume());
    dft(f).into_iter().map(|z| z.norm_sqr() * norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_naive_transform() {
        let lat = LatticeSpec::<f64>::new(2, 5, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = ScalarField::from_fn(&lat, |_| rng.gen_range(-1.0..1.0));
        let fast = dft(&f);
        for k in 0..lat.volume() {
            let p = lat.momentum(k);
            let mut acc = Complex::new(0.0, 0.0);
            for n in 0..lat.volume() {
                let x = lat.position(n);
                let ph = -(p[0] * x[0] + p[1] * x[1]);
                acc += Complex::new(ph.cos(), ph.sin()) * f[n];
            }
            assert!((acc - fast[k]).norm() < 1e-12);
        }
        let back = inverse_dft(&lat, &fast);
        for n in 0..lat.volume() {
            assert!((back[n].re - f[n]).abs() < 1e-13 && back[n].im.abs() < 1e-13);
        }
    }
}
