use serde::Serialize;

use crate::real::{ordered_sum, Real};

/// Number of jackknife blocks used for every error bar.
pub const JACKKNIFE_BLOCKS: usize = 20;

/// Central value with a one-sigma error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub value: T,
    pub error: T,
}

impl<T: Real> Estimate<T> {
    /// `|value - reference|` in units of the error.
    pub fn pull(&self, reference: T) -> T {
        (self.value - reference).abs() / self.error.max(T::tiny())
    }

    pub fn within(&self, reference: T, sigmas: T) -> bool {
        (self.value - reference).abs() <= sigmas * self.error
    }
}

/// Delete-one-block jackknife of `f` evaluated on block means.
///
/// `blocks[b][k]` is the mean of observable `k` over block `b`.
pub fn jackknife<T: Real>(blocks: &[Vec<T>], f: impl Fn(&[T]) -> T) -> Estimate<T> {
    let nb = blocks.len();
    let width = blocks.first().map_or(0, Vec::len);
    let nbt = T::from_usize_lossy(nb);
    let full: Vec<T> = (0..width)
        .map(|k| ordered_sum(blocks.iter().map(|b| b[k])) / nbt)
        .collect();
    let value = f(&full);
    if nb < 2 {
        return Estimate {
            value,
            error: T::infinity(),
        };
    }
    let leave_out: Vec<T> = (0..nb)
        .map(|skip| {
            let means: Vec<T> = (0..width)
                .map(|k| (full[k] * nbt - blocks[skip][k]) / (nbt - T::one()))
                .collect();
            f(&means)
        })
        .collect();
    let centre = ordered_sum(leave_out.iter().copied()) / nbt;
    let spread = ordered_sum(leave_out.iter().map(|&v| (v - centre) * (v - centre)));
    Estimate {
        value,
        error: ((nbt - T::one()) / nbt * spread).sqrt(),
    }
}

/// Block means of per-sample observables, dropping leading samples so that all
/// blocks are equal.
pub fn block_means<T: Real>(samples: &[Vec<T>], blocks: usize) -> Vec<Vec<T>> {
    let size = samples.len() / blocks;
    let skip = samples.len() - size * blocks;
    samples[skip..]
        .chunks(size.max(1))
        .take(blocks)
        .map(|chunk| {
            let width = chunk[0].len();
            (0..width)
                .map(|k| ordered_sum(chunk.iter().map(|s| s[k])) / T::from_usize_lossy(chunk.len()))
                .collect()
        })
        .collect()
}

/// `1 - <M^4> / (3 <M^2>^2)` from raw samples of `M`.
pub fn binder_cumulant<T: Real>(samples: &[T]) -> T {
    let n = T::from_usize_lossy(samples.len());
    let m2 = ordered_sum(samples.iter().map(|&m| m * m)) / n;
    let m4 = ordered_sum(samples.iter().map(|&m| m * m * m * m)) / n;
    binder_from_moments(m2, m4)
}

pub(crate) fn binder_from_moments<T: Real>(m2: T, m4: T) -> T {
    T::one() - m4 / (T::lit(3.0) * m2 * m2)
}

/// Binder cumulant with a jackknife error over [`JACKKNIFE_BLOCKS`] blocks.
pub fn binder_estimate<T: Real>(samples: &[T]) -> Estimate<T> {
    let rows: Vec<Vec<T>> = samples
        .iter()
        .map(|&m| vec![m * m, m * m * m * m])
        .collect();
    let blocks = block_means(&rows, JACKKNIFE_BLOCKS);
    jackknife(&blocks, |m| binder_from_moments(m[0], m[1]))
}
