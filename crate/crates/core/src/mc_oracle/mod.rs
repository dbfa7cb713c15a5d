//! Metropolis sampler for the lattice action, used as an independent check of
//! the gap-equation propagator and to measure Binder cumulants.

mod stats;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{power_spectrum, LatticeSpec, ScalarField};
use crate::real::{ordered_sum, Real};

pub use stats::{
    binder_cumulant, binder_estimate, block_means, jackknife, Estimate, JACKKNIFE_BLOCKS,
};

const TUNE_INTERVAL: usize = 10;
const TARGET_ACCEPTANCE: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McConfig<T: Real> {
    pub lattice: LatticeSpec<T>,
    pub m2: T,
    pub lambda: T,
    /// Total sweeps, thermalization included.
    pub sweeps: usize,
    pub thermalization: usize,
    /// Proposals are `phi + width * U(-1, 1)`.
    pub proposal_width: T,
    pub seed: u64,
    /// Adjust the width towards 50% acceptance during thermalization.
    pub tune_width: bool,
    /// Measure the momentum-space propagator every sweep.
    pub measure_propagator: bool,
}

impl<T: Real> McConfig<T> {
    pub fn new(
        lattice: LatticeSpec<T>,
        m2: T,
        lambda: T,
        sweeps: usize,
        thermalization: usize,
        seed: u64,
    ) -> Self {
        Self {
            lattice,
            m2,
            lambda,
            sweeps,
            thermalization,
            proposal_width: T::one(),
            seed,
            tune_width: true,
            measure_propagator: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sweeps <= self.thermalization {
            return Err(Error::Invalid(format!(
                "sweeps ({}) must exceed thermalization ({})",
                self.sweeps, self.thermalization
            )));
        }
        if self.sweeps - self.thermalization < JACKKNIFE_BLOCKS {
            return Err(Error::Invalid(format!(
                "need at least {JACKKNIFE_BLOCKS} measurement sweeps"
            )));
        }
        if !(self.proposal_width > T::zero()) || !self.proposal_width.is_finite() {
            return Err(Error::domain("proposal width", self.proposal_width));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McResult<T> {
    pub mean_field: Estimate<T>,
    /// Site averages of `phi^2` and `phi^4`.
    pub phi2: Estimate<T>,
    pub phi4: Estimate<T>,
    /// `(a^d / V) <|phi(p)|^2>` per grid momentum; empty if not measured.
    pub propagator: Vec<Estimate<T>>,
    pub binder: Estimate<T>,
    pub acceptance_rate: T,
    /// Acceptance outside `[0.2, 0.8]`.
    pub acceptance_warning: bool,
    /// Width used during measurement.
    pub proposal_width: T,
    pub measurements: usize,
}

/// Per-sweep volume averages, one entry per measurement sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct McSeries<T> {
    pub magnetization: Vec<T>,
    pub phi2: Vec<T>,
    pub phi4: Vec<T>,
}

/// Change of the action when site `n` moves from `old` to `new`.
pub fn local_action_difference<T: Real>(
    lattice: &LatticeSpec<T>,
    field: &[T],
    site: usize,
    new: T,
    m2: T,
    lambda: T,
) -> T {
    let a = lattice.spacing();
    let inv_a2 = (a * a).recip();
    let old = field[site];
    let (n2, o2) = (new * new, old * old);
    let kinetic = if lattice.extent() == 1 {
        // Every link is a self-link.
        T::zero()
    } else {
        let nb = ordered_sum(lattice.neighbors(site).iter().map(|&j| field[j]));
        T::from_usize_lossy(lattice.dim()) * inv_a2 * (n2 - o2) - inv_a2 * (new - old) * nb
    };
    lattice.cell_volume()
        * (kinetic + T::lit(0.5) * m2 * (n2 - o2) + lambda / T::lit(24.0) * (n2 * n2 - o2 * o2))
}

struct Chain<T: Real> {
    lattice: LatticeSpec<T>,
    field: Vec<T>,
    width: T,
    rng: ChaCha8Rng,
    // Action coefficients, already multiplied by a^d.
    self_links: bool,
    diag: T,
    hop: T,
    half_m2: T,
    quartic: T,
}

impl<T: Real> Chain<T> {
    fn new(cfg: &McConfig<T>, seed: u64) -> Self {
        let lattice = cfg.lattice.clone();
        let cv = lattice.cell_volume();
        let inv_a2 = (lattice.spacing() * lattice.spacing()).recip();
        Self {
            field: vec![T::zero(); lattice.volume()],
            width: cfg.proposal_width,
            rng: ChaCha8Rng::seed_from_u64(seed),
            self_links: lattice.extent() == 1,
            diag: cv * T::from_usize_lossy(lattice.dim()) * inv_a2,
            hop: cv * inv_a2,
            half_m2: cv * T::lit(0.5) * cfg.m2,
            quartic: cv * cfg.lambda / T::lit(24.0),
            lattice,
        }
    }

    /// One site-sequential sweep; returns the number of accepted proposals.
    /// Same arithmetic as [`local_action_difference`] with hoisted constants.
    fn sweep(&mut self) -> usize {
        let mut accepted = 0;
        for site in 0..self.field.len() {
            let step: f64 = self.rng.gen_range(-1.0..1.0);
            let old = self.field[site];
            let new = old + self.width * T::lit(step);
            let (n2, o2) = (new * new, old * old);
            let kinetic = if self.self_links {
                T::zero()
            } else {
                let nb = self
                    .lattice
                    .neighbors(site)
                    .iter()
                    .fold(T::zero(), |acc, &j| acc + self.field[j]);
                self.diag * (n2 - o2) - self.hop * (new - old) * nb
            };
            let ds = kinetic + self.half_m2 * (n2 - o2) + self.quartic * (n2 * n2 - o2 * o2);
            let accept = ds <= T::zero() || {
                let u: f64 = self.rng.gen();
                T::lit(u) < (-ds).exp()
            };
            if accept {
                self.field[site] = new;
                accepted += 1;
            }
        }
        accepted
    }
}

struct ChainOutput<T> {
    rows: Vec<Vec<T>>,
    series: McSeries<T>,
    accepted: usize,
    proposals: usize,
    width: T,
}

fn run_chain<T: Real>(cfg: &McConfig<T>, seed: u64) -> ChainOutput<T> {
    let lattice = cfg.lattice.clone();
    let volume = lattice.volume();
    let mut chain = Chain::new(cfg, seed);
    let mut window = 0;
    for sweep in 0..cfg.thermalization {
        window += chain.sweep();
        if cfg.tune_width && (sweep + 1) % TUNE_INTERVAL == 0 {
            let rate = window as f64 / (TUNE_INTERVAL * volume) as f64;
            let factor = (rate / TARGET_ACCEPTANCE).clamp(0.8, 1.25);
            chain.width = chain.width * T::lit(factor);
            window = 0;
        }
    }

    let vt = T::from_usize_lossy(volume);
    let measurements = cfg.sweeps - cfg.thermalization;
    let mut rows = Vec::with_capacity(measurements);
    let mut series = McSeries::default();
    let mut accepted = 0;
    for _ in 0..measurements {
        accepted += chain.sweep();
        let f = &chain.field;
        let m = ordered_sum(f.iter().copied()) / vt;
        let p2 = ordered_sum(f.iter().map(|&x| x * x)) / vt;
        let p4 = ordered_sum(f.iter().map(|&x| x * x * x * x)) / vt;
        let mut row = vec![m, m * m, m * m * m * m, p2, p4];
        if cfg.measure_propagator {
            let field = ScalarField::new(lattice.clone(), f.clone()).expect("finite field");
            row.extend(power_spectrum(&field));
        }
        rows.push(row);
        series.magnetization.push(m);
        series.phi2.push(p2);
        series.phi4.push(p4);
    }
    ChainOutput {
        rows,
        series,
        accepted,
        proposals: measurements * volume,
        width: chain.width,
    }
}

fn summarize<T: Real>(
    cfg: &McConfig<T>,
    outputs: Vec<ChainOutput<T>>,
) -> (McResult<T>, Vec<McSeries<T>>) {
    let mut blocks = Vec::new();
    let per_chain = (JACKKNIFE_BLOCKS / outputs.len()).max(1);
    for out in &outputs {
        blocks.extend(block_means(&out.rows, per_chain));
    }
    let est = |k: usize| jackknife(&blocks, |m| m[k]);
    let accepted: usize = outputs.iter().map(|o| o.accepted).sum();
    let proposals: usize = outputs.iter().map(|o| o.proposals).sum();
    let rate = accepted as f64 / proposals as f64;
    let propagator = if cfg.measure_propagator {
        (0..cfg.lattice.volume()).map(|p| est(5 + p)).collect()
    } else {
        Vec::new()
    };
    let result = McResult {
        mean_field: est(0),
        phi2: est(3),
        phi4: est(4),
        propagator,
        binder: jackknife(&blocks, |m| stats::binder_from_moments(m[1], m[2])),
        acceptance_rate: T::lit(rate),
        acceptance_warning: !(0.2..=0.8).contains(&rate),
        proposal_width: outputs[0].width,
        measurements: outputs.iter().map(|o| o.rows.len()).sum(),
    };
    (result, outputs.into_iter().map(|o| o.series).collect())
}

/// Runs one chain and returns the jackknife summary.
pub fn metropolis_run<T: Real>(cfg: &McConfig<T>) -> Result<McResult<T>> {
    Ok(metropolis_run_with_series(cfg)?.0)
}

/// As [`metropolis_run`], also returning the per-sweep series.
pub fn metropolis_run_with_series<T: Real>(
    cfg: &McConfig<T>,
) -> Result<(McResult<T>, McSeries<T>)> {
    cfg.validate()?;
    let (result, mut series) = summarize(cfg, vec![run_chain(cfg, cfg.seed)]);
    Ok((result, series.pop().expect("one chain")))
}

/// Independent chains seeded `seed, seed + 1, ...`, run in parallel and pooled.
/// With `chains <= 20` each chain contributes `20 / chains` jackknife blocks.
pub fn metropolis_run_chains<T: Real>(
    cfg: &McConfig<T>,
    chains: usize,
) -> Result<(McResult<T>, Vec<McSeries<T>>)> {
    cfg.validate()?;
    if chains == 0 {
        return Err(Error::Invalid("need at least one chain".into()));
    }
    let outputs: Vec<ChainOutput<T>> = (0..chains as u64)
        .into_par_iter()
        .map(|i| run_chain(cfg, cfg.seed.wrapping_add(i)))
        .collect();
    Ok(summarize(cfg, outputs))
}
