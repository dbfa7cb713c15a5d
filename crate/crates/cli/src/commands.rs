use anyhow::{bail, Context};
use lattice_dse::classical::{
    build_sn_wave, dispersion_solve_b2, periodic_lattice_for, sn_wave_eom_convergence, SnWave,
};
use lattice_dse::dse_constant::{cumulant_scan, gap_solve, solve_constant_background};
use lattice_dse::elliptic::EllipticModulus;
use lattice_dse::lame_bloch::{
    bloch_solve, build_bloch_system, potential_resummation_check, spectral_fit,
};
use lattice_dse::lattice::{eom_residual, LatticeSpec, ScalarField};
use lattice_dse::linalg::loglog_slope;
use lattice_dse::mc_oracle::{metropolis_run_chains, McConfig};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{Cell, Table};

pub struct Outcome {
    pub results: Value,
    pub tables: Vec<Table>,
}

fn lattice(cfg: &RunConfig) -> anyhow::Result<LatticeSpec<f64>> {
    Ok(LatticeSpec::new(
        cfg.lattice.d,
        cfg.lattice.l,
        cfg.lattice.a,
    )?)
}

/// sn-wave (or, at `lambda = 0`, plane-wave) residuals under refinement of `a`.
pub fn classical_verify(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let n = &cfg.numerics;
    let d = cfg.lattice.d;
    let lambda = cfg.model.lambda;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    let summary;
    if lambda == 0.0 {
        // b sin(p.x + theta) with m^2 = -p_hat^2 solves the free lattice equation exactly.
        let p_axis = 2.0 * std::f64::consts::PI * n.windings as f64 / n.box_length;
        let mut p = vec![0.0; d];
        p[0] = p_axis;
        for &a in &n.spacings {
            let lat = periodic_lattice_for(&p, 2.0 * std::f64::consts::PI, n.box_length, a)?;
            let m2 = -lattice_dse::lattice::hat_p_squared(&p, &lat);
            let f = ScalarField::from_positions(&lat, |x| {
                cfg.elliptic.b * (p[0] * x[0] + cfg.elliptic.theta).sin()
            });
            let r = eom_residual(&f, m2, 0.0, &ScalarField::zeros(&lat))?.max_abs();
            rows.push(vec![
                Cell::Real(a),
                Cell::Int(lat.extent() as i64),
                Cell::Real(m2),
                Cell::Real(r),
            ]);
            points.push(json!({ "a": a, "L": lat.extent(), "m2": m2, "residual": r }));
        }
        summary = json!({ "kind": "plane_wave", "p": p, "b": cfg.elliptic.b });
    } else {
        let modulus = EllipticModulus::new(cfg.elliptic.m)?;
        let mut p = vec![0.0; d];
        p[0] = modulus.period() * n.windings as f64 / n.box_length;
        let (wave, m2) = SnWave::continuum_solution(p, cfg.elliptic.theta, modulus, lambda)
            .context("continuum constraints for the sn wave")?;
        let conv = sn_wave_eom_convergence(&wave, m2, lambda, n.box_length, &n.spacings)?;
        for &(a, r) in &conv {
            let extent = (n.box_length / a).round() as i64;
            rows.push(vec![
                Cell::Real(a),
                Cell::Int(extent),
                Cell::Real(m2),
                Cell::Real(r),
            ]);
            points.push(json!({ "a": a, "L": extent, "m2": m2, "residual": r }));
        }
        let first = periodic_lattice_for(&wave.p, modulus.period(), n.box_length, n.spacings[0])?;
        let field = build_sn_wave(&wave, &first)?;
        let modes: Vec<Value> = (0..4)
            .map(
                |k| match dispersion_solve_b2(k, &wave.p, m2, lambda, &modulus, &first) {
                    Ok(s) => json!({ "n": k, "b2": s.b2, "real_amplitude": s.real_amplitude }),
                    Err(e) => json!({ "n": k, "error": e.to_string() }),
                },
            )
            .collect();
        summary = json!({
            "kind": "sn_wave",
            "b": wave.b,
            "p": wave.p,
            "m2": m2,
            "max_field": field.max_abs(),
            "mode_amplitudes_at_coarsest_a": modes,
        });
    }
    let slope = if points.len() >= 2
        && rows
            .iter()
            .all(|r| matches!(r[3], Cell::Real(v) if v > 0.0))
    {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .map(|r| match (&r[0], &r[3]) {
                (Cell::Real(a), Cell::Real(v)) => (*a, *v),
                _ => unreachable!(),
            })
            .collect();
        Some(loglog_slope(&pts))
    } else {
        None
    };
    Ok(Outcome {
        results: json!({ "wave": summary, "convergence": points, "loglog_slope": slope }),
        tables: vec![Table::new(
            "residuals",
            &["a", "L", "m2", "residual_max_norm"],
            rows,
        )],
    })
}

pub fn gap(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let lat = lattice(cfg)?;
    let sol = gap_solve(cfg.model.m2, cfg.model.lambda, &lat, cfg.numerics.tol)?;
    let background =
        solve_constant_background(cfg.model.m2, cfg.model.lambda, &lat, cfg.numerics.tol).ok();
    let g = sol.propagator_grid();
    let rows = (0..lat.volume())
        .map(|k| {
            vec![
                Cell::Int(k as i64),
                Cell::Real(lat.hat_p_squared_at(k)),
                Cell::Real(g[k]),
            ]
        })
        .collect();
    Ok(Outcome {
        results: json!({
            "gnn": sol.gnn,
            "mu2": sol.mu2,
            "fixed_point_residual": sol.fixed_point_residual,
            "iterations": sol.iterations,
            "convention": sol.convention,
            "phase_selection": background.map(|b| json!({
                "phase": b.phase,
                "phi": b.phi,
                "vev_squared": b.vev_squared,
                "gnn": b.gap.gnn,
                "mu2": b.gap.mu2,
                "convention": b.gap.convention,
            })),
        }),
        tables: vec![Table::new(
            "propagator",
            &["momentum_index", "p_hat_squared", "propagator"],
            rows,
        )],
    })
}

pub fn cumulants(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let r = cumulant_scan(
        cfg.lattice.d,
        &cfg.numerics.extents,
        cfg.lattice.a,
        cfg.model.m2,
        cfg.model.lambda,
        cfg.model.phi,
        cfg.numerics.tol,
    )?;
    let rows = (0..r.volumes.len())
        .map(|i| {
            let l = r.volumes[i];
            vec![
                Cell::Int(l as i64),
                Cell::Int(l.pow(r.dimension as u32) as i64),
                Cell::Real(r.gnn[i]),
                Cell::Real(r.mu2[i]),
                Cell::Real(r.c3_nnn[i]),
            ]
        })
        .collect();
    Ok(Outcome {
        results: serde_json::to_value(&r)?,
        tables: vec![Table::new(
            "cumulants",
            &["L", "volume", "gnn", "mu2", "c3_nnn"],
            rows,
        )],
    })
}

pub fn lame_spectrum(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let lat = lattice(cfg)?;
    let modulus = EllipticModulus::new(cfg.elliptic.m)?;
    let p0 = cfg.elliptic.p0.clone().unwrap_or_else(|| {
        let mut p = vec![0.0; cfg.lattice.d];
        p[0] = 2.0 * modulus.quarter_period() / (8.0 * cfg.lattice.a);
        p
    });
    let sys = build_bloch_system(
        cfg.model.lambda,
        cfg.elliptic.b,
        p0,
        modulus,
        cfg.model.m2,
        cfg.model.gnn,
        cfg.numerics.harmonics,
    )?
    .with_band(cfg.band());
    let checks: Vec<_> = (-20..=20)
        .map(|l| potential_resummation_check(&sys, l, cfg.lattice.a))
        .collect();
    let max_gap = checks.iter().map(|c| c.gap).fold(0.0, f64::max);

    let count = cfg.numerics.samples.max(1);
    let p_max = std::f64::consts::PI / cfg.lattice.a;
    let mut samples = Vec::with_capacity(count);
    let mut momenta = Vec::with_capacity(count);
    for i in 0..count {
        let mut p = vec![0.0; cfg.lattice.d];
        p[0] = p_max * i as f64 / count as f64;
        let g0 = bloch_solve(&p, &sys, &lat)?.g0();
        samples.push((lattice_dse::lattice::hat_p_squared(&p, &lat), g0));
        momenta.push(p[0]);
    }
    let fit = spectral_fit(&samples, &sys.pole_masses(cfg.lattice.a))?;
    let rows = samples
        .iter()
        .zip(&momenta)
        .map(|(&(p2, g), &p)| {
            let model: f64 = fit
                .weights
                .iter()
                .zip(&fit.masses)
                .map(|(b, m)| b / (p2 + m))
                .sum();
            vec![
                Cell::Real(p),
                Cell::Real(p2),
                Cell::Real(g),
                Cell::Real(model),
            ]
        })
        .collect();
    Ok(Outcome {
        results: json!({
            "m2_eff": sys.m2_eff,
            "mbar2": sys.mbar2,
            "shift": sys.shift,
            "couplings": sys.couplings,
            "band": sys.band,
            "resummation_max_gap": max_gap,
            "resummation_tail_bound": sys.tail_bound(),
            "spectral": fit,
        }),
        tables: vec![Table::new(
            "bloch_propagator",
            &["p", "p_hat_squared", "g0", "kl_fit"],
            rows,
        )],
    })
}

pub fn mc_compare(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let lat = lattice(cfg)?;
    let mut mc = McConfig::new(
        lat.clone(),
        cfg.model.m2,
        cfg.model.lambda,
        cfg.mc.sweeps,
        cfg.mc.thermalization,
        cfg.mc.seed,
    );
    mc.proposal_width = cfg.mc.proposal_width;
    let (result, series) = metropolis_run_chains(&mc, cfg.mc.chains)?;
    // The sampler has phi -> -phi symmetry, so compare with the symmetric-phase gap solution.
    let reference =
        solve_constant_background(cfg.model.m2, cfg.model.lambda, &lat, cfg.numerics.tol)
            .context("gap-equation reference propagator")?;
    if reference.phi != 0.0 {
        bail!("reference background is not symmetric");
    }
    let predicted = reference.gap.propagator_grid();
    let mut rows = Vec::new();
    let mut max_z: f64 = 0.0;
    for (k, est) in result.propagator.iter().enumerate() {
        let z = (est.value - predicted[k]) / est.error;
        max_z = max_z.max(z.abs());
        rows.push(vec![
            Cell::Int(k as i64),
            Cell::Real(lat.hat_p_squared_at(k)),
            Cell::Real(est.value),
            Cell::Real(est.error),
            Cell::Real(predicted[k]),
            Cell::Real(z),
        ]);
    }
    let mut tables = vec![Table::new(
        "mc_propagator",
        &[
            "momentum_index",
            "p_hat_squared",
            "measured",
            "error",
            "predicted",
            "z_score",
        ],
        rows,
    )];
    if cfg.mc.dump_series {
        let mut rows = Vec::new();
        for (c, s) in series.iter().enumerate() {
            for i in 0..s.magnetization.len() {
                rows.push(vec![
                    Cell::Int(c as i64),
                    Cell::Int(i as i64),
                    Cell::Real(s.magnetization[i]),
                    Cell::Real(s.phi2[i]),
                    Cell::Real(s.phi4[i]),
                ]);
            }
        }
        tables.push(Table::new(
            "mc_series",
            &["chain", "measurement", "magnetization", "phi2", "phi4"],
            rows,
        ));
    }
    Ok(Outcome {
        results: json!({
            "mc": result,
            "reference": {
                "convention": reference.gap.convention,
                "gnn": reference.gap.gnn,
                "mu2": reference.gap.mu2,
            },
            "max_abs_z": max_z,
            "all_within_3_sigma": max_z < 3.0,
        }),
        tables,
    })
}
