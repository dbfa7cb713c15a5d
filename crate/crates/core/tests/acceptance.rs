//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lattice_dse::classical::periodic_lattice_for;
use lattice_dse::classical::{
    classical_propagator_column, newton_solve_eom, second_functional_derivative,
    sn_wave_eom_convergence, SnWave,
};
use lattice_dse::dse_constant::{
    c3_equation_residual, c3_grid, c3_momentum_grid, coincident_sum, gap_solve,
};
use lattice_dse::elliptic::{
    imaginary_unit_sn_series, jacobi_sncndn, series_coeffs, sn_cubed_identity_residual,
    EllipticModulus, SeriesKind,
};
use lattice_dse::lame_bloch::{
    bloch_solve, build_bloch_system, lame_homogeneous_residual, potential_resummation_check,
    spectral_fit, zero_mode_mass, LameMode,
};
use lattice_dse::lattice::{
    action, eom_residual, inverse_dft, laplacian_apply, LatticeSpec, ScalarField,
};
use lattice_dse::linalg::loglog_slope;
use lattice_dse::mc_oracle::{metropolis_run, metropolis_run_chains, McConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lat(d: usize, l: usize, a: f64) -> LatticeSpec<f64> {
    LatticeSpec::new(d, l, a).expect("valid lattice")
}

fn random_field(lattice: &LatticeSpec<f64>, seed: u64) -> ScalarField<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ScalarField::from_fn(lattice, |_| rng.gen_range(-1.0..1.0))
}

fn rel_diff(a: &ScalarField<f64>, b: &ScalarField<f64>) -> f64 {
    a.zip_with(b, |x, y| x - y).expect("same lattice").max_abs() / b.max_abs()
}

fn elliptic_identities() -> Outcome {
    let (mut pyth, mut series, mut cubed) = (0.0f64, 0.0f64, 0.0f64);
    for m in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let modulus = EllipticModulus::new(m).map_err(|e| e.to_string())?;
        let k = modulus.quarter_period();
        let sn_series = series_coeffs(SeriesKind::Sn, &modulus, 32).map_err(|e| e.to_string())?;
        for i in 0..64 {
            let z = -2.0 * k + 4.0 * k * i as f64 / 63.0;
            let (sn, cn, dn) = jacobi_sncndn(z, m).map_err(|e| e.to_string())?;
            pyth = pyth
                .max((sn * sn + cn * cn - 1.0).abs())
                .max((dn * dn + m * sn * sn - 1.0).abs());
            series = series.max((sn_series.eval(z) - sn).abs());
            cubed = cubed.max(sn_cubed_identity_residual(z, &modulus).map_err(|e| e.to_string())?);
        }
    }
    check(
        pyth <= 1e-12,
        format!("Pythagorean identities off by {pyth:.2e}"),
    )?;
    check(series <= 1e-10, format!("sn series off by {series:.2e}"))?;
    check(cubed <= 1e-9, format!("sn^3 identity residual {cubed:.2e}"))?;
    Ok(format!(
        "identities {pyth:.1e}, series {series:.1e}, sn^3 {cubed:.1e}"
    ))
}

fn imaginary_modulus_branch() -> Outcome {
    let modulus = EllipticModulus::new(-1.0).map_err(|e| e.to_string())?;
    let k = modulus.quarter_period();
    let worst = (0..32)
        .map(|i| {
            let z = -2.0 * k + 4.0 * k * i as f64 / 31.0;
            (modulus.sn(z) - imaginary_unit_sn_series(z, 32)).abs()
        })
        .fold(0.0, f64::max);
    check(
        worst <= 1e-9,
        format!("mapped sn vs alternating series: {worst:.2e}"),
    )?;
    Ok(format!("max deviation {worst:.1e}"))
}

fn lattice_operator() -> Outcome {
    let l = lat(2, 8, 0.7);
    let mut eig = 0.0f64;
    for k in 0..l.volume() {
        let f = ScalarField::plane_wave(&l, k, 0.0);
        let ev = l.hat_p_squared_at(k);
        let lap = laplacian_apply(&f);
        eig = eig.max(lap.zip_with(&f, |a, b| a + ev * b).unwrap().max_abs());
    }
    check(
        eig <= 1e-12,
        format!("plane-wave eigenrelation off by {eig:.2e}"),
    )?;

    let (m2, lambda) = (0.4, 1.3);
    let zero = ScalarField::zeros(&l);
    let mut worst = 0.0f64;
    for seed in 0..4 {
        let f = random_field(&l, seed);
        let h = random_field(&l, 100 + seed);
        let r = eom_residual(&f, m2, lambda, &zero).unwrap();
        let analytic = l.cell_volume() * r.dot(&h);
        let eps = 1e-5;
        let fd = (action(&f.axpy(eps, &h).unwrap(), m2, lambda)
            - action(&f.axpy(-eps, &h).unwrap(), m2, lambda))
            / (2.0 * eps);
        worst = worst.max((analytic - fd).abs() / analytic.abs());
    }
    check(
        worst <= 1e-7,
        format!("action gradient relative error {worst:.2e}"),
    )?;
    Ok(format!("eigenrelation {eig:.1e}, gradient {worst:.1e}"))
}

fn classical_sn_wave() -> Outcome {
    let modulus = EllipticModulus::new(0.5).unwrap();
    let length = 2.0;
    let p = vec![modulus.period() / length];
    let (wave, m2) = SnWave::continuum_solution(p, 0.3, modulus, 1.0).map_err(|e| e.to_string())?;
    let conv = sn_wave_eom_convergence(&wave, m2, 1.0, length, &[0.1, 0.05, 0.025])
        .map_err(|e| e.to_string())?;
    let slope = loglog_slope(&conv);
    check(
        (1.8..=2.2).contains(&slope),
        format!("log-log slope {slope:.3}"),
    )?;
    Ok(format!("slope {slope:.3}"))
}

fn functional_derivatives() -> Outcome {
    let l = lat(1, 16, 1.0);
    let (m2, lambda, tol) = (0.7, 1.5, 1e-13);
    let j = ScalarField::from_fn(&l, |n| 0.8 * (2.0 * PI * n as f64 / 16.0).sin() + 0.3);
    let solve = |src: &ScalarField<f64>, guess: &ScalarField<f64>| {
        newton_solve_eom(src, guess, m2, lambda, tol).map(|s| s.field)
    };
    let background = solve(&j, &ScalarField::zeros(&l)).map_err(|e| e.to_string())?;
    let shifted = |bumps: &[(usize, f64)]| {
        let mut src = j.clone();
        for &(site, h) in bumps {
            src[site] += h;
        }
        solve(&src, &background).expect("Newton converges near the background")
    };

    let (m, ll) = (3, 9);
    let h1 = 1e-4;
    let fd_column = shifted(&[(m, h1)])
        .axpy(-1.0, &shifted(&[(m, -h1)]))
        .unwrap()
        .scaled(0.5 / h1);
    let column =
        classical_propagator_column(&background, m, m2, lambda).map_err(|e| e.to_string())?;
    let col_err = rel_diff(&column, &fd_column);
    check(
        col_err <= 1e-6,
        format!("propagator column relative error {col_err:.2e}"),
    )?;

    let h2 = 1e-3;
    let pp = shifted(&[(m, h2), (ll, h2)]);
    let pm = shifted(&[(m, h2), (ll, -h2)]);
    let mp = shifted(&[(m, -h2), (ll, h2)]);
    let mm = shifted(&[(m, -h2), (ll, -h2)]);
    let fd_second = pp
        .axpy(-1.0, &pm)
        .unwrap()
        .axpy(-1.0, &mp)
        .unwrap()
        .axpy(1.0, &mm)
        .unwrap()
        .scaled(0.25 / (h2 * h2));
    let second =
        second_functional_derivative(&background, m, ll, m2, lambda).map_err(|e| e.to_string())?;
    let second_err = rel_diff(&second, &fd_second);
    check(
        second_err <= 1e-5,
        format!("second derivative relative error {second_err:.2e}"),
    )?;
    Ok(format!("column {col_err:.1e}, second {second_err:.1e}"))
}

fn gap_equation() -> Outcome {
    let two = gap_solve(0.5, 0.0, &lat(1, 2, 1.0), 1e-12).map_err(|e| e.to_string())?;
    // Two momenta, p_hat^2 in {0, 4}, mu^2 = 1: (1 + 1/5) / 2.
    check(two.gnn == 0.6, format!("two-site Gnn = {}", two.gnn))?;
    let (mut gap_res, mut parseval) = (0.0f64, 0.0f64);
    for d in 1..=4 {
        let l = lat(d, 8, 1.0);
        let sol = gap_solve(0.2, 0.7, &l, 1e-13).map_err(|e| e.to_string())?;
        gap_res = gap_res
            .max((coincident_sum(&l, sol.mu2) - sol.gnn).abs())
            .max(sol.fixed_point_residual);
        let spectrum: Vec<Complex<f64>> = sol
            .propagator_grid()
            .into_iter()
            .map(|g| Complex::new(g, 0.0))
            .collect();
        parseval = parseval.max((inverse_dft(&l, &spectrum)[0].re - sol.gnn).abs());
    }
    check(gap_res <= 1e-12, format!("gap residual {gap_res:.2e}"))?;
    check(parseval <= 1e-12, format!("Parseval defect {parseval:.2e}"))?;
    Ok(format!(
        "Gnn(two-site) = 0.6, gap residual {gap_res:.1e}, Parseval {parseval:.1e}"
    ))
}

fn cumulant_structure() -> Outcome {
    let l = lat(2, 8, 1.0);
    let sol = gap_solve(0.3, 0.9, &l, 1e-13).map_err(|e| e.to_string())?;
    let v = l.volume();
    let phi = 0.8;
    let mut sym = 0.0f64;
    for p in 0..v {
        for q in 0..v {
            let r = l.momentum_neg(l.momentum_add(p, q));
            let base = c3_momentum_grid(p, q, phi, &sol);
            for (x, y) in [(q, p), (r, q), (q, r), (p, r), (r, p)] {
                sym = sym.max((c3_momentum_grid(x, y, phi, &sol) - base).abs());
            }
        }
    }
    check(sym <= 1e-12, format!("permutation asymmetry {sym:.2e}"))?;
    let zero_max = c3_grid(0.0, &sol)
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    check(
        zero_max == 0.0,
        format!("C3 at phi = 0 has magnitude {zero_max:.2e}"),
    )?;
    let table = c3_grid(phi, &sol);
    let res = c3_equation_residual(&table, phi, &sol)
        .map_err(|e| e.to_string())?
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()));
    check(res <= 1e-12, format!("C3 equation residual {res:.2e}"))?;
    Ok(format!("symmetry {sym:.1e}, C3 equation {res:.1e}"))
}

fn lame_bloch() -> Outcome {
    let modulus = EllipticModulus::new(0.5).unwrap();
    let sys = build_bloch_system(1.0, 1.0, vec![0.3], modulus, 1.0, 0.0, 40)
        .map_err(|e| e.to_string())?;
    let resum = (-20..=20)
        .map(|ell| potential_resummation_check(&sys, ell, 0.25).gap)
        .fold(0.0, f64::max);
    check(resum <= 1e-10, format!("resummation gap {resum:.2e}"))?;

    let l = lat(1, 32, 0.25);
    let mut band = 0.0f64;
    for p in [0.0, 0.7, 2.1] {
        let g = bloch_solve(&[p], &sys, &l).map_err(|e| e.to_string())?.g0();
        let wide = bloch_solve(&[p], &sys.clone().with_band(2 * sys.band), &l)
            .map_err(|e| e.to_string())?
            .g0();
        band = band.max((g - wide).abs());
    }
    check(
        band < 1e-8,
        format!("band doubling changes G0 by {band:.2e}"),
    )?;

    let (w, masses) = ([0.5, 0.3, 0.2], [0.6, 1.4, 3.0]);
    let samples: Vec<(f64, f64)> = (0..40)
        .map(|i| {
            let p2 = 4.0 * i as f64 / 40.0;
            (p2, w.iter().zip(&masses).map(|(b, m)| b / (p2 + m)).sum())
        })
        .collect();
    let fit = spectral_fit(&samples, &masses).map_err(|e| e.to_string())?;
    let weight_err = fit
        .weights
        .iter()
        .zip(&w)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let norm = (fit.weights.iter().sum::<f64>() - 1.0).abs();
    check(
        weight_err <= 1e-8,
        format!("KL weights off by {weight_err:.2e}"),
    )?;
    check(norm <= 1e-10, format!("sum of weights off by {norm:.2e}"))?;
    Ok(format!(
        "resummation {resum:.1e}, band {band:.1e}, weights {weight_err:.1e}"
    ))
}

fn appendix_modes() -> Outcome {
    let modulus = EllipticModulus::new(0.5).unwrap();
    let length = 2.0;
    let p = vec![modulus.period() / length];
    let lambda = 1.0;
    let (wave, _) =
        SnWave::continuum_solution(p.clone(), 0.3, modulus, lambda).map_err(|e| e.to_string())?;
    let mut ratios = Vec::new();
    for mode in [LameMode::CnDn, LameMode::SnDn] {
        let mass = zero_mode_mass(mode, &p, &modulus);
        let norms: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&a| {
                let l = periodic_lattice_for(&p, modulus.period(), length, a).unwrap();
                lame_homogeneous_residual(mode, wave.b, &p, 0.3, &modulus, mass, lambda, &l)
                    .unwrap()
                    .max_abs()
            })
            .collect();
        for pair in norms.windows(2) {
            let ratio = pair[0] / pair[1];
            check(
                (3.3..=4.7).contains(&ratio),
                format!("{mode:?} halving ratio {ratio:.3}"),
            )?;
            ratios.push(ratio);
        }
    }
    Ok(format!("halving ratios {ratios:.3?}"))
}

fn single_site_moment(a: f64, m2: f64, lambda: f64, k: i32) -> f64 {
    let (n, x0) = (40_001, 12.0);
    let h = 2.0 * x0 / (n - 1) as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        let x = -x0 + h * i as f64;
        let w = (-a * (0.5 * m2 * x * x + lambda * x.powi(4) / 24.0)).exp();
        num += x.powi(k) * w;
        den += w;
    }
    num / den
}

fn mc_validation() -> Outcome {
    let l = lat(1, 8, 1.0);
    let cfg = McConfig::new(l.clone(), 1.0, 0.0, 100_000, 5_000, 2024);
    let r = metropolis_run(&cfg).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (k, est) in r.propagator.iter().enumerate() {
        let exact = 1.0 / (l.hat_p_squared_at(k) + 1.0);
        worst = worst.max(est.pull(exact).abs());
        check(
            est.within(exact, 3.0),
            format!(
                "momentum {k}: {:.5} +- {:.5} vs {exact:.5}",
                est.value, est.error
            ),
        )?;
    }
    let site = lat(1, 1, 1.0);
    let (m2, lambda) = (0.6, 2.0);
    let single = metropolis_run(&McConfig::new(site, m2, lambda, 100_000, 5_000, 7))
        .map_err(|e| e.to_string())?;
    for (est, k) in [(single.phi2, 2), (single.phi4, 4)] {
        let exact = single_site_moment(1.0, m2, lambda, k);
        worst = worst.max(est.pull(exact).abs());
        check(
            est.within(exact, 3.0),
            format!(
                "<phi^{k}> {:.5} +- {:.5} vs {exact:.5}",
                est.value, est.error
            ),
        )?;
    }
    Ok(format!("largest pull {worst:.2} sigma"))
}

fn binder_scan(
    d: usize,
    m2: f64,
    lambda: f64,
    sweeps: usize,
) -> Result<Vec<(usize, f64, f64)>, String> {
    [4usize, 6, 8]
        .iter()
        .map(|&l| {
            let mut cfg = McConfig::new(lat(d, l, 1.0), m2, lambda, sweeps, sweeps / 10, 11);
            cfg.measure_propagator = false;
            let (r, _) = metropolis_run_chains(&cfg, 1).map_err(|e| e.to_string())?;
            Ok((l, r.binder.value, r.binder.error))
        })
        .collect()
}

fn triviality() -> Outcome {
    let lambda = 6.0;
    let four = binder_scan(4, -0.35, lambda, 750_000)?;
    let decreasing = four.windows(2).all(|w| w[1].1 < w[0].1);
    let compatible = four
        .windows(2)
        .all(|w| w[1].1 - w[0].1 <= 3.0 * w[0].2.hypot(w[1].2));
    let two = binder_scan(2, -1.5, lambda, 200_000)?;
    let two_decreasing = two.windows(2).all(|w| w[1].1 < w[0].1);
    let show = |s: &[(usize, f64, f64)]| {
        s.iter()
            .map(|(l, u, e)| format!("U({l})={u:.3}+-{e:.3}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let summary = format!("d=4: {}; d=2: {}", show(&four), show(&two));
    check(
        decreasing && compatible,
        format!("d=4 not decreasing: {summary}"),
    )?;
    check(!two_decreasing, format!("d=2 also decreasing: {summary}"))?;
    Ok(summary)
}

fn main() {
    let criteria: [Criterion; 11] = [
        (
            "elliptic identities",
            elliptic_identities,
            Duration::from_secs(1),
        ),
        (
            "k^2 = -1 branch",
            imaginary_modulus_branch,
            Duration::from_secs(1),
        ),
        ("lattice operator", lattice_operator, Duration::from_secs(5)),
        (
            "classical sn wave",
            classical_sn_wave,
            Duration::from_secs(10),
        ),
        (
            "functional derivatives",
            functional_derivatives,
            Duration::from_secs(30),
        ),
        ("gap equation", gap_equation, Duration::from_secs(60)),
        (
            "cumulant structure",
            cumulant_structure,
            Duration::from_secs(30),
        ),
        ("Lame/Bloch", lame_bloch, Duration::from_secs(60)),
        ("appendix modes", appendix_modes, Duration::from_secs(30)),
        ("MC validation", mc_validation, Duration::from_secs(300)),
        (
            "triviality diagnostic",
            triviality,
            Duration::from_secs(1800),
        ),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > *budget => {
                Err(format!("{detail}; took {elapsed:.2?} > {budget:?}"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name} ({elapsed:.2?}): {detail}",
                i + 1
            ),
            Err(detail) => {
                failures += 1;
                println!(
                    "criterion {:>2} FAIL  {name} ({elapsed:.2?}): {detail}",
                    i + 1
                );
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
