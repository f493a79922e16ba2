//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails. Runs single-threaded budgets; see `cargo test --test acceptance`.

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use gibbs_core::activity::ActivityFunction;
use gibbs_core::counting::{
    approx_log_partition, logz_sweep, series_log_partition_oracle, tonks_log_partition, tonks_ring_log_partition,
    CountingOptions, SweepOptions,
};
use gibbs_core::estimators::{estimate_density, DensityRequest};
use gibbs_core::geometry::{ball_volume, Point, Region};
use gibbs_core::potential::PairPotential;
use gibbs_core::rng::Streams;
use gibbs_core::sampler::GibbsModel;
use gibbs_core::ssm::{decay_profile, recursion_residual, RecursionOptions};
use gibbs_core::thermo::{
    estimate_pressure, pressure_via_interpolation, surface_pressure_harness, tonks_pressure_oracle, torus_pressure_gap,
    ThermoOptions,
};
use gibbs_core::{connective_report, Result};
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict {
        pass,
        detail: detail.into(),
    })
}

fn box_model(lo: &[f64], hi: &[f64], potential: PairPotential<f64>, lambda: f64) -> Result<GibbsModel<f64>> {
    let g = Region::new_box(Point::new(lo), Point::new(hi))?;
    GibbsModel::new(g.clone(), Arc::new(potential), ActivityFunction::constant_on(g, lambda)?)
}

fn ideal_gas_exactness() -> Result<Verdict> {
    let model = box_model(&[0.0, 0.0], &[2.0, 2.0], PairPotential::ideal(), 1.0)?;
    let opts = CountingOptions {
        sample_constant: 8.0,
        ..Default::default()
    };
    let mut hits = 0;
    let mut values = Vec::new();
    for seed in 1..=4 {
        let rep = approx_log_partition(&model, 0.05, &opts, &Streams::new(seed))?;
        if (rep.log_z.value - 4.0).abs() <= 0.05 {
            hits += 1;
        }
        values.push(format!("{:.4}", rep.log_z.value));
    }
    verdict(hits >= 3, format!("log Z = [{}], {hits}/4 within 0.05 of 4", values.join(", ")))
}

fn tonks_counting() -> Result<Verdict> {
    let exact = tonks_log_partition(4.0, 0.5, 1.0);
    let model = box_model(&[0.0], &[4.0], PairPotential::hard_sphere(0.5)?, 1.0)?;
    let counted = approx_log_partition(
        &model,
        0.05,
        &CountingOptions {
            sample_constant: 16.0,
            ..Default::default()
        },
        &Streams::new(2),
    )?;
    let swept = logz_sweep(&model, &SweepOptions::default(), &Streams::new(3))?;
    let short = box_model(&[0.0], &[2.0], PairPotential::hard_sphere(0.5)?, 1.0)?;
    let series = series_log_partition_oracle(&short, 1e-4)?;
    let oracle_gap = (series.log_z - tonks_log_partition(2.0, 0.5, 1.0)).abs();
    let pass = (counted.log_z.value - exact).abs() <= 0.05
        && (swept.log_z.value - exact).abs() <= 0.05
        && oracle_gap < 1e-3;
    verdict(
        pass,
        format!(
            "exact {exact:.5}, counter {:.5} ± {:.4}, sweep {:.5} ± {:.4}; |series - Tonks| on [0,2] = {oracle_gap:.1e}",
            counted.log_z.value, counted.log_z.std_error, swept.log_z.value, swept.log_z.std_error
        ),
    )
}

fn pressure_identity() -> Result<Verdict> {
    let exact = tonks_pressure_oracle(1.0, 0.5);
    let finite = tonks_log_partition(64.0, 0.5, 1.0) / 64.0;
    let rods = Arc::new(PairPotential::hard_sphere(0.5)?);
    let opts = ThermoOptions {
        epsilon: 0.02,
        ..Default::default()
    };
    let est = estimate_pressure(&rods, 1, 1.0, &opts, &Streams::new(4))?.estimate;
    let tol = 0.02f64.max(3.0 * est.std_error);
    let pass = (est.value - exact).abs() <= tol && (exact - finite).abs() < 1e-2;
    verdict(
        pass,
        format!(
            "p̂ = {:.5} ± {:.5}, oracle {exact:.5}, log Z(64)/64 = {finite:.5}",
            est.value, est.std_error
        ),
    )
}

fn cross_estimator() -> Result<Verdict> {
    let strauss = Arc::new(PairPotential::strauss(1.0, 1.0)?);
    let opts = ThermoOptions {
        epsilon: 0.03,
        window: Some(4.0),
        ..Default::default()
    };
    let single = estimate_pressure(&strauss, 2, 0.3, &opts, &Streams::new(5))?.estimate;
    let interp = pressure_via_interpolation(&strauss, 2, 0.3, &opts, &Streams::new(6))?.estimate;
    let z = single.z_distance(&interp);
    verdict(
        z <= 3.0,
        format!(
            "single {:.5} ± {:.5}, interpolation {:.5} ± {:.5}, z = {z:.2}",
            single.value, single.std_error, interp.value, interp.std_error
        ),
    )
}

fn density_sandwich() -> Result<Verdict> {
    let mut rng = Streams::new(7).chain(0);
    let mut worst = f64::INFINITY;
    let mut failures = Vec::new();
    for i in 0..20 {
        let dim = rng.random_range(1..=3usize);
        let r = rng.random_range(0.3..1.0);
        let lambda = rng.random_range(0.1..1.5);
        let potential = if rng.random_bool(0.5) {
            PairPotential::hard_sphere(r)?
        } else {
            PairPotential::strauss(r, rng.random_range(0.2..3.0))?
        };
        let side = rng.random_range(1.5..3.0);
        let model = box_model(&vec![0.0; dim], &vec![side; dim], potential, lambda)?;
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(0.0..side)).collect();
        let req = DensityRequest::new(model, Point::new(&v), 0.1, 10.0, None)?.with_repetitions(400);
        let est = estimate_density(&req, &Streams::new(7).fork(i))?;
        let lower = lambda * (-lambda * ball_volume(dim, r)).exp() - 3.0 * est.std_error;
        let upper = lambda + 3.0 * est.std_error;
        worst = worst.min((est.value - lower).min(upper - est.value));
        if !(lower <= est.value && est.value <= upper) {
            failures.push(i);
        }
    }
    verdict(
        failures.is_empty(),
        format!("20 models, failures {failures:?}, smallest margin {worst:.4}"),
    )
}

fn torus_convergence() -> Result<Verdict> {
    let p = tonks_pressure_oracle(1.0, 0.5);
    let gap = |n: f64| tonks_ring_log_partition(n, 0.5, 1.0) - n * p;
    let ladder: Vec<f64> = [2.0, 3.0, 4.0, 5.0].iter().map(|&n| gap(n).abs()).collect();
    let decreasing = ladder.windows(2).all(|w| w[1] < w[0]);
    let at8 = gap(8.0).abs();
    let rods = Arc::new(PairPotential::hard_sphere(0.5)?);
    let opts = ThermoOptions {
        epsilon: 0.05,
        ..Default::default()
    };
    let counting = CountingOptions {
        sample_constant: 8.0,
        ..Default::default()
    };
    let mut consistent = true;
    let mut mc = Vec::new();
    for n in [4.0, 8.0] {
        let g = torus_pressure_gap(&rods, 1, 1.0, n, &opts, &counting, &Streams::new(8))?.gap;
        consistent &= (g.value - gap(n)).abs() <= 3.0 * g.std_error;
        mc.push(format!("n={n}: {:.4} ± {:.4}", g.value, g.std_error));
    }
    verdict(
        decreasing && at8 < 1e-3 && consistent,
        format!(
            "|exact gap| n=2..5 = {:?}, n=8: {at8:.1e}; MC {}",
            ladder.iter().map(|g| format!("{g:.1e}")).collect::<Vec<_>>(),
            mc.join(", ")
        ),
    )
}

fn connective_constant() -> Result<Verdict> {
    let disks = PairPotential::hard_sphere(1.0)?;
    let rep = connective_report(&disks, 2, 8, 1_000_000, &Streams::new(9))?;
    let v1 = &rep.v[0];
    let (v2, v4) = (&rep.v[1], &rep.v[3]);
    let sigma = v4.std_error.hypot(2.0 * v2.value * v2.std_error);
    let exact_v1 = v1.value == rep.c_phi && v1.std_error == 0.0;
    let submult = v4.value <= v2.value * v2.value + 3.0 * sigma;
    let ratio8 = rep.roots[7] / rep.c_phi;
    verdict(
        exact_v1 && submult && ratio8 <= 0.90,
        format!(
            "V_1 = {:.6} (C_φ = {:.6}, σ = {}), V_4 = {:.3} vs V_2² = {:.3}, V_2^(1/2)/C_φ = {:.3}, V_8^(1/8)/C_φ = {ratio8:.3}",
            v1.value,
            rep.c_phi,
            v1.std_error,
            v4.value,
            v2.value * v2.value,
            rep.roots[1] / rep.c_phi
        ),
    )
}

fn ssm_decay() -> Result<Verdict> {
    let disks = PairPotential::hard_sphere(1.0)?;
    let lambda = 0.5 * E / PI;
    let model = box_model(&[-5.0, -5.0], &[5.0, 5.0], disks.clone(), lambda)?;
    let req = DensityRequest::new(model, Point::zeros(2), 0.05, 10.0, Some(1.0))?.with_repetitions(2000);
    let connective = connective_report(&disks, 2, 4, 100_000, &Streams::new(10))?;
    let profile = decay_profile(&req, &[1.0, 2.0, 3.0, 4.0], Some(&connective), &Streams::new(11))?;
    let gaps: Vec<String> = profile.gaps.iter().map(|g| format!("{:.4}±{:.4}", g.value, g.std_error)).collect();
    let within = profile.all_within_bound();
    match &profile.fit {
        Some(fit) => verdict(
            fit.beta_ci.0 > 0.0 && within,
            format!(
                "gaps [{}], β̂ = {:.2} (95% CI {:.2}..{:.2}), within bound: {within}",
                gaps.join(", "),
                fit.beta,
                fit.beta_ci.0,
                fit.beta_ci.1
            ),
        ),
        None => verdict(false, format!("gaps [{}], no fit: {:?}", gaps.join(", "), profile.note)),
    }
}

fn recursion_check() -> Result<Verdict> {
    let model = box_model(&[0.0], &[2.0], PairPotential::hard_sphere(0.5)?, 0.8)?;
    let check = recursion_residual(&model, &Point::new(&[1.0]), &RecursionOptions::default())?;
    verdict(
        check.residual < 1e-3,
        format!(
            "ρ(v) = {:.6}, recursion {:.6}, residual {:.1e}",
            check.lhs, check.rhs, check.residual
        ),
    )
}

fn surface_pressure() -> Result<Verdict> {
    let rods = Arc::new(PairPotential::hard_sphere(0.5)?);
    let opts = ThermoOptions {
        epsilon: 0.05,
        ..Default::default()
    };
    let h = surface_pressure_harness(&rods, 1, 1.0, &opts, &Streams::new(12))?;
    let sp = &h.interpolation.estimate;
    let exact = h.exact.expect("hard rods have an exact surface pressure");
    let tol = 0.02f64.max(3.0 * sp.std_error);
    verdict(
        (sp.value - exact).abs() <= tol,
        format!(
            "sp̂ = {:.5} ± {:.5}, exact {exact:.5}; face integral {:.4} ± {:.4} (exact {:.4}, claimed {}, leading order {:.4})",
            sp.value,
            sp.std_error,
            h.face_integral.value,
            h.face_integral.std_error,
            h.exact_face_integral.unwrap_or(f64::NAN),
            h.face_integral_claimed,
            h.face_integral_leading_order
        ),
    )
}

fn determinism() -> Result<Verdict> {
    let strauss = PairPotential::strauss(1.0, 0.7)?;
    let model = box_model(&[0.0, 0.0], &[3.0, 3.0], strauss, 0.6)?;
    let run = |threads: usize| -> Result<Vec<(f64, f64, u64)>> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let req = DensityRequest::new(model.clone(), Point::new(&[1.5, 1.5]), 0.1, 10.0, None)?;
            let rho = estimate_density(&req, &Streams::new(13))?;
            let opts = CountingOptions {
                sample_constant: 1.0,
                ..Default::default()
            };
            let z = approx_log_partition(&model, 0.2, &opts, &Streams::new(13))?.log_z;
            Ok(vec![
                (rho.value, rho.std_error, rho.n_samples),
                (z.value, z.std_error, z.n_samples),
            ])
        })
    };
    let reference = run(1)?;
    let same = [2, 4].into_iter().map(run).collect::<Result<Vec<_>>>()?.iter().all(|r| *r == reference);
    verdict(same, format!("density and log Z bit-identical across 1, 2 and 4 threads: {same}"))
}

type Criterion = (&'static str, f64, fn() -> Result<Verdict>);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("ideal-gas exactness", 60.0, ideal_gas_exactness),
        ("Tonks counting", 300.0, tonks_counting),
        ("pressure identity", 300.0, pressure_identity),
        ("cross-estimator consistency", 600.0, cross_estimator),
        ("density sandwich", f64::INFINITY, density_sandwich),
        ("torus convergence", 600.0, torus_convergence),
        ("connective constant", 600.0, connective_constant),
        ("SSM decay", 1200.0, ssm_decay),
        ("recursion check", 120.0, recursion_check),
        ("surface-pressure harness", 900.0, surface_pressure),
        ("determinism", f64::INFINITY, determinism),
    ];
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let id = (i + 1).to_string();
        if filter.as_ref().is_some_and(|f| *f != id && !name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match outcome {
            Ok(v) => (v.pass && secs < *budget, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let timing = if budget.is_finite() {
            format!("{secs:.1}s, budget {budget:.0}s")
        } else {
            format!("{secs:.1}s")
        };
        println!("{} {id:>2} {name}: {detail} ({timing})", if pass { "PASS" } else { "FAIL" });
        if !pass {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
