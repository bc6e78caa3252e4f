//! Mid-scale stochastic property checks that sit between the unit tests and
//! the acceptance criteria: trend and stability diagnostics of the
//! integrators and the jump engine.

use hoproc::geom;
use hoproc::jump::{simulate_skew_product, SkewConfig, SkewKind};
use hoproc::limits;
use hoproc::rng::{derive_stream, STREAM_NOISE};
use hoproc::roots::{Family, RootSystem};
use hoproc::sde::{simulate_radial, simulate_radial_with_increments, RadialKind, SimConfig};
use hoproc::stats;
use rand::Rng;
use rand_distr::StandardNormal;

fn a1() -> RootSystem {
    RootSystem::standard(Family::A, 1, &[1.0]).unwrap()
}

fn a2() -> RootSystem {
    RootSystem::standard(Family::A, 2, &[1.0]).unwrap()
}

#[test]
fn lln_error_shrinks_as_horizon_doubles() {
    let sys = a2();
    let dt = 1e-3;
    let mut errors = Vec::new();
    for (i, horizon) in [50.0, 100.0, 200.0].into_iter().enumerate() {
        let mut config = SimConfig::new(
            RadialKind::HeckmanOpdam,
            vec![0.0, 0.0],
            dt,
            horizon,
            400,
            90 + i as u64,
        );
        config.wall_floor = Some(dt.sqrt());
        let batch = simulate_radial(&sys, &config).unwrap();
        let est = limits::lln_estimate(&batch).unwrap();
        let gap: Vec<f64> = est.mean.iter().zip(sys.rho()).map(|(m, r)| m - r).collect();
        errors.push(geom::norm(&gap));
    }
    assert!(
        errors[0] > errors[1] && errors[1] > errors[2],
        "time-average error should shrink with the horizon: {errors:?}"
    );
}

#[test]
fn coth_functional_is_stable_under_step_halving() {
    let sys = a1();
    let start = vec![0.3 * 2.0f64.sqrt() / 2.0];
    let mut means = Vec::new();
    for dt in [1e-3, 5e-4] {
        let config = SimConfig::new(RadialKind::HeckmanOpdam, start.clone(), dt, 1.0, 800, 41);
        let batch = simulate_radial(&sys, &config).unwrap();
        let vals: Vec<f64> = batch.paths.iter().map(|p| p.accum.coth_int[0]).collect();
        means.push(stats::mean_se(&vals).0);
    }
    let ratio = means[0] / means[1];
    assert!(
        (0.8..=1.2).contains(&ratio),
        "coth functional unstable under halving: {means:?}"
    );
}

#[test]
fn wall_contact_fraction_decreases_with_dt() {
    let sys = a1();
    let start = vec![0.2 * 2.0f64.sqrt() / 2.0];
    let mut fractions = Vec::new();
    for dt in [1e-2, 1e-3, 1e-4] {
        let config = SimConfig::new(RadialKind::HeckmanOpdam, start.clone(), dt, 1.0, 200, 43);
        let batch = simulate_radial(&sys, &config).unwrap();
        let frac: f64 = batch
            .paths
            .iter()
            .map(|p| p.accum.wall_steps as f64 / p.accum.steps as f64)
            .sum::<f64>()
            / batch.paths.len() as f64;
        fractions.push(frac);
    }
    assert!(
        fractions[0] > fractions[1] && fractions[1] >= fractions[2],
        "wall-contact fraction should fall as dt falls: {fractions:?}"
    );
}

#[test]
fn strong_self_convergence_rate_is_about_half() {
    // wall-dominated benchmark: start at the origin, where the step error is
    // governed by the fold and the floored drift rather than the smooth flow
    let sys = a1();
    let horizon = 0.25;
    let paths = 400;
    let refine = 16usize;
    let mut log_dt = Vec::new();
    let mut log_err = Vec::new();
    for level in 0..3 {
        let dt = 1.0 / (64.0 * 4.0f64.powi(level));
        let fine_dt = dt / refine as f64;
        let steps = (horizon / dt).round() as usize;
        let mut errs = Vec::with_capacity(paths);
        for path in 0..paths {
            let mut rng = derive_stream(4242 + level as u64, STREAM_NOISE, path as u64);
            let fine: Vec<f64> = (0..steps * refine)
                .map(|_| fine_dt.sqrt() * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let coarse: Vec<f64> = fine.chunks(refine).map(|c| c.iter().sum()).collect();
            let mut config =
                SimConfig::new(RadialKind::HeckmanOpdam, vec![0.0], fine_dt, horizon, 1, 0);
            config.record_stride = Some(steps * refine);
            let reference = simulate_radial_with_increments(&sys, &config, &fine).unwrap();
            let mut config = SimConfig::new(RadialKind::HeckmanOpdam, vec![0.0], dt, horizon, 1, 0);
            config.record_stride = Some(steps);
            let coarse_path = simulate_radial_with_increments(&sys, &config, &coarse).unwrap();
            errs.push(geom::distance(reference.terminal(), coarse_path.terminal()));
        }
        let mean = errs.iter().sum::<f64>() / errs.len() as f64;
        log_dt.push(dt.ln());
        log_err.push(mean.ln());
    }
    // least-squares slope of log error against log dt
    let n = log_dt.len() as f64;
    let xbar = log_dt.iter().sum::<f64>() / n;
    let ybar = log_err.iter().sum::<f64>() / n;
    let slope = log_dt
        .iter()
        .zip(&log_err)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum::<f64>()
        / log_dt.iter().map(|x| (x - xbar) * (x - xbar)).sum::<f64>();
    assert!(
        (0.4..=0.6).contains(&slope),
        "self-convergence slope {slope} outside [0.4, 0.6]"
    );
}

#[test]
fn events_become_rare_after_escape() {
    let sys = a2();
    let dt = 1e-3;
    let mut sim = SimConfig::new(RadialKind::HeckmanOpdam, vec![0.0, 0.0], dt, 40.0, 400, 47);
    sim.wall_floor = Some(dt.sqrt());
    let config = SkewConfig::new(SkewKind::HeckmanOpdam, sim);
    let batch = simulate_skew_product(&sys, &config).unwrap();
    let after_20 = batch
        .paths
        .iter()
        .filter(|p| p.last_event_time().is_some_and(|t| t > 20.0))
        .count();
    let fraction = after_20 as f64 / batch.paths.len() as f64;
    assert!(fraction < 0.05, "late-event fraction {fraction}");
}

#[test]
fn full_process_clt_covariance_and_ray_clustering() {
    let sys = a2();
    let dt = 1e-3;

    // covariance of the chamber-centered scaling at horizon 200
    let mut sim = SimConfig::new(
        RadialKind::HeckmanOpdam,
        vec![0.0, 0.0],
        dt,
        200.0,
        1000,
        53,
    );
    sim.wall_floor = Some(dt.sqrt());
    let config = SkewConfig::new(SkewKind::HeckmanOpdam, sim);
    let batch = simulate_skew_product(&sys, &config).unwrap();
    let sample = limits::nonradial_clt_sample(&sys, &batch).unwrap();
    let mc = stats::mean_cov(&sample.values).unwrap();
    let mut dev = mc.cov.clone();
    dev[0] -= 1.0;
    dev[3] -= 1.0;
    let op = stats::sym_op_norm(&dev, 2);
    assert!(op < 0.10, "covariance deviation {op}");

    // linear-scale clustering at the rotated rho rays, at a longer horizon
    let mut sim = SimConfig::new(RadialKind::HeckmanOpdam, vec![0.0, 0.0], dt, 500.0, 400, 59);
    sim.wall_floor = Some(dt.sqrt());
    let config = SkewConfig::new(SkewKind::HeckmanOpdam, sim);
    let batch = simulate_skew_product(&sys, &config).unwrap();
    let t = batch.horizon();
    let mut mean_dist = 0.0;
    for p in &batch.paths {
        let scaled: Vec<f64> = p.terminal_full().iter().map(|x| x / t).collect();
        let nearest = sys
            .weyl()
            .elements()
            .iter()
            .map(|w| geom::distance(&scaled, &w.apply(sys.rho())))
            .fold(f64::INFINITY, f64::min);
        mean_dist += nearest;
    }
    mean_dist /= batch.paths.len() as f64;
    assert!(
        mean_dist < 0.05 * geom::norm(sys.rho()),
        "mean distance to the nearest rho ray: {mean_dist}"
    );
}

#[test]
fn scaling_comparison_null_is_calibrated() {
    // two independent time-1 samples of the same rational process: the
    // permutation p-value should rarely dip below 0.05
    let sys = a1().rescale_to_dunkl();
    let dt = 1e-3;
    let mut low = 0;
    for rep in 0..20u64 {
        let mut samples = Vec::new();
        for side in 0..2u64 {
            let mut sim = SimConfig::new(
                RadialKind::Dunkl,
                vec![0.0],
                dt,
                1.0,
                150,
                1000 * rep + side,
            );
            sim.wall_floor = Some(dt.sqrt());
            let cfg = SkewConfig::new(SkewKind::Dunkl, sim);
            let batch = simulate_skew_product(&sys, &cfg).unwrap();
            let vals: Vec<Vec<f64>> = batch
                .paths
                .iter()
                .map(|p| p.terminal_full().to_vec())
                .collect();
            samples.push(vals);
        }
        let res = stats::energy_distance_perm(&samples[0], &samples[1], 300, 555 + rep).unwrap();
        if res.p_value <= 0.05 {
            low += 1;
        }
    }
    assert!(low <= 2, "null rejected {low}/20 times");
}

#[test]
fn clt_noise_symmetry_via_antithetic_pairs() {
    let sys = a2();
    let horizon = 50.0;
    let dt: f64 = 1e-3;
    let steps = (horizon / dt) as usize;
    let pairs = 100;
    let mut odd_parts = Vec::new();
    let mut even_norms = Vec::new();
    for i in 0..pairs {
        let mut rng = derive_stream(77, STREAM_NOISE, i);
        let incs: Vec<f64> = (0..steps * 2)
            .map(|_| dt.sqrt() * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let neg: Vec<f64> = incs.iter().map(|x| -x).collect();
        let mut config =
            SimConfig::new(RadialKind::HeckmanOpdam, vec![0.0, 0.0], dt, horizon, 1, 0);
        config.wall_floor = Some(dt.sqrt());
        config.record_stride = Some(steps);
        let plus = simulate_radial_with_increments(&sys, &config, &incs).unwrap();
        let minus = simulate_radial_with_increments(&sys, &config, &neg).unwrap();
        let v = |p: &hoproc::sde::RadialPath| -> Vec<f64> {
            p.terminal()
                .iter()
                .zip(sys.rho())
                .map(|(x, r)| (x - r * horizon) / horizon.sqrt())
                .collect()
        };
        let (vp, vm) = (v(&plus), v(&minus));
        odd_parts.push(vec![(vp[0] - vm[0]) / 2.0, (vp[1] - vm[1]) / 2.0]);
        even_norms.push(geom::norm(&[(vp[0] + vm[0]) / 2.0, (vp[1] + vm[1]) / 2.0]));
    }
    // the odd part is symmetric, so its mean is centered at 0
    let mc = stats::mean_cov(&odd_parts).unwrap();
    for i in 0..2 {
        assert!(
            mc.mean[i].abs() <= 3.0 * mc.se_mean[i],
            "odd-part coordinate {i}: mean {} se {}",
            mc.mean[i],
            mc.se_mean[i]
        );
    }
    // the even part carries the finite-horizon drift contamination, which at
    // this horizon sits near |E int (coth - 1)| / sqrt(T) ~ 0.32
    let even_mean = even_norms.iter().sum::<f64>() / even_norms.len() as f64;
    assert!(even_mean < 0.5, "even-part norm {even_mean}");
}
