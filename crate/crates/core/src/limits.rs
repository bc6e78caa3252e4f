//! Normalizations and samplers for the limit-theorem checks: law of large
//! numbers and central limit scalings of the radial and full processes,
//! terminal-chamber statistics, the rational-process scaling limit, the
//! change-of-measure identity between the two radial laws, and the late-time
//! law of the relativized process in the complex case.

use rand::Rng;
use thiserror::Error;

use crate::geom;
use crate::jump::{JumpError, SkewBatch};
use crate::rng::{derive_stream, splitmix64, STREAM_AUX};
use crate::roots::RootSystem;
use crate::sde::{
    girsanov_integral, simulate_radial, RadialBatch, RadialKind, SimConfig, SimError,
};
use crate::stats::{self, StatError, TestResult};

#[derive(Debug, Error)]
pub enum LimitError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Jump(#[from] JumpError),
    #[error(transparent)]
    Stat(#[from] StatError),
    #[error("need at least {needed} paths, got {got}")]
    TooFewPaths { needed: usize, got: usize },
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("the second system is not the rescaling of the first")]
    MismatchedSystems,
}

/// A scaled terminal sample with its provenance tag.
#[derive(Debug, Clone)]
pub struct NormalizedSample {
    /// The scaling horizon `T` the normalization used.
    pub t_scale: f64,
    pub values: Vec<Vec<f64>>,
    /// Process kind and a hash of the generating configuration.
    pub provenance: String,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn provenance<C: serde::Serialize>(kind: &str, config: &C) -> String {
    let json = serde_json::to_string(config).unwrap_or_default();
    format!("{kind}:{:016x}", fnv1a(json.as_bytes()))
}

/// Time-average estimate `mean(X_T / T)` with per-coordinate standard errors.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LlnEstimate {
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
    pub horizon: f64,
    pub paths: usize,
}

pub fn lln_estimate(batch: &RadialBatch) -> Result<LlnEstimate, LimitError> {
    if batch.paths.len() < 10 {
        return Err(LimitError::TooFewPaths {
            needed: 10,
            got: batch.paths.len(),
        });
    }
    let horizon = batch.horizon();
    let scaled: Vec<Vec<f64>> = batch
        .paths
        .iter()
        .map(|p| p.terminal().iter().map(|x| x / horizon).collect())
        .collect();
    let mc = stats::mean_cov(&scaled)?;
    Ok(LlnEstimate {
        mean: mc.mean,
        se: mc.se_mean,
        horizon,
        paths: batch.paths.len(),
    })
}

/// Central-limit normalization `(X_T - rho T) / sqrt(T)` of radial terminals.
pub fn clt_sample(sys: &RootSystem, batch: &RadialBatch) -> Result<NormalizedSample, LimitError> {
    if batch.paths.len() < 10 {
        return Err(LimitError::TooFewPaths {
            needed: 10,
            got: batch.paths.len(),
        });
    }
    let t = batch.horizon();
    let sqrt_t = t.sqrt();
    let values = batch
        .paths
        .iter()
        .map(|p| {
            p.terminal()
                .iter()
                .zip(sys.rho())
                .map(|(x, r)| (x - r * t) / sqrt_t)
                .collect()
        })
        .collect();
    Ok(NormalizedSample {
        t_scale: t,
        values,
        provenance: provenance("radial-clt", &(t, batch.paths.len())),
    })
}

/// Per-positive-root signs `eps^a` determined by a chamber element: `eps^a a`
/// lies in `w R+`, equivalently `w^{-1}(eps^a a)` is positive. They satisfy
/// `w rho = (1/2) sum_a k_a eps^a a`.
pub fn chamber_sign_vector(sys: &RootSystem, w_index: usize) -> Vec<i8> {
    let w = sys.weyl().element(w_index);
    let n_pos = sys.num_positive();
    // root i maps onto root perm[i]; invert the permutation on positives
    let mut sign = vec![0i8; n_pos];
    for (i, &img) in w.perm.iter().enumerate() {
        let img = img as usize;
        if img < n_pos {
            sign[img] = if i < n_pos { 1 } else { -1 };
        }
    }
    sign
}

/// Central-limit normalization `(X_T - w_T rho T) / sqrt(T)` of full-process
/// terminals, centered with each path's terminal chamber element.
pub fn nonradial_clt_sample(
    sys: &RootSystem,
    batch: &SkewBatch,
) -> Result<NormalizedSample, LimitError> {
    let k_eff = sys.min_effective_multiplicity();
    if k_eff < 0.5 {
        return Err(LimitError::HypothesisNotMet(format!(
            "the full-process central limit scaling assumes effective multiplicity >= 1/2 \
             on every reflection hyperplane; this system has {k_eff}"
        )));
    }
    if batch.paths.len() < 10 {
        return Err(LimitError::TooFewPaths {
            needed: 10,
            got: batch.paths.len(),
        });
    }
    let t = batch.horizon();
    let sqrt_t = t.sqrt();
    let values = batch
        .paths
        .iter()
        .map(|p| {
            let w_rho = sys.weyl().element(p.terminal_w).apply(sys.rho());
            p.terminal_full()
                .iter()
                .zip(&w_rho)
                .map(|(x, r)| (x - r * t) / sqrt_t)
                .collect()
        })
        .collect();
    Ok(NormalizedSample {
        t_scale: t,
        values,
        provenance: provenance("full-clt", &(t, batch.paths.len())),
    })
}

/// Parameters of the scaling-limit comparison between the hyperbolic and
/// rational full processes.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ScalingLimitParams {
    /// Scaling horizons `T`; the hyperbolic process runs on `[0, 1/T]`.
    pub t_grid: Vec<f64>,
    pub samples: usize,
    /// Step of the rational reference on `[0, 1]`; the hyperbolic side uses
    /// `dt / T` so both chains discretize identically in rescaled units.
    pub dt: f64,
    pub permutations: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ScalingComparisonPoint {
    pub t_scale: f64,
    pub result: TestResult,
}

fn systems_match(a: &RootSystem, b: &RootSystem) -> bool {
    if a.rank() != b.rank() || a.num_positive() != b.num_positive() {
        return false;
    }
    a.positive_roots().all(|ra| {
        b.positive_roots().any(|rb| {
            geom::approx_eq(&ra.vector, &rb.vector, 1e-9)
                && (ra.multiplicity - rb.multiplicity).abs() < 1e-9
        })
    })
}

/// Samples `sqrt(T) X_{1/T}` of the hyperbolic full process for each `T` and
/// compares against the time-1 law of the rational full process by the
/// energy-distance permutation test.
pub fn dunkl_convergence_test(
    ho_sys: &RootSystem,
    dunkl_sys: &RootSystem,
    params: &ScalingLimitParams,
) -> Result<Vec<ScalingComparisonPoint>, LimitError> {
    if !systems_match(&ho_sys.rescale_to_dunkl(), dunkl_sys) {
        return Err(LimitError::MismatchedSystems);
    }
    let n = ho_sys.rank();
    let zero = vec![0.0; n];

    let mut dunkl_sim = SimConfig::new(
        RadialKind::Dunkl,
        zero.clone(),
        params.dt,
        1.0,
        params.samples,
        params.seed,
    );
    dunkl_sim.wall_floor = Some(params.dt.sqrt());
    let dunkl_cfg = crate::jump::SkewConfig::new(crate::jump::SkewKind::Dunkl, dunkl_sim);
    let dunkl_batch = crate::jump::simulate_skew_product(dunkl_sys, &dunkl_cfg)?;
    let reference: Vec<Vec<f64>> = dunkl_batch
        .paths
        .iter()
        .map(|p| p.terminal_full().to_vec())
        .collect();

    let mut out = Vec::with_capacity(params.t_grid.len());
    for (i, &t_scale) in params.t_grid.iter().enumerate() {
        let dt = params.dt / t_scale;
        let mut sim = SimConfig::new(
            RadialKind::HeckmanOpdam,
            zero.clone(),
            dt,
            1.0 / t_scale,
            params.samples,
            splitmix64(params.seed ^ (i as u64 + 1)),
        );
        sim.wall_floor = Some(dt.sqrt());
        let cfg = crate::jump::SkewConfig::new(crate::jump::SkewKind::HeckmanOpdam, sim);
        let batch = crate::jump::simulate_skew_product(ho_sys, &cfg)?;
        let sqrt_t = t_scale.sqrt();
        let sample: Vec<Vec<f64>> = batch
            .paths
            .iter()
            .map(|p| p.terminal_full().iter().map(|x| x * sqrt_t).collect())
            .collect();
        let result = stats::energy_distance_perm(
            &sample,
            &reference,
            params.permutations,
            splitmix64(params.seed.wrapping_add(7919 * (i as u64 + 1))),
        )?;
        out.push(ScalingComparisonPoint { t_scale, result });
    }
    Ok(out)
}

/// One functional row of the change-of-measure check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GirsanovRow {
    pub name: String,
    /// Direct estimate under the hyperbolic radial law.
    pub direct: f64,
    pub direct_se: f64,
    /// Reweighted estimate under the rational radial law.
    pub reweighted: f64,
    pub reweighted_se: f64,
    pub pooled_se: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct GirsanovCheck {
    pub rows: Vec<GirsanovRow>,
    /// Mean exponential weight; 1 in expectation.
    pub mean_weight: f64,
    pub mean_weight_se: f64,
    pub paths: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct GirsanovParams {
    pub start: Vec<f64>,
    pub t: f64,
    pub dt: f64,
    pub paths: usize,
    pub seed: u64,
}

/// Verifies the absolute-continuity identity between the two radial laws:
/// expectations under the hyperbolic law equal exponentially reweighted
/// expectations under the rational law, for a panel of test functionals.
pub fn girsanov_check(
    ho_sys: &RootSystem,
    dunkl_sys: &RootSystem,
    params: &GirsanovParams,
) -> Result<GirsanovCheck, LimitError> {
    if !systems_match(&ho_sys.rescale_to_dunkl(), dunkl_sys) {
        return Err(LimitError::MismatchedSystems);
    }
    let n = ho_sys.rank();
    let functionals: Vec<(String, Box<dyn Fn(&[f64]) -> f64>)> = {
        let mut v: Vec<(String, Box<dyn Fn(&[f64]) -> f64>)> = vec![
            ("1".to_string(), Box::new(|_: &[f64]| 1.0)),
            ("|x|^2".to_string(), Box::new(geom::norm_sq)),
            (
                "exp(-|x|^2)".to_string(),
                Box::new(|x: &[f64]| (-geom::norm_sq(x)).exp()),
            ),
        ];
        for i in 0..n {
            v.push((format!("x_{}", i + 1), Box::new(move |x: &[f64]| x[i])));
        }
        v
    };

    // direct side
    let ho_config = SimConfig::new(
        RadialKind::HeckmanOpdam,
        params.start.clone(),
        params.dt,
        params.t,
        params.paths,
        params.seed,
    );
    let ho_batch = simulate_radial(ho_sys, &ho_config)?;
    let ho_terminals = ho_batch.terminals();

    // reweighted side: rational paths carry their noise records
    let mut q_config = SimConfig::new(
        RadialKind::Dunkl,
        params.start.clone(),
        params.dt,
        params.t,
        params.paths,
        splitmix64(params.seed ^ 0x9e37_79b9_7f4a_7c15),
    );
    q_config.record_noise = true;
    let q_batch = simulate_radial(dunkl_sys, &q_config)?;
    let mut weights = Vec::with_capacity(params.paths);
    let mut q_terminals = Vec::with_capacity(params.paths);
    for path in &q_batch.paths {
        let gi = girsanov_integral(ho_sys, path)?;
        let w = gi.terminal_log_weight().exp();
        assert!(w > 0.0, "exponential weights are positive by construction");
        weights.push(w);
        q_terminals.push(path.terminal().to_vec());
    }
    let (mean_weight, mean_weight_se) = stats::mean_se(&weights);

    let mut rows = Vec::new();
    for (name, f) in &functionals {
        let direct_sample: Vec<f64> = ho_terminals.iter().map(|x| f(x)).collect();
        let (direct, direct_se) = stats::mean_se(&direct_sample);
        let reweighted_sample: Vec<f64> = q_terminals
            .iter()
            .zip(&weights)
            .map(|(x, w)| w * f(x))
            .collect();
        let (reweighted, reweighted_se) = stats::mean_se(&reweighted_sample);
        rows.push(GirsanovRow {
            name: name.clone(),
            direct,
            direct_se,
            reweighted,
            reweighted_se,
            pooled_se: (direct_se * direct_se + reweighted_se * reweighted_se).sqrt(),
        });
    }
    Ok(GirsanovCheck {
        rows,
        mean_weight,
        mean_weight_se,
        paths: params.paths,
    })
}

/// Sample of the process whose radial part is the intrinsic Brownian motion
/// propagating in an independently, uniformly drawn chamber.
#[derive(Debug, Clone)]
pub struct IstarSample {
    pub values: Vec<Vec<f64>>,
    /// The underlying radial terminals (shared stream with a plain intrinsic
    /// run at the same seed).
    pub radial: Vec<Vec<f64>>,
    /// Drawn chamber element per sample.
    pub chambers: Vec<usize>,
}

pub fn istar_sample(
    sys: &RootSystem,
    t: f64,
    dt: f64,
    paths: usize,
    seed: u64,
) -> Result<IstarSample, LimitError> {
    let mut config = SimConfig::new(
        RadialKind::Intrinsic,
        vec![0.0; sys.rank()],
        dt,
        t,
        paths,
        seed,
    );
    config.wall_floor = Some(dt.sqrt());
    let batch = simulate_radial(sys, &config)?;
    let order = sys.weyl().order();
    let mut values = Vec::with_capacity(paths);
    let mut radial = Vec::with_capacity(paths);
    let mut chambers = Vec::with_capacity(paths);
    for path in &batch.paths {
        // chamber stream independent of the radial stream
        let mut rng = derive_stream(seed, STREAM_AUX, path.index as u64);
        let w = rng.gen_range(0..order);
        let value = sys.weyl().element(w).apply(path.terminal());
        radial.push(path.terminal().to_vec());
        chambers.push(w);
        values.push(value);
    }
    Ok(IstarSample {
        values,
        radial,
        chambers,
    })
}

/// Unnormalized log-density of the time-1 law of the chamber-randomized
/// intrinsic Brownian motion: `-|y|^2/2 + sum_a 2 log |(a, y)|`.
///
/// Weyl invariant; `-inf` on the walls. The normalization constant is not
/// known in closed form here, see [`istar1_log_norm_estimate`].
pub fn istar1_log_density(sys: &RootSystem, y: &[f64]) -> f64 {
    let mut v = -0.5 * geom::norm_sq(y);
    for r in sys.positive_roots() {
        let p = geom::dot(&r.vector, y).abs();
        if p == 0.0 {
            return f64::NEG_INFINITY;
        }
        v += 2.0 * p.ln();
    }
    v
}

/// Monte Carlo estimate of the log normalization constant of
/// [`istar1_log_density`], via a standard normal proposal. The value is an
/// estimate, not a closed form; the relative standard error of the
/// underlying mean is returned alongside.
pub fn istar1_log_norm_estimate(sys: &RootSystem, samples: usize, seed: u64) -> (f64, f64) {
    let n = sys.rank();
    let mut rng = derive_stream(seed, STREAM_AUX, 424242);
    let mut draws = Vec::with_capacity(samples);
    for _ in 0..samples {
        let y: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let mut prod = 1.0;
        for r in sys.positive_roots() {
            let p = geom::dot(&r.vector, &y);
            prod *= p * p;
        }
        draws.push(prod);
    }
    let (mean, se) = stats::mean_se(&draws);
    let log_z = (n as f64 / 2.0) * (2.0 * std::f64::consts::PI).ln() + mean.ln();
    (log_z, se / mean)
}

/// Late-time check of the relativized process in the complex case: the
/// normalized terminal law against the chamber-randomized intrinsic law,
/// terminal-chamber uniformity, and the sublinear-norm trend statistic.
#[derive(Debug, Clone, serde::Serialize)]
pub struct F0LimitReport {
    pub energy: TestResult,
    pub chamber_uniformity: TestResult,
    /// `mean |Y_T| / T`, which drifts to 0.
    pub mean_abs_over_t: f64,
    pub late_event_fraction: f64,
}

pub fn f0_limit_check(
    sys: &RootSystem,
    f0_batch: &SkewBatch,
    istar: &IstarSample,
    permutations: usize,
    seed: u64,
) -> Result<F0LimitReport, LimitError> {
    if !sys.is_complex_case() {
        return Err(LimitError::HypothesisNotMet(
            "the relativized dynamics has a closed form only for reduced systems with \
             unit multiplicities"
                .to_string(),
        ));
    }
    let t = f0_batch.horizon();
    let sqrt_t = t.sqrt();
    let normalized: Vec<Vec<f64>> = f0_batch
        .paths
        .iter()
        .map(|p| p.terminal_full().iter().map(|x| x / sqrt_t).collect())
        .collect();
    let energy = stats::energy_distance_perm(&normalized, &istar.values, permutations, seed)?;

    let mut counts = vec![0u64; sys.weyl().order()];
    let mut late = 0usize;
    let mut abs_sum = 0.0;
    for p in &f0_batch.paths {
        counts[p.terminal_w] += 1;
        if p.last_event_time().is_some_and(|s| s > 0.9 * t) {
            late += 1;
        }
        abs_sum += geom::norm(p.terminal_full()) / t;
    }
    let chamber_uniformity = stats::chi_square_uniform(&counts)?;
    Ok(F0LimitReport {
        energy,
        chamber_uniformity,
        mean_abs_over_t: abs_sum / f0_batch.paths.len() as f64,
        late_event_fraction: late as f64 / f0_batch.paths.len() as f64,
    })
}
