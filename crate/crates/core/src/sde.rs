//! Time-discretized integration of the continuous radial processes.
//!
//! The scheme is explicit Euler-Maruyama with two wall safeguards:
//!
//! * the drift is evaluated with every pairing `(a, x)` clamped from below at
//!   a configurable `wall_floor`, keeping the singular terms integrable;
//! * after each step the state is folded back into the closed positive
//!   chamber by the exact Weyl reflection of `roots`, which is the correct
//!   geometry for the reflected radial dynamics and keeps the per-step cost
//!   at `O(|R+| n)`.
//!
//! Each path draws its Brownian increments from an independent derived stream
//! (see [`crate::rng`]), so a batch is reproducible bit-for-bit regardless of
//! the number of rayon workers. Paths record their states on a stride grid
//! (the terminal state is always recorded) while the per-root functionals
//! `int coth((a, X_s)/2) ds` and `int rate(a, X_s) ds` accumulate online at
//! full resolution.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::fields::{self, DriftKind};
use crate::geom;
use crate::rng::{derive_stream, STREAM_NOISE};
use crate::roots::RootSystem;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    BadConfig(String),
    #[error("non-finite state in path {path} at step {step} (blow-up)")]
    NonFiniteState { path: usize, step: usize },
    #[error("operation needs the Brownian increments; rerun with record_noise = true")]
    MissingNoise,
    #[error("operation needs full-resolution recording; path was recorded with stride {0}")]
    StrideTooCoarse(usize),
}

/// Which continuous radial process to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum RadialKind {
    /// Hyperbolic-drift radial process (parameter = system multiplicities).
    HeckmanOpdam,
    /// Rational-drift radial process on a (rescaled) reduced system.
    Dunkl,
    /// Rational drift with unit multiplicities; also the radial dynamics of
    /// the F0 process in the complex case.
    Intrinsic,
    /// No drift: folded Brownian motion, a degenerate reference mode.
    DriftFree,
}

impl RadialKind {
    pub(crate) fn drift(self) -> DriftKind {
        match self {
            RadialKind::HeckmanOpdam => DriftKind::Hyperbolic,
            RadialKind::Dunkl => DriftKind::Rational,
            RadialKind::Intrinsic => DriftKind::RationalUnitK,
            RadialKind::DriftFree => DriftKind::None,
        }
    }
}

/// Default pairing floor used when the configuration leaves it unset.
pub fn default_wall_floor(dt: f64) -> f64 {
    (dt.sqrt() * 1e-2).max(1e-10)
}

/// Simulation parameters shared by the radial and skew-product engines.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SimConfig {
    pub kind: RadialKind,
    /// Start point, in the closed positive chamber.
    pub start: Vec<f64>,
    pub dt: f64,
    pub horizon: f64,
    pub paths: usize,
    pub master_seed: u64,
    /// Pairing floor for drift evaluation; `None` picks
    /// `max(sqrt(dt) * 1e-2, 1e-10)`. Runs started on a wall want a floor
    /// near `sqrt(dt)` so the escape step stays on the noise scale.
    pub wall_floor: Option<f64>,
    /// Optional cap on the drift norm per step.
    pub drift_cap: Option<f64>,
    /// Record every `stride`-th grid point; `None` targets ~512 records.
    /// Must be 1 when `record_noise` is set.
    pub record_stride: Option<usize>,
    /// Keep the Brownian increments (needed for stochastic integrals).
    pub record_noise: bool,
}

impl SimConfig {
    pub fn new(
        kind: RadialKind,
        start: Vec<f64>,
        dt: f64,
        horizon: f64,
        paths: usize,
        master_seed: u64,
    ) -> Self {
        SimConfig {
            kind,
            start,
            dt,
            horizon,
            paths,
            master_seed,
            wall_floor: None,
            drift_cap: None,
            record_stride: None,
            record_noise: false,
        }
    }

    pub(crate) fn resolve(&self, sys: &RootSystem) -> Result<Resolved, SimError> {
        if !(self.dt > 0.0) || !(self.horizon > 0.0) {
            return Err(SimError::BadConfig(
                "dt and horizon must be positive".to_string(),
            ));
        }
        if self.dt >= self.horizon {
            return Err(SimError::BadConfig(format!(
                "dt = {} must be smaller than the horizon {}",
                self.dt, self.horizon
            )));
        }
        if self.paths == 0 {
            return Err(SimError::BadConfig(
                "path count must be positive".to_string(),
            ));
        }
        if self.start.len() != sys.rank() {
            return Err(SimError::BadConfig(format!(
                "start has dimension {}, system rank is {}",
                self.start.len(),
                sys.rank()
            )));
        }
        if !sys.in_closed_chamber(&self.start, 1e-9) {
            return Err(SimError::BadConfig(
                "start point lies outside the closed positive chamber".to_string(),
            ));
        }
        let steps = (self.horizon / self.dt).round().max(1.0) as usize;
        let stride = match self.record_stride {
            Some(0) => {
                return Err(SimError::BadConfig(
                    "record_stride must be >= 1".to_string(),
                ))
            }
            Some(s) => {
                if self.record_noise && s != 1 {
                    return Err(SimError::BadConfig(
                        "record_noise requires record_stride = 1".to_string(),
                    ));
                }
                s
            }
            None => {
                if self.record_noise {
                    1
                } else {
                    (steps / 512).max(1)
                }
            }
        };
        let floor = self
            .wall_floor
            .unwrap_or_else(|| default_wall_floor(self.dt));
        if !(floor > 0.0) {
            return Err(SimError::BadConfig(
                "wall_floor must be positive".to_string(),
            ));
        }
        let mut warnings = Vec::new();
        if sys.min_positive_pairing(&self.start) < 1e-12 && sys.min_effective_multiplicity() < 0.5 {
            warnings.push(
                "start on a chamber wall with effective multiplicity below 1/2: \
                 wall avoidance is not guaranteed in this regime"
                    .to_string(),
            );
        }
        Ok(Resolved {
            steps,
            stride,
            floor,
            warnings,
        })
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Resolved {
    pub steps: usize,
    pub stride: usize,
    pub floor: f64,
    pub warnings: Vec<String>,
}

/// Per-root functional accumulators, integrated online at full resolution.
#[derive(Debug, Clone, Default)]
pub struct PathAccumulators {
    /// `int_0^T coth((a, X_s)/2) ds` per positive root (pairing floored).
    pub coth_int: Vec<f64>,
    /// `int_0^T rate(a, X_s) ds` per positive root, with the rate function of
    /// the simulated kind.
    pub rate_int: Vec<f64>,
    /// Steps on which some pairing fell below the wall floor.
    pub wall_steps: usize,
    pub steps: usize,
}

/// A discretized radial path on the recorded grid.
#[derive(Debug, Clone)]
pub struct RadialPath {
    pub index: usize,
    pub rank: usize,
    pub dt: f64,
    pub stride: usize,
    pub wall_floor: f64,
    /// Recorded times, starting at 0; the terminal time is always present.
    pub times: Vec<f64>,
    /// Flat recorded states, `times.len() x rank`, all in the closed chamber.
    pub states: Vec<f64>,
    /// Brownian increments (`steps x rank`), present iff noise was recorded.
    pub noise: Option<Vec<f64>>,
    pub accum: PathAccumulators,
}

impl RadialPath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.rank..(i + 1) * self.rank]
    }

    pub fn terminal(&self) -> &[f64] {
        self.state(self.len() - 1)
    }
}

/// A batch of radial paths with the resolved discretization.
#[derive(Debug)]
pub struct RadialBatch {
    pub paths: Vec<RadialPath>,
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
    pub warnings: Vec<String>,
}

impl RadialBatch {
    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn terminals(&self) -> Vec<Vec<f64>> {
        self.paths.iter().map(|p| p.terminal().to_vec()).collect()
    }
}

enum Noise<'a> {
    Stream(rand_chacha::ChaCha8Rng, f64),
    Given(&'a [f64]),
}

impl Noise<'_> {
    #[inline]
    fn fill(&mut self, step: usize, out: &mut [f64]) {
        match self {
            Noise::Stream(rng, sqrt_dt) => {
                for o in out.iter_mut() {
                    *o = *sqrt_dt * rng.sample::<f64, _>(StandardNormal);
                }
            }
            Noise::Given(inc) => {
                let n = out.len();
                out.copy_from_slice(&inc[step * n..(step + 1) * n]);
            }
        }
    }
}

/// Drift assembly reusing per-root coth values already computed for the
/// online functionals; term-by-term equal to [`fields::drift_from_pairings`].
fn drift_from_coths(
    sys: &RootSystem,
    kind: RadialKind,
    pairings: &[f64],
    coths: &[f64],
    floor: f64,
    out: &mut [f64],
) {
    out.fill(0.0);
    match kind {
        RadialKind::DriftFree => {}
        RadialKind::HeckmanOpdam => {
            for (root, &coth) in sys.positive_roots().zip(coths) {
                geom::axpy(0.5 * root.multiplicity * coth, &root.vector, out);
            }
        }
        RadialKind::Dunkl => {
            for (root, &p) in sys.positive_roots().zip(pairings) {
                geom::axpy(root.multiplicity / p.max(floor), &root.vector, out);
            }
        }
        RadialKind::Intrinsic => {
            for (root, &p) in sys.positive_roots().zip(pairings) {
                geom::axpy(1.0 / p.max(floor), &root.vector, out);
            }
        }
    }
}

#[inline]
fn cap_drift(drift: &mut [f64], cap: Option<f64>) {
    if let Some(cap) = cap {
        let norm = geom::norm(drift);
        if norm > cap {
            let scale = cap / norm;
            for d in drift.iter_mut() {
                *d *= scale;
            }
        }
    }
}

/// One Euler-Maruyama step: wall-floored drift, optional drift cap, additive
/// noise, then the exact Weyl fold back into the closed chamber.
pub fn step(
    sys: &RootSystem,
    kind: RadialKind,
    state: &mut [f64],
    dw: &[f64],
    dt: f64,
    wall_floor: f64,
    drift_cap: Option<f64>,
    scratch: &mut [f64],
) {
    fields::drift_into(sys, kind.drift(), state, wall_floor, scratch);
    cap_drift(scratch, drift_cap);
    for i in 0..state.len() {
        state[i] += scratch[i] * dt + dw[i];
    }
    sys.fold_in_place(state);
}

fn run_path(
    sys: &RootSystem,
    config: &SimConfig,
    rc: &Resolved,
    index: usize,
    mut noise: Noise<'_>,
) -> Result<RadialPath, SimError> {
    let n = sys.rank();
    let n_pos = sys.num_positive();
    let records = rc.steps / rc.stride + 1 + usize::from(rc.steps % rc.stride != 0);

    let mut state = config.start.clone();
    let mut drift = vec![0.0; n];
    let mut dw = vec![0.0; n];
    let mut coths = vec![0.0; n_pos];
    let mut pairings = vec![0.0; n_pos];
    let mut times = Vec::with_capacity(records);
    let mut states = Vec::with_capacity(records * n);
    let mut noise_record = config
        .record_noise
        .then(|| Vec::with_capacity(rc.steps * n));
    let mut accum = PathAccumulators {
        coth_int: vec![0.0; n_pos],
        rate_int: vec![0.0; n_pos],
        wall_steps: 0,
        steps: rc.steps,
    };

    times.push(0.0);
    states.extend_from_slice(&state);

    for k in 0..rc.steps {
        // pairings once per step; the coth values feed both the online
        // functionals and the hyperbolic drift below
        let mut min_pairing = f64::INFINITY;
        for (a, root) in sys.positive_roots().enumerate() {
            let p = geom::dot(&root.vector, &state);
            pairings[a] = p;
            min_pairing = min_pairing.min(p);
            let coth = fields::coth_half(p.max(rc.floor));
            coths[a] = coth;
            accum.coth_int[a] += coth * config.dt;
            let rate = match config.kind {
                RadialKind::HeckmanOpdam | RadialKind::Intrinsic => {
                    fields::ho_jump_rate_from_pairing(root, p, fields::DEFAULT_WALL_EPS)
                }
                RadialKind::Dunkl => {
                    fields::dunkl_jump_rate_from_pairing(root, p, fields::DEFAULT_WALL_EPS)
                }
                RadialKind::DriftFree => 0.0,
            };
            accum.rate_int[a] += rate * config.dt;
        }
        if min_pairing < rc.floor {
            accum.wall_steps += 1;
        }

        noise.fill(k, &mut dw);
        if let Some(rec) = noise_record.as_mut() {
            rec.extend_from_slice(&dw);
        }

        // drift assembled from the shared per-root values; identical to
        // fields::drift_from_pairings term by term
        drift_from_coths(sys, config.kind, &pairings, &coths, rc.floor, &mut drift);
        cap_drift(&mut drift, config.drift_cap);
        for i in 0..n {
            state[i] += drift[i] * config.dt + dw[i];
        }
        sys.fold_in_place(&mut state);

        if !geom::all_finite(&state) {
            return Err(SimError::NonFiniteState {
                path: index,
                step: k,
            });
        }
        if (k + 1) % rc.stride == 0 || k + 1 == rc.steps {
            assert!(
                sys.in_closed_chamber(&state, 1e-9),
                "fold left the closed chamber"
            );
            times.push((k + 1) as f64 * config.dt);
            states.extend_from_slice(&state);
        }
    }

    Ok(RadialPath {
        index,
        rank: n,
        dt: config.dt,
        stride: rc.stride,
        wall_floor: rc.floor,
        times,
        states,
        noise: noise_record,
        accum,
    })
}

/// Simulates `config.paths` independent radial paths.
pub fn simulate_radial(sys: &RootSystem, config: &SimConfig) -> Result<RadialBatch, SimError> {
    let rc = config.resolve(sys)?;
    let sqrt_dt = config.dt.sqrt();
    let paths: Result<Vec<RadialPath>, SimError> = (0..config.paths)
        .into_par_iter()
        .map(|i| {
            let rng = derive_stream(config.master_seed, STREAM_NOISE, i as u64);
            run_path(sys, config, &rc, i, Noise::Stream(rng, sqrt_dt))
        })
        .collect();
    Ok(RadialBatch {
        paths: paths?,
        dt: config.dt,
        steps: rc.steps,
        stride: rc.stride,
        warnings: rc.warnings,
    })
}

/// Integrates a single path against explicitly supplied Brownian increments
/// (`steps x rank`, each of variance `dt`). Used for coupling and
/// step-refinement studies.
pub fn simulate_radial_with_increments(
    sys: &RootSystem,
    config: &SimConfig,
    increments: &[f64],
) -> Result<RadialPath, SimError> {
    let rc = config.resolve(sys)?;
    if increments.len() != rc.steps * sys.rank() {
        return Err(SimError::BadConfig(format!(
            "need {} increments, got {}",
            rc.steps * sys.rank(),
            increments.len()
        )));
    }
    run_path(sys, config, &rc, 0, Noise::Given(increments))
}

/// Distance statistics of one coupled pair.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CoupleStats {
    pub initial_distance: f64,
    pub terminal_distance: f64,
    /// Fraction of steps on which the distance did not increase.
    pub nonincreasing_fraction: f64,
    /// Largest single-step distance increase observed.
    pub max_violation: f64,
}

/// A pair of paths driven by the same Brownian increments.
#[derive(Debug)]
pub struct CoupledPair {
    pub a: RadialPath,
    pub b: RadialPath,
    pub stats: CoupleStats,
}

/// Simulates coupled pairs from `config.start` and `start_b`, sharing the
/// noise stream within each pair. The monotone drift makes the inter-path
/// distance (up to discretization) non-increasing.
pub fn simulate_coupled_pair(
    sys: &RootSystem,
    config: &SimConfig,
    start_b: &[f64],
) -> Result<Vec<CoupledPair>, SimError> {
    let rc = config.resolve(sys)?;
    if start_b.len() != sys.rank() {
        return Err(SimError::BadConfig(
            "start_b dimension mismatch".to_string(),
        ));
    }
    if !sys.in_closed_chamber(start_b, 1e-9) {
        return Err(SimError::BadConfig(
            "start_b lies outside the closed positive chamber".to_string(),
        ));
    }
    let sqrt_dt = config.dt.sqrt();
    (0..config.paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = derive_stream(config.master_seed, STREAM_NOISE, i as u64);
            let mut increments = vec![0.0; rc.steps * sys.rank()];
            for v in increments.iter_mut() {
                *v = sqrt_dt * rng.sample::<f64, _>(StandardNormal);
            }
            let a = run_path(sys, config, &rc, i, Noise::Given(&increments))?;
            let mut config_b = config.clone();
            config_b.start = start_b.to_vec();
            let b = run_path(sys, &config_b, &rc, i, Noise::Given(&increments))?;

            // distance walk on the recorded grid (same stride for both)
            let mut nonincreasing = 0usize;
            let mut max_violation = 0.0f64;
            let mut last = geom::distance(a.state(0), b.state(0));
            let initial = last;
            for r in 1..a.len() {
                let d = geom::distance(a.state(r), b.state(r));
                if d <= last + 1e-14 {
                    nonincreasing += 1;
                } else {
                    max_violation = max_violation.max(d - last);
                }
                last = d;
            }
            let stats = CoupleStats {
                initial_distance: initial,
                terminal_distance: last,
                nonincreasing_fraction: nonincreasing as f64 / (a.len() - 1) as f64,
                max_violation,
            };
            Ok(CoupledPair { a, b, stats })
        })
        .collect()
}

/// Closed-form reference process: squared Bessel dynamics.
#[derive(Debug, Clone, Copy)]
pub struct BesselRef {
    pub dimension: f64,
    pub start_radius: f64,
}

/// Euler scheme for the squared Bessel process `dZ = dim dt + 2 sqrt(Z) dW`
/// with an absorption floor at 0. Returns the scalar path on the full grid.
pub fn simulate_bessel_sq(
    bessel: &BesselRef,
    dt: f64,
    horizon: f64,
    seed: u64,
    path_index: u64,
) -> Vec<f64> {
    assert!(bessel.dimension > 0.0, "dimension must be positive");
    let steps = (horizon / dt).round().max(1.0) as usize;
    let sqrt_dt = dt.sqrt();
    let mut rng = derive_stream(seed, STREAM_NOISE, path_index);
    let mut z = bessel.start_radius * bessel.start_radius;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(z);
    for _ in 0..steps {
        let dw: f64 = sqrt_dt * rng.sample::<f64, _>(StandardNormal);
        z += bessel.dimension * dt + 2.0 * z.max(0.0).sqrt() * dw;
        z = z.max(0.0);
        out.push(z);
    }
    out
}

/// Cumulative stochastic integral `L_t = sum g(X_k) . dW_k` and its bracket
/// `<L>_t = sum |g(X_k)|^2 dt` on the full grid, with the exponential
/// martingale formed in log space.
#[derive(Debug, Clone)]
pub struct GirsanovIntegral {
    pub l: Vec<f64>,
    pub quadratic_variation: Vec<f64>,
}

impl GirsanovIntegral {
    /// `log M_t = L_t - <L>_t / 2` at grid index `i`.
    pub fn log_weight(&self, i: usize) -> f64 {
        self.l[i] - 0.5 * self.quadratic_variation[i]
    }

    pub fn terminal_log_weight(&self) -> f64 {
        self.log_weight(self.l.len() - 1)
    }
}

/// Left-endpoint Riemann sums of `coth((a, X_s)/2)` per positive root over a
/// full-resolution path; the offline mirror of the online accumulator.
pub fn coth_integrals(sys: &RootSystem, path: &RadialPath) -> Result<Vec<f64>, SimError> {
    if path.stride != 1 {
        return Err(SimError::StrideTooCoarse(path.stride));
    }
    let mut out = vec![0.0; sys.num_positive()];
    for k in 0..(path.len() - 1) {
        let x = path.state(k);
        for (a, root) in sys.positive_roots().enumerate() {
            let p = geom::dot(&root.vector, x).max(path.wall_floor);
            out[a] += fields::coth_half(p) * path.dt;
        }
    }
    Ok(out)
}

/// Left-endpoint Riemann sums of the jump rate per positive root.
pub fn jump_rate_integrals(
    sys: &RootSystem,
    path: &RadialPath,
    kind: RadialKind,
) -> Result<Vec<f64>, SimError> {
    if path.stride != 1 {
        return Err(SimError::StrideTooCoarse(path.stride));
    }
    let mut out = vec![0.0; sys.num_positive()];
    for k in 0..(path.len() - 1) {
        let x = path.state(k);
        for a in 0..sys.num_positive() {
            let rate = match kind {
                RadialKind::Dunkl => fields::dunkl_jump_rate(sys, a, x),
                _ => fields::ho_jump_rate(sys, a, x),
            };
            out[a] += rate * path.dt;
        }
    }
    Ok(out)
}

/// Left-endpoint Ito sums of an arbitrary vector field against the recorded
/// noise, with the running quadratic variation.
pub fn ito_integral(
    path: &RadialPath,
    mut field: impl FnMut(&[f64]) -> Vec<f64>,
) -> Result<GirsanovIntegral, SimError> {
    if path.stride != 1 {
        return Err(SimError::StrideTooCoarse(path.stride));
    }
    let noise = path.noise.as_ref().ok_or(SimError::MissingNoise)?;
    let n = path.rank;
    let steps = path.len() - 1;
    let mut l = Vec::with_capacity(steps + 1);
    let mut qv = Vec::with_capacity(steps + 1);
    l.push(0.0);
    qv.push(0.0);
    let mut acc_l = 0.0;
    let mut acc_qv = 0.0;
    for k in 0..steps {
        let g = field(path.state(k));
        let dw = &noise[k * n..(k + 1) * n];
        acc_l += geom::dot(&g, dw);
        acc_qv += geom::norm_sq(&g) * path.dt;
        l.push(acc_l);
        qv.push(acc_qv);
    }
    Ok(GirsanovIntegral {
        l,
        quadratic_variation: qv,
    })
}

/// Ito sums of the change-of-measure integrand against the recorded noise.
///
/// `sys` is the hyperbolic-side system; evaluated along a rational-side path
/// this yields the likelihood ratio between the two radial laws.
pub fn girsanov_integral(
    sys: &RootSystem,
    path: &RadialPath,
) -> Result<GirsanovIntegral, SimError> {
    ito_integral(path, |x| fields::girsanov_integrand(sys, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{Family, RootSystem};
    use crate::stats;

    fn a2() -> RootSystem {
        RootSystem::standard(Family::A, 2, &[1.0]).unwrap()
    }

    fn a1() -> RootSystem {
        RootSystem::standard(Family::A, 1, &[1.0]).unwrap()
    }

    #[test]
    fn zero_noise_deep_chamber_advances_by_rho() {
        let sys = a2();
        let start: Vec<f64> = sys.rho().iter().map(|v| 60.0 * v).collect();
        let mut config = SimConfig::new(RadialKind::HeckmanOpdam, start.clone(), 1e-3, 0.1, 1, 1);
        config.record_stride = Some(1);
        let steps = 100;
        let zero = vec![0.0; steps * 2];
        let path = simulate_radial_with_increments(&sys, &config, &zero).unwrap();
        let expected: Vec<f64> = start
            .iter()
            .zip(sys.rho())
            .map(|(s, r)| s + 0.1 * r)
            .collect();
        assert!(geom::approx_eq(path.terminal(), &expected, 1e-12));
    }

    #[test]
    fn fold_matches_radial_decomposition_of_raw_step() {
        let sys = a2();
        // a state near the wall plus a kick that exits the chamber
        let state = sys.fold(&[0.02, 0.01]);
        let dw = vec![-0.4, -0.3];
        let mut folded = state.clone();
        let mut scratch = vec![0.0; 2];
        step(
            &sys,
            RadialKind::DriftFree,
            &mut folded,
            &dw,
            1e-3,
            1e-6,
            None,
            &mut scratch,
        );
        let raw: Vec<f64> = state.iter().zip(&dw).map(|(s, d)| s + d).collect();
        let direct = sys.radial_decompose(&raw);
        assert!(geom::approx_eq(&folded, &direct.x_plus, 1e-12));
    }

    #[test]
    fn driftfree_matches_folded_brownian_bitwise() {
        let sys = a2();
        let mut config = SimConfig::new(RadialKind::DriftFree, vec![0.0, 0.0], 1e-3, 1.0, 3, 42);
        config.record_stride = Some(1);
        let batch = simulate_radial(&sys, &config).unwrap();
        for path in &batch.paths {
            // replay the same stream and fold by hand
            let mut rng = derive_stream(42, STREAM_NOISE, path.index as u64);
            let sqrt_dt = config.dt.sqrt();
            let mut x = vec![0.0, 0.0];
            for k in 0..batch.steps {
                for i in 0..2 {
                    let z: f64 = rng.sample(StandardNormal);
                    x[i] += sqrt_dt * z;
                    let _ = k;
                }
                sys.fold_in_place(&mut x);
            }
            assert_eq!(path.terminal(), x.as_slice());
        }
    }

    #[test]
    fn seed_determinism_across_repeat_runs() {
        let sys = a1();
        let config = SimConfig::new(RadialKind::HeckmanOpdam, vec![0.5], 1e-3, 2.0, 8, 7);
        let b1 = simulate_radial(&sys, &config).unwrap();
        let b2 = simulate_radial(&sys, &config).unwrap();
        for (p, q) in b1.paths.iter().zip(&b2.paths) {
            assert_eq!(p.states, q.states);
            assert_eq!(p.accum.coth_int, q.accum.coth_int);
        }
    }

    #[test]
    fn chamber_preservation_and_record_grid() {
        let sys = a2();
        let mut config = SimConfig::new(RadialKind::HeckmanOpdam, vec![0.0, 0.0], 1e-3, 1.0, 2, 3);
        config.record_stride = Some(100);
        let batch = simulate_radial(&sys, &config).unwrap();
        assert_eq!(batch.steps, 1000);
        for path in &batch.paths {
            assert_eq!(path.len(), 11);
            assert!((path.times[path.len() - 1] - 1.0).abs() < 1e-12);
            for i in 0..path.len() {
                assert!(sys.in_closed_chamber(path.state(i), 1e-9));
            }
        }
    }

    #[test]
    fn coupled_pair_identical_starts_coincide() {
        let sys = a1();
        let config = SimConfig::new(RadialKind::HeckmanOpdam, vec![0.7], 1e-3, 1.0, 2, 11);
        let pairs = simulate_coupled_pair(&sys, &config, &[0.7]).unwrap();
        for pair in &pairs {
            assert_eq!(pair.a.states, pair.b.states);
            assert_eq!(pair.stats.terminal_distance, 0.0);
        }
    }

    #[test]
    fn coupled_pair_contracts() {
        let sys = a1();
        let mut config = SimConfig::new(RadialKind::HeckmanOpdam, vec![0.5], 1e-3, 1.0, 10, 13);
        config.record_stride = Some(1);
        let pairs = simulate_coupled_pair(&sys, &config, &[2.5]).unwrap();
        for pair in &pairs {
            assert!(pair.stats.terminal_distance < pair.stats.initial_distance);
            assert!(pair.stats.nonincreasing_fraction >= 0.99);
        }
    }

    #[test]
    fn besq_mean_growth_matches_closed_form() {
        let bessel = BesselRef {
            dimension: 3.0,
            start_radius: 1.0,
        };
        let n = 1000;
        let t = 1.0;
        let terminals: Vec<f64> = (0..n)
            .map(|i| *simulate_bessel_sq(&bessel, 1e-3, t, 99, i).last().unwrap())
            .collect();
        let (mean, se) = stats::mean_se(&terminals);
        let expected = 1.0 + 3.0 * t;
        assert!(
            (mean - expected).abs() <= 3.0 * se,
            "mean {mean} vs {expected} (se {se})"
        );
    }

    #[test]
    fn driftfree_squared_norm_is_chi_square() {
        // |folded BM|^2 at t = 1 in rank 2 is chi-square with 2 dof
        let sys = a2();
        let config = SimConfig::new(RadialKind::DriftFree, vec![0.0, 0.0], 1e-3, 1.0, 400, 17);
        let batch = simulate_radial(&sys, &config).unwrap();
        let sq: Vec<f64> = batch
            .paths
            .iter()
            .map(|p| geom::norm_sq(p.terminal()))
            .collect();
        let cdf = |x: f64| {
            if x <= 0.0 {
                0.0
            } else {
                1.0 - (-x / 2.0).exp()
            }
        };
        let res = stats::ks_1d(&sq, cdf).unwrap();
        assert!(res.p_value > 0.01, "KS p = {}", res.p_value);
    }

    #[test]
    fn ito_integral_with_constant_integrand_identity() {
        // constant field c: L_T = c . beta_T and <L>_T = |c|^2 T exactly
        let sys = a1();
        let mut config = SimConfig::new(RadialKind::HeckmanOpdam, vec![40.0], 1e-3, 1.0, 1, 5);
        config.record_noise = true;
        let batch = simulate_radial(&sys, &config).unwrap();
        let path = &batch.paths[0];
        let c = 0.75;
        let gi = ito_integral(path, |_| vec![c]).unwrap();
        let noise = path.noise.as_ref().unwrap();
        let beta: f64 = noise.iter().sum();
        assert!((gi.l.last().unwrap() - c * beta).abs() < 1e-12);
        assert!((gi.quadratic_variation.last().unwrap() - c * c * 1.0).abs() < 1e-12);
        // bracket additivity over sub-intervals is exact on the grid
        let mid = 500;
        let qv = &gi.quadratic_variation;
        let total = qv[qv.len() - 1];
        assert!((qv[mid] + (total - qv[mid]) - total).abs() < 1e-15);
        // the change-of-measure wrapper agrees with the generic sums
        let gw = girsanov_integral(&sys, path).unwrap();
        let gg = ito_integral(path, |x| fields::girsanov_integrand(&sys, x)).unwrap();
        assert_eq!(gw.l, gg.l);
    }

    #[test]
    fn offline_integrals_match_online_accumulators() {
        let sys = a2();
        let mut config = SimConfig::new(RadialKind::HeckmanOpdam, vec![0.3, 0.2], 1e-3, 0.5, 1, 23);
        config.record_stride = Some(1);
        let batch = simulate_radial(&sys, &config).unwrap();
        let path = &batch.paths[0];
        let offline = coth_integrals(&sys, path).unwrap();
        for (a, b) in offline.iter().zip(&path.accum.coth_int) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        let offline_rate = jump_rate_integrals(&sys, path, RadialKind::HeckmanOpdam).unwrap();
        for (a, b) in offline_rate.iter().zip(&path.accum.rate_int) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn shared_value_drift_assembly_is_bitwise_equal() {
        // the hot loop reuses the functional's coth values; the result must
        // equal the reference evaluator exactly
        let sys = a2();
        let mut rng = rand::thread_rng();
        for kind in [
            RadialKind::HeckmanOpdam,
            RadialKind::Dunkl,
            RadialKind::Intrinsic,
            RadialKind::DriftFree,
        ] {
            for _ in 0..50 {
                let x = sys.fold(&[
                    rand::Rng::gen_range(&mut rng, -3.0..3.0),
                    rand::Rng::gen_range(&mut rng, -3.0..3.0),
                ]);
                let floor = 1e-4;
                let pairings: Vec<f64> = sys
                    .positive_roots()
                    .map(|r| geom::dot(&r.vector, &x))
                    .collect();
                let coths: Vec<f64> = pairings
                    .iter()
                    .map(|p| fields::coth_half(p.max(floor)))
                    .collect();
                let mut fast = vec![0.0; 2];
                drift_from_coths(&sys, kind, &pairings, &coths, floor, &mut fast);
                let mut reference = vec![0.0; 2];
                fields::drift_into(&sys, kind.drift(), &x, floor, &mut reference);
                assert_eq!(fast, reference);
            }
        }
    }

    #[test]
    fn drift_cap_limits_the_step() {
        let sys = a1();
        // near the wall the floored drift is huge; the cap bounds it
        let mut config = SimConfig::new(RadialKind::HeckmanOpdam, vec![1e-6], 1e-3, 0.1, 1, 1);
        config.drift_cap = Some(2.0);
        config.record_stride = Some(1);
        let zero = vec![0.0; 100];
        let path = simulate_radial_with_increments(&sys, &config, &zero).unwrap();
        for k in 1..path.len() {
            let moved = (path.state(k)[0] - path.state(k - 1)[0]).abs();
            assert!(moved <= 2.0 * config.dt + 1e-12, "step {k} moved {moved}");
        }
    }

    #[test]
    fn wall_start_with_small_multiplicity_is_flagged() {
        let sys = RootSystem::standard(Family::A, 1, &[0.3]).unwrap();
        let config = SimConfig::new(RadialKind::HeckmanOpdam, vec![0.0], 1e-3, 0.1, 1, 1);
        let batch = simulate_radial(&sys, &config).unwrap();
        assert_eq!(batch.warnings.len(), 1);
        assert!(batch.warnings[0].contains("wall"));
        // same start with k >= 1/2 is silent
        let ok = a1();
        let batch = simulate_radial(&ok, &config).unwrap();
        assert!(batch.warnings.is_empty());
    }

    #[test]
    fn config_validation_errors() {
        let sys = a1();
        let bad = SimConfig::new(RadialKind::HeckmanOpdam, vec![-1.0], 1e-3, 1.0, 1, 0);
        assert!(matches!(
            simulate_radial(&sys, &bad),
            Err(SimError::BadConfig(_))
        ));
        let mut bad = SimConfig::new(RadialKind::HeckmanOpdam, vec![1.0], 2.0, 1.0, 1, 0);
        assert!(simulate_radial(&sys, &bad).is_err());
        bad.dt = 1e-3;
        bad.record_noise = true;
        bad.record_stride = Some(4);
        assert!(simulate_radial(&sys, &bad).is_err());
    }
}
