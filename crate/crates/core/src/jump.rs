//! Skew-product simulation of the full jump processes.
//!
//! The full process is realized as a continuous radial path (integrated by
//! `sde`) together with a piecewise-constant Weyl-chamber component: a jump
//! across the hyperplane of positive root `a` replaces the full state `X` by
//! `r_a X` and left-composes the chamber element with `r_a`, leaving the
//! radial part untouched.
//!
//! Jumps are thinned per step with rates frozen at the step's left endpoint:
//! each positive root fires a candidate with probability `1 - exp(-rate dt)`
//! and candidates race by their exponential clocks, so at most one jump is
//! applied per step. Rates explode near walls; they are capped at a
//! configurable value and the number of capped steps is exported as a bias
//! counter. Events are anchored at the grid point following the radial
//! advance, which makes `pre+ = post+` exact.
//!
//! When decomposition tracking is on, the engine accumulates per root the
//! jump sums, their compensators, the predictable brackets, the bounded
//! finite-variation part `A_t`, and the rotated Brownian integral, from which
//! [`compute_malpha`] assembles the martingale decomposition of the path.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::fields;
use crate::geom;
use crate::rng::{derive_stream, STREAM_JUMP, STREAM_NOISE};
use crate::roots::{RootSystem, WeylGroup};
use crate::sde::{RadialKind, SimConfig, SimError};

#[derive(Debug, Error)]
pub enum JumpError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("the F0 dynamics has a closed form only for reduced systems with unit multiplicities")]
    NotComplexCase,
    #[error("path was simulated without decomposition tracking")]
    MissingDecomposition,
}

/// Which full jump process to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SkewKind {
    /// Hyperbolic radial drift with the sinh jump kernel.
    HeckmanOpdam,
    /// Rational radial drift with the rational jump kernel.
    Dunkl,
    /// Unit-multiplicity rational radial drift with the sinh jump kernel
    /// (valid on reduced systems with k = 1, where the relativized process
    /// keeps the jump law of the hyperbolic one).
    F0Complex,
}

impl SkewKind {
    pub fn radial(self) -> RadialKind {
        match self {
            SkewKind::HeckmanOpdam => RadialKind::HeckmanOpdam,
            SkewKind::Dunkl => RadialKind::Dunkl,
            SkewKind::F0Complex => RadialKind::Intrinsic,
        }
    }

    fn rate_from_pairing(self, root: &crate::roots::Root, pairing: f64, wall_eps: f64) -> f64 {
        match self {
            SkewKind::HeckmanOpdam | SkewKind::F0Complex => {
                fields::ho_jump_rate_from_pairing(root, pairing, wall_eps)
            }
            SkewKind::Dunkl => fields::dunkl_jump_rate_from_pairing(root, pairing, wall_eps),
        }
    }
}

/// Configuration of a skew-product run. `sim.kind` is derived from the skew
/// kind and need not be set by the caller.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SkewConfig {
    pub kind: SkewKind,
    pub sim: SimConfig,
    /// Per-root intensity cap near walls.
    pub rate_cap: f64,
    /// Multiplies every jump intensity; 0 switches the jump channel off.
    pub jump_rate_scale: f64,
    /// Face rule cutoff below which a root contributes no rate.
    pub wall_eps: f64,
    /// Record the martingale-decomposition grids (needed by
    /// [`compute_malpha`]).
    pub track_decomposition: bool,
}

impl SkewConfig {
    pub fn new(kind: SkewKind, mut sim: SimConfig) -> Self {
        sim.kind = kind.radial();
        SkewConfig {
            kind,
            sim,
            rate_cap: 1e6,
            jump_rate_scale: 1.0,
            wall_eps: fields::DEFAULT_WALL_EPS,
            track_decomposition: false,
        }
    }
}

/// One reflection event of a path.
#[derive(Debug, Clone)]
pub struct JumpEvent {
    pub time: f64,
    /// Positive-root index of the reflecting hyperplane.
    pub root: usize,
    pub pre: Vec<f64>,
    pub post: Vec<f64>,
}

/// Cumulative decomposition grids, one value per recorded time per positive
/// root (flat `records x n_pos`) or per coordinate (flat `records x rank`).
#[derive(Debug, Clone)]
pub struct DecompositionRecord {
    /// Jump sums `sum -(a_vee, X_{s-})` per root.
    pub jump_sum: Vec<f64>,
    /// Realized squared-jump sums per root.
    pub jump_sq_sum: Vec<f64>,
    /// Compensators of the jump sums (capped-rate consistent).
    pub compensator: Vec<f64>,
    /// Predictable brackets `int rate (a_vee, X)^2 ds` per root.
    pub bracket: Vec<f64>,
    /// Bounded finite-variation part `A_t` (per coordinate).
    pub a_path: Vec<f64>,
    /// Rotated Brownian integral `int w_s dW_s` (per coordinate).
    pub beta_full: Vec<f64>,
}

/// A simulated skew-product path on the recorded grid.
#[derive(Debug, Clone)]
pub struct SkewProductPath {
    pub index: usize,
    pub rank: usize,
    pub n_pos: usize,
    pub dt: f64,
    pub stride: usize,
    /// Recorded times.
    pub times: Vec<f64>,
    /// Radial states (flat `records x rank`), in the closed chamber.
    pub radial_states: Vec<f64>,
    /// Full states `w_t x+_t` (flat `records x rank`).
    pub full_states: Vec<f64>,
    /// Weyl group element index at each recorded time.
    pub chamber: Vec<u32>,
    pub events: Vec<JumpEvent>,
    /// `int min(rate, cap) ds` per positive root (count compensator).
    pub rate_int: Vec<f64>,
    /// Running sum of jump amplitudes `|Delta X|`.
    pub amplitude_sum: f64,
    pub terminal_w: usize,
    /// Steps on which at least one raw rate exceeded the cap.
    pub rate_capped_steps: usize,
    pub decomposition: Option<DecompositionRecord>,
}

impl SkewProductPath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn radial_state(&self, i: usize) -> &[f64] {
        &self.radial_states[i * self.rank..(i + 1) * self.rank]
    }

    pub fn full_state(&self, i: usize) -> &[f64] {
        &self.full_states[i * self.rank..(i + 1) * self.rank]
    }

    pub fn terminal_full(&self) -> &[f64] {
        self.full_state(self.len() - 1)
    }

    pub fn terminal_radial(&self) -> &[f64] {
        self.radial_state(self.len() - 1)
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn last_event_time(&self) -> Option<f64> {
        self.events.last().map(|e| e.time)
    }
}

/// A batch of skew-product paths.
#[derive(Debug)]
pub struct SkewBatch {
    pub paths: Vec<SkewProductPath>,
    pub dt: f64,
    pub steps: usize,
    pub stride: usize,
    pub warnings: Vec<String>,
}

impl SkewBatch {
    pub fn horizon(&self) -> f64 {
        self.steps as f64 * self.dt
    }
}

/// Simulates the full jump process as radial path plus chamber jump chain.
pub fn simulate_skew_product(
    sys: &RootSystem,
    config: &SkewConfig,
) -> Result<SkewBatch, JumpError> {
    if config.kind == SkewKind::F0Complex && !sys.is_complex_case() {
        return Err(JumpError::NotComplexCase);
    }
    let mut sim = config.sim.clone();
    sim.kind = config.kind.radial();
    let rc = sim.resolve(sys)?;
    let sqrt_dt = sim.dt.sqrt();
    let paths: Result<Vec<SkewProductPath>, JumpError> = (0..sim.paths)
        .into_par_iter()
        .map(|i| run_skew_path(sys, config, &sim, &rc, i, sqrt_dt))
        .collect();
    Ok(SkewBatch {
        paths: paths?,
        dt: sim.dt,
        steps: rc.steps,
        stride: rc.stride,
        warnings: rc.warnings,
    })
}

fn run_skew_path(
    sys: &RootSystem,
    config: &SkewConfig,
    sim: &SimConfig,
    rc: &crate::sde::Resolved,
    index: usize,
    sqrt_dt: f64,
) -> Result<SkewProductPath, JumpError> {
    let n = sys.rank();
    let n_pos = sys.num_positive();
    let group = sys.weyl();
    let dt = sim.dt;
    let records = rc.steps / rc.stride + 1 + usize::from(rc.steps % rc.stride != 0);

    let mut noise_rng = derive_stream(sim.master_seed, STREAM_NOISE, index as u64);
    let mut jump_rng = derive_stream(sim.master_seed, STREAM_JUMP, index as u64);

    let mut radial = sim.start.clone();
    let mut w: usize = WeylGroup::IDENTITY;
    let mut full = vec![0.0; n];
    let mut dw = vec![0.0; n];
    let mut drift = vec![0.0; n];
    let mut rates = vec![0.0; n_pos];

    let mut times = Vec::with_capacity(records);
    let mut radial_states = Vec::with_capacity(records * n);
    let mut full_states = Vec::with_capacity(records * n);
    let mut chamber = Vec::with_capacity(records);
    let mut events: Vec<JumpEvent> = Vec::new();
    let mut rate_int = vec![0.0; n_pos];
    let mut amplitude_sum = 0.0;
    let mut rate_capped_steps = 0usize;

    let track = config.track_decomposition;
    let mut jump_sum = vec![0.0; n_pos];
    let mut jump_sq_sum = vec![0.0; n_pos];
    let mut compensator = vec![0.0; n_pos];
    let mut bracket = vec![0.0; n_pos];
    let mut a_acc = vec![0.0; n];
    let mut beta_full = vec![0.0; n];
    let mut rotated = vec![0.0; n];
    let mut dec = track.then(|| DecompositionRecord {
        jump_sum: Vec::with_capacity(records * n_pos),
        jump_sq_sum: Vec::with_capacity(records * n_pos),
        compensator: Vec::with_capacity(records * n_pos),
        bracket: Vec::with_capacity(records * n_pos),
        a_path: Vec::with_capacity(records * n),
        beta_full: Vec::with_capacity(records * n),
    });

    geom::mat_vec(&group.element(w).matrix, &radial, &mut full);
    times.push(0.0);
    radial_states.extend_from_slice(&radial);
    full_states.extend_from_slice(&full);
    chamber.push(w as u32);
    if let Some(d) = dec.as_mut() {
        d.jump_sum.extend_from_slice(&jump_sum);
        d.jump_sq_sum.extend_from_slice(&jump_sq_sum);
        d.compensator.extend_from_slice(&compensator);
        d.bracket.extend_from_slice(&bracket);
        d.a_path.extend_from_slice(&a_acc);
        d.beta_full.extend_from_slice(&beta_full);
    }

    for k in 0..rc.steps {
        // rates frozen at the step's left endpoint, evaluated at the full state
        let mut any_capped = false;
        for (a, root) in sys.positive_roots().enumerate() {
            let p = geom::dot(&root.vector, &full);
            let raw =
                config.kind.rate_from_pairing(root, p, config.wall_eps) * config.jump_rate_scale;
            let capped = raw.min(config.rate_cap);
            any_capped |= raw > config.rate_cap;
            rates[a] = capped;
            rate_int[a] += capped * dt;
            if track {
                let covee = 2.0 * p / root.norm_sq; // (a_vee, X)
                compensator[a] += capped * covee * dt;
                bracket[a] += capped * covee * covee * dt;
                geom::axpy(
                    0.5 * root.multiplicity * fields::full_drift_scalar(0.5 * p) * dt,
                    &root.vector,
                    &mut a_acc,
                );
            }
        }
        if any_capped {
            rate_capped_steps += 1;
        }

        // exponential race among fired candidates
        let mut winner: Option<(usize, f64)> = None;
        for (a, &rate) in rates.iter().enumerate() {
            if rate <= 0.0 {
                continue;
            }
            let u: f64 = jump_rng.gen();
            if u < -(-rate * dt).exp_m1() {
                let tau = -(1.0 - u).ln() / rate;
                if winner.map_or(true, |(_, best)| tau < best) {
                    winner = Some((a, tau));
                }
            }
        }

        // radial advance with the shared per-path noise stream
        for d in dw.iter_mut() {
            *d = sqrt_dt * noise_rng.sample::<f64, _>(StandardNormal);
        }
        if track {
            geom::mat_vec(&group.element(w).matrix, &dw, &mut rotated);
            geom::axpy(1.0, &rotated, &mut beta_full);
        }
        crate::sde::step(
            sys,
            sim.kind,
            &mut radial,
            &dw,
            dt,
            rc.floor,
            sim.drift_cap,
            &mut drift,
        );
        if !geom::all_finite(&radial) {
            return Err(SimError::NonFiniteState {
                path: index,
                step: k,
            }
            .into());
        }
        geom::mat_vec(&group.element(w).matrix, &radial, &mut full);

        // apply the winning reflection at the post-advance grid point
        if let Some((a, _)) = winner {
            let root = sys.positive_root(a);
            let pre = full.clone();
            let covee = geom::dot(&root.coroot, &pre);
            let post = root.reflect(&pre);
            w = group.compose(group.reflection(a), w);
            amplitude_sum += covee.abs() * root.norm_sq.sqrt();
            if track {
                jump_sum[a] -= covee;
                jump_sq_sum[a] += covee * covee;
            }
            events.push(JumpEvent {
                time: (k + 1) as f64 * dt,
                root: a,
                pre,
                post: post.clone(),
            });
            full = post;
        }

        if (k + 1) % rc.stride == 0 || k + 1 == rc.steps {
            times.push((k + 1) as f64 * dt);
            radial_states.extend_from_slice(&radial);
            full_states.extend_from_slice(&full);
            chamber.push(w as u32);
            if let Some(d) = dec.as_mut() {
                d.jump_sum.extend_from_slice(&jump_sum);
                d.jump_sq_sum.extend_from_slice(&jump_sq_sum);
                d.compensator.extend_from_slice(&compensator);
                d.bracket.extend_from_slice(&bracket);
                d.a_path.extend_from_slice(&a_acc);
                d.beta_full.extend_from_slice(&beta_full);
            }
        }
    }

    Ok(SkewProductPath {
        index,
        rank: n,
        n_pos,
        dt,
        stride: rc.stride,
        times,
        radial_states,
        full_states,
        chamber,
        events,
        rate_int,
        amplitude_sum,
        terminal_w: w,
        rate_capped_steps,
        decomposition: dec,
    })
}

/// The martingale decomposition of one path on its recorded grid.
#[derive(Debug, Clone)]
pub struct MartingaleDecomposition {
    pub times: Vec<f64>,
    /// `M^a_t = jump sum + compensator` per root (flat `records x n_pos`).
    pub m: Vec<f64>,
    pub compensator: Vec<f64>,
    pub bracket: Vec<f64>,
    pub jump_sq_sum: Vec<f64>,
    /// Finite-variation part per coordinate (flat `records x rank`).
    pub a_path: Vec<f64>,
    /// Terminal gap `X_T - X_0 - beta'_T - sum_a M^a_T a - A_T`, a scheme
    /// consistency diagnostic.
    pub residual: Vec<f64>,
}

/// Assembles `M^a`, brackets and the reconstruction residual from a tracked
/// path.
pub fn compute_malpha(
    sys: &RootSystem,
    path: &SkewProductPath,
) -> Result<MartingaleDecomposition, JumpError> {
    let dec = path
        .decomposition
        .as_ref()
        .ok_or(JumpError::MissingDecomposition)?;
    let n_pos = path.n_pos;
    let records = path.len();
    let mut m = vec![0.0; records * n_pos];
    for r in 0..records {
        for a in 0..n_pos {
            let i = r * n_pos + a;
            m[i] = dec.jump_sum[i] + dec.compensator[i];
        }
    }
    let last = records - 1;
    let mut residual = path.terminal_full().to_vec();
    for i in 0..path.rank {
        residual[i] -= path.full_state(0)[i];
        residual[i] -= dec.beta_full[last * path.rank + i];
        residual[i] -= dec.a_path[last * path.rank + i];
    }
    for (a, root) in sys.positive_roots().enumerate() {
        geom::axpy(-m[last * n_pos + a], &root.vector, &mut residual);
    }
    Ok(MartingaleDecomposition {
        times: path.times.clone(),
        m,
        compensator: dec.compensator.clone(),
        bracket: dec.bracket.clone(),
        jump_sq_sum: dec.jump_sq_sum.clone(),
        a_path: dec.a_path.clone(),
        residual,
    })
}

/// Aggregate jump statistics over a batch of paths.
#[derive(Debug, Clone, serde::Serialize)]
pub struct JumpStats {
    pub paths: usize,
    pub mean_events: f64,
    pub median_events: u64,
    pub max_events: u64,
    pub mean_amplitude_sum: f64,
    /// Mean event count per positive root.
    pub per_root_mean_events: Vec<f64>,
    /// Mean `int min(rate, cap) ds` per root, the compensating intensity.
    pub per_root_mean_rate_int: Vec<f64>,
    /// Mean event count up to each quarter of the horizon (a nondecreasing
    /// `N_t` profile).
    pub mean_events_at: Vec<(f64, f64)>,
    /// Fraction of paths with an event in the trailing 10% of the horizon
    /// (their chamber element is flagged unreliable as a limit proxy).
    pub late_event_fraction: f64,
    /// Histogram of the terminal chamber element over the Weyl group, in
    /// group enumeration order. Suppressed when the effective multiplicity
    /// dips below 1/2 and the eventual-jump-freeze guarantee is void.
    pub w_inf_counts: Option<Vec<u64>>,
    pub rate_capped_path_fraction: f64,
}

/// Summarizes counts, amplitudes and terminal chamber elements.
pub fn jump_statistics(sys: &RootSystem, paths: &[SkewProductPath]) -> JumpStats {
    assert!(!paths.is_empty(), "need at least one path");
    let n_pos = sys.num_positive();
    let horizon = paths[0].horizon();
    let mut counts: Vec<u64> = paths.iter().map(|p| p.events.len() as u64).collect();
    counts.sort_unstable();
    let mean_events = counts.iter().sum::<u64>() as f64 / paths.len() as f64;
    let mut per_root_mean_events = vec![0.0; n_pos];
    let mut per_root_mean_rate_int = vec![0.0; n_pos];
    let mut late = 0usize;
    let mut capped = 0usize;
    let mut w_counts = vec![0u64; sys.weyl().order()];
    for p in paths {
        for e in &p.events {
            per_root_mean_events[e.root] += 1.0;
        }
        for a in 0..n_pos {
            per_root_mean_rate_int[a] += p.rate_int[a];
        }
        if p.last_event_time().is_some_and(|t| t > 0.9 * horizon) {
            late += 1;
        }
        if p.rate_capped_steps > 0 {
            capped += 1;
        }
        w_counts[p.terminal_w] += 1;
    }
    let nf = paths.len() as f64;
    for v in per_root_mean_events.iter_mut() {
        *v /= nf;
    }
    for v in per_root_mean_rate_int.iter_mut() {
        *v /= nf;
    }
    let mean_events_at = (1..=4)
        .map(|q| {
            let t = horizon * q as f64 / 4.0;
            let mean = paths
                .iter()
                .map(|p| p.events.iter().filter(|e| e.time <= t + 1e-12).count())
                .sum::<usize>() as f64
                / nf;
            (t, mean)
        })
        .collect();
    let w_inf_counts = (sys.min_effective_multiplicity() >= 0.5).then_some(w_counts);
    JumpStats {
        paths: paths.len(),
        mean_events,
        median_events: counts[counts.len() / 2],
        max_events: *counts.last().unwrap(),
        mean_amplitude_sum: paths.iter().map(|p| p.amplitude_sum).sum::<f64>() / nf,
        per_root_mean_events,
        per_root_mean_rate_int,
        mean_events_at,
        late_event_fraction: late as f64 / nf,
        w_inf_counts,
        rate_capped_path_fraction: capped as f64 / nf,
    }
}
