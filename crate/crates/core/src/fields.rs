//! Drift vector fields and jump-rate functions of the process generators.
//!
//! All fields are sums over positive roots of scalar functions of the pairing
//! `p = (a, x)`. The scalar kernels are evaluated through `exp_m1` based
//! forms so that they neither overflow deep in the chamber nor lose precision
//! near the walls:
//!
//! * `coth(p/2) = 1 + 2 / (e^p - 1)` (hyperbolic drift),
//! * `1 / sinh^2(p/2) = 4 e^{-p} / (1 - e^{-p})^2` (jump rates; underflows to
//!   an exact 0 once `p` exceeds ~1420),
//! * `coth(u) - 1/u` switches to a five-term odd Taylor expansion below
//!   `|u| = 1e-2` (change-of-measure integrand; the subtraction would lose
//!   all precision near 0).
//!
//! Strict evaluators reject wall contact; the integrators clamp pairings at a
//! configured floor instead (see `sde`).

use thiserror::Error;

use crate::geom;
use crate::roots::RootSystem;

/// Face rule cutoff: a root contributes zero jump rate when `|(a, x)|` falls
/// below this value, matching the kernel's exclusion of roots vanishing on
/// the face containing `x`.
pub const DEFAULT_WALL_EPS: f64 = 1e-12;

/// Switch radius between the direct and series branches of `coth(u) - 1/u`.
pub const GIRSANOV_SERIES_RADIUS: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("wall contact: positive root {root} has pairing {pairing:e} at the query point")]
    WallContact { root: usize, pairing: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

// ------------------------------------------------------------------ scalars

/// `coth(p / 2)` for `p > 0`.
#[inline]
pub fn coth_half(p: f64) -> f64 {
    if p >= 40.0 {
        // 2 / expm1(40) < eps / 2: the sum rounds to exactly 1
        return 1.0;
    }
    1.0 + 2.0 / p.exp_m1()
}

/// `coth(p / 2) - 1` for `p > 0`; decays like `2 e^{-p}`.
#[inline]
pub fn coth_half_m1(p: f64) -> f64 {
    2.0 / p.exp_m1()
}

/// `1 / sinh^2(p / 2)` for `p > 0`, from a single exponential.
#[inline]
pub fn inv_sinh_sq_half(p: f64) -> f64 {
    if p < 1e-5 {
        // 1 - e^{-p} cancels below this; exp_m1 keeps full precision
        let one_m_emp = -(-p).exp_m1();
        return 4.0 * (-p).exp() / (one_m_emp * one_m_emp);
    }
    let em = (-p).exp();
    let one_m = 1.0 - em;
    4.0 * em / (one_m * one_m)
}

/// `u / sinh^2(u) - 1/u`, extended oddly through 0; the other bounded
/// combination appearing in the finite-variation drift of the full process.
#[inline]
pub fn u_csch_sq_minus_inv(u: f64) -> f64 {
    let a = u.abs();
    let v = if a < GIRSANOV_SERIES_RADIUS {
        let u2 = a * a;
        a * (-1.0 / 3.0 + u2 * (1.0 / 15.0 + u2 * (-2.0 / 189.0 + u2 * (1.0 / 675.0))))
    } else {
        a * inv_sinh_sq_half(2.0 * a) - 1.0 / a
    };
    if u < 0.0 {
        -v
    } else {
        v
    }
}

/// `coth(u) - u / sinh^2(u)`: the per-root scalar of the finite-variation
/// part of the full jump process. Smooth and odd with slope 2/3 at the
/// origin (the drift and jump-compensator singularities cancel there),
/// bounded by 1.
#[inline]
pub fn full_drift_scalar(u: f64) -> f64 {
    coth_minus_inv(u) - u_csch_sq_minus_inv(u)
}

/// `coth(u) - 1/u`, extended oddly through the removable singularity at 0.
///
/// Bounded by 1 in absolute value and increasing on `(0, inf)`.
#[inline]
pub fn coth_minus_inv(u: f64) -> f64 {
    let a = u.abs();
    let v = if a < GIRSANOV_SERIES_RADIUS {
        let u2 = a * a;
        a * (1.0 / 3.0
            + u2 * (-1.0 / 45.0 + u2 * (2.0 / 945.0 + u2 * (-1.0 / 4725.0 + u2 * (2.0 / 93555.0)))))
    } else {
        1.0 + 2.0 / (2.0 * a).exp_m1() - 1.0 / a
    };
    if u < 0.0 {
        -v
    } else {
        v
    }
}

// ------------------------------------------------------------------- drifts

fn check_dim(sys: &RootSystem, x: &[f64]) -> Result<(), FieldError> {
    if x.len() != sys.rank() {
        return Err(FieldError::DimensionMismatch {
            expected: sys.rank(),
            got: x.len(),
        });
    }
    Ok(())
}

fn strict_pairings(sys: &RootSystem, x: &[f64]) -> Result<(), FieldError> {
    for (i, r) in sys.positive_roots().enumerate() {
        let p = geom::dot(&r.vector, x);
        if p <= 0.0 {
            return Err(FieldError::WallContact {
                root: i,
                pairing: p,
            });
        }
    }
    Ok(())
}

/// Hyperbolic radial drift `sum_a k_a (a/2) coth((a,x)/2)` on the chamber
/// interior. Converges to `rho` deep in the chamber.
pub fn ho_radial_drift(sys: &RootSystem, x: &[f64]) -> Result<Vec<f64>, FieldError> {
    check_dim(sys, x)?;
    strict_pairings(sys, x)?;
    Ok(ho_radial_drift_unchecked(sys, x))
}

/// Same sum evaluated with raw signed pairings (no chamber check). Odd in
/// each pairing, hence Weyl equivariant on regular points; infinite on walls.
pub fn ho_radial_drift_unchecked(sys: &RootSystem, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for r in sys.positive_roots() {
        let p = geom::dot(&r.vector, x);
        geom::axpy(0.5 * r.multiplicity * coth_half(p), &r.vector, &mut out);
    }
    out
}

/// Centered drift `sum_a k_a (a/2) [coth((a,x)/2) - 1]`; equals
/// `ho_radial_drift - rho` and decays exponentially along chamber rays.
pub fn ho_centered_drift(sys: &RootSystem, x: &[f64]) -> Result<Vec<f64>, FieldError> {
    check_dim(sys, x)?;
    strict_pairings(sys, x)?;
    let mut out = vec![0.0; x.len()];
    for r in sys.positive_roots() {
        let p = geom::dot(&r.vector, x);
        geom::axpy(0.5 * r.multiplicity * coth_half_m1(p), &r.vector, &mut out);
    }
    Ok(out)
}

/// Rational radial drift `sum_a k_a a / (a,x)`; positively homogeneous of
/// degree -1.
pub fn dunkl_radial_drift(sys: &RootSystem, x: &[f64]) -> Result<Vec<f64>, FieldError> {
    check_dim(sys, x)?;
    strict_pairings(sys, x)?;
    Ok(dunkl_radial_drift_unchecked(sys, x))
}

pub fn dunkl_radial_drift_unchecked(sys: &RootSystem, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for r in sys.positive_roots() {
        let p = geom::dot(&r.vector, x);
        geom::axpy(r.multiplicity / p, &r.vector, &mut out);
    }
    out
}

/// Rational drift with all multiplicities forced to 1, the drift of the
/// intrinsic Brownian motion.
pub fn intrinsic_drift(sys: &RootSystem, x: &[f64]) -> Result<Vec<f64>, FieldError> {
    check_dim(sys, x)?;
    strict_pairings(sys, x)?;
    let mut out = vec![0.0; x.len()];
    for r in sys.positive_roots() {
        let p = geom::dot(&r.vector, x);
        geom::axpy(1.0 / p, &r.vector, &mut out);
    }
    Ok(out)
}

/// Change-of-measure integrand `sum_a k_a (a/2) [coth(u_a) - 1/u_a]` with
/// `u_a = (a,x)/2`: the difference between the hyperbolic drift and the
/// rational drift of the rescaled system, in a form that stays bounded.
///
/// Tends to 0 at the origin and to `rho` deep in the chamber.
pub fn girsanov_integrand(sys: &RootSystem, x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for r in sys.positive_roots() {
        let u = 0.5 * geom::dot(&r.vector, x);
        geom::axpy(
            0.5 * r.multiplicity * coth_minus_inv(u),
            &r.vector,
            &mut out,
        );
    }
    out
}

/// Uniform bound for [`girsanov_integrand`]: `sum_a k_a |a| / 2` times the
/// supremum (= 1) of `|coth u - 1/u|`.
pub fn girsanov_bound(sys: &RootSystem) -> f64 {
    sys.positive_roots()
        .map(|r| 0.5 * r.multiplicity * r.norm_sq.sqrt())
        .sum()
}

// -------------------------------------------------------------------- rates

/// Jump rate of the hyperbolic process across the hyperplane of positive root
/// `idx`: `k_a |a|^2 / (8 sinh^2((a,x)/2))`, zero on the root's own face.
pub fn ho_jump_rate(sys: &RootSystem, idx: usize, x: &[f64]) -> f64 {
    ho_jump_rate_with(sys, idx, x, DEFAULT_WALL_EPS)
}

pub fn ho_jump_rate_with(sys: &RootSystem, idx: usize, x: &[f64], wall_eps: f64) -> f64 {
    let r = sys.positive_root(idx);
    ho_jump_rate_from_pairing(r, geom::dot(&r.vector, x), wall_eps)
}

/// Same rate from a precomputed pairing, for callers that already hold it.
#[inline]
pub fn ho_jump_rate_from_pairing(root: &crate::roots::Root, pairing: f64, wall_eps: f64) -> f64 {
    let p = pairing.abs();
    if p < wall_eps {
        return 0.0;
    }
    root.multiplicity * root.norm_sq / 8.0 * inv_sinh_sq_half(p)
}

#[inline]
pub fn dunkl_jump_rate_from_pairing(root: &crate::roots::Root, pairing: f64, wall_eps: f64) -> f64 {
    let p = pairing.abs();
    if p < wall_eps {
        return 0.0;
    }
    root.multiplicity / (p * p)
}

/// Jump rate of the rational process: `k_a / (a,x)^2`, zero on the face.
pub fn dunkl_jump_rate(sys: &RootSystem, idx: usize, x: &[f64]) -> f64 {
    dunkl_jump_rate_with(sys, idx, x, DEFAULT_WALL_EPS)
}

pub fn dunkl_jump_rate_with(sys: &RootSystem, idx: usize, x: &[f64], wall_eps: f64) -> f64 {
    let r = sys.positive_root(idx);
    dunkl_jump_rate_from_pairing(r, geom::dot(&r.vector, x), wall_eps)
}

// --------------------------------------------------------- engine dispatch

/// Drift selection for the time-discretized integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum DriftKind {
    /// Hyperbolic `(k/2) coth(p/2)` terms.
    Hyperbolic,
    /// Rational `k / p` terms.
    Rational,
    /// Rational terms with multiplicities forced to 1.
    RationalUnitK,
    /// No drift (driftless folded Brownian motion, used as a reference).
    None,
}

/// Evaluates the selected drift into `out`, clamping each pairing from below
/// at `floor > 0` so the result is finite on the whole closed chamber.
pub fn drift_into(sys: &RootSystem, kind: DriftKind, x: &[f64], floor: f64, out: &mut [f64]) {
    debug_assert!(x.len() == sys.rank());
    let mut pairings = [0.0f64; 16];
    let n_pos = sys.num_positive();
    if n_pos <= pairings.len() {
        for (slot, r) in pairings.iter_mut().zip(sys.positive_roots()) {
            *slot = geom::dot(&r.vector, x);
        }
        drift_from_pairings(sys, kind, &pairings[..n_pos], floor, out);
    } else {
        let pairings: Vec<f64> = sys
            .positive_roots()
            .map(|r| geom::dot(&r.vector, x))
            .collect();
        drift_from_pairings(sys, kind, &pairings, floor, out);
    }
}

/// Drift evaluation from precomputed pairings `(a, x)` in positive-root
/// order; the engines compute the pairings once per step and share them
/// between the drift and the online functionals.
pub fn drift_from_pairings(
    sys: &RootSystem,
    kind: DriftKind,
    pairings: &[f64],
    floor: f64,
    out: &mut [f64],
) {
    out.fill(0.0);
    match kind {
        DriftKind::None => {}
        DriftKind::Hyperbolic => {
            for (r, &p) in sys.positive_roots().zip(pairings) {
                geom::axpy(
                    0.5 * r.multiplicity * coth_half(p.max(floor)),
                    &r.vector,
                    out,
                );
            }
        }
        DriftKind::Rational => {
            for (r, &p) in sys.positive_roots().zip(pairings) {
                geom::axpy(r.multiplicity / p.max(floor), &r.vector, out);
            }
        }
        DriftKind::RationalUnitK => {
            for (r, &p) in sys.positive_roots().zip(pairings) {
                geom::axpy(1.0 / p.max(floor), &r.vector, out);
            }
        }
    }
}
