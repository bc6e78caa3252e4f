//! Crystallographic root systems, Weyl groups and chamber geometry.
//!
//! A [`RootSystem`] bundles the full root list with multiplicities, the
//! positive/simple subsets, the weighted half-sum `rho`, and the fully
//! generated Weyl group. Construction validates the root-system axioms
//! (finiteness, spanning, closure under reflections, integral pairings) and
//! the Weyl invariance of the multiplicity function, and everything is
//! immutable afterwards, so a system can be shared read-only across
//! simulation workers.
//!
//! Conventions for the built-in families, with `e_i` the canonical basis:
//!
//! * `A_n`: realized in dimension `n` with all roots at squared length 2
//!   (simple roots are obtained from the Cholesky factor of the Cartan
//!   matrix); one multiplicity orbit.
//! * `B_n`: roots `±e_i ± e_j` (long) and `±e_i` (short); two orbits for
//!   `n >= 2`.
//! * `C_n`: roots `±e_i ± e_j` (short) and `±2 e_i` (long); two orbits for
//!   `n >= 2`.
//! * `D_n` (`n >= 2`): roots `±e_i ± e_j`; one orbit for `n >= 3`.
//! * `BC_n`: roots `±e_i ± e_j`, `±e_i`, `±2 e_i`; the non-reduced family.
//!   A doubled root `2a` is listed exactly when its multiplicity is positive,
//!   and all supplied multiplicities must be strictly positive.
//!
//! Multiplicities are supplied per Weyl orbit, ordered by increasing root
//! length (ties broken by the lexicographically smallest orbit member), e.g.
//! `B_2` takes `[k_short, k_long]` and `BC_1` takes `[k_single, k_double]`.
//!
//! Positive roots of custom systems are selected by pairing against a regular
//! vector of the form `(1, eps, eps^2, ...)`; the built-in families instead
//! fix the textbook positive sets above and store the `k = 1` half-sum as the
//! certifying regular vector.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::geom;

/// Tolerance for matching two roots as equal.
const ROOT_TOL: f64 = 1e-8;
/// Tolerance for the integrality of Cartan pairings.
const INT_TOL: f64 = 1e-8;
/// Tolerance for multiplicity equality inside an orbit.
const MULT_TOL: f64 = 1e-9;

/// Built-in family tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    BC,
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
            Family::BC => "BC",
            Family::Custom => "custom",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Family {
    type Err = RootSystemError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "BC" => Ok(Family::BC),
            other => Err(RootSystemError::UnknownFamily(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum RootSystemError {
    #[error("unknown family `{0}` (expected one of A, B, C, D, BC)")]
    UnknownFamily(String),
    #[error("rank {rank} is too small for family {family}")]
    RankTooSmall { family: Family, rank: usize },
    #[error("family {family} at rank {rank} has {expected} multiplicity orbit(s), got {got}")]
    WrongMultiplicityCount {
        family: Family,
        rank: usize,
        expected: usize,
        got: usize,
    },
    #[error("invalid root system: {0}")]
    Invalid(String),
    #[error("Weyl group closure exceeded the safety bound of {0} elements; input is likely not a valid finite system")]
    GroupTooLarge(usize),
    #[error("zero vector cannot define a reflection")]
    ZeroRoot,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("could not find a regular vector separating the candidate roots")]
    NoRegularVector,
}

/// Which rule a [`Violation`] names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// Axiom 1: empty set, zero root, non-finite entry, or failure to span.
    NotSpanning,
    ContainsZero,
    NonFinite,
    Empty,
    DuplicateRoot,
    /// Axiom 2: some reflection does not permute the set.
    NotClosed,
    /// Axiom 3: a Cartan pairing is not an integer.
    NotIntegral,
    /// The multiplicity function is not Weyl invariant or not positive.
    MultiplicityNotInvariant,
    NonPositiveMultiplicity,
}

/// A named axiom violation with the witnessing root indices.
#[derive(Debug, Clone)]
pub struct Violation {
    pub kind: ViolationKind,
    pub witness: Vec<usize>,
    pub message: String,
}

/// Outcome of [`validate_axioms`].
#[derive(Debug)]
pub enum AxiomCheck {
    Ok(SystemClassification),
    Violation(Violation),
}

/// Derived structure of a validated root list.
#[derive(Debug, Clone)]
pub struct SystemClassification {
    /// Orbit id per input root, ordered by (length, lex smallest member).
    pub orbit_of: Vec<usize>,
    pub orbit_count: usize,
    /// Whether all Cartan pairings are integral.
    pub crystallographic: bool,
    /// Whether no root has its double in the set.
    pub reduced: bool,
}

/// One root with its multiplicity and cached reflection data.
#[derive(Debug, Clone)]
pub struct Root {
    pub vector: Vec<f64>,
    /// `2 a / |a|^2`.
    pub coroot: Vec<f64>,
    pub norm_sq: f64,
    pub multiplicity: f64,
    pub orbit: usize,
}

impl Root {
    /// Reflection `r_a(x) = x - (a^vee, x) a` across the root hyperplane.
    pub fn reflect(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        self.reflect_in_place(&mut y);
        y
    }

    #[inline]
    pub fn reflect_in_place(&self, x: &mut [f64]) {
        let c = geom::dot(&self.coroot, x);
        geom::axpy(-c, &self.vector, x);
    }
}

/// Reflects `x` across the hyperplane orthogonal to `alpha`.
pub fn reflect_vector(alpha: &[f64], x: &[f64]) -> Result<Vec<f64>, RootSystemError> {
    let nsq = geom::norm_sq(alpha);
    if nsq <= 0.0 || !nsq.is_finite() {
        return Err(RootSystemError::ZeroRoot);
    }
    if alpha.len() != x.len() {
        return Err(RootSystemError::DimensionMismatch {
            expected: alpha.len(),
            got: x.len(),
        });
    }
    let c = 2.0 * geom::dot(alpha, x) / nsq;
    let mut y = x.to_vec();
    geom::axpy(-c, alpha, &mut y);
    Ok(y)
}

/// One Weyl group element: a reduced word in simple reflections (stored as
/// positive-root indices), the orthogonal matrix, and the induced permutation
/// of the root list.
#[derive(Debug, Clone)]
pub struct WeylElement {
    pub word: Vec<usize>,
    /// Row-major `n x n` orthogonal matrix.
    pub matrix: Vec<f64>,
    /// `perm[i]` is the root index of the image of root `i`.
    pub perm: Vec<u16>,
}

impl WeylElement {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        geom::mat_vec(&self.matrix, x, &mut y);
        y
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }
}

/// The full Weyl group, enumerated in (word length, lexicographic) order with
/// the identity first.
#[derive(Debug)]
pub struct WeylGroup {
    elements: Vec<WeylElement>,
    index_of_perm: HashMap<Vec<u16>, usize>,
    /// Group element index of `r_a` for each positive root `a`.
    reflection_of_positive: Vec<usize>,
}

impl WeylGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn element(&self, idx: usize) -> &WeylElement {
        &self.elements[idx]
    }

    pub const IDENTITY: usize = 0;

    /// Index of the reflection `r_a` for positive root `a`.
    pub fn reflection(&self, positive_idx: usize) -> usize {
        self.reflection_of_positive[positive_idx]
    }

    /// Index of the composition `w_a ∘ w_b` (apply `w_b` first).
    pub fn compose(&self, a: usize, b: usize) -> usize {
        let pa = &self.elements[a].perm;
        let pb = &self.elements[b].perm;
        let perm: Vec<u16> = (0..pb.len()).map(|i| pa[pb[i as usize] as usize]).collect();
        self.index_of_perm[&perm]
    }
}

/// `x = w * x_plus` with `x_plus` in the closed positive chamber.
///
/// Among all valid `w` the element with the shortest word is chosen, ties
/// broken lexicographically, so decompositions on chamber walls are
/// deterministic.
#[derive(Debug, Clone)]
pub struct ChamberDecomposition {
    pub x_plus: Vec<f64>,
    pub w_index: usize,
}

/// A validated root system with its generated Weyl group.
#[derive(Debug)]
pub struct RootSystem {
    rank: usize,
    roots: Vec<Root>,
    positive: Vec<usize>,
    /// Positions of the simple roots inside `positive`.
    simple: Vec<usize>,
    rho: Vec<f64>,
    family: Family,
    crystallographic: bool,
    reduced: bool,
    orbit_count: usize,
    regular_u: Vec<f64>,
    weyl: WeylGroup,
}

impl RootSystem {
    // ---------------------------------------------------------------- builders

    /// Builds one of the standard families at the given rank.
    ///
    /// `multiplicities` holds one strictly positive value per Weyl orbit in
    /// the documented order (increasing root length).
    pub fn standard(
        family: Family,
        rank: usize,
        multiplicities: &[f64],
    ) -> Result<Self, RootSystemError> {
        if rank == 0 {
            return Err(RootSystemError::RankTooSmall { family, rank });
        }
        let (positives, simple_positions) = match family {
            Family::A => a_family_positives(rank),
            Family::B => bcd_positives(rank, true, false),
            Family::C => bcd_positives(rank, false, true),
            Family::D => {
                if rank < 2 {
                    return Err(RootSystemError::RankTooSmall { family, rank });
                }
                bcd_positives(rank, false, false)
            }
            Family::BC => {
                let (mut pos, simple) = bcd_positives(rank, true, false);
                for i in 0..rank {
                    let mut v = vec![0.0; rank];
                    v[i] = 2.0;
                    pos.push(v);
                }
                (pos, simple)
            }
            Family::Custom => return Err(RootSystemError::UnknownFamily("custom".to_string())),
        };
        Self::from_positive_roots(
            family,
            rank,
            positives,
            simple_positions,
            multiplicities,
            true,
        )
    }

    /// Builds a system from an explicit full root list with per-root
    /// multiplicities. The positive subset is selected with a regular vector
    /// `(1, eps, eps^2, ...)` and simple roots are derived.
    pub fn custom(roots: &[(Vec<f64>, f64)]) -> Result<Self, RootSystemError> {
        let check = validate_axioms(roots);
        let class = match check {
            AxiomCheck::Ok(c) => c,
            AxiomCheck::Violation(v) => return Err(RootSystemError::Invalid(v.message)),
        };
        let rank = roots[0].0.len();
        let u = find_regular_vector(roots, rank)?;
        let mut pos_vectors: Vec<Vec<f64>> = Vec::new();
        let mut pos_mults: Vec<f64> = Vec::new();
        for (v, k) in roots {
            if geom::dot(v, &u) > 0.0 {
                pos_vectors.push(v.clone());
                pos_mults.push(*k);
            }
        }
        let simple_positions = derive_simple_positions(&pos_vectors);
        let _ = class;
        Self::assemble(
            Family::Custom,
            rank,
            pos_vectors,
            pos_mults,
            simple_positions,
            true,
        )
    }

    /// Rescales to the reduced system `{sqrt(2) a / |a| : a indivisible}` with
    /// merged multiplicities `k'_b = k_a + k_{2a}`.
    ///
    /// The result is reduced with every root at squared length 2; it need not
    /// satisfy the integrality axiom, which Dunkl systems do not require.
    /// Idempotent on systems that already have that shape.
    pub fn rescale_to_dunkl(&self) -> Self {
        let mut pos_vectors = Vec::new();
        let mut pos_mults = Vec::new();
        let mut new_index_of_positive = vec![usize::MAX; self.positive.len()];
        for (p, &ri) in self.positive.iter().enumerate() {
            let root = &self.roots[ri];
            let half: Vec<f64> = root.vector.iter().map(|x| x / 2.0).collect();
            if self.find_root(&half).is_some() {
                continue; // divisible: merged into its half
            }
            let double: Vec<f64> = root.vector.iter().map(|x| x * 2.0).collect();
            let k_double = self
                .find_root(&double)
                .map(|j| self.roots[j].multiplicity)
                .unwrap_or(0.0);
            let scale = (2.0 / root.norm_sq).sqrt();
            new_index_of_positive[p] = pos_vectors.len();
            pos_vectors.push(root.vector.iter().map(|x| x * scale).collect());
            pos_mults.push(root.multiplicity + k_double);
        }
        let simple_positions: Vec<usize> = self
            .simple
            .iter()
            .map(|&s| new_index_of_positive[s])
            .collect();
        debug_assert!(simple_positions.iter().all(|&s| s != usize::MAX));
        Self::assemble(
            self.family,
            self.rank,
            pos_vectors,
            pos_mults,
            simple_positions,
            false,
        )
        .expect("rescaling a valid system cannot fail")
    }

    fn from_positive_roots(
        family: Family,
        rank: usize,
        positives: Vec<Vec<f64>>,
        simple_positions: Vec<usize>,
        orbit_multiplicities: &[f64],
        require_integral: bool,
    ) -> Result<Self, RootSystemError> {
        // Assign per-orbit multiplicities after orbits are known; build with
        // placeholder k = 1 first.
        let placeholder = vec![1.0; positives.len()];
        let mut sys = Self::assemble(
            family,
            rank,
            positives,
            placeholder,
            simple_positions,
            require_integral,
        )?;
        if orbit_multiplicities.len() != sys.orbit_count {
            return Err(RootSystemError::WrongMultiplicityCount {
                family,
                rank,
                expected: sys.orbit_count,
                got: orbit_multiplicities.len(),
            });
        }
        if let Some(k) = orbit_multiplicities.iter().find(|k| !(**k > 0.0)) {
            return Err(RootSystemError::Invalid(format!(
                "multiplicities must be strictly positive, got {k}"
            )));
        }
        for root in &mut sys.roots {
            root.multiplicity = orbit_multiplicities[root.orbit];
        }
        sys.rho = sys.compute_rho();
        Ok(sys)
    }

    /// Shared assembly: mirrors the positives, validates, orders orbits,
    /// generates the Weyl group and computes `rho`.
    fn assemble(
        family: Family,
        rank: usize,
        pos_vectors: Vec<Vec<f64>>,
        pos_mults: Vec<f64>,
        simple_positions: Vec<usize>,
        require_integral: bool,
    ) -> Result<Self, RootSystemError> {
        let mut all: Vec<(Vec<f64>, f64)> = Vec::with_capacity(2 * pos_vectors.len());
        for (v, &k) in pos_vectors.iter().zip(&pos_mults) {
            all.push((v.clone(), k));
        }
        for (v, &k) in pos_vectors.iter().zip(&pos_mults) {
            all.push((v.iter().map(|x| -x).collect(), k));
        }
        let class = match classify(&all, require_integral) {
            Ok(c) => c,
            Err(v) => return Err(RootSystemError::Invalid(v.message)),
        };

        let roots: Vec<Root> = all
            .iter()
            .enumerate()
            .map(|(i, (v, k))| {
                let nsq = geom::norm_sq(v);
                Root {
                    coroot: v.iter().map(|x| 2.0 * x / nsq).collect(),
                    vector: v.clone(),
                    norm_sq: nsq,
                    multiplicity: *k,
                    orbit: class.orbit_of[i],
                }
            })
            .collect();
        let positive: Vec<usize> = (0..pos_vectors.len()).collect();

        let mut sys = RootSystem {
            rank,
            roots,
            positive,
            simple: simple_positions,
            rho: vec![0.0; rank],
            family,
            crystallographic: class.crystallographic,
            reduced: class.reduced,
            orbit_count: class.orbit_count,
            regular_u: vec![0.0; rank],
            weyl: WeylGroup {
                elements: Vec::new(),
                index_of_perm: HashMap::new(),
                reflection_of_positive: Vec::new(),
            },
        };
        sys.rho = sys.compute_rho();
        // k = 1 half-sum, a chamber-interior regular vector certifying the
        // positive subset.
        let mut u = vec![0.0; rank];
        for &p in &sys.positive {
            geom::axpy(0.5, &sys.roots[p].vector, &mut u);
        }
        sys.regular_u = u;
        for &p in &sys.positive {
            if geom::dot(&sys.roots[p].vector, &sys.regular_u) <= 0.0 {
                return Err(RootSystemError::Invalid(
                    "declared positive set is not consistent (half-sum is not regular dominant)"
                        .to_string(),
                ));
            }
        }
        sys.weyl = sys.generate_weyl(DEFAULT_GROUP_BOUND)?;
        Ok(sys)
    }

    fn compute_rho(&self) -> Vec<f64> {
        let mut rho = vec![0.0; self.rank];
        for &p in &self.positive {
            let r = &self.roots[p];
            geom::axpy(0.5 * r.multiplicity, &r.vector, &mut rho);
        }
        rho
    }

    // ---------------------------------------------------------------- accessors

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// All roots; the positive roots occupy the leading indices.
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn num_positive(&self) -> usize {
        self.positive.len()
    }

    pub fn positive_roots(&self) -> impl Iterator<Item = &Root> {
        self.positive.iter().map(|&i| &self.roots[i])
    }

    pub fn positive_root(&self, idx: usize) -> &Root {
        &self.roots[self.positive[idx]]
    }

    /// Positions of the simple roots inside the positive list.
    pub fn simple_positions(&self) -> &[usize] {
        &self.simple
    }

    /// Weighted half-sum of positive roots.
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// The stored regular vector certifying the positive subset.
    pub fn regular_vector(&self) -> &[f64] {
        &self.regular_u
    }

    pub fn is_crystallographic(&self) -> bool {
        self.crystallographic
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit_count
    }

    /// Smallest effective multiplicity `k_a + k_{2a}` over indivisible
    /// positive roots. Wall avoidance of the processes requires this to be at
    /// least 1/2.
    pub fn min_effective_multiplicity(&self) -> f64 {
        let mut min = f64::INFINITY;
        for &ri in &self.positive {
            let root = &self.roots[ri];
            let half: Vec<f64> = root.vector.iter().map(|x| x / 2.0).collect();
            if self.find_root(&half).is_some() {
                continue;
            }
            let double: Vec<f64> = root.vector.iter().map(|x| x * 2.0).collect();
            let k2 = self
                .find_root(&double)
                .map(|j| self.roots[j].multiplicity)
                .unwrap_or(0.0);
            min = min.min(root.multiplicity + k2);
        }
        min
    }

    /// True when the system is reduced with all multiplicities equal to 1,
    /// the regime where the radial F0 dynamics has a closed form.
    pub fn is_complex_case(&self) -> bool {
        self.reduced
            && self
                .positive_roots()
                .all(|r| (r.multiplicity - 1.0).abs() <= MULT_TOL)
    }

    pub fn weyl(&self) -> &WeylGroup {
        &self.weyl
    }

    /// Index of a root equal to `v` within tolerance.
    pub fn find_root(&self, v: &[f64]) -> Option<usize> {
        self.roots
            .iter()
            .position(|r| geom::approx_eq(&r.vector, v, ROOT_TOL))
    }

    /// Smallest pairing of `x` against the positive roots.
    pub fn min_positive_pairing(&self, x: &[f64]) -> f64 {
        self.positive_roots()
            .map(|r| geom::dot(&r.vector, x))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when `(a, x) >= -tol` for every positive root.
    pub fn in_closed_chamber(&self, x: &[f64], tol: f64) -> bool {
        self.min_positive_pairing(x) >= -tol
    }

    // ---------------------------------------------------------------- geometry

    /// Folds `x` into the closed positive chamber in place by simple-root
    /// descent; returns the number of reflections applied.
    pub fn fold_in_place(&self, x: &mut [f64]) -> usize {
        let limit = 32 * (self.positive.len() + 1);
        let mut count = 0;
        'outer: for _ in 0..limit {
            for &s in &self.simple {
                let root = &self.roots[self.positive[s]];
                if geom::dot(&root.vector, x) < 0.0 {
                    root.reflect_in_place(x);
                    count += 1;
                    continue 'outer;
                }
            }
            return count;
        }
        // Numerically pathological input: fall back to the best group image.
        let y = x.to_vec();
        let mut best = y.clone();
        let mut best_min = f64::NEG_INFINITY;
        for w in self.weyl.elements() {
            let img = w.apply(&y);
            let m = self.min_positive_pairing(&img);
            if m > best_min {
                best_min = m;
                best = img;
            }
        }
        x.copy_from_slice(&best);
        count
    }

    /// The unique chamber representative of `x`.
    pub fn fold(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        self.fold_in_place(&mut y);
        y
    }

    /// Decomposes `x = w * x_plus` with `x_plus` in the closed chamber and the
    /// canonical (shortest word, then lexicographic) `w`.
    pub fn radial_decompose(&self, x: &[f64]) -> ChamberDecomposition {
        let x_plus = self.fold(x);
        let tol = 1e-9 * (1.0 + geom::norm(x));
        for (i, w) in self.weyl.elements().iter().enumerate() {
            if geom::approx_eq(&w.apply(&x_plus), x, tol) {
                return ChamberDecomposition { x_plus, w_index: i };
            }
        }
        // Unreachable for finite inputs; keep a defined result.
        ChamberDecomposition { x_plus, w_index: 0 }
    }

    // ---------------------------------------------------------------- weyl

    fn generate_weyl(&self, bound: usize) -> Result<WeylGroup, RootSystemError> {
        let n = self.rank;
        let nroots = self.roots.len();
        // Permutation and matrix of each simple reflection.
        let mut gen_perms: Vec<Vec<u16>> = Vec::new();
        let mut gen_mats: Vec<Vec<f64>> = Vec::new();
        for &s in &self.simple {
            let root = &self.roots[self.positive[s]];
            let mut perm = vec![0u16; nroots];
            for (i, r) in self.roots.iter().enumerate() {
                let img = root.reflect(&r.vector);
                let j = self.find_root(&img).ok_or_else(|| {
                    RootSystemError::Invalid("a reflection image leaves the root set".to_string())
                })?;
                perm[i] = j as u16;
            }
            gen_perms.push(perm);
            let mut m = geom::identity(n);
            for row in 0..n {
                let c = root.coroot[row];
                for col in 0..n {
                    m[col * n + row] -= root.vector[col] * c;
                }
            }
            gen_mats.push(m);
        }

        let identity_perm: Vec<u16> = (0..nroots as u16).collect();
        let mut elements = vec![WeylElement {
            word: Vec::new(),
            matrix: geom::identity(n),
            perm: identity_perm.clone(),
        }];
        let mut index_of_perm = HashMap::new();
        index_of_perm.insert(identity_perm, 0usize);

        let mut cursor = 0;
        while cursor < elements.len() {
            for (gi, &s) in self.simple.iter().enumerate() {
                // Right-composition w ∘ r_s keeps BFS words reduced and in
                // (length, lex) order.
                let perm: Vec<u16> = (0..elements[cursor].perm.len())
                    .map(|i| elements[cursor].perm[gen_perms[gi][i] as usize])
                    .collect();
                if !index_of_perm.contains_key(&perm) {
                    if elements.len() >= bound {
                        return Err(RootSystemError::GroupTooLarge(bound));
                    }
                    let matrix = geom::mat_mul(&elements[cursor].matrix, &gen_mats[gi], n);
                    let mut word = elements[cursor].word.clone();
                    word.push(s);
                    index_of_perm.insert(perm.clone(), elements.len());
                    elements.push(WeylElement { word, matrix, perm });
                }
            }
            cursor += 1;
        }

        // Locate r_a inside the group for every positive root.
        let mut reflection_of_positive = Vec::with_capacity(self.positive.len());
        for &p in &self.positive {
            let root = &self.roots[p];
            let mut perm = vec![0u16; nroots];
            for (i, r) in self.roots.iter().enumerate() {
                let img = root.reflect(&r.vector);
                let j = self.find_root(&img).ok_or_else(|| {
                    RootSystemError::Invalid("a reflection image leaves the root set".to_string())
                })?;
                perm[i] = j as u16;
            }
            let idx = *index_of_perm.get(&perm).ok_or_else(|| {
                RootSystemError::Invalid(
                    "reflection not contained in the generated group".to_string(),
                )
            })?;
            reflection_of_positive.push(idx);
        }

        Ok(WeylGroup {
            elements,
            index_of_perm,
            reflection_of_positive,
        })
    }
}

const DEFAULT_GROUP_BOUND: usize = 65_536;

// -------------------------------------------------------------------- checks

/// Checks the root-system axioms and the Weyl invariance of the multiplicity
/// function on a candidate root list. Violations are reported as values, with
/// the first failing axiom named together with a witness.
pub fn validate_axioms(roots: &[(Vec<f64>, f64)]) -> AxiomCheck {
    match classify(roots, true) {
        Ok(c) => AxiomCheck::Ok(c),
        Err(v) => AxiomCheck::Violation(v),
    }
}

fn classify(
    roots: &[(Vec<f64>, f64)],
    require_integral: bool,
) -> Result<SystemClassification, Violation> {
    if roots.is_empty() {
        return Err(Violation {
            kind: ViolationKind::Empty,
            witness: vec![],
            message: "axiom 1 violated: the root set is empty".to_string(),
        });
    }
    let n = roots[0].0.len();
    for (i, (v, _)) in roots.iter().enumerate() {
        if v.len() != n {
            return Err(Violation {
                kind: ViolationKind::NonFinite,
                witness: vec![i],
                message: format!("root {i} has dimension {} instead of {n}", v.len()),
            });
        }
        if !geom::all_finite(v) {
            return Err(Violation {
                kind: ViolationKind::NonFinite,
                witness: vec![i],
                message: format!("axiom 1 violated: root {i} has a non-finite entry"),
            });
        }
        if geom::norm(v) <= ROOT_TOL {
            return Err(Violation {
                kind: ViolationKind::ContainsZero,
                witness: vec![i],
                message: format!("axiom 1 violated: root {i} is the zero vector"),
            });
        }
    }
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            if geom::approx_eq(&roots[i].0, &roots[j].0, ROOT_TOL) {
                return Err(Violation {
                    kind: ViolationKind::DuplicateRoot,
                    witness: vec![i, j],
                    message: format!("roots {i} and {j} coincide"),
                });
            }
        }
    }
    let vectors: Vec<Vec<f64>> = roots.iter().map(|(v, _)| v.clone()).collect();
    if geom::span_rank(&vectors, n) < n {
        return Err(Violation {
            kind: ViolationKind::NotSpanning,
            witness: vec![],
            message: format!("axiom 1 violated: the roots do not span dimension {n}"),
        });
    }

    let find = |v: &[f64]| vectors.iter().position(|r| geom::approx_eq(r, v, ROOT_TOL));

    // Axiom 2 closure, recording the reflection permutations for the orbit
    // computation below.
    let mut perms: Vec<Vec<usize>> = Vec::with_capacity(roots.len());
    for (i, (alpha, _)) in roots.iter().enumerate() {
        let nsq = geom::norm_sq(alpha);
        let mut perm = Vec::with_capacity(roots.len());
        for (j, (beta, _)) in roots.iter().enumerate() {
            let c = 2.0 * geom::dot(alpha, beta) / nsq;
            let mut img = beta.clone();
            geom::axpy(-c, alpha, &mut img);
            match find(&img) {
                Some(t) => perm.push(t),
                None => {
                    return Err(Violation {
                        kind: ViolationKind::NotClosed,
                        witness: vec![i, j],
                        message: format!("axiom 2 violated: r_{i} maps root {j} outside the set"),
                    })
                }
            }
        }
        perms.push(perm);
    }

    // Axiom 3 integrality.
    let mut crystallographic = true;
    for (i, (alpha, _)) in roots.iter().enumerate() {
        let nsq = geom::norm_sq(alpha);
        for (j, (beta, _)) in roots.iter().enumerate() {
            let pairing = 2.0 * geom::dot(alpha, beta) / nsq;
            if (pairing - pairing.round()).abs() > INT_TOL {
                if require_integral {
                    return Err(Violation {
                        kind: ViolationKind::NotIntegral,
                        witness: vec![i, j],
                        message: format!(
                            "axiom 3 violated: pairing (a{i}^vee, a{j}) = {pairing} is not an integer"
                        ),
                    });
                }
                crystallographic = false;
            }
        }
    }

    // Orbits: union-find over all reflection permutations.
    let mut parent: Vec<usize> = (0..roots.len()).collect();
    fn root_of(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for perm in &perms {
        for (j, &t) in perm.iter().enumerate() {
            let (a, b) = (root_of(&mut parent, j), root_of(&mut parent, t));
            if a != b {
                parent[a] = b;
            }
        }
    }
    let mut reps: Vec<usize> = Vec::new();
    let mut orbit_raw = vec![0usize; roots.len()];
    for i in 0..roots.len() {
        let r = root_of(&mut parent, i);
        let id = match reps.iter().position(|&x| x == r) {
            Some(p) => p,
            None => {
                reps.push(r);
                reps.len() - 1
            }
        };
        orbit_raw[i] = id;
    }
    // Deterministic orbit order: increasing length, then the lexicographically
    // smallest member.
    let mut keys: Vec<(usize, f64, Vec<f64>)> = Vec::new();
    for o in 0..reps.len() {
        let members: Vec<usize> = (0..roots.len()).filter(|&i| orbit_raw[i] == o).collect();
        let len = geom::norm_sq(&roots[members[0]].0);
        let mut min_vec = roots[members[0]].0.clone();
        for &m in &members[1..] {
            if lex_less(&roots[m].0, &min_vec) {
                min_vec = roots[m].0.clone();
            }
        }
        keys.push((o, len, min_vec));
    }
    keys.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| lex_cmp(&a.2, &b.2)));
    let mut orbit_map = vec![0usize; reps.len()];
    for (new_id, (old_id, _, _)) in keys.iter().enumerate() {
        orbit_map[*old_id] = new_id;
    }
    let orbit_of: Vec<usize> = orbit_raw.iter().map(|&o| orbit_map[o]).collect();

    // Multiplicity checks: positive everywhere, constant on orbits.
    for (i, (_, k)) in roots.iter().enumerate() {
        if !(*k > 0.0) || !k.is_finite() {
            return Err(Violation {
                kind: ViolationKind::NonPositiveMultiplicity,
                witness: vec![i],
                message: format!("root {i} has non-positive multiplicity {k}"),
            });
        }
    }
    for i in 0..roots.len() {
        for j in (i + 1)..roots.len() {
            if orbit_of[i] == orbit_of[j] && (roots[i].1 - roots[j].1).abs() > MULT_TOL {
                return Err(Violation {
                    kind: ViolationKind::MultiplicityNotInvariant,
                    witness: vec![i, j],
                    message: format!(
                        "multiplicity is not Weyl invariant: roots {i} and {j} share an orbit but carry {} and {}",
                        roots[i].1, roots[j].1
                    ),
                });
            }
        }
    }

    // Reduced: no root has its double present.
    let mut reduced = true;
    'outer: for (v, _) in roots {
        let double: Vec<f64> = v.iter().map(|x| 2.0 * x).collect();
        if find(&double).is_some() {
            reduced = false;
            break 'outer;
        }
    }

    Ok(SystemClassification {
        orbit_of,
        orbit_count: reps.len(),
        crystallographic,
        reduced,
    })
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    lex_cmp(a, b) == std::cmp::Ordering::Less
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

// ------------------------------------------------------------- constructions

/// Positive roots and simple positions for the A family, realized in rank `n`
/// with all roots at squared length 2 via the Cholesky factor of the Cartan
/// matrix.
fn a_family_positives(rank: usize) -> (Vec<Vec<f64>>, Vec<usize>) {
    let n = rank;
    let mut cartan = vec![0.0; n * n];
    for i in 0..n {
        cartan[i * n + i] = 2.0;
        if i + 1 < n {
            cartan[i * n + i + 1] = -1.0;
            cartan[(i + 1) * n + i] = -1.0;
        }
    }
    let l = geom::cholesky(&cartan, n).expect("Cartan matrix of A_n is positive definite");
    let simples: Vec<Vec<f64>> = (0..n).map(|i| l[i * n..(i + 1) * n].to_vec()).collect();
    // Positive roots of A_n are the consecutive sums of simple roots.
    let mut positives = Vec::new();
    let mut simple_positions = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut v = vec![0.0; n];
            for s in &simples[i..=j] {
                geom::axpy(1.0, s, &mut v);
            }
            if i == j {
                simple_positions.push(positives.len());
            }
            positives.push(v);
        }
    }
    (positives, simple_positions)
}

/// Positive roots `e_i - e_j`, `e_i + e_j` (i < j) plus optional `e_i`
/// (`short`) or `2 e_i` (`long`) tails, with the standard simple chain.
fn bcd_positives(rank: usize, short: bool, long: bool) -> (Vec<Vec<f64>>, Vec<usize>) {
    let n = rank;
    let mut positives = Vec::new();
    let mut simple_positions = Vec::new();
    let e = |i: usize, c: f64| {
        let mut v = vec![0.0; n];
        v[i] = c;
        v
    };
    for i in 0..n {
        for j in (i + 1)..n {
            let mut diff = e(i, 1.0);
            diff[j] = -1.0;
            if j == i + 1 {
                simple_positions.push(positives.len());
            }
            positives.push(diff);
            let mut sum = e(i, 1.0);
            sum[j] = 1.0;
            positives.push(sum);
        }
    }
    if short {
        for i in 0..n {
            if i == n - 1 {
                simple_positions.push(positives.len());
            }
            positives.push(e(i, 1.0));
        }
    } else if long {
        for i in 0..n {
            if i == n - 1 {
                simple_positions.push(positives.len());
            }
            positives.push(e(i, 2.0));
        }
    } else {
        // D family: last simple root is e_{n-2} + e_{n-1}.
        let target = {
            let mut v = e(n - 2, 1.0);
            v[n - 1] = 1.0;
            v
        };
        let pos = positives
            .iter()
            .position(|v| geom::approx_eq(v, &target, ROOT_TOL))
            .expect("e_{n-2} + e_{n-1} is a positive root of D_n");
        simple_positions.push(pos);
    }
    if rank == 1 {
        // Degenerate single-root families (B1, C1, BC1 core).
        if simple_positions.is_empty() {
            simple_positions.push(0);
        }
    }
    (positives, simple_positions)
}

fn derive_simple_positions(pos_vectors: &[Vec<f64>]) -> Vec<usize> {
    let mut simple = Vec::new();
    'cand: for (i, alpha) in pos_vectors.iter().enumerate() {
        for (j, beta) in pos_vectors.iter().enumerate() {
            for (k, gamma) in pos_vectors.iter().enumerate() {
                if j == i || k == i {
                    continue;
                }
                let sum: Vec<f64> = beta.iter().zip(gamma).map(|(b, g)| b + g).collect();
                if geom::approx_eq(&sum, alpha, ROOT_TOL) {
                    continue 'cand;
                }
            }
        }
        simple.push(i);
    }
    simple
}

fn find_regular_vector(roots: &[(Vec<f64>, f64)], n: usize) -> Result<Vec<f64>, RootSystemError> {
    let mut eps = 0.37;
    for _ in 0..64 {
        let mut u = vec![0.0; n];
        let mut p = 1.0;
        for entry in u.iter_mut() {
            *entry = p;
            p *= eps;
        }
        let regular = roots
            .iter()
            .all(|(v, _)| geom::dot(v, &u).abs() > 1e-7 * geom::norm(v) * geom::norm(&u));
        if regular {
            return Ok(u);
        }
        eps *= 0.613;
    }
    Err(RootSystemError::NoRegularVector)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom;
    use proptest::prelude::*;

    fn a2() -> RootSystem {
        RootSystem::standard(Family::A, 2, &[1.0]).unwrap()
    }

    #[test]
    fn a2_has_six_roots_three_positive_order_six() {
        let sys = a2();
        assert_eq!(sys.roots().len(), 6);
        assert_eq!(sys.num_positive(), 3);
        assert_eq!(sys.weyl().order(), 6);
    }

    #[test]
    fn a1_rho_is_half_root() {
        let sys = RootSystem::standard(Family::A, 1, &[1.0]).unwrap();
        let alpha = sys.positive_root(0);
        assert!((alpha.norm_sq - 2.0).abs() < 1e-12);
        for (r, a) in sys.rho().iter().zip(&alpha.vector) {
            assert!((r - a / 2.0).abs() < 1e-12);
        }
        assert_eq!(sys.weyl().order(), 2);
    }

    #[test]
    fn bc1_rescale_merges_multiplicities() {
        let sys = RootSystem::standard(Family::BC, 1, &[1.0, 0.5]).unwrap();
        assert_eq!(sys.num_positive(), 2);
        assert!(!sys.is_reduced());
        let dunkl = sys.rescale_to_dunkl();
        assert_eq!(dunkl.num_positive(), 1);
        let beta = dunkl.positive_root(0);
        assert!((beta.norm_sq - 2.0).abs() < 1e-12);
        assert!((beta.multiplicity - 1.5).abs() < 1e-12);
        assert!(dunkl.is_reduced());
    }

    #[test]
    fn b2_weyl_order_eight_and_rescale_preserves_orbits() {
        let sys = RootSystem::standard(Family::B, 2, &[2.0, 1.0]).unwrap();
        assert_eq!(sys.weyl().order(), 8);
        assert_eq!(sys.orbit_count(), 2);
        // short roots (e_i) got k = 2, long (e_i +- e_j) k = 1
        for r in sys.positive_roots() {
            if (r.norm_sq - 1.0).abs() < 1e-9 {
                assert!((r.multiplicity - 2.0).abs() < 1e-12);
            } else {
                assert!((r.multiplicity - 1.0).abs() < 1e-12);
            }
        }
        let dunkl = sys.rescale_to_dunkl();
        assert_eq!(dunkl.num_positive(), 4);
        for r in dunkl.positive_roots() {
            assert!((r.norm_sq - 2.0).abs() < 1e-12);
        }
        // no doubled roots, so k' equals the original orbit values
        let mut mults: Vec<f64> = dunkl.positive_roots().map(|r| r.multiplicity).collect();
        mults.sort_by(f64::total_cmp);
        assert_eq!(mults, vec![1.0, 1.0, 2.0, 2.0]);
        // the rescaled B2 system is not integral
        let listed: Vec<(Vec<f64>, f64)> = dunkl
            .roots()
            .iter()
            .map(|r| (r.vector.clone(), r.multiplicity))
            .collect();
        match validate_axioms(&listed) {
            AxiomCheck::Violation(v) => assert_eq!(v.kind, ViolationKind::NotIntegral),
            AxiomCheck::Ok(_) => panic!("rescaled B2 should fail the integrality axiom"),
        }
    }

    #[test]
    fn a2_rescale_is_identity() {
        let sys = a2();
        let dunkl = sys.rescale_to_dunkl();
        assert_eq!(dunkl.num_positive(), 3);
        for (a, b) in sys.positive_roots().zip(dunkl.positive_roots()) {
            assert!(geom::approx_eq(&a.vector, &b.vector, 1e-12));
            assert!((a.multiplicity - b.multiplicity).abs() < 1e-12);
        }
        assert!(dunkl.is_crystallographic());
    }

    #[test]
    fn validate_accepts_pm_e1() {
        let roots = vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)];
        match validate_axioms(&roots) {
            AxiomCheck::Ok(c) => {
                assert_eq!(c.orbit_count, 1);
                assert!(c.crystallographic);
            }
            AxiomCheck::Violation(v) => panic!("unexpected violation: {}", v.message),
        }
    }

    #[test]
    fn validate_rejects_irrational_ratio() {
        let phi = 1.618_033_988_749_895_f64;
        let roots = vec![
            (vec![1.0], 1.0),
            (vec![-1.0], 1.0),
            (vec![phi], 1.0),
            (vec![-phi], 1.0),
        ];
        match validate_axioms(&roots) {
            AxiomCheck::Violation(v) => assert_eq!(v.kind, ViolationKind::NotIntegral),
            AxiomCheck::Ok(_) => panic!("expected an integrality violation"),
        }
    }

    #[test]
    fn validate_rejects_unequal_orbit_multiplicities() {
        let sys = a2();
        let mut listed: Vec<(Vec<f64>, f64)> = sys
            .roots()
            .iter()
            .map(|r| (r.vector.clone(), r.multiplicity))
            .collect();
        listed[0].1 = 2.0; // break W-invariance on one orbit member
        match validate_axioms(&listed) {
            AxiomCheck::Violation(v) => {
                assert_eq!(v.kind, ViolationKind::MultiplicityNotInvariant)
            }
            AxiomCheck::Ok(_) => panic!("expected a multiplicity violation"),
        }
    }

    #[test]
    fn reflection_examples() {
        let sys = a2();
        let alpha = sys.positive_root(0);
        let img = alpha.reflect(&alpha.vector);
        for (a, b) in img.iter().zip(&alpha.vector) {
            assert!((a + b).abs() < 1e-12);
        }
        // fixed vector on the hyperplane
        let perp = vec![alpha.vector[1], -alpha.vector[0]];
        let fixed = alpha.reflect(&perp);
        assert!(geom::approx_eq(&fixed, &perp, 1e-12));
        assert!(reflect_vector(&[0.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn radial_decompose_identity_and_single_reflection() {
        let sys = RootSystem::standard(Family::A, 1, &[1.0]).unwrap();
        let inside = vec![1.5];
        let d = sys.radial_decompose(&inside);
        assert_eq!(d.w_index, WeylGroup::IDENTITY);
        assert!(geom::approx_eq(&d.x_plus, &inside, 1e-12));

        let x = vec![-2.0];
        let d = sys.radial_decompose(&x);
        assert!(geom::approx_eq(&d.x_plus, &[2.0], 1e-12));
        let w = sys.weyl().element(d.w_index);
        assert_eq!(w.word.len(), 1);
        assert!(geom::approx_eq(&w.apply(&d.x_plus), &x, 1e-12));
    }

    #[test]
    fn wall_points_decompose_with_the_identity() {
        // on a wall the stabilizer is nontrivial; the shortest-word rule picks
        // the identity over the stabilizing reflection
        let sys = a2();
        let alpha = sys.positive_root(0).vector.clone();
        // a point orthogonal to the first simple root, inside the closure
        let mut x = vec![alpha[1], -alpha[0]];
        if sys.min_positive_pairing(&x) < -1e-9 {
            for v in x.iter_mut() {
                *v = -*v;
            }
        }
        assert!(sys.in_closed_chamber(&x, 1e-9));
        assert!(geom::dot(&alpha, &x).abs() < 1e-12);
        let d = sys.radial_decompose(&x);
        assert_eq!(d.w_index, WeylGroup::IDENTITY);
        // the origin is stabilized by everything; identity still wins
        assert_eq!(
            sys.radial_decompose(&[0.0, 0.0]).w_index,
            WeylGroup::IDENTITY
        );
    }

    #[test]
    fn rho_is_chamber_interior_for_families_up_to_rank_four() {
        let cases: Vec<RootSystem> = vec![
            RootSystem::standard(Family::A, 1, &[0.7]).unwrap(),
            RootSystem::standard(Family::A, 2, &[1.0]).unwrap(),
            RootSystem::standard(Family::A, 3, &[2.0]).unwrap(),
            RootSystem::standard(Family::A, 4, &[0.5]).unwrap(),
            RootSystem::standard(Family::B, 2, &[1.0, 2.0]).unwrap(),
            RootSystem::standard(Family::B, 3, &[1.0, 1.0]).unwrap(),
            RootSystem::standard(Family::B, 4, &[0.5, 1.5]).unwrap(),
            RootSystem::standard(Family::C, 2, &[1.0, 0.5]).unwrap(),
            RootSystem::standard(Family::C, 3, &[2.0, 1.0]).unwrap(),
            RootSystem::standard(Family::D, 3, &[1.0]).unwrap(),
            RootSystem::standard(Family::D, 4, &[1.0]).unwrap(),
            RootSystem::standard(Family::BC, 1, &[1.0, 0.5]).unwrap(),
            RootSystem::standard(Family::BC, 2, &[1.0, 0.5, 0.25]).unwrap(),
            RootSystem::standard(Family::BC, 4, &[1.0, 1.0, 1.0]).unwrap(),
        ];
        for sys in &cases {
            for simple in sys.simple_positions() {
                let root = sys.positive_root(*simple);
                let pairing = geom::dot(&root.coroot, sys.rho());
                assert!(
                    pairing > 0.0,
                    "{} rank {}: simple pairing {pairing} not positive",
                    sys.family(),
                    sys.rank()
                );
            }
        }
    }

    #[test]
    fn positive_roots_pair_positively_with_regular_vector() {
        for sys in [
            a2(),
            RootSystem::standard(Family::BC, 2, &[1.0, 1.0, 0.5]).unwrap(),
        ] {
            for r in sys.positive_roots() {
                assert!(geom::dot(&r.vector, sys.regular_vector()) > 0.0);
            }
        }
    }

    #[test]
    fn weyl_elements_permute_roots_and_preserve_k() {
        let sys = RootSystem::standard(Family::B, 2, &[1.5, 0.5]).unwrap();
        for w in sys.weyl().elements() {
            for (i, r) in sys.roots().iter().enumerate() {
                let img = w.apply(&r.vector);
                let j = sys.find_root(&img).expect("image must be a root");
                assert_eq!(j, w.perm[i] as usize);
                assert!((sys.roots()[j].multiplicity - r.multiplicity).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn word_matrices_match_reflection_products() {
        let sys = a2();
        let n = sys.rank();
        for w in sys.weyl().elements() {
            let mut m = geom::identity(n);
            for &s in &w.word {
                let root = sys.positive_root(s);
                let mut rm = geom::identity(n);
                for row in 0..n {
                    let c = root.coroot[row];
                    for col in 0..n {
                        rm[col * n + row] -= root.vector[col] * c;
                    }
                }
                m = geom::mat_mul(&m, &rm, n);
            }
            assert!(geom::approx_eq(&m, &w.matrix, 1e-10));
        }
    }

    #[test]
    fn custom_system_matches_standard_a2() {
        let reference = a2();
        let listed: Vec<(Vec<f64>, f64)> = reference
            .roots()
            .iter()
            .map(|r| (r.vector.clone(), 1.0))
            .collect();
        let sys = RootSystem::custom(&listed).unwrap();
        assert_eq!(sys.num_positive(), 3);
        assert_eq!(sys.weyl().order(), 6);
        assert_eq!(sys.simple_positions().len(), 2);
    }

    #[test]
    fn closure_bound_is_enforced() {
        let sys = a2();
        match sys.generate_weyl(3) {
            Err(RootSystemError::GroupTooLarge(3)) => {}
            other => panic!("expected the safety bound to trip, got {other:?}"),
        }
    }

    #[test]
    fn wrong_multiplicity_count_is_rejected() {
        let err = RootSystem::standard(Family::B, 2, &[1.0]).unwrap_err();
        match err {
            RootSystemError::WrongMultiplicityCount { expected, got, .. } => {
                assert_eq!(expected, 2);
                assert_eq!(got, 1);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    proptest! {
        #[test]
        fn reflect_is_involutive(x0 in -5.0f64..5.0, x1 in -5.0f64..5.0) {
            let sys = a2();
            for r in sys.positive_roots() {
                let x = vec![x0, x1];
                let twice = r.reflect(&r.reflect(&x));
                prop_assert!(geom::approx_eq(&twice, &x, 1e-10));
            }
        }

        #[test]
        fn radial_decompose_preserves_norm_and_dominance(
            x0 in -5.0f64..5.0, x1 in -5.0f64..5.0
        ) {
            let sys = a2();
            let x = vec![x0, x1];
            let d = sys.radial_decompose(&x);
            prop_assert!((geom::norm(&d.x_plus) - geom::norm(&x)).abs() < 1e-9);
            prop_assert!(sys.in_closed_chamber(&d.x_plus, 1e-9));
            let w = sys.weyl().element(d.w_index);
            prop_assert!(geom::approx_eq(&w.apply(&d.x_plus), &x, 1e-8));
            // every Weyl image folds back to the same representative
            for w in sys.weyl().elements() {
                let img = w.apply(&x);
                let folded = sys.fold(&img);
                prop_assert!(geom::approx_eq(&folded, &d.x_plus, 1e-8));
            }
        }
    }
}
