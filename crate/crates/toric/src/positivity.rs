//! The combinatorial positivity criterion for the tangent sheaf.
//!
//! For a complete simplicial fan, positivity of the Seshadri constant of the
//! tangent sheaf at the torus identity is equivalent to a condition on the
//! ray generators alone: every vanishing positive combination of distinct
//! rays must involve at least dim + 1 of them. This module decides that
//! condition two independent ways (circuit enumeration and per-subset
//! feasibility queries), classifies the resulting sign, relates it to the
//! characterization of projective space, and runs a bounded seeded search
//! for smooth complete counterexamples to the converse.

use crate::fan::{k_subsets, Fan, FanData, FanError};
use crate::linalg::{primitive, Int, IntMatrix, Rat};
use crate::lp::{self, LPCertificate, LPProblem, LinearConstraint};
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A vanishing positive combination of distinct rays: coefficients are
/// positive and sum the supported ray vectors to zero. Producers in this
/// module normalize coefficients to coprime positive integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveRelation {
    /// Sorted ray indices with nonzero coefficient.
    pub support: Vec<usize>,
    /// Coefficients parallel to `support`.
    pub coeffs: Vec<Rat>,
}

/// Exact check that a claimed relation really is one.
pub fn verify_positive_relation(fan: &Fan, rel: &PositiveRelation) -> bool {
    if rel.support.is_empty()
        || rel.support.len() != rel.coeffs.len()
        || rel.support.windows(2).any(|w| w[0] >= w[1])
        || rel.support.iter().any(|&i| i >= fan.rays().len())
        || rel.coeffs.iter().any(|c| !c.is_positive())
    {
        return false;
    }
    for k in 0..fan.dim() {
        let s: Rat = rel
            .support
            .iter()
            .zip(&rel.coeffs)
            .map(|(&i, c)| c * Rat::from_integer(fan.rays()[i][k].clone()))
            .sum();
        if !s.is_zero() {
            return false;
        }
    }
    true
}

/// Outcome of the ray-count criterion, with a minimal witness on failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DaggerReport {
    pub holds: bool,
    /// A violating relation on at most dim rays, smallest support first
    /// (ties broken colexicographically), when the criterion fails.
    pub witness: Option<PositiveRelation>,
}

/// Sign of the Seshadri constant of the tangent sheaf at the identity.
/// There is no negative variant: the constant is never negative there.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeshadriSign {
    Zero,
    Positive,
}

/// Whether the given ray indices span a cone of the fan. In a simplicial
/// fan this is containment in some maximal cone.
pub fn spans_cone(fan: &Fan, rays: &[usize]) -> bool {
    fan.max_cones()
        .iter()
        .any(|cone| rays.iter().all(|i| cone.contains(i)))
}

/// Scales a one-signed dependence so the smallest coefficient is one.
fn normalize_relation(v: &[Rat]) -> Vec<Rat> {
    let flip = v
        .iter()
        .find(|x| !x.is_zero())
        .is_some_and(|x| x.is_negative());
    let pos: Vec<Rat> = v.iter().map(|x| if flip { -x } else { x.clone() }).collect();
    let min = pos
        .iter()
        .filter(|x| x.is_positive())
        .min()
        .cloned()
        .expect("relation is nonzero");
    pos.into_iter().map(|x| x / &min).collect()
}

/// Positive circuits of the ray configuration with support of at most
/// `max_support` rays: minimal supports of vanishing positive combinations.
/// Enumerated by support size, then lexicographically; coefficients come
/// out normalized with smallest entry one.
pub fn positive_circuits(fan: &Fan, max_support: usize) -> Vec<PositiveRelation> {
    let rays = fan.rays();
    let mut out = Vec::new();
    for size in 2..=max_support.min(rays.len()) {
        for support in k_subsets(rays.len(), size) {
            let cols: Vec<_> = support.iter().map(|&i| rays[i].clone()).collect();
            let kernel = IntMatrix::from_cols(&cols).kernel_basis();
            // A circuit has a one-dimensional kernel avoiding zero entries;
            // a zero entry would mean a smaller dependent subset.
            if kernel.len() != 1 {
                continue;
            }
            let v = &kernel[0];
            if v.iter().any(|x| x.is_zero()) {
                continue;
            }
            let positive = v.iter().all(|x| x.is_positive());
            let negative = v.iter().all(|x| x.is_negative());
            if !positive && !negative {
                continue;
            }
            out.push(PositiveRelation {
                support,
                coeffs: normalize_relation(v),
            });
        }
    }
    out
}

fn colex_key(support: &[usize]) -> Vec<usize> {
    support.iter().rev().copied().collect()
}

/// Decides the ray-count criterion by circuit enumeration: it fails exactly
/// when some positive circuit is supported on at most dim rays, and any
/// violating relation contains such a circuit in its support.
pub fn check_dagger(fan: &Fan) -> Result<DaggerReport, FanError> {
    if !fan.is_complete() {
        return Err(FanError::NotComplete);
    }
    let witness = positive_circuits(fan, fan.dim())
        .into_iter()
        .min_by_key(|c| (c.support.len(), colex_key(&c.support)));
    Ok(DaggerReport { holds: witness.is_none(), witness })
}

/// Independent oracle for [`check_dagger`]: for every ray subset of size at
/// most dim, ask the LP solver for a vanishing combination with all
/// coefficients at least one. Agrees with the circuit route on the verdict.
pub fn check_dagger_lp(fan: &Fan) -> Result<DaggerReport, FanError> {
    if !fan.is_complete() {
        return Err(FanError::NotComplete);
    }
    let rays = fan.rays();
    let n = fan.dim();
    for size in 2..=n.min(rays.len()) {
        for support in k_subsets(rays.len(), size) {
            let constraints: Vec<LinearConstraint> = (0..n)
                .map(|k| {
                    let row: Vec<Rat> = support
                        .iter()
                        .map(|&i| Rat::from_integer(rays[i][k].clone()))
                        .collect();
                    LinearConstraint::eq(row, Rat::zero())
                })
                .collect();
            let problem = LPProblem::feasibility(
                support.len(),
                constraints,
                vec![Some(Rat::one()); support.len()],
            );
            if let LPCertificate::Feasible { point } =
                lp::solve_feasibility(&problem).expect("well-formed subset LP")
            {
                let witness = PositiveRelation {
                    support,
                    coeffs: normalize_relation(&point),
                };
                return Ok(DaggerReport { holds: false, witness: Some(witness) });
            }
        }
    }
    Ok(DaggerReport { holds: true, witness: None })
}

/// All primitive collections: inclusion-minimal ray sets spanning no cone.
/// Every proper subset of such a set spans one, and checking the subsets of
/// one smaller size suffices in a simplicial fan.
pub fn primitive_collections(fan: &Fan) -> Vec<Vec<usize>> {
    let nrays = fan.rays().len();
    let n = fan.dim();
    let mut out = Vec::new();
    for size in 2..=(n + 1).min(nrays) {
        for subset in k_subsets(nrays, size) {
            if spans_cone(fan, &subset) {
                continue;
            }
            let minimal = (0..subset.len()).all(|drop| {
                let smaller: Vec<usize> = subset
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != drop)
                    .map(|(_, &i)| i)
                    .collect();
                spans_cone(fan, &smaller)
            });
            if minimal {
                out.push(subset);
            }
        }
    }
    out
}

/// First primitive collection whose ray vectors sum to zero, if any.
pub fn find_zero_sum_primitive_collection(fan: &Fan) -> Option<Vec<usize>> {
    let n = fan.dim();
    primitive_collections(fan).into_iter().find(|c| {
        (0..n).all(|k| {
            c.iter()
                .fold(Int::zero(), |acc, &i| acc + &fan.rays()[i][k])
                .is_zero()
        })
    })
}

/// Structural characterization of the projective-space fan: dim + 1 rays,
/// complete, smooth, and every dim-subset of the rays spans a maximal cone.
/// For validated fans this is equivalent to being lattice-isomorphic to the
/// standard fan of projective space.
pub fn is_projective_space_fan(fan: &Fan) -> bool {
    let n = fan.dim();
    fan.rays().len() == n + 1
        && fan.is_complete()
        && fan.is_smooth()
        && k_subsets(n + 1, n)
            .iter()
            .all(|s| fan.max_cones().contains(s))
}

/// Sign of the Seshadri constant of the tangent sheaf at the torus
/// identity: positive exactly when the ray-count criterion holds, zero
/// otherwise, never negative. The witness backing a zero is re-verified.
pub fn tangent_seshadri_sign_at_identity(fan: &Fan) -> Result<SeshadriSign, FanError> {
    let report = check_dagger(fan)?;
    match &report.witness {
        None => {
            assert!(report.holds, "witness-free report must assert the criterion");
            Ok(SeshadriSign::Positive)
        }
        Some(rel) => {
            assert!(
                !report.holds
                    && rel.support.len() <= fan.dim()
                    && verify_positive_relation(fan, rel),
                "zero sign requires a verified small positive relation"
            );
            Ok(SeshadriSign::Zero)
        }
    }
}

/// Sub-check report for the classification of smooth projective complete
/// toric varieties with positive tangent Seshadri constant at the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Theorem1Report {
    /// The hypotheses do not apply to this fan.
    NotApplicable { complete: bool, smooth: bool, projective: bool },
    Checked {
        sign: SeshadriSign,
        projective_space_fan: bool,
        /// Positive sign exactly for the projective-space fan.
        equivalence_holds: bool,
        /// A primitive collection summing to zero, which must exist here.
        zero_sum_collection: Option<Vec<usize>>,
        passed: bool,
    },
}

impl Theorem1Report {
    pub fn passed(&self) -> Option<bool> {
        match self {
            Theorem1Report::NotApplicable { .. } => None,
            Theorem1Report::Checked { passed, .. } => Some(*passed),
        }
    }
}

/// Checks, on one smooth projective complete fan, that the sign is positive
/// exactly for projective space and that a zero-sum primitive collection
/// exists. Fans outside the hypotheses come back `NotApplicable`.
pub fn verify_theorem1(fan: &Fan) -> Theorem1Report {
    let complete = fan.is_complete();
    let smooth = fan.is_smooth();
    let projective = complete && fan.is_projective().map(|r| r.projective).unwrap_or(false);
    if !(complete && smooth && projective) {
        return Theorem1Report::NotApplicable { complete, smooth, projective };
    }
    let sign = tangent_seshadri_sign_at_identity(fan).expect("fan is complete");
    let projective_space_fan = is_projective_space_fan(fan);
    let equivalence_holds = (sign == SeshadriSign::Positive) == projective_space_fan;
    let zero_sum_collection = find_zero_sum_primitive_collection(fan);
    let passed = equivalence_holds && zero_sum_collection.is_some();
    Theorem1Report::Checked {
        sign,
        projective_space_fan,
        equivalence_holds,
        zero_sum_collection,
        passed,
    }
}

/// Result of a bounded counterexample search: any smooth complete fan
/// satisfying the ray-count criterion without being the projective-space
/// fan would land in `findings`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub seed: u64,
    pub budget: usize,
    pub corpus_size: usize,
    /// Mutation candidates drawn, including ones that were skipped.
    pub candidates: usize,
    /// Candidates discarded before analysis: subdivision point already a
    /// ray, or coordinates exceeding the height bound.
    pub skipped: usize,
    pub findings: Vec<FanData>,
}

const SCAN_HEIGHT_BOUND: i64 = 5;
const SCAN_MAX_RAYS: usize = 12;
const SCAN_MAX_POOL: usize = 64;

fn is_finding(fan: &Fan) -> bool {
    fan.is_smooth()
        && fan.is_complete()
        && !is_projective_space_fan(fan)
        && check_dagger(fan).map(|r| r.holds).unwrap_or(false)
}

/// Scans the corpus for counterexamples, then mutates complete corpus fans
/// by star subdivision at random primitive interior points of their cone
/// faces, with all point coordinates bounded by 5 in absolute value. The
/// search is exhaustive over the corpus, randomized but seed-deterministic
/// over at most `budget` mutation candidates.
pub fn question4_scan(corpus: &[Fan], budget: usize, seed: u64) -> ScanReport {
    let mut findings = Vec::new();
    for fan in corpus {
        if is_finding(fan) {
            findings.push(fan.to_data().expect("corpus fans have small coordinates"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<Fan> = corpus.iter().filter(|f| f.is_complete()).cloned().collect();
    let mut candidates = 0usize;
    let mut skipped = 0usize;
    while candidates < budget && !pool.is_empty() {
        candidates += 1;
        let fan = pool[rng.gen_range(0..pool.len())].clone();
        let cone = &fan.max_cones()[rng.gen_range(0..fan.max_cones().len())];
        // A random face of the cone, with small positive weights on its
        // rays, gives a primitive point interior to that face.
        let face_size = rng.gen_range(1..=cone.len());
        let mut picks = cone.clone();
        for k in 0..face_size {
            let j = rng.gen_range(k..picks.len());
            picks.swap(k, j);
        }
        picks.truncate(face_size);
        let mut point = vec![Int::zero(); fan.dim()];
        for &i in &picks {
            let weight = Int::from(rng.gen_range(1..=2));
            for (coord, ray_coord) in point.iter_mut().zip(&fan.rays()[i]) {
                *coord += &weight * ray_coord;
            }
        }
        let point = primitive(&point).expect("positive combination is nonzero");
        if point.iter().any(|c| c.abs() > Int::from(SCAN_HEIGHT_BOUND)) {
            skipped += 1;
            continue;
        }
        let mutant = match fan.star_subdivision(&point) {
            Ok(m) => m,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        if is_finding(&mutant) {
            findings.push(mutant.to_data().expect("bounded coordinates"));
        }
        if mutant.rays().len() <= SCAN_MAX_RAYS && pool.len() < SCAN_MAX_POOL {
            pool.push(mutant);
        }
    }

    ScanReport {
        seed,
        budget,
        corpus_size: corpus.len(),
        candidates,
        skipped,
        findings,
    }
}
