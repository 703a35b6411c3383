//! Validated simplicial fans and their basic geometry.
//!
//! `Fan::new` enforces the fan axioms exactly; the pairwise face condition
//! is certified through the LP solver rather than floating-point geometry.
//! Later queries (completeness, smoothness, projectivity, class group) all
//! run on the validated structure with exact arithmetic.

use crate::linalg::{dot_rat_int, primitive, Int, IntMatrix, IntVec, Rat};
use crate::lp::{self, LPCertificate, LPProblem, LinearConstraint};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("ambient dimension must be at least 1")]
    InvalidDimension,
    #[error("ray {ray} does not have one coordinate per ambient dimension")]
    RayLengthMismatch { ray: usize },
    #[error("ray {ray} is the zero vector")]
    ZeroRay { ray: usize },
    #[error("ray {ray} is not primitive")]
    NonPrimitiveRay { ray: usize },
    #[error("rays {first} and {second} coincide")]
    DuplicateRay { first: usize, second: usize },
    #[error("cone {cone} has no rays")]
    EmptyCone { cone: usize },
    #[error("cone {cone} refers to ray {index}, which does not exist")]
    RayIndexOutOfRange { cone: usize, index: usize },
    #[error("cone {cone} lists a ray more than once")]
    DuplicateRayInCone { cone: usize },
    #[error("cones {first} and {second} coincide")]
    DuplicateCone { first: usize, second: usize },
    #[error("cone {contained} is a face of cone {container}, so it is not maximal")]
    ConeNotMaximal { contained: usize, container: usize },
    #[error("the rays of cone {cone} are linearly dependent")]
    DependentConeRays { cone: usize },
    #[error("cones {first} and {second} do not meet in a common face")]
    ConesOverlap { first: usize, second: usize },
    #[error("ray {ray} does not belong to any maximal cone")]
    DanglingRay { ray: usize },
    #[error("operation requires a complete fan")]
    NotComplete,
    #[error("operation requires rays that span the ambient space")]
    RaysDoNotSpan,
    #[error("weights must be positive")]
    WeightsNotPositive,
    #[error("weights must have gcd 1")]
    WeightsNotCoprime,
    #[error("every n of the n+1 weights must have gcd 1 (drop weight {index})")]
    WeightsNotWellFormed { index: usize },
    #[error("parameter must be nonnegative")]
    NegativeParameter,
    #[error("subdivision point is the zero vector")]
    SubdivisionPointZero,
    #[error("subdivision point is already a ray of the fan")]
    PointIsExistingRay,
    #[error("subdivision point lies outside the support of the fan")]
    PointOutsideSupport,
    #[error("ray {ray} does not fit in the i64 interchange format")]
    RayCoordinateOverflow { ray: usize },
}

/// Raw fan description, the JSON interchange form. Coordinates are i64 in
/// files; internally everything is arbitrary precision.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanData {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
}

impl FanData {
    /// Divides every ray by its coordinate gcd and reports which indices
    /// changed, so loaders can accept unnormalized input with a warning.
    /// Zero rays are left alone for validation to reject.
    pub fn primitivize(&self) -> (FanData, Vec<usize>) {
        let mut data = self.clone();
        let mut changed = Vec::new();
        for (i, ray) in data.rays.iter_mut().enumerate() {
            let ints: IntVec = ray.iter().map(|&x| Int::from(x)).collect();
            if let Ok(prim) = primitive(&ints) {
                if prim != ints {
                    *ray = prim
                        .iter()
                        .map(|x| i64::try_from(x).expect("primitivizing only shrinks"))
                        .collect();
                    changed.push(i);
                }
            }
        }
        (data, changed)
    }
}

/// A validated simplicial fan: primitive distinct rays and maximal cones
/// that pairwise intersect in common faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    dim: usize,
    rays: Vec<IntVec>,
    max_cones: Vec<Vec<usize>>,
}

/// Codimension-one cone shared by exactly two maximal cones.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Wall {
    /// Sorted ray indices of the shared facet (dim - 1 of them).
    pub facet: Vec<usize>,
    /// The two incident maximal cones, in increasing order.
    pub cones: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Completeness {
    Complete { walls: Vec<Wall> },
    Incomplete { witness: IncompletenessWitness },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IncompletenessWitness {
    NoCones,
    /// A maximal cone of dimension below the ambient one.
    LowDimensionalCone { cone: usize },
    /// A facet on the boundary of the support.
    UnpairedFacet { cone: usize, facet: Vec<usize> },
}

/// Divisor class group presented as free rank plus invariant factors > 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGroup {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectivityReport {
    pub projective: bool,
    /// Feasible: concatenated per-cone support functionals. Infeasible:
    /// Farkas vector for [`Fan::projectivity_lp`].
    pub certificate: LPCertificate,
}

/// Lightweight view of one maximal cone.
#[derive(Debug, Clone, Copy)]
pub struct ConeRef<'a> {
    fan: &'a Fan,
    pub index: usize,
}

impl<'a> ConeRef<'a> {
    pub fn ray_indices(&self) -> &'a [usize] {
        &self.fan.max_cones[self.index]
    }

    pub fn rays(&self) -> Vec<&'a IntVec> {
        self.ray_indices().iter().map(|&i| &self.fan.rays[i]).collect()
    }

    pub fn multiplicity(&self) -> Int {
        self.fan.cone_multiplicity(self.index)
    }

    pub fn contains(&self, point: &[Rat]) -> bool {
        self.fan.cone_contains(self.index, point)
    }
}

/// All k-element subsets of `{0, .., m-1}` in lexicographic order.
pub(crate) fn k_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k > m {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] + (k - i) < m {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All injective k-tuples over `{0, .., m-1}` in lexicographic order.
fn injective_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(k);
    fn rec(m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in 0..m {
            if !cur.contains(&i) {
                cur.push(i);
                rec(m, k, cur, out);
                cur.pop();
            }
        }
    }
    rec(m, k, &mut cur, &mut out);
    out
}

impl Fan {
    /// Validates and takes ownership of a fan description.
    ///
    /// Checks, in order: ambient dimension, ray shape (nonzero, primitive,
    /// distinct), cone shape (nonempty, in-range, duplicate-free, maximal,
    /// linearly independent rays, no unused rays), and finally that every
    /// pair of cones meets in a common face, each pair certified by an
    /// exact feasibility query.
    pub fn new(
        dim: usize,
        rays: Vec<IntVec>,
        max_cones: Vec<Vec<usize>>,
    ) -> Result<Fan, FanError> {
        if dim == 0 {
            return Err(FanError::InvalidDimension);
        }
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(FanError::RayLengthMismatch { ray: i });
            }
            if r.iter().all(|x| x.is_zero()) {
                return Err(FanError::ZeroRay { ray: i });
            }
            if primitive(r).expect("nonzero") != *r {
                return Err(FanError::NonPrimitiveRay { ray: i });
            }
        }
        let mut seen: BTreeMap<&IntVec, usize> = BTreeMap::new();
        for (i, r) in rays.iter().enumerate() {
            if let Some(&j) = seen.get(r) {
                return Err(FanError::DuplicateRay { first: j, second: i });
            }
            seen.insert(r, i);
        }

        let mut cones = Vec::with_capacity(max_cones.len());
        for (c, cone) in max_cones.into_iter().enumerate() {
            if cone.is_empty() {
                return Err(FanError::EmptyCone { cone: c });
            }
            if let Some(&index) = cone.iter().find(|&&i| i >= rays.len()) {
                return Err(FanError::RayIndexOutOfRange { cone: c, index });
            }
            let mut sorted = cone;
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(FanError::DuplicateRayInCone { cone: c });
            }
            cones.push(sorted);
        }
        let mut seen_cones: BTreeMap<&[usize], usize> = BTreeMap::new();
        for (c, cone) in cones.iter().enumerate() {
            if let Some(&d) = seen_cones.get(cone.as_slice()) {
                return Err(FanError::DuplicateCone { first: d, second: c });
            }
            seen_cones.insert(cone, c);
        }
        for a in 0..cones.len() {
            for b in 0..cones.len() {
                if a != b && cones[a].iter().all(|i| cones[b].contains(i)) {
                    return Err(FanError::ConeNotMaximal { contained: a, container: b });
                }
            }
        }
        for (c, cone) in cones.iter().enumerate() {
            let m = IntMatrix::from_rows(
                &cone.iter().map(|&i| rays[i].clone()).collect::<Vec<_>>(),
            );
            if m.rank() != cone.len() {
                return Err(FanError::DependentConeRays { cone: c });
            }
        }
        let used: BTreeSet<usize> = cones.iter().flatten().copied().collect();
        for i in 0..rays.len() {
            if !used.contains(&i) {
                return Err(FanError::DanglingRay { ray: i });
            }
        }

        let fan = Fan { dim, rays, max_cones: cones };
        for a in 0..fan.max_cones.len() {
            for b in a + 1..fan.max_cones.len() {
                if !fan.pair_meets_in_common_face(a, b) {
                    return Err(FanError::ConesOverlap { first: a, second: b });
                }
            }
        }
        Ok(fan)
    }

    /// Constructor for fans that are valid by construction (subdivisions,
    /// products of validated fans). Skips the quadratic face certification;
    /// callers guarantee the fan axioms.
    pub(crate) fn from_parts_unchecked(
        dim: usize,
        rays: Vec<IntVec>,
        mut max_cones: Vec<Vec<usize>>,
    ) -> Fan {
        for cone in max_cones.iter_mut() {
            cone.sort_unstable();
        }
        Fan { dim, rays, max_cones }
    }

    pub fn from_data(data: &FanData) -> Result<Fan, FanError> {
        let rays = data
            .rays
            .iter()
            .map(|r| r.iter().map(|&x| Int::from(x)).collect())
            .collect();
        Fan::new(data.dim, rays, data.max_cones.clone())
    }

    pub fn to_data(&self) -> Result<FanData, FanError> {
        let mut rays = Vec::with_capacity(self.rays.len());
        for (i, r) in self.rays.iter().enumerate() {
            let row: Option<Vec<i64>> = r.iter().map(|x| i64::try_from(x).ok()).collect();
            rays.push(row.ok_or(FanError::RayCoordinateOverflow { ray: i })?);
        }
        Ok(FanData { dim: self.dim, rays, max_cones: self.max_cones.clone() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[IntVec] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn cone(&self, index: usize) -> ConeRef<'_> {
        ConeRef { fan: self, index }
    }

    pub fn cones(&self) -> impl Iterator<Item = ConeRef<'_>> {
        (0..self.max_cones.len()).map(move |index| ConeRef { fan: self, index })
    }

    pub fn ray_index(&self, ray: &[Int]) -> Option<usize> {
        self.rays.iter().position(|r| r.as_slice() == ray)
    }

    /// Two cones meet in a common face exactly when some functional
    /// vanishes on their shared rays and strictly separates the rest;
    /// by homogeneity the strict parts can be asked with margin one.
    fn pair_meets_in_common_face(&self, a: usize, b: usize) -> bool {
        let ca = &self.max_cones[a];
        let cb = &self.max_cones[b];
        let mut constraints = Vec::new();
        let to_rat = |i: usize| -> Vec<Rat> {
            self.rays[i].iter().map(|x| Rat::from_integer(x.clone())).collect()
        };
        for &i in ca {
            if cb.contains(&i) {
                constraints.push(LinearConstraint::eq(to_rat(i), Rat::zero()));
            } else {
                constraints.push(LinearConstraint::ge(to_rat(i), Rat::one()));
            }
        }
        for &i in cb {
            if !ca.contains(&i) {
                constraints.push(LinearConstraint::le(to_rat(i), -Rat::one()));
            }
        }
        let problem = LPProblem::feasibility(self.dim, constraints, vec![None; self.dim]);
        matches!(
            lp::solve_feasibility(&problem).expect("face LP is well-formed"),
            LPCertificate::Feasible { .. }
        )
    }

    /// Barycentric coordinates of a point in a cone, if the point lies in
    /// the cone's linear span.
    pub fn cone_coordinates(&self, cone: usize, point: &[Rat]) -> Option<Vec<Rat>> {
        let idx = &self.max_cones[cone];
        let matrix: Vec<Vec<Rat>> = (0..self.dim)
            .map(|row| {
                idx.iter()
                    .map(|&i| Rat::from_integer(self.rays[i][row].clone()))
                    .collect()
            })
            .collect();
        crate::linalg::solve_unique(&matrix, point)
    }

    pub fn cone_contains(&self, cone: usize, point: &[Rat]) -> bool {
        self.cone_coordinates(cone, point)
            .is_some_and(|c| c.iter().all(|x| !x.is_negative()))
    }

    /// First maximal cone containing the point, if any.
    pub fn find_containing_cone(&self, point: &[Rat]) -> Option<usize> {
        (0..self.max_cones.len()).find(|&c| self.cone_contains(c, point))
    }

    /// Decides completeness by facet pairing: a validated pure fan covers
    /// the whole space exactly when every facet of a maximal cone is shared
    /// with a second one. An unpaired facet lies on the support boundary
    /// and is returned as the witness.
    pub fn completeness(&self) -> Completeness {
        if self.max_cones.is_empty() {
            return Completeness::Incomplete { witness: IncompletenessWitness::NoCones };
        }
        for (c, cone) in self.max_cones.iter().enumerate() {
            if cone.len() != self.dim {
                return Completeness::Incomplete {
                    witness: IncompletenessWitness::LowDimensionalCone { cone: c },
                };
            }
        }
        let mut facets: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (c, cone) in self.max_cones.iter().enumerate() {
            for skip in 0..cone.len() {
                let mut facet = cone.clone();
                facet.remove(skip);
                facets.entry(facet).or_default().push(c);
            }
        }
        let mut walls = Vec::new();
        for (facet, incident) in facets {
            match incident.as_slice() {
                [a, b] => walls.push(Wall { facet, cones: (*a, *b) }),
                [a] => {
                    return Completeness::Incomplete {
                        witness: IncompletenessWitness::UnpairedFacet { cone: *a, facet },
                    }
                }
                _ => unreachable!("a facet of a valid fan lies in at most two maximal cones"),
            }
        }
        Completeness::Complete { walls }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self.completeness(), Completeness::Complete { .. })
    }

    pub fn walls(&self) -> Result<Vec<Wall>, FanError> {
        match self.completeness() {
            Completeness::Complete { walls } => Ok(walls),
            Completeness::Incomplete { .. } => Err(FanError::NotComplete),
        }
    }

    /// The ray of the given cone that does not lie on the facet.
    pub(crate) fn off_ray(&self, cone: usize, facet: &[usize]) -> usize {
        *self.max_cones[cone]
            .iter()
            .find(|i| !facet.contains(i))
            .expect("facet omits exactly one ray of an incident cone")
    }

    /// Index of the sublattice spanned by the cone's rays in its saturation;
    /// 1 exactly when the rays extend to a basis.
    pub fn cone_multiplicity(&self, cone: usize) -> Int {
        let rows: Vec<IntVec> = self.max_cones[cone]
            .iter()
            .map(|&i| self.rays[i].clone())
            .collect();
        IntMatrix::from_rows(&rows)
            .smith_normal_form()
            .factors
            .iter()
            .product()
    }

    /// Multiplicities of all maximal cones, in fan order.
    pub fn multiplicities(&self) -> Vec<Int> {
        (0..self.max_cones.len()).map(|c| self.cone_multiplicity(c)).collect()
    }

    pub fn is_smooth(&self) -> bool {
        self.multiplicities().iter().all(|m| m.is_one())
    }

    /// The exact feasibility problem whose solutions are strictly convex
    /// piecewise linear support functions: one functional per maximal cone,
    /// agreeing across each wall and dropping by at least one against the
    /// opposite cone's off ray.
    pub fn projectivity_lp(&self, walls: &[Wall]) -> LPProblem {
        let n = self.dim;
        let num_vars = self.max_cones.len() * n;
        let mut constraints = Vec::new();
        for wall in walls {
            let (a, b) = wall.cones;
            let diff_row = |ray: &IntVec| -> Vec<Rat> {
                let mut row = vec![Rat::zero(); num_vars];
                for k in 0..n {
                    row[a * n + k] = Rat::from_integer(ray[k].clone());
                    row[b * n + k] = -Rat::from_integer(ray[k].clone());
                }
                row
            };
            for &f in &wall.facet {
                constraints.push(LinearConstraint::eq(diff_row(&self.rays[f]), Rat::zero()));
            }
            let va = self.off_ray(a, &wall.facet);
            constraints.push(LinearConstraint::ge(diff_row(&self.rays[va]), Rat::one()));
        }
        LPProblem::feasibility(num_vars, constraints, vec![None; num_vars])
    }

    /// Splits a feasible point of [`Fan::projectivity_lp`] into per-cone
    /// functionals.
    pub fn support_functionals(&self, point: &[Rat]) -> Vec<Vec<Rat>> {
        assert_eq!(point.len(), self.max_cones.len() * self.dim);
        point.chunks(self.dim).map(|c| c.to_vec()).collect()
    }

    /// Decides projectivity of the associated variety. Requires a complete
    /// fan; either answer carries an exact certificate.
    pub fn is_projective(&self) -> Result<ProjectivityReport, FanError> {
        let walls = self.walls()?;
        let problem = self.projectivity_lp(&walls);
        let certificate =
            lp::solve_feasibility(&problem).expect("projectivity LP is well-formed");
        Ok(ProjectivityReport {
            projective: matches!(certificate, LPCertificate::Feasible { .. }),
            certificate,
        })
    }

    /// Direct global check that per-cone functionals define a strictly
    /// convex support function: consistent values at every ray, and each
    /// cone's functional strictly dominated at every ray outside the cone.
    /// Independent of the wall-by-wall formulation above.
    pub fn is_strictly_convex_support(&self, functionals: &[Vec<Rat>]) -> bool {
        if functionals.len() != self.max_cones.len()
            || functionals.iter().any(|f| f.len() != self.dim)
        {
            return false;
        }
        let mut value: Vec<Option<Rat>> = vec![None; self.rays.len()];
        for (c, cone) in self.max_cones.iter().enumerate() {
            for &i in cone {
                let v = dot_rat_int(&functionals[c], &self.rays[i]);
                match &value[i] {
                    None => value[i] = Some(v),
                    Some(existing) => {
                        if *existing != v {
                            return false;
                        }
                    }
                }
            }
        }
        for (c, cone) in self.max_cones.iter().enumerate() {
            for i in 0..self.rays.len() {
                if cone.contains(&i) {
                    continue;
                }
                let at_own = value[i].as_ref().expect("no dangling rays");
                let at_c = dot_rat_int(&functionals[c], &self.rays[i]);
                if at_c >= *at_own {
                    return false;
                }
            }
        }
        true
    }

    /// Divisor class group from the cokernel of the ray matrix.
    pub fn class_group(&self) -> Result<ClassGroup, FanError> {
        let m = IntMatrix::from_rows(&self.rays);
        if m.rank() != self.dim {
            return Err(FanError::RaysDoNotSpan);
        }
        let snf = m.smith_normal_form();
        Ok(ClassGroup {
            free_rank: self.rays.len() - snf.rank(),
            torsion: snf.cokernel_torsion(),
        })
    }

    /// Fan of projective n-space: the standard basis plus the negative sum,
    /// with every n-subset spanning a cone.
    pub fn projective_space(n: usize) -> Result<Fan, FanError> {
        if n == 0 {
            return Err(FanError::InvalidDimension);
        }
        let mut rays: Vec<IntVec> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Int::one() } else { Int::zero() }).collect())
            .collect();
        rays.push(vec![-Int::one(); n]);
        Fan::new(n, rays, k_subsets(n + 1, n))
    }

    /// Fan of weighted projective space P(q_0, .., q_n) in the quotient
    /// lattice Z^{n+1} / Z (q_0, .., q_n). Weights must be positive and
    /// well formed: every n of them coprime.
    pub fn weighted_projective(weights: &[i64]) -> Result<Fan, FanError> {
        if weights.len() < 2 {
            return Err(FanError::InvalidDimension);
        }
        if weights.iter().any(|&w| w <= 0) {
            return Err(FanError::WeightsNotPositive);
        }
        let q: IntVec = weights.iter().map(|&w| Int::from(w)).collect();
        let total_gcd = q.iter().fold(Int::zero(), |g, w| num::Integer::gcd(&g, w));
        if !total_gcd.is_one() {
            return Err(FanError::WeightsNotCoprime);
        }
        for drop in 0..q.len() {
            let g = q
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != drop)
                .fold(Int::zero(), |g, (_, w)| num::Integer::gcd(&g, w));
            if !g.is_one() {
                return Err(FanError::WeightsNotWellFormed { index: drop });
            }
        }
        let n = weights.len() - 1;
        let u = clear_to_first(&q);
        // U q = e_0, so dropping the first coordinate of the U-image
        // realizes the quotient lattice; the rays are the images of the
        // standard basis, and sum(q_i v_i) = 0 by construction.
        let rays: Vec<IntVec> = (0..=n)
            .map(|i| (1..=n).map(|r| u.get(r, i).clone()).collect())
            .collect();
        Fan::new(n, rays, k_subsets(n + 1, n))
    }

    /// Fan of the Hirzebruch surface with parameter r >= 0.
    pub fn hirzebruch(r: i64) -> Result<Fan, FanError> {
        if r < 0 {
            return Err(FanError::NegativeParameter);
        }
        let rays = vec![
            vec![Int::one(), Int::zero()],
            vec![Int::zero(), Int::one()],
            vec![Int::zero(), -Int::one()],
            vec![-Int::one(), Int::from(r)],
        ];
        Fan::new(2, rays, vec![vec![0, 1], vec![0, 2], vec![1, 3], vec![2, 3]])
    }

    /// Product fan on the direct sum of the two lattices.
    pub fn product(a: &Fan, b: &Fan) -> Result<Fan, FanError> {
        let dim = a.dim + b.dim;
        let mut rays: Vec<IntVec> = Vec::with_capacity(a.rays.len() + b.rays.len());
        for r in &a.rays {
            let mut v = r.clone();
            v.extend(std::iter::repeat_with(Int::zero).take(b.dim));
            rays.push(v);
        }
        for r in &b.rays {
            let mut v: IntVec = std::iter::repeat_with(Int::zero).take(a.dim).collect();
            v.extend(r.iter().cloned());
            rays.push(v);
        }
        let mut cones = Vec::with_capacity(a.max_cones.len() * b.max_cones.len());
        for ca in &a.max_cones {
            for cb in &b.max_cones {
                let mut cone = ca.clone();
                cone.extend(cb.iter().map(|&i| i + a.rays.len()));
                cones.push(cone);
            }
        }
        Fan::new(dim, rays, cones)
    }

    /// Star subdivision at a point of the support: the minimal cone
    /// containing the point is split, and every maximal cone over it is
    /// replaced by the cones joining the new ray to its facets.
    pub fn star_subdivision(&self, point: &[Int]) -> Result<Fan, FanError> {
        let v = primitive(point).map_err(|_| FanError::SubdivisionPointZero)?;
        if self.ray_index(&v).is_some() {
            return Err(FanError::PointIsExistingRay);
        }
        let x: Vec<Rat> = v.iter().map(|c| Rat::from_integer(c.clone())).collect();
        let mut minimal_face: Option<Vec<usize>> = None;
        for c in 0..self.max_cones.len() {
            if let Some(coords) = self.cone_coordinates(c, &x) {
                if coords.iter().all(|x| !x.is_negative()) {
                    let support: Vec<usize> = self.max_cones[c]
                        .iter()
                        .zip(&coords)
                        .filter(|(_, x)| x.is_positive())
                        .map(|(&i, _)| i)
                        .collect();
                    minimal_face = Some(support);
                    break;
                }
            }
        }
        let Some(face) = minimal_face else {
            return Err(FanError::PointOutsideSupport);
        };
        let new_ray = self.rays.len();
        let mut rays = self.rays.clone();
        rays.push(v);
        let mut cones = Vec::new();
        for cone in &self.max_cones {
            if face.iter().all(|i| cone.contains(i)) {
                for &drop in &face {
                    let mut child: Vec<usize> =
                        cone.iter().copied().filter(|&i| i != drop).collect();
                    child.push(new_ray);
                    child.sort_unstable();
                    cones.push(child);
                }
            } else {
                cones.push(cone.clone());
            }
        }
        Ok(Fan::from_parts_unchecked(self.dim, rays, cones))
    }

    /// Searches for a unimodular lattice map carrying this fan onto the
    /// other: rays to rays bijectively, maximal cones to maximal cones.
    /// Returns the matrix when one exists. Requires spanning rays.
    pub fn lattice_isomorphic(&self, other: &Fan) -> Option<IntMatrix> {
        if self.dim != other.dim
            || self.rays.len() != other.rays.len()
            || self.max_cones.len() != other.max_cones.len()
        {
            return None;
        }
        let mut mults_a = self.multiplicities();
        let mut mults_b = other.multiplicities();
        mults_a.sort();
        mults_b.sort();
        if mults_a != mults_b {
            return None;
        }
        // Greedy spanning subset of this fan's rays; the image of its rays
        // determines the candidate matrix.
        let mut basis: Vec<usize> = Vec::new();
        for i in 0..self.rays.len() {
            if basis.len() == self.dim {
                break;
            }
            let mut rows: Vec<IntVec> = basis.iter().map(|&b| self.rays[b].clone()).collect();
            rows.push(self.rays[i].clone());
            if IntMatrix::from_rows(&rows).rank() == rows.len() {
                basis.push(i);
            }
        }
        if basis.len() != self.dim {
            return None;
        }
        let v = IntMatrix::from_cols(
            &basis.iter().map(|&i| self.rays[i].clone()).collect::<Vec<_>>(),
        );
        let det_v = v.determinant().expect("square");
        let adj_v = v.adjugate().expect("square");
        let other_ray_index: BTreeMap<&IntVec, usize> =
            other.rays.iter().enumerate().map(|(i, r)| (r, i)).collect();
        let other_cones: BTreeSet<&[usize]> =
            other.max_cones.iter().map(|c| c.as_slice()).collect();

        'candidates: for tuple in injective_tuples(other.rays.len(), self.dim) {
            let w = IntMatrix::from_cols(
                &tuple.iter().map(|&i| other.rays[i].clone()).collect::<Vec<_>>(),
            );
            let scaled = w.mul(&adj_v);
            let mut entries = Vec::with_capacity(self.dim * self.dim);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    let e = scaled.get(i, j);
                    if !(e % &det_v).is_zero() {
                        continue 'candidates;
                    }
                    entries.push(e / &det_v);
                }
            }
            let a = IntMatrix::new(self.dim, self.dim, entries);
            if !a.determinant().expect("square").abs().is_one() {
                continue;
            }
            let mut perm = Vec::with_capacity(self.rays.len());
            for r in self.rays.iter() {
                match other_ray_index.get(&a.mul_vec(r)) {
                    Some(&j) => perm.push(j),
                    None => continue 'candidates,
                }
            }
            for cone in &self.max_cones {
                let mut image: Vec<usize> = cone.iter().map(|&i| perm[i]).collect();
                image.sort_unstable();
                if !other_cones.contains(image.as_slice()) {
                    continue 'candidates;
                }
            }
            return Some(a);
        }
        None
    }
}

/// Unimodular matrix U with U q = (g, 0, .., 0) for g = gcd of the entries.
fn clear_to_first(q: &[Int]) -> IntMatrix {
    let n = q.len();
    let mut u = IntMatrix::identity(n);
    let mut q = q.to_vec();
    for i in 1..n {
        if q[i].is_zero() {
            continue;
        }
        let gcd = num::Integer::extended_gcd(&q[0], &q[i]);
        let (g, s, t) = (gcd.gcd, gcd.x, gcd.y);
        // Rows 0 and i are replaced by a unimodular combination sending
        // (q_0, q_i) to (g, 0).
        let c0 = -(&q[i] / &g);
        let c1 = &q[0] / &g;
        let row0: IntVec = (0..n)
            .map(|j| &s * u.get(0, j) + &t * u.get(i, j))
            .collect();
        let rowi: IntVec = (0..n)
            .map(|j| &c0 * u.get(0, j) + &c1 * u.get(i, j))
            .collect();
        let mut data = Vec::with_capacity(n * n);
        for r in 0..n {
            for j in 0..n {
                data.push(if r == 0 {
                    row0[j].clone()
                } else if r == i {
                    rowi[j].clone()
                } else {
                    u.get(r, j).clone()
                });
            }
        }
        u = IntMatrix::new(n, n, data);
        q[0] = g;
        q[i] = Int::zero();
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_int;

    fn iv(v: &[i64]) -> IntVec {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    fn rays2(rs: &[[i64; 2]]) -> Vec<IntVec> {
        rs.iter().map(|r| iv(r)).collect()
    }

    fn fan2(rs: &[[i64; 2]], cones: &[&[usize]]) -> Result<Fan, FanError> {
        Fan::new(2, rays2(rs), cones.iter().map(|c| c.to_vec()).collect())
    }

    #[test]
    fn projective_plane_basics() {
        let fan = Fan::projective_space(2).unwrap();
        assert_eq!(fan.rays().len(), 3);
        assert_eq!(fan.max_cones().len(), 3);
        assert!(fan.is_complete());
        assert!(fan.is_smooth());
        assert_eq!(fan.multiplicities(), vec![Int::one(); 3]);
        let cg = fan.class_group().unwrap();
        assert_eq!(cg, ClassGroup { free_rank: 1, torsion: vec![] });
        let report = fan.is_projective().unwrap();
        assert!(report.projective);
        match &report.certificate {
            LPCertificate::Feasible { point } => {
                let fs = fan.support_functionals(point);
                assert!(fan.is_strictly_convex_support(&fs));
            }
            _ => panic!("expected a support function"),
        }
    }

    #[test]
    fn validation_errors() {
        assert_eq!(Fan::new(0, vec![], vec![]), Err(FanError::InvalidDimension));
        assert_eq!(
            fan2(&[[1, 0], [0, 0]], &[&[0, 1]]),
            Err(FanError::ZeroRay { ray: 1 })
        );
        assert_eq!(
            fan2(&[[2, 4], [0, 1]], &[&[0, 1]]),
            Err(FanError::NonPrimitiveRay { ray: 0 })
        );
        assert_eq!(
            fan2(&[[1, 0], [0, 1], [1, 0]], &[&[0, 1], &[1, 2]]),
            Err(FanError::DuplicateRay { first: 0, second: 2 })
        );
        assert_eq!(
            fan2(&[[1, 0], [0, 1]], &[&[0, 3]]),
            Err(FanError::RayIndexOutOfRange { cone: 0, index: 3 })
        );
        assert_eq!(
            fan2(&[[1, 0], [0, 1]], &[&[0, 0]]),
            Err(FanError::DuplicateRayInCone { cone: 0 })
        );
        assert_eq!(
            fan2(&[[1, 0], [0, 1]], &[&[0, 1], &[1, 0]]),
            Err(FanError::DuplicateCone { first: 0, second: 1 })
        );
        assert_eq!(
            fan2(&[[1, 0], [0, 1]], &[&[0, 1], &[0]]),
            Err(FanError::ConeNotMaximal { contained: 1, container: 0 })
        );
        assert_eq!(
            fan2(&[[1, 0], [-1, 0]], &[&[0, 1]]),
            Err(FanError::DependentConeRays { cone: 0 })
        );
        assert_eq!(
            fan2(&[[1, 0], [0, 1], [1, 1], [1, -1]], &[&[0, 1], &[2, 3]]),
            Err(FanError::ConesOverlap { first: 0, second: 1 })
        );
        assert_eq!(
            fan2(&[[1, 0], [0, 1], [-1, -1]], &[&[0, 1]]),
            Err(FanError::DanglingRay { ray: 2 })
        );
        assert_eq!(
            fan2(&[[1, 0]], &[&[]]),
            Err(FanError::EmptyCone { cone: 0 })
        );
        assert_eq!(
            Fan::new(2, vec![iv(&[1, 0, 0])], vec![vec![0]]),
            Err(FanError::RayLengthMismatch { ray: 0 })
        );
    }

    #[test]
    fn completeness_witnesses() {
        let p2 = Fan::projective_space(2).unwrap();
        match p2.completeness() {
            Completeness::Complete { walls } => {
                assert_eq!(walls.len(), 3);
                assert_eq!(
                    walls,
                    vec![
                        Wall { facet: vec![0], cones: (0, 1) },
                        Wall { facet: vec![1], cones: (0, 2) },
                        Wall { facet: vec![2], cones: (1, 2) },
                    ]
                );
            }
            other => panic!("P2 fan should be complete, got {other:?}"),
        }

        // Drop one cone: the walls around it become boundary facets.
        let half = fan2(&[[1, 0], [0, 1], [-1, -1]], &[&[0, 1], &[0, 2]]).unwrap();
        match half.completeness() {
            Completeness::Incomplete {
                witness: IncompletenessWitness::UnpairedFacet { facet, .. },
            } => assert_eq!(facet, vec![1]),
            other => panic!("expected unpaired facet, got {other:?}"),
        }

        let line = fan2(&[[1, 0]], &[&[0]]).unwrap();
        assert_eq!(
            line.completeness(),
            Completeness::Incomplete {
                witness: IncompletenessWitness::LowDimensionalCone { cone: 0 }
            }
        );

        let empty = Fan::new(2, vec![], vec![]).unwrap();
        assert_eq!(
            empty.completeness(),
            Completeness::Incomplete { witness: IncompletenessWitness::NoCones }
        );

        // One-dimensional projective line: a single empty facet pairs the
        // two half-lines.
        let p1 = Fan::projective_space(1).unwrap();
        match p1.completeness() {
            Completeness::Complete { walls } => {
                assert_eq!(walls, vec![Wall { facet: vec![], cones: (0, 1) }]);
            }
            other => panic!("P1 fan should be complete, got {other:?}"),
        }
    }

    #[test]
    fn weighted_1123_multiplicities() {
        // Presentation from the quotient construction must match the
        // explicit one with rays e_1, e_2, e_3, (-1, -2, -3).
        let explicit = Fan::new(
            3,
            vec![iv(&[1, 0, 0]), iv(&[0, 1, 0]), iv(&[0, 0, 1]), iv(&[-1, -2, -3])],
            k_subsets(4, 3),
        )
        .unwrap();
        assert!(explicit.is_complete());
        assert!(!explicit.is_smooth());
        let mults: Vec<Int> = explicit.multiplicities();
        // Cones in lexicographic order: {0,1,2}, {0,1,3}, {0,2,3}, {1,2,3}.
        assert_eq!(mults, vec![Int::from(1), Int::from(3), Int::from(2), Int::from(1)]);
        let cg = explicit.class_group().unwrap();
        assert_eq!(cg, ClassGroup { free_rank: 1, torsion: vec![] });
        assert!(explicit.is_projective().unwrap().projective);

        let generated = Fan::weighted_projective(&[1, 1, 2, 3]).unwrap();
        assert!(generated.lattice_isomorphic(&explicit).is_some());

        let p2_again = Fan::weighted_projective(&[1, 1, 1]).unwrap();
        assert!(p2_again.lattice_isomorphic(&Fan::projective_space(2).unwrap()).is_some());
    }

    #[test]
    fn weighted_projective_rejects_bad_weights() {
        assert_eq!(
            Fan::weighted_projective(&[1, 0, 2]),
            Err(FanError::WeightsNotPositive)
        );
        assert_eq!(
            Fan::weighted_projective(&[2, 4, 6]),
            Err(FanError::WeightsNotCoprime)
        );
        // gcd(2, 2) = 2 once the weight 1 is dropped.
        assert_eq!(
            Fan::weighted_projective(&[1, 2, 2]),
            Err(FanError::WeightsNotWellFormed { index: 0 })
        );
    }

    #[test]
    fn class_group_torsion() {
        // Quotient of the plane by a cyclic group of order three.
        let fan = fan2(&[[2, -1], [-1, 2], [-1, -1]], &[&[0, 1], &[0, 2], &[1, 2]]).unwrap();
        assert!(fan.is_complete());
        assert_eq!(fan.multiplicities(), vec![Int::from(3); 3]);
        assert_eq!(
            fan.class_group().unwrap(),
            ClassGroup { free_rank: 1, torsion: vec![Int::from(3)] }
        );
    }

    #[test]
    fn hirzebruch_family() {
        for r in 0..=5 {
            let fan = Fan::hirzebruch(r).unwrap();
            assert!(fan.is_complete(), "r = {r}");
            assert!(fan.is_smooth(), "r = {r}");
            assert!(fan.is_projective().unwrap().projective, "r = {r}");
            assert_eq!(
                fan.class_group().unwrap(),
                ClassGroup { free_rank: 2, torsion: vec![] }
            );
            assert_eq!(fan.walls().unwrap().len(), 4);
        }
        assert_eq!(Fan::hirzebruch(-1), Err(FanError::NegativeParameter));
    }

    #[test]
    fn products() {
        let p1 = Fan::projective_space(1).unwrap();
        let p2 = Fan::projective_space(2).unwrap();
        let p1xp1 = Fan::product(&p1, &p1).unwrap();
        assert!(p1xp1.is_complete() && p1xp1.is_smooth());
        assert_eq!(p1xp1.max_cones().len(), 4);
        assert_eq!(
            p1xp1.class_group().unwrap(),
            ClassGroup { free_rank: 2, torsion: vec![] }
        );
        let p1xp2 = Fan::product(&p1, &p2).unwrap();
        assert_eq!(p1xp2.rays().len(), 5);
        assert_eq!(p1xp2.max_cones().len(), 6);
        assert!(p1xp2.is_complete() && p1xp2.is_smooth());
        assert!(p1xp2.is_projective().unwrap().projective);

        // The zeroth Hirzebruch surface is the same fan up to relabeling.
        let h0 = Fan::hirzebruch(0).unwrap();
        assert!(h0.lattice_isomorphic(&p1xp1).is_some());
        // The first one is a different surface.
        let h1 = Fan::hirzebruch(1).unwrap();
        assert!(h1.lattice_isomorphic(&p1xp1).is_none());
    }

    #[test]
    fn star_subdivision_blowup_of_plane() {
        let p2 = Fan::projective_space(2).unwrap();
        let bl = p2.star_subdivision(&iv(&[1, 1])).unwrap();
        assert_eq!(bl.rays().len(), 4);
        assert_eq!(bl.rays()[3], iv(&[1, 1]));
        let cone_set: BTreeSet<&[usize]> = bl.max_cones().iter().map(|c| c.as_slice()).collect();
        let expect: Vec<Vec<usize>> = vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]];
        assert_eq!(cone_set, expect.iter().map(|c| c.as_slice()).collect());
        assert!(bl.is_complete());
        assert!(bl.is_smooth());
        assert!(bl.is_projective().unwrap().projective);
        // Revalidate through the strict constructor.
        let revalidated = Fan::new(2, bl.rays().to_vec(), bl.max_cones().to_vec());
        assert!(revalidated.is_ok());
        // The result is the first Hirzebruch surface.
        assert!(bl.lattice_isomorphic(&Fan::hirzebruch(1).unwrap()).is_some());
    }

    #[test]
    fn star_subdivision_errors() {
        let p2 = Fan::projective_space(2).unwrap();
        assert_eq!(
            p2.star_subdivision(&iv(&[0, 0])),
            Err(FanError::SubdivisionPointZero)
        );
        assert_eq!(
            p2.star_subdivision(&iv(&[2, 0])),
            Err(FanError::PointIsExistingRay)
        );
        let half = fan2(&[[1, 0], [0, 1]], &[&[0, 1]]).unwrap();
        assert_eq!(
            half.star_subdivision(&iv(&[-1, -1])),
            Err(FanError::PointOutsideSupport)
        );
        // Subdividing and scaling agree: the point is primitivized.
        let a = p2.star_subdivision(&iv(&[2, 2])).unwrap();
        let b = p2.star_subdivision(&iv(&[1, 1])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn interior_subdivision_point() {
        // A point interior to a maximal cone splits it into dim children.
        let p3 = Fan::projective_space(3).unwrap();
        let sub = p3.star_subdivision(&iv(&[1, 1, 1])).unwrap();
        assert_eq!(sub.max_cones().len(), p3.max_cones().len() - 1 + 3);
        assert!(sub.is_complete());
        assert!(sub.is_smooth());
        let strict = Fan::new(3, sub.rays().to_vec(), sub.max_cones().to_vec());
        assert!(strict.is_ok());
    }

    #[test]
    fn lattice_iso_rejects_different_fans() {
        let p2 = Fan::projective_space(2).unwrap();
        let quot = fan2(&[[2, -1], [-1, 2], [-1, -1]], &[&[0, 1], &[0, 2], &[1, 2]]).unwrap();
        assert!(p2.lattice_isomorphic(&quot).is_none());
        let h0 = Fan::hirzebruch(0).unwrap();
        assert!(p2.lattice_isomorphic(&h0).is_none());
    }

    #[test]
    fn fan_data_round_trip() {
        let p2 = Fan::projective_space(2).unwrap();
        let data = p2.to_data().unwrap();
        let json = serde_json::to_string(&data).unwrap();
        let back: FanData = serde_json::from_str(&json).unwrap();
        assert_eq!(Fan::from_data(&back).unwrap(), p2);
        assert_eq!(
            data,
            FanData {
                dim: 2,
                rays: vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
                max_cones: vec![vec![0, 1], vec![0, 2], vec![1, 2]],
            }
        );
    }

    #[test]
    fn one_dimensional_fans() {
        let p1 = Fan::projective_space(1).unwrap();
        assert!(p1.is_complete());
        assert!(p1.is_smooth());
        assert!(p1.is_projective().unwrap().projective);
        assert_eq!(
            p1.class_group().unwrap(),
            ClassGroup { free_rank: 1, torsion: vec![] }
        );
        let affine = Fan::new(1, vec![iv(&[1])], vec![vec![0]]).unwrap();
        assert!(!affine.is_complete());
        assert_eq!(affine.is_projective(), Err(FanError::NotComplete));
    }

    #[test]
    fn projectivity_certificate_margins() {
        let fan = Fan::hirzebruch(3).unwrap();
        let walls = fan.walls().unwrap();
        let report = fan.is_projective().unwrap();
        let problem = fan.projectivity_lp(&walls);
        assert!(lp::verify_certificate(&problem, &report.certificate));
        match &report.certificate {
            LPCertificate::Feasible { point } => {
                let fs = fan.support_functionals(point);
                assert!(fan.is_strictly_convex_support(&fs));
                // Tampering with one functional must break convexity.
                let mut bad = fs.clone();
                bad[0][0] += rat_int(1);
                assert!(!fan.is_strictly_convex_support(&bad));
            }
            _ => panic!("Hirzebruch surfaces are projective"),
        }
    }
}
