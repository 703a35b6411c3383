//! Intersection numbers with the torus-invariant curves.
//!
//! In a complete simplicial fan every wall (a shared facet of two maximal
//! cones) carries an invariant curve. Its intersection numbers with the
//! invariant divisors are the coefficients of the unique relation among the
//! rays of the two cones, scaled by lattice multiplicities so that smooth
//! walls give the classical integer values. Nefness of a divisor, and with
//! it the dichotomy for the Seshadri constant of a divisor at the torus
//! identity, reduces to signs of finitely many such pairings.

use crate::fan::{Fan, FanError, Wall};
use crate::linalg::{Int, IntMatrix, IntVec, Rat};
use crate::positivity::{verify_positive_relation, PositiveRelation};
use num::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntersectionError {
    #[error("the given facet and cone pair is not a wall of the fan")]
    NotAWall,
    #[error("divisor coefficient count does not match the ray count")]
    DivisorShapeMismatch,
    #[error("relation coefficients must be positive integers")]
    NonIntegerCoefficients,
    #[error("divisor sign analysis needs dimension at least 2")]
    DimensionTooSmall,
    #[error(transparent)]
    Fan(#[from] FanError),
}

/// A torus-invariant divisor, one rational coefficient per ray.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantDivisor {
    pub coefficients: Vec<Rat>,
}

/// Numerical class of a curve: its pairing with every invariant divisor.
/// The entries always satisfy the exact relation sum_i (C . D_i) v_i = 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveClass {
    pub intersections: Vec<Rat>,
}

/// Nefness verdict with the first failing wall and its pairing value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NefReport {
    pub nef: bool,
    pub witness: Option<NefWitness>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NefWitness {
    pub wall: Wall,
    pub value: Rat,
}

/// Sign of the Seshadri constant of a divisor at the torus identity: never
/// a finite negative value, so failure of nefness means negative infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivisorSeshadriSign {
    NonNegative,
    NegativeInfinity,
}

/// Index in its saturation of the sublattice spanned by the given rays:
/// the multiplicity of the cone they span. One for the empty set.
fn sublattice_index(fan: &Fan, rays: &[usize]) -> Int {
    if rays.is_empty() {
        return Int::one();
    }
    let rows: Vec<IntVec> = rays.iter().map(|&i| fan.rays()[i].clone()).collect();
    IntMatrix::from_rows(&rows)
        .smith_normal_form()
        .factors
        .iter()
        .product()
}

fn pairing(class: &CurveClass, divisor: &InvariantDivisor) -> Rat {
    class
        .intersections
        .iter()
        .zip(&divisor.coefficients)
        .map(|(c, d)| c * d)
        .sum()
}

fn assert_class_relation(fan: &Fan, class: &CurveClass) {
    for k in 0..fan.dim() {
        let s: Rat = class
            .intersections
            .iter()
            .zip(fan.rays())
            .map(|(c, v)| c * Rat::from_integer(v[k].clone()))
            .sum();
        assert!(s.is_zero(), "curve class must pair to zero with the rays");
    }
}

/// The class of the invariant curve dual to a wall. The two off-rays enter
/// the wall relation with coefficients wall-mult over cone-mult, which
/// reduce to one on smooth cones; facet rays pick up the balancing
/// coefficients and all other rays pair to zero.
pub fn wall_curve_class(fan: &Fan, wall: &Wall) -> Result<CurveClass, IntersectionError> {
    let walls = fan.walls()?;
    if !walls.contains(wall) {
        return Err(IntersectionError::NotAWall);
    }
    let (a, b) = wall.cones;
    let va = fan.off_ray(a, &wall.facet);
    let vb = fan.off_ray(b, &wall.facet);
    let mut cols: Vec<IntVec> = vec![fan.rays()[va].clone(), fan.rays()[vb].clone()];
    for &i in &wall.facet {
        cols.push(fan.rays()[i].clone());
    }
    let kernel = IntMatrix::from_cols(&cols).kernel_basis();
    assert_eq!(kernel.len(), 1, "wall relation space is one-dimensional");
    let mut rel = kernel.into_iter().next().expect("one kernel vector");
    if rel[0].is_negative() {
        for x in rel.iter_mut() {
            *x = -x.clone();
        }
    }
    assert!(
        rel[0].is_positive() && rel[1].is_positive(),
        "off-rays sit on opposite sides of the wall hyperplane"
    );

    let wall_mult = Rat::from_integer(sublattice_index(fan, &wall.facet));
    let mult_a = Rat::from_integer(fan.cone_multiplicity(a));
    let mult_b = Rat::from_integer(fan.cone_multiplicity(b));
    let scale = (&wall_mult / &mult_a) / &rel[0];
    assert_eq!(
        &scale * &rel[1],
        &wall_mult / &mult_b,
        "multiplicity normalization is consistent across the wall"
    );

    let mut intersections = vec![Rat::zero(); fan.rays().len()];
    intersections[va] = &scale * &rel[0];
    intersections[vb] = &scale * &rel[1];
    for (k, &i) in wall.facet.iter().enumerate() {
        intersections[i] = &scale * &rel[2 + k];
    }
    let class = CurveClass { intersections };
    assert_class_relation(fan, &class);
    Ok(class)
}

/// Every wall of the fan with its curve class, in wall order.
pub fn all_wall_curves(fan: &Fan) -> Result<Vec<(Wall, CurveClass)>, IntersectionError> {
    let mut out = Vec::new();
    for wall in fan.walls()? {
        let class = wall_curve_class(fan, &wall)?;
        out.push((wall, class));
    }
    Ok(out)
}

/// A divisor is nef exactly when it pairs nonnegatively with every wall
/// curve; the witness is the first wall where that fails.
pub fn is_nef(fan: &Fan, divisor: &InvariantDivisor) -> Result<NefReport, IntersectionError> {
    if divisor.coefficients.len() != fan.rays().len() {
        return Err(IntersectionError::DivisorShapeMismatch);
    }
    for (wall, class) in all_wall_curves(fan)? {
        let value = pairing(&class, divisor);
        if value.is_negative() {
            return Ok(NefReport {
                nef: false,
                witness: Some(NefWitness { wall, value }),
            });
        }
    }
    Ok(NefReport { nef: true, witness: None })
}

/// The curve class of a positive relation with integer coefficients: the
/// coefficients themselves on the supporting rays, zero elsewhere.
pub fn relation_curve_class(
    fan: &Fan,
    rel: &PositiveRelation,
) -> Result<CurveClass, IntersectionError> {
    assert!(
        verify_positive_relation(fan, rel),
        "relation must be a verified vanishing positive combination"
    );
    if rel.coeffs.iter().any(|c| !c.is_integer()) {
        return Err(IntersectionError::NonIntegerCoefficients);
    }
    let mut intersections = vec![Rat::zero(); fan.rays().len()];
    for (&i, c) in rel.support.iter().zip(&rel.coeffs) {
        intersections[i] = c.clone();
    }
    let class = CurveClass { intersections };
    assert_class_relation(fan, &class);
    Ok(class)
}

/// Sign of the Seshadri constant of a divisor at the torus identity:
/// negative infinity exactly when the divisor is not nef, nonnegative
/// otherwise. Dimension one has no interior wall geometry to certify.
pub fn divisor_seshadri_sign_at_identity(
    fan: &Fan,
    divisor: &InvariantDivisor,
) -> Result<DivisorSeshadriSign, IntersectionError> {
    if fan.dim() < 2 {
        return Err(IntersectionError::DimensionTooSmall);
    }
    let report = is_nef(fan, divisor)?;
    if report.nef {
        Ok(DivisorSeshadriSign::NonNegative)
    } else {
        Ok(DivisorSeshadriSign::NegativeInfinity)
    }
}
