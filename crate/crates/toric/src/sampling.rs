//! Seeded random fans and a randomized completeness cross-check.
//!
//! The generators here feed property tests: random complete surface fans
//! built from angularly sorted rays, random interior points for star
//! subdivisions, and a ray-shooting oracle that probes completeness by
//! exact membership counts of random integer directions. Everything is
//! deterministic for a fixed seed, and every individual check is exact.

use crate::fan::Fan;
use crate::linalg::{primitive, Int, IntVec, Rat};
use num::{Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use std::cmp::Ordering;

/// How many maximal cones contain the given direction, decided exactly.
fn membership_count(fan: &Fan, dir: &[Int]) -> usize {
    let point: Vec<Rat> = dir.iter().map(|x| Rat::from_integer(x.clone())).collect();
    (0..fan.max_cones().len())
        .filter(|&c| fan.cone_contains(c, &point))
        .count()
}

/// Ray-shooting completeness probe: draws random nonzero integer
/// directions until `samples` of them land in the interior of some maximal
/// cone, resampling directions that hit a wall. Any direction covered by
/// no cone at all disproves completeness; a complete run of interior hits
/// is strong randomized evidence for it.
pub fn monte_carlo_complete(fan: &Fan, samples: usize, seed: u64) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counted = 0usize;
    let mut drawn = 0usize;
    while counted < samples {
        drawn += 1;
        assert!(
            drawn <= 100 * samples + 1000,
            "wall-direction resampling failed to converge"
        );
        let dir = random_direction(&mut rng, fan.dim(), 1000);
        match membership_count(fan, &dir) {
            0 => return false,
            1 => counted += 1,
            _ => {}
        }
    }
    true
}

/// A uniformly random nonzero integer vector with coordinates in
/// [-bound, bound].
pub fn random_direction<R: Rng>(rng: &mut R, dim: usize, bound: i64) -> IntVec {
    loop {
        let v: IntVec = (0..dim)
            .map(|_| Int::from(rng.gen_range(-bound..=bound)))
            .collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

fn cross(a: &[Int], b: &[Int]) -> Int {
    &a[0] * &b[1] - &a[1] * &b[0]
}

/// Strict counterclockwise order on nonzero plane vectors, starting at the
/// positive x axis. Exact: quadrant halves first, cross products within a
/// half. Distinct primitive rays never compare equal.
fn angular_cmp(a: &[Int], b: &[Int]) -> Ordering {
    let half = |v: &[Int]| -> u8 {
        if v[1].is_positive() || (v[1].is_zero() && v[0].is_positive()) {
            0
        } else {
            1
        }
    };
    half(a).cmp(&half(b)).then_with(|| {
        let c = cross(a, b);
        if c.is_positive() {
            Ordering::Less
        } else if c.is_negative() {
            Ordering::Greater
        } else {
            Ordering::Equal
        }
    })
}

/// A random complete surface fan: distinct primitive rays sorted by angle,
/// consecutive pairs as maximal cones. Sampling leaves angular gaps of at
/// least a half turn sometimes; those are plugged deterministically with
/// the direction opposite the gap's bounding pair, so the result is always
/// a valid complete fan.
pub fn random_complete_surface_fan<R: Rng>(rng: &mut R, target_rays: usize, bound: i64) -> Fan {
    assert!(target_rays >= 3, "a complete surface fan needs three rays");
    let mut rays: Vec<IntVec> = Vec::new();
    while rays.len() < target_rays {
        let dir = random_direction(rng, 2, bound);
        let p = primitive(&dir).expect("direction is nonzero");
        if !rays.contains(&p) {
            rays.push(p);
        }
    }
    rays.sort_by(|a, b| angular_cmp(a, b));

    // Plug every angular gap of a half turn or more; each insertion
    // strictly shrinks the widest gap, so this terminates.
    loop {
        let k = rays.len();
        let mut insert = None;
        for i in 0..k {
            let a = &rays[i];
            let b = &rays[(i + 1) % k];
            if cross(a, b).is_positive() {
                continue;
            }
            let sum = vec![&a[0] + &b[0], &a[1] + &b[1]];
            let plug = if sum.iter().all(|x| x.is_zero()) {
                // Opposite rays: take the perpendicular on the gap side.
                vec![-a[1].clone(), a[0].clone()]
            } else {
                let s = primitive(&sum).expect("nonzero sum");
                vec![-s[0].clone(), -s[1].clone()]
            };
            insert = Some(plug);
            break;
        }
        match insert {
            Some(p) => {
                debug_assert!(!rays.contains(&p), "plug lies in an open gap");
                rays.push(p);
                rays.sort_by(|a, b| angular_cmp(a, b));
            }
            None => break,
        }
    }

    let k = rays.len();
    let cones: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            let mut c = vec![i, (i + 1) % k];
            c.sort_unstable();
            c
        })
        .collect();
    Fan::new(2, rays, cones).expect("sorted consecutive pairs form a complete fan")
}

/// A random primitive point interior to some positive-dimensional face of
/// a random maximal cone: small positive weights on a random nonempty
/// subset of the cone's rays.
pub fn random_interior_point<R: Rng>(rng: &mut R, fan: &Fan) -> IntVec {
    let cone = &fan.max_cones()[rng.gen_range(0..fan.max_cones().len())];
    let size = rng.gen_range(1..=cone.len());
    let mut picks = cone.clone();
    for k in 0..size {
        let j = rng.gen_range(k..picks.len());
        picks.swap(k, j);
    }
    picks.truncate(size);
    let mut point = vec![Int::zero(); fan.dim()];
    for &i in &picks {
        let w = Int::from(rng.gen_range(1..=3));
        for (coord, ray_coord) in point.iter_mut().zip(&fan.rays()[i]) {
            *coord += &w * ray_coord;
        }
    }
    primitive(&point).expect("positive combination of rays is nonzero")
}

/// Iterated star subdivision at random interior points, skipping draws
/// that coincide with existing rays or exceed the coordinate bound. Each
/// performed step keeps the fan complete and adds exactly one ray.
pub fn random_subdivided_fan<R: Rng>(
    rng: &mut R,
    base: &Fan,
    steps: usize,
    height_bound: i64,
) -> Fan {
    let mut fan = base.clone();
    let mut performed = 0usize;
    let mut attempts = 0usize;
    while performed < steps && attempts < 20 * steps + 20 {
        attempts += 1;
        let point = random_interior_point(rng, &fan);
        if point.iter().any(|c| c.abs() > Int::from(height_bound)) {
            continue;
        }
        if let Ok(next) = fan.star_subdivision(&point) {
            fan = next;
            performed += 1;
        }
    }
    fan
}
