//! Arbitrary-precision integer and rational linear algebra.
//!
//! Everything in this module is exact: integers are `BigInt`, rationals are
//! always-reduced `BigRational`, and eliminations are fraction-free (Bareiss)
//! or rational Gaussian with no rounding anywhere.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision integer.
pub type Int = BigInt;
/// Arbitrary-precision rational, kept reduced with positive denominator.
pub type Rat = BigRational;
/// Lattice vector; length is fixed by the ambient dimension of its context.
pub type IntVec = Vec<Int>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("zero vector has no primitive representative")]
    ZeroVector,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
}

/// Shorthand for an integer rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Shorthand for the rational n/d.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

/// Formats a rational as `"p/q"`, or just `"p"` when the denominator is 1.
pub fn rat_to_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or `"k"` into a rational.
pub fn rat_from_str(s: &str) -> Result<Rat, ParseRatError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numer: Int = num.parse().map_err(|_| ParseRatError(s.to_string()))?;
    let denom: Int = match den {
        Some(d) => d.parse().map_err(|_| ParseRatError(s.to_string()))?,
        None => Int::one(),
    };
    if denom.is_zero() {
        return Err(ParseRatError(s.to_string()));
    }
    Ok(Rat::new(numer, denom))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse rational from {0:?}")]
pub struct ParseRatError(pub String);

/// Exact dot product of two integer vectors.
pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact dot product of a rational and an integer vector.
pub fn dot_rat_int(a: &[Rat], b: &[Int]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x * Rat::from_integer(y.clone()))
        .sum()
}

/// Divides a nonzero lattice vector by the gcd of its entries.
pub fn primitive(v: &[Int]) -> Result<IntVec, LinalgError> {
    let mut g = Int::zero();
    for x in v {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return Err(LinalgError::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Int>) -> Self {
        assert_eq!(data.len(), rows * cols, "shape mismatch");
        IntMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[IntVec]) -> Self {
        let nc = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == nc), "ragged rows");
        IntMatrix {
            rows: rows.len(),
            cols: nc,
            data: rows.iter().flatten().cloned().collect(),
        }
    }

    pub fn from_cols(cols: &[IntVec]) -> Self {
        Self::from_rows(cols).transpose()
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix {
            rows: n,
            cols: n,
            data: vec![Int::zero(); n * n],
        };
        for i in 0..n {
            *m.get_mut(i, i) = Int::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut Int {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j).clone());
            }
        }
        IntMatrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Matrix-vector product.
    pub fn mul_vec(&self, v: &[Int]) -> IntVec {
        assert_eq!(v.len(), self.cols, "shape mismatch");
        (0..self.rows).map(|i| dot_int(self.row(i), v)).collect()
    }

    /// Matrix product.
    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                data.push(
                    (0..self.cols)
                        .map(|k| self.get(i, k) * rhs.get(k, j))
                        .sum(),
                );
            }
        }
        IntMatrix::new(self.rows, rhs.cols, data)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<Int, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Int::one());
        }
        let mut m: Vec<Vec<Int>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = 1i32;
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return Ok(Int::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    // Bareiss: division by the previous pivot is exact.
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    debug_assert!((&num % &prev).is_zero());
                    m[i][j] = num / &prev;
                }
                m[i][k] = Int::zero();
            }
            prev = m[k][k].clone();
        }
        let det = m[n - 1][n - 1].clone();
        Ok(if sign < 0 { -det } else { det })
    }

    /// Adjugate matrix: `self * adjugate = det * identity`.
    pub fn adjugate(&self) -> Result<IntMatrix, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut adj = IntMatrix {
            rows: n,
            cols: n,
            data: vec![Int::zero(); n * n],
        };
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(i, j);
                let cof = minor.determinant()?;
                *adj.get_mut(j, i) = if (i + j) % 2 == 0 { cof } else { -cof };
            }
        }
        Ok(adj)
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> IntMatrix {
        let mut data = Vec::with_capacity((self.rows - 1) * (self.cols - 1));
        for i in 0..self.rows {
            if i == skip_row {
                continue;
            }
            for j in 0..self.cols {
                if j != skip_col {
                    data.push(self.get(i, j).clone());
                }
            }
        }
        IntMatrix {
            rows: self.rows - 1,
            cols: self.cols - 1,
            data,
        }
    }

    /// Exact rank over the rationals.
    pub fn rank(&self) -> usize {
        let m: Vec<Vec<Rat>> = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| Rat::from_integer(x.clone()))
                    .collect()
            })
            .collect();
        rref(m).1.len()
    }

    /// Basis of the right kernel over the rationals: all w with `self * w = 0`.
    pub fn kernel_basis(&self) -> Vec<Vec<Rat>> {
        let m: Vec<Vec<Rat>> = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| Rat::from_integer(x.clone()))
                    .collect()
            })
            .collect();
        let (r, pivots) = rref(m);
        let is_pivot: Vec<bool> = {
            let mut v = vec![false; self.cols];
            for &p in &pivots {
                v[p] = true;
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut w = vec![Rat::zero(); self.cols];
            w[free] = Rat::one();
            for (row, &p) in pivots.iter().enumerate() {
                w[p] = -r[row][free].clone();
            }
            basis.push(w);
        }
        basis
    }

    /// Smith normal form: the invariant-factor chain of the matrix.
    pub fn smith_normal_form(&self) -> SmithNormalForm {
        let (nr, nc) = (self.rows, self.cols);
        let mut m: Vec<Vec<Int>> = (0..nr).map(|i| self.row(i).to_vec()).collect();
        let mut t = 0;
        while t < nr.min(nc) {
            let Some((pi, pj)) = min_abs_nonzero(&m, t) else {
                break;
            };
            m.swap(t, pi);
            swap_cols(&mut m, t, pj);
            loop {
                // Clear the pivot column; a nonzero remainder becomes the new
                // (strictly smaller) pivot on the next pass.
                let mut dirty = false;
                for i in t + 1..nr {
                    if m[i][t].is_zero() {
                        continue;
                    }
                    let q = &m[i][t] / &m[t][t];
                    for j in t..nc {
                        let sub = &q * &m[t][j];
                        m[i][j] -= sub;
                    }
                    if !m[i][t].is_zero() {
                        m.swap(i, t);
                        dirty = true;
                    }
                }
                if dirty {
                    continue;
                }
                for j in t + 1..nc {
                    if m[t][j].is_zero() {
                        continue;
                    }
                    let q = &m[t][j] / &m[t][t];
                    for i in t..nr {
                        let sub = &q * &m[i][t];
                        m[i][j] -= sub;
                    }
                    if !m[t][j].is_zero() {
                        swap_cols(&mut m, j, t);
                        dirty = true;
                    }
                }
                if dirty {
                    continue;
                }
                // Pivot must divide the rest of the submatrix for the
                // invariant-factor chain.
                let mut fixed = true;
                'scan: for i in t + 1..nr {
                    for j in t + 1..nc {
                        if !(&m[i][j] % &m[t][t]).is_zero() {
                            for k in t..nc {
                                let add = m[i][k].clone();
                                m[t][k] += add;
                            }
                            fixed = false;
                            break 'scan;
                        }
                    }
                }
                if fixed {
                    break;
                }
            }
            if m[t][t].is_negative() {
                for j in t..nc {
                    m[t][j] = -m[t][j].clone();
                }
            }
            t += 1;
        }
        SmithNormalForm {
            factors: (0..t).map(|i| m[i][i].clone()).collect(),
            rows: nr,
            cols: nc,
        }
    }
}

fn swap_cols(m: &mut [Vec<Int>], a: usize, b: usize) {
    if a != b {
        for row in m.iter_mut() {
            row.swap(a, b);
        }
    }
}

fn min_abs_nonzero(m: &[Vec<Int>], t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in m.iter().enumerate().skip(t) {
        for (j, x) in row.iter().enumerate().skip(t) {
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if m[bi][bj].abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Invariant factors `d_1 | d_2 | ... | d_r` of an integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithNormalForm {
    pub factors: Vec<Int>,
    pub rows: usize,
    pub cols: usize,
}

impl SmithNormalForm {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    /// Free rank of `Z^rows / (matrix * Z^cols)`.
    pub fn cokernel_free_rank(&self) -> usize {
        self.rows - self.factors.len()
    }

    /// Nontrivial torsion in the cokernel: the invariant factors > 1.
    pub fn cokernel_torsion(&self) -> Vec<Int> {
        self.factors.iter().filter(|d| !d.is_one()).cloned().collect()
    }
}

/// Reduced row echelon form over the rationals; returns the pivot columns.
pub fn rref(mut m: Vec<Vec<Rat>>) -> (Vec<Vec<Rat>>, Vec<usize>) {
    let nr = m.len();
    let nc = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..nc {
        if row == nr {
            break;
        }
        let Some(p) = (row..nr).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for j in col..nc {
            m[row][j] *= &inv;
        }
        for i in 0..nr {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..nc {
                    let sub = &f * &m[row][j];
                    m[i][j] -= sub;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (m, pivots)
}

/// Solves `m x = rhs` when the solution exists and is unique, else `None`.
pub fn solve_unique(m: &[Vec<Rat>], rhs: &[Rat]) -> Option<Vec<Rat>> {
    let nr = m.len();
    assert_eq!(rhs.len(), nr, "shape mismatch");
    let nc = m.first().map_or(0, |r| r.len());
    let aug: Vec<Vec<Rat>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(aug);
    if pivots.contains(&nc) {
        return None; // inconsistent
    }
    if pivots.len() != nc {
        return None; // underdetermined
    }
    let mut x = vec![Rat::zero(); nc];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r[row][nc].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(v: &[i64]) -> IntVec {
        v.iter().map(|&x| Int::from(x)).collect()
    }

    fn mat(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| iv(r)).collect::<Vec<_>>())
    }

    /// Independent determinant oracle: cofactor expansion along the first row.
    fn det_cofactor(m: &IntMatrix) -> Int {
        let n = m.rows();
        if n == 0 {
            return Int::one();
        }
        if n == 1 {
            return m.get(0, 0).clone();
        }
        let mut acc = Int::zero();
        for j in 0..n {
            let sub = det_cofactor(&m.minor(0, j));
            let term = m.get(0, j) * sub;
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    /// Independent rank oracle: naive rational Gaussian elimination.
    fn rank_gauss(m: &IntMatrix) -> usize {
        let mut rows: Vec<Vec<Rat>> = (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .map(|x| Rat::from_integer(x.clone()))
                    .collect()
            })
            .collect();
        let mut rank = 0;
        for col in 0..m.cols() {
            let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, p);
            for i in rank + 1..rows.len() {
                if !rows[i][col].is_zero() {
                    let f = &rows[i][col] / &rows[rank][col];
                    for j in col..m.cols() {
                        let sub = &f * &rows[rank][j];
                        rows[i][j] -= sub;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// gcd of all k x k minors, the determinantal-divisor oracle for SNF.
    fn minor_gcd(m: &IntMatrix, k: usize) -> Int {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in 0..n {
                for mut rest in subsets(n, k - 1) {
                    if rest.iter().all(|&x| x > first) {
                        rest.insert(0, first);
                        out.push(rest);
                    }
                }
            }
            out
        }
        let mut g = Int::zero();
        for rs in subsets(m.rows(), k) {
            for cs in subsets(m.cols(), k) {
                let data: Vec<Int> = rs
                    .iter()
                    .flat_map(|&i| cs.iter().map(move |&j| m.get(i, j).clone()))
                    .collect();
                let sub = IntMatrix::new(k, k, data);
                g = g.gcd(&sub.determinant().unwrap());
            }
        }
        g
    }

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive(&iv(&[2, 4, 6])).unwrap(), iv(&[1, 2, 3]));
        assert_eq!(primitive(&iv(&[-1, 0])).unwrap(), iv(&[-1, 0]));
        assert_eq!(primitive(&iv(&[0, 0, 0])), Err(LinalgError::ZeroVector));
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(IntMatrix::identity(3).determinant().unwrap(), Int::one());
        let m = mat(&[&[0, 1, 0], &[0, 0, 1], &[-1, -2, -3]]);
        assert_eq!(det_cofactor(&m), Int::from(-1));
        assert_eq!(m.determinant().unwrap(), Int::from(-1));
        let m = mat(&[&[1, 0, 0], &[0, 1, 0], &[-1, -2, -3]]);
        assert_eq!(det_cofactor(&m), Int::from(-3));
        assert_eq!(m.determinant().unwrap(), Int::from(-3));
        assert!(mat(&[&[1, 2]]).determinant().is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(mat(&[&[0, 1], &[0, -1]]).rank(), 1);
        assert_eq!(mat(&[&[1, 0], &[0, 1]]).rank(), 2);
        // Hirzebruch surface rays, r = 2.
        let rays = mat(&[&[1, 0], &[0, 1], &[0, -1], &[-1, 2]]);
        assert_eq!(rank_gauss(&rays), 2);
        assert_eq!(rays.rank(), 2);
    }

    #[test]
    fn smith_examples() {
        let m = mat(&[&[2, 0], &[0, 3]]);
        let snf = m.smith_normal_form();
        assert_eq!(snf.factors, iv(&[1, 6]));
        assert_eq!(minor_gcd(&m, 1), Int::one());
        assert_eq!(minor_gcd(&m, 2), Int::from(6));

        let snf = IntMatrix::identity(4).smith_normal_form();
        assert_eq!(snf.factors, iv(&[1, 1, 1, 1]));

        // Ray matrix of the projective plane: cokernel is Z.
        let m = mat(&[&[1, 0], &[0, 1], &[-1, -1]]);
        let snf = m.smith_normal_form();
        assert_eq!(snf.factors, iv(&[1, 1]));
        assert_eq!(snf.cokernel_free_rank(), 1);
        assert!(snf.cokernel_torsion().is_empty());
    }

    #[test]
    fn kernel_examples() {
        let m = mat(&[&[0, 0], &[1, -1]]); // columns (0,1) and (0,-1)
        let k = m.kernel_basis();
        assert_eq!(k, vec![vec![Rat::one(), Rat::one()]]);

        let m = IntMatrix::from_cols(&[iv(&[1, 0]), iv(&[0, 1]), iv(&[-1, -1])]);
        let k = m.kernel_basis();
        assert_eq!(k, vec![vec![Rat::one(), Rat::one(), Rat::one()]]);

        let m = IntMatrix::from_cols(&[
            iv(&[1, 0, 0]),
            iv(&[0, 1, 0]),
            iv(&[0, 0, 1]),
            iv(&[-1, -2, -3]),
        ]);
        let k = m.kernel_basis();
        assert_eq!(
            k,
            vec![vec![rat_int(1), rat_int(2), rat_int(3), rat_int(1)]]
        );
    }

    #[test]
    fn adjugate_identity() {
        let m = mat(&[&[2, 1, 0], &[0, 1, 1], &[1, 0, 3]]);
        let det = m.determinant().unwrap();
        let adj = m.adjugate().unwrap();
        let prod = m.mul(&adj);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { det.clone() } else { Int::zero() };
                assert_eq!(prod.get(i, j), &expect);
            }
        }
    }

    #[test]
    fn rat_string_round_trip() {
        assert_eq!(rat_to_string(&rat(-3, 2)), "-3/2");
        assert_eq!(rat_to_string(&rat_int(7)), "7");
        assert_eq!(rat_from_str("-3/2").unwrap(), rat(-3, 2));
        assert_eq!(rat_from_str("7").unwrap(), rat_int(7));
        assert_eq!(rat_from_str("4/6").unwrap(), rat(2, 3));
        assert!(rat_from_str("1/0").is_err());
        assert!(rat_from_str("x").is_err());
    }

    proptest! {
        #[test]
        fn det_matches_cofactor_oracle(
            n in 1usize..=4,
            entries in proptest::collection::vec(-9i64..=9, 16),
        ) {
            let data: Vec<Int> = entries[..n * n].iter().map(|&x| Int::from(x)).collect();
            let m = IntMatrix::new(n, n, data);
            prop_assert_eq!(m.determinant().unwrap(), det_cofactor(&m));
        }

        #[test]
        fn primitive_scaling_invariance(
            v in proptest::collection::vec(-20i64..=20, 1..=5),
            k in 1i64..=7,
        ) {
            prop_assume!(v.iter().any(|&x| x != 0));
            let base = iv(&v);
            let scaled: IntVec = base.iter().map(|x| x * Int::from(k)).collect();
            prop_assert_eq!(primitive(&scaled).unwrap(), primitive(&base).unwrap());
        }

        #[test]
        fn smith_chain_divides_and_matches_minor_gcd(
            rows in 1usize..=3,
            cols in 1usize..=3,
            entries in proptest::collection::vec(-6i64..=6, 9),
        ) {
            let data: Vec<Int> = entries[..rows * cols].iter().map(|&x| Int::from(x)).collect();
            let m = IntMatrix::new(rows, cols, data);
            let snf = m.smith_normal_form();
            for w in snf.factors.windows(2) {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
            // d_1 * ... * d_k equals the gcd of k x k minors.
            let mut prod = Int::one();
            for (k, d) in snf.factors.iter().enumerate() {
                prod *= d;
                prop_assert_eq!(&prod, &minor_gcd(&m, k + 1));
            }
            prop_assert_eq!(snf.rank(), m.rank());
        }

        #[test]
        fn kernel_vectors_annihilate(
            rows in 1usize..=4,
            cols in 1usize..=4,
            entries in proptest::collection::vec(-9i64..=9, 16),
        ) {
            let data: Vec<Int> = entries[..rows * cols].iter().map(|&x| Int::from(x)).collect();
            let m = IntMatrix::new(rows, cols, data);
            for w in m.kernel_basis() {
                for i in 0..rows {
                    let s: Rat = m.row(i).iter().zip(&w)
                        .map(|(a, x)| Rat::from_integer(a.clone()) * x)
                        .sum();
                    prop_assert!(s.is_zero());
                }
            }
            prop_assert_eq!(m.kernel_basis().len(), cols - m.rank());
        }
    }
}
