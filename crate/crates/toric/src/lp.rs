//! Exact rational linear programming with certified outcomes.
//!
//! Two-phase primal simplex over `BigRational` using Bland's rule, so every
//! run terminates and every answer is exact. Feasibility queries return a
//! point or a Farkas vector, and either certificate is re-verified against
//! the original problem before it is handed back.

use crate::linalg::Rat;
use num::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub coeffs: Vec<Rat>,
    pub sense: Sense,
    pub rhs: Rat,
}

impl LinearConstraint {
    pub fn le(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        LinearConstraint { coeffs, sense: Sense::Le, rhs }
    }

    pub fn eq(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        LinearConstraint { coeffs, sense: Sense::Eq, rhs }
    }

    pub fn ge(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        LinearConstraint { coeffs, sense: Sense::Ge, rhs }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub direction: Direction,
    pub coeffs: Vec<Rat>,
}

/// A linear program over rational variables.
///
/// Each variable either has an exact lower bound or is free; upper bounds and
/// strict inequalities are expressed by the caller through extra constraints
/// (strictness via an explicit margin, e.g. `>= 1` for a homogeneous system).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LPProblem {
    pub num_vars: usize,
    pub constraints: Vec<LinearConstraint>,
    pub lower_bounds: Vec<Option<Rat>>,
    pub objective: Option<Objective>,
}

impl LPProblem {
    /// Pure feasibility problem: no objective.
    pub fn feasibility(
        num_vars: usize,
        constraints: Vec<LinearConstraint>,
        lower_bounds: Vec<Option<Rat>>,
    ) -> Self {
        LPProblem { num_vars, constraints, lower_bounds, objective: None }
    }

    /// All variables bounded below by zero.
    pub fn nonnegative_bounds(num_vars: usize) -> Vec<Option<Rat>> {
        vec![Some(Rat::zero()); num_vars]
    }

    fn check_shape(&self) -> Result<(), LPError> {
        if self.lower_bounds.len() != self.num_vars {
            return Err(LPError::ShapeMismatch);
        }
        if self.constraints.iter().any(|c| c.coeffs.len() != self.num_vars) {
            return Err(LPError::ShapeMismatch);
        }
        if let Some(obj) = &self.objective {
            if obj.coeffs.len() != self.num_vars {
                return Err(LPError::ShapeMismatch);
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LPError {
    #[error("constraint or bound length does not match the variable count")]
    ShapeMismatch,
    #[error("optimization requested on a problem without an objective")]
    MissingObjective,
}

/// Exact, independently checkable answer to a feasibility query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LPCertificate {
    Feasible { point: Vec<Rat> },
    /// Farkas vector over the constraint rows; see [`verify_certificate`]
    /// for the exact conditions it satisfies.
    Infeasible { farkas: Vec<Rat> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LPOutcome {
    Optimal { point: Vec<Rat>, value: Rat },
    /// Feasible direction along which the objective improves forever.
    Unbounded { ray: Vec<Rat> },
    Infeasible { farkas: Vec<Rat> },
}

/// Checks a certificate against the problem by pure evaluation.
///
/// A `Feasible` point must satisfy every constraint and bound exactly. An
/// `Infeasible` vector `y` must satisfy `y_i <= 0` on `Le` rows, `y_i >= 0`
/// on `Ge` rows, `(y^T A)_j = 0` for free variables, `(y^T A)_j <= 0` for
/// bounded ones, and `y^T b - sum_j (y^T A)_j l_j > 0` over the bounded
/// variables. Any feasible point would contradict that strict inequality,
/// so a verified vector is a proof of infeasibility.
pub fn verify_certificate(problem: &LPProblem, cert: &LPCertificate) -> bool {
    if problem.check_shape().is_err() {
        return false;
    }
    match cert {
        LPCertificate::Feasible { point } => {
            if point.len() != problem.num_vars {
                return false;
            }
            for (x, bound) in point.iter().zip(&problem.lower_bounds) {
                if let Some(l) = bound {
                    if x < l {
                        return false;
                    }
                }
            }
            problem.constraints.iter().all(|c| {
                let lhs: Rat = c.coeffs.iter().zip(point).map(|(a, x)| a * x).sum();
                match c.sense {
                    Sense::Le => lhs <= c.rhs,
                    Sense::Eq => lhs == c.rhs,
                    Sense::Ge => lhs >= c.rhs,
                }
            })
        }
        LPCertificate::Infeasible { farkas } => {
            if farkas.len() != problem.constraints.len() {
                return false;
            }
            for (y, c) in farkas.iter().zip(&problem.constraints) {
                let ok = match c.sense {
                    Sense::Le => !y.is_positive(),
                    Sense::Eq => true,
                    Sense::Ge => !y.is_negative(),
                };
                if !ok {
                    return false;
                }
            }
            let mut gap: Rat = farkas
                .iter()
                .zip(&problem.constraints)
                .map(|(y, c)| y * &c.rhs)
                .sum();
            for j in 0..problem.num_vars {
                let col: Rat = farkas
                    .iter()
                    .zip(&problem.constraints)
                    .map(|(y, c)| y * &c.coeffs[j])
                    .sum();
                match &problem.lower_bounds[j] {
                    None => {
                        if !col.is_zero() {
                            return false;
                        }
                    }
                    Some(l) => {
                        if col.is_positive() {
                            return false;
                        }
                        gap -= &col * l;
                    }
                }
            }
            gap.is_positive()
        }
    }
}

/// Decides feasibility; the returned certificate is already verified.
pub fn solve_feasibility(problem: &LPProblem) -> Result<LPCertificate, LPError> {
    problem.check_shape()?;
    let mut tab = Tableau::build(problem);
    let cert = match tab.phase_one() {
        PhaseOne::Feasible => LPCertificate::Feasible { point: tab.extract_point() },
        PhaseOne::Infeasible { farkas } => LPCertificate::Infeasible { farkas },
    };
    assert!(
        verify_certificate(problem, &cert),
        "simplex produced a certificate that fails verification"
    );
    Ok(cert)
}

/// Optimizes the problem's objective; outcomes carry exact witnesses.
pub fn solve_optimize(problem: &LPProblem) -> Result<LPOutcome, LPError> {
    problem.check_shape()?;
    let objective = problem.objective.as_ref().ok_or(LPError::MissingObjective)?;
    let mut tab = Tableau::build(problem);
    match tab.phase_one() {
        PhaseOne::Infeasible { farkas } => {
            let cert = LPCertificate::Infeasible { farkas: farkas.clone() };
            assert!(
                verify_certificate(problem, &cert),
                "simplex produced a certificate that fails verification"
            );
            return Ok(LPOutcome::Infeasible { farkas });
        }
        PhaseOne::Feasible => {}
    }
    // Minimize internally; flip the sign of a maximization up front.
    let minimize: Vec<Rat> = match objective.direction {
        Direction::Minimize => objective.coeffs.clone(),
        Direction::Maximize => objective.coeffs.iter().map(|c| -c).collect(),
    };
    match tab.phase_two(&minimize) {
        PhaseTwo::Optimal { value } => {
            let point = tab.extract_point();
            let true_value = match objective.direction {
                Direction::Minimize => value,
                Direction::Maximize => -value,
            };
            let check: Rat = objective.coeffs.iter().zip(&point).map(|(c, x)| c * x).sum();
            assert_eq!(check, true_value, "optimal point does not attain the reported value");
            assert!(
                verify_certificate(problem, &LPCertificate::Feasible { point: point.clone() }),
                "optimal point fails feasibility verification"
            );
            Ok(LPOutcome::Optimal { point, value: true_value })
        }
        PhaseTwo::Unbounded { ray } => {
            assert!(
                ray_is_improving(problem, objective, &ray),
                "unbounded ray fails verification"
            );
            Ok(LPOutcome::Unbounded { ray })
        }
    }
}

/// A recession direction that strictly improves the objective.
fn ray_is_improving(problem: &LPProblem, objective: &Objective, ray: &[Rat]) -> bool {
    if ray.len() != problem.num_vars {
        return false;
    }
    for (r, bound) in ray.iter().zip(&problem.lower_bounds) {
        if bound.is_some() && r.is_negative() {
            return false;
        }
    }
    for c in &problem.constraints {
        let v: Rat = c.coeffs.iter().zip(ray).map(|(a, r)| a * r).sum();
        let ok = match c.sense {
            Sense::Le => !v.is_positive(),
            Sense::Eq => v.is_zero(),
            Sense::Ge => !v.is_negative(),
        };
        if !ok {
            return false;
        }
    }
    let gain: Rat = objective.coeffs.iter().zip(ray).map(|(c, r)| c * r).sum();
    match objective.direction {
        Direction::Minimize => gain.is_negative(),
        Direction::Maximize => gain.is_positive(),
    }
}

/// Column role for one original variable after the bound substitution.
#[derive(Debug, Clone)]
enum VarCols {
    /// `x = l + u`, one column with `u >= 0`.
    Shifted(usize),
    /// Free variable split as `x = u_plus - u_minus`.
    Split(usize, usize),
}

enum PhaseOne {
    Feasible,
    Infeasible { farkas: Vec<Rat> },
}

enum PhaseTwo {
    Optimal { value: Rat },
    Unbounded { ray: Vec<Rat> },
}

enum SimplexEnd {
    Optimal,
    Unbounded { col: usize },
}

/// Simplex tableau in dictionary form: the basis columns stay an identity
/// block, the rhs column is last, and `cost` holds reduced costs with `-z`
/// in its rhs slot. The rhs column is kept nonnegative throughout.
struct Tableau {
    ncols: usize,
    rows: Vec<Vec<Rat>>,
    cost: Vec<Rat>,
    basis: Vec<usize>,
    var_cols: Vec<VarCols>,
    struct_cols: usize,
    art_start: usize,
    sigma: Vec<Rat>,
    bounds: Vec<Option<Rat>>,
}

impl Tableau {
    fn build(problem: &LPProblem) -> Tableau {
        let m = problem.constraints.len();
        let mut var_cols = Vec::with_capacity(problem.num_vars);
        let mut next = 0usize;
        for bound in &problem.lower_bounds {
            match bound {
                Some(_) => {
                    var_cols.push(VarCols::Shifted(next));
                    next += 1;
                }
                None => {
                    var_cols.push(VarCols::Split(next, next + 1));
                    next += 2;
                }
            }
        }
        let nu = next;
        let nslack = problem
            .constraints
            .iter()
            .filter(|c| c.sense != Sense::Eq)
            .count();
        let struct_cols = nu + nslack;
        let ncols = struct_cols + m;
        let art_start = struct_cols;

        let mut rows = Vec::with_capacity(m);
        let mut sigma = Vec::with_capacity(m);
        let mut slack_next = nu;
        for (i, c) in problem.constraints.iter().enumerate() {
            let mut row = vec![Rat::zero(); ncols + 1];
            for (j, a) in c.coeffs.iter().enumerate() {
                match &var_cols[j] {
                    VarCols::Shifted(u) => row[*u] = a.clone(),
                    VarCols::Split(p, n) => {
                        row[*p] = a.clone();
                        row[*n] = -a.clone();
                    }
                }
            }
            // Substituting x = l + u moves the bounded part into the rhs.
            let mut rhs = c.rhs.clone();
            for (j, bound) in problem.lower_bounds.iter().enumerate() {
                if let Some(l) = bound {
                    rhs -= &c.coeffs[j] * l;
                }
            }
            match c.sense {
                Sense::Le => {
                    row[slack_next] = Rat::one();
                    slack_next += 1;
                }
                Sense::Ge => {
                    row[slack_next] = -Rat::one();
                    slack_next += 1;
                }
                Sense::Eq => {}
            }
            let s = if rhs.is_negative() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
                rhs = -rhs;
                -Rat::one()
            } else {
                Rat::one()
            };
            row[art_start + i] = Rat::one();
            row[ncols] = rhs;
            rows.push(row);
            sigma.push(s);
        }
        debug_assert_eq!(slack_next, art_start);

        let basis: Vec<usize> = (0..m).map(|i| art_start + i).collect();
        // Phase-1 reduced costs: ones on artificials minus the basic rows.
        let mut cost = vec![Rat::zero(); ncols + 1];
        for j in art_start..ncols {
            cost[j] = Rat::one();
        }
        for row in &rows {
            for (c, x) in cost.iter_mut().zip(row) {
                *c -= x;
            }
        }

        Tableau {
            ncols,
            rows,
            cost,
            basis,
            var_cols,
            struct_cols,
            art_start,
            sigma,
            bounds: problem.lower_bounds.clone(),
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].clone().recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&prow) {
                *x -= &f * p;
            }
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (x, p) in self.cost.iter_mut().zip(&prow) {
                *x -= &f * p;
            }
        }
        self.basis[r] = c;
    }

    /// Bland's rule on both choices, which rules out cycling.
    fn simplex(&mut self) -> SimplexEnd {
        loop {
            let Some(c) = (0..self.ncols).find(|&j| self.cost[j].is_negative()) else {
                return SimplexEnd::Optimal;
            };
            let mut leave: Option<usize> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][c].is_positive() {
                    continue;
                }
                leave = Some(match leave {
                    None => r,
                    Some(b) => {
                        let rb = &self.rows[b][self.ncols] * &self.rows[r][c];
                        let rr = &self.rows[r][self.ncols] * &self.rows[b][c];
                        // Compare b_b / a_bc with b_r / a_rc without division.
                        if rr < rb || (rr == rb && self.basis[r] < self.basis[b]) {
                            r
                        } else {
                            b
                        }
                    }
                });
            }
            match leave {
                None => return SimplexEnd::Unbounded { col: c },
                Some(r) => self.pivot(r, c),
            }
        }
    }

    fn phase_one(&mut self) -> PhaseOne {
        match self.simplex() {
            SimplexEnd::Optimal => {}
            SimplexEnd::Unbounded { .. } => {
                unreachable!("phase 1 objective is bounded below by zero")
            }
        }
        let z = -self.cost[self.ncols].clone();
        debug_assert!(!z.is_negative());
        if z.is_positive() {
            // Dual values off the phase-1 reduced costs of the artificials,
            // un-flipping the row sign normalization.
            let farkas: Vec<Rat> = (0..self.rows.len())
                .map(|i| {
                    let y = Rat::one() - &self.cost[self.art_start + i];
                    &self.sigma[i] * y
                })
                .collect();
            return PhaseOne::Infeasible { farkas };
        }
        self.drive_out_artificials();
        PhaseOne::Feasible
    }

    /// Pivots every basic artificial out (its value is zero here, so any
    /// nonzero structural entry works), dropping rows that became redundant.
    fn drive_out_artificials(&mut self) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] < self.art_start {
                r += 1;
                continue;
            }
            debug_assert!(self.rows[r][self.ncols].is_zero());
            match (0..self.struct_cols).find(|&j| !self.rows[r][j].is_zero()) {
                Some(j) => {
                    self.pivot(r, j);
                    r += 1;
                }
                None => {
                    self.rows.remove(r);
                    self.basis.remove(r);
                }
            }
        }
    }

    /// Discards artificial columns and runs simplex on the real objective.
    fn phase_two(&mut self, minimize: &[Rat]) -> PhaseTwo {
        debug_assert!(self.basis.iter().all(|&b| b < self.art_start));
        for row in self.rows.iter_mut() {
            let rhs = row.pop().unwrap();
            row.truncate(self.struct_cols);
            row.push(rhs);
        }
        self.ncols = self.struct_cols;

        // Objective over the substituted variables, plus a constant offset
        // from the shifted bounds that we add back at the end.
        let mut ucost = vec![Rat::zero(); self.ncols + 1];
        let mut offset = Rat::zero();
        for (j, cols) in self.var_cols.iter().enumerate() {
            match cols {
                VarCols::Shifted(u) => {
                    ucost[*u] = minimize[j].clone();
                    offset += &minimize[j] * self.bounds[j].as_ref().unwrap();
                }
                VarCols::Split(p, n) => {
                    ucost[*p] = minimize[j].clone();
                    ucost[*n] = -minimize[j].clone();
                }
            }
        }
        // Reduce against the current basis.
        self.cost = ucost;
        for r in 0..self.rows.len() {
            let cb = self.cost[self.basis[r]].clone();
            if cb.is_zero() {
                continue;
            }
            for (x, p) in self.cost.iter_mut().zip(&self.rows[r]) {
                *x -= &cb * p;
            }
        }

        match self.simplex() {
            SimplexEnd::Optimal => {
                let z = -self.cost[self.ncols].clone();
                PhaseTwo::Optimal { value: z + offset }
            }
            SimplexEnd::Unbounded { col } => {
                let mut uray = vec![Rat::zero(); self.ncols];
                uray[col] = Rat::one();
                for (r, &b) in self.basis.iter().enumerate() {
                    uray[b] = -self.rows[r][col].clone();
                }
                let ray = self
                    .var_cols
                    .iter()
                    .map(|cols| match cols {
                        VarCols::Shifted(u) => uray[*u].clone(),
                        VarCols::Split(p, n) => &uray[*p] - &uray[*n],
                    })
                    .collect();
                PhaseTwo::Unbounded { ray }
            }
        }
    }

    /// Basic solution mapped back to the original variables.
    fn extract_point(&self) -> Vec<Rat> {
        let mut u = vec![Rat::zero(); self.ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            u[b] = self.rows[r][self.ncols].clone();
        }
        self.var_cols
            .iter()
            .enumerate()
            .map(|(j, cols)| match cols {
                VarCols::Shifted(c) => self.bounds[j].as_ref().unwrap() + &u[*c],
                VarCols::Split(p, n) => &u[*p] - &u[*n],
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, rat_int, solve_unique};
    use proptest::prelude::*;

    fn rv(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat_int(x)).collect()
    }

    /// Vertex-enumeration oracle for small problems whose variables all have
    /// lower bounds: intersect every choice of `num_vars` active hyperplanes,
    /// keep the feasible ones, and take the best objective value.
    fn best_vertex_value(p: &LPProblem) -> Option<Rat> {
        let obj = p.objective.as_ref().unwrap();
        let n = p.num_vars;
        let mut planes: Vec<(Vec<Rat>, Rat)> = p
            .constraints
            .iter()
            .map(|c| (c.coeffs.clone(), c.rhs.clone()))
            .collect();
        for (j, b) in p.lower_bounds.iter().enumerate() {
            let l = b.as_ref().expect("oracle needs bounded variables");
            let mut e = vec![Rat::zero(); n];
            e[j] = Rat::one();
            planes.push((e, l.clone()));
        }
        let mut best: Option<Rat> = None;
        let k = planes.len();
        let mut choice: Vec<usize> = (0..n).collect();
        loop {
            let m: Vec<Vec<Rat>> = choice.iter().map(|&i| planes[i].0.clone()).collect();
            let rhs: Vec<Rat> = choice.iter().map(|&i| planes[i].1.clone()).collect();
            if let Some(x) = solve_unique(&m, &rhs) {
                let cert = LPCertificate::Feasible { point: x.clone() };
                if verify_certificate(p, &cert) {
                    let v: Rat = obj.coeffs.iter().zip(&x).map(|(c, xi)| c * xi).sum();
                    best = Some(match best {
                        None => v,
                        Some(b) => match obj.direction {
                            Direction::Minimize => b.min(v),
                            Direction::Maximize => b.max(v),
                        },
                    });
                }
            }
            // Next combination of size n from k planes.
            let mut i = n;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if choice[i] + (n - i) < k {
                    choice[i] += 1;
                    for j in i + 1..n {
                        choice[j] = choice[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn opposite_rays_margin_infeasible() {
        // No functional is >= 1 on both (0,1) and (0,-1).
        let p = LPProblem::feasibility(
            2,
            vec![
                LinearConstraint::ge(rv(&[0, 1]), rat_int(1)),
                LinearConstraint::ge(rv(&[0, -1]), rat_int(1)),
            ],
            vec![None, None],
        );
        match solve_feasibility(&p).unwrap() {
            LPCertificate::Infeasible { farkas } => {
                assert!(verify_certificate(&p, &LPCertificate::Infeasible { farkas }));
            }
            LPCertificate::Feasible { .. } => panic!("expected infeasible"),
        }
    }

    #[test]
    fn opposite_rays_balance_at_one_one() {
        // a*(0,1) + b*(0,-1) = 0 with a, b >= 1, minimizing a + b.
        let p = LPProblem {
            num_vars: 2,
            constraints: vec![
                LinearConstraint::eq(rv(&[0, 0]), rat_int(0)),
                LinearConstraint::eq(rv(&[1, -1]), rat_int(0)),
            ],
            lower_bounds: vec![Some(rat_int(1)), Some(rat_int(1))],
            objective: Some(Objective { direction: Direction::Minimize, coeffs: rv(&[1, 1]) }),
        };
        match solve_optimize(&p).unwrap() {
            LPOutcome::Optimal { point, value } => {
                assert_eq!(point, rv(&[1, 1]));
                assert_eq!(value, rat_int(2));
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn free_variable_equalities() {
        let p = LPProblem::feasibility(
            2,
            vec![
                LinearConstraint::eq(rv(&[1, 0]), rat_int(5)),
                LinearConstraint::eq(rv(&[1, 1]), rat_int(2)),
            ],
            vec![None, None],
        );
        match solve_feasibility(&p).unwrap() {
            LPCertificate::Feasible { point } => assert_eq!(point, rv(&[5, -3])),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let p = LPProblem::feasibility(
            1,
            vec![
                LinearConstraint::eq(rv(&[2]), rat_int(4)),
                LinearConstraint::eq(rv(&[2]), rat_int(4)),
                LinearConstraint::eq(rv(&[-1]), rat_int(-2)),
            ],
            vec![None],
        );
        match solve_feasibility(&p).unwrap() {
            LPCertificate::Feasible { point } => assert_eq!(point, rv(&[2])),
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_ray_is_reported() {
        let p = LPProblem {
            num_vars: 2,
            constraints: vec![LinearConstraint::ge(rv(&[1, -1]), rat_int(0))],
            lower_bounds: vec![Some(rat_int(0)), Some(rat_int(0))],
            objective: Some(Objective { direction: Direction::Maximize, coeffs: rv(&[1, 0]) }),
        };
        match solve_optimize(&p).unwrap() {
            LPOutcome::Unbounded { ray } => {
                assert!(!ray[0].is_negative() && !ray[1].is_negative());
                assert!(ray[0].is_positive());
            }
            other => panic!("expected unbounded, got {other:?}"),
        }
    }

    #[test]
    fn negative_lower_bound() {
        let p = LPProblem {
            num_vars: 1,
            constraints: vec![LinearConstraint::le(rv(&[1]), rat_int(10))],
            lower_bounds: vec![Some(rat_int(-3))],
            objective: Some(Objective { direction: Direction::Minimize, coeffs: rv(&[1]) }),
        };
        match solve_optimize(&p).unwrap() {
            LPOutcome::Optimal { point, value } => {
                assert_eq!(point, rv(&[-3]));
                assert_eq!(value, rat_int(-3));
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Classic degenerate example that cycles under naive pivoting.
        let p = LPProblem {
            num_vars: 4,
            constraints: vec![
                LinearConstraint::le(
                    vec![rat(1, 4), rat_int(-60), rat(-1, 25), rat_int(9)],
                    rat_int(0),
                ),
                LinearConstraint::le(
                    vec![rat(1, 2), rat_int(-90), rat(-1, 50), rat_int(3)],
                    rat_int(0),
                ),
                LinearConstraint::le(rv(&[0, 0, 1, 0]), rat_int(1)),
            ],
            lower_bounds: LPProblem::nonnegative_bounds(4),
            objective: Some(Objective {
                direction: Direction::Minimize,
                coeffs: vec![rat(-3, 4), rat_int(150), rat(-1, 50), rat_int(6)],
            }),
        };
        match solve_optimize(&p).unwrap() {
            LPOutcome::Optimal { value, .. } => {
                assert_eq!(Some(value), best_vertex_value(&p));
            }
            other => panic!("expected optimal, got {other:?}"),
        }
    }

    #[test]
    fn shape_errors() {
        let p = LPProblem::feasibility(2, vec![LinearConstraint::ge(rv(&[1]), rat_int(0))], vec![None, None]);
        assert_eq!(solve_feasibility(&p), Err(LPError::ShapeMismatch));
        let p = LPProblem::feasibility(1, vec![], vec![None]);
        assert_eq!(solve_optimize(&p), Err(LPError::MissingObjective));
    }

    #[test]
    fn empty_problem_is_feasible() {
        let p = LPProblem::feasibility(0, vec![], vec![]);
        assert_eq!(
            solve_feasibility(&p).unwrap(),
            LPCertificate::Feasible { point: vec![] }
        );
    }

    proptest! {
        /// Every certificate the solver emits verifies against the problem.
        /// This is exercised both here and by the asserts inside the solver.
        #[test]
        fn feasibility_certificates_verify(
            num_vars in 1usize..=3,
            raw_rows in proptest::collection::vec(
                (proptest::collection::vec(-4i64..=4, 3), 0u8..3, -4i64..=4),
                1..=4,
            ),
            free_mask in proptest::collection::vec(proptest::bool::ANY, 3),
        ) {
            let constraints: Vec<LinearConstraint> = raw_rows
                .iter()
                .map(|(coeffs, s, rhs)| LinearConstraint {
                    coeffs: rv(&coeffs[..num_vars]),
                    sense: match s { 0 => Sense::Le, 1 => Sense::Eq, _ => Sense::Ge },
                    rhs: rat_int(*rhs),
                })
                .collect();
            let lower_bounds: Vec<Option<Rat>> = free_mask[..num_vars]
                .iter()
                .map(|&f| if f { None } else { Some(Rat::zero()) })
                .collect();
            let p = LPProblem::feasibility(num_vars, constraints, lower_bounds);
            let cert = solve_feasibility(&p).unwrap();
            prop_assert!(verify_certificate(&p, &cert));
        }

        /// On bounded-variable problems, an optimal value matches an
        /// independent vertex-enumeration oracle.
        #[test]
        fn optimal_value_matches_vertex_oracle(
            num_vars in 1usize..=3,
            raw_rows in proptest::collection::vec(
                (proptest::collection::vec(-4i64..=4, 3), prop_oneof![Just(0u8), Just(2u8)], 0i64..=6),
                1..=3,
            ),
            obj in proptest::collection::vec(-3i64..=3, 3),
        ) {
            let constraints: Vec<LinearConstraint> = raw_rows
                .iter()
                .map(|(coeffs, s, rhs)| LinearConstraint {
                    coeffs: rv(&coeffs[..num_vars]),
                    sense: if *s == 0 { Sense::Le } else { Sense::Ge },
                    rhs: rat_int(*rhs),
                })
                .collect();
            let p = LPProblem {
                num_vars,
                constraints,
                lower_bounds: LPProblem::nonnegative_bounds(num_vars),
                objective: Some(Objective {
                    direction: Direction::Minimize,
                    coeffs: rv(&obj[..num_vars]),
                }),
            };
            match solve_optimize(&p).unwrap() {
                LPOutcome::Optimal { value, .. } => {
                    prop_assert_eq!(Some(value), best_vertex_value(&p));
                }
                LPOutcome::Unbounded { ray } => {
                    let o = p.objective.as_ref().unwrap();
                    prop_assert!(super::ray_is_improving(&p, o, &ray));
                }
                LPOutcome::Infeasible { farkas } => {
                    let cert = LPCertificate::Infeasible { farkas };
                    prop_assert!(verify_certificate(&p, &cert));
                }
            }
        }
    }
}
