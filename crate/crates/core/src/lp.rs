//! Dense two-phase simplex with Bland's rule, generic over the numeric
//! backend. With [`Rational`](crate::scalar::Rational) every pivot is exact
//! and the tolerances are zero; with `f64` pivots below `1e-9` are treated
//! as zero.
//!
//! Problems are stated as `maximize c.x` subject to linear rows and `x >= 0`.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const PIVOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<T: Scalar> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T: Scalar> {
    n_vars: usize,
    objective: Vec<T>,
    constraints: Vec<Constraint<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T: Scalar> {
    Optimal { value: T, x: Vec<T> },
    Infeasible,
    Unbounded,
}

impl<T: Scalar> LpOutcome<T> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

impl<T: Scalar> LinearProgram<T> {
    /// A program over `n_vars` nonnegative variables with zero objective.
    pub fn new(n_vars: usize) -> Self {
        Self {
            n_vars,
            objective: vec![T::zero(); n_vars],
            constraints: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn constraints(&self) -> &[Constraint<T>] {
        &self.constraints
    }

    /// Sets the coefficients to maximize.
    pub fn maximize(&mut self, objective: Vec<T>) -> Result<()> {
        crate::error::check_len(self.n_vars, objective.len())?;
        self.objective = objective;
        Ok(())
    }

    pub fn constrain(&mut self, coeffs: Vec<T>, relation: Relation, rhs: T) -> Result<()> {
        crate::error::check_len(self.n_vars, coeffs.len())?;
        self.constraints.push(Constraint { coeffs, relation, rhs });
        Ok(())
    }

    /// Sparse helper: `sum_k coeff_k x_{index_k} (rel) rhs`.
    pub fn constrain_sparse(&mut self, terms: &[(usize, T)], relation: Relation, rhs: T) -> Result<()> {
        let mut coeffs = vec![T::zero(); self.n_vars];
        for (j, c) in terms {
            let slot = coeffs
                .get_mut(*j)
                .ok_or_else(|| Error::Internal(format!("variable {j} out of range")))?;
            *slot = slot.clone() + c.clone();
        }
        self.constrain(coeffs, relation, rhs)
    }

    pub fn solve(&self) -> LpOutcome<T> {
        Tableau::build(self).run(&self.objective)
    }
}

struct Tableau<T: Scalar> {
    /// `rows[i]` holds the coefficients followed by the right-hand side.
    rows: Vec<Vec<T>>,
    basis: Vec<usize>,
    n_vars: usize,
    /// Columns `artificial_from..` are artificial.
    artificial_from: usize,
    width: usize,
    eps: T,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>) -> Self {
        let m = lp.constraints.len();
        let n_slack = lp
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let artificial_from = lp.n_vars + n_slack;
        let width = artificial_from + m + 1;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = lp.n_vars;
        for (i, c) in lp.constraints.iter().enumerate() {
            let mut row = vec![T::zero(); width];
            let flip = c.rhs.lt_zero();
            let sign = if flip { -T::one() } else { T::one() };
            for (j, a) in c.coeffs.iter().enumerate() {
                row[j] = a.clone() * sign.clone();
            }
            row[width - 1] = c.rhs.clone() * sign.clone();
            let relation = match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            match relation {
                Relation::Le => {
                    row[slack] = T::one();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -T::one();
                    slack += 1;
                    row[artificial_from + i] = T::one();
                    basis.push(artificial_from + i);
                }
                Relation::Eq => {
                    row[artificial_from + i] = T::one();
                    basis.push(artificial_from + i);
                }
            }
            rows.push(row);
        }
        Self {
            rows,
            basis,
            n_vars: lp.n_vars,
            artificial_from,
            width,
            eps: T::tol(PIVOT_TOL),
        }
    }

    fn width(&self) -> usize {
        self.width
    }

    /// Reduced-cost row for `maximize cost.x`, with the objective value in
    /// the last slot.
    fn objective_row(&self, cost: &[T]) -> Vec<T> {
        let w = self.width();
        let mut z = vec![T::zero(); w];
        for (j, c) in cost.iter().enumerate() {
            z[j] = -c.clone();
        }
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost.get(b).cloned().unwrap_or_else(T::zero);
            if !cb.is_zero() {
                for (zj, a) in z.iter_mut().zip(&self.rows[i]) {
                    *zj = zj.clone() + cb.clone() * a.clone();
                }
            }
        }
        z
    }

    fn pivot(&mut self, z: &mut [T], row: usize, col: usize) {
        let w = self.width();
        let p = self.rows[row][col].clone();
        for j in 0..w {
            self.rows[row][j] = self.rows[row][j].clone() / p.clone();
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i != row && !r[col].is_zero() {
                let factor = r[col].clone();
                for j in 0..w {
                    r[j] = r[j].clone() - factor.clone() * pivot_row[j].clone();
                }
            }
        }
        if !z[col].is_zero() {
            let factor = z[col].clone();
            for j in 0..w {
                z[j] = z[j].clone() - factor.clone() * pivot_row[j].clone();
            }
        }
        self.basis[row] = col;
    }

    /// Bland's rule iterations on columns `< allowed`. Returns false when
    /// the objective is unbounded.
    fn iterate(&mut self, z: &mut [T], allowed: usize) -> bool {
        let rhs = self.width() - 1;
        loop {
            let Some(col) = (0..allowed).find(|&j| z[j] < -self.eps.clone()) else {
                return true;
            };
            let mut best: Option<(usize, T)> = None;
            for (i, r) in self.rows.iter().enumerate() {
                if r[col] > self.eps {
                    let ratio = r[rhs].clone() / r[col].clone();
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => {
                            ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                        }
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((row, _)) => self.pivot(z, row, col),
                None => return false,
            }
        }
    }

    fn run(mut self, cost: &[T]) -> LpOutcome<T> {
        let w = self.width();
        let rhs = w - 1;

        // phase 1: maximize -sum(artificials)
        let mut phase1 = vec![T::zero(); w - 1];
        for c in phase1.iter_mut().skip(self.artificial_from) {
            *c = -T::one();
        }
        let mut z = self.objective_row(&phase1);
        self.iterate(&mut z, w - 1);
        if z[rhs] < -self.eps.clone() {
            return LpOutcome::Infeasible;
        }

        // drive artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.artificial_from {
                let col = (0..self.artificial_from).find(|&j| self.rows[i][j].abs() > self.eps);
                match col {
                    Some(j) => {
                        self.pivot(&mut z, i, j);
                        i += 1;
                    }
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        let mut z = self.objective_row(cost);
        if !self.iterate(&mut z, self.artificial_from) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![T::zero(); self.n_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n_vars {
                x[b] = self.rows[i][rhs].clone();
            }
        }
        let value = z[rhs].clone();
        LpOutcome::Optimal { value, x }
    }
}
