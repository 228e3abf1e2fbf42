//! Dense two-phase simplex over exact rationals, Bland's anti-cycling rule.
//!
//! Only as general as the game programs need: nonnegative variables, `<=`,
//! `>=` and `=` rows. The solver returns a basic optimal solution together
//! with the row multipliers `y = c_B B^{-1}`.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `optimize c·x` subject to the constraints and `x >= 0`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
    /// One multiplier per constraint, with `Σ y_i b_i = value`.
    pub duals: Vec<Rational>,
    /// Structural variables that are basic at the optimum.
    pub basic_vars: Vec<usize>,
}

impl LinearProgram {
    pub fn new(num_vars: usize, sense: Sense, objective: Vec<Rational>) -> Self {
        assert_eq!(objective.len(), num_vars);
        LinearProgram {
            num_vars,
            sense,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn add(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars);
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        Tableau::new(self).solve(self)
    }
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
    artificial: Vec<bool>,
    /// Column that held `+e_i` in the initial tableau.
    unit_col: Vec<usize>,
    /// +1 or -1: whether row `i` was negated to make its rhs nonnegative.
    row_sign: Vec<i8>,
}

impl Tableau {
    fn new(lp: &LinearProgram) -> Self {
        let nv = lp.num_vars;
        let nrows = lp.constraints.len();
        let mut extra = 0;
        let mut plan = Vec::with_capacity(nrows);
        let mut row_sign = Vec::with_capacity(nrows);
        for c in &lp.constraints {
            let flip = c.rhs.is_negative();
            row_sign.push(if flip { -1 } else { 1 });
            let rel = match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            let width = if rel == Relation::Ge { 2 } else { 1 };
            plan.push((rel, nv + extra));
            extra += width;
        }
        let ncols = nv + extra;
        let mut rows = Vec::with_capacity(nrows);
        let mut rhs = Vec::with_capacity(nrows);
        let mut basis = Vec::with_capacity(nrows);
        let mut artificial = vec![false; ncols];
        let mut unit_col = Vec::with_capacity(nrows);
        for (i, c) in lp.constraints.iter().enumerate() {
            let sign = Rational::from_integer(row_sign[i].into());
            let mut row: Vec<Rational> = c.coeffs.iter().map(|a| a * &sign).collect();
            row.resize(ncols, Rational::zero());
            let (rel, col) = plan[i];
            match rel {
                Relation::Le => {
                    row[col] = Rational::one();
                    basis.push(col);
                    unit_col.push(col);
                }
                Relation::Ge => {
                    row[col] = -Rational::one();
                    row[col + 1] = Rational::one();
                    artificial[col + 1] = true;
                    basis.push(col + 1);
                    unit_col.push(col + 1);
                }
                Relation::Eq => {
                    row[col] = Rational::one();
                    artificial[col] = true;
                    basis.push(col);
                    unit_col.push(col);
                }
            }
            rows.push(row);
            rhs.push(&c.rhs * &sign);
        }
        Tableau {
            rows,
            rhs,
            basis,
            ncols,
            artificial,
            unit_col,
            row_sign,
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        if !inv.is_one() {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for (v, p) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Maximizes `cost · x` over the current basic feasible solution.
    /// `allowed[j]` gates which columns may enter.
    fn optimize(&mut self, cost: &[Rational], allowed: &[bool]) -> Result<(), LpError> {
        loop {
            // reduced cost d_j = c_j - c_B · column_j; Bland: smallest j with d_j > 0
            let entering = (0..self.ncols).find(|&j| {
                if !allowed[j] || self.basis.contains(&j) {
                    return false;
                }
                let mut d = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        d -= &cost[b] * &self.rows[i][j];
                    }
                }
                d.is_positive()
            });
            let Some(c) = entering else {
                return Ok(());
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
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
            let Some((r, _)) = best else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, c);
        }
    }

    fn solve(mut self, lp: &LinearProgram) -> Result<LpSolution, LpError> {
        let nv = lp.num_vars;
        if self.artificial.iter().any(|&a| a) {
            let cost: Vec<Rational> = self
                .artificial
                .iter()
                .map(|&a| if a { -Rational::one() } else { Rational::zero() })
                .collect();
            let allowed = vec![true; self.ncols];
            self.optimize(&cost, &allowed)?;
            let infeasible = self
                .basis
                .iter()
                .zip(&self.rhs)
                .any(|(&b, v)| self.artificial[b] && !v.is_zero());
            if infeasible {
                return Err(LpError::Infeasible);
            }
            // drive zero-level artificials out where the row allows it
            for r in 0..self.rows.len() {
                if !self.artificial[self.basis[r]] {
                    continue;
                }
                if let Some(c) = (0..self.ncols)
                    .find(|&j| !self.artificial[j] && !self.rows[r][j].is_zero())
                {
                    self.pivot(r, c);
                }
            }
        }
        let flip = match lp.sense {
            Sense::Maximize => Rational::one(),
            Sense::Minimize => -Rational::one(),
        };
        let mut cost = vec![Rational::zero(); self.ncols];
        for (j, c) in lp.objective.iter().enumerate() {
            cost[j] = c * &flip;
        }
        let allowed: Vec<bool> = self.artificial.iter().map(|&a| !a).collect();
        self.optimize(&cost, &allowed)?;

        let mut x = vec![Rational::zero(); nv];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < nv {
                x[b] = self.rhs[i].clone();
            }
        }
        let value = x
            .iter()
            .zip(&lp.objective)
            .fold(Rational::zero(), |acc, (xi, ci)| acc + xi * ci);
        let duals = (0..self.rows.len())
            .map(|i| {
                let col = self.unit_col[i];
                let y = self
                    .basis
                    .iter()
                    .enumerate()
                    .fold(Rational::zero(), |acc, (k, &b)| acc + &cost[b] * &self.rows[k][col]);
                y * Rational::from_integer(self.row_sign[i].into()) * &flip
            })
            .collect();
        let mut basic_vars: Vec<usize> = self.basis.iter().copied().filter(|&b| b < nv).collect();
        basic_vars.sort_unstable();
        Ok(LpSolution {
            value,
            x,
            duals,
            basic_vars,
        })
    }
}

/// Basis of `{ w : row · w = 0 for every row }` in `dim` dimensions, by exact
/// row reduction.
pub fn nullspace(rows: &[Vec<Rational>], dim: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    (0..dim)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut w = vec![Rational::zero(); dim];
            w[free] = Rational::one();
            for (row, &pc) in pivots.iter().enumerate() {
                w[pc] = -m[row][free].clone();
            }
            w
        })
        .collect()
}
