//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Problems are `min c·z` subject to linear rows and `z >= 0`. Pivots skip zero
//! entries of the pivot row and column, which keeps the sparse LPs built by
//! [`crate::lprelax`] cheap despite the dense storage.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<(usize, BigRational)>,
    pub relation: Relation,
    pub rhs: BigRational,
}

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    /// Minimised.
    pub objective: Vec<(usize, BigRational)>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplexError {
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("tableau of {rows}x{cols} exceeds the limit of {limit} cells")]
    SizeLimitExceeded { rows: usize, cols: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpOptimum {
    pub values: Vec<BigRational>,
    pub objective: BigRational,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, objective: Vec::new(), constraints: Vec::new() }
    }

    pub fn add(&mut self, coeffs: Vec<(usize, BigRational)>, relation: Relation, rhs: BigRational) {
        debug_assert!(coeffs.iter().all(|(v, _)| *v < self.num_vars));
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// Largest tableau this program would need.
    pub fn tableau_cells(&self) -> usize {
        let rows = self.constraints.len();
        (rows + 1) * (self.num_vars + 2 * rows + 1)
    }

    pub fn solve(&self) -> Result<LpOptimum, SimplexError> {
        self.solve_with_limit(usize::MAX)
    }

    pub fn solve_with_limit(&self, max_cells: usize) -> Result<LpOptimum, SimplexError> {
        let rows = self.constraints.len();
        let cells = self.tableau_cells();
        if cells > max_cells {
            return Err(SimplexError::SizeLimitExceeded { rows, cols: cells / (rows + 1), limit: max_cells });
        }
        Tableau::build(self).solve(self)
    }
}

struct Tableau {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    a: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    cols: usize,
    artificial_start: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Tableau {
        let n = lp.num_vars;
        let rows = lp.constraints.len();
        let slack_count = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let artificial_start = n + slack_count;
        let mut artificial_count = 0;
        let mut plan = Vec::with_capacity(rows);
        for c in &lp.constraints {
            let flip = c.rhs.is_negative();
            let relation = match (c.relation, flip) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            };
            if relation != Relation::Le {
                artificial_count += 1;
            }
            plan.push((flip, relation));
        }
        let cols = artificial_start + artificial_count;
        let mut a = Vec::with_capacity(rows);
        let mut basis = Vec::with_capacity(rows);
        let mut slack = n;
        let mut artificial = artificial_start;
        for (c, &(flip, relation)) in lp.constraints.iter().zip(&plan) {
            let mut row = vec![BigRational::zero(); cols + 1];
            let sign = if flip { -BigRational::one() } else { BigRational::one() };
            for (v, coef) in &c.coeffs {
                row[*v] += coef * &sign;
            }
            row[cols] = &c.rhs * &sign;
            match c.relation {
                Relation::Eq => {}
                Relation::Le => {
                    row[slack] = sign.clone();
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -sign.clone();
                    slack += 1;
                }
            }
            if relation == Relation::Le {
                basis.push(slack - 1);
            } else {
                row[artificial] = BigRational::one();
                basis.push(artificial);
                artificial += 1;
            }
            a.push(row);
        }
        Tableau { a, basis, cols, artificial_start }
    }

    fn pivot(&mut self, r: usize, c: usize, objective: &mut [BigRational]) {
        let width = self.cols + 1;
        let inv = self.a[r][c].recip();
        if !inv.is_one() {
            for x in self.a[r].iter_mut().filter(|x| !x.is_zero()) {
                *x *= &inv;
            }
        }
        let support: Vec<usize> = (0..width).filter(|&j| !self.a[r][j].is_zero()).collect();
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                row[j] -= delta;
            }
        }
        if !objective[c].is_zero() {
            let factor = objective[c].clone();
            for &j in &support {
                let delta = &factor * &pivot_row[j];
                objective[j] -= delta;
            }
        }
        self.basis[r] = c;
    }

    /// Runs Bland's rule on `objective` (reduced costs, last entry is the
    /// negated objective value) over columns `< allowed`.
    fn optimise(&mut self, objective: &mut [BigRational], allowed: usize) -> Result<(), SimplexError> {
        loop {
            let Some(entering) = (0..allowed).find(|&j| objective[j].is_negative()) else {
                return Ok(());
            };
            let mut leaving: Option<(usize, BigRational)> = None;
            for (i, row) in self.a.iter().enumerate() {
                if !row[entering].is_positive() {
                    continue;
                }
                let ratio = &row[self.cols] / &row[entering];
                let better = match &leaving {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leaving = Some((i, ratio));
                }
            }
            let Some((r, _)) = leaving else {
                return Err(SimplexError::Unbounded);
            };
            self.pivot(r, entering, objective);
        }
    }

    fn reduced_costs(&self, costs: &[BigRational]) -> Vec<BigRational> {
        let mut objective: Vec<BigRational> = costs.to_vec();
        objective.resize(self.cols + 1, BigRational::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            if objective[b].is_zero() {
                continue;
            }
            let factor = objective[b].clone();
            for (j, x) in self.a[i].iter().enumerate() {
                if !x.is_zero() {
                    objective[j] -= &factor * x;
                }
            }
        }
        objective
    }

    fn solve(mut self, lp: &LinearProgram) -> Result<LpOptimum, SimplexError> {
        if self.cols > self.artificial_start {
            let mut phase1 = vec![BigRational::zero(); self.cols];
            for cost in &mut phase1[self.artificial_start..] {
                *cost = BigRational::one();
            }
            let mut objective = self.reduced_costs(&phase1);
            self.optimise(&mut objective, self.cols)?;
            if !objective[self.cols].is_zero() {
                return Err(SimplexError::Infeasible);
            }
            self.drive_out_artificials();
        }
        let mut costs = vec![BigRational::zero(); self.cols];
        for (v, c) in &lp.objective {
            costs[*v] += c;
        }
        let mut objective = self.reduced_costs(&costs);
        self.optimise(&mut objective, self.artificial_start)?;
        let mut values = vec![BigRational::zero(); lp.num_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < lp.num_vars {
                values[b] = self.a[i][self.cols].clone();
            }
        }
        let value = lp
            .objective
            .iter()
            .fold(BigRational::zero(), |acc, (v, c)| acc + c * &values[*v]);
        Ok(LpOptimum { values, objective: value })
    }

    /// Pivots zero-valued artificials out of the basis; rows where that is
    /// impossible are redundant and dropped.
    fn drive_out_artificials(&mut self) {
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] < self.artificial_start {
                i += 1;
                continue;
            }
            match (0..self.artificial_start).find(|&j| !self.a[i][j].is_zero()) {
                Some(j) => {
                    let mut dummy = vec![BigRational::zero(); self.cols + 1];
                    self.pivot(i, j, &mut dummy);
                    i += 1;
                }
                None => {
                    self.a.swap_remove(i);
                    self.basis.swap_remove(i);
                }
            }
        }
    }
}

pub fn big(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigRational {
        big(v, 1)
    }

    #[test]
    fn textbook_maximisation() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), value 36.
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![(0, int(-3)), (1, int(-5))];
        lp.add(vec![(0, int(1))], Relation::Le, int(4));
        lp.add(vec![(1, int(2))], Relation::Le, int(12));
        lp.add(vec![(0, int(3)), (1, int(2))], Relation::Le, int(18));
        let opt = lp.solve().unwrap();
        assert_eq!(opt.objective, int(-36));
        assert_eq!(opt.values, vec![int(2), int(6)]);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y, x + y = 3, x >= 1, y >= 1/2.
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![(0, int(1)), (1, int(2))];
        lp.add(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(3));
        lp.add(vec![(0, int(1))], Relation::Ge, int(1));
        lp.add(vec![(1, int(1))], Relation::Ge, big(1, 2));
        let opt = lp.solve().unwrap();
        assert_eq!(opt.values, vec![big(5, 2), big(1, 2)]);
        assert_eq!(opt.objective, big(7, 2));
    }

    #[test]
    fn negative_rhs_is_normalised() {
        // min x, -x <= -2.
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![(0, int(1))];
        lp.add(vec![(0, int(-1))], Relation::Le, int(-2));
        assert_eq!(lp.solve().unwrap().objective, int(2));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add(vec![(0, int(1))], Relation::Le, int(1));
        lp.add(vec![(0, int(1))], Relation::Ge, int(2));
        assert_eq!(lp.solve(), Err(SimplexError::Infeasible));

        let mut lp = LinearProgram::new(1);
        lp.objective = vec![(0, int(-1))];
        lp.add(vec![(0, int(1))], Relation::Ge, int(0));
        assert_eq!(lp.solve(), Err(SimplexError::Unbounded));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![(0, int(1))];
        lp.add(vec![(0, int(1)), (1, int(1))], Relation::Eq, int(2));
        lp.add(vec![(0, int(2)), (1, int(2))], Relation::Eq, int(4));
        let opt = lp.solve().unwrap();
        assert_eq!(opt.objective, int(0));
        assert_eq!(opt.values[1], int(2));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example cycles under the textbook largest-coefficient rule.
        let mut lp = LinearProgram::new(4);
        lp.objective = vec![(0, big(-3, 4)), (1, int(150)), (2, big(-1, 50)), (3, int(6))];
        lp.add(vec![(0, big(1, 4)), (1, int(-60)), (2, big(-1, 25)), (3, int(9))], Relation::Le, int(0));
        lp.add(vec![(0, big(1, 2)), (1, int(-90)), (2, big(-1, 50)), (3, int(3))], Relation::Le, int(0));
        lp.add(vec![(2, int(1))], Relation::Le, int(1));
        let opt = lp.solve().unwrap();
        assert_eq!(opt.objective, big(-1, 20));
    }

    #[test]
    fn size_guard() {
        let mut lp = LinearProgram::new(3);
        lp.add(vec![(0, int(1))], Relation::Le, int(1));
        assert!(matches!(lp.solve_with_limit(2), Err(SimplexError::SizeLimitExceeded { .. })));
    }
}
