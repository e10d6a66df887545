//! Dense two-phase primal simplex over exact rationals.
//!
//! Bland's rule throughout (lowest-index entering column, lowest basic index
//! among tied leaving rows), so the method terminates on degenerate problems
//! and the optimum it returns is reproducible. Free variables are split into
//! a non-negative pair.

use num_traits::{Signed, Zero};

use crate::numeric::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNeg,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { values: Vec<Rational>, objective: Rational },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    vars: Vec<VarBound>,
    constraints: Vec<Constraint>,
    objective: Vec<(usize, Rational)>,
    sense: Sense,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        Self { vars: Vec::new(), constraints: Vec::new(), objective: Vec::new(), sense }
    }

    pub fn add_var(&mut self, bound: VarBound) -> usize {
        self.vars.push(bound);
        self.vars.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        debug_assert!(terms.iter().all(|(v, _)| *v < self.vars.len()));
        self.constraints.push(Constraint { terms, relation, rhs });
    }

    pub fn set_objective(&mut self, terms: Vec<(usize, Rational)>) {
        debug_assert!(terms.iter().all(|(v, _)| *v < self.vars.len()));
        self.objective = terms;
    }

    pub fn solve(&self) -> LpOutcome {
        // column layout: [structural (free vars take two columns)] [slacks] [artificials]
        let mut col_of = Vec::with_capacity(self.vars.len());
        let mut ncols = 0usize;
        for bound in &self.vars {
            col_of.push(ncols);
            ncols += match bound {
                VarBound::NonNeg => 1,
                VarBound::Free => 2,
            };
        }
        let n_struct = ncols;
        let m = self.constraints.len();
        let n_slack = self.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
        let n_total = n_struct + n_slack + m;
        let art_start = n_struct + n_slack;

        let mut rows = vec![vec![Rational::zero(); n_total]; m];
        let mut rhs = vec![Rational::zero(); m];
        let mut slack = n_struct;
        for (i, c) in self.constraints.iter().enumerate() {
            for (v, a) in &c.terms {
                let col = col_of[*v];
                rows[i][col] += a;
                if self.vars[*v] == VarBound::Free {
                    rows[i][col + 1] -= a;
                }
            }
            match c.relation {
                Relation::Le => {
                    rows[i][slack] = Rational::from_integer(1.into());
                    slack += 1;
                }
                Relation::Ge => {
                    rows[i][slack] = Rational::from_integer((-1).into());
                    slack += 1;
                }
                Relation::Eq => {}
            }
            rhs[i] = c.rhs.clone();
            if rhs[i].is_negative() {
                for a in rows[i].iter_mut() {
                    *a = -a.clone();
                }
                rhs[i] = -rhs[i].clone();
            }
            rows[i][art_start + i] = Rational::from_integer(1.into());
        }

        let mut tab = Tableau { rows, rhs, basis: (art_start..art_start + m).collect(), active: vec![true; m] };

        // phase 1: minimise the sum of artificials
        let mut cost1 = vec![Rational::zero(); n_total];
        for c in cost1.iter_mut().skip(art_start) {
            *c = Rational::from_integer(1.into());
        }
        if tab.optimize(&cost1, n_total) == Step::Unbounded {
            unreachable!("phase 1 objective is bounded below by zero");
        }
        let infeasibility: Rational =
            (0..m).filter(|&i| tab.active[i] && tab.basis[i] >= art_start).map(|i| tab.rhs[i].clone()).sum();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible;
        }
        for i in 0..m {
            if !tab.active[i] || tab.basis[i] < art_start {
                continue;
            }
            match (0..art_start).find(|&j| !tab.rows[i][j].is_zero()) {
                Some(j) => tab.pivot(i, j),
                None => tab.active[i] = false, // redundant equation
            }
        }

        // phase 2 over structural and slack columns only
        let mut cost2 = vec![Rational::zero(); n_total];
        for (v, a) in &self.objective {
            let a = match self.sense {
                Sense::Minimize => a.clone(),
                Sense::Maximize => -a.clone(),
            };
            let col = col_of[*v];
            cost2[col] += &a;
            if self.vars[*v] == VarBound::Free {
                cost2[col + 1] -= &a;
            }
        }
        if tab.optimize(&cost2, art_start) == Step::Unbounded {
            return LpOutcome::Unbounded;
        }

        let mut col_value = vec![Rational::zero(); n_total];
        for i in 0..m {
            if tab.active[i] {
                col_value[tab.basis[i]] = tab.rhs[i].clone();
            }
        }
        let values: Vec<Rational> = self
            .vars
            .iter()
            .enumerate()
            .map(|(v, bound)| {
                let col = col_of[v];
                match bound {
                    VarBound::NonNeg => col_value[col].clone(),
                    VarBound::Free => &col_value[col] - &col_value[col + 1],
                }
            })
            .collect();
        let objective = self.objective.iter().map(|(v, a)| a * &values[*v]).sum();
        LpOutcome::Optimal { values, objective }
    }
}

#[derive(Debug, PartialEq, Eq)]
enum Step {
    Optimal,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    active: Vec<bool>,
}

impl Tableau {
    /// Minimises `cost` with entering columns restricted to `0..col_limit`.
    fn optimize(&mut self, cost: &[Rational], col_limit: usize) -> Step {
        loop {
            let reduced = self.reduced_costs(cost, col_limit);
            let Some(enter) = reduced.iter().position(|d| d.is_negative()) else {
                return Step::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                if !self.active[i] || !self.rows[i][enter].is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / &self.rows[i][enter];
                let better = match &leave {
                    None => true,
                    Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, enter),
                None => return Step::Unbounded,
            }
        }
    }

    fn reduced_costs(&self, cost: &[Rational], col_limit: usize) -> Vec<Rational> {
        let mut d: Vec<Rational> = cost[..col_limit].to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            if !self.active[i] {
                continue;
            }
            let cb = &cost[self.basis[i]];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in row[..col_limit].iter().enumerate() {
                if !a.is_zero() {
                    d[j] -= cb * a;
                }
            }
        }
        for (i, &b) in self.basis.iter().enumerate() {
            if self.active[i] && b < col_limit {
                d[b] = Rational::zero();
            }
        }
        d
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for a in self.rows[row].iter_mut() {
            if !a.is_zero() {
                *a /= &p;
            }
        }
        self.rhs[row] /= &p;
        let pivot_row = self.rows[row].clone();
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.rows.len() {
            if i == row || !self.active[i] {
                continue;
            }
            let factor = self.rows[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for (a, pr) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pr.is_zero() {
                    *a -= &factor * pr;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        self.basis[row] = col;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{int, rat};

    #[test]
    fn textbook_maximisation() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var(VarBound::NonNeg);
        let y = lp.add_var(VarBound::NonNeg);
        lp.add_constraint(vec![(x, int(1))], Relation::Le, int(4));
        lp.add_constraint(vec![(y, int(2))], Relation::Le, int(12));
        lp.add_constraint(vec![(x, int(3)), (y, int(2))], Relation::Le, int(18));
        lp.set_objective(vec![(x, int(3)), (y, int(5))]);
        assert_eq!(lp.solve(), LpOutcome::Optimal { values: vec![int(2), int(6)], objective: int(36) });
    }

    #[test]
    fn free_variables_and_equalities() {
        // min t, t >= x - 1/3, t >= -x, x + y = 1 (x, y >= 0) -> t = -1/3 at ... check value
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var(VarBound::NonNeg);
        let y = lp.add_var(VarBound::NonNeg);
        let t = lp.add_var(VarBound::Free);
        lp.add_constraint(vec![(x, int(1)), (y, int(1))], Relation::Eq, int(1));
        lp.add_constraint(vec![(t, int(1)), (x, int(-1))], Relation::Ge, rat(-1, 3));
        lp.add_constraint(vec![(t, int(1)), (x, int(1))], Relation::Ge, int(0));
        lp.set_objective(vec![(t, int(1))]);
        let LpOutcome::Optimal { values, objective } = lp.solve() else { panic!() };
        assert_eq!(objective, rat(-1, 6));
        assert_eq!(values[x], rat(1, 6));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var(VarBound::NonNeg);
        lp.add_constraint(vec![(x, int(1))], Relation::Le, int(-1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new(Sense::Minimize);
        let t = lp.add_var(VarBound::Free);
        lp.add_constraint(vec![(t, int(1))], Relation::Le, int(3));
        lp.set_objective(vec![(t, int(1))]);
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var(VarBound::NonNeg);
        let y = lp.add_var(VarBound::NonNeg);
        lp.add_constraint(vec![(x, int(1)), (y, int(1))], Relation::Eq, int(2));
        lp.add_constraint(vec![(x, int(2)), (y, int(2))], Relation::Eq, int(4));
        lp.set_objective(vec![(y, int(1))]);
        assert_eq!(lp.solve(), LpOutcome::Optimal { values: vec![int(0), int(2)], objective: int(2) });
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example cycles under the largest-coefficient rule.
        let mut lp = LinearProgram::new(Sense::Minimize);
        let v: Vec<usize> = (0..4).map(|_| lp.add_var(VarBound::NonNeg)).collect();
        lp.add_constraint(
            vec![(v[0], rat(1, 4)), (v[1], int(-60)), (v[2], rat(-1, 25)), (v[3], int(9))],
            Relation::Le,
            int(0),
        );
        lp.add_constraint(
            vec![(v[0], rat(1, 2)), (v[1], int(-90)), (v[2], rat(-1, 50)), (v[3], int(3))],
            Relation::Le,
            int(0),
        );
        lp.add_constraint(vec![(v[2], int(1))], Relation::Le, int(1));
        lp.set_objective(vec![(v[0], rat(-3, 4)), (v[1], int(150)), (v[2], rat(-1, 50)), (v[3], int(6))]);
        let LpOutcome::Optimal { objective, .. } = lp.solve() else { panic!() };
        assert_eq!(objective, rat(-1, 20));
    }
}
