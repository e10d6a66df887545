//! Brute-force LP oracle: enumerates every basic feasible solution of the
//! lifted polyhedron `{(x, aux) : task equations, x >= 0, load bounds}` and
//! returns the best objective value among them. Independent of the simplex.

use equiload_core::{BipartiteInstance, Rational};
use num_traits::{Signed, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Program {
    MinLmax,
    MaxLmin,
    MinSpread,
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Solves the square system `a z = b`; `None` when singular.
fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        let pivot_row: Vec<Rational> = a[col].iter().map(|v| v * &inv).collect();
        let pivot_rhs = &b[col] * &inv;
        for (r, (row, rhs)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
            if r == col {
                continue;
            }
            let factor = row[col].clone();
            if factor.is_zero() {
                continue;
            }
            for (v, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *v -= &factor * p;
            }
            *rhs -= &factor * &pivot_rhs;
        }
        a[col] = pivot_row;
        b[col] = pivot_rhs;
    }
    Some(b)
}

/// Calls `f` on every `k`-subset of `0..n`, in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Optimal value of `program` on a linear instance, or `None` if infeasible.
pub fn vertex_value(inst: &BipartiteInstance, program: Program) -> Option<Rational> {
    let m = inst.num_edges();
    let aux = if program == Program::MinSpread { 2 } else { 1 };
    let dim = m + aux;

    let mut eq_rows = Vec::new();
    let mut eq_rhs = Vec::new();
    for u in inst.task_ids() {
        let mut row = vec![Rational::zero(); dim];
        for &e in inst.task_edges(u) {
            row[e.0] = inst.task_weight(e).expect("linear");
        }
        eq_rows.push(row);
        eq_rhs.push(inst.demand(u).clone());
    }

    // rows g with g·z >= 0
    let mut ineq = Vec::new();
    for e in 0..m {
        let mut row = vec![Rational::zero(); dim];
        row[e] = q(1);
        ineq.push(row);
    }
    for w in inst.worker_ids() {
        let mut load = vec![Rational::zero(); dim];
        for &e in inst.worker_edges(w) {
            load[e.0] = inst.worker_weight(e).expect("linear");
        }
        let bound = |aux_col: usize, sign: i64| {
            let mut row: Vec<Rational> = load.iter().map(|v| v * q(-sign)).collect();
            row[aux_col] = q(sign);
            row
        };
        match program {
            Program::MinLmax => ineq.push(bound(m, 1)),
            Program::MaxLmin => ineq.push(bound(m, -1)),
            Program::MinSpread => {
                ineq.push(bound(m, -1));
                ineq.push(bound(m + 1, 1));
            }
        }
    }
    let objective = |z: &[Rational]| match program {
        Program::MinLmax => z[m].clone(),
        Program::MaxLmin => -z[m].clone(),
        Program::MinSpread => &z[m + 1] - &z[m],
    };

    let tight = dim.checked_sub(eq_rows.len())?;
    let mut best: Option<Rational> = None;
    for_each_subset(ineq.len(), tight, |subset| {
        let mut a = eq_rows.clone();
        let mut b = eq_rhs.clone();
        for &i in subset {
            a.push(ineq[i].clone());
            b.push(Rational::zero());
        }
        let Some(z) = solve_square(a, b) else { return };
        let feasible = ineq.iter().all(|g| !g.iter().zip(&z).map(|(gi, zi)| gi * zi).sum::<Rational>().is_negative());
        if feasible {
            let v = objective(&z);
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
    });
    best.map(|v| if program == Program::MaxLmin { -v } else { v })
}
