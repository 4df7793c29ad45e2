//! Dense two-phase simplex over exact rationals with Bland's rule.

use num::{Signed, Zero};

use crate::surd::Q;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal {
        x: Vec<Q>,
        value: Q,
        /// Multipliers `y` with `y^T A <= c` at optimality, one per row.
        dual: Vec<Q>,
    },
    Infeasible,
    Unbounded,
}

struct Tableau {
    t: Vec<Vec<Q>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Q {
        &self.t[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            if !v.is_zero() {
                *v = &*v / &p;
            }
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(prow.iter()) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost` over the columns flagged in `allowed`.
    fn optimize(&mut self, cost: &[Q], allowed: &[bool]) -> bool {
        loop {
            let m = self.t.len();
            let mut entering = None;
            for j in 0..self.width {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut d = cost[j].clone();
                for i in 0..m {
                    let a = &self.t[i][j];
                    if !a.is_zero() {
                        d -= &cost[self.basis[i]] * a;
                    }
                }
                if d.is_negative() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else {
                return true;
            };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..m {
                let a = &self.t[i][c];
                if a.is_positive() {
                    let ratio = self.rhs(i) / a;
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Minimizes `c.x` subject to `A x = b`, `x >= 0`.
pub fn minimize(a: &[Vec<Q>], b: &[Q], c: &[Q]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let width = n + m;
    let mut sign = vec![Q::from_integer(1.into()); m];
    let mut t = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        if flip {
            sign[i] = -sign[i].clone();
        }
        let mut row = Vec::with_capacity(width + 1);
        for j in 0..n {
            row.push(if flip { -a[i][j].clone() } else { a[i][j].clone() });
        }
        for k in 0..m {
            row.push(if k == i { Q::from_integer(1.into()) } else { Q::zero() });
        }
        row.push(b[i].abs());
        t.push(row);
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        width,
    };
    let mut cost1 = vec![Q::zero(); width];
    for v in cost1.iter_mut().skip(n) {
        *v = Q::from_integer(1.into());
    }
    let all = vec![true; width];
    tab.optimize(&cost1, &all);
    let infeas: Q = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .map(|i| tab.rhs(i).clone())
        .fold(Q::zero(), |s, v| s + v);
    if infeas.is_positive() {
        return LpOutcome::Infeasible;
    }
    // drive zero-level artificials out of the basis where possible
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !tab.t[i][j].is_zero() && !tab.basis.contains(&j)) {
                tab.pivot(i, j);
            }
        }
    }
    let mut cost2 = vec![Q::zero(); width];
    cost2[..n].clone_from_slice(c);
    let mut allowed = vec![false; width];
    for v in allowed.iter_mut().take(n) {
        *v = true;
    }
    if !tab.optimize(&cost2, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Q::zero(); n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.rhs(i).clone();
        }
    }
    let value = x.iter().zip(c.iter()).fold(Q::zero(), |s, (xi, ci)| s + xi * ci);
    let mut dual = vec![Q::zero(); m];
    for (k, d) in dual.iter_mut().enumerate() {
        let mut y = Q::zero();
        for i in 0..m {
            let binv = &tab.t[i][n + k];
            if !binv.is_zero() {
                y += &cost2[tab.basis[i]] * binv;
            }
        }
        *d = y * &sign[k];
    }
    LpOutcome::Optimal { x, value, dual }
}

/// Gauge of `c` with respect to `conv(columns)`: `min sum(u)` subject to
/// `sum u_j col_j = c`, `u >= 0`. Returns the value and a maximizer `a` of
/// `c.a` over `{a : col_j . a <= 1}`; `None` when `c` is outside the cone.
pub fn gauge(columns: &[Vec<Q>], c: &[Q]) -> Option<(Q, Vec<Q>)> {
    let d = c.len();
    let a: Vec<Vec<Q>> = (0..d).map(|i| columns.iter().map(|col| col[i].clone()).collect()).collect();
    let cost = vec![Q::from_integer(1.into()); columns.len()];
    match minimize(&a, c, &cost) {
        LpOutcome::Optimal { value, dual, .. } => Some((value, dual)),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("gauge objective is bounded below by zero"),
    }
}

/// Covering variant for non-negative data: `min sum(u)` subject to
/// `sum u_j col_j >= c`, `u >= 0`. The returned maximizer is non-negative.
pub fn covering_gauge(columns: &[Vec<Q>], c: &[Q]) -> Option<(Q, Vec<Q>)> {
    let d = c.len();
    let k = columns.len();
    let mut a: Vec<Vec<Q>> = Vec::with_capacity(d);
    for i in 0..d {
        let mut row: Vec<Q> = columns.iter().map(|col| col[i].clone()).collect();
        for s in 0..d {
            row.push(if s == i { Q::from_integer((-1).into()) } else { Q::zero() });
        }
        a.push(row);
    }
    let mut cost = vec![Q::from_integer(1.into()); k];
    cost.extend(std::iter::repeat_n(Q::zero(), d));
    match minimize(&a, c, &cost) {
        LpOutcome::Optimal { value, dual, .. } => Some((value, dual)),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("covering objective is bounded below by zero"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surd::{q, qf};

    #[test]
    fn small_lp() {
        // min -x - y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let a = vec![vec![q(1), q(2), q(1), q(0)], vec![q(3), q(1), q(0), q(1)]];
        let b = vec![q(4), q(6)];
        let c = vec![q(-1), q(-1), q(0), q(0)];
        match minimize(&a, &b, &c) {
            LpOutcome::Optimal { x, value, dual } => {
                assert_eq!(value, qf(-14, 5));
                assert_eq!(x[0], qf(8, 5));
                assert_eq!(x[1], qf(6, 5));
                // dual feasibility: y^T A <= c
                for j in 0..4 {
                    let s = &dual[0] * &a[0][j] + &dual[1] * &a[1][j];
                    assert!(s <= c[j]);
                }
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let a = vec![vec![q(1), q(1)]];
        assert_eq!(minimize(&a, &[q(-1)], &[q(1), q(1)]), LpOutcome::Infeasible);
        let a = vec![vec![q(1), q(-1)]];
        assert_eq!(minimize(&a, &[q(1)], &[q(0), q(-1)]), LpOutcome::Unbounded);
    }

    #[test]
    fn gauge_of_l1_ball() {
        // columns +-e1, +-e2: gauge is the l1 norm
        let cols = vec![vec![q(1), q(0)], vec![q(-1), q(0)], vec![q(0), q(1)], vec![q(0), q(-1)]];
        let (v, a) = gauge(&cols, &[q(2), q(-3)]).unwrap();
        assert_eq!(v, q(5));
        assert_eq!(&a[0] * q(2) + &a[1] * q(-3), q(5));
        let (v, _) = covering_gauge(&[vec![q(1), q(1)]], &[q(2), q(1)]).unwrap();
        assert_eq!(v, q(2));
    }
}
