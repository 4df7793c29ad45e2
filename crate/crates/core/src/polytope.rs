//! Exact linear algebra and vertex enumeration for symmetric polytopes.

use std::collections::HashSet;

use num::{Signed, Zero};

use crate::surd::Q;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<Q>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pv = m[r][c].clone();
        for v in m[r].iter_mut() {
            *v = &*v / &pv;
        }
        let prow = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (v, pv) in row.iter_mut().zip(prow.iter()) {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{a : M a = 0}` for an `rows x cols` matrix.
pub fn nullspace(m: &[Vec<Q>], cols: usize) -> Vec<Vec<Q>> {
    let mut w: Vec<Vec<Q>> = m.to_vec();
    let pivots = rref(&mut w);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for &f in &free {
        let mut v = vec![Q::zero(); cols];
        v[f] = Q::from_integer(1.into());
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -w[r][f].clone();
        }
        out.push(v);
    }
    out
}

pub fn rank(m: &[Vec<Q>]) -> usize {
    let mut w = m.to_vec();
    rref(&mut w).len()
}

/// Indices of a maximal linearly independent subset of `vectors`, greedy
/// in order.
pub fn independent_subset(vectors: &[Vec<Q>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        rows.push(v.clone());
        if rank(&rows) == rows.len() {
            chosen.push(i);
        } else {
            rows.pop();
        }
    }
    chosen
}

fn solve_square(m: &[Vec<Q>], rhs: &[Q]) -> Option<Vec<Q>> {
    let n = m.len();
    let mut aug: Vec<Vec<Q>> = m
        .iter()
        .zip(rhs.iter())
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() != n || piv.iter().any(|&p| p >= n) {
        return None;
    }
    Some(aug.iter().map(|r| r[n].clone()).collect())
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b.iter()).fold(Q::zero(), |s, (x, y)| s + x * y)
}

fn normalize(v: &mut [Q]) {
    if let Some(p) = v.iter().find(|x| !x.is_zero()).cloned() {
        let p = p.abs();
        for x in v.iter_mut() {
            *x = &*x / &p;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum VertexError {
    /// The inequalities do not bound the region.
    Unbounded,
}

/// Vertices of `{a in R^d : h . a <= 1 for h in halfspaces}` by the double
/// description method on the homogenized cone `{(a,t): h.a <= t, t >= 0}`.
/// The region contains the origin in its interior by construction.
pub fn vertices(halfspaces: &[Vec<Q>], d: usize) -> Result<Vec<Vec<Q>>, VertexError> {
    // rows r with r . z >= 0, z = (a, t)
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(halfspaces.len() + 1);
    let mut t_row = vec![Q::zero(); d + 1];
    t_row[d] = Q::from_integer(1.into());
    rows.push(t_row);
    let mut seen: HashSet<Vec<Q>> = HashSet::new();
    for h in halfspaces {
        if h.iter().all(|x| x.is_zero()) || !seen.insert(h.clone()) {
            continue;
        }
        let mut r: Vec<Q> = h.iter().map(|x| -x.clone()).collect();
        r.push(Q::from_integer(1.into()));
        rows.push(r);
    }
    let init = independent_subset(&rows);
    if init.len() < d + 1 {
        return Err(VertexError::Unbounded);
    }
    let order: Vec<usize> = init
        .iter()
        .copied()
        .chain((0..rows.len()).filter(|i| !init.contains(i)))
        .collect();
    // initial cone: rays are the columns of the inverse of the chosen rows
    let basis: Vec<Vec<Q>> = init.iter().map(|&i| rows[i].clone()).collect();
    let mut rays: Vec<(Vec<Q>, Vec<bool>)> = Vec::new();
    for k in 0..=d {
        let mut e = vec![Q::zero(); d + 1];
        e[k] = Q::from_integer(1.into());
        let mut ray = solve_square(&basis, &e).expect("independent rows");
        normalize(&mut ray);
        let mut zeros = vec![false; rows.len()];
        for (kk, &i) in init.iter().enumerate() {
            zeros[i] = kk != k;
        }
        rays.push((ray, zeros));
    }
    let mut processed: Vec<usize> = init.clone();
    for &i in order.iter().skip(d + 1) {
        let vals: Vec<Q> = rays.iter().map(|(r, _)| dot(&rows[i], r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| vals[k].is_negative()).collect();
        if neg.is_empty() {
            for (k, (_, z)) in rays.iter_mut().enumerate() {
                z[i] = vals[k].is_zero();
            }
            processed.push(i);
            continue;
        }
        let mut next: Vec<(Vec<Q>, Vec<bool>)> = Vec::new();
        for k in 0..rays.len() {
            if !vals[k].is_negative() {
                let mut r = rays[k].clone();
                r.1[i] = vals[k].is_zero();
                next.push(r);
            }
        }
        for &p in &pos {
            for &n in &neg {
                let common: Vec<usize> = processed
                    .iter()
                    .copied()
                    .filter(|&j| rays[p].1[j] && rays[n].1[j])
                    .collect();
                if common.len() + 1 < d {
                    continue;
                }
                let adjacent = (0..rays.len()).all(|k| {
                    k == p || k == n || !common.iter().all(|&j| rays[k].1[j])
                });
                if !adjacent {
                    continue;
                }
                let (vp, vn) = (&vals[p], &vals[n]);
                let mut ray: Vec<Q> = rays[p]
                    .0
                    .iter()
                    .zip(rays[n].0.iter())
                    .map(|(a, b)| a * (-vn) + b * vp)
                    .collect();
                normalize(&mut ray);
                let mut zeros = vec![false; rows.len()];
                for &j in &common {
                    zeros[j] = true;
                }
                zeros[i] = true;
                next.push((ray, zeros));
            }
        }
        rays = next;
        processed.push(i);
    }
    let mut out = Vec::new();
    for (r, _) in rays {
        let t = &r[d];
        if !t.is_positive() {
            return Err(VertexError::Unbounded);
        }
        out.push(r[..d].iter().map(|x| x / t).collect());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surd::q;

    #[test]
    fn nullspace_of_rank_one() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        let ns = nullspace(&m, 2);
        assert_eq!(ns, vec![vec![q(-2), q(1)]]);
    }

    #[test]
    fn cross_polytope_vertices() {
        // |a1| + |a2| + |a3| <= 1
        let mut hs = Vec::new();
        for s1 in [-1, 1] {
            for s2 in [-1, 1] {
                for s3 in [-1, 1] {
                    hs.push(vec![q(s1), q(s2), q(s3)]);
                }
            }
        }
        let mut v = vertices(&hs, 3).unwrap();
        v.sort();
        assert_eq!(v.len(), 6);
        assert!(v.contains(&vec![q(0), q(0), q(1)]));
    }

    #[test]
    fn unbounded_detected() {
        let hs = vec![vec![q(1), q(0)], vec![q(-1), q(0)]];
        assert_eq!(vertices(&hs, 2), Err(VertexError::Unbounded));
    }
}
