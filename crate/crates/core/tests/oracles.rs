//! Brute-force oracles written independently of the library, with frozen
//! values computed by them.

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schreier::domination::{domination_constant_exact, VectorSequence};
use schreier::families::{enumerate, rank_restricted, Family, FinSet};
use schreier::norms::{norm, tsirelson, SpaceSpec, Vector};
use schreier::ordinal::{Ordinal, Schedule};
use schreier::spreading::exact_spreading_combinatorial;
use schreier::surd::{q, qf, Bound, Surd, Q};

// ---- families ----

/// `w^2 a + w b + c`.
type Small = (u64, u64, u64);

fn ord_of((a, b, c): Small) -> Ordinal {
    let mut terms = Vec::new();
    if a > 0 {
        terms.push((Ordinal::nat(2), a));
    }
    if b > 0 {
        terms.push((Ordinal::nat(1), b));
    }
    if c > 0 {
        terms.push((Ordinal::zero(), c));
    }
    Ordinal::from_terms(terms).unwrap()
}

/// F_0 = {0}; F_{x+1} = {0} u {(n)^G : G in F_x, n < G}; F_l = U_n {F in F_{l[n]} : n <= min F}.
fn fine(o: Small, f: &[u64]) -> bool {
    if f.is_empty() {
        return true;
    }
    match o {
        (0, 0, 0) => false,
        (a, b, c) if c > 0 => fine((a, b, c - 1), &f[1..]),
        (a, b, _) => (1..=f[0]).any(|n| {
            let on = if b > 0 { (a, b - 1, n) } else { (a - 1, n, 0) };
            fine(on, f)
        }),
    }
}

/// S_0 = singletons; S_{k+1} = unions of at most min F successive S_k blocks.
fn schreier(k: u64, f: &[u64]) -> bool {
    if f.is_empty() {
        return true;
    }
    if k == 0 {
        return f.len() == 1;
    }
    fn split(k: u64, rest: &[u64], blocks_left: u64) -> bool {
        if rest.is_empty() {
            return true;
        }
        if blocks_left == 0 {
            return false;
        }
        (1..=rest.len()).any(|j| schreier(k - 1, &rest[..j]) && split(k, &rest[j..], blocks_left - 1))
    }
    split(k, f, f[0])
}

fn subsets(n: u64) -> impl Iterator<Item = Vec<u64>> {
    (0u64..1 << n).map(move |m| (1..=n).filter(|i| m >> (i - 1) & 1 == 1).collect())
}

const FINE_LEVELS: &[(Small, usize)] = &[
    ((0, 0, 0), 1),
    ((0, 0, 1), 11),
    ((0, 0, 2), 56),
    ((0, 0, 3), 176),
    ((0, 1, 0), 144),
    ((0, 1, 1), 509),
    ((0, 2, 0), 631),
    ((1, 0, 0), 489),
];

const SCHREIER_COUNTS: &[usize] = &[11, 144, 489];

#[test]
fn fine_membership_matches_unfolding() {
    for &(o, count) in FINE_LEVELS {
        let fam = Family::fine(ord_of(o));
        let mut got = 0;
        for f in subsets(10) {
            let want = fine(o, &f);
            assert_eq!(fam.member(&FinSet::new(f.clone()).unwrap()), want, "{fam} {f:?}");
            got += want as usize;
        }
        assert_eq!(got, count, "{fam}");
    }
}

#[test]
fn schreier_membership_matches_unfolding() {
    for (k, &count) in SCHREIER_COUNTS.iter().enumerate() {
        let fam = Family::schreier_nat(k as u64);
        let mut got = 0;
        for f in subsets(10) {
            let want = schreier(k as u64, &f);
            assert_eq!(fam.member(&FinSet::new(f.clone()).unwrap()), want, "{fam} {f:?}");
            got += want as usize;
        }
        assert_eq!(got, count);
        assert_eq!(enumerate(&fam, 10).unwrap().len(), count);
    }
}

#[test]
fn omega_powers_coincide_with_schreier_families() {
    // F_{w^k} = S_k on every finite universe
    for f in subsets(10) {
        assert_eq!(fine((0, 1, 0), &f), schreier(1, &f));
        assert_eq!(fine((1, 0, 0), &f), schreier(2, &f));
    }
}

#[test]
fn restricted_ranks_are_height_plus_one() {
    // a hereditary tree of sets has rank max |F| + 1
    let s1_ranks: Vec<u64> = (2..=12).map(|n| rank_restricted(&Family::schreier_nat(1), n).unwrap()).collect();
    assert_eq!(s1_ranks, vec![2, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7]);
    for n in 2..=10 {
        let height = subsets(n).filter(|f| schreier(1, f)).map(|f| f.len() as u64).max().unwrap();
        assert_eq!(rank_restricted(&Family::schreier_nat(1), n).unwrap(), height + 1);
        let height = subsets(n).filter(|f| fine((0, 0, 3), f)).map(|f| f.len() as u64).max().unwrap();
        assert_eq!(rank_restricted(&Family::fine_nat(3), n).unwrap(), height + 1);
    }
}

// ---- norms ----

fn coeffs(x: &Vector) -> (Vec<u64>, Vec<Q>) {
    let s = x.support();
    let c = s.iter().map(|&i| x.get(i).abs()).collect();
    (s, c)
}

fn schreier_norm(k: u64, x: &Vector) -> Q {
    let (s, c) = coeffs(x);
    (0u64..1 << s.len())
        .map(|m| {
            let pick: Vec<usize> = (0..s.len()).filter(|i| m >> i & 1 == 1).collect();
            let set: Vec<u64> = pick.iter().map(|&i| s[i]).collect();
            if schreier(k, &set) {
                pick.iter().map(|&i| c[i].clone()).sum()
            } else {
                Q::zero()
            }
        })
        .max()
        .unwrap_or_else(Q::zero)
}

/// Square of the Baernstein norm: successive S_1 blocks of any subset.
fn baernstein_square(x: &Vector) -> Q {
    let (s, c) = coeffs(x);
    let n = s.len();
    let mut best = Q::zero();
    for used in 0u64..1 << n {
        let pos: Vec<usize> = (0..n).filter(|i| used >> i & 1 == 1).collect();
        if pos.is_empty() {
            continue;
        }
        for cuts in 0u64..1 << (pos.len() - 1) {
            let mut total = Q::zero();
            let mut block: Vec<usize> = Vec::new();
            let mut ok = true;
            for (j, &p) in pos.iter().enumerate() {
                block.push(p);
                if j + 1 == pos.len() || cuts >> j & 1 == 1 {
                    let set: Vec<u64> = block.iter().map(|&i| s[i]).collect();
                    ok &= schreier(1, &set);
                    let sum: Q = block.iter().map(|&i| c[i].clone()).sum();
                    total += &sum * &sum;
                    block.clear();
                }
            }
            if ok && total > best {
                best = total;
            }
        }
    }
    best
}

/// Tsirelson norm by recursion on support intervals: either the sup norm or
/// `theta` times a sum over at least two consecutive intervals whose minima
/// form an S_1 set.
fn tsirelson_oracle(theta: &Q, x: &Vector) -> Q {
    let (s, c) = coeffs(x);
    fn rec(lo: usize, hi: usize, s: &[u64], c: &[Q], theta: &Q) -> Q {
        let mut best = c[lo..hi].iter().cloned().max().unwrap_or_else(Q::zero);
        let len = hi - lo;
        // start positions of the intervals, relative to lo
        for starts in 0u64..1 << len {
            let st: Vec<usize> = (0..len).filter(|i| starts >> i & 1 == 1).map(|i| lo + i).collect();
            if st.len() < 2 {
                continue;
            }
            let mins: Vec<u64> = st.iter().map(|&i| s[i]).collect();
            if !schreier(1, &mins) {
                continue;
            }
            let mut sum = Q::zero();
            for (j, &a) in st.iter().enumerate() {
                let b = st.get(j + 1).copied().unwrap_or(hi);
                sum += rec(a, b, s, c, theta);
            }
            let v = theta * sum;
            if v > best {
                best = v;
            }
        }
        best
    }
    if s.is_empty() {
        return Q::zero();
    }
    rec(0, s.len(), &s, &c, theta)
}

fn random_vector(rng: &mut ChaCha8Rng, max_index: u64) -> Vector {
    let mut v = Vector::zero();
    for i in 1..=max_index {
        if rng.random_bool(0.6) {
            v.set(i, Q::new(rng.random_range(-6i64..=6).into(), rng.random_range(1i64..=3).into()));
        }
    }
    v
}

fn ones(idx: &[u64]) -> Vector {
    Vector::from_pairs(idx.iter().map(|&i| (i, q(1))))
}

#[test]
fn combinatorial_norms_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s1: SpaceSpec = "X[S[1]]".parse().unwrap();
    let s2: SpaceSpec = "X[S[2]]".parse().unwrap();
    for _ in 0..60 {
        let x = random_vector(&mut rng, 9);
        assert_eq!(norm(&s1, &x).unwrap(), Surd::rational(schreier_norm(1, &x)), "{x}");
        assert_eq!(norm(&s2, &x).unwrap(), Surd::rational(schreier_norm(2, &x)), "{x}");
    }
    assert_eq!(schreier_norm(1, &ones(&[1, 2, 3])), q(2));
    assert_eq!(schreier_norm(2, &ones(&[1, 2, 3, 4, 5, 6, 7, 8, 9])), q(7));
}

#[test]
fn baernstein_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let sp: SpaceSpec = "BAERNSTEIN(1;2)".parse().unwrap();
    for _ in 0..40 {
        let x = random_vector(&mut rng, 7);
        let got = norm(&sp, &x).unwrap();
        assert_eq!(got, Surd::root(baernstein_square(&x), 2), "{x}");
    }
    assert_eq!(baernstein_square(&ones(&[2, 3])), q(4));
    // {1} then {2,3}: 1 + 4
    assert_eq!(baernstein_square(&ones(&[1, 2, 3])), q(5));
}

#[test]
fn tsirelson_matches_interval_recursion() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let theta = qf(1, 2);
    for _ in 0..40 {
        let x = random_vector(&mut rng, 8);
        let got = tsirelson(&Ordinal::nat(1), &theta, &x).unwrap().norm;
        assert_eq!(got, tsirelson_oracle(&theta, &x), "{x}");
    }
    assert_eq!(tsirelson_oracle(&theta, &ones(&[3, 4, 5])), qf(3, 2));
    assert_eq!(tsirelson_oracle(&theta, &ones(&[2, 3])), q(1));
    // frozen: eight ones from index 2 and the same from index 4
    assert_eq!(tsirelson_oracle(&theta, &ones(&[2, 3, 4, 5, 6, 7, 8, 9])), qf(5, 2));
    assert_eq!(tsirelson_oracle(&qf(1, 3), &ones(&[4, 5, 6, 7, 8, 9, 10, 11])), q(2));
}

// ---- domination ----

fn solve(mut m: Vec<Vec<Q>>, mut rhs: Vec<Q>) -> Option<Vec<Q>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for k in col..n {
                    let d = &f * &m[col][k];
                    m[r][k] -= d;
                }
                let d = &f * &rhs[col];
                rhs[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &rhs[i] / &m[i][i]).collect())
}

/// Norming functionals of the target space on `support`.
fn functionals(space: &str, support: &[u64]) -> Vec<Vector> {
    let signs = |set: &[u64]| -> Vec<Vector> {
        (0u64..1 << set.len())
            .map(|m| Vector::from_pairs(set.iter().enumerate().map(|(i, &j)| (j, if m >> i & 1 == 1 { q(-1) } else { q(1) }))))
            .collect()
    };
    match space {
        "C0" => support.iter().flat_map(|&i| signs(&[i])).collect(),
        "L1" => signs(support),
        "X[S[1]]" => {
            let mut out = Vec::new();
            for m in 1u64..1 << support.len() {
                let set: Vec<u64> = (0..support.len()).filter(|i| m >> i & 1 == 1).map(|i| support[i]).collect();
                if schreier(1, &set) {
                    out.extend(signs(&set));
                }
            }
            out
        }
        _ => unreachable!(),
    }
}

/// max ||sum a x|| over the vertices of {a : ||sum a y|| <= 1}, listing
/// vertices by solving every square subsystem of the constraints.
fn domination_oracle(xs: &[Vector], xsp: &SpaceSpec, ys: &[Vector], ysp: &str) -> Q {
    let n = ys.len();
    let support: Vec<u64> = {
        let mut s: Vec<u64> = ys.iter().flat_map(|y| y.support()).collect();
        s.sort_unstable();
        s.dedup();
        s
    };
    let rows: Vec<Vec<Q>> = functionals(ysp, &support)
        .iter()
        .map(|phi| ys.iter().map(|y| phi.dot(y)).collect())
        .collect();
    let refs: Vec<&Vector> = xs.iter().collect();
    let mut best = Q::zero();
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let m: Vec<Vec<Q>> = pick.iter().map(|&r| rows[r].clone()).collect();
        if let Some(a) = solve(m, vec![Q::one(); n]) {
            let feasible = rows.iter().all(|r| r.iter().zip(&a).map(|(u, v)| u * v).sum::<Q>().abs() <= Q::one());
            if feasible {
                let v = norm(xsp, &Vector::combine(&a, &refs)).unwrap();
                let v = v.as_rational().unwrap().clone();
                if v > best {
                    best = v;
                }
            }
        }
        // next n-subset of the rows
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < rows.len() - n + i {
                pick[i] += 1;
                for j in i + 1..n {
                    pick[j] = pick[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn random_block_sequence(rng: &mut ChaCha8Rng, count: usize) -> Vec<Vector> {
    let mut out = Vec::new();
    let mut next = 1;
    for _ in 0..count {
        next += rng.random_range(0..2);
        let size = rng.random_range(1..=2);
        let mut v = Vector::zero();
        for i in next..next + size {
            v.set(i, q(rng.random_range(1..=3)) * if rng.random_bool(0.3) { q(-1) } else { q(1) });
        }
        next += size;
        out.push(v);
    }
    out
}

#[test]
fn exact_domination_matches_vertex_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let spaces = ["C0", "L1", "X[S[1]]"];
    for round in 0..30 {
        let ysn = spaces[round % 3];
        // vertex enumeration is too slow past two blocks except against c0
        let n = rng.random_range(1..=if ysn == "C0" { 3 } else { 2 });
        let xsp: SpaceSpec = spaces[rng.random_range(0..3)].parse().unwrap();
        let ysp: SpaceSpec = ysn.parse().unwrap();
        let xs = random_block_sequence(&mut rng, n);
        let ys = random_block_sequence(&mut rng, n);
        let d = domination_constant_exact(&xs.iter().collect::<Vec<_>>(), &xsp, &ys.iter().collect::<Vec<_>>(), &ysp).unwrap();
        let want = domination_oracle(&xs, &xsp, &ys, ysn);
        assert_eq!(d.constant, Bound::Finite(Surd::rational(want)), "round {round}");
    }
}

#[test]
fn frozen_domination_values() {
    let e = |i| Vector::unit(i);
    let l1: SpaceSpec = SpaceSpec::L1;
    let c0: SpaceSpec = SpaceSpec::C0;
    assert_eq!(domination_oracle(&[e(1), e(2)], &l1, &[e(1), e(2)], "C0"), q(2));
    assert_eq!(domination_oracle(&[e(1), e(2)], &c0, &[e(1), e(2)], "L1"), q(1));
    let s1: SpaceSpec = "X[S[1]]".parse().unwrap();
    // l1 basis against the X_S1 basis from index 1: {1,2,3} splits as {1},{2,3}
    assert_eq!(domination_oracle(&[e(1), e(2), e(3)], &l1, &[e(1), e(2), e(3)], "X[S[1]]"), q(2));
    let xs = VectorSequence::basis(s1, 3);
    let d = domination_constant_exact(&xs.vectors.iter().collect::<Vec<_>>(), &xs.space, &[&e(1), &e(2), &e(3)], &c0).unwrap();
    assert_eq!(d.constant, Bound::Finite(Surd::rational(q(2))));
}

// ---- spreading ----

#[test]
fn exact_spreading_matches_far_tail() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for k in 1..=2 {
        let fam = Family::schreier_nat(k);
        for _ in 0..20 {
            let m = rng.random_range(1..=4);
            let a: Vec<Q> = (0..m).map(|_| q(rng.random_range(-5..=5))).collect();
            let e = exact_spreading_combinatorial(&fam, &Schedule::Identity, &a, 2).unwrap();
            // indices 2^10 * 2^n sit deep in the tail
            let idx: Vec<u64> = (1..=m as u32).map(|n| 1u64 << (10 + n)).collect();
            let mut best = Q::zero();
            for mask in 0u64..1 << m {
                let set: Vec<u64> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| idx[i]).collect();
                if schreier(k, &set) {
                    let s: Q = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| a[i].abs()).sum();
                    best = best.max(s);
                }
            }
            assert_eq!(e.value, best, "S_{k} {a:?}");
        }
    }
}

