//! Property tests for the invariants of each module.

use num::{Signed, Zero};
use proptest::prelude::*;

use schreier::domination::{
    build_t_tree, domination_constant_exact, domination_lower_bound, ratio, verify_certificate, Certificate, VectorSequence,
};
use schreier::families::{enumerate, Family, FinSet, Level};
use schreier::norms::{norm, norming_functionals, tsirelson, tsirelson_is_fixpoint, SpaceSpec, Vector};
use schreier::ordinal::{Ordinal, Schedule};
use schreier::spreading::{estimate_spreading, exact_spreading_combinatorial, exact_table, default_probes, table_at, Source};
use schreier::surd::{q, qf, Bound, Surd, Q};
use schreier::transfer::{frak_f_epsilon, shift_certificate, sum_combine, DEFAULT_EMBED_BUDGET};

fn exponents() -> Vec<Ordinal> {
    vec![
        Ordinal::zero(),
        Ordinal::nat(1),
        Ordinal::nat(2),
        Ordinal::omega(),
        Ordinal::omega().succ(),
    ]
}

fn ordinal() -> impl Strategy<Value = Ordinal> {
    prop::collection::btree_map(0usize..5, 1u64..4, 0..4).prop_map(|m| {
        let ex = exponents();
        let terms: Vec<(Ordinal, u64)> = m.into_iter().rev().map(|(i, c)| (ex[i].clone(), c)).collect();
        Ordinal::from_terms(terms).expect("descending exponents")
    })
}

fn finset(max: u64, len: usize) -> impl Strategy<Value = FinSet> {
    prop::collection::btree_set(1..=max, 0..=len).prop_map(|s| FinSet::new(s.into_iter().collect()).unwrap())
}

fn vector(max: u64) -> impl Strategy<Value = Vector> {
    prop::collection::btree_map(1..=max, (-6i64..=6, 1i64..=3), 0..=max as usize)
        .prop_map(|m| Vector::from_pairs(m.into_iter().map(|(i, (a, b))| (i, qf(a, b)))))
}

fn families() -> Vec<Family> {
    ["F[2]", "F[w]", "F[w+1]", "S[1]", "S[2]", "SUM(1;w)", "NFOLD(S[1];2)", "ALL"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

fn spaces() -> Vec<SpaceSpec> {
    ["X[S[1]]", "X[S[2]]", "C0", "L1", "TSIRELSON(1;1/2)", "BAERNSTEIN(1;2)", "LP(2)", "PCONV(X[S[1]];2)"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect()
}

fn polyhedral() -> Vec<SpaceSpec> {
    ["X[S[1]]", "C0", "L1", "TSIRELSON(1;1/2)"].iter().map(|s| s.parse().unwrap()).collect()
}

fn rat(s: &Surd) -> Q {
    s.as_rational().expect("rational norm").clone()
}

/// Successive blocks of size 1 or 2 with small integer entries.
fn blocks(count: usize) -> impl Strategy<Value = Vec<Vector>> {
    prop::collection::vec((0u64..2, 1u64..=2, prop::collection::vec(-3i64..=3, 2)), count).prop_map(|spec| {
        let mut next = 1;
        spec.into_iter()
            .map(|(gap, size, cs)| {
                next += gap;
                let mut v = Vector::zero();
                for (k, i) in (next..next + size).enumerate() {
                    v.set(i, q(if cs[k] == 0 { 1 } else { cs[k] }));
                }
                next += size;
                v
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn add_is_associative_with_identity(a in ordinal(), b in ordinal(), c in ordinal()) {
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.add(&Ordinal::zero()), a.clone());
        prop_assert_eq!(Ordinal::zero().add(&a), a);
    }

    #[test]
    fn add_is_strictly_monotone_on_the_right(a in ordinal(), b in ordinal(), c in ordinal()) {
        if b < c {
            prop_assert!(a.add(&b) < a.add(&c));
        }
    }

    #[test]
    fn ordinals_round_trip_through_text(a in ordinal()) {
        let back: Ordinal = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn fundamental_sequences_increase_below_the_limit(a in ordinal()) {
        prop_assume!(a.is_limit());
        let mut prev: Option<Ordinal> = None;
        for n in 1..=32 {
            let x = a.fundamental(n).unwrap();
            prop_assert!(x < a);
            if let Some(p) = &prev {
                prop_assert!(*p < x, "{}[{}] = {} not above {}", a, n, x, p);
            }
            prev = Some(x);
        }
    }

    #[test]
    fn families_are_hereditary_and_spreading(f in finset(12, 6), bump in 0u64..3) {
        for fam in families() {
            if !fam.member(&f) {
                continue;
            }
            for i in 0..f.len() {
                let mut v = f.as_slice().to_vec();
                v.remove(i);
                prop_assert!(fam.member(&FinSet::new(v).unwrap()), "{} not hereditary at {}", fam, f);
            }
            // push the tail right by `bump`
            if let Some(last) = f.len().checked_sub(1) {
                let mut v = f.as_slice().to_vec();
                v[last] += bump;
                prop_assert!(fam.member(&FinSet::new(v).unwrap()), "{} not spreading at {}", fam, f);
            }
        }
    }

    #[test]
    fn enumeration_agrees_with_membership(f in finset(8, 8)) {
        for fam in families() {
            let all = enumerate(&fam, 8).unwrap();
            prop_assert_eq!(all.contains(&f), fam.member(&f));
        }
    }

    #[test]
    fn norms_are_homogeneous_and_unconditional(x in vector(7), c in -5i64..=5, flips in any::<u8>()) {
        for sp in spaces() {
            let nx = norm(&sp, &x).unwrap();
            prop_assert_eq!(norm(&sp, &x.scale(&q(c))).unwrap(), nx.mul_q(&q(c).abs()));
            let mut y = x.clone();
            for (k, i) in x.support().into_iter().enumerate() {
                if flips >> (k % 8) & 1 == 1 {
                    y.set(i, -x.get(i));
                }
            }
            prop_assert_eq!(norm(&sp, &y).unwrap(), nx.clone());
            let sup = x.abs_max();
            prop_assert!(nx.cmp_q(&sup) != std::cmp::Ordering::Less);
        }
    }

    #[test]
    fn polyhedral_norms_satisfy_the_triangle_inequality(x in vector(7), y in vector(7)) {
        for sp in polyhedral() {
            let s = rat(&norm(&sp, &x.add(&y)).unwrap());
            prop_assert!(s <= rat(&norm(&sp, &x).unwrap()) + rat(&norm(&sp, &y).unwrap()));
        }
    }

    #[test]
    fn norming_functionals_attain_the_norm(x in vector(6)) {
        prop_assume!(!x.is_zero());
        for sp in polyhedral() {
            let fs = norming_functionals(&sp, &x.support()).unwrap();
            let best = fs.iter().map(|f| f.dot(&x).abs()).max().unwrap_or_else(Q::zero);
            prop_assert_eq!(Surd::rational(best), norm(&sp, &x).unwrap());
        }
    }

    #[test]
    fn tsirelson_tables_are_fixpoints(x in vector(9)) {
        let e = tsirelson(&Ordinal::nat(1), &qf(1, 2), &x).unwrap();
        prop_assert!(tsirelson_is_fixpoint(&Ordinal::nat(1), &qf(1, 2), &x, &e.table).unwrap());
    }
}

fn exact(xs: &[Vector], xsp: &SpaceSpec, ys: &[Vector], ysp: &SpaceSpec) -> Bound {
    domination_constant_exact(&xs.iter().collect::<Vec<_>>(), xsp, &ys.iter().collect::<Vec<_>>(), ysp)
        .unwrap()
        .constant
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lower_bounds_never_exceed_the_exact_constant(xs in blocks(3), ys in blocks(3), i in 0usize..4, j in 0usize..4, seed in 0u64..1000) {
        let (xsp, ysp) = (polyhedral()[i].clone(), polyhedral()[j].clone());
        let c = exact(&xs, &xsp, &ys, &ysp);
        let lb = domination_lower_bound(
            &VectorSequence::new(xsp, xs).unwrap(),
            &VectorSequence::new(ysp, ys).unwrap(),
            32,
            seed,
        )
        .unwrap();
        prop_assert!(lb.value <= c);
    }

    #[test]
    fn domination_constants_compose(xs in blocks(2), ys in blocks(2), zs in blocks(2), i in 0usize..4, j in 0usize..4, k in 0usize..4) {
        let sp = polyhedral();
        let xz = exact(&xs, &sp[i], &zs, &sp[k]);
        let xy = exact(&xs, &sp[i], &ys, &sp[j]);
        let yz = exact(&ys, &sp[j], &zs, &sp[k]);
        if let (Bound::Finite(a), Bound::Finite(b)) = (&xy, &yz) {
            prop_assert!(xz <= Bound::Finite(a.mul(b)));
        }
    }

    #[test]
    fn violations_reproduce_their_ratio(m in finset(6, 4), shift in 0u64..3, c in 1i64..4, level in 0u64..4) {
        let rho = VectorSequence::basis(SpaceSpec::L1, 6);
        let l: Vec<u64> = m.as_slice().iter().map(|v| v + shift).collect();
        let cert = Certificate::new(Level::nat(level), m.as_slice().to_vec(), l, q(c), SpaceSpec::C0, "").unwrap();
        let v = verify_certificate(&cert, &rho).unwrap();
        if let Some(bad) = v.violation {
            prop_assert!(!v.ok);
            let xs: Vec<Vector> = bad.f.as_slice().iter().map(|&n| rho.get(cert.m[n as usize - 1]).clone()).collect();
            let ys: Vec<Vector> = bad.f.as_slice().iter().map(|&n| Vector::unit(cert.l[n as usize - 1])).collect();
            let r = ratio(&bad.scalars, &xs.iter().collect::<Vec<_>>(), &rho.space, &ys.iter().collect::<Vec<_>>(), &SpaceSpec::C0)
                .unwrap()
                .unwrap();
            prop_assert_eq!(&r, &bad.ratio);
            prop_assert!(!r.le_q(&q(c)));
        } else {
            prop_assert!(v.ok);
        }
    }

    #[test]
    fn trees_are_closed_and_monotone(c1 in 1i64..4, extra in 0i64..3, sp in 0usize..3) {
        let spaces = ["X[S[1]]", "C0", "L1"];
        let rho = VectorSequence::basis(spaces[sp].parse().unwrap(), 4);
        let g: SpaceSpec = "X[S[1]]".parse().unwrap();
        let small = build_t_tree(&rho, &q(c1), &g, 4, 3, 100_000).unwrap().unwrap();
        let big = build_t_tree(&rho, &q(c1 + extra), &g, 4, 3, 100_000).unwrap().unwrap();
        for node in &small {
            prop_assert!(big.contains(node));
            if !node.is_empty() {
                prop_assert!(small.contains(&node[..node.len() - 1].to_vec()));
            }
        }
    }

    #[test]
    fn shifted_certificates_verify(m in finset(8, 6), zeta in 0u64..2) {
        prop_assume!(m.len() >= 3);
        let rho = VectorSequence::basis("X[S[1]]".parse().unwrap(), 8);
        let mut cert = Certificate::new(Level::Ord(Ordinal::omega()), m.as_slice().to_vec(), m.as_slice().to_vec(), q(1000), "C0".parse().unwrap(), "").unwrap();
        let v = verify_certificate(&cert, &rho).unwrap();
        cert.c = v.worst.finite().unwrap().as_rational().unwrap().clone().max(q(1));
        let out = shift_certificate(&cert, &Ordinal::nat(zeta + 1), 2, &rho);
        prop_assert!(out.is_ok(), "{:?}", out.err());
    }

    #[test]
    fn sum_constants_are_exact(m in finset(8, 5), keep in any::<u8>(), c1 in 1i64..4, c2 in 1i64..4, r in 0usize..3) {
        prop_assume!(!m.is_empty());
        let m2: Vec<u64> = m.as_slice().iter().enumerate().filter(|(i, _)| keep >> i & 1 == 1).map(|(_, v)| *v).collect();
        let rho = VectorSequence::basis("X[S[1]]".parse().unwrap(), 8);
        let g: SpaceSpec = "X[S[1]]".parse().unwrap();
        let a = Certificate::new(Level::nat(1), m.as_slice().to_vec(), m.as_slice().to_vec(), q(c1), g.clone(), "").unwrap();
        let b = Certificate::new(Level::nat(1), m2.clone(), m2.clone(), q(c2), g, "").unwrap();
        let r = [q(1), qf(3, 2), q(2)][r].clone();
        let out = sum_combine(&a, &b, &r, &rho, DEFAULT_EMBED_BUDGET).unwrap();
        if m2.is_empty() {
            prop_assert_eq!(out.cert.c, q(c1));
        } else {
            prop_assert_eq!(out.cert.c, &r * (q(c1) + q(c2)));
        }
    }

    #[test]
    fn frak_families_are_hereditary_and_shrink_with_eps(xs in blocks(4), e1 in 1i64..8, de in 0i64..4, sp in 0usize..3) {
        let spaces = ["X[S[1]]", "C0", "LP(2)"];
        let space: SpaceSpec = spaces[sp].parse().unwrap();
        let normed: Vec<Vector> = xs
            .iter()
            .map(|x| {
                let n = norm(&space, x).unwrap();
                match n.as_rational() {
                    Some(r) => x.scale(&(Q::from(num::BigInt::from(1)) / r)),
                    None => x.clone(),
                }
            })
            .collect();
        let seq = VectorSequence::new(space, normed).unwrap();
        let (lo, hi) = (qf(e1, 8), qf(e1 + de, 8));
        let small = frak_f_epsilon(&seq, &hi, 4).unwrap();
        let big = frak_f_epsilon(&seq, &lo, 4).unwrap();
        for f in &small {
            prop_assert!(big.contains(f));
            for i in 0..f.len() {
                let mut v = f.as_slice().to_vec();
                v.remove(i);
                prop_assert!(small.contains(&FinSet::new(v).unwrap()));
            }
        }
    }

    #[test]
    fn spreading_tables_ignore_the_subsequence(a in 1u64..4, b in 0u64..5, k in 1u64..3, m in 1usize..4) {
        let fam = Family::schreier_nat(k);
        let probes = default_probes(m, 8, a + b);
        let t1 = exact_table(&fam, &Schedule::Identity, m, &probes, "p", 2).unwrap();
        let t2 = exact_table(&fam, &Schedule::Affine(a, b), m, &probes, "p", 2).unwrap();
        prop_assert_eq!(t1.values, t2.values);
    }

    #[test]
    fn exact_spreading_matches_stable_estimates(coeffs in prop::collection::vec(-4i64..=4, 1..=4), k in 1u64..3) {
        let fam = Family::schreier_nat(k);
        let a: Vec<Q> = coeffs.iter().map(|&c| q(c)).collect();
        let e = exact_spreading_combinatorial(&fam, &Schedule::Identity, &a, 2).unwrap();
        let src = Source::Basis(SpaceSpec::Combinatorial(fam));
        let est = estimate_spreading(&src, &Schedule::Identity, a.len(), &[e.stage, 2 * e.stage], 2, std::slice::from_ref(&a), "p").unwrap();
        prop_assert!(est.stable);
        for t in &est.tables {
            prop_assert_eq!(&t.values[0], &Surd::rational(e.value.clone()));
        }
    }

    #[test]
    fn combinatorial_tables_grow_with_the_stage(coeffs in prop::collection::vec(-4i64..=4, 1..=4), s in 1u64..6) {
        let src = Source::Basis("X[S[2]]".parse().unwrap());
        let a: Vec<Q> = coeffs.iter().map(|&c| q(c)).collect();
        let probes = vec![a];
        let lo = table_at(&src, &Schedule::Identity, probes[0].len(), s, 2, &probes, "p").unwrap();
        let hi = table_at(&src, &Schedule::Identity, probes[0].len(), 2 * s, 2, &probes, "p").unwrap();
        prop_assert!(lo.values[0] <= hi.values[0]);
        prop_assert!(!hi.values[0].is_zero() || probes[0].iter().all(|c| c.is_zero()));
    }
}
