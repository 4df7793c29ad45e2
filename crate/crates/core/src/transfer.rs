//! Certificate transformers: shifts, diagonal limits, sums, index merges,
//! block certificates, the families `frak F_eps` and subsequence selection
//! into a Schreier space basis.

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domination::{
    corners, pairwise_disjoint, right_dominance_defect, verify_certificate, Certificate, DominationError, Verification,
    VectorSequence,
};
use crate::families::{
    almost_monotone_witness_with, find_order_embedding, EmbeddingResult, Family, FamilyError, FinSet, Level, MemberCache,
};
use crate::lp;
use crate::norms::{norm, SpaceSpec, Vector};
use crate::ordinal::Ordinal;
use crate::surd::{fmt_q, q, Bound, Surd, Q};

pub const DEFAULT_EMBED_BUDGET: u64 = 1_000_000;

#[derive(Debug, Error, PartialEq)]
pub enum TransferError {
    #[error(transparent)]
    Domination(#[from] DominationError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("nesting violated: {0}")]
    Nesting(String),
    #[error("insufficient depth: {0}")]
    Depth(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("right dominance fails: ({m}) is not {r}-dominated by ({l}), constant {constant}")]
    RightDominance { m: FinSet, l: FinSet, r: String, constant: String },
    #[error("no order embedding of {src} into {dst} at depth {n}: {reason}")]
    Embedding { src: String, dst: String, n: u64, reason: String },
    #[error("output failed re-verification at {f} with ratio {ratio}")]
    Reverify { f: FinSet, ratio: String },
    #[error("finite shadow fails at step {k}: {witness} lies in the level set but not in S_xi")]
    Shadow { k: usize, witness: FinSet },
}

/// A transformed certificate with its exact re-verification.
#[derive(Debug, Clone, PartialEq)]
pub struct Checked {
    pub cert: Certificate,
    pub verification: Verification,
}

fn reverify(cert: Certificate, rho: &VectorSequence) -> Result<Checked, TransferError> {
    let verification = verify_certificate(&cert, rho)?;
    if let Some(v) = &verification.violation {
        return Err(TransferError::Reverify {
            f: v.f.clone(),
            ratio: v.ratio.to_string(),
        });
    }
    Ok(Checked { cert, verification })
}

/// Position (1-based) of every entry of `inner` inside `outer`.
fn positions(inner: &[u64], outer: &[u64]) -> Option<Vec<u64>> {
    inner
        .iter()
        .map(|v| outer.binary_search(v).ok().map(|p| p as u64 + 1))
        .collect()
}

/// `M'(n) = M(n + l)`, `L'(n) = L(n + l)` at the smaller level `zeta`.
pub fn shift_certificate(cert: &Certificate, zeta: &Ordinal, l: usize, rho: &VectorSequence) -> Result<Checked, TransferError> {
    let n = cert.depth();
    if l >= n {
        return Err(TransferError::Depth(format!("shift {l} needs depth > {l}, got {n}")));
    }
    let need = almost_monotone_witness_with(zeta, &cert.xi, n as u64, &cert.policy())?.unwrap_or(0);
    if (l as u64) < need {
        return Err(TransferError::Depth(format!(
            "shift {l} is below the almost-monotone witness {need} for ({zeta}, {})",
            cert.xi
        )));
    }
    let out = Certificate {
        xi: Level::Ord(zeta.clone()),
        m: cert.m[l..].to_vec(),
        l: cert.l[l..].to_vec(),
        ..cert.clone()
    };
    reverify(out, rho)
}

fn check_nested(ms: &[&[u64]]) -> Result<(), TransferError> {
    for (i, w) in ms.windows(2).enumerate() {
        if positions(w[1], w[0]).is_none() {
            return Err(TransferError::Nesting(format!("M_{} is not contained in M_{}", i + 1, i)));
        }
    }
    Ok(())
}

fn same_frame(certs: &[&Certificate]) -> Result<(), TransferError> {
    let first = certs[0];
    for c in certs {
        if c.g_space != first.g_space || c.schedule != first.schedule {
            return Err(TransferError::Input("certificates use different target spaces or schedules".into()));
        }
    }
    Ok(())
}

/// Diagonal combination at a limit: `M(n) = M_n(n)` and
/// `L(n) = max_k L_k(s^n_k)` where `M_n(n) = M_k(s^n_k)`; certificate `k`
/// must sit at the k-th term of the fundamental sequence of `xi`.
pub fn limit_combine(certs: &[Certificate], xi: &Ordinal, r: &Q, rho: &VectorSequence) -> Result<Checked, TransferError> {
    if certs.is_empty() {
        return Err(TransferError::Input("no certificates".into()));
    }
    same_frame(&certs.iter().collect::<Vec<_>>())?;
    let policy = certs[0].policy();
    for (k, c) in certs.iter().enumerate() {
        let want = policy.apply(xi, k as u64 + 1).map_err(FamilyError::from)?;
        if c.xi != Level::Ord(want.clone()) {
            return Err(TransferError::Input(format!("certificate {} is at {} but {xi}[{}] = {want}", k + 1, c.xi, k + 1)));
        }
    }
    check_nested(&certs.iter().map(|c| c.m.as_slice()).collect::<Vec<_>>())?;
    let mut m = Vec::new();
    let mut l = Vec::new();
    let mut spreads: Vec<Vec<u64>> = Vec::new();
    for n in 1..=certs.len() {
        let cn = &certs[n - 1];
        if cn.depth() < n {
            break;
        }
        let v = cn.m[n - 1];
        let s: Vec<u64> = certs[..n]
            .iter()
            .map(|c| c.m.binary_search(&v).expect("nested") as u64 + 1)
            .collect();
        let lv = certs[..n].iter().zip(s.iter()).map(|(c, &sk)| c.l[sk as usize - 1]).max().unwrap();
        m.push(v);
        l.push(lv);
        spreads.push(s);
    }
    let depth = m.len();
    let cmax = certs.iter().map(|c| c.c.clone()).max().unwrap();
    let out = Certificate {
        xi: Level::Ord(xi.clone()),
        m,
        l,
        c: r * cmax,
        ..certs[0].clone()
    };
    // r-right dominance on every spread the argument touches
    let fam = out.xi.family_with(&policy);
    let members = crate::families::enumerate(&fam, depth as u64)?;
    let mut cache = MemberCache::default();
    for f in members.iter().filter(|f| !f.is_empty()) {
        let lo = f.min().unwrap();
        let k = (1..=lo)
            .find(|&k| {
                let sub = Family::FineSchreier(policy.apply(xi, k).unwrap(), policy.clone());
                sub.member_with(f.as_slice(), &mut cache)
            })
            .expect("limit membership has a witness k <= min F") as usize;
        let ck = &certs[k - 1];
        let from: Vec<u64> = f.as_slice().iter().map(|&n| ck.l[spreads[n as usize - 1][k - 1] as usize - 1]).collect();
        let to: Vec<u64> = f.as_slice().iter().map(|&n| out.l[n as usize - 1]).collect();
        let (from, to) = (FinSet::new(from).unwrap(), FinSet::new(to).unwrap());
        let rd = right_dominance_defect(&out.g_space, &from, &to, r)?;
        if !rd.ok {
            return Err(TransferError::RightDominance {
                m: from,
                l: to,
                r: fmt_q(r),
                constant: rd.constant.to_string(),
            });
        }
    }
    reverify(out, rho)
}

/// Combines a certificate at `zeta` with one at `xi` (nested inside it) into
/// one at `zeta + xi` with constant exactly `r (C_1 + C_2)`.
pub fn sum_combine(cert1: &Certificate, cert2: &Certificate, r: &Q, rho: &VectorSequence, budget: u64) -> Result<Checked, TransferError> {
    same_frame(&[cert1, cert2])?;
    if cert2.depth() == 0 {
        return reverify(cert1.clone(), rho);
    }
    let (Level::Ord(zeta), Level::Ord(xi)) = (&cert1.xi, &cert2.xi) else {
        return Err(TransferError::Input("sum needs ordinal levels".into()));
    };
    let s = positions(&cert2.m, &cert1.m).ok_or_else(|| TransferError::Nesting("M_2 is not contained in M_1".into()))?;
    let l3: Vec<u64> = (0..cert2.depth())
        .map(|i| cert2.l[i].max(cert1.l[s[i] as usize - 1]))
        .collect();
    let policy = cert1.policy();
    let total = zeta.add(xi);
    let src = Family::FineSchreier(total.clone(), policy.clone());
    let dst = Family::Sum(zeta.clone(), xi.clone(), policy.clone());
    let max_value = cert2.depth() as u64;
    let mut found = None;
    let mut last_reason = String::from("not found");
    for n in (1..=max_value).rev() {
        match find_order_embedding(&src, &dst, n, max_value, budget)? {
            EmbeddingResult::Found(p) => {
                found = Some(p);
                break;
            }
            EmbeddingResult::NotFound => last_reason = "search space exhausted".into(),
            EmbeddingResult::BudgetExhausted => {
                return Err(TransferError::Embedding {
                    src: src.to_string(),
                    dst: dst.to_string(),
                    n,
                    reason: "budget exhausted".into(),
                })
            }
        }
    }
    let p = found.ok_or_else(|| TransferError::Embedding {
        src: src.to_string(),
        dst: dst.to_string(),
        n: 1,
        reason: last_reason,
    })?;
    let out = Certificate {
        xi: Level::Ord(total),
        m: p.iter().map(|&i| cert2.m[i as usize - 1]).collect(),
        l: p.iter().map(|&i| l3[i as usize - 1]).collect(),
        c: r * (&cert1.c + &cert2.c),
        ..cert1.clone()
    };
    reverify(out, rho)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeResult {
    pub k: Vec<u64>,
    pub n: Vec<u64>,
    /// The base level at `r C_base`.
    pub base: Checked,
    /// Level `xi_i` at `r C_i + 1/r`.
    pub extras: Vec<Checked>,
}

/// `K(n) = M_t(n)` and `N(n) = max_i L_i(s_i^n)` with `M_t(n) = M_i(s_i^n)`.
pub fn merge_subsequence_certificates(
    base: &Certificate,
    extras: &[Certificate],
    r: &Q,
    rho: &VectorSequence,
) -> Result<MergeResult, TransferError> {
    let mut all: Vec<&Certificate> = vec![base];
    all.extend(extras.iter());
    same_frame(&all)?;
    check_nested(&all.iter().map(|c| c.m.as_slice()).collect::<Vec<_>>())?;
    let last = all.last().unwrap();
    let k = last.m.clone();
    let n: Vec<u64> = k
        .iter()
        .map(|v| {
            all.iter()
                .map(|c| c.l[c.m.binary_search(v).unwrap()])
                .max()
                .unwrap()
        })
        .collect();
    let with = |c: &Certificate, constant: Q| Certificate {
        m: k.clone(),
        l: n.clone(),
        c: constant,
        ..c.clone()
    };
    let base_out = reverify(with(base, r * &base.c), rho)?;
    let mut extra_out = Vec::new();
    for e in extras {
        extra_out.push(reverify(with(e, r * &e.c + Q::one() / r), rho)?);
    }
    Ok(MergeResult {
        k,
        n,
        base: base_out,
        extras: extra_out,
    })
}

/// The certificate `(x_n) <=_1 (e_{max supp x_n})` for a normalized block
/// sequence of a combinatorial space.
pub fn block_certificate(fam: &Family, blocks: &[Vector]) -> Result<(Checked, VectorSequence), TransferError> {
    if blocks.is_empty() {
        return Err(TransferError::Input("no blocks".into()));
    }
    let space = SpaceSpec::Combinatorial(fam.clone());
    let mut prev = 0;
    for (i, b) in blocks.iter().enumerate() {
        let (Some(lo), Some(hi)) = (b.min_support(), b.max_support()) else {
            return Err(TransferError::Input(format!("block {} is zero", i + 1)));
        };
        if lo <= prev {
            return Err(TransferError::Input(format!("block {} overlaps or precedes block {i}", i + 1)));
        }
        prev = hi;
        if norm(&space, b).map_err(DominationError::from)? != Surd::rational(Q::one()) {
            return Err(TransferError::Input(format!("block {} is not normalized", i + 1)));
        }
    }
    let rho = VectorSequence::new(space.clone(), blocks.to_vec())?;
    let n = blocks.len() as u64;
    let cert = Certificate::new(
        Level::All,
        (1..=n).collect(),
        blocks.iter().map(|b| b.max_support().unwrap()).collect(),
        Q::one(),
        space,
        "blocks",
    )?;
    Ok((reverify(cert, &rho)?, rho))
}

fn l2_square(v: &Vector) -> Q {
    v.iter().map(|(_, c)| c * c).sum()
}

/// The least cost of witnessing `f`: `f` lies in `frak F_eps` iff
/// `eps^power * need <= 1`. `None` when no positive `eps` works.
#[derive(Debug, Clone, PartialEq)]
pub struct FrakNeed {
    pub need: Q,
    pub power: u32,
}

impl FrakNeed {
    pub fn admits(&self, eps: &Q) -> bool {
        num::pow(eps.clone(), self.power as usize) * &self.need <= Q::one()
    }
}

pub fn frak_need(xs: &VectorSequence, f: &[u64]) -> Result<Option<FrakNeed>, TransferError> {
    if f.is_empty() {
        return Ok(Some(FrakNeed { need: Q::zero(), power: 1 }));
    }
    let vs: Vec<&Vector> = f.iter().map(|&n| xs.get(n)).collect();
    if vs.iter().any(|v| v.is_zero()) {
        return Ok(None);
    }
    let ones = vec![Q::one(); vs.len()];
    match &xs.space {
        SpaceSpec::Lp(2) if pairwise_disjoint(&vs) => {
            // the cheapest functional is sum eps x_n / ||x_n||^2 in l2
            let need: Q = vs.iter().map(|v| Q::one() / l2_square(v)).sum();
            Ok(Some(FrakNeed { need, power: 2 }))
        }
        sp if sp.is_polyhedral() => {
            let c = corners(sp, &vs)?;
            if c.sign_closed {
                return Ok(lp::covering_gauge(&c.points, &ones).map(|(need, _)| FrakNeed { need, power: 1 }));
            }
            // fix the first sign by symmetry
            let d = vs.len();
            let mut best: Option<Q> = None;
            for signs in 0u64..(1u64 << (d - 1)) {
                let cols: Vec<Vec<Q>> = c
                    .points
                    .iter()
                    .map(|p| {
                        p.iter()
                            .enumerate()
                            .map(|(i, v)| if i > 0 && signs >> (i - 1) & 1 == 1 { -v.clone() } else { v.clone() })
                            .collect()
                    })
                    .collect();
                if let Some((v, _)) = lp::covering_gauge(&cols, &ones) {
                    if best.as_ref().is_none_or(|b| v < *b) {
                        best = Some(v);
                    }
                }
            }
            Ok(best.map(|need| FrakNeed { need, power: 1 }))
        }
        sp => Err(TransferError::Input(format!(
            "{sp} has no finite norming set (l2 is handled only for disjoint supports)"
        ))),
    }
}

/// Whether one functional of norm at most one has `|x*(x_n)| >= eps` on all
/// of `f`.
pub fn frak_member(xs: &VectorSequence, f: &[u64], eps: &Q) -> Result<bool, TransferError> {
    Ok(frak_need(xs, f)?.is_some_and(|n| n.admits(eps)))
}

/// Members of `frak F_eps` inside `{1..n}` with their costs, in graded
/// lexicographic order.
pub fn frak_table(xs: &VectorSequence, eps: &Q, n: u64) -> Result<Vec<(FinSet, FrakNeed)>, TransferError> {
    if n as usize > xs.len() {
        return Err(TransferError::Input(format!("N = {n} exceeds the sequence length {}", xs.len())));
    }
    if !eps.is_positive() {
        return Err(TransferError::Input("eps must be positive".into()));
    }
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<u64>, FrakNeed)> = vec![(Vec::new(), FrakNeed { need: Q::zero(), power: 1 })];
    while let Some((cur, need)) = stack.pop() {
        let start = cur.last().map_or(1, |m| m + 1);
        for k in (start..=n).rev() {
            let mut next = cur.clone();
            next.push(k);
            if let Some(nd) = frak_need(xs, &next)? {
                if nd.admits(eps) {
                    stack.push((next, nd));
                }
            }
        }
        out.push((FinSet::new(cur).unwrap(), need));
    }
    out.sort_by(|a, b| a.0.shortlex_cmp(&b.0));
    Ok(out)
}

/// `frak F_eps((x_n))` restricted to `{1..n}`, as an explicit family in
/// graded lexicographic order.
pub fn frak_f_epsilon(xs: &VectorSequence, eps: &Q, n: u64) -> Result<Vec<FinSet>, TransferError> {
    Ok(frak_table(xs, eps, n)?.into_iter().map(|(f, _)| f).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionStep {
    pub k: usize,
    pub threshold: String,
    /// The refined index set `M_k` (finite).
    pub chosen: Vec<u64>,
    /// Members of the level family inside `M_k` checked against `S_xi`.
    pub checked_sets: usize,
    pub decision: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    #[serde(rename = "M")]
    pub m: Vec<u64>,
    pub phi: String,
    pub steps: Vec<SelectionStep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub trace: SelectionTrace,
    pub claim: Checked,
    /// `sum_{k <= depth} k phi^(k-1)`, at most `1/(1-phi)^2 <= 1 + eps`.
    pub series: Q,
    pub series_limit: Q,
}

fn mask_of(f: &FinSet) -> u64 {
    f.as_slice().iter().fold(0u64, |m, &i| m | (1u64 << (i - 1)))
}

/// Picks `M(1) < M(2) < ...` with `M(k) in M_k`, where each `M_k` is a
/// finite refinement on which `frak F_(phi^k)` lies inside `S_xi`, and
/// verifies `(x_{M(n)}) <=_(1+eps) (g_{M(n)})` in the Schreier space.
pub fn wn_select(xs: &VectorSequence, xi: &Ordinal, eps: &Q, phi: &Q, depth: usize) -> Result<Selection, TransferError> {
    if !(phi.is_positive() && *phi < Q::one()) {
        return Err(TransferError::Input("phi must lie in (0,1)".into()));
    }
    let one = Q::one();
    let series_limit = &one / ((&one - phi) * (&one - phi));
    if series_limit >= &one + eps {
        return Err(TransferError::Input(format!(
            "need (1-phi)^2 (1+eps) > 1; got 1/(1-phi)^2 = {}",
            fmt_q(&series_limit)
        )));
    }
    if depth == 0 || depth > xs.len() {
        return Err(TransferError::Depth(format!("depth must lie in 1..={}", xs.len())));
    }
    if xs.len() > 63 {
        return Err(TransferError::Input("at most 63 vectors".into()));
    }
    for (i, v) in xs.vectors.iter().enumerate() {
        if norm(&xs.space, v).map_err(DominationError::from)?.cmp_q(&one) == std::cmp::Ordering::Greater {
            return Err(TransferError::Input(format!("x_{} lies outside the unit ball", i + 1)));
        }
    }
    let n = xs.len() as u64;
    let s_xi = Family::schreier(xi.clone());
    let mut cache = MemberCache::default();
    let mut prev_pool: Vec<u64> = (1..=n).collect();
    let mut last = 0u64;
    let mut picks = Vec::new();
    let mut steps = Vec::new();
    // the smallest threshold gives the largest family; levels are filtered from it
    let table = frak_table(xs, &num::pow(phi.clone(), depth), n)?;
    let mut thr = one.clone();
    for k in 1..=depth {
        thr = &thr * phi;
        let level: Vec<FinSet> = table.iter().filter(|(_, nd)| nd.admits(&thr)).map(|(f, _)| f.clone()).collect();
        let bad: Vec<(u64, &FinSet)> = level
            .iter()
            .filter(|f| !s_xi.member_with(f.as_slice(), &mut cache))
            .map(|f| (mask_of(f), f))
            .collect();
        let pool: Vec<u64> = prev_pool.iter().copied().filter(|&v| v > last).collect();
        let need = depth - k + 1;
        let mut chosen: Option<Vec<u64>> = None;
        for s in 0..pool.len() {
            if pool.len() - s < need {
                break;
            }
            let mut c: Vec<u64> = Vec::new();
            let mut cmask = 0u64;
            for &e in &pool[s..] {
                let m = cmask | (1u64 << (e - 1));
                if bad.iter().all(|(b, _)| b & !m != 0) {
                    c.push(e);
                    cmask = m;
                }
            }
            if c.len() >= need {
                chosen = Some(c);
                break;
            }
        }
        let Some(c) = chosen else {
            let pmask = pool.iter().fold(0u64, |m, &e| m | (1u64 << (e - 1)));
            let witness = bad
                .iter()
                .find(|(b, _)| b & !pmask == 0)
                .or(bad.first())
                .map(|(_, f)| (*f).clone())
                .unwrap_or_default();
            return Err(TransferError::Shadow { k, witness });
        };
        let cmask = c.iter().fold(0u64, |m, &e| m | (1u64 << (e - 1)));
        let inside = level.iter().filter(|f| mask_of(f) & !cmask == 0).count();
        steps.push(SelectionStep {
            k,
            threshold: fmt_q(&thr),
            chosen: c.clone(),
            checked_sets: inside,
            decision: format!("all {inside} sets of frak F_(phi^{k}) inside M_{k} belong to S_{xi}"),
        });
        last = c[0];
        picks.push(c[0]);
        prev_pool = c;
    }
    let mut series = Q::zero();
    let mut pw = one.clone();
    for k in 1..=depth {
        series += q(k as i64) * &pw;
        pw = &pw * phi;
    }
    debug_assert!(series <= series_limit);
    let cert = Certificate::new(
        Level::All,
        picks.clone(),
        picks.clone(),
        &one + eps,
        SpaceSpec::Combinatorial(s_xi),
        "selection",
    )?;
    let claim = reverify(cert, xs)?;
    Ok(Selection {
        trace: SelectionTrace {
            m: picks,
            phi: fmt_q(phi),
            steps,
        },
        claim,
        series,
        series_limit,
    })
}

/// Bound that a verified selection claim is measured against.
pub fn selection_bound(sel: &Selection) -> Bound {
    Bound::Finite(Surd::rational(sel.claim.cert.c.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domination::Certificate;
    use crate::surd::qf;

    fn s1() -> SpaceSpec {
        "X[S[1]]".parse().unwrap()
    }

    fn ident(n: u64) -> Vec<u64> {
        (1..=n).collect()
    }

    fn cert(xi: Level, m: Vec<u64>, l: Vec<u64>, c: i64) -> Certificate {
        Certificate::new(xi, m, l, q(c), s1(), "").unwrap()
    }

    #[test]
    fn shift_examples() {
        let rho = VectorSequence::basis(s1(), 6);
        let c = cert(Level::nat(2), ident(6), ident(6), 1);
        let out = shift_certificate(&c, &Ordinal::nat(1), 0, &rho).unwrap();
        assert_eq!(out.cert.m, ident(6));
        let c = cert(Level::Ord(Ordinal::omega()), ident(6), ident(6), 1);
        let out = shift_certificate(&c, &Ordinal::nat(2), 2, &rho).unwrap();
        assert_eq!(out.cert.depth(), 4);
        assert!(shift_certificate(&c, &Ordinal::nat(2), 6, &rho).is_err());
    }

    #[test]
    fn limit_examples() {
        let rho = VectorSequence::basis(s1(), 6);
        let c1 = cert(Level::nat(1), ident(6), ident(6), 1);
        let c2 = cert(Level::nat(2), vec![2, 3, 4, 5, 6], vec![2, 3, 4, 5, 6], 1);
        let out = limit_combine(&[c1.clone(), c2], &Ordinal::omega(), &q(1), &rho).unwrap();
        assert_eq!(out.cert.m, vec![1, 3]);
        assert_eq!(out.cert.c, q(1));
        let single = limit_combine(std::slice::from_ref(&c1), &Ordinal::omega(), &q(1), &rho).unwrap();
        assert_eq!((single.cert.m.clone(), single.cert.l.clone()), (vec![1], vec![1]));
        let bad = cert(Level::nat(2), vec![7], vec![7], 1);
        assert!(matches!(
            limit_combine(&[cert(Level::nat(1), vec![1, 2], vec![1, 2], 1), bad], &Ordinal::omega(), &q(1), &rho),
            Err(TransferError::Nesting(_))
        ));
    }

    #[test]
    fn sum_examples() {
        let rho = VectorSequence::basis(s1(), 6);
        let c1 = cert(Level::nat(1), ident(6), ident(6), 1);
        let c2 = cert(Level::nat(1), ident(6), ident(6), 1);
        let out = sum_combine(&c1, &c2, &q(1), &rho, DEFAULT_EMBED_BUDGET).unwrap();
        assert_eq!(out.cert.xi, Level::nat(2));
        assert_eq!(out.cert.c, q(2));
        let c3 = cert(Level::nat(2), ident(6), ident(6), 1);
        let out = sum_combine(&c1, &c3, &qf(3, 2), &rho, DEFAULT_EMBED_BUDGET).unwrap();
        assert_eq!(out.cert.xi, Level::nat(3));
        assert_eq!(out.cert.c, q(3));
        let empty = cert(Level::nat(1), vec![], vec![], 1);
        assert_eq!(sum_combine(&c1, &empty, &q(1), &rho, 10).unwrap().cert, c1);
    }

    #[test]
    fn merge_examples() {
        let rho = VectorSequence::basis(s1(), 6);
        let base = cert(Level::nat(2), ident(6), ident(6), 1);
        let extra = cert(Level::nat(1), vec![2, 4, 6], vec![2, 4, 6], 1);
        let m = merge_subsequence_certificates(&base, std::slice::from_ref(&extra), &q(1), &rho).unwrap();
        assert_eq!(m.k, vec![2, 4, 6]);
        assert_eq!(m.extras[0].cert.c, q(2));
        let m = merge_subsequence_certificates(&base, &[], &q(1), &rho).unwrap();
        assert_eq!((m.k, m.n), (ident(6), ident(6)));
        let odd = cert(Level::nat(1), vec![7], vec![7], 1);
        assert!(merge_subsequence_certificates(&base, &[odd], &q(1), &rho).is_err());
    }

    #[test]
    fn block_examples() {
        let fam = Family::schreier_nat(1);
        let b1 = Vector::from_pairs([(1, q(1)), (2, q(1))]);
        let (out, _) = block_certificate(&fam, &[b1.clone(), Vector::unit(3)]).unwrap();
        assert_eq!(out.cert.l, vec![2, 3]);
        let (out, _) = block_certificate(&fam, &[Vector::unit(5)]).unwrap();
        assert_eq!(out.cert.l, vec![5]);
        assert!(block_certificate(&fam, &[b1, Vector::unit(2)]).is_err());
    }

    #[test]
    fn frak_examples() {
        let l1 = VectorSequence::basis(SpaceSpec::L1, 4);
        assert_eq!(frak_f_epsilon(&l1, &q(1), 4).unwrap().len(), 16);
        let x1 = VectorSequence::basis(s1(), 4);
        let want = crate::families::enumerate(&Family::schreier_nat(1), 4).unwrap();
        assert_eq!(frak_f_epsilon(&x1, &q(1), 4).unwrap(), want);
        assert_eq!(frak_f_epsilon(&x1, &qf(3, 2), 4).unwrap(), vec![FinSet::empty()]);
    }

    #[test]
    fn select_examples() {
        let l2 = VectorSequence::basis(SpaceSpec::Lp(2), 12);
        let sel = wn_select(&l2, &Ordinal::nat(1), &qf(1, 2), &qf(1, 6), 6).unwrap();
        assert_eq!(sel.trace.m.len(), 6);
        assert!(sel.series <= sel.series_limit);
        let l1 = VectorSequence::basis(SpaceSpec::L1, 8);
        assert!(matches!(
            wn_select(&l1, &Ordinal::nat(1), &qf(1, 2), &qf(1, 6), 6),
            Err(TransferError::Shadow { k: 1, .. })
        ));
        let c0 = VectorSequence::basis(SpaceSpec::C0, 12);
        assert!(wn_select(&c0, &Ordinal::nat(1), &qf(1, 2), &qf(1, 6), 6).is_ok());
    }
}
