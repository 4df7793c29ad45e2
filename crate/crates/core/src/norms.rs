//! Norms of finitely supported rational vectors: combinatorial spaces,
//! p-convexifications, Baernstein and Tsirelson spaces, and the classical
//! sequence spaces.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{Cursor, Family, MemberCache};
use crate::ordinal::Ordinal;
use crate::surd::{fmt_q, parse_q, Surd, Q};

pub const DEFAULT_MEMBER_BUDGET: usize = 1_000_000;
pub const DEFAULT_FUNCTIONAL_BUDGET: usize = 200_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NormError {
    #[error("enumeration budget exceeded ({0} admissible sets)")]
    Budget(usize),
    #[error("exponent {0} must be an integer (non-integer powers of rationals are not exact)")]
    NonIntegerExponent(String),
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error("{0} is not polyhedral; no finite norming set exists")]
    Unsupported(String),
    #[error("family {0} does not contain the singleton {{{1}}}")]
    NotNormalized(String, u64),
    #[error("cannot parse space at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid vector: {0}")]
    Vector(String),
}

/// Finitely supported vector with no stored zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Vector {
    entries: BTreeMap<u64, Q>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector::default()
    }

    pub fn unit(n: u64) -> Self {
        let mut v = Vector::zero();
        v.set(n, Q::one());
        v
    }

    pub fn from_pairs<I: IntoIterator<Item = (u64, Q)>>(pairs: I) -> Self {
        let mut v = Vector::zero();
        for (i, c) in pairs {
            let cur = v.get(i);
            v.set(i, cur + c);
        }
        v
    }

    pub fn get(&self, i: u64) -> Q {
        self.entries.get(&i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, i: u64, c: Q) {
        assert!(i >= 1, "indices are positive");
        if c.is_zero() {
            self.entries.remove(&i);
        } else {
            self.entries.insert(i, c);
        }
    }

    pub fn support(&self) -> Vec<u64> {
        self.entries.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &Q)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn min_support(&self) -> Option<u64> {
        self.entries.keys().next().copied()
    }

    pub fn max_support(&self) -> Option<u64> {
        self.entries.keys().next_back().copied()
    }

    pub fn scale(&self, c: &Q) -> Vector {
        if c.is_zero() {
            return Vector::zero();
        }
        Vector {
            entries: self.entries.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        let mut out = self.clone();
        for (k, v) in &other.entries {
            let cur = out.get(*k);
            out.set(*k, cur + v);
        }
        out
    }

    /// `sum a_n v_n`.
    pub fn combine(coeffs: &[Q], vs: &[&Vector]) -> Vector {
        let mut out = Vector::zero();
        for (a, v) in coeffs.iter().zip(vs.iter()) {
            if !a.is_zero() {
                out = out.add(&v.scale(a));
            }
        }
        out
    }

    pub fn abs_max(&self) -> Q {
        self.entries.values().map(|v| v.abs()).max().unwrap_or_else(Q::zero)
    }

    pub fn dot(&self, other: &Vector) -> Q {
        let mut s = Q::zero();
        for (k, v) in &self.entries {
            if let Some(w) = other.entries.get(k) {
                s += v * w;
            }
        }
        s
    }

    pub fn restrict(&self, keep: impl Fn(u64) -> bool) -> Vector {
        Vector {
            entries: self.entries.iter().filter(|(k, _)| keep(**k)).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    pub fn to_json(&self) -> VectorJson {
        VectorJson {
            entries: self.entries.iter().map(|(k, v)| (*k, serde_json::Value::String(fmt_q(v)))).collect(),
        }
    }

    pub fn from_json(j: &VectorJson) -> Result<Self, NormError> {
        let mut v = Vector::zero();
        for (i, c) in &j.entries {
            if *i == 0 {
                return Err(NormError::Vector("index 0 is not allowed".into()));
            }
            let c = match c {
                serde_json::Value::String(s) => parse_q(s).map_err(NormError::Vector)?,
                serde_json::Value::Number(n) => parse_q(&n.to_string()).map_err(NormError::Vector)?,
                other => return Err(NormError::Vector(format!("bad coefficient {other}"))),
            };
            if v.entries.contains_key(i) {
                return Err(NormError::Vector(format!("index {i} repeated")));
            }
            v.set(*i, c);
        }
        Ok(v)
    }
}

/// Reads either `{"entries": [[i, c], ...]}` or a plain coefficient array
/// `[c_1, c_2, ...]` (indices from 1).
pub fn parse_vector(text: &str) -> Result<Vector, NormError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| NormError::Vector(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    match value {
        serde_json::Value::Array(items) => {
            let entries = items.into_iter().enumerate().map(|(i, c)| (i as u64 + 1, c)).collect();
            Vector::from_json(&VectorJson { entries })
        }
        other => {
            let j: VectorJson = serde_json::from_value(other).map_err(|e| NormError::Vector(e.to_string()))?;
            Vector::from_json(&j)
        }
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(k, v)| format!("{}:{}", k, fmt_q(v))).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VectorJson {
    pub entries: Vec<(u64, serde_json::Value)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SpaceSpec {
    Combinatorial(Family),
    PConvex(Box<SpaceSpec>, u32),
    Baernstein(Ordinal, u32),
    Tsirelson(Ordinal, Q),
    C0,
    L1,
    Lp(u32),
}

impl SpaceSpec {
    pub fn schreier(k: u64) -> Self {
        SpaceSpec::Combinatorial(Family::schreier_nat(k))
    }

    pub fn validate(&self) -> Result<(), NormError> {
        match self {
            SpaceSpec::PConvex(b, p) => {
                if *p < 2 {
                    return Err(NormError::Range(format!("p-convexification needs p > 1, got {p}")));
                }
                b.validate()
            }
            SpaceSpec::Baernstein(_, p) if *p < 2 => {
                Err(NormError::Range(format!("Baernstein exponent must be > 1, got {p}")))
            }
            SpaceSpec::Tsirelson(_, t) if !(t.is_positive() && *t < Q::one()) => {
                Err(NormError::Range(format!("theta must lie in (0,1), got {}", fmt_q(t))))
            }
            SpaceSpec::Lp(0) => Err(NormError::Range("p must be >= 1".into())),
            _ => Ok(()),
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        matches!(
            self,
            SpaceSpec::Combinatorial(_) | SpaceSpec::Tsirelson(..) | SpaceSpec::C0 | SpaceSpec::L1 | SpaceSpec::Lp(1)
        )
    }

    /// Every space here has a 1-unconditional basis.
    pub fn is_unconditional(&self) -> bool {
        true
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Combinatorial(fam) => write!(f, "X[{fam}]"),
            SpaceSpec::PConvex(b, p) => write!(f, "PCONV({b};{p})"),
            SpaceSpec::Baernstein(xi, p) => write!(f, "BAERNSTEIN({xi};{p})"),
            SpaceSpec::Tsirelson(xi, t) => write!(f, "TSIRELSON({xi};{})", fmt_q(t)),
            SpaceSpec::C0 => write!(f, "C0"),
            SpaceSpec::L1 => write!(f, "L1"),
            SpaceSpec::Lp(p) => write!(f, "LP({p})"),
        }
    }
}

fn int_exponent(s: &str) -> Result<u32, String> {
    let v = parse_q(s)?;
    if !v.is_integer() {
        return Err(format!("exponent {s} must be an integer"));
    }
    let n: i64 = v.to_integer().try_into().map_err(|_| format!("exponent {s} too large"))?;
    u32::try_from(n).map_err(|_| format!("exponent {s} out of range"))
}

fn parse_space(c: &mut Cursor) -> Result<SpaceSpec, (usize, String)> {
    if c.eat("X[") {
        let at = c.pos;
        let body = c.until(&[']']);
        c.expect("]")?;
        let fam: Family = body.parse().map_err(|e: crate::families::FamilyError| (at, e.to_string()))?;
        Ok(SpaceSpec::Combinatorial(fam))
    } else if c.eat("PCONV(") {
        let b = parse_space(c)?;
        c.expect(";")?;
        let at = c.pos;
        let p = int_exponent(c.until(&[')'])).map_err(|e| (at, e))?;
        c.expect(")")?;
        Ok(SpaceSpec::PConvex(Box::new(b), p))
    } else if c.eat("BAERNSTEIN(") {
        let at = c.pos;
        let xi: Ordinal = c.until(&[';']).trim().parse().map_err(|e: crate::ordinal::OrdinalError| (at, e.to_string()))?;
        c.expect(";")?;
        let at = c.pos;
        let p = int_exponent(c.until(&[')'])).map_err(|e| (at, e))?;
        c.expect(")")?;
        Ok(SpaceSpec::Baernstein(xi, p))
    } else if c.eat("TSIRELSON(") {
        let at = c.pos;
        let xi: Ordinal = c.until(&[';']).trim().parse().map_err(|e: crate::ordinal::OrdinalError| (at, e.to_string()))?;
        c.expect(";")?;
        let at = c.pos;
        let t = parse_q(c.until(&[')'])).map_err(|e| (at, e))?;
        c.expect(")")?;
        Ok(SpaceSpec::Tsirelson(xi, t))
    } else if c.eat("C0") {
        Ok(SpaceSpec::C0)
    } else if c.eat("L1") {
        Ok(SpaceSpec::L1)
    } else if c.eat("LP(") {
        let at = c.pos;
        let p = int_exponent(c.until(&[')'])).map_err(|e| (at, e))?;
        c.expect(")")?;
        Ok(SpaceSpec::Lp(p))
    } else {
        Err((c.pos, "expected X[..], PCONV, BAERNSTEIN, TSIRELSON, C0, L1 or LP".into()))
    }
}

impl FromStr for SpaceSpec {
    type Err = NormError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut c = Cursor::new(s.trim());
        let sp = parse_space(&mut c).map_err(|(pos, msg)| NormError::Parse { pos, msg })?;
        if !c.rest().is_empty() {
            return Err(NormError::Parse {
                pos: c.pos,
                msg: "trailing input".into(),
            });
        }
        sp.validate()?;
        Ok(sp)
    }
}

/// All members of `fam` that are subsets of `support`, as position lists
/// into `support` (the empty set included).
pub fn members_within(fam: &Family, support: &[u64], budget: usize) -> Result<Vec<Vec<usize>>, NormError> {
    let mut cache = MemberCache::default();
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    let hereditary = !matches!(fam, Family::Explicit(_));
    if !hereditary {
        if support.len() > 20 {
            return Err(NormError::Budget(1 << 20));
        }
        for mask in 0u64..(1u64 << support.len()) {
            let pos: Vec<usize> = (0..support.len()).filter(|i| mask >> i & 1 == 1).collect();
            let idx: Vec<u64> = pos.iter().map(|&p| support[p]).collect();
            if fam.member_with(&idx, &mut cache) {
                out.push(pos);
            }
        }
        return Ok(out);
    }
    while let Some(cur) = stack.pop() {
        let start = cur.last().map_or(0, |l| l + 1);
        let idx: Vec<u64> = cur.iter().map(|&p| support[p]).collect();
        for p in start..support.len() {
            let mut nidx = idx.clone();
            nidx.push(support[p]);
            if fam.member_with(&nidx, &mut cache) {
                let mut next = cur.clone();
                next.push(p);
                stack.push(next);
            }
        }
        out.push(cur);
        if out.len() > budget {
            return Err(NormError::Budget(budget));
        }
    }
    Ok(out)
}

fn check_singletons(fam: &Family, support: &[u64]) -> Result<(), NormError> {
    for &n in support {
        let mut cache = MemberCache::default();
        if !fam.member_with(&[n], &mut cache) {
            return Err(NormError::NotNormalized(fam.to_string(), n));
        }
    }
    Ok(())
}

/// The norm, as an exact surd (rational unless a root is involved).
pub fn norm(space: &SpaceSpec, x: &Vector) -> Result<Surd, NormError> {
    if x.is_zero() {
        return Ok(Surd::zero());
    }
    match space {
        SpaceSpec::C0 => Ok(Surd::rational(x.abs_max())),
        SpaceSpec::L1 | SpaceSpec::Lp(1) => Ok(Surd::rational(x.iter().map(|(_, v)| v.abs()).sum())),
        SpaceSpec::Lp(p) => {
            let s: Q = x.iter().map(|(_, v)| num::pow(v.abs(), *p as usize)).sum();
            Ok(Surd::root(s, *p))
        }
        SpaceSpec::Combinatorial(fam) => {
            let support = x.support();
            check_singletons(fam, &support)?;
            let coeffs: Vec<Q> = support.iter().map(|&i| x.get(i).abs()).collect();
            let sets = members_within(fam, &support, DEFAULT_MEMBER_BUDGET)?;
            let best = sets
                .iter()
                .map(|s| s.iter().map(|&p| coeffs[p].clone()).sum::<Q>())
                .max()
                .unwrap_or_else(Q::zero);
            Ok(Surd::rational(best))
        }
        SpaceSpec::PConvex(base, p) => {
            let powered = Vector::from_pairs(x.iter().map(|(i, v)| (i, num::pow(v.abs(), *p as usize))));
            let inner = norm(base, &powered)?;
            Ok(Surd::root(inner.base().clone(), inner.index() * p))
        }
        SpaceSpec::Baernstein(xi, p) => Ok(Surd::root(baernstein_power(xi, *p, x)?, *p)),
        SpaceSpec::Tsirelson(xi, theta) => Ok(Surd::rational(tsirelson(xi, theta, x)?.norm)),
    }
}

/// `||x||^p` for the Baernstein space: the best sum of `||F_i x||_1^p` over
/// `F_1 < F_2 < ...` in `S_xi`, by dynamic programming over the support.
pub fn baernstein_power(xi: &Ordinal, p: u32, x: &Vector) -> Result<Q, NormError> {
    let support = x.support();
    let coeffs: Vec<Q> = support.iter().map(|&i| x.get(i).abs()).collect();
    let sets = members_within(&Family::schreier(xi.clone()), &support, DEFAULT_MEMBER_BUDGET)?;
    let k = support.len();
    let mut by_max: Vec<Vec<(usize, Q)>> = vec![Vec::new(); k];
    for s in sets.iter().filter(|s| !s.is_empty()) {
        let sum: Q = s.iter().map(|&p| coeffs[p].clone()).sum();
        by_max[*s.last().unwrap()].push((s[0], num::pow(sum, p as usize)));
    }
    // best[j] = best value using blocks inside positions < j
    let mut best: Vec<Q> = vec![Q::zero(); k + 1];
    for j in 0..k {
        let mut b = best[j].clone();
        for (lo, val) in &by_max[j] {
            let cand = &best[*lo] + val;
            if cand > b {
                b = cand;
            }
        }
        best[j + 1] = b;
    }
    Ok(best[k].clone())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TsirelsonEval {
    pub norm: Q,
    /// Number of applications of the operator until the fixed point.
    pub iterations: usize,
    /// Norms of all interval projections `[i, j]` (support positions).
    pub table: Vec<Vec<Q>>,
}

/// Least fixed point of `V(n)(x) = max(|x|_inf, theta * sup sum n(I_k x))`
/// over admissible interval systems, iterated from the sup norm.
pub fn tsirelson(xi: &Ordinal, theta: &Q, x: &Vector) -> Result<TsirelsonEval, NormError> {
    let k = x.support().len();
    if k == 0 {
        return Ok(TsirelsonEval {
            norm: Q::zero(),
            iterations: 0,
            table: Vec::new(),
        });
    }
    let (base, admissible) = tsirelson_setup(xi, x)?;
    let mut cur = base.clone();
    let mut iterations = 0;
    loop {
        let next = tsirelson_step(&base, &cur, &admissible, theta);
        iterations += 1;
        if next == cur {
            break;
        }
        cur = next;
        if iterations > k + 2 {
            // a useful admissible tree has at most k leaves, so depth < k
            unreachable!("Tsirelson iteration failed to stabilize");
        }
    }
    Ok(TsirelsonEval {
        norm: cur[0][k - 1].clone(),
        iterations,
        table: cur,
    })
}

/// Interval sup-norm table and the admissible position sets of size >= 2.
fn tsirelson_setup(xi: &Ordinal, x: &Vector) -> Result<(Vec<Vec<Q>>, Vec<Vec<usize>>), NormError> {
    let support = x.support();
    let k = support.len();
    let coeffs: Vec<Q> = support.iter().map(|&i| x.get(i).abs()).collect();
    let admissible: Vec<Vec<usize>> = members_within(&Family::schreier(xi.clone()), &support, DEFAULT_MEMBER_BUDGET)?
        .into_iter()
        .filter(|s| s.len() >= 2)
        .collect();
    let mut base = vec![vec![Q::zero(); k]; k];
    for i in 0..k {
        let mut m = Q::zero();
        for j in i..k {
            if coeffs[j] > m {
                m = coeffs[j].clone();
            }
            base[i][j] = m.clone();
        }
    }
    Ok((base, admissible))
}

/// Whether `table` is left unchanged by one more application of the operator.
pub fn tsirelson_is_fixpoint(xi: &Ordinal, theta: &Q, x: &Vector, table: &[Vec<Q>]) -> Result<bool, NormError> {
    if x.is_zero() {
        return Ok(table.is_empty());
    }
    let (base, admissible) = tsirelson_setup(xi, x)?;
    Ok(tsirelson_step(&base, table, &admissible, theta) == table)
}

/// One application of the Tsirelson operator to a table of interval norms.
/// Single-interval systems never help since `theta < 1`.
pub fn tsirelson_step(base: &[Vec<Q>], cur: &[Vec<Q>], admissible: &[Vec<usize>], theta: &Q) -> Vec<Vec<Q>> {
    let k = base.len();
    let mut next = base.to_vec();
    for s in admissible {
        let first = s[0];
        let last_start = *s.last().unwrap();
        // interval ends after the last start can be any j >= last_start
        let mut inner = Q::zero();
        for w in s.windows(2) {
            inner += &cur[w[0]][w[1] - 1];
        }
        for j in last_start..k {
            let v = theta * (&inner + &cur[last_start][j]);
            for i in 0..=first {
                if v > next[i][j] {
                    next[i][j] = v.clone();
                }
            }
        }
    }
    next
}

/// An unsigned weighted set; the functionals it stands for are all
/// `sum_n +-w_n e*_n`.
pub type Atom = BTreeMap<u64, Q>;

/// Atoms whose signed versions form a norming set on `support`.
pub fn dual_atoms(space: &SpaceSpec, support: &[u64]) -> Result<Vec<Atom>, NormError> {
    match space {
        SpaceSpec::C0 => Ok(support.iter().map(|&n| Atom::from([(n, Q::one())])).collect()),
        SpaceSpec::L1 | SpaceSpec::Lp(1) => {
            if support.is_empty() {
                Ok(Vec::new())
            } else {
                Ok(vec![support.iter().map(|&n| (n, Q::one())).collect()])
            }
        }
        SpaceSpec::Combinatorial(fam) => {
            check_singletons(fam, support)?;
            let sets = members_within(fam, support, DEFAULT_MEMBER_BUDGET)?;
            let sets = maximal_sets(sets);
            Ok(sets
                .into_iter()
                .filter(|s| !s.is_empty())
                .map(|s| s.into_iter().map(|p| (support[p], Q::one())).collect())
                .collect())
        }
        SpaceSpec::Tsirelson(xi, theta) => tsirelson_atoms(xi, theta, support),
        other => Err(NormError::Unsupported(other.to_string())),
    }
}

fn maximal_sets(sets: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let masks: Vec<u128> = sets.iter().map(|s| s.iter().fold(0u128, |m, &p| m | (1u128 << p))).collect();
    let mut out = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        let dominated = masks
            .iter()
            .enumerate()
            .any(|(j, &m)| j != i && m != masks[i] && m & masks[i] == masks[i]);
        if !dominated {
            out.push(s.clone());
        }
    }
    out
}

fn tsirelson_atoms(xi: &Ordinal, theta: &Q, support: &[u64]) -> Result<Vec<Atom>, NormError> {
    let fam = Family::schreier(xi.clone());
    let mut cache = MemberCache::default();
    let mut all: Vec<Atom> = support.iter().map(|&n| Atom::from([(n, Q::one())])).collect();
    let mut seen: HashSet<Vec<(u64, Q)>> = all.iter().map(|a| a.clone().into_iter().collect()).collect();
    loop {
        let mut fresh: Vec<Atom> = Vec::new();
        // combine consecutive atoms f_1 < ... < f_t, t >= 2, with admissible minima
        let mut order: Vec<usize> = (0..all.len()).collect();
        order.sort_by_key(|&i| *all[i].keys().next().unwrap());
        let mut stack: Vec<Vec<usize>> = order.iter().map(|&i| vec![i]).collect();
        while let Some(chain) = stack.pop() {
            let last_max = *all[*chain.last().unwrap()].keys().next_back().unwrap();
            let mins: Vec<u64> = chain.iter().map(|&i| *all[i].keys().next().unwrap()).collect();
            for &j in &order {
                let jmin = *all[j].keys().next().unwrap();
                if jmin <= last_max {
                    continue;
                }
                let mut m = mins.clone();
                m.push(jmin);
                if !fam.member_with(&m, &mut cache) {
                    continue;
                }
                let mut next = chain.clone();
                next.push(j);
                let mut atom = Atom::new();
                for &c in &next {
                    for (k, w) in &all[c] {
                        atom.insert(*k, theta * w);
                    }
                }
                let key: Vec<(u64, Q)> = atom.clone().into_iter().collect();
                if seen.insert(key) {
                    fresh.push(atom);
                    if seen.len() > DEFAULT_FUNCTIONAL_BUDGET {
                        return Err(NormError::Budget(DEFAULT_FUNCTIONAL_BUDGET));
                    }
                }
                stack.push(next);
            }
        }
        if fresh.is_empty() {
            break;
        }
        all.extend(fresh);
    }
    Ok(all)
}

/// Explicit norming functionals on `support`: every sign pattern of every
/// atom.
pub fn norming_functionals(space: &SpaceSpec, support: &[u64]) -> Result<Vec<Vector>, NormError> {
    let atoms = match space {
        // keep non-maximal sets here so the listing matches the family
        SpaceSpec::Combinatorial(fam) => {
            check_singletons(fam, support)?;
            members_within(fam, support, DEFAULT_MEMBER_BUDGET)?
                .into_iter()
                .map(|s| s.into_iter().map(|p| (support[p], Q::one())).collect())
                .collect()
        }
        _ => dual_atoms(space, support)?,
    };
    let mut out = Vec::new();
    let mut seen: HashSet<Vector> = HashSet::new();
    for atom in atoms {
        let keys: Vec<u64> = atom.keys().copied().collect();
        for signs in 0u64..(1u64 << keys.len()) {
            let v = Vector::from_pairs(keys.iter().enumerate().map(|(b, &k)| {
                let w = atom[&k].clone();
                (k, if signs >> b & 1 == 1 { -w } else { w })
            }));
            if seen.insert(v.clone()) {
                out.push(v);
            }
        }
    }
    Ok(out)
}

/// `max_phi |phi(x)|` over the atoms, i.e. the norm of a polyhedral space.
pub fn norm_via_atoms(atoms: &[Atom], x: &Vector) -> Q {
    atoms
        .iter()
        .map(|a| a.iter().map(|(k, w)| w * x.get(*k).abs()).sum::<Q>())
        .max()
        .unwrap_or_else(Q::zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surd::{q, qf};

    fn vec_of(pairs: &[(u64, i64)]) -> Vector {
        Vector::from_pairs(pairs.iter().map(|&(i, c)| (i, q(c))))
    }

    fn sp(s: &str) -> SpaceSpec {
        s.parse().unwrap()
    }

    #[test]
    fn norm_examples() {
        let x = vec_of(&[(1, 1), (2, 1), (3, 1)]);
        assert_eq!(norm(&sp("X[S[1]]"), &x).unwrap(), Surd::rational(q(2)));
        assert_eq!(norm(&SpaceSpec::C0, &Vector::unit(7)).unwrap(), Surd::rational(q(1)));
        let y = vec_of(&[(2, 1), (3, 1)]);
        assert_eq!(norm(&sp("BAERNSTEIN(1;2)"), &y).unwrap(), Surd::rational(q(2)));
        let r = norm(&sp("PCONV(X[S[1]];2)"), &y).unwrap();
        assert_eq!(r, Surd::root(q(2), 2));
        assert!(norm(&sp("L1"), &Vector::zero()).unwrap().is_zero());
    }

    #[test]
    fn tsirelson_examples() {
        let t = sp("TSIRELSON(1;1/2)");
        assert_eq!(norm(&t, &Vector::unit(1)).unwrap(), Surd::rational(q(1)));
        assert_eq!(norm(&t, &vec_of(&[(3, 1), (4, 1), (5, 1)])).unwrap(), Surd::rational(qf(3, 2)));
        assert_eq!(norm(&t, &vec_of(&[(2, 1), (3, 1)])).unwrap(), Surd::rational(q(1)));
    }

    #[test]
    fn functional_examples() {
        let f = norming_functionals(&sp("X[S[1]]"), &[1, 2, 3]).unwrap();
        // {} once, three singletons with two signs, {2,3} with four
        assert_eq!(f.len(), 1 + 6 + 4);
        let f = norming_functionals(&SpaceSpec::C0, &[1, 2]).unwrap();
        assert_eq!(f.len(), 4);
        let f = norming_functionals(&sp("TSIRELSON(1;1/2)"), &[1]).unwrap();
        assert_eq!(f, vec![Vector::unit(1), Vector::unit(1).scale(&q(-1))]);
        assert!(norming_functionals(&sp("BAERNSTEIN(1;2)"), &[1]).is_err());
    }

    #[test]
    fn grammar_round_trip() {
        for s in ["X[S[1]]", "PCONV(X[S[1]];2)", "BAERNSTEIN(1;2)", "TSIRELSON(1;1/2)", "C0", "L1", "LP(2)"] {
            assert_eq!(sp(s).to_string(), s);
        }
        assert!("LP(3/2)".parse::<SpaceSpec>().is_err());
        assert!("TSIRELSON(1;1)".parse::<SpaceSpec>().is_err());
    }
}
