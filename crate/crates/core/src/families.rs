//! Regular families of finite subsets of the positive integers.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ordinal::{FundamentalPolicy, Kind, Ordinal, OrdinalError, Schedule};

pub const DEFAULT_ENUM_BOUND: u64 = 20;
pub const DEFAULT_MEMBER_BUDGET: usize = 2_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("enumeration bound exceeded: N={n} > {bound}")]
    BoundExceeded { n: u64, bound: u64 },
    #[error("member budget exceeded while enumerating {0}")]
    MemberBudget(String),
    #[error("almost-monotone witness requires zeta < xi, got zeta={zeta}, xi={xi}")]
    NotBelow { zeta: String, xi: String },
    #[error("cannot parse family at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

/// A finite strictly increasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FinSet(Vec<u64>);

impl FinSet {
    pub fn empty() -> Self {
        FinSet(Vec::new())
    }

    /// Sorts and deduplicates; rejects zero.
    pub fn from_unsorted(mut v: Vec<u64>) -> Option<Self> {
        v.sort_unstable();
        v.dedup();
        if v.first() == Some(&0) {
            None
        } else {
            Some(FinSet(v))
        }
    }

    /// Requires strictly increasing positive input.
    pub fn new(v: Vec<u64>) -> Option<Self> {
        if v.first() == Some(&0) || v.windows(2).any(|w| w[0] >= w[1]) {
            None
        } else {
            Some(FinSet(v))
        }
    }

    pub fn range(lo: u64, hi: u64) -> Self {
        FinSet((lo.max(1)..=hi).collect())
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<u64> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.0.binary_search(&n).is_ok()
    }

    pub fn is_subset(&self, other: &FinSet) -> bool {
        self.0.iter().all(|n| other.contains(*n))
    }

    /// `M(F)` for a strictly increasing map given as a 1-based list.
    pub fn image(&self, m: &[u64]) -> Option<FinSet> {
        let mut out = Vec::with_capacity(self.len());
        for &n in &self.0 {
            out.push(*m.get((n - 1) as usize)?);
        }
        Some(FinSet(out))
    }

    fn mask(&self) -> u64 {
        self.0.iter().fold(0u64, |m, &n| m | (1u64 << (n - 1)))
    }

    fn from_mask(mask: u64) -> Self {
        FinSet((0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect())
    }

    /// Graded lexicographic order: shorter sets first, then lexicographic.
    pub fn shortlex_cmp(&self, other: &FinSet) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
        write!(f, "{{{}}}", v.join(","))
    }
}

impl FromStr for FinSet {
    type Err = String;

    /// Accepts `3 5 7`, `3,5,7`, `{3,5,7}` and `{}`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches('{').trim_end_matches('}');
        let mut v = Vec::new();
        for tok in t.split(|c: char| c == ',' || c.is_whitespace()) {
            if tok.is_empty() {
                continue;
            }
            v.push(tok.parse::<u64>().map_err(|_| format!("bad element {tok:?}"))?);
        }
        FinSet::new(v).ok_or_else(|| format!("{s:?} is not a strictly increasing set of positive integers"))
    }
}

/// `true` iff `|L| = |F|` and `F(n) <= L(n)` for every n.
pub fn is_spread_of(l: &FinSet, f: &FinSet) -> bool {
    l.len() == f.len() && f.0.iter().zip(l.0.iter()).all(|(a, b)| a <= b)
}

/// An integer stream given by a finite prefix, optionally continued
/// arithmetically with the last difference.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stream {
    pub prefix: Vec<u64>,
    pub continues: bool,
}

impl Stream {
    pub fn contains(&self, n: u64) -> bool {
        if self.prefix.binary_search(&n).is_ok() {
            return true;
        }
        if !self.continues {
            return false;
        }
        let (Some(&last), Some(step)) = (self.prefix.last(), self.step()) else {
            return false;
        };
        n > last && (n - last) % step == 0
    }

    fn step(&self) -> Option<u64> {
        match self.prefix.as_slice() {
            [.., a, b] => Some(b - a),
            [_] => Some(1),
            [] => None,
        }
    }

    pub fn nth(&self, n: usize) -> Option<u64> {
        if n == 0 {
            return None;
        }
        if let Some(v) = self.prefix.get(n - 1) {
            return Some(*v);
        }
        if !self.continues {
            return None;
        }
        let last = *self.prefix.last()?;
        Some(last + self.step()? * (n - self.prefix.len()) as u64)
    }
}

/// Index of an F-family: an ordinal or the all-finite-sets sentinel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Level {
    Ord(Ordinal),
    All,
}

impl Level {
    pub fn nat(n: u64) -> Self {
        Level::Ord(Ordinal::nat(n))
    }

    pub fn family(&self) -> Family {
        self.family_with(&FundamentalPolicy::default())
    }

    pub fn family_with(&self, policy: &FundamentalPolicy) -> Family {
        match self {
            Level::Ord(o) => Family::FineSchreier(o.clone(), policy.clone()),
            Level::All => Family::AllFinite,
        }
    }

    pub fn lt(&self, other: &Level) -> bool {
        match (self, other) {
            (Level::Ord(a), Level::Ord(b)) => a < b,
            (Level::Ord(_), Level::All) => true,
            (Level::All, _) => false,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Ord(o) => write!(f, "{o}"),
            Level::All => write!(f, "ALL"),
        }
    }
}

impl FromStr for Level {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "ALL" {
            Ok(Level::All)
        } else {
            Ok(Level::Ord(s.trim().parse()?))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    FineSchreier(Ordinal, FundamentalPolicy),
    Schreier(Ordinal, FundamentalPolicy),
    AllFinite,
    /// `{G u F : G in F_xi, F in F_zeta, G < F}` with fields `(zeta, xi)`.
    Sum(Ordinal, Ordinal, FundamentalPolicy),
    NFold(Box<Family>, u64),
    Restrict(Box<Family>, Stream),
    Explicit(Vec<FinSet>),
}

#[derive(Default)]
pub struct MemberCache {
    memo: HashMap<(bool, Ordinal, FundamentalPolicy, Vec<u64>), bool>,
}

impl Family {
    pub fn fine(xi: Ordinal) -> Self {
        Family::FineSchreier(xi, FundamentalPolicy::default())
    }

    pub fn schreier(xi: Ordinal) -> Self {
        Family::Schreier(xi, FundamentalPolicy::default())
    }

    pub fn fine_nat(k: u64) -> Self {
        Self::fine(Ordinal::nat(k))
    }

    pub fn schreier_nat(k: u64) -> Self {
        Self::schreier(Ordinal::nat(k))
    }

    /// Replaces the fundamental-sequence schedule everywhere in the tree.
    pub fn with_schedule(&self, s: &Schedule) -> Family {
        let p = FundamentalPolicy::with_schedule(s.clone());
        match self {
            Family::FineSchreier(o, _) => Family::FineSchreier(o.clone(), p),
            Family::Schreier(o, _) => Family::Schreier(o.clone(), p),
            Family::Sum(z, x, _) => Family::Sum(z.clone(), x.clone(), p),
            Family::NFold(b, n) => Family::NFold(Box::new(b.with_schedule(s)), *n),
            Family::Restrict(b, m) => Family::Restrict(Box::new(b.with_schedule(s)), m.clone()),
            other => other.clone(),
        }
    }

    pub fn member(&self, f: &FinSet) -> bool {
        self.member_with(f.as_slice(), &mut MemberCache::default())
    }

    pub fn member_with(&self, f: &[u64], cache: &mut MemberCache) -> bool {
        match self {
            Family::FineSchreier(xi, p) => fine_member(xi, p, f, cache),
            Family::Schreier(xi, p) => schreier_member(xi, p, f, cache),
            Family::AllFinite => true,
            Family::Sum(zeta, xi, p) => (0..=f.len())
                .any(|k| fine_member(xi, p, &f[..k], cache) && fine_member(zeta, p, &f[k..], cache)),
            Family::NFold(base, n) => {
                f.is_empty() || min_blocks(f, &mut |b| base.member_with(b, cache)).is_some_and(|k| k <= *n)
            }
            Family::Restrict(base, m) => f.iter().all(|x| m.contains(*x)) && base.member_with(f, cache),
            Family::Explicit(list) => list.iter().any(|g| g.as_slice() == f),
        }
    }

    /// No explicit literal anywhere in the tree, so initial segments of
    /// members are members.
    fn structurally_hereditary(&self) -> bool {
        match self {
            Family::Explicit(_) => false,
            Family::NFold(b, _) | Family::Restrict(b, _) => b.structurally_hereditary(),
            _ => true,
        }
    }

    /// The set of integers a spread may move into.
    pub fn universe(&self, n: u64) -> Vec<u64> {
        match self {
            Family::Restrict(b, m) => b.universe(n).into_iter().filter(|x| m.contains(*x)).collect(),
            _ => (1..=n).collect(),
        }
    }

    /// Rough description used in error messages.
    fn label(&self) -> String {
        self.to_string()
    }
}

fn fine_member(xi: &Ordinal, p: &FundamentalPolicy, f: &[u64], cache: &mut MemberCache) -> bool {
    if f.is_empty() {
        return true;
    }
    if let Some(k) = xi.as_nat() {
        return f.len() as u64 <= k;
    }
    let key = (false, xi.clone(), p.clone(), f.to_vec());
    if let Some(v) = cache.memo.get(&key) {
        return *v;
    }
    let v = match xi.classify() {
        Kind::Zero => false,
        Kind::Successor(pred) => fine_member(&pred, p, &f[1..], cache),
        Kind::Limit => (1..=f[0]).any(|n| {
            let xn = p.apply(xi, n).expect("limit ordinal");
            fine_member(&xn, p, f, cache)
        }),
    };
    cache.memo.insert(key, v);
    v
}

fn schreier_member(xi: &Ordinal, p: &FundamentalPolicy, f: &[u64], cache: &mut MemberCache) -> bool {
    if f.is_empty() {
        return true;
    }
    if xi.is_zero() {
        return f.len() == 1;
    }
    // every S_xi with xi >= 1 contains all sets with |F| <= min F
    if f.len() as u64 <= f[0] {
        return true;
    }
    let key = (true, xi.clone(), p.clone(), f.to_vec());
    if let Some(v) = cache.memo.get(&key) {
        return *v;
    }
    let v = match xi.classify() {
        Kind::Zero => unreachable!(),
        Kind::Successor(pred) => {
            min_blocks(f, &mut |b| schreier_member(&pred, p, b, cache)).is_some_and(|k| k <= f[0])
        }
        Kind::Limit => (1..=f[0]).any(|n| {
            let xn = p.apply(xi, n).expect("limit ordinal");
            schreier_member(&xn, p, f, cache)
        }),
    };
    cache.memo.insert(key, v);
    v
}

/// Minimal number of consecutive nonempty blocks, each accepted by `ok`,
/// partitioning `f`.
fn min_blocks(f: &[u64], ok: &mut dyn FnMut(&[u64]) -> bool) -> Option<u64> {
    let n = f.len();
    let mut best: Vec<Option<u64>> = vec![None; n + 1];
    best[n] = Some(0);
    for i in (0..n).rev() {
        for j in i + 1..=n {
            if let Some(rest) = best[j] {
                if best[i].is_some_and(|b| b <= rest + 1) {
                    continue;
                }
                if ok(&f[i..j]) {
                    best[i] = Some(rest + 1);
                }
            }
        }
    }
    best[0]
}

#[derive(Debug, Clone, Copy)]
pub struct EnumConfig {
    pub bound: u64,
    pub member_budget: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            bound: DEFAULT_ENUM_BOUND,
            member_budget: DEFAULT_MEMBER_BUDGET,
        }
    }
}

/// Members contained in `{1..n}`, in graded lexicographic order.
pub fn enumerate(fam: &Family, n: u64) -> Result<Vec<FinSet>, FamilyError> {
    enumerate_with(fam, n, EnumConfig::default())
}

pub fn enumerate_with(fam: &Family, n: u64, cfg: EnumConfig) -> Result<Vec<FinSet>, FamilyError> {
    if n > cfg.bound || n > 63 {
        return Err(FamilyError::BoundExceeded { n, bound: cfg.bound.min(63) });
    }
    let mut cache = MemberCache::default();
    let mut out = Vec::new();
    if fam.structurally_hereditary() {
        let mut stack: Vec<Vec<u64>> = vec![Vec::new()];
        while let Some(cur) = stack.pop() {
            let start = cur.last().map_or(1, |m| m + 1);
            for k in (start..=n).rev() {
                let mut next = cur.clone();
                next.push(k);
                if fam.member_with(&next, &mut cache) {
                    stack.push(next);
                }
            }
            out.push(FinSet(cur));
            if out.len() > cfg.member_budget {
                return Err(FamilyError::MemberBudget(fam.label()));
            }
        }
    } else {
        for mask in 0u64..(1u64 << n) {
            let f = FinSet::from_mask(mask);
            if fam.member_with(f.as_slice(), &mut cache) {
                out.push(f);
                if out.len() > cfg.member_budget {
                    return Err(FamilyError::MemberBudget(fam.label()));
                }
            }
        }
    }
    out.sort_by(|a, b| a.shortlex_cmp(b));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `member` is in the family but its subset `witness` is not.
    Hereditary { member: FinSet, witness: FinSet },
    /// `member` is in the family but its spread `witness` is not.
    Spreading { member: FinSet, witness: FinSet },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityReport {
    pub hereditary_ok: bool,
    pub spreading_ok: bool,
    pub counterexample: Option<Violation>,
}

/// Checks closure under subsets and under spreads inside the family's
/// universe within `{1..n}`. Closure under single-element removals and
/// single-step spreads is equivalent to full closure.
pub fn check_regular(fam: &Family, n: u64) -> Result<RegularityReport, FamilyError> {
    let members = enumerate(fam, n)?;
    let set: HashSet<u64> = members.iter().map(|f| f.mask()).collect();
    let universe = fam.universe(n);
    let mut hered: Option<Violation> = None;
    let mut spread: Option<Violation> = None;
    for f in &members {
        if hered.is_none() {
            for i in (0..f.len()).rev() {
                let m = f.mask() & !(1u64 << (f.0[i] - 1));
                if !set.contains(&m) {
                    hered = Some(Violation::Hereditary {
                        member: f.clone(),
                        witness: FinSet::from_mask(m),
                    });
                    break;
                }
            }
        }
        if spread.is_none() {
            'outer: for i in (0..f.len()).rev() {
                let cur = f.0[i];
                let limit = f.0.get(i + 1).copied().unwrap_or(u64::MAX);
                if let Some(&next) = universe.iter().find(|&&u| u > cur) {
                    if next < limit {
                        let mut g = f.0.clone();
                        g[i] = next;
                        let g = FinSet(g);
                        if !set.contains(&g.mask()) {
                            spread = Some(Violation::Spreading {
                                member: f.clone(),
                                witness: g,
                            });
                            break 'outer;
                        }
                    }
                }
            }
        }
        if hered.is_some() && spread.is_some() {
            break;
        }
    }
    Ok(RegularityReport {
        hereditary_ok: hered.is_none(),
        spreading_ok: spread.is_none(),
        counterexample: hered.or(spread),
    })
}

/// Rank of `fam` restricted to `{1..n}` as a tree of sequences, by iterated
/// removal of maximal nodes.
pub fn rank_restricted(fam: &Family, n: u64) -> Result<u64, FamilyError> {
    let mut tree: Vec<FinSet> = enumerate(fam, n)?;
    let mut rank = 0;
    while !tree.is_empty() {
        let mut has_extension: HashSet<&[u64]> = HashSet::new();
        for t in &tree {
            for k in 0..t.len() {
                has_extension.insert(&t.0[..k]);
            }
        }
        let next: Vec<FinSet> = tree
            .iter()
            .filter(|t| has_extension.contains(t.as_slice()))
            .cloned()
            .collect();
        tree = next;
        rank += 1;
    }
    Ok(rank)
}

/// Smallest `l <= n` such that every `F in F_zeta`, `F` inside `{1..n}` with
/// `l < F`, lies in `F_xi`.
pub fn almost_monotone_witness(zeta: &Ordinal, xi: &Level, n: u64) -> Result<Option<u64>, FamilyError> {
    almost_monotone_witness_with(zeta, xi, n, &FundamentalPolicy::default())
}

pub fn almost_monotone_witness_with(
    zeta: &Ordinal,
    xi: &Level,
    n: u64,
    policy: &FundamentalPolicy,
) -> Result<Option<u64>, FamilyError> {
    let zl = Level::Ord(zeta.clone());
    if !zl.lt(xi) {
        return Err(FamilyError::NotBelow {
            zeta: zeta.to_string(),
            xi: xi.to_string(),
        });
    }
    let small = enumerate(&zl.family_with(policy), n)?;
    let big = xi.family_with(policy);
    let mut cache = MemberCache::default();
    // the answer is one more than the largest min of a bad set
    let mut worst: Option<u64> = None;
    for f in &small {
        if !big.member_with(f.as_slice(), &mut cache) {
            let m = f.min().expect("empty set is in every family");
            worst = Some(worst.map_or(m, |w| w.max(m)));
        }
    }
    Ok(Some(worst.unwrap_or(0)))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmbeddingResult {
    Found(Vec<u64>),
    /// The whole bounded search space was explored.
    NotFound,
    BudgetExhausted,
}

/// Strictly increasing `P: {1..n} -> {1..max_value}` with `P(F) in dst` for
/// every `F in src` inside `{1..n}`, smallest-first.
pub fn find_order_embedding(
    src: &Family,
    dst: &Family,
    n: u64,
    max_value: u64,
    budget: u64,
) -> Result<EmbeddingResult, FamilyError> {
    let members = enumerate(src, n)?;
    let mut by_max: Vec<Vec<FinSet>> = vec![Vec::new(); n as usize + 1];
    for f in members {
        if let Some(m) = f.max() {
            by_max[m as usize].push(f);
        }
    }
    let mut cache = MemberCache::default();
    let mut p: Vec<u64> = Vec::new();
    let mut nodes = 0u64;
    let res = embed_dfs(&by_max, dst, n, max_value, budget, &mut nodes, &mut p, &mut cache);
    Ok(match res {
        Some(true) => EmbeddingResult::Found(p),
        Some(false) => EmbeddingResult::NotFound,
        None => EmbeddingResult::BudgetExhausted,
    })
}

#[allow(clippy::too_many_arguments)]
fn embed_dfs(
    by_max: &[Vec<FinSet>],
    dst: &Family,
    n: u64,
    max_value: u64,
    budget: u64,
    nodes: &mut u64,
    p: &mut Vec<u64>,
    cache: &mut MemberCache,
) -> Option<bool> {
    let k = p.len() as u64 + 1;
    if k > n {
        return Some(true);
    }
    let lo = p.last().map_or(1, |v| v + 1);
    let remaining = n - k;
    if lo + remaining > max_value {
        return Some(false);
    }
    for v in lo..=max_value - remaining {
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        p.push(v);
        let ok = by_max[k as usize]
            .iter()
            .all(|f| dst.member_with(f.image(p).unwrap().as_slice(), cache));
        if ok {
            match embed_dfs(by_max, dst, n, max_value, budget, nodes, p, cache) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
        }
        p.pop();
    }
    Some(false)
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::FineSchreier(o, _) => write!(f, "F[{o}]"),
            Family::Schreier(o, _) => write!(f, "S[{o}]"),
            Family::AllFinite => write!(f, "ALL"),
            Family::Sum(z, x, _) => write!(f, "SUM({z};{x})"),
            Family::NFold(b, n) => write!(f, "NFOLD({b};{n})"),
            Family::Restrict(b, m) => {
                let v: Vec<String> = m.prefix.iter().map(|x| x.to_string()).collect();
                write!(f, "RESTRICT({b};{}{})", v.join(","), if m.continues { ",..." } else { "" })
            }
            Family::Explicit(list) => {
                let v: Vec<String> = list.iter().map(|s| s.to_string()).collect();
                write!(f, "LIT({})", v.join(";"))
            }
        }
    }
}

pub(crate) struct Cursor<'a> {
    pub src: &'a str,
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn eat(&mut self, tok: &str) -> bool {
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &str) -> Result<(), (usize, String)> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err((self.pos, format!("expected {tok:?}")))
        }
    }

    /// Text up to the first of `stops` at bracket depth zero.
    pub fn until(&mut self, stops: &[char]) -> &'a str {
        let start = self.pos;
        let mut depth = 0i32;
        for (i, c) in self.rest().char_indices() {
            match c {
                '(' | '[' | '{' => depth += 1,
                ')' | ']' | '}' if depth > 0 => depth -= 1,
                _ if depth == 0 && stops.contains(&c) => {
                    self.pos = start + i;
                    return &self.src[start..self.pos];
                }
                _ => {}
            }
        }
        self.pos = self.src.len();
        &self.src[start..]
    }
}

fn parse_family(c: &mut Cursor) -> Result<Family, (usize, String)> {
    let ord = |c: &mut Cursor, stops: &[char]| -> Result<Ordinal, (usize, String)> {
        let at = c.pos;
        let s = c.until(stops);
        s.parse::<Ordinal>().map_err(|e| (at, e.to_string()))
    };
    if c.eat("F[") {
        let o = ord(c, &[']'])?;
        c.expect("]")?;
        Ok(Family::fine(o))
    } else if c.eat("S[") {
        let o = ord(c, &[']'])?;
        c.expect("]")?;
        Ok(Family::schreier(o))
    } else if c.eat("ALL") {
        Ok(Family::AllFinite)
    } else if c.eat("SUM(") {
        let z = ord(c, &[';'])?;
        c.expect(";")?;
        let x = ord(c, &[')'])?;
        c.expect(")")?;
        Ok(Family::Sum(z, x, FundamentalPolicy::default()))
    } else if c.eat("NFOLD(") {
        let b = parse_family(c)?;
        c.expect(";")?;
        let at = c.pos;
        let n: u64 = c.until(&[')']).trim().parse().map_err(|_| (at, "expected a count".to_string()))?;
        if n == 0 {
            return Err((at, "n-fold count must be positive".into()));
        }
        c.expect(")")?;
        Ok(Family::NFold(Box::new(b), n))
    } else if c.eat("RESTRICT(") {
        let b = parse_family(c)?;
        c.expect(";")?;
        let at = c.pos;
        let body = c.until(&[')']);
        c.expect(")")?;
        let mut prefix = Vec::new();
        let mut continues = false;
        for tok in body.split(',').map(str::trim) {
            if continues {
                return Err((at, "'...' must come last".into()));
            }
            if tok == "..." {
                continues = true;
                continue;
            }
            prefix.push(tok.parse::<u64>().map_err(|_| (at, format!("bad stream element {tok:?}")))?);
        }
        if FinSet::new(prefix.clone()).is_none() || prefix.is_empty() {
            return Err((at, "stream must be strictly increasing and positive".into()));
        }
        Ok(Family::Restrict(Box::new(b), Stream { prefix, continues }))
    } else if c.eat("LIT(") {
        let at = c.pos;
        let body = c.until(&[')']);
        c.expect(")")?;
        let mut list = Vec::new();
        for part in body.split(';') {
            let s: FinSet = part.parse().map_err(|e| (at, e))?;
            list.push(s);
        }
        Ok(Family::Explicit(list))
    } else {
        Err((c.pos, "expected F[..], S[..], ALL, SUM, NFOLD, RESTRICT or LIT".into()))
    }
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut c = Cursor::new(s.trim());
        let fam = parse_family(&mut c).map_err(|(pos, msg)| FamilyError::Parse { pos, msg })?;
        if !c.rest().is_empty() {
            return Err(FamilyError::Parse {
                pos: c.pos,
                msg: "trailing input".into(),
            });
        }
        Ok(fam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(v: &[u64]) -> FinSet {
        FinSet::new(v.to_vec()).unwrap()
    }

    #[test]
    fn member_examples() {
        assert!(Family::fine_nat(2).member(&fs(&[5])));
        assert!(Family::schreier_nat(1).member(&fs(&[2, 3])));
        assert!(!Family::schreier_nat(1).member(&fs(&[1, 2])));
        assert!(Family::AllFinite.member(&fs(&[1, 2, 3, 4, 5])));
        assert!(Family::fine(Ordinal::omega()).member(&fs(&[3, 5, 7])));
        assert!(!Family::fine(Ordinal::omega()).member(&fs(&[3, 5, 7, 9])));
    }

    #[test]
    fn enumerate_examples() {
        let e = enumerate(&Family::fine_nat(1), 2).unwrap();
        assert_eq!(e, vec![fs(&[]), fs(&[1]), fs(&[2])]);
        let e = enumerate(&Family::schreier_nat(1), 3).unwrap();
        assert_eq!(e, vec![fs(&[]), fs(&[1]), fs(&[2]), fs(&[3]), fs(&[2, 3])]);
        assert_eq!(enumerate(&Family::fine_nat(0), 5).unwrap(), vec![fs(&[])]);
        assert!(enumerate(&Family::AllFinite, 21).is_err());
    }

    #[test]
    fn spread_examples() {
        assert!(is_spread_of(&fs(&[2, 5]), &fs(&[1, 3])));
        assert!(!is_spread_of(&fs(&[1, 3]), &fs(&[2, 5])));
        assert!(is_spread_of(&fs(&[]), &fs(&[])));
    }

    #[test]
    fn regularity_examples() {
        let r = check_regular(&Family::schreier_nat(2), 8).unwrap();
        assert!(r.hereditary_ok && r.spreading_ok);
        let r = check_regular(&"NFOLD(S[1];2)".parse().unwrap(), 8).unwrap();
        assert!(r.hereditary_ok && r.spreading_ok);
        let lit: Family = "LIT({};{1,2})".parse().unwrap();
        let r = check_regular(&lit, 4).unwrap();
        assert!(!r.hereditary_ok);
        assert_eq!(
            r.counterexample,
            Some(Violation::Hereditary {
                member: fs(&[1, 2]),
                witness: fs(&[1])
            })
        );
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_restricted(&Family::fine_nat(3), 10).unwrap(), 4);
        assert_eq!(rank_restricted(&Family::fine_nat(0), 10).unwrap(), 1);
        assert_eq!(rank_restricted(&Family::schreier_nat(1), 4).unwrap(), 3);
    }

    #[test]
    fn almost_monotone_examples() {
        let w = |z: u64, x: Level| almost_monotone_witness(&Ordinal::nat(z), &x, 10).unwrap();
        assert_eq!(w(1, Level::nat(2)), Some(0));
        assert_eq!(w(0, Level::nat(1)), Some(0));
        // {1,2} is in F_2 but not in F_w, so the threshold is 1
        assert_eq!(w(2, Level::Ord(Ordinal::omega())), Some(1));
        assert!(almost_monotone_witness(&Ordinal::nat(2), &Level::nat(2), 10).is_err());
    }

    #[test]
    fn embedding_examples() {
        let fw = Family::fine(Ordinal::omega());
        let s1 = Family::schreier_nat(1);
        let r = find_order_embedding(&fw, &s1, 8, 32, 1_000_000).unwrap();
        assert_eq!(r, EmbeddingResult::Found((1..=8).collect()));
        let r = find_order_embedding(&Family::fine_nat(2), &s1, 6, 24, 1_000_000).unwrap();
        assert_eq!(r, EmbeddingResult::Found((2..=7).collect()));
        let r = find_order_embedding(&s1, &Family::fine_nat(1), 4, 16, 1_000_000).unwrap();
        assert_eq!(r, EmbeddingResult::NotFound);
    }

    #[test]
    fn grammar_round_trip() {
        for s in ["F[w^2]", "S[1]", "ALL", "SUM(1;w)", "NFOLD(S[1];3)", "RESTRICT(S[1];2,4,6,...)", "LIT({};{1,2})"] {
            let f: Family = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
    }
}
