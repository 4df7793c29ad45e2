//! Domination constants between finite sequences, the tree `T(rho, C)` and
//! finite-depth certificates with exact verification and branch-and-bound
//! search.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::time::{Duration, Instant};

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{enumerate, is_spread_of, FamilyError, FinSet, Level};
use crate::lp;
use crate::norms::{dual_atoms, norm, NormError, SpaceSpec, Vector, VectorJson};
use crate::ordinal::{FundamentalPolicy, Schedule};
use crate::polytope::{independent_subset, nullspace, vertices};
use crate::surd::{fmt_q, parse_q, q, Bound, Surd, Q};

pub const EXACT_BOUND: usize = 6;
pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;
pub const DEFAULT_TIME_BUDGET: Duration = Duration::from_secs(60);
const SIGN_ENUM_LIMIT: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DominationError {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("exact mode handles at most {bound} vectors, got {n}")]
    TooMany { n: usize, bound: usize },
    #[error("sequences have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("exact domination needs a polyhedral space on at least one side, got {0} and {1}")]
    NonPolyhedral(String, String),
    #[error("functional has {0} free signs; too many to enumerate")]
    TooManySigns(usize),
    #[error("every sampled coefficient vector lies in the kernel of the dominating sequence")]
    Indeterminate,
    #[error("{0} is not a spread of {1}")]
    NotSpread(String, String),
    #[error("invalid certificate: {0}")]
    Certificate(String),
    #[error("invalid sequence: {0}")]
    Sequence(String),
}

/// A truncated sequence `rho = (x_n)` in one space.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSequence {
    pub space: SpaceSpec,
    pub vectors: Vec<Vector>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorSequenceJson {
    pub space: String,
    pub vectors: Vec<VectorJson>,
}

impl VectorSequence {
    pub fn new(space: SpaceSpec, vectors: Vec<Vector>) -> Result<Self, DominationError> {
        if vectors.is_empty() {
            return Err(DominationError::Sequence("sequence is empty".into()));
        }
        Ok(VectorSequence { space, vectors })
    }

    /// `e_1, ..., e_len`.
    pub fn basis(space: SpaceSpec, len: u64) -> Self {
        VectorSequence {
            space,
            vectors: (1..=len).map(Vector::unit).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// The element with 1-based index `n`.
    pub fn get(&self, n: u64) -> &Vector {
        &self.vectors[n as usize - 1]
    }

    pub fn is_normalized(&self) -> Result<bool, NormError> {
        for v in &self.vectors {
            if norm(&self.space, v)? != Surd::rational(Q::one()) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Parses `basis(<space>;<len>)`.
    pub fn parse_basis(s: &str) -> Result<Self, DominationError> {
        let body = s
            .trim()
            .strip_prefix("basis(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| DominationError::Sequence(format!("expected basis(<space>;<len>), got {s}")))?;
        let (sp, len) = body
            .rsplit_once(';')
            .ok_or_else(|| DominationError::Sequence(format!("missing length in {s}")))?;
        let space: SpaceSpec = sp.parse()?;
        let len: u64 = len
            .trim()
            .parse()
            .map_err(|_| DominationError::Sequence(format!("bad length in {s}")))?;
        if len == 0 {
            return Err(DominationError::Sequence("length must be positive".into()));
        }
        Ok(Self::basis(space, len))
    }

    pub fn to_json(&self) -> VectorSequenceJson {
        VectorSequenceJson {
            space: self.space.to_string(),
            vectors: self.vectors.iter().map(|v| v.to_json()).collect(),
        }
    }

    pub fn from_json(j: &VectorSequenceJson) -> Result<Self, DominationError> {
        let space: SpaceSpec = j.space.parse()?;
        let vectors = j.vectors.iter().map(Vector::from_json).collect::<Result<Vec<_>, _>>()?;
        Self::new(space, vectors)
    }
}

/// Exact constant together with a coefficient vector attaining it (a kernel
/// vector when the constant is infinite).
#[derive(Debug, Clone, PartialEq)]
pub struct Domination {
    pub constant: Bound,
    pub witness: Vec<Q>,
}

fn union_support(vs: &[&Vector]) -> Vec<u64> {
    let mut s = BTreeSet::new();
    for v in vs {
        s.extend(v.support());
    }
    s.into_iter().collect()
}

pub(crate) fn pairwise_disjoint(vs: &[&Vector]) -> bool {
    let mut seen = BTreeSet::new();
    for v in vs {
        for i in v.support() {
            if !seen.insert(i) {
                return false;
            }
        }
    }
    true
}

fn pareto_max(points: Vec<Vec<Q>>) -> Vec<Vec<Q>> {
    let mut uniq: Vec<Vec<Q>> = points;
    uniq.sort();
    uniq.dedup();
    let dominated = |a: &Vec<Q>, b: &Vec<Q>| a != b && a.iter().zip(b.iter()).all(|(x, y)| x <= y);
    uniq.iter()
        .filter(|p| !uniq.iter().any(|o| dominated(p, o)))
        .cloned()
        .collect()
}

/// Images `(phi(v_1), ..., phi(v_d))` of the norming functionals.
pub(crate) struct Corners {
    /// When set, `points` are non-negative and the full set is every
    /// coordinate sign flip of them.
    pub sign_closed: bool,
    pub points: Vec<Vec<Q>>,
}

pub(crate) fn corners(space: &SpaceSpec, vs: &[&Vector]) -> Result<Corners, DominationError> {
    let support = union_support(vs);
    let atoms = dual_atoms(space, &support)?;
    if space.is_unconditional() && pairwise_disjoint(vs) {
        let pts = atoms
            .iter()
            .map(|a| {
                vs.iter()
                    .map(|v| v.iter().filter_map(|(i, c)| a.get(&i).map(|w| w * c.abs())).sum::<Q>())
                    .collect::<Vec<Q>>()
            })
            .collect();
        return Ok(Corners {
            sign_closed: true,
            points: pareto_max(pts),
        });
    }
    let mut pts: BTreeSet<Vec<Q>> = BTreeSet::new();
    for a in &atoms {
        let keys: Vec<(u64, Q)> = a.iter().filter(|(k, _)| support.binary_search(k).is_ok()).map(|(k, w)| (*k, w.clone())).collect();
        if keys.len() > SIGN_ENUM_LIMIT {
            return Err(DominationError::TooManySigns(keys.len()));
        }
        for signs in 0u64..(1u64 << keys.len()) {
            let p: Vec<Q> = vs
                .iter()
                .map(|v| {
                    keys.iter()
                        .enumerate()
                        .map(|(b, (k, w))| {
                            let t = w * v.get(*k);
                            if signs >> b & 1 == 1 {
                                -t
                            } else {
                                t
                            }
                        })
                        .sum::<Q>()
                })
                .collect();
            pts.insert(p);
        }
    }
    Ok(Corners {
        sign_closed: false,
        points: pts.into_iter().collect(),
    })
}

fn sign_flips(points: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut out: BTreeSet<Vec<Q>> = BTreeSet::new();
    for p in points {
        let nz: Vec<usize> = (0..p.len()).filter(|&i| !p[i].is_zero()).collect();
        for s in 0u64..(1u64 << nz.len()) {
            let mut v = p.clone();
            for (b, &i) in nz.iter().enumerate() {
                if s >> b & 1 == 1 {
                    v[i] = -v[i].clone();
                }
            }
            out.insert(v);
        }
    }
    out.into_iter().collect()
}

/// Least `C` with `||sum a_n x_n|| <= C ||sum a_n y_n||` for all scalars.
pub fn domination_constant_exact(
    xs: &[&Vector],
    xsp: &SpaceSpec,
    ys: &[&Vector],
    ysp: &SpaceSpec,
) -> Result<Domination, DominationError> {
    let n = xs.len();
    if n != ys.len() {
        return Err(DominationError::LengthMismatch(n, ys.len()));
    }
    if n > EXACT_BOUND {
        return Err(DominationError::TooMany { n, bound: EXACT_BOUND });
    }
    // kernel comparison
    let uy = union_support(ys);
    let ymat: Vec<Vec<Q>> = uy.iter().map(|&i| ys.iter().map(|y| y.get(i)).collect()).collect();
    for v in nullspace(&ymat, n) {
        let comb = Vector::combine(&v, xs);
        if !comb.is_zero() {
            return Ok(Domination {
                constant: Bound::Infinite,
                witness: v,
            });
        }
    }
    let cols: Vec<Vec<Q>> = ys.iter().map(|y| uy.iter().map(|&i| y.get(i)).collect()).collect();
    let keep = independent_subset(&cols);
    if keep.is_empty() {
        return Ok(Domination {
            constant: Bound::Finite(Surd::zero()),
            witness: vec![Q::zero(); n],
        });
    }
    let xj: Vec<&Vector> = keep.iter().map(|&j| xs[j]).collect();
    let yj: Vec<&Vector> = keep.iter().map(|&j| ys[j]).collect();
    let expand = |b: &[Q]| -> Vec<Q> {
        let mut a = vec![Q::zero(); n];
        for (k, &j) in keep.iter().enumerate() {
            a[j] = b[k].clone();
        }
        a
    };
    if xsp.is_polyhedral() && ysp.is_polyhedral() {
        let cx = corners(xsp, &xj)?;
        let cy = corners(ysp, &yj)?;
        let mut best: Option<(Q, Vec<Q>)> = None;
        if cy.sign_closed {
            // the polytope is unconditional: only |c| matters
            let mut abs: Vec<(Vec<Q>, Vec<Q>)> = Vec::new();
            for c in cx.points {
                abs.push((c.iter().map(|v| v.abs()).collect(), c));
            }
            let maxes = pareto_max(abs.iter().map(|(a, _)| a.clone()).collect());
            for m in maxes {
                let signed = &abs.iter().find(|(a, _)| *a == m).unwrap().1;
                let (val, b) = lp::covering_gauge(&cy.points, &m).expect("bounded polytope");
                if best.as_ref().is_none_or(|(v, _)| val > *v) {
                    let a: Vec<Q> = b
                        .iter()
                        .zip(signed.iter())
                        .map(|(bi, ci)| if ci.is_negative() { -bi.clone() } else { bi.clone() })
                        .collect();
                    best = Some((val, a));
                }
            }
        } else {
            let psi = cy.points;
            let cs = if cx.sign_closed { sign_flips(&cx.points) } else { cx.points };
            for c in cs {
                if c.iter().all(|v| v.is_zero()) {
                    continue;
                }
                let (val, b) = lp::gauge(&psi, &c).expect("bounded polytope");
                if best.as_ref().is_none_or(|(v, _)| val > *v) {
                    best = Some((val, b));
                }
            }
        }
        let (val, b) = best.unwrap_or_else(|| (Q::zero(), vec![Q::zero(); keep.len()]));
        return Ok(Domination {
            constant: Bound::Finite(Surd::rational(val)),
            witness: expand(&b),
        });
    }
    if !ysp.is_polyhedral() {
        return Err(DominationError::NonPolyhedral(xsp.to_string(), ysp.to_string()));
    }
    let cy = corners(ysp, &yj)?;
    let hs = if cy.sign_closed { sign_flips(&cy.points) } else { cy.points };
    let verts = vertices(&hs, keep.len()).expect("bounded polytope");
    let mut best = (Surd::zero(), vec![Q::zero(); keep.len()]);
    for b in verts {
        let v = norm(xsp, &Vector::combine(&b, &xj))?;
        if v > best.0 {
            best = (v, b);
        }
    }
    Ok(Domination {
        constant: Bound::Finite(best.0),
        witness: expand(&best.1),
    })
}

/// `domination_constant_exact` on two sequences of equal length.
pub fn dominate(xs: &VectorSequence, ys: &VectorSequence) -> Result<Domination, DominationError> {
    let x: Vec<&Vector> = xs.vectors.iter().collect();
    let y: Vec<&Vector> = ys.vectors.iter().collect();
    domination_constant_exact(&x, &xs.space, &y, &ys.space)
}

/// `||sum a x|| / ||sum a y||`, infinite when only the denominator vanishes
/// and `None` when both do.
pub fn ratio(a: &[Q], xs: &[&Vector], xsp: &SpaceSpec, ys: &[&Vector], ysp: &SpaceSpec) -> Result<Option<Bound>, NormError> {
    let nx = norm(xsp, &Vector::combine(a, xs))?;
    let ny = norm(ysp, &Vector::combine(a, ys))?;
    Ok(match (nx.is_zero(), ny.is_zero()) {
        (true, true) => None,
        (false, true) => Some(Bound::Infinite),
        _ => Some(Bound::Finite(nx.div(&ny))),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBound {
    pub value: Bound,
    pub witness: Vec<Q>,
}

/// Sound lower bound for the domination constant from seeded sampling:
/// every `{0,+1,-1}` pattern (up to 8 vectors), `trials` random rational
/// vectors, then coordinate moves from the best point found.
pub fn domination_lower_bound(xs: &VectorSequence, ys: &VectorSequence, trials: usize, seed: u64) -> Result<LowerBound, DominationError> {
    let n = xs.len();
    if n != ys.len() {
        return Err(DominationError::LengthMismatch(n, ys.len()));
    }
    let x: Vec<&Vector> = xs.vectors.iter().collect();
    let y: Vec<&Vector> = ys.vectors.iter().collect();
    let eval = |a: &[Q]| ratio(a, &x, &xs.space, &y, &ys.space);
    let mut best: Option<(Bound, Vec<Q>)> = None;
    let consider = |a: Vec<Q>, best: &mut Option<(Bound, Vec<Q>)>| -> Result<(), NormError> {
        if let Some(r) = eval(&a)? {
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                *best = Some((r, a));
            }
        }
        Ok(())
    };
    if n <= 8 {
        let total = 3u64.pow(n as u32);
        for code in 1..total {
            let mut c = code;
            let a: Vec<Q> = (0..n)
                .map(|_| {
                    let d = c % 3;
                    c /= 3;
                    q([0, 1, -1][d as usize])
                })
                .collect();
            consider(a, &mut best)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let a: Vec<Q> = (0..n)
            .map(|_| Q::new(rng.random_range(-12i64..=12).into(), rng.random_range(1i64..=6).into()))
            .collect();
        consider(a, &mut best)?;
    }
    let Some((mut bv, mut ba)) = best else {
        if x.iter().all(|v| v.is_zero()) {
            return Ok(LowerBound {
                value: Bound::Finite(Surd::zero()),
                witness: vec![Q::zero(); n],
            });
        }
        return Err(DominationError::Indeterminate);
    };
    // coordinate ascent with a fixed move set
    let moves = [q(2), Q::new(1.into(), 2.into()), q(0), q(-1), Q::new(3.into(), 2.into()), Q::new(2.into(), 3.into())];
    for _round in 0..8 {
        let mut improved = false;
        for i in 0..n {
            for m in &moves {
                let mut a = ba.clone();
                a[i] = if a[i].is_zero() { m.clone() } else { &a[i] * m };
                if let Some(r) = eval(&a)? {
                    if r > bv {
                        bv = r;
                        ba = a;
                        improved = true;
                    }
                }
            }
        }
        if !improved || bv == Bound::Infinite {
            break;
        }
    }
    Ok(LowerBound { value: bv, witness: ba })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RightDominance {
    pub ok: bool,
    pub constant: Bound,
    pub witness: Vec<Q>,
}

/// Exact constant for `(g_{m_n}) <= (g_{l_n})` and whether it is at most `r`.
pub fn right_dominance_defect(space: &SpaceSpec, m: &FinSet, l: &FinSet, r: &Q) -> Result<RightDominance, DominationError> {
    if !is_spread_of(l, m) {
        return Err(DominationError::NotSpread(l.to_string(), m.to_string()));
    }
    let gm: Vec<Vector> = m.as_slice().iter().map(|&i| Vector::unit(i)).collect();
    let gl: Vec<Vector> = l.as_slice().iter().map(|&i| Vector::unit(i)).collect();
    let d = domination_constant_exact(&gm.iter().collect::<Vec<_>>(), space, &gl.iter().collect::<Vec<_>>(), space)?;
    Ok(RightDominance {
        ok: d.constant.le_q(r),
        constant: d.constant,
        witness: d.witness,
    })
}

/// A node of `T(rho, C)`: the pairs `(m_n, l_n)`.
pub type TreeNode = Vec<(u64, u64)>;

/// Finite truncation of `T(rho, C)` with indices `<= max_index`, listed in
/// depth-first order from the root.
pub fn build_t_tree(
    rho: &VectorSequence,
    c: &Q,
    g_space: &SpaceSpec,
    max_index: u64,
    max_depth: usize,
    budget: u64,
) -> Result<Option<Vec<TreeNode>>, DominationError> {
    let mmax = max_index.min(rho.len() as u64);
    let mut out: Vec<TreeNode> = Vec::new();
    let mut stack: Vec<TreeNode> = vec![Vec::new()];
    let mut nodes = 0u64;
    while let Some(node) = stack.pop() {
        if node.len() < max_depth {
            let (lm, ll) = node.last().copied().unwrap_or((0, 0));
            let mut children = Vec::new();
            for m in lm + 1..=mmax {
                for l in ll + 1..=max_index {
                    nodes += 1;
                    if nodes > budget {
                        return Ok(None);
                    }
                    let mut next = node.clone();
                    next.push((m, l));
                    let xs: Vec<&Vector> = next.iter().map(|&(m, _)| rho.get(m)).collect();
                    let gs: Vec<Vector> = next.iter().map(|&(_, l)| Vector::unit(l)).collect();
                    let d = domination_constant_exact(&xs, &rho.space, &gs.iter().collect::<Vec<_>>(), g_space)?;
                    if d.constant.le_q(c) {
                        children.push(next);
                    }
                }
            }
            stack.extend(children.into_iter().rev());
        }
        out.push(node);
    }
    Ok(Some(out))
}

/// Finite-depth witness that `{(M(F), L(F)) : F in F_xi, F in {1..N}}` lies in
/// `T(rho, C)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub xi: Level,
    pub schedule: Schedule,
    pub m: Vec<u64>,
    pub l: Vec<u64>,
    pub c: Q,
    pub g_space: SpaceSpec,
    pub rho: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateJson {
    pub xi: String,
    #[serde(rename = "M")]
    pub m: Vec<u64>,
    #[serde(rename = "L")]
    pub l: Vec<u64>,
    #[serde(rename = "C")]
    pub c: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub g_space: String,
    pub rho: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<String>,
}

fn strictly_increasing(v: &[u64]) -> bool {
    v.first().is_none_or(|&f| f >= 1) && v.windows(2).all(|w| w[0] < w[1])
}

impl Certificate {
    pub fn new(xi: Level, m: Vec<u64>, l: Vec<u64>, c: Q, g_space: SpaceSpec, rho: impl Into<String>) -> Result<Self, DominationError> {
        let cert = Certificate {
            xi,
            schedule: Schedule::Identity,
            m,
            l,
            c,
            g_space,
            rho: rho.into(),
        };
        cert.validate()?;
        Ok(cert)
    }

    pub fn with_schedule(mut self, s: Schedule) -> Self {
        self.schedule = s;
        self
    }

    pub fn validate(&self) -> Result<(), DominationError> {
        let bad = |m: &str| Err(DominationError::Certificate(m.into()));
        if self.m.len() != self.l.len() {
            return bad("M and L differ in length");
        }
        if !strictly_increasing(&self.m) || !strictly_increasing(&self.l) {
            return bad("M and L must be strictly increasing positive lists");
        }
        if !self.c.is_positive() {
            return bad("C must be positive");
        }
        Ok(())
    }

    pub fn depth(&self) -> usize {
        self.m.len()
    }

    pub fn policy(&self) -> FundamentalPolicy {
        FundamentalPolicy::with_schedule(self.schedule.clone())
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            xi: self.xi.to_string(),
            m: self.m.clone(),
            l: self.l.clone(),
            c: fmt_q(&self.c),
            n: self.depth(),
            g_space: self.g_space.to_string(),
            rho: self.rho.clone(),
            schedule: match self.schedule {
                Schedule::Identity => None,
                ref s => Some(s.to_string()),
            },
        }
    }

    pub fn from_json(j: &CertificateJson) -> Result<Self, DominationError> {
        let xi: Level = j.xi.parse().map_err(|e| DominationError::Certificate(format!("xi: {e}")))?;
        let c = parse_q(&j.c).map_err(DominationError::Certificate)?;
        let g_space: SpaceSpec = j.g_space.parse()?;
        if j.n != j.m.len() {
            return Err(DominationError::Certificate(format!("N={} but |M|={}", j.n, j.m.len())));
        }
        let schedule = match &j.schedule {
            None => Schedule::Identity,
            Some(s) => Schedule::parse(s).map_err(DominationError::Certificate)?,
        };
        Ok(Certificate::new(xi, j.m.clone(), j.l.clone(), c, g_space, j.rho.clone())?.with_schedule(schedule))
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "xi={} M={:?} L={:?} C={} N={} g={}",
            self.xi,
            self.m,
            self.l,
            fmt_q(&self.c),
            self.depth(),
            self.g_space
        )
    }
}

/// Memo of exact constants for `(x_{m})_{m in ms}` against `(g_l)_{l in ls}`.
pub struct DomCache<'a> {
    rho: &'a VectorSequence,
    g_space: &'a SpaceSpec,
    memo: HashMap<(Vec<u64>, Vec<u64>), Domination>,
}

impl<'a> DomCache<'a> {
    pub fn new(rho: &'a VectorSequence, g_space: &'a SpaceSpec) -> Self {
        DomCache {
            rho,
            g_space,
            memo: HashMap::new(),
        }
    }

    pub fn get(&mut self, ms: &[u64], ls: &[u64]) -> Result<Domination, DominationError> {
        let key = (ms.to_vec(), ls.to_vec());
        if let Some(d) = self.memo.get(&key) {
            return Ok(d.clone());
        }
        let xs: Vec<&Vector> = ms.iter().map(|&m| self.rho.get(m)).collect();
        let gs: Vec<Vector> = ls.iter().map(|&l| Vector::unit(l)).collect();
        let d = domination_constant_exact(&xs, &self.rho.space, &gs.iter().collect::<Vec<_>>(), self.g_space)?;
        self.memo.insert(key, d.clone());
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub f: FinSet,
    pub scalars: Vec<Q>,
    pub ratio: Bound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verification {
    pub ok: bool,
    /// Largest exact constant over all checked sets.
    pub worst: Bound,
    pub worst_set: Option<FinSet>,
    /// First violating set in graded lexicographic order.
    pub violation: Option<Violation>,
    pub checked: usize,
}

/// Checks every `F` of `F_xi` inside `{1..N}` exactly.
pub fn verify_certificate(cert: &Certificate, rho: &VectorSequence) -> Result<Verification, DominationError> {
    cert.validate()?;
    if cert.m.last().is_some_and(|&m| m as usize > rho.len()) {
        return Err(DominationError::Certificate(format!(
            "max M = {} exceeds the sequence length {}",
            cert.m.last().unwrap(),
            rho.len()
        )));
    }
    let fam = cert.xi.family_with(&cert.policy());
    let sets = enumerate(&fam, cert.depth() as u64)?;
    let mut cache = DomCache::new(rho, &cert.g_space);
    let mut worst = Bound::Finite(Surd::zero());
    let mut worst_set = None;
    let mut violation = None;
    let mut checked = 0;
    for f in sets.iter().filter(|f| !f.is_empty()) {
        let ms: Vec<u64> = f.as_slice().iter().map(|&n| cert.m[n as usize - 1]).collect();
        let ls: Vec<u64> = f.as_slice().iter().map(|&n| cert.l[n as usize - 1]).collect();
        let d = cache.get(&ms, &ls)?;
        checked += 1;
        if d.constant > worst {
            worst = d.constant.clone();
            worst_set = Some(f.clone());
        }
        if violation.is_none() && !d.constant.le_q(&cert.c) {
            violation = Some(Violation {
                f: f.clone(),
                scalars: d.witness.clone(),
                ratio: d.constant.clone(),
            });
        }
    }
    Ok(Verification {
        ok: violation.is_none(),
        worst,
        worst_set,
        violation,
        checked,
    })
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub budget: u64,
    pub time_limit: Option<Duration>,
    /// Largest admissible `L` value; defaults to `max(|rho|, max support)`.
    pub l_max: Option<u64>,
    /// Optional constraint `M in K`.
    pub k: Option<Vec<u64>>,
    pub schedule: Schedule,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: DEFAULT_NODE_BUDGET,
            time_limit: Some(DEFAULT_TIME_BUDGET),
            l_max: None,
            k: None,
            schedule: Schedule::Identity,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Found { cert: Certificate, worst: Bound, nodes: u64 },
    /// The bounded search space holds no certificate at this constant; every
    /// `(M, L)` within the bounds has constant at least `lower`.
    Refuted { lower: Bound, nodes: u64 },
    Exhausted { nodes: u64 },
}

pub fn default_l_max(rho: &VectorSequence) -> u64 {
    let smax = rho.vectors.iter().filter_map(|v| v.max_support()).max().unwrap_or(0);
    smax.max(rho.len() as u64)
}

struct SearchState<'a, 'b> {
    by_max: Vec<Vec<FinSet>>,
    cache: DomCache<'a>,
    c: &'b Q,
    n: usize,
    mcands: Vec<u64>,
    l_max: u64,
    budget: u64,
    deadline: Option<Instant>,
    nodes: u64,
    m: Vec<u64>,
    l: Vec<u64>,
    worst: Bound,
    pruned_min: Option<Bound>,
}

enum Step {
    Found,
    Dead,
    OutOfBudget,
}

impl SearchState<'_, '_> {
    fn dfs(&mut self) -> Result<Step, DominationError> {
        let k = self.m.len() + 1;
        if k > self.n {
            return Ok(Step::Found);
        }
        let left = (self.n - k) as u64;
        let lm = self.m.last().copied().unwrap_or(0);
        let ll = self.l.last().copied().unwrap_or(0);
        let ms: Vec<u64> = self.mcands.iter().copied().filter(|&m| m > lm).collect();
        if (ms.len() as u64) <= left || ll + left >= self.l_max {
            return Ok(Step::Dead);
        }
        for &mv in &ms[..ms.len() - left as usize] {
            for lv in ll + 1..=self.l_max - left {
                self.nodes += 1;
                if self.nodes > self.budget || self.deadline.is_some_and(|d| Instant::now() > d) {
                    return Ok(Step::OutOfBudget);
                }
                self.m.push(mv);
                self.l.push(lv);
                let mut node_worst = Bound::Finite(Surd::zero());
                for f in &self.by_max[k] {
                    let fm: Vec<u64> = f.as_slice().iter().map(|&i| self.m[i as usize - 1]).collect();
                    let fl: Vec<u64> = f.as_slice().iter().map(|&i| self.l[i as usize - 1]).collect();
                    let d = self.cache.get(&fm, &fl)?;
                    if d.constant > node_worst {
                        node_worst = d.constant;
                    }
                }
                if node_worst.le_q(self.c) {
                    let saved = self.worst.clone();
                    if node_worst > self.worst {
                        self.worst = node_worst;
                    }
                    match self.dfs()? {
                        Step::Found => return Ok(Step::Found),
                        Step::OutOfBudget => return Ok(Step::OutOfBudget),
                        Step::Dead => {}
                    }
                    self.worst = saved;
                } else if self.pruned_min.as_ref().is_none_or(|p| node_worst < *p) {
                    self.pruned_min = Some(node_worst);
                }
                self.m.pop();
                self.l.pop();
            }
        }
        Ok(Step::Dead)
    }
}

/// Depth-first branch and bound over increasing `(M(k), L(k))`, smallest
/// pair first.
pub fn search_certificate(
    rho: &VectorSequence,
    xi: &Level,
    c: &Q,
    n: usize,
    g_space: &SpaceSpec,
    opts: &SearchOptions,
) -> Result<SearchOutcome, DominationError> {
    if n == 0 || n > rho.len() {
        return Err(DominationError::Certificate(format!("depth {n} must lie in 1..={}", rho.len())));
    }
    if !c.is_positive() {
        return Err(DominationError::Certificate("C must be positive".into()));
    }
    let policy = FundamentalPolicy::with_schedule(opts.schedule.clone());
    let sets = enumerate(&xi.family_with(&policy), n as u64)?;
    let mut by_max: Vec<Vec<FinSet>> = vec![Vec::new(); n + 1];
    for f in sets {
        if let Some(m) = f.max() {
            by_max[m as usize].push(f);
        }
    }
    let mcands: Vec<u64> = (1..=rho.len() as u64)
        .filter(|m| opts.k.as_ref().is_none_or(|k| k.contains(m)))
        .collect();
    let mut st = SearchState {
        by_max,
        cache: DomCache::new(rho, g_space),
        c,
        n,
        mcands,
        l_max: opts.l_max.unwrap_or_else(|| default_l_max(rho)),
        budget: opts.budget,
        deadline: opts.time_limit.map(|t| Instant::now() + t),
        nodes: 0,
        m: Vec::new(),
        l: Vec::new(),
        worst: Bound::Finite(Surd::zero()),
        pruned_min: None,
    };
    Ok(match st.dfs()? {
        Step::Found => SearchOutcome::Found {
            cert: Certificate::new(xi.clone(), st.m.clone(), st.l.clone(), c.clone(), g_space.clone(), "")?
                .with_schedule(opts.schedule.clone()),
            worst: st.worst,
            nodes: st.nodes,
        },
        Step::Dead => SearchOutcome::Refuted {
            lower: st.pruned_min.unwrap_or(Bound::Infinite),
            nodes: st.nodes,
        },
        Step::OutOfBudget => SearchOutcome::Exhausted { nodes: st.nodes },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaBracket {
    pub xi: Level,
    /// No `(M, L)` within the index bounds has a smaller constant at this depth.
    pub lower: Bound,
    pub upper: Bound,
    pub depth: usize,
    pub certificate: Option<Certificate>,
    pub nodes: u64,
    pub searches: usize,
    pub budget_exhausted: bool,
}

fn approx_q(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

fn width_ok(lower: &Bound, upper: &Bound, resolution: &Q) -> bool {
    match (lower, upper) {
        (Bound::Finite(lo), Bound::Finite(hi)) => match (lo.as_rational(), hi.as_rational()) {
            (Some(a), Some(b)) => b - a <= *resolution,
            _ => hi.to_f64() - lo.to_f64() <= crate::surd::q_to_f64(resolution),
        },
        _ => false,
    }
}

/// Bisection on `C` between exhaustive refutations and verified
/// certificates at depth `n`.
pub fn gamma_bracket(
    rho: &VectorSequence,
    xi: &Level,
    n: usize,
    g_space: &SpaceSpec,
    resolution: &Q,
    opts: &SearchOptions,
) -> Result<GammaBracket, DominationError> {
    let mut out = GammaBracket {
        xi: xi.clone(),
        lower: Bound::Finite(Surd::zero()),
        upper: Bound::Infinite,
        depth: n,
        certificate: None,
        nodes: 0,
        searches: 0,
        budget_exhausted: false,
    };
    let run = |c: &Q, out: &mut GammaBracket| -> Result<bool, DominationError> {
        out.searches += 1;
        match search_certificate(rho, xi, c, n, g_space, opts)? {
            SearchOutcome::Found { mut cert, worst, nodes } => {
                out.nodes += nodes;
                // a certificate needs a positive constant
                let w = worst.finite().expect("found certificates are finite").clone();
                let cval = match w.as_rational() {
                    Some(r) if r.is_zero() => resolution.clone(),
                    Some(r) => r.clone(),
                    None => c.clone(),
                };
                cert.c = cval.clone();
                cert.rho = String::new();
                let ub = if w.is_zero() { Bound::Finite(Surd::rational(cval)) } else { Bound::Finite(w) };
                if ub < out.upper {
                    out.upper = ub;
                    out.certificate = Some(cert);
                }
                Ok(true)
            }
            SearchOutcome::Refuted { lower, nodes } => {
                out.nodes += nodes;
                if lower > out.lower {
                    out.lower = lower;
                }
                Ok(true)
            }
            SearchOutcome::Exhausted { nodes } => {
                out.nodes += nodes;
                out.budget_exhausted = true;
                Ok(false)
            }
        }
    };
    // find a finite upper bound by doubling
    let mut c = Q::one();
    for _ in 0..40 {
        if !run(&c, &mut out)? {
            return Ok(out);
        }
        if out.upper != Bound::Infinite || out.lower == Bound::Infinite {
            break;
        }
        let lo = out.lower.finite().map(|s| approx_q(s.to_f64())).unwrap_or_else(Q::zero);
        c = (&c * q(2)).max(lo * q(2));
    }
    for _ in 0..64 {
        if out.upper == Bound::Infinite || width_ok(&out.lower, &out.upper, resolution) {
            break;
        }
        let lo = out.lower.finite().unwrap().to_f64();
        let hi = out.upper.finite().unwrap().to_f64();
        let mid = approx_q((lo + hi) / 2.0);
        if !mid.is_positive() {
            break;
        }
        if !run(&mid, &mut out)? {
            break;
        }
    }
    Ok(out)
}
