//! Spreading models at finite stages: geometric index schedules with
//! stability checks, exact values for combinatorial bases and the
//! F_omega bridge between certificates and spreading tables.

use num::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domination::{
    search_certificate, verify_certificate, DominationError, SearchOptions, SearchOutcome, VectorSequence,
};
use crate::families::{Family, FinSet, Level, MemberCache};
use crate::norms::{norm, NormError, SpaceSpec, Vector};
use crate::ordinal::{Ordinal, Schedule};
use crate::surd::{fmt_q, q, q_to_f64, Bound, Surd, Q};

pub const DEFAULT_BASE: u64 = 2;
pub const DEFAULT_RANDOM_PROBES: usize = 64;
const MAX_EXACT_STAGES: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum SpreadingError {
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error(transparent)]
    Domination(#[from] DominationError),
    #[error("generator has no vector at index {0}")]
    Exhausted(u64),
    #[error("index overflow in the stage schedule")]
    Overflow,
    #[error("tables are not comparable: {0}")]
    Mismatch(String),
    #[error("admissibility did not stabilize within {stages} stages; value lies in [{low}, {high}]")]
    Unstable { stages: usize, low: String, high: String },
    #[error("invalid input: {0}")]
    Input(String),
}

/// Where the vectors come from: a whole basis or a finite list.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Basis(SpaceSpec),
    Finite(VectorSequence),
}

impl Source {
    pub fn space(&self) -> &SpaceSpec {
        match self {
            Source::Basis(s) => s,
            Source::Finite(v) => &v.space,
        }
    }

    pub fn get(&self, n: u64) -> Result<Vector, SpreadingError> {
        match self {
            Source::Basis(_) => Ok(Vector::unit(n)),
            Source::Finite(v) => {
                if n == 0 || n as usize > v.len() {
                    Err(SpreadingError::Exhausted(n))
                } else {
                    Ok(v.get(n).clone())
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadingTable {
    pub m: usize,
    pub probes: Vec<Vec<Q>>,
    pub values: Vec<Surd>,
    /// The stage offset `s`; indices are `L(s B^n)`.
    pub stage: u64,
    pub indices: Vec<u64>,
    pub probe_set: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpreadingTableJson {
    pub m: usize,
    pub stage: u64,
    pub indices: Vec<u64>,
    pub probe_set: String,
    pub probes: Vec<Vec<String>>,
    pub values: Vec<String>,
}

impl SpreadingTable {
    pub fn to_json(&self) -> SpreadingTableJson {
        SpreadingTableJson {
            m: self.m,
            stage: self.stage,
            indices: self.indices.clone(),
            probe_set: self.probe_set.clone(),
            probes: self.probes.iter().map(|p| p.iter().map(fmt_q).collect()).collect(),
            values: self.values.iter().map(render_exact).collect(),
        }
    }

    pub fn from_json(j: &SpreadingTableJson) -> Result<Self, SpreadingError> {
        let probes = j
            .probes
            .iter()
            .map(|p| p.iter().map(|s| crate::surd::parse_q(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(SpreadingError::Input)?;
        let values = j.values.iter().map(|s| parse_exact(s)).collect::<Result<Vec<_>, _>>()?;
        if probes.len() != values.len() || probes.iter().any(|p| p.len() != j.m) {
            return Err(SpreadingError::Input("probe and value lists disagree".into()));
        }
        Ok(SpreadingTable {
            m: j.m,
            probes,
            values,
            stage: j.stage,
            indices: j.indices.clone(),
            probe_set: j.probe_set.clone(),
        })
    }
}

/// `n/d` for rationals and `root(b,k)` for `b^(1/k)`.
pub fn render_exact(s: &Surd) -> String {
    match s.as_rational() {
        Some(v) => fmt_q(v),
        None => format!("root({},{})", fmt_q(s.base()), s.index()),
    }
}

fn parse_exact(s: &str) -> Result<Surd, SpreadingError> {
    if let Some(body) = s.strip_prefix("root(").and_then(|r| r.strip_suffix(')')) {
        let (b, k) = body.split_once(',').ok_or_else(|| SpreadingError::Input(format!("bad value {s}")))?;
        let b = crate::surd::parse_q(b).map_err(SpreadingError::Input)?;
        let k: u32 = k.trim().parse().map_err(|_| SpreadingError::Input(format!("bad index in {s}")))?;
        if b.is_negative() || k == 0 {
            return Err(SpreadingError::Input(format!("bad value {s}")));
        }
        return Ok(Surd::root(b, k));
    }
    let v = crate::surd::parse_q(s).map_err(SpreadingError::Input)?;
    if v.is_negative() {
        return Err(SpreadingError::Input(format!("negative value {s}")));
    }
    Ok(Surd::rational(v))
}

/// Nonzero `{0,+1,-1}` vectors (which include the simplex corners) followed
/// by `random` seeded rational vectors.
pub fn default_probes(m: usize, random: usize, seed: u64) -> Vec<Vec<Q>> {
    let mut out: Vec<Vec<Q>> = Vec::new();
    if m <= 8 {
        for code in 1..3u64.pow(m as u32) {
            let mut c = code;
            out.push(
                (0..m)
                    .map(|_| {
                        let d = c % 3;
                        c /= 3;
                        q([0, 1, -1][d as usize])
                    })
                    .collect(),
            );
        }
    } else {
        for i in 0..m {
            let mut v = vec![q(0); m];
            v[i] = q(1);
            out.push(v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        out.push(
            (0..m)
                .map(|_| Q::new(rng.random_range(-9i64..=9).into(), rng.random_range(1i64..=5).into()))
                .collect(),
        );
    }
    out
}

/// `L(s B^n)` for `n = 1..m`.
pub fn stage_indices(l: &Schedule, m: usize, stage: u64, base: u64) -> Result<Vec<u64>, SpreadingError> {
    let mut out = Vec::with_capacity(m);
    let mut p = stage;
    for _ in 0..m {
        p = p.checked_mul(base).ok_or(SpreadingError::Overflow)?;
        out.push(l.q(p));
    }
    Ok(out)
}

pub fn table_at(
    src: &Source,
    l: &Schedule,
    m: usize,
    stage: u64,
    base: u64,
    probes: &[Vec<Q>],
    probe_set: &str,
) -> Result<SpreadingTable, SpreadingError> {
    let idx = stage_indices(l, m, stage, base)?;
    table_on(src, &idx, probes, probe_set, stage)
}

fn table_on(src: &Source, idx: &[u64], probes: &[Vec<Q>], probe_set: &str, stage: u64) -> Result<SpreadingTable, SpreadingError> {
    let vs: Vec<Vector> = idx.iter().map(|&i| src.get(i)).collect::<Result<_, _>>()?;
    let refs: Vec<&Vector> = vs.iter().collect();
    let mut values = Vec::with_capacity(probes.len());
    for a in probes {
        if a.len() != idx.len() {
            return Err(SpreadingError::Input(format!("probe of length {} for m = {}", a.len(), idx.len())));
        }
        values.push(norm(src.space(), &Vector::combine(a, &refs))?);
    }
    Ok(SpreadingTable {
        m: idx.len(),
        probes: probes.to_vec(),
        values,
        stage,
        indices: idx.to_vec(),
        probe_set: probe_set.to_string(),
    })
}

fn discrepancy(a: &SpreadingTable, b: &SpreadingTable) -> f64 {
    a.values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| (x.to_f64() - y.to_f64()).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadingEstimate {
    pub tables: Vec<SpreadingTable>,
    /// Largest change of any probe value between consecutive stages.
    pub max_discrepancy: f64,
    /// The last two stages agree exactly.
    pub stable: bool,
}

pub fn estimate_spreading(
    src: &Source,
    l: &Schedule,
    m: usize,
    stages: &[u64],
    base: u64,
    probes: &[Vec<Q>],
    probe_set: &str,
) -> Result<SpreadingEstimate, SpreadingError> {
    if stages.is_empty() || stages.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SpreadingError::Input("stages must be a nonempty increasing list".into()));
    }
    let tables = stages
        .iter()
        .map(|&s| table_at(src, l, m, s, base, probes, probe_set))
        .collect::<Result<Vec<_>, _>>()?;
    let max_discrepancy = tables.windows(2).map(|w| discrepancy(&w[0], &w[1])).fold(0.0, f64::max);
    let stable = tables.len() >= 2 && {
        let k = tables.len();
        tables[k - 1].values == tables[k - 2].values
    };
    Ok(SpreadingEstimate {
        tables,
        max_discrepancy,
        stable,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSpreading {
    pub value: Q,
    /// First stage of the pair that agreed.
    pub stage: u64,
    /// Subsets of `{1..m}` admissible at the tail.
    pub admissible: Vec<FinSet>,
}

fn admissible_at(fam: &Family, idx: &[u64], cache: &mut MemberCache) -> Vec<FinSet> {
    let m = idx.len();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << m) {
        let pos: Vec<u64> = (0..m as u64).filter(|i| mask >> i & 1 == 1).collect();
        let sel: Vec<u64> = pos.iter().map(|&p| idx[p as usize]).collect();
        if fam.member_with(&sel, cache) {
            out.push(FinSet::new(pos.iter().map(|p| p + 1).collect()).unwrap());
        }
    }
    out
}

fn best_sum(adm: &[FinSet], a: &[Q]) -> Q {
    adm.iter()
        .map(|g| g.as_slice().iter().map(|&n| a[n as usize - 1].abs()).sum::<Q>())
        .max()
        .unwrap_or_else(Q::zero)
}

/// Exact spreading-model value `||sum a_n e_n||` for the basis of `X_fam`
/// along the subsequence `L`: admissibility of tail `m`-sets is tracked at
/// stages `m, 2m, 4m, ...` until two consecutive stages agree.
pub fn exact_spreading_combinatorial(fam: &Family, l: &Schedule, a: &[Q], base: u64) -> Result<ExactSpreading, SpreadingError> {
    let m = a.len();
    if m == 0 || m > 16 {
        return Err(SpreadingError::Input("m must lie in 1..=16".into()));
    }
    let mut cache = MemberCache::default();
    let mut stage = m as u64;
    let mut prev = admissible_at(fam, &stage_indices(l, m, stage, base)?, &mut cache);
    let mut lo = best_sum(&prev, a);
    let mut hi = lo.clone();
    for _ in 0..MAX_EXACT_STAGES {
        let next_stage = stage.checked_mul(2).ok_or(SpreadingError::Overflow)?;
        let next = admissible_at(fam, &stage_indices(l, m, next_stage, base)?, &mut cache);
        let v = best_sum(&next, a);
        if next == prev {
            return Ok(ExactSpreading {
                value: v,
                stage,
                admissible: next,
            });
        }
        lo = lo.min(v.clone());
        hi = hi.max(v);
        prev = next;
        stage = next_stage;
    }
    Err(SpreadingError::Unstable {
        stages: MAX_EXACT_STAGES,
        low: fmt_q(&lo),
        high: fmt_q(&hi),
    })
}

/// Exact table for the `X_fam` basis over a probe set.
pub fn exact_table(fam: &Family, l: &Schedule, m: usize, probes: &[Vec<Q>], probe_set: &str, base: u64) -> Result<SpreadingTable, SpreadingError> {
    let mut values = Vec::with_capacity(probes.len());
    let mut stage = 0;
    for a in probes {
        if a.len() != m {
            return Err(SpreadingError::Input(format!("probe of length {} for m = {m}", a.len())));
        }
        let e = exact_spreading_combinatorial(fam, l, a, base)?;
        stage = stage.max(e.stage);
        values.push(Surd::rational(e.value));
    }
    Ok(SpreadingTable {
        m,
        probes: probes.to_vec(),
        values,
        stage,
        indices: stage_indices(l, m, stage.max(1), base)?,
        probe_set: probe_set.to_string(),
    })
}

/// Smallest `K` with mutual `K`-domination over the shared probes.
pub fn equivalence_constant(t1: &SpreadingTable, t2: &SpreadingTable) -> Result<Bound, SpreadingError> {
    if t1.m != t2.m || t1.probes != t2.probes {
        return Err(SpreadingError::Mismatch("different m or probe sets".into()));
    }
    let mut worst = Bound::Finite(Surd::rational(q(1)));
    for (a, b) in t1.values.iter().zip(t2.values.iter()) {
        let r = match (a.is_zero(), b.is_zero()) {
            (true, true) => continue,
            (true, false) | (false, true) => Bound::Infinite,
            _ => Bound::Finite(a.div(b).max(b.div(a))),
        };
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// `t1 <= c t2` on every probe, exactly.
pub fn table_dominated(t1: &SpreadingTable, t2: &SpreadingTable, c: &Q) -> bool {
    t1.values.iter().zip(t2.values.iter()).all(|(a, b)| *a <= b.mul_q(c))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Direction {
    Pass { detail: String },
    Fail { detail: String },
    Inconclusive { reason: String },
}

impl Direction {
    pub fn passed(&self) -> bool {
        matches!(self, Direction::Pass { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BridgeReport {
    /// A certificate at `C` gives table domination at `r C + tol`.
    pub cert_to_table: Direction,
    /// Table domination at `C` gives a certificate at `1 + 2C + tol`.
    pub table_to_cert: Direction,
    pub m: usize,
    pub bridge_constant: Q,
}

#[derive(Debug, Clone)]
pub struct BridgeOptions {
    pub r: Q,
    pub tolerance: Q,
    pub schedule: Schedule,
    pub search: SearchOptions,
    pub seed: u64,
}

impl Default for BridgeOptions {
    fn default() -> Self {
        BridgeOptions {
            r: q(1),
            tolerance: q(0),
            schedule: Schedule::Identity,
            search: SearchOptions::default(),
            seed: 0,
        }
    }
}

/// Finite-depth check of both directions linking `F_omega` certificates
/// against the `X_{S_g_xi}` basis with domination of spreading tables.
/// The table of `rho` is read off its last window of `m = depth / 2`
/// consecutive vectors and must agree with the window one step earlier.
pub fn check_main2_bridge(rho: &VectorSequence, g_xi: &Ordinal, c: &Q, depth: usize, opts: &BridgeOptions) -> Result<BridgeReport, SpreadingError> {
    let m = depth / 2;
    let bridge_constant = q(1) + q(2) * c + &opts.tolerance;
    let inconclusive = |reason: String| BridgeReport {
        cert_to_table: Direction::Inconclusive { reason: reason.clone() },
        table_to_cert: Direction::Inconclusive { reason },
        m,
        bridge_constant: bridge_constant.clone(),
    };
    if m == 0 || rho.len() < depth || rho.len() <= m {
        return Ok(inconclusive(format!("depth {depth} with {} vectors leaves no stability window", rho.len())));
    }
    let probes = default_probes(m, DEFAULT_RANDOM_PROBES, opts.seed);
    let src = Source::Finite(rho.clone());
    let n = rho.len() as u64;
    let last: Vec<u64> = (n - m as u64 + 1..=n).collect();
    let prev: Vec<u64> = (n - m as u64..n).collect();
    let t_last = table_on(&src, &last, &probes, "default", 0)?;
    let t_prev = table_on(&src, &prev, &probes, "default", 0)?;
    let unstable = t_last.values != t_prev.values;
    if unstable && opts.tolerance.is_zero() {
        return Ok(inconclusive("the last two windows of rho disagree".into()));
    }
    if unstable && discrepancy(&t_last, &t_prev) > q_to_f64(&opts.tolerance) {
        return Ok(inconclusive("window discrepancy exceeds the tolerance".into()));
    }
    let g_fam = Family::schreier(g_xi.clone());
    let g_space = SpaceSpec::Combinatorial(g_fam.clone());
    let omega = Level::Ord(Ordinal::omega());
    let mut search = opts.search.clone();
    search.schedule = opts.schedule.clone();

    let cert_to_table = match search_certificate(rho, &omega, c, depth, &g_space, &search)? {
        SearchOutcome::Found { cert, .. } => {
            let gl = Schedule::Table(cert.l.clone());
            let g_table = exact_table(&g_fam, &gl, m, &probes, "default", DEFAULT_BASE)?;
            let k = &opts.r * c + &opts.tolerance;
            if table_dominated(&t_last, &g_table, &k) {
                Direction::Pass {
                    detail: format!("certificate M={:?} L={:?}; table dominated at {}", cert.m, cert.l, fmt_q(&k)),
                }
            } else {
                Direction::Fail {
                    detail: format!("table of rho exceeds {} times the g table", fmt_q(&k)),
                }
            }
        }
        SearchOutcome::Refuted { lower, .. } => Direction::Inconclusive {
            reason: format!("no F_omega certificate at C = {} (every one needs at least {lower})", fmt_q(c)),
        },
        SearchOutcome::Exhausted { nodes } => Direction::Inconclusive {
            reason: format!("search budget exhausted after {nodes} nodes"),
        },
    };

    let g_table = exact_table(&g_fam, &Schedule::Identity, m, &probes, "default", DEFAULT_BASE)?;
    let table_to_cert = if !table_dominated(&t_last, &g_table, c) {
        Direction::Inconclusive {
            reason: format!("spreading table of rho is not {}-dominated by the g table", fmt_q(c)),
        }
    } else {
        match search_certificate(rho, &omega, &bridge_constant, depth, &g_space, &search)? {
            SearchOutcome::Found { cert, worst, .. } => {
                let v = verify_certificate(&cert, rho)?;
                if v.ok {
                    Direction::Pass {
                        detail: format!("verified F_omega certificate at {} (worst ratio {worst})", fmt_q(&bridge_constant)),
                    }
                } else {
                    Direction::Fail {
                        detail: "found certificate failed re-verification".into(),
                    }
                }
            }
            SearchOutcome::Refuted { lower, .. } => Direction::Fail {
                detail: format!("no F_omega certificate at {}; lower bound {lower}", fmt_q(&bridge_constant)),
            },
            SearchOutcome::Exhausted { nodes } => Direction::Inconclusive {
                reason: format!("search budget exhausted after {nodes} nodes"),
            },
        }
    };
    Ok(BridgeReport {
        cert_to_table,
        table_to_cert,
        m,
        bridge_constant,
    })
}
