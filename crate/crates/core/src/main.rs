use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use schreier::acceptance;
use schreier::domination::{
    build_t_tree, domination_constant_exact, domination_lower_bound, gamma_bracket, right_dominance_defect, search_certificate,
    verify_certificate, Certificate, CertificateJson, DominationError, SearchOptions, SearchOutcome, VectorSequence, VectorSequenceJson,
};
use schreier::families::{
    almost_monotone_witness_with, check_regular, enumerate, find_order_embedding, is_spread_of, rank_restricted, EmbeddingResult, Family,
    FinSet, Level, Violation,
};
use schreier::norms::{norm, norming_functionals, parse_vector, tsirelson, NormError, SpaceSpec, Vector};
use schreier::ordinal::{FundamentalPolicy, Kind, Ordinal, Schedule};
use schreier::spreading::{
    check_main2_bridge, default_probes, equivalence_constant, estimate_spreading, exact_spreading_combinatorial, render_exact, BridgeOptions,
    Direction, Source, SpreadingError, SpreadingTable, SpreadingTableJson, DEFAULT_BASE, DEFAULT_RANDOM_PROBES,
};
use schreier::surd::{fmt_q, parse_q, Bound, Q};
use schreier::transfer::{
    block_certificate, frak_table, limit_combine, merge_subsequence_certificates, shift_certificate, sum_combine, wn_select, Checked,
    TransferError,
};

#[derive(Parser)]
#[command(name = "schreier", version, about = "Schreier families, combinatorial norms and domination certificates")]
struct Cli {
    #[command(flatten)]
    job: Job,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Job {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Node budget for searches.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: u64,
    /// Time budget for searches, in seconds.
    #[arg(long, global = true, default_value_t = 60)]
    time: u64,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Digits for decimal approximations of irrational values.
    #[arg(long, global = true, default_value_t = 12)]
    digits: usize,
}

#[derive(Subcommand)]
enum Cmd {
    /// Ordinal arithmetic below epsilon_0.
    #[command(subcommand)]
    Ord(OrdCmd),
    /// Family membership, enumeration and structure.
    #[command(subcommand)]
    Fam(FamCmd),
    /// Norm evaluation.
    #[command(subcommand)]
    Norm(NormCmd),
    /// Domination constants between finite sequences.
    #[command(subcommand)]
    Dominate(DomCmd),
    /// Certificates of tree domination.
    #[command(subcommand)]
    Certify(CertCmd),
    /// Certificate transformers and weakly null selection.
    #[command(subcommand)]
    Transfer(TransferCmd),
    /// Spreading model tables.
    #[command(subcommand)]
    Spread(SpreadCmd),
    /// Runs an acceptance suite.
    Acceptance {
        #[arg(default_value = "all")]
        suite: String,
        #[arg(long)]
        list: bool,
    },
}

#[derive(Subcommand)]
enum OrdCmd {
    Compare { a: String, b: String },
    Add { a: String, b: String },
    Fund {
        xi: String,
        n: u64,
        #[arg(long, default_value = "identity")]
        schedule: String,
    },
    Classify { a: String },
}

#[derive(Subcommand)]
enum FamCmd {
    Member {
        fam: String,
        set: String,
        #[arg(long)]
        schedule: Option<String>,
    },
    Enum {
        fam: String,
        n: u64,
        #[arg(long)]
        schedule: Option<String>,
    },
    Spread { l: String, f: String },
    Regular { fam: String, n: u64 },
    Rank { fam: String, n: u64 },
    Monotone {
        zeta: String,
        xi: String,
        n: u64,
        #[arg(long, default_value = "identity")]
        schedule: String,
    },
    Embed {
        src: String,
        dst: String,
        n: u64,
        #[arg(long)]
        max_value: Option<u64>,
    },
}

#[derive(Subcommand)]
enum NormCmd {
    /// Norm of the vector stored in a JSON file.
    Eval { space: String, vector: PathBuf },
    /// Fixpoint iteration details for a Tsirelson norm.
    Tsirelson { xi: String, theta: String, vector: PathBuf },
    /// Norming functionals on a support.
    Functionals { space: String, support: String },
}

#[derive(Subcommand)]
enum DomCmd {
    Exact { xs: String, ys: String },
    Lb {
        xs: String,
        ys: String,
        #[arg(long, default_value_t = 256)]
        trials: usize,
    },
    Right {
        space: String,
        m: String,
        l: String,
        #[arg(long, default_value = "1")]
        r: String,
    },
}

#[derive(Args)]
struct SearchArgs {
    rho: String,
    #[arg(long)]
    xi: String,
    #[arg(long)]
    depth: usize,
    #[arg(long)]
    g_space: String,
    #[arg(long)]
    l_max: Option<u64>,
    #[arg(long, default_value = "identity")]
    schedule: String,
}

#[derive(Subcommand)]
enum CertCmd {
    Verify { cert: PathBuf, rho: String },
    Search {
        #[command(flatten)]
        s: SearchArgs,
        #[arg(long)]
        c: String,
    },
    Bracket {
        #[command(flatten)]
        s: SearchArgs,
        #[arg(long, default_value = "1/100")]
        resolution: String,
    },
    Tree {
        rho: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        g_space: String,
        #[arg(long)]
        max_index: u64,
        #[arg(long)]
        max_depth: usize,
    },
}

#[derive(Subcommand)]
enum TransferCmd {
    Shift {
        cert: PathBuf,
        rho: String,
        #[arg(long)]
        zeta: String,
        #[arg(long)]
        l: usize,
    },
    Limit {
        rho: String,
        #[arg(long)]
        xi: String,
        #[arg(long, default_value = "1")]
        r: String,
        #[arg(required = true)]
        certs: Vec<PathBuf>,
    },
    Sum {
        cert1: PathBuf,
        cert2: PathBuf,
        rho: String,
        #[arg(long, default_value = "1")]
        r: String,
    },
    Merge {
        rho: String,
        base: PathBuf,
        extras: Vec<PathBuf>,
        #[arg(long, default_value = "1")]
        r: String,
    },
    /// Certificate for a normalized block sequence; the file holds a JSON
    /// list of vectors.
    Block { fam: String, blocks: PathBuf },
    Frak {
        xs: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        n: u64,
    },
    Select {
        xs: String,
        #[arg(long)]
        xi: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum SpreadCmd {
    /// Tables at the given stages; `seq` is `basis(<space>)`, `basis(<space>;<len>)` or a file.
    Estimate {
        seq: String,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "1,2,4,8")]
        stages: String,
        #[arg(long, default_value = "identity")]
        l: String,
        #[arg(long, default_value_t = DEFAULT_BASE)]
        base: u64,
        /// Coefficient vectors separated by `;`; defaults to the standard probe set.
        #[arg(long)]
        probes: Option<String>,
    },
    Exact {
        fam: String,
        a: String,
        #[arg(long, default_value = "identity")]
        l: String,
    },
    Equiv { t1: PathBuf, t2: PathBuf },
    Bridge {
        rho: String,
        #[arg(long)]
        g_xi: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value = "identity")]
        schedule: String,
        #[arg(long, default_value = "1")]
        r: String,
        #[arg(long, default_value = "0")]
        tolerance: String,
    },
}

enum Failure {
    Usage(String),
    Violation(String),
    Exhausted(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Violation(_) => 2,
            Failure::Exhausted(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Violation(m) | Failure::Exhausted(m) => m,
        }
    }
}

impl From<NormError> for Failure {
    fn from(e: NormError) -> Self {
        match e {
            NormError::Budget(_) => Failure::Exhausted(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<DominationError> for Failure {
    fn from(e: DominationError) -> Self {
        match e {
            DominationError::Norm(n) => n.into(),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<TransferError> for Failure {
    fn from(e: TransferError) -> Self {
        match e {
            TransferError::Domination(d) => d.into(),
            TransferError::RightDominance { .. } | TransferError::Reverify { .. } | TransferError::Shadow { .. } => Failure::Violation(e.to_string()),
            TransferError::Embedding { ref reason, .. } if reason.contains("budget") => Failure::Exhausted(e.to_string()),
            TransferError::Embedding { .. } => Failure::Violation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<SpreadingError> for Failure {
    fn from(e: SpreadingError) -> Self {
        match e {
            SpreadingError::Norm(n) => n.into(),
            SpreadingError::Domination(d) => d.into(),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Usage(format!("{what}: {e}"))
}

type Res = Result<(String, u8), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn json_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::Usage(format!("{}: line {}, column {}: {e}", path.display(), e.line(), e.column())))
}

fn ordinal(s: &str) -> Result<Ordinal, Failure> {
    s.parse().map_err(usage(&format!("ordinal {s:?}")))
}

fn rational(s: &str) -> Result<Q, Failure> {
    parse_q(s).map_err(usage(&format!("rational {s:?}")))
}

fn schedule(s: &str) -> Result<Schedule, Failure> {
    Schedule::parse(s).map_err(usage(&format!("schedule {s:?}")))
}

fn family(s: &str, sched: Option<&str>) -> Result<Family, Failure> {
    let f: Family = s.parse().map_err(usage(&format!("family {s:?}")))?;
    Ok(match sched {
        Some(x) => f.with_schedule(&schedule(x)?),
        None => f,
    })
}

fn space(s: &str) -> Result<SpaceSpec, Failure> {
    s.parse().map_err(usage(&format!("space {s:?}")))
}

fn finset(s: &str) -> Result<FinSet, Failure> {
    s.parse().map_err(usage(&format!("set {s:?}")))
}

/// `basis(<space>;<len>)` or a sequence file.
fn sequence(s: &str) -> Result<VectorSequence, Failure> {
    if s.trim_start().starts_with("basis(") {
        return Ok(VectorSequence::parse_basis(s)?);
    }
    let j: VectorSequenceJson = json_file(Path::new(s))?;
    Ok(VectorSequence::from_json(&j)?)
}

fn certificate(path: &Path) -> Result<Certificate, Failure> {
    let j: CertificateJson = json_file(path)?;
    Ok(Certificate::from_json(&j)?)
}

fn coefficients(s: &str) -> Result<Vec<Q>, Failure> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(rational)
        .collect()
}

fn search_opts(job: &Job, l_max: Option<u64>, sched: &str) -> Result<SearchOptions, Failure> {
    if job.budget == 0 || job.time == 0 {
        return Err(Failure::Usage("budgets must be positive".into()));
    }
    Ok(SearchOptions {
        budget: job.budget,
        time_limit: Some(Duration::from_secs(job.time)),
        l_max,
        k: None,
        schedule: schedule(sched)?,
    })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

fn bound_json(b: &Bound, digits: usize) -> Value {
    match b {
        Bound::Infinite => json!("inf"),
        Bound::Finite(s) => match s.as_rational() {
            Some(r) => json!(fmt_q(r)),
            None => json!({ "exact": render_exact(s), "approx": s.render(digits) }),
        },
    }
}

fn qs(v: &[Q]) -> Vec<String> {
    v.iter().map(fmt_q).collect()
}

fn checked_json(c: &Checked) -> Value {
    json!({
        "certificate": serde_json::to_value(c.cert.to_json()).expect("certificate serializes"),
        "worst": c.verification.worst.to_string(),
        "checked": c.verification.checked,
    })
}

fn ok(s: String) -> Res {
    Ok((s, 0))
}

fn run_ord(cmd: OrdCmd) -> Res {
    match cmd {
        OrdCmd::Compare { a, b } => {
            let o = ordinal(&a)?.cmp(&ordinal(&b)?);
            ok(match o {
                std::cmp::Ordering::Less => "less",
                std::cmp::Ordering::Equal => "equal",
                std::cmp::Ordering::Greater => "greater",
            }
            .into())
        }
        OrdCmd::Add { a, b } => ok(ordinal(&a)?.add(&ordinal(&b)?).to_string()),
        OrdCmd::Fund { xi, n, schedule: s } => {
            let p = FundamentalPolicy::with_schedule(schedule(&s)?);
            ok(p.apply(&ordinal(&xi)?, n).map_err(usage("fundamental sequence"))?.to_string())
        }
        OrdCmd::Classify { a } => ok(match ordinal(&a)?.classify() {
            Kind::Zero => "zero".into(),
            Kind::Successor(p) => format!("successor {p}"),
            Kind::Limit => "limit".into(),
        }),
    }
}

fn run_fam(cmd: FamCmd, job: &Job) -> Res {
    match cmd {
        FamCmd::Member { fam, set, schedule } => ok(family(&fam, schedule.as_deref())?.member(&finset(&set)?).to_string()),
        FamCmd::Enum { fam, n, schedule } => {
            let list = enumerate(&family(&fam, schedule.as_deref())?, n).map_err(usage("enumerate"))?;
            ok(list.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("\n"))
        }
        FamCmd::Spread { l, f } => ok(is_spread_of(&finset(&l)?, &finset(&f)?).to_string()),
        FamCmd::Regular { fam, n } => {
            let r = check_regular(&family(&fam, None)?, n).map_err(usage("regularity"))?;
            let ce = r.counterexample.as_ref().map(|v| match v {
                Violation::Hereditary { member, witness } => json!({"kind": "hereditary", "member": member.to_string(), "witness": witness.to_string()}),
                Violation::Spreading { member, witness } => json!({"kind": "spreading", "member": member.to_string(), "witness": witness.to_string()}),
            });
            let text = pretty(&json!({"hereditary_ok": r.hereditary_ok, "spreading_ok": r.spreading_ok, "counterexample": ce}));
            Ok((text, if ce.is_some() { 2 } else { 0 }))
        }
        FamCmd::Rank { fam, n } => ok(rank_restricted(&family(&fam, None)?, n).map_err(usage("rank"))?.to_string()),
        FamCmd::Monotone { zeta, xi, n, schedule: s } => {
            let xi: Level = xi.parse().map_err(usage("level"))?;
            let p = FundamentalPolicy::with_schedule(schedule(&s)?);
            let w = almost_monotone_witness_with(&ordinal(&zeta)?, &xi, n, &p).map_err(usage("almost monotone"))?;
            ok(w.map_or_else(|| format!("none up to {n}"), |l| l.to_string()))
        }
        FamCmd::Embed { src, dst, n, max_value } => {
            let r = find_order_embedding(&family(&src, None)?, &family(&dst, None)?, n, max_value.unwrap_or(4 * n), job.budget)
                .map_err(usage("embedding"))?;
            match r {
                EmbeddingResult::Found(p) => ok(pretty(&json!({ "P": p }))),
                EmbeddingResult::NotFound => Err(Failure::Violation("no embedding within the search bounds".into())),
                EmbeddingResult::BudgetExhausted => Err(Failure::Exhausted("embedding search budget exhausted".into())),
            }
        }
    }
}

fn run_norm(cmd: NormCmd, job: &Job) -> Res {
    match cmd {
        NormCmd::Eval { space: s, vector } => {
            let v = parse_vector(&read(&vector)?)?;
            ok(norm(&space(&s)?, &v)?.render(job.digits))
        }
        NormCmd::Tsirelson { xi, theta, vector } => {
            let v = parse_vector(&read(&vector)?)?;
            let e = tsirelson(&ordinal(&xi)?, &rational(&theta)?, &v)?;
            ok(pretty(&json!({"norm": fmt_q(&e.norm), "iterations": e.iterations})))
        }
        NormCmd::Functionals { space: s, support } => {
            let f = finset(&support)?;
            let list = norming_functionals(&space(&s)?, f.as_slice())?;
            let out: Vec<Value> = list.iter().map(|v| serde_json::to_value(v.to_json()).expect("vector serializes")).collect();
            ok(pretty(&Value::Array(out)))
        }
    }
}

fn run_dominate(cmd: DomCmd, job: &Job) -> Res {
    match cmd {
        DomCmd::Exact { xs, ys } => {
            let (x, y) = (sequence(&xs)?, sequence(&ys)?);
            let d = domination_constant_exact(&x.vectors.iter().collect::<Vec<_>>(), &x.space, &y.vectors.iter().collect::<Vec<_>>(), &y.space)?;
            ok(pretty(&json!({"constant": bound_json(&d.constant, job.digits), "witness": qs(&d.witness)})))
        }
        DomCmd::Lb { xs, ys, trials } => {
            let lb = domination_lower_bound(&sequence(&xs)?, &sequence(&ys)?, trials, job.seed)?;
            ok(pretty(&json!({"lower_bound": bound_json(&lb.value, job.digits), "witness": qs(&lb.witness)})))
        }
        DomCmd::Right { space: s, m, l, r } => {
            let rd = right_dominance_defect(&space(&s)?, &finset(&m)?, &finset(&l)?, &rational(&r)?)?;
            let text = pretty(&json!({"ok": rd.ok, "constant": bound_json(&rd.constant, job.digits), "witness": qs(&rd.witness)}));
            Ok((text, if rd.ok { 0 } else { 2 }))
        }
    }
}

fn run_certify(cmd: CertCmd, job: &Job) -> Res {
    match cmd {
        CertCmd::Verify { cert, rho } => {
            let v = verify_certificate(&certificate(&cert)?, &sequence(&rho)?)?;
            let violation = v.violation.as_ref().map(|x| json!({"F": x.f.to_string(), "scalars": qs(&x.scalars), "ratio": x.ratio.to_string()}));
            let text = pretty(&json!({
                "ok": v.ok,
                "worst": bound_json(&v.worst, job.digits),
                "worst_set": v.worst_set.as_ref().map(|f| f.to_string()),
                "checked": v.checked,
                "violation": violation,
            }));
            Ok((text, if v.ok { 0 } else { 2 }))
        }
        CertCmd::Search { s, c } => {
            let rho = sequence(&s.rho)?;
            let xi: Level = s.xi.parse().map_err(usage("level"))?;
            let opts = search_opts(job, s.l_max, &s.schedule)?;
            match search_certificate(&rho, &xi, &rational(&c)?, s.depth, &space(&s.g_space)?, &opts)? {
                SearchOutcome::Found { cert, worst, nodes } => ok(pretty(&json!({
                    "certificate": serde_json::to_value(cert.to_json()).expect("certificate serializes"),
                    "worst": bound_json(&worst, job.digits),
                    "nodes": nodes,
                }))),
                SearchOutcome::Refuted { lower, nodes } => {
                    let text = pretty(&json!({"refuted": true, "lower_bound": bound_json(&lower, job.digits), "nodes": nodes}));
                    Ok((text, 2))
                }
                SearchOutcome::Exhausted { nodes } => Err(Failure::Exhausted(format!("search budget exhausted after {nodes} nodes"))),
            }
        }
        CertCmd::Bracket { s, resolution } => {
            let rho = sequence(&s.rho)?;
            let xi: Level = s.xi.parse().map_err(usage("level"))?;
            let opts = search_opts(job, s.l_max, &s.schedule)?;
            let b = gamma_bracket(&rho, &xi, s.depth, &space(&s.g_space)?, &rational(&resolution)?, &opts)?;
            let text = pretty(&json!({
                "xi": b.xi.to_string(),
                "lower": bound_json(&b.lower, job.digits),
                "upper": bound_json(&b.upper, job.digits),
                "depth": b.depth,
                "certificate": b.certificate.as_ref().map(|c| serde_json::to_value(c.to_json()).expect("certificate serializes")),
                "nodes": b.nodes,
                "searches": b.searches,
                "budget_exhausted": b.budget_exhausted,
            }));
            Ok((text, if b.budget_exhausted { 3 } else { 0 }))
        }
        CertCmd::Tree { rho, c, g_space, max_index, max_depth } => {
            match build_t_tree(&sequence(&rho)?, &rational(&c)?, &space(&g_space)?, max_index, max_depth, job.budget)? {
                Some(nodes) => ok(pretty(&json!({ "nodes": nodes }))),
                None => Err(Failure::Exhausted("tree exceeds the node budget".into())),
            }
        }
    }
}

fn run_transfer(cmd: TransferCmd, job: &Job) -> Res {
    match cmd {
        TransferCmd::Shift { cert, rho, zeta, l } => {
            let out = shift_certificate(&certificate(&cert)?, &ordinal(&zeta)?, l, &sequence(&rho)?)?;
            ok(pretty(&checked_json(&out)))
        }
        TransferCmd::Limit { rho, xi, r, certs } => {
            let cs = certs.iter().map(|p| certificate(p)).collect::<Result<Vec<_>, _>>()?;
            let out = limit_combine(&cs, &ordinal(&xi)?, &rational(&r)?, &sequence(&rho)?)?;
            ok(pretty(&checked_json(&out)))
        }
        TransferCmd::Sum { cert1, cert2, rho, r } => {
            let out = sum_combine(&certificate(&cert1)?, &certificate(&cert2)?, &rational(&r)?, &sequence(&rho)?, job.budget)?;
            ok(pretty(&checked_json(&out)))
        }
        TransferCmd::Merge { rho, base, extras, r } => {
            let es = extras.iter().map(|p| certificate(p)).collect::<Result<Vec<_>, _>>()?;
            let m = merge_subsequence_certificates(&certificate(&base)?, &es, &rational(&r)?, &sequence(&rho)?)?;
            ok(pretty(&json!({
                "K": m.k,
                "N": m.n,
                "base": checked_json(&m.base),
                "extras": m.extras.iter().map(checked_json).collect::<Vec<_>>(),
            })))
        }
        TransferCmd::Block { fam, blocks } => {
            let raw: Vec<Value> = json_file(&blocks)?;
            let vs = raw
                .iter()
                .map(|v| parse_vector(&v.to_string()))
                .collect::<Result<Vec<Vector>, _>>()?;
            let (out, _) = block_certificate(&family(&fam, None)?, &vs)?;
            ok(pretty(&checked_json(&out)))
        }
        TransferCmd::Frak { xs, eps, n } => {
            let eps = rational(&eps)?;
            let table = frak_table(&sequence(&xs)?, &eps, n)?;
            let sets: Vec<String> = table.iter().filter(|(_, nd)| nd.admits(&eps)).map(|(f, _)| f.to_string()).collect();
            ok(sets.join("\n"))
        }
        TransferCmd::Select { xs, xi, eps, phi, depth } => {
            let sel = wn_select(&sequence(&xs)?, &ordinal(&xi)?, &rational(&eps)?, &rational(&phi)?, depth)?;
            ok(pretty(&json!({
                "trace": serde_json::to_value(&sel.trace).expect("trace serializes"),
                "claim": checked_json(&sel.claim),
                "series": fmt_q(&sel.series),
                "series_limit": fmt_q(&sel.series_limit),
            })))
        }
    }
}

fn table_file(path: &Path) -> Result<SpreadingTable, Failure> {
    let j: SpreadingTableJson = json_file(path)?;
    Ok(SpreadingTable::from_json(&j)?)
}

fn direction_json(d: &Direction) -> Value {
    match d {
        Direction::Pass { detail } => json!({"status": "pass", "detail": detail}),
        Direction::Fail { detail } => json!({"status": "fail", "detail": detail}),
        Direction::Inconclusive { reason } => json!({"status": "inconclusive", "detail": reason}),
    }
}

fn run_spread(cmd: SpreadCmd, job: &Job) -> Res {
    match cmd {
        SpreadCmd::Estimate { seq, m, stages, l, base, probes } => {
            let src = if seq.trim_start().starts_with("basis(") && !seq.contains(';') {
                let inner = seq.trim().trim_start_matches("basis(").trim_end_matches(')');
                Source::Basis(space(inner)?)
            } else {
                Source::Finite(sequence(&seq)?)
            };
            let stages: Vec<u64> = stages
                .split(',')
                .map(|s| s.trim().parse().map_err(usage("stages")))
                .collect::<Result<_, _>>()?;
            let (probes, name) = match probes {
                Some(p) => (p.split(';').map(coefficients).collect::<Result<Vec<_>, _>>()?, "given"),
                None => (default_probes(m, DEFAULT_RANDOM_PROBES, job.seed), "default"),
            };
            let e = estimate_spreading(&src, &schedule(&l)?, m, &stages, base, &probes, name)?;
            ok(pretty(&json!({
                "tables": e.tables.iter().map(|t| serde_json::to_value(t.to_json()).expect("table serializes")).collect::<Vec<_>>(),
                "max_discrepancy": e.max_discrepancy,
                "stable": e.stable,
            })))
        }
        SpreadCmd::Exact { fam, a, l } => {
            let e = exact_spreading_combinatorial(&family(&fam, None)?, &schedule(&l)?, &coefficients(&a)?, DEFAULT_BASE)?;
            ok(fmt_q(&e.value))
        }
        SpreadCmd::Equiv { t1, t2 } => {
            let k = equivalence_constant(&table_file(&t1)?, &table_file(&t2)?)?;
            ok(match bound_json(&k, job.digits) {
                Value::String(s) => s,
                other => pretty(&other),
            })
        }
        SpreadCmd::Bridge { rho, g_xi, c, depth, schedule: s, r, tolerance } => {
            let mut search = search_opts(job, None, &s)?;
            search.schedule = schedule(&s)?;
            let opts = BridgeOptions {
                r: rational(&r)?,
                tolerance: rational(&tolerance)?,
                schedule: schedule(&s)?,
                search,
                seed: job.seed,
            };
            let rep = check_main2_bridge(&sequence(&rho)?, &ordinal(&g_xi)?, &rational(&c)?, depth, &opts)?;
            let fail = matches!(rep.cert_to_table, Direction::Fail { .. }) || matches!(rep.table_to_cert, Direction::Fail { .. });
            let text = pretty(&json!({
                "m": rep.m,
                "bridge_constant": fmt_q(&rep.bridge_constant),
                "cert_to_table": direction_json(&rep.cert_to_table),
                "table_to_cert": direction_json(&rep.table_to_cert),
            }));
            Ok((text, if fail { 2 } else { 0 }))
        }
    }
}

fn run_acceptance(suite: &str, list: bool, job: &Job) -> Res {
    if list {
        return ok(acceptance::suite_names().join("\n"));
    }
    let outcomes = acceptance::run_suite(suite, job.seed).ok_or_else(|| {
        Failure::Usage(format!("unknown suite {suite:?}; known: {}", acceptance::suite_names().join(", ")))
    })?;
    let text = acceptance::render(&outcomes);
    let failed = outcomes.iter().any(|o| !o.passed);
    Ok((text.trim_end().to_string(), if failed { 2 } else { 0 }))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let job = cli.job.clone();
    let res = match cli.cmd {
        Cmd::Ord(c) => run_ord(c),
        Cmd::Fam(c) => run_fam(c, &job),
        Cmd::Norm(c) => run_norm(c, &job),
        Cmd::Dominate(c) => run_dominate(c, &job),
        Cmd::Certify(c) => run_certify(c, &job),
        Cmd::Transfer(c) => run_transfer(c, &job),
        Cmd::Spread(c) => run_spread(c, &job),
        Cmd::Acceptance { suite, list } => run_acceptance(&suite, list, &job),
    };
    match res {
        Ok((text, code)) => {
            let text = format!("{text}\n");
            match &job.out {
                Some(p) => {
                    if let Err(e) = fs::write(p, text) {
                        eprintln!("error: {}: {e}", p.display());
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
