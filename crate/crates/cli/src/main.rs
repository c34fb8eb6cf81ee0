//! `depthwork`: relational depth of transformation-monoid ideals from the
//! command line.
//!
//! Exit codes: 0 success, 1 disagreement, inconclusive result or failed
//! mathematical precondition, 2 usage error.

mod manifest;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use depthwork::depth::{reconcile, Computed, DepthOptions, DepthReport};
use depthwork::derivation::{
    apply_rule, bounded_invariance, check, counterexample, equalize_pairs, reduce_triple,
    reduce_word, split_high_rank, triple_to_pair, Derivation, InvarianceBudget, RuleKind,
    RuleParams,
};
use depthwork::green::{ideal_elements, IdealSpec};
use depthwork::presentation::{
    cayley, defines, enumerate, knuth_bendix, restriction, Budgets, Presentation,
};
use depthwork::transform::{Family, PartialMap};
use depthwork::Error;

use manifest::{sha256_hex, RunManifest};

const BUDGET_ENV: &str = "DEPTHWORK_BUDGET_MB";

#[derive(Parser, Debug)]
#[command(
    name = "depthwork",
    version,
    about = "Relational depth of ideals of PT_n, T_n and I_n"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Exit 0 even when some verdict is inconclusive.
    #[arg(long, global = true)]
    allow_inconclusive: bool,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write a run manifest (JSON) here.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Formula, computed and multiplication depth for each ideal.
    DepthTable(DepthTableArgs),
    /// Whether a presentation defines an ideal.
    Defines(PresArgs),
    /// Print the Cayley presentation of an ideal or one of its restrictions.
    Present(IdealArgs),
    /// Run coset-style enumeration on a presentation.
    Enumerate(PresArgs),
    /// Run Knuth-Bendix completion on a presentation.
    Kb(PresArgs),
    /// Produce or check a derivation certificate.
    Derive(DeriveArgs),
    /// Lower-bound witness pair and its bounded invariance report.
    Counterexample(CounterArgs),
    /// J-classes of a monoid or ideal.
    Jclasses(JclassArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
struct BudgetArgs {
    /// Live-class cap for enumeration (default: ten times the ideal size).
    #[arg(long, alias = "size-budget")]
    size: Option<usize>,
    /// Rule cap for completion.
    #[arg(long, alias = "kb-budget")]
    kb_rules: Option<usize>,
    /// Skip enumeration.
    #[arg(long)]
    no_enum: bool,
    /// Skip completion.
    #[arg(long)]
    no_kb: bool,
}

#[derive(Args, Debug, Serialize)]
struct DepthTableArgs {
    #[arg(long, value_delimiter = ',', default_value = "I,T,PT")]
    families: Vec<Family>,
    #[arg(long, default_value_t = 3)]
    n_min: usize,
    #[arg(long)]
    n_max: usize,
    /// Leave out the whole monoid (m = n).
    #[arg(long)]
    proper: bool,
    /// Also write the rows as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Emit full JSON reports instead of CSV.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug, Serialize)]
struct IdealArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Restriction index: keep elements of rank at least `i`.
    #[arg(long)]
    i: Option<usize>,
    /// Output format; JSON is the only one.
    #[arg(long, value_parser = ["json"], default_value = "json")]
    emit: String,
}

#[derive(Args, Debug, Serialize)]
struct PresArgs {
    #[command(flatten)]
    ideal: IdealArgs,
    /// Read the presentation from a JSON file instead of building it.
    #[arg(long)]
    presentation: Option<PathBuf>,
    #[command(flatten)]
    budget: BudgetArgs,
}

#[derive(Args, Debug, Serialize)]
struct DeriveArgs {
    /// JSON request: an operation and its inputs.
    #[arg(long, required_unless_present_any = ["check", "op"], conflicts_with = "op")]
    request: Option<PathBuf>,
    /// Operation, with the maps read from `--input`.
    #[arg(long, requires_all = ["family", "n", "m", "r", "input"])]
    op: Option<String>,
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    /// JSON object holding the maps (`alpha`, `beta`, ..., or `word`).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Check an existing derivation file instead.
    #[arg(long)]
    check: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct CounterArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    r: usize,
    /// Step bound for the invariance search; 0 skips it.
    #[arg(long, default_value_t = 6)]
    depth: usize,
    #[arg(long, default_value_t = 400_000)]
    max_states: usize,
    #[arg(long, default_value_t = 400)]
    walks: usize,
}

#[derive(Args, Debug, Serialize)]
struct JclassArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    /// Ideal bound; defaults to n.
    #[arg(long)]
    m: Option<usize>,
    /// List the elements of each class.
    #[arg(long)]
    elements: bool,
    /// Accepted for symmetry with other commands; output is always JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
enum DeriveRequest {
    ApplyRule {
        family: Family,
        n: usize,
        m: usize,
        r: usize,
        rule: String,
        alpha: PartialMap,
        beta: PartialMap,
        #[serde(default)]
        params: RuleParams,
    },
    Equalize {
        family: Family,
        n: usize,
        m: usize,
        r: usize,
        alpha: PartialMap,
        beta: PartialMap,
        gamma: PartialMap,
        delta: PartialMap,
    },
    ReduceTriple {
        family: Family,
        n: usize,
        m: usize,
        r: usize,
        alpha: PartialMap,
        beta: PartialMap,
        gamma: PartialMap,
    },
    TripleToPair {
        family: Family,
        n: usize,
        m: usize,
        r: usize,
        alpha: PartialMap,
        beta: PartialMap,
        gamma: PartialMap,
    },
    SplitHighRank {
        family: Family,
        n: usize,
        m: usize,
        r: usize,
        gamma: PartialMap,
        delta: PartialMap,
    },
    ReduceWord {
        family: Family,
        n: usize,
        m: usize,
        r: usize,
        word: Vec<PartialMap>,
    },
}

/// Outcome of a command: primary output, a one-line summary and exit code.
struct Done {
    output: Vec<u8>,
    summary: String,
    code: u8,
    budgets: Option<Budgets>,
}

/// Failures, split by exit code.
enum Fail {
    Usage(String),
    Math(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Usage(_) => Fail::Usage(e.to_string()),
            _ => Fail::Math(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Fail {
    fn from(e: anyhow::Error) -> Self {
        Fail::Usage(format!("{e:#}"))
    }
}

type Res<T> = std::result::Result<T, Fail>;

fn budget_mb() -> Res<Option<u64>> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| {
            Fail::Usage(format!(
                "{BUDGET_ENV} must be a whole number of megabytes, got `{v}`"
            ))
        }),
        Err(_) => Ok(None),
    }
}

/// Engine budgets from flags, capped by the memory budget when set. A live
/// enumeration class costs one `u32` per generator; a rewriting rule about
/// 64 bytes.
fn budgets(args: &BudgetArgs, mb: Option<u64>, alphabet: usize) -> Budgets {
    let mut b = Budgets {
        size: args.size,
        run_enumeration: !args.no_enum,
        run_kb: !args.no_kb,
        ..Budgets::default()
    };
    if let Some(k) = args.kb_rules {
        b.kb_rules = k;
    }
    if let Some(mb) = mb {
        let bytes = mb.saturating_mul(1 << 20) as usize;
        let cap = bytes / (4 * alphabet.max(1) + 16);
        b.size = Some(b.size.map_or(cap, |s| s.min(cap)));
        b.kb_rules = b.kb_rules.min(bytes / 64);
    }
    b
}

fn spec_of(family: Family, n: usize, m: usize) -> Res<IdealSpec> {
    IdealSpec::new(family, n, m).map_err(|e| Fail::Usage(e.to_string()))
}

fn to_json<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serialisable");
    s.push(b'\n');
    s
}

fn read(path: &Path) -> Res<String> {
    Ok(fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)
}

fn agree_cell(r: &DepthReport) -> &'static str {
    match r.agree {
        Some(true) => "true",
        Some(false) => "false",
        None => "inconclusive",
    }
}

fn csv_rows(reports: &[DepthReport]) -> String {
    let mut s = String::from("family,n,m,formula,computed,multiplication,agree\n");
    for r in reports {
        let computed = match &r.computed {
            Computed::Depth { depth, .. } => depth.to_string(),
            Computed::Inconclusive { at, .. } => format!("inconclusive@{at}"),
        };
        let opt = |v: Option<usize>| v.map_or("-".to_string(), |x| x.to_string());
        s.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.spec.fam,
            r.spec.n,
            r.spec.m,
            opt(r.formula),
            computed,
            opt(r.multiplication),
            agree_cell(r)
        ));
    }
    s
}

fn cmd_depth_table(a: &DepthTableArgs, cli: &Cli) -> Res<Done> {
    if a.n_min < 3 || a.n_max < 3 {
        return Err(Fail::Usage(
            "the depth formula needs n ≥ 3; use --n-min/--n-max of at least 3".into(),
        ));
    }
    if a.n_max > 6 {
        return Err(Fail::Usage("n above 6 is beyond desk scale".into()));
    }
    let mb = budget_mb()?;
    let mut cells = Vec::new();
    for &fam in &a.families {
        for n in a.n_min..=a.n_max {
            let top = if a.proper { n - 1 } else { n };
            for m in fam.epsilon()..=top {
                cells.push(spec_of(fam, n, m)?);
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs.max(1))
        .build()
        .map_err(|e| Fail::Usage(e.to_string()))?;
    let reports: Vec<depthwork::Result<DepthReport>> = pool.install(|| {
        cells
            .par_iter()
            .map(|spec| {
                let size = ideal_elements(spec).len();
                let opts = DepthOptions {
                    budgets: budgets(&a.budget, mb, size),
                    jobs: 1,
                };
                reconcile(spec, &opts)
            })
            .collect()
    });
    let reports = reports.into_iter().collect::<depthwork::Result<Vec<_>>>()?;
    let csv = csv_rows(&reports);
    if let Some(p) = &a.csv {
        fs::write(p, &csv).with_context(|| format!("writing {}", p.display()))?;
    }
    let disagree = reports.iter().filter(|r| r.agree == Some(false)).count();
    let inconclusive = reports.iter().filter(|r| r.agree.is_none()).count();
    let code = u8::from(disagree > 0 || (inconclusive > 0 && !cli.allow_inconclusive));
    Ok(Done {
        budgets: None,
        output: if a.json {
            to_json(&reports)
        } else {
            csv.into_bytes()
        },
        summary: format!(
            "{} rows, {} agree, {disagree} disagree, {inconclusive} inconclusive",
            reports.len(),
            reports.len() - disagree - inconclusive
        ),
        code,
    })
}

fn load_presentation(a: &PresArgs) -> Res<(IdealSpec, Presentation)> {
    let spec = spec_of(a.ideal.family, a.ideal.n, a.ideal.m)?;
    let p = match (&a.presentation, a.ideal.i) {
        (Some(path), _) => serde_json::from_str(&read(path)?)
            .map_err(|e| Fail::Usage(format!("malformed presentation {}: {e}", path.display())))?,
        (None, Some(i)) => restriction(&spec, i).map_err(|e| Fail::Usage(e.to_string()))?,
        (None, None) => cayley(&spec),
    };
    Ok((spec, p))
}

fn cmd_defines(a: &PresArgs, cli: &Cli) -> Res<Done> {
    let (spec, p) = load_presentation(a)?;
    let b = budgets(&a.budget, budget_mb()?, p.alphabet_len());
    let v = defines(&p, &spec, &b)?;
    let code = u8::from(v.is_inconclusive() && !cli.allow_inconclusive);
    Ok(Done {
        budgets: Some(b),
        summary: format!("{spec}: {}", v.short()),
        output: to_json(&v),
        code,
    })
}

fn cmd_present(a: &IdealArgs) -> Res<Done> {
    let spec = spec_of(a.family, a.n, a.m)?;
    let p = match a.i {
        Some(i) => restriction(&spec, i).map_err(|e| Fail::Usage(e.to_string()))?,
        None => cayley(&spec),
    };
    Ok(Done {
        budgets: None,
        summary: format!(
            "{} generators, {} relations",
            p.generators.len(),
            p.relations.len()
        ),
        output: to_json(&p),
        code: 0,
    })
}

fn cmd_enumerate(a: &PresArgs, cli: &Cli) -> Res<Done> {
    let (spec, p) = load_presentation(a)?;
    let b = budgets(&a.budget, budget_mb()?, p.alphabet_len());
    let target = ideal_elements(&spec).len();
    let t = enumerate(&p, b.enum_budget(target));
    let closed = t.is_closed();
    let out = json!({
        "status": t.status,
        "classes": if closed { Some(t.class_count) } else { None },
        "definitions": t.definitions,
        "peak_live": t.peak_live,
        "ideal_size": target,
    });
    Ok(Done {
        budgets: Some(b),
        summary: format!("{:?}, {} classes", t.status, t.class_count),
        output: to_json(&out),
        code: u8::from(!closed && !cli.allow_inconclusive),
    })
}

fn cmd_kb(a: &PresArgs, cli: &Cli) -> Res<Done> {
    let (spec, p) = load_presentation(a)?;
    let b = budgets(&a.budget, budget_mb()?, p.alphabet_len());
    let kb = knuth_bendix(&p, b.kb_rules);
    let conf = kb.is_confluent();
    let out = json!({
        "status": kb.status,
        "rules": kb.rules.len(),
        "normal_forms": if conf { Some(kb.count_normal_forms().to_string()) } else { None },
        "ideal_size": ideal_elements(&spec).len(),
    });
    Ok(Done {
        budgets: Some(b),
        summary: format!("{:?} with {} rules", kb.status, kb.rules.len()),
        output: to_json(&out),
        code: u8::from(!conf && !cli.allow_inconclusive),
    })
}

fn lemma_range(spec: &IdealSpec, r: usize) -> Res<()> {
    let top = 2 * spec.m as i64 - spec.n as i64 - 1;
    if r < spec.epsilon() || r as i64 > top {
        return Err(Fail::Math(format!(
            "r = {r} outside the lemma range {} ≤ r ≤ 2m - n - 1 = {top}",
            spec.epsilon()
        )));
    }
    Ok(())
}

fn run_request(req: DeriveRequest) -> Res<Derivation> {
    use DeriveRequest::*;
    let d = match req {
        ApplyRule {
            family,
            n,
            m,
            r,
            rule,
            alpha,
            beta,
            params,
        } => {
            let spec = spec_of(family, n, m)?;
            lemma_range(&spec, r)?;
            let kind: RuleKind = rule.parse()?;
            if kind.family() != family {
                return Err(Fail::Usage(format!(
                    "rule {kind} is for family {}",
                    kind.family()
                )));
            }
            apply_rule(kind, &alpha, &beta, &params)?.2
        }
        Equalize {
            family,
            n,
            m,
            r,
            alpha,
            beta,
            gamma,
            delta,
        } => {
            let spec = spec_of(family, n, m)?;
            lemma_range(&spec, r)?;
            equalize_pairs(family, &alpha, &beta, &gamma, &delta, r)?
        }
        ReduceTriple {
            family,
            n,
            m,
            r,
            alpha,
            beta,
            gamma,
        } => {
            let spec = spec_of(family, n, m)?;
            lemma_range(&spec, r)?;
            reduce_triple(&spec, &alpha, &beta, &gamma, r)?.1
        }
        TripleToPair {
            family,
            n,
            m,
            r,
            alpha,
            beta,
            gamma,
        } => {
            let spec = spec_of(family, n, m)?;
            lemma_range(&spec, r)?;
            triple_to_pair(&spec, &alpha, &beta, &gamma, r)?.2
        }
        SplitHighRank {
            family,
            n,
            m,
            r,
            gamma,
            delta,
        } => {
            let spec = spec_of(family, n, m)?;
            lemma_range(&spec, r)?;
            split_high_rank(&spec, &gamma, &delta, r)?.2
        }
        ReduceWord {
            family,
            n,
            m,
            r,
            word,
        } => {
            let spec = spec_of(family, n, m)?;
            lemma_range(&spec, r)?;
            reduce_word(&spec, &word, r)?.2
        }
    };
    Ok(d)
}

fn cmd_derive(a: &DeriveArgs) -> Res<Done> {
    if let Some(path) = &a.check {
        let d: Derivation = serde_json::from_str(&read(path)?)
            .map_err(|e| Fail::Usage(format!("malformed derivation {}: {e}", path.display())))?;
        let (summary, code, report) = match check(&d) {
            Ok(()) => (
                "derivation checks".to_string(),
                0,
                json!({"valid": true, "steps": d.len()}),
            ),
            Err(f) => (
                format!("derivation fails at {f}"),
                1,
                json!({"valid": false, "failure": f.to_string()}),
            ),
        };
        return Ok(Done {
            budgets: None,
            output: to_json(&report),
            summary,
            code,
        });
    }
    let path = a
        .request
        .as_ref()
        .or(a.input.as_ref())
        .expect("clap requires a request");
    let mut v: Value = serde_json::from_str(&read(path)?)
        .map_err(|e| Fail::Usage(format!("malformed request {}: {e}", path.display())))?;
    if let Some(op) = &a.op {
        let obj = v
            .as_object_mut()
            .ok_or_else(|| Fail::Usage(format!("{} must hold a JSON object", path.display())))?;
        obj.insert("op".into(), json!(op));
        obj.insert("family".into(), json!(a.family));
        obj.insert("n".into(), json!(a.n));
        obj.insert("m".into(), json!(a.m));
        obj.insert("r".into(), json!(a.r));
    }
    let req: DeriveRequest = serde_json::from_value(v)
        .map_err(|e| Fail::Usage(format!("malformed request {}: {e}", path.display())))?;
    let d = run_request(req)?;
    check(&d).map_err(|f| Fail::Math(format!("produced derivation fails to check: {f}")))?;
    Ok(Done {
        budgets: None,
        summary: format!("{} steps, window {:?}", d.len(), d.window),
        output: to_json(&d),
        code: 0,
    })
}

fn cmd_counterexample(a: &CounterArgs, cli: &Cli) -> Res<Done> {
    if a.n == 0 || a.n > depthwork::transform::MAX_N {
        return Err(Fail::Usage(format!(
            "n must lie in 1..={}",
            depthwork::transform::MAX_N
        )));
    }
    let (alpha, beta) = counterexample(a.family, a.n, a.m, a.r)?;
    let ab = alpha.then(&beta);
    let bb = beta.then(&beta);
    let abb = ab.then(&beta);
    let identities = ab == bb && bb == abb && ab.rank() + 1 == a.r;
    let report = if a.depth > 0 {
        let budget = InvarianceBudget {
            max_states: a.max_states,
            walks: a.walks,
            seed: cli.seed,
        };
        Some(bounded_invariance(
            a.family, a.n, a.m, a.r, a.depth, budget,
        )?)
    } else {
        None
    };
    let held = report
        .as_ref()
        .is_none_or(|r| r.invariant_held && !r.forbidden_reached);
    let out = json!({
        "family": a.family,
        "n": a.n,
        "m": a.m,
        "r": a.r,
        "alpha": alpha,
        "beta": beta,
        "alpha_beta": ab,
        "beta_beta": bb,
        "alpha_beta_beta": abb,
        "product_rank": ab.rank(),
        "identities_hold": identities,
        "invariance": report,
    });
    Ok(Done {
        budgets: None,
        summary: format!("identities {identities}, invariance held {held}"),
        output: to_json(&out),
        code: u8::from(!(identities && held)),
    })
}

fn cmd_jclasses(a: &JclassArgs) -> Res<Done> {
    let spec = spec_of(a.family, a.n, a.m.unwrap_or(a.n))?;
    let chain = ideal_elements(&spec);
    let classes: Vec<Value> = chain
        .classes
        .iter()
        .map(|c| {
            let images: std::collections::BTreeSet<u32> =
                c.elements.iter().map(|f| f.image_mask()).collect();
            let kernels: std::collections::BTreeSet<_> = c
                .elements
                .iter()
                .map(|f| (f.domain_mask(), f.kernel_signature()))
                .collect();
            let mut v = json!({
                "rank": c.rank,
                "count": c.count,
                "l_classes": images.len(),
                "r_classes": kernels.len(),
            });
            if a.elements {
                v["elements"] = json!(c.elements.iter().map(|f| f.to_string()).collect::<Vec<_>>());
            }
            v
        })
        .collect();
    Ok(Done {
        budgets: None,
        summary: format!(
            "{spec}: {} elements in {} classes",
            chain.len(),
            classes.len()
        ),
        output: to_json(&json!({ "spec": spec, "size": chain.len(), "classes": classes })),
        code: 0,
    })
}

fn dispatch(cli: &Cli) -> Res<Done> {
    match &cli.command {
        Command::DepthTable(a) => cmd_depth_table(a, cli),
        Command::Defines(a) => cmd_defines(a, cli),
        Command::Present(a) => cmd_present(a),
        Command::Enumerate(a) => cmd_enumerate(a, cli),
        Command::Kb(a) => cmd_kb(a, cli),
        Command::Derive(a) => cmd_derive(a),
        Command::Counterexample(a) => cmd_counterexample(a, cli),
        Command::Jclasses(a) => cmd_jclasses(a),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::DepthTable(_) => "depth-table",
        Command::Defines(_) => "defines",
        Command::Present(_) => "present",
        Command::Enumerate(_) => "enumerate",
        Command::Kb(_) => "kb",
        Command::Derive(_) => "derive",
        Command::Counterexample(_) => "counterexample",
        Command::Jclasses(_) => "jclasses",
    }
}

fn emit(cli: &Cli, bytes: &[u8]) -> anyhow::Result<()> {
    match &cli.out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let t = Instant::now();
    let (code, summary, output, used) = match dispatch(&cli) {
        Ok(done) => {
            if let Err(e) = emit(&cli, &done.output) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            eprintln!("{}", done.summary);
            (done.code, done.summary, done.output, done.budgets)
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            (2, msg, Vec::new(), None)
        }
        Err(Fail::Math(msg)) => {
            eprintln!("error: {msg}");
            (1, msg, Vec::new(), None)
        }
    };
    if let Some(path) = &cli.manifest {
        let m = RunManifest {
            command: command_name(&cli.command).into(),
            parameters: json!({ "args": &cli.command, "seed": cli.seed, "jobs": cli.jobs }),
            budgets: used,
            budget_mb: budget_mb().ok().flatten(),
            tool_version: env!("CARGO_PKG_VERSION"),
            wall_ms: t.elapsed().as_millis(),
            summary,
            exit_code: code as i32,
            output_sha256: sha256_hex(&output),
        };
        if let Err(e) = fs::write(path, to_json(&m)) {
            eprintln!("error: writing manifest {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
