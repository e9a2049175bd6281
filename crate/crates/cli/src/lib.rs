//! The `cherw` driver: argument parsing, suite dispatch, caching and report output.

pub mod cache;
pub mod config;

use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use cherw_core::centers::{self, classify_findim, nu_to_lambda, verify_casimir_hc_with};
use cherw_core::cherednik::{build_universal, build_with_param, Corruption};
use cherw_core::exact::{int, scalar_to_string, Scalar};
use cherw_core::homog::completion_suite;
use cherw_core::liedata::{build_lie, LieKind};
use cherw_core::pairings::{compute_pairings_capped, pairings_suite_on, DeformationParam, PairingTable};
use cherw_core::pbw::{enveloping, PBWPresentation};
use cherw_core::poisson::poisson_suite;
use cherw_core::report::{sort_keys, VerificationReport, REPORT_SCHEMA_VERSION};
use cherw_core::wmin;

use cache::Cache;
use config::{ConfigError, Format, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "cherw", version, about = "Exact verification suites for infinitesimal Cherednik algebras and minimal W-algebras")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GlobalArgs {
    /// gl or sp
    #[arg(long, global = true)]
    kind: Option<String>,
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    m: Option<usize>,
    /// comma separated rationals c_0,c_1,...
    #[arg(long, global = true, allow_hyphen_values = true)]
    zeta: Option<String>,
    /// comma separated rationals λ_1,...,λ_n
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, global = true)]
    max_n: Option<usize>,
    #[arg(long, global = true)]
    max_m: Option<usize>,
    /// psi-1, psi0, upsilon-1 or upsilon-1-weighted
    #[arg(long, global = true)]
    case: Option<String>,
    /// json or text
    #[arg(long, global = true)]
    format: Option<String>,
    /// key=value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// cap on the pairing index j
    #[arg(long, global = true)]
    jmax: Option<usize>,
    /// cap on symmetrization degree
    #[arg(long, global = true)]
    sym_cap: Option<usize>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// write the report here instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// zero the per-entry wall times so reports are byte-identical across runs
    #[arg(long, global = true)]
    no_timings: bool,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Build H_m (universal ζ unless --zeta) and emit its rewrite table
    Build,
    /// Pairing table sanity suite
    Pairings,
    /// Poisson centrality suite
    PoissonCheck,
    /// Casimir element and Harish-Chandra image (gl)
    Center,
    /// Finite-dimensional classification test for λ
    Classify,
    /// Minimal W-algebra relation checks
    WminCheck,
    /// Homogenized map checks
    CompletionCheck,
    /// Every suite up to --max-n / --max-m
    All,
}

/// A finished run: the report plus extra top-level JSON fields.
pub struct Outcome {
    pub report: VerificationReport,
    pub extra: Vec<(String, Value)>,
}

impl Outcome {
    fn plain(report: VerificationReport) -> Self {
        Outcome { report, extra: Vec::new() }
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.report.to_json();
        if let Value::Object(map) = &mut v {
            for (k, x) in &self.extra {
                map.insert(k.clone(), x.clone());
            }
        }
        sort_keys(v)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.report.to_text();
        for (k, x) in &self.extra {
            out.push_str(&format!("{}: {}\n", k, x));
        }
        out
    }
}

fn merge_config(g: &GlobalArgs) -> Result<RunConfig, ConfigError> {
    let mut c = RunConfig::default();
    if let Some(path) = &g.config {
        c.apply_file(path)?;
    }
    if let Some(k) = &g.kind {
        c.kind = config::parse_kind(k)?;
    }
    if let Some(v) = g.n {
        c.n = v;
    }
    if let Some(v) = g.m {
        c.m = v;
    }
    if let Some(z) = &g.zeta {
        c.zeta = Some(config::parse_list(z)?);
    }
    if let Some(l) = &g.lambda {
        c.lambda = Some(config::parse_list(l)?);
    }
    if let Some(v) = g.max_n {
        c.max_n = v;
    }
    if let Some(v) = g.max_m {
        c.max_m = v;
    }
    if let Some(v) = &g.case {
        c.case = Some(v.clone());
    }
    if let Some(f) = &g.format {
        c.format = config::parse_format(f)?;
    }
    if let Some(v) = g.jmax {
        c.jmax_cap = v;
    }
    if let Some(v) = g.sym_cap {
        c.sym_cap = v;
    }
    if let Some(v) = &g.output {
        c.output = Some(v.clone());
    }
    if g.no_timings {
        c.timings = false;
    }
    c.validate()?;
    Ok(c)
}

/// Parses `argv` (program name first), runs, and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match merge_config(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("cherw: {}", e);
            return EXIT_USAGE;
        }
    };
    let cache = Cache::new(Cache::resolve_dir(cli.global.cache_dir.as_deref(), cfg.cache_dir.as_deref()));
    let outcome = match execute(cli.command, &cfg, &cache) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("cherw: {}", e);
            return EXIT_USAGE;
        }
    };
    let mut outcome = outcome;
    if !cfg.timings {
        for e in &mut outcome.report.entries {
            e.wall_ms = 0;
        }
    }
    let text = match cfg.format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&outcome.to_json()).expect("json")),
        Format::Text => outcome.to_text(),
    };
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("cherw: cannot write report: {}", e);
        return EXIT_USAGE;
    }
    if outcome.report.all_pass() {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn usage(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn scalars_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(|s| Value::String(scalar_to_string(s))).collect())
}

fn scalars_param(v: &[Scalar]) -> String {
    v.iter().map(scalar_to_string).collect::<Vec<_>>().join(",")
}

fn param_for(cfg: &RunConfig, c: &[Scalar]) -> Result<DeformationParam, ConfigError> {
    match cfg.kind {
        LieKind::Gl => centers::gl_param(cfg.n, cfg.m, c).map_err(|e| usage(e.to_string())),
        kind => Ok(DeformationParam::from_scalars(kind, cfg.n, c)),
    }
}

fn cached_pairings(cache: &Cache, kind: LieKind, n: usize, jmax: usize, cap: usize) -> Result<PairingTable, String> {
    cache
        .get_or_compute(
            "pairings",
            json!({ "kind": kind.name(), "n": n, "jmax": jmax }),
            || compute_pairings_capped(kind, n, jmax, cap).map_err(|e| e.to_string()),
            PairingTable::to_json,
            PairingTable::from_json,
        )
        .map(|(t, _)| t)
}

fn cached_presentation(cache: &Cache, cfg: &RunConfig) -> Result<PBWPresentation, String> {
    let zeta = cfg.zeta.as_deref().map(scalars_json).unwrap_or(Value::String("universal".into()));
    let params = json!({ "kind": cfg.kind.name(), "n": cfg.n, "m": cfg.m, "zeta": zeta });
    let compute = || -> Result<PBWPresentation, String> {
        let h = match &cfg.zeta {
            Some(c) => {
                let z = param_for(cfg, c).map_err(|e| e.0)?;
                build_with_param(cfg.kind, cfg.n, cfg.m, &z, Corruption::None)
            }
            None => build_universal(cfg.kind, cfg.n, cfg.m),
        };
        h.map(|h| h.presentation).map_err(|e| e.to_string())
    };
    cache
        .get_or_compute("presentation", params, compute, PBWPresentation::to_json, |v| PBWPresentation::from_json(v).ok())
        .map(|(p, _)| p)
}

fn failed_build(suite: &str, what: &str, err: String) -> VerificationReport {
    let mut r = VerificationReport::new(suite);
    r.check("build", what, || Err(err));
    r
}

fn execute(cmd: Command, cfg: &RunConfig, cache: &Cache) -> Result<Outcome, ConfigError> {
    match cmd {
        Command::Build => {
            let mut rep = VerificationReport::new("build").param("kind", cfg.kind).param("n", cfg.n).param("m", cfg.m);
            if let Some(z) = &cfg.zeta {
                rep = rep.param("zeta", scalars_param(z));
            }
            match cached_presentation(cache, cfg) {
                Ok(p) => {
                    let mut c = p.consistency_check(3);
                    c.suite = "consistency".into();
                    rep.merge(c);
                    Ok(Outcome { report: rep, extra: vec![("presentation".into(), p.to_json())] })
                }
                Err(e) => Ok(Outcome::plain({
                    rep.check("build", "presentation", || Err(e));
                    rep
                })),
            }
        }
        Command::Pairings => {
            let jmax = cfg.m.max(1).min(cfg.jmax_cap);
            let rep = match cached_pairings(cache, cfg.kind, cfg.n, jmax, cfg.jmax_cap) {
                Ok(t) => pairings_suite_on(t, false),
                Err(e) => failed_build("pairings", "pairing table", e),
            };
            Ok(Outcome::plain(rep))
        }
        Command::PoissonCheck => Ok(Outcome::plain(poisson_suite(cfg.kind, cfg.n, cfg.m))),
        Command::Center => {
            if cfg.kind != LieKind::Gl {
                return Err(usage("center is defined for --kind gl"));
            }
            let zeta = match &cfg.zeta {
                Some(c) => param_for(cfg, c)?,
                None => DeformationParam::universal(LieKind::Gl, cfg.n, cfg.m),
            };
            let mut rep = verify_casimir_hc_with(cfg.n, cfg.m, &zeta, false);
            if let Some(c) = &cfg.zeta {
                rep = rep.param("zeta", scalars_param(c));
            }
            let mut extra = Vec::new();
            if let Ok(h) = build_with_param(LieKind::Gl, cfg.n, cfg.m, &zeta, Corruption::None) {
                if let Ok(t) = centers::casimir(&h) {
                    let max_deg = t.terms().map(|(mono, _)| mono.iter().map(|&(_, e)| e as i64).sum::<i64>()).max().unwrap_or(0);
                    extra.push(("t1_prime".into(), json!({ "terms": t.num_terms(), "max_word_length": max_deg })));
                }
            }
            Ok(Outcome { report: rep, extra })
        }
        Command::Classify => classify(cfg),
        Command::WminCheck => {
            let mut rep = VerificationReport::new("wmin").param("kind", cfg.kind).param("n", cfg.n);
            match cfg.kind {
                LieKind::Gl => {
                    if cfg.n < 2 {
                        return Err(usage("wmin-check for gl needs --n 2 or more"));
                    }
                    rep.merge(wmin::verify_explicit_gl(cfg.n));
                }
                _ => rep.merge(wmin::verify_explicit_sp(cfg.n)),
            }
            rep.merge(wmin::verify_consistency(cfg.kind, cfg.n));
            Ok(Outcome::plain(rep))
        }
        Command::CompletionCheck => {
            let case = cfg.case.as_deref().ok_or_else(|| usage("completion-check needs --case"))?;
            if !["psi-1", "psi0", "upsilon-1", "upsilon-1-weighted"].contains(&case) {
                return Err(usage(format!("unknown case '{}'", case)));
            }
            Ok(Outcome::plain(completion_suite(case, cfg.n)))
        }
        Command::All => Ok(Outcome::plain(run_all(cfg, cache))),
    }
}

fn classify(cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let zeta = cfg.zeta.clone().ok_or_else(|| usage("classify needs --zeta"))?;
    let lambda = cfg.lambda.clone().ok_or_else(|| usage("classify needs --lambda"))?;
    let mut rep = VerificationReport::new("classify")
        .param("kind", "gl")
        .param("n", cfg.n)
        .param("m", cfg.m)
        .param("zeta", scalars_param(&zeta))
        .param("lambda", scalars_param(&lambda));
    let class = match classify_findim(cfg.n, cfg.m, &zeta, &lambda) {
        Ok(c) => c,
        Err(e @ centers::CenterError::NotDominant(_)) | Err(e @ centers::CenterError::Invalid(_)) => {
            return Err(usage(e.to_string()))
        }
        Err(e) => return Ok(Outcome::plain(failed_build("classify", "classification", e.to_string()))),
    };
    let result = match &class {
        None => json!({ "finite_dimensional": false }),
        Some(c) => {
            rep.check("round trip", "λ̄ → ν̄ → λ̄", || match nu_to_lambda(cfg.n, cfg.m, &zeta, c) {
                Ok(back) if back == lambda => Ok(()),
                Ok(back) => Err(format!("got {}", scalars_param(&back))),
                Err(e) => Err(e.to_string()),
            });
            json!({
                "finite_dimensional": true,
                "k": c.k,
                "nu": scalars_json(&c.nu),
                "roots": { "rational": scalars_json(&c.roots.rational), "residual": scalars_json(&c.roots.residual) },
            })
        }
    };
    Ok(Outcome { report: rep, extra: vec![("result".into(), result)] })
}

type Job<'a> = Box<dyn FnOnce() -> VerificationReport + Send + 'a>;

/// Runs jobs on a small worker pool; results keep the job order.
pub fn run_parallel(jobs: Vec<Job<'_>>) -> Vec<VerificationReport> {
    let n = jobs.len();
    let slots: Vec<Mutex<Option<Job<'_>>>> = jobs.into_iter().map(|j| Mutex::new(Some(j))).collect();
    let results: Vec<Mutex<Option<VerificationReport>>> = (0..n).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1).min(n.max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let job = slots[i].lock().unwrap().take().expect("job taken once");
                *results[i].lock().unwrap() = Some(job());
            });
        }
    });
    results.into_iter().map(|r| r.into_inner().unwrap().expect("job ran")).collect()
}

fn renamed(mut r: VerificationReport, name: String) -> VerificationReport {
    r.suite = name;
    r
}

fn all_jobs<'a>(cfg: &'a RunConfig, cache: &'a Cache) -> Vec<Job<'a>> {
    let (max_n, max_m) = (cfg.max_n, cfg.max_m);
    let jmax = 4.min(cfg.jmax_cap);
    let mut jobs: Vec<Job<'a>> = Vec::new();
    for kind in [LieKind::Gl, LieKind::Sp] {
        for n in 1..=max_n {
            jobs.push(Box::new(move || match build_lie(kind, n) {
                Ok(l) => renamed(enveloping(&l).consistency_check(3), format!("pbw-U-{}-{}", kind, n)),
                Err(e) => failed_build("pbw", "Lie algebra", e.to_string()),
            }));
            for m in 1..=max_m {
                jobs.push(Box::new(move || match build_universal(kind, n, m) {
                    Ok(h) => renamed(h.presentation.consistency_check(3), format!("pbw-H-{}-{}-{}", kind, n, m)),
                    Err(e) => failed_build("pbw", "Cherednik algebra", e.to_string()),
                }));
                jobs.push(Box::new(move || renamed(poisson_suite(kind, n, m), format!("poisson-{}-{}-{}", kind, n, m))));
                // the gl slice lives in sl_{n+m}, which needs m >= 2
                if kind == LieKind::Sp || m >= 2 {
                    jobs.push(Box::new(move || {
                        renamed(centers::verify_slice_identities(kind, n, m), format!("slice-{}-{}-{}", kind, n, m))
                    }));
                }
            }
            jobs.push(Box::new(move || {
                let name = format!("pairings-{}-{}", kind, n);
                match cached_pairings(cache, kind, n, jmax, cfg.jmax_cap) {
                    Ok(t) => renamed(pairings_suite_on(t, false), name),
                    Err(e) => failed_build(&name, "pairing table", e),
                }
            }));
        }
    }
    for n in 1..=max_n {
        for m in 1..=max_m {
            jobs.push(Box::new(move || renamed(centers::verify_casimir_hc(n, m), format!("casimir-{}-{}", n, m))));
        }
    }
    jobs.push(Box::new(move || renamed(centers::verify_eq1(max_n, max_m + 1), "eq1".into())));
    jobs.push(Box::new(move || renamed(centers::verify_twist_lemma(max_n, 4), "twist".into())));
    jobs.push(Box::new(|| {
        let cfg = RunConfig { n: 1, m: 1, zeta: Some(vec![int(0)]), lambda: Some(vec![int(1)]), ..RunConfig::default() };
        match classify(&cfg) {
            Ok(o) => {
                let mut r = o.report;
                let k = o.extra.iter().find(|(k, _)| k == "result").and_then(|(_, v)| v.get("k").cloned());
                r.check("k", "classification example k = 3", || if k == Some(json!(3)) { Ok(()) } else { Err(format!("k = {:?}", k)) });
                r
            }
            Err(e) => failed_build("classify", "classification", e.0),
        }
    }));
    for n in 2..=max_n + 1 {
        jobs.push(Box::new(move || renamed(wmin::verify_explicit_gl(n), format!("wmin-gl-{}", n))));
    }
    for n in 1..=max_n {
        jobs.push(Box::new(move || renamed(wmin::verify_explicit_sp(n), format!("wmin-sp-{}", n))));
    }
    for n in 2..=max_n.max(2) {
        for case in ["psi-1", "psi0"] {
            jobs.push(Box::new(move || renamed(completion_suite(case, n), format!("completion-{}-{}", case, n))));
        }
    }
    for n in 1..=max_n {
        jobs.push(Box::new(move || renamed(completion_suite("upsilon-1", n), format!("completion-upsilon-1-{}", n))));
    }
    jobs
}

fn run_all(cfg: &RunConfig, cache: &Cache) -> VerificationReport {
    let mut rep = VerificationReport::new("all").param("max_n", cfg.max_n).param("max_m", cfg.max_m);
    for r in run_parallel(all_jobs(cfg, cache)) {
        rep.merge(r);
    }
    rep
}

/// Report JSON schema version, re-exported for consumers of the CLI output.
pub fn schema_version() -> u32 {
    REPORT_SCHEMA_VERSION
}
