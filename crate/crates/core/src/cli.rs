//! Command-line front end. Every command prints one JSON document on
//! standard output.
//!
//! Exit codes: 0 success, 1 domain error (`{"error": code, "detail": ..}`),
//! 2 usage error, 3 interrupted scan that can be resumed.

use std::ffi::OsString;
use std::io::Write;
use std::ops::ControlFlow;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use crate::bottsamelson::{build_model, image_dimension, BsError};
use crate::cache::{cartan_key, Cache};
use crate::charcalc::{bwb_report, euler_char_bs, CharError, CohomologyProfile};
use crate::descent::scan::{f4_scan, ScanConfig, ScanError, ScanMode, DEFAULT_BATCH};
use crate::descent::{CertifyOutcome, DescentError, Engine, EngineConfig, H1Answer, DEFAULT_BUDGET};
use crate::dynkin::{classify, CartanData, TypeLabel};
use crate::io::{cartan_from_file, cartan_from_type, parse_degrees, parse_word, word_to_json, ParseError};
use crate::lattice::DivisorClass;
use crate::repro::{run_suite, SUITES};
use crate::weyl::{generate_roots, RootSystem, WeylElement, WeylError, WeylTable, BFS_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERRUPTED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "flagcalc", version, about = "Root systems, flag manifold cohomology and Bott-Samelson descent")]
pub struct RunConfig {
    /// Do not read or write the on-disk cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Worker threads for parallel commands.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct CartanSource {
    /// Builtin type such as A2, B3, F4.
    #[arg(long = "type", value_name = "TYPE")]
    pub type_name: Option<String>,
    /// File holding a Cartan matrix (JSON rows or whitespace rows).
    #[arg(long, value_name = "FILE")]
    pub cartan: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ElementSource {
    /// The longest element.
    #[arg(long)]
    pub longest: bool,
    /// The element of a word, 1-based comma-separated letters.
    #[arg(long, value_name = "WORD", allow_hyphen_values = true)]
    pub element: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Sample,
    Range,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Root counts, or the positive roots in full.
    Roots {
        #[command(flatten)]
        cartan: CartanSource,
        /// Only print the counts.
        #[arg(long)]
        count: bool,
    },
    /// Order of the Weyl group.
    WeylOrder {
        #[command(flatten)]
        cartan: CartanSource,
    },
    /// Length and a reduced word of the longest element.
    Longest {
        #[command(flatten)]
        cartan: CartanSource,
    },
    /// Number of reduced words of an element.
    ReducedCount {
        #[command(flatten)]
        cartan: CartanSource,
        #[command(flatten)]
        element: ElementSource,
    },
    /// Reduced words of an element in lexicographic order.
    ReducedList {
        #[command(flatten)]
        cartan: CartanSource,
        #[command(flatten)]
        element: ElementSource,
        /// 0-based rank of the first word.
        #[arg(long, default_value_t = 0)]
        start: u128,
        #[arg(long, default_value_t = 1000)]
        limit: u64,
    },
    /// Cohomology of a line bundle on the flag manifold.
    Cohomology {
        #[command(flatten)]
        cartan: CartanSource,
        #[arg(long, allow_hyphen_values = true)]
        degrees: String,
        /// Also print the dominant representative and its length.
        #[arg(long)]
        detail: bool,
    },
    /// Euler characteristic of a pulled-back line bundle on a tower.
    EulerBs {
        #[command(flatten)]
        cartan: CartanSource,
        #[arg(long)]
        word: String,
        #[arg(long, allow_hyphen_values = true)]
        degrees: String,
    },
    /// Intersection data of the tower of a word.
    BsModel {
        #[command(flatten)]
        cartan: CartanSource,
        #[arg(long)]
        word: String,
        /// Pull back this class and test nefness.
        #[arg(long, allow_hyphen_values = true)]
        degrees: Option<String>,
    },
    /// Certify a reduced word, or answer one uniqueness step.
    Certify {
        #[command(flatten)]
        cartan: CartanSource,
        #[arg(long)]
        word: String,
        /// Only compute h^1 of K of the last letter on the word minus that letter.
        #[arg(long)]
        step_only: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Enable the extra vanishing rule for f*L + Z with f*L + Z nef.
        #[arg(long)]
        j3: bool,
    },
    /// Certification scan over the reduced words of the F4 longest element.
    F4Scan {
        #[arg(long, value_enum, default_value_t = ModeArg::Sample)]
        mode: ModeArg,
        /// Sample size.
        #[arg(long, default_value_t = 10_000)]
        k: u64,
        /// Range start (0-based rank, inclusive).
        #[arg(long)]
        start: Option<u128>,
        /// Range end (0-based rank, exclusive).
        #[arg(long)]
        end: Option<u128>,
        /// JSON-lines checkpoint file, resumed from if present.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = DEFAULT_BATCH)]
        batch: usize,
        /// Stop after this many words in this run.
        #[arg(long)]
        stop_after: Option<u64>,
        #[arg(long)]
        time_limit_secs: Option<u64>,
        #[arg(long)]
        j3: bool,
    },
    /// Run a named bundle of reproduction checks.
    Repro {
        /// Suite name, or `all`.
        #[arg(required_unless_present = "list")]
        suite: Option<String>,
        #[arg(long)]
        list: bool,
    },
}

/// A failure reported as `{"error": code, "detail": ..}`.
#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub detail: String,
    pub exit: i32,
}

impl CliError {
    fn domain(code: &'static str, detail: impl ToString) -> CliError {
        CliError {
            code,
            detail: detail.to_string(),
            exit: EXIT_DOMAIN,
        }
    }

    fn usage(detail: impl ToString) -> CliError {
        CliError {
            code: "Usage",
            detail: detail.to_string(),
            exit: EXIT_USAGE,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Syntax { .. } => CliError::usage(e),
            ParseError::LetterOutOfRange { .. } => CliError::domain("IndexOutOfRange", e),
            ParseError::Cartan(_) => CliError::domain("InvalidCartan", e),
            ParseError::File { .. } => CliError::domain("Io", e),
        }
    }
}

impl From<WeylError> for CliError {
    fn from(e: WeylError) -> Self {
        let code = match e {
            WeylError::IndexOutOfRange { .. } => "IndexOutOfRange",
            WeylError::NotAReducedWord => "NotReduced",
            WeylError::TooLarge { .. } | WeylError::NonTerminating { .. } => "TooLarge",
            _ => "Weyl",
        };
        CliError::domain(code, e)
    }
}

impl From<CharError> for CliError {
    fn from(e: CharError) -> Self {
        CliError::domain("Character", e)
    }
}

impl From<BsError> for CliError {
    fn from(e: BsError) -> Self {
        CliError::domain("BottSamelson", e)
    }
}

impl From<DescentError> for CliError {
    fn from(e: DescentError) -> Self {
        let code = match e {
            DescentError::NotReduced { ref word } => {
                return CliError::domain("NotReduced", format!("word {} is not reduced", crate::io::format_word(word)))
            }
            DescentError::InconsistentDerivation { .. } => "InconsistentDerivation",
            DescentError::IndexOutOfRange { .. } => "IndexOutOfRange",
            _ => "Descent",
        };
        CliError::domain(code, e)
    }
}

impl From<ScanError> for CliError {
    fn from(e: ScanError) -> Self {
        let code = match e {
            ScanError::CheckpointCorrupt { .. } => "CheckpointCorrupt",
            ScanError::Io { .. } => "Io",
            ScanError::BadMode(_) => return CliError::usage(e),
            _ => "Scan",
        };
        CliError::domain(code, e)
    }
}

struct Ctx {
    cache: Cache,
}

/// Parses `args` (including the program name), runs, writes JSON to `out`
/// and returns the exit code.
pub fn run<I, T, W>(args: I, out: &mut W) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            if code == EXIT_OK {
                let _ = write!(out, "{}", e.render());
            } else {
                eprint!("{}", e.render());
            }
            return code;
        }
    };
    let (value, code) = match dispatch(&cfg) {
        Ok(r) => r,
        Err(e) => (json!({"error": e.code, "detail": e.detail}), e.exit),
    };
    let text = serde_json::to_string(&value).expect("values serialize");
    if writeln!(out, "{text}").is_err() {
        return EXIT_DOMAIN;
    }
    code
}

pub fn dispatch(cfg: &RunConfig) -> Result<(Value, i32), CliError> {
    let ctx = Ctx {
        cache: if cfg.no_cache { Cache::disabled() } else { Cache::from_env() },
    };
    let work = || run_command(&ctx, cfg);
    match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(CliError::usage)?
            .install(work),
        None => work(),
    }
}

fn load_cartan(src: &CartanSource) -> Result<CartanData, CliError> {
    match (&src.type_name, &src.cartan) {
        (Some(t), None) => Ok(cartan_from_type(t)?),
        (None, Some(p)) => Ok(cartan_from_file(p)?),
        _ => Err(CliError::usage("give exactly one of --type and --cartan")),
    }
}

fn load(src: &CartanSource) -> Result<(CartanData, RootSystem), CliError> {
    let c = load_cartan(src)?;
    let rs = generate_roots(&c)?;
    Ok((c, rs))
}

fn element(rs: &RootSystem, e: &ElementSource) -> Result<WeylElement, CliError> {
    match &e.element {
        Some(w) => Ok(rs.element_from_word(&parse_word(w, rs.rank())?)?),
        None => Ok(rs.longest_element()),
    }
}

fn classes(c: &CartanData, s: &str) -> Result<DivisorClass, CliError> {
    let d = parse_degrees(s)?;
    if d.len() != c.rank() {
        return Err(CliError::domain(
            "WrongLength",
            format!("{} degrees given for rank {}", d.len(), c.rank()),
        ));
    }
    Ok(DivisorClass::new(d))
}

/// Small numbers as JSON numbers, large ones as strings.
fn big(n: &BigUint) -> Value {
    match crate::charcalc::small(n) {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn profile_json(p: &CohomologyProfile) -> Value {
    let mut m = Map::new();
    for (k, v) in &p.values {
        if *v != BigUint::from(0u32) {
            m.insert(k.to_string(), big(v));
        }
    }
    Value::Object(m)
}

fn answer_name(a: H1Answer) -> &'static str {
    match a {
        H1Answer::Exact0 => "Exact(0)",
        H1Answer::Exact1 => "Exact(1)",
        H1Answer::Undetermined { budget_exceeded: true } => "Undetermined(budget)",
        H1Answer::Undetermined { .. } => "Undetermined",
    }
}

/// Order from the classification, for groups too large to enumerate.
fn order_by_type(c: &CartanData) -> Result<BigUint, CliError> {
    let d = classify(c).map_err(|e| CliError::domain("InvalidCartan", e))?;
    let fact = |n: u64| (1..=n).fold(BigUint::from(1u32), |a, k| a * k);
    let mut total = BigUint::from(1u32);
    for comp in &d.components {
        let n = comp.rank as u64;
        total *= match comp.label {
            TypeLabel::A => fact(n + 1),
            TypeLabel::B | TypeLabel::C => fact(n) << n as usize,
            TypeLabel::D => fact(n) << (n as usize - 1),
            TypeLabel::E => BigUint::from(match n {
                6 => 51_840u64,
                7 => 2_903_040,
                _ => 696_729_600,
            }),
            TypeLabel::F => BigUint::from(1152u32),
            TypeLabel::G => BigUint::from(12u32),
        };
    }
    Ok(total)
}

fn run_command(ctx: &Ctx, cfg: &RunConfig) -> Result<(Value, i32), CliError> {
    let ok = |v: Value| Ok((v, EXIT_OK));
    match &cfg.command {
        Command::Roots { cartan, count } => {
            let (_, rs) = load(cartan)?;
            let mut v = json!({"roots": rs.roots().len(), "positive": rs.num_positive()});
            if !count {
                let pos: Vec<Value> = rs
                    .positive_roots()
                    .iter()
                    .map(|r| json!({"coeffs": r.coeffs, "degrees": r.degrees, "height": r.height()}))
                    .collect();
                v["positive_roots"] = Value::Array(pos);
            }
            ok(v)
        }
        Command::WeylOrder { cartan } => {
            let (c, rs) = load(cartan)?;
            let key = cartan_key(&c);
            let (order, _) = ctx.cache.get_or_compute("weyl-order", &key, || -> Result<String, CliError> {
                let by_type = order_by_type(&c)?;
                if by_type <= BigUint::from(BFS_CAP) {
                    let enumerated = BigUint::from(rs.weyl_order_capped(BFS_CAP)?);
                    if enumerated != by_type {
                        return Err(CliError::domain(
                            "Inconsistent",
                            format!("enumerated order {enumerated} differs from {by_type}"),
                        ));
                    }
                }
                Ok(by_type.to_string())
            })?;
            ok(json!({"order": order}))
        }
        Command::Longest { cartan } => {
            let (_, rs) = load(cartan)?;
            let w0 = rs.longest_element();
            ok(json!({"length": w0.length(), "word": word_to_json(w0.witness_word())}))
        }
        Command::ReducedCount { cartan, element: es } => {
            let (c, rs) = load(cartan)?;
            let w = element(&rs, es)?;
            let key = format!("{}|{:?}", cartan_key(&c), w.action());
            let (count, _) = ctx.cache.get_or_compute("reduced-count", &key, || -> Result<String, CliError> {
                Ok(rs.count_reduced_words(&w)?.to_string())
            })?;
            ok(json!({"count": count}))
        }
        Command::ReducedList {
            cartan,
            element: es,
            start,
            limit,
        } => {
            let (_, rs) = load(cartan)?;
            let w = element(&rs, es)?;
            let mut words: Vec<Value> = Vec::new();
            match WeylTable::build(&rs) {
                Ok(t) => {
                    let e = t.index_of(&w).expect("element lies in the table");
                    let total = t.count(e)?;
                    let end = start.saturating_add(*limit as u128).min(total);
                    t.for_each_in_range(e, *start, end, |word| {
                        words.push(json!(word_to_json(word)));
                        ControlFlow::Continue(())
                    })?;
                    ok(json!({"total": total.to_string(), "start": start.to_string(), "words": words}))
                }
                Err(WeylError::TooLarge { .. }) => {
                    let mut skipped = 0u128;
                    let _ = rs.enumerate_reduced_words(&w, |word| {
                        if skipped < *start {
                            skipped += 1;
                            return ControlFlow::Continue(());
                        }
                        if words.len() as u64 >= *limit {
                            return ControlFlow::Break(());
                        }
                        words.push(json!(word_to_json(word)));
                        ControlFlow::Continue(())
                    });
                    ok(json!({"start": start.to_string(), "words": words}))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Cohomology { cartan, degrees, detail } => {
            let (c, rs) = load(cartan)?;
            let l = classes(&c, degrees)?;
            let rep = bwb_report(&rs, &l)?;
            let mut v = json!({"profile": profile_json(&rep.profile)});
            if *detail {
                v["euler"] = json!(rep.euler.to_string());
                v["singular"] = json!(rep.singular);
                v["length"] = json!(rep.length);
            }
            ok(v)
        }
        Command::EulerBs { cartan, word, degrees } => {
            let c = load_cartan(cartan)?;
            let w = parse_word(word, c.rank())?;
            let l = classes(&c, degrees)?;
            ok(json!({"euler": euler_char_bs(&c, &w, &l)?}))
        }
        Command::BsModel { cartan, word, degrees } => {
            let (c, rs) = load(cartan)?;
            let w = parse_word(word, c.rank())?;
            let m = build_model(&c, &w)?;
            let mut v = json!({
                "word": word_to_json(&w),
                "n_beta": m.n_beta_matrix(),
                "n_gamma": m.n_gamma_matrix(),
                "gamma_in_beta": m.gamma_in_beta(),
                "section_divisors": m.section_divisor_matrix(),
                "anticanonical": m.anticanonical_from_sections(),
                "anticanonical_consistent": m.anticanonical_check(),
                "stein_face": word_to_json(&m.stein_face()),
                "image_dimension": image_dimension(&rs, &w)?,
            });
            if let Some(d) = degrees {
                let l = classes(&c, d)?;
                let h = m.pullback(&l)?;
                v["pullback"] = json!(h.h_coeffs);
                v["pullback_nef"] = json!(m.is_nef(&h));
            }
            ok(v)
        }
        Command::Certify {
            cartan,
            word,
            step_only,
            budget,
            j3,
        } => {
            let c = load_cartan(cartan)?;
            let w = parse_word(word, c.rank())?;
            let engine = Engine::new(
                &c,
                EngineConfig {
                    budget: *budget,
                    enable_j3: *j3,
                    cross_check: false,
                },
            )?;
            if *step_only {
                let a = engine.h1_uniqueness(&w)?;
                return ok(json!({"word": word_to_json(&w), "answer": answer_name(a)}));
            }
            let rep = engine.certify_word(&w)?;
            let steps: Vec<Value> = rep
                .steps
                .iter()
                .map(|s| json!({"step": s.step, "letter": s.letter + 1, "answer": answer_name(s.answer)}))
                .collect();
            let mut v = json!({"word": word_to_json(&w), "steps": steps});
            match rep.outcome {
                CertifyOutcome::Certified => v["outcome"] = json!("Certified"),
                CertifyOutcome::FailsAt { step } => {
                    v["outcome"] = json!("FailsAt");
                    v["step"] = json!(step);
                }
                CertifyOutcome::BudgetExceeded { step } => {
                    v["outcome"] = json!("BudgetExceeded");
                    v["step"] = json!(step);
                }
            }
            ok(v)
        }
        Command::F4Scan {
            mode,
            k,
            start,
            end,
            checkpoint,
            budget,
            batch,
            stop_after,
            time_limit_secs,
            j3,
        } => {
            let mode = match mode {
                ModeArg::Full => ScanMode::Full,
                ModeArg::Sample => ScanMode::Sample(*k),
                ModeArg::Range => match (start, end) {
                    (Some(a), Some(b)) => ScanMode::Range(*a, *b),
                    _ => return Err(CliError::usage("range mode needs --start and --end")),
                },
            };
            let cfg_scan = ScanConfig {
                mode,
                checkpoint: checkpoint.clone(),
                workers: None,
                batch: *batch,
                stop_after: *stop_after,
                time_limit: time_limit_secs.map(Duration::from_secs),
                engine: EngineConfig {
                    budget: *budget,
                    enable_j3: *j3,
                    cross_check: false,
                },
            };
            let rep = f4_scan(&cfg_scan)?;
            let failures: Vec<Value> = rep.first_failure_steps.iter().map(|(s, n)| json!([s, n])).collect();
            let v = json!({
                "planned": rep.planned,
                "processed": rep.tally.processed,
                "certified": rep.tally.certified,
                "failed": rep.tally.failed,
                "budget_exceeded": rep.tally.budget_exceeded,
                "total_words": rep.total_words.to_string(),
                "last_word": rep.last_word,
                "first_failure_steps": failures,
                "complete": rep.complete,
                "resumed": rep.resumed,
            });
            Ok((v, if rep.complete { EXIT_OK } else { EXIT_INTERRUPTED }))
        }
        Command::Repro { suite, list } => {
            if *list {
                return ok(json!({"suites": SUITES}));
            }
            let name = suite.as_deref().expect("clap requires a suite");
            let checks = run_suite(name).ok_or_else(|| CliError::domain("UnknownSuite", format!("no suite named {name}")))?;
            let pass = checks.iter().all(|c| c.pass);
            for c in &checks {
                eprintln!("{} {}{}", if c.pass { "PASS" } else { "FAIL" }, c.name, if c.detail.is_empty() { String::new() } else { format!(" ({})", c.detail) });
            }
            let failing: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
            let v = json!({"suite": name, "pass": pass, "checks": checks, "failing": failing});
            Ok((v, if pass { EXIT_OK } else { EXIT_DOMAIN }))
        }
    }
}
