//! Command-line front end. Exit status: 0 when every check passes (or the
//! requested witness is found), 1 when a check fails with a counterexample,
//! 2 on budget or cap exhaustion, 64 on usage errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bzfn::{self, BzSchedule, WitnessSummary};
use crate::error::{Error, Result};
use crate::exactnum::{ExactInt, RatExp};
use crate::holefn::{self, HoleFn, HoleSchedule, Limits, Omega};
use crate::langgrowth::{self, EmptyWord, LangAutomaton, LangSpec};
use crate::sbprime::{self, ChoiceRule, SBReport, SBTarget};
use crate::seqfn::{self, CheckReport, GrowthFn};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_BUDGET: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug)]
#[command(name = "growth-forge", version, about = "Exact growth-function constructions and checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Largest index any function may be evaluated at.
    #[arg(long, global = true, env = "GROWTH_FORGE_CAP", default_value_t = 1 << 20)]
    pub cap: u64,
    /// Verified window on unbounded final stretches.
    #[arg(long = "sweep-cap", global = true, default_value_t = 4096)]
    pub sweep_cap: u64,
    /// Byte budget for materialized word sets.
    #[arg(long, global = true, default_value_t = sbprime::BYTE_BUDGET)]
    pub budget: usize,
    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for randomized choices; the deterministic rule otherwise.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format of the primary artifact.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the primary artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write a bit-length plot of the main sequence.
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stage-wise hole function.
    #[command(subcommand)]
    Hole(HoleCmd),
    /// Derivative-squaring function.
    #[command(subcommand)]
    Bz(BzCmd),
    /// Dyadic word construction.
    #[command(subcommand)]
    Sb(SbCmd),
    /// Languages with forbidden factors.
    #[command(subcommand)]
    Lang(LangCmd),
    /// Check suite on a function table.
    #[command(name = "fn", subcommand)]
    Func(FnCmd),
}

#[derive(Subcommand, Debug)]
pub enum HoleCmd {
    /// Minimal schedule with its constraint ledger.
    Build {
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        d1: u64,
        /// Constant growth bound `p/q` the schedule must leave room for.
        #[arg(long)]
        omega: Option<RatExp>,
    },
    /// Table `f(0..=upto)`.
    Eval {
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long)]
        upto: u64,
    },
    /// Witness at the prescribed point for `C`.
    Witness {
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long = "C", default_value_t = 1)]
        c: u64,
    },
    /// `f(x) >= 2^(x omega)` on `[n_1, upto]`.
    Dominates {
        #[arg(long)]
        schedule: Option<PathBuf>,
        #[arg(long)]
        omega: RatExp,
        #[arg(long)]
        upto: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum BzCmd {
    Eval {
        #[arg(long, default_value = "3,13")]
        schedule: BzSchedule,
        #[arg(long)]
        upto: u64,
    },
    Validate {
        #[arg(long, default_value = "3,13")]
        schedule: BzSchedule,
    },
    /// Lower bound on the derivative over one dyadic block.
    Aux {
        #[arg(long, default_value = "3,13")]
        schedule: BzSchedule,
        #[arg(long, default_value_t = 1)]
        i: usize,
    },
    /// Strict violation of the second derivative condition.
    Refute {
        #[arg(long, default_value = "3,13")]
        schedule: BzSchedule,
        #[arg(long = "C", default_value_t = 1)]
        c: u64,
        #[arg(long, default_value_t = 1)]
        imax: usize,
        /// Accepted for symmetry; the output is always JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum SbCmd {
    Run {
        /// Builtin name (`square`, `npow:k`, ..) or path to an `n,value` CSV.
        #[arg(long = "f", default_value = "square")]
        f: String,
        #[arg(long, default_value_t = 5)]
        stages: usize,
        /// Longest factor length tabulated.
        #[arg(long = "L", default_value_t = 32)]
        l: usize,
        /// Longest words in the finite irreducibility check.
        #[arg(long, default_value_t = 4)]
        short: usize,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LangCheck {
    Prolongable,
    Irreducible,
}

#[derive(Subcommand, Debug)]
pub enum LangCmd {
    Count {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 30)]
        upto: usize,
        /// Cumulative counts (empty word included) as `n,value` CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Letter weights, comma separated.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<u64>>,
        #[arg(long, value_enum)]
        check: Option<LangCheck>,
    },
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        check: Option<LangCheck>,
    },
}

#[derive(Subcommand, Debug)]
pub enum FnCmd {
    /// Monotonicity, submultiplicativity, derivative bounds.
    Check {
        /// Builtin name or path to an `n,value` CSV.
        #[arg(long = "f")]
        f: String,
        #[arg(long)]
        upto: Option<usize>,
        #[arg(long, default_value_t = 2)]
        d: u32,
    },
}

/// Parse `args` and run; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("growth-forge: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapOverflow { .. } | Error::Budget(_) => EXIT_BUDGET,
        Error::InvalidArgument(_) | Error::Parse(_) | Error::Io(_) | Error::Json(_) => EXIT_USAGE,
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    if let Some(j) = g.jobs {
        if j == 0 {
            return Err(Error::invalid("--jobs must be positive"));
        }
        // a pool built earlier in the process keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let limits = Limits {
        cap: g.cap,
        sweep: g.sweep_cap,
    };
    match &cli.command {
        Command::Hole(c) => hole(g, &limits, c),
        Command::Bz(c) => bz(g, c),
        Command::Sb(c) => sb(g, c),
        Command::Lang(c) => lang(g, c),
        Command::Func(c) => func(g, c),
    }
}

fn status(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn emit(g: &Global, bytes: &[u8]) -> Result<()> {
    match &g.out {
        Some(p) => std::fs::write(p, bytes)?,
        None => io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(g: &Global, v: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    emit(g, s.as_bytes())
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

/// Values as CSV, JSON or a bit-length plot; `fallback` when no format was
/// asked for.
fn emit_table(g: &Global, values: &[ExactInt], fallback: Format, title: &str) -> Result<()> {
    if let Some(p) = &g.svg {
        std::fs::write(p, svg_bits(values, title))?;
    }
    match g.format.unwrap_or(fallback) {
        Format::Csv => {
            let mut buf = Vec::new();
            seqfn::write_table_csv(values, &mut buf)?;
            emit(g, &buf)
        }
        Format::Json => emit_json(
            g,
            &json!({
                "name": title,
                "range": [0, values.len().saturating_sub(1)],
                "values": values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            }),
        ),
        Format::Svg => emit(g, svg_bits(values, title).as_bytes()),
    }
}

/// Polyline of `bits(v)` against the index.
pub fn svg_bits(values: &[ExactInt], title: &str) -> String {
    let (w, h, pad) = (640.0, 400.0, 40.0);
    let bits: Vec<f64> = values.iter().map(|v| v.bits() as f64).collect();
    let xmax = (bits.len().max(2) - 1) as f64;
    let ymax = bits.iter().cloned().fold(1.0, f64::max);
    let pts: Vec<String> = bits
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let x = pad + (w - 2.0 * pad) * i as f64 / xmax;
            let y = h - pad - (h - 2.0 * pad) * b / ymax;
            format!("{x:.2},{y:.2}")
        })
        .collect();
    let title = title.replace('&', "&amp;").replace('<', "&lt;");
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n",
            "<text x=\"{pad}\" y=\"20\" font-size=\"12\">{title}: bit length, max {ymax}</text>\n",
            "<line x1=\"{pad}\" y1=\"{yb}\" x2=\"{xr}\" y2=\"{yb}\" stroke=\"black\"/>\n",
            "<line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{yb}\" stroke=\"black\"/>\n",
            "<polyline fill=\"none\" stroke=\"steelblue\" points=\"{pts}\"/>\n",
            "</svg>\n"
        ),
        w = w,
        h = h,
        pad = pad,
        title = title,
        ymax = ymax,
        yb = h - pad,
        xr = w - pad,
        pts = pts.join(" "),
    )
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

/// A builtin name, else an `n,value` CSV file.
fn load_fn(spec: &str, cap: u64) -> Result<GrowthFn> {
    match seqfn::builtin(spec, cap as usize) {
        Ok(f) => Ok(f),
        Err(_) if Path::new(spec).exists() => GrowthFn::read_csv(spec, open(Path::new(spec))?),
        Err(_) => Err(Error::invalid(format!(
            "{spec:?} is neither a builtin function nor a readable file"
        ))),
    }
}

fn load_schedule(path: Option<&PathBuf>, limits: &Limits) -> Result<HoleSchedule> {
    match path {
        Some(p) => HoleSchedule::from_json(&read_to_string(p)?),
        None => holefn::build_schedule(2, 3, None, limits),
    }
}

fn hole(g: &Global, limits: &Limits, cmd: &HoleCmd) -> Result<i32> {
    match cmd {
        HoleCmd::Build { k, d1, omega } => {
            let om = omega.map(Omega::Constant);
            let s = holefn::build_schedule(*k, *d1, om.as_ref(), limits)?;
            let mut text = s.to_json()?;
            text.push('\n');
            emit(g, text.as_bytes())?;
            Ok(status(s.all_pass()))
        }
        HoleCmd::Eval { schedule, upto } => {
            let s = load_schedule(schedule.as_ref(), limits)?;
            let mut h = HoleFn::new(&s, g.cap)?;
            let t = h.table(*upto)?;
            emit_table(g, &t, Format::Csv, "hole")?;
            Ok(EXIT_PASS)
        }
        HoleCmd::Witness { schedule, c } => {
            let s = load_schedule(schedule.as_ref(), limits)?;
            let p = holefn::find_nonrealizability_witness(&s, *c, g.cap)?;
            emit_json(g, &p)?;
            Ok(status(p.is_witness()))
        }
        HoleCmd::Dominates {
            schedule,
            omega,
            upto,
        } => {
            let s = load_schedule(schedule.as_ref(), limits)?;
            let upto = upto.unwrap_or(s.d[0] * s.n[0]);
            let mut h = HoleFn::new(&s, g.cap)?;
            let r = holefn::check_dominates(&mut h, &Omega::Constant(*omega), upto)?;
            emit_json(g, &r)?;
            Ok(status(r.passed()))
        }
    }
}

fn bz(g: &Global, cmd: &BzCmd) -> Result<i32> {
    match cmd {
        BzCmd::Eval { schedule, upto } => {
            let t = bzfn::bz_table(schedule, *upto, g.cap)?;
            let fallback = match &g.out {
                Some(p) if p.extension().is_some_and(|e| e == "json") => Format::Json,
                _ => Format::Csv,
            };
            emit_table(g, &t, fallback, &format!("bz {schedule}"))?;
            Ok(EXIT_PASS)
        }
        BzCmd::Validate { schedule } => {
            let r = bzfn::validate_bz(schedule);
            emit_json(g, &r)?;
            Ok(status(r.passed()))
        }
        BzCmd::Aux { schedule, i } => {
            let r = bzfn::check_aux(schedule, *i, g.cap)?;
            emit_json(g, &r)?;
            Ok(status(r.passed()))
        }
        BzCmd::Refute {
            schedule,
            c,
            imax,
            json: _,
        } => {
            let out = bzfn::refute_condition2(schedule, *c, *imax, g.cap)?;
            match &out.witness {
                Some(w) => {
                    emit_json(g, &WitnessSummary::from(w))?;
                    Ok(EXIT_PASS)
                }
                None => {
                    emit_json(
                        g,
                        &json!({ "witness": null, "checked": out.checked, "overflow": out.overflow }),
                    )?;
                    Ok(if out.overflow.is_some() {
                        EXIT_BUDGET
                    } else {
                        EXIT_FAIL
                    })
                }
            }
        }
    }
}

fn sb(g: &Global, cmd: &SbCmd) -> Result<i32> {
    let SbCmd::Run {
        f,
        stages,
        l,
        short,
        report,
    } = cmd;
    if *l == 0 {
        return Err(Error::invalid("--L must be positive"));
    }
    let need = l.next_power_of_two().trailing_zeros() as usize;
    let stages = (*stages).max(need);
    let mut target = SBTarget::new(load_fn(f, g.cap)?);
    let (c, lemma_c) = sbprime::c_sequence(&mut target, stages)?;
    let rule = match g.seed {
        Some(s) => ChoiceRule::Seeded(s),
        None => ChoiceRule::LexLeast,
    };
    let state = sbprime::run(&mut target, stages, rule, g.budget)?;
    if state.materialized_stage() != Some(stages) {
        return Err(Error::Budget(format!(
            "stage {stages} exceeds the byte budget {}",
            g.budget
        )));
    }
    let table = sbprime::factors(&state, *l)?;
    let gamma = sbprime::gamma_s(&table, &mut target)?;
    let mut reports = vec![
        lemma_c,
        sbprime::check_state(&state),
        sbprime::check_recurrence(&state, stages),
        table.check_hereditary(),
    ];
    reports.extend(gamma.reports.iter().cloned());
    if 2 * short <= *l {
        reports.push(sbprime::check_finite_irreducible(&table, *short, *l)?);
    }
    let pass = reports.iter().all(CheckReport::passed);
    if let Some(p) = &g.svg {
        std::fs::write(p, svg_bits(&gamma.per_length, "gamma prime"))?;
    }
    let out = SBReport {
        stages,
        max_len: *l,
        c: c.iter().map(|x| x.to_string()).collect(),
        w_sizes: (0..=stages)
            .map(|n| state.w_count(n).map(|x| x.to_string()).unwrap_or_default())
            .collect(),
        gamma_prime: gamma.per_length.iter().map(|x| x.to_string()).collect(),
        reports,
    };
    match report {
        Some(p) => write_json(p, &out)?,
        None => emit_json(g, &out)?,
    }
    Ok(status(pass))
}

fn lang_report(spec: &LangSpec, a: &LangAutomaton, check: Option<LangCheck>) -> Result<(serde_json::Value, bool)> {
    let mut v = serde_json::Map::new();
    let mut pass = true;
    if check.is_none() || check == Some(LangCheck::Prolongable) {
        let p = langgrowth::check_prolongable(spec, a)?;
        pass &= p == langgrowth::Prolongable::Yes;
        v.insert("prolongable".into(), serde_json::to_value(&p)?);
    }
    if check.is_none() || check == Some(LangCheck::Irreducible) {
        let r = langgrowth::check_irreducible(a, langgrowth::SUBSET_BUDGET)?;
        pass &= matches!(r, langgrowth::Irreducible::Yes { .. });
        v.insert("irreducible".into(), serde_json::to_value(&r)?);
    }
    Ok((serde_json::Value::Object(v), pass))
}

fn lang(g: &Global, cmd: &LangCmd) -> Result<i32> {
    match cmd {
        LangCmd::Count {
            spec,
            upto,
            csv,
            weights,
            check,
        } => {
            let s = LangSpec::from_json(&read_to_string(spec)?)?;
            let a = LangAutomaton::build(&s)?;
            let per = a.count_words(*upto);
            let cum = langgrowth::cumulative(&per, EmptyWord::Counted);
            if let Some(p) = csv {
                seqfn::write_table_csv(&cum, File::create(p)?)?;
            }
            if let Some(p) = &g.svg {
                std::fs::write(p, svg_bits(&cum, "gamma"))?;
            }
            let mut out = json!({
                "alphabet": s.alphabet,
                "forbidden": s.forbidden.iter().map(|w| langgrowth::format_word(w)).collect::<Vec<_>>(),
                "states": a.states(),
                "range": [0, upto],
                "gamma_prime": per.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "gamma": cum.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                "gap": langgrowth::bergman_probe(&per),
            });
            if let Some(w) = weights {
                let wc = langgrowth::weighted_count(&a, w, *upto)?;
                out["weighted"] = json!(wc.iter().map(|x| x.to_string()).collect::<Vec<_>>());
            }
            let mut pass = true;
            if check.is_some() {
                let (v, ok) = lang_report(&s, &a, *check)?;
                out["check"] = v;
                pass = ok;
            }
            emit_json(g, &out)?;
            Ok(status(pass))
        }
        LangCmd::Check { spec, check } => {
            let s = LangSpec::from_json(&read_to_string(spec)?)?;
            let a = LangAutomaton::build(&s)?;
            let (v, pass) = lang_report(&s, &a, *check)?;
            emit_json(g, &v)?;
            Ok(status(pass))
        }
    }
}

fn func(g: &Global, cmd: &FnCmd) -> Result<i32> {
    let FnCmd::Check { f, upto, d } = cmd;
    let mut func = load_fn(f, g.cap)?;
    let n = match upto {
        Some(n) => *n,
        None if func.verified_to() > 0 => func.verified_to(),
        None => return Err(Error::invalid("--upto is required for builtin functions")),
    };
    let reports = vec![
        seqfn::check_increasing(&mut func, n)?,
        seqfn::check_submultiplicative(&mut func, n)?,
        seqfn::check_derivative_lb(&mut func, n)?,
        seqfn::check_bz_condition(&mut func, n, *d)?,
        seqfn::check_convexity_bounds(&mut func, n)?,
    ];
    let pass = reports.iter().all(CheckReport::passed);
    if let Some(p) = &g.svg {
        let name = func.name().to_string();
        std::fs::write(p, svg_bits(func.prefix(n)?, &name))?;
    }
    emit_json(g, &reports)?;
    Ok(status(pass))
}
