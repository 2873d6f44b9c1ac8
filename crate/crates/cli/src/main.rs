//! Command-line front end: parameter resolution (paper vs desk mode),
//! operation dispatch, result emission as JSON or CSV, and sign-table
//! caching.

mod config;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use mfo_core::cache::{load_table, save_table};
use mfo_core::chain::{approximate_in_interval, build_alpha_chain, ChainConfig};
use mfo_core::farey::interval_avoiding_denominators;
use mfo_core::matched::{find_matched_products, paper_s, prime_count_in_j};
use mfo_core::oscillation::{
    count_sign_changes, integral_sigma, locate_sign_change, pigeonhole_agreement_witness,
    shift_sum, short_interval_mean, sigma, ShiftSpec,
};
use mfo_core::rat::{parse_ratio, rat_string, rat_to_json, rat_u};
use mfo_core::ratio::reorder_prefix;
use mfo_core::{
    sieve_signs, Error, ExperimentParams, Interval, Mode, PrimeSignAssignment, Rat, RatioFactor,
    RatioProduct, Result, Sign, SignTable,
};

#[derive(Parser)]
#[command(
    name = "mfo",
    version,
    about = "Sign oscillation experiments for ±1 completely multiplicative functions"
)]
struct Cli {
    /// Flat `key = value` config file; flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// liouville (default), seeded, or explicit.
    #[arg(long, global = true)]
    rule: Option<String>,
    /// Seed for --rule seeded.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file {"signs": [[p, s], ...], "default": s} for --rule explicit.
    #[arg(long, global = true)]
    rule_file: Option<PathBuf>,
    /// paper or desk (default).
    #[arg(long, global = true)]
    mode: Option<String>,
    #[arg(long, global = true)]
    x: Option<f64>,
    #[arg(long, global = true)]
    beta1: Option<f64>,
    #[arg(long, global = true)]
    beta2: Option<f64>,
    /// Integer interval as lo:hi.
    #[arg(long, global = true)]
    interval: Option<String>,
    #[arg(long, global = true)]
    rho_max: Option<f64>,
    #[arg(long, global = true)]
    chain_y_coefficient: Option<f64>,
    /// Factors per matched product.
    #[arg(long, global = true)]
    s: Option<u32>,
    #[arg(long, global = true)]
    gap_cap: Option<u64>,
    #[arg(long, global = true)]
    iteration_cap: Option<u64>,
    /// Directory for cached sign tables.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// json (default) or csv.
    #[arg(long, global = true)]
    out: Option<String>,
    /// info (default) or quiet.
    #[arg(long, global = true)]
    log_level: Option<String>,
    /// Sieve size override; ops derive a sufficient size when omitted.
    #[arg(long, global = true)]
    limit: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sieve signs up to --limit and report the table digest and mean.
    Sieve,
    /// Count consecutive sign changes up to --x.
    Oscillate,
    /// Σ(I, α): count n in --interval with f(n) = -f(⌊αn⌋).
    Sigma {
        #[arg(long)]
        alpha: String,
    },
    /// Exact ∫ Σ(I, t) dt over [--u0, --u1].
    Integral {
        #[arg(long)]
        u0: String,
        #[arg(long)]
        u1: String,
    },
    /// Shift sum Σ |f(n + δ(n)) - f(n)| for n in (B, x - B].
    Shift {
        /// Constant integer, or mod3 for δ(n) = (n mod 3) - 1.
        #[arg(long)]
        delta: String,
        #[arg(long)]
        bound: u64,
    },
    /// Short-interval mean (1/φ) Σ_{z-φ<n<z} f(n).
    Shortmean {
        #[arg(long)]
        z: u64,
        #[arg(long)]
        phi: u64,
    },
    /// With --n/--p/--q: locate a sign change in (pn-q, pn]. Otherwise the
    /// pigeonhole agreement witness up to --x.
    Witness {
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Build the alpha chain for the resolved parameters.
    Chain {
        /// Also write the chain as JSON to this path.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Approximate a target interval [--y1, --y2] by a ratio product.
    Approx {
        #[arg(long)]
        y1: String,
        #[arg(long)]
        y2: String,
    },
    /// Reorder --factors p/q,p/q,... so every prefix stays in (1/2, 2).
    Reorder {
        #[arg(long)]
        factors: String,
    },
    /// Closest sign-matched product pair near --y.
    Matched {
        #[arg(long)]
        y: f64,
    },
    /// Σ(I, prefix) for every prefix of --factors.
    Profile {
        #[arg(long)]
        factors: String,
    },
    /// Interval of --width near --theta avoiding denominators ≤ --denom-bound.
    Avoid {
        #[arg(long)]
        theta: String,
        #[arg(long)]
        denom_bound: u64,
        #[arg(long)]
        width: String,
    },
}

#[derive(Clone, Copy, PartialEq)]
enum OutFormat {
    Json,
    Csv,
}

struct Options {
    rule: PrimeSignAssignment,
    mode: Mode,
    x: Option<f64>,
    beta1: Option<f64>,
    beta2: Option<f64>,
    interval: Option<Interval>,
    rho_max: Option<f64>,
    chain_y_coefficient: Option<f64>,
    s: Option<u32>,
    gap_cap: Option<u64>,
    iteration_cap: u64,
    cache_dir: Option<PathBuf>,
    out: OutFormat,
    quiet: bool,
    limit: Option<u64>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => match e.kind() {
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                print!("{e}");
                std::process::exit(0);
            }
            _ => {
                eprint!("{e}");
                std::process::exit(3);
            }
        },
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => 3,
        Error::Resource(_) | Error::Format { .. } | Error::Io(_) => 4,
        _ => 2,
    }
}

fn parse_interval(s: &str) -> Result<Interval> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| Error::Config(format!("interval must be lo:hi, got {s:?}")))?;
    let lo: u64 = lo
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad interval endpoint {lo:?}")))?;
    let hi: u64 = hi
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad interval endpoint {hi:?}")))?;
    Interval::new(lo, hi).map_err(|e| Error::Config(format!("empty or invalid interval: {e}")))
}

fn parse_rule(
    kind: Option<&str>,
    seed: Option<u64>,
    rule_file: Option<&Path>,
) -> Result<PrimeSignAssignment> {
    match kind.unwrap_or("liouville") {
        "liouville" => Ok(PrimeSignAssignment::Liouville),
        "seeded" => {
            let seed = seed.ok_or_else(|| Error::Config("--rule seeded needs --seed".into()))?;
            Ok(PrimeSignAssignment::SeededRandom { seed })
        }
        "explicit" => {
            let path = rule_file
                .ok_or_else(|| Error::Config("--rule explicit needs --rule-file".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: bad JSON: {e}", path.display())))?;
            let default = v["default"]
                .as_i64()
                .ok_or_else(|| Error::Config("rule file: missing integer \"default\"".into()))?;
            let mut signs = Vec::new();
            for entry in v["signs"]
                .as_array()
                .ok_or_else(|| Error::Config("rule file: missing array \"signs\"".into()))?
            {
                let pair = entry
                    .as_array()
                    .filter(|a| a.len() == 2)
                    .ok_or_else(|| Error::Config("rule file: each sign entry is [p, s]".into()))?;
                let p = pair[0].as_u64().ok_or_else(|| {
                    Error::Config("rule file: prime must be a positive integer".into())
                })?;
                let s = pair[1]
                    .as_i64()
                    .ok_or_else(|| Error::Config("rule file: sign must be ±1".into()))?;
                signs.push((p, s as Sign));
            }
            PrimeSignAssignment::explicit(signs, default as Sign)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
        }
        other => Err(Error::Config(format!(
            "unknown rule {other:?}; expected liouville, seeded or explicit"
        ))),
    }
}

fn resolve_options(cli: &Cli) -> Result<Options> {
    let file = match &cli.config {
        Some(path) => config::parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    let rule_kind = cli.rule.clone().or_else(|| file.get("rule").cloned());
    let seed = match cli.seed {
        Some(s) => Some(s),
        None => config::get_parsed(&file, "seed")?,
    };
    let rule_file = cli
        .rule_file
        .clone()
        .or_else(|| file.get("rule_file").map(PathBuf::from));
    let rule = parse_rule(rule_kind.as_deref(), seed, rule_file.as_deref())?;

    let mode = match cli
        .mode
        .clone()
        .or_else(|| file.get("mode").cloned())
        .as_deref()
    {
        None | Some("desk") => Mode::Desk,
        Some("paper") => Mode::Paper,
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown mode {other:?}; expected paper or desk"
            )))
        }
    };

    let interval = match &cli.interval {
        Some(s) => Some(parse_interval(s)?),
        None => match file.get("interval") {
            Some(s) => Some(parse_interval(s)?),
            None => None,
        },
    };
    let out = match cli
        .out
        .clone()
        .or_else(|| file.get("out").cloned())
        .as_deref()
    {
        None | Some("json") => OutFormat::Json,
        Some("csv") => OutFormat::Csv,
        Some(other) => {
            return Err(Error::Config(format!(
                "unknown output format {other:?}; expected json or csv"
            )))
        }
    };
    let quiet = matches!(
        cli.log_level
            .clone()
            .or_else(|| file.get("log_level").cloned())
            .as_deref(),
        Some("quiet")
    );

    macro_rules! num_opt {
        ($flag:expr, $key:literal) => {
            match $flag {
                Some(v) => Some(v),
                None => config::get_parsed(&file, $key)?,
            }
        };
    }
    Ok(Options {
        rule,
        mode,
        x: num_opt!(cli.x, "x"),
        beta1: num_opt!(cli.beta1, "beta1"),
        beta2: num_opt!(cli.beta2, "beta2"),
        interval,
        rho_max: num_opt!(cli.rho_max, "rho_max"),
        chain_y_coefficient: num_opt!(cli.chain_y_coefficient, "chain_y_coefficient"),
        s: num_opt!(cli.s, "s"),
        gap_cap: num_opt!(cli.gap_cap, "gap_cap"),
        iteration_cap: num_opt!(cli.iteration_cap, "iteration_cap").unwrap_or(10_000),
        cache_dir: cli
            .cache_dir
            .clone()
            .or_else(|| file.get("cache_dir").map(PathBuf::from)),
        out,
        quiet,
        limit: num_opt!(cli.limit, "limit"),
    })
}

fn resolve_params(opts: &Options) -> Result<ExperimentParams> {
    let x = opts
        .x
        .ok_or_else(|| Error::Config("this operation needs --x".into()))?;
    match opts.mode {
        Mode::Paper => {
            if opts.beta1.is_some() || opts.beta2.is_some() || opts.interval.is_some() {
                return Err(Error::Config(
                    "paper mode derives beta1, beta2 and the interval from x; remove the overrides"
                        .into(),
                ));
            }
            let params = ExperimentParams::paper(x, opts.iteration_cap)?;
            if params.interval.is_none() && !opts.quiet {
                eprintln!(
                    "warning: paper-mode interval [ceil(x/(2 beta1)), floor(x/beta1)] is empty at x = {x}"
                );
            }
            Ok(params)
        }
        Mode::Desk => {
            let beta1 = opts
                .beta1
                .ok_or_else(|| Error::Config("desk mode needs --beta1".into()))?;
            let beta2 = opts
                .beta2
                .ok_or_else(|| Error::Config("desk mode needs --beta2".into()))?;
            let interval = opts
                .interval
                .ok_or_else(|| Error::Config("desk mode needs --interval lo:hi".into()))?;
            ExperimentParams::desk(x, beta1, beta2, interval, opts.iteration_cap)
        }
    }
}

/// Sign of n recomputed from the table's factor data and the rule, used to
/// spot-check cache hits against an independent path.
fn factored_sign(table: &SignTable, rule: &PrimeSignAssignment, mut n: u64) -> Result<Sign> {
    let mut s: Sign = 1;
    while n > 1 {
        let p = table.spf(n)?;
        s *= rule.sign_at_prime(p);
        n /= p;
    }
    Ok(s)
}

fn table_for(opts: &Options, needed: u64) -> Result<SignTable> {
    let limit = opts.limit.unwrap_or(needed);
    let dir = match &opts.cache_dir {
        None => return sieve_signs(&opts.rule, limit),
        Some(dir) => dir,
    };
    std::fs::create_dir_all(dir)?;
    let digest = opts.rule.digest();
    let path = dir.join(format!("{}-{limit}.mfs", hex::encode(digest)));
    if path.exists() {
        let mut table = load_table(&path)?;
        table.attach_rule(opts.rule.clone())?;
        if table.limit() != limit {
            return Err(Error::Format {
                offset: 9,
                msg: format!("cache {} holds limit {}", path.display(), table.limit()),
            });
        }
        // Spot check the cached bits at 100 deterministic pseudo-random
        // indices against a factorization-based recomputation.
        let mut state = u64::from_le_bytes(digest[..8].try_into().unwrap()) | 1;
        for _ in 0..100 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let n = 1 + (state >> 11) % limit;
            if table.sign(n) != factored_sign(&table, &opts.rule, n)? {
                return Err(Error::Format {
                    offset: 49,
                    msg: format!(
                        "cache {} disagrees with the rule at n = {n}",
                        path.display()
                    ),
                });
            }
        }
        return Ok(table);
    }
    let table = sieve_signs(&opts.rule, limit)?;
    save_table(&table, &path)?;
    Ok(table)
}

fn require_x_u64(opts: &Options) -> Result<u64> {
    let x = opts
        .x
        .ok_or_else(|| Error::Config("this operation needs --x".into()))?;
    if !(x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64) {
        return Err(Error::Config(format!(
            "--x must be a positive integer, got {x}"
        )));
    }
    Ok(x as u64)
}

fn require_interval(opts: &Options) -> Result<Interval> {
    opts.interval
        .ok_or_else(|| Error::Config("this operation needs --interval lo:hi".into()))
}

fn parse_factors(opts: &Options, s: &str) -> Result<RatioProduct> {
    let mut out = RatioProduct::one();
    for part in s.split(',') {
        let part = part.trim();
        let (p, q) = part
            .split_once('/')
            .ok_or_else(|| Error::Config(format!("factor {part:?} must be p/q")))?;
        let p: u64 = p
            .parse()
            .map_err(|_| Error::Config(format!("bad factor numerator {p:?}")))?;
        let q: u64 = q
            .parse()
            .map_err(|_| Error::Config(format!("bad factor denominator {q:?}")))?;
        out.push(RatioFactor::new(p, q, &opts.rule)?);
    }
    Ok(out)
}

fn factors_json(product: &RatioProduct) -> Value {
    Value::Array(
        product
            .factors()
            .iter()
            .map(|f| json!([f.p, f.q]))
            .collect(),
    )
}

fn interval_json(i: &Interval) -> Value {
    json!({ "lo": i.lo(), "hi": i.hi() })
}

fn ceil_f64(x: f64) -> u64 {
    x.ceil().max(1.0) as u64
}

struct Record {
    op: &'static str,
    params: Value,
    value: Value,
    /// The headline rational for the CSV row.
    csv_value: Rat,
}

fn emit(opts: &Options, record: Record, started: Instant) {
    let runtime_ms = started.elapsed().as_millis() as u64;
    match opts.out {
        OutFormat::Json => {
            let rec = json!({
                "op": record.op,
                "params": record.params,
                "value": record.value,
                "runtime_ms": runtime_ms,
            });
            println!("{rec}");
        }
        OutFormat::Csv => {
            let digest = Sha256::digest(record.params.to_string().as_bytes());
            println!("op,param_digest,value_num,value_den,runtime_ms");
            println!(
                "{},{},{},{},{}",
                record.op,
                &hex::encode(digest)[..16],
                record.csv_value.numer(),
                record.csv_value.denom(),
                runtime_ms
            );
        }
    }
}

fn chain_config(opts: &Options) -> Result<ChainConfig> {
    match opts.mode {
        Mode::Paper => Ok(ChainConfig {
            rho_max: f64::NAN, // derived from beta2 in paper mode
            chain_y_coefficient: f64::NAN,
            s: None,
            gap_cap: opts.gap_cap,
            max_rungs: 256,
        }),
        Mode::Desk => {
            let rho_max = opts
                .rho_max
                .ok_or_else(|| Error::Config("desk chains need --rho-max".into()))?;
            let c = opts
                .chain_y_coefficient
                .ok_or_else(|| Error::Config("desk chains need --chain-y-coefficient".into()))?;
            Ok(ChainConfig {
                rho_max,
                chain_y_coefficient: c,
                s: opts.s,
                gap_cap: opts.gap_cap,
                max_rungs: 256,
            })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let started = Instant::now();
    let opts = resolve_options(&cli)?;
    let rule_desc = opts.rule.descriptor();
    let record = match &cli.cmd {
        Cmd::Sieve => {
            let limit = opts
                .limit
                .ok_or_else(|| Error::Config("sieve needs --limit".into()))?;
            let table = table_for(&opts, limit)?;
            let mean = table.mean_value(limit)?;
            Record {
                op: "sieve",
                params: json!({ "rule": rule_desc, "limit": limit }),
                value: json!({
                    "limit": limit,
                    "digest": hex::encode(table.rule_digest()),
                    "mean": rat_to_json(&mean),
                }),
                csv_value: mean,
            }
        }
        Cmd::Oscillate => {
            let x = require_x_u64(&opts)?;
            let table = table_for(&opts, x)?;
            let report = count_sign_changes(&table, x)?;
            Record {
                op: "oscillate",
                params: json!({ "rule": rule_desc, "x": x }),
                value: json!({
                    "changes": report.changes,
                    "agreements": report.agreements,
                    "paper_lower_bound": report.paper_lower_bound,
                    "bound_satisfied": report.bound_satisfied,
                }),
                csv_value: rat_u(report.changes, 1),
            }
        }
        Cmd::Sigma { alpha } => {
            let i = require_interval(&opts)?;
            let alpha = parse_ratio(alpha)?;
            let af = alpha.to_f64().unwrap_or(2.0);
            let table = table_for(&opts, i.hi().max(ceil_f64(af * i.hi() as f64) + 1))?;
            let count = sigma(&table, &i, &alpha)?;
            Record {
                op: "sigma",
                params: json!({
                    "rule": rule_desc,
                    "interval": interval_json(&i),
                    "alpha": rat_to_json(&alpha),
                }),
                value: json!(count),
                csv_value: rat_u(count, 1),
            }
        }
        Cmd::Integral { u0, u1 } => {
            let i = require_interval(&opts)?;
            let u0 = parse_ratio(u0)?;
            let u1 = parse_ratio(u1)?;
            let uf = u1.to_f64().unwrap_or(2.0);
            let table = table_for(&opts, i.hi().max(ceil_f64(uf * i.hi() as f64) + 1))?;
            let value = integral_sigma(&table, &i, &u0, &u1)?;
            Record {
                op: "integral",
                params: json!({
                    "rule": rule_desc,
                    "interval": interval_json(&i),
                    "u0": rat_to_json(&u0),
                    "u1": rat_to_json(&u1),
                }),
                value: rat_to_json(&value),
                csv_value: value,
            }
        }
        Cmd::Shift { delta, bound } => {
            let x = require_x_u64(&opts)?;
            let table = table_for(&opts, x + bound)?;
            let spec: ShiftSpec = match delta.as_str() {
                "mod3" => ShiftSpec::new(|n| (n % 3) as i64 - 1, *bound),
                other => {
                    let k: i64 = other.parse().map_err(|_| {
                        Error::Config(format!("--delta must be an integer or mod3, got {other:?}"))
                    })?;
                    ShiftSpec::new(move |_| k, *bound)
                }
            };
            let sum = shift_sum(&table, x, &spec)?;
            Record {
                op: "shift",
                params: json!({ "rule": rule_desc, "x": x, "delta": delta, "bound": bound }),
                value: json!(sum),
                csv_value: rat_u(sum, 1),
            }
        }
        Cmd::Shortmean { z, phi } => {
            let table = table_for(&opts, *z)?;
            let mean = short_interval_mean(&table, *z, *phi)?;
            Record {
                op: "shortmean",
                params: json!({ "rule": rule_desc, "z": z, "phi": phi }),
                value: rat_to_json(&mean),
                csv_value: mean,
            }
        }
        Cmd::Witness { n, p, q } => match (n, p, q) {
            (Some(n), Some(p), Some(q)) => {
                let pn = p
                    .checked_mul(*n)
                    .ok_or_else(|| Error::Config("p*n overflows".into()))?;
                let table = table_for(&opts, pn + 1)?;
                let m = locate_sign_change(&table, *n, *p, *q)?;
                Record {
                    op: "witness",
                    params: json!({ "rule": rule_desc, "n": n, "p": p, "q": q }),
                    value: json!({ "m": m, "window_lo": pn.saturating_sub(*q) + 1, "window_hi": pn }),
                    csv_value: rat_u(m, 1),
                }
            }
            (None, None, None) => {
                let x = require_x_u64(&opts)?;
                let table = table_for(&opts, 2 * x)?;
                let (d, dp, count) = pigeonhole_agreement_witness(&table, x)?;
                Record {
                    op: "witness",
                    params: json!({ "rule": rule_desc, "x": x }),
                    value: json!({ "delta": d, "delta_prime": dp, "count": count }),
                    csv_value: rat_u(count, 1),
                }
            }
            _ => {
                return Err(Error::Config(
                    "witness takes either --n/--p/--q together or none of them".into(),
                ))
            }
        },
        Cmd::Chain { save } => {
            let params = resolve_params(&opts)?;
            let config = chain_config(&opts)?;
            let chain = build_alpha_chain(&opts.rule, &params, &config)?;
            let file = chain.to_file();
            if let Some(path) = save {
                std::fs::write(path, serde_json::to_string_pretty(&file).unwrap())?;
            }
            let alphas: Vec<Value> = (0..=chain.t() + 1)
                .map(|i| rat_to_json(&chain.alpha(i)))
                .collect();
            let t = chain.t();
            Record {
                op: "chain",
                params: json!({
                    "rule": rule_desc,
                    "mode": if params.mode == Mode::Paper { "paper" } else { "desk" },
                    "x": params.x,
                    "rho_max": chain.rho_max(),
                }),
                value: json!({
                    "t": t,
                    "alphas": alphas,
                    "halt_lo": rat_to_json(chain.halt_lo()),
                    "rungs": serde_json::to_value(&file.rungs).unwrap(),
                }),
                csv_value: rat_u(t as u64, 1),
            }
        }
        Cmd::Approx { y1, y2 } => {
            let params = resolve_params(&opts)?;
            let config = chain_config(&opts)?;
            let y1 = parse_ratio(y1)?;
            let y2 = parse_ratio(y2)?;
            let chain = build_alpha_chain(&opts.rule, &params, &config)?;
            let theta = approximate_in_interval(&chain, &y1, &y2, opts.iteration_cap)?;
            Record {
                op: "approx",
                params: json!({
                    "rule": rule_desc,
                    "x": params.x,
                    "y1": rat_to_json(&y1),
                    "y2": rat_to_json(&y2),
                }),
                value: json!({
                    "theta": rat_to_json(theta.value()),
                    "k": theta.k(),
                    "factors": factors_json(&theta),
                }),
                csv_value: theta.value().clone(),
            }
        }
        Cmd::Reorder { factors } => {
            let input = parse_factors(&opts, factors)?;
            let out = reorder_prefix(&input)?;
            Record {
                op: "reorder",
                params: json!({ "rule": rule_desc, "factors": factors_json(&input) }),
                value: json!({
                    "factors": factors_json(&out),
                    "value": rat_to_json(out.value()),
                }),
                csv_value: out.value().clone(),
            }
        }
        Cmd::Matched { y } => {
            let s = opts.s.unwrap_or_else(|| paper_s(*y));
            let gap_cap = opts.gap_cap.unwrap_or(u64::MAX);
            let spec = find_matched_products(&opts.rule, *y, s, gap_cap)?;
            let (j_primes, j_floor) = prime_count_in_j(*y, s)?;
            Record {
                op: "matched",
                params: json!({ "rule": rule_desc, "y": y, "s": s, "gap_cap": gap_cap }),
                value: json!({
                    "m1": spec.m1,
                    "m2": spec.m2,
                    "d": spec.d,
                    "m1_factors": spec.m1_factors,
                    "m2_factors": spec.m2_factors,
                    "class_sizes": serde_json::to_value(&spec.class_sizes).unwrap(),
                    "s_y_size": spec.s_y_size,
                    "j_window": [spec.j_lo, spec.j_hi],
                    "j_prime_count": j_primes,
                    "j_prime_floor": j_floor,
                }),
                csv_value: rat_u(spec.m1, spec.m2),
            }
        }
        Cmd::Profile { factors } => {
            let i = require_interval(&opts)?;
            let product = parse_factors(&opts, factors)?;
            // Worst-case prefix value bounds the table size.
            let mut max_prefix = 1.0f64;
            let mut prefix = 1.0f64;
            for f in product.factors() {
                prefix *= f.p as f64 / f.q as f64;
                max_prefix = max_prefix.max(prefix);
            }
            let table = table_for(&opts, i.hi().max(ceil_f64(max_prefix * i.hi() as f64) + 1))?;
            let profile = mfo_core::chain::chain_prefix_sigma_profile(&table, &i, &product)?;
            let last = *profile.last().unwrap_or(&0);
            Record {
                op: "profile",
                params: json!({
                    "rule": rule_desc,
                    "interval": interval_json(&i),
                    "factors": factors_json(&product),
                }),
                value: json!(profile),
                csv_value: rat_u(last, 1),
            }
        }
        Cmd::Avoid {
            theta,
            denom_bound,
            width,
        } => {
            let theta = parse_ratio(theta)?;
            let width = parse_ratio(width)?;
            let (y1, y2) = interval_avoiding_denominators(&theta, *denom_bound, &width)?;
            Record {
                op: "avoid",
                params: json!({
                    "theta": rat_to_json(&theta),
                    "denom_bound": denom_bound,
                    "width": rat_to_json(&width),
                }),
                value: json!({
                    "y1": rat_to_json(&y1),
                    "y2": rat_to_json(&y2),
                    "y1_str": rat_string(&y1),
                    "y2_str": rat_string(&y2),
                }),
                csv_value: y1,
            }
        }
    };
    emit(&opts, record, started);
    Ok(())
}
