use chernbott::combinatorics::{
    eulerian_bruteforce, forest_count, forest_count_bruteforce, verify_conjecture_polynomial,
    verify_conjecture_total,
};
use chernbott::exact_linalg::{hilbert_series_rank, projected_cells, MatrixCache, RankOptions};
use chernbott::exterior_algebra::{eulerian_identity_check, invariant_forms_hilbert};
use chernbott::groebner::{cohomology_poincare, MAX_VARS};
use chernbott::presentations::{
    compare_with_cohomology, groebner_series, verify_derivative_criterion, verify_presentation,
    verify_subset_independence, VerificationResult,
};
use chernbott::{Error, HilbertSeries, DEFAULT_SEED};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

/// Without --long-run, rank computations whose matrices add up to more
/// cells than this are refused.
const PROJECTED_CELL_LIMIT: u128 = 100_000_000;
/// Per-matrix cell cap under --long-run.
const LONG_RUN_MAX_CELLS: u128 = 2_000_000_000;
/// Largest n for the Groebner method without and with --long-run.
const GROEBNER_MAX_N: usize = 5;
const GROEBNER_LONG_RUN_MAX_N: usize = 7;
/// Integers above this are printed as strings.
const MAX_SAFE_INTEGER: u64 = (1 << 53) - 1;

#[derive(Parser)]
#[command(name = "chernbott", version, about = "Exact computations with curvature forms on complete flag varieties")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Emit JSON (default)
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV (series commands only)
    #[arg(long, global = true)]
    csv: bool,
    /// Directory for cached evaluation matrices
    #[arg(long, global = true, env = "CHERNBOTT_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Allow computations beyond the desk-scale caps
    #[arg(long, global = true)]
    long_run: bool,
    /// Seed for prime selection and random sampling
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Hilbert series
    #[command(subcommand)]
    Series(SeriesCommand),
    /// Verifications with a pass/fail verdict
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Combinatorial counts
    #[command(subcommand)]
    Count(CountCommand),
    /// Identity checks
    #[command(subcommand)]
    Check(CheckCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Rank,
    Groebner,
}

#[derive(Subcommand)]
enum SeriesCommand {
    /// Series of the algebra generated by k curvature forms on n vertices
    Ak {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Comma-separated form indices (rank method only; default 1..k)
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "rank")]
        method: Method,
        /// Compute exact ranks in every degree
        #[arg(long)]
        exact: bool,
    },
    /// Series of the invariant forms
    Invariant {
        #[arg(long)]
        n: usize,
    },
    /// Poincaré polynomial of the flag variety
    Cohomology {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Rank series against the power-sum ideal quotient
    Presentation {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Same series for every choice of k forms
    Subsets {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Membership by evaluation, normal form and derivatives agree
    Lemma29 {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Total dimensions against forest counts, or polynomial growth in n
    Conjecture14 {
        #[arg(long, conflicts_with_all = ["k", "n_range"])]
        max_n: Option<usize>,
        #[arg(long, requires = "n_range")]
        k: Option<usize>,
        /// Inclusive range A..B
        #[arg(long, requires = "k", value_parser = parse_range)]
        n_range: Option<(usize, usize)>,
    },
    /// Series of A_n against the cohomology ring, degree by degree
    Cohomology {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum CountCommand {
    /// Forests on n labeled vertices
    Forests {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        brute_force: bool,
    },
    /// Eulerian digraphs on n labeled vertices
    Eulerian {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Balanced generator subsets against the symmetric ones
    Prop24 {
        #[arg(long)]
        n: usize,
    },
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

/// A command's output: payload fields plus whether it counts as a pass.
struct Report {
    command: &'static str,
    parameters: Value,
    payload: Map<String, Value>,
    series: Option<HilbertSeries>,
    passed: bool,
}

impl Report {
    fn new(command: &'static str, parameters: Value, payload: Value) -> Self {
        let Value::Object(payload) = payload else {
            unreachable!("payload is an object")
        };
        Report {
            command,
            parameters,
            payload,
            series: None,
            passed: true,
        }
    }

    fn series(command: &'static str, parameters: Value, s: HilbertSeries, extra: Value) -> Self {
        let mut r = Report::new(
            command,
            parameters,
            json!({ "series": s.coefficients(), "total": s.total() }),
        );
        if let Value::Object(extra) = extra {
            r.payload.extend(extra);
        }
        r.series = Some(s);
        r
    }

    fn verification(command: &'static str, parameters: Value, v: VerificationResult) -> Self {
        let passed = v.passed();
        let mut payload = serde_json::to_value(&v).expect("serializable");
        payload.as_object_mut().unwrap().remove("elapsed_ms");
        let mut r = Report::new(command, parameters, payload);
        r.passed = passed;
        r
    }
}

fn rank_options(g: &Global, exact: bool) -> Result<RankOptions, Error> {
    let mut opts = RankOptions {
        seed: g.seed,
        exact,
        verify_extra_degree: true,
        ..RankOptions::default()
    };
    if g.long_run {
        opts.max_cells = LONG_RUN_MAX_CELLS;
    }
    if let Some(dir) = &g.cache_dir {
        opts.cache = Some(MatrixCache::new(dir)?);
    }
    Ok(opts)
}

fn check_projection(g: &Global, k: usize, n: usize) -> Result<(), Error> {
    let cells = projected_cells(k, n);
    if !g.long_run && cells > PROJECTED_CELL_LIMIT {
        return Err(Error::Resource(format!(
            "k = {k}, n = {n} projects to {cells} matrix cells; pass --long-run to attempt it"
        )));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Report, Error> {
    let g = &cli.global;
    Ok(match &cli.command {
        Command::Series(SeriesCommand::Ak {
            k,
            n,
            subset,
            method,
            exact,
        }) => {
            let (k, n) = (*k, *n);
            if k == 0 || k > n {
                return Err(Error::Argument(format!("need 1 ≤ k ≤ n, got k = {k}, n = {n}")));
            }
            let params = json!({ "k": k, "n": n, "method": match method { Method::Rank => "rank", Method::Groebner => "groebner" } });
            match method {
                Method::Rank => {
                    let subset = subset.clone().unwrap_or_else(|| (1..=k).collect());
                    if subset.len() != k {
                        return Err(Error::Argument(format!(
                            "--subset has {} entries but k = {k}",
                            subset.len()
                        )));
                    }
                    check_projection(g, k, n)?;
                    let opts = RankOptions {
                        wide: n > chernbott::edge_algebra::DEFAULT_MAX_N,
                        ..rank_options(g, *exact)?
                    };
                    let r = hilbert_series_rank(n, &subset, &opts)?;
                    let mut params = params;
                    params["subset"] = json!(subset);
                    Report::series(
                        "series ak",
                        params,
                        r.series,
                        json!({ "details": {
                            "primes": r.primes,
                            "exact_degrees": r.exact_degrees,
                            "disagreements": r.disagreements,
                        }}),
                    )
                }
                Method::Groebner => {
                    if subset.is_some() {
                        return Err(Error::Argument("--subset applies to the rank method only".into()));
                    }
                    if *exact {
                        return Err(Error::Argument("--exact applies to the rank method only".into()));
                    }
                    let cap = if g.long_run { GROEBNER_LONG_RUN_MAX_N } else { GROEBNER_MAX_N };
                    if n > cap || k > MAX_VARS {
                        return Err(Error::Resource(format!(
                            "Groebner method limited to n ≤ {cap}{}",
                            if g.long_run { "" } else { " without --long-run" }
                        )));
                    }
                    let (s, size) = groebner_series(k, n)?;
                    Report::series(
                        "series ak",
                        params,
                        s,
                        json!({ "details": { "basis_size": size, "order": "degrevlex" } }),
                    )
                }
            }
        }
        Command::Series(SeriesCommand::Invariant { n }) => {
            let s = invariant_forms_hilbert(*n, g.long_run)?;
            Report::series("series invariant", json!({ "n": n }), s, json!({}))
        }
        Command::Series(SeriesCommand::Cohomology { n }) => {
            let s = cohomology_poincare(*n)?;
            Report::series("series cohomology", json!({ "n": n }), s, json!({}))
        }
        Command::Verify(VerifyCommand::Presentation { k, n }) => {
            let v = verify_presentation(*k, *n, g.long_run, &rank_options(g, false)?)?;
            Report::verification("verify presentation", json!({ "k": k, "n": n }), v)
        }
        Command::Verify(VerifyCommand::Subsets { k, n }) => {
            let v = verify_subset_independence(*k, *n, g.long_run, &rank_options(g, false)?)?;
            Report::verification("verify subsets", json!({ "k": k, "n": n }), v)
        }
        Command::Verify(VerifyCommand::Lemma29 { k, n, samples }) => {
            let v = verify_derivative_criterion(*k, *n, *samples, g.seed, g.long_run)?;
            Report::verification(
                "verify lemma29",
                json!({ "k": k, "n": n, "samples": samples }),
                v,
            )
        }
        Command::Verify(VerifyCommand::Cohomology { n }) => {
            let v = compare_with_cohomology(*n, g.long_run, &rank_options(g, false)?)?;
            Report::verification("verify cohomology", json!({ "n": n }), v)
        }
        Command::Verify(VerifyCommand::Conjecture14 { max_n, k, n_range }) => {
            let opts = rank_options(g, false)?;
            let (report, params) = match (max_n, k, n_range) {
                (Some(m), None, None) => (
                    verify_conjecture_total(*m, g.long_run, &opts)?,
                    json!({ "max_n": m }),
                ),
                (None, Some(k), Some((a, b))) => {
                    check_projection(g, *k, *b)?;
                    (
                        verify_conjecture_polynomial(*k, *a..=*b, &opts)?,
                        json!({ "k": k, "n_range": [a, b] }),
                    )
                }
                _ => {
                    return Err(Error::Argument(
                        "give either --max-n or both --k and --n-range".into(),
                    ))
                }
            };
            let passed = report.passed();
            let mut payload = serde_json::to_value(&report).expect("serializable");
            payload["verdict"] = json!(if passed { "pass" } else { "fail" });
            let mut r = Report::new("verify conjecture14", params, payload);
            r.passed = passed;
            r
        }
        Command::Count(CountCommand::Forests { n, brute_force }) => {
            let count = if *brute_force {
                forest_count_bruteforce(*n)?
            } else {
                forest_count(*n)
            };
            let mut params = json!({ "n": n });
            if *brute_force {
                params["brute_force"] = json!(true);
            }
            Report::new("count forests", params, json!({ "count": count.to_string() }))
        }
        Command::Count(CountCommand::Eulerian { n }) => {
            let count = eulerian_bruteforce(*n)?;
            Report::new(
                "count eulerian",
                json!({ "n": n }),
                json!({ "count": count.to_string() }),
            )
        }
        Command::Check(CheckCommand::Prop24 { n }) => {
            let r = eulerian_identity_check(*n, g.long_run)?;
            Report::new(
                "check prop24",
                json!({ "n": n }),
                json!({
                    "z": r.z,
                    "symmetric_count": r.symmetric_count,
                    "implied_eul": r.implied_eul,
                    "verdict": "pass",
                }),
            )
        }
    })
}

/// Replaces integers beyond 2^53 with their decimal strings.
fn protect_integers(v: &mut Value) {
    match v {
        Value::Number(x) => {
            let big = x.as_u64().is_some_and(|u| u > MAX_SAFE_INTEGER)
                || x.as_i64().is_some_and(|i| i.unsigned_abs() > MAX_SAFE_INTEGER);
            if big {
                *v = Value::String(x.to_string());
            }
        }
        Value::Array(items) => items.iter_mut().for_each(protect_integers),
        Value::Object(map) => map.values_mut().for_each(protect_integers),
        _ => {}
    }
}

fn render_json(report: Report, g: &Global, elapsed_ms: u128) -> String {
    let mut out = report.payload;
    out.insert("command".into(), json!(report.command));
    out.insert("parameters".into(), report.parameters);
    out.insert("seed".into(), json!(g.seed));
    out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    out.insert("elapsed_ms".into(), json!(elapsed_ms as u64));
    let mut v = Value::Object(out);
    protect_integers(&mut v);
    serde_json::to_string(&v).expect("serializable")
}

fn render_csv(s: &HilbertSeries) -> String {
    let mut out = String::from("degree,dimension\n");
    for (d, c) in s.coefficients().iter().enumerate() {
        out.push_str(&format!("{d},{c}\n"));
    }
    out.pop();
    out
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::Parse(_) => 2,
        Error::Resource(_) => 3,
        Error::Invariant(_) | Error::NotFiniteDimensional | Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let g = &cli.global;
    if let Some(t) = g.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .expect("thread pool configured once");
    }
    let start = Instant::now();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let elapsed = start.elapsed().as_millis();
    let passed = report.passed;
    if g.csv {
        let Some(series) = &report.series else {
            eprintln!("error: --csv is available for series commands only");
            return ExitCode::from(2);
        };
        println!("{}", render_csv(series));
    } else {
        println!("{}", render_json(report, g, elapsed));
    }
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
