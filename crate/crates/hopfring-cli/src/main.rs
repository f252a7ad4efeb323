//! `hopfring`: reduce Dyer-Lashof words, enumerate bases, run verification suites.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or input error, 3 a degree budget
//! was exceeded.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use hopfring::dyer_lashof::{adem_reduce_with, DlElement, DlString, Schedule};
use hopfring::dyer_lashof::basis_r;
use hopfring::error::Error;
use hopfring::fp::Prime;
use hopfring::invariants::{basis_b, basis_coinv_dual, basis_cokernel, basis_invariants};
use hopfring::verify::{run_named, Report, Status, VerifyConfig};

#[derive(Parser, Debug)]
#[command(name = "hopfring", version, about = "Dyer-Lashof algebra and Hopf ring verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Odd prime
    #[arg(long, short, global = true, default_value_t = 3)]
    prime: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (defaults to all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rewrite a word such as "Q5 Q1" or "bQ4 Q2" to admissible form
    AdemReduce {
        word: String,
        /// Discard terms of negative excess, as in the quotient algebra
        #[arg(long)]
        drop_negative: bool,
    },
    /// Tabulate a basis per degree
    Basis {
        #[arg(long, value_enum)]
        kind: BasisKind,
        #[arg(long, short = 'n', default_value_t = 1)]
        rank: usize,
        /// Excess or cutoff bound k
        #[arg(long, short, default_value_t = 0)]
        cutoff: i64,
        #[arg(long, short, default_value_t = 30)]
        degree: i64,
    },
    /// Run verification suites
    Verify {
        /// Suite name or "all"
        #[arg(long, short, default_value = "all")]
        suite: String,
        #[arg(long, short = 'n', default_value_t = 3)]
        rank: usize,
        #[arg(long, short, default_value_t = 30)]
        degree: i64,
        /// Total-degree truncation for formal series
        #[arg(long, default_value_t = 12)]
        trunc: u32,
        /// Degree bound on intermediate circle products
        #[arg(long, default_value_t = 400)]
        budget: i64,
        /// Seed for randomized suites
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        /// List suite names and exit
        #[arg(long)]
        list: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum BasisKind {
    Invariants,
    #[value(name = "B")]
    #[serde(rename = "B")]
    B,
    Cokernel,
    #[value(name = "R")]
    #[serde(rename = "R")]
    R,
    Coinv,
}

/// Echoed into every JSON output.
#[derive(Serialize)]
struct RunConfig<'a> {
    command: &'a str,
    prime: u32,
    format: Format,
    output: Option<String>,
    jobs: Option<usize>,
    #[serde(flatten)]
    extra: Value,
}

enum Failure {
    Usage(String),
    Checks,
    Overflow,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Overflow { .. } => Failure::Overflow,
            e => Failure::Usage(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Overflow) => ExitCode::from(3),
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let p = Prime::new(cli.prime)?;
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let out = match &cli.command {
        Command::AdemReduce { word, drop_negative } => adem_reduce_cmd(cli, p, word, *drop_negative)?,
        Command::Basis { kind, rank, cutoff, degree } => basis_cmd(cli, p, *kind, *rank, *cutoff, *degree)?,
        Command::Verify { list: true, .. } => {
            let names: Vec<&str> = hopfring::verify::Suite::ALL.iter().map(|s| s.name()).collect();
            names.join("\n") + "\n"
        }
        Command::Verify { suite, rank, degree, trunc, budget, seed, samples, .. } => {
            if *rank == 0 || *degree < 1 {
                return Err(Failure::Usage("rank and degree must be positive".into()));
            }
            let cfg = VerifyConfig {
                prime: cli.prime,
                rank_max: *rank,
                degree_max: *degree,
                trunc: *trunc,
                budget: *budget,
                seed: *seed,
                samples: *samples,
            };
            let reports = run_named(suite, &cfg)?;
            let text = render_reports(cli, suite, &cfg, &reports)?;
            emit(cli, &text)?;
            let worst = reports.iter().map(Report::exit_code).max().unwrap_or(0);
            return match worst {
                0 => Ok(()),
                1 => Err(Failure::Checks),
                _ => Err(Failure::Overflow),
            };
        }
    };
    emit(cli, &out)
}

fn emit(cli: &Cli, text: &str) -> Result<(), Failure> {
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_config(cli: &Cli, command: &'static str, extra: Value) -> RunConfig<'static> {
    RunConfig {
        command,
        prime: cli.prime,
        format: cli.format,
        output: cli.out.as_ref().map(|p| p.display().to_string()),
        jobs: cli.jobs,
        extra,
    }
}

fn csv_string(rows: Vec<Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Usage(e.to_string()))
}

// ---- adem-reduce

/// Normal forms are cached as JSON files when HOPFRING_CACHE_DIR is set.
fn cached_reduce(word: &DlString, p: Prime, sched: Schedule) -> DlElement {
    let Some(dir) = std::env::var_os("HOPFRING_CACHE_DIR").map(PathBuf::from) else {
        return adem_reduce_with(&word.pairs, p, sched);
    };
    let tag = if sched == Schedule::LeftmostEager { "q" } else { "a" };
    let key = word.pairs.iter().map(|&(e, i)| format!("{e}.{i}")).collect::<Vec<_>>().join("_");
    let path = dir.join(format!("adem-p{}-{tag}-{key}.json", p.get()));
    if let Ok(s) = fs::read_to_string(&path) {
        if let Some(x) = serde_json::from_str(&s).ok().and_then(|v| DlElement::from_json(&v).ok()) {
            return x;
        }
    }
    let x = adem_reduce_with(&word.pairs, p, sched);
    // the cache is optional; a failed write only costs a recomputation
    if fs::create_dir_all(&dir).is_ok() {
        let _ = fs::write(&path, x.to_json().to_string());
    }
    x
}

fn adem_reduce_cmd(cli: &Cli, p: Prime, word: &str, drop_negative: bool) -> Result<String, Failure> {
    let w = DlString::parse(word)?;
    let sched = if drop_negative { Schedule::LeftmostEager } else { Schedule::LeftmostKeepExcess };
    let nf = cached_reduce(&w, p, sched);
    let terms = nf.sorted_terms();
    Ok(match cli.format {
        Format::Text => {
            let mut s = format!("{w} = {nf}\n");
            s.push_str(&format!("degree {}  excess {}\n", w.degree(p), w.excess(p)));
            for (t, c) in &terms {
                s.push_str(&format!("  {:>3}  {t}  excess {}\n", signed(*c, p), t.excess(p)));
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = terms
                .iter()
                .map(|(t, c)| json!({"string": t.pairs, "coef": c, "excess": t.excess(p)}))
                .collect();
            let cfg = run_config(cli, "adem-reduce", json!({"word": word, "drop_negative": drop_negative}));
            let v = json!({
                "run": cfg, "input": w.pairs, "degree": w.degree(p), "excess": w.excess(p),
                "normal_form": nf.to_json(), "terms": rows, "display": nf.to_string(),
            });
            serde_json::to_string_pretty(&v).unwrap() + "\n"
        }
        Format::Csv => {
            let mut rows = vec![vec!["coef".into(), "term".into(), "degree".into(), "excess".into()]];
            for (t, c) in &terms {
                rows.push(vec![signed(*c, p).to_string(), t.to_string(), t.degree(p).to_string(), t.excess(p).to_string()]);
            }
            csv_string(rows)?
        }
    })
}

fn signed(c: u32, p: Prime) -> i64 {
    if c > p.get() / 2 {
        c as i64 - p.as_i64()
    } else {
        c as i64
    }
}

// ---- basis

fn basis_cmd(cli: &Cli, p: Prime, kind: BasisKind, n: usize, k: i64, degree: i64) -> Result<String, Failure> {
    if n == 0 || n > 6 {
        return Err(Failure::Usage(format!("rank {n} out of range 1..=6")));
    }
    if degree < 0 || k < 0 {
        return Err(Failure::Usage("degree and cutoff must be nonnegative".into()));
    }
    let mut table: Vec<(i64, Vec<String>)> = Vec::new();
    for d in 0..=degree {
        let items: Vec<String> = match kind {
            BasisKind::Invariants => basis_invariants(n, p, d).iter().map(|s| s.to_string()).collect(),
            BasisKind::B => basis_b(n, p, k, d).iter().map(|s| s.to_string()).collect(),
            BasisKind::Cokernel => basis_cokernel(n, p, d).iter().map(|s| s.to_string()).collect(),
            BasisKind::R => basis_r(n, k, d, p).iter().map(|s| s.to_string()).collect(),
            BasisKind::Coinv => {
                let cut = (k > 0).then_some(k);
                basis_coinv_dual(n, p, cut, d).iter().map(|(_, h)| h.to_string()).collect()
            }
        };
        table.push((d, items));
    }
    Ok(match cli.format {
        Format::Text => {
            let mut s = String::new();
            for (d, items) in table.iter().filter(|(_, v)| !v.is_empty()) {
                s.push_str(&format!("d={d:<4} count={:<4} {}\n", items.len(), items.join("  ")));
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .iter()
                .map(|(d, v)| json!({"n": n, "k": k, "d": d, "count": v.len(), "strings": v}))
                .collect();
            let cfg = run_config(cli, "basis", json!({"kind": kind, "rank": n, "cutoff": k, "degree_max": degree}));
            serde_json::to_string_pretty(&json!({"run": cfg, "rows": rows})).unwrap() + "\n"
        }
        Format::Csv => {
            let mut rows = vec![vec!["n".into(), "k".into(), "d".into(), "count".into(), "strings".into()]];
            for (d, v) in &table {
                rows.push(vec![n.to_string(), k.to_string(), d.to_string(), v.len().to_string(), v.join(";")]);
            }
            csv_string(rows)?
        }
    })
}

// ---- verify

fn render_reports(cli: &Cli, suite: &str, cfg: &VerifyConfig, reports: &[Report]) -> Result<String, Failure> {
    Ok(match cli.format {
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                s.push_str(&r.to_text());
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            s.push_str(&format!("{} suites, {failed} with failures\n", reports.len()));
            s
        }
        Format::Json => {
            let run = run_config(cli, "verify", json!({"suite": suite, "config": cfg}));
            serde_json::to_string_pretty(&json!({"run": run, "reports": reports})).unwrap() + "\n"
        }
        Format::Csv => {
            let mut rows = vec![vec!["suite".into(), "check".into(), "status".into(), "detail".into()]];
            for r in reports {
                for c in &r.checks {
                    let status = match c.status {
                        Status::Pass => "pass",
                        Status::Fail => "fail",
                        Status::Skipped => "skipped",
                        Status::Overflow => "overflow",
                    };
                    rows.push(vec![r.suite.clone(), c.name.clone(), status.into(), c.detail.clone().unwrap_or_default()]);
                }
            }
            csv_string(rows)?
        }
    })
}
