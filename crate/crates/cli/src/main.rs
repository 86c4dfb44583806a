//! `vdw`: compute, bound, construct, and verify generalized van der Waerden
//! triple numbers N(a,b;r).
//!
//! Exit codes: 0 conclusive, 1 invalid (bad certificate / inapplicable
//! construction), 2 internal error or overflow, 3 usage.

mod cache;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, Subcommand};
use vdw_triples::bounds::bound_report;
use vdw_triples::checker::verify_certificate;
use vdw_triples::constructions::{
    block_thm24, block_thm25, certify_coloring, log_interval, parity_doubling,
    power_interval_thm41, recursive_extension, split_interval, thm41_k, PTag,
};
use vdw_triples::search::compute_n;
use vdw_triples::{
    ABParams, CertKind, Certificate, Coloring, Error, SearchConfig, SearchOutcome, Verdict,
};

use cache::ResultsCache;

#[derive(Parser)]
#[command(name = "vdw", version, about = "Exact N(a,b;r) computation and verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute N(a,b;r) exactly by exhaustive search.
    Compute {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long, default_value_t = 2)]
        r: u64,
        /// Give up (with a verified lower bound) once a triple-free coloring
        /// of [1,cap] is found.
        #[arg(long, default_value_t = 2000)]
        cap: u64,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Also write the witness certificate here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a certificate file.
    Verify { path: PathBuf },
    /// Generate an avoidance-coloring certificate.
    Construct {
        /// parity | thm24 | thm25 | prop31 | prop32 | thm31 | thm32 | thm41
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        a: Option<u64>,
        #[arg(long)]
        b: Option<u64>,
        #[arg(long)]
        r: Option<u64>,
        /// Domain size for the prefix schemes (parity, thm31, thm32, thm41).
        #[arg(long, default_value_t = 100_000)]
        n: u64,
        /// Interval ratio, "sqrtD" or "u/v" (thm31, thm32).
        #[arg(long)]
        p: Option<String>,
        /// Block base (thm32).
        #[arg(long)]
        q: Option<u64>,
        /// Color count for thm32 (even).
        #[arg(long)]
        modulus: Option<u64>,
        /// Full-scan the coloring and refuse to emit anything unverified.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the N(a,b;r) grid.
    Table {
        #[arg(long, default_value_t = 7)]
        max_a: u64,
        #[arg(long, default_value_t = 7)]
        max_b: u64,
        #[arg(long, default_value_t = 2)]
        r: u64,
        /// Search budget per cell; bound formulas and cache hits are free.
        #[arg(long, default_value_t = 5.0)]
        budget_seconds_per_cell: f64,
        /// csv | md
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print every applicable closed-form bound for one instance.
    Bounds {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: u64,
        #[arg(long, default_value_t = 2)]
        r: u64,
    },
    /// Reproduce the dor(a,b) summary table.
    DorTable {
        #[arg(long, default_value_t = 3)]
        max_a: u64,
        #[arg(long, default_value_t = 9)]
        max_b: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::InvalidParams(_) => 3,
                Error::Inapplicable(_) | Error::InvalidCertificate(_) => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.cmd {
        Cmd::Compute { a, b, r, cap, threads, out } => cmd_compute(a, b, r, cap, threads, out),
        Cmd::Verify { path } => cmd_verify(&path),
        Cmd::Construct { scheme, a, b, r, n, p, q, modulus, check, out } => {
            cmd_construct(&scheme, a, b, r, n, p, q, modulus, check, out)
        }
        Cmd::Table { max_a, max_b, r, budget_seconds_per_cell, format, out } => {
            cmd_table(max_a, max_b, r, budget_seconds_per_cell, &format, out)
        }
        Cmd::Bounds { a, b, r } => cmd_bounds(a, b, r),
        Cmd::DorTable { max_a, max_b } => cmd_dor_table(max_a, max_b),
    }
}

fn write_out(out: Option<&PathBuf>, cert: &Certificate) -> Result<(), Error> {
    if let Some(path) = out {
        std::fs::write(path, cert.to_json())?;
    }
    Ok(())
}

fn cmd_compute(
    a: u64,
    b: u64,
    r: u64,
    cap: u64,
    threads: Option<usize>,
    out: Option<PathBuf>,
) -> Result<u8, Error> {
    let params = ABParams::new(a, b, r)?;
    if let Some(t) = threads {
        // Best effort: fails only if a global pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let mut cache = ResultsCache::open()?;
    if let Some(n) = cache.lookup_exact(a, b, r) {
        println!("N({a},{b};{r}) = {n}");
        println!("(cached, certificate re-verified)");
        return Ok(0);
    }
    let start = Instant::now();
    let outcome = compute_n(params, SearchConfig { cap, ..Default::default() })?;
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        SearchOutcome::Exact { n, witness } => {
            println!("N({a},{b};{r}) = {n}");
            cache.store_exact(a, b, r, n, &witness, seconds)?;
            write_out(out.as_ref(), &witness)?;
            Ok(0)
        }
        SearchOutcome::LowerBound { cap, witness } => {
            println!("N({a},{b};{r}) >= {cap}");
            write_out(out.as_ref(), &witness)?;
            Ok(0)
        }
        SearchOutcome::NonExistent { .. } => {
            println!("dne (b = 2a)");
            cache.store_dne(a, b, r)?;
            Ok(0)
        }
        SearchOutcome::Inconclusive { best, witness } => {
            println!("inconclusive: N({a},{b};{r}) >= {}", best + 1);
            write_out(out.as_ref(), &witness)?;
            Ok(0)
        }
    }
}

fn cmd_verify(path: &std::path::Path) -> Result<u8, Error> {
    let text = std::fs::read_to_string(path)?;
    let cert = Certificate::from_json(&text)?;
    match verify_certificate(&cert) {
        Verdict::Valid => {
            let claim = match cert.kind {
                CertKind::LowerBoundWitness => {
                    format!("N({},{};{}) >= {}", cert.a, cert.b, cert.r, cert.n + 1)
                }
                CertKind::DnePrefixWitness => format!(
                    "triple-free prefix [1,{}] of the infinite b = 2a coloring",
                    cert.n
                ),
                CertKind::ProgressionWitness => format!(
                    "no monochromatic {}-term {}-progression on [1,{}]",
                    thm41_k(cert.a),
                    cert.a,
                    cert.n
                ),
            };
            println!("valid: {claim}");
            Ok(0)
        }
        Verdict::Invalid(reason) => {
            println!("invalid: {reason}");
            Ok(1)
        }
    }
}

fn need(flag: &str, v: Option<u64>) -> Result<u64, Error> {
    v.ok_or_else(|| Error::InvalidParams(format!("--{flag} is required for this scheme")))
}

/// Builds the r-color certificate by extending the 2-color block coloring
/// one fresh color at a time.
fn recursive_cert(a: u64, b: u64, r: u64) -> Result<Certificate, Error> {
    let mut cert = if a == 1 && b >= 3 { block_thm25(b)? } else { block_thm24(a, b)? };
    for step in 3..=r {
        cert = recursive_extension(&cert, a, b, step)?;
    }
    Ok(cert)
}

#[allow(clippy::too_many_arguments)]
fn cmd_construct(
    scheme: &str,
    a: Option<u64>,
    b: Option<u64>,
    r: Option<u64>,
    n: u64,
    p: Option<String>,
    q: Option<u64>,
    modulus: Option<u64>,
    check: bool,
    out: Option<PathBuf>,
) -> Result<u8, Error> {
    let raw_cert = |params: ABParams, coloring: &Coloring, kind, meta: String| Certificate {
        a: params.a,
        b: params.b,
        r: params.r,
        kind,
        n: coloring.n(),
        colors: coloring.colors().to_vec(),
        meta,
    };
    let finish = |params: ABParams, coloring: Coloring, kind, meta: String| {
        if check {
            certify_coloring(params, &coloring, kind, meta)
        } else {
            Ok(raw_cert(params, &coloring, kind, meta))
        }
    };
    let cert = match scheme {
        "parity" => {
            let a = need("a", a)?;
            let params = ABParams::new(a, 2 * a, 2)?;
            finish(
                params,
                parity_doubling(n),
                CertKind::DnePrefixWitness,
                format!("2-adic parity coloring on [1,{n}]"),
            )?
        }
        "thm24" => block_thm24(need("a", a)?, need("b", b)?)?,
        "thm25" => block_thm25(need("b", b)?)?,
        "prop31" => recursive_cert(need("a", a)?, need("b", b)?, need("r", r)?)?,
        "prop32" => recursive_cert(1, need("b", b)?, need("r", r)?)?,
        "thm31" => {
            let (a, b) = (need("a", a)?, need("b", b)?);
            let r = match r {
                Some(r) => r,
                None => {
                    vdw_triples::bounds::dor_upper_thm31(a, b).ok_or_else(|| {
                        Error::Inapplicable(format!(
                            "the logarithmic coloring does not cover ({a},{b}); pass --r explicitly"
                        ))
                    })? + 1
                }
            };
            let p = match p {
                Some(s) => PTag::parse(&s)?,
                None => PTag::Sqrt(2),
            };
            let params = ABParams::new(a, b, r)?;
            finish(
                params,
                log_interval(p, r, n)?,
                CertKind::LowerBoundWitness,
                format!("logarithmic interval coloring, p = {p}, {r} colors"),
            )?
        }
        "thm32" => {
            let (a, b) = (need("a", a)?, need("b", b)?);
            let q = need("q", q)?;
            let m = need("modulus", modulus)?;
            let p = PTag::parse(
                p.as_deref()
                    .ok_or_else(|| Error::InvalidParams("--p is required for thm32".into()))?,
            )?;
            let params = ABParams::new(a, b, m)?;
            finish(
                params,
                split_interval(q, p, m, n)?,
                CertKind::LowerBoundWitness,
                format!("split interval coloring, q = {q}, p = {p}, {m} colors"),
            )?
        }
        "thm41" => {
            let a = need("a", a)?;
            let params = ABParams::new(a, a, 4)?;
            finish(
                params,
                power_interval_thm41(a, n)?,
                CertKind::ProgressionWitness,
                format!("power interval coloring for {}-term {a}-progressions", thm41_k(a)),
            )?
        }
        other => {
            return Err(Error::InvalidParams(format!(
                "unknown scheme '{other}' (want parity|thm24|thm25|prop31|prop32|thm31|thm32|thm41)"
            )))
        }
    };
    match cert.kind {
        CertKind::LowerBoundWitness => {
            println!("N({},{};{}) >= {}", cert.a, cert.b, cert.r, cert.n + 1)
        }
        CertKind::DnePrefixWitness => {
            println!("triple-free on [1,{}]; no finite N({},{};r) for r >= 2", cert.n, cert.a, cert.b)
        }
        CertKind::ProgressionWitness => println!(
            "no monochromatic {}-term {}-progression on [1,{}]",
            thm41_k(cert.a),
            cert.a,
            cert.n
        ),
    }
    write_out(out.as_ref(), &cert)?;
    Ok(0)
}

struct Cell {
    a: u64,
    b: u64,
    r: u64,
    /// exact | lower-bound | dne
    status: &'static str,
    value: u64,
    source: String,
    seconds: f64,
}

fn table_cell(a: u64, b: u64, r: u64, budget: f64, cache: &mut ResultsCache) -> Result<Cell, Error> {
    let params = ABParams::new(a, b, r)?;
    if b == 2 * a {
        return Ok(Cell { a, b, r, status: "dne", value: 0, source: "Theorem 2.1".into(), seconds: 0.0 });
    }
    if let Some(n) = cache.lookup_exact(a, b, r) {
        return Ok(Cell { a, b, r, status: "exact", value: n, source: "cache".into(), seconds: 0.0 });
    }
    let report = bound_report(params)?;
    let mut best_lower = report.best_lower.unwrap_or(1);
    let mut source = report
        .lower
        .iter()
        .filter(|&&(v, _)| Some(v) == report.best_lower)
        .map(|&(_, s)| s.to_string())
        .next()
        .unwrap_or_else(|| "trivial".into());
    let mut seconds = 0.0;
    if budget > 0.0 {
        let start = Instant::now();
        let config = SearchConfig {
            cap: 2000,
            deadline: Some(start + Duration::from_secs_f64(budget)),
            ..Default::default()
        };
        let outcome = compute_n(params, config)?;
        seconds = start.elapsed().as_secs_f64();
        match outcome {
            SearchOutcome::Exact { n, witness } => {
                cache.store_exact(a, b, r, n, &witness, seconds)?;
                return Ok(Cell { a, b, r, status: "exact", value: n, source: "search".into(), seconds });
            }
            SearchOutcome::LowerBound { cap, .. } if cap + 1 > best_lower => {
                best_lower = cap + 1;
                source = "search (cap)".into();
            }
            SearchOutcome::Inconclusive { best, .. } if best + 1 > best_lower => {
                best_lower = best + 1;
                source = "search (partial)".into();
            }
            _ => {}
        }
    }
    Ok(Cell { a, b, r, status: "lower-bound", value: best_lower, source, seconds })
}

fn cmd_table(
    max_a: u64,
    max_b: u64,
    r: u64,
    budget: f64,
    format: &str,
    out: Option<PathBuf>,
) -> Result<u8, Error> {
    let mut cache = ResultsCache::open()?;
    let mut cells = Vec::new();
    for a in 1..=max_a {
        for b in a..=max_b {
            cells.push(table_cell(a, b, r, budget, &mut cache)?);
        }
    }
    let body = match format {
        "csv" => {
            let mut s = String::from("a,b,r,status,value,source,seconds\n");
            for c in &cells {
                let value = if c.status == "dne" { String::new() } else { c.value.to_string() };
                s += &format!(
                    "{},{},{},{},{},{},{:.3}\n",
                    c.a, c.b, c.r, c.status, value, c.source, c.seconds
                );
            }
            s
        }
        // The markdown form omits the timing column so the bytes are
        // reproducible run to run.
        "md" => {
            let mut s = String::from("| a | b | r | status | value | source |\n|---|---|---|---|---|---|\n");
            for c in &cells {
                let value = match c.status {
                    "dne" => "dne".to_string(),
                    "exact" => c.value.to_string(),
                    _ => format!(">= {}", c.value),
                };
                s += &format!("| {} | {} | {} | {} | {} | {} |\n", c.a, c.b, c.r, c.status, value, c.source);
            }
            s
        }
        other => {
            return Err(Error::InvalidParams(format!("unknown format '{other}' (want csv|md)")))
        }
    };
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(0)
}

fn cmd_bounds(a: u64, b: u64, r: u64) -> Result<u8, Error> {
    let report = bound_report(ABParams::new(a, b, r)?)?;
    println!("bounds for N({a},{b};{r}):");
    if report.lower.is_empty() && report.upper.is_empty() {
        println!("  no finite N: b = 2a (Theorem 2.1)");
    }
    for (v, src) in &report.lower {
        println!("  lower {v}  ({src})");
    }
    for (v, src) in &report.upper {
        println!("  upper {v}  ({src})");
    }
    if let Some(v) = report.best_lower {
        println!("  best lower: {v}");
    }
    if let Some(v) = report.best_upper {
        println!("  best upper: {v}");
    }
    if let Some(n) = ResultsCache::open()?.lookup_exact(a, b, r) {
        println!("  exact (cached, re-verified): {n}");
    }
    println!("  dor: {}", report.dor);
    for note in &report.notes {
        println!("  note: {note}");
    }
    Ok(0)
}

fn cmd_dor_table(max_a: u64, max_b: u64) -> Result<u8, Error> {
    for a in 1..=max_a {
        for b in a..=max_b {
            println!("{}", vdw_triples::bounds::dor_summary(a, b)?);
        }
    }
    Ok(0)
}
