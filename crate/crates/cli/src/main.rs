//! Command-line front end. Every command prints one JSON result document.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or domain error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use mub6::analytic::{build_triplet, inequivalence_report, triplet_params, zauner_construction};
use mub6::certify::{
    cell_block, certify_region, compute_ort, triangle_cells, CellParams, DtildeFilter, GridSpec, OrtTable,
    RegionManifest, RegionOptions,
};
use mub6::families::{continue_vector, degeneracy_matrices, orbit_table};
use mub6::fourier::build_f;
use mub6::linalg::{gram_residual, inner_product, unbiasedness_residual, ComplexMatrix6, Vector6, ANALYTIC_TOL};
use mub6::vecsearch::{find_unbiased_vectors, quartet_extension_scan, SearchSettings};
use mub6::{FourierParams, PhaseVector};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "mub6", version, about = "Mutually unbiased bases in dimension six")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The analytic triplet (Id, F(0, b(t)), C(t)).
    Triplet {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real)]
        t: f64,
    },
    /// All vectors unbiased to Id and F(a, b), and the bases they form.
    Vectors {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Interval-certified elimination of quartets on a set of cells.
    Certify(CertifyArgs),
    /// Build the N'-orthogonality table and write it to a file.
    OrtTable {
        #[arg(long = "Nprime", default_value_t = 19)]
        nprime: u32,
        #[arg(long, default_value_t = 7)]
        generations: u32,
        /// Binary table output.
        #[arg(long)]
        table: PathBuf,
    },
    /// Clock/shift orbit table of each unbiased vector found at (a, b).
    Orbit {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Continue every unbiased vector at (from_a, from_b) to (a, b).
    Continue {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, value_parser = parse_real)]
        from_a: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true, value_parser = parse_real)]
        from_b: f64,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// The circulant-block triplet (Id, E1(x), E2(x)).
    Zauner {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real)]
        x: f64,
    },
    /// Haagerup invariants of the triplet transition matrix and of T(x).
    Haagerup {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real)]
        t: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_real)]
        x: f64,
    },
}

/// A decimal or a fraction `p/q`.
fn parse_real(s: &str) -> Result<f64, String> {
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|e| format!("{e}"))?;
            let q: f64 = q.trim().parse().map_err(|e| format!("{e}"))?;
            p / q
        }
        None => s.trim().parse().map_err(|e| format!("{e}"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{s} is not a finite number"))
    }
}

#[derive(Args, Debug, Serialize)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_real)]
    a: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_real)]
    b: f64,
}

#[derive(Args, Debug, Serialize)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    trials: usize,
    /// Objective gap accepted as the global maximum.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl SearchArgs {
    fn settings(&self) -> SearchSettings {
        SearchSettings { trials: self.trials, opt_tolerance: self.tol, rng_seed: self.seed, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
enum FilterArg {
    JointWithF,
    CtildeOnly,
}

#[derive(Args, Debug, Serialize)]
struct CertifyArgs {
    #[arg(long = "N", default_value_t = 180)]
    n: u32,
    #[arg(long = "Nprime", default_value_t = 19)]
    nprime: u32,
    #[arg(long, default_value_t = 7)]
    generations: u32,
    /// Cells as `a,b;a,b;...` indices, `block:a,b,rows,cols`, or `triangle`.
    #[arg(long, default_value = "block:10,3,3,3")]
    cells: String,
    /// ORT table file, loaded if it matches and written otherwise.
    #[arg(long)]
    ort: Option<PathBuf>,
    /// Directory for per-cell checkpoints and the manifest.
    #[arg(long)]
    checkpoint_dir: Option<PathBuf>,
    /// Reuse checkpoints already in the checkpoint directory.
    #[arg(long)]
    resume: bool,
    #[arg(long, value_enum, default_value = "joint-with-f")]
    dtilde_filter: FilterArg,
}

#[derive(Serialize)]
struct ResultDocument {
    schema_version: u32,
    tool_version: &'static str,
    command: &'static str,
    config: Value,
    verified: bool,
    results: Value,
    timing: Timing,
}

#[derive(Serialize)]
struct Timing {
    wall_time_secs: f64,
}

/// A domain error from the library, reported with exit code 2.
#[derive(Debug)]
struct DomainError(mub6::Error);

impl std::fmt::Display for DomainError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for DomainError {}

trait Domain<T> {
    fn domain(self) -> anyhow::Result<T>;
}

impl<T> Domain<T> for mub6::Result<T> {
    fn domain(self) -> anyhow::Result<T> {
        self.map_err(|e| match e {
            mub6::Error::Io(e) => anyhow::Error::new(e),
            e => anyhow::Error::new(DomainError(e)),
        })
    }
}

fn pairs(v: &Vector6) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn max_residual_to(v: &Vector6, m: &ComplexMatrix6) -> f64 {
    m.columns().iter().map(|c| unbiasedness_residual(v, c)).fold(0.0, f64::max)
}

fn parse_cells(spec: &str, n: u32) -> anyhow::Result<Vec<CellParams>> {
    let spec = spec.trim();
    if spec == "triangle" {
        return Ok(triangle_cells(n));
    }
    let nums = |s: &str| -> anyhow::Result<Vec<u32>> {
        s.split(',').map(|x| x.trim().parse::<u32>().with_context(|| format!("bad cell index {x:?}"))).collect()
    };
    if let Some(rest) = spec.strip_prefix("block:") {
        let v = nums(rest)?;
        anyhow::ensure!(v.len() == 4, "block needs a,b,rows,cols");
        return Ok(cell_block(v[0], v[1], v[2], v[3], n));
    }
    spec.split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            let v = nums(s)?;
            anyhow::ensure!(v.len() == 2, "cell needs a,b");
            Ok(CellParams::new(v[0], v[1], n))
        })
        .collect()
}

fn run(cli: &Cli) -> anyhow::Result<(&'static str, Value, bool, Value)> {
    Ok(match &cli.command {
        Command::Triplet { t } => {
            let (id, f, c) = build_triplet(*t).domain()?;
            let p = triplet_params(*t).domain()?;
            let unb = id.unbiasedness_residual(&f).max(id.unbiasedness_residual(&c)).max(f.unbiasedness_residual(&c));
            let (lhs, rhs) = p.circle_identity_sides();
            let res = json!({
                "params": p,
                "b": p.b,
                "f": f.to_pairs(),
                "c": c.to_pairs(),
                "unbiasedness_residual": unb,
                "unitarity_residual_c": c.unitarity_residual(),
                "circle_identity_residual": (lhs - rhs).abs(),
            });
            let ok = unb < ANALYTIC_TOL && c.unitarity_residual() < ANALYTIC_TOL;
            ("triplet", json!({ "t": t }), ok, res)
        }
        Command::Vectors { params, search } => {
            let settings = search.settings();
            let catalog = find_unbiased_vectors(FourierParams::new(params.a, params.b), &settings).domain()?;
            let extends = quartet_extension_scan(&catalog);
            let res = json!({
                "vector_count": catalog.vectors.len(),
                "basis_count": catalog.bases.len(),
                "vector_count_with_multiplicity": catalog.vector_count_with_multiplicity(),
                "basis_count_with_multiplicity": catalog.basis_count_with_multiplicity(),
                "quartet_extension": extends,
                "max_unbiasedness_residual": catalog.max_unbiasedness_residual(),
                "converged_trials": catalog.converged_trials,
                "vectors": catalog.vectors.iter().map(|v| v.phases()).collect::<Vec<_>>(),
                "multiplicities": catalog.multiplicities,
                "bases": catalog.bases,
            });
            ("vectors", json!({ "params": params, "settings": settings }), !extends, res)
        }
        Command::Certify(args) => {
            let grid = GridSpec::new(args.n, args.nprime, args.generations).domain()?;
            let cells = parse_cells(&args.cells, args.n)?;
            // checked again by the region search; failing here skips the table build
            if let Some(c) = cells.iter().find(|c| !c.meets_fundamental_domain()) {
                return Err(DomainError(mub6::Error::Precondition(format!("cell {c:?} is outside the triangle"))).into());
            }
            anyhow::ensure!(!cells.is_empty(), "no cells given");
            let table = match &args.ort {
                Some(p) => OrtTable::load_or_compute(p, args.nprime, args.generations).domain()?,
                None => compute_ort(args.nprime, args.generations),
            };
            let filter = match args.dtilde_filter {
                FilterArg::JointWithF => DtildeFilter::JointWithF,
                FilterArg::CtildeOnly => DtildeFilter::CtildeOnly,
            };
            if let (Some(dir), false) = (&args.checkpoint_dir, args.resume) {
                // a fresh run must not pick up stale reports
                for cell in &cells {
                    let p = mub6::certify::checkpoint_path(dir, cell);
                    if p.exists() {
                        std::fs::remove_file(&p)?;
                    }
                }
            }
            let opts = RegionOptions { checkpoint_dir: args.checkpoint_dir.clone(), filter };
            let reports = certify_region(&cells, &grid, &table, &opts).domain()?;
            let manifest = RegionManifest::from_reports(grid, filter, table.count(), &reports);
            if let Some(dir) = &args.checkpoint_dir {
                manifest.save(&dir.join("manifest.json")).domain()?;
            }
            let summary: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({
                        "cell": r.cell,
                        "fub_size": r.fub_size,
                        "ctilde_count": r.ctilde_count,
                        "dtilde_found": r.dtilde_found,
                        "candidate_count": r.candidate_count,
                        "max_col_d_size": r.max_col_d_size,
                    })
                })
                .collect();
            let res = json!({ "manifest": manifest, "cells": summary });
            ("certify", serde_json::to_value(args)?, manifest.certified, res)
        }
        Command::OrtTable { nprime, generations, table } => {
            GridSpec::new(1000, *nprime, *generations).domain()?;
            let t = compute_ort(*nprime, *generations);
            t.save(table).domain()?;
            let res = json!({
                "count": t.count(),
                "fraction": t.count() as f64 / (*nprime as f64).powi(5),
                "path": table,
            });
            ("ort-table", json!({ "Nprime": nprime, "generations": generations }), true, res)
        }
        Command::Orbit { params, search } => {
            let p = FourierParams::new(params.a, params.b);
            let catalog = find_unbiased_vectors(p, &search.settings()).domain()?;
            let both = build_f(p);
            let id = ComplexMatrix6::identity();
            let mut worst_unb = 0.0f64;
            let mut worst_gram = 0.0f64;
            let mut tables = Vec::new();
            for v in &catalog.vectors {
                let t = orbit_table(&v.to_vector(), p).domain()?;
                for x in t.iter().flatten() {
                    worst_unb = worst_unb.max(max_residual_to(x, &both)).max(max_residual_to(x, &id));
                }
                for row in &t {
                    worst_gram = worst_gram.max(gram_residual(row));
                }
                for col in 0..3 {
                    worst_gram = worst_gram.max(inner_product(&t[0][col], &t[1][col]).norm());
                }
                tables.push(t.map(|row| row.map(|x| pairs(&x))));
            }
            let ok = worst_unb < 1e-8 && worst_gram < 1e-10;
            let res = json!({
                "vector_count": catalog.vectors.len(),
                "max_unbiasedness_residual": worst_unb,
                "max_row_column_gram_residual": worst_gram,
                "tables": tables,
            });
            ("orbit", json!({ "params": params, "settings": search.settings() }), ok, res)
        }
        Command::Continue { from_a, from_b, params, steps, search } => {
            anyhow::ensure!(*steps >= 1, "steps must be at least 1");
            let start = FourierParams::new(*from_a, *from_b);
            let end = FourierParams::new(params.a, params.b);
            let path: Vec<FourierParams> = (0..=*steps)
                .map(|i| {
                    let s = i as f64 / *steps as f64;
                    FourierParams::new(start.a + s * (end.a - start.a), start.b + s * (end.b - start.b))
                })
                .collect();
            let catalog = find_unbiased_vectors(start, &search.settings()).domain()?;
            let f0 = build_f(start);
            let mut endpoints: Vec<PhaseVector> = Vec::new();
            let mut failures = Vec::new();
            for (i, v) in catalog.vectors.iter().enumerate() {
                let rank = degeneracy_matrices(&v.to_vector(), &f0).rank_n;
                match continue_vector(v, &path, 1e-10) {
                    Ok(out) => endpoints.push(*out.last().expect("non-empty path")),
                    Err(e) => failures.push(json!({ "index": i, "rank_n": rank, "error": e.to_string() })),
                }
            }
            let fe = build_f(end);
            let worst = endpoints.iter().map(|v| max_residual_to(&v.to_vector(), &fe)).fold(0.0, f64::max);
            let mut distinct = endpoints.clone();
            distinct.sort_by(|a, b| a.canonical_cmp(b));
            let distinct = mub6::vecsearch::dedupe(distinct, 1e-5).len();
            let ok = failures.is_empty() && worst < 1e-10 && distinct == endpoints.len();
            let res = json!({
                "start_count": catalog.vectors.len(),
                "endpoint_count": endpoints.len(),
                "distinct_endpoints": distinct,
                "max_endpoint_residual": worst,
                "endpoints": endpoints.iter().map(|v| v.phases()).collect::<Vec<_>>(),
                "failures": failures,
            });
            let cfg = json!({ "from": [from_a, from_b], "to": [params.a, params.b], "steps": steps, "settings": search.settings() });
            ("continue", cfg, ok, res)
        }
        Command::Zauner { x } => {
            let z = zauner_construction(*x).domain()?;
            let hadamard = [&z.t, &z.e1, &z.e2].iter().all(|m| m.is_complex_hadamard(1e-12));
            let ok = hadamard && z.factorization_residual() < 1e-12 && z.triplet_residual() < ANALYTIC_TOL;
            let res = json!({
                "t": z.t.to_pairs(),
                "e1": z.e1.to_pairs(),
                "e2": z.e2.to_pairs(),
                "complex_hadamard": hadamard,
                "factorization_residual": z.factorization_residual(),
                "triplet_residual": z.triplet_residual(),
            });
            ("zauner", json!({ "x": x }), ok, res)
        }
        Command::Haagerup { t, x } => {
            let r = inequivalence_report(*t, *x).domain()?;
            let ok = r.triplet_larger;
            ("haagerup", json!({ "t": t, "x": x }), ok, serde_json::to_value(r)?)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    match run(&cli) {
        Ok((command, config, verified, results)) => {
            let doc = ResultDocument {
                schema_version: SCHEMA_VERSION,
                tool_version: env!("CARGO_PKG_VERSION"),
                command,
                config,
                verified,
                results,
                timing: Timing { wall_time_secs: start.elapsed().as_secs_f64() },
            };
            let text = serde_json::to_string_pretty(&doc).expect("document serializes");
            let written = match &cli.out {
                Some(p) => std::fs::write(p, text + "\n").with_context(|| format!("writing {}", p.display())),
                None => {
                    let mut out = std::io::stdout().lock();
                    match writeln!(out, "{text}") {
                        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                        _ => Ok(()),
                    }
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            ExitCode::from(if verified { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
