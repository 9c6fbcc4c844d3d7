//! Subcommands and the exit-code contract: 0 success, 1 I/O failure or a
//! failed self-test, 2 malformed input or flags, 3 shape violation.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kmatch2d_core::gridstring::{oracle_all_offsets, square_shapes};
use kmatch2d_core::{kmismatch_with, Algo, Counters, Error, Grid2D, OffsetCounts, PipelineConfig};
use thiserror::Error;

use crate::bench::{self, BenchPlan, Size};
use crate::gen::{generate, rng, Generator};
use crate::gridio::{read_grid, write_grid, GridError, Interner};
use crate::report::RunReport;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: GridError },
    #[error("pattern and text must be squares with the pattern no larger than the text")]
    Shape,
    #[error("{0}")]
    Usage(String),
    #[error("self-test failed: {0}")]
    SelfTest(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::SelfTest(_) => 1,
            CliError::Parse { .. } | CliError::Usage(_) => 2,
            CliError::Shape => 3,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "kmatch2d", version, about = "2D pattern matching with k mismatches")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Report min(k+1, Ham) at every offset.
    Match(MatchArgs),
    /// Same output as `match`, computed by brute force.
    Oracle(OracleArgs),
    /// Time the naive, kangaroo and full algorithms on generated instances.
    Bench(BenchArgs),
    /// Compare the pipeline with the brute force on random instances.
    Selftest(SelftestArgs),
    /// Write a generated pattern and text as grid files.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AlgoArg {
    Auto,
    Naive,
    Kangaroo,
    Full,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Algo {
        match a {
            AlgoArg::Auto => Algo::Auto,
            AlgoArg::Naive => Algo::Naive,
            AlgoArg::Kangaroo => Algo::Kangaroo,
            AlgoArg::Full => Algo::Full,
        }
    }
}

#[derive(Args, Debug)]
pub struct IoArgs {
    #[arg(long)]
    pub pattern: PathBuf,
    #[arg(long)]
    pub text: PathBuf,
    #[arg(short = 'k')]
    pub k: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print only offsets with at most k mismatches.
    #[arg(long)]
    pub only_matches: bool,
    /// Write results here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write a key=value run report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MatchArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, value_enum, default_value_t = AlgoArg::Auto)]
    pub algo: AlgoArg,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Text sides `n` (pattern side n/2) or `m:n` pairs.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub sizes: Vec<Size>,
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub ks: Vec<u32>,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4)]
    pub sigma: u32,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub generators: Vec<Generator>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 200)]
    pub cases: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub generator: Generator,
    #[arg(short = 'm')]
    pub m: usize,
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(short = 'k', default_value_t = 0)]
    pub k: u32,
    #[arg(long, default_value_t = 4)]
    pub sigma: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub pattern: PathBuf,
    #[arg(long)]
    pub text: PathBuf,
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn write_file(path: &Path, data: &[u8]) -> Result<(), CliError> {
    fs::write(path, data).map_err(|source| CliError::Io { path: path.into(), source })
}

/// Reads pattern and text through one interner and checks their shapes.
pub fn load_pair(pattern: &Path, text: &Path) -> Result<(Grid2D, Grid2D, Interner), CliError> {
    let mut names = Interner::new();
    let p = read_grid(&read_file(pattern)?, &mut names).map_err(|source| CliError::Parse { path: pattern.into(), source })?;
    let t = read_grid(&read_file(text)?, &mut names).map_err(|source| CliError::Parse { path: text.into(), source })?;
    square_shapes(&p, &t).map_err(|_| CliError::Shape)?;
    Ok((p, t, names))
}

/// `x y d` per offset, row-major by offset.
pub fn format_counts(out: &OffsetCounts, k: u32, only_matches: bool) -> String {
    let mut s = String::new();
    for (q, d) in out.iter() {
        if !only_matches || d <= k {
            writeln!(s, "{} {} {}", q.x, q.y, d).unwrap();
        }
    }
    s
}

fn emit(io: &IoArgs, body: &str) -> Result<(), CliError> {
    match &io.output {
        Some(path) => write_file(path, body.as_bytes()),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(body.as_bytes()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

fn run_matching(io: &IoArgs, algo: Option<AlgoArg>) -> Result<(), CliError> {
    let start = Instant::now();
    let (p, t, _) = load_pair(&io.pattern, &io.text)?;
    let read = start.elapsed();
    let k = io.k.min((p.width * p.width) as u32);
    let mut c = Counters::default();
    let t0 = Instant::now();
    let out = match algo {
        Some(a) => {
            let cfg = PipelineConfig { algo: a.into(), seed: io.seed, ..Default::default() };
            kmismatch_with(&p, &t, k, &cfg, &mut c)
        }
        None => oracle_all_offsets(&p, &t, k),
    }
    .map_err(|e| match e {
        Error::BadShape => CliError::Shape,
        e => CliError::Usage(e.to_string()),
    })?;
    let matching = t0.elapsed();
    let t1 = Instant::now();
    emit(io, &format_counts(&out, k, io.only_matches))?;
    let write = t1.elapsed();
    if let Some(path) = &io.report {
        let report = RunReport {
            m: p.width,
            n: t.width,
            k,
            algo: algo.map_or("oracle".into(), |a| format!("{a:?}").to_lowercase()),
            matches: out.values.iter().filter(|&&d| d <= k).count(),
            phases: vec![("read", read), ("match", matching), ("write", write)],
            total: start.elapsed(),
            counters: c,
        };
        write_file(path, report.render().as_bytes())?;
    }
    Ok(())
}

fn run_bench(a: &BenchArgs) -> Result<(), CliError> {
    if a.reps == 0 || a.sigma == 0 {
        return Err(CliError::Usage("--reps and --sigma must be positive".into()));
    }
    let plan = BenchPlan {
        sizes: a.sizes.clone(),
        ks: a.ks.clone(),
        reps: a.reps,
        seed: a.seed,
        sigma: a.sigma,
        generators: if a.generators.is_empty() { Generator::ALL.to_vec() } else { a.generators.clone() },
    };
    let rows = bench::run(&plan, |r| eprintln!("{} m={} n={} k={} {}: {:.1} ms", r.generator, r.m, r.n, r.k, r.algo, r.millis));
    let mut buf = Vec::new();
    bench::write_csv(&rows, &mut buf).map_err(|e| CliError::Usage(e.to_string()))?;
    match &a.csv {
        Some(path) => write_file(path, &buf),
        None => std::io::stdout().write_all(&buf).map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn run_selftest(a: &SelftestArgs) -> Result<(), CliError> {
    use rand::Rng;
    let mut r = rng(a.seed);
    for case in 0..a.cases {
        let g = Generator::ALL[case % 3];
        let m = r.random_range(2..=40);
        let n = r.random_range(m..=2 * m + 8);
        let sigma = [1, 2, 4, 16][r.random_range(0..4)];
        let k = r.random_range(0..=12);
        let inst = generate(g, m, n, sigma, k, &mut r);
        let want = oracle_all_offsets(&inst.pattern, &inst.text, k).expect("generated shapes are valid");
        for algo in [Algo::Auto, Algo::Naive, Algo::Kangaroo, Algo::Full] {
            let cfg = PipelineConfig { algo, seed: case as u64, ..Default::default() };
            let got = kmismatch_with(&inst.pattern, &inst.text, k, &cfg, &mut Counters::default()).expect("valid shapes");
            if got != want {
                return Err(CliError::SelfTest(format!("case {case} ({}, m={m}, n={n}, k={k}, {algo:?})", g.name())));
            }
        }
    }
    println!("selftest: {} cases passed", a.cases);
    Ok(())
}

fn run_gen(a: &GenArgs) -> Result<(), CliError> {
    if a.m == 0 || a.m > a.n || a.sigma == 0 {
        return Err(CliError::Shape);
    }
    let inst = generate(a.generator, a.m, a.n, a.sigma, a.k, &mut rng(a.seed));
    let mut names = Interner::new();
    for s in 0..a.sigma {
        names.intern(&s.to_string());
    }
    write_file(&a.pattern, write_grid(&inst.pattern, &names).as_bytes())?;
    write_file(&a.text, write_grid(&inst.text, &names).as_bytes())
}

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.cmd {
        Cmd::Match(a) => run_matching(&a.io, Some(a.algo)),
        Cmd::Oracle(a) => run_matching(&a.io, None),
        Cmd::Bench(a) => run_bench(a),
        Cmd::Selftest(a) => run_selftest(a),
        Cmd::Gen(a) => run_gen(a),
    }
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("kmatch2d: {e}");
            e.exit_code()
        }
    }
}
