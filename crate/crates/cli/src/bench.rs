//! Benchmark harness: every generator, size, `k` and repetition is run with
//! the naive, kangaroo and full algorithms on the same seeded instance.
//!
//! CSV columns: `n,m,k,algo,millis,|Q|,branch,generator,rep,work,jumps`.
//! Everything except `millis` is a function of the seed. The instance seed
//! depends on generator, size and repetition but not on `k`, so a sweep over
//! `k` reuses the same lattice and symbols.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use kmatch2d_core::{kmismatch_with, Algo, Counters, PipelineConfig};

use crate::gen::{generate, rng, Generator};

/// One benchmark shape, written `n` (pattern side `n / 2`) or `m:n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Size {
    pub m: usize,
    pub n: usize,
}

impl FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad size {s:?}"));
        let (m, n) = match s.split_once(':') {
            Some((m, n)) => (parse(m)?, parse(n)?),
            None => {
                let n = parse(s)?;
                (n / 2, n)
            }
        };
        if m == 0 || m > n {
            return Err(format!("size {s:?} needs 1 <= m <= n"));
        }
        Ok(Size { m, n })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub k: u32,
    pub algo: &'static str,
    pub millis: f64,
    pub candidates: u64,
    pub branch: String,
    pub generator: &'static str,
    pub rep: usize,
    pub work: u64,
    pub jumps: u64,
}

pub const ALGOS: [(Algo, &str); 3] = [(Algo::Naive, "naive"), (Algo::Kangaroo, "kangaroo"), (Algo::Full, "full")];

/// Branch label from window counters.
pub fn branch_label(c: &Counters) -> String {
    if c.windows_naive > 0 {
        "naive".into()
    } else if c.windows_full == 0 {
        "kangaroo".into()
    } else if c.windows_full == c.windows {
        "full".into()
    } else {
        format!("mixed:{}/{}", c.windows_full, c.windows)
    }
}

#[derive(Clone, Debug)]
pub struct BenchPlan {
    pub sizes: Vec<Size>,
    pub ks: Vec<u32>,
    pub reps: usize,
    pub seed: u64,
    pub sigma: u32,
    pub generators: Vec<Generator>,
}

/// Runs the plan. Panics if two algorithms disagree on an instance.
pub fn run(plan: &BenchPlan, mut on_row: impl FnMut(&BenchRow)) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for (gi, &g) in plan.generators.iter().enumerate() {
        for (si, &Size { m, n }) in plan.sizes.iter().enumerate() {
            for &k in &plan.ks {
                for rep in 0..plan.reps {
                    let case = ((gi as u64) << 48 | (si as u64) << 24 | rep as u64) + 1;
                    let inst = generate(g, m, n, plan.sigma, k, &mut rng(plan.seed ^ case.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
                    let mut first = None;
                    for (algo, name) in ALGOS {
                        let cfg = PipelineConfig { algo, seed: plan.seed, ..Default::default() };
                        let mut c = Counters::default();
                        let start = Instant::now();
                        let out = kmismatch_with(&inst.pattern, &inst.text, k, &cfg, &mut c).expect("generated shapes are valid");
                        let millis = start.elapsed().as_secs_f64() * 1e3;
                        match &first {
                            None => first = Some(out),
                            Some(f) => assert_eq!(f, &out, "{name} disagrees on {} m={m} n={n} k={k}", g.name()),
                        }
                        let row = BenchRow {
                            n,
                            m,
                            k,
                            algo: name,
                            millis,
                            candidates: c.candidates,
                            branch: branch_label(&c),
                            generator: g.name(),
                            rep,
                            work: c.work(),
                            jumps: c.jumps,
                        };
                        on_row(&row);
                        rows.push(row);
                    }
                }
            }
        }
    }
    rows
}

pub fn write_csv<W: Write>(rows: &[BenchRow], w: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["n", "m", "k", "algo", "millis", "|Q|", "branch", "generator", "rep", "work", "jumps"])?;
    for r in rows {
        out.write_record([
            r.n.to_string(),
            r.m.to_string(),
            r.k.to_string(),
            r.algo.to_string(),
            format!("{:.3}", r.millis),
            r.candidates.to_string(),
            r.branch.clone(),
            r.generator.to_string(),
            r.rep.to_string(),
            r.work.to_string(),
            r.jumps.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}
