//! Seeded instance generators.
//!
//! - `uniform`: independent uniform symbols in pattern and text.
//! - `planted-periodic`: text `g((a x + b y) mod p)` for a random lattice of
//!   determinant `p` with about `k/4` noise cells per `m x m` square, and a
//!   pattern cut from the noiseless background with `k/4` substitutions; the
//!   offsets in the planted lattice class are then mostly within `k`.
//! - `planted-occurrence`: uniform text with one copy of a uniform pattern
//!   carrying at most `k` substitutions.

use clap::ValueEnum;
use kmatch2d_core::{Grid2D, Point, Sym};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Uniform,
    PlantedPeriodic,
    PlantedOccurrence,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::Uniform, Generator::PlantedPeriodic, Generator::PlantedOccurrence];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Uniform => "uniform",
            Generator::PlantedPeriodic => "planted-periodic",
            Generator::PlantedOccurrence => "planted-occurrence",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Instance {
    pub pattern: Grid2D,
    pub text: Grid2D,
    /// Offset of the planted copy, when there is one.
    pub planted: Option<Point>,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn substitute(r: &mut impl Rng, g: &mut Grid2D, count: usize, sigma: u32) {
    if sigma < 2 {
        return;
    }
    for _ in 0..count {
        let i = r.random_range(0..g.data.len());
        let old = g.data[i];
        g.data[i] = (old + r.random_range(1..sigma)) % sigma;
    }
}

/// An `m x m` pattern and an `n x n` text over `sigma` symbols; requires `1 <= m <= n`.
pub fn generate(kind: Generator, m: usize, n: usize, sigma: u32, k: u32, r: &mut impl Rng) -> Instance {
    assert!(1 <= m && m <= n && sigma >= 1);
    let mut uniform = |w: usize| Grid2D::from_fn(w, w, |_| r.random_range(0..sigma));
    match kind {
        Generator::Uniform => {
            let pattern = uniform(m);
            let text = uniform(n);
            Instance { pattern, text, planted: None }
        }
        Generator::PlantedOccurrence => {
            let mut pattern = uniform(m);
            let mut text = uniform(n);
            let q = Point::new(r.random_range(0..=(n - m) as i64), r.random_range(0..=(n - m) as i64));
            for (i, &s) in pattern.data.iter().enumerate() {
                let u = q + Point::new((i % m) as i64, (i / m) as i64);
                *text.at_mut(u).unwrap() = s;
            }
            let subs = r.random_range(0..=k as usize);
            substitute(r, &mut pattern, subs, sigma);
            Instance { pattern, text, planted: Some(q) }
        }
        Generator::PlantedPeriodic => {
            // Determinant at most m / 32 keeps the candidate set large enough.
            let per = r.random_range(1..=(m as i64 / 32).clamp(1, 3));
            let (a, b) = (r.random_range(1..=per), r.random_range(0..per));
            let g: Vec<Sym> = (0..per).map(|_| r.random_range(0..sigma)).collect();
            let mut text = Grid2D::from_fn(n, n, |u| g[((a * u.x + b * u.y) % per) as usize]);
            // Cut before adding noise, so the pattern carries exactly k/4 substitutions.
            let q = Point::new(r.random_range(0..=(n - m) as i64), r.random_range(0..=(n - m) as i64));
            let mut pattern = Grid2D { origin: Point::ZERO, ..text.sub_grid(q, m, m) };
            substitute(r, &mut pattern, (k / 4) as usize, sigma);
            // About k/4 noise cells per pattern-sized square.
            let noise = (k as usize * n * n).div_ceil(4 * m * m);
            substitute(r, &mut text, noise, sigma);
            Instance { pattern, text, planted: Some(q) }
        }
    }
}
