//! Exact cross-correlation counting and the distance primitives built on it:
//! per-character Hamming distances and the randomized binary-projection
//! approximation, in one and two dimensions.
//!
//! The transform is a number-theoretic transform over the prime
//! `469762049 = 7 * 2^26 + 1`. Every quantity ever inverted is a count of
//! aligned positions, bounded by the pattern length, so it stays below the
//! modulus whenever the transform length is at most `2^26`.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::counters::Counters;
use crate::error::Error;
use crate::geom::Point;
use crate::gridstring::{pad_embed, square_shapes, Grid2D, Str2D, Sym, Table2D, WILDCARD};

const MOD: u64 = 469_762_049;
const ROOT: u64 = 3;
/// Largest supported transform length.
pub const MAX_LEN: usize = 1 << 26;

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    b %= MOD;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % MOD;
        }
        b = b * b % MOD;
        e >>= 1;
    }
    r
}

/// Twiddle tables for one transform length.
#[derive(Clone, Debug)]
pub struct CorrPlan {
    n: usize,
    // Stage with half-length h uses tw[h..2h].
    tw: Vec<u32>,
    itw: Vec<u32>,
    inv_n: u64,
}

impl CorrPlan {
    /// Plan for the smallest power of two `>= len`.
    pub fn new(len: usize) -> Result<Self, Error> {
        let n = len.max(1).next_power_of_two();
        if n > MAX_LEN {
            return Err(Error::SizeError);
        }
        let mut tw = vec![0u32; n.max(2)];
        let mut itw = vec![0u32; n.max(2)];
        let mut h = 1;
        while h < n {
            let w = pow_mod(ROOT, (MOD - 1) / (2 * h as u64));
            let iw = pow_mod(w, MOD - 2);
            let (mut a, mut b) = (1u64, 1u64);
            for j in 0..h {
                tw[h + j] = a as u32;
                itw[h + j] = b as u32;
                a = a * w % MOD;
                b = b * iw % MOD;
            }
            h *= 2;
        }
        Ok(CorrPlan { n, tw, itw, inv_n: pow_mod(n as u64, MOD - 2) })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn bit_reverse(a: &mut [u32]) {
        let n = a.len();
        let mut j = 0;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
    }

    fn transform(&self, a: &mut [u32], tw: &[u32]) {
        let n = a.len();
        Self::bit_reverse(a);
        let mut h = 1;
        while h < n {
            let t = &tw[h..2 * h];
            for block in a.chunks_exact_mut(2 * h) {
                let (lo, hi) = block.split_at_mut(h);
                for j in 0..h {
                    let u = lo[j] as u64;
                    let v = hi[j] as u64 * t[j] as u64 % MOD;
                    let s = u + v;
                    lo[j] = if s >= MOD { (s - MOD) as u32 } else { s as u32 };
                    hi[j] = if u >= v { (u - v) as u32 } else { (u + MOD - v) as u32 };
                }
            }
            h *= 2;
        }
    }

    /// Forward transform of `a`, zero-padded to the plan length.
    pub fn forward(&self, a: &[u32], c: &mut Counters) -> Vec<u32> {
        debug_assert!(a.len() <= self.n);
        let mut v = vec![0u32; self.n];
        v[..a.len()].copy_from_slice(a);
        self.transform(&mut v, &self.tw);
        c.conv_cells += self.n as u64;
        v
    }

    /// Forward transform of `b` reversed cyclically (`b[i]` lands at `-i`), so
    /// that pointwise products with `forward(a)` invert to correlations.
    pub fn forward_reversed(&self, b: &[u32], c: &mut Counters) -> Vec<u32> {
        debug_assert!(b.len() <= self.n);
        let mut v = vec![0u32; self.n];
        for (i, &x) in b.iter().enumerate() {
            v[(self.n - i) % self.n] = x;
        }
        self.transform(&mut v, &self.tw);
        c.conv_cells += self.n as u64;
        v
    }

    pub fn inverse(&self, mut v: Vec<u32>, c: &mut Counters) -> Vec<u64> {
        self.transform(&mut v, &self.itw);
        c.conv_cells += self.n as u64;
        v.into_iter().map(|x| x as u64 * self.inv_n % MOD).collect()
    }
}

/// `acc += x * y` pointwise in the transform domain.
fn mul_acc(acc: &mut [u32], x: &[u32], y: &[u32]) {
    for ((a, &p), &q) in acc.iter_mut().zip(x).zip(y) {
        *a = ((*a as u64 + p as u64 * q as u64) % MOD) as u32;
    }
}

/// `result[j] = sum_i b[i] * a[i + j]` for `j in [|a| - |b| + 1]`, exact.
pub fn correlate_counts(a: &[u32], b: &[u32], c: &mut Counters) -> Result<Vec<u64>, Error> {
    if b.is_empty() || a.len() < b.len() {
        return Err(Error::SizeError);
    }
    let plan = CorrPlan::new(a.len())?;
    let fa = plan.forward(a, c);
    let fb = plan.forward_reversed(b, c);
    let mut prod = vec![0u32; plan.len()];
    mul_acc(&mut prod, &fa, &fb);
    let mut r = plan.inverse(prod, c);
    r.truncate(a.len() - b.len() + 1);
    Ok(r)
}

fn mask(s: &[Sym], f: impl Fn(Sym) -> bool) -> Vec<u32> {
    s.iter().map(|&x| f(x) as u32).collect()
}

fn distinct_symbols(s: &[Sym]) -> Vec<Sym> {
    let mut v: Vec<Sym> = s.iter().copied().filter(|&x| x != WILDCARD).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Non-wildcard symbols present in both strings.
pub fn shared_alphabet(p: &[Sym], t: &[Sym]) -> Vec<Sym> {
    let tp = distinct_symbols(t);
    distinct_symbols(p).into_iter().filter(|x| tp.binary_search(x).is_ok()).collect()
}

/// Exact text-to-pattern Hamming distances for every alignment
/// `j in [|T| - |P| + 1]`. Wildcards match everything.
///
/// Computed as the overlap of non-wildcard positions minus the matches of each
/// symbol present in both strings; symbols absent from one side can only
/// mismatch and need no transform of their own.
pub fn hamming_per_char_1d(p: &[Sym], t: &[Sym], c: &mut Counters) -> Result<Vec<u64>, Error> {
    if p.is_empty() || t.len() < p.len() {
        return Err(Error::SizeError);
    }
    let plan = CorrPlan::new(t.len())?;
    let nonwild = |x: Sym| x != WILDCARD;
    let fpm = plan.forward_reversed(&mask(p, nonwild), c);
    let ftm = plan.forward(&mask(t, nonwild), c);
    let mut overlap = vec![0u32; plan.len()];
    mul_acc(&mut overlap, &ftm, &fpm);
    let mut matches = vec![0u32; plan.len()];
    for a in shared_alphabet(p, t) {
        let fp = plan.forward_reversed(&mask(p, |x| x == a), c);
        let ft = plan.forward(&mask(t, |x| x == a), c);
        mul_acc(&mut matches, &ft, &fp);
    }
    // overlap - matches, still in the transform domain.
    for (o, &m) in overlap.iter_mut().zip(&matches) {
        *o = ((*o as u64 + MOD - m as u64) % MOD) as u32;
    }
    let mut r = plan.inverse(overlap, c);
    r.truncate(t.len() - p.len() + 1);
    Ok(r)
}

/// Parameters of the randomized approximation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ApproxParams {
    /// `eps = eps_num / eps_den`.
    pub eps_num: u32,
    pub eps_den: u32,
    /// Number of binary mappings; `None` picks `ceil((log2 m / eps)^2)`.
    pub r: Option<u32>,
    pub seed: u64,
}

impl Default for ApproxParams {
    fn default() -> Self {
        ApproxParams { eps_num: 1, eps_den: 1, r: None, seed: 0 }
    }
}

/// `log2(m)` in fixed point with 32 fractional bits.
fn log2_q32(m: u64) -> u128 {
    let ip = 63 - m.leading_zeros();
    let mut x: u128 = (m as u128) << (62 - ip);
    let mut frac = 0u128;
    for b in (0..32).rev() {
        x = (x * x) >> 62;
        if x >= 2 << 62 {
            x >>= 1;
            frac |= 1 << b;
        }
    }
    ((ip as u128) << 32) | frac
}

impl ApproxParams {
    /// Number of mappings for pattern size `m`, at least 1.
    pub fn mappings(&self, m: usize) -> u32 {
        if let Some(r) = self.r {
            return r.max(1);
        }
        let l = log2_q32(m.max(1) as u64) * self.eps_den as u128;
        let num = l * l;
        let den = (self.eps_num as u128 * self.eps_num as u128) << 64;
        (num.div_ceil(den) as u32).max(1)
    }
}

/// Approximate distances from summed binary projections.
///
/// Each mapping sends every symbol to a fair random bit, so a mismatching
/// pair survives a projection with probability exactly 1/2 and a matching
/// pair never does. With `S` the sum over `r` projections, `2S/r` is unbiased.
/// No single projection can exceed `Ham`, so capping `ceil(3S/r)` at twice the
/// largest projection keeps the value at most `2 Ham` for every seed. It drops
/// below `Ham` only when the sum falls more than a third under its mean, or
/// when no projection keeps half the mismatches. Zero distances are reported
/// as zero.
fn karloff_core(
    p: &[Sym],
    t: &[Sym],
    r: u32,
    seed: u64,
    c: &mut Counters,
) -> Result<Vec<u64>, Error> {
    if p.is_empty() || t.len() < p.len() {
        return Err(Error::SizeError);
    }
    let mut alphabet = distinct_symbols(p);
    alphabet.extend(distinct_symbols(t));
    alphabet.sort_unstable();
    alphabet.dedup();
    let plan = CorrPlan::new(t.len())?;
    let nonwild = |x: Sym| x != WILDCARD;
    let fpm = plan.forward_reversed(&mask(p, nonwild), c);
    let ftm = plan.forward(&mask(t, nonwild), c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = vec![0u64; t.len() - p.len() + 1];
    let mut top = vec![0u64; acc.len()];
    let mut bits = vec![false; alphabet.len()];
    for _ in 0..r {
        for chunk in bits.chunks_mut(64) {
            let w = rng.next_u64();
            for (i, b) in chunk.iter_mut().enumerate() {
                *b = (w >> i) & 1 == 1;
            }
        }
        let one = |x: Sym| x != WILDCARD && bits[alphabet.binary_search(&x).unwrap()];
        let fp1 = plan.forward_reversed(&mask(p, one), c);
        let ft1 = plan.forward(&mask(t, one), c);
        // d_i = corr(T1, P0) + corr(T0, P1) with P0 = Pmask - P1, T0 = Tmask - T1.
        let mut prod = vec![0u32; plan.len()];
        for i in 0..plan.len() {
            let p1 = fp1[i] as u64;
            let t1 = ft1[i] as u64;
            let p0 = (fpm[i] as u64 + MOD - p1) % MOD;
            let t0 = (ftm[i] as u64 + MOD - t1) % MOD;
            prod[i] = ((t1 * p0 + t0 * p1) % MOD) as u32;
        }
        let d = plan.inverse(prod, c);
        for ((a, hi), x) in acc.iter_mut().zip(top.iter_mut()).zip(d) {
            *a += x;
            *hi = (*hi).max(x);
        }
    }
    Ok(acc.into_iter().zip(top).map(|(s, hi)| (3 * s).div_ceil(r as u64).min(2 * hi)).collect())
}

/// Approximate text-to-pattern distances with `m = |P|` for the default `r`.
pub fn karloff_1d(
    p: &[Sym],
    t: &[Sym],
    params: &ApproxParams,
    c: &mut Counters,
) -> Result<Vec<u64>, Error> {
    karloff_core(p, t, params.mappings(p.len()), params.seed, c)
}

/// Exact `Ham(T, P + q)` for every `q` with `bbox(P) + q` inside `bbox(T)`.
pub fn hamming_per_char_2d<S: Str2D, R: Str2D>(
    p: &S,
    t: &R,
    c: &mut Counters,
) -> Result<Table2D<u64>, Error> {
    let e = pad_embed(p, t)?;
    let d = hamming_per_char_1d(&e.pattern, &e.text.symbols, c)?;
    Ok(gather(&e, &d))
}

fn gather(e: &crate::gridstring::Embedding, d: &[u64]) -> Table2D<u64> {
    let (first, cols, rows) = e.offset_range();
    let mut out = Table2D::filled(first, cols, rows, 0u64);
    for dy in 0..rows {
        for dx in 0..cols {
            out.data[dy * cols + dx] = d[dx * e.text.height + dy];
        }
    }
    out
}

/// Approximate `Ham(T, P + q)` for all `q in [n - m + 1]^2`, never below the
/// true distance except with small probability.
///
/// When at most `max(r, 2)` symbols are shared, exact per-symbol counting is
/// both cheaper and exact, and is used instead.
pub fn approx_2d(
    p: &Grid2D,
    t: &Grid2D,
    params: &ApproxParams,
    c: &mut Counters,
) -> Result<Table2D<u64>, Error> {
    let (m, _) = square_shapes(p, t)?;
    let r = params.mappings(m);
    let e = pad_embed(p, t)?;
    let sigma = shared_alphabet(&e.pattern, &e.text.symbols).len();
    let d = if sigma <= r.max(2) as usize {
        hamming_per_char_1d(&e.pattern, &e.text.symbols, c)?
    } else {
        karloff_core(&e.pattern, &e.text.symbols, r, params.seed, c)?
    };
    Ok(gather(&e, &d))
}

/// `|dom(P + q) ∩ U|` for all `q` with `bbox(P) + q` inside `bbox(U)`.
pub fn overlap_counts_2d(p: &[Point], u: &[Point], c: &mut Counters) -> Result<Table2D<u64>, Error> {
    // All-zero pattern against a text that is 1 on U and wildcard elsewhere.
    let ps = crate::gridstring::Sparse2D::from_entries(p.iter().map(|&x| (x, 0)).collect());
    let us = crate::gridstring::Sparse2D::from_entries(u.iter().map(|&x| (x, 1)).collect());
    let e = pad_embed(&ps, &us)?;
    let pm = mask(&e.pattern, |x| x != WILDCARD);
    let tm = mask(&e.text.symbols, |x| x != WILDCARD);
    let d = correlate_counts(&tm, &pm, c)?;
    Ok(gather(&e, &d))
}
