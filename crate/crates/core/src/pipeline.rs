//! The matching driver: cover the text with windows of side about `3m/2`,
//! filter candidate offsets with the approximate distances, and answer each
//! window either by verifying the candidates directly or, when there are many
//! of them, through the periodic structure they force on pattern and text.

use alloc::vec::Vec;

use crate::convolve::{approx_2d, ApproxParams};
use crate::counters::Counters;
use crate::densecount::dense_distances;
use crate::error::Error;
use crate::geom::Point;
use crate::gridstring::{square_shapes, Grid2D, OffsetCounts};
use crate::periods::get_periods;
use crate::sparsecount::{sparse_distances, PatternPieces};
use crate::textpart::{text_decompose, ActiveText};
use crate::tiling::{tile_decompose, Lattice, TruncSig};
use crate::verify::{baseline_kn2, Verifier};

/// Which algorithm answers each window.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Algo {
    /// Size and candidate-count rules pick the branch.
    #[default]
    Auto,
    /// `O(k)` kangaroo jumps at every offset of the whole text.
    Naive,
    /// Candidate filter, then verification of every candidate.
    Kangaroo,
    /// Candidate filter, then the periodic branch wherever it applies.
    Full,
}

/// Pipeline settings. `k` is passed separately and clamped to `[0, m^2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub algo: Algo,
    /// `eps = eps_num / eps_den` of the candidate filter.
    pub eps_num: u32,
    pub eps_den: u32,
    /// Mappings of the candidate filter; `None` uses the default.
    pub r: Option<u32>,
    pub seed: u64,
    /// Grid resolution of the text split; `None` uses `m k^{-3/4}`.
    pub l_part: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig { algo: Algo::Auto, eps_num: 1, eps_den: 1, r: None, seed: 0, l_part: None }
    }
}

/// Branch taken by one window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Kangaroo,
    Full,
    /// The periodic branch was requested but a precondition failed.
    Fallback,
}

/// Box-count work above `BOX_GUARD * m^2` sends a window to verification.
const BOX_GUARD: u64 = 64;

/// Window side for an `n x n` text and `m x m` pattern: `2 floor(3m/4)`, at
/// least `m`, and never above `n`. Even whenever some even side fits.
pub fn window_side(n: usize, m: usize) -> usize {
    let w = (2 * (3 * m / 4)).max(m);
    if w <= n {
        w
    } else if n % 2 == 1 && n > m {
        n - 1
    } else {
        n
    }
}

/// 1D origins of the windows along one axis.
fn origins_1d(n: usize, m: usize, w: usize) -> Vec<usize> {
    let stride = w - m + 1;
    let mut out = Vec::new();
    let mut o = 0;
    loop {
        if o + w >= n {
            out.push(n - w);
            break;
        }
        out.push(o);
        o += stride;
    }
    out.dedup();
    out
}

/// Origins of square windows of side [`window_side`] such that every offset
/// of `[n - m + 1]^2` is an offset of at least one window.
pub fn cover_text(n: usize, m: usize) -> (usize, Vec<Point>) {
    let w = window_side(n, m);
    let o = origins_1d(n, m, w);
    let mut out = Vec::with_capacity(o.len() * o.len());
    for &y in &o {
        for &x in &o {
            out.push(Point::new(x as i64, y as i64));
        }
    }
    (w, out)
}

/// Largest `l >= 1` with `l^4 k^3 <= m^4`.
pub fn l_part(m: usize, k: u32) -> usize {
    let (m4, k3) = ((m as u128).pow(4), (k as u128).pow(3));
    let mut l = 1usize;
    while ((l + 1) as u128).pow(4) * k3 <= m4 && l < m {
        l += 1;
    }
    l
}

/// Candidate count at or below which candidates are verified directly:
/// `8m + m^2 / k`, unbounded for `k = 0`.
pub fn kangaroo_threshold(m: usize, k: u32) -> Option<u64> {
    (k > 0).then(|| 8 * m as u64 + (m as u64 * m as u64) / k as u64)
}

fn mix(seed: u64, o: Point) -> u64 {
    // splitmix64 finaliser over the seed and the window origin.
    let mut z = seed ^ (o.x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (o.y as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `min(k + 1, Ham)` for every offset of one window, and the branch taken.
///
/// The window must be an even-sided square at the origin when the periodic
/// branch is to be used; otherwise the window is verified.
pub fn match_window(
    p: &Grid2D,
    t: &Grid2D,
    k: u32,
    cfg: &PipelineConfig,
    seed: u64,
    c: &mut Counters,
) -> Result<(OffsetCounts, Branch), Error> {
    let (m, n) = square_shapes(p, t)?;
    let side = n - m + 1;
    let cap = k as u64 + 1;
    let params = ApproxParams { eps_num: cfg.eps_num, eps_den: cfg.eps_den, r: cfg.r, seed };
    let approx = approx_2d(p, t, &params, c)?;
    let qs: Vec<Point> = approx.iter().filter(|&(_, &v)| v <= 2 * k as u64).map(|(q, _)| q).collect();
    c.candidates += qs.len() as u64;

    let few = kangaroo_threshold(m, k).is_none_or(|th| qs.len() as u64 <= th);
    let want_full = match cfg.algo {
        Algo::Full => true,
        Algo::Kangaroo | Algo::Naive => false,
        Algo::Auto => !few,
    };
    if want_full {
        if let Some(values) = periodic_branch(p, t, k, &qs, cfg, c)? {
            let mut out = OffsetCounts::filled(side, cap as u32);
            for (&q, v) in qs.iter().zip(values) {
                out.set(q, v.min(cap) as u32);
            }
            return Ok((out, Branch::Full));
        }
    }
    let mut out = OffsetCounts::filled(side, cap as u32);
    if !qs.is_empty() {
        let v = Verifier::new(p, t)?;
        for &q in &qs {
            out.set(q, v.distance(q, cap, c) as u32);
        }
    }
    Ok((out, if want_full { Branch::Fallback } else { Branch::Kangaroo }))
}

/// Exact `Ham(P + q, T)` for `q in qs` through the period lattice of the
/// candidates, or `None` when a precondition of that route fails.
fn periodic_branch(
    p: &Grid2D,
    t: &Grid2D,
    k: u32,
    qs: &[Point],
    cfg: &PipelineConfig,
    c: &mut Counters,
) -> Result<Option<Vec<u64>>, Error> {
    let (m, n) = square_shapes(p, t)?;
    let l = (n - m) as i64;
    if n % 2 == 1 || l < 1 || qs.len() as i64 <= 16 * l || p.has_wildcard() || t.has_wildcard() {
        return Ok(None);
    }
    let pp = get_periods(qs, l)?;
    let lat = Lattice::new(pp.phi, pp.psi)?;
    let m_i = m as i64;
    let sig = TruncSig::rect(&lat, Point::ZERO, Point::new(m_i - 1, m_i - 1));
    if !sig.rect_dominates(&lat) {
        return Ok(None);
    }
    let pieces = tile_decompose(&p.to_sparse(), sig, &lat);
    c.pattern_pieces += pieces.len() as u64;
    let pieces = PatternPieces::new(pieces)?;
    let at = ActiveText::build(t, qs, m)?;
    let lp = cfg.l_part.unwrap_or_else(|| l_part(m, k)).max(1);
    let td = text_decompose(&at, &lat, lp, c)?;
    let boxes: u64 = td.pieces.iter().map(|s| pieces.frequency(s.symbol().unwrap()) as u64).sum();
    if boxes > BOX_GUARD * (m * m) as u64 {
        return Ok(None);
    }
    let sparse = sparse_distances(&lat, &pieces, &td.pieces, m, n, qs, c)?;
    let d = at.peripheral_radius(&td.periphery).max(1);
    let (dense, _) = dense_distances(&lat, p, &td.periphery, &at, qs, d, &pieces, k, c)?;
    Ok(Some(sparse.into_iter().zip(dense).map(|(a, b)| a + b).collect()))
}

/// Whether [`Algo::Auto`] skips the candidate machinery altogether.
pub fn prefers_baseline(m: usize, k: u32) -> bool {
    let (m, k1) = (m as u64, k.max(1) as u64);
    m < 16 || m * m <= 8 * m + m * m / k1
}

/// `min(k + 1, Ham(T, P + q))` for every `q in [n - m + 1]^2`.
pub fn kmismatch(p: &Grid2D, t: &Grid2D, k: u32, cfg: &PipelineConfig) -> Result<OffsetCounts, Error> {
    kmismatch_with(p, t, k, cfg, &mut Counters::default())
}

/// [`kmismatch`] with instrumentation.
pub fn kmismatch_with(
    p: &Grid2D,
    t: &Grid2D,
    k: u32,
    cfg: &PipelineConfig,
    c: &mut Counters,
) -> Result<OffsetCounts, Error> {
    let (m, n) = square_shapes(p, t)?;
    let k = k.min((m * m) as u32);
    let wild = p.has_wildcard() || t.has_wildcard();
    if cfg.algo == Algo::Naive || wild || (cfg.algo == Algo::Auto && prefers_baseline(m, k)) {
        c.windows += 1;
        c.windows_naive += 1;
        return baseline_kn2(p, t, k, c);
    }
    let side = n - m + 1;
    let (w, origins) = cover_text(n, m);
    let wside = w - m + 1;
    let mut out = OffsetCounts::filled(side, u32::MAX);
    for o in origins {
        let tw = t.sub_grid(o, w, w);
        let tw = Grid2D { origin: Point::ZERO, ..tw };
        let (r, branch) = match_window(p, &tw, k, cfg, mix(cfg.seed, o), c)?;
        c.windows += 1;
        match branch {
            Branch::Kangaroo => c.windows_kangaroo += 1,
            Branch::Full => c.windows_full += 1,
            Branch::Fallback => {
                c.windows_kangaroo += 1;
                c.windows_fallback += 1;
            }
        }
        for y in 0..wside {
            for x in 0..wside {
                let local = Point::new(x as i64, y as i64);
                let v = r.get(local);
                let g = o + local;
                let cur = out.get(g);
                if cur != u32::MAX && cur != v {
                    // Values <= k are exact; a disagreement is a missed candidate.
                    c.merge_conflicts += 1;
                }
                out.set(g, cur.min(v));
            }
        }
    }
    debug_assert!(out.values.iter().all(|&v| v != u32::MAX));
    Ok(out)
}
