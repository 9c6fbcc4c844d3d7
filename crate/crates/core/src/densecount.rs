//! Mismatch totals between the pattern and the peripheral rest `F` of the
//! active text.
//!
//! `F` is split into the four quarters around `z = (n - 1) / 2`; quarters two
//! to four are mirrored into the first, so one code path handles
//! `K1 = (z, inf) x (z, inf)`. Inside `K1` every point of `F` is within `d` of
//! an inactive point, which forces any placement `P + q` to meet `F` only in
//! its right band of width `d` or its top band of height `d`. Each band is
//! matched against width-`d` strips of `F` with per-symbol correlations whose
//! total area is `O(dm)`.
//!
//! Symbols with few pattern pieces are cheaper as single-cell subtiles through
//! the sparse counter; only frequent symbols take the strip route.

use alloc::vec;
use alloc::vec::Vec;

use crate::convolve::hamming_per_char_2d;
use crate::counters::Counters;
use crate::error::Error;
use crate::geom::Point;
use crate::gridstring::{Grid2D, Sparse2D, Str2D, Sym, Table2D, WILDCARD};
use crate::sparsecount::{sparse_distances, PatternPieces};
use crate::textpart::ActiveText;
use crate::tiling::{Lattice, TileString, TruncSig};

/// Strip height bound: `Σ h_i <= C5 * m`.
pub const C5: i64 = 8;
/// Quarter area bound: `|dom F_1| <= C6 * d * m`.
pub const C6: i64 = 8;

/// Quarter index of `u` in `[n]^2`: 0 for `K1` (right, top), 1 for `K2`
/// (left, top), 2 for `K3` (left, bottom), 3 for `K4` (right, bottom).
///
/// For odd `n` the lines through `z` are integral; they go to the left and
/// bottom quarters.
pub fn quarter_of(u: Point, n: usize) -> usize {
    let two_z = n as i64 - 1;
    match (2 * u.x > two_z, 2 * u.y > two_z) {
        (true, true) => 0,
        (false, true) => 1,
        (false, false) => 2,
        (true, false) => 3,
    }
}

/// Mirror flags `(fx, fy)` that carry quarter `i` onto `K1`.
pub fn quarter_reflection(i: usize) -> (bool, bool) {
    [(false, false), (true, false), (true, true), (false, true)][i]
}

/// `F` split along the quarters of `[n]^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuarterSplit {
    pub n: usize,
    pub parts: [Sparse2D; 4],
}

pub fn split_quarters(f: &Sparse2D, n: usize) -> QuarterSplit {
    let mut parts: [Vec<(Point, Sym)>; 4] = Default::default();
    for &(u, a) in f.entries() {
        parts[quarter_of(u, n)].push((u, a));
    }
    QuarterSplit { n, parts: parts.map(Sparse2D::from_sorted) }
}

fn mirror(u: Point, fx: bool, fy: bool, span: i64) -> Point {
    Point::new(if fx { span - 1 - u.x } else { u.x }, if fy { span - 1 - u.y } else { u.y })
}

/// Orientation of the bands of a [`StripSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bands {
    /// Vertical bands `x in [i d, i d + d)`, heights bounded.
    Columns,
    /// Horizontal bands `y in [i d, i d + d)`, widths bounded.
    Rows,
}

/// Partition of a quarter into bands of thickness at most `d`, each with the
/// least extent `h` such that stepping `h` along the band from its lowest
/// point leaves the active text in every one of its lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StripSet {
    pub bands: Bands,
    /// Non-empty strips, by increasing band index.
    pub strips: Vec<Sparse2D>,
    pub band_index: Vec<i64>,
    pub heights: Vec<i64>,
    pub total: i64,
}

fn orient(u: Point, bands: Bands) -> Point {
    match bands {
        Bands::Columns => u,
        Bands::Rows => Point::new(u.y, u.x),
    }
}

fn check_k1(f1: &Sparse2D, at: &ActiveText, d: i64) -> Result<(), Error> {
    for u in f1.points() {
        if quarter_of(u, at.n) != 0 {
            return Err(Error::PreconditionViolated("string leaves the first quarter"));
        }
        if !at.is_active(u) {
            return Err(Error::PreconditionViolated("string leaves the active text"));
        }
    }
    if at.peripheral_radius(f1) > d {
        return Err(Error::NotPeripheral);
    }
    Ok(())
}

fn partition(f1: &Sparse2D, at: &ActiveText, d: i64, bands: Bands) -> StripSet {
    // Topmost active line coordinate per oriented line.
    let top = |x: i64| -> i64 {
        let span = match bands {
            Bands::Columns => at.col_span[x as usize],
            Bands::Rows => at.row_span[x as usize],
        };
        span.expect("strip point is active").1 as i64
    };
    let mut pts: Vec<(Point, Sym)> = f1.entries().iter().map(|&(u, a)| (orient(u, bands), a)).collect();
    pts.sort_unstable();
    let mut set = StripSet { bands, strips: Vec::new(), band_index: Vec::new(), heights: Vec::new(), total: 0 };
    let mut i = 0;
    while i < pts.len() {
        let band = pts[i].0.x.div_euclid(d);
        let mut j = i;
        let (mut ymin, mut tmax) = (i64::MAX, i64::MIN);
        while j < pts.len() && pts[j].0.x.div_euclid(d) == band {
            ymin = ymin.min(pts[j].0.y);
            tmax = tmax.max(top(pts[j].0.x));
            j += 1;
        }
        let h = tmax - ymin + 1;
        set.strips.push(Sparse2D::from_entries(pts[i..j].iter().map(|&(u, a)| (orient(u, bands), a)).collect()));
        set.band_index.push(band);
        set.heights.push(h);
        set.total += h;
        i = j;
    }
    set
}

/// Width-`d` column strips of `F1 ⊆ K1`. `F1` must be `d`-peripheral.
pub fn strip_partition(f1: &Sparse2D, at: &ActiveText, d: i64) -> Result<StripSet, Error> {
    if d <= 0 {
        return Err(Error::PreconditionViolated("strip width must be positive"));
    }
    check_k1(f1, at, d)?;
    Ok(partition(f1, at, d, Bands::Columns))
}

/// Height-`d` row strips of `F1 ⊆ K1`, the transpose of [`strip_partition`].
pub fn strip_partition_rows(f1: &Sparse2D, at: &ActiveText, d: i64) -> Result<StripSet, Error> {
    if d <= 0 {
        return Err(Error::PreconditionViolated("strip width must be positive"));
    }
    check_k1(f1, at, d)?;
    Ok(partition(f1, at, d, Bands::Rows))
}

/// `F1` (with wildcards elsewhere) on the `n x n` window.
fn window_grid(f1: &Sparse2D, n: usize) -> Grid2D {
    let mut g = Grid2D::from_fn(n, n, |_| WILDCARD);
    for &(u, a) in f1.entries() {
        *g.at_mut(u).expect("point inside the window") = a;
    }
    g
}

/// `Ham(P + q, F1)` for every `q in qs`, where `F1 ⊆ K1` is `d`-peripheral
/// with respect to `at` and every `q` is an offset of `at`.
///
/// For `d <= m/4` only the right band `[m-d, m) x [0, m-d)` and the top band
/// `[0, m) x [m-d, m)` of the pattern can meet `F1`, and against a strip of
/// extent `h` only the last `h` lines of a band can. Requires `2n <= 3m` on
/// that route.
pub fn sigma_border(
    p: &Grid2D,
    f1: &Sparse2D,
    at: &ActiveText,
    qs: &[Point],
    d: i64,
    c: &mut Counters,
) -> Result<Vec<u64>, Error> {
    let m = p.origin_square().ok_or(Error::BadShape)?;
    let n = at.n;
    if at.m != m {
        return Err(Error::BadShape);
    }
    if qs.iter().any(|&q| !at.has_offset(q)) {
        return Err(Error::OffsetOutOfRange);
    }
    if f1.is_empty() {
        return Ok(vec![0; qs.len()]);
    }
    let (m_i, n_i) = (m as i64, n as i64);
    if 4 * d > m_i {
        check_k1(f1, at, d)?;
        let table = hamming_per_char_2d(p, &window_grid(f1, n), c)?;
        return Ok(qs.iter().map(|&q| *table.at(q).expect("offset inside the window")).collect());
    }
    if 2 * n_i > 3 * m_i {
        return Err(Error::PreconditionViolated("window side exceeds 3m/2"));
    }
    let side = n - m + 1;
    let mut acc = Table2D::filled(Point::ZERO, side, side, 0u64);
    for (bands, band_end) in [(Bands::Columns, m_i - d), (Bands::Rows, m_i)] {
        let set = match bands {
            Bands::Columns => strip_partition(f1, at, d)?,
            Bands::Rows => strip_partition_rows(f1, at, d)?,
        };
        c.strip_heights += set.total as u64;
        for (strip, &h) in set.strips.iter().zip(&set.heights) {
            // Oriented pattern band H = [m-d, m) x [max(m-h, 0), band_end).
            let y0 = (m_i - h).max(0);
            if y0 >= band_end {
                continue;
            }
            let (hw, hh) = (d as usize, (band_end - y0) as usize);
            let mut band = Grid2D::from_fn(hw, hh, |u| {
                let o = Point::new(m_i - d + u.x, y0 + u.y);
                *p.at(orient(o, bands)).unwrap()
            });
            band.origin = Point::new(m_i - d, y0);
            let (lo, hi) = strip.bbox().unwrap();
            let (lo, hi) = (orient(lo, bands), orient(hi, bands));
            let (lo, hi) = (Point::new(lo.x.min(hi.x), lo.y.min(hi.y)), Point::new(lo.x.max(hi.x), lo.y.max(hi.y)));
            // Every placement of the band that meets the strip fits in the frame.
            let origin = lo - Point::new(hw as i64 - 1, hh as i64 - 1);
            let mut text =
                Grid2D::from_fn((hi.x - lo.x) as usize + 2 * hw - 1, (hi.y - lo.y) as usize + 2 * hh - 1, |_| WILDCARD);
            text.origin = origin;
            for &(u, a) in strip.entries() {
                *text.at_mut(orient(u, bands)).unwrap() = a;
            }
            let table = hamming_per_char_2d(&band, &text, c)?;
            for (qo, &v) in table.iter() {
                if v > 0 {
                    if let Some(slot) = acc.at_mut(orient(qo, bands)) {
                        *slot += v;
                    }
                }
            }
        }
    }
    Ok(qs.iter().map(|&q| *acc.at(q).unwrap()).collect())
}

/// Measurements of one [`dense_distances`] run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DenseStats {
    pub d: i64,
    /// `|dom F_i|` per quarter, before the frequency split.
    pub quarter_sizes: [usize; 4],
    /// Cells sent to the sparse counter as single-cell subtiles.
    pub infrequent: usize,
}

/// A symbol is frequent when it has at least `sqrt(k)` pattern pieces.
pub fn is_frequent(pieces: &PatternPieces, a: Sym, k: u32) -> bool {
    let f = pieces.frequency(a) as u64;
    f * f >= k as u64
}

/// Single-cell plain subtile at `u`.
pub fn singleton(lat: &Lattice, u: Point, a: Sym) -> TileString {
    let (h, s) = (lat.h(u), lat.s(u));
    TileString {
        sig: TruncSig::plain(h, h, s, s, lat.reduce(u)),
        cells: Sparse2D::from_sorted(vec![(u, a)]),
    }
}

/// `Ham(P + q, F)` for every `q in qs` (offsets of `at`), where `F` is
/// `d`-peripheral and the window side is even.
#[allow(clippy::too_many_arguments)]
pub fn dense_distances(
    lat: &Lattice,
    p: &Grid2D,
    f: &Sparse2D,
    at: &ActiveText,
    qs: &[Point],
    d: i64,
    pieces: &PatternPieces,
    k: u32,
    c: &mut Counters,
) -> Result<(Vec<u64>, DenseStats), Error> {
    let m = p.origin_square().ok_or(Error::BadShape)?;
    let n = at.n;
    if n % 2 == 1 || at.m != m {
        return Err(Error::BadShape);
    }
    let mut stats = DenseStats { d, ..DenseStats::default() };
    let mut out = vec![0u64; qs.len()];
    if f.is_empty() || qs.is_empty() {
        return Ok((out, stats));
    }
    let split = split_quarters(f, n);
    for (i, part) in split.parts.iter().enumerate() {
        stats.quarter_sizes[i] = part.len();
    }

    let (rare, common) = f.clone().split(|_, a| !is_frequent(pieces, a, k));
    stats.infrequent = rare.len();
    if !rare.is_empty() {
        let singles: Vec<TileString> = rare.entries().iter().map(|&(u, a)| singleton(lat, u, a)).collect();
        let v = sparse_distances(lat, pieces, &singles, m, n, qs, c)?;
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }

    let split = split_quarters(&common, n);
    let (n_i, m_i) = (n as i64, m as i64);
    for (i, part) in split.parts.iter().enumerate() {
        if part.is_empty() {
            continue;
        }
        let (fx, fy) = quarter_reflection(i);
        let v = if i == 0 {
            sigma_border(p, part, at, qs, d, c)?
        } else {
            let pr = Grid2D::from_fn(m, m, |u| *p.at(mirror(u, fx, fy, m_i)).unwrap());
            let fr = part.map_points(|u| mirror(u, fx, fy, n_i));
            let ar = at.reflected(fx, fy);
            let qr: Vec<Point> = qs.iter().map(|&q| mirror(q, fx, fy, n_i - m_i + 1)).collect();
            sigma_border(&pr, &fr, &ar, &qr, d, c)?
        };
        for (o, x) in out.iter_mut().zip(v) {
            *o += x;
        }
    }
    Ok((out, stats))
}
