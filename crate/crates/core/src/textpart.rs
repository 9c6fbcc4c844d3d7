//! Active text, peripherality, the parallelogram grid and the split of the
//! active text into monochromatic subtile strings plus a peripheral rest.
//!
//! The text is `[n]^2` with `n <= 3m/2`. Quarters are taken around
//! `z = (n - 1) / 2`, which is stored doubled as `2z = n - 1`.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;

use crate::counters::Counters;
use crate::error::Error;
use crate::geom::{div_ceil, div_floor, isqrt_ceil, Point};
use crate::gridstring::{Grid2D, Sparse2D, Sym};
use crate::tiling::{tile_decompose, Lattice, TileString, TruncSig};

/// Diameter constant of grid cells: `|u - v| <= C1 * n / l` inside a cell box.
pub const C1: i128 = 8;
/// Peripherality constant: the rest is `(C2 * m / l)`-peripheral.
pub const C2: i128 = 8;
/// Piece-count constant: at most `C3 * l * budget` text pieces.
pub const C3: usize = 16;

const FAR: i64 = i64::MAX / 4;

/// `T` restricted to the union of the squares `[m]^2 + q`, `q in Q`.
#[derive(Clone, Debug)]
pub struct ActiveText {
    pub n: usize,
    pub m: usize,
    text: Grid2D,
    mask: Vec<bool>,
    /// `(n + 1)^2` prefix sums of `mask`.
    prefix: Vec<u32>,
    /// Prefix sums of the offset indicator over `[n - m + 1]^2`.
    q_prefix: Vec<u32>,
    q_count: usize,
    /// Sorted distinct offsets.
    offsets: Vec<Point>,
    /// Per column: lowest and highest active row.
    pub col_span: Vec<Option<(usize, usize)>>,
    /// Per row: leftmost and rightmost active column.
    pub row_span: Vec<Option<(usize, usize)>>,
    dist2: OnceCell<Vec<i64>>,
}

fn prefix_2d(side: usize, v: impl Fn(usize, usize) -> u32) -> Vec<u32> {
    let w = side + 1;
    let mut p = vec![0u32; w * w];
    for y in 0..side {
        for x in 0..side {
            p[(y + 1) * w + x + 1] = v(x, y) + p[y * w + x + 1] + p[(y + 1) * w + x] - p[y * w + x];
        }
    }
    p
}

fn rect_sum(p: &[u32], side: usize, lo: Point, hi: Point) -> u32 {
    let lo = Point::new(lo.x.max(0), lo.y.max(0));
    let hi = Point::new(hi.x.min(side as i64 - 1), hi.y.min(side as i64 - 1));
    if lo.x > hi.x || lo.y > hi.y {
        return 0;
    }
    let w = side + 1;
    let (x0, y0, x1, y1) = (lo.x as usize, lo.y as usize, hi.x as usize + 1, hi.y as usize + 1);
    p[y1 * w + x1] + p[y0 * w + x0] - p[y0 * w + x1] - p[y1 * w + x0]
}

impl ActiveText {
    /// `T` must be an `n x n` grid at the origin and every `q` must lie in `[n - m + 1]^2`.
    pub fn build(t: &Grid2D, q: &[Point], m: usize) -> Result<Self, Error> {
        let n = t.origin_square().ok_or(Error::BadShape)?;
        if t.origin != Point::ZERO || m == 0 || m > n {
            return Err(Error::BadShape);
        }
        let side = n - m + 1;
        let mut q_mask = vec![0u32; side * side];
        for &o in q {
            if o.x < 0 || o.y < 0 || o.x as usize >= side || o.y as usize >= side {
                return Err(Error::OffsetOutOfRange);
            }
            q_mask[o.y as usize * side + o.x as usize] = 1;
        }
        let q_count = q_mask.iter().filter(|&&b| b == 1).count();
        let mut offsets = q.to_vec();
        offsets.sort();
        offsets.dedup();
        let q_prefix = prefix_2d(side, |x, y| q_mask[y * side + x]);
        // Cell u is active iff some q lies in [u - m + 1, u].
        let mut mask = vec![false; n * n];
        for y in 0..n {
            for x in 0..n {
                let u = Point::new(x as i64, y as i64);
                let lo = u - Point::new(m as i64 - 1, m as i64 - 1);
                mask[y * n + x] = rect_sum(&q_prefix, side, lo, u) > 0;
            }
        }
        let prefix = prefix_2d(n, |x, y| mask[y * n + x] as u32);
        let mut col_span = vec![None; n];
        let mut row_span = vec![None; n];
        for y in 0..n {
            for x in 0..n {
                if mask[y * n + x] {
                    let c: &mut Option<(usize, usize)> = &mut col_span[x];
                    *c = Some(c.map_or((y, y), |(a, _)| (a, y)));
                    let r: &mut Option<(usize, usize)> = &mut row_span[y];
                    *r = Some(r.map_or((x, x), |(a, _)| (a, x)));
                }
            }
        }
        Ok(ActiveText {
            n,
            m,
            text: t.clone(),
            mask,
            prefix,
            q_prefix,
            q_count,
            offsets,
            col_span,
            row_span,
            dist2: OnceCell::new(),
        })
    }

    pub fn is_active(&self, u: Point) -> bool {
        let n = self.n as i64;
        (0..n).contains(&u.x) && (0..n).contains(&u.y) && self.mask[(u.y * n + u.x) as usize]
    }

    pub fn active_in_rect(&self, lo: Point, hi: Point) -> u32 {
        rect_sum(&self.prefix, self.n, lo, hi)
    }

    pub fn offset_count(&self) -> usize {
        self.q_count
    }

    pub fn offsets(&self) -> &[Point] {
        &self.offsets
    }

    pub fn has_offset(&self, q: Point) -> bool {
        let side = (self.n - self.m + 1) as i64;
        (0..side).contains(&q.x) && (0..side).contains(&q.y) && rect_sum(&self.q_prefix, side as usize, q, q) > 0
    }

    pub fn text(&self) -> &Grid2D {
        &self.text
    }

    /// The same instance mirrored in `x` (`fx`) and/or `y` (`fy`) inside `[n]^2`;
    /// offsets map to `n - m - q` on each mirrored axis.
    pub fn reflected(&self, fx: bool, fy: bool) -> ActiveText {
        let (n, m) = (self.n as i64, self.m as i64);
        let pt = |u: Point| Point::new(if fx { n - 1 - u.x } else { u.x }, if fy { n - 1 - u.y } else { u.y });
        let t = Grid2D::from_fn(self.n, self.n, |u| self.symbol(pt(u)));
        let q: Vec<Point> = self
            .offsets
            .iter()
            .map(|q| Point::new(if fx { n - m - q.x } else { q.x }, if fy { n - m - q.y } else { q.y }))
            .collect();
        ActiveText::build(&t, &q, self.m).expect("reflection preserves shape")
    }

    /// Some `q in Q` with `[lo, hi] ⊆ [m]^2 + q`, if one exists.
    pub fn covering_offset(&self, lo: Point, hi: Point) -> Option<Point> {
        let side = self.n - self.m + 1;
        let m1 = self.m as i64 - 1;
        let a = Point::new(hi.x - m1, hi.y - m1);
        if rect_sum(&self.q_prefix, side, a, lo) == 0 {
            return None;
        }
        // Smallest row with a hit, then smallest column in it.
        let (mut ylo, mut yhi) = (a.y.max(0), lo.y.min(side as i64 - 1));
        while ylo < yhi {
            let mid = ylo + (yhi - ylo) / 2;
            if rect_sum(&self.q_prefix, side, Point::new(a.x, a.y), Point::new(lo.x, mid)) > 0 {
                yhi = mid;
            } else {
                ylo = mid + 1;
            }
        }
        let y = ylo;
        let (mut xlo, mut xhi) = (a.x.max(0), lo.x.min(side as i64 - 1));
        while xlo < xhi {
            let mid = xlo + (xhi - xlo) / 2;
            if rect_sum(&self.q_prefix, side, Point::new(a.x, y), Point::new(mid, y)) > 0 {
                xhi = mid;
            } else {
                xlo = mid + 1;
            }
        }
        Some(Point::new(xlo, y))
    }

    /// `T_a` as a sparse string.
    pub fn restrict(&self) -> Sparse2D {
        let n = self.n;
        let mut out = Vec::new();
        for x in 0..n {
            for y in 0..n {
                if self.mask[y * n + x] {
                    out.push((Point::new(x as i64, y as i64), self.text.data[y * n + x]));
                }
            }
        }
        Sparse2D::from_sorted(out)
    }

    pub fn symbol(&self, u: Point) -> Sym {
        self.text.data[u.y as usize * self.n + u.x as usize]
    }

    /// Squared distance from `u` to the nearest inactive integer point
    /// (everything outside `[n]^2` is inactive).
    pub fn border_distance2(&self, u: Point) -> i64 {
        if !self.is_active(u) {
            return 0;
        }
        let field = self.dist2.get_or_init(|| self.distance_field());
        field[u.y as usize * self.n + u.x as usize]
    }

    /// Smallest integer `d` with every active cell `d`-peripheral, restricted to `s`.
    pub fn peripheral_radius(&self, s: &Sparse2D) -> i64 {
        let worst = s.points().map(|u| self.border_distance2(u)).max().unwrap_or(0);
        isqrt_ceil(worst as i128) as i64
    }

    /// Exact squared Euclidean distance transform over `[-1, n]^2` with an
    /// inactive frame: a column pass followed by a lower envelope per row.
    fn distance_field(&self) -> Vec<i64> {
        let n = self.n;
        let s = n + 2;
        let active = |x: usize, y: usize| x >= 1 && y >= 1 && x <= n && y <= n && self.mask[(y - 1) * n + x - 1];
        let mut g = vec![FAR; s * s];
        for x in 0..s {
            let mut last: Option<usize> = None;
            for y in 0..s {
                if !active(x, y) {
                    last = Some(y);
                }
                if let Some(l) = last {
                    g[y * s + x] = (y - l) as i64;
                }
            }
            last = None;
            for y in (0..s).rev() {
                if !active(x, y) {
                    last = Some(y);
                }
                if let Some(l) = last {
                    let d = (l - y) as i64;
                    if d < g[y * s + x] {
                        g[y * s + x] = d;
                    }
                }
            }
        }
        let mut out = vec![0i64; n * n];
        let mut row = vec![FAR; s];
        for y in 1..=n {
            for x in 0..s {
                let v = g[y * s + x];
                row[x] = if v >= FAR { FAR } else { v * v };
            }
            let d = lower_envelope(&row);
            for x in 1..=n {
                out[(y - 1) * n + x - 1] = d[x];
            }
        }
        out
    }
}

/// `d[q] = min_p (q - p)^2 + f[p]` over finite `f[p]`, in exact integers.
fn lower_envelope(f: &[i64]) -> Vec<i64> {
    let n = f.len();
    let mut v: Vec<usize> = Vec::with_capacity(n);
    // Left boundary of parabola v[k] as num / den with den > 0; None is -inf.
    let mut z: Vec<Option<(i128, i128)>> = Vec::with_capacity(n);
    let key = |q: usize| f[q] as i128 + (q * q) as i128;
    for (q, &fq) in f.iter().enumerate() {
        if fq >= FAR {
            continue;
        }
        loop {
            let Some(&p) = v.last() else {
                v.push(q);
                z.push(None);
                break;
            };
            let num = key(q) - key(p);
            let den = 2 * (q - p) as i128;
            let zk = *z.last().unwrap();
            if let Some((a, b)) = zk {
                if num * b <= a * den {
                    v.pop();
                    z.pop();
                    continue;
                }
            }
            v.push(q);
            z.push(Some((num, den)));
            break;
        }
    }
    let mut d = vec![FAR; n];
    if v.is_empty() {
        return d;
    }
    let mut k = 0;
    for (q, dq) in d.iter_mut().enumerate() {
        while k + 1 < v.len() {
            let (a, b) = z[k + 1].unwrap();
            if a <= q as i128 * b {
                k += 1;
            } else {
                break;
            }
        }
        let p = v[k];
        let dx = q as i64 - p as i64;
        *dq = dx * dx + f[p];
    }
    d
}

/// Parallelogram grid: cell `(i, j)` is `alpha_i < h(u) < alpha_{i+1}`,
/// `beta_j < s(u) < beta_{j+1}`, with all offsets stored as numerators over
/// `den = 2 l^2`.
#[derive(Clone, Debug)]
pub struct PGrid {
    pub l: usize,
    pub n: usize,
    pub lat: Lattice,
    pub den: i128,
    pub alpha: Vec<i128>,
    pub beta: Vec<i128>,
}

/// Integer geometry of one grid cell (all of `cell ∩ Z^2`, not only `[n]^2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
    /// Bounding box of the integer points; `None` for a cell without any.
    pub bbox: Option<(Point, Point)>,
    /// Touches the closed quarters `K1..K4`.
    pub touches: [bool; 4],
}

/// Equispaced offsets strictly between the extreme values of `vals`, avoiding every value.
fn line_offsets(mut vals: Vec<i128>, l: usize, den: i128) -> Vec<i128> {
    vals.sort_unstable();
    vals.dedup();
    let (c1, cn) = (vals[0], *vals.last().unwrap());
    let g = vals.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(1);
    let li = l as i128;
    // delta = g / 2l, so delta * den = g * l.
    let delta = g * li;
    let a0 = c1 * den - delta;
    let step = 2 * li * (cn - c1) + 2 * g;
    let mut out = Vec::with_capacity(l + 1);
    for i in 0..=li {
        let mut a = a0 + i * step;
        if a % den == 0 && vals.binary_search(&(a / den)).is_ok() {
            a += delta;
        }
        out.push(a);
    }
    out
}

impl PGrid {
    pub fn build(n: usize, lat: Lattice, l: usize) -> Result<Self, Error> {
        if l == 0 || n == 0 {
            return Err(Error::PreconditionViolated("grid needs l >= 1 and n >= 1"));
        }
        let li = l as i128;
        let den = 2 * li * li;
        let mut hs = Vec::with_capacity(n * n);
        let mut ss = Vec::with_capacity(n * n);
        for x in 0..n as i64 {
            for y in 0..n as i64 {
                let u = Point::new(x, y);
                hs.push(lat.h(u));
                ss.push(lat.s(u));
            }
        }
        let alpha = line_offsets(hs, l, den);
        let beta = line_offsets(ss, l, den);
        Ok(PGrid { l, n, lat, den, alpha, beta })
    }

    /// Cell holding `u`, if `u` lies strictly inside the outer lines.
    pub fn cell_of(&self, u: Point) -> Option<(usize, usize)> {
        let h = self.lat.h(u) * self.den;
        let s = self.lat.s(u) * self.den;
        let i = self.alpha.partition_point(|&a| a < h);
        let j = self.beta.partition_point(|&b| b < s);
        (i >= 1 && i <= self.l && j >= 1 && j <= self.l).then(|| (i - 1, j - 1))
    }

    /// Vertex `h = alpha_i`, `s = beta_j` as numerators over `den * det`.
    pub fn vertex(&self, i: usize, j: usize) -> (i128, i128) {
        let (a, b) = (self.alpha[i], self.beta[j]);
        let (f, p) = (self.lat.phi, self.lat.psi);
        (-b * f.x as i128 + a * p.x as i128, -b * f.y as i128 + a * p.y as i128)
    }

    /// Integer `y` range of column `x` inside cell `(i, j)`.
    fn column(&self, i: usize, j: usize, x: i64) -> Option<(i64, i64)> {
        let d = self.den;
        let (f, p) = (self.lat.phi, self.lat.psi);
        let x = x as i128;
        let (mut lo, mut hi) = (i64::MIN as i128, i64::MAX as i128);
        // h = f.x * y - f.y * x
        if f.x > 0 {
            let k = d * f.x as i128;
            lo = lo.max(div_floor(self.alpha[i] + d * f.y as i128 * x, k) + 1);
            hi = hi.min(div_ceil(self.alpha[i + 1] + d * f.y as i128 * x, k) - 1);
        } else {
            let h = -(f.y as i128) * x * d;
            if !(self.alpha[i] < h && h < self.alpha[i + 1]) {
                return None;
            }
        }
        // s = p.x * y - p.y * x with p.x > 0
        let k = d * p.x as i128;
        lo = lo.max(div_floor(self.beta[j] + d * p.y as i128 * x, k) + 1);
        hi = hi.min(div_ceil(self.beta[j + 1] + d * p.y as i128 * x, k) - 1);
        (lo <= hi).then_some((lo as i64, hi as i64))
    }

    /// Integer points of the cell, column by column.
    pub fn cell_columns(&self, i: usize, j: usize) -> Vec<(i64, i64, i64)> {
        let dd = self.den * self.lat.det;
        let vs = [self.vertex(i, j), self.vertex(i + 1, j), self.vertex(i, j + 1), self.vertex(i + 1, j + 1)];
        let x0 = vs.iter().map(|v| div_floor(v.0, dd)).min().unwrap() as i64;
        let x1 = vs.iter().map(|v| div_ceil(v.0, dd)).max().unwrap() as i64;
        (x0..=x1).filter_map(|x| self.column(i, j, x).map(|(a, b)| (x, a, b))).collect()
    }

    pub fn cell(&self, i: usize, j: usize) -> Cell {
        let z2 = self.n as i64 - 1;
        let mut bbox: Option<(Point, Point)> = None;
        let mut touches = [false; 4];
        for (x, a, b) in self.cell_columns(i, j) {
            let (lo, hi) = bbox.unwrap_or((Point::new(x, a), Point::new(x, b)));
            bbox = Some((Point::new(lo.x.min(x), lo.y.min(a)), Point::new(hi.x.max(x), hi.y.max(b))));
            let (right, left) = (2 * x >= z2, 2 * x <= z2);
            let (top, bottom) = (2 * b >= z2, 2 * a <= z2);
            touches[0] |= right && top;
            touches[1] |= left && top;
            touches[2] |= left && bottom;
            touches[3] |= right && bottom;
        }
        Cell { i, j, bbox, touches }
    }

    /// Sig of the union of cells `[i0, i1] x [j0, j1]`.
    pub fn block_sig(&self, i0: usize, i1: usize, j0: usize, j1: usize) -> TruncSig {
        let d = self.den;
        TruncSig {
            x0: None,
            x1: None,
            y0: None,
            y1: None,
            phi0: div_floor(self.alpha[i0], d) + 1,
            phi1: div_ceil(self.alpha[i1 + 1], d) - 1,
            psi0: div_floor(self.beta[j0], d) + 1,
            psi1: div_ceil(self.beta[j1 + 1], d) - 1,
            gamma: None,
        }
    }
}

impl Cell {
    /// Open quarter (1..=4) containing the whole cell, `None` when straddling.
    pub fn quarter(&self, n: usize) -> Option<u8> {
        let (lo, hi) = self.bbox?;
        let z2 = n as i64 - 1;
        let (r, l) = (2 * lo.x > z2, 2 * hi.x < z2);
        let (t, b) = (2 * lo.y > z2, 2 * hi.y < z2);
        match (r, l, t, b) {
            (true, _, true, _) => Some(1),
            (_, true, true, _) => Some(2),
            (_, true, _, true) => Some(3),
            (true, _, _, true) => Some(4),
            _ => None,
        }
    }

    pub fn corners(&self) -> Option<[Point; 4]> {
        let (lo, hi) = self.bbox?;
        // Indexed by quarter: K1 max/max, K2 min/max, K3 min/min, K4 max/min.
        Some([hi, Point::new(lo.x, hi.y), lo, Point::new(hi.x, lo.y)])
    }
}

/// Outcome of the corner rule for one cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellClass {
    /// No integer points.
    Empty,
    /// Some bounding-box corner is inactive, so every point is near the border.
    Peripheral,
    /// All corners are active; the cell lies inside `[m]^2 + q`.
    Coverable { quarter: u8, q: Point },
}

/// Corner rule: any inactive corner makes the cell peripheral; otherwise the
/// corner of a quarter the cell touches is active and the cell is coverable.
pub fn classify_cell(at: &ActiveText, cell: &Cell) -> CellClass {
    let (Some(cs), Some((lo, hi))) = (cell.corners(), cell.bbox) else {
        return CellClass::Empty;
    };
    if cs.iter().any(|&c| !at.is_active(c)) {
        return CellClass::Peripheral;
    }
    let quarter = cell.quarter(at.n).unwrap_or_else(|| cell.touches.iter().position(|&t| t).unwrap() as u8 + 1);
    match at.covering_offset(lo, hi) {
        Some(q) => CellClass::Coverable { quarter, q },
        None => {
            debug_assert!(false, "active corners without a covering offset");
            CellClass::Peripheral
        }
    }
}

/// Result of [`text_decompose`].
#[derive(Clone, Debug, Default)]
pub struct TextDecomposition {
    /// Monochromatic plain subtile strings.
    pub pieces: Vec<TileString>,
    /// The peripheral rest.
    pub periphery: Sparse2D,
    /// Coverable blocks fed to the tile decomposition.
    pub blocks: usize,
    /// True when the grid was too coarse and everything went to the periphery.
    pub trivial: bool,
}

struct Block {
    i0: usize,
    i1: usize,
    j0: usize,
    j1: usize,
    lo: Point,
    hi: Point,
}

/// Partitions `T_a` into monochromatic subtile strings and a peripheral string.
///
/// Cells entirely inside `K1`/`K3` are merged along grid columns (fixed `j`),
/// cells inside `K2`/`K4` along grid rows (fixed `i`); a run grows while its
/// bounding box stays inside one `[m]^2 + q`. Straddling cells stand alone.
pub fn text_decompose(at: &ActiveText, lat: &Lattice, l: usize, c: &mut Counters) -> Result<TextDecomposition, Error> {
    let grid = PGrid::build(at.n, *lat, l)?;
    let n = at.n;
    let trivial = || TextDecomposition { periphery: at.restrict(), trivial: true, ..Default::default() };
    let mut cells = Vec::with_capacity(l * l);
    for i in 0..l {
        for j in 0..l {
            let cell = grid.cell(i, j);
            if let Some((lo, hi)) = cell.bbox {
                if 4 * (hi.x - lo.x) >= at.m as i64 || 4 * (hi.y - lo.y) >= at.m as i64 {
                    return Ok(trivial());
                }
            }
            cells.push(cell);
        }
    }
    let classes: Vec<CellClass> = cells.iter().map(|cell| classify_cell(at, cell)).collect();
    // Block id per cell; usize::MAX marks the periphery.
    let mut owner = vec![usize::MAX; l * l];
    let mut blocks: Vec<Block> = Vec::new();
    let idx = |i: usize, j: usize| i * l + j;

    let mut grow = |seq: &mut dyn Iterator<Item = (usize, usize)>, quarter: u8, owner: &mut Vec<usize>| {
        let mut cur: Option<Block> = None;
        for (i, j) in seq {
            let k = idx(i, j);
            let cell = &cells[k];
            match classes[k] {
                CellClass::Empty => continue,
                CellClass::Coverable { .. } if cell.quarter(n) == Some(quarter) => {
                    let (lo, hi) = cell.bbox.unwrap();
                    if let Some(b) = cur.as_mut() {
                        let (ulo, uhi) = (
                            Point::new(b.lo.x.min(lo.x), b.lo.y.min(lo.y)),
                            Point::new(b.hi.x.max(hi.x), b.hi.y.max(hi.y)),
                        );
                        if at.covering_offset(ulo, uhi).is_some() {
                            b.i0 = b.i0.min(i);
                            b.i1 = b.i1.max(i);
                            b.j0 = b.j0.min(j);
                            b.j1 = b.j1.max(j);
                            b.lo = ulo;
                            b.hi = uhi;
                            owner[k] = blocks.len();
                            continue;
                        }
                        blocks.push(cur.take().unwrap());
                    }
                    owner[k] = blocks.len();
                    cur = Some(Block { i0: i, i1: i, j0: j, j1: j, lo, hi });
                }
                _ => {
                    if let Some(b) = cur.take() {
                        blocks.push(b);
                    }
                }
            }
        }
        if let Some(b) = cur.take() {
            blocks.push(b);
        }
    };
    for j in 0..l {
        grow(&mut (0..l).map(|i| (i, j)), 1, &mut owner);
        grow(&mut (0..l).map(|i| (i, j)), 3, &mut owner);
    }
    for i in 0..l {
        grow(&mut (0..l).map(|j| (i, j)), 2, &mut owner);
        grow(&mut (0..l).map(|j| (i, j)), 4, &mut owner);
    }
    for (k, cell) in cells.iter().enumerate() {
        if cell.quarter(n).is_none() {
            if let CellClass::Coverable { .. } = classes[k] {
                let (lo, hi) = cell.bbox.unwrap();
                owner[k] = blocks.len();
                blocks.push(Block { i0: cell.i, i1: cell.i, j0: cell.j, j1: cell.j, lo, hi });
            }
        }
    }
    c.peripheral_cells += classes.iter().filter(|&&k| k == CellClass::Peripheral).count() as u64;

    let mut members: Vec<Vec<(Point, Sym)>> = vec![Vec::new(); blocks.len()];
    let mut periphery = Vec::new();
    for x in 0..n as i64 {
        for y in 0..n as i64 {
            let u = Point::new(x, y);
            if !at.is_active(u) {
                continue;
            }
            let (i, j) = grid.cell_of(u).ok_or(Error::PreconditionViolated("grid misses a text cell"))?;
            match owner[idx(i, j)] {
                usize::MAX => periphery.push((u, at.symbol(u))),
                b => members[b].push((u, at.symbol(u))),
            }
        }
    }
    let mut pieces = Vec::new();
    for (b, pts) in blocks.iter().zip(members) {
        let sig = grid.block_sig(b.i0, b.i1, b.j0, b.j1);
        pieces.extend(tile_decompose(&Sparse2D::from_sorted(pts), sig, lat));
    }
    c.text_pieces += pieces.len() as u64;
    Ok(TextDecomposition { pieces, periphery: Sparse2D::from_sorted(periphery), blocks: blocks.len(), trivial: false })
}
