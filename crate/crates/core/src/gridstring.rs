//! Dense and sparse 2D strings, their algebra, linearisation, and the
//! brute-force Hamming oracle.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::geom::Point;

/// Interned symbol. [`WILDCARD`] matches everything.
pub type Sym = u32;

/// Reserved wildcard symbol, the maximal value.
pub const WILDCARD: Sym = Sym::MAX;

/// Read access shared by every 2D string representation.
pub trait Str2D {
    /// Symbol at `p`, or `None` outside the domain.
    fn get(&self, p: Point) -> Option<Sym>;
    /// Visits every defined cell.
    fn for_each(&self, f: impl FnMut(Point, Sym));
    /// Size of the domain.
    fn size(&self) -> usize;
    /// Inclusive bounding box `(min, max)` of the domain.
    fn bbox(&self) -> Option<(Point, Point)>;
}

/// Symbols `a`, `b` match when equal or when either is a wildcard.
#[inline]
pub fn sym_match(a: Sym, b: Sym) -> bool {
    a == b || a == WILDCARD || b == WILDCARD
}

/// Dense rectangular array indexed by points, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table2D<T> {
    pub origin: Point,
    pub width: usize,
    pub height: usize,
    pub data: Vec<T>,
}

impl<T: Clone> Table2D<T> {
    pub fn filled(origin: Point, width: usize, height: usize, v: T) -> Self {
        Table2D { origin, width, height, data: vec![v; width * height] }
    }
}

impl<T> Table2D<T> {
    #[inline]
    pub fn index(&self, p: Point) -> Option<usize> {
        let dx = p.x - self.origin.x;
        let dy = p.y - self.origin.y;
        if dx < 0 || dy < 0 || dx as usize >= self.width || dy as usize >= self.height {
            None
        } else {
            Some(dy as usize * self.width + dx as usize)
        }
    }

    #[inline]
    pub fn at(&self, p: Point) -> Option<&T> {
        self.index(p).map(|i| &self.data[i])
    }

    #[inline]
    pub fn at_mut(&mut self, p: Point) -> Option<&mut T> {
        self.index(p).map(move |i| &mut self.data[i])
    }

    #[inline]
    pub fn point(&self, i: usize) -> Point {
        Point::new(
            self.origin.x + (i % self.width) as i64,
            self.origin.y + (i / self.width) as i64,
        )
    }

    pub fn contains(&self, p: Point) -> bool {
        self.index(p).is_some()
    }

    /// Iterates `(point, value)` row-major.
    pub fn iter(&self) -> impl Iterator<Item = (Point, &T)> + '_ {
        self.data.iter().enumerate().map(move |(i, v)| (self.point(i), v))
    }
}

/// Dense rectangular 2D string.
pub type Grid2D = Table2D<Sym>;

impl Grid2D {
    /// Builds a grid on `[w] x [h]` from a row-major symbol vector.
    pub fn from_rows(width: usize, height: usize, cells: Vec<Sym>) -> Result<Self, Error> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(Error::BadShape);
        }
        Ok(Table2D { origin: Point::ZERO, width, height, data: cells })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(Point) -> Sym) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(Point::new(x as i64, y as i64)));
            }
        }
        Table2D { origin: Point::ZERO, width, height, data }
    }

    /// Side length if the grid is a square anchored at the origin.
    pub fn origin_square(&self) -> Option<usize> {
        (self.origin == Point::ZERO && self.width == self.height && self.width > 0)
            .then_some(self.width)
    }

    pub fn has_wildcard(&self) -> bool {
        self.data.contains(&WILDCARD)
    }

    /// Restriction of the grid to `[x0, x0 + w) x [y0, y0 + h)` (clipped).
    pub fn sub_grid(&self, corner: Point, w: usize, h: usize) -> Grid2D {
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                data.push(self.get(corner + Point::new(x, y)).unwrap_or(WILDCARD));
            }
        }
        Table2D { origin: corner, width: w, height: h, data }
    }

    pub fn to_sparse(&self) -> Sparse2D {
        let mut entries = Vec::with_capacity(self.data.len());
        for x in 0..self.width as i64 {
            for y in 0..self.height as i64 {
                let p = self.origin + Point::new(x, y);
                entries.push((p, self.data[y as usize * self.width + x as usize]));
            }
        }
        Sparse2D { entries }
    }
}

impl Str2D for Grid2D {
    #[inline]
    fn get(&self, p: Point) -> Option<Sym> {
        self.at(p).copied()
    }

    fn for_each(&self, mut f: impl FnMut(Point, Sym)) {
        for (i, &s) in self.data.iter().enumerate() {
            f(self.point(i), s);
        }
    }

    fn size(&self) -> usize {
        self.data.len()
    }

    fn bbox(&self) -> Option<(Point, Point)> {
        (!self.data.is_empty()).then(|| {
            (self.origin, self.origin + Point::new(self.width as i64 - 1, self.height as i64 - 1))
        })
    }
}

/// 2D string stored as `(point, symbol)` pairs sorted by `(x, y)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sparse2D {
    entries: Vec<(Point, Sym)>,
}

impl Sparse2D {
    pub fn new() -> Self {
        Sparse2D { entries: Vec::new() }
    }

    /// Sorts the entries; later duplicates of a point are dropped.
    pub fn from_entries(mut entries: Vec<(Point, Sym)>) -> Self {
        entries.sort_by_key(|e| e.0);
        entries.dedup_by_key(|e| e.0);
        Sparse2D { entries }
    }

    /// Wraps entries already sorted by point with unique points.
    pub fn from_sorted(entries: Vec<(Point, Sym)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Sparse2D { entries }
    }

    pub fn entries(&self) -> &[(Point, Sym)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(Point, Sym)> {
        self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.entries.binary_search_by_key(&p, |e| e.0).is_ok()
    }

    pub fn restrict(&self, mut keep: impl FnMut(Point, Sym) -> bool) -> Sparse2D {
        Sparse2D { entries: self.entries.iter().copied().filter(|&(p, s)| keep(p, s)).collect() }
    }

    /// Splits by a predicate into `(kept, rest)`.
    pub fn split(self, mut keep: impl FnMut(Point, Sym) -> bool) -> (Sparse2D, Sparse2D) {
        let (a, b): (Vec<_>, Vec<_>) = self.entries.into_iter().partition(|&(p, s)| keep(p, s));
        (Sparse2D { entries: a }, Sparse2D { entries: b })
    }

    /// Applies an arbitrary injective point map.
    pub fn map_points(&self, mut f: impl FnMut(Point) -> Point) -> Sparse2D {
        Sparse2D::from_entries(self.entries.iter().map(|&(p, s)| (f(p), s)).collect())
    }

    pub fn map_symbols(&self, mut f: impl FnMut(Sym) -> Sym) -> Sparse2D {
        Sparse2D { entries: self.entries.iter().map(|&(p, s)| (p, f(s))).collect() }
    }

    /// Union of strings with disjoint domains.
    pub fn union(parts: &[Sparse2D]) -> Result<Sparse2D, Error> {
        let mut all: Vec<(Point, Sym)> = parts.iter().flat_map(|s| s.entries.iter().copied()).collect();
        all.sort_by_key(|e| e.0);
        if all.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::OverlapError);
        }
        Ok(Sparse2D { entries: all })
    }
}

impl Str2D for Sparse2D {
    fn get(&self, p: Point) -> Option<Sym> {
        self.entries.binary_search_by_key(&p, |e| e.0).ok().map(|i| self.entries[i].1)
    }

    fn for_each(&self, mut f: impl FnMut(Point, Sym)) {
        for &(p, s) in &self.entries {
            f(p, s);
        }
    }

    fn size(&self) -> usize {
        self.entries.len()
    }

    fn bbox(&self) -> Option<(Point, Point)> {
        let first = self.entries.first()?;
        let last = self.entries.last()?;
        let (mut lo, mut hi) = (first.0, last.0);
        for &(p, _) in &self.entries {
            lo.y = lo.y.min(p.y);
            hi.y = hi.y.max(p.y);
        }
        Some((lo, hi))
    }
}

/// `S + u`: the domain is shifted by `u`.
pub fn shift<S: Str2D>(s: &S, u: Point) -> Sparse2D {
    let mut entries = Vec::with_capacity(s.size());
    s.for_each(|p, c| entries.push((p + u, c)));
    Sparse2D::from_entries(entries)
}

/// `Ham(S, R)` and the mismatch set `MI(S, R)`, sorted by `(x, y)`.
pub fn hamming_oracle<S: Str2D, R: Str2D>(s: &S, r: &R) -> (usize, Vec<Point>) {
    let mut mi = Vec::new();
    s.for_each(|p, a| {
        if let Some(b) = r.get(p) {
            if !sym_match(a, b) {
                mi.push(p);
            }
        }
    });
    mi.sort();
    (mi.len(), mi)
}

/// `Ham(S + delta, S)` by direct overlap count.
pub fn self_shift_hamming<S: Str2D>(s: &S, delta: Point) -> usize {
    let mut c = 0;
    s.for_each(|p, a| {
        if let Some(b) = s.get(p + delta) {
            if !sym_match(a, b) {
                c += 1;
            }
        }
    });
    c
}

/// Per-offset values `min(k + 1, Ham)` over `q in [side]^2`, row-major by `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OffsetCounts {
    pub side: usize,
    pub values: Vec<u32>,
}

impl OffsetCounts {
    pub fn filled(side: usize, v: u32) -> Self {
        OffsetCounts { side, values: vec![v; side * side] }
    }

    #[inline]
    pub fn get(&self, q: Point) -> u32 {
        self.values[q.y as usize * self.side + q.x as usize]
    }

    #[inline]
    pub fn set(&mut self, q: Point, v: u32) {
        self.values[q.y as usize * self.side + q.x as usize] = v;
    }

    /// `(q, value)` in row-major order of `q`.
    pub fn iter(&self) -> impl Iterator<Item = (Point, u32)> + '_ {
        let s = self.side;
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (Point::new((i % s) as i64, (i / s) as i64), v))
    }
}

/// Checks that `P`, `T` are origin squares with `m <= n`; returns `(m, n)`.
pub fn square_shapes(p: &Grid2D, t: &Grid2D) -> Result<(usize, usize), Error> {
    match (p.origin_square(), t.origin_square()) {
        (Some(m), Some(n)) if m <= n => Ok((m, n)),
        _ => Err(Error::BadShape),
    }
}

/// Brute-force `min(k + 1, Ham(T, P + q))` for every `q in [n - m + 1]^2`.
pub fn oracle_all_offsets(p: &Grid2D, t: &Grid2D, k: u32) -> Result<OffsetCounts, Error> {
    let (m, n) = square_shapes(p, t)?;
    let side = n - m + 1;
    let mut out = OffsetCounts::filled(side, 0);
    for qy in 0..side {
        for qx in 0..side {
            let mut d = 0u32;
            'scan: for y in 0..m {
                let prow = &p.data[y * m..(y + 1) * m];
                let trow = &t.data[(qy + y) * n + qx..(qy + y) * n + qx + m];
                for (a, b) in prow.iter().zip(trow) {
                    if !sym_match(*a, *b) {
                        d += 1;
                        if d > k {
                            break 'scan;
                        }
                    }
                }
            }
            out.values[qy * side + qx] = d;
        }
    }
    Ok(out)
}

/// Column-major linearisation: `symbols[x * height + y]`, relative to `origin`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lin1D {
    pub symbols: Vec<Sym>,
    pub origin: Point,
    pub width: usize,
    pub height: usize,
}

/// Inscribes `S` in its bounding box and writes it column by column, with
/// wildcards where `S` is undefined.
pub fn linearize<S: Str2D>(s: &S) -> Result<Lin1D, Error> {
    let (lo, hi) = s.bbox().ok_or(Error::EmptyString)?;
    let width = (hi.x - lo.x + 1) as usize;
    let height = (hi.y - lo.y + 1) as usize;
    let mut symbols = vec![WILDCARD; width * height];
    s.for_each(|p, c| {
        symbols[(p.x - lo.x) as usize * height + (p.y - lo.y) as usize] = c;
    });
    Ok(Lin1D { symbols, origin: lo, width, height })
}

/// 1D embedding of a pair of 2D strings for text-to-pattern distances.
///
/// The pattern is laid out with the text's column stride, so 1D alignment
/// `j = dx * h_T + dy` lines up every pattern column with a text column.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub pattern: Vec<Sym>,
    pub text: Lin1D,
    pub p_origin: Point,
    pub p_width: usize,
    pub p_height: usize,
}

impl Embedding {
    /// 2D offsets `q` with `bbox(P) + q` inside `bbox(T)`: `(first, cols, rows)`.
    pub fn offset_range(&self) -> (Point, usize, usize) {
        (
            self.text.origin - self.p_origin,
            self.text.width + 1 - self.p_width,
            self.text.height + 1 - self.p_height,
        )
    }

    /// 1D alignment for a valid 2D offset.
    #[inline]
    pub fn alignment(&self, q: Point) -> Option<usize> {
        let (first, cols, rows) = self.offset_range();
        let d = q - first;
        (d.x >= 0 && d.y >= 0 && (d.x as usize) < cols && (d.y as usize) < rows)
            .then(|| d.x as usize * self.text.height + d.y as usize)
    }
}

/// Embeds `P`, `T` so that the 1D distance at [`Embedding::alignment`]`(q)`
/// equals `Ham(T, P + q)`. Requires `bbox(P)` to fit inside `bbox(T)`.
pub fn pad_embed<S: Str2D, R: Str2D>(p: &S, t: &R) -> Result<Embedding, Error> {
    let (plo, phi) = p.bbox().ok_or(Error::EmptyString)?;
    let text = linearize(t)?;
    let p_width = (phi.x - plo.x + 1) as usize;
    let p_height = (phi.y - plo.y + 1) as usize;
    if p_width > text.width || p_height > text.height {
        return Err(Error::SizeError);
    }
    let h = text.height;
    // Trailing wildcard rows of the last column are dropped.
    let mut pattern = vec![WILDCARD; (p_width - 1) * h + p_height];
    p.for_each(|u, c| {
        pattern[(u.x - plo.x) as usize * h + (u.y - plo.y) as usize] = c;
    });
    Ok(Embedding { pattern, text, p_origin: plo, p_width, p_height })
}
