//! Lattice machinery and the decomposition of approximately periodic
//! strings into monochromatic truncated subtile strings.
//!
//! Throughout, `h(u) = phi × u` and `s(u) = psi × u`. A point `u = a*phi + b*psi`
//! has `h(u) = b * det` and `s(u) = -a * det` with `det = phi × psi > 0`.

use alloc::vec::Vec;

use crate::error::Error;
use crate::geom::{cross, div_ceil, div_floor, Point};
use crate::gridstring::{Sparse2D, Str2D, Sym};

/// Lattice `{a*phi + b*psi : a, b in Z}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub phi: Point,
    pub psi: Point,
    pub det: i128,
}

impl Lattice {
    /// `phi` in `[0, inf) x (-inf, 0)`, `psi` in `(0, inf) x [0, inf)`.
    pub fn new(phi: Point, psi: Point) -> Result<Self, Error> {
        let det = cross(phi, psi);
        if det == 0 {
            return Err(Error::CollinearBasis);
        }
        if det < 0 {
            return Err(Error::PreconditionViolated("phi × psi must be positive"));
        }
        Ok(Lattice { phi, psi, det })
    }

    #[inline]
    pub fn h(&self, u: Point) -> i128 {
        cross(self.phi, u)
    }

    #[inline]
    pub fn s(&self, u: Point) -> i128 {
        cross(self.psi, u)
    }

    /// `u = (a_num * phi + b_num * psi) / det`, plus the class representative
    /// `gamma = frac(a) * phi + frac(b) * psi`.
    pub fn decompose(&self, u: Point) -> (i128, i128, Point) {
        let a_num = -self.s(u);
        let b_num = self.h(u);
        let fa = div_floor(a_num, self.det) as i64;
        let fb = div_floor(b_num, self.det) as i64;
        (a_num, b_num, u - self.phi * fa - self.psi * fb)
    }

    /// Representative of the class of `u` in [`Lattice::gamma_set`].
    #[inline]
    pub fn reduce(&self, u: Point) -> Point {
        self.decompose(u).2
    }

    #[inline]
    pub fn congruent(&self, u: Point, v: Point) -> bool {
        let d = v - u;
        self.h(d) % self.det == 0 && self.s(d) % self.det == 0
    }

    /// Integer points of `{a*phi + b*psi : a, b in [0, 1)}`, one per class.
    pub fn gamma_set(&self) -> Vec<Point> {
        let (phi, psi) = (self.phi, self.psi);
        let mut out = Vec::new();
        for x in 0..=phi.x + psi.x {
            for y in phi.y..=psi.y {
                let u = Point::new(x, y);
                let (h, s) = (self.h(u), self.s(u));
                if 0 <= h && h < self.det && -self.det < s && s <= 0 {
                    out.push(u);
                }
            }
        }
        out
    }

    /// The point with `h(u) = h` and `s(u) = s` as a rational `num / det`.
    fn vertex(&self, h: i128, s: i128) -> (i128, i128) {
        // u = (-s * phi + h * psi) / det
        (
            -s * self.phi.x as i128 + h * self.psi.x as i128,
            -s * self.phi.y as i128 + h * self.psi.y as i128,
        )
    }
}

/// Signature of a truncated subtile:
/// `[x0, x1] x [y0, y1] ∩ {h(u) in [phi0, phi1], s(u) in [psi0, psi1]} ∩ (L + gamma)`,
/// with `None` standing for an infinite bound and an absent class meaning
/// the whole truncated tile.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TruncSig {
    pub x0: Option<i64>,
    pub x1: Option<i64>,
    pub y0: Option<i64>,
    pub y1: Option<i64>,
    pub phi0: i128,
    pub phi1: i128,
    pub psi0: i128,
    pub psi1: i128,
    pub gamma: Option<Point>,
}

impl TruncSig {
    /// Tightest truncated tile containing the rectangle `[lo, hi]`.
    pub fn rect(lat: &Lattice, lo: Point, hi: Point) -> Self {
        let corners = [lo, hi, Point::new(lo.x, hi.y), Point::new(hi.x, lo.y)];
        let hs = corners.map(|c| lat.h(c));
        let ss = corners.map(|c| lat.s(c));
        TruncSig {
            x0: Some(lo.x),
            x1: Some(hi.x),
            y0: Some(lo.y),
            y1: Some(hi.y),
            phi0: *hs.iter().min().unwrap(),
            phi1: *hs.iter().max().unwrap(),
            psi0: *ss.iter().min().unwrap(),
            psi1: *ss.iter().max().unwrap(),
            gamma: None,
        }
    }

    /// Plain subtile (no axis truncation).
    pub fn plain(phi0: i128, phi1: i128, psi0: i128, psi1: i128, gamma: Point) -> Self {
        TruncSig { x0: None, x1: None, y0: None, y1: None, phi0, phi1, psi0, psi1, gamma: Some(gamma) }
    }

    pub fn is_plain(&self) -> bool {
        self.x0.is_none() && self.x1.is_none() && self.y0.is_none() && self.y1.is_none()
    }

    pub fn is_empty_range(&self) -> bool {
        self.phi0 > self.phi1
            || self.psi0 > self.psi1
            || matches!((self.x0, self.x1), (Some(a), Some(b)) if a > b)
            || matches!((self.y0, self.y1), (Some(a), Some(b)) if a > b)
    }

    pub fn contains(&self, lat: &Lattice, u: Point) -> bool {
        let (h, s) = (lat.h(u), lat.s(u));
        self.x0.is_none_or(|v| u.x >= v)
            && self.x1.is_none_or(|v| u.x <= v)
            && self.y0.is_none_or(|v| u.y >= v)
            && self.y1.is_none_or(|v| u.y <= v)
            && self.phi0 <= h
            && h <= self.phi1
            && self.psi0 <= s
            && s <= self.psi1
            && self.gamma.is_none_or(|g| lat.congruent(g, u))
    }

    /// Condition 2 of a truncated tile: the rectangle dominates the basis
    /// parallelogram. Infinite sides always satisfy it.
    pub fn rect_dominates(&self, lat: &Lattice) -> bool {
        let wx = lat.phi.x.abs() + lat.psi.x.abs();
        let wy = lat.phi.y.abs() + lat.psi.y.abs();
        let okx = match (self.x0, self.x1) {
            (Some(a), Some(b)) => b - a + 1 >= wx,
            _ => true,
        };
        let oky = match (self.y0, self.y1) {
            (Some(a), Some(b)) => b - a + 1 >= wy,
            _ => true,
        };
        okx && oky
    }

    /// Inclusive integer bounding box, `None` if the set is provably empty.
    pub fn bbox(&self, lat: &Lattice) -> Option<(Point, Point)> {
        if self.is_empty_range() {
            return None;
        }
        let vs = [
            lat.vertex(self.phi0, self.psi0),
            lat.vertex(self.phi0, self.psi1),
            lat.vertex(self.phi1, self.psi0),
            lat.vertex(self.phi1, self.psi1),
        ];
        let d = lat.det;
        let mut lo_x = vs.iter().map(|v| div_ceil(v.0, d)).min().unwrap() as i64;
        let mut hi_x = vs.iter().map(|v| div_floor(v.0, d)).max().unwrap() as i64;
        let mut lo_y = vs.iter().map(|v| div_ceil(v.1, d)).min().unwrap() as i64;
        let mut hi_y = vs.iter().map(|v| div_floor(v.1, d)).max().unwrap() as i64;
        if let Some(v) = self.x0 {
            lo_x = lo_x.max(v);
        }
        if let Some(v) = self.x1 {
            hi_x = hi_x.min(v);
        }
        if let Some(v) = self.y0 {
            lo_y = lo_y.max(v);
        }
        if let Some(v) = self.y1 {
            hi_y = hi_y.min(v);
        }
        (lo_x <= hi_x && lo_y <= hi_y).then(|| (Point::new(lo_x, lo_y), Point::new(hi_x, hi_y)))
    }

    /// Every integer point of the set, by scanning the bounding box.
    pub fn points(&self, lat: &Lattice) -> Vec<Point> {
        let mut out = Vec::new();
        if let Some((lo, hi)) = self.bbox(lat) {
            for x in lo.x..=hi.x {
                for y in lo.y..=hi.y {
                    let u = Point::new(x, y);
                    if self.contains(lat, u) {
                        out.push(u);
                    }
                }
            }
        }
        out
    }
}

/// A string whose domain is exactly the point set of its signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileString {
    pub sig: TruncSig,
    pub cells: Sparse2D,
}

impl TileString {
    /// The single symbol of a monochromatic non-empty string.
    pub fn symbol(&self) -> Option<Sym> {
        let first = self.cells.entries().first()?.1;
        self.cells.entries().iter().all(|e| e.1 == first).then_some(first)
    }
}

/// All symbols equal (vacuously true when empty). Single scan.
pub fn is_monochromatic(s: &Sparse2D) -> bool {
    s.entries().windows(2).all(|w| w[0].1 == w[1].1)
}

/// `Ham(S + delta, S)` in exact-symbol terms (no wildcards occur in pieces).
fn shift_mismatches(s: &Sparse2D, delta: Point) -> impl Iterator<Item = Point> + '_ {
    s.entries().iter().filter_map(move |&(u, a)| match s.get(u + delta) {
        Some(b) if b != a => Some(u),
        _ => None,
    })
}

fn sorted_unique(mut v: Vec<i128>) -> Vec<i128> {
    v.sort_unstable();
    v.dedup();
    v
}

/// Splits `S` into pieces with `Ham(piece + phi, piece) = 0`, cutting along
/// `s(u)` at every `u` with `S(u) != S(u + phi)`; pieces are `s in [a_i, a_{i+1})`.
pub fn cut_phi(s: &TileString, lat: &Lattice) -> Vec<TileString> {
    let cuts = sorted_unique(shift_mismatches(&s.cells, lat.phi).map(|u| lat.s(u)).collect());
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut lo = s.sig.psi0;
    let mut bounds: Vec<i128> = cuts.into_iter().filter(|&a| a > lo && a <= s.sig.psi1).collect();
    bounds.push(s.sig.psi1 + 1);
    let mut rest = s.cells.clone();
    for b in bounds {
        let sig = TruncSig { psi0: lo, psi1: b - 1, ..s.sig };
        let (inside, other) = rest.split(|u, _| lat.s(u) < b);
        rest = other;
        if !inside.is_empty() {
            out.push(TileString { sig, cells: inside });
        }
        lo = b;
    }
    out
}

/// Mirror of [`cut_phi`] for `psi`: cuts along `h(u)` with pieces
/// `h in (a_i, a_{i+1}]`.
pub fn cut_psi(s: &TileString, lat: &Lattice) -> Vec<TileString> {
    let cuts = sorted_unique(shift_mismatches(&s.cells, lat.psi).map(|u| lat.h(u)).collect());
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut lo = s.sig.phi0;
    let mut bounds: Vec<i128> = cuts.into_iter().filter(|&a| a >= lo && a < s.sig.phi1).collect();
    bounds.push(s.sig.phi1);
    let mut rest = s.cells.clone();
    for b in bounds {
        let sig = TruncSig { phi0: lo, phi1: b, ..s.sig };
        let (inside, other) = rest.split(|u, _| lat.h(u) <= b);
        rest = other;
        if !inside.is_empty() {
            out.push(TileString { sig, cells: inside });
        }
        lo = b + 1;
    }
    out
}

/// Partitions a truncated tile string into monochromatic truncated subtile
/// strings: split by lattice class, then [`cut_phi`], then [`cut_psi`].
///
/// With `H_phi`, `H_psi` the self-shift distances of `R` and `|Γ|` the number
/// of classes, the output has at most `H_phi + H_psi + |Γ|` pieces.
/// Output is ordered by class representative, then by cut position.
pub fn tile_decompose(r: &Sparse2D, sig: TruncSig, lat: &Lattice) -> Vec<TileString> {
    let mut classes: Vec<(Point, Point, Sym)> =
        r.entries().iter().map(|&(u, a)| (lat.reduce(u), u, a)).collect();
    classes.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < classes.len() {
        let g = classes[i].0;
        let mut j = i;
        while j < classes.len() && classes[j].0 == g {
            j += 1;
        }
        let cells = Sparse2D::from_sorted(classes[i..j].iter().map(|c| (c.1, c.2)).collect());
        let class = TileString { sig: TruncSig { gamma: Some(g), ..sig }, cells };
        for part in cut_phi(&class, lat) {
            out.extend(cut_psi(&part, lat));
        }
        i = j;
    }
    out
}

/// Number of pieces allowed per unit of `H_phi + H_psi + |Γ|`.
pub const PIECE_BUDGET: usize = 4;
