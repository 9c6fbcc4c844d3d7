//! Mismatch totals between a pattern split into monochromatic truncated
//! subtile strings and a family of disjoint monochromatic subtile strings of
//! the text.
//!
//! For each text piece `S` of symbol `a`,
//! `Ham(P + q, S) = |S ∩ (P + q)| - Σ_{V of symbol a} |S ∩ (V + q)|`.
//! Each `S` is written as an alternating sum of four lattice angles
//! `D + w = {w + s*phi + t*psi : s, t >= 0}`, which turns the second term into
//! angle sums over a score field; those obey a four-term recursion.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::convolve::hamming_per_char_2d;
use crate::counters::Counters;
use crate::error::Error;
use crate::geom::{div_ceil, div_floor, Point};
use crate::gridstring::{Grid2D, Sparse2D, Sym};
use crate::tiling::{Lattice, TileString, TruncSig};

/// Brute-force box counting below this many box-point pairs.
const BRUTE_LIMIT: usize = 1 << 16;

/// Pattern pieces indexed by symbol.
#[derive(Clone, Debug)]
pub struct PatternPieces {
    pub pieces: Vec<TileString>,
    by_symbol: BTreeMap<Sym, Vec<usize>>,
}

impl PatternPieces {
    /// Every piece must be non-empty, monochromatic and carry its class.
    pub fn new(pieces: Vec<TileString>) -> Result<Self, Error> {
        let mut by_symbol: BTreeMap<Sym, Vec<usize>> = BTreeMap::new();
        for (i, p) in pieces.iter().enumerate() {
            let a = p.symbol().ok_or(Error::PreconditionViolated("pattern piece is not monochromatic"))?;
            if p.sig.gamma.is_none() {
                return Err(Error::MissingSignature);
            }
            by_symbol.entry(a).or_default().push(i);
        }
        Ok(PatternPieces { pieces, by_symbol })
    }

    pub fn of_symbol(&self, a: Sym) -> &[usize] {
        self.by_symbol.get(&a).map_or(&[], |v| v.as_slice())
    }

    /// `|V_a|`.
    pub fn frequency(&self, a: Sym) -> usize {
        self.of_symbol(a).len()
    }
}

/// `sig + d`.
pub fn shift_sig(lat: &Lattice, sig: &TruncSig, d: Point) -> TruncSig {
    let (hd, sd) = (lat.h(d), lat.s(d));
    TruncSig {
        x0: sig.x0.map(|v| v + d.x),
        x1: sig.x1.map(|v| v + d.x),
        y0: sig.y0.map(|v| v + d.y),
        y1: sig.y1.map(|v| v + d.y),
        phi0: sig.phi0 + hd,
        phi1: sig.phi1 + hd,
        psi0: sig.psi0 + sd,
        psi1: sig.psi1 + sd,
        gamma: sig.gamma.map(|g| g + d),
    }
}

/// Anchors `[w00, w01, w10, w11]` with
/// `|S ∩ X| = Σ (-1)^(i+j) |(D + w_ij) ∩ X|` for the plain subtile `S`.
///
/// `S = {gamma + s*phi + t*psi : s0 <= s < s1, t0 <= t < t1}` and
/// `w_ij = s_i*phi + t_j*psi + gamma`. An empty `S` gets four copies of `gamma`.
pub fn corner_decompose(lat: &Lattice, sig: &TruncSig) -> Result<[Point; 4], Error> {
    if !sig.is_plain() {
        return Err(Error::TruncatedInput);
    }
    let g = sig.gamma.ok_or(Error::MissingSignature)?;
    let det = lat.det;
    let (hg, sg) = (lat.h(g), lat.s(g));
    // h(u) = t * det + h(gamma), s(u) = -s * det + s(gamma).
    let t0 = div_ceil(sig.phi0 - hg, det);
    let t1 = div_floor(sig.phi1 - hg, det) + 1;
    let s0 = div_ceil(sg - sig.psi1, det);
    let s1 = div_floor(sg - sig.psi0, det) + 1;
    if s0 >= s1 || t0 >= t1 {
        return Ok([g; 4]);
    }
    let w = |s: i128, t: i128| g + lat.phi * s as i64 + lat.psi * t as i64;
    Ok([w(s0, t0), w(s0, t1), w(s1, t0), w(s1, t1)])
}

/// `u in D + w`.
pub fn in_angle(lat: &Lattice, w: Point, u: Point) -> bool {
    let d = u - w;
    lat.congruent(w, u) && lat.h(d) >= 0 && lat.s(d) <= 0
}

/// Dense field over the rectangle `[lo, lo + (width, height))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScoreField {
    pub lo: Point,
    pub width: usize,
    pub height: usize,
    pub values: Vec<i64>,
}

impl ScoreField {
    pub fn zeros(lo: Point, hi: Point) -> Self {
        let width = (hi.x - lo.x + 1).max(0) as usize;
        let height = (hi.y - lo.y + 1).max(0) as usize;
        ScoreField { lo, width, height, values: vec![0; width * height] }
    }

    #[inline]
    fn index(&self, u: Point) -> Option<usize> {
        let (dx, dy) = (u.x - self.lo.x, u.y - self.lo.y);
        (dx >= 0 && dy >= 0 && (dx as usize) < self.width && (dy as usize) < self.height)
            .then(|| dy as usize * self.width + dx as usize)
    }

    /// Zero outside the rectangle.
    pub fn get(&self, u: Point) -> i64 {
        self.index(u).map_or(0, |i| self.values[i])
    }
}

/// Smallest `x > 0` with `(x, 0)` in the lattice.
fn row_period(lat: &Lattice) -> i64 {
    (1..=lat.det as i64)
        .find(|&x| {
            let u = Point::new(x, 0);
            lat.h(u) % lat.det == 0 && lat.s(u) % lat.det == 0
        })
        .unwrap_or(lat.det as i64)
}

/// Integer `x` range of a box on row `y`.
fn row_interval(lat: &Lattice, b: &TruncSig, y: i64) -> Option<(i64, i64)> {
    let (f, p) = (lat.phi, lat.psi);
    let y = y as i128;
    let (mut lo, mut hi) = (i64::MIN as i128, i64::MAX as i128);
    if let Some(v) = b.x0 {
        lo = lo.max(v as i128);
    }
    if let Some(v) = b.x1 {
        hi = hi.min(v as i128);
    }
    // h = f.x * y - f.y * x with -f.y > 0.
    let k = -(f.y as i128);
    lo = lo.max(div_ceil(b.phi0 - f.x as i128 * y, k));
    hi = hi.min(div_floor(b.phi1 - f.x as i128 * y, k));
    // s = p.x * y - p.y * x.
    if p.y > 0 {
        let k = p.y as i128;
        lo = lo.max(div_ceil(p.x as i128 * y - b.psi1, k));
        hi = hi.min(div_floor(p.x as i128 * y - b.psi0, k));
    } else {
        let s = p.x as i128 * y;
        if s < b.psi0 || s > b.psi1 {
            return None;
        }
    }
    (lo <= hi).then_some((lo as i64, hi as i64))
}

/// Number of boxes containing each point of `[lo, hi]`.
///
/// One row sweep per box over its own rows: the box meets a row in an
/// interval, and its class meets the row in an arithmetic progression of step
/// `row_period`, so each box-row is a two-entry update of a strided difference
/// array. Classes differ in residue along a row, so one array serves them all.
pub fn score_field(lat: &Lattice, boxes: &[TruncSig], lo: Point, hi: Point, c: &mut Counters) -> ScoreField {
    let mut field = ScoreField::zeros(lo, hi);
    let (w, h) = (field.width, field.height);
    if w == 0 || h == 0 {
        return field;
    }
    let lam = row_period(lat);
    let lu = lam as usize;
    let stride = w + lu;
    let mut diff = vec![0i64; h * stride];
    // Per row: (class representative, residue of its x values mod lam).
    let mut residues: Vec<Option<Vec<(Point, i64)>>> = vec![None; h];
    for b in boxes {
        let Some(g) = b.gamma else { continue };
        let g = lat.reduce(g);
        let Some((blo, bhi)) = b.bbox(lat) else { continue };
        let y0 = blo.y.max(lo.y);
        let y1 = bhi.y.min(hi.y);
        for y in y0..=y1 {
            c.box_ops += 1;
            let Some((a, z)) = row_interval(lat, b, y) else { continue };
            let (a, z) = (a.max(lo.x), z.min(hi.x));
            if a > z {
                continue;
            }
            let ry = (y - lo.y) as usize;
            let table = residues[ry].get_or_insert_with(|| {
                let mut t: Vec<(Point, i64)> =
                    (0..lam).map(|x| (lat.reduce(Point::new(lo.x + x, y)), x)).collect();
                t.sort_unstable();
                t
            });
            let Ok(pos) = table.binary_search_by(|e| e.0.cmp(&g)) else { continue };
            let r = table[pos].1;
            // Positions lo.x + r + j * lam.
            let off = a - lo.x;
            let first = off + (r - off).rem_euclid(lam);
            let last_off = z - lo.x;
            if first > last_off {
                continue;
            }
            let last = first + (last_off - first) / lam * lam;
            diff[ry * stride + first as usize] += 1;
            diff[ry * stride + (last + lam) as usize] -= 1;
        }
    }
    for ry in 0..h {
        let row = &mut diff[ry * stride..(ry + 1) * stride];
        for x in lu..w {
            row[x] += row[x - lu];
        }
        field.values[ry * w..(ry + 1) * w].copy_from_slice(&row[..w]);
    }
    c.box_ops += (w * h) as u64;
    field
}

/// For each point, the number of boxes containing it. All boxes share one class.
pub fn count_boxes_containing(
    lat: &Lattice,
    boxes: &[TruncSig],
    points: &[Point],
    c: &mut Counters,
) -> Result<Vec<u64>, Error> {
    let g = match boxes.first() {
        None => return Ok(vec![0; points.len()]),
        Some(b) => b.gamma.ok_or(Error::MissingSignature)?,
    };
    for b in boxes {
        match b.gamma {
            Some(h) if lat.congruent(g, h) => {}
            Some(_) => return Err(Error::MixedClasses),
            None => return Err(Error::MissingSignature),
        }
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }
    if boxes.len().saturating_mul(points.len()) <= BRUTE_LIMIT {
        c.box_ops += (boxes.len() * points.len()) as u64;
        return Ok(points.iter().map(|&u| boxes.iter().filter(|b| b.contains(lat, u)).count() as u64).collect());
    }
    let lo = Point::new(points.iter().map(|p| p.x).min().unwrap(), points.iter().map(|p| p.y).min().unwrap());
    let hi = Point::new(points.iter().map(|p| p.x).max().unwrap(), points.iter().map(|p| p.y).max().unwrap());
    let field = score_field(lat, boxes, lo, hi, c);
    Ok(points.iter().map(|&u| field.get(u) as u64).collect())
}

/// `G(w) = Σ_{u in D + w} score(u)` on the field's rectangle.
///
/// `G(w) = score(w) + G(w + phi) + G(w + psi) - G(w + phi + psi)`, with `G`
/// taken as zero off the rectangle. Columns run right to left and rows bottom
/// to top, which visits `w + phi`, `w + psi`, `w + phi + psi` before `w`
/// because `psi.x > 0`, `phi.x >= 0` and `phi.x = 0` forces `phi.y < 0`.
///
/// Values are exact at every `w` of a parallelogram `h in [h0, h1]`,
/// `s in [s0, s1]` that holds the score support and is contained in the
/// rectangle: from such a `w` the recursion leaves the parallelogram only
/// through `h > h1` or `s < s0`, where the angle misses the support.
pub fn angle_prefix_dp(field: &ScoreField, lat: &Lattice, c: &mut Counters) -> ScoreField {
    let mut g = ScoreField { values: vec![0; field.values.len()], ..*field };
    let (w, h) = (field.width as i64, field.height as i64);
    for dx in (0..w).rev() {
        for dy in 0..h {
            let u = Point::new(field.lo.x + dx, field.lo.y + dy);
            let v = field.values[(dy * w + dx) as usize] + g.get(u + lat.phi) + g.get(u + lat.psi)
                - g.get(u + lat.phi + lat.psi);
            g.values[(dy * w + dx) as usize] = v;
        }
    }
    c.dp_cells += (w * h) as u64;
    g
}

/// Bounding rectangle of the parallelogram circumscribing `[lo, hi]` with
/// sides along `phi` and `psi`.
pub fn circumscribe(lat: &Lattice, lo: Point, hi: Point) -> (Point, Point) {
    let corners = [lo, hi, Point::new(lo.x, hi.y), Point::new(hi.x, lo.y)];
    let hs = corners.map(|u| lat.h(u));
    let ss = corners.map(|u| lat.s(u));
    let sig = TruncSig {
        x0: None,
        x1: None,
        y0: None,
        y1: None,
        phi0: *hs.iter().min().unwrap(),
        phi1: *hs.iter().max().unwrap(),
        psi0: *ss.iter().min().unwrap(),
        psi1: *ss.iter().max().unwrap(),
        gamma: None,
    };
    sig.bbox(lat).unwrap_or((lo, hi))
}

/// `Σ_S Ham(P + q, S)` for every `q in qs`, where the `S` are disjoint
/// monochromatic plain subtile strings inside the `n x n` window and the
/// pattern `[m]^2` is partitioned into `pattern`.
pub fn sparse_distances(
    lat: &Lattice,
    pattern: &PatternPieces,
    text: &[TileString],
    m: usize,
    n: usize,
    qs: &[Point],
    c: &mut Counters,
) -> Result<Vec<u64>, Error> {
    if qs.is_empty() {
        return Ok(Vec::new());
    }
    if text.is_empty() {
        return Ok(vec![0; qs.len()]);
    }
    let parts: Vec<Sparse2D> = text.iter().map(|s| s.cells.clone()).collect();
    let union = Sparse2D::union(&parts)?;
    // |dom(P + q) ∩ U| as a distance between all-zero P' and T' = [u in U].
    let pz = Grid2D::from_fn(m, m, |_| 0);
    let tu = Grid2D::from_fn(n, n, |u| union.contains(u) as Sym);
    let first = hamming_per_char_2d(&pz, &tu, c)?;

    // All shifted boxes V - w_ij(S), per (i, j).
    let mut boxes: [Vec<TruncSig>; 4] = Default::default();
    let mut sup_lo = Point::new(-(n as i64 - m as i64), -(n as i64 - m as i64));
    let mut sup_hi = Point::ZERO;
    for s in text {
        let Some(a) = s.symbol() else {
            return Err(Error::PreconditionViolated("text piece is not monochromatic"));
        };
        let ws = corner_decompose(lat, &s.sig)?;
        if ws.iter().all(|&w| w == ws[0]) {
            continue;
        }
        for &vi in pattern.of_symbol(a) {
            let v = &pattern.pieces[vi].sig;
            for (k, &w) in ws.iter().enumerate() {
                let b = shift_sig(lat, v, -w);
                if let Some((lo, hi)) = b.bbox(lat) {
                    sup_lo = Point::new(sup_lo.x.min(lo.x), sup_lo.y.min(lo.y));
                    sup_hi = Point::new(sup_hi.x.max(hi.x), sup_hi.y.max(hi.y));
                    boxes[k].push(b);
                }
            }
        }
    }
    let (lo, hi) = circumscribe(lat, sup_lo, sup_hi);
    let mut tau = vec![0i64; qs.len()];
    for (k, bs) in boxes.iter().enumerate() {
        if bs.is_empty() {
            continue;
        }
        let field = score_field(lat, bs, lo, hi, c);
        let g = angle_prefix_dp(&field, lat, c);
        let sign = if k == 0 || k == 3 { 1 } else { -1 };
        for (t, &q) in tau.iter_mut().zip(qs) {
            *t += sign * g.get(-q);
        }
    }
    qs.iter()
        .zip(tau)
        .map(|(&q, t)| {
            let f = *first.at(q).ok_or(Error::OffsetOutOfRange)? as i64;
            debug_assert!(f >= t && t >= 0);
            Ok((f - t) as u64)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridstring::{hamming_oracle, shift};
    use crate::textpart::{text_decompose, ActiveText};
    use crate::tiling::tile_decompose;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn rng(seed: u64) -> rand::rngs::StdRng {
        rand::rngs::StdRng::seed_from_u64(seed)
    }

    fn random_lattice(r: &mut impl Rng) -> Lattice {
        loop {
            let phi = Point::new(r.random_range(0..4), r.random_range(-4..0));
            let psi = Point::new(r.random_range(1..4), r.random_range(0..4));
            if let Ok(l) = Lattice::new(phi, psi) {
                if l.det <= 8 {
                    return l;
                }
            }
        }
    }

    fn random_subtile(r: &mut impl Rng, lat: &Lattice) -> TruncSig {
        let g = lat.gamma_set()[r.random_range(0..lat.det as usize)];
        let a = r.random_range(-30..30);
        let b = r.random_range(-30..30);
        TruncSig::plain(a, a + r.random_range(-2..25), b, b + r.random_range(-2..25), g)
    }

    fn random_truncated(r: &mut impl Rng, lat: &Lattice) -> TruncSig {
        let mut s = random_subtile(r, lat);
        let x0 = r.random_range(-8..4);
        let y0 = r.random_range(-8..4);
        s.x0 = Some(x0);
        s.x1 = Some(x0 + r.random_range(0..12));
        s.y0 = Some(y0);
        s.y1 = Some(y0 + r.random_range(0..12));
        s
    }

    fn window(lo: i64, hi: i64) -> Vec<Point> {
        (lo..=hi).flat_map(|x| (lo..=hi).map(move |y| Point::new(x, y))).collect()
    }

    #[test]
    fn corner_examples() {
        let lat = Lattice::new(Point::new(0, -1), Point::new(1, 0)).unwrap();
        let g = Point::ZERO;
        // Singleton {gamma}: h = x = 0, s = y = 0.
        let ws = corner_decompose(&lat, &TruncSig::plain(0, 0, 0, 0, g)).unwrap();
        let x = [g];
        let count = |w: Point| x.iter().filter(|&&u| in_angle(&lat, w, u)).count() as i64;
        assert_eq!(count(ws[0]) - count(ws[1]) - count(ws[2]) + count(ws[3]), 1);
        assert_eq!(ws[0], g);
        let ws = corner_decompose(&lat, &TruncSig::plain(3, 1, 0, 0, g)).unwrap();
        assert_eq!(ws, [g; 4]);
        let mut t = TruncSig::plain(0, 0, 0, 0, g);
        t.x0 = Some(0);
        assert_eq!(corner_decompose(&lat, &t), Err(Error::TruncatedInput));
    }

    #[test]
    fn corner_identity_random() {
        let mut r = rng(50);
        let pts = window(-45, 45);
        for _ in 0..1000 {
            let lat = random_lattice(&mut r);
            let s = random_subtile(&mut r, &lat);
            let ws = corner_decompose(&lat, &s).unwrap();
            for w in ws {
                assert!(lat.congruent(w, s.gamma.unwrap()));
            }
            // Random finite window X.
            let a = Point::new(r.random_range(-45..0), r.random_range(-45..0));
            let b = Point::new(r.random_range(0..45), r.random_range(0..45));
            let xs: Vec<Point> = pts.iter().copied().filter(|u| a.x <= u.x && u.x <= b.x && a.y <= u.y && u.y <= b.y).collect();
            let direct = xs.iter().filter(|&&u| s.contains(&lat, u)).count() as i64;
            let count = |w: Point| xs.iter().filter(|&&u| in_angle(&lat, w, u)).count() as i64;
            assert_eq!(direct, count(ws[0]) - count(ws[1]) - count(ws[2]) + count(ws[3]));
        }
    }

    #[test]
    fn count_boxes_examples() {
        let lat = Lattice::new(Point::new(1, -1), Point::new(1, 1)).unwrap();
        let mut c = Counters::default();
        let all = TruncSig::plain(-1000, 1000, -1000, 1000, Point::ZERO);
        let pts = vec![Point::ZERO, Point::new(2, 0), Point::new(1, 1)];
        assert_eq!(count_boxes_containing(&lat, &[all], &pts, &mut c).unwrap(), vec![1, 1, 1]);
        let other = TruncSig::plain(0, 0, 0, 0, Point::new(1, 0));
        assert_eq!(count_boxes_containing(&lat, &[all, other], &pts, &mut c), Err(Error::MixedClasses));
        // Disjoint boxes along h.
        let a = TruncSig::plain(0, 1, -10, 10, Point::ZERO);
        let b = TruncSig::plain(2, 5, -10, 10, Point::ZERO);
        let pts = vec![Point::new(0, 0), Point::new(2, 0), Point::new(1, 5)];
        // h(x, y) = x + y.
        assert_eq!(count_boxes_containing(&lat, &[a, b], &pts, &mut c).unwrap(), vec![1, 1, 0]);
    }

    #[test]
    fn count_boxes_random_vs_brute() {
        let mut r = rng(51);
        for _ in 0..60 {
            let lat = random_lattice(&mut r);
            let g = lat.gamma_set()[r.random_range(0..lat.det as usize)];
            let boxes: Vec<TruncSig> = (0..r.random_range(1..400))
                .map(|_| {
                    let mut b = if r.random_bool(0.5) { random_truncated(&mut r, &lat) } else { random_subtile(&mut r, &lat) };
                    b.gamma = Some(g + lat.phi * r.random_range(-3..3));
                    b
                })
                .collect();
            let pts: Vec<Point> = window(-20, 20).into_iter().filter(|&u| lat.congruent(u, g)).collect();
            let mut c = Counters::default();
            let got = count_boxes_containing(&lat, &boxes, &pts, &mut c).unwrap();
            for (u, k) in pts.iter().zip(got) {
                assert_eq!(k, boxes.iter().filter(|b| b.contains(&lat, *u)).count() as u64);
            }
        }
    }

    #[test]
    fn score_field_mixed_classes() {
        let mut r = rng(52);
        for _ in 0..40 {
            let lat = random_lattice(&mut r);
            let boxes: Vec<TruncSig> = (0..r.random_range(1..30)).map(|_| random_truncated(&mut r, &lat)).collect();
            let (lo, hi) = (Point::new(-12, -9), Point::new(10, 14));
            let f = score_field(&lat, &boxes, lo, hi, &mut Counters::default());
            for x in lo.x..=hi.x {
                for y in lo.y..=hi.y {
                    let u = Point::new(x, y);
                    assert_eq!(f.get(u), boxes.iter().filter(|b| b.contains(&lat, u)).count() as i64);
                }
            }
        }
    }

    #[test]
    fn dp_examples() {
        let lat = Lattice::new(Point::new(1, -2), Point::new(2, 1)).unwrap();
        let (lo, hi) = circumscribe(&lat, Point::new(-6, -6), Point::new(6, 6));
        let mut c = Counters::default();
        let zero = ScoreField::zeros(lo, hi);
        assert!(angle_prefix_dp(&zero, &lat, &mut c).values.iter().all(|&v| v == 0));
        let p = Point::new(1, 2);
        let mut f = ScoreField::zeros(lo, hi);
        let i = f.index(p).unwrap();
        f.values[i] = 1;
        let g = angle_prefix_dp(&f, &lat, &mut c);
        for x in -6..=6 {
            for y in -6..=6 {
                let w = Point::new(x, y);
                assert_eq!(g.get(w), in_angle(&lat, w, p) as i64, "{w:?}");
            }
        }
        assert!(c.dp_cells > 0);
    }

    #[test]
    fn dp_random_fields() {
        let mut r = rng(53);
        for _ in 0..30 {
            let lat = random_lattice(&mut r);
            let (slo, shi) = (Point::new(-7, -7), Point::new(7, 7));
            let (lo, hi) = circumscribe(&lat, slo, shi);
            let mut f = ScoreField::zeros(lo, hi);
            let mut support = Vec::new();
            for x in slo.x..=shi.x {
                for y in slo.y..=shi.y {
                    if r.random_bool(0.3) {
                        let u = Point::new(x, y);
                        let v = r.random_range(1..5);
                        let i = f.index(u).unwrap();
                        f.values[i] = v;
                        support.push((u, v));
                    }
                }
            }
            let g = angle_prefix_dp(&f, &lat, &mut Counters::default());
            for x in slo.x..=shi.x {
                for y in slo.y..=shi.y {
                    let w = Point::new(x, y);
                    let direct: i64 = support.iter().filter(|(u, _)| in_angle(&lat, w, *u)).map(|e| e.1).sum();
                    assert_eq!(g.get(w), direct);
                }
            }
        }
    }

    fn pattern_pieces(p: &Grid2D, lat: &Lattice) -> PatternPieces {
        let m = p.width as i64;
        let sig = TruncSig::rect(lat, Point::ZERO, Point::new(m - 1, m - 1));
        PatternPieces::new(tile_decompose(&p.to_sparse(), sig, lat)).unwrap()
    }

    fn oracle_sum(p: &Grid2D, text: &[TileString], q: Point) -> u64 {
        let pq = shift(p, q);
        text.iter().map(|s| hamming_oracle(&pq, &s.cells).0 as u64).sum()
    }

    fn singletons(lat: &Lattice, t: &Grid2D, mut keep: impl FnMut(Point) -> bool) -> Vec<TileString> {
        t.iter()
            .filter(|(u, _)| keep(*u))
            .map(|(u, &a)| TileString {
                sig: TruncSig::plain(lat.h(u), lat.h(u), lat.s(u), lat.s(u), u),
                cells: Sparse2D::from_sorted(vec![(u, a)]),
            })
            .collect()
    }

    #[test]
    fn sparse_trivial_cases() {
        let mut r = rng(54);
        let lat = Lattice::new(Point::new(0, -1), Point::new(1, 0)).unwrap();
        let p = Grid2D::from_fn(4, 4, |_| r.random_range(0..3));
        let pp = pattern_pieces(&p, &lat);
        let qs = vec![Point::ZERO, Point::new(1, 2)];
        let mut c = Counters::default();
        assert_eq!(sparse_distances(&lat, &pp, &[], 4, 6, &qs, &mut c).unwrap(), vec![0, 0]);
        let p1 = Grid2D::from_fn(4, 4, |_| 7);
        let t1 = Grid2D::from_fn(6, 6, |_| 7);
        let pp1 = pattern_pieces(&p1, &lat);
        let text = singletons(&lat, &t1, |u| u.x != u.y);
        assert_eq!(sparse_distances(&lat, &pp1, &text, 4, 6, &qs, &mut c).unwrap(), vec![0, 0]);
        let dup = vec![text[0].clone(), text[0].clone()];
        assert_eq!(sparse_distances(&lat, &pp1, &dup, 4, 6, &qs, &mut c), Err(Error::OverlapError));
    }

    #[test]
    fn sparse_singletons_vs_oracle() {
        let mut r = rng(55);
        for _ in 0..60 {
            let lat = random_lattice(&mut r);
            // The pattern square must dominate the basis parallelogram.
            let m = r.random_range(7..11);
            let n = r.random_range(m..m + 6);
            let sigma = r.random_range(1..4);
            let p = Grid2D::from_fn(m, m, |_| r.random_range(0..sigma));
            let t = Grid2D::from_fn(n, n, |_| r.random_range(0..sigma));
            let text = singletons(&lat, &t, |_| r.random_bool(0.6));
            let pp = pattern_pieces(&p, &lat);
            let side = (n - m + 1) as i64;
            let qs: Vec<Point> = (0..side).flat_map(|x| (0..side).map(move |y| Point::new(x, y))).collect();
            let got = sparse_distances(&lat, &pp, &text, m, n, &qs, &mut Counters::default()).unwrap();
            for (q, d) in qs.iter().zip(got) {
                assert_eq!(d, oracle_sum(&p, &text, *q), "q = {q:?}");
            }
        }
    }

    fn periodic(r: &mut impl Rng, lat: &Lattice, n: usize, noise: usize, sigma: u32) -> Grid2D {
        let classes = lat.gamma_set();
        let colors: Vec<u32> = classes.iter().map(|_| r.random_range(0..sigma)).collect();
        let mut g = Grid2D::from_fn(n, n, |u| colors[classes.iter().position(|&c| c == lat.reduce(u)).unwrap()]);
        for _ in 0..noise {
            let u = Point::new(r.random_range(0..n as i64), r.random_range(0..n as i64));
            *g.at_mut(u).unwrap() = r.random_range(0..sigma + 1);
        }
        g
    }

    #[test]
    fn sparse_text_decomposition_vs_oracle() {
        let mut r = rng(56);
        let mut checked = 0;
        for _ in 0..200 {
            let lat = random_lattice(&mut r);
            let m = r.random_range(12..24);
            let n = 2 * (3 * m / 4);
            let noise = r.random_range(0..6);
            let t = periodic(&mut r, &lat, n, noise, 3);
            let p = t.sub_grid(Point::new(r.random_range(0..(n - m) as i64 + 1), 0), m, m);
            let p = Grid2D::from_fn(m, m, |u| *p.at(u + p.origin).unwrap());
            let side = (n - m + 1) as i64;
            let qs: Vec<Point> = (0..side).flat_map(|x| (0..side).map(move |y| Point::new(x, y))).collect();
            let at = ActiveText::build(&t, &qs, m).unwrap();
            let dec = text_decompose(&at, &lat, r.random_range(m / 3..m), &mut Counters::default()).unwrap();
            let pp = pattern_pieces(&p, &lat);
            let got = sparse_distances(&lat, &pp, &dec.pieces, m, n, &qs, &mut Counters::default()).unwrap();
            for (q, d) in qs.iter().zip(got) {
                assert_eq!(d, oracle_sum(&p, &dec.pieces, *q));
            }
            checked += !dec.pieces.is_empty() as usize;
        }
        assert!(checked >= 50, "{checked}");
    }

    proptest! {
        #[test]
        fn shift_sig_moves_points(dx in -5i64..5, dy in -5i64..5, px in 0i64..3, py in -3i64..0, qx in 1i64..3, qy in 0i64..3) {
            let lat = Lattice::new(Point::new(px, py), Point::new(qx, qy)).unwrap();
            let mut sig = TruncSig::plain(-4, 6, -5, 7, Point::ZERO);
            sig.x0 = Some(-3);
            sig.y1 = Some(4);
            let d = Point::new(dx, dy);
            let moved = shift_sig(&lat, &sig, d);
            let a: Vec<Point> = sig.points(&lat).into_iter().map(|u| u + d).collect();
            prop_assert_eq!(a, moved.points(&lat));
        }
    }
}
