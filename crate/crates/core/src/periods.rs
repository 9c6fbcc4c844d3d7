//! Two approximate period vectors from a large set of candidate offsets.
//!
//! Differences of candidate offsets are periods of the pattern up to `O(k)`
//! mismatches. From a closest pair `w` and a closest pair `w'` inside the
//! longest chain of the "steep" order, the returned vectors live in adjacent
//! quadrants, are at least 30 degrees apart, and their lengths multiply to
//! `O(l^2 / |U|)`.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::Error;
use crate::geom::{cross, in_cone, quadrant, rot270, rot90, sqrt3_affine_cmp, Cone, Point};
use crate::gridstring::{self_shift_hamming, Str2D};

/// `u <1 v` iff `v - u` lies in the widened first-quadrant cone.
#[inline]
pub fn less1(u: Point, v: Point) -> bool {
    in_cone(v - u, Cone::Q1Plus)
}

/// `u <2 v` iff `v - u` lies in the narrowed second-quadrant cone.
#[inline]
pub fn less2(u: Point, v: Point) -> bool {
    in_cone(v - u, Cone::Q2Minus)
}

fn dist2(a: Point, b: Point) -> i128 {
    (b - a).norm2()
}

// Divide and conquer on points sorted by x; returns the minimum squared distance.
fn closest_rec(px: &[Point], buf: &mut Vec<Point>) -> i128 {
    let n = px.len();
    if n < 64 {
        let mut best = i128::MAX;
        for i in 0..n {
            for j in i + 1..n {
                best = best.min(dist2(px[i], px[j]));
            }
        }
        return best;
    }
    let mid = n / 2;
    let midx = px[mid].x;
    let d = closest_rec(&px[..mid], buf).min(closest_rec(&px[mid..], buf));
    buf.clear();
    buf.extend(px.iter().copied().filter(|p| {
        let dx = (p.x - midx) as i128;
        dx * dx < d
    }));
    buf.sort_unstable_by_key(|p| p.y);
    let mut best = d;
    for i in 0..buf.len() {
        for j in i + 1..buf.len() {
            let dy = (buf[j].y - buf[i].y) as i128;
            if dy * dy >= best {
                break;
            }
            best = best.min(dist2(buf[i], buf[j]));
        }
    }
    best
}

/// Minimum squared distance between two distinct points.
pub fn min_dist2(u: &[Point]) -> Result<i128, Error> {
    let mut px = u.to_vec();
    px.sort_unstable();
    px.dedup();
    if px.len() < 2 {
        return Err(Error::TooFew);
    }
    let mut buf = Vec::new();
    Ok(closest_rec(&px, &mut buf))
}

/// Closest pair `(s, t)`, `s < t` lexicographically, and among all closest
/// pairs the lexicographically smallest `(s, t)`.
pub fn closest_pair(u: &[Point]) -> Result<(Point, Point), Error> {
    let d = min_dist2(u)?;
    let mut pts = u.to_vec();
    pts.sort_unstable();
    pts.dedup();
    // Vectors v > 0 lexicographically with |v|^2 = d.
    let mut vs = Vec::new();
    let r = crate::geom::isqrt(d) as i64;
    for a in 0..=r {
        let rest = d - (a as i128) * (a as i128);
        let b = crate::geom::isqrt(rest);
        if b * b == rest {
            let b = b as i64;
            for v in [Point::new(a, b), Point::new(a, -b)] {
                if v > Point::ZERO && !vs.contains(&v) {
                    vs.push(v);
                }
            }
        }
    }
    vs.sort_unstable();
    for &s in &pts {
        for &v in &vs {
            if pts.binary_search(&(s + v)).is_ok() {
                return Ok((s, s + v));
            }
        }
    }
    unreachable!("minimum distance is realised by some pair")
}

/// Longest chain of `<2`, in increasing order.
///
/// Points are sorted by `sqrt3 * y + x`, which is injective on distinct
/// points, and the longest subsequence with strictly decreasing
/// `sqrt3 * x + y` is extracted by patience sorting.
pub fn longest_chain_q2(u: &[Point]) -> Vec<Point> {
    let mut pts = u.to_vec();
    pts.sort_unstable();
    pts.dedup();
    // key_a(u) = sqrt3 * u.y + u.x
    pts.sort_by(|a, b| sqrt3_affine_cmp(a.y, a.x, b.y, b.x));
    // key_b(u) = sqrt3 * u.x + u.y
    let kb = |a: Point, b: Point| sqrt3_affine_cmp(a.x, a.y, b.x, b.y);
    let mut tails: Vec<usize> = Vec::new();
    let mut parent = vec![usize::MAX; pts.len()];
    for i in 0..pts.len() {
        // tails has strictly decreasing key_b; find the first tail with key_b <= current.
        let pos = tails.partition_point(|&t| kb(pts[t], pts[i]) == Ordering::Greater);
        if pos > 0 {
            parent[i] = tails[pos - 1];
        }
        if pos == tails.len() {
            tails.push(i);
        } else {
            tails[pos] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = tails.last().copied().unwrap_or(usize::MAX);
    while cur != usize::MAX {
        out.push(pts[cur]);
        cur = parent[cur];
    }
    out.reverse();
    out
}

/// Length of the longest chain under `less` by quadratic DP, for verification.
pub fn longest_chain_dp(u: &[Point], less: impl Fn(Point, Point) -> bool) -> usize {
    let mut pts = u.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let n = pts.len();
    // Memoised DFS over the DAG; both orders are acyclic.
    let mut best = vec![0usize; n];
    let mut done = vec![false; n];
    let mut result = 0;
    for start in 0..n {
        let mut stack = vec![(start, false)];
        while let Some((v, expanded)) = stack.pop() {
            if done[v] {
                continue;
            }
            if expanded {
                let mut b = 1;
                for w in 0..n {
                    if less(pts[v], pts[w]) {
                        b = b.max(best[w] + 1);
                    }
                }
                best[v] = b;
                done[v] = true;
            } else {
                stack.push((v, true));
                for w in 0..n {
                    if !done[w] && less(pts[v], pts[w]) {
                        stack.push((w, false));
                    }
                }
            }
        }
        result = result.max(best[start]);
    }
    result
}

/// Output of [`get_periods`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeriodPair {
    /// In `(0, inf) x [0, inf)`.
    pub psi: Point,
    /// In `[0, inf) x (-inf, 0)`.
    pub phi: Point,
    /// `w = t - s` is the closest pair of `U`.
    pub s: Point,
    pub t: Point,
    /// `w' = t' - s'` is the closest pair of the longest `<2`-chain.
    pub s2: Point,
    pub t2: Point,
    /// Quadrant of `w`.
    pub quadrant: u8,
    /// Size of the longest antichain of `<1` (in the rotated frame).
    pub antichain: usize,
}

impl PeriodPair {
    pub fn w(&self) -> Point {
        self.t - self.s
    }

    pub fn w_prime(&self) -> Point {
        self.t2 - self.s2
    }

    /// Quadrants, the 30-degree separation, and
    /// `(|psi| |phi|)^2 |U|^2 <= 256^2 l^4`, all in exact integers.
    pub fn check(&self, size: usize, l: i64) -> bool {
        let (p, f) = (self.psi, self.phi);
        let quads = p.x > 0 && p.y >= 0 && f.x >= 0 && f.y < 0;
        let c = cross(p, f);
        let angle = 4 * c * c >= p.norm2() * f.norm2();
        let l2 = (l as i128) * (l as i128);
        let u = size as i128;
        let bound = p.norm2() * f.norm2() * u * u <= 65536 * l2 * l2;
        quads && angle && bound && cross(f, p) >= 0
    }
}

fn rotate_n(u: Point, times: u8, f: fn(Point) -> Point) -> Point {
    (0..times).fold(u, |a, _| f(a))
}

/// Two approximate periods from `U ⊆ [l + 1]^2` with `|U| > 16 l`.
pub fn get_periods(u: &[Point], l: i64) -> Result<PeriodPair, Error> {
    let mut pts = u.to_vec();
    pts.sort_unstable();
    pts.dedup();
    if l < 1 || pts.len() as i128 <= 16 * l as i128 {
        return Err(Error::PreconditionViolated("need |U| > 16 l"));
    }
    if pts.iter().any(|p| p.x < 0 || p.y < 0 || p.x > l || p.y > l) {
        return Err(Error::PreconditionViolated("U must lie in [l + 1]^2"));
    }
    let (s, t) = closest_pair(&pts)?;
    let i = quadrant(t - s)?;
    // Rotate clockwise so that w lands in the first quadrant.
    let turns = i - 1;
    let rotated: Vec<Point> = pts.iter().map(|&p| rotate_n(p, turns, rot270)).collect();
    let chain = longest_chain_q2(&rotated);
    if chain.len() < 2 {
        return Err(Error::PreconditionViolated("antichain too short"));
    }
    let (a, b) = closest_pair(&chain)?;
    let (s2r, t2r) = if less2(a, b) { (a, b) } else { (b, a) };
    debug_assert!(less2(s2r, t2r));
    let s2 = rotate_n(s2r, turns, rot90);
    let t2 = rotate_n(t2r, turns, rot90);
    let (w, w2) = (t - s, t2 - s2);
    let (psi, phi) = match i {
        1 => (w, -w2),
        2 => (-w2, -w),
        3 => (-w, w2),
        _ => (w2, w),
    };
    Ok(PeriodPair { psi, phi, s, t, s2, t2, quadrant: i, antichain: chain.len() })
}

/// `Ham(P + delta, P) <= bound` by direct overlap count.
pub fn candidate_period_check<S: Str2D>(p: &S, delta: Point, bound: usize) -> bool {
    self_shift_hamming(p, delta) <= bound
}
