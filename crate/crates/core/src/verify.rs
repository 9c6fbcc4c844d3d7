//! Exact verification of candidate offsets with longest-common-extension
//! jumps, and the `O(k n^2)` baseline matcher built on it.
//!
//! Row identifiers come from suffix-array ranks: two length-`m` windows get
//! the same identifier iff their common extension is at least `m`.

use alloc::vec;
use alloc::vec::Vec;

use crate::counters::Counters;
use crate::error::Error;
use crate::geom::Point;
use crate::gridstring::{square_shapes, Grid2D, OffsetCounts, Sym, WILDCARD};

/// Suffix array by prefix doubling with two counting-sort passes per round.
pub fn suffix_array(s: &[u32]) -> Vec<u32> {
    let n = s.len();
    if n == 0 {
        return Vec::new();
    }
    // Compress the alphabet to 1..=sigma; 0 marks "past the end".
    let mut sorted: Vec<u32> = s.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut rank: Vec<u32> =
        s.iter().map(|x| sorted.binary_search(x).unwrap() as u32 + 1).collect();
    let mut sa: Vec<u32> = (0..n as u32).collect();
    let mut tmp = vec![0u32; n];
    let mut cnt = vec![0usize; n.max(sorted.len()) + 2];
    let mut k = 1;
    loop {
        let second = |i: usize, rank: &[u32]| if i + k < n { rank[i + k] as usize } else { 0 };
        // Counting sort by the second key, then stable by the first.
        cnt.iter_mut().for_each(|c| *c = 0);
        for i in 0..n {
            cnt[second(i, &rank)] += 1;
        }
        let mut sum = 0;
        for c in cnt.iter_mut() {
            let t = *c;
            *c = sum;
            sum += t;
        }
        for i in 0..n {
            let key = second(i, &rank);
            tmp[cnt[key]] = i as u32;
            cnt[key] += 1;
        }
        cnt.iter_mut().for_each(|c| *c = 0);
        for i in 0..n {
            cnt[rank[i] as usize] += 1;
        }
        let mut sum = 0;
        for c in cnt.iter_mut() {
            let t = *c;
            *c = sum;
            sum += t;
        }
        for &i in tmp.iter() {
            let key = rank[i as usize] as usize;
            sa[cnt[key]] = i;
            cnt[key] += 1;
        }
        // Re-rank.
        let mut new_rank = vec![0u32; n];
        let mut r = 1u32;
        new_rank[sa[0] as usize] = 1;
        for w in 1..n {
            let (a, b) = (sa[w - 1] as usize, sa[w] as usize);
            if rank[a] != rank[b] || second(a, &rank) != second(b, &rank) {
                r += 1;
            }
            new_rank[b] = r;
        }
        rank = new_rank;
        if r as usize == n {
            break;
        }
        k *= 2;
    }
    sa
}

/// Constant-time longest-common-extension queries over one sequence.
#[derive(Clone, Debug)]
pub struct LceIndex {
    len: usize,
    rank: Vec<u32>,
    // sparse[j][r] = min lcp over ranks r..r + 2^j.
    sparse: Vec<Vec<u32>>,
}

impl LceIndex {
    /// Builds the index; wildcards are rejected because they break equality.
    pub fn build(s: &[Sym]) -> Result<Self, Error> {
        if s.contains(&WILDCARD) {
            return Err(Error::WildcardPresent);
        }
        let n = s.len();
        let sa = suffix_array(s);
        let mut rank = vec![0u32; n];
        for (r, &i) in sa.iter().enumerate() {
            rank[i as usize] = r as u32;
        }
        // Kasai: lcp[r] = lcp(sa[r - 1], sa[r]).
        let mut lcp = vec![0u32; n];
        let mut h = 0usize;
        for i in 0..n {
            let r = rank[i] as usize;
            if r == 0 {
                h = 0;
                continue;
            }
            let j = sa[r - 1] as usize;
            while i + h < n && j + h < n && s[i + h] == s[j + h] {
                h += 1;
            }
            lcp[r] = h as u32;
            h = h.saturating_sub(1);
        }
        let mut sparse = vec![lcp];
        let mut w = 1;
        while 2 * w <= n {
            let prev = sparse.last().unwrap();
            let next: Vec<u32> = (0..=n - 2 * w).map(|r| prev[r].min(prev[r + w])).collect();
            sparse.push(next);
            w *= 2;
        }
        Ok(LceIndex { len: n, rank, sparse })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Length of the longest common prefix of the suffixes at `i` and `j`.
    pub fn lce(&self, i: usize, j: usize) -> usize {
        if i == j {
            return self.len - i;
        }
        let (a, b) = (self.rank[i] as usize, self.rank[j] as usize);
        let (lo, hi) = if a < b { (a + 1, b) } else { (b + 1, a) };
        let lev = (usize::BITS - 1 - (hi - lo + 1).leading_zeros()) as usize;
        let t = &self.sparse[lev];
        t[lo].min(t[hi + 1 - (1 << lev)]) as usize
    }
}

/// Positions `p < len` with `S[i + p] != S[j + p]`, the first `cap` of them.
/// Each returned position costs one query.
pub fn kangaroo_mismatches(
    idx: &LceIndex,
    i: usize,
    j: usize,
    len: usize,
    cap: usize,
) -> Result<Vec<usize>, Error> {
    if i + len > idx.len || j + len > idx.len {
        return Err(Error::RangeError);
    }
    let mut out = Vec::new();
    kangaroo_walk(idx, i, j, len, cap, |p| out.push(p));
    Ok(out)
}

fn kangaroo_walk(idx: &LceIndex, i: usize, j: usize, len: usize, cap: usize, mut f: impl FnMut(usize)) -> usize {
    let mut p = 0;
    let mut found = 0;
    while found < cap && p < len {
        p += idx.lce(i + p, j + p);
        if p >= len {
            break;
        }
        f(p);
        found += 1;
        p += 1;
    }
    found
}

/// Two-level kangaroo index over a fixed pattern and text.
///
/// With `P_i = P(i, 0..m)` the `i`-th column of the pattern and
/// `T_{i,j} = T(i, j..j+m)`, the distance at `q` is
/// `sum_i Ham(T_{q.x+i, q.y}, P_i)`. Column windows of the text are laid out
/// as `id[j * n + i] = ID(T_{i,j})`, so the `m` windows for one `q` are
/// contiguous; the first level finds mismatching columns and the second
/// counts mismatches inside them.
#[derive(Clone, Debug)]
pub struct Verifier {
    m: usize,
    n: usize,
    cells: LceIndex,
    ids: LceIndex,
}

impl Verifier {
    pub fn new(p: &Grid2D, t: &Grid2D) -> Result<Self, Error> {
        let (m, n) = square_shapes(p, t)?;
        // T̄ $ P̄, column-major.
        let sep = p.data.iter().chain(&t.data).copied().max().unwrap_or(0);
        if sep == WILDCARD {
            return Err(Error::WildcardPresent);
        }
        let mut s = Vec::with_capacity(n * n + 1 + m * m);
        for x in 0..n {
            s.extend((0..n).map(|y| t.data[y * n + x]));
        }
        s.push(sep + 1);
        for x in 0..m {
            s.extend((0..m).map(|y| p.data[y * m + x]));
        }
        let cells = LceIndex::build(&s)?;
        // Group suffix ranks into identifiers of length-m prefixes.
        let total = s.len();
        let mut group = vec![0u32; total];
        let mut g = 0u32;
        for (slot, &lcp) in group.iter_mut().zip(&cells.sparse[0]).skip(1) {
            if (lcp as usize) < m {
                g += 1;
            }
            *slot = g;
        }
        let id_of = |pos: usize| group[cells.rank[pos] as usize];
        let side = n - m + 1;
        let mut ids = Vec::with_capacity(side * n + 1 + m);
        for j in 0..side {
            for i in 0..n {
                ids.push(id_of(i * n + j));
            }
        }
        ids.push(total as u32);
        for i in 0..m {
            ids.push(id_of(n * n + 1 + i * m));
        }
        let ids = LceIndex::build(&ids)?;
        Ok(Verifier { m, n, cells, ids })
    }

    /// `min(cap, Ham(T, P + q))`; jumps that land on mismatches are counted.
    pub fn distance(&self, q: Point, cap: u64, c: &mut Counters) -> u64 {
        let (m, n) = (self.m, self.n);
        let (qx, qy) = (q.x as usize, q.y as usize);
        let id_t = qy * n + qx;
        let id_p = (n - m + 1) * n + 1;
        let p_base = n * n + 1;
        let mut d = 0u64;
        let mut p = 0;
        while p < m && d < cap {
            p += self.ids.lce(id_t + p, id_p + p);
            if p >= m {
                break;
            }
            c.jumps += 1;
            let col = qx + p;
            let found = kangaroo_walk(
                &self.cells,
                col * n + qy,
                p_base + p * m,
                m,
                (cap - d) as usize,
                |_| {},
            );
            c.jumps += found as u64;
            d += found as u64;
            p += 1;
        }
        d.min(cap)
    }
}

/// Exact `Ham(T, P + q)` for every `q` in `qs`, in input order.
pub fn verify_offsets(
    p: &Grid2D,
    t: &Grid2D,
    qs: &[Point],
    c: &mut Counters,
) -> Result<Vec<u64>, Error> {
    let (m, n) = square_shapes(p, t)?;
    let side = (n - m + 1) as i64;
    if qs.iter().any(|q| q.x < 0 || q.y < 0 || q.x >= side || q.y >= side) {
        return Err(Error::OffsetOutOfRange);
    }
    let v = Verifier::new(p, t)?;
    Ok(qs.iter().map(|&q| v.distance(q, u64::MAX, c)).collect())
}

/// `min(k + 1, Ham)` at every offset with `O(k + 1)` jumps per offset.
/// Falls back to a direct capped scan when wildcards are present.
pub fn baseline_kn2(p: &Grid2D, t: &Grid2D, k: u32, c: &mut Counters) -> Result<OffsetCounts, Error> {
    let (m, n) = square_shapes(p, t)?;
    let side = n - m + 1;
    let cap = k as u64 + 1;
    match Verifier::new(p, t) {
        Ok(v) => {
            let mut out = OffsetCounts::filled(side, 0);
            for (i, val) in out.values.iter_mut().enumerate() {
                let q = Point::new((i % side) as i64, (i / side) as i64);
                *val = v.distance(q, cap, c) as u32;
            }
            Ok(out)
        }
        Err(Error::WildcardPresent) => crate::gridstring::oracle_all_offsets(p, t, k),
        Err(e) => Err(e),
    }
}
