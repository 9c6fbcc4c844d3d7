//! Acceptance suite. Prints one `criterion N: PASS|FAIL ...` line per
//! criterion and exits non-zero when any fails. Criteria run in parallel.

use std::collections::VecDeque;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use kmatch2d::gen::{generate, Generator, Instance};
use kmatch2d_core::convolve::{approx_2d, ApproxParams};
use kmatch2d_core::densecount::{
    dense_distances, quarter_reflection, sigma_border, split_quarters, strip_partition, strip_partition_rows, C5, C6,
};
use kmatch2d_core::geom::cross;
use kmatch2d_core::gridstring::{hamming_oracle, oracle_all_offsets, self_shift_hamming, shift};
use kmatch2d_core::periods::{get_periods, less1, longest_chain_dp};
use kmatch2d_core::sparsecount::{corner_decompose, in_angle, sparse_distances, PatternPieces};
use kmatch2d_core::textpart::{text_decompose, ActiveText, PGrid, C1};
use kmatch2d_core::tiling::{is_monochromatic, tile_decompose, Lattice, TileString, TruncSig};
use kmatch2d_core::{kmismatch_with, Algo, Counters, Grid2D, OffsetCounts, PipelineConfig, Point, Sparse2D, Sym};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn run(algo: Algo, seed: u64, inst: &Instance, k: u32, c: &mut Counters) -> OffsetCounts {
    let cfg = PipelineConfig { algo, seed, ..Default::default() };
    kmismatch_with(&inst.pattern, &inst.text, k, &cfg, c).expect("generated shapes are valid")
}

struct Case {
    inst: Instance,
    k: u32,
}

/// The end-to-end suite: n in 8..=48, m in 2..=16, k in 0..=8, four alphabets,
/// generators in rotation.
fn suite() -> Vec<Case> {
    let mut r = rng(0xACCE);
    (0..1000)
        .map(|i| {
            let g = Generator::ALL[i % 3];
            let sigma = [1, 2, 4, 16][(i / 3) % 4];
            let n = r.random_range(8..=48);
            let m = r.random_range(2..=16.min(n));
            let k = r.random_range(0..=8);
            Case { inst: generate(g, m, n, sigma, k, &mut r), k }
        })
        .collect()
}

fn criterion1() -> Outcome {
    let (mut wrong, mut misses, mut conflicts) = (0, 0, 0);
    for (i, case) in suite().iter().enumerate() {
        let want = oracle_all_offsets(&case.inst.pattern, &case.inst.text, case.k).unwrap();
        let mut c = Counters::default();
        if run(Algo::Auto, i as u64, &case.inst, case.k, &mut c) != want {
            wrong += 1;
        }
        conflicts += c.merge_conflicts;
        // Verification is exact, so a kangaroo disagreement is a filter miss.
        if run(Algo::Kangaroo, i as u64, &case.inst, case.k, &mut Counters::default()) != want {
            misses += 1;
            eprintln!("criterion 1: candidate miss on instance {i}");
        }
    }
    outcome(
        wrong == 0 && misses * 1000 < 1000,
        format!("1000 instances, {wrong} wrong outputs, {misses} candidate misses, {conflicts} merge conflicts"),
    )
}

fn criterion2() -> Outcome {
    let (mut differ, mut full_windows, mut fallback) = (0, 0, 0);
    let mut check = |i: u64, inst: &Instance, k: u32| {
        let auto = run(Algo::Auto, i, inst, k, &mut Counters::default());
        let want = oracle_all_offsets(&inst.pattern, &inst.text, k).unwrap();
        let mut c = Counters::default();
        let full = run(Algo::Full, i, inst, k, &mut c);
        let kang = run(Algo::Kangaroo, i, inst, k, &mut Counters::default());
        if auto != want || full != want || kang != want {
            differ += 1;
        }
        full_windows += c.windows_full;
        fallback += c.windows_fallback;
    };
    for (i, case) in suite().iter().enumerate() {
        check(i as u64, &case.inst, case.k);
    }
    // Larger periodic instances, where the periodic branch can fire.
    let mut r = rng(0xB2);
    for i in 0..60 {
        let m = r.random_range(48..=96);
        let n = r.random_range(m + 8..=3 * m / 2);
        let k = r.random_range(4..=16);
        let inst = generate(Generator::PlantedPeriodic, m, n, 4, k, &mut r);
        check(1000 + i, &inst, k);
    }
    outcome(
        differ == 0 && full_windows > 0,
        format!("1060 instances, {differ} differ; periodic branch answered {full_windows} windows, {fallback} fell back"),
    )
}

fn square(side: i64) -> Vec<Point> {
    (0..side).flat_map(|x| (0..side).map(move |y| Point::new(x, y))).collect()
}

fn shuffle<T>(r: &mut impl Rng, v: &mut [T]) {
    for i in (1..v.len()).rev() {
        v.swap(i, r.random_range(0..=i));
    }
}

/// `(U, l)` with `U ⊆ [l + 1]^2` and `|U| > 16 l`: random subsets, dense
/// subsets, and lattice point sets with noise.
fn period_input(r: &mut impl Rng, kind: usize) -> (Vec<Point>, i64) {
    match kind {
        0 | 1 => {
            let l = r.random_range(14..=24);
            let mut u = square(l + 1);
            shuffle(r, &mut u);
            let keep = r.random_range(16 * l as usize + 1..=u.len().min(400));
            u.truncate(keep);
            (u, l)
        }
        2 => {
            let l = r.random_range(25..=60);
            let p = r.random_range(0.7..1.0);
            let mut u: Vec<Point> = square(l + 1).into_iter().filter(|_| r.random_bool(p)).collect();
            while u.len() as i64 <= 16 * l {
                u.push(Point::new(r.random_range(0..=l), r.random_range(0..=l)));
                u.sort_unstable();
                u.dedup();
            }
            (u, l)
        }
        _ => {
            let l = r.random_range(48..=90);
            let lat = period_lattice(r, 3);
            let mut u: Vec<Point> = square(l + 1).into_iter().filter(|&x| lat.congruent(x, Point::ZERO)).collect();
            while u.len() as i64 <= 16 * l {
                u.push(Point::new(r.random_range(0..=l), r.random_range(0..=l)));
                u.sort_unstable();
                u.dedup();
            }
            (u, l)
        }
    }
}

fn criterion3() -> Outcome {
    let mut r = rng(0xC3);
    let (mut bad, mut instrumented, mut bad_instr, mut errors) = (0, 0, 0, 0);
    for i in 0..1000 {
        let (u, l) = period_input(&mut r, i % 4);
        let pp = match get_periods(&u, l) {
            Ok(pp) => pp,
            Err(e) => {
                errors += 1;
                eprintln!("criterion 3: get_periods failed: {e:?}");
                continue;
            }
        };
        if !pp.check(u.len(), l) {
            bad += 1;
        }
        if u.len() <= 400 {
            instrumented += 1;
            let c = longest_chain_dp(&u, less1) as i128;
            let a = pp.antichain as i128;
            let l = l as i128;
            if c * c * pp.w().norm2() > 256 * l * l || a * a * pp.w_prime().norm2() > 256 * l * l {
                bad_instr += 1;
            }
        }
    }
    outcome(
        bad + bad_instr + errors == 0 && instrumented >= 400,
        format!("1000 inputs, {errors} errors, {bad} contract violations, {bad_instr}/{instrumented} instrument violations"),
    )
}

/// Basis with `phi × psi > 0` and `det <= max_det`.
fn small_lattice(r: &mut impl Rng, max_det: i128) -> Lattice {
    loop {
        let phi = Point::new(r.random_range(0..5), r.random_range(-5..0));
        let psi = Point::new(r.random_range(1..5), r.random_range(0..5));
        if let Ok(l) = Lattice::new(phi, psi) {
            if l.det <= max_det {
                return l;
            }
        }
    }
}

/// Basis with the 30-degree separation of period pairs.
fn period_lattice(r: &mut impl Rng, max_det: i128) -> Lattice {
    loop {
        let l = small_lattice(r, max_det);
        let c = cross(l.phi, l.psi);
        if 4 * c * c >= l.phi.norm2() * l.psi.norm2() {
            return l;
        }
    }
}

fn periodic_grid(r: &mut impl Rng, lat: &Lattice, w: usize, h: usize, sigma: u32, noise: usize) -> Grid2D {
    let classes = lat.gamma_set();
    let colors: Vec<Sym> = classes.iter().map(|_| r.random_range(0..sigma)).collect();
    let mut g = Grid2D::from_fn(w, h, |u| colors[classes.binary_search(&lat.reduce(u)).unwrap()]);
    for _ in 0..noise {
        let u = Point::new(r.random_range(0..w as i64), r.random_range(0..h as i64));
        *g.at_mut(u).unwrap() = r.random_range(0..sigma + 2);
    }
    g
}

fn connected(piece: &TileString, l: &Lattice) -> bool {
    let pts: Vec<Point> = piece.cells.points().collect();
    if pts.is_empty() {
        return true;
    }
    let mut seen = vec![false; pts.len()];
    let mut q = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = q.pop_front() {
        for d in [l.phi, -l.phi, l.psi, -l.psi] {
            if let Ok(j) = pts.binary_search(&(pts[i] + d)) {
                if !seen[j] {
                    seen[j] = true;
                    q.push_back(j);
                }
            }
        }
    }
    seen.into_iter().all(|b| b)
}

fn criterion4() -> Outcome {
    let mut r = rng(0xC4);
    let (mut bad_partition, mut bad_mono, mut bad_count, mut bad_conn) = (0, 0, 0, 0);
    let (mut pieces_total, mut budget_total) = (0usize, 0usize);
    for _ in 0..500 {
        let lat = small_lattice(&mut r, 12);
        let wx = (lat.phi.x + lat.psi.x) as usize;
        let wy = (lat.psi.y - lat.phi.y) as usize;
        let w = r.random_range(wx.max(1)..wx + 16);
        let h = r.random_range(wy.max(1)..wy + 16);
        let noise = r.random_range(0..8);
        let g = periodic_grid(&mut r, &lat, w, h, 3, noise);
        let rs = g.to_sparse();
        let sig = TruncSig::rect(&lat, Point::ZERO, Point::new(w as i64 - 1, h as i64 - 1));
        let pieces = tile_decompose(&rs, sig, &lat);
        let parts: Vec<Sparse2D> = pieces.iter().map(|p| p.cells.clone()).collect();
        if Sparse2D::union(&parts).ok().as_ref() != Some(&rs) {
            bad_partition += 1;
        }
        bad_mono += pieces.iter().filter(|p| !is_monochromatic(&p.cells)).count();
        bad_conn += pieces.iter().filter(|p| !connected(p, &lat)).count();
        let budget = self_shift_hamming(&rs, lat.phi) + self_shift_hamming(&rs, lat.psi) + lat.det as usize;
        if pieces.len() > 4 * budget {
            bad_count += 1;
        }
        pieces_total += pieces.len();
        budget_total += budget;
    }
    outcome(
        bad_partition + bad_mono + bad_count + bad_conn == 0,
        format!(
            "500 strings, violations: partition {bad_partition}, monochromatic {bad_mono}, count {bad_count}, \
             connectivity {bad_conn}; pieces/budget {pieces_total}/{budget_total}"
        ),
    )
}

/// Violations of unique containment, the diameter bound and monotonicity.
fn grid_violations(g: &PGrid) -> usize {
    let n = g.n as i64;
    let l = g.l;
    let mut bad = 0;
    for x in 0..n {
        for y in 0..n {
            let u = Point::new(x, y);
            let hs = g.lat.h(u) * g.den;
            let ss = g.lat.s(u) * g.den;
            let on_line = g.alpha.contains(&hs) || g.beta.contains(&ss);
            let inside = g.alpha[0] < hs && hs < g.alpha[l] && g.beta[0] < ss && ss < g.beta[l];
            let listed = g.cell_of(u).is_some_and(|(i, j)| {
                g.cell_columns(i, j).iter().any(|&(cx, a, b)| cx == x && a <= y && y <= b)
            });
            // Exactly one cell lists u.
            let holders = (0..l)
                .flat_map(|i| (0..l).map(move |j| (i, j)))
                .filter(|&(i, j)| g.cell_columns(i, j).iter().any(|&(cx, a, b)| cx == x && a <= y && y <= b))
                .count();
            bad += (on_line || !inside || !listed || holders != 1) as usize;
        }
    }
    bad += g.alpha.windows(2).filter(|w| w[0] >= w[1]).count() + g.beta.windows(2).filter(|w| w[0] >= w[1]).count();
    for i in 0..l {
        for j in 0..l {
            if let Some((lo, hi)) = g.cell(i, j).bbox {
                bad += ((hi - lo).norm2() * (l * l) as i128 > C1 * C1 * (n * n) as i128) as usize;
            }
        }
    }
    let ext = |i: usize, j: usize| {
        let vs = [g.vertex(i, j), g.vertex(i + 1, j), g.vertex(i, j + 1), g.vertex(i + 1, j + 1)];
        let xs = vs.map(|v| v.0);
        let ys = vs.map(|v| v.1);
        (*xs.iter().min().unwrap(), *xs.iter().max().unwrap(), *ys.iter().min().unwrap(), *ys.iter().max().unwrap())
    };
    for i in 0..l {
        for j in 0..l {
            let a = ext(i, j);
            if i + 1 < l {
                let b = ext(i + 1, j);
                bad += [a.0 < b.0, a.1 < b.1, a.2 <= b.2, a.3 <= b.3].iter().filter(|&&ok| !ok).count();
            }
            if j + 1 < l {
                let b = ext(i, j + 1);
                bad += [a.0 >= b.0, a.1 >= b.1, a.2 < b.2, a.3 < b.3].iter().filter(|&&ok| !ok).count();
            }
        }
    }
    bad
}

fn criterion5() -> Outcome {
    let mut r = rng(0xC5);
    let (mut bad, mut grids) = (0, 0);
    for b in 0..100 {
        // Every fourth basis comes from the period finder on a noisy lattice set.
        let lat = if b % 4 == 0 {
            let (u, l) = period_input(&mut r, 3);
            let pp = get_periods(&u, l).unwrap();
            Lattice::new(pp.phi, pp.psi).unwrap()
        } else {
            period_lattice(&mut r, 20)
        };
        let shapes = [(r.random_range(8..=64), r.random_range(1..=16)), if b % 10 == 0 { (64, 16) } else { (r.random_range(8..=32), r.random_range(1..=16)) }];
        for (n, l) in shapes {
            grids += 1;
            bad += grid_violations(&PGrid::build(n, lat, l).unwrap());
        }
    }
    outcome(bad == 0, format!("100 bases, {grids} grids, {bad} violations"))
}

fn pattern_pieces(p: &Grid2D, lat: &Lattice) -> PatternPieces {
    let m = p.width as i64;
    let sig = TruncSig::rect(lat, Point::ZERO, Point::new(m - 1, m - 1));
    PatternPieces::new(tile_decompose(&p.to_sparse(), sig, lat)).unwrap()
}

fn criterion6() -> Outcome {
    let mut r = rng(0xC6);
    let mut bad_corner = 0;
    for _ in 0..1000 {
        let lat = small_lattice(&mut r, 8);
        let g = lat.gamma_set()[r.random_range(0..lat.det as usize)];
        let (a, b) = (r.random_range(-30..30), r.random_range(-30..30));
        let s = TruncSig::plain(a, a + r.random_range(-2..25), b, b + r.random_range(-2..25), g);
        let ws = corner_decompose(&lat, &s).unwrap();
        let lo = Point::new(r.random_range(-45..0), r.random_range(-45..0));
        let hi = Point::new(r.random_range(0..45), r.random_range(0..45));
        let density = r.random_range(0.2..1.0);
        let xs: Vec<Point> = (lo.x..=hi.x)
            .flat_map(|x| (lo.y..=hi.y).map(move |y| Point::new(x, y)))
            .filter(|_| r.random_bool(density))
            .collect();
        let direct = xs.iter().filter(|&&u| s.contains(&lat, u)).count() as i64;
        let count = |w: Point| xs.iter().filter(|&&u| in_angle(&lat, w, u)).count() as i64;
        bad_corner += (direct != count(ws[0]) - count(ws[1]) - count(ws[2]) + count(ws[3])) as usize;
    }

    let (mut bad_eq, mut bad_sparse, mut with_pieces) = (0, 0, 0);
    for _ in 0..200 {
        let lat = small_lattice(&mut r, 8);
        let m = r.random_range(12..24);
        let n = 2 * (3 * m / 4);
        let noise = r.random_range(0..6);
        let t = periodic_grid(&mut r, &lat, n, n, 3, noise);
        let p = t.sub_grid(Point::new(r.random_range(0..=(n - m) as i64), 0), m, m);
        let p = Grid2D { origin: Point::ZERO, ..p };
        let side = (n - m + 1) as i64;
        let density = r.random_range(0.3..1.0);
        let mut qs: Vec<Point> =
            (0..side).flat_map(|x| (0..side).map(move |y| Point::new(x, y))).filter(|_| r.random_bool(density)).collect();
        if qs.is_empty() {
            qs.push(Point::ZERO);
        }
        let at = ActiveText::build(&t, &qs, m).unwrap();
        let dec = text_decompose(&at, &lat, r.random_range(m / 3..m), &mut Counters::default()).unwrap();
        let pp = pattern_pieces(&p, &lat);
        let got = sparse_distances(&lat, &pp, &dec.pieces, m, n, &qs, &mut Counters::default()).unwrap();
        with_pieces += !dec.pieces.is_empty() as usize;
        for (&q, d) in qs.iter().zip(got) {
            let pq = shift(&p, q);
            let mut want = 0;
            for s in &dec.pieces {
                let ham = hamming_oracle(&pq, &s.cells).0;
                want += ham as u64;
                // |S ∩ (P + q)| - Σ_{V of the same symbol} |S ∩ (V + q)|.
                let a = s.symbol().unwrap();
                let overlap = s.cells.points().filter(|&u| pq.contains(u)).count();
                let same: usize = pp
                    .of_symbol(a)
                    .iter()
                    .map(|&vi| s.cells.points().filter(|&u| pp.pieces[vi].cells.contains(u - q)).count())
                    .sum();
                bad_eq += (overlap - same != ham) as usize;
            }
            bad_sparse += (d != want) as usize;
        }
    }
    outcome(
        bad_corner + bad_eq + bad_sparse == 0 && with_pieces >= 50,
        format!(
            "1000 (S, X): {bad_corner} corner identity failures; 200 (S, V, Q) ({with_pieces} with text pieces): \
             {bad_eq} mismatch-identity failures, {bad_sparse} wrong totals"
        ),
    )
}

fn mirror(u: Point, fx: bool, fy: bool, span: i64) -> Point {
    Point::new(if fx { span - 1 - u.x } else { u.x }, if fy { span - 1 - u.y } else { u.y })
}

fn criterion7() -> Outcome {
    let mut r = rng(0xC7);
    let (mut bad_dense, mut bad_border, mut bad_area, mut bad_height) = (0, 0, 0, 0);
    let mut per_quarter = [0usize; 4];
    let mut strip_checked = 0;
    let (mut worst_area, mut worst_height) = (0f64, 0f64);
    let mut done = 0;
    while done < 300 {
        let m = r.random_range(8..40);
        let n = r.random_range(m..=3 * m / 2) & !1;
        if n < m {
            continue;
        }
        let sigma = [2, 4, 1000][done % 3];
        let t = Grid2D::from_fn(n, n, |_| r.random_range(0..sigma));
        let p = Grid2D::from_fn(m, m, |_| r.random_range(0..sigma));
        let side = (n - m + 1) as i64;
        let (x0, y0) = (r.random_range(0..side), r.random_range(0..side));
        let (x1, y1) = (r.random_range(x0..side), r.random_range(y0..side));
        let density = r.random_range(0.2..1.0);
        let qs: Vec<Point> =
            (x0..=x1).flat_map(|x| (y0..=y1).map(move |y| Point::new(x, y))).filter(|_| r.random_bool(density)).collect();
        if qs.is_empty() {
            continue;
        }
        done += 1;
        let at = ActiveText::build(&t, &qs, m).unwrap();
        let rad = r.random_range(1..=(m as i64 / 3).max(1));
        let f = at.restrict().restrict(|u, _| at.border_distance2(u) <= rad * rad);
        let d = at.peripheral_radius(&f).max(1);
        let lat = small_lattice(&mut r, 8);
        let pieces = pattern_pieces(&p, &lat);
        let k = r.random_range(0..40);
        let qs = at.offsets().to_vec();
        let oracle = |g: &Grid2D, s: &Sparse2D, qs: &[Point]| -> Vec<u64> {
            qs.iter().map(|&q| hamming_oracle(&shift(g, q), s).0 as u64).collect()
        };
        let (got, _) = dense_distances(&lat, &p, &f, &at, &qs, d, &pieces, k, &mut Counters::default()).unwrap();
        bad_dense += (got != oracle(&p, &f, &qs)) as usize;

        let (m_i, n_i) = (m as i64, n as i64);
        for (i, part) in split_quarters(&f, n).parts.iter().enumerate() {
            if part.is_empty() {
                continue;
            }
            per_quarter[i] += 1;
            let (fx, fy) = quarter_reflection(i);
            let pr = Grid2D::from_fn(m, m, |u| *p.at(mirror(u, fx, fy, m_i)).unwrap());
            let fr = part.map_points(|u| mirror(u, fx, fy, n_i));
            let ar = at.reflected(fx, fy);
            let qr: Vec<Point> = qs.iter().map(|&q| mirror(q, fx, fy, n_i - m_i + 1)).collect();
            let got = sigma_border(&pr, &fr, &ar, &qr, d, &mut Counters::default()).unwrap();
            bad_border += (got != oracle(&p, part, &qs)) as usize;
            if 4 * d <= m_i {
                strip_checked += 1;
                let area = fr.len() as f64 / (d * m_i) as f64;
                worst_area = worst_area.max(area);
                bad_area += (fr.len() as i64 > C6 * d * m_i) as usize;
                for set in [strip_partition(&fr, &ar, d).unwrap(), strip_partition_rows(&fr, &ar, d).unwrap()] {
                    worst_height = worst_height.max(set.total as f64 / m_i as f64);
                    bad_height += (set.total > C5 * m_i) as usize;
                }
            }
        }
    }
    let all_quarters = per_quarter.iter().all(|&c| c > 0);
    outcome(
        bad_dense + bad_border + bad_area + bad_height == 0 && all_quarters && strip_checked > 0,
        format!(
            "300 instances, quarters hit {per_quarter:?}; wrong: dense {bad_dense}, border {bad_border}; \
             {strip_checked} strip checks, max |F1|/(dm) {worst_area:.2}, max sum h/m {worst_height:.2}"
        ),
    )
}

fn criterion8() -> Outcome {
    let mut r = rng(0xC8);
    let (mut pairs, mut inside, mut small, mut small_inside) = (0u64, 0u64, 0u64, 0u64);
    let mut seed = 0;
    while pairs < 100_000 {
        seed += 1;
        let m = r.random_range(8..=24);
        let n = r.random_range(m + 4..=2 * m);
        let k = r.random_range(0..=8);
        let g = if seed % 2 == 0 { Generator::Uniform } else { Generator::PlantedOccurrence };
        let inst = generate(g, m, n, 64, k, &mut r);
        let prm = ApproxParams { seed, ..Default::default() };
        assert!(prm.mappings(m) < 64);
        let d = approx_2d(&inst.pattern, &inst.text, &prm, &mut Counters::default()).unwrap();
        let o = oracle_all_offsets(&inst.pattern, &inst.text, u32::MAX - 1).unwrap();
        for (q, h) in o.iter() {
            let (x, h) = (*d.at(q).unwrap(), h as u64);
            let ok = h <= x && x <= 2 * h;
            pairs += 1;
            inside += ok as u64;
            if h <= 8 {
                small += 1;
                small_inside += ok as u64;
            }
        }
    }
    let mut exact_bad = 0;
    for i in 0..100 {
        let m = r.random_range(8..=24);
        let n = r.random_range(m..=2 * m);
        let sigma = [1, 2, 4, 8][i % 4];
        let inst = generate(Generator::ALL[i % 3], m, n, sigma, 4, &mut r);
        let prm = ApproxParams { seed: i as u64, ..Default::default() };
        let d = approx_2d(&inst.pattern, &inst.text, &prm, &mut Counters::default()).unwrap();
        let o = oracle_all_offsets(&inst.pattern, &inst.text, u32::MAX - 1).unwrap();
        exact_bad += o.iter().filter(|&(q, h)| *d.at(q).unwrap() != h as u64).count();
    }
    let frac = inside as f64 / pairs as f64;
    outcome(
        frac >= 0.99 && exact_bad == 0,
        format!(
            "{pairs} pairs, {:.3}% within [Ham, 2 Ham] ({small_inside}/{small} with Ham <= 8); \
             exact route: {exact_bad} differences over 100 instances",
            100.0 * frac
        ),
    )
}

fn criterion9() -> Outcome {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR"));
    let csv_path = dir.join("acceptance_bench.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_kmatch2d"))
        .args(["bench", "--sizes", "256:512", "--ks", "16,64", "--reps", "2", "--generators", "planted-periodic"])
        .args(["--seed", "0", "--csv"])
        .arg(&csv_path)
        .output()
        .expect("bench runs");
    if !status.status.success() {
        return outcome(false, format!("bench failed: {}", String::from_utf8_lossy(&status.stderr)));
    }
    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (ck, ca, cw, cj, cb) = (col("k"), col("algo"), col("work"), col("jumps"), col("branch"));
    let (mut work, mut jumps) = ([0u64; 2], [0u64; 2]);
    let mut branches = Vec::new();
    for row in reader.records() {
        let row = row.unwrap();
        let slot = (row[ck].parse::<u32>().unwrap() == 64) as usize;
        match &row[ca] {
            "full" => {
                work[slot] += row[cw].parse::<u64>().unwrap();
                branches.push(row[cb].to_string());
            }
            "naive" => jumps[slot] += row[cj].parse::<u64>().unwrap(),
            _ => {}
        }
    }
    let wr = work[1] as f64 / work[0] as f64;
    let jr = jumps[1] as f64 / jumps[0] as f64;
    outcome(
        wr <= 2.5 && jr >= 3.5,
        format!(
            "m=256 n=512: full work {} -> {} ({wr:.2}x), baseline jumps {} -> {} ({jr:.2}x), full branches {branches:?}; csv {}",
            work[0],
            work[1],
            jumps[0],
            jumps[1],
            csv_path.display()
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", criterion1),
        ("branch forcing", criterion2),
        ("period pair contract", criterion3),
        ("tile decomposition", criterion4),
        ("parallelogram grid", criterion5),
        ("sparse counter", criterion6),
        ("dense counter", criterion7),
        ("approximation quality", criterion8),
        ("performance sanity", criterion9),
    ];
    let start = Instant::now();
    let results: Vec<(Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(_, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    let o = panic::catch_unwind(AssertUnwindSafe(f))
                        .unwrap_or_else(|e| {
                            let msg = e
                                .downcast_ref::<String>()
                                .cloned()
                                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                                .unwrap_or_default();
                            outcome(false, format!("panicked: {msg}"))
                        });
                    (o, t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), (o, secs))) in criteria.iter().zip(results).enumerate() {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        failed += !o.pass as usize;
        println!("criterion {} ({name}): {verdict} [{secs:.1}s] {}", i + 1, o.detail);
    }
    println!("acceptance: {}/9 passed in {:.1}s", 9 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
