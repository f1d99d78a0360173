//! Acceptance suite: one pass/fail line per criterion.
//!
//! Criteria listed in `KNOWN_RED` fail as stated (see README); they are still
//! evaluated and reported. The process fails if any other criterion fails or a
//! known-red one starts passing.

mod common;

use std::f64::consts::TAU;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use bconv_core::algebraic::AlgebraicNumber;
use bconv_core::atoms::{count_atoms, enumerate_atoms, garsia_entropy_bracket, half, min_gap, semigroup_count, shannon_entropy, ExponentRange};
use bconv_core::classify::{classify, mahler_measure};
use bconv_core::density::{histogram_norms, iterate_self_similar, GridMeasure};
use bconv_core::dimension::{bv_consistency, hochman_bracket};
use bconv_core::exact::rat;
use bconv_core::fourier::{ft_eval, pisot_scan};
use bconv_core::polyroots::{count_small_values, separation_scan, transversality_audit};
use bconv_core::scale_entropy::{
    ac_defect, conditional_entropy_points, convolve_points, defect_slope, entropy_at_scale_points,
    entropy_at_scale_quadrature, entropy_dim_estimate,
};
use bconv_core::IntPolynomial;
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KNOWN_RED: [u32; 2] = [5, 12];

type Outcome = (bool, String);

fn unit_root(c: &[i64]) -> AlgebraicNumber {
    AlgebraicNumber::in_unit_interval(&IntPolynomial::from_i64(c).unwrap()).unwrap()
}

fn golden() -> AlgebraicNumber {
    unit_root(&[-1, 1, 1])
}

fn garsia() -> AlgebraicNumber {
    unit_root(&[-1, 0, 1, 2])
}

fn dyadic_exactness() -> Outcome {
    let t = Instant::now();
    let l = AlgebraicNumber::rational(&rat(1, 2));
    let mut ok = true;
    for n in 1..=20 {
        let mu = enumerate_atoms(&l, ExponentRange::first(n).unwrap(), &half()).unwrap();
        ok &= mu.len() == 1 << n && count_atoms(&l, n).unwrap() == 1 << n;
        ok &= shannon_entropy(&mu) == n as f64;
    }
    let b = hochman_bracket(&l, 20).unwrap();
    ok &= b.lower == 1.0 && b.upper == 1.0;
    let secs = t.elapsed().as_secs_f64();
    (ok && secs < 30.0, format!("2^n atoms, H = n bits, bracket [{}, {}], {secs:.1} s", b.lower, b.upper))
}

const GOLDEN_TABLE: [(usize, usize, f64); 16] = [
    (1, 2, 1.0),
    (2, 4, 2.0),
    (3, 7, 2.75),
    (4, 12, 3.5),
    (5, 20, 4.202819531114783),
    (6, 33, 4.905639062229567),
    (7, 54, 5.599238429816493),
    (8, 88, 6.2928377974034175),
    (9, 143, 6.984585417000124),
    (10, 232, 7.676333036596821),
    (11, 376, 8.367700206575007),
    (12, 609, 9.05906737655321),
    (13, 986, 9.750354847383056),
    (14, 1596, 10.441642318212867),
    (15, 2583, 11.13291280940453),
    (16, 4180, 11.824183300596172),
];

fn golden_micro_oracle() -> Outcome {
    let g = golden();
    let mu = enumerate_atoms(&g, ExponentRange::first(3).unwrap(), &half()).unwrap();
    let zero = (0..mu.len()).find(|&i| mu.position_sign(i) == 0);
    let mass0 = zero.map(|i| mu.mass(i));
    let gap = min_gap(&mu).unwrap();
    let mut ok = mu.len() == 7 && mass0 == Some(rat(1, 4)) && shannon_entropy(&mu) == 2.75;
    ok &= (gap.value - 0.472136).abs() <= 1e-6;
    let b = garsia_entropy_bracket(&g, 16).unwrap();
    let chain: Vec<f64> = [4usize, 8, 16].iter().map(|&k| b.entropies[k - 1] / k as f64).collect();
    ok &= chain.windows(2).all(|w| w[1] <= w[0]);
    for (n, atoms, h) in GOLDEN_TABLE {
        ok &= b.atom_counts[n - 1] == atoms as u64 && (b.entropies[n - 1] - h).abs() < 1e-12;
    }
    (ok, format!("7 atoms, mass(0) = {}, gap {:.7}, chain {chain:.4?}, table n <= 16", mass0.unwrap_or_default(), gap.value))
}

fn random_measure(rng: &mut ChaCha8Rng, max: usize) -> Vec<(f64, f64)> {
    let n = rng.random_range(1..=max);
    let raw: Vec<(i32, u32)> = (0..n).map(|_| (rng.random_range(-64..=64), rng.random_range(1..=1000))).collect();
    let total: u32 = raw.iter().map(|p| p.1).sum();
    raw.into_iter().map(|(x, w)| (x as f64 / 16.0, w as f64 / total as f64)).collect()
}

fn entropy_laws() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let h = |p: &[(f64, f64)], r: f64| entropy_at_scale_points(p, r).unwrap().entropy_bits;
    let (mut quad_err, mut mono_slack, mut conv_slack) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..500 {
        let pts = random_measure(&mut rng, 64);
        let r = (-(rng.random_range(0..=4) as f64)).exp2();
        let q = entropy_at_scale_quadrature(&pts, r, 10_000).unwrap().entropy_bits;
        quad_err = quad_err.max((h(&pts, r) - q).abs());

        let mut s: Vec<f64> = (0..4).map(|_| (-(rng.random_range(0..=6) as f64)).exp2()).collect();
        s.sort_by(f64::total_cmp);
        let inner = h(&pts, s[1]) - h(&pts, s[2]);
        let outer = h(&pts, s[0]) - h(&pts, s[3]);
        mono_slack = mono_slack.min(inner).min(outer - inner);

        let other = random_measure(&mut rng, 8);
        let r1 = (-(rng.random_range(0..=5) as f64)).exp2();
        let r2 = r1 * rng.random_range(1..=6) as f64;
        let a = conditional_entropy_points(&pts, r1, r2).unwrap();
        let ab = conditional_entropy_points(&convolve_points(&pts, &other), r1, r2).unwrap();
        conv_slack = conv_slack.min(ab - a);
    }
    let secs = t.elapsed().as_secs_f64();
    let ok = quad_err <= 1e-6 && mono_slack >= -1e-12 && conv_slack >= -1e-12 && secs < 120.0;
    (ok, format!("quadrature {quad_err:.1e}, monotone slack {mono_slack:.1e}, convolution slack {conv_slack:.1e}, {secs:.1} s"))
}

fn fourier_closed_form() -> Outcome {
    let l = AlgebraicNumber::rational(&rat(1, 2));
    let mut worst = 0.0f64;
    for (p, q) in [(1, 8), (1, 3), (1, 1), (5, 2)] {
        let t = p as f64 / q as f64;
        let v = ft_eval(&l, &rat(p, q), 1e-10).unwrap().value;
        worst = worst.max((v - (2.0 * TAU * t).sin() / (2.0 * TAU * t)).abs());
    }
    let z = ft_eval(&l, &rat(1, 4), 1e-10).unwrap();
    (worst <= 1e-8 && z.exact_zero && z.value == 0.0, format!("max deviation {worst:.1e}, t = 1/4 exact zero {}", z.exact_zero))
}

fn non_decay_scan() -> Outcome {
    let scan = pisot_scan(&golden(), 20).unwrap();
    let locked = (scan.minimum - 0.0004868741686398302).abs() < 2e-9;
    let l = AlgebraicNumber::rational(&rat(3, 4));
    let mut t = rat(1, 1);
    let mut drop = None;
    for n in 0..=25 {
        let s = ft_eval(&l, &t, 1e-12).unwrap();
        if s.value.abs() + s.error() < 0.01 {
            drop = Some(n);
            break;
        }
        t = t * rat(4, 3);
    }
    let ok = scan.minimum >= 0.01 && drop.is_some();
    (
        ok,
        format!(
            "golden min_n<=20 = {:.6e} at n = {} (needs >= 0.01; regression value locked: {locked}); 3/4 below 0.01 at n = {drop:?}",
            scan.minimum, scan.argmin
        ),
    )
}

fn mahler_measures() -> Outcome {
    let two = mahler_measure(&IntPolynomial::from_i64(&[-1, 2]).unwrap()).unwrap();
    let phi = mahler_measure(&IntPolynomial::from_i64(&[-1, -1, 1]).unwrap()).unwrap();
    let lehmer_poly = IntPolynomial::from_i64(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]).unwrap();
    let lehmer = mahler_measure(&lehmer_poly).unwrap();
    let root = AlgebraicNumber::from_root_index(&lehmer_poly, 1).unwrap();
    let c = classify(&root).unwrap();
    let ok = two.is_exactly(2)
        && (phi.value - 1.618034).abs() <= 1e-6
        && (lehmer.value - 1.176281).abs() <= 1e-6
        && c.is_salem
        && c.m_unit_circle == 8
        && c.degree == 10;
    (ok, format!("M(2x-1) = {:?}, M(φ) = {:.9}, M(Lehmer) = {:.9}, salem {} m = {} deg {}", two.exact, phi.value, lehmer.value, c.is_salem, c.m_unit_circle, c.degree))
}

fn transversality() -> Outcome {
    let t = Instant::now();
    let mut worst = 0;
    let mut checked = 0;
    for d in 2..=10 {
        let r = transversality_audit(d).unwrap();
        worst = worst.max(r.max_count);
        checked += r.patterns_checked;
        if r.max_count != 1 {
            return (false, format!("d = {d}: max count {} ({:?})", r.max_count, r.violations));
        }
    }
    let secs = t.elapsed().as_secs_f64();
    (worst == 1 && secs < 600.0, format!("max zero count 1 for d = 2..10, {checked} patterns, {secs:.1} s"))
}

const SEPARATION_MINIMA: [(usize, f64); 5] = [
    (2, 0.38196601125),
    (3, 0.0642938150781),
    (4, 0.0108515409949),
    (5, 0.00149455684405),
    (6, 0.000127085225397),
];

fn mahler_separation() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for d in 1..=6 {
        let r = separation_scan(d, &rat(1, 2), &rat(1, 1)).unwrap();
        let bound = (-4.0 * d as f64 * (d as f64).ln()).exp();
        if let Some(lo) = r.min_lo {
            ok &= lo >= bound && r.bound_holds;
            notes.push(format!("d{d} {:.3e}", r.min_pairwise_distance.unwrap()));
        }
        if let Some(&(_, want)) = SEPARATION_MINIMA.iter().find(|m| m.0 == d) {
            ok &= r.min_pairwise_distance.is_some_and(|m| (m - want).abs() <= 1e-10);
        }
    }
    (ok, format!("minima above exp(-4 d ln d): {}", notes.join(", ")))
}

fn rational_floor() -> Outcome {
    let mut ok = true;
    for x in [rat(3, 5), rat(9, 10)] {
        for d in 0..=8 {
            ok &= count_small_values(&x, d, &rat(1, 10_000)).unwrap().floor_holds;
        }
    }
    (ok, "min nonzero |P(p/q)| >= q^-d for p/q in {3/5, 9/10}, d <= 8".into())
}

fn garsia_diagnostics() -> Outcome {
    let l = garsia();
    let c = classify(&l).unwrap();
    let mut ok = c.is_garsia;
    for n in 1..=14 {
        ok &= count_atoms(&l, n).unwrap() == 1 << n;
    }
    let b = garsia_entropy_bracket(&l, 14).unwrap();
    ok &= b.entropies.iter().enumerate().all(|(i, h)| (h - (i + 1) as f64).abs() < 1e-9);
    let defect = ac_defect(&l, 12).unwrap();
    let worst = defect.iter().map(|p| p.defect).fold(f64::NEG_INFINITY, f64::max);
    ok &= defect.iter().all(|p| p.defect <= 4.0);
    let sups: Vec<f64> = (8..=12)
        .map(|depth| {
            let (g, _) = iterate_self_similar(&l, 60, &GridMeasure::point_mass(depth).unwrap()).unwrap();
            histogram_norms(&g).sup_density
        })
        .collect();
    let (lo, hi) = sups.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &s| (a.min(s), b.max(s)));
    ok &= hi <= 2.0 * lo;
    (ok, format!("garsia {}, 2^n atoms n <= 14, max defect {worst:.3}, sup density {lo:.4}..{hi:.4}", c.is_garsia))
}

fn cantor() -> Outcome {
    let l = AlgebraicNumber::rational(&rat(1, 3));
    let e = entropy_dim_estimate(&l, 16, 8).unwrap();
    let slope = defect_slope(&ac_defect(&l, 12).unwrap()).unwrap();
    let ok = (e.estimate - 0.6309).abs() <= 0.05 && (slope - 0.369).abs() <= 0.05;
    (ok, format!("estimate {:.4}, defect slope {slope:.4}", e.estimate))
}

fn semigroup_growth() -> Outcome {
    let mut ok = true;
    let three_fifths = AlgebraicNumber::rational(&rat(3, 5));
    for n in 1..=20 {
        ok &= semigroup_count(&three_fifths, n).unwrap().count == 1 << n;
    }
    for (l, n_max) in [(golden(), 16), (garsia(), 14), (unit_root(&[-1, 1, 0, 1]), 14)] {
        for n in 1..=n_max {
            let mu = enumerate_atoms(&l, ExponentRange::first(n).unwrap(), &half()).unwrap();
            ok &= semigroup_count(&l, n).unwrap().count == mu.len() as u128;
        }
    }
    let g = semigroup_count(&golden(), 16).unwrap();
    ok &= g.growth <= g.log2_mahler + 0.05;
    (
        ok,
        format!(
            "counts match atoms; golden n = 16: log2|S|/n = {:.4} vs log2 M + 0.05 = {:.4}",
            g.growth,
            g.log2_mahler + 0.05
        ),
    )
}

fn bv_consistency_corpus() -> Outcome {
    let corpus = [
        ("1/2", AlgebraicNumber::rational(&rat(1, 2))),
        ("3/5", AlgebraicNumber::rational(&rat(3, 5))),
        ("golden", golden()),
        ("x^3+x-1", unit_root(&[-1, 1, 0, 1])),
        ("plastic", unit_root(&[-1, 0, 1, 1])),
        ("tribonacci", unit_root(&[-1, 1, 1, 1])),
        ("garsia", garsia()),
    ];
    let mut ok = true;
    let mut worst = f64::INFINITY;
    for (_, l) in &corpus {
        let r = bv_consistency(l, 20).unwrap();
        ok &= r.holds;
        worst = worst.min(r.h_over_n - r.lower);
    }
    (ok, format!("{} parameters at n = 20, smallest margin {worst:.4}", corpus.len()))
}

fn cli_determinism() -> Outcome {
    let dir = golden_dir();
    let mut bad = Vec::new();
    for (name, args) in CORPUS {
        let want = fs::read_to_string(dir.join(format!("{name}.{}", extension(args)))).unwrap_or_default();
        for jobs in ["1", "2", "8"] {
            if with_flags(&["--jobs", jobs], args) != want {
                bad.push(format!("{name}@{jobs}"));
            }
        }
    }
    let tmp = tempfile::tempdir().unwrap();
    let root = tmp.path().to_str().unwrap();
    for (name, args) in CORPUS {
        let a = with_flags(&["--cache-dir", root], args);
        let b = with_flags(&["--cache-dir", root], args);
        if a != b {
            bad.push(format!("{name}@cache"));
        }
    }
    let mut rates = Vec::new();
    for fraction in ["0.05", "1"] {
        let v: serde_json::Value =
            serde_json::from_str(&bconv_ok(&["--cache-dir", root, "cache", "verify", "--fraction", fraction])).unwrap();
        rates.push(v["match_rate"].as_f64().unwrap_or(0.0));
    }
    let ok = bad.is_empty() && rates.iter().all(|r| *r == 1.0);
    (ok, format!("{} cases x 3 job settings + cache; verify match rates {rates:?}; mismatches {bad:?}", CORPUS.len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 14] = [
        (1, "dyadic exactness", dyadic_exactness),
        (2, "golden-ratio micro-oracle", golden_micro_oracle),
        (3, "entropy-at-scale laws", entropy_laws),
        (4, "Fourier closed form", fourier_closed_form),
        (5, "Pisot non-decay scan", non_decay_scan),
        (6, "Mahler measures", mahler_measures),
        (7, "transversality audit", transversality),
        (8, "Mahler separation", mahler_separation),
        (9, "rational floor", rational_floor),
        (10, "Garsia diagnostics", garsia_diagnostics),
        (11, "Cantor check", cantor),
        (12, "semigroup growth", semigroup_growth),
        (13, "entropy lower-bound consistency", bv_consistency_corpus),
        (14, "CLI determinism", cli_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        let t = Instant::now();
        let (pass, detail) = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        let known = KNOWN_RED.contains(&id);
        let tag = match (pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("[{tag}] {id:>2} {name} ({:.1} s): {detail}", t.elapsed().as_secs_f64());
        if pass == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
    println!("acceptance: all criteria behave as recorded ({} known red: {KNOWN_RED:?})", KNOWN_RED.len());
}
