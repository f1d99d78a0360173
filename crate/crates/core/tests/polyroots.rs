use bconv_core::algebraic::AlgebraicNumber;
use bconv_core::exact::rat;
use bconv_core::polyroots::*;
use bconv_core::IntPolynomial;

#[test]
fn transversality_through_d10() {
    for d in 2..=10 {
        let r = transversality_audit(d).unwrap();
        assert_eq!(r.max_count, 1, "d = {d}: {:?}", r.violations);
        assert_eq!(r.patterns_checked, pd_count(d));
    }
}

#[test]
fn separation_minima() {
    let frozen = [
        (2, 2, 0.38196601125),
        (3, 5, 0.0642938150781),
        (4, 14, 0.0108515409949),
        (5, 45, 0.00149455684405),
        (6, 143, 0.000127085225397),
    ];
    for (d, roots, min) in frozen {
        let r = separation_scan(d, &rat(1, 2), &rat(1, 1)).unwrap();
        assert_eq!(r.distinct_roots, roots, "d = {d}");
        let m = r.min_pairwise_distance.unwrap();
        assert!((m - min).abs() < 1e-11 * min.max(1e-3), "d = {d}: {m}");
        assert!(r.bound_holds && r.min_lo.unwrap() >= r.mahler_bound);
    }
}

#[test]
fn nearest_examples() {
    let golden = AlgebraicNumber::in_unit_interval(&IntPolynomial::from_i64(&[-1, 1, 1]).unwrap()).unwrap();
    let r = nearest_root(&golden, 2).unwrap();
    assert!(r.exact && r.distance == 0.0);
    let r = nearest_root(&AlgebraicNumber::rational(&rat(11, 20)), 4).unwrap();
    assert!(r.lo > 0.0 && r.hi - r.lo < 1e-12, "{r:?}");
    assert!((r.distance - 0.00631098730792364).abs() < 1e-14);
    assert!((r.root_re - 0.54368901269207636).abs() < 1e-14 && r.root_im == 0.0);
    for d in 1..=6 {
        let r = nearest_root(&AlgebraicNumber::rational(&rat(3, 5)), d).unwrap();
        assert!(!r.exact && r.lo > 0.0);
    }
}

fn min_table(x: (i64, i64), mins: &[(i64, i64)]) {
    let x = rat(x.0, x.1);
    for (d, &(p, q)) in mins.iter().enumerate() {
        let r = count_small_values(&x, d, &rat(1, 10_000)).unwrap();
        assert_eq!(r.min_nonzero, rat(p, q).to_string(), "d = {d}");
        assert!(r.floor_holds, "d = {d}");
        assert_eq!(r.floor, floor_value(&x, d).to_string());
    }
}

#[test]
fn small_values_nine_tenths() {
    min_table(
        (9, 10),
        &[(1, 1), (1, 10), (9, 100), (19, 1000), (171, 10000), (1539, 100000), (5149, 1000000), (7559, 10000000), (68031, 100000000)],
    );
    for d in 0..=8 {
        assert_eq!(count_small_values(&rat(9, 10), d, &rat(1, 10_000)).unwrap().count, 0);
    }
}

#[test]
fn small_values_three_fifths() {
    min_table(
        (3, 5),
        &[(1, 1), (2, 5), (1, 25), (3, 125), (9, 625), (27, 3125), (4, 15625), (12, 78125), (36, 390625)],
    );
    let counts: Vec<u64> = (0..=8).map(|d| count_small_values(&rat(3, 5), d, &rat(1, 10_000)).unwrap().count).collect();
    assert_eq!(counts, [0, 0, 0, 0, 0, 0, 0, 0, 1]);
}

#[test]
fn enumeration_is_canonical() {
    for d in 0..=6 {
        let all: Vec<PdPolynomial> = enumerate_pd(d).unwrap().collect();
        assert_eq!(all.len() as u64, pd_count(d));
        let mut seen = std::collections::HashSet::new();
        for p in &all {
            assert_eq!(p.coeffs.iter().find(|c| **c != 0), Some(&1));
            let neg: Vec<i8> = p.coeffs.iter().map(|c| -c).collect();
            assert!(seen.insert(p.coeffs.clone()));
            assert!(!seen.contains(&neg));
        }
    }
    assert!(enumerate_pd(ENUMERATION_CAP + 1).is_err());
}

mod props {
    use super::*;
    use bconv_core::certified_roots;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn sturm_matches_certified_roots(c in prop::collection::vec(-1i8..=1, 9)) {
            prop_assume!(c.iter().any(|x| *x != 0));
            let p = PdPolynomial::new(c).unwrap().to_poly();
            prop_assume!(p.degree() >= 1);
            let sf = p.square_free();
            let set = certified_roots(&sf, 1e-12).unwrap();
            let (a, b) = (rat(1, 2), rat(1, 1));
            let sturm = count_zeros_interval(&p, &a, &b).unwrap();
            let inside = set
                .real_roots()
                .filter(|r| {
                    let iv = r.real_interval();
                    iv.lo > 0.5 && iv.hi < 1.0
                })
                .count();
            let touching = set
                .real_roots()
                .filter(|r| {
                    let iv = r.real_interval();
                    iv.hi >= 0.5 && iv.lo <= 1.0
                })
                .count();
            prop_assert!(inside <= sturm && sturm <= touching, "{p}: {inside} <= {sturm} <= {touching}");
            prop_assert_eq!(set.roots.len(), sf.degree());
        }
    }
}
