use bconv_core::algebraic::AlgebraicNumber;
use bconv_core::dimension::*;
use bconv_core::exact::rat;
use bconv_core::scale_entropy::entropy_dim_estimate;
use bconv_core::IntPolynomial;

fn unit_root(c: &[i64]) -> AlgebraicNumber {
    AlgebraicNumber::in_unit_interval(&IntPolynomial::from_i64(c).unwrap()).unwrap()
}

#[test]
fn upper_shrinks_with_n() {
    for l in [unit_root(&[-1, 1, 1]), unit_root(&[-1, 1, 0, 1]), unit_root(&[-1, 1, 1, 1])] {
        let ups: Vec<f64> = [4, 8, 16].iter().map(|&n| hochman_bracket(&l, n).unwrap().h_upper).collect();
        assert!(ups.windows(2).all(|w| w[1] <= w[0]), "{ups:?}");
        for n in [4, 8, 16] {
            let b = hochman_bracket(&l, n).unwrap();
            assert!(0.0 <= b.lower && b.lower <= b.upper && b.upper <= 1.0);
        }
    }
}

#[test]
fn golden_dimension_is_below_one() {
    let b = hochman_bracket(&unit_root(&[-1, 1, 1]), 16).unwrap();
    // 11.8242 / 16 / log2(φ) = 1.0648, clamped
    assert_eq!(b.upper, 1.0);
    assert!((b.h_upper - 11.824183300596172 / 16.0).abs() < 1e-12);
}

#[test]
fn formula_matches_entropy_estimate() {
    for (p, q) in [(1, 3), (2, 5)] {
        let l = AlgebraicNumber::rational(&rat(p, q));
        let exact = dim_below_half(&l).unwrap();
        let est = entropy_dim_estimate(&l, 16, 8).unwrap();
        assert!((exact.value - est.estimate).abs() <= 0.05, "{p}/{q}: {} vs {}", exact.value, est.estimate);
    }
}

#[test]
fn below_half_bracket_is_tight() {
    let b = hochman_bracket(&AlgebraicNumber::rational(&rat(2, 5)), 8).unwrap();
    assert!(b.upper - b.lower < 1e-12);
    assert!(b.sources.iter().all(|s| s.tag == "exact-formula"));
}

#[test]
fn rejects_outside_unit_interval() {
    assert!(hochman_bracket(&AlgebraicNumber::rational(&rat(3, 2)), 4).is_err());
    assert!(dim_below_half(&AlgebraicNumber::rational(&rat(0, 1))).is_err());
}

#[test]
fn bv_holds_on_corpus() {
    let corpus = [
        AlgebraicNumber::rational(&rat(1, 2)),
        AlgebraicNumber::rational(&rat(3, 5)),
        unit_root(&[-1, 1, 1]),
        unit_root(&[-1, 1, 0, 1]),
        unit_root(&[-1, 0, 1, 2]),
        unit_root(&[-1, 1, 1, 1]),
    ];
    for l in &corpus {
        let r = bv_consistency(l, 14).unwrap();
        assert!(r.holds, "λ = {}: {} < {}", l.to_f64(), r.h_over_n, r.lower);
    }
}
