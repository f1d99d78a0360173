use bconv_core::algebraic::AlgebraicNumber;
use bconv_core::exact::rat;
use bconv_core::scale_entropy::*;
use bconv_core::IntPolynomial;
use proptest::prelude::*;

const CANTOR_DEFECT: [f64; 12] = [
    -1.3888888888888888,
    -1.0506543980279561,
    -0.7124802466999025,
    -0.29012345679012164,
    0.052467618539785654,
    0.39446200293341604,
    0.79766803840878,
    1.151920987907591,
    1.5635573845450796,
    1.8996942606616454,
    2.246151989250933,
    2.6676065640397155,
];

fn h(points: &[(f64, f64)], r: f64) -> f64 {
    entropy_at_scale_points(points, r).unwrap().entropy_bits
}

#[test]
fn cantor_dimension_estimate() {
    let third = AlgebraicNumber::rational(&rat(1, 3));
    let e = entropy_dim_estimate(&third, 16, 8).unwrap();
    assert!((e.estimate - (11.89344949422523 - 6.848079012092409) / 8.0).abs() < 1e-9);
    assert!((e.estimate - 0.6309).abs() <= 0.05);
    assert_eq!(e.raw_curve.len(), 16);
}

#[test]
fn cantor_defect_locked() {
    let third = AlgebraicNumber::rational(&rat(1, 3));
    let pts = ac_defect(&third, 12).unwrap();
    for (p, want) in pts.iter().zip(CANTOR_DEFECT) {
        assert!((p.defect - want).abs() < 1e-9, "d = {}: {}", p.d, p.defect);
    }
    let slope = defect_slope(&pts).unwrap();
    assert!((slope - 0.3690486).abs() < 1e-6, "{slope}");
}

#[test]
fn dyadic_defect_is_flat() {
    let pts = ac_defect(&AlgebraicNumber::rational(&rat(1, 2)), 12).unwrap();
    assert!((pts[11].defect + 2.0).abs() < 1e-3, "{}", pts[11].defect);
    assert!(defect_slope(&pts).unwrap().abs() < 0.05);
}

#[test]
fn garsia_defect_is_bounded() {
    let l = AlgebraicNumber::in_unit_interval(&IntPolynomial::from_i64(&[-1, 0, 1, 2]).unwrap()).unwrap();
    for p in ac_defect(&l, 12).unwrap() {
        assert!(p.defect - p.error_bound <= 4.0, "d = {}: {}", p.d, p.defect);
    }
}

#[test]
fn defect_slope_needs_two_points() {
    let pts = ac_defect(&AlgebraicNumber::rational(&rat(1, 3)), 1).unwrap();
    assert!(defect_slope(&pts).is_err());
}

fn measure(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-48i32..48, 1u32..1000), 1..max).prop_map(|v| {
        let total: u32 = v.iter().map(|p| p.1).sum();
        v.into_iter().map(|(x, w)| (x as f64 / 16.0, w as f64 / total as f64)).collect()
    })
}

fn dyadic() -> impl Strategy<Value = f64> {
    (0i32..7).prop_map(|e| (-(e as f64)).exp2())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn quadrature_agrees(pts in measure(64), j in 0i32..5) {
        let r = (-(j as f64)).exp2();
        let q = entropy_at_scale_quadrature(&pts, r, 10_000).unwrap().entropy_bits;
        prop_assert!((h(&pts, r) - q).abs() <= 1e-6);
    }

    #[test]
    fn nested_scales(pts in measure(12), mut s in prop::collection::vec(dyadic(), 4)) {
        s.sort_by(f64::total_cmp);
        let inner = h(&pts, s[1]) - h(&pts, s[2]);
        let outer = h(&pts, s[0]) - h(&pts, s[3]);
        prop_assert!(inner >= -1e-12);
        prop_assert!(outer - inner >= -1e-12);
    }

    #[test]
    fn convolution_does_not_lower(a in measure(8), b in measure(8), j in 0i32..5, k in 1u32..7) {
        let r1 = (-(j as f64)).exp2();
        let r2 = r1 * k as f64;
        let ab = convolve_points(&a, &b);
        let lhs = conditional_entropy_points(&ab, r1, r2).unwrap();
        let rhs = conditional_entropy_points(&a, r1, r2).unwrap();
        prop_assert!(lhs - rhs >= -1e-12, "{} < {}", lhs, rhs);
    }

    #[test]
    fn translation_invariant(pts in measure(16), j in 0i32..5, shift in -64i32..64) {
        let r = (-(j as f64)).exp2();
        let moved: Vec<(f64, f64)> = pts.iter().map(|&(x, p)| (x + shift as f64 / 16.0, p)).collect();
        prop_assert!((h(&pts, r) - h(&moved, r)).abs() <= 1e-12);
    }
}
