use sbm_core::params::lambda_min;
use sbm_core::thresholds::*;

fn grid(k: usize, points: usize) -> impl Iterator<Item = f64> {
    let lo = lambda_min(k);
    (0..points).map(move |i| lo + (1.0 - lo) * i as f64 / (points - 1) as f64).filter(|l| *l != 0.0)
}

fn ks() -> Vec<usize> {
    let mut ks: Vec<usize> = (3..=40).collect();
    let mut k = 50.0f64;
    while k <= 1e4 {
        ks.push(k.round() as usize);
        k *= 1.3;
    }
    ks.push(10_000);
    ks
}

#[test]
fn lower_bound_never_exceeds_upper_bound() {
    for k in ks() {
        for l in grid(k, 100) {
            let (lo, up) = (dc_lower(k, l).unwrap(), dc_upper(k, l).unwrap());
            if lo.is_finite() && up.is_finite() {
                assert!(lo <= up * (1.0 + 1e-12), "k={k} λ={l}: {lo} > {up}");
            }
        }
    }
}

#[test]
fn coloring_endpoint_agrees() {
    for k in (2..=10_000).step_by(7).chain([2, 3, 5, 10_000]) {
        let a = dc_upper(k, lambda_min(k)).unwrap();
        let b = coloring_dc_upper(k).unwrap();
        assert!((a - b).abs() <= 1e-10 * b.max(1.0), "k={k}");
        let kf = k as f64;
        assert!(b < 2.0 * kf * kf.ln() || k == 2);
    }
}

#[test]
fn lambda_star_increases_with_k() {
    let mut prev = f64::NEG_INFINITY;
    for k in (5..=200).chain((250..=10_000).step_by(250)) {
        let l = lambda_star(k).unwrap();
        assert!(l >= prev, "k={k}");
        prev = l;
    }
}

#[test]
fn lambda_star_has_no_crossing_below_five() {
    for k in 2..=4 {
        assert!(lambda_star(k).is_err());
    }
}

#[test]
fn large_k_ratio_approaches_one_slowly() {
    let l = 0.3;
    let dev = |k: f64| (dc_upper(k as usize, l).unwrap() * l / 2.0 - 1.0).abs();
    let mut prev = f64::INFINITY;
    for e in 3..=7 {
        let k = 10f64.powi(e);
        let d = dev(k);
        assert!(d < prev, "k=1e{e}");
        // the deviation is of order 1/ln k
        assert!(d * k.ln() < 3.0, "k=1e{e}: {d}");
        prev = d;
    }
}

#[test]
fn small_lambda_factor_two() {
    let r = dc_upper(10, 1e-3).unwrap() / dc_lower(10, 1e-3).unwrap();
    assert!((1.8..=2.3).contains(&r), "{r}");
}

#[test]
fn overlap_bound_is_monotone_and_anchored() {
    for (k, l) in [(2, 0.9), (3, 0.5), (5, -0.25), (8, 0.7)] {
        let up = dc_upper(k, l).unwrap();
        assert!((overlap_degree(k, l, 1.0 / k as f64).unwrap() - up).abs() <= 1e-10 * up);
        let mut prev = 0.0;
        for i in 1..=60 {
            let d = up * (1.0 + 0.1 * i as f64);
            let b = min_overlap_beta(k, l, d).unwrap();
            assert!(b >= prev - 1e-12);
            assert!((overlap_degree(k, l, b).unwrap() - d).abs() < 1e-6 * d);
            prev = b;
        }
        assert!(min_overlap_beta(k, l, up).is_err());
    }
}

#[test]
fn effective_degree_at_lower_bound() {
    for k in 3..30 {
        for l in grid(k, 17) {
            let d = dc_lower(k, l).unwrap();
            let km = (k - 1) as f64;
            let got = effective_coloring_degree(k, l, d);
            assert!((got - 2.0 * km * km.ln()).abs() < 1e-9 * got.max(1.0));
        }
    }
}

#[test]
fn reports_are_consistent() {
    for k in [2, 3, 4, 5, 11, 100] {
        for l in grid(k, 41) {
            let r = threshold_report(k, l).unwrap();
            assert_eq!(r.below_ks_detectable, r.d_upper < r.d_ks);
            assert!(r.d_upper > 0.0 && r.d_ks > 0.0 && r.d_lower >= 0.0);
            if k == 4 {
                assert!(!r.below_ks_detectable);
            }
        }
    }
}
