use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use oar_core::wavelet::*;
use proptest::prelude::*;

fn all_filters() -> Vec<Filter> {
    (1..=MAX_DAUBECHIES_ORDER).map(|p| make_daubechies_filter(p).unwrap()).collect()
}

#[test]
fn d4_coefficients() {
    let f = make_daubechies_filter(2).unwrap();
    let expected = [0.4829629131, 0.8365163037, 0.2241438680, -0.1294095226];
    for (a, b) in f.coeffs().iter().zip(expected) {
        assert!((a - b).abs() < 1e-10);
    }
    assert!((f.coeffs().iter().sum::<f64>() - SQRT_2).abs() < 1e-12);
}

#[test]
fn high_pass_is_orthogonal_and_normalized() {
    for f in all_filters() {
        let g = high_pass(&f);
        assert!((g.coeffs().iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        for k in -10..=10i64 {
            let cross: f64 = (-40..40).map(|n| g.g(n) * f.h(n + 2 * k)).sum();
            assert!(cross.abs() < 1e-12, "{} k={k}", f.label());
        }
        // Exact index relation g_n = (−1)^n h_{−n+1+2N}.
        let two_n = f.len() as i64;
        for n in g.support_offset()..g.support_offset() + g.coeffs().len() as i64 {
            let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            assert_eq!(g.g(n), sign * f.h(-n + 1 + two_n));
        }
    }
    let haar = high_pass(&make_daubechies_filter(1).unwrap());
    assert!(haar.coeffs().iter().sum::<f64>().abs() < 1e-15);
}

#[test]
fn filter_bank_window_is_orthonormal() {
    for f in all_filters() {
        let g = high_pass(&f);
        let width = 4 * f.len() as i64;
        // Rows h_{n−2j}, g_{n−2j} fully contained in the window [0, width).
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for j in -width..width {
            let h_row: Vec<f64> = (0..width).map(|n| f.h(n - 2 * j)).collect();
            let g_row: Vec<f64> = (0..width).map(|n| g.g(n - 2 * j)).collect();
            let full = |r: &Vec<f64>, len: usize| r.iter().filter(|x| **x != 0.0).count() == len;
            if full(&h_row, f.len()) {
                rows.push(h_row);
            }
            if full(&g_row, g.coeffs().len()) {
                rows.push(g_row);
            }
        }
        for (i, a) in rows.iter().enumerate() {
            for (j, b) in rows.iter().enumerate() {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12, "{}", f.label());
            }
        }
    }
}

#[test]
fn truncated_products_shrink_and_converge() {
    for f in all_filters() {
        for i in -64..=64 {
            let k = PI * i as f64 + 0.37;
            let mut prev = f64::INFINITY;
            for m in 1..=30 {
                let v = partial_product(&f, m, k).norm();
                assert!(v <= prev + 1e-12);
                prev = v;
            }
            let a = partial_product(&f, 24, k).norm();
            let b = partial_product(&f, 30, k).norm();
            assert!((a - b).abs() < 1e-8);
            assert!((a * a - partial_product_power(&f, 24, k)).abs() < 1e-12);
        }
    }
}

#[test]
fn factored_power_matches_the_complex_transfer_function() {
    for f in all_filters() {
        assert!(f.has_factored_power());
        for i in 0..200 {
            let t = -PI + 2.0 * PI * i as f64 / 199.0;
            assert!((f.m0_power(t) - m0(&f, t).norm_sqr()).abs() < 1e-13);
        }
    }
    let odd = Filter::new_unchecked(vec![0.6, 0.8], 1, 0);
    assert!(!odd.has_factored_power());
    assert!((odd.m0_power(0.4) - m0(&odd, 0.4).norm_sqr()).abs() < 1e-14);
}

#[test]
fn serde_round_trip_keeps_evaluation() {
    let f = make_daubechies_filter(4).unwrap();
    let text = serde_json::to_string(&f).unwrap();
    let back: Filter = serde_json::from_str(&text).unwrap();
    assert_eq!(f, back);
    assert_eq!(f.m0_power(2.9), back.m0_power(2.9));
}

#[test]
fn scaling_transform_at_origin() {
    for f in all_filters() {
        let sf = ScalingFunctionFT::new(f, 1);
        assert!((sf.value(0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    }
}

proptest! {
    #[test]
    fn qmf_identity(p in 1usize..=10, t in -10.0f64..10.0) {
        let f = make_daubechies_filter(p).unwrap();
        let s = m0(&f, t).norm_sqr() + m0(&f, t + PI).norm_sqr();
        prop_assert!((s - 1.0).abs() < 1e-12);
        prop_assert!((m0(&f, t) - m0(&f, t + 2.0 * PI)).norm() < 1e-12);
    }

    #[test]
    fn scaling_transform_is_bounded(p in 1usize..=10, k in -400.0f64..400.0) {
        let sf = ScalingFunctionFT::new(make_daubechies_filter(p).unwrap(), 1);
        prop_assert!(sf.value(k).norm() <= 1.0 + 1e-10);
        prop_assert!((sf.power(k) - sf.value(k).norm_sqr()).abs() < 1e-12);
    }
}
