use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use oar_core::correlators::*;
use oar_core::kernels::{covariance_lattice, Couplings};
use oar_core::quadrature::{QuadratureSpec, SmearedVector};
use oar_core::rgflow::{LimitState, RenormalizedState};
use oar_core::wavelet::make_daubechies_filter;
use oar_core::OarError;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn d8_limit() -> &'static LimitState {
    static S: OnceLock<LimitState> = OnceLock::new();
    S.get_or_init(|| LimitState::critical(&make_daubechies_filter(4).unwrap(), &QuadratureSpec::default()).unwrap())
}

fn random_skew(rng: &mut ChaCha8Rng, dim: usize) -> SkewMatrix {
    SkewMatrix::from_upper(dim, |_, _| Ok(Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))).unwrap()
}

#[test]
fn nearest_neighbour_symbol_value() {
    let sym = toeplitz_symbol(d8_limit(), -1, -1).unwrap();
    assert!((sym.get(-1).unwrap() - 0.568401).abs() < 5e-6, "{:?}", sym);
}

#[test]
fn first_line_closed_form() {
    // ω(Ψ(0,iδ_1)Ψ(δ_0,0)) = (1/2π)∫|ŝ|²(cos k − sign(k) sin k) dk with C = 2(e^{βh}+1)^{-1}
    let st = d8_limit();
    let direct = self_dual_two_point(st, &SelfDualVector::imaginary_site(1), &SelfDualVector::real_site(0)).unwrap();
    let reference = st
        .measure()
        .integrate(|n| {
            let k = n.kappa;
            Complex64::new(2.0 * n.a * (k.cos() - k.signum() * k.sin()), 0.0)
        })
        .unwrap();
    assert!((direct - reference).norm() < 1e-10, "{direct} vs {reference}");
}

#[test]
fn same_type_pairings_vanish_in_the_limit() {
    let st = d8_limit();
    for (j, jp) in [(0, 0), (0, 1), (2, -1)] {
        let ii = self_dual_two_point(st, &SelfDualVector::imaginary_site(j), &SelfDualVector::imaginary_site(jp)).unwrap();
        let rr = self_dual_two_point(st, &SelfDualVector::real_site(j), &SelfDualVector::real_site(jp)).unwrap();
        if j != jp {
            assert!(ii.norm() < 1e-9 && rr.norm() < 1e-9, "{ii} {rr}");
        }
    }
}

#[test]
fn anticommutator_on_same_site() {
    // Ψ(δ_0,0)² = 1, so ω(Ψ Ψ) = 1 for the self-adjoint real-site field.
    let st = d8_limit();
    let v = self_dual_two_point(st, &SelfDualVector::real_site(0), &SelfDualVector::real_site(0)).unwrap();
    assert!((v - 1.0).norm() < 1e-9, "{v}");
}

#[test]
fn pfaffian_matches_toeplitz_and_mixed_block() {
    let st = d8_limit();
    let sym = toeplitz_symbol(st, -6, 4).unwrap();
    for d in 1..=5usize {
        let sites = [0, d as i64];
        let factors = string_factors(&sites).unwrap();
        let skew = string_skew_matrix(st, &factors).unwrap();
        let pf = pfaffian(&skew);
        let tp = toeplitz_correlation(&sym, d).unwrap();
        assert!((pf.re - tp).abs() < 1e-10, "d={d}: {pf} vs {tp}");
        assert!(pf.im.abs() < 1e-9);
        // Mixed block: rows are the Ψ(0,iδ) factors, columns the Ψ(δ,0) factors.
        let mixed = DMatrix::from_fn(d, d, |a, b| {
            if 2 * a < 2 * b + 1 {
                skew.matrix()[(2 * a, 2 * b + 1)]
            } else {
                -skew.matrix()[(2 * b + 1, 2 * a)]
            }
        });
        assert!((determinant(&mixed) - pf).norm() < 1e-9);
    }
}

#[test]
fn spin_correlator_edge_cases() {
    let st = d8_limit();
    assert_eq!(spin_spin_correlation(st, &[3, 3]).unwrap().value, 1.0);
    assert_eq!(spin_spin_correlation(st, &[0, 1, 2]).unwrap().value, 0.0);
    assert_eq!(spin_spin_correlation(st, &[1, 0]), Err(OarError::UnsortedSites));
    let four = spin_spin_correlation(st, &[0, 1, 2, 3]).unwrap();
    assert!(four.value.abs() <= 1.0 && four.imag_residue.abs() < 1e-9);
}

#[test]
fn lattice_ground_state_symbol() {
    // At criticality on the lattice, C_d = −2/(π(2d+1)).
    let c = Couplings::critical(1.0).unwrap();
    let f = make_daubechies_filter(1).unwrap();
    let st = RenormalizedState::new(covariance_lattice(c), &f, 0, &QuadratureSpec::default()).unwrap();
    for d in [-3i64, -1, 0, 2] {
        let v = self_dual_two_point(&st, &SelfDualVector::imaginary_site(d), &SelfDualVector::real_site(0)).unwrap();
        let expected = -2.0 / (std::f64::consts::PI * (2 * d + 1) as f64);
        assert!((v.re - expected).abs() < 1e-7, "d={d}: {v} vs {expected}");
    }
}

#[test]
fn lattice_critical_correlator_follows_the_quarter_power_law() {
    let c = Couplings::critical(1.0).unwrap();
    let f = make_daubechies_filter(1).unwrap();
    // The kernel has a kink at θ = 0, so long lags need a finer grid.
    let spec = QuadratureSpec {
        points: 2048,
        ..QuadratureSpec::default()
    };
    let st = RenormalizedState::new(covariance_lattice(c), &f, 0, &spec).unwrap();
    let sym = toeplitz_symbol(&st, -40, 38).unwrap();
    let pts: Vec<(f64, f64)> = (20..=40).map(|d| (d as f64, toeplitz_correlation(&sym, d).unwrap())).collect();
    let slope = log_log_slope(&pts);
    assert!((slope + 0.25).abs() < 0.01, "{slope}");
}

#[test]
fn self_adjoint_fields_have_hermitian_two_point() {
    // For real (ξ, η), ω(Ψ1 Ψ2) = conj ω(Ψ2 Ψ1).
    let st = d8_limit();
    let v1 = SelfDualVector::new(SmearedVector::delta(0), SmearedVector::delta(1).scale(Complex64::new(0.5, 0.0)));
    let v2 = SelfDualVector::new(SmearedVector::delta(2), SmearedVector::delta(-1));
    let a = self_dual_two_point(st, &v1, &v2).unwrap();
    let b = self_dual_two_point(st, &v2, &v1).unwrap();
    assert!((a - b.conj()).norm() < 1e-10);
}

#[test]
fn pf_squared_is_det_for_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for dim in [2, 4, 6, 8, 10, 16] {
        let m = random_skew(&mut rng, dim);
        let pf = pfaffian(&m);
        let det = determinant(m.matrix());
        assert!((pf * pf - det).norm() <= 1e-10 * det.norm().max(1.0), "dim {dim}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn factorisation_matches_matching_sum(seed in any::<u64>(), half in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_skew(&mut rng, 2 * half);
        let a = pfaffian(&m);
        let b = pfaffian_combinatorial(&m).unwrap();
        prop_assert!((a - b).norm() <= 1e-10 * b.norm().max(1.0));
    }

    #[test]
    fn row_swap_flips_sign(seed in any::<u64>(), half in 2usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_skew(&mut rng, 2 * half);
        let mut a = m.matrix().clone();
        a.swap_rows(0, 1);
        a.swap_columns(0, 1);
        let swapped = SkewMatrix::new(a).unwrap();
        prop_assert!((pfaffian(&m) + pfaffian(&swapped)).norm() < 1e-10);
    }

    #[test]
    fn contraction_is_parity_preserving(mut sites in proptest::collection::vec(-5i64..5, 0..8)) {
        sites.sort();
        let reduced = contract_repeated(&sites).unwrap();
        prop_assert_eq!(reduced.len() % 2, sites.len() % 2);
        prop_assert!(reduced.windows(2).all(|w| w[0] < w[1]));
    }
}
