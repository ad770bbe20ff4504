//! Acceptance run: one PASS/FAIL line per criterion, with the measured
//! numbers and wall time. Criteria that are known not to hold print FAIL
//! like any other; set `OAR_ACCEPTANCE_STRICT=1` to turn any failure into a
//! non-zero exit status.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use oar_core::correlators::{
    determinant, log_log_slope, pfaffian, pfaffian_combinatorial, spin_spin_correlation, toeplitz_correlation,
    toeplitz_symbol, SkewMatrix,
};
use oar_core::errorbounds::{
    bound_sweep, default_probe, empirical_error, log2_rate, sup_constants, SupExpression, SweepConfig,
};
use oar_core::kernels::{covariance_lattice, Couplings, InverseTemperature};
use oar_core::lattice_oracle::{
    disentangler_unitary, max_abs_diff, partition_function_transfer, trace_product, trotter_error, BondHistogram,
    CoarseGraining, DenseOperator, LatticeSpec,
};
use oar_core::quadrature::{Pairing, QuadratureSpec, SmearedVector};
use oar_core::rgflow::{
    classify_flow, massive_scaling_couplings, massive_thermal_two_point, renormalized_two_point, FlowClass,
    LimitState, RenormalizedState, TwoPointState,
};
use oar_core::wavelet::{make_daubechies_filter, Filter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn daubechies(taps: usize) -> Filter {
    make_daubechies_filter(taps / 2).unwrap()
}

fn random_c(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

fn ac1() -> Outcome {
    let mut worst = 0.0f64;
    let mut shapes = 0;
    for m in 1..=6usize {
        for n in 1..=6usize {
            if 4 * m * n > 24 || m > 4 {
                continue;
            }
            shapes += 1;
            let hist = BondHistogram::enumerate(m, n).unwrap();
            for k in [0.1, 0.4407, 1.0] {
                let spec = LatticeSpec::new(m, n, k, k).unwrap();
                let zb = hist.partition_function(k, k);
                let zt = partition_function_transfer(&spec).unwrap();
                worst = worst.max((zb - zt).abs() / zb);
            }
        }
    }
    Outcome::new(worst < 1e-12, format!("{shapes} shapes × 3 couplings, max relative error {worst:.2e} (< 1e-12)"))
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> DenseOperator {
    let g = DMatrix::from_fn(dim, dim, |_, _| random_c(rng));
    let rho = &g * g.adjoint();
    let t = rho.trace();
    rho / t
}

fn ac2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut unit, mut tp, mut dual) = (0.0f64, 0.0f64, 0.0f64);
    for taps in [2, 4] {
        let f = daubechies(taps);
        for half in [2usize, 4] {
            let u = disentangler_unitary(&f, half).unwrap();
            unit = unit.max(max_abs_diff(&(u.adjoint() * &u), &DenseOperator::identity(u.nrows(), u.ncols())));
            let cg = CoarseGraining::new(&f, 2 * half).unwrap();
            for _ in 0..20 {
                let rho = random_state(&mut rng, 1 << (2 * half));
                let out = cg.apply(&rho).unwrap();
                tp = tp.max((out.trace() - 1.0).norm());
                let a = DMatrix::from_fn(1 << half, 1 << half, |_, _| random_c(&mut rng));
                dual = dual.max((trace_product(&out, &a) - trace_product(&rho, &cg.dual(&a).unwrap())).norm());
            }
        }
    }
    Outcome::new(
        unit < 1e-12 && tp < 1e-13 && dual < 1e-11,
        format!("Haar, D4 on 4 and 8 sites: ‖U†U − I‖ {unit:.1e} (< 1e-12), trace {tp:.1e} (< 1e-13), duality {dual:.1e} (< 1e-11)"),
    )
}

fn ac3() -> Outcome {
    let x = SmearedVector::delta(0);
    let crit = covariance_lattice(Couplings::critical(1.0).unwrap());
    let mut passed = true;
    let mut parts = Vec::new();
    for (taps, tail) in [(4, 1e-5), (8, QuadratureSpec::default().tail_tol)] {
        let f = daubechies(taps);
        let spec = QuadratureSpec::default().with_tail_tol(tail);
        let limit = LimitState::critical(&f, &spec).unwrap().two_point(Pairing::AADag, &x, &x).unwrap();
        let errs: Vec<(u32, f64)> = [4u32, 6, 8, 10]
            .iter()
            .map(|&m| {
                let v = RenormalizedState::new(crit, &f, m, &spec).unwrap().two_point(Pairing::AADag, &x, &x).unwrap();
                (m, (v - limit).norm())
            })
            .collect();
        let monotone = errs.windows(2).all(|w| w[1].1 < w[0].1);
        let slope = log2_rate(&errs);
        let last = errs.last().unwrap().1;
        passed &= monotone && (slope + 1.0).abs() <= 0.3 && last < 1e-3;
        parts.push(format!(
            "D{taps}: errors {} slope {slope:.3} (−1 ± 0.3), m = 10 {last:.2e} (< 1e-3)",
            errs.iter().map(|e| format!("{:.2e}", e.1)).collect::<Vec<_>>().join(" ")
        ));
    }
    Outcome::new(passed, parts.join("; "))
}

fn ac4() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for t0t in [0.25, 1.0] {
        for s in sup_constants(t0t, 0) {
            let tol = match s.expression {
                SupExpression::KernelPhase | SupExpression::Cosine => 1e-6,
                _ => 1e-4,
            };
            let dev = (s.value - s.quoted).abs();
            if dev > tol {
                passed = false;
                parts.push(format!("{:?} at t0·t = {t0t}: sup {:.6} vs {:.6}", s.expression, s.value, s.quoted));
            }
        }
    }
    if parts.is_empty() {
        parts.push("all four constants reproduced at t0·t ∈ {0.25, 1}".into());
    }
    Outcome::new(passed, parts.join("; "))
}

fn ac5() -> Outcome {
    let f = daubechies(8);
    let spec = QuadratureSpec::default();
    let (v1, v2) = default_probe();
    let sweep = bound_sweep(&SweepConfig::default(), &v1, &v2, &f, &spec).unwrap();
    let bound_part = match &sweep.norm_error {
        Some(e) => format!("certified bound unavailable ({e})"),
        None => format!("{} violations on {} grid points", sweep.violations(), sweep.reports.len()),
    };
    let bound_ok = sweep.norm_error.is_none() && sweep.violations() == 0;
    let points: Vec<(u32, f64)> = (5..=10u32)
        .map(|m| (m, empirical_error(m, 0.5, 1.0, &v1, &v2, &f, &spec).unwrap()))
        .collect();
    let slope = log2_rate(&points);
    let rate_ok = (slope + 1.0).abs() <= 0.2;
    Outcome::new(bound_ok && rate_ok, format!("{bound_part}; decay slope {slope:.3} over m = 5..10 (−1 ± 0.2)"))
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut pf_dev, mut det_dev) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let dim = 2 * (1 + i % 4);
        let a = SkewMatrix::from_upper(dim, |_, _| Ok(random_c(&mut rng))).unwrap();
        let p = pfaffian(&a);
        let c = pfaffian_combinatorial(&a).unwrap();
        pf_dev = pf_dev.max((p - c).norm() / c.norm());
        let d = determinant(a.matrix());
        det_dev = det_dev.max((p * p - d).norm() / d.norm());
    }
    Outcome::new(
        pf_dev < 1e-10 && det_dev < 1e-10,
        format!("100 matrices, dims 2–8: paths differ by {pf_dev:.1e}, |Pf² − det| {det_dev:.1e} (relative, < 1e-10)"),
    )
}

fn ac7() -> Outcome {
    let f = daubechies(8);
    let limit = LimitState::critical(&f, &QuadratureSpec::default()).unwrap();
    let sym = toeplitz_symbol(&limit, -12, 10).unwrap();
    let (mut tz, mut imag, mut range) = (0.0f64, 0.0f64, 0.0f64);
    let mut fit = Vec::new();
    for d in 1..=12usize {
        let c = spin_spin_correlation(&limit, &[0, d as i64]).unwrap();
        if d <= 10 {
            tz = tz.max((c.value - toeplitz_correlation(&sym, d).unwrap()).abs());
        }
        imag = imag.max(c.imag_residue.abs());
        range = range.max(c.value.abs() - 1.0);
        if d >= 6 {
            fit.push((d as f64, c.value));
        }
    }
    let odd = [vec![0], vec![0, 1, 3], vec![-2, 0, 1, 4, 5]]
        .iter()
        .all(|s| spin_spin_correlation(&limit, s).map(|c| c.value == 0.0 && c.imag_residue == 0.0).unwrap());
    let slope = log_log_slope(&fit);
    let structural = tz < 1e-10 && odd && imag < 1e-9 && range <= 0.0;
    let exponent = (slope + 0.25).abs() <= 0.05;
    Outcome::new(
        structural && exponent,
        format!(
            "Pf vs Toeplitz {tz:.1e} (< 1e-10), odd vanish {odd}, imag {imag:.1e} (< 1e-9), in [−1, 1] {}; \
             fitted exponent over d = 6..12 is {slope:.3} (−0.25 ± 0.05)",
            range <= 0.0
        ),
    )
}

fn ac8() -> Outcome {
    let inf = InverseTemperature::Infinite;
    let mut passed = true;
    let mut parts = Vec::new();
    for (t1, t3, expect, check_distance) in [
        (1.0, 0.5, FlowClass::DisorderFixedPoint, true),
        (0.5, 1.0, FlowClass::OrderFixedPoint, true),
        (1.0, 1.0, FlowClass::Critical, false),
    ] {
        let c = classify_flow(&Couplings::new(t1, t3, inf).unwrap()).unwrap();
        let d12 = c.distances.iter().find(|(m, _)| *m == 12).map(|d| d.1).unwrap_or(f64::NAN);
        let ok = c.class == expect && (!check_distance || d12 < 1e-4);
        passed &= ok;
        if check_distance {
            parts.push(format!("({t1}, {t3}) → {:?}, m = 12 distance {d12:.2e}", c.class));
        } else {
            parts.push(format!("({t1}, {t3}) → {:?}", c.class));
        }
    }
    Outcome::new(passed, parts.join("; "))
}

fn ac9() -> Outcome {
    let errs: Vec<f64> = [8, 16, 32, 64].iter().map(|&n| trotter_error(2, 1.0, 1.0, 1.0, n).unwrap()).collect();
    Outcome::new(
        errs.windows(2).all(|w| w[1] < w[0]),
        format!("N = 8, 16, 32, 64: {}", errs.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(" ")),
    )
}

fn ac10() -> Outcome {
    let f = daubechies(8);
    let spec = QuadratureSpec::default();
    let (x, y) = (SmearedVector::delta(0), SmearedVector::delta(1));
    let (mu0, beta0, t) = (0.7, InverseTemperature::Finite(2.0), 1.0);
    let mut passed = true;
    let mut parts = Vec::new();
    for which in [Pairing::AADag, Pairing::ADagADag] {
        let target = massive_thermal_two_point(&f, mu0, beta0, t, &x, &y, which, &spec).unwrap();
        let errs: Vec<f64> = [4, 6, 8]
            .iter()
            .map(|&m| {
                let c = massive_scaling_couplings(mu0, beta0, t, m).unwrap();
                (renormalized_two_point(covariance_lattice(c), &f, m, &x, &y, which, &spec).unwrap() - target).norm()
            })
            .collect();
        passed &= errs.windows(2).all(|w| w[1] < w[0]) && errs[2] < 1e-2;
        parts.push(format!(
            "{which:?} errors at m = 4, 6, 8: {}",
            errs.iter().map(|e| format!("{e:.2e}")).collect::<Vec<_>>().join(" ")
        ));
    }
    Outcome::new(passed, format!("D8, μ0 = 0.7, β0 = 2: {} (final < 1e-2)", parts.join("; ")))
}

fn main() {
    type Criterion = (&'static str, &'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("AC1", "transfer-matrix trace equals brute-force Z", Duration::from_secs(1), ac1),
        ("AC2", "coarse-graining channel", Duration::from_secs(10), ac2),
        ("AC3", "critical fixed-point convergence", Duration::from_secs(30), ac3),
        ("AC4", "sup-constant identities", Duration::from_secs(5), ac4),
        ("AC5", "error-bound theorem", Duration::from_secs(120), ac5),
        ("AC6", "Pfaffian machinery", Duration::from_secs(5), ac6),
        ("AC7", "spin-correlator consistency", Duration::from_secs(120), ac7),
        ("AC8", "instability classification", Duration::from_secs(30), ac8),
        ("AC9", "Trotter convergence", Duration::from_secs(10), ac9),
        ("AC10", "massive/thermal scaling limit", Duration::from_secs(60), ac10),
    ];
    let mut failed = Vec::new();
    for (id, title, budget, run) in criteria {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = out.passed && in_time;
        println!(
            "{} {id} {title}: {} [{:.2} s, limit {} s{}]",
            if passed { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            budget.as_secs(),
            if in_time { "" } else { ", over time" }
        );
        if !passed {
            failed.push(id);
        }
    }
    println!("acceptance: {} of 10 passed{}", 10 - failed.len(), if failed.is_empty() { String::new() } else { format!("; failing {}", failed.join(", ")) });
    if !failed.is_empty() && std::env::var_os("OAR_ACCEPTANCE_STRICT").is_some_and(|v| v == "1") {
        std::process::exit(1);
    }
}

