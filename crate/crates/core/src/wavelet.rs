//! Orthonormal low-pass/high-pass filter pairs and their momentum-space
//! transforms.
//!
//! A [`Filter`] holds the real coefficients `h_n` of a compactly supported
//! scaling function. The transfer function is
//! `m0(θ) = 2^{-1/2} Σ_n h_n e^{-iθn}` and the Fourier transform of the
//! scaling function is the infinite product `ŝ(k) = Π_{n≥1} m0(2^{-n} k)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::error::{OarError, Result};

/// Tolerance applied when validating the filter invariants.
pub const FILTER_TOLERANCE: f64 = 1e-12;

/// Largest supported Daubechies vanishing-moment order.
pub const MAX_DAUBECHIES_ORDER: usize = 10;

/// Real low-pass filter `h_n`, `n = support_offset .. support_offset + len`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "FilterData", into = "FilterData")]
pub struct Filter {
    coeffs: Vec<f64>,
    order: usize,
    support_offset: i64,
    /// Autocorrelation `a_d = Σ_n h_n h_{n+d}` for `d = 0 .. len`.
    autocorr: Vec<f64>,
    /// Coefficients of `P(y)` when `|m0|² = (1 − y)^p P(y)` with
    /// `y = sin²(θ/2)` and `p = order`, as for every Daubechies-type filter.
    power_factor: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct FilterData {
    coeffs: Vec<f64>,
    order: usize,
    support_offset: i64,
}

impl From<FilterData> for Filter {
    fn from(d: FilterData) -> Self {
        Filter::new_unchecked(d.coeffs, d.order, d.support_offset)
    }
}

impl From<Filter> for FilterData {
    fn from(f: Filter) -> Self {
        FilterData {
            coeffs: f.coeffs,
            order: f.order,
            support_offset: f.support_offset,
        }
    }
}

/// `|m0|²` from the cosine series of the autocorrelation.
fn cosine_series(autocorr: &[f64], theta: f64) -> f64 {
    let c = theta.cos();
    let mut prev = 1.0;
    let mut cur = c;
    let mut acc = 0.5 * autocorr[0];
    for &a in &autocorr[1..] {
        acc += a * cur;
        let next = 2.0 * c * cur - prev;
        prev = cur;
        cur = next;
    }
    acc
}

fn factored_power(p: usize, poly: &[f64], theta: f64) -> f64 {
    let y = (0.5 * theta).sin().powi(2);
    let q = poly.iter().rev().fold(0.0, |acc, &c| acc * y + c);
    (0.5 * theta).cos().powi(2 * p as i32) * q
}

/// `P(y) = Σ_{k<p} C(p−1+k, k) y^k` if it reproduces `|m0|²` of the given
/// autocorrelation away from `θ = π`.
fn detect_power_factor(autocorr: &[f64], p: usize) -> Option<Vec<f64>> {
    if p == 0 || p > MAX_DAUBECHIES_ORDER || autocorr.len() != 2 * p {
        return None;
    }
    let poly: Vec<f64> = (0..p).map(|k| binomial(p - 1 + k, k)).collect();
    let agrees = (0..=24).all(|i| {
        let theta = 2.5 * i as f64 / 24.0;
        (cosine_series(autocorr, theta) - factored_power(p, &poly, theta)).abs() < 1e-12
    });
    agrees.then_some(poly)
}

impl Filter {
    /// Wraps raw coefficients after checking `Σ h = √2` and the
    /// quadrature-mirror orthonormality `Σ h_n h_{n+2k} = δ_{k0}`.
    pub fn new(coeffs: Vec<f64>, order: usize, support_offset: i64) -> Result<Self> {
        let filter = Self::new_unchecked(coeffs, order, support_offset);
        filter.check_invariants()?;
        Ok(filter)
    }

    /// Wraps coefficients without validation. Used to feed deliberately
    /// corrupted filters to the verification suites.
    pub fn new_unchecked(coeffs: Vec<f64>, order: usize, support_offset: i64) -> Self {
        let autocorr = (0..coeffs.len())
            .map(|d| {
                coeffs
                    .iter()
                    .zip(coeffs.iter().skip(d))
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect::<Vec<f64>>();
        let power_factor = detect_power_factor(&autocorr, order);
        Self {
            coeffs,
            order,
            support_offset,
            autocorr,
            power_factor,
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Number of vanishing moments `p`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn support_offset(&self) -> i64 {
        self.support_offset
    }

    /// Number of taps `2N`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Short label such as `D8` (number of taps).
    pub fn label(&self) -> String {
        format!("D{}", self.coeffs.len())
    }

    /// Coefficient `h_n` with `n` an absolute index (zero outside the support).
    pub fn h(&self, n: i64) -> f64 {
        let i = n - self.support_offset;
        if i < 0 || i >= self.coeffs.len() as i64 {
            0.0
        } else {
            self.coeffs[i as usize]
        }
    }

    /// Checks both filter invariants and reports the first violation.
    pub fn check_invariants(&self) -> Result<()> {
        let sum: f64 = self.coeffs.iter().sum();
        let dev = (sum - SQRT_2).abs();
        if !(dev <= FILTER_TOLERANCE) {
            return Err(OarError::FilterInvariant {
                invariant: "sum of coefficients equals sqrt(2)",
                deviation: dev,
            });
        }
        let worst = (0..self.coeffs.len())
            .step_by(2)
            .map(|d| {
                let target = if d == 0 { 1.0 } else { 0.0 };
                (self.autocorr[d] - target).abs()
            })
            .fold(0.0_f64, f64::max);
        if !(worst <= FILTER_TOLERANCE) {
            return Err(OarError::FilterInvariant {
                invariant: "quadrature-mirror orthonormality",
                deviation: worst,
            });
        }
        Ok(())
    }

    /// First moment `μ1 = 2^{-1/2} Σ n h_n`, so that `m0(θ) = 1 − iμ1θ + O(θ²)`.
    pub fn first_moment(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, h)| (i as i64 + self.support_offset) as f64 * h)
            .sum::<f64>()
            / SQRT_2
    }

    /// `|m0(θ)|² = a_0/2 + Σ_{d≥1} a_d cos(dθ)`. Daubechies-type filters use
    /// the factored form `cos^{2p}(θ/2) P(sin²(θ/2))`, which keeps full
    /// relative accuracy near the zero at `θ = π`; other filters use the
    /// cosine series with the Chebyshev recurrence.
    pub fn m0_power(&self, theta: f64) -> f64 {
        match &self.power_factor {
            Some(poly) => factored_power(self.order, poly, theta),
            None => cosine_series(&self.autocorr, theta),
        }
    }

    /// True when `|m0|²` is evaluated in factored form.
    pub fn has_factored_power(&self) -> bool {
        self.power_factor.is_some()
    }
}

/// Transfer function `m0(θ) = 2^{-1/2} Σ_n h_n e^{-iθn}`.
pub fn m0(f: &Filter, theta: f64) -> Complex64 {
    let step = Complex64::from_polar(1.0, -theta);
    let mut phase = Complex64::from_polar(1.0, -theta * f.support_offset as f64);
    let mut acc = Complex64::new(0.0, 0.0);
    for &h in &f.coeffs {
        acc += phase * h;
        phase *= step;
    }
    acc / SQRT_2
}

/// Daubechies filter with `p` vanishing moments (`2p` taps), obtained by
/// spectral factorisation of `P(y) = Σ_{k<p} C(p−1+k, k) y^k`.
///
/// Each root `y` of `P` yields the root `z` with `|z| < 1` of
/// `z² − (2 − 4y)z + 1 = 0`; the filter is the coefficient list of
/// `(1 + z)^p Π (z − z_i)`, normalised to `Σ h = √2`.
pub fn make_daubechies_filter(p: usize) -> Result<Filter> {
    if p == 0 || p > MAX_DAUBECHIES_ORDER {
        return Err(OarError::UnsupportedOrder(p));
    }
    let poly: Vec<f64> = (0..p).map(|k| binomial(p - 1 + k, k)).collect();
    let y_roots = polynomial_roots(&poly);

    // Coefficients are kept highest power first.
    let mut h = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..p {
        h = multiply_monic(&h, Complex64::new(-1.0, 0.0));
    }
    for y in y_roots {
        let b = Complex64::new(2.0, 0.0) - 4.0 * y;
        let disc = (b * b - 4.0).sqrt();
        let z1 = (b + disc) / 2.0;
        let z2 = (b - disc) / 2.0;
        let z = if z1.norm() < z2.norm() { z1 } else { z2 };
        h = multiply_monic(&h, z);
    }
    let real: Vec<f64> = h.iter().map(|c| c.re).collect();
    let sum: f64 = real.iter().sum();
    let coeffs = real.iter().map(|c| c * SQRT_2 / sum).collect();
    Filter::new(coeffs, p, 0)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Multiplies a polynomial (highest power first) by `(x − root)`.
fn multiply_monic(poly: &[Complex64], root: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
    for (i, &c) in poly.iter().enumerate() {
        out[i] += c;
        out[i + 1] -= c * root;
    }
    out
}

/// Roots of `Σ_k c_k y^k` (lowest power first) from the companion matrix,
/// refined by a few Newton steps.
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let mut companion = DMatrix::<f64>::zeros(deg, deg);
    for i in 1..deg {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..deg {
        companion[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let eval = |y: Complex64| {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            dv = dv * y + v;
            v = v * y + c;
        }
        (v, dv)
    };
    companion
        .complex_eigenvalues()
        .iter()
        .map(|&root| {
            let mut y = root;
            for _ in 0..8 {
                let (v, dv) = eval(y);
                if dv.norm() == 0.0 {
                    break;
                }
                y -= v / dv;
            }
            y
        })
        .collect()
}

/// High-pass partner `g_n = (−1)^n h_{−n+1+2N}`, supported on
/// `n = 2 .. 2N+1` for a filter supported on `0 .. 2N−1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighPassFilter {
    coeffs: Vec<f64>,
    support_offset: i64,
    parent: Filter,
}

impl HighPassFilter {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn support_offset(&self) -> i64 {
        self.support_offset
    }

    pub fn parent(&self) -> &Filter {
        &self.parent
    }

    /// Coefficient `g_n` at absolute index `n`.
    pub fn g(&self, n: i64) -> f64 {
        let i = n - self.support_offset;
        if i < 0 || i >= self.coeffs.len() as i64 {
            0.0
        } else {
            self.coeffs[i as usize]
        }
    }
}

pub fn high_pass(f: &Filter) -> HighPassFilter {
    let taps = f.len() as i64;
    let start = 2 - f.support_offset();
    let coeffs = (0..taps)
        .map(|i| {
            let n = start + i;
            let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            sign * f.h(-n + 1 + taps)
        })
        .collect();
    HighPassFilter {
        coeffs,
        support_offset: start,
        parent: f.clone(),
    }
}

/// Scaling-function transform `ŝ(k)` by a truncated product.
#[derive(Debug, Clone)]
pub struct ScalingFunctionFT {
    filter: Filter,
    truncation_depth: u32,
    first_moment: f64,
}

/// Products stop once `2^{-P}|k|` drops below this threshold.
const TRUNCATION_SCALE: f64 = 1e-8;

impl ScalingFunctionFT {
    pub fn new(filter: Filter, truncation_depth: u32) -> Self {
        let first_moment = filter.first_moment();
        Self {
            filter,
            truncation_depth: truncation_depth.max(1),
            first_moment,
        }
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    /// Depth `P ≥ truncation_depth` with `2^{-P}|k| < 1e-8`.
    pub fn depth_for(&self, k: f64) -> u32 {
        let mut p = self.truncation_depth;
        while (k.abs() * 0.5f64.powi(p as i32)) >= TRUNCATION_SCALE {
            p += 1;
        }
        p
    }

    /// `ŝ(k) ≈ Π_{n=1}^{P} m0(2^{-n}k) · (1 − iμ1 2^{-P}k)`.
    pub fn value(&self, k: f64) -> Complex64 {
        let p = self.depth_for(k);
        let mut acc = Complex64::new(1.0, 0.0);
        let mut arg = k;
        for _ in 0..p {
            arg *= 0.5;
            acc *= m0(&self.filter, arg);
        }
        acc * Complex64::new(1.0, -self.first_moment * arg)
    }

    /// `|ŝ(k)|²` from the real factors `|m0|²`.
    pub fn power(&self, k: f64) -> f64 {
        let p = self.depth_for(k);
        let mut acc = 1.0;
        let mut arg = k;
        for _ in 0..p {
            arg *= 0.5;
            acc *= self.filter.m0_power(arg);
        }
        acc * (1.0 + (self.first_moment * arg).powi(2))
    }
}

/// Finite product `Π_{n=1}^{m} |m0(2^{-n}k)|²`.
pub fn partial_product_power(f: &Filter, m: u32, k: f64) -> f64 {
    let mut acc = 1.0;
    let mut arg = k;
    for _ in 0..m {
        arg *= 0.5;
        acc *= f.m0_power(arg);
    }
    acc
}

/// Finite complex product `Π_{n=1}^{m} m0(2^{-n}k)`.
pub fn partial_product(f: &Filter, m: u32, k: f64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut arg = k;
    for _ in 0..m {
        arg *= 0.5;
        acc *= m0(f, arg);
    }
    acc
}

/// Rows `(n, h_n, g_n)` over the union of both supports, for CSV export.
pub fn filter_table(f: &Filter) -> Vec<(i64, f64, f64)> {
    let g = high_pass(f);
    let lo = f.support_offset().min(g.support_offset());
    let hi = (f.support_offset() + f.len() as i64).max(g.support_offset() + g.coeffs().len() as i64);
    (lo..hi).map(|n| (n, f.h(n), g.g(n))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn haar_is_two_equal_taps() {
        let f = make_daubechies_filter(1).unwrap();
        assert_eq!(f.len(), 2);
        for &h in f.coeffs() {
            assert_abs_diff_eq!(h, 1.0 / SQRT_2, epsilon = 1e-15);
        }
    }

    #[test]
    fn d4_matches_closed_form() {
        // h = (1+√3, 3+√3, 3−√3, 1−√3) / (4√2)
        let s3 = 3f64.sqrt();
        let expected = [1.0 + s3, 3.0 + s3, 3.0 - s3, 1.0 - s3].map(|x| x / (4.0 * SQRT_2));
        let f = make_daubechies_filter(2).unwrap();
        for (a, b) in f.coeffs().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn all_orders_satisfy_invariants() {
        for p in 1..=MAX_DAUBECHIES_ORDER {
            let f = make_daubechies_filter(p).unwrap();
            assert_eq!(f.len(), 2 * p);
            f.check_invariants().unwrap();
        }
    }

    #[test]
    fn vanishing_moments() {
        // Σ (−1)^n n^j h_n = 0 for j < p.
        for p in 1..=MAX_DAUBECHIES_ORDER {
            let f = make_daubechies_filter(p).unwrap();
            for j in 0..p as i32 {
                let s: f64 = f
                    .coeffs()
                    .iter()
                    .enumerate()
                    .map(|(n, h)| if n % 2 == 0 { 1.0 } else { -1.0 } * (n as f64).powi(j) * h)
                    .sum();
                let scale: f64 = f.coeffs().iter().enumerate().map(|(n, h)| (n as f64).powi(j) * h.abs()).sum();
                assert!(s.abs() < 1e-10 * scale.max(1.0), "p={p} j={j} s={s}");
            }
        }
    }

    #[test]
    fn unsupported_orders_are_rejected() {
        assert_eq!(make_daubechies_filter(0), Err(OarError::UnsupportedOrder(0)));
        assert_eq!(make_daubechies_filter(11), Err(OarError::UnsupportedOrder(11)));
    }

    #[test]
    fn corrupted_filter_is_rejected() {
        let err = Filter::new(vec![0.7, 0.7], 1, 0).unwrap_err();
        assert!(matches!(err, OarError::FilterInvariant { .. }));
    }

    #[test]
    fn high_pass_haar() {
        let g = high_pass(&make_daubechies_filter(1).unwrap());
        assert_eq!(g.support_offset(), 2);
        assert_abs_diff_eq!(g.coeffs()[0], 1.0 / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(g.coeffs()[1], -1.0 / SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn m0_values() {
        let haar = make_daubechies_filter(1).unwrap();
        assert!(m0(&haar, std::f64::consts::PI).norm() < 1e-15);
        for p in 1..=MAX_DAUBECHIES_ORDER {
            let f = make_daubechies_filter(p).unwrap();
            assert_abs_diff_eq!(m0(&f, 0.0).re, 1.0, epsilon = 1e-13);
            let t = 0.7;
            let qmf = m0(&f, t).norm_sqr() + m0(&f, t + std::f64::consts::PI).norm_sqr();
            assert_abs_diff_eq!(qmf, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(f.m0_power(t), m0(&f, t).norm_sqr(), epsilon = 1e-13);
        }
    }

    #[test]
    fn haar_scaling_transform_closed_form() {
        let sf = ScalingFunctionFT::new(make_daubechies_filter(1).unwrap(), 1);
        let k = 2.0_f64;
        let closed = ((k / 2.0).sin() / (k / 2.0)).powi(2);
        assert_abs_diff_eq!(sf.value(k).norm_sqr(), closed, epsilon = 1e-8);
        assert_abs_diff_eq!(sf.power(k), closed, epsilon = 1e-8);
        assert_abs_diff_eq!(sf.value(0.0).re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn d4_decays_at_dyadic_multiples() {
        let sf = ScalingFunctionFT::new(make_daubechies_filter(2).unwrap(), 1);
        assert!(sf.value(4.0 * std::f64::consts::PI).norm() < 1e-3);
    }

    #[test]
    fn filter_table_covers_both_supports() {
        let f = make_daubechies_filter(2).unwrap();
        let t = filter_table(&f);
        assert_eq!(t.first().unwrap().0, 0);
        assert_eq!(t.last().unwrap().0, 5);
    }
}
