//! Dynamical two-point approximation error of the critical flow and the
//! Sobolev-norm bound `δ(m, T) ≤ 2^{−m} C_T`.
//!
//! In the continuum variable `k` the lattice side of the comparison is
//! `C_∞(2^{−m}k) e^{i 2^m t0 h(2^{−m}k)}` and the continuum side is
//! `C(k) e^{i t0 h^∞(k)}` with `h^∞(k) = 2tk σ_flip`, both weighted by
//! `|ŝ(k)|²/2π` and paired with `(ξ̂₁, η̂₁)^†` on the left and the transform
//! of `(ξ̄₂, η̄₂)` on the right.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlators::SelfDualVector;
use crate::error::{OarError, Result};
use crate::kernels::{covariance_lattice, one_particle_h, z_theta, Couplings, CovarianceKernel, Kernel2};
use crate::quadrature::{accept, integrate_symmetric, QuadratureSpec, SmearedVector};
use crate::rgflow::tail_cutoff;
use crate::wavelet::{Filter, ScalingFunctionFT};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest Sobolev order entering the bound.
pub const MAX_SOBOLEV_ORDER: u32 = 4;

/// A shell-sum growth exponent above this value marks a weighted norm as
/// divergent. Convergence needs the dyadic shell contributions to shrink
/// geometrically, i.e. a strictly negative exponent.
pub const DIVERGENCE_EXPONENT: f64 = -0.05;

/// Number of trailing dyadic shells used to estimate the tail exponent.
const TAIL_SHELLS: usize = 4;

/// `k − 2 sin(k/2)` without cancellation near zero.
fn chord_defect(k: f64) -> f64 {
    let a = k.abs();
    if a < 1e-2 {
        let k3 = a * a * a;
        k3 / 24.0 - k3 * a * a / 1920.0 + k3 * a.powi(4) / 322_560.0
    } else {
        a - 2.0 * (0.5 * a).sin().abs()
    }
}

/// The four expressions whose suprema over `k` enter the bound. The last two
/// depend on `a = 2^{m+1} t0 t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupExpression {
    /// `|k|^{−1} |i(1 − e^{ik}) / (2 sin(k/2)) − 1|`
    KernelPhase,
    /// `|k|^{−2} |1 − cos k|`
    Cosine,
    /// `|k|^{−3} |sin(2a|sin(k/2)|) − sin(a|k|)|`
    SinDifference,
    /// `|k|^{−4} |cos(2a|sin(k/2)|) − cos(a|k|)|`
    CosDifference,
}

impl SupExpression {
    pub const ALL: [SupExpression; 4] = [
        SupExpression::KernelPhase,
        SupExpression::Cosine,
        SupExpression::SinDifference,
        SupExpression::CosDifference,
    ];

    /// Value at `k ≠ 0`, evaluated in a cancellation-free form.
    pub fn eval(self, k: f64, a: f64) -> f64 {
        let ak = k.abs();
        match self {
            // i(1 − e^{ik}) / (2 sin(k/2)) = e^{ik/2}
            SupExpression::KernelPhase => 2.0 * (0.25 * ak).sin().abs() / ak,
            SupExpression::Cosine => 2.0 * (0.5 * ak).sin().powi(2) / (ak * ak),
            SupExpression::SinDifference => {
                let d = a * chord_defect(ak);
                let s = a * ak - 0.5 * d;
                (2.0 * s.cos() * (0.5 * d).sin()).abs() / ak.powi(3)
            }
            SupExpression::CosDifference => {
                let d = a * chord_defect(ak);
                let s = a * ak - 0.5 * d;
                (2.0 * s.sin() * (0.5 * d).sin()).abs() / ak.powi(4)
            }
        }
    }

    /// The value quoted alongside the bound, with `t0t = t0·t`.
    pub fn quoted(self, t0t: f64, m: u32) -> f64 {
        let s = 2f64.powi(m as i32);
        match self {
            SupExpression::KernelPhase | SupExpression::Cosine => 0.5,
            SupExpression::SinDifference => s * (4.0 / 3.0) * t0t.abs(),
            SupExpression::CosDifference => s * s * (8.0 / 3.0) * t0t * t0t,
        }
    }

    /// The exact supremum. Both difference expressions are bounded by their
    /// small-`k` limits `a/24` and `a²/24`, since `|sin x − sin y| ≤ |x − y|`,
    /// `|cos x − cos y| ≤ |x + y||x − y|/2` and `(k − 2 sin(k/2))/k³ ≤ 1/24`.
    pub fn exact(self, t0t: f64, m: u32) -> f64 {
        let a = 2f64.powi(m as i32 + 1) * t0t.abs();
        match self {
            SupExpression::KernelPhase | SupExpression::Cosine => 0.5,
            SupExpression::SinDifference => a / 24.0,
            SupExpression::CosDifference => a * a / 24.0,
        }
    }
}

/// A numerically located supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupConstant {
    pub expression: SupExpression,
    pub value: f64,
    pub argmax: f64,
    pub quoted: f64,
    pub exact: f64,
}

fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..100 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
        if hi - lo < 1e-14 * hi.max(1e-300) {
            break;
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes one expression over `k > 0` (all four are even in `k`) on a
/// grid that is logarithmic towards zero and resolves the oscillation
/// scale `1/a` further out, followed by golden-section refinement around
/// the best grid point.
pub fn sup_constant(expr: SupExpression, t0t: f64, m: u32) -> SupConstant {
    let a = 2f64.powi(m as i32 + 1) * t0t.abs();
    let f = |k: f64| expr.eval(k, a);
    let mut grid: Vec<f64> = (0..=400).map(|i| 10f64.powf(-7.0 + 6.0 * i as f64 / 400.0)).collect();
    let k_far = 40.0;
    let step = (0.01f64).min(0.1 / a.max(1e-12));
    let n = (k_far / step).ceil() as usize;
    grid.extend((1..=n).map(|i| 0.1 + (k_far - 0.1) * i as f64 / n as f64));
    let (mut best_i, mut best) = (0, f(grid[0]));
    for (i, &k) in grid.iter().enumerate() {
        let v = f(k);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = if best_i == 0 { grid[0] * 0.5 } else { grid[best_i - 1] };
    let hi = grid[(best_i + 1).min(grid.len() - 1)];
    let (k_ref, v_ref) = golden_section_max(f, lo, hi);
    let (argmax, value) = if v_ref > best { (k_ref, v_ref) } else { (grid[best_i], best) };
    SupConstant {
        expression: expr,
        value,
        argmax,
        quoted: expr.quoted(t0t, m),
        exact: expr.exact(t0t, m),
    }
}

/// All four suprema at `t0t` and step count `m`.
pub fn sup_constants(t0t: f64, m: u32) -> [SupConstant; 4] {
    SupExpression::ALL.map(|e| sup_constant(e, t0t, m))
}

/// `∥(ξ̂_k, η̂_k)∥²`.
fn pair_norm_sqr(v: &SelfDualVector, k: f64) -> f64 {
    v.xi.fourier(k).norm_sqr() + v.eta.fourier(k).norm_sqr()
}

/// `∫_{−K}^{K} (1 + k²)^order |ŝ(k)|^{2·weight} ∥(ξ̂_k, η̂_k)∥² dk` over the
/// truncated domain, without tail control.
pub fn sobolev_integral_truncated(
    v: &SelfDualVector,
    filter: &Filter,
    weight: f64,
    order: u32,
    k_max: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    let sf = ScalingFunctionFT::new(filter.clone(), 1);
    let g = |k: f64| Complex64::new((1.0 + k * k).powi(order as i32) * sf.power(k).max(0.0).powf(weight) * pair_norm_sqr(v, k), 0.0);
    Ok(integrate_symmetric(g, k_max, 0.5 * spec.panel_width(), &spec.rule()).re)
}

/// Sobolev-type norm `∥ŝ^{weight}(ξ̂, η̂)∥_{H^order}`.
///
/// The integral is accumulated over dyadic shells `2π·2^j ≤ |k| ≤ 2π·2^{j+1}`
/// up to `spec.k_max_cap`. The growth exponent of the last shells decides
/// convergence: a non-negative exponent (within [`DIVERGENCE_EXPONENT`])
/// reports the filter as inadmissible at this order; otherwise the geometric
/// tail beyond the cap is added.
pub fn sobolev_norm(
    v: &SelfDualVector,
    filter: &Filter,
    weight: f64,
    order: u32,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !(1..=MAX_SOBOLEV_ORDER).contains(&order) {
        return Err(OarError::InvalidParameter(format!("Sobolev order must be in 1..=4, got {order}")));
    }
    if !(weight > 0.0 && weight < 1.0) {
        return Err(OarError::InvalidParameter(format!("weight exponent must lie in (0, 1), got {weight}")));
    }
    spec.validate()?;
    if v.xi.is_zero() && v.eta.is_zero() {
        return Ok(0.0);
    }
    let sf = ScalingFunctionFT::new(filter.clone(), 1);
    let rule = spec.rule();
    let width = 0.5 * spec.panel_width();
    let g = |k: f64| (1.0 + k * k).powi(order as i32) * sf.power(k).max(0.0).powf(weight) * pair_norm_sqr(v, k);
    let shell = |lo: f64, hi: f64| {
        // One side, doubled: the integrand is even in k for the norm.
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let pos = integrate_symmetric(|x| Complex64::new(g(mid + x), 0.0), half, width, &rule).re;
        let neg = integrate_symmetric(|x| Complex64::new(g(-mid + x), 0.0), half, width, &rule).re;
        pos + neg
    };
    let mut total = integrate_symmetric(|x| Complex64::new(g(x), 0.0), 2.0 * PI, width, &rule).re;
    let mut shells = Vec::new();
    let mut k = 2.0 * PI;
    while 2.0 * k <= spec.k_max_cap * (1.0 + 1e-12) {
        let s = shell(k, 2.0 * k);
        total += s;
        shells.push(s);
        k *= 2.0;
    }
    let taps = filter.len();
    if shells.len() < TAIL_SHELLS {
        return Err(OarError::InvalidParameter(format!(
            "k_max_cap {} leaves fewer than {TAIL_SHELLS} dyadic shells",
            spec.k_max_cap
        )));
    }
    let last = &shells[shells.len() - TAIL_SHELLS..];
    if last[0] <= 0.0 || last[TAIL_SHELLS - 1] <= 0.0 {
        return Ok(total.sqrt());
    }
    let exponent = (last[TAIL_SHELLS - 1] / last[0]).log2() / (TAIL_SHELLS - 1) as f64;
    if exponent >= DIVERGENCE_EXPONENT {
        return Err(OarError::InadmissibleFilter { taps, order });
    }
    let r = 2f64.powf(exponent);
    total += last[TAIL_SHELLS - 1] * r / (1.0 - r);
    Ok(total.sqrt())
}

/// The four bound terms, each including the overall prefactor
/// `2^{−m}·√2/2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundComponents {
    pub kernel: f64,
    pub cosine: f64,
    pub sin_difference: f64,
    pub cos_difference: f64,
}

impl BoundComponents {
    pub fn total(&self) -> f64 {
        self.kernel + self.cosine + self.sin_difference + self.cos_difference
    }
}

/// Norms `N_k` (orders 1..4) of the left vector with weight `1 − γ` and of
/// the right vector with weight `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    pub left: [f64; 4],
    pub right: [f64; 4],
}

impl NormTable {
    pub fn compute(v1: &SelfDualVector, v2: &SelfDualVector, filter: &Filter, gamma: f64, spec: &QuadratureSpec) -> Result<Self> {
        let mut left = [0.0; 4];
        let mut right = [0.0; 4];
        for order in 1..=MAX_SOBOLEV_ORDER {
            left[order as usize - 1] = sobolev_norm(v1, filter, 1.0 - gamma, order, spec)?;
            right[order as usize - 1] = sobolev_norm(v2, filter, gamma, order, spec)?;
        }
        Ok(Self { left, right })
    }

    /// The table for the swapped pair `(v2, 1 − γ) ↔ (v1, γ)`.
    pub fn swapped(&self) -> Self {
        Self {
            left: self.right,
            right: self.left,
        }
    }
}

/// `2^{−m}(√2/2π)[((√2+1)/(2√2))N₁N₁′ + 2^{−m}(1/2)N₂N₂′
/// + 2^{−m}(4/3)|t0 t|N₃N₃′ + 2^{−m}(8/3)(t0 t)²N₄N₄′]`.
pub fn assemble_bound(m: u32, t0: f64, t: f64, norms: &NormTable) -> BoundComponents {
    let s = 0.5f64.powi(m as i32);
    let pre = s * SQRT_2 / (2.0 * PI);
    let t0t = (t0 * t).abs();
    let p = |i: usize| norms.left[i] * norms.right[i];
    BoundComponents {
        kernel: pre * (SQRT_2 + 1.0) / (2.0 * SQRT_2) * p(0),
        cosine: pre * s * 0.5 * p(1),
        sin_difference: pre * s * (4.0 / 3.0) * t0t * p(2),
        cos_difference: pre * s * (8.0 / 3.0) * t0t * t0t * p(3),
    }
}

/// Certified bound for one grid point.
#[allow(clippy::too_many_arguments)]
pub fn certified_bound(
    m: u32,
    t0: f64,
    t: f64,
    v1: &SelfDualVector,
    v2: &SelfDualVector,
    filter: &Filter,
    gamma: f64,
    spec: &QuadratureSpec,
) -> Result<BoundComponents> {
    let norms = NormTable::compute(v1, v2, filter, gamma, spec)?;
    Ok(assemble_bound(m, t0, t, &norms))
}

/// `e^{iτ h}` for Hermitian `h` with eigenvalues `±ε`: `cos(τε) + i sin(τε) h/ε`.
fn exp_i(h: &Kernel2, tau: f64, eps: f64) -> Kernel2 {
    if eps == 0.0 || tau == 0.0 {
        return Kernel2::identity();
    }
    let c = Complex64::new((tau * eps).cos(), 0.0);
    let s = I * ((tau * eps).sin() / eps);
    Kernel2::identity() * c + h * s
}

/// The 2×2 difference `C_∞(θ)e^{i2^m t0 h(θ)} − C(k)e^{i t0 h^∞(k)}` at
/// `θ = 2^{−m}k`.
pub fn dynamical_kernel_difference(m: u32, t0: f64, t: f64, k: f64) -> Result<Kernel2> {
    let c = Couplings::critical(t)?;
    let scale = 2f64.powi(m as i32);
    let theta = k / scale;
    let lattice = covariance_lattice(c).eval(theta) * exp_i(&one_particle_h(&c, theta), scale * t0, 2.0 * z_theta(&c, theta).norm());
    let flip = Matrix2::new(ZERO, ONE, ONE, ZERO);
    let h_inf = flip * Complex64::new(2.0 * t * k, 0.0);
    let continuum = CovarianceKernel::CriticalLimit.eval(k) * exp_i(&h_inf, t0, 2.0 * t * k.abs());
    Ok(lattice - continuum)
}

fn pair(xi: &SmearedVector, eta: &SmearedVector, k: f64) -> Vector2<Complex64> {
    Vector2::new(xi.fourier(k), eta.fourier(k))
}

/// `|⟨R^m v1, C_∞ e^{i t^{(0)} h} R^m v̄2⟩ − ⟨R^∞ v1, C e^{i t0 h^∞} R^∞ v̄2⟩|`
/// with lattice time `t^{(0)} = 2^m t0` and coupling `t`.
#[allow(clippy::too_many_arguments)]
pub fn empirical_error(
    m: u32,
    t0: f64,
    t: f64,
    v1: &SelfDualVector,
    v2: &SelfDualVector,
    filter: &Filter,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    Couplings::critical(t)?;
    let (k_max, _) = tail_cutoff(filter, spec)?;
    let sf = ScalingFunctionFT::new(filter.clone(), 1);
    let (xi2, eta2) = (v2.xi.conj(), v2.eta.conj());
    let g = |k: f64| -> Complex64 {
        let d = dynamical_kernel_difference(m, t0, t, k).expect("couplings validated");
        let left = pair(&v1.xi, &v1.eta, k);
        let right = pair(&xi2, &eta2, k);
        let val = (left.adjoint() * d * right)[(0, 0)];
        val * (sf.power(k) / (2.0 * PI))
    };
    // The fastest phase, 2 t0 t |k|, is resolved by at least four panels per period.
    let phase_rate = 2.0 * (t0 * t).abs();
    let width = if phase_rate > 0.0 {
        spec.panel_width().min(0.5 * PI / phase_rate)
    } else {
        spec.panel_width()
    };
    let rule = spec.rule();
    let coarse = integrate_symmetric(g, k_max, width, &rule);
    let fine = integrate_symmetric(g, k_max, 0.5 * width, &rule);
    let scale = integrate_symmetric(|k| Complex64::new(g(k).norm(), 0.0), k_max, 0.5 * width, &rule).re;
    accept(coarse, fine, scale, spec.rel_tol).map(|v| v.norm())
}

/// One point of the error-bound sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub m: u32,
    pub t0: f64,
    pub empirical_error: f64,
    /// `None` when a required Sobolev norm diverges.
    pub certified_bound: Option<f64>,
    pub components: Option<BoundComponents>,
}

impl BoundReport {
    /// `Some(true)` when the bound holds up to the quadrature tolerance.
    pub fn holds(&self) -> Option<bool> {
        self.certified_bound.map(|b| self.empirical_error <= b + 1e-8)
    }
}

/// Sweep configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub ms: Vec<u32>,
    pub t0s: Vec<f64>,
    pub t: f64,
    pub gamma: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ms: vec![2, 4, 6, 8],
            t0s: vec![0.0, 0.5, 1.0],
            t: 1.0,
            gamma: 0.5,
        }
    }
}

/// Outcome of a sweep: the reports in `(m, t0)` row-major order and, if the
/// norms are unavailable, the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSweep {
    pub reports: Vec<BoundReport>,
    pub norms: Option<NormTable>,
    pub norm_error: Option<String>,
}

impl BoundSweep {
    /// Number of grid points where the bound is available and violated.
    pub fn violations(&self) -> usize {
        self.reports.iter().filter(|r| r.holds() == Some(false)).count()
    }

    /// `C_T` as the largest `2^m·bound` on the grid.
    pub fn c_t(&self) -> Option<f64> {
        self.reports
            .iter()
            .map(|r| r.certified_bound.map(|b| b * 2f64.powi(r.m as i32)))
            .collect::<Option<Vec<f64>>>()
            .map(|v| v.into_iter().fold(0.0, f64::max))
    }
}

/// Evaluates empirical errors and certified bounds on the grid. Grid points
/// run in parallel; the result order is the grid order.
pub fn bound_sweep(
    cfg: &SweepConfig,
    v1: &SelfDualVector,
    v2: &SelfDualVector,
    filter: &Filter,
    spec: &QuadratureSpec,
) -> Result<BoundSweep> {
    let (norms, norm_error) = match NormTable::compute(v1, v2, filter, cfg.gamma, spec) {
        Ok(n) => (Some(n), None),
        Err(e @ OarError::InadmissibleFilter { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let grid: Vec<(u32, f64)> = cfg.ms.iter().flat_map(|&m| cfg.t0s.iter().map(move |&t0| (m, t0))).collect();
    let reports = grid
        .par_iter()
        .map(|&(m, t0)| {
            let empirical = empirical_error(m, t0, cfg.t, v1, v2, filter, spec)?;
            let components = norms.as_ref().map(|n| assemble_bound(m, t0, cfg.t, n));
            Ok(BoundReport {
                m,
                t0,
                empirical_error: empirical,
                certified_bound: components.map(|c| c.total()),
                components,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundSweep {
        reports,
        norms,
        norm_error,
    })
}

/// Default probe pair `v1 = (δ₀, iδ₀)`, `v2 = (δ₀, −iδ₀)`. The right slot
/// then carries `(ξ̄₂, η̄₂) = v1`, so the compared quantity is the quadratic
/// form `⟨v1, D v1⟩`, whose first-order term in `2^{−m}` does not cancel.
pub fn default_probe() -> (SelfDualVector, SelfDualVector) {
    (
        SelfDualVector::new(SmearedVector::delta(0), SmearedVector::delta_scaled(0, I)),
        SelfDualVector::new(SmearedVector::delta(0), SmearedVector::delta_scaled(0, -I)),
    )
}

/// Least-squares slope of `log₂ error` against `m`.
pub fn log2_rate(points: &[(u32, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log2()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::make_daubechies_filter;

    #[test]
    fn chord_defect_series_matches_direct_form() {
        for k in [0.009f64, 0.0099] {
            let direct = k - 2.0 * (0.5 * k).sin();
            assert!((chord_defect(k) - direct).abs() < 1e-15);
        }
        assert!((chord_defect(1e-3) / 1e-9 - 1.0 / 24.0).abs() < 1e-8);
    }

    #[test]
    fn exponential_is_unitary() {
        let c = Couplings::critical(1.0).unwrap();
        for theta in [-2.0, 0.3, 1.1] {
            let h = one_particle_h(&c, theta);
            let u = exp_i(&h, 3.7, 2.0 * z_theta(&c, theta).norm());
            assert!((u.adjoint() * u - Kernel2::identity()).norm() < 1e-13);
            let by_expm = (h * Complex64::new(0.0, 3.7)).exp();
            assert!((u - by_expm).norm() < 1e-12);
        }
    }

    #[test]
    fn difference_vanishes_at_low_momentum() {
        let d = dynamical_kernel_difference(20, 0.5, 1.0, 0.7).unwrap();
        assert!(d.norm() < 1e-5);
    }

    #[test]
    fn zero_vector_has_zero_norm() {
        let f = make_daubechies_filter(4).unwrap();
        let z = SelfDualVector::new(SmearedVector::zero(), SmearedVector::zero());
        assert_eq!(sobolev_norm(&z, &f, 0.5, 2, &QuadratureSpec::default()).unwrap(), 0.0);
    }
}
