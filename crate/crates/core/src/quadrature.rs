//! Composite Gauss–Legendre quadrature on panels aligned with the origin.
//!
//! Every integral in the engine is evaluated twice, on a base panel grid and
//! on the grid with halved panels; the fine value is accepted when the two
//! agree to the declared relative tolerance. Panel contributions are summed
//! pairwise in a fixed order, so results do not depend on the number of
//! rayon worker threads.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{OarError, Result};

/// Quadrature configuration shared by all momentum-space integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Gauss–Legendre nodes per panel.
    pub panel_order: usize,
    /// Nodes per unit `2π` interval of the integration variable on the base
    /// grid; the panel width is `2π · panel_order / points`.
    pub points: usize,
    /// Relative tolerance of the node-doubling test.
    pub rel_tol: f64,
    /// Admissible `|ŝ|²` mass outside the truncated limit domain.
    pub tail_tol: f64,
    /// Upper bound on the truncated limit domain `[−K, K]`.
    pub k_max_cap: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            panel_order: 16,
            points: 128,
            rel_tol: 1e-9,
            tail_tol: 1e-10,
            k_max_cap: 512.0 * std::f64::consts::PI,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tail_tol(mut self, tail_tol: f64) -> Self {
        self.tail_tol = tail_tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.panel_order == 0 || self.points < self.panel_order {
            return Err(OarError::InvalidParameter(format!(
                "quadrature needs panel_order >= 1 and points >= panel_order (got {} / {})",
                self.panel_order, self.points
            )));
        }
        if !(self.rel_tol > 0.0 && self.tail_tol > 0.0 && self.k_max_cap > 0.0) {
            return Err(OarError::InvalidParameter(
                "quadrature tolerances and k_max_cap must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Base panel width in the integration variable.
    pub fn panel_width(&self) -> f64 {
        2.0 * std::f64::consts::PI * self.panel_order as f64 / self.points as f64
    }

    pub fn rule(&self) -> GaussLegendre {
        GaussLegendre::new(NonZeroUsize::new(self.panel_order).expect("validated panel order"))
    }
}

/// Sum in a fixed binary-tree order.
pub fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_real(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_real(&xs[..mid]) + pairwise_sum_real(&xs[mid..])
}

/// Nodes and weights of the composite rule on `[−half, half]` with panels of
/// the given width, aligned so that `0` is a panel edge.
pub fn symmetric_nodes(rule: &GaussLegendre, half: f64, width: f64) -> Vec<(f64, f64)> {
    let n = ((half / width) * (1.0 - 1e-12)).ceil().max(1.0) as i64;
    let width = half / n as f64;
    let pairs = rule.as_node_weight_pairs();
    (-n..n)
        .into_par_iter()
        .flat_map_iter(|p| {
            let a = p as f64 * width;
            let mid = a + 0.5 * width;
            pairs
                .iter()
                .map(move |&(x, w)| (mid + 0.5 * width * x, 0.5 * width * w))
        })
        .collect()
}

/// Integrates `f` over `[−half, half]` on the composite grid.
pub fn integrate_symmetric<F>(f: F, half: f64, width: f64, rule: &GaussLegendre) -> Complex64
where
    F: Fn(f64) -> Complex64 + Sync,
{
    let terms: Vec<Complex64> = symmetric_nodes(rule, half, width)
        .par_iter()
        .map(|&(x, w)| f(x) * w)
        .collect();
    pairwise_sum(&terms)
}

/// Accepts `fine` when it agrees with `coarse` relative to `scale`.
pub fn accept(coarse: Complex64, fine: Complex64, scale: f64, rel_tol: f64) -> Result<Complex64> {
    let diff = (fine - coarse).norm();
    if diff <= rel_tol * scale.max(fine.norm()) || diff == 0.0 {
        Ok(fine)
    } else {
        Err(OarError::QuadratureNonConvergence {
            coarse: coarse.norm(),
            fine: fine.norm(),
        })
    }
}

/// `∫_{−half}^{half} f` with the node-doubling test.
pub fn integrate_checked<F>(f: F, half: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    spec.validate()?;
    let rule = spec.rule();
    let w = spec.panel_width();
    let coarse = integrate_symmetric(&f, half, w, &rule);
    let fine = integrate_symmetric(&f, half, 0.5 * w, &rule);
    let scale = integrate_symmetric(|x| Complex64::new(f(x).norm(), 0.0), half, 0.5 * w, &rule).re;
    accept(coarse, fine, scale, spec.rel_tol)
}

/// A finitely supported sequence over `ℤ` with Fourier transform
/// `ξ̂(θ) = Σ_j ξ_j e^{−iθj}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmearedVector {
    pub offset: i64,
    pub coeffs: Vec<Complex64>,
}

impl SmearedVector {
    pub fn new(offset: i64, coeffs: Vec<Complex64>) -> Self {
        Self { offset, coeffs }
    }

    pub fn zero() -> Self {
        Self {
            offset: 0,
            coeffs: Vec::new(),
        }
    }

    /// Kronecker delta at site `j` scaled by `c`.
    pub fn delta_scaled(j: i64, c: Complex64) -> Self {
        Self {
            offset: j,
            coeffs: vec![c],
        }
    }

    pub fn delta(j: i64) -> Self {
        Self::delta_scaled(j, Complex64::new(1.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn get(&self, j: i64) -> Complex64 {
        let i = j - self.offset;
        if i < 0 || i >= self.coeffs.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    /// Sites carrying coefficients, `offset .. offset + len`.
    pub fn range(&self) -> std::ops::Range<i64> {
        self.offset..self.offset + self.coeffs.len() as i64
    }

    pub fn fourier(&self, theta: f64) -> Complex64 {
        if let [c] = self.coeffs[..] {
            return c * Complex64::from_polar(1.0, -theta * self.offset as f64);
        }
        let step = Complex64::from_polar(1.0, -theta);
        let mut phase = Complex64::from_polar(1.0, -theta * self.offset as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        for &c in &self.coeffs {
            acc += c * phase;
            phase *= step;
        }
        acc
    }

    /// `c_n = Σ_j self_j other_{j+n}`, so that
    /// `self̂(−θ) other̂(θ) = ĉ(θ)`.
    pub fn cross_correlation(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let offset = other.offset - self.range().end + 1;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (a, &x) in self.coeffs.iter().enumerate() {
            for (b, &y) in other.coeffs.iter().enumerate() {
                // n = (other.offset + b) − (self.offset + a)
                coeffs[b + self.coeffs.len() - 1 - a] += x * y;
            }
        }
        Self { offset, coeffs }
    }

    pub fn conj(&self) -> Self {
        Self {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, s: Complex64, other: &Self) -> Self {
        if self.coeffs.is_empty() {
            return other.scale(s);
        }
        if other.coeffs.is_empty() {
            return self.clone();
        }
        let lo = self.offset.min(other.offset);
        let hi = self.range().end.max(other.range().end);
        Self {
            offset: lo,
            coeffs: (lo..hi).map(|j| self.get(j) + s * other.get(j)).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `⟨self, other⟩ = Σ_j conj(self_j) other_j`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.range().map(|j| self.get(j).conj() * other.get(j)).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// One quadrature node of a spectral measure: the smearing functions are
/// evaluated at `kappa`, the weight already contains `dx/2π` and the
/// filter product, and `(a, b)` are the kernel densities.
#[derive(Debug, Clone, Copy)]
pub struct SpectralNode {
    pub kappa: f64,
    pub weight: f64,
    pub a: f64,
    pub b: Complex64,
}

/// Selects one of the two independent quasi-free two-point functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// `ω(a(ξ) a†(η))`
    AADag,
    /// `ω(a†(ξ) a†(η))`
    ADagADag,
}

/// A pair of node sets (base and halved panels) representing
/// `ω(a(ξ)a†(η)) = Σ w A conj(ξ̂(κ)) η̂(κ)` and
/// `ω(a†(ξ)a†(η)) = Σ w B ξ̂(−κ) η̂(κ)`.
#[derive(Debug, Clone)]
pub struct SpectralMeasure {
    coarse: Vec<SpectralNode>,
    fine: Vec<SpectralNode>,
    rel_tol: f64,
}

impl SpectralMeasure {
    /// Builds both resolutions on `[−half, half]` with the given base width.
    pub fn build<F>(half: f64, width: f64, spec: &QuadratureSpec, node: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> SpectralNode + Sync,
    {
        spec.validate()?;
        let rule = spec.rule();
        let make = |w: f64| -> Vec<SpectralNode> {
            symmetric_nodes(&rule, half, w)
                .par_iter()
                .map(|&(x, wt)| node(x, wt))
                .collect()
        };
        Ok(Self {
            coarse: make(width),
            fine: make(0.5 * width),
            rel_tol: spec.rel_tol,
        })
    }

    pub fn nodes(&self) -> &[SpectralNode] {
        &self.fine
    }

    fn eval_on(nodes: &[SpectralNode], which: Pairing, lagged: &SmearedVector) -> (Complex64, f64) {
        let terms: Vec<(Complex64, f64)> = nodes
            .par_iter()
            .map(|n| {
                let dens = match which {
                    Pairing::AADag => Complex64::new(n.a, 0.0),
                    Pairing::ADagADag => n.b,
                };
                let v = dens * lagged.fourier(n.kappa) * n.weight;
                (v, v.norm())
            })
            .collect();
        let vals: Vec<Complex64> = terms.iter().map(|t| t.0).collect();
        let abs: Vec<f64> = terms.iter().map(|t| t.1).collect();
        (pairwise_sum(&vals), pairwise_sum_real(&abs))
    }

    /// Two-point value with the doubling test.
    pub fn two_point(&self, which: Pairing, xi: &SmearedVector, eta: &SmearedVector) -> Result<Complex64> {
        // Both integrands are Σ_n c_n e^{−iκn} with c the lagged product of
        // the two sequences, so one transform per node suffices.
        let left = match which {
            Pairing::AADag => xi.conj(),
            Pairing::ADagADag => xi.clone(),
        };
        let lagged = left.cross_correlation(eta);
        let (c, _) = Self::eval_on(&self.coarse, which, &lagged);
        let (f, scale) = Self::eval_on(&self.fine, which, &lagged);
        accept(c, f, scale, self.rel_tol)
    }

    /// `Σ w g(κ)` over the fine nodes for an arbitrary node functional, with
    /// the doubling test.
    pub fn integrate<G>(&self, g: G) -> Result<Complex64>
    where
        G: Fn(&SpectralNode) -> Complex64 + Sync,
    {
        let run = |nodes: &[SpectralNode]| {
            let vals: Vec<Complex64> = nodes.par_iter().map(|n| g(n) * n.weight).collect();
            let abs: Vec<f64> = vals.iter().map(|v| v.norm()).collect();
            (pairwise_sum(&vals), pairwise_sum_real(&abs))
        };
        let (c, _) = run(&self.coarse);
        let (f, scale) = run(&self.fine);
        accept(c, f, scale, self.rel_tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn integrates_trigonometric_polynomial_exactly() {
        let spec = QuadratureSpec::default();
        let v = integrate_checked(|x| Complex64::new(x.cos().powi(2), 0.0), PI, &spec).unwrap();
        assert_abs_diff_eq!(v.re, PI, epsilon = 1e-13);
    }

    #[test]
    fn nodes_avoid_the_origin() {
        let rule = QuadratureSpec::default().rule();
        assert!(symmetric_nodes(&rule, PI, PI / 4.0).iter().all(|&(x, _)| x != 0.0));
    }

    #[test]
    fn kink_at_origin_is_resolved() {
        let spec = QuadratureSpec::default();
        let v = integrate_checked(|x| Complex64::new(x.abs() * x.cos(), 0.0), PI, &spec).unwrap();
        // ∫_{−π}^{π} |x| cos x dx = −4
        assert_abs_diff_eq!(v.re, -4.0, epsilon = 1e-12);
    }

    #[test]
    fn doubling_failure_is_reported() {
        let spec = QuadratureSpec {
            panel_order: 2,
            points: 2,
            ..QuadratureSpec::default()
        };
        let err = integrate_checked(|x| Complex64::new((40.0 * x).cos() + 1.0, 0.0), 8.0 * PI, &spec).unwrap_err();
        assert!(matches!(err, OarError::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn smeared_vector_algebra() {
        let a = SmearedVector::delta(0);
        let b = SmearedVector::delta(2).scale(Complex64::new(0.0, 1.0));
        let s = a.add_scaled(Complex64::new(2.0, 0.0), &b);
        assert_eq!(s.offset, 0);
        assert_eq!(s.get(2), Complex64::new(0.0, 2.0));
        assert_eq!(s.get(1), Complex64::new(0.0, 0.0));
        let th = 0.37;
        assert!((s.fourier(th) - s.fourier(th + 2.0 * PI)).norm() < 1e-14);
        assert_abs_diff_eq!(s.norm_sqr(), 5.0, epsilon = 1e-15);
    }

    #[test]
    fn cross_correlation_multiplies_transforms() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let a = SmearedVector::new(-2, vec![c(1.0, 0.5), c(0.0, -1.0), c(2.0, 0.0)]);
        let b = SmearedVector::new(3, vec![c(0.3, 0.0), c(-1.0, 1.0)]);
        let x = a.cross_correlation(&b);
        for th in [-2.1, 0.0, 0.4, 3.0] {
            assert!((x.fourier(th) - a.fourier(-th) * b.fourier(th)).norm() < 1e-13);
        }
        assert!(a.cross_correlation(&SmearedVector::zero()).is_zero());
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<Complex64> = (0..1000).map(|i| Complex64::new(i as f64, -(i as f64))).collect();
        assert_eq!(pairwise_sum(&xs), Complex64::new(499500.0, -499500.0));
    }
}
