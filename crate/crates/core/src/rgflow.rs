//! Renormalized quasi-free two-point functions and their scaling limits.
//!
//! After `m` steps of the wavelet RG the two-point functions of a lattice
//! KMS state are
//!
//! ```text
//! ω^(m)(a(ξ)a†(η))  = (1/2π) ∫_{−π}^{π} dθ A(θ) 2^m Π_{n<m}|m0(2^nθ)|² conj(ξ̂(2^mθ)) η̂(2^mθ)
//! ω^(m)(a†(ξ)a†(η)) = (1/2π) ∫_{−π}^{π} dθ B(θ) 2^m Π_{n<m}|m0(2^nθ)|² ξ̂(−2^mθ) η̂(2^mθ)
//! ```
//!
//! with `(A, B)` the kernel densities of [`CovarianceKernel::densities`].
//! Substituting `k = 2^mθ` gives the equivalent k-form, whose `m → ∞` limit
//! replaces the finite product by `|ŝ(k)|²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OarError, Result};
use crate::kernels::{Couplings, CovarianceKernel, InverseTemperature, Kernel2};
use crate::quadrature::{Pairing, QuadratureSpec, SmearedVector, SpectralMeasure, SpectralNode};
use crate::wavelet::{partial_product_power, Filter, ScalingFunctionFT};

/// Below this step count the θ-form is integrated directly.
pub const K_FORM_THRESHOLD: u32 = 6;

/// Anything that provides the two independent quasi-free two-point values.
pub trait TwoPointState: Sync {
    fn two_point(&self, which: Pairing, xi: &SmearedVector, eta: &SmearedVector) -> Result<Complex64>;

    /// Short description used in exported tables.
    fn kind(&self) -> String;

    /// Whether values are unchanged when both smearings are shifted by the
    /// same number of sites. Correlator code reuses entries when this holds.
    fn translation_invariant(&self) -> bool {
        false
    }
}

/// Integration variable used for a finite-`m` state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Theta,
    K,
    Auto,
}

/// `ω^(m) = ω ∘ α^m` for a lattice kernel.
#[derive(Debug, Clone)]
pub struct RenormalizedState {
    base: CovarianceKernel,
    filter: Filter,
    m: u32,
    measure: SpectralMeasure,
}

impl RenormalizedState {
    pub fn new(base: CovarianceKernel, filter: &Filter, m: u32, spec: &QuadratureSpec) -> Result<Self> {
        Self::with_form(base, filter, m, spec, Form::Auto)
    }

    pub fn with_form(
        base: CovarianceKernel,
        filter: &Filter,
        m: u32,
        spec: &QuadratureSpec,
        form: Form,
    ) -> Result<Self> {
        if !base.is_lattice() {
            return Err(OarError::InvalidParameter(
                "renormalized states need a lattice base kernel".into(),
            ));
        }
        let scale = 2f64.powi(m as i32);
        let use_k = match form {
            Form::Theta => false,
            Form::K => true,
            Form::Auto => m >= K_FORM_THRESHOLD,
        };
        let measure = if use_k {
            SpectralMeasure::build(scale * PI, spec.panel_width(), spec, |k, w| {
                let (a, b) = base.densities(k / scale);
                SpectralNode {
                    kappa: k,
                    weight: w * partial_product_power(filter, m, k) / (2.0 * PI),
                    a,
                    b,
                }
            })?
        } else {
            SpectralMeasure::build(PI, spec.panel_width() / scale, spec, |th, w| {
                let (a, b) = base.densities(th);
                let mut prod = scale;
                let mut arg = th;
                for _ in 0..m {
                    prod *= filter.m0_power(arg);
                    arg *= 2.0;
                }
                SpectralNode {
                    kappa: scale * th,
                    weight: w * prod / (2.0 * PI),
                    a,
                    b,
                }
            })?
        };
        Ok(Self {
            base,
            filter: filter.clone(),
            m,
            measure,
        })
    }

    pub fn base(&self) -> &CovarianceKernel {
        &self.base
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }
}

impl TwoPointState for RenormalizedState {
    fn translation_invariant(&self) -> bool {
        true
    }

    fn two_point(&self, which: Pairing, xi: &SmearedVector, eta: &SmearedVector) -> Result<Complex64> {
        self.measure.two_point(which, xi, eta)
    }

    fn kind(&self) -> String {
        format!("renormalized(m={})", self.m)
    }
}

/// `ω^(m)` two-point value for a lattice kernel.
pub fn renormalized_two_point(
    base: CovarianceKernel,
    filter: &Filter,
    m: u32,
    xi: &SmearedVector,
    eta: &SmearedVector,
    which: Pairing,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    RenormalizedState::new(base, filter, m, spec)?.two_point(which, xi, eta)
}

/// Smallest `K = 2π·2^j ≤ k_max_cap` whose `|ŝ|²` tail mass
/// `2π − ∫_{−K}^{K}|ŝ|²` is below `spec.tail_tol`; returns `(K, tail)`.
pub fn tail_cutoff(filter: &Filter, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    let sf = ScalingFunctionFT::new(filter.clone(), 1);
    let rule = spec.rule();
    let mut k = 2.0 * PI;
    let mut last_tail = f64::INFINITY;
    while k <= spec.k_max_cap * (1.0 + 1e-12) {
        let mass = crate::quadrature::integrate_symmetric(
            |x| Complex64::new(sf.power(x), 0.0),
            k,
            0.5 * spec.panel_width(),
            &rule,
        )
        .re;
        let tail = (2.0 * PI - mass).max(0.0);
        if tail < spec.tail_tol {
            return Ok((k, tail));
        }
        last_tail = tail;
        k *= 2.0;
    }
    Err(OarError::TailMassUnsatisfiable {
        k_max: k / 2.0,
        tail_mass: last_tail,
        tolerance: spec.tail_tol,
    })
}

/// A scaling-limit state: `|ŝ|²`-weighted continuum kernel.
#[derive(Debug, Clone)]
pub struct LimitState {
    kernel: CovarianceKernel,
    filter: Filter,
    k_max: f64,
    tail_mass: f64,
    measure: SpectralMeasure,
}

impl LimitState {
    pub fn new(kernel: CovarianceKernel, filter: &Filter, spec: &QuadratureSpec) -> Result<Self> {
        if kernel.is_lattice() {
            return Err(OarError::InvalidParameter(
                "limit states need a continuum kernel".into(),
            ));
        }
        let (k_max, tail_mass) = tail_cutoff(filter, spec)?;
        let sf = ScalingFunctionFT::new(filter.clone(), 1);
        let measure = SpectralMeasure::build(k_max, spec.panel_width(), spec, |k, w| {
            let (a, b) = kernel.densities(k);
            SpectralNode {
                kappa: k,
                weight: w * sf.power(k) / (2.0 * PI),
                a,
                b,
            }
        })?;
        Ok(Self {
            kernel,
            filter: filter.clone(),
            k_max,
            tail_mass,
            measure,
        })
    }

    pub fn critical(filter: &Filter, spec: &QuadratureSpec) -> Result<Self> {
        Self::new(CovarianceKernel::CriticalLimit, filter, spec)
    }

    pub fn massive(
        filter: &Filter,
        mu0: f64,
        beta0: InverseTemperature,
        t: f64,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        Self::new(crate::kernels::covariance_massive_thermal(mu0, beta0, t)?, filter, spec)
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn kernel(&self) -> &CovarianceKernel {
        &self.kernel
    }

    pub fn filter(&self) -> &Filter {
        &self.filter
    }

    pub fn measure(&self) -> &SpectralMeasure {
        &self.measure
    }
}

impl TwoPointState for LimitState {
    fn translation_invariant(&self) -> bool {
        true
    }

    fn two_point(&self, which: Pairing, xi: &SmearedVector, eta: &SmearedVector) -> Result<Complex64> {
        self.measure.two_point(which, xi, eta)
    }

    fn kind(&self) -> String {
        match self.kernel {
            CovarianceKernel::CriticalLimit => "critical_limit".into(),
            CovarianceKernel::MassiveThermalLimit { .. } => "massive_thermal_limit".into(),
            _ => "limit".into(),
        }
    }
}

/// Critical scaling-limit two-point value.
pub fn limit_two_point(
    filter: &Filter,
    xi: &SmearedVector,
    eta: &SmearedVector,
    which: Pairing,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    LimitState::critical(filter, spec)?.two_point(which, xi, eta)
}

/// Massive / thermal scaling-limit two-point value.
#[allow(clippy::too_many_arguments)]
pub fn massive_thermal_two_point(
    filter: &Filter,
    mu0: f64,
    beta0: InverseTemperature,
    t: f64,
    xi: &SmearedVector,
    eta: &SmearedVector,
    which: Pairing,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    LimitState::massive(filter, mu0, beta0, t, spec)?.two_point(which, xi, eta)
}

/// Lattice couplings whose `m`-step flow approaches the massive/thermal
/// limit: `t1 = t`, `t3 = t(1 − 2^{-m}μ0)`, `β = 2^m β0`.
///
/// With this choice `2^m z_{2^{-m}k} → t(μ0 − ik)`, so `2^m|z| → t·ω_{μ0}(k)`
/// with calibration constant exactly 1.
pub fn massive_scaling_couplings(mu0: f64, beta0: InverseTemperature, t: f64, m: u32) -> Result<Couplings> {
    let scale = 2f64.powi(m as i32);
    let beta = match beta0 {
        InverseTemperature::Finite(b) => InverseTemperature::Finite(b * scale),
        InverseTemperature::Infinite => InverseTemperature::Infinite,
    };
    Couplings::new(t, t * (1.0 - mu0 / scale), beta)
}

/// Chirality of the self-dual Majorana fields `ψ_{±|j} = e^{±iπ/4}a_j + e^{∓iπ/4}a†_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chirality {
    Plus,
    Minus,
}

impl Chirality {
    fn sign(self) -> f64 {
        match self {
            Chirality::Plus => 1.0,
            Chirality::Minus => -1.0,
        }
    }
}

/// `ω(ψ_c(ξ∗s) ψ_d(η∗s)*)` at the critical limit by direct quadrature:
/// `(1/π)∫ (1 − c·sign k)/2 |ŝ|² conj(ξ̂) η̂` for `c = d`, and `0` for `c ≠ d`.
pub fn majorana_two_point(
    limit: &LimitState,
    c: Chirality,
    d: Chirality,
    xi: &SmearedVector,
    eta: &SmearedVector,
) -> Result<Complex64> {
    if c != d {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let s = c.sign();
    limit.measure().integrate(|n| {
        let sg = if n.kappa > 0.0 { 1.0 } else { -1.0 };
        xi.fourier(n.kappa).conj() * eta.fourier(n.kappa) * (1.0 - s * sg)
    })
}

/// The same Majorana two-point value assembled from the four `a`/`a†`
/// pairings of any quasi-free state.
pub fn majorana_two_point_assembled(
    state: &dyn TwoPointState,
    c: Chirality,
    d: Chirality,
    xi: &SmearedVector,
    eta: &SmearedVector,
) -> Result<Complex64> {
    // ψ_c(ξ) = e^{icπ/4} a(ξ) + e^{−icπ/4} a†(ξ̄),
    // ψ_d(η)* = e^{−idπ/4} a†(η) + e^{idπ/4} a(η̄).
    let ec = Complex64::from_polar(1.0, c.sign() * PI / 4.0);
    let ed = Complex64::from_polar(1.0, d.sign() * PI / 4.0);
    let xib = xi.conj();
    let etab = eta.conj();
    let aa_dag = state.two_point(Pairing::AADag, xi, eta)?;
    let a_a = state.two_point(Pairing::ADagADag, &etab, xi)?.conj();
    let adag_adag = state.two_point(Pairing::ADagADag, &xib, eta)?;
    let adag_a = etab.inner(&xib) - state.two_point(Pairing::AADag, &etab, &xib)?;
    Ok(ec * ed.conj() * aa_dag + ec * ed * a_a + ec.conj() * ed.conj() * adag_adag + ec.conj() * ed * adag_a)
}

/// `⟨R^m ξ, R^m η⟩` from the momentum-space product formula.
pub fn isometry_inner(
    filter: &Filter,
    m: u32,
    xi: &SmearedVector,
    eta: &SmearedVector,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let scale = 2f64.powi(m as i32);
    let measure = SpectralMeasure::build(scale * PI, spec.panel_width(), spec, |k, w| SpectralNode {
        kappa: k,
        weight: w * partial_product_power(filter, m, k) / (2.0 * PI),
        a: 1.0,
        b: Complex64::new(0.0, 0.0),
    })?;
    measure.two_point(Pairing::AADag, xi, eta)
}

/// Destination of the RG flow for ground states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowClass {
    Critical,
    DisorderFixedPoint,
    OrderFixedPoint,
}

impl FlowClass {
    /// Kernel that the `m`-step lattice kernels approach.
    pub fn target_kernel(self) -> CovarianceKernel {
        match self {
            FlowClass::Critical => CovarianceKernel::CriticalLimit,
            FlowClass::DisorderFixedPoint => CovarianceKernel::DisorderFixedPoint,
            FlowClass::OrderFixedPoint => CovarianceKernel::OrderFixedPoint,
        }
    }
}

/// Classification plus the measured approach to the predicted fixed point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowClassification {
    pub class: FlowClass,
    pub lambda: f64,
    /// `(m, sup_k max-entry |C(2^{-m}k) − C_*(k)|)` over [`PROBE_MOMENTA`].
    pub distances: Vec<(u32, f64)>,
}

/// Continuum momenta at which kernel distances are probed.
pub const PROBE_MOMENTA: [f64; 6] = [-0.125, -0.0625, -0.03125, 0.03125, 0.0625, 0.125];

/// Step counts at which distances are reported.
pub const CLASSIFY_STEPS: [u32; 3] = [4, 8, 12];

pub fn classify_lambda(lambda: f64) -> FlowClass {
    if lambda == 0.0 {
        FlowClass::Critical
    } else if lambda > 0.0 {
        FlowClass::DisorderFixedPoint
    } else {
        FlowClass::OrderFixedPoint
    }
}

fn max_entry_distance(a: &Kernel2, b: &Kernel2) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Distance of the `m`-step kernel from a target kernel over the probe set.
pub fn kernel_distance(base: &CovarianceKernel, target: &CovarianceKernel, m: u32) -> f64 {
    let scale = 2f64.powi(m as i32);
    PROBE_MOMENTA
        .iter()
        .map(|&k| max_entry_distance(&base.eval(k / scale), &target.eval(k)))
        .fold(0.0, f64::max)
}

pub fn classify_flow(c: &Couplings) -> Result<FlowClassification> {
    if !c.beta.is_infinite() {
        return Err(OarError::InvalidParameter(
            "flow classification is defined for ground states (beta = infinity)".into(),
        ));
    }
    let lambda = c.lambda();
    let class = classify_lambda(lambda);
    let base = CovarianceKernel::LatticeBeta { couplings: *c };
    let target = class.target_kernel();
    let distances = CLASSIFY_STEPS
        .iter()
        .map(|&m| (m, kernel_distance(&base, &target, m)))
        .collect();
    Ok(FlowClassification {
        class,
        lambda,
        distances,
    })
}

/// One tabulated kernel value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub k: f64,
    /// Row-major `[re, im]` pairs of the 2×2 kernel.
    pub entries: [[f64; 2]; 4],
}

impl KernelSample {
    pub fn new(k: f64, c: &Kernel2) -> Self {
        let e = |i: usize, j: usize| [c[(i, j)].re, c[(i, j)].im];
        Self {
            k,
            entries: [e(0, 0), e(0, 1), e(1, 0), e(1, 1)],
        }
    }
}

/// Exported flow trajectory record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowRecord {
    pub filter: String,
    pub m: u32,
    pub couplings: Couplings,
    pub kernel_samples: Vec<KernelSample>,
    pub distances_to_fixed_points: Vec<(String, f64)>,
}

/// Kernel samples of the `m`-step lattice kernel and its distances to all
/// three candidate fixed points.
pub fn flow_record(filter: &Filter, c: &Couplings, m: u32, ks: &[f64]) -> FlowRecord {
    let base = CovarianceKernel::LatticeBeta { couplings: *c };
    let scale = 2f64.powi(m as i32);
    let kernel_samples = ks.iter().map(|&k| KernelSample::new(k, &base.eval(k / scale))).collect();
    let distances_to_fixed_points = [
        ("critical", FlowClass::Critical),
        ("disorder", FlowClass::DisorderFixedPoint),
        ("order", FlowClass::OrderFixedPoint),
    ]
    .iter()
    .map(|(name, class)| (name.to_string(), kernel_distance(&base, &class.target_kernel(), m)))
    .collect();
    FlowRecord {
        filter: filter.label(),
        m,
        couplings: *c,
        kernel_samples,
        distances_to_fixed_points,
    }
}
