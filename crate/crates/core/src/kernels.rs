//! Momentum-space objects of the free-fermion description of the
//! transverse-field Ising chain.
//!
//! The one-particle Hamiltonian is `h(θ) = 2[[0, −i z̄_θ], [i z_θ, 0]]` with
//! `z_θ = t1 − e^{iθ} t3`, and a KMS state at inverse temperature `β` has the
//! covariance `C_β = 2(e^{βh} + 1)^{-1} = I − tanh(β|z|) h / (2|z|)`.
//! Kernels are stored in the `(a, a†)` block ordering.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OarError, Result};

pub type Kernel2 = Matrix2<Complex64>;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Inverse temperature, possibly infinite (ground state).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InverseTemperature {
    Finite(f64),
    Infinite,
}

impl InverseTemperature {
    /// `tanh(β x)` for `x ≥ 0`; at `β = ∞` the value at `x = 0` is `0`
    /// (the single removable point of the critical kernel).
    pub fn tanh_of(self, x: f64) -> f64 {
        match self {
            InverseTemperature::Finite(b) => (b * x).tanh(),
            InverseTemperature::Infinite => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, InverseTemperature::Infinite)
    }
}

/// Transverse coupling `t1`, Ising coupling `t3` and inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub t1: f64,
    pub t3: f64,
    pub beta: InverseTemperature,
}

impl Couplings {
    pub fn new(t1: f64, t3: f64, beta: InverseTemperature) -> Result<Self> {
        if !(t1.is_finite() && t3.is_finite()) || t1 < 0.0 || t3 < 0.0 {
            return Err(OarError::InvalidParameter(format!(
                "couplings must be finite and non-negative (t1 = {t1}, t3 = {t3})"
            )));
        }
        if t1 == 0.0 && t3 == 0.0 {
            return Err(OarError::DegenerateCouplings);
        }
        if let InverseTemperature::Finite(b) = beta {
            if !(b >= 0.0 && b.is_finite()) {
                return Err(OarError::InvalidParameter(format!(
                    "inverse temperature must be non-negative, got {b}"
                )));
            }
        }
        Ok(Self { t1, t3, beta })
    }

    /// Ground state at the self-dual point `t1 = t3 = t`.
    pub fn critical(t: f64) -> Result<Self> {
        Self::new(t, t, InverseTemperature::Infinite)
    }

    /// `λ = 1 − t3/t1`, with `t1 = 0` mapped to `−∞`.
    pub fn lambda(&self) -> f64 {
        if self.t1 == 0.0 {
            f64::NEG_INFINITY
        } else {
            1.0 - self.t3 / self.t1
        }
    }
}

/// `z_θ = t1 − e^{iθ} t3`.
pub fn z_theta(c: &Couplings, theta: f64) -> Complex64 {
    Complex64::new(c.t1, 0.0) - Complex64::from_polar(c.t3, theta)
}

/// `h(θ) = 2[[0, −i z̄], [i z, 0]]`, Hermitian with eigenvalues `±2|z|`.
pub fn one_particle_h(c: &Couplings, theta: f64) -> Kernel2 {
    let z = z_theta(c, theta);
    Matrix2::new(ZERO, -I * z.conj() * 2.0, I * z * 2.0, ZERO)
}

/// Which covariance a [`CovarianceKernel`] evaluates. Lattice kinds take the
/// lattice momentum `θ`, limit kinds the continuum momentum `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovarianceKernel {
    /// KMS state of the chain at couplings `c`.
    LatticeBeta { couplings: Couplings },
    /// Ground state at `t1 = t3 = t`.
    CriticalLattice { t: f64 },
    /// Scaling limit at criticality.
    CriticalLimit,
    /// Massive / finite-temperature scaling limit.
    MassiveThermalLimit {
        mu0: f64,
        beta0: InverseTemperature,
        t: f64,
    },
    /// Fixed point reached for `λ ∈ (0, 1]` (the state annihilated by `a†`).
    DisorderFixedPoint,
    /// Fixed point reached for `λ < 0`.
    OrderFixedPoint,
}

/// Kernel `[[1, iτ ū], [−iτ u, 1]]` for a unit phase `u` and factor `τ`.
fn kernel_from_phase(u: Complex64, tau: f64) -> Kernel2 {
    Matrix2::new(ONE, I * u.conj() * tau, -I * u * tau, ONE)
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl CovarianceKernel {
    /// True for kernels indexed by the lattice momentum `θ ∈ [−π, π]`.
    pub fn is_lattice(&self) -> bool {
        matches!(
            self,
            CovarianceKernel::LatticeBeta { .. } | CovarianceKernel::CriticalLattice { .. }
        )
    }

    /// Lattice couplings, if this is a lattice kernel.
    pub fn couplings(&self) -> Option<Couplings> {
        match *self {
            CovarianceKernel::LatticeBeta { couplings } => Some(couplings),
            CovarianceKernel::CriticalLattice { t } => Some(Couplings {
                t1: t,
                t3: t,
                beta: InverseTemperature::Infinite,
            }),
            _ => None,
        }
    }

    /// The 2×2 kernel at momentum `x`.
    pub fn eval(&self, x: f64) -> Kernel2 {
        match *self {
            CovarianceKernel::LatticeBeta { .. } | CovarianceKernel::CriticalLattice { .. } => {
                let c = self.couplings().expect("lattice kernel");
                let z = z_theta(&c, x);
                let r = z.norm();
                if r == 0.0 {
                    return Kernel2::identity();
                }
                kernel_from_phase(z / r, c.beta.tanh_of(r))
            }
            CovarianceKernel::CriticalLimit => {
                let s = Complex64::new(-sign(x), 0.0);
                Matrix2::new(ONE, s, s, ONE)
            }
            CovarianceKernel::MassiveThermalLimit { mu0, beta0, t } => {
                let omega = mu0.hypot(x);
                if omega == 0.0 {
                    return Kernel2::identity();
                }
                let u = Complex64::new(mu0, -x) / omega;
                kernel_from_phase(u, beta0.tanh_of(t * omega))
            }
            CovarianceKernel::DisorderFixedPoint => kernel_from_phase(ONE, 1.0),
            CovarianceKernel::OrderFixedPoint => kernel_from_phase(-ONE, 1.0),
        }
    }

    /// Two-point densities `(A, B)` with
    /// `ω(a(ξ)a†(η)) = (1/2π)∫ A ξ̂̄ η̂` and `ω(a†(ξ)a†(η)) = (1/2π)∫ B ξ̂(−·) η̂`.
    pub fn densities(&self, x: f64) -> (f64, Complex64) {
        densities_of(&self.eval(x))
    }
}

/// Reads `(A, B)` off a kernel: `A = (1 − Im C01)/2`, `B = (i/2) Re C01`.
pub fn densities_of(c: &Kernel2) -> (f64, Complex64) {
    let c01 = c[(0, 1)];
    (0.5 * (1.0 - c01.im), I * (0.5 * c01.re))
}

pub fn covariance_lattice(c: Couplings) -> CovarianceKernel {
    CovarianceKernel::LatticeBeta { couplings: c }
}

pub fn covariance_critical_limit() -> CovarianceKernel {
    CovarianceKernel::CriticalLimit
}

pub fn covariance_massive_thermal(
    mu0: f64,
    beta0: InverseTemperature,
    t: f64,
) -> Result<CovarianceKernel> {
    if !(mu0 >= 0.0) || !(t > 0.0) {
        return Err(OarError::InvalidParameter(format!(
            "massive limit needs mu0 >= 0 and t > 0 (mu0 = {mu0}, t = {t})"
        )));
    }
    if let InverseTemperature::Finite(b) = beta0 {
        if !(b > 0.0) {
            return Err(OarError::InvalidParameter(format!("beta0 must be positive, got {b}")));
        }
    }
    Ok(CovarianceKernel::MassiveThermalLimit { mu0, beta0, t })
}

/// Dispersion `ω_μ(k) = (μ² + k²)^{1/2}`.
pub fn omega(mu0: f64, k: f64) -> f64 {
    mu0.hypot(k)
}

/// `2(e^{βh}+1)^{-1}` by a dense matrix exponential; used as an oracle.
pub fn covariance_by_expm(c: &Couplings, theta: f64) -> Kernel2 {
    let h = one_particle_h(c, theta);
    match c.beta {
        InverseTemperature::Finite(b) => {
            // (e^{X}+1)^{-1} = e^{-X/2} (e^{X/2} + e^{-X/2})^{-1}; the
            // symmetric sum stays well conditioned at large β.
            let half = h * Complex64::new(0.5 * b, 0.0);
            let plus = half.exp();
            let minus = (-half).exp();
            let cosh2 = (plus + minus)
                .try_inverse()
                .expect("2cosh(βh/2) is positive definite");
            minus * cosh2 * Complex64::new(2.0, 0.0)
        }
        InverseTemperature::Infinite => {
            // 2 × projector onto the negative-energy eigenspace of h.
            let eig = h.symmetric_eigen();
            let mut out = Kernel2::zeros();
            for i in 0..2 {
                let v = eig.eigenvectors.column(i);
                let lam = eig.eigenvalues[i];
                let w = if lam < 0.0 {
                    2.0
                } else if lam > 0.0 {
                    0.0
                } else {
                    1.0
                };
                out += v * v.adjoint() * Complex64::new(w, 0.0);
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: &Kernel2, b: &Kernel2) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn z_examples() {
        let c = Couplings::critical(1.0).unwrap();
        let z = z_theta(&c, std::f64::consts::PI);
        assert_abs_diff_eq!(z.re, 2.0, epsilon = 1e-15);
        assert!(z_theta(&c, 0.0).norm() < 1e-15);
        let t = 1.3f64;
        assert_abs_diff_eq!(z_theta(&c, t).norm_sqr(), 4.0 * (t / 2.0).sin().powi(2), epsilon = 1e-14);
    }

    #[test]
    fn h_squares_to_scalar() {
        let c = Couplings::new(1.0, 0.5, InverseTemperature::Infinite).unwrap();
        let h = one_particle_h(&c, 0.4);
        let z2 = z_theta(&c, 0.4).norm_sqr();
        assert!(close(&(h * h), &(Kernel2::identity() * Complex64::new(4.0 * z2, 0.0))) < 1e-14);
        assert!((h[(0, 0)] + h[(1, 1)]).norm() == 0.0);
    }

    #[test]
    fn critical_ground_state_kernel_matches_closed_form() {
        let k = CovarianceKernel::CriticalLattice { t: 1.0 };
        let th = 1.0f64;
        let c = k.eval(th);
        let den = 2.0 * (th / 2.0).sin().abs();
        let up = I * (ONE - Complex64::from_polar(1.0, -th)) / den;
        let lo = -I * (ONE - Complex64::from_polar(1.0, th)) / den;
        assert!((c[(0, 1)] - up).norm() < 1e-14);
        assert!((c[(1, 0)] - lo).norm() < 1e-14);
    }

    #[test]
    fn degenerate_couplings_rejected() {
        assert_eq!(
            Couplings::new(0.0, 0.0, InverseTemperature::Infinite),
            Err(OarError::DegenerateCouplings)
        );
    }

    #[test]
    fn lambda_values() {
        let inf = InverseTemperature::Infinite;
        assert_eq!(Couplings::new(1.0, 0.0, inf).unwrap().lambda(), 1.0);
        assert_eq!(Couplings::new(0.0, 1.0, inf).unwrap().lambda(), f64::NEG_INFINITY);
        assert_eq!(Couplings::new(1.0, 1.0, inf).unwrap().lambda(), 0.0);
    }

    #[test]
    fn critical_limit_sign_flip() {
        let k = covariance_critical_limit();
        assert_eq!(k.eval(3.2)[(0, 1)], Complex64::new(-1.0, 0.0));
        assert_eq!(k.eval(-3.2)[(1, 0)], Complex64::new(1.0, 0.0));
        assert_eq!(k.eval(0.0), Kernel2::identity());
    }

    #[test]
    fn massive_limit_reductions() {
        let crit = covariance_massive_thermal(0.0, InverseTemperature::Infinite, 1.0).unwrap();
        for &k in &[-2.5, -0.1, 0.3, 4.0] {
            assert!(close(&crit.eval(k), &covariance_critical_limit().eval(k)) < 1e-15);
        }
        let m = covariance_massive_thermal(0.7, InverseTemperature::Finite(2.0), 1.5).unwrap();
        let c = m.eval(0.0);
        assert_abs_diff_eq!(c[(0, 1)].im, (2.0f64 * 1.5 * 0.7).tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(c[(0, 1)].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(omega(0.5, 2.0).powi(2) - 4.0, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn fixed_point_kernels_are_rank_one_projectors() {
        for k in [CovarianceKernel::DisorderFixedPoint, CovarianceKernel::OrderFixedPoint] {
            let c = k.eval(0.3);
            assert!(close(&(c * c), &(c * Complex64::new(2.0, 0.0))) < 1e-15);
        }
        // Disorder fixed point: ⟨a a†⟩ = 0, i.e. every mode occupied.
        let (a, b) = CovarianceKernel::DisorderFixedPoint.densities(1.0);
        assert_abs_diff_eq!(a, 0.0, epsilon = 1e-15);
        assert!(b.norm() < 1e-15);
    }

    #[test]
    fn beta_zero_is_identity() {
        let c = Couplings::new(1.0, 0.5, InverseTemperature::Finite(0.0)).unwrap();
        assert!(close(&covariance_lattice(c).eval(0.8), &Kernel2::identity()) < 1e-15);
    }
}
