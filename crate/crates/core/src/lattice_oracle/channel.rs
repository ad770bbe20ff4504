//! The disentangler `U = Γ(u)`, the coarse-graining channel
//! `ε(ρ) = ptr(U† ρ U)` and its dual `α`, built from the wavelet filter bank.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{
    complexify, conjugate_by_real, gibbs_state, occupation_to_spin, second_quantize, tfim_hamiltonian_with,
    trace_product, word_expectation, Boundary, DenseOperator, MajoranaGenerator, MAX_HALF_WIDTH,
};
use super::fermions::annihilation_occ;
use crate::error::{OarError, Result};
use crate::kernels::InverseTemperature;
use crate::wavelet::{high_pass, Filter};

const STATE_TOLERANCE: f64 = 1e-10;

/// Periodized two-channel filter bank on `L = 2M` modes:
/// `u e_{2c} = Σ_n h_n e_{2c+n}` and `u e_{2c+1} = Σ_n g_n e_{2c+n}` (mod `L`).
pub fn one_particle_disentangler(f: &Filter, sites: usize) -> Result<DMatrix<f64>> {
    if sites % 2 == 1 || sites == 0 {
        return Err(OarError::InvalidParameter(format!("chain of {sites} sites cannot be halved")));
    }
    if f.len() > sites {
        return Err(OarError::FilterTooLong {
            taps: f.len(),
            sites,
        });
    }
    let g = high_pass(f);
    let l = sites as i64;
    let mut u = DMatrix::zeros(sites, sites);
    for c in 0..sites / 2 {
        let col = 2 * c;
        for (k, &h) in f.coeffs().iter().enumerate() {
            let n = f.support_offset() + k as i64;
            u[((col as i64 + n).rem_euclid(l) as usize, col)] += h;
        }
        for (k, &gn) in g.coeffs().iter().enumerate() {
            let n = g.support_offset() + k as i64;
            u[((col as i64 + n).rem_euclid(l) as usize, col + 1)] += gn;
        }
    }
    Ok(u)
}

/// Mode permutation moving the even modes to the front, `e_{2c} ↦ e_c`,
/// `e_{2c+1} ↦ e_{L/2+c}`.
pub fn even_first_permutation(sites: usize) -> DMatrix<f64> {
    let half = sites / 2;
    let mut p = DMatrix::zeros(sites, sites);
    for c in 0..half {
        p[(c, 2 * c)] = 1.0;
        p[(half + c, 2 * c + 1)] = 1.0;
    }
    p
}

/// `U = Γ(u)` in the spin basis of `2M` sites.
pub fn disentangler_unitary(f: &Filter, m: usize) -> Result<DenseOperator> {
    check_m(m)?;
    let sites = 2 * m;
    let u = one_particle_disentangler(f, sites)?;
    let w = occupation_to_spin(sites);
    Ok(complexify(&(&w * second_quantize(&u) * w.transpose())))
}

fn check_m(m: usize) -> Result<()> {
    if !(1..=MAX_HALF_WIDTH).contains(&m) {
        return Err(OarError::SizeGuard(format!("half-width M={m} outside 1..=4")));
    }
    Ok(())
}

/// Precomputed data of `ε` for one filter and chain length.
#[derive(Debug, Clone)]
pub struct CoarseGraining {
    pub sites: usize,
    u: DMatrix<f64>,
    /// `W_fine Γ(u) Γ(P)ᵀ`: spin basis in, reordered occupation basis out.
    t: DMatrix<f64>,
    w_coarse: DMatrix<f64>,
}

impl CoarseGraining {
    pub fn new(f: &Filter, sites: usize) -> Result<Self> {
        if sites > 2 * MAX_HALF_WIDTH {
            return Err(OarError::SizeGuard(format!("{sites} sites exceed 8")));
        }
        let u = one_particle_disentangler(f, sites)?;
        let gu = second_quantize(&u);
        let gp = second_quantize(&even_first_permutation(sites));
        let t = occupation_to_spin(sites) * gu * gp.transpose();
        Ok(Self {
            sites,
            u,
            t,
            w_coarse: occupation_to_spin(sites / 2),
        })
    }

    pub fn one_particle(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// `ε(ρ)` for a density matrix in the spin basis.
    pub fn apply(&self, rho: &DenseOperator) -> Result<DenseOperator> {
        validate_state(rho, 1 << self.sites)?;
        let x = conjugate_by_real(&self.t, rho);
        let half = self.sites / 2;
        let kept = 1usize << half;
        let traced = 1usize << (self.sites - half);
        let mut out = DMatrix::<Complex64>::zeros(kept, kept);
        for a in 0..kept {
            for b in 0..kept {
                let mut acc = Complex64::new(0.0, 0.0);
                for e in 0..traced {
                    acc += x[(a * traced + e, b * traced + e)];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(&self.w_coarse.map(|v| Complex64::new(v, 0.0)) * out * self.w_coarse.transpose().map(|v| Complex64::new(v, 0.0)))
    }

    /// The one-particle isometry `R e_c = u e_{2c}` as an `L × L/2` matrix.
    pub fn isometry(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.sites, self.sites / 2, |r, c| self.u[(r, 2 * c)])
    }

    /// `α(A)` for an operator on the coarse chain, determined by
    /// `α(a_c) = a(R e_c)`.
    ///
    /// `R` is completed to an orthogonal map `ũ` by Gram–Schmidt against the
    /// standard basis (no high-pass filter involved), and
    /// `α(A) = Γ(ũ) ι(A) Γ(ũ)†` with `ι` the fermionic embedding on the
    /// even modes.
    pub fn dual(&self, a: &DenseOperator) -> Result<DenseOperator> {
        let half = self.sites / 2;
        if a.nrows() != 1 << half || a.ncols() != 1 << half {
            return Err(OarError::InvalidParameter("operator dimension does not match the coarse chain".into()));
        }
        let completed = complete_isometry(&self.isometry());
        let t = occupation_to_spin(self.sites)
            * second_quantize(&completed)
            * second_quantize(&even_first_permutation(self.sites)).transpose();
        let a_occ = conjugate_by_real(&self.w_coarse, a);
        let embedded = a_occ.kronecker(&DenseOperator::identity(1 << half, 1 << half));
        Ok(conjugate_by_real(&t.transpose(), &embedded))
    }

    /// `α(A)` from the Majorana expansion `A = Σ_S c_S γ_S` and the
    /// multiplicative extension `α(γ_S) = α(γ_{s1})⋯α(γ_{sk})`. Slower than
    /// [`CoarseGraining::dual`] but uses nothing beyond `α(a_c) = a(R e_c)`.
    pub fn dual_by_monomials(&self, a: &DenseOperator) -> Result<DenseOperator> {
        let half = self.sites / 2;
        if a.nrows() != 1 << half || a.ncols() != 1 << half {
            return Err(OarError::InvalidParameter("operator dimension does not match the coarse chain".into()));
        }
        let coeffs = majorana_coefficients(a, half);
        let gens: Vec<MajoranaGenerator> = (0..2 * half)
            .map(|k| {
                let col = 2 * (k / 2);
                let terms = (0..self.sites)
                    .filter(|&r| self.u[(r, col)] != 0.0)
                    .map(|r| (r, self.u[(r, col)]))
                    .collect();
                MajoranaGenerator { terms, odd: k % 2 == 1 }
            })
            .collect();
        let dim = 1usize << self.sites;
        let buf = horner(&coeffs, &gens, self.sites, 0, 0, dim);
        let x = DMatrix::from_row_slice(dim, dim, &buf);
        Ok(conjugate_by_real(&occupation_to_spin(self.sites).transpose(), &x))
    }
}

/// Orthogonal `L × L` matrix whose even columns are the columns of `r` and
/// whose odd columns span the orthogonal complement.
pub fn complete_isometry(r: &DMatrix<f64>) -> DMatrix<f64> {
    let l = r.nrows();
    let mut basis: Vec<nalgebra::DVector<f64>> = (0..r.ncols()).map(|c| r.column(c).into_owned()).collect();
    let mut extra = Vec::new();
    for e in 0..l {
        if basis.len() + extra.len() == l {
            break;
        }
        let mut v = nalgebra::DVector::<f64>::zeros(l);
        v[e] = 1.0;
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for b in basis.iter().chain(extra.iter()) {
                let p = b.dot(&v);
                v -= b * p;
            }
        }
        let n = v.norm();
        if n > 1e-8 {
            extra.push(v / n);
        }
    }
    let mut out = DMatrix::zeros(l, l);
    for (c, col) in basis.drain(..).enumerate() {
        out.set_column(2 * c, &col);
    }
    for (c, col) in extra.into_iter().enumerate() {
        out.set_column(2 * c + 1, &col);
    }
    out
}

/// `H(P) = c_P I + Σ_{k > max P} Γ_k H(P ∪ {k})`, so `H(∅) = Σ_S c_S Γ_S`.
fn horner(
    coeffs: &[Complex64],
    gens: &[MajoranaGenerator],
    sites: usize,
    set: usize,
    next: usize,
    dim: usize,
) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for v in out.iter_mut().step_by(dim + 1) {
        *v = coeffs[set];
    }
    for k in next..gens.len() {
        let child = horner(coeffs, gens, sites, set | (1 << k), k + 1, dim);
        // Odd generators carry the factor i of the physical Majorana.
        gens[k].apply_left_add(sites, &child, gens[k].odd, &mut out);
    }
    out
}

/// Coefficients `c_S = tr(γ_S† A) / 2^L` of `A = Σ_S c_S γ_S`, with the
/// Majoranas `γ_{2c} = a_c + a†_c`, `γ_{2c+1} = i(a†_c − a_c)` and
/// `γ_S = γ_{s1}⋯γ_{sk}` for increasing `s`; `S` is a bitmask over `2L` indices.
fn majorana_coefficients(a_spin: &DenseOperator, sites: usize) -> Vec<Complex64> {
    let dim = 1usize << sites;
    let w = complexify(&occupation_to_spin(sites));
    let a = w.transpose() * a_spin * &w;
    let i = Complex64::new(0.0, 1.0);
    let gammas: Vec<DenseOperator> = (0..2 * sites)
        .map(|k| {
            let an = complexify(&annihilation_occ(k / 2, sites));
            let cr = an.transpose();
            if k % 2 == 0 {
                &an + &cr
            } else {
                (cr - an) * i
            }
        })
        .collect();
    let n = 1usize << (2 * sites);
    (0..n)
        .map(|s| {
            let mut g = DMatrix::<Complex64>::identity(dim, dim);
            for (k, gk) in gammas.iter().enumerate() {
                if s & (1 << k) != 0 {
                    g *= gk;
                }
            }
            trace_product(&g.adjoint(), &a) / dim as f64
        })
        .collect()
}

/// Checks Hermiticity, unit trace and positivity to 1e-10.
pub fn validate_state(rho: &DenseOperator, dim: usize) -> Result<()> {
    if rho.nrows() != dim || rho.ncols() != dim {
        return Err(OarError::NotAState(format!("dimension {} != {dim}", rho.nrows())));
    }
    let herm = (rho - rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm > STATE_TOLERANCE {
        return Err(OarError::NotAState(format!("not Hermitian (deviation {herm:.2e})")));
    }
    let tr = rho.trace();
    if (tr - 1.0).norm() > STATE_TOLERANCE {
        return Err(OarError::NotAState(format!("trace {tr}")));
    }
    let min = min_eigenvalue(rho);
    if min < -STATE_TOLERANCE {
        return Err(OarError::NotAState(format!("negative eigenvalue {min:.2e}")));
    }
    Ok(())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(rho: &DenseOperator) -> f64 {
    let h = (rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

/// `ε(ρ)` for a density matrix on `2M` sites.
pub fn coarse_grain_channel(rho: &DenseOperator, f: &Filter) -> Result<DenseOperator> {
    let dim = rho.nrows();
    if !dim.is_power_of_two() || dim.trailing_zeros() % 2 == 1 {
        return Err(OarError::NotAState(format!("dimension {dim} is not 2^(2M)")));
    }
    CoarseGraining::new(f, dim.trailing_zeros() as usize)?.apply(rho)
}

/// Fermionic two-point matrices `⟨a_i a†_j⟩` and `⟨a†_i a†_j⟩` of a state
/// on `L` sites, indexed by position.
pub fn two_point_matrices(rho: &DenseOperator, sites: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let r = conjugate_by_real(&occupation_to_spin(sites), rho);
    let aad = DMatrix::from_fn(sites, sites, |i, j| word_expectation(&r, &[(false, i), (true, j)], sites));
    let adad = DMatrix::from_fn(sites, sites, |i, j| word_expectation(&r, &[(true, i), (true, j)], sites));
    (aad, adad)
}

/// One step of a finite renormalization trajectory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowStep {
    pub step: usize,
    pub sites: usize,
    pub trace: f64,
    pub min_eigenvalue: f64,
    /// Row-major `⟨a_i a†_j⟩` (real, imaginary) pairs.
    pub aa_dag: Vec<(f64, f64)>,
    /// Row-major `⟨a†_i a†_j⟩` (real, imaginary) pairs.
    pub adag_adag: Vec<(f64, f64)>,
    #[serde(skip)]
    pub rho: DenseOperator,
}

impl FlowStep {
    fn new(step: usize, sites: usize, rho: DenseOperator) -> Self {
        let (aad, adad) = two_point_matrices(&rho, sites);
        let flat = |m: &DMatrix<Complex64>| -> Vec<(f64, f64)> {
            (0..sites).flat_map(|i| (0..sites).map(move |j| (i, j))).map(|(i, j)| (m[(i, j)].re, m[(i, j)].im)).collect()
        };
        Self {
            step,
            sites,
            trace: rho.trace().re,
            min_eigenvalue: min_eigenvalue(&rho),
            aa_dag: flat(&aad),
            adag_adag: flat(&adad),
            rho,
        }
    }

    /// `⟨a_i a†_j⟩` by position.
    pub fn aa_dag_at(&self, i: usize, j: usize) -> Complex64 {
        let (re, im) = self.aa_dag[i * self.sites + j];
        Complex64::new(re, im)
    }

    pub fn adag_adag_at(&self, i: usize, j: usize) -> Complex64 {
        let (re, im) = self.adag_adag[i * self.sites + j];
        Complex64::new(re, im)
    }
}

/// `ρ^(m) = ε^m(ρ_β)` starting from the open-chain TFIM state on `sites`
/// positions; every intermediate state is validated.
pub fn finite_flow(
    sites: usize,
    t1: f64,
    t3: f64,
    beta: InverseTemperature,
    f: &Filter,
    steps: usize,
) -> Result<Vec<FlowStep>> {
    if sites > 2 * MAX_HALF_WIDTH || sites % 2 == 1 || sites == 0 {
        return Err(OarError::SizeGuard(format!("finite flows start from 2, 4, 6 or 8 sites, got {sites}")));
    }
    if sites >> steps == 0 || (steps > 0 && !sites.is_multiple_of(1 << steps)) {
        return Err(OarError::SizeGuard(format!("{sites} sites cannot be halved {steps} times")));
    }
    let h = tfim_hamiltonian_with(sites / 2, t1, t3, Boundary::Open)?;
    let mut rho = gibbs_state(&h, beta)?;
    let mut n = sites;
    let mut out = vec![FlowStep::new(0, n, rho.clone())];
    for s in 1..=steps {
        rho = CoarseGraining::new(f, n)?.apply(&rho)?;
        n /= 2;
        validate_state(&rho, 1 << n)?;
        out.push(FlowStep::new(s, n, rho.clone()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelet::make_daubechies_filter;

    #[test]
    fn haar_one_particle_map() {
        let f = make_daubechies_filter(1).unwrap();
        let u = one_particle_disentangler(&f, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u - DMatrix::from_row_slice(2, 2, &[s, s, s, -s])).norm() < 1e-15);
    }

    #[test]
    fn filter_longer_than_chain() {
        let f = make_daubechies_filter(2).unwrap();
        assert_eq!(
            one_particle_disentangler(&f, 2),
            Err(OarError::FilterTooLong { taps: 4, sites: 2 })
        );
    }

    #[test]
    fn maximally_mixed_stays_mixed_under_haar() {
        let f = make_daubechies_filter(1).unwrap();
        let rho = DenseOperator::identity(16, 16) / Complex64::new(16.0, 0.0);
        let out = coarse_grain_channel(&rho, &f).unwrap();
        let expect = DenseOperator::identity(4, 4) / Complex64::new(4.0, 0.0);
        assert!((out - expect).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_states() {
        let f = make_daubechies_filter(1).unwrap();
        let rho = DenseOperator::identity(16, 16);
        assert!(matches!(coarse_grain_channel(&rho, &f), Err(OarError::NotAState(_))));
    }
}
