//! Quantum spin chain on `2M` sites: Pauli strings, the transverse-field
//! Ising Hamiltonian, Jordan–Wigner fermions and thermal states.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{bit, complexify, DenseOperator, LatticeSpec, MAX_HALF_WIDTH};
use super::{primal_coupling, transfer_matrices};
use crate::correlators::SelfDualVector;
use crate::error::{OarError, Result};
use crate::kernels::InverseTemperature;
use crate::quadrature::SmearedVector;

const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const C1: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const CI: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pauli {
    X,
    Y,
    Z,
}

fn pauli_2x2(p: Pauli) -> DMatrix<Complex64> {
    match p {
        Pauli::X => DMatrix::from_row_slice(2, 2, &[C0, C1, C1, C0]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[C0, -CI, CI, C0]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[C1, C0, C0, -C1]),
    }
}

fn check_half_width(m: usize) -> Result<()> {
    if !(1..=MAX_HALF_WIDTH).contains(&m) {
        return Err(OarError::SizeGuard(format!("half-width M={m} outside 1..=4")));
    }
    Ok(())
}

/// Tensor product of single-site matrices, position 0 first.
pub fn kron_all(factors: &[DMatrix<Complex64>]) -> DenseOperator {
    factors
        .iter()
        .fold(DMatrix::from_element(1, 1, C1), |acc, f| acc.kronecker(f))
}

/// `σ^p` at position `i` of an `L`-site chain.
pub fn pauli_at(p: Pauli, i: usize, sites: usize) -> DenseOperator {
    let id = DMatrix::<Complex64>::identity(2, 2);
    let factors: Vec<_> = (0..sites).map(|l| if l == i { pauli_2x2(p) } else { id.clone() }).collect();
    kron_all(&factors)
}

/// Boundary condition of the Ising coupling term.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// `H = −Σ_j t3 σ³_j σ³_{j+1} − Σ_j t1 σ¹_j` on an open chain of `2M` sites.
pub fn tfim_hamiltonian(m: usize, t1: f64, t3: f64) -> Result<DenseOperator> {
    tfim_hamiltonian_with(m, t1, t3, Boundary::Open)
}

pub fn tfim_hamiltonian_with(m: usize, t1: f64, t3: f64, boundary: Boundary) -> Result<DenseOperator> {
    check_half_width(m)?;
    let sites = 2 * m;
    let dim = 1usize << sites;
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);
    // Diagonal Ising part.
    let bonds = match boundary {
        Boundary::Open => sites - 1,
        Boundary::Periodic => sites,
    };
    for b in 0..dim {
        let mut e = 0.0;
        for i in 0..bonds {
            let k = (i + 1) % sites;
            let si = if b & bit(i, sites) == 0 { 1.0 } else { -1.0 };
            let sk = if b & bit(k, sites) == 0 { 1.0 } else { -1.0 };
            e -= t3 * si * sk;
        }
        h[(b, b)] = Complex64::new(e, 0.0);
    }
    // Transverse field flips one spin.
    for b in 0..dim {
        for i in 0..sites {
            h[(b ^ bit(i, sites), b)] -= Complex64::new(t1, 0.0);
        }
    }
    Ok(h)
}

/// Eigen-decomposition of a Hermitian operator that is real in the spin basis.
fn real_symmetric_eigen(h: &DenseOperator) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    let im = h.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if im > 1e-12 {
        return Err(OarError::InvalidParameter("operator is not real".into()));
    }
    Ok(SymmetricEigen::new(h.map(|z| z.re)))
}

/// Normalised `e^{−βH}` for a real symmetric `H`; at `β = ∞` the uniform
/// mixture over the ground space (eigenvalues within 1e-9 of the minimum).
pub fn gibbs_state(h: &DenseOperator, beta: InverseTemperature) -> Result<DenseOperator> {
    let eig = real_symmetric_eigen(h)?;
    let emin = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&e| match beta {
            InverseTemperature::Finite(b) => (-b * (e - emin)).exp(),
            InverseTemperature::Infinite => {
                if e - emin < 1e-9 {
                    1.0
                } else {
                    0.0
                }
            }
        })
        .collect();
    let z: f64 = weights.iter().sum();
    let q = &eig.eigenvectors;
    let qw = DMatrix::from_fn(q.nrows(), q.ncols(), |r, c| q[(r, c)] * weights[c] / z);
    Ok(complexify(&(qw * q.transpose())))
}

/// Eigenvalues of the ground space of `H` (ascending) and the degeneracy.
pub fn ground_degeneracy(h: &DenseOperator, tol: f64) -> Result<usize> {
    let eig = real_symmetric_eigen(h)?;
    let emin = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(eig.eigenvalues.iter().filter(|&&e| e - emin < tol).count())
}

/// Jordan–Wigner fermions `a_j = (Π_{l<j} σ¹_l)(σ³_j + iσ²_j)/2`.
///
/// The vacuum is `⊗|−⟩`; `a†_j` maps `|−⟩` to `|+⟩` at site `j`, so
/// `a†_{j1}⋯a†_{jn} Ω = (−1)^{Σ j_i + nM} |…+…⟩` for increasing `j_i`.
#[derive(Debug, Clone)]
pub struct JordanWigner {
    pub m: usize,
    annihilators: Vec<DenseOperator>,
}

pub fn jordan_wigner(m: usize) -> Result<JordanWigner> {
    check_half_width(m)?;
    let sites = 2 * m;
    let id = DMatrix::<Complex64>::identity(2, 2);
    let lower = (pauli_2x2(Pauli::Z) + pauli_2x2(Pauli::Y) * CI) * Complex64::new(0.5, 0.0);
    let annihilators = (0..sites)
        .map(|i| {
            let factors: Vec<_> = (0..sites)
                .map(|l| match l.cmp(&i) {
                    std::cmp::Ordering::Less => pauli_2x2(Pauli::X),
                    std::cmp::Ordering::Equal => lower.clone(),
                    std::cmp::Ordering::Greater => id.clone(),
                })
                .collect();
            kron_all(&factors)
        })
        .collect();
    Ok(JordanWigner { m, annihilators })
}

impl JordanWigner {
    pub fn sites(&self) -> usize {
        2 * self.m
    }

    pub fn dim(&self) -> usize {
        1 << self.sites()
    }

    fn position(&self, j: i64) -> Result<usize> {
        let m = self.m as i64;
        if j < -m || j >= m {
            return Err(OarError::InvalidParameter(format!("site {j} outside −{m}…{}", m - 1)));
        }
        Ok((j + m) as usize)
    }

    /// `a_j` for site label `j ∈ −M … M−1`.
    pub fn annihilation(&self, j: i64) -> Result<&DenseOperator> {
        Ok(&self.annihilators[self.position(j)?])
    }

    pub fn creation(&self, j: i64) -> Result<DenseOperator> {
        Ok(self.annihilation(j)?.adjoint())
    }

    /// `a(f) = Σ_j conj(f_j) a_j`.
    pub fn a_of(&self, f: &SmearedVector) -> Result<DenseOperator> {
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for j in f.range() {
            let c = f.get(j);
            if c != C0 {
                out += self.annihilation(j)? * c.conj();
            }
        }
        Ok(out)
    }

    /// `a†(g) = Σ_j g_j a†_j`.
    pub fn a_dag_of(&self, g: &SmearedVector) -> Result<DenseOperator> {
        Ok(self.a_of(g)?.adjoint())
    }

    /// `Ψ(ξ, η) = a(ξ − iη) + a†(conj(ξ + iη))` as a dense matrix.
    pub fn self_dual(&self, v: &SelfDualVector) -> Result<DenseOperator> {
        let (f, g) = v.field_parts();
        Ok(self.a_of(&f)? + self.a_dag_of(&g)?)
    }

    /// The Fock vacuum `⊗|−⟩` in the spin basis.
    pub fn vacuum(&self) -> DVector<Complex64> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let minus = DMatrix::from_column_slice(2, 1, &[Complex64::new(s, 0.0), Complex64::new(-s, 0.0)]);
        let v = kron_all(&vec![minus; self.sites()]);
        DVector::from_column_slice(v.as_slice())
    }

    /// `a†_{j1} ⋯ a†_{jn} Ω`.
    pub fn fock_state(&self, sites: &[i64]) -> Result<DVector<Complex64>> {
        let mut v = self.vacuum();
        for &j in sites.iter().rev() {
            v = self.creation(j)? * v;
        }
        Ok(v)
    }

    /// The product state with `|+⟩` on `occupied` and `|−⟩` elsewhere.
    pub fn occupation_product_state(&self, occupied: &[i64]) -> Result<DVector<Complex64>> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut factors = Vec::with_capacity(self.sites());
        for i in 0..self.sites() {
            let j = i as i64 - self.m as i64;
            let sign = if occupied.contains(&j) { 1.0 } else { -1.0 };
            factors.push(DMatrix::from_column_slice(2, 1, &[Complex64::new(s, 0.0), Complex64::new(sign * s, 0.0)]));
        }
        let v = kron_all(&factors);
        Ok(DVector::from_column_slice(v.as_slice()))
    }

    /// Fermion parity `P = Π σ¹_j`.
    pub fn parity(&self) -> DenseOperator {
        kron_all(&vec![pauli_2x2(Pauli::X); self.sites()])
    }
}

/// Sign `(−1)^{Σ j_i + nM}` relating `a†_{j1}⋯a†_{jn}Ω` to the product state.
pub fn fock_sign(m: usize, sites: &[i64]) -> f64 {
    let s: i64 = sites.iter().sum::<i64>() + (sites.len() * m) as i64;
    if s.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `‖ V_sym^N / tr − e^{−βH} / tr ‖` (operator norm) on a periodic chain of
/// `2M` sites with `K1 = βt3/N`, `K2* = βt1/N`.
pub fn trotter_error(m: usize, beta: f64, t1: f64, t3: f64, n: usize) -> Result<f64> {
    check_half_width(m)?;
    if n == 0 || beta <= 0.0 || t1 <= 0.0 {
        return Err(OarError::InvalidParameter("Trotter check needs N ≥ 1, β > 0 and t1 > 0".into()));
    }
    let k1 = beta * t3 / n as f64;
    let k2 = primal_coupling(beta * t1 / n as f64)?;
    let spec = LatticeSpec { m, n: 1, k1, k2 };
    let tm = transfer_matrices(&spec)?;
    let mut p = DMatrix::<f64>::identity(tm.vsym.nrows(), tm.vsym.ncols());
    for _ in 0..n {
        p = &p * &tm.vsym;
    }
    p /= p.trace();
    let h = tfim_hamiltonian_with(m, t1, t3, Boundary::Periodic)?;
    let eig = real_symmetric_eigen(&h)?;
    let emin = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = eig.eigenvalues.iter().map(|&e| (-beta * (e - emin)).exp()).collect();
    let q = &eig.eigenvectors;
    let qw = DMatrix::from_fn(q.nrows(), q.ncols(), |r, c| q[(r, c)] * w[c]);
    let mut g = qw * q.transpose();
    g /= g.trace();
    let diff = SymmetricEigen::new(p - g);
    Ok(diff.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max))
}
