//! Classical 2D Ising model on a `2M × 2N` torus: the local tensor, brute
//! force partition functions, transfer matrices and row correlations.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{bit, complexify, DenseOperator, MAX_HALF_WIDTH};
use crate::error::{OarError, Result};

/// Maximal number of spins enumerated by [`partition_function_brute`].
pub const MAX_BRUTE_SPINS: usize = 24;

/// Maximal half-height accepted by [`correlation_brute`].
pub const MAX_CORRELATION_HALF_HEIGHT: usize = 16;

fn spin(idx: usize) -> f64 {
    if idx == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `A_{μμ'σσ'} = δ_{μσ} e^{K1 μμ'} e^{K2 σσ'}`, index 0 meaning spin `+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsingTensor {
    pub k1: f64,
    pub k2: f64,
    pub values: [[[[f64; 2]; 2]; 2]; 2],
}

impl IsingTensor {
    pub fn new(k1: f64, k2: f64) -> Self {
        let mut values = [[[[0.0; 2]; 2]; 2]; 2];
        for (mu, a) in values.iter_mut().enumerate() {
            for (mup, b) in a.iter_mut().enumerate() {
                for (s, c) in b.iter_mut().enumerate() {
                    for (sp, v) in c.iter_mut().enumerate() {
                        if mu == s {
                            *v = (k1 * spin(mu) * spin(mup)).exp() * (k2 * spin(s) * spin(sp)).exp();
                        }
                    }
                }
            }
        }
        Self { k1, k2, values }
    }
}

/// A `2M`-site wide, `2N`-row high periodic lattice with couplings
/// `K1` (within a row) and `K2` (between rows).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub m: usize,
    pub n: usize,
    pub k1: f64,
    pub k2: f64,
}

impl LatticeSpec {
    pub fn new(m: usize, n: usize, k1: f64, k2: f64) -> Result<Self> {
        if !(1..=MAX_HALF_WIDTH).contains(&m) {
            return Err(OarError::SizeGuard(format!("half-width M={m} outside 1..=4")));
        }
        if !(1..=64).contains(&n) {
            return Err(OarError::SizeGuard(format!("half-height N={n} outside 1..=64")));
        }
        if !(k1.is_finite() && k2.is_finite()) {
            return Err(OarError::InvalidParameter("couplings must be finite".into()));
        }
        Ok(Self { m, n, k1, k2 })
    }

    pub fn width(&self) -> usize {
        2 * self.m
    }

    pub fn height(&self) -> usize {
        2 * self.n
    }

    pub fn spins(&self) -> usize {
        self.width() * self.height()
    }
}

/// Number of configurations with a given count of disagreeing horizontal
/// and vertical bonds; one enumeration serves every `(K1, K2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BondHistogram {
    pub m: usize,
    pub n: usize,
    counts: Vec<u64>,
}

impl BondHistogram {
    /// Enumerates all `2^{4MN}` configurations.
    pub fn enumerate(m: usize, n: usize) -> Result<Self> {
        let width = 2 * m;
        let height = 2 * n;
        if width * height > MAX_BRUTE_SPINS {
            return Err(OarError::SizeGuard(format!(
                "{} spins exceed the brute-force limit of {MAX_BRUTE_SPINS}",
                width * height
            )));
        }
        let bonds = width * height;
        let rows = 1usize << width;
        let mask = rows - 1;
        let horiz: Vec<usize> = (0..rows)
            .map(|r| {
                let rot = ((r << 1) | (r >> (width - 1))) & mask;
                (r ^ rot).count_ones() as usize
            })
            .collect();
        let mut counts = vec![0u64; (bonds + 1) * (bonds + 1)];
        for first in 0..rows {
            walk(&horiz, rows, height - 1, first, horiz[first], 0, first, &mut counts, bonds + 1);
        }
        Ok(Self { m, n, counts })
    }

    pub fn bonds(&self) -> usize {
        4 * self.m * self.n
    }

    /// `Z = Σ count · exp(K1(B − 2h) + K2(B − 2v))`.
    pub fn partition_function(&self, k1: f64, k2: f64) -> f64 {
        let b = self.bonds();
        let stride = b + 1;
        let mut z = 0.0;
        for h in 0..=b {
            for v in 0..=b {
                let c = self.counts[h * stride + v];
                if c > 0 {
                    let e = k1 * (b as f64 - 2.0 * h as f64) + k2 * (b as f64 - 2.0 * v as f64);
                    z += c as f64 * e.exp();
                }
            }
        }
        z
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[allow(clippy::too_many_arguments)]
fn walk(
    horiz: &[usize],
    rows: usize,
    remaining: usize,
    prev: usize,
    h: usize,
    v: usize,
    first: usize,
    counts: &mut [u64],
    stride: usize,
) {
    if remaining == 1 {
        // The last row closes the torus.
        for r in 0..rows {
            let hh = h + horiz[r];
            let vv = v + (prev ^ r).count_ones() as usize + (r ^ first).count_ones() as usize;
            counts[hh * stride + vv] += 1;
        }
        return;
    }
    for r in 0..rows {
        walk(
            horiz,
            rows,
            remaining - 1,
            r,
            h + horiz[r],
            v + (prev ^ r).count_ones() as usize,
            first,
            counts,
            stride,
        );
    }
}

/// Brute force `Z_{MN}` by enumeration of all spin configurations.
pub fn partition_function_brute(spec: &LatticeSpec) -> Result<f64> {
    Ok(BondHistogram::enumerate(spec.m, spec.n)?.partition_function(spec.k1, spec.k2))
}

/// Dual vertical coupling `K2*` with `tanh K2* = e^{−2K2}`.
pub fn dual_coupling(k2: f64) -> Result<f64> {
    if k2 <= 0.0 {
        return Err(OarError::InvalidParameter(format!(
            "vertical coupling K2={k2} has no finite dual"
        )));
    }
    Ok((-2.0 * k2).exp().atanh())
}

/// Inverse of [`dual_coupling`] (the map is an involution).
pub fn primal_coupling(k2_dual: f64) -> Result<f64> {
    dual_coupling(k2_dual)
}

/// Row-to-row transfer matrices in the spin basis.
///
/// `V1 = (2 sinh 2K2)^M exp(K2* Σσ¹)` and `V3 = exp(K1 Σ σ³_j σ³_{j+1})`
/// with periodic neighbours. The product `V = V3 V1` has entries
/// `Π_j e^{K1 σ_j σ_{j+1} + K2 σ_j σ'_j}`. The exponent of the prefactor
/// is fixed by this entrywise form (one factor `√(2 sinh 2K2)` per site).
#[derive(Debug, Clone)]
pub struct TransferMatrices {
    pub sites: usize,
    pub v1: DMatrix<f64>,
    pub v3_diag: Vec<f64>,
    pub v: DMatrix<f64>,
    pub vsym: DMatrix<f64>,
}

fn row_spins(b: usize, sites: usize) -> Vec<f64> {
    (0..sites).map(|i| if b & bit(i, sites) == 0 { 1.0 } else { -1.0 }).collect()
}

/// `Σ_j σ_j σ_{j+1 mod L}` for a basis row.
pub fn row_bond_sum(b: usize, sites: usize) -> f64 {
    let s = row_spins(b, sites);
    (0..sites).map(|i| s[i] * s[(i + 1) % sites]).sum()
}

pub fn transfer_matrices(spec: &LatticeSpec) -> Result<TransferMatrices> {
    let sites = spec.width();
    let dim = 1usize << sites;
    let kd = dual_coupling(spec.k2)?;
    let pref = (2.0 * (2.0 * spec.k2).sinh()).sqrt();
    let local = nalgebra::Matrix2::new(kd.cosh(), kd.sinh(), kd.sinh(), kd.cosh()) * pref;
    let mut v1 = DMatrix::<f64>::from_element(1, 1, 1.0);
    for _ in 0..sites {
        v1 = v1.kronecker(&local);
    }
    let v3_diag: Vec<f64> = (0..dim).map(|b| (spec.k1 * row_bond_sum(b, sites)).exp()).collect();
    let v = DMatrix::from_fn(dim, dim, |r, c| v3_diag[r] * v1[(r, c)]);
    let vsym = DMatrix::from_fn(dim, dim, |r, c| v3_diag[r].sqrt() * v1[(r, c)] * v3_diag[c].sqrt());
    Ok(TransferMatrices {
        sites,
        v1,
        v3_diag,
        v,
        vsym,
    })
}

/// `V_M` as a dense operator.
pub fn transfer_matrix(spec: &LatticeSpec) -> Result<DenseOperator> {
    Ok(complexify(&transfer_matrices(spec)?.v))
}

/// `Z_{MN} = tr(V_M^{2N})`, evaluated through the spectrum of `V^(sym)`.
pub fn partition_function_transfer(spec: &LatticeSpec) -> Result<f64> {
    let tm = transfer_matrices(spec)?;
    let eig = SymmetricEigen::new(tm.vsym).eigenvalues;
    let p = spec.height() as i32;
    let mut terms: Vec<f64> = eig.iter().map(|l| l.powi(p)).collect();
    terms.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    Ok(terms.iter().sum())
}

/// `⟨Π σ³_{j_i k_i}⟩` on the torus, with `σ³_{jk} = V^{−k} σ³_j V^k` for
/// `V = V^(sym)` and row labels `k ∈ 0 … 2N−1`.
pub fn correlation_brute(spec: &LatticeSpec, insertions: &[(i64, usize)]) -> Result<f64> {
    if spec.n > MAX_CORRELATION_HALF_HEIGHT {
        return Err(OarError::SizeGuard(format!("half-height N={} exceeds 16", spec.n)));
    }
    let sites = spec.width();
    let m = spec.m as i64;
    for &(j, k) in insertions {
        if j < -m || j >= m || k >= spec.height() {
            return Err(OarError::InvalidParameter(format!("insertion ({j}, {k}) outside the lattice")));
        }
    }
    let tm = transfer_matrices(spec)?;
    let eig = SymmetricEigen::new(tm.vsym);
    let lmax = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let lam: Vec<f64> = eig.eigenvalues.iter().map(|l| l / lmax).collect();
    let q = &eig.eigenvectors;
    let dim = lam.len();
    let height = spec.height();

    // Later rows first so that every power in the cyclic trace is ≥ 0.
    let mut ins = insertions.to_vec();
    ins.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let powered = |p: usize| -> DMatrix<f64> { DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(dim, lam.iter().map(|l| l.powi(p as i32)))) };
    let z: f64 = lam.iter().map(|l| l.powi(height as i32)).sum();
    if ins.is_empty() {
        return Ok(1.0);
    }
    let sigma_in_eigenbasis = |j: i64| -> DMatrix<f64> {
        let i = (j + m) as usize;
        let diag: Vec<f64> = (0..dim).map(|b| if b & bit(i, sites) == 0 { 1.0 } else { -1.0 }).collect();
        let sq = DMatrix::from_fn(dim, dim, |r, c| diag[r] * q[(r, c)]);
        q.transpose() * sq
    };
    // tr(Λ^{2N−k1} S1 Λ^{k1−k2} S2 ⋯ S_n Λ^{k_n})
    let mut acc = powered(height - ins[0].1 + ins[ins.len() - 1].1);
    for w in 0..ins.len() {
        acc *= sigma_in_eigenbasis(ins[w].0);
        if w + 1 < ins.len() {
            acc *= powered(ins[w].1 - ins[w + 1].1);
        }
    }
    Ok(acc.trace() / z)
}
