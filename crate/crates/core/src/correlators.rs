//! Spin-spin correlators of quasi-free states through Araki's self-dual
//! field `Ψ(ξ, η) = a(ξ − iη) + a†(conj(ξ + iη))`.
//!
//! An equal-time product `σ³_{j1} ⋯ σ³_{jq}` is a product of strings
//! `Π_l Ψ(0, iδ_l) Ψ(δ_{l+1}, 0)`, and its expectation in a quasi-free state is
//! the Pfaffian of the matrix of self-dual two-point values. When all
//! same-type pairings vanish the Pfaffian collapses to a Toeplitz determinant.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{OarError, Result};
use crate::quadrature::{Pairing, SmearedVector};
use crate::rgflow::TwoPointState;

const ANTISYMMETRY_TOLERANCE: f64 = 1e-13;

/// Maximal number of `Ψ(0,iδ)Ψ(δ,0)` pairs in one correlator.
pub const MAX_STRING_PAIRS: usize = 64;

/// Smearing `(ξ, η)` of the self-dual field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfDualVector {
    pub xi: SmearedVector,
    pub eta: SmearedVector,
}

impl SelfDualVector {
    pub fn new(xi: SmearedVector, eta: SmearedVector) -> Self {
        Self { xi, eta }
    }

    /// `Ψ(0, iδ_j)`.
    pub fn imaginary_site(j: i64) -> Self {
        Self::new(SmearedVector::zero(), SmearedVector::delta_scaled(j, Complex64::new(0.0, 1.0)))
    }

    /// `Ψ(δ_j, 0)`.
    pub fn real_site(j: i64) -> Self {
        Self::new(SmearedVector::delta(j), SmearedVector::zero())
    }

    /// `(f, g)` with `Ψ(ξ, η) = a(f) + a†(g)`: `f = ξ − iη`, `g = conj(ξ + iη)`.
    pub fn field_parts(&self) -> (SmearedVector, SmearedVector) {
        let i = Complex64::new(0.0, 1.0);
        let f = self.xi.add_scaled(-i, &self.eta);
        let g = self.xi.add_scaled(i, &self.eta).conj();
        (f, g)
    }
}

/// `ω(Ψ(v1)Ψ(v2))` from the four `a`/`a†` pairings.
///
/// `ω(a a)` and `ω(a† a)` are reduced to the two independent functions via
/// `ω(a(f1)a(f2)) = conj ω(a†(f2)a†(f1))` and the CAR
/// `ω(a†(g)a(f)) = ⟨f, g⟩ − ω(a(f)a†(g))`.
pub fn self_dual_two_point(state: &dyn TwoPointState, v1: &SelfDualVector, v2: &SelfDualVector) -> Result<Complex64> {
    let (f1, g1) = v1.field_parts();
    let (f2, g2) = v2.field_parts();
    let mut acc = Complex64::new(0.0, 0.0);
    if !f1.is_zero() && !f2.is_zero() {
        acc += state.two_point(Pairing::ADagADag, &f2, &f1)?.conj();
    }
    if !f1.is_zero() && !g2.is_zero() {
        acc += state.two_point(Pairing::AADag, &f1, &g2)?;
    }
    if !g1.is_zero() && !f2.is_zero() {
        acc += f2.inner(&g1) - state.two_point(Pairing::AADag, &f2, &g1)?;
    }
    if !g1.is_zero() && !g2.is_zero() {
        acc += state.two_point(Pairing::ADagADag, &g1, &g2)?;
    }
    Ok(acc)
}

/// Complex antisymmetric matrix of even dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix {
    a: DMatrix<Complex64>,
}

impl SkewMatrix {
    /// Validates `A^T = −A` to 1e-13 (relative to the largest entry).
    pub fn new(a: DMatrix<Complex64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(OarError::InvalidParameter("skew matrix must be square".into()));
        }
        if a.nrows() % 2 == 1 {
            return Err(OarError::OddDimension(a.nrows()));
        }
        let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let dev = (&a + a.transpose()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if dev > ANTISYMMETRY_TOLERANCE * scale {
            return Err(OarError::NotAntisymmetric(dev));
        }
        Ok(Self { a })
    }

    /// Builds `A_ij = upper(i, j)` for `i < j` and `A_ji = −A_ij`.
    pub fn from_upper<F>(dim: usize, mut upper: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> Result<Complex64>,
    {
        if dim % 2 == 1 {
            return Err(OarError::OddDimension(dim));
        }
        let mut a = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in i + 1..dim {
                let v = upper(i, j)?;
                a[(i, j)] = v;
                a[(j, i)] = -v;
            }
        }
        Ok(Self { a })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.a
    }
}

/// Pfaffian by Parlett–Reid skew tridiagonalisation with partial pivoting.
pub fn pfaffian(m: &SkewMatrix) -> Complex64 {
    let n = m.dim();
    let mut a = m.a.clone();
    let mut pf = Complex64::new(1.0, 0.0);
    let mut k = 0;
    while k + 1 < n {
        // Largest entry in column k below the diagonal becomes the pivot.
        let mut kp = k + 1;
        for i in k + 2..n {
            if a[(i, k)].norm() > a[(kp, k)].norm() {
                kp = i;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = a[(k, k + 1)];
        if piv == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<Complex64> = (k + 2..n).map(|j| a[(k, j)] / piv).collect();
            let col: Vec<Complex64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Pfaffian as the signed sum over perfect matchings: for `J = (j1<⋯<jn)`
/// and partners `K = (k1,…,kn)` with `j_i < k_i`, the term is
/// `(−1)^{n(n−1)/2} sgn(j1…jn k1…kn) Π A_{j_i k_i}`.
pub fn pfaffian_combinatorial(m: &SkewMatrix) -> Result<Complex64> {
    let dim = m.dim();
    if dim > 12 {
        return Err(OarError::InvalidParameter(format!(
            "combinatorial Pfaffian is limited to dimension 12, got {dim}"
        )));
    }
    let n = dim / 2;
    let mut total = Complex64::new(0.0, 0.0);
    let mut js = Vec::with_capacity(n);
    let mut ks = Vec::with_capacity(n);
    let mut used = vec![false; dim];
    enumerate_matchings(&m.a, &mut used, &mut js, &mut ks, &mut total);
    let global = if (n * n.saturating_sub(1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(total * global)
}

fn enumerate_matchings(
    a: &DMatrix<Complex64>,
    used: &mut [bool],
    js: &mut Vec<usize>,
    ks: &mut Vec<usize>,
    total: &mut Complex64,
) {
    let Some(j) = used.iter().position(|u| !u) else {
        let perm: Vec<usize> = js.iter().chain(ks.iter()).copied().collect();
        let term: Complex64 = js.iter().zip(ks.iter()).map(|(&j, &k)| a[(j, k)]).product();
        *total += term * permutation_sign(&perm);
        return;
    };
    used[j] = true;
    for k in j + 1..used.len() {
        if used[k] {
            continue;
        }
        used[k] = true;
        js.push(j);
        ks.push(k);
        enumerate_matchings(a, used, js, ks, total);
        js.pop();
        ks.pop();
        used[k] = false;
    }
    used[j] = false;
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Determinant by LU with partial pivoting.
pub fn determinant(a: &DMatrix<Complex64>) -> Complex64 {
    a.clone().lu().determinant()
}

/// Lag map `d ↦ C_d = ω(Ψ(0, iδ_d) Ψ(δ_0, 0))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzSymbol {
    pub entries: BTreeMap<i64, f64>,
}

impl ToeplitzSymbol {
    pub fn get(&self, d: i64) -> Result<f64> {
        self.entries.get(&d).copied().ok_or(OarError::MissingLag(d))
    }
}

/// Computes `C_d` for `d ∈ [lo, hi]` from self-dual two-point values.
pub fn toeplitz_symbol(state: &dyn TwoPointState, lo: i64, hi: i64) -> Result<ToeplitzSymbol> {
    let mut entries = BTreeMap::new();
    for d in lo..=hi {
        let v = self_dual_two_point(state, &SelfDualVector::imaginary_site(d), &SelfDualVector::real_site(0))?;
        entries.insert(d, v.re);
    }
    Ok(ToeplitzSymbol { entries })
}

/// `⟨σ³_0 σ³_n⟩ = det T` with `T_{rc} = C_{c−r−1}`, `r, c ∈ 0..n`.
pub fn toeplitz_correlation(sym: &ToeplitzSymbol, separation: usize) -> Result<f64> {
    if separation == 0 {
        return Ok(1.0);
    }
    let n = separation;
    let mut t = DMatrix::<f64>::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            t[(r, c)] = sym.get(c as i64 - r as i64 - 1)?;
        }
    }
    Ok(t.lu().determinant())
}

/// Value of an even spin correlator plus the discarded imaginary part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinCorrelation {
    pub value: f64,
    pub imag_residue: f64,
}

/// Removes adjacent equal sites pairwise (`σ² = 1`).
pub fn contract_repeated(sites: &[i64]) -> Result<Vec<i64>> {
    if sites.windows(2).any(|w| w[0] > w[1]) {
        return Err(OarError::UnsortedSites);
    }
    let mut out: Vec<i64> = Vec::with_capacity(sites.len());
    for &s in sites {
        if out.last() == Some(&s) {
            out.pop();
        } else {
            out.push(s);
        }
    }
    Ok(out)
}

/// The ordered self-dual factors `Ψ(0,iδ_l)Ψ(δ_{l+1},0)` of all strings
/// `[j_{2k−1}, j_{2k})`.
pub fn string_factors(sites: &[i64]) -> Result<Vec<SelfDualVector>> {
    let sites = contract_repeated(sites)?;
    if sites.len() % 2 == 1 {
        return Err(OarError::InvalidParameter("odd number of sites has no string form".into()));
    }
    let pairs: usize = sites.chunks(2).map(|p| (p[1] - p[0]) as usize).sum();
    if pairs > MAX_STRING_PAIRS {
        return Err(OarError::StringTooLong(pairs));
    }
    let mut out = Vec::with_capacity(2 * pairs);
    for p in sites.chunks(2) {
        for l in p[0]..p[1] {
            out.push(SelfDualVector::imaginary_site(l));
            out.push(SelfDualVector::real_site(l + 1));
        }
    }
    Ok(out)
}

/// Skew matrix `A_ij = ω(Ψ_i Ψ_j)`, `i < j`, of the string factors.
pub fn string_skew_matrix(state: &dyn TwoPointState, factors: &[SelfDualVector]) -> Result<SkewMatrix> {
    if !state.translation_invariant() {
        return SkewMatrix::from_upper(factors.len(), |i, j| self_dual_two_point(state, &factors[i], &factors[j]));
    }
    let mut seen: HashMap<PairKey, Complex64> = HashMap::new();
    SkewMatrix::from_upper(factors.len(), |i, j| {
        let key = pair_key(&factors[i], &factors[j]);
        if let Some(v) = seen.get(&key) {
            return Ok(*v);
        }
        let v = self_dual_two_point(state, &factors[i], &factors[j])?;
        seen.insert(key, v);
        Ok(v)
    })
}

/// Shape of a pair of smearings up to a common shift: offsets relative to the
/// first nonempty part, plus the exact coefficient bits.
type PairKey = Vec<(i64, Vec<(u64, u64)>)>;

fn pair_key(v1: &SelfDualVector, v2: &SelfDualVector) -> PairKey {
    let parts = [&v1.xi, &v1.eta, &v2.xi, &v2.eta];
    let anchor = parts.iter().find(|p| !p.coeffs.is_empty()).map_or(0, |p| p.offset);
    parts
        .iter()
        .map(|p| {
            let bits = p.coeffs.iter().map(|c| (c.re.to_bits(), c.im.to_bits())).collect();
            (if p.coeffs.is_empty() { 0 } else { p.offset - anchor }, bits)
        })
        .collect()
}

/// `⟨σ³_{j1} ⋯ σ³_{jq}⟩` for weakly increasing sites.
pub fn spin_spin_correlation(state: &dyn TwoPointState, sites: &[i64]) -> Result<SpinCorrelation> {
    let reduced = contract_repeated(sites)?;
    if reduced.len() % 2 == 1 {
        return Ok(SpinCorrelation {
            value: 0.0,
            imag_residue: 0.0,
        });
    }
    let factors = string_factors(&reduced)?;
    if factors.is_empty() {
        return Ok(SpinCorrelation {
            value: 1.0,
            imag_residue: 0.0,
        });
    }
    let pf = pfaffian(&string_skew_matrix(state, &factors)?);
    Ok(SpinCorrelation {
        value: pf.re,
        imag_residue: pf.im,
    })
}

/// Fitted slope of `log y` against `log x` by least squares.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| {
        let dx = x.ln() - mx;
        (a + dx * (y.ln() - my), b + dx * dx)
    });
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_by_two_pfaffian() {
        let m = SkewMatrix::from_upper(2, |_, _| Ok(c(1.5, -0.5))).unwrap();
        assert_eq!(pfaffian(&m), c(1.5, -0.5));
        assert_eq!(pfaffian_combinatorial(&m).unwrap(), c(1.5, -0.5));
    }

    #[test]
    fn four_by_four_expansion() {
        let w = |i: usize, j: usize| c((i * 7 + j * 3) as f64 * 0.1, (i + 2 * j) as f64 * 0.05);
        let m = SkewMatrix::from_upper(4, |i, j| Ok(w(i, j))).unwrap();
        let expected = w(0, 1) * w(2, 3) - w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2);
        assert!((pfaffian(&m) - expected).norm() < 1e-14);
        assert!((pfaffian_combinatorial(&m).unwrap() - expected).norm() < 1e-14);
    }

    #[test]
    fn invalid_skew_inputs() {
        assert_eq!(SkewMatrix::new(DMatrix::zeros(3, 3)), Err(OarError::OddDimension(3)));
        let mut a = DMatrix::zeros(2, 2);
        a[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(SkewMatrix::new(a), Err(OarError::NotAntisymmetric(_))));
    }

    #[test]
    fn contraction_and_strings() {
        assert_eq!(contract_repeated(&[0, 1, 1, 2]).unwrap(), vec![0, 2]);
        assert_eq!(contract_repeated(&[3, 3]).unwrap(), Vec::<i64>::new());
        assert_eq!(contract_repeated(&[2, 1]), Err(OarError::UnsortedSites));
        assert_eq!(string_factors(&[0, 2]).unwrap().len(), 4);
        assert_eq!(string_factors(&[0, 100]), Err(OarError::StringTooLong(100)));
    }

    #[test]
    fn toeplitz_small_layouts() {
        let mut entries = BTreeMap::new();
        for (d, v) in [(-2, 0.3), (-1, 0.7), (0, 0.1), (1, -0.2)] {
            entries.insert(d, v);
        }
        let sym = ToeplitzSymbol { entries };
        assert_abs_diff_eq!(toeplitz_correlation(&sym, 1).unwrap(), 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(toeplitz_correlation(&sym, 2).unwrap(), 0.7 * 0.7 - 0.3 * 0.1, epsilon = 1e-15);
        assert_eq!(toeplitz_correlation(&sym, 3), Err(OarError::MissingLag(-3)));
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..10).map(|d| (d as f64, 3.0 * (d as f64).powf(-0.25))).collect();
        assert_abs_diff_eq!(log_log_slope(&pts), -0.25, epsilon = 1e-12);
    }
}
