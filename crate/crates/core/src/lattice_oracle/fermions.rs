//! Fermionic operators in the occupation basis, where every `a_r`, `a†_r`
//! and Majorana operator is a signed partial permutation, and second
//! quantization of one-particle orthogonal maps.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::bit;

/// `(−1)^{#unoccupied positions before r}`, the Jordan–Wigner string value
/// on occupation basis state `b`.
pub fn string_sign(b: usize, r: usize, sites: usize) -> f64 {
    let before = (0..r).filter(|&l| b & bit(l, sites) == 0).count();
    if before % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Single-site change of basis: columns are `|−⟩` (empty) and `|+⟩`
/// (occupied) in spin coordinates.
pub fn occupation_to_spin(sites: usize) -> DMatrix<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let w = DMatrix::from_row_slice(2, 2, &[s, s, -s, s]);
    (0..sites).fold(DMatrix::from_element(1, 1, 1.0), |acc, _| acc.kronecker(&w))
}

/// `a_r` as a dense real matrix in the occupation basis.
pub fn annihilation_occ(r: usize, sites: usize) -> DMatrix<f64> {
    let dim = 1 << sites;
    let mut a = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        if b & bit(r, sites) != 0 {
            a[(b ^ bit(r, sites), b)] = string_sign(b, r, sites);
        }
    }
    a
}

/// Real Majorana-type generator `Σ_r c_r (a_r + a†_r)` (`odd = false`) or
/// `Σ_r c_r (a†_r − a_r)` (`odd = true`); the physical odd Majorana carries
/// an extra factor `i`.
#[derive(Debug, Clone)]
pub struct MajoranaGenerator {
    pub terms: Vec<(usize, f64)>,
    pub odd: bool,
}

impl MajoranaGenerator {
    /// Applies the generator from the left to a row-major `dim × dim` buffer
    /// and adds the result, times `i` when `times_i` is set, into `out`.
    pub fn apply_left_add(&self, sites: usize, x: &[Complex64], times_i: bool, out: &mut [Complex64]) {
        let dim = 1usize << sites;
        for &(r, c) in &self.terms {
            let mask = bit(r, sites);
            for b in 0..dim {
                // Row b of the input lands on row b ^ mask.
                let occupied = b & mask != 0;
                let mut coef = c * string_sign(b, r, sites);
                if self.odd && occupied {
                    coef = -coef;
                }
                let src = &x[b * dim..(b + 1) * dim];
                let dst_row = b ^ mask;
                let dst = &mut out[dst_row * dim..(dst_row + 1) * dim];
                if times_i {
                    for (d, s) in dst.iter_mut().zip(src) {
                        d.re -= coef * s.im;
                        d.im += coef * s.re;
                    }
                } else {
                    for (d, s) in dst.iter_mut().zip(src) {
                        d.re += coef * s.re;
                        d.im += coef * s.im;
                    }
                }
            }
        }
    }
}

fn parity_of_sum(xs: &[usize]) -> f64 {
    if xs.iter().sum::<usize>() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn members(b: usize, sites: usize) -> Vec<usize> {
    (0..sites).filter(|&i| b & bit(i, sites) != 0).collect()
}

/// Second quantization `Γ(u)` of a real orthogonal one-particle map in the
/// occupation basis: `⟨S'|Γ(u)|S⟩ = (−1)^{Σs + Σs'} det u[S', S]`.
pub fn second_quantize(u: &DMatrix<f64>) -> DMatrix<f64> {
    let sites = u.nrows();
    let dim = 1usize << sites;
    let mut out = DMatrix::zeros(dim, dim);
    let sets: Vec<Vec<usize>> = (0..dim).map(|b| members(b, sites)).collect();
    for (bc, s) in sets.iter().enumerate() {
        for (br, sp) in sets.iter().enumerate() {
            if s.len() != sp.len() {
                continue;
            }
            let val = if s.is_empty() {
                1.0
            } else {
                let minor = DMatrix::from_fn(s.len(), s.len(), |r, c| u[(sp[r], s[c])]);
                minor.determinant() * parity_of_sum(s) * parity_of_sum(sp)
            };
            out[(br, bc)] = val;
        }
    }
    out
}

/// Applies a word of creation (`true`) and annihilation (`false`) operators,
/// rightmost first, to occupation basis state `b`.
pub fn apply_word(word: &[(bool, usize)], b: usize, sites: usize) -> Option<(usize, f64)> {
    let mut state = b;
    let mut sign = 1.0;
    for &(create, r) in word.iter().rev() {
        let mask = bit(r, sites);
        let occupied = state & mask != 0;
        if occupied == create {
            return None;
        }
        sign *= string_sign(state, r, sites);
        state ^= mask;
    }
    Some((state, sign))
}

/// `tr(ρ X)` for a fermion word `X` and `ρ` in the occupation basis.
pub fn word_expectation(rho_occ: &DMatrix<Complex64>, word: &[(bool, usize)], sites: usize) -> Complex64 {
    (0..1usize << sites)
        .filter_map(|b| apply_word(word, b, sites).map(|(to, s)| rho_occ[(b, to)] * s))
        .sum()
}

/// Particle number of each occupation basis state.
pub fn particle_number(b: usize) -> u32 {
    b.count_ones()
}
