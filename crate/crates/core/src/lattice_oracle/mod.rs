//! Exact dense linear algebra on small systems.
//!
//! Conventions shared by all submodules:
//!
//! * a row or chain of `L = 2M` sites carries site labels `j = −M … M−1`,
//!   stored at position `i = j + M`;
//! * basis index bit `L − 1 − i` belongs to position `i`, so position 0 is
//!   the most significant tensor factor;
//! * in the spin (σ³) basis a cleared bit is `|↑⟩` and a set bit is `|↓⟩`;
//! * in the occupation basis a set bit marks an occupied mode, which is
//!   `|+⟩ = (|↑⟩ + |↓⟩)/√2` under the Jordan–Wigner map.

use nalgebra::DMatrix;
use num_complex::Complex64;

mod channel;
mod chain;
mod fermions;
mod fixtures;
mod ising;

pub use channel::*;
pub use chain::*;
pub use fermions::*;
pub use fixtures::*;
pub use ising::*;

/// Dense operator on `2^L` states.
pub type DenseOperator = DMatrix<Complex64>;

/// Largest supported half-width.
pub const MAX_HALF_WIDTH: usize = 4;

pub(crate) fn bit(i: usize, sites: usize) -> usize {
    1 << (sites - 1 - i)
}

pub(crate) fn complexify(m: &DMatrix<f64>) -> DenseOperator {
    m.map(|x| Complex64::new(x, 0.0))
}

/// `Y = Aᵀ X A` for real `A` and complex `X`, using two real products.
pub(crate) fn conjugate_by_real(a: &DMatrix<f64>, x: &DenseOperator) -> DenseOperator {
    let re = x.map(|z| z.re);
    let im = x.map(|z| z.im);
    let at = a.transpose();
    let yr = &at * re * a;
    let yi = &at * im * a;
    DMatrix::from_fn(yr.nrows(), yr.ncols(), |r, c| Complex64::new(yr[(r, c)], yi[(r, c)]))
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &DenseOperator, b: &DenseOperator) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest entry modulus of `A − B`.
pub fn max_abs_diff(a: &DenseOperator, b: &DenseOperator) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
