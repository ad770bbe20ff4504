use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OarError {
    #[error("unsupported Daubechies order p = {0} (supported: 1..=10)")]
    UnsupportedOrder(usize),

    #[error("filter invariant violated: {invariant} (deviation {deviation:.3e})")]
    FilterInvariant {
        invariant: &'static str,
        deviation: f64,
    },

    #[error("degenerate couplings: t1 = t3 = 0")]
    DegenerateCouplings,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: coarse = {coarse:.12e}, fine = {fine:.12e}; refine the panels")]
    QuadratureNonConvergence { coarse: f64, fine: f64 },

    #[error("tail mass {tail_mass:.3e} of |s_hat|^2 beyond k = {k_max:.3e} exceeds tolerance {tolerance:.1e}")]
    TailMassUnsatisfiable {
        k_max: f64,
        tail_mass: f64,
        tolerance: f64,
    },

    #[error("filter D{taps} inadmissible at Sobolev order {order}: the weighted norm diverges")]
    InadmissibleFilter { taps: usize, order: u32 },

    #[error("matrix of odd dimension {0} has no Pfaffian")]
    OddDimension(usize),

    #[error("matrix is not antisymmetric (max |A + A^T| = {0:.3e})")]
    NotAntisymmetric(f64),

    #[error("sites must be sorted in non-decreasing order")]
    UnsortedSites,

    #[error("string length {0} exceeds the limit of 64 factor pairs")]
    StringTooLong(usize),

    #[error("missing Toeplitz lag {0}")]
    MissingLag(i64),

    #[error("lattice size out of range: {0}")]
    SizeGuard(String),

    #[error("filter of length {taps} is longer than the chain of {sites} sites")]
    FilterTooLong { taps: usize, sites: usize },

    #[error("input is not a density matrix: {0}")]
    NotAState(String),
}

pub type Result<T> = std::result::Result<T, OarError>;
