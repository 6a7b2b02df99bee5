use num_complex::Complex64;
use thiserror::Error;

use crate::domain::BranchClass;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite input")]
    NonFinite,

    #[error("pole of the map at z = {0}")]
    Pole(Complex64),

    #[error("z = {0} lies on the branch cut of the power")]
    BranchCut(Complex64),

    #[error("outside the admissible range: {0}")]
    OutOfRange(String),

    #[error("not applicable: {0}")]
    NotApplicable(&'static str),

    #[error("degenerate profile: {0}")]
    Degenerate(&'static str),

    #[error("no main branch exists ({0:?})")]
    NoBranch(BranchClass),

    #[error("w = {0} lies on the cut set")]
    OnCut(Complex64),

    #[error("evaluation did not converge (residual {residual:e} after {iterations} iterations)")]
    Convergence { residual: f64, iterations: usize },

    #[error("point is not on the boundary curve")]
    NotOnBoundary,

    #[error("probe too close to the image contour (distance {0:e})")]
    IllConditioned(f64),

    #[error("winding quadrature under-resolved (last value {0})")]
    UnderResolved(f64),

    #[error("root not bracketed on [{0}, {1}]")]
    NotBracketed(f64, f64),
}
