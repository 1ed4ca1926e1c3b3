//! Unitarity measures of a process matrix.

use crate::error::{Error, Result};
use crate::ptm::ProcessMatrix;

/// Tolerance on the first row when checking trace preservation.
pub const TP_TOLERANCE: f64 = 1e-8;

/// `u(G) = Tr(W^T W) / (d^2 - 1)` with `W` the block acting on traceless
/// operators.
pub fn unitarity_u(g: &ProcessMatrix) -> Result<f64> {
    let dev = g.trace_preservation_error();
    if dev > TP_TOLERANCE {
        return Err(Error::NotTracePreserving(dev));
    }
    let n = g.matrix().nrows();
    let w = g.matrix().view((1, 1), (n - 1, n - 1));
    Ok(w.norm_squared() / (n - 1) as f64)
}

/// `ũ(G) = |det G|^(2/(d^2-1))`; zero for singular `G`.
pub fn unitarity_tilde(g: &ProcessMatrix) -> f64 {
    let n = g.matrix().nrows();
    let ld = g.log_abs_det();
    if ld == f64::NEG_INFINITY {
        0.0
    } else {
        (2.0 / (n - 1) as f64 * ld).exp()
    }
}
