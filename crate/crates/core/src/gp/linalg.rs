use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};

pub(crate) const JITTER_START: f64 = 1e-9;
pub(crate) const JITTER_MAX: f64 = 1e-6;

/// Cholesky factorization with escalating diagonal jitter.
///
/// If `try_exact` is set the matrix is first factorized as given; otherwise jitter
/// starts at 1e-9. Jitter grows ×10 up to 1e-6, after which the matrix is rejected.
pub(crate) fn cholesky_jittered(
    mat: &DMatrix<f64>,
    try_exact: bool,
) -> Result<(Cholesky<f64, Dyn>, f64)> {
    if try_exact {
        if let Some(ch) = Cholesky::new(mat.clone()) {
            return Ok((ch, 0.0));
        }
    }
    let mut jitter = JITTER_START;
    while jitter <= JITTER_MAX * (1.0 + 1e-9) {
        let mut m = mat.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += jitter;
        }
        if let Some(ch) = Cholesky::new(m) {
            return Ok((ch, jitter));
        }
        jitter *= 10.0;
    }
    Err(Error::numeric(format!(
        "Cholesky factorization failed for a {}x{} matrix even with jitter {JITTER_MAX:e}",
        mat.nrows(),
        mat.ncols()
    )))
}
