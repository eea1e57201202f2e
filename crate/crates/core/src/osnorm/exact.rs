use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::seqspace::MatrixSeq;

use super::Structure;

/// ROW: `‖Σ X_k X_k*‖^{1/2}`; COL: `‖Σ X_k* X_k‖^{1/2}`;
/// OH: `‖Σ X_k ⊗ conj(X_k)‖^{1/2}`.
pub fn eval_exact(s: &Structure, x: &MatrixSeq) -> Result<f64> {
    let n = x.side();
    if n == 0 {
        return Err(Error::Dimension("matrix of side 0".into()));
    }
    if x.is_zero() {
        return match s {
            Structure::Row | Structure::Col | Structure::Oh => Ok(0.0),
            other => Err(Error::Usage(format!("{other} has no closed-form evaluator"))),
        };
    }
    let acc = match s {
        Structure::Row => x
            .components()
            .fold(ComplexMatrix::zeros(n, n), |acc, (_, m)| acc + m * m.adjoint()),
        Structure::Col => x
            .components()
            .fold(ComplexMatrix::zeros(n, n), |acc, (_, m)| acc + m.adjoint() * m),
        Structure::Oh => x.components().fold(ComplexMatrix::zeros(n * n, n * n), |acc, (_, m)| {
            acc + m.kronecker(&linalg::conj(m))
        }),
        other => return Err(Error::Usage(format!("{other} has no closed-form evaluator"))),
    };
    Ok(linalg::operator_norm(&acc)?.sqrt())
}

/// The `nm x nm` matrix `((i,k),(j,l)) ↦ Σ_s x_ij[s] z_kl[s]`, bilinear in
/// both arguments.
pub fn pairing_amplified(x: &MatrixSeq, z: &MatrixSeq) -> ComplexMatrix {
    let (n, m) = (x.side(), z.side());
    let mut out = ComplexMatrix::zeros(n * m, n * m);
    for (k, xs) in x.components() {
        if let Some(zs) = z.component(k) {
            out += xs.kronecker(zs);
        }
    }
    out
}
