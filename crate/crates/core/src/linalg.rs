//! Dense complex matrices and the spectral norm.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, column-major storage; constructors take row-major data.
pub type ComplexMatrix = DMatrix<Complex64>;

/// Largest dimension handled by a full SVD; above it the norm comes from
/// power iteration on `m* m`.
pub const SVD_DIM_LIMIT: usize = 64;
const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITER: usize = 100_000;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<ComplexMatrix> {
    if entries.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "{} entries for a {rows}x{cols} matrix",
            entries.len()
        )));
    }
    Ok(ComplexMatrix::from_row_slice(rows, cols, entries))
}

pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<ComplexMatrix> {
    let r = rows.len();
    let ccount = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|row| row.len() != ccount) {
        return Err(Error::Dimension("ragged rows".into()));
    }
    let data: Vec<Complex64> = rows.iter().flatten().map(|&v| c(v, 0.0)).collect();
    from_row_major(r, ccount, &data)
}

/// `E_{ij}` of size `rows x cols` (zero-based indices).
pub fn elementary(rows: usize, cols: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    m[(i, j)] = c(1.0, 0.0);
    m
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::Dimension("operator norm of an empty matrix".into()));
    }
    if m.iter().all(|z| *z == Complex64::ZERO) {
        return Ok(0.0);
    }
    if m.nrows().min(m.ncols()) <= SVD_DIM_LIMIT {
        let sv = m.clone().singular_values();
        Ok(sv.iter().cloned().fold(0.0, f64::max))
    } else {
        Ok(power_norm(m))
    }
}

/// Operator norm for matrices known to be nonempty.
pub(crate) fn opnorm(m: &ComplexMatrix) -> f64 {
    operator_norm(m).unwrap_or(0.0)
}

fn power_norm(m: &ComplexMatrix) -> f64 {
    let gram = m.adjoint() * m;
    let n = gram.nrows();
    // Deterministic start with no special alignment to coordinate axes.
    let mut v = nalgebra::DVector::<Complex64>::from_fn(n, |i, _| {
        c(1.0 + (i as f64 * 0.618_033_988_7).fract(), 0.5 * ((i as f64 * 0.414_213_562_3).fract()))
    });
    v /= c(v.norm(), 0.0);
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = &gram * &v;
        let next = w.norm();
        if next == 0.0 {
            return 0.0;
        }
        v = w / c(next, 0.0);
        if (next - lambda).abs() <= POWER_TOL * next {
            lambda = next;
            break;
        }
        lambda = next;
    }
    lambda.sqrt()
}

/// Kronecker product, `(a ⊗ b)_{(i,k),(j,l)} = a_ij b_kl`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Dimension("Kronecker product with an empty factor".into()));
    }
    Ok(a.kronecker(b))
}

/// Block-diagonal `diag(a, b)`.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    out
}

pub fn conj(m: &ComplexMatrix) -> ComplexMatrix {
    m.map(|z| z.conj())
}

pub fn is_zero(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| *z == Complex64::ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identity_has_unit_norm() {
        assert_relative_eq!(operator_norm(&identity(3)).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn empty_matrix_is_rejected() {
        let m = ComplexMatrix::zeros(0, 3);
        assert!(matches!(operator_norm(&m), Err(Error::Dimension(_))));
    }

    #[test]
    fn rank_one_unit_vectors() {
        let u = nalgebra::DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let v = nalgebra::DVector::from_vec(vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let m = &u * v.adjoint();
        assert_relative_eq!(operator_norm(&m).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn kron_of_identities_and_elementaries() {
        assert_eq!(kron(&identity(2), &identity(3)).unwrap(), identity(6));
        let e = elementary(2, 2, 0, 0);
        let k = kron(&e, &e).unwrap();
        assert_eq!(k, elementary(4, 4, 0, 0));
    }

    #[test]
    fn kron_index_convention() {
        let a = from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = from_real_rows(&[vec![0.0, 5.0], vec![6.0, 7.0]]).unwrap();
        let k = kron(&a, &b).unwrap();
        for i in 0..2 {
            for kk in 0..2 {
                for j in 0..2 {
                    for l in 0..2 {
                        assert_eq!(k[(i * 2 + kk, j * 2 + l)], a[(i, j)] * b[(kk, l)]);
                    }
                }
            }
        }
    }

    #[test]
    fn direct_sum_shapes() {
        let d = direct_sum(&identity(2), &ComplexMatrix::zeros(1, 1));
        assert_eq!(d.shape(), (3, 3));
        assert_eq!(d[(0, 0)], c(1.0, 0.0));
        assert_eq!(d[(1, 1)], c(1.0, 0.0));
        assert_eq!(d[(2, 2)], c(0.0, 0.0));
        let d = direct_sum(&ComplexMatrix::zeros(2, 2), &ComplexMatrix::zeros(3, 3));
        assert_eq!(d.shape(), (5, 5));
    }

    #[test]
    fn power_iteration_matches_svd() {
        let mut rng = crate::rng::rng_from_seed(3);
        let data = crate::rng::gaussian_vec(&mut rng, 70 * 66);
        let m = from_row_major(70, 66, &data).unwrap();
        let svd = m.clone().singular_values().max();
        assert_relative_eq!(power_norm(&m), svd, max_relative = 1e-6);
    }
}
