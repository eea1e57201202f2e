//! MAX(ℓ_p) evaluator.
//!
//! Upper bounds are costs `‖A‖ · max_i ‖d_i‖_p · ‖B‖` of explicit
//! factorizations `x = A · diag(d_1, …, d_N) · B`:
//! - entry factorizations, one diagonal slot per nonzero entry, plain or
//!   weighted by the entry norms;
//! - sign-matrix factorizations: each nonzero row (or column) is spread over
//!   the `2^{m-1}` rows of the orthogonal sign matrix `A_m`, which for `x^n`
//!   is exactly `x^n = A · D · A_n`;
//! - a search over positive diagonal scalings `x = S^{-1}(S x T)T^{-1}`
//!   applied on top of the families above.
//!
//! Lower bounds come from duality against MIN(ℓ_q), the R/C/OH norms for
//! `p ≤ 2`, and the largest entry.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix};
use crate::rng::{derive_seed, rng_from_seed};
use crate::seqspace::{a_n, check_exponent, FinSeq, MatrixSeq};

use super::{eval_exact, pairing_lower, Budget, NormEstimate, Structure};

/// Rows or columns with more nonzero entries than this skip the sign-matrix family.
pub const SIGN_FAMILY_CAP: usize = 12;

/// An explicit factorization `x = A · diag(d) · B`.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub a: ComplexMatrix,
    pub diag: Vec<FinSeq>,
    pub b: ComplexMatrix,
}

impl Factorization {
    /// `‖A‖ · max_i ‖d_i‖_p · ‖B‖`; the diagonal norm is the maximum of its entries.
    pub fn cost(&self, p: f64) -> Result<f64> {
        check_exponent(p)?;
        let dmax = self
            .diag
            .iter()
            .map(|d| d.lp_norm(p))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok(linalg::operator_norm(&self.a)? * dmax * linalg::operator_norm(&self.b)?)
    }

    /// Recomputes `A · diag(d) · B` as a matrix over `c_00`.
    pub fn product(&self) -> Result<MatrixSeq> {
        let n = self.a.nrows();
        let mut comps: std::collections::BTreeMap<usize, ComplexMatrix> = Default::default();
        for (slot, d) in self.diag.iter().enumerate() {
            let outer = self.a.column(slot) * self.b.row(slot);
            for (k, v) in d.iter() {
                *comps.entry(k).or_insert_with(|| ComplexMatrix::zeros(n, self.b.ncols())) += &outer * v;
            }
        }
        MatrixSeq::from_components(n, comps)
    }

    fn transpose(self) -> Self {
        Self { a: self.b.transpose(), diag: self.diag, b: self.a.transpose() }
    }
}

fn nonzero_entries(x: &MatrixSeq) -> Vec<(usize, usize, FinSeq)> {
    let mut out = Vec::new();
    for (i, row) in x.entries().into_iter().enumerate() {
        for (j, e) in row.into_iter().enumerate() {
            if !e.is_zero() {
                out.push((i, j, e));
            }
        }
    }
    out
}

/// One diagonal slot per nonzero entry, `A_{i,e} = B_{e,j} = sqrt(‖x_ij‖_p)`.
pub fn entry_factorization(x: &MatrixSeq, p: f64, weighted: bool) -> Result<Factorization> {
    check_exponent(p)?;
    let n = x.side();
    let entries = nonzero_entries(x);
    let mut a = ComplexMatrix::zeros(n, entries.len().max(1));
    let mut b = ComplexMatrix::zeros(entries.len().max(1), n);
    let mut diag = Vec::with_capacity(entries.len());
    for (slot, (i, j, e)) in entries.into_iter().enumerate() {
        let w = if weighted { e.lp_norm(p)? } else { 1.0 };
        a[(i, slot)] = c(w.sqrt(), 0.0);
        b[(slot, j)] = c(w.sqrt(), 0.0);
        diag.push(e.scale(c(1.0 / w, 0.0)));
    }
    if diag.is_empty() {
        diag.push(FinSeq::zero());
    }
    Ok(Factorization { a, diag, b })
}

/// Spreads every nonzero row over the rows of the sign matrix `A_m`.
pub fn sign_row_factorization(x: &MatrixSeq) -> Result<Factorization> {
    let n = x.side();
    let entries = x.entries();
    let mut blocks = Vec::new();
    for (i, row) in entries.iter().enumerate() {
        let cols: Vec<usize> = (0..n).filter(|&j| !row[j].is_zero()).collect();
        if cols.is_empty() {
            continue;
        }
        if cols.len() > SIGN_FAMILY_CAP {
            return Err(Error::Size(format!("row {i} has {} nonzero entries", cols.len())));
        }
        blocks.push((i, cols.clone(), a_n(cols.len())?));
    }
    let total: usize = blocks.iter().map(|(_, _, s)| s.nrows()).sum::<usize>().max(1);
    let mut a = ComplexMatrix::zeros(n, total);
    let mut b = ComplexMatrix::zeros(total, n);
    let mut diag = Vec::with_capacity(total);
    let mut slot = 0;
    for (i, cols, signs) in blocks {
        let rows = signs.nrows();
        for r in 0..rows {
            a[(i, slot)] = c(1.0 / rows as f64, 0.0);
            let mut d = FinSeq::zero();
            for (l, &j) in cols.iter().enumerate() {
                b[(slot, j)] = signs[(r, l)];
                d = d.add(&entries[i][j].scale(signs[(r, l)]));
            }
            diag.push(d);
            slot += 1;
        }
    }
    if diag.is_empty() {
        diag.push(FinSeq::zero());
    }
    Ok(Factorization { a, diag, b })
}

/// Column version of [`sign_row_factorization`].
pub fn sign_col_factorization(x: &MatrixSeq) -> Result<Factorization> {
    Ok(sign_row_factorization(&x.transpose())?.transpose())
}

/// Best cost over the closed-form factorization families.
pub fn max_upper_quick(x: &MatrixSeq, p: f64) -> Result<(f64, String)> {
    check_exponent(p)?;
    if x.is_zero() {
        return Ok((0.0, "zero".into()));
    }
    let mut best = (x.sum_entry_norms(p)?, "entry-sum".to_string());
    let mut consider = |v: f64, name: &str| {
        if v < best.0 {
            best = (v, name.to_string());
        }
    };
    consider(entry_factorization(x, p, false)?.cost(p)?, "entry-factorization");
    consider(entry_factorization(x, p, true)?.cost(p)?, "weighted-entry-factorization");
    if let Ok(f) = sign_row_factorization(x) {
        consider(f.cost(p)?, "sign-row-factorization");
    }
    if let Ok(f) = sign_col_factorization(x) {
        consider(f.cost(p)?, "sign-col-factorization");
    }
    Ok(best)
}

/// Cheapest families only; the sign families are too costly to re-run inside
/// the scaling search.
fn entry_upper(x: &MatrixSeq, p: f64) -> Result<f64> {
    Ok(x.sum_entry_norms(p)?
        .min(entry_factorization(x, p, false)?.cost(p)?)
        .min(entry_factorization(x, p, true)?.cost(p)?))
}

fn scale_rows_cols(x: &MatrixSeq, s: &[f64], t: &[f64]) -> MatrixSeq {
    let n = x.side();
    let left = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| c(s[i], 0.0)));
    let right = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| c(t[i], 0.0)));
    x.compress(&left, &right).expect("square scalings")
}

fn scaled_cost(x: &MatrixSeq, p: f64, logs: &[f64]) -> f64 {
    let n = x.side();
    let s: Vec<f64> = logs[..n].iter().map(|v| v.exp()).collect();
    let t: Vec<f64> = logs[n..].iter().map(|v| v.exp()).collect();
    let inv = |v: &[f64]| 1.0 / v.iter().cloned().fold(f64::INFINITY, f64::min);
    let inner = entry_upper(&scale_rows_cols(x, &s, &t), p).unwrap_or(f64::INFINITY);
    inv(&s) * inner * inv(&t)
}

fn golden_min(mut lo: f64, mut hi: f64, iters: usize, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..iters {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    if fa <= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Coordinate search over log row/column scalings.
fn scaling_search(x: &MatrixSeq, p: f64, budget: &Budget) -> f64 {
    let n = x.side();
    let mut rng = rng_from_seed(derive_seed(budget.seed, 0x5CA1));
    let starts = (budget.starts / 8).max(1);
    let sweeps = (budget.max_iter / 100).clamp(1, 4);
    let mut best = f64::INFINITY;
    for start in 0..starts {
        let mut logs: Vec<f64> = if start == 0 {
            vec![0.0; 2 * n]
        } else {
            (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        let mut current = scaled_cost(x, p, &logs);
        for _ in 0..sweeps {
            for coord in 0..2 * n {
                let centre = logs[coord];
                let (arg, val) = golden_min(centre - 2.0, centre + 2.0, 24, |v| {
                    let mut trial = logs.clone();
                    trial[coord] = v;
                    scaled_cost(x, p, &trial)
                });
                if val < current {
                    current = val;
                    logs[coord] = arg;
                }
            }
        }
        best = best.min(current);
    }
    best
}

/// Interval for `‖x‖_{M_n(max(ℓ_p))}`.
pub fn eval_max(p: f64, x: &MatrixSeq, budget: &Budget) -> Result<NormEstimate> {
    check_exponent(p)?;
    if x.is_zero() {
        return Ok(NormEstimate::exact(0.0, "zero"));
    }
    let (upper, upper_method) = max_upper_quick(x, p)?;
    let mut est = NormEstimate {
        lower: x.max_entry_norm(p)?,
        upper,
        lower_method: "entry-sup".into(),
        upper_method,
    };
    if let Some((v, m)) = pairing_lower(&Structure::Max(p), x, budget)? {
        est.raise_lower(v, &m);
    }
    if p <= 2.0 {
        // ‖D‖_{ℓ_2} ≤ ‖D‖_{ℓ_p} for p ≤ 2, so MAX(ℓ_2) bounds MAX(ℓ_p) from below.
        for s in [Structure::Row, Structure::Col, Structure::Oh] {
            let v = eval_exact(&s, x)?;
            est.raise_lower(v, &format!("{s} norm (max(l2) is maximal)"));
        }
        if p < 2.0 {
            if let Some((v, m)) = pairing_lower(&Structure::Max(2.0), x, budget)? {
                est.raise_lower(v, &format!("monotone in p: {m} at p=2"));
            }
        }
    }
    if est.upper - est.lower > 1e-9 * est.upper {
        let scaled = scaling_search(x, p, budget);
        est.reduce_upper(scaled, "scaled-factorization-search");
    }
    est.lower = est.lower.min(est.upper);
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqspace::{x_n, y_n};
    use approx::assert_relative_eq;

    #[test]
    fn factorizations_reconstruct_their_input() {
        let mut rng = crate::rng::rng_from_seed(11);
        let comps: Vec<_> = (1..=3)
            .map(|k| (k, ComplexMatrix::from_row_slice(3, 3, &crate::rng::gaussian_vec(&mut rng, 9))))
            .collect();
        let x = MatrixSeq::from_components(3, comps).unwrap();
        for f in [
            entry_factorization(&x, 2.0, false).unwrap(),
            entry_factorization(&x, 2.0, true).unwrap(),
            sign_row_factorization(&x).unwrap(),
            sign_col_factorization(&x).unwrap(),
        ] {
            let back = f.product().unwrap();
            assert!(back.sub(&x).unwrap().frobenius() < 1e-12);
        }
    }

    #[test]
    fn sign_factorization_of_xn_costs_n_to_one_over_p() {
        for n in 1..=6 {
            let f = sign_row_factorization(&x_n(n)).unwrap();
            for p in [2.0, 4.0, f64::INFINITY] {
                let want = (n as f64).powf(1.0 / p);
                assert_relative_eq!(f.cost(p).unwrap(), want, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn xn_intervals() {
        let b = Budget::default();
        let est = eval_max(2.0, &x_n(4), &b).unwrap();
        assert!(est.lower <= 2.0 + 1e-12 && est.upper >= 2.0 - 1e-12);
        assert!(est.gap() <= 1e-6);
        let est = eval_max(4.0, &x_n(4), &b).unwrap();
        assert!(est.contains(2f64.sqrt(), 1e-9), "{est:?}");
        assert!(est.rel_gap(2f64.sqrt()) <= 0.02);
    }

    #[test]
    fn yn_max_two_is_n() {
        let est = eval_max(2.0, &y_n(3), &Budget::default()).unwrap();
        assert!(est.contains(3.0, 1e-9), "{est:?}");
    }

    #[test]
    fn single_entry_is_exact() {
        let e = MatrixSeq::single_entry(1, 0, 0, &FinSeq::basis(1));
        for p in [1.0, 2.0, 4.0] {
            let est = eval_max(p, &e, &Budget::default()).unwrap();
            assert_relative_eq!(est.lower, 1.0, epsilon = 1e-12);
            assert_relative_eq!(est.upper, 1.0, epsilon = 1e-12);
        }
    }
}
