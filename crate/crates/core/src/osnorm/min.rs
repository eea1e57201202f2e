//! MIN(ℓ_p) evaluator.
//!
//! Lower bounds come from two independent ascent routes:
//! - bilinear route: maximize `‖Σ λ_i μ_j x_ij‖_p` over unit λ, μ ∈ ℓ_2^n
//!   by projected gradient steps on the product of spheres;
//! - functional route: maximize `‖Σ_k f_k X_k‖` over unit `f ∈ ℓ_q` by
//!   alternating between the top singular pair and the norming functional.
//!
//! The upper bound is the smallest of several Hölder-type inequalities.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::linalg::{self, c, ComplexMatrix};
use crate::rng::{derive_seed, gaussian_vec, rng_from_seed};
use crate::seqspace::{check_exponent, conjugate_exponent, lp_of_slice, MatrixSeq};

use super::{eval_exact, Budget, NormEstimate, Structure};

type CVec = DVector<Complex64>;

/// Norming functional of `s` in ℓ_p: returns `f` with `‖f‖_q = 1` and
/// `Σ f_k s_k = ‖s‖_p` (bilinear pairing). Zero input gives the zero vector.
pub fn dual_functional(s: &[Complex64], p: f64) -> Vec<Complex64> {
    let norm = lp_of_slice(s.iter().map(|z| z.norm()), p);
    if norm == 0.0 {
        return vec![Complex64::ZERO; s.len()];
    }
    let phase = |z: &Complex64| if z.norm() == 0.0 { Complex64::ZERO } else { z.conj() / z.norm() };
    if p.is_infinite() {
        let (best, _) = s
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bv), (i, z)| if z.norm() > bv { (i, z.norm()) } else { (bi, bv) });
        let mut f = vec![Complex64::ZERO; s.len()];
        f[best] = phase(&s[best]);
        return f;
    }
    if p == 1.0 {
        return s.iter().map(phase).collect();
    }
    s.iter().map(|z| phase(z) * (z.norm() / norm).powf(p - 1.0)).collect()
}

struct Components {
    mats: Vec<ComplexMatrix>,
    n: usize,
}

impl Components {
    fn new(x: &MatrixSeq) -> Self {
        Self { mats: x.components().map(|(_, m)| m.clone()).collect(), n: x.side() }
    }

    fn combine(&self, f: &[Complex64]) -> ComplexMatrix {
        self.mats
            .iter()
            .zip(f)
            .fold(ComplexMatrix::zeros(self.n, self.n), |acc, (m, fk)| acc + m * *fk)
    }

    fn bilinear(&self, lam: &CVec, mu: &CVec) -> Vec<Complex64> {
        self.mats.iter().map(|m| lam.dot(&(m * mu))).collect()
    }
}

fn unit(v: CVec) -> CVec {
    let n = v.norm();
    if n == 0.0 {
        v
    } else {
        v / c(n, 0.0)
    }
}

fn random_unit<R: Rng>(rng: &mut R, n: usize) -> CVec {
    unit(CVec::from_vec(gaussian_vec(rng, n)))
}

/// Projected gradient ascent on the product of unit spheres.
fn bilinear_ascent(comp: &Components, p: f64, mut lam: CVec, mut mu: CVec, budget: &Budget) -> f64 {
    let value = |l: &CVec, m: &CVec| lp_of_slice(comp.bilinear(l, m).iter().map(|z| z.norm()), p);
    let mut current = value(&lam, &mu);
    let mut step = 1.0;
    for _ in 0..budget.max_iter {
        let s = comp.bilinear(&lam, &mu);
        let f = dual_functional(&s, p);
        let fm = comp.combine(&f);
        let grad_l = (&fm * &mu).map(|z| z.conj());
        let grad_m = (fm.transpose() * &lam).map(|z| z.conj());
        let mut improved = false;
        while step > 1e-14 {
            let cand_l = unit(&lam + &grad_l * c(step, 0.0));
            let cand_m = unit(&mu + &grad_m * c(step, 0.0));
            let v = value(&cand_l, &cand_m);
            if v > current {
                let gain = v - current;
                lam = cand_l;
                mu = cand_m;
                current = v;
                improved = gain > budget.tol * current.max(1e-300);
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    current
}

fn top_singular_pair(m: &ComplexMatrix) -> (f64, CVec, CVec) {
    let svd = m.clone().svd(true, true);
    let (idx, sigma) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, -1.0), |(bi, bv), (i, &s)| if s > bv { (i, s) } else { (bi, bv) });
    let u = svd.u.as_ref().expect("u requested").column(idx).into_owned();
    let v = svd.v_t.as_ref().expect("v requested").row(idx).adjoint();
    (sigma, u, v)
}

/// Alternating maximization over the unit ball of ℓ_q.
fn functional_ascent(comp: &Components, p: f64, mut f: Vec<Complex64>, budget: &Budget) -> f64 {
    let q = conjugate_exponent(p);
    let fnorm = lp_of_slice(f.iter().map(|z| z.norm()), q);
    if fnorm == 0.0 {
        return 0.0;
    }
    f.iter_mut().for_each(|z| *z /= fnorm);
    let mut best = 0.0f64;
    for _ in 0..budget.max_iter {
        let (sigma, u, v) = top_singular_pair(&comp.combine(&f));
        let gain = sigma - best;
        best = best.max(sigma);
        if gain <= budget.tol * sigma.max(1e-300) {
            break;
        }
        let coeffs: Vec<Complex64> = comp.mats.iter().map(|m| u.dotc(&(m * &v))).collect();
        f = dual_functional(&coeffs, p);
    }
    best
}

/// Certified upper bound for `‖x‖_{MIN(ℓ_p)}` with the inequality used.
pub fn min_upper(x: &MatrixSeq, p: f64) -> Result<(f64, String)> {
    check_exponent(p)?;
    if x.is_zero() {
        return Ok((0.0, "zero".into()));
    }
    let n = x.side();
    let d = x.support_dim() as f64;
    let norms: Vec<f64> = x.components().map(|(_, m)| linalg::opnorm(m)).collect();
    let mut best = (lp_of_slice(norms, p), "holder-entry-norms".to_string());
    // ‖f‖_2 ≤ d^{max(0, 1/p - 1/2)} ‖f‖_q on the support, then the ℓ_2 bounds.
    let factor = d.powf((1.0 / p - 0.5).max(0.0));
    let mats: Vec<&ComplexMatrix> = x.components().map(|(_, m)| m).collect();
    let stacked = ComplexMatrix::from_fn(n * n, mats.len(), |r, col| mats[col][(r / n, r % n)]);
    let l2_bounds = [
        (linalg::opnorm(&stacked), "frobenius-gram"),
        (eval_exact(&Structure::Row, x)?, "row-factor"),
        (eval_exact(&Structure::Col, x)?, "col-factor"),
    ];
    for (v, name) in l2_bounds {
        if factor * v < best.0 {
            best = (factor * v, name.to_string());
        }
    }
    Ok(best)
}

/// Interval for `‖x‖_{M_n(min(ℓ_p))}`.
pub fn eval_min(p: f64, x: &MatrixSeq, budget: &Budget) -> Result<NormEstimate> {
    check_exponent(p)?;
    if x.is_zero() {
        return Ok(NormEstimate::exact(0.0, "zero"));
    }
    let comp = Components::new(x);
    let n = x.side();
    let d = comp.mats.len();

    // Bilinear route: deterministic starts at the largest entry and at the
    // flat vectors, then seeded random starts.
    let norms = x.entry_norms(p)?;
    let (mut bi, mut bj, mut bv) = (0, 0, -1.0);
    for (i, row) in norms.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > bv {
                (bi, bj, bv) = (i, j, v);
            }
        }
    }
    let basis = |k: usize| {
        let mut v = CVec::zeros(n);
        v[k] = c(1.0, 0.0);
        v
    };
    let flat = unit(CVec::from_element(n, c(1.0, 0.0)));
    let mut rng = rng_from_seed(derive_seed(budget.seed, 0xB111));
    let mut starts = vec![(basis(bi), basis(bj)), (flat.clone(), flat.clone()), (basis(bi), flat.clone())];
    while starts.len() < budget.starts.max(3) {
        starts.push((random_unit(&mut rng, n), random_unit(&mut rng, n)));
    }
    let bilinear_best = starts
        .into_iter()
        .map(|(l, m)| bilinear_ascent(&comp, p, l, m, budget))
        .fold(0.0, f64::max);

    // Functional route.
    let mut rng = rng_from_seed(derive_seed(budget.seed, 0xF0C7));
    let mut fstarts = vec![vec![c(1.0, 0.0); d]];
    while fstarts.len() < budget.starts.max(1) {
        fstarts.push(gaussian_vec(&mut rng, d));
    }
    let functional_best = fstarts
        .into_iter()
        .map(|f| functional_ascent(&comp, p, f, budget))
        .fold(0.0, f64::max);

    let (lower, lower_method) = if bilinear_best >= functional_best {
        (bilinear_best, "bilinear-sphere-ascent")
    } else {
        (functional_best, "functional-ascent")
    };
    let (upper, upper_method) = min_upper(x, p)?;
    Ok(NormEstimate {
        lower: lower.min(upper),
        upper,
        lower_method: lower_method.to_string(),
        upper_method,
    })
}
