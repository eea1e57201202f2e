//! Norm evaluators for operator-space structures on sequence spaces.
//!
//! ROW, COL and OH have closed forms. MIN and MAX norms are defined by a
//! supremum and an infimum respectively, so their evaluators return a
//! certified interval: every `lower` is the value of an explicit feasible
//! point of the supremum (or a duality ratio), every `upper` the cost of an
//! explicit factorization or a Hölder-type inequality. Interpolated
//! structures combine both through analytic candidates on the strip.

mod exact;
mod interp_eval;
mod max;
mod min;
mod ruan;
mod structure;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seqspace::MatrixSeq;

pub use exact::{eval_exact, pairing_amplified};
pub use interp_eval::eval_interp;
pub use max::{eval_max, max_upper_quick, Factorization};
pub use min::{dual_functional, eval_min, min_upper};
pub use ruan::{check_ruan, RuanReport};
pub use structure::{parse_number, Structure};

/// Optimizer budget shared by the search-based evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    pub starts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { starts: 32, max_iter: 500, tol: 1e-10, seed: 0 }
    }
}

impl Budget {
    pub fn from_json(text: &str) -> Result<Self> {
        let b: Budget = serde_json::from_str(text)?;
        if b.starts == 0 || b.max_iter == 0 || !(b.tol > 0.0) {
            return Err(Error::Format("budget needs starts > 0, max_iter > 0, tol > 0".into()));
        }
        Ok(b)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Interval `[lower, upper]` for a matrix norm, with the method that
/// produced each side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub lower: f64,
    pub upper: f64,
    pub lower_method: String,
    pub upper_method: String,
}

impl NormEstimate {
    pub fn exact(value: f64, method: &str) -> Self {
        Self {
            lower: value,
            upper: value,
            lower_method: method.to_string(),
            upper_method: method.to_string(),
        }
    }

    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    /// Relative width `(upper - lower) / max(1, reference)`.
    pub fn rel_gap(&self, reference: f64) -> f64 {
        self.gap() / reference.abs().max(1.0)
    }

    pub fn contains(&self, value: f64, rel_tol: f64) -> bool {
        self.lower <= value * (1.0 + rel_tol) + 1e-12 && self.upper >= value * (1.0 - rel_tol) - 1e-12
    }

    pub fn is_consistent(&self) -> bool {
        self.lower <= self.upper + 1e-9 * self.upper.max(1.0)
    }

    pub(crate) fn raise_lower(&mut self, value: f64, method: &str) {
        if value > self.lower {
            self.lower = value;
            self.lower_method = method.to_string();
        }
    }

    pub(crate) fn reduce_upper(&mut self, value: f64, method: &str) {
        if value < self.upper {
            self.upper = value;
            self.upper_method = method.to_string();
        }
    }
}

/// Evaluates the norm of `x` in `s`, exact where a closed form exists.
pub fn evaluate(s: &Structure, x: &MatrixSeq, budget: &Budget) -> Result<NormEstimate> {
    s.validate()?;
    match s {
        Structure::Row | Structure::Col | Structure::Oh => {
            let v = eval_exact(s, x)?;
            Ok(NormEstimate::exact(v, &format!("closed-form {s}")))
        }
        Structure::Min(p) => eval_min(*p, x, budget),
        Structure::Max(p) => eval_max(*p, x, budget),
        Structure::Interp { .. } => eval_interp(s, x, budget, &crate::interp::GridConfig::default()),
    }
}

/// Cheap certified upper bound for the norm of `x` in `s` (no optimization).
pub fn upper_quick(s: &Structure, x: &MatrixSeq) -> Result<f64> {
    s.validate()?;
    match s {
        Structure::Row | Structure::Col | Structure::Oh => eval_exact(s, x),
        Structure::Min(p) => Ok(min_upper(x, *p)?.0),
        Structure::Max(p) => Ok(max_upper_quick(x, *p)?.0),
        Structure::Interp { s0, s1, theta } => {
            let u0 = upper_quick(s0, x)?;
            let u1 = upper_quick(s1, x)?;
            Ok(geometric_mean(u0, u1, *theta))
        }
    }
}

/// `u0^{1-θ} u1^θ`, the boundary norm of the optimal single exponential.
pub(crate) fn geometric_mean(u0: f64, u1: f64, theta: f64) -> f64 {
    if u0 == 0.0 || u1 == 0.0 {
        0.0
    } else {
        u0.powf(1.0 - theta) * u1.powf(theta)
    }
}

/// Lower bound `‖⟨⟨x, z⟩⟩‖ / ‖z‖_{dual}` maximized over the test pool.
pub(crate) fn pairing_lower(
    s: &Structure,
    x: &MatrixSeq,
    budget: &Budget,
) -> Result<Option<(f64, String)>> {
    let dual = s.dual();
    let mut best: Option<(f64, String)> = None;
    for (name, z) in pairing_pool(x, budget) {
        let num = crate::linalg::opnorm(&pairing_amplified(x, &z));
        if num == 0.0 {
            continue;
        }
        let den = upper_quick(&dual, &z)?;
        if den <= 0.0 || !den.is_finite() {
            continue;
        }
        let ratio = num / den;
        if best.as_ref().is_none_or(|(b, _)| ratio > *b) {
            best = Some((ratio, format!("pairing with {name}")));
        }
    }
    Ok(best)
}

/// Test elements used for duality lower bounds: the witnesses up to the size
/// of `x`, `x` itself and its conjugate, single-entry basis elements on the
/// support, and seeded random elements on the support.
pub(crate) fn pairing_pool(x: &MatrixSeq, budget: &Budget) -> Vec<(String, MatrixSeq)> {
    use crate::seqspace::{x_n, y_n, FinSeq};
    let n = x.side();
    let mut pool = vec![("x".to_string(), x.clone()), ("conj(x)".to_string(), x.conj())];
    for m in 1..=n {
        pool.push((format!("x^{m}"), x_n(m)));
        pool.push((format!("(x^{m})^T"), x_n(m).transpose()));
        if m * m <= 64 {
            pool.push((format!("y^{m}"), y_n(m)));
        }
    }
    for k in x.support() {
        pool.push((format!("e_{k}"), MatrixSeq::single_entry(1, 0, 0, &FinSeq::basis(k))));
    }
    let support = x.support();
    if !support.is_empty() {
        let mut rng = crate::rng::rng_from_seed(crate::rng::derive_seed(budget.seed, 0x5EED));
        for r in 0..16 {
            let comps: Vec<_> = support
                .iter()
                .map(|&k| {
                    let data = crate::rng::gaussian_vec(&mut rng, n * n);
                    (k, crate::linalg::ComplexMatrix::from_row_slice(n, n, &data))
                })
                .collect();
            if let Ok(z) = MatrixSeq::from_components(n, comps) {
                let scale = min_upper(&z, 2.0).map(|u| u.0).unwrap_or(1.0);
                let z = if scale > 0.0 { z.scale(crate::linalg::c(1.0 / scale, 0.0)) } else { z };
                pool.push((format!("random#{r}"), z));
            }
        }
    }
    pool
}
