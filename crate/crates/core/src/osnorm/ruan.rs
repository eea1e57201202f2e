use rand::Rng;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{opnorm, ComplexMatrix};
use crate::rng::{derive_seed, gaussian_vec, rng_from_seed, SeededRng};
use crate::seqspace::MatrixSeq;

use super::{evaluate, Budget, NormEstimate, Structure};

const TOL: f64 = 1e-9;

/// Outcome of an axiom check run.
#[derive(Debug, Clone, Serialize)]
pub struct RuanReport {
    pub structure: String,
    pub samples: usize,
    pub seed: u64,
    pub evaluations: usize,
    pub violations: Vec<String>,
}

impl RuanReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exponent of the underlying sequence space.
pub(crate) fn base_exponent(s: &Structure) -> f64 {
    match s {
        Structure::Min(p) | Structure::Max(p) => *p,
        Structure::Row | Structure::Col | Structure::Oh => 2.0,
        Structure::Interp { s0, s1, theta } => {
            let inv = (1.0 - theta) / base_exponent(s0) + theta / base_exponent(s1);
            if inv == 0.0 {
                f64::INFINITY
            } else {
                1.0 / inv
            }
        }
    }
}

fn random_seq(rng: &mut SeededRng, n: usize) -> MatrixSeq {
    let d = rng.random_range(1..=3usize);
    let comps: Vec<_> = (1..=d)
        .map(|k| (k, ComplexMatrix::from_row_slice(n, n, &gaussian_vec(rng, n * n))))
        .collect();
    MatrixSeq::from_components(n, comps).expect("square components")
}

fn random_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(rows, cols, &gaussian_vec(rng, rows * cols))
}

struct Checker<'a> {
    s: &'a Structure,
    budget: Budget,
    p: f64,
    evaluations: usize,
    violations: Vec<String>,
}

impl Checker<'_> {
    /// Evaluates and checks the entry sandwich on the way.
    fn eval(&mut self, x: &MatrixSeq, label: &str) -> Result<NormEstimate> {
        let est = evaluate(self.s, x, &self.budget)?;
        self.evaluations += 1;
        let lo = x.max_entry_norm(self.p)?;
        let hi = x.sum_entry_norms(self.p)?;
        let slack = TOL * hi.max(1.0);
        if est.upper < lo - slack || est.lower > hi + slack {
            self.violations.push(format!(
                "{label}: entry sandwich [{lo}, {hi}] vs interval [{}, {}]",
                est.lower, est.upper
            ));
        }
        if !est.is_consistent() {
            self.violations.push(format!("{label}: inconsistent interval {est:?}"));
        }
        Ok(est)
    }
}

/// Checks the direct-sum and compression axioms plus the entry sandwich on
/// seeded random elements of side at most 4.
///
/// Exact structures are checked for equality in the direct-sum axiom;
/// interval structures for compatibility of the intervals.
pub fn check_ruan(s: &Structure, samples: usize, seed: u64) -> Result<RuanReport> {
    s.validate()?;
    let exact = s.is_exact();
    let mut ck = Checker {
        s,
        budget: Budget { starts: 8, max_iter: 200, tol: 1e-10, seed },
        p: base_exponent(s),
        evaluations: 0,
        violations: Vec::new(),
    };
    for i in 0..samples {
        let mut rng = rng_from_seed(derive_seed(seed, i as u64));
        let m = rng.random_range(1..=4usize);
        let n = rng.random_range(1..=4usize);
        let v = random_seq(&mut rng, m);
        let w = random_seq(&mut rng, n);
        let ev = ck.eval(&v, &format!("sample {i} v"))?;
        let ew = ck.eval(&w, &format!("sample {i} w"))?;
        let es = ck.eval(&v.direct_sum(&w), &format!("sample {i} v+w"))?;
        let o1_ok = if exact {
            let want = ev.upper.max(ew.upper);
            (es.upper - want).abs() <= TOL * want.max(1.0)
        } else {
            let slack = TOL * es.upper.max(1.0);
            es.lower <= ev.upper.max(ew.upper) + slack && es.upper >= ev.lower.max(ew.lower) - slack
        };
        if !o1_ok {
            ck.violations.push(format!("sample {i}: O1 fails, {es:?} vs {ev:?} and {ew:?}"));
        }

        let k = rng.random_range(1..=4usize);
        let alpha = random_matrix(&mut rng, k, m);
        let beta = random_matrix(&mut rng, m, k);
        let ec = ck.eval(&v.compress(&alpha, &beta)?, &format!("sample {i} avb"))?;
        let bound = opnorm(&alpha) * ev.upper * opnorm(&beta);
        if ec.lower > bound + TOL * bound.max(1.0) {
            ck.violations.push(format!("sample {i}: O2 fails, {} > {bound}", ec.lower));
        }
    }
    Ok(RuanReport {
        structure: s.to_string(),
        samples,
        seed,
        evaluations: ck.evaluations,
        violations: ck.violations,
    })
}
