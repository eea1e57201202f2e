//! Named experiment runs over the witnesses, emitted as CSV rows.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::beta_of;
use crate::linalg::operator_norm;
use crate::osnorm::{eval_exact, eval_interp, eval_max, eval_min, Budget, NormEstimate, Structure};
use crate::seqspace::{a_n, x_n, y_n};

/// Largest side for rows that run an optimizer.
pub const OPTIMIZATION_CAP: usize = 8;
/// Largest side for `y^n` rows (pairings have side `n^2`).
pub const YN_CAP: usize = 6;
/// Largest order for `A_n` rows.
pub const AN_CAP: usize = 16;
/// Largest `n` for closed-form growth rows.
pub const CLOSED_FORM_CAP: usize = 1024;

pub const CSV_HEADER: [&str; 10] =
    ["experiment", "n", "p", "theta", "structure", "lower", "upper", "closed_form", "rel_gap", "method"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Experiment {
    Lemma42,
    Lemma43,
    Lemma44,
    Lemma45,
    Lemma53Y,
    Growth48,
    Growth54,
    Mult62,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Lemma42,
        Experiment::Lemma43,
        Experiment::Lemma44,
        Experiment::Lemma45,
        Experiment::Lemma53Y,
        Experiment::Growth48,
        Experiment::Growth54,
        Experiment::Mult62,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Lemma42 => "LEMMA42",
            Experiment::Lemma43 => "LEMMA43",
            Experiment::Lemma44 => "LEMMA44",
            Experiment::Lemma45 => "LEMMA45",
            Experiment::Lemma53Y => "LEMMA53_Y",
            Experiment::Growth48 => "GROWTH48",
            Experiment::Growth54 => "GROWTH54",
            Experiment::Mult62 => "MULT62",
        }
    }

    fn default_ns(self) -> Vec<usize> {
        match self {
            Experiment::Lemma43 => (1..=12).collect(),
            Experiment::Lemma53Y => (1..=5).collect(),
            Experiment::Growth48 | Experiment::Growth54 => (2..=64).collect(),
            Experiment::Mult62 => (2..=8).collect(),
            _ => (1..=6).collect(),
        }
    }

    fn cap(self) -> usize {
        match self {
            Experiment::Lemma43 => AN_CAP,
            Experiment::Lemma53Y => YN_CAP,
            Experiment::Growth48 | Experiment::Growth54 | Experiment::Mult62 => CLOSED_FORM_CAP,
            _ => OPTIMIZATION_CAP,
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == key || e.name().replace('_', "") == key)
            .ok_or_else(|| Error::Usage(format!("unknown experiment {s:?}")))
    }
}

/// Parameters shared by all experiments; empty lists select the defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentParams {
    pub ns: Vec<usize>,
    pub ps: Vec<f64>,
    pub thetas: Vec<f64>,
    pub seed: u64,
    pub budget: Budget,
    /// Constants `c_C`, `c_T` of the GROWTH54 bound.
    pub c_c: f64,
    pub c_t: f64,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        Self {
            ns: Vec::new(),
            ps: Vec::new(),
            thetas: Vec::new(),
            seed: 0,
            budget: Budget::default(),
            c_c: 1.0,
            c_t: 1.0,
            jobs: None,
        }
    }
}

pub const DEFAULT_PS: [f64; 4] = [1.0, 4.0 / 3.0, 2.0, 4.0];
pub const DEFAULT_THETAS: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub experiment: String,
    pub n: usize,
    pub p: Option<f64>,
    pub theta: Option<f64>,
    pub structure: String,
    pub lower: f64,
    pub upper: f64,
    pub closed_form: Option<f64>,
    pub rel_gap: f64,
    pub method: String,
}

impl ExperimentRow {
    fn new(
        e: Experiment,
        n: usize,
        p: Option<f64>,
        theta: Option<f64>,
        structure: String,
        est: &NormEstimate,
        closed_form: Option<f64>,
    ) -> Self {
        let reference = closed_form.unwrap_or(est.upper);
        let method = if est.lower_method == est.upper_method {
            est.lower_method.clone()
        } else {
            format!("lower: {}; upper: {}", est.lower_method, est.upper_method)
        };
        Self {
            experiment: e.name().into(),
            n,
            p,
            theta,
            structure,
            lower: est.lower,
            upper: est.upper,
            closed_form,
            rel_gap: est.rel_gap(reference),
            method,
        }
    }

    /// `lower ≤ cf(1+tol)` and `upper ≥ cf(1-tol)`; rows without a closed form pass.
    pub fn contains_closed_form(&self, tol: f64) -> bool {
        match self.closed_form {
            Some(cf) => self.lower <= cf * (1.0 + tol) + 1e-12 && self.upper >= cf * (1.0 - tol) - 1e-12,
            None => true,
        }
    }

    fn sort_key(&self) -> (usize, String, u64, u64) {
        let bits = |v: Option<f64>| v.map_or(0, |x| x.to_bits());
        (self.n, self.structure.clone(), bits(self.p), bits(self.theta))
    }
}

/// `‖x^n‖` in MIN(ℓ_p): `n^{1/p-1/2}` for p ≤ 2, else 1.
pub fn min_closed_form(n: usize, p: f64) -> f64 {
    if p <= 2.0 {
        (n as f64).powf(1.0 / p - 0.5)
    } else {
        1.0
    }
}

/// `‖x^n‖` in MAX(ℓ_p): `n^{1/2}` for p ≤ 2, else `n^{1/p}`.
pub fn max_closed_form(n: usize, p: f64) -> f64 {
    if p <= 2.0 {
        (n as f64).sqrt()
    } else {
        (n as f64).powf(1.0 / p)
    }
}

/// `‖x^n‖` in the interpolated space at θ between MIN(ℓ_p) and MAX(ℓ_p).
pub fn interp_closed_form(n: usize, p: f64, theta: f64) -> f64 {
    if p <= 2.0 {
        (n as f64).powf(0.5 - (1.0 - theta) * (1.0 - 1.0 / p))
    } else {
        (n as f64).powf(theta / p)
    }
}

/// `λ_n = ‖x^n‖_0 / ‖x^n‖_1`-type ratio used by the growth argument.
pub fn growth_lambda(n: usize, p: f64) -> f64 {
    if p <= 2.0 {
        (n as f64).powf(1.0 - 1.0 / p)
    } else {
        (n as f64).powf(1.0 / p)
    }
}

/// Lower sandwich `(1/4)(1 + β log λ_n) ‖x^n‖_θ`.
pub fn growth48_lower(n: usize, p: f64, theta: f64) -> Result<f64> {
    let beta = beta_of(theta)?;
    Ok(0.25 * (1.0 + beta * growth_lambda(n, p).ln()) * interp_closed_form(n, p, theta))
}

/// `K(n) = (1/4)(1/c_C + β(log n - c_T))` at θ = 1/2.
pub fn growth54_value(n: usize, c_c: f64, c_t: f64) -> Result<f64> {
    if !(c_c > 0.0) || !(c_t >= 0.0) {
        return Err(Error::Parameter(format!("need c_C > 0 and c_T >= 0, got {c_c}, {c_t}")));
    }
    let beta = beta_of(0.5)?;
    Ok(0.25 * (1.0 / c_c + beta * ((n as f64).ln() - c_t)))
}

/// `(1/4)(1 + β log n)` at θ = 1/2.
pub fn mult62_ratio(n: usize) -> f64 {
    0.25 * (1.0 + beta_of(0.5).expect("valid theta") * (n as f64).ln())
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Slope of `L(n)/‖x^n‖_θ` against `log n`.
pub fn growth48_slope(p: f64, theta: f64, ns: &[usize]) -> Result<f64> {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys = ns
        .iter()
        .map(|&n| Ok(growth48_lower(n, p, theta)? / interp_closed_form(n, p, theta)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(least_squares_slope(&xs, &ys))
}

enum Task {
    Min(usize, f64),
    Max(usize, f64),
    Interp(usize, f64, f64),
    An(usize),
    Yn(usize, Structure),
    Growth48(usize, f64, f64),
    Growth48Slope(f64, f64),
    Growth54(usize),
    Mult62Oh(usize),
    Mult62Ratio(usize),
}

fn check_ns(e: Experiment, ns: &[usize]) -> Result<()> {
    if let Some(&n) = ns.iter().find(|&&n| n == 0) {
        return Err(Error::Parameter(format!("n must be positive, got {n}")));
    }
    if let Some(&n) = ns.iter().find(|&&n| n > e.cap()) {
        return Err(Error::Size(format!("{e} supports n <= {}, got {n}", e.cap())));
    }
    Ok(())
}

fn tasks(e: Experiment, params: &ExperimentParams) -> Result<Vec<Task>> {
    let ns = if params.ns.is_empty() { e.default_ns() } else { params.ns.clone() };
    check_ns(e, &ns)?;
    let ps = if params.ps.is_empty() { DEFAULT_PS.to_vec() } else { params.ps.clone() };
    let thetas = if params.thetas.is_empty() { DEFAULT_THETAS.to_vec() } else { params.thetas.clone() };
    for &p in &ps {
        crate::seqspace::check_exponent(p)?;
    }
    for &t in &thetas {
        beta_of(t)?;
    }
    let mut out = Vec::new();
    match e {
        Experiment::Lemma42 => {
            for &n in &ns {
                out.extend(ps.iter().map(|&p| Task::Min(n, p)));
            }
        }
        Experiment::Lemma44 => {
            for &n in &ns {
                out.extend(ps.iter().map(|&p| Task::Max(n, p)));
            }
        }
        Experiment::Lemma45 => {
            for &n in &ns {
                for &p in &ps {
                    out.extend(thetas.iter().map(|&t| Task::Interp(n, p, t)));
                }
            }
        }
        Experiment::Lemma43 => out.extend(ns.iter().map(|&n| Task::An(n))),
        Experiment::Lemma53Y => {
            for &n in &ns {
                for s in [Structure::Row, Structure::Col, Structure::Oh, Structure::Min(2.0), Structure::Max(2.0)] {
                    out.push(Task::Yn(n, s));
                }
            }
        }
        Experiment::Growth48 => {
            let ps = if params.ps.is_empty() { vec![2.0] } else { ps };
            let thetas = if params.thetas.is_empty() { vec![0.5] } else { thetas };
            for &p in &ps {
                for &t in &thetas {
                    out.extend(ns.iter().map(|&n| Task::Growth48(n, p, t)));
                    if ns.len() >= 2 {
                        out.push(Task::Growth48Slope(p, t));
                    }
                }
            }
        }
        Experiment::Growth54 => {
            growth54_value(1, params.c_c, params.c_t)?;
            out.extend(ns.iter().map(|&n| Task::Growth54(n)));
        }
        Experiment::Mult62 => {
            for &n in &ns {
                if n <= OPTIMIZATION_CAP {
                    out.push(Task::Mult62Oh(n));
                }
                out.push(Task::Mult62Ratio(n));
            }
        }
    }
    Ok(out)
}

fn exact_row(e: Experiment, n: usize, structure: String, value: f64, cf: Option<f64>, method: &str) -> ExperimentRow {
    ExperimentRow::new(e, n, None, None, structure, &NormEstimate::exact(value, method), cf)
}

fn run_task(e: Experiment, task: &Task, params: &ExperimentParams, ns: &[usize]) -> Result<Vec<ExperimentRow>> {
    let budget = params.budget.with_seed(params.seed);
    let row = match *task {
        Task::Min(n, p) => {
            let est = eval_min(p, &x_n(n), &budget)?;
            ExperimentRow::new(e, n, Some(p), None, Structure::Min(p).to_string(), &est, Some(min_closed_form(n, p)))
        }
        Task::Max(n, p) => {
            let est = eval_max(p, &x_n(n), &budget)?;
            ExperimentRow::new(e, n, Some(p), None, Structure::Max(p).to_string(), &est, Some(max_closed_form(n, p)))
        }
        Task::Interp(n, p, t) => {
            let s = Structure::o_lp(p, t);
            let est = eval_interp(&s, &x_n(n), &budget, &crate::interp::GridConfig::default())?;
            ExperimentRow::new(e, n, Some(p), Some(t), s.to_string(), &est, Some(interp_closed_form(n, p, t)))
        }
        Task::An(n) => {
            let a = a_n(n)?;
            let mut worst = 0.0f64;
            for i in 0..n {
                for j in i + 1..n {
                    worst = worst.max(a.column(i).dotc(&a.column(j)).norm());
                }
            }
            let cf = 2f64.powf((n as f64 - 1.0) / 2.0);
            return Ok(vec![
                exact_row(e, n, "A_n".into(), operator_norm(&a)?, Some(cf), "operator norm"),
                exact_row(e, n, "A_n column inner products".into(), worst, Some(0.0), "max |<a_i, a_j>|, i != j"),
            ]);
        }
        Task::Yn(n, ref s) => {
            let y = y_n(n);
            let nf = n as f64;
            let (est, cf) = match s {
                Structure::Min(_) => (eval_min(2.0, &y, &budget)?, 1.0),
                Structure::Max(_) => (eval_max(2.0, &y, &budget)?, nf),
                _ => (NormEstimate::exact(eval_exact(s, &y)?, "closed form"), nf.sqrt()),
            };
            let p = matches!(s, Structure::Min(_) | Structure::Max(_)).then_some(2.0);
            ExperimentRow::new(e, n, p, None, s.to_string(), &est, Some(cf))
        }
        Task::Growth48(n, p, t) => {
            let cf = interp_closed_form(n, p, t);
            let beta = beta_of(t)?;
            let upper = (1.0 + beta * growth_lambda(n, p).ln()) * cf;
            let est = NormEstimate {
                lower: growth48_lower(n, p, t)?,
                upper,
                lower_method: "(1/4)(1 + beta log lambda_n) closed form".into(),
                upper_method: "(1 + beta log lambda_n) closed form".into(),
            };
            ExperimentRow::new(e, n, Some(p), Some(t), Structure::o_lp(p, t).to_string(), &est, Some(cf))
        }
        Task::Growth48Slope(p, t) => {
            let slope = growth48_slope(p, t, ns)?;
            let beta = beta_of(t)?;
            // log λ_n is linear in log n with this coefficient.
            let rate = if p <= 2.0 { 1.0 - 1.0 / p } else { 1.0 / p };
            let want = 0.25 * beta * rate;
            let n = *ns.iter().max().expect("nonempty");
            let est = NormEstimate::exact(slope, "least squares of L(n)/closed form against log n");
            ExperimentRow::new(e, n, Some(p), Some(t), "slope".into(), &est, Some(want))
        }
        Task::Growth54(n) => {
            let k = growth54_value(n, params.c_c, params.c_t)?;
            let method = format!("(1/4)(1/c_C + beta(log n - c_T)), c_C={}, c_T={}", params.c_c, params.c_t);
            let est = NormEstimate::exact(k, &method);
            ExperimentRow::new(e, n, None, Some(0.5), "K(n)".into(), &est, None)
        }
        Task::Mult62Oh(n) => {
            let product = x_n(n).product(&x_n(n).transpose())?;
            let v = eval_exact(&Structure::Oh, &product)?;
            exact_row(e, n, "oh".into(), v, Some((n as f64).sqrt()), "closed form of x_n x_n^T")
        }
        Task::Mult62Ratio(n) => {
            let est = NormEstimate::exact(mult62_ratio(n), "(1/4)(1 + beta log n)");
            ExperimentRow::new(e, n, None, Some(0.5), "ratio".into(), &est, None)
        }
    };
    Ok(vec![row])
}

/// Runs an experiment; rows come back in a fixed order independent of
/// scheduling.
pub fn run(e: Experiment, params: &ExperimentParams) -> Result<Vec<ExperimentRow>> {
    let ns = if params.ns.is_empty() { e.default_ns() } else { params.ns.clone() };
    let tasks = tasks(e, params)?;
    let work = || -> Result<Vec<ExperimentRow>> {
        let chunks: Vec<Result<Vec<ExperimentRow>>> =
            tasks.par_iter().map(|t| run_task(e, t, params, &ns)).collect();
        let mut rows = Vec::new();
        for c in chunks {
            rows.extend(c?);
        }
        Ok(rows)
    };
    let mut rows = match params.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .map_err(|err| Error::Usage(format!("cannot build worker pool: {err}")))?
            .install(work)?,
        None => work()?,
    };
    rows.sort_by_key(|r| r.sort_key());
    Ok(rows)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Shortest round-trip decimal; infinities as `inf`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

/// Serializes rows with the fixed header.
pub fn to_csv(rows: &[ExperimentRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.n.to_string(),
            fmt_opt(r.p),
            fmt_opt(r.theta),
            r.structure.clone(),
            fmt_f64(r.lower),
            fmt_f64(r.upper),
            fmt_opt(r.closed_form),
            fmt_f64(r.rel_gap),
            r.method.clone(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn names_round_trip() {
        for e in Experiment::ALL {
            assert_eq!(e.name().parse::<Experiment>().unwrap(), e);
        }
        assert_eq!("lemma53_y".parse::<Experiment>().unwrap(), Experiment::Lemma53Y);
        assert!(matches!("LEMMA99".parse::<Experiment>(), Err(Error::Usage(_))));
    }

    #[test]
    fn caps_are_enforced() {
        let params = ExperimentParams { ns: vec![9], ..Default::default() };
        assert!(matches!(run(Experiment::Lemma44, &params), Err(Error::Size(_))));
        let params = ExperimentParams { ns: vec![7], ..Default::default() };
        assert!(matches!(run(Experiment::Lemma53Y, &params), Err(Error::Size(_))));
    }

    #[test]
    fn mult62_value_at_four() {
        let params = ExperimentParams { ns: vec![4], ..Default::default() };
        let rows = run(Experiment::Mult62, &params).unwrap();
        let oh = rows.iter().find(|r| r.structure == "oh").unwrap();
        assert_relative_eq!(oh.lower, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn growth48_slope_is_beta_over_eight() {
        let ns: Vec<usize> = (2..=64).collect();
        let s = growth48_slope(2.0, 0.5, &ns).unwrap();
        assert_relative_eq!(s, beta_of(0.5).unwrap() / 8.0, max_relative = 1e-12);
    }

    #[test]
    fn growth54_increases() {
        let params = ExperimentParams::default();
        let rows = run(Experiment::Growth54, &params).unwrap();
        assert!(rows.windows(2).all(|w| w[1].lower > w[0].lower));
    }

    #[test]
    fn csv_header_and_determinism() {
        let params = ExperimentParams { ns: vec![1, 2, 3], ps: vec![2.0, 4.0], ..Default::default() };
        let a = to_csv(&run(Experiment::Lemma42, &params).unwrap()).unwrap();
        let b = to_csv(&run(Experiment::Lemma42, &ExperimentParams { jobs: Some(1), ..params }).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("experiment,n,p,theta,structure,lower,upper,closed_form,rel_gap,method\n"));
        assert_eq!(a.lines().count(), 7);
    }
}
