//! Verification suites: each numbered criterion recomputes a table or an
//! identity and compares it with the closed form at a fixed tolerance.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{self, Experiment, ExperimentParams, ExperimentRow};
use crate::interp::{
    beta_of, derived_sandwich, derived_upper, ker_derivative_check, random_kernel_candidate, schwarz_pick_check,
    DiskGrid, GridConfig, MatrixPolynomial, StripGeometry,
};
use crate::linalg::{opnorm, ComplexMatrix};
use crate::osnorm::{check_ruan, pairing_amplified, Budget, Structure};
use crate::rng::{derive_seed, rng_from_seed};
use crate::seqspace::{lp_norm, u_n, x_n, y_n, FinSeq, MatrixSeq};
use crate::twist::{kp_map, kp_quasinorm, triviality_probe};

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    /// Relative tolerance for the optimization-backed tables.
    pub tol: f64,
    pub seed: u64,
    pub budget: Budget,
    pub jobs: Option<usize>,
    pub ruan_samples: usize,
    pub polynomial_samples: usize,
    pub kernel_samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            tol: 0.02,
            seed: 0,
            budget: Budget::default(),
            jobs: None,
            ruan_samples: 200,
            polynomial_samples: 100,
            kernel_samples: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    Ruan,
    Growth,
    All,
}

impl Suite {
    pub fn criteria(self) -> &'static [usize] {
        match self {
            Suite::Lemmas => &[1, 2, 3, 4, 5, 6],
            Suite::Ruan => &[9],
            Suite::Growth => &[7, 8, 10],
            Suite::All => &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lemmas" => Ok(Suite::Lemmas),
            "ruan" => Ok(Suite::Ruan),
            "growth" => Ok(Suite::Growth),
            "all" => Ok(Suite::All),
            other => Err(Error::Usage(format!("unknown suite {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub checks: usize,
    pub failures: Vec<String>,
    pub summary: String,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "criterion {:>2} {status}: {} ({} checks; {})", self.id, self.title, self.checks, self.summary)?;
        for fail in &self.failures {
            write!(f, "\n    {fail}")?;
        }
        Ok(())
    }
}

struct Tally {
    checks: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self { checks: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(msg());
        }
    }

    fn finish(self, id: usize, summary: String) -> CriterionResult {
        CriterionResult { id, title: title(id), checks: self.checks, failures: self.failures, summary }
    }
}

pub fn title(id: usize) -> &'static str {
    match id {
        1 => "MIN(p) norms of x^n",
        2 => "sign matrices A_n",
        3 => "MAX(p) norms of x^n",
        4 => "interpolated norms of x^n",
        5 => "norms of y^n",
        6 => "amplified pairing oracles",
        7 => "derived-space sandwich and growth slope",
        8 => "multiplication growth",
        9 => "axiom, Schwarz-Pick and kernel-derivative checkers",
        10 => "Kalton-Peck identities",
        _ => "unknown",
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn params(cfg: &VerifyConfig, ns: Vec<usize>, ps: Vec<f64>, thetas: Vec<f64>) -> ExperimentParams {
    ExperimentParams { ns, ps, thetas, seed: cfg.seed, budget: cfg.budget, jobs: cfg.jobs, ..Default::default() }
}

fn describe(r: &ExperimentRow) -> String {
    format!(
        "n={} p={:?} theta={:?} {}: [{}, {}] vs {:?}",
        r.n, r.p, r.theta, r.structure, r.lower, r.upper, r.closed_form
    )
}

fn criterion_min(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let start = Instant::now();
    let rows = experiments::run(Experiment::Lemma42, &params(cfg, (1..=6).collect(), vec![], vec![]))?;
    let mut t = Tally::new();
    for r in &rows {
        let cf = r.closed_form.expect("closed form");
        t.check(r.lower >= cf * (1.0 - cfg.tol) && r.lower <= cf * (1.0 + 1e-6), || describe(r));
    }
    let secs = start.elapsed().as_secs_f64();
    t.check(secs < 60.0, || format!("took {secs:.1} s"));
    Ok(t.finish(1, format!("{secs:.2} s")))
}

fn criterion_an() -> Result<CriterionResult> {
    let rows = experiments::run(Experiment::Lemma43, &ExperimentParams::default())?;
    let mut t = Tally::new();
    for r in &rows {
        let cf = r.closed_form.expect("closed form");
        if cf == 0.0 {
            t.check(r.lower < 1e-12, || describe(r));
        } else {
            t.check(rel(r.lower, cf) <= 1e-9, || describe(r));
        }
    }
    Ok(t.finish(2, "n <= 12".into()))
}

fn criterion_max(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let rows = experiments::run(Experiment::Lemma44, &params(cfg, (1..=6).collect(), vec![], vec![]))?;
    let mut t = Tally::new();
    let mut worst = 0.0f64;
    for r in &rows {
        let cf = r.closed_form.expect("closed form");
        let p = r.p.expect("p");
        let gap_tol = if p <= 2.0 { 1e-3 } else { cfg.tol };
        worst = worst.max(r.rel_gap);
        t.check(r.lower <= cf * (1.0 + 1e-9) && r.upper >= cf * (1.0 - 1e-9) && r.rel_gap <= gap_tol, || {
            describe(r)
        });
    }
    Ok(t.finish(3, format!("largest relative gap {worst:.2e}")))
}

fn criterion_interp(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let rows = experiments::run(
        Experiment::Lemma45,
        &params(cfg, (1..=6).collect(), vec![4.0 / 3.0, 2.0, 4.0], experiments::DEFAULT_THETAS.to_vec()),
    )?;
    let mut t = Tally::new();
    let mut worst = 0.0f64;
    for r in &rows {
        let cf = r.closed_form.expect("closed form");
        worst = worst.max(r.rel_gap);
        t.check(
            r.lower <= cf * (1.0 + 1e-9) && r.upper >= cf * (1.0 - 1e-9) && r.rel_gap <= cfg.tol,
            || describe(r),
        );
    }
    Ok(t.finish(4, format!("largest relative gap {worst:.2e}")))
}

fn criterion_yn(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let rows = experiments::run(Experiment::Lemma53Y, &params(cfg, (1..=5).collect(), vec![], vec![]))?;
    let mut t = Tally::new();
    for r in &rows {
        let cf = r.closed_form.expect("closed form");
        let ok = if r.structure.starts_with("min") {
            r.lower >= cf * (1.0 - cfg.tol) && r.lower <= cf * (1.0 + 1e-6)
        } else if r.structure.starts_with("max") {
            r.lower <= cf * (1.0 + 1e-9) && r.upper >= cf * (1.0 - 1e-9) && r.rel_gap <= cfg.tol
        } else {
            rel(r.lower, cf) <= 1e-9 && rel(r.upper, cf) <= 1e-9
        };
        t.check(ok, || describe(r));
    }
    Ok(t.finish(5, "n <= 5".into()))
}

fn criterion_pairing() -> Result<CriterionResult> {
    let mut t = Tally::new();
    for n in 1..=5 {
        let nf = n as f64;
        let px = opnorm(&pairing_amplified(&x_n(n), &x_n(n)));
        t.check(rel(px, nf.sqrt()) <= 1e-9, || format!("x^{n}: {px}"));
        let py = opnorm(&pairing_amplified(&y_n(n), &y_n(n)));
        t.check(rel(py, nf) <= 1e-9, || format!("y^{n}: {py}"));
    }
    Ok(t.finish(6, "n <= 5".into()))
}

fn criterion_derived(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let mut t = Tally::new();
    let geom = StripGeometry::new(0.5)?;
    let beta = geom.beta();
    let h = 1e-6;
    let numeric = 2.0 * h / (geom.phi(Complex64::new(0.5 + h, 0.0)) - geom.phi(Complex64::new(0.5 - h, 0.0))).norm();
    t.check(rel(beta, numeric) <= 1e-8, || format!("beta {beta} vs numerical {numeric}"));
    t.check(rel(beta_of(0.5)?, 2.0 / std::f64::consts::PI) <= 1e-12, || "beta(1/2) != 2/pi".into());

    let (s0, s1) = (Structure::Min(2.0), Structure::Max(2.0));
    let mut previous = f64::NEG_INFINITY;
    let mut worst = 0.0f64;
    for n in 2..=8usize {
        let nf = n as f64;
        let norm = nf.powf(0.25);
        let d = derived_upper(&x_n(n), &MatrixSeq::zero(n), &geom, &s0, &s1, &cfg.budget)?;
        let (lower, upper) = derived_sandwich(norm, nf.sqrt().ln() * norm, &geom)?;
        worst = worst.max(d.value / upper);
        t.check(d.value <= upper * 1.01, || format!("n={n}: derived upper {} > {upper}", d.value));
        t.check(lower > previous, || format!("n={n}: sandwich lower {lower} not increasing"));
        previous = lower;
    }
    let ns: Vec<usize> = (2..=64).collect();
    let slope = experiments::growth48_slope(2.0, 0.5, &ns)?;
    t.check(rel(slope, beta / 8.0) <= 0.05, || format!("slope {slope} vs {}", beta / 8.0));
    Ok(t.finish(7, format!("slope {slope:.6} vs beta/8 = {:.6}; derived/upper <= {worst:.4}", beta / 8.0)))
}

fn criterion_mult() -> Result<CriterionResult> {
    let mut t = Tally::new();
    for n in 1..=8usize {
        let product = x_n(n).product(&x_n(n).transpose())?;
        let v = crate::osnorm::eval_exact(&Structure::Oh, &product)?;
        t.check(rel(v, (n as f64).sqrt()) <= 1e-9, || format!("n={n}: {v}"));
    }
    let ratios: Vec<f64> = (2..=1024).map(experiments::mult62_ratio).collect();
    t.check(ratios.windows(2).all(|w| w[1] > w[0]), || "ratio not strictly increasing".into());
    let beta = beta_of(0.5)?;
    let rise = ratios[ratios.len() - 1] - ratios[0];
    let want = beta * 512f64.ln() / 4.0;
    t.check(rise >= want - 1e-9, || format!("rise {rise} < {want}"));
    Ok(t.finish(8, format!("ratio rises by {rise:.6} from n=2 to n=1024")))
}

fn criterion_checkers(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let mut t = Tally::new();
    let mut evaluations = 0;
    for s in [
        Structure::Row,
        Structure::Col,
        Structure::Oh,
        Structure::Min(2.0),
        Structure::Max(2.0),
        Structure::Min(4.0),
        Structure::Max(4.0 / 3.0),
    ] {
        let r = check_ruan(&s, cfg.ruan_samples, cfg.seed)?;
        evaluations += r.evaluations;
        t.checks += r.evaluations;
        t.failures.extend(r.violations.into_iter().map(|v| format!("{s}: {v}")));
    }

    let grid = DiskGrid::default();
    let mut rng = rng_from_seed(derive_seed(cfg.seed, 0x5C4A));
    for i in 0..cfg.polynomial_samples {
        let n = rng.random_range(1..=4usize);
        let f = MatrixPolynomial::random(&mut rng, n, 3).scaled_to_unit(&grid);
        let r = schwarz_pick_check(&f, &grid, 1e-9)?;
        t.checks += r.checks;
        t.failures.extend(r.violations.into_iter().map(|v| format!("polynomial {i}: {v}")));
    }

    let mut rng = rng_from_seed(derive_seed(cfg.seed, 0xDE41));
    let coarse = GridConfig { points_per_side: 1025, ..GridConfig::default() };
    for i in 0..cfg.kernel_samples {
        let theta = rng.random_range(0.1..0.9);
        let n = rng.random_range(1..=3usize);
        let c = random_kernel_candidate(&mut rng, n, theta)?;
        let geom = StripGeometry::new(theta)?;
        let r = ker_derivative_check(&c, &geom, &Structure::Min(2.0), &Structure::Max(2.0), &coarse, 1e-9)?;
        t.checks += r.checks;
        t.failures.extend(r.violations.into_iter().map(|v| format!("candidate {i}: {v}")));
    }
    Ok(t.finish(
        9,
        format!(
            "{} axiom samples per structure ({evaluations} evaluations), {} polynomials, {} candidates",
            cfg.ruan_samples, cfg.polynomial_samples, cfg.kernel_samples
        ),
    ))
}

fn criterion_kalton_peck(cfg: &VerifyConfig) -> Result<CriterionResult> {
    let mut t = Tally::new();
    let mut rng = rng_from_seed(derive_seed(cfg.seed, 0x4B50));
    for i in 0..100 {
        let x = crate::twist::random_finseq(&mut rng);
        let c = crate::rng::complex_gaussian(&mut rng);
        let p = rng.random_range(1.1..6.0);
        let lhs = kp_map(&x.scale(c), p)?;
        let rhs = kp_map(&x, p)?.scale(c);
        let err = lp_norm(&lhs.sub(&rhs), 2.0)?;
        let scale = lp_norm(&rhs, 2.0)?.max(1e-300);
        t.check(err <= 1e-12 * scale.max(1.0), || format!("sample {i}: homogeneity error {err}"));
    }
    for n in 2..=256usize {
        let nf = n as f64;
        let v = kp_quasinorm(&FinSeq::zero(), &u_n(n), 2.0)?;
        let want = nf.sqrt() * (1.0 + nf.ln() / 2.0);
        t.check(rel(v, want) <= 1e-10, || format!("n={n}: {v} vs {want}"));
    }
    let set: Vec<FinSeq> = (1..=256).map(u_n).collect();
    let probe = triviality_probe(2.0, &ComplexMatrix::zeros(256, 256), &set)?;
    let want = 256f64.ln() / 2.0;
    t.check(rel(probe, want) <= 1e-10, || format!("triviality probe {probe} vs {want}"));
    Ok(t.finish(10, format!("triviality probe {probe:.12}")))
}

pub fn run_criterion(id: usize, cfg: &VerifyConfig) -> Result<CriterionResult> {
    match id {
        1 => criterion_min(cfg),
        2 => criterion_an(),
        3 => criterion_max(cfg),
        4 => criterion_interp(cfg),
        5 => criterion_yn(cfg),
        6 => criterion_pairing(),
        7 => criterion_derived(cfg),
        8 => criterion_mult(),
        9 => criterion_checkers(cfg),
        10 => criterion_kalton_peck(cfg),
        _ => Err(Error::Usage(format!("no criterion {id}"))),
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Result<Vec<CriterionResult>> {
    suite.criteria().iter().map(|&id| run_criterion(id, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_parse() {
        assert_eq!("ALL".parse::<Suite>().unwrap(), Suite::All);
        assert!("nope".parse::<Suite>().is_err());
        assert_eq!(Suite::All.criteria().len(), 10);
    }

    #[test]
    fn cheap_criteria_pass() {
        let cfg = VerifyConfig::default();
        for id in [2, 6, 8, 10] {
            let r = run_criterion(id, &cfg).unwrap();
            assert!(r.passed(), "{r}");
        }
    }
}
