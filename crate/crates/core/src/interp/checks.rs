use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{opnorm, ComplexMatrix};
use crate::osnorm::{upper_quick, Structure};
use crate::rng::{gaussian_vec, SeededRng};
use crate::seqspace::MatrixSeq;

use super::{boundary_norm_with, ExpCandidate, ExpTerm, GridConfig, StripGeometry};

/// Result of an inequality check over a set of points or samples.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub checks: usize,
    /// Largest observed `lhs / rhs`.
    pub max_ratio: f64,
    pub violations: Vec<String>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        Self { name: name.into(), checks: 0, max_ratio: 0.0, violations: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.checks += other.checks;
        self.max_ratio = self.max_ratio.max(other.max_ratio);
        self.violations.extend(other.violations);
    }

    fn record(&mut self, lhs: f64, rhs: f64, tol: f64, label: impl FnOnce() -> String) {
        self.checks += 1;
        if rhs > 0.0 {
            self.max_ratio = self.max_ratio.max(lhs / rhs);
        }
        if lhs > rhs + tol {
            self.violations.push(format!("{}: {lhs} > {rhs}", label()));
        }
    }
}

/// Polar grid on the disk: interior radii up to `max_radius` and a circle of
/// `circle` points used for the maximum modulus.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DiskGrid {
    pub radii: usize,
    pub angles: usize,
    pub max_radius: f64,
    pub circle: usize,
}

impl Default for DiskGrid {
    fn default() -> Self {
        Self { radii: 12, angles: 24, max_radius: 0.95, circle: 2048 }
    }
}

impl DiskGrid {
    pub fn interior(&self) -> Vec<Complex64> {
        let mut pts = vec![Complex64::new(0.0, 0.0)];
        for r in 1..=self.radii {
            let rho = self.max_radius * r as f64 / self.radii as f64;
            for a in 0..self.angles {
                pts.push(Complex64::from_polar(rho, std::f64::consts::TAU * a as f64 / self.angles as f64));
            }
        }
        pts
    }

    pub fn circle(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.circle).map(|a| Complex64::from_polar(1.0, std::f64::consts::TAU * a as f64 / self.circle as f64))
    }
}

/// `F(z) = Σ_k C_k z^k` with square matrix coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    pub coeffs: Vec<ComplexMatrix>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<ComplexMatrix>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::Dimension("polynomial needs at least one coefficient".into()));
        };
        let shape = first.shape();
        if coeffs.iter().any(|c| c.shape() != shape) {
            return Err(Error::Dimension("coefficients must share a shape".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn random(rng: &mut SeededRng, n: usize, degree: usize) -> Self {
        let coeffs = (0..=degree)
            .map(|_| ComplexMatrix::from_row_slice(n, n, &gaussian_vec(rng, n * n)))
            .collect();
        Self { coeffs }
    }

    pub fn eval(&self, z: Complex64) -> ComplexMatrix {
        let mut acc = self.coeffs.last().expect("nonempty").clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self, z: Complex64) -> ComplexMatrix {
        let (r, cdim) = self.coeffs[0].shape();
        let mut acc = ComplexMatrix::zeros(r, cdim);
        for (k, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * z + c * Complex64::new(k as f64, 0.0);
        }
        acc
    }

    pub fn circle_max(&self, grid: &DiskGrid) -> f64 {
        grid.circle().map(|z| opnorm(&self.eval(z))).fold(0.0, f64::max)
    }

    /// Divides by the largest norm on the circle grid.
    pub fn scaled_to_unit(&self, grid: &DiskGrid) -> Self {
        let m = self.circle_max(grid);
        if m == 0.0 {
            return self.clone();
        }
        Self { coeffs: self.coeffs.iter().map(|c| c / Complex64::new(m, 0.0)).collect() }
    }
}

/// Checks `‖F'(z)‖ ≤ 1/(1-|z|²)` on the interior grid for a polynomial
/// bounded by one on the circle.
pub fn schwarz_pick_check(f: &MatrixPolynomial, grid: &DiskGrid, tol: f64) -> Result<CheckReport> {
    let m = f.circle_max(grid);
    if m > 1.0 + 1e-12 {
        return Err(Error::Usage(format!("polynomial has norm {m} on the circle; scale it first")));
    }
    let mut report = CheckReport::new("schwarz-pick");
    for z in grid.interior() {
        let lhs = opnorm(&f.derivative(z));
        let rhs = 1.0 / (1.0 - z.norm_sqr());
        report.record(lhs, rhs, tol, || format!("z = {z}"));
    }
    Ok(report)
}

/// Random `φ^k a e^{μ(z-θ)} v` with `k ∈ {1, 2}` and real `μ`.
pub fn random_kernel_candidate(rng: &mut SeededRng, n: usize, theta: f64) -> Result<ExpCandidate> {
    let d = rng.random_range(1..=3usize);
    let comps: Vec<_> = (1..=d)
        .map(|k| (k, ComplexMatrix::from_row_slice(n, n, &gaussian_vec(rng, n * n))))
        .collect();
    let v = MatrixSeq::from_components(n, comps)?;
    let mu = Complex64::new(rng.random_range(-3.0..3.0), 0.0);
    let power = rng.random_range(1..=2u32);
    ExpCandidate::new(theta, vec![ExpTerm { mu, v, power }])
}

/// Checks that the derivative at θ of a candidate vanishing at θ is bounded
/// by `|φ'(θ)|` times its boundary norm.
///
/// Both sides use the same certified side norms, so the check is exact for
/// candidates along a single direction.
pub fn ker_derivative_check(
    c: &ExpCandidate,
    geom: &StripGeometry,
    s0: &Structure,
    s1: &Structure,
    grid: &GridConfig,
    tol: f64,
) -> Result<CheckReport> {
    let at_theta = c.value_at_theta()?;
    if at_theta.frobenius() > 1e-10 {
        return Err(Error::Precondition(format!(
            "candidate does not vanish at theta (norm {})",
            at_theta.frobenius()
        )));
    }
    let derivative = c.derivative_at_theta(geom)?;
    let lhs = upper_quick(&Structure::interp(s0.clone(), s1.clone(), geom.theta()), &derivative)?;
    let mut side_norm = |j: usize, v: &MatrixSeq| upper_quick(if j == 0 { s0 } else { s1 }, v);
    let boundary = boundary_norm_with(c, geom, grid, &mut side_norm)?.value;
    let rhs = geom.phi_prime_at_theta().norm() * boundary;
    let mut report = CheckReport::new("kernel-derivative");
    report.record(lhs, rhs, tol * rhs.max(1.0), || c.describe());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use crate::rng::rng_from_seed;
    use crate::seqspace::x_n;
    use approx::assert_relative_eq;

    #[test]
    fn unitary_line_is_extremal_at_zero() {
        let u = crate::seqspace::a_n(2).unwrap() / Complex64::new(2f64.sqrt(), 0.0);
        let f = MatrixPolynomial::new(vec![ComplexMatrix::zeros(2, 2), u]).unwrap();
        assert_relative_eq!(opnorm(&f.derivative(Complex64::new(0.0, 0.0))), 1.0, max_relative = 1e-12);
        assert!(schwarz_pick_check(&f, &DiskGrid::default(), 1e-9).unwrap().passed());
    }

    #[test]
    fn square_at_one_half() {
        let f = MatrixPolynomial::new(vec![ComplexMatrix::zeros(2, 2), ComplexMatrix::zeros(2, 2), identity(2)]).unwrap();
        assert_relative_eq!(opnorm(&f.derivative(Complex64::new(0.5, 0.0))), 1.0, max_relative = 1e-12);
        let r = schwarz_pick_check(&f, &DiskGrid::default(), 1e-9).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn unscaled_polynomial_is_rejected() {
        let f = MatrixPolynomial::new(vec![identity(2) * Complex64::new(2.0, 0.0)]).unwrap();
        assert!(matches!(schwarz_pick_check(&f, &DiskGrid::default(), 1e-9), Err(Error::Usage(_))));
    }

    #[test]
    fn random_polynomials_pass() {
        let mut rng = rng_from_seed(3);
        for _ in 0..10 {
            let n = rng.random_range(1..=4);
            let f = MatrixPolynomial::random(&mut rng, n, 3).scaled_to_unit(&DiskGrid::default());
            assert!(schwarz_pick_check(&f, &DiskGrid::default(), 1e-9).unwrap().passed());
        }
    }

    #[test]
    fn phi_times_constant_is_tight() {
        let geom = StripGeometry::new(0.5).unwrap();
        let c = ExpCandidate::new(0.5, vec![ExpTerm { mu: Complex64::new(0.0, 0.0), v: x_n(3), power: 1 }]).unwrap();
        let r = ker_derivative_check(&c, &geom, &Structure::Row, &Structure::Row, &GridConfig::default(), 1e-9).unwrap();
        assert!(r.passed());
        assert_relative_eq!(r.max_ratio, 1.0, max_relative = 1e-9);
        let c2 = ExpCandidate::new(0.5, vec![ExpTerm { mu: Complex64::new(0.0, 0.0), v: x_n(3), power: 2 }]).unwrap();
        let r = ker_derivative_check(&c2, &geom, &Structure::Row, &Structure::Col, &GridConfig::default(), 1e-9).unwrap();
        assert_eq!(r.max_ratio, 0.0);
    }

    #[test]
    fn nonvanishing_candidate_is_rejected() {
        let geom = StripGeometry::new(0.5).unwrap();
        let c = ExpCandidate::new(0.5, vec![ExpTerm { mu: Complex64::new(0.0, 0.0), v: x_n(3), power: 0 }]).unwrap();
        let r = ker_derivative_check(&c, &geom, &Structure::Row, &Structure::Row, &GridConfig::default(), 1e-9);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }
}
