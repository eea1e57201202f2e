use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::osnorm::{evaluate, Budget, Structure};
use crate::seqspace::MatrixSeq;

use super::candidate::{coordinate_search, grouped_side_bound, ScalarTerm, EXPONENT_RANGE};
use super::{ExpCandidate, ExpTerm, GridConfig, StripGeometry};

/// Upper bound for the derived-space quasinorm of a pair `(x, y)`.
#[derive(Debug, Clone, Serialize)]
pub struct DerivedBound {
    pub value: f64,
    /// Boundary norm of the unoptimized seed candidate.
    pub seed_value: f64,
    pub candidate: String,
    pub side0: f64,
    pub side1: f64,
}

/// Family `a e^{μ1 s} x + (1-a) e^{μ2 s} x + φ e^{ν s} w` with `s = z - θ` and
/// `w = (y - (a μ1 + (1-a) μ2) x) / φ'(θ)`, so that `f(θ) = x`, `f'(θ) = y`.
struct Family<'a> {
    x: &'a MatrixSeq,
    y: &'a MatrixSeq,
    geom: &'a StripGeometry,
    /// Certified side norms of `x` and `y`.
    ux: [f64; 2],
    uy: [f64; 2],
}

impl Family<'_> {
    fn mix(p: &[f64]) -> f64 {
        p[2] * p[0] + (1.0 - p[2]) * p[1]
    }

    /// Side norms of `w = (y - m x)/φ'(θ)` by the triangle inequality, or the
    /// exact multiple of `ux` when `y` is proportional to `x`.
    fn w_coeffs(&self, m: f64, ratio: Option<Complex64>) -> WForm {
        let inv = 1.0 / self.geom.phi_prime_at_theta();
        match ratio {
            Some(r) => WForm::Along((r - m) * inv),
            None => WForm::Apart([
                (self.uy[0] + m.abs() * self.ux[0]) * inv.norm(),
                (self.uy[1] + m.abs() * self.ux[1]) * inv.norm(),
            ]),
        }
    }

    fn boundary(&self, p: &[f64], ratio: Option<Complex64>, offsets: &[f64]) -> ([f64; 2], [f64; 2]) {
        let r = |v: f64| Complex64::new(v, 0.0);
        let w = self.w_coeffs(Self::mix(p), ratio);
        let mut terms = vec![
            ScalarTerm { mu: p[0], coef: r(p[2]), power: 0, dir: 0 },
            ScalarTerm { mu: p[1], coef: r(1.0 - p[2]), power: 0, dir: 0 },
        ];
        match w {
            WForm::Along(c) => terms.push(ScalarTerm { mu: p[3], coef: c, power: 1, dir: 0 }),
            WForm::Apart(_) => terms.push(ScalarTerm { mu: p[3], coef: r(1.0), power: 1, dir: 1 }),
        }
        let mut sides = [0.0f64; 2];
        let mut arg = [0.0f64; 2];
        for j in 0..2 {
            let norms = match w {
                WForm::Along(_) => vec![self.ux[j]],
                WForm::Apart(uw) => vec![self.ux[j], uw[j]],
            };
            (sides[j], arg[j]) = grouped_side_bound(&terms, j, self.geom, offsets, &norms);
        }
        (sides, arg)
    }

    fn candidate(&self, p: &[f64]) -> Result<ExpCandidate> {
        let r = |v: f64| Complex64::new(v, 0.0);
        let w = self
            .y
            .sub(&self.x.scale(r(Self::mix(p))))?
            .scale(1.0 / self.geom.phi_prime_at_theta());
        ExpCandidate::new(
            self.geom.theta(),
            vec![
                ExpTerm { mu: r(p[0]), v: self.x.scale(r(p[2])), power: 0 },
                ExpTerm { mu: r(p[1]), v: self.x.scale(r(1.0 - p[2])), power: 0 },
                ExpTerm { mu: r(p[3]), v: w, power: 1 },
            ],
        )
    }
}

#[derive(Clone, Copy)]
enum WForm {
    Along(Complex64),
    Apart([f64; 2]),
}

fn log_ratio(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        (a / b).ln().clamp(-EXPONENT_RANGE, EXPONENT_RANGE)
    } else {
        0.0
    }
}

/// Smallest boundary norm found over analytic candidates with `f(θ) = x`
/// and `f'(θ) = y`.
pub fn derived_upper(
    x: &MatrixSeq,
    y: &MatrixSeq,
    geom: &StripGeometry,
    s0: &Structure,
    s1: &Structure,
    budget: &Budget,
) -> Result<DerivedBound> {
    derived_upper_with(x, y, geom, s0, s1, budget, &GridConfig::default())
}

pub fn derived_upper_with(
    x: &MatrixSeq,
    y: &MatrixSeq,
    geom: &StripGeometry,
    s0: &Structure,
    s1: &Structure,
    budget: &Budget,
    grid: &GridConfig,
) -> Result<DerivedBound> {
    if x.side() != y.side() {
        return Err(Error::Dimension(format!("sides {} and {} differ", x.side(), y.side())));
    }
    let side = |v: &MatrixSeq| -> Result<[f64; 2]> {
        Ok([evaluate(s0, v, budget)?.upper, evaluate(s1, v, budget)?.upper])
    };
    let fam = Family { x, y, geom, ux: side(x)?, uy: side(y)? };
    let ratio = if x.is_zero() {
        None
    } else if y.is_zero() {
        Some(Complex64::new(0.0, 0.0))
    } else {
        y.proportional_to(x, 1e-12)
    };
    let offsets = grid.offsets(0.0);
    let coarse = GridConfig { points_per_side: grid.points_per_side.min(257), ..*grid }.offsets(0.0);

    let mu = log_ratio(fam.ux[0], fam.ux[1]);
    let w_sides = match fam.w_coeffs(mu, ratio) {
        WForm::Along(c) => [c.norm() * fam.ux[0], c.norm() * fam.ux[1]],
        WForm::Apart(uw) => uw,
    };
    let nu = log_ratio(w_sides[0], w_sides[1]);
    let seed = vec![mu, mu, 1.0, nu];
    let (seed_sides, seed_arg) = fam.boundary(&seed, ratio, &offsets);
    let seed_value = seed_sides[0].max(seed_sides[1]);

    let bounds = [
        (-EXPONENT_RANGE, EXPONENT_RANGE),
        (-EXPONENT_RANGE, EXPONENT_RANGE),
        (-1.0, 2.0),
        (-EXPONENT_RANGE, EXPONENT_RANGE),
    ];
    let sweeps = (budget.max_iter / 100).clamp(1, 4);
    let (params, _) = if x.is_zero() {
        // Only the φ term is present.
        let (nu_best, v) = super::candidate::golden_min(bounds[3].0, bounds[3].1, 80, |v| {
            let (s, _) = fam.boundary(&[0.0, 0.0, 1.0, v], ratio, &coarse);
            s[0].max(s[1])
        });
        (vec![0.0, 0.0, 1.0, nu_best], v)
    } else {
        coordinate_search(seed.clone(), &bounds, sweeps, |p| {
            let (s, _) = fam.boundary(p, ratio, &coarse);
            s[0].max(s[1])
        })
    };
    let (found_sides, found_arg) = fam.boundary(&params, ratio, &offsets);
    let found_value = found_sides[0].max(found_sides[1]);
    let (p, sides, value, _arg) = if found_value < seed_value {
        (params, found_sides, found_value, found_arg)
    } else {
        (seed, seed_sides, seed_value, seed_arg)
    };
    Ok(DerivedBound {
        value,
        seed_value,
        candidate: fam.candidate(&p)?.describe(),
        side0: sides[0],
        side1: sides[1],
    })
}

/// Two-sided estimate `((a + β b)/4, a + β b)` for a pair whose first
/// coordinate has norm `a` and whose second coordinate lies at distance `b`
/// from the derivative of an extremal for the first.
pub fn derived_sandwich(norm_x: f64, y_minus_y0_norm: f64, geom: &StripGeometry) -> Result<(f64, f64)> {
    if norm_x == 0.0 {
        return Err(Error::Usage("the sandwich needs a nonzero first coordinate".into()));
    }
    if !(norm_x > 0.0) || !(y_minus_y0_norm >= 0.0) {
        return Err(Error::Parameter("sandwich inputs must be nonnegative".into()));
    }
    let upper = norm_x + geom.beta() * y_minus_y0_norm;
    Ok((upper / 4.0, upper))
}
