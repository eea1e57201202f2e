use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::osnorm::{evaluate, upper_quick, Budget, Structure};
use crate::seqspace::MatrixSeq;

use super::StripGeometry;

/// Vertical grid on both boundary lines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    pub points_per_side: usize,
    /// Largest |t| when no damping is present.
    pub t_max: f64,
    /// Ratio between the outermost and innermost grid spacing.
    pub clustering: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { points_per_side: 4096, t_max: 40.0, clustering: 1e4 }
    }
}

impl GridConfig {
    pub fn coarse() -> Self {
        Self { points_per_side: 257, ..Self::default() }
    }

    /// Symmetric offsets clustered geometrically at `t = 0`.
    pub fn offsets(&self, damping: f64) -> Vec<f64> {
        let t_max = if damping > 0.0 {
            // e^{-δ t²} ≤ 1e-12 beyond this point.
            ((1e12f64).ln() / damping).sqrt()
        } else {
            self.t_max
        };
        let half = (self.points_per_side.max(3) - 1) / 2;
        let alpha = self.clustering;
        let mut out = Vec::with_capacity(2 * half + 1);
        out.push(0.0);
        for k in 1..=half {
            let frac = k as f64 / half as f64;
            let t = t_max * ((1.0 + alpha).powf(frac) - 1.0) / alpha;
            out.push(t);
            out.push(-t);
        }
        out
    }
}

/// One term `e^{μ(z-θ)} φ(z)^power v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpTerm {
    pub mu: Complex64,
    pub v: MatrixSeq,
    pub power: u32,
}

/// Analytic candidate `Σ_k e^{μ_k(z-θ)} φ(z)^{power_k} e^{δ(z-θ)²} v_k`.
///
/// Along the boundary lines `|e^{δ(z-θ)²}| = e^{δ((j-θ)² - t²)}`, so the
/// damping decays only for `δ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpCandidate {
    pub theta: f64,
    pub terms: Vec<ExpTerm>,
    pub damping: f64,
}

impl ExpCandidate {
    pub fn new(theta: f64, terms: Vec<ExpTerm>) -> Result<Self> {
        let c = Self { theta, terms, damping: 0.0 };
        c.check()?;
        Ok(c)
    }

    pub fn with_damping(mut self, damping: f64) -> Result<Self> {
        if damping < 0.0 || !damping.is_finite() {
            return Err(Error::Parameter(format!(
                "damping {damping} grows along the boundary; use a nonnegative value"
            )));
        }
        self.damping = damping;
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        StripGeometry::new(self.theta)?;
        if let Some(first) = self.terms.first() {
            let n = first.v.side();
            if self.terms.iter().any(|t| t.v.side() != n) {
                return Err(Error::Dimension("candidate terms must share the matrix side".into()));
            }
        }
        Ok(())
    }

    pub fn side(&self) -> usize {
        self.terms.first().map_or(1, |t| t.v.side())
    }

    /// Bounded on the closed strip: either damped or all exponents real.
    pub fn is_bounded(&self) -> bool {
        self.damping > 0.0 || self.terms.iter().all(|t| t.mu.im == 0.0)
    }

    pub fn term_factor(&self, k: usize, z: Complex64, geom: &StripGeometry) -> Complex64 {
        let t = &self.terms[k];
        let shift = z - self.theta;
        let mut f = (t.mu * shift).exp();
        if t.power > 0 {
            f *= geom.phi(z).powu(t.power);
        }
        if self.damping != 0.0 {
            f *= (self.damping * shift * shift).exp();
        }
        f
    }

    pub fn value_at(&self, z: Complex64, geom: &StripGeometry) -> Result<MatrixSeq> {
        let mut acc = MatrixSeq::zero(self.side());
        for (k, t) in self.terms.iter().enumerate() {
            acc = acc.add(&t.v.scale(self.term_factor(k, z, geom)))?;
        }
        Ok(acc)
    }

    /// `f(θ)`: only terms without a φ factor survive.
    pub fn value_at_theta(&self) -> Result<MatrixSeq> {
        let mut acc = MatrixSeq::zero(self.side());
        for t in self.terms.iter().filter(|t| t.power == 0) {
            acc = acc.add(&t.v)?;
        }
        Ok(acc)
    }

    /// `f'(θ)`; the damping factor has zero derivative at θ.
    pub fn derivative_at_theta(&self, geom: &StripGeometry) -> Result<MatrixSeq> {
        let mut acc = MatrixSeq::zero(self.side());
        for t in &self.terms {
            let w = match t.power {
                0 => t.mu,
                1 => geom.phi_prime_at_theta(),
                _ => continue,
            };
            acc = acc.add(&t.v.scale(w))?;
        }
        Ok(acc)
    }

    pub fn describe(&self) -> String {
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let phi = match t.power {
                    0 => String::new(),
                    1 => "·phi".into(),
                    p => format!("·phi^{p}"),
                };
                format!("exp(({:.6}{:+.6}i)(z-theta)){phi}·v[{}]", t.mu.re, t.mu.im, t.v.support_dim())
            })
            .collect();
        format!("theta={} damping={} terms=[{}]", self.theta, self.damping, terms.join(" + "))
    }

    /// Groups terms whose vectors are proportional: `(direction, [(term, scale)])`.
    fn directions(&self) -> Vec<(MatrixSeq, Vec<(usize, Complex64)>)> {
        let mut groups: Vec<(MatrixSeq, Vec<(usize, Complex64)>)> = Vec::new();
        for (k, t) in self.terms.iter().enumerate() {
            if t.v.is_zero() {
                continue;
            }
            match groups.iter_mut().find_map(|(dir, members)| {
                t.v.proportional_to(dir, 1e-12).map(|s| (members, s))
            }) {
                Some((members, s)) => members.push((k, s)),
                None => groups.push((t.v.clone(), vec![(k, Complex64::new(1.0, 0.0))])),
            }
        }
        groups
    }
}

/// Boundary evaluation record.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryReport {
    pub candidate: String,
    pub side0: f64,
    pub side1: f64,
    pub value: f64,
    pub argmax_t: [f64; 2],
    pub grid: GridConfig,
}

/// `max_j sup_t ‖c(j + it)‖_{S_j}` with the side norms supplied by `side_norm(j, v)`.
///
/// When all terms are proportional to one direction `v`, the side norm is
/// evaluated once per side and scaled by the modulus of the scalar factor.
pub fn boundary_norm_with(
    c: &ExpCandidate,
    geom: &StripGeometry,
    grid: &GridConfig,
    side_norm: &mut dyn FnMut(usize, &MatrixSeq) -> Result<f64>,
) -> Result<BoundaryReport> {
    if !c.is_bounded() {
        return Err(Error::Usage(
            "candidate with complex exponents needs positive damping to be bounded".into(),
        ));
    }
    let offsets = grid.offsets(c.damping);
    let groups = c.directions();
    let mut sides = [0.0f64; 2];
    let mut argmax = [0.0f64; 2];
    if groups.is_empty() {
        return Ok(BoundaryReport {
            candidate: c.describe(),
            side0: 0.0,
            side1: 0.0,
            value: 0.0,
            argmax_t: argmax,
            grid: *grid,
        });
    }
    let real_undamped = c.damping == 0.0 && c.terms.iter().all(|t| t.mu.im == 0.0);
    for j in 0..2 {
        if groups.len() == 1 && real_undamped {
            let (dir, members) = &groups[0];
            let base = side_norm(j, dir)?;
            let terms: Vec<ScalarTerm> = members
                .iter()
                .map(|&(k, sc)| ScalarTerm { mu: c.terms[k].mu.re, coef: sc, power: c.terms[k].power, dir: 0 })
                .collect();
            let (v, t) = grouped_side_bound(&terms, j, geom, &offsets, &[base]);
            sides[j] = v;
            argmax[j] = t;
        } else if groups.len() == 1 {
            let (dir, members) = &groups[0];
            let base = side_norm(j, dir)?;
            for &t in &offsets {
                let z = Complex64::new(j as f64, t);
                let s: Complex64 = members.iter().map(|(k, sc)| c.term_factor(*k, z, geom) * sc).sum();
                let v = s.norm() * base;
                if v > sides[j] {
                    sides[j] = v;
                    argmax[j] = t;
                }
            }
        } else {
            for &t in &offsets {
                let z = Complex64::new(j as f64, t);
                let v = side_norm(j, &c.value_at(z, geom)?)?;
                if v > sides[j] {
                    sides[j] = v;
                    argmax[j] = t;
                }
            }
        }
    }
    Ok(BoundaryReport {
        candidate: c.describe(),
        side0: sides[0],
        side1: sides[1],
        value: sides[0].max(sides[1]),
        argmax_t: argmax,
        grid: *grid,
    })
}

/// Term `coef · e^{μ(z-θ)} φ(z)^power` along direction number `dir`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScalarTerm {
    pub mu: f64,
    pub coef: Complex64,
    pub power: u32,
    pub dir: usize,
}

/// Certified bound for `sup_t ‖Σ_k coef_k e^{μ_k(s)} φ^{p_k} v_{dir_k}‖` on the
/// line `Re z = j`, given the side norms of the directions.
///
/// Terms with distinct real exponents rotate at different rates in `t`, so
/// their phases align somewhere on the line and a finite grid can miss the
/// supremum. Terms are therefore grouped by exponent: inside a group the
/// exponential factors out and the remaining function of `t` only involves
/// φ, which is smooth and converges as `|t| → ∞`; groups are added.
pub(crate) fn grouped_side_bound(
    terms: &[ScalarTerm],
    j: usize,
    geom: &StripGeometry,
    offsets: &[f64],
    dir_norms: &[f64],
) -> (f64, f64) {
    let mut order: Vec<usize> = (0..terms.len()).collect();
    order.sort_by(|&a, &b| terms[a].mu.total_cmp(&terms[b].mu));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for k in order {
        match groups.last_mut() {
            Some(g) if (terms[g[0]].mu - terms[k].mu).abs() <= 1e-12 * terms[k].mu.abs().max(1.0) => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    let shift = j as f64 - geom.theta();
    let mut total = 0.0;
    let mut best = (0.0f64, 0.0f64);
    for g in &groups {
        let scale = (terms[g[0]].mu * shift).exp();
        let constant = g.iter().all(|&k| terms[k].power == 0);
        let points: &[f64] = if constant { &offsets[..1] } else { offsets };
        let mut sup = (0.0f64, 0.0f64);
        for &t in points {
            let z = Complex64::new(j as f64, t);
            let phi = geom.phi(z);
            let mut per_dir = vec![Complex64::new(0.0, 0.0); dir_norms.len()];
            for &k in g {
                let tk = &terms[k];
                per_dir[tk.dir] += tk.coef * phi.powu(tk.power);
            }
            let v: f64 = per_dir.iter().zip(dir_norms).map(|(a, n)| a.norm() * n).sum();
            if v > sup.0 {
                sup = (v, t);
            }
        }
        let contribution = scale * sup.0;
        total += contribution;
        if contribution > best.0 {
            best = (contribution, sup.1);
        }
    }
    (total, best.1)
}

/// Boundary norm with side norms taken as certified upper bounds in `s0`, `s1`.
pub fn boundary_norm(
    c: &ExpCandidate,
    geom: &StripGeometry,
    s0: &Structure,
    s1: &Structure,
    grid: &GridConfig,
    budget: &Budget,
) -> Result<BoundaryReport> {
    let single = c.directions().len() <= 1;
    let mut side_norm = |j: usize, v: &MatrixSeq| -> Result<f64> {
        let s = if j == 0 { s0 } else { s1 };
        if single {
            Ok(evaluate(s, v, budget)?.upper)
        } else {
            upper_quick(s, v)
        }
    };
    boundary_norm_with(c, geom, grid, &mut side_norm)
}

/// `e^{(z-θ) log(n0/n1)} x`: boundary norm `n0^{1-θ} n1^θ`, value `x` at θ.
pub fn single_exp_candidate(x: &MatrixSeq, n0: f64, n1: f64, theta: f64) -> Result<ExpCandidate> {
    if !(n0 > 0.0 && n1 > 0.0) {
        return Err(Error::Parameter(format!("endpoint norms must be positive, got {n0} and {n1}")));
    }
    ExpCandidate::new(
        theta,
        vec![ExpTerm { mu: Complex64::new((n0 / n1).ln(), 0.0), v: x.clone(), power: 0 }],
    )
}

pub(crate) const EXPONENT_RANGE: f64 = 9.210_340_371_976_184; // ln 1e4

pub(crate) fn golden_min(
    mut lo: f64,
    mut hi: f64,
    iters: usize,
    mut f: impl FnMut(f64) -> f64,
) -> (f64, f64) {
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

/// Coordinate golden-section search over a parameter vector; only
/// improvements over the starting point are accepted.
pub(crate) fn coordinate_search(
    start: Vec<f64>,
    bounds: &[(f64, f64)],
    sweeps: usize,
    mut cost: impl FnMut(&[f64]) -> f64,
) -> (Vec<f64>, f64) {
    let mut params = start;
    let mut best = cost(&params);
    for _ in 0..sweeps {
        let before = best;
        for i in 0..params.len() {
            let (lo, hi) = bounds[i];
            let (arg, val) = golden_min(lo, hi, 40, |v| {
                let mut trial = params.clone();
                trial[i] = v;
                cost(&trial)
            });
            if val < best {
                best = val;
                params[i] = arg;
            }
        }
        if before - best <= 1e-12 * before.abs() {
            break;
        }
    }
    (params, best)
}

/// Searches the two-exponential family `a e^{μ1(z-θ)} x + (1-a) e^{μ2(z-θ)} x`
/// seeded with the single-exponential candidate built from the endpoint
/// upper bounds `u0`, `u1`. Returns the best candidate and its boundary norm.
pub fn value_family_search(
    x: &MatrixSeq,
    geom: &StripGeometry,
    u0: f64,
    u1: f64,
    grid: &GridConfig,
    budget: &Budget,
) -> Result<(ExpCandidate, f64)> {
    let theta = geom.theta();
    if x.is_zero() || u0 == 0.0 || u1 == 0.0 {
        return Ok((ExpCandidate::new(theta, vec![])?, 0.0));
    }
    // Every direction met here is a multiple of `x`.
    let mut side_norm = |j: usize, v: &MatrixSeq| -> Result<f64> {
        let s = v
            .proportional_to(x, 1e-12)
            .ok_or_else(|| Error::Dimension("family term is not a multiple of x".into()))?;
        Ok(s.norm() * if j == 0 { u0 } else { u1 })
    };
    let build = |p: &[f64]| -> Result<ExpCandidate> {
        ExpCandidate::new(
            theta,
            vec![
                ExpTerm { mu: Complex64::new(p[0], 0.0), v: x.scale(Complex64::new(p[2], 0.0)), power: 0 },
                ExpTerm { mu: Complex64::new(p[1], 0.0), v: x.scale(Complex64::new(1.0 - p[2], 0.0)), power: 0 },
            ],
        )
    };
    let seed_mu = (u0 / u1).ln();
    let seed = single_exp_candidate(x, u0, u1, theta)?;
    let seed_value = boundary_norm_with(&seed, geom, grid, &mut side_norm)?.value;
    let coarse = GridConfig { points_per_side: grid.points_per_side.min(257), ..*grid };
    let sweeps = (budget.max_iter / 100).clamp(1, 3);
    let bounds = [(-EXPONENT_RANGE, EXPONENT_RANGE), (-EXPONENT_RANGE, EXPONENT_RANGE), (-1.0, 2.0)];
    let (params, _) = coordinate_search(vec![seed_mu, seed_mu, 1.0], &bounds, sweeps, |p| {
        build(p)
            .and_then(|cand| boundary_norm_with(&cand, geom, &coarse, &mut side_norm))
            .map(|r| r.value)
            .unwrap_or(f64::INFINITY)
    });
    let found = build(&params)?;
    let found_value = boundary_norm_with(&found, geom, grid, &mut side_norm)?.value;
    debug_assert!(seed_value.is_finite());
    if found_value < seed_value {
        Ok((found, found_value))
    } else {
        Ok((seed, seed_value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqspace::x_n;
    use approx::assert_relative_eq;

    fn fixed(u0: f64, u1: f64) -> impl FnMut(usize, &MatrixSeq) -> Result<f64> {
        move |j, _| Ok(if j == 0 { u0 } else { u1 })
    }

    #[test]
    fn constant_candidate_takes_the_larger_side() {
        let geom = StripGeometry::new(0.5).unwrap();
        let c = single_exp_candidate(&x_n(3), 1.0, 1.0, 0.5).unwrap();
        let r = boundary_norm(&c, &geom, &Structure::Min(2.0), &Structure::Max(2.0), &GridConfig::coarse(), &Budget::default()).unwrap();
        assert_relative_eq!(r.side0, 1.0, max_relative = 1e-9);
        assert_relative_eq!(r.side1, 3f64.sqrt(), max_relative = 1e-9);
        assert_relative_eq!(r.value, 3f64.sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn single_exponential_side_values() {
        // |e^{(j+it-θ) log λ^{-1}}| = λ^{θ-j}.
        for (theta, lambda) in [(0.5, 2.0), (0.25, 3.0), (0.8, 0.5)] {
            let geom = StripGeometry::new(theta).unwrap();
            let c = ExpCandidate::new(
                theta,
                vec![ExpTerm { mu: Complex64::new(-f64::ln(lambda), 0.0), v: x_n(2), power: 0 }],
            )
            .unwrap();
            let (n0, n1) = (1.3, 0.7);
            let r = boundary_norm_with(&c, &geom, &GridConfig::default(), &mut fixed(n0, n1)).unwrap();
            assert_relative_eq!(r.side0, lambda.powf(theta) * n0, max_relative = 1e-10);
            assert_relative_eq!(r.side1, lambda.powf(theta - 1.0) * n1, max_relative = 1e-10);
        }
    }

    #[test]
    fn single_exp_candidate_hits_the_geometric_mean() {
        let geom = StripGeometry::new(0.5).unwrap();
        let c = single_exp_candidate(&x_n(4), 1.0, 2.0, 0.5).unwrap();
        let r = boundary_norm_with(&c, &geom, &GridConfig::default(), &mut fixed(1.0, 2.0)).unwrap();
        assert_relative_eq!(r.value, 2f64.sqrt(), max_relative = 1e-12);
        assert_eq!(c.value_at_theta().unwrap(), x_n(4));
        let c = single_exp_candidate(&x_n(4), 2.0, 2.0, 0.3).unwrap();
        assert_eq!(c.terms[0].mu, Complex64::new(0.0, 0.0));
        assert!(single_exp_candidate(&x_n(4), 0.0, 2.0, 0.3).is_err());
    }

    #[test]
    fn zero_candidate_has_zero_norm() {
        let geom = StripGeometry::new(0.5).unwrap();
        let c = ExpCandidate::new(0.5, vec![ExpTerm { mu: Complex64::new(1.0, 0.0), v: MatrixSeq::zero(2), power: 0 }]).unwrap();
        let r = boundary_norm_with(&c, &geom, &GridConfig::coarse(), &mut fixed(1.0, 1.0)).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn undamped_oscillating_candidate_is_rejected() {
        let geom = StripGeometry::new(0.5).unwrap();
        let c = ExpCandidate::new(0.5, vec![ExpTerm { mu: Complex64::new(0.0, 1.0), v: x_n(2), power: 0 }]).unwrap();
        assert!(matches!(
            boundary_norm_with(&c, &geom, &GridConfig::coarse(), &mut fixed(1.0, 1.0)),
            Err(Error::Usage(_))
        ));
        let damped = c.with_damping(0.5).unwrap();
        assert!(boundary_norm_with(&damped, &geom, &GridConfig::coarse(), &mut fixed(1.0, 1.0)).is_ok());
        assert!(ExpCandidate::new(0.5, vec![]).unwrap().with_damping(-0.05).is_err());
    }

    #[test]
    fn family_search_never_beats_three_lines() {
        let geom = StripGeometry::new(0.25).unwrap();
        let (_, v) = value_family_search(&x_n(3), &geom, 1.0, 3.0, &GridConfig::default(), &Budget::default()).unwrap();
        assert_relative_eq!(v, 3f64.powf(0.25), max_relative = 1e-9);
    }

    #[test]
    fn grid_is_symmetric_and_clustered() {
        let g = GridConfig { points_per_side: 9, ..GridConfig::default() };
        let t = g.offsets(0.0);
        assert_eq!(t.len(), 9);
        assert_eq!(t[0], 0.0);
        assert_relative_eq!(t.iter().cloned().fold(0.0, f64::max), 40.0, max_relative = 1e-12);
        assert!(t[1] < 1.0);
    }
}
