use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Conformal equivalence of the strip onto the unit disk sending θ to 0:
/// `φ(z) = (e^{iπz} - e^{iπθ}) / (e^{iπz} - e^{-iπθ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripGeometry {
    theta: f64,
}

impl StripGeometry {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::Parameter(format!("theta = {theta} must lie in (0, 1)")));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn anchor(&self) -> Complex64 {
        Complex64::from_polar(1.0, PI * self.theta)
    }

    pub fn phi(&self, z: Complex64) -> Complex64 {
        let w = (Complex64::i() * PI * z).exp();
        let a = self.anchor();
        (w - a) / (w - a.conj())
    }

    pub fn phi_prime(&self, z: Complex64) -> Complex64 {
        let w = (Complex64::i() * PI * z).exp();
        let a = self.anchor();
        let dw = Complex64::i() * PI * w;
        dw * (a - a.conj()) / ((w - a.conj()) * (w - a.conj()))
    }

    /// `φ'(θ) = π e^{iπθ} / (2 sin πθ)`.
    pub fn phi_prime_at_theta(&self) -> Complex64 {
        self.anchor() * (PI / (2.0 * (PI * self.theta).sin()))
    }

    /// `β = 1/|φ'(θ)| = 2 sin(πθ)/π`.
    pub fn beta(&self) -> f64 {
        2.0 * (PI * self.theta).sin() / PI
    }
}

pub fn beta_of(theta: f64) -> Result<f64> {
    Ok(StripGeometry::new(theta)?.beta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn beta_at_one_half() {
        assert_relative_eq!(beta_of(0.5).unwrap(), 2.0 / PI, epsilon = 1e-15);
        assert!(beta_of(0.0).is_err());
        assert!(beta_of(1.0).is_err());
    }

    #[test]
    fn derivative_formula_matches_the_closed_form() {
        for theta in [0.1, 0.25, 0.5, 0.8] {
            let g = StripGeometry::new(theta).unwrap();
            let a = g.phi_prime(c(theta, 0.0));
            let b = g.phi_prime_at_theta();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn boundary_maps_to_the_unit_circle() {
        let g = StripGeometry::new(0.3).unwrap();
        assert!(g.phi(c(0.3, 0.0)).norm() < 1e-15);
        for j in [0.0, 1.0] {
            for t in [-20.0, -3.0, -0.1, 0.0, 0.7, 5.0] {
                let m = g.phi(c(j, t)).norm();
                assert!((1.0 - 1e-6..=1.0 + 1e-12).contains(&m), "|phi({j}+{t}i)| = {m}");
            }
        }
        assert!(g.phi(c(0.6, 0.4)).norm() < 1.0);
    }
}
