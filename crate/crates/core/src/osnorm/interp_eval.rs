use crate::error::{Error, Result};
use crate::interp::{value_family_search, GridConfig, StripGeometry};
use crate::seqspace::MatrixSeq;

use super::{evaluate, geometric_mean, pairing_lower, Budget, NormEstimate, Structure};

/// Interval for the interpolated norm of `x`.
///
/// The upper bound is the boundary norm of the best exponential candidate
/// with value `x` at θ, the lower bound a duality ratio against the dual
/// interpolated structure.
pub fn eval_interp(s: &Structure, x: &MatrixSeq, budget: &Budget, grid: &GridConfig) -> Result<NormEstimate> {
    let Structure::Interp { s0, s1, theta } = s else {
        return Err(Error::Usage(format!("{s} is not an interpolated structure")));
    };
    s.validate()?;
    if x.is_zero() {
        return Ok(NormEstimate::exact(0.0, "zero"));
    }
    let geom = StripGeometry::new(*theta)?;
    let u0 = evaluate(s0, x, budget)?.upper;
    let u1 = evaluate(s1, x, budget)?.upper;
    let mut est = NormEstimate {
        lower: 0.0,
        upper: geometric_mean(u0, u1, *theta),
        lower_method: "trivial".into(),
        upper_method: "single-exponential candidate".into(),
    };
    let (_, family) = value_family_search(x, &geom, u0, u1, grid, budget)?;
    est.reduce_upper(family, "two-exponential candidate search");
    if let Some((v, m)) = pairing_lower(s, x, budget)? {
        est.raise_lower(v, &m);
    }
    Ok(est)
}
