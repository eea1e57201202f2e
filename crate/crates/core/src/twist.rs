//! The Kalton–Peck map `K(x)_i = x_i log(|x_i| / ‖x‖_p)`, its twisted-sum
//! quasinorm, entrywise amplification and probes for nonlinearity.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::rng::{complex_gaussian, derive_seed, rng_from_seed, SeededRng};
use crate::seqspace::{finseq_to_json, lp_norm, u_n, FinSeq, MatrixSeq};

fn check_twist_exponent(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("twist exponent must lie in (1, inf), got {p}")))
    }
}

/// `K(x)`, with zero coordinates (and the zero vector) mapped to zero.
pub fn kp_map(x: &FinSeq, p: f64) -> Result<FinSeq> {
    check_twist_exponent(p)?;
    let norm = lp_norm(x, p)?;
    if norm == 0.0 {
        return Ok(FinSeq::zero());
    }
    Ok(x.map_coords(|_, v| v * (v.norm() / norm).ln()))
}

/// `‖x - K(y)‖_p + ‖y‖_p`.
pub fn kp_quasinorm(x: &FinSeq, y: &FinSeq, p: f64) -> Result<f64> {
    let k = kp_map(y, p)?;
    Ok(lp_norm(&x.sub(&k), p)? + lp_norm(y, p)?)
}

/// Applies a sequence map to every entry of `m`.
pub fn amplify(map: impl Fn(&FinSeq) -> Result<FinSeq>, m: &MatrixSeq) -> Result<MatrixSeq> {
    let entries = m
        .entries()
        .iter()
        .map(|row| row.iter().map(&map).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if entries.is_empty() {
        return Ok(MatrixSeq::zero(m.side()));
    }
    MatrixSeq::from_entries(&entries)
}

/// Empirical nonlinearity constant of `K`.
#[derive(Debug, Clone, Serialize)]
pub struct QuasilinearReport {
    pub max_ratio: f64,
    /// Label and inputs of the sample attaining `max_ratio`.
    pub arg_max: String,
    pub samples: usize,
    pub seed: u64,
    /// Ratio on the deterministic disjoint equal-norm pair.
    pub disjoint_ratio: f64,
    /// Ratio on the deterministic pair `x = y`.
    pub equal_ratio: f64,
}

/// `‖K(x+y) - K(x) - K(y)‖_p / (‖x‖_p + ‖y‖_p)`.
pub fn pair_ratio(x: &FinSeq, y: &FinSeq, p: f64) -> Result<f64> {
    let den = lp_norm(x, p)? + lp_norm(y, p)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    let d = kp_map(&x.add(y), p)?.sub(&kp_map(x, p)?).sub(&kp_map(y, p)?);
    Ok(lp_norm(&d, p)? / den)
}

/// `‖Σ K(z_i)‖_p / Σ ‖z_i‖_p` for a family summing to zero.
pub fn family_ratio(zs: &[FinSeq], p: f64) -> Result<f64> {
    let mut sum = FinSeq::zero();
    let mut den = 0.0;
    for z in zs {
        sum = sum.add(&kp_map(z, p)?);
        den += lp_norm(z, p)?;
    }
    Ok(if den == 0.0 { 0.0 } else { lp_norm(&sum, p)? / den })
}

/// Ratio of the disjoint equal-norm pair: `(log 2 / p) 2^{1/p - 1}`.
pub fn disjoint_ratio_closed_form(p: f64) -> f64 {
    std::f64::consts::LN_2 / p * 2f64.powf(1.0 / p - 1.0)
}

/// Complex Gaussian coordinates on a random support of size at most 32
/// inside `1..=64`.
pub fn random_finseq(rng: &mut SeededRng) -> FinSeq {
    let size = rng.random_range(1..=32usize);
    let idx = rand::seq::index::sample(rng, 64, size);
    let pairs: Vec<(usize, Complex64)> = idx.into_iter().map(|i| (i + 1, complex_gaussian(rng))).collect();
    FinSeq::from_pairs(pairs).expect("indices are positive")
}

/// Maximum of the pair and zero-sum-triple ratios over seeded samples, plus
/// two deterministic pairs. Sample `i` draws from its own derived seed, so the
/// result does not depend on scheduling.
pub fn quasilinearity_probe(p: f64, samples: usize, seed: u64) -> Result<QuasilinearReport> {
    check_twist_exponent(p)?;
    let mut report = QuasilinearReport {
        max_ratio: 0.0,
        arg_max: String::new(),
        samples,
        seed,
        disjoint_ratio: 0.0,
        equal_ratio: 0.0,
    };
    if samples == 0 {
        return Ok(report);
    }
    let x = u_n(4);
    let y = FinSeq::from_pairs((5..=8).map(|k| (k, Complex64::new(1.0, 0.0))))?;
    report.disjoint_ratio = pair_ratio(&x, &y, p)?;
    report.equal_ratio = pair_ratio(&x, &x, p)?;
    let mut best: (f64, String) = (report.disjoint_ratio, format!("disjoint pair {} {}", finseq_to_json(&x), finseq_to_json(&y)));
    if report.equal_ratio > best.0 {
        best = (report.equal_ratio, "equal pair".into());
    }

    let results: Vec<Result<(f64, String)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(derive_seed(seed, i as u64));
            let a = random_finseq(&mut rng);
            let b = random_finseq(&mut rng);
            let pair = pair_ratio(&a, &b, p)?;
            let c = a.add(&b).scale(Complex64::new(-1.0, 0.0));
            let triple = family_ratio(&[a.clone(), b.clone(), c], p)?;
            let (r, kind) = if pair >= triple { (pair, "pair") } else { (triple, "zero-sum triple") };
            Ok((r, format!("sample {i} {kind} {} {}", finseq_to_json(&a), finseq_to_json(&b))))
        })
        .collect();
    for r in results {
        let (v, label) = r?;
        if v > best.0 {
            best = (v, label);
        }
    }
    report.max_ratio = best.0;
    report.arg_max = best.1;
    Ok(report)
}

/// `max_z ‖K(z) - L z‖_p / ‖z‖_p` for a linear map `L` on `span(e_1..e_N)`.
pub fn triviality_probe(p: f64, l: &ComplexMatrix, test_set: &[FinSeq]) -> Result<f64> {
    check_twist_exponent(p)?;
    let dim = l.nrows();
    if l.ncols() != dim {
        return Err(Error::Usage(format!("linear map must be square, got {}x{}", l.nrows(), l.ncols())));
    }
    let mut best = 0.0f64;
    for z in test_set {
        if let Some(&k) = z.support().last() {
            if k > dim {
                return Err(Error::Usage(format!("test vector uses e_{k} beyond the span of dimension {dim}")));
            }
        }
        let norm = lp_norm(z, p)?;
        if norm == 0.0 {
            continue;
        }
        let dense = nalgebra::DVector::from_fn(dim, |i, _| z.get(i + 1));
        let lz = FinSeq::from_dense((l * dense).as_slice());
        let r = lp_norm(&kp_map(z, p)?.sub(&lz), p)? / norm;
        best = best.max(r);
    }
    Ok(best)
}

/// `{u_n : n ≤ N} ∪ {e_i : i ≤ N}` plus `random` seeded unit vectors in `span(e_1..e_N)`.
pub fn default_test_set(dim: usize, random: usize, seed: u64, p: f64) -> Result<Vec<FinSeq>> {
    let mut set: Vec<FinSeq> = (1..=dim).map(u_n).collect();
    set.extend((1..=dim).map(FinSeq::basis));
    let mut rng = rng_from_seed(derive_seed(seed, 0x7E57));
    for _ in 0..random {
        let v = FinSeq::from_dense(&crate::rng::gaussian_vec(&mut rng, dim));
        let norm = lp_norm(&v, p)?;
        if norm > 0.0 {
            set.push(v.scale(Complex64::new(1.0 / norm, 0.0)));
        }
    }
    Ok(set)
}

/// Entrywise versus matrix-level nonlinearity of the amplified map.
#[derive(Debug, Clone, Serialize)]
pub struct AmplifiedReport {
    pub n: usize,
    pub samples: usize,
    /// Largest `Σ_ij ‖Δ_ij‖ / (max_ij ‖X_ij‖ + max_ij ‖Y_ij‖)`.
    pub matrix_ratio: f64,
    /// Largest scalar pair ratio over the entries involved.
    pub entry_ratio: f64,
}

impl AmplifiedReport {
    pub fn bound(&self) -> f64 {
        (self.n * self.n) as f64 * self.entry_ratio
    }

    pub fn holds(&self) -> bool {
        self.matrix_ratio <= self.bound() * (1.0 + 1e-12) + 1e-12
    }
}

/// Measures the amplified defect with the entry sandwich: the largest
/// matrix norm is at most the sum of entry norms, the smallest at least the
/// largest entry norm.
pub fn amplified_probe(p: f64, n: usize, samples: usize, seed: u64) -> Result<AmplifiedReport> {
    check_twist_exponent(p)?;
    let k = |v: &FinSeq| kp_map(v, p);
    let mut report = AmplifiedReport { n, samples, matrix_ratio: 0.0, entry_ratio: 0.0 };
    for s in 0..samples {
        let mut rng = rng_from_seed(derive_seed(seed, s as u64));
        let mut draw = || -> Vec<Vec<FinSeq>> {
            (0..n).map(|_| (0..n).map(|_| random_finseq(&mut rng)).collect()).collect()
        };
        let xe = draw();
        let ye = draw();
        let x = MatrixSeq::from_entries(&xe)?;
        let y = MatrixSeq::from_entries(&ye)?;
        let defect = amplify(k, &x.add(&y)?)?.sub(&amplify(k, &x)?)?.sub(&amplify(k, &y)?)?;
        let den = x.max_entry_norm(p)? + y.max_entry_norm(p)?;
        if den > 0.0 {
            report.matrix_ratio = report.matrix_ratio.max(defect.sum_entry_norms(p)? / den);
        }
        for i in 0..n {
            for j in 0..n {
                report.entry_ratio = report.entry_ratio.max(pair_ratio(&xe[i][j], &ye[i][j], p)?);
            }
        }
    }
    Ok(report)
}
