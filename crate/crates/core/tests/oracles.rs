//! Worked examples with known values for every public operation.

use num_complex::Complex64;
use opspace::interp::{
    beta_of, boundary_norm, derived_sandwich, derived_upper, single_exp_candidate, GridConfig, StripGeometry,
};
use opspace::linalg::{c, direct_sum, elementary, identity, kron, operator_norm, ComplexMatrix};
use opspace::osnorm::{eval_exact, eval_interp, eval_max, eval_min, pairing_amplified, Budget, Structure};
use opspace::seqspace::{a_n, lp_norm, u_n, witness, x_n, y_n, FinSeq, MatrixSeq, Witness, WitnessKind};
use opspace::twist::{amplify, kp_map, kp_quasinorm, triviality_probe};
use opspace::Error;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn linalg_examples() {
    assert!(close(operator_norm(&identity(3)).unwrap(), 1.0, 1e-12));
    assert!(close(operator_norm(&a_n(4).unwrap()).unwrap(), 2f64.powf(1.5), 1e-12));
    let u = nalgebra::DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
    let v = nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    assert!(close(operator_norm(&(&u * v.adjoint())).unwrap(), 1.0, 1e-12));
    assert!(matches!(operator_norm(&ComplexMatrix::zeros(0, 0)), Err(Error::Dimension(_))));
    assert_eq!(kron(&identity(2), &identity(3)).unwrap(), identity(6));
    assert_eq!(kron(&elementary(2, 2, 0, 0), &elementary(2, 2, 0, 0)).unwrap(), elementary(4, 4, 0, 0));
    let ds = direct_sum(&identity(2), &ComplexMatrix::zeros(1, 1));
    assert_eq!(ds.shape(), (3, 3));
    assert_eq!(ds[(2, 2)], c(0.0, 0.0));
    assert_eq!(ds[(1, 1)], c(1.0, 0.0));
}

#[test]
fn seqspace_examples() {
    let e12 = FinSeq::basis(1).add(&FinSeq::basis(2));
    assert!(close(lp_norm(&e12, 2.0).unwrap(), 2f64.sqrt(), 1e-15));
    assert!(close(lp_norm(&u_n(4), 1.0).unwrap(), 4.0, 1e-15));
    let signs = FinSeq::from_pairs((1..=5).map(|k| (k, c(if k % 2 == 0 { -1.0 } else { 1.0 }, 0.0)))).unwrap();
    assert!(close(lp_norm(&signs, 3.0).unwrap(), 5f64.powf(1.0 / 3.0), 1e-15));
    assert!(matches!(lp_norm(&e12, 0.5), Err(Error::Parameter(_))));

    let Witness::Matrix(a2) = witness(WitnessKind::An, 2).unwrap() else { panic!() };
    assert_eq!(a2, opspace::linalg::from_real_rows(&[vec![1.0, 1.0], vec![1.0, -1.0]]).unwrap());
    let x3 = x_n(3);
    for k in 1..=3 {
        assert_eq!(x3.component(k).unwrap(), &elementary(3, 3, 0, k - 1));
    }
    let y2 = y_n(2);
    assert_eq!(y2.entry(0, 0), FinSeq::basis(1));
    assert_eq!(y2.entry(0, 1), FinSeq::basis(2));
    assert_eq!(y2.entry(1, 0), FinSeq::basis(3));
    assert_eq!(y2.entry(1, 1), FinSeq::basis(4));
    assert!(matches!(a_n(21), Err(Error::Size(_))));
    assert!(x_n(5).components().all(|(_, m)| m.iter().filter(|z| z.norm() != 0.0).count() == 1));
    assert_eq!(y_n(3).support_dim(), 9);
}

#[test]
fn exact_examples() {
    assert!(close(eval_exact(&Structure::Row, &x_n(4)).unwrap(), 2.0, 1e-12));
    assert!(close(eval_exact(&Structure::Oh, &x_n(4)).unwrap(), 2f64.sqrt(), 1e-12));
    for n in 2..=6 {
        assert!(close(eval_exact(&Structure::Col, &x_n(n)).unwrap(), 1.0, 1e-12));
    }
    assert!(close(eval_exact(&Structure::Oh, &y_n(3)).unwrap(), 3f64.sqrt(), 1e-12));
    assert!(matches!(eval_exact(&Structure::Min(2.0), &x_n(2)), Err(Error::Usage(_))));
}

#[test]
fn min_max_examples() {
    let b = Budget::default();
    assert!(close(eval_min(2.0, &x_n(5), &b).unwrap().lower, 1.0, 0.02));
    assert!(close(eval_min(1.0, &x_n(4), &b).unwrap().lower, 2.0, 0.02));
    let e1 = MatrixSeq::single_entry(1, 0, 0, &FinSeq::basis(1));
    for p in [1.0, 2.0, 3.0, f64::INFINITY] {
        let m = eval_min(p, &e1, &b).unwrap();
        assert!(close(m.lower, 1.0, 1e-12) && close(m.upper, 1.0, 1e-12));
        let m = eval_max(p, &e1, &b).unwrap();
        assert!(close(m.lower, 1.0, 1e-12) && close(m.upper, 1.0, 1e-12));
    }
    let m = eval_max(2.0, &x_n(4), &b).unwrap();
    assert!(m.contains(2.0, 1e-9) && m.gap() <= 1e-6);
    let m = eval_max(4.0, &x_n(4), &b).unwrap();
    assert!(m.contains(2f64.sqrt(), 1e-9) && m.rel_gap(2f64.sqrt()) <= 0.02);
    assert!(eval_max(2.0, &y_n(3), &b).unwrap().contains(3.0, 1e-9));
    assert!(matches!(eval_min(0.5, &x_n(2), &b), Err(Error::Parameter(_))));
}

#[test]
fn interp_examples() {
    let b = Budget::default();
    let g = GridConfig::default();
    let cases = [
        (Structure::o_lp(2.0, 0.5), 4f64.powf(0.25)),
        (Structure::o_lp(4.0 / 3.0, 0.5), 4f64.powf(3.0 / 8.0)),
        (Structure::interp(Structure::Row, Structure::Col, 0.5), 2f64.sqrt()),
    ];
    for (s, want) in cases {
        let est = eval_interp(&s, &x_n(4), &b, &g).unwrap();
        assert!(est.contains(want, 1e-9) && est.rel_gap(want) <= 0.02, "{s}: {est:?}");
    }
    let oh = eval_exact(&Structure::Oh, &x_n(5)).unwrap();
    let est = eval_interp(&Structure::o_lp(2.0, 0.5), &x_n(5), &b, &g).unwrap();
    assert!(est.lower <= oh * 1.02 && est.upper >= oh * 0.98);
}

#[test]
fn pairing_examples() {
    assert!(close(operator_norm(&pairing_amplified(&x_n(3), &x_n(3))).unwrap(), 3f64.sqrt(), 1e-12));
    assert!(close(operator_norm(&pairing_amplified(&y_n(3), &y_n(3))).unwrap(), 3.0, 1e-12));
    let a = MatrixSeq::single_entry(2, 0, 1, &FinSeq::basis(1));
    let z = MatrixSeq::single_entry(3, 1, 1, &FinSeq::basis(2));
    assert!(pairing_amplified(&a, &z).iter().all(|v| v.norm() == 0.0));
}

#[test]
fn strip_examples() {
    assert!(close(beta_of(0.5).unwrap(), 0.636_619_772_367_581_3, 1e-12));
    let g = StripGeometry::new(0.25).unwrap();
    let h = 1e-6;
    let numeric = (g.phi(Complex64::new(0.25 + h, 0.0)) - g.phi(Complex64::new(0.25 - h, 0.0))).norm() / (2.0 * h);
    assert!((beta_of(0.25).unwrap() - 1.0 / numeric).abs() <= 1e-8);
    assert!(matches!(beta_of(1.0), Err(Error::Parameter(_))));

    let gh = StripGeometry::new(0.5).unwrap();
    let cand = single_exp_candidate(&x_n(4), 1.0, 2.0, 0.5).unwrap();
    let r = boundary_norm(&cand, &gh, &Structure::Row, &Structure::Row, &GridConfig::default(), &Budget::default()).unwrap();
    // ROW norm of x^4 is 2 on both sides; the exponent 0 = log(1/2) shift scales them by 2^{±1/2}.
    assert!(close(r.side0, 2f64.sqrt() * 2.0, 1e-10) && close(r.side1, 2.0 / 2f64.sqrt(), 1e-10));
    let cand = single_exp_candidate(&x_n(4), 2.0, 2.0, 0.3).unwrap();
    let r = boundary_norm(&cand, &StripGeometry::new(0.3).unwrap(), &Structure::Min(1.0), &Structure::Max(1.0), &GridConfig::default(), &Budget::default()).unwrap();
    assert!(close(r.value, 2.0, 1e-9));
}

#[test]
fn derived_examples() {
    let g = StripGeometry::new(0.5).unwrap();
    let b = Budget::default();
    let (s0, s1) = (Structure::Min(2.0), Structure::Max(2.0));
    let d = derived_upper(&MatrixSeq::zero(3), &x_n(3), &g, &s0, &s1, &b).unwrap();
    assert!(close(d.value, g.beta() * 3f64.powf(0.25), 0.02));
    let root2 = 2f64.sqrt();
    let d = derived_upper(&x_n(4), &MatrixSeq::zero(4), &g, &s0, &s1, &b).unwrap();
    let k = 1.0 + 2.0 / std::f64::consts::PI * 2f64.ln();
    assert!(d.value >= 0.25 * k * root2 && d.value <= k * root2 + 1e-9);
    let (lo, hi) = derived_sandwich(root2, 2f64.ln() * root2, &g).unwrap();
    assert!(close(lo, 0.25 * k * root2, 1e-12) && close(hi, k * root2, 1e-12));
}

#[test]
fn twist_examples() {
    assert!(kp_map(&FinSeq::basis(1), 2.0).unwrap().is_zero());
    let e12 = FinSeq::basis(1).add(&FinSeq::basis(2));
    let k = kp_map(&e12, 2.0).unwrap();
    let want = e12.scale(c(-(2f64.ln()) / 2.0, 0.0));
    assert!(lp_norm(&k.sub(&want), 2.0).unwrap() < 1e-15);
    assert!(close(kp_quasinorm(&e12, &FinSeq::zero(), 3.0).unwrap(), 2f64.powf(1.0 / 3.0), 1e-15));
    let m = MatrixSeq::single_entry(2, 0, 0, &u_n(2));
    let a = amplify(|v| kp_map(v, 2.0), &m).unwrap();
    assert!(lp_norm(&a.entry(0, 0).sub(&u_n(2).scale(c(-(2f64.ln()) / 2.0, 0.0))), 2.0).unwrap() < 1e-15);
    let set: Vec<FinSeq> = (1..=64).map(u_n).collect();
    let l = ComplexMatrix::zeros(64, 64);
    assert!(close(triviality_probe(2.0, &l, &set).unwrap(), 64f64.ln() / 2.0, 1e-12));
    // Doubling the range raises the probe by log(2)/2.
    let small: Vec<FinSeq> = (1..=32).map(u_n).collect();
    let diff = triviality_probe(2.0, &l, &set).unwrap() - triviality_probe(2.0, &l, &small).unwrap();
    assert!(diff >= 2f64.ln() / 2.0 - 1e-12);
}
