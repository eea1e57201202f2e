use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use opspace::interp::{beta_of, StripGeometry};
use opspace::linalg::{direct_sum, kron, operator_norm, ComplexMatrix};
use opspace::osnorm::{eval_exact, evaluate, Budget, Structure};
use opspace::seqspace::{lp_norm, u_n, FinSeq, MatrixSeq};
use opspace::twist::{kp_map, kp_quasinorm};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn nonzero_complex() -> impl Strategy<Value = Complex64> {
    complex().prop_filter("nonzero", |c| c.norm() > 1e-3)
}

fn matrix(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(complex(), r * c).prop_map(move |v| ComplexMatrix::from_row_slice(r, c, &v))
    })
}

fn seq(max_side: usize) -> impl Strategy<Value = MatrixSeq> {
    (1..=max_side, 1..=3usize).prop_flat_map(|(n, d)| {
        prop::collection::vec(prop::collection::vec(complex(), n * n), d).prop_map(move |mats| {
            let comps = mats.iter().enumerate().map(|(k, v)| (k + 1, ComplexMatrix::from_row_slice(n, n, v)));
            MatrixSeq::from_components(n, comps).unwrap()
        })
    })
}

fn finseq() -> impl Strategy<Value = FinSeq> {
    prop::collection::vec((1..40usize, complex()), 1..12).prop_map(|pairs| {
        let mut v = FinSeq::zero();
        for (k, z) in pairs {
            v = v.add(&FinSeq::from_pairs([(k, z)]).unwrap());
        }
        v
    })
}

fn structure() -> impl Strategy<Value = Structure> {
    let leaf = prop_oneof![
        Just(Structure::Row),
        Just(Structure::Col),
        Just(Structure::Oh),
        prop_oneof![Just(1.0), Just(4.0 / 3.0), Just(2.0), Just(4.0), Just(f64::INFINITY)].prop_map(Structure::Min),
        prop_oneof![Just(1.0), Just(4.0 / 3.0), Just(2.0), Just(4.0), Just(f64::INFINITY)].prop_map(Structure::Max),
    ];
    leaf.prop_recursive(2, 6, 2, |inner| {
        (inner.clone(), inner, 0.05..0.95f64).prop_map(|(a, b, t)| Structure::interp(a, b, t))
    })
}

fn quick() -> Budget {
    Budget { starts: 4, max_iter: 100, tol: 1e-10, seed: 0 }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300) + 1e-300
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_norm_is_homogeneous(m in matrix(6), c in complex()) {
        let lhs = operator_norm(&(&m * c)).unwrap();
        prop_assert!(close(lhs, c.norm() * operator_norm(&m).unwrap(), 1e-12));
    }

    #[test]
    fn operator_norm_of_adjoint(m in matrix(6)) {
        prop_assert!(close(operator_norm(&m.adjoint()).unwrap(), operator_norm(&m).unwrap(), 1e-12));
    }

    #[test]
    fn direct_sum_takes_the_max(a in matrix(5), b in matrix(5)) {
        let want = operator_norm(&a).unwrap().max(operator_norm(&b).unwrap());
        prop_assert!(close(operator_norm(&direct_sum(&a, &b)).unwrap(), want, 1e-12));
    }

    #[test]
    fn operator_norm_squared_is_top_eigenvalue(m in matrix(6)) {
        let gram = m.adjoint() * &m;
        let eig = SymmetricEigen::new(gram);
        let top = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
        prop_assert!(close(operator_norm(&m).unwrap().powi(2), top, 1e-9));
    }

    #[test]
    fn kron_norm_is_multiplicative(a in matrix(4), b in matrix(4)) {
        let k = kron(&a, &b).unwrap();
        prop_assert_eq!(k.shape(), (a.nrows() * b.nrows(), a.ncols() * b.ncols()));
        let want = operator_norm(&a).unwrap() * operator_norm(&b).unwrap();
        prop_assert!(close(operator_norm(&k).unwrap(), want, 1e-9));
    }

    #[test]
    fn entry_view_round_trip(x in seq(4)) {
        prop_assert_eq!(MatrixSeq::from_entries(&x.entries()).unwrap(), x.clone());
        prop_assert_eq!(MatrixSeq::from_json(&x.to_json()).unwrap(), x);
    }

    #[test]
    fn dual_is_an_involution(s in structure()) {
        prop_assert!(s.dual().dual().approx_eq(&s, 1e-12));
        prop_assert!(s.to_string().parse::<Structure>().unwrap().approx_eq(&s, 1e-12));
    }

    #[test]
    fn exact_values_are_permutation_invariant(x in seq(4), shift in 1..20usize) {
        let d = x.support().len();
        let y = x.permute_indices(|k| (k + shift - 1) % d + 1 + shift).unwrap();
        for s in [Structure::Row, Structure::Col, Structure::Oh] {
            prop_assert!(close(eval_exact(&s, &x).unwrap(), eval_exact(&s, &y).unwrap(), 1e-9));
        }
    }

    #[test]
    fn exact_values_are_homogeneous(x in seq(4), c in nonzero_complex()) {
        for s in [Structure::Row, Structure::Col, Structure::Oh] {
            let lhs = eval_exact(&s, &x.scale(c)).unwrap();
            prop_assert!(close(lhs, c.norm() * eval_exact(&s, &x).unwrap(), 1e-9));
        }
    }

    #[test]
    fn oh_norm_squared_is_the_kronecker_sum(x in seq(3)) {
        let n = x.side();
        let mut acc = ComplexMatrix::zeros(n * n, n * n);
        for (_, m) in x.components() {
            acc += kron(m, &m.map(|z| z.conj())).unwrap();
        }
        let v = eval_exact(&Structure::Oh, &x).unwrap();
        prop_assert!(close(v * v, operator_norm(&acc).unwrap(), 1e-9));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn intervals_are_consistent_and_sandwiched(x in seq(3), p in prop_oneof![Just(1.0), Just(4.0 / 3.0), Just(2.0), Just(4.0)]) {
        for s in [Structure::Min(p), Structure::Max(p)] {
            let est = evaluate(&s, &x, &quick()).unwrap();
            prop_assert!(est.is_consistent(), "{:?}", est);
            prop_assert!(est.upper >= x.max_entry_norm(p).unwrap() * (1.0 - 1e-9));
            prop_assert!(est.lower <= x.sum_entry_norms(p).unwrap() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn min_below_max_and_l2_structures_between(x in seq(3)) {
        let lo = evaluate(&Structure::Min(2.0), &x, &quick()).unwrap();
        let hi = evaluate(&Structure::Max(2.0), &x, &quick()).unwrap();
        prop_assert!(lo.lower <= hi.upper * (1.0 + 1e-9));
        for s in [Structure::Row, Structure::Col, Structure::Oh] {
            let v = eval_exact(&s, &x).unwrap();
            prop_assert!(v >= lo.lower * (1.0 - 1e-9) && v <= hi.upper * (1.0 + 1e-9));
        }
    }

    #[test]
    fn min_max_intervals_overlap_under_permutation(x in seq(3), shift in 1..10usize) {
        let y = x.permute_indices(|k| k + shift).unwrap();
        for s in [Structure::Min(4.0), Structure::Max(4.0 / 3.0)] {
            let a = evaluate(&s, &x, &quick()).unwrap();
            let b = evaluate(&s, &y, &quick()).unwrap();
            prop_assert!(a.lower <= b.upper * (1.0 + 1e-9) && b.lower <= a.upper * (1.0 + 1e-9));
        }
    }

    #[test]
    fn interpolated_intervals_are_consistent(x in seq(2), t in 0.1..0.9f64) {
        let s = Structure::interp(Structure::Min(2.0), Structure::Max(2.0), t);
        let est = evaluate(&s, &x, &quick()).unwrap();
        prop_assert!(est.is_consistent(), "{:?}", est);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn kp_map_is_homogeneous(x in finseq(), c in nonzero_complex(), p in 1.1..8.0f64) {
        let lhs = kp_map(&x.scale(c), p).unwrap();
        let rhs = kp_map(&x, p).unwrap().scale(c);
        let scale = lp_norm(&rhs, 2.0).unwrap().max(1.0);
        prop_assert!(lp_norm(&lhs.sub(&rhs), 2.0).unwrap() <= 1e-12 * scale);
    }

    #[test]
    fn kp_quasinorm_is_homogeneous(x in finseq(), y in finseq(), c in nonzero_complex()) {
        let lhs = kp_quasinorm(&x.scale(c), &y.scale(c), 2.0).unwrap();
        prop_assert!(close(lhs, c.norm() * kp_quasinorm(&x, &y, 2.0).unwrap(), 1e-12));
        prop_assert!(kp_quasinorm(&x, &y, 2.0).unwrap() > 0.0);
    }

    #[test]
    fn beta_is_symmetric(t in 0.01..0.99f64) {
        prop_assert!((beta_of(t).unwrap() - beta_of(1.0 - t).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn phi_maps_the_boundary_to_the_circle(t in 0.01..0.99f64, y in -50.0..50.0f64) {
        let g = StripGeometry::new(t).unwrap();
        for j in [0.0, 1.0] {
            let r = g.phi(Complex64::new(j, y)).norm();
            prop_assert!((1.0 - 1e-6..=1.0 + 1e-12).contains(&r));
        }
        prop_assert!(g.phi(Complex64::new(t, 0.0)).norm() <= 1e-12);
    }
}

#[test]
fn log_growth_identity() {
    for n in 2..=256usize {
        let nf = n as f64;
        let excess = kp_quasinorm(&FinSeq::zero(), &u_n(n), 2.0).unwrap() - lp_norm(&u_n(n), 2.0).unwrap();
        let want = nf.ln() / 2.0 * nf.sqrt();
        assert!(close(excess, want, 1e-10), "n={n}");
    }
}

#[test]
fn quasinorm_vanishes_only_at_zero() {
    assert_eq!(kp_quasinorm(&FinSeq::zero(), &FinSeq::zero(), 2.0).unwrap(), 0.0);
}
