mod common;

use common::{gaussian_matrix, random_contraction_operator, random_unitary, rng};
use opkernel::dilation::{
    build_dilation, build_shift, moment_kernel, reconstruct_moments, shift_domination,
    stationarity_defect, verify_dilation, von_neumann_check, DilationTriple, RandomOperator,
};
use opkernel::kernel::check_pd;
use opkernel::linalg::{self, ComplexMatrix};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn moment_kernels_are_pd(seed in any::<u64>(), m in 1usize..=5) {
        let mut g = rng(seed);
        let d = g.random_range(1..=3);
        let atoms: Vec<ComplexMatrix<f64>> = (0..g.random_range(1..=4))
            .map(|_| gaussian_matrix(&mut g, d, d).map(|z| z * 0.8))
            .collect();
        let k = moment_kernel(&RandomOperator::uniform(atoms).unwrap(), m).unwrap();
        prop_assert!(check_pd(&k.to_operator_kernel(), 1e-10).unwrap().is_pd);
    }

    #[test]
    fn domination_yields_verified_dilation(seed in any::<u64>()) {
        let op = random_contraction_operator(&mut rng(seed), 3, 4);
        let k = moment_kernel(&op, 4).unwrap();
        prop_assert!(shift_domination(&k, 1e-10).unwrap().holds);
        let t = build_dilation(&k, 1e-10).unwrap();
        let v = verify_dilation(&k, &t).unwrap();
        prop_assert!(v.max_residual <= 1e-8, "{:?}", v);
        prop_assert!(v.c3_holds, "{:?}", v);
        prop_assert!(v.unitarity <= 1e-10 && v.projection <= 1e-10 && v.isometry <= 1e-10);
    }

    #[test]
    fn dilation_kernels_are_shift_dominated(seed in any::<u64>()) {
        let mut g = rng(seed);
        // P commutes with U (U = U1 ⊕ U2, P = I ⊕ 0), so U*PU = P.
        let (a, b) = (g.random_range(1..=4usize), g.random_range(1..=4usize));
        let d = g.random_range(1..=a + b);
        let mut u = linalg::zeros::<f64>(a + b, a + b);
        u.view_mut((0, 0), (a, a)).copy_from(&random_unitary(&mut g, a));
        u.view_mut((a, a), (b, b)).copy_from(&random_unitary(&mut g, b));
        let mut p = linalg::zeros::<f64>(a + b, a + b);
        for i in 0..a {
            p[(i, i)] = linalg::c(1.0, 0.0);
        }
        let w = random_unitary(&mut g, a + b).columns(0, d).into_owned();
        let t = DilationTriple { space_dim: a + b, rank: a, trunc_depth: 4, u, p, w, b: linalg::zeros(a, a) };
        let k = reconstruct_moments(&t, 4).unwrap();
        prop_assert!(shift_domination(&k, 1e-8).unwrap().holds);
    }

    #[test]
    fn built_dilations_reproduce_dominated_kernels(seed in any::<u64>()) {
        let op = random_contraction_operator(&mut rng(seed), 3, 4);
        let t = build_dilation(&moment_kernel(&op, 3).unwrap(), 1e-10).unwrap();
        let k = reconstruct_moments(&t, 3).unwrap();
        prop_assert!(shift_domination(&k, 1e-8).unwrap().holds);
    }
}

#[test]
fn stationary_iff_isometric_shift() {
    let mut g = rng(12);
    for trial in 0..20 {
        let d = g.random_range(1..=3);
        // stationary: unitary atoms; non-stationary: strict contractions
        let op = if trial % 2 == 0 {
            RandomOperator::uniform((0..3).map(|_| random_unitary(&mut g, d)).collect()).unwrap()
        } else {
            RandomOperator::uniform(
                (0..3).map(|_| random_unitary(&mut g, d).map(|z| z * 0.7)).collect(),
            )
            .unwrap()
        };
        let k = moment_kernel(&op, 3).unwrap();
        let stationary = stationarity_defect(&k).unwrap() <= 1e-10;
        let s = build_shift(&k, 1e-10).unwrap();
        let isometric = s.isometry_residual() <= 1e-8;
        assert_eq!(stationary, trial % 2 == 0);
        assert_eq!(stationary, isometric, "trial {trial}");
    }
}

#[test]
fn von_neumann_on_random_pairs() {
    let mut g = rng(2024);
    for _ in 0..100 {
        let op = random_contraction_operator(&mut g, 3, 4);
        let deg = g.random_range(0..=5);
        let coeffs: Vec<_> = (0..=deg)
            .map(|_| linalg::c(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0)))
            .collect();
        let r = von_neumann_check(&op, &coeffs, 4096, 1e-10).unwrap();
        assert!(r.holds, "{r:?}");
    }
}

#[test]
fn deterministic_contraction_reduces_to_classical_dilation() {
    let mut g = rng(77);
    for _ in 0..10 {
        let a = random_unitary(&mut g, 2).map(|z| z * 0.9);
        let k = moment_kernel(&RandomOperator::deterministic(a.clone()).unwrap(), 4).unwrap();
        let t = build_dilation(&k, 1e-10).unwrap();
        let v = verify_dilation(&k, &t).unwrap();
        assert!(v.passes(), "{v:?}");
        for m in 0..=4 {
            for n in 0..=4 {
                let classical = linalg::mat_pow(&a, m).adjoint() * linalg::mat_pow(&a, n);
                let um = linalg::mat_pow(&t.u, m) * &t.w;
                let un = linalg::mat_pow(&t.u, n) * &t.w;
                let model = um.adjoint() * &t.p * &un;
                assert!(linalg::max_abs_diff(&classical, &model) <= 1e-8);
            }
        }
    }
}

#[test]
fn single_precision_dilation() {
    let half: ComplexMatrix<f32> = linalg::from_real_rows(1, 1, &[0.5]);
    let op = RandomOperator::uniform(vec![half.clone(), -half]).unwrap();
    let k = moment_kernel(&op, 3).unwrap();
    let t = build_dilation(&k, 1e-5f32).unwrap();
    let v = verify_dilation(&k, &t).unwrap();
    assert!(v.max_residual < 1e-5 && v.c3_holds);
}
