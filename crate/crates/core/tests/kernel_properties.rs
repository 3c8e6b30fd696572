mod common;

use common::{gaussian_matrix, kernel_from_stack, random_pd_kernel, rng};
use nalgebra::DVector;
use opkernel::kernel::{assemble_gram, check_pd, scalarize, DiscreteRandomKernel, RandomKernel};
use opkernel::linalg;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gram_is_hermitian(seed in any::<u64>()) {
        let (k, _) = random_pd_kernel(&mut rng(seed));
        let g = assemble_gram(&k).matrix;
        let asym = linalg::max_abs_diff(&g, &g.adjoint());
        prop_assert!(asym <= 1e-12 * linalg::max_abs(&g));
    }

    #[test]
    fn rpd_is_pd_of_mean(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (k0, _) = random_pd_kernel(&mut g);
        let (n, d) = (k0.len(), k0.dim());
        let atoms: Vec<_> = (0..g.random_range(1..5usize))
            .map(|_| {
                let s = gaussian_matrix::<f64>(&mut g, n * d, n * d);
                let pert = kernel_from_stack(&s, n, d);
                k0.linear_combination(1.0, &pert, g.random_range(-1.0..1.0)).unwrap()
            })
            .collect();
        let rk: RandomKernel<f64> = DiscreteRandomKernel::uniform(atoms).unwrap().into();
        let mean = rk.mean_kernel(None).unwrap().kernel;
        prop_assert_eq!(rk.check_rpd(1e-10).unwrap(), check_pd(&mean, 1e-10).unwrap());
    }

    #[test]
    fn pd_is_a_convex_cone(seed in any::<u64>(), alpha in 0.0f64..10.0, beta in 0.0f64..10.0) {
        let mut g = rng(seed);
        let (k1, _) = random_pd_kernel(&mut g);
        let s = gaussian_matrix::<f64>(&mut g, 3, k1.len() * k1.dim());
        let k2 = kernel_from_stack(&s, k1.len(), k1.dim());
        let sum = k1.linear_combination(alpha, &k2, beta).unwrap();
        prop_assert!(check_pd(&sum, 1e-10).unwrap().is_pd);
    }

    #[test]
    fn pd_kernels_are_rpd(seed in any::<u64>()) {
        let (k, _) = random_pd_kernel(&mut rng(seed));
        let rk: RandomKernel<f64> = DiscreteRandomKernel::point_mass(k).into();
        prop_assert!(rk.check_rpd(1e-10).unwrap().is_pd);
    }

    #[test]
    fn scalarized_kernel_is_psd(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (k, _) = random_pd_kernel(&mut g);
        let pairs: Vec<_> = (0..g.random_range(1..8usize))
            .map(|_| {
                let s = g.random_range(0..k.len());
                let a: DVector<_> = gaussian_matrix::<f64>(&mut g, k.dim(), 1).column(0).into_owned();
                (s, a)
            })
            .collect();
        let m = scalarize(&k, &pairs).unwrap();
        let (lo, hi) = linalg::eig_extremes(&m).unwrap();
        prop_assert!(lo >= -1e-10 * hi.max(1.0), "λ_min {lo}");
    }
}

#[test]
fn witness_is_mean_pd_but_not_pathwise() {
    use opkernel::kernel::OperatorKernel as K;
    let rk: RandomKernel<f64> = DiscreteRandomKernel::new(vec![
        (0.5, K::scalar(2, &[2.0, 4.0, 4.0, 2.0]).unwrap()),
        (0.5, K::scalar(2, &[2.0, -2.0, -2.0, 2.0]).unwrap()),
    ])
    .unwrap()
    .into();
    assert!(!rk.is_pathwise_pd(1e-10).unwrap().all_pathwise_pd);
    assert!(rk.check_rpd(1e-10).unwrap().is_pd);
}
