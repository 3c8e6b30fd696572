mod common;

use common::{gaussian_matrix, kernel_from_stack, random_pd_kernel, random_unitary, rng};
use opkernel::kernel::assemble_gram;
use opkernel::kolmogorov::{factorize, reconstruction_error, trace_diagonal};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn round_trip(seed in any::<u64>()) {
        let (k, _) = random_pd_kernel(&mut rng(seed));
        let scale = assemble_gram(&k).max_abs();
        let f = factorize(&k, 1e-10).unwrap();
        prop_assert!(reconstruction_error(&f, &k).unwrap() <= 1e-8 * scale);
    }

    #[test]
    fn recovers_known_rank(seed in any::<u64>()) {
        let mut g = rng(seed);
        let n = g.random_range(1..=5usize);
        let d = g.random_range(1..=3usize);
        let r0 = g.random_range(1..=n * d);
        let stack = gaussian_matrix::<f64>(&mut g, r0, n * d);
        let f = factorize(&kernel_from_stack(&stack, n, d), 1e-10).unwrap();
        prop_assert_eq!(f.rank(), r0);
    }

    #[test]
    fn gauge_freedom(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (k, _) = random_pd_kernel(&mut g);
        let f = factorize(&k, 1e-10).unwrap();
        let q = random_unitary(&mut g, f.rank());
        let rotated = f.left_multiply(&q).unwrap();
        let (e0, e1) = (reconstruction_error(&f, &k).unwrap(), reconstruction_error(&rotated, &k).unwrap());
        let scale = assemble_gram(&k).max_abs();
        prop_assert!((e0 - e1).abs() <= 1e-10 * scale.max(1.0));
    }

    #[test]
    fn factor_trace_matches_kernel_trace(seed in any::<u64>()) {
        let (k, _) = random_pd_kernel(&mut rng(seed));
        let f = factorize(&k, 1e-10).unwrap();
        let scale = assemble_gram(&k).max_abs().max(1.0);
        for (i, tr) in trace_diagonal(&k).unwrap().into_iter().enumerate() {
            let v = f.factor(i);
            prop_assert!(((v.adjoint() * v).trace().re - tr).abs() <= 1e-10 * scale);
        }
    }
}

#[test]
fn single_precision_round_trip() {
    let mut g = rng(3);
    let stack = gaussian_matrix::<f32>(&mut g, 2, 3);
    let k = kernel_from_stack(&stack, 3, 1);
    let f = factorize(&k, 1e-5f32).unwrap();
    assert_eq!(f.rank(), 2);
    assert!(reconstruction_error(&f, &k).unwrap() < 1e-4 * assemble_gram(&k).max_abs());
}
