mod common;

use common::{random_pd_kernel, rng};
use opkernel::gaussian::{
    empirical_covariance, mean_square_norms, sample_paths, truncation_energy,
};
use opkernel::kernel::check_pd;
use opkernel::kolmogorov::{factorize, trace_diagonal};
use opkernel::SeededRng;
use proptest::prelude::*;
use rand::seq::SliceRandom;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn truncation_energy_is_monotone_along_chains(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (k, _) = random_pd_kernel(&mut g);
        let f = factorize(&k, 1e-10).unwrap();
        let traces = trace_diagonal(&k).unwrap();
        let mut order: Vec<usize> = (0..f.rank()).collect();
        order.shuffle(&mut g);
        for (p, t) in traces.iter().enumerate() {
            let mut prev = 0.0;
            for len in 0..=order.len() {
                let e = truncation_energy(&f, p, &order[..len]).unwrap();
                prop_assert!(e >= prev - 1e-12);
                prev = e;
            }
            prop_assert!((prev - t).abs() <= 1e-10 * t.max(1.0));
        }
    }

    #[test]
    fn rank_one_draws_are_pathwise_pd(seed in any::<u64>()) {
        let (k, _) = random_pd_kernel(&mut rng(seed));
        let f = factorize(&k, 1e-10).unwrap();
        let real = sample_paths(&f, 8, SeededRng::new(seed)).unwrap();
        let rk = opkernel::gaussian::rank_one_random_kernel(&real).unwrap();
        for (_, atom) in rk.as_discrete().unwrap().atoms() {
            prop_assert!(check_pd(atom, 1e-10).unwrap().is_pd);
        }
    }
}

#[test]
fn covariance_and_trace_identities_on_a_complex_kernel() {
    let mut g = rng(101);
    let (k, _) = loop {
        let c = random_pd_kernel(&mut g);
        if c.0.len() >= 2 && c.0.dim() >= 2 {
            break c;
        }
    };
    let f = factorize(&k, 1e-10).unwrap();
    let real = sample_paths(&f, 20_000, SeededRng::with_stream(5, 9)).unwrap();
    let est = empirical_covariance(&real);
    assert!(est.max_z_score(&k, 1e-10).unwrap() <= 5.0);
    let traces = trace_diagonal(&k).unwrap();
    for ((mean, se), tr) in mean_square_norms(&real).into_iter().zip(traces) {
        assert!((mean - tr).abs() <= 5.0 * se, "{mean} vs {tr} (se {se})");
    }
}

#[test]
fn realizations_are_reproducible() {
    let (k, _) = random_pd_kernel(&mut rng(8));
    let f = factorize(&k, 1e-10).unwrap();
    let a = sample_paths(&f, 500, SeededRng::with_stream(1, 2)).unwrap();
    let b = sample_paths(&f, 500, SeededRng::with_stream(1, 2)).unwrap();
    let c = sample_paths(&f, 500, SeededRng::with_stream(1, 3)).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.samples, c.samples);
}
