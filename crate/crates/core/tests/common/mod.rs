#![allow(dead_code)]

use opkernel::dilation::RandomOperator;
use opkernel::kernel::{index_points, OperatorKernel};
use opkernel::linalg::{self, ComplexMatrix};
use opkernel::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix<T: Real>(g: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        linalg::c(T::standard_normal(g), T::standard_normal(g))
    })
}

/// `K = V* V` from an explicit `r0 × Nd` factor, assembled block by block.
pub fn kernel_from_stack<T: Real>(stack: &ComplexMatrix<T>, n: usize, d: usize) -> OperatorKernel<T> {
    let r = stack.nrows();
    OperatorKernel::from_fn(index_points(n), d, |i, j| {
        let vi = stack.view((0, i * d), (r, d));
        let vj = stack.view((0, j * d), (r, d));
        vi.adjoint() * vj
    })
    .unwrap()
}

/// Random pd kernel with `N ∈ [1,6]`, `d ∈ [1,4]` and random rank.
pub fn random_pd_kernel(g: &mut ChaCha8Rng) -> (OperatorKernel<f64>, usize) {
    let n = g.random_range(1..=6);
    let d = g.random_range(1..=4);
    let r0 = g.random_range(1..=n * d);
    let stack = gaussian_matrix::<f64>(g, r0, n * d);
    (kernel_from_stack(&stack, n, d), r0)
}

/// Atoms rescaled to spectral norm `≤ 1`.
pub fn random_contraction_operator(g: &mut ChaCha8Rng, max_dim: usize, max_atoms: usize) -> RandomOperator<f64> {
    let d = g.random_range(1..=max_dim);
    let count = g.random_range(1..=max_atoms);
    let mut raw: Vec<f64> = (0..count).map(|_| g.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter_mut().for_each(|w| *w /= total);
    let atoms = raw
        .into_iter()
        .map(|w| {
            let a = gaussian_matrix::<f64>(g, d, d);
            let norm = linalg::op_norm(&a).unwrap();
            let target = g.random_range(0.2..=1.0);
            (w, a.map(|z| z * (target / norm)))
        })
        .collect::<Vec<_>>();
    let w_sum: f64 = atoms.iter().map(|(w, _)| w).sum();
    let atoms = atoms.into_iter().map(|(w, a)| (w / w_sum, a)).collect();
    RandomOperator::new(d, atoms).unwrap()
}

/// Random Haar-like unitary from the QR of a Gaussian matrix.
pub fn random_unitary(g: &mut ChaCha8Rng, n: usize) -> ComplexMatrix<f64> {
    gaussian_matrix::<f64>(g, n, n).qr().q()
}
