use num_complex::Complex;

use crate::error::{Error, Result};
use crate::kernel::random::validate_weights;
use crate::kernel::{hermitian_tolerance, index_points, OperatorKernel};
use crate::linalg::{self, ComplexMatrix};
use crate::scalar::Real;
use crate::stats::CompensatedSum;

/// Finitely supported law of a random `d × d` operator `A(ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomOperator<T: Real> {
    dim: usize,
    atoms: Vec<(T, ComplexMatrix<T>)>,
}

impl<T: Real> RandomOperator<T> {
    pub fn new(dim: usize, atoms: Vec<(T, ComplexMatrix<T>)>) -> Result<Self> {
        validate_weights(atoms.iter().map(|(w, _)| *w))?;
        for (_, a) in &atoms {
            if a.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "operator atom is {}x{}, expected {dim}x{dim}",
                    a.nrows(),
                    a.ncols()
                )));
            }
            linalg::ensure_finite(a, "operator atom")?;
        }
        Ok(Self { dim, atoms })
    }

    pub fn deterministic(a: ComplexMatrix<T>) -> Result<Self> {
        Self::new(a.nrows(), vec![(T::one(), a)])
    }

    /// Equiprobable atoms.
    pub fn uniform(atoms: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let dim = atoms.first().map_or(0, |a| a.nrows());
        let w = T::one() / T::lit(atoms.len().max(1) as f64);
        Self::new(dim, atoms.into_iter().map(|a| (w, a)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn atoms(&self) -> &[(T, ComplexMatrix<T>)] {
        &self.atoms
    }

    /// `E[F(A)]` for a matrix-valued `F`, with compensated summation.
    pub fn expectation(&self, mut f: impl FnMut(&ComplexMatrix<T>) -> ComplexMatrix<T>) -> ComplexMatrix<T> {
        let values: Vec<(T, ComplexMatrix<T>)> = self.atoms.iter().map(|(w, a)| (*w, f(a))).collect();
        let (r, c) = values[0].1.shape();
        ComplexMatrix::from_fn(r, c, |i, j| {
            let mut re = CompensatedSum::default();
            let mut im = CompensatedSum::default();
            for (w, v) in &values {
                re.add(*w * v[(i, j)].re);
                im.add(*w * v[(i, j)].im);
            }
            Complex::new(re.value(), im.value())
        })
    }
}

/// Mixed moments `K(m, n) = E[A*^m A^n]` for `0 ≤ m, n ≤ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentKernel<T: Real> {
    max_power: usize,
    dim: usize,
    /// Row-major `(M+1) × (M+1)` grid.
    blocks: Vec<ComplexMatrix<T>>,
}

impl<T: Real> MomentKernel<T> {
    /// Wraps a full block grid; only the adjoint pairing is enforced.
    pub fn from_blocks(max_power: usize, dim: usize, blocks: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let kernel = OperatorKernel::from_fn(index_points(max_power + 1), dim, |i, j| {
            blocks
                .get(i * (max_power + 1) + j)
                .cloned()
                .unwrap_or_else(|| linalg::zeros(0, 0))
        })?;
        Ok(Self::from_kernel_unchecked(max_power, kernel))
    }

    /// Reads a kernel on points `0..=M` as a moment kernel.
    pub fn from_operator_kernel(kernel: &OperatorKernel<T>) -> Result<Self> {
        let top = crate::kernel::consecutive_range(kernel)?;
        Ok(Self::from_kernel_unchecked(top, kernel.clone()))
    }

    fn from_kernel_unchecked(max_power: usize, kernel: OperatorKernel<T>) -> Self {
        Self {
            max_power,
            dim: kernel.dim(),
            blocks: kernel.blocks().to_vec(),
        }
    }

    pub fn max_power(&self) -> usize {
        self.max_power
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block(&self, m: usize, n: usize) -> &ComplexMatrix<T> {
        &self.blocks[m * (self.max_power + 1) + n]
    }

    /// The kernel on points `"0".."M"`.
    pub fn to_operator_kernel(&self) -> OperatorKernel<T> {
        OperatorKernel::from_raw(index_points(self.max_power + 1), self.dim, self.blocks.clone())
    }

    /// Whether `K(0, 0) = I` within the structural tolerance.
    pub fn is_normalized(&self) -> bool {
        linalg::max_abs_diff(self.block(0, 0), &linalg::identity(self.dim))
            <= hermitian_tolerance(T::one())
    }

    /// Moment kernel truncated to powers `≤ m`.
    pub fn truncate(&self, m: usize) -> Result<Self> {
        if m > self.max_power {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate order {} to {m}",
                self.max_power
            )));
        }
        let k = self.to_operator_kernel().restrict(&(0..=m).collect::<Vec<_>>())?;
        Ok(Self::from_kernel_unchecked(m, k))
    }
}

pub fn moment_kernel<T: Real>(a: &RandomOperator<T>, max_power: usize) -> Result<MomentKernel<T>> {
    if max_power < 1 {
        return Err(Error::InvalidArgument("max power must be >= 1".into()));
    }
    let size = max_power + 1;
    let powers: Vec<Vec<ComplexMatrix<T>>> = a
        .atoms
        .iter()
        .map(|(_, m)| linalg::powers(m, max_power))
        .collect();
    let mut blocks = vec![linalg::zeros::<T>(a.dim, a.dim); size * size];
    for m in 0..size {
        for n in m..size {
            let mut idx = 0;
            let block = a.expectation(|_| {
                let p = &powers[idx];
                idx += 1;
                p[m].adjoint() * &p[n]
            });
            if m == n {
                blocks[m * size + n] = linalg::hermitize(&block);
            } else {
                blocks[n * size + m] = block.adjoint();
                blocks[m * size + n] = block;
            }
        }
    }
    Ok(MomentKernel {
        max_power,
        dim: a.dim,
        blocks,
    })
}
