//! Operator-valued kernels on a finite point set.
//!
//! A kernel `K: X × X → L(H)` with `X = {s_0, …, s_{N-1}}` and `dim H = d` is
//! stored as its `N × N` grid of `d × d` blocks. Positivity is the positive
//! semidefiniteness of the block Gram matrix `[K(s_i, s_j)]`, i.e. of the
//! quadratic form `Σ ⟨a_i, K(s_i, s_j) a_j⟩`. Inner products are linear in
//! the second argument: `⟨a, b⟩ = a* b`.

pub(crate) mod random;

pub use random::{
    DiscreteRandomKernel, KernelSampler, MeanKernel, MonteCarlo, PathwiseReport, RandomKernel,
};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorKernel<T: Real> {
    points: Vec<String>,
    dim: usize,
    /// Row-major `N × N` grid of `d × d` blocks.
    blocks: Vec<ComplexMatrix<T>>,
}

/// Block Gram matrix of a kernel; block `(i, j)` is `K(s_i, s_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix<T: Real> {
    pub matrix: ComplexMatrix<T>,
    pub n_points: usize,
    pub dim: usize,
}

impl<T: Real> GramMatrix<T> {
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix<T> {
        let d = self.dim;
        self.matrix.view((i * d, j * d), (d, d)).into_owned()
    }

    pub fn max_abs(&self) -> T {
        linalg::max_abs(&self.matrix)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdReport<T: Real> {
    pub is_pd: bool,
    pub min_eigenvalue: T,
    pub max_eigenvalue: T,
    pub tol: T,
}

/// Relative positivity test shared by every pd decision in the crate:
/// `λ_min ≥ −tol · max(1, λ_max)`.
pub(crate) fn pd_verdict<T: Real>(min: T, max: T, tol: T) -> bool {
    min >= -tol * max.max(T::one())
}

pub(crate) fn hermitian_tolerance<T: Real>(scale: T) -> T {
    T::identity_tol() * scale.max(T::one())
}

/// Labels `"0"`, `"1"`, … `"n-1"`.
pub fn index_points(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

impl<T: Real> OperatorKernel<T> {
    /// Builds a kernel from its full block grid, `blocks[i][j] = K(s_i, s_j)`.
    pub fn from_blocks(
        points: Vec<String>,
        dim: usize,
        blocks: Vec<Vec<ComplexMatrix<T>>>,
    ) -> Result<Self> {
        let n = points.len();
        if blocks.len() != n || blocks.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "expected a {n}x{n} grid of blocks"
            )));
        }
        Self::validated(points, dim, blocks.into_iter().flatten().collect())
    }

    /// Builds a kernel from a sparse set of blocks. A missing `(j, i)` block
    /// is filled in as the adjoint of `(i, j)`.
    pub fn from_partial(
        points: Vec<String>,
        dim: usize,
        mut given: BTreeMap<(usize, usize), ComplexMatrix<T>>,
    ) -> Result<Self> {
        let n = points.len();
        if let Some(&(i, j)) = given.keys().find(|&&(i, j)| i >= n || j >= n) {
            return Err(Error::DimensionMismatch(format!(
                "block ({i},{j}) outside {n} points"
            )));
        }
        let mut blocks = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let b = match given.remove(&(i, j)) {
                    Some(b) => b,
                    None => match given.get(&(j, i)) {
                        Some(b) => b.adjoint(),
                        None => match blocks.get(j * n + i) {
                            Some(b) if j < i => ComplexMatrix::<T>::adjoint(b),
                            _ => return Err(Error::MissingBlock { i, j }),
                        },
                    },
                };
                blocks.push(b);
            }
        }
        Self::validated(points, dim, blocks)
    }

    pub fn from_fn(
        points: Vec<String>,
        dim: usize,
        mut f: impl FnMut(usize, usize) -> ComplexMatrix<T>,
    ) -> Result<Self> {
        let n = points.len();
        let blocks = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::validated(points, dim, blocks)
    }

    /// Scalar (`d = 1`) kernel on points `"0".."N-1"` from row-major real values.
    pub fn scalar(n: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {n} points",
                values.len()
            )));
        }
        Self::from_fn(index_points(n), 1, |i, j| {
            linalg::from_real_rows(1, 1, &[values[i * n + j]])
        })
    }

    /// `K(s, t) = δ_{st} I_d`.
    pub fn identity(points: Vec<String>, dim: usize) -> Self {
        let n = points.len();
        let blocks = (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    linalg::identity(dim)
                } else {
                    linalg::zeros(dim, dim)
                }
            })
            .collect();
        Self { points, dim, blocks }
    }

    pub fn zero(points: Vec<String>, dim: usize) -> Self {
        let n = points.len();
        Self {
            blocks: vec![linalg::zeros(dim, dim); n * n],
            points,
            dim,
        }
    }

    fn validated(points: Vec<String>, dim: usize, blocks: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let n = points.len();
        for (k, b) in blocks.iter().enumerate() {
            if b.shape() != (dim, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "block ({},{}) is {}x{}, expected {dim}x{dim}",
                    k / n,
                    k % n,
                    b.nrows(),
                    b.ncols()
                )));
            }
            linalg::ensure_finite(b, "kernel block")?;
        }
        let kernel = Self { points, dim, blocks };
        kernel.check_hermitian()?;
        Ok(kernel)
    }

    fn check_hermitian(&self) -> Result<()> {
        let n = self.len();
        let tol = hermitian_tolerance(self.max_abs());
        for i in 0..n {
            for j in i..n {
                let dev = linalg::max_abs_diff(self.block(i, j), &self.block(j, i).adjoint());
                if dev > tol {
                    return Err(Error::NotHermitian {
                        i,
                        j,
                        deviation: dev.as_f64(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points `N`.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn block(&self, i: usize, j: usize) -> &ComplexMatrix<T> {
        &self.blocks[i * self.len() + j]
    }

    pub fn index_of(&self, point: &str) -> Option<usize> {
        self.points.iter().position(|p| p == point)
    }

    pub fn max_abs(&self) -> T {
        self.blocks
            .iter()
            .fold(T::zero(), |acc, b| acc.max(linalg::max_abs(b)))
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.dim == other.dim && self.points == other.points
    }

    pub(crate) fn ensure_same_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "kernels on {:?} (d={}) and {:?} (d={})",
                self.points, self.dim, other.points, other.dim
            )))
        }
    }

    /// Entrywise `‖K − L‖_max` over all blocks.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.ensure_same_shape(other)?;
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .fold(T::zero(), |acc, (a, b)| acc.max(linalg::max_abs_diff(a, b))))
    }

    /// `α K + β L`.
    pub fn linear_combination(&self, alpha: T, other: &Self, beta: T) -> Result<Self> {
        self.ensure_same_shape(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.map(|z| z.scale(alpha)) + b.map(|z| z.scale(beta)))
            .collect();
        Ok(Self {
            points: self.points.clone(),
            dim: self.dim,
            blocks,
        })
    }

    pub fn scaled(&self, alpha: T) -> Self {
        Self {
            points: self.points.clone(),
            dim: self.dim,
            blocks: self.blocks.iter().map(|b| b.map(|z| z.scale(alpha))).collect(),
        }
    }

    /// Restriction to a subset of points (in the given order).
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.len()) {
            return Err(Error::InvalidArgument(format!("point index {bad} out of range")));
        }
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        let blocks = indices
            .iter()
            .flat_map(|&i| indices.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.block(i, j).clone())
            .collect();
        Ok(Self {
            points,
            dim: self.dim,
            blocks,
        })
    }

    pub(crate) fn from_raw(points: Vec<String>, dim: usize, blocks: Vec<ComplexMatrix<T>>) -> Self {
        debug_assert_eq!(blocks.len(), points.len() * points.len());
        Self { points, dim, blocks }
    }

    pub(crate) fn blocks(&self) -> &[ComplexMatrix<T>] {
        &self.blocks
    }
}

/// Places `K(s_i, s_j)` at block `(i, j)` of an `Nd × Nd` matrix and
/// symmetrizes it as `(G + G*) / 2`.
pub fn assemble_gram<T: Real>(kernel: &OperatorKernel<T>) -> GramMatrix<T> {
    let (n, d) = (kernel.len(), kernel.dim());
    let mut g = linalg::zeros::<T>(n * d, n * d);
    for i in 0..n {
        for j in 0..n {
            g.view_mut((i * d, j * d), (d, d)).copy_from(kernel.block(i, j));
        }
    }
    GramMatrix {
        matrix: linalg::hermitize(&g),
        n_points: n,
        dim: d,
    }
}

pub fn check_pd<T: Real>(kernel: &OperatorKernel<T>, tol: T) -> Result<PdReport<T>> {
    let gram = assemble_gram(kernel);
    let (min, max) = linalg::eig_extremes(&gram.matrix)?;
    Ok(PdReport {
        is_pd: pd_verdict(min, max, tol),
        min_eigenvalue: min,
        max_eigenvalue: max,
        tol,
    })
}

/// Scalar kernel `K̃((s,a),(t,b)) = ⟨a, K(s,t) b⟩` evaluated on a finite list
/// of `(point index, vector)` pairs.
pub fn scalarize<T: Real>(
    kernel: &OperatorKernel<T>,
    pairs: &[(usize, ComplexVector<T>)],
) -> Result<ComplexMatrix<T>> {
    for (s, a) in pairs {
        if *s >= kernel.len() {
            return Err(Error::InvalidArgument(format!("point index {s} out of range")));
        }
        if a.len() != kernel.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a kernel of dimension {}",
                a.len(),
                kernel.dim()
            )));
        }
    }
    let m = pairs.len();
    Ok(ComplexMatrix::from_fn(m, m, |i, j| {
        let (si, ai) = &pairs[i];
        let (sj, aj) = &pairs[j];
        ai.dotc(&(kernel.block(*si, *sj) * aj))
    }))
}

/// Parses points as the consecutive integers `0..=M`, returning `M`.
pub(crate) fn consecutive_range<T: Real>(kernel: &OperatorKernel<T>) -> Result<usize> {
    for (k, p) in kernel.points().iter().enumerate() {
        if p.trim().parse::<usize>().ok() != Some(k) {
            return Err(Error::NonConsecutivePoints(p.clone()));
        }
    }
    Ok(kernel.len().saturating_sub(1))
}

/// `K_shift(m, n) = K(m+1, n+1)` for a kernel indexed by `0..=M`; the result
/// lives on `0..=M-1`.
pub fn shift_kernel<T: Real>(kernel: &OperatorKernel<T>) -> Result<OperatorKernel<T>> {
    if kernel.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            got: kernel.len(),
        });
    }
    let top = consecutive_range(kernel)?;
    let shifted: Vec<usize> = (1..=top).collect();
    let mut out = kernel.restrict(&shifted)?;
    out.points = index_points(top);
    Ok(out)
}
