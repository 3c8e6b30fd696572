//! Finite Kolmogorov decomposition `K(s, t) = V_s* V_t`.
//!
//! The dilation space is the coordinate space `C^r`, `r` the numerical rank of
//! the Gram matrix, with its canonical basis as orthonormal basis. With
//! `G = Q Λ Q*` and the retained part `Λ_r`, the stacked factor is
//! `F = Λ_r^{1/2} Q_r*` (`r × Nd`) and `V_{s_i}` is its `i`-th block column.

use crate::error::{Error, Result};
use crate::kernel::{assemble_gram, pd_verdict, OperatorKernel};
use crate::linalg::{self, ComplexMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct KolmogorovFactor<T: Real> {
    points: Vec<String>,
    dim: usize,
    rank: usize,
    /// `V_s` as an `r × d` matrix, one per point.
    factors: Vec<ComplexMatrix<T>>,
    rank_tol: T,
}

impl<T: Real> KolmogorovFactor<T> {
    /// Wraps explicit factors `V_s` (all `r × d`).
    pub fn from_factors(
        points: Vec<String>,
        dim: usize,
        factors: Vec<ComplexMatrix<T>>,
        rank_tol: T,
    ) -> Result<Self> {
        if factors.len() != points.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} factors for {} points",
                factors.len(),
                points.len()
            )));
        }
        let rank = factors.first().map_or(0, |v| v.nrows());
        for v in &factors {
            if v.shape() != (rank, dim) {
                return Err(Error::DimensionMismatch(format!(
                    "factor is {}x{}, expected {rank}x{dim}",
                    v.nrows(),
                    v.ncols()
                )));
            }
            linalg::ensure_finite(v, "factor")?;
        }
        Ok(Self {
            points,
            dim,
            rank,
            factors,
            rank_tol,
        })
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rank_tol(&self) -> T {
        self.rank_tol
    }

    pub fn factor(&self, i: usize) -> &ComplexMatrix<T> {
        &self.factors[i]
    }

    pub fn factors(&self) -> &[ComplexMatrix<T>] {
        &self.factors
    }

    /// `[V_{s_0} … V_{s_{N-1}}]`, an `r × Nd` matrix.
    pub fn stacked(&self) -> ComplexMatrix<T> {
        let n = self.points.len();
        let mut out = linalg::zeros(self.rank, n * self.dim);
        for (i, v) in self.factors.iter().enumerate() {
            out.view_mut((0, i * self.dim), (self.rank, self.dim))
                .copy_from(v);
        }
        out
    }

    /// The kernel `V_s* V_t` this factor represents.
    pub fn kernel(&self) -> OperatorKernel<T> {
        let n = self.points.len();
        let blocks = (0..n * n)
            .map(|k| self.factors[k / n].adjoint() * &self.factors[k % n])
            .collect();
        OperatorKernel::from_raw(self.points.clone(), self.dim, blocks)
    }

    /// `{Q V_s}` for an `r × r` matrix `Q`; unitary `Q` leaves the kernel unchanged.
    pub fn left_multiply(&self, q: &ComplexMatrix<T>) -> Result<Self> {
        if q.shape() != (self.rank, self.rank) {
            return Err(Error::DimensionMismatch(format!(
                "gauge must be {0}x{0}",
                self.rank
            )));
        }
        Ok(Self {
            factors: self.factors.iter().map(|v| q * v).collect(),
            ..self.clone()
        })
    }
}

/// Factorizes a positive definite kernel through its Gram eigendecomposition.
///
/// Eigenvalues at or below `rank_tol · λ_max` are dropped; an eigenvalue below
/// `−rank_tol · max(1, λ_max)` is treated as genuine indefiniteness.
pub fn factorize<T: Real>(kernel: &OperatorKernel<T>, rank_tol: T) -> Result<KolmogorovFactor<T>> {
    let (n, d) = (kernel.len(), kernel.dim());
    let gram = assemble_gram(kernel);
    let eig = linalg::hermitian_eigen(&gram.matrix)?;
    let (min, max) = (eig.min(), eig.max());
    if !pd_verdict(min, max, rank_tol) {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min.as_f64(),
        });
    }
    let rank = if max > T::zero() {
        eig.values.iter().take_while(|&&v| v > rank_tol * max).count()
    } else {
        0
    };
    let mut stacked = linalg::zeros::<T>(rank, n * d);
    for k in 0..rank {
        let root = eig.values[k].sqrt();
        for col in 0..n * d {
            stacked[(k, col)] = eig.vectors[(col, k)].conj().scale(root);
        }
    }
    let factors = (0..n)
        .map(|i| stacked.view((0, i * d), (rank, d)).into_owned())
        .collect();
    Ok(KolmogorovFactor {
        points: kernel.points().to_vec(),
        dim: d,
        rank,
        factors,
        rank_tol,
    })
}

/// `max_{s,t} ‖V_s* V_t − K(s,t)‖_max`.
pub fn reconstruction_error<T: Real>(
    factor: &KolmogorovFactor<T>,
    kernel: &OperatorKernel<T>,
) -> Result<T> {
    if factor.points() != kernel.points() || factor.dim() != kernel.dim() {
        return Err(Error::DimensionMismatch(
            "factor and kernel live on different points or dimensions".into(),
        ));
    }
    factor.kernel().max_abs_diff(kernel)
}

/// `tr K(s, s)` for every point, in point order.
pub fn trace_diagonal<T: Real>(kernel: &OperatorKernel<T>) -> Result<Vec<T>> {
    (0..kernel.len())
        .map(|i| {
            let b = kernel.block(i, i);
            let tol = T::default_tol() * linalg::max_abs(b).max(T::one());
            let tr = b.trace();
            if linalg::max_abs_diff(b, &b.adjoint()) > tol || tr.im.abs() > T::default_tol() {
                return Err(Error::NonHermitianDiagonal { point: i });
            }
            Ok(tr.re)
        })
        .collect()
}
