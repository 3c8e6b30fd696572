//! Dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense complex matrix; all operators in `L(H)` and on dilation spaces use it.
pub type ComplexMatrix<T> = DMatrix<Complex<T>>;
/// Dense complex column vector.
pub type ComplexVector<T> = DVector<Complex<T>>;

/// Eigenpairs of a Hermitian matrix, sorted by decreasing eigenvalue.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn min(&self) -> T {
        self.values.last().copied().unwrap_or_else(T::zero)
    }

    pub fn max(&self) -> T {
        self.values.first().copied().unwrap_or_else(T::zero)
    }
}

pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub fn cr<T: Real>(re: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::zero())
}

pub fn identity<T: Real>(n: usize) -> ComplexMatrix<T> {
    DMatrix::identity(n, n)
}

pub fn zeros<T: Real>(rows: usize, cols: usize) -> ComplexMatrix<T> {
    DMatrix::zeros(rows, cols)
}

/// Builds a real-valued complex matrix from row-major data.
pub fn from_real_rows<T: Real>(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix<T> {
    assert_eq!(data.len(), rows * cols);
    DMatrix::from_fn(rows, cols, |i, j| cr(data[i * cols + j]))
}

/// Largest entry modulus, `‖M‖_max`.
pub fn max_abs<T: Real>(m: &ComplexMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(z.modulus()))
}

pub fn max_abs_diff<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .fold(T::zero(), |acc, (x, y)| acc.max((x - y).modulus()))
}

pub fn is_finite<T: Real>(m: &ComplexMatrix<T>) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_finite<T: Real>(m: &ComplexMatrix<T>, what: &str) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// `(M + M*) / 2`.
pub fn hermitize<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let half = T::lit(0.5);
    (m + m.adjoint()).map(|z| z.scale(half))
}

/// Eigendecomposition of the Hermitian part of `m`.
pub fn hermitian_eigen<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "eigensolver needs a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::try_new(hermitize(m), T::default_epsilon(), 1000 * n.max(8))
        .ok_or(Error::NumericalFailure(n))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

/// Smallest and largest eigenvalues of the Hermitian part.
pub fn eig_extremes<T: Real>(m: &ComplexMatrix<T>) -> Result<(T, T)> {
    let e = hermitian_eigen(m)?;
    Ok((e.min(), e.max()))
}

/// Square root of a positive semidefinite matrix; eigenvalues below zero are clipped to zero.
pub fn psd_sqrt<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let e = hermitian_eigen(m)?;
    let n = m.nrows();
    let mut out = zeros::<T>(n, n);
    for (k, &lambda) in e.values.iter().enumerate() {
        if lambda <= T::zero() {
            continue;
        }
        let v = e.vectors.column(k);
        out += (v * v.adjoint()).map(|z| z.scale(lambda.sqrt()));
    }
    Ok(out)
}

/// Spectral norm `‖M‖_op`.
pub fn op_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    if m.is_empty() {
        return Ok(T::zero());
    }
    let gram = m.adjoint() * m;
    Ok(hermitian_eigen(&gram)?.max().max(T::zero()).sqrt())
}

/// Orthonormal basis (as columns) of the range of `m`, dropping directions whose
/// squared singular value is below `rel_tol · σ_max²`.
pub fn orthonormal_range<T: Real>(m: &ComplexMatrix<T>, rel_tol: T) -> Result<ComplexMatrix<T>> {
    let rows = m.nrows();
    let outer = m * m.adjoint();
    let e = hermitian_eigen(&outer)?;
    let top = e.max();
    if top <= T::zero() {
        return Ok(zeros(rows, 0));
    }
    let keep = e.values.iter().take_while(|&&v| v > rel_tol * top).count();
    Ok(e.vectors.columns(0, keep).into_owned())
}

pub fn mat_pow<T: Real>(m: &ComplexMatrix<T>, n: usize) -> ComplexMatrix<T> {
    let mut out = identity::<T>(m.nrows());
    for _ in 0..n {
        out = &out * m;
    }
    out
}

/// `[M⁰, M¹, …, M^n]`.
pub fn powers<T: Real>(m: &ComplexMatrix<T>, n: usize) -> Vec<ComplexMatrix<T>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(identity::<T>(m.nrows()));
    for k in 1..=n {
        let next = &out[k - 1] * m;
        out.push(next);
    }
    out
}
