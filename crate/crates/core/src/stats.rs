//! Order-deterministic accumulation used by the Monte Carlo estimators.

use num_complex::Complex;

use crate::linalg::{zeros, ComplexMatrix};
use crate::scalar::Real;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<T: Real> {
    sum: T,
    carry: T,
}

impl<T: Real> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self {
            sum: T::zero(),
            carry: T::zero(),
        }
    }
}

impl<T: Real> CompensatedSum<T> {
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

pub fn compensated_total<T: Real>(xs: impl IntoIterator<Item = T>) -> T {
    let mut s = CompensatedSum::default();
    xs.into_iter().for_each(|x| s.add(x));
    s.value()
}

/// Running mean and variance of one real quantity.
#[derive(Debug, Clone, Copy)]
struct RealMoments<T: Real> {
    sum: CompensatedSum<T>,
    mean: T,
    m2: T,
}

impl<T: Real> Default for RealMoments<T> {
    fn default() -> Self {
        Self {
            sum: CompensatedSum::default(),
            mean: T::zero(),
            m2: T::zero(),
        }
    }
}

impl<T: Real> RealMoments<T> {
    fn push(&mut self, x: T, count: T) {
        self.sum.add(x);
        let delta = x - self.mean;
        self.mean += delta / count;
        self.m2 += delta * (x - self.mean);
    }
}

/// Entrywise mean and standard error of a stream of equally-shaped complex
/// matrices. Means use compensated sums; variances use Welford updates.
#[derive(Debug, Clone)]
pub struct MatrixMoments<T: Real> {
    rows: usize,
    cols: usize,
    count: usize,
    re: Vec<RealMoments<T>>,
    im: Vec<RealMoments<T>>,
}

impl<T: Real> MatrixMoments<T> {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            count: 0,
            re: vec![RealMoments::default(); rows * cols],
            im: vec![RealMoments::default(); rows * cols],
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, m: &ComplexMatrix<T>) {
        assert_eq!(m.shape(), (self.rows, self.cols));
        self.count += 1;
        let n = T::lit(self.count as f64);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let k = i * self.cols + j;
                self.re[k].push(m[(i, j)].re, n);
                self.im[k].push(m[(i, j)].im, n);
            }
        }
    }

    pub fn mean(&self) -> ComplexMatrix<T> {
        let mut out = zeros(self.rows, self.cols);
        if self.count == 0 {
            return out;
        }
        let n = T::lit(self.count as f64);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let k = i * self.cols + j;
                out[(i, j)] = Complex::new(self.re[k].sum.value() / n, self.im[k].sum.value() / n);
            }
        }
        out
    }

    /// Standard error of the mean, real and imaginary parts separately
    /// (sample variance with `n - 1` denominator).
    pub fn std_error(&self) -> ComplexMatrix<T> {
        let mut out = zeros(self.rows, self.cols);
        if self.count < 2 {
            return out;
        }
        let n = T::lit(self.count as f64);
        let se = |m: &RealMoments<T>| (m.m2.max(T::zero()) / (n - T::one()) / n).sqrt();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let k = i * self.cols + j;
                out[(i, j)] = Complex::new(se(&self.re[k]), se(&self.im[k]));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_rows;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_total(xs), 2.0);
        let w = vec![1.0 / 20000.0; 20000];
        assert!((compensated_total(w) - 1.0f64).abs() < 1e-15);
    }

    #[test]
    fn moments_of_two_values() {
        let mut acc = MatrixMoments::<f64>::new(1, 1);
        acc.push(&from_real_rows(1, 1, &[1.0]));
        acc.push(&from_real_rows(1, 1, &[3.0]));
        assert_eq!(acc.mean()[(0, 0)].re, 2.0);
        // sample variance 2, se = sqrt(2/2) = 1
        assert!((acc.std_error()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert_eq!(acc.std_error()[(0, 0)].im, 0.0);
    }
}
