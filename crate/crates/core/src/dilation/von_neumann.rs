use std::f64::consts::PI;

use nalgebra::ComplexField;
use num_complex::Complex;

use super::{moment_kernel, shift_domination, RandomOperator};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct VnReport<T: Real> {
    /// `E[f(A)* f(A)]`.
    pub lhs_matrix: ComplexMatrix<T>,
    pub lhs_max_eigenvalue: T,
    /// Maximum of `|f|` over the circle grid.
    pub sup_f: T,
    /// `sup_f · (1 + π k / grid_size)`, an upper bound for `sup_{|z|=1} |f|`.
    pub sup_f_margin: T,
    /// `sup_f_margin² − λ_max(lhs)`.
    pub slack: T,
    pub holds: bool,
    pub degree: usize,
}

/// `f(A) = Σ c_n A^n` by Horner's rule.
pub fn eval_polynomial<T: Real>(coeffs: &[Complex<T>], a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = a.nrows();
    let mut acc = linalg::zeros::<T>(n, n);
    for c in coeffs.iter().rev() {
        acc = &acc * a + linalg::identity::<T>(n) * *c;
    }
    acc
}

fn eval_scalar<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    coeffs.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, c| acc * z + c)
}

/// Mean-square von Neumann bound `E[f(A)* f(A)] ≤ (sup_{|z|=1} |f|)² I`.
///
/// `A` must admit a moment dilation, checked as shift domination of its
/// moment kernel up to order `max(deg f, 1)` at tolerance `tol`.
pub fn von_neumann_check<T: Real>(
    a: &RandomOperator<T>,
    coeffs: &[Complex<T>],
    grid_size: usize,
    tol: T,
) -> Result<VnReport<T>> {
    if coeffs.is_empty() {
        return Err(Error::EmptyPolynomial);
    }
    if grid_size < 64 {
        return Err(Error::InvalidArgument(format!(
            "grid size {grid_size} is below 64"
        )));
    }
    let degree = coeffs
        .iter()
        .rposition(|c| c.modulus() > T::zero())
        .unwrap_or(0);
    let dom = shift_domination(&moment_kernel(a, degree.max(1))?, tol)?;
    if !dom.holds {
        return Err(Error::ShiftDominationViolated {
            min_eigenvalue: dom.min_eigenvalue.as_f64(),
        });
    }

    let lhs = linalg::hermitize(&a.expectation(|m| {
        let f = eval_polynomial(coeffs, m);
        f.adjoint() * f
    }));
    let (_, lhs_max) = linalg::eig_extremes(&lhs)?;
    let sup_f = (0..grid_size)
        .map(|j| {
            let theta = T::lit(2.0 * PI * j as f64 / grid_size as f64);
            eval_scalar(coeffs, Complex::new(theta.cos(), theta.sin())).modulus()
        })
        .fold(T::zero(), |a, b| a.max(b));
    let margin = sup_f * (T::one() + T::lit(PI * degree as f64 / grid_size as f64));
    let bound = margin * margin;
    Ok(VnReport {
        lhs_matrix: lhs,
        lhs_max_eigenvalue: lhs_max,
        sup_f,
        sup_f_margin: margin,
        slack: bound - lhs_max,
        holds: lhs_max <= bound + T::identity_tol(),
        degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, from_real_rows};

    fn scalar(x: f64) -> ComplexMatrix<f64> {
        from_real_rows(1, 1, &[x])
    }

    fn poly(cs: &[f64]) -> Vec<Complex<f64>> {
        cs.iter().map(|&x| c(x, 0.0)).collect()
    }

    #[test]
    fn identity_polynomial_on_contractions() {
        let a = RandomOperator::uniform(vec![
            from_real_rows(2, 2, &[0.0, 1.0, 0.0, 0.0]),
            from_real_rows(2, 2, &[0.6, 0.0, 0.0, -0.8]),
        ])
        .unwrap();
        let r = von_neumann_check(&a, &poly(&[0.0, 1.0]), 4096, 1e-10).unwrap();
        assert!(r.holds && r.lhs_max_eigenvalue <= 1.0);
        assert_eq!(r.degree, 1);
    }

    #[test]
    fn square_of_half_sign() {
        let a = RandomOperator::uniform(vec![scalar(0.5), scalar(-0.5)]).unwrap();
        let r = von_neumann_check(&a, &poly(&[0.0, 0.0, 1.0]), 4096, 1e-10).unwrap();
        assert!((r.lhs_matrix[(0, 0)].re - 1.0 / 16.0).abs() < 1e-15);
        assert!((r.sup_f - 1.0).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn one_plus_z_on_unit_sign() {
        let a = RandomOperator::uniform(vec![scalar(1.0), scalar(-1.0)]).unwrap();
        let r = von_neumann_check(&a, &poly(&[1.0, 1.0]), 4096, 1e-10).unwrap();
        assert!((r.lhs_matrix[(0, 0)].re - 2.0).abs() < 1e-15);
        assert!((r.sup_f - 2.0).abs() < 1e-12);
        assert!(r.holds && r.slack >= 2.0 - 1e-12);
    }

    #[test]
    fn errors() {
        let a = RandomOperator::deterministic(scalar(0.5)).unwrap();
        assert!(matches!(
            von_neumann_check(&a, &[], 4096, 1e-10),
            Err(Error::EmptyPolynomial)
        ));
        assert!(von_neumann_check(&a, &poly(&[1.0]), 16, 1e-10).is_err());
        let big = RandomOperator::deterministic(scalar(2.0)).unwrap();
        assert!(matches!(
            von_neumann_check(&big, &poly(&[0.0, 1.0]), 4096, 1e-10),
            Err(Error::ShiftDominationViolated { .. })
        ));
    }

    #[test]
    fn horner_matches_direct_sum() {
        let a = from_real_rows::<f64>(2, 2, &[0.1, 0.3, -0.2, 0.4]);
        let cs = vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.0, 1.0)];
        let direct = linalg::identity::<f64>(2) * cs[0] + &a * cs[1] + &a * &a * cs[2];
        assert!(linalg::max_abs_diff(&eval_polynomial(&cs, &a), &direct) < 1e-14);
    }
}
