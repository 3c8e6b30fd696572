use super::MomentKernel;
use crate::error::{Error, Result};
use crate::kernel::{check_pd, shift_kernel, OperatorKernel};
use crate::kolmogorov::{factorize, KolmogorovFactor};
use crate::linalg::{self, ComplexMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationReport<T: Real> {
    pub holds: bool,
    pub min_eigenvalue: T,
    pub max_eigenvalue: T,
}

/// `D(m, n) = K(m, n) − K(m+1, n+1)` on `{0, …, M−1}`.
pub fn difference_kernel<T: Real>(k: &MomentKernel<T>) -> Result<OperatorKernel<T>> {
    let full = k.to_operator_kernel();
    let shifted = shift_kernel(&full)?;
    let head = full.restrict(&(0..k.max_power()).collect::<Vec<_>>())?;
    head.linear_combination(T::one(), &shifted, -T::one())
}

/// Tests `K_shift ≤ K`.
pub fn shift_domination<T: Real>(k: &MomentKernel<T>, tol: T) -> Result<DominationReport<T>> {
    let r = check_pd(&difference_kernel(k)?, tol)?;
    Ok(DominationReport {
        holds: r.is_pd,
        min_eigenvalue: r.min_eigenvalue,
        max_eigenvalue: r.max_eigenvalue,
    })
}

/// `max ‖K_shift(m,n) − K(m,n)‖` over `m, n ≤ M−1`; zero for stationary kernels.
pub fn stationarity_defect<T: Real>(k: &MomentKernel<T>) -> Result<T> {
    let d = difference_kernel(k)?;
    Ok(d.max_abs())
}

/// The shift `B V_n = V_{n+1}` on the Kolmogorov space of a moment kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftOperator<T: Real> {
    /// Factorization of `K` over points `0..=M`.
    pub factor: KolmogorovFactor<T>,
    /// `r × r`, zero on the orthogonal complement of `range(X)`.
    pub b: ComplexMatrix<T>,
    /// Orthonormal basis of `range(X)`, `X = [V_0 … V_{M−1}]`.
    pub range_basis: ComplexMatrix<T>,
    /// `max_n ‖B V_n − V_{n+1}‖_max`.
    pub residual: T,
    pub norm: T,
}

impl<T: Real> ShiftOperator<T> {
    pub fn rank(&self) -> usize {
        self.factor.rank()
    }

    /// `max |‖B q‖ − 1|` over the orthonormal basis of `range(X)`.
    pub fn isometry_defect(&self) -> T {
        let bq = &self.b * &self.range_basis;
        bq.column_iter()
            .map(|c| (c.norm() - T::one()).abs())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// `max ‖(B*B − I) q‖` over the range basis: zero exactly when `B` is
    /// isometric on `range(X)`.
    pub fn isometry_residual(&self) -> T {
        let q = &self.range_basis;
        let defect = self.b.adjoint() * &self.b * q - q;
        linalg::max_abs(&defect)
    }
}

fn hstack<T: Real>(blocks: &[ComplexMatrix<T>], rows: usize) -> ComplexMatrix<T> {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = linalg::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        out.view_mut((0, at), (rows, b.ncols())).copy_from(b);
        at += b.ncols();
    }
    out
}

/// Builds `B = Y X⁺` with `X = [V_0 … V_{M−1}]`, `Y = [V_1 … V_M]`.
///
/// The pseudoinverse drops directions of `X X*` with eigenvalue at or below
/// `rank_tol · λ_max`, the same relative cutoff the factorization uses.
pub fn build_shift<T: Real>(k: &MomentKernel<T>, rank_tol: T) -> Result<ShiftOperator<T>> {
    let dom = shift_domination(k, rank_tol)?;
    if !dom.holds {
        return Err(Error::ShiftDominationViolated {
            min_eigenvalue: dom.min_eigenvalue.as_f64(),
        });
    }
    let kernel = k.to_operator_kernel();
    let factor = factorize(&kernel, rank_tol)?;
    let r = factor.rank();
    let m = k.max_power();
    let x = hstack(&factor.factors()[..m], r);
    let y = hstack(&factor.factors()[1..], r);

    let outer = &x * x.adjoint();
    let eig = linalg::hermitian_eigen(&outer)?;
    let top = eig.max();
    let keep = if top > T::zero() {
        eig.values.iter().take_while(|&&v| v > rank_tol * top).count()
    } else {
        0
    };
    let basis = eig.vectors.columns(0, keep).into_owned();
    let mut inv = linalg::zeros::<T>(r, r);
    for j in 0..keep {
        let u = eig.vectors.column(j);
        inv += (u * u.adjoint()).map(|z| z.unscale(eig.values[j]));
    }
    let b = &y * x.adjoint() * inv;

    let scale = kernel.max_abs().max(T::one());
    let residual = (0..m)
        .map(|n| linalg::max_abs_diff(&(&b * factor.factor(n)), factor.factor(n + 1)))
        .fold(T::zero(), |a, c| a.max(c));
    if residual > T::identity_tol() * scale {
        return Err(Error::IllConditioned {
            residual: residual.as_f64(),
        });
    }
    let norm = linalg::op_norm(&b)?;
    if norm > T::one() + T::identity_tol() {
        return Err(Error::IllConditioned {
            residual: (norm - T::one()).as_f64(),
        });
    }
    Ok(ShiftOperator {
        factor,
        b,
        range_basis: basis,
        residual,
        norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dilation::{moment_kernel, RandomOperator};
    use crate::linalg::from_real_rows;

    fn scalar(x: f64) -> ComplexMatrix<f64> {
        from_real_rows(1, 1, &[x])
    }

    fn half_sign(m: usize) -> MomentKernel<f64> {
        moment_kernel(&RandomOperator::uniform(vec![scalar(0.5), scalar(-0.5)]).unwrap(), m).unwrap()
    }

    fn unit_sign(m: usize) -> MomentKernel<f64> {
        moment_kernel(&RandomOperator::uniform(vec![scalar(1.0), scalar(-1.0)]).unwrap(), m).unwrap()
    }

    #[test]
    fn domination_examples() {
        let d = difference_kernel(&half_sign(2)).unwrap();
        assert_eq!(d, OperatorKernel::scalar(2, &[0.75, 0.0, 0.0, 3.0 / 16.0]).unwrap());
        assert!(shift_domination(&half_sign(2), 1e-10).unwrap().holds);

        let two = moment_kernel(&RandomOperator::deterministic(scalar(2.0)).unwrap(), 1).unwrap();
        let r = shift_domination(&two, 1e-10).unwrap();
        assert!(!r.holds);
        assert_eq!(r.min_eigenvalue, -3.0);

        let r = shift_domination(&unit_sign(2), 1e-10).unwrap();
        assert!(r.holds);
        assert_eq!(r.min_eigenvalue, 0.0);
        assert_eq!(stationarity_defect(&unit_sign(3)).unwrap(), 0.0);
    }

    #[test]
    fn stationary_shift_is_isometric() {
        let s = build_shift(&unit_sign(3), 1e-10).unwrap();
        assert!(s.isometry_defect() < 1e-8);
        assert!(s.isometry_residual() < 1e-8);
    }

    #[test]
    fn half_sign_shift_has_norm_half() {
        let s = build_shift(&half_sign(4), 1e-10).unwrap();
        assert!((s.norm - 0.5).abs() < 1e-8, "norm {}", s.norm);
        assert!(s.isometry_defect() > 0.4);
    }

    #[test]
    fn nilpotent_shift_kills_v1() {
        let a = from_real_rows::<f64>(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let k = moment_kernel(&RandomOperator::deterministic(a).unwrap(), 2).unwrap();
        let s = build_shift(&k, 1e-10).unwrap();
        assert!(linalg::max_abs(&(&s.b * s.factor.factor(1))) < 1e-8);
        assert!(s.norm <= 1.0 + 1e-8);
    }

    #[test]
    fn rejects_expanding_operator() {
        let two = moment_kernel(&RandomOperator::deterministic(scalar(2.0)).unwrap(), 2).unwrap();
        assert!(matches!(
            build_shift(&two, 1e-10),
            Err(Error::ShiftDominationViolated { .. })
        ));
    }

    #[test]
    fn zero_extension_off_range() {
        let s = build_shift(&half_sign(2), 1e-10).unwrap();
        let q = &s.range_basis;
        let proj = q * q.adjoint();
        let off = &s.b - &s.b * proj;
        assert!(linalg::max_abs(&off) < 1e-12);
    }
}
