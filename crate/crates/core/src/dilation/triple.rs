//! Truncated unitary power dilation of the shift and the resulting moment
//! dilation triple `(U, P, W)`.
//!
//! With `N` the truncation depth, `𝒦 = (C^r)^{N+1}` and `U` is the block matrix
//!
//! ```text
//! [ B    0  …  0   D_{B*} ]
//! [ D_B  0  …  0   −B*    ]
//! [ 0    I  …  0   0      ]
//! [ …       ⋱          …  ]
//! [ 0    0  …  I   0      ]
//! ```
//!
//! with defects `D_B = (I − B*B)^{1/2}`, `D_{B*} = (I − BB*)^{1/2}`. It is
//! unitary and `J* U^n J = B^n` for `0 ≤ n ≤ N`, where `J` embeds `C^r` as the
//! first block. Then `W = J V_0` and `P = J J*`.

use super::{build_shift, MomentKernel};
use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct DilationTriple<T: Real> {
    /// `dim 𝒦 = r (N + 1)`.
    pub space_dim: usize,
    /// Rank `r` of the Kolmogorov space; `J` is the embedding onto the first `r` coordinates.
    pub rank: usize,
    /// Truncation depth `N`; the moment identity is guaranteed for `m, n ≤ N`.
    pub trunc_depth: usize,
    pub u: ComplexMatrix<T>,
    pub p: ComplexMatrix<T>,
    pub w: ComplexMatrix<T>,
    /// The contraction being dilated (`r × r`).
    pub b: ComplexMatrix<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T: Real> {
    /// `max_{m,n ≤ N} ‖K(m,n) − W* U*^m P U^n W‖_max`.
    pub max_residual: T,
    /// `‖U*U − I‖_max`.
    pub unitarity: T,
    /// `max(‖P² − P‖_max, ‖P − P*‖_max)`.
    pub projection: T,
    /// `‖W*W − I‖_max`.
    pub isometry: T,
    /// `λ_min(Q*(P − U*PU)Q)` over an orthonormal basis `Q` of the reachable span.
    pub c3_min_eigenvalue: T,
    pub c3_holds: bool,
    /// Largest power `k` spanning the reachable subspace `span{U^k W H}`.
    pub c3_span_depth: usize,
}

impl<T: Real> VerificationReport<T> {
    /// Every structural and moment check within the default identity tolerances.
    pub fn passes(&self) -> bool {
        let tight = T::identity_tol() * T::lit(1e-2);
        self.max_residual <= T::identity_tol()
            && self.unitarity <= tight
            && self.projection <= tight
            && self.isometry <= tight
            && self.c3_holds
    }
}

fn defect<T: Real>(gram: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let r = gram.nrows();
    linalg::psd_sqrt(&(linalg::identity::<T>(r) - gram))
}

/// The `(N+1)`-block unitary dilating the first `N` powers of a contraction.
pub fn power_dilation<T: Real>(b: &ComplexMatrix<T>, depth: usize) -> Result<ComplexMatrix<T>> {
    let r = b.nrows();
    if b.ncols() != r {
        return Err(Error::DimensionMismatch("contraction must be square".into()));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("truncation depth must be >= 1".into()));
    }
    let d_b = defect(&(b.adjoint() * b))?;
    let d_bs = defect(&(b * b.adjoint()))?;
    let size = r * (depth + 1);
    let mut u = linalg::zeros::<T>(size, size);
    let mut put = |bi: usize, bj: usize, m: &ComplexMatrix<T>| {
        u.view_mut((bi * r, bj * r), (r, r)).copy_from(m);
    };
    put(0, 0, b);
    put(0, depth, &d_bs);
    put(1, 0, &d_b);
    put(1, depth, &(-b.adjoint()));
    let eye = linalg::identity::<T>(r);
    for k in 1..depth {
        put(k + 1, k, &eye);
    }
    Ok(u)
}

/// Moment dilation of a shift-dominated moment kernel, with depth `N = M`.
pub fn build_dilation<T: Real>(k: &MomentKernel<T>, rank_tol: T) -> Result<DilationTriple<T>> {
    let shift = build_shift(k, rank_tol)?;
    let depth = k.max_power();
    let r = shift.rank();
    // ‖B‖ may exceed 1 by round-off; keep the dilation exactly unitary.
    let b = if shift.norm > T::one() {
        shift.b.map(|z| z.unscale(shift.norm))
    } else {
        shift.b.clone()
    };
    let u = power_dilation(&b, depth)?;
    let size = u.nrows();
    let mut w = linalg::zeros::<T>(size, k.dim());
    w.view_mut((0, 0), (r, k.dim())).copy_from(shift.factor.factor(0));
    let mut p = linalg::zeros::<T>(size, size);
    for i in 0..r {
        p[(i, i)] = linalg::c(T::one(), T::zero());
    }

    let mut un = linalg::identity::<T>(size);
    let mut bn = linalg::identity::<T>(r);
    for _ in 0..=depth {
        let compressed = un.view((0, 0), (r, r)).into_owned();
        let err = linalg::max_abs_diff(&compressed, &bn);
        if err > T::identity_tol() {
            return Err(Error::IllConditioned {
                residual: err.as_f64(),
            });
        }
        un = &u * un;
        bn = &b * bn;
    }
    Ok(DilationTriple {
        space_dim: size,
        rank: r,
        trunc_depth: depth,
        u,
        p,
        w,
        b,
    })
}

/// `K′(m, n) = W* U*^m P U^n W` for `m, n ≤ max_power`.
pub fn reconstruct_moments<T: Real>(t: &DilationTriple<T>, max_power: usize) -> Result<MomentKernel<T>> {
    let orbit = orbit(t, max_power);
    let size = max_power + 1;
    let blocks = (0..size * size)
        .map(|idx| orbit[idx / size].adjoint() * &t.p * &orbit[idx % size])
        .collect();
    MomentKernel::from_blocks(max_power, t.w.ncols(), blocks)
}

/// `[W, UW, …, U^n W]`.
fn orbit<T: Real>(t: &DilationTriple<T>, n: usize) -> Vec<ComplexMatrix<T>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(t.w.clone());
    for k in 1..=n {
        let next = &t.u * &out[k - 1];
        out.push(next);
    }
    out
}

/// Checks the moment identity up to the truncation depth, the structure of
/// `(U, P, W)`, and `U*PU ≤ P` on `span{U^k W H : k < N}`.
///
/// The compression identity `J* U^k J = B^k` holds for `k ≤ N` only, so the
/// order condition is tested on the span whose image under `U` stays within
/// that range.
pub fn verify_dilation<T: Real>(k: &MomentKernel<T>, t: &DilationTriple<T>) -> Result<VerificationReport<T>> {
    let size = t.u.nrows();
    if t.u.ncols() != size || t.p.shape() != (size, size) || t.w.nrows() != size {
        return Err(Error::DimensionMismatch("U, P and W do not act on one space".into()));
    }
    if t.w.ncols() != k.dim() {
        return Err(Error::DimensionMismatch(format!(
            "W maps from dimension {}, kernel has dimension {}",
            t.w.ncols(),
            k.dim()
        )));
    }
    let depth = t.trunc_depth.min(k.max_power());
    let model = reconstruct_moments(t, depth)?;
    let mut max_residual = T::zero();
    for m in 0..=depth {
        for n in 0..=depth {
            max_residual = max_residual.max(linalg::max_abs_diff(k.block(m, n), model.block(m, n)));
        }
    }
    let eye = linalg::identity::<T>(size);
    let unitarity = linalg::max_abs_diff(&(t.u.adjoint() * &t.u), &eye);
    let projection = linalg::max_abs_diff(&(&t.p * &t.p), &t.p).max(linalg::max_abs_diff(&t.p, &t.p.adjoint()));
    let isometry = linalg::max_abs_diff(&(t.w.adjoint() * &t.w), &linalg::identity(k.dim()));

    let span_depth = depth.saturating_sub(1);
    let reach = orbit(t, span_depth);
    let mut stacked = linalg::zeros::<T>(size, reach.len() * k.dim());
    for (i, m) in reach.iter().enumerate() {
        stacked.view_mut((0, i * k.dim()), (size, k.dim())).copy_from(m);
    }
    let q = linalg::orthonormal_range(&stacked, T::default_tol())?;
    let gap = &t.p - t.u.adjoint() * &t.p * &t.u;
    let compressed = q.adjoint() * gap * &q;
    let (c3_min, _) = linalg::eig_extremes(&compressed)?;
    Ok(VerificationReport {
        max_residual,
        unitarity,
        projection,
        isometry,
        c3_min_eigenvalue: c3_min,
        c3_holds: c3_min >= -T::identity_tol(),
        c3_span_depth: span_depth,
    })
}
