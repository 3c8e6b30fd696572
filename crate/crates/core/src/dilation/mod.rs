//! Moment kernels of random operators and their unitary moment dilations.
//!
//! For a finitely supported random operator `A`, the moment kernel
//! `K(m, n) = E[A*^m A^n]` on `{0, …, M}` is positive definite. When
//! `K − K_shift` is positive definite as well (`K_shift(m, n) = K(m+1, n+1)`),
//! the shift `V_n ↦ V_{n+1}` on the Kolmogorov space is a contraction `B`,
//! and a unitary power dilation of `B` yields `(U, P, W)` with
//! `K(m, n) = W* U*^m P U^n W` for `m, n ≤ M`.

mod operator;
mod shift;
mod triple;
mod von_neumann;

pub use operator::{moment_kernel, MomentKernel, RandomOperator};
pub use shift::{
    build_shift, difference_kernel, shift_domination, stationarity_defect, DominationReport,
    ShiftOperator,
};
pub use triple::{
    build_dilation, reconstruct_moments, verify_dilation, DilationTriple, VerificationReport,
};
pub use von_neumann::{eval_polynomial, von_neumann_check, VnReport};
