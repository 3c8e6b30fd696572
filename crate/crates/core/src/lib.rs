//! Random operator-valued positive definite kernels and moment dilations of
//! random operators, at finite dimension.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below fix the double-precision instantiation used by the CLI.

pub mod dilation;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod kernel;
pub mod kolmogorov;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector};
pub use rng::SeededRng;
pub use scalar::Real;

pub type OperatorKernel64 = kernel::OperatorKernel<f64>;
pub type OperatorKernel32 = kernel::OperatorKernel<f32>;
pub type RandomKernel64 = kernel::RandomKernel<f64>;
pub type DiscreteRandomKernel64 = kernel::DiscreteRandomKernel<f64>;
pub type KolmogorovFactor64 = kolmogorov::KolmogorovFactor<f64>;
pub type KolmogorovFactor32 = kolmogorov::KolmogorovFactor<f32>;
pub type GaussianRealization64 = gaussian::GaussianRealization<f64>;
pub type RandomOperator64 = dilation::RandomOperator<f64>;
pub type RandomOperator32 = dilation::RandomOperator<f32>;
pub type MomentKernel64 = dilation::MomentKernel<f64>;
pub type DilationTriple64 = dilation::DilationTriple<f64>;
pub type ComplexMatrix64 = ComplexMatrix<f64>;
