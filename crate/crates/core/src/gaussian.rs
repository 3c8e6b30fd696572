//! H-valued Gaussian processes with prescribed covariance, their rank-one
//! random kernels, finite-rank truncations and empirical kernel averages.
//!
//! Draw `ω` uses `z(ω) ∈ R^r` with i.i.d. real standard normal coordinates
//! (also when `H` is complex) and sets `W_s(ω) = V_s* z(ω)` for every point,
//! so the family is jointly Gaussian across points.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::random::KernelAverage;
use crate::kernel::{DiscreteRandomKernel, OperatorKernel, RandomKernel};
use crate::kolmogorov::{factorize, KolmogorovFactor};
use crate::linalg::{self, ComplexMatrix, ComplexVector};
use crate::rng::SeededRng;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianRealization<T: Real> {
    pub factor: KolmogorovFactor<T>,
    /// Coordinates kept by a truncated realization; `None` means all `r`.
    pub coordinates: Option<Vec<usize>>,
    pub rng: SeededRng,
    /// `samples[ω][i] = W_{s_i}(ω)`.
    pub samples: Vec<Vec<ComplexVector<T>>>,
}

impl<T: Real> GaussianRealization<T> {
    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    pub fn points(&self) -> &[String] {
        self.factor.points()
    }

    pub fn dim(&self) -> usize {
        self.factor.dim()
    }
}

/// One row of a Monte Carlo convergence curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint<T: Real> {
    pub m: usize,
    pub max_abs_error: T,
    pub stderr_estimate: T,
}

/// Checkpoints `1, 2, 4, …` up to and including `m`.
pub fn checkpoints(m: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(1usize), |&k| k.checked_mul(2))
        .take_while(|&k| k <= m)
        .collect();
    if out.last() != Some(&m) && m > 0 {
        out.push(m);
    }
    out
}

fn draw<T: Real>(factor: &KolmogorovFactor<T>, mask: Option<&[bool]>, rng: SeededRng) -> Vec<ComplexVector<T>> {
    let mut g = rng.generator();
    let z = ComplexVector::<T>::from_fn(factor.rank(), |i, _| {
        let x = T::standard_normal(&mut g);
        let keep = mask.is_none_or(|m| m[i]);
        linalg::c(if keep { x } else { T::zero() }, T::zero())
    });
    factor.factors().iter().map(|v| v.adjoint() * &z).collect()
}

fn realize<T: Real>(
    factor: &KolmogorovFactor<T>,
    coordinates: Option<Vec<usize>>,
    m: usize,
    rng: SeededRng,
) -> Result<GaussianRealization<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    let mask = coordinates.as_ref().map(|f| {
        let mut mask = vec![false; factor.rank()];
        f.iter().for_each(|&i| mask[i] = true);
        mask
    });
    let samples = (0..m)
        .into_par_iter()
        .map(|w| draw(factor, mask.as_deref(), rng.substream(w as u64)))
        .collect();
    Ok(GaussianRealization {
        factor: factor.clone(),
        coordinates,
        rng,
        samples,
    })
}

/// `m` independent draws of the Gaussian process with covariance `V_s* V_t`.
pub fn sample_paths<T: Real>(
    factor: &KolmogorovFactor<T>,
    m: usize,
    rng: SeededRng,
) -> Result<GaussianRealization<T>> {
    realize(factor, None, m, rng)
}

fn coordinate_set(rank: usize, coords: &[usize]) -> Result<Vec<usize>> {
    let set: BTreeSet<usize> = coords.iter().copied().collect();
    if let Some(&index) = set.iter().find(|&&i| i >= rank) {
        return Err(Error::IndexOutOfRange { index, rank });
    }
    Ok(set.into_iter().collect())
}

/// Draws of `W_s^(F) = (P_F V_s)* z` using only the coordinates in `coords`
/// (0-based). The same seed gives the same `z` as [`sample_paths`], so the
/// full coordinate set reproduces it exactly.
pub fn truncated_realization<T: Real>(
    factor: &KolmogorovFactor<T>,
    coords: &[usize],
    m: usize,
    rng: SeededRng,
) -> Result<GaussianRealization<T>> {
    if coords.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    let set = coordinate_set(factor.rank(), coords)?;
    realize(factor, Some(set), m, rng)
}

/// `E‖W_s^(F)‖² = tr(V_s* P_F V_s)`.
pub fn truncation_energy<T: Real>(
    factor: &KolmogorovFactor<T>,
    point: usize,
    coords: &[usize],
) -> Result<T> {
    if point >= factor.points().len() {
        return Err(Error::InvalidArgument(format!("point index {point} out of range")));
    }
    let set = coordinate_set(factor.rank(), coords)?;
    let v = factor.factor(point);
    Ok(set
        .iter()
        .map(|&i| v.row(i).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()))
        .fold(T::zero(), |a, b| a + b))
}

/// Finite sections `K = I_n` of the identity kernel on `H = C^n` at one
/// point: `tr K(s,s) = n`, so the energy of the full truncation grows
/// without bound as the section grows. Returns `(n, energy)` per entry.
pub fn divergence_profile<T: Real>(sizes: &[usize]) -> Result<Vec<(usize, T)>> {
    sizes
        .iter()
        .map(|&n| {
            let k = OperatorKernel::<T>::identity(vec!["s".into()], n);
            let f = factorize(&k, T::default_tol())?;
            let all: Vec<usize> = (0..f.rank()).collect();
            Ok((n, truncation_energy(&f, 0, &all)?))
        })
        .collect()
}

fn rank_one_kernel<T: Real>(points: &[String], dim: usize, w: &[ComplexVector<T>]) -> OperatorKernel<T> {
    let n = w.len();
    let blocks = (0..n * n).map(|k| &w[k / n] * w[k % n].adjoint()).collect();
    OperatorKernel::from_raw(points.to_vec(), dim, blocks)
}

/// `k(ω, s, t) = |W_s(ω)⟩⟨W_t(ω)|` with uniform weights over the draws.
pub fn rank_one_random_kernel<T: Real>(real: &GaussianRealization<T>) -> Result<RandomKernel<T>> {
    let kernels = real
        .samples
        .iter()
        .map(|w| rank_one_kernel(real.points(), real.dim(), w))
        .collect();
    Ok(DiscreteRandomKernel::uniform(kernels)?.into())
}

/// Sample covariance `mean_ω |W_s⟩⟨W_t|` with entrywise standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceEstimate<T: Real> {
    pub mean: OperatorKernel<T>,
    /// Per block, real and imaginary standard errors in the `re`/`im` slots.
    pub std_errors: Vec<ComplexMatrix<T>>,
    pub sample_count: usize,
}

impl<T: Real> CovarianceEstimate<T> {
    /// Largest `|mean − K|` per part divided by its standard error; entries
    /// with zero standard error must match to within `floor`.
    pub fn max_z_score(&self, reference: &OperatorKernel<T>, floor: T) -> Result<T> {
        self.mean.ensure_same_shape(reference)?;
        let n = reference.len();
        let mut worst = T::zero();
        for k in 0..n * n {
            let (a, b) = (self.mean.block(k / n, k % n), reference.block(k / n, k % n));
            let se = &self.std_errors[k];
            for idx in 0..a.len() {
                let diff = a[idx] - b[idx];
                for (dv, sv) in [(diff.re, se[idx].re), (diff.im, se[idx].im)] {
                    let z = if sv > T::zero() {
                        dv.abs() / sv
                    } else if dv.abs() <= floor {
                        T::zero()
                    } else {
                        T::max_value().unwrap_or(T::one() / T::default_epsilon())
                    };
                    worst = worst.max(z);
                }
            }
        }
        Ok(worst)
    }

    pub fn max_std_error(&self) -> T {
        self.std_errors
            .iter()
            .fold(T::zero(), |acc, m| acc.max(linalg::max_abs(m)))
    }
}

fn max_std_error<T: Real>(ses: &[ComplexMatrix<T>]) -> T {
    ses.iter().fold(T::zero(), |acc, m| {
        m.iter().fold(acc, |a, z| a.max(z.re).max(z.im))
    })
}

pub fn empirical_covariance<T: Real>(real: &GaussianRealization<T>) -> CovarianceEstimate<T> {
    covariance_with_trace(real, None).0
}

/// Covariance estimate plus its convergence curve against `reference`
/// (defaults to the factor's own kernel `V_s* V_t`).
pub fn covariance_with_trace<T: Real>(
    real: &GaussianRealization<T>,
    reference: Option<&OperatorKernel<T>>,
) -> (CovarianceEstimate<T>, Vec<ConvergencePoint<T>>) {
    let own;
    let reference = match reference {
        Some(r) => r,
        None => {
            own = real.factor.kernel();
            &own
        }
    };
    let marks: BTreeSet<usize> = checkpoints(real.sample_count()).into_iter().collect();
    let mut acc = KernelAverage::new(real.points().to_vec(), real.dim());
    let mut trace = Vec::new();
    for (w, sample) in real.samples.iter().enumerate() {
        acc.push(&rank_one_kernel(real.points(), real.dim(), sample));
        if marks.contains(&(w + 1)) {
            let err = acc.mean().max_abs_diff(reference).unwrap_or_else(|_| T::max_value().unwrap());
            trace.push(ConvergencePoint {
                m: w + 1,
                max_abs_error: err,
                stderr_estimate: max_std_error(&acc.std_errors()),
            });
        }
    }
    let est = CovarianceEstimate {
        mean: acc.mean(),
        std_errors: acc.std_errors(),
        sample_count: acc.count(),
    };
    (est, trace)
}

/// Sample mean of `‖W_s‖²` and its standard error, per point.
pub fn mean_square_norms<T: Real>(real: &GaussianRealization<T>) -> Vec<(T, T)> {
    let n = real.points().len();
    (0..n)
        .map(|i| {
            let mut acc = crate::stats::MatrixMoments::new(1, 1);
            for s in &real.samples {
                let v = s[i].norm_squared();
                acc.push(&ComplexMatrix::from_element(1, 1, linalg::c(v, T::zero())));
            }
            (acc.mean()[(0, 0)].re, acc.std_error()[(0, 0)].re)
        })
        .collect()
}

/// Unweighted average of `m` i.i.d. draws of a random kernel.
#[derive(Debug, Clone)]
pub struct EmpiricalKernel<T: Real> {
    /// `k̄_m` as a one-atom random kernel.
    pub average: RandomKernel<T>,
    pub draws: usize,
    /// Error against the exact mean at checkpoints `1, 2, 4, …, m`; empty
    /// when the mean is not known in closed form.
    pub trace: Vec<ConvergencePoint<T>>,
    /// How often each atom was drawn (discrete laws only).
    pub atom_counts: Option<Vec<usize>>,
}

impl<T: Real> EmpiricalKernel<T> {
    pub fn kernel(&self) -> &OperatorKernel<T> {
        &self.average.as_discrete().expect("empirical kernel is discrete").atoms()[0].1
    }

    pub fn final_error(&self) -> Option<T> {
        self.trace.last().map(|p| p.max_abs_error)
    }
}

/// Draw `i` uses `rng.substream(i)`; results depend only on `(rng, m)`.
pub fn empirical_kernel<T: Real>(
    rk: &RandomKernel<T>,
    m: usize,
    rng: SeededRng,
) -> Result<EmpiricalKernel<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("need at least one draw".into()));
    }
    let reference = rk.exact_mean();
    let marks: BTreeSet<usize> = checkpoints(m).into_iter().collect();
    let mut acc = KernelAverage::new(rk.points().to_vec(), rk.dim());
    let mut counts = rk.as_discrete().map(|d| vec![0usize; d.atoms().len()]);
    let mut trace = Vec::new();
    for i in 0..m {
        let mut g = rng.substream(i as u64).generator();
        let k = match rk.as_discrete() {
            Some(d) => {
                let idx = d.sample_index(&mut g);
                if let Some(c) = counts.as_mut() {
                    c[idx] += 1;
                }
                d.atoms()[idx].1.clone()
            }
            None => rk.draw(&mut g)?,
        };
        acc.push(&k);
        if let (Some(r), true) = (&reference, marks.contains(&(i + 1))) {
            trace.push(ConvergencePoint {
                m: i + 1,
                max_abs_error: acc.mean().max_abs_diff(r)?,
                stderr_estimate: max_std_error(&acc.std_errors()),
            });
        }
    }
    Ok(EmpiricalKernel {
        average: DiscreteRandomKernel::point_mass(acc.mean()).into(),
        draws: m,
        trace,
        atom_counts: counts,
    })
}
