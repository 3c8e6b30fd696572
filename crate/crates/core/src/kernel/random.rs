//! Random kernels `k(ω, s, t)` over a finite weighted atom set or a seeded sampler.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{check_pd, OperatorKernel, PdReport};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::scalar::Real;
use crate::stats::{compensated_total, CompensatedSum};

/// Finitely supported law over kernels sharing one point set and dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteRandomKernel<T: Real> {
    atoms: Vec<(T, OperatorKernel<T>)>,
}

pub(crate) fn weight_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::default_epsilon() * T::lit(8.0))
}

pub(crate) fn validate_weights<T: Real>(weights: impl Iterator<Item = T> + Clone) -> Result<()> {
    if weights.clone().next().is_none() {
        return Err(Error::InvalidWeights("no atoms".into()));
    }
    if let Some(w) = weights.clone().find(|w| *w <= T::zero() || !w.is_finite()) {
        return Err(Error::InvalidWeights(format!("weight {w} is not positive")));
    }
    let total = compensated_total(weights);
    if (total - T::one()).abs() > weight_tolerance::<T>() {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    Ok(())
}

impl<T: Real> DiscreteRandomKernel<T> {
    pub fn new(atoms: Vec<(T, OperatorKernel<T>)>) -> Result<Self> {
        validate_weights(atoms.iter().map(|(w, _)| *w))?;
        let first = &atoms[0].1;
        for (_, k) in &atoms[1..] {
            first.ensure_same_shape(k)?;
        }
        Ok(Self { atoms })
    }

    /// Equal weights `1/n`.
    pub fn uniform(kernels: Vec<OperatorKernel<T>>) -> Result<Self> {
        let w = T::one() / T::lit(kernels.len().max(1) as f64);
        Self::new(kernels.into_iter().map(|k| (w, k)).collect())
    }

    /// Degenerate law concentrated on one kernel.
    pub fn point_mass(kernel: OperatorKernel<T>) -> Self {
        Self {
            atoms: vec![(T::one(), kernel)],
        }
    }

    pub fn atoms(&self) -> &[(T, OperatorKernel<T>)] {
        &self.atoms
    }

    pub fn points(&self) -> &[String] {
        self.atoms[0].1.points()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].1.dim()
    }

    /// Exact weighted average of the blocks.
    pub fn mean_kernel(&self) -> OperatorKernel<T> {
        let first = &self.atoms[0].1;
        let nblocks = first.blocks().len();
        let d = first.dim();
        let blocks = (0..nblocks)
            .map(|b| {
                crate::linalg::ComplexMatrix::from_fn(d, d, |i, j| {
                    let mut re = CompensatedSum::default();
                    let mut im = CompensatedSum::default();
                    for (w, k) in &self.atoms {
                        let z = k.blocks()[b][(i, j)];
                        re.add(*w * z.re);
                        im.add(*w * z.im);
                    }
                    num_complex::Complex::new(re.value(), im.value())
                })
            })
            .collect();
        OperatorKernel::from_raw(first.points().to_vec(), d, blocks)
    }

    /// Samples an atom index with probability equal to its weight.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u = T::lit(rng.random::<f64>());
        let mut acc = T::zero();
        for (k, (w, _)) in self.atoms.iter().enumerate() {
            acc += *w;
            if u < acc {
                return k;
            }
        }
        self.atoms.len() - 1
    }
}

/// Generative random kernel: a deterministic function of a seeded stream.
pub trait KernelSampler<T: Real>: Send + Sync {
    fn points(&self) -> &[String];
    fn dim(&self) -> usize;
    fn sample(&self, rng: &mut ChaCha8Rng) -> OperatorKernel<T>;
    /// Exact mean when it is known in closed form; used only as an error reference.
    fn mean(&self) -> Option<OperatorKernel<T>> {
        None
    }
}

#[derive(Clone)]
pub enum RandomKernel<T: Real> {
    Discrete(DiscreteRandomKernel<T>),
    Sampled(Arc<dyn KernelSampler<T>>),
}

impl<T: Real> fmt::Debug for RandomKernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Discrete(d) => f.debug_tuple("Discrete").field(d).finish(),
            Self::Sampled(s) => f
                .debug_struct("Sampled")
                .field("points", &s.points())
                .field("dim", &s.dim())
                .finish(),
        }
    }
}

impl<T: Real> From<DiscreteRandomKernel<T>> for RandomKernel<T> {
    fn from(d: DiscreteRandomKernel<T>) -> Self {
        Self::Discrete(d)
    }
}

/// Monte Carlo budget for sampler-backed expectations. Draw `i` uses
/// `rng.substream(i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarlo {
    pub samples: usize,
    pub rng: SeededRng,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanKernel<T: Real> {
    pub kernel: OperatorKernel<T>,
    /// `None` for an exact (discrete) mean.
    pub sample_count: Option<usize>,
}

/// Per-atom positivity verdicts.
#[derive(Debug, Clone, PartialEq)]
pub struct PathwiseReport<T: Real> {
    pub atoms: Vec<(usize, PdReport<T>)>,
    pub all_pathwise_pd: bool,
}

impl<T: Real> RandomKernel<T> {
    pub fn points(&self) -> &[String] {
        match self {
            Self::Discrete(d) => d.points(),
            Self::Sampled(s) => s.points(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Discrete(d) => d.dim(),
            Self::Sampled(s) => s.dim(),
        }
    }

    pub fn as_discrete(&self) -> Option<&DiscreteRandomKernel<T>> {
        match self {
            Self::Discrete(d) => Some(d),
            Self::Sampled(_) => None,
        }
    }

    fn require_discrete(&self) -> Result<&DiscreteRandomKernel<T>> {
        self.as_discrete().ok_or_else(|| {
            Error::InvalidArgument("operation requires a discrete random kernel".into())
        })
    }

    /// One draw `k(ω, ·, ·)`.
    pub fn draw(&self, rng: &mut ChaCha8Rng) -> Result<OperatorKernel<T>> {
        match self {
            Self::Discrete(d) => Ok(d.atoms[d.sample_index(rng)].1.clone()),
            Self::Sampled(s) => {
                let k = s.sample(rng);
                if k.points() != s.points() || k.dim() != s.dim() {
                    return Err(Error::DimensionMismatch(
                        "sampler produced a kernel of the wrong shape".into(),
                    ));
                }
                Ok(k)
            }
        }
    }

    /// Closed-form mean if available: exact for discrete laws, `sampler.mean()` otherwise.
    pub fn exact_mean(&self) -> Option<OperatorKernel<T>> {
        match self {
            Self::Discrete(d) => Some(d.mean_kernel()),
            Self::Sampled(s) => s.mean(),
        }
    }

    /// `E[k(·, s, t)]`: exact for discrete laws, a Monte Carlo average otherwise.
    pub fn mean_kernel(&self, budget: Option<MonteCarlo>) -> Result<MeanKernel<T>> {
        match self {
            Self::Discrete(d) => Ok(MeanKernel {
                kernel: d.mean_kernel(),
                sample_count: None,
            }),
            Self::Sampled(_) => {
                let mc = budget.ok_or(Error::MissingSampleBudget)?;
                if mc.samples == 0 {
                    return Err(Error::InvalidArgument("sample count must be >= 1".into()));
                }
                let mut acc = KernelAverage::new(self.points().to_vec(), self.dim());
                for i in 0..mc.samples {
                    acc.push(&self.draw(&mut mc.rng.substream(i as u64).generator())?);
                }
                Ok(MeanKernel {
                    kernel: acc.mean(),
                    sample_count: Some(mc.samples),
                })
            }
        }
    }

    /// Positivity in expectation: the pd test applied to the mean kernel.
    pub fn check_rpd(&self, tol: T) -> Result<PdReport<T>> {
        check_pd(&self.require_discrete()?.mean_kernel(), tol)
    }

    pub fn is_pathwise_pd(&self, tol: T) -> Result<PathwiseReport<T>> {
        let d = self.require_discrete()?;
        let atoms = d
            .atoms
            .iter()
            .enumerate()
            .map(|(i, (_, k))| check_pd(k, tol).map(|r| (i, r)))
            .collect::<Result<Vec<_>>>()?;
        let all_pathwise_pd = atoms.iter().all(|(_, r)| r.is_pd);
        Ok(PathwiseReport {
            atoms,
            all_pathwise_pd,
        })
    }
}

/// Unweighted running average of kernels with entrywise standard errors.
#[derive(Debug, Clone)]
pub(crate) struct KernelAverage<T: Real> {
    points: Vec<String>,
    dim: usize,
    moments: Vec<crate::stats::MatrixMoments<T>>,
}

impl<T: Real> KernelAverage<T> {
    pub fn new(points: Vec<String>, dim: usize) -> Self {
        let n = points.len();
        Self {
            moments: vec![crate::stats::MatrixMoments::new(dim, dim); n * n],
            points,
            dim,
        }
    }

    pub fn push(&mut self, k: &OperatorKernel<T>) {
        for (acc, b) in self.moments.iter_mut().zip(k.blocks()) {
            acc.push(b);
        }
    }

    pub fn count(&self) -> usize {
        self.moments.first().map_or(0, |m| m.count())
    }

    pub fn mean(&self) -> OperatorKernel<T> {
        OperatorKernel::from_raw(
            self.points.clone(),
            self.dim,
            self.moments.iter().map(|m| m.mean()).collect(),
        )
    }

    /// Entrywise standard errors, real and imaginary parts kept separately.
    pub fn std_errors(&self) -> Vec<crate::linalg::ComplexMatrix<T>> {
        self.moments.iter().map(|m| m.std_error()).collect()
    }
}
