//! JSON file schemas. Complex numbers are `[re, im]` pairs; matrices are
//! `{"rows", "cols", "data"}` with row-major data. Floats are written with
//! the shortest representation that parses back to the same `f64`.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dilation::{DilationTriple, MomentKernel, RandomOperator};
use crate::error::{Error, Result};
use crate::gaussian::{ConvergencePoint, GaussianRealization};
use crate::kernel::{DiscreteRandomKernel, OperatorKernel};
use crate::kolmogorov::KolmogorovFactor;
use crate::linalg::{ComplexMatrix, ComplexVector};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix<T: Real>(m: &ComplexMatrix<T>) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push([m[(i, j)].re.as_f64(), m[(i, j)].im.as_f64()]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<ComplexMatrix<T>> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        let m = ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            Complex::new(T::lit(re), T::lit(im))
        });
        crate::linalg::ensure_finite(&m, "matrix file")?;
        Ok(m)
    }
}

fn pair_key(i: usize, j: usize) -> String {
    format!("{i},{j}")
}

fn parse_pair(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::InvalidArgument(format!("block key {key:?} is not \"i,j\""));
    let (a, b) = key.split_once(',').ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelFile {
    pub points: Vec<String>,
    pub dim: usize,
    pub blocks: BTreeMap<String, MatrixFile>,
}

impl KernelFile {
    pub fn from_kernel<T: Real>(k: &OperatorKernel<T>) -> Self {
        let n = k.len();
        let blocks = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (pair_key(i, j), MatrixFile::from_matrix(k.block(i, j))))
            .collect();
        Self {
            points: k.points().to_vec(),
            dim: k.dim(),
            blocks,
        }
    }

    pub fn to_kernel<T: Real>(&self) -> Result<OperatorKernel<T>> {
        let mut given = BTreeMap::new();
        for (key, m) in &self.blocks {
            given.insert(parse_pair(key)?, m.to_matrix()?);
        }
        OperatorKernel::from_partial(self.points.clone(), self.dim, given)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomFile {
    pub weight: f64,
    pub kernel: KernelFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomKernelFile {
    pub atoms: Vec<AtomFile>,
}

impl RandomKernelFile {
    pub fn from_random_kernel<T: Real>(rk: &DiscreteRandomKernel<T>) -> Self {
        Self {
            atoms: rk
                .atoms()
                .iter()
                .map(|(w, k)| AtomFile {
                    weight: w.as_f64(),
                    kernel: KernelFile::from_kernel(k),
                })
                .collect(),
        }
    }

    pub fn to_random_kernel<T: Real>(&self) -> Result<DiscreteRandomKernel<T>> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok((T::lit(a.weight), a.kernel.to_kernel()?)))
            .collect::<Result<Vec<_>>>()?;
        DiscreteRandomKernel::new(atoms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorFile {
    pub rank: usize,
    pub dim: usize,
    pub points: Vec<String>,
    pub factors: BTreeMap<String, MatrixFile>,
}

impl FactorFile {
    pub fn from_factor<T: Real>(f: &KolmogorovFactor<T>) -> Self {
        Self {
            rank: f.rank(),
            dim: f.dim(),
            points: f.points().to_vec(),
            factors: f
                .points()
                .iter()
                .zip(f.factors())
                .map(|(p, v)| (p.clone(), MatrixFile::from_matrix(v)))
                .collect(),
        }
    }

    pub fn to_factor<T: Real>(&self, rank_tol: T) -> Result<KolmogorovFactor<T>> {
        let factors = self
            .points
            .iter()
            .map(|p| {
                self.factors
                    .get(p)
                    .ok_or_else(|| Error::InvalidArgument(format!("no factor for point {p:?}")))?
                    .to_matrix()
            })
            .collect::<Result<Vec<_>>>()?;
        if factors.iter().any(|v| v.nrows() != self.rank) {
            return Err(Error::DimensionMismatch("factor rows differ from rank".into()));
        }
        KolmogorovFactor::from_factors(self.points.clone(), self.dim, factors, rank_tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationFile {
    #[serde(rename = "M")]
    pub m: usize,
    pub points: Vec<String>,
    pub samples: Vec<BTreeMap<String, Vec<[f64; 2]>>>,
}

fn vector_entries<T: Real>(v: &ComplexVector<T>) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect()
}

impl RealizationFile {
    pub fn from_realization<T: Real>(r: &GaussianRealization<T>) -> Self {
        Self {
            m: r.sample_count(),
            points: r.points().to_vec(),
            samples: r
                .samples
                .iter()
                .map(|draw| {
                    r.points()
                        .iter()
                        .zip(draw)
                        .map(|(p, w)| (p.clone(), vector_entries(w)))
                        .collect()
                })
                .collect(),
        }
    }

    /// Draws as `samples[ω][i]`, in point order.
    pub fn vectors<T: Real>(&self) -> Result<Vec<Vec<ComplexVector<T>>>> {
        self.samples
            .iter()
            .map(|draw| {
                self.points
                    .iter()
                    .map(|p| {
                        let v = draw
                            .get(p)
                            .ok_or_else(|| Error::InvalidArgument(format!("sample lacks point {p:?}")))?;
                        Ok(ComplexVector::from_iterator(
                            v.len(),
                            v.iter().map(|[re, im]| Complex::new(T::lit(*re), T::lit(*im))),
                        ))
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorAtomFile {
    pub weight: f64,
    pub matrix: MatrixFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomOperatorFile {
    pub dim: usize,
    pub atoms: Vec<OperatorAtomFile>,
}

impl RandomOperatorFile {
    pub fn from_operator<T: Real>(a: &RandomOperator<T>) -> Self {
        Self {
            dim: a.dim(),
            atoms: a
                .atoms()
                .iter()
                .map(|(w, m)| OperatorAtomFile {
                    weight: w.as_f64(),
                    matrix: MatrixFile::from_matrix(m),
                })
                .collect(),
        }
    }

    pub fn to_operator<T: Real>(&self) -> Result<RandomOperator<T>> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok((T::lit(a.weight), a.matrix.to_matrix()?)))
            .collect::<Result<Vec<_>>>()?;
        RandomOperator::new(self.dim, atoms)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentKernelFile {
    pub max_power: usize,
    pub dim: usize,
    pub blocks: BTreeMap<String, MatrixFile>,
}

impl MomentKernelFile {
    pub fn from_moments<T: Real>(k: &MomentKernel<T>) -> Self {
        let size = k.max_power() + 1;
        Self {
            max_power: k.max_power(),
            dim: k.dim(),
            blocks: (0..size)
                .flat_map(|m| (0..size).map(move |n| (m, n)))
                .map(|(m, n)| (pair_key(m, n), MatrixFile::from_matrix(k.block(m, n))))
                .collect(),
        }
    }

    pub fn to_moments<T: Real>(&self) -> Result<MomentKernel<T>> {
        let kf = KernelFile {
            points: crate::kernel::index_points(self.max_power + 1),
            dim: self.dim,
            blocks: self.blocks.clone(),
        };
        MomentKernel::from_operator_kernel(&kf.to_kernel()?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilationFile {
    pub space_dim: usize,
    pub rank: usize,
    pub trunc_depth: usize,
    #[serde(rename = "U")]
    pub u: MatrixFile,
    #[serde(rename = "P")]
    pub p: MatrixFile,
    #[serde(rename = "W")]
    pub w: MatrixFile,
    #[serde(rename = "B")]
    pub b: MatrixFile,
}

impl DilationFile {
    pub fn from_triple<T: Real>(t: &DilationTriple<T>) -> Self {
        Self {
            space_dim: t.space_dim,
            rank: t.rank,
            trunc_depth: t.trunc_depth,
            u: MatrixFile::from_matrix(&t.u),
            p: MatrixFile::from_matrix(&t.p),
            w: MatrixFile::from_matrix(&t.w),
            b: MatrixFile::from_matrix(&t.b),
        }
    }

    pub fn to_triple<T: Real>(&self) -> Result<DilationTriple<T>> {
        Ok(DilationTriple {
            space_dim: self.space_dim,
            rank: self.rank,
            trunc_depth: self.trunc_depth,
            u: self.u.to_matrix()?,
            p: self.p.to_matrix()?,
            w: self.w.to_matrix()?,
            b: self.b.to_matrix()?,
        })
    }
}

/// Convergence curve as CSV with header `m_or_M,max_abs_error,stderr_estimate`.
pub fn convergence_csv<T: Real>(rows: &[ConvergencePoint<T>]) -> String {
    let mut out = String::from("m_or_M,max_abs_error,stderr_estimate\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:e},{:e}\n",
            r.m,
            r.max_abs_error.as_f64(),
            r.stderr_estimate.as_f64()
        ));
    }
    out
}

pub fn to_json<S: Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("file schemas serialize")
}

pub fn from_json<'a, D: Deserialize<'a>>(text: &'a str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("malformed JSON: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_file_completes_missing_adjoint() {
        let text = r#"{"points":["a","b"],"dim":1,"blocks":{
            "0,0":{"rows":1,"cols":1,"data":[[2,0]]},
            "0,1":{"rows":1,"cols":1,"data":[[1,0.5]]},
            "1,1":{"rows":1,"cols":1,"data":[[2,0]]}}}"#;
        let kf: KernelFile = from_json(text).unwrap();
        let k: OperatorKernel<f64> = kf.to_kernel().unwrap();
        assert_eq!(k.block(1, 0)[(0, 0)], Complex::new(1.0, -0.5));
        assert_eq!(k.points(), &["a", "b"]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(from_json::<KernelFile>("{").is_err());
        let bad = MatrixFile {
            rows: 2,
            cols: 2,
            data: vec![[1.0, 0.0]],
        };
        assert!(bad.to_matrix::<f64>().is_err());
        assert!(parse_pair("3").is_err());
    }

    #[test]
    fn operator_and_dilation_files() {
        let text = r#"{"dim":1,"atoms":[
            {"weight":0.5,"matrix":{"rows":1,"cols":1,"data":[[0.5,0]]}},
            {"weight":0.5,"matrix":{"rows":1,"cols":1,"data":[[-0.5,0]]}}]}"#;
        let a: RandomOperator<f64> = from_json::<RandomOperatorFile>(text).unwrap().to_operator().unwrap();
        let k = crate::dilation::moment_kernel(&a, 3).unwrap();
        let t = crate::dilation::build_dilation(&k, 1e-10).unwrap();
        let tf = DilationFile::from_triple(&t);
        let json = to_json(&tf);
        assert!(json.contains("\"U\"") && json.contains("\"trunc_depth\""));
        let back: DilationTriple<f64> = from_json::<DilationFile>(&json).unwrap().to_triple().unwrap();
        assert_eq!(back, t);
        let mk: MomentKernel<f64> = from_json::<MomentKernelFile>(&to_json(&MomentKernelFile::from_moments(&k)))
            .unwrap()
            .to_moments()
            .unwrap();
        assert_eq!(mk, k);
    }

    #[test]
    fn csv_layout() {
        let rows = vec![ConvergencePoint {
            m: 4,
            max_abs_error: 0.5f64,
            stderr_estimate: 0.25,
        }];
        assert_eq!(
            convergence_csv(&rows),
            "m_or_M,max_abs_error,stderr_estimate\n4,5e-1,2.5e-1\n"
        );
    }
}
