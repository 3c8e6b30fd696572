//! Experiment runner behind the `opk` binary.
//!
//! Every command reads JSON inputs, prints a JSON report on stdout and
//! writes its artifacts into `--out`. Exit codes: 0 success, 1 IO or parse
//! failure, 2 failed mathematical precondition, 3 shift domination violated.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use opkernel::dilation::{
    build_dilation, moment_kernel, shift_domination, verify_dilation, von_neumann_check,
};
use opkernel::gaussian::{
    covariance_with_trace, empirical_kernel, mean_square_norms, sample_paths,
    truncated_realization,
};
use opkernel::io::{
    self, DilationFile, FactorFile, KernelFile, MatrixFile, MomentKernelFile, RandomKernelFile,
    RandomOperatorFile, RealizationFile,
};
use opkernel::kernel::{check_pd, PdReport, RandomKernel};
use opkernel::kolmogorov::{factorize, reconstruction_error};
use opkernel::linalg;
use opkernel::{Error, SeededRng};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "opk", version, about = "Operator-valued kernels, Gaussian realizations and moment dilations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Positivity of an operator kernel's Gram matrix.
    CheckPd {
        kernel: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Positivity in expectation of a discrete random kernel, plus per-atom verdicts.
    CheckRpd {
        random_kernel: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Kolmogorov factor of a kernel; writes `factor.json`.
    Factorize {
        kernel: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Gaussian realization; writes `realization.json` and `convergence.csv`.
    Gauss {
        kernel: PathBuf,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep only these 0-based coordinates, e.g. `0,2,3`.
        #[arg(long, value_delimiter = ',')]
        coords: Option<Vec<usize>>,
        #[command(flatten)]
        common: Common,
    },
    /// Average of i.i.d. draws of a random kernel; writes `empirical.json` and `convergence.csv`.
    Empirical {
        random_kernel: PathBuf,
        #[arg(long)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Moment kernel of a random operator; writes `moments.json`.
    Moments {
        operator: PathBuf,
        #[arg(long)]
        max_power: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Moments, shift domination, dilation and verification in one run.
    Dilate {
        operator: PathBuf,
        #[arg(long)]
        max_power: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Mean-square von Neumann inequality for a polynomial.
    Vn {
        operator: PathBuf,
        /// JSON array of coefficients `c_0..c_k`, each a number or `[re, im]`.
        #[arg(long)]
        coeffs: String,
        #[arg(long, default_value_t = 4096)]
        grid_size: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub rank_tol: f64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Math(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Math(Error::ShiftDominationViolated { .. }) => 3,
            Failure::Math(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(msg) => write!(f, "{msg}"),
            Failure::Math(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Math(e)
    }
}

/// Report for stdout and the exit code to return with it.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self { report, code: 0 }
    }
}

fn load<F, D, T>(path: &Path, convert: F) -> Result<T, Failure>
where
    D: for<'a> Deserialize<'a>,
    F: FnOnce(D) -> opkernel::Result<T>,
{
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let file: D = io::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    convert(file).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Writes `contents` to `dir/name` through a temporary file in the same directory.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    let io_err = |e: std::io::Error| Failure::Input(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    let target = dir.join(name);
    tmp.persist(&target).map_err(|e| io_err(e.error))?;
    Ok(target)
}

fn pd_json(r: &PdReport<f64>) -> Value {
    json!({
        "is_pd": r.is_pd,
        "min_eigenvalue": r.min_eigenvalue,
        "max_eigenvalue": r.max_eigenvalue,
        "tol": r.tol,
    })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Coefficient {
    Real(f64),
    Complex([f64; 2]),
}

fn parse_coeffs(text: &str) -> Result<Vec<num_complex::Complex<f64>>, Failure> {
    let raw: Vec<Coefficient> = serde_json::from_str(text)
        .map_err(|e| Failure::Input(format!("--coeffs: {e}")))?;
    Ok(raw
        .into_iter()
        .map(|c| match c {
            Coefficient::Real(x) => linalg::c(x, 0.0),
            Coefficient::Complex([re, im]) => linalg::c(re, im),
        })
        .collect())
}

fn check_tol(name: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Failure::Input(format!("--{name} must be positive, got {v}")))
    }
}

fn check_common(c: &Common) -> Result<(), Failure> {
    check_tol("tol", c.tol)?;
    check_tol("rank-tol", c.rank_tol)
}

pub fn run(cli: Cli) -> Result<Outcome, Failure> {
    match cli.command {
        Command::CheckPd { kernel, tol } => {
            check_tol("tol", tol)?;
            let k = load(&kernel, |f: KernelFile| f.to_kernel::<f64>())?;
            let r = check_pd(&k, tol)?;
            Ok(Outcome { report: pd_json(&r), code: if r.is_pd { 0 } else { 2 } })
        }
        Command::CheckRpd { random_kernel, tol } => {
            check_tol("tol", tol)?;
            let rk: RandomKernel<f64> =
                load(&random_kernel, |f: RandomKernelFile| f.to_random_kernel::<f64>())?.into();
            let mean = rk.check_rpd(tol)?;
            let path = rk.is_pathwise_pd(tol)?;
            let atoms: Vec<Value> = path
                .atoms
                .iter()
                .map(|(i, r)| json!({"atom": i, "report": pd_json(r)}))
                .collect();
            let report = json!({
                "rpd": pd_json(&mean),
                "all_pathwise_pd": path.all_pathwise_pd,
                "atoms": atoms,
            });
            Ok(Outcome { report, code: if mean.is_pd { 0 } else { 2 } })
        }
        Command::Factorize { kernel, common } => {
            check_common(&common)?;
            let k = load(&kernel, |f: KernelFile| f.to_kernel::<f64>())?;
            let f = factorize(&k, common.rank_tol)?;
            let err = reconstruction_error(&f, &k)?;
            let path = write_atomic(&common.out, "factor.json", &io::to_json(&FactorFile::from_factor(&f)))?;
            Ok(Outcome::ok(json!({
                "rank": f.rank(),
                "reconstruction_error": err,
                "factor": path,
            })))
        }
        Command::Gauss { kernel, samples, seed, coords, common } => {
            check_common(&common)?;
            let k = load(&kernel, |f: KernelFile| f.to_kernel::<f64>())?;
            let f = factorize(&k, common.rank_tol)?;
            let rng = SeededRng::new(seed);
            let real = match &coords {
                Some(c) => truncated_realization(&f, c, samples, rng)?,
                None => sample_paths(&f, samples, rng)?,
            };
            let (est, trace) = covariance_with_trace(&real, coords.is_none().then_some(&k));
            let norms: Vec<Value> = mean_square_norms(&real)
                .into_iter()
                .map(|(m, se)| json!({"mean": m, "std_error": se}))
                .collect();
            let rpath = write_atomic(&common.out, "realization.json", &io::to_json(&RealizationFile::from_realization(&real)))?;
            let cpath = write_atomic(&common.out, "convergence.csv", &io::convergence_csv(&trace))?;
            Ok(Outcome::ok(json!({
                "rank": f.rank(),
                "samples": real.sample_count(),
                "seed": seed,
                "max_z_score": est.max_z_score(&k, common.tol)?,
                "max_std_error": est.max_std_error(),
                "final_max_abs_error": trace.last().map(|p| p.max_abs_error),
                "mean_square_norms": norms,
                "realization": rpath,
                "convergence": cpath,
            })))
        }
        Command::Empirical { random_kernel, samples, seed, common } => {
            check_common(&common)?;
            let rk: RandomKernel<f64> =
                load(&random_kernel, |f: RandomKernelFile| f.to_random_kernel::<f64>())?.into();
            let emp = empirical_kernel(&rk, samples, SeededRng::new(seed))?;
            let pd = check_pd(emp.kernel(), common.tol)?;
            let kpath = write_atomic(&common.out, "empirical.json", &io::to_json(&KernelFile::from_kernel(emp.kernel())))?;
            let cpath = write_atomic(&common.out, "convergence.csv", &io::convergence_csv(&emp.trace))?;
            Ok(Outcome::ok(json!({
                "draws": emp.draws,
                "seed": seed,
                "final_max_abs_error": emp.final_error(),
                "atom_counts": emp.atom_counts,
                "check_pd": pd_json(&pd),
                "empirical": kpath,
                "convergence": cpath,
            })))
        }
        Command::Moments { operator, max_power, common } => {
            check_common(&common)?;
            let a = load(&operator, |f: RandomOperatorFile| f.to_operator::<f64>())?;
            let k = moment_kernel(&a, max_power)?;
            let path = write_atomic(&common.out, "moments.json", &io::to_json(&MomentKernelFile::from_moments(&k)))?;
            Ok(Outcome::ok(json!({
                "max_power": k.max_power(),
                "dim": k.dim(),
                "normalized": k.is_normalized(),
                "moments": path,
            })))
        }
        Command::Dilate { operator, max_power, common } => {
            check_common(&common)?;
            let a = load(&operator, |f: RandomOperatorFile| f.to_operator::<f64>())?;
            dilate(&common, a, max_power)
        }
        Command::Vn { operator, coeffs, grid_size, tol } => {
            check_tol("tol", tol)?;
            let a = load(&operator, |f: RandomOperatorFile| f.to_operator::<f64>())?;
            let coeffs = parse_coeffs(&coeffs)?;
            let r = von_neumann_check(&a, &coeffs, grid_size, tol)?;
            let report = json!({
                "holds": r.holds,
                "degree": r.degree,
                "lhs_matrix": MatrixFile::from_matrix(&r.lhs_matrix),
                "lhs_max_eigenvalue": r.lhs_max_eigenvalue,
                "sup_f": r.sup_f,
                "sup_f_margin": r.sup_f_margin,
                "slack": r.slack,
            });
            Ok(Outcome { report, code: if r.holds { 0 } else { 2 } })
        }
    }
}

fn dilate(common: &Common, a: opkernel::dilation::RandomOperator<f64>, max_power: usize) -> Result<Outcome, Failure> {
    let out = &common.out;
    let k = moment_kernel(&a, max_power)?;
    let mpath = write_atomic(out, "moments.json", &io::to_json(&MomentKernelFile::from_moments(&k)))?;
    let dom = shift_domination(&k, common.tol)?;
    let dom_json = json!({
        "holds": dom.holds,
        "min_eigenvalue": dom.min_eigenvalue,
        "max_eigenvalue": dom.max_eigenvalue,
        "tol": common.tol,
    });
    let dpath = write_atomic(out, "domination.json", &serde_json::to_string_pretty(&dom_json).unwrap())?;
    if !dom.holds {
        return Ok(Outcome {
            report: json!({"domination": dom_json, "moments": mpath, "domination_report": dpath}),
            code: 3,
        });
    }
    let t = build_dilation(&k, common.rank_tol)?;
    let v = verify_dilation(&k, &t)?;
    let tpath = write_atomic(out, "dilation.json", &io::to_json(&DilationFile::from_triple(&t)))?;
    let b_norm = linalg::op_norm(&t.b)?;
    let verification = json!({
        "max_residual": v.max_residual,
        "unitarity": v.unitarity,
        "projection": v.projection,
        "isometry": v.isometry,
        "c3_min_eigenvalue": v.c3_min_eigenvalue,
        "c3_holds": v.c3_holds,
        "c3_span_depth": v.c3_span_depth,
        "passes": v.passes(),
    });
    let vpath = write_atomic(out, "verification.json", &serde_json::to_string_pretty(&verification).unwrap())?;
    Ok(Outcome {
        report: json!({
            "domination": dom_json,
            "verification": verification,
            "rank": t.rank,
            "space_dim": t.space_dim,
            "b_norm": b_norm,
            "moments": mpath,
            "domination_report": dpath,
            "dilation": tpath,
            "verification_report": vpath,
        }),
        code: if v.passes() { 0 } else { 2 },
    })
}

/// Parses arguments, runs, prints and returns the process exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(outcome) => {
            let text = serde_json::to_string_pretty(&outcome.report).unwrap();
            // a closed stdout (e.g. piped into `head`) is not a failure of the run
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            outcome.code
        }
        Err(f) => {
            eprintln!("error: {f}");
            f.exit_code()
        }
    }
}

