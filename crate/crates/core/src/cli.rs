//! Command-line surface of the `vicm` binary.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;

use crate::data::{Dataset, TuningParams};
use crate::error::{Error, Result};
use crate::estimators::{
    default_tuning, lowrank_estimate, sparse_matrix_estimate, sparse_vector_estimate, Regime,
};
use crate::experiment::{emit_results, run_experiment, ExperimentConfig};
use crate::io::{format_f64, read_dataset_file, read_matrix_file, write_triplets_file};
use crate::metrics::{bootstrap_ci, BootstrapMode};
use crate::precision::{estimate_precision, PrecisionEstimate, PrecisionMethod};
use crate::score::ScoreKind;
use crate::synth::{DesignLaw, Mixture};

#[derive(Debug, Parser)]
#[command(
    name = "vicm",
    version,
    about = "Stein-identity estimators for varying index coefficient models"
)]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "VICM_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a simulation sweep described by a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Overrides `master_seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Fit one estimator to a dataset CSV and write `row,col,value` triplets.
    Estimate {
        #[command(flatten)]
        est: EstimatorArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate a precision matrix from a `z` CSV.
    Precision {
        #[arg(long)]
        z: PathBuf,
        #[arg(long, value_enum, default_value = "inverse-soft")]
        method: MethodArg,
        #[arg(long)]
        kappa2: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Truncation of the covariance fed to CLIME.
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Percentile bootstrap bands for an estimator.
    Bootstrap {
        #[command(flatten)]
        est: EstimatorArgs,
        #[arg(long, default_value_t = 100)]
        reps: usize,
        #[arg(long, default_value_t = 0.95)]
        level: f64,
        #[arg(long, value_enum, default_value = "nonparametric")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EstimatorArg {
    SparseVector,
    Lowrank,
    SparseMatrix,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Identity,
    InverseSoft,
    Clime,
}

impl From<MethodArg> for PrecisionMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Identity => PrecisionMethod::Identity,
            MethodArg::InverseSoft => PrecisionMethod::InverseSoft,
            MethodArg::Clime => PrecisionMethod::Clime,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Nonparametric,
    Parametric,
}

#[derive(Debug, Clone, Args)]
pub struct EstimatorArgs {
    /// Dataset CSV with header `y,x1..,z1..`.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub estimator: EstimatorArg,
    /// Design distribution whose score is applied to `x`.
    #[arg(long, default_value = "gaussian")]
    pub score: ScoreKind,
    /// JSON list of per-column mixtures; replaces `--score`.
    #[arg(long)]
    pub mixtures: Option<PathBuf>,
    /// Index for the sparse-vector estimator; all indices when omitted.
    #[arg(long)]
    pub k: Option<usize>,
    /// Tuning regime evaluated at the data dimensions (default: the
    /// estimator's simulation regime). Explicit values below override it.
    #[arg(long, value_parser = parse_regime)]
    pub regime: Option<Regime>,
    #[arg(long)]
    pub m_p: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub kappa1: Option<f64>,
    #[arg(long)]
    pub kappa2: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub tau_precision: Option<f64>,
    /// Precision plug-in for the matrix estimators.
    #[arg(long, value_enum)]
    pub precision: Option<MethodArg>,
}

fn parse_regime(s: &str) -> std::result::Result<Regime, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
        .map_err(|e| e.to_string())
}

impl EstimatorArgs {
    fn tuning(&self, n: usize, d1: usize, d2: usize) -> Result<TuningParams> {
        let regime = self.regime.unwrap_or(match self.estimator {
            EstimatorArg::SparseVector => Regime::SimSparseVector,
            EstimatorArg::Lowrank => Regime::SimLowrank,
            EstimatorArg::SparseMatrix => Regime::SimSparseMatrix,
        });
        let mut t = default_tuning(regime, n, d1, d2, self.m_p.unwrap_or(1.0))?;
        if let Some(v) = self.lambda {
            t.lambda = v;
        }
        if let Some(v) = self.tau {
            t.tau = v;
        }
        if let Some(v) = self.tau_precision {
            t.tau_precision = v;
        }
        t.kappa1 = self.kappa1.or(t.kappa1);
        t.kappa2 = self.kappa2.or(t.kappa2);
        t.gamma = self.gamma.or(t.gamma);
        t.validate()?;
        Ok(t)
    }

    fn design(&self, d1: usize) -> Result<DesignLaw> {
        match &self.mixtures {
            None => Ok(DesignLaw::Iid(self.score)),
            Some(path) => {
                let raw: Vec<Mixture> = serde_json::from_str(&fs::read_to_string(path)?)?;
                if raw.len() != d1 {
                    return Err(Error::Config(format!(
                        "{} mixtures for d1 = {d1}",
                        raw.len()
                    )));
                }
                let cols = raw
                    .into_iter()
                    .map(|m| Mixture::new(m.components))
                    .collect::<Result<_>>()?;
                Ok(DesignLaw::Columns(cols))
            }
        }
    }

    fn precision_method(&self) -> PrecisionMethod {
        match (self.precision, self.estimator) {
            (Some(m), _) => m.into(),
            (None, EstimatorArg::SparseVector) => PrecisionMethod::Identity,
            (None, EstimatorArg::Lowrank) => PrecisionMethod::InverseSoft,
            (None, EstimatorArg::SparseMatrix) => PrecisionMethod::Clime,
        }
    }

    fn name(&self) -> &'static str {
        match self.estimator {
            EstimatorArg::SparseVector => "sparse_vector",
            EstimatorArg::Lowrank => "lowrank",
            EstimatorArg::SparseMatrix => "sparse_matrix",
        }
    }
}

/// A ready-to-run estimator: `d1 × (number of outputs)` for the
/// sparse-vector case, `d1 × d2` otherwise.
struct Fitted<'a> {
    args: &'a EstimatorArgs,
    law: DesignLaw,
    tuning: TuningParams,
}

impl Fitted<'_> {
    fn estimate(&self, data: &Dataset) -> Result<Array2<f64>> {
        let t = &self.tuning;
        match self.args.estimator {
            EstimatorArg::SparseVector => {
                let ks: Vec<usize> = match self.args.k {
                    Some(k) => vec![k],
                    None => (1..=data.d2()).collect(),
                };
                let mut out = Array2::zeros((data.d1(), ks.len()));
                for (c, &k) in ks.iter().enumerate() {
                    let r = sparse_vector_estimate(data, k, t.lambda, t.tau, &self.law)?;
                    out.column_mut(c).assign(&r.beta_hat);
                }
                Ok(out)
            }
            EstimatorArg::Lowrank | EstimatorArg::SparseMatrix => {
                let omega = self.precision(data)?;
                let r = if let EstimatorArg::Lowrank = self.args.estimator {
                    let kappa1 = t.kappa1.ok_or_else(|| {
                        Error::Config("lowrank needs --kappa1 or a regime providing it".into())
                    })?;
                    lowrank_estimate(data, t.lambda, kappa1, &self.law, omega)?
                } else {
                    sparse_matrix_estimate(data, t.lambda, t.tau, &self.law, omega)?
                };
                Ok(r.b_hat)
            }
        }
    }

    fn precision(&self, data: &Dataset) -> Result<PrecisionEstimate> {
        let t = &self.tuning;
        estimate_precision(
            data.z.view(),
            self.args.precision_method(),
            t.kappa2,
            t.gamma,
            t.tau_precision,
        )
    }

    fn meta(&self) -> Vec<(&'static str, String)> {
        let t = &self.tuning;
        let mut m = vec![
            ("estimator", self.args.name().to_string()),
            ("lambda", format_f64(t.lambda)),
            ("tau", format_f64(t.tau)),
        ];
        if let Some(k) = t.kappa1 {
            m.push(("kappa1", format_f64(k)));
        }
        if let Some(k) = self.args.k {
            m.push(("k", k.to_string()));
        }
        m
    }
}

fn fitted<'a>(args: &'a EstimatorArgs, data: &Dataset) -> Result<Fitted<'a>> {
    Ok(Fitted {
        args,
        law: args.design(data.d1())?,
        tuning: args.tuning(data.n(), data.d1(), data.d2())?,
    })
}

fn write_bands(
    path: &Path,
    bands: &crate::metrics::BootstrapBands,
    meta: &[(&str, String)],
) -> Result<()> {
    let mut text = String::new();
    let meta: Vec<String> = meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
    text.push_str(&format!(
        "# {} level={} reps={}\n",
        meta.join(" "),
        bands.level,
        bands.reps
    ));
    text.push_str("row,col,lower,point,upper\n");
    for ((i, j), p) in bands.point.indexed_iter() {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            j + 1,
            format_f64(bands.lower[(i, j)]),
            format_f64(*p),
            format_f64(bands.upper[(i, j)])
        ));
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out, seed } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            let result = run_experiment(&cfg, cli.threads)?;
            emit_results(&result, &out)
        }
        Command::Estimate { est, out } => {
            let data = read_dataset_file(&est.data)?;
            let f = fitted(&est, &data)?;
            let b = f.estimate(&data)?;
            write_triplets_file(&b, &f.meta(), &out)
        }
        Command::Precision {
            z,
            method,
            kappa2,
            gamma,
            tau,
            out,
        } => {
            let z = read_matrix_file(&z)?;
            let (n, d2) = z.dim();
            let method: PrecisionMethod = method.into();
            let kappa2 = kappa2.or_else(|| {
                (d2 > 1).then(|| 2.0 * ((d2 as f64).ln() / (n as f64 * d2 as f64)).sqrt())
            });
            let est = estimate_precision(
                z.view(),
                method,
                kappa2,
                gamma,
                tau.unwrap_or(f64::INFINITY),
            )?;
            let mut meta = vec![
                (
                    "method",
                    serde_json::to_value(method)?
                        .as_str()
                        .unwrap_or("")
                        .to_string(),
                ),
                ("asymmetry", format_f64(est.asymmetry)),
            ];
            if let Some(r) = est.residual {
                meta.push(("residual", format_f64(r)));
            }
            write_triplets_file(&est.omega, &meta, &out)
        }
        Command::Bootstrap {
            est,
            reps,
            level,
            mode,
            seed,
            out,
        } => {
            let data = read_dataset_file(&est.data)?;
            let f = fitted(&est, &data)?;
            let mode = match mode {
                ModeArg::Nonparametric => BootstrapMode::Nonparametric,
                ModeArg::Parametric => BootstrapMode::Parametric(&f.law),
            };
            let go = || bootstrap_ci(|d| f.estimate(d), &data, mode.clone(), reps, level, seed);
            let bands = match cli.threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t.max(1))
                    .build()
                    .map_err(|e| Error::Config(e.to_string()))?
                    .install(go)?,
                None => go()?,
            };
            write_bands(&out, &bands, &f.meta())
        }
    }
}

/// Parses arguments, runs, and maps the outcome to an exit code:
/// 0 success, 1 usage or configuration error, 2 numerical failure.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
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
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                2
            } else {
                1
            }
        }
    }
}
