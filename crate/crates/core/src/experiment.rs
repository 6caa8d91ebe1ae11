//! Config-driven Monte Carlo sweeps over a grid of sample sizes.
//!
//! Seeding: the true parameter of replication `r` comes from the substream
//! `(master, PARAMS, r)` and is shared by every `n`; the data for `(n, r)`
//! come from `(master, DATA, n, r)`; the `μ` oracle for replication `r` uses
//! `(master, MU, r)`. Jobs may run in any order on any number of threads.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::{CoefficientMatrix, ModelSpec, TuningParams};
use crate::error::{Error, Result};
use crate::estimators::{
    default_tuning, lowrank_estimate, normalize_direction, sparse_matrix_estimate,
    sparse_vector_estimate, Regime,
};
use crate::io::format_f64;
use crate::metrics::{
    column_mu, cosine_distance, matrix_error_vs_tilde, mean_stderr, mu_means, ErrorRecord,
    TildeNorm,
};
use crate::precision::{estimate_precision, PrecisionConfig, PrecisionMethod};
use crate::rng::{substream, tag};
use crate::score::ScoreKind;
use crate::synth::{
    gen_dataset, gen_parameters, CopulaSpec, DesignLaw, LinkFamily, ParamGenSpec, Structure, ZLaw,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    SparseVector,
    Lowrank,
    SparseMatrix,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::SparseVector => "sparse_vector",
            Scenario::Lowrank => "lowrank",
            Scenario::SparseMatrix => "sparse_matrix",
        }
    }

    pub fn default_regime(self) -> Regime {
        match self {
            Scenario::SparseVector => Regime::SimSparseVector,
            Scenario::Lowrank => Regime::SimLowrank,
            Scenario::SparseMatrix => Regime::SimSparseMatrix,
        }
    }

    pub fn default_precision(self) -> PrecisionMethod {
        match self {
            Scenario::SparseVector => PrecisionMethod::Identity,
            Scenario::Lowrank => PrecisionMethod::InverseSoft,
            Scenario::SparseMatrix => PrecisionMethod::Clime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum ZConfig {
    Independent,
    /// Gaussian copula with correlation `ρ 11ᵀ + (1 − ρ) I`, t₇ marginals.
    CopulaEquicorrelated {
        rho: f64,
    },
    /// Gaussian copula whose precision is tridiagonal with off-diagonal `off`.
    CopulaTridiagonal {
        off: f64,
    },
    Ones,
}

impl ZConfig {
    pub fn build(self, d2: usize) -> Result<ZLaw> {
        Ok(match self {
            ZConfig::Independent => ZLaw::Independent,
            ZConfig::CopulaEquicorrelated { rho } => {
                ZLaw::Copula(CopulaSpec::equicorrelated(d2, rho)?)
            }
            ZConfig::CopulaTridiagonal { off } => {
                ZLaw::Copula(CopulaSpec::tridiagonal_precision(d2, off)?)
            }
            ZConfig::Ones => ZLaw::Ones,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TuningConfig {
    /// Re-evaluated at every `n`.
    Regime(Regime),
    /// Scaled as `λ √(n₀ / n)`; other fields are used as given.
    Explicit {
        params: TuningParams,
        reference_n: Option<usize>,
    },
}

fn default_replications() -> usize {
    40
}

fn default_noise_sd() -> f64 {
    0.1
}

fn default_mu_mc_n() -> usize {
    1_000_000
}

fn default_m_p() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub d1: usize,
    pub d2: usize,
    /// `s` for the sparse scenarios.
    #[serde(default)]
    pub sparsity: Option<usize>,
    /// `r` for the low-rank scenario.
    #[serde(default)]
    pub rank: Option<usize>,
    /// Column-sparse truth with `+1/√s` in the first coordinate.
    #[serde(default)]
    pub identified: bool,
    pub n_grid: Vec<usize>,
    pub link: LinkFamily,
    pub design: ScoreKind,
    pub z: ZConfig,
    #[serde(default)]
    pub tuning: Option<TuningConfig>,
    #[serde(default = "default_m_p")]
    pub m_p: f64,
    #[serde(default)]
    pub precision: Option<PrecisionConfig>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_noise_sd")]
    pub noise_sd: f64,
    /// 1-based indices evaluated by the sparse-vector scenario (all by default).
    #[serde(default)]
    pub k_eval: Option<Vec<usize>>,
    #[serde(default = "default_mu_mc_n")]
    pub mu_mc_n: usize,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn structure(&self) -> Result<Structure> {
        let need = |v: Option<usize>, what: &str| {
            v.ok_or_else(|| Error::Config(format!("{} needs `{what}`", self.scenario.name())))
        };
        Ok(match self.scenario {
            Scenario::SparseVector => Structure::ColumnSparse {
                s: need(self.sparsity, "sparsity")?,
                identified: self.identified,
            },
            Scenario::Lowrank => Structure::LowRank {
                r: need(self.rank, "rank")?,
            },
            Scenario::SparseMatrix => Structure::FullySparse {
                s: need(self.sparsity, "sparsity")?,
            },
        })
    }

    pub fn k_values(&self) -> Vec<usize> {
        self.k_eval
            .clone()
            .unwrap_or_else(|| (1..=self.d2).collect())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_grid.is_empty() || self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n_grid must be non-empty and strictly increasing".into());
        }
        if self.n_grid[0] < 2 {
            return bad("every n must be at least 2".into());
        }
        if self.replications == 0 {
            return bad("replications must be at least 1".into());
        }
        if self.identified && self.scenario != Scenario::SparseVector {
            return bad("`identified` applies to the sparse_vector scenario only".into());
        }
        ParamGenSpec {
            structure: self.structure()?,
            d1: self.d1,
            d2: self.d2,
        }
        .validate()
        .map_err(|e| Error::Config(e.to_string()))?;
        if self.k_values().iter().any(|&k| k == 0 || k > self.d2) {
            return bad(format!("k_eval must lie in 1..={}", self.d2));
        }
        if self.mu_mc_n < 2 {
            return bad("mu_mc_n must be at least 2".into());
        }
        if !(self.m_p > 0.0 && self.m_p.is_finite()) {
            return bad(format!("m_p = {}", self.m_p));
        }
        if let Some(TuningConfig::Explicit { params, .. }) = &self.tuning {
            params
                .validate()
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        self.model()
            .map_err(|e| Error::Config(e.to_string()))?
            .validate()?;
        Ok(())
    }

    pub fn model(&self) -> Result<ModelSpec> {
        Ok(ModelSpec {
            link: self.link.clone(),
            design: DesignLaw::Iid(self.design),
            z_law: self.z.build(self.d2)?,
            noise_sd: self.noise_sd,
        })
    }

    pub fn tuning_at(&self, n: usize) -> Result<TuningParams> {
        match self
            .tuning
            .unwrap_or(TuningConfig::Regime(self.scenario.default_regime()))
        {
            TuningConfig::Regime(r) => default_tuning(r, n, self.d1, self.d2, self.m_p),
            TuningConfig::Explicit {
                params,
                reference_n,
            } => {
                let mut t = params;
                if let Some(n0) = reference_n {
                    t.lambda *= (n0 as f64 / n as f64).sqrt();
                }
                Ok(t)
            }
        }
    }

    pub fn precision_config(&self) -> PrecisionConfig {
        self.precision.unwrap_or(PrecisionConfig {
            method: self.scenario.default_precision(),
            gamma: None,
            kappa2: None,
            tau: None,
        })
    }

    /// SHA-256 of the canonical JSON serialization.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Rate-scaled x coordinate used by the plot table.
    pub fn scaled_x(&self, n: usize) -> f64 {
        let (d1, d2, nf) = (self.d1 as f64, self.d2 as f64, n as f64);
        match self.scenario {
            Scenario::SparseVector | Scenario::SparseMatrix => {
                (self.sparsity.unwrap_or(1) as f64 * (d1 * d2).ln() / nf).sqrt()
            }
            Scenario::Lowrank => {
                (self.rank.unwrap_or(1) as f64 * (d1 + d2) * (d1 + d2).ln() / nf).sqrt()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: usize,
    /// Metric name, suffixed with `@k=<k>` for per-index metrics.
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
    pub replications: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub master_seed: u64,
    pub version: String,
    pub threads: usize,
    pub created_unix: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub records: Vec<ErrorRecord>,
    pub aggregates: Vec<Aggregate>,
    pub provenance: Provenance,
}

impl ExperimentResult {
    pub fn aggregate(&self, n: usize, metric: &str) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.n == n && a.metric == metric)
    }
}

pub fn metric_label(r: &ErrorRecord) -> String {
    match r.k {
        Some(k) => format!("{}@k={k}", r.metric),
        None => r.metric.clone(),
    }
}

fn record(n: usize, replication: usize, k: Option<usize>, metric: &str, value: f64) -> ErrorRecord {
    ErrorRecord {
        n,
        replication,
        k,
        metric: metric.to_string(),
        value,
    }
}

/// Direction error after normalization; zero estimates score the maximal
/// cosine distance 1 and an `l2` of `‖β*‖ = 1`.
fn vector_metrics(
    n: usize,
    rep: usize,
    k: usize,
    beta_hat: ArrayView1<'_, f64>,
    star: ArrayView1<'_, f64>,
) -> Result<[ErrorRecord; 2]> {
    let (cos, l2) = match cosine_distance(beta_hat, star) {
        Ok(c) => {
            let unit = normalize_direction(beta_hat).or_else(|_| {
                let norm = beta_hat.dot(&beta_hat).sqrt();
                Ok::<_, Error>(beta_hat.mapv(|v| v / norm))
            })?;
            let diff = &unit - &star;
            (c, diff.dot(&diff).sqrt())
        }
        Err(Error::ZeroVector) => (1.0, 1.0),
        Err(e) => return Err(e),
    };
    Ok([
        record(n, rep, Some(k), "cosine", cos),
        record(n, rep, Some(k), "l2", l2),
    ])
}

fn matrix_metrics(
    n: usize,
    rep: usize,
    b_hat: &Array2<f64>,
    b_star: &CoefficientMatrix,
    mu: &Array1<f64>,
) -> Result<Vec<ErrorRecord>> {
    let star = b_star.matrix();
    let fro = matrix_error_vs_tilde(b_hat.view(), star.view(), mu.view(), TildeNorm::Frobenius)?;
    let nuc = matrix_error_vs_tilde(b_hat.view(), star.view(), mu.view(), TildeNorm::Nuclear)?;
    let tilde = star * &mu.view().insert_axis(ndarray::Axis(0));
    let l1 = (b_hat - &tilde).iter().map(|v| v.abs()).sum::<f64>();
    Ok(vec![
        record(n, rep, None, "frobenius_vs_tilde", fro),
        record(n, rep, None, "nuclear_vs_tilde", nuc),
        record(n, rep, None, "l1", l1),
    ])
}

struct Truth {
    b: CoefficientMatrix,
    mu: Array1<f64>,
}

fn truth_for(config: &ExperimentConfig, rep: usize) -> Result<Truth> {
    let spec = ParamGenSpec {
        structure: config.structure()?,
        d1: config.d1,
        d2: config.d2,
    };
    let b = gen_parameters(
        &spec,
        &mut substream(config.master_seed, &[tag::PARAMS, rep as u64]),
    )?;
    let mu = if config.scenario == Scenario::SparseVector {
        Array1::ones(config.d2)
    } else {
        let mut rng = substream(config.master_seed, &[tag::MU, rep as u64]);
        let law = DesignLaw::Iid(config.design);
        mu_means(&column_mu(
            &config.link,
            b.matrix().view(),
            &law,
            config.mu_mc_n,
            &mut rng,
        )?)
    };
    Ok(Truth { b, mu })
}

fn run_job(
    config: &ExperimentConfig,
    model: &ModelSpec,
    truth: &Truth,
    n: usize,
    rep: usize,
) -> Result<Vec<ErrorRecord>> {
    let mut rng = substream(config.master_seed, &[tag::DATA, n as u64, rep as u64]);
    let data = gen_dataset(model, &truth.b, n, &mut rng)?;
    let tuning = config.tuning_at(n)?;
    tuning.validate()?;
    let spec = config.design;
    match config.scenario {
        Scenario::SparseVector => {
            let mut out = Vec::new();
            for k in config.k_values() {
                let est = sparse_vector_estimate(&data, k, tuning.lambda, tuning.tau, &spec)?;
                out.extend(vector_metrics(
                    n,
                    rep,
                    k,
                    est.beta_hat.view(),
                    truth.b.matrix().column(k - 1),
                )?);
            }
            Ok(out)
        }
        Scenario::Lowrank | Scenario::SparseMatrix => {
            let pc = config.precision_config();
            let omega = estimate_precision(
                data.z.view(),
                pc.method,
                pc.kappa2.or(tuning.kappa2),
                pc.gamma.or(tuning.gamma),
                pc.tau.unwrap_or(tuning.tau_precision),
            )?;
            let est = if config.scenario == Scenario::Lowrank {
                let kappa1 = tuning
                    .kappa1
                    .ok_or_else(|| Error::Config("lowrank tuning needs kappa1".into()))?;
                lowrank_estimate(&data, tuning.lambda, kappa1, &spec, omega)?
            } else {
                sparse_matrix_estimate(&data, tuning.lambda, tuning.tau, &spec, omega)?
            };
            matrix_metrics(n, rep, &est.b_hat, &truth.b, &truth.mu)
        }
    }
}

fn aggregate(records: &[ErrorRecord], n_grid: &[usize]) -> Vec<Aggregate> {
    let mut out = Vec::new();
    for &n in n_grid {
        let mut order: Vec<String> = Vec::new();
        let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for r in records.iter().filter(|r| r.n == n) {
            let label = metric_label(r);
            if !groups.contains_key(&label) {
                order.push(label.clone());
            }
            groups.entry(label).or_default().push(r.value);
        }
        for label in order {
            let values = &groups[&label];
            let (mean, stderr) = mean_stderr(values);
            out.push(Aggregate {
                n,
                metric: label,
                mean,
                stderr,
                replications: values.len(),
            });
        }
    }
    out
}

/// Runs every `(n, replication)` job. `threads = None` uses the global pool.
pub fn run_experiment(
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<ExperimentResult> {
    config.validate()?;
    let go = || -> Result<(Vec<ErrorRecord>, usize)> {
        let model = config.model()?;
        let truths: Vec<Truth> = (0..config.replications)
            .into_par_iter()
            .map(|rep| truth_for(config, rep))
            .collect::<Result<_>>()?;
        let jobs: Vec<(usize, usize)> = config
            .n_grid
            .iter()
            .flat_map(|&n| (0..config.replications).map(move |r| (n, r)))
            .collect();
        let per_job: Vec<Vec<ErrorRecord>> = jobs
            .par_iter()
            .map(|&(n, rep)| {
                run_job(config, &model, &truths[rep], n, rep).map_err(|e| Error::Replication {
                    n,
                    replication: rep,
                    source: Box::new(e),
                })
            })
            .collect::<Result<_>>()?;
        Ok((
            per_job.into_iter().flatten().collect(),
            rayon::current_num_threads(),
        ))
    };
    let (records, used) = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(go)?,
        None => go()?,
    };
    let aggregates = aggregate(&records, &config.n_grid);
    let created_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    Ok(ExperimentResult {
        config: config.clone(),
        records,
        aggregates,
        provenance: Provenance {
            config_hash: config.hash(),
            master_seed: config.master_seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads: used,
            created_unix,
        },
    })
}

pub const RECORDS_HEADER: &str = "scenario,n,replication,k,metric,value";
pub const AGGREGATE_HEADER: &str = "scenario,n,metric,mean,stderr,replications";
pub const PLOT_HEADER: &str = "scenario,n,x_scaled,metric,mean,stderr";

/// Writes `records.csv`, `aggregate.csv`, `plot.csv` and `provenance.json`.
pub fn emit_results(result: &ExperimentResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let scenario = result.config.scenario.name();
    let mut f = std::io::BufWriter::new(fs::File::create(dir.join("records.csv"))?);
    writeln!(f, "{RECORDS_HEADER}")?;
    for r in &result.records {
        let k = r.k.map_or("matrix".to_string(), |k| k.to_string());
        writeln!(
            f,
            "{scenario},{},{},{k},{},{}",
            r.n,
            r.replication,
            r.metric,
            format_f64(r.value)
        )?;
    }
    f.flush()?;
    let mut f = std::io::BufWriter::new(fs::File::create(dir.join("aggregate.csv"))?);
    writeln!(f, "{AGGREGATE_HEADER}")?;
    for a in &result.aggregates {
        writeln!(
            f,
            "{scenario},{},{},{},{},{}",
            a.n,
            a.metric,
            format_f64(a.mean),
            format_f64(a.stderr),
            a.replications
        )?;
    }
    f.flush()?;
    let mut f = std::io::BufWriter::new(fs::File::create(dir.join("plot.csv"))?);
    writeln!(f, "{PLOT_HEADER}")?;
    for a in &result.aggregates {
        writeln!(
            f,
            "{scenario},{},{},{},{},{}",
            a.n,
            format_f64(result.config.scaled_x(a.n)),
            a.metric,
            format_f64(a.mean),
            format_f64(a.stderr)
        )?;
    }
    f.flush()?;
    let prov = serde_json::json!({
        "provenance": result.provenance,
        "config": result.config,
    });
    fs::write(
        dir.join("provenance.json"),
        serde_json::to_string_pretty(&prov)? + "\n",
    )?;
    Ok(())
}

/// Parses a `records.csv` written by [`emit_results`].
pub fn read_records(path: &Path) -> Result<Vec<ErrorRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse = |i: usize| -> Result<usize> {
            rec[i]
                .parse()
                .map_err(|_| Error::Config(format!("bad integer {:?}", &rec[i])))
        };
        let k = if &rec[3] == "matrix" {
            None
        } else {
            Some(parse(3)?)
        };
        let value = rec[5]
            .parse()
            .map_err(|_| Error::Config(format!("bad value {:?}", &rec[5])))?;
        out.push(ErrorRecord {
            n: parse(1)?,
            replication: parse(2)?,
            k,
            metric: rec[4].to_string(),
            value,
        });
    }
    Ok(out)
}
