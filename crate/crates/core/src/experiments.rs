//! Randomized accuracy study for the matrix exponential.
//!
//! Each trial draws cluster sizes, well-separated cluster centers, clustered
//! eigenvalues and a random similarity `T`, sets `A = T⁻¹ΛT`, and compares the
//! Newton-form `p(A)` with the reference `T⁻¹e^ΛT`.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{ClusterPartition, DEFAULT_DELTA};
use crate::error::{FunmError, Result};
use crate::linalg::{condition_number, mat_inverse, mat_mul, operator_norm, Complex, ComplexMatrix};
use crate::newton::{funm, FunmParams};
use crate::taylor::Exp;

pub const DEFAULT_ETA: f64 = 0.001;
pub const DEFAULT_TRIALS: usize = 1000;
/// Relative errors above this count towards `M`.
pub const FAILURE_THRESHOLD: f64 = 1e-3;
/// Table values below this are reported as zero.
pub const REPORT_FLOOR: f64 = 1e-10;
/// Maximum number of rejected center sequences per instance.
pub const MAX_CENTER_RESAMPLES: usize = 1_000_000;

pub const CSV_HEADER: [&str; 8] = [
    "n",
    "K",
    "gamma",
    "max_kappa",
    "mean_kappa",
    "max_relerr",
    "mean_relerr",
    "M",
];

const RE_RANGE: (f64, f64) = (-2.0, 0.0);
const IM_RANGE: (f64, f64) = (-PI, PI);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    /// Largest admissible cluster size `K`.
    pub max_cluster: usize,
    pub gamma: i32,
    pub delta: f64,
    pub eta: f64,
    pub trials: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(n: usize, max_cluster: usize, gamma: i32) -> Self {
        ExperimentConfig {
            n,
            max_cluster,
            gamma,
            delta: DEFAULT_DELTA,
            eta: DEFAULT_ETA,
            trials: DEFAULT_TRIALS,
            seed: 0,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn params(&self) -> FunmParams {
        FunmParams {
            delta: self.delta,
            gamma: self.gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &'static str, detail: String| Err(FunmError::InvalidParameter { name, detail });
        if self.n == 0 {
            return bad("n", "must be at least 1".into());
        }
        if self.max_cluster == 0 || self.max_cluster > self.n {
            return bad("K", format!("must lie in [1, n={}], got {}", self.n, self.max_cluster));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad("eta", format!("must be positive, got {}", self.eta));
        }
        if self.trials == 0 {
            return bad("trials", "must be at least 1".into());
        }
        self.params().validate()?;
        if self.eta >= self.delta {
            return bad(
                "eta",
                format!("cluster size {} must be well below delta {}", self.eta, self.delta),
            );
        }
        Ok(())
    }

    /// Random stream of one trial; independent of how trials are scheduled.
    pub fn trial_rng(&self, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial as u64);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentInstance {
    /// Diagonal of `Λ`, cluster by cluster.
    pub eigenvalues: Vec<Complex>,
    /// Centers the eigenvalues were scattered around.
    pub initial_centers: Vec<Complex>,
    pub t: ComplexMatrix,
    pub a: ComplexMatrix,
    pub true_clusters: ClusterPartition,
}

impl ExperimentInstance {
    pub fn lambda(&self) -> ComplexMatrix {
        ComplexMatrix::from_diag(&self.eigenvalues)
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        self.true_clusters.sizes()
    }
}

fn uniform_box<R: Rng>(rng: &mut R, re: (f64, f64), im: (f64, f64)) -> Complex {
    Complex::new(rng.random_range(re.0..=re.1), rng.random_range(im.0..=im.1))
}

fn cluster_sizes<R: Rng>(rng: &mut R, n: usize, max_cluster: usize) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < n {
        let k = rng.random_range(1..=max_cluster);
        let k = k.min(n - total);
        sizes.push(k);
        total += k;
    }
    sizes
}

fn min_pairwise_distance(points: &[Complex]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.min((p - q).norm());
        }
    }
    best
}

/// `T⁻¹·diag(d)·T`.
fn similarity(t: &ComplexMatrix, t_inv: &ComplexMatrix, diag: &[Complex]) -> Result<ComplexMatrix> {
    let n = t.rows();
    let mut scaled = t_inv.clone();
    for i in 0..n {
        for (j, &d) in diag.iter().enumerate() {
            scaled[(i, j)] *= d;
        }
    }
    mat_mul(&scaled, t)
}

/// Draws one random instance.
pub fn generate_instance<R: Rng>(config: &ExperimentConfig, rng: &mut R) -> Result<ExperimentInstance> {
    config.validate()?;
    let sizes = cluster_sizes(rng, config.n, config.max_cluster);

    let mut centers = Vec::new();
    let mut attempts = 0;
    loop {
        centers.clear();
        centers.extend((0..sizes.len()).map(|_| uniform_box(rng, RE_RANGE, IM_RANGE)));
        if min_pairwise_distance(&centers) >= config.delta {
            break;
        }
        attempts += 1;
        if attempts >= MAX_CENTER_RESAMPLES {
            return Err(FunmError::GenerationExhausted { attempts });
        }
    }

    let eta = config.eta;
    let eigenvalues: Vec<Complex> = sizes
        .iter()
        .zip(&centers)
        .flat_map(|(&k, &c)| std::iter::repeat_n(c, k))
        .map(|c| c + uniform_box(rng, (-eta, eta), (-eta, eta)))
        .collect();

    let n = config.n;
    let t = ComplexMatrix::from_row_major(
        n,
        n,
        (0..n * n).map(|_| uniform_box(rng, (-1.0, 1.0), (-1.0, 1.0))).collect(),
    )?;
    let t_inv = mat_inverse(&t)?;
    let a = similarity(&t, &t_inv, &eigenvalues)?;
    let true_clusters = ClusterPartition::from_sizes(&eigenvalues, &sizes, config.delta, config.gamma)?;
    Ok(ExperimentInstance {
        eigenvalues,
        initial_centers: centers,
        t,
        a,
        true_clusters,
    })
}

/// Reference exponential `T⁻¹·e^Λ·T`.
pub fn exact_exponential(instance: &ExperimentInstance) -> Result<ComplexMatrix> {
    let t_inv = mat_inverse(&instance.t)?;
    let exp_diag: Vec<Complex> = instance.eigenvalues.iter().map(|z| z.exp()).collect();
    similarity(&instance.t, &t_inv, &exp_diag)
}

/// `‖approx − exact‖ / ‖exact‖` in the operator norm.
pub fn relative_error(approx: &ComplexMatrix, exact: &ComplexMatrix) -> Result<f64> {
    let diff = approx.sub(exact)?;
    let reference = operator_norm(exact);
    if reference == 0.0 {
        return Err(FunmError::ZeroReference);
    }
    Ok(operator_norm(&diff) / reference)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub kappa: f64,
    pub rel_error: f64,
    pub exceeded: bool,
}

/// Generates trial `index` and evaluates it.
pub fn run_trial(config: &ExperimentConfig, index: usize) -> Result<TrialResult> {
    let mut rng = config.trial_rng(index);
    let instance = generate_instance(config, &mut rng)?;
    evaluate_instance(&instance, config.params())
}

/// Compares `p(A)`, built from the generator's exact eigenvalues, with the reference.
pub fn evaluate_instance(instance: &ExperimentInstance, params: FunmParams) -> Result<TrialResult> {
    let exact = exact_exponential(instance)?;
    let kappa = condition_number(&instance.t)?;
    let rel_error = match funm(&instance.a, &instance.eigenvalues, &Exp::new(), params) {
        Ok(approx) => relative_error(&approx, &exact)?,
        // an overflowing Horner chain is a failed trial, not a harness error
        Err(FunmError::NonFinite(_)) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let rel_error = if rel_error.is_nan() { f64::INFINITY } else { rel_error };
    Ok(TrialResult {
        kappa,
        rel_error,
        exceeded: rel_error > FAILURE_THRESHOLD,
    })
}

/// Every trial of a run, in trial order. Trials run in parallel; each owns a
/// random stream derived from the master seed, so the output is schedule-independent.
pub fn sample_trials(config: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|i| {
            run_trial(config, i).map_err(|e| FunmError::Trial {
                trial: i,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Aggregate statistics of one run, in the column order of the results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub n: usize,
    pub max_cluster: usize,
    pub gamma: i32,
    pub trials: usize,
    pub max_kappa: f64,
    pub mean_kappa: f64,
    pub max_rel_error: f64,
    pub mean_rel_error: f64,
    /// Number of trials with relative error above [`FAILURE_THRESHOLD`].
    pub exceeded: usize,
    /// Not part of the table; means of heavy-tailed samples are unstable.
    pub median_kappa: f64,
    pub median_rel_error: f64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

impl StatsRow {
    pub fn from_trials(config: &ExperimentConfig, trials: &[TrialResult]) -> Self {
        let count = trials.len().max(1) as f64;
        let mut kappas: Vec<f64> = trials.iter().map(|t| t.kappa).collect();
        let mut errors: Vec<f64> = trials.iter().map(|t| t.rel_error).collect();
        StatsRow {
            n: config.n,
            max_cluster: config.max_cluster,
            gamma: config.gamma,
            trials: trials.len(),
            max_kappa: kappas.iter().copied().fold(0.0, f64::max),
            mean_kappa: kappas.iter().sum::<f64>() / count,
            max_rel_error: errors.iter().copied().fold(0.0, f64::max),
            mean_rel_error: errors.iter().sum::<f64>() / count,
            exceeded: trials.iter().filter(|t| t.exceeded).count(),
            median_kappa: median(&mut kappas),
            median_rel_error: median(&mut errors),
        }
    }

    /// CSV fields matching [`CSV_HEADER`], with tiny values reported as zero.
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.max_cluster.to_string(),
            self.gamma.to_string(),
            report(self.max_kappa),
            report(self.mean_kappa),
            report(self.max_rel_error),
            report(self.mean_rel_error),
            self.exceeded.to_string(),
        ]
    }
}

/// Formats a table value, replacing magnitudes below [`REPORT_FLOOR`] with `0`.
pub fn report(x: f64) -> String {
    if x.abs() < REPORT_FLOOR {
        "0".to_string()
    } else {
        format!("{x:e}")
    }
}

/// Runs all trials of `config` and aggregates them.
pub fn run_trials(config: &ExperimentConfig) -> Result<StatsRow> {
    let trials = sample_trials(config)?;
    Ok(StatsRow::from_trials(config, &trials))
}
