//! Monte Carlo harness: MSE/MedSE sweeps over a grid of neighbor counts,
//! plus desk-scale diagnostics for uniform consistency and asymptotic
//! normality of the adaptive estimator.
//!
//! Everything is deterministic given the root seed: replication r draws
//! from an independent counter-derived substream, and results are reduced
//! in replication order, so parallel scheduling cannot change a single
//! bit of the output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimator::EstimateError;
use crate::geometry::ManifoldPoint;
use crate::kernel::{Kernel, KernelScaling, KernelSpec};
use crate::models::{asymptotic_sigma_sq, DensityModel, ModelError, ModelSpec};
use crate::neighbors::{clamped_bandwidth, SampleSet};
use crate::numeric::{exact_sum, standard_normal_cdf};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("estimates and truths must have equal nonzero length ({estimates} vs {truths})")]
    LengthMismatch { estimates: usize, truths: usize },
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("neighbor rule violates H3 on the ladder: {0}")]
    KRuleViolatesH3(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("output error: {0}")]
    Output(#[from] crate::data_io::DataIoError),
}

/// Independent pseudo-random substream for one replication: one root
/// seed, one counter-derived stream per replication index.
pub fn substream(root_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(index);
    rng
}

/// Whether the estimator evaluated at a sample point includes that point
/// in its own sample (`PlugIn`) or excludes it (`LeaveOneOut`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationMode {
    #[default]
    PlugIn,
    LeaveOneOut,
}

/// Full description of one MSE/MedSE sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub n: usize,
    pub replications: usize,
    pub k_grid: Vec<usize>,
    pub kernel: KernelSpec,
    pub scaling: KernelScaling,
    pub mode: EvaluationMode,
    pub root_seed: u64,
}

/// Mean of squared pointwise errors.
pub fn mse(estimates: &[f64], truths: &[f64]) -> Result<f64, ExperimentError> {
    check_lengths(estimates, truths)?;
    let sq: Vec<f64> = estimates
        .iter()
        .zip(truths)
        .map(|(e, t)| (e - t) * (e - t))
        .collect();
    Ok(exact_sum(&sq) / sq.len() as f64)
}

/// Median of squared pointwise errors; the mean of the two central order
/// statistics for even lengths.
pub fn medse(estimates: &[f64], truths: &[f64]) -> Result<f64, ExperimentError> {
    check_lengths(estimates, truths)?;
    let mut sq: Vec<f64> = estimates
        .iter()
        .zip(truths)
        .map(|(e, t)| (e - t) * (e - t))
        .collect();
    sq.sort_by(f64::total_cmp);
    let n = sq.len();
    Ok(if n % 2 == 1 {
        sq[n / 2]
    } else {
        0.5 * (sq[n / 2 - 1] + sq[n / 2])
    })
}

/// Largest absolute pointwise error.
pub fn sup_error(estimates: &[f64], truths: &[f64]) -> Result<f64, ExperimentError> {
    check_lengths(estimates, truths)?;
    Ok(estimates
        .iter()
        .zip(truths)
        .map(|(e, t)| (e - t).abs())
        .fold(0.0, f64::max))
}

fn check_lengths(estimates: &[f64], truths: &[f64]) -> Result<(), ExperimentError> {
    if estimates.len() != truths.len() || estimates.is_empty() {
        return Err(ExperimentError::LengthMismatch {
            estimates: estimates.len(),
            truths: truths.len(),
        });
    }
    Ok(())
}

/// One (k, replication) cell of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub k: usize,
    pub replication: usize,
    pub mse: f64,
    pub medse: f64,
}

/// Per-k aggregates over the non-degenerate replications.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KAggregate {
    pub k: usize,
    pub replications_used: usize,
    pub degenerate_count: usize,
    pub mean_mse: f64,
    pub median_mse: f64,
    pub sd_mse: Option<f64>,
    pub mean_medse: f64,
    pub median_medse: f64,
    pub sd_medse: Option<f64>,
}

/// Result of [`run_sweep`]: raw per-cell errors plus per-k aggregates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    /// FNV-1a hash of the canonical JSON encoding of the config.
    pub config_hash: String,
    /// Cells ordered by (k, replication); degenerate-bandwidth cells are
    /// omitted here and counted in the aggregates.
    pub cells: Vec<SweepCell>,
    pub per_k: Vec<KAggregate>,
    pub degenerate_cells: usize,
}

impl SweepResult {
    /// CSV rendering with columns `k,replication,mse,medse`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("k,replication,mse,medse\n");
        for c in &self.cells {
            out.push_str(&format!("{},{},{},{}\n", c.k, c.replication, c.mse, c.medse));
        }
        out
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<(), ExperimentError> {
        crate::data_io::write_atomic(path, self.to_csv_string().as_bytes())?;
        Ok(())
    }

    /// JSON summary: config echo, seed, per-k aggregates, degeneracy count.
    pub fn summary_json(&self) -> String {
        #[derive(Serialize)]
        struct Summary<'a> {
            config: &'a ExperimentConfig,
            config_hash: &'a str,
            seed: u64,
            degenerate_cells: usize,
            per_k: &'a [KAggregate],
        }
        serde_json::to_string_pretty(&Summary {
            config: &self.config,
            config_hash: &self.config_hash,
            seed: self.config.root_seed,
            degenerate_cells: self.degenerate_cells,
            per_k: &self.per_k,
        })
        .expect("summary serialization cannot fail")
    }

    pub fn write_summary_json(&self, path: &std::path::Path) -> Result<(), ExperimentError> {
        crate::data_io::write_atomic(path, self.summary_json().as_bytes())?;
        Ok(())
    }
}

/// Runs the full sweep: for every replication, draw a sample of size n
/// from the model, and for every k in the grid evaluate the adaptive
/// estimator at the sample points and record MSE/MedSE against the model
/// truth. Replications with a degenerate bandwidth at some sample point
/// are excluded per (k, replication) with a reported count.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult, ExperimentError> {
    validate_config(config)?;
    let model = config.model.build()?;
    let dim = model.manifold().dim();
    let kernel = config.kernel.build().resolve(config.scaling, dim);

    let per_rep: Vec<Vec<Option<(f64, f64)>>> = (0..config.replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = substream(config.root_seed, rep as u64);
            let sample = model.sample(&mut rng, config.n);
            let rows = sorted_distance_rows(&sample);
            let truths: Vec<f64> = sample.points().iter().map(|p| model.density(p)).collect();
            config
                .k_grid
                .iter()
                .map(|&k| evaluate_cell(&sample, &rows, &truths, k, config.mode, &kernel))
                .collect()
        })
        .collect();

    let mut cells = Vec::new();
    let mut per_k = Vec::new();
    let mut degenerate_cells = 0usize;
    for (ki, &k) in config.k_grid.iter().enumerate() {
        let mut mses = Vec::new();
        let mut medses = Vec::new();
        let mut degenerate = 0usize;
        for (rep, row) in per_rep.iter().enumerate() {
            match row[ki] {
                Some((m, md)) => {
                    cells.push(SweepCell { k, replication: rep, mse: m, medse: md });
                    mses.push(m);
                    medses.push(md);
                }
                None => degenerate += 1,
            }
        }
        degenerate_cells += degenerate;
        per_k.push(aggregate(k, &mses, &medses, degenerate));
    }

    Ok(SweepResult {
        config_hash: config_hash(config),
        config: config.clone(),
        cells,
        per_k,
        degenerate_cells,
    })
}

fn validate_config(config: &ExperimentConfig) -> Result<(), ExperimentError> {
    if config.replications == 0 {
        return Err(ExperimentError::InvalidConfig("replications must be >= 1".into()));
    }
    if config.k_grid.is_empty() {
        return Err(ExperimentError::InvalidConfig("k grid must be nonempty".into()));
    }
    let max_k = *config.k_grid.iter().max().unwrap();
    let min_k = *config.k_grid.iter().min().unwrap();
    if min_k == 0 || max_k >= config.n {
        return Err(ExperimentError::InvalidConfig(format!(
            "k grid must satisfy 1 <= k < n, got k in [{min_k}, {max_k}] with n = {}",
            config.n
        )));
    }
    Ok(())
}

/// Per-point rows of (distance, volume density, sample index), sorted by
/// distance. θ is only stored for pairs below the injectivity radius; the
/// sentinel NaN beyond it is never read because the kernel vanishes there.
fn sorted_distance_rows(sample: &SampleSet) -> Vec<Vec<(f64, f64, u32)>> {
    let manifold = sample.manifold();
    let points = sample.points();
    let inj = manifold.injectivity_radius();
    points
        .par_iter()
        .map(|p| {
            let mut row: Vec<(f64, f64, u32)> = points
                .iter()
                .enumerate()
                .map(|(j, x)| {
                    let d = manifold.distance(p, x).expect("sample points share the manifold");
                    let theta = if d < inj {
                        manifold
                            .volume_density(x, p)
                            .expect("distance is below the injectivity radius")
                    } else {
                        f64::NAN
                    };
                    (d, theta, j as u32)
                })
                .collect();
            row.sort_by(|a, b| a.0.total_cmp(&b.0));
            row
        })
        .collect()
}

/// MSE/MedSE of the adaptive estimator over the sample points for one k,
/// or None if any evaluation point has a degenerate (zero) bandwidth.
fn evaluate_cell(
    sample: &SampleSet,
    rows: &[Vec<(f64, f64, u32)>],
    truths: &[f64],
    k: usize,
    mode: EvaluationMode,
    kernel: &Kernel,
) -> Option<(f64, f64)> {
    let manifold = sample.manifold();
    let d = manifold.dim() as i32;
    let n = sample.len();
    let mut estimates = Vec::with_capacity(n);
    for row in rows {
        // Under leave-one-out the self entry (distance zero, θ = 1) is
        // removed; any zero-distance entry is value-equivalent to it.
        let skip = match mode {
            EvaluationMode::PlugIn => 0,
            EvaluationMode::LeaveOneOut => {
                debug_assert_eq!(row[0].0, 0.0);
                1
            }
        };
        let entries = &row[skip..];
        let n_eff = n - skip;
        let zeta = clamped_bandwidth(entries[k - 1].0, manifold);
        if zeta == 0.0 {
            return None;
        }
        let mut terms = Vec::new();
        for &(dist, theta, _) in entries {
            if dist > zeta {
                break;
            }
            let weight = kernel.evaluate(dist / zeta);
            if weight != 0.0 {
                terms.push(weight / theta);
            }
        }
        estimates.push(exact_sum(&terms) / (n_eff as f64 * zeta.powi(d)));
    }
    let m = mse(&estimates, truths).expect("lengths match by construction");
    let md = medse(&estimates, truths).expect("lengths match by construction");
    Some((m, md))
}

fn aggregate(k: usize, mses: &[f64], medses: &[f64], degenerate: usize) -> KAggregate {
    KAggregate {
        k,
        replications_used: mses.len(),
        degenerate_count: degenerate,
        mean_mse: mean(mses),
        median_mse: median(mses),
        sd_mse: sample_sd(mses),
        mean_medse: mean(medses),
        median_medse: median(medses),
        sd_medse: sample_sd(medses),
    }
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    exact_sum(xs) / xs.len() as f64
}

fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn sample_sd(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    Some((exact_sum(&sq) / (xs.len() - 1) as f64).sqrt())
}

/// FNV-1a over the canonical JSON encoding; stable across platforms.
fn config_hash(config: &ExperimentConfig) -> String {
    let encoded = serde_json::to_string(config).expect("config serialization cannot fail");
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in encoded.as_bytes() {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{hash:016x}")
}

/// The equidistant neighbor grid: `len` integers from `lo` to `hi`
/// inclusive, rounded to the nearest integer, duplicates removed.
pub fn equidistant_k_grid(lo: usize, hi: usize, len: usize) -> Vec<usize> {
    assert!(len >= 2 && hi > lo);
    let step = (hi - lo) as f64 / (len - 1) as f64;
    let mut grid: Vec<usize> = (0..len)
        .map(|i| (lo as f64 + step * i as f64).round() as usize)
        .collect();
    grid.dedup();
    grid
}

/// Roughly equal-area grid over the spherical cap {x : ⟨x, mu⟩ >= min_dot}
/// on the unit sphere, with about `target_size` points.
pub fn spherical_cap_grid(mu: [f64; 3], min_dot: f64, target_size: usize) -> Vec<ManifoldPoint> {
    use crate::numeric::{mat_apply, rotation_from_z};
    assert!((-1.0..1.0).contains(&min_dot));
    let n_w = ((target_size as f64 / 2.0).sqrt().round() as usize).max(1);
    let n_psi = target_size.div_ceil(n_w).max(1);
    let rot = rotation_from_z(mu);
    let mut grid = Vec::with_capacity(n_w * n_psi);
    for i in 0..n_w {
        let w = min_dot + (i as f64 + 0.5) * (1.0 - min_dot) / n_w as f64;
        let r = (1.0 - w * w).sqrt();
        for j in 0..n_psi {
            let psi = (j as f64 + 0.5) * 2.0 * std::f64::consts::PI / n_psi as f64;
            let local = [r * psi.cos(), r * psi.sin(), w];
            grid.push(ManifoldPoint::new(mat_apply(&rot, local).to_vec()));
        }
    }
    grid
}

/// Mean sup-error of the adaptive estimator at one ladder step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsistencyStep {
    pub n: usize,
    pub k: usize,
    pub mean_sup_error: f64,
}

/// Desk-scale echo of uniform almost-sure consistency: for each sample
/// size in the ladder, the sup of |f̂_n − f| over a fixed evaluation grid
/// (covering a compact set on which the density is bounded away from
/// zero), averaged over replications.
///
/// The neighbor rule must satisfy the usual growth conditions along the
/// ladder — k(n)/log n increasing, k(n)/n decreasing, 1 <= k(n) <= n —
/// which this function checks up front.
#[allow(clippy::too_many_arguments)]
pub fn consistency_check(
    model: &dyn DensityModel,
    grid: &[ManifoldPoint],
    ladder: &[usize],
    k_rule: &dyn Fn(usize) -> usize,
    replications: usize,
    kernel: &Kernel,
    scaling: KernelScaling,
    root_seed: u64,
) -> Result<Vec<ConsistencyStep>, ExperimentError> {
    if grid.is_empty() || ladder.is_empty() || replications == 0 {
        return Err(ExperimentError::InvalidConfig(
            "consistency check needs a nonempty grid, ladder, and replications >= 1".into(),
        ));
    }
    validate_k_rule(ladder, k_rule)?;
    let dim = model.manifold().dim();
    let resolved = kernel.resolve(scaling, dim);
    let truths: Vec<f64> = grid.iter().map(|p| model.density(p)).collect();

    let mut steps = Vec::with_capacity(ladder.len());
    for (step_idx, &n) in ladder.iter().enumerate() {
        let k = k_rule(n);
        let sup_errors: Vec<f64> = (0..replications)
            .into_par_iter()
            .map(|rep| {
                let mut rng =
                    substream(root_seed, (step_idx * replications + rep) as u64);
                let sample = model.sample(&mut rng, n);
                let estimates: Vec<f64> = grid
                    .iter()
                    .map(|p| {
                        crate::estimator::knn_kernel_estimate_resolved(&sample, p, k, &resolved)
                            .map(|e| e.value)
                    })
                    .collect::<Result<_, _>>()?;
                sup_error(&estimates, &truths)
            })
            .collect::<Result<_, _>>()?;
        steps.push(ConsistencyStep { n, k, mean_sup_error: mean(&sup_errors) });
    }
    Ok(steps)
}

fn validate_k_rule(ladder: &[usize], k_rule: &dyn Fn(usize) -> usize) -> Result<(), ExperimentError> {
    for &n in ladder {
        let k = k_rule(n);
        if k < 1 || k > n {
            return Err(ExperimentError::KRuleViolatesH3(format!(
                "k({n}) = {k} is outside [1, n]"
            )));
        }
    }
    for pair in ladder.windows(2) {
        let (n1, n2) = (pair[0], pair[1]);
        if n2 <= n1 {
            return Err(ExperimentError::KRuleViolatesH3(
                "ladder must be strictly increasing".into(),
            ));
        }
        let (k1, k2) = (k_rule(n1) as f64, k_rule(n2) as f64);
        if k2 / (n2 as f64).ln() <= k1 / (n1 as f64).ln() {
            return Err(ExperimentError::KRuleViolatesH3(format!(
                "k(n)/log n must increase along the ladder (n = {n1} -> {n2})"
            )));
        }
        if k2 / n2 as f64 >= k1 / n1 as f64 {
            return Err(ExperimentError::KRuleViolatesH3(format!(
                "k(n)/n must decrease along the ladder (n = {n1} -> {n2})"
            )));
        }
    }
    Ok(())
}

/// Distribution summary of the standardized statistic
/// √k (f̂_n(p) − f(p)) / σ(p) over replications.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalityReport {
    pub n: usize,
    pub k: usize,
    pub replications: usize,
    pub truth: f64,
    pub sigma: f64,
    pub mean: f64,
    pub sd: Option<f64>,
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    /// Kolmogorov–Smirnov distance to the standard normal.
    pub ks_statistic: f64,
    pub standardized: Vec<f64>,
}

/// Monte Carlo check of the limiting normal law of the adaptive
/// estimator, in the regime where the asymptotic bias vanishes (k growing
/// slower than n^{4/(d+4)}).
#[allow(clippy::too_many_arguments)]
pub fn normality_diagnostic(
    model: &dyn DensityModel,
    p: &ManifoldPoint,
    n: usize,
    k: usize,
    replications: usize,
    kernel: &Kernel,
    scaling: KernelScaling,
    root_seed: u64,
) -> Result<NormalityReport, ExperimentError> {
    if replications == 0 || k < 1 || k > n {
        return Err(ExperimentError::InvalidConfig(
            "normality diagnostic needs replications >= 1 and 1 <= k <= n".into(),
        ));
    }
    let truth = model.density(p);
    let sigma = asymptotic_sigma_sq(model, p, kernel, scaling)?.sqrt();
    let dim = model.manifold().dim();
    let resolved = kernel.resolve(scaling, dim);
    let sqrt_k = (k as f64).sqrt();

    let standardized: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = substream(root_seed, rep as u64);
            let sample = model.sample(&mut rng, n);
            crate::estimator::knn_kernel_estimate_resolved(&sample, p, k, &resolved)
                .map(|e| sqrt_k * (e.value - truth) / sigma)
        })
        .collect::<Result<_, _>>()?;

    let m = mean(&standardized);
    let sd = sample_sd(&standardized);
    let (skewness, excess_kurtosis) = higher_moments(&standardized);
    Ok(NormalityReport {
        n,
        k,
        replications,
        truth,
        sigma,
        mean: m,
        sd,
        skewness,
        excess_kurtosis,
        ks_statistic: ks_statistic_standard_normal(&standardized),
        standardized,
    })
}

fn higher_moments(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.len() < 3 {
        return (None, None);
    }
    let n = xs.len() as f64;
    let m = mean(xs);
    let central = |p: i32| xs.iter().map(|x| (x - m).powi(p)).sum::<f64>() / n;
    let m2 = central(2);
    if m2 == 0.0 {
        return (None, None);
    }
    let skew = central(3) / m2.powf(1.5);
    let kurt = central(4) / (m2 * m2) - 3.0;
    (Some(skew), Some(kurt))
}

/// One-sample Kolmogorov–Smirnov statistic against N(0, 1).
pub fn ks_statistic_standard_normal(sample: &[f64]) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, z) in sorted.iter().enumerate() {
        let cdf = standard_normal_cdf(*z);
        d = d.max((i as f64 + 1.0) / n - cdf).max(cdf - i as f64 / n);
    }
    d
}
