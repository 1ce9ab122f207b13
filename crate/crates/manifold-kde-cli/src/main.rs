//! Command-line front end: pointwise/grid estimation, simulation sweeps,
//! asymptotic diagnostics, and dataset ingestion. Outputs are plot-ready
//! CSV/JSON files; every command is byte-for-byte reproducible given
//! `--seed`.
//!
//! Exit codes: 0 success, 2 argument errors, 3 data errors, 4 degenerate
//! bandwidths (count reported on stderr).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use manifold_kde::data_io::{self, write_atomic, CylinderColumns, DataIoError, SphereColumns};
use manifold_kde::estimator::{estimate_on_grid, knn_kernel_estimate, EstimateError, EstimatorConfig};
use manifold_kde::experiment::{
    consistency_check, equidistant_k_grid, normality_diagnostic, run_sweep, spherical_cap_grid,
    EvaluationMode, ExperimentConfig, ExperimentError,
};
use manifold_kde::geometry::{sphere_lat_lon_grid, Manifold, ManifoldPoint};
use manifold_kde::kernel::{KernelScaling, KernelSpec};
use manifold_kde::models::{MardiaSutton, ModelSpec};
use manifold_kde::neighbors::{NeighborError, SampleSet};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

#[derive(Parser)]
#[command(
    name = "manifold-kde",
    version,
    about = "k-nearest-neighbor kernel density estimation on Riemannian manifolds",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the density of a dataset on a grid and export it.
    Estimate(EstimateArgs),
    /// Monte Carlo replications of one model at a single neighbor count.
    Simulate(SimulateArgs),
    /// MSE/MedSE sweep over a grid of neighbor counts.
    Sweep(SweepArgs),
    /// Asymptotic diagnostics (uniform consistency, limiting normality).
    #[command(subcommand)]
    Diagnose(DiagnoseCommand),
    /// Convert a raw CSV dataset into manifold coordinates.
    Ingest(IngestArgs),
}

#[derive(Debug)]
enum CliError {
    Args(String),
    Data(String),
    Degenerate { count: usize },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Args(_) => 2,
            CliError::Data(_) => 3,
            CliError::Degenerate { .. } => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Args(msg) | CliError::Data(msg) => write!(f, "{msg}"),
            CliError::Degenerate { count } => {
                write!(f, "degenerate bandwidth at {count} evaluation point(s)")
            }
        }
    }
}

fn data_err(e: DataIoError) -> CliError {
    CliError::Data(e.to_string())
}

fn estimate_err(e: EstimateError) -> CliError {
    match e {
        EstimateError::DegenerateBandwidth { .. } => CliError::Degenerate { count: 1 },
        EstimateError::Grid { source, .. } => estimate_err(*source),
        EstimateError::Neighbors(NeighborError::InvalidK { k, n }) => {
            CliError::Args(format!("k must satisfy 1 <= k < n, got k = {k} with n = {n}"))
        }
        other => CliError::Args(other.to_string()),
    }
}

fn experiment_err(e: ExperimentError) -> CliError {
    match e {
        ExperimentError::Estimate(inner) => estimate_err(inner),
        ExperimentError::Output(io) => CliError::Data(io.to_string()),
        other => CliError::Args(other.to_string()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Simulate(args) => cmd_sweep_like(args.common, vec![args.k], false),
        Command::Sweep(args) => {
            let (common, k_grid) = args.resolve()?;
            cmd_sweep_like(common, k_grid, true)
        }
        Command::Diagnose(cmd) => match cmd {
            DiagnoseCommand::Consistency(args) => cmd_consistency(args),
            DiagnoseCommand::Normality(args) => cmd_normality(args),
        },
        Command::Ingest(args) => cmd_ingest(args),
    }
}

// ---------------------------------------------------------------------
// Shared flag types
// ---------------------------------------------------------------------

/// `euclidean:<d>`, `sphere:<R>`, or `cylinder`.
#[derive(Debug, Clone)]
struct ManifoldArg(Manifold);

impl FromStr for ManifoldArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let manifold = if lower == "cylinder" {
            Manifold::Cylinder
        } else if let Some(d) = lower.strip_prefix("euclidean:") {
            let dim: usize = d.parse().map_err(|_| format!("invalid dimension {d:?}"))?;
            Manifold::euclidean(dim).map_err(|e| e.to_string())?
        } else if let Some(r) = lower.strip_prefix("sphere:") {
            let radius: f64 = r.parse().map_err(|_| format!("invalid radius {r:?}"))?;
            Manifold::sphere(radius).map_err(|e| e.to_string())?
        } else {
            return Err(format!(
                "unknown manifold {s:?}; expected euclidean:<d>, sphere:<R>, or cylinder"
            ));
        };
        Ok(ManifoldArg(manifold))
    }
}

/// `lat-lon:<NxM>` (sphere only) or `file:<path>`.
#[derive(Debug, Clone)]
enum GridArg {
    LatLon { n_lat: usize, n_lon: usize },
    File(PathBuf),
}

impl FromStr for GridArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(dims) = s.strip_prefix("lat-lon:") {
            let (a, b) = dims
                .split_once(['x', 'X'])
                .ok_or_else(|| format!("expected lat-lon:<N>x<M>, got {s:?}"))?;
            let n_lat = a.parse().map_err(|_| format!("invalid grid size {a:?}"))?;
            let n_lon = b.parse().map_err(|_| format!("invalid grid size {b:?}"))?;
            if n_lat == 0 || n_lon == 0 {
                return Err("grid sizes must be positive".into());
            }
            Ok(GridArg::LatLon { n_lat, n_lon })
        } else if let Some(path) = s.strip_prefix("file:") {
            Ok(GridArg::File(PathBuf::from(path)))
        } else {
            Err(format!("unknown grid spec {s:?}; expected lat-lon:<N>x<M> or file:<path>"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScalingArg {
    /// Use the kernel profile exactly as written (matches the published
    /// simulation protocol; not a unit-mass kernel for d > 1).
    Paper,
    /// Rescale the kernel to unit mass in dimension d (default).
    Normalized,
}

impl From<ScalingArg> for KernelScaling {
    fn from(s: ScalingArg) -> Self {
        match s {
            ScalingArg::Paper => KernelScaling::PaperFaithful,
            ScalingArg::Normalized => KernelScaling::Normalized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Quadratic,
}

impl From<KernelArg> for KernelSpec {
    fn from(_: KernelArg) -> Self {
        KernelSpec::Quadratic
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Evaluate at sample points with the full sample (plug-in).
    Plugin,
    /// Exclude the evaluation point from its own estimate.
    Loo,
}

impl From<ModeArg> for EvaluationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Plugin => EvaluationMode::PlugIn,
            ModeArg::Loo => EvaluationMode::LeaveOneOut,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    /// Von Mises–Fisher on the unit sphere.
    Vmf,
    /// Uniform distribution on the unit sphere.
    UniformSphere,
    /// Mardia–Sutton cylinder distribution.
    MardiaSutton,
}

fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got {s:?}"));
    }
    let mut out = [0.0; 3];
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = p.trim().parse().map_err(|_| format!("invalid number {p:?}"))?;
    }
    Ok(out)
}

fn build_model(model: ModelArg, mu: [f64; 3], kappa: Option<f64>) -> ModelSpec {
    match model {
        ModelArg::Vmf => ModelSpec::VonMisesFisher { mu, kappa: kappa.unwrap_or(3.0) },
        ModelArg::UniformSphere => ModelSpec::UniformSphere,
        ModelArg::MardiaSutton => ModelSpec::MardiaSutton {
            mean_angle: std::f64::consts::PI,
            kappa: kappa.unwrap_or(5.0),
            a: 1.0,
            b: 2.0 * 5.0f64.sqrt(),
            sigma: 1.0,
        },
    }
}

// ---------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------

#[derive(Args)]
struct EstimateArgs {
    /// Input dataset (CSV; lon/lat for spheres, direction/temperature for
    /// the cylinder, x1..xd for euclidean space).
    #[arg(long)]
    input: PathBuf,
    /// Manifold: euclidean:<d>, sphere:<R>, or cylinder.
    #[arg(long)]
    manifold: ManifoldArg,
    /// Number of nearest neighbors (must be < n).
    #[arg(long)]
    k: usize,
    /// Kernel profile.
    #[arg(long, value_enum, default_value_t = KernelArg::Quadratic)]
    kernel: KernelArg,
    /// Kernel scaling.
    #[arg(long, value_enum, default_value_t = ScalingArg::Normalized)]
    scaling: ScalingArg,
    /// Evaluation grid: lat-lon:<N>x<M> (sphere) or file:<path>.
    #[arg(long)]
    grid: GridArg,
    /// Output file.
    #[arg(long)]
    output: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Longitude column name for sphere CSVs.
    #[arg(long, default_value = "longitude")]
    lon_col: String,
    /// Latitude column name for sphere CSVs.
    #[arg(long, default_value = "latitude")]
    lat_col: String,
    /// Direction column name for cylinder CSVs.
    #[arg(long, default_value = "direction")]
    dir_col: String,
    /// Axial (temperature) column name for cylinder CSVs.
    #[arg(long, default_value = "temperature")]
    temp_col: String,
    /// Standardize the axial component of cylinder data.
    #[arg(long)]
    scale_axial: bool,
    /// Accepted for interface uniformity; estimation has no random step.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), CliError> {
    let manifold = args.manifold.0.clone();
    let sample = load_sample(&manifold, &args.input, &args, true)?;
    if args.k < 1 || args.k >= sample.len() {
        return Err(CliError::Args(format!(
            "k must satisfy 1 <= k < n, got k = {} with n = {}",
            args.k,
            sample.len()
        )));
    }
    let grid = load_grid(&manifold, &args)?;
    let config = EstimatorConfig::new(args.k, KernelSpec::from(args.kernel).build(), args.scaling.into());
    let estimates = match estimate_on_grid(&sample, &grid, &config) {
        Ok(estimates) => estimates,
        Err(EstimateError::Grid { source, .. })
            if matches!(*source, EstimateError::DegenerateBandwidth { .. }) =>
        {
            let count = grid
                .iter()
                .filter(|p| {
                    matches!(
                        knn_kernel_estimate(&sample, p, &config),
                        Err(EstimateError::DegenerateBandwidth { .. })
                    )
                })
                .count();
            return Err(CliError::Degenerate { count });
        }
        Err(other) => return Err(estimate_err(other)),
    };
    let format = match args.format {
        FormatArg::Csv => data_io::ExportFormat::Csv,
        FormatArg::Json => data_io::ExportFormat::Json,
    };
    data_io::export_grid(&manifold, &grid, &estimates, format, &args.output).map_err(data_err)?;
    println!(
        "wrote {} ({} grid points, n = {}, k = {})",
        args.output.display(),
        grid.len(),
        sample.len(),
        args.k
    );
    Ok(())
}

fn load_sample(
    manifold: &Manifold,
    path: &Path,
    args: &EstimateArgs,
    report_rejects: bool,
) -> Result<SampleSet, CliError> {
    let sample = match manifold {
        Manifold::Sphere { radius } => {
            if (radius - 1.0).abs() > 1e-12 {
                return Err(CliError::Args(
                    "longitude/latitude ingestion is defined on sphere:1".into(),
                ));
            }
            let cols = SphereColumns { longitude: args.lon_col.clone(), latitude: args.lat_col.clone() };
            let ingest = data_io::read_directional_csv(path, &cols).map_err(data_err)?;
            report_rejected(&ingest.rejected, report_rejects);
            data_io::directional_to_sample(&ingest.records).map_err(data_err)?
        }
        Manifold::Cylinder => {
            let cols = CylinderColumns { direction: args.dir_col.clone(), temperature: args.temp_col.clone() };
            let ingest = data_io::read_cylinder_csv(path, &cols).map_err(data_err)?;
            report_rejected(&ingest.rejected, report_rejects);
            data_io::cylinder_to_sample(&ingest.records, args.scale_axial).map_err(data_err)?
        }
        Manifold::Euclidean { dim } => {
            let ingest = data_io::read_euclidean_csv(path, *dim).map_err(data_err)?;
            report_rejected(&ingest.rejected, report_rejects);
            let points = ingest.records.into_iter().map(ManifoldPoint::new).collect();
            SampleSet::new(manifold.clone(), points)
                .map_err(|e| CliError::Data(e.to_string()))?
        }
    };
    Ok(sample)
}

fn report_rejected(rejected: &[data_io::RejectedRow], enabled: bool) {
    if enabled && !rejected.is_empty() {
        eprintln!("rejected {} row(s):", rejected.len());
        for r in rejected {
            eprintln!("  line {}: {}", r.line, r.reason);
        }
    }
}

fn load_grid(manifold: &Manifold, args: &EstimateArgs) -> Result<Vec<ManifoldPoint>, CliError> {
    match &args.grid {
        GridArg::LatLon { n_lat, n_lon } => match manifold {
            Manifold::Sphere { radius } => Ok(sphere_lat_lon_grid(*radius, *n_lat, *n_lon)
                .into_iter()
                .map(|(p, _)| p)
                .collect()),
            _ => Err(CliError::Args("lat-lon grids are only defined on spheres".into())),
        },
        GridArg::File(path) => {
            let sample = load_sample(manifold, path, args, false)?;
            Ok(sample.points().to_vec())
        }
    }
}

// ---------------------------------------------------------------------
// simulate / sweep
// ---------------------------------------------------------------------

#[derive(Args)]
struct CommonSweepArgs {
    /// Generative model.
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Mean direction for the von Mises–Fisher model.
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,1")]
    mu: [f64; 3],
    /// Concentration parameter (vmf default 3, mardia-sutton default 5).
    #[arg(long)]
    kappa: Option<f64>,
    /// Sample size per replication.
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Number of replications.
    #[arg(long, default_value_t = 200)]
    reps: usize,
    /// Kernel profile.
    #[arg(long, value_enum, default_value_t = KernelArg::Quadratic)]
    kernel: KernelArg,
    /// Kernel scaling.
    #[arg(long, value_enum, default_value_t = ScalingArg::Normalized)]
    scaling: ScalingArg,
    /// Evaluation mode at sample points.
    #[arg(long, value_enum, default_value_t = ModeArg::Plugin)]
    mode: ModeArg,
    /// Root seed; replication r uses substream r.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output stem; writes <stem>.csv and <stem>.json.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonSweepArgs,
    /// Neighbor count.
    #[arg(long)]
    k: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonSweepArgs,
    /// Neighbor grid: "lo:hi:len" (equidistant) or a comma list "5,13,20".
    #[arg(long, default_value = "5:150:20")]
    k_grid: String,
    /// Preset for the published simulation protocol: n = 200, quadratic
    /// kernel with paper scaling, plug-in evaluation, k equidistant from
    /// 5 to 150 with 20 values. Explicit flags still override reps/seed.
    #[arg(long)]
    paper_s5: bool,
}

impl SweepArgs {
    fn resolve(mut self) -> Result<(CommonSweepArgs, Vec<usize>), CliError> {
        if self.paper_s5 {
            self.common.n = 200;
            self.common.kernel = KernelArg::Quadratic;
            self.common.scaling = ScalingArg::Paper;
            self.common.mode = ModeArg::Plugin;
            self.k_grid = "5:150:20".into();
        }
        let k_grid = parse_k_grid(&self.k_grid)?;
        Ok((self.common, k_grid))
    }
}

fn parse_k_grid(s: &str) -> Result<Vec<usize>, CliError> {
    let parse = |v: &str| -> Result<usize, CliError> {
        v.trim()
            .parse()
            .map_err(|_| CliError::Args(format!("invalid neighbor count {v:?}")))
    };
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::Args(format!("expected lo:hi:len, got {s:?}")));
        }
        let (lo, hi, len) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if len < 2 || hi <= lo || lo == 0 {
            return Err(CliError::Args("k grid needs 0 < lo < hi and len >= 2".into()));
        }
        Ok(equidistant_k_grid(lo, hi, len))
    } else {
        s.split(',').map(parse).collect()
    }
}

fn cmd_sweep_like(common: CommonSweepArgs, k_grid: Vec<usize>, print_per_k: bool) -> Result<(), CliError> {
    let config = ExperimentConfig {
        model: build_model(common.model, common.mu, common.kappa),
        n: common.n,
        replications: common.reps,
        k_grid,
        kernel: common.kernel.into(),
        scaling: common.scaling.into(),
        mode: common.mode.into(),
        root_seed: common.seed,
    };
    let result = run_sweep(&config).map_err(experiment_err)?;
    let csv_path = common.output.with_extension("csv");
    let json_path = common.output.with_extension("json");
    result.write_csv(&csv_path).map_err(experiment_err)?;
    result.write_summary_json(&json_path).map_err(experiment_err)?;
    if result.degenerate_cells > 0 {
        eprintln!("excluded {} degenerate (k, replication) cell(s)", result.degenerate_cells);
    }
    if print_per_k {
        for agg in &result.per_k {
            println!("k = {:>4}: mean MSE = {:.6e}, mean MedSE = {:.6e}", agg.k, agg.mean_mse, agg.mean_medse);
        }
    }
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(())
}

// ---------------------------------------------------------------------
// diagnose
// ---------------------------------------------------------------------

#[derive(Subcommand)]
enum DiagnoseCommand {
    /// Sup-error of the estimator over a fixed grid for a ladder of
    /// sample sizes; the mean sup-error should shrink as n grows when k(n)
    /// grows faster than log n but slower than n.
    Consistency(ConsistencyArgs),
    /// Distribution of the standardized estimator against its limiting
    /// normal law.
    Normality(NormalityArgs),
}

#[derive(Args)]
struct ConsistencyArgs {
    /// Sphere model to check (vmf or uniform-sphere).
    #[arg(long, value_enum, default_value_t = ModelArg::Vmf)]
    model: ModelArg,
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,1")]
    mu: [f64; 3],
    #[arg(long)]
    kappa: Option<f64>,
    /// Evaluation region: spherical cap {x : <x, mu> >= cap-min-dot},
    /// compact and bounded away from zero density.
    #[arg(long, default_value_t = -0.5)]
    cap_min_dot: f64,
    /// Sample-size ladder, comma separated, strictly increasing.
    #[arg(long, default_value = "250,1000,4000")]
    ladder: String,
    /// Neighbor rule k(n) = ceil(n^gamma). Needs 0 < gamma < 1 so that
    /// k/log n grows and k/n shrinks along the ladder.
    #[arg(long, default_value_t = 0.7)]
    gamma: f64,
    /// Approximate number of grid points covering the cap.
    #[arg(long, default_value_t = 400)]
    grid_size: usize,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, value_enum, default_value_t = KernelArg::Quadratic)]
    kernel: KernelArg,
    #[arg(long, value_enum, default_value_t = ScalingArg::Normalized)]
    scaling: ScalingArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// JSON report path.
    #[arg(long)]
    output: PathBuf,
}

fn cmd_consistency(args: ConsistencyArgs) -> Result<(), CliError> {
    let spec = build_model(args.model, args.mu, args.kappa);
    if matches!(spec, ModelSpec::MardiaSutton { .. }) {
        return Err(CliError::Args(
            "the consistency diagnostic evaluates over a spherical cap; use a sphere model".into(),
        ));
    }
    if !(0.0 < args.gamma && args.gamma < 1.0) {
        return Err(CliError::Args(format!(
            "gamma = {} is invalid: k(n) = ceil(n^gamma) must grow faster than log n and slower \
             than n, which requires 0 < gamma < 1",
            args.gamma
        )));
    }
    let ladder: Vec<usize> = args
        .ladder
        .split(',')
        .map(|v| v.trim().parse().map_err(|_| CliError::Args(format!("invalid ladder entry {v:?}"))))
        .collect::<Result<_, _>>()?;
    let model = spec.build().map_err(|e| CliError::Args(e.to_string()))?;
    let grid = spherical_cap_grid(args.mu, args.cap_min_dot, args.grid_size);
    let gamma = args.gamma;
    let k_rule = move |n: usize| (n as f64).powf(gamma).ceil() as usize;
    let steps = consistency_check(
        model.as_ref(),
        &grid,
        &ladder,
        &k_rule,
        args.reps,
        &KernelSpec::from(args.kernel).build(),
        args.scaling.into(),
        args.seed,
    )
    .map_err(experiment_err)?;
    for step in &steps {
        println!(
            "n = {:>6}, k = {:>4}: mean sup-error = {:.6e}",
            step.n, step.k, step.mean_sup_error
        );
    }
    let report = serde_json::json!({
        "model": spec,
        "cap_min_dot": args.cap_min_dot,
        "gamma": args.gamma,
        "grid_points": grid.len(),
        "replications": args.reps,
        "seed": args.seed,
        "steps": steps,
    });
    write_atomic(&args.output, serde_json::to_string_pretty(&report).unwrap().as_bytes())
        .map_err(data_err)?;
    println!("wrote {}", args.output.display());
    Ok(())
}

#[derive(Args)]
struct NormalityArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::UniformSphere)]
    model: ModelArg,
    #[arg(long, value_parser = parse_vec3, default_value = "0,0,1")]
    mu: [f64; 3],
    #[arg(long)]
    kappa: Option<f64>,
    /// Sample size per replication.
    #[arg(long, default_value_t = 20000)]
    n: usize,
    /// Neighbor rule k = ceil(n^gamma). The limiting law is centered
    /// (zero asymptotic bias) only when gamma < 4/(d+4), i.e. < 2/3 for
    /// the two-dimensional manifolds here.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Evaluation point in embedding coordinates (defaults to the mean
    /// direction on spheres, the angular mode on the cylinder).
    #[arg(long, value_parser = parse_vec3)]
    point: Option<[f64; 3]>,
    #[arg(long, default_value_t = 500)]
    reps: usize,
    #[arg(long, value_enum, default_value_t = KernelArg::Quadratic)]
    kernel: KernelArg,
    #[arg(long, value_enum, default_value_t = ScalingArg::Normalized)]
    scaling: ScalingArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// JSON report path (summary plus the standardized sample).
    #[arg(long)]
    output: PathBuf,
}

fn cmd_normality(args: NormalityArgs) -> Result<(), CliError> {
    let spec = build_model(args.model, args.mu, args.kappa);
    let model = spec.build().map_err(|e| CliError::Args(e.to_string()))?;
    let d = model.manifold().dim();
    let gamma_cap = 4.0 / (d as f64 + 4.0);
    if !(0.0 < args.gamma && args.gamma < gamma_cap) {
        return Err(CliError::Args(format!(
            "gamma = {} is invalid: with k = ceil(n^gamma), the standardized estimator is \
             asymptotically standard normal (zero bias) only when sqrt(k·n^(-4/(d+4))) -> 0, \
             i.e. gamma < 4/(d+4) = {:.4} for d = {d}",
            args.gamma, gamma_cap
        )));
    }
    let k = (args.n as f64).powf(args.gamma).ceil() as usize;
    let point = match args.point {
        Some(coords) => model
            .manifold()
            .point(coords.to_vec())
            .map_err(|e| CliError::Args(e.to_string()))?,
        None => default_point(&spec),
    };
    let report = normality_diagnostic(
        model.as_ref(),
        &point,
        args.n,
        k,
        args.reps,
        &KernelSpec::from(args.kernel).build(),
        args.scaling.into(),
        args.seed,
    )
    .map_err(experiment_err)?;
    println!(
        "n = {}, k = {}, replications = {}",
        report.n, report.k, report.replications
    );
    println!(
        "mean = {:.4}, sd = {}, skewness = {}, excess kurtosis = {}",
        report.mean,
        fmt_opt(report.sd),
        fmt_opt(report.skewness),
        fmt_opt(report.excess_kurtosis),
    );
    println!("KS distance to N(0,1) = {:.4}", report.ks_statistic);
    write_atomic(
        &args.output,
        serde_json::to_string_pretty(&report).unwrap().as_bytes(),
    )
    .map_err(data_err)?;
    println!("wrote {}", args.output.display());
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "n/a".into())
}

fn default_point(spec: &ModelSpec) -> ManifoldPoint {
    match spec {
        ModelSpec::VonMisesFisher { mu, .. } => ManifoldPoint::new(mu.to_vec()),
        ModelSpec::UniformSphere => ManifoldPoint::new(vec![0.0, 0.0, 1.0]),
        ModelSpec::MardiaSutton { .. } => {
            let model = MardiaSutton::simulation_model();
            let t = model.conditional_axial_mean(std::f64::consts::PI);
            ManifoldPoint::new(vec![-1.0, 0.0, t])
        }
    }
}

// ---------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------

#[derive(Args)]
struct IngestArgs {
    /// Manifold the data lives on: sphere:1, cylinder, or euclidean:<d>.
    #[arg(long)]
    manifold: ManifoldArg,
    /// Input CSV.
    #[arg(long)]
    input: PathBuf,
    /// Output CSV of embedding coordinates (plus the original angular
    /// columns for spheres and cylinders).
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value = "longitude")]
    lon_col: String,
    #[arg(long, default_value = "latitude")]
    lat_col: String,
    #[arg(long, default_value = "direction")]
    dir_col: String,
    #[arg(long, default_value = "temperature")]
    temp_col: String,
    /// Perturb repeated directions (cylinder data) by r + ξε with ε from
    /// a circular von Mises distribution.
    #[arg(long)]
    jitter: bool,
    /// Perturbation scale ξ; defaults to n^(-1/5).
    #[arg(long)]
    xi: Option<f64>,
    /// Concentration of the jitter distribution.
    #[arg(long, default_value_t = 1.0)]
    jitter_kappa: f64,
    /// Standardize the axial component of cylinder data.
    #[arg(long)]
    scale_axial: bool,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn cmd_ingest(args: IngestArgs) -> Result<(), CliError> {
    let manifold = args.manifold.0.clone();
    let mut out = String::new();
    let (accepted, rejected) = match &manifold {
        Manifold::Sphere { radius } => {
            if (radius - 1.0).abs() > 1e-12 {
                return Err(CliError::Args(
                    "longitude/latitude ingestion is defined on sphere:1".into(),
                ));
            }
            let cols = SphereColumns { longitude: args.lon_col.clone(), latitude: args.lat_col.clone() };
            let ingest = data_io::read_directional_csv(&args.input, &cols).map_err(data_err)?;
            let sample = data_io::directional_to_sample(&ingest.records).map_err(data_err)?;
            out.push_str("x,y,z,longitude,latitude\n");
            for (p, r) in sample.points().iter().zip(&ingest.records) {
                let c = p.coords();
                out.push_str(&format!("{},{},{},{},{}\n", c[0], c[1], c[2], r.longitude, r.latitude));
            }
            (ingest.records.len(), ingest.rejected)
        }
        Manifold::Cylinder => {
            let cols = CylinderColumns { direction: args.dir_col.clone(), temperature: args.temp_col.clone() };
            let ingest = data_io::read_cylinder_csv(&args.input, &cols).map_err(data_err)?;
            let records = if args.jitter {
                let xi = args.xi.unwrap_or_else(|| data_io::default_jitter_scale(ingest.records.len()));
                let mut rng = manifold_kde::experiment::substream(args.seed, 0);
                data_io::jitter_repeated_angles(&ingest.records, &mut rng, xi, args.jitter_kappa)
            } else {
                ingest.records.clone()
            };
            let sample = data_io::cylinder_to_sample(&records, args.scale_axial).map_err(data_err)?;
            out.push_str("x,y,z,direction,temperature\n");
            for (p, r) in sample.points().iter().zip(&records) {
                let c = p.coords();
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    c[0], c[1], c[2], r.wind_direction, r.temperature
                ));
            }
            (records.len(), ingest.rejected)
        }
        Manifold::Euclidean { dim } => {
            let ingest = data_io::read_euclidean_csv(&args.input, *dim).map_err(data_err)?;
            let headers: Vec<String> = (1..=*dim).map(|i| format!("x{i}")).collect();
            out.push_str(&headers.join(","));
            out.push('\n');
            for row in &ingest.records {
                let fields: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                out.push_str(&fields.join(","));
                out.push('\n');
            }
            (ingest.records.len(), ingest.rejected)
        }
    };
    report_rejected(&rejected, true);
    write_atomic(&args.output, out.as_bytes()).map_err(data_err)?;
    println!(
        "wrote {} ({} accepted, {} rejected)",
        args.output.display(),
        accepted,
        rejected.len()
    );
    Ok(())
}
