//! Command-line front end: `fit`, `project`, `simulate`, `arch`, `sample`
//! and `plot`.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data or validation
//! errors. A path of `-` means stdin (inputs) or stdout (outputs).

use std::fs;
use std::io::{Read, Write};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::arch::{encoder_flops_ratio, param_count, token_budget, MaskSpec, VitConfig};
use crate::data::{ingest_observations, Benchmark, FinetuneCondition, ObservationSet};
use crate::fit::{fit, generate_synthetic, FitResult, FitSpec, SyntheticSpec};
use crate::models::ModelFamily;
use crate::plot::{render_svg, PlotSpec};
use crate::project::{
    parse_scenarios, project, projections_to_csv, sig3, solve_threshold, standard_scenarios, ReferencePoint, Scenario,
};
use crate::sampler::{frame_count, sample_chunks_k, VideoManifest};

pub const SEED_ENV: &str = "SCALING_ATLAS_SEED";

#[derive(Debug, Parser)]
#[command(name = "scaling-atlas", version, about = "Fit and project multi-factor scaling laws")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a scaling family to an observations CSV and write the fit as JSON.
    Fit(FitArgs),
    /// Project scale-up scenarios from a fit and write a projection CSV.
    Project(ProjectArgs),
    /// Generate a synthetic observations CSV from a JSON spec.
    Simulate(SimulateArgs),
    /// Print ViT parameter count, token budget and masked-encoder cost.
    Arch(ArchArgs),
    /// Draw a continuous-chunk subset of a video manifest.
    Sample(SampleArgs),
    /// Render observations, the fitted curves and projections as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Observations CSV (`-` for stdin).
    #[arg(long = "in", value_name = "PATH")]
    input: String,
    #[arg(long, default_value = "-", value_name = "PATH")]
    out: String,
    #[arg(long, default_value = "log_poly6")]
    family: ModelFamily,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 32)]
    restarts: usize,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Keep only this benchmark before fitting.
    #[arg(long)]
    benchmark: Option<Benchmark>,
    /// Keep only this condition before fitting.
    #[arg(long)]
    condition: Option<FinetuneCondition>,
}

#[derive(Debug, Args, Clone)]
struct ReferenceArgs {
    #[arg(long, default_value_t = ReferencePoint::VIT_H_476.hours)]
    ref_hours: f64,
    #[arg(long, default_value_t = ReferencePoint::VIT_H_476.params)]
    ref_params: u64,
    #[arg(long, default_value_t = ReferencePoint::VIT_H_476.pixel_side)]
    ref_side: u64,
    #[arg(long, default_value_t = ReferencePoint::VIT_H_476.patch)]
    patch: u64,
}

impl ReferenceArgs {
    fn point(&self) -> Result<ReferencePoint, CliError> {
        if !(self.ref_hours.is_finite() && self.ref_hours > 0.0)
            || self.ref_params == 0
            || self.ref_side == 0
            || self.patch == 0
        {
            return Err(CliError::Usage("reference values must be positive".into()));
        }
        Ok(ReferencePoint {
            hours: self.ref_hours,
            params: self.ref_params,
            pixel_side: self.ref_side,
            patch: self.patch,
        })
    }
}

#[derive(Debug, Args, Clone)]
struct ScenarioArgs {
    /// Scenario JSON file.
    #[arg(long, value_name = "PATH")]
    scenarios: Option<String>,
    /// Uniform scale-up factor; may be repeated.
    #[arg(long)]
    multiplier: Vec<f64>,
}

#[derive(Debug, Args)]
struct ProjectArgs {
    #[arg(long, value_name = "PATH")]
    fit: String,
    #[command(flatten)]
    reference: ReferenceArgs,
    #[command(flatten)]
    scenarios: ScenarioArgs,
    /// Threshold benchmark; defaults to the fit's benchmark.
    #[arg(long)]
    benchmark: Option<Benchmark>,
    /// Also search for the smallest multiplier reaching the threshold, up to this bound.
    #[arg(long)]
    m_max: Option<f64>,
    #[arg(long, default_value = "-", value_name = "PATH")]
    out: String,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Synthetic spec JSON (`-` for stdin).
    #[arg(long, value_name = "PATH")]
    spec: String,
    /// Overrides the seed given in the JSON.
    #[arg(long, env = SEED_ENV)]
    seed: Option<u64>,
    #[arg(long, default_value = "-", value_name = "PATH")]
    out: String,
}

#[derive(Debug, Args)]
struct ArchArgs {
    /// One of vit-s14, vit-b14, vit-l14, vit-h14.
    #[arg(long, conflicts_with_all = ["width", "depth", "heads"])]
    preset: Option<String>,
    #[arg(long, requires_all = ["depth", "heads"])]
    width: Option<u64>,
    #[arg(long)]
    depth: Option<u64>,
    #[arg(long)]
    heads: Option<u64>,
    #[arg(long)]
    patch: Option<u64>,
    #[arg(long)]
    mlp_ratio: Option<f64>,
    /// Image side in pixels.
    #[arg(long, default_value_t = 224)]
    side: u64,
    /// Masking ratio.
    #[arg(long, default_value_t = 0.8)]
    mask: f64,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Manifest CSV; defaults to the bundled 4971 h corpus.
    #[arg(long, value_name = "PATH")]
    manifest: Option<String>,
    #[arg(long)]
    fraction: f64,
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    repeat: u32,
    #[arg(long, default_value_t = 1)]
    num_chunks: usize,
    #[arg(long, default_value_t = 1.0)]
    fps: f64,
    #[arg(long, default_value = "-", value_name = "PATH")]
    out: String,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long, value_name = "PATH")]
    obs: String,
    #[arg(long, value_name = "PATH")]
    fit: Option<String>,
    #[command(flatten)]
    reference: ReferenceArgs,
    #[command(flatten)]
    scenarios: ScenarioArgs,
    #[arg(long)]
    benchmark: Option<Benchmark>,
    #[arg(long)]
    condition: Option<FinetuneCondition>,
    #[arg(long, value_name = "PATH")]
    out: String,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) => m,
        }
    }
}

fn data_err(context: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{context}: {e}"))
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, path: &str) -> Result<String, CliError> {
        if path == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s).map_err(|e| data_err("<stdin>", e))?;
            Ok(s)
        } else {
            fs::read_to_string(path).map_err(|e| data_err(path, e))
        }
    }

    fn write(&mut self, path: &str, content: &str) -> Result<(), CliError> {
        if path == "-" {
            self.stdout
                .write_all(content.as_bytes())
                .map_err(|e| data_err("<stdout>", e))
        } else {
            fs::write(path, content).map_err(|e| data_err(path, e))
        }
    }

    fn note(&mut self, line: &str) {
        let _ = writeln!(self.stderr, "{line}");
    }
}

/// Runs the CLI on `argv` (program name first) against the process's
/// standard streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdin.lock(), &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit streams.
pub fn run_with<I, S>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    let mut io = Io { stdin, stdout, stderr };
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(a, &mut io),
        Command::Project(a) => cmd_project(a, &mut io),
        Command::Simulate(a) => cmd_simulate(a, &mut io),
        Command::Arch(a) => cmd_arch(a, &mut io),
        Command::Sample(a) => cmd_sample(a, &mut io),
        Command::Plot(a) => cmd_plot(a, &mut io),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            io.note(&format!("error: {}", e.message()));
            e.code()
        }
    }
}

fn load_observations(io: &mut Io<'_>, path: &str) -> Result<ObservationSet, CliError> {
    let text = io.read(path)?;
    let mut set = ingest_observations(&text).map_err(|e| data_err(path, e))?;
    set.source_label = path.to_string();
    Ok(set)
}

fn load_fit(io: &mut Io<'_>, path: &str) -> Result<FitResult<f64>, CliError> {
    let text = io.read(path)?;
    FitResult::from_json(&text).map_err(|e| data_err(path, e))
}

fn narrow(set: ObservationSet, benchmark: Option<Benchmark>, condition: Option<FinetuneCondition>) -> ObservationSet {
    let keep: Vec<_> = set
        .observations
        .into_iter()
        .filter(|o| benchmark.is_none_or(|b| o.benchmark == b) && condition.is_none_or(|c| o.condition == c))
        .collect();
    ObservationSet::new(keep, set.source_label)
}

fn cmd_fit(a: FitArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let set = narrow(load_observations(io, &a.input)?, a.benchmark, a.condition);
    let mut spec = FitSpec::<f64>::new(a.family)
        .with_seed(a.seed)
        .with_restarts(a.restarts);
    if let Some(n) = a.max_iterations {
        spec.optim_options.max_iterations = n;
    }
    let result = fit(&set, &spec).map_err(|e| data_err(&a.input, e))?;
    if result.degenerate {
        io.note(&format!(
            "warning: {} observations for {} parameters",
            set.len(),
            a.family.param_count()
        ));
    }
    io.note(&format!(
        "{} on {}/{}: n={} sse={:.6e} rmse={:.6e} converged={}",
        a.family,
        result.benchmark,
        result.condition,
        set.len(),
        result.sse,
        result.rmse,
        result.converged
    ));
    io.write(&a.out, &(result.to_json() + "\n"))
}

fn load_scenarios(io: &mut Io<'_>, args: &ScenarioArgs) -> Result<Vec<Scenario>, CliError> {
    let mut out = Vec::new();
    if let Some(path) = &args.scenarios {
        let text = io.read(path)?;
        out.extend(parse_scenarios(&text).map_err(|e| data_err(path, e))?);
    }
    for &m in &args.multiplier {
        out.push(Scenario::multiplier(format!("x{m}"), m));
    }
    Ok(out)
}

fn cmd_project(a: ProjectArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let fitted = load_fit(io, &a.fit)?;
    let reference = a.reference.point()?;
    let benchmark = a.benchmark.unwrap_or(fitted.benchmark);
    let mut scenarios = load_scenarios(io, &a.scenarios)?;
    if scenarios.is_empty() {
        scenarios = standard_scenarios(benchmark);
    }
    let rows = scenarios
        .iter()
        .map(|s| project(&fitted, &reference, s, benchmark).map_err(|e| data_err(&s.name, e)))
        .collect::<Result<Vec<_>, _>>()?;
    for p in &rows {
        io.note(&format!(
            "{}: {} years, {} params, {}x{} px -> {}%{}",
            p.scenario.name,
            sig3(p.years),
            sig3(p.params),
            p.pixel_side,
            p.pixel_side,
            sig3(p.projected_accuracy),
            if p.threshold_reached { " (human level)" } else { "" }
        ));
    }
    if let Some(m_max) = a.m_max {
        match solve_threshold(&fitted, &reference, benchmark, m_max).map_err(|e| CliError::Usage(e.to_string()))? {
            Some(c) => io.note(&format!(
                "threshold {}% reached at x{:.4}{}",
                benchmark.human_threshold(),
                c.multiplier,
                if c.confident {
                    ""
                } else {
                    " (projection not monotone; coarse estimate)"
                }
            )),
            None => io.note(&format!(
                "threshold {}% not reached up to x{m_max}",
                benchmark.human_threshold()
            )),
        }
    }
    io.write(&a.out, &projections_to_csv(&rows))
}

fn cmd_simulate(a: SimulateArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let text = io.read(&a.spec)?;
    let mut spec: SyntheticSpec<f64> = serde_json::from_str(&text).map_err(|e| data_err(&a.spec, e))?;
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let set = generate_synthetic(&spec).map_err(|e| data_err(&a.spec, e))?;
    io.note(&format!("generated {} observations", set.len()));
    io.write(&a.out, &set.to_csv())
}

fn cmd_arch(a: ArchArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let mut cfg = match (&a.preset, a.width) {
        (Some(p), _) => p.parse::<VitConfig>().map_err(|e| CliError::Usage(e.to_string()))?,
        (None, Some(width)) => VitConfig {
            name: "custom".into(),
            width,
            depth: a.depth.unwrap_or(0),
            heads: a.heads.unwrap_or(1),
            patch: 14,
            mlp_ratio: 4.0,
            channels: 3,
        },
        (None, None) => return Err(CliError::Usage("pass --preset or --width/--depth/--heads".into())),
    };
    if let Some(p) = a.patch {
        cfg.patch = p;
    }
    if let Some(r) = a.mlp_ratio {
        cfg.mlp_ratio = r;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let mask = MaskSpec::new(a.mask).map_err(|e| CliError::Usage(e.to_string()))?;
    let budget = token_budget(a.side, cfg.patch, mask).map_err(|e| data_err("arch", e))?;
    let report = format!(
        "config: {cfg}\nparams: {}\nside: {}\ngrid: {}\ntotal_tokens: {}\nvisible_tokens: {}\nencoder_flops_ratio: {:.6}\n",
        param_count(&cfg),
        budget.side,
        budget.grid,
        budget.total_tokens,
        budget.visible_tokens,
        encoder_flops_ratio(mask, budget.total_tokens, &cfg)
    );
    io.write("-", &report)
}

fn cmd_sample(a: SampleArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let manifest = match &a.manifest {
        Some(path) => {
            let text = io.read(path)?;
            VideoManifest::from_csv(&text).map_err(|e| data_err(path, e))?
        }
        None => VideoManifest::bundled(),
    };
    if !(a.fps.is_finite() && a.fps > 0.0) {
        return Err(CliError::Usage("--fps must be positive".into()));
    }
    let plan = sample_chunks_k(&manifest, a.fraction, a.num_chunks, a.seed, a.repeat)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    io.note(&format!(
        "{} segments, {} hours, {} frames at {} fps",
        plan.segments.len(),
        plan.total_hours(),
        frame_count(plan.total_hours(), a.fps),
        a.fps
    ));
    io.write(&a.out, &plan.to_csv())
}

fn cmd_plot(a: PlotArgs, io: &mut Io<'_>) -> Result<(), CliError> {
    let set = load_observations(io, &a.obs)?;
    let fitted = a.fit.as_deref().map(|p| load_fit(io, p)).transpose()?;
    let benchmark = a
        .benchmark
        .or(fitted.as_ref().map(|f| f.benchmark))
        .or(set.slice().map(|s| s.0))
        .unwrap_or(Benchmark::ImagenetTop5);
    let condition = a.condition.or(fitted.as_ref().map(|f| f.condition));
    let set = narrow(set, Some(benchmark), condition);
    if set.is_empty() {
        return Err(CliError::Data(format!("{}: no observations for {benchmark}", a.obs)));
    }

    let reference = a.reference.point()?;
    let scenarios = load_scenarios(io, &a.scenarios)?;
    let stars = match &fitted {
        Some(f) => scenarios
            .iter()
            .map(|s| project(f, &reference, s, benchmark).map_err(|e| data_err(&s.name, e)))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let mut spec = PlotSpec::new(benchmark);
    if let Some(c) = condition {
        spec.title = format!("{benchmark} ({c}) accuracy vs. pretraining data");
    }
    let svg = render_svg(&spec, &set, fitted.as_ref().map(|f| &f.model), &stars);
    io.write(&a.out, &svg)
}
