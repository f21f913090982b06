//! `roamcurve` command-line interface.
//!
//! Every subcommand computes all of its outputs in memory first and only
//! then creates `--out` and writes the files, so a failing run leaves no
//! partial output behind.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::geo::{load_keypoints, project_all, Projection};
use crate::report::{metrics_csv, render_path_compare, render_scatter_band, smoothness_csv, ScatterLabels};
use crate::sim::{simulate, AimModel, SceneSpec, SimResult, SpeedProfile, DEFAULT_TRIGGER_DISTANCE};
use crate::spline::{CurveKind, PathCurve, Tension};
use crate::stats::{analyze, load_study, serialize_study, synthesize_study, Variable};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "roamcurve", version, about = "Waypoint trajectories, roaming simulation and study statistics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Curve construction and comparison.
    #[command(subcommand)]
    Path(PathCommand),
    /// Roaming simulation.
    #[command(subcommand)]
    Sim(SimCommand),
    /// Study data analysis.
    #[command(subcommand)]
    Study(StudyCommand),
}

#[derive(Debug, Subcommand)]
pub enum PathCommand {
    /// Render the three curve kinds side by side and tabulate view smoothness.
    Compare(PathCompareArgs),
}

#[derive(Debug, Subcommand)]
pub enum SimCommand {
    /// Traverse the path once per curve kind and score the run.
    Run(SimRunArgs),
}

#[derive(Debug, Subcommand)]
pub enum StudyCommand {
    /// Normality screen, correlations and scatter plots for a study CSV.
    Analyze(StudyAnalyzeArgs),
    /// Write a seeded synthetic study CSV.
    Synth(StudySynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProjectionMode {
    Raw,
    Scaled,
}

#[derive(Debug, Args)]
pub struct ProjectionArgs {
    /// How keypoints map into working space.
    #[arg(long, value_enum, default_value = "raw")]
    pub projection: ProjectionMode,
    /// Scale factors `sx,sy,sz` for `--projection scaled`.
    #[arg(long, value_parser = parse_scale)]
    pub scale: Option<[f64; 3]>,
}

impl ProjectionArgs {
    fn resolve(&self) -> Result<Projection> {
        match (self.projection, &self.scale) {
            (ProjectionMode::Raw, None) => Ok(Projection::Raw),
            (ProjectionMode::Raw, Some(_)) => Err(Error::invalid("--scale requires --projection scaled")),
            (ProjectionMode::Scaled, Some([sx, sy, sz])) => Projection::scaled(*sx, *sy, *sz),
            (ProjectionMode::Scaled, None) => Err(Error::invalid("--projection scaled requires --scale sx,sy,sz")),
        }
    }
}

fn parse_scale(raw: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    let values = parts.iter().map(|p| p.parse::<f64>()).collect::<std::result::Result<Vec<_>, _>>();
    match values {
        Ok(v) if v.len() == 3 => Ok([v[0], v[1], v[2]]),
        _ => Err(format!("expected three comma-separated numbers, got '{raw}'")),
    }
}

#[derive(Debug, Args)]
pub struct PathCompareArgs {
    pub keypoints: PathBuf,
    #[arg(long, default_value_t = Tension::DEFAULT.value())]
    pub tension: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Samples per span for plotting and angular-speed estimates.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    #[command(flatten)]
    pub projection: ProjectionArgs,
}

#[derive(Debug, Args)]
pub struct SimRunArgs {
    pub keypoints: PathBuf,
    pub scene: PathBuf,
    /// Time step in seconds.
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Aim noise in radians; `inf` aims uniformly at random.
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    #[arg(long)]
    pub out: PathBuf,
    /// Simulate only this curve kind.
    #[arg(long)]
    pub kind: Option<CurveKind>,
    #[arg(long, default_value_t = Tension::DEFAULT.value())]
    pub tension: f64,
    /// Extra distance around a target at which a selection ray is cast.
    #[arg(long, default_value_t = DEFAULT_TRIGGER_DISTANCE)]
    pub trigger_distance: f64,
    /// Runs per kind; run `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    pub replicates: u32,
    #[command(flatten)]
    pub projection: ProjectionArgs,
}

#[derive(Debug, Args)]
pub struct StudyAnalyzeArgs {
    pub study: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Seed of the Monte-Carlo normality null distribution.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StudySynthArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
}

/// Files produced by a subcommand, relative to its `--out` directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outputs {
    pub dir: PathBuf,
    pub files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    fn new(dir: &Path) -> Self {
        Self { dir: dir.to_path_buf(), files: Vec::new() }
    }

    fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        self.files.push((name.into(), contents.into()));
    }

    pub fn write(&self) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(&self.dir)?;
        self.files
            .iter()
            .map(|(name, bytes)| {
                let path = self.dir.join(name);
                std::fs::write(&path, bytes)?;
                Ok(path)
            })
            .collect()
    }
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })
}

fn tension(t: f64) -> Result<Tension> {
    Tension::new(t).map_err(|e| Error::invalid(format!("--tension: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn path_compare(args: &PathCompareArgs) -> Result<Outputs> {
    let tension = tension(args.tension)?;
    let projection = args.projection.resolve()?;
    let keypoints = load_keypoints(&read_input(&args.keypoints)?)?;
    let mut out = Outputs::new(&args.out);
    out.add("compare.svg", render_path_compare(&keypoints, tension, args.samples)?);
    out.add("smoothness.csv", smoothness_csv(&keypoints, projection, tension, args.samples)?);
    Ok(out)
}

#[derive(Debug, Serialize)]
struct SimRunRecord<'a> {
    kind: CurveKind,
    tension: f64,
    dt: f64,
    sigma: f64,
    trigger_distance: f64,
    seed: u64,
    runs: &'a [SimResult],
}

pub fn sim_run(args: &SimRunArgs) -> Result<Outputs> {
    let tension = tension(args.tension)?;
    let projection = args.projection.resolve()?;
    let aim = AimModel::new(args.sigma, args.trigger_distance)?;
    if args.replicates == 0 {
        return Err(Error::invalid("--replicates must be at least 1"));
    }
    let keypoints = load_keypoints(&read_input(&args.keypoints)?)?;
    let scene = SceneSpec::from_json(&read_input(&args.scene)?)?;
    let points = project_all(&keypoints, projection)?;
    let profile = SpeedProfile::from_keypoints(&keypoints)?;
    let kinds: Vec<CurveKind> = match args.kind {
        Some(k) => vec![k],
        None => CurveKind::ALL.to_vec(),
    };

    let mut out = Outputs::new(&args.out);
    let mut metrics: Vec<(String, Vec<f64>)> = Vec::new();
    for kind in kinds {
        let curve = PathCurve::new(kind, points.clone(), tension)?;
        let runs = (0..args.replicates)
            .map(|i| simulate(&curve, &profile, &scene, args.dt, &aim, args.seed.wrapping_add(u64::from(i))))
            .collect::<Result<Vec<_>>>()?;
        let record = SimRunRecord {
            kind,
            tension: tension.value(),
            dt: args.dt,
            sigma: args.sigma,
            trigger_distance: args.trigger_distance,
            seed: args.seed,
            runs: &runs,
        };
        out.add(format!("sim_{kind}.json"), to_json(&record)?);
        metrics.push((format!("{kind}.time_s"), runs.iter().map(|r| r.time_used).collect()));
        metrics.push((format!("{kind}.collisions"), runs.iter().map(|r| f64::from(r.collisions)).collect()));
        metrics.push((format!("{kind}.accuracy"), runs.iter().map(|r| r.accuracy).collect()));
    }
    out.add("metrics.csv", metrics_csv(&metrics)?);
    Ok(out)
}

pub fn study_analyze(args: &StudyAnalyzeArgs) -> Result<Outputs> {
    let records = load_study(&read_input(&args.study)?)?;
    let report = analyze(&records, args.seed)?;
    let mut out = Outputs::new(&args.out);
    out.add("report.json", to_json(&report)?);
    for pair in &report.correlations {
        let (x, y) = (pair.x.column(&records), pair.y.column(&records));
        let labels = ScatterLabels::new(format!("{} vs {}", pair.y, pair.x), pair.x.as_str(), pair.y.as_str());
        out.add(format!("scatter_{}.svg", pair.y), render_scatter_band(&x, &y, &pair.fit, &labels)?);
    }
    let rows: Vec<(&str, Vec<f64>)> = Variable::ALL.iter().map(|v| (v.as_str(), v.column(&records))).collect();
    out.add("metrics.csv", metrics_csv(&rows)?);
    Ok(out)
}

pub fn study_synth(args: &StudySynthArgs) -> Result<Outputs> {
    let records = synthesize_study(args.n, args.seed)?;
    let mut out = Outputs::new(&args.out);
    out.add("study.csv", serialize_study(&records)?);
    Ok(out)
}

/// Computes the outputs of `cli` without touching the file system.
pub fn execute(cli: &Cli) -> Result<Outputs> {
    match &cli.command {
        Command::Path(PathCommand::Compare(a)) => path_compare(a),
        Command::Sim(SimCommand::Run(a)) => sim_run(a),
        Command::Study(StudyCommand::Analyze(a)) => study_analyze(a),
        Command::Study(StudyCommand::Synth(a)) => study_synth(a),
    }
}

/// Parses `args`, runs the command and writes its files. Returns the
/// process exit code: 0 on success, 1 on any error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli).and_then(|outputs| outputs.write()) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
