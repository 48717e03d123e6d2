//! Command-line driver: analyze, analyze-assembly, compare, profile-validate.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 mesh
//! error, 4 analysis error, 5 report schema mismatch. Each failure prints
//! one `dfm: error[CODE] KIND: message` line on stderr, and no output file
//! is left behind.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::aggregation::{compare, Analysis, IndexReport};
use crate::analysis::{analyze_assembly, analyze_part, AnalysisOptions, ModuleInput, PartAnalysis};
use crate::error::Error;
use crate::indexes::{scalar_key_order, Process};
use crate::mesh::{load_mesh, TriMesh};
use crate::profile::ProfileSet;
use crate::reporting::{render_map, render_report, AnyReport, ColorScale, MapFormat, OutputBatch, ReportFormat};
use crate::spatial::{OctreeConfig, DEFAULT_MAX_DEPTH, DEFAULT_SAMPLES};

#[derive(Debug, Parser)]
#[command(name = "dfm", version, about = "Manufacturability indexes for machining and additive processes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one part.
    Analyze(AnalyzeArgs),
    /// Analyze the modules of a split design and total them.
    AnalyzeAssembly(AssemblyArgs),
    /// Compare a baseline report with a candidate report or totals file.
    Compare(CompareArgs),
    /// Check a machine profile file.
    ProfileValidate { profile: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcessSelection {
    Machining,
    Additive,
    Both,
}

impl ProcessSelection {
    fn processes(self) -> Vec<Process> {
        match self {
            ProcessSelection::Machining => vec![Process::Machining],
            ProcessSelection::Additive => vec![Process::Additive],
            ProcessSelection::Both => vec![Process::Machining, Process::Additive],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Machine profile (TOML).
    #[arg(long)]
    pub profile: PathBuf,
    /// Maximum octree depth (1-10).
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    pub depth: u32,
    /// Jittered samples per axis for grey-octant volumes.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u32,
    /// Color scale: `auto` or `LO:HI`.
    #[arg(long, default_value = "auto")]
    pub scale: String,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; defaults to available parallelism. Never changes results.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub mesh: PathBuf,
    #[arg(long, value_enum, default_value_t = ProcessSelection::Machining)]
    pub process: ProcessSelection,
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also write the octree leaves as JSON lines.
    #[arg(long)]
    pub dump_octree: bool,
}

#[derive(Debug, Args)]
pub struct AssemblyArgs {
    /// Module meshes as `PATH` or `PATH@PROCESS`.
    #[arg(required = true)]
    pub modules: Vec<String>,
    /// Process for modules without an explicit `@PROCESS`.
    #[arg(long, value_enum, default_value_t = ProcessSelection::Machining)]
    pub process: ProcessSelection,
    /// Name of the assembly design.
    #[arg(long, default_value = "assembly")]
    pub name: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub baseline: PathBuf,
    pub candidate: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self { code: 2, kind: "config", message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Io(_) => (1, "io"),
            Error::Profile(_)
            | Error::DepthOutOfRange(_)
            | Error::SamplingOutOfRange(_)
            | Error::UnknownMaterial(_)
            | Error::NonPositiveRoughness(_) => (2, "config"),
            Error::Parse { .. } | Error::EmptyMesh | Error::NotWatertight { .. } => (3, "mesh"),
            Error::SchemaMismatch { .. } | Error::Json(_) => (5, "schema"),
            _ => (4, "analysis"),
        };
        Self { code, kind, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (including the program name), runs, and reports errors on stderr.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("dfm: error[{}] {}: {}", e.code, e.kind, e.message);
            ExitCode::from(e.code)
        }
    }
}

/// Runs a parsed command; returns the text to print on success.
pub fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Analyze(a) => {
            let workers = a.common.workers;
            with_workers(workers, || cmd_analyze(&a))
        }
        Command::AnalyzeAssembly(a) => {
            let workers = a.common.workers;
            with_workers(workers, || cmd_analyze_assembly(&a))
        }
        Command::Compare(c) => cmd_compare(&c),
        Command::ProfileValidate { profile } => cmd_profile_validate(&profile),
    }
}

fn with_workers<T>(workers: Option<usize>, f: impl FnOnce() -> CliResult<T> + Send) -> CliResult<T>
where
    T: Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::config("--workers must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::config(format!("thread pool: {e}")))?;
    pool.install(f)
}

fn options(common: &CommonArgs) -> CliResult<(AnalysisOptions, ColorScale, ProfileSet)> {
    let scale: ColorScale = common.scale.parse().map_err(CliError::config)?;
    let profiles = ProfileSet::load(&common.profile)?;
    let opts = AnalysisOptions {
        octree: OctreeConfig {
            max_depth: common.depth,
            samples: common.samples,
            ..OctreeConfig::default()
        },
        ..AnalysisOptions::default()
    };
    Ok((opts, scale, profiles))
}

fn ensure_out_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::from(Error::Io(e)))
}

fn design_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "part".into())
}

fn summarize(out: &mut String, report: &IndexReport) {
    let _ = writeln!(out, "{} [{}]", report.design, report.process);
    let scalars = report.scalars();
    let mut keys: Vec<&String> = scalars.keys().collect();
    keys.sort_by_key(|k| scalar_key_order(k));
    for k in keys {
        let _ = writeln!(out, "  {k:<12} {:.4}", scalars[k]);
    }
}

/// Adds report and map files for one analyzed part. `prefix` is prepended to
/// every file name; `report_name` names the report of each process.
#[allow(clippy::too_many_arguments)]
fn stage_part(
    batch: &mut OutputBatch,
    dir: &Path,
    prefix: &str,
    mesh: &TriMesh,
    analysis: &PartAnalysis,
    report_name: impl Fn(Process) -> String,
    scale: ColorScale,
    format: ReportFormat,
) -> CliResult<()> {
    for r in &analysis.reports {
        let text = render_report(AnyReport::Index(r), format)?;
        batch.add(dir.join(format!("{}.{}", report_name(r.process), format.extension())), text);
    }
    for field in &analysis.fields {
        for map in [MapFormat::Ply, MapFormat::Vtk] {
            let text = render_map(mesh, &analysis.octree, field, scale, map)?;
            let name = format!("{prefix}{}_map.{}", field.id.stem(), map.extension());
            batch.add(dir.join(name), text);
        }
    }
    Ok(())
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> CliResult<String> {
    let (opts, scale, profiles) = options(&args.common)?;
    let mesh = load_mesh(&args.mesh, None).map_err(|e| in_file(e, &args.mesh))?;
    let processes = args.process.processes();
    let design = design_name(&args.mesh);
    let analysis =
        analyze_part(&design, &mesh, &profiles, &processes, &opts).map_err(|e| in_file(e, &args.mesh))?;

    let dir = &args.common.out;
    ensure_out_dir(dir)?;
    let format: ReportFormat = args.common.format.into();
    let single = processes.len() == 1;
    let mut batch = OutputBatch::default();
    stage_part(
        &mut batch,
        dir,
        "",
        &mesh,
        &analysis,
        |p| if single { "report".to_string() } else { format!("report_{p}") },
        scale,
        format,
    )?;
    if args.dump_octree {
        let mut buf = Vec::new();
        analysis.octree.write_leaves_jsonl(&mut buf)?;
        batch.add(dir.join("octree.jsonl"), buf);
    }

    let mut out = String::new();
    for r in &analysis.reports {
        summarize(&mut out, r);
    }
    for p in batch.paths() {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    batch.commit()?;
    Ok(out)
}

fn parse_module(spec: &str, default: Option<Process>) -> CliResult<(PathBuf, Process)> {
    match spec.rsplit_once('@') {
        Some((path, process)) => {
            let p: Process = process.parse().map_err(CliError::config)?;
            Ok((PathBuf::from(path), p))
        }
        None => default
            .map(|p| (PathBuf::from(spec), p))
            .ok_or_else(|| CliError::config(format!("module `{spec}` needs @machining or @additive"))),
    }
}

pub fn cmd_analyze_assembly(args: &AssemblyArgs) -> CliResult<String> {
    let (opts, scale, profiles) = options(&args.common)?;
    let default = match args.process {
        ProcessSelection::Machining => Some(Process::Machining),
        ProcessSelection::Additive => Some(Process::Additive),
        ProcessSelection::Both => None,
    };
    let specs = args
        .modules
        .iter()
        .map(|s| parse_module(s, default))
        .collect::<CliResult<Vec<_>>>()?;
    let meshes = specs
        .iter()
        .map(|(path, _)| load_mesh(path, None).map_err(|e| in_file(e, path)))
        .collect::<CliResult<Vec<_>>>()?;
    let mut ids: Vec<String> = Vec::new();
    for (path, _) in &specs {
        let base = design_name(path);
        let mut id = base.clone();
        let mut k = 2;
        while ids.contains(&id) {
            id = format!("{base}_{k}");
            k += 1;
        }
        ids.push(id);
    }
    let modules: Vec<ModuleInput<'_>> = specs
        .iter()
        .zip(&meshes)
        .zip(&ids)
        .map(|(((_, process), mesh), id)| ModuleInput { id: id.clone(), mesh, process: *process })
        .collect();
    let (analyses, totals) = analyze_assembly(&args.name, &modules, &profiles, &opts)?;

    let dir = &args.common.out;
    ensure_out_dir(dir)?;
    let format: ReportFormat = args.common.format.into();
    let mut batch = OutputBatch::default();
    for ((m, a), mesh) in modules.iter().zip(&analyses).zip(&meshes) {
        let id = m.id.clone();
        stage_part(&mut batch, dir, &format!("{id}_"), mesh, a, |_| format!("module_{id}"), scale, format)?;
    }
    let text = render_report(AnyReport::Totals(&totals), format)?;
    batch.add(dir.join(format!("totals.{}", format.extension())), text);

    let mut out = String::new();
    for a in &analyses {
        summarize(&mut out, &a.reports[0]);
    }
    for w in &totals.warnings {
        let _ = writeln!(out, "warning: {w}");
        eprintln!("dfm: warning: {w}");
    }
    if let Some(p) = totals.process {
        let _ = writeln!(out, "totals [{p}]");
        let mut keys: Vec<&String> = totals.totals.keys().collect();
        keys.sort_by_key(|k| scalar_key_order(k));
        for k in keys {
            let _ = writeln!(out, "  {k:<12} {:.4}", totals.totals[k]);
        }
    }
    for p in batch.paths() {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    batch.commit()?;
    Ok(out)
}

/// Adds the file name to I/O and mesh errors that do not already carry it.
fn in_file(e: Error, path: &Path) -> CliError {
    let with_path = matches!(e, Error::Parse { .. });
    let mut err = CliError::from(e);
    if !with_path && matches!(err.code, 1 | 3) {
        err.message = format!("{}: {}", path.display(), err.message);
    }
    err
}

fn read_analysis(path: &Path) -> CliResult<Analysis> {
    let text = std::fs::read_to_string(path).map_err(|e| in_file(Error::Io(e), path))?;
    Analysis::from_json(&text).map_err(|e| CliError {
        message: format!("{}: {e}", path.display()),
        ..CliError::from(e)
    })
}

pub fn cmd_compare(args: &CompareArgs) -> CliResult<String> {
    let base = read_analysis(&args.baseline)?;
    let cand = read_analysis(&args.candidate)?;
    let report = compare(&base, &cand).map_err(|e| CliError {
        code: 5,
        kind: "schema",
        message: format!("{} vs {}: {e}", args.baseline.display(), args.candidate.display()),
    })?;
    ensure_out_dir(&args.out)?;
    let format: ReportFormat = args.format.into();
    let path = args.out.join(format!("comparison.{}", format.extension()));
    let mut batch = OutputBatch::default();
    batch.add(&path, render_report(AnyReport::Comparison(&report), format)?);

    let mut out = String::new();
    let _ = writeln!(out, "{} -> {}", report.baseline, report.candidate);
    for r in &report.rows {
        let pct = r.percent.map_or("n/a".to_string(), |p| format!("{p:+.1}%"));
        let _ = writeln!(out, "  {:<12} {:.4} -> {:.4}  {pct}", r.id, r.baseline, r.candidate);
    }
    for r in &report.side_by_side {
        let show = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.4}"));
        let _ = writeln!(out, "  {:<12} {} | {}", r.id, show(r.baseline), show(r.candidate));
    }
    let _ = writeln!(out, "wrote {}", path.display());
    batch.commit()?;
    Ok(out)
}

pub fn cmd_profile_validate(path: &Path) -> CliResult<String> {
    let set = ProfileSet::load(path)?;
    let mut tables = Vec::new();
    if set.machining.is_some() {
        tables.push("machining");
    }
    if set.additive.is_some() {
        tables.push("additive");
    }
    Ok(format!("ok: {} ({})\n", path.display(), tables.join(", ")))
}
