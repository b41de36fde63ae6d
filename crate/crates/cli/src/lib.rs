//! Command-line front end: parameterize, remesh, measure and generate
//! meshes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use fsqc::elliptic::SolverOptions;
use fsqc::mesh::{generate, io, validate_genus0};
use fsqc::qc::{dilation_r3, fields_io, max_dilation};
use fsqc::remesh::{self, RegionSpec, RemeshResult};
use fsqc::spherical::{self, Direction, StretchAxis, HISTOGRAM_BINS};
use fsqc::{DilationField, FsqcError, TriangleMesh};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "fsqc", version, about = "Spherical quasiconformal parameterization and adaptive remeshing")]
pub struct Cli {
    /// Worker threads for per-face work (0 lets the runtime decide).
    #[arg(long, global = true, env = "FSQC_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Largest accepted relative residual of the linear solves.
    #[arg(long, global = true, default_value_t = fsqc::elliptic::DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    /// More log output (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Map a genus-0 mesh onto the unit sphere with prescribed dilation.
    Param(ParamArgs),
    /// Re-triangulate a mesh with stretched triangles on a region.
    Remesh(RemeshArgs),
    /// Compare per-face dilation between two meshes with equal connectivity.
    Metrics(MetricsArgs),
    /// Write a synthetic test mesh.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Args)]
#[group(id = "dilation_source", required = true, multiple = false)]
pub struct DilationSource {
    /// The same dilation K on every face.
    #[arg(long)]
    pub uniform_k: Option<f64>,
    /// Per-face dilation as CSV with header `face_index,K`.
    #[arg(long)]
    pub dilation: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub dilation: DilationSource,
    /// Summary CSV; the histogram goes next to it as `<stem>_histogram.csv`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Start of the stretch direction (vertex index).
    #[arg(long, requires = "p2")]
    pub p1: Option<usize>,
    /// End of the stretch direction (vertex index).
    #[arg(long, requires = "p1")]
    pub p2: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RemeshArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Region spec: `faces = <list file>`, `k = <K>`, `p1 = <vertex>`, `p2 = <vertex>`.
    #[arg(long)]
    pub region: PathBuf,
    /// Summary CSV; per-face quality goes next to it as `<stem>_faces.csv`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Skip the K = 1 comparison run.
    #[arg(long)]
    pub no_baseline: bool,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub source: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    /// Intended dilation, uniform, for drift columns.
    #[arg(long, conflicts_with = "dilation")]
    pub uniform_k: Option<f64>,
    /// Intended dilation per face, for drift columns.
    #[arg(long)]
    pub dilation: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Subdivided icosahedron on the unit sphere (20 * 4^level faces).
    Icosphere {
        #[arg(long, default_value_t = 4)]
        level: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ellipsoid with the given semi-axes (20 * frequency^2 faces).
    Ellipsoid {
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [2.0, 1.0, 1.0])]
        axes: Vec<f64>,
        #[arg(long, default_value_t = 32)]
        frequency: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Ellipsoid with a ridge on top, plus a region spec selecting the ridge.
    Ridge {
        #[arg(long, default_value_t = 40)]
        frequency: usize,
        #[arg(long, default_value_t = 0.4)]
        height: f64,
        #[arg(long, default_value_t = 2.5)]
        k: f64,
        #[arg(long)]
        out: PathBuf,
        /// Region spec to write; its face list goes to `<stem>_faces.txt`.
        #[arg(long)]
        spec: PathBuf,
    },
}

/// Failure with the process exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<FsqcError> for Failure {
    fn from(e: FsqcError) -> Self {
        let code = match e.root() {
            FsqcError::Solver { .. } | FsqcError::Flipped { .. } => 2,
            FsqcError::NonManifold(_) => 3,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

pub fn run(cli: Cli) -> CliResult<()> {
    if cli.threads > 0 {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    if !(cli.tolerance > 0.0 && cli.tolerance.is_finite()) {
        return Err(Failure::input(format!("--tolerance must be positive (got {})", cli.tolerance)));
    }
    let options = SolverOptions {
        tolerance: cli.tolerance,
    };
    match cli.command {
        Command::Param(args) => cmd_param(&args, &options),
        Command::Remesh(args) => cmd_remesh(&args, &options),
        Command::Metrics(args) => cmd_metrics(&args),
        Command::Gen(g) => cmd_gen(g),
    }
}

fn check_k(k: f64) -> CliResult<()> {
    if k >= 1.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Failure::input(format!("K must be ≥ 1 (got {k})")))
    }
}

fn load(path: &Path) -> CliResult<TriangleMesh> {
    Ok(io::load_mesh_auto(path)?)
}

fn target_field(mesh: &TriangleMesh, uniform: Option<f64>, csv: Option<&Path>) -> CliResult<Option<DilationField>> {
    match (uniform, csv) {
        (Some(k), _) => {
            check_k(k)?;
            Ok(Some(DilationField::uniform(mesh.face_count(), k)?))
        }
        (None, Some(path)) => Ok(Some(fields_io::load_dilation_csv(path, mesh.face_count())?)),
        (None, None) => Ok(None),
    }
}

/// `metric,value` rows under a header, starting with the tool version.
struct Report(String);

impl Report {
    fn new() -> Self {
        Self(format!("metric,value\nversion,{VERSION}\n"))
    }

    fn row(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key},{value}");
    }

    fn save(&self, path: &Path) -> CliResult<()> {
        write_file(path, &self.0)
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    path.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

fn histogram_csv(bins: &[spherical::HistogramBin]) -> String {
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for b in bins {
        let _ = writeln!(out, "{},{},{}", b.lo, b.hi, b.count);
    }
    out
}

fn cmd_param(args: &ParamArgs, options: &SolverOptions) -> CliResult<()> {
    let mesh = load(&args.input)?;
    let target = target_field(&mesh, args.dilation.uniform_k, args.dilation.dilation.as_deref())?
        .ok_or_else(|| Failure::input("a dilation source is required"))?;
    let direction = match (args.p1, args.p2) {
        (Some(p1), Some(p2)) => Some(Direction {
            p1,
            p2,
            axis: StretchAxis::Along,
        }),
        _ => None,
    };
    let out = spherical::fsqc_parameterize_with(&mesh, &target, direction, options)?;
    io::save_mesh_auto(&out.sphere.to_mesh(), &args.out)?;
    let report = spherical::verify_dilation(&mesh, &out.sphere, &target)?;
    println!("{report}");

    let mut csv = Report::new();
    csv.row("faces", report.faces);
    csv.row("vertices", mesh.vertex_count());
    csv.row("target_mean", report.target_mean);
    csv.row("target_sd", report.target_sd);
    csv.row("target_max", report.target_max);
    csv.row("mean_dilation", report.mean);
    csv.row("sd_dilation", report.sd);
    csv.row("max_dilation", report.max);
    csv.row("mean_drift", report.mean_drift);
    csv.row("sd_drift", report.sd_drift);
    csv.row("mean_abs_error", report.mean_abs_error);
    csv.row("flipped_faces", report.flipped_faces);
    csv.row("outer_face", out.outer_face);
    csv.row("outlying_vertices", out.outlying_vertices);
    csv.row("solver_residual", out.solver_residual);
    if let Some(theta) = out.rotation_angle {
        csv.row("rotation_angle", theta);
    }
    if let Some(path) = &args.report {
        csv.save(path)?;
        write_file(&sibling(path, "histogram", "csv"), &histogram_csv(&report.histogram))?;
    }
    Ok(())
}

fn mean_of(values: impl IntoIterator<Item = f64>) -> f64 {
    remesh::mean(values)
}

fn cmd_remesh(args: &RemeshArgs, options: &SolverOptions) -> CliResult<()> {
    let mesh = load(&args.input)?;
    let spec = remesh::load_region_spec(&args.region, &mesh)?;
    let out = remesh::remesh_with(&mesh, &spec, remesh::REMESH_STRETCH_AXIS, options)?;
    io::save_mesh_auto(&out.result.mesh, &args.out)?;

    let region_vertices = remesh::region_vertex_mask(&mesh, &spec.region);
    let quality = remesh::region_quality(&out.result, &region_vertices);
    let mut csv = Report::new();
    csv.row("faces", out.result.mesh.face_count());
    csv.row("vertices", out.result.mesh.vertex_count());
    csv.row("k_region", spec.k_region);
    csv.row("region_input_faces", spec.region.len());
    csv.row("mean_min_angle_deg", mean_of(out.result.min_angles.iter().copied()));
    csv.row("mean_aspect_ratio", mean_of(out.result.aspect_ratios.iter().copied()));
    csv.row("region_faces", quality.inside_faces);
    csv.row("region_aspect_ratio", quality.inside_aspect);
    csv.row("off_region_faces", quality.outside_faces);
    csv.row("off_region_aspect_ratio", quality.outside_aspect);
    csv.row("flipped_faces", out.parameterization.flipped_faces);
    csv.row("solver_residual", out.parameterization.solver_residual);
    println!(
        "remeshed {} faces; region aspect {:.4}, off-region aspect {:.4}",
        out.result.mesh.face_count(),
        quality.inside_aspect,
        quality.outside_aspect
    );

    if !args.no_baseline && !spec.region.is_empty() {
        let base_spec = RegionSpec::new(spec.region.clone(), 1.0, spec.p1, spec.p2)?;
        let base = remesh::remesh_with(&mesh, &base_spec, remesh::REMESH_STRETCH_AXIS, options)?;
        let bq = remesh::region_quality(&base.result, &region_vertices);
        let uplift = quality.inside_aspect / bq.inside_aspect;
        let change = quality.outside_aspect / bq.outside_aspect - 1.0;
        csv.row("baseline_region_aspect_ratio", bq.inside_aspect);
        csv.row("baseline_off_region_aspect_ratio", bq.outside_aspect);
        csv.row("region_aspect_uplift", uplift);
        csv.row("off_region_aspect_change", change);
        println!("region aspect uplift over K = 1: {uplift:.4} (off-region change {:+.2}%)", 100.0 * change);
    }
    if let Some(path) = &args.report {
        csv.save(path)?;
        write_file(&sibling(path, "faces", "csv"), &face_quality_csv(&out.result))?;
    }
    Ok(())
}

fn face_quality_csv(r: &RemeshResult) -> String {
    let mut out = String::from("face_index,min_angle_deg,aspect_ratio\n");
    for (f, (a, q)) in r.min_angles.iter().zip(&r.aspect_ratios).enumerate() {
        let _ = writeln!(out, "{f},{a},{q}");
    }
    out
}

fn cmd_metrics(args: &MetricsArgs) -> CliResult<()> {
    let source = load(&args.source)?;
    let target = load(&args.target)?;
    if !source.same_connectivity(&target) {
        return Err(Failure::input(format!(
            "{} and {} do not share connectivity",
            args.source.display(),
            args.target.display()
        )));
    }
    let achieved = dilation_r3(&source, &target)?;
    let values = achieved.values();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let max = max_dilation(&achieved)?;

    // Faces whose orientation reverses: against the sphere's outward normal
    // when the target lies on the unit sphere, against the source normal
    // otherwise.
    let on_sphere = target.vertices().iter().all(|p| (p.coords.norm() - 1.0).abs() <= 1e-9);
    let flipped = (0..target.face_count())
        .filter(|&f| {
            let n = target.face_normal(f);
            if on_sphere {
                let [a, b, c] = target.face_points(f);
                n.dot(&(a.coords + b.coords + c.coords)) <= 0.0
            } else {
                n.dot(&source.face_normal(f)) <= 0.0
            }
        })
        .count();

    let mut csv = Report::new();
    csv.row("faces", values.len());
    csv.row("mean_dilation", mean);
    csv.row("sd_dilation", sd);
    csv.row("max_dilation", max);
    csv.row("flipped_faces", flipped);
    csv.row("flip_reference", if on_sphere { "sphere" } else { "source_normals" });
    if let Some(intended) = target_field(&source, args.uniform_k, args.dilation.as_deref())? {
        let t = intended.values();
        let t_mean = t.iter().sum::<f64>() / n;
        let t_sd = (t.iter().map(|v| (v - t_mean).powi(2)).sum::<f64>() / n).sqrt();
        csv.row("target_mean", t_mean);
        csv.row("target_sd", t_sd);
        csv.row("mean_drift", mean - t_mean);
        csv.row("sd_drift", sd - t_sd);
    }
    println!("faces {}  mean {mean:.4}  SD {sd:.4}  max {max:.4}  flipped {flipped}", values.len());
    if let Some(path) = &args.report {
        csv.save(path)?;
        let hi = (1.2 * max).max(8.0);
        let bins = spherical::histogram(values, 1.0, hi, HISTOGRAM_BINS);
        write_file(&sibling(path, "histogram", "csv"), &histogram_csv(&bins))?;
    }
    Ok(())
}

fn cmd_gen(g: GenCommand) -> CliResult<()> {
    let (mesh, out) = match g {
        GenCommand::Icosphere { level, out } => {
            if level > 8 {
                return Err(Failure::input("icosphere level above 8 is too large"));
            }
            (generate::icosphere(level), out)
        }
        GenCommand::Ellipsoid { axes, frequency, out } => {
            if axes.len() != 3 || axes.iter().any(|a| a.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)) {
                return Err(Failure::input("--axes needs three positive values"));
            }
            if frequency == 0 {
                return Err(Failure::input("--frequency must be at least 1"));
            }
            (generate::ellipsoid(axes[0], axes[1], axes[2], frequency), out)
        }
        GenCommand::Ridge {
            frequency,
            height,
            k,
            out,
            spec,
        } => {
            check_k(k)?;
            if frequency < 8 {
                return Err(Failure::input("--frequency must be at least 8 for a ridge"));
            }
            let ridge = generate::ridge_ellipsoid(generate::RidgeParams {
                frequency,
                height,
                ..Default::default()
            });
            let faces = sibling(&spec, "faces", "txt");
            io::save_face_selection(&ridge.region, &faces)?;
            let name = faces.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            write_file(
                &spec,
                &format!("faces = {name}\nk = {k}\np1 = {}\np2 = {}\n", ridge.p1, ridge.p2),
            )?;
            (ridge.mesh, out)
        }
    };
    debug_assert!(validate_genus0(&mesh).passed());
    io::save_mesh_auto(&mesh, &out)?;
    println!("wrote {} ({} vertices, {} faces)", out.display(), mesh.vertex_count(), mesh.face_count());
    Ok(())
}
