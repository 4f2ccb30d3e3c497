use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ssproj_core::error::{AnalysisError, ParseError};
use ssproj_core::examples::{build_example, example_metadata, ExampleId};
use ssproj_core::exec::Execution;
use ssproj_core::ifs::{parse_ifs, rotation_group, serialize_ifs, Ifs};
use ssproj_core::moments::{check_inertia_theorem, moment_summary, MomentReport};
use ssproj_core::projection::{verify_with_group, Direction, IntervalVerdict, DEFAULT_MAX_DEPTH, GROUP_CAP};
use ssproj_core::render::{
    all_word_points, points_csv, points_svg, render_angle_diagram, render_projection_cover, sample_points,
};
use ssproj_core::report::{DimensionDocument, EveryLineDocument, ThetaWitnessDocument, VerdictDocument, WitnessDocument};
use ssproj_core::scan::{scan_enumerate, ScanParams, ScanStatus};
use ssproj_core::witness::{
    audit_every_line, check_every_line_witness, check_invariance, check_theta_witness, parse_polygon,
    EveryLineVerdict,
};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;

/// Interval projections and inertia moments of planar self-similar sets.
#[derive(Parser)]
#[command(name = "ssproj", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate interval projection directions.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        scan: ScanArgs,
        #[command(flatten)]
        out: OutArgs,
        /// Also write the angle diagram as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Decide whether one projection is an interval.
    Project {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        dir: DirArgs,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        #[command(flatten)]
        out: OutArgs,
        /// Also write the projection cover diagram as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Mean, covariance and inertia of the natural measure.
    Moments {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        scan: ScanArgs,
        /// Skip the equal-length inertia check.
        #[arg(long)]
        no_check: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check a convex polygon as a projection witness.
    Witness {
        #[command(flatten)]
        input: Input,
        /// Polygon document with a `vertices` list.
        #[arg(long)]
        polygon: PathBuf,
        #[command(flatten)]
        dir: DirArgs,
        /// Check every line meeting the polygon.
        #[arg(long, conflicts_with_all = ["slope", "vertical"])]
        all_lines: bool,
        /// Random lines used to audit an every-line verdict.
        #[arg(long, default_value_t = 1000)]
        audit: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Similarity dimension, separation and rotation group.
    Dimension {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 8)]
        max_depth: usize,
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Point clouds (CSV or SVG) and projection cover diagrams.
    Render {
        #[command(flatten)]
        input: Input,
        /// Word length for points, or cover depth with a direction.
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Random points instead of every word of length `depth`.
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        dir: DirArgs,
        /// SVG instead of CSV for point clouds.
        #[arg(long)]
        svg: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// List built-in examples, or print one.
    Example {
        id: Option<String>,
        /// Print the system document.
        #[arg(long)]
        emit: bool,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Args)]
struct Input {
    /// System document path, or a built-in example id.
    input: String,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 1e-3)]
    residue: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
    max_depth: usize,
    #[arg(long, default_value_t = 20_000)]
    budget: usize,
    /// Run without rayon.
    #[arg(long)]
    sequential: bool,
}

impl ScanArgs {
    fn params(&self) -> ScanParams {
        ScanParams {
            target_residue: self.residue,
            max_depth: self.max_depth,
            budget: self.budget,
            ..ScanParams::default()
        }
    }
}

#[derive(Args)]
struct DirArgs {
    /// Slope `t` of the functional `x + t*y`, e.g. `1/2` or `-2`.
    #[arg(long, allow_hyphen_values = true)]
    slope: Option<String>,
    /// The functional `y`.
    #[arg(long, conflicts_with = "slope")]
    vertical: bool,
}

impl DirArgs {
    fn direction(&self) -> Result<Option<Direction>, CliError> {
        if self.vertical {
            return Ok(Some(Direction::Vertical));
        }
        match &self.slope {
            Some(s) => Ok(Some(s.parse::<Direction>()?)),
            None => Ok(None),
        }
    }
}

#[derive(Args)]
struct OutArgs {
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Input(String),
    Incomplete(String),
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Precondition(_) => CliError::Input(e.to_string()),
            _ => CliError::Incomplete(e.to_string()),
        }
    }
}

fn exec(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn load(input: &Input) -> Result<Ifs, CliError> {
    let path = Path::new(&input.input);
    if path.exists() {
        let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        return Ok(parse_ifs(&text)?);
    }
    match input.input.parse::<ExampleId>() {
        Ok(id) => Ok(build_example(id)),
        Err(_) => Err(CliError::Input(format!("{}: no such file or example", input.input))),
    }
}

fn write_text(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    write_text(out, &text)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { input, scan, out, svg } => {
            let ifs = load(&input)?;
            let report = scan_enumerate(&ifs, &scan.params(), exec(scan.sequential))?;
            write_json(&out.out, &report)?;
            if let Some(p) = svg {
                write_text(&Some(p), &render_angle_diagram(&report))?;
            }
            if report.status == ScanStatus::Incomplete {
                return Err(CliError::Incomplete(format!(
                    "residue {:.3e} rad above target {:.3e}",
                    report.residue_rad, scan.residue
                )));
            }
        }
        Command::Project { input, dir, max_depth, out, svg } => {
            let ifs = load(&input)?;
            let d = dir
                .direction()?
                .ok_or_else(|| CliError::Usage("project needs --slope or --vertical".into()))?;
            let group = rotation_group(&ifs, GROUP_CAP);
            if !group.is_finite() {
                return write_json(&out.out, &VerdictDocument::no_interval(ifs.name(), &d));
            }
            let v = verify_with_group(&ifs, &d, &group, max_depth)?;
            write_json(&out.out, &VerdictDocument::new(ifs.name(), &v))?;
            if let Some(p) = svg {
                write_text(&Some(p), &render_projection_cover(&ifs, &d, max_depth.min(8), Some((400, 0)))?)?;
            }
            if let IntervalVerdict::Undecided { depth } = v.verdict {
                return Err(CliError::Incomplete(format!("undecided at depth {depth}")));
            }
        }
        Command::Moments { input, scan, no_check, tol, out } => {
            let ifs = load(&input)?;
            let summary = moment_summary(&ifs, None)?;
            let check = if no_check {
                None
            } else {
                let report = scan_enumerate(&ifs, &scan.params(), exec(scan.sequential))?;
                Some(check_inertia_theorem(&ifs, &report, tol)?)
            };
            write_json(&out.out, &MomentReport::new(ifs.name(), &summary, check))?;
        }
        Command::Witness { input, polygon, dir, all_lines, audit, seed, out } => {
            let ifs = load(&input)?;
            let text = fs::read_to_string(&polygon)
                .map_err(|e| CliError::Input(format!("{}: {e}", polygon.display())))?;
            let f = parse_polygon(&text)?;
            let d = dir.direction()?;
            if d.is_none() && !all_lines {
                return Err(CliError::Usage("witness needs --slope, --vertical or --all-lines".into()));
            }
            let mut doc = WitnessDocument {
                name: ifs.name().to_string(),
                vertices: f.vertices().iter().map(|v| [v.x.to_string(), v.y.to_string()]).collect(),
                invariant: check_invariance(&f, &ifs),
                theta: None,
                every_line: None,
            };
            let mut undecided = false;
            if let Some(d) = d {
                let witness = check_theta_witness(&f, &ifs, &d)?;
                doc.theta = Some(ThetaWitnessDocument { t: d.to_string(), witness });
            } else {
                let v = check_every_line_witness(&f, &ifs)?;
                undecided = matches!(v, EveryLineVerdict::Undecided { .. });
                let a = audit_every_line(&f, &ifs, &v, audit, seed);
                doc.every_line = Some(EveryLineDocument::new(&v, a));
            }
            write_json(&out.out, &doc)?;
            if undecided {
                return Err(CliError::Incomplete("every-line check undecided".into()));
            }
        }
        Command::Dimension { input, max_depth, sequential, out } => {
            let ifs = load(&input)?;
            let doc = DimensionDocument::analyze(&ifs, max_depth, exec(sequential));
            write_json(&out.out, &doc)?;
            if doc.ssc.verdict == "undecided" {
                return Err(CliError::Incomplete("separation undecided".into()));
            }
        }
        Command::Render { input, depth, points, seed, dir, svg, out } => {
            let ifs = load(&input)?;
            if let Some(d) = dir.direction()? {
                let pts = points.map(|n| (n, seed));
                return write_text(&out.out, &render_projection_cover(&ifs, &d, depth, pts)?);
            }
            let cloud = match points {
                Some(n) => sample_points(&ifs, depth, n, seed),
                None => {
                    let count = (ifs.len() as f64).powi(depth as i32);
                    if count > 4e6 {
                        return Err(CliError::Usage(format!("{count} points; lower --depth or use --points")));
                    }
                    all_word_points(&ifs, depth)
                }
            };
            let as_svg = svg || out.out.as_ref().is_some_and(|p| p.extension().is_some_and(|e| e == "svg"));
            write_text(&out.out, &if as_svg { points_svg(&cloud) } else { points_csv(&cloud) })?;
        }
        Command::Example { id, emit, out } => match id {
            None => {
                let mut text = String::new();
                for id in ExampleId::ALL {
                    text.push_str(&format!("{:<26}{}\n", id.as_str(), example_metadata(id).note));
                }
                write_text(&out.out, &text)?;
            }
            Some(id) => {
                let id: ExampleId = id.parse()?;
                let ifs = build_example(id);
                if emit {
                    let mut text = serialize_ifs(&ifs);
                    text.push('\n');
                    write_text(&out.out, &text)?;
                } else {
                    let meta = example_metadata(id);
                    let summary = serde_json::json!({
                        "name": id.as_str(),
                        "maps": ifs.len(),
                        "ip_count": meta.ip_count,
                        "slopes": meta.slopes,
                        "lengths_sq": meta.lengths_sq,
                        "covariance": meta.covariance,
                        "note": meta.note,
                    });
                    write_json(&out.out, &summary)?;
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(CliError::Incomplete(m)) => {
            eprintln!("incomplete: {m}");
            ExitCode::from(EXIT_INCOMPLETE)
        }
    }
}
