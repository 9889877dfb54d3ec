/*
Copyright 2026 The uvdose Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 validation, 3 unreachable point,
//! 4 no path. Verbosity comes from the `UVDOSE_LOG` environment variable
//! (`error`, `warn`, `info`, `debug`, `trace`).

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::geometry::{Point3, Pose, Vec3};
use crate::irradiance::{irradiance_closed_form, irradiance_quadrature, AssemblyConfig, Irradiance, LampAssembly};
use crate::mapping::ply::write_ply;
use crate::optimizer::{write_dose_report_csv, write_speed_csv};
use crate::planner::PlannerError;
use crate::simulator::{Comparison, MissionContext, MissionReport, Policy, Scene, SimError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_UNREACHABLE: i32 = 3;
pub const EXIT_NO_PATH: i32 = 4;

/// Relative tolerance of `validate-irradiance`.
pub const VALIDATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "uvdose", version, about = "UV-C dose planning and mission simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form vs quadrature irradiance on the sensor grid.
    ValidateIrradiance(ValidateArgs),
    /// Plan and optimise one arm mission; write plan, speed profiles and doses.
    Plan(RunArgs),
    /// Simulate one policy and write its report.
    Simulate(RunArgs),
    /// Run every policy on the same scene and compare.
    Compare(RunArgs),
    /// Print the table of a saved report or comparison.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long, default_value = "diff")]
    policy: Policy,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Override a scene field by dotted path, e.g. `targets.hotspot_min=25`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    n_segments: Option<usize>,
    /// Override a grid field, e.g. `assembly.flux_w=4` or `heights=[0.2,0.5]`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Perturbs the closed form to exercise the failure path.
    #[arg(long, hide = true)]
    corrupt_closed_form: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// `report.json` or `comparison.json` written by another command.
    #[arg(long)]
    input: PathBuf,
}

/// Sensor grid for `validate-irradiance`: sensor positions on the plane
/// below the assembly and assembly heights above it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidationGrid {
    pub assembly: AssemblyConfig,
    pub positions: Vec<[f64; 2]>,
    pub heights: Vec<f64>,
    pub n_segments: usize,
}

impl Default for ValidationGrid {
    fn default() -> Self {
        Self {
            assembly: AssemblyConfig::default(),
            positions: vec![[0.0, 0.0], [0.1, 0.0], [-0.1, 0.0], [0.0, 0.1], [0.0, -0.1]],
            heights: vec![0.2, 0.3, 0.4],
            n_segments: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationRow {
    pub x: f64,
    pub y: f64,
    pub height: f64,
    pub closed_form_uw_cm2: f64,
    pub quadrature_uw_cm2: f64,
    pub rel_error: f64,
}

/// Evaluates the grid. Sensors face up at the origin plane; the assembly
/// looks straight down from each height.
pub fn validation_rows(grid: &ValidationGrid, corrupt: bool) -> Result<Vec<ValidationRow>, String> {
    let mut rows = Vec::new();
    for &h in &grid.heights {
        let pose = Pose::looking_along(Point3::new(0.0, 0.0, h), &-Vec3::z(), &Vec3::x());
        let assembly = LampAssembly::new(&grid.assembly, pose).map_err(|e| e.to_string())?;
        for &[x, y] in &grid.positions {
            let p = pose.inverse_transform_point(&Point3::new(x, y, 0.0));
            let n = pose.inverse_transform_vector(&Vec3::z());
            let mut closed = Irradiance(0.0);
            let mut quad = Irradiance(0.0);
            for lamp in &assembly.lamps {
                closed = closed + irradiance_closed_form(lamp, &p, &n).map_err(|e| e.to_string())?;
                quad = quad + irradiance_quadrature(lamp, &p, &n, grid.n_segments).map_err(|e| e.to_string())?;
            }
            if corrupt {
                closed = Irradiance(closed.0 * 1.01);
            }
            rows.push(ValidationRow {
                x,
                y,
                height: h,
                closed_form_uw_cm2: closed.uw_per_cm2(),
                quadrature_uw_cm2: quad.uw_per_cm2(),
                rel_error: (closed.0 - quad.0).abs() / quad.0.abs().max(f64::MIN_POSITIVE),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Sim(e) => sim_exit_code(e),
        }
    }
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Usage(format!("{}: {e}", path.display()))
}

/// Stable exit code for a simulation error.
pub fn sim_exit_code(e: &SimError) -> i32 {
    match e {
        SimError::UnreachablePoint { .. } => EXIT_UNREACHABLE,
        SimError::StartBlocked | SimError::StationBlocked(_) => EXIT_NO_PATH,
        SimError::Planner(
            PlannerError::NoPath { .. }
            | PlannerError::UnreachableSite(_)
            | PlannerError::NoFreeStopPoint(_)
            | PlannerError::BlockedCell(..),
        ) => EXIT_NO_PATH,
        _ => EXIT_VALIDATION,
    }
}

/// Sets `path` (dot separated) in a JSON object to `raw`, parsed as JSON
/// when possible and as a string otherwise.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<(), String> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| format!("override {assignment:?} is not KEY=VALUE"))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(format!("override key {key:?} has an empty component"));
        }
        if let Value::Array(items) = node {
            let idx: usize = part.parse().map_err(|_| format!("{key:?}: {part:?} is not an index"))?;
            let len = items.len();
            node = items
                .get_mut(idx)
                .ok_or_else(|| format!("{key:?}: index {idx} out of range ({len})"))?;
        } else {
            if node.is_null() {
                *node = Value::Object(Default::default());
            }
            let obj = node
                .as_object_mut()
                .ok_or_else(|| format!("{key:?}: {part:?} is not inside an object"))?;
            node = obj.entry(part.to_string()).or_insert(Value::Null);
        }
        if i + 1 == parts.len() {
            *node = value.clone();
        }
    }
    Ok(())
}

/// Scene file, then `--set` overrides, then `--seed`.
fn effective_scene(args: &RunArgs) -> Result<(Scene, Value), CliError> {
    if !args.scene.is_file() {
        return Err(CliError::Usage(format!("scene file {} not found", args.scene.display())));
    }
    let text = fs::read_to_string(&args.scene).map_err(io(&args.scene))?;
    let mut value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", args.scene.display())))?;
    for o in &args.overrides {
        apply_override(&mut value, o).map_err(CliError::Usage)?;
    }
    if let Some(seed) = args.seed {
        value["seed"] = seed.into();
    }
    let scene = Scene::from_json(&value.to_string())?;
    // Echo the fully defaulted scene.
    let effective = serde_json::to_value(&scene).map_err(|e| CliError::Validation(e.to_string()))?;
    Ok((scene, effective))
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(io(dir))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Validation(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(io(path))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path).map_err(io(path))?))
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    let mut value = serde_json::to_value(ValidationGrid::default()).map_err(|e| CliError::Usage(e.to_string()))?;
    for o in &args.overrides {
        apply_override(&mut value, o).map_err(CliError::Usage)?;
    }
    let mut grid: ValidationGrid = serde_json::from_value(value).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(n) = args.n_segments {
        grid.n_segments = n;
    }
    let rows = validation_rows(&grid, args.corrupt_closed_form).map_err(CliError::Validation)?;
    println!(
        "{:>7} {:>7} {:>6} {:>16} {:>16} {:>10}",
        "x_m", "y_m", "z_m", "closed_uW_cm2", "quad_uW_cm2", "rel_err"
    );
    for r in &rows {
        println!(
            "{:>7.3} {:>7.3} {:>6.3} {:>16.6} {:>16.6} {:>10.2e}",
            r.x, r.y, r.height, r.closed_form_uw_cm2, r.quadrature_uw_cm2, r.rel_error
        );
    }
    if let Some(dir) = &args.out {
        prepare_out(dir)?;
        write_json(&dir.join("validation.json"), &rows)?;
        write_json(&dir.join("effective_config.json"), &grid)?;
    }
    let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    println!("max relative error {worst:.2e} (tolerance {VALIDATION_TOLERANCE:.0e})");
    if worst <= VALIDATION_TOLERANCE {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "relative error {worst:.2e} exceeds {VALIDATION_TOLERANCE:.0e}"
        )))
    }
}

fn cmd_plan(args: &RunArgs) -> Result<(), CliError> {
    if args.policy == Policy::FixedStation {
        return Err(CliError::Usage("plan needs an arm policy (diff or uniform)".into()));
    }
    let (scene, effective) = effective_scene(args)?;
    prepare_out(&args.out)?;
    write_json(&args.out.join("effective_scene.json"), &effective)?;
    let ctx = MissionContext::build(&scene)?;
    let outcome = ctx.run(args.policy)?;
    let plan = outcome.plan.as_ref().expect("arm policies produce a plan");
    write_json(&args.out.join("plan.json"), plan)?;
    for (i, visit) in plan.visits.iter().enumerate() {
        let path = args.out.join(format!("speed_{i:02}_{}.csv", visit.site.object_id));
        let mut w = create(&path)?;
        write_speed_csv(&mut w, &visit.profile).map_err(io(&path))?;
    }
    let ply = args.out.join("dose.ply");
    write_ply(create(&ply)?, &outcome.points).map_err(io(&ply))?;
    let csv = args.out.join("dose_report.csv");
    write_dose_report_csv(create(&csv)?, &outcome.points, &outcome.report.targets).map_err(io(&csv))?;
    write_json(&args.out.join("report.json"), &outcome.report)?;
    println!("{}", crate::simulator::format_table(std::slice::from_ref(&outcome.report)));
    let below = outcome.report.points_below_target;
    if below == 0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!("{below} surface points below their dose target")))
    }
}

fn cmd_simulate(args: &RunArgs) -> Result<(), CliError> {
    let (scene, effective) = effective_scene(args)?;
    prepare_out(&args.out)?;
    write_json(&args.out.join("effective_scene.json"), &effective)?;
    let outcome = MissionContext::build(&scene)?.run(args.policy)?;
    write_json(&args.out.join("report.json"), &outcome.report)?;
    let ply = args.out.join("dose.ply");
    write_ply(create(&ply)?, &outcome.points).map_err(io(&ply))?;
    print!("{}", crate::simulator::format_table(std::slice::from_ref(&outcome.report)));
    Ok(())
}

fn cmd_compare(args: &RunArgs) -> Result<(), CliError> {
    let (scene, effective) = effective_scene(args)?;
    prepare_out(&args.out)?;
    write_json(&args.out.join("effective_scene.json"), &effective)?;
    let ctx = MissionContext::build(&scene)?;
    let policies: &[Policy] = if scene.station.positions.is_empty() {
        log::warn!("scene has no station positions; skipping the fixed-station policy");
        &[Policy::Differentiated, Policy::UniformHigh]
    } else {
        &Policy::ALL
    };
    let (comparison, _) = ctx.compare(policies)?;
    write_json(&args.out.join("comparison.json"), &comparison)?;
    let table = comparison.table();
    fs::write(args.out.join("comparison.txt"), &table).map_err(io(&args.out))?;
    print!("{table}");
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.input).map_err(io(&args.input))?;
    if let Ok(c) = serde_json::from_str::<Comparison>(&text) {
        print!("{}", c.table());
        return Ok(());
    }
    let r: MissionReport = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: not a report or comparison: {e}", args.input.display())))?;
    print!("{}", crate::simulator::format_table(std::slice::from_ref(&r)));
    Ok(())
}

fn init_logging() {
    let env = env_logger::Env::new().filter_or("UVDOSE_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::ValidateIrradiance(a) => cmd_validate(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            e.code()
        }
    }
}
