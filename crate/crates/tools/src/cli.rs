//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use vertebra_core::constraints::pose_feasible;
use vertebra_core::differential::{
    forward_velocity, inverse_jacobian, inverse_velocity, isotropy_check, jacobians, singularity_report, SingularityKind, DEFAULT_SINGULARITY_EPS,
};
use vertebra_core::kinematics::{
    direct_kinematics, direct_kinematics_all, direct_kinematics_numeric, inverse_kinematics, inverse_kinematics_all,
    AssemblySelect, WorkingMode,
};
use vertebra_core::linalg::{to_radians, Vec3, TAU};
use vertebra_core::mechanism::{closure_residuals, leg_points, DesignVariant, JointAngles};
use vertebra_core::orientation::{Orientation, RpyAngles};
use vertebra_core::workspace::{check_design_targets, joint_space_cloud, slice_orientation, sweep_workspace};

use crate::calibrate::{self, SearchGrid, PUBLISHED};
use crate::config::{ExportFormat, Resolved, RunConfig};
use crate::error::CliError;
use crate::export;
use crate::format::{num, nums, parse_angle, parse_triple, Units};
use crate::parallel::Runner;
use crate::report;

#[derive(Debug, Parser)]
#[command(name = "vertebra", version, about = "Kinematics and workspace of a 3-DOF spherical parallel wrist")]
pub struct Cli {
    /// JSON run configuration ("format": 1).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Design variant, overriding the config.
    #[arg(long, global = true)]
    pub variant: Option<String>,
    /// Read and print angles in radians instead of degrees.
    #[arg(long, global = true)]
    pub radians: bool,
    /// Worker threads for ray evaluation (1 = serial).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Direct kinematics: joint angles to platform orientation.
    Fk(FkArgs),
    /// Inverse kinematics: orientation to joint angles.
    Ik(IkArgs),
    /// Jacobians, singularity classification and isotropy at a pose.
    Jac(JacArgs),
    /// Mechanical feasibility of a pose.
    Check(PoseArgs),
    /// Scan one torsion slice for parallel and serial singularities.
    SingularScan(ScanArgs),
    /// Sweep the orientation workspace and export it.
    Workspace(WorkspaceArgs),
    /// Sweep the workspace and export the boundary joint-space cloud.
    Jointspace(JointspaceArgs),
    /// Check a yaw/pitch/roll target box for feasibility.
    Targets(TargetArgs),
    /// Re-derive the constraint defaults from the published ranges.
    Calibrate(CalibrateArgs),
    /// Print the built-in default configuration.
    DefaultConfig,
}

#[derive(Debug, Args)]
pub struct FkArgs {
    /// Joint angles t1,t2,t3.
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    /// List every solution branch.
    #[arg(long)]
    pub all: bool,
    /// Assembly sign for the single-solution query: home, + or -.
    #[arg(long, default_value = "home", allow_hyphen_values = true)]
    pub assembly: String,
}

#[derive(Debug, Args)]
pub struct IkArgs {
    /// Orientation as yaw,pitch,roll.
    #[arg(long, allow_hyphen_values = true)]
    pub rpy: String,
    #[arg(long)]
    pub all: bool,
    /// Working mode such as ++ or +-; defaults to the home mode.
    #[arg(long, allow_hyphen_values = true)]
    pub mode: Option<String>,
}

#[derive(Debug, Args)]
pub struct PoseArgs {
    /// Orientation as yaw,pitch,roll; defaults to home.
    #[arg(long, allow_hyphen_values = true)]
    pub rpy: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub mode: Option<String>,
}

#[derive(Debug, Args)]
pub struct JacArgs {
    #[command(flatten)]
    pub pose: PoseArgs,
    /// Joint rates to map to an angular velocity (unit-free, per second).
    #[arg(long, allow_hyphen_values = true)]
    pub qdot: Option<String>,
    /// Angular velocity to map to joint rates.
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Torsion of the scanned slice.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub torsion: String,
    /// Grid spacing in tilt and azimuth.
    #[arg(long, default_value = "5")]
    pub step: String,
    #[arg(long, default_value = "90")]
    pub max_tilt: String,
    /// Threshold on |det A| and |det B|.
    #[arg(long, default_value_t = DEFAULT_SINGULARITY_EPS)]
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Obj,
}

#[derive(Debug, Args)]
pub struct WorkspaceArgs {
    /// Output directory (created if missing); summary only when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Also write the joint-space cloud.
    #[arg(long)]
    pub jointspace: bool,
    #[arg(long)]
    pub n_psi: Option<usize>,
    #[arg(long)]
    pub n_phi: Option<usize>,
}

#[derive(Debug, Args)]
pub struct JointspaceArgs {
    /// Output CSV file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Inward safety offset, in the angle unit.
    #[arg(long)]
    pub offset: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TargetArgs {
    #[arg(long, default_value = "30")]
    pub yaw: String,
    #[arg(long, default_value = "15")]
    pub pitch: String,
    #[arg(long, default_value = "4")]
    pub roll: String,
    /// Samples per axis.
    #[arg(long, default_value_t = 11)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Small search grid and sweep, for smoke runs.
    #[arg(long)]
    pub coarse: bool,
}

/// Parses arguments, runs, and returns the exit status.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() { write!(stderr, "{e}") } else { write!(stdout, "{e}") };
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

struct Ctx {
    res: Resolved,
    units: Units,
}

fn context(cli: &Cli) -> Result<Ctx, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &cli.variant {
        if DesignVariant::from_tag(v).is_none() {
            return Err(CliError::Usage(format!("unknown variant '{v}'")));
        }
        cfg.geometry.variant = v.clone();
    }
    let units = if cli.radians { Units::Radians } else { Units::Degrees };
    Ok(Ctx { res: cfg.resolve()?, units })
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn print(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).expect("json serializes");
    writeln!(out, "{s}")?;
    Ok(())
}

fn parse_mode(m: &str) -> Result<WorkingMode, CliError> {
    WorkingMode::parse(m).ok_or_else(|| CliError::Usage(format!("mode must look like ++ or +-, got '{m}'")))
}

fn pose(ctx: &Ctx, rpy: &Option<String>) -> Result<Orientation, CliError> {
    match rpy {
        None => Ok(ctx.res.geometry.home.orientation),
        Some(s) => {
            let [y, p, r] = parse_triple(s, ctx.units).map_err(usage)?;
            Ok(Orientation::from_rpy(RpyAngles::new(y, p, r)))
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    if let Command::DefaultConfig = cli.command {
        writeln!(out, "{}", RunConfig::default().to_json())?;
        return Ok(());
    }
    let ctx = context(cli)?;
    let g = &ctx.res.geometry;
    let u = ctx.units;
    match &cli.command {
        Command::Fk(a) => {
            let q = JointAngles::from_array(parse_triple(&a.q, u).map_err(usage)?);
            let closed = g.variant == DesignVariant::ParallelActuators;
            if a.all {
                if !closed {
                    return Err(vertebra_core::error::Error::NoClosedForm.into());
                }
                let set = direct_kinematics_all(g, &q)?;
                let sols: Vec<Value> = set.solutions.iter().map(|s| report::fk_solution(s, u)).collect();
                print(out, &json!({"joints": report::joints(&q, u), "count": sols.len(), "solutions": sols}))
            } else {
                let o = if closed {
                    let select = match a.assembly.as_str() {
                        "home" => AssemblySelect::Home,
                        "+" => AssemblySelect::Sign(1),
                        "-" => AssemblySelect::Sign(-1),
                        other => return Err(CliError::Usage(format!("assembly must be home, + or -, got '{other}'"))),
                    };
                    direct_kinematics(g, &q, select)?
                } else {
                    direct_kinematics_numeric(g, &q, &g.home.orientation)?.orientation
                };
                print(
                    out,
                    &json!({
                        "joints": report::joints(&q, u),
                        "orientation": report::orientation(&o, u),
                        "residuals": nums(&closure_residuals(g, &q, &o)),
                    }),
                )
            }
        }
        Command::Ik(a) => {
            let o = pose(&ctx, &Some(a.rpy.clone()))?;
            if a.all {
                let set = inverse_kinematics_all(g, &o)?;
                let sols: Vec<Value> = set.solutions.iter().map(|s| report::ik_solution(s, u)).collect();
                print(out, &json!({"orientation": report::orientation(&o, u), "count": sols.len(), "solutions": sols}))
            } else {
                let mode = match &a.mode {
                    Some(m) => parse_mode(m)?,
                    None => g.home.working_mode,
                };
                let q = inverse_kinematics(g, &o, mode)?;
                print(
                    out,
                    &json!({
                        "orientation": report::orientation(&o, u),
                        "mode": report::mode_label(mode.label()),
                        "joints": report::joints(&q, u),
                        "residuals": nums(&closure_residuals(g, &q, &o)),
                    }),
                )
            }
        }
        Command::Jac(a) => {
            let o = pose(&ctx, &a.pose.rpy)?;
            let mode = a.pose.mode.as_deref().map(parse_mode).transpose()?.unwrap_or(g.home.working_mode);
            let q = inverse_kinematics(g, &o, mode)?;
            let state = leg_points(g, &q, &o);
            let jp = jacobians(&state);
            let inv = inverse_jacobian(&state, DEFAULT_SINGULARITY_EPS).ok();
            let mut v = json!({
                "orientation": report::orientation(&o, u),
                "joints": report::joints(&q, u),
                "jacobians": report::jacobians(&jp, inv.as_ref()),
                "singularity": report::singularity(&singularity_report(&state, DEFAULT_SINGULARITY_EPS)),
                "isotropy": report::isotropy(&isotropy_check(&state, 1e-9)),
            });
            if let Some(s) = &a.qdot {
                let dq = Vec3(parse_rates(s)?);
                let w = forward_velocity(&state, &dq, DEFAULT_SINGULARITY_EPS)
                    .ok_or(vertebra_core::error::Error::ParallelSingular { det_a: jp.det_a() })?;
                v["qdot"] = nums(&dq.0);
                v["omega"] = nums(&w.0);
            }
            if let Some(s) = &a.omega {
                let w = Vec3(parse_rates(s)?);
                v["omega_in"] = nums(&w.0);
                v["qdot_out"] = nums(&inverse_velocity(&state, &w, DEFAULT_SINGULARITY_EPS)?.0);
            }
            print(out, &v)
        }
        Command::Check(a) => {
            let o = pose(&ctx, &a.rpy)?;
            let rep = pose_feasible(g, &o, &ctx.res.constraints);
            let mut v = report::feasibility(&rep, u);
            v["orientation"] = report::orientation(&o, u);
            print(out, &v)
        }
        Command::SingularScan(a) => singular_scan(&ctx, a, out),
        Command::Workspace(a) => {
            let mut sweep = ctx.res.sweep;
            if let Some(n) = a.n_psi {
                sweep.n_psi = n;
            }
            if let Some(n) = a.n_phi {
                sweep.n_phi = n;
            }
            let runner = Runner::new(cli.threads);
            let map = sweep_workspace(g, &ctx.res.constraints, &sweep, &runner)?;
            let fmt = match a.format {
                Some(FormatArg::Csv) => ExportFormat::Csv,
                Some(FormatArg::Json) => ExportFormat::Json,
                Some(FormatArg::Obj) => ExportFormat::Obj,
                None => ctx.res.output,
            };
            let mut summary = report::workspace_summary(&map, u);
            summary["range_check"] = calibrate::endpoints_json(&calibrate::check_ranges(&map, &PUBLISHED));
            if let Some(dir) = &a.out {
                std::fs::create_dir_all(dir)?;
                let (name, body) = match fmt {
                    ExportFormat::Csv => ("workspace.csv", export::workspace_csv(&map)),
                    ExportFormat::Json => ("workspace.json", export::workspace_json(&map, u)),
                    ExportFormat::Obj => ("workspace.obj", export::workspace_obj(&map)),
                };
                write_file(&dir.join(name), &body)?;
                let mut files = vec![name.to_string()];
                if a.jointspace {
                    write_file(&dir.join("jointspace.csv"), &export::joint_cloud_csv(&joint_space_cloud(&map, None)))?;
                    files.push("jointspace.csv".into());
                }
                summary["files"] = json!(files);
            }
            print(out, &summary)
        }
        Command::Jointspace(a) => {
            let runner = Runner::new(cli.threads);
            let map = sweep_workspace(g, &ctx.res.constraints, &ctx.res.sweep, &runner)?;
            let cloud = joint_space_cloud(&map, a.offset.map(|o| u.to_rad(o)));
            let body = export::joint_cloud_csv(&cloud);
            match &a.out {
                Some(p) => {
                    write_file(p, &body)?;
                    print(out, &json!({"points": cloud.len(), "file": p.display().to_string()}))
                }
                None => {
                    out.write_all(body.as_bytes())?;
                    Ok(())
                }
            }
        }
        Command::Targets(a) => {
            let p = |s: &str| parse_angle(s, u).map_err(usage);
            let t = RpyAngles::new(p(&a.yaw)?, p(&a.pitch)?, p(&a.roll)?);
            if t.yaw < 0.0 || t.pitch < 0.0 || t.roll < 0.0 {
                return Err(CliError::Usage("target half-ranges must be non-negative".into()));
            }
            let r = check_design_targets(g, &ctx.res.constraints, t, a.grid);
            print(out, &report::targets(&r, u))
        }
        Command::Calibrate(a) => {
            let runner = Runner::new(cli.threads);
            let (grid, mut sweep) = if a.coarse {
                (SearchGrid::coarse(), ctx.res.sweep)
            } else {
                (SearchGrid::standard(), ctx.res.sweep)
            };
            if a.coarse {
                sweep.n_phi = 24;
                sweep.tilt_step = to_radians(1.0);
            }
            let best = calibrate::search(g, &sweep, &grid, &runner, &PUBLISHED)
                .ok_or(vertebra_core::error::Error::EmptyWorkspace)?;
            let cfg = crate::config::ConstraintConfig::from_params(&best.params, u);
            print(
                out,
                &json!({
                    "lima_b": num(best.lima_b_deg),
                    "lima_c": num(best.lima_c_deg),
                    "limd": num(best.params.limd),
                    "clearance": num(best.params.clearance),
                    "endpoints_met": best.met,
                    "endpoints_total": best.endpoints.len(),
                    "total_error_deg": num(best.error),
                    "endpoints": calibrate::endpoints_json(&best.endpoints),
                    "constraints": serde_json::to_value(cfg).expect("config serializes"),
                }),
            )
        }
        Command::DefaultConfig => unreachable!(),
    }
}

fn parse_rates(s: &str) -> Result<[f64; 3], CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    let vals: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if v.len() == 3 => Ok([v[0], v[1], v[2]]),
        _ => Err(CliError::Usage(format!("expected three comma-separated rates, got '{s}'"))),
    }
}

fn write_file(p: &Path, body: &str) -> Result<(), CliError> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(p, body)?;
    Ok(())
}

fn singular_scan(ctx: &Ctx, a: &ScanArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let u = ctx.units;
    let g = &ctx.res.geometry;
    let torsion = parse_angle(&a.torsion, u).map_err(usage)?;
    let step = parse_angle(&a.step, u).map_err(usage)?;
    let max_tilt = parse_angle(&a.max_tilt, u).map_err(usage)?;
    if !(step > 0.0 && max_tilt >= 0.0) {
        return Err(CliError::Usage("step must be positive".into()));
    }
    let n_tilt = (max_tilt / step).round() as usize;
    let n_az = ((TAU / step).round() as usize).max(1);
    let (mut samples, mut unreachable) = (0usize, 0usize);
    let mut hits = Vec::new();
    let (mut min_a, mut min_b) = (f64::INFINITY, f64::INFINITY);
    for i in 0..=n_tilt {
        let tilt = i as f64 * step;
        let count = if i == 0 { 1 } else { n_az };
        for j in 0..count {
            let az = TAU * j as f64 / n_az as f64;
            let o = slice_orientation(g, az, tilt, torsion);
            samples += 1;
            let Ok(q) = inverse_kinematics(g, &o, g.home.working_mode) else {
                unreachable += 1;
                continue;
            };
            let r = singularity_report(&leg_points(g, &q, &o), a.eps);
            min_a = min_a.min(r.det_a.abs());
            min_b = min_b.min(r.det_b.abs());
            if r.kind != SingularityKind::Regular {
                hits.push(json!({
                    "azimuth": u.angle(az),
                    "tilt": u.angle(tilt),
                    "singularity": report::singularity(&r),
                }));
            }
        }
    }
    print(
        out,
        &json!({
            "torsion": u.angle(torsion),
            "samples": samples,
            "unreachable": unreachable,
            "min_abs_det_a": num(min_a),
            "min_abs_det_b": num(min_b),
            "singular": hits,
        }),
    )
}
