//! `rcjhand` command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rcjhand::actuation::pose_to_motor;
use rcjhand::cable::cable_deviation;
use rcjhand::config::{default_config, load_config, HandConfig};
use rcjhand::io::{self, fixed, Provenance, RadiusRow};
use rcjhand::kinematics::{finger_fk, FingerFrames, RomMode};
use rcjhand::radius::{minimizers, sweep, RadiusProblem, DEFAULT_MINIMIZER, DEFAULT_STEP_DEG};
use rcjhand::trajectory::{
    generate_trajectory, interpolators, trajectory_rmse, DEFAULT_INTERPOLATOR,
};
use rcjhand::workspace::{
    opposability_index, sample_workspace, SamplerSpec, DEFAULT_EDGE_MM, DEFAULT_SAMPLER,
    DEFAULT_STEPS,
};
use rcjhand::{Error, FingerAngles, FingerName, Pose};

#[derive(Parser)]
#[command(
    name = "rcjhand",
    version,
    about = "Rolling-contact-joint hand toolkit"
)]
struct Cli {
    /// Hand configuration (TOML); the built-in design when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Artifact directory.
    #[arg(long, global = true, env = "RCJHAND_OUT", default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize the configuration and write its canonical form.
    Describe,
    /// Forward kinematics of one finger.
    Fk(FkArgs),
    /// Cable deviation of one joint across its ROM.
    CableSweep(CableSweepArgs),
    /// Optimal rolling radius for one joint, or for every configured joint.
    OptimizeRadius(OptimizeArgs),
    /// Optimal radius over a κ × β grid.
    Sweep(SweepArgs),
    /// Reachable workspace of one finger as a voxel point cloud.
    Workspace(WorkspaceArgs),
    /// Thumb opposability index.
    Opposability(OpposabilityArgs),
    /// Interpolate through presets and record tips and motor angles.
    Simulate(SimulateArgs),
    /// RMSE between two trajectory CSV files.
    Rmse(RmseArgs),
    /// List presets.
    Presets,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    Clamp,
    Unchecked,
}

impl From<Mode> for RomMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Strict => RomMode::Strict,
            Mode::Clamp => RomMode::Clamp,
            Mode::Unchecked => RomMode::Unchecked,
        }
    }
}

#[derive(Args)]
struct FkArgs {
    #[arg(long)]
    finger: FingerName,
    /// Four joint angles in degrees: deviation then three flexions.
    #[arg(long, value_parser = four, allow_hyphen_values = true, conflicts_with = "preset")]
    angles: Option<[f64; 4]>,
    /// Take the angles from a preset instead.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_enum, default_value = "strict")]
    mode: Mode,
    /// Report frames in the palm frame rather than the finger frame.
    #[arg(long)]
    palm: bool,
}

#[derive(Args)]
struct CableSweepArgs {
    #[arg(long)]
    finger: FingerName,
    /// Joint index 0..=3.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..4))]
    joint: u8,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.5)]
    step: f64,
    /// Evaluate at this radius instead of the configured one.
    #[arg(long, allow_negative_numbers = true)]
    radius: Option<f64>,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Flexion hole offset κ, mm.
    #[arg(long, allow_negative_numbers = true, requires = "beta", conflicts_with_all = ["gamma", "report"])]
    kappa: Option<f64>,
    /// Flexion surface angle β (ROM 0..2β), deg.
    #[arg(long, allow_negative_numbers = true, requires = "kappa")]
    beta: Option<f64>,
    /// Deviation hole spacing γ, mm.
    #[arg(
        long,
        allow_negative_numbers = true,
        requires = "alpha",
        conflicts_with = "report"
    )]
    gamma: Option<f64>,
    /// Deviation surface angle α (ROM ±2α), deg.
    #[arg(long, allow_negative_numbers = true, requires = "gamma")]
    alpha: Option<f64>,
    /// Optimize every joint of the configuration and report deltas.
    #[arg(long)]
    report: bool,
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_STEP_DEG)]
    step: f64,
    #[arg(long, default_value = DEFAULT_MINIMIZER)]
    minimizer: String,
}

#[derive(Args)]
struct SweepArgs {
    /// κ values, mm: a list `6,7,8` or a range `6:13:1`.
    #[arg(long, default_value = "6:13:1")]
    kappa: String,
    /// β values, deg: a list or a range.
    #[arg(long, default_value = "30:60:10")]
    beta: String,
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_STEP_DEG)]
    step: f64,
    #[arg(long, default_value = DEFAULT_MINIMIZER)]
    minimizer: String,
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, default_value = DEFAULT_SAMPLER)]
    sampler: String,
    /// Grid nodes per joint.
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Point count for the halton sampler.
    #[arg(long)]
    samples: Option<usize>,
    /// Voxel edge, mm.
    #[arg(long, allow_negative_numbers = true, default_value_t = DEFAULT_EDGE_MM)]
    edge: f64,
}

impl SamplingArgs {
    fn spec(&self) -> SamplerSpec {
        SamplerSpec {
            sampler: self.sampler.clone(),
            steps: self.steps,
            samples: self.samples,
            edge: self.edge,
        }
    }
}

#[derive(Args)]
struct WorkspaceArgs {
    #[arg(long)]
    finger: FingerName,
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Args)]
struct OpposabilityArgs {
    /// Weights for index, middle, ring, little.
    #[arg(long, value_parser = four, default_value = "1,1,1,1")]
    weights: [f64; 4],
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Presets to pass through, in order.
    #[arg(long, value_delimiter = ',', default_value = "open,power-sphere,open")]
    presets: Vec<String>,
    /// Seconds per segment; one value applies to every segment.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    durations: Vec<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 100.0)]
    rate: f64,
    #[arg(long, default_value = DEFAULT_INTERPOLATOR)]
    interp: String,
}

#[derive(Args)]
struct RmseArgs {
    a: PathBuf,
    b: PathBuf,
    /// Time-shift search window, s.
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    window: f64,
    /// Moving-average width, samples.
    #[arg(long, default_value_t = 1)]
    smooth: usize,
}

/// Exactly four comma-separated numbers.
fn four(s: &str) -> Result<[f64; 4], String> {
    let v = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    v.try_into()
        .map_err(|v: Vec<f64>| format!("expected 4 comma-separated values, got {}", v.len()))
}

struct Ctx {
    config: HandConfig,
    prov: Provenance,
    out: PathBuf,
}

impl Ctx {
    fn write(&self, name: &str, text: &str) -> Result<PathBuf, Error> {
        fs::create_dir_all(&self.out)
            .map_err(|e| Error::Io(format!("{}: {e}", self.out.display())))?;
        let path = self.out.join(name);
        fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}

/// `lo:hi:step` or a comma list.
fn parse_values(s: &str, what: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::Validation(format!("bad {what} values `{s}`"));
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(bad)
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [lo, hi, step] => {
            let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
            if step <= 0.0 || hi < lo {
                return Err(bad());
            }
            let n = ((hi - lo) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|k| lo + step * k as f64).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(bad()),
    }
}

fn describe(ctx: &Ctx) -> Result<String, Error> {
    let text = ctx.config.to_document().to_toml()?;
    let path = ctx.write("config.toml", &text)?;
    let h = &ctx.config.hand;
    let radii = |f: FingerName| {
        h.finger(f)
            .joints
            .iter()
            .map(|j| fixed(j.radius, 2))
            .collect::<Vec<_>>()
            .join("/")
    };
    Ok(format!(
        "hand: thumb r={} finger r={} d={} mm, {} presets, sha256={} -> {}",
        radii(FingerName::Thumb),
        radii(FingerName::Index),
        fixed(h.thumb_length, 1),
        ctx.config.presets.len(),
        &ctx.prov.config_sha256[..12],
        path.display()
    ))
}

fn fk(ctx: &Ctx, a: &FkArgs) -> Result<String, Error> {
    let angles = match (&a.angles, &a.preset) {
        (Some(v), _) => FingerAngles(*v),
        (None, Some(p)) => *ctx.config.presets.get(p)?.finger(a.finger),
        (None, None) => FingerAngles::ZERO,
    };
    let mut frames = finger_fk(ctx.config.hand.finger(a.finger), &angles, a.mode.into())?;
    if a.palm {
        let p = ctx.config.hand.placement(a.finger);
        frames = FingerFrames(frames.0.map(|f| p.compose(&f)));
    }
    let path = ctx.write(
        &format!("fk_{}.csv", a.finger),
        &io::fk_csv(&ctx.prov, &frames)?,
    )?;
    let t = frames.tip().translation;
    Ok(format!(
        "{} tip = ({}, {}, {}) mm -> {}",
        a.finger,
        fixed(t.x, 6),
        fixed(t.y, 6),
        fixed(t.z, 6),
        path.display()
    ))
}

fn cable_sweep(ctx: &Ctx, a: &CableSweepArgs) -> Result<String, Error> {
    if !(a.step.is_finite() && a.step > 0.0) {
        return Err(Error::Validation("step must be positive".into()));
    }
    let joint = ctx.config.hand.finger(a.finger).joints[a.joint as usize];
    if let Some(r) = a.radius {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Validation("r > 0 required".into()));
        }
    }
    let r = a.radius.unwrap_or(joint.radius);
    let n = ((joint.rom_max - joint.rom_min) / a.step + 1e-9).floor() as usize;
    let mut angles: Vec<f64> = (0..=n).map(|k| joint.rom_min + a.step * k as f64).collect();
    if joint.rom_max - angles[n] > 1e-9 {
        angles.push(joint.rom_max);
    }
    let mut rows = Vec::with_capacity(angles.len());
    let mut worst: f64 = 0.0;
    for deg in angles {
        let d = cable_deviation(&joint, deg, Some(r))?;
        worst = worst.max(d.sum().abs());
        rows.push((deg, r, d));
    }
    let name = format!("cable_sweep_{}_j{}.csv", a.finger, a.joint);
    let path = ctx.write(&name, &io::cable_sweep_csv(&ctx.prov, &rows)?)?;
    Ok(format!(
        "{} joint {} r = {} mm: max |closing + opening| = {} mm -> {}",
        a.finger,
        a.joint,
        fixed(r, 4),
        fixed(worst, 6),
        path.display()
    ))
}

fn optimize(ctx: &Ctx, a: &OptimizeArgs) -> Result<String, Error> {
    let search = minimizers().create(&a.minimizer)?;
    if a.report {
        let mut rows = Vec::new();
        for f in FingerName::ALL {
            let finger = ctx.config.hand.finger(f);
            for (j, label) in finger.joints.iter().zip(finger.joint_labels()) {
                let problem = RadiusProblem::for_joint(j).with_step(a.step);
                rows.push(RadiusRow {
                    finger: f,
                    joint: label,
                    offset: problem.offset,
                    rom_min: j.rom_min,
                    rom_max: j.rom_max,
                    configured: j.radius,
                    optimum: search.minimize(&problem)?,
                });
            }
        }
        let worst = rows.iter().map(|r| r.delta().abs()).fold(0.0, f64::max);
        let residual = rows.iter().map(|r| r.optimum.residual).fold(0.0, f64::max);
        let path = ctx.write(
            "radius_report.csv",
            &io::radius_report_csv(&ctx.prov, &rows)?,
        )?;
        return Ok(format!(
            "{} joints: max |r_opt - r| = {} mm, max residual = {} mm -> {}",
            rows.len(),
            fixed(worst, 4),
            fixed(residual, 6),
            path.display()
        ));
    }
    let problem = match (a.kappa, a.beta, a.gamma, a.alpha) {
        (Some(k), Some(b), None, None) => RadiusProblem::flexion(k, b),
        (None, None, Some(g), Some(al)) => RadiusProblem::deviation(g, 2.0 * al),
        _ => {
            return Err(Error::Validation(
                "give --kappa and --beta, --gamma and --alpha, or --report".into(),
            ))
        }
    }
    .with_step(a.step);
    let opt = search.minimize(&problem)?;
    let text = io::radius_csv(&ctx.prov, &problem, &opt)?;
    let path = ctx.write("radius.csv", &text)?;
    Ok(format!(
        "r* = {} mm, residual = {} mm ({} evaluations) -> {}",
        fixed(opt.radius, 6),
        fixed(opt.residual, 6),
        opt.evaluations,
        path.display()
    ))
}

fn run_sweep(ctx: &Ctx, a: &SweepArgs) -> Result<String, Error> {
    let kappas = parse_values(&a.kappa, "kappa")?;
    let betas = parse_values(&a.beta, "beta")?;
    let search = minimizers().create(&a.minimizer)?;
    let result = sweep(&kappas, &betas, a.step, search.as_ref())?;
    let path = ctx.write("sweep.csv", &io::sweep_csv(&ctx.prov, &result)?)?;
    Ok(format!(
        "{} cells, {} failed, max residual = {} mm -> {}",
        result.cells.len(),
        result.failures(),
        fixed(result.max_residual(), 6),
        path.display()
    ))
}

fn workspace(ctx: &Ctx, a: &WorkspaceArgs) -> Result<String, Error> {
    let grid = sample_workspace(&ctx.config.hand, a.finger, &a.sampling.spec())?;
    let name = format!("workspace_{}.csv", a.finger);
    let path = ctx.write(&name, &io::workspace_csv(&ctx.prov, &grid)?)?;
    Ok(format!(
        "{} workspace: {} voxels, {} cm3 -> {}",
        a.finger,
        grid.count(),
        fixed(grid.volume_cm3(), 3),
        path.display()
    ))
}

fn opposability(ctx: &Ctx, a: &OpposabilityArgs) -> Result<String, Error> {
    let r = opposability_index(&ctx.config.hand, a.weights, &a.sampling.spec())?;
    let path = ctx.write("opposability.json", &io::opposability_json(&ctx.prov, &r)?)?;
    let s = r.shared_cm3.map(|v| fixed(v, 1));
    Ok(format!(
        "J = {} (shared {} / {} / {} / {} cm3) -> {}",
        fixed(r.index, 4),
        s[0],
        s[1],
        s[2],
        s[3],
        path.display()
    ))
}

fn simulate(ctx: &Ctx, a: &SimulateArgs) -> Result<String, Error> {
    let poses = a
        .presets
        .iter()
        .map(|n| ctx.config.presets.get(n))
        .collect::<Result<Vec<Pose>, _>>()?;
    let durations = if a.durations.len() == 1 {
        vec![a.durations[0]; poses.len() - 1]
    } else {
        a.durations.clone()
    };
    let interp = interpolators().create(&a.interp)?;
    let traj = generate_trajectory(
        &ctx.config.hand,
        &poses,
        &durations,
        a.rate,
        interp.as_ref(),
    )?;
    let motors = traj
        .poses
        .iter()
        .map(|p| pose_to_motor(&ctx.config.hand, p, &ctx.config.actuator))
        .collect::<Result<Vec<_>, _>>()?;
    let tpath = ctx.write(
        "trajectory.csv",
        &io::trajectory_csv(&ctx.prov, &traj.path)?,
    )?;
    let text = io::motors_csv(
        &ctx.prov,
        &traj.times,
        &motors,
        ctx.config.actuator.bobbin_radius,
    )?;
    ctx.write("motors.csv", &text)?;
    Ok(format!(
        "{} samples over {} s -> {} and motors.csv",
        traj.times.len(),
        fixed(*traj.times.last().unwrap(), 3),
        tpath.display()
    ))
}

fn rmse(ctx: &Ctx, a: &RmseArgs) -> Result<String, Error> {
    let pa = io::load_trajectory(&a.a)?;
    let pb = io::load_trajectory(&a.b)?;
    let r = trajectory_rmse(&pa, &pb, a.window, a.smooth)?;
    let path = ctx.write("rmse.json", &io::rmse_json(&ctx.prov, &r)?)?;
    Ok(format!(
        "RMSE = {} mm (shift {} s) -> {}",
        fixed(r.aggregate, 6),
        fixed(r.shift, 6),
        path.display()
    ))
}

fn presets(ctx: &Ctx) -> Result<String, Error> {
    let path = ctx.write(
        "presets.csv",
        &io::presets_csv(&ctx.prov, &ctx.config.presets)?,
    )?;
    let names: Vec<&str> = ctx.config.presets.names().collect();
    Ok(format!(
        "{} presets: {} -> {}",
        names.len(),
        names.join(", "),
        path.display()
    ))
}

fn load(path: Option<&Path>) -> Result<HandConfig, Error> {
    match path {
        Some(p) => load_config(p),
        None => Ok(default_config()),
    }
}

fn run(cli: &Cli) -> Result<String, Error> {
    let config = load(cli.config.as_deref())?;
    let ctx = Ctx {
        prov: Provenance::of(&config)?,
        config,
        out: cli.out.clone(),
    };
    match &cli.command {
        Command::Describe => describe(&ctx),
        Command::Fk(a) => fk(&ctx, a),
        Command::CableSweep(a) => cable_sweep(&ctx, a),
        Command::OptimizeRadius(a) => optimize(&ctx, a),
        Command::Sweep(a) => run_sweep(&ctx, a),
        Command::Workspace(a) => workspace(&ctx, a),
        Command::Opposability(a) => opposability(&ctx, a),
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Rmse(a) => rmse(&ctx, a),
        Command::Presets => presets(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
