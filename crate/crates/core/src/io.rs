//! CSV and JSON artifacts.
//!
//! Every artifact starts with a `#` comment row naming the tool version
//! and the SHA-256 of the canonical configuration. Numbers use fixed
//! decimals so output is byte-stable.

use std::path::Path;

use nalgebra::Vector3;
use serde_json::json;

use crate::actuation::MotorState;
use crate::cable::FaceDeviation;
use crate::config::HandConfig;
use crate::error::{Error, Result};
use crate::geometry::FingerName;
use crate::kinematics::FingerFrames;
use crate::presets::PresetCatalog;
use crate::radius::{RadiusOptimum, RadiusProblem, SweepResult};
use crate::trajectory::{RmseReport, TipPath};
use crate::workspace::{OpposabilityReport, VoxelGrid};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const SWEEP_HEADER: [&str; 4] = ["kappa_mm", "beta_deg", "r_opt_mm", "residual_mm"];
pub const TRAJECTORY_HEADER: [&str; 5] = ["t_s", "finger", "tip_x_mm", "tip_y_mm", "tip_z_mm"];
pub const WORKSPACE_HEADER: [&str; 3] = ["x_mm", "y_mm", "z_mm"];

/// Tool version and configuration hash stamped on every artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub version: String,
    pub config_sha256: String,
}

impl Provenance {
    pub fn of(config: &HandConfig) -> Result<Self> {
        Ok(Self {
            version: TOOL_VERSION.to_string(),
            config_sha256: config.digest()?,
        })
    }

    pub fn line(&self) -> String {
        format!(
            "# rcjhand {} config sha256={}",
            self.version, self.config_sha256
        )
    }
}

/// `{x:.prec}` without a negative zero.
pub fn fixed(x: f64, prec: usize) -> String {
    let s = format!("{x:.prec$}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_csv<I, R>(prov: &Provenance, header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut buf = prov.line().into_bytes();
    buf.push(b'\n');
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    let buf = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
}

fn vec3(v: &Vector3<f64>) -> [String; 3] {
    [fixed(v.x, 6), fixed(v.y, 6), fixed(v.z, 6)]
}

/// Frame origins and rotation columns of one finger chain.
pub fn fk_csv(prov: &Provenance, frames: &FingerFrames) -> Result<String> {
    let header = [
        "frame", "x_mm", "y_mm", "z_mm", "r11", "r12", "r13", "r21", "r22", "r23", "r31", "r32",
        "r33",
    ];
    let rows = frames.iter().map(|(name, t)| {
        let mut row = vec![name.to_string()];
        row.extend(vec3(&t.translation));
        for i in 0..3 {
            for j in 0..3 {
                row.push(fixed(t.rotation[(i, j)], 9));
            }
        }
        row
    });
    write_csv(prov, &header, rows)
}

/// Closing/opening face deviations against joint angle.
pub fn cable_sweep_csv(prov: &Provenance, rows: &[(f64, f64, FaceDeviation)]) -> Result<String> {
    let header = ["angle_deg", "r_mm", "closing_mm", "opening_mm", "sum_mm"];
    write_csv(
        prov,
        &header,
        rows.iter().map(|(a, r, d)| {
            [
                fixed(*a, 3),
                fixed(*r, 6),
                fixed(d.closing, 9),
                fixed(d.opening, 9),
                fixed(d.sum(), 9),
            ]
        }),
    )
}

/// κ × β sweep; failed cells keep their coordinates with `nan` values.
pub fn sweep_csv(prov: &Provenance, sweep: &SweepResult) -> Result<String> {
    write_csv(
        prov,
        &SWEEP_HEADER,
        sweep.cells.iter().map(|c| {
            let (r, res) = match &c.outcome {
                Ok(o) => (fixed(o.radius, 6), fixed(o.residual, 9)),
                Err(_) => ("nan".into(), "nan".into()),
            };
            [fixed(c.kappa, 3), fixed(c.beta_deg, 3), r, res]
        }),
    )
}

/// Occupied voxel centers.
pub fn workspace_csv(prov: &Provenance, grid: &VoxelGrid) -> Result<String> {
    write_csv(prov, &WORKSPACE_HEADER, grid.centers().map(|c| vec3(&c)))
}

pub fn trajectory_csv(prov: &Provenance, path: &TipPath) -> Result<String> {
    let rows = path.times.iter().zip(&path.tips).flat_map(|(t, tips)| {
        FingerName::ALL.into_iter().map(move |f| {
            let [x, y, z] = vec3(&tips[f.index()]);
            [fixed(*t, 6), f.to_string(), x, y, z]
        })
    });
    write_csv(prov, &TRAJECTORY_HEADER, rows)
}

/// Motor angles and flexor payouts along a trajectory.
pub fn motors_csv(
    prov: &Provenance,
    times: &[f64],
    motors: &[MotorState],
    bobbin: f64,
) -> Result<String> {
    let header = ["t_s", "finger", "pair", "psi_rad", "payout_mm"];
    let rows = times.iter().zip(motors).flat_map(|(t, m)| {
        m.0.iter().map(move |m| {
            [
                fixed(*t, 6),
                m.finger.to_string(),
                m.pair.to_string(),
                fixed(m.angle, 9),
                fixed(m.payout(bobbin), 9),
            ]
        })
    });
    write_csv(prov, &header, rows)
}

/// A single optimized radius.
pub fn radius_csv(
    prov: &Provenance,
    problem: &RadiusProblem,
    opt: &RadiusOptimum,
) -> Result<String> {
    let header = [
        "offset_mm",
        "rom_min_deg",
        "rom_max_deg",
        "r_opt_mm",
        "residual_mm",
        "evaluations",
    ];
    write_csv(
        prov,
        &header,
        [[
            fixed(problem.offset, 3),
            fixed(problem.rom_min, 3),
            fixed(problem.rom_max, 3),
            fixed(opt.radius, 6),
            fixed(opt.residual, 9),
            opt.evaluations.to_string(),
        ]],
    )
}

/// One optimized joint compared with the configured radius.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusRow {
    pub finger: FingerName,
    pub joint: &'static str,
    pub offset: f64,
    pub rom_min: f64,
    pub rom_max: f64,
    pub configured: f64,
    pub optimum: RadiusOptimum,
}

impl RadiusRow {
    pub fn delta(&self) -> f64 {
        self.optimum.radius - self.configured
    }
}

pub fn radius_report_csv(prov: &Provenance, rows: &[RadiusRow]) -> Result<String> {
    let header = [
        "finger",
        "joint",
        "offset_mm",
        "rom_min_deg",
        "rom_max_deg",
        "r_config_mm",
        "r_opt_mm",
        "delta_mm",
        "residual_mm",
    ];
    write_csv(
        prov,
        &header,
        rows.iter().map(|r| {
            [
                r.finger.to_string(),
                r.joint.to_string(),
                fixed(r.offset, 3),
                fixed(r.rom_min, 3),
                fixed(r.rom_max, 3),
                fixed(r.configured, 4),
                fixed(r.optimum.radius, 6),
                fixed(r.delta(), 6),
                fixed(r.optimum.residual, 9),
            ]
        }),
    )
}

pub fn opposability_json(prov: &Provenance, report: &OpposabilityReport) -> Result<String> {
    let names = FingerName::ALL.map(|f| f.as_str());
    let table = |keys: &[&str], vals: &[f64]| -> serde_json::Value {
        keys.iter()
            .zip(vals)
            .map(|(k, v)| (k.to_string(), number(*v, 4)))
            .collect::<serde_json::Map<_, _>>()
            .into()
    };
    to_json(&json!({
        "tool": format!("rcjhand {}", prov.version),
        "config_sha256": prov.config_sha256,
        "thumb_length_mm": number(report.thumb_length, 4),
        "opposability_index": number(report.index, 6),
        "shared_cm3": table(&names[1..], &report.shared_cm3),
        "workspace_cm3": table(&names, &report.workspace_cm3),
        "weights": table(&names[1..], &report.weights),
    }))
}

fn number(x: f64, prec: usize) -> serde_json::Value {
    serde_json::Value::Number(fixed(x, prec).parse().expect("finite"))
}

fn to_json(doc: &serde_json::Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn rmse_json(prov: &Provenance, report: &RmseReport) -> Result<String> {
    let per: serde_json::Map<_, _> = FingerName::ALL
        .into_iter()
        .map(|f| (f.to_string(), number(report.finger(f), 9)))
        .collect();
    to_json(&json!({
        "tool": format!("rcjhand {}", prov.version),
        "config_sha256": prov.config_sha256,
        "shift_s": number(report.shift, 6),
        "aggregate_mm": number(report.aggregate, 9),
        "per_finger_mm": per,
    }))
}

/// One row per preset and finger.
pub fn presets_csv(prov: &Provenance, presets: &PresetCatalog) -> Result<String> {
    let header = ["preset", "finger", "q0_deg", "q1_deg", "q2_deg", "q3_deg"];
    let rows = presets.0.iter().flat_map(|(name, pose)| {
        FingerName::ALL.into_iter().map(move |f| {
            let a = pose.finger(f).0;
            [
                name.clone(),
                f.to_string(),
                fixed(a[0], 4),
                fixed(a[1], 4),
                fixed(a[2], 4),
                fixed(a[3], 4),
            ]
        })
    });
    write_csv(prov, &header, rows)
}

/// Parses a trajectory CSV (comment rows allowed). Every time stamp must
/// list all five fingers.
pub fn read_trajectory_csv(text: &str) -> Result<TipPath> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| Error::Parse(e.to_string()))?
        .clone();
    if header.iter().ne(TRAJECTORY_HEADER) {
        return Err(Error::Parse(format!(
            "trajectory header must be `{}`",
            TRAJECTORY_HEADER.join(",")
        )));
    }
    let mut times: Vec<f64> = Vec::new();
    let mut tips: Vec<[Option<Vector3<f64>>; 5]> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse(format!("line {line}: bad number `{}`", &rec[i])))
        };
        let t = num(0)?;
        let finger: FingerName = rec[1]
            .parse()
            .map_err(|_| Error::Parse(format!("line {line}: unknown finger `{}`", &rec[1])))?;
        let p = Vector3::new(num(2)?, num(3)?, num(4)?);
        if times.last() != Some(&t) {
            times.push(t);
            tips.push([None; 5]);
        }
        let slot = &mut tips.last_mut().unwrap()[finger.index()];
        if slot.replace(p).is_some() {
            return Err(Error::Parse(format!(
                "line {line}: duplicate {finger} at t = {t}"
            )));
        }
    }
    let tips = tips
        .into_iter()
        .zip(&times)
        .map(|(row, t)| {
            let missing: Vec<_> = FingerName::ALL
                .into_iter()
                .filter(|f| row[f.index()].is_none())
                .map(|f| f.as_str())
                .collect();
            if missing.is_empty() {
                Ok(row.map(Option::unwrap))
            } else {
                Err(Error::Parse(format!(
                    "t = {t}: missing {}",
                    missing.join(", ")
                )))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    TipPath::new(times, tips)
}

pub fn load_trajectory(path: &Path) -> Result<TipPath> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_trajectory_csv(&text)
}
