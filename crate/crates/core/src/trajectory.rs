//! Pose trajectories, fingertip paths and path comparison.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{FingerName, HandModel, Pose};
use crate::kinematics::{hand_fk, RomMode};
use crate::registry::Registry;
use crate::transform::RigidTransform;

pub const DEFAULT_INTERPOLATOR: &str = "linear";

/// Maps segment progress `s ∈ [0, 1]` to blend weight, with `0 ↦ 0` and
/// `1 ↦ 1`.
pub trait Interpolator: Send + Sync {
    fn name(&self) -> &'static str;
    fn ease(&self, s: f64) -> f64;
}

pub struct Linear;
pub struct Smoothstep;
pub struct Cosine;

impl Interpolator for Linear {
    fn name(&self) -> &'static str {
        "linear"
    }
    fn ease(&self, s: f64) -> f64 {
        s
    }
}

impl Interpolator for Smoothstep {
    fn name(&self) -> &'static str {
        "smoothstep"
    }
    fn ease(&self, s: f64) -> f64 {
        s * s * (3.0 - 2.0 * s)
    }
}

impl Interpolator for Cosine {
    fn name(&self) -> &'static str {
        "cosine"
    }
    fn ease(&self, s: f64) -> f64 {
        if s >= 1.0 {
            1.0
        } else {
            0.5 * (1.0 - (std::f64::consts::PI * s).cos())
        }
    }
}

pub fn interpolators() -> Registry<dyn Interpolator> {
    Registry::new("interpolator")
        .with("linear", || Box::new(Linear) as Box<dyn Interpolator>)
        .with("smoothstep", || {
            Box::new(Smoothstep) as Box<dyn Interpolator>
        })
        .with("cosine", || Box::new(Cosine) as Box<dyn Interpolator>)
}

/// Fingertip positions of all five fingers over time, palm frame, mm.
#[derive(Debug, Clone, PartialEq)]
pub struct TipPath {
    pub times: Vec<f64>,
    pub tips: Vec<[Vector3<f64>; 5]>,
}

impl TipPath {
    pub fn new(times: Vec<f64>, tips: Vec<[Vector3<f64>; 5]>) -> Result<Self> {
        if times.len() != tips.len() {
            return Err(Error::InvalidTrajectory(
                "time and tip sample counts differ".into(),
            ));
        }
        if times.is_empty() {
            return Err(Error::InvalidTrajectory("no samples".into()));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidTrajectory(
                "times must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self { times, tips })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn transformed(&self, x: &RigidTransform) -> TipPath {
        TipPath {
            times: self.times.clone(),
            tips: self
                .tips
                .iter()
                .map(|t| t.map(|p| x.transform_point(&p)))
                .collect(),
        }
    }

    /// Centered moving average over `width` samples, truncated at the ends.
    pub fn smoothed(&self, width: usize) -> TipPath {
        if width <= 1 {
            return self.clone();
        }
        let n = self.len();
        let back = (width - 1) / 2;
        let fwd = width / 2;
        let tips = (0..n)
            .map(|i| {
                let lo = i.saturating_sub(back);
                let hi = (i + fwd).min(n - 1);
                let k = (hi - lo + 1) as f64;
                std::array::from_fn(|f| {
                    self.tips[lo..=hi]
                        .iter()
                        .map(|t| t[f])
                        .sum::<Vector3<f64>>()
                        / k
                })
            })
            .collect();
        TipPath {
            times: self.times.clone(),
            tips,
        }
    }

    /// Median sample period, s.
    pub fn period(&self) -> f64 {
        let mut d: Vec<f64> = self.times.windows(2).map(|w| w[1] - w[0]).collect();
        if d.is_empty() {
            return 0.0;
        }
        d.sort_by(f64::total_cmp);
        d[d.len() / 2]
    }

    /// Linear interpolation of finger `f` at time `t` inside the span.
    fn at(&self, f: usize, t: f64) -> Option<Vector3<f64>> {
        let (t0, t1) = (self.times[0], *self.times.last()?);
        if t < t0 || t > t1 {
            return None;
        }
        let i = self.times.partition_point(|&x| x <= t);
        if i == 0 {
            return Some(self.tips[0][f]);
        }
        if i >= self.len() {
            return Some(self.tips[self.len() - 1][f]);
        }
        let (ta, tb) = (self.times[i - 1], self.times[i]);
        let s = (t - ta) / (tb - ta);
        Some(self.tips[i - 1][f] * (1.0 - s) + self.tips[i][f] * s)
    }
}

/// Sampled poses plus their fingertip path.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub poses: Vec<Pose>,
    pub path: TipPath,
}

/// Interpolates through `poses`, spending `durations[i]` seconds between
/// pose `i` and `i + 1`, sampled at `rate_hz` (the final pose is always
/// included).
pub fn generate_trajectory(
    hand: &HandModel,
    poses: &[Pose],
    durations: &[f64],
    rate_hz: f64,
    interp: &dyn Interpolator,
) -> Result<Trajectory> {
    if poses.len() < 2 {
        return Err(Error::InvalidTrajectory(
            "at least two poses required".into(),
        ));
    }
    if durations.len() != poses.len() - 1 {
        return Err(Error::InvalidTrajectory(format!(
            "{} poses need {} durations, got {}",
            poses.len(),
            poses.len() - 1,
            durations.len()
        )));
    }
    if durations.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
        return Err(Error::InvalidTrajectory(
            "durations must be positive".into(),
        ));
    }
    if !(rate_hz.is_finite() && rate_hz > 0.0) {
        return Err(Error::InvalidTrajectory(
            "sample rate must be positive".into(),
        ));
    }
    let mut starts = vec![0.0];
    for d in durations {
        starts.push(starts.last().unwrap() + d);
    }
    let total = *starts.last().unwrap();
    let n = (total * rate_hz + 1e-9).floor() as usize;
    let mut times: Vec<f64> = (0..=n).map(|k| k as f64 / rate_hz).collect();
    if total - times[n] > 1e-9 / rate_hz {
        times.push(total);
    } else {
        times[n] = total;
    }

    let mut out_poses = Vec::with_capacity(times.len());
    let mut tips = Vec::with_capacity(times.len());
    for &t in &times {
        let seg = (starts.partition_point(|&s| s <= t).max(1) - 1).min(durations.len() - 1);
        let s = ((t - starts[seg]) / durations[seg]).clamp(0.0, 1.0);
        let pose = poses[seg].lerp(&poses[seg + 1], interp.ease(s));
        let frames = hand_fk(hand, &pose, RomMode::Strict)?;
        tips.push(frames.map(|f| f.translation));
        out_poses.push(pose);
    }
    Ok(Trajectory {
        path: TipPath::new(times.clone(), tips)?,
        times,
        poses: out_poses,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmseReport {
    /// Per-finger RMSE in [`FingerName::ALL`] order, mm.
    pub per_finger: [f64; 5],
    /// Mean of the per-finger values, mm.
    pub aggregate: f64,
    /// Time shift applied to the second path, s.
    pub shift: f64,
}

impl RmseReport {
    pub fn finger(&self, f: FingerName) -> f64 {
        self.per_finger[f.index()]
    }
}

/// Squared error sums per finger and sample count for `b` delayed by
/// `shift` relative to `a`, evaluated on both sample grids.
fn shifted_error(a: &TipPath, b: &TipPath, shift: f64) -> Option<([f64; 5], usize)> {
    let mut sums = [0.0; 5];
    let mut count = 0;
    for &t in &a.times {
        if a.at(0, t).is_some() && b.at(0, t + shift).is_some() {
            for (f, s) in sums.iter_mut().enumerate() {
                *s += (a.at(f, t).unwrap() - b.at(f, t + shift).unwrap()).norm_squared();
            }
            count += 1;
        }
    }
    for &t in &b.times {
        if b.at(0, t).is_some() && a.at(0, t - shift).is_some() {
            for (f, s) in sums.iter_mut().enumerate() {
                *s += (a.at(f, t - shift).unwrap() - b.at(f, t).unwrap()).norm_squared();
            }
            count += 1;
        }
    }
    (count > 0).then_some((sums, count))
}

/// RMSE between two fingertip paths after smoothing both with a centered
/// moving average of `smooth` samples and choosing the time shift of `b`
/// (multiples of the coarser sample period within `±window` seconds) that
/// minimizes the aggregate. Errors are sampled on both time grids so the
/// result is symmetric in its arguments.
pub fn trajectory_rmse(a: &TipPath, b: &TipPath, window: f64, smooth: usize) -> Result<RmseReport> {
    if !(window.is_finite() && window >= 0.0) {
        return Err(Error::Validation(
            "alignment window must be non-negative".into(),
        ));
    }
    let (a, b) = (a.smoothed(smooth), b.smoothed(smooth));
    let period = a.period().max(b.period());
    let steps = if period > 0.0 {
        (window / period + 1e-9).floor() as i64
    } else {
        0
    };
    let mut best: Option<RmseReport> = None;
    // shifts in order 0, +1, −1, +2, −2, … so ties keep the smallest shift
    for k in std::iter::once(0).chain((1..=steps).flat_map(|k| [k, -k])) {
        let shift = k as f64 * period;
        let Some((sums, count)) = shifted_error(&a, &b, shift) else {
            continue;
        };
        let per_finger = sums.map(|s| (s / count as f64).sqrt());
        let aggregate = per_finger.iter().sum::<f64>() / 5.0;
        if best.as_ref().is_none_or(|r| aggregate < r.aggregate) {
            best = Some(RmseReport {
                per_finger,
                aggregate,
                shift,
            });
        }
    }
    best.ok_or(Error::NoOverlap)
}
