//! Minimax choice of the rolling radius for single-motor antagonistic
//! actuation: pick `r` so the summed length change of the two cables
//! across a joint stays as close to zero as possible over its ROM.

use rayon::prelude::*;

use crate::cable::section_deviation;
use crate::error::{Error, Result};
use crate::geometry::JointGeometry;
use crate::registry::Registry;
use crate::section::JointSection;
use crate::tol;

pub const DEFAULT_STEP_DEG: f64 = 0.25;
pub const DEFAULT_TOLERANCE: f64 = 1e-4;
pub const SCAN_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusProblem {
    /// Hole distance from the virtual pivot (`κ`, or `γ` for deviation).
    pub offset: f64,
    pub rom_min: f64,
    pub rom_max: f64,
    /// Search interval for `r`, mm.
    pub search: (f64, f64),
    /// Angular sampling of the ROM, degrees.
    pub step_deg: f64,
    /// Width of the final bracket on `r`, mm.
    pub tolerance: f64,
}

impl RadiusProblem {
    pub fn new(offset: f64, rom_min: f64, rom_max: f64) -> Self {
        Self {
            offset,
            rom_min,
            rom_max,
            search: (0.05 * offset, 0.95 * offset),
            step_deg: DEFAULT_STEP_DEG,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// Flexion joint with ROM `[0, 2β]`.
    pub fn flexion(kappa: f64, beta_deg: f64) -> Self {
        Self::new(kappa, 0.0, 2.0 * beta_deg)
    }

    /// Deviation joint with ROM `[−half_rom, half_rom]`.
    pub fn deviation(offset: f64, half_rom_deg: f64) -> Self {
        Self::new(offset, -half_rom_deg, half_rom_deg)
    }

    pub fn for_joint(joint: &JointGeometry) -> Self {
        Self::new(joint.moment_arm(), joint.rom_min, joint.rom_max)
    }

    pub fn with_step(mut self, step_deg: f64) -> Self {
        self.step_deg = step_deg;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.search;
        if !(self.offset.is_finite() && self.offset > 0.0) {
            return Err(Error::Validation("hole offset must be positive".into()));
        }
        if !(self.rom_min.is_finite() && self.rom_max.is_finite()) || self.rom_min >= self.rom_max {
            return Err(Error::EmptyRom(format!(
                "[{}, {}] deg",
                self.rom_min, self.rom_max
            )));
        }
        if !(lo > 0.0 && lo < hi && hi < self.offset) {
            return Err(Error::Validation(format!(
                "search interval ({lo}, {hi}) must lie inside (0, {})",
                self.offset
            )));
        }
        if !(self.step_deg > 0.0 && self.step_deg <= 1.0) {
            return Err(Error::Validation(
                "angular step must be in (0, 1] deg".into(),
            ));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Validation("tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Sampled ROM angles in degrees, both ends included.
    pub fn angles(&self) -> Vec<f64> {
        let span = self.rom_max - self.rom_min;
        let n = (span / self.step_deg - 1e-9).ceil().max(1.0) as usize;
        (0..=n)
            .map(|k| {
                if k == n {
                    self.rom_max
                } else {
                    self.rom_min + k as f64 * self.step_deg
                }
            })
            .collect()
    }

    fn section(&self, r: f64) -> JointSection {
        JointSection::from_rom(r, self.offset, self.rom_min, self.rom_max)
    }
}

/// `max |Δc_closing + Δc_opening|` over the sampled ROM at radius `r`.
pub fn residual(problem: &RadiusProblem, r: f64) -> f64 {
    residual_at(problem, r, &problem.angles())
}

/// Same as [`residual`] over an explicit angle set (degrees).
pub fn residual_at(problem: &RadiusProblem, r: f64, angles_deg: &[f64]) -> f64 {
    let s = problem.section(r);
    angles_deg
        .iter()
        .map(|&a| section_deviation(&s, tol::rad(a)).sum().abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiusOptimum {
    pub radius: f64,
    pub residual: f64,
    pub evaluations: usize,
}

/// A one-dimensional minimizer of the residual over the search interval.
pub trait RadiusSearch: Send + Sync {
    fn name(&self) -> &'static str;
    fn minimize(&self, problem: &RadiusProblem) -> Result<RadiusOptimum>;
}

struct Objective<'a> {
    problem: &'a RadiusProblem,
    angles: Vec<f64>,
    evaluations: usize,
}

impl<'a> Objective<'a> {
    fn new(problem: &'a RadiusProblem) -> Self {
        Self {
            problem,
            angles: problem.angles(),
            evaluations: 0,
        }
    }

    fn eval(&mut self, r: f64) -> f64 {
        self.evaluations += 1;
        residual_at(self.problem, r, &self.angles)
    }
}

/// Index of the smallest value; the first one wins ties (smaller `r`).
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

fn boundary_error(problem: &RadiusProblem, at: f64) -> Error {
    Error::NoMinimumFound(format!(
        "residual decreases toward the search boundary r = {at:.4} mm (offset {} mm, ROM [{}, {}] deg)",
        problem.offset, problem.rom_min, problem.rom_max
    ))
}

/// Coarse scan to bracket the minimum, then golden-section refinement.
/// Falls back to a dense grid when the scan is not unimodal.
#[derive(Debug, Clone, Copy)]
pub struct GoldenSection {
    pub scan_samples: usize,
}

impl Default for GoldenSection {
    fn default() -> Self {
        Self {
            scan_samples: SCAN_SAMPLES,
        }
    }
}

fn is_unimodal(values: &[f64], k: usize) -> bool {
    values[..=k].windows(2).all(|w| w[1] <= w[0]) && values[k..].windows(2).all(|w| w[1] >= w[0])
}

impl RadiusSearch for GoldenSection {
    fn name(&self) -> &'static str {
        "golden-section"
    }

    fn minimize(&self, problem: &RadiusProblem) -> Result<RadiusOptimum> {
        problem.validate()?;
        let mut f = Objective::new(problem);
        let (lo, hi) = problem.search;
        let xs = linspace(lo, hi, self.scan_samples.max(3));
        let ys: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
        let k = argmin(&ys);
        if k == 0 || k == xs.len() - 1 {
            return Err(boundary_error(problem, xs[k]));
        }
        if !is_unimodal(&ys, k) {
            let spacing = problem.tolerance.max((hi - lo) * 1e-5);
            let mut out = GridSearch { spacing }.minimize(problem)?;
            out.evaluations += f.evaluations;
            return Ok(out);
        }

        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        let (mut a, mut b) = (xs[k - 1], xs[k + 1]);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (f.eval(c), f.eval(d));
        let (mut best_x, mut best_y) = (xs[k], ys[k]);
        while b - a > problem.tolerance {
            if fc <= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f.eval(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f.eval(d);
            }
            for (x, y) in [(c, fc), (d, fd)] {
                if y < best_y || (y == best_y && x < best_x) {
                    best_x = x;
                    best_y = y;
                }
            }
        }
        Ok(RadiusOptimum {
            radius: best_x,
            residual: best_y,
            evaluations: f.evaluations,
        })
    }
}

/// Exhaustive evaluation on a uniform grid of radii.
#[derive(Debug, Clone, Copy)]
pub struct GridSearch {
    pub spacing: f64,
}

impl Default for GridSearch {
    fn default() -> Self {
        Self { spacing: 1e-3 }
    }
}

impl RadiusSearch for GridSearch {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn minimize(&self, problem: &RadiusProblem) -> Result<RadiusOptimum> {
        problem.validate()?;
        if !(self.spacing.is_finite() && self.spacing > 0.0) {
            return Err(Error::Validation("grid spacing must be positive".into()));
        }
        let mut f = Objective::new(problem);
        let (lo, hi) = problem.search;
        let n = ((hi - lo) / self.spacing).ceil() as usize + 1;
        let xs = linspace(lo, hi, n.max(3));
        let ys: Vec<f64> = xs.iter().map(|&x| f.eval(x)).collect();
        let k = argmin(&ys);
        if k == 0 || k == xs.len() - 1 {
            return Err(boundary_error(problem, xs[k]));
        }
        Ok(RadiusOptimum {
            radius: xs[k],
            residual: ys[k],
            evaluations: f.evaluations,
        })
    }
}

pub const DEFAULT_MINIMIZER: &str = "golden-section";

pub fn minimizers() -> Registry<dyn RadiusSearch> {
    Registry::new("radius minimizer")
        .with("golden-section", || {
            Box::new(GoldenSection::default()) as Box<dyn RadiusSearch>
        })
        .with("grid", || {
            Box::new(GridSearch::default()) as Box<dyn RadiusSearch>
        })
}

/// Optimizes with the default minimizer.
pub fn optimize_radius(problem: &RadiusProblem) -> Result<RadiusOptimum> {
    GoldenSection::default().minimize(problem)
}

/// Optimal radius for a joint's own hole offset and ROM.
pub fn optimize_joint(joint: &JointGeometry, search: &dyn RadiusSearch) -> Result<RadiusOptimum> {
    search.minimize(&RadiusProblem::for_joint(joint))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub kappa: f64,
    pub beta_deg: f64,
    pub outcome: Result<RadiusOptimum>,
}

/// Optimal radius over a `(κ, β)` grid, `κ`-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    /// Largest residual among the cells that found a minimum.
    pub fn max_residual(&self) -> f64 {
        self.cells
            .iter()
            .filter_map(|c| c.outcome.as_ref().ok())
            .map(|o| o.residual)
            .fold(0.0, f64::max)
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_err()).count()
    }
}

/// Runs the flexion problem for every `(κ, β)` pair in parallel.
pub fn sweep(
    kappas: &[f64],
    betas_deg: &[f64],
    step_deg: f64,
    search: &dyn RadiusSearch,
) -> Result<SweepResult> {
    if kappas.is_empty() || betas_deg.is_empty() {
        return Err(Error::Validation("sweep grids must be non-empty".into()));
    }
    let pairs: Vec<(f64, f64)> = kappas
        .iter()
        .flat_map(|&k| betas_deg.iter().map(move |&b| (k, b)))
        .collect();
    let cells = pairs
        .par_iter()
        .map(|&(kappa, beta_deg)| SweepCell {
            kappa,
            beta_deg,
            outcome: search.minimize(&RadiusProblem::flexion(kappa, beta_deg).with_step(step_deg)),
        })
        .collect();
    Ok(SweepResult { cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_sampling_includes_both_ends() {
        let p = RadiusProblem::flexion(12.7, 50.0);
        let a = p.angles();
        assert_eq!(a.len(), 401);
        assert_eq!(a[0], 0.0);
        assert_eq!(*a.last().unwrap(), 100.0);
        let p = RadiusProblem::new(10.0, 0.0, 0.3).with_step(0.25);
        assert_eq!(p.angles(), vec![0.0, 0.25, 0.3]);
    }

    #[test]
    fn zero_angle_only_is_zero() {
        let p = RadiusProblem::flexion(12.7, 50.0);
        for r in [1.0, 4.9, 9.0] {
            assert_eq!(residual_at(&p, r, &[0.0]), 0.0);
        }
    }

    #[test]
    fn index_mcp() {
        let p = RadiusProblem::flexion(12.7, 50.0);
        let o = optimize_radius(&p).unwrap();
        assert!((o.radius - 4.9).abs() <= 0.5);
        assert!(o.residual <= 0.03);
        assert!(residual(&p, 4.9) <= 0.05);
        assert!(residual(&p, 2.0) > o.residual);
    }

    #[test]
    fn strategies_agree() {
        let p = RadiusProblem::flexion(10.2, 50.0);
        let a = GoldenSection::default().minimize(&p).unwrap();
        let b = GridSearch::default().minimize(&p).unwrap();
        assert!((a.radius - b.radius).abs() < 2e-3);
        assert!(a.residual <= b.residual + 1e-9);
    }

    #[test]
    fn invalid_problems() {
        let mut p = RadiusProblem::flexion(10.0, 50.0);
        p.search = (0.0, 5.0);
        assert!(matches!(optimize_radius(&p), Err(Error::Validation(_))));
        let p = RadiusProblem::new(10.0, 20.0, 20.0);
        assert!(matches!(optimize_radius(&p), Err(Error::EmptyRom(_))));
        let p = RadiusProblem::flexion(10.0, 50.0).with_step(2.0);
        assert!(matches!(optimize_radius(&p), Err(Error::Validation(_))));
    }

    #[test]
    fn boundary_minimum_reported() {
        // a search interval well above the optimum is monotone increasing
        let mut p = RadiusProblem::flexion(12.7, 50.0);
        p.search = (7.0, 12.0);
        assert!(matches!(optimize_radius(&p), Err(Error::NoMinimumFound(_))));
        assert!(matches!(
            GridSearch::default().minimize(&p),
            Err(Error::NoMinimumFound(_))
        ));
    }

    #[test]
    fn registry_has_both() {
        let reg = minimizers();
        assert_eq!(reg.names(), vec!["golden-section", "grid"]);
        assert_eq!(reg.create("grid").unwrap().name(), "grid");
        assert!(reg.create("newton").is_err());
    }

    #[test]
    fn sweep_single_cell_matches() {
        let s = sweep(
            &[12.7],
            &[50.0],
            DEFAULT_STEP_DEG,
            &GoldenSection::default(),
        )
        .unwrap();
        let o = optimize_radius(&RadiusProblem::flexion(12.7, 50.0)).unwrap();
        assert_eq!(s.cells[0].outcome.as_ref().unwrap(), &o);
        assert!(sweep(&[], &[50.0], 0.25, &GoldenSection::default()).is_err());
    }
}
