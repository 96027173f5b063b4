//! Reachable fingertip workspaces on a voxel lattice, their intersections,
//! and the thumb opposability index.
//!
//! All grids share one global lattice per voxel edge: voxel `(i, j, k)`
//! covers `[i·e, (i+1)·e) × …` in palm coordinates, so grids of equal edge
//! can be intersected index by index.

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{FingerAngles, FingerModel, FingerName, HandModel};
use crate::kinematics::FingerChain;
use crate::registry::Registry;
use crate::transform::RigidTransform;

pub const DEFAULT_STEPS: usize = 15;
pub const DEFAULT_EDGE_MM: f64 = 2.0;
pub const DEFAULT_SAMPLER: &str = "cells";

/// Occupancy bitset over a box of the global lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    edge: f64,
    min: [i64; 3],
    dims: [usize; 3],
    bits: Vec<u64>,
}

impl VoxelGrid {
    /// Empty grid covering the lattice voxels from `lo` to `hi`
    /// (inclusive indices).
    pub fn with_index_box(edge: f64, lo: [i64; 3], hi: [i64; 3]) -> Result<Self> {
        if !(edge.is_finite() && edge > 0.0) {
            return Err(Error::Validation("voxel edge must be positive".into()));
        }
        let mut dims = [0usize; 3];
        for a in 0..3 {
            dims[a] = (hi[a] - lo[a] + 1).max(0) as usize;
        }
        let n = dims[0] * dims[1] * dims[2];
        Ok(Self {
            edge,
            min: lo,
            dims,
            bits: vec![0; n.div_ceil(64)],
        })
    }

    /// Empty grid whose box covers every point in `[lo, hi]` (mm).
    pub fn covering(edge: f64, lo: &Vector3<f64>, hi: &Vector3<f64>) -> Result<Self> {
        if !(edge.is_finite() && edge > 0.0) {
            return Err(Error::Validation("voxel edge must be positive".into()));
        }
        let a = Self::index_of_edge(edge, lo);
        let b = Self::index_of_edge(edge, hi);
        Self::with_index_box(edge, a, b)
    }

    fn index_of_edge(edge: f64, p: &Vector3<f64>) -> [i64; 3] {
        [
            (p.x / edge).floor() as i64,
            (p.y / edge).floor() as i64,
            (p.z / edge).floor() as i64,
        ]
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    /// Lattice position of the box corner, mm.
    pub fn origin(&self) -> Vector3<f64> {
        Vector3::new(self.min[0] as f64, self.min[1] as f64, self.min[2] as f64) * self.edge
    }

    pub fn index_of(&self, p: &Vector3<f64>) -> [i64; 3] {
        Self::index_of_edge(self.edge, p)
    }

    fn flat(&self, idx: [i64; 3]) -> Option<usize> {
        let mut f = 0usize;
        for a in (0..3).rev() {
            let o = idx[a] - self.min[a];
            if o < 0 || o as usize >= self.dims[a] {
                return None;
            }
            f = f * self.dims[a] + o as usize;
        }
        Some(f)
    }

    fn unflat(&self, f: usize) -> [i64; 3] {
        let x = f % self.dims[0];
        let y = (f / self.dims[0]) % self.dims[1];
        let z = f / (self.dims[0] * self.dims[1]);
        [
            self.min[0] + x as i64,
            self.min[1] + y as i64,
            self.min[2] + z as i64,
        ]
    }

    /// Marks a voxel; `false` if it lies outside the box.
    pub fn insert_index(&mut self, idx: [i64; 3]) -> bool {
        match self.flat(idx) {
            Some(f) => {
                self.bits[f / 64] |= 1 << (f % 64);
                true
            }
            None => false,
        }
    }

    pub fn insert_point(&mut self, p: &Vector3<f64>) -> bool {
        self.insert_index(self.index_of(p))
    }

    pub fn contains_index(&self, idx: [i64; 3]) -> bool {
        self.flat(idx)
            .is_some_and(|f| self.bits[f / 64] & (1 << (f % 64)) != 0)
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn volume_mm3(&self) -> f64 {
        self.count() as f64 * self.edge.powi(3)
    }

    pub fn volume_cm3(&self) -> f64 {
        self.volume_mm3() / 1000.0
    }

    /// Occupied voxel indices in x-fastest order.
    pub fn indices(&self) -> impl Iterator<Item = [i64; 3]> + '_ {
        self.bits.iter().enumerate().flat_map(move |(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(self.unflat(w * 64 + b))
            })
        })
    }

    pub fn center(&self, idx: [i64; 3]) -> Vector3<f64> {
        Vector3::new(
            idx[0] as f64 + 0.5,
            idx[1] as f64 + 0.5,
            idx[2] as f64 + 0.5,
        ) * self.edge
    }

    pub fn centers(&self) -> impl Iterator<Item = Vector3<f64>> + '_ {
        self.indices().map(|i| self.center(i))
    }

    /// Bitwise union of two grids with the same box.
    fn union_same_box(mut self, other: &VoxelGrid) -> VoxelGrid {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= *b;
        }
        self
    }

    /// Copy of `self` on the lattice of `edge`: a voxel is occupied when
    /// its center falls inside an occupied voxel of `self`.
    pub fn rerasterized(&self, edge: f64) -> Result<VoxelGrid> {
        let lo = self.origin();
        let hi = lo
            + Vector3::new(
                self.dims[0] as f64,
                self.dims[1] as f64,
                self.dims[2] as f64,
            ) * self.edge;
        let mut out = VoxelGrid::covering(edge, &lo, &hi)?;
        let min = out.min;
        let dims = out.dims;
        for z in 0..dims[2] as i64 {
            for y in 0..dims[1] as i64 {
                for x in 0..dims[0] as i64 {
                    let idx = [min[0] + x, min[1] + y, min[2] + z];
                    let c = out.center(idx);
                    if self.contains_index(self.index_of(&c)) {
                        out.insert_index(idx);
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Volume of `a ∩ b` in cm³. Grids of different edge are an error unless
/// `rerasterize` is set, in which case `b` is resampled onto `a`'s lattice.
pub fn intersect_volume(a: &VoxelGrid, b: &VoxelGrid, rerasterize: bool) -> Result<f64> {
    let owned;
    let b = if a.edge == b.edge {
        b
    } else if rerasterize {
        owned = b.rerasterized(a.edge)?;
        &owned
    } else {
        return Err(Error::ResolutionMismatch(a.edge, b.edge));
    };
    let n = a.indices().filter(|&i| b.contains_index(i)).count();
    Ok(n as f64 * a.edge.powi(3) / 1000.0)
}

/// How a finger's workspace is sampled and voxelized.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSpec {
    pub sampler: String,
    /// Grid nodes per joint (grid and cells samplers).
    pub steps: usize,
    /// Point count for the low-discrepancy sampler; `steps⁴` when unset.
    pub samples: Option<usize>,
    pub edge: f64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        Self {
            sampler: DEFAULT_SAMPLER.to_string(),
            steps: DEFAULT_STEPS,
            samples: None,
            edge: DEFAULT_EDGE_MM,
        }
    }
}

impl SamplerSpec {
    pub fn validate(&self) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Validation(
                "at least 2 steps per joint required".into(),
            ));
        }
        if self.samples == Some(0) {
            return Err(Error::Validation("sample count must be positive".into()));
        }
        if !(self.edge.is_finite() && self.edge > 0.0) {
            return Err(Error::Validation("voxel edge must be positive".into()));
        }
        Ok(())
    }

    pub fn sample_count(&self) -> usize {
        self.samples.unwrap_or(self.steps.pow(4))
    }
}

/// A finger resolved for sampling: chain, placement and ROM per joint.
pub struct FingerReach {
    pub chain: FingerChain,
    pub placement: RigidTransform,
    pub rom: [(f64, f64); 4],
}

impl FingerReach {
    pub fn new(finger: &FingerModel, placement: &RigidTransform) -> Result<Self> {
        let labels = finger.joint_labels();
        let mut rom = [(0.0, 0.0); 4];
        for (i, j) in finger.joints.iter().enumerate() {
            if j.rom_min > j.rom_max || j.rom_min.is_nan() || j.rom_max.is_nan() {
                return Err(Error::EmptyRom(format!(
                    "{}: [{}, {}] deg",
                    labels[i], j.rom_min, j.rom_max
                )));
            }
            rom[i] = (j.rom_min, j.rom_max);
        }
        Ok(Self {
            chain: FingerChain::new(finger)?,
            placement: *placement,
            rom,
        })
    }

    pub fn tip(&self, angles: &FingerAngles) -> Vector3<f64> {
        self.placement.transform_point(&self.chain.tip(angles))
    }

    fn degenerate(&self) -> bool {
        self.rom.iter().any(|(a, b)| a == b)
    }

    fn node(&self, joint: usize, k: usize, n: usize) -> f64 {
        let (a, b) = self.rom[joint];
        if n == 1 {
            a
        } else {
            a + (b - a) * k as f64 / (n - 1) as f64
        }
    }
}

fn bounds(points: &[Vector3<f64>]) -> (Vector3<f64>, Vector3<f64>) {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

fn mark_points(points: &[Vector3<f64>], edge: f64) -> Result<VoxelGrid> {
    let (lo, hi) = bounds(points);
    let mut g = VoxelGrid::covering(edge, &lo, &hi)?;
    for p in points {
        g.insert_point(p);
    }
    Ok(g)
}

/// Tip positions on the full joint grid; zero-ROM joints get one node.
fn grid_points(reach: &FingerReach, steps: usize) -> Vec<Vector3<f64>> {
    let n: [usize; 4] = std::array::from_fn(|j| {
        if reach.rom[j].0 == reach.rom[j].1 {
            1
        } else {
            steps
        }
    });
    let mut combos = Vec::with_capacity(n.iter().product());
    for a in 0..n[0] {
        for b in 0..n[1] {
            for c in 0..n[2] {
                for d in 0..n[3] {
                    combos.push([a, b, c, d]);
                }
            }
        }
    }
    combos
        .par_iter()
        .map(|k| {
            let angles = FingerAngles(std::array::from_fn(|j| reach.node(j, k[j], n[j])));
            reach.tip(&angles)
        })
        .collect()
}

/// Turns a finger's reach into an occupancy grid.
pub trait WorkspaceSampler: Send + Sync {
    fn name(&self) -> &'static str;
    fn sample(&self, reach: &FingerReach, spec: &SamplerSpec) -> Result<VoxelGrid>;
}

/// Marks every voxel hit by a tip position on the regular joint grid.
pub struct GridSampler;

impl WorkspaceSampler for GridSampler {
    fn name(&self) -> &'static str {
        "grid"
    }

    fn sample(&self, reach: &FingerReach, spec: &SamplerSpec) -> Result<VoxelGrid> {
        spec.validate()?;
        mark_points(&grid_points(reach, spec.steps), spec.edge)
    }
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Marks every voxel hit by the first `samples` points of a 4-D Halton
/// sequence mapped onto the ROM box.
pub struct HaltonSampler;

impl WorkspaceSampler for HaltonSampler {
    fn name(&self) -> &'static str {
        "halton"
    }

    fn sample(&self, reach: &FingerReach, spec: &SamplerSpec) -> Result<VoxelGrid> {
        spec.validate()?;
        const BASES: [usize; 4] = [2, 3, 5, 7];
        let points: Vec<Vector3<f64>> = (0..spec.sample_count())
            .into_par_iter()
            .map(|i| {
                let angles = FingerAngles(std::array::from_fn(|j| {
                    let (a, b) = reach.rom[j];
                    a + (b - a) * radical_inverse(i + 1, BASES[j])
                }));
                reach.tip(&angles)
            })
            .collect();
        mark_points(&points, spec.edge)
    }
}

/// Marks the voxels whose centers lie in the image of the joint space.
///
/// For every node of the distal joint, the remaining three joints span a
/// grid of cells; each cell's image is approximated by the six tetrahedra
/// of its Kuhn split, and voxel centers inside any of them are marked.
/// Unlike hit counting this measures the region rather than the samples,
/// so the estimate does not grow or shrink with the voxel size beyond the
/// usual boundary error. Falls back to hit counting when a joint has no
/// ROM (the image is then lower dimensional).
pub struct CellSampler;

const KUHN: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

fn rasterize_tet(grid: &mut VoxelGrid, v: [&Vector3<f64>; 4]) {
    let a = v[0];
    let m = Matrix3::from_columns(&[v[1] - a, v[2] - a, v[3] - a]);
    let scale = (m.column(0).norm() * m.column(1).norm() * m.column(2).norm()).max(1e-300);
    if m.determinant().abs() <= 1e-12 * scale {
        return;
    }
    let Some(inv) = m.try_inverse() else {
        return;
    };
    let e = grid.edge;
    let lo = v
        .iter()
        .fold(Vector3::repeat(f64::INFINITY), |acc, p| acc.inf(p));
    let hi = v
        .iter()
        .fold(Vector3::repeat(f64::NEG_INFINITY), |acc, p| acc.sup(p));
    let first = |x: f64| (x / e - 0.5).ceil() as i64;
    let last = |x: f64| (x / e - 0.5).floor() as i64;
    const EPS: f64 = 1e-12;
    for k in first(lo.z)..=last(hi.z) {
        for j in first(lo.y)..=last(hi.y) {
            for i in first(lo.x)..=last(hi.x) {
                let c = grid.center([i, j, k]);
                let l = inv * (c - a);
                if l.x >= -EPS && l.y >= -EPS && l.z >= -EPS && l.sum() <= 1.0 + EPS {
                    grid.insert_index([i, j, k]);
                }
            }
        }
    }
}

impl WorkspaceSampler for CellSampler {
    fn name(&self) -> &'static str {
        "cells"
    }

    fn sample(&self, reach: &FingerReach, spec: &SamplerSpec) -> Result<VoxelGrid> {
        spec.validate()?;
        let n = spec.steps;
        let points = grid_points(reach, n);
        if reach.degenerate() {
            return mark_points(&points, spec.edge);
        }
        let (lo, hi) = bounds(&points);
        let empty = VoxelGrid::covering(spec.edge, &lo, &hi)?;
        // points are ordered (φ, θ1, θ2, θ3) with θ3 fastest
        let at = |a: usize, b: usize, c: usize, d: usize| &points[((a * n + b) * n + c) * n + d];
        let grid = (0..n)
            .into_par_iter()
            .fold(
                || empty.clone(),
                |mut g, d| {
                    for a in 0..n - 1 {
                        for b in 0..n - 1 {
                            for c in 0..n - 1 {
                                let corner = |bits: usize| {
                                    at(a + (bits & 1), b + ((bits >> 1) & 1), c + (bits >> 2), d)
                                };
                                for perm in KUHN {
                                    let v1 = 1 << perm[0];
                                    let v2 = v1 | (1 << perm[1]);
                                    rasterize_tet(
                                        &mut g,
                                        [corner(0), corner(v1), corner(v2), corner(7)],
                                    );
                                }
                            }
                        }
                    }
                    g
                },
            )
            .reduce(|| empty.clone(), |a, b| a.union_same_box(&b));
        Ok(grid)
    }
}

pub fn samplers() -> Registry<dyn WorkspaceSampler> {
    Registry::new("workspace sampler")
        .with("cells", || {
            Box::new(CellSampler) as Box<dyn WorkspaceSampler>
        })
        .with("grid", || {
            Box::new(GridSampler) as Box<dyn WorkspaceSampler>
        })
        .with("halton", || {
            Box::new(HaltonSampler) as Box<dyn WorkspaceSampler>
        })
}

/// Occupancy grid of one finger's fingertip workspace in palm coordinates.
pub fn sample_workspace(
    hand: &HandModel,
    finger: FingerName,
    spec: &SamplerSpec,
) -> Result<VoxelGrid> {
    let sampler = samplers().create(&spec.sampler)?;
    let reach = FingerReach::new(hand.finger(finger), hand.placement(finger))?;
    sampler.sample(&reach, spec)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OpposabilityReport {
    /// Shared thumb workspace with index, middle, ring, little (cm³).
    pub shared_cm3: [f64; 4],
    pub weights: [f64; 4],
    /// Workspace volumes of thumb, index, middle, ring, little (cm³).
    pub workspace_cm3: [f64; 5],
    pub thumb_length: f64,
    pub index: f64,
}

/// Thumb opposability index `J = Σ wᵢ vᵢ / d³` with volumes in mm³.
pub fn opposability_index(
    hand: &HandModel,
    weights: [f64; 4],
    spec: &SamplerSpec,
) -> Result<OpposabilityReport> {
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::Validation("weights must be non-negative".into()));
    }
    let d = hand.thumb_length;
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::Validation("thumb length d > 0 required".into()));
    }
    let grids = FingerName::ALL
        .iter()
        .map(|&f| sample_workspace(hand, f, spec))
        .collect::<Result<Vec<_>>>()?;
    let mut shared = [0.0; 4];
    for (i, s) in shared.iter_mut().enumerate() {
        *s = intersect_volume(&grids[0], &grids[i + 1], false)?;
    }
    let sum_mm3: f64 = shared
        .iter()
        .zip(&weights)
        .map(|(v, w)| w * v * 1000.0)
        .sum();
    Ok(OpposabilityReport {
        shared_cm3: shared,
        weights,
        workspace_cm3: std::array::from_fn(|i| grids[i].volume_cm3()),
        thumb_length: d,
        index: sum_mm3 / d.powi(3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::JointGeometry;

    fn frozen(finger: &FingerModel) -> FingerModel {
        let mut f = finger.clone();
        f.joints = f.joints.map(|j| JointGeometry {
            rom_min: 0.0,
            rom_max: 0.0,
            ..j
        });
        f
    }

    #[test]
    fn bitset_roundtrip() {
        let mut g = VoxelGrid::with_index_box(2.0, [-3, -2, 5], [4, 6, 9]).unwrap();
        assert!(g.insert_index([-3, -2, 5]));
        assert!(g.insert_index([4, 6, 9]));
        assert!(g.insert_index([0, 0, 7]));
        assert!(!g.insert_index([5, 0, 7]));
        assert_eq!(g.count(), 3);
        let idx: Vec<_> = g.indices().collect();
        assert_eq!(idx, vec![[-3, -2, 5], [0, 0, 7], [4, 6, 9]]);
        assert_eq!(g.volume_mm3(), 24.0);
        assert!(g.insert_point(&Vector3::new(-5.9, -3.1, 10.0)));
        assert!(g.contains_index([-3, -2, 5]));
    }

    #[test]
    fn zero_rom_is_single_voxel() {
        let f = frozen(&FingerModel::design_finger());
        let reach = FingerReach::new(&f, &RigidTransform::identity()).unwrap();
        for s in samplers().names() {
            let spec = SamplerSpec {
                sampler: s.into(),
                steps: 5,
                samples: Some(50),
                edge: 2.0,
            };
            let g = samplers().create(s).unwrap().sample(&reach, &spec).unwrap();
            assert_eq!(g.count(), 1, "{s}");
        }
    }

    #[test]
    fn self_intersection_and_disjoint() {
        let f = FingerModel::design_finger();
        let reach = FingerReach::new(&f, &RigidTransform::identity()).unwrap();
        let spec = SamplerSpec {
            steps: 6,
            ..SamplerSpec::default()
        };
        let g = CellSampler.sample(&reach, &spec).unwrap();
        assert!((intersect_volume(&g, &g, false).unwrap() - g.volume_cm3()).abs() < 1e-12);
        let far = FingerReach::new(&f, &RigidTransform::from_translation(500.0, 0.0, 0.0)).unwrap();
        let h = CellSampler.sample(&far, &spec).unwrap();
        assert_eq!(intersect_volume(&g, &h, false).unwrap(), 0.0);
    }

    #[test]
    fn resolution_mismatch() {
        let a = VoxelGrid::with_index_box(2.0, [0; 3], [3; 3]).unwrap();
        let mut b = VoxelGrid::with_index_box(1.0, [0; 3], [7; 3]).unwrap();
        for i in 0..8 {
            b.insert_index([i, i, i]);
        }
        assert!(matches!(
            intersect_volume(&a, &b, false),
            Err(Error::ResolutionMismatch(_, _))
        ));
        let mut a = a;
        a.insert_index([1, 1, 1]);
        // b's voxel (2,2,2)..(3,3,3) covers a's (1,1,1) only at its corner:
        // a's center (3,3,3) mm falls in b's voxel (3,3,3)
        assert_eq!(intersect_volume(&a, &b, true).unwrap(), 0.008);
    }

    #[test]
    fn halton_prefix() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(2, 3) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bad_spec_rejected() {
        let hand_err = SamplerSpec {
            steps: 1,
            ..SamplerSpec::default()
        };
        assert!(hand_err.validate().is_err());
        assert!(samplers().create("monte-carlo").is_err());
    }
}
