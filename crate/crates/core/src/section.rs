//! Planar profile of one rolling joint and the cable holes on it.
//!
//! Each link end is a wedge whose two flat faces are tangent to the rolling
//! circle at the half-angles of the ROM end stops, so the faces of the two
//! links close flush at either end of travel. The faces intersect at the
//! virtual pivot `P`; a hole sits on each face at distance `d` from `P`
//! (`κ` for flexion, `γ` for deviation).
//!
//! Coordinates are `(u, w)` in the rolling-circle-center frame: `w` runs
//! along the link toward the joint, `u` is the bending direction. A
//! positive joint angle bends the distal link toward `+u`, so the hole on
//! the `+u` face (the closing face) shortens with positive angles.

use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Face {
    /// `+u` face; its cable shortens as the joint angle grows.
    Closing,
    /// `−u` face; its cable lengthens as the joint angle grows.
    Opening,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointSection {
    pub radius: f64,
    pub offset: f64,
    /// Tangent half-angle of the closing face, rad.
    pub closing_face: f64,
    /// Tangent half-angle of the opening face, rad.
    pub opening_face: f64,
}

impl JointSection {
    pub fn from_rom(radius: f64, offset: f64, rom_min_deg: f64, rom_max_deg: f64) -> Self {
        Self {
            radius,
            offset,
            closing_face: tol::rad(rom_max_deg) / 2.0,
            opening_face: tol::rad(rom_min_deg) / 2.0,
        }
    }

    pub fn with_radius(&self, radius: f64) -> Self {
        Self { radius, ..*self }
    }

    /// Intersection of the two faces.
    pub fn pivot(&self) -> (f64, f64) {
        let half = (self.closing_face - self.opening_face) / 2.0;
        let mid = (self.closing_face + self.opening_face) / 2.0;
        let k = self.radius / half.cos();
        (k * mid.sin(), k * mid.cos())
    }

    pub fn hole(&self, face: Face) -> (f64, f64) {
        let (pu, pw) = self.pivot();
        let d = self.offset;
        match face {
            Face::Closing => (
                pu + d * self.closing_face.cos(),
                pw - d * self.closing_face.sin(),
            ),
            Face::Opening => (
                pu - d * self.opening_face.cos(),
                pw + d * self.opening_face.sin(),
            ),
        }
    }

    /// Cable length across the joint for a hole at `(u, w)`: the straight
    /// chord between the mirrored holes plus the axial runs from each
    /// circle-center plane to its hole. Equals `2r` at zero angle.
    pub fn length_at(&self, hole: (f64, f64), angle_rad: f64) -> f64 {
        let (u, w) = hole;
        let (s, c) = (angle_rad / 2.0).sin_cos();
        2.0 * (self.radius - w * c - u * s).abs() + 2.0 * w
    }

    pub fn length(&self, face: Face, angle_rad: f64) -> f64 {
        self.length_at(self.hole(face), angle_rad)
    }

    /// Summed length change of the closing and opening cables relative to
    /// the zero angle.
    pub fn paired_change(&self, angle_rad: f64) -> f64 {
        let c = self.hole(Face::Closing);
        let o = self.hole(Face::Opening);
        self.length_at(c, angle_rad) + self.length_at(o, angle_rad) - 4.0 * self.radius
    }

    pub fn validate(&self, label: &str) -> Result<()> {
        let half = (self.closing_face - self.opening_face) / 2.0;
        let arc_reach = self.radius * half.tan();
        if self.offset <= arc_reach {
            return Err(Error::InvalidGeometry(format!(
                "{label}: hole offset {} must lie on the flat face beyond the rolling arc ({arc_reach:.4} mm)",
                self.offset
            )));
        }
        for face in [Face::Closing, Face::Opening] {
            let (_, w) = self.hole(face);
            if w > self.radius + tol::GEOMETRIC {
                return Err(Error::InvalidGeometry(format!(
                    "{label}: {face:?} hole protrudes past the contact line"
                )));
            }
        }
        Ok(())
    }
}
