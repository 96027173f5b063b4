//! Shared numeric tolerances and angle helpers.
//!
//! Angles cross the public API in degrees and are converted to radians
//! only inside the numeric kernels.

/// Geometric comparisons (mm, rad) on closed-form quantities.
pub const GEOMETRIC: f64 = 1e-9;

/// Iterative procedures (root finding, golden-section refinement).
pub const ITERATIVE: f64 = 1e-6;

#[inline]
pub fn deg(rad: f64) -> f64 {
    rad.to_degrees()
}

#[inline]
pub fn rad(deg: f64) -> f64 {
    deg.to_radians()
}

/// `true` when `a` and `b` agree to within `tol`.
#[inline]
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
