#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rcjhand::actuation::{ActuatorConfig, CouplingRule};
use rcjhand::{FingerAngles, FingerModel, FingerName, HandModel, JointAxis, JointGeometry, Pose};

pub type M4 = [[f64; 4]; 4];

pub fn mul(a: &M4, b: &M4) -> M4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn eye() -> M4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn trans(x: f64, y: f64, z: f64) -> M4 {
    let mut m = eye();
    m[0][3] = x;
    m[1][3] = y;
    m[2][3] = z;
    m
}

pub fn rx(t: f64) -> M4 {
    let (s, c) = t.sin_cos();
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, c, -s, 0.0],
        [0.0, s, c, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

pub fn ry(t: f64) -> M4 {
    let (s, c) = t.sin_cos();
    [
        [c, 0.0, s, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-s, 0.0, c, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
}

pub fn apply(m: &M4, p: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| m[i][0] * p[0] + m[i][1] * p[1] + m[i][2] * p[2] + m[i][3])
}

/// Rolling joint: half the rotation on each circle around the 2r contact
/// translation.
pub fn roll(r: f64, deviation: bool, deg: f64) -> M4 {
    let h = deg.to_radians() / 2.0;
    let rot = if deviation { rx(h) } else { ry(h) };
    mul(&mul(&rot, &trans(0.0, 0.0, 2.0 * r)), &rot)
}

/// Tip position of a finger written directly from the chain definition.
pub fn oracle_tip(f: &FingerModel, a: &FingerAngles) -> [f64; 3] {
    let r: Vec<f64> = f.joints.iter().map(|j| j.radius).collect();
    let l: Vec<f64> = f.links.iter().map(|l| l.length).collect();
    let cx = |i: usize| {
        let j = &f.joints[i];
        j.hole_offset - j.radius * (j.surface_angle.to_radians() / 2.0).tan()
    };
    let offsets = [
        trans(0.0, 0.0, l[0] - r[0] - r[1]),
        trans(cx(2) - cx(1), 0.0, l[1] - r[1] - r[2]),
        trans(cx(3) - cx(2), 0.0, l[2] - r[2] - r[3]),
        trans(0.0, 0.0, l[3] - r[3]),
    ];
    let mut m = eye();
    for i in 0..4 {
        m = mul(&m, &roll(r[i], i == 0, a.0[i]));
        m = mul(&m, &offsets[i]);
    }
    apply(&m, [0.0; 3])
}

pub fn uniform_angles(rng: &mut ChaCha8Rng, f: &FingerModel) -> FingerAngles {
    FingerAngles(std::array::from_fn(|i| {
        let j = &f.joints[i];
        rng.random_range(j.rom_min..=j.rom_max)
    }))
}

/// A random pose inside the ROM whose follower joints obey the coupling.
pub fn coupled_pose(rng: &mut ChaCha8Rng, hand: &HandModel, cfg: &ActuatorConfig) -> Pose {
    let mut pose = Pose::ZERO;
    for name in FingerName::ALL {
        let f = hand.finger(name);
        let rule = cfg.coupling(f.kind);
        let (drv, fol) = CouplingRule::joints(f.kind);
        let (lo, hi) = rule.driver_range(f).unwrap();
        let mut a = uniform_angles(rng, f);
        a.0[drv] = rng.random_range(lo..=hi);
        a.0[fol] = rule.ratio * a.0[drv];
        pose.0[name.index()] = a;
    }
    pose
}

/// Hole `(u, w)` on a wedge face, found by intersecting the two tangent
/// lines `q·(sin φ, cos φ) = r` at the ROM half-angles.
pub fn wedge_hole(j: &JointGeometry, closing: bool) -> (f64, f64) {
    let (pc, po) = (j.rom_max.to_radians() / 2.0, j.rom_min.to_radians() / 2.0);
    let r = j.radius;
    let det = pc.sin() * po.cos() - po.sin() * pc.cos();
    let pu = (r * po.cos() - r * pc.cos()) / det;
    let pw = (pc.sin() * r - po.sin() * r) / det;
    let d = match j.axis {
        JointAxis::Flexion => j.hole_offset,
        JointAxis::Deviation => j.lateral_spacing,
    };
    if closing {
        (pu + d * pc.cos(), pw - d * pc.sin())
    } else {
        (pu - d * po.cos(), pw + d * po.sin())
    }
}

/// (flexor?, lateral sign +1 radial / −1 ulnar / 0 center)
pub fn hole3(j: &JointGeometry, flexor: bool, lateral: f64) -> [f64; 3] {
    match j.axis {
        JointAxis::Flexion => {
            let (u, w) = wedge_hole(j, flexor);
            [u, lateral * j.lateral_spacing / 2.0, w]
        }
        JointAxis::Deviation => {
            let (u, w) = wedge_hole(j, lateral < 0.0);
            [
                if flexor {
                    j.hole_offset
                } else {
                    -j.hole_offset
                },
                -u,
                w,
            ]
        }
    }
}

pub fn oracle_segment(j: &JointGeometry, deg: f64, p: [f64; 3]) -> f64 {
    let m = roll(j.radius, j.axis == JointAxis::Deviation, deg);
    let q = apply(&m, [p[0], p[1], -p[2]]);
    let d = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2) + (q[2] - p[2]).powi(2)).sqrt();
    d + 2.0 * p[2]
}
