//! Platform attitude. The rotation matrix is the canonical representation;
//! roll-pitch-yaw and tilt-and-torsion angles are views onto it.
//!
//! * RPY: `R = Rz(yaw) Ry'(pitch) Rx''(roll)` (intrinsic z, y', x''), where
//!   yaw is also the first actuated joint of the spherical leg.
//! * Tilt-and-torsion: `R = Rz(azimuth) Ry(tilt) Rz(torsion - azimuth)`.

use crate::linalg::{abs, atan2, cos, hypot, sin, wrap_angle, Mat3, Vec3, FRAC_PI_2, PI};

/// Orthonormality tolerance used by [`Orientation::is_valid`].
pub const ORTHONORMAL_TOL: f64 = 1e-12;
/// Pitch distance from +-pi/2 below which RPY extraction reports gimbal lock.
pub const GIMBAL_TOL: f64 = 1e-9;
/// `sin(tilt)` below which tilt is snapped to 0 or pi and azimuth set to 0.
const TILT_SNAP: f64 = 1e-12;

/// Rotation taking mobile-frame coordinates to fixed-frame coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orientation(Mat3);

impl Default for Orientation {
    fn default() -> Self {
        Orientation::IDENTITY
    }
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation(Mat3::IDENTITY);

    /// Wraps a matrix without checking it; callers producing rotations by
    /// construction use this.
    pub const fn from_matrix_unchecked(m: Mat3) -> Self {
        Orientation(m)
    }

    /// Wraps a matrix after checking orthonormality and handedness.
    pub fn from_matrix(m: Mat3) -> Option<Self> {
        let o = Orientation(m);
        o.is_valid().then_some(o)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn is_valid(&self) -> bool {
        let m = &self.0;
        m.is_finite()
            && m.transpose().mul_mat(m).max_abs_diff(&Mat3::IDENTITY) <= ORTHONORMAL_TOL
            && abs(m.det() - 1.0) <= ORTHONORMAL_TOL
    }

    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        self.0.mul_vec(v)
    }

    /// `self * other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Orientation) -> Orientation {
        Orientation(self.0.mul_mat(&other.0))
    }

    pub fn inverse(&self) -> Orientation {
        Orientation(self.0.transpose())
    }

    pub fn rot_z(a: f64) -> Orientation {
        Orientation(Mat3::rot_z(a))
    }

    /// Mobile x axis expressed in the fixed frame.
    pub fn x_axis(&self) -> Vec3 {
        self.0.col(0)
    }
    pub fn y_axis(&self) -> Vec3 {
        self.0.col(1)
    }
    pub fn z_axis(&self) -> Vec3 {
        self.0.col(2)
    }

    /// Rotation angle of `self^T other`, in `[0, pi]`.
    pub fn angle_to(&self, other: &Orientation) -> f64 {
        let r = self.0.transpose().mul_mat(&other.0);
        let tr = r.0[0][0] + r.0[1][1] + r.0[2][2];
        let s = hypot(
            hypot(r.0[2][1] - r.0[1][2], r.0[0][2] - r.0[2][0]),
            r.0[1][0] - r.0[0][1],
        );
        atan2(s, tr - 1.0)
    }

    pub fn max_abs_diff(&self, other: &Orientation) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    pub fn from_rpy(angles: RpyAngles) -> Orientation {
        rpy_to_orientation(angles)
    }
    pub fn to_rpy(&self) -> RpyAngles {
        match orientation_to_rpy(self) {
            Ok(a) => a,
            Err(GimbalLock { resolved }) => resolved,
        }
    }
    pub fn from_tnt(t: TiltTorsion) -> Orientation {
        tnt_to_orientation(t)
    }
    pub fn to_tnt(&self) -> TiltTorsion {
        orientation_to_tnt(self)
    }

    /// The yaw (first RPY angle), well defined away from gimbal lock.
    pub fn yaw(&self) -> f64 {
        self.to_rpy().yaw
    }
}

/// Intrinsic z-y'-x'' angles.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RpyAngles {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

impl RpyAngles {
    pub const fn new(yaw: f64, pitch: f64, roll: f64) -> Self {
        RpyAngles { yaw, pitch, roll }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TiltTorsion {
    pub azimuth: f64,
    pub tilt: f64,
    pub torsion: f64,
}

impl TiltTorsion {
    pub const fn new(azimuth: f64, tilt: f64, torsion: f64) -> Self {
        TiltTorsion { azimuth, tilt, torsion }
    }
}

/// RPY extraction hit `|pitch| = pi/2`; yaw and roll are not separable.
/// `resolved` carries the convention `roll = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GimbalLock {
    pub resolved: RpyAngles,
}

pub fn rpy_to_orientation(a: RpyAngles) -> Orientation {
    let (sy, cy) = (sin(a.yaw), cos(a.yaw));
    let (sp, cp) = (sin(a.pitch), cos(a.pitch));
    let (sr, cr) = (sin(a.roll), cos(a.roll));
    Orientation(Mat3([
        [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
        [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
        [-sp, cp * sr, cp * cr],
    ]))
}

pub fn orientation_to_rpy(o: &Orientation) -> Result<RpyAngles, GimbalLock> {
    let m = &o.0 .0;
    let cp = hypot(m[0][0], m[1][0]);
    let pitch = atan2(-m[2][0], cp);
    if abs(abs(pitch) - FRAC_PI_2) <= GIMBAL_TOL {
        let pitch = if pitch > 0.0 { FRAC_PI_2 } else { -FRAC_PI_2 };
        let yaw = atan2(-m[0][1], m[1][1]);
        return Err(GimbalLock { resolved: RpyAngles { yaw, pitch, roll: 0.0 } });
    }
    Ok(RpyAngles {
        yaw: atan2(m[1][0], m[0][0]),
        pitch,
        roll: atan2(m[2][1], m[2][2]),
    })
}

pub fn tnt_to_orientation(t: TiltTorsion) -> Orientation {
    let r = Mat3::rot_z(t.azimuth)
        .mul_mat(&Mat3::rot_y(t.tilt))
        .mul_mat(&Mat3::rot_z(t.torsion - t.azimuth));
    Orientation(r)
}

/// Inverse of [`tnt_to_orientation`]: a z-y-z extraction whose third angle is
/// `torsion - azimuth`. The sum (tilt < pi/2) or difference (tilt > pi/2) of
/// the two z angles is read from the well-conditioned 2x2 block so that
/// near-degenerate tilts still round-trip to machine precision.
pub fn orientation_to_tnt(o: &Orientation) -> TiltTorsion {
    let m = &o.0 .0;
    let s_tilt = hypot(m[0][2], m[1][2]);
    let tilt = atan2(s_tilt, m[2][2]);
    if m[2][2] >= 0.0 {
        let torsion = atan2(m[1][0] - m[0][1], m[0][0] + m[1][1]);
        if s_tilt < TILT_SNAP {
            return TiltTorsion { azimuth: 0.0, tilt: 0.0, torsion: wrap_angle(torsion) };
        }
        let azimuth = atan2(m[1][2], m[0][2]);
        TiltTorsion { azimuth: wrap_angle(azimuth), tilt, torsion: wrap_angle(torsion) }
    } else {
        // azimuth - (torsion - azimuth)
        let diff = atan2(-(m[1][0] + m[0][1]), -(m[0][0] - m[1][1]));
        if s_tilt < TILT_SNAP {
            return TiltTorsion { azimuth: 0.0, tilt: PI, torsion: wrap_angle(-diff) };
        }
        let azimuth = atan2(m[1][2], m[0][2]);
        TiltTorsion {
            azimuth: wrap_angle(azimuth),
            tilt,
            torsion: wrap_angle(2.0 * azimuth - diff),
        }
    }
}
