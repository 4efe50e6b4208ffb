//! Mechanical feasibility: universal-joint cone limits, coupler-coupler
//! clearance and crank-base clearance.
//!
//! Leg 3 is a stack of coaxial revolutes on the platform axis; it cannot
//! reach the couplers, so no segment check involves it.

use alloc::vec::Vec;

use crate::differential::jacobians;
use crate::error::{Error, Result};
use crate::kinematics::inverse_kinematics_home;
use crate::linalg::{abs, sin, sqrt, to_radians, Vec3, FRAC_PI_2};
use crate::mechanism::{leg_points, JointAngles, LegStates, MechanismGeometry};
use crate::orientation::Orientation;

/// Calibrated half-angle of the crank-side (B) cones: 29 degrees.
pub const DEFAULT_LIMA: f64 = to_radians(29.0);
/// Calibrated overrides: the platform-side (C) cones open to 47 degrees.
pub const DEFAULT_CONE_LIMITS: [Option<f64>; 4] = [None, None, Some(to_radians(47.0)), Some(to_radians(47.0))];
/// Calibrated base-plane depth below the motor points: `L sin(17 deg)` for
/// the parallel-actuator rod.
pub const DEFAULT_LIMD: f64 = 0.206_738_015_036_518_12;
pub const DEFAULT_CLEARANCE: f64 = 0.05;
pub const DEFAULT_SAMPLES_N: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentMethod {
    /// Closed-form closest points.
    Exact,
    /// March-and-project reference procedure with `samples_n` steps.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintParams {
    /// Half-angle shared by the four cones.
    pub lima: f64,
    /// Per-cone overrides in the order B1, B2, C1, C2.
    pub cone_limits: [Option<f64>; 4],
    pub limd: f64,
    pub clearance: f64,
    pub samples_n: usize,
    /// When set, `|det A|` and `|det B|` must both reach this value.
    pub singularity_margin: Option<f64>,
    pub segment_method: SegmentMethod,
}

impl Default for ConstraintParams {
    fn default() -> Self {
        ConstraintParams {
            lima: DEFAULT_LIMA,
            cone_limits: DEFAULT_CONE_LIMITS,
            limd: DEFAULT_LIMD,
            clearance: DEFAULT_CLEARANCE,
            samples_n: DEFAULT_SAMPLES_N,
            singularity_margin: None,
            segment_method: SegmentMethod::Exact,
        }
    }
}

impl ConstraintParams {
    pub fn validate(&self) -> Result<()> {
        let half_angle_ok = |a: f64| a > 0.0 && a < FRAC_PI_2;
        if !half_angle_ok(self.lima) {
            return Err(Error::InvalidParams("lima must lie in (0, pi/2)"));
        }
        if self.cone_limits.iter().flatten().any(|&a| !half_angle_ok(a)) {
            return Err(Error::InvalidParams("cone limits must lie in (0, pi/2)"));
        }
        if !(self.limd >= 0.0 && self.limd.is_finite()) {
            return Err(Error::InvalidParams("limd must be >= 0"));
        }
        if !(self.clearance >= 0.0 && self.clearance.is_finite()) {
            return Err(Error::InvalidParams("clearance must be >= 0"));
        }
        if self.samples_n < 2 {
            return Err(Error::InvalidParams("samples_n must be >= 2"));
        }
        if let Some(m) = self.singularity_margin {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(Error::InvalidParams("singularity_margin must be >= 0"));
            }
        }
        Ok(())
    }

    /// Effective half-angle of cone `k` (B1, B2, C1, C2).
    pub fn cone_limit(&self, k: usize) -> f64 {
        self.cone_limits[k].unwrap_or(self.lima)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintId {
    Unreachable,
    ConeB1,
    ConeB2,
    ConeC1,
    ConeC2,
    SegmentClearance,
    BaseClearance1,
    BaseClearance2,
    ParallelSingularity,
    SerialSingularity,
}

impl ConstraintId {
    pub const CONES: [ConstraintId; 4] =
        [ConstraintId::ConeB1, ConstraintId::ConeB2, ConstraintId::ConeC1, ConstraintId::ConeC2];

    pub fn tag(&self) -> &'static str {
        match self {
            ConstraintId::Unreachable => "unreachable",
            ConstraintId::ConeB1 => "cone_b1",
            ConstraintId::ConeB2 => "cone_b2",
            ConstraintId::ConeC1 => "cone_c1",
            ConstraintId::ConeC2 => "cone_c2",
            ConstraintId::SegmentClearance => "segment_clearance",
            ConstraintId::BaseClearance1 => "base_clearance_1",
            ConstraintId::BaseClearance2 => "base_clearance_2",
            ConstraintId::ParallelSingularity => "parallel_singularity",
            ConstraintId::SerialSingularity => "serial_singularity",
        }
    }
}

/// Outcome of [`pose_feasible`]. Measurements are NaN when IK failed.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub joints: Option<JointAngles>,
    pub cone_angles: [f64; 4],
    pub seg_distance: f64,
    pub base_margins: [f64; 2],
    pub det_a: f64,
    pub det_b: f64,
    pub failed: Vec<ConstraintId>,
}

/// Angles between each universal-joint direction and its cone axis, ordered
/// B1, B2, C1, C2.
///
/// At `B_i` the axis is `i_i x unit(l_i)`, perpendicular to the crank and
/// turning with it. At `C_i` the axis is the inward platform normal `-z_m`.
pub fn cone_angles(state: &LegStates) -> [f64; 4] {
    let down = -state.orientation.z_axis();
    let mut out = [0.0; 4];
    for (k, leg) in state.legs.iter().enumerate() {
        let b_axis = leg.axis.cross(&leg.l.normalize());
        out[k] = leg.r.angle_to(&b_axis);
        out[k + 2] = (-leg.r).angle_to(&down);
    }
    out
}

fn check_segment(p1: &Vec3, p2: &Vec3, q1: &Vec3, q2: &Vec3) -> Result<()> {
    let tiny = |d: Vec3| !(d.norm_squared() > 1e-300);
    if tiny(*p2 - *p1) || tiny(*q2 - *q1) {
        return Err(Error::DegenerateSegment);
    }
    Ok(())
}

/// Reference procedure: march `M1` along `[p1, p2]` in `n` steps, project
/// orthogonally onto the line through `q1, q2`, and keep `|M1 M2|` only when
/// the foot lies on the segment. Returns `f64::INFINITY` if no foot does.
pub fn segment_distance_sampled(p1: &Vec3, p2: &Vec3, q1: &Vec3, q2: &Vec3, n: usize) -> Result<f64> {
    check_segment(p1, p2, q1, q2)?;
    if n < 2 {
        return Err(Error::InvalidParams("samples_n must be >= 2"));
    }
    let d = *q2 - *q1;
    let len = d.norm();
    let inv_len2 = 1.0 / d.norm_squared();
    let mut best = f64::INFINITY;
    for k in 0..=n {
        let m1 = *p1 + (*p2 - *p1) * (k as f64 / n as f64);
        let m2 = *q1 + d * ((m1 - *q1).dot(&d) * inv_len2);
        if (m2 - *q1).norm() <= len && (m2 - *q2).norm() <= len {
            best = best.min((m2 - m1).norm());
        }
    }
    Ok(best)
}

/// Exact minimum distance between segments `[p1, p2]` and `[q1, q2]`.
pub fn segment_distance_exact(p1: &Vec3, p2: &Vec3, q1: &Vec3, q2: &Vec3) -> Result<f64> {
    check_segment(p1, p2, q1, q2)?;
    let (d1, d2, r) = (*p2 - *p1, *q2 - *q1, *p1 - *q1);
    let (a, e, f) = (d1.norm_squared(), d2.norm_squared(), d2.dot(&r));
    let (b, c) = (d1.dot(&d2), d1.dot(&r));
    let denom = a * e - b * b;
    // Parallel (or nearly) segments: any s works, pick 0.
    let mut s = if denom > 1e-14 * a * e { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    let gap = (*p1 + d1 * s) - (*q1 + d2 * t);
    Ok(sqrt(gap.norm_squared()))
}

/// `sin(theta_i) L + limd` for legs 1 and 2; positive means the crank tip stays
/// above the base plane.
pub fn base_clearance(q: &JointAngles, g: &MechanismGeometry, limd: f64) -> [f64; 2] {
    [sin(q.t1) * g.rod_length + limd, sin(q.t2) * g.rod_length + limd]
}

/// Every constraint at orientation `o`, using IK in the home working mode.
pub fn pose_feasible(g: &MechanismGeometry, o: &Orientation, params: &ConstraintParams) -> FeasibilityReport {
    let q = match inverse_kinematics_home(g, o) {
        Ok(q) => q,
        Err(_) => {
            return FeasibilityReport {
                feasible: false,
                joints: None,
                cone_angles: [f64::NAN; 4],
                seg_distance: f64::NAN,
                base_margins: [f64::NAN; 2],
                det_a: f64::NAN,
                det_b: f64::NAN,
                failed: alloc::vec![ConstraintId::Unreachable],
            }
        }
    };
    let state = leg_points(g, &q, o);
    let mut failed = Vec::new();

    let cones = cone_angles(&state);
    for (k, id) in ConstraintId::CONES.iter().enumerate() {
        if !(cones[k] <= params.cone_limit(k)) {
            failed.push(*id);
        }
    }

    let [l1, l2] = &state.legs;
    let seg_distance = match params.segment_method {
        SegmentMethod::Exact => segment_distance_exact(&l1.b, &l1.c, &l2.b, &l2.c),
        SegmentMethod::Sampled => segment_distance_sampled(&l1.b, &l1.c, &l2.b, &l2.c, params.samples_n),
    }
    .unwrap_or(0.0);
    if !(seg_distance >= params.clearance) {
        failed.push(ConstraintId::SegmentClearance);
    }

    let margins = base_clearance(&q, g, params.limd);
    if !(margins[0] > 0.0) {
        failed.push(ConstraintId::BaseClearance1);
    }
    if !(margins[1] > 0.0) {
        failed.push(ConstraintId::BaseClearance2);
    }

    let jp = jacobians(&state);
    let (det_a, det_b) = (jp.det_a(), jp.det_b());
    if let Some(m) = params.singularity_margin {
        if !(abs(det_a) >= m) {
            failed.push(ConstraintId::ParallelSingularity);
        }
        if !(abs(det_b) >= m) {
            failed.push(ConstraintId::SerialSingularity);
        }
    }

    FeasibilityReport {
        feasible: failed.is_empty(),
        joints: Some(q),
        cone_angles: cones,
        seg_distance,
        base_margins: margins,
        det_a,
        det_b,
        failed,
    }
}
