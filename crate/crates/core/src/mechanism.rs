//! Wrist geometry and per-pose leg vectors.
//!
//! Legs 1 and 2 are RUS chains: a crank of length `rod_length` turns about
//! the axis `i` through the motor point `A`, carrying `B`; a coupler of length
//! `coupler_length` joins `B` to the platform point `C`. Leg 3 is a spherical
//! chain whose first (actuated) joint is the platform yaw, so it has no
//! points of its own here.
//!
//! Crank position: `B(theta) = A + L (cos(theta) u + sin(theta) (i x u))` with
//! `u` the crank direction at `theta = 0`. For the parallel-actuator design
//! (`i = x`, `u = y`, `L = sqrt(2)/2`) this is exactly
//! `B1 = [sqrt2/2, sqrt2/2 cos t1, -1 + sqrt2/2 sin t1]`.
//!
//! `rod_length` for legs 1 and 2 is not given numerically anywhere for the
//! parallel-actuator design; `sqrt(2)/2` is the value implied by the
//! closed-form B-point expressions.

use crate::error::{Error, Result};
use crate::kinematics::{self, WorkingMode};
use crate::linalg::{abs, cos, sin, Vec3, FRAC_1_SQRT_2, FRAC_PI_4, SQRT_2};
use crate::orientation::Orientation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DesignVariant {
    /// Motor axes parallel to x, offset in y; isotropic A and B.
    ParallelAxes,
    /// Motor axes through the rotation center, mutually orthogonal.
    OrthogonalAxes,
    /// Coaxial motor axes along x crossing the z axis; only A can be isotropic.
    ParallelActuators,
}

impl DesignVariant {
    pub const ALL: [DesignVariant; 3] = [
        DesignVariant::ParallelAxes,
        DesignVariant::OrthogonalAxes,
        DesignVariant::ParallelActuators,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            DesignVariant::ParallelAxes => "parallel_axes",
            DesignVariant::OrthogonalAxes => "orthogonal_axes",
            DesignVariant::ParallelActuators => "parallel_actuators",
        }
    }

    /// Accepts the snake_case tag or the kebab-case CLI spelling.
    pub fn from_tag(s: &str) -> Option<DesignVariant> {
        DesignVariant::ALL
            .into_iter()
            .find(|v| v.tag() == s || v.tag().replace('_', "-") == s)
    }

    /// Motor-point constants `(a, b, c)` of `A1 = [a b c]`, `A2 = [-a b c]`.
    pub fn motor_constants(&self) -> (f64, f64, f64) {
        match self {
            DesignVariant::ParallelAxes => (FRAC_1_SQRT_2, (SQRT_2 - 2.0) / 2.0, -1.0),
            DesignVariant::OrthogonalAxes => (0.0, 0.0, 0.0),
            DesignVariant::ParallelActuators => (FRAC_1_SQRT_2, 0.0, -1.0),
        }
    }
}

/// Optional replacements for the variant defaults.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GeometryOverrides {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub rod_length: Option<f64>,
    pub coupler_length: Option<f64>,
    pub axis1: Option<Vec3>,
    pub axis2: Option<Vec3>,
    pub rod_home_dir1: Option<Vec3>,
    pub rod_home_dir2: Option<Vec3>,
    pub home_yaw: Option<f64>,
    pub scale_mm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointAngles {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl JointAngles {
    pub const fn new(t1: f64, t2: f64, t3: f64) -> Self {
        JointAngles { t1, t2, t3 }
    }
    pub fn as_array(&self) -> [f64; 3] {
        [self.t1, self.t2, self.t3]
    }
    pub fn from_array(a: [f64; 3]) -> Self {
        JointAngles::new(a[0], a[1], a[2])
    }
    pub fn leg(&self, leg: usize) -> f64 {
        match leg {
            0 => self.t1,
            1 => self.t2,
            _ => self.t3,
        }
    }
    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }
    pub fn max_abs_diff(&self, o: &JointAngles) -> f64 {
        let (a, b) = (self.as_array(), o.as_array());
        (0..3).map(|i| abs(crate::linalg::wrap_angle(a[i] - b[i]))).fold(0.0, f64::max)
    }
}

/// Reference configuration: the designed (isotropic-A) pose. Mode signs
/// measured here select inverse and direct branches everywhere else.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomePose {
    pub joints: JointAngles,
    pub orientation: Orientation,
    pub working_mode: WorkingMode,
    /// Sign of `(p2 x r2) . x_m` at home; picks the roll root in direct kinematics.
    pub assembly_sign: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismGeometry {
    pub variant: DesignVariant,
    pub a1: Vec3,
    pub a2: Vec3,
    pub i1: Vec3,
    pub i2: Vec3,
    pub rod_length: f64,
    pub coupler_length: f64,
    pub c1_mobile: Vec3,
    pub c2_mobile: Vec3,
    pub rod_home_dir1: Vec3,
    pub rod_home_dir2: Vec3,
    /// Millimetres per unit length; export metadata only.
    pub scale_mm: f64,
    pub home: HomePose,
}

/// Prototype section width in mm used as the default unit scale.
pub const DEFAULT_SCALE_MM: f64 = 100.0;

pub fn make_geometry(variant: DesignVariant, overrides: Option<&GeometryOverrides>) -> Result<MechanismGeometry> {
    let ov = overrides.copied().unwrap_or_default();
    let (a0, b0, c0) = variant.motor_constants();
    let (a, b, c) = (ov.a.unwrap_or(a0), ov.b.unwrap_or(b0), ov.c.unwrap_or(c0));
    let (i1, i2, d1, d2, rod) = match variant {
        DesignVariant::ParallelActuators => (Vec3::X, Vec3::X, Vec3::Y, Vec3::Y, FRAC_1_SQRT_2),
        DesignVariant::ParallelAxes => (Vec3::X, Vec3::X, Vec3::Y, Vec3::Y, 1.0),
        DesignVariant::OrthogonalAxes => (
            Vec3::X,
            Vec3::Y,
            Vec3::new(0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
            Vec3::new(-FRAC_1_SQRT_2, 0.0, -FRAC_1_SQRT_2),
            1.0,
        ),
    };
    let raw = RawGeometry {
        variant,
        a1: Vec3::new(a, b, c),
        a2: Vec3::new(-a, b, c),
        i1: ov.axis1.unwrap_or(i1),
        i2: ov.axis2.unwrap_or(i2),
        rod_length: ov.rod_length.unwrap_or(rod),
        coupler_length: ov.coupler_length.unwrap_or(1.0),
        rod_home_dir1: ov.rod_home_dir1.unwrap_or(d1),
        rod_home_dir2: ov.rod_home_dir2.unwrap_or(d2),
        home_yaw: ov.home_yaw.unwrap_or(FRAC_PI_4),
        scale_mm: ov.scale_mm.unwrap_or(DEFAULT_SCALE_MM),
    };
    raw.build()
}

/// Unvalidated geometry description; [`RawGeometry::build`] checks it and
/// computes the home pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawGeometry {
    pub variant: DesignVariant,
    pub a1: Vec3,
    pub a2: Vec3,
    pub i1: Vec3,
    pub i2: Vec3,
    pub rod_length: f64,
    pub coupler_length: f64,
    pub rod_home_dir1: Vec3,
    pub rod_home_dir2: Vec3,
    pub home_yaw: f64,
    pub scale_mm: f64,
}

impl RawGeometry {
    pub fn build(self) -> Result<MechanismGeometry> {
        if !(self.rod_length > 0.0 && self.rod_length.is_finite()) {
            return Err(Error::InvalidGeometry("rod_length must be positive"));
        }
        if !(self.coupler_length > 0.0 && self.coupler_length.is_finite()) {
            return Err(Error::InvalidGeometry("coupler_length must be positive"));
        }
        if !(self.scale_mm > 0.0 && self.scale_mm.is_finite()) {
            return Err(Error::InvalidGeometry("scale_mm must be positive"));
        }
        if !(self.a1.is_finite() && self.a2.is_finite() && self.home_yaw.is_finite()) {
            return Err(Error::InvalidGeometry("non-finite motor point"));
        }
        let i1 = self.i1.try_normalize().ok_or(Error::InvalidGeometry("zero axis i1"))?;
        let i2 = self.i2.try_normalize().ok_or(Error::InvalidGeometry("zero axis i2"))?;
        let d1 = perpendicular_unit(&self.rod_home_dir1, &i1)
            .ok_or(Error::InvalidGeometry("rod_home_dir1 parallel to i1"))?;
        let d2 = perpendicular_unit(&self.rod_home_dir2, &i2)
            .ok_or(Error::InvalidGeometry("rod_home_dir2 parallel to i2"))?;
        let mut g = MechanismGeometry {
            variant: self.variant,
            a1: self.a1,
            a2: self.a2,
            i1,
            i2,
            rod_length: self.rod_length,
            coupler_length: self.coupler_length,
            c1_mobile: Vec3::X,
            c2_mobile: Vec3::Y,
            rod_home_dir1: d1,
            rod_home_dir2: d2,
            scale_mm: self.scale_mm,
            home: HomePose {
                joints: JointAngles::new(0.0, 0.0, 0.0),
                orientation: Orientation::IDENTITY,
                working_mode: WorkingMode::new(1, 1),
                assembly_sign: 1.0,
            },
        };
        g.home = kinematics::compute_home(&g, Orientation::rot_z(self.home_yaw))?;
        Ok(g)
    }
}

/// Component of `v` orthogonal to `axis`, normalized.
fn perpendicular_unit(v: &Vec3, axis: &Vec3) -> Option<Vec3> {
    let w = *v - *axis * axis.dot(v);
    if w.norm() < 1e-9 * v.norm().max(1.0) {
        return None;
    }
    w.try_normalize()
}

impl MechanismGeometry {
    pub fn motor_point(&self, leg: usize) -> Vec3 {
        if leg == 0 {
            self.a1
        } else {
            self.a2
        }
    }
    pub fn axis(&self, leg: usize) -> Vec3 {
        if leg == 0 {
            self.i1
        } else {
            self.i2
        }
    }
    pub fn rod_home_dir(&self, leg: usize) -> Vec3 {
        if leg == 0 {
            self.rod_home_dir1
        } else {
            self.rod_home_dir2
        }
    }
    pub fn platform_point(&self, leg: usize) -> Vec3 {
        if leg == 0 {
            self.c1_mobile
        } else {
            self.c2_mobile
        }
    }

    /// Crank tip `B` of leg `leg` (0 or 1) at joint angle `theta`.
    pub fn crank_tip(&self, leg: usize, theta: f64) -> Vec3 {
        let (u, w) = self.crank_frame(leg);
        self.motor_point(leg) + (u * cos(theta) + w * sin(theta)) * self.rod_length
    }

    /// `(u, i x u)`: crank direction at zero and its quarter-turn.
    pub fn crank_frame(&self, leg: usize) -> (Vec3, Vec3) {
        let u = self.rod_home_dir(leg);
        (u, self.axis(leg).cross(&u))
    }

    /// Coefficients `(P, Q, K)` of the leg closure `P cos(t) + Q sin(t) = K`
    /// for platform point `c` (fixed frame).
    pub fn leg_closure_coefficients(&self, leg: usize, c: &Vec3) -> (f64, f64, f64) {
        let (u, w) = self.crank_frame(leg);
        let ca = *c - self.motor_point(leg);
        let l = self.rod_length;
        let p = 2.0 * l * ca.dot(&u);
        let q = 2.0 * l * ca.dot(&w);
        let k = ca.norm_squared() + l * l - self.coupler_length * self.coupler_length;
        (p, q, k)
    }
}

/// Fixed-frame points and vectors of one RUS leg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegState {
    pub a: Vec3,
    pub b: Vec3,
    pub c: Vec3,
    /// `b - a`
    pub l: Vec3,
    /// `c - b`
    pub r: Vec3,
    /// `c - o`
    pub p: Vec3,
    /// Unit crank axis.
    pub axis: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegStates {
    pub legs: [LegState; 2],
    pub joints: JointAngles,
    pub orientation: Orientation,
}

pub fn leg_points(g: &MechanismGeometry, q: &JointAngles, o: &Orientation) -> LegStates {
    let thetas = [q.t1, q.t2];
    let legs = core::array::from_fn(|leg| {
        let a = g.motor_point(leg);
        let b = g.crank_tip(leg, thetas[leg]);
        let c = o.rotate(&g.platform_point(leg));
        LegState { a, b, c, l: b - a, r: c - b, p: c, axis: g.axis(leg) }
    });
    LegStates { legs, joints: *q, orientation: *o }
}

/// `|c_i - b_i|^2 - coupler^2` for legs 1 and 2.
pub fn closure_residuals(g: &MechanismGeometry, q: &JointAngles, o: &Orientation) -> [f64; 2] {
    let s = leg_points(g, q, o);
    let d2 = g.coupler_length * g.coupler_length;
    [s.legs[0].r.norm_squared() - d2, s.legs[1].r.norm_squared() - d2]
}

pub fn home_pose(g: &MechanismGeometry) -> (JointAngles, Orientation) {
    (g.home.joints, g.home.orientation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::FRAC_PI_2;

    fn pa() -> MechanismGeometry {
        make_geometry(DesignVariant::ParallelActuators, None).unwrap()
    }

    #[test]
    fn variant_constants() {
        let g = pa();
        let h = FRAC_1_SQRT_2;
        assert_eq!(g.a1, Vec3::new(h, 0.0, -1.0));
        assert_eq!(g.a2, Vec3::new(-h, 0.0, -1.0));
        let g = make_geometry(DesignVariant::ParallelAxes, None).unwrap();
        assert_eq!(g.a1, Vec3::new(h, (SQRT_2 - 2.0) / 2.0, -1.0));
        let g = make_geometry(DesignVariant::OrthogonalAxes, None).unwrap();
        assert_eq!(g.a1, Vec3::ZERO);
        assert_eq!(g.a2, Vec3::ZERO);
        assert!(g.i1.dot(&g.i2).abs() < 1e-15);
        for v in DesignVariant::ALL {
            let g = make_geometry(v, None).unwrap();
            assert_eq!(g.coupler_length, 1.0);
            assert_eq!(g.c1_mobile, Vec3::X);
            assert_eq!(g.c2_mobile, Vec3::Y);
            for leg in 0..2 {
                assert!((g.axis(leg).norm() - 1.0).abs() < 1e-15);
                assert!(g.rod_home_dir(leg).dot(&g.axis(leg)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tags_round_trip() {
        for v in DesignVariant::ALL {
            assert_eq!(DesignVariant::from_tag(v.tag()), Some(v));
        }
        assert_eq!(DesignVariant::from_tag("parallel-actuators"), Some(DesignVariant::ParallelActuators));
        assert_eq!(DesignVariant::from_tag("nope"), None);
    }

    #[test]
    fn invalid_overrides_rejected() {
        let bad = [
            GeometryOverrides { rod_length: Some(0.0), ..Default::default() },
            GeometryOverrides { coupler_length: Some(-1.0), ..Default::default() },
            GeometryOverrides { axis1: Some(Vec3::ZERO), ..Default::default() },
            GeometryOverrides { rod_home_dir1: Some(Vec3::X), ..Default::default() },
        ];
        for ov in bad {
            assert!(matches!(
                make_geometry(DesignVariant::ParallelActuators, Some(&ov)),
                Err(Error::InvalidGeometry(_))
            ));
        }
    }

    #[test]
    fn crank_tip_matches_closed_form() {
        let g = pa();
        let h = FRAC_1_SQRT_2;
        for t in [-1.0, 0.0, 0.3, 2.0] {
            let b1 = g.crank_tip(0, t);
            let b2 = g.crank_tip(1, t);
            let e1 = Vec3::new(h, h * t.cos(), -1.0 + h * t.sin());
            let e2 = Vec3::new(-h, h * t.cos(), -1.0 + h * t.sin());
            assert!(b1.max_abs_diff(&e1) < 1e-12);
            assert!(b2.max_abs_diff(&e2) < 1e-12);
        }
    }

    #[test]
    fn leg_points_substitutions() {
        let g = pa();
        let h = FRAC_1_SQRT_2;
        let s = leg_points(&g, &JointAngles::new(0.0, 0.0, 0.0), &Orientation::IDENTITY);
        assert!(s.legs[0].b.max_abs_diff(&Vec3::new(h, h, -1.0)) < 1e-15);
        assert_eq!(s.legs[0].c, Vec3::X);
        let s = leg_points(&g, &JointAngles::new(FRAC_PI_2, 0.0, 0.0), &Orientation::IDENTITY);
        assert!(s.legs[0].b.max_abs_diff(&Vec3::new(h, 0.0, -1.0 + h)) < 1e-15);
    }

    #[test]
    fn residual_at_identity_zero_joints() {
        // |[1 - sqrt2/2, -sqrt2/2, 1]|^2 - 1 = 2 - sqrt2
        let g = pa();
        let r = closure_residuals(&g, &JointAngles::new(0.0, 0.0, 0.0), &Orientation::IDENTITY);
        let h = FRAC_1_SQRT_2;
        let expected = (1.0 - h) * (1.0 - h) + h * h + 1.0 - 1.0;
        assert!((r[0] - expected).abs() < 1e-15);
        assert!((r[0] - 0.585_786_437_626_905).abs() < 1e-12);
    }

    #[test]
    fn home_pose_is_designed_configuration() {
        let g = pa();
        let (q, o) = home_pose(&g);
        assert!(q.t1.abs() < 1e-12 && q.t2.abs() < 1e-12);
        assert!((q.t3 - FRAC_PI_4).abs() < 1e-15);
        assert!(o.max_abs_diff(&Orientation::rot_z(FRAC_PI_4)) < 1e-15);
        let r = closure_residuals(&g, &q, &o);
        assert!(r[0].abs() < 1e-10 && r[1].abs() < 1e-10);
        assert_eq!(q.t1, q.t2);
    }

    #[test]
    fn closure_linear_form_matches_residual() {
        let g = pa();
        let o = Orientation::from_rpy(crate::orientation::RpyAngles::new(0.7, 0.2, -0.1));
        for leg in 0..2 {
            let c = o.rotate(&g.platform_point(leg));
            let (p, q, k) = g.leg_closure_coefficients(leg, &c);
            for t in [-2.0, -0.5, 0.0, 1.0] {
                let mut qs = JointAngles::new(0.0, 0.0, 0.7);
                if leg == 0 {
                    qs.t1 = t
                } else {
                    qs.t2 = t
                }
                let res = closure_residuals(&g, &qs, &o)[leg];
                // |c-b|^2 - d^2 = K - P cos - Q sin
                assert!((res - (k - p * t.cos() - q * t.sin())).abs() < 1e-12);
            }
        }
    }
}
