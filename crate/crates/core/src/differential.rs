//! Velocity-level analysis: the Jacobian pair `(A, B)`, singularities and
//! isotropy.
//!
//! For legs 1 and 2, differentiating `|c_i - b_i| = const` gives
//! `(p_i x r_i) . w = ((l_i x r_i) . i_i) dtheta_i`, with the crank turning
//! positively about `i_i`. The third row comes from the spherical leg, whose
//! actuated joint is the platform yaw:
//! `dtheta_3 = [cos(t3) tan(pitch), sin(t3) tan(pitch), 1] . w`, which reduces
//! to `[0 0 1]` at zero pitch. Together: `A w = B dq`, `dq = B^-1 A w`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{abs, Mat3, Vec3};
use crate::mechanism::LegStates;

/// Default threshold on `|det A|` and `|det B|` for the unit mechanism.
pub const DEFAULT_SINGULARITY_EPS: f64 = 1e-8;
/// Smallest singular value treated as zero by [`condition_number`].
pub const SIGMA_MIN: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianPair {
    pub a: Mat3,
    /// Diagonal.
    pub b: Mat3,
}

impl JacobianPair {
    pub fn det_a(&self) -> f64 {
        self.a.det()
    }
    pub fn det_b(&self) -> f64 {
        self.b.0[0][0] * self.b.0[1][1] * self.b.0[2][2]
    }
    /// `A w - B dq`; zero for every admissible velocity pair.
    pub fn velocity_residual(&self, w: &Vec3, dq: &Vec3) -> Vec3 {
        self.a.mul_vec(w) - self.b.mul_vec(dq)
    }
}

/// Third row of A: the yaw rate as a function of the angular velocity.
fn spherical_row(state: &LegStates) -> Vec3 {
    let m = state.orientation.matrix().0;
    let cp2 = m[0][0] * m[0][0] + m[1][0] * m[1][0];
    let k = -m[2][0] / cp2;
    Vec3::new(k * m[0][0], k * m[1][0], 1.0)
}

pub fn jacobians(state: &LegStates) -> JacobianPair {
    let [l1, l2] = &state.legs;
    let a = Mat3::from_rows(l1.p.cross(&l1.r), l2.p.cross(&l2.r), spherical_row(state));
    let b = Mat3::diag(l1.l.cross(&l1.r).dot(&l1.axis), l2.l.cross(&l2.r).dot(&l2.axis), 1.0);
    JacobianPair { a, b }
}

/// `J^-1 = B^-1 A`, mapping angular velocity to joint rates.
pub fn inverse_jacobian(state: &LegStates, eps: f64) -> Result<Mat3> {
    let jp = jacobians(state);
    let det_b = jp.det_b();
    if abs(det_b) <= eps {
        return Err(Error::SerialSingular { det_b });
    }
    let rows: [Vec3; 3] = core::array::from_fn(|i| jp.a.row(i) * (1.0 / jp.b.0[i][i]));
    Ok(Mat3::from_rows(rows[0], rows[1], rows[2]))
}

/// Joint rates producing the angular velocity `w`.
pub fn inverse_velocity(state: &LegStates, w: &Vec3, eps: f64) -> Result<Vec3> {
    Ok(inverse_jacobian(state, eps)?.mul_vec(w))
}

/// Angular velocity produced by joint rates `dq`; `None` at a parallel singularity.
pub fn forward_velocity(state: &LegStates, dq: &Vec3, eps: f64) -> Option<Vec3> {
    let jp = jacobians(state);
    if abs(jp.det_a()) <= eps {
        return None;
    }
    Some(jp.a.inverse()?.mul_vec(&jp.b.mul_vec(dq)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SingularityKind {
    Regular,
    Parallel,
    Serial,
    Both,
}

impl SingularityKind {
    pub fn tag(&self) -> &'static str {
        match self {
            SingularityKind::Regular => "regular",
            SingularityKind::Parallel => "parallel",
            SingularityKind::Serial => "serial",
            SingularityKind::Both => "both",
        }
    }
}

/// Geometric conditions that force a determinant to vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Witness {
    /// `B1, B2, C1, C2, O` coplanar: `(p1 x r1) || (p2 x r2)`.
    Coplanar,
    /// `(B_i, C_i, O)` aligned: `p_i x r_i = 0`.
    AlignedBco { leg: u8 },
    /// Crank and coupler aligned: `l_i || r_i`.
    RodCouplerAligned { leg: u8 },
    /// Coupler aligned with the motor axis: `r_i || i_i`.
    CouplerAxisAligned { leg: u8 },
}

impl Witness {
    pub fn describe(&self) -> alloc::string::String {
        use alloc::format;
        match self {
            Witness::Coplanar => "coplanar (B1,B2,C1,C2,O)".into(),
            Witness::AlignedBco { leg } => format!("alignment (B{leg},C{leg},O)"),
            Witness::RodCouplerAligned { leg } => format!("alignment (l{leg},r{leg})"),
            Witness::CouplerAxisAligned { leg } => format!("alignment (r{leg},i{leg})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityReport {
    pub kind: SingularityKind,
    pub det_a: f64,
    pub det_b: f64,
    pub witnesses: Vec<Witness>,
}

/// `|u x v| <= tol |u| |v|`; zero vectors count as parallel to anything.
fn parallel(u: &Vec3, v: &Vec3, tol: f64) -> bool {
    u.cross(v).norm() <= tol * u.norm() * v.norm()
}

pub fn singularity_report(state: &LegStates, eps: f64) -> SingularityReport {
    let jp = jacobians(state);
    let (det_a, det_b) = (jp.det_a(), jp.det_b());
    let kind = match (abs(det_a) <= eps, abs(det_b) <= eps) {
        (false, false) => SingularityKind::Regular,
        (true, false) => SingularityKind::Parallel,
        (false, true) => SingularityKind::Serial,
        (true, true) => SingularityKind::Both,
    };
    let mut witnesses = Vec::new();
    let u: [Vec3; 2] = core::array::from_fn(|i| state.legs[i].p.cross(&state.legs[i].r));
    if parallel(&u[0], &u[1], eps) {
        witnesses.push(Witness::Coplanar);
    }
    for (i, leg) in state.legs.iter().enumerate() {
        let n = i as u8 + 1;
        if parallel(&leg.p, &leg.r, eps) {
            witnesses.push(Witness::AlignedBco { leg: n });
        }
        if parallel(&leg.l, &leg.r, eps) {
            witnesses.push(Witness::RodCouplerAligned { leg: n });
        }
        if parallel(&leg.r, &leg.axis, eps) {
            witnesses.push(Witness::CouplerAxisAligned { leg: n });
        }
    }
    SingularityReport { kind, det_a, det_b, witnesses }
}

/// 2-norm condition number; `f64::INFINITY` when the smallest singular value
/// is below [`SIGMA_MIN`].
pub fn condition_number(m: &Mat3) -> f64 {
    if !m.is_finite() {
        return f64::INFINITY;
    }
    let s = m.singular_values();
    if s[2] < SIGMA_MIN {
        return f64::INFINITY;
    }
    (s[0] / s[2]).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropyCondition {
    pub name: &'static str,
    /// Deviation from the ideal (a dot product, or a norm minus one).
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsotropyReport {
    pub a_conditions: Vec<IsotropyCondition>,
    pub b_conditions: Vec<IsotropyCondition>,
    pub kappa_a: f64,
    pub kappa_b: f64,
    /// `(l_i x r_i) . i_i` for both legs.
    pub b_entries: [f64; 2],
}

impl IsotropyReport {
    pub fn a_isotropic(&self) -> bool {
        self.a_conditions.iter().all(|c| c.pass)
    }
    pub fn b_isotropic(&self) -> bool {
        self.b_conditions.iter().all(|c| c.pass)
    }
}

pub fn isotropy_check(state: &LegStates, tol: f64) -> IsotropyReport {
    let [l1, l2] = &state.legs;
    let cond = |name, value: f64| IsotropyCondition { name, value, pass: abs(value) <= tol };
    let unit = |v: &Vec3| v.norm() - 1.0;
    let a_conditions = alloc::vec![
        cond("p1 . r1", l1.p.dot(&l1.r)),
        cond("p2 . r2", l2.p.dot(&l2.r)),
        cond("(p1 x r1) . (p2 x r2)", l1.p.cross(&l1.r).dot(&l2.p.cross(&l2.r))),
        cond("|r1| - 1", unit(&l1.r)),
        cond("|p1| - 1", unit(&l1.p)),
        cond("|r2| - 1", unit(&l2.r)),
        cond("|p2| - 1", unit(&l2.p)),
    ];
    let b_conditions = alloc::vec![
        cond("l1 . r1", l1.l.dot(&l1.r)),
        cond("l2 . r2", l2.l.dot(&l2.r)),
        cond("l1 . i1", l1.l.dot(&l1.axis)),
        cond("l2 . i2", l2.l.dot(&l2.axis)),
        cond("|r1| - 1", unit(&l1.r)),
        cond("|l1| - 1", unit(&l1.l)),
        cond("|r2| - 1", unit(&l2.r)),
        cond("|l2| - 1", unit(&l2.l)),
    ];
    let jp = jacobians(state);
    IsotropyReport {
        a_conditions,
        b_conditions,
        kappa_a: condition_number(&jp.a),
        kappa_b: condition_number(&jp.b),
        b_entries: [jp.b.0[0][0], jp.b.0[1][1]],
    }
}
