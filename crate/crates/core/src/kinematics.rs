//! Inverse and direct kinematics.
//!
//! Every closure equation in this mechanism reduces to the form
//! `alpha cos(x) + beta sin(x) = gamma`, which the tangent half-angle
//! substitution `t = tan(x/2)` turns into the quadratic
//! `(gamma + alpha) t^2 - 2 beta t + (gamma - alpha) = 0`.
//!
//! * Inverse: the yaw of the platform *is* the spherical-leg joint `t3`; each
//!   RUS leg then gives one independent quadratic in `tan(t_i/2)`.
//! * Direct (parallel-actuator design): the leg-1 equation only involves
//!   pitch and always has the root `tan(pitch/2) = 1`, i.e. pitch = pi/2,
//!   whatever the joints. The other factor is linear. For each pitch the
//!   leg-2 equation is a quadratic in `tan(roll/2)`.
//!
//! Branches are labelled by signs that only change across singularities:
//! `(l_i x r_i) . i_i` per leg for inverse solutions (the derivative of the
//! leg closure with respect to its joint), and `(p2 x r2) . x_m` for the two
//! roll roots of a direct solution (the derivative of the leg-2 closure with
//! respect to roll).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{abs, atan, cos, sin, solve_quadratic, wrap_angle, Mat3, QuadraticRoots, Vec3, FRAC_PI_2, PI};
use crate::mechanism::{closure_residuals, leg_points, DesignVariant, HomePose, JointAngles, MechanismGeometry};
use crate::orientation::{Orientation, RpyAngles};

/// Leading-coefficient magnitude below which a half-angle quadratic is solved
/// as a linear equation.
pub const LEAD_TOL: f64 = 1e-12;
/// Relative band on the quarter-discriminant treated as a double root.
pub const DOUBLE_ROOT_TOL: f64 = 1e-13;
/// `|(l x r) . i|` below which a working mode is undefined.
pub const MODE_TOL: f64 = 1e-12;
/// Residual bound every returned solution satisfies.
pub const CLOSURE_TOL: f64 = 1e-9;

fn sign_of(v: f64, tol: f64) -> i8 {
    if v > tol {
        1
    } else if v < -tol {
        -1
    } else {
        0
    }
}

/// Roots of `alpha cos(x) + beta sin(x) = gamma`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigRoots {
    pub roots: Vec<f64>,
    /// The two roots merged.
    pub double_root: bool,
    /// The half-angle quadratic lost its leading term (a root sits at x = pi).
    pub near_singular_quadratic: bool,
}

/// Tangent half-angle solve with one Newton polish per root. The substitution
/// cannot represent `x = pi`; that root is tested separately.
pub fn solve_cos_sin(alpha: f64, beta: f64, gamma: f64) -> TrigRoots {
    let lead = gamma + alpha;
    let scale = (alpha * alpha + beta * beta).max(1e-300);
    let mut out = TrigRoots::default();
    let push = |x: f64, roots: &mut Vec<f64>| {
        let x = polish(alpha, beta, gamma, wrap_angle(x));
        if !roots.iter().any(|r| abs(wrap_angle(r - x)) < 1e-12) {
            roots.push(x);
        }
    };
    match solve_quadratic(lead, -2.0 * beta, gamma - alpha, LEAD_TOL, DOUBLE_ROOT_TOL * scale) {
        QuadraticRoots::None => {}
        QuadraticRoots::Linear(t) => {
            out.near_singular_quadratic = true;
            push(2.0 * atan(t), &mut out.roots);
        }
        QuadraticRoots::Two { lo, hi, double } => {
            out.double_root = double;
            push(2.0 * atan(lo), &mut out.roots);
            push(2.0 * atan(hi), &mut out.roots);
        }
    }
    // f(pi) = -alpha - gamma = -lead
    if abs(lead) <= LEAD_TOL {
        out.near_singular_quadratic = true;
        push(PI, &mut out.roots);
    }
    out.roots.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    out
}

fn polish(alpha: f64, beta: f64, gamma: f64, x: f64) -> f64 {
    let f = alpha * cos(x) + beta * sin(x) - gamma;
    let df = -alpha * sin(x) + beta * cos(x);
    if abs(df) > 1e-9 {
        wrap_angle(x - f / df)
    } else {
        x
    }
}

/// Inverse-kinematic branch: per-leg sign of `(l_i x r_i) . i_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WorkingMode {
    pub s1: i8,
    pub s2: i8,
}

impl WorkingMode {
    pub const fn new(s1: i8, s2: i8) -> Self {
        WorkingMode { s1, s2 }
    }
    pub fn sign(&self, leg: usize) -> i8 {
        if leg == 0 {
            self.s1
        } else {
            self.s2
        }
    }
    pub const ALL: [WorkingMode; 4] =
        [WorkingMode::new(1, 1), WorkingMode::new(1, -1), WorkingMode::new(-1, 1), WorkingMode::new(-1, -1)];

    /// `"+-"` style label.
    pub fn label(&self) -> [char; 2] {
        let c = |s: i8| if s >= 0 { '+' } else { '-' };
        [c(self.s1), c(self.s2)]
    }

    pub fn parse(s: &str) -> Option<WorkingMode> {
        let mut it = s.chars().map(|c| match c {
            '+' => Some(1i8),
            '-' => Some(-1i8),
            _ => None,
        });
        let m = WorkingMode::new(it.next()??, it.next()??);
        it.next().is_none().then_some(m)
    }
}

/// One root of a single leg's closure equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LegRoot {
    pub theta: f64,
    /// `(l x r) . i`, the diagonal entry of B; its sign is the leg's mode.
    pub b_entry: f64,
    /// `l . r`, reported for reference.
    pub l_dot_r: f64,
    pub mode_sign: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegSolutions {
    pub roots: Vec<LegRoot>,
    pub double_root: bool,
    pub near_singular_quadratic: bool,
}

/// Enumerates the joint angles of leg `leg` (0 or 1) placing its coupler end
/// on `c` (fixed frame).
pub fn leg_roots(g: &MechanismGeometry, leg: usize, c: &Vec3) -> Result<LegSolutions> {
    let (p, q, k) = g.leg_closure_coefficients(leg, c);
    let tr = solve_cos_sin(p, q, k);
    if tr.roots.is_empty() {
        return Err(Error::Unreachable { leg: leg as u8 + 1 });
    }
    let axis = g.axis(leg);
    let a = g.motor_point(leg);
    let roots = tr
        .roots
        .iter()
        .map(|&theta| {
            let b = g.crank_tip(leg, theta);
            let (l, r) = (b - a, *c - b);
            let b_entry = l.cross(&r).dot(&axis);
            LegRoot { theta, b_entry, l_dot_r: l.dot(&r), mode_sign: sign_of(b_entry, MODE_TOL) }
        })
        .collect();
    Ok(LegSolutions { roots, double_root: tr.double_root, near_singular_quadratic: tr.near_singular_quadratic })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IkSolution {
    pub joints: JointAngles,
    pub mode: WorkingMode,
    pub legs: [LegRoot; 2],
    pub residuals: [f64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct IkSolutionSet {
    pub solutions: Vec<IkSolution>,
    pub legs: [LegSolutions; 2],
}

impl IkSolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// Spherical-leg joint: the platform yaw.
pub fn spherical_joint(o: &Orientation) -> f64 {
    o.to_rpy().yaw
}

pub fn inverse_kinematics_all(g: &MechanismGeometry, o: &Orientation) -> Result<IkSolutionSet> {
    let t3 = spherical_joint(o);
    let c1 = o.rotate(&g.c1_mobile);
    let c2 = o.rotate(&g.c2_mobile);
    let l1 = leg_roots(g, 0, &c1)?;
    let l2 = leg_roots(g, 1, &c2)?;
    let mut solutions = Vec::with_capacity(l1.roots.len() * l2.roots.len());
    for r1 in &l1.roots {
        for r2 in &l2.roots {
            let joints = JointAngles::new(r1.theta, r2.theta, t3);
            solutions.push(IkSolution {
                joints,
                mode: WorkingMode::new(r1.mode_sign, r2.mode_sign),
                legs: [*r1, *r2],
                residuals: closure_residuals(g, &joints, o),
            });
        }
    }
    Ok(IkSolutionSet { solutions, legs: [l1, l2] })
}

fn pick_leg(g: &MechanismGeometry, leg: usize, c: &Vec3, sign: i8) -> Result<f64> {
    let sols = leg_roots(g, leg, c)?;
    let mut found = None;
    for r in &sols.roots {
        if r.mode_sign == 0 {
            return Err(Error::ModeVanished { leg: leg as u8 + 1 });
        }
        if r.mode_sign == sign {
            found = Some(r.theta);
        }
    }
    found.ok_or(Error::ModeNotFound)
}

pub fn inverse_kinematics(g: &MechanismGeometry, o: &Orientation, mode: WorkingMode) -> Result<JointAngles> {
    let t1 = pick_leg(g, 0, &o.rotate(&g.c1_mobile), mode.s1)?;
    let t2 = pick_leg(g, 1, &o.rotate(&g.c2_mobile), mode.s2)?;
    Ok(JointAngles::new(t1, t2, spherical_joint(o)))
}

/// Inverse kinematics in the working mode recorded at the home pose.
pub fn inverse_kinematics_home(g: &MechanismGeometry, o: &Orientation) -> Result<JointAngles> {
    inverse_kinematics(g, o, g.home.working_mode)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssemblyBranch {
    /// pitch = pi/2, present for every actuation.
    SpuriousQ1,
    Principal,
}

impl AssemblyBranch {
    pub fn tag(&self) -> &'static str {
        match self {
            AssemblyBranch::SpuriousQ1 => "spurious_q1",
            AssemblyBranch::Principal => "principal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyMode {
    pub branch: AssemblyBranch,
    /// Sign of `(p2 x r2) . x_m`.
    pub sign: i8,
    /// `r2 . p2`, reported for reference.
    pub r2_dot_p2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkSolution {
    pub orientation: Orientation,
    pub pitch: f64,
    pub roll: f64,
    pub assembly: AssemblyMode,
    pub residuals: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FkSolutionSet {
    pub solutions: Vec<FkSolution>,
}

impl FkSolutionSet {
    pub fn len(&self) -> usize {
        self.solutions.len()
    }
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }
}

/// `(p2 x r2) . x_m`: the roll derivative of the leg-2 closure, up to a factor 2.
pub fn assembly_discriminant(g: &MechanismGeometry, q: &JointAngles, o: &Orientation) -> f64 {
    let s = leg_points(g, q, o);
    let leg = &s.legs[1];
    leg.p.cross(&leg.r).dot(&o.x_axis())
}

fn pitch_roots(g: &MechanismGeometry, q: &JointAngles) -> Result<Vec<(f64, AssemblyBranch)>> {
    let b1 = g.crank_tip(0, q.t1);
    let (sy, cy) = (sin(q.t3), cos(q.t3));
    let d2 = g.coupler_length * g.coupler_length;
    // c1 = [cy cp, sy cp, -sp] and c1 . b1 = gamma
    let alpha = cy * b1.x() + sy * b1.y();
    let beta = -b1.z();
    let gamma = 0.5 * (g.c1_mobile.norm_squared() + b1.norm_squared() - d2);
    let mut out = Vec::with_capacity(2);
    let scale = abs(alpha) + abs(beta) + abs(gamma);
    // The quadratic evaluated at Q = 1 is 2 (gamma - beta).
    if abs(gamma - beta) <= 1e-12 * scale.max(1.0) {
        out.push((FRAC_PI_2, AssemblyBranch::SpuriousQ1));
        // (Q - 1)((gamma + alpha) Q - (gamma - alpha))
        let (lin, cst) = (gamma + alpha, gamma - alpha);
        if abs(lin) > LEAD_TOL {
            let p = polish(alpha, beta, gamma, 2.0 * atan(cst / lin));
            if abs(p - FRAC_PI_2) > 1e-12 {
                out.push((p, AssemblyBranch::Principal));
            }
        } else if abs(cst) > LEAD_TOL {
            out.push((PI, AssemblyBranch::Principal));
        } else {
            return Err(Error::DegenerateLinearFactor);
        }
    } else {
        for p in solve_cos_sin(alpha, beta, gamma).roots {
            let branch = if abs(p - FRAC_PI_2) < 1e-9 { AssemblyBranch::SpuriousQ1 } else { AssemblyBranch::Principal };
            out.push((p, branch));
        }
    }
    Ok(out)
}

fn roll_roots(g: &MechanismGeometry, q: &JointAngles, pitch: f64) -> Vec<f64> {
    let b2 = g.crank_tip(1, q.t2);
    let (sy, cy) = (sin(q.t3), cos(q.t3));
    let (sp, cp) = (sin(pitch), cos(pitch));
    let d2 = g.coupler_length * g.coupler_length;
    let alpha = -sy * b2.x() + cy * b2.y();
    let beta = sp * (cy * b2.x() + sy * b2.y()) + cp * b2.z();
    let gamma = 0.5 * (g.c2_mobile.norm_squared() + b2.norm_squared() - d2);
    solve_cos_sin(alpha, beta, gamma).roots
}

/// All closure-consistent orientations for the given joints (parallel-actuator
/// design only).
pub fn direct_kinematics_all(g: &MechanismGeometry, q: &JointAngles) -> Result<FkSolutionSet> {
    if g.variant != DesignVariant::ParallelActuators {
        return Err(Error::NoClosedForm);
    }
    let mut solutions = Vec::with_capacity(4);
    for (pitch, branch) in pitch_roots(g, q)? {
        for roll in roll_roots(g, q, pitch) {
            let o = Orientation::from_rpy(RpyAngles::new(q.t3, pitch, roll));
            let residuals = closure_residuals(g, q, &o);
            let s = leg_points(g, q, &o);
            let disc = assembly_discriminant(g, q, &o);
            solutions.push(FkSolution {
                orientation: o,
                pitch,
                roll,
                assembly: AssemblyMode { branch, sign: sign_of(disc, 0.0), r2_dot_p2: s.legs[1].r.dot(&s.legs[1].p) },
                residuals,
            });
        }
    }
    Ok(FkSolutionSet { solutions })
}

/// How [`direct_kinematics`] picks between the two principal roll roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssemblySelect {
    /// The assembly sign recorded at the home pose.
    Home,
    Sign(i8),
}

pub fn direct_kinematics(g: &MechanismGeometry, q: &JointAngles, select: AssemblySelect) -> Result<Orientation> {
    let want = match select {
        AssemblySelect::Home => sign_of(g.home.assembly_sign, 0.0),
        AssemblySelect::Sign(s) => s,
    };
    let set = direct_kinematics_all(g, q)?;
    let mut principal = set.solutions.iter().filter(|s| s.assembly.branch == AssemblyBranch::Principal).peekable();
    if principal.peek().is_none() {
        return Err(Error::Unreachable { leg: 2 });
    }
    let matching: Vec<&FkSolution> = principal.filter(|s| s.assembly.sign == want).collect();
    match matching.as_slice() {
        [one] => Ok(one.orientation),
        [] => Err(Error::NoMatchingAssembly),
        _ => Err(Error::AmbiguousSelection),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericFk {
    pub orientation: Orientation,
    pub iterations: usize,
    pub residual: f64,
}

pub const NEWTON_MAX_ITER: usize = 100;
pub const NEWTON_TOL: f64 = 1e-10;

/// Damped Newton on the two closure residuals over (pitch, roll) with yaw
/// fixed to `t3`. Works for any design variant.
pub fn direct_kinematics_numeric(g: &MechanismGeometry, q: &JointAngles, seed: &Orientation) -> Result<NumericFk> {
    let rpy = seed.to_rpy();
    // keep the seed's attitude when its RPY yaw differs from t3 by pi
    let (mut pitch, mut roll) = (rpy.pitch, rpy.roll);
    if abs(wrap_angle(rpy.yaw - q.t3)) > FRAC_PI_2 {
        pitch = PI - pitch;
        roll += PI;
    }
    newton_pitch_roll(g, q, pitch, roll)
}

pub(crate) fn newton_pitch_roll(g: &MechanismGeometry, q: &JointAngles, mut pitch: f64, mut roll: f64) -> Result<NumericFk> {
    let eval = |p: f64, r: f64| {
        let o = Orientation::from_rpy(RpyAngles::new(q.t3, p, r));
        (o, closure_residuals(g, q, &o))
    };
    let norm = |f: &[f64; 2]| abs(f[0]).max(abs(f[1]));
    let (mut o, mut f) = eval(pitch, roll);
    for it in 0..NEWTON_MAX_ITER {
        if norm(&f) <= NEWTON_TOL {
            return Ok(NumericFk { orientation: o, iterations: it, residual: norm(&f) });
        }
        let s = leg_points(g, q, &o);
        let y_prime = Vec3::new(-sin(q.t3), cos(q.t3), 0.0);
        let x_dd = o.x_axis();
        let row = |leg: usize| {
            let st = &s.legs[leg];
            let dp = y_prime.cross(&st.c);
            let dr = x_dd.cross(&st.c);
            [2.0 * st.r.dot(&dp), 2.0 * st.r.dot(&dr)]
        };
        let (j0, j1) = (row(0), row(1));
        // Levenberg-damped 2x2 normal equations
        let jt_j = [
            [j0[0] * j0[0] + j1[0] * j1[0], j0[0] * j0[1] + j1[0] * j1[1]],
            [j0[0] * j0[1] + j1[0] * j1[1], j0[1] * j0[1] + j1[1] * j1[1]],
        ];
        let jt_f = [j0[0] * f[0] + j1[0] * f[1], j0[1] * f[0] + j1[1] * f[1]];
        let det_j = j0[0] * j1[1] - j0[1] * j1[0];
        let (dp, dr) = if abs(det_j) > 1e-12 {
            ((j1[1] * f[0] - j0[1] * f[1]) / det_j, (-j1[0] * f[0] + j0[0] * f[1]) / det_j)
        } else {
            let lambda = 1e-6 + 1e-3 * (jt_j[0][0] + jt_j[1][1]);
            let a = [[jt_j[0][0] + lambda, jt_j[0][1]], [jt_j[1][0], jt_j[1][1] + lambda]];
            let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
            ((a[1][1] * jt_f[0] - a[0][1] * jt_f[1]) / d, (-a[1][0] * jt_f[0] + a[0][0] * jt_f[1]) / d)
        };
        let mut step = 1.0;
        let current = norm(&f);
        let mut accepted = false;
        for _ in 0..30 {
            let (np, nr) = (pitch - step * dp, roll - step * dr);
            let (no, nf) = eval(np, nr);
            if norm(&nf) < current {
                pitch = np;
                roll = nr;
                o = no;
                f = nf;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence { iterations: it, residual: current });
        }
    }
    if norm(&f) <= NEWTON_TOL {
        return Ok(NumericFk { orientation: o, iterations: NEWTON_MAX_ITER, residual: norm(&f) });
    }
    Err(Error::NoConvergence { iterations: NEWTON_MAX_ITER, residual: norm(&f) })
}

/// Home pose at orientation `o_home`: for each leg, the root whose coupler is
/// closest to the crank normal `i x l` (the configuration the limit cones are
/// centred on).
pub(crate) fn compute_home(g: &MechanismGeometry, o_home: Orientation) -> Result<HomePose> {
    let mut thetas = [0.0; 2];
    let mut signs = [0i8; 2];
    for leg in 0..2 {
        let c = o_home.rotate(&g.platform_point(leg));
        let sols = leg_roots(g, leg, &c)?;
        let axis = g.axis(leg);
        let best = sols
            .roots
            .iter()
            .map(|r| {
                let b = g.crank_tip(leg, r.theta);
                let l = b - g.motor_point(leg);
                let normal = axis.cross(&l.normalize());
                (r, normal.angle_to(&(c - b)))
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(core::cmp::Ordering::Equal))
            .map(|(r, _)| *r)
            .ok_or(Error::Unreachable { leg: leg as u8 + 1 })?;
        if best.mode_sign == 0 {
            return Err(Error::ModeVanished { leg: leg as u8 + 1 });
        }
        thetas[leg] = if abs(best.theta) < 1e-14 { 0.0 } else { best.theta };
        signs[leg] = best.mode_sign;
    }
    let joints = JointAngles::new(thetas[0], thetas[1], spherical_joint(&o_home));
    let disc = assembly_discriminant(g, &joints, &o_home);
    if abs(disc) < MODE_TOL {
        return Err(Error::InvalidGeometry("home pose has no defined assembly mode"));
    }
    Ok(HomePose {
        joints,
        orientation: o_home,
        working_mode: WorkingMode::new(signs[0], signs[1]),
        assembly_sign: if disc > 0.0 { 1.0 } else { -1.0 },
    })
}

/// Angular velocity `w` (fixed frame) from `dR/dt R^T`, for finite-difference checks.
pub fn angular_velocity_from_derivative(dr: &Mat3, r: &Orientation) -> Vec3 {
    let w = dr.mul_mat(&r.matrix().transpose());
    Vec3::new(0.5 * (w.0[2][1] - w.0[1][2]), 0.5 * (w.0[0][2] - w.0[2][0]), 0.5 * (w.0[1][0] - w.0[0][1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::make_geometry;
    use crate::orientation::TiltTorsion;
    use core::f64::consts::FRAC_PI_4;

    fn pa() -> MechanismGeometry {
        make_geometry(DesignVariant::ParallelActuators, None).unwrap()
    }

    /// Dense scan of a leg residual over (-pi, pi]; returns sign-change brackets.
    fn scan_roots(g: &MechanismGeometry, leg: usize, o: &Orientation) -> Vec<f64> {
        let n = 200_000;
        let f = |t: f64| {
            let mut q = JointAngles::new(0.0, 0.0, 0.0);
            if leg == 0 {
                q.t1 = t
            } else {
                q.t2 = t
            }
            closure_residuals(g, &q, o)[leg]
        };
        let mut out = Vec::new();
        let mut prev_t = -PI;
        let mut prev = f(prev_t);
        for k in 1..=n {
            let t = -PI + 2.0 * PI * k as f64 / n as f64;
            let v = f(t);
            if prev == 0.0 || prev.signum() != v.signum() {
                // bisection
                let (mut lo, mut hi) = (prev_t, t);
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if f(lo).signum() == f(mid).signum() {
                        lo = mid
                    } else {
                        hi = mid
                    }
                }
                out.push(0.5 * (lo + hi));
            }
            prev = v;
            prev_t = t;
        }
        out
    }

    #[test]
    fn cos_sin_solver_blind_spot() {
        // cos(x) = -1 has its root at pi exactly, unreachable through tan(x/2)
        let r = solve_cos_sin(1.0, 0.0, -1.0);
        assert!(r.near_singular_quadratic);
        assert_eq!(r.roots, [PI]);
        // sin(x) - cos(x) = 1 : roots pi/2 and pi
        let r = solve_cos_sin(-1.0, 1.0, 1.0);
        assert!(r.near_singular_quadratic);
        assert_eq!(r.roots.len(), 2);
        let has = |x: f64| r.roots.iter().any(|v| wrap_angle(v - x).abs() < 1e-14);
        assert!(has(FRAC_PI_2) && has(PI), "{:?}", r.roots);
        assert!(solve_cos_sin(1.0, 0.0, 2.0).roots.is_empty());
    }

    #[test]
    fn ik_at_identity_matches_dense_scan() {
        let g = pa();
        let o = Orientation::IDENTITY;
        for leg in 0..2 {
            let scanned = scan_roots(&g, leg, &o);
            let c = o.rotate(&g.platform_point(leg));
            let sols = leg_roots(&g, leg, &c).unwrap();
            if leg == 1 {
                // leg 2 is tangent to its reach circle at identity: a double root at pi/4
                assert!(sols.double_root);
                assert_eq!(sols.roots.len(), 1);
                assert!((sols.roots[0].theta - FRAC_PI_4).abs() < 1e-7);
                continue;
            }
            assert_eq!(scanned.len(), sols.roots.len());
            for (a, b) in scanned.iter().zip(&sols.roots) {
                assert!((a - b.theta).abs() < 1e-9, "{a} vs {}", b.theta);
            }
        }
    }

    #[test]
    fn ik_at_home_and_figure_query() {
        let g = pa();
        let set = inverse_kinematics_all(&g, &g.home.orientation).unwrap();
        assert_eq!(set.len(), 4);
        assert!(set.solutions.iter().any(|s| s.joints.max_abs_diff(&g.home.joints) < 1e-12));
        let o = Orientation::from_rpy(RpyAngles::new(FRAC_PI_4, PI / 12.0, PI / 12.0));
        let set = inverse_kinematics_all(&g, &o).unwrap();
        assert_eq!(set.len(), 4);
        let mut modes: Vec<_> = set.solutions.iter().map(|s| (s.mode.s1, s.mode.s2)).collect();
        modes.sort();
        assert_eq!(modes, [(-1, -1), (-1, 1), (1, -1), (1, 1)]);
        for s in &set.solutions {
            assert!(s.residuals[0].abs() <= CLOSURE_TOL && s.residuals[1].abs() <= CLOSURE_TOL);
        }
    }

    #[test]
    fn far_tilt_unreachable() {
        let g = pa();
        let o = Orientation::from_tnt(TiltTorsion::new(0.0, 2.8, 0.0)).compose(&g.home.orientation);
        let err = inverse_kinematics_all(&g, &o).unwrap_err();
        assert!(matches!(err, Error::Unreachable { .. }));
        // the dense scan agrees for the failing leg
        let Error::Unreachable { leg } = err else { unreachable!() };
        assert!(scan_roots(&g, leg as usize - 1, &o).is_empty());
    }

    #[test]
    fn legs_are_independent() {
        let g = pa();
        let o = Orientation::from_rpy(RpyAngles::new(0.9, 0.1, -0.05));
        let a = leg_roots(&g, 0, &o.rotate(&g.c1_mobile)).unwrap();
        // leg-1 roots depend only on c1; perturbing theta2 is irrelevant by construction,
        // check that the closure residual of leg 1 ignores theta2
        for r in &a.roots {
            for t2 in [-1.0, 0.0, 2.0] {
                let res = closure_residuals(&g, &JointAngles::new(r.theta, t2, 0.9), &o);
                assert!(res[0].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fk_figure_query_has_four_solutions() {
        let g = pa();
        let q = JointAngles::new(0.1, 0.2, FRAC_PI_4);
        let set = direct_kinematics_all(&g, &q).unwrap();
        assert_eq!(set.len(), 4);
        let spurious = set.solutions.iter().filter(|s| s.assembly.branch == AssemblyBranch::SpuriousQ1).count();
        assert_eq!(spurious, 2);
        for s in &set.solutions {
            assert!(s.residuals[0].abs() <= CLOSURE_TOL && s.residuals[1].abs() <= CLOSURE_TOL);
            if s.assembly.branch == AssemblyBranch::SpuriousQ1 {
                assert_eq!(s.pitch, FRAC_PI_2);
            }
        }
        let principal: Vec<_> =
            set.solutions.iter().filter(|s| s.assembly.branch == AssemblyBranch::Principal).collect();
        assert_ne!(principal[0].assembly.sign, principal[1].assembly.sign);
    }

    #[test]
    fn fk_home_returns_home_orientation() {
        let g = pa();
        let o = direct_kinematics(&g, &g.home.joints, AssemblySelect::Home).unwrap();
        assert!(o.max_abs_diff(&g.home.orientation) < 1e-12);
        let set = direct_kinematics_all(&g, &g.home.joints).unwrap();
        assert!(set.solutions.iter().any(|s| s.orientation.max_abs_diff(&g.home.orientation) < 1e-12));
    }

    #[test]
    fn fk_requires_parallel_actuators() {
        let g = make_geometry(DesignVariant::ParallelAxes, None).unwrap();
        assert_eq!(direct_kinematics_all(&g, &g.home.joints), Err(Error::NoClosedForm));
    }

    #[test]
    fn numeric_fk_agrees_with_closed_form() {
        let g = pa();
        let q = JointAngles::new(0.1, 0.2, FRAC_PI_4);
        let closed = direct_kinematics(&g, &q, AssemblySelect::Home).unwrap();
        let num = direct_kinematics_numeric(&g, &q, &g.home.orientation).unwrap();
        assert!(num.orientation.max_abs_diff(&closed) < 1e-9);
        let exact = direct_kinematics_numeric(&g, &q, &closed).unwrap();
        assert!(exact.iterations <= 2);
    }

    #[test]
    fn numeric_fk_fails_outside_reach() {
        let g = pa();
        // both cranks folded straight down, spherical joint far off
        let q = JointAngles::new(-FRAC_PI_2, -FRAC_PI_2, FRAC_PI_4);
        assert!(matches!(
            direct_kinematics_numeric(&g, &q, &g.home.orientation),
            Err(Error::NoConvergence { .. })
        ));
    }

    #[test]
    fn numeric_fk_for_other_variants() {
        for v in [DesignVariant::ParallelAxes, DesignVariant::OrthogonalAxes] {
            let g = make_geometry(v, None).unwrap();
            let target = Orientation::from_rpy(RpyAngles::new(FRAC_PI_4 + 0.05, 0.04, -0.03));
            let q = inverse_kinematics_home(&g, &target).unwrap();
            let fk = direct_kinematics_numeric(&g, &q, &g.home.orientation).unwrap();
            assert!(fk.orientation.max_abs_diff(&target) < 1e-9, "{v:?}");
        }
    }

    #[test]
    fn working_mode_parse() {
        assert_eq!(WorkingMode::parse("+-"), Some(WorkingMode::new(1, -1)));
        assert_eq!(WorkingMode::parse("++"), Some(WorkingMode::new(1, 1)));
        assert_eq!(WorkingMode::parse("+"), None);
        assert_eq!(WorkingMode::parse("+-+"), None);
        assert_eq!(WorkingMode::new(-1, 1).label(), ['-', '+']);
    }
}
