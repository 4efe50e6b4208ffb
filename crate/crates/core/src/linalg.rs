//! Small fixed-size vector/matrix types and the scalar math the rest of the
//! crate needs. Everything here is `no_std`; transcendental functions come
//! from `libm`.

use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

pub use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI, SQRT_2, TAU};

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub fn tan(x: f64) -> f64 {
    libm::tan(x)
}
#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub fn atan(x: f64) -> f64 {
    libm::atan(x)
}
#[inline]
pub fn atan2(y: f64, x: f64) -> f64 {
    libm::atan2(y, x)
}
#[inline]
pub fn asin(x: f64) -> f64 {
    libm::asin(x)
}
#[inline]
pub fn acos(x: f64) -> f64 {
    libm::acos(x.clamp(-1.0, 1.0))
}
#[inline]
pub fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}
#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = libm::remainder(a, TAU);
    if w <= -PI {
        w += TAU;
    }
    w
}

#[inline]
pub const fn to_degrees(rad: f64) -> f64 {
    rad * (180.0 / PI)
}
#[inline]
pub const fn to_radians(deg: f64) -> f64 {
    deg * (PI / 180.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0, 0.0, 0.0]);
    pub const X: Vec3 = Vec3([1.0, 0.0, 0.0]);
    pub const Y: Vec3 = Vec3([0.0, 1.0, 0.0]);
    pub const Z: Vec3 = Vec3([0.0, 0.0, 1.0]);

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }
    #[inline]
    pub fn x(&self) -> f64 {
        self.0[0]
    }
    #[inline]
    pub fn y(&self) -> f64 {
        self.0[1]
    }
    #[inline]
    pub fn z(&self) -> f64 {
        self.0[2]
    }
    #[inline]
    pub fn dot(&self, o: &Vec3) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }
    #[inline]
    pub fn cross(&self, o: &Vec3) -> Vec3 {
        let [a, b, c] = self.0;
        let [d, e, f] = o.0;
        Vec3([b * f - c * e, c * d - a * f, a * e - b * d])
    }
    #[inline]
    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }
    #[inline]
    pub fn norm(&self) -> f64 {
        sqrt(self.norm_squared())
    }
    /// Unit vector, or `None` for a (numerically) zero vector.
    pub fn try_normalize(&self) -> Option<Vec3> {
        let n = self.norm();
        if n > 1e-300 && n.is_finite() {
            Some(*self * (1.0 / n))
        } else {
            None
        }
    }
    pub fn normalize(&self) -> Vec3 {
        self.try_normalize().unwrap_or(Vec3::ZERO)
    }
    /// Angle between two vectors in `[0, pi]`, robust near 0 and pi.
    pub fn angle_to(&self, o: &Vec3) -> f64 {
        atan2(self.cross(o).norm(), self.dot(o))
    }
    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
    pub fn max_abs_diff(&self, o: &Vec3) -> f64 {
        (0..3).map(|i| abs(self.0[i] - o.0[i])).fold(0.0, f64::max)
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
impl IndexMut<usize> for Vec3 {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}
impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}
impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}
impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}
impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}
impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Default for Mat3 {
    fn default() -> Self {
        Mat3::IDENTITY
    }
}

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    pub const ZERO: Mat3 = Mat3([[0.0; 3]; 3]);

    pub fn from_rows(r0: Vec3, r1: Vec3, r2: Vec3) -> Mat3 {
        Mat3([r0.0, r1.0, r2.0])
    }
    pub fn from_cols(c0: Vec3, c1: Vec3, c2: Vec3) -> Mat3 {
        Mat3::from_rows(c0, c1, c2).transpose()
    }
    pub fn diag(a: f64, b: f64, c: f64) -> Mat3 {
        Mat3([[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]])
    }
    pub fn row(&self, i: usize) -> Vec3 {
        Vec3(self.0[i])
    }
    pub fn col(&self, j: usize) -> Vec3 {
        Vec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }
    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }
    pub fn mul_vec(&self, v: &Vec3) -> Vec3 {
        Vec3([self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v)])
    }
    pub fn mul_mat(&self, o: &Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(r)
    }
    pub fn det(&self) -> f64 {
        self.row(0).dot(&self.row(1).cross(&self.row(2)))
    }
    pub fn inverse(&self) -> Option<Mat3> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let (r0, r1, r2) = (self.row(0), self.row(1), self.row(2));
        // Columns of the inverse are the cross products of the rows.
        let inv = Mat3::from_cols(r1.cross(&r2), r2.cross(&r0), r0.cross(&r1));
        Some(inv.scale(1.0 / d))
    }
    pub fn scale(&self, s: f64) -> Mat3 {
        let mut r = self.0;
        r.iter_mut().flatten().for_each(|v| *v *= s);
        Mat3(r)
    }
    pub fn sub(&self, o: &Mat3) -> Mat3 {
        let mut r = self.0;
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v -= o.0[i][j];
            }
        }
        Mat3(r)
    }
    pub fn max_abs_diff(&self, o: &Mat3) -> f64 {
        self.sub(o).0.iter().flatten().map(|v| abs(*v)).fold(0.0, f64::max)
    }
    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }
    /// Elementary rotation about the fixed x axis.
    pub fn rot_x(a: f64) -> Mat3 {
        let (s, c) = (sin(a), cos(a));
        Mat3([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    }
    pub fn rot_y(a: f64) -> Mat3 {
        let (s, c) = (sin(a), cos(a));
        Mat3([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    }
    pub fn rot_z(a: f64) -> Mat3 {
        let (s, c) = (sin(a), cos(a));
        Mat3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    }
    /// Rotation by `angle` about the unit vector `axis` (Rodrigues).
    pub fn axis_angle(axis: &Vec3, angle: f64) -> Mat3 {
        let k = axis.normalize();
        let (s, c) = (sin(angle), cos(angle));
        let t = 1.0 - c;
        let [x, y, z] = k.0;
        Mat3([
            [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
            [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
            [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
        ])
    }

    /// Singular values, largest first, from a Jacobi eigen-decomposition of
    /// `M^T M`.
    pub fn singular_values(&self) -> [f64; 3] {
        let mut ev = symmetric_eigenvalues(&self.transpose().mul_mat(self));
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
        [sqrt(ev[0].max(0.0)), sqrt(ev[1].max(0.0)), sqrt(ev[2].max(0.0))]
    }
}

impl Index<(usize, usize)> for Mat3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

/// Cyclic Jacobi sweeps on a symmetric 3x3 matrix.
fn symmetric_eigenvalues(m: &Mat3) -> [f64; 3] {
    let mut a = m.0;
    for _ in 0..64 {
        let off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        let scale = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
        if off <= 1e-32 * scale || off == 0.0 {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (abs(theta) + sqrt(theta * theta + 1.0));
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / sqrt(t * t + 1.0);
            let s = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
        }
    }
    [a[0][0], a[1][1], a[2][2]]
}

/// Real roots of `a x^2 + b x + c = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadraticRoots {
    None,
    /// Leading coefficient vanished; the single root of `b x + c = 0`.
    Linear(f64),
    /// Two real roots (equal when `double` is set), ascending.
    Two { lo: f64, hi: f64, double: bool },
}

/// Solves a quadratic with the cancellation-free form of the root formula.
/// `lead_tol` is the magnitude below which `a` counts as zero, `disc_tol` the
/// band around zero in which the (quarter) discriminant is treated as a
/// double root.
pub fn solve_quadratic(a: f64, b: f64, c: f64, lead_tol: f64, disc_tol: f64) -> QuadraticRoots {
    if abs(a) <= lead_tol {
        if b == 0.0 {
            return QuadraticRoots::None;
        }
        return QuadraticRoots::Linear(-c / b);
    }
    let half_b = 0.5 * b;
    let disc = half_b * half_b - a * c;
    if disc < -disc_tol {
        return QuadraticRoots::None;
    }
    if disc <= disc_tol {
        let r = -half_b / a;
        return QuadraticRoots::Two { lo: r, hi: r, double: true };
    }
    let q = -(half_b + half_b.signum() * sqrt(disc));
    let q = if q == 0.0 { -sqrt(disc) } else { q };
    let r1 = q / a;
    let r2 = if q != 0.0 { c / q } else { -r1 };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    QuadraticRoots::Two { lo, hi, double: false }
}
