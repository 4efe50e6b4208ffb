//! Orientation-workspace sweep.
//!
//! Orientations are parameterized by tilt-and-torsion angles taken relative
//! to the home orientation: `o = R(azimuth, tilt, torsion) * o_home`. Each
//! torsion value gives a slice in the polar plane
//! `(x, y) = tilt * (cos azimuth, sin azimuth)`. A slice is found by marching
//! rays outward from a center until the pose becomes infeasible; the next
//! slice uses this slice's centroid as its center. Two passes leave torsion
//! zero, one upward and one downward, and stop when a slice collapses.

use alloc::vec::Vec;

use crate::constraints::{pose_feasible, ConstraintId, ConstraintParams, FeasibilityReport};
use crate::error::{Error, Result};
use crate::linalg::{abs, atan2, cos, hypot, sin, to_radians, wrap_angle, Mat3, Vec3, PI, TAU};
use crate::mechanism::{JointAngles, MechanismGeometry};
use crate::orientation::{tnt_to_orientation, Orientation, RpyAngles, TiltTorsion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CentroidMethod {
    /// Centroid of the polygon area.
    Area,
    /// Mean of the boundary vertices.
    VertexAverage,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepParams {
    /// Torsion steps over a full turn (even).
    pub n_psi: usize,
    /// Rays per slice.
    pub n_phi: usize,
    pub tilt_step: f64,
    pub max_tilt: f64,
    pub centroid: CentroidMethod,
}

impl Default for SweepParams {
    fn default() -> Self {
        SweepParams {
            n_psi: 40,
            n_phi: 72,
            tilt_step: to_radians(0.5),
            max_tilt: to_radians(90.0),
            centroid: CentroidMethod::Area,
        }
    }
}

impl SweepParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_psi < 2 || !self.n_psi.is_multiple_of(2) {
            return Err(Error::InvalidParams("n_psi must be even and >= 2"));
        }
        if self.n_phi < 3 {
            return Err(Error::InvalidParams("n_phi must be >= 3"));
        }
        if !(self.tilt_step > 0.0 && self.tilt_step <= self.max_tilt && self.max_tilt <= PI) {
            return Err(Error::InvalidParams("need 0 < tilt_step <= max_tilt <= pi"));
        }
        Ok(())
    }

    pub fn torsion_step(&self) -> f64 {
        TAU / self.n_psi as f64
    }

    /// Azimuth of ray `j`.
    pub fn ray_azimuth(&self, j: usize) -> f64 {
        TAU * j as f64 / self.n_phi as f64
    }
}

/// Orientation at polar coordinates `(azimuth, tilt)` of the slice `torsion`.
pub fn slice_orientation(g: &MechanismGeometry, azimuth: f64, tilt: f64, torsion: f64) -> Orientation {
    tnt_to_orientation(TiltTorsion::new(azimuth, tilt, torsion)).compose(&g.home.orientation)
}

/// Polar point `(azimuth, tilt)` to plane coordinates.
pub fn polar_to_plane(azimuth: f64, tilt: f64) -> (f64, f64) {
    (tilt * cos(azimuth), tilt * sin(azimuth))
}

/// Plane coordinates to `(azimuth, tilt)`, with azimuth 0 at the origin.
pub fn plane_to_polar(x: f64, y: f64) -> (f64, f64) {
    let r = hypot(x, y);
    if r == 0.0 {
        (0.0, 0.0)
    } else {
        (atan2(y, x), r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    /// Distance from the slice center along the ray.
    pub radius: f64,
    pub azimuth: f64,
    pub tilt: f64,
    pub joints: JointAngles,
    /// True when the march reached `max_tilt` without leaving the workspace.
    pub capped: bool,
}

fn feasible_at(g: &MechanismGeometry, c: &ConstraintParams, center: (f64, f64), dir: (f64, f64), rho: f64, torsion: f64) -> (bool, (f64, f64), Option<JointAngles>) {
    let (x, y) = (center.0 + rho * dir.0, center.1 + rho * dir.1);
    let (az, tilt) = plane_to_polar(x, y);
    let rep = pose_feasible(g, &slice_orientation(g, az, tilt, torsion), c);
    (rep.feasible, (az, tilt), rep.joints)
}

/// Marches ray `azimuth_ray` out of `center` (polar coordinates) in
/// `tilt_step` increments, then bisects the last step down to `tilt_step/100`.
pub fn boundary_ray(g: &MechanismGeometry, cparams: &ConstraintParams, sparams: &SweepParams, torsion: f64, center: (f64, f64), azimuth_ray: f64) -> Result<BoundaryPoint> {
    let c = polar_to_plane(center.0, center.1);
    let dir = (cos(azimuth_ray), sin(azimuth_ray));
    let (ok, mut best_pt, mut best_q) = feasible_at(g, cparams, c, dir, 0.0, torsion);
    if !ok {
        return Err(Error::CenterInfeasible);
    }
    let step = sparams.tilt_step;
    let mut lo = 0.0;
    let mut hi = None;
    let mut k = 1usize;
    while hi.is_none() {
        let rho = (k as f64 * step).min(sparams.max_tilt);
        let (ok, pt, q) = feasible_at(g, cparams, c, dir, rho, torsion);
        if ok {
            lo = rho;
            best_pt = pt;
            best_q = q;
            if rho >= sparams.max_tilt {
                break;
            }
        } else {
            hi = Some(rho);
        }
        k += 1;
    }
    let capped = hi.is_none();
    if let Some(mut hi) = hi {
        let tol = step / 100.0;
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let (ok, pt, q) = feasible_at(g, cparams, c, dir, mid, torsion);
            if ok {
                lo = mid;
                best_pt = pt;
                best_q = q;
            } else {
                hi = mid;
            }
        }
    }
    Ok(BoundaryPoint {
        radius: lo,
        azimuth: best_pt.0,
        tilt: best_pt.1,
        joints: best_q.unwrap_or(JointAngles::new(f64::NAN, f64::NAN, f64::NAN)),
        capped,
    })
}

/// Centroid of a closed polygon of polar points, returned in polar form.
pub fn slice_centroid(points: &[(f64, f64)], method: CentroidMethod) -> Result<(f64, f64)> {
    let xy: Vec<(f64, f64)> = points.iter().map(|&(a, t)| polar_to_plane(a, t)).collect();
    let mut distinct: Vec<(f64, f64)> = Vec::new();
    for p in &xy {
        if !distinct.iter().any(|q| hypot(p.0 - q.0, p.1 - q.1) < 1e-12) {
            distinct.push(*p);
        }
    }
    if distinct.len() < 3 {
        return Err(Error::DegenerateSlice);
    }
    let n = xy.len() as f64;
    let vertex_avg = || {
        let (sx, sy) = xy.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
        (sx / n, sy / n)
    };
    let (cx, cy) = match method {
        CentroidMethod::VertexAverage => vertex_avg(),
        CentroidMethod::Area => {
            let (mut a2, mut sx, mut sy) = (0.0, 0.0, 0.0);
            for i in 0..xy.len() {
                let (p, q) = (xy[i], xy[(i + 1) % xy.len()]);
                let cr = p.0 * q.1 - q.0 * p.1;
                a2 += cr;
                sx += (p.0 + q.0) * cr;
                sy += (p.1 + q.1) * cr;
            }
            if abs(a2) < 1e-14 {
                vertex_avg()
            } else {
                (sx / (3.0 * a2), sy / (3.0 * a2))
            }
        }
    };
    Ok(plane_to_polar(cx, cy))
}

/// Shoelace area of a polygon of polar points.
pub fn polygon_area(points: &[(f64, f64)]) -> f64 {
    let xy: Vec<(f64, f64)> = points.iter().map(|&(a, t)| polar_to_plane(a, t)).collect();
    let mut a2 = 0.0;
    for i in 0..xy.len() {
        let (p, q) = (xy[i], xy[(i + 1) % xy.len()]);
        a2 += p.0 * q.1 - q.0 * p.1;
    }
    abs(0.5 * a2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceSlice {
    pub torsion: f64,
    /// Ray center used for this slice, polar.
    pub center: (f64, f64),
    pub boundary: Vec<BoundaryPoint>,
    /// Centroid of the boundary, polar; seeds the next slice.
    pub centroid: (f64, f64),
    pub area: f64,
    /// Interior ray samples found infeasible (the slice is not star-shaped
    /// about its center).
    pub star_violations: usize,
}

impl WorkspaceSlice {
    pub fn polar(&self) -> Vec<(f64, f64)> {
        self.boundary.iter().map(|b| (b.azimuth, b.tilt)).collect()
    }
    pub fn max_radius(&self) -> f64 {
        self.boundary.iter().map(|b| b.radius).fold(0.0, f64::max)
    }
    pub fn max_tilt(&self) -> f64 {
        self.boundary.iter().map(|b| b.tilt).fold(0.0, f64::max)
    }
}

/// Runs independent ray computations. Results must come back in index order.
pub trait RayRunner {
    fn run<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Evaluates rays one after another.
#[derive(Debug, Clone, Copy, Default)]
pub struct SerialRunner;

impl RayRunner for SerialRunner {
    fn run<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

const STAR_PROBES: [f64; 3] = [0.25, 0.5, 0.75];

/// One slice: `n_phi` rays from `center`.
pub fn compute_slice<R: RayRunner>(g: &MechanismGeometry, cparams: &ConstraintParams, sparams: &SweepParams, torsion: f64, center: (f64, f64), runner: &R) -> Result<WorkspaceSlice> {
    let c = polar_to_plane(center.0, center.1);
    let rays = runner.run(sparams.n_phi, |j| {
        let az = sparams.ray_azimuth(j);
        let bp = boundary_ray(g, cparams, sparams, torsion, center, az)?;
        let dir = (cos(az), sin(az));
        let bad = STAR_PROBES
            .iter()
            .filter(|&&f| !feasible_at(g, cparams, c, dir, f * bp.radius, torsion).0)
            .count();
        Ok((bp, bad))
    });
    let rays: Vec<(BoundaryPoint, usize)> = rays.into_iter().collect::<Result<_>>()?;
    let star_violations = rays.iter().map(|r| r.1).sum();
    let boundary: Vec<BoundaryPoint> = rays.into_iter().map(|r| r.0).collect();
    let polar: Vec<(f64, f64)> = boundary.iter().map(|b| (b.azimuth, b.tilt)).collect();
    let centroid = slice_centroid(&polar, sparams.centroid).unwrap_or(center);
    Ok(WorkspaceSlice { torsion, center, area: polygon_area(&polar), boundary, centroid, star_violations })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extent {
    pub min: f64,
    pub max: f64,
}

impl Extent {
    fn empty() -> Self {
        Extent { min: f64::INFINITY, max: f64::NEG_INFINITY }
    }
    fn add(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceMap {
    pub params: SweepParams,
    /// Torsion 0, +step, +2 step, ...
    pub upper: Vec<WorkspaceSlice>,
    /// Torsion -step, -2 step, ...
    pub lower: Vec<WorkspaceSlice>,
    pub torsion_extent: Extent,
    /// Raw joint angles over all boundary points.
    pub joint_extents: [Extent; 3],
    /// Joint angles relative to the home joints.
    pub joint_travel: [Extent; 3],
    pub star_violations: usize,
}

impl WorkspaceMap {
    /// All slices ordered by decreasing torsion.
    pub fn rows(&self) -> Vec<&WorkspaceSlice> {
        self.upper.iter().rev().chain(self.lower.iter()).collect()
    }

    pub fn slice_at(&self, torsion: f64) -> Option<&WorkspaceSlice> {
        let tol = 1e-9;
        self.upper.iter().chain(self.lower.iter()).find(|s| abs(s.torsion - torsion) < tol)
    }
}

/// Both torsion passes.
pub fn sweep_workspace<R: RayRunner>(g: &MechanismGeometry, cparams: &ConstraintParams, sparams: &SweepParams, runner: &R) -> Result<WorkspaceMap> {
    cparams.validate()?;
    sparams.validate()?;
    let step = sparams.torsion_step();
    let first = compute_slice(g, cparams, sparams, 0.0, (0.0, 0.0), runner)?;
    let pass = |sign: f64, seed: &WorkspaceSlice| -> Result<Vec<WorkspaceSlice>> {
        let mut out: Vec<WorkspaceSlice> = Vec::new();
        let mut prev = seed.clone();
        let mut k = 1usize;
        while prev.max_radius() >= sparams.tilt_step {
            let torsion = sign * step * k as f64;
            if abs(torsion) > PI + 1e-12 {
                break;
            }
            match compute_slice(g, cparams, sparams, torsion, prev.centroid, runner) {
                Ok(s) => {
                    out.push(s.clone());
                    prev = s;
                }
                Err(Error::CenterInfeasible) => break,
                Err(e) => return Err(e),
            }
            k += 1;
        }
        Ok(out)
    };
    let mut upper = alloc::vec![first.clone()];
    upper.extend(pass(1.0, &first)?);
    let lower = pass(-1.0, &first)?;

    let home = g.home.joints.as_array();
    let mut torsion_extent = Extent::empty();
    let mut joint_extents = [Extent::empty(); 3];
    let mut joint_travel = [Extent::empty(); 3];
    let mut star_violations = 0;
    for s in upper.iter().chain(lower.iter()) {
        torsion_extent.add(s.torsion);
        star_violations += s.star_violations;
        for b in &s.boundary {
            let q = b.joints.as_array();
            for k in 0..3 {
                joint_extents[k].add(q[k]);
                joint_travel[k].add(wrap_angle(q[k] - home[k]));
            }
        }
    }
    if upper.iter().chain(lower.iter()).all(|s| s.max_radius() == 0.0) {
        return Err(Error::EmptyWorkspace);
    }
    Ok(WorkspaceMap { params: *sparams, upper, lower, torsion_extent, joint_extents, joint_travel, star_violations })
}

/// Plane embedding of every boundary point, rows by decreasing torsion:
/// `(tilt cos azimuth, tilt sin azimuth, torsion)`.
pub fn embed_polar(map: &WorkspaceMap) -> Vec<Vec<Vec3>> {
    map.rows()
        .iter()
        .map(|s| {
            s.boundary
                .iter()
                .map(|b| {
                    let (x, y) = polar_to_plane(b.azimuth, b.tilt);
                    Vec3::new(x, y, s.torsion)
                })
                .collect()
        })
        .collect()
}

/// Boundary joints of every slice (rows by decreasing torsion), optionally
/// pulled inward by `offset` (radians) along an outward normal estimate.
pub fn joint_space_cloud(map: &WorkspaceMap, offset: Option<f64>) -> Vec<JointAngles> {
    let rows = map.rows();
    let grid: Vec<Vec<Vec3>> = rows
        .iter()
        .map(|s| s.boundary.iter().map(|b| Vec3(b.joints.as_array())).collect())
        .collect();
    let off = offset.unwrap_or(0.0);
    let mut out = Vec::with_capacity(grid.iter().map(Vec::len).sum());
    for (i, row) in grid.iter().enumerate() {
        let n = row.len();
        let mean = row.iter().fold(Vec3::ZERO, |a, p| a + *p) * (1.0 / n as f64);
        for (j, p) in row.iter().enumerate() {
            if off == 0.0 {
                out.push(JointAngles::from_array(p.0));
                continue;
            }
            let along = row[(j + 1) % n] - row[(j + n - 1) % n];
            let across = match (i.checked_sub(1).map(|k| &grid[k]), grid.get(i + 1)) {
                (Some(a), Some(b)) => Some(a[j] - b[j]),
                (Some(a), None) => Some(a[j] - *p),
                (None, Some(b)) => Some(*p - b[j]),
                (None, None) => None,
            };
            let outward = *p - mean;
            let normal = across
                .map(|t| along.cross(&t))
                .and_then(|v| v.try_normalize())
                .map(|v| if v.dot(&outward) < 0.0 { -v } else { v })
                .or_else(|| {
                    let t = along.try_normalize()?;
                    (outward - t * outward.dot(&t)).try_normalize()
                })
                .unwrap_or(Vec3::ZERO);
            out.push(JointAngles::from_array((*p - normal * off).0));
        }
    }
    out
}

/// Target box orientation. Yaw, pitch and roll are read in body axes of the
/// swimming robot whose spine runs along the platform normal: yaw turns about
/// `x`, pitch about `y`, roll twists about `z`. All relative to home.
pub fn target_orientation(g: &MechanismGeometry, a: RpyAngles) -> Orientation {
    let m = Mat3::rot_x(a.yaw).mul_mat(&Mat3::rot_y(a.pitch)).mul_mat(&Mat3::rot_z(a.roll));
    Orientation::from_matrix_unchecked(m).compose(&g.home.orientation)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetSample {
    pub angles: RpyAngles,
    pub report: FeasibilityReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetReport {
    pub targets: RpyAngles,
    pub samples: usize,
    pub feasible: usize,
    pub fraction: f64,
    /// Failure count per constraint.
    pub tally: Vec<(ConstraintId, usize)>,
    /// Failing sample farthest (normalized) from the box center.
    pub worst: Option<TargetSample>,
}

fn axis_samples(half: f64, n: usize) -> Vec<f64> {
    if half == 0.0 || n < 2 {
        return alloc::vec![0.0];
    }
    (0..n).map(|k| -half + 2.0 * half * k as f64 / (n - 1) as f64).collect()
}

/// Samples the box `[-yaw, yaw] x [-pitch, pitch] x [-roll, roll]` on an
/// `n^3` grid.
pub fn check_design_targets(g: &MechanismGeometry, cparams: &ConstraintParams, targets: RpyAngles, n: usize) -> TargetReport {
    let (ys, ps, rs) = (axis_samples(targets.yaw, n), axis_samples(targets.pitch, n), axis_samples(targets.roll, n));
    let norm = |v: f64, h: f64| if h == 0.0 { 0.0 } else { abs(v / h) };
    let mut tally: Vec<(ConstraintId, usize)> = Vec::new();
    let (mut total, mut ok) = (0usize, 0usize);
    let mut worst: Option<(f64, TargetSample)> = None;
    for &y in &ys {
        for &p in &ps {
            for &r in &rs {
                let angles = RpyAngles::new(y, p, r);
                let report = pose_feasible(g, &target_orientation(g, angles), cparams);
                total += 1;
                if report.feasible {
                    ok += 1;
                    continue;
                }
                for id in &report.failed {
                    match tally.iter_mut().find(|e| e.0 == *id) {
                        Some(e) => e.1 += 1,
                        None => tally.push((*id, 1)),
                    }
                }
                let d = norm(y, targets.yaw) + norm(p, targets.pitch) + norm(r, targets.roll);
                if worst.as_ref().is_none_or(|w| d > w.0) {
                    worst = Some((d, TargetSample { angles, report }));
                }
            }
        }
    }
    tally.sort();
    TargetReport {
        targets,
        samples: total,
        feasible: ok,
        fraction: ok as f64 / total as f64,
        tally,
        worst: worst.map(|w| w.1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanism::{make_geometry, DesignVariant};

    fn circle(x0: f64, y0: f64, r: f64, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| {
                let a = TAU * k as f64 / n as f64;
                plane_to_polar(x0 + r * cos(a), y0 + r * sin(a))
            })
            .collect()
    }

    #[test]
    fn centroid_of_centered_circle() {
        let c = slice_centroid(&circle(0.0, 0.0, 0.4, 72), CentroidMethod::Area).unwrap();
        assert!(c.1 < 1e-12);
    }

    #[test]
    fn centroid_of_offset_circle() {
        for m in [CentroidMethod::Area, CentroidMethod::VertexAverage] {
            let c = slice_centroid(&circle(0.2, 0.0, 0.1, 72), m).unwrap();
            assert!(c.0.abs() < 1e-12 && (c.1 - 0.2).abs() < 1e-12, "{c:?}");
        }
    }

    #[test]
    fn centroid_of_skewed_ellipse_matches_integration() {
        // Ellipse sampled with uneven angular spacing: vertex average is biased,
        // the area centroid is not.
        let pts: Vec<(f64, f64)> = (0..400)
            .map(|k| {
                let u = k as f64 / 400.0;
                let a = TAU * (u + 0.12 * sin(TAU * u));
                plane_to_polar(0.1 + 0.3 * cos(a), -0.05 + 0.15 * sin(a))
            })
            .collect();
        let c = slice_centroid(&pts, CentroidMethod::Area).unwrap();
        let (x, y) = polar_to_plane(c.0, c.1);
        // Dense midpoint integration over the ellipse.
        let (mut sx, mut sy, mut area) = (0.0, 0.0, 0.0);
        let n = 800;
        let h = 2.0 / n as f64;
        for i in 0..n {
            for j in 0..n {
                let (u, v) = (-1.0 + (i as f64 + 0.5) * h, -1.0 + (j as f64 + 0.5) * h);
                if u * u + v * v <= 1.0 {
                    area += 1.0;
                    sx += 0.1 + 0.3 * u;
                    sy += -0.05 + 0.15 * v;
                }
            }
        }
        assert!((x - sx / area).abs() < 1e-3 && (y - sy / area).abs() < 1e-3);
    }

    #[test]
    fn degenerate_slice() {
        let pts = [(0.0, 0.1); 5];
        assert_eq!(slice_centroid(&pts, CentroidMethod::Area), Err(Error::DegenerateSlice));
    }

    #[test]
    fn boundary_ray_is_sound() {
        let g = make_geometry(DesignVariant::ParallelActuators, None).unwrap();
        let c = ConstraintParams::default();
        let s = SweepParams::default();
        for az in [0.0, 1.0, 2.5, 4.0] {
            let bp = boundary_ray(&g, &c, &s, 0.0, (0.0, 0.0), az).unwrap();
            assert!(bp.tilt > 0.0);
            let o = slice_orientation(&g, bp.azimuth, bp.tilt, 0.0);
            assert!(pose_feasible(&g, &o, &c).feasible);
            let beyond = bp.radius + s.tilt_step / 100.0;
            let (az2, t2) = plane_to_polar(beyond * cos(az), beyond * sin(az));
            assert!(!pose_feasible(&g, &slice_orientation(&g, az2, t2, 0.0), &c).feasible);
        }
    }

    #[test]
    fn center_infeasible_is_an_error() {
        let g = make_geometry(DesignVariant::ParallelActuators, None).unwrap();
        let r = boundary_ray(&g, &ConstraintParams::default(), &SweepParams::default(), 1.0, (0.0, 0.0), 0.0);
        assert_eq!(r.unwrap_err(), Error::CenterInfeasible);
    }

    #[test]
    fn zero_targets_sample_home_only() {
        let g = make_geometry(DesignVariant::ParallelActuators, None).unwrap();
        let r = check_design_targets(&g, &ConstraintParams::default(), RpyAngles::new(0.0, 0.0, 0.0), 11);
        assert_eq!(r.samples, 1);
        assert_eq!(r.fraction, 1.0);
        let big = to_radians(90.0);
        let r = check_design_targets(&g, &ConstraintParams::default(), RpyAngles::new(big, big, big), 5);
        assert!(r.fraction < 1.0);
        assert!(r.worst.is_some());
    }

    #[test]
    fn params_validate() {
        SweepParams::default().validate().unwrap();
        assert!(SweepParams { n_psi: 7, ..Default::default() }.validate().is_err());
        assert!(SweepParams { n_phi: 2, ..Default::default() }.validate().is_err());
        assert!(SweepParams { tilt_step: 0.0, ..Default::default() }.validate().is_err());
    }
}
