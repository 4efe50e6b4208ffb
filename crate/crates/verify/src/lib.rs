//! Independent oracles used by the acceptance checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vertebra_core::constraints::{pose_feasible, ConstraintParams};
use vertebra_core::linalg::{Vec3, PI};
use vertebra_core::mechanism::{closure_residuals, JointAngles, MechanismGeometry};
use vertebra_core::orientation::{Orientation, RpyAngles};
use vertebra_core::workspace::{plane_to_polar, polar_to_plane, slice_orientation, SweepParams, WorkspaceMap};

fn fk_residual(g: &MechanismGeometry, q: &JointAngles, p: f64, r: f64) -> [f64; 2] {
    closure_residuals(g, q, &Orientation::from_rpy(RpyAngles::new(q.t3, p, r)))
}

fn newton(g: &MechanismGeometry, q: &JointAngles, mut p: f64, mut r: f64) -> Option<(f64, f64)> {
    const H: f64 = 1e-7;
    for _ in 0..60 {
        let f = fk_residual(g, q, p, r);
        if f[0].abs().max(f[1].abs()) < 1e-14 {
            return Some((p, r));
        }
        let fp = fk_residual(g, q, p + H, r);
        let fr = fk_residual(g, q, p, r + H);
        let j = [[(fp[0] - f[0]) / H, (fr[0] - f[0]) / H], [(fp[1] - f[1]) / H, (fr[1] - f[1]) / H]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-14 {
            return None;
        }
        p -= ((f[0] * j[1][1] - f[1] * j[0][1]) / det).clamp(-0.3, 0.3);
        r -= ((j[0][0] * f[1] - j[1][0] * f[0]) / det).clamp(-0.3, 0.3);
    }
    let f = fk_residual(g, q, p, r);
    (f[0].abs().max(f[1].abs()) < 1e-12).then_some((p, r))
}

/// Direct kinematics by brute force: Newton on the closure residuals over
/// (pitch, roll) from every node of a `grid x grid` lattice, deduplicated.
pub fn fk_brute_force(g: &MechanismGeometry, q: &JointAngles, grid: usize) -> Vec<Orientation> {
    let mut found: Vec<Orientation> = Vec::new();
    for i in 0..grid {
        for j in 0..grid {
            let p = -PI + (i as f64 + 0.5) * 2.0 * PI / grid as f64;
            let r = -PI + (j as f64 + 0.5) * 2.0 * PI / grid as f64;
            if let Some((p, r)) = newton(g, q, p, r) {
                let o = Orientation::from_rpy(RpyAngles::new(q.t3, p, r));
                if !found.iter().any(|f| f.max_abs_diff(&o) < 1e-7) {
                    found.push(o);
                }
            }
        }
    }
    found
}

pub type SegmentPair = (Vec3, Vec3, Vec3, Vec3);

fn point(r: &mut ChaCha8Rng) -> Vec3 {
    Vec3::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
}

/// Parameter of the closest point on `[q1, q2]` to `[p1, p2]`.
pub fn closest_on_second(p1: &Vec3, p2: &Vec3, q1: &Vec3, q2: &Vec3) -> f64 {
    let (d1, d2, r) = (*p2 - *p1, *q2 - *q1, *p1 - *q1);
    let (a, b, e) = (d1.dot(&d1), d1.dot(&d2), d2.dot(&d2));
    let (c, f) = (d1.dot(&r), d2.dot(&r));
    let den = a * e - b * b;
    let s = if den > 1e-12 { ((b * f - c * e) / den).clamp(0.0, 1.0) } else { 0.0 };
    ((b * s + f) / e).clamp(0.0, 1.0)
}

/// Frozen corpus: 1000 random pairs in the unit cube whose exact closest
/// point on the second segment is interior.
pub fn segment_corpus(seed: u64) -> Vec<SegmentPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(1000);
    while out.len() < 1000 {
        let p = (point(&mut rng), point(&mut rng), point(&mut rng), point(&mut rng));
        let t = closest_on_second(&p.0, &p.1, &p.2, &p.3);
        if t > 0.05 && t < 0.95 {
            out.push(p);
        }
    }
    out
}

/// Cells of the sweep's own grid (torsion step x ray x tilt step) whose
/// feasibility disagrees with the swept boundary by more than one cell.
pub fn grid_oracle_mismatches(g: &MechanismGeometry, c: &ConstraintParams, sp: &SweepParams, m: &WorkspaceMap) -> usize {
    let cells = (sp.max_tilt / sp.tilt_step).round() as usize;
    let half = (sp.n_psi / 2) as i64;
    let mut bad = 0;
    for k in -half..=half {
        let torsion = k as f64 * sp.torsion_step();
        let slice = m.slice_at(torsion);
        let center = slice.map_or((0.0, 0.0), |s| s.center);
        let (cx, cy) = polar_to_plane(center.0, center.1);
        for j in 0..sp.n_phi {
            let az = sp.ray_azimuth(j);
            for i in 0..=cells {
                let r = i as f64 * sp.tilt_step;
                let (a, t) = plane_to_polar(cx + r * az.cos(), cy + r * az.sin());
                let f = pose_feasible(g, &slice_orientation(g, a, t, torsion), c).feasible;
                let wrong = match slice {
                    None => f,
                    Some(s) => {
                        let b = s.boundary[j].radius;
                        (r < b - sp.tilt_step && !f) || (r > b + sp.tilt_step && f)
                    }
                };
                bad += wrong as usize;
            }
        }
    }
    bad
}
