//! Properties of the workspace sweep under the shipped defaults.

use std::sync::OnceLock;

use vertebra_core::constraints::{cone_angles, pose_feasible, ConstraintParams};
use vertebra_core::kinematics::{direct_kinematics, inverse_kinematics_all, AssemblySelect};
use vertebra_core::linalg::{to_radians, PI, TAU};
use vertebra_core::mechanism::{leg_points, make_geometry, DesignVariant, MechanismGeometry};
use vertebra_core::workspace::{
    boundary_ray, embed_polar, joint_space_cloud, plane_to_polar, polar_to_plane, slice_orientation, sweep_workspace,
    SerialRunner, SweepParams, WorkspaceMap,
};

fn pa() -> MechanismGeometry {
    make_geometry(DesignVariant::ParallelActuators, None).unwrap()
}

fn default_map() -> &'static WorkspaceMap {
    static MAP: OnceLock<WorkspaceMap> = OnceLock::new();
    MAP.get_or_init(|| sweep_workspace(&pa(), &ConstraintParams::default(), &SweepParams::default(), &SerialRunner).unwrap())
}

#[test]
fn symmetric_and_largest_at_zero_torsion() {
    let m = default_map();
    let zero = m.slice_at(0.0).unwrap();
    for s in m.upper.iter().skip(1) {
        let mirror = m.slice_at(-s.torsion).expect("mirror slice");
        assert!((s.area - mirror.area).abs() <= 0.02 * s.area);
        assert!((s.max_tilt() - mirror.max_tilt()).abs() <= 0.02 * s.max_tilt());
        assert!(s.area <= zero.area);
        assert!(mirror.area <= zero.area);
    }
    assert_eq!(m.upper.len(), m.lower.len() + 1);
}

#[test]
fn boundary_points_are_sound() {
    let g = pa();
    let c = ConstraintParams::default();
    let m = default_map();
    let step = m.params.tilt_step / 100.0;
    for s in m.rows() {
        let (cx, cy) = polar_to_plane(s.center.0, s.center.1);
        for (j, b) in s.boundary.iter().enumerate() {
            assert!(pose_feasible(&g, &slice_orientation(&g, b.azimuth, b.tilt, s.torsion), &c).feasible);
            if b.capped {
                continue;
            }
            let az = m.params.ray_azimuth(j);
            let r = b.radius + step;
            let (a, t) = plane_to_polar(cx + r * az.cos(), cy + r * az.sin());
            assert!(!pose_feasible(&g, &slice_orientation(&g, a, t, s.torsion), &c).feasible);
        }
    }
}

#[test]
fn sweep_is_deterministic() {
    let again = sweep_workspace(&pa(), &ConstraintParams::default(), &SweepParams::default(), &SerialRunner).unwrap();
    assert_eq!(&again, default_map());
}

#[test]
fn boundary_ray_agrees_with_dense_scan() {
    let g = pa();
    let c = ConstraintParams::default();
    let sp = SweepParams::default();
    for k in 0..12 {
        let az = k as f64 * TAU / 12.0;
        let b = boundary_ray(&g, &c, &sp, 0.0, (0.0, 0.0), az).unwrap();
        // first infeasible tilt on a grid 10x finer than the march
        let h = sp.tilt_step / 10.0;
        let first_bad = (0..)
            .map(|i| i as f64 * h)
            .find(|t| !pose_feasible(&g, &slice_orientation(&g, az, *t, 0.0), &c).feasible)
            .unwrap();
        assert!((b.tilt - first_bad).abs() <= 2.0 * sp.tilt_step, "az {az}: {} vs {first_bad}", b.tilt);
    }
}

/// Coarse sweep against an exhaustive feasibility grid in the sweep's own
/// cells (torsion step x ray azimuth x tilt step, rays from each slice
/// center). Along every ray, cells more than one step inside the boundary are
/// feasible and cells more than one step outside are not; torsion layers
/// beyond the swept extent hold no feasible cell at all.
#[test]
fn coarse_sweep_matches_grid_oracle() {
    let g = pa();
    let c = ConstraintParams::default();
    let sp = SweepParams { n_psi: 6, n_phi: 12, ..SweepParams::default() };
    let m = sweep_workspace(&g, &c, &sp, &SerialRunner).unwrap();
    let cells = (sp.max_tilt / sp.tilt_step).round() as usize;
    let feasible = |center: (f64, f64), az: f64, r: f64, torsion: f64| {
        let (cx, cy) = polar_to_plane(center.0, center.1);
        let (a, t) = plane_to_polar(cx + r * az.cos(), cy + r * az.sin());
        pose_feasible(&g, &slice_orientation(&g, a, t, torsion), &c).feasible
    };
    let mut swept = 0;
    for k in -3i64..=3 {
        let torsion = k as f64 * sp.torsion_step();
        let slice = m.slice_at(torsion);
        for j in 0..sp.n_phi {
            let az = sp.ray_azimuth(j);
            let center = slice.map_or((0.0, 0.0), |s| s.center);
            for i in 0..=cells {
                let r = i as f64 * sp.tilt_step;
                let f = feasible(center, az, r, torsion);
                match slice {
                    None => assert!(!f, "feasible cell at torsion {torsion}, ray {j}, tilt {r}"),
                    Some(s) => {
                        let b = s.boundary[j].radius;
                        if r < b - sp.tilt_step {
                            assert!(f, "torsion {torsion}, ray {j}: cell {r} inside {b} is infeasible");
                        } else if r > b + sp.tilt_step {
                            assert!(!f, "torsion {torsion}, ray {j}: cell {r} outside {b} is feasible");
                        }
                    }
                }
            }
        }
        swept += slice.is_some() as usize;
    }
    assert_eq!(swept, m.upper.len() + m.lower.len());
}

#[test]
fn joint_cloud_properties() {
    let g = pa();
    let m = default_map();
    let rows = m.rows();
    let cloud = joint_space_cloud(m, None);
    assert_eq!(cloud.len(), rows.len() * m.params.n_phi);
    assert_eq!(joint_space_cloud(m, Some(0.0)), cloud);
    let mut k = 0;
    for s in &rows {
        for b in &s.boundary {
            assert_eq!(cloud[k], b.joints);
            let o = direct_kinematics(&g, &cloud[k], AssemblySelect::Home).unwrap();
            let want = slice_orientation(&g, b.azimuth, b.tilt, s.torsion);
            assert!(o.max_abs_diff(&want) <= 1e-9);
            k += 1;
        }
    }
    // a positive offset moves every point, by exactly the offset
    let off = to_radians(1.0);
    let moved = joint_space_cloud(m, Some(off));
    for (a, b) in moved.iter().zip(&cloud) {
        let d = a.as_array().iter().zip(b.as_array()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!((d - off).abs() <= 1e-12);
    }
}

#[test]
fn embedding_follows_the_rows() {
    let m = default_map();
    let grid = embed_polar(m);
    let rows = m.rows();
    let step = m.params.torsion_step();
    let top = rows[0].torsion;
    for (i, (row, s)) in grid.iter().zip(&rows).enumerate() {
        for (p, b) in row.iter().zip(&s.boundary) {
            assert!((p.z() - (top - i as f64 * step)).abs() <= 1e-12);
            assert!((p.x() - b.tilt * b.azimuth.cos()).abs() <= 1e-15);
            assert!((p.y() - b.tilt * b.azimuth.sin()).abs() <= 1e-15);
        }
    }
}

/// Cone angles vary continuously along dense orientation paths.
#[test]
fn cone_angles_are_continuous() {
    let g = pa();
    let n = 2000;
    for az in [0.0, 1.0, 2.5, 4.0] {
        let mut prev: Option<[f64; 4]> = None;
        for k in 0..=n {
            let t = k as f64 / n as f64;
            let o = slice_orientation(&g, az, 0.5 * t, 0.3 * (t * TAU).sin());
            let Ok(ik) = inverse_kinematics_all(&g, &o) else { break };
            let Some(sol) = ik.solutions.iter().find(|s| s.mode == g.home.working_mode) else { break };
            let a = cone_angles(&leg_points(&g, &sol.joints, &o));
            if let Some(p) = prev {
                for (x, y) in a.iter().zip(p) {
                    assert!((x - y).abs() <= 0.01, "jump {} at t = {t}", (x - y).abs());
                }
            }
            prev = Some(a);
        }
    }
}

/// With every constraint relaxed the boundary is the reach limit, where one
/// leg's two joint roots merge.
#[test]
fn reach_boundary_is_a_double_root() {
    let g = pa();
    let relaxed = ConstraintParams {
        lima: PI,
        cone_limits: [None; 4],
        limd: 10.0,
        clearance: 0.0,
        ..ConstraintParams::default()
    };
    let sp = SweepParams::default();
    let b = boundary_ray(&g, &relaxed, &sp, 0.0, (0.0, 0.0), 0.3).unwrap();
    assert!(!b.capped);
    let o = slice_orientation(&g, b.azimuth, b.tilt, 0.0);
    let set = inverse_kinematics_all(&g, &o).unwrap();
    let gap = set
        .legs
        .iter()
        .filter(|l| l.roots.len() == 2)
        .map(|l| (l.roots[0].theta - l.roots[1].theta).abs())
        .fold(f64::INFINITY, f64::min);
    assert!(gap < 0.05, "closest root pair {gap}");
    let home = inverse_kinematics_all(&g, &g.home.orientation).unwrap();
    assert!(home.legs.iter().all(|l| l.roots.len() == 2 && (l.roots[0].theta - l.roots[1].theta).abs() > 0.5));
}
