//! File exports of a workspace map. Text formats use degrees throughout.

use std::fmt::Write as _;

use vertebra_core::linalg::to_degrees;
use vertebra_core::mechanism::JointAngles;
use vertebra_core::workspace::{embed_polar, polar_to_plane, WorkspaceMap};

use crate::format::{text, Units};
use crate::report;

pub const CSV_HEADER: &str = "torsion_deg,azimuth_deg,tilt_deg,x,y,z,t1_deg,t2_deg,t3_deg";

/// One row per boundary point, slices by decreasing torsion. `x, y, z` is the
/// polar embedding in degrees.
pub fn workspace_csv(m: &WorkspaceMap) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in m.rows() {
        for b in &s.boundary {
            let (tor, az, tilt) = (to_degrees(s.torsion), to_degrees(b.azimuth), to_degrees(b.tilt));
            let q = b.joints.as_array().map(to_degrees);
            let (x, y) = polar_to_plane(b.azimuth, b.tilt);
            let cols = [tor, az, tilt, to_degrees(x), to_degrees(y), tor, q[0], q[1], q[2]];
            let line: Vec<String> = cols.iter().map(|v| text(*v)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
    }
    out
}

pub fn workspace_json(m: &WorkspaceMap, u: Units) -> String {
    let mut s = serde_json::to_string_pretty(&report::workspace_map(m, u)).expect("map serializes");
    s.push('\n');
    s
}

/// Side surface of the stacked slices: vertex `(i, j)` is ray `j` of row `i`,
/// and each quad between consecutive rows becomes two triangles.
pub fn workspace_obj(m: &WorkspaceMap) -> String {
    let grid = embed_polar(m);
    let mut out = String::from("# workspace side surface: x, y = tilt (cos, sin) azimuth, z = torsion; degrees\n");
    for row in &grid {
        for p in row {
            let _ = writeln!(out, "v {} {} {}", text(to_degrees(p.0[0])), text(to_degrees(p.0[1])), text(to_degrees(p.0[2])));
        }
    }
    let n = grid.first().map_or(0, |r| r.len());
    for i in 0..grid.len().saturating_sub(1) {
        for j in 0..n {
            let k = (j + 1) % n;
            // 1-based indices
            let a = i * n + j + 1;
            let b = i * n + k + 1;
            let c = (i + 1) * n + k + 1;
            let d = (i + 1) * n + j + 1;
            let _ = writeln!(out, "f {a} {b} {c}");
            let _ = writeln!(out, "f {a} {c} {d}");
        }
    }
    out
}

pub const JOINTSPACE_HEADER: &str = "t1_deg,t2_deg,t3_deg";

pub fn joint_cloud_csv(cloud: &[JointAngles]) -> String {
    let mut out = String::from(JOINTSPACE_HEADER);
    out.push('\n');
    for q in cloud {
        let d = q.as_array().map(to_degrees);
        let _ = writeln!(out, "{},{},{}", text(d[0]), text(d[1]), text(d[2]));
    }
    out
}
