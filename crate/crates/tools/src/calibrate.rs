//! Re-derives the constraint defaults from the published workspace ranges.
//!
//! `limd` follows directly from the lowest crank angle: the base margin
//! `sin(theta) L + limd` vanishes at `theta_min`. The cone half-angles are
//! found by a grid search over separate crank-side (B) and platform-side (C)
//! limits, ranked first by how many range endpoints land within tolerance,
//! then by total endpoint error.

use serde_json::{json, Value};
use vertebra_core::constraints::ConstraintParams;
use vertebra_core::error::Result;
use vertebra_core::linalg::{sin, to_degrees, to_radians};
use vertebra_core::mechanism::MechanismGeometry;
use vertebra_core::workspace::{sweep_workspace, RayRunner, SweepParams, WorkspaceMap};

use crate::format::num;

/// Published ranges in degrees, relative to the home pose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedRanges {
    pub torsion: [f64; 2],
    pub t1: [f64; 2],
    pub t2: [f64; 2],
    pub t3: [f64; 2],
    pub tolerance: f64,
}

pub const PUBLISHED: PublishedRanges =
    PublishedRanges { torsion: [-18.0, 18.0], t1: [-17.0, 38.0], t2: [-17.0, 38.0], t3: [-35.0, 35.0], tolerance: 3.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct Endpoint {
    pub name: &'static str,
    pub got: f64,
    pub want: f64,
    pub ok: bool,
}

/// Compares a map's extents (degrees) against the published ranges.
pub fn check_ranges(m: &WorkspaceMap, r: &PublishedRanges) -> Vec<Endpoint> {
    let t = &m.joint_travel;
    let pairs: [(&'static str, f64, f64); 8] = [
        ("torsion_min", m.torsion_extent.min, r.torsion[0]),
        ("torsion_max", m.torsion_extent.max, r.torsion[1]),
        ("t1_min", t[0].min, r.t1[0]),
        ("t1_max", t[0].max, r.t1[1]),
        ("t2_min", t[1].min, r.t2[0]),
        ("t2_max", t[1].max, r.t2[1]),
        ("t3_min", t[2].min, r.t3[0]),
        ("t3_max", t[2].max, r.t3[1]),
    ];
    pairs
        .iter()
        .map(|&(name, got, want)| {
            let got = to_degrees(got);
            Endpoint { name, got, want, ok: (got - want).abs() <= r.tolerance }
        })
        .collect()
}

pub fn endpoints_json(eps: &[Endpoint]) -> Value {
    Value::Array(
        eps.iter()
            .map(|e| json!({"name": e.name, "got_deg": num(e.got), "want_deg": e.want, "ok": e.ok}))
            .collect(),
    )
}

/// Base depth that puts the crank-tip limit at `theta_min_deg`.
pub fn limd_for(g: &MechanismGeometry, theta_min_deg: f64) -> f64 {
    -sin(to_radians(theta_min_deg)) * g.rod_length
}

#[derive(Debug, Clone)]
pub struct SearchGrid {
    /// Crank-side cone half-angles to try, degrees.
    pub lima_b: Vec<f64>,
    /// Platform-side cone half-angles to try, degrees.
    pub lima_c: Vec<f64>,
    pub clearance: f64,
}

impl SearchGrid {
    pub fn standard() -> SearchGrid {
        SearchGrid {
            lima_b: (56..=72).map(|k| k as f64 * 0.5).collect(),
            lima_c: (30..=55).map(|k| k as f64).collect(),
            clearance: 0.05,
        }
    }
    pub fn coarse() -> SearchGrid {
        SearchGrid { lima_b: vec![28.0, 29.0, 30.0], lima_c: vec![43.0, 47.0], clearance: 0.05 }
    }
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub params: ConstraintParams,
    pub lima_b_deg: f64,
    pub lima_c_deg: f64,
    pub endpoints: Vec<Endpoint>,
    pub met: usize,
    pub error: f64,
}

impl Candidate {
    fn better_than(&self, o: &Candidate) -> bool {
        (self.met, -self.error) > (o.met, -o.error)
    }
}

pub fn params_for(g: &MechanismGeometry, lima_b: f64, lima_c: f64, clearance: f64, r: &PublishedRanges) -> ConstraintParams {
    let c = to_radians(lima_c);
    ConstraintParams {
        lima: to_radians(lima_b),
        cone_limits: [None, None, Some(c), Some(c)],
        limd: limd_for(g, r.t1[0].max(r.t2[0])),
        clearance,
        ..ConstraintParams::default()
    }
}

pub fn evaluate<R: RayRunner>(g: &MechanismGeometry, params: &ConstraintParams, sweep: &SweepParams, runner: &R, r: &PublishedRanges) -> Result<(WorkspaceMap, Vec<Endpoint>)> {
    let m = sweep_workspace(g, params, sweep, runner)?;
    let e = check_ranges(&m, r);
    Ok((m, e))
}

/// Best candidate over the grid; `None` if no candidate produced a workspace.
pub fn search<R: RayRunner>(g: &MechanismGeometry, sweep: &SweepParams, grid: &SearchGrid, runner: &R, r: &PublishedRanges) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for &b in &grid.lima_b {
        for &c in &grid.lima_c {
            let params = params_for(g, b, c, grid.clearance, r);
            let Ok((_, endpoints)) = evaluate(g, &params, sweep, runner, r) else { continue };
            let met = endpoints.iter().filter(|e| e.ok).count();
            let error = endpoints.iter().map(|e| (e.got - e.want).abs()).sum();
            let cand = Candidate { params, lima_b_deg: b, lima_c_deg: c, endpoints, met, error };
            if best.as_ref().is_none_or(|x| cand.better_than(x)) {
                best = Some(cand);
            }
        }
    }
    best
}
