//! JSON views of core results. Angles follow the requested units, all numbers
//! are rounded to 9 significant digits, and object keys come out sorted.

use serde_json::{json, Value};
use vertebra_core::constraints::FeasibilityReport;
use vertebra_core::differential::{IsotropyReport, JacobianPair, SingularityReport};
use vertebra_core::kinematics::{FkSolution, IkSolution};
use vertebra_core::linalg::Mat3;
use vertebra_core::mechanism::{JointAngles, MechanismGeometry};
use vertebra_core::orientation::Orientation;
use vertebra_core::workspace::{Extent, TargetReport, WorkspaceMap, WorkspaceSlice};

use crate::format::{num, nums, Units};

pub fn matrix(m: &Mat3) -> Value {
    Value::Array(m.0.iter().map(|r| nums(r)).collect())
}

pub fn joints(q: &JointAngles, u: Units) -> Value {
    u.angles(&q.as_array())
}

pub fn orientation(o: &Orientation, u: Units) -> Value {
    let rpy = o.to_rpy();
    json!({
        "rpy": u.angles(&[rpy.yaw, rpy.pitch, rpy.roll]),
        "matrix": matrix(o.matrix()),
    })
}

pub fn geometry(g: &MechanismGeometry, u: Units) -> Value {
    let v = |x: &vertebra_core::linalg::Vec3| nums(&x.0);
    json!({
        "variant": g.variant.tag(),
        "a1": v(&g.a1),
        "a2": v(&g.a2),
        "axes": [v(&g.i1), v(&g.i2)],
        "rod_length": num(g.rod_length),
        "coupler_length": num(g.coupler_length),
        "scale_mm": num(g.scale_mm),
        "home": {
            "joints": joints(&g.home.joints, u),
            "orientation": orientation(&g.home.orientation, u),
            "working_mode": mode_label(g.home.working_mode.label()),
        },
    })
}

pub fn mode_label(l: [char; 2]) -> String {
    l.iter().collect()
}

pub fn fk_solution(s: &FkSolution, u: Units) -> Value {
    json!({
        "orientation": orientation(&s.orientation, u),
        "pitch": u.angle(s.pitch),
        "roll": u.angle(s.roll),
        "branch": s.assembly.branch.tag(),
        "assembly_sign": s.assembly.sign,
        "r2_dot_p2": num(s.assembly.r2_dot_p2),
        "residuals": nums(&s.residuals),
    })
}

pub fn ik_solution(s: &IkSolution, u: Units) -> Value {
    json!({
        "joints": joints(&s.joints, u),
        "mode": mode_label(s.mode.label()),
        "b_entries": nums(&[s.legs[0].b_entry, s.legs[1].b_entry]),
        "l_dot_r": nums(&[s.legs[0].l_dot_r, s.legs[1].l_dot_r]),
        "residuals": nums(&s.residuals),
    })
}

pub fn jacobians(jp: &JacobianPair, inverse: Option<&Mat3>) -> Value {
    json!({
        "A": matrix(&jp.a),
        "B": matrix(&jp.b),
        "det_a": num(jp.det_a()),
        "det_b": num(jp.det_b()),
        "inverse_jacobian": inverse.map(matrix).unwrap_or(Value::Null),
    })
}

pub fn singularity(r: &SingularityReport) -> Value {
    json!({
        "kind": r.kind.tag(),
        "det_a": num(r.det_a),
        "det_b": num(r.det_b),
        "witnesses": r.witnesses.iter().map(|w| w.describe()).collect::<Vec<_>>(),
    })
}

pub fn isotropy(r: &IsotropyReport) -> Value {
    let conds = |cs: &[vertebra_core::differential::IsotropyCondition]| {
        Value::Array(cs.iter().map(|c| json!({"name": c.name, "value": num(c.value), "pass": c.pass})).collect())
    };
    json!({
        "a_isotropic": r.a_isotropic(),
        "b_isotropic": r.b_isotropic(),
        "kappa_a": num(r.kappa_a),
        "kappa_b": num(r.kappa_b),
        "b_entries": nums(&r.b_entries),
        "a_conditions": conds(&r.a_conditions),
        "b_conditions": conds(&r.b_conditions),
    })
}

pub fn feasibility(r: &FeasibilityReport, u: Units) -> Value {
    json!({
        "feasible": r.feasible,
        "failed": r.failed.iter().map(|f| f.tag()).collect::<Vec<_>>(),
        "joints": r.joints.map(|q| joints(&q, u)).unwrap_or(Value::Null),
        "cone_angles": u.angles(&r.cone_angles),
        "seg_distance": num(r.seg_distance),
        "base_margins": nums(&r.base_margins),
        "det_a": num(r.det_a),
        "det_b": num(r.det_b),
    })
}

pub fn extent(e: &Extent, u: Units) -> Value {
    u.angles(&[e.min, e.max])
}

pub fn slice(s: &WorkspaceSlice, u: Units) -> Value {
    json!({
        "torsion": u.angle(s.torsion),
        "center": u.angles(&[s.center.0, s.center.1]),
        "centroid": u.angles(&[s.centroid.0, s.centroid.1]),
        "area": num(s.area),
        "star_violations": s.star_violations,
        "azimuth": u.angles(&s.boundary.iter().map(|b| b.azimuth).collect::<Vec<_>>()),
        "tilt": u.angles(&s.boundary.iter().map(|b| b.tilt).collect::<Vec<_>>()),
        "joints": s.boundary.iter().map(|b| joints(&b.joints, u)).collect::<Vec<_>>(),
    })
}

/// Extents only.
pub fn workspace_summary(m: &WorkspaceMap, u: Units) -> Value {
    json!({
        "units": u.tag(),
        "torsion_extent": extent(&m.torsion_extent, u),
        "joint_extents": m.joint_extents.iter().map(|e| extent(e, u)).collect::<Vec<_>>(),
        "joint_travel": m.joint_travel.iter().map(|e| extent(e, u)).collect::<Vec<_>>(),
        "slices": m.upper.len() + m.lower.len(),
        "star_violations": m.star_violations,
        "areas": m.rows().iter().map(|s| json!([u.angle(s.torsion), num(s.area)])).collect::<Vec<_>>(),
    })
}

pub fn workspace_map(m: &WorkspaceMap, u: Units) -> Value {
    let p = &m.params;
    json!({
        "format": 1,
        "units": u.tag(),
        "params": {
            "n_psi": p.n_psi,
            "n_phi": p.n_phi,
            "tilt_step": u.angle(p.tilt_step),
            "max_tilt": u.angle(p.max_tilt),
        },
        "torsion_extent": extent(&m.torsion_extent, u),
        "joint_extents": m.joint_extents.iter().map(|e| extent(e, u)).collect::<Vec<_>>(),
        "joint_travel": m.joint_travel.iter().map(|e| extent(e, u)).collect::<Vec<_>>(),
        "star_violations": m.star_violations,
        "upper": m.upper.iter().map(|s| slice(s, u)).collect::<Vec<_>>(),
        "lower": m.lower.iter().map(|s| slice(s, u)).collect::<Vec<_>>(),
    })
}

pub fn targets(r: &TargetReport, u: Units) -> Value {
    let t = &r.targets;
    json!({
        "targets": u.angles(&[t.yaw, t.pitch, t.roll]),
        "samples": r.samples,
        "feasible": r.feasible,
        "fraction": num(r.fraction),
        "all_feasible": r.feasible == r.samples,
        "violations": r.tally.iter().map(|(id, n)| json!({"constraint": id.tag(), "count": n})).collect::<Vec<_>>(),
        "worst": r.worst.as_ref().map(|w| json!({
            "rpy": u.angles(&[w.angles.yaw, w.angles.pitch, w.angles.roll]),
            "report": feasibility(&w.report, u),
        })).unwrap_or(Value::Null),
    })
}
