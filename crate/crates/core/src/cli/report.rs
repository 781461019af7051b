//! JSON report builders with fixed key sets.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ode::{TerminationReason, Trajectory};
use crate::penrose::PenroseReport;
use crate::phase::{classify, lambda_critical, level_value, Dimension, PhasePoint};
use crate::profile::{adm_mass, ale_coefficient, MetricProfile};
use crate::sphere::{find_minimal_spheres, mean_curvature_of};

/// Finite numbers as numbers, infinities as strings, NaN as null.
pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v.is_nan() {
        Value::Null
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn opt(v: Option<f64>) -> Value {
    v.map_or(Value::Null, num)
}

fn point(p: PhasePoint) -> Value {
    json!({ "x": num(p.x), "y": num(p.y) })
}

pub fn classification(n: Dimension, p: PhasePoint) -> Value {
    let label = classify(n, p);
    let lambda = if p.is_admissible() {
        level_value(n, p).ok().map(|l| l.get())
    } else {
        None
    };
    json!({
        "n": n.get(),
        "x": num(p.x),
        "y": num(p.y),
        "region": label.tag.name(),
        "domain": label.domain.name(),
        "arc": label.arc.map(|a| format!("{a:?}")),
        "divisor_possible": label.divisor_possible,
        "complete": label.complete_without_boundary,
        "lambda": opt(lambda),
        "lambda_critical": num(lambda_critical(n)),
    })
}

pub fn end(reason: &TerminationReason) -> Value {
    let (w, t) = match *reason {
        TerminationReason::AdmissibleLineAsymptote { w } => (Some(w), None),
        TerminationReason::FiniteTimeBlowup { time } => (None, Some(time)),
        _ => (None, None),
    };
    json!({ "tag": reason.name(), "w": opt(w), "T": opt(t) })
}

pub fn trajectory(traj: &Trajectory) -> Value {
    let rows: Vec<Value> = traj
        .samples
        .iter()
        .map(|s| {
            let r = super::csv::row_values(traj.n, s);
            json!({
                "t": num(r[0]), "x": num(r[1]), "y": num(r[2]), "v": num(r[3]),
                "u_t": num(r[4]), "u_tt": num(r[5]), "H": num(r[6]), "scal_residual": num(r[7]),
            })
        })
        .collect();
    json!({
        "n": traj.n.get(),
        "seed": point(traj.initial_point()),
        "tol": num(traj.tol),
        "forward_end": end(&traj.forward_end),
        "backward_end": end(&traj.backward_end),
        "samples": rows,
    })
}

fn seed_of(profile: &MetricProfile) -> Value {
    profile.trajectory().map_or(Value::Null, |t| point(t.initial_point()))
}

pub fn spheres(profile: &MetricProfile) -> Result<Value> {
    let list = find_minimal_spheres(profile)?;
    let rows: Vec<Value> = list
        .iter()
        .map(|s| {
            let h = profile.jet(s.t_star).and_then(|j| mean_curvature_of(&j)).ok();
            json!({
                "t_star": num(s.t_star),
                "x": num(s.phase_point.x),
                "y": num(s.phase_point.y),
                "stability": s.stability.name(),
                "area": num(s.area),
                "outermost": s.outermost,
                "residual": num(s.residual),
                "H": opt(h),
            })
        })
        .collect();
    Ok(json!({
        "n": profile.n.get(),
        "seed": seed_of(profile),
        "count": rows.len(),
        "spheres": rows,
    }))
}

pub fn mass(profile: &MetricProfile) -> Result<Value> {
    let m = adm_mass(profile)?;
    Ok(json!({
        "n": profile.n.get(),
        "seed": seed_of(profile),
        "m_numeric": num(m.m_numeric),
        "m_paper": opt(m.m_paper),
        "below_decay_threshold": m.below_decay_threshold,
        "ale_coefficient": opt(ale_coefficient(profile).ok()),
        "ladder": m.ladder.iter().copied().map(num).collect::<Vec<_>>(),
        "estimates": m.estimates.iter().copied().map(num).collect::<Vec<_>>(),
    }))
}

const V_E_CONVENTION: &str = "V_E = 2 pi^n / (n-1)!, the unit (2n-1)-sphere volume";

fn penrose_value(n: Dimension, seed: PhasePoint, r: Option<&PenroseReport>, error: Option<String>) -> Value {
    let f = |g: fn(&PenroseReport) -> Option<f64>| r.and_then(g).map_or(Value::Null, num);
    let b = |g: fn(&PenroseReport) -> Option<bool>| r.and_then(g).map_or(Value::Null, Value::Bool);
    json!({
        "n": n.get(),
        "seed": point(seed),
        "region": r.map(|r| r.region.name()),
        "minimal_spheres": r.map(|r| r.minimal_spheres),
        "stable_sphere": r.map(|r| r.stable_sphere),
        "x0": f(|r| r.x0),
        "y0": f(|r| r.y0),
        "V_sigma": f(|r| r.v_sigma),
        "m_paper": f(|r| r.m_paper),
        "m_numeric": f(|r| r.m_numeric),
        "reduced_lhs": f(|r| r.reduced_lhs),
        "reduced_rhs": f(|r| r.reduced_rhs),
        "gap": f(|r| r.gap),
        "full_rhs": f(|r| r.full_rhs),
        "holds_reduced": b(|r| r.holds_reduced),
        "holds_full": b(|r| r.holds_full),
        "divisor_present": r.map(|r| r.divisor_present),
        "dichotomy_ok": r.map(|r| r.dichotomy_ok),
        "v_e_convention": V_E_CONVENTION,
        "error": error,
    })
}

pub fn penrose(r: &PenroseReport) -> Value {
    penrose_value(r.n, r.seed, Some(r), None)
}

pub fn failed(n: Dimension, seed: PhasePoint, e: &Error) -> Value {
    penrose_value(n, seed, None, Some(e.to_string()))
}
