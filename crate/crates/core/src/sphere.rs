//! Euclidean spheres `S^{2n-1}(r)` measured in the reconstructed metric.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::TerminationReason;
use crate::phase::{minimal_line_residual, Dimension, PhasePoint};
use crate::profile::{Jet, MetricProfile, ProfileSource};
use crate::roots::{brent, BrentOptions};

/// Tolerance on `x - (2n - 1)` for the marginal case.
pub const WEAK_STABILITY_TOL: f64 = 1e-9;
/// Residual accuracy of refined minimal spheres.
pub const ROOT_FTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    WeaklyStable,
    Unstable,
}

impl Stability {
    /// Stability of a minimal sphere with phase abscissa `x` (window `n - 1 < x <= 2n - 1`).
    pub fn from_abscissa(n: Dimension, x: f64) -> Stability {
        let edge = 2.0 * n.as_f64() - 1.0;
        if (x - edge).abs() <= WEAK_STABILITY_TOL {
            Stability::WeaklyStable
        } else if x < edge {
            Stability::Stable
        } else {
            Stability::Unstable
        }
    }

    pub fn is_stable(self) -> bool {
        !matches!(self, Stability::Unstable)
    }

    pub fn name(self) -> &'static str {
        match self {
            Stability::Stable => "Stable",
            Stability::WeaklyStable => "WeaklyStable",
            Stability::Unstable => "Unstable",
        }
    }
}

/// A minimal sphere located on a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereReport {
    pub t_star: f64,
    pub phase_point: PhasePoint,
    pub stability: Stability,
    pub area: f64,
    pub outermost: bool,
    pub residual: f64,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `(2 pi)^n / (n - 1)!`
pub fn area_constant(n: Dimension) -> f64 {
    (2.0 * PI).powi(n.get() as i32) / factorial(n.get() - 1)
}

fn area_of(j: &Jet) -> f64 {
    let n = j.n.get() as i32;
    area_constant(j.n) * j.u_t().powi(n - 1) * (2.0 * j.u_tt()).sqrt()
}

pub fn sphere_area(profile: &MetricProfile, t: f64) -> Result<f64> {
    let j = profile.jet(t)?;
    if !(j.vt > 0.0) {
        return Err(Error::NonPositive { t });
    }
    Ok(area_of(&j))
}

/// `lim u_t^n` at the lower end of the span.
pub fn lower_end_u_t_pow_n(profile: &MetricProfile) -> Result<f64> {
    match &profile.source {
        ProfileSource::ClosedForm(f) => Ok(f.lower_limit_u_t_pow_n()),
        ProfileSource::Trajectory(tr) => {
            let first = tr.first();
            if first.point().is_origin() {
                return Ok(0.0);
            }
            match tr.backward_end {
                // v -> -inf like log(t - T) / n
                TerminationReason::FiniteTimeBlowup { .. } => Ok(0.0),
                // v settles exponentially (algebraically at the tangency point)
                TerminationReason::AdmissibleLineAsymptote { .. } => Ok((profile.n.as_f64() * first.v).exp()),
                _ => Err(Error::LowerEndUndetermined),
            }
        }
    }
}

/// Volume of the ball bounded by the sphere at `t`.
pub fn ball_volume(profile: &MetricProfile, t: f64) -> Result<f64> {
    let n = profile.n.get();
    let ut = profile.u_t(t)?;
    let lower = lower_end_u_t_pow_n(profile)?;
    Ok((2.0 * PI).powi(n as i32) / factorial(n) * (ut.powi(n as i32) - lower))
}

/// Mean curvature from the `u` derivatives.
pub fn mean_curvature(profile: &MetricProfile, t: f64) -> Result<f64> {
    mean_curvature_of(&profile.jet(t)?)
}

pub fn mean_curvature_of(j: &Jet) -> Result<f64> {
    let (ut, utt, uttt) = (j.u_t(), j.u_tt(), j.u_ttt());
    if !(utt > 0.0) {
        return Err(Error::NonPositive { t: j.t });
    }
    let nf = j.n.as_f64();
    Ok(-(2.0 * (nf - 1.0) * utt * utt + uttt * ut) / ((2.0 * nf - 1.0) * 2f64.sqrt() * ut * utt.powf(1.5)))
}

/// Mean curvature from the phase point; vanishes exactly on the minimal line.
pub fn mean_curvature_phase(profile: &MetricProfile, t: f64) -> Result<f64> {
    let j = profile.jet(t)?;
    if !(j.vt > 0.0) {
        return Err(Error::NonPositive { t });
    }
    let nf = profile.n.as_f64();
    let r = minimal_line_residual(profile.n, j.point());
    Ok(-r / ((2.0 * nf - 1.0) * 2f64.sqrt() * (0.5 * j.v).exp() * j.vt.sqrt()))
}

/// `u_t^2 u_tttt - 2(n-1)(4n-3) u_tt^3`; its sign at a minimal sphere decides stability.
pub fn stability_functional(profile: &MetricProfile, t: f64) -> Result<f64> {
    let j = profile.jet(t)?;
    Ok(stability_lhs(&j))
}

fn stability_lhs(j: &Jet) -> f64 {
    let nf = j.n.as_f64();
    let ut = j.u_t();
    let utt = j.u_tt();
    ut * ut * j.u_tttt() - 2.0 * (nf - 1.0) * (4.0 * nf - 3.0) * utt * utt * utt
}

/// Difference between the stability functional and its factored form, both divided by `e^{3v}`.
pub fn stability_identity_residual(n: Dimension, p: PhasePoint, v: f64) -> Result<f64> {
    p.check_admissible()?;
    if !v.is_finite() {
        return Err(Error::NonFinite("v"));
    }
    // Every term carries e^{3v}; dividing it out means evaluating at v = 0.
    let lhs = stability_lhs(&Jet::from_state(n, 0.0, p.x, p.y, 0.0));
    let nf = n.as_f64();
    let s = p.slack();
    let r = minimal_line_residual(n, p);
    let rhs = s * (r * r - 6.0 * (nf - 1.0) * s * r + nf * (nf - 1.0) * (-p.x - p.y) * s);
    Ok(lhs - rhs)
}

/// Residual of the minimal-line equation at the limit of an end, if known.
fn end_residual_sign(n: Dimension, end: &TerminationReason) -> Option<f64> {
    match end {
        TerminationReason::ConvergedToOrigin => Some(1.0),
        TerminationReason::AdmissibleLineAsymptote { w } => {
            let r = minimal_line_residual(n, PhasePoint::new(*w, -1.0 - w));
            (r != 0.0).then(|| r.signum())
        }
        _ => None,
    }
}

fn report_at(profile: &MetricProfile, t: f64, outermost: bool) -> Result<SphereReport> {
    let j = profile.jet(t)?;
    let p = j.point();
    Ok(SphereReport {
        t_star: t,
        phase_point: p,
        stability: Stability::from_abscissa(profile.n, p.x),
        area: area_of(&j),
        outermost,
        residual: minimal_line_residual(profile.n, p),
    })
}

/// Brackets and refines the zeros of `t -> residual` over a sampled grid.
fn roots_on_grid(profile: &MetricProfile, ts: &[f64], res: &[f64]) -> Result<Vec<f64>> {
    let n = profile.n;
    let f = |t: f64| {
        profile
            .phase_point(t)
            .map(|p| minimal_line_residual(n, p))
            .unwrap_or(f64::NAN)
    };
    let opts = BrentOptions {
        ftol: ROOT_FTOL,
        ..Default::default()
    };
    let mut roots = Vec::new();
    for i in 0..ts.len() {
        if res[i] == 0.0 {
            roots.push(ts[i]);
        } else if i + 1 < ts.len() && res[i + 1] != 0.0 && res[i].signum() != res[i + 1].signum() {
            roots.push(brent(f, ts[i], ts[i + 1], opts)?);
        }
    }
    Ok(roots)
}

/// All minimal spheres along the profile, in increasing `t`.
pub fn find_minimal_spheres(profile: &MetricProfile) -> Result<Vec<SphereReport>> {
    let n = profile.n;
    let (ts, res, tail_sign): (Vec<f64>, Vec<f64>, Option<f64>) = match &profile.source {
        ProfileSource::Trajectory(tr) => (
            tr.samples.iter().map(|s| s.t).collect(),
            tr.samples.iter().map(|s| minimal_line_residual(n, s.point())).collect(),
            end_residual_sign(n, &tr.forward_end),
        ),
        ProfileSource::ClosedForm(f) => {
            let lo = f.t_lower().max(-40.0) + 1e-9;
            let steps = 4000;
            let ts: Vec<f64> = (0..=steps)
                .map(|i| lo + (40.0 - lo) * i as f64 / steps as f64)
                .collect();
            let res = ts
                .iter()
                .map(|&t| f.phase_point(t).map(|p| minimal_line_residual(n, p)))
                .collect::<Result<Vec<_>>>()?;
            (ts, res, Some(1.0))
        }
    };
    let roots = roots_on_grid(profile, &ts, &res)?;
    roots
        .iter()
        .map(|&t_star| {
            let after: Vec<f64> = ts
                .iter()
                .zip(&res)
                .filter(|(t, _)| **t > t_star)
                .map(|(_, r)| *r)
                .collect();
            let sign = after.first().copied().or(tail_sign).map(f64::signum);
            let outermost = match sign {
                Some(s) => after.iter().all(|r| r.signum() == s && *r != 0.0) && tail_sign.is_none_or(|ts| ts == s),
                None => true,
            };
            report_at(profile, t_star, outermost)
        })
        .collect()
}
