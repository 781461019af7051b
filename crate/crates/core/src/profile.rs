//! Derivatives of the Kähler potential along an orbit or in closed form.
//!
//! With `v = log u_t` and `v_t = 1 + x + y` every `t`-derivative of `u`
//! up to fourth order is an algebraic function of `(x, y, v)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extrapolate::{self, Extrapolated, LADDER};
use crate::ode::{integrate, IntegrateOptions, TerminationReason, Trajectory};
use crate::phase::{lambda_critical, level_branch_y, level_value, tangency_point, Dimension, PhasePoint};

/// Converts between `t = log(r^2 / 2)` and the Euclidean radius `r = |z|`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CoordinateMap;

impl CoordinateMap {
    pub fn t_from_r(r: f64) -> Result<f64> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
        }
        Ok((0.5 * r * r).ln())
    }

    pub fn r_from_t(t: f64) -> f64 {
        (2.0 * t.exp()).sqrt()
    }
}

/// `u_t = A (B + e^{kt})^{1/k}` with `k` in `{n - 1, n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormFamily {
    pub n: Dimension,
    pub k: u32,
    pub a: f64,
    pub b: f64,
}

impl ClosedFormFamily {
    pub fn new(n: Dimension, k: u32, a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite("closed-form parameters"));
        }
        if k + 1 != n.get() && k != n.get() {
            return Err(Error::InvalidArgument(format!("k must be n-1 or n, got {k} for n={n}")));
        }
        if a <= 0.0 {
            return Err(Error::InvalidArgument(format!("A must be > 0, got {a}")));
        }
        if b <= -1.0 {
            return Err(Error::InvalidArgument(format!("B must be > -1, got {b}")));
        }
        Ok(ClosedFormFamily { n, k, a, b })
    }

    /// Burns-Simanca type: `k = n - 1`, `A = 1`.
    pub fn burns_simanca(n: Dimension, b: f64) -> Result<Self> {
        Self::new(n, n.get() - 1, 1.0, b)
    }

    /// Ricci-flat (Eguchi-Hanson type): `k = n`, `A = 1`.
    pub fn eguchi_hanson(n: Dimension, b: f64) -> Result<Self> {
        Self::new(n, n.get(), 1.0, b)
    }

    pub fn is_ricci_flat(&self) -> bool {
        self.k == self.n.get()
    }

    /// Lower end of the domain in `t` (`-inf` unless `B < 0`).
    pub fn t_lower(&self) -> f64 {
        if self.b < 0.0 {
            (-self.b).ln() / self.k as f64
        } else {
            f64::NEG_INFINITY
        }
    }

    /// `r = B e^{-kt}`, the only place `t` enters.
    fn ratio(&self, t: f64) -> Result<f64> {
        if t.is_nan() {
            return Err(Error::NonFinite("t"));
        }
        if t <= self.t_lower() {
            return Err(Error::OutOfSpan {
                t,
                lo: self.t_lower(),
                hi: f64::INFINITY,
            });
        }
        if self.b == 0.0 {
            return Ok(0.0);
        }
        Ok(self.b.signum() * (self.b.abs().ln() - self.k as f64 * t).exp())
    }

    /// Exact phase curve at `t`.
    pub fn phase_point(&self, t: f64) -> Result<PhasePoint> {
        let r = self.ratio(t)?;
        let one_minus_w = r / (1.0 + r);
        Ok(if self.is_ricci_flat() {
            PhasePoint::new(-one_minus_w, 0.0)
        } else {
            PhasePoint::new(0.0, -one_minus_w)
        })
    }

    pub fn u_t(&self, t: f64) -> Result<f64> {
        Ok(self.jet(t)?.u_t())
    }

    /// `lim_{t -> -inf} u_t^n`, zero unless `B > 0`.
    pub fn lower_limit_u_t_pow_n(&self) -> f64 {
        if self.b > 0.0 {
            (self.a * self.b.powf(1.0 / self.k as f64)).powi(self.n.get() as i32)
        } else {
            0.0
        }
    }

    fn jet(&self, t: f64) -> Result<Jet> {
        let r = self.ratio(t)?;
        let k = self.k as f64;
        let w = 1.0 / (1.0 + r);
        let om = r / (1.0 + r);
        let p = self.phase_point(t)?;
        Ok(Jet {
            n: self.n,
            t,
            x: p.x,
            y: p.y,
            v: self.a.ln() + t + r.ln_1p() / k,
            vt: w,
            one_minus_vt: om,
            vtt: k * w * om,
            vttt: k * k * w * om * (1.0 - 2.0 * w),
            vtt_over_vt: k * om,
            curv_c: -k * k * om,
        })
    }
}

/// All radial derivatives at one value of `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub n: Dimension,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub v: f64,
    pub vt: f64,
    /// `1 - v_t`, kept separately to avoid cancellation.
    pub one_minus_vt: f64,
    pub vtt: f64,
    pub vttt: f64,
    // `v_tt / v_t` and `(v_ttt v_t - v_tt^2) / v_t^3`, exact without division.
    vtt_over_vt: f64,
    curv_c: f64,
}

impl Jet {
    /// Jet of the phase state `(x, y)` with potential level `v`.
    pub fn from_state(n: Dimension, t: f64, x: f64, y: f64, v: f64) -> Jet {
        let nf = n.as_f64();
        let vt = 1.0 + x + y;
        let q = nf * x + (nf - 1.0) * y;
        let c = nf * nf * x + (nf - 1.0) * (nf - 1.0) * y;
        let vtt = -vt * q;
        let vttt = -vtt * q + vt * vt * c;
        Jet {
            n,
            t,
            x,
            y,
            v,
            vt,
            one_minus_vt: -(x + y),
            vtt,
            vttt,
            vtt_over_vt: -q,
            curv_c: c,
        }
    }

    pub fn point(&self) -> PhasePoint {
        PhasePoint::new(self.x, self.y)
    }

    pub fn u_t(&self) -> f64 {
        self.v.exp()
    }

    pub fn u_tt(&self) -> f64 {
        self.vt * self.v.exp()
    }

    pub fn u_ttt(&self) -> f64 {
        (self.vtt + self.vt * self.vt) * self.v.exp()
    }

    pub fn u_tttt(&self) -> f64 {
        (self.vttt + 3.0 * self.vt * self.vtt + self.vt.powi(3)) * self.v.exp()
    }

    fn require_positive(&self) -> Result<()> {
        if self.vt > 0.0 {
            Ok(())
        } else {
            Err(Error::NonPositive { t: self.t })
        }
    }

    /// Scalar curvature; zero for every solution of the phase system.
    pub fn scalar_curvature(&self) -> Result<f64> {
        self.require_positive()?;
        let nf = self.n.as_f64();
        // numerator of the curvature formula divided by v_t
        let reduced = nf * (nf - 1.0) * self.one_minus_vt - (2.0 * nf - 1.0) * self.vtt_over_vt - self.curv_c;
        Ok(reduced * (-self.v).exp())
    }

    /// `d/dt log(u_t^{n-1} u_tt e^{-nt})`; equals `y`.
    pub fn ricci_defect(&self) -> Result<f64> {
        self.require_positive()?;
        let nf = self.n.as_f64();
        Ok(self.vtt_over_vt - nf * self.one_minus_vt)
    }
}

/// Scalar curvature straight from `(v, v_t, v_tt, v_ttt)` with no algebraic shortcuts.
pub fn scalar_curvature_from_derivatives(n: Dimension, v: f64, vt: f64, vtt: f64, vttt: f64) -> Result<f64> {
    if !(vt > 0.0) {
        return Err(Error::NonPositive { t: f64::NAN });
    }
    let nf = n.as_f64();
    let num = nf * (nf - 1.0) * (1.0 - vt) * vt - (2.0 * nf - 1.0) * vtt - (vttt * vt - vtt * vtt) / (vt * vt);
    Ok(num / (vt * v.exp()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSource {
    Trajectory(Box<Trajectory>),
    ClosedForm(ClosedFormFamily),
}

/// A radial Kähler potential, known through `u_t` and its derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricProfile {
    pub n: Dimension,
    pub source: ProfileSource,
}

pub fn profile_from_trajectory(traj: Trajectory) -> MetricProfile {
    MetricProfile {
        n: traj.n,
        source: ProfileSource::Trajectory(Box::new(traj)),
    }
}

pub fn closed_form_profile(fam: ClosedFormFamily) -> MetricProfile {
    MetricProfile {
        n: fam.n,
        source: ProfileSource::ClosedForm(fam),
    }
}

impl MetricProfile {
    pub fn trajectory(&self) -> Option<&Trajectory> {
        match &self.source {
            ProfileSource::Trajectory(t) => Some(t),
            ProfileSource::ClosedForm(_) => None,
        }
    }

    pub fn closed_form(&self) -> Option<&ClosedFormFamily> {
        match &self.source {
            ProfileSource::ClosedForm(f) => Some(f),
            ProfileSource::Trajectory(_) => None,
        }
    }

    /// Interval on which the accessors can be evaluated.
    pub fn span(&self) -> (f64, f64) {
        match &self.source {
            ProfileSource::Trajectory(tr) => tr.eval_span(),
            ProfileSource::ClosedForm(f) => (f.t_lower(), f64::INFINITY),
        }
    }

    pub fn jet(&self, t: f64) -> Result<Jet> {
        match &self.source {
            ProfileSource::Trajectory(tr) => {
                let s = tr.state_at(t)?;
                Ok(Jet::from_state(self.n, t, s.x, s.y, s.v))
            }
            ProfileSource::ClosedForm(f) => f.jet(t),
        }
    }

    pub fn phase_point(&self, t: f64) -> Result<PhasePoint> {
        Ok(self.jet(t)?.point())
    }

    pub fn v(&self, t: f64) -> Result<f64> {
        Ok(self.jet(t)?.v)
    }

    pub fn v_t(&self, t: f64) -> Result<f64> {
        Ok(self.jet(t)?.vt)
    }

    pub fn v_tt(&self, t: f64) -> Result<f64> {
        Ok(self.jet(t)?.vtt)
    }

    pub fn v_ttt(&self, t: f64) -> Result<f64> {
        Ok(self.jet(t)?.vttt)
    }

    pub fn u_t(&self, t: f64) -> Result<f64> {
        Ok(self.jet(t)?.u_t())
    }

    pub fn u_tt(&self, t: f64) -> Result<f64> {
        Ok(self.jet(t)?.u_tt())
    }

    pub fn u_ttt(&self, t: f64) -> Result<f64> {
        Ok(self.jet(t)?.u_ttt())
    }

    pub fn u_tttt(&self, t: f64) -> Result<f64> {
        Ok(self.jet(t)?.u_tttt())
    }

    /// True when the forward end is asymptotically Euclidean.
    pub fn has_ae_end(&self) -> bool {
        match &self.source {
            ProfileSource::Trajectory(tr) => matches!(tr.forward_end, TerminationReason::ConvergedToOrigin),
            ProfileSource::ClosedForm(_) => true,
        }
    }

    /// True when the profile is the flat metric `u_t = A e^t`.
    pub fn is_flat(&self) -> bool {
        match &self.source {
            ProfileSource::Trajectory(tr) => tr.initial_point().is_origin(),
            ProfileSource::ClosedForm(f) => f.b == 0.0,
        }
    }
}

pub fn scalar_curvature(profile: &MetricProfile, t: f64) -> Result<f64> {
    profile.jet(t)?.scalar_curvature()
}

pub fn ricci_defect(profile: &MetricProfile, t: f64) -> Result<f64> {
    profile.jet(t)?.ricci_defect()
}

/// Limit of `u_t e^{-t}` at the Euclidean end.
pub fn ale_coefficient(profile: &MetricProfile) -> Result<f64> {
    if !profile.has_ae_end() {
        return Err(Error::NoAsymptoticEnd);
    }
    let rate = profile.n.as_f64() - 1.0;
    let r = extrapolate::limit(|t| Ok(profile.v(t)? - t), &LADDER, rate)?;
    Ok(r.value.exp())
}

/// ADM mass from the limit definition, alongside the leading-order value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub m_numeric: f64,
    /// `-y0 / (n - 1)`, present for trajectory profiles.
    pub m_paper: Option<f64>,
    /// The metric is not flat, yet the `e^{(1-n)t}` coefficient vanishes.
    pub below_decay_threshold: bool,
    pub ladder: Vec<f64>,
    pub estimates: Vec<f64>,
}

/// `lim e^{(n-2)t} (u_t - u_tt) / (n - 1)`, Richardson-extrapolated.
pub fn adm_mass(profile: &MetricProfile) -> Result<MassReport> {
    if !profile.has_ae_end() {
        return Err(Error::NoAsymptoticEnd);
    }
    let nf = profile.n.as_f64();
    // u_t - u_tt = -(x + y) e^v, evaluated in log space.
    let g = |t: f64| -> Result<f64> {
        let j = profile.jet(t)?;
        let d = j.one_minus_vt;
        if d == 0.0 {
            return Ok(0.0);
        }
        Ok(d.signum() * ((nf - 2.0) * t + j.v + d.abs().ln()).exp() / (nf - 1.0))
    };
    let Extrapolated { value, estimates, .. } = extrapolate::limit(g, &LADDER, 1.0)?;
    let m_paper = profile.trajectory().map(|tr| -tr.initial_point().y / (nf - 1.0));
    Ok(MassReport {
        m_numeric: value,
        m_paper,
        below_decay_threshold: value == 0.0 && !profile.is_flat(),
        ladder: LADDER.to_vec(),
        estimates,
    })
}

/// Black-arc seed on the critical level halfway between the origin and the tangency point.
pub fn fyz_seed(n: Dimension) -> PhasePoint {
    let x = 0.5 * (n.as_f64() - 1.0);
    PhasePoint::new(x, level_branch_y(n, lambda_critical(n), -1.0, x))
}

/// Backward limit of the black arc through `seed`.
pub fn fyz_limit_from(n: Dimension, seed: PhasePoint) -> Result<PhasePoint> {
    seed.check_admissible()?;
    let lc = lambda_critical(n);
    let level = level_value(n, seed)?.get();
    let tp = tangency_point(n);
    let on_black = seed.x > 0.0 && seed.x < tp.x && seed.y < 0.0;
    if !on_black || ((level / lc) - 1.0).abs() > crate::phase::CRITICAL_LEVEL_RTOL {
        return Err(Error::NotCriticalLevel { level, critical: lc });
    }
    // The approach to the tangency point is algebraic (distance ~ 1/|t|).
    let traj = integrate(n, seed, &IntegrateOptions::new(-1e7, 1.0, 1e-10))?;
    Ok(traj.first().point())
}

pub fn fyz_limit_check(n: Dimension) -> Result<PhasePoint> {
    fyz_limit_from(n, fyz_seed(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::DEFAULT_TOL;

    fn d(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn traj_profile(n: u32, x: f64, y: f64) -> MetricProfile {
        let tr = integrate(d(n), PhasePoint::new(x, y), &IntegrateOptions::default()).unwrap();
        profile_from_trajectory(tr)
    }

    #[test]
    fn coordinate_map_round_trip() {
        let t = CoordinateMap::t_from_r(1.0).unwrap();
        assert!((t - 0.5f64.ln()).abs() < 1e-15);
        assert!((CoordinateMap::r_from_t(t) - 1.0).abs() < 1e-15);
        assert!(CoordinateMap::t_from_r(0.0).is_err());
    }

    #[test]
    fn euclidean_profile() {
        let p = traj_profile(2, 0.0, 0.0);
        for t in [-3.0, 0.0, 2.5] {
            assert!((p.u_t(t).unwrap() - f64::exp(t)).abs() < 1e-12 * f64::exp(t));
            assert!((p.u_tt(t).unwrap() - f64::exp(t)).abs() < 1e-12 * f64::exp(t));
            assert_eq!(scalar_curvature(&p, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn normalization_at_zero() {
        let p = traj_profile(2, 2.0, -2.5);
        assert_eq!(p.u_t(0.0).unwrap(), 1.0);
        assert_eq!(p.u_tt(0.0).unwrap(), 0.5);
    }

    #[test]
    fn burns_simanca_trajectory_is_proportional_to_closed_form() {
        let p = traj_profile(2, 0.0, -0.5);
        let fam = ClosedFormFamily::burns_simanca(d(2), 1.0).unwrap();
        for t in [-2.0, 0.0, 1.0, 3.0] {
            let ratio = p.u_t(t).unwrap() / fam.u_t(t).unwrap();
            assert!((ratio - 0.5).abs() < 1e-9, "{ratio}");
        }
    }

    #[test]
    fn closed_form_examples() {
        let bs = closed_form_profile(ClosedFormFamily::new(d(2), 1, 1.0, 1.0).unwrap());
        for t in [-1.0, 0.0, 2.0] {
            assert!((bs.u_t(t).unwrap() - (1.0 + f64::exp(t))).abs() < 1e-12 * (1.0 + f64::exp(t)));
            assert!((bs.u_tt(t).unwrap() - f64::exp(t)).abs() < 1e-12 * f64::exp(t));
        }
        let flat = closed_form_profile(ClosedFormFamily::new(d(3), 3, 2.0, 0.0).unwrap());
        assert!((flat.u_t(1.0).unwrap() - 2.0 * f64::exp(1.0)).abs() < 1e-12);
        let eh = ClosedFormFamily::new(d(2), 2, 1.0, 0.25).unwrap();
        // (1/4 + e^{2t})^{1/2}
        let t = 0.4f64;
        assert!((eh.u_t(t).unwrap() - (0.25 + (2.0 * t).exp()).sqrt()).abs() < 1e-14);
        let neg = ClosedFormFamily::new(d(2), 1, 1.0, -0.5).unwrap();
        assert!(matches!(neg.u_t(-1.0), Err(Error::OutOfSpan { .. })));
        assert!(ClosedFormFamily::new(d(3), 1, 1.0, 0.5).is_err());
        assert!(ClosedFormFamily::new(d(3), 2, 1.0, -1.0).is_err());
    }

    #[test]
    fn curvature_examples() {
        let p = traj_profile(2, 2.0, -2.5);
        // the backward escape time is about -0.67
        for t in [-0.5, 0.0, 1.0] {
            assert!(scalar_curvature(&p, t).unwrap().abs() <= 1e-6);
        }
        let cf = closed_form_profile(ClosedFormFamily::new(d(3), 2, 1.0, 0.7).unwrap());
        assert!(scalar_curvature(&cf, 0.3).unwrap().abs() <= 1e-10);
        let bs = closed_form_profile(ClosedFormFamily::burns_simanca(d(2), 1.0).unwrap());
        assert!((ricci_defect(&bs, 0.0).unwrap() + 0.5).abs() < 1e-15);
        let eh = closed_form_profile(ClosedFormFamily::eguchi_hanson(d(4), 3.0).unwrap());
        assert_eq!(ricci_defect(&eh, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn literal_curvature_formula_agrees() {
        let fam = ClosedFormFamily::new(d(3), 2, 1.5, 0.7).unwrap();
        let j = fam.jet(0.3).unwrap();
        let s = scalar_curvature_from_derivatives(d(3), j.v, j.vt, j.vtt, j.vttt).unwrap();
        assert!(s.abs() < 1e-13);
    }

    #[test]
    fn mass_examples() {
        let e = adm_mass(&traj_profile(2, 0.0, 0.0)).unwrap();
        assert_eq!(e.m_numeric, 0.0);
        assert_eq!(e.m_paper, Some(0.0));
        assert!(!e.below_decay_threshold);
        let bs = adm_mass(&closed_form_profile(
            ClosedFormFamily::burns_simanca(d(2), 1.0).unwrap(),
        ))
        .unwrap();
        assert!((bs.m_numeric - 1.0).abs() < 1e-9);
        assert_eq!(bs.m_paper, None);
        let eh = adm_mass(&closed_form_profile(
            ClosedFormFamily::eguchi_hanson(d(3), 0.5).unwrap(),
        ))
        .unwrap();
        assert_eq!(eh.m_numeric, 0.0);
        assert!(eh.below_decay_threshold);
        let p = adm_mass(&traj_profile(2, 2.0, -2.5)).unwrap();
        assert_eq!(p.m_paper, Some(2.5));
        let q = traj_profile(2, 3.0, -3.5);
        assert!(matches!(adm_mass(&q), Err(Error::NoAsymptoticEnd)));
    }

    #[test]
    fn fyz_limit() {
        for n in 2..=3 {
            let lim = fyz_limit_check(d(n)).unwrap();
            let tp = tangency_point(d(n));
            assert!(((lim.x - tp.x).powi(2) + (lim.y - tp.y).powi(2)).sqrt() < 1e-4);
        }
        assert!(matches!(
            fyz_limit_from(d(2), PhasePoint::new(0.5, -1.0)),
            Err(Error::NotCriticalLevel { .. })
        ));
        let tr = integrate(d(2), fyz_seed(d(2)), &IntegrateOptions::new(-1.0, 100.0, DEFAULT_TOL)).unwrap();
        assert_eq!(tr.forward_end, TerminationReason::ConvergedToOrigin);
    }
}
