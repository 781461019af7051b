//! Integration of the phase system augmented with `v_t = 1 + x + y`.
//!
//! The integrator is the Dormand-Prince 5(4) pair with a PI step-size
//! controller. Both directions start from `t = 0` with `v(0) = 0` and stop at
//! the first of: convergence to the origin, approach to the admissible line,
//! finite-time blow-up, the requested time bound, or step-size collapse.
//!
//! Evaluation between samples replays one Dormand-Prince step from the sample
//! the original integration stepped from, so it reproduces the stored samples
//! bit-for-bit at the nodes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::{level_value, Dimension, PhasePoint};
use crate::quad::{self, QuadOptions};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_T_MIN: f64 = -100.0;
pub const DEFAULT_T_MAX: f64 = 100.0;
/// Hard floor on the step size.
pub const STEP_FLOOR: f64 = 1e-14;
/// `|(x, y)|` below which the forward orbit is declared converged to the origin.
pub const EPS_ORIGIN: f64 = 1e-13;
/// `|(x, y)|` above which the orbit is declared to blow up.
pub const BLOWUP_RADIUS: f64 = 1e8;
/// `1 + x + y` below which the orbit is declared asymptotic to the admissible line,
/// relative to `max(1, |x| + |y|)` (the slack is only that accurate).
pub const EPS_LINE: f64 = 1e-11;
/// Budget of attempted steps per direction; exhausting it ends the run as
/// [`TerminationReason::StepSizeUnderflow`].
pub const MAX_STEPS: usize = 2_000_000;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const PI_BETA: f64 = 0.04;
// x and y are controlled in relative terms only; their magnitudes span
// hundreds of decades between the blow-up and the origin.
const ATOL_XY: f64 = 1e-300;

// Dormand-Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

type State = [f64; 3];

/// One sampled point `(t, x, y, v)` of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub v: f64,
}

impl Sample {
    pub fn point(&self) -> PhasePoint {
        PhasePoint::new(self.x, self.y)
    }

    /// `v_t = 1 + x + y`.
    pub fn vt(&self) -> f64 {
        1.0 + self.x + self.y
    }

    fn state(&self) -> State {
        [self.x, self.y, self.v]
    }

    fn from_state(t: f64, z: State) -> Self {
        Sample {
            t,
            x: z[0],
            y: z[1],
            v: z[2],
        }
    }
}

/// Why integration stopped in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum TerminationReason {
    ConvergedToOrigin,
    /// The orbit creeps onto the line of fixed points at `(w, -1 - w)`.
    AdmissibleLineAsymptote {
        w: f64,
    },
    /// `|(x, y)|` diverges as `t -> time`.
    FiniteTimeBlowup {
        time: f64,
    },
    MaxTimeReached,
    StepSizeUnderflow,
}

impl TerminationReason {
    pub fn name(&self) -> &'static str {
        match self {
            TerminationReason::ConvergedToOrigin => "ConvergedToOrigin",
            TerminationReason::AdmissibleLineAsymptote { .. } => "AdmissibleLineAsymptote",
            TerminationReason::FiniteTimeBlowup { .. } => "FiniteTimeBlowup",
            TerminationReason::MaxTimeReached => "MaxTimeReached",
            TerminationReason::StepSizeUnderflow => "StepSizeUnderflow",
        }
    }

    /// Limit point on the admissible line, if any.
    pub fn line_limit(&self) -> Option<PhasePoint> {
        match *self {
            TerminationReason::AdmissibleLineAsymptote { w } => Some(PhasePoint::new(w, -1.0 - w)),
            _ => None,
        }
    }

    /// One-line summary used in CSV trailers.
    pub fn describe(&self) -> String {
        match *self {
            TerminationReason::AdmissibleLineAsymptote { w } => {
                format!("AdmissibleLineAsymptote w={}", crate::fmt17(w))
            }
            TerminationReason::FiniteTimeBlowup { time } => {
                format!("FiniteTimeBlowup T={}", crate::fmt17(time))
            }
            other => other.name().to_string(),
        }
    }
}

/// Integration settings.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions {
    pub t_min: f64,
    pub t_max: f64,
    pub tol: f64,
    /// Extra times at which samples are forced.
    pub grid: Vec<f64>,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            t_min: DEFAULT_T_MIN,
            t_max: DEFAULT_T_MAX,
            tol: DEFAULT_TOL,
            grid: Vec::new(),
        }
    }
}

impl IntegrateOptions {
    pub fn new(t_min: f64, t_max: f64, tol: f64) -> Self {
        IntegrateOptions {
            t_min,
            t_max,
            tol,
            grid: Vec::new(),
        }
    }

    pub fn with_grid(mut self, grid: Vec<f64>) -> Self {
        self.grid = grid;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.t_min.is_nan() || self.t_max.is_nan() || !self.tol.is_finite() {
            return Err(Error::NonFinite("integration bounds"));
        }
        if !(self.t_min < 0.0 && self.t_max > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need t_min < 0 < t_max, got ({}, {})",
                self.t_min, self.t_max
            )));
        }
        if self.tol <= 0.0 {
            return Err(Error::InvalidArgument(format!("tol must be > 0, got {}", self.tol)));
        }
        Ok(())
    }
}

/// A sampled orbit through an initial point, normalized by `v(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub n: Dimension,
    /// Strictly increasing in `t`; contains `t = 0`.
    pub samples: Vec<Sample>,
    pub forward_end: TerminationReason,
    pub backward_end: TerminationReason,
    pub tol: f64,
    zero_index: usize,
}

#[inline]
fn rhs(n: f64, z: &State) -> State {
    let s = 1.0 + z[0] + z[1];
    [-n * z[0] * s, (1.0 - n) * z[1] * s, s]
}

#[inline]
fn axpy(z: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *z;
    for i in 0..3 {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

struct StepOutput {
    z: State,
    err: State,
    admissible: bool,
}

fn dp_step(n: f64, z: &State, h: f64) -> StepOutput {
    let k1 = rhs(n, z);
    let z2 = axpy(z, h, &[(A21, &k1)]);
    let k2 = rhs(n, &z2);
    let z3 = axpy(z, h, &[(A31, &k1), (A32, &k2)]);
    let k3 = rhs(n, &z3);
    let z4 = axpy(z, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
    let k4 = rhs(n, &z4);
    let z5 = axpy(z, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
    let k5 = rhs(n, &z5);
    let z6 = axpy(z, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
    let k6 = rhs(n, &z6);
    let znew = axpy(z, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = rhs(n, &znew);
    let mut err = [0.0; 3];
    for i in 0..3 {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    let slack_ok = |s: &State| 1.0 + s[0] + s[1] > 0.0 && s.iter().all(|v| v.is_finite());
    let admissible = [&z2, &z3, &z4, &z5, &z6, &znew].iter().all(|s| slack_ok(s));
    StepOutput {
        z: znew,
        err,
        admissible,
    }
}

fn error_norm(err: &State, z0: &State, z1: &State, tol: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..3 {
        let atol = if i == 2 { tol } else { ATOL_XY };
        let sc = atol + tol * z0[i].abs().max(z1[i].abs());
        worst = worst.max(err[i].abs() / sc);
    }
    worst
}

/// Remaining time to blow-up from a state with large `|(x, y)|`,
/// from the leading-order growth `c_t ~ kappa c^2` of the dominant coordinate.
fn blowup_tail(n: f64, z: &State) -> f64 {
    if z[0].abs() >= z[1].abs() {
        1.0 / (n * z[0].abs())
    } else {
        1.0 / ((n - 1.0) * z[1].abs())
    }
}

/// Point where the level curve through `p` meets the admissible line, refined near `x_guess`.
fn line_crossing(n: Dimension, p: PhasePoint, x_guess: f64) -> f64 {
    let lambda = match level_value(n, p) {
        Ok(l) if l.get().is_finite() && l.get() > 0.0 => l.get(),
        // axes: x = 0 meets the line at (0, -1), y = 0 at (-1, 0)
        _ => return if p.x == 0.0 { 0.0 } else { -1.0 },
    };
    let sign_y = p.y.signum();
    let s = |x: f64| 1.0 + x + crate::phase::level_branch_y(n, lambda, sign_y, x);
    let width = 1e-6 * x_guess.abs().max(1.0);
    let (mut a, mut b) = (x_guess - width, x_guess + width);
    for _ in 0..40 {
        if s(a) * s(b) <= 0.0 && a.signum() == b.signum() {
            break;
        }
        a = x_guess - 2.0 * (x_guess - a);
        b = x_guess + 2.0 * (b - x_guess);
        if a.signum() != x_guess.signum() {
            a = x_guess * 1e-3;
        }
    }
    crate::roots::brent(s, a, b, crate::roots::BrentOptions::default()).unwrap_or(x_guess)
}

struct HalfRun {
    samples: Vec<Sample>,
    end: TerminationReason,
}

fn run_direction(n: Dimension, z0: State, dir: f64, bound: f64, tol: f64, grid: &[f64]) -> HalfRun {
    let nf = n.as_f64();
    let mut t = 0.0_f64;
    let mut z = z0;
    let mut samples = Vec::new();
    let mut stops: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&g| g.is_finite() && g * dir > 0.0 && g * dir < bound * dir)
        .collect();
    stops.sort_by(|a, b| (a * dir).total_cmp(&(b * dir)));
    stops.dedup();
    let mut next_stop = 0;

    let mut h = dir * 1e-4;
    let mut fac_old: f64 = 1e-4;
    let mut last_rejected = false;
    let mut attempts = 0usize;

    loop {
        attempts += 1;
        if attempts > MAX_STEPS {
            return HalfRun {
                samples,
                end: TerminationReason::StepSizeUnderflow,
            };
        }
        let floor = STEP_FLOOR.max(4.0 * f64::EPSILON * t.abs());
        // Land exactly on grid points and on the bound.
        let mut target = bound;
        if next_stop < stops.len() {
            target = stops[next_stop];
        }
        let remaining = target - t;
        let mut clipped = false;
        if (h.abs()) >= remaining.abs() {
            h = remaining;
            clipped = true;
        }
        if h.abs() < floor && !clipped {
            return HalfRun {
                samples,
                end: TerminationReason::StepSizeUnderflow,
            };
        }
        let step = dp_step(nf, &z, h);
        let err = if step.admissible {
            error_norm(&step.err, &z, &step.z, tol)
        } else {
            f64::INFINITY
        };
        if !err.is_finite() || err > 1.0 {
            let shrink = if err.is_finite() {
                (err.powf(0.2 - PI_BETA * 0.75) / SAFETY).min(1.0 / FAC_MIN)
            } else {
                4.0
            };
            h /= shrink;
            last_rejected = true;
            if h.abs() < floor {
                return HalfRun {
                    samples,
                    end: TerminationReason::StepSizeUnderflow,
                };
            }
            continue;
        }

        // accepted
        let t_new = if clipped { target } else { t + h };
        t = t_new;
        z = step.z;
        samples.push(Sample::from_state(t, z));
        if clipped && next_stop < stops.len() && t == stops[next_stop] {
            next_stop += 1;
        }

        let fac11 = err.max(1e-300).powf(0.2 - PI_BETA * 0.75);
        let mut fac = fac11 / fac_old.powf(PI_BETA);
        fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;
        if last_rejected && h_new.abs() > h.abs() {
            h_new = h;
        }
        fac_old = err.max(1e-4);
        last_rejected = false;
        if !clipped || h_new.abs() > h.abs() {
            h = h_new;
        }

        let p = PhasePoint::new(z[0], z[1]);
        let radius = p.norm();
        if dir > 0.0 && radius < EPS_ORIGIN {
            return HalfRun {
                samples,
                end: TerminationReason::ConvergedToOrigin,
            };
        }
        if radius >= BLOWUP_RADIUS {
            let time = t + dir * blowup_tail(nf, &z);
            return HalfRun {
                samples,
                end: TerminationReason::FiniteTimeBlowup { time },
            };
        }
        if p.slack() < EPS_LINE * (p.x.abs() + p.y.abs()).max(1.0) {
            let w = line_crossing(n, p, p.x);
            return HalfRun {
                samples,
                end: TerminationReason::AdmissibleLineAsymptote { w },
            };
        }
        if t == bound {
            return HalfRun {
                samples,
                end: TerminationReason::MaxTimeReached,
            };
        }
    }
}

/// Integrates the orbit through `p0` in both directions.
pub fn integrate(n: Dimension, p0: PhasePoint, opts: &IntegrateOptions) -> Result<Trajectory> {
    opts.validate()?;
    p0.check_admissible()?;
    let z0 = [p0.x, p0.y, 0.0];
    let (fwd, bwd) = rayon::join(
        || run_direction(n, z0, 1.0, opts.t_max, opts.tol, &opts.grid),
        || run_direction(n, z0, -1.0, opts.t_min, opts.tol, &opts.grid),
    );
    let mut samples: Vec<Sample> = bwd.samples.into_iter().rev().collect();
    let zero_index = samples.len();
    samples.push(Sample::from_state(0.0, z0));
    samples.extend(fwd.samples);
    Ok(Trajectory {
        n,
        samples,
        forward_end: fwd.end,
        backward_end: bwd.end,
        tol: opts.tol,
        zero_index,
    })
}

impl Trajectory {
    pub fn initial_point(&self) -> PhasePoint {
        self.samples[self.zero_index].point()
    }

    pub fn zero_index(&self) -> usize {
        self.zero_index
    }

    pub fn first(&self) -> &Sample {
        self.samples.first().expect("trajectory has the t = 0 sample")
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has the t = 0 sample")
    }

    /// Maximal interval of existence `(a, b)` as far as it was resolved.
    pub fn t_span(&self) -> (f64, f64) {
        let end = |reason: &TerminationReason, sample: &Sample, sign: f64| match *reason {
            TerminationReason::ConvergedToOrigin | TerminationReason::AdmissibleLineAsymptote { .. } => {
                sign * f64::INFINITY
            }
            TerminationReason::FiniteTimeBlowup { time } => time,
            _ => sample.t,
        };
        (
            end(&self.backward_end, self.first(), -1.0),
            end(&self.forward_end, self.last(), 1.0),
        )
    }

    /// Interval on which [`Trajectory::state_at`] succeeds.
    pub fn eval_span(&self) -> (f64, f64) {
        let lo = if self.first().point().is_origin() {
            f64::NEG_INFINITY
        } else {
            self.first().t
        };
        let hi = if matches!(self.forward_end, TerminationReason::ConvergedToOrigin) {
            f64::INFINITY
        } else {
            self.last().t
        };
        (lo, hi)
    }

    /// State at an arbitrary `t` in [`Trajectory::eval_span`].
    pub fn state_at(&self, t: f64) -> Result<Sample> {
        if t.is_nan() {
            return Err(Error::NonFinite("t"));
        }
        let (lo, hi) = self.eval_span();
        if t < lo || t > hi {
            return Err(Error::OutOfSpan { t, lo, hi });
        }
        let first = self.first();
        let last = self.last();
        if t > last.t {
            return Ok(self.origin_tail(last, t));
        }
        if t < first.t {
            return Ok(self.origin_tail(first, t));
        }
        let idx = self.samples.partition_point(|s| s.t < t);
        if idx < self.samples.len() && self.samples[idx].t == t {
            return Ok(self.samples[idx]);
        }
        // Replay the step the integrator took into this interval.
        let anchor = if t > 0.0 {
            &self.samples[idx - 1]
        } else {
            &self.samples[idx]
        };
        let out = dp_step(self.n.as_f64(), &anchor.state(), t - anchor.t);
        Ok(Sample::from_state(t, out.z))
    }

    /// Linearized flow about the origin; exact when the anchor is the origin itself.
    fn origin_tail(&self, anchor: &Sample, t: f64) -> Sample {
        let nf = self.n.as_f64();
        let dt = t - anchor.t;
        let ex = (-nf * dt).exp();
        let ey = ((1.0 - nf) * dt).exp();
        let x = anchor.x * ex;
        let y = anchor.y * ey;
        let v = anchor.v
            + dt
            + anchor.x * (-(-nf * dt).exp_m1()) / nf
            + anchor.y * (-((1.0 - nf) * dt).exp_m1()) / (nf - 1.0);
        Sample { t, x, y, v }
    }

    /// Largest relative drift of the level function over the samples (when `x y != 0`).
    pub fn level_drift(&self) -> f64 {
        let p0 = self.initial_point();
        let f0 = match level_value(self.n, p0) {
            Ok(l) if l.get().is_finite() && l.get() > 0.0 => l.get(),
            _ => return 0.0,
        };
        self.samples
            .iter()
            .filter_map(|s| level_value(self.n, s.point()).ok())
            .map(|l| (l.get() / f0 - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Which coordinate [`time_to_reach`] integrates along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

/// Time for the orbit through `p0` to move its `axis` coordinate to `target`
/// (which may be infinite), from the implicit quadrature along the level curve.
pub fn time_to_reach(n: Dimension, p0: PhasePoint, target: f64, axis: Axis) -> Result<f64> {
    p0.check_admissible()?;
    if target.is_nan() {
        return Err(Error::NonFinite("target"));
    }
    if p0.x == 0.0 || p0.y == 0.0 {
        return Err(Error::InvalidArgument("time_to_reach needs x0 * y0 != 0".into()));
    }
    let nf = n.as_f64();
    let lambda = level_value(n, p0)?.get();
    // Along the branch the other coordinate is sigma * a * |c|^p.
    let (c0, sigma, a, p, rate) = match axis {
        Axis::X => (p0.x, p0.y.signum(), lambda.powf(1.0 / nf), 1.0 - 1.0 / nf, nf),
        Axis::Y => (
            p0.y,
            p0.x.signum(),
            lambda.powf(1.0 / (1.0 - nf)),
            nf / (nf - 1.0),
            nf - 1.0,
        ),
    };
    if target == c0 {
        return Ok(0.0);
    }
    if target == 0.0 || target.signum() != c0.signum() {
        return Err(Error::Unreachable { start: c0, target });
    }
    let slack = move |c: f64| 1.0 + c + sigma * a * c.abs().powf(p);

    // Minimum of the slack on the closed interval: endpoints plus the
    // stationary point, which exists only when sigma * sign(c) < 0.
    let (lo, hi) = if c0 < target { (c0, target) } else { (target, c0) };
    let mut min_at = (slack(c0), c0);
    if target.is_finite() {
        let s = slack(target);
        if s < min_at.0 {
            min_at = (s, target);
        }
    } else {
        // dominant term at infinity
        let s_inf = if p < 1.0 { c0.signum() } else { sigma };
        if s_inf < 0.0 {
            return Err(Error::SingularIntegrand { at: target });
        }
    }
    if sigma * c0.signum() < 0.0 {
        let crit = c0.signum() * (a * p).powf(-1.0 / (p - 1.0));
        if crit > lo && crit < hi {
            let s = slack(crit);
            if s < min_at.0 {
                min_at = (s, crit);
            }
        }
    }
    if min_at.0 <= 0.0 {
        return Err(Error::SingularIntegrand { at: min_at.1 });
    }

    let integrand = move |c: f64| 1.0 / (-rate * c * slack(c));
    let opts = QuadOptions::default();
    let r = if target.is_finite() {
        quad::integrate(integrand, c0, target, opts)?
    } else {
        quad::integrate_to_infinity(integrand, c0, target.signum(), opts)?
    };
    Ok(r.value)
}

/// Signed escape time of the orbit through `p0`, if it blows up in finite time.
pub fn blowup_time(n: Dimension, p0: PhasePoint) -> Result<Option<f64>> {
    let traj = integrate(n, p0, &IntegrateOptions::default())?;
    Ok(blowup_time_of(&traj))
}

pub fn blowup_time_of(traj: &Trajectory) -> Option<f64> {
    [traj.backward_end, traj.forward_end].iter().find_map(|end| match *end {
        TerminationReason::FiniteTimeBlowup { time } => Some(time),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn run(n: u32, x: f64, y: f64) -> Trajectory {
        integrate(d(n), PhasePoint::new(x, y), &IntegrateOptions::default()).unwrap()
    }

    #[test]
    fn rejects_bad_input() {
        let o = IntegrateOptions::default();
        assert!(matches!(
            integrate(d(2), PhasePoint::new(-2.0, 0.5), &o),
            Err(Error::Inadmissible { .. })
        ));
        assert!(matches!(
            integrate(d(2), PhasePoint::new(f64::NAN, 0.5), &o),
            Err(Error::NonFinite(_))
        ));
        let bad = IntegrateOptions::new(1.0, 2.0, 1e-10);
        assert!(integrate(d(2), PhasePoint::ORIGIN, &bad).is_err());
    }

    #[test]
    fn samples_increase_and_contain_zero() {
        let tr = run(3, 0.4, -0.3);
        assert!(tr.samples.windows(2).all(|w| w[0].t < w[1].t));
        let z = tr.samples[tr.zero_index()];
        assert_eq!((z.t, z.v), (0.0, 0.0));
        assert!(tr.samples.iter().all(|s| s.vt() > 0.0));
    }

    #[test]
    fn burns_simanca_axis_matches_closed_form() {
        let tr = run(2, 0.0, -0.5);
        let s = tr.state_at(1.0).unwrap();
        assert_eq!(s.x, 0.0);
        let exact = -1.0 / (1.0 + 1f64.exp());
        assert!((s.y - exact).abs() < 1e-9, "{} vs {}", s.y, exact);
        assert!((s.y - (-0.268941)).abs() < 1e-6);
    }

    #[test]
    fn region2_converges_to_origin() {
        let tr = run(2, 0.2, 0.2);
        assert_eq!(tr.forward_end, TerminationReason::ConvergedToOrigin);
        assert!(matches!(tr.backward_end, TerminationReason::FiniteTimeBlowup { .. }));
    }

    #[test]
    fn region4_has_blowup_and_line_asymptote() {
        let tr = run(2, 3.0, -3.5);
        let TerminationReason::FiniteTimeBlowup { time } = tr.backward_end else {
            panic!("backward end {:?}", tr.backward_end);
        };
        assert!(time < 0.0 && time.is_finite());
        let TerminationReason::AdmissibleLineAsymptote { w } = tr.forward_end else {
            panic!("forward end {:?}", tr.forward_end);
        };
        // (1 + w)^n = lambda w^(n-1), n - 1 < w < x0
        let lambda = 12.25 / 3.0;
        assert!(w > 1.0 && w < 3.0);
        assert!(((1.0 + w).powi(2) - lambda * w).abs() < 1e-9);
    }

    #[test]
    fn time_to_reach_trivial_and_errors() {
        let p = PhasePoint::new(0.5, -0.25);
        assert_eq!(time_to_reach(d(2), p, 0.5, Axis::X).unwrap(), 0.0);
        assert!(matches!(
            time_to_reach(d(2), p, -0.1, Axis::X),
            Err(Error::Unreachable { .. })
        ));
        // Region4 orbit cannot cross the admissible line
        let q = PhasePoint::new(3.0, -3.5);
        assert!(matches!(
            time_to_reach(d(2), q, 0.5, Axis::X),
            Err(Error::SingularIntegrand { .. })
        ));
        assert!(time_to_reach(d(2), PhasePoint::new(0.0, -0.5), 1.0, Axis::Y).is_err());
    }

    #[test]
    fn time_to_reach_matches_integrator() {
        let p = PhasePoint::new(0.5, -0.25);
        let tr = integrate(d(2), p, &IntegrateOptions::default()).unwrap();
        let s = tr.state_at(2.0).unwrap();
        let tx = time_to_reach(d(2), p, s.x, Axis::X).unwrap();
        let ty = time_to_reach(d(2), p, s.y, Axis::Y).unwrap();
        assert!((tx - 2.0).abs() < 1e-6, "{tx}");
        assert!((ty - 2.0).abs() < 1e-6, "{ty}");
    }

    #[test]
    fn blowup_time_agrees_with_quadrature() {
        let p = PhasePoint::new(3.0, -3.5);
        let tb = blowup_time(d(2), p).unwrap().unwrap();
        let tq = time_to_reach(d(2), p, f64::INFINITY, Axis::X).unwrap();
        assert!((tb - tq).abs() < 1e-5, "{tb} vs {tq}");
        assert!(blowup_time(d(2), PhasePoint::new(0.2, 0.2)).unwrap().is_some());
        assert_eq!(blowup_time(d(2), PhasePoint::new(0.0, -0.5)).unwrap(), None);
    }

    #[test]
    fn replayed_steps_hit_nodes_exactly() {
        let tr = run(2, 2.0, -2.5);
        for w in tr.samples.windows(2).take(50) {
            let mid = 0.5 * (w[0].t + w[1].t);
            let s = tr.state_at(mid).unwrap();
            assert!(s.vt() > 0.0);
        }
        let k = tr.zero_index() + 3;
        assert_eq!(tr.state_at(tr.samples[k].t).unwrap(), tr.samples[k]);
    }

    #[test]
    fn euclidean_orbit_stays_put() {
        let tr = run(2, 0.0, 0.0);
        assert_eq!(tr.forward_end, TerminationReason::ConvergedToOrigin);
        assert_eq!(tr.eval_span(), (f64::NEG_INFINITY, f64::INFINITY));
        let s = tr.state_at(-250.0).unwrap();
        assert_eq!((s.x, s.y), (0.0, 0.0));
        assert!((s.v + 250.0).abs() < 1e-12);
    }
}
