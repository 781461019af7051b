//! C ABI over the `sfkahler` crate.
//!
//! Every fallible function returns an [`SfkStatus`] and writes results through
//! out-pointers. The message of the most recent failure on the calling thread
//! is available from [`sfk_last_error_message`]. Trajectories and profiles are
//! opaque handles owned by the caller and released with their `_free` function.

// Pointer arguments follow the C contract documented in the header: null is
// rejected, anything else must point at valid storage.
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sfkahler::ode::{integrate, IntegrateOptions, Sample, TerminationReason, Trajectory};
use sfkahler::penrose::{dichotomy_report, minimal_sphere_volume, penrose_full, penrose_reduced};
use sfkahler::phase::{
    classify, lambda_critical, level_value, minimal_line_residual, vector_field, CriticalArc, Dimension, DomainKind,
    PhasePoint, RegionTag,
};
use sfkahler::profile::{adm_mass, closed_form_profile, profile_from_trajectory, ClosedFormFamily, MetricProfile};
use sfkahler::sphere::{find_minimal_spheres, mean_curvature, sphere_area, Stability};
use sfkahler::Error;

/// Status codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidDimension = 2,
    InvalidArgument = 3,
    NonFinite = 4,
    Inadmissible = 5,
    NotMinimal = 6,
    OutOfSpan = 7,
    OutsideStableWindow = 8,
    NoAsymptoticEnd = 9,
    NonConvergent = 10,
    /// Any other numerical failure; see the last error message.
    Numerical = 11,
    IndexOutOfRange = 12,
    Panic = 13,
}

impl From<&Error> for SfkStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidDimension(_) => SfkStatus::InvalidDimension,
            Error::InvalidArgument(_) => SfkStatus::InvalidArgument,
            Error::NonFinite(_) => SfkStatus::NonFinite,
            Error::Inadmissible { .. } => SfkStatus::Inadmissible,
            Error::NotMinimal { .. } => SfkStatus::NotMinimal,
            Error::OutOfSpan { .. } => SfkStatus::OutOfSpan,
            Error::OutsideStableWindow { .. } => SfkStatus::OutsideStableWindow,
            Error::NoAsymptoticEnd => SfkStatus::NoAsymptoticEnd,
            Error::NonConvergent(_) => SfkStatus::NonConvergent,
            _ => SfkStatus::Numerical,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Fail(SfkStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = SfkStatus::from(&e);
        set_error(e.to_string());
        Fail(status)
    }
}

fn fail(status: SfkStatus, msg: &str) -> Fail {
    set_error(msg.to_string());
    Fail(status)
}

/// Runs `f`, converting errors and panics into status codes.
fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> SfkStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SfkStatus::Ok,
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_error("internal panic".into());
            SfkStatus::Panic
        }
    }
}

fn out<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    // SAFETY: the caller guarantees a non-null pointer refers to writable storage for T.
    unsafe { p.as_mut() }.ok_or_else(|| fail(SfkStatus::NullPointer, "null output pointer"))
}

fn handle<'a, T>(p: *const T) -> Result<&'a T, Fail> {
    // SAFETY: non-null handles come from this library and are live until freed.
    unsafe { p.as_ref() }.ok_or_else(|| fail(SfkStatus::NullPointer, "null handle"))
}

fn dim(n: u32) -> Result<Dimension, Fail> {
    Ok(Dimension::new(n)?)
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

/// Tri-state boolean: -1 unknown, 0 false, 1 true.
fn tri(v: Option<bool>) -> i32 {
    v.map_or(-1, i32::from)
}

/// Copies the last error message into `buf` (NUL-terminated, truncated to `len`).
/// Returns the full message length excluding the terminator, or 0 when there is none.
#[no_mangle]
pub extern "C" fn sfk_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: buf has room for len bytes per the caller contract.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Static description of a status code; unknown codes map to "unknown status".
#[no_mangle]
pub extern "C" fn sfk_status_name(status: i32) -> *const c_char {
    let s: &'static [u8] = match status {
        0 => b"ok\0",
        1 => b"null pointer\0",
        2 => b"invalid dimension\0",
        3 => b"invalid argument\0",
        4 => b"non-finite input\0",
        5 => b"inadmissible\0",
        6 => b"seed not minimal\0",
        7 => b"outside profile span\0",
        8 => b"outside stable window\0",
        9 => b"no asymptotic end\0",
        10 => b"non-convergent\0",
        11 => b"numerical failure\0",
        12 => b"index out of range\0",
        13 => b"internal panic\0",
        _ => b"unknown status\0",
    };
    s.as_ptr().cast()
}

// ---- phase plane -------------------------------------------------------------

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfkRegion {
    Inadmissible = 0,
    EuclideanFixedPoint = 1,
    AxisX = 2,
    AxisY = 3,
    Region2AeExterior = 4,
    Region3CriticalLevel = 5,
    Region4FiniteTimeBlowup = 6,
    Region5CompletePunctured = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfkDomain {
    None = 0,
    Exterior = 1,
    AllOfCn = 2,
    PuncturedCn = 3,
    BoundedBoundary = 4,
}

/// Critical-level arc; `NotOnArc` off the critical level.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfkArc {
    NotOnArc = 0,
    Black = 1,
    Blue = 2,
    Yellow = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SfkClassification {
    pub region: SfkRegion,
    pub domain: SfkDomain,
    pub arc: SfkArc,
    pub divisor_possible: bool,
    pub complete_without_boundary: bool,
}

fn region(tag: RegionTag) -> SfkRegion {
    match tag {
        RegionTag::Inadmissible => SfkRegion::Inadmissible,
        RegionTag::EuclideanFixedPoint => SfkRegion::EuclideanFixedPoint,
        RegionTag::AxisX => SfkRegion::AxisX,
        RegionTag::AxisY => SfkRegion::AxisY,
        RegionTag::Region2AeExterior => SfkRegion::Region2AeExterior,
        RegionTag::Region3CriticalLevel => SfkRegion::Region3CriticalLevel,
        RegionTag::Region4FiniteTimeBlowup => SfkRegion::Region4FiniteTimeBlowup,
        RegionTag::Region5CompletePunctured => SfkRegion::Region5CompletePunctured,
    }
}

fn finite_point(x: f64, y: f64) -> Result<PhasePoint, Fail> {
    if !(x.is_finite() && y.is_finite()) {
        return Err(fail(SfkStatus::NonFinite, "non-finite phase point"));
    }
    Ok(PhasePoint::new(x, y))
}

#[no_mangle]
pub extern "C" fn sfk_classify(n: u32, x: f64, y: f64, result: *mut SfkClassification) -> SfkStatus {
    guard(|| {
        let label = classify(dim(n)?, finite_point(x, y)?);
        *out(result)? = SfkClassification {
            region: region(label.tag),
            domain: match label.domain {
                DomainKind::None => SfkDomain::None,
                DomainKind::Exterior => SfkDomain::Exterior,
                DomainKind::AllOfCn => SfkDomain::AllOfCn,
                DomainKind::PuncturedCn => SfkDomain::PuncturedCn,
                DomainKind::BoundedBoundary => SfkDomain::BoundedBoundary,
            },
            arc: match label.arc {
                None => SfkArc::NotOnArc,
                Some(CriticalArc::Black) => SfkArc::Black,
                Some(CriticalArc::Blue) => SfkArc::Blue,
                Some(CriticalArc::Yellow) => SfkArc::Yellow,
            },
            divisor_possible: label.divisor_possible,
            complete_without_boundary: label.complete_without_boundary,
        };
        Ok(())
    })
}

/// Level function value; `+inf` on the y axis.
#[no_mangle]
pub extern "C" fn sfk_level_value(n: u32, x: f64, y: f64, result: *mut f64) -> SfkStatus {
    guard(|| {
        *out(result)? = level_value(dim(n)?, finite_point(x, y)?)?.get();
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sfk_lambda_critical(n: u32, result: *mut f64) -> SfkStatus {
    guard(|| {
        *out(result)? = lambda_critical(dim(n)?);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sfk_vector_field(n: u32, x: f64, y: f64, dx: *mut f64, dy: *mut f64) -> SfkStatus {
    guard(|| {
        let (a, b) = vector_field(dim(n)?, finite_point(x, y)?);
        *out(dx)? = a;
        *out(dy)? = b;
        Ok(())
    })
}

/// `(n-1)x + ny + 2n-1`, zero on the minimal line.
#[no_mangle]
pub extern "C" fn sfk_minimal_line_residual(n: u32, x: f64, y: f64, result: *mut f64) -> SfkStatus {
    guard(|| {
        *out(result)? = minimal_line_residual(dim(n)?, finite_point(x, y)?);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sfk_minimal_sphere_volume(n: u32, x0: f64, result: *mut f64) -> SfkStatus {
    guard(|| {
        *out(result)? = minimal_sphere_volume(dim(n)?, x0)?;
        Ok(())
    })
}

// ---- Penrose -----------------------------------------------------------------

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SfkReducedPenrose {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

#[no_mangle]
pub extern "C" fn sfk_penrose_reduced(n: u32, x0: f64, y0: f64, result: *mut SfkReducedPenrose) -> SfkStatus {
    guard(|| {
        let r = penrose_reduced(dim(n)?, x0, y0)?;
        *out(result)? = SfkReducedPenrose {
            lhs: r.lhs,
            rhs: r.rhs,
            gap: r.gap,
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SfkFullPenrose {
    pub rhs: f64,
    pub holds: bool,
}

#[no_mangle]
pub extern "C" fn sfk_penrose_full(n: u32, mass: f64, volume: f64, result: *mut SfkFullPenrose) -> SfkStatus {
    guard(|| {
        let r = penrose_full(dim(n)?, mass, volume)?;
        *out(result)? = SfkFullPenrose {
            rhs: r.rhs,
            holds: r.holds,
        };
        Ok(())
    })
}

/// Dichotomy audit. Missing reals are NaN; tri-state flags use -1 for unknown.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SfkPenroseReport {
    pub region: SfkRegion,
    pub minimal_spheres: usize,
    pub stable_sphere: bool,
    pub x0: f64,
    pub y0: f64,
    pub v_sigma: f64,
    pub m_paper: f64,
    pub m_numeric: f64,
    pub reduced_lhs: f64,
    pub reduced_rhs: f64,
    pub gap: f64,
    pub full_rhs: f64,
    pub holds_reduced: i32,
    pub holds_full: i32,
    pub divisor_present: bool,
    pub dichotomy_ok: bool,
}

#[no_mangle]
pub extern "C" fn sfk_dichotomy_report(n: u32, x: f64, y: f64, result: *mut SfkPenroseReport) -> SfkStatus {
    guard(|| {
        let r = dichotomy_report(dim(n)?, finite_point(x, y)?)?;
        *out(result)? = SfkPenroseReport {
            region: region(r.region),
            minimal_spheres: r.minimal_spheres,
            stable_sphere: r.stable_sphere,
            x0: opt(r.x0),
            y0: opt(r.y0),
            v_sigma: opt(r.v_sigma),
            m_paper: opt(r.m_paper),
            m_numeric: opt(r.m_numeric),
            reduced_lhs: opt(r.reduced_lhs),
            reduced_rhs: opt(r.reduced_rhs),
            gap: opt(r.gap),
            full_rhs: opt(r.full_rhs),
            holds_reduced: tri(r.holds_reduced),
            holds_full: tri(r.holds_full),
            divisor_present: r.divisor_present,
            dichotomy_ok: r.dichotomy_ok,
        };
        Ok(())
    })
}

// ---- trajectories ------------------------------------------------------------

/// Opaque integrated orbit.
pub struct SfkTrajectory(Trajectory);

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SfkSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub v: f64,
}

impl From<&Sample> for SfkSample {
    fn from(s: &Sample) -> Self {
        SfkSample {
            t: s.t,
            x: s.x,
            y: s.y,
            v: s.v,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfkEndKind {
    ConvergedToOrigin = 0,
    AdmissibleLineAsymptote = 1,
    FiniteTimeBlowup = 2,
    MaxTimeReached = 3,
    StepSizeUnderflow = 4,
}

/// How one direction of an orbit ended. `value` is the limit `w` on the
/// admissible line, the blowup time, or NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SfkEnd {
    pub kind: SfkEndKind,
    pub value: f64,
}

fn end(r: &TerminationReason) -> SfkEnd {
    match *r {
        TerminationReason::ConvergedToOrigin => SfkEnd {
            kind: SfkEndKind::ConvergedToOrigin,
            value: f64::NAN,
        },
        TerminationReason::AdmissibleLineAsymptote { w } => SfkEnd {
            kind: SfkEndKind::AdmissibleLineAsymptote,
            value: w,
        },
        TerminationReason::FiniteTimeBlowup { time } => SfkEnd {
            kind: SfkEndKind::FiniteTimeBlowup,
            value: time,
        },
        TerminationReason::MaxTimeReached => SfkEnd {
            kind: SfkEndKind::MaxTimeReached,
            value: f64::NAN,
        },
        TerminationReason::StepSizeUnderflow => SfkEnd {
            kind: SfkEndKind::StepSizeUnderflow,
            value: f64::NAN,
        },
    }
}

/// Integrates both directions from `(x, y)` at `t = 0`. Pass `tol <= 0` for the default.
#[no_mangle]
pub extern "C" fn sfk_trajectory_integrate(
    n: u32,
    x: f64,
    y: f64,
    t_min: f64,
    t_max: f64,
    tol: f64,
    result: *mut *mut SfkTrajectory,
) -> SfkStatus {
    guard(|| {
        let slot = out(result)?;
        *slot = ptr::null_mut();
        let tol = if tol > 0.0 { tol } else { sfkahler::ode::DEFAULT_TOL };
        let tr = integrate(dim(n)?, finite_point(x, y)?, &IntegrateOptions::new(t_min, t_max, tol))?;
        *slot = Box::into_raw(Box::new(SfkTrajectory(tr)));
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a handle from `sfk_trajectory_integrate` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sfk_trajectory_free(traj: *mut SfkTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of stored samples, 0 for a null handle.
#[no_mangle]
pub extern "C" fn sfk_trajectory_len(traj: *const SfkTrajectory) -> usize {
    // SAFETY: see `handle`.
    unsafe { traj.as_ref() }.map_or(0, |t| t.0.samples.len())
}

#[no_mangle]
pub extern "C" fn sfk_trajectory_sample(traj: *const SfkTrajectory, index: usize, result: *mut SfkSample) -> SfkStatus {
    guard(|| {
        let tr = &handle(traj)?.0;
        let s = tr
            .samples
            .get(index)
            .ok_or_else(|| fail(SfkStatus::IndexOutOfRange, "sample index out of range"))?;
        *out(result)? = s.into();
        Ok(())
    })
}

/// Dense-output state at time `t`.
#[no_mangle]
pub extern "C" fn sfk_trajectory_state_at(traj: *const SfkTrajectory, t: f64, result: *mut SfkSample) -> SfkStatus {
    guard(|| {
        let s = handle(traj)?.0.state_at(t)?;
        *out(result)? = (&s).into();
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sfk_trajectory_ends(
    traj: *const SfkTrajectory,
    forward: *mut SfkEnd,
    backward: *mut SfkEnd,
) -> SfkStatus {
    guard(|| {
        let tr = &handle(traj)?.0;
        *out(forward)? = end(&tr.forward_end);
        *out(backward)? = end(&tr.backward_end);
        Ok(())
    })
}

/// Largest relative drift of the level function over the stored samples.
#[no_mangle]
pub extern "C" fn sfk_trajectory_level_drift(traj: *const SfkTrajectory, result: *mut f64) -> SfkStatus {
    guard(|| {
        *out(result)? = handle(traj)?.0.level_drift();
        Ok(())
    })
}

// ---- metric profiles ---------------------------------------------------------

/// Opaque Kähler potential profile.
pub struct SfkProfile(MetricProfile);

/// Builds a profile from a copy of the trajectory; the trajectory handle stays valid.
#[no_mangle]
pub extern "C" fn sfk_profile_from_trajectory(traj: *const SfkTrajectory, result: *mut *mut SfkProfile) -> SfkStatus {
    guard(|| {
        let slot = out(result)?;
        *slot = ptr::null_mut();
        let p = profile_from_trajectory(handle(traj)?.0.clone());
        *slot = Box::into_raw(Box::new(SfkProfile(p)));
        Ok(())
    })
}

/// Closed-form axis family `u_t = A e^t (1 + B e^{-kt})^{1/k}` with `k` in `{n-1, n}`.
#[no_mangle]
pub extern "C" fn sfk_profile_closed_form(n: u32, k: u32, a: f64, b: f64, result: *mut *mut SfkProfile) -> SfkStatus {
    guard(|| {
        let slot = out(result)?;
        *slot = ptr::null_mut();
        let fam = ClosedFormFamily::new(dim(n)?, k, a, b)?;
        *slot = Box::into_raw(Box::new(SfkProfile(closed_form_profile(fam))));
        Ok(())
    })
}

/// # Safety
/// `profile` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn sfk_profile_free(profile: *mut SfkProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Scalar curvature at `t`; zero up to rounding for every valid profile.
#[no_mangle]
pub extern "C" fn sfk_profile_scalar_curvature(profile: *const SfkProfile, t: f64, result: *mut f64) -> SfkStatus {
    guard(|| {
        *out(result)? = sfkahler::profile::scalar_curvature(&handle(profile)?.0, t)?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sfk_profile_mean_curvature(profile: *const SfkProfile, t: f64, result: *mut f64) -> SfkStatus {
    guard(|| {
        *out(result)? = mean_curvature(&handle(profile)?.0, t)?;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn sfk_profile_sphere_area(profile: *const SfkProfile, t: f64, result: *mut f64) -> SfkStatus {
    guard(|| {
        *out(result)? = sphere_area(&handle(profile)?.0, t)?;
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SfkMass {
    pub m_numeric: f64,
    /// NaN when no closed-form value applies.
    pub m_paper: f64,
    pub below_decay_threshold: bool,
}

#[no_mangle]
pub extern "C" fn sfk_profile_adm_mass(profile: *const SfkProfile, result: *mut SfkMass) -> SfkStatus {
    guard(|| {
        let m = adm_mass(&handle(profile)?.0)?;
        *out(result)? = SfkMass {
            m_numeric: m.m_numeric,
            m_paper: opt(m.m_paper),
            below_decay_threshold: m.below_decay_threshold,
        };
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SfkStability {
    Stable = 0,
    WeaklyStable = 1,
    Unstable = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SfkSphere {
    pub t_star: f64,
    pub x: f64,
    pub y: f64,
    pub stability: SfkStability,
    pub area: f64,
    pub outermost: bool,
    pub residual: f64,
}

/// Writes up to `capacity` minimal spheres into `spheres` (ordered by `t`) and
/// the total number found into `count`. `spheres` may be null when `capacity` is 0.
#[no_mangle]
pub extern "C" fn sfk_profile_minimal_spheres(
    profile: *const SfkProfile,
    spheres: *mut SfkSphere,
    capacity: usize,
    count: *mut usize,
) -> SfkStatus {
    guard(|| {
        let found = find_minimal_spheres(&handle(profile)?.0)?;
        let count = out(count)?;
        *count = found.len();
        if capacity == 0 {
            return Ok(());
        }
        if spheres.is_null() {
            return Err(fail(SfkStatus::NullPointer, "null sphere buffer"));
        }
        for (i, s) in found.iter().take(capacity).enumerate() {
            // SAFETY: the buffer holds `capacity` elements per the caller contract.
            unsafe {
                spheres.add(i).write(SfkSphere {
                    t_star: s.t_star,
                    x: s.phase_point.x,
                    y: s.phase_point.y,
                    stability: match s.stability {
                        Stability::Stable => SfkStability::Stable,
                        Stability::WeaklyStable => SfkStability::WeaklyStable,
                        Stability::Unstable => SfkStability::Unstable,
                    },
                    area: s.area,
                    outermost: s.outermost,
                    residual: s.residual,
                });
            }
        }
        Ok(())
    })
}
