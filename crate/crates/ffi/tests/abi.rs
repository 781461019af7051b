use std::ffi::{c_char, CStr};
use std::ptr;

use sfkahler_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    let len = sfk_last_error_message(buf.as_mut_ptr(), buf.len());
    assert!(len > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_functions() {
    let mut v = 0.0;
    assert_eq!(sfk_lambda_critical(2, &mut v), SfkStatus::Ok);
    assert_eq!(v, 4.0);
    assert_eq!(sfk_level_value(2, 2.0, -2.5, &mut v), SfkStatus::Ok);
    assert!((v - 3.125).abs() < 1e-15);
    assert_eq!(sfk_minimal_line_residual(2, 2.0, -2.5, &mut v), SfkStatus::Ok);
    assert_eq!(v, 0.0);
    let (mut dx, mut dy) = (0.0, 0.0);
    assert_eq!(sfk_vector_field(2, 1.0, 1.0, &mut dx, &mut dy), SfkStatus::Ok);
    assert_eq!((dx, dy), (-6.0, -3.0));
    let mut c = SfkClassification {
        region: SfkRegion::Inadmissible,
        domain: SfkDomain::None,
        arc: SfkArc::NotOnArc,
        divisor_possible: false,
        complete_without_boundary: false,
    };
    assert_eq!(sfk_classify(2, 0.0, -0.5, &mut c), SfkStatus::Ok);
    assert_eq!(c.region, SfkRegion::AxisY);
    assert!(c.divisor_possible);
}

#[test]
fn error_codes_and_messages() {
    let mut v = 0.0;
    assert_eq!(sfk_lambda_critical(1, &mut v), SfkStatus::InvalidDimension);
    assert!(last_error().contains("n >= 2"));
    assert_eq!(sfk_lambda_critical(2, ptr::null_mut()), SfkStatus::NullPointer);
    assert_eq!(sfk_level_value(2, f64::NAN, 0.0, &mut v), SfkStatus::NonFinite);
    let mut r = SfkReducedPenrose {
        lhs: 0.0,
        rhs: 0.0,
        gap: 0.0,
    };
    assert_eq!(sfk_penrose_reduced(2, 1.0, 1.0, &mut r), SfkStatus::NotMinimal);
    assert!(last_error().starts_with("seed not minimal"));
    assert_eq!(sfk_lambda_critical(2, &mut v), SfkStatus::Ok);
    assert_eq!(sfk_last_error_message(ptr::null_mut(), 0), 0);
    let name = unsafe { CStr::from_ptr(sfk_status_name(SfkStatus::Inadmissible as i32)) };
    assert_eq!(name.to_str().unwrap(), "inadmissible");
    let name = unsafe { CStr::from_ptr(sfk_status_name(99)) };
    assert_eq!(name.to_str().unwrap(), "unknown status");
}

#[test]
fn truncated_error_buffer() {
    let mut v = 0.0;
    assert_eq!(sfk_lambda_critical(0, &mut v), SfkStatus::InvalidDimension);
    let mut buf = [1 as c_char; 5];
    let full = sfk_last_error_message(buf.as_mut_ptr(), buf.len());
    assert!(full > 4);
    assert_eq!(buf[4], 0);
}

#[test]
fn trajectory_handle_lifecycle() {
    let mut traj: *mut SfkTrajectory = ptr::null_mut();
    assert_eq!(
        sfk_trajectory_integrate(2, 2.0, -2.5, -100.0, 100.0, 0.0, &mut traj),
        SfkStatus::Ok
    );
    assert!(!traj.is_null());
    let len = sfk_trajectory_len(traj);
    assert!(len > 10);
    let mut s = SfkSample {
        t: 0.0,
        x: 0.0,
        y: 0.0,
        v: 0.0,
    };
    assert_eq!(sfk_trajectory_sample(traj, len, &mut s), SfkStatus::IndexOutOfRange);
    assert_eq!(sfk_trajectory_state_at(traj, 0.0, &mut s), SfkStatus::Ok);
    assert_eq!((s.x, s.y, s.v), (2.0, -2.5, 0.0));
    let mut fwd = SfkEnd {
        kind: SfkEndKind::MaxTimeReached,
        value: 0.0,
    };
    let mut bwd = fwd;
    assert_eq!(sfk_trajectory_ends(traj, &mut fwd, &mut bwd), SfkStatus::Ok);
    assert_eq!(fwd.kind, SfkEndKind::ConvergedToOrigin);
    assert_eq!(bwd.kind, SfkEndKind::FiniteTimeBlowup);
    assert!(bwd.value < 0.0);
    let mut drift = 1.0;
    assert_eq!(sfk_trajectory_level_drift(traj, &mut drift), SfkStatus::Ok);
    assert!(drift < 1e-8);

    let mut profile: *mut SfkProfile = ptr::null_mut();
    assert_eq!(sfk_profile_from_trajectory(traj, &mut profile), SfkStatus::Ok);
    unsafe { sfk_trajectory_free(traj) };

    let mut count = 0usize;
    assert_eq!(
        sfk_profile_minimal_spheres(profile, ptr::null_mut(), 0, &mut count),
        SfkStatus::Ok
    );
    assert_eq!(count, 2);
    let mut buf = [SfkSphere {
        t_star: 0.0,
        x: 0.0,
        y: 0.0,
        stability: SfkStability::Unstable,
        area: 0.0,
        outermost: false,
        residual: 0.0,
    }; 2];
    assert_eq!(
        sfk_profile_minimal_spheres(profile, buf.as_mut_ptr(), 2, &mut count),
        SfkStatus::Ok
    );
    assert_eq!(buf[1].t_star, 0.0);
    assert_eq!(buf[1].stability, SfkStability::Stable);
    assert!(buf[1].outermost);

    let mut m = SfkMass {
        m_numeric: 0.0,
        m_paper: 0.0,
        below_decay_threshold: true,
    };
    assert_eq!(sfk_profile_adm_mass(profile, &mut m), SfkStatus::Ok);
    assert_eq!(m.m_paper, 2.5);
    let mut h = 1.0;
    assert_eq!(sfk_profile_mean_curvature(profile, 0.0, &mut h), SfkStatus::Ok);
    assert!(h.abs() < 1e-12);
    assert_eq!(
        sfk_profile_scalar_curvature(profile, -5.0, &mut h),
        SfkStatus::OutOfSpan
    );
    unsafe {
        sfk_profile_free(profile);
        sfk_profile_free(ptr::null_mut());
        sfk_trajectory_free(ptr::null_mut());
    }
}

#[test]
fn inadmissible_seed_leaves_null_handle() {
    let mut traj: *mut SfkTrajectory = ptr::null_mut();
    assert_eq!(
        sfk_trajectory_integrate(2, -2.0, 0.5, -10.0, 10.0, 1e-10, &mut traj),
        SfkStatus::Inadmissible
    );
    assert!(traj.is_null());
    assert_eq!(sfk_trajectory_len(traj), 0);
}

#[test]
fn closed_form_profile_and_penrose() {
    let mut p: *mut SfkProfile = ptr::null_mut();
    assert_eq!(sfk_profile_closed_form(2, 1, 1.0, 1.0, &mut p), SfkStatus::Ok);
    let mut m = SfkMass {
        m_numeric: 0.0,
        m_paper: 0.0,
        below_decay_threshold: true,
    };
    assert_eq!(sfk_profile_adm_mass(p, &mut m), SfkStatus::Ok);
    assert!((m.m_numeric - 1.0).abs() < 1e-6);
    unsafe { sfk_profile_free(p) };
    assert_eq!(
        sfk_profile_closed_form(2, 5, 1.0, 1.0, &mut p),
        SfkStatus::InvalidArgument
    );

    let mut r = SfkReducedPenrose {
        lhs: 0.0,
        rhs: 0.0,
        gap: 0.0,
    };
    assert_eq!(sfk_penrose_reduced(3, 3.0, -11.0 / 3.0, &mut r), SfkStatus::Ok);
    assert!((r.gap - 1.5).abs() < 1e-12);

    let mut rep = std::mem::MaybeUninit::<SfkPenroseReport>::uninit();
    assert_eq!(sfk_dichotomy_report(2, 2.0, -2.5, rep.as_mut_ptr()), SfkStatus::Ok);
    let rep = unsafe { rep.assume_init() };
    assert!(rep.stable_sphere);
    assert_eq!(rep.holds_reduced, 1);
    assert!(rep.dichotomy_ok);
    let mut vol = 0.0;
    assert_eq!(
        sfk_minimal_sphere_volume(2, 10.0, &mut vol),
        SfkStatus::OutsideStableWindow
    );
}

#[test]
fn header_declares_the_abi() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/sfkahler.h")).unwrap();
    for decl in [
        "typedef struct SfkTrajectory SfkTrajectory;",
        "typedef struct SfkProfile SfkProfile;",
        "SFK_STATUS_OK = 0",
        "sfk_trajectory_integrate(",
        "void sfk_profile_free(",
        "sfk_last_error_message(",
    ] {
        assert!(header.contains(decl), "missing {decl}");
    }
}
