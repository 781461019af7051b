//! Invariant suite behind `sfkahler verify`.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ode::{integrate, time_to_reach, Axis, IntegrateOptions, TerminationReason};
use crate::penrose::{dichotomy_sweep, minimal_line_point, penrose_reduced, random_seeds};
use crate::phase::{level_value, tangency_point, Dimension, PhasePoint};
use crate::profile::{
    adm_mass, closed_form_profile, fyz_limit_check, profile_from_trajectory, ricci_defect, scalar_curvature,
    ClosedFormFamily, CoordinateMap, MetricProfile,
};
use crate::sphere::{
    ball_volume, find_minimal_spheres, mean_curvature, mean_curvature_phase, sphere_area, stability_identity_residual,
    Stability,
};

/// Outcome of one invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn line(&self) -> String {
        format!(
            "{} {} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Sample counts for the randomized checks.
#[derive(Debug, Clone, Copy)]
pub struct SuiteScale {
    pub seeds: usize,
    pub closed_forms: usize,
    pub identity_points: usize,
    pub sweep: usize,
    pub window_points: usize,
}

impl SuiteScale {
    pub fn full() -> Self {
        SuiteScale {
            seeds: 1000,
            closed_forms: 1000,
            identity_points: 1000,
            sweep: 10_000,
            window_points: 200,
        }
    }

    pub fn fast() -> Self {
        SuiteScale {
            seeds: 100,
            closed_forms: 200,
            identity_points: 200,
            sweep: 500,
            window_points: 50,
        }
    }
}

fn dim(n: u32) -> Dimension {
    Dimension::new(n).expect("n >= 2")
}

/// Admissible point drawn uniformly from `[-5, 5]^2` with slack above `1e-3`.
pub fn random_admissible(rng: &mut ChaCha8Rng) -> PhasePoint {
    loop {
        let p = PhasePoint::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        if p.slack() > 1e-3 {
            return p;
        }
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn euclidean_exactness() -> Check {
    let flat = closed_form_profile(ClosedFormFamily::new(dim(2), 2, 1.0, 0.0).expect("valid"));
    let t1 = (0.5f64).ln();
    let pi = std::f64::consts::PI;
    let mut worst: f64 = 0.0;
    worst = worst.max((sphere_area(&flat, t1).unwrap_or(f64::NAN) - 2.0 * pi * pi).abs());
    worst = worst.max((ball_volume(&flat, t1).unwrap_or(f64::NAN) - pi * pi / 2.0).abs());
    for i in 0..20 {
        let r = 0.25 + 0.25 * i as f64;
        let t = CoordinateMap::t_from_r(r).unwrap_or(f64::NAN);
        worst = worst.max((mean_curvature(&flat, t).unwrap_or(f64::NAN) + 1.0 / r).abs());
    }
    check(
        "euclidean_exactness",
        worst <= 1e-12,
        format!("max_abs_err={worst:.3e}"),
    )
}

struct SeedStats {
    drift: f64,
    scal: f64,
    ricci: f64,
    h_forms: f64,
}

fn trajectory_invariants(count: usize) -> (Check, Check, Check, Check) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let start = Instant::now();
    let mut st = SeedStats {
        drift: 0.0,
        scal: 0.0,
        ricci: 0.0,
        h_forms: 0.0,
    };
    let mut failures = 0usize;
    for _ in 0..count {
        let n = dim(rng.gen_range(2..=4));
        let p0 = random_admissible(&mut rng);
        let Ok(tr) = integrate(n, p0, &IntegrateOptions::default()) else {
            failures += 1;
            continue;
        };
        st.drift = st.drift.max(tr.level_drift());
        for s in &tr.samples {
            let scale = 1f64.max(s.x.abs()).max(s.y.abs());
            let j = crate::profile::Jet::from_state(n, s.t, s.x, s.y, s.v);
            if let Ok(d) = j.ricci_defect() {
                st.ricci = st.ricci.max((d - s.y).abs() / scale);
            }
        }
        let (lo, hi) = (tr.first().t, tr.last().t);
        let times: Vec<f64> = (0..20).map(|_| rng.gen_range(lo..hi)).collect();
        let profile = profile_from_trajectory(tr);
        for t in times {
            if let Ok(s) = scalar_curvature(&profile, t) {
                st.scal = st.scal.max(s.abs());
            }
            if let (Ok(a), Ok(b)) = (mean_curvature(&profile, t), mean_curvature_phase(&profile, t)) {
                st.h_forms = st.h_forms.max((a - b).abs() / 1f64.max(b.abs()));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    (
        check(
            "level_conservation",
            failures == 0 && st.drift <= 1e-8,
            format!("seeds={count} max_drift={:.3e} elapsed={elapsed:.1}s", st.drift),
        ),
        check(
            "scalar_flatness_trajectories",
            st.scal <= 1e-6,
            format!("max_abs={:.3e}", st.scal),
        ),
        check(
            "ricci_defect_identity",
            st.ricci <= 1e-12,
            format!("max_scaled_err={:.3e}", st.ricci),
        ),
        check(
            "mean_curvature_forms_agree",
            st.h_forms <= 1e-12,
            format!("max_rel_err={:.3e}", st.h_forms),
        ),
    )
}

fn closed_form_checks(count: usize) -> (Check, Check) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut scal: f64 = 0.0;
    let mut ricci_flat: f64 = 0.0;
    for _ in 0..count {
        let n = rng.gen_range(2..=6u32);
        let k = if rng.gen_bool(0.5) { n } else { n - 1 };
        let fam = ClosedFormFamily::new(dim(n), k, rng.gen_range(0.1..3.0), rng.gen_range(-0.9..3.0)).expect("valid");
        let t = fam.t_lower().max(-5.0) + rng.gen_range(0.05..8.0);
        let profile = closed_form_profile(fam);
        scal = scal.max(scalar_curvature(&profile, t).map(f64::abs).unwrap_or(f64::INFINITY));
        if k == n {
            ricci_flat = ricci_flat.max(ricci_defect(&profile, t).map(f64::abs).unwrap_or(f64::INFINITY));
        }
    }
    (
        check(
            "scalar_flatness_closed_forms",
            scal <= 1e-10,
            format!("evals={count} max_abs={scal:.3e}"),
        ),
        check(
            "ricci_flat_k_equals_n",
            ricci_flat <= 1e-12,
            format!("max_abs={ricci_flat:.3e}"),
        ),
    )
}

fn closed_form_equivalence(count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for i in 0..count {
        let n = rng.gen_range(2..=5u32);
        let k = if i % 2 == 0 { n - 1 } else { n };
        let b = rng.gen_range(-0.9..3.0);
        let fam = ClosedFormFamily::new(dim(n), k, 1.0, b).expect("valid");
        let Ok(p0) = fam.phase_point(0.0) else {
            return check("closed_form_equivalence", false, "bad seed".into());
        };
        let Ok(tr) = integrate(dim(n), p0, &IntegrateOptions::default()) else {
            return check(
                "closed_form_equivalence",
                false,
                format!("integration failed for n={n} B={b}"),
            );
        };
        let u0 = fam.u_t(0.0).unwrap_or(f64::NAN);
        for s in tr
            .samples
            .iter()
            .filter(|s| s.t > fam.t_lower() + 0.5 && s.t.abs() <= 10.0)
        {
            let (Ok(pc), Ok(uc)) = (fam.phase_point(s.t), fam.u_t(s.t)) else {
                continue;
            };
            let rel = |a: f64, c: f64| if c == 0.0 { a.abs() } else { (a - c).abs() / c.abs() };
            worst = worst
                .max(rel(s.x, pc.x))
                .max(rel(s.y, pc.y))
                .max(rel(s.v.exp(), uc / u0));
        }
    }
    check(
        "closed_form_equivalence",
        worst <= 1e-8,
        format!("families={count} max_rel_err={worst:.3e}"),
    )
}

/// Richardson-combined second difference with base step `h`.
pub fn second_difference<F: FnMut(f64) -> crate::Result<f64>>(mut f: F, t: f64, h: f64) -> crate::Result<f64> {
    let d2 = |a: f64, b: f64, c: f64, h: f64| (a - 2.0 * b + c) / (h * h);
    let mid = f(t)?;
    let coarse = d2(f(t - h)?, mid, f(t + h)?, h);
    let fine = d2(f(t - 0.5 * h)?, mid, f(t + 0.5 * h)?, 0.5 * h);
    Ok((4.0 * fine - coarse) / 3.0)
}

fn derivative_chain(count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = 1e-3;
    let mut worst: f64 = 0.0;
    let mut used = 0;
    let mut attempts = 0;
    while used < count && attempts < 50 * count {
        attempts += 1;
        let n = dim(rng.gen_range(2..=4));
        let p0 = random_admissible(&mut rng);
        let Ok(tr) = integrate(n, p0, &IntegrateOptions::default()) else {
            continue;
        };
        let (lo, hi) = (tr.first().t + 0.1, tr.last().t.min(10.0) - 0.1);
        if lo >= hi {
            continue;
        }
        let t = rng.gen_range(lo..hi);
        let profile = profile_from_trajectory(tr);
        let Ok(b) = profile.jet(t) else { continue };
        // below these scales the differences resolve only rounding noise
        if b.x.abs() + b.y.abs() < 1e-2 || b.vt < 1e-2 {
            continue;
        }
        let (Ok(fd_vtt), Ok(fd_vttt)) = (
            second_difference(|s| profile.v(s), t, h),
            second_difference(|s| profile.v_t(s), t, h),
        ) else {
            continue;
        };
        worst = worst
            .max((fd_vtt - b.vtt).abs() / b.vtt.abs())
            .max((fd_vttt - b.vttt).abs() / b.vttt.abs());
        used += 1;
    }
    check(
        "derivative_chain_fd",
        used == count && worst <= 1e-5,
        format!("points={used} max_rel_err={worst:.3e}"),
    )
}

fn minimal_spheres() -> Check {
    let run = |x: f64, y: f64| {
        integrate(dim(2), PhasePoint::new(x, y), &IntegrateOptions::default())
            .map(profile_from_trajectory)
            .and_then(|p| find_minimal_spheres(&p))
    };
    let ok = (|| -> crate::Result<bool> {
        let a = run(2.0, -2.5)?;
        let at_zero: Vec<_> = a.iter().filter(|s| s.t_star == 0.0).collect();
        let stable = a.iter().filter(|s| s.stability.is_stable()).count();
        let a_ok =
            at_zero.len() == 1 && at_zero[0].stability == Stability::Stable && at_zero[0].outermost && stable == 1;
        let b = run(9.0, -6.0)?;
        let b_ok = b.len() == 1 && b[0].stability == Stability::Unstable;
        let c_ok = run(0.0, -0.5)?.is_empty() && run(-0.5, 0.0)?.is_empty();
        Ok(a_ok && b_ok && c_ok)
    })();
    check("minimal_sphere_reproduction", ok == Ok(true), format!("{ok:?}"))
}

fn stability_identity(count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let n = dim(rng.gen_range(2..=8));
        let p = loop {
            let p = PhasePoint::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if p.slack() > 0.0 {
                break p;
            }
        };
        let v = rng.gen_range(-3.0..3.0);
        worst = worst.max(
            stability_identity_residual(n, p, v)
                .map(f64::abs)
                .unwrap_or(f64::INFINITY),
        );
    }
    check(
        "stability_identity",
        worst <= 1e-10,
        format!("points={count} max_abs={worst:.3e}"),
    )
}

fn mass_reproduction() -> Check {
    let mut worst: f64 = 0.0;
    for n in 2..=6u32 {
        for b in [0.25, 0.5, 1.0, 2.0] {
            let fam = ClosedFormFamily::burns_simanca(dim(n), b).expect("valid");
            let m = adm_mass(&closed_form_profile(fam))
                .map(|r| r.m_numeric)
                .unwrap_or(f64::NAN);
            let expect = b / (n as f64 - 1.0);
            worst = worst.max((m - expect).abs() / expect);
        }
    }
    let euclid = integrate(dim(3), PhasePoint::ORIGIN, &IntegrateOptions::default())
        .map(profile_from_trajectory)
        .and_then(|p| adm_mass(&p))
        .map(|r| r.m_numeric);
    check(
        "mass_reproduction",
        worst <= 1e-4 && euclid == Ok(0.0),
        format!("max_rel_err={worst:.3e} euclidean={euclid:?}"),
    )
}

fn penrose_gap(points: usize) -> Check {
    let mut worst: f64 = 0.0;
    let mut all_hold = true;
    for n in 2..=8u32 {
        let nf = n as f64;
        for i in 1..=points {
            let x0 = nf - 1.0 + nf * i as f64 / points as f64;
            let p = minimal_line_point(dim(n), x0);
            match penrose_reduced(dim(n), p.x, p.y) {
                Ok(r) => {
                    worst = worst.max((r.gap - nf / (nf - 1.0)).abs());
                    all_hold &= r.lhs >= r.rhs;
                }
                Err(_) => worst = f64::INFINITY,
            }
        }
    }
    check(
        "penrose_gap_identity",
        worst <= 1e-12 && all_hold,
        format!("max_abs_err={worst:.3e}"),
    )
}

fn dichotomy(count: usize) -> Check {
    let start = Instant::now();
    let Ok(seeds) = random_seeds(count, 10, &[2, 3, 4, 5]) else {
        return check("dichotomy", false, "seed generation failed".into());
    };
    let reports = dichotomy_sweep(&seeds);
    let errors = reports.iter().filter(|r| r.is_err()).count();
    let violations = reports
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .filter(|r| r.stable_sphere && r.divisor_present)
        .count();
    check(
        "dichotomy",
        errors == 0 && violations == 0,
        format!(
            "seeds={count} errors={errors} violations={violations} elapsed={:.1}s",
            start.elapsed().as_secs_f64()
        ),
    )
}

fn fyz_limit() -> Check {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        let tp = tangency_point(dim(n));
        match fyz_limit_check(dim(n)) {
            Ok(p) => worst = worst.max(((p.x - tp.x).powi(2) + (p.y - tp.y).powi(2)).sqrt()),
            Err(_) => worst = f64::INFINITY,
        }
    }
    check("fyz_limit", worst <= 1e-4, format!("max_dist={worst:.3e}"))
}

fn first_variation(count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < count {
        let (profile, t): (MetricProfile, f64) = if done % 2 == 0 {
            let n = dim(rng.gen_range(2..=4));
            let Ok(tr) = integrate(n, random_admissible(&mut rng), &IntegrateOptions::default()) else {
                continue;
            };
            let (lo, hi) = (tr.first().t + 0.05, tr.last().t.min(15.0) - 0.05);
            if lo >= hi {
                continue;
            }
            let t = rng.gen_range(lo..hi);
            (profile_from_trajectory(tr), t)
        } else {
            let n = rng.gen_range(2..=5u32);
            let k = if rng.gen_bool(0.5) { n } else { n - 1 };
            let fam =
                ClosedFormFamily::new(dim(n), k, rng.gen_range(0.5..2.0), rng.gen_range(-0.9..3.0)).expect("valid");
            let t = fam.t_lower().max(-4.0) + rng.gen_range(0.1..6.0);
            (closed_form_profile(fam), t)
        };
        let (Ok(a), Ok(b), Ok(area), Ok(hh), Ok(utt)) = (
            sphere_area(&profile, t - h),
            sphere_area(&profile, t + h),
            sphere_area(&profile, t),
            mean_curvature(&profile, t),
            profile.u_tt(t),
        ) else {
            continue;
        };
        let fd = (b - a) / (2.0 * h);
        let n = profile.n.as_f64();
        let formula = -(2.0 * n - 1.0) * hh * (utt / 2.0).sqrt() * area;
        worst = worst.max((fd - formula).abs() / formula.abs().max(1e-300));
        done += 1;
    }
    check(
        "first_variation",
        worst <= 1e-6,
        format!("pairs={count} max_rel_err={worst:.3e}"),
    )
}

fn quadrature_consistency(count: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    while used < count {
        let n = dim(rng.gen_range(2..=4));
        let p0 = random_admissible(&mut rng);
        if p0.x == 0.0 || p0.y == 0.0 || level_value(n, p0).is_err() {
            continue;
        }
        let Ok(tr) = integrate(n, p0, &IntegrateOptions::default()) else {
            continue;
        };
        let t = if matches!(tr.forward_end, TerminationReason::ConvergedToOrigin) {
            1.0
        } else {
            -0.05
        };
        let Ok(s) = tr.state_at(t) else { continue };
        if s.t < tr.first().t {
            continue;
        }
        if let Ok(tq) = time_to_reach(n, p0, s.x, Axis::X) {
            worst = worst.max((tq - t).abs());
            used += 1;
        } else {
            used += 1;
            worst = f64::INFINITY;
        }
    }
    check(
        "time_to_reach_consistency",
        worst <= 1e-6,
        format!("seeds={count} max_abs_err={worst:.3e}"),
    )
}

/// Runs every check in order.
pub fn run_suite(scale: SuiteScale) -> Vec<Check> {
    let (level, scal, ricci, hforms) = trajectory_invariants(scale.seeds);
    let (scal_cf, ricci_flat) = closed_form_checks(scale.closed_forms);
    vec![
        euclidean_exactness(),
        level,
        closed_form_equivalence(50),
        scal,
        scal_cf,
        ricci,
        ricci_flat,
        minimal_spheres(),
        stability_identity(scale.identity_points),
        mass_reproduction(),
        penrose_gap(scale.window_points),
        dichotomy(scale.sweep),
        fyz_limit(),
        first_variation(100),
        hforms,
        derivative_chain(scale.seeds.min(200)),
        quadrature_consistency(50),
    ]
}
