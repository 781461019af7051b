use proptest::prelude::*;

use sfkahler::ode::{integrate, IntegrateOptions};
use sfkahler::penrose::{minimal_line_point, penrose_reduced};
use sfkahler::phase::{classify, level_value, minimal_line_residual, vector_field, Dimension, PhasePoint, RegionTag};
use sfkahler::profile::{closed_form_profile, profile_from_trajectory, ClosedFormFamily, Jet};
use sfkahler::sphere::{mean_curvature, mean_curvature_phase, stability_identity_residual};

fn admissible() -> impl Strategy<Value = (u32, PhasePoint)> {
    (2u32..=5, -4.0f64..4.0, -4.0f64..4.0)
        .prop_filter("admissible", |(_, x, y)| 1.0 + x + y > 1e-2)
        .prop_map(|(n, x, y)| (n, PhasePoint::new(x, y)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn level_is_conserved((n, p) in admissible()) {
        let n = Dimension::new(n).unwrap();
        let tr = integrate(n, p, &IntegrateOptions::new(-20.0, 20.0, 1e-10)).unwrap();
        prop_assert!(tr.level_drift() <= 1e-8);
    }

    #[test]
    fn level_derivative_vanishes((n, p) in admissible()) {
        prop_assume!(p.x.abs() > 1e-3 && p.y.abs() > 1e-3);
        let dim = Dimension::new(n).unwrap();
        let nf = n as f64;
        let (dx, dy) = vector_field(dim, p);
        // d/dt log F = (1-n) x'/x + n y'/y
        let dlog = (1.0 - nf) * dx / p.x + nf * dy / p.y;
        prop_assert!(dlog.abs() <= 1e-12 * (1.0 + dx.abs() / p.x.abs() + dy.abs() / p.y.abs()) * nf);
    }

    #[test]
    fn mean_curvature_forms_agree((n, p) in admissible(), t in -1.0f64..1.0) {
        let dim = Dimension::new(n).unwrap();
        let tr = integrate(dim, p, &IntegrateOptions::default()).unwrap();
        let (lo, hi) = tr.eval_span();
        prop_assume!(t > lo && t < hi);
        let profile = profile_from_trajectory(tr);
        let a = mean_curvature(&profile, t).unwrap();
        let b = mean_curvature_phase(&profile, t).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
    }

    #[test]
    fn minimal_line_points_have_zero_curvature(n in 2u32..=6, dx in 0.01f64..10.0) {
        let dim = Dimension::new(n).unwrap();
        let p = minimal_line_point(dim, n as f64 - 1.0 + dx);
        prop_assert!(minimal_line_residual(dim, p).abs() <= 1e-12 * (1.0 + p.x.abs()));
        let j = Jet::from_state(dim, 0.0, p.x, p.y, 0.0);
        prop_assert!(sfkahler::sphere::mean_curvature_of(&j).unwrap().abs() <= 1e-12 * (1.0 + p.x.abs()));
    }

    #[test]
    fn stability_identity_holds((n, p) in admissible(), v in -3.0f64..3.0) {
        let r = stability_identity_residual(Dimension::new(n).unwrap(), p, v).unwrap();
        prop_assert!(r.abs() <= 1e-10 * (1.0 + p.x.abs() + p.y.abs()).powi(3));
    }

    #[test]
    fn penrose_gap_is_constant(n in 2u32..=10, frac in 0.001f64..1.0) {
        let dim = Dimension::new(n).unwrap();
        let nf = n as f64;
        let p = minimal_line_point(dim, nf - 1.0 + nf * frac);
        let r = penrose_reduced(dim, p.x, p.y).unwrap();
        prop_assert!((r.gap - nf / (nf - 1.0)).abs() <= 1e-12);
        prop_assert!(r.lhs > r.rhs);
    }

    #[test]
    fn classification_is_total(n in 2u32..=6, x in -10.0f64..10.0, y in -10.0f64..10.0) {
        let dim = Dimension::new(n).unwrap();
        let p = PhasePoint::new(x, y);
        let label = classify(dim, p);
        prop_assert_eq!(label.tag == RegionTag::Inadmissible, 1.0 + x + y <= 0.0);
        prop_assert_eq!(label.arc.is_some(), label.tag == RegionTag::Region3CriticalLevel);
    }

    #[test]
    fn level_is_scale_covariant(n in 2u32..=6, x in 0.1f64..5.0, y in 0.1f64..5.0, c in 0.1f64..10.0) {
        let dim = Dimension::new(n).unwrap();
        let a = level_value(dim, PhasePoint::new(x, y)).unwrap().get();
        let b = level_value(dim, PhasePoint::new(c * x, c * y)).unwrap().get();
        prop_assert!((b / (c * a) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn closed_forms_are_scalar_flat(n in 2u32..=6, ricci_flat in any::<bool>(), a in 0.1f64..3.0, b in -0.9f64..3.0, dt in 0.05f64..8.0) {
        let dim = Dimension::new(n).unwrap();
        let k = if ricci_flat { n } else { n - 1 };
        let fam = ClosedFormFamily::new(dim, k, a, b).unwrap();
        let t = fam.t_lower().max(-5.0) + dt;
        let profile = closed_form_profile(fam);
        prop_assert!(sfkahler::profile::scalar_curvature(&profile, t).unwrap().abs() <= 1e-10);
        if ricci_flat {
            prop_assert!(sfkahler::profile::ricci_defect(&profile, t).unwrap().abs() <= 1e-12);
        }
    }
}
