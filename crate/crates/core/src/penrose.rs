//! Penrose-type inequalities at stable minimal spheres and the
//! divisor/minimal-sphere dichotomy.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{integrate, IntegrateOptions};
use crate::phase::{classify, minimal_line_residual, Dimension, PhasePoint, RegionTag};
use crate::profile::{adm_mass, profile_from_trajectory};
use crate::sphere::{area_constant, find_minimal_spheres, SphereReport};

/// Tolerance on the minimal-line residual accepted by [`penrose_reduced`].
pub const MINIMAL_LINE_TOL: f64 = 1e-9;

/// Volume of the unit `(2n - 1)`-sphere, `2 pi^n / (n - 1)!`.
pub fn unit_sphere_volume(n: Dimension) -> f64 {
    let fact: f64 = (1..n.get()).map(f64::from).product();
    2.0 * PI.powi(n.get() as i32) / fact
}

fn check_window(n: Dimension, x0: f64) -> Result<()> {
    let nf = n.as_f64();
    let (lo, hi) = (nf - 1.0, 2.0 * nf - 1.0);
    if !x0.is_finite() {
        return Err(Error::NonFinite("x0"));
    }
    if !(x0 > lo && x0 <= hi + crate::sphere::WEAK_STABILITY_TOL) {
        return Err(Error::OutsideStableWindow { x0, lo, hi });
    }
    Ok(())
}

/// Volume of the stable minimal sphere with abscissa `x0`, normalized so that `u_t = 1` on it.
pub fn minimal_sphere_volume(n: Dimension, x0: f64) -> Result<f64> {
    check_window(n, x0)?;
    let nf = n.as_f64();
    Ok(area_constant(n) * (2.0 * (x0 - nf + 1.0) / nf).sqrt())
}

/// Point of the minimal line with abscissa `x0`.
pub fn minimal_line_point(n: Dimension, x0: f64) -> PhasePoint {
    let nf = n.as_f64();
    PhasePoint::new(x0, -((nf - 1.0) * x0 + 2.0 * nf - 1.0) / nf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedPenrose {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// `-y0 / (n - 1) >= 1 + x0 + y0` at a point of the minimal line.
pub fn penrose_reduced(n: Dimension, x0: f64, y0: f64) -> Result<ReducedPenrose> {
    let p = PhasePoint::new(x0, y0);
    p.check_admissible()?;
    let residual = minimal_line_residual(n, p);
    if residual.abs() > MINIMAL_LINE_TOL {
        return Err(Error::NotMinimal { residual });
    }
    let lhs = -y0 / (n.as_f64() - 1.0);
    let rhs = p.slack();
    Ok(ReducedPenrose {
        lhs,
        rhs,
        gap: lhs - rhs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullPenrose {
    pub rhs: f64,
    pub holds: bool,
}

/// `m >= (1/2) (V / V_E)^{(2n-2)/(2n-1)}` with `V_E` the unit-sphere volume.
pub fn penrose_full(n: Dimension, m: f64, v: f64) -> Result<FullPenrose> {
    if !m.is_finite() || !v.is_finite() {
        return Err(Error::NonFinite("mass or volume"));
    }
    if v <= 0.0 {
        return Err(Error::NonPositiveVolume(v));
    }
    let nf = n.as_f64();
    let rhs = 0.5 * (v / unit_sphere_volume(n)).powf((2.0 * nf - 2.0) / (2.0 * nf - 1.0));
    Ok(FullPenrose { rhs, holds: m >= rhs })
}

/// Audit of one seed: classification, stable minimal sphere, mass and both inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenroseReport {
    pub n: Dimension,
    pub seed: PhasePoint,
    pub region: RegionTag,
    pub minimal_spheres: usize,
    pub stable_sphere: bool,
    /// Abscissa of the outermost stable minimal sphere (normalized to `t = 0` there).
    pub x0: Option<f64>,
    pub y0: Option<f64>,
    pub v_sigma: Option<f64>,
    pub m_paper: Option<f64>,
    /// Limit-definition mass in the same normalization, when the AE end resolves.
    pub m_numeric: Option<f64>,
    pub reduced_lhs: Option<f64>,
    pub reduced_rhs: Option<f64>,
    pub gap: Option<f64>,
    pub full_rhs: Option<f64>,
    pub holds_reduced: Option<bool>,
    pub holds_full: Option<bool>,
    pub divisor_present: bool,
    pub dichotomy_ok: bool,
}

fn outermost_stable(spheres: &[SphereReport]) -> Option<&SphereReport> {
    spheres
        .iter()
        .filter(|s| s.stability.is_stable())
        .max_by(|a, b| a.t_star.total_cmp(&b.t_star))
}

pub fn dichotomy_report(n: Dimension, seed: PhasePoint) -> Result<PenroseReport> {
    dichotomy_report_with(n, seed, &IntegrateOptions::default())
}

pub fn dichotomy_report_with(n: Dimension, seed: PhasePoint, opts: &IntegrateOptions) -> Result<PenroseReport> {
    seed.check_admissible()?;
    let label = classify(n, seed);
    let divisor_present = matches!(label.tag, RegionTag::AxisX | RegionTag::AxisY) && label.divisor_possible;
    let profile = profile_from_trajectory(integrate(n, seed, opts)?);
    let spheres = find_minimal_spheres(&profile)?;
    let stable = outermost_stable(&spheres);
    let nf = n.as_f64();

    let mut report = PenroseReport {
        n,
        seed,
        region: label.tag,
        minimal_spheres: spheres.len(),
        stable_sphere: stable.is_some(),
        x0: None,
        y0: None,
        v_sigma: None,
        m_paper: None,
        m_numeric: None,
        reduced_lhs: None,
        reduced_rhs: None,
        gap: None,
        full_rhs: None,
        holds_reduced: None,
        holds_full: None,
        divisor_present,
        dichotomy_ok: !(stable.is_some() && divisor_present),
    };
    if let Some(s) = stable {
        let (x0, y0) = (s.phase_point.x, s.phase_point.y);
        let m_paper = -y0 / (nf - 1.0);
        let v_sigma = minimal_sphere_volume(n, x0)?;
        let reduced = penrose_reduced(n, x0, y0)?;
        let full = penrose_full(n, m_paper, v_sigma)?;
        // Renormalize t -> t - t_star, v -> v - v(t_star).
        let m_numeric = adm_mass(&profile).ok().and_then(|m| {
            let v_star = profile.v(s.t_star).ok()?;
            Some(m.m_numeric * (-(nf - 2.0) * s.t_star - v_star).exp())
        });
        report.x0 = Some(x0);
        report.y0 = Some(y0);
        report.v_sigma = Some(v_sigma);
        report.m_paper = Some(m_paper);
        report.m_numeric = m_numeric;
        report.reduced_lhs = Some(reduced.lhs);
        report.reduced_rhs = Some(reduced.rhs);
        report.gap = Some(reduced.gap);
        report.full_rhs = Some(full.rhs);
        report.holds_reduced = Some(reduced.lhs >= reduced.rhs);
        report.holds_full = Some(full.holds);
    }
    Ok(report)
}

/// Reports for many seeds, computed in parallel, returned in input order.
pub fn dichotomy_sweep(seeds: &[(Dimension, PhasePoint)]) -> Vec<Result<PenroseReport>> {
    seeds.par_iter().map(|&(n, p)| dichotomy_report(n, p)).collect()
}

/// Deterministic admissible seeds mixing the axes, the stable window and a box.
pub fn random_seeds(count: usize, rng_seed: u64, dims: &[u32]) -> Result<Vec<(Dimension, PhasePoint)>> {
    if dims.is_empty() {
        return Err(Error::InvalidArgument("no dimensions given".into()));
    }
    let dims = dims.iter().map(|&n| Dimension::new(n)).collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = dims[rng.gen_range(0..dims.len())];
        let nf = n.as_f64();
        let p = match out.len() % 4 {
            0 => {
                let c: f64 = rng.gen_range(-0.95..3.0);
                if rng.gen_bool(0.5) {
                    PhasePoint::new(0.0, c)
                } else {
                    PhasePoint::new(c, 0.0)
                }
            }
            1 => minimal_line_point(n, rng.gen_range(nf - 1.0..=2.0 * nf - 1.0)),
            _ => PhasePoint::new(rng.gen_range(-6.0..4.0 * nf), rng.gen_range(-4.0 * nf..6.0)),
        };
        if p.is_admissible() && p.slack() > 1e-6 {
            out.push((n, p));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn volume_examples() {
        assert!((minimal_sphere_volume(d(2), 2.0).unwrap() - 4.0 * PI * PI).abs() < 1e-12);
        assert!(minimal_sphere_volume(d(2), 1.0 + 1e-14).unwrap() < 1e-5);
        assert!(matches!(
            minimal_sphere_volume(d(2), 3.5),
            Err(Error::OutsideStableWindow { .. })
        ));
        assert!((unit_sphere_volume(d(2)) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn reduced_examples() {
        let r = penrose_reduced(d(2), 2.0, -2.5).unwrap();
        assert_eq!((r.lhs, r.rhs, r.gap), (2.5, 0.5, 2.0));
        let r = penrose_reduced(d(3), 2.5, -10.0 / 3.0).unwrap();
        assert!((r.lhs - 5.0 / 3.0).abs() < 1e-15);
        assert!((r.rhs - 1.0 / 6.0).abs() < 1e-15);
        assert!((r.gap - 1.5).abs() < 1e-15);
        assert!(matches!(
            penrose_reduced(d(2), 2.0, -2.0),
            Err(Error::NotMinimal { .. })
        ));
    }

    #[test]
    fn full_examples() {
        let f = penrose_full(d(2), 2.5, 4.0 * PI * PI).unwrap();
        assert!((f.rhs - 0.5 * 2f64.powf(2.0 / 3.0)).abs() < 1e-14);
        assert!(f.holds);
        let f = penrose_full(d(3), 1.0, unit_sphere_volume(d(3))).unwrap();
        assert!((f.rhs - 0.5).abs() < 1e-15 && f.holds);
        assert!(!penrose_full(d(2), 0.0, 1.0).unwrap().holds);
        assert!(matches!(penrose_full(d(2), 1.0, 0.0), Err(Error::NonPositiveVolume(_))));
    }

    #[test]
    fn dichotomy_examples() {
        let bs = dichotomy_report(d(2), PhasePoint::new(0.0, -0.5)).unwrap();
        assert!(bs.divisor_present && !bs.stable_sphere && bs.dichotomy_ok);
        let st = dichotomy_report(d(2), PhasePoint::new(2.0, -2.5)).unwrap();
        assert!(st.stable_sphere && !st.divisor_present && st.dichotomy_ok);
        assert_eq!(st.holds_reduced, Some(true));
        assert_eq!(st.x0, Some(2.0));
        assert_eq!(st.m_paper, Some(2.5));
        let r2 = dichotomy_report(d(2), PhasePoint::new(0.2, 0.2)).unwrap();
        assert!(!r2.divisor_present && !r2.stable_sphere && r2.dichotomy_ok);
    }

    #[test]
    fn seeds_are_deterministic() {
        let a = random_seeds(50, 7, &[2, 3]).unwrap();
        let b = random_seeds(50, 7, &[2, 3]).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|(_, p)| p.is_admissible()));
    }
}
