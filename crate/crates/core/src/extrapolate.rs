//! Richardson extrapolation of limits at `t -> +inf` whose error decays like `e^{-rate t}`.

use crate::error::{Error, Result};

/// Default ladder of evaluation points.
pub const LADDER: [f64; 3] = [10.0, 20.0, 40.0];
/// Relative agreement required between successive extrapolants.
pub const REL_TOL: f64 = 1e-6;
/// Absolute floor below which a limit is treated as zero.
pub const ABS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolated {
    pub value: f64,
    /// Raw samples `g(t_i)` on the ladder.
    pub samples: Vec<f64>,
    /// First-level extrapolants.
    pub estimates: Vec<f64>,
}

/// Eliminates the `e^{-rate t}` term between two samples.
pub fn eliminate(t1: f64, g1: f64, t2: f64, g2: f64, rate: f64) -> f64 {
    let r = (-rate * (t2 - t1)).exp();
    (g2 - g1 * r) / (1.0 - r)
}

/// Two-level extrapolation of `lim g(t)` over `ladder`.
pub fn limit<G>(mut g: G, ladder: &[f64], rate: f64) -> Result<Extrapolated>
where
    G: FnMut(f64) -> Result<f64>,
{
    if ladder.len() < 3 {
        return Err(Error::InvalidArgument("ladder needs at least three points".into()));
    }
    let samples = ladder.iter().map(|&t| g(t)).collect::<Result<Vec<_>>>()?;
    let estimates: Vec<f64> = ladder
        .windows(2)
        .zip(samples.windows(2))
        .map(|(t, s)| eliminate(t[0], s[0], t[1], s[1], rate))
        .collect();
    let k = estimates.len();
    let (prev, last) = (estimates[k - 2], estimates[k - 1]);
    if !last.is_finite() || !prev.is_finite() {
        return Err(Error::NonConvergent(estimates));
    }
    let scale = last.abs().max(prev.abs());
    if (last - prev).abs() > REL_TOL * scale + ABS_FLOOR {
        return Err(Error::NonConvergent(estimates));
    }
    let value = if last.abs() <= ABS_FLOOR { 0.0 } else { last };
    Ok(Extrapolated {
        value,
        samples,
        estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removes_known_exponential() {
        let g = |t: f64| Ok(2.5 + 3.0 * (-0.5 * t).exp() + 1e3 * (-2.0 * t).exp());
        let r = limit(g, &LADDER, 0.5).unwrap();
        assert!((r.value - 2.5).abs() < 1e-12);
    }

    #[test]
    fn zero_limit_is_snapped() {
        let r = limit(|t: f64| Ok(4.0 * (-t).exp()), &LADDER, 1.0).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn divergent_sequence_is_rejected() {
        let r = limit(|t: f64| Ok(t), &LADDER, 1.0);
        assert!(matches!(r, Err(Error::NonConvergent(_))));
    }
}
