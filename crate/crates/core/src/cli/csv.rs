//! Trajectory CSV output and its parser.

use crate::error::{Error, Result};
use crate::fmt17;
use crate::ode::{Sample, Trajectory};
use crate::phase::Dimension;
use crate::profile::Jet;
use crate::sphere::mean_curvature_of;

pub const CSV_HEADER: &str = "t,x,y,v,u_t,u_tt,H,scal_residual";

/// Columns of one row, in header order. Undefined quantities are NaN.
pub fn row_values(n: Dimension, s: &Sample) -> [f64; 8] {
    let j = Jet::from_state(n, s.t, s.x, s.y, s.v);
    let h = mean_curvature_of(&j).unwrap_or(f64::NAN);
    let scal = j.scalar_curvature().unwrap_or(f64::NAN);
    [s.t, s.x, s.y, s.v, j.u_t(), j.u_tt(), h, scal]
}

pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::with_capacity(64 * (traj.samples.len() + 4));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in &traj.samples {
        let row = row_values(traj.n, s);
        let cells: Vec<String> = row.iter().map(|&v| fmt17(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    let p = traj.initial_point();
    out.push_str(&format!(
        "# n={} seed=({},{}) tol={}\n",
        traj.n.get(),
        fmt17(p.x),
        fmt17(p.y),
        fmt17(traj.tol)
    ));
    out.push_str(&format!("# forward: {}\n", traj.forward_end.describe()));
    out.push_str(&format!("# backward: {}\n", traj.backward_end.describe()));
    out
}

/// Parsed rows plus the `#` comment lines (without the marker).
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTrajectory {
    pub rows: Vec<[f64; 8]>,
    pub comments: Vec<String>,
}

pub fn parse_trajectory_csv(text: &str) -> Result<CsvTrajectory> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(Error::InvalidArgument(format!("bad CSV header: {other:?}")));
        }
    }
    let mut rows = Vec::new();
    let mut comments = Vec::new();
    for (i, line) in lines.enumerate() {
        if let Some(c) = line.strip_prefix('#') {
            comments.push(c.trim().to_string());
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::InvalidArgument(format!("bad CSV row {}: {line:?}", i + 2));
        let mut row = [0.0; 8];
        let mut cells = line.split(',');
        for slot in row.iter_mut() {
            *slot = cells.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
        }
        if cells.next().is_some() {
            return Err(bad());
        }
        rows.push(row);
    }
    Ok(CsvTrajectory { rows, comments })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{integrate, IntegrateOptions};
    use crate::phase::PhasePoint;

    #[test]
    fn round_trip_is_exact() {
        let n = Dimension::new(2).unwrap();
        let traj = integrate(n, PhasePoint::new(0.2, 0.2), &IntegrateOptions::new(-5.0, 5.0, 1e-10)).unwrap();
        let text = trajectory_csv(&traj);
        let parsed = parse_trajectory_csv(&text).unwrap();
        assert_eq!(parsed.rows.len(), traj.samples.len());
        for (row, s) in parsed.rows.iter().zip(&traj.samples) {
            let expect = row_values(n, s);
            for (a, b) in row.iter().zip(expect.iter()) {
                assert!(a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan()));
            }
        }
        assert_eq!(parsed.comments.len(), 3);
        assert!(parsed.comments[1].starts_with("forward: "));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(parse_trajectory_csv("a,b\n").is_err());
        assert!(parse_trajectory_csv(&format!("{CSV_HEADER}\n1,2,3\n")).is_err());
    }
}
