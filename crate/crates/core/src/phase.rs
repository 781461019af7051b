//! The reduced phase plane.
//!
//! A radial scalar-flat Kähler potential is encoded by a point `(x, y)` moving
//! along the planar field
//!
//! ```text
//! x_t = -n x (1 + x + y),    y_t = (1 - n) y (1 + x + y)
//! ```
//!
//! restricted to the admissible half plane `1 + x + y > 0`. Orbits lie on the
//! level sets of `F(x, y) = |x|^(1-n) |y|^n`; the level
//! `n^n / (n-1)^(n-1)` is tangent to the admissible line at `(n-1, -n)` and
//! splits the plane into the regions handled by [`classify`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance on `F / F_crit - 1` for membership of the critical level.
pub const CRITICAL_LEVEL_RTOL: f64 = 1e-9;

/// Complex dimension `n >= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Dimension(n))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl TryFrom<u32> for Dimension {
    type Error = Error;
    fn try_from(n: u32) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point of the reduced phase plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
}

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        PhasePoint { x, y }
    }

    /// `1 + x + y`, which equals `v_t` along an orbit.
    #[inline]
    pub fn slack(self) -> f64 {
        1.0 + self.x + self.y
    }

    #[inline]
    pub fn is_admissible(self) -> bool {
        self.slack() > 0.0
    }

    #[inline]
    pub fn is_origin(self) -> bool {
        self.x == 0.0 && self.y == 0.0
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub(crate) fn check_finite(self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite("phase point"))
        }
    }

    pub(crate) fn check_admissible(self) -> Result<()> {
        self.check_finite()?;
        if self.is_admissible() {
            Ok(())
        } else {
            Err(Error::Inadmissible { x: self.x, y: self.y })
        }
    }
}

/// Value of the conserved level function; `+inf` on the `y` axis, `0` on the `x` axis.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LevelValue(f64);

impl LevelValue {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_nan() || lambda < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "level value must be >= 0, got {lambda}"
            )));
        }
        Ok(LevelValue(lambda))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

/// The vector field of the phase system at `p`.
pub fn vector_field(n: Dimension, p: PhasePoint) -> (f64, f64) {
    let n = n.as_f64();
    let s = p.slack();
    (-n * p.x * s, (1.0 - n) * p.y * s)
}

/// `F(x, y) = |x|^(1-n) |y|^n`.
pub fn level_value(n: Dimension, p: PhasePoint) -> Result<LevelValue> {
    p.check_finite()?;
    if p.is_origin() {
        return Err(Error::UndefinedAtOrigin);
    }
    if p.x == 0.0 {
        return Ok(LevelValue(f64::INFINITY));
    }
    if p.y == 0.0 {
        return Ok(LevelValue(0.0));
    }
    let nf = n.as_f64();
    // log form keeps large n away from overflow
    let ln = (1.0 - nf) * p.x.abs().ln() + nf * p.y.abs().ln();
    Ok(LevelValue(ln.exp()))
}

/// The critical level `n^n / (n-1)^(n-1)`.
pub fn lambda_critical(n: Dimension) -> f64 {
    let nf = n.as_f64();
    (nf * nf.ln() - (nf - 1.0) * (nf - 1.0).ln()).exp()
}

/// Point where the critical level touches the admissible line.
pub fn tangency_point(n: Dimension) -> PhasePoint {
    let nf = n.as_f64();
    PhasePoint::new(nf - 1.0, -nf)
}

/// `(n-1) x + n y + 2n - 1`; vanishes exactly where the sphere at that phase point is minimal.
pub fn minimal_line_residual(n: Dimension, p: PhasePoint) -> f64 {
    let nf = n.as_f64();
    (nf - 1.0) * p.x + nf * p.y + 2.0 * nf - 1.0
}

/// Gradient of `F` at a point with `x y != 0`.
pub fn level_gradient(n: Dimension, p: PhasePoint) -> (f64, f64) {
    let nf = n.as_f64();
    let f = (1.0 - nf) * p.x.abs().ln() + nf * p.y.abs().ln();
    let f = f.exp();
    (f * (1.0 - nf) / p.x, f * nf / p.y)
}

/// `y` on the level set through `lambda` with the sign of `sign_y`, as a function of `x`.
pub fn level_branch_y(n: Dimension, lambda: f64, sign_y: f64, x: f64) -> f64 {
    let nf = n.as_f64();
    sign_y.signum() * lambda.powf(1.0 / nf) * x.abs().powf(1.0 - 1.0 / nf)
}

/// `x` on the level set through `lambda` with the sign of `sign_x`, as a function of `y`.
pub fn level_branch_x(n: Dimension, lambda: f64, sign_x: f64, y: f64) -> f64 {
    let nf = n.as_f64();
    sign_x.signum() * lambda.powf(1.0 / (1.0 - nf)) * y.abs().powf(nf / (nf - 1.0))
}

/// Region of the admissible half plane an initial point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    Inadmissible,
    EuclideanFixedPoint,
    /// `y0 = 0` family (Eguchi-Hanson type, `k = n`).
    AxisX,
    /// `x0 = 0` family (Burns-Simanca type, `k = n-1`).
    AxisY,
    Region2AeExterior,
    Region3CriticalLevel,
    Region4FiniteTimeBlowup,
    Region5CompletePunctured,
}

impl RegionTag {
    pub fn name(self) -> &'static str {
        match self {
            RegionTag::Inadmissible => "Inadmissible",
            RegionTag::EuclideanFixedPoint => "EuclideanFixedPoint",
            RegionTag::AxisX => "AxisX",
            RegionTag::AxisY => "AxisY",
            RegionTag::Region2AeExterior => "Region2_AE_Exterior",
            RegionTag::Region3CriticalLevel => "Region3_CriticalLevel",
            RegionTag::Region4FiniteTimeBlowup => "Region4_FiniteTimeBlowup",
            RegionTag::Region5CompletePunctured => "Region5_CompletePunctured",
        }
    }
}

/// Where in `C^n` the reconstructed metric lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DomainKind {
    /// No metric.
    None,
    /// `{|z|^2 > 2 e^-T}`.
    Exterior,
    AllOfCn,
    PuncturedCn,
    /// Boundary at finite distance on both ends of the orbit.
    BoundedBoundary,
}

impl DomainKind {
    pub fn name(self) -> &'static str {
        match self {
            DomainKind::None => "none",
            DomainKind::Exterior => "exterior domain",
            DomainKind::AllOfCn => "all of C^n",
            DomainKind::PuncturedCn => "C^n minus origin",
            DomainKind::BoundedBoundary => "bounded-boundary",
        }
    }
}

/// Branch of the critical level an initial point sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CriticalArc {
    /// `0 < x < n-1`, `y < 0`: joins the tangency point to the origin.
    Black,
    /// `x > n-1`, `y < 0`.
    Blue,
    /// `x > 0`, `y > 0`.
    Yellow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub tag: RegionTag,
    pub domain: DomainKind,
    pub divisor_possible: bool,
    pub complete_without_boundary: bool,
    /// Set only for [`RegionTag::Region3CriticalLevel`].
    pub arc: Option<CriticalArc>,
}

impl RegionLabel {
    fn new(tag: RegionTag, domain: DomainKind, divisor: bool, complete: bool) -> Self {
        RegionLabel {
            tag,
            domain,
            divisor_possible: divisor,
            complete_without_boundary: complete,
            arc: None,
        }
    }
}

/// Assigns exactly one region to a finite phase point.
pub fn classify(n: Dimension, p: PhasePoint) -> RegionLabel {
    use DomainKind::*;
    use RegionTag::*;

    if !p.is_finite() || !p.is_admissible() {
        return RegionLabel::new(Inadmissible, None, false, false);
    }
    if p.is_origin() {
        return RegionLabel::new(EuclideanFixedPoint, AllOfCn, false, true);
    }
    // Axis families: B = -c/(1+c) with c the non-zero coordinate. B > 0 extends
    // over a divisor on the quotient of the blow-up; B < 0 stops at a boundary.
    if p.x == 0.0 || p.y == 0.0 {
        let tag = if p.x == 0.0 { AxisY } else { AxisX };
        let c = if p.x == 0.0 { p.y } else { p.x };
        return if c < 0.0 {
            RegionLabel::new(tag, PuncturedCn, true, true)
        } else {
            RegionLabel::new(tag, Exterior, false, false)
        };
    }
    if p.x < 0.0 {
        return RegionLabel::new(Region5CompletePunctured, PuncturedCn, false, true);
    }

    let nf = n.as_f64();
    let lambda = level_value(n, p).map(LevelValue::get).unwrap_or(f64::NAN);
    let crit = lambda_critical(n);
    if (lambda / crit - 1.0).abs() <= CRITICAL_LEVEL_RTOL {
        let (arc, domain, complete) = if p.y > 0.0 {
            (CriticalArc::Yellow, Exterior, false)
        } else if p.x < nf - 1.0 {
            (CriticalArc::Black, PuncturedCn, true)
        } else {
            (CriticalArc::Blue, Exterior, false)
        };
        let mut label = RegionLabel::new(Region3CriticalLevel, domain, false, complete);
        label.arc = Some(arc);
        return label;
    }
    if p.y > 0.0 || lambda < crit {
        return RegionLabel::new(Region2AeExterior, Exterior, false, false);
    }
    // lambda > critical: the branch meets the admissible line twice, once on
    // each side of x = n - 1.
    if p.x < nf - 1.0 {
        RegionLabel::new(Region5CompletePunctured, PuncturedCn, false, true)
    } else {
        RegionLabel::new(Region4FiniteTimeBlowup, BoundedBoundary, false, false)
    }
}
