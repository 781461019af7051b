//! Static, self-contained SVG phase portraits.

use std::fmt::Write;

use crate::phase::{classify, lambda_critical, level_branch_y, tangency_point, Dimension, PhasePoint, RegionTag};

const WIDTH: f64 = 680.0;
const HEIGHT: f64 = 800.0;
const MARGIN: f64 = 40.0;
const SAMPLES: usize = 1200;

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitOptions {
    pub n: Dimension,
    /// Values of the level function to draw.
    pub levels: Vec<f64>,
    pub tol: f64,
    pub x_range: (f64, f64),
    /// Top edge of the window; the bottom follows from the aspect ratio.
    pub y_top: f64,
}

impl PortraitOptions {
    pub fn new(n: Dimension) -> Self {
        let nf = n.as_f64();
        PortraitOptions {
            n,
            levels: Vec::new(),
            tol: crate::ode::DEFAULT_TOL,
            x_range: (-3.0, 5.0 * nf - 1.0),
            y_top: 3.0,
        }
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(o: &PortraitOptions) -> Self {
        let (x0, x1) = o.x_range;
        let h = (x1 - x0) * (HEIGHT - 2.0 * MARGIN) / (WIDTH - 2.0 * MARGIN);
        Frame {
            x0,
            x1,
            y0: o.y_top - h,
            y1: o.y_top,
        }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        MARGIN + (self.y1 - y) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn corners(&self) -> [(f64, f64); 4] {
        [
            (self.x0, self.y0),
            (self.x1, self.y0),
            (self.x1, self.y1),
            (self.x0, self.y1),
        ]
    }

    fn path(&self, pts: &[(f64, f64)]) -> String {
        let mut d = String::new();
        for (i, &(x, y)) in pts.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.2},{:.2}",
                if i == 0 { "M" } else { " L" },
                self.px(x),
                self.py(y)
            );
        }
        d
    }
}

fn region_color(tag: RegionTag) -> &'static str {
    match tag {
        RegionTag::Region2AeExterior => "#1f77b4",
        RegionTag::Region3CriticalLevel => "#000000",
        RegionTag::Region4FiniteTimeBlowup => "#9467bd",
        RegionTag::Region5CompletePunctured => "#2ca02c",
        RegionTag::AxisX | RegionTag::AxisY => "#7f7f7f",
        RegionTag::EuclideanFixedPoint | RegionTag::Inadmissible => "#d62728",
    }
}

/// Part of the polygon where `a x + b y + c < 0`.
fn clip_half_plane(poly: &[(f64, f64)], a: f64, b: f64, c: f64) -> Vec<(f64, f64)> {
    let f = |p: (f64, f64)| a * p.0 + b * p.1 + c;
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let p = poly[i];
        let q = poly[(i + 1) % poly.len()];
        let (fp, fq) = (f(p), f(q));
        if fp < 0.0 {
            out.push(p);
        }
        if (fp < 0.0) != (fq < 0.0) {
            let s = fp / (fp - fq);
            out.push((p.0 + s * (q.0 - p.0), p.1 + s * (q.1 - p.1)));
        }
    }
    out
}

/// `F = lambda` in the quadrant with the given signs, split into admissible runs.
fn level_runs(n: Dimension, lambda: f64, sx: f64, sy: f64, x_max: f64, lo: f64) -> Vec<Vec<(f64, f64)>> {
    let mut runs = Vec::new();
    let mut cur: Vec<(f64, f64)> = Vec::new();
    for i in 1..=SAMPLES {
        let ax = lo + (x_max - lo) * (i as f64 / SAMPLES as f64).powi(2);
        let x = sx * ax;
        let y = level_branch_y(n, lambda, sy, x);
        if PhasePoint::new(x, y).is_admissible() {
            cur.push((x, y));
        } else if !cur.is_empty() {
            runs.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    runs.retain(|r| r.len() > 1);
    runs
}

pub fn portrait_svg(o: &PortraitOptions) -> String {
    let n = o.n;
    let nf = n.as_f64();
    let fr = Frame::new(o);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}"/></clipPath></defs>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" style="fill:#ffffff"/>"#
    );
    let _ = writeln!(s, r#"<g clip-path="url(#plot)">"#);

    // inadmissible half-plane 1 + x + y < 0
    let shade = clip_half_plane(&fr.corners(), 1.0, 1.0, 1.0);
    if shade.len() >= 3 {
        let _ = writeln!(
            s,
            r#"<path id="inadmissible" d="{} Z" style="fill:#f2d0d0;stroke:none"/>"#,
            fr.path(&shade)
        );
    }

    let _ = writeln!(
        s,
        r#"<path id="axes" d="{} {}" style="stroke:#999999;stroke-width:1;fill:none"/>"#,
        fr.path(&[(fr.x0, 0.0), (fr.x1, 0.0)]),
        fr.path(&[(0.0, fr.y0), (0.0, fr.y1)])
    );

    let _ = writeln!(
        s,
        r#"<path id="admissible-line" d="{}" style="stroke:#d62728;stroke-width:2;fill:none"/>"#,
        fr.path(&[(fr.x0, -1.0 - fr.x0), (fr.x1, -1.0 - fr.x1)])
    );

    let min_y = |x: f64| -((nf - 1.0) * x + 2.0 * nf - 1.0) / nf;
    let _ = writeln!(
        s,
        r#"<path id="minimal-line" d="{}" style="stroke:#2ca02c;stroke-width:2;fill:none"/>"#,
        fr.path(&[(fr.x0, min_y(fr.x0)), (fr.x1, min_y(fr.x1))])
    );
    let (w0, w1) = (nf - 1.0, 2.0 * nf - 1.0);
    let _ = writeln!(
        s,
        r#"<path id="stable-window" d="{}" style="stroke:#ff7f0e;stroke-width:5;fill:none"/>"#,
        fr.path(&[(w0, min_y(w0)), (w1, min_y(w1))])
    );

    let lc = lambda_critical(n);
    let tan = tangency_point(n);
    let arcs: [(&str, &str, f64, f64, f64); 3] = [
        ("critical-black", "#000000", -1.0, 0.0, tan.x),
        ("critical-blue", "#1f4fff", -1.0, tan.x, fr.x1),
        ("critical-yellow", "#e0b000", 1.0, 0.0, fr.x1),
    ];
    for (id, color, sy, a, b) in arcs {
        let pts: Vec<(f64, f64)> = (0..=SAMPLES)
            .map(|i| {
                let x = a + (b - a) * i as f64 / SAMPLES as f64;
                (x, level_branch_y(n, lc, sy, x))
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<path id="{id}" d="{}" style="stroke:{color};stroke-width:2.5;fill:none"/>"#,
            fr.path(&pts)
        );
    }

    let reach = fr.x0.abs().max(fr.x1.abs());
    for (li, &lambda) in o.levels.iter().enumerate() {
        for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            for run in level_runs(n, lambda, sx, sy, reach, 0.0) {
                let mid = run[run.len() / 2];
                let tag = classify(n, PhasePoint::new(mid.0, mid.1)).tag;
                let _ = writeln!(
                    s,
                    r#"<path class="level" data-level="{lambda}" data-region="{}" id="level-{li}-{}{}" d="{}" style="stroke:{};stroke-width:1.5;fill:none"/>"#,
                    tag.name(),
                    if sx > 0.0 { 'p' } else { 'm' },
                    if sy > 0.0 { 'p' } else { 'm' },
                    fr.path(&run),
                    region_color(tag)
                );
            }
        }
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(
        s,
        r#"<circle id="tangency" data-x="{}" data-y="{}" cx="{:.2}" cy="{:.2}" r="4" style="fill:#ffffff;stroke:#000000;stroke-width:1.5"/>"#,
        tan.x,
        tan.y,
        fr.px(tan.x),
        fr.py(tan.y)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}">tangency ({}, {})</text>"#,
        fr.px(tan.x) + 8.0,
        fr.py(tan.y) + 4.0,
        tan.x,
        tan.y
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" style="fill:none;stroke:#000000;stroke-width:1"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );

    let legend = [
        ("#d62728", "admissible line 1+x+y=0".to_string()),
        (
            "#2ca02c",
            format!("minimal spheres {}x+{}y+{}=0", nf - 1.0, nf, 2.0 * nf - 1.0),
        ),
        ("#ff7f0e", "stable minimal spheres".to_string()),
        ("#000000", format!("critical level F={lc:.6}")),
    ];
    let _ = writeln!(s, r#"<g id="legend">"#);
    for (i, (color, label)) in legend.iter().enumerate() {
        let y = MARGIN + 18.0 + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" style="stroke:{color};stroke-width:3"/><text x="{}" y="{}">{label}</text>"#,
            MARGIN + 10.0,
            MARGIN + 30.0,
            MARGIN + 36.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}">n = {}, x in [{}, {}]</text>"#,
        MARGIN,
        MARGIN - 12.0,
        n.get(),
        fr.x0,
        fr.x1
    );
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}
