//! SVG and CSV renderings of scan reports, projection covers and attractor
//! samples.

use std::f64::consts::PI;
use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::AnalysisError;
use crate::ifs::{rotation_group, Ifs};
use crate::projection::{
    decide_interval, induce_system, refine_cover, solve_hull, Direction, IntervalVerdict, Projected1DSystem, GROUP_CAP,
};
use crate::scalar::Scalar;
use crate::scan::{IpReport, Shortcut};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 40.0;

/// Float form of one map: `[[a, b], [c, d]]` scaled by the ratio, then the
/// translation.
type AffineF64 = ([[f64; 2]; 2], [f64; 2]);

fn affine_maps(ifs: &Ifs) -> Vec<AffineF64> {
    ifs.maps()
        .iter()
        .map(|m| {
            let r = m.ratio.to_f64();
            let l = m.rotation.to_f64();
            ([[r * l[0][0], r * l[0][1]], [r * l[1][0], r * l[1][1]]], m.translation.to_f64())
        })
        .collect()
}

fn apply(m: &AffineF64, p: [f64; 2]) -> [f64; 2] {
    let (l, t) = m;
    [l[0][0] * p[0] + l[0][1] * p[1] + t[0], l[1][0] * p[0] + l[1][1] * p[1] + t[1]]
}

/// Points `S_w(p)` for random words `w` of length `depth`, where `p` is the
/// fixed point of the first map. Deterministic in `seed`.
pub fn sample_points(ifs: &Ifs, depth: usize, count: usize, seed: u64) -> Vec<[f64; 2]> {
    let maps = affine_maps(ifs);
    let start = ifs.maps()[0].fixed_point().to_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let word: Vec<usize> = (0..depth).map(|_| rng.gen_range(0..maps.len())).collect();
            word.iter().rev().fold(start, |p, &i| apply(&maps[i], p))
        })
        .collect()
}

/// Images of the first fixed point under every word of length `depth`.
pub fn all_word_points(ifs: &Ifs, depth: usize) -> Vec<[f64; 2]> {
    let maps = affine_maps(ifs);
    let mut pts = vec![ifs.maps()[0].fixed_point().to_f64()];
    for _ in 0..depth {
        pts = maps.iter().flat_map(|m| pts.iter().map(move |&p| apply(m, p))).collect();
    }
    pts
}

pub fn points_csv(points: &[[f64; 2]]) -> String {
    let mut out = String::from("x,y\n");
    for p in points {
        let _ = writeln!(out, "{},{}", p[0], p[1]);
    }
    out
}

pub fn points_svg(points: &[[f64; 2]]) -> String {
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let scale = (WIDTH - 2.0 * MARGIN) / span;
    let mut out = svg_open(WIDTH, WIDTH);
    let _ = writeln!(out, r#"<g fill="black">"#);
    for p in points {
        let x = MARGIN + (p[0] - x0) * scale;
        let y = WIDTH - MARGIN - (p[1] - y0) * scale;
        let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1"/>"#);
    }
    out.push_str("</g>\n</svg>\n");
    out
}

fn svg_open(w: f64, h: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n"
    )
}

/// Half-circle of directions `[0, π]`: excluded arcs shaded, undecided arcs
/// in red, certified directions as spokes scaled by projection length.
pub fn render_angle_diagram(report: &IpReport) -> String {
    let h = WIDTH / 2.0 + 2.0 * MARGIN;
    let (cx, cy) = (WIDTH / 2.0, WIDTH / 2.0 + MARGIN);
    let radius = WIDTH / 2.0 - MARGIN;
    let at = |theta: f64, r: f64| (cx + r * theta.cos(), cy - r * theta.sin());
    let wedge = |lo: f64, hi: f64, r: f64| {
        let (x0, y0) = at(lo, r);
        let (x1, y1) = at(hi, r);
        let large = if hi - lo > PI { 1 } else { 0 };
        format!("M {cx:.2} {cy:.2} L {x0:.2} {y0:.2} A {r:.2} {r:.2} 0 {large} 0 {x1:.2} {y1:.2} Z")
    };
    let mut out = svg_open(WIDTH, h);
    let _ = writeln!(out, r#"<text x="{MARGIN}" y="20" font-family="sans-serif" font-size="14">{}</text>"#, report.name);
    let _ = writeln!(out, r#"<path d="{}" fill="none" stroke="black"/>"#, wedge(0.0, PI, radius));
    for arc in &report.excluded {
        let _ = writeln!(
            out,
            r#"<path class="excluded" d="{}" fill="lightgray" stroke="none"/>"#,
            wedge(arc.lo_rad, arc.hi_rad, radius)
        );
    }
    for u in &report.undecided {
        let _ = writeln!(
            out,
            r#"<path class="undecided" d="{}" fill="red" fill-opacity="0.6" stroke="none"/>"#,
            wedge(u.lo_rad, u.hi_rad, radius)
        );
    }
    let longest = report.certified.iter().map(|c| c.length).fold(0.0, f64::max);
    for c in &report.certified {
        let r = if longest > 0.0 { radius * (0.3 + 0.7 * c.length / longest) } else { radius };
        let (x, y) = at(c.theta_rad, r);
        let (lx, ly) = at(c.theta_rad, radius + 14.0);
        let _ = writeln!(
            out,
            r#"<line class="certified" x1="{cx:.2}" y1="{cy:.2}" x2="{x:.2}" y2="{y:.2}" stroke="blue" stroke-width="2"/>"#
        );
        let _ = writeln!(
            out,
            r#"<text x="{lx:.2}" y="{ly:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            c.t
        );
    }
    if report.shortcut == Shortcut::InfiniteRotationGroup {
        let _ = writeln!(
            out,
            r#"<text x="{cx:.2}" y="{:.2}" font-family="sans-serif" font-size="16" text-anchor="middle">no interval projections</text>"#,
            cy - radius / 2.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="{:.2}" font-family="sans-serif" font-size="11">residue {:.3e} rad, {} certified</text>"#,
        h - 8.0,
        report.residue_rad,
        report.certified.len()
    );
    out.push_str("</svg>\n");
    out
}

/// Tiles drawn per cover row before falling back to the merged cover only.
const MAX_TILES: usize = 4096;

/// Projected hulls of all depth-`depth` cylinders at `node`, or `None` when
/// there are more than `cap`.
pub fn tiles(
    sys: &Projected1DSystem,
    hulls: &[(Scalar, Scalar)],
    node: usize,
    depth: usize,
    cap: usize,
) -> Option<Vec<(f64, f64)>> {
    if sys.edges[node].len().checked_pow(depth as u32).is_none_or(|n| n > cap) {
        return None;
    }
    let mut out = Vec::new();
    walk(sys, hulls, node, depth, &mut Vec::new(), &mut out);
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite tiles"));
    Some(out)
}

/// Applies the composed edge maps of every path of length `left` from `at`
/// to the hull of the path's final node.
fn walk(
    sys: &Projected1DSystem,
    hulls: &[(Scalar, Scalar)],
    at: usize,
    left: usize,
    path: &mut Vec<(usize, usize)>,
    out: &mut Vec<(f64, f64)>,
) {
    if left == 0 {
        let (mut lo, mut hi) = hulls[at].clone();
        for &(node, k) in path.iter().rev() {
            (lo, hi) = sys.edges[node][k].image(&lo, &hi);
        }
        out.push((lo.to_f64(), hi.to_f64()));
        return;
    }
    for (k, e) in sys.edges[at].iter().enumerate() {
        path.push((at, k));
        walk(sys, hulls, e.target, left - 1, path, out);
        path.pop();
    }
}

/// Covers of the projected attractor at depths `0..=depth`, one row each,
/// with the first certified gap as a band and optional projected sample
/// points under the last row.
pub fn render_projection_cover(
    ifs: &Ifs,
    d: &Direction,
    depth: usize,
    points: Option<(usize, u64)>,
) -> Result<String, AnalysisError> {
    let group = rotation_group(ifs, GROUP_CAP);
    let sys = induce_system(ifs, d, &group)?;
    let hull = solve_hull(&sys)?;
    let norm = d.norm();
    let (lo, hi) = (hull.hulls[0].0.to_f64() / norm, hull.hulls[0].1.to_f64() / norm);
    let span = (hi - lo).max(1e-12);
    let px = |v: f64| MARGIN + (v - lo) / span * (WIDTH - 2.0 * MARGIN);
    let row_h = 18.0;
    let top = 40.0;
    let rows = depth + 1;
    let h = top + rows as f64 * row_h + 60.0;
    let mut out = svg_open(WIDTH, h);
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="20" font-family="sans-serif" font-size="14">{} t = {d}</text>"#,
        ifs.name()
    );
    if let IntervalVerdict::Gap(g) = decide_interval(&sys, &hull, 0, depth.max(1)) {
        let (g0, g1) = (px(g.center - g.half_width), px(g.center + g.half_width));
        let _ = writeln!(
            out,
            r#"<rect class="gap" x="{g0:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="orange" fill-opacity="0.4"/>"#,
            (g1 - g0).max(0.5),
            rows as f64 * row_h
        );
    }
    for k in 0..rows {
        let y = top + k as f64 * row_h + 3.0;
        for (a, b) in refine_cover(&sys, &hull, 0, k)? {
            let (x0, x1) = (px(a.to_f64() / norm), px(b.to_f64() / norm));
            let _ = writeln!(
                out,
                r#"<rect class="cover" x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="steelblue"/>"#,
                (x1 - x0).max(0.5),
                row_h - 6.0
            );
        }
        for (a, b) in tiles(&sys, &hull.hulls, 0, k, MAX_TILES).unwrap_or_default() {
            let (x0, x1) = (px(a / norm), px(b / norm));
            let _ = writeln!(
                out,
                r#"<rect class="tile" x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="white" stroke-width="0.5"/>"#,
                (x1 - x0).max(0.5),
                row_h - 6.0
            );
        }
    }
    if let Some((n, seed)) = points {
        let f = d.functional().to_f64();
        let y = top + rows as f64 * row_h + 10.0;
        for p in sample_points(ifs, depth.max(8), n, seed) {
            let x = px((f[0] * p[0] + f[1] * p[1]) / norm);
            let _ = writeln!(out, r#"<line class="point" x1="{x:.2}" y1="{y:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#, y + 12.0);
        }
    }
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="{:.2}" font-family="sans-serif" font-size="11">[{lo:.6}, {hi:.6}]</text>"#,
        h - 8.0
    );
    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{build_example, ExampleId};
    use crate::exec::Execution;
    use crate::scan::{scan_enumerate, ScanParams};

    #[test]
    fn points_are_seeded() {
        let ifs = build_example(ExampleId::FourCorner);
        let a = sample_points(&ifs, 10, 50, 7);
        assert_eq!(a, sample_points(&ifs, 10, 50, 7));
        assert_ne!(a, sample_points(&ifs, 10, 50, 8));
        let csv = points_csv(&a);
        assert!(csv.starts_with("x,y\n"));
        assert_eq!(csv.lines().count(), 51);
    }

    #[test]
    fn word_points_count() {
        let ifs = build_example(ExampleId::SierpinskiRight);
        assert_eq!(all_word_points(&ifs, 4).len(), 81);
    }

    #[test]
    fn angle_diagram_marks() {
        let ifs = build_example(ExampleId::FourCorner);
        let report = scan_enumerate(&ifs, &ScanParams::default(), Execution::Sequential).unwrap();
        let svg = render_angle_diagram(&report);
        assert_eq!(svg.matches("class=\"certified\"").count(), 4);
        assert!(svg.contains("class=\"excluded\""));

        let irr = build_example(ExampleId::IrrationalRotationDemo);
        let report = scan_enumerate(&irr, &ScanParams::default(), Execution::Sequential).unwrap();
        assert!(render_angle_diagram(&report).contains("no interval projections"));
    }

    #[test]
    fn cover_diagram_tiles() {
        let ifs = build_example(ExampleId::FourCorner);
        let svg = render_projection_cover(&ifs, &Direction::slope(1, 2), 1, None).unwrap();
        let row1 = |svg: &str, class: &str| {
            svg.lines().filter(|l| l.contains(class) && l.contains("y=\"61.00\"")).count()
        };
        assert_eq!(row1(&svg, "class=\"tile\""), 4);
        assert_eq!(row1(&svg, "class=\"cover\""), 1);

        let seg = build_example(ExampleId::Segment);
        let svg = render_projection_cover(&seg, &Direction::slope(3, 1), 2, None).unwrap();
        assert_eq!(svg.matches("class=\"cover\"").count(), 3);
    }

    #[test]
    fn cover_diagram_has_gap_band() {
        let ifs = build_example(ExampleId::FourCorner);
        let svg = render_projection_cover(&ifs, &Direction::slope(0, 1), 3, Some((20, 1))).unwrap();
        assert!(svg.contains("class=\"gap\""));
        assert_eq!(svg.matches("class=\"point\"").count(), 20);
        let svg = render_projection_cover(&ifs, &Direction::slope(1, 2), 3, None).unwrap();
        assert!(!svg.contains("class=\"gap\""));
    }
}
