//! Convex polygon witnesses for interval projections.
//!
//! A polygon `F` with `S_i(F) ⊆ F` is a witness for a direction when the
//! projections of the images cover the projection of `F`; it is a witness
//! for every line when that holds in all directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{AnalysisError, ParseError};
use crate::ifs::{Ifs, NumberField, Similarity};
use crate::linalg::Vec2;
use crate::projection::Direction;
use crate::scalar::Scalar;

const FLOAT_TOL: f64 = 1e-12;

/// Strictly convex polygon with counterclockwise vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

fn sign_tol(points: &[Vec2]) -> f64 {
    if points.iter().all(Vec2::is_exact) {
        0.0
    } else {
        let scale = points.iter().map(|p| p.x.to_f64().abs().max(p.y.to_f64().abs())).fold(1.0, f64::max);
        FLOAT_TOL * scale * scale
    }
}

impl ConvexPolygon {
    /// Accepts either orientation; clockwise input is reversed.
    pub fn new(mut vertices: Vec<Vec2>) -> Result<Self, ParseError> {
        let n = vertices.len();
        if n < 3 {
            return Err(ParseError::Polygon("need at least three vertices".into()));
        }
        let area2 = (0..n).fold(Scalar::zero(), |acc, i| acc + vertices[i].cross(&vertices[(i + 1) % n]));
        if area2 < Scalar::zero() {
            vertices.reverse();
        }
        let tol = sign_tol(&vertices);
        for i in 0..n {
            let p = &vertices[i];
            let edge = &vertices[(i + 1) % n] - p;
            for (j, q) in vertices.iter().enumerate() {
                if j == i || j == (i + 1) % n {
                    continue;
                }
                let c = edge.cross(&(q - p));
                let inside = if tol == 0.0 { c > Scalar::zero() } else { c.to_f64() > tol };
                if !inside {
                    return Err(ParseError::Polygon(format!("vertex {j} is not strictly inside edge {i}")));
                }
            }
        }
        Ok(ConvexPolygon { vertices })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn is_exact(&self) -> bool {
        self.vertices.iter().all(Vec2::is_exact)
    }

    /// Closed containment test.
    pub fn contains(&self, x: &Vec2) -> bool {
        let tol = sign_tol(&self.vertices);
        let n = self.vertices.len();
        (0..n).all(|i| {
            let p = &self.vertices[i];
            let c = (&self.vertices[(i + 1) % n] - p).cross(&(x - p));
            c >= Scalar::zero() || c.to_f64() >= -tol
        })
    }

    pub fn image(&self, s: &Similarity) -> Vec<Vec2> {
        self.vertices.iter().map(|v| s.apply(v)).collect()
    }

    /// `[min, max]` of `n·x` over the polygon.
    pub fn project(&self, n: &Vec2) -> (Scalar, Scalar) {
        project_points(&self.vertices, n)
    }

    pub fn unit_square() -> Self {
        let p = |x, y| Vec2::new(Scalar::int(x), Scalar::int(y));
        ConvexPolygon { vertices: vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)] }
    }

    /// Triangle with vertices `(0,0)`, `(1,0)`, `(1/2, √3/2)` (float apex).
    pub fn equilateral_triangle() -> Self {
        ConvexPolygon {
            vertices: vec![
                Vec2::zero(),
                Vec2::new(Scalar::one(), Scalar::zero()),
                Vec2::new(Scalar::ratio(1, 2), Scalar::Approx(3f64.sqrt() / 2.0)),
            ],
        }
    }
}

fn project_points(points: &[Vec2], n: &Vec2) -> (Scalar, Scalar) {
    let vals: Vec<Scalar> = points.iter().map(|p| n.dot(p)).collect();
    let lo = vals.iter().cloned().reduce(Scalar::min).expect("nonempty");
    let hi = vals.into_iter().reduce(Scalar::max).expect("nonempty");
    (lo, hi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolygonDocument {
    pub vertices: Vec<[NumberField; 2]>,
}

pub fn parse_polygon(text: &str) -> Result<ConvexPolygon, ParseError> {
    let doc: PolygonDocument = serde_json::from_str(text).map_err(|e| ParseError::Document(e.to_string()))?;
    let vertices = doc
        .vertices
        .iter()
        .map(|[x, y]| Ok(Vec2::new(number(x)?, number(y)?)))
        .collect::<Result<Vec<_>, ParseError>>()?;
    ConvexPolygon::new(vertices)
}

fn number(f: &NumberField) -> Result<Scalar, ParseError> {
    match f {
        NumberField::Text(s) => s.parse(),
        NumberField::Float(x) => Ok(Scalar::Approx(*x)),
    }
}

pub fn serialize_polygon(p: &ConvexPolygon) -> String {
    let doc = PolygonDocument {
        vertices: p.vertices.iter().map(|v| [(&v.x).into(), (&v.y).into()]).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("document serializes")
}

pub fn check_invariance(f: &ConvexPolygon, ifs: &Ifs) -> bool {
    ifs.maps().iter().all(|m| f.image(m).iter().all(|p| f.contains(p)))
}

/// Uncovered part of `[lo, hi]` by the union of `ivs`, as the widest open
/// gap `(a, b)`; gaps of width at most `tol` count as covered.
fn uncovered(lo: &Scalar, hi: &Scalar, mut ivs: Vec<(Scalar, Scalar)>, tol: f64) -> Option<(Scalar, Scalar)> {
    ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reach = lo.clone();
    let mut best: Option<(Scalar, Scalar)> = None;
    let consider = |a: &Scalar, b: &Scalar, best: &mut Option<(Scalar, Scalar)>| {
        let w = b - a;
        let open = if w.is_exact() { w > Scalar::zero() } else { w.to_f64() > tol };
        if open && best.as_ref().is_none_or(|(x, y)| w > y - x) {
            *best = Some((a.clone(), b.clone()));
        }
    };
    for (a, b) in ivs {
        if a > reach {
            let end = a.clone().min(hi.clone());
            consider(&reach, &end, &mut best);
        }
        if b > reach {
            reach = b;
        }
        if reach >= *hi {
            break;
        }
    }
    if reach < *hi {
        consider(&reach, hi, &mut best);
    }
    best
}

fn image_projections(f: &ConvexPolygon, ifs: &Ifs, n: &Vec2) -> Vec<(Scalar, Scalar)> {
    ifs.maps().iter().map(|m| project_points(&f.image(m), n)).collect()
}

pub fn check_theta_witness(f: &ConvexPolygon, ifs: &Ifs, d: &Direction) -> Result<bool, AnalysisError> {
    if !ifs.all_homothety() {
        return Err(AnalysisError::Precondition("direction witnesses need homotheties".into()));
    }
    if !check_invariance(f, ifs) {
        return Err(AnalysisError::Precondition("polygon is not invariant under the maps".into()));
    }
    let n = d.functional();
    let (lo, hi) = f.project(&n);
    Ok(uncovered(&lo, &hi, image_projections(f, ifs, &n), tol_for(f, ifs)).is_none())
}

fn tol_for(f: &ConvexPolygon, ifs: &Ifs) -> f64 {
    if f.is_exact() && ifs.is_exact() {
        0.0
    } else {
        let scale = f
            .vertices
            .iter()
            .map(|p| p.x.to_f64().abs() + p.y.to_f64().abs())
            .fold(1.0, f64::max);
        FLOAT_TOL * scale
    }
}

/// A line `{x : normal·x = offset}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub normal: Vec2,
    pub offset: Scalar,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EveryLineVerdict {
    Certified,
    /// A line meeting `F` and missing every image.
    CounterexampleLine(Line),
    /// Float data whose covering could not be settled at these directions.
    Undecided { directions: Vec<Direction> },
}

/// Decides whether every line meeting `f` meets some image `S_i(f)`.
///
/// The covering condition for direction `n` only depends on the order of
/// the projected vertices of `f` and its images, which changes only at
/// slopes where two of those points project equally. Checking each such
/// critical slope, one slope in every gap between them, and the vertical
/// direction therefore decides all directions.
pub fn check_every_line_witness(f: &ConvexPolygon, ifs: &Ifs) -> Result<EveryLineVerdict, AnalysisError> {
    if !check_invariance(f, ifs) {
        return Err(AnalysisError::Precondition("polygon is not invariant under the maps".into()));
    }
    let exact = f.is_exact() && ifs.is_exact();
    let tol = tol_for(f, ifs);
    let mut points = f.vertices.clone();
    for m in ifs.maps() {
        points.extend(f.image(m));
    }
    let mut critical: Vec<Scalar> = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = &points[i] - &points[j];
            let vertical = if exact { d.y.is_zero() } else { d.y.to_f64().abs() <= tol };
            if !vertical {
                critical.push(-(&d.x / &d.y));
            }
        }
    }
    critical.sort_by(|a, b| a.total_cmp(b));
    critical.dedup_by(|a, b| a == b);
    let mut samples: Vec<Direction> = vec![Direction::Vertical];
    if let (Some(first), Some(last)) = (critical.first(), critical.last()) {
        samples.push(Direction::Slope(first - Scalar::one()));
        samples.push(Direction::Slope(last + Scalar::one()));
    } else {
        samples.push(Direction::Slope(Scalar::zero()));
    }
    for w in critical.windows(2) {
        samples.push(Direction::Slope((&w[0] + &w[1]) / Scalar::int(2)));
    }
    samples.extend(critical.into_iter().map(Direction::Slope));
    let mut unresolved = Vec::new();
    for d in samples {
        let n = d.functional();
        let (lo, hi) = f.project(&n);
        if let Some((a, b)) = uncovered(&lo, &hi, image_projections(f, ifs, &n), tol) {
            let line = Line { normal: n, offset: (&a + &b) / Scalar::int(2) };
            if exact || verify_counterexample(f, ifs, &line) {
                return Ok(EveryLineVerdict::CounterexampleLine(line));
            }
            unresolved.push(d);
        }
    }
    if unresolved.is_empty() {
        Ok(EveryLineVerdict::Certified)
    } else {
        Ok(EveryLineVerdict::Undecided { directions: unresolved })
    }
}

/// The line meets `f` and strictly misses every image polygon.
pub fn verify_counterexample(f: &ConvexPolygon, ifs: &Ifs, line: &Line) -> bool {
    let (lo, hi) = f.project(&line.normal);
    if line.offset < lo || line.offset > hi {
        return false;
    }
    image_projections(f, ifs, &line.normal)
        .iter()
        .all(|(a, b)| line.offset < *a || line.offset > *b)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditResult {
    pub lines: usize,
    pub failures: usize,
}

impl AuditResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Randomized soundness audit of an every-line verdict.
///
/// For `Certified`, random lines meeting `f` must meet some image. For a
/// counterexample, the line is checked exactly and random points of the
/// line inside `f` must lie outside every image.
pub fn audit_every_line(
    f: &ConvexPolygon,
    ifs: &Ifs,
    verdict: &EveryLineVerdict,
    lines: usize,
    seed: u64,
) -> AuditResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    match verdict {
        EveryLineVerdict::Certified => {
            let tol = tol_for(f, ifs);
            for _ in 0..lines {
                let d = Direction::from_angle(rng.gen_range(0.0..std::f64::consts::PI));
                let n = d.functional();
                let (lo, hi) = f.project(&n);
                let u: f64 = rng.gen();
                let c = &lo + (&hi - &lo) * Scalar::exact_from_f64(u).unwrap_or(Scalar::Approx(u));
                let hit = image_projections(f, ifs, &n).iter().any(|(a, b)| {
                    (*a <= c && c <= *b) || (!c.is_exact() && a.to_f64() - tol <= c.to_f64() && c.to_f64() <= b.to_f64() + tol)
                });
                if !hit {
                    failures += 1;
                }
            }
        }
        EveryLineVerdict::CounterexampleLine(line) => {
            if !verify_counterexample(f, ifs, line) {
                failures += 1;
            }
            let images: Vec<ConvexPolygon> =
                ifs.maps().iter().filter_map(|m| ConvexPolygon::new(f.image(m)).ok()).collect();
            let n = &line.normal;
            let dir = Vec2::new(-&n.y, n.x.clone());
            let base = n.scale(&(&line.offset / n.norm_sq()));
            let (lo, hi) = f.project(&dir);
            let span = &hi - &lo;
            for _ in 0..lines {
                let u: f64 = rng.gen();
                let s = (&lo + &span * Scalar::exact_from_f64(u).unwrap_or(Scalar::Approx(u))) / dir.norm_sq();
                let p = &base + &dir.scale(&s);
                if f.contains(&p) && images.iter().any(|img| img.contains(&p)) {
                    failures += 1;
                }
            }
        }
        EveryLineVerdict::Undecided { .. } => {}
    }
    AuditResult { lines, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples::{build_example, ExampleId};
    use crate::ifs::parse_ifs;

    #[test]
    fn polygon_validation() {
        let sq = ConvexPolygon::unit_square();
        assert_eq!(parse_polygon(&serialize_polygon(&sq)).unwrap(), sq);
        let cw = r#"{"vertices":[["0","0"],["0","1"],["1","1"],["1","0"]]}"#;
        let reversed = parse_polygon(cw).unwrap();
        assert_eq!(reversed.vertices().len(), 4);
        assert!(sq.vertices().iter().all(|v| reversed.vertices().contains(v)));
        assert!(reversed.contains(&Vec2::new(Scalar::ratio(1, 2), Scalar::ratio(1, 2))));
        let collinear = r#"{"vertices":[["0","0"],["1","0"],["2","0"],["1","1"]]}"#;
        assert!(parse_polygon(collinear).is_err());
        let bowtie = r#"{"vertices":[["0","0"],["1","1"],["1","0"],["0","1"]]}"#;
        assert!(parse_polygon(bowtie).is_err());
    }

    #[test]
    fn invariance_examples() {
        let sq = ConvexPolygon::unit_square();
        assert!(check_invariance(&sq, &build_example(ExampleId::FourCorner)));
        let out = parse_ifs(r#"{"name":"o","maps":[{"r":"1/2","v":["1","1"]}]}"#).unwrap();
        assert!(!check_invariance(&sq, &out));
        let tri = ConvexPolygon::equilateral_triangle();
        assert!(check_invariance(&tri, &build_example(ExampleId::SierpinskiEquilateral)));
    }

    #[test]
    fn theta_witness_examples() {
        let sq = ConvexPolygon::unit_square();
        let fc = build_example(ExampleId::FourCorner);
        assert!(!check_theta_witness(&sq, &fc, &Direction::slope(0, 1)).unwrap());
        assert!(check_theta_witness(&sq, &fc, &Direction::slope(1, 2)).unwrap());
        let tri = ConvexPolygon::equilateral_triangle();
        let sier = build_example(ExampleId::SierpinskiEquilateral);
        assert!(check_theta_witness(&tri, &sier, &Direction::slope(0, 1)).unwrap());
    }

    #[test]
    fn rhombus_square_has_counterexample() {
        let sq = ConvexPolygon::unit_square();
        let ifs = build_example(ExampleId::RhombusSquare);
        match check_every_line_witness(&sq, &ifs).unwrap() {
            EveryLineVerdict::CounterexampleLine(line) => assert!(verify_counterexample(&sq, &ifs, &line)),
            v => panic!("{v:?}"),
        }
        let line = Line {
            normal: Vec2::new(Scalar::one(), Scalar::one()),
            offset: Scalar::ratio(1, 10),
        };
        assert!(verify_counterexample(&sq, &ifs, &line));
    }

    #[test]
    fn shrunken_square_is_not_a_witness() {
        let ifs = parse_ifs(r#"{"name":"s","maps":[{"r":"99/100","v":["1/200","1/200"]}]}"#).unwrap();
        let sq = ConvexPolygon::unit_square();
        assert!(matches!(
            check_every_line_witness(&sq, &ifs).unwrap(),
            EveryLineVerdict::CounterexampleLine(_)
        ));
    }
}
