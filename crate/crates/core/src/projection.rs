//! One-dimensional systems induced by projecting an IFS onto a direction.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::ifs::{rotation_group, signed_transpose_apply, Ifs, RotationGroupResult};
use crate::linalg::Vec2;
use crate::maxplus::{self, AffineTerm, MaxAffineSystem};
use crate::scalar::{float_margin, round_down, round_up, Scalar};

/// Group elements examined before a rotation group counts as infinite.
pub const GROUP_CAP: usize = 1024;

/// Default number of cover refinements before giving up.
pub const DEFAULT_MAX_DEPTH: usize = 12;

/// Cap on the number of merged intervals carried per node.
const COVER_BUDGET: usize = 1 << 20;

/// Slopes above this magnitude are treated as vertical when converting from
/// float angles or functionals.
const VERTICAL_SLOPE: f64 = 1e12;

/// A projection direction, given by the functional `x + t*y` (`Slope(t)`)
/// or `y` (`Vertical`). The line `L_θ` has `tan θ = t`.
#[derive(Clone, Debug)]
pub enum Direction {
    Slope(Scalar),
    Vertical,
}

impl PartialEq for Direction {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Direction::Slope(a), Direction::Slope(b)) => a == b,
            (Direction::Vertical, Direction::Vertical) => true,
            _ => false,
        }
    }
}

impl Direction {
    pub fn slope(num: i64, den: i64) -> Self {
        Direction::Slope(Scalar::ratio(num, den))
    }

    /// Direction of the line at angle `theta`, with an exact dyadic slope
    /// taken from the float tangent.
    pub fn from_angle(theta: f64) -> Self {
        let t = theta.tan();
        if !t.is_finite() || t.abs() > VERTICAL_SLOPE {
            return Direction::Vertical;
        }
        Direction::Slope(Scalar::exact_from_f64(t).unwrap_or(Scalar::Approx(t)))
    }

    /// The unnormalized functional `(1, t)` or `(0, 1)`.
    pub fn functional(&self) -> Vec2 {
        match self {
            Direction::Slope(t) => Vec2::new(Scalar::one(), t.clone()),
            Direction::Vertical => Vec2::new(Scalar::zero(), Scalar::one()),
        }
    }

    /// A vector orthogonal to the functional, of the same length.
    pub fn perpendicular(&self) -> Vec2 {
        match self {
            Direction::Slope(t) => Vec2::new(-t, Scalar::one()),
            Direction::Vertical => Vec2::new(Scalar::one(), Scalar::zero()),
        }
    }

    /// `1 + t^2`, the squared length of the functional.
    pub fn norm_sq(&self) -> Scalar {
        match self {
            Direction::Slope(t) => Scalar::one() + t.square(),
            Direction::Vertical => Scalar::one(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().to_f64().sqrt()
    }

    /// Angle in `[0, π)`.
    pub fn theta(&self) -> f64 {
        match self {
            Direction::Slope(t) => {
                let a = t.to_f64().atan();
                if a < 0.0 {
                    a + std::f64::consts::PI
                } else {
                    a
                }
            }
            Direction::Vertical => std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn is_exact(&self) -> bool {
        match self {
            Direction::Slope(t) => t.is_exact(),
            Direction::Vertical => true,
        }
    }

    /// Splits a nonzero functional `g` as `lambda * functional(d)`.
    pub fn from_functional(g: &Vec2) -> (Direction, Scalar) {
        let vertical = if g.x.is_exact() && g.y.is_exact() {
            g.x.is_zero()
        } else {
            g.x.to_f64().abs() * VERTICAL_SLOPE < g.y.to_f64().abs()
        };
        if vertical {
            (Direction::Vertical, g.y.clone())
        } else {
            (Direction::Slope(&g.y / &g.x), g.x.clone())
        }
    }

    fn matches(&self, other: &Direction) -> bool {
        match (self, other) {
            (Direction::Slope(a), Direction::Slope(b)) => {
                if a.is_exact() && b.is_exact() {
                    a == b
                } else {
                    let (a, b) = (a.to_f64(), b.to_f64());
                    (a - b).abs() <= 1e-10 * (1.0 + a.abs().max(b.abs()))
                }
            }
            (Direction::Vertical, Direction::Vertical) => true,
            _ => false,
        }
    }

    /// Projection of a point under the unnormalized functional.
    pub fn project(&self, p: &Vec2) -> Scalar {
        self.functional().dot(p)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Slope(t) => write!(f, "{t}"),
            Direction::Vertical => f.write_str("vertical"),
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = crate::error::ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().eq_ignore_ascii_case("vertical") {
            Ok(Direction::Vertical)
        } else {
            Ok(Direction::Slope(s.parse()?))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub target: usize,
    /// Signed ratio of the 1-D map relative to the unnormalized functionals.
    pub ratio: Scalar,
    pub offset: Scalar,
}

impl Edge {
    pub fn image(&self, lo: &Scalar, hi: &Scalar) -> (Scalar, Scalar) {
        let a = &self.ratio * lo + &self.offset;
        let b = &self.ratio * hi + &self.offset;
        let (lo, hi) = if self.ratio > Scalar::zero() { (a, b) } else { (b, a) };
        if lo.is_exact() && hi.is_exact() {
            (lo, hi)
        } else {
            (Scalar::Approx(round_down(lo.to_f64())), Scalar::Approx(round_up(hi.to_f64())))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Projected1DSystem {
    pub nodes: Vec<Direction>,
    pub edges: Vec<Vec<Edge>>,
    pub max_ratio: f64,
}

impl Projected1DSystem {
    pub fn is_exact(&self) -> bool {
        self.edges.iter().flatten().all(|e| e.ratio.is_exact() && e.offset.is_exact())
    }

    fn offset_scale(&self) -> f64 {
        self.edges
            .iter()
            .flatten()
            .map(|e| e.offset.to_f64().abs())
            .fold(0.0, f64::max)
    }
}

pub fn induce_system(
    ifs: &Ifs,
    d: &Direction,
    group: &RotationGroupResult,
) -> Result<Projected1DSystem, AnalysisError> {
    let cap = match group {
        RotationGroupResult::Finite { elements } => elements.len(),
        RotationGroupResult::ExceedsCap(cap) => return Err(AnalysisError::InfiniteRotationGroup(*cap)),
    };
    let mut nodes = vec![d.clone()];
    let mut edges = Vec::new();
    let mut i = 0;
    while i < nodes.len() {
        let f = nodes[i].functional();
        let mut out = Vec::with_capacity(ifs.len());
        for m in ifs.maps() {
            let g = signed_transpose_apply(m, &f);
            let (target_dir, lambda) = Direction::from_functional(&g);
            let target = match nodes.iter().position(|n| n.matches(&target_dir)) {
                Some(t) => t,
                None => {
                    if nodes.len() >= cap {
                        return Err(AnalysisError::Inconsistent(format!(
                            "direction orbit larger than rotation group order {cap}"
                        )));
                    }
                    nodes.push(target_dir);
                    nodes.len() - 1
                }
            };
            out.push(Edge { target, ratio: &m.ratio * &lambda, offset: f.dot(&m.translation) });
        }
        edges.push(out);
        i += 1;
    }
    Ok(Projected1DSystem { nodes, edges, max_ratio: ifs.max_ratio() })
}

/// Per-node hull `[a, b]` of the projected attractor, in unnormalized
/// coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct HullAssignment {
    pub hulls: Vec<(Scalar, Scalar)>,
    pub exact: bool,
}

pub fn solve_hull(sys: &Projected1DSystem) -> Result<HullAssignment, AnalysisError> {
    let n = sys.nodes.len();
    // Variables: b_j at j, A_j = -a_j at n + j.
    let mut rows = vec![Vec::new(); 2 * n];
    for (j, out) in sys.edges.iter().enumerate() {
        for e in out {
            let coef = e.ratio.abs();
            let positive = e.ratio > Scalar::zero();
            let (tb, ta) = if positive { (e.target, n + e.target) } else { (n + e.target, e.target) };
            rows[j].push(AffineTerm { coef: coef.clone(), target: tb, offset: e.offset.clone() });
            rows[n + j].push(AffineTerm { coef, target: ta, offset: -&e.offset });
        }
    }
    let weights: Vec<f64> = sys.nodes.iter().map(Direction::norm).collect();
    let weights = weights.iter().chain(weights.iter()).copied().collect();
    let sol = maxplus::solve(&MaxAffineSystem { rows, weights, contraction: sys.max_ratio })?;
    let hulls = (0..n).map(|j| (-&sol.values[n + j], sol.values[j].clone())).collect();
    Ok(HullAssignment { hulls, exact: sol.exact })
}

/// An open interval inside a node hull that misses the projected attractor.
#[derive(Clone, Debug, PartialEq)]
pub struct GapCertificate {
    pub node: usize,
    /// Unnormalized gap endpoints.
    pub lo: Scalar,
    pub hi: Scalar,
    pub depth: usize,
    /// Gap center and half-width divided by the functional length; the
    /// half-width is rounded down.
    pub center: f64,
    pub half_width: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Exact,
    CertifiedFloat,
}

#[derive(Clone, Debug, PartialEq)]
pub enum IntervalVerdict {
    /// Unnormalized endpoints of the projection.
    Interval { lo: Scalar, hi: Scalar, exactness: Exactness },
    Gap(GapCertificate),
    Undecided { depth: usize },
}

impl IntervalVerdict {
    pub fn is_interval(&self) -> bool {
        matches!(self, IntervalVerdict::Interval { .. })
    }

    pub fn is_gap(&self) -> bool {
        matches!(self, IntervalVerdict::Gap(_))
    }
}

type Cover = Vec<(Scalar, Scalar)>;

/// Sorts and merges intervals whose separation is at most `slack`.
fn merge(mut ivs: Cover, slack: &Scalar) -> Cover {
    ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Cover = Vec::with_capacity(ivs.len());
    for (lo, hi) in ivs {
        if let Some(last) = out.last_mut() {
            if lo <= &last.1 + slack {
                if hi > last.1 {
                    last.1 = hi;
                }
                continue;
            }
        }
        out.push((lo, hi));
    }
    out
}

struct CoverState<'a> {
    sys: &'a Projected1DSystem,
    slack: Scalar,
    covers: Vec<Cover>,
    depth: usize,
}

impl<'a> CoverState<'a> {
    fn new(sys: &'a Projected1DSystem, hull: &HullAssignment) -> Self {
        let exact = hull.exact && sys.is_exact();
        let slack = if exact {
            Scalar::zero()
        } else {
            let scale = hull
                .hulls
                .iter()
                .map(|(a, b)| a.to_f64().abs().max(b.to_f64().abs()))
                .fold(sys.offset_scale(), f64::max);
            Scalar::Approx(float_margin(scale.max(1e-300), 64))
        };
        let covers = hull.hulls.iter().map(|h| vec![h.clone()]).collect();
        CoverState { sys, slack, covers, depth: 0 }
    }

    fn exact(&self) -> bool {
        self.slack.is_exact()
    }

    fn step(&mut self) -> Result<(), AnalysisError> {
        let mut next = Vec::with_capacity(self.covers.len());
        for out in &self.sys.edges {
            let mut ivs = Vec::new();
            for e in out {
                for (lo, hi) in &self.covers[e.target] {
                    ivs.push(e.image(lo, hi));
                }
            }
            if ivs.len() > COVER_BUDGET {
                return Err(AnalysisError::Budget(format!("cover exceeds {COVER_BUDGET} intervals")));
            }
            next.push(merge(ivs, &self.slack));
        }
        self.covers = next;
        self.depth += 1;
        Ok(())
    }

    /// Largest uncovered interval of `node` (leftmost on ties), shrunk by the
    /// float slack when inexact.
    fn largest_gap(&self, node: usize) -> Option<(Scalar, Scalar)> {
        let cover = &self.covers[node];
        let mut best: Option<(Scalar, Scalar)> = None;
        for w in cover.windows(2) {
            let (lo, hi) = (&w[0].1, &w[1].0);
            let (lo, hi) = if self.exact() {
                (lo.clone(), hi.clone())
            } else {
                (
                    Scalar::Approx(round_up(lo.to_f64() + self.slack.to_f64())),
                    Scalar::Approx(round_down(hi.to_f64() - self.slack.to_f64())),
                )
            };
            if hi <= lo {
                continue;
            }
            let width = &hi - &lo;
            if best.as_ref().is_none_or(|(a, b)| width > b - a) {
                best = Some((lo, hi));
            }
        }
        best
    }
}

pub fn decide_interval(
    sys: &Projected1DSystem,
    hull: &HullAssignment,
    node: usize,
    max_depth: usize,
) -> IntervalVerdict {
    let exactness = if hull.exact && sys.is_exact() { Exactness::Exact } else { Exactness::CertifiedFloat };
    let (a, b) = hull.hulls[node].clone();
    let interval = |exactness| IntervalVerdict::Interval { lo: a.clone(), hi: b.clone(), exactness };
    if a >= b {
        return interval(exactness);
    }
    let norm = sys.nodes[node].norm();
    let mut state = CoverState::new(sys, hull);
    for depth in 1..=max_depth.max(1) {
        if state.step().is_err() {
            return IntervalVerdict::Undecided { depth: depth - 1 };
        }
        if let Some((lo, hi)) = state.largest_gap(node) {
            let (l, h) = (lo.to_f64(), hi.to_f64());
            return IntervalVerdict::Gap(GapCertificate {
                node,
                lo,
                hi,
                depth,
                center: 0.5 * (l + h) / norm,
                half_width: round_down(round_down(0.5 * (h - l)) / round_up(norm)),
            });
        }
        if depth == 1 && state.covers.iter().all(|c| c.len() == 1) {
            return interval(exactness);
        }
    }
    IntervalVerdict::Undecided { depth: max_depth }
}

/// Merged union of all depth-`depth` images of the node hulls.
pub fn refine_cover(
    sys: &Projected1DSystem,
    hull: &HullAssignment,
    node: usize,
    depth: usize,
) -> Result<Vec<(Scalar, Scalar)>, AnalysisError> {
    let mut state = CoverState::new(sys, hull);
    for _ in 0..depth {
        state.step()?;
    }
    Ok(state.covers.swap_remove(node))
}

/// Verdict for one direction together with its normalized projection.
#[derive(Clone, Debug, PartialEq)]
pub struct DirectionVerdict {
    pub direction: Direction,
    pub verdict: IntervalVerdict,
    /// Unnormalized hull of the projection at the queried node.
    pub hull: (Scalar, Scalar),
    pub exact: bool,
}

impl DirectionVerdict {
    /// Hull divided by the functional length.
    pub fn normalized(&self) -> (f64, f64) {
        let n = self.direction.norm();
        (self.hull.0.to_f64() / n, self.hull.1.to_f64() / n)
    }

    pub fn length(&self) -> f64 {
        let (a, b) = self.normalized();
        b - a
    }

    /// Squared normalized length, exact in exact mode.
    pub fn length_sq(&self) -> Scalar {
        let w = &self.hull.1 - &self.hull.0;
        w.square() / self.direction.norm_sq()
    }
}

pub fn verify_direction(
    ifs: &Ifs,
    d: &Direction,
    max_depth: usize,
) -> Result<DirectionVerdict, AnalysisError> {
    let group = rotation_group(ifs, GROUP_CAP);
    verify_with_group(ifs, d, &group, max_depth)
}

pub fn verify_with_group(
    ifs: &Ifs,
    d: &Direction,
    group: &RotationGroupResult,
    max_depth: usize,
) -> Result<DirectionVerdict, AnalysisError> {
    let sys = induce_system(ifs, d, group)?;
    let hull = solve_hull(&sys)?;
    let verdict = decide_interval(&sys, &hull, 0, max_depth);
    let exact = hull.exact && sys.is_exact();
    Ok(DirectionVerdict { direction: d.clone(), verdict, hull: hull.hulls[0].clone(), exact })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::{parse_ifs, Similarity};

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    fn four_corner() -> Ifs {
        let r = s(1, 4);
        let pts = [(0, 0), (3, 0), (0, 3), (3, 3)];
        Ifs::new(
            "four_corner",
            pts.iter()
                .map(|&(x, y)| Similarity::homothety(r.clone(), Vec2::new(s(x, 4), s(y, 4))))
                .collect(),
        )
        .unwrap()
    }

    fn pipeline(ifs: &Ifs, d: Direction) -> (Projected1DSystem, HullAssignment) {
        let g = rotation_group(ifs, GROUP_CAP);
        let sys = induce_system(ifs, &d, &g).unwrap();
        let hull = solve_hull(&sys).unwrap();
        (sys, hull)
    }

    #[test]
    fn four_corner_half_slope_system() {
        let (sys, hull) = pipeline(&four_corner(), Direction::slope(1, 2));
        assert_eq!(sys.nodes.len(), 1);
        let offsets: Vec<_> = sys.edges[0].iter().map(|e| e.offset.clone()).collect();
        assert_eq!(offsets, vec![s(0, 1), s(3, 4), s(3, 8), s(9, 8)]);
        assert!(sys.edges[0].iter().all(|e| e.ratio == s(1, 4)));
        assert_eq!(hull.hulls[0], (s(0, 1), s(3, 2)));
        assert!(hull.exact);
        match decide_interval(&sys, &hull, 0, 8) {
            IntervalVerdict::Interval { lo, hi, exactness } => {
                assert_eq!((lo, hi), (s(0, 1), s(3, 2)));
                assert_eq!(exactness, Exactness::Exact);
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn four_corner_horizontal_gap() {
        let (sys, hull) = pipeline(&four_corner(), Direction::slope(0, 1));
        assert_eq!(hull.hulls[0], (s(0, 1), s(1, 1)));
        match decide_interval(&sys, &hull, 0, 8) {
            IntervalVerdict::Gap(g) => {
                assert_eq!((g.lo, g.hi, g.depth), (s(1, 4), s(3, 4), 1));
                assert!((g.half_width - 0.25).abs() < 1e-15 && g.half_width <= 0.25);
            }
            v => panic!("{v:?}"),
        }
        let c2 = refine_cover(&sys, &hull, 0, 2).unwrap();
        assert_eq!(
            c2,
            vec![(s(0, 1), s(1, 16)), (s(3, 16), s(1, 4)), (s(3, 4), s(13, 16)), (s(15, 16), s(1, 1))]
        );
    }

    #[test]
    fn four_corner_diagonal_gap() {
        let (sys, hull) = pipeline(&four_corner(), Direction::slope(1, 1));
        assert!(decide_interval(&sys, &hull, 0, 8).is_gap());
    }

    #[test]
    fn vertical_offsets() {
        let (sys, _) = pipeline(&four_corner(), Direction::Vertical);
        assert_eq!(sys.nodes.len(), 1);
        let offsets: Vec<_> = sys.edges[0].iter().map(|e| e.offset.clone()).collect();
        assert_eq!(offsets, vec![s(0, 1), s(0, 1), s(3, 4), s(3, 4)]);
    }

    #[test]
    fn quarter_turn_gives_two_nodes() {
        let ifs = parse_ifs(
            r#"{"name":"q","maps":[
                {"r":"1/2","v":["0","0"],"cos":"0","sin":"1"},
                {"r":"1/2","v":["1/2","0"]}]}"#,
        )
        .unwrap();
        let (sys, hull) = pipeline(&ifs, Direction::slope(0, 1));
        assert_eq!(sys.nodes, vec![Direction::slope(0, 1), Direction::Vertical]);
        assert_eq!(sys.edges[0][0].target, 1);
        assert!(hull.exact);
        // Verify the hull fixed point by substitution.
        for (j, out) in sys.edges.iter().enumerate() {
            let imgs: Vec<_> = out
                .iter()
                .map(|e| e.image(&hull.hulls[e.target].0, &hull.hulls[e.target].1))
                .collect();
            let lo = imgs.iter().map(|x| x.0.clone()).reduce(Scalar::min).unwrap();
            let hi = imgs.iter().map(|x| x.1.clone()).reduce(Scalar::max).unwrap();
            assert_eq!((lo, hi), hull.hulls[j]);
        }
    }

    #[test]
    fn degenerate_hull_is_point_interval() {
        let ifs = Ifs::new("pt", vec![Similarity::homothety(s(1, 2), Vec2::new(s(1, 2), s(0, 1)))]).unwrap();
        let (sys, hull) = pipeline(&ifs, Direction::slope(0, 1));
        assert_eq!(hull.hulls[0], (s(1, 1), s(1, 1)));
        assert!(decide_interval(&sys, &hull, 0, 4).is_interval());
    }

    #[test]
    fn direction_helpers() {
        assert_eq!(Direction::from_angle(std::f64::consts::FRAC_PI_2), Direction::Vertical);
        assert!((Direction::slope(-1, 1).theta() - 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!("vertical".parse::<Direction>().unwrap(), Direction::Vertical);
        assert_eq!("4/5".parse::<Direction>().unwrap(), Direction::slope(4, 5));
        let (d, l) = Direction::from_functional(&Vec2::new(s(2, 1), s(1, 1)));
        assert_eq!((d, l), (Direction::slope(1, 2), s(2, 1)));
    }
}
