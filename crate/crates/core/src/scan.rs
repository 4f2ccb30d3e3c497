//! Certified enumeration of the interval projections of an IFS.
//!
//! The angle range `[0, π)` is tracked as a worklist of open arcs. Every
//! sampled direction either yields a gap certificate, which excludes an arc
//! around it, or an interval verdict, which is recorded as a certified
//! point. Exact candidates for homothety systems come from solving the
//! endpoint-matching equations of depth-1 tilings.

use std::f64::consts::PI;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::exec::{self, Execution};
use crate::ifs::{detect_collinear, rotation_group, support_bound, Collinearity, Ifs, RotationGroupResult};
use crate::linalg;
use crate::projection::{verify_with_group, DirectionVerdict, Direction, IntervalVerdict, GROUP_CAP};
use crate::scalar::{rational_approximation, round_down, round_up, simplest_rational_between, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    pub target_residue: f64,
    pub max_depth: usize,
    /// Maximum number of sampled directions.
    pub budget: usize,
    /// Largest slope denominator used for sample directions.
    pub max_den: u64,
    pub batch: usize,
}

impl Default for ScanParams {
    fn default() -> Self {
        ScanParams { target_residue: 1e-3, max_depth: 12, budget: 20_000, max_den: 1_000_000, batch: 32 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shortcut {
    None,
    InfiniteRotationGroup,
    CollinearSegment,
    /// Collinear attractor that is not a segment: it projects to a scaled
    /// copy of itself or to a point.
    CollinearCantor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanStatus {
    Complete,
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedDirection {
    /// Slope as an exact `p/q`, a decimal, or `"vertical"`.
    pub t: String,
    pub theta_rad: f64,
    /// Normalized projection interval.
    pub interval: [f64; 2],
    pub length: f64,
    pub exact: bool,
    /// Unnormalized endpoints under the functional `x + t*y` (or `y`).
    pub hull: [String; 2],
    /// `1 + t^2`.
    pub norm_sq: String,
    /// Squared normalized length.
    pub length_sq: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub center: f64,
    pub half_width: f64,
    pub lo: String,
    pub hi: String,
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcludedArc {
    pub lo_rad: f64,
    pub hi_rad: f64,
    /// Absent for arcs excluded by the infinite-rotation shortcut.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<GapSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Sampled direction whose certificate excludes this arc.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_rad: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleInterval {
    pub lo_rad: f64,
    pub hi_rad: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IpReport {
    pub name: String,
    pub shortcut: Shortcut,
    pub certified: Vec<CertifiedDirection>,
    pub excluded: Vec<ExcludedArc>,
    pub undecided: Vec<AngleInterval>,
    pub residue_rad: f64,
    pub params: ScanParams,
    pub status: ScanStatus,
    pub samples: usize,
}

impl IpReport {
    pub fn excluded_measure(&self) -> f64 {
        self.excluded.iter().map(|a| a.hi_rad - a.lo_rad).sum()
    }

    pub fn certified_directions(&self) -> Vec<Direction> {
        self.certified.iter().filter_map(|c| c.t.parse().ok()).collect()
    }
}

/// An exclusion arc `(theta - delta, theta + delta)` of non-interval
/// directions.
#[derive(Clone, Debug, PartialEq)]
pub struct ExclusionCertificate {
    pub theta: f64,
    pub delta: f64,
    pub gap: crate::projection::GapCertificate,
    /// Upper bound on the attractor's extent perpendicular to the
    /// projection line, normalized.
    pub extent: f64,
}

/// `arctan(2r / H)` rounded down, for a certified half-width `r` (lower
/// bound) and extent `H` (upper bound).
pub fn exclusion_radius(half_width: f64, extent: f64) -> Result<f64, AnalysisError> {
    if !(extent > 0.0) {
        return Err(AnalysisError::Precondition("attractor extent must be positive".into()));
    }
    if !(half_width > 0.0) {
        return Ok(0.0);
    }
    Ok(round_down(round_down(2.0 * half_width / extent).atan()).max(0.0))
}

/// Certified perpendicular extent of the attractor for direction `d`, in
/// normalized units, rounded up.
pub fn perpendicular_extent(ifs: &Ifs, d: &Direction) -> f64 {
    let w = d.perpendicular();
    let h = support_bound(ifs, &w) + support_bound(ifs, &-&w);
    round_up(round_up(h.to_f64()) / round_down(d.norm()))
}

pub fn exclusion_certificate(
    ifs: &Ifs,
    verdict: &DirectionVerdict,
) -> Result<Option<ExclusionCertificate>, AnalysisError> {
    let IntervalVerdict::Gap(gap) = &verdict.verdict else {
        return Ok(None);
    };
    let extent = perpendicular_extent(ifs, &verdict.direction);
    let delta = exclusion_radius(gap.half_width, extent)?;
    // Allow for the rounding of the float angle of the sample.
    let delta = round_down(delta - 8.0 * f64::EPSILON * PI);
    if delta <= 0.0 {
        return Ok(None);
    }
    Ok(Some(ExclusionCertificate { theta: verdict.direction.theta(), delta, gap: gap.clone(), extent }))
}

// ---------------------------------------------------------------------------
// Exact candidates

#[derive(Clone, Debug)]
struct Linear<T> {
    c0: T,
    c1: T,
}

/// Slopes whose depth-1 images of a homothety system can tile the hull,
/// verified by exact decision. Includes `Vertical` when it verifies.
pub fn solve_candidates(ifs: &Ifs, max_depth: usize) -> Result<Vec<Direction>, AnalysisError> {
    if !ifs.all_homothety() {
        return Err(AnalysisError::Precondition("candidate solving needs homotheties".into()));
    }
    let exact = ifs.is_exact();
    let group = rotation_group(ifs, GROUP_CAP);
    let mut roots: Vec<Scalar> = Vec::new();
    let m = ifs.len();
    let rho: Vec<Scalar> = ifs
        .maps()
        .iter()
        .map(|s| if s.homothety_sign() == Some(-1) { -&s.ratio } else { s.ratio.clone() })
        .collect();
    // Offsets o_i(t) = v_x + t v_y.
    let offsets: Vec<Linear<Scalar>> = ifs
        .maps()
        .iter()
        .map(|s| Linear { c0: s.translation.x.clone(), c1: s.translation.y.clone() })
        .collect();
    for ib in 0..m {
        for ia in 0..m {
            let Some((lo, hi)) = policy_hull(&rho, &offsets, ib, ia) else { continue };
            let images: Vec<(Linear<Scalar>, Linear<Scalar>)> = (0..m)
                .map(|i| {
                    let at = |p: &Linear<Scalar>| Linear {
                        c0: &rho[i] * &p.c0 + &offsets[i].c0,
                        c1: &rho[i] * &p.c1 + &offsets[i].c1,
                    };
                    if rho[i] > Scalar::zero() {
                        (at(&lo), at(&hi))
                    } else {
                        (at(&hi), at(&lo))
                    }
                })
                .collect();
            for i in 0..m {
                for j in 0..m {
                    if i == j {
                        continue;
                    }
                    let c0 = &images[i].1.c0 - &images[j].0.c0;
                    let c1 = &images[i].1.c1 - &images[j].0.c1;
                    if let Some(t) = linear_root(&c0, &c1, exact) {
                        roots.push(t);
                    }
                }
            }
        }
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    roots.dedup_by(|a, b| if exact { a == b } else { (a.to_f64() - b.to_f64()).abs() <= 1e-12 });
    let mut dirs: Vec<Direction> = roots
        .into_iter()
        .map(|t| {
            if !t.is_exact() && t.to_f64().abs() <= 1e-13 {
                Direction::Slope(Scalar::zero())
            } else {
                Direction::Slope(t)
            }
        })
        .collect();
    dirs.push(Direction::Vertical);
    let mut verified = Vec::new();
    for d in dirs {
        let v = verify_with_group(ifs, &d, &group, max_depth)?;
        if v.verdict.is_interval() {
            verified.push(d);
        }
    }
    verified.sort_by(|a, b| a.theta().total_cmp(&b.theta()));
    Ok(verified)
}

/// Hull endpoints `[a(t), b(t)]` for the policy where map `ib` attains the
/// maximum and map `ia` attains the minimum.
fn policy_hull(
    rho: &[Scalar],
    offsets: &[Linear<Scalar>],
    ib: usize,
    ia: usize,
) -> Option<(Linear<Scalar>, Linear<Scalar>)> {
    // Unknowns (b, A) with A = -a.
    // rho>0: b = rho b + o ;   rho<0: b = |rho| A + o
    // rho>0: A = rho A - o ;   rho<0: A = |rho| b - o
    let one = Scalar::one;
    let mut m = vec![vec![Scalar::zero(); 2]; 2];
    m[0][0] = one();
    m[1][1] = one();
    let (rb, ra) = (&rho[ib], &rho[ia]);
    if *rb > Scalar::zero() {
        m[0][0] = &m[0][0] - rb;
    } else {
        m[0][1] = rb.clone();
    }
    if *ra > Scalar::zero() {
        m[1][1] = &m[1][1] - ra;
    } else {
        m[1][0] = ra.clone();
    }
    let solve = |ob: &Scalar, oa: &Scalar| linalg::solve(m.clone(), vec![ob.clone(), -oa]).ok();
    let k0 = solve(&offsets[ib].c0, &offsets[ia].c0)?;
    let k1 = solve(&offsets[ib].c1, &offsets[ia].c1)?;
    let hi = Linear { c0: k0[0].clone(), c1: k1[0].clone() };
    let lo = Linear { c0: -&k0[1], c1: -&k1[1] };
    Some((lo, hi))
}

fn linear_root(c0: &Scalar, c1: &Scalar, exact: bool) -> Option<Scalar> {
    if exact {
        if c1.is_zero() {
            return None;
        }
    } else {
        let scale = c0.to_f64().abs().max(1.0);
        if c1.to_f64().abs() <= 1e-12 * scale {
            return None;
        }
    }
    let t = -(c0 / c1);
    if exact {
        Some(t)
    } else {
        Some(Scalar::Approx(t.to_f64()))
    }
}

// ---------------------------------------------------------------------------
// Angle worklist

fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(PI);
    if t >= PI {
        0.0
    } else {
        t
    }
}

/// Sample direction strictly inside the middle third of `(lo, hi)`:
/// vertical if the third contains π/2, otherwise the simplest rational
/// slope whose angle lies in it.
fn sample_direction(lo: f64, hi: f64, max_den: u64) -> Direction {
    let w = hi - lo;
    let (a, b) = (lo + w / 3.0, hi - w / 3.0);
    let half = PI / 2.0;
    if a <= half && half <= b {
        return Direction::Vertical;
    }
    let fallback = || Direction::from_angle(0.5 * (lo + hi));
    let (ta, tb) = (a.tan(), b.tan());
    let (ta, tb) = (ta + ta.abs() * 4.0 * f64::EPSILON, tb - tb.abs() * 4.0 * f64::EPSILON);
    if !(ta < tb) || !ta.is_finite() || !tb.is_finite() {
        return fallback();
    }
    let (Some(qa), Some(qb)) = (BigRational::from_float(ta), BigRational::from_float(tb)) else {
        return fallback();
    };
    let q = simplest_rational_between(&qa, &qb);
    if q.denom() > &num_bigint::BigInt::from(max_den) {
        let mid = 0.5 * (ta + tb);
        return match rational_approximation(mid, max_den) {
            Some(r) if r >= qa && r <= qb => Direction::Slope(Scalar::Exact(r)),
            _ => fallback(),
        };
    }
    Direction::Slope(Scalar::Exact(q))
}

fn format_slope(d: &Direction) -> String {
    d.to_string()
}

fn gap_summary(g: &crate::projection::GapCertificate) -> GapSummary {
    GapSummary { center: g.center, half_width: g.half_width, lo: g.lo.to_string(), hi: g.hi.to_string(), depth: g.depth }
}

fn certified_entry(v: &DirectionVerdict) -> CertifiedDirection {
    let (lo, hi) = v.normalized();
    let exact = match &v.verdict {
        IntervalVerdict::Interval { exactness, .. } => *exactness == crate::projection::Exactness::Exact,
        _ => false,
    };
    CertifiedDirection {
        t: format_slope(&v.direction),
        theta_rad: v.direction.theta(),
        interval: [lo, hi],
        length: hi - lo,
        exact,
        hull: [v.hull.0.to_string(), v.hull.1.to_string()],
        norm_sq: v.direction.norm_sq().to_string(),
        length_sq: v.length_sq().to_string(),
    }
}

struct Worklist {
    items: Vec<AngleInterval>,
}

impl Worklist {
    fn residue(&self) -> f64 {
        self.items.iter().map(|i| i.hi_rad - i.lo_rad).sum()
    }

    fn split_at(&mut self, theta: f64) {
        let mut out = Vec::with_capacity(self.items.len() + 1);
        for it in &self.items {
            if it.lo_rad < theta && theta < it.hi_rad {
                out.push(AngleInterval { lo_rad: it.lo_rad, hi_rad: theta });
                out.push(AngleInterval { lo_rad: theta, hi_rad: it.hi_rad });
            } else {
                out.push(*it);
            }
        }
        self.items = out;
    }

    /// Removes `(lo, hi)` (and its translates by ±π) from every item and
    /// returns the removed pieces.
    fn subtract(&mut self, lo: f64, hi: f64) -> Vec<AngleInterval> {
        let mut removed = Vec::new();
        let mut out = Vec::with_capacity(self.items.len() + 2);
        for it in &self.items {
            let mut pieces = vec![*it];
            for shift in [-PI, 0.0, PI] {
                let (a, b) = (lo + shift, hi + shift);
                let mut next = Vec::new();
                for p in pieces {
                    let (ca, cb) = (a.max(p.lo_rad), b.min(p.hi_rad));
                    if ca >= cb {
                        next.push(p);
                        continue;
                    }
                    removed.push(AngleInterval { lo_rad: ca, hi_rad: cb });
                    if p.lo_rad < ca {
                        next.push(AngleInterval { lo_rad: p.lo_rad, hi_rad: ca });
                    }
                    if cb < p.hi_rad {
                        next.push(AngleInterval { lo_rad: cb, hi_rad: p.hi_rad });
                    }
                }
                pieces = next;
            }
            out.extend(pieces);
        }
        out.sort_by(|a, b| a.lo_rad.total_cmp(&b.lo_rad));
        self.items = out;
        removed
    }
}

pub fn scan_enumerate(ifs: &Ifs, params: &ScanParams, exec: Execution) -> Result<IpReport, AnalysisError> {
    let mut report = IpReport {
        name: ifs.name().to_string(),
        shortcut: Shortcut::None,
        certified: Vec::new(),
        excluded: Vec::new(),
        undecided: Vec::new(),
        residue_rad: 0.0,
        params: params.clone(),
        status: ScanStatus::Complete,
        samples: 0,
    };
    let group = rotation_group(ifs, GROUP_CAP);
    if let RotationGroupResult::ExceedsCap(_) = group {
        report.shortcut = Shortcut::InfiniteRotationGroup;
        report.excluded.push(ExcludedArc {
            lo_rad: 0.0,
            hi_rad: PI,
            gap: None,
            delta: None,
            t: None,
            theta_rad: None,
        });
        return Ok(report);
    }
    if let Collinearity::Collinear { direction, .. } = detect_collinear(ifs) {
        let (d, _) = Direction::from_functional(&direction);
        let v = verify_with_group(ifs, &d, &group, params.max_depth)?;
        match &v.verdict {
            IntervalVerdict::Interval { .. } => {
                report.shortcut = Shortcut::CollinearSegment;
                report.certified.push(certified_entry(&v));
            }
            IntervalVerdict::Gap(g) => {
                report.shortcut = Shortcut::CollinearCantor;
                report.excluded.push(ExcludedArc {
                    lo_rad: 0.0,
                    hi_rad: PI,
                    gap: Some(gap_summary(g)),
                    delta: None,
                    t: Some(format_slope(&d)),
                    theta_rad: Some(normalize_angle(d.theta())),
                });
            }
            IntervalVerdict::Undecided { .. } => {
                report.shortcut = Shortcut::CollinearCantor;
                report.undecided.push(AngleInterval { lo_rad: 0.0, hi_rad: PI });
                report.residue_rad = PI;
                report.status = ScanStatus::Incomplete;
            }
        }
        return Ok(report);
    }

    let mut work = Worklist { items: vec![AngleInterval { lo_rad: 0.0, hi_rad: PI }] };
    let mut certified_angles: Vec<f64> = Vec::new();
    if ifs.all_homothety() {
        for d in solve_candidates(ifs, params.max_depth)? {
            let v = verify_with_group(ifs, &d, &group, params.max_depth)?;
            let theta = normalize_angle(d.theta());
            certified_angles.push(theta);
            work.split_at(theta);
            report.certified.push(certified_entry(&v));
        }
    }

    let min_width = 64.0 * f64::EPSILON * PI;
    while work.residue() > params.target_residue && report.samples < params.budget {
        let mut order: Vec<usize> = (0..work.items.len())
            .filter(|&i| work.items[i].hi_rad - work.items[i].lo_rad > min_width)
            .collect();
        if order.is_empty() {
            break;
        }
        order.sort_by(|&a, &b| {
            let (wa, wb) = (work.items[a].hi_rad - work.items[a].lo_rad, work.items[b].hi_rad - work.items[b].lo_rad);
            wb.total_cmp(&wa).then(a.cmp(&b))
        });
        let take = params.batch.max(1).min(params.budget - report.samples).min(order.len());
        let batch: Vec<AngleInterval> = order[..take].iter().map(|&i| work.items[i]).collect();
        report.samples += take;
        let results = exec::map(exec, &batch, |it| {
            let d = sample_direction(it.lo_rad, it.hi_rad, params.max_den);
            let v = verify_with_group(ifs, &d, &group, params.max_depth)?;
            let cert = exclusion_certificate(ifs, &v)?;
            Ok::<_, AnalysisError>((v, cert))
        });
        for (it, res) in batch.iter().zip(results) {
            let (v, cert) = res?;
            let theta = v.direction.theta();
            match (&v.verdict, cert) {
                (IntervalVerdict::Gap(gap), Some(cert)) => {
                    let removed = work.subtract(cert.theta - cert.delta, cert.theta + cert.delta);
                    for piece in removed {
                        report.excluded.push(ExcludedArc {
                            lo_rad: piece.lo_rad,
                            hi_rad: piece.hi_rad,
                            gap: Some(gap_summary(gap)),
                            delta: Some(cert.delta),
                            t: Some(format_slope(&v.direction)),
                            theta_rad: Some(theta),
                        });
                    }
                }
                (IntervalVerdict::Interval { .. }, _)
                    if !certified_angles.iter().any(|c| (c - theta).abs() < 1e-9) =>
                {
                    certified_angles.push(theta);
                    work.split_at(theta);
                    report.certified.push(certified_entry(&v));
                }
                _ => {
                    let mid = 0.5 * (it.lo_rad + it.hi_rad);
                    work.split_at(if it.lo_rad < theta && theta < it.hi_rad { theta } else { mid });
                }
            }
        }
    }
    report.certified.sort_by(|a, b| a.theta_rad.total_cmp(&b.theta_rad));
    report.excluded.sort_by(|a, b| a.lo_rad.total_cmp(&b.lo_rad));
    // Merge adjacent undecided pieces that are not separated by a certified point.
    let mut undecided: Vec<AngleInterval> = Vec::new();
    for it in work.items {
        if let Some(last) = undecided.last_mut() {
            if last.hi_rad == it.lo_rad && !certified_angles.contains(&it.lo_rad) {
                last.hi_rad = it.hi_rad;
                continue;
            }
        }
        undecided.push(it);
    }
    report.residue_rad = undecided.iter().map(|i| i.hi_rad - i.lo_rad).sum();
    report.undecided = undecided;
    if report.residue_rad > params.target_residue {
        report.status = ScanStatus::Incomplete;
    }
    Ok(report)
}

/// Exact `t` values of the certified slope directions, or `None` for
/// vertical/approximate ones.
pub fn exact_slopes(report: &IpReport) -> Vec<Option<BigRational>> {
    report
        .certified
        .iter()
        .map(|c| match c.t.parse::<Direction>() {
            Ok(Direction::Slope(Scalar::Exact(q))) => Some(q),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::Similarity;
    use crate::linalg::Vec2;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    fn homotheties(name: &str, r: Scalar, pts: &[(i64, i64, i64)]) -> Ifs {
        Ifs::new(
            name,
            pts.iter().map(|&(x, y, d)| Similarity::homothety(r.clone(), Vec2::new(s(x, d), s(y, d)))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn radius_examples() {
        assert!((exclusion_radius(0.5, 1.0).unwrap() - PI / 4.0).abs() < 1e-14);
        assert!((exclusion_radius(0.25, 1.0).unwrap() - 0.5f64.atan()).abs() < 1e-14);
        assert!(exclusion_radius(0.25, 1.0).unwrap() <= 0.5f64.atan());
        assert!(exclusion_radius(1e-300, 1.0).unwrap() < 1e-299);
        assert!(exclusion_radius(0.1, 0.0).is_err());
    }

    #[test]
    fn four_corner_candidates() {
        let ifs = homotheties("fc", s(1, 4), &[(0, 0, 4), (3, 0, 4), (0, 3, 4), (3, 3, 4)]);
        let c = solve_candidates(&ifs, 4).unwrap();
        let mut ts: Vec<String> = c.iter().map(|d| d.to_string()).collect();
        ts.sort();
        assert_eq!(ts, vec!["-1/2", "-2", "1/2", "2"]);
    }

    #[test]
    fn right_triangle_candidates() {
        let ifs = homotheties("sr", s(1, 3), &[(0, 0, 1), (2, 0, 3), (0, 2, 3)]);
        let c = solve_candidates(&ifs, 4).unwrap();
        let mut ts: Vec<String> = c.iter().map(|d| d.to_string()).collect();
        ts.sort();
        assert_eq!(ts, vec!["-1", "1/2", "2"]);
    }

    #[test]
    fn subtract_wraps_around() {
        let mut w = Worklist { items: vec![AngleInterval { lo_rad: 0.0, hi_rad: PI }] };
        let removed = w.subtract(-0.1, 0.1);
        let total: f64 = removed.iter().map(|a| a.hi_rad - a.lo_rad).sum();
        assert!((total - 0.2).abs() < 1e-12);
        assert_eq!(w.items.len(), 1);
        assert!((w.items[0].lo_rad - 0.1).abs() < 1e-15);
    }

    #[test]
    fn sample_inside_middle_third() {
        for (lo, hi) in [(0.0, 0.3), (2.0, 2.5), (1.0, 2.0), (0.7, 0.7000001)] {
            let d = sample_direction(lo, hi, 1_000_000);
            let th = d.theta();
            let w = hi - lo;
            assert!(th >= lo + w / 3.0 - 1e-12 && th <= hi - w / 3.0 + 1e-12, "{lo} {hi} {th}");
        }
    }

    #[test]
    fn scan_four_corner_sequential_matches_parallel() {
        let ifs = homotheties("fc", s(1, 4), &[(0, 0, 4), (3, 0, 4), (0, 3, 4), (3, 3, 4)]);
        let p = ScanParams::default();
        let a = scan_enumerate(&ifs, &p, Execution::Sequential).unwrap();
        let b = scan_enumerate(&ifs, &p, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.certified.len(), 4);
        assert!(a.residue_rad <= 1e-3);
        assert_eq!(a.status, ScanStatus::Complete);
        let total = a.excluded_measure() + a.residue_rad;
        assert!((total - PI).abs() < 1e-9);
    }

    #[test]
    fn collinear_shortcuts() {
        let seg = homotheties("seg", s(1, 2), &[(0, 0, 1), (1, 2, 2)]);
        let r = scan_enumerate(&seg, &ScanParams::default(), Execution::Sequential).unwrap();
        assert_eq!(r.shortcut, Shortcut::CollinearSegment);
        assert_eq!(r.certified.len(), 1);

        let cantor = homotheties("cantor", s(1, 5), &[(0, 0, 1), (4, 4, 5)]);
        let r = scan_enumerate(&cantor, &ScanParams::default(), Execution::Sequential).unwrap();
        assert_eq!(r.shortcut, Shortcut::CollinearCantor);
        assert!(r.certified.is_empty());
        assert_eq!(r.status, ScanStatus::Complete);
        assert!((r.excluded_measure() - PI).abs() < 1e-15);
    }
}
