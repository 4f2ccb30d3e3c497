#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

use ssproj_core::ifs::{Ifs, Similarity};
use ssproj_core::linalg::Vec2;
use ssproj_core::projection::{Direction, IntervalVerdict};
use ssproj_core::scalar::Scalar;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn exact(s: &Scalar) -> BigRational {
    match s {
        Scalar::Exact(r) => r.clone(),
        Scalar::Approx(x) => panic!("expected exact scalar, got {x}"),
    }
}

/// Float affine data `(r * rotation, translation)` of each map.
fn affine(ifs: &Ifs) -> Vec<([[f64; 2]; 2], [f64; 2])> {
    ifs.maps()
        .iter()
        .map(|m| {
            let r = m.ratio.to_f64();
            let l = m.rotation.to_f64();
            ([[r * l[0][0], r * l[0][1]], [r * l[1][0], r * l[1][1]]], m.translation.to_f64())
        })
        .collect()
}

/// Images of the first map's fixed point under all words of length `depth`.
pub fn word_points(ifs: &Ifs, depth: usize) -> Vec<[f64; 2]> {
    let maps = affine(ifs);
    let (l, t) = maps[0];
    // Fixed point of x -> Lx + t, solved directly.
    let (a, b, c, d) = (1.0 - l[0][0], -l[0][1], -l[1][0], 1.0 - l[1][1]);
    let det = a * d - b * c;
    let mut pts = vec![[(d * t[0] - b * t[1]) / det, (a * t[1] - c * t[0]) / det]];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(pts.len() * maps.len());
        for (l, t) in &maps {
            for p in &pts {
                next.push([l[0][0] * p[0] + l[0][1] * p[1] + t[0], l[1][0] * p[0] + l[1][1] * p[1] + t[1]]);
            }
        }
        pts = next;
    }
    pts
}

/// Sorted projections of `points` onto the unit vector of `d`.
pub fn project_sorted(points: &[[f64; 2]], d: &Direction) -> Vec<f64> {
    let (u, v) = match d {
        Direction::Vertical => (0.0, 1.0),
        Direction::Slope(t) => {
            let t = t.to_f64();
            let n = (1.0 + t * t).sqrt();
            (1.0 / n, t / n)
        }
    };
    let mut xs: Vec<f64> = points.iter().map(|p| u * p[0] + v * p[1]).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs
}

/// Brute-force agreement check for a verdict against depth-`depth` samples.
///
/// An interval must have no sampled gap above `2 r_max^depth` times the
/// hull length; a gap certificate must contain no sampled point.
pub fn oracle_agrees(sorted: &[f64], r_max: f64, depth: usize, verdict: &IntervalVerdict, norm: f64) -> Result<(), String> {
    let hull = sorted[sorted.len() - 1] - sorted[0];
    match verdict {
        IntervalVerdict::Interval { .. } => {
            let bound = 2.0 * r_max.powi(depth as i32) * hull * (1.0 + 1e-9) + 1e-12;
            let worst = sorted.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
            if worst > bound {
                return Err(format!("interval verdict but sampled gap {worst:e} > {bound:e}"));
            }
        }
        IntervalVerdict::Gap(g) => {
            let (lo, hi) = (g.lo.to_f64() / norm, g.hi.to_f64() / norm);
            let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
            let i = sorted.partition_point(|&x| x <= lo + slack);
            if i < sorted.len() && sorted[i] < hi - slack {
                return Err(format!("gap ({lo}, {hi}) contains sample {}", sorted[i]));
            }
        }
        IntervalVerdict::Undecided { .. } => {}
    }
    Ok(())
}

/// Mean and second moment tensor of the self-similar measure of a
/// homothety system, from the fixed-point equations
/// `m = Σ p_i (r_i m + b_i)` and
/// `M = Σ p_i (r_i² M + r_i (m b_iᵀ + b_i mᵀ) + b_i b_iᵀ)`.
pub fn homothety_moments(
    ratios: &[BigRational],
    trans: &[[BigRational; 2]],
    weights: &[BigRational],
) -> ([BigRational; 2], [[BigRational; 2]; 2]) {
    let one = BigRational::one();
    let pr: BigRational = weights.iter().zip(ratios).map(|(p, r)| p * r).sum();
    let pr2: BigRational = weights.iter().zip(ratios).map(|(p, r)| p * r * r).sum();
    let mut m = [BigRational::zero(), BigRational::zero()];
    for (p, b) in weights.iter().zip(trans) {
        for k in 0..2 {
            m[k] += p * &b[k];
        }
    }
    let denom = &one - &pr;
    let m = [&m[0] / &denom, &m[1] / &denom];
    let mut s: [[BigRational; 2]; 2] = Default::default();
    for ((p, r), b) in weights.iter().zip(ratios).zip(trans) {
        for i in 0..2 {
            for j in 0..2 {
                s[i][j] += p * (r * (&m[i] * &b[j] + &b[i] * &m[j]) + &b[i] * &b[j]);
            }
        }
    }
    let denom = &one - &pr2;
    let second = [
        [&s[0][0] / &denom, &s[0][1] / &denom],
        [&s[1][0] / &denom, &s[1][1] / &denom],
    ];
    (m, second)
}

/// Centered covariance of the natural measure of a homothety system whose
/// ratios sum to one.
pub fn natural_covariance(ratios: &[BigRational], trans: &[[BigRational; 2]]) -> [[BigRational; 2]; 2] {
    let (m, s) = homothety_moments(ratios, trans, ratios);
    [
        [&s[0][0] - &m[0] * &m[0], &s[0][1] - &m[0] * &m[1]],
        [&s[1][0] - &m[1] * &m[0], &s[1][1] - &m[1] * &m[1]],
    ]
}

/// Random homothety system with rational data: 2 or 3 maps, ratios
/// `1/k`, translations with denominators up to 8 in `[0, 1]`.
pub fn random_homothety_system<R: Rng>(rng: &mut R, index: usize) -> Ifs {
    let m = rng.gen_range(2..=3);
    let maps = (0..m)
        .map(|_| {
            let k = rng.gen_range(2..=4);
            let den = rng.gen_range(1..=8);
            let x = rng.gen_range(0..=den);
            let y = rng.gen_range(0..=den);
            Similarity::homothety(Scalar::ratio(1, k), Vec2::new(Scalar::ratio(x, den), Scalar::ratio(y, den)))
        })
        .collect();
    Ifs::new(format!("random_{index}"), maps).expect("valid random system")
}

/// Small rational slopes plus the vertical direction.
pub fn probe_directions() -> Vec<Direction> {
    let mut out = vec![Direction::Vertical];
    for (p, q) in [(0, 1), (1, 1), (-1, 1), (1, 2), (-1, 2), (2, 1), (-2, 1), (1, 3), (-3, 2)] {
        out.push(Direction::slope(p, q));
    }
    out
}
