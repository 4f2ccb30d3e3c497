//! Moments of the natural self-similar measure.

use serde::{Deserialize, Serialize};

use crate::error::AnalysisError;
use crate::ifs::{similarity_dimension, Ifs};
use crate::linalg::{self, Vec2};
use crate::projection::{verify_direction, Direction, IntervalVerdict};
use crate::scalar::Scalar;
use crate::scan::IpReport;

/// Symmetric 2x2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sym2 {
    pub xx: Scalar,
    pub xy: Scalar,
    pub yy: Scalar,
}

impl Sym2 {
    pub fn scalar(c: Scalar) -> Self {
        Sym2 { xx: c.clone(), xy: Scalar::zero(), yy: c }
    }

    pub fn trace(&self) -> Scalar {
        &self.xx + &self.yy
    }

    pub fn det(&self) -> Scalar {
        &self.xx * &self.yy - self.xy.square()
    }

    pub fn is_exact(&self) -> bool {
        self.xx.is_exact() && self.xy.is_exact() && self.yy.is_exact()
    }

    /// Both eigenvalues are nonnegative.
    pub fn is_psd(&self, tol: f64) -> bool {
        if self.is_exact() {
            return self.trace() >= Scalar::zero() && self.det() >= Scalar::zero();
        }
        self.trace().to_f64() >= -tol && self.det().to_f64() >= -tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentSummary {
    pub weights: Vec<Scalar>,
    pub mean: Vec2,
    /// Centered second moments.
    pub cov: Sym2,
}

/// Weights `r_i^s` for the similarity dimension `s`. Exact when the
/// ratios sum to one.
pub fn natural_weights(ifs: &Ifs) -> Vec<Scalar> {
    let s = similarity_dimension(ifs, 1e-15);
    if s.is_exact() && s == Scalar::one() {
        return ifs.maps().iter().map(|m| m.ratio.clone()).collect();
    }
    let s = s.to_f64();
    let raw: Vec<f64> = ifs.maps().iter().map(|m| m.ratio.to_f64().powf(s)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| Scalar::Approx(w / total)).collect()
}

fn check_weights(ifs: &Ifs, w: &[Scalar]) -> Result<(), AnalysisError> {
    if w.len() != ifs.len() || w.iter().any(|x| *x <= Scalar::zero()) {
        return Err(AnalysisError::Precondition("need one positive weight per map".into()));
    }
    let total = w.iter().fold(Scalar::zero(), |acc, x| acc + x);
    if !total.approx_eq(&Scalar::one(), if total.is_exact() { 0.0 } else { 1e-12 }) {
        return Err(AnalysisError::Precondition(format!("weights sum to {total}, not 1")));
    }
    Ok(())
}

pub fn measure_mean(ifs: &Ifs, w: &[Scalar]) -> Result<Vec2, AnalysisError> {
    check_weights(ifs, w)?;
    let mut m = vec![vec![Scalar::one(), Scalar::zero()], vec![Scalar::zero(), Scalar::one()]];
    let mut rhs = vec![Scalar::zero(), Scalar::zero()];
    for (map, wi) in ifs.maps().iter().zip(w) {
        let l = map.linear();
        m[0][0] = &m[0][0] - wi * &l.a;
        m[0][1] = &m[0][1] - wi * &l.b;
        m[1][0] = &m[1][0] - wi * &l.c;
        m[1][1] = &m[1][1] - wi * &l.d;
        rhs[0] = &rhs[0] + wi * &map.translation.x;
        rhs[1] = &rhs[1] + wi * &map.translation.y;
    }
    let x = linalg::solve(m, rhs)?;
    Ok(Vec2::new(x[0].clone(), x[1].clone()))
}

pub fn measure_covariance(ifs: &Ifs, w: &[Scalar]) -> Result<Sym2, AnalysisError> {
    let mean = measure_mean(ifs, w)?;
    // Unknowns (Qxx, Qxy, Qyy) of Q = ∫ x x^T dμ.
    let mut m = vec![
        vec![Scalar::one(), Scalar::zero(), Scalar::zero()],
        vec![Scalar::zero(), Scalar::one(), Scalar::zero()],
        vec![Scalar::zero(), Scalar::zero(), Scalar::one()],
    ];
    let mut rhs = vec![Scalar::zero(), Scalar::zero(), Scalar::zero()];
    for (map, wi) in ifs.maps().iter().zip(w) {
        let r = &map.ratio;
        let t = &map.rotation;
        let (a, b, c, d) = (&t.a, &t.b, &t.c, &t.d);
        let k = wi * r.square();
        let two = Scalar::int(2);
        let rows = [
            [a * a, &two * a * b, b * b],
            [a * c, a * d + b * c, b * d],
            [c * c, &two * c * d, d * d],
        ];
        for (i, row) in rows.iter().enumerate() {
            for (j, coef) in row.iter().enumerate() {
                m[i][j] = &m[i][j] - &k * coef;
            }
        }
        let p = t.apply(&mean);
        let v = &map.translation;
        let cross = [
            &two * &p.x * &v.x,
            &p.x * &v.y + &v.x * &p.y,
            &two * &p.y * &v.y,
        ];
        let outer = [&v.x * &v.x, &v.x * &v.y, &v.y * &v.y];
        for i in 0..3 {
            rhs[i] = &rhs[i] + wi * (r * &cross[i] + &outer[i]);
        }
    }
    let q = linalg::solve(m, rhs)?;
    Ok(Sym2 {
        xx: &q[0] - mean.x.square(),
        xy: &q[1] - &mean.x * &mean.y,
        yy: &q[2] - mean.y.square(),
    })
}

pub fn moment_summary(ifs: &Ifs, weights: Option<Vec<Scalar>>) -> Result<MomentSummary, AnalysisError> {
    let weights = weights.unwrap_or_else(|| natural_weights(ifs));
    let mean = measure_mean(ifs, &weights)?;
    let cov = measure_covariance(ifs, &weights)?;
    Ok(MomentSummary { weights, mean, cov })
}

/// `β(u, u)` for `u = (cos, sin)`.
pub fn inertia_form(c: &Sym2, cos: &Scalar, sin: &Scalar) -> Scalar {
    cos.square() * &c.xx + Scalar::int(2) * cos * sin * &c.xy + sin.square() * &c.yy
}

pub fn inertia_at(c: &Sym2, gamma: f64) -> f64 {
    inertia_form(c, &Scalar::Approx(gamma.cos()), &Scalar::Approx(gamma.sin())).to_f64()
}

/// Rational point `((m²-n²)/(m²+n²), 2mn/(m²+n²))` on the unit circle.
pub fn rational_unit(m: i64, n: i64) -> (Scalar, Scalar) {
    let d = m * m + n * n;
    (Scalar::ratio(m * m - n * n, d), Scalar::ratio(2 * m * n, d))
}

pub fn unit_at(gamma: f64) -> (Scalar, Scalar) {
    (Scalar::Approx(gamma.cos()), Scalar::Approx(gamma.sin()))
}

/// Recovers the form from its values on three unit vectors
/// `(cos, sin, value)` that are pairwise independent.
pub fn fit_form_from_three(samples: &[(Scalar, Scalar, Scalar); 3]) -> Result<Sym2, AnalysisError> {
    let m = samples
        .iter()
        .map(|(c, s, _)| vec![c.square(), Scalar::int(2) * c * s, s.square()])
        .collect();
    let rhs = samples.iter().map(|(_, _, v)| v.clone()).collect();
    let x = linalg::solve(m, rhs)?;
    Ok(Sym2 { xx: x[0].clone(), xy: x[1].clone(), yy: x[2].clone() })
}

/// Recovers the mean from its projections `u·m = value` onto three unit
/// vectors; the third projection must agree with the first two.
pub fn mean_from_projection_means(samples: &[(Scalar, Scalar, Scalar); 3], tol: f64) -> Result<Vec2, AnalysisError> {
    let m = samples[..2].iter().map(|(c, s, _)| vec![c.clone(), s.clone()]).collect();
    let rhs = samples[..2].iter().map(|(_, _, v)| v.clone()).collect();
    let x = linalg::solve(m, rhs)?;
    let mean = Vec2::new(x[0].clone(), x[1].clone());
    let (c, s, v) = &samples[2];
    let third = c * &mean.x + s * &mean.y;
    let ok = if third.is_exact() && v.is_exact() { third == *v } else { third.approx_eq(v, tol) };
    if !ok {
        return Err(AnalysisError::Inconsistent(format!(
            "third projection {v} disagrees with {third} implied by the first two"
        )));
    }
    Ok(mean)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InertiaSample {
    pub gamma: f64,
    pub value: f64,
    /// Exact value when the direction has rational coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub applicable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_sq: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2_over_12: Option<String>,
    pub pass: bool,
    pub samples: Vec<InertiaSample>,
    pub failures: Vec<String>,
}

/// Angles at which the inertia identity is sampled.
pub const THEOREM_ANGLES: [f64; 4] = [0.0, std::f64::consts::PI / 7.0, 1.0, 2.5];

fn same(a: &Scalar, b: &Scalar, tol: f64) -> bool {
    if a.is_exact() && b.is_exact() {
        a == b
    } else {
        a.approx_eq(b, tol * (1.0 + a.to_f64().abs().max(b.to_f64().abs())))
    }
}

/// Checks the inertia identity `β(u_γ, u_γ) = c²/12` for a system with
/// at least three certified interval directions of common length `c`.
pub fn check_inertia_theorem(ifs: &Ifs, report: &IpReport, tol: f64) -> Result<TheoremCheck, AnalysisError> {
    let summary = moment_summary(ifs, None)?;
    let mut entries = Vec::new();
    for c in &report.certified {
        let d: Direction = c.t.parse().map_err(|e| AnalysisError::Inconsistent(format!("{e}")))?;
        let len_sq: Scalar = c.length_sq.parse().map_err(|e| AnalysisError::Inconsistent(format!("{e}")))?;
        let lo: Scalar = c.hull[0].parse().map_err(|e| AnalysisError::Inconsistent(format!("{e}")))?;
        let hi: Scalar = c.hull[1].parse().map_err(|e| AnalysisError::Inconsistent(format!("{e}")))?;
        entries.push((d, len_sq, lo, hi));
    }
    let mut check = TheoremCheck {
        applicable: false,
        c: None,
        c_sq: None,
        c2_over_12: None,
        pass: false,
        samples: Vec::new(),
        failures: Vec::new(),
    };
    // Largest class of equal lengths.
    let best = entries
        .iter()
        .map(|(_, l, _, _)| (l, entries.iter().filter(|(_, m, _, _)| same(l, m, tol)).count()))
        .max_by_key(|(_, n)| *n);
    let Some((c_sq, count)) = best.filter(|(_, n)| *n >= 3) else {
        let lengths: Vec<String> = entries.iter().map(|(_, l, _, _)| l.to_string()).collect();
        check.failures.push(format!("fewer than three equal lengths; squared lengths {lengths:?}"));
        return Ok(check);
    };
    let c_sq = c_sq.clone();
    check.applicable = true;
    check.c = Some(c_sq.to_f64().sqrt());
    let target = &c_sq / Scalar::int(12);
    check.c_sq = Some(c_sq.to_string());
    check.c2_over_12 = Some(target.to_string());
    if count != entries.len() {
        check.failures.push("some certified direction has a different length".into());
    }
    for (d, _, lo, hi) in &entries {
        let mid = (lo + hi) / Scalar::int(2);
        let projected = d.project(&summary.mean);
        if !same(&mid, &projected, tol) {
            check.failures.push(format!("direction {d}: midpoint {mid} but projected mean {projected}"));
        }
    }
    let cov = &summary.cov;
    if !same(&cov.xy, &Scalar::zero(), tol) || !same(&cov.xx, &cov.yy, tol) {
        check.failures.push(format!("covariance not isotropic: {} {} {}", cov.xx, cov.xy, cov.yy));
    }
    for gamma in THEOREM_ANGLES {
        let value = if gamma == 0.0 {
            inertia_form(cov, &Scalar::one(), &Scalar::zero())
        } else {
            Scalar::Approx(inertia_at(cov, gamma))
        };
        if !same(&value, &target, tol) {
            check.failures.push(format!("γ = {gamma}: inertia {value} but c²/12 = {target}"));
        }
        check.samples.push(InertiaSample {
            gamma,
            value: value.to_f64(),
            exact: value.is_exact().then(|| value.to_string()),
        });
    }
    for (m, n) in [(2, 1), (3, 2)] {
        let (c, s) = rational_unit(m, n);
        let value = inertia_form(cov, &c, &s);
        if !same(&value, &target, tol) {
            check.failures.push(format!("u = ({c}, {s}): inertia {value} but c²/12 = {target}"));
        }
        check.samples.push(InertiaSample {
            gamma: s.to_f64().atan2(c.to_f64()),
            value: value.to_f64(),
            exact: value.is_exact().then(|| value.to_string()),
        });
    }
    check.pass = check.failures.is_empty();
    Ok(check)
}

/// Sup distance between the depth-`depth` cylinder distribution of the
/// projected measure (cylinder masses placed at the midpoints of their
/// projected hulls) and the uniform distribution on the projection.
pub fn projection_uniformity(
    ifs: &Ifs,
    d: &Direction,
    depth: usize,
    weights: Option<Vec<Scalar>>,
) -> Result<f64, AnalysisError> {
    if !ifs.all_homothety() {
        return Err(AnalysisError::Precondition("uniformity check needs homotheties".into()));
    }
    let v = verify_direction(ifs, d, depth.max(1))?;
    let IntervalVerdict::Interval { lo, hi, .. } = &v.verdict else {
        return Err(AnalysisError::Precondition(format!("direction {d} is not an interval projection")));
    };
    let weights = weights.unwrap_or_else(|| natural_weights(ifs));
    check_weights(ifs, &weights)?;
    let (a, b) = (lo.to_f64(), hi.to_f64());
    if b <= a {
        return Ok(0.0);
    }
    let f = d.functional();
    let maps: Vec<(f64, f64, f64)> = ifs
        .maps()
        .iter()
        .zip(&weights)
        .map(|(m, w)| {
            let sign = m.homothety_sign().unwrap_or(1) as f64;
            (sign * m.ratio.to_f64(), f.dot(&m.translation).to_f64(), w.to_f64())
        })
        .collect();
    // (rho, offset, mass) of each cylinder map x -> rho x + offset.
    let mut level = vec![(1.0f64, 0.0f64, 1.0f64)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * maps.len());
        for &(rho, off, mass) in &level {
            for &(r, o, w) in &maps {
                next.push((rho * r, rho * o + off, mass * w));
            }
        }
        level = next;
    }
    let mut atoms: Vec<(f64, f64)> = level
        .iter()
        .map(|&(rho, off, mass)| (off + rho * 0.5 * (a + b), mass))
        .collect();
    atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut cdf = 0.0;
    let mut dev = 0.0f64;
    for (x, mass) in atoms {
        let u = ((x - a) / (b - a)).clamp(0.0, 1.0);
        dev = dev.max((cdf - u).abs());
        cdf += mass;
        dev = dev.max((cdf - u).abs());
    }
    Ok(dev)
}

/// Serialized moment report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub name: String,
    pub weights: Vec<String>,
    pub mean: [f64; 2],
    pub mean_exact: Option<[String; 2]>,
    pub cov: [[f64; 2]; 2],
    pub cov_exact: Option<[[String; 2]; 2]>,
    pub inertia_samples: Vec<InertiaSample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem_check: Option<TheoremCheck>,
}

impl MomentReport {
    pub fn new(name: &str, summary: &MomentSummary, theorem_check: Option<TheoremCheck>) -> Self {
        let m = &summary.mean;
        let c = &summary.cov;
        let inertia_samples = THEOREM_ANGLES
            .iter()
            .map(|&gamma| InertiaSample { gamma, value: inertia_at(c, gamma), exact: None })
            .collect();
        MomentReport {
            name: name.to_string(),
            weights: summary.weights.iter().map(Scalar::to_string).collect(),
            mean: m.to_f64(),
            mean_exact: m.is_exact().then(|| [m.x.to_string(), m.y.to_string()]),
            cov: [[c.xx.to_f64(), c.xy.to_f64()], [c.xy.to_f64(), c.yy.to_f64()]],
            cov_exact: c.is_exact().then(|| {
                [[c.xx.to_string(), c.xy.to_string()], [c.xy.to_string(), c.yy.to_string()]]
            }),
            inertia_samples,
            theorem_check,
        }
    }
}
