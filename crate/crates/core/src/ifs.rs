//! Planar self-similar iterated function systems.
//!
//! A map is stored as `x -> ratio * rotation * x + translation` with
//! `0 < ratio < 1` and an orthogonal `rotation`. Negative homotheties use
//! `rotation = -I`, so a positive ratio is always enough.

use std::collections::BinaryHeap;

use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{AnalysisError, ParseError};
use crate::exec::{self, Execution};
use crate::linalg::{self, Mat2, Vec2};
use crate::maxplus::{self, AffineTerm, MaxAffineSystem};
use crate::scalar::{float_margin, round_down, round_up, Scalar};

/// Tolerance for validating approximate orthogonal matrices.
pub const ORTHO_TOL: f64 = 1e-12;

/// Tolerance for matching approximate rotation-group elements.
const GROUP_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Similarity {
    pub ratio: Scalar,
    pub rotation: Mat2,
    pub translation: Vec2,
}

impl Similarity {
    pub fn homothety(ratio: Scalar, translation: Vec2) -> Self {
        Similarity { ratio, rotation: Mat2::identity(), translation }
    }

    pub fn apply(&self, p: &Vec2) -> Vec2 {
        let q = self.rotation.apply(p).scale(&self.ratio);
        &q + &self.translation
    }

    pub fn linear(&self) -> Mat2 {
        let r = &self.ratio;
        let t = &self.rotation;
        Mat2::new(r * &t.a, r * &t.b, r * &t.c, r * &t.d)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Similarity) -> Similarity {
        Similarity {
            ratio: &self.ratio * &other.ratio,
            rotation: &self.rotation * &other.rotation,
            translation: self.apply(&other.translation),
        }
    }

    /// Rotation part equal to `I` or `-I`.
    pub fn is_homothety(&self) -> bool {
        self.homothety_sign().is_some()
    }

    /// `Some(1)` for rotation `I`, `Some(-1)` for `-I`.
    pub fn homothety_sign(&self) -> Option<i32> {
        let t = &self.rotation;
        let tol = if t.is_exact() { 0.0 } else { ORTHO_TOL };
        if t.approx_eq(&Mat2::identity(), tol) {
            Some(1)
        } else if t.approx_eq(&Mat2::neg_identity(), tol) {
            Some(-1)
        } else {
            None
        }
    }

    pub fn is_exact(&self) -> bool {
        self.ratio.is_exact() && self.rotation.is_exact() && self.translation.is_exact()
    }

    pub fn fixed_point(&self) -> Vec2 {
        let l = self.linear();
        let m = vec![
            vec![Scalar::one() - &l.a, -&l.b],
            vec![-&l.c, Scalar::one() - &l.d],
        ];
        let x = linalg::solve(m, vec![self.translation.x.clone(), self.translation.y.clone()])
            .expect("contractions have a unique fixed point");
        Vec2::new(x[0].clone(), x[1].clone())
    }

    fn validate(&self, index: usize) -> Result<(), ParseError> {
        if !(self.ratio > Scalar::zero() && self.ratio < Scalar::one()) {
            return Err(ParseError::RatioOutOfRange { index, ratio: self.ratio.to_string() });
        }
        let t = &self.rotation;
        let col0 = &t.a * &t.a + &t.c * &t.c;
        let col1 = &t.b * &t.b + &t.d * &t.d;
        let cross = &t.a * &t.b + &t.c * &t.d;
        let tol = if t.is_exact() { 0.0 } else { ORTHO_TOL };
        if !col0.approx_eq(&Scalar::one(), tol) {
            return Err(ParseError::NotOrthogonal { index, norm: col0.to_string() });
        }
        if !col1.approx_eq(&Scalar::one(), tol) || !cross.approx_eq(&Scalar::zero(), tol) {
            return Err(ParseError::NotOrthogonal { index, norm: col1.to_string() });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ifs {
    name: String,
    maps: Vec<Similarity>,
}

impl Ifs {
    pub fn new(name: impl Into<String>, maps: Vec<Similarity>) -> Result<Self, ParseError> {
        if maps.is_empty() {
            return Err(ParseError::EmptyMaps);
        }
        for (i, m) in maps.iter().enumerate() {
            m.validate(i)?;
        }
        Ok(Ifs { name: name.into(), maps })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn all_homothety(&self) -> bool {
        self.maps.iter().all(Similarity::is_homothety)
    }

    pub fn is_exact(&self) -> bool {
        self.maps.iter().all(Similarity::is_exact)
    }

    pub fn max_ratio(&self) -> f64 {
        self.maps.iter().map(|m| m.ratio.to_f64()).fold(0.0, f64::max)
    }

    pub fn ratio_sum(&self) -> Scalar {
        self.maps.iter().fold(Scalar::zero(), |acc, m| acc + &m.ratio)
    }

    pub fn fixed_points(&self) -> Vec<Vec2> {
        self.maps.iter().map(Similarity::fixed_point).collect()
    }

    /// `S_word = S_{w0} ∘ S_{w1} ∘ ...`
    pub fn word_map(&self, word: &[usize]) -> Similarity {
        let mut acc = Similarity::homothety(Scalar::one(), Vec2::zero());
        for &i in word {
            acc = acc.compose(&self.maps[i]);
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Document format

/// A number written either as a string (`"3/4"`, `"0.5"`) or a JSON number.
/// JSON numbers are always approximate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberField {
    Text(String),
    Float(f64),
}

impl NumberField {
    fn to_scalar(&self) -> Result<Scalar, ParseError> {
        match self {
            NumberField::Text(s) => s.parse(),
            NumberField::Float(x) if x.is_finite() => Ok(Scalar::Approx(*x)),
            NumberField::Float(x) => Err(ParseError::Number(x.to_string())),
        }
    }
}

impl From<&Scalar> for NumberField {
    fn from(s: &Scalar) -> Self {
        NumberField::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDocument {
    pub r: NumberField,
    pub v: [NumberField; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cos: Option<NumberField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sin: Option<NumberField>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reflect: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_deg: Option<NumberField>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsDocument {
    pub name: String,
    pub maps: Vec<MapDocument>,
}

impl MapDocument {
    fn to_similarity(&self, index: usize) -> Result<Similarity, ParseError> {
        let ratio = self.r.to_scalar()?;
        let translation = Vec2::new(self.v[0].to_scalar()?, self.v[1].to_scalar()?);
        let (cos, sin) = match (&self.cos, &self.sin, &self.rotation_deg) {
            (None, None, None) => (Scalar::one(), Scalar::zero()),
            (Some(c), Some(s), None) => (c.to_scalar()?, s.to_scalar()?),
            (None, None, Some(deg)) => {
                let deg = deg.to_scalar()?;
                let turns = &deg / Scalar::int(90);
                let quarter = turns
                    .as_rational()
                    .filter(|q| q.is_integer())
                    .and_then(|q| q.to_integer().mod_floor(&4.into()).to_u8());
                match quarter {
                    Some(0) => (Scalar::one(), Scalar::zero()),
                    Some(1) => (Scalar::zero(), Scalar::one()),
                    Some(2) => (Scalar::int(-1), Scalar::zero()),
                    Some(_) => (Scalar::zero(), Scalar::int(-1)),
                    None => {
                        let rad = deg.to_f64().to_radians();
                        (Scalar::Approx(rad.cos()), Scalar::Approx(rad.sin()))
                    }
                }
            }
            _ => {
                return Err(ParseError::Map {
                    index,
                    message: "give both cos and sin, or rotation_deg alone".into(),
                })
            }
        };
        let rotation = if self.reflect.unwrap_or(false) {
            Mat2::reflected_rotation(cos, sin)
        } else {
            Mat2::rotation(cos, sin)
        };
        Ok(Similarity { ratio, rotation, translation })
    }

    fn from_similarity(m: &Similarity) -> Self {
        let t = &m.rotation;
        let reflect = t.det() < Scalar::zero();
        // rotation: [[c,-s],[s,c]]; reflected: [[c,-s],[-s,-c]]
        let (cos, sin) = (t.a.clone(), -&t.b);
        let identity = !reflect && m.is_homothety() && m.homothety_sign() == Some(1) && t.is_exact();
        MapDocument {
            r: (&m.ratio).into(),
            v: [(&m.translation.x).into(), (&m.translation.y).into()],
            cos: (!identity).then(|| (&cos).into()),
            sin: (!identity).then(|| (&sin).into()),
            reflect: reflect.then_some(true),
            rotation_deg: None,
        }
    }
}

impl IfsDocument {
    pub fn to_ifs(&self) -> Result<Ifs, ParseError> {
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(i, m)| m.to_similarity(i))
            .collect::<Result<Vec<_>, _>>()?;
        Ifs::new(self.name.clone(), maps)
    }

    pub fn from_ifs(ifs: &Ifs) -> Self {
        IfsDocument {
            name: ifs.name.clone(),
            maps: ifs.maps.iter().map(MapDocument::from_similarity).collect(),
        }
    }
}

pub fn parse_ifs(text: &str) -> Result<Ifs, ParseError> {
    let doc: IfsDocument =
        serde_json::from_str(text).map_err(|e| ParseError::Document(e.to_string()))?;
    doc.to_ifs()
}

pub fn serialize_ifs(ifs: &Ifs) -> String {
    serde_json::to_string_pretty(&IfsDocument::from_ifs(ifs)).expect("document serializes")
}

// ---------------------------------------------------------------------------
// Dimension and rotation group

/// Solves `sum r_i^s = 1`. Exactly 1 when the ratios sum to 1 exactly.
pub fn similarity_dimension(ifs: &Ifs, tol: f64) -> Scalar {
    let sum = ifs.ratio_sum();
    if sum.is_exact() && sum == Scalar::one() {
        return Scalar::one();
    }
    let ratios: Vec<f64> = ifs.maps.iter().map(|m| m.ratio.to_f64()).collect();
    let f = |s: f64| ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    let m = ratios.len() as f64;
    let (mut lo, mut hi) = (0.0f64, m.ln() / (1.0 / ifs.max_ratio()).ln() + 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.abs() <= tol || hi - lo <= f64::EPSILON * hi {
            return Scalar::Approx(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Scalar::Approx(0.5 * (lo + hi))
}

#[derive(Clone, Debug, PartialEq)]
pub enum RotationGroupResult {
    Finite { elements: Vec<Mat2> },
    ExceedsCap(usize),
}

impl RotationGroupResult {
    pub fn order(&self) -> Option<usize> {
        match self {
            RotationGroupResult::Finite { elements } => Some(elements.len()),
            RotationGroupResult::ExceedsCap(_) => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, RotationGroupResult::Finite { .. })
    }
}

fn mat_matches(a: &Mat2, b: &Mat2) -> bool {
    let tol = if a.is_exact() && b.is_exact() { 0.0 } else { GROUP_TOL };
    a.approx_eq(b, tol)
}

/// Breadth-first closure of the orthogonal parts under composition.
pub fn rotation_group(ifs: &Ifs, cap: usize) -> RotationGroupResult {
    let cap = cap.max(1);
    let generators: Vec<&Mat2> = ifs.maps.iter().map(|m| &m.rotation).collect();
    let mut elements = vec![Mat2::identity()];
    let mut frontier = 0;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        frontier += 1;
        for g in &generators {
            let next = &current * g;
            if !elements.iter().any(|e| mat_matches(e, &next)) {
                if elements.len() == cap {
                    return RotationGroupResult::ExceedsCap(cap);
                }
                elements.push(next);
            }
        }
    }
    RotationGroupResult::Finite { elements }
}

// ---------------------------------------------------------------------------
// Support function

const ORBIT_CAP: usize = 256;

/// Certified upper bound on `sup_{x in K} u·x`, exact when possible.
pub fn support_bound(ifs: &Ifs, u: &Vec2) -> Scalar {
    if u.x.is_zero() && u.y.is_zero() {
        return Scalar::zero();
    }
    if let Some(orbit) = functional_orbit(ifs, u) {
        let weight = u.norm_sq().to_f64().sqrt();
        let rows = orbit
            .iter()
            .map(|w| {
                ifs.maps
                    .iter()
                    .map(|m| {
                        let image = signed_transpose_apply(m, w);
                        let target = orbit
                            .iter()
                            .position(|o| *o == image)
                            .expect("orbit is closed");
                        AffineTerm {
                            coef: m.ratio.clone(),
                            target,
                            offset: w.dot(&m.translation),
                        }
                    })
                    .collect()
            })
            .collect();
        let sys = MaxAffineSystem {
            rows,
            weights: vec![weight.max(f64::MIN_POSITIVE); orbit.len()],
            contraction: ifs.max_ratio(),
        };
        if let Ok(sol) = maxplus::solve(&sys) {
            return sol.values[0].clone();
        }
    }
    Scalar::Approx(support_branch_and_bound(ifs, u.to_f64()))
}

/// Orbit of `u` under the transposed rotations when it closes exactly:
/// always for homotheties (`±u`), and for exact rotation data with a
/// small finite group.
fn functional_orbit(ifs: &Ifs, u: &Vec2) -> Option<Vec<Vec2>> {
    if ifs.all_homothety() {
        let mut orbit = vec![u.clone()];
        if ifs.maps.iter().any(|m| m.homothety_sign() == Some(-1)) {
            orbit.push(-u);
        }
        return Some(orbit);
    }
    if !(u.is_exact() && ifs.maps.iter().all(|m| m.rotation.is_exact())) {
        return None;
    }
    let mut orbit = vec![u.clone()];
    let mut i = 0;
    while i < orbit.len() {
        let w = orbit[i].clone();
        i += 1;
        for m in &ifs.maps {
            let image = m.rotation.transpose().apply(&w);
            if !orbit.contains(&image) {
                if orbit.len() >= ORBIT_CAP {
                    return None;
                }
                orbit.push(image);
            }
        }
    }
    Some(orbit)
}

/// `T^T w`, with a float `±I` acting as an exact sign change.
pub(crate) fn signed_transpose_apply(m: &Similarity, w: &Vec2) -> Vec2 {
    match m.homothety_sign() {
        Some(1) => w.clone(),
        Some(_) => -w,
        None => m.rotation.transpose().apply(w),
    }
}

struct Node {
    upper: f64,
    linear: [[f64; 2]; 2],
    shift: [f64; 2],
    ratio: f64,
    depth: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.upper == other.upper
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.upper.total_cmp(&other.upper)
    }
}

/// Invariant ball `B(center, radius)` with `S_i(B) ⊆ B` for every map.
pub fn invariant_ball(ifs: &Ifs) -> ([f64; 2], f64) {
    let c = ifs.maps[0].fixed_point().to_f64();
    let mut radius = 0.0f64;
    for m in &ifs.maps {
        let img = apply_f64(m, c);
        let d = ((img[0] - c[0]).powi(2) + (img[1] - c[1]).powi(2)).sqrt();
        radius = radius.max(d / (1.0 - m.ratio.to_f64()));
    }
    let scale = c[0].abs() + c[1].abs() + radius;
    (c, round_up(radius + float_margin(scale, 8)))
}

fn apply_f64(m: &Similarity, p: [f64; 2]) -> [f64; 2] {
    let l = m.linear().to_f64();
    let v = m.translation.to_f64();
    [l[0][0] * p[0] + l[0][1] * p[1] + v[0], l[1][0] * p[0] + l[1][1] * p[1] + v[1]]
}

fn support_branch_and_bound(ifs: &Ifs, u: [f64; 2]) -> f64 {
    let (c, radius) = invariant_ball(ifs);
    let unorm = (u[0] * u[0] + u[1] * u[1]).sqrt();
    let maps: Vec<([[f64; 2]; 2], [f64; 2], f64)> = ifs
        .maps
        .iter()
        .map(|m| (m.linear().to_f64(), m.translation.to_f64(), m.ratio.to_f64()))
        .collect();
    let scale = unorm * (c[0].abs() + c[1].abs() + radius);
    let tol = 1e-12 * scale.max(1e-300);
    let eval = |lin: &[[f64; 2]; 2], sh: &[f64; 2]| {
        let p = [lin[0][0] * c[0] + lin[0][1] * c[1] + sh[0], lin[1][0] * c[0] + lin[1][1] * c[1] + sh[1]];
        u[0] * p[0] + u[1] * p[1]
    };
    let root_lin = [[1.0, 0.0], [0.0, 1.0]];
    let root_shift = [0.0, 0.0];
    let mut lower = eval(&root_lin, &root_shift);
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        upper: lower + radius * unorm,
        linear: root_lin,
        shift: root_shift,
        ratio: 1.0,
        depth: 0,
    });
    let mut expanded = 0usize;
    while let Some(node) = heap.pop() {
        let slack = float_margin(scale, node.depth + 8);
        if node.upper - lower <= tol || expanded > 200_000 {
            return round_up(node.upper + slack);
        }
        expanded += 1;
        for (lin, v, r) in &maps {
            let l = node.linear;
            let linear = [
                [l[0][0] * lin[0][0] + l[0][1] * lin[1][0], l[0][0] * lin[0][1] + l[0][1] * lin[1][1]],
                [l[1][0] * lin[0][0] + l[1][1] * lin[1][0], l[1][0] * lin[0][1] + l[1][1] * lin[1][1]],
            ];
            let shift = [
                l[0][0] * v[0] + l[0][1] * v[1] + node.shift[0],
                l[1][0] * v[0] + l[1][1] * v[1] + node.shift[1],
            ];
            let ratio = node.ratio * r;
            let value = eval(&linear, &shift);
            lower = lower.max(value);
            heap.push(Node { upper: value + ratio * radius * unorm, linear, shift, ratio, depth: node.depth + 1 });
        }
    }
    round_up(lower + float_margin(scale, 8))
}

// ---------------------------------------------------------------------------
// Cylinder covers

/// Axis-aligned square `center ± half_width` containing the attractor.
#[derive(Clone, Debug, PartialEq)]
pub struct AttractorFrame {
    pub center: Vec2,
    pub half_width: Scalar,
}

/// Bounding square from the four axis support bounds, enlarged when
/// needed (and possible) so that every map sends it into itself.
pub fn attractor_frame(ifs: &Ifs) -> AttractorFrame {
    let e = |x: i64, y: i64| Vec2::new(Scalar::int(x), Scalar::int(y));
    let xmax = support_bound(ifs, &e(1, 0));
    let xmin = -support_bound(ifs, &e(-1, 0));
    let ymax = support_bound(ifs, &e(0, 1));
    let ymin = -support_bound(ifs, &e(0, -1));
    let half = Scalar::ratio(1, 2);
    let center = Vec2::new((&xmax + &xmin) * &half, (&ymax + &ymin) * &half);
    let mut radius = ((&xmax - &xmin) * &half).max((&ymax - &ymin) * &half);
    for m in &ifs.maps {
        let t = &m.rotation;
        let kappa = (t.a.abs() + t.b.abs()).max(t.c.abs() + t.d.abs());
        let contraction = &m.ratio * &kappa;
        if contraction >= Scalar::one() {
            continue;
        }
        let img = &m.apply(&center) - &center;
        let offset = img.x.abs().max(img.y.abs());
        let needed = offset / (Scalar::one() - contraction);
        radius = radius.max(needed);
    }
    AttractorFrame { center, half_width: radius }
}

/// One cylinder: `S_word` applied to the attractor frame. The image is a
/// square of half-width `radius` about `center`, turned by `rotation`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderBox {
    pub word: Vec<usize>,
    pub center: Vec2,
    pub radius: Scalar,
    pub rotation: Mat2,
}

impl CylinderBox {
    /// Rotation is a symmetry of the axis-aligned square.
    pub fn axis_aligned(&self) -> bool {
        let t = &self.rotation;
        if !t.is_exact() {
            let z = |s: &Scalar| s.to_f64().abs() <= ORTHO_TOL;
            return (z(&t.b) && z(&t.c)) || (z(&t.a) && z(&t.d));
        }
        (t.b.is_zero() && t.c.is_zero()) || (t.a.is_zero() && t.d.is_zero())
    }

    /// Half-width of an axis-aligned square containing the cylinder.
    pub fn aabb_half_width(&self) -> Scalar {
        if self.axis_aligned() {
            return self.radius.clone();
        }
        let t = &self.rotation;
        let kappa = (t.a.abs() + t.b.abs()).max(t.c.abs() + t.d.abs());
        let w = &self.radius * kappa;
        if w.is_exact() {
            w
        } else {
            Scalar::Approx(round_up(w.to_f64()))
        }
    }
}

pub const DEFAULT_COVER_BUDGET: usize = 4_000_000;

pub fn cylinder_cover(
    ifs: &Ifs,
    depth: usize,
    budget: usize,
    exec: Execution,
) -> Result<Vec<CylinderBox>, AnalysisError> {
    let m = ifs.len();
    let count = (m as f64).powi(depth as i32);
    if count * (depth.max(1) as f64) > budget as f64 {
        return Err(AnalysisError::Budget(format!("{m}^{depth} cylinders exceed budget {budget}")));
    }
    let frame = attractor_frame(ifs);
    cover_from_frame(ifs, &frame, depth, exec)
}

fn cover_from_frame(
    ifs: &Ifs,
    frame: &AttractorFrame,
    depth: usize,
    exec: Execution,
) -> Result<Vec<CylinderBox>, AnalysisError> {
    let mut level: Vec<(CylinderBox, Similarity)> = vec![(
        CylinderBox {
            word: Vec::new(),
            center: frame.center.clone(),
            radius: frame.half_width.clone(),
            rotation: Mat2::identity(),
        },
        Similarity::homothety(Scalar::one(), Vec2::zero()),
    )];
    for _ in 0..depth {
        let children = exec::map(exec, &level, |(b, s)| {
            ifs.maps
                .iter()
                .enumerate()
                .map(|(i, mi)| {
                    let composed = s.compose(mi);
                    let mut word = b.word.clone();
                    word.push(i);
                    (
                        CylinderBox {
                            word,
                            center: composed.apply(&frame.center),
                            radius: &composed.ratio * &frame.half_width,
                            rotation: composed.rotation.clone(),
                        },
                        composed,
                    )
                })
                .collect::<Vec<_>>()
        });
        level = children.into_iter().flatten().collect();
    }
    Ok(level.into_iter().map(|(b, _)| b).collect())
}

// ---------------------------------------------------------------------------
// Strong separation

#[derive(Clone, Debug, PartialEq)]
pub enum SscVerdict {
    /// Cylinders of distinct first-level pieces are at least `min_gap` apart.
    Separated { min_gap: Scalar, depth: usize },
    /// Two first-level pieces share `point`.
    NotSeparated { first: usize, second: usize, point: Vec2 },
    Undecided { depth: usize },
}

fn sample_points(ifs: &Ifs) -> Vec<Vec2> {
    let fixed = ifs.fixed_points();
    let mut pts = fixed.clone();
    for m in ifs.maps() {
        for p in &fixed {
            pts.push(m.apply(p));
        }
    }
    pts
}

pub fn certify_ssc(ifs: &Ifs, max_depth: usize, exec: Execution) -> SscVerdict {
    let m = ifs.len();
    if m == 1 {
        return SscVerdict::Separated { min_gap: Scalar::Approx(f64::INFINITY), depth: 0 };
    }
    let pts = sample_points(ifs);
    for i in 0..m {
        for j in (i + 1)..m {
            for p in &pts {
                let a = ifs.maps[i].apply(p);
                for q in &pts {
                    let b = ifs.maps[j].apply(q);
                    let same = if a.is_exact() && b.is_exact() {
                        a == b
                    } else {
                        let d = &a - &b;
                        d.x.to_f64().abs() + d.y.to_f64().abs() <= 1e-13
                    };
                    if same {
                        return SscVerdict::NotSeparated { first: i, second: j, point: a };
                    }
                }
            }
        }
    }
    let frame = attractor_frame(ifs);
    let box_budget = 1 << 12;
    let mut depth = 1;
    while depth <= max_depth.max(1) {
        if (m as f64).powi(depth as i32) > box_budget as f64 {
            break;
        }
        let cover = match cover_from_frame(ifs, &frame, depth, exec) {
            Ok(c) => c,
            Err(_) => break,
        };
        if let Some(gap) = min_cross_gap(&cover, exec) {
            return SscVerdict::Separated { min_gap: gap, depth };
        }
        depth += 1;
    }
    SscVerdict::Undecided { depth: depth - 1 }
}

/// Lower bound on the distance between two cylinder squares, or `None`
/// when they may touch.
fn box_gap(a: &CylinderBox, b: &CylinderBox) -> Scalar {
    if a.axis_aligned() && b.axis_aligned() {
        let reach = &a.radius + &b.radius;
        let dx = (&a.center.x - &b.center.x).abs() - &reach;
        let dy = (&a.center.y - &b.center.y).abs() - &reach;
        return dx.max(dy);
    }
    let d = (&a.center - &b.center).to_f64();
    let dist = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let reach = std::f64::consts::SQRT_2 * (a.radius.to_f64() + b.radius.to_f64());
    Scalar::Approx(round_down(dist - round_up(reach)))
}

fn min_cross_gap(cover: &[CylinderBox], exec: Execution) -> Option<Scalar> {
    let per_box: Vec<Option<Scalar>> = exec::map_range(exec, cover.len(), |i| {
        let a = &cover[i];
        let mut best: Option<Scalar> = None;
        for b in &cover[i + 1..] {
            if a.word[0] == b.word[0] {
                continue;
            }
            let g = box_gap(a, b);
            if g <= Scalar::zero() {
                return Some(Scalar::Approx(f64::NEG_INFINITY));
            }
            best = Some(match best {
                Some(x) => x.min(g),
                None => g,
            });
        }
        best
    });
    let mut best: Option<Scalar> = None;
    for g in per_box.into_iter().flatten() {
        if g <= Scalar::zero() {
            return None;
        }
        best = Some(match best {
            Some(x) => x.min(g),
            None => g,
        });
    }
    best
}

// ---------------------------------------------------------------------------
// Collinearity

#[derive(Clone, Debug, PartialEq)]
pub enum Collinearity {
    /// Three attractor points that are not on a common line.
    NotCollinear { witnesses: [Vec2; 3] },
    /// The attractor lies on `point + s * direction`.
    Collinear { point: Vec2, direction: Vec2 },
}

pub fn detect_collinear(ifs: &Ifs) -> Collinearity {
    let mut pts = sample_points(ifs);
    for a in ifs.maps() {
        for b in ifs.maps() {
            pts.push(a.compose(b).fixed_point());
        }
    }
    let exact = pts.iter().all(Vec2::is_exact);
    let scale = pts
        .iter()
        .map(|p| p.x.to_f64().abs() + p.y.to_f64().abs())
        .fold(1.0f64, f64::max);
    let tol = if exact { 0.0 } else { 1e-10 * scale * scale };
    let p0 = pts[0].clone();
    let far = pts
        .iter()
        .max_by(|a, b| {
            (*a - &p0).norm_sq().to_f64().total_cmp(&(*b - &p0).norm_sq().to_f64())
        })
        .cloned()
        .expect("nonempty");
    let direction = &far - &p0;
    let degenerate = if exact {
        direction.x.is_zero() && direction.y.is_zero()
    } else {
        direction.norm_sq().to_f64().sqrt() <= 1e-12 * scale
    };
    if degenerate {
        return Collinearity::Collinear {
            point: p0,
            direction: Vec2::new(Scalar::one(), Scalar::zero()),
        };
    }
    for p in &pts {
        let c = direction.cross(&(p - &p0));
        if c.to_f64().abs() > tol && !(c.is_exact() && c.is_zero()) {
            return Collinearity::NotCollinear { witnesses: [p0, far, p.clone()] };
        }
    }
    Collinearity::Collinear { point: p0, direction }
}
