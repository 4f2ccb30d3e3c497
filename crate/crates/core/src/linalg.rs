//! Small planar vectors and matrices over [`Scalar`], plus a dense solver.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::AnalysisError;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Vec2 {
    pub x: Scalar,
    pub y: Scalar,
}

impl Vec2 {
    pub fn new(x: Scalar, y: Scalar) -> Self {
        Vec2 { x, y }
    }

    pub fn zero() -> Self {
        Vec2::new(Scalar::zero(), Scalar::zero())
    }

    pub fn dot(&self, other: &Vec2) -> Scalar {
        &self.x * &other.x + &self.y * &other.y
    }

    /// z-component of the planar cross product.
    pub fn cross(&self, other: &Vec2) -> Scalar {
        &self.x * &other.y - &self.y * &other.x
    }

    pub fn scale(&self, k: &Scalar) -> Vec2 {
        Vec2::new(&self.x * k, &self.y * k)
    }

    pub fn norm_sq(&self) -> Scalar {
        self.dot(self)
    }

    pub fn is_exact(&self) -> bool {
        self.x.is_exact() && self.y.is_exact()
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [self.x.to_f64(), self.y.to_f64()]
    }
}

impl Add for &Vec2 {
    type Output = Vec2;
    fn add(self, rhs: &Vec2) -> Vec2 {
        Vec2::new(&self.x + &rhs.x, &self.y + &rhs.y)
    }
}

impl Sub for &Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: &Vec2) -> Vec2 {
        Vec2::new(&self.x - &rhs.x, &self.y - &rhs.y)
    }
}

impl Neg for &Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-&self.x, -&self.y)
    }
}

/// Row-major 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat2 {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

impl Mat2 {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::new(Scalar::one(), Scalar::zero(), Scalar::zero(), Scalar::one())
    }

    pub fn neg_identity() -> Self {
        Mat2::new(-Scalar::one(), Scalar::zero(), Scalar::zero(), -Scalar::one())
    }

    /// Counterclockwise rotation with the given cosine and sine.
    pub fn rotation(cos: Scalar, sin: Scalar) -> Self {
        Mat2::new(cos.clone(), -&sin, sin, cos)
    }

    /// `diag(1, -1)` applied after the rotation.
    pub fn reflected_rotation(cos: Scalar, sin: Scalar) -> Self {
        Mat2::new(cos.clone(), -&sin, -&sin, -cos)
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new(self.a.clone(), self.c.clone(), self.b.clone(), self.d.clone())
    }

    pub fn det(&self) -> Scalar {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        Vec2::new(&self.a * &v.x + &self.b * &v.y, &self.c * &v.x + &self.d * &v.y)
    }

    pub fn is_exact(&self) -> bool {
        self.a.is_exact() && self.b.is_exact() && self.c.is_exact() && self.d.is_exact()
    }

    pub fn approx_eq(&self, other: &Mat2, tol: f64) -> bool {
        self.a.approx_eq(&other.a, tol)
            && self.b.approx_eq(&other.b, tol)
            && self.c.approx_eq(&other.c, tol)
            && self.d.approx_eq(&other.d, tol)
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        [[self.a.to_f64(), self.b.to_f64()], [self.c.to_f64(), self.d.to_f64()]]
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        Mat2::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
///
/// Exact inputs are solved exactly; a pivot is treated as zero when it is
/// exactly zero, or below `1e-13` times the row scale for floats.
pub fn solve(mut m: Vec<Vec<Scalar>>, mut rhs: Vec<Scalar>) -> Result<Vec<Scalar>, AnalysisError> {
    let n = rhs.len();
    assert!(m.len() == n && m.iter().all(|row| row.len() == n));
    let scale = m
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x.to_f64().abs())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                let (a, b) = (&m[i][col], &m[j][col]);
                if a.is_exact() && b.is_exact() {
                    // Any nonzero exact pivot works; prefer the first.
                    (!a.is_zero()).cmp(&!b.is_zero()).then(j.cmp(&i))
                } else {
                    a.to_f64().abs().total_cmp(&b.to_f64().abs())
                }
            })
            .expect("nonempty range");
        let p = &m[pivot][col];
        let degenerate = if p.is_exact() { p.is_zero() } else { p.to_f64().abs() <= 1e-13 * scale };
        if degenerate {
            return Err(AnalysisError::Singular(format!("zero pivot in column {col}")));
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let pv = m[col][col].clone();
        for row in (col + 1)..n {
            if m[row][col].is_zero() {
                continue;
            }
            let f = &m[row][col] / &pv;
            for k in col..n {
                let delta = &f * &m[col][k];
                m[row][k] = &m[row][k] - delta;
            }
            let delta = &f * &rhs[col];
            rhs[row] = &rhs[row] - delta;
        }
    }
    let mut x = vec![Scalar::zero(); n];
    for row in (0..n).rev() {
        let mut acc = rhs[row].clone();
        for k in (row + 1)..n {
            acc = acc - &m[row][k] * &x[k];
        }
        x[row] = acc / &m[row][row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn exact_solve() {
        let m = vec![vec![s(2, 1), s(1, 1)], vec![s(1, 1), s(3, 1)]];
        let x = solve(m, vec![s(3, 1), s(5, 1)]).unwrap();
        assert_eq!(x, vec![s(4, 5), s(7, 5)]);
    }

    #[test]
    fn singular_detected() {
        let m = vec![vec![s(1, 1), s(2, 1)], vec![s(2, 1), s(4, 1)]];
        assert!(solve(m, vec![s(1, 1), s(1, 1)]).is_err());
    }

    #[test]
    fn rotation_composition() {
        let r = Mat2::rotation(s(3, 5), s(4, 5));
        let r2 = &r * &r;
        assert_eq!(r2, Mat2::rotation(s(-7, 25), s(24, 25)));
        assert_eq!(r.det(), Scalar::one());
        assert_eq!(Mat2::reflected_rotation(s(3, 5), s(4, 5)).det(), -Scalar::one());
    }
}
