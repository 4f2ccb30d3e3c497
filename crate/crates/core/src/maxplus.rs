//! Fixed points of contracting max-affine systems
//! `x_j = max_e (coef_e * x_target(e) + offset_e)` with `coef_e >= 0`.
//!
//! Support functions and 1-D hull endpoints of self-similar sets are both
//! solutions of such systems. Exact inputs are solved by policy iteration
//! with exact linear solves, so the result is verified by substitution.
//! Float inputs use value iteration and are padded upward by a residual
//! bound, which makes every returned value an upper bound.

use crate::error::AnalysisError;
use crate::linalg;
use crate::scalar::{float_margin, round_up, Scalar};

#[derive(Clone, Debug)]
pub struct AffineTerm {
    pub coef: Scalar,
    pub target: usize,
    pub offset: Scalar,
}

#[derive(Clone, Debug)]
pub struct MaxAffineSystem {
    pub rows: Vec<Vec<AffineTerm>>,
    /// Positive per-variable scales; the system contracts by `contraction`
    /// in the norm `max_j |x_j| / weight_j`.
    pub weights: Vec<f64>,
    pub contraction: f64,
}

#[derive(Clone, Debug)]
pub struct MaxAffineSolution {
    pub values: Vec<Scalar>,
    /// Index of the attaining term per row.
    pub policy: Vec<usize>,
    pub exact: bool,
}

impl MaxAffineSystem {
    pub fn is_exact(&self) -> bool {
        self.rows
            .iter()
            .flatten()
            .all(|t| t.coef.is_exact() && t.offset.is_exact())
    }

    fn eval_f64(&self, x: &[f64]) -> (Vec<f64>, Vec<usize>) {
        let mut out = Vec::with_capacity(self.rows.len());
        let mut pol = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let (best, arg) = row
                .iter()
                .enumerate()
                .map(|(k, t)| (t.coef.to_f64() * x[t.target] + t.offset.to_f64(), k))
                .fold((f64::NEG_INFINITY, 0), |acc, cur| if cur.0 > acc.0 { cur } else { acc });
            out.push(best);
            pol.push(arg);
        }
        (out, pol)
    }

    fn value_iterate(&self) -> (Vec<f64>, Vec<usize>) {
        let n = self.rows.len();
        let mut x = vec![0.0; n];
        let mut pol = vec![0; n];
        for _ in 0..20_000 {
            let (next, p) = self.eval_f64(&x);
            let change = next
                .iter()
                .zip(&x)
                .zip(&self.weights)
                .map(|((a, b), w)| (a - b).abs() / w)
                .fold(0.0f64, f64::max);
            let scale = next.iter().map(|v| v.abs()).fold(1.0f64, f64::max);
            x = next;
            pol = p;
            if change <= 1e-16 * scale {
                break;
            }
        }
        (x, pol)
    }
}

pub fn solve(sys: &MaxAffineSystem) -> Result<MaxAffineSolution, AnalysisError> {
    let n = sys.rows.len();
    if n == 0 || sys.rows.iter().any(|r| r.is_empty()) {
        return Err(AnalysisError::Precondition("empty max-affine row".into()));
    }
    if !(sys.contraction < 1.0) {
        return Err(AnalysisError::Precondition("system does not contract".into()));
    }
    let (guess, mut policy) = sys.value_iterate();
    if !sys.is_exact() {
        let (fx, _) = sys.eval_f64(&guess);
        let residual = fx
            .iter()
            .zip(&guess)
            .zip(&sys.weights)
            .map(|((a, b), w)| (a - b).abs() / w)
            .fold(0.0f64, f64::max);
        let scale = guess.iter().map(|v| v.abs()).fold(1.0f64, f64::max);
        let pad = round_up(residual / (1.0 - sys.contraction) + float_margin(scale, 4 * n + 8));
        let values = guess
            .iter()
            .zip(&sys.weights)
            .map(|(v, w)| Scalar::Approx(round_up(v + pad * w)))
            .collect();
        return Ok(MaxAffineSolution { values, policy, exact: false });
    }
    let max_rounds = 64 + 4 * sys.rows.iter().map(Vec::len).sum::<usize>();
    for _ in 0..max_rounds {
        let values = solve_policy(sys, &policy)?;
        let mut improved = false;
        for (j, row) in sys.rows.iter().enumerate() {
            let current = &values[j];
            let mut best: Option<(usize, Scalar)> = None;
            for (k, t) in row.iter().enumerate() {
                let v = &t.coef * &values[t.target] + &t.offset;
                if v > *current && best.as_ref().is_none_or(|(_, b)| v > *b) {
                    best = Some((k, v));
                }
            }
            if let Some((k, _)) = best {
                policy[j] = k;
                improved = true;
            }
        }
        if !improved {
            return Ok(MaxAffineSolution { values, policy, exact: true });
        }
    }
    Err(AnalysisError::Budget("policy iteration did not stabilise".into()))
}

fn solve_policy(sys: &MaxAffineSystem, policy: &[usize]) -> Result<Vec<Scalar>, AnalysisError> {
    let n = sys.rows.len();
    let mut m = vec![vec![Scalar::zero(); n]; n];
    let mut rhs = Vec::with_capacity(n);
    for (j, row) in sys.rows.iter().enumerate() {
        let t = &row[policy[j]];
        m[j][j] = Scalar::one();
        m[j][t.target] = &m[j][t.target] - &t.coef;
        rhs.push(t.offset.clone());
    }
    linalg::solve(m, rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(c: Scalar, t: usize, o: Scalar) -> AffineTerm {
        AffineTerm { coef: c, target: t, offset: o }
    }

    #[test]
    fn single_variable_max() {
        // x = max(x/4, x/4 + 3/4) has fixed point 1.
        let q = Scalar::ratio(1, 4);
        let sys = MaxAffineSystem {
            rows: vec![vec![term(q.clone(), 0, Scalar::zero()), term(q, 0, Scalar::ratio(3, 4))]],
            weights: vec![1.0],
            contraction: 0.25,
        };
        let sol = solve(&sys).unwrap();
        assert!(sol.exact);
        assert_eq!(sol.values[0], Scalar::one());
        assert_eq!(sol.policy[0], 1);
    }

    #[test]
    fn coupled_variables_exact() {
        // x0 = max(x1/2 + 1, 0), x1 = max(x0/2 - 1, x0/2)
        let h = Scalar::ratio(1, 2);
        let sys = MaxAffineSystem {
            rows: vec![
                vec![term(h.clone(), 1, Scalar::one()), term(Scalar::zero(), 0, Scalar::zero())],
                vec![term(h.clone(), 0, -Scalar::one()), term(h, 0, Scalar::zero())],
            ],
            weights: vec![1.0, 1.0],
            contraction: 0.5,
        };
        let sol = solve(&sys).unwrap();
        // x0 = x0/4 + 1 -> 4/3, x1 = 2/3
        assert_eq!(sol.values, vec![Scalar::ratio(4, 3), Scalar::ratio(2, 3)]);
    }

    #[test]
    fn float_solution_is_upper_bound() {
        let q = Scalar::Approx(0.25);
        let sys = MaxAffineSystem {
            rows: vec![vec![term(q.clone(), 0, Scalar::zero()), term(q, 0, Scalar::Approx(0.75))]],
            weights: vec![1.0],
            contraction: 0.25,
        };
        let sol = solve(&sys).unwrap();
        assert!(!sol.exact);
        let v = sol.values[0].to_f64();
        assert!((1.0..1.0 + 1e-12).contains(&v));
    }
}
