use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A single inequality `coeffs · v <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Row<T> {
    pub coeffs: Vec<T>,
    pub rhs: T,
}

/// `min objective · v` subject to inequality rows and per-variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<T> {
    n_vars: usize,
    objective: Vec<T>,
    rows: Vec<Row<T>>,
    lower: Vec<Option<T>>,
    upper: Vec<Option<T>>,
}

impl<T: Real> LinearProgram<T> {
    /// A problem with every variable free and no rows.
    pub fn new(objective: Vec<T>) -> Self {
        let n = objective.len();
        LinearProgram {
            n_vars: n,
            objective,
            rows: Vec::new(),
            lower: vec![None; n],
            upper: vec![None; n],
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn objective(&self) -> &[T] {
        &self.objective
    }

    pub fn rows(&self) -> &[Row<T>] {
        &self.rows
    }

    pub fn lower(&self) -> &[Option<T>] {
        &self.lower
    }

    pub fn upper(&self) -> &[Option<T>] {
        &self.upper
    }

    pub fn set_objective(&mut self, objective: Vec<T>) -> Result<()> {
        if objective.len() != self.n_vars {
            return Err(Error::Dimension(format!(
                "objective has {} entries, expected {}",
                objective.len(),
                self.n_vars
            )));
        }
        self.objective = objective;
        Ok(())
    }

    /// Appends `coeffs · v <= rhs`.
    pub fn add_le(&mut self, coeffs: Vec<T>, rhs: T) -> Result<()> {
        if coeffs.len() != self.n_vars {
            return Err(Error::Dimension(format!(
                "row has {} coefficients, expected {}",
                coeffs.len(),
                self.n_vars
            )));
        }
        self.rows.push(Row { coeffs, rhs });
        Ok(())
    }

    /// Appends `coeffs · v >= rhs`.
    pub fn add_ge(&mut self, coeffs: Vec<T>, rhs: T) -> Result<()> {
        self.add_le(coeffs.into_iter().map(|c| -c).collect(), -rhs)
    }

    /// Appends a row given as `(index, coefficient)` pairs.
    pub fn add_sparse_le(&mut self, terms: &[(usize, T)], rhs: T) -> Result<()> {
        let mut coeffs = vec![T::zero(); self.n_vars];
        for &(j, c) in terms {
            if j >= self.n_vars {
                return Err(Error::Dimension(format!("variable index {j} out of range")));
            }
            coeffs[j] = coeffs[j] + c;
        }
        self.rows.push(Row { coeffs, rhs });
        Ok(())
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<T>, upper: Option<T>) -> Result<()> {
        if var >= self.n_vars {
            return Err(Error::Dimension(format!("variable index {var} out of range")));
        }
        if let (Some(l), Some(u)) = (lower, upper) {
            if l > u {
                return Err(Error::Domain(format!("bounds {l} > {u} for variable {var}")));
            }
        }
        self.lower[var] = lower;
        self.upper[var] = upper;
        Ok(())
    }

    pub fn objective_at(&self, v: &[T]) -> T {
        crate::scalar::dot(&self.objective, v)
    }

    /// Largest violation of any row or bound at `v` (zero when feasible).
    pub fn max_violation(&self, v: &[T]) -> T {
        let mut worst = T::zero();
        for row in &self.rows {
            worst = worst.max(crate::scalar::dot(&row.coeffs, v) - row.rhs);
        }
        for (j, &vj) in v.iter().enumerate() {
            if let Some(l) = self.lower[j] {
                worst = worst.max(l - vj);
            }
            if let Some(u) = self.upper[j] {
                worst = worst.max(vj - u);
            }
        }
        worst
    }

    /// Plain-text dump for cross-checking against other solvers.
    ///
    /// ```text
    /// vars <n>
    /// min <c_1> ... <c_n>
    /// le <a_1> ... <a_n> <rhs>      (one per row)
    /// bound <j> <lower|-inf> <upper|inf>   (only for bounded variables)
    /// ```
    pub fn dump(&self) -> String {
        let fmt = |x: T| format!("{:e}", x.as_f64());
        let mut out = String::new();
        let _ = writeln!(out, "vars {}", self.n_vars);
        let obj: Vec<String> = self.objective.iter().map(|&c| fmt(c)).collect();
        let _ = writeln!(out, "min {}", obj.join(" "));
        for row in &self.rows {
            let coeffs: Vec<String> = row.coeffs.iter().map(|&c| fmt(c)).collect();
            let _ = writeln!(out, "le {} {}", coeffs.join(" "), fmt(row.rhs));
        }
        for j in 0..self.n_vars {
            if self.lower[j].is_some() || self.upper[j].is_some() {
                let lo = self.lower[j].map_or("-inf".to_string(), fmt);
                let hi = self.upper[j].map_or("inf".to_string(), fmt);
                let _ = writeln!(out, "bound {j} {lo} {hi}");
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    /// Present iff `status == Optimal`.
    pub point: Option<Vec<T>>,
    pub objective_value: T,
}

impl<T: Real> LpSolution<T> {
    pub(crate) fn infeasible() -> Self {
        LpSolution {
            status: LpStatus::Infeasible,
            point: None,
            objective_value: T::infinity(),
        }
    }

    pub(crate) fn unbounded() -> Self {
        LpSolution {
            status: LpStatus::Unbounded,
            point: None,
            objective_value: T::neg_infinity(),
        }
    }

    /// The optimal point, or the status as an error.
    pub fn into_point(self) -> Result<Vec<T>> {
        match self.status {
            LpStatus::Optimal => Ok(self.point.expect("optimal solution carries a point")),
            LpStatus::Infeasible => Err(Error::Infeasible),
            LpStatus::Unbounded => Err(Error::Unbounded),
        }
    }
}

/// Convex QP with a diagonal Hessian: `min c·v + Σ q_i v_i²` over the
/// feasible set of `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagQp<T> {
    pub base: LinearProgram<T>,
    quad_weights: Vec<T>,
}

impl<T: Real> DiagQp<T> {
    pub fn new(base: LinearProgram<T>, quad_weights: Vec<T>) -> Result<Self> {
        if quad_weights.len() != base.n_vars() {
            return Err(Error::Dimension(format!(
                "{} quadratic weights for {} variables",
                quad_weights.len(),
                base.n_vars()
            )));
        }
        if let Some(w) = quad_weights.iter().find(|w| !(**w >= T::zero())) {
            return Err(Error::Domain(format!("quadratic weight {w} is negative")));
        }
        Ok(DiagQp { base, quad_weights })
    }

    pub fn quad_weights(&self) -> &[T] {
        &self.quad_weights
    }

    pub fn objective_at(&self, v: &[T]) -> T {
        self.base.objective_at(v) + self.quad_weights.iter().zip(v).map(|(&q, &x)| q * x * x).sum::<T>()
    }

    pub fn gradient_at(&self, v: &[T]) -> Vec<T> {
        self.base
            .objective()
            .iter()
            .zip(&self.quad_weights)
            .zip(v)
            .map(|((&c, &q), &x)| c + T::two() * q * x)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_rows() {
        let mut lp = LinearProgram::new(vec![1.0, 2.0]);
        assert!(matches!(lp.add_le(vec![1.0], 0.0), Err(Error::Dimension(_))));
        assert!(lp.set_objective(vec![1.0]).is_err());
        assert!(lp.set_bounds(2, None, None).is_err());
        assert!(matches!(lp.set_bounds(0, Some(1.0), Some(0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn dump_lists_rows_and_bounds() {
        let mut lp = LinearProgram::new(vec![-1.0, 0.5]);
        lp.add_le(vec![1.0, 1.0], 2.0).unwrap();
        lp.set_bounds(1, Some(0.0), None).unwrap();
        let text = lp.dump();
        assert_eq!(text, "vars 2\nmin -1e0 5e-1\nle 1e0 1e0 2e0\nbound 1 0e0 inf\n");
    }

    #[test]
    fn qp_rejects_negative_weights() {
        let lp = LinearProgram::new(vec![0.0]);
        assert!(DiagQp::new(lp.clone(), vec![-1.0]).is_err());
        assert!(DiagQp::new(lp, vec![1.0, 2.0]).is_err());
    }
}
