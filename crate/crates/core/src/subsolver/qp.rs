//! Conditional-gradient solver for diagonal convex QPs.
//!
//! Uses the simplex as its linear-minimization oracle, away steps over the
//! active vertex set, and exact line search on the quadratic. The returned
//! gap `⟨∇q(v), v - s⟩` with `s` the oracle vertex bounds the suboptimality
//! of the returned point.

use crate::error::{Error, Result};
use crate::scalar::{dot, Real};

use super::lp::{DiagQp, LinearProgram};
use super::simplex::solve_lp;

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution<T> {
    pub point: Vec<T>,
    pub objective_value: T,
    /// Certified Frank-Wolfe gap at `point`.
    pub gap: T,
    pub iterations: usize,
}

/// Solves `qp` until the Frank-Wolfe gap is at most `tol`.
pub fn solve_diag_qp<T: Real>(qp: &DiagQp<T>, tol: T, max_iter: usize) -> Result<QpSolution<T>> {
    solve_diag_qp_from(qp, None, tol, max_iter)
}

/// As [`solve_diag_qp`], starting from a feasible `start` point. Every
/// iterate then has an objective no larger than the one at `start`.
pub fn solve_diag_qp_from<T: Real>(
    qp: &DiagQp<T>,
    start: Option<&[T]>,
    tol: T,
    max_iter: usize,
) -> Result<QpSolution<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if let Some(s) = start {
        if s.len() != qp.base.n_vars() {
            return Err(Error::Dimension("start point length".into()));
        }
        if qp.base.max_violation(s) > T::feas_tol() {
            return Err(Error::Domain("start point is infeasible".into()));
        }
    }
    if qp.quad_weights().iter().all(|&q| q == T::zero()) {
        let point = solve_lp(&qp.base)?.into_point()?;
        return Ok(QpSolution {
            objective_value: qp.objective_at(&point),
            point,
            gap: T::zero(),
            iterations: 0,
        });
    }

    // Curved variables without a finite box get an artificial one; by
    // convexity the boxed optimum is global once no artificial bound binds.
    let open: Vec<usize> = (0..qp.base.n_vars())
        .filter(|&j| qp.quad_weights()[j] > T::zero() && (qp.base.lower()[j].is_none() || qp.base.upper()[j].is_none()))
        .collect();
    if open.is_empty() {
        return frank_wolfe(qp, start, tol, max_iter);
    }
    let mut radius = start
        .map(|s| s.iter().fold(T::zero(), |m, v| m.max(v.abs())))
        .unwrap_or_else(T::zero)
        .max(T::lit(1e3));
    for _ in 0..16 {
        let mut boxed = qp.clone();
        for &j in &open {
            let lo = qp.base.lower()[j].unwrap_or(-radius);
            let hi = qp.base.upper()[j].unwrap_or(radius);
            boxed.base.set_bounds(j, Some(lo), Some(hi))?;
        }
        let sol = frank_wolfe(&boxed, start, tol, max_iter)?;
        let edge = radius * (T::one() - T::lit(1e-6));
        let binding = open.iter().any(|&j| {
            (qp.base.lower()[j].is_none() && sol.point[j] <= -edge)
                || (qp.base.upper()[j].is_none() && sol.point[j] >= edge)
        });
        if !binding {
            return Ok(sol);
        }
        radius = radius * T::lit(10.0);
    }
    Err(Error::Unbounded)
}

fn oracle<T: Real>(lp: &mut LinearProgram<T>, grad: Vec<T>) -> Result<Vec<T>> {
    lp.set_objective(grad)?;
    solve_lp(lp)?.into_point()
}

fn same_point<T: Real>(a: &[T], b: &[T]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| (x - y).abs() <= T::zero_snap())
}

fn frank_wolfe<T: Real>(qp: &DiagQp<T>, start: Option<&[T]>, tol: T, max_iter: usize) -> Result<QpSolution<T>> {
    let mut lp = qp.base.clone();
    let first = match start {
        Some(s) => s.to_vec(),
        None => oracle(&mut lp, qp.base.objective().to_vec())?,
    };
    let mut v = first.clone();
    let mut atoms = vec![first];
    let mut weights = vec![T::one()];
    let mut gap = T::infinity();

    for it in 0..max_iter {
        let g = qp.gradient_at(&v);
        let s = oracle(&mut lp, g.clone())?;
        let gv = dot(&g, &v);
        gap = gv - dot(&g, &s);
        if gap <= tol {
            return Ok(QpSolution {
                objective_value: qp.objective_at(&v),
                point: v,
                gap: gap.max(T::zero()),
                iterations: it,
            });
        }

        let (away, away_val) =
            atoms
                .iter()
                .enumerate()
                .map(|(k, a)| (k, dot(&g, a)))
                .fold(
                    (0, T::neg_infinity()),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        let away_gap = away_val - gv;
        let toward = gap >= away_gap || weights[away] >= T::one();

        let (dir, step_max): (Vec<T>, T) = if toward {
            (s.iter().zip(&v).map(|(&a, &b)| a - b).collect(), T::one())
        } else {
            let w = weights[away];
            (
                v.iter().zip(&atoms[away]).map(|(&a, &b)| a - b).collect(),
                w / (T::one() - w),
            )
        };
        let slope = dot(&g, &dir);
        if slope >= T::zero() {
            // No descent left at working precision.
            break;
        }
        let curv: T = qp.quad_weights().iter().zip(&dir).map(|(&q, &d)| q * d * d).sum();
        let step = if curv > T::zero() {
            (-slope / (T::two() * curv)).min(step_max)
        } else {
            step_max
        };
        for (x, d) in v.iter_mut().zip(&dir) {
            *x = *x + step * *d;
        }

        if toward {
            for w in weights.iter_mut() {
                *w = *w * (T::one() - step);
            }
            match atoms.iter().position(|a| same_point(a, &s)) {
                Some(k) => weights[k] = weights[k] + step,
                None => {
                    atoms.push(s);
                    weights.push(step);
                }
            }
        } else {
            for w in weights.iter_mut() {
                *w = *w * (T::one() + step);
            }
            weights[away] = weights[away] - step;
        }
        let mut k = 0;
        while k < atoms.len() {
            if weights[k] <= T::zero_snap() && atoms.len() > 1 {
                atoms.swap_remove(k);
                weights.swap_remove(k);
            } else {
                k += 1;
            }
        }
    }

    Err(Error::ToleranceNotMet {
        iterations: max_iter,
        gap: gap.as_f64(),
        best: v.iter().map(|x| x.as_f64()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subsolver::lp::LinearProgram;

    fn boxed_1d(c: f64, q: f64, lo: f64, hi: f64) -> DiagQp<f64> {
        let mut lp = LinearProgram::new(vec![c]);
        lp.set_bounds(0, Some(lo), Some(hi)).unwrap();
        DiagQp::new(lp, vec![q]).unwrap()
    }

    #[test]
    fn zero_weights_reduce_to_lp() {
        let mut lp = LinearProgram::new(vec![-1.0, -1.0]);
        lp.add_le(vec![1.0, 2.0], 4.0).unwrap();
        lp.add_le(vec![3.0, 1.0], 6.0).unwrap();
        lp.set_bounds(0, Some(0.0), None).unwrap();
        lp.set_bounds(1, Some(0.0), None).unwrap();
        let qp = DiagQp::new(lp.clone(), vec![0.0, 0.0]).unwrap();
        let a = solve_diag_qp(&qp, 1e-6, 10).unwrap();
        let b = solve_lp(&lp).unwrap();
        assert_eq!(Some(a.point), b.point);
        assert_eq!(a.objective_value, b.objective_value);
    }

    #[test]
    fn boundary_optimum() {
        let sol = solve_diag_qp(&boxed_1d(0.0, 1.0, 0.5, 2.0), 1e-9, 100).unwrap();
        assert!((sol.point[0] - 0.5).abs() < 1e-9);
        assert!((sol.objective_value - 0.25).abs() < 1e-9);
    }

    #[test]
    fn interior_optimum() {
        let sol = solve_diag_qp(&boxed_1d(-2.0, 1.0, 0.0, 2.0), 1e-9, 100).unwrap();
        assert!((sol.point[0] - 1.0).abs() < 1e-6);
        assert!((sol.objective_value + 1.0).abs() < 1e-9);
        assert!(sol.gap <= 1e-9);
    }

    #[test]
    fn two_dimensional_with_coupling_row() {
        // min (x-1)² + (y-2)² over x + y <= 1, x, y >= 0  →  (0, 1).
        let mut lp = LinearProgram::<f64>::new(vec![-2.0, -4.0]);
        lp.add_le(vec![1.0, 1.0], 1.0).unwrap();
        lp.set_bounds(0, Some(0.0), None).unwrap();
        lp.set_bounds(1, Some(0.0), None).unwrap();
        let qp = DiagQp::new(lp, vec![1.0, 1.0]).unwrap();
        let sol = solve_diag_qp(&qp, 1e-10, 1000).unwrap();
        assert!((sol.point[0]).abs() < 1e-6 && (sol.point[1] - 1.0).abs() < 1e-6);
        assert!(sol.gap <= 1e-10);
    }

    #[test]
    fn unbounded_curved_variable_gets_a_box() {
        // min -4x + x² with x free: optimum x = 2.
        let lp = LinearProgram::<f64>::new(vec![-4.0]);
        let qp = DiagQp::new(lp, vec![1.0]).unwrap();
        let sol = solve_diag_qp(&qp, 1e-9, 200).unwrap();
        assert!((sol.point[0] - 2.0).abs() < 1e-6);
    }

    #[test]
    fn start_point_never_gets_worse() {
        let qp = boxed_1d(-2.0, 1.0, 0.0, 2.0);
        let start = [0.9];
        let sol = solve_diag_qp_from(&qp, Some(&start), 1e-12, 100).unwrap();
        assert!(sol.objective_value <= qp.objective_at(&start));
        assert!(solve_diag_qp_from(&qp, Some(&[3.0]), 1e-6, 10).is_err());
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        // Interior optimum (0.3, 0.3): one step cannot reach it.
        let mut lp = LinearProgram::new(vec![-0.6, -0.6]);
        lp.add_le(vec![1.0, 1.0], 1.0).unwrap();
        lp.set_bounds(0, Some(0.0), None).unwrap();
        lp.set_bounds(1, Some(0.0), None).unwrap();
        let qp = DiagQp::new(lp, vec![1.0, 1.0]).unwrap();
        match solve_diag_qp(&qp, 1e-12, 1) {
            Err(Error::ToleranceNotMet { best, .. }) => assert_eq!(best.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }
}
