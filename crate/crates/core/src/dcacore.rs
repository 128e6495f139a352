//! Generic DCA driver.
//!
//! Each iteration linearizes the concave part at the current state and
//! minimizes the resulting convex majorant. The driver owns descent
//! accounting, the relative-change stopping rule and trace capture; the
//! scheme-specific pieces come in as callbacks.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative slack allowed on an objective increase before the run aborts.
pub const DESCENT_SLACK: f64 = 1e-9;

/// Iteration limits, stopping tolerance and seeding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcaConfig {
    pub stop_tol: f64,
    pub max_iter: usize,
    pub n_starts: usize,
    pub seed: u64,
}

impl Default for DcaConfig {
    fn default() -> Self {
        DcaConfig {
            stop_tol: 1e-5,
            max_iter: 500,
            n_starts: 1,
            seed: 0,
        }
    }
}

impl DcaConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.stop_tol > 0.0) {
            return Err(Error::Domain(format!(
                "stop_tol must be positive, got {}",
                self.stop_tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Domain("max_iter must be at least 1".into()));
        }
        if self.n_starts == 0 {
            return Err(Error::Domain("n_starts must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Tolerance,
    MaxIter,
    FixedPoint,
}

/// Per-iteration record of a run. `objectives[0]` is the value at the
/// starting point, so `objectives` has one more entry than `iterate_change`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcaTrace {
    pub objectives: Vec<f64>,
    pub iterate_change: Vec<f64>,
    pub iterations: usize,
    pub terminated_by: Termination,
}

impl DcaTrace {
    pub fn final_objective(&self) -> f64 {
        *self.objectives.last().expect("trace holds the starting objective")
    }

    /// True when every step satisfies the descent inequality with the
    /// driver's relative slack.
    pub fn is_descending(&self) -> bool {
        self.objectives
            .windows(2)
            .all(|w| w[1] <= w[0] + DESCENT_SLACK * w[0].abs().max(1.0))
    }

    /// Writes `iteration,objective,iterate_change` rows. The starting point
    /// is iteration 0 and has an empty change column.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iteration", "objective", "iterate_change"])?;
        for (k, f) in self.objectives.iter().enumerate() {
            let change = if k == 0 {
                String::new()
            } else {
                format!("{:e}", self.iterate_change[k - 1])
            };
            w.write_record([k.to_string(), format!("{f:e}"), change])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// State that the stopping rule can measure.
pub trait DcaState {
    /// Sum of the Euclidean norms of the block differences to `prev`.
    fn change_from(&self, prev: &Self) -> f64;
    /// Sum of the Euclidean norms of the blocks.
    fn magnitude(&self) -> f64;
}

impl<T: Real> DcaState for Vec<T> {
    fn change_from(&self, prev: &Self) -> f64 {
        crate::scalar::dist2(self, prev).as_f64()
    }
    fn magnitude(&self) -> f64 {
        crate::scalar::norm2(self).as_f64()
    }
}

/// `change ≤ tol · (1 + magnitude(prev))`.
pub fn stop_check<S: DcaState>(prev: &S, next: &S, stop_tol: f64) -> bool {
    next.change_from(prev) <= stop_tol * (1.0 + prev.magnitude())
}

fn same_objective(a: f64, b: f64) -> bool {
    (a - b).abs() <= 64.0 * f64::EPSILON * a.abs().max(1.0)
}

/// Runs DCA from `x0`.
///
/// `subgrad` returns an element of the subdifferential of the concave part
/// at the current state, `solve` minimizes the convex majorant built from
/// it, and `objective` evaluates the true objective. A run whose objective
/// rises by more than [`DESCENT_SLACK`] (relative) aborts with
/// [`Error::ObjectiveIncrease`].
pub fn run_dca<S, D, G, V, F>(
    mut subgrad: G,
    mut solve: V,
    mut objective: F,
    x0: S,
    cfg: &DcaConfig,
) -> Result<(S, DcaTrace)>
where
    S: DcaState,
    G: FnMut(&S) -> Result<D>,
    V: FnMut(&S, &D) -> Result<S>,
    F: FnMut(&S) -> f64,
{
    cfg.validate()?;
    let wrap = |iteration: usize| {
        move |e: Error| Error::Subproblem {
            iteration,
            source: Box::new(e),
        }
    };
    let mut x = x0;
    let mut f = objective(&x);
    let mut trace = DcaTrace {
        objectives: vec![f],
        iterate_change: Vec::new(),
        iterations: 0,
        terminated_by: Termination::MaxIter,
    };
    for k in 1..=cfg.max_iter {
        let y = subgrad(&x).map_err(wrap(k))?;
        let next = solve(&x, &y).map_err(wrap(k))?;
        let f_next = objective(&next);
        if !(f_next <= f + DESCENT_SLACK * f.abs().max(1.0)) {
            return Err(Error::ObjectiveIncrease {
                iteration: k,
                before: f,
                after: f_next,
            });
        }
        let change = next.change_from(&x);
        let stop = change <= cfg.stop_tol * (1.0 + x.magnitude());
        let fixed = same_objective(f, f_next);
        trace.objectives.push(f_next);
        trace.iterate_change.push(change);
        trace.iterations = k;
        x = next;
        f = f_next;
        if fixed {
            trace.terminated_by = Termination::FixedPoint;
            return Ok((x, trace));
        }
        if stop {
            trace.terminated_by = Termination::Tolerance;
            return Ok((x, trace));
        }
    }
    Ok((x, trace))
}

/// Runs `cfg.n_starts` independent starts, start `k` seeded with
/// `cfg.seed + k`, and keeps the one with the smallest `score`. Ties go to
/// the lowest start index. The first failing start (by index) fails the
/// whole call.
pub fn multi_start<R, Run, Score>(cfg: &DcaConfig, run: Run, score: Score) -> Result<(usize, R)>
where
    R: Send,
    Run: Fn(usize, u64) -> Result<R> + Sync,
    Score: Fn(&R) -> f64,
{
    cfg.validate()?;
    let results: Vec<Result<R>> = (0..cfg.n_starts)
        .into_par_iter()
        .map(|k| run(k, cfg.seed.wrapping_add(k as u64)))
        .collect();
    let mut best: Option<(usize, R, f64)> = None;
    for (k, r) in results.into_iter().enumerate() {
        let r = r?;
        let s = score(&r);
        let better = match &best {
            None => true,
            Some((_, _, b)) => s < *b,
        };
        if better {
            best = Some((k, r, s));
        }
    }
    let (k, r, _) = best.expect("at least one start");
    Ok((k, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[allow(clippy::ptr_arg)]
    fn quadratic(x: &Vec<f64>) -> f64 {
        x.iter().map(|v| (v - 1.0) * (v - 1.0)).sum()
    }

    #[test]
    fn state_independent_subproblem_converges_in_two() {
        let cfg = DcaConfig::default();
        let (x, trace) = run_dca(|_| Ok(()), |_, _| Ok(vec![1.0, 1.0]), quadratic, vec![5.0, -3.0], &cfg).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);
        assert!(trace.iterations <= 2);
        assert_eq!(trace.terminated_by, Termination::FixedPoint);
    }

    #[test]
    fn critical_start_is_a_fixed_point() {
        let (_, trace) = run_dca(
            |_| Ok(()),
            |x: &Vec<f64>, _| Ok(x.clone()),
            quadratic,
            vec![1.0],
            &DcaConfig::default(),
        )
        .unwrap();
        assert_eq!(trace.iterations, 1);
        assert_eq!(trace.terminated_by, Termination::FixedPoint);
    }

    #[test]
    fn increase_is_reported() {
        let err = run_dca(
            |_| Ok(()),
            |x: &Vec<f64>, _| Ok(vec![x[0] + 1.0]),
            quadratic,
            vec![1.0],
            &DcaConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ObjectiveIncrease { iteration: 1, .. }));
    }

    #[test]
    fn subproblem_errors_carry_the_iteration() {
        let mut calls = 0;
        let err = run_dca(
            |_| Ok(()),
            |x: &Vec<f64>, _| {
                calls += 1;
                if calls == 3 {
                    Err(Error::Infeasible)
                } else {
                    Ok(vec![x[0] * 0.5])
                }
            },
            |x: &Vec<f64>| x[0].abs(),
            vec![1.0],
            &DcaConfig::default(),
        )
        .unwrap_err();
        match err {
            Error::Subproblem { iteration, source } => {
                assert_eq!(iteration, 3);
                assert!(matches!(*source, Error::Infeasible));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn halving_stops_on_tolerance_or_cap() {
        let cfg = DcaConfig {
            max_iter: 5,
            ..DcaConfig::default()
        };
        let (_, trace) = run_dca(
            |_| Ok(()),
            |x: &Vec<f64>, _| Ok(vec![x[0] * 0.5]),
            |x: &Vec<f64>| x[0].abs(),
            vec![1.0],
            &cfg,
        )
        .unwrap();
        assert_eq!(trace.terminated_by, Termination::MaxIter);
        assert_eq!(trace.objectives.len(), 6);
        assert!(trace.is_descending());
    }

    #[test]
    fn stop_check_thresholds() {
        let z = vec![0.0];
        assert!(stop_check(&vec![3.0, 4.0], &vec![3.0, 4.0], 1e-5));
        assert!(!stop_check(&z, &vec![1.0], 1e-5));
        // prev magnitude 1, so the threshold is 2e-5.
        let prev = vec![1.0, 0.0];
        assert!(!stop_check(&prev, &vec![1.0, 4e-5], 1e-5));
        assert!(stop_check(&prev, &vec![1.0, 1e-5], 1e-5));
    }

    #[test]
    fn multi_start_prefers_lowest_index_on_ties() {
        let cfg = DcaConfig {
            n_starts: 4,
            seed: 10,
            ..DcaConfig::default()
        };
        let (k, seed) = multi_start(&cfg, |k, s| Ok((k, s)), |r| if r.0 >= 1 { 0.0 } else { 1.0 }).unwrap();
        assert_eq!(k, 1);
        assert_eq!(seed, (1, 11));
    }

    #[test]
    fn trace_csv_layout() {
        let trace = DcaTrace {
            objectives: vec![2.0, 1.0],
            iterate_change: vec![0.5],
            iterations: 1,
            terminated_by: Termination::Tolerance,
        };
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "iteration,objective,iterate_change\n0,2e0,\n1,1e0,5e-1\n");
    }
}
