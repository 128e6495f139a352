//! Capped-ℓ1 DCA with a growing approximation parameter.
//!
//! `θ` starts small, which keeps the first subproblems close to a LASSO,
//! and is raised by at least `Δθ` per iteration up to the exact-penalty
//! threshold of the instance. The linear term is chosen per coordinate from
//! the current support scale `α`, using one-sided derivatives of the
//! objective when a coordinate sits exactly on the capped kink.

use std::time::Instant;

use crate::approx::{PenaltySpec, Side};
use crate::dcacore::{multi_start, stop_check, DcaConfig, DcaState, DcaTrace, Termination};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::subsolver::solve_lp;

use super::builders::build_dca1_lp_with_slope;
use super::instance::{ModelIterate, SvmInstance};
use super::schemes::{start_point, FsRunReport, InitialPoint, SchemeOptions};

/// Result of one updating-θ run before report assembly.
#[derive(Debug, Clone)]
pub struct UpdatingRun<T> {
    pub iterate: ModelIterate<T>,
    pub theta: T,
    pub theta_trace: Vec<T>,
    /// `objectives` holds the ℓ0 objective of every iterate; it need not
    /// decrease because the surrogate changes with `θ`.
    pub trace: DcaTrace,
}

/// Runs the procedure from `x0`.
pub fn updating_theta_single<T: Real>(
    inst: &SvmInstance<T>,
    delta_theta: T,
    cfg: &DcaConfig,
    x0: ModelIterate<T>,
) -> Result<UpdatingRun<T>> {
    if !(delta_theta > T::zero()) {
        return Err(Error::Domain(format!(
            "delta_theta must be positive, got {delta_theta}"
        )));
    }
    cfg.validate()?;
    let lam = inst.lambda();
    let theta_star = inst.theta_star();
    let mut alpha = T::infinity();
    let mut theta = T::zero();
    let mut x = x0;
    let mut thetas = Vec::new();
    let mut trace = DcaTrace {
        objectives: vec![inst.l0_objective(&x.x, x.b).as_f64()],
        iterate_change: Vec::new(),
        iterations: 0,
        terminated_by: Termination::MaxIter,
    };

    for k in 1..=cfg.max_iter {
        let inner =
            x.x.iter()
                .map(|v| v.abs())
                .filter(|&v| v > T::zero() && v < alpha)
                .fold(None, |m: Option<T>, v| Some(m.map_or(v, |m| m.max(v))));
        if let Some(m) = inner {
            alpha = m;
        }
        theta = if theta_star > T::zero() {
            theta_star.min((T::one() / alpha).max(theta + delta_theta))
        } else {
            // Data with no signal: any positive θ gives the same optimum.
            (T::one() / alpha).max(theta + delta_theta)
        };
        thetas.push(theta);
        let spec = PenaltySpec::cap(theta)?;

        let mut zbar = vec![T::zero(); x.x.len()];
        for (i, &xi) in x.x.iter().enumerate() {
            let u = xi.abs();
            let active = if u < alpha {
                false
            } else if u > alpha {
                true
            } else {
                let fl = inst.one_sided_deriv(&spec, &x.x, x.b, i, Side::Left)?;
                let fr = inst.one_sided_deriv(&spec, &x.x, x.b, i, Side::Right)?;
                xi * (fl + fr) < T::zero()
            };
            if active {
                zbar[i] = xi.sign() * lam * theta;
            }
        }

        let lp = build_dca1_lp_with_slope(inst, theta, &zbar).map_err(|e| wrap(k, e))?;
        let p = solve_lp(&lp).and_then(|s| s.into_point()).map_err(|e| wrap(k, e))?;
        let next = ModelIterate::from_solution(inst, &p);
        let stop = stop_check(&x, &next, cfg.stop_tol);
        trace.iterate_change.push(next.change_from(&x));
        trace.objectives.push(inst.l0_objective(&next.x, next.b).as_f64());
        trace.iterations = k;
        x = next;
        if stop {
            trace.terminated_by = Termination::Tolerance;
            break;
        }
    }
    Ok(UpdatingRun {
        iterate: x,
        theta,
        theta_trace: thetas,
        trace,
    })
}

fn wrap(iteration: usize, e: Error) -> Error {
    Error::Subproblem {
        iteration,
        source: Box::new(e),
    }
}

/// Multi-start updating-θ run. Start 0 uses the hinge-LP solution, further
/// starts are random; the run with the lowest ℓ0 objective is reported.
pub fn updating_theta_run<T: Real>(inst: &SvmInstance<T>, delta_theta: T, cfg: &DcaConfig) -> Result<FsRunReport> {
    let started = Instant::now();
    let m_box = T::lit(SchemeOptions::default().m_box);
    let (_, run) = multi_start(
        cfg,
        |k, seed| {
            let x0 = start_point(inst, &InitialPoint::HingeLp, m_box, k, seed)?;
            updating_theta_single(inst, delta_theta, cfg, x0)
        },
        |r| inst.l0_objective(&r.iterate.x, r.iterate.b).as_f64(),
    )?;
    let spec = if run.theta > T::zero() {
        PenaltySpec::cap(run.theta)?
    } else {
        PenaltySpec::cap(delta_theta)?
    };
    let theta_trace = run.theta_trace.iter().map(|t| t.as_f64()).collect();
    FsRunReport::assemble(inst, "dca1", &spec, &run.iterate, run.trace, theta_trace, started)
}
