use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::approx::{PenaltyKind, PenaltySpec, DEFAULT_EPS_PERT};
use crate::dcacore::{multi_start, run_dca, DcaConfig, DcaTrace};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::subsolver::{solve_diag_qp_from, solve_lp};

use super::builders::{build_dca1_lp, build_dca2_lp, build_dca3_qp, build_dca4_lp, build_hinge_lp, DEFAULT_M_BOX};
use super::instance::{ModelIterate, SvmInstance};
use super::metrics::{pwco_instance, selected_features};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Dca1,
    Dca2,
    Dca3,
    Dca4,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Dca1, Scheme::Dca2, Scheme::Dca3, Scheme::Dca4];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Dca1 => "dca1",
            Scheme::Dca2 => "dca2",
            Scheme::Dca3 => "dca3",
            Scheme::Dca4 => "dca4",
        }
    }

    /// The piecewise-linear scheme pairs only with PiL, the others only
    /// with the remaining kinds.
    pub fn accepts(self, kind: PenaltyKind) -> bool {
        (self == Scheme::Dca4) == (kind == PenaltyKind::PiL)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Domain(format!("unknown scheme '{s}' (expected dca1..dca4)")))
    }
}

/// Where start 0 begins. Further starts draw `x ∈ [-1, 1]ⁿ`, `b ∈ [-1, 1]`
/// uniformly from a per-start seed.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialPoint<T> {
    /// Solution of the pure hinge-loss LP.
    #[default]
    HingeLp,
    Given {
        x: Vec<T>,
        b: T,
    },
}

/// Numerical knobs of the subproblems.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOptions {
    /// `|xᵢ|` bound of the quadratic subproblem and of the starting LP.
    pub m_box: f64,
    /// Perturbation inside `sqrt(x² + ε)` for the reweighted-ℓ2 scheme.
    pub eps_pert: f64,
    pub qp_tol: f64,
    pub qp_max_iter: usize,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        SchemeOptions {
            m_box: DEFAULT_M_BOX,
            eps_pert: DEFAULT_EPS_PERT,
            qp_tol: 1e-8,
            qp_max_iter: 1000,
        }
    }
}

/// Outcome of one feature-selection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FsRunReport {
    pub scheme: String,
    pub penalty: String,
    pub lambda: f64,
    pub theta: f64,
    pub sf: usize,
    pub sf_indices: Vec<usize>,
    pub pwco_train: f64,
    pub pwco_test: Option<f64>,
    pub iterations: usize,
    pub objective: f64,
    pub l0_objective: f64,
    pub wall_seconds: f64,
    pub theta_trace: Vec<f64>,
    pub x: Vec<f64>,
    pub b: f64,
    #[serde(skip)]
    pub trace: Option<DcaTrace>,
}

impl FsRunReport {
    pub(crate) fn assemble<T: Real>(
        inst: &SvmInstance<T>,
        scheme: &str,
        spec: &PenaltySpec<T>,
        it: &ModelIterate<T>,
        trace: DcaTrace,
        theta_trace: Vec<f64>,
        started: Instant,
    ) -> Result<Self> {
        let (sf, sf_indices) = selected_features(&it.x);
        Ok(FsRunReport {
            scheme: scheme.to_string(),
            penalty: spec.to_string(),
            lambda: inst.lambda().as_f64(),
            theta: spec.theta().as_f64(),
            sf,
            sf_indices,
            pwco_train: pwco_instance(inst, &it.x, it.b)?,
            pwco_test: None,
            iterations: trace.iterations,
            objective: inst.approx_objective(spec, &it.x, it.b).as_f64(),
            l0_objective: inst.l0_objective(&it.x, it.b).as_f64(),
            wall_seconds: started.elapsed().as_secs_f64(),
            theta_trace,
            x: it.x.iter().map(|v| v.as_f64()).collect(),
            b: it.b.as_f64(),
            trace: Some(trace),
        })
    }

    pub const CSV_HEADER: &'static str =
        "scheme,penalty,lambda,theta,sf,pwco_train,pwco_test,iterations,objective,l0_objective,wall_seconds";

    /// One CSV row matching [`FsRunReport::CSV_HEADER`].
    pub fn csv_row(&self) -> String {
        let test = self.pwco_test.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},\"{}\",{},{},{},{},{},{},{},{},{}",
            self.scheme,
            self.penalty,
            self.lambda,
            self.theta,
            self.sf,
            self.pwco_train,
            test,
            self.iterations,
            self.objective,
            self.l0_objective,
            self.wall_seconds
        )
    }
}

pub(crate) fn hinge_start<T: Real>(inst: &SvmInstance<T>, m_box: T) -> Result<ModelIterate<T>> {
    let p = solve_lp(&build_hinge_lp(inst, Some(m_box))?)?.into_point()?;
    Ok(ModelIterate::from_solution(inst, &p))
}

pub(crate) fn random_start<T: Real>(inst: &SvmInstance<T>, seed: u64) -> ModelIterate<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = (0..inst.n_features())
        .map(|_| T::lit(rng.random_range(-1.0..=1.0)))
        .collect();
    let b = T::lit(rng.random_range(-1.0..=1.0));
    ModelIterate::new(inst, x, b)
}

pub(crate) fn start_point<T: Real>(
    inst: &SvmInstance<T>,
    init: &InitialPoint<T>,
    m_box: T,
    index: usize,
    seed: u64,
) -> Result<ModelIterate<T>> {
    if index > 0 {
        return Ok(random_start(inst, seed));
    }
    match init {
        InitialPoint::HingeLp => hinge_start(inst, m_box),
        InitialPoint::Given { x, b } => {
            if x.len() != inst.n_features() {
                return Err(Error::Dimension("initial x length".into()));
            }
            Ok(ModelIterate::new(inst, x.clone(), *b))
        }
    }
}

/// Runs one scheme with default subproblem options.
pub fn run_scheme<T: Real>(
    inst: &SvmInstance<T>,
    spec: &PenaltySpec<T>,
    scheme: Scheme,
    cfg: &DcaConfig,
    init: &InitialPoint<T>,
) -> Result<FsRunReport> {
    run_scheme_with(inst, spec, scheme, cfg, init, &SchemeOptions::default())
}

/// Runs `cfg.n_starts` starts of `scheme` and reports the one with the
/// lowest final approximate objective.
pub fn run_scheme_with<T: Real>(
    inst: &SvmInstance<T>,
    spec: &PenaltySpec<T>,
    scheme: Scheme,
    cfg: &DcaConfig,
    init: &InitialPoint<T>,
    opts: &SchemeOptions,
) -> Result<FsRunReport> {
    if !scheme.accepts(spec.kind()) {
        return Err(Error::Incompatible(format!(
            "{scheme} cannot run {}",
            spec.kind().name()
        )));
    }
    let started = Instant::now();
    let (_, (it, trace)) = multi_start(
        cfg,
        |k, seed| {
            let x0 = start_point(inst, init, T::lit(opts.m_box), k, seed)?;
            run_single(inst, spec, scheme, cfg, x0, opts)
        },
        |(it, _)| inst.approx_objective(spec, &it.x, it.b).as_f64(),
    )?;
    FsRunReport::assemble(inst, scheme.name(), spec, &it, trace, Vec::new(), started)
}

/// One DCA run of `scheme` from `x0`, returning the final iterate and trace.
pub fn run_single<T: Real>(
    inst: &SvmInstance<T>,
    spec: &PenaltySpec<T>,
    scheme: Scheme,
    cfg: &DcaConfig,
    x0: ModelIterate<T>,
    opts: &SchemeOptions,
) -> Result<(ModelIterate<T>, DcaTrace)> {
    if !scheme.accepts(spec.kind()) {
        return Err(Error::Incompatible(format!(
            "{scheme} cannot run {}",
            spec.kind().name()
        )));
    }
    let lam = inst.lambda();
    let approx = |it: &ModelIterate<T>| inst.approx_objective(spec, &it.x, it.b).as_f64();
    match scheme {
        Scheme::Dca1 => run_dca(
            |it: &ModelIterate<T>| -> Result<Vec<T>> { it.x.iter().map(|&v| Ok(lam * spec.psi_subgrad(v)?)).collect() },
            |_, zbar| {
                let p = solve_lp(&build_dca1_lp(inst, spec, zbar)?)?.into_point()?;
                Ok(ModelIterate::from_solution(inst, &p))
            },
            approx,
            x0,
            cfg,
        ),
        Scheme::Dca2 => run_dca(
            |it: &ModelIterate<T>| -> Result<Vec<T>> {
                it.x.iter().map(|&v| Ok(lam * spec.l1_weight(v.abs())?)).collect()
            },
            |_, w| {
                let p = solve_lp(&build_dca2_lp(inst, w)?)?.into_point()?;
                Ok(ModelIterate::from_solution(inst, &p))
            },
            approx,
            x0,
            cfg,
        ),
        Scheme::Dca3 => {
            let eps = T::lit(opts.eps_pert);
            let m_box = T::lit(opts.m_box);
            run_dca(
                |it: &ModelIterate<T>| -> Result<Vec<T>> {
                    it.x.iter().map(|&v| Ok(lam * spec.l2_weight(eps, v * v)?)).collect()
                },
                |it, w| {
                    let qp = build_dca3_qp(inst, w, m_box)?;
                    // Iterates on the box face may overshoot it by rounding.
                    let warm = it.x.iter().all(|v| v.abs() <= m_box * (T::one() + T::lit(1e-9)));
                    let clamped: Vec<T> = it.x.iter().map(|v| v.max(-m_box).min(m_box)).collect();
                    let start = ModelIterate::new(inst, clamped, it.b).stacked();
                    let point = match solve_diag_qp_from(
                        &qp,
                        warm.then_some(start.as_slice()),
                        T::lit(opts.qp_tol),
                        opts.qp_max_iter,
                    ) {
                        Ok(sol) => sol.point,
                        // Every conditional-gradient iterate improves on the
                        // warm start, so an inexact answer still descends.
                        Err(Error::ToleranceNotMet { best, .. }) if warm => best.into_iter().map(T::lit).collect(),
                        Err(e) => return Err(e),
                    };
                    Ok(ModelIterate::from_solution(inst, &point))
                },
                |it: &ModelIterate<T>| inst.perturbed_objective(spec, eps, &it.x, it.b).as_f64(),
                x0,
                cfg,
            )
        }
        Scheme::Dca4 => run_dca(
            |it: &ModelIterate<T>| -> Result<Vec<T>> {
                it.x.iter().map(|&v| Ok(lam * spec.pil_psi_subgrad(v)?)).collect()
            },
            |_, zbar| {
                let p = solve_lp(&build_dca4_lp(inst, spec, zbar)?)?.into_point()?;
                Ok(ModelIterate::from_solution(inst, &p))
            },
            approx,
            x0,
            cfg,
        ),
    }
}
