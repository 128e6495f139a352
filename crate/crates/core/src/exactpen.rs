//! Exact-penalty thresholds and brute-force reference solvers.
//!
//! [`support_enum_oracle`] gives the ℓ0 optimum of a boxed SVM instance by
//! solving one hinge LP per support. [`grid_oracle`] gives the optimum of an
//! approximate problem in one or two dimensions by scanning a grid in `x`
//! and minimizing the offset exactly. Together they check when a penalty
//! parameter is large enough for the approximation to be exact.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{PenaltyKind, PenaltySpec};
use crate::error::{Error, Result};
use crate::scalar::{dot, Real};
use crate::subsolver::{solve_lp, LpStatus};
use crate::svmfs::{build_hinge_lp, SvmInstance};

/// Largest dimension the support enumeration accepts by default.
pub const DEFAULT_N_LIMIT: usize = 15;

/// An SVM instance whose weights are restricted to `|xᵢ| ≤ m_box`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxedInstance<T> {
    pub inst: SvmInstance<T>,
    m_box: T,
}

impl<T: Real> BoxedInstance<T> {
    pub fn new(inst: SvmInstance<T>, m_box: T) -> Result<Self> {
        if !(m_box > T::zero()) || !m_box.is_finite() {
            return Err(Error::Domain(format!(
                "box bound must be positive and finite, got {m_box}"
            )));
        }
        Ok(BoxedInstance { inst, m_box })
    }

    pub fn m_box(&self) -> T {
        self.m_box
    }
}

/// `Σ min{uᵢ, 1 - uᵢ}` for `u ∈ [0, 1]ⁿ`; zero exactly on binary vectors.
pub fn p_penalty<T: Real>(u: &[T]) -> Result<T> {
    if let Some(v) = u.iter().find(|&&v| !(v >= T::zero() && v <= T::one())) {
        return Err(Error::Domain(format!("indicator {v} outside [0, 1]")));
    }
    Ok(u.iter().map(|&v| v.min(T::one() - v)).sum())
}

/// Best point found by an oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult<T> {
    pub objective: T,
    pub x: Vec<T>,
    pub b: T,
    /// Indices allowed to be nonzero (support enumeration) or found
    /// nonzero (grid search).
    pub support: Vec<usize>,
}

fn support_of(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Global ℓ0 optimum over the box by enumerating all `2ⁿ` supports.
///
/// For each support the hinge LP is solved with `xᵢ = 0` off the support
/// and `|xᵢ| ≤ M` on it; the candidate value is its hinge loss plus `λ`
/// times the support size. Ties keep the support with the smallest mask.
pub fn support_enum_oracle<T: Real>(boxed: &BoxedInstance<T>, n_limit: usize) -> Result<OracleResult<T>> {
    let inst = &boxed.inst;
    let n = inst.n_features();
    if n > n_limit || n >= 31 {
        return Err(Error::Refused(format!(
            "support enumeration limited to {} features, instance has {n}",
            n_limit.min(30)
        )));
    }
    let m = boxed.m_box;
    let lam = inst.lambda();
    let base = build_hinge_lp(inst, None)?;
    let candidates: Vec<Result<(T, Vec<T>, T)>> = (0..1u32 << n)
        .into_par_iter()
        .map(|mask| {
            let mut lp = base.clone();
            for i in 0..n {
                if mask & (1 << i) != 0 {
                    lp.set_bounds(i, Some(-m), Some(m))?;
                } else {
                    lp.set_bounds(i, Some(T::zero()), Some(T::zero()))?;
                }
            }
            let sol = solve_lp(&lp)?;
            if sol.status != LpStatus::Optimal {
                return Err(Error::Refused(format!(
                    "hinge LP on support {mask:b} is {:?}",
                    sol.status
                )));
            }
            let p = sol.point.expect("optimal point");
            let x = p[..n].to_vec();
            let b = p[n];
            let size = T::lit(mask.count_ones() as f64);
            Ok((inst.hinge_loss(&x, b) + lam * size, x, b))
        })
        .collect();
    let mut best: Option<(u32, T, Vec<T>, T)> = None;
    for (mask, c) in candidates.into_iter().enumerate() {
        let (v, x, b) = c?;
        if best.as_ref().is_none_or(|bst| v < bst.1) {
            best = Some((mask as u32, v, x, b));
        }
    }
    let (mask, objective, x, b) = best.expect("at least the empty support");
    Ok(OracleResult {
        objective,
        x,
        b,
        support: support_of(mask, n),
    })
}

/// Capped-ℓ1 parameter `(τ + λ)/(λM)` matching a penalty weight `τ ≥ λ`.
pub fn capped_theta_from_tau<T: Real>(tau: T, lambda: T, m: T) -> Result<T> {
    if !(lambda > T::zero()) || !(m > T::zero()) {
        return Err(Error::Domain("lambda and M must be positive".into()));
    }
    if !(tau >= lambda) {
        return Err(Error::Domain(format!(
            "penalty weight {tau} must be at least lambda {lambda}"
        )));
    }
    Ok((tau + lambda) / (lambda * m))
}

/// A threshold of which only part could be computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialBound<T> {
    pub value: T,
    /// True when the full threshold also depends on a quantity with no
    /// closed form, so `value` is only a lower bound.
    pub partial: bool,
}

/// Computable part `2/M` of the Capped-ℓ1 exactness threshold on a box.
pub fn theta_zero_lower_bound<T: Real>(lambda: T, m: T) -> Result<PartialBound<T>> {
    if !(lambda > T::zero()) || !(m > T::zero()) {
        return Err(Error::Domain("lambda and M must be positive".into()));
    }
    Ok(PartialBound {
        value: T::two() / m,
        partial: true,
    })
}

/// `(1-λ) · data_spread`, the Lipschitz bound of the hinge loss per weight.
/// `kappa_svm / λ` equals [`SvmInstance::theta_star`].
pub fn kappa_svm<T: Real>(inst: &SvmInstance<T>) -> T {
    (T::one() - inst.lambda()) * inst.data_spread()
}

/// `min_b` of the hinge loss at fixed `x`.
///
/// As a function of `b` the loss is convex piecewise linear with slope
/// `wa·#{cⱼ < b} - wb·#{dⱼ > b}`, where `cⱼ = aⱼᵀx - 1` and
/// `dⱼ = bⱼᵀx + 1`, so the minimum sits at the first kink where the slope
/// turns nonnegative.
pub fn hinge_min_over_offset<T: Real>(inst: &SvmInstance<T>, x: &[T]) -> (T, T) {
    let lam = inst.lambda();
    let wa = (T::one() - lam) / T::lit(inst.n_a() as f64);
    let wb = (T::one() - lam) / T::lit(inst.n_b() as f64);
    // (kink, slope increment)
    let mut kinks: Vec<(T, T)> = Vec::with_capacity(inst.n_a() + inst.n_b());
    for r in inst.class_a() {
        kinks.push((dot(r, x) - T::one(), wa));
    }
    for r in inst.class_b() {
        kinks.push((dot(r, x) + T::one(), wb));
    }
    kinks.sort_by(|p, q| p.0.partial_cmp(&q.0).expect("finite kinks"));
    let mut slope = -wb * T::lit(inst.n_b() as f64);
    let mut b = kinks[0].0;
    for &(k, inc) in &kinks {
        b = k;
        slope = slope + inc;
        if slope >= T::zero() {
            break;
        }
    }
    (inst.hinge_loss(x, b), b)
}

/// Grid points `k·h` for `k = -K..=K` with `K = ceil(M / resolution)`.
fn grid_axis<T: Real>(m: T, resolution: T) -> Vec<T> {
    let k = (m / resolution).ceil().to_usize().unwrap_or(1).max(1);
    let h = m / T::lit(k as f64);
    (0..=2 * k).map(|j| T::lit(j as f64 - k as f64) * h).collect()
}

/// Minimum of hinge loss plus `λ Σ r(xᵢ)` over the grid `[-M, M]ⁿ` with
/// the offset optimized exactly. Only `n ≤ 2` is accepted. Ties keep the
/// lexicographically first grid point.
pub fn grid_oracle<T: Real>(boxed: &BoxedInstance<T>, spec: &PenaltySpec<T>, resolution: T) -> Result<OracleResult<T>> {
    let inst = &boxed.inst;
    let n = inst.n_features();
    if n > 2 {
        return Err(Error::Refused(format!(
            "grid search limited to 2 features, instance has {n}"
        )));
    }
    if !(resolution > T::zero()) {
        return Err(Error::Domain(format!("resolution must be positive, got {resolution}")));
    }
    let axis = grid_axis(boxed.m_box, resolution);
    let lam = inst.lambda();
    let eval = |x: &[T]| -> (T, T) {
        let (h, b) = hinge_min_over_offset(inst, x);
        let pen: T = x.iter().map(|&v| spec.value(v)).sum();
        (h + lam * pen, b)
    };
    let best = match n {
        0 => {
            let (v, b) = eval(&[]);
            (v, Vec::new(), b)
        }
        1 => axis
            .iter()
            .map(|&x0| {
                let (v, b) = eval(&[x0]);
                (v, vec![x0], b)
            })
            .fold(None, keep_first_min)
            .expect("nonempty grid"),
        _ => axis
            .par_iter()
            .map(|&x0| {
                axis.iter()
                    .map(|&x1| {
                        let (v, b) = eval(&[x0, x1]);
                        (v, vec![x0, x1], b)
                    })
                    .fold(None, keep_first_min)
                    .expect("nonempty grid")
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold(None, keep_first_min)
            .expect("nonempty grid"),
    };
    let (objective, x, b) = best;
    let support = (0..n).filter(|&i| x[i] != T::zero()).collect();
    Ok(OracleResult {
        objective,
        x,
        b,
        support,
    })
}

fn keep_first_min<T: Real>(acc: Option<(T, Vec<T>, T)>, cur: (T, Vec<T>, T)) -> Option<(T, Vec<T>, T)> {
    match acc {
        Some(a) if a.0 <= cur.0 => Some(a),
        _ => Some(cur),
    }
}

/// [`grid_oracle`] restricted to the Capped-ℓ1 penalty.
pub fn grid_oracle_capped<T: Real>(
    boxed: &BoxedInstance<T>,
    spec: &PenaltySpec<T>,
    resolution: T,
) -> Result<OracleResult<T>> {
    if spec.kind() != PenaltyKind::Cap {
        return Err(Error::UnsupportedKind(spec.kind().name()));
    }
    grid_oracle(boxed, spec, resolution)
}

/// Outcome of [`scad_equivalence_probe`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeOutcome<T> {
    /// `r_cap ≤ r_scad ≤ s` held on the sample grid, with the Capped-ℓ1
    /// parameter `θ_scad / a`.
    pub sandwich: bool,
    pub approx_value: T,
    pub l0_value: T,
    pub tolerance: T,
    pub equivalent: bool,
}

/// Checks numerically whether the SCAD problem with `(theta, a)` has the
/// same optimal value as the ℓ0 problem on the box. The tolerance is
/// `2 · resolution · κ`, the grid error bound of the hinge loss.
pub fn scad_equivalence_probe<T: Real>(
    boxed: &BoxedInstance<T>,
    a: T,
    theta: T,
    resolution: T,
) -> Result<ProbeOutcome<T>> {
    let scad = PenaltySpec::scad(theta, a)?;
    let cap = PenaltySpec::cap(theta / a)?;
    let m = boxed.m_box;
    let steps = 10_000;
    let sandwich = (0..=steps).all(|k| {
        let t = m * T::lit(k as f64 / steps as f64);
        let s = crate::approx::step(t);
        let r = scad.value(t);
        cap.value(t) <= r + T::epsilon() * T::lit(4.0) && r <= s
    });
    let approx = grid_oracle(boxed, &scad, resolution)?;
    let l0 = support_enum_oracle(boxed, DEFAULT_N_LIMIT)?;
    let tolerance = T::two() * resolution * kappa_svm(&boxed.inst) + T::lit(1e-12);
    let equivalent = sandwich && (approx.objective - l0.objective).abs() <= tolerance;
    Ok(ProbeOutcome {
        sandwich,
        approx_value: approx.objective,
        l0_value: l0.objective,
        tolerance,
        equivalent,
    })
}
