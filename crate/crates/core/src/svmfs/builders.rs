//! Convex subproblems of the four schemes.
//!
//! Variables are laid out as `x (n) | b | ξ (N_A) | ζ (N_B) | aux (n)`,
//! where `aux` is `z` for the reweighted-ℓ1 forms, `t` for the piecewise
//! linear one, and absent for the quadratic one.

use crate::approx::{PenaltyKind, PenaltySpec};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::subsolver::{DiagQp, LinearProgram};

use super::instance::SvmInstance;

/// Default `|xᵢ|` bound used by the quadratic subproblem.
pub const DEFAULT_M_BOX: f64 = 1e3;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub n: usize,
    pub na: usize,
    pub nb: usize,
    pub aux: bool,
}

impl Layout {
    pub fn of<T: Real>(inst: &SvmInstance<T>, aux: bool) -> Self {
        Layout {
            n: inst.n_features(),
            na: inst.n_a(),
            nb: inst.n_b(),
            aux,
        }
    }
    pub fn b(&self) -> usize {
        self.n
    }
    pub fn xi(&self, j: usize) -> usize {
        self.n + 1 + j
    }
    pub fn zeta(&self, j: usize) -> usize {
        self.n + 1 + self.na + j
    }
    pub fn aux(&self, i: usize) -> usize {
        self.n + 1 + self.na + self.nb + i
    }
    pub fn width(&self) -> usize {
        self.n + 1 + self.na + self.nb + if self.aux { self.n } else { 0 }
    }
}

/// Hinge objective and the margin rows
/// `-aⱼᵀx + b - ξⱼ ≤ -1`, `bⱼᵀx - b - ζⱼ ≤ -1`, `ξ, ζ ≥ 0`.
fn hinge_lp<T: Real>(inst: &SvmInstance<T>, lay: Layout) -> Result<LinearProgram<T>> {
    let mut c = vec![T::zero(); lay.width()];
    let lam = inst.lambda();
    let wa = (T::one() - lam) / T::lit(lay.na as f64);
    let wb = (T::one() - lam) / T::lit(lay.nb as f64);
    for j in 0..lay.na {
        c[lay.xi(j)] = wa;
    }
    for j in 0..lay.nb {
        c[lay.zeta(j)] = wb;
    }
    let mut lp = LinearProgram::new(c);
    for (j, row) in inst.class_a().iter().enumerate() {
        let mut coeffs = vec![T::zero(); lay.width()];
        for (i, &v) in row.iter().enumerate() {
            coeffs[i] = -v;
        }
        coeffs[lay.b()] = T::one();
        coeffs[lay.xi(j)] = -T::one();
        lp.add_le(coeffs, -T::one())?;
    }
    for (j, row) in inst.class_b().iter().enumerate() {
        let mut coeffs = vec![T::zero(); lay.width()];
        coeffs[..lay.n].copy_from_slice(row);
        coeffs[lay.b()] = -T::one();
        coeffs[lay.zeta(j)] = -T::one();
        lp.add_le(coeffs, -T::one())?;
    }
    for j in 0..lay.na {
        lp.set_bounds(lay.xi(j), Some(T::zero()), None)?;
    }
    for j in 0..lay.nb {
        lp.set_bounds(lay.zeta(j), Some(T::zero()), None)?;
    }
    Ok(lp)
}

/// Adds `±xᵢ ≤ auxᵢ` and a lower bound on `auxᵢ`, and sets cost
/// `aux_cost[i]` on `auxᵢ` and `-linear[i]` on `xᵢ`.
fn add_abs_block<T: Real>(
    lp: &mut LinearProgram<T>,
    lay: Layout,
    aux_cost: &[T],
    linear: &[T],
    aux_floor: T,
) -> Result<()> {
    let mut c = lp.objective().to_vec();
    for i in 0..lay.n {
        c[i] = -linear[i];
        c[lay.aux(i)] = aux_cost[i];
        lp.add_sparse_le(&[(i, T::one()), (lay.aux(i), -T::one())], T::zero())?;
        lp.add_sparse_le(&[(i, -T::one()), (lay.aux(i), -T::one())], T::zero())?;
        lp.set_bounds(lay.aux(i), Some(aux_floor), None)?;
    }
    lp.set_objective(c)
}

fn check_len<T>(v: &[T], n: usize, what: &str) -> Result<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "{what} has {} entries, expected {n}",
            v.len()
        )))
    }
}

fn check_nonneg<T: Real>(w: &[T]) -> Result<()> {
    match w.iter().find(|v| !(**v >= T::zero())) {
        Some(v) => Err(Error::Domain(format!("weights must be nonnegative, got {v}"))),
        None => Ok(()),
    }
}

/// Pure hinge-loss LP over `(x, b, ξ, ζ)`, optionally with `|xᵢ| ≤ m_box`.
pub fn build_hinge_lp<T: Real>(inst: &SvmInstance<T>, m_box: Option<T>) -> Result<LinearProgram<T>> {
    let lay = Layout::of(inst, false);
    let mut lp = hinge_lp(inst, lay)?;
    if let Some(m) = m_box {
        for i in 0..lay.n {
            lp.set_bounds(i, Some(-m), Some(m))?;
        }
    }
    Ok(lp)
}

/// Linearized subproblem: hinge `+ λη Σzᵢ - z̄ᵀx` with `|x| ≤ z`.
pub fn build_dca1_lp<T: Real>(inst: &SvmInstance<T>, spec: &PenaltySpec<T>, zbar: &[T]) -> Result<LinearProgram<T>> {
    let eta = spec.eta()?;
    build_dca1_lp_with_slope(inst, eta, zbar)
}

/// As [`build_dca1_lp`] with the `ℓ1` slope given directly.
pub fn build_dca1_lp_with_slope<T: Real>(inst: &SvmInstance<T>, eta: T, zbar: &[T]) -> Result<LinearProgram<T>> {
    check_len(zbar, inst.n_features(), "linear term")?;
    let lay = Layout::of(inst, true);
    let mut lp = hinge_lp(inst, lay)?;
    let cost = vec![inst.lambda() * eta; lay.n];
    add_abs_block(&mut lp, lay, &cost, zbar, T::zero())?;
    Ok(lp)
}

/// Weighted-ℓ1 subproblem: hinge `+ wᵀz` with `|x| ≤ z`.
pub fn build_dca2_lp<T: Real>(inst: &SvmInstance<T>, w: &[T]) -> Result<LinearProgram<T>> {
    check_len(w, inst.n_features(), "weights")?;
    check_nonneg(w)?;
    let lay = Layout::of(inst, true);
    let mut lp = hinge_lp(inst, lay)?;
    add_abs_block(&mut lp, lay, w, &vec![T::zero(); lay.n], T::zero())?;
    Ok(lp)
}

/// Weighted-ℓ2 subproblem: hinge `+ Σ wᵢxᵢ²` with `|xᵢ| ≤ m_box`.
pub fn build_dca3_qp<T: Real>(inst: &SvmInstance<T>, w: &[T], m_box: T) -> Result<DiagQp<T>> {
    check_len(w, inst.n_features(), "weights")?;
    check_nonneg(w)?;
    let lp = build_hinge_lp(inst, Some(m_box))?;
    let mut q = vec![T::zero(); lp.n_vars()];
    q[..w.len()].copy_from_slice(w);
    DiagQp::new(lp, q)
}

/// Piecewise-linear subproblem: hinge `+ (λθ/(a-1)) Σtᵢ - z̄ᵀx` with
/// `|xᵢ| ≤ tᵢ` and `tᵢ ≥ 1/θ`.
pub fn build_dca4_lp<T: Real>(inst: &SvmInstance<T>, spec: &PenaltySpec<T>, zbar: &[T]) -> Result<LinearProgram<T>> {
    if spec.kind() != PenaltyKind::PiL {
        return Err(Error::Incompatible(format!(
            "dca4 requires pil, got {}",
            spec.kind().name()
        )));
    }
    check_len(zbar, inst.n_features(), "linear term")?;
    let lay = Layout::of(inst, true);
    let mut lp = hinge_lp(inst, lay)?;
    let th = spec.theta();
    let cost = vec![inst.lambda() * th / (spec.a() - T::one()); lay.n];
    add_abs_block(&mut lp, lay, &cost, zbar, T::one() / th)?;
    Ok(lp)
}
