use crate::approx::{step, PenaltySpec, Side};
use crate::dcacore::DcaState;
use crate::error::{Error, Result};
use crate::scalar::{dist2, dot, norm2, Real};

/// Two-class training data with the sparsity trade-off `λ`.
///
/// Rows of `a` are the `+1` points, rows of `b` the `-1` points.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmInstance<T> {
    a: Vec<Vec<T>>,
    b: Vec<Vec<T>>,
    lambda: T,
    n: usize,
}

impl<T: Real> SvmInstance<T> {
    pub fn new(a: Vec<Vec<T>>, b: Vec<Vec<T>>, lambda: T) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::Data("both classes need at least one point".into()));
        }
        let n = a[0].len();
        if a.iter().chain(&b).any(|r| r.len() != n) {
            return Err(Error::Dimension("class matrices must share the feature count".into()));
        }
        if a.iter().chain(&b).flatten().any(|v| !v.is_finite()) {
            return Err(Error::Data("features must be finite".into()));
        }
        check_lambda(lambda)?;
        Ok(SvmInstance { a, b, lambda, n })
    }

    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(SvmInstance { lambda, ..self.clone() })
    }

    pub fn class_a(&self) -> &[Vec<T>] {
        &self.a
    }

    pub fn class_b(&self) -> &[Vec<T>] {
        &self.b
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn n_features(&self) -> usize {
        self.n
    }

    pub fn n_a(&self) -> usize {
        self.a.len()
    }

    pub fn n_b(&self) -> usize {
        self.b.len()
    }

    /// Slack of each `+1` point: `max{0, -aᵀx + b + 1}`.
    pub fn slacks_a(&self, x: &[T], b: T) -> Vec<T> {
        self.a
            .iter()
            .map(|r| (b + T::one() - dot(r, x)).max(T::zero()))
            .collect()
    }

    /// Slack of each `-1` point: `max{0, bᵀx - b + 1}`.
    pub fn slacks_b(&self, x: &[T], b: T) -> Vec<T> {
        self.b
            .iter()
            .map(|r| (dot(r, x) - b + T::one()).max(T::zero()))
            .collect()
    }

    fn weight_a(&self) -> T {
        (T::one() - self.lambda) / T::lit(self.n_a() as f64)
    }

    fn weight_b(&self) -> T {
        (T::one() - self.lambda) / T::lit(self.n_b() as f64)
    }

    /// `(1-λ)(Σξ/N_A + Σζ/N_B)`.
    pub fn hinge_loss(&self, x: &[T], b: T) -> T {
        let sa: T = self.slacks_a(x, b).into_iter().sum();
        let sb: T = self.slacks_b(x, b).into_iter().sum();
        self.weight_a() * sa + self.weight_b() * sb
    }

    /// Hinge loss plus `λ` times the number of exactly nonzero weights.
    pub fn l0_objective(&self, x: &[T], b: T) -> T {
        let count: T = x.iter().map(|&v| step(v)).sum();
        self.hinge_loss(x, b) + self.lambda * count
    }

    /// Hinge loss plus `λ Σ r(xᵢ)`.
    pub fn approx_objective(&self, spec: &PenaltySpec<T>, x: &[T], b: T) -> T {
        let pen: T = x.iter().map(|&v| spec.value(v)).sum();
        self.hinge_loss(x, b) + self.lambda * pen
    }

    /// The lifted objective with auxiliary bounds `z ≥ |x|`:
    /// hinge loss plus `λ Σ r(zᵢ)`.
    pub fn lifted_objective(&self, spec: &PenaltySpec<T>, x: &[T], b: T, z: &[T]) -> T {
        let pen: T = z.iter().map(|&v| spec.value(v)).sum();
        self.hinge_loss(x, b) + self.lambda * pen
    }

    /// Hinge loss plus `λ Σ r(sqrt(xᵢ² + ε))`, the objective the
    /// reweighted-ℓ2 scheme descends on.
    pub fn perturbed_objective(&self, spec: &PenaltySpec<T>, eps: T, x: &[T], b: T) -> T {
        let pen: T = x.iter().map(|&v| spec.value((v * v + eps).sqrt())).sum();
        self.hinge_loss(x, b) + self.lambda * pen
    }

    /// One-sided partial derivative in `xᵢ` of hinge loss plus
    /// `λ Σ r(xⱼ)`. At a hinge kink a term counts only if moving `xᵢ`
    /// toward `side` makes it positive.
    pub fn one_sided_deriv(&self, spec: &PenaltySpec<T>, x: &[T], b: T, i: usize, side: Side) -> Result<T> {
        if x.len() != self.n {
            return Err(Error::Dimension("iterate length".into()));
        }
        if i >= self.n {
            return Err(Error::Dimension(format!("coordinate {i} out of range")));
        }
        let term = |w: T, slope: T| -> T {
            if w > T::zero() {
                slope
            } else if w < T::zero() {
                T::zero()
            } else {
                match side {
                    Side::Right => slope.max(T::zero()),
                    Side::Left => slope.min(T::zero()),
                }
            }
        };
        let mut da = T::zero();
        for r in &self.a {
            da = da + term(b + T::one() - dot(r, x), -r[i]);
        }
        let mut db = T::zero();
        for r in &self.b {
            db = db + term(dot(r, x) - b + T::one(), r[i]);
        }
        Ok(self.weight_a() * da + self.weight_b() * db + self.lambda * spec.derivative(x[i], side))
    }

    /// `max_i (Σ_k |A_ki| / N_A + Σ_l |B_li| / N_B)`.
    pub fn data_spread(&self) -> T {
        let na = T::lit(self.n_a() as f64);
        let nb = T::lit(self.n_b() as f64);
        (0..self.n)
            .map(|i| {
                let sa: T = self.a.iter().map(|r| r[i].abs()).sum();
                let sb: T = self.b.iter().map(|r| r[i].abs()).sum();
                sa / na + sb / nb
            })
            .fold(T::zero(), T::max)
    }

    /// Capped-ℓ1 parameter beyond which the approximate and the ℓ0 problems
    /// coincide: `(1-λ)/λ · data_spread`.
    pub fn theta_star(&self) -> T {
        (T::one() - self.lambda) / self.lambda * self.data_spread()
    }
}

fn check_lambda<T: Real>(lambda: T) -> Result<()> {
    if lambda > T::zero() && lambda < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("lambda must lie in (0, 1), got {lambda}")))
    }
}

/// A hyperplane `(x, b)` with the slacks it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelIterate<T> {
    pub x: Vec<T>,
    pub b: T,
    pub xi: Vec<T>,
    pub zeta: Vec<T>,
}

impl<T: Real> ModelIterate<T> {
    pub fn new(inst: &SvmInstance<T>, x: Vec<T>, b: T) -> Self {
        let xi = inst.slacks_a(&x, b);
        let zeta = inst.slacks_b(&x, b);
        ModelIterate { x, b, xi, zeta }
    }

    /// Reads `(x, b)` from the leading entries of a subproblem solution.
    pub(crate) fn from_solution(inst: &SvmInstance<T>, point: &[T]) -> Self {
        let n = inst.n_features();
        Self::new(inst, point[..n].to_vec(), point[n])
    }

    /// `(x, b, ξ, ζ)` stacked in subproblem variable order.
    pub(crate) fn stacked(&self) -> Vec<T> {
        let mut v = self.x.clone();
        v.push(self.b);
        v.extend_from_slice(&self.xi);
        v.extend_from_slice(&self.zeta);
        v
    }
}

impl<T: Real> DcaState for ModelIterate<T> {
    fn change_from(&self, prev: &Self) -> f64 {
        (dist2(&self.x, &prev.x) + (self.b - prev.b).abs() + dist2(&self.xi, &prev.xi) + dist2(&self.zeta, &prev.zeta))
            .as_f64()
    }

    fn magnitude(&self) -> f64 {
        (norm2(&self.x) + self.b.abs() + norm2(&self.xi) + norm2(&self.zeta)).as_f64()
    }
}
