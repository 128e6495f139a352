//! Zero-norm approximation penalties and the subgradient rules built on them.
//!
//! Every penalty `r` is even, vanishes at the origin (except `LpPlus`) and
//! increases on `[0, ∞)`. Each family comes with the DC split
//! `r(t) = φ(t) - ψ(t)`: `φ(t) = η|t|` for the concave families and a
//! polyhedral pair for `PiL`. The trade-off weight λ is factored out of every
//! rule here; callers multiply.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PenaltyKind {
    Exp,
    LpPlus,
    LpMinus,
    Log,
    Scad,
    Cap,
    PiL,
}

impl PenaltyKind {
    pub const ALL: [PenaltyKind; 7] = [
        PenaltyKind::Exp,
        PenaltyKind::LpPlus,
        PenaltyKind::LpMinus,
        PenaltyKind::Log,
        PenaltyKind::Scad,
        PenaltyKind::Cap,
        PenaltyKind::PiL,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PenaltyKind::Exp => "exp",
            PenaltyKind::LpPlus => "lp+",
            PenaltyKind::LpMinus => "lp-",
            PenaltyKind::Log => "log",
            PenaltyKind::Scad => "scad",
            PenaltyKind::Cap => "cap",
            PenaltyKind::PiL => "pil",
        }
    }
}

/// Side of a one-sided derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A penalty family together with its parameters.
///
/// Fields are private so that every instance has passed validation: `theta > 0`,
/// `a > 1` for SCAD and PiL, `p < 0` for `LpMinus`, `eps > 0` for `LpPlus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySpec<T> {
    kind: PenaltyKind,
    theta: T,
    a: T,
    p: T,
    eps: T,
}

/// Default `ε` of the `LpPlus` family.
pub const DEFAULT_LP_PLUS_EPS: f64 = 1e-9;
/// Default perturbation used by the reweighted-ℓ2 weights.
pub const DEFAULT_EPS_PERT: f64 = 1e-4;

fn check_theta<T: Real>(theta: T) -> Result<()> {
    if theta > T::zero() && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidPenalty(format!("theta must be positive, got {theta}")))
    }
}

fn check_a<T: Real>(a: T) -> Result<()> {
    if a > T::one() && a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidPenalty(format!("a must exceed 1, got {a}")))
    }
}

impl<T: Real> PenaltySpec<T> {
    fn raw(kind: PenaltyKind, theta: T) -> Self {
        PenaltySpec {
            kind,
            theta,
            a: T::zero(),
            p: T::zero(),
            eps: T::zero(),
        }
    }

    pub fn exp(theta: T) -> Result<Self> {
        check_theta(theta)?;
        Ok(Self::raw(PenaltyKind::Exp, theta))
    }

    /// Requires `θ > 1`: smaller values make `(|t|+ε)^(1/θ)` convex.
    pub fn lp_plus(theta: T, eps: T) -> Result<Self> {
        check_theta(theta)?;
        if !(theta > T::one()) {
            return Err(Error::InvalidPenalty(format!("lp+ needs theta > 1, got {theta}")));
        }
        if !(eps > T::zero()) {
            return Err(Error::InvalidPenalty(format!("eps must be positive, got {eps}")));
        }
        Ok(PenaltySpec {
            eps,
            ..Self::raw(PenaltyKind::LpPlus, theta)
        })
    }

    pub fn lp_minus(theta: T, p: T) -> Result<Self> {
        check_theta(theta)?;
        if !(p < T::zero()) {
            return Err(Error::InvalidPenalty(format!("p must be negative, got {p}")));
        }
        Ok(PenaltySpec {
            p,
            ..Self::raw(PenaltyKind::LpMinus, theta)
        })
    }

    pub fn log(theta: T) -> Result<Self> {
        check_theta(theta)?;
        Ok(Self::raw(PenaltyKind::Log, theta))
    }

    pub fn scad(theta: T, a: T) -> Result<Self> {
        check_theta(theta)?;
        check_a(a)?;
        Ok(PenaltySpec {
            a,
            ..Self::raw(PenaltyKind::Scad, theta)
        })
    }

    pub fn cap(theta: T) -> Result<Self> {
        check_theta(theta)?;
        Ok(Self::raw(PenaltyKind::Cap, theta))
    }

    pub fn pil(theta: T, a: T) -> Result<Self> {
        check_theta(theta)?;
        check_a(a)?;
        Ok(PenaltySpec {
            a,
            ..Self::raw(PenaltyKind::PiL, theta)
        })
    }

    pub fn kind(&self) -> PenaltyKind {
        self.kind
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    /// Shape parameter of SCAD and PiL (zero for the other families).
    pub fn a(&self) -> T {
        self.a
    }

    /// Exponent of `LpMinus` (zero for the other families).
    pub fn p(&self) -> T {
        self.p
    }

    /// Offset of `LpPlus` (zero for the other families).
    pub fn eps(&self) -> T {
        self.eps
    }

    /// Same family and shape parameters with a different `theta`.
    pub fn with_theta(&self, theta: T) -> Result<Self> {
        check_theta(theta)?;
        Ok(PenaltySpec { theta, ..*self })
    }

    /// Same family with a different `a` (SCAD and PiL only).
    pub fn with_a(&self, a: T) -> Result<Self> {
        match self.kind {
            PenaltyKind::Scad | PenaltyKind::PiL => {
                check_a(a)?;
                Ok(PenaltySpec { a, ..*self })
            }
            k => Err(Error::UnsupportedKind(k.name())),
        }
    }

    fn not_pil(&self) -> Result<()> {
        if self.kind == PenaltyKind::PiL {
            Err(Error::UnsupportedKind("pil"))
        } else {
            Ok(())
        }
    }

    fn only_pil(&self) -> Result<()> {
        if self.kind == PenaltyKind::PiL {
            Ok(())
        } else {
            Err(Error::UnsupportedKind(self.kind.name()))
        }
    }

    /// The penalty `r_θ(t)`.
    pub fn value(&self, t: T) -> T {
        let u = t.abs();
        let one = T::one();
        let th = self.theta;
        match self.kind {
            PenaltyKind::Exp => one - (-th * u).exp(),
            PenaltyKind::LpPlus => (u + self.eps).powf(one / th),
            PenaltyKind::LpMinus => one - (one + th * u).powf(self.p),
            PenaltyKind::Log => (th * u).ln_1p() / th.ln_1p(),
            PenaltyKind::Scad => {
                let a = self.a;
                if u <= one / th {
                    T::two() * th * u / (a + one)
                } else if u < a / th {
                    (-th * th * u * u + T::two() * a * th * u - one) / (a * a - one)
                } else {
                    one
                }
            }
            PenaltyKind::Cap => (th * u).min(one),
            PenaltyKind::PiL => ((th * u - one) / (self.a - one)).max(T::zero()).min(one),
        }
    }

    /// One-sided derivative of `r` at `t`.
    pub fn derivative(&self, t: T, side: Side) -> T {
        if t > T::zero() {
            self.radial_derivative(t, side)
        } else if t < T::zero() {
            -self.radial_derivative(-t, side.flip())
        } else {
            let d = self.radial_derivative(T::zero(), Side::Right);
            match side {
                Side::Right => d,
                Side::Left => -d,
            }
        }
    }

    /// One-sided derivative of `u ↦ r(u)` for `u ≥ 0`. At `u = 0` only the
    /// right derivative is meaningful.
    fn radial_derivative(&self, u: T, side: Side) -> T {
        let one = T::one();
        let th = self.theta;
        match self.kind {
            PenaltyKind::Exp => th * (-th * u).exp(),
            PenaltyKind::LpPlus => (u + self.eps).powf(one / th - one) / th,
            PenaltyKind::LpMinus => -self.p * th * (one + th * u).powf(self.p - one),
            PenaltyKind::Log => th / ((one + th * u) * th.ln_1p()),
            PenaltyKind::Scad => {
                let a = self.a;
                if u <= one / th {
                    T::two() * th / (a + one)
                } else if u < a / th {
                    T::two() * th * (a - th * u) / (a * a - one)
                } else {
                    T::zero()
                }
            }
            PenaltyKind::Cap => {
                let knot = one / th;
                if u < knot || (u == knot && side == Side::Left) {
                    th
                } else {
                    T::zero()
                }
            }
            PenaltyKind::PiL => {
                let lo = one / th;
                let hi = self.a / th;
                let slope = th / (self.a - one);
                let inside = (u > lo && u < hi) || (u == lo && side == Side::Right) || (u == hi && side == Side::Left);
                if inside {
                    slope
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Slope `η` of the majorant `η|t|`; equals `r'(0⁺)`, which makes
    /// `ψ = η|·| - r` convex for the concave families.
    pub fn eta(&self) -> Result<T> {
        self.not_pil()?;
        let one = T::one();
        let th = self.theta;
        Ok(match self.kind {
            PenaltyKind::Exp | PenaltyKind::Cap => th,
            PenaltyKind::LpPlus => self.eps.powf(one / th - one) / th,
            PenaltyKind::LpMinus => -self.p * th,
            PenaltyKind::Log => th / th.ln_1p(),
            PenaltyKind::Scad => T::two() * th / (self.a + one),
            PenaltyKind::PiL => unreachable!(),
        })
    }

    /// First DC component: `η|t|`, or `φ_PiL` for PiL.
    pub fn phi_value(&self, t: T) -> T {
        match self.kind {
            PenaltyKind::PiL => self.pil_phi(t),
            _ => self.eta().expect("non-PiL") * t.abs(),
        }
    }

    /// Second DC component `ψ = φ - r`.
    pub fn psi_value(&self, t: T) -> T {
        match self.kind {
            PenaltyKind::PiL => self.pil_psi(t),
            _ => self.eta().expect("non-PiL") * t.abs() - self.value(t),
        }
    }

    /// An element of `∂ψ(t)` for `ψ = η|·| - r`. Returns `0` whenever `0`
    /// belongs to the subdifferential.
    pub fn psi_subgrad(&self, t: T) -> Result<T> {
        self.not_pil()?;
        let one = T::one();
        let th = self.theta;
        let u = t.abs();
        let s = t.sign();
        Ok(match self.kind {
            PenaltyKind::Exp => s * th * (one - (-th * u).exp()),
            PenaltyKind::LpPlus => {
                let e = one / th - one;
                s * (self.eps.powf(e) - (u + self.eps).powf(e)) / th
            }
            PenaltyKind::LpMinus => -s * self.p * th * (one - (one + th * u).powf(self.p - one)),
            PenaltyKind::Log => s * th * th * u / (th.ln_1p() * (one + th * u)),
            PenaltyKind::Scad => {
                let a = self.a;
                if u <= one / th {
                    T::zero()
                } else if u < a / th {
                    s * T::two() * th * (th * u - one) / (a * a - one)
                } else {
                    s * T::two() * th / (a + one)
                }
            }
            PenaltyKind::Cap => {
                if u <= one / th {
                    T::zero()
                } else {
                    s * th
                }
            }
            PenaltyKind::PiL => unreachable!(),
        })
    }

    /// Reweighted-ℓ1 weight: an element of `-∂(-r)(z)` for `z ≥ 0`.
    ///
    /// At a kink the left derivative is taken, so the weight is the
    /// complement `η - |ψ'|` of the DCA1 selection.
    pub fn l1_weight(&self, z: T) -> Result<T> {
        if !(z >= T::zero()) {
            return Err(Error::Domain(format!("weight argument must be nonnegative, got {z}")));
        }
        Ok(if z == T::zero() {
            self.radial_derivative(z, Side::Right)
        } else {
            self.radial_derivative(z, Side::Left)
        })
    }

    /// Reweighted-ℓ2 weight at `t = sqrt(z + eps_pert)`: `l1_weight(t) / (2t)`.
    pub fn l2_weight(&self, eps_pert: T, z: T) -> Result<T> {
        if !(eps_pert > T::zero()) {
            return Err(Error::Domain(format!("eps_pert must be positive, got {eps_pert}")));
        }
        if !(z >= T::zero()) {
            return Err(Error::Domain(format!("weight argument must be nonnegative, got {z}")));
        }
        let t = (z + eps_pert).sqrt();
        Ok(self.l1_weight(t)? / (T::two() * t))
    }

    fn pil_slope(&self) -> T {
        self.theta / (self.a - T::one())
    }

    fn pil_phi(&self, t: T) -> T {
        self.pil_slope() * (T::one() / self.theta).max(t.abs())
    }

    fn pil_psi(&self, t: T) -> T {
        self.pil_slope() * (self.a / self.theta).max(t.abs()) - T::one()
    }

    /// `φ_PiL(t) = θ/(a-1) · max{1/θ, |t|}`.
    pub fn pil_phi_value(&self, t: T) -> Result<T> {
        self.only_pil()?;
        Ok(self.pil_phi(t))
    }

    /// `ψ_PiL(t) = θ/(a-1) · max{a/θ, |t|} - 1`.
    pub fn pil_psi_value(&self, t: T) -> Result<T> {
        self.only_pil()?;
        Ok(self.pil_psi(t))
    }

    /// Element of `∂φ_PiL(t)`; zero on the flat part including its ends.
    pub fn pil_phi_subgrad(&self, t: T) -> Result<T> {
        self.only_pil()?;
        Ok(if t.abs() > T::one() / self.theta {
            t.sign() * self.pil_slope()
        } else {
            T::zero()
        })
    }

    /// Element of `∂ψ_PiL(t)`: `±θ/(a-1)` beyond `±a/θ`, zero otherwise.
    pub fn pil_psi_subgrad(&self, t: T) -> Result<T> {
        self.only_pil()?;
        let knot = self.a / self.theta;
        Ok(if t > knot {
            self.pil_slope()
        } else if t < -knot {
            -self.pil_slope()
        } else {
            T::zero()
        })
    }

    /// One-sided slopes at the origin of the three per-coordinate surrogates
    /// minimized by DCA1, DCA2 and DCA3 when the previous iterate is `xk`.
    ///
    /// Returns `[(left, right); 3]` in scheme order.
    pub fn surrogate_slopes_at_zero(&self, xk: T) -> Result<[(T, T); 3]> {
        self.not_pil()?;
        if xk == T::zero() {
            return Err(Error::Domain("previous iterate must be nonzero".into()));
        }
        let eta = self.eta()?;
        let w = self.l1_weight(xk.abs())?;
        let first = if xk > T::zero() {
            (w - T::two() * eta, w)
        } else {
            (-w, T::two() * eta - w)
        };
        Ok([first, (-w, w), (T::zero(), T::zero())])
    }
}

/// The step function `s(t)`: `1` for `t ≠ 0`, `0` at the origin.
pub fn step<T: Real>(t: T) -> T {
    if t != T::zero() {
        T::one()
    } else {
        T::zero()
    }
}

impl<T: Real> fmt::Display for PenaltySpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let th = self.theta.as_f64();
        match self.kind {
            PenaltyKind::Scad | PenaltyKind::PiL => {
                write!(f, "{}:theta={},a={}", self.kind.name(), th, self.a.as_f64())
            }
            PenaltyKind::LpPlus => write!(f, "lp+:theta={},eps={}", th, self.eps.as_f64()),
            PenaltyKind::LpMinus => write!(f, "lp-:theta={},p={}", th, self.p.as_f64()),
            k => write!(f, "{}:theta={}", k.name(), th),
        }
    }
}

impl<T: Real> FromStr for PenaltySpec<T> {
    type Err = Error;

    /// Parses `family:key=value,...`, e.g. `scad:theta=2,a=4` or
    /// `lp+:theta=5,eps=1e-9`. SCAD defaults to `a = 4`, PiL to `a = 5`,
    /// `lp-` to `p = -2` and `lp+` to `eps = 1e-9`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::InvalidPenalty(m);
        let (name, params) = match s.split_once(':') {
            Some((n, p)) => (n.trim(), p.trim()),
            None => (s.trim(), ""),
        };
        let mut theta = None;
        let mut a = None;
        let mut p = None;
        let mut eps = None;
        for kv in params.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{kv}`")))?;
            let v: f64 = v.trim().parse().map_err(|_| bad(format!("not a number: `{v}`")))?;
            let slot = match k.trim() {
                "theta" => &mut theta,
                "a" => &mut a,
                "p" => &mut p,
                "eps" => &mut eps,
                other => return Err(bad(format!("unknown parameter `{other}`"))),
            };
            *slot = Some(T::lit(v));
        }
        let theta = theta.ok_or_else(|| bad(format!("`{s}`: theta is required")))?;
        let allow = |ok: &[&str]| -> Result<()> {
            let given = [("a", a.is_some()), ("p", p.is_some()), ("eps", eps.is_some())];
            for (k, present) in given {
                if present && !ok.contains(&k) {
                    return Err(bad(format!("parameter `{k}` does not apply to `{name}`")));
                }
            }
            Ok(())
        };
        match name.to_ascii_lowercase().as_str() {
            "exp" => allow(&[]).and_then(|_| Self::exp(theta)),
            "log" => allow(&[]).and_then(|_| Self::log(theta)),
            "cap" => allow(&[]).and_then(|_| Self::cap(theta)),
            "scad" => {
                allow(&["a"])?;
                Self::scad(theta, a.unwrap_or_else(|| T::lit(4.0)))
            }
            "pil" => {
                allow(&["a"])?;
                Self::pil(theta, a.unwrap_or_else(|| T::lit(5.0)))
            }
            "lp+" => {
                allow(&["eps"])?;
                Self::lp_plus(theta, eps.unwrap_or_else(|| T::lit(DEFAULT_LP_PLUS_EPS)))
            }
            "lp-" => {
                allow(&["p"])?;
                Self::lp_minus(theta, p.unwrap_or_else(|| T::lit(-2.0)))
            }
            other => Err(bad(format!("unknown penalty family `{other}`"))),
        }
    }
}
