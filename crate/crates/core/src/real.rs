//! Scalars for forward-mode differentiation.
//!
//! Every parametrized map in the crate is written once against [`Real`] and
//! evaluated with `f64`, `Dual<f64>` (first derivatives) or
//! `Dual<Dual<f64>>` (exact second derivatives, including mixed partials).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Scalar field used by parametrizations.
pub trait Real:
    Copy
    + fmt::Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + 'static
{
    fn cst(x: f64) -> Self;
    /// Underlying real value (all infinitesimal parts dropped).
    fn value(self) -> f64;

    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn asin(self) -> Self;
    fn atan(self) -> Self;
    fn asinh(self) -> Self;
    fn acosh(self) -> Self;
    fn atanh(self) -> Self;
    fn atan2(self, x: Self) -> Self;

    /// Applies a scalar function known only through its Taylor data at the
    /// base point: `derivs = [f(x0), f'(x0), f''(x0), ...]`. Each nesting
    /// level of `Dual` consumes one more entry, so `Dual<Dual<f64>>` needs
    /// three.
    fn chain(self, derivs: &[f64]) -> Self;

    fn powi(self, n: i32) -> Self {
        let mut acc = Self::cst(1.0);
        let base = if n < 0 { Self::cst(1.0) / self } else { self };
        for _ in 0..n.unsigned_abs() {
            acc *= base;
        }
        acc
    }

    fn recip(self) -> Self {
        Self::cst(1.0) / self
    }
}

impl Real for f64 {
    fn cst(x: f64) -> Self {
        x
    }
    fn value(self) -> f64 {
        self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn asin(self) -> Self {
        f64::asin(self)
    }
    fn atan(self) -> Self {
        f64::atan(self)
    }
    fn asinh(self) -> Self {
        f64::asinh(self)
    }
    fn acosh(self) -> Self {
        f64::acosh(self)
    }
    fn atanh(self) -> Self {
        f64::atanh(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn chain(self, derivs: &[f64]) -> Self {
        derivs[0]
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Dual number `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Real> Dual<T> {
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    /// Independent variable seeded with unit derivative.
    pub fn var(re: T) -> Self {
        Dual { re, eps: T::cst(1.0) }
    }

    pub fn constant(re: T) -> Self {
        Dual { re, eps: T::cst(0.0) }
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        let inv = o.re.recip();
        let re = self.re * inv;
        Dual::new(re, (self.eps - re * o.eps) * inv)
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<T: Real> AddAssign for Dual<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> SubAssign for Dual<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> MulAssign for Dual<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Real> Add<f64> for Dual<T> {
    type Output = Self;
    fn add(self, o: f64) -> Self {
        Dual::new(self.re + o, self.eps)
    }
}

impl<T: Real> Sub<f64> for Dual<T> {
    type Output = Self;
    fn sub(self, o: f64) -> Self {
        Dual::new(self.re - o, self.eps)
    }
}

impl<T: Real> Mul<f64> for Dual<T> {
    type Output = Self;
    fn mul(self, o: f64) -> Self {
        Dual::new(self.re * o, self.eps * o)
    }
}

impl<T: Real> Div<f64> for Dual<T> {
    type Output = Self;
    fn div(self, o: f64) -> Self {
        Dual::new(self.re / o, self.eps / o)
    }
}

impl<T: Real> Real for Dual<T> {
    fn cst(x: f64) -> Self {
        Dual::constant(T::cst(x))
    }
    fn value(self) -> f64 {
        self.re.value()
    }
    fn sin(self) -> Self {
        Dual::new(self.re.sin(), self.eps * self.re.cos())
    }
    fn cos(self) -> Self {
        Dual::new(self.re.cos(), -(self.eps * self.re.sin()))
    }
    fn sinh(self) -> Self {
        Dual::new(self.re.sinh(), self.eps * self.re.cosh())
    }
    fn cosh(self) -> Self {
        Dual::new(self.re.cosh(), self.eps * self.re.sinh())
    }
    fn tanh(self) -> Self {
        let t = self.re.tanh();
        Dual::new(t, self.eps * (T::cst(1.0) - t * t))
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        Dual::new(e, self.eps * e)
    }
    fn ln(self) -> Self {
        Dual::new(self.re.ln(), self.eps / self.re)
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        Dual::new(s, self.eps / (s * 2.0))
    }
    fn asin(self) -> Self {
        let d = (T::cst(1.0) - self.re * self.re).sqrt();
        Dual::new(self.re.asin(), self.eps / d)
    }
    fn atan(self) -> Self {
        Dual::new(self.re.atan(), self.eps / (self.re * self.re + 1.0))
    }
    fn asinh(self) -> Self {
        let d = (self.re * self.re + 1.0).sqrt();
        Dual::new(self.re.asinh(), self.eps / d)
    }
    fn acosh(self) -> Self {
        let d = (self.re * self.re - 1.0).sqrt();
        Dual::new(self.re.acosh(), self.eps / d)
    }
    fn atanh(self) -> Self {
        Dual::new(self.re.atanh(), self.eps / (T::cst(1.0) - self.re * self.re))
    }
    fn atan2(self, x: Self) -> Self {
        let r2 = x.re * x.re + self.re * self.re;
        Dual::new(
            self.re.atan2(x.re),
            (x.re * self.eps - self.re * x.eps) / r2,
        )
    }
    fn chain(self, derivs: &[f64]) -> Self {
        Dual::new(self.re.chain(derivs), self.eps * self.re.chain(&derivs[1..]))
    }
}

/// Second-order forward jet: exact first and second derivatives.
pub type HyperDual = Dual<Dual<f64>>;

/// Reads `(f, ∂₁f, ∂₂f, ∂₁∂₂f)` from a hyper-dual result.
pub fn hyper_parts(x: HyperDual) -> [f64; 4] {
    [x.re.re, x.eps.re, x.re.eps, x.eps.eps]
}

/// Hyper-dual seed `x0 + a·ε₁ + b·ε₂`.
pub fn hyper_seed(x0: f64, a: f64, b: f64) -> HyperDual {
    Dual::new(Dual::new(x0, b), Dual::new(a, 0.0))
}

/// Inverts a monotone scalar map `f` (with derivative `df`) at a possibly
/// dual target.
///
/// Newton runs in `f64` first; two further Newton steps carried out in `S`
/// lift the root to second order in every infinitesimal direction.
pub fn invert_monotone<S, F, D>(f: F, df: D, target: S, guess: f64) -> S
where
    S: Real,
    F: Fn(S) -> S,
    D: Fn(S) -> S,
{
    let t = target.value();
    let mut x = guess;
    for _ in 0..200 {
        let step = (f(S::cst(x)).value() - t) / df(S::cst(x)).value();
        x -= step;
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    let mut xs = S::cst(x);
    for _ in 0..2 {
        xs = xs - (f(xs) - target) / df(xs);
    }
    xs
}
