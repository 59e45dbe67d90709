//! The geodesic plane and the H = 1/√2 rotational sphere of H²×ℝ, and the
//! curve along which they meet orthogonally.

use crate::ambient::{AmbientChart, Vec4};
use crate::real::Real;
use crate::surface::Parametrization;

pub use super::closed::VerticalPlaneH2xR as ExamplePlane;

/// Keeps parameters away from the poles `u = ±1`.
pub const POLE_MARGIN: f64 = 0.05;

/// `r(u) = 2 asinh √(1 − u²)`.
pub fn radius<S: Real>(u: S) -> S {
    (-(u * u) + 1.0).sqrt().asinh() * 2.0
}

/// `h(u) = 2√2 asin(u/√2)`.
pub fn height<S: Real>(u: S) -> S {
    let k = std::f64::consts::SQRT_2;
    (u / k).asin() * (2.0 * k)
}

/// The sphere in closed form: `(cosh r, sinh r cos v, sinh r sin v, h)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExampleSphere;

impl Parametrization for ExampleSphere {
    fn chart(&self) -> AmbientChart {
        AmbientChart::hyperboloid()
    }

    fn eval<S: Real>(&self, u: S, v: S) -> [S; 4] {
        let r = radius(u);
        [r.cosh(), r.sinh() * v.cos(), r.sinh() * v.sin(), height(u)]
    }

    fn name(&self) -> String {
        "rotational sphere H=1/sqrt2 in H2xR".into()
    }
}

/// `u(w) = √2 sinh w / √(cosh 2w)`; the sphere is conformal in `(w, v)`.
pub fn conformal_u<S: Real>(w: S) -> S {
    w.sinh() * std::f64::consts::SQRT_2 / (w * 2.0).cosh().sqrt()
}

/// Inverse of [`conformal_u`].
pub fn conformal_w(u: f64) -> f64 {
    (u / (2.0 - u * u).sqrt()).atanh()
}

/// [`ExampleSphere`] in the conformal parameter `w`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConformalExampleSphere;

impl Parametrization for ConformalExampleSphere {
    fn chart(&self) -> AmbientChart {
        AmbientChart::hyperboloid()
    }

    fn eval<S: Real>(&self, w: S, v: S) -> [S; 4] {
        ExampleSphere.eval(conformal_u(w), v)
    }

    fn name(&self) -> String {
        "rotational sphere H=1/sqrt2 in H2xR (conformal)".into()
    }
}

/// Which of the two intersection curves (`t = π/2` or `t = 3π/2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    pub fn t(self) -> f64 {
        match self {
            Branch::Upper => std::f64::consts::FRAC_PI_2,
            Branch::Lower => 3.0 * std::f64::consts::FRAC_PI_2,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Branch::Upper => 1.0,
            Branch::Lower => -1.0,
        }
    }
}

/// `γ(s) = (cosh r(s), 0, sinh r(s) sin t, h(s))`.
pub fn gamma(s: f64, branch: Branch) -> Vec4 {
    let r = radius(s);
    Vec4::new(r.cosh(), 0.0, r.sinh() * branch.t().sin(), height(s))
}

/// γ in the plane's coordinates `(x, y)`.
pub fn gamma_on_plane<S: Real>(s: S, branch: Branch) -> [S; 2] {
    [radius(s) * branch.sign(), height(s)]
}

/// γ in the closed-form sphere coordinates `(u, v)`.
pub fn gamma_on_sphere<S: Real>(s: S, branch: Branch) -> [S; 2] {
    [s, S::cst(branch.t())]
}

/// The whole intersection curve in plane coordinates as one closed regular
/// loop: `α ↦ (2 asinh(sin α), −2√2 asin(cos α/√2))`, `α ∈ [0, 2π]`. The
/// upper branch is `α ∈ (0, π)`.
pub fn gamma_loop_on_plane<S: Real>(a: S) -> [S; 2] {
    let k = std::f64::consts::SQRT_2;
    [a.sin().asinh() * 2.0, (a.cos() / k).asin() * (-2.0 * k)]
}

/// The unnormalized closed-form normal,
/// `(h′ sinh r, h′ cos v cosh r, h′ cosh r sin v, −r′)`.
pub fn closed_form_normal(u: f64, v: f64) -> Vec4 {
    use crate::real::Dual;
    let r = radius(Dual::var(u));
    let h = height(Dual::var(u));
    let (r, rp, hp) = (r.re, r.eps, h.eps);
    Vec4::new(hp * r.sinh(), hp * v.cos() * r.cosh(), hp * r.cosh() * v.sin(), -rp)
}

/// Whether the plane point `(x, y)` lies inside the region cut out by
/// the sphere, i.e. between the two branches of γ.
pub fn plane_point_inside(x: f64, y: f64) -> bool {
    let k = std::f64::consts::SQRT_2;
    if y.abs() >= k * std::f64::consts::PI / 2.0 {
        return false;
    }
    let u = k * (y * k / 4.0).sin();
    x.abs() < radius(u)
}
