//! Immersed surfaces, their fundamental forms and the vertical decomposition.
//!
//! A surface is any [`Parametrization`]: a map written once against
//! [`Real`] so that it can be evaluated on plain floats or on hyper-dual
//! numbers. [`Immersion`] erases the concrete type and adds the derivative
//! supply, the rank tolerance and the geometry routines.
//!
//! Conventions: `∂z = ½(∂u − i∂v)`, `I = 2λ|dz|²` so `λ = E/2`, the unit
//! normal makes `(φ_u, φ_v, N)` positive, and `II(X, Y) = ⟨∇̄_X Y, N⟩`.

mod grid;

pub use grid::{Lattice, Linear, StencilOrder, StructureReport, SurfaceGrid};

use std::sync::Arc;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;

use crate::ambient::{AmbientChart, ChartKind, SpaceParams, Vec4};
use crate::error::{GeomError, Result};
use crate::real::{hyper_parts, hyper_seed, HyperDual, Real};

/// Default bound on `|φ_u ∧ φ_v|` below which a point is degenerate.
pub const RANK_TOL: f64 = 1e-8;
/// Threshold on both isothermality ratios.
pub const ISO_TOL: f64 = 1e-8;
/// Mean curvature counts as constant when max − min stays below this.
pub const H_CONST_TOL: f64 = 1e-6;

/// A map from the parameter plane into an ambient chart.
pub trait Parametrization: Send + Sync + 'static {
    fn chart(&self) -> AmbientChart;
    fn eval<S: Real>(&self, u: S, v: S) -> [S; 4];
    fn name(&self) -> String {
        "surface".into()
    }
}

/// Object-safe face of [`Parametrization`].
pub trait ErasedParam: Send + Sync {
    fn chart(&self) -> AmbientChart;
    fn eval_f(&self, u: f64, v: f64) -> Vec4;
    fn eval_h(&self, u: HyperDual, v: HyperDual) -> [HyperDual; 4];
    fn name(&self) -> String;
}

impl<P: Parametrization> ErasedParam for P {
    fn chart(&self) -> AmbientChart {
        Parametrization::chart(self)
    }
    fn eval_f(&self, u: f64, v: f64) -> Vec4 {
        let p = self.eval(u, v);
        Vec4::new(p[0], p[1], p[2], p[3])
    }
    fn eval_h(&self, u: HyperDual, v: HyperDual) -> [HyperDual; 4] {
        self.eval(u, v)
    }
    fn name(&self) -> String {
        Parametrization::name(self)
    }
}

/// How first and second parameter derivatives are obtained.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum DerivativeMode {
    /// Hyper-dual evaluation: exact to rounding.
    HyperDual,
    /// Exact first derivatives, second derivatives by central differences
    /// of the first ones.
    DualFd { step: f64 },
    /// Everything by central differences with the given step.
    CentralDifference { step: f64 },
}

impl Default for DerivativeMode {
    fn default() -> Self {
        DerivativeMode::HyperDual
    }
}

/// Position and first/second partial derivatives at a parameter point.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub p: Vec4,
    pub pu: Vec4,
    pub pv: Vec4,
    pub puu: Vec4,
    pub puv: Vec4,
    pub pvv: Vec4,
}

#[derive(Clone)]
pub struct Immersion {
    param: Arc<dyn ErasedParam>,
    pub mode: DerivativeMode,
    pub rank_tol: f64,
}

impl std::fmt::Debug for Immersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Immersion")
            .field("name", &self.param.name())
            .field("chart", &self.param.chart())
            .field("mode", &self.mode)
            .finish()
    }
}

fn vec_of(parts: [f64; 4]) -> Vec4 {
    Vec4::new(parts[0], parts[1], parts[2], parts[3])
}

impl Immersion {
    pub fn new<P: Parametrization>(p: P) -> Self {
        Self::from_erased(Arc::new(p))
    }

    pub fn from_erased(param: Arc<dyn ErasedParam>) -> Self {
        Immersion { param, mode: DerivativeMode::HyperDual, rank_tol: RANK_TOL }
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn chart(&self) -> AmbientChart {
        self.param.chart()
    }

    pub fn params(&self) -> SpaceParams {
        self.param.chart().params
    }

    pub fn name(&self) -> String {
        self.param.name()
    }

    pub fn erased(&self) -> &Arc<dyn ErasedParam> {
        &self.param
    }

    pub fn eval_h(&self, u: HyperDual, v: HyperDual) -> [HyperDual; 4] {
        self.param.eval_h(u, v)
    }

    pub fn point(&self, u: f64, v: f64) -> Result<Vec4> {
        let p = self.param.eval_f(u, v);
        self.chart().check(&p)?;
        Ok(p)
    }

    pub fn jet(&self, u: f64, v: f64) -> Result<Jet> {
        let jet = match self.mode {
            DerivativeMode::HyperDual => self.jet_exact(u, v),
            DerivativeMode::DualFd { step } => {
                let base = self.jet_exact(u, v);
                let a = self.first_exact(u + step, v);
                let b = self.first_exact(u - step, v);
                let c = self.first_exact(u, v + step);
                let d = self.first_exact(u, v - step);
                Jet {
                    puu: (a.0 - b.0) / (2.0 * step),
                    puv: ((a.1 - b.1) + (c.0 - d.0)) / (4.0 * step),
                    pvv: (c.1 - d.1) / (2.0 * step),
                    ..base
                }
            }
            DerivativeMode::CentralDifference { step } => {
                let f = |a: f64, b: f64| self.param.eval_f(u + a, v + b);
                let h = step;
                let p = f(0.0, 0.0);
                let (up, um, vp, vm) = (f(h, 0.0), f(-h, 0.0), f(0.0, h), f(0.0, -h));
                Jet {
                    p,
                    pu: (up - um) / (2.0 * h),
                    pv: (vp - vm) / (2.0 * h),
                    puu: (up - 2.0 * p + um) / (h * h),
                    pvv: (vp - 2.0 * p + vm) / (h * h),
                    puv: (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h),
                }
            }
        };
        self.chart().check(&jet.p)?;
        Ok(jet)
    }

    fn first_exact(&self, u: f64, v: f64) -> (Vec4, Vec4) {
        let r = self.param.eval_h(hyper_seed(u, 1.0, 0.0), hyper_seed(v, 0.0, 1.0));
        let mut pu = Vec4::zeros();
        let mut pv = Vec4::zeros();
        for k in 0..4 {
            let [_, a, b, _] = hyper_parts(r[k]);
            pu[k] = a;
            pv[k] = b;
        }
        (pu, pv)
    }

    fn jet_exact(&self, u: f64, v: f64) -> Jet {
        let cu = HyperDual::cst(u);
        let cv = HyperDual::cst(v);
        let ru = self.param.eval_h(hyper_seed(u, 1.0, 1.0), cv);
        let rv = self.param.eval_h(cu, hyper_seed(v, 1.0, 1.0));
        let rm = self.param.eval_h(hyper_seed(u, 1.0, 0.0), hyper_seed(v, 0.0, 1.0));
        let mut out = [[0.0; 4]; 6];
        for k in 0..4 {
            let a = hyper_parts(ru[k]);
            let b = hyper_parts(rv[k]);
            let m = hyper_parts(rm[k]);
            out[0][k] = a[0];
            out[1][k] = a[1];
            out[2][k] = b[1];
            out[3][k] = a[3];
            out[4][k] = m[3];
            out[5][k] = b[3];
        }
        Jet {
            p: vec_of(out[0]),
            pu: vec_of(out[1]),
            pv: vec_of(out[2]),
            puu: vec_of(out[3]),
            puv: vec_of(out[4]),
            pvv: vec_of(out[5]),
        }
    }

    /// Full pointwise geometry at `(u, v)`.
    pub fn geometry(&self, u: f64, v: f64) -> Result<PointGeometry> {
        let jet = self.jet(u, v)?;
        PointGeometry::from_jet(&self.chart(), u, v, &jet, self.rank_tol)
    }

    /// Precomposition with the complex-affine map `z ↦ a z + b`
    /// (orientation-preserving and conformal for `a ≠ 0`).
    pub fn reparametrized(&self, a: Complex64, b: Complex64) -> Immersion {
        self.precomposed([[a.re, -a.im], [a.im, a.re]], [b.re, b.im])
    }

    /// Precomposition with `(u, v) ↦ M (u, v) + c`.
    pub fn precomposed(&self, m: [[f64; 2]; 2], c: [f64; 2]) -> Immersion {
        Immersion {
            param: Arc::new(Affine { inner: self.param.clone(), m, c }),
            mode: self.mode,
            rank_tol: self.rank_tol,
        }
    }

    /// Max isothermality ratios over a sample set.
    pub fn isothermal_check(&self, samples: &[(f64, f64)]) -> Result<IsothermalReport> {
        let mut rep = IsothermalReport { max_eg: 0.0, max_f: 0.0, isothermal: true, samples: 0 };
        for &(u, v) in samples {
            let j = self.jet(u, v)?;
            let c = self.chart();
            let e = c.inner(&j.p, &j.pu, &j.pu);
            let f = c.inner(&j.p, &j.pu, &j.pv);
            let g = c.inner(&j.p, &j.pv, &j.pv);
            rep.max_eg = rep.max_eg.max((e - g).abs() / (e + g));
            rep.max_f = rep.max_f.max(f.abs() / (e + g));
            rep.samples += 1;
        }
        rep.isothermal = rep.max_eg <= ISO_TOL && rep.max_f <= ISO_TOL;
        Ok(rep)
    }

    /// Intrinsic Gauss curvature from the conformal factor,
    /// `K = −Δ(ln E) / (2E)`, with five-point stencils of spacing `step`.
    pub fn gauss_curvature(&self, u: f64, v: f64, step: f64) -> Result<f64> {
        let g0 = self.geometry(u, v)?;
        g0.require_isothermal()?;
        let le = |a: f64, b: f64| -> Result<f64> {
            let j = self.jet(a, b)?;
            Ok(self.chart().inner(&j.p, &j.pu, &j.pu).ln())
        };
        let c = le(u, v)?;
        let w = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        let mut lap = 0.0;
        for (k, wk) in w.iter().enumerate() {
            let off = (k as f64 - 2.0) * step;
            let (eu, ev) = if k == 2 { (c, c) } else { (le(u + off, v)?, le(u, v + off)?) };
            lap += wk * (eu + ev);
        }
        lap /= step * step;
        Ok(-lap / (2.0 * g0.first[(0, 0)]))
    }

    /// `|K_int − (K_e + τ² + (κ − 4τ²)ν²)|`.
    pub fn gauss_equation_residual(&self, u: f64, v: f64, step: f64) -> Result<f64> {
        let g = self.geometry(u, v)?;
        let k = self.gauss_curvature(u, v, step)?;
        Ok((k - g.gauss_extrinsic_side()).abs())
    }
}

struct Affine {
    inner: Arc<dyn ErasedParam>,
    m: [[f64; 2]; 2],
    c: [f64; 2],
}

impl ErasedParam for Affine {
    fn chart(&self) -> AmbientChart {
        self.inner.chart()
    }
    fn eval_f(&self, u: f64, v: f64) -> Vec4 {
        let m = &self.m;
        self.inner.eval_f(m[0][0] * u + m[0][1] * v + self.c[0], m[1][0] * u + m[1][1] * v + self.c[1])
    }
    fn eval_h(&self, u: HyperDual, v: HyperDual) -> [HyperDual; 4] {
        let m = &self.m;
        self.inner.eval_h(
            u * m[0][0] + v * m[0][1] + self.c[0],
            u * m[1][0] + v * m[1][1] + self.c[1],
        )
    }
    fn name(&self) -> String {
        format!("{} (reparametrized)", self.inner.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct IsothermalReport {
    /// max |E − G| / (E + G)
    pub max_eg: f64,
    /// max |F| / (E + G)
    pub max_f: f64,
    pub isothermal: bool,
    pub samples: usize,
}

/// Geometry attached to a point of an oriented surface.
#[derive(Clone, Debug)]
pub struct PointGeometry {
    pub u: f64,
    pub v: f64,
    pub params: SpaceParams,
    pub chart: ChartKind,
    pub p: Vec4,
    pub pu: Vec4,
    pub pv: Vec4,
    /// First fundamental form in the `(∂u, ∂v)` basis.
    pub first: Matrix2<f64>,
    /// Second fundamental form in the `(∂u, ∂v)` basis.
    pub second: Matrix2<f64>,
    pub normal: Vec4,
    pub mean: f64,
    pub extrinsic: f64,
    pub nu: f64,
    /// `T = ξ − νN` in ambient components.
    pub t_ambient: Vec4,
    /// `T` in the `(∂u, ∂v)` basis.
    pub t_coords: Vector2<f64>,
    /// Area element `√det I`.
    pub area: f64,
    /// `max(|E − G|, |F|) / (E + G)`.
    pub iso_residual: f64,
}

impl PointGeometry {
    pub fn from_jet(chart: &AmbientChart, u: f64, v: f64, j: &Jet, rank_tol: f64) -> Result<Self> {
        let p = j.p;
        let ip = |a: &Vec4, b: &Vec4| chart.inner(&p, a, b);
        let (e, f, g) = (ip(&j.pu, &j.pu), ip(&j.pu, &j.pv), ip(&j.pv, &j.pv));
        let cross = chart.cross_raw(&p, &j.pu, &j.pv);
        let norm = chart.norm(&p, &cross);
        if !(norm >= rank_tol) {
            return Err(GeomError::Rank { u, v, norm });
        }
        let normal = cross / norm;
        let second_of = |xy: &Vec4, x: &Vec4, y: &Vec4| ip(&(xy + chart.connection_term(&p, x, y)), &normal);
        let l = second_of(&j.puu, &j.pu, &j.pu);
        let m = second_of(&j.puv, &j.pu, &j.pv);
        let n = second_of(&j.pvv, &j.pv, &j.pv);
        let first = Matrix2::new(e, f, f, g);
        let second = Matrix2::new(l, m, m, n);
        let det = e * g - f * f;
        let shape = first.try_inverse().ok_or(GeomError::Rank { u, v, norm })? * second;
        let xi = chart.vertical_raw();
        let nu = ip(&normal, &xi);
        let t_ambient = xi - normal * nu;
        let rhs = Vector2::new(ip(&xi, &j.pu), ip(&xi, &j.pv));
        let t_coords = first.try_inverse().unwrap() * rhs;
        Ok(PointGeometry {
            u,
            v,
            params: chart.params,
            chart: chart.kind,
            p,
            pu: j.pu,
            pv: j.pv,
            first,
            second,
            normal,
            mean: 0.5 * shape.trace(),
            extrinsic: shape.determinant(),
            nu,
            t_ambient,
            t_coords,
            area: det.sqrt(),
            iso_residual: (e - g).abs().max(f.abs()) / (e + g),
        })
    }

    pub fn is_isothermal(&self) -> bool {
        self.iso_residual <= ISO_TOL
    }

    pub fn require_isothermal(&self) -> Result<()> {
        if self.is_isothermal() {
            Ok(())
        } else {
            Err(GeomError::NotIsothermal { u: self.u, v: self.v, residual: self.iso_residual })
        }
    }

    /// Shape operator `A = I⁻¹ II`.
    pub fn shape(&self) -> Matrix2<f64> {
        self.first.try_inverse().unwrap() * self.second
    }

    /// Rotation `JX = N ∧ X` in the `(∂u, ∂v)` basis: `J = I⁻¹ Ω`.
    pub fn rotation(&self) -> Matrix2<f64> {
        let w = self.area;
        self.first.try_inverse().unwrap() * Matrix2::new(0.0, -w, w, 0.0)
    }

    pub fn inner2(&self, x: &Vector2<f64>, y: &Vector2<f64>) -> f64 {
        (x.transpose() * self.first * y)[0]
    }

    pub fn to_ambient(&self, x: &Vector2<f64>) -> Vec4 {
        self.pu * x[0] + self.pv * x[1]
    }

    /// `|T|²`.
    pub fn t_norm2(&self) -> f64 {
        self.inner2(&self.t_coords, &self.t_coords)
    }

    /// Conformal factor `λ = E/2`; only for isothermal points.
    pub fn lambda(&self) -> Result<f64> {
        self.require_isothermal()?;
        Ok(0.5 * self.first[(0, 0)])
    }

    /// Hopf function `Q = ¼(II_uu − II_vv) − (i/2) II_uv`.
    pub fn hopf(&self) -> Result<Complex64> {
        self.require_isothermal()?;
        Ok(hopf_of(&self.second))
    }

    /// `t = ⟨T, ∂z⟩ = ½(⟨T, ∂u⟩ − i⟨T, ∂v⟩)`.
    pub fn t(&self) -> Result<Complex64> {
        self.require_isothermal()?;
        Ok(self.t_unchecked())
    }

    pub(crate) fn t_unchecked(&self) -> Complex64 {
        let c = self.first * self.t_coords;
        Complex64::new(0.5 * c[0], -0.5 * c[1])
    }

    /// `K_e + τ² + (κ − 4τ²)ν²`.
    pub fn gauss_extrinsic_side(&self) -> f64 {
        let SpaceParams { kappa, tau } = self.params;
        self.extrinsic + tau * tau + (kappa - 4.0 * tau * tau) * self.nu * self.nu
    }
}

/// The (2,0)-part of a symmetric form in conformal coordinates.
pub fn hopf_of(form: &Matrix2<f64>) -> Complex64 {
    Complex64::new(0.25 * (form[(0, 0)] - form[(1, 1)]), -0.5 * form[(0, 1)])
}

/// Rectangular lattice of sample points with `n` nodes per axis.
pub fn lattice(u: (f64, f64), v: (f64, f64), n: usize) -> Vec<(f64, f64)> {
    let step = |a: f64, b: f64, k: usize| if n > 1 { a + (b - a) * k as f64 / (n - 1) as f64 } else { a };
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push((step(u.0, u.1, i), step(v.0, v.1, j)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::AmbientChart;

    struct Plane;
    impl Parametrization for Plane {
        fn chart(&self) -> AmbientChart {
            AmbientChart::hyperboloid()
        }
        fn eval<S: Real>(&self, x: S, y: S) -> [S; 4] {
            [x.cosh(), S::cst(0.0), x.sinh(), y]
        }
    }

    struct Flat;
    impl Parametrization for Flat {
        fn chart(&self) -> AmbientChart {
            AmbientChart::cartan(SpaceParams::euclidean())
        }
        fn eval<S: Real>(&self, u: S, v: S) -> [S; 4] {
            [u, v, u * u * 0.5 + v * v * 0.25, S::cst(0.0)]
        }
    }

    #[test]
    fn exact_jet_of_paraboloid() {
        let imm = Immersion::new(Flat);
        let j = imm.jet(0.3, -0.2).unwrap();
        assert_eq!(j.pu, Vec4::new(1.0, 0.0, 0.3, 0.0));
        assert_eq!(j.pv, Vec4::new(0.0, 1.0, -0.1, 0.0));
        assert_eq!(j.puu[2], 1.0);
        assert_eq!(j.pvv[2], 0.5);
        assert_eq!(j.puv[2], 0.0);
    }

    #[test]
    fn derivative_modes_agree() {
        let a = Immersion::new(Plane).jet(0.4, 0.1).unwrap();
        for mode in [DerivativeMode::DualFd { step: 1e-5 }, DerivativeMode::CentralDifference { step: 1e-4 }] {
            let b = Immersion::new(Plane).with_mode(mode).jet(0.4, 0.1).unwrap();
            assert!((a.pu - b.pu).norm() < 1e-7);
            assert!((a.puu - b.puu).norm() < 1e-5);
        }
    }

    #[test]
    fn paraboloid_at_vertex_has_principal_curvatures_one_and_half() {
        let g = Immersion::new(Flat).geometry(0.0, 0.0).unwrap();
        assert!((g.mean - 0.75).abs() < 1e-14);
        assert!((g.extrinsic - 0.5).abs() < 1e-14);
        assert!((g.nu - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vertical_plane_in_hyperboloid() {
        let g = Immersion::new(Plane).geometry(0.7, -1.2).unwrap();
        assert!((g.normal - Vec4::new(0.0, 1.0, 0.0, 0.0)).norm() < 1e-14);
        assert!(g.nu.abs() < 1e-15);
        assert!(g.mean.abs() < 1e-14);
        let t = g.t().unwrap();
        assert!((t - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((g.lambda().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rotation_sends_u_to_v_in_conformal_coordinates() {
        let g = Immersion::new(Plane).geometry(0.2, 0.0).unwrap();
        let j = g.rotation();
        assert!((j * Vector2::new(1.0, 0.0) - Vector2::new(0.0, 1.0)).norm() < 1e-14);
        assert!((j * j + Matrix2::identity()).norm() < 1e-14);
    }

    #[test]
    fn skewed_plane_is_not_isothermal() {
        let imm = Immersion::new(Plane).precomposed([[1.0, 0.5], [0.0, 1.0]], [0.0, 0.0]);
        let rep = imm.isothermal_check(&lattice((-0.5, 0.5), (-0.5, 0.5), 4)).unwrap();
        assert!(!rep.isothermal);
        assert!(imm.geometry(0.1, 0.1).unwrap().hopf().is_err());
    }

    #[test]
    fn degenerate_point_is_reported() {
        let imm = Immersion::new(Plane).precomposed([[1.0, 1.0], [0.0, 0.0]], [0.0, 0.0]);
        assert!(matches!(imm.geometry(0.0, 0.0), Err(GeomError::Rank { .. })));
    }
}
