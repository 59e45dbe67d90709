//! Closed-form surfaces in conformal coordinates.

use crate::ambient::{AmbientChart, ChartKind, SpaceParams};
use crate::error::{GeomError, Result};
use crate::real::Real;
use crate::surface::Parametrization;

/// Horizontal slice `z = height` in the Cartan chart.
#[derive(Clone, Copy, Debug)]
pub struct Slice {
    pub params: SpaceParams,
    pub height: f64,
}

impl Slice {
    pub fn new(params: SpaceParams, height: f64) -> Result<Self> {
        if params.tau != 0.0 {
            return Err(GeomError::Unsupported(format!("slices need tau = 0 (got tau = {})", params.tau)));
        }
        Ok(Slice { params, height })
    }
}

impl Parametrization for Slice {
    fn chart(&self) -> AmbientChart {
        AmbientChart::cartan(self.params)
    }

    fn eval<S: Real>(&self, u: S, v: S) -> [S; 4] {
        [u, v, S::cst(self.height), S::cst(0.0)]
    }

    fn name(&self) -> String {
        format!("slice z={} (kappa={})", self.height, self.params.kappa)
    }
}

/// `(x, y) ↦ (cosh x, 0, sinh x, y)` in the hyperboloid model of H²×ℝ.
#[derive(Clone, Copy, Debug, Default)]
pub struct VerticalPlaneH2xR;

impl Parametrization for VerticalPlaneH2xR {
    fn chart(&self) -> AmbientChart {
        AmbientChart::hyperboloid()
    }

    fn eval<S: Real>(&self, x: S, y: S) -> [S; 4] {
        [x.cosh(), S::cst(0.0), x.sinh(), y]
    }

    fn name(&self) -> String {
        "vertical geodesic plane in H2xR".into()
    }
}

/// Vertical plane through the fiber over the origin of Nil₃, containing
/// the horizontal direction at angle `beta`.
#[derive(Clone, Copy, Debug)]
pub struct VerticalPlaneNil3 {
    pub tau: f64,
    pub beta: f64,
}

impl Default for VerticalPlaneNil3 {
    fn default() -> Self {
        VerticalPlaneNil3 { tau: 0.5, beta: 0.0 }
    }
}

impl Parametrization for VerticalPlaneNil3 {
    fn chart(&self) -> AmbientChart {
        AmbientChart::cartan(SpaceParams { kappa: 0.0, tau: self.tau })
    }

    fn eval<S: Real>(&self, s: S, z: S) -> [S; 4] {
        let (sb, cb) = self.beta.sin_cos();
        [s * cb, s * sb, z, S::cst(0.0)]
    }

    fn name(&self) -> String {
        format!("vertical plane in Nil3 (beta={})", self.beta)
    }
}

/// Unit-speed curve of constant geodesic curvature `kg` in the hyperboloid,
/// oriented so that the cylinder over it has `H = kg/2`.
pub fn constant_curvature_curve<S: Real>(kg: f64, s: S) -> [S; 3] {
    if kg > 1.0 {
        let r = (1.0 / kg).atanh();
        let (a, c) = (r.sinh(), r.cosh());
        let t = s / a;
        [S::cst(c), t.cos() * a, -(t.sin() * a)]
    } else if kg == 1.0 {
        [s * s * 0.5 + 1.0, -s, s * s * 0.5]
    } else {
        let d = kg.atanh();
        let (sd, cd) = (d.sinh(), d.cosh());
        let t = s / cd;
        [t.cosh() * cd, t.sinh() * cd, S::cst(sd)]
    }
}

/// Vertical cylinder over a curve of constant geodesic curvature in H².
#[derive(Clone, Copy, Debug)]
pub struct VerticalCylinderH2xR {
    pub kg: f64,
    /// Rapidity of a boost in the `(x0, x1)` plane applied to the curve.
    pub boost: f64,
    pub chart: ChartKind,
}

impl VerticalCylinderH2xR {
    pub fn new(kg: f64) -> Result<Self> {
        if !(kg >= 0.0 && kg.is_finite()) {
            return Err(GeomError::Params(format!("geodesic curvature must be >= 0, got {kg}")));
        }
        Ok(VerticalCylinderH2xR { kg, boost: 0.0, chart: ChartKind::HyperboloidProduct })
    }

    /// Same cylinder moved off-center and written in the Cartan chart.
    pub fn in_cartan(mut self, boost: f64) -> Self {
        self.boost = boost;
        self.chart = ChartKind::CartanEktau;
        self
    }

    fn hyperboloid_point<S: Real>(&self, s: S) -> [S; 3] {
        let c = constant_curvature_curve(self.kg, s);
        let (sb, cb) = (self.boost.sinh(), self.boost.cosh());
        [c[0] * cb + c[1] * sb, c[0] * sb + c[1] * cb, c[2]]
    }
}

impl Parametrization for VerticalCylinderH2xR {
    fn chart(&self) -> AmbientChart {
        match self.chart {
            ChartKind::CartanEktau => AmbientChart::cartan(SpaceParams::h2xr()),
            _ => AmbientChart::hyperboloid(),
        }
    }

    fn eval<S: Real>(&self, s: S, z: S) -> [S; 4] {
        let p = self.hyperboloid_point(s);
        match self.chart {
            ChartKind::CartanEktau => {
                let d = (p[0] + 1.0).recip() * 2.0;
                [p[1] * d, p[2] * d, z, S::cst(0.0)]
            }
            _ => [p[0], p[1], p[2], z],
        }
    }

    fn name(&self) -> String {
        format!("vertical cylinder kg={} in H2xR", self.kg)
    }
}

/// Vertical cylinder of radius `R` around the fiber through the origin of
/// Nil₃, in the conformal coordinates `(s, ζ)`.
#[derive(Clone, Copy, Debug)]
pub struct NilCylinder {
    pub tau: f64,
    pub radius: f64,
}

impl Parametrization for NilCylinder {
    fn chart(&self) -> AmbientChart {
        AmbientChart::cartan(SpaceParams { kappa: 0.0, tau: self.tau })
    }

    fn eval<S: Real>(&self, s: S, zeta: S) -> [S; 4] {
        let r = self.radius;
        let t = s / r;
        [t.cos() * r, -(t.sin() * r), zeta - s * (self.tau * r), S::cst(0.0)]
    }

    fn name(&self) -> String {
        format!("vertical cylinder R={} in Nil3", self.radius)
    }
}

/// The minimal umbrella `z = 0` of Nil₃ in conformal polar coordinates
/// `(w, θ)`, `w < 0`.
#[derive(Clone, Copy, Debug)]
pub struct NilUmbrella {
    pub tau: f64,
}

impl Parametrization for NilUmbrella {
    fn chart(&self) -> AmbientChart {
        AmbientChart::cartan(SpaceParams { kappa: 0.0, tau: self.tau })
    }

    fn eval<S: Real>(&self, w: S, th: S) -> [S; 4] {
        let r = ((-w).sinh() * self.tau).recip();
        [th.cos() * r, th.sin() * r, S::cst(0.0), S::cst(0.0)]
    }

    fn name(&self) -> String {
        "horizontal umbrella in Nil3".into()
    }
}

/// Torus of revolution in ℝ³ in isothermal coordinates; not CMC.
#[derive(Clone, Copy, Debug)]
pub struct EuclideanTorus {
    pub big: f64,
    pub small: f64,
}

impl Parametrization for EuclideanTorus {
    fn chart(&self) -> AmbientChart {
        AmbientChart::cartan(SpaceParams::euclidean())
    }

    /// `u` runs along the meridian (period `2π r/√(R²−r²)`), `v` is the
    /// rotation angle.
    fn eval<S: Real>(&self, u: S, v: S) -> [S; 4] {
        let (big, r) = (self.big, self.small);
        let c = (big * big - r * r).sqrt();
        let k = ((big + r) / (big - r)).sqrt();
        let a = u * (c / (2.0 * r));
        let th = (a.sin() * k).atan2(a.cos()) * 2.0;
        let rad = th.cos() * r + big;
        [rad * v.cos(), rad * v.sin(), th.sin() * r, S::cst(0.0)]
    }

    fn name(&self) -> String {
        format!("torus R={} r={}", self.big, self.small)
    }
}
