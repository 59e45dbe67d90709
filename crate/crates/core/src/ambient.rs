//! Coordinate models of the homogeneous spaces E(κ, τ).
//!
//! Three charts are provided:
//!
//! * [`ChartKind::CartanEktau`]: `(x, y, z)` with
//!   `ds² = λ²(dx² + dy²) + (τλ(y dx − x dy) + dz)²`, `λ = 1/(1 + κ(x²+y²)/4)`.
//!   Covers every `(κ, τ)`; for `κ > 0` it misses one fiber.
//! * [`ChartKind::PolarProduct`]: `(ρ, φ, z)` on `M²(κ) × ℝ` with
//!   `ds² = dρ² + sn_κ(ρ)² dφ² + dz²`.
//! * [`ChartKind::HyperboloidProduct`]: `H² × ℝ` as the set
//!   `−x₀² + x₁² + x₂² = −1, x₀ > 0` inside `ℝ⁴` with the form
//!   `diag(−1, 1, 1, 1)`.
//!
//! Points and vectors are stored as four components; the three-dimensional
//! charts leave the last slot at zero.

use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use crate::error::{GeomError, Result};
use crate::real::{Dual, Real};

pub type Vec4 = Vector4<f64>;

/// Tolerance on the hyperboloid constraint for points and tangent vectors.
pub const CONSTRAINT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationMode {
    /// κ ∈ {−1, 0, 1} and κ − 4τ² ≠ 0.
    Strict,
    /// Any real κ, still κ − 4τ² ≠ 0.
    Permissive,
}

/// The pair (κ, τ) selecting the homogeneous geometry.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpaceParams {
    pub kappa: f64,
    pub tau: f64,
}

impl SpaceParams {
    pub fn new(kappa: f64, tau: f64) -> Result<Self> {
        Self::with_mode(kappa, tau, ValidationMode::Strict)
    }

    pub fn with_mode(kappa: f64, tau: f64, mode: ValidationMode) -> Result<Self> {
        if !kappa.is_finite() || !tau.is_finite() {
            return Err(GeomError::Params(format!("non-finite kappa={kappa}, tau={tau}")));
        }
        if (kappa - 4.0 * tau * tau).abs() < 1e-14 {
            return Err(GeomError::Params(format!(
                "kappa - 4 tau^2 must be nonzero (kappa={kappa}, tau={tau})"
            )));
        }
        if mode == ValidationMode::Strict && ![-1.0, 0.0, 1.0].contains(&kappa) {
            return Err(GeomError::Params(format!(
                "kappa must be -1, 0 or 1 in strict mode (got {kappa})"
            )));
        }
        Ok(SpaceParams { kappa, tau })
    }

    /// Flat ℝ³ (κ = τ = 0). Excluded from E(κ, τ) proper; only useful to
    /// exercise charts and Euclidean Codazzi pairs.
    pub fn euclidean() -> Self {
        SpaceParams { kappa: 0.0, tau: 0.0 }
    }

    pub fn h2xr() -> Self {
        SpaceParams { kappa: -1.0, tau: 0.0 }
    }

    pub fn s2xr() -> Self {
        SpaceParams { kappa: 1.0, tau: 0.0 }
    }

    pub fn nil3() -> Self {
        SpaceParams { kappa: 0.0, tau: 0.5 }
    }

    /// κ − 4τ².
    pub fn bundle_defect(&self) -> f64 {
        self.kappa - 4.0 * self.tau * self.tau
    }

    pub fn is_product(&self) -> bool {
        self.tau == 0.0
    }

    /// Warping function `sn_κ` of `M²(κ)` in geodesic polar coordinates.
    pub fn sn<S: Real>(&self, r: S) -> S {
        let k = self.kappa;
        if k > 0.0 {
            let s = k.sqrt();
            (r * s).sin() / s
        } else if k < 0.0 {
            let s = (-k).sqrt();
            (r * s).sinh() / s
        } else {
            r
        }
    }

    /// `sn_κ'`.
    pub fn cn<S: Real>(&self, r: S) -> S {
        let k = self.kappa;
        if k > 0.0 {
            (r * k.sqrt()).cos()
        } else if k < 0.0 {
            (r * (-k).sqrt()).cosh()
        } else {
            S::cst(1.0)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChartKind {
    #[serde(alias = "cartan")]
    CartanEktau,
    #[serde(alias = "polar")]
    PolarProduct,
    #[serde(alias = "hyperboloid")]
    HyperboloidProduct,
}

impl ChartKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChartKind::CartanEktau => "cartan",
            ChartKind::PolarProduct => "polar",
            ChartKind::HyperboloidProduct => "hyperboloid",
        }
    }
}

/// A tangent vector with its base point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVector {
    pub base: Vec4,
    pub components: Vec4,
}

impl TangentVector {
    pub fn new(base: Vec4, components: Vec4) -> Self {
        TangentVector { base, components }
    }
}

/// Christoffel symbols `gamma[k][i][j] = Γᵏᵢⱼ`.
pub type Christoffels = [[[f64; 4]; 4]; 4];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmbientChart {
    pub params: SpaceParams,
    pub kind: ChartKind,
}

impl AmbientChart {
    pub fn cartan(params: SpaceParams) -> Self {
        AmbientChart { params, kind: ChartKind::CartanEktau }
    }

    pub fn polar(params: SpaceParams) -> Result<Self> {
        if !params.is_product() {
            return Err(GeomError::Unsupported(
                "polar product chart requires tau = 0".into(),
            ));
        }
        Ok(AmbientChart { params, kind: ChartKind::PolarProduct })
    }

    pub fn hyperboloid() -> Self {
        AmbientChart { params: SpaceParams::h2xr(), kind: ChartKind::HyperboloidProduct }
    }

    pub fn new(params: SpaceParams, kind: ChartKind) -> Result<Self> {
        match kind {
            ChartKind::CartanEktau => Ok(Self::cartan(params)),
            ChartKind::PolarProduct => Self::polar(params),
            ChartKind::HyperboloidProduct => {
                if params.kappa != -1.0 || params.tau != 0.0 {
                    return Err(GeomError::Unsupported(
                        "hyperboloid chart models H^2 x R only (kappa=-1, tau=0)".into(),
                    ));
                }
                Ok(Self::hyperboloid())
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ChartKind::HyperboloidProduct => 4,
            _ => 3,
        }
    }

    pub fn contains(&self, p: &Vec4) -> bool {
        match self.kind {
            ChartKind::CartanEktau => {
                1.0 + self.params.kappa * (p[0] * p[0] + p[1] * p[1]) / 4.0 > 0.0
            }
            ChartKind::PolarProduct => {
                let k = self.params.kappa;
                p[0] > 0.0 && (k <= 0.0 || p[0] < std::f64::consts::PI / k.sqrt())
            }
            ChartKind::HyperboloidProduct => {
                let c = -p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + 1.0;
                p[0] > 0.0 && c.abs() <= 1e-8 * (1.0 + p[0] * p[0])
            }
        }
    }

    pub fn check(&self, p: &Vec4) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeomError::Domain { chart: self.kind.name(), point: [p[0], p[1], p[2], p[3]] })
        }
    }

    /// Metric coefficients at a (possibly dual) point. For the hyperboloid
    /// chart this is the constant ambient Lorentzian form.
    pub fn metric_generic<S: Real>(&self, p: &[S; 4]) -> [[S; 4]; 4] {
        let z = S::cst(0.0);
        let mut g = [[z; 4]; 4];
        match self.kind {
            ChartKind::CartanEktau => {
                let SpaceParams { kappa, tau } = self.params;
                let (x, y) = (p[0], p[1]);
                let lam = ((x * x + y * y) * (kappa / 4.0) + 1.0).recip();
                let w = [lam * y * tau, -(lam * x * tau), S::cst(1.0)];
                for i in 0..3 {
                    for j in 0..3 {
                        g[i][j] = w[i] * w[j];
                    }
                }
                g[0][0] += lam * lam;
                g[1][1] += lam * lam;
                g[3][3] = S::cst(1.0);
            }
            ChartKind::PolarProduct => {
                let sn = self.params.sn(p[0]);
                g[0][0] = S::cst(1.0);
                g[1][1] = sn * sn;
                g[2][2] = S::cst(1.0);
                g[3][3] = S::cst(1.0);
            }
            ChartKind::HyperboloidProduct => {
                g[0][0] = S::cst(-1.0);
                g[1][1] = S::cst(1.0);
                g[2][2] = S::cst(1.0);
                g[3][3] = S::cst(1.0);
            }
        }
        g
    }

    fn metric_raw(&self, p: &Vec4) -> Matrix4<f64> {
        let g = self.metric_generic(&[p[0], p[1], p[2], p[3]]);
        Matrix4::from_fn(|i, j| g[i][j])
    }

    /// Metric tensor at `p` (4×4; the unused slot of 3-D charts is 1).
    pub fn metric_at(&self, p: &Vec4) -> Result<Matrix4<f64>> {
        self.check(p)?;
        Ok(self.metric_raw(p))
    }

    /// `⟨X, Y⟩` at `p` without a domain check.
    pub fn inner(&self, p: &Vec4, x: &Vec4, y: &Vec4) -> f64 {
        match self.kind {
            ChartKind::HyperboloidProduct => -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3],
            _ => {
                let g = self.metric_raw(p);
                let mut acc = 0.0;
                for i in 0..3 {
                    for j in 0..3 {
                        acc += g[(i, j)] * x[i] * y[j];
                    }
                }
                acc
            }
        }
    }

    pub fn norm(&self, p: &Vec4, x: &Vec4) -> f64 {
        self.inner(p, x, x).max(0.0).sqrt()
    }

    /// Christoffel symbols. Coordinate charts differentiate the metric with
    /// dual numbers; the hyperboloid chart reports the connection of the
    /// constrained model, `∇̄_X Y = D_X Y − ⟨X, Y⟩_{H²} p_{H²}`.
    pub fn christoffels_at(&self, p: &Vec4) -> Result<Christoffels> {
        self.check(p)?;
        Ok(self.christoffels_raw(p))
    }

    fn christoffels_raw(&self, p: &Vec4) -> Christoffels {
        let mut gamma = [[[0.0; 4]; 4]; 4];
        match self.kind {
            ChartKind::HyperboloidProduct => {
                let eta = [-1.0, 1.0, 1.0];
                for k in 0..3 {
                    for i in 0..3 {
                        gamma[k][i][i] = -eta[i] * p[k];
                    }
                }
            }
            _ => {
                // dg[l][i][j] = ∂_l g_ij
                let mut dg = [[[0.0; 3]; 3]; 3];
                for (l, dgl) in dg.iter_mut().enumerate() {
                    let mut q = [Dual::constant(0.0f64); 4];
                    for a in 0..4 {
                        q[a] = Dual::new(p[a], if a == l { 1.0 } else { 0.0 });
                    }
                    let g = self.metric_generic(&q);
                    for i in 0..3 {
                        for j in 0..3 {
                            dgl[i][j] = g[i][j].eps;
                        }
                    }
                }
                let g = self.metric_raw(p);
                let g3 = g.fixed_view::<3, 3>(0, 0).into_owned();
                let ginv = g3.try_inverse().unwrap_or_else(Matrix3::zeros);
                for k in 0..3 {
                    for i in 0..3 {
                        for j in 0..3 {
                            let mut acc = 0.0;
                            for l in 0..3 {
                                acc += ginv[(k, l)] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
                            }
                            gamma[k][i][j] = 0.5 * acc;
                        }
                    }
                }
            }
        }
        gamma
    }

    /// `Γᵏᵢⱼ Xⁱ Yʲ`.
    pub fn connection_term(&self, p: &Vec4, x: &Vec4, y: &Vec4) -> Vec4 {
        let gamma = self.christoffels_raw(p);
        let mut out = Vec4::zeros();
        for k in 0..4 {
            let mut acc = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    acc += gamma[k][i][j] * x[i] * y[j];
                }
            }
            out[k] = acc;
        }
        out
    }

    /// Components of the unit vertical Killing field ξ.
    pub fn vertical_raw(&self) -> Vec4 {
        match self.kind {
            ChartKind::HyperboloidProduct => Vec4::new(0.0, 0.0, 0.0, 1.0),
            _ => Vec4::new(0.0, 0.0, 1.0, 0.0),
        }
    }

    pub fn vertical_field(&self, p: &Vec4) -> Result<TangentVector> {
        self.check(p)?;
        Ok(TangentVector::new(*p, self.vertical_raw()))
    }

    /// Oriented volume form; the coordinate frame is positive.
    pub fn volume(&self, p: &Vec4, x: &Vec4, y: &Vec4, z: &Vec4) -> f64 {
        match self.kind {
            ChartKind::HyperboloidProduct => Matrix4::from_columns(&[base_h2(p), *x, *y, *z]).determinant(),
            _ => {
                let g = self.metric_raw(p);
                let det = g.fixed_view::<3, 3>(0, 0).determinant();
                let m = Matrix3::from_columns(&[x.xyz(), y.xyz(), z.xyz()]);
                det.sqrt() * m.determinant()
            }
        }
    }

    /// `X ∧ Y`: the vector with `⟨X∧Y, Z⟩ = vol(X, Y, Z)` for all tangent Z.
    pub fn cross_raw(&self, p: &Vec4, x: &Vec4, y: &Vec4) -> Vec4 {
        match self.kind {
            ChartKind::HyperboloidProduct => {
                let ph = base_h2(p);
                let mut c = Vec4::zeros();
                for k in 0..4 {
                    let mut e = Vec4::zeros();
                    e[k] = 1.0;
                    c[k] = Matrix4::from_columns(&[ph, *x, *y, e]).determinant();
                }
                c[0] = -c[0];
                c
            }
            _ => {
                let g = self.metric_raw(p);
                let g3 = g.fixed_view::<3, 3>(0, 0).into_owned();
                let lowered: Vector3<f64> = g3.determinant().sqrt() * x.xyz().cross(&y.xyz());
                let up = g3.try_inverse().unwrap_or_else(Matrix3::zeros) * lowered;
                Vec4::new(up[0], up[1], up[2], 0.0)
            }
        }
    }

    fn check_tangent(&self, v: &TangentVector) -> Result<()> {
        self.check(&v.base)?;
        if self.kind == ChartKind::HyperboloidProduct {
            let p = &v.base;
            let x = &v.components;
            let lin = -p[0] * x[0] + p[1] * x[1] + p[2] * x[2];
            if lin.abs() > CONSTRAINT_TOL * (1.0 + x.norm() * p.norm()) {
                return Err(GeomError::Domain { chart: "hyperboloid-tangent", point: [x[0], x[1], x[2], x[3]] });
            }
        }
        Ok(())
    }

    pub fn cross(&self, x: &TangentVector, y: &TangentVector) -> Result<TangentVector> {
        self.check_tangent(x)?;
        self.check_tangent(y)?;
        if (x.base - y.base).norm() > 1e-12 * (1.0 + x.base.norm()) {
            return Err(GeomError::Spec("cross product of vectors at different points".into()));
        }
        Ok(TangentVector::new(x.base, self.cross_raw(&x.base, &x.components, &y.components)))
    }

    /// `∇̄_X V` for a field with components `V` whose ordinary directional
    /// derivative along `X` is `dv`.
    pub fn covariant_derivative(&self, p: &Vec4, x: &Vec4, v: &Vec4, dv: &Vec4) -> Vec4 {
        dv + self.connection_term(p, x, v)
    }

    /// `∇̄_X F` for a component field given as a closure; the directional
    /// derivative is taken by central differences along a chart-adapted curve.
    pub fn covariant_derivative_of_field<F>(&self, p: &Vec4, x: &Vec4, field: F, step: f64) -> Result<Vec4>
    where
        F: Fn(&Vec4) -> Vec4,
    {
        self.check(p)?;
        let (a, b) = (self.exp_approx(p, x, step), self.exp_approx(p, x, -step));
        let dv = (field(&a) - field(&b)) / (2.0 * step);
        Ok(self.covariant_derivative(p, x, &field(p), &dv))
    }

    /// Second-order curve through `p` with velocity `x` (geodesic to second
    /// order); keeps hyperboloid samples on the constraint.
    fn exp_approx(&self, p: &Vec4, x: &Vec4, t: f64) -> Vec4 {
        match self.kind {
            ChartKind::HyperboloidProduct => {
                let q = p + x * t;
                let h = -q[0] * q[0] + q[1] * q[1] + q[2] * q[2];
                let s = (-1.0 / h).sqrt();
                Vec4::new(q[0] * s, q[1] * s, q[2] * s, q[3])
            }
            _ => p + x * t,
        }
    }

    /// Projection onto the tangent space of the model at `p`.
    pub fn project_tangent(&self, p: &Vec4, x: &Vec4) -> Vec4 {
        match self.kind {
            ChartKind::HyperboloidProduct => {
                let lin = -p[0] * x[0] + p[1] * x[1] + p[2] * x[2];
                Vec4::new(x[0] + lin * p[0], x[1] + lin * p[1], x[2] + lin * p[2], x[3])
            }
            _ => *x,
        }
    }

    /// Max |∂ₖgᵢⱼ − (Γˡₖᵢ gₗⱼ + Γˡₖⱼ gᵢₗ)| with ∂g from central differences.
    /// Coordinate charts only.
    pub fn metric_compatibility_residual(&self, p: &Vec4, step: f64) -> Result<f64> {
        if self.kind == ChartKind::HyperboloidProduct {
            return Err(GeomError::Unsupported("metric compatibility is checked in coordinate charts".into()));
        }
        let gamma = self.christoffels_at(p)?;
        let g = self.metric_raw(p);
        let mut worst: f64 = 0.0;
        for k in 0..3 {
            let mut e = Vec4::zeros();
            e[k] = step;
            let dg = (self.metric_raw(&(p + e)) - self.metric_raw(&(p - e))) / (2.0 * step);
            for i in 0..3 {
                for j in 0..3 {
                    let mut rhs = 0.0;
                    for l in 0..3 {
                        rhs += gamma[l][k][i] * g[(l, j)] + gamma[l][k][j] * g[(i, l)];
                    }
                    worst = worst.max((dg[(i, j)] - rhs).abs());
                }
            }
        }
        Ok(worst)
    }

    /// Max entry of the Lie derivative of the metric along ξ, by central
    /// differences (ξ has constant components in every chart).
    pub fn killing_residual(&self, p: &Vec4, step: f64) -> Result<f64> {
        self.check(p)?;
        let xi = self.vertical_raw();
        let dg = (self.metric_raw(&(p + xi * step)) - self.metric_raw(&(p - xi * step))) / (2.0 * step);
        Ok(dg.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    }
}

/// The H² component of a hyperboloid-chart point (height dropped); it is the
/// unit timelike normal of the constraint.
fn base_h2(p: &Vec4) -> Vec4 {
    Vec4::new(p[0], p[1], p[2], 0.0)
}

/// Ambient selection read from `key=value` text.
#[derive(Clone, Debug, PartialEq)]
pub struct AmbientConfig {
    pub kappa: f64,
    pub tau: f64,
    pub chart: ChartKind,
    pub validation_mode: ValidationMode,
}

impl AmbientConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut kappa = None;
        let mut tau = None;
        let mut chart = ChartKind::CartanEktau;
        let mut mode = ValidationMode::Strict;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| GeomError::Spec(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| {
                v.parse::<f64>()
                    .map_err(|_| GeomError::Spec(format!("line {}: bad number {v:?}", lineno + 1)))
            };
            match key {
                "kappa" => kappa = Some(num(value)?),
                "tau" => tau = Some(num(value)?),
                "chart" => {
                    chart = match value {
                        "cartan" | "cartanektau" => ChartKind::CartanEktau,
                        "polar" | "polarproduct" => ChartKind::PolarProduct,
                        "hyperboloid" | "hyperboloidproduct" => ChartKind::HyperboloidProduct,
                        other => return Err(GeomError::Spec(format!("unknown chart {other:?}"))),
                    }
                }
                "validation_mode" => {
                    mode = match value {
                        "strict" => ValidationMode::Strict,
                        "permissive" => ValidationMode::Permissive,
                        other => return Err(GeomError::Spec(format!("unknown validation_mode {other:?}"))),
                    }
                }
                other => return Err(GeomError::Spec(format!("unknown key {other:?}"))),
            }
        }
        Ok(AmbientConfig {
            kappa: kappa.ok_or_else(|| GeomError::Spec("missing kappa".into()))?,
            tau: tau.ok_or_else(|| GeomError::Spec("missing tau".into()))?,
            chart,
            validation_mode: mode,
        })
    }

    pub fn build(&self) -> Result<AmbientChart> {
        let params = SpaceParams::with_mode(self.kappa, self.tau, self.validation_mode)?;
        AmbientChart::new(params, self.chart)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: f64, b: f64, c: f64) -> Vec4 {
        Vec4::new(a, b, c, 0.0)
    }

    #[test]
    fn rejects_degenerate_and_nonstandard_kappa() {
        assert!(SpaceParams::new(0.0, 0.0).is_err());
        assert!(SpaceParams::new(1.0, 0.5).is_err());
        assert!(SpaceParams::new(-2.0, 0.0).is_err());
        assert!(SpaceParams::with_mode(-2.0, 0.0, ValidationMode::Permissive).is_ok());
    }

    #[test]
    fn flat_metric_is_identity_at_origin() {
        let c = AmbientChart::cartan(SpaceParams::euclidean());
        let g = c.metric_at(&Vec4::zeros()).unwrap();
        assert_eq!(g, Matrix4::identity());
    }

    #[test]
    fn hyperbolic_cartan_metric_value() {
        let c = AmbientChart::cartan(SpaceParams::h2xr());
        assert_eq!(c.metric_at(&Vec4::zeros()).unwrap(), Matrix4::identity());
        let g = c.metric_at(&v(1.0, 0.0, 0.0)).unwrap();
        assert!((g[(0, 0)] - 16.0 / 9.0).abs() < 1e-15);
        assert!(c.metric_at(&v(2.5, 0.0, 0.0)).is_err());
    }

    #[test]
    fn hyperboloid_vertex_frame_is_orthonormal() {
        let c = AmbientChart::hyperboloid();
        let p = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let e: Vec<Vec4> = (1..4).map(|k| {
            let mut x = Vec4::zeros();
            x[k] = 1.0;
            x
        }).collect();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(c.inner(&p, &e[i], &e[j]), expect);
            }
        }
        assert_eq!(c.vertical_field(&p).unwrap().components, e[2]);
    }

    #[test]
    fn flat_christoffels_vanish_and_cross_is_euclidean() {
        let c = AmbientChart::cartan(SpaceParams::euclidean());
        let p = v(0.3, -0.1, 0.2);
        let g = c.christoffels_at(&p).unwrap();
        assert!(g.iter().flatten().flatten().all(|x| *x == 0.0));
        let w = c.cross_raw(&p, &v(1.0, 0.0, 0.0), &v(0.0, 1.0, 0.0));
        assert!((w - v(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn nil_christoffels_reproduce_killing_identity_at_origin() {
        // At the origin of Nil₃ the frame is orthonormal and ∇̄_X ξ = τ X∧ξ
        // gives Γ^y_{xz} = −τ, Γ^x_{yz} = τ.
        let c = AmbientChart::cartan(SpaceParams::nil3());
        let g = c.christoffels_at(&Vec4::zeros()).unwrap();
        let tau = 0.5;
        assert!((g[1][0][2] - (-tau)).abs() < 1e-14, "{}", g[1][0][2]);
        assert!((g[0][1][2] - tau).abs() < 1e-14, "{}", g[0][1][2]);
        assert!(g[2][2][2].abs() < 1e-14);
    }

    #[test]
    fn polar_product_requires_tau_zero() {
        assert!(AmbientChart::polar(SpaceParams::nil3()).is_err());
        assert!(AmbientChart::new(SpaceParams::nil3(), ChartKind::HyperboloidProduct).is_err());
    }

    #[test]
    fn config_round_trip() {
        let cfg = AmbientConfig::parse("kappa = -1\ntau=0 # product\nchart=polar\n").unwrap();
        let chart = cfg.build().unwrap();
        assert_eq!(chart.kind, ChartKind::PolarProduct);
        assert!(AmbientConfig::parse("kappa=-1").is_err());
        assert!(AmbientConfig::parse("kappa=-1\ntau=0\nchart=klein").is_err());
        let perm = AmbientConfig::parse("kappa=-3\ntau=0.2\nvalidation_mode=permissive").unwrap();
        assert!(perm.build().is_ok());
    }
}
