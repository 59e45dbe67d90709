//! Curves on surfaces, AR-lines of curvature and intersections of
//! H-surfaces.

pub mod contact;
pub mod disk;
pub mod scenarios;
pub mod tracer;

use std::sync::Arc;

use nalgebra::Vector2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::Vec4;
use crate::arpair::{ar_differential, ar_operator, pair_hopf};
use crate::error::{GeomError, Result};
use crate::real::Dual;
use crate::report::Table;
use crate::surface::{Immersion, PointGeometry};

pub use contact::{
    condition_b, corollary_config, intersection_angle, key_lemma_verify, AngleReport, ConditionB, ContactSample,
    CorollaryCase, CorollaryMatch, IntersectionData, KeyLemmaReport, KeyLemmaVerdict,
};
pub use disk::{disk_report, Companion, DiskBoundarySpec, DiskReport, DiskSurface, VertexRule};

/// Speeds below this count as a singular point of the curve.
pub const REGULARITY_TOL: f64 = 1e-12;
/// Tolerance of the horizontal and vertical tests.
pub const CLASSIFY_TOL: f64 = 1e-8;

pub type CurveFn = Arc<dyn Fn(Dual<f64>) -> [Dual<f64>; 2] + Send + Sync>;

/// `s ↦ (u(s), v(s))` on an immersion, sampled uniformly on `range`.
#[derive(Clone)]
pub struct CurveOnSurface {
    pub surface: Immersion,
    pub curve: CurveFn,
    pub range: (f64, f64),
    pub samples: usize,
    pub label: String,
}

/// One sample of a curve with the surface geometry under it.
#[derive(Clone, Debug)]
pub struct CurveSample {
    pub s: f64,
    pub uv: Vector2<f64>,
    /// `(u′, v′)`.
    pub duv: Vector2<f64>,
    pub geometry: PointGeometry,
    /// γ′ in ambient components.
    pub velocity: Vec4,
}

impl CurveSample {
    /// `|γ′|` in the induced metric.
    pub fn speed(&self) -> f64 {
        self.geometry.inner2(&self.duv, &self.duv).sqrt()
    }
}

impl CurveOnSurface {
    pub fn new<F>(surface: &Immersion, range: (f64, f64), samples: usize, f: F) -> Self
    where
        F: Fn(Dual<f64>) -> [Dual<f64>; 2] + Send + Sync + 'static,
    {
        CurveOnSurface { surface: surface.clone(), curve: Arc::new(f), range, samples, label: String::new() }
    }

    pub fn labeled(mut self, label: &str) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    /// Sample parameters, both ends included.
    pub fn parameters(&self) -> Vec<f64> {
        let (a, b) = self.range;
        let n = self.samples.max(2);
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    }

    pub fn coords(&self, s: f64) -> (Vector2<f64>, Vector2<f64>) {
        let [u, v] = (self.curve)(Dual::var(s));
        (Vector2::new(u.re, v.re), Vector2::new(u.eps, v.eps))
    }

    pub fn sample_at(&self, s: f64) -> Result<CurveSample> {
        let (uv, duv) = self.coords(s);
        let geometry = self.surface.geometry(uv[0], uv[1])?;
        let velocity = geometry.to_ambient(&duv);
        let out = CurveSample { s, uv, duv, geometry, velocity };
        if !(out.speed() > REGULARITY_TOL) {
            return Err(GeomError::Irregular { s });
        }
        Ok(out)
    }

    pub fn sample(&self) -> Result<Vec<CurveSample>> {
        self.parameters().into_par_iter().map(|s| self.sample_at(s)).collect()
    }

    pub fn start(&self) -> Result<Vec4> {
        let (uv, _) = self.coords(self.range.0);
        self.surface.point(uv[0], uv[1])
    }

    pub fn end(&self) -> Result<Vec4> {
        let (uv, _) = self.coords(self.range.1);
        self.surface.point(uv[0], uv[1])
    }

    /// The same trace run backwards: `s ↦ γ(a + b − s)`.
    pub fn reversed(&self) -> Self {
        let f = self.curve.clone();
        let (a, b) = self.range;
        let mut out = self.clone();
        out.curve = Arc::new(move |s| f(-s + (a + b)));
        out
    }

    /// `t ↦ γ(g(t))` for an increasing `g` mapping `t_range` onto the
    /// current range.
    pub fn reparametrized<G>(&self, t_range: (f64, f64), g: G) -> Self
    where
        G: Fn(Dual<f64>) -> Dual<f64> + Send + Sync + 'static,
    {
        let f = self.curve.clone();
        let mut out = self.clone();
        out.curve = Arc::new(move |t| f(g(t)));
        out.range = t_range;
        out
    }
}

/// Per-sample AR-line-of-curvature residuals of a curve.
#[derive(Clone, Debug)]
pub struct ArLocusReport {
    /// Columns `s, residual, eigen, im_qar, im_pair`.
    pub table: Table,
    pub max: f64,
}

impl ArLocusReport {
    pub fn residuals(&self) -> Vec<f64> {
        self.table.column("residual").unwrap_or_default()
    }
}

/// `|II_AR(γ′, Jγ′)| / |γ′|²` at one sample.
pub fn ar_residual_at(c: &CurveSample) -> f64 {
    let g = &c.geometry;
    let ii = ar_operator(g).ii_ar;
    let x = c.duv;
    let jx = g.rotation() * x;
    (x.transpose() * ii * jx)[0].abs() / g.inner2(&x, &x)
}

/// AR-locus test along a curve.
///
/// `residual` is `|II_AR(γ′, Jγ′)| / |γ′|²`, `eigen` is the area of
/// `(S_AR γ′, γ′)` over `|γ′|²`. In conformal coordinates `im_pair` is
/// `Im(P ζ²)/(λ|ζ|²)` for the Hopf function `P` of `(I, II_AR)` and
/// `ζ = u′ + i v′`, and `im_qar` the same with `Q^AR` in place of `P`;
/// both are NaN elsewhere.
pub fn ar_locus_residual(c: &CurveOnSurface) -> Result<ArLocusReport> {
    let samples = c.sample()?;
    let rows: Vec<Vec<f64>> = samples
        .par_iter()
        .map(|cs| {
            let g = &cs.geometry;
            let x = cs.duv;
            let n2 = g.inner2(&x, &x);
            let sx = ar_operator(g).s_ar * x;
            let eigen = (g.area * (sx[0] * x[1] - sx[1] * x[0])).abs() / n2;
            let (im_qar, im_pair) = if g.is_isothermal() {
                let zeta = Complex64::new(x[0], x[1]);
                let scale = 0.5 * g.first[(0, 0)] * zeta.norm_sqr();
                let q = ar_differential(g).map(|q| (q * zeta * zeta).im / scale).unwrap_or(f64::NAN);
                let p = pair_hopf(g).map(|p| (p * zeta * zeta).im / scale).unwrap_or(f64::NAN);
                (q, p)
            } else {
                (f64::NAN, f64::NAN)
            };
            vec![cs.s, ar_residual_at(cs), eigen, im_qar, im_pair]
        })
        .collect();
    let mut table = Table::new(&["s", "residual", "eigen", "im_qar", "im_pair"]);
    for r in rows {
        table.push(r);
    }
    let max = table.max_abs("residual").unwrap_or(0.0);
    Ok(ArLocusReport { table, max })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveClass {
    /// `None` when `τ ≠ 0`, where there are no slices.
    pub horizontal: Option<bool>,
    pub vertical: bool,
    /// `max |⟨ξ, γ′⟩| / |γ′|`.
    pub max_vertical_part: f64,
    /// `max sin ∠(T, γ′)`.
    pub max_t_angle: f64,
    /// `min |T|`.
    pub min_t: f64,
}

fn sin_angle(g: &PointGeometry, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    let cross = g.area * (a[0] * b[1] - a[1] * b[0]);
    cross.abs() / (g.inner2(a, a) * g.inner2(b, b)).sqrt()
}

/// Horizontal: `⟨ξ, γ′⟩ = 0`; vertical: `γ′ ∥ T` with `T ≠ 0`.
pub fn classify_curve(c: &CurveOnSurface) -> Result<CurveClass> {
    let samples = c.sample()?;
    let mut out = CurveClass { horizontal: None, vertical: false, max_vertical_part: 0.0, max_t_angle: 0.0, min_t: f64::INFINITY };
    for cs in &samples {
        let g = &cs.geometry;
        let vert = g.inner2(&g.t_coords, &cs.duv) / cs.speed();
        out.max_vertical_part = out.max_vertical_part.max(vert.abs());
        let t = g.t_norm2().sqrt();
        out.min_t = out.min_t.min(t);
        let ang = if t > 0.0 { sin_angle(g, &g.t_coords, &cs.duv) } else { 1.0 };
        out.max_t_angle = out.max_t_angle.max(ang);
    }
    if c.surface.params().tau == 0.0 {
        out.horizontal = Some(out.max_vertical_part <= CLASSIFY_TOL);
    }
    out.vertical = out.min_t > 1e-6 && out.max_t_angle <= CLASSIFY_TOL;
    Ok(out)
}

/// Whether the curve stays in one slice.
pub fn is_horizontal(c: &CurveOnSurface) -> Result<bool> {
    let tau = c.surface.params().tau;
    if tau != 0.0 {
        return Err(GeomError::Unsupported(format!("no slices exist for tau = {tau}")));
    }
    Ok(classify_curve(c)?.horizontal == Some(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::SpaceParams;
    use crate::gallery::closed::{Slice, VerticalPlaneH2xR, VerticalPlaneNil3};
    use crate::gallery::example::{self, Branch};
    use crate::gallery::meridian::{self, Family};

    #[test]
    fn any_curve_on_a_slice_is_an_ar_line() {
        let s = Immersion::new(Slice::new(SpaceParams::h2xr(), 0.0).unwrap());
        let c = CurveOnSurface::new(&s, (0.0, 1.0), 21, |t| { use crate::real::Real; [t * 0.5, (t * 3.0).sin() * 0.3] });
        assert!(ar_locus_residual(&c).unwrap().max < 1e-12);
        let cls = classify_curve(&c).unwrap();
        assert_eq!(cls.horizontal, Some(true));
        assert!(is_horizontal(&c).unwrap());
    }

    #[test]
    fn meridian_and_parallel_of_a_rotational_sphere() {
        let p = Arc::new(meridian::rotational_cmc(SpaceParams::h2xr(), 0.8, Family::Sphere).unwrap());
        let im = p.immersion();
        let mer = CurveOnSurface::new(&im, (-1.0, 1.0), 21, |t| [t, Dual::constant(0.7)]);
        let rep = ar_locus_residual(&mer).unwrap();
        assert!(rep.max < 1e-8, "{}", rep.max);
        for col in ["im_qar", "im_pair"] {
            assert!(rep.table.max_abs(col).unwrap() < 1e-8);
        }
    }

    #[test]
    fn example_curve_is_not_an_ar_line_of_the_plane() {
        let plane = Immersion::new(VerticalPlaneH2xR);
        let c = CurveOnSurface::new(&plane, (-0.8, 0.8), 33, |s| example::gamma_on_plane(s, Branch::Upper));
        assert!(ar_locus_residual(&c).unwrap().max >= 0.01);
        let sphere = Immersion::new(example::ExampleSphere);
        let c = CurveOnSurface::new(&sphere, (-0.8, 0.8), 33, |s| example::gamma_on_sphere(s, Branch::Upper));
        assert!(ar_locus_residual(&c).unwrap().max < 1e-9);
    }

    #[test]
    fn vertical_lines_and_nil_classification() {
        let plane = Immersion::new(VerticalPlaneH2xR);
        let c = CurveOnSurface::new(&plane, (-1.0, 1.0), 11, |s| [Dual::constant(0.3), s]);
        let cls = classify_curve(&c).unwrap();
        assert!(cls.vertical);
        assert_eq!(cls.horizontal, Some(false));
        let nil = Immersion::new(VerticalPlaneNil3 { tau: 0.5, beta: 0.0 });
        let c = CurveOnSurface::new(&nil, (-1.0, 1.0), 11, |s| [s, Dual::constant(0.0)]);
        assert_eq!(classify_curve(&c).unwrap().horizontal, None);
        assert!(matches!(is_horizontal(&c), Err(GeomError::Unsupported(_))));
    }

    #[test]
    fn singular_curves_are_reported() {
        let plane = Immersion::new(VerticalPlaneH2xR);
        let c = CurveOnSurface::new(&plane, (-1.0, 1.0), 11, |s| [s * s, s * s]);
        assert!(matches!(c.sample(), Err(GeomError::Irregular { .. })));
    }

    #[test]
    fn reversal_keeps_the_trace() {
        let plane = Immersion::new(VerticalPlaneH2xR);
        let c = CurveOnSurface::new(&plane, (0.0, 1.0), 5, |s| [s, s * s]);
        let r = c.reversed();
        assert!((c.start().unwrap() - r.end().unwrap()).norm() < 1e-15);
        let g = c.reparametrized((0.0, 2.0), |t| t * 0.5);
        assert!((g.end().unwrap() - c.end().unwrap()).norm() < 1e-15);
    }
}
