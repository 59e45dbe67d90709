use std::sync::{Arc, OnceLock};

use ektau::ambient::{AmbientChart, ChartKind, SpaceParams, Vec4};
use ektau::arpair::{ar_operator, pair_hopf, self_adjoint_defect};
use ektau::curvelab::{ar_locus_residual, key_lemma_verify, scenarios, CurveOnSurface, KeyLemmaVerdict};
use ektau::gallery::closed::VerticalPlaneH2xR;
use ektau::gallery::meridian::{self, Family};
use ektau::gallery::{catalog, GalleryEntry};
use ektau::real::{Dual, Real};
use ektau::surface::Immersion;
use nalgebra::{Matrix4, Vector2};
use num_complex::Complex64;
use proptest::prelude::*;

fn gallery() -> &'static [GalleryEntry] {
    static G: OnceLock<Vec<GalleryEntry>> = OnceLock::new();
    G.get_or_init(|| catalog().unwrap())
}

fn chart_for(k: usize, kappa: f64, tau: f64) -> Option<AmbientChart> {
    let p = if kappa == 0.0 && tau == 0.0 { SpaceParams::euclidean() } else { SpaceParams::new(kappa, tau).ok()? };
    match k {
        0 => Some(AmbientChart::cartan(p)),
        1 => AmbientChart::polar(p).ok(),
        _ => (kappa == -1.0 && tau == 0.0).then(AmbientChart::hyperboloid),
    }
}

/// A point of the chart from three numbers in [0, 1).
fn point_in(chart: &AmbientChart, a: f64, b: f64, c: f64) -> Vec4 {
    let k = chart.params.kappa;
    match chart.kind {
        ChartKind::CartanEktau => {
            let r = if k < 0.0 { 1.8 / (-k).sqrt() * a } else { 2.0 * a };
            let t = std::f64::consts::TAU * b;
            Vec4::new(r * t.cos(), r * t.sin(), 4.0 * c - 2.0, 0.0)
        }
        ChartKind::PolarProduct => {
            let top = if k > 0.0 { 0.9 * std::f64::consts::PI / k.sqrt() } else { 3.0 };
            Vec4::new(0.05 + (top - 0.05) * a, std::f64::consts::TAU * b, 4.0 * c - 2.0, 0.0)
        }
        ChartKind::HyperboloidProduct => {
            let (x, y) = (4.0 * a - 2.0, 4.0 * b - 2.0);
            Vec4::new((1.0 + x * x + y * y).sqrt(), x, y, 4.0 * c - 2.0)
        }
    }
}

fn unit_tangent(chart: &AmbientChart, p: &Vec4, raw: [f64; 4]) -> Option<Vec4> {
    let mut x = Vec4::from(raw);
    if chart.kind != ChartKind::HyperboloidProduct {
        x[3] = 0.0;
    }
    let x = chart.project_tangent(p, &x);
    let n = chart.norm(p, &x);
    (n > 1e-3).then(|| x / n)
}

fn chart_strategy() -> impl Strategy<Value = AmbientChart> {
    (0usize..3, prop::sample::select(vec![-1.0, 0.0, 1.0]), prop::sample::select(vec![0.0, 0.5]))
        .prop_filter_map("chart unavailable", |(k, kappa, tau)| chart_for(k, kappa, tau))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn vertical_field_is_killing_with_bundle_curvature(
        chart in chart_strategy(),
        a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64,
        raw in prop::array::uniform4(-1.0..1.0f64),
    ) {
        let p = point_in(&chart, a, b, c);
        prop_assume!(chart.contains(&p));
        if let Some(x) = unit_tangent(&chart, &p, raw) {
            let xi = chart.vertical_raw();
            let lhs = chart.covariant_derivative(&p, &x, &xi, &Vec4::zeros());
            let rhs = chart.cross_raw(&p, &x, &xi) * chart.params.tau;
            prop_assert!(chart.norm(&p, &(lhs - rhs)) <= 1e-6);
        }
    }

    #[test]
    fn metric_is_symmetric_positive(
        chart in chart_strategy(),
        a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64,
        raw in prop::array::uniform4(-1.0..1.0f64),
    ) {
        let p = point_in(&chart, a, b, c);
        let g = chart.metric_at(&p).unwrap();
        prop_assert!((g - g.transpose()).abs().max() <= 1e-14);
        if let Some(x) = unit_tangent(&chart, &p, raw) {
            prop_assert!(chart.inner(&p, &x, &x) > 0.0);
        }
    }

    #[test]
    fn cross_product_identities(
        chart in chart_strategy(),
        a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64,
        r1 in prop::array::uniform4(-1.0..1.0f64),
        r2 in prop::array::uniform4(-1.0..1.0f64),
        r3 in prop::array::uniform4(-1.0..1.0f64),
        s in -2.0..2.0f64,
    ) {
        let p = point_in(&chart, a, b, c);
        let (Some(x), Some(y), Some(z)) = (unit_tangent(&chart, &p, r1), unit_tangent(&chart, &p, r2), unit_tangent(&chart, &p, r3)) else {
            return Ok(());
        };
        let ip = |u: &Vec4, v: &Vec4| chart.inner(&p, u, v);
        let xy = chart.cross_raw(&p, &x, &y);
        prop_assert!(chart.norm(&p, &(xy + chart.cross_raw(&p, &y, &x))) <= 1e-10);
        let lin = chart.cross_raw(&p, &(x * s + z), &y) - (xy * s + chart.cross_raw(&p, &z, &y));
        prop_assert!(chart.norm(&p, &lin) <= 1e-10);
        let gram = ip(&xy, &xy) - (ip(&x, &x) * ip(&y, &y) - ip(&x, &y).powi(2));
        prop_assert!(gram.abs() <= 1e-10);
        prop_assert!(ip(&xy, &x).abs() <= 1e-10 && ip(&xy, &y).abs() <= 1e-10);
    }

    #[test]
    fn hyperboloid_and_polar_charts_are_isometric(rho in 0.05..3.0f64, phi in 0.0..6.28f64, z in -2.0..2.0f64) {
        let polar = AmbientChart::polar(SpaceParams::h2xr()).unwrap();
        let hyp = AmbientChart::hyperboloid();
        let q = Vec4::new(rho.cosh(), rho.sinh() * phi.cos(), rho.sinh() * phi.sin(), z);
        let jac = Matrix4::from_columns(&[
            Vec4::new(rho.sinh(), rho.cosh() * phi.cos(), rho.cosh() * phi.sin(), 0.0),
            Vec4::new(0.0, -rho.sinh() * phi.sin(), rho.sinh() * phi.cos(), 0.0),
            Vec4::new(0.0, 0.0, 0.0, 1.0),
            Vec4::zeros(),
        ]);
        let pulled = jac.transpose() * hyp.metric_at(&q).unwrap() * jac;
        let direct = polar.metric_at(&Vec4::new(rho, phi, z, 0.0)).unwrap();
        prop_assert!((pulled.fixed_view::<3, 3>(0, 0) - direct.fixed_view::<3, 3>(0, 0)).abs().max() <= 1e-8);
    }
}

fn entry_point(e: &GalleryEntry, a: f64, b: f64) -> (f64, f64) {
    let ((u0, u1), (v0, v1)) = e.domain;
    (u0 + (u1 - u0) * a, v0 + (v1 - v0) * b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pointwise_surface_identities(k in 0usize..64, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let e = &gallery()[k % gallery().len()];
        let (u, v) = entry_point(e, a, b);
        let g = e.immersion.geometry(u, v).unwrap();
        prop_assert!((g.t_norm2() + g.nu * g.nu - 1.0).abs() <= 1e-10);
        prop_assert!((g.second[(0, 1)] - g.second[(1, 0)]).abs() <= 1e-10);
        let t = g.t().unwrap();
        let lam = g.lambda().unwrap();
        prop_assert!((t.norm_sqr() - 0.5 * lam * (1.0 - g.nu * g.nu)).abs() <= 1e-8);
        let ar = ar_operator(&g);
        prop_assert!(ar.s_ar.trace().abs() <= 1e-10);
        prop_assert!(self_adjoint_defect(&g, &ar.s_ar) <= 1e-10);
    }

    #[test]
    fn conformal_reparametrization_invariance(
        k in 0usize..64, a in 0.1..0.9f64, b in 0.1..0.9f64,
        mag in 0.5..2.0f64, arg in -3.1..3.1f64,
        dir in -3.1..3.1f64,
    ) {
        let e = &gallery()[k % gallery().len()];
        let (u, v) = entry_point(e, a, b);
        let m = Complex64::from_polar(mag, arg);
        let re = e.immersion.reparametrized(m, Complex64::new(0.0, 0.0));
        let z = Complex64::new(u, v) / m;
        let (g0, g1) = (e.immersion.geometry(u, v).unwrap(), re.geometry(z.re, z.im).unwrap());
        prop_assert!((g0.mean - g1.mean).abs() <= 1e-8);
        prop_assert!((g0.extrinsic - g1.extrinsic).abs() <= 1e-8);
        prop_assert!((g0.gauss_extrinsic_side() - g1.gauss_extrinsic_side()).abs() <= 1e-8);
        prop_assert!((g0.nu - g1.nu).abs() <= 1e-8);
        let p0 = pair_hopf(&g0).unwrap().norm() / g0.lambda().unwrap();
        let p1 = pair_hopf(&g1).unwrap().norm() / g1.lambda().unwrap();
        prop_assert!((p0 - p1).abs() <= 1e-8);
        let x0 = Vector2::new(dir.cos(), dir.sin());
        let zx = Complex64::new(x0[0], x0[1]) / m;
        let x1 = Vector2::new(zx.re, zx.im);
        let f = |g: &ektau::surface::PointGeometry, x: Vector2<f64>| {
            let ii = ar_operator(g).ii_ar;
            (x.transpose() * ii * (g.rotation() * x))[0] / g.inner2(&x, &x)
        };
        prop_assert!((f(&g0, x0) - f(&g1, x1)).abs() <= 1e-8);
    }

    #[test]
    fn gallery_ar_membership(k in 0usize..64, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let e = &gallery()[k % gallery().len()];
        let (u, v) = entry_point(e, a, b);
        let q = ektau::arpair::ar_differential(&e.immersion.geometry(u, v).unwrap()).unwrap().norm();
        match e.qar_abs {
            Some(x) if x == 0.0 => prop_assert!(q <= 1e-6, "{} {q}", e.key),
            Some(x) => {
                prop_assert!(q >= 0.05, "{} {q}", e.key);
                prop_assert!((q - x).abs() <= 1e-6, "{} {q} vs {x}", e.key);
            }
            None => {}
        }
    }
}

fn plane() -> Immersion {
    Immersion::new(VerticalPlaneH2xR)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ar_locus_residual_is_parametrization_invariant(c1 in -1.0..1.0f64, c2 in -1.0..1.0f64, w in 0.0..0.9f64) {
        let c = CurveOnSurface::new(&plane(), (-1.0, 1.0), 17, move |s| [s, s * s * c1 + (s * 2.0).sin() * c2]);
        // t ↦ t + w sin(t)/2 is increasing and fixes ±π... rescale to keep the range
        let g = move |t: Dual<f64>| t + (t * std::f64::consts::PI).sin() * (w / (2.0 * std::f64::consts::PI));
        let r = c.reparametrized((-1.0, 1.0), g);
        let a = ar_locus_residual(&c).unwrap().table;
        let b = ar_locus_residual(&r).unwrap().table;
        let ts = r.parameters();
        for (k, t) in ts.iter().enumerate() {
            let s = g(Dual::constant(*t)).re;
            let direct = ektau::curvelab::ar_residual_at(&c.sample_at(s).unwrap());
            prop_assert!((direct - b.rows[k][1]).abs() <= 1e-8);
        }
        let flip = ar_locus_residual(&c.reversed()).unwrap().table;
        let n = a.rows.len();
        for k in 0..n {
            prop_assert!((a.rows[k][1] - flip.rows[n - 1 - k][1]).abs() <= 1e-12);
            prop_assert!((a.rows[k][1] - a.rows[k][2]).abs() <= 1e-10 * (1.0 + a.rows[k][1]));
        }
    }

    #[test]
    fn condition_b_forms_agree(beta in 0.1..3.0f64, wc in -0.8..0.8f64, eps in -0.05..0.05f64) {
        for ix in [
            scenarios::nil_fiber(beta, 11).unwrap(),
            scenarios::mirrored_caps(SpaceParams::h2xr(), 0.8, wc, 11).unwrap(),
            scenarios::example_pair(11).unwrap().with_rotated_normal(eps),
        ] {
            let cb = ektau::curvelab::condition_b(&ix);
            prop_assert!(cb.max_agreement <= 1e-8, "{}", cb.max_agreement);
        }
    }

    #[test]
    fn mutations_never_verify(k in 0usize..3, mag in 1e-3..1e-1f64, sign in prop::bool::ANY) {
        let name = ["nil-fiber", "mirrored-caps", "tangent-nil"][k];
        let eps = if sign { mag } else { -mag };
        let ix = scenarios::by_name(name, 21, Some(eps)).unwrap();
        let rep = key_lemma_verify(&ix);
        prop_assert!(matches!(rep.verdict, KeyLemmaVerdict::NotApplicable(_)), "{name} {eps} {:?}", rep.verdict);
    }
}

#[test]
fn sphere_meridians_are_symmetric_about_the_equator() {
    for (params, h) in [(SpaceParams::h2xr(), std::f64::consts::FRAC_1_SQRT_2), (SpaceParams::s2xr(), 1.0), (SpaceParams::euclidean(), 1.0)] {
        let p = Arc::new(meridian::rotational_cmc(params, h, Family::Sphere).unwrap());
        let (a, b) = p.range();
        let m = a.abs().min(b);
        let mut worst = 0.0f64;
        for k in 0..=200 {
            let w = -m + 2.0 * m * k as f64 / 200.0;
            worst = worst.max((p.height(w) + p.height(-w)).abs()).max((p.rho(w) - p.rho(-w)).abs());
        }
        assert!(worst <= 1e-8, "kappa={} worst={worst}", params.kappa);
    }
}
