//! Named surfaces with known geometry.

pub mod closed;
pub mod example;
pub mod inline;
pub mod meridian;
pub mod ode;

use std::sync::Arc;

use serde::Serialize;

use crate::ambient::SpaceParams;
use crate::error::{GeomError, Result};
use crate::surface::Immersion;
use closed::{EuclideanTorus, NilCylinder, NilUmbrella, Slice, VerticalCylinderH2xR, VerticalPlaneH2xR, VerticalPlaneNil3};
use meridian::Family;

/// Parameter rectangle `[u0, u1] × [v0, v1]`.
pub type Domain = ((f64, f64), (f64, f64));

/// A gallery surface with the facts known about it.
#[derive(Clone)]
pub struct GalleryEntry {
    pub key: String,
    pub immersion: Immersion,
    pub domain: Domain,
    /// Expected constant mean curvature, `None` if not CMC.
    pub mean: Option<f64>,
    /// Expected `|Q^AR|` where it is constant; `Some(0.0)` for AR surfaces.
    pub qar_abs: Option<f64>,
    /// Whether `Q^AR ≡ 0`.
    pub ar: bool,
    /// ODE-generated profile, if any.
    pub profile: Option<Arc<meridian::MeridianProfile>>,
}

#[derive(Serialize)]
pub struct EntrySummary {
    pub key: String,
    pub name: String,
    pub chart: &'static str,
    pub kappa: f64,
    pub tau: f64,
    pub domain: Domain,
    pub mean: Option<f64>,
    pub qar_abs: Option<f64>,
    pub ar: bool,
}

impl GalleryEntry {
    pub fn new(key: &str, immersion: Immersion, domain: Domain) -> Self {
        GalleryEntry { key: key.into(), immersion, domain, mean: None, qar_abs: None, ar: false, profile: None }
    }

    fn cmc(mut self, h: f64) -> Self {
        self.mean = Some(h);
        self
    }

    fn qar(mut self, q: f64) -> Self {
        self.qar_abs = Some(q);
        self.ar = q == 0.0;
        self
    }

    pub fn is_cmc(&self) -> bool {
        self.mean.is_some()
    }

    pub fn summary(&self) -> EntrySummary {
        let chart = self.immersion.chart();
        EntrySummary {
            key: self.key.clone(),
            name: self.immersion.name(),
            chart: chart.kind.name(),
            kappa: chart.params.kappa,
            tau: chart.params.tau,
            domain: self.domain,
            mean: self.mean,
            qar_abs: self.qar_abs,
            ar: self.ar,
        }
    }
}

pub fn slice(params: SpaceParams, height: f64) -> Result<GalleryEntry> {
    let d = if params.kappa < 0.0 { 0.8 } else { 1.0 };
    Ok(GalleryEntry::new("slice", Immersion::new(Slice::new(params, height)?), ((-d, d), (-d, d))).cmc(0.0).qar(0.0))
}

pub fn vertical_plane_h2xr() -> GalleryEntry {
    GalleryEntry::new("plane", Immersion::new(VerticalPlaneH2xR), ((-1.0, 1.0), (-1.0, 1.0))).cmc(0.0).qar(0.25)
}

pub fn vertical_plane_nil3(beta: f64) -> GalleryEntry {
    let p = VerticalPlaneNil3 { tau: 0.5, beta };
    GalleryEntry::new("nilplane", Immersion::new(p), ((-1.0, 1.0), (-1.0, 1.0))).cmc(0.0).qar(0.0)
}

pub fn vertical_cylinder_h2xr(kg: f64) -> Result<GalleryEntry> {
    let c = VerticalCylinderH2xR::new(kg)?;
    Ok(GalleryEntry::new("cyl", Immersion::new(c), ((-1.0, 1.0), (-1.0, 1.0)))
        .cmc(0.5 * kg)
        .qar(((kg * kg - 1.0) / 4.0).abs()))
}

/// The cylinder moved off the origin and written in the Cartan chart.
pub fn vertical_cylinder_cartan(kg: f64, boost: f64) -> Result<GalleryEntry> {
    let c = VerticalCylinderH2xR::new(kg)?.in_cartan(boost);
    Ok(GalleryEntry::new("cyl-cartan", Immersion::new(c), ((-1.0, 1.0), (-1.0, 1.0)))
        .cmc(0.5 * kg)
        .qar(((kg * kg - 1.0) / 4.0).abs()))
}

pub fn nil_cylinder(radius: f64) -> GalleryEntry {
    let c = NilCylinder { tau: 0.5, radius };
    GalleryEntry::new("nilcyl", Immersion::new(c), ((-1.0, 1.0), (-1.0, 1.0))).cmc(0.5 / radius).qar(0.25 / (radius * radius))
}

pub fn nil_umbrella() -> GalleryEntry {
    GalleryEntry::new("umbrella", Immersion::new(NilUmbrella { tau: 0.5 }), ((-2.5, -1.5), (0.0, 1.0))).cmc(0.0).qar(0.0)
}

pub fn euclidean_torus() -> GalleryEntry {
    GalleryEntry::new("torus", Immersion::new(EuclideanTorus { big: 2.0, small: 1.0 }), ((-1.0, 1.0), (0.0, 1.0)))
}

/// The worked-example sphere in its conformal parameter.
pub fn example_sphere() -> GalleryEntry {
    let d = example::conformal_w(1.0 - example::POLE_MARGIN);
    GalleryEntry::new("example-sphere", Immersion::new(example::ConformalExampleSphere), ((-d, d), (0.0, 1.0)))
        .cmc(std::f64::consts::FRAC_1_SQRT_2)
        .qar(0.0)
}

/// Surface swept by an ODE-generated profile.
pub fn rotational_cmc(params: SpaceParams, h: f64, family: Family) -> Result<GalleryEntry> {
    let p = Arc::new(meridian::rotational_cmc(params, h, family)?);
    let (a, b) = p.range();
    let dom = match family {
        Family::Sphere => (-1.0, 1.0),
        Family::Bumped => (-0.8, 0.8),
        Family::DiskType => (-1.5, -0.5),
        Family::Catenoidal | Family::Parabolic => (-0.3, 0.3),
    };
    debug_assert!(a < dom.0 && dom.1 < b);
    let key = match family {
        Family::Sphere => "rotsphere",
        Family::DiskType => "disk",
        Family::Catenoidal => "catenoid",
        Family::Parabolic => "parabolic",
        Family::Bumped => "bumped",
    };
    let v = if family == Family::Parabolic { (-0.5, 0.5) } else { (0.0, 1.0) };
    let mut e = GalleryEntry::new(key, p.immersion(), (dom, v));
    if family != Family::Bumped {
        e = e.cmc(h).qar(0.0);
    }
    e.profile = Some(p);
    Ok(e)
}

/// Options for [`by_name`].
#[derive(Clone, Copy, Debug)]
pub struct Selection {
    pub kappa: Option<f64>,
    pub tau: Option<f64>,
    pub mean: Option<f64>,
    pub kg: Option<f64>,
}

impl Default for Selection {
    fn default() -> Self {
        Selection { kappa: None, tau: None, mean: None, kg: None }
    }
}

pub const NAMES: &[&str] = &[
    "slice",
    "plane",
    "nilplane",
    "cyl",
    "cyl-cartan",
    "nilcyl",
    "umbrella",
    "torus",
    "example-sphere",
    "rotsphere",
    "disk",
    "catenoid",
    "parabolic",
    "bumped",
];

/// Looks a surface up by key, filling unspecified parameters with the
/// defaults of the catalog.
pub fn by_name(name: &str, sel: &Selection) -> Result<GalleryEntry> {
    let kappa = sel.kappa.unwrap_or(-1.0);
    let tau = sel.tau.unwrap_or(0.0);
    let product = || SpaceParams::new(kappa, tau);
    let mut e = match name {
        "slice" => slice(product()?, 0.0)?,
        "plane" => vertical_plane_h2xr(),
        "nilplane" => vertical_plane_nil3(0.0),
        "cyl" => vertical_cylinder_h2xr(sel.kg.unwrap_or(1.0))?,
        "cyl-cartan" => vertical_cylinder_cartan(sel.kg.unwrap_or(2.0), 0.4)?,
        "nilcyl" => nil_cylinder(1.0),
        "umbrella" => nil_umbrella(),
        "torus" => euclidean_torus(),
        "example-sphere" => example_sphere(),
        "rotsphere" => rotational_cmc(product()?, sel.mean.unwrap_or(std::f64::consts::FRAC_1_SQRT_2), Family::Sphere)?,
        "disk" => rotational_cmc(product()?, sel.mean.unwrap_or(0.3), Family::DiskType)?,
        "catenoid" => rotational_cmc(product()?, sel.mean.unwrap_or(0.3), Family::Catenoidal)?,
        "parabolic" => rotational_cmc(product()?, sel.mean.unwrap_or(0.3), Family::Parabolic)?,
        "bumped" => rotational_cmc(product()?, sel.mean.unwrap_or(0.8), Family::Bumped)?,
        _ => {
            return Err(GeomError::Spec(format!("unknown gallery surface '{name}'; known: {}", NAMES.join(", "))));
        }
    };
    e.key = name.into();
    Ok(e)
}

/// The default instance of every catalog surface plus the extra cylinder
/// and sphere parameters used in the checks.
pub fn catalog() -> Result<Vec<GalleryEntry>> {
    let mut out = Vec::new();
    for &n in NAMES {
        out.push(by_name(n, &Selection::default())?);
    }
    out.push(slice(SpaceParams::s2xr(), 0.5)?);
    out.push(slice(SpaceParams::euclidean(), 0.0)?);
    for kg in [0.5, 2.0] {
        out.push(vertical_cylinder_h2xr(kg)?);
    }
    out.push(vertical_plane_nil3(0.7));
    out.push(rotational_cmc(SpaceParams::s2xr(), 1.0, Family::Sphere)?);
    out.push(rotational_cmc(SpaceParams::euclidean(), 1.0, Family::Sphere)?);
    Ok(out)
}
