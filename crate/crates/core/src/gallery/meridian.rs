//! Profile curves of invariant CMC surfaces in M²(κ)×ℝ.
//!
//! The ambient is written as the warped product `dρ² + f(ρ)² dφ² + dz²`
//! with `f = sn_κ` (rotations) or `f = e^{−ρ}` (parabolic translations of
//! H²). A profile `(ρ(w), h(w))` swept along φ is conformal in `(w, φ)` iff
//! `ρ_w = f cos ψ`, `h_w = f sin ψ`, and has mean curvature `H` iff
//! `ψ_w = 2H f − f′ sin ψ`. The fourth state component is arc length.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::ode::{hermite5, integrate, OdeOptions, State};
use crate::ambient::{AmbientChart, SpaceParams};
use crate::arpair::ar_differential;
use crate::error::{GeomError, Result};
use crate::real::Real;
use crate::report::Table;
use crate::surface::{Immersion, Parametrization};

/// Series start offset from the axis.
pub const AXIS_STEP: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum Family {
    /// S²_H: closed rotational sphere.
    Sphere,
    /// D²_H: rotational entire graph through the axis.
    DiskType,
    /// C²_H: rotational annulus with a neck.
    Catenoidal,
    /// P²_H: invariant under parabolic translations of H².
    Parabolic,
    /// Not an AR family member: mean curvature with a bump.
    Bumped,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Sphere => "S2_H",
            Family::DiskType => "D2_H",
            Family::Catenoidal => "C2_H",
            Family::Parabolic => "P2_H",
            Family::Bumped => "bumped",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" | "s2_h" | "s2h" => Some(Family::Sphere),
            "disk" | "disktype" | "d2_h" | "d2h" => Some(Family::DiskType),
            "catenoidal" | "c2_h" | "c2h" => Some(Family::Catenoidal),
            "parabolic" | "p2_h" | "p2h" => Some(Family::Parabolic),
            "bumped" => Some(Family::Bumped),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Warp {
    Polar,
    Horocyclic,
}

/// Prescribed mean curvature along the profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeanCurvature {
    Constant(f64),
    /// `H0 + ε·exp(−((w − center)/width)²)`.
    Bump { h0: f64, eps: f64, center: f64, width: f64 },
}

impl MeanCurvature {
    fn value(&self, w: f64) -> (f64, f64) {
        match *self {
            MeanCurvature::Constant(h) => (h, 0.0),
            MeanCurvature::Bump { h0, eps, center, width } => {
                let x = (w - center) / width;
                let b = (-x * x).exp();
                (h0 + eps * b, -2.0 * x * eps * b / width)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct MeridianProfile {
    pub family: Family,
    pub params: SpaceParams,
    pub h_target: f64,
    pub warp: Warp,
    pub mean: MeanCurvature,
    knots: Vec<f64>,
    states: Vec<State>,
    d1: Vec<State>,
    d2: Vec<State>,
}

struct Rhs {
    params: SpaceParams,
    warp: Warp,
    mean: MeanCurvature,
}

impl Rhs {
    /// `(f, f′, f″)` at ρ.
    fn warp(&self, rho: f64) -> [f64; 3] {
        match self.warp {
            Warp::Polar => {
                let k = self.params.kappa;
                let f = self.params.sn(rho);
                let fp = self.params.cn(rho);
                [f, fp, -k * f]
            }
            Warp::Horocyclic => {
                let e = (-rho).exp();
                [e, -e, e]
            }
        }
    }

    fn first(&self, w: f64, y: &State) -> State {
        let [f, fp, _] = self.warp(y[0]);
        let (h, _) = self.mean.value(w);
        let (s, c) = y[2].sin_cos();
        [f * c, f * s, 2.0 * h * f - fp * s, f]
    }

    fn second(&self, w: f64, y: &State) -> State {
        let [f, fp, fpp] = self.warp(y[0]);
        let (h, hp) = self.mean.value(w);
        let d = self.first(w, y);
        let (s, c) = y[2].sin_cos();
        let (rw, pw) = (d[0], d[2]);
        [
            fp * rw * c - f * s * pw,
            fp * rw * s + f * c * pw,
            2.0 * hp * f + 2.0 * h * fp * rw - fpp * rw * s - fp * c * pw,
            fp * rw,
        ]
    }
}

impl MeridianProfile {
    fn assemble(family: Family, params: SpaceParams, warp: Warp, mean: MeanCurvature, h_target: f64, mut knots: Vec<(f64, State)>) -> Self {
        knots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        knots.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15);
        let rhs = Rhs { params, warp, mean };
        let d1 = knots.iter().map(|(w, y)| rhs.first(*w, y)).collect();
        let d2 = knots.iter().map(|(w, y)| rhs.second(*w, y)).collect();
        MeridianProfile {
            family,
            params,
            h_target,
            warp,
            mean,
            knots: knots.iter().map(|k| k.0).collect(),
            states: knots.iter().map(|k| k.1).collect(),
            d1,
            d2,
        }
    }

    pub fn range(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn knot_states(&self) -> &[State] {
        &self.states
    }

    /// `(value, d/dw, d²/dw²)` of state component `k` at `w`; NaN outside
    /// the integrated range.
    pub fn component(&self, k: usize, w: f64) -> [f64; 3] {
        let (a, b) = self.range();
        if !(w >= a && w <= b) {
            return [f64::NAN; 3];
        }
        let i = match self.knots.binary_search_by(|x| x.partial_cmp(&w).unwrap()) {
            Ok(i) => return [self.states[i][k], self.d1[i][k], self.d2[i][k]],
            Err(i) => i - 1,
        };
        hermite5(
            self.knots[i],
            self.knots[i + 1],
            [self.states[i][k], self.d1[i][k], self.d2[i][k]],
            [self.states[i + 1][k], self.d1[i + 1][k], self.d2[i + 1][k]],
            w,
        )
    }

    pub fn state(&self, w: f64) -> State {
        [0, 1, 2, 3].map(|k| self.component(k, w)[0])
    }

    pub fn rho<S: Real>(&self, w: S) -> S {
        w.chain(&self.component(0, w.value()))
    }

    pub fn height<S: Real>(&self, w: S) -> S {
        w.chain(&self.component(1, w.value()))
    }

    /// Parameter where the profile angle crosses `target`, if it does.
    pub fn angle_crossing(&self, target: f64) -> Option<f64> {
        let i = (0..self.knots.len() - 1)
            .find(|&i| (self.states[i][2] - target) * (self.states[i + 1][2] - target) <= 0.0)?;
        let (mut a, mut b) = (self.knots[i], self.knots[i + 1]);
        let g = |w: f64| self.component(2, w)[0] - target;
        let ga = g(a);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if (g(m) > 0.0) == (ga > 0.0) {
                a = m;
            } else {
                b = m;
            }
        }
        Some(0.5 * (a + b))
    }

    /// Shifts `w` and `h` so that the knot at `w_new0` becomes `w = 0`
    /// and its height `0`.
    fn recenter(&mut self, w_c: f64) {
        let h_c = self.component(1, w_c)[0];
        for w in &mut self.knots {
            *w -= w_c;
        }
        for y in &mut self.states {
            y[1] -= h_c;
        }
        if let MeanCurvature::Bump { ref mut center, .. } = self.mean {
            *center -= w_c;
        }
    }

    /// The revolution (or parabolic) surface in conformal coordinates
    /// `(w, φ)`.
    pub fn immersion(self: &Arc<Self>) -> Immersion {
        Immersion::new(ProfileSurface { profile: self.clone(), mirror: None })
    }

    /// Reflection of the surface in the slice `z = z0`, reparametrized by
    /// `w ↦ −w` so that H keeps its sign.
    pub fn mirrored(self: &Arc<Self>, z0: f64) -> Immersion {
        Immersion::new(ProfileSurface { profile: self.clone(), mirror: Some(z0) })
    }

    pub fn chart(&self) -> AmbientChart {
        match self.warp {
            Warp::Polar => AmbientChart { params: self.params, kind: crate::ambient::ChartKind::PolarProduct },
            Warp::Horocyclic => AmbientChart::hyperboloid(),
        }
    }
}

/// Surface swept by a profile.
pub struct ProfileSurface {
    pub profile: Arc<MeridianProfile>,
    pub mirror: Option<f64>,
}

impl Parametrization for ProfileSurface {
    fn chart(&self) -> AmbientChart {
        self.profile.chart()
    }

    fn eval<S: Real>(&self, w: S, phi: S) -> [S; 4] {
        let (w, flip) = match self.mirror {
            Some(z0) => (-w, Some(z0)),
            None => (w, None),
        };
        let rho = self.profile.rho(w);
        let mut h = self.profile.height(w);
        if let Some(z0) = flip {
            h = -h + 2.0 * z0;
        }
        match self.profile.warp {
            Warp::Polar => [rho, phi, h, S::cst(0.0)],
            Warp::Horocyclic => {
                // upper half-plane point (φ, e^ρ) mapped to the hyperboloid
                let y = rho.exp();
                let r2 = phi * phi + y * y;
                [(r2 + 1.0) / (y * 2.0), phi / y, (-r2 + 1.0) / (y * 2.0), h]
            }
        }
    }

    fn name(&self) -> String {
        let p = &self.profile;
        let m = if self.mirror.is_some() { " mirrored" } else { "" };
        format!("{}{} (kappa={}, H={})", p.family.tag(), m, p.params.kappa, p.h_target)
    }
}

fn admissible(params: &SpaceParams, h: f64, family: Family) -> Result<()> {
    let k = params.kappa;
    let bad = |why: &str| Err(GeomError::Params(format!("{} with kappa={k}, H={h}: {why}", family.tag())));
    if params.tau != 0.0 {
        return bad("profile generation needs tau = 0");
    }
    match family {
        Family::Sphere if !(4.0 * h * h + k > 0.0 && h > 0.0) => bad("needs H > 0 and 4H^2 + kappa > 0"),
        Family::DiskType if !(k < 0.0 && h >= 0.0 && 4.0 * h * h + k < 0.0) => {
            bad("needs kappa < 0 and 0 <= H < sqrt(-kappa)/2")
        }
        Family::Catenoidal if !(k < 0.0 && h > 0.0 && 4.0 * h * h + k < 0.0) => {
            bad("needs kappa < 0 and 0 < H < sqrt(-kappa)/2")
        }
        Family::Parabolic if !(k == -1.0 && (0.0..0.5).contains(&h)) => bad("needs kappa = -1 and 0 <= H < 1/2"),
        _ => Ok(()),
    }
}

/// Generates the profile of the requested family and self-checks it.
pub fn rotational_cmc(params: SpaceParams, h: f64, family: Family) -> Result<MeridianProfile> {
    admissible(&params, h, family)?;
    match family {
        Family::Sphere => from_axis(params, MeanCurvature::Constant(h), family, 40.0, 200.0),
        Family::DiskType => from_axis(params, MeanCurvature::Constant(h), family, 4.0, 200.0),
        Family::Catenoidal => catenoidal(params, h),
        Family::Parabolic => parabolic(h),
        Family::Bumped => bumped(params, h, 0.1),
    }
}

/// Series start at the axis (umbilic), integrated outward. Spheres stop
/// when the profile returns to the axis; disks when `ρ` reaches `rho_max`.
fn from_axis(params: SpaceParams, mean: MeanCurvature, family: Family, rho_max: f64, span: f64) -> Result<MeridianProfile> {
    let (h, _) = mean.value(f64::NEG_INFINITY);
    let k = params.kappa;
    let r = AXIS_STEP;
    let a = h * (k + 2.0 * h * h) / 12.0;
    let psi = h * r + a * r.powi(3);
    let z = 0.5 * h * r * r + 0.25 * (a + h.powi(3) / 3.0) * r.powi(4);
    let w0 = r.ln() + (k / 12.0 + h * h / 4.0) * r * r;
    let s0 = r + h * h * r.powi(3) / 6.0;
    let rhs = Rhs { params, warp: Warp::Polar, mean };
    let opt = OdeOptions::default();
    let closing = family == Family::Sphere;
    let knots = integrate(
        |w, y| rhs.first(w, y),
        w0,
        [r, z, psi, s0],
        1.0,
        span,
        |_, y| if closing { y[2] > 1.5 && y[0] < 1e-7 } else { y[0] > rho_max },
        &opt,
    )?;
    let last = knots.last().unwrap().1;
    if closing && !(last[0] < 1e-6) {
        return Err(GeomError::Numeric(format!("sphere profile did not close: final rho = {}", last[0])));
    }
    let mut p = MeridianProfile::assemble(family, params, Warp::Polar, mean, h, knots);
    if closing {
        let eq = p
            .angle_crossing(std::f64::consts::FRAC_PI_2)
            .ok_or_else(|| GeomError::Numeric("sphere profile never becomes vertical".into()))?;
        p.recenter(eq);
    }
    Ok(p)
}

/// Neck radius where `Q^AR` vanishes for a vertical profile tangent:
/// `f′/f = (4H² − κ)/(4H)`.
pub fn catenoid_neck(params: &SpaceParams, h: f64) -> Result<f64> {
    let k = params.kappa;
    let c = (4.0 * h * h - k) / (4.0 * h);
    if k < 0.0 {
        let s = (-k).sqrt();
        let q = c / s;
        if q <= 1.0 {
            return Err(GeomError::Params(format!("no neck for H={h}, kappa={k}")));
        }
        Ok((1.0 / q).atanh() / s)
    } else if k > 0.0 {
        let s = k.sqrt();
        Ok((s / c).atan().rem_euclid(std::f64::consts::PI) / s)
    } else {
        Ok(1.0 / c)
    }
}

fn catenoidal(params: SpaceParams, h: f64) -> Result<MeridianProfile> {
    let rho0 = catenoid_neck(&params, h)?;
    let mean = MeanCurvature::Constant(h);
    let rhs = Rhs { params, warp: Warp::Polar, mean };
    let opt = OdeOptions::default();
    let y0 = [rho0, 0.0, std::f64::consts::FRAC_PI_2, 0.0];
    let stop = |_: f64, y: &State| y[0] > rho0 + 2.5;
    let mut knots = integrate(|w, y| rhs.first(w, y), 0.0, y0, 1.0, 6.0, stop, &opt)?;
    let back = integrate(|w, y| rhs.first(w, y), 0.0, y0, -1.0, 6.0, stop, &opt)?;
    knots.extend(back.into_iter().skip(1));
    Ok(MeridianProfile::assemble(Family::Catenoidal, params, Warp::Polar, mean, h, knots))
}

fn parabolic(h: f64) -> Result<MeridianProfile> {
    let params = SpaceParams::h2xr();
    let psi = -(2.0 * h).asin();
    let mean = MeanCurvature::Constant(h);
    let rhs = Rhs { params, warp: Warp::Horocyclic, mean };
    let opt = OdeOptions::default();
    let y0 = [0.0, 0.0, psi, 0.0];
    let stop = |_: f64, y: &State| !(-1.5..=1.5).contains(&y[0]);
    let mut knots = integrate(|w, y| rhs.first(w, y), 0.0, y0, 1.0, 3.0, stop, &opt)?;
    let back = integrate(|w, y| rhs.first(w, y), 0.0, y0, -1.0, 3.0, stop, &opt)?;
    knots.extend(back.into_iter().skip(1));
    Ok(MeridianProfile::assemble(Family::Parabolic, params, Warp::Horocyclic, mean, h, knots))
}

/// Sphere-like profile whose mean curvature carries a Gaussian bump of
/// height `eps` centred half-way between pole and equator.
pub fn bumped(params: SpaceParams, h0: f64, eps: f64) -> Result<MeridianProfile> {
    admissible(&params, h0, Family::Sphere)?;
    let base = from_axis(params, MeanCurvature::Constant(h0), Family::Sphere, 40.0, 200.0)?;
    // place the bump where the unperturbed profile has ψ = π/4
    let w_raw = base.angle_crossing(std::f64::consts::FRAC_PI_4).unwrap_or(0.0);
    let shift = {
        // undo the recentering applied to `base`
        let r = AXIS_STEP;
        let k = params.kappa;
        r.ln() + (k / 12.0 + h0 * h0 / 4.0) * r * r - base.range().0
    };
    let center = w_raw + shift;
    let mean = MeanCurvature::Bump { h0, eps, center, width: 0.3 };
    let w0 = base.range().0 + shift;
    let mut p = from_axis(params, mean, Family::Bumped, 40.0, center + 1.5 - w0)?;
    p.h_target = h0;
    let c = match p.mean {
        MeanCurvature::Bump { center, .. } => center,
        _ => 0.0,
    };
    p.recenter(c);
    Ok(p)
}

/// Point on the closed-form meridian `α ↦ (2 asinh(sin α), −2√2 asin(cos α/√2))`
/// of the H = 1/√2 sphere of H²×ℝ, with first and second α-derivatives.
fn closed_sphere_point(a: f64) -> [[f64; 2]; 3] {
    let (s, c) = a.sin_cos();
    let k = 2.0f64.sqrt();
    let rho = 2.0 * s.asinh();
    let q = 1.0 + s * s;
    let rho1 = 2.0 * c / q.sqrt();
    let rho2 = -2.0 * s / q.sqrt() - 2.0 * c * c * s / q.powf(1.5);
    let m = 1.0 - c * c / 2.0;
    let h = -2.0 * k * (c / k).asin();
    let h1 = 2.0 * s / m.sqrt();
    let h2 = 2.0 * c / m.sqrt() - s * s * c / m.powf(1.5);
    [[rho, h], [rho1, h1], [rho2, h2]]
}

/// Distance from `(ρ, h)` to the closed-form meridian, by Newton on the
/// curve parameter.
pub fn distance_to_closed_sphere(rho: f64, h: f64) -> f64 {
    let k = 2.0f64.sqrt();
    let mut a = ((-h / (2.0 * k)).sin() * k).clamp(-1.0, 1.0).acos();
    for _ in 0..50 {
        let [p, d, dd] = closed_sphere_point(a);
        let (ex, ey) = (p[0] - rho, p[1] - h);
        let g = ex * d[0] + ey * d[1];
        let gp = d[0] * d[0] + d[1] * d[1] + ex * dd[0] + ey * dd[1];
        let step = g / gp;
        a = (a - step).clamp(0.0, std::f64::consts::PI);
        if step.abs() < 1e-15 {
            break;
        }
    }
    let [p, _, _] = closed_sphere_point(a);
    ((p[0] - rho).powi(2) + (p[1] - h).powi(2)).sqrt()
}

/// Profile samples closer than this to the axis are left out of exports.
pub const EXPORT_MIN_RHO: f64 = 1e-2;

#[derive(Clone, Debug, Serialize)]
pub struct ProfileSummary {
    pub family: &'static str,
    pub kappa: f64,
    pub h_target: f64,
    pub w_range: (f64, f64),
    pub samples: usize,
    pub max_h_error: f64,
    pub max_qar: f64,
    /// Spheres only: whether the far end reaches the axis with a
    /// horizontal tangent.
    pub closes: Option<bool>,
    pub min_gauss: f64,
    pub negative_gauss_somewhere: bool,
    /// Families generated without a reference formula.
    pub reconstruction: bool,
}

#[derive(Clone, Debug)]
pub struct ProfileReport {
    /// Columns `s, rho, h, H_measured, QAR_abs`.
    pub table: Table,
    pub summary: ProfileSummary,
}

/// Samples the profile at `n` parameters and measures `H` and `|Q^AR|` on
/// the swept surface.
pub fn profile_table(profile: &Arc<MeridianProfile>, n: usize) -> Result<ProfileReport> {
    let ks = profile.knots();
    let st = profile.knot_states();
    let usable: Vec<f64> =
        ks.iter().zip(st).filter(|(_, y)| profile.warp == Warp::Horocyclic || y[0] >= EXPORT_MIN_RHO).map(|(w, _)| *w).collect();
    let (a, b) = match (usable.first(), usable.last()) {
        (Some(&a), Some(&b)) if b > a => (a, b),
        _ => return Err(GeomError::Numeric("profile has no samples away from the axis".into())),
    };
    let m = n.max(2);
    let im = profile.immersion();
    let rows: Vec<(Vec<f64>, f64)> = (0..m)
        .into_par_iter()
        .map(|k| {
            let w = (a + (b - a) * k as f64 / (m - 1) as f64).min(b);
            let y = profile.state(w);
            let g = im.geometry(w, 0.0)?;
            let q = ar_differential(&g)?.norm();
            Ok((vec![y[3], y[0], y[1], g.mean, q], g.gauss_extrinsic_side()))
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(&["s", "rho", "h", "H_measured", "QAR_abs"]);
    let mut min_gauss = f64::INFINITY;
    let mut max_h_error = 0.0f64;
    let mut max_qar = 0.0f64;
    for (r, k) in rows {
        max_h_error = max_h_error.max((r[3] - profile.h_target).abs());
        max_qar = max_qar.max(r[4]);
        min_gauss = min_gauss.min(k);
        table.push(r);
    }
    if profile.family == Family::Bumped {
        max_h_error = f64::NAN;
    }
    let closes = (profile.family == Family::Sphere).then(|| {
        let end = st[st.len() - 1];
        end[0] <= 1e-6 && (end[2] - std::f64::consts::PI).abs() <= 1e-3
    });
    let summary = ProfileSummary {
        family: profile.family.tag(),
        kappa: profile.params.kappa,
        h_target: profile.h_target,
        w_range: (a, b),
        samples: m,
        max_h_error,
        max_qar,
        closes,
        min_gauss,
        negative_gauss_somewhere: min_gauss < 0.0,
        reconstruction: matches!(profile.family, Family::DiskType | Family::Parabolic),
    };
    Ok(ProfileReport { table, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_meridian_parametrizations_agree() {
        // r(u) = 2 asinh(√(1−u²)), h(u) = 2√2 asin(u/√2), u = cos α
        for &u in &[-0.9, -0.3, 0.0, 0.5, 0.95] {
            let r = 2.0 * (1.0 - u * u as f64).sqrt().asinh();
            let h = 4.0 / 2.0f64.sqrt() * (u / 2.0f64.sqrt()).asin();
            assert!(distance_to_closed_sphere(r, h) < 1e-12, "u={u}");
        }
        assert!(distance_to_closed_sphere(1.0, 0.0) > 0.1);
    }

    #[test]
    fn neck_closed_form_for_hyperbolic_case() {
        let rho = catenoid_neck(&SpaceParams::h2xr(), 0.3).unwrap();
        assert!((1.0 / rho.tanh() - (4.0 * 0.09 + 1.0) / 1.2).abs() < 1e-12);
        assert!((rho - 1.386).abs() < 1e-3);
    }

    #[test]
    fn inadmissible_families_are_rejected() {
        let h2 = SpaceParams::h2xr();
        assert!(rotational_cmc(h2, 0.3, Family::Sphere).is_err());
        assert!(rotational_cmc(h2, 0.8, Family::Catenoidal).is_err());
        assert!(rotational_cmc(SpaceParams::nil3(), 0.8, Family::Sphere).is_err());
    }
}
