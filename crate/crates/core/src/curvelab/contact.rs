//! Two H-surfaces meeting along a shared curve.

use rayon::prelude::*;
use serde::Serialize;

use super::{ar_residual_at, CurveOnSurface};
use crate::ambient::{AmbientChart, ChartKind, Vec4};
use crate::arpair::phase;
use crate::error::{GeomError, Result};
use crate::report::Table;

/// Ambient traces of the two sides must agree to this.
pub const TRACE_TOL: f64 = 1e-8;
/// `|d| ≥ 1 − TANGENCY_TOL` counts as tangential contact.
pub const TANGENCY_TOL: f64 = 1e-8;
/// Largest spread of `d` accepted as a constant angle.
pub const ANGLE_TOL: f64 = 1e-7;
/// Precondition tolerance of the Key Lemma.
pub const PRE_TOL: f64 = 1e-6;
/// Conclusion tolerance of the Key Lemma.
pub const POST_TOL: f64 = 1e-5;
/// Tolerance of the corollary configurations.
pub const CONFIG_TOL: f64 = 1e-8;

/// Pointwise data of an intersection, shared by every check.
#[derive(Clone, Debug)]
pub struct ContactSample {
    pub s: f64,
    pub p: Vec4,
    /// Unit tangent of the curve.
    pub velocity: Vec4,
    pub normal: [Vec4; 2],
    pub mean: [f64; 2],
    /// AR-locus residual of the curve on each side.
    pub ar_residual: [f64; 2],
}

/// A curve lying on two surfaces, sampled at common parameters.
#[derive(Clone, Debug)]
pub struct IntersectionData {
    pub chart: AmbientChart,
    pub labels: [String; 2],
    pub samples: Vec<ContactSample>,
    /// `d = ⟨N₁, N₂⟩` per sample.
    pub d: Vec<f64>,
    pub transversal: bool,
}

fn same_chart(a: &AmbientChart, b: &AmbientChart) -> bool {
    a.kind == b.kind && a.params == b.params
}

/// Distance between two chart points, modulo the angular period of the
/// polar chart.
pub fn chart_gap(chart: &AmbientChart, a: &Vec4, b: &Vec4) -> f64 {
    let mut d = a - b;
    if chart.kind == ChartKind::PolarProduct {
        let tau = std::f64::consts::TAU;
        d[1] -= tau * (d[1] / tau).round();
    }
    d.norm()
}

impl IntersectionData {
    pub fn new(first: &CurveOnSurface, second: &CurveOnSurface) -> Result<Self> {
        let chart = first.surface.chart();
        if !same_chart(&chart, &second.surface.chart()) {
            return Err(GeomError::Spec("the two surfaces must be written in the same ambient chart".into()));
        }
        if first.samples != second.samples || first.range != second.range {
            return Err(GeomError::Spec("the two curves must share parameter range and sample count".into()));
        }
        let s1 = first.sample()?;
        let s2 = second.sample()?;
        let samples = s1
            .par_iter()
            .zip(&s2)
            .enumerate()
            .map(|(index, (a, b))| {
                let gap = chart_gap(&chart, &a.geometry.p, &b.geometry.p);
                if !(gap <= TRACE_TOL) {
                    return Err(GeomError::TraceMismatch { index, gap });
                }
                let p = a.geometry.p;
                Ok(ContactSample {
                    s: a.s,
                    p,
                    velocity: a.velocity / chart.norm(&p, &a.velocity),
                    normal: [a.geometry.normal, b.geometry.normal],
                    mean: [a.geometry.mean, b.geometry.mean],
                    ar_residual: [ar_residual_at(a), ar_residual_at(b)],
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::assemble(chart, [first.label.clone(), second.label.clone()], samples))
    }

    fn assemble(chart: AmbientChart, labels: [String; 2], samples: Vec<ContactSample>) -> Self {
        let d: Vec<f64> = samples.iter().map(|c| chart.inner(&c.p, &c.normal[0], &c.normal[1])).collect();
        let transversal = d.iter().all(|x| x.abs() < 1.0 - TANGENCY_TOL);
        IntersectionData { chart, labels, samples, d, transversal }
    }

    pub fn tau(&self) -> f64 {
        self.chart.params.tau
    }

    pub fn is_tangential(&self, k: usize) -> bool {
        self.d[k].abs() >= 1.0 - TANGENCY_TOL
    }

    /// Rotates the second normal about the curve tangent by `eps·r`, `r`
    /// running linearly from −1 to 1 along the samples. Stored AR-locus
    /// residuals are kept.
    pub fn with_rotated_normal(&self, eps: f64) -> Self {
        let n = self.samples.len();
        let samples = self
            .samples
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let r = if n > 1 { -1.0 + 2.0 * k as f64 / (n - 1) as f64 } else { 0.0 };
                let (sa, ca) = (eps * r).sin_cos();
                let nn = c.normal[1];
                let side = self.chart.cross_raw(&c.p, &c.velocity, &nn);
                let mut out = c.clone();
                out.normal[1] = nn * ca + side * sa;
                out
            })
            .collect();
        Self::assemble(self.chart, self.labels.clone(), samples)
    }

    /// Side data `(ν, T, J)` at sample `k`, side `i`.
    fn frame(&self, k: usize, i: usize) -> SideFrame {
        let c = &self.samples[k];
        let n = c.normal[i];
        let xi = self.chart.vertical_raw();
        let nu = self.chart.inner(&c.p, &n, &xi);
        SideFrame { p: c.p, n, nu, t: xi - n * nu, h: c.mean[i] }
    }
}

struct SideFrame {
    p: Vec4,
    n: Vec4,
    nu: f64,
    t: Vec4,
    h: f64,
}

impl SideFrame {
    fn rot(&self, chart: &AmbientChart, x: &Vec4) -> Vec4 {
        chart.cross_raw(&self.p, &self.n, x)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AngleReport {
    pub d: Vec<f64>,
    pub spread: f64,
    pub is_constant: bool,
}

/// Contact angle `d = ⟨N₁, N₂⟩` and whether it is constant.
pub fn intersection_angle(ix: &IntersectionData) -> AngleReport {
    let lo = ix.d.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ix.d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    AngleReport { d: ix.d.clone(), spread, is_constant: spread <= ANGLE_TOL }
}

/// Condition b evaluated twice, from inner products and from angles.
#[derive(Clone, Debug)]
pub struct ConditionB {
    /// Columns `s, lhs, rhs, residual, angle_residual, agreement`;
    /// NaN on excluded samples.
    pub table: Table,
    pub excluded: Vec<usize>,
    pub warnings: Vec<String>,
    pub max_residual: f64,
    pub max_agreement: f64,
}

/// `√(H₁²+τ²)⟨T²_θ, N₁⟩⟨J₂T²_θ, N₁⟩ − √(H₂²+τ²)⟨T¹_θ, N₂⟩⟨J₁T¹_θ, N₂⟩`
/// per transversal sample, with the angle form
/// `½(1−d²)|Tᵢ|² sin 2(ωᵢⱼ − θᵢ)` for each product.
pub fn condition_b(ix: &IntersectionData) -> ConditionB {
    let tau = ix.tau();
    let chart = &ix.chart;
    let mut table = Table::new(&["s", "lhs", "rhs", "residual", "angle_residual", "agreement"]);
    let mut excluded = Vec::new();
    let (mut max_residual, mut max_agreement) = (0.0f64, 0.0f64);
    for k in 0..ix.samples.len() {
        let s = ix.samples[k].s;
        if ix.is_tangential(k) {
            excluded.push(k);
            table.push(vec![s, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN]);
            continue;
        }
        let d = ix.d[k];
        let sides = [ix.frame(k, 0), ix.frame(k, 1)];
        let mut inner = [0.0; 2];
        let mut angle = [0.0; 2];
        let mut agree = 0.0f64;
        for i in 0..2 {
            let (me, other) = (&sides[i], &sides[1 - i]);
            let ip = |a: &Vec4, b: &Vec4| chart.inner(&me.p, a, b);
            let th = phase(me.h, tau);
            let jt = me.rot(chart, &me.t);
            let t_th = me.t * th.cos() + jt * th.sin();
            let jt_th = me.rot(chart, &t_th);
            inner[i] = ip(&t_th, &other.n) * ip(&jt_th, &other.n);
            let x = other.n - me.n * d;
            let t2 = ip(&me.t, &me.t);
            let omega = ip(&jt, &x).atan2(ip(&me.t, &x));
            angle[i] = 0.5 * (1.0 - d * d) * t2 * (2.0 * (omega - th)).sin();
            if t2.sqrt() > 1e-6 {
                agree = agree.max((inner[i] - angle[i]).abs());
            }
        }
        let w = [sides[0].h.hypot(tau), sides[1].h.hypot(tau)];
        let lhs = w[0] * inner[1];
        let rhs = w[1] * inner[0];
        let residual = (lhs - rhs).abs();
        let angle_residual = (w[0] * angle[1] - w[1] * angle[0]).abs();
        max_residual = max_residual.max(residual);
        max_agreement = max_agreement.max(agree);
        table.push(vec![s, lhs, rhs, residual, angle_residual, agree]);
    }
    let mut warnings = Vec::new();
    if !excluded.is_empty() {
        warnings.push(format!("{} tangential samples excluded from condition b", excluded.len()));
    }
    ConditionB { table, excluded, warnings, max_residual, max_agreement }
}

/// Geometric configurations under which condition b holds automatically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CorollaryCase {
    /// `τ = 0`, `⟨ξ, γ′⟩ = 0`.
    Horizontal,
    /// `γ′ ∥ T₁ ∥ T₂`.
    VerticalBoth,
    /// `τ = 0`, `H₁ = H₂ ≠ 0`, `ν₁ = −ν₂`.
    OppositeNuEqualH,
    /// `τ ≠ 0`, tangential contact with `N₁ = N₂`, `H₁ = H₂`.
    TangentSameNormal,
    /// `τ ≠ 0`, transversal, `ν₁ = −ν₂`, `H₁ = H₂`.
    TransversalOppositeNu,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorollaryMatch {
    pub case: CorollaryCase,
    /// Largest defect of the defining conditions.
    pub residual: f64,
    /// Whether the consequence claimed for the case is observed.
    pub implied_ok: bool,
}

/// All configurations matched by the intersection.
pub fn corollary_config(ix: &IntersectionData) -> Vec<CorollaryMatch> {
    let chart = &ix.chart;
    let tau = ix.tau();
    let n = ix.samples.len();
    let frames: Vec<[SideFrame; 2]> = (0..n).map(|k| [ix.frame(k, 0), ix.frame(k, 1)]).collect();
    let xi = chart.vertical_raw();
    let max_over = |f: &dyn Fn(usize) -> f64| (0..n).fold(0.0f64, |m, k| m.max(f(k)));
    let h_gap = max_over(&|k| (frames[k][0].h - frames[k][1].h).abs());
    let nu_sum = max_over(&|k| (frames[k][0].nu + frames[k][1].nu).abs());
    let cb = condition_b(ix);
    let b_ok = cb.max_residual <= PRE_TOL;
    let mut out = Vec::new();
    let mut push = |case, residual: f64, implied_ok| {
        if residual <= CONFIG_TOL {
            out.push(CorollaryMatch { case, residual, implied_ok });
        }
    };
    if tau == 0.0 {
        let horiz = max_over(&|k| {
            let c = &ix.samples[k];
            chart.inner(&c.p, &xi, &c.velocity).abs()
        });
        push(CorollaryCase::Horizontal, horiz, b_ok);
    }
    let vertical = max_over(&|k| {
        let c = &ix.samples[k];
        frames[k]
            .iter()
            .map(|f| {
                let t = chart.norm(&c.p, &f.t);
                if t <= 1e-6 {
                    return 1.0;
                }
                let along = chart.inner(&c.p, &f.t, &c.velocity);
                chart.norm(&c.p, &(f.t - c.velocity * along)) / t
            })
            .fold(0.0, f64::max)
    });
    push(CorollaryCase::VerticalBoth, vertical, b_ok);
    if tau == 0.0 {
        let h0 = frames.iter().map(|f| f[0].h.abs()).fold(f64::INFINITY, f64::min);
        let res = if h0 > CONFIG_TOL { nu_sum.max(h_gap) } else { f64::INFINITY };
        push(CorollaryCase::OppositeNuEqualH, res, b_ok);
    } else {
        let same_n = max_over(&|k| {
            let c = &ix.samples[k];
            chart.norm(&c.p, &(c.normal[0] - c.normal[1]))
        });
        let ar_gap = max_over(&|k| {
            let r = ix.samples[k].ar_residual;
            (r[0] - r[1]).abs()
        });
        push(CorollaryCase::TangentSameNormal, same_n.max(h_gap), ar_gap <= PRE_TOL);
        let res = if ix.transversal { nu_sum.max(h_gap) } else { f64::INFINITY };
        push(CorollaryCase::TransversalOppositeNu, res, b_ok);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum KeyLemmaVerdict {
    /// Preconditions hold and the curve is an AR-line on both sides.
    Verified,
    /// Preconditions hold but the conclusion fails.
    Contradicted,
    /// Some precondition fails; nothing is asserted.
    NotApplicable(Vec<String>),
}

#[derive(Clone, Debug)]
pub struct KeyLemmaReport {
    pub verdict: KeyLemmaVerdict,
    pub angle: AngleReport,
    pub condition_b: ConditionB,
    pub corollaries: Vec<CorollaryMatch>,
    /// Columns `s, d, condition_b, ar_first, ar_second`.
    pub tracks: Table,
    pub max_ar: [f64; 2],
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct KeyLemmaJson<'a> {
    verdict: &'a KeyLemmaVerdict,
    d_spread: f64,
    d_mean: f64,
    transversal: bool,
    max_condition_b: f64,
    max_angle_form_agreement: f64,
    max_ar_residual: [f64; 2],
    corollaries: &'a [CorollaryMatch],
    warnings: &'a [String],
}

impl KeyLemmaReport {
    pub fn is_verified(&self) -> bool {
        self.verdict == KeyLemmaVerdict::Verified
    }

    pub fn to_json(&self, ix: &IntersectionData) -> Result<String> {
        let d_mean = ix.d.iter().sum::<f64>() / ix.d.len().max(1) as f64;
        crate::report::to_json(&KeyLemmaJson {
            verdict: &self.verdict,
            d_spread: self.angle.spread,
            d_mean,
            transversal: ix.transversal,
            max_condition_b: self.condition_b.max_residual,
            max_angle_form_agreement: self.condition_b.max_agreement,
            max_ar_residual: self.max_ar,
            corollaries: &self.corollaries,
            warnings: &self.warnings,
        })
    }
}

/// Checks the preconditions of the Key Lemma and, when they hold, its
/// conclusion.
pub fn key_lemma_verify(ix: &IntersectionData) -> KeyLemmaReport {
    let angle = intersection_angle(ix);
    let cb = condition_b(ix);
    let corollaries = corollary_config(ix);
    let max_ar = [0, 1].map(|i| ix.samples.iter().map(|c| c.ar_residual[i]).fold(0.0, f64::max));
    let mut warnings = cb.warnings.clone();
    let mut unmet = Vec::new();
    if !angle.is_constant {
        unmet.push(format!("contact angle not constant (spread {:.3e})", angle.spread));
    }
    let all_tangent = cb.excluded.len() == ix.samples.len();
    if all_tangent {
        if !corollaries.iter().any(|m| m.case == CorollaryCase::TangentSameNormal) {
            unmet.push("tangential contact without N1 = N2 and equal H".into());
        }
    } else if cb.max_residual > PRE_TOL {
        unmet.push(format!("condition b fails (max residual {:.3e})", cb.max_residual));
    }
    if cb.max_agreement > CONFIG_TOL {
        warnings.push(format!("angle form of condition b disagrees by {:.3e}", cb.max_agreement));
    }
    if max_ar[0].min(max_ar[1]) > PRE_TOL {
        unmet.push(format!(
            "curve is an AR-line on neither side (residuals {:.3e}, {:.3e})",
            max_ar[0], max_ar[1]
        ));
    }
    let verdict = if !unmet.is_empty() {
        KeyLemmaVerdict::NotApplicable(unmet)
    } else if max_ar[0].max(max_ar[1]) <= POST_TOL {
        KeyLemmaVerdict::Verified
    } else {
        KeyLemmaVerdict::Contradicted
    };
    let mut tracks = Table::new(&["s", "d", "condition_b", "ar_first", "ar_second"]);
    let res = cb.table.column("residual").unwrap_or_default();
    for (k, c) in ix.samples.iter().enumerate() {
        tracks.push(vec![c.s, ix.d[k], res[k], c.ar_residual[0], c.ar_residual[1]]);
    }
    KeyLemmaReport { verdict, angle, condition_b: cb, corollaries, tracks, max_ar, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::SpaceParams;
    use crate::curvelab::scenarios;
    use crate::gallery::closed::VerticalPlaneNil3;
    use crate::real::Dual;
    use crate::surface::Immersion;

    fn nil_plane(beta: f64) -> Immersion {
        Immersion::new(VerticalPlaneNil3 { tau: 0.5, beta })
    }

    fn fiber_pair(beta: f64) -> IntersectionData {
        scenarios::nil_fiber(beta, 41).unwrap()
    }

    fn mirrored_caps(wc: f64) -> IntersectionData {
        scenarios::mirrored_caps(SpaceParams::h2xr(), 0.8, wc, 37).unwrap()
    }

    #[test]
    fn nil_planes_meet_at_their_dihedral_angle() {
        for beta in [0.3, 0.9, 2.0] {
            let ix = fiber_pair(beta);
            for d in &ix.d {
                assert!((d - beta.cos()).abs() < 1e-12, "{d} vs {}", beta.cos());
            }
            assert!(ix.transversal);
        }
    }

    #[test]
    fn nil_fiber_verifies() {
        let ix = fiber_pair(0.9);
        let rep = key_lemma_verify(&ix);
        assert!(rep.is_verified(), "{:?}", rep.verdict);
        assert!(rep.corollaries.iter().any(|m| m.case == CorollaryCase::VerticalBoth));
        assert!(rep.condition_b.max_agreement <= CONFIG_TOL);
    }

    #[test]
    fn mirrored_caps_verify() {
        let ix = mirrored_caps(0.4);
        let rep = key_lemma_verify(&ix);
        assert!(rep.is_verified(), "{:?}", rep.verdict);
        assert!(rep.angle.is_constant);
        assert!(rep.corollaries.iter().any(|m| m.case == CorollaryCase::OppositeNuEqualH), "{:?}", rep.corollaries);
        assert!(rep.condition_b.max_residual <= CONFIG_TOL, "{}", rep.condition_b.max_residual);
    }

    #[test]
    fn tangent_nil_planes_verify() {
        let ix = scenarios::tangent_nil(21).unwrap();
        assert!(!ix.transversal);
        let rep = key_lemma_verify(&ix);
        assert!(rep.corollaries.iter().any(|m| m.case == CorollaryCase::TangentSameNormal));
        assert!(rep.is_verified(), "{:?}", rep.verdict);
    }

    #[test]
    fn example_pair_is_orthogonal_but_not_applicable() {
        let ix = scenarios::example_pair(33).unwrap();
        for d in &ix.d {
            assert!(d.abs() < 1e-10, "{d}");
        }
        let rep = key_lemma_verify(&ix);
        assert!(matches!(rep.verdict, KeyLemmaVerdict::NotApplicable(_)), "{:?}", rep.verdict);
        assert!(rep.max_ar[0] >= 0.01);
        assert!(rep.max_ar[1] <= 1e-8);
    }

    #[test]
    fn rotated_normals_break_the_hypotheses() {
        for ix in [fiber_pair(0.9), mirrored_caps(0.4)] {
            let bad = ix.with_rotated_normal(1e-3);
            let rep = key_lemma_verify(&bad);
            assert!(matches!(rep.verdict, KeyLemmaVerdict::NotApplicable(_)), "{:?}", rep.verdict);
        }
    }

    #[test]
    fn mismatched_ranges_are_rejected() {
        let a = nil_plane(0.0);
        let c1 = CurveOnSurface::new(&a, (0.0, 1.0), 11, |s| [Dual::constant(0.0), s]);
        let c2 = CurveOnSurface::new(&a, (0.0, 2.0), 11, |s| [Dual::constant(0.0), s]);
        assert!(IntersectionData::new(&c1, &c2).is_err());
    }
}
