//! The Abresch–Rosenberg shape operator, its quadratic differential and
//! Codazzi-pair diagnostics.
//!
//! Matrices act on coordinate vectors in the `(∂u, ∂v)` basis. With
//! `A = I⁻¹II`, `T` the tangential part of ξ and `J = I⁻¹Ω`:
//!
//! * τ = 0: `S = 2HA − κ T Tᵀ I + (κ/2)|T|² Id − 2H² Id`;
//! * τ ≠ 0: `S = A − α T_θ T_θᵀ I + (α|T|²/2) Id − H Id` with
//!   `α = (κ − 4τ²) / (2√(H² + τ²))` and `T_θ = cos θ T + sin θ JT`.
//!
//! The phase is taken with `e^{2iθ} = (H + iτ)/√(H² + τ²)`. With the
//! orientation that makes `∇̄_X ξ = τ X∧ξ` hold, this is the choice for
//! which the Hopf function of `(I, II_AR)` equals `Q^AR / (2(H + iτ))`;
//! the opposite sign of τ leaves `S_AR` non-zero on the vertical plane of
//! Nil₃, where `Q^AR` vanishes.

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::ambient::SpaceParams;
use crate::error::{GeomError, Result};
use crate::report::Table;
use crate::surface::{hopf_of, Lattice, PointGeometry, SurfaceGrid, H_CONST_TOL};

/// Tolerance on Codazzi and holomorphy residuals for the Milnor flags.
pub const MILNOR_TOL: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ArCase {
    /// τ = 0, product formula.
    Product,
    /// τ ≠ 0, phase-rotated formula.
    Bundle,
}

/// Abresch–Rosenberg data at one point.
#[derive(Clone, Debug)]
pub struct ARData {
    pub case: ArCase,
    pub s_ar: Matrix2<f64>,
    pub ii_ar: Matrix2<f64>,
    /// `Q^AR`; present only in conformal coordinates.
    pub q_ar: Option<Complex64>,
    pub alpha: Option<f64>,
    pub theta: Option<f64>,
    pub t_theta: Option<Vector2<f64>>,
}

/// Principal phase `θ ∈ (−π/2, π/2]` with `e^{2iθ} = (H + iτ)/√(H² + τ²)`.
pub fn phase(h: f64, tau: f64) -> f64 {
    let t = 0.5 * tau.atan2(h);
    if t <= -std::f64::consts::FRAC_PI_2 {
        t + std::f64::consts::PI
    } else {
        t
    }
}

/// `α = (κ − 4τ²) / (2√(H² + τ²))`.
pub fn alpha(params: &SpaceParams, h: f64) -> f64 {
    params.bundle_defect() / (2.0 * (h * h + params.tau * params.tau).sqrt())
}

/// `S_AR` for the bundle case with an explicit phase.
pub fn bundle_operator(g: &PointGeometry, theta: f64) -> Matrix2<f64> {
    let a = alpha(&g.params, g.mean);
    let t = g.t_coords;
    let tt = t * theta.cos() + g.rotation() * t * theta.sin();
    g.shape() - tt * (tt.transpose() * g.first) * a
        + Matrix2::identity() * (0.5 * a * g.t_norm2() - g.mean)
}

pub fn ar_operator(g: &PointGeometry) -> ARData {
    let SpaceParams { kappa, tau } = g.params;
    let h = g.mean;
    let (case, s, al, th, tth) = if tau == 0.0 {
        let t = g.t_coords;
        let s = g.shape() * (2.0 * h) - t * (t.transpose() * g.first) * kappa
            + Matrix2::identity() * (0.5 * kappa * g.t_norm2() - 2.0 * h * h);
        (ArCase::Product, s, None, None, None)
    } else {
        let th = phase(h, tau);
        let tt = g.t_coords * th.cos() + g.rotation() * g.t_coords * th.sin();
        (ArCase::Bundle, bundle_operator(g, th), Some(alpha(&g.params, h)), Some(th), Some(tt))
    };
    let ii = g.first * s;
    let ii = (ii + ii.transpose()) * 0.5;
    ARData {
        case,
        s_ar: s,
        ii_ar: ii,
        q_ar: ar_differential(g).ok(),
        alpha: al,
        theta: th,
        t_theta: tth,
    }
}

/// `Q^AR = 2(H + iτ)Q − (κ − 4τ²)t²`.
pub fn ar_differential(g: &PointGeometry) -> Result<Complex64> {
    let q = g.hopf()?;
    let t = g.t()?;
    Ok(Complex64::new(2.0 * g.mean, 2.0 * g.params.tau) * q - t * t * g.params.bundle_defect())
}

/// Hopf function of the pair `(I, II_AR)`.
pub fn pair_hopf(g: &PointGeometry) -> Result<Complex64> {
    g.require_isothermal()?;
    Ok(hopf_of(&ar_operator(g).ii_ar))
}

/// `|I·S − (I·S)ᵀ|` before symmetrization.
pub fn self_adjoint_defect(g: &PointGeometry, s: &Matrix2<f64>) -> f64 {
    let m = g.first * s;
    (m - m.transpose()).abs().max()
}

/// `|∂_z̄ Q^AR|` at interior nodes. Columns `u, v, holomorphy`.
pub fn holomorphy_residual(grid: &SurfaceGrid) -> Result<Table> {
    grid.require_isothermal()?;
    let q = grid.nodes.iter().map(ar_differential).collect::<Result<Vec<_>>>()?;
    let lat = &grid.lattice;
    let mut table = Table::new(&["u", "v", "holomorphy"]);
    for (i, j) in lat.interior() {
        let g = grid.node(i, j);
        table.push(vec![g.u, g.v, lat.dzbar(&q, i, j).norm()]);
    }
    Ok(table)
}

/// `max |∂_z̄ Q^AR|` over a window at several grid steps.
#[derive(Clone, Debug, Serialize)]
pub struct Convergence {
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `log₂` ratios of consecutive residuals, scaled to the step ratio.
    pub orders: Vec<f64>,
}

/// Holomorphy residual with every derivative taken by central differences
/// of step `h` on a second-order lattice of the same step. The conformal
/// factor is read off the diagonal of the discrete metric, so the
/// isothermal defect counts as discretization error.
pub fn holomorphy_convergence(
    immersion: &crate::surface::Immersion,
    u: (f64, f64),
    v: (f64, f64),
    steps: &[f64],
) -> Result<Convergence> {
    let mut residuals = Vec::with_capacity(steps.len());
    for &h in steps {
        let imm = immersion.clone().with_mode(crate::surface::DerivativeMode::CentralDifference { step: h });
        let lat = Lattice::covering(u, v, h, crate::surface::StencilOrder::Second)?;
        let q = (0..lat.len())
            .into_par_iter()
            .map(|k| {
                let (a, b) = lat.coords(k);
                let g = imm.geometry(a, b)?;
                let t = g.t_unchecked();
                Ok(Complex64::new(2.0 * g.mean, 2.0 * g.params.tau) * hopf_of(&g.second)
                    - t * t * g.params.bundle_defect())
            })
            .collect::<Result<Vec<_>>>()?;
        let r = lat.interior().into_iter().fold(0.0f64, |m, (i, j)| m.max(lat.dzbar(&q, i, j).norm()));
        if !r.is_finite() {
            return Err(GeomError::Numeric(format!("non-finite holomorphy residual at h = {h}")));
        }
        residuals.push(r);
    }
    let orders = residuals
        .windows(2)
        .zip(steps.windows(2))
        .map(|(r, h)| (r[0] / r[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    Ok(Convergence { steps: steps.to_vec(), residuals, orders })
}

/// A metric and a quadratic form sampled on a lattice.
pub trait FundamentalPair: Sync {
    fn forms(&self, u: f64, v: f64) -> Result<(Matrix2<f64>, Matrix2<f64>)>;
    fn name(&self) -> String {
        "pair".into()
    }
}

/// Which second form of an immersion to pair with its metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairKind {
    Ordinary,
    AbreschRosenberg,
}

/// A fundamental pair tabulated on a lattice.
#[derive(Clone, Debug)]
pub struct PairGrid {
    pub lattice: Lattice,
    pub first: Vec<Matrix2<f64>>,
    pub second: Vec<Matrix2<f64>>,
}

impl PairGrid {
    pub fn sample<P: FundamentalPair + ?Sized>(pair: &P, lattice: Lattice) -> Result<Self> {
        let forms = (0..lattice.len())
            .into_par_iter()
            .map(|k| {
                let (u, v) = lattice.coords(k);
                pair.forms(u, v)
            })
            .collect::<Result<Vec<_>>>()?;
        let (first, second) = forms.into_iter().unzip();
        Ok(PairGrid { lattice, first, second })
    }

    pub fn from_surface(grid: &SurfaceGrid, kind: PairKind) -> Self {
        let first = grid.nodes.iter().map(|g| g.first).collect();
        let second = grid
            .nodes
            .iter()
            .map(|g| match kind {
                PairKind::Ordinary => g.second,
                PairKind::AbreschRosenberg => ar_operator(g).ii_ar,
            })
            .collect();
        PairGrid { lattice: grid.lattice, first, second }
    }

    fn check_conformal(&self) -> Result<()> {
        for (k, i) in self.first.iter().enumerate() {
            let r = (i[(0, 0)] - i[(1, 1)]).abs().max(i[(0, 1)].abs()) / (i[(0, 0)] + i[(1, 1)]);
            if !(r <= crate::surface::ISO_TOL) {
                let (u, v) = self.lattice.coords(k);
                return Err(GeomError::NotIsothermal { u, v, residual: r });
            }
        }
        Ok(())
    }

    /// Mean curvature `½ tr(I⁻¹ II)` of the pair at every node.
    pub fn mean(&self) -> Vec<f64> {
        self.first
            .iter()
            .zip(&self.second)
            .map(|(i, ii)| 0.5 * (i.try_inverse().unwrap_or_else(Matrix2::zeros) * ii).trace())
            .collect()
    }

    pub fn hopf(&self) -> Vec<Complex64> {
        self.second.iter().map(hopf_of).collect()
    }

    /// Conformal Codazzi defect `|Q_z̄ − λ H_z|` at interior nodes.
    /// Columns `u, v, codazzi`.
    pub fn codazzi_residual(&self) -> Result<Table> {
        self.check_conformal()?;
        let lat = &self.lattice;
        let h = self.mean();
        let q = self.hopf();
        let mut table = Table::new(&["u", "v", "codazzi"]);
        for (i, j) in lat.interior() {
            let k = lat.index(i, j);
            let lam = 0.5 * self.first[k][(0, 0)];
            let r = lat.dzbar(&q, i, j) - lat.dz_real(&h, i, j) * lam;
            let (u, v) = lat.coords(k);
            table.push(vec![u, v, r.norm()]);
        }
        Ok(table)
    }

    /// `max |Q_z̄|` over interior nodes.
    pub fn max_hopf_dzbar(&self) -> f64 {
        let q = self.hopf();
        let lat = &self.lattice;
        lat.interior().into_iter().fold(0.0f64, |m, (i, j)| m.max(lat.dzbar(&q, i, j).norm()))
    }

    pub fn milnor_check(&self) -> Result<MilnorReport> {
        let cod = self.codazzi_residual()?.max_abs("codazzi").unwrap_or(0.0);
        let h = self.mean();
        let spread = h.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - h.iter().cloned().fold(f64::INFINITY, f64::min);
        let holo = self.max_hopf_dzbar();
        let codazzi = cod <= MILNOR_TOL;
        let h_const = spread <= H_CONST_TOL;
        let q_holo = holo <= MILNOR_TOL;
        let trues = [codazzi, h_const, q_holo].iter().filter(|b| **b).count();
        let violation = (trues == 2).then(|| {
            let missing = if !codazzi {
                "codazzi"
            } else if !h_const {
                "constant mean curvature"
            } else {
                "holomorphic Hopf differential"
            };
            format!("two conditions hold but {missing} fails")
        });
        Ok(MilnorReport {
            codazzi,
            h_const,
            q_holo,
            max_codazzi: cod,
            h_spread: spread,
            max_qzbar: holo,
            violation,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MilnorReport {
    pub codazzi: bool,
    pub h_const: bool,
    pub q_holo: bool,
    pub max_codazzi: f64,
    pub h_spread: f64,
    pub max_qzbar: f64,
    /// Set when exactly two flags hold, which the trichotomy forbids.
    pub violation: Option<String>,
}

/// An immersion paired with either of its second forms.
pub struct ImmersionPair {
    pub immersion: crate::surface::Immersion,
    pub kind: PairKind,
}

impl FundamentalPair for ImmersionPair {
    fn forms(&self, u: f64, v: f64) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
        let g = self.immersion.geometry(u, v)?;
        let ii = match self.kind {
            PairKind::Ordinary => g.second,
            PairKind::AbreschRosenberg => ar_operator(&g).ii_ar,
        };
        Ok((g.first, ii))
    }
    fn name(&self) -> String {
        format!("{} ({:?})", self.immersion.name(), self.kind)
    }
}

/// Pair given in conformal form by `λ`, `H` and `Q`:
/// `I = 2λ|dz|²`, `II = Q dz² + Q̄ dz̄² + 2λH|dz|²`.
pub struct ConformalPair<F>
where
    F: Fn(f64, f64) -> (f64, f64, Complex64) + Sync,
{
    pub data: F,
    pub label: String,
}

impl<F> FundamentalPair for ConformalPair<F>
where
    F: Fn(f64, f64) -> (f64, f64, Complex64) + Sync,
{
    fn forms(&self, u: f64, v: f64) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
        let (lam, h, q) = (self.data)(u, v);
        if !(lam > 0.0) {
            return Err(GeomError::Spec(format!("conformal factor must be positive, got {lam}")));
        }
        let first = Matrix2::new(2.0 * lam, 0.0, 0.0, 2.0 * lam);
        let second = Matrix2::new(
            2.0 * q.re + 2.0 * lam * h,
            -2.0 * q.im,
            -2.0 * q.im,
            -2.0 * q.re + 2.0 * lam * h,
        );
        Ok((first, second))
    }
    fn name(&self) -> String {
        self.label.clone()
    }
}

/// Outcome of the classification of surfaces with vanishing `Q^AR`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ArVerdict {
    /// `H = 0 = τ`.
    Slice,
    /// `K > 0`: rotationally invariant sphere.
    RotSphere,
    /// `4H² + κ = 0` and `ν ≡ 0`: flat vertical example.
    FlatVertical,
    /// Some point has negative Gauss curvature.
    SomewhereNegativeK,
}

/// Classification verdict for a complete H-surface with `Q^AR ≡ 0`.
///
/// For `κ − 4τ² < 0` the sphere branch uses `4(H² + τ²) > −(κ − 4τ²)`,
/// i.e. `4H² + κ > 0`; this is the condition under which the rotational
/// H-spheres of H²×ℝ exist (H > 1/2).
pub fn classify_ar(params: &SpaceParams, h: f64, nu_zero: bool) -> ArVerdict {
    let tau = params.tau;
    let defect = params.bundle_defect();
    let s = h * h + tau * tau;
    if h == 0.0 && tau == 0.0 {
        return ArVerdict::Slice;
    }
    let sphere = if defect > 0.0 { 4.0 * s > defect } else { 4.0 * s > -defect };
    if sphere {
        ArVerdict::RotSphere
    } else if (4.0 * h * h + params.kappa).abs() <= 1e-12 && nu_zero {
        ArVerdict::FlatVertical
    } else {
        ArVerdict::SomewhereNegativeK
    }
}

impl ArVerdict {
    pub fn note(&self, params: &SpaceParams, h: f64) -> String {
        let c = 4.0 * h * h + params.kappa;
        match self {
            ArVerdict::Slice => "H = 0 = tau: slice".into(),
            ArVerdict::RotSphere => format!("K > 0, rotational sphere; 4H^2+kappa = {c} > 0"),
            ArVerdict::FlatVertical => "K = 0: vertical plane (Nil3) or horocycle cylinder".into(),
            ArVerdict::SomewhereNegativeK => format!("a point with K < 0 exists; 4H^2+kappa = {c}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discrete_holomorphy_converges_at_second_order() {
        let e = crate::gallery::vertical_cylinder_cartan(2.0, 0.4).unwrap();
        let c = holomorphy_convergence(&e.immersion, (-0.1, 0.1), (-0.1, 0.1), &[2e-2, 1e-2, 5e-3]).unwrap();
        assert!(c.residuals[2] < c.residuals[0]);
        for o in &c.orders {
            assert!((1.7..=2.3).contains(o), "{c:?}");
        }
    }

    #[test]
    fn phase_solves_its_defining_equation() {
        for &(h, tau) in &[(0.0, 0.5), (0.3, 0.5), (-0.7, 0.5), (1.0, -2.0), (-0.2, 0.0)] {
            let th = phase(h, tau);
            let lhs = Complex64::from_polar(1.0, 2.0 * th);
            let rhs = Complex64::new(h, tau) / (h * h + tau * tau).sqrt();
            assert!((lhs - rhs).norm() < 1e-14);
            assert!(th > -std::f64::consts::FRAC_PI_2 && th <= std::f64::consts::FRAC_PI_2);
        }
        assert!((phase(0.0, 0.5) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn classification_instances() {
        let h2 = SpaceParams::h2xr();
        assert_eq!(classify_ar(&h2, 0.5f64.sqrt(), false), ArVerdict::RotSphere);
        assert_eq!(classify_ar(&h2, 0.5, true), ArVerdict::FlatVertical);
        assert_eq!(classify_ar(&h2, 0.0, false), ArVerdict::Slice);
        assert_eq!(classify_ar(&h2, 0.3, false), ArVerdict::SomewhereNegativeK);
        assert_eq!(classify_ar(&SpaceParams::nil3(), 0.0, true), ArVerdict::FlatVertical);
        assert_eq!(classify_ar(&SpaceParams::s2xr(), 1.0, false), ArVerdict::RotSphere);
    }

    #[test]
    fn conformal_pair_round_trips_its_data() {
        let pair = ConformalPair {
            data: |u: f64, _v: f64| (1.0 + u * u, 0.3, Complex64::new(u, -0.2)),
            label: "test".into(),
        };
        let (i, ii) = pair.forms(0.5, 0.0).unwrap();
        let h = 0.5 * (i.try_inverse().unwrap() * ii).trace();
        assert!((h - 0.3).abs() < 1e-15);
        assert!((hopf_of(&ii) - Complex64::new(0.5, -0.2)).norm() < 1e-15);
    }
}
