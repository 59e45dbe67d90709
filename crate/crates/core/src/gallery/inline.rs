//! Surfaces and curves given as coefficient tables.
//!
//! A component is a sum of terms `c · x^a · y^b · f₁(k₁ ·) · f₂(k₂ ·) …`
//! where `(x, y)` are the parameters and each factor acts on one of them.
//! Curves use the first parameter only.

use serde::{Deserialize, Serialize};

use super::Domain;
use crate::ambient::{AmbientChart, ChartKind, SpaceParams};
use crate::error::{GeomError, Result};
use crate::real::{Dual, Real};
use crate::surface::{Immersion, Parametrization};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub f: Func,
    /// 0 for the first parameter, 1 for the second.
    #[serde(default)]
    pub arg: usize,
    #[serde(default = "one")]
    pub k: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub c: f64,
    #[serde(default)]
    pub pow: [u32; 2],
    #[serde(default)]
    pub fns: Vec<Factor>,
}

impl Term {
    fn eval<S: Real>(&self, x: [S; 2]) -> S {
        let mut out = S::cst(self.c);
        for (k, &p) in self.pow.iter().enumerate() {
            if p > 0 {
                out = out * x[k].powi(p as i32);
            }
        }
        for f in &self.fns {
            let a = x[f.arg] * f.k;
            out = out
                * match f.f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Sinh => a.sinh(),
                    Func::Cosh => a.cosh(),
                    Func::Exp => a.exp(),
                };
        }
        out
    }

    fn check(&self, args: usize) -> Result<()> {
        if !self.c.is_finite() || self.fns.iter().any(|f| !f.k.is_finite()) {
            return Err(GeomError::Spec("non-finite coefficient".into()));
        }
        if self.fns.iter().any(|f| f.arg >= args) || self.pow[args..].iter().any(|&p| p != 0) {
            return Err(GeomError::Spec(format!("term refers to a parameter beyond the first {args}")));
        }
        Ok(())
    }
}

fn eval_sum<S: Real>(terms: &[Term], x: [S; 2]) -> S {
    terms.iter().fold(S::cst(0.0), |acc, t| acc + t.eval(x))
}

/// Surface whose coordinate components are coefficient tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InlineSurface {
    pub chart: ChartKind,
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub tau: f64,
    /// Three components for 3-D charts, four for the hyperboloid.
    pub coords: Vec<Vec<Term>>,
    pub domain: Domain,
    #[serde(default)]
    pub name: Option<String>,
}

#[derive(Clone, Debug)]
struct Checked {
    chart: AmbientChart,
    spec: InlineSurface,
}

impl Parametrization for Checked {
    fn chart(&self) -> AmbientChart {
        self.chart
    }

    fn eval<S: Real>(&self, u: S, v: S) -> [S; 4] {
        let mut out = [S::cst(0.0); 4];
        for (k, c) in self.spec.coords.iter().enumerate() {
            out[k] = eval_sum(c, [u, v]);
        }
        out
    }

    fn name(&self) -> String {
        self.spec.name.clone().unwrap_or_else(|| "inline surface".into())
    }
}

impl InlineSurface {
    pub fn build(&self) -> Result<Immersion> {
        let chart = AmbientChart::new(SpaceParams::new(self.kappa, self.tau)?, self.chart)?;
        if self.coords.len() != chart.dim() {
            return Err(GeomError::Spec(format!(
                "{} chart needs {} coordinate components, got {}",
                self.chart.name(),
                chart.dim(),
                self.coords.len()
            )));
        }
        self.coords.iter().flatten().try_for_each(|t| t.check(2))?;
        let ((u0, u1), (v0, v1)) = self.domain;
        if !(u0 < u1 && v0 < v1) {
            return Err(GeomError::Spec("empty parameter domain".into()));
        }
        Ok(Immersion::new(Checked { chart, spec: self.clone() }))
    }
}

/// Curve `s ↦ (u(s), v(s))` as two coefficient tables in `s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InlineCurve {
    pub u: Vec<Term>,
    pub v: Vec<Term>,
}

impl InlineCurve {
    pub fn check(&self) -> Result<()> {
        self.u.iter().chain(&self.v).try_for_each(|t| t.check(1))
    }

    pub fn eval(&self, s: Dual<f64>) -> [Dual<f64>; 2] {
        let x = [s, Dual::constant(0.0)];
        [eval_sum(&self.u, x), eval_sum(&self.v, x)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::closed::VerticalPlaneH2xR;

    fn plane_json() -> &'static str {
        r#"{
            "chart": "hyperboloid", "kappa": -1,
            "coords": [
                [{"c": 1, "fns": [{"f": "cosh"}]}],
                [],
                [{"c": 1, "fns": [{"f": "sinh", "arg": 0}]}],
                [{"c": 1, "pow": [0, 1]}]
            ],
            "domain": [[-1, 1], [-1, 1]]
        }"#
    }

    #[test]
    fn inline_plane_matches_closed_form() {
        let spec: InlineSurface = serde_json::from_str(plane_json()).unwrap();
        let a = spec.build().unwrap();
        let b = Immersion::new(VerticalPlaneH2xR);
        for &(u, v) in &[(0.1, 0.2), (-0.7, 0.9)] {
            let (ga, gb) = (a.geometry(u, v).unwrap(), b.geometry(u, v).unwrap());
            assert!((ga.p - gb.p).norm() < 1e-15);
            assert!((ga.second - gb.second).norm() < 1e-12);
        }
    }

    #[test]
    fn wrong_component_count_is_rejected() {
        let mut spec: InlineSurface = serde_json::from_str(plane_json()).unwrap();
        spec.coords.pop();
        assert!(matches!(spec.build(), Err(GeomError::Spec(_))));
        let mut spec: InlineSurface = serde_json::from_str(plane_json()).unwrap();
        spec.kappa = 0.0;
        assert!(spec.build().is_err());
    }

    #[test]
    fn curve_terms_use_one_parameter() {
        let c: InlineCurve = serde_json::from_str(r#"{"u": [{"c": 2, "pow": [2, 0]}], "v": [{"c": 1, "fns": [{"f": "sin", "k": 3}]}]}"#).unwrap();
        c.check().unwrap();
        let [u, v] = c.eval(Dual::var(0.5));
        assert!((u.re - 0.5).abs() < 1e-15 && (u.eps - 2.0).abs() < 1e-15);
        assert!((v.eps - 3.0 * 1.5f64.cos()).abs() < 1e-15);
        let bad: InlineCurve = serde_json::from_str(r#"{"u": [{"c": 1, "pow": [0, 1]}], "v": []}"#).unwrap();
        assert!(bad.check().is_err());
    }
}
