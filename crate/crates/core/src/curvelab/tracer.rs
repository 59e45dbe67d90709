//! Numerical tracing of the intersection of two immersions.

use nalgebra::{Matrix3x4, Vector3, Vector4};
use serde::Serialize;

use super::contact::chart_gap;
use crate::ambient::{ChartKind, Vec4};
use crate::error::{GeomError, Result};
use crate::gallery::Domain;
use crate::surface::Immersion;

pub const NEWTON_TOL: f64 = 1e-10;
const NEWTON_ITERS: usize = 30;

#[derive(Clone, Copy, Debug)]
pub struct TraceOptions {
    /// Predictor step in `(u1, v1, u2, v2)` space.
    pub step: f64,
    /// Steps per direction.
    pub max_steps: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { step: 1e-2, max_steps: 2000 }
    }
}

/// One traced point: parameters on both surfaces and the common point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TracePoint {
    pub first: [f64; 2],
    pub second: [f64; 2],
    pub point: [f64; 4],
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trace {
    pub points: Vec<TracePoint>,
    pub max_residual: f64,
    /// Whether the trace came back to its seed.
    pub closed: bool,
}

struct Tracer<'a> {
    a: &'a Immersion,
    b: &'a Immersion,
    da: Domain,
    db: Domain,
    kind: ChartKind,
}

fn inside(d: &Domain, u: f64, v: f64) -> bool {
    let ((u0, u1), (v0, v1)) = *d;
    u >= u0 && u <= u1 && v >= v0 && v <= v1
}

impl Tracer<'_> {
    fn project(&self, p: &Vec4) -> Vector3<f64> {
        match self.kind {
            ChartKind::HyperboloidProduct => Vector3::new(p[1], p[2], p[3]),
            _ => Vector3::new(p[0], p[1], p[2]),
        }
    }

    fn residual(&self, x: &Vector4<f64>) -> Result<(Vector3<f64>, Matrix3x4<f64>)> {
        let ja = self.a.jet(x[0], x[1])?;
        let jb = self.b.jet(x[2], x[3])?;
        let mut f = self.project(&ja.p) - self.project(&jb.p);
        if self.kind == ChartKind::PolarProduct {
            let tau = std::f64::consts::TAU;
            f[1] -= tau * (f[1] / tau).round();
        }
        let mut m = Matrix3x4::zeros();
        m.set_column(0, &self.project(&ja.pu));
        m.set_column(1, &self.project(&ja.pv));
        m.set_column(2, &-self.project(&jb.pu));
        m.set_column(3, &-self.project(&jb.pv));
        Ok((f, m))
    }

    fn correct(&self, mut x: Vector4<f64>) -> Result<(Vector4<f64>, f64)> {
        for _ in 0..NEWTON_ITERS {
            let (f, m) = self.residual(&x)?;
            if f.norm() <= NEWTON_TOL {
                return Ok((x, f.norm()));
            }
            let dx = m.svd(true, true).solve(&f, 1e-14).map_err(|e| GeomError::Numeric(e.into()))?;
            x -= dx;
        }
        let (f, _) = self.residual(&x)?;
        if f.norm() <= NEWTON_TOL {
            Ok((x, f.norm()))
        } else {
            Err(GeomError::Numeric(format!("corrector stalled at residual {:.3e}", f.norm())))
        }
    }

    /// Unit kernel vector of the Jacobian, from signed 3×3 minors.
    fn tangent(&self, x: &Vector4<f64>) -> Result<Vector4<f64>> {
        let (_, m) = self.residual(x)?;
        let mut t = Vector4::zeros();
        for k in 0..4 {
            let cols: Vec<usize> = (0..4).filter(|&c| c != k).collect();
            let minor = nalgebra::Matrix3::from_columns(&[m.column(cols[0]), m.column(cols[1]), m.column(cols[2])]);
            t[k] = if k % 2 == 0 { minor.determinant() } else { -minor.determinant() };
        }
        let n = t.norm();
        if !(n > 1e-12) {
            return Err(GeomError::Numeric("surfaces are tangent; the intersection is not a regular curve".into()));
        }
        Ok(t / n)
    }

    fn point(&self, x: &Vector4<f64>, residual: f64) -> Result<TracePoint> {
        let p = self.a.point(x[0], x[1])?;
        Ok(TracePoint { first: [x[0], x[1]], second: [x[2], x[3]], point: [p[0], p[1], p[2], p[3]], residual })
    }

    fn run(&self, x0: Vector4<f64>, dir: f64, opts: &TraceOptions, seed: &Vec4) -> Result<(Vec<TracePoint>, bool)> {
        let mut out = Vec::new();
        let mut x = x0;
        let mut prev = self.tangent(&x)? * dir;
        for k in 0..opts.max_steps {
            let mut t = self.tangent(&x)?;
            if t.dot(&prev) < 0.0 {
                t = -t;
            }
            let guess = x + t * opts.step;
            if !inside(&self.da, guess[0], guess[1]) || !inside(&self.db, guess[2], guess[3]) {
                return Ok((out, false));
            }
            let (next, r) = self.correct(guess)?;
            if !inside(&self.da, next[0], next[1]) || !inside(&self.db, next[2], next[3]) {
                return Ok((out, false));
            }
            prev = t;
            x = next;
            let tp = self.point(&x, r)?;
            let q = Vec4::from(tp.point);
            out.push(tp);
            if k > 2 && chart_gap(&self.a.chart(), &q, seed) < 0.5 * opts.step {
                return Ok((out, true));
            }
        }
        Ok((out, false))
    }
}

/// Traces `a ∩ b` from a seed `(u1, v1, u2, v2)` near the intersection.
/// The seed is corrected first, then the curve is followed both ways
/// until it leaves either domain or closes up.
pub fn trace_intersection(
    a: &Immersion,
    da: Domain,
    b: &Immersion,
    db: Domain,
    seed: [f64; 4],
    opts: &TraceOptions,
) -> Result<Trace> {
    let kind = a.chart().kind;
    if kind != b.chart().kind || a.params() != b.params() {
        return Err(GeomError::Spec("the two surfaces must be written in the same ambient chart".into()));
    }
    let tr = Tracer { a, b, da, db, kind };
    let (x0, r0) = tr.correct(Vector4::from(seed))?;
    let first = tr.point(&x0, r0)?;
    let p0 = Vec4::from(first.point);
    let (fwd, closed) = tr.run(x0, 1.0, opts, &p0)?;
    let mut points = Vec::new();
    if !closed {
        let (back, _) = tr.run(x0, -1.0, opts, &p0)?;
        points.extend(back.into_iter().rev());
    }
    points.push(first);
    points.extend(fwd);
    let max_residual = points.iter().map(|p| p.residual).fold(0.0, f64::max);
    Ok(Trace { points, max_residual, closed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::example::{self, Branch, ExamplePlane, ExampleSphere};

    #[test]
    fn traces_the_example_curve() {
        let plane = Immersion::new(ExamplePlane);
        let sphere = Immersion::new(ExampleSphere);
        let s = 0.3;
        let [x, y] = example::gamma_on_plane(s, Branch::Upper);
        let seed = [x + 1e-3, y - 1e-3, s, Branch::Upper.t() + 1e-3];
        let m = 1.0 - example::POLE_MARGIN;
        let tr = trace_intersection(
            &plane,
            ((-5.0, 5.0), (-5.0, 5.0)),
            &sphere,
            ((-m, m), (0.0, std::f64::consts::TAU)),
            seed,
            &TraceOptions::default(),
        )
        .unwrap();
        assert!(tr.points.len() > 50);
        assert!(tr.max_residual <= NEWTON_TOL);
        for p in &tr.points {
            let g = example::gamma(p.second[0], Branch::Upper);
            assert!((Vec4::from(p.point) - g).norm() < 1e-8, "{p:?}");
        }
    }
}
