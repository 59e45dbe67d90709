//! Adaptive Dormand–Prince 5(4) stepping and quintic Hermite dense output.

use crate::error::{GeomError, Result};

pub const DIM: usize = 4;
pub type State = [f64; DIM];

/// Tolerances and limits for [`integrate`].
#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-12, atol: 1e-13, h_init: 1e-3, h_max: 1e-2, max_steps: 200_000 }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `y' = f(w, y)` from `(w0, y0)` in the direction of `sign`
/// until `stop(w, y)` returns true or `|w − w0|` reaches `span`.
/// Returns the accepted knots including the start.
pub fn integrate<F, S>(f: F, w0: f64, y0: State, sign: f64, span: f64, stop: S, opt: &OdeOptions) -> Result<Vec<(f64, State)>>
where
    F: Fn(f64, &State) -> State,
    S: Fn(f64, &State) -> bool,
{
    let mut out = vec![(w0, y0)];
    let (mut w, mut y) = (w0, y0);
    let mut h = opt.h_init.min(opt.h_max);
    let mut k = [[0.0; DIM]; 7];
    k[0] = f(w, &y);
    for _ in 0..opt.max_steps {
        let remaining = span - (w - w0).abs();
        if remaining <= 1e-14 {
            return Ok(out);
        }
        let step = h.min(remaining);
        let hs = step * sign;
        for s in 1..7 {
            let mut ys = y;
            for (d, yd) in ys.iter_mut().enumerate() {
                for (j, aj) in A[s].iter().enumerate().take(s) {
                    *yd += hs * aj * k[j][d];
                }
            }
            k[s] = f(w + C[s] * hs, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for d in 0..DIM {
            let mut s5 = 0.0;
            let mut s4 = 0.0;
            for s in 0..7 {
                s5 += B5[s] * k[s][d];
                s4 += B4[s] * k[s][d];
            }
            y5[d] += hs * s5;
            let scale = opt.atol + opt.rtol * y[d].abs().max(y5[d].abs());
            err = err.max((hs * (s5 - s4)).abs() / scale);
        }
        if !err.is_finite() || y5.iter().any(|x| !x.is_finite()) {
            h *= 0.25;
            if h < 1e-14 {
                return Err(GeomError::Numeric(format!("step size underflow at w = {w}")));
            }
            continue;
        }
        if err <= 1.0 {
            w += hs;
            y = y5;
            k[0] = k[6];
            out.push((w, y));
            if stop(w, &y) {
                return Ok(out);
            }
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (step * fac).min(opt.h_max);
        if h < 1e-14 {
            return Err(GeomError::Numeric(format!("step size underflow at w = {w}")));
        }
    }
    Err(GeomError::Numeric(format!("no termination after {} steps (w = {w})", opt.max_steps)))
}

// Quintic Hermite basis on [0, 1], coefficients of t^0..t^5.
const HB: [[f64; 6]; 6] = [
    [1.0, 0.0, 0.0, -10.0, 15.0, -6.0],
    [0.0, 1.0, 0.0, -6.0, 8.0, -3.0],
    [0.0, 0.0, 0.5, -1.5, 1.5, -0.5],
    [0.0, 0.0, 0.0, 0.5, -1.0, 0.5],
    [0.0, 0.0, 0.0, -4.0, 7.0, -3.0],
    [0.0, 0.0, 0.0, 10.0, -15.0, 6.0],
];

fn poly(c: &[f64; 6], t: f64) -> [f64; 3] {
    let mut pw = [1.0; 6];
    for k in 1..6 {
        pw[k] = pw[k - 1] * t;
    }
    let mut p = [0.0; 3];
    for k in 0..6 {
        p[0] += c[k] * pw[k];
        if k >= 1 {
            p[1] += k as f64 * c[k] * pw[k - 1];
        }
        if k >= 2 {
            p[2] += (k * (k - 1)) as f64 * c[k] * pw[k - 2];
        }
    }
    p
}

/// Value, first and second derivative of the quintic Hermite interpolant
/// through `(y, y', y'')` at both ends of `[w0, w1]`.
pub fn hermite5(w0: f64, w1: f64, a: [f64; 3], b: [f64; 3], w: f64) -> [f64; 3] {
    let d = w1 - w0;
    let t = (w - w0) / d;
    let weights = [a[0], d * a[1], d * d * a[2], d * d * b[2], d * b[1], b[0]];
    let mut out = [0.0; 3];
    for (basis, wt) in HB.iter().zip(weights) {
        let p = poly(basis, t);
        out[0] += wt * p[0];
        out[1] += wt * p[1] / d;
        out[2] += wt * p[2] / (d * d);
    }
    out
}
