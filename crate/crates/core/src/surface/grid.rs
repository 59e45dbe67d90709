//! Uniform parameter lattices, finite-difference stencils and the
//! structure-equation residual suite.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{Immersion, PointGeometry};
use crate::error::{GeomError, Result};
use crate::report::{ColumnSummary, Table};

/// Accuracy order of the central stencils used on grids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StencilOrder {
    Second,
    Fourth,
}

impl StencilOrder {
    /// Nodes needed on each side of the evaluation point.
    pub fn margin(self) -> usize {
        match self {
            StencilOrder::Second => 1,
            StencilOrder::Fourth => 2,
        }
    }

    fn first(self) -> &'static [f64] {
        match self {
            StencilOrder::Second => &[-0.5, 0.0, 0.5],
            StencilOrder::Fourth => &[1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0],
        }
    }

    fn second(self) -> &'static [f64] {
        match self {
            StencilOrder::Second => &[1.0, -2.0, 1.0],
            StencilOrder::Fourth => &[-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0],
        }
    }
}

/// Values that finite differences can be taken of.
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync {
    fn zero() -> Self;
}

impl Linear for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl Linear for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

/// Index arithmetic and stencils on `u = u0 + i·h, v = v0 + j·h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lattice {
    pub u0: f64,
    pub v0: f64,
    pub h: f64,
    pub nu: usize,
    pub nv: usize,
    pub order: StencilOrder,
}

impl Lattice {
    pub fn new(origin: (f64, f64), h: f64, (nu, nv): (usize, usize), order: StencilOrder) -> Result<Self> {
        let need = 2 * order.margin() + 1;
        if nu < need || nv < need {
            return Err(GeomError::SmallGrid { need, nu, nv });
        }
        if !(h > 0.0) {
            return Err(GeomError::Spec(format!("grid step must be positive, got {h}")));
        }
        Ok(Lattice { u0: origin.0, v0: origin.1, h, nu, nv, order })
    }

    /// Lattice covering `[u.0, u.1] × [v.0, v.1]`; the step is kept exactly
    /// and the upper ends are rounded to it.
    pub fn covering(u: (f64, f64), v: (f64, f64), h: f64, order: StencilOrder) -> Result<Self> {
        let count = |a: f64, b: f64| ((b - a) / h).round().max(0.0) as usize + 1;
        Self::new((u.0, v.0), h, (count(u.0, u.1), count(v.0, v.1)), order)
    }

    pub fn len(&self) -> usize {
        self.nu * self.nv
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    pub fn coords(&self, k: usize) -> (f64, f64) {
        let (i, j) = (k / self.nv, k % self.nv);
        (self.u0 + i as f64 * self.h, self.v0 + j as f64 * self.h)
    }

    /// Interior node indices where the stencil fits.
    pub fn interior(&self) -> Vec<(usize, usize)> {
        let m = self.order.margin();
        let mut out = Vec::new();
        for i in m..self.nu - m {
            for j in m..self.nv - m {
                out.push((i, j));
            }
        }
        out
    }

    /// `∂_u` (axis 0) or `∂_v` (axis 1) of a node field.
    pub fn partial<T: Linear>(&self, field: &[T], i: usize, j: usize, axis: usize) -> T {
        let w = self.order.first();
        let m = self.order.margin() as isize;
        let mut acc = T::zero();
        for (k, wk) in w.iter().enumerate() {
            if *wk == 0.0 {
                continue;
            }
            let o = k as isize - m;
            let (a, b) = if axis == 0 { (i as isize + o, j as isize) } else { (i as isize, j as isize + o) };
            acc = acc + field[self.index(a as usize, b as usize)] * *wk;
        }
        acc * (1.0 / self.h)
    }

    pub fn laplacian(&self, field: &[f64], i: usize, j: usize) -> f64 {
        let w = self.order.second();
        let m = self.order.margin() as isize;
        let mut acc = 0.0;
        for (k, wk) in w.iter().enumerate() {
            let o = k as isize - m;
            acc += wk * field[self.index((i as isize + o) as usize, j)];
            acc += wk * field[self.index(i, (j as isize + o) as usize)];
        }
        acc / (self.h * self.h)
    }

    /// `∂_z f = ½(f_u − i f_v)`.
    pub fn dz_real(&self, field: &[f64], i: usize, j: usize) -> Complex64 {
        Complex64::new(0.5 * self.partial(field, i, j, 0), -0.5 * self.partial(field, i, j, 1))
    }

    /// `∂_z f` for a complex field.
    pub fn dz(&self, field: &[Complex64], i: usize, j: usize) -> Complex64 {
        (self.partial(field, i, j, 0) - Complex64::i() * self.partial(field, i, j, 1)) * 0.5
    }

    /// `∂_z̄ f = ½(f_u + i f_v)`.
    pub fn dzbar(&self, field: &[Complex64], i: usize, j: usize) -> Complex64 {
        (self.partial(field, i, j, 0) + Complex64::i() * self.partial(field, i, j, 1)) * 0.5
    }
}

/// A lattice with cached point geometry.
#[derive(Clone, Debug)]
pub struct SurfaceGrid {
    pub immersion: Immersion,
    pub lattice: Lattice,
    pub nodes: Vec<PointGeometry>,
}

impl SurfaceGrid {
    pub fn new(immersion: &Immersion, lattice: Lattice) -> Result<Self> {
        let nodes = (0..lattice.len())
            .into_par_iter()
            .map(|k| {
                let (u, v) = lattice.coords(k);
                immersion.geometry(u, v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SurfaceGrid { immersion: immersion.clone(), lattice, nodes })
    }

    pub fn covering(
        immersion: &Immersion,
        u: (f64, f64),
        v: (f64, f64),
        h: f64,
        order: StencilOrder,
    ) -> Result<Self> {
        Self::new(immersion, Lattice::covering(u, v, h, order)?)
    }

    pub fn node(&self, i: usize, j: usize) -> &PointGeometry {
        &self.nodes[self.lattice.index(i, j)]
    }

    /// max − min of the mean curvature over all nodes.
    pub fn mean_curvature_spread(&self) -> f64 {
        let (lo, hi) = self
            .nodes
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| (lo.min(g.mean), hi.max(g.mean)));
        hi - lo
    }

    pub fn require_isothermal(&self) -> Result<()> {
        self.nodes.iter().try_for_each(|g| g.require_isothermal())
    }

    /// Residuals of the structure equations at every interior node.
    ///
    /// Columns: `u, v, gauss, codazzi_q, t_z, t_zbar, nu_z, t_norm, unit`
    /// for the Gauss equation, the four first-order equations in the order
    /// `Q_z̄ = λH_z + λ(κ−4τ²)νt`, `t_z = (λ_z/λ)t + Qν`, `t_z̄ = λ(H+iτ)ν`,
    /// `ν_z = −(H−iτ)t − (Q/λ)t̄`, then `|t|² = ½λ(1−ν²)` and `|T|²+ν² = 1`.
    pub fn structure_residuals(&self) -> Result<StructureReport> {
        self.require_isothermal()?;
        let p = self.immersion.params();
        let tau = p.tau;
        let defect = p.bundle_defect();
        let lam: Vec<f64> = self.nodes.iter().map(|g| 0.5 * g.first[(0, 0)]).collect();
        let ln_e: Vec<f64> = self.nodes.iter().map(|g| g.first[(0, 0)].ln()).collect();
        let nu: Vec<f64> = self.nodes.iter().map(|g| g.nu).collect();
        let mean: Vec<f64> = self.nodes.iter().map(|g| g.mean).collect();
        let q: Vec<Complex64> = self.nodes.iter().map(|g| super::hopf_of(&g.second)).collect();
        let t: Vec<Complex64> = self.nodes.iter().map(|g| g.t_unchecked()).collect();
        let lat = &self.lattice;
        let rows: Vec<Vec<f64>> = lat
            .interior()
            .into_par_iter()
            .map(|(i, j)| {
                let k = lat.index(i, j);
                let g = &self.nodes[k];
                let (l, n, qk, tk) = (lam[k], nu[k], q[k], t[k]);
                let hi = Complex64::new(g.mean, tau);
                let k_int = -lat.laplacian(&ln_e, i, j) / (4.0 * l);
                let gauss = k_int - g.gauss_extrinsic_side();
                let eq4 = lat.dzbar(&q, i, j) - lat.dz_real(&mean, i, j) * l - tk * (l * defect * n);
                let lz = lat.dz_real(&lam, i, j);
                let eq5 = lat.dz(&t, i, j) - tk * (lz / l) - qk * n;
                let eq6 = lat.dzbar(&t, i, j) - hi * (l * n);
                let eq7 = lat.dz_real(&nu, i, j) + hi.conj() * tk + qk * tk.conj() / l;
                let eq8 = tk.norm_sqr() - 0.5 * l * (1.0 - n * n);
                let unit = g.t_norm2() + n * n - 1.0;
                vec![g.u, g.v, gauss.abs(), eq4.norm(), eq5.norm(), eq6.norm(), eq7.norm(), eq8.abs(), unit.abs()]
            })
            .collect();
        let mut table = Table::new(&["u", "v", "gauss", "codazzi_q", "t_z", "t_zbar", "nu_z", "t_norm", "unit"]);
        for r in rows {
            table.push(r);
        }
        let spread = self.mean_curvature_spread();
        let mut warnings = Vec::new();
        if spread > super::H_CONST_TOL {
            warnings.push(format!("mean curvature varies by {spread:e} over the grid"));
        }
        Ok(StructureReport { table, h_spread: spread, warnings })
    }
}

#[derive(Clone, Debug)]
pub struct StructureReport {
    pub table: Table,
    pub h_spread: f64,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct StructureJson<'a> {
    h_spread: f64,
    warnings: &'a [String],
    residuals: Vec<ColumnSummary>,
}

impl StructureReport {
    pub fn max(&self, column: &str) -> f64 {
        self.table.max_abs(column).unwrap_or(f64::NAN)
    }

    /// Largest residual over every equation column.
    pub fn worst(&self) -> f64 {
        self.table.summary(2).iter().fold(0.0f64, |m, s| m.max(s.max))
    }

    pub fn to_json(&self) -> Result<String> {
        crate::report::to_json(&StructureJson {
            h_spread: self.h_spread,
            warnings: &self.warnings,
            residuals: self.table.summary(2),
        })
    }
}
