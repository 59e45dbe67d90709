//! Hypothesis reports for H-disks with piecewise regular boundary.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::contact::{chart_gap, corollary_config, intersection_angle, IntersectionData};
use super::{ar_locus_residual, CurveOnSurface};
use crate::arpair::ar_differential;
use crate::error::{GeomError, Result};
use crate::gallery::Domain;
use crate::surface::Immersion;

/// Arc endpoints must meet to this.
pub const CHAIN_TOL: f64 = 1e-8;
/// Largest AR-locus residual accepted on a boundary arc.
pub const ARC_TOL: f64 = 1e-6;

/// Boundary arcs in order and the interior angle at each vertex.
#[derive(Clone)]
pub struct DiskBoundarySpec {
    pub arcs: Vec<CurveOnSurface>,
    pub vertex_angles: Vec<f64>,
}

/// The disk: an immersion plus the parameter region it covers.
#[derive(Clone)]
pub struct DiskSurface {
    pub immersion: Immersion,
    pub bbox: Domain,
    pub inside: Arc<dyn Fn(f64, f64) -> bool + Send + Sync>,
}

/// An AR surface met along one boundary arc.
#[derive(Clone)]
pub struct Companion {
    pub arc: usize,
    pub contact: IntersectionData,
}

/// Which vertex bound to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
pub enum VertexRule {
    /// At most three vertices with angle below π.
    #[default]
    AtMostThree,
    /// Fewer than three.
    FewerThanThree,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompanionCheck {
    pub arc: usize,
    pub transversal: bool,
    pub constant_angle: bool,
    pub configurations: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiskReport {
    pub vertices_below_pi: usize,
    pub at_most_three: bool,
    pub fewer_than_three: bool,
    pub rule: VertexRule,
    pub arc_residuals: Vec<f64>,
    pub companions: Vec<CompanionCheck>,
    pub violated: Vec<String>,
    pub hypotheses_hold: bool,
    pub verdict: String,
    pub qar_max: f64,
    pub qar_mean: f64,
    pub qar_samples: usize,
}

fn check_chain(boundary: &DiskBoundarySpec) -> Result<()> {
    let arcs = &boundary.arcs;
    if arcs.is_empty() {
        return Err(GeomError::Spec("disk boundary has no arcs".into()));
    }
    let chart = arcs[0].surface.chart();
    for (k, a) in arcs.iter().enumerate() {
        let next = &arcs[(k + 1) % arcs.len()];
        let gap = chart_gap(&chart, &a.end()?, &next.start()?);
        if !(gap <= CHAIN_TOL) {
            return Err(GeomError::Spec(format!("open boundary chain: arc {k} ends {gap:.3e} away from the next arc")));
        }
    }
    for (k, &t) in boundary.vertex_angles.iter().enumerate() {
        if !(t > 0.0 && t < std::f64::consts::TAU) {
            return Err(GeomError::Spec(format!("vertex {k} has angle {t} outside (0, 2pi)")));
        }
    }
    Ok(())
}

/// Evaluates the disk hypotheses and measures `|Q^AR|` on an `n × n`
/// sampling of the disk.
pub fn disk_report(
    disk: &DiskSurface,
    boundary: &DiskBoundarySpec,
    companions: &[Companion],
    rule: VertexRule,
    n: usize,
) -> Result<DiskReport> {
    check_chain(boundary)?;
    let below = boundary.vertex_angles.iter().filter(|&&t| t < std::f64::consts::PI).count();
    let at_most_three = below <= 3;
    let fewer_than_three = below < 3;
    let mut violated = Vec::new();
    let vertex_ok = match rule {
        VertexRule::AtMostThree => at_most_three,
        VertexRule::FewerThanThree => fewer_than_three,
    };
    if !vertex_ok {
        violated.push(format!("{below} vertices with angle < pi"));
    }
    let mut arc_residuals = Vec::new();
    for (k, arc) in boundary.arcs.iter().enumerate() {
        let r = ar_locus_residual(arc)?.max;
        if !(r <= ARC_TOL) {
            violated.push(format!("boundary arc {k} is not an AR-line of curvature (residual {r:.3e})"));
        }
        arc_residuals.push(r);
    }
    let mut checks = Vec::new();
    for c in companions {
        let angle = intersection_angle(&c.contact);
        let configurations: Vec<String> =
            corollary_config(&c.contact).iter().map(|m| format!("{:?}", m.case)).collect();
        if !angle.is_constant {
            violated.push(format!("arc {} does not meet its companion at a constant angle", c.arc));
        }
        if configurations.is_empty() {
            violated.push(format!("arc {} matches no admissible contact configuration", c.arc));
        }
        checks.push(CompanionCheck {
            arc: c.arc,
            transversal: c.contact.transversal,
            constant_angle: angle.is_constant,
            configurations,
        });
    }
    let ((u0, u1), (v0, v1)) = disk.bbox;
    let m = n.max(2);
    let pts: Vec<(f64, f64)> = (0..m * m)
        .map(|k| {
            let (i, j) = (k / m, k % m);
            (u0 + (u1 - u0) * i as f64 / (m - 1) as f64, v0 + (v1 - v0) * j as f64 / (m - 1) as f64)
        })
        .filter(|&(u, v)| (disk.inside)(u, v))
        .collect();
    let q: Vec<f64> = pts
        .par_iter()
        .map(|&(u, v)| disk.immersion.geometry(u, v).and_then(|g| ar_differential(&g)).map(|q| q.norm()))
        .collect::<Result<_>>()?;
    let qar_max = q.iter().cloned().fold(0.0, f64::max);
    let qar_mean = q.iter().sum::<f64>() / q.len().max(1) as f64;
    let hypotheses_hold = violated.is_empty();
    let verdict = if hypotheses_hold {
        "hypotheses satisfied => predicted: part of an Abresch-Rosenberg surface".to_string()
    } else {
        format!("hypotheses violated ({}); no prediction", violated.join("; "))
    };
    Ok(DiskReport {
        vertices_below_pi: below,
        at_most_three,
        fewer_than_three,
        rule,
        arc_residuals,
        companions: checks,
        violated,
        hypotheses_hold,
        verdict,
        qar_max,
        qar_mean,
        qar_samples: q.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::SpaceParams;
    use crate::gallery::closed::VerticalPlaneH2xR;
    use crate::gallery::meridian::{self, Family};
    use crate::real::Dual;

    fn triangle() -> (DiskSurface, DiskBoundarySpec) {
        let plane = Immersion::new(VerticalPlaneH2xR);
        let arcs = vec![
            CurveOnSurface::new(&plane, (0.0, 1.0), 11, |s| [s, Dual::constant(0.0)]),
            CurveOnSurface::new(&plane, (0.0, 1.0), 11, |s| [-s + 1.0, s]),
            CurveOnSurface::new(&plane, (0.0, 1.0), 11, |s| [Dual::constant(0.0), -s + 1.0]),
        ];
        let q = std::f64::consts::FRAC_PI_4;
        let disk = DiskSurface { immersion: plane, bbox: ((0.0, 1.0), (0.0, 1.0)), inside: Arc::new(|u, v| u + v <= 1.0) };
        (disk, DiskBoundarySpec { arcs, vertex_angles: vec![2.0 * q, q, q] })
    }

    #[test]
    fn triangle_in_plane_violates_hypotheses() {
        let (disk, spec) = triangle();
        let rep = disk_report(&disk, &spec, &[], VertexRule::AtMostThree, 12).unwrap();
        assert_eq!(rep.vertices_below_pi, 3);
        assert!(rep.at_most_three && !rep.fewer_than_three);
        assert!(rep.arc_residuals[0] < 1e-10 && rep.arc_residuals[2] < 1e-10);
        assert!(rep.arc_residuals[1] > 0.01);
        assert!(!rep.hypotheses_hold);
        assert!((rep.qar_max - 0.25).abs() < 1e-9);
        let strict = disk_report(&disk, &spec, &[], VertexRule::FewerThanThree, 4).unwrap();
        assert_eq!(strict.violated.len(), 2);
    }

    #[test]
    fn open_chain_and_bad_angles_are_rejected() {
        let (disk, mut spec) = triangle();
        spec.arcs.pop();
        assert!(matches!(disk_report(&disk, &spec, &[], VertexRule::AtMostThree, 4), Err(GeomError::Spec(_))));
        let (disk, mut spec) = triangle();
        spec.vertex_angles[0] = 7.0;
        assert!(matches!(disk_report(&disk, &spec, &[], VertexRule::AtMostThree, 4), Err(GeomError::Spec(_))));
    }

    #[test]
    fn spherical_cap_with_mirror_companion() {
        let p = Arc::new(meridian::rotational_cmc(SpaceParams::h2xr(), 0.8, Family::Sphere).unwrap());
        let wc = 0.4;
        let top = p.immersion();
        let rim = CurveOnSurface::new(&top, (0.0, std::f64::consts::TAU), 37, move |s| [Dual::constant(wc), s]);
        let other = CurveOnSurface::new(&p.mirrored(p.height(wc)), (0.0, std::f64::consts::TAU), 37, move |s| {
            [Dual::constant(-wc), s]
        });
        let contact = IntersectionData::new(&rim, &other).unwrap();
        let disk = DiskSurface { immersion: top, bbox: ((wc, 3.5), (0.0, 6.0)), inside: Arc::new(|_, _| true) };
        let spec = DiskBoundarySpec { arcs: vec![rim], vertex_angles: vec![] };
        let rep = disk_report(&disk, &spec, &[Companion { arc: 0, contact }], VertexRule::FewerThanThree, 10).unwrap();
        assert!(rep.hypotheses_hold, "{:?}", rep.violated);
        assert!(rep.qar_max < 1e-8, "{}", rep.qar_max);
    }
}
