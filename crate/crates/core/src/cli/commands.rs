//! The four subcommands. Each returns an exit code and the text for stdout.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::config::{CurvePairSpec, Format, RunConfig, SurfaceSpec};
use crate::ambient::ChartKind;
use crate::arpair::{ar_differential, holomorphy_residual, PairGrid, PairKind};
use crate::curvelab::scenarios;
use crate::curvelab::{key_lemma_verify, CurveOnSurface, IntersectionData, KeyLemmaVerdict};
use crate::error::{GeomError, Result};
use crate::gallery::meridian::{self, profile_table, Family, ProfileSummary};
use crate::gallery::{self, EntrySummary, GalleryEntry, Selection};
use crate::report::{to_json, ColumnSummary, Table};
use crate::surface::{StencilOrder, SurfaceGrid};

pub const EXIT_PASS: i32 = 0;
/// The conclusion of a checked statement failed.
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_UNMET: i32 = 4;

#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

/// Exit code for an error.
pub fn error_code(e: &GeomError) -> i32 {
    match e {
        GeomError::Params(_)
        | GeomError::Spec(_)
        | GeomError::Unsupported(_)
        | GeomError::Json(_)
        | GeomError::SmallGrid { .. }
        | GeomError::Domain { .. } => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn write(out: Option<&Path>, name: &str, text: &str) -> Result<()> {
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

fn selection(cfg: &RunConfig) -> Selection {
    Selection { kappa: cfg.kappa, tau: cfg.tau, mean: cfg.mean, kg: cfg.kg }
}

fn surface_entry(cfg: &RunConfig) -> Result<GalleryEntry> {
    if let Some(s) = &cfg.surface {
        if cfg.gallery.is_some() {
            return Err(GeomError::Spec("give either a gallery name or an inline surface, not both".into()));
        }
        let mut s = s.clone();
        if let Some(c) = cfg.chart {
            s.chart = c;
        }
        let key = s.name.clone().unwrap_or_else(|| "inline".into());
        return Ok(GalleryEntry::new(&key, s.build()?, s.domain));
    }
    let name = cfg
        .gallery
        .as_deref()
        .ok_or_else(|| GeomError::Spec("no surface: pass --gallery NAME or an inline surface in the config".into()))?;
    let entry = match (name, cfg.chart) {
        ("cyl", Some(ChartKind::CartanEktau)) => {
            let mut e = gallery::vertical_cylinder_cartan(cfg.kg.unwrap_or(1.0), 0.4)?;
            e.key = "cyl".into();
            e
        }
        _ => gallery::by_name(name, &selection(cfg))?,
    };
    if let Some(c) = cfg.chart {
        if c != entry.immersion.chart().kind {
            return Err(GeomError::Spec(format!(
                "gallery surface '{name}' lives in the {} chart, not {}",
                entry.immersion.chart().kind.name(),
                c.name()
            )));
        }
    }
    Ok(entry)
}

#[derive(Serialize)]
struct CheckSummary {
    surface: EntrySummary,
    h: f64,
    tol: f64,
    interior_nodes: usize,
    cmc: bool,
    h_spread: f64,
    structure: Vec<ColumnSummary>,
    codazzi_ar: f64,
    holomorphy: f64,
    qar_max: f64,
    qar_min: f64,
    pass: bool,
    warnings: Vec<String>,
}

/// Structure, Gauss, Codazzi and holomorphy residuals of one surface.
pub fn check_surface(cfg: &RunConfig) -> Result<Outcome> {
    let entry = surface_entry(cfg)?;
    let (h, tol) = (cfg.step(), cfg.tolerance());
    let ((u0, u1), (v0, v1)) = entry.domain;
    let grid = SurfaceGrid::covering(&entry.immersion, (u0, u1), (v0, v1), h, StencilOrder::Fourth)?;
    let structure = grid.structure_residuals()?;
    let codazzi = PairGrid::from_surface(&grid, PairKind::AbreschRosenberg).codazzi_residual()?;
    let holo = holomorphy_residual(&grid)?;
    let lat = &grid.lattice;
    let mut qar = Table::new(&["u", "v", "H", "qar_re", "qar_im", "qar_abs"]);
    for (i, j) in lat.interior() {
        let g = grid.node(i, j);
        let q: Complex64 = ar_differential(g)?;
        qar.push(vec![g.u, g.v, g.mean, q.re, q.im, q.norm()]);
    }
    let qa = qar.column("qar_abs").unwrap_or_default();
    let qar_max = qa.iter().cloned().fold(0.0, f64::max);
    let qar_min = qa.iter().cloned().fold(f64::INFINITY, f64::min);
    let cmc = structure.h_spread <= tol;
    let codazzi_ar = codazzi.max_abs("codazzi").unwrap_or(0.0);
    let holomorphy = holo.max_abs("holomorphy").unwrap_or(0.0);
    let structure_ok = structure.worst() <= tol;
    let pass = structure_ok && cmc && codazzi_ar <= tol && holomorphy <= tol;
    let mut warnings = structure.warnings.clone();
    if !cmc {
        warnings.push("surface is not CMC: Codazzi and holomorphy residuals are reported only".into());
    }
    let summary = CheckSummary {
        surface: entry.summary(),
        h,
        tol,
        interior_nodes: qar.len(),
        cmc,
        h_spread: structure.h_spread,
        structure: structure.table.summary(2),
        codazzi_ar,
        holomorphy,
        qar_max,
        qar_min,
        pass,
        warnings,
    };
    let json = to_json(&summary)?;
    let out = cfg.out.as_deref();
    write(out, "structure_residuals.csv", &structure.table.to_csv())?;
    let mut gauss = Table::new(&["u", "v", "gauss"]);
    for r in &structure.table.rows {
        gauss.push(vec![r[0], r[1], r[2]]);
    }
    write(out, "gauss_equation_residual.csv", &gauss.to_csv())?;
    write(out, "codazzi_residual.csv", &codazzi.to_csv())?;
    write(out, "holomorphy_residual.csv", &holo.to_csv())?;
    write(out, "qar.csv", &qar.to_csv())?;
    write(out, "summary.json", &json)?;
    let code = if pass {
        EXIT_PASS
    } else if !structure_ok {
        EXIT_NUMERIC
    } else if !cmc {
        EXIT_UNMET
    } else {
        EXIT_FAIL
    };
    let stdout = match cfg.format.unwrap_or_default() {
        Format::Json => json,
        Format::Csv => qar.to_csv(),
    };
    Ok(Outcome { code, stdout })
}

fn side_surface(spec: &SurfaceSpec) -> Result<crate::surface::Immersion> {
    match spec {
        SurfaceSpec::Named { gallery: name, kappa, tau, mean, kg } => {
            let sel = Selection { kappa: *kappa, tau: *tau, mean: *mean, kg: *kg };
            Ok(gallery::by_name(name, &sel)?.immersion)
        }
        SurfaceSpec::Inline(s) => s.build(),
    }
}

fn inline_pair(spec: &CurvePairSpec, samples: usize) -> Result<IntersectionData> {
    let mut curves = Vec::new();
    for (side, label) in [(&spec.first, "first"), (&spec.second, "second")] {
        side.curve.check()?;
        let imm = side_surface(&side.surface)?;
        let c = side.curve.clone();
        curves.push(CurveOnSurface::new(&imm, spec.range, samples, move |s| c.eval(s)).labeled(label));
    }
    IntersectionData::new(&curves[0], &curves[1])
}

/// Key Lemma check on a named configuration or an inline curve pair.
pub fn key_lemma(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.sample_count();
    let ix = match (&cfg.curves, cfg.gallery.as_deref()) {
        (Some(_), Some(_)) => {
            return Err(GeomError::Spec("give either a named configuration or inline curves, not both".into()))
        }
        (Some(spec), None) => {
            let ix = inline_pair(spec, n)?;
            match cfg.mutate {
                Some(e) => ix.with_rotated_normal(e),
                None => ix,
            }
        }
        (None, Some(name)) => scenarios::by_name(name, n, cfg.mutate)?,
        (None, None) => {
            return Err(GeomError::Spec(format!(
                "no configuration: pass --gallery with one of {} or inline curves",
                scenarios::SCENARIOS.join(", ")
            )))
        }
    };
    let rep = key_lemma_verify(&ix);
    let json = rep.to_json(&ix)?;
    let out = cfg.out.as_deref();
    write(out, "key_lemma.json", &json)?;
    write(out, "key_lemma_tracks.csv", &rep.tracks.to_csv())?;
    let code = match rep.verdict {
        KeyLemmaVerdict::Verified => EXIT_PASS,
        KeyLemmaVerdict::Contradicted => EXIT_FAIL,
        KeyLemmaVerdict::NotApplicable(_) => EXIT_UNMET,
    };
    let stdout = match cfg.format.unwrap_or_default() {
        Format::Json => json,
        Format::Csv => rep.tracks.to_csv(),
    };
    Ok(Outcome { code, stdout })
}

/// The H²×ℝ worked example end to end.
pub fn example_h2xr(cfg: &RunConfig) -> Result<Outcome> {
    let rep = scenarios::example_h2xr(cfg.sample_count())?;
    let json = to_json(&rep)?;
    let ix = scenarios::example_pair(cfg.sample_count())?;
    let tracks = key_lemma_verify(&ix).tracks;
    let out = cfg.out.as_deref();
    write(out, "example_h2xr.json", &json)?;
    write(out, "gamma_tracks.csv", &tracks.to_csv())?;
    let stdout = match cfg.format.unwrap_or_default() {
        Format::Json => json,
        Format::Csv => tracks.to_csv(),
    };
    Ok(Outcome { code: if rep.reproduced() { EXIT_PASS } else { EXIT_NUMERIC }, stdout })
}

const DEFAULT_FAMILIES: [Family; 4] = [Family::Sphere, Family::DiskType, Family::Catenoidal, Family::Parabolic];

fn default_mean(f: Family) -> f64 {
    match f {
        Family::Sphere => std::f64::consts::FRAC_1_SQRT_2,
        Family::Bumped => 0.8,
        _ => 0.3,
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    file: String,
    self_check: bool,
    #[serde(flatten)]
    summary: ProfileSummary,
}

/// Profile CSVs for the requested families plus a JSON manifest.
pub fn meridians(cfg: &RunConfig) -> Result<Outcome> {
    let families = match &cfg.families {
        Some(names) => names
            .iter()
            .map(|n| Family::parse(n).ok_or_else(|| GeomError::Spec(format!("unknown meridian family '{n}'"))))
            .collect::<Result<Vec<_>>>()?,
        None => DEFAULT_FAMILIES.to_vec(),
    };
    let params = crate::ambient::SpaceParams::new(cfg.kappa.unwrap_or(-1.0), cfg.tau.unwrap_or(0.0))?;
    let n = cfg.samples.unwrap_or(201).max(3);
    let mut manifest = Vec::new();
    let mut csv = String::new();
    let tol = cfg.tolerance();
    for f in families {
        let h = cfg.mean.unwrap_or_else(|| default_mean(f));
        let p = Arc::new(meridian::rotational_cmc(params, h, f)?);
        let rep = profile_table(&p, n)?;
        let s = &rep.summary;
        let self_check = match f {
            Family::Bumped => true,
            _ => s.max_h_error <= tol && s.max_qar <= tol && s.closes != Some(false),
        };
        let file = format!("meridian_{}.csv", f.tag());
        write(cfg.out.as_deref(), &file, &rep.table.to_csv())?;
        csv.push_str(&format!("# {}\n", f.tag()));
        csv.push_str(&rep.table.to_csv());
        manifest.push(ManifestEntry { file, self_check, summary: rep.summary });
    }
    let json = to_json(&manifest)?;
    write(cfg.out.as_deref(), "meridians.json", &json)?;
    let ok = manifest.iter().all(|m| m.self_check);
    let stdout = match cfg.format.unwrap_or_default() {
        Format::Json => json,
        Format::Csv => csv,
    };
    Ok(Outcome { code: if ok { EXIT_PASS } else { EXIT_NUMERIC }, stdout })
}
