//! Command-line front end of the `ektau` binary.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::ambient::ChartKind;
use crate::error::GeomError;
use commands::{error_code, Outcome, EXIT_CONFIG};
use config::{Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "ektau", version, about = "CMC surfaces and Abresch-Rosenberg differentials in E(kappa, tau)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Structure, Codazzi and holomorphy residuals of a surface.
    CheckSurface(Common),
    /// Key Lemma hypotheses and conclusion along an intersection curve.
    KeyLemma {
        #[command(flatten)]
        common: Common,
        /// Rotate the second normal by up to this angle.
        #[arg(long, allow_hyphen_values = true)]
        mutate: Option<f64>,
    },
    /// The geodesic plane and the H = 1/sqrt2 sphere of H2xR.
    ExampleH2xr(Common),
    /// Profile curves of invariant CMC surfaces.
    Meridians {
        #[command(flatten)]
        common: Common,
        /// sphere, disk, catenoidal, parabolic or bumped; repeatable.
        #[arg(long = "family")]
        families: Vec<String>,
    },
}

#[derive(Args, Debug, Default)]
pub struct Common {
    /// JSON file with any of the options below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<f64>,
    /// cartan, polar or hyperboloid.
    #[arg(long, value_parser = parse_chart)]
    pub chart: Option<ChartKind>,
    #[arg(long)]
    pub gallery: Option<String>,
    /// Mean curvature.
    #[arg(long = "H", allow_hyphen_values = true)]
    pub mean: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kg: Option<f64>,
    /// Grid step.
    #[arg(long = "h", allow_hyphen_values = true)]
    pub step: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Directory for report files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

fn parse_chart(s: &str) -> Result<ChartKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
        .map_err(|_| format!("unknown chart '{s}' (cartan, polar, hyperboloid)"))
}

impl Common {
    fn resolve(&self) -> crate::Result<RunConfig> {
        let file = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            kappa: self.kappa,
            tau: self.tau,
            chart: self.chart,
            gallery: self.gallery.clone(),
            mean: self.mean,
            kg: self.kg,
            h: self.step,
            tol: self.tol,
            out: self.out.clone(),
            format: self.format,
            samples: self.samples,
            ..Default::default()
        };
        let cfg = file.overlaid(flags);
        cfg.validate()?;
        Ok(cfg)
    }
}

fn configure_threads() -> crate::Result<()> {
    if let Ok(v) = std::env::var("EKTAU_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| GeomError::Spec(format!("EKTAU_THREADS must be a positive integer, got '{v}'")))?;
        // a pool built earlier in this process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs a parsed command.
pub fn execute(cli: &Cli) -> crate::Result<Outcome> {
    configure_threads()?;
    match &cli.command {
        Command::CheckSurface(c) => commands::check_surface(&c.resolve()?),
        Command::KeyLemma { common, mutate } => {
            let mut cfg = common.resolve()?;
            cfg.mutate = mutate.or(cfg.mutate);
            cfg.validate()?;
            commands::key_lemma(&cfg)
        }
        Command::ExampleH2xr(c) => commands::example_h2xr(&c.resolve()?),
        Command::Meridians { common, families } => {
            let mut cfg = common.resolve()?;
            if !families.is_empty() {
                cfg.families = Some(families.clone());
            }
            commands::meridians(&cfg)
        }
    }
}

/// Parses `args` (program name first), runs, prints and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(o) => {
            use std::io::Write;
            // a closed pipe downstream is not our failure
            let _ = std::io::stdout().lock().write_all(o.stdout.as_bytes());
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            error_code(&e)
        }
    }
}
