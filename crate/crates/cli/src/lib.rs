//! Command-line scenario runner for `atomfwm`.
//!
//! Each scenario writes its data tables, a `<scenario>.summary.json` and a
//! `<scenario>.meta.json` sidecar into the output directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde_json::json;

pub use config::{resolve, FileConfig, Overrides, RunConfig, Scenario, OUT_DIR_ENV};
pub use error::CliError;
pub use output::{Check, Summary, Table};

#[derive(Debug, Parser)]
#[command(
    name = "atomfwm",
    version,
    about = "Photon scattering on a two-level atom",
    allow_negative_numbers = true
)]
pub struct Cli {
    /// Scenario to run. May instead come from the config file.
    #[arg(value_enum)]
    pub scenario: Option<Scenario>,
    #[command(flatten)]
    pub overrides: Overrides,
}

/// What a successful run produced.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: serde_json::Value,
    pub files: Vec<PathBuf>,
}

/// Resolve the configuration for parsed arguments, reading the config file
/// and the output-directory variable.
pub fn configure(cli: &Cli) -> Result<RunConfig, CliError> {
    let file = match &cli.overrides.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let env_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    resolve(cli.scenario, &cli.overrides, &file, env_out)
}

/// Run a resolved configuration and write all output files.
///
/// Files are written even when a tolerance check fails; the failure is
/// reported afterwards as [`CliError::Tolerance`].
pub fn execute(cfg: &RunConfig, args: &[String]) -> Result<RunReport, CliError> {
    let started = Instant::now();
    let outcome = scenarios::run(cfg)?;
    let dir = &cfg.output.path;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;

    let mut files = Vec::new();
    for t in &outcome.tables {
        files.push(t.write(dir, cfg.output.format)?);
    }
    let name = cfg.scenario.name();
    let summary_path = dir.join(format!("{name}.summary.json"));
    let meta_path = dir.join(format!("{name}.meta.json"));
    let listed: Vec<String> = files
        .iter()
        .chain([&summary_path, &meta_path])
        .map(|p| {
            p.file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned()
        })
        .collect();
    let summary = outcome
        .summary
        .to_json(cfg, outcome.length, outcome.cross_section, &listed);
    output::write_json(&summary_path, &summary)?;

    let unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64());
    let meta = json!({
        "program": "atomfwm",
        "version": env!("CARGO_PKG_VERSION"),
        "arguments": args,
        "config": cfg,
        "unix_time": unix,
        "elapsed_seconds": started.elapsed().as_secs_f64(),
    });
    output::write_json(&meta_path, &meta)?;
    files.push(summary_path);
    files.push(meta_path);

    let failed = outcome.summary.failed();
    if !failed.is_empty() {
        return Err(CliError::Tolerance(failed));
    }
    Ok(RunReport { summary, files })
}

/// Parse `args` (including the program name). Help and version requests
/// come back as `Ok(Err(_))` for the caller to print.
pub fn parse<I, T>(args: I) -> Result<Result<Cli, clap::Error>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use clap::error::ErrorKind;
    match Cli::try_parse_from(args) {
        Ok(cli) => Ok(Ok(cli)),
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            Ok(Err(e))
        }
        Err(e) => Err(CliError::Config(
            e.render().to_string().trim_end().to_string(),
        )),
    }
}

/// Parse `args` (including the program name) and run. Argument errors are
/// reported as [`CliError::Config`].
pub fn run_from<I, T>(args: I) -> Result<RunReport, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = parse(&args)?.map_err(|e| CliError::Config(e.to_string()))?;
    let cfg = configure(&cli)?;
    let text: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    execute(&cfg, &text)
}
