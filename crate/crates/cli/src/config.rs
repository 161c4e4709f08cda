//! Run configuration: flags override the TOML file, which overrides the
//! per-scenario defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ATOMFWM_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Respond1,
    Respond2,
    Evolve1,
    Evolve2,
    Figure2,
    Figure3,
    Spectrum,
    Schmidt,
    Pairs,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Respond1 => "respond1",
            Scenario::Respond2 => "respond2",
            Scenario::Evolve1 => "evolve1",
            Scenario::Evolve2 => "evolve2",
            Scenario::Figure2 => "figure2",
            Scenario::Figure3 => "figure3",
            Scenario::Spectrum => "spectrum",
            Scenario::Schmidt => "schmidt",
            Scenario::Pairs => "pairs",
        }
    }

    /// Pulse length in units of `c / gamma`.
    fn default_length(self) -> f64 {
        match self {
            Scenario::Respond1 | Scenario::Evolve1 | Scenario::Figure2 => 20.0,
            Scenario::Respond2 | Scenario::Evolve2 => 10.0,
            Scenario::Figure3 | Scenario::Spectrum | Scenario::Schmidt | Scenario::Pairs => 100.0,
        }
    }

    /// Cell size in units of `c / gamma`.
    fn default_dx(self) -> f64 {
        match self {
            Scenario::Respond1 | Scenario::Evolve1 => 0.01,
            Scenario::Respond2 | Scenario::Evolve2 => 0.05,
            // the +2/L extremum sits half a cell from a discontinuity
            Scenario::Figure2 => 0.025,
            Scenario::Figure3 | Scenario::Spectrum | Scenario::Schmidt | Scenario::Pairs => 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum PulseSpec {
    Rect {
        length: f64,
    },
    /// Tabulated `(x, re[, im])`; `length` is the effective pulse length.
    File {
        path: PathBuf,
        length: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub dx: f64,
    pub padding: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSpec {
    pub format: Format,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed deviation of quadrature norms and closed-form comparisons.
    pub quadrature: f64,
    /// Allowed L2 distance between the time-domain oracle and the kernels.
    pub oracle_l2: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quadrature: 5e-3,
            oracle_l2: 5e-2,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub gamma: f64,
    pub c: f64,
    pub alpha: f64,
    pub pulse: PulseSpec,
    pub grid: GridSpec,
    pub output: OutputSpec,
    pub tolerances: Tolerances,
    pub check_analytic: bool,
    pub diagnostic_harmonic: bool,
}

impl RunConfig {
    /// Effective pulse length, if known before reading a pulse file.
    pub fn length(&self) -> Option<f64> {
        match &self.pulse {
            PulseSpec::Rect { length } => Some(*length),
            PulseSpec::File { length, .. } => *length,
        }
    }
}

/// Command-line overrides shared by all scenarios.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Dipole relaxation rate.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Propagation speed.
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Pulse length.
    #[arg(long = "L", global = true)]
    pub length: Option<f64>,
    /// Cell size.
    #[arg(long, global = true)]
    pub dx: Option<f64>,
    /// Grid margin around the pulse.
    #[arg(long, global = true)]
    pub padding: Option<f64>,
    /// Coherent amplitude for `pairs`.
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Compare against the analytic kernels and fail above tolerance.
    #[arg(long, global = true)]
    pub check_analytic: bool,
    /// Also evolve with a harmonic oscillator in place of the atom.
    #[arg(long, global = true)]
    pub diagnostic_harmonic: bool,
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Two- or three-column pulse table `x, re[, im]`.
    #[arg(long, global = true)]
    pub pulse_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<Scenario>,
    pub gamma: Option<f64>,
    pub c: Option<f64>,
    pub alpha: Option<f64>,
    pub check_analytic: Option<bool>,
    pub diagnostic_harmonic: Option<bool>,
    pub pulse: Option<FilePulse>,
    pub grid: Option<FileGrid>,
    pub output: Option<FileOutput>,
    pub tolerances: Option<FileTolerances>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilePulse {
    pub shape: Option<String>,
    pub length: Option<f64>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileGrid {
    pub dx: Option<f64>,
    pub padding: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOutput {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileTolerances {
    pub quadrature: Option<f64>,
    pub oracle_l2: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

/// Merge flags, file and defaults. `env_out` is the value of
/// [`OUT_DIR_ENV`], if set.
pub fn resolve(
    scenario: Option<Scenario>,
    flags: &Overrides,
    file: &FileConfig,
    env_out: Option<PathBuf>,
) -> Result<RunConfig, CliError> {
    let scenario = match (scenario, file.scenario) {
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => {
            return Err(CliError::Config(
                "no scenario given on the command line or in the config file".into(),
            ))
        }
    };
    let fp = file.pulse.clone().unwrap_or_default();
    let fg = file.grid.clone().unwrap_or_default();
    let fo = file.output.clone().unwrap_or_default();
    let ft = file.tolerances.clone().unwrap_or_default();

    let gamma = flags.gamma.or(file.gamma).unwrap_or(1.0);
    let c = flags.c.or(file.c).unwrap_or(1.0);
    positive("gamma", gamma)?;
    positive("c", c)?;
    // defaults are quoted in units of the coherence length
    let unit = c / gamma;

    let length = flags.length.or(fp.length);
    let pulse = match (&flags.pulse_file, fp.shape.as_deref(), &fp.path) {
        (Some(path), _, _) => PulseSpec::File {
            path: path.clone(),
            length,
        },
        (None, Some("file"), Some(path)) => PulseSpec::File {
            path: path.clone(),
            length,
        },
        (None, Some("file"), None) => {
            return Err(CliError::Config(
                "pulse.shape = \"file\" needs pulse.path".into(),
            ))
        }
        (None, None | Some("rect"), _) => PulseSpec::Rect {
            length: length.unwrap_or(scenario.default_length() * unit),
        },
        (None, Some(other), _) => {
            return Err(CliError::Config(format!(
                "unknown pulse shape {other:?} (expected \"rect\" or \"file\")"
            )))
        }
    };
    if let Some(l) = length {
        positive("L", l)?;
    }

    let grid = GridSpec {
        dx: flags.dx.or(fg.dx).unwrap_or(scenario.default_dx() * unit),
        padding: flags.padding.or(fg.padding).unwrap_or(10.0 * unit),
    };
    positive("dx", grid.dx)?;
    positive("padding", grid.padding)?;

    let alpha = flags.alpha.or(file.alpha).unwrap_or(0.1);
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(CliError::Config(format!("alpha must be >= 0, got {alpha}")));
    }

    let defaults = Tolerances::default();
    let tolerances = Tolerances {
        quadrature: ft.quadrature.unwrap_or(defaults.quadrature),
        oracle_l2: ft.oracle_l2.unwrap_or(defaults.oracle_l2),
    };
    positive("tolerances.quadrature", tolerances.quadrature)?;
    positive("tolerances.oracle_l2", tolerances.oracle_l2)?;

    let output = OutputSpec {
        format: flags.format.or(fo.format).unwrap_or(Format::Csv),
        path: flags
            .out
            .clone()
            .or(fo.path)
            .or(env_out)
            .unwrap_or_else(|| PathBuf::from(".")),
    };

    Ok(RunConfig {
        scenario,
        gamma,
        c,
        alpha,
        pulse,
        grid,
        output,
        tolerances,
        check_analytic: flags.check_analytic || file.check_analytic.unwrap_or(false),
        diagnostic_harmonic: flags.diagnostic_harmonic || file.diagnostic_harmonic.unwrap_or(false),
    })
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{name} must be a positive number, got {v}"
        )))
    }
}
