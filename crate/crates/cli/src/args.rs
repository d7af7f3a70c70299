//! Command line and config file.
//!
//! A config file holds `key=value` lines using the long flag names (hyphens
//! or underscores). Its entries are spliced in front of the real arguments and
//! parsed by the same clap definition, so the later command-line value wins.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qpe", version, about = "Apparatus energy change under qubit post-selection")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub opts: Opts,
    #[command(subcommand)]
    pub group: Group,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    /// Quantum clock apparatus
    #[command(subcommand)]
    Clock(ClockCmd),
    /// Jaynes-Cummings oscillator apparatus
    #[command(subcommand)]
    Jc(JcCmd),
    /// Degenerate ladder apparatus
    #[command(subcommand)]
    Deg(DegCmd),
    #[command(subcommand)]
    Scenario(ScenarioCmd),
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockCmd {
    /// Closed-form conditional shift
    Shift,
    /// Grid wavepacket shift compared with the closed form
    Numeric,
    /// Ensemble energy balance
    Balance,
    /// Off-diagonal decay of the qubit after selection from |up_z>
    Decoherence,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum JcCmd {
    /// The four single-drive sub-shifts
    Subshifts,
    /// Full conditional shift
    Shift,
    /// Numeric against closed form over a list of n0
    Converge,
    /// Rotation fidelity for coherent inputs and purity for a Fock input
    Fidelity,
    /// Sub-shift conservation residuals
    Conserve,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegCmd {
    Subshifts,
    Shift,
    /// Degenerate shift against the clock shift
    Equiv,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioCmd {
    /// Worked example at sin(theta) = 2/3
    Dice,
    /// Every model over a theta grid
    Sweep,
    /// Ground-preparation theory curves
    Stevens,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeArg {
    F,
    Perp,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmpModeArg {
    Poisson,
    Gaussian,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Default, PartialEq)]
pub struct Opts {
    /// Polar Bloch angle of the prepared state [rad]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub i_theta: Option<f64>,
    /// Azimuthal Bloch angle of the prepared state [rad]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub i_phi: Option<f64>,
    /// Measurement basis angle [rad]
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub outcome: Option<OutcomeArg>,
    /// Qubit level splitting; shifts are also reported in absolute units when given
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub omega0: Option<f64>,
    /// Mean photon number of the coherent state
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub n0: Option<f64>,
    /// Comma-separated n0 values for `jc converge` and `jc fidelity`
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub n0_list: Option<Vec<f64>>,
    /// Calibration offset: Omega0 t = theta / sqrt(n0 + m)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub m: Option<i64>,
    /// Fock window half-width in units of sqrt(n0)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub window: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub amp_mode: Option<AmpModeArg>,
    /// Clock packet width (v = 1)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma_q: Option<f64>,
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta_start: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta_end: Option<f64>,
    /// Number of grid points, endpoints included
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Envelope constant c for +-c|theta| curves
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub envelope: Option<f64>,
    /// Photon number of the Fock input in `jc fidelity`
    #[arg(long, global = true)]
    pub fock_n: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Significant digits, 6 to 17
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Run the invariant suite of the command's module instead
    #[arg(long, global = true)]
    pub selftest: bool,
}

#[derive(Debug)]
pub enum ArgError {
    /// Help or version; print and exit 0.
    Display(clap::Error),
    Usage(String),
}

/// Parses `argv`, merging the config file when one is named.
pub fn parse(argv: &[OsString]) -> Result<Cli, ArgError> {
    let first = parse_clap(argv)?;
    let Some(path) = first.opts.config.clone() else {
        return Ok(first);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| ArgError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let extra = config_args(&text)?;
    let mut merged: Vec<OsString> = Vec::with_capacity(argv.len() + extra.len());
    merged.extend(argv.iter().take(1).cloned());
    merged.extend(extra.into_iter().map(OsString::from));
    merged.extend(argv.iter().skip(1).cloned());
    parse_clap(&merged)
}

fn parse_clap(argv: &[OsString]) -> Result<Cli, ArgError> {
    Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ArgError::Display(e),
        _ => ArgError::Usage(e.render().to_string().trim_end().to_owned()),
    })
}

/// Turns config lines into `--key=value` arguments.
pub fn config_args(text: &str) -> Result<Vec<String>, ArgError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ArgError::Usage(format!("config line {}: expected key=value", lineno + 1)));
        };
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match key.as_str() {
            "config" => return Err(ArgError::Usage(format!("config line {}: nested config", lineno + 1))),
            "selftest" => match value {
                "true" => out.push("--selftest".to_owned()),
                "false" => {}
                _ => return Err(ArgError::Usage(format!("config line {}: selftest must be true or false", lineno + 1))),
            },
            _ => out.push(format!("--{key}={value}")),
        }
    }
    Ok(out)
}
