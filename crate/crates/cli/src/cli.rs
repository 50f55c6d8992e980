use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fanofit::MeasurementMode;

#[derive(Parser, Debug)]
#[command(
    name = "fanofit",
    version,
    about = "Resonator circle fits with Fano leakage uncertainty"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit one trace and report the Q_i range for a leakage bound
    Fit(FitArgs),
    /// Fit many traces, in manifest order
    Sweep(SweepArgs),
    /// Calibrate the leakage amplitude from a sweep of centerpoints
    Trajectory(TrajectoryArgs),
    /// Relative Q_i uncertainty chart as CSV
    Bands(BandsArgs),
    /// Write synthetic traces, lineshape galleries or background patterns
    Synth(SynthArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Reflection,
    Notch,
}

impl From<Mode> for MeasurementMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Reflection => MeasurementMode::Reflection,
            Mode::Notch => MeasurementMode::NotchTransmission,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Baseline {
    /// Point of the fitted circle opposite the resonance
    Circle,
    /// Mean of the span edges
    Edge,
}

/// Options shared by every command that fits traces.
#[derive(Args, Debug, Clone)]
pub struct FitOptions {
    #[arg(long, value_enum, default_value_t = Mode::Reflection)]
    pub mode: Mode,
    /// Assumed leakage bound as isolation in dB (b = 10^(dB/20))
    #[arg(long, default_value_t = -20.0, allow_negative_numbers = true, conflicts_with = "bound")]
    pub bound_db: f64,
    /// Assumed leakage bound as a linear amplitude
    #[arg(long)]
    pub bound: Option<f64>,
    /// Cable delay: "auto", "off" or a value in seconds
    #[arg(long, default_value = "auto")]
    pub delay: String,
    #[arg(long, value_enum, default_value_t = Baseline::Circle)]
    pub baseline: Baseline,
    /// Skip geometric and joint least-squares refinement
    #[arg(long)]
    pub no_refine: bool,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub opts: FitOptions,
    /// Write the report here instead of stdout
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Trace files or glob patterns
    pub inputs: Vec<String>,
    /// CSV with a `path` column and an optional `label` column
    #[arg(long, conflicts_with = "inputs")]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub opts: FitOptions,
    /// Exit 0 even when some traces fail
    #[arg(long)]
    pub keep_going: bool,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Also write the summary table as CSV
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrajectoryArgs {
    /// Trace files carrying a numeric `# label:` line
    pub inputs: Vec<String>,
    /// CSV with `path` and numeric `label` columns
    #[arg(long, conflicts_with_all = ["inputs", "centers"])]
    pub manifest: Option<PathBuf>,
    /// CSV of already fitted centerpoints: label,re,im,q_l
    #[arg(long, conflicts_with = "inputs")]
    pub centers: Option<PathBuf>,
    #[command(flatten)]
    pub opts: FitOptions,
    /// Tukey reweighting of off-circle points
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub robust: bool,
    /// Drop traces that fail to fit instead of aborting
    #[arg(long)]
    pub keep_going: bool,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BandsArgs {
    /// Comma-separated isolations in dB
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_values_t = fanofit::uncertainty::DEFAULT_BAND_DB, conflicts_with = "b_list")]
    pub b_list_db: Vec<f64>,
    /// Comma-separated linear leakage amplitudes
    #[arg(long, value_delimiter = ',')]
    pub b_list: Option<Vec<f64>>,
    /// Coupling range Q_i/Q_c as lo,hi
    #[arg(long, value_delimiter = ',', num_args = 1, default_values_t = [0.1, 100.0])]
    pub coupling_range: Vec<f64>,
    #[arg(long, default_value_t = fanofit::uncertainty::DEFAULT_BAND_POINTS)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Mode::Reflection)]
    pub mode: Mode,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// JSON spec; replaces the trace parameter flags
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Lossless lineshapes for five leakage phases
    #[arg(long, conflicts_with_all = ["background", "spec"])]
    pub gallery: bool,
    /// Off-resonant baseline ripple of a background path
    #[arg(long, conflicts_with = "spec")]
    pub background: bool,
    #[arg(long, default_value_t = 6e9)]
    pub f_r: f64,
    #[arg(long, default_value_t = 2e4)]
    pub q_l: f64,
    /// Q_i/Q_c, or "inf" for a lossless resonator
    #[arg(long, default_value = "1")]
    pub coupling: String,
    #[arg(long, value_enum, default_value_t = Mode::Reflection)]
    pub mode: Mode,
    /// Leakage amplitude
    #[arg(long, default_value_t = 0.0, conflicts_with = "b_db")]
    pub b: f64,
    /// Leakage as isolation in dB
    #[arg(long, allow_negative_numbers = true)]
    pub b_db: Option<f64>,
    /// Leakage phase (rad)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// Background path length (m); makes the leakage phase frequency dependent
    #[arg(long)]
    pub path_length: Option<f64>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub gain_re: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub gain_im: f64,
    /// Cable delay (s)
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delay: f64,
    /// Half span in linewidths around f_r
    #[arg(long, default_value_t = fanofit::synth::DEFAULT_HALF_SPAN_LINEWIDTHS)]
    pub span_linewidths: f64,
    #[arg(long, requires = "f_stop")]
    pub f_start: Option<f64>,
    #[arg(long, requires = "f_start")]
    pub f_stop: Option<f64>,
    #[arg(long, default_value_t = fanofit::synth::DEFAULT_POINTS)]
    pub points: usize,
    /// Per-quadrature noise relative to the baseline
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Stored as a `# label:` line in the trace
    #[arg(long, allow_hyphen_values = true)]
    pub label: Option<String>,
    /// Output file; stdout when absent
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Ground-truth sidecar; defaults to <out>.truth.json
    #[arg(long)]
    pub truth: Option<PathBuf>,
}
