//! Command-line surface. Every argument struct is serializable so that the
//! configuration is embedded verbatim in each report.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

/// Experiments on the continuous resonant equation and its lattice and NLS
/// approximations.
#[derive(Debug, Parser)]
#[command(name = "crlab", version, about)]
pub struct Cli {
    /// Output directory (overrides the CRLAB_OUT environment variable).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Experiment to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Experiment groups.
#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
pub enum Command {
    /// Lattice counting: visible points, resonant tuples, Strichartz sums.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// The continuous resonant equation.
    #[command(subcommand)]
    Cr(CrCmd),
    /// Discrete-to-continuous operator limit.
    #[command(subcommand)]
    Limit(LimitCmd),
    /// Cubic NLS on large boxes and on the unit torus.
    #[command(subcommand)]
    Nls(NlsCmd),
    /// The one-dimensional analogue.
    #[command(subcommand)]
    Onedim(OnedimCmd),
}

/// `lattice` subcommands.
#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
pub enum LatticeCmd {
    /// Density of visible points of [−N, N]² for N up to --n-max.
    Density(DensityArgs),
    /// Resonant tuple enumeration versus brute force.
    ResonantCount(ResonantCountArgs),
    /// Strichartz sums of flat data versus N² log N.
    StrichartzScan(StrichartzArgs),
}

/// Arguments of `lattice density`.
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct DensityArgs {
    /// Largest half-width N.
    #[arg(long, default_value_t = 2000)]
    pub n_max: u64,
}

/// Arguments of `lattice resonant-count`.
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct ResonantCountArgs {
    /// Box sizes L.
    #[arg(long = "l-list", value_delimiter = ',', default_value = "1,2,3")]
    pub l_list: Vec<u32>,
    /// Frequency cutoff of the ball.
    #[arg(long, default_value_t = 2.0)]
    pub cutoff: f64,
}

/// Arguments of `lattice strichartz-scan`.
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct StrichartzArgs {
    /// Frequency scales N (data is the indicator of |k| ≤ N).
    #[arg(long = "n-list", value_delimiter = ',', default_value = "4,8,16,32")]
    pub n_list: Vec<u64>,
}

/// `cr` subcommands.
#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
pub enum CrCmd {
    /// Fixed-point residual and rotation rate of a stationary profile.
    Stationary(StationaryArgs),
    /// Evolution with conservation, eigenspace and Fourier checks.
    Evolve(EvolveArgs),
    /// Cross-check of the three Hamiltonian evaluators and the Gaussian bound.
    Hamiltonian(HamiltonianArgs),
}

/// Arguments of `cr stationary`.
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct StationaryArgs {
    /// gaussian, e4, e6 or inv-x.
    #[arg(long, default_value = "gaussian")]
    pub profile: String,
    /// Half-width of the sampling box.
    #[arg(long, default_value_t = 6.0)]
    pub box_half: f64,
    /// Nodes per axis.
    #[arg(long, default_value_t = 32)]
    pub n: usize,
}

/// Arguments of `cr evolve`. With `--config` the JSON file replaces all
/// other flags (missing keys take the defaults).
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolveArgs {
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Data: gaussian, e4, e6 or random:<seed>.
    #[arg(long, value_delimiter = ',', default_value = "gaussian,random:3")]
    pub data: Vec<String>,
    /// Final time.
    #[arg(long, default_value_t = 1.0)]
    pub t_final: f64,
    /// Time step (the run is repeated with half the step).
    #[arg(long, default_value_t = 0.04)]
    pub dt: f64,
    /// Hermite levels kept.
    #[arg(long, default_value_t = 24)]
    pub levels: usize,
    /// Also evolve the Fourier transform and compare.
    #[arg(long)]
    pub fourier: bool,
    /// Grid nodes per axis for the Fourier check.
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
}

impl Default for EvolveArgs {
    fn default() -> Self {
        EvolveArgs {
            config: None,
            data: vec!["gaussian".into(), "random:3".into()],
            t_final: 1.0,
            dt: 0.04,
            levels: 24,
            fourier: false,
            grid: 64,
        }
    }
}

/// Arguments of `cr hamiltonian`.
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct HamiltonianArgs {
    /// Number of seeded random fields for the three-way comparison.
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// Instead of the comparison, test H ≤ π/8 on this many mass-one fields.
    #[arg(long)]
    pub maximality: Option<u64>,
    /// Field file stem (as written by the library) to evaluate instead.
    #[arg(long)]
    pub field: Option<PathBuf>,
}

/// `limit` subcommands.
#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
pub enum LimitCmd {
    /// Gap between the lattice and continuous operators on the Gaussian.
    TlVsT(TlVsTArgs),
}

/// Arguments of `limit tl-vs-t`.
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct TlVsTArgs {
    /// Box sizes L.
    #[arg(long = "l-list", value_delimiter = ',', default_value = "8,16,32,64,128")]
    pub l_list: Vec<u32>,
    /// Frequency cutoff.
    #[arg(long, default_value_t = 6.0)]
    pub cutoff: f64,
    /// Weight exponent of the comparison norm.
    #[arg(long, default_value_t = 3.0)]
    pub sigma: f64,
}

/// `nls` subcommands.
#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
pub enum NlsCmd {
    /// NLS, resonant system and continuous equation compared across L.
    Compare(CompareArgs),
    /// The unit-torus normalisation of a box experiment.
    Rescale(RescaleArgs),
    /// Fit of the nonlinear phase rotation of Gaussian data.
    PhaseProbe(PhaseProbeArgs),
    /// Mass drift of the split-step scheme.
    Mass(MassArgs),
}

/// Arguments of `nls compare`. With `--config` the JSON file replaces all
/// other flags (missing keys take the defaults).
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareArgs {
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Box sizes L.
    #[arg(long = "l-list", value_delimiter = ',', default_value = "8,16,32")]
    pub l_list: Vec<u32>,
    /// Nonlinearity strength ε.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Use the focusing sign.
    #[arg(long)]
    pub focusing: bool,
    /// Horizon M in τ = t/T*.
    #[arg(long, default_value_t = 0.25)]
    pub horizon: f64,
    /// Comparison times (log-spaced in [10⁻³, M]).
    #[arg(long, default_value_t = 2)]
    pub samples: usize,
    /// Frequency cutoff of the lattice fields.
    #[arg(long, default_value_t = 3.0)]
    pub cutoff: f64,
    /// Resonant-system step in τ.
    #[arg(long, default_value_t = 0.25)]
    pub rs_dt: f64,
    /// NLS step.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// NLS modes per axis.
    #[arg(long, default_value_t = 64)]
    pub modes: usize,
    /// NLS step budget per run.
    #[arg(long, default_value_t = 5_000_000)]
    pub max_nls_steps: u64,
}

impl Default for CompareArgs {
    fn default() -> Self {
        CompareArgs {
            config: None,
            l_list: vec![8, 16, 32],
            eps: 1e-3,
            focusing: false,
            horizon: 0.25,
            samples: 2,
            cutoff: 3.0,
            rs_dt: 0.25,
            dt: 1e-3,
            modes: 64,
            max_nls_steps: 5_000_000,
        }
    }
}

/// Arguments of `nls rescale`.
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct RescaleArgs {
    /// Refinement N.
    #[arg(long = "N", alias = "n", default_value_t = 16)]
    pub n: u32,
    /// Sobolev exponent s > 1.
    #[arg(long, default_value_t = 1.5)]
    pub s: f64,
    /// Frequency cutoff (in units of N).
    #[arg(long, default_value_t = 6.0)]
    pub cutoff: f64,
}

/// Arguments of `nls phase-probe`.
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct PhaseProbeArgs {
    /// Refinement N.
    #[arg(long = "N", alias = "n", default_value_t = 16)]
    pub n: u32,
    /// Sobolev exponent s > 1.
    #[arg(long, default_value_t = 1.5)]
    pub s: f64,
    /// Probe times in units of T_N.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1")]
    pub taus: Vec<f64>,
    /// Frequency cutoff (in units of N).
    #[arg(long, default_value_t = 4.0)]
    pub cutoff: f64,
    /// Resonant-system step in τ.
    #[arg(long, default_value_t = 0.25)]
    pub dtau: f64,
    /// Disable the cubic term (the fitted rate must then vanish).
    #[arg(long)]
    pub free: bool,
}

/// Arguments of `nls mass`.
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct MassArgs {
    /// Number of steps.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Step size.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Seed of the random datum.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// `onedim` subcommands.
#[derive(Clone, Debug, Subcommand, Serialize, Deserialize)]
pub enum OnedimCmd {
    /// Closed-form checks of the one-dimensional pipeline.
    Check(OnedimArgs),
}

/// Arguments of `onedim check`.
#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct OnedimArgs {
    /// Box sizes of the continuum scan.
    #[arg(long = "l-list", value_delimiter = ',', default_value = "16,64,256")]
    pub l_list: Vec<u32>,
    /// Rescaled time τ of the scan.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    /// Skip the (slower) full NLS desk check.
    #[arg(long)]
    pub skip_nls: bool,
}
