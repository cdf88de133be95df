//! Command implementations. Each returns an [`Outcome`]; writing it out and
//! choosing the exit code is left to the caller.

use std::time::Instant;

use crate::cli::{Command, CrCmd, LatticeCmd, LimitCmd, NlsCmd, OnedimCmd};
use crate::report::Outcome;

pub mod cr;
pub mod lattice;
pub mod limit;
pub mod nls;
pub mod onedim;

/// A configuration problem (bad flag value, unreadable or invalid config
/// file); mapped to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

/// Runs one command.
pub fn run(command: &Command) -> anyhow::Result<Outcome> {
    let start = Instant::now();
    let outcome = match command {
        Command::Lattice(LatticeCmd::Density(a)) => lattice::density(a),
        Command::Lattice(LatticeCmd::ResonantCount(a)) => lattice::resonant_count(a),
        Command::Lattice(LatticeCmd::StrichartzScan(a)) => lattice::strichartz_scan(a),
        Command::Cr(CrCmd::Stationary(a)) => cr::stationary(a),
        Command::Cr(CrCmd::Evolve(a)) => cr::evolve(a),
        Command::Cr(CrCmd::Hamiltonian(a)) => cr::hamiltonian(a),
        Command::Limit(LimitCmd::TlVsT(a)) => limit::tl_vs_t(a),
        Command::Nls(NlsCmd::Compare(a)) => nls::compare(a),
        Command::Nls(NlsCmd::Rescale(a)) => nls::rescale(a),
        Command::Nls(NlsCmd::PhaseProbe(a)) => nls::phase_probe(a),
        Command::Nls(NlsCmd::Mass(a)) => nls::mass(a),
        Command::Onedim(OnedimCmd::Check(a)) => onedim::check(a),
    }?;
    Ok(outcome.with_elapsed(start.elapsed()))
}

/// Whether an error is a configuration problem rather than a failed run.
pub fn is_config_error(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        e.is::<ConfigError>()
            || e.is::<serde_json::Error>()
            || matches!(
                e.downcast_ref::<crlimit::Error>(),
                Some(crlimit::Error::InvalidInput(_) | crlimit::Error::InvalidParameter(_))
            )
    })
}

/// Reads a JSON configuration file.
pub(crate) fn load_config<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("parsing {}: {e}", path.display())).into())
}

/// Builds an outcome skeleton.
pub(crate) fn outcome(command: &str, config: &impl serde::Serialize) -> anyhow::Result<Outcome> {
    Ok(Outcome {
        command: command.to_string(),
        config: serde_json::to_value(config)?,
        checks: Vec::new(),
        notes: Vec::new(),
        results: serde_json::Value::Null,
        table: Default::default(),
        elapsed_seconds: 0.0,
    })
}
