use std::process::ExitCode;

use clap::Parser;
use crlab::cli::Cli;
use crlab::commands::{is_config_error, run};
use crlab::report::output_dir;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(if is_config_error(&e) { 2 } else { 1 });
        }
    };
    let dir = output_dir(cli.out.as_deref());
    match outcome.write(&dir) {
        Ok((json, csv)) => eprintln!("wrote {} and {}", json.display(), csv.display()),
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    }
    for note in &outcome.notes {
        eprintln!("note: {note}");
    }
    for c in &outcome.checks {
        println!("[{}] {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("{} in {:.1} s", outcome.command, outcome.elapsed_seconds);
    if outcome.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
