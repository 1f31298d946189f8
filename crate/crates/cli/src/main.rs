mod config;
mod error;
mod imgio;
mod pipeline;
mod scenefile;

use clap::Parser;

use config::{Args, RunConfig};
use error::CliError;

fn main() {
    // clap itself exits with code 2 on unparseable flags.
    let args = Args::parse();
    std::process::exit(run(&args));
}

fn run(args: &Args) -> i32 {
    if let Some(dir) = &args.emit_example {
        return report(scenefile::write_example(dir).map(|path| {
            println!("wrote {}", path.display());
            println!("wrote {}", dir.join("example_env.png").display());
        }));
    }

    if let Err(e) = init_thread_pool() {
        return report(Err(e));
    }

    let cfg = match RunConfig::from_args(args) {
        Ok(cfg) => cfg,
        Err(e) => return report(Err(e)),
    };
    report(pipeline::run(&cfg))
}

/// RCP_THREADS caps the worker count. It never changes the output bytes: all
/// randomness is keyed per pixel, so any schedule computes the same image.
fn init_thread_pool() -> Result<(), CliError> {
    let Ok(value) = std::env::var("RCP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::parse(format!("RCP_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::config(format!("failed to build thread pool: {e}")))
}

fn report(result: Result<(), CliError>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
