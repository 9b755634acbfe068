use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gpscav_cli::{run, Command};

#[derive(Parser)]
#[command(name = "gpscav", version, about = "Plane stress cavity solver and inverse-problem diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration file.
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory, overriding `run.output_dir`.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Print only errors.
    #[arg(short, long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Sub {
    /// Triangulate the domain.
    Mesh(Common),
    /// Solve the forward traction problem.
    Forward(Common),
    /// Build a local Airy function and check its residuals.
    AiryCheck(Common),
    /// Stability sweep over a cavity family.
    Sweep(Common),
    /// Vanishing rate of the local energy.
    Rates(Common),
    /// Propagation-of-smallness profile.
    Profile(Common),
    /// Reconstruct a cavity from synthetic boundary data.
    Reconstruct(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, args) = match cli.command {
        Sub::Mesh(a) => (Command::Mesh, a),
        Sub::Forward(a) => (Command::Forward, a),
        Sub::AiryCheck(a) => (Command::AiryCheck, a),
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::Rates(a) => (Command::Rates, a),
        Sub::Profile(a) => (Command::Profile, a),
        Sub::Reconstruct(a) => (Command::Reconstruct, a),
    };
    let level = if args.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let start = std::time::Instant::now();
    match run(cmd, &args.config, args.output.as_deref()) {
        Ok((files, lines)) => {
            if !args.quiet {
                for l in lines {
                    println!("{l}");
                }
                for f in files {
                    println!("wrote {}", f.display());
                }
                println!("{} finished in {:.1} s", cmd.name(), start.elapsed().as_secs_f64());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gpscav {}: {e}", cmd.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
