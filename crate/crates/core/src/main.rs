use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use optical_dfts::harness::{
    channel_dump, parse_config, run_ber_sweep, run_papr_experiment, run_verification,
    write_ber_results, write_papr_results, VerifyPlan,
};

#[derive(Parser)]
#[command(version, about = "Coherent optical DFT-spread OFDM simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BER vs Es/N0 sweep for the configured mode, constellation and clipping.
    Ber {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// PAPR CCDFs for DFT-spread, OFDM and clipped OFDM.
    Papr {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one link realization and its per-tone Jones matrices.
    ChannelDump {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the DFT-spread vs OFDM comparison suite; non-zero exit on failure.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
}

fn run(cli: Cli) -> optical_dfts::Result<bool> {
    match cli.command {
        Command::Ber { config, out } => {
            let records = run_ber_sweep(&parse_config(config)?)?;
            write_ber_results(&records, out)?;
        }
        Command::Papr { config, out } => {
            let curves = run_papr_experiment(&parse_config(config)?)?;
            write_papr_results(&curves, out)?;
        }
        Command::ChannelDump { config, seed, out } => {
            std::fs::write(out, channel_dump(&parse_config(config)?, seed)?)?;
        }
        Command::Verify { config } => {
            let report = run_verification(&parse_config(config)?, &VerifyPlan::default())?;
            for check in &report.checks {
                println!("{check}");
            }
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
