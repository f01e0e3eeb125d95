// PAPR of DFT-spread OFDM, OFDM and 3 dB-clipped OFDM at 4x oversampling.
//
// `cargo run --release --example papr_ccdf -- 100000` reproduces the full
// comparison; the default symbol count keeps it quick.

use optical_dfts::harness::{run_papr_experiment_with, ExperimentConfig};

pub fn run_example_with(symbols: usize) -> optical_dfts::Result<()> {
    let cfg = ExperimentConfig {
        papr_symbols: symbols,
        ..ExperimentConfig::default()
    };
    let curves = run_papr_experiment_with(&cfg, 4)?;
    println!("{:<36} {:>10} {:>10}", "variant", "@1e-2 dB", "@1e-3 dB");
    for c in &curves {
        println!(
            "{:<36} {:>10.2} {:>10.2}",
            c.variant.label(),
            c.threshold_at(1e-2),
            c.threshold_at(1e-3)
        );
    }
    Ok(())
}

pub fn run_example() -> optical_dfts::Result<()> {
    run_example_with(2000)
}

#[allow(dead_code)]
fn main() -> optical_dfts::Result<()> {
    let symbols = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(20_000);
    run_example_with(symbols)
}
