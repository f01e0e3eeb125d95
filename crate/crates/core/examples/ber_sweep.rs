// BER of DFT-spread OFDM and OFDM over the 12-span link, written as CSV.

use optical_dfts::harness::report::write_ber_csv;
use optical_dfts::harness::{run_ber_sweep_with, ExperimentConfig, SweepBudget};
use optical_dfts::txchain::Mode;

pub fn run_example_with(budget: SweepBudget) -> optical_dfts::Result<()> {
    let mut records = Vec::new();
    for mode in [Mode::DftSpread, Mode::Ofdm] {
        let cfg = ExperimentConfig {
            mode,
            esn0_grid_db: vec![4.0, 6.0, 8.0, 10.0],
            ..ExperimentConfig::default()
        };
        records.extend(run_ber_sweep_with(&cfg, &budget, 4)?);
    }
    write_ber_csv(&records, std::io::stdout())
}

pub fn run_example() -> optical_dfts::Result<()> {
    run_example_with(SweepBudget {
        min_bits: 20_000,
        target_errors: 50,
        max_bits: 100_000,
        batch_trials: 16,
    })
}

#[allow(dead_code)]
fn main() -> optical_dfts::Result<()> {
    run_example_with(SweepBudget::default())
}
