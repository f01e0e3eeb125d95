// Es/N0 lost at BER 1e-3 when OFDM is clipped at a 3 dB clipping ratio.

use optical_dfts::harness::verify::{compare_ber, grid, VerifyPlan};
use optical_dfts::harness::{ExperimentConfig, SweepBudget};
use optical_dfts::modem::Scheme;

pub fn run_example_with(plan: VerifyPlan) -> optical_dfts::Result<()> {
    let cfg = ExperimentConfig {
        clip_cr_db: 3.0,
        ..ExperimentConfig::default()
    };
    let cmp = compare_ber(&cfg, Scheme::Qpsk, &plan)?;
    println!("esn0_db  ofdm        clipped");
    for r in &cmp.ofdm {
        let clipped = cmp
            .clipped_ofdm
            .iter()
            .find(|c| c.esn0_db == r.esn0_db)
            .map(|c| format!("{:.3e}", c.ber))
            .unwrap_or_else(|| "-".into());
        println!("{:>7.1}  {:.3e}  {clipped}", r.esn0_db, r.ber);
    }
    match cmp.clipping_penalty_db() {
        Some(p) => println!("QPSK clipping penalty at BER 1e-3: {p:.2} dB"),
        None => println!("unclipped curve did not reach BER 1e-3 on this grid"),
    }
    Ok(())
}

pub fn run_example() -> optical_dfts::Result<()> {
    run_example_with(VerifyPlan {
        qpsk_grid_db: grid(8.0, 12.0, 1.0),
        clipped_extension_db: (2.0, 2.0),
        clipped_step_db: 1.0,
        budget: SweepBudget {
            min_bits: 20_000,
            target_errors: 40,
            max_bits: 100_000,
            batch_trials: 16,
        },
        workers: 4,
        ..VerifyPlan::default()
    })
}

#[allow(dead_code)]
fn main() -> optical_dfts::Result<()> {
    run_example_with(VerifyPlan::default())
}
