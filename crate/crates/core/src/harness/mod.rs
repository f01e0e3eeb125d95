//! Experiment orchestration: configuration files, BER sweeps, PAPR
//! statistics, CSV/text output and the comparison suite.

pub mod ber;
pub mod config;
pub mod dump;
pub mod papr;
pub mod report;
pub mod verify;

pub use ber::{
    crossing_esn0, run_ber_sweep, run_ber_sweep_with, wilson_interval, workers_from_env,
    BerRecord, LinkSimulation, SweepBudget,
};
pub use config::{parse_config, write_config, ExperimentConfig};
pub use dump::{channel_dump, ChannelDump};
pub use papr::{papr_at_ccdf, run_papr_experiment, run_papr_experiment_with, CcdfRecord, PaprCurve};
pub use report::{write_ber_results, write_papr_results};
pub use verify::{run_verification, VerifyPlan, VerifyReport};
