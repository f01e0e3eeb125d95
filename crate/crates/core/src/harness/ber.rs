//! Deterministic parallel Monte Carlo BER sweeps.
//!
//! Trial `t` at grid point `p` draws everything (link, bits, noise) from
//! `RngStream::new(seed, stream_id(&[p, t]))`. Trials run in fixed-size
//! batches and the stopping rule is only evaluated on batch boundaries, so
//! the result depends on the seed and the budget, never on the worker count.

use rayon::prelude::*;

use crate::channel::{apply_channel, draw_link, sigma2_from_esn0, FiberParams, ToneChannel};
use crate::error::{Error, Result};
use crate::modem::{Constellation, Scheme};
use crate::numerics::{stream_id, Cplx, RngStream};
use crate::rxchain::{count_errors, EqualizerOutput, ErrorCount, ToneEqualizer};
use crate::txchain::{transmit_tones, FrameConfig, Mode, TxOptions};

use super::config::ExperimentConfig;

/// Stopping rule for one Es/N0 point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepBudget {
    /// Keep going until at least this many bits were simulated...
    pub min_bits: u64,
    /// ...and at least this many bit errors were seen...
    pub target_errors: u64,
    /// ...unless this many bits have been simulated.
    pub max_bits: u64,
    /// Link trials per scheduling batch.
    pub batch_trials: u64,
}

impl Default for SweepBudget {
    fn default() -> Self {
        SweepBudget {
            min_bits: 100_000,
            target_errors: 500,
            max_bits: 5_000_000,
            batch_trials: 64,
        }
    }
}

/// Everything one link trial needs, resolved from an [`ExperimentConfig`].
#[derive(Clone, Debug)]
pub struct LinkSimulation {
    pub fiber: FiberParams,
    pub frame: FrameConfig,
    pub constellation: Constellation,
    pub tx: TxOptions,
    pub symbols_per_link: usize,
}

impl LinkSimulation {
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        LinkSimulation {
            fiber: cfg.fiber(),
            frame: cfg.frame(),
            constellation: Constellation::new(cfg.scheme),
            tx: TxOptions::new(cfg.mode).with_clip(cfg.clip_cr_db),
            symbols_per_link: cfg.symbols_per_point,
        }
    }

    pub fn mode(&self) -> Mode {
        self.tx.mode
    }

    pub fn scheme(&self) -> Scheme {
        self.constellation.scheme()
    }

    pub fn bits_per_symbol_frame(&self) -> u64 {
        (2 * self.frame.subcarriers * self.constellation.bits_per_symbol()) as u64
    }

    /// One link draw carrying `symbols_per_link` OFDM symbols.
    pub fn run_trial(&self, sigma2: f64, rng: &mut RngStream) -> Result<ErrorCount> {
        let link = draw_link(&self.fiber, rng)?;
        let ch = ToneChannel::from_link(&link, &self.frame, sigma2)?;
        let eq = ToneEqualizer::new(&ch)?;
        let m = self.frame.subcarriers;
        let k = self.constellation.bits_per_symbol();
        let mut total = ErrorCount::default();
        let mut tx_bits = [vec![0u8; m * k], vec![0u8; m * k]];
        let mut rx_bits = vec![0u8; m * k];
        let mut s = vec![Cplx::default(); m];
        for _ in 0..self.symbols_per_link {
            let mut x: [Vec<Cplx>; 2] = Default::default();
            for (pol, bits) in tx_bits.iter_mut().enumerate() {
                rng.fill_bits(bits);
                self.constellation.map_bits_into(bits, &mut s)?;
                x[pol] = transmit_tones(&s, &self.tx)?;
            }
            let y = apply_channel(&x, &ch, rng)?;
            let out = EqualizerOutput::new(eq.equalize(&y)?, self.tx.mode)?;
            for (pol, bits) in tx_bits.iter().enumerate() {
                self.constellation.demap_hard_into(&out.s_hat[pol], &mut rx_bits);
                total += count_errors(bits, &rx_bits, k)?;
            }
        }
        Ok(total)
    }
}

/// One point of a BER curve.
#[derive(Clone, Debug, PartialEq)]
pub struct BerRecord {
    pub esn0_db: f64,
    pub mode: Mode,
    pub scheme: Scheme,
    /// `+inf` when unclipped.
    pub clip_cr_db: f64,
    pub ber: f64,
    pub bit_errors: u64,
    pub bits: u64,
    pub ci95_low: f64,
    pub ci95_high: f64,
}

impl BerRecord {
    pub fn overlaps(&self, other: &BerRecord) -> bool {
        self.ci95_low <= other.ci95_high && other.ci95_low <= self.ci95_high
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Worker count from `SIM_WORKERS`, falling back to the machine's parallelism.
pub fn workers_from_env() -> usize {
    std::env::var("SIM_WORKERS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

pub(crate) fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid("SIM_WORKERS", e.to_string()))
}

/// Simulates one Es/N0 point until the budget's stopping rule fires.
pub fn simulate_point(
    sim: &LinkSimulation,
    esn0_db: f64,
    point_index: u64,
    seed: u64,
    min_links: u64,
    budget: &SweepBudget,
) -> Result<ErrorCount> {
    let sigma2 = sigma2_from_esn0(esn0_db);
    let batch = budget.batch_trials.max(1);
    let mut total = ErrorCount::default();
    let mut next = 0u64;
    loop {
        let counts = (next..next + batch)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngStream::new(seed, stream_id(&[point_index, t]));
                sim.run_trial(sigma2, &mut rng)
            })
            .collect::<Result<Vec<_>>>()?;
        for c in counts {
            total += c;
        }
        next += batch;
        let enough_links = next >= min_links;
        let enough_bits = total.bits >= budget.min_bits;
        let enough_errors = total.bit_errors >= budget.target_errors;
        if enough_links && enough_bits && (enough_errors || total.bits >= budget.max_bits) {
            return Ok(total);
        }
    }
}

pub fn run_ber_sweep(cfg: &ExperimentConfig) -> Result<Vec<BerRecord>> {
    run_ber_sweep_with(cfg, &SweepBudget::default(), workers_from_env())
}

pub fn run_ber_sweep_with(
    cfg: &ExperimentConfig,
    budget: &SweepBudget,
    workers: usize,
) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let sim = LinkSimulation::from_config(cfg);
    let pool = pool(workers)?;
    pool.install(|| {
        cfg.esn0_grid_db
            .iter()
            .enumerate()
            .map(|(i, &esn0)| {
                let c = simulate_point(
                    &sim,
                    esn0,
                    i as u64,
                    cfg.seed,
                    cfg.links_per_point as u64,
                    budget,
                )?;
                let (lo, hi) = wilson_interval(c.bit_errors, c.bits);
                Ok(BerRecord {
                    esn0_db: esn0,
                    mode: cfg.mode,
                    scheme: cfg.scheme,
                    clip_cr_db: cfg.clip_cr_db,
                    ber: c.ber(),
                    bit_errors: c.bit_errors,
                    bits: c.bits,
                    ci95_low: lo,
                    ci95_high: hi,
                })
            })
            .collect()
    })
}

/// Es/N0 at which a BER curve first drops through `target`, by linear
/// interpolation of log10(BER) against Es/N0. A zero-error point is
/// treated as half an error over its bit count.
pub fn crossing_esn0(records: &[BerRecord], target: f64) -> Option<f64> {
    let log_ber = |r: &BerRecord| {
        let b = if r.bit_errors == 0 {
            0.5 / r.bits.max(1) as f64
        } else {
            r.ber
        };
        b.log10()
    };
    let finite: Vec<&BerRecord> = records.iter().filter(|r| r.esn0_db.is_finite()).collect();
    let lt = target.log10();
    finite.windows(2).find_map(|w| {
        let (a, b) = (log_ber(w[0]), log_ber(w[1]));
        if a >= lt && b < lt {
            let f = (lt - a) / (b - a);
            Some(w[0].esn0_db + f * (w[1].esn0_db - w[0].esn0_db))
        } else {
            None
        }
    })
}
