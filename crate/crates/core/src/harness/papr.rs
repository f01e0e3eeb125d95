//! PAPR statistics of the launched waveform for each transmitter variant.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modem::{Constellation, Scheme};
use crate::numerics::{stream_id, Cplx, RngStream};
use crate::txchain::{ccdf, papr_db, synthesize_waveform, transmit_tones, Mode, TxOptions};

use super::ber::{pool, workers_from_env};
use super::config::ExperimentConfig;

/// Clipping ratio used for the clipped-OFDM curve when the config leaves
/// clipping off.
pub const REFERENCE_CLIP_CR_DB: f64 = 3.0;

const SYMBOLS_PER_TASK: usize = 512;

/// One transmitter variant of the PAPR comparison.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PaprVariant {
    pub mode: Mode,
    pub scheme: Scheme,
    /// `+inf` when unclipped.
    pub clip_cr_db: f64,
}

impl PaprVariant {
    pub fn label(&self) -> String {
        if self.clip_cr_db.is_finite() {
            format!("{} {} clipped {} dB", self.mode, self.scheme, self.clip_cr_db)
        } else {
            format!("{} {}", self.mode, self.scheme)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CcdfRecord {
    pub threshold_db: f64,
    pub probability: f64,
}

/// Per-polarization PAPR samples of one variant.
#[derive(Clone, Debug)]
pub struct PaprCurve {
    pub variant: PaprVariant,
    pub samples: Vec<f64>,
}

impl PaprCurve {
    /// CCDF on a 0.1 dB grid from 0 dB up to the largest observed PAPR.
    pub fn ccdf_records(&self) -> Vec<CcdfRecord> {
        let max = self.samples.iter().cloned().fold(0.0, f64::max);
        let steps = (max * 10.0).ceil() as usize + 1;
        let thresholds: Vec<f64> = (0..=steps).map(|i| i as f64 / 10.0).collect();
        ccdf(&self.samples, &thresholds)
            .expect("curve has samples")
            .into_iter()
            .map(|(threshold_db, probability)| CcdfRecord {
                threshold_db,
                probability,
            })
            .collect()
    }

    /// Smallest threshold whose exceedance probability is at most `level`.
    pub fn threshold_at(&self, level: f64) -> f64 {
        papr_at_ccdf(&self.samples, level)
    }
}

/// Smallest `γ` with empirical `P(PAPR > γ) <= level`.
pub fn papr_at_ccdf(samples: &[f64], level: f64) -> f64 {
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let allowed = ((level * n as f64).floor() as usize).min(n);
    if allowed >= n {
        return f64::NEG_INFINITY;
    }
    s[n - 1 - allowed]
}

/// The variants compared: both modes with both constellations, plus
/// clipped OFDM for both constellations.
pub fn papr_variants(cfg: &ExperimentConfig) -> Vec<PaprVariant> {
    let cr = cfg.clipping().unwrap_or(REFERENCE_CLIP_CR_DB);
    let mut out = Vec::new();
    for mode in [Mode::DftSpread, Mode::Ofdm] {
        for scheme in [Scheme::Qpsk, Scheme::Qam16] {
            out.push(PaprVariant {
                mode,
                scheme,
                clip_cr_db: f64::INFINITY,
            });
        }
    }
    for scheme in [Scheme::Qpsk, Scheme::Qam16] {
        out.push(PaprVariant {
            mode: Mode::Ofdm,
            scheme,
            clip_cr_db: cr,
        });
    }
    out
}

/// PAPR samples for `symbols` random frames of one variant. The transmitter
/// (including any clipper) runs first, then the launched tones are
/// resynthesized at the frame's oversampling factor for measurement.
pub fn papr_samples(
    cfg: &ExperimentConfig,
    variant: &PaprVariant,
    variant_index: u64,
    symbols: usize,
) -> Result<Vec<f64>> {
    let m = cfg.n_subcarriers;
    let os = cfg.oversample;
    let constellation = Constellation::new(variant.scheme);
    let tx = TxOptions::new(variant.mode).with_clip(variant.clip_cr_db);
    let tasks = symbols.div_ceil(SYMBOLS_PER_TASK);
    let chunks = (0..tasks)
        .into_par_iter()
        .map(|task| {
            let mut rng = RngStream::new(cfg.seed, stream_id(&[u64::MAX, variant_index, task as u64]));
            let count = SYMBOLS_PER_TASK.min(symbols - task * SYMBOLS_PER_TASK);
            let mut bits = vec![0u8; m * constellation.bits_per_symbol()];
            let mut s = vec![Cplx::default(); m];
            let mut out = Vec::with_capacity(2 * count);
            for _ in 0..count {
                for _pol in 0..2 {
                    rng.fill_bits(&mut bits);
                    constellation.map_bits_into(&bits, &mut s)?;
                    let x = transmit_tones(&s, &tx)?;
                    out.push(papr_db(&synthesize_waveform(&x, os)?)?);
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(chunks.concat())
}

pub fn run_papr_experiment(cfg: &ExperimentConfig) -> Result<Vec<PaprCurve>> {
    run_papr_experiment_with(cfg, workers_from_env())
}

pub fn run_papr_experiment_with(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<PaprCurve>> {
    cfg.validate()?;
    if cfg.papr_symbols < 1000 {
        return Err(Error::invalid("papr_symbols", "needs at least 1000 symbols"));
    }
    let pool = pool(workers)?;
    pool.install(|| {
        papr_variants(cfg)
            .into_iter()
            .enumerate()
            .map(|(i, variant)| {
                Ok(PaprCurve {
                    variant,
                    samples: papr_samples(cfg, &variant, i as u64, cfg.papr_symbols)?,
                })
            })
            .collect()
    })
}
