//! Transmitter side: DFT spreading, oversampled waveform synthesis,
//! amplitude clipping and PAPR statistics.
//!
//! Frequency-domain vectors are indexed by tone `0..M`. When a waveform is
//! synthesized at `L` times the critical rate, the first `ceil(M/2)` tones
//! sit at non-negative frequencies (bins `0..ceil(M/2)`) and the remainder
//! at negative frequencies (the top `floor(M/2)` bins), so the occupied
//! band is contiguous about DC. Waveforms are scaled so their mean sample
//! power equals `‖x‖² / M`, independent of `L`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{
    dft_unitary, dft_unitary_in_place, energy, idft_unitary_in_place, Cplx, ZERO,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// QAM symbols are DFT-spread before the OFDM modulator.
    DftSpread,
    /// Conventional OFDM: QAM symbols drive the tones directly.
    Ofdm,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::DftSpread => "dft_spread",
            Mode::Ofdm => "ofdm",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dft_spread" | "dft-spread" | "dfts" => Ok(Mode::DftSpread),
            "ofdm" => Ok(Mode::Ofdm),
            other => Err(Error::invalid("mode", format!("unknown mode `{other}`"))),
        }
    }
}

/// Where the clipper sits relative to the interpolator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClipRate {
    /// Clip the critically sampled (`L = 1`) waveform.
    #[default]
    Critical,
    /// Clip the waveform at the frame's oversampling factor; energy pushed
    /// out of band is discarded when returning to tones.
    Oversampled,
}

/// Frame geometry shared by transmitter, channel and receiver.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameConfig {
    /// Subcarrier count `M`.
    pub subcarriers: usize,
    /// Symbols per second.
    pub symbol_rate: f64,
    /// Cyclic-prefix overhead; bookkeeping only, no samples are replicated.
    pub cp_fraction: f64,
    /// Oversampling factor `L_os` used for PAPR measurement.
    pub oversample: usize,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig {
            subcarriers: 256,
            symbol_rate: 25e9,
            cp_fraction: 0.0,
            oversample: 4,
        }
    }
}

impl FrameConfig {
    /// Useful symbol duration (excluding CP), `M / symbol_rate`.
    pub fn symbol_duration(&self) -> f64 {
        self.subcarriers as f64 / self.symbol_rate
    }

    pub fn sample_interval(&self) -> f64 {
        self.symbol_duration() / (self.oversample * self.subcarriers) as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.subcarriers == 0 {
            return Err(Error::invalid("n_subcarriers", "must be positive"));
        }
        if !(self.symbol_rate > 0.0 && self.symbol_rate.is_finite()) {
            return Err(Error::invalid("symbol_rate_gbaud", "must be positive"));
        }
        if !(self.cp_fraction >= 0.0 && self.cp_fraction.is_finite()) {
            return Err(Error::invalid("cp_fraction", "must be non-negative"));
        }
        if self.oversample == 0 {
            return Err(Error::invalid("oversample", "must be at least 1"));
        }
        Ok(())
    }
}

/// Data symbols `s` and their frequency-domain image `x` for both polarizations.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolFrame {
    pub mode: Mode,
    pub s: [Vec<Cplx>; 2],
    pub x: [Vec<Cplx>; 2],
}

impl SymbolFrame {
    pub fn new(mode: Mode, s: [Vec<Cplx>; 2]) -> Result<Self> {
        if s[0].len() != s[1].len() {
            return Err(Error::LengthMismatch {
                expected: s[0].len(),
                actual: s[1].len(),
            });
        }
        let x = match mode {
            Mode::DftSpread => [spread(&s[0])?, spread(&s[1])?],
            Mode::Ofdm => s.clone(),
        };
        Ok(SymbolFrame { mode, s, x })
    }

    pub fn subcarriers(&self) -> usize {
        self.s[0].len()
    }
}

/// DFT spreading of one polarization's QAM symbols.
pub fn spread(s: &[Cplx]) -> Result<Vec<Cplx>> {
    dft_unitary(s)
}

fn positive_tones(m: usize) -> usize {
    m.div_ceil(2)
}

/// Oversampled time-domain samples for tone vector `x`.
pub fn synthesize_waveform(x: &[Cplx], oversample: usize) -> Result<Vec<Cplx>> {
    let m = x.len();
    if m == 0 {
        return Err(Error::EmptyInput);
    }
    if oversample == 0 {
        return Err(Error::invalid("oversample", "must be at least 1"));
    }
    let n = oversample * m;
    let h = positive_tones(m);
    let mut buf = vec![ZERO; n];
    buf[..h].copy_from_slice(&x[..h]);
    buf[n - (m - h)..].copy_from_slice(&x[h..]);
    idft_unitary_in_place(&mut buf)?;
    if oversample > 1 {
        let g = (oversample as f64).sqrt();
        buf.iter_mut().for_each(|z| *z *= g);
    }
    Ok(buf)
}

/// Inverse of [`synthesize_waveform`]: recovers the `m` occupied tones,
/// discarding anything outside the band.
pub fn waveform_to_tones(w: &[Cplx], m: usize) -> Result<Vec<Cplx>> {
    if m == 0 || w.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !w.len().is_multiple_of(m) {
        return Err(Error::LengthMismatch {
            expected: m * (w.len() / m).max(1),
            actual: w.len(),
        });
    }
    let oversample = w.len() / m;
    let n = w.len();
    let mut buf = w.to_vec();
    dft_unitary_in_place(&mut buf)?;
    let h = positive_tones(m);
    let mut x = Vec::with_capacity(m);
    x.extend_from_slice(&buf[..h]);
    x.extend_from_slice(&buf[n - (m - h)..]);
    if oversample > 1 {
        let g = 1.0 / (oversample as f64).sqrt();
        x.iter_mut().for_each(|z| *z *= g);
    }
    Ok(x)
}

fn rms(w: &[Cplx]) -> f64 {
    (energy(w) / w.len() as f64).sqrt()
}

/// Clipping amplitude `A = P · 10^(cr_db/20)` for RMS amplitude `P` of `w`.
pub fn clip_threshold(w: &[Cplx], cr_db: f64) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::EmptyInput);
    }
    let p = rms(w);
    if !(p > 0.0) {
        return Err(Error::ZeroWaveform);
    }
    Ok(p * 10f64.powf(cr_db / 20.0))
}

/// Envelope clipping at clipping ratio `cr_db` relative to the RMS
/// amplitude of `w`. Samples above the threshold keep their phase; the rest
/// are untouched. `cr_db = +inf` disables clipping.
pub fn clip(w: &[Cplx], cr_db: f64) -> Result<Vec<Cplx>> {
    if cr_db.is_nan() {
        return Err(Error::invalid("clip_cr_db", "NaN"));
    }
    let a = clip_threshold(w, cr_db)?;
    if cr_db == f64::INFINITY {
        return Ok(w.to_vec());
    }
    Ok(w
        .iter()
        .map(|&z| {
            let r = z.norm();
            if r > a {
                z * (a / r)
            } else {
                z
            }
        })
        .collect())
}

/// Peak-to-average power ratio in dB.
pub fn papr_db(w: &[Cplx]) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mean = energy(w) / w.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::ZeroWaveform);
    }
    let peak = w.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    Ok(10.0 * (peak / mean).log10())
}

/// Empirical `P(PAPR > threshold)` for each threshold.
pub fn ccdf(samples: &[f64], thresholds: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(thresholds
        .iter()
        .map(|&t| {
            let at_or_below = sorted.partition_point(|&v| v <= t);
            (t, (sorted.len() - at_or_below) as f64 / n)
        })
        .collect())
}

/// Per-polarization oversampled waveform.
#[derive(Clone, Debug, PartialEq)]
pub struct Waveform {
    pub samples: [Vec<Cplx>; 2],
    pub sample_interval: f64,
}

impl Waveform {
    pub fn synthesize(x: &[Vec<Cplx>; 2], cfg: &FrameConfig) -> Result<Self> {
        for pol in x {
            if pol.len() != cfg.subcarriers {
                return Err(Error::LengthMismatch {
                    expected: cfg.subcarriers,
                    actual: pol.len(),
                });
            }
        }
        Ok(Waveform {
            samples: [
                synthesize_waveform(&x[0], cfg.oversample)?,
                synthesize_waveform(&x[1], cfg.oversample)?,
            ],
            sample_interval: cfg.sample_interval(),
        })
    }

    /// Clips each polarization against its own RMS amplitude.
    pub fn clip(&self, cr_db: f64) -> Result<Self> {
        Ok(Waveform {
            samples: [clip(&self.samples[0], cr_db)?, clip(&self.samples[1], cr_db)?],
            sample_interval: self.sample_interval,
        })
    }

    pub fn papr_db(&self) -> Result<[f64; 2]> {
        Ok([papr_db(&self.samples[0])?, papr_db(&self.samples[1])?])
    }
}

/// Transmitter options for turning data symbols into launched tones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TxOptions {
    pub mode: Mode,
    /// Clipping ratio in dB; `+inf` disables the clipper.
    pub clip_cr_db: f64,
    pub clip_rate: ClipRate,
    /// Oversampling factor used when `clip_rate` is `Oversampled`.
    pub oversample: usize,
    /// Rescale the clipped waveform back to its pre-clip mean power, so the
    /// launch power (and therefore Es/N0) is the same with and without clipping.
    pub hold_launch_power: bool,
}

impl TxOptions {
    pub fn new(mode: Mode) -> Self {
        TxOptions {
            mode,
            clip_cr_db: f64::INFINITY,
            clip_rate: ClipRate::Critical,
            oversample: 1,
            hold_launch_power: true,
        }
    }

    pub fn with_clip(mut self, cr_db: f64) -> Self {
        self.clip_cr_db = cr_db;
        self
    }

    pub fn clipping(&self) -> bool {
        self.clip_cr_db.is_finite()
    }
}

/// Data symbols of one polarization -> frequency-domain tones actually
/// launched, including spreading and (optionally) clipping.
pub fn transmit_tones(s: &[Cplx], opts: &TxOptions) -> Result<Vec<Cplx>> {
    let x = match opts.mode {
        Mode::DftSpread => spread(s)?,
        Mode::Ofdm => s.to_vec(),
    };
    if !opts.clipping() {
        return Ok(x);
    }
    let os = match opts.clip_rate {
        ClipRate::Critical => 1,
        ClipRate::Oversampled => opts.oversample.max(1),
    };
    let w = synthesize_waveform(&x, os)?;
    let mut clipped = clip(&w, opts.clip_cr_db)?;
    if opts.hold_launch_power {
        let g = rms(&w) / rms(&clipped);
        clipped.iter_mut().for_each(|z| *z *= g);
    }
    waveform_to_tones(&clipped, x.len())
}
