//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rayon::prelude::*;
use statrs::function::erf::erfc;

use optical_dfts::harness::verify::{ber_checks, compare_ber, papr_checks, Check};
use optical_dfts::harness::{run_papr_experiment_with, workers_from_env, ExperimentConfig, VerifyPlan};
use optical_dfts::numerics::stream_id;
use optical_dfts::prelude::*;

struct Outcome {
    passed: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn from_checks(summary: &str, checks: &[Check]) -> Self {
        Outcome {
            passed: checks.iter().all(|c| c.passed),
            summary: summary.to_string(),
            details: checks.iter().map(|c| c.to_string()).collect(),
        }
    }
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn trial_rng(tag: u64, trial: u64) -> RngStream {
    RngStream::new(20_240_601, stream_id(&[tag, trial]))
}

/// Transmits random frames through `ch_for` and counts hard-decision errors.
fn run_frames(
    tag: u64,
    frames: u64,
    scheme: Scheme,
    mode: Mode,
    ch_for: impl Fn(&mut RngStream) -> Result<ToneChannel> + Sync,
) -> Result<ErrorCount> {
    let c = Constellation::new(scheme);
    let k = c.bits_per_symbol();
    let tx = TxOptions::new(mode);
    let counts = (0..frames)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(tag, t);
            let ch = ch_for(&mut rng)?;
            let m = ch.tones();
            let eq = ToneEqualizer::new(&ch)?;
            let bits = [rng.bits(k * m), rng.bits(k * m)];
            let x = [
                transmit_tones(&c.map_bits(&bits[0])?, &tx)?,
                transmit_tones(&c.map_bits(&bits[1])?, &tx)?,
            ];
            let y = apply_channel(&x, &ch, &mut rng)?;
            let out = EqualizerOutput::new(eq.equalize(&y)?, mode)?;
            let mut total = count_errors(&bits[0], &c.demap_hard(&out.s_hat[0]), k)?;
            total += count_errors(&bits[1], &c.demap_hard(&out.s_hat[1]), k)?;
            Ok(total)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = ErrorCount::default();
    for c in counts {
        total += c;
    }
    Ok(total)
}

fn zero_noise_loopback() -> Result<Outcome> {
    let frame = FrameConfig::default();
    let fiber = FiberParams::default();
    let mut details = Vec::new();
    let mut passed = true;
    for (i, (mode, scheme)) in [
        (Mode::DftSpread, Scheme::Qpsk),
        (Mode::DftSpread, Scheme::Qam16),
        (Mode::Ofdm, Scheme::Qpsk),
        (Mode::Ofdm, Scheme::Qam16),
    ]
    .into_iter()
    .enumerate()
    {
        let per_frame = 2 * frame.subcarriers * scheme.bits_per_symbol();
        let frames = 1_000_000u64.div_ceil(per_frame as u64);
        let count = run_frames(i as u64, frames, scheme, mode, |rng| {
            ToneChannel::from_link(&draw_link(&fiber, rng)?, &frame, 0.0)
        })?;
        passed &= count.bit_errors == 0 && count.bits >= 1_000_000;
        details.push(format!(
            "{mode} {scheme}: {} errors in {} bits over {frames} links",
            count.bit_errors, count.bits
        ));
    }
    Ok(Outcome {
        passed,
        summary: "sigma2 = 0 over random 12-span links, >= 1e6 bits per mode and constellation".into(),
        details,
    })
}

fn awgn_oracle() -> Result<Outcome> {
    let m = FrameConfig::default().subcarriers;
    let mut details = Vec::new();
    let mut passed = true;
    for (i, ebn0_db) in [4.0f64, 6.0, 8.0, 10.0].into_iter().enumerate() {
        let ebn0 = 10f64.powf(ebn0_db / 10.0);
        let expected = 0.5 * erfc((2.0 * ebn0).sqrt() / std::f64::consts::SQRT_2);
        // enough bits for ~400 expected errors, at least 2e6
        let bits = (400.0 / expected).max(2e6);
        let frames = (bits / (4 * m) as f64).ceil() as u64;
        let esn0_db = ebn0_db + 10.0 * 2f64.log10();
        let sigma2 = sigma2_from_esn0(esn0_db);
        let count = run_frames(100 + i as u64, frames, Scheme::Qpsk, Mode::DftSpread, |_| {
            ToneChannel::identity(m, sigma2)
        })?;
        let n = count.bits as f64;
        let sd = (expected * (1.0 - expected) / n).sqrt();
        let z = (count.ber() - expected) / sd;
        let ok = z.abs() <= 3.0;
        passed &= ok;
        details.push(format!(
            "Eb/N0 {ebn0_db} dB: BER {:.4e} vs Q {:.4e} ({} bits, {z:+.2} sd) {}",
            count.ber(),
            expected,
            count.bits,
            if ok { "ok" } else { "outside 3 sd" }
        ));
    }
    Ok(Outcome {
        passed,
        summary: "identity channel, QPSK DFT-spread against Q(sqrt(2 Eb/N0)) within 3 sd".into(),
        details,
    })
}

fn mmse_bias_identity() -> Result<Outcome> {
    let frame = FrameConfig::default();
    let sigmas = [0.01, 0.1, 1.0];
    let worst = (0..1000u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(200, t);
            let fiber = FiberParams {
                pdl_db: 3.0 * rng.uniform(),
                ..FiberParams::default()
            };
            let ch = ToneChannel::from_link(&draw_link(&fiber, &mut rng)?, &frame, 0.0)?;
            let mut worst = 0.0f64;
            for &s2 in &sigmas {
                for h in &ch.h {
                    let gh = mmse_matrix(h, s2)? * *h;
                    worst = worst.max((gh.a11 - 1.0).norm()).max((gh.a22 - 1.0).norm());
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(Outcome {
        passed: worst < 1e-10,
        summary: "diag(G H) = (1, 1) over 1000 links x 256 tones, PDL in [0, 3] dB".into(),
        details: vec![format!(
            "sigma2 in {sigmas:?}: max |diag(G H) - 1| = {worst:.2e} (need < 1e-10)"
        )],
    })
}

fn channel_invariants() -> Result<Outcome> {
    let frame = FrameConfig::default();
    let fiber = FiberParams::default();
    let mut rng = trial_rng(300, 0);

    let lossless = FiberParams {
        pdl_db: 0.0,
        ..fiber.clone()
    };
    let mut unitary_err = 0.0f64;
    for _ in 0..100 {
        let ch = ToneChannel::from_link(&draw_link(&lossless, &mut rng)?, &frame, 0.0)?;
        for h in &ch.h {
            unitary_err = unitary_err.max((h.hermitian() * *h).max_abs_diff(&Mat2::IDENTITY));
        }
    }

    // k = 1, tau = 0, theta = 0, no CPE; dispersion stays on and is compensated
    let ch = ToneChannel::from_link(&LinkRealization::transparent(&fiber), &frame, 0.0)?;
    let exact = ch.h.iter().all(|h| *h == Mat2::IDENTITY);

    let mut sv_ok = true;
    let mut sv_range = (f64::INFINITY, 0.0f64);
    for pdl_db in [0.1, 1.0, 3.0] {
        let lossy = FiberParams {
            pdl_db,
            ..fiber.clone()
        };
        for _ in 0..100 {
            let link = draw_link(&lossy, &mut rng)?;
            let floor = link.min_gain();
            for h in &ToneChannel::from_link(&link, &frame, 0.0)?.h {
                let (lo, hi) = h.singular_values();
                sv_ok &= lo >= floor - 1e-10 && hi <= 1.0 + 1e-10;
                sv_range = (sv_range.0.min(lo / floor), sv_range.1.max(hi));
            }
        }
    }

    Ok(Outcome {
        passed: unitary_err < 1e-10 && exact && sv_ok,
        summary: "unitarity without PDL, exact identity without impairments, singular value bounds".into(),
        details: vec![
            format!("k = 1: max |H^H H - I| = {unitary_err:.2e} over 100 links x 256 tones"),
            format!("transparent spans, CD compensated: every H_m == I exactly: {exact}"),
            format!(
                "PDL 0.1/1/3 dB, 300 links: min sigma / prod(k) = {:.12}, max sigma = {:.12}",
                sv_range.0, sv_range.1
            ),
        ],
    })
}

fn papr_reproduction() -> Result<Outcome> {
    let cfg = ExperimentConfig {
        papr_symbols: 100_000,
        ..ExperimentConfig::default()
    };
    let curves = run_papr_experiment_with(&cfg, workers_from_env())?;
    Ok(Outcome::from_checks(
        "M = 256, 4x oversampling, 1e5 symbols per curve",
        &papr_checks(&curves),
    ))
}

fn ber_reproduction() -> Result<Outcome> {
    let cfg = ExperimentConfig::default();
    let plan = VerifyPlan::default();
    let qpsk = compare_ber(&cfg, Scheme::Qpsk, &plan)?;
    let qam16 = compare_ber(&cfg, Scheme::Qam16, &plan)?;
    let mut out = Outcome::from_checks("12 x 80 km link, clipping at 3 dB", &ber_checks(&qpsk, &qam16));
    for cmp in [&qpsk, &qam16] {
        out.details.push(format!(
            "{}: crossing at 1e-3 unclipped {:.2} dB, clipped {:.2} dB",
            cmp.scheme,
            cmp.unclipped_crossing().unwrap_or(f64::NAN),
            cmp.clipped_crossing().unwrap_or(f64::NAN)
        ));
    }
    Ok(out)
}

fn reproducibility() -> Result<Outcome> {
    let dir = tempfile::tempdir()?;
    let cfg = ExperimentConfig {
        esn0_grid_db: vec![2.0, 6.0, 10.0],
        links_per_point: 16,
        ..ExperimentConfig::default()
    };
    let cfg_path = dir.path().join("run.cfg");
    optical_dfts::harness::write_config(&cfg, &cfg_path)?;
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(format!("ber_{workers}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_optical-dfts"))
            .args(["ber", "--config"])
            .arg(&cfg_path)
            .arg("--out")
            .arg(&out)
            .env("SIM_WORKERS", workers)
            .status()?;
        if !status.success() {
            return Err(Error::InvalidParameter {
                name: "ber",
                reason: format!("exited with {status}"),
            });
        }
        outputs.push(std::fs::read(&out)?);
    }
    let same = outputs[0] == outputs[1];
    Ok(Outcome {
        passed: same && !outputs[0].is_empty(),
        summary: "`ber` with SIM_WORKERS=1 and SIM_WORKERS=4 writes byte-identical CSV".into(),
        details: vec![format!(
            "{} bytes vs {} bytes, identical: {same}",
            outputs[0].len(),
            outputs[1].len()
        )],
    })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("zero-noise loopback", zero_noise_loopback),
        ("awgn oracle", awgn_oracle),
        ("mmse bias identity", mmse_bias_identity),
        ("channel invariants", channel_invariants),
        ("papr ccdf ordering", papr_reproduction),
        ("ber equivalence and clipping penalty", ber_reproduction),
        ("reproducibility across workers", reproducibility),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome {
            passed: false,
            summary: format!("error: {e}"),
            details: Vec::new(),
        });
        let secs = start.elapsed().as_secs_f64();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {} {name}: {} ({secs:.1} s)", i + 1, outcome.summary);
        for d in &outcome.details {
            println!("       {d}");
        }
        if !outcome.passed {
            failures += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
