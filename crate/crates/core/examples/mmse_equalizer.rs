// Per-tone bias-corrected MMSE equalization of a DFT-spread frame.

use optical_dfts::channel::{apply_channel, draw_link, FiberParams, ToneChannel};
use optical_dfts::modem::{Constellation, Scheme};
use optical_dfts::numerics::RngStream;
use optical_dfts::rxchain::{count_errors, EqualizerOutput, ToneEqualizer};
use optical_dfts::txchain::{FrameConfig, Mode, SymbolFrame};

pub fn run_example() -> optical_dfts::Result<()> {
    let frame = FrameConfig::default();
    // exaggerated PDL so the equalizer has something to undo
    let fiber = FiberParams {
        pdl_db: 1.0,
        ..FiberParams::default()
    };
    let mut rng = RngStream::new(5, 0);
    let link = draw_link(&fiber, &mut rng)?;
    let qam = Constellation::new(Scheme::Qam16);
    let m = frame.subcarriers;

    for sigma2 in [0.0, 1e-3, 1e-2] {
        let ch = ToneChannel::from_link(&link, &frame, sigma2)?;
        let eq = ToneEqualizer::new(&ch)?;
        let worst_bias = eq
            .taps()
            .iter()
            .zip(&ch.h)
            .map(|(g, h)| {
                let gh = *g * *h;
                (gh.a11 - 1.0).norm().max((gh.a22 - 1.0).norm())
            })
            .fold(0.0, f64::max);

        let bits = [rng.bits(4 * m), rng.bits(4 * m)];
        let s = [qam.map_bits(&bits[0])?, qam.map_bits(&bits[1])?];
        let tx = SymbolFrame::new(Mode::DftSpread, s)?;
        let y = apply_channel(&tx.x, &ch, &mut rng)?;
        let out = EqualizerOutput::new(eq.equalize(&y)?, Mode::DftSpread)?;
        let mut errors = 0;
        for pol in 0..2 {
            errors += count_errors(&bits[pol], &qam.demap_hard(&out.s_hat[pol]), 4)?.bit_errors;
        }
        println!(
            "sigma2 = {sigma2:<6} max |diag(G H) - 1| = {worst_bias:.1e}, bit errors {errors}/{}",
            8 * m
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> optical_dfts::Result<()> {
    run_example()
}
