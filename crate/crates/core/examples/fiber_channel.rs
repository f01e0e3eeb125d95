// Draws random 12-span links and inspects their per-tone Jones matrices.

use optical_dfts::channel::{cd_phase, draw_link, FiberParams, ToneChannel};
use optical_dfts::numerics::{Mat2, RngStream};
use optical_dfts::txchain::FrameConfig;

pub fn run_example() -> optical_dfts::Result<()> {
    let frame = FrameConfig::default();
    let fiber = FiberParams::default();
    println!(
        "link: {} x {} km, f_c = {:.4e} Hz, t_s = {:.3e} s",
        fiber.n_spans,
        fiber.span_length / 1e3,
        fiber.carrier_frequency(),
        frame.symbol_duration()
    );
    println!(
        "uncompensated CD phase at 12.5 GHz over the whole link: {:.2} rad",
        cd_phase(12.5e9, &fiber, fiber.total_length())
    );
    println!(
        "DGD rms per span {:.4} ps, per link {:.4} ps",
        fiber.span_dgd_rms() * 1e12,
        fiber.link_dgd_rms() * 1e12
    );

    let mut rng = RngStream::new(2024, 0);
    for trial in 0..3 {
        let link = draw_link(&fiber, &mut rng)?;
        let ch = ToneChannel::from_link(&link, &frame, 0.0)?;
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for h in &ch.h {
            let (a, b) = h.singular_values();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        println!(
            "trial {trial}: sqrt(sum tau^2) = {:.3} ps, singular values in [{lo:.5}, {hi:.5}] (bound {:.5})",
            link.aggregate_dgd() * 1e12,
            link.min_gain()
        );
    }

    let lossless = FiberParams {
        pdl_db: 0.0,
        ..fiber.clone()
    };
    let link = draw_link(&lossless, &mut rng)?;
    let ch = ToneChannel::from_link(&link, &frame, 0.0)?;
    let worst = ch
        .h
        .iter()
        .map(|h| (h.hermitian() * *h).max_abs_diff(&Mat2::IDENTITY))
        .fold(0.0, f64::max);
    println!("without PDL: max |H^H H - I| over 256 tones = {worst:.2e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> optical_dfts::Result<()> {
    run_example()
}
