//! Coherent optical DFT-spread OFDM over a polarization-multiplexed fiber link.
//!
//! The crate models a 2x2 MIMO link: per-polarization QAM mapping, optional
//! DFT spreading, oversampled waveform synthesis with amplitude clipping, a
//! multi-span Jones-matrix fiber channel (PMD, PDL, dispersion compensated
//! per span), per-tone bias-corrected MMSE equalization and hard-decision
//! detection. [`harness`] drives BER and PAPR experiments on top of it.
//!
//! ```
//! use optical_dfts::prelude::*;
//!
//! let frame = FrameConfig { subcarriers: 64, ..FrameConfig::default() };
//! let mut rng = RngStream::new(7, 0);
//! let link = draw_link(&FiberParams::default(), &mut rng).unwrap();
//! let ch = ToneChannel::from_link(&link, &frame, 0.0).unwrap();
//! let eq = ToneEqualizer::new(&ch).unwrap();
//!
//! let qpsk = Constellation::new(Scheme::Qpsk);
//! let bits = [rng.bits(128), rng.bits(128)];
//! let s = [qpsk.map_bits(&bits[0]).unwrap(), qpsk.map_bits(&bits[1]).unwrap()];
//! let frame_syms = SymbolFrame::new(Mode::DftSpread, s).unwrap();
//! let y = apply_channel(&frame_syms.x, &ch, &mut rng).unwrap();
//! let out = EqualizerOutput::new(eq.equalize(&y).unwrap(), Mode::DftSpread).unwrap();
//! assert_eq!(qpsk.demap_hard(&out.s_hat[0]), bits[0]);
//! ```

pub mod channel;
pub mod error;
pub mod harness;
pub mod modem;
pub mod numerics;
pub mod rxchain;
pub mod txchain;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::channel::{
        apply_channel, cd_phase, draw_link, frequency_grid, sigma2_from_esn0, tone_transfer,
        FiberParams, LinkRealization, SpanDraw, ToneChannel,
    };
    pub use crate::error::{Error, Result};
    pub use crate::modem::{Constellation, Scheme};
    pub use crate::numerics::{dft_unitary, idft_unitary, Cplx, Mat2, RngStream};
    pub use crate::rxchain::{
        count_errors, despread, mmse_equalize, mmse_matrix, EqualizerOutput, ErrorCount,
        ToneEqualizer,
    };
    pub use crate::txchain::{
        ccdf, clip, papr_db, spread, synthesize_waveform, transmit_tones, ClipRate, FrameConfig,
        Mode, SymbolFrame, TxOptions, Waveform,
    };
}
