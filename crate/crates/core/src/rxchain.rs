//! Receiver side: per-tone bias-corrected linear MMSE equalization,
//! IDFT despreading and bit error counting.

use std::ops::AddAssign;

use crate::channel::ToneChannel;
use crate::error::{Error, Result};
use crate::numerics::{idft_unitary, Cplx, Mat2};
use crate::txchain::Mode;

/// Combined per-tone equalizer `G = Γ W₀`, with `W₀ = (σ²I + H^H H)⁻¹ H^H`
/// and `Γ = diag(1 / [W₀ H]_kk)`, so `diag(G H) = (1, 1)`.
///
/// For `σ² = 0` this is the zero-forcing inverse `H⁻¹`.
pub fn mmse_matrix(h: &Mat2, sigma2: f64) -> Result<Mat2> {
    if !(sigma2 >= 0.0) {
        return Err(Error::invalid("sigma2", format!("{sigma2} is negative")));
    }
    if sigma2 == 0.0 {
        return h.inv();
    }
    let hh = h.hermitian();
    let gram = hh * *h + Mat2::diag(sigma2.into(), sigma2.into());
    let w0 = gram.inv()? * hh;
    let b = w0 * *h;
    Ok(Mat2::new(
        w0.a11 / b.a11,
        w0.a12 / b.a11,
        w0.a21 / b.a22,
        w0.a22 / b.a22,
    ))
}

/// Unbiased MMSE estimate of the transmitted tone pair.
pub fn mmse_equalize(y: [Cplx; 2], h: &Mat2, sigma2: f64) -> Result<[Cplx; 2]> {
    Ok(mmse_matrix(h, sigma2)?.apply(y))
}

/// Equalizer taps for every tone of a channel, computed once per link.
#[derive(Clone, Debug)]
pub struct ToneEqualizer {
    taps: Vec<Mat2>,
}

impl ToneEqualizer {
    pub fn new(ch: &ToneChannel) -> Result<Self> {
        let taps = ch
            .h
            .iter()
            .map(|h| mmse_matrix(h, ch.sigma2))
            .collect::<Result<Vec<_>>>()?;
        Ok(ToneEqualizer { taps })
    }

    pub fn taps(&self) -> &[Mat2] {
        &self.taps
    }

    /// Equalizes received tones stored per polarization.
    pub fn equalize(&self, y: &[Vec<Cplx>; 2]) -> Result<[Vec<Cplx>; 2]> {
        let m = self.taps.len();
        for pol in y {
            if pol.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    actual: pol.len(),
                });
            }
        }
        let mut out = [Vec::with_capacity(m), Vec::with_capacity(m)];
        for (i, g) in self.taps.iter().enumerate() {
            let [a, b] = g.apply([y[0][i], y[1][i]]);
            out[0].push(a);
            out[1].push(b);
        }
        Ok(out)
    }
}

/// Equalized tones and the detector inputs derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct EqualizerOutput {
    pub x_hat: [Vec<Cplx>; 2],
    pub s_hat: [Vec<Cplx>; 2],
}

impl EqualizerOutput {
    /// Despreads `x_hat` in DFT-spread mode; passes it through for OFDM.
    pub fn new(x_hat: [Vec<Cplx>; 2], mode: Mode) -> Result<Self> {
        let s_hat = match mode {
            Mode::DftSpread => [despread(&x_hat[0])?, despread(&x_hat[1])?],
            Mode::Ofdm => x_hat.clone(),
        };
        Ok(EqualizerOutput { x_hat, s_hat })
    }
}

pub fn despread(x_hat: &[Cplx]) -> Result<Vec<Cplx>> {
    idft_unitary(x_hat)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ErrorCount {
    pub bit_errors: u64,
    pub bits: u64,
    pub symbol_errors: u64,
    pub symbols: u64,
}

impl ErrorCount {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }
}

impl AddAssign for ErrorCount {
    fn add_assign(&mut self, o: ErrorCount) {
        self.bit_errors += o.bit_errors;
        self.bits += o.bits;
        self.symbol_errors += o.symbol_errors;
        self.symbols += o.symbols;
    }
}

/// Hamming distance between two bit blocks. Symbol errors are counted over
/// consecutive groups of `bits_per_symbol` bits.
pub fn count_errors(tx: &[u8], rx: &[u8], bits_per_symbol: usize) -> Result<ErrorCount> {
    if tx.len() != rx.len() {
        return Err(Error::LengthMismatch {
            expected: tx.len(),
            actual: rx.len(),
        });
    }
    if tx.is_empty() {
        return Err(Error::EmptyInput);
    }
    let k = bits_per_symbol.max(1);
    let mut c = ErrorCount {
        bits: tx.len() as u64,
        symbols: tx.len().div_ceil(k) as u64,
        ..ErrorCount::default()
    };
    for (a, b) in tx.chunks(k).zip(rx.chunks(k)) {
        let e = a.iter().zip(b).filter(|(x, y)| x != y).count() as u64;
        c.bit_errors += e;
        c.symbol_errors += (e > 0) as u64;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{RngStream, ONE, ZERO};
    use crate::txchain::spread;
    use approx::assert_abs_diff_eq;

    fn random_mat(rng: &mut RngStream) -> Mat2 {
        let mut z = || Cplx::new(rng.standard_normal(), rng.standard_normal());
        Mat2::new(z(), z(), z(), z())
    }

    #[test]
    fn identity_channel_is_unbiased() {
        let x = [Cplx::new(0.3, -0.7), Cplx::new(-1.1, 0.2)];
        let g = mmse_matrix(&Mat2::IDENTITY, 0.5).unwrap();
        // W0 = (2/3) I and Γ = 1.5 I
        assert!(g.max_abs_diff(&Mat2::IDENTITY) < 1e-15);
        let xh = mmse_equalize(x, &Mat2::IDENTITY, 0.5).unwrap();
        assert!((xh[0] - x[0]).norm() < 1e-15 && (xh[1] - x[1]).norm() < 1e-15);
    }

    #[test]
    fn zero_noise_is_zero_forcing() {
        let mut rng = RngStream::new(1, 1);
        let h = random_mat(&mut rng);
        let g = mmse_matrix(&h, 0.0).unwrap();
        assert_eq!(g, h.inv().unwrap());
        let tiny = mmse_matrix(&h, 1e-12).unwrap();
        assert!(tiny.max_abs_diff(&g) < 1e-6);
        let singular = Mat2::new(ONE, ONE, ONE, ONE);
        assert!(mmse_matrix(&singular, 0.0).is_err());
        assert!(mmse_matrix(&h, -0.1).is_err());
    }

    /// Builds Γ W₀ H from the textbook form `Γ_kk = 1 / (1 - [(I + H^H H / σ²)⁻¹]_kk)`.
    fn bias_oracle(h: &Mat2, sigma2: f64) -> Mat2 {
        let hh = h.hermitian();
        let w0 = (hh * *h + Mat2::diag(sigma2.into(), sigma2.into())).inv().unwrap() * hh;
        let inner = (Mat2::IDENTITY + (hh * *h).scale((1.0 / sigma2).into()))
            .inv()
            .unwrap();
        let gamma = Mat2::diag(
            (1.0 / (1.0 - inner.a11)).into(),
            (1.0 / (1.0 - inner.a22)).into(),
        );
        gamma * w0 * *h
    }

    #[test]
    fn bias_identity_on_random_channels() {
        let mut rng = RngStream::new(2, 2);
        for _ in 0..200 {
            let h = random_mat(&mut rng);
            for sigma2 in [0.01, 0.1, 1.0] {
                let gh = mmse_matrix(&h, sigma2).unwrap() * h;
                assert_abs_diff_eq!(gh.a11.re, 1.0, epsilon = 1e-10);
                assert_abs_diff_eq!(gh.a22.re, 1.0, epsilon = 1e-10);
                assert!(gh.a11.im.abs() < 1e-10 && gh.a22.im.abs() < 1e-10);
                let oracle = bias_oracle(&h, sigma2);
                assert!((oracle.a11 - 1.0).norm() < 1e-8);
                assert!((oracle.a22 - 1.0).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn despread_examples() {
        let m = 64;
        let mut v = vec![ZERO; m];
        v[0] = Cplx::new((m as f64).sqrt(), 0.0);
        for z in despread(&v).unwrap() {
            assert!((z - 1.0).norm() < 1e-14);
        }
        let mut rng = RngStream::new(3, 3);
        let s: Vec<Cplx> = (0..m)
            .map(|_| Cplx::new(rng.standard_normal(), rng.standard_normal()))
            .collect();
        let back = despread(&spread(&s).unwrap()).unwrap();
        for (a, b) in s.iter().zip(&back) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn error_counting() {
        let a = vec![1u8, 0, 1, 1, 0, 0];
        assert_eq!(count_errors(&a, &a, 2).unwrap().bit_errors, 0);
        let tx = vec![0u8; 100];
        let rx = vec![1u8; 100];
        let c = count_errors(&tx, &rx, 4).unwrap();
        assert_eq!((c.bit_errors, c.bits, c.symbol_errors), (100, 100, 25));
        assert!(count_errors(&tx, &rx[..99], 2).is_err());
    }

    #[test]
    fn half_flips() {
        let mut rng = RngStream::new(4, 4);
        let n = 1_000_000;
        let tx = rng.bits(n);
        let flips = rng.bits(n);
        let rx: Vec<u8> = tx.iter().zip(&flips).map(|(a, f)| a ^ f).collect();
        let ber = count_errors(&tx, &rx, 2).unwrap().ber();
        assert!((0.497..=0.503).contains(&ber), "{ber}");
    }

    #[test]
    fn error_counts_merge() {
        let mut a = ErrorCount {
            bit_errors: 1,
            bits: 10,
            symbol_errors: 1,
            symbols: 5,
        };
        a += a;
        assert_eq!(a.bit_errors, 2);
        assert_eq!(a.bits, 20);
        assert_abs_diff_eq!(a.ber(), 0.1);
    }
}
