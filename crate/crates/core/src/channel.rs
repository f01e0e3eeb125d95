//! Multi-span fiber channel with per-span PDL, first-order PMD and random
//! polarization rotation, dispersion-compensated at every span.
//!
//! Per tone `m` the link is a 2x2 Jones matrix
//!
//! ```text
//! H_m = e^{jφ} e^{jΦ_D(f_m)} Π_l e^{-jΦ_D(f_m)/n_E} diag(1, k_l) diag(e^{jψ_l}, e^{-jψ_l}) R(θ_l)
//! ψ_l = π (f_c + f_m) τ_l
//! ```
//!
//! with span `l = 1` as the leftmost factor. The scalar chromatic
//! dispersion phases cancel identically (full per-span compensation), so
//! they are dropped from the product rather than evaluated and multiplied
//! back out.

use crate::error::{Error, Result};
use crate::numerics::{
    pi_product_mod_2pi, sample_gaussian_pair, sample_maxwellian, Cplx, Mat2, RngStream,
};
use crate::txchain::FrameConfig;

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Physical link parameters in SI units.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberParams {
    pub n_spans: usize,
    /// Span length, m.
    pub span_length: f64,
    /// Chromatic dispersion, s/m².
    pub cd: f64,
    /// PMD coefficient, s/√m.
    pub pmd: f64,
    /// Per-span polarization-dependent loss, dB.
    pub pdl_db: f64,
    /// Laser wavelength, m.
    pub wavelength: f64,
    /// Draw a uniform common phase error per link realization instead of 0.
    pub random_cpe: bool,
}

impl Default for FiberParams {
    /// 12 x 80 km at 1550 nm, 17 ps/nm/km, 0.15 ps/√km, 0.1 dB PDL.
    fn default() -> Self {
        FiberParams::from_engineering_units(12, 80.0, 1550.0, 17.0, 0.15, 0.1)
    }
}

impl FiberParams {
    /// Builds parameters from the units fiber datasheets use.
    pub fn from_engineering_units(
        n_spans: usize,
        span_km: f64,
        lambda_nm: f64,
        cd_ps_nm_km: f64,
        pmd_ps_sqrtkm: f64,
        pdl_db: f64,
    ) -> Self {
        FiberParams {
            n_spans,
            span_length: span_km * 1e3,
            // ps/(nm km) = 1e-12 s / (1e-9 m * 1e3 m)
            cd: cd_ps_nm_km * 1e-6,
            pmd: pmd_ps_sqrtkm * 1e-12 / 1e3f64.sqrt(),
            pdl_db,
            wavelength: lambda_nm * 1e-9,
            random_cpe: false,
        }
    }

    /// Same geometry with PMD, PDL and CPE switched off.
    pub fn without_impairments(&self) -> Self {
        FiberParams {
            pmd: 0.0,
            pdl_db: 0.0,
            random_cpe: false,
            ..self.clone()
        }
    }

    pub fn carrier_frequency(&self) -> f64 {
        SPEED_OF_LIGHT / self.wavelength
    }

    pub fn total_length(&self) -> f64 {
        self.n_spans as f64 * self.span_length
    }

    /// Per-span PDL attenuation `k = 10^(-pdl_db/20)`.
    pub fn pdl_attenuation(&self) -> f64 {
        10f64.powf(-self.pdl_db / 20.0)
    }

    /// RMS DGD of a single span, `D_p √L_span`.
    pub fn span_dgd_rms(&self) -> f64 {
        self.pmd * self.span_length.sqrt()
    }

    /// RMS DGD of the whole link, `D_p √(n_E L_span)`.
    pub fn link_dgd_rms(&self) -> f64 {
        self.pmd * self.total_length().sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_spans == 0 {
            return Err(Error::invalid("n_spans", "must be positive"));
        }
        let positive = [
            ("span_km", self.span_length),
            ("lambda_nm", self.wavelength),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("{v} must be positive")));
            }
        }
        let non_negative = [
            ("cd_ps_nm_km", self.cd),
            ("pmd_ps_sqrtkm", self.pmd),
            ("pdl_db", self.pdl_db),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("{v} must be non-negative")));
            }
        }
        Ok(())
    }
}

/// Random state of one span.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpanDraw {
    /// PDL amplitude attenuation in (0, 1].
    pub k: f64,
    /// Differential group delay, s.
    pub tau: f64,
    /// Rotation angle in [0, 2π).
    pub theta: f64,
}

impl SpanDraw {
    /// Jones matrix of the span at absolute optical frequency `freq`.
    pub fn jones(&self, freq: f64) -> Mat2 {
        let psi = pi_product_mod_2pi(freq, self.tau);
        let e = Cplx::from_polar(1.0, psi);
        let ek = e.conj() * self.k;
        let (s, c) = self.theta.sin_cos();
        Mat2::new(e * c, e * s, -ek * s, ek * c)
    }
}

/// One random draw of the whole link; fixes `H_m` for every tone.
#[derive(Clone, Debug, PartialEq)]
pub struct LinkRealization {
    pub spans: Vec<SpanDraw>,
    /// Common phase error, rad.
    pub cpe: f64,
    pub params: FiberParams,
}

impl LinkRealization {
    /// A link where every span is transparent.
    pub fn transparent(params: &FiberParams) -> Self {
        LinkRealization {
            spans: vec![
                SpanDraw {
                    k: 1.0,
                    tau: 0.0,
                    theta: 0.0
                };
                params.n_spans
            ],
            cpe: 0.0,
            params: params.clone(),
        }
    }

    /// `sqrt(Σ τ_l²)`.
    pub fn aggregate_dgd(&self) -> f64 {
        self.spans.iter().map(|s| s.tau * s.tau).sum::<f64>().sqrt()
    }

    /// Lower bound on every tone's smallest singular value, `Π k_l`.
    pub fn min_gain(&self) -> f64 {
        self.spans.iter().map(|s| s.k).product()
    }
}

/// Tone frequencies `f_m = (m - 1) / t_s`, `m = 1..=M`.
pub fn frequency_grid(m: usize, symbol_duration: f64) -> Vec<f64> {
    (0..m).map(|i| i as f64 / symbol_duration).collect()
}

/// Chromatic-dispersion phase `π c D L f² / f_c²`.
pub fn cd_phase(f: f64, params: &FiberParams, length: f64) -> f64 {
    let fc = params.carrier_frequency();
    std::f64::consts::PI * SPEED_OF_LIGHT * params.cd * length * f * f / (fc * fc)
}

/// Draws DGD, rotation per span (in span order, τ then θ), then the CPE.
pub fn draw_link(params: &FiberParams, rng: &mut RngStream) -> Result<LinkRealization> {
    params.validate()?;
    let k = params.pdl_attenuation();
    let rms = params.span_dgd_rms();
    let spans = (0..params.n_spans)
        .map(|_| {
            let tau = sample_maxwellian(rng, rms)?;
            let theta = rng.uniform_angle();
            Ok(SpanDraw { k, tau, theta })
        })
        .collect::<Result<Vec<_>>>()?;
    let cpe = if params.random_cpe {
        rng.uniform_angle()
    } else {
        0.0
    };
    Ok(LinkRealization {
        spans,
        cpe,
        params: params.clone(),
    })
}

/// Transfer matrix for tone `m` (1-based) over `grid`.
pub fn tone_transfer(link: &LinkRealization, m: usize, grid: &[f64]) -> Result<Mat2> {
    if m == 0 || m > grid.len() {
        return Err(Error::ToneOutOfRange {
            index: m,
            count: grid.len(),
        });
    }
    let freq = link.params.carrier_frequency() + grid[m - 1];
    let t = link
        .spans
        .iter()
        .fold(Mat2::IDENTITY, |acc, span| acc * span.jones(freq));
    Ok(if link.cpe == 0.0 {
        t
    } else {
        t.scale(Cplx::from_polar(1.0, link.cpe))
    })
}

/// Converts Es/N0 in dB (per polarization, unit-energy symbols) to the
/// per-entry noise variance; `+inf` gives a noiseless channel.
pub fn sigma2_from_esn0(esn0_db: f64) -> f64 {
    if esn0_db == f64::INFINITY {
        0.0
    } else {
        10f64.powf(-esn0_db / 10.0)
    }
}

/// Per-tone channel matrices and the additive noise variance.
#[derive(Clone, Debug, PartialEq)]
pub struct ToneChannel {
    pub h: Vec<Mat2>,
    pub sigma2: f64,
}

impl ToneChannel {
    pub fn new(h: Vec<Mat2>, sigma2: f64) -> Result<Self> {
        if !(sigma2 >= 0.0) {
            return Err(Error::invalid("sigma2", format!("{sigma2} is negative")));
        }
        if let Some(i) = h.iter().position(|m| !m.is_finite()) {
            return Err(Error::invalid("h", format!("tone {} is not finite", i + 1)));
        }
        Ok(ToneChannel { h, sigma2 })
    }

    pub fn from_link(link: &LinkRealization, frame: &FrameConfig, sigma2: f64) -> Result<Self> {
        let grid = frequency_grid(frame.subcarriers, frame.symbol_duration());
        let h = (1..=grid.len())
            .map(|m| tone_transfer(link, m, &grid))
            .collect::<Result<Vec<_>>>()?;
        ToneChannel::new(h, sigma2)
    }

    pub fn identity(subcarriers: usize, sigma2: f64) -> Result<Self> {
        ToneChannel::new(vec![Mat2::IDENTITY; subcarriers], sigma2)
    }

    pub fn tones(&self) -> usize {
        self.h.len()
    }
}

/// `y_m = H_m x_m + v_m` for every tone, with `x` and `y` stored per
/// polarization. Noise is drawn tone by tone, polarization 1 first.
pub fn apply_channel(
    x: &[Vec<Cplx>; 2],
    ch: &ToneChannel,
    rng: &mut RngStream,
) -> Result<[Vec<Cplx>; 2]> {
    let m = ch.tones();
    for pol in x {
        if pol.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                actual: pol.len(),
            });
        }
    }
    let mut y = [Vec::with_capacity(m), Vec::with_capacity(m)];
    for (i, h) in ch.h.iter().enumerate() {
        let mut out = h.apply([x[0][i], x[1][i]]);
        if ch.sigma2 > 0.0 {
            out[0] += sample_gaussian_pair(rng, ch.sigma2)?;
            out[1] += sample_gaussian_pair(rng, ch.sigma2)?;
        }
        y[0].push(out[0]);
        y[1].push(out[1]);
    }
    Ok(y)
}
