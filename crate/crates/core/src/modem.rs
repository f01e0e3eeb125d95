//! Gray-labelled QPSK and 16-QAM with unit average energy, plus a
//! nearest-neighbour hard demapper.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::Cplx;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Qpsk,
    Qam16,
}

impl Scheme {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Scheme::Qpsk => 2,
            Scheme::Qam16 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Qpsk => "qpsk",
            Scheme::Qam16 => "16qam",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qpsk" => Ok(Scheme::Qpsk),
            "16qam" | "qam16" | "16-qam" => Ok(Scheme::Qam16),
            other => Err(Error::invalid("scheme", format!("unknown scheme `{other}`"))),
        }
    }
}

/// 16-QAM per-axis amplitude for a 2-bit Gray label `(b0 b1)`:
/// 01 -> +3, 00 -> +1, 10 -> -1, 11 -> -3.
const QAM16_AXIS: [f64; 4] = [1.0, 3.0, -1.0, -3.0];

/// A constellation whose point table is indexed by integer bit label
/// (first bit of the group is the most significant).
#[derive(Clone, Debug)]
pub struct Constellation {
    scheme: Scheme,
    points: Vec<Cplx>,
}

impl Constellation {
    pub fn new(scheme: Scheme) -> Self {
        let points = match scheme {
            Scheme::Qpsk => {
                let a = std::f64::consts::FRAC_1_SQRT_2;
                let sign = |b: usize| if b == 0 { a } else { -a };
                (0..4).map(|l| Cplx::new(sign(l >> 1), sign(l & 1))).collect()
            }
            Scheme::Qam16 => {
                let a = 1.0 / 10f64.sqrt();
                (0..16)
                    .map(|l| Cplx::new(a * QAM16_AXIS[l >> 2], a * QAM16_AXIS[l & 3]))
                    .collect()
            }
        };
        Constellation { scheme, points }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.scheme.bits_per_symbol()
    }

    /// Points indexed by bit label.
    pub fn points(&self) -> &[Cplx] {
        &self.points
    }

    /// Mean energy of the point set.
    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }

    fn label_of(bits: &[u8]) -> usize {
        bits.iter().fold(0, |acc, &b| (acc << 1) | (b & 1) as usize)
    }

    /// Maps groups of `bits_per_symbol` bits onto constellation points.
    pub fn map_bits(&self, bits: &[u8]) -> Result<Vec<Cplx>> {
        let mut out = vec![Cplx::default(); self.symbol_count(bits.len())?];
        self.map_bits_into(bits, &mut out)?;
        Ok(out)
    }

    pub fn map_bits_into(&self, bits: &[u8], out: &mut [Cplx]) -> Result<()> {
        let n = self.symbol_count(bits.len())?;
        if out.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: out.len(),
            });
        }
        let k = self.bits_per_symbol();
        for (sym, group) in out.iter_mut().zip(bits.chunks_exact(k)) {
            *sym = self.points[Self::label_of(group)];
        }
        Ok(())
    }

    fn symbol_count(&self, nbits: usize) -> Result<usize> {
        let k = self.bits_per_symbol();
        if !nbits.is_multiple_of(k) {
            return Err(Error::invalid(
                "bits",
                format!("{nbits} bits is not a multiple of {k}"),
            ));
        }
        Ok(nbits / k)
    }

    /// Label of the point nearest to `y`; exact ties resolve to the smaller label.
    pub fn decide(&self, y: Cplx) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (label, p) in self.points.iter().enumerate() {
            let d = (y - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = label;
            }
        }
        best
    }

    /// Hard nearest-neighbour demapping back to bits.
    pub fn demap_hard(&self, symbols: &[Cplx]) -> Vec<u8> {
        let mut out = vec![0; symbols.len() * self.bits_per_symbol()];
        self.demap_hard_into(symbols, &mut out);
        out
    }

    pub fn demap_hard_into(&self, symbols: &[Cplx], out: &mut [u8]) {
        let k = self.bits_per_symbol();
        for (y, group) in symbols.iter().zip(out.chunks_exact_mut(k)) {
            let label = self.decide(*y);
            for (i, b) in group.iter_mut().enumerate() {
                *b = ((label >> (k - 1 - i)) & 1) as u8;
            }
        }
    }
}

pub fn map_bits(bits: &[u8], scheme: Scheme) -> Result<Vec<Cplx>> {
    Constellation::new(scheme).map_bits(bits)
}

pub fn demap_hard(symbols: &[Cplx], scheme: Scheme) -> Vec<u8> {
    Constellation::new(scheme).demap_hard(symbols)
}
