//! Text dump of one link realization and its per-tone transfer matrices.
//!
//! ```text
//! # <comment lines>
//! <k> <tau_seconds> <theta_radians>            (n_spans lines)
//! <m> <re11> <im11> <re12> <im12> <re21> <im21> <re22> <im22>   (M lines)
//! ```
//!
//! Values are written with 17 significant digits; `#` lines are comments.

use std::fmt::Write as _;

use crate::channel::{draw_link, LinkRealization, SpanDraw, ToneChannel};
use crate::error::{Error, Result};
use crate::numerics::{Cplx, Mat2, RngStream};

use super::config::ExperimentConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct ChannelDump {
    pub spans: Vec<SpanDraw>,
    pub tones: Vec<Mat2>,
}

impl ChannelDump {
    pub fn new(link: &LinkRealization, ch: &ToneChannel) -> Self {
        ChannelDump {
            spans: link.spans.clone(),
            tones: ch.h.clone(),
        }
    }

    pub fn to_text(&self, header: &str) -> String {
        let mut out = String::new();
        for line in header.lines() {
            let _ = writeln!(out, "# {line}");
        }
        for s in &self.spans {
            let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", s.k, s.tau, s.theta);
        }
        for (i, h) in self.tones.iter().enumerate() {
            let _ = write!(out, "{}", i + 1);
            for z in h.entries() {
                let _ = write!(out, " {:.16e} {:.16e}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }

    /// Parses a dump back; `n_spans` tells where span lines end.
    pub fn parse(text: &str, n_spans: usize) -> Result<Self> {
        let mut spans = Vec::with_capacity(n_spans);
        let mut tones = Vec::new();
        let syntax = |line: usize, message: String| Error::ConfigSyntax { line, message };
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| syntax(idx + 1, e.to_string()))?;
            if spans.len() < n_spans {
                if nums.len() != 3 {
                    return Err(syntax(idx + 1, format!("span line has {} fields", nums.len())));
                }
                spans.push(SpanDraw {
                    k: nums[0],
                    tau: nums[1],
                    theta: nums[2],
                });
            } else {
                if nums.len() != 9 || nums[0] as usize != tones.len() + 1 {
                    return Err(syntax(idx + 1, "malformed tone line".to_string()));
                }
                let c = |i: usize| Cplx::new(nums[i], nums[i + 1]);
                tones.push(Mat2::new(c(1), c(3), c(5), c(7)));
            }
        }
        if spans.len() != n_spans {
            return Err(Error::LengthMismatch {
                expected: n_spans,
                actual: spans.len(),
            });
        }
        Ok(ChannelDump { spans, tones })
    }
}

/// Draws the link for `seed` (stream 0) and renders the dump.
pub fn channel_dump(cfg: &ExperimentConfig, seed: u64) -> Result<String> {
    cfg.validate()?;
    let fiber = cfg.fiber();
    let mut rng = RngStream::new(seed, 0);
    let link = draw_link(&fiber, &mut rng)?;
    let ch = ToneChannel::from_link(&link, &cfg.frame(), 0.0)?;
    let header = format!(
        "seed {seed}, {} spans, {} tones, cpe {:.16e} rad\n\
         span lines: k tau_s theta_rad\n\
         tone lines: m re(h11) im(h11) re(h12) im(h12) re(h21) im(h21) re(h22) im(h22)",
        fiber.n_spans, cfg.n_subcarriers, link.cpe
    );
    Ok(ChannelDump::new(&link, &ch).to_text(&header))
}
