//! Flat `key = value` experiment configuration.
//!
//! Every key is required, unknown keys are rejected, `#` starts a comment.
//! `clip_cr_db` accepts `off`; `esn0_grid_db` is a comma-separated list
//! that may contain `inf` (noiseless point).

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::channel::FiberParams;
use crate::error::{Error, Result};
use crate::modem::Scheme;
use crate::txchain::{FrameConfig, Mode};

pub const CONFIG_KEYS: [&str; 18] = [
    "n_spans",
    "span_km",
    "lambda_nm",
    "cd_ps_nm_km",
    "pmd_ps_sqrtkm",
    "pdl_db",
    "n_subcarriers",
    "symbol_rate_gbaud",
    "cp_fraction",
    "oversample",
    "scheme",
    "mode",
    "clip_cr_db",
    "esn0_grid_db",
    "symbols_per_point",
    "links_per_point",
    "papr_symbols",
    "seed",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n_spans: usize,
    pub span_km: f64,
    pub lambda_nm: f64,
    pub cd_ps_nm_km: f64,
    pub pmd_ps_sqrtkm: f64,
    pub pdl_db: f64,
    pub n_subcarriers: usize,
    pub symbol_rate_gbaud: f64,
    pub cp_fraction: f64,
    pub oversample: usize,
    pub scheme: Scheme,
    pub mode: Mode,
    /// `+inf` when clipping is off.
    pub clip_cr_db: f64,
    pub esn0_grid_db: Vec<f64>,
    /// OFDM symbols carried by each link realization.
    pub symbols_per_point: usize,
    /// Minimum number of independent link realizations per Es/N0 point.
    pub links_per_point: usize,
    pub papr_symbols: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_spans: 12,
            span_km: 80.0,
            lambda_nm: 1550.0,
            cd_ps_nm_km: 17.0,
            pmd_ps_sqrtkm: 0.15,
            pdl_db: 0.1,
            n_subcarriers: 256,
            symbol_rate_gbaud: 25.0,
            cp_fraction: 0.0,
            oversample: 4,
            scheme: Scheme::Qpsk,
            mode: Mode::DftSpread,
            clip_cr_db: f64::INFINITY,
            esn0_grid_db: (0..=14).map(f64::from).collect(),
            symbols_per_point: 1,
            links_per_point: 100,
            papr_symbols: 100_000,
            seed: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn fiber(&self) -> FiberParams {
        FiberParams::from_engineering_units(
            self.n_spans,
            self.span_km,
            self.lambda_nm,
            self.cd_ps_nm_km,
            self.pmd_ps_sqrtkm,
            self.pdl_db,
        )
    }

    pub fn frame(&self) -> FrameConfig {
        FrameConfig {
            subcarriers: self.n_subcarriers,
            symbol_rate: self.symbol_rate_gbaud * 1e9,
            cp_fraction: self.cp_fraction,
            oversample: self.oversample,
        }
    }

    pub fn clipping(&self) -> Option<f64> {
        self.clip_cr_db.is_finite().then_some(self.clip_cr_db)
    }

    pub fn validate(&self) -> Result<()> {
        self.fiber().validate()?;
        self.frame().validate()?;
        if self.clip_cr_db.is_nan() || self.clip_cr_db == f64::NEG_INFINITY {
            return Err(Error::invalid("clip_cr_db", "must be a number or `off`"));
        }
        if self.esn0_grid_db.is_empty() {
            return Err(Error::invalid("esn0_grid_db", "grid is empty"));
        }
        if self.esn0_grid_db.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::invalid("esn0_grid_db", "entries must be numbers or inf"));
        }
        for (name, v) in [
            ("symbols_per_point", self.symbols_per_point),
            ("links_per_point", self.links_per_point),
            ("papr_symbols", self.papr_symbols),
        ] {
            if v == 0 {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        Ok(())
    }

    /// Serializes to the on-disk format, one key per line in canonical order.
    pub fn to_config_string(&self) -> String {
        let grid = self
            .esn0_grid_db
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let clip = match self.clipping() {
            Some(cr) => cr.to_string(),
            None => "off".to_string(),
        };
        let values: [String; 18] = [
            self.n_spans.to_string(),
            self.span_km.to_string(),
            self.lambda_nm.to_string(),
            self.cd_ps_nm_km.to_string(),
            self.pmd_ps_sqrtkm.to_string(),
            self.pdl_db.to_string(),
            self.n_subcarriers.to_string(),
            self.symbol_rate_gbaud.to_string(),
            self.cp_fraction.to_string(),
            self.oversample.to_string(),
            self.scheme.to_string(),
            self.mode.to_string(),
            clip,
            grid,
            self.symbols_per_point.to_string(),
            self.links_per_point.to_string(),
            self.papr_symbols.to_string(),
            self.seed.to_string(),
        ];
        let mut out = String::new();
        for (k, v) in CONFIG_KEYS.iter().zip(values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut entries: HashMap<&'static str, (usize, String)> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::ConfigSyntax {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            })?;
            let key = key.trim();
            let known = CONFIG_KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| Error::UnknownKey {
                    line,
                    key: key.to_string(),
                })?;
            if entries
                .insert(known, (line, value.trim().to_string()))
                .is_some()
            {
                return Err(Error::ConfigSyntax {
                    line,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }

        let mut fields = Fields { entries };
        let cfg = ExperimentConfig {
            n_spans: fields.number("n_spans")?,
            span_km: fields.number("span_km")?,
            lambda_nm: fields.number("lambda_nm")?,
            cd_ps_nm_km: fields.number("cd_ps_nm_km")?,
            pmd_ps_sqrtkm: fields.number("pmd_ps_sqrtkm")?,
            pdl_db: fields.number("pdl_db")?,
            n_subcarriers: fields.number("n_subcarriers")?,
            symbol_rate_gbaud: fields.number("symbol_rate_gbaud")?,
            cp_fraction: fields.number("cp_fraction")?,
            oversample: fields.number("oversample")?,
            scheme: fields.with("scheme", |v| v.parse().map_err(|e: Error| e.to_string()))?,
            mode: fields.with("mode", |v| v.parse().map_err(|e: Error| e.to_string()))?,
            clip_cr_db: fields.with("clip_cr_db", |v| {
                if v.eq_ignore_ascii_case("off") {
                    Ok(f64::INFINITY)
                } else {
                    v.parse::<f64>().map_err(|e| e.to_string())
                }
            })?,
            esn0_grid_db: fields.with("esn0_grid_db", |v| {
                v.split(',')
                    .map(|s| s.trim().parse::<f64>().map_err(|e| format!("`{s}`: {e}")))
                    .collect()
            })?,
            symbols_per_point: fields.number("symbols_per_point")?,
            links_per_point: fields.number("links_per_point")?,
            papr_symbols: fields.number("papr_symbols")?,
            seed: fields.number("seed")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

struct Fields {
    entries: HashMap<&'static str, (usize, String)>,
}

impl Fields {
    fn with<T>(
        &mut self,
        key: &'static str,
        parse: impl FnOnce(&str) -> std::result::Result<T, String>,
    ) -> Result<T> {
        let (line, value) = self.entries.remove(key).ok_or(Error::MissingKey(key))?;
        parse(&value).map_err(|e| Error::ConfigSyntax {
            line,
            message: format!("bad value for `{key}`: {e}"),
        })
    }

    fn number<T>(&mut self, key: &'static str) -> Result<T>
    where
        T: std::str::FromStr,
        T::Err: std::fmt::Display,
    {
        self.with(key, |v| v.parse::<T>().map_err(|e| e.to_string()))
    }
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    ExperimentConfig::parse_str(&fs::read_to_string(path)?)
}

pub fn write_config(cfg: &ExperimentConfig, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, cfg.to_config_string())?;
    Ok(())
}
