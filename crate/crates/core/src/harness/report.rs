//! CSV output for BER sweeps and PAPR CCDFs.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

use super::ber::BerRecord;
use super::papr::PaprCurve;

pub const BER_COLUMNS: [&str; 9] = [
    "esn0_db",
    "mode",
    "scheme",
    "clip_cr_db",
    "ber",
    "bit_errors",
    "bits",
    "ci95_low",
    "ci95_high",
];

pub const PAPR_COLUMNS: [&str; 5] = ["mode", "scheme", "clip_cr_db", "threshold_db", "ccdf"];

fn clip_label(cr: f64) -> String {
    if cr.is_finite() {
        cr.to_string()
    } else {
        "off".to_string()
    }
}

#[derive(Serialize)]
struct BerRow {
    esn0_db: f64,
    mode: &'static str,
    scheme: &'static str,
    clip_cr_db: String,
    ber: f64,
    bit_errors: u64,
    bits: u64,
    ci95_low: f64,
    ci95_high: f64,
}

#[derive(Serialize)]
struct PaprRow {
    mode: &'static str,
    scheme: &'static str,
    clip_cr_db: String,
    threshold_db: f64,
    ccdf: f64,
}

pub fn write_ber_csv<W: Write>(records: &[BerRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(BerRow {
            esn0_db: r.esn0_db,
            mode: r.mode.name(),
            scheme: r.scheme.name(),
            clip_cr_db: clip_label(r.clip_cr_db),
            ber: r.ber,
            bit_errors: r.bit_errors,
            bits: r.bits,
            ci95_low: r.ci95_low,
            ci95_high: r.ci95_high,
        })?;
    }
    if records.is_empty() {
        w.write_record(BER_COLUMNS)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_papr_csv<W: Write>(curves: &[PaprCurve], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut wrote = false;
    for c in curves {
        for r in c.ccdf_records() {
            w.serialize(PaprRow {
                mode: c.variant.mode.name(),
                scheme: c.variant.scheme.name(),
                clip_cr_db: clip_label(c.variant.clip_cr_db),
                threshold_db: r.threshold_db,
                ccdf: r.probability,
            })?;
            wrote = true;
        }
    }
    if !wrote {
        w.write_record(PAPR_COLUMNS)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ber_results(records: &[BerRecord], path: impl AsRef<Path>) -> Result<()> {
    write_ber_csv(records, File::create(path)?)
}

pub fn write_papr_results(curves: &[PaprCurve], path: impl AsRef<Path>) -> Result<()> {
    write_papr_csv(curves, File::create(path)?)
}
