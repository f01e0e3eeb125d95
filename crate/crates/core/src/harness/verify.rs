//! Comparison suite: DFT-spread OFDM against conventional and clipped OFDM.
//!
//! BER checks: DFT-spread and OFDM curves agree within their 95% intervals;
//! 3 dB clipping costs QPSK 0.4..1.2 dB and 16-QAM at least 5 dB at
//! BER 1e-3. PAPR checks: DFT-spread sits at least 2 dB below OFDM at
//! CCDF 1e-3, QPSK and 16-QAM OFDM agree within 0.5 dB at 1e-2, and
//! clipped OFDM falls between the two at 1e-2.

use std::fmt;

use crate::error::Result;
use crate::modem::Scheme;
use crate::txchain::Mode;

use super::ber::{crossing_esn0, run_ber_sweep_with, BerRecord, SweepBudget};
use super::config::ExperimentConfig;
use super::papr::{run_papr_experiment_with, PaprCurve, REFERENCE_CLIP_CR_DB};

pub const TARGET_BER: f64 = 1e-3;
pub const QPSK_PENALTY_DB: (f64, f64) = (0.4, 1.2);
pub const QAM16_MIN_PENALTY_DB: f64 = 5.0;
/// Informational band around the ~8 dB 16-QAM clipping loss.
pub const QAM16_PENALTY_BAND_DB: (f64, f64) = (6.0, 10.0);
pub const PAPR_GAP_DB: f64 = 2.0;
pub const PAPR_SIMILAR_DB: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Grids and Monte Carlo budget for the suite.
#[derive(Clone, Debug)]
pub struct VerifyPlan {
    pub qpsk_grid_db: Vec<f64>,
    pub qam16_grid_db: Vec<f64>,
    /// Clipped curves extend this far past the unclipped BER 1e-3 crossing.
    pub clipped_extension_db: (f64, f64),
    pub clipped_step_db: f64,
    pub budget: SweepBudget,
    pub workers: usize,
}

impl Default for VerifyPlan {
    fn default() -> Self {
        VerifyPlan {
            qpsk_grid_db: grid(0.0, 14.0, 0.5),
            qam16_grid_db: grid(8.0, 24.0, 1.0),
            clipped_extension_db: (4.0, 12.0),
            clipped_step_db: 0.5,
            budget: SweepBudget::default(),
            workers: super::ber::workers_from_env(),
        }
    }
}

/// Inclusive arithmetic grid.
pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}

/// BER curves of one constellation for DFT-spread, OFDM and clipped OFDM.
#[derive(Clone, Debug)]
pub struct BerComparison {
    pub scheme: Scheme,
    pub clip_cr_db: f64,
    pub dft_spread: Vec<BerRecord>,
    pub ofdm: Vec<BerRecord>,
    pub clipped_ofdm: Vec<BerRecord>,
}

impl BerComparison {
    /// Grid points where DFT-spread and OFDM intervals do not overlap.
    pub fn disjoint_points(&self) -> Vec<f64> {
        self.dft_spread
            .iter()
            .zip(&self.ofdm)
            .filter(|(a, b)| !a.overlaps(b))
            .map(|(a, _)| a.esn0_db)
            .collect()
    }

    pub fn unclipped_crossing(&self) -> Option<f64> {
        crossing_esn0(&self.ofdm, TARGET_BER)
    }

    pub fn clipped_crossing(&self) -> Option<f64> {
        crossing_esn0(&self.clipped_ofdm, TARGET_BER)
    }

    /// Extra Es/N0 clipped OFDM needs to reach BER 1e-3; `+inf` when the
    /// clipped curve never gets there on its grid.
    pub fn clipping_penalty_db(&self) -> Option<f64> {
        let u = self.unclipped_crossing()?;
        Some(self.clipped_crossing().map_or(f64::INFINITY, |c| c - u))
    }
}

pub fn compare_ber(
    cfg: &ExperimentConfig,
    scheme: Scheme,
    plan: &VerifyPlan,
) -> Result<BerComparison> {
    let cr = cfg.clipping().unwrap_or(REFERENCE_CLIP_CR_DB);
    let base_grid = match scheme {
        Scheme::Qpsk => plan.qpsk_grid_db.clone(),
        Scheme::Qam16 => plan.qam16_grid_db.clone(),
    };
    let variant = |mode, clip_cr_db, esn0_grid_db: Vec<f64>| ExperimentConfig {
        scheme,
        mode,
        clip_cr_db,
        esn0_grid_db,
        ..cfg.clone()
    };
    let run = |c: &ExperimentConfig| run_ber_sweep_with(c, &plan.budget, plan.workers);
    let dft_spread = run(&variant(Mode::DftSpread, f64::INFINITY, base_grid.clone()))?;
    let ofdm = run(&variant(Mode::Ofdm, f64::INFINITY, base_grid.clone()))?;
    let clipped_grid = match crossing_esn0(&ofdm, TARGET_BER) {
        Some(c) => grid(
            c.floor() - 1.0,
            c.ceil() + plan.clipped_extension_db_for(scheme),
            plan.clipped_step_db,
        ),
        None => base_grid,
    };
    let clipped_ofdm = run(&variant(Mode::Ofdm, cr, clipped_grid))?;
    Ok(BerComparison {
        scheme,
        clip_cr_db: cr,
        dft_spread,
        ofdm,
        clipped_ofdm,
    })
}

impl VerifyPlan {
    fn clipped_extension_db_for(&self, scheme: Scheme) -> f64 {
        match scheme {
            Scheme::Qpsk => self.clipped_extension_db.0,
            Scheme::Qam16 => self.clipped_extension_db.1,
        }
    }
}

pub fn ber_checks(qpsk: &BerComparison, qam16: &BerComparison) -> Vec<Check> {
    let mut checks = Vec::new();
    for cmp in [qpsk, qam16] {
        let bad = cmp.disjoint_points();
        checks.push(Check {
            name: format!("ber-equivalence-{}", cmp.scheme),
            passed: bad.is_empty() && cmp.dft_spread.len() == cmp.ofdm.len(),
            detail: if bad.is_empty() {
                format!(
                    "DFT-spread and OFDM 95% intervals overlap at all {} points",
                    cmp.ofdm.len()
                )
            } else {
                format!("intervals disjoint at Es/N0 {bad:?} dB")
            },
        });
    }

    let fmt_pen = |p: Option<f64>| match p {
        Some(v) if v.is_finite() => format!("{v:.2} dB"),
        Some(_) => "clipped curve never reaches 1e-3".to_string(),
        None => "unclipped curve never reaches 1e-3".to_string(),
    };

    let p = qpsk.clipping_penalty_db();
    checks.push(Check {
        name: "clipping-penalty-qpsk".into(),
        passed: p.is_some_and(|v| (QPSK_PENALTY_DB.0..=QPSK_PENALTY_DB.1).contains(&v)),
        detail: format!(
            "penalty {} at BER 1e-3, required [{}, {}] dB",
            fmt_pen(p),
            QPSK_PENALTY_DB.0,
            QPSK_PENALTY_DB.1
        ),
    });

    let p = qam16.clipping_penalty_db();
    let in_band = p.is_some_and(|v| (QAM16_PENALTY_BAND_DB.0..=QAM16_PENALTY_BAND_DB.1).contains(&v));
    checks.push(Check {
        name: "clipping-penalty-16qam".into(),
        passed: p.is_some_and(|v| v >= QAM16_MIN_PENALTY_DB),
        detail: format!(
            "penalty {} at BER 1e-3, required >= {} dB ({} the {}..{} dB band)",
            fmt_pen(p),
            QAM16_MIN_PENALTY_DB,
            if in_band { "inside" } else { "outside" },
            QAM16_PENALTY_BAND_DB.0,
            QAM16_PENALTY_BAND_DB.1
        ),
    });
    checks
}

fn find(curves: &[PaprCurve], mode: Mode, scheme: Scheme, clipped: bool) -> &PaprCurve {
    curves
        .iter()
        .find(|c| {
            c.variant.mode == mode
                && c.variant.scheme == scheme
                && c.variant.clip_cr_db.is_finite() == clipped
        })
        .expect("variant present in experiment")
}

pub fn papr_checks(curves: &[PaprCurve]) -> Vec<Check> {
    let mut checks = Vec::new();

    let dfts = find(curves, Mode::DftSpread, Scheme::Qpsk, false);
    let ofdm = find(curves, Mode::Ofdm, Scheme::Qpsk, false);
    let gap = ofdm.threshold_at(1e-3) - dfts.threshold_at(1e-3);
    let levels = [1e-3, 2e-3, 5e-3, 1e-2, 2e-2, 5e-2, 1e-1];
    let everywhere_left = levels
        .iter()
        .all(|&l| dfts.threshold_at(l) < ofdm.threshold_at(l));
    checks.push(Check {
        name: "papr-dft-spread-below-ofdm".into(),
        passed: gap >= PAPR_GAP_DB && everywhere_left,
        detail: format!(
            "QPSK gap at CCDF 1e-3 = {gap:.2} dB (need >= {PAPR_GAP_DB}); left of OFDM at all levels in [1e-3, 1e-1]: {everywhere_left}"
        ),
    });

    let q = ofdm.threshold_at(1e-2);
    let h = find(curves, Mode::Ofdm, Scheme::Qam16, false).threshold_at(1e-2);
    checks.push(Check {
        name: "papr-ofdm-qpsk-vs-16qam".into(),
        passed: (q - h).abs() <= PAPR_SIMILAR_DB,
        detail: format!("at CCDF 1e-2: QPSK {q:.2} dB, 16-QAM {h:.2} dB (need within {PAPR_SIMILAR_DB} dB)"),
    });

    for scheme in [Scheme::Qpsk, Scheme::Qam16] {
        let d = find(curves, Mode::DftSpread, scheme, false).threshold_at(1e-2);
        let c = find(curves, Mode::Ofdm, scheme, true);
        let cv = c.threshold_at(1e-2);
        let o = find(curves, Mode::Ofdm, scheme, false).threshold_at(1e-2);
        checks.push(Check {
            name: format!("papr-clipped-between-{scheme}"),
            passed: d < cv && cv < o,
            detail: format!(
                "at CCDF 1e-2: DFT-spread {d:.2} < clipped ({} dB) {cv:.2} < OFDM {o:.2}",
                c.variant.clip_cr_db
            ),
        });
    }
    checks
}

/// Runs the whole suite.
pub fn run_verification(cfg: &ExperimentConfig, plan: &VerifyPlan) -> Result<VerifyReport> {
    cfg.validate()?;
    let curves = run_papr_experiment_with(cfg, plan.workers)?;
    let qpsk = compare_ber(cfg, Scheme::Qpsk, plan)?;
    let qam16 = compare_ber(cfg, Scheme::Qam16, plan)?;
    let mut checks = papr_checks(&curves);
    checks.extend(ber_checks(&qpsk, &qam16));
    for cmp in [&qpsk, &qam16] {
        let valid = [&cmp.dft_spread, &cmp.ofdm, &cmp.clipped_ofdm]
            .iter()
            .flat_map(|c| c.iter())
            .all(|r| (0.0..=1.0).contains(&r.ber));
        checks.push(Check {
            name: format!("ber-range-{}", cmp.scheme),
            passed: valid,
            detail: "every BER estimate lies in [0, 1]".into(),
        });
    }
    Ok(VerifyReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        assert_eq!(grid(0.0, 2.0, 0.5), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(grid(1.0, 1.0, 1.0), vec![1.0]);
    }
}
