//! Joint detection of (symbol, mirror pattern, antenna).
//!
//! Both detectors scan candidates pair-major, symbol-minor and keep the first
//! strict optimum, so ties resolve to the smallest flat index and then the
//! smallest symbol index.
//!
//! The low-complexity detector maximizes
//! `2 Re(conj(√E_s H_i) y conj(x_p)) - |x_p|^2 |√E_s H_i|^2`, which equals
//! `|y|^2 - |y - √E_s H_i x_p|^2`; its decision is therefore identical to the
//! exhaustive ML decision while `|√E_s H_i|^2` and the correlation
//! `conj(√E_s H_i) y` are computed once per pair instead of once per
//! candidate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{EffectiveChannelVector, RxSample};
use crate::error::{contract, Result};
use crate::modulation::{Constellation, SmbmConfig, TxSelection};

/// Detector choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    Ml,
    Elc,
}

impl std::fmt::Display for Detector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Detector::Ml => "ml",
            Detector::Elc => "elc",
        })
    }
}

impl std::str::FromStr for Detector {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ml" => Ok(Detector::Ml),
            "elc" => Ok(Detector::Elc),
            other => Err(format!("unknown detector '{other}' (expected ml or elc)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub selection: TxSelection,
    /// Real multiplications actually performed by this call. Diagnostic
    /// only; see [`count_rm_ml`] and [`count_rm_elc`] for the closed forms.
    pub real_mults: u64,
}

fn check_inputs(h: &EffectiveChannelVector, c: &Constellation, cfg: &SmbmConfig) -> Result<()> {
    if h.len() != cfg.pair_count() {
        return Err(contract(format!(
            "effective channel has {} entries, configuration needs {}",
            h.len(),
            cfg.pair_count()
        )));
    }
    if c.order() != cfg.modulation_order() {
        return Err(contract(format!(
            "constellation order {} does not match modulation_order {}",
            c.order(),
            cfg.modulation_order()
        )));
    }
    Ok(())
}

/// Exhaustive ML search, `argmin |y - √E_s H_i x_p|^2`.
pub fn detect_ml(
    rx: &RxSample,
    h: &EffectiveChannelVector,
    c: &Constellation,
    cfg: &SmbmConfig,
) -> Result<DetectionResult> {
    check_inputs(h, c, cfg)?;
    let (pos, sym) = ml_decide(rx.y, rx.symbol_energy.sqrt(), h.entries(), c.points());
    let pairs = h.len() as u64;
    let cands = pairs * c.order() as u64;
    Ok(DetectionResult {
        selection: TxSelection::from_flat(sym + 1, pos + 1, cfg)?,
        // scale per pair; complex product and squared norm per candidate
        real_mults: 2 * pairs + 6 * cands,
    })
}

/// Expanded-metric detector with per-pair precomputation.
pub fn detect_elc(
    rx: &RxSample,
    h: &EffectiveChannelVector,
    c: &Constellation,
    cfg: &SmbmConfig,
) -> Result<DetectionResult> {
    check_inputs(h, c, cfg)?;
    let energies: Vec<f64> = c.points().iter().map(|x| x.norm_sqr()).collect();
    let (pos, sym) = elc_decide(rx.y, rx.symbol_energy.sqrt(), h.entries(), c.points(), &energies);
    let pairs = h.len() as u64;
    let cands = pairs * c.order() as u64;
    Ok(DetectionResult {
        selection: TxSelection::from_flat(sym + 1, pos + 1, cfg)?,
        // scale, correlation and |.|^2 per pair; real part and energy weight per candidate
        real_mults: 8 * pairs + 3 * cands,
    })
}

/// ML metric `|y - √E_s H_i x_p|^2` for every candidate, pair-major.
pub fn ml_metrics(rx: &RxSample, h: &EffectiveChannelVector, c: &Constellation) -> Vec<f64> {
    let s = rx.symbol_energy.sqrt();
    h.entries().iter().flat_map(|&hi| c.points().iter().map(move |&x| (rx.y - hi * s * x).norm_sqr())).collect()
}

/// Low-complexity metric for every candidate, pair-major.
pub fn elc_metrics(rx: &RxSample, h: &EffectiveChannelVector, c: &Constellation) -> Vec<f64> {
    let s = rx.symbol_energy.sqrt();
    h.entries()
        .iter()
        .flat_map(|&hi| {
            let sh = hi * s;
            let z = sh.conj() * rx.y;
            let g = sh.norm_sqr();
            c.points().iter().map(move |&x| 2.0 * (z * x.conj()).re - x.norm_sqr() * g)
        })
        .collect()
}

/// Zero-based (pair, symbol) minimizing the ML metric.
pub(crate) fn ml_decide(y: Complex64, sqrt_es: f64, entries: &[Complex64], points: &[Complex64]) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_metric = f64::INFINITY;
    for (i, &hi) in entries.iter().enumerate() {
        let sh = hi * sqrt_es;
        for (p, &x) in points.iter().enumerate() {
            let metric = (y - sh * x).norm_sqr();
            if metric < best_metric {
                best_metric = metric;
                best = (i, p);
            }
        }
    }
    best
}

/// Zero-based (pair, symbol) maximizing the low-complexity metric.
pub(crate) fn elc_decide(
    y: Complex64,
    sqrt_es: f64,
    entries: &[Complex64],
    points: &[Complex64],
    energies: &[f64],
) -> (usize, usize) {
    let mut best = (0, 0);
    let mut best_metric = f64::NEG_INFINITY;
    for (i, &hi) in entries.iter().enumerate() {
        let sh = hi * sqrt_es;
        let z = sh.conj() * y;
        let g = sh.norm_sqr();
        for (p, (&x, &e)) in points.iter().zip(energies).enumerate() {
            let metric = 2.0 * (z.re * x.re + z.im * x.im) - e * g;
            if metric > best_metric {
                best_metric = metric;
                best = (i, p);
            }
        }
    }
    best
}

/// Closed-form real multiplications of the ML detector, `(N + 4M) n_T 2^m_rf`.
pub fn ml_real_mults(m: f64, n_t: f64, m_rf: f64, n: f64) -> f64 {
    (n + 4.0 * m) * n_t * m_rf.exp2()
}

/// Closed-form real multiplications of the low-complexity detector,
/// `3 (1 + (M + N) / 4) n_T 2^m_rf`.
pub fn elc_real_mults(m: f64, n_t: f64, m_rf: f64, n: f64) -> f64 {
    3.0 * (1.0 + (m + n) / 4.0) * n_t * m_rf.exp2()
}

pub fn count_rm_ml(cfg: &SmbmConfig) -> f64 {
    ml_real_mults(
        cfg.modulation_order() as f64,
        cfg.num_tx_antennas() as f64,
        cfg.num_rf_mirrors() as f64,
        cfg.num_ris_elements() as f64,
    )
}

pub fn count_rm_elc(cfg: &SmbmConfig) -> f64 {
    elc_real_mults(
        cfg.modulation_order() as f64,
        cfg.num_tx_antennas() as f64,
        cfg.num_rf_mirrors() as f64,
        cfg.num_ris_elements() as f64,
    )
}
