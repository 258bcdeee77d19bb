//! Monte Carlo bit-error-rate engine.
//!
//! Each trial sends one frame: uniform bits are mapped to a selection, a
//! fresh channel is drawn, the RIS is aligned to the transmitted pair, the
//! sample is received in noise and detected, and the bit errors of the
//! demapped frame are counted. Trial `t` at grid point `k` draws all of its
//! randomness from substream `(k, t)` of the master seed, and trials are
//! evaluated in fixed-size batches whose error counts are summed as
//! integers, so results are identical for any worker count.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::Scheme;
use crate::channel::{aligned_channel_into, receive, ChannelRealization, EffectiveChannelVector};
use crate::detect::{elc_decide, ml_decide, Detector};
use crate::error::{contract, Error, Result};
use crate::link_energies;
use crate::modulation::{build_constellation, split_word, Constellation, SmbmConfig};
use crate::rng::{substream, trial_stream, TRIAL_BITS};

/// Trials evaluated between two stop-rule checks.
pub const BATCH_TRIALS: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_bit_errors: u64,
    pub max_trials: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { min_bit_errors: 200, max_trials: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimPlan {
    pub cfg: SmbmConfig,
    pub detector: Detector,
    pub snr_grid_db: Vec<f64>,
    pub master_seed: u64,
    pub stop: StopRule,
    /// Worker threads; 0 uses the ambient rayon pool.
    pub workers: usize,
}

impl SimPlan {
    pub fn validate(&self) -> Result<()> {
        if self.stop.max_trials == 0 {
            return Err(Error::Config("max_trials must be at least 1".into()));
        }
        if self.stop.max_trials >= 1 << TRIAL_BITS {
            return Err(Error::Config(format!("max_trials must be below 2^{TRIAL_BITS}")));
        }
        if let Some(db) = self.snr_grid_db.iter().find(|v| v.is_nan()) {
            return Err(Error::Config(format!("invalid SNR grid value {db}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub bit_errors: u64,
    pub bits: u64,
    pub trials: u64,
    /// The trial budget ran out before the error target was met.
    pub truncated: bool,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }

    /// Binomial standard error `sqrt(ber (1 - ber) / bits)`.
    pub fn stderr(&self) -> f64 {
        if self.bits == 0 {
            return 0.0;
        }
        let p = self.ber();
        (p * (1.0 - p) / self.bits as f64).sqrt()
    }
}

/// Per-worker scratch buffers.
#[derive(Debug, Clone)]
pub struct TrialWorkspace {
    channel: ChannelRealization,
    cascade: Vec<Complex64>,
    effective: EffectiveChannelVector,
}

impl TrialWorkspace {
    pub fn new(cfg: &SmbmConfig) -> Self {
        Self {
            channel: ChannelRealization::zeros(cfg),
            cascade: Vec::with_capacity(cfg.num_ris_elements()),
            effective: EffectiveChannelVector::empty(),
        }
    }
}

/// A configuration bound to its constellation and detector.
#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: SmbmConfig,
    detector: Detector,
    constellation: Constellation,
    energies: Vec<f64>,
}

impl Simulator {
    pub fn new(cfg: SmbmConfig, detector: Detector) -> Result<Self> {
        let constellation = build_constellation(cfg.modulation_order())?;
        let energies = constellation.points().iter().map(|x| x.norm_sqr()).collect();
        Ok(Self { cfg, detector, constellation, energies })
    }

    pub fn config(&self) -> &SmbmConfig {
        &self.cfg
    }

    /// Bit errors of trial `trial` at grid point `point`.
    pub fn run_trial(
        &self,
        ws: &mut TrialWorkspace,
        symbol_energy: f64,
        noise_variance: f64,
        point: usize,
        trial: u64,
        master_seed: u64,
    ) -> u32 {
        let cfg = &self.cfg;
        let mut rng = substream(master_seed, trial_stream(point, trial));
        let word: u64 = rng.gen_range(0..1u64 << cfg.spectral_efficiency());
        let sel = split_word(word, cfg);
        ws.channel.redraw(&mut rng);
        aligned_channel_into(&ws.channel, sel.flat, &mut ws.cascade, &mut ws.effective);
        let x = self.constellation.point(sel.symbol);
        let rx = receive(ws.effective.get(sel.flat), x, symbol_energy, noise_variance, &mut rng);
        let sqrt_es = symbol_energy.sqrt();
        let points = self.constellation.points();
        let (pos, sym) = match self.detector {
            Detector::Ml => ml_decide(rx.y, sqrt_es, ws.effective.entries(), points),
            Detector::Elc => elc_decide(rx.y, sqrt_es, ws.effective.entries(), points, &self.energies),
        };
        let decided = ((sym as u64) << cfg.index_bits()) | pos as u64;
        (word ^ decided).count_ones()
    }

    /// Runs trials `[start, end)` of one grid point and sums their errors.
    fn run_batch(&self, (es, n0): (f64, f64), point: usize, start: u64, end: u64, seed: u64) -> u64 {
        (start..end)
            .into_par_iter()
            .map_init(|| TrialWorkspace::new(&self.cfg), |ws, t| u64::from(self.run_trial(ws, es, n0, point, t, seed)))
            .sum()
    }

    /// Simulates one grid point until the stop rule is met.
    pub fn run_point(&self, snr_db: f64, point: usize, seed: u64, stop: &StopRule) -> BerPoint {
        let energies = link_energies(snr_db);
        let mut errors = 0;
        let mut trials = 0;
        while trials < stop.max_trials && errors < stop.min_bit_errors {
            let end = (trials + BATCH_TRIALS).min(stop.max_trials);
            errors += self.run_batch(energies, point, trials, end, seed);
            trials = end;
        }
        BerPoint {
            snr_db,
            bit_errors: errors,
            bits: trials * u64::from(self.cfg.spectral_efficiency()),
            trials,
            truncated: errors < stop.min_bit_errors,
        }
    }
}

/// Bit errors of a single trial; convenience wrapper around [`Simulator`].
pub fn run_trial(
    cfg: &SmbmConfig,
    detector: Detector,
    snr_db: f64,
    point: usize,
    trial: u64,
    master_seed: u64,
) -> Result<u32> {
    let sim = Simulator::new(*cfg, detector)?;
    let mut ws = TrialWorkspace::new(cfg);
    let (es, n0) = link_energies(snr_db);
    Ok(sim.run_trial(&mut ws, es, n0, point, trial, master_seed))
}

/// One [`BerPoint`] per grid SNR.
pub fn sweep(plan: &SimPlan) -> Result<Vec<BerPoint>> {
    plan.validate()?;
    let sim = Simulator::new(plan.cfg, plan.detector)?;
    let run = || {
        plan.snr_grid_db.iter().enumerate().map(|(k, &db)| sim.run_point(db, k, plan.master_seed, &plan.stop)).collect()
    };
    if plan.workers == 0 {
        return Ok(run());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers)
        .build()
        .map_err(|e| contract(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(run))
}

/// Realizes a benchmark scheme as a degenerate RIS-SMBM configuration:
/// RIS-SM drops the mirrors, RIS-MBM keeps a single antenna.
pub fn benchmark_config(
    scheme: Scheme,
    modulation_order: usize,
    num_tx_antennas: usize,
    num_rf_mirrors: u32,
    num_ris_elements: usize,
) -> Result<SmbmConfig> {
    match scheme {
        Scheme::RisSmbm => SmbmConfig::new(modulation_order, num_tx_antennas, num_rf_mirrors, num_ris_elements),
        Scheme::RisSm => SmbmConfig::new(modulation_order, num_tx_antennas, 0, num_ris_elements),
        Scheme::RisMbm => SmbmConfig::new(modulation_order, 1, num_rf_mirrors, num_ris_elements),
        Scheme::RisQsm => Err(Error::UnsupportedScheme(
            "RIS-QSM has no simulation chain; it is available in the formula tables only".into(),
        )),
    }
}
