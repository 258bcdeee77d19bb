//! Union-bound ABER evaluation and the formula-level comparison tables.
//!
//! The bound sums bit-weighted pairwise error probabilities over every
//! (transmitted, hypothesized) candidate pair. Conditioned on the effective
//! channel, the pairwise error probability is
//! `Q(sqrt(E_s |H_i x_p - H_j x_q|^2 / (2 N_0)))`; the expectation over the
//! channel is estimated by averaging over sampled realizations, each with the
//! RIS aligned to the transmitted pair.

pub mod tables;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

use crate::channel::{aligned_channel_into, ChannelRealization, EffectiveChannelVector};
use crate::error::{contract, Error, Result};
use crate::link_energies;
use crate::modulation::{merge_word, Constellation, SmbmConfig, TxSelection};
use crate::rng::substream;

pub use tables::*;

/// Largest spectral efficiency accepted by [`aber_bound`].
pub const MAX_BOUND_EFFICIENCY: u32 = 10;

/// Gaussian tail probability `Q(x) = erfc(x / √2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

fn pep_from_distance(distance_sq: f64, symbol_energy: f64, noise_variance: f64) -> f64 {
    if noise_variance == 0.0 {
        return if distance_sq > 0.0 { 0.0 } else { 0.5 };
    }
    q_function((symbol_energy * distance_sq / (2.0 * noise_variance)).sqrt())
}

/// Pairwise error probability conditioned on the effective channel.
pub fn cpep(
    h: &EffectiveChannelVector,
    tx: &TxSelection,
    hyp: &TxSelection,
    c: &Constellation,
    symbol_energy: f64,
    noise_variance: f64,
) -> Result<f64> {
    if tx == hyp {
        return Err(contract("transmitted and hypothesized candidates coincide"));
    }
    for sel in [tx, hyp] {
        if sel.flat > h.len() || sel.symbol > c.order() {
            return Err(contract(format!("candidate {sel:?} outside the channel/constellation")));
        }
    }
    let d = h.get(tx.flat) * c.point(tx.symbol) - h.get(hyp.flat) * c.point(hyp.symbol);
    Ok(pep_from_distance(d.norm_sqr(), symbol_energy, noise_variance))
}

/// One term of the union bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairwiseEvent {
    pub tx: TxSelection,
    pub hyp: TxSelection,
    /// Bit errors `e_{i,j}` incurred by deciding `hyp` when `tx` was sent.
    pub weight: u32,
}

impl PairwiseEvent {
    pub fn new(tx: TxSelection, hyp: TxSelection, cfg: &SmbmConfig) -> Self {
        let weight = (merge_word(&tx, cfg) ^ merge_word(&hyp, cfg)).count_ones();
        Self { tx, hyp, weight }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    fn from_values(values: impl ExactSizeIterator<Item = f64> + Clone) -> Self {
        let n = values.len();
        let mean = values.clone().sum::<f64>() / n as f64;
        let stderr = if n > 1 {
            let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, samples: n }
    }
}

/// Unconditional pairwise error probability, averaged over `samples` channel
/// realizations drawn from `rng`.
pub fn upep<R: Rng + ?Sized>(
    pair: &PairwiseEvent,
    cfg: &SmbmConfig,
    c: &Constellation,
    symbol_energy: f64,
    noise_variance: f64,
    samples: usize,
    rng: &mut R,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(contract("at least one channel sample is required"));
    }
    if pair.tx == pair.hyp {
        return Err(contract("transmitted and hypothesized candidates coincide"));
    }
    let mut ch = ChannelRealization::zeros(cfg);
    let mut cascade = Vec::new();
    let mut h = EffectiveChannelVector::empty();
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        ch.redraw(rng);
        aligned_channel_into(&ch, pair.tx.flat, &mut cascade, &mut h);
        values.push(cpep(&h, &pair.tx, &pair.hyp, c, symbol_energy, noise_variance)?);
    }
    Ok(Estimate::from_values(values.into_iter()))
}

/// How the outer sum over transmitted candidates is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMode {
    /// One representative transmitted pair per symbol. Channel blocks are
    /// i.i.d. and the index weights are XOR-invariant, so every transmitted
    /// pair contributes the same expected amount.
    #[default]
    Symmetric,
    /// Every transmitted pair, each with its own RIS alignment.
    Full,
}

/// One point of the union-bound curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub snr_db: f64,
    /// Raw bound value; may exceed 1 at low SNR.
    pub aber_bound: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl BoundPoint {
    /// Whether the raw bound exceeds a probability and would need clamping.
    pub fn clamped(&self) -> bool {
        self.aber_bound > 1.0
    }
}

struct Term {
    distance_sq: f64,
    weight: f64,
}

fn collect_terms(
    h: &[Complex64],
    tx_pos: usize,
    points: &[Complex64],
    index_weights: &[u32],
    symbol_weights: &[u32],
    terms: &mut Vec<Term>,
) {
    let m = points.len();
    let h_tx = h[tx_pos];
    for p in 0..m {
        let sent = h_tx * points[p];
        for (j, &hj) in h.iter().enumerate() {
            let index_errors = index_weights[tx_pos ^ j];
            for q in 0..m {
                if j == tx_pos && q == p {
                    continue;
                }
                let weight = index_errors + symbol_weights[p ^ q];
                terms.push(Term { distance_sq: (sent - hj * points[q]).norm_sqr(), weight: f64::from(weight) });
            }
        }
    }
}

/// Semi-analytic union bound on the average bit error rate over an
/// `E_s/N_0` grid (dB), averaging the conditional bound over `samples`
/// channel realizations. Sample `s` uses substream `s` of `seed`, and the
/// same realizations serve every grid point.
pub fn aber_bound(
    cfg: &SmbmConfig,
    c: &Constellation,
    snr_grid_db: &[f64],
    samples: usize,
    seed: u64,
    mode: BoundMode,
) -> Result<Vec<BoundPoint>> {
    let eta = cfg.spectral_efficiency();
    if eta > MAX_BOUND_EFFICIENCY {
        return Err(Error::UnsupportedSize(format!(
            "union bound enumerates 2^eta x 2^eta candidate pairs; eta = {eta} exceeds {MAX_BOUND_EFFICIENCY}"
        )));
    }
    if samples == 0 {
        return Err(contract("at least one channel sample is required"));
    }
    if c.order() != cfg.modulation_order() {
        return Err(contract("constellation order does not match the configuration"));
    }
    if snr_grid_db.is_empty() {
        return Ok(Vec::new());
    }
    let energies: Vec<(f64, f64)> = snr_grid_db.iter().map(|&db| link_energies(db)).collect();
    let pairs = cfg.pair_count();
    let index_weights: Vec<u32> = (0..pairs as u32).map(u32::count_ones).collect();
    let symbol_weights: Vec<u32> = (0..c.order() as u32).map(u32::count_ones).collect();
    let tx_positions: Vec<usize> = match mode {
        BoundMode::Symmetric => vec![0],
        BoundMode::Full => (0..pairs).collect(),
    };
    let normalizer = f64::from(eta) * (c.order() * tx_positions.len()) as f64;

    let per_sample: Vec<Vec<f64>> = (0..samples)
        .into_par_iter()
        .map_init(
            || (ChannelRealization::zeros(cfg), Vec::new(), EffectiveChannelVector::empty(), Vec::new()),
            |(ch, cascade, h, terms), s| {
                let mut rng = substream(seed, s as u64);
                ch.redraw(&mut rng);
                terms.clear();
                for &pos in &tx_positions {
                    aligned_channel_into(ch, pos + 1, cascade, h);
                    collect_terms(h.entries(), pos, c.points(), &index_weights, &symbol_weights, terms);
                }
                energies
                    .iter()
                    .map(|&(es, n0)| {
                        terms.iter().map(|t| t.weight * pep_from_distance(t.distance_sq, es, n0)).sum::<f64>()
                            / normalizer
                    })
                    .collect()
            },
        )
        .collect();

    Ok(snr_grid_db
        .iter()
        .enumerate()
        .map(|(k, &snr_db)| {
            let est = Estimate::from_values(per_sample.iter().map(|v| v[k]));
            BoundPoint { snr_db, aber_bound: est.mean, stderr: est.stderr, samples }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{align_phases, complex_gaussian, draw_channel, effective_channel};
    use crate::modulation::build_constellation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn q_function_values() {
        assert_eq!(q_function(0.0), 0.5);
        // reference values of the standard normal tail
        assert!((q_function(1.0) - 0.158_655_253_931_457_05).abs() < 1e-15);
        assert!((q_function(3.0) - 1.349_898_031_630_094_6e-3).abs() < 1e-17);
        assert!((q_function(10.0) / 7.619_853_024_160_527e-24 - 1.0).abs() < 1e-12);
        assert!(q_function(40.0) >= 0.0);
    }

    fn small() -> (SmbmConfig, Constellation) {
        (SmbmConfig::new(4, 2, 1, 8).unwrap(), build_constellation(4).unwrap())
    }

    #[test]
    fn cpep_limits_and_contract() {
        let (cfg, c) = small();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ch = draw_channel(&cfg, &mut rng);
        let h = effective_channel(&ch, &align_phases(&ch, 2).unwrap()).unwrap();
        let tx = TxSelection::from_flat(1, 2, &cfg).unwrap();
        let hyp = TxSelection::from_flat(3, 4, &cfg).unwrap();
        let p = cpep(&h, &tx, &hyp, &c, 1.0, 1e30).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!(cpep(&h, &tx, &tx, &c, 1.0, 1.0).is_err());
        // same index: distance reduces to |H_i|^2 |x_p - x_q|^2
        let same = TxSelection::from_flat(2, 2, &cfg).unwrap();
        let expected = q_function((h.get(2).norm_sqr() * (c.point(1) - c.point(2)).norm_sqr() / (2.0 * 0.1)).sqrt());
        assert!((cpep(&h, &tx, &same, &c, 1.0, 0.1).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn cpep_matches_monte_carlo_pairwise_frequency() {
        let (cfg, c) = small();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let trials = 20_000;
        for _ in 0..5 {
            let ch = draw_channel(&cfg, &mut rng);
            let tx = TxSelection::from_flat(rng.gen_range(1..=4), rng.gen_range(1..=4), &cfg).unwrap();
            let mut hyp = tx;
            while hyp == tx {
                hyp = TxSelection::from_flat(rng.gen_range(1..=4), rng.gen_range(1..=4), &cfg).unwrap();
            }
            let h = effective_channel(&ch, &align_phases(&ch, tx.flat).unwrap()).unwrap();
            let a = h.get(tx.flat) * c.point(tx.symbol);
            let b = h.get(hyp.flat) * c.point(hyp.symbol);
            let n0 = (a - b).norm_sqr() / 4.0;
            let p = cpep(&h, &tx, &hyp, &c, 1.0, n0).unwrap();
            let hits = (0..trials)
                .filter(|_| {
                    let y = a + complex_gaussian(&mut rng) * n0.sqrt();
                    (y - b).norm_sqr() < (y - a).norm_sqr()
                })
                .count();
            let freq = hits as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((freq - p).abs() < 3.0 * sigma + 1e-12, "{freq} vs {p}");
        }
    }

    #[test]
    fn pairwise_weights() {
        let (cfg, _) = small();
        let a = TxSelection::from_flat(1, 1, &cfg).unwrap();
        assert_eq!(PairwiseEvent::new(a, a, &cfg).weight, 0);
        let b = TxSelection::from_flat(4, 4, &cfg).unwrap();
        assert_eq!(PairwiseEvent::new(a, b, &cfg).weight, 4);
    }

    #[test]
    fn single_sample_upep_is_one_cpep() {
        let (cfg, c) = small();
        let pair = PairwiseEvent::new(
            TxSelection::from_flat(2, 3, &cfg).unwrap(),
            TxSelection::from_flat(1, 1, &cfg).unwrap(),
            &cfg,
        );
        let est = upep(&pair, &cfg, &c, 1.0, 0.05, 1, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ch = draw_channel(&cfg, &mut rng);
        let h = effective_channel(&ch, &align_phases(&ch, 3).unwrap()).unwrap();
        assert_eq!(est.mean, cpep(&h, &pair.tx, &pair.hyp, &c, 1.0, 0.05).unwrap());
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn upep_variance_halves_when_samples_double() {
        let (cfg, c) = small();
        let pair = PairwiseEvent::new(
            TxSelection::from_flat(1, 1, &cfg).unwrap(),
            TxSelection::from_flat(1, 2, &cfg).unwrap(),
            &cfg,
        );
        let (es, n0) = link_energies(-8.0);
        let spread = |samples: usize| {
            let runs: Vec<f64> = (0..400)
                .map(|r| upep(&pair, &cfg, &c, es, n0, samples, &mut ChaCha8Rng::seed_from_u64(1000 + r)).unwrap().mean)
                .collect();
            let mean = runs.iter().sum::<f64>() / runs.len() as f64;
            runs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs.len() - 1) as f64
        };
        let ratio = spread(50) / spread(100);
        assert!((1.6..=2.4).contains(&ratio), "{ratio}");
    }

    #[test]
    fn upep_non_increasing_in_snr() {
        let (cfg, c) = small();
        let pair = PairwiseEvent::new(
            TxSelection::from_flat(1, 1, &cfg).unwrap(),
            TxSelection::from_flat(2, 3, &cfg).unwrap(),
            &cfg,
        );
        let mut last = f64::INFINITY;
        for db in [-20.0, -15.0, -10.0, -5.0, 0.0] {
            let (es, n0) = link_energies(db);
            let est = upep(&pair, &cfg, &c, es, n0, 2000, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
            assert!(est.mean <= last);
            last = est.mean;
        }
    }

    #[test]
    fn bound_is_monotone_and_size_limited() {
        let cfg = SmbmConfig::new(4, 4, 2, 16).unwrap();
        let c = build_constellation(4).unwrap();
        let grid: Vec<f64> = (0..8).map(|k| -30.0 + 2.0 * k as f64).collect();
        let pts = aber_bound(&cfg, &c, &grid, 200, 5, BoundMode::Symmetric).unwrap();
        for w in pts.windows(2) {
            assert!(w[1].aber_bound <= w[0].aber_bound);
        }
        let big = SmbmConfig::new(4, 16, 5, 4).unwrap();
        assert!(matches!(aber_bound(&big, &c, &grid, 1, 0, BoundMode::Symmetric), Err(Error::UnsupportedSize(_))));
        assert!(aber_bound(&cfg, &c, &[], 10, 0, BoundMode::Symmetric).unwrap().is_empty());
    }

    #[test]
    fn symmetric_reduction_matches_full_enumeration() {
        let cfg = SmbmConfig::new(4, 2, 2, 8).unwrap();
        let c = build_constellation(4).unwrap();
        let grid = [-14.0, -8.0];
        let sym = aber_bound(&cfg, &c, &grid, 4000, 1, BoundMode::Symmetric).unwrap();
        let full = aber_bound(&cfg, &c, &grid, 1000, 2, BoundMode::Full).unwrap();
        for (a, b) in sym.iter().zip(&full) {
            let tol = 3.0 * (a.stderr.powi(2) + b.stderr.powi(2)).sqrt();
            assert!((a.aber_bound - b.aber_bound).abs() < tol, "{a:?} {b:?}");
        }
    }

    #[test]
    fn diagonal_terms_do_not_contribute() {
        // with one pair and BPSK the only term is the symbol flip, weight 1
        let cfg = SmbmConfig::new(2, 1, 0, 1).unwrap();
        let c = build_constellation(2).unwrap();
        let pts = aber_bound(&cfg, &c, &[0.0], 1, 9, BoundMode::Full).unwrap();
        let mut rng = substream(9, 0);
        let ch = draw_channel(&cfg, &mut rng);
        let h = effective_channel(&ch, &align_phases(&ch, 1).unwrap()).unwrap();
        let expected = q_function((h.get(1).norm_sqr() * 4.0 / 2.0).sqrt());
        assert!((pts[0].aber_bound - expected).abs() < 1e-15);
    }
}
