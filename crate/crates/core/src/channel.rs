//! Rayleigh fading between the source antennas/mirror patterns and the RIS,
//! RIS phase alignment, the cascaded effective channel row and received
//! sample synthesis.
//!
//! Channel gains are stored in polar form convention `h = α e^{-jθ}` and
//! `g = β e^{-jφ}`, so the RIS phase that aligns element `n` to the active
//! pair is `θ_n + φ_n = -arg(h_n) - arg(g_n)`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{contract, Result};
use crate::modulation::{SmbmConfig, TxSelection};

/// Draws one `CN(0, 1)` sample.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * FRAC_1_SQRT_2
}

/// Source-to-RIS gains for every (antenna, mirror pattern) pair and the
/// RIS-to-destination gains, one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pairs: usize,
    elements: usize,
    /// Row-major `[pair][element]`, pair rows in flat-index order.
    h: Vec<Complex64>,
    g: Vec<Complex64>,
}

impl ChannelRealization {
    /// Zeroed realization with the shape implied by `cfg`.
    pub fn zeros(cfg: &SmbmConfig) -> Self {
        let pairs = cfg.pair_count();
        let elements = cfg.num_ris_elements();
        Self {
            pairs,
            elements,
            h: vec![Complex64::default(); pairs * elements],
            g: vec![Complex64::default(); elements],
        }
    }

    /// Builds a realization from explicit rows (one per flat index) and `g`.
    pub fn from_parts(h: Vec<Vec<Complex64>>, g: Vec<Complex64>) -> Result<Self> {
        let elements = g.len();
        if elements == 0 || h.is_empty() {
            return Err(contract("channel needs at least one pair and one element"));
        }
        if let Some(row) = h.iter().position(|r| r.len() != elements) {
            return Err(contract(format!("row {row} has {} elements, expected {elements}", h[row].len())));
        }
        Ok(Self { pairs: h.len(), elements, h: h.into_iter().flatten().collect(), g })
    }

    /// Redraws every entry in place.
    pub fn redraw<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for v in self.h.iter_mut().chain(self.g.iter_mut()) {
            *v = complex_gaussian(rng);
        }
    }

    pub fn pair_count(&self) -> usize {
        self.pairs
    }

    pub fn element_count(&self) -> usize {
        self.elements
    }

    /// Gains `h_{ℓ,k}` for the pair at 1-based flat index `flat`.
    pub fn h(&self, flat: usize) -> &[Complex64] {
        let start = (flat - 1) * self.elements;
        &self.h[start..start + self.elements]
    }

    pub fn g(&self) -> &[Complex64] {
        &self.g
    }

    pub fn alpha(&self, flat: usize, n: usize) -> f64 {
        self.h(flat)[n].norm()
    }

    pub fn theta(&self, flat: usize, n: usize) -> f64 {
        -self.h(flat)[n].arg()
    }

    pub fn beta(&self, n: usize) -> f64 {
        self.g[n].norm()
    }

    pub fn varphi(&self, n: usize) -> f64 {
        -self.g[n].arg()
    }

    fn check_flat(&self, flat: usize) -> Result<()> {
        if (1..=self.pairs).contains(&flat) {
            Ok(())
        } else {
            Err(contract(format!("pair index {flat} outside 1..={}", self.pairs)))
        }
    }
}

/// Draws an i.i.d. `CN(0, 1)` realization.
pub fn draw_channel<R: Rng + ?Sized>(cfg: &SmbmConfig, rng: &mut R) -> ChannelRealization {
    let mut ch = ChannelRealization::zeros(cfg);
    ch.redraw(rng);
    ch
}

/// Diagonal of the RIS reflection matrix, aligned to one active pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RisPhaseConfig {
    active_flat: usize,
    phases: Vec<f64>,
}

impl RisPhaseConfig {
    /// Arbitrary phase vector; `active_flat` records the pair it serves.
    pub fn from_phases(active_flat: usize, phases: Vec<f64>) -> Self {
        Self { active_flat, phases }
    }

    pub fn active_flat(&self) -> usize {
        self.active_flat
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }
}

/// Chooses `φ_n = θ_n + φ_n(g)` so every cascaded term of the active pair is
/// real and non-negative.
pub fn align_phases(ch: &ChannelRealization, active_flat: usize) -> Result<RisPhaseConfig> {
    ch.check_flat(active_flat)?;
    let phases = ch.h(active_flat).iter().zip(ch.g()).map(|(h, g)| -h.arg() - g.arg()).collect();
    Ok(RisPhaseConfig { active_flat, phases })
}

/// The `1 x F n_T` row of cascaded gains under one RIS configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannelVector {
    active_flat: usize,
    entries: Vec<Complex64>,
}

impl EffectiveChannelVector {
    /// Hand-built row; `active_flat` is the pair the RIS was aligned to.
    pub fn from_entries(active_flat: usize, entries: Vec<Complex64>) -> Result<Self> {
        if !(1..=entries.len()).contains(&active_flat) {
            return Err(contract(format!("active pair {active_flat} outside 1..={}", entries.len())));
        }
        Ok(Self { active_flat, entries })
    }

    pub(crate) fn empty() -> Self {
        Self { active_flat: 1, entries: Vec::new() }
    }

    pub fn active_flat(&self) -> usize {
        self.active_flat
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Entry at 1-based flat index.
    pub fn get(&self, flat: usize) -> Complex64 {
        self.entries[flat - 1]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `H[i(ℓ,k)] = Σ_n h^n_{ℓ,k} e^{jφ_n} g_n` for every pair.
pub fn effective_channel(ch: &ChannelRealization, phases: &RisPhaseConfig) -> Result<EffectiveChannelVector> {
    if phases.phases.len() != ch.elements {
        return Err(contract(format!(
            "phase vector has {} entries, channel has {} elements",
            phases.phases.len(),
            ch.elements
        )));
    }
    ch.check_flat(phases.active_flat)?;
    let mut out = EffectiveChannelVector::empty();
    let mut cascade = Vec::new();
    effective_channel_into(ch, phases, &mut cascade, &mut out);
    Ok(out)
}

/// Buffer-reusing variant of [`effective_channel`]; shapes are trusted.
pub(crate) fn effective_channel_into(
    ch: &ChannelRealization,
    phases: &RisPhaseConfig,
    cascade: &mut Vec<Complex64>,
    out: &mut EffectiveChannelVector,
) {
    cascade.clear();
    cascade.extend(phases.phases.iter().zip(&ch.g).map(|(&phi, &g)| Complex64::from_polar(1.0, phi) * g));
    out.active_flat = phases.active_flat;
    out.entries.clear();
    out.entries.extend(
        ch.h.chunks_exact(ch.elements)
            .map(|row| row.iter().zip(cascade.iter()).fold(Complex64::default(), |acc, (h, c)| acc + h * c)),
    );
}

/// Aligned effective channel without materializing the phase angles: the
/// cascade factor `e^{jφ_n} g_n` equals `conj(h_n) |g_n| / |h_n|`.
pub(crate) fn aligned_channel_into(
    ch: &ChannelRealization,
    active_flat: usize,
    cascade: &mut Vec<Complex64>,
    out: &mut EffectiveChannelVector,
) {
    cascade.clear();
    cascade.extend(ch.h(active_flat).iter().zip(&ch.g).map(|(h, g)| {
        let mag = h.norm();
        if mag > 0.0 {
            h.conj() * (g.norm() / mag)
        } else {
            Complex64::new(g.norm(), 0.0)
        }
    }));
    out.active_flat = active_flat;
    out.entries.clear();
    out.entries.extend(
        ch.h.chunks_exact(ch.elements)
            .map(|row| row.iter().zip(cascade.iter()).fold(Complex64::default(), |acc, (h, c)| acc + h * c)),
    );
}

/// One received baseband sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RxSample {
    pub y: Complex64,
    pub symbol_energy: f64,
    pub noise_variance: f64,
}

/// `y = √E_s H[i] x_p + w`, `w ~ CN(0, N_0)`.
///
/// The RIS is always configured for the transmitted pair, so `sel.flat` must
/// match the pair the effective channel was aligned to.
pub fn transmit<R: Rng + ?Sized>(
    h: &EffectiveChannelVector,
    sel: &TxSelection,
    x_p: Complex64,
    symbol_energy: f64,
    noise_variance: f64,
    rng: &mut R,
) -> Result<RxSample> {
    if sel.flat != h.active_flat {
        return Err(contract(format!(
            "selection uses pair {} but the RIS is aligned to pair {}",
            sel.flat, h.active_flat
        )));
    }
    if !(1..=h.len()).contains(&sel.flat) {
        return Err(contract(format!("pair index {} outside 1..={}", sel.flat, h.len())));
    }
    if !(noise_variance >= 0.0 && symbol_energy >= 0.0) {
        return Err(contract("energies must be non-negative"));
    }
    Ok(receive(h.get(sel.flat), x_p, symbol_energy, noise_variance, rng))
}

pub(crate) fn receive<R: Rng + ?Sized>(
    gain: Complex64,
    x_p: Complex64,
    symbol_energy: f64,
    noise_variance: f64,
    rng: &mut R,
) -> RxSample {
    let w = complex_gaussian(rng) * noise_variance.sqrt();
    RxSample { y: gain * x_p * symbol_energy.sqrt() + w, symbol_energy, noise_variance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn cfg(n_t: usize, m_rf: u32, n: usize) -> SmbmConfig {
        SmbmConfig::new(4, n_t, m_rf, n).unwrap()
    }

    #[test]
    fn deterministic_given_seed() {
        let c = cfg(4, 2, 16);
        let a = draw_channel(&c, &mut ChaCha8Rng::seed_from_u64(7));
        let b = draw_channel(&c, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        let d = draw_channel(&c, &mut ChaCha8Rng::seed_from_u64(8));
        assert_ne!(a, d);
    }

    #[test]
    fn minimal_shape() {
        let c = cfg(1, 0, 1);
        let ch = draw_channel(&c, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!((ch.pair_count(), ch.element_count(), ch.g().len()), (1, 1, 1));
        assert_eq!(ch.h(1).len(), 1);
    }

    #[test]
    fn unit_power_entries() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let mean = (0..n).map(|_| complex_gaussian(&mut rng).norm_sqr()).sum::<f64>() / n as f64;
        assert!((0.99..=1.01).contains(&mean), "{mean}");
    }

    #[test]
    fn real_positive_channel_needs_no_phase() {
        let ch = ChannelRealization::from_parts(
            vec![vec![Complex64::new(0.5, 0.0), Complex64::new(2.0, 0.0)]],
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.0)],
        )
        .unwrap();
        let ph = align_phases(&ch, 1).unwrap();
        assert!(ph.phases().iter().all(|p| p.abs() < 1e-15));
    }

    #[test]
    fn single_element_cancellation() {
        let ch = ChannelRealization::from_parts(vec![vec![Complex64::i()]], vec![Complex64::new(1.0, 0.0)]).unwrap();
        // θ = -arg(j) = -π/2, so the aligned phase is -π/2
        let ph = align_phases(&ch, 1).unwrap();
        assert!((ph.phases()[0] + FRAC_PI_2).abs() < 1e-15);
        assert!((ch.theta(1, 0) + FRAC_PI_2).abs() < 1e-15);
        let h = effective_channel(&ch, &ph).unwrap();
        assert!((h.get(1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn trivial_effective_channel() {
        let one = Complex64::new(1.0, 0.0);
        let ch = ChannelRealization::from_parts(vec![vec![one]], vec![one]).unwrap();
        let h = effective_channel(&ch, &RisPhaseConfig::from_phases(1, vec![0.0])).unwrap();
        assert_eq!(h.entries(), &[one]);
    }

    #[test]
    fn active_entry_is_sum_of_magnitudes() {
        let c = cfg(4, 2, 32);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let ch = draw_channel(&c, &mut rng);
            let active = rng.gen_range(1..=c.pair_count());
            let h = effective_channel(&ch, &align_phases(&ch, active).unwrap()).unwrap();
            let expected: f64 = (0..32).map(|n| ch.alpha(active, n) * ch.beta(n)).sum();
            let entry = h.get(active);
            assert!(entry.re > 0.0);
            assert!(entry.im.abs() < 1e-9 * expected);
            assert!((entry.re - expected).abs() < 1e-9 * expected);
        }
    }

    #[test]
    fn fast_alignment_matches_phase_path() {
        let c = cfg(4, 1, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ch = draw_channel(&c, &mut rng);
        let slow = effective_channel(&ch, &align_phases(&ch, 5).unwrap()).unwrap();
        let mut fast = EffectiveChannelVector::empty();
        aligned_channel_into(&ch, 5, &mut Vec::new(), &mut fast);
        assert_eq!(fast.active_flat(), 5);
        for (a, b) in slow.entries().iter().zip(fast.entries()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn alignment_beats_random_phases() {
        let c = cfg(2, 1, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let ch = draw_channel(&c, &mut rng);
            let aligned = effective_channel(&ch, &align_phases(&ch, 3).unwrap()).unwrap().get(3).norm();
            for _ in 0..100 {
                let phases = (0..16).map(|_| rng.gen_range(-PI..PI)).collect();
                let other = effective_channel(&ch, &RisPhaseConfig::from_phases(3, phases)).unwrap();
                assert!(aligned >= other.get(3).norm() - 1e-12);
            }
        }
    }

    #[test]
    fn global_phase_rotation_invariance() {
        let c = cfg(2, 1, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ch = draw_channel(&c, &mut rng);
        let rot_h = Complex64::from_polar(1.0, 0.7);
        let rot_g = Complex64::from_polar(1.0, -2.1);
        let rows = (1..=c.pair_count()).map(|i| ch.h(i).iter().map(|v| v * rot_h).collect()).collect();
        let rotated = ChannelRealization::from_parts(rows, ch.g().iter().map(|v| v * rot_g).collect()).unwrap();
        let a = effective_channel(&ch, &align_phases(&ch, 2).unwrap()).unwrap().get(2).norm();
        let b = effective_channel(&rotated, &align_phases(&rotated, 2).unwrap()).unwrap().get(2).norm();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn transmit_checks_alignment_and_noiseless_output() {
        let c = cfg(2, 1, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = draw_channel(&c, &mut rng);
        let h = effective_channel(&ch, &align_phases(&ch, 2).unwrap()).unwrap();
        let x = Complex64::new(0.6, -0.8);
        let good = TxSelection::from_flat(1, 2, &c).unwrap();
        let rx = transmit(&h, &good, x, 4.0, 0.0, &mut rng).unwrap();
        assert!((rx.y - h.get(2) * x * 2.0).norm() < 1e-15);
        let bad = TxSelection::from_flat(1, 1, &c).unwrap();
        assert!(transmit(&h, &bad, x, 1.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn zero_symbol_gives_pure_noise() {
        let h = EffectiveChannelVector::from_entries(1, vec![Complex64::new(3.0, 0.0)]).unwrap();
        let c = SmbmConfig::new(2, 1, 0, 1).unwrap();
        let sel = TxSelection::from_flat(1, 1, &c).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(4);
        let mut b = ChaCha8Rng::seed_from_u64(4);
        let rx = transmit(&h, &sel, Complex64::default(), 1.0, 0.5, &mut a).unwrap();
        assert_eq!(rx.y, complex_gaussian(&mut b) * 0.5f64.sqrt());
    }

    #[test]
    fn empirical_snr_matches_instantaneous_snr() {
        let gain = Complex64::new(2.5, 0.0);
        let (es, n0) = (1.0, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2);
        let n = 100_000;
        let noise_power = (0..n)
            .map(|_| {
                let rx = receive(gain, x, es, n0, &mut rng);
                (rx.y - gain * x * es.sqrt()).norm_sqr()
            })
            .sum::<f64>()
            / n as f64;
        let empirical = (gain * x).norm_sqr() * es / noise_power;
        let expected = es * gain.norm_sqr() / n0;
        assert!((empirical / expected - 1.0).abs() < 0.02);
    }
}
