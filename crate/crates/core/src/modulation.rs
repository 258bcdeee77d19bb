//! Bit-frame splitting and merging, QAM constellations and the
//! (symbol, mirror pattern, antenna) index arithmetic.
//!
//! A frame of `η = log2(M) + m_rf + log2(n_T)` bits is read most significant
//! bit first and split into three fields, in this order:
//!
//! | field        | width      | index                         |
//! |--------------|------------|-------------------------------|
//! | symbol       | `log2(M)`  | `p = 1 + value` in `1..=M`    |
//! | mirror (MAP) | `m_rf`     | `k = 1 + value` in `1..=F`    |
//! | antenna      | `log2(n_T)`| `ℓ = 1 + value` in `1..=n_T`  |
//!
//! with `F = 2^m_rf`. The active entry of the transmission vector sits at the
//! 1-based flat index `i = (k - 1) n_T + ℓ`. Because both `F` and `n_T` are
//! powers of two, `i - 1` is exactly the binary value of the mirror and
//! antenna fields concatenated, which the word-level helpers exploit.
//!
//! # Constellations
//!
//! Points are laid out on the odd-integer grid with `ceil(log2 M / 2)` bits
//! on the in-phase rail and `floor(log2 M / 2)` bits on the quadrature rail
//! (the label's leading bits drive the in-phase rail). Each rail is Gray
//! coded: in-phase levels ascend from `-(L-1)` while quadrature levels descend
//! from `+(L-1)`. For `M = 4` this yields
//!
//! | p | label | grid point |
//! |---|-------|------------|
//! | 1 | 00    | -1 + j     |
//! | 2 | 01    | -1 - j     |
//! | 3 | 10    |  1 + j     |
//! | 4 | 11    |  1 - j     |
//!
//! and for `M = 8` label `010` (p = 3) lands on `-1 + j`. BPSK has no
//! quadrature rail. Points are scaled to unit average energy; the integer
//! grid is kept for display.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{config, contract, Result};

/// Largest supported constellation size.
pub const MAX_MODULATION_ORDER: usize = 256;
/// Largest supported number of RF mirrors per antenna.
pub const MAX_RF_MIRRORS: u32 = 20;
/// Largest supported transmit antenna count.
pub const MAX_TX_ANTENNAS: usize = 1 << 16;
/// Frames are packed into machine words for simulation.
pub const MAX_SPECTRAL_EFFICIENCY: u32 = 32;

/// Scheme parameters of one RIS-SMBM link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmbmConfig {
    modulation_order: usize,
    num_tx_antennas: usize,
    num_rf_mirrors: u32,
    num_ris_elements: usize,
    symbol_period: f64,
}

impl SmbmConfig {
    /// Validates and builds a configuration with a unit symbol period.
    pub fn new(
        modulation_order: usize,
        num_tx_antennas: usize,
        num_rf_mirrors: u32,
        num_ris_elements: usize,
    ) -> Result<Self> {
        if modulation_order < 2 || !modulation_order.is_power_of_two() {
            return Err(config(format!("modulation_order must be a power of two >= 2 (got {modulation_order})")));
        }
        if modulation_order > MAX_MODULATION_ORDER {
            return Err(config(format!(
                "modulation_order must not exceed {MAX_MODULATION_ORDER} (got {modulation_order})"
            )));
        }
        if num_tx_antennas == 0 || !num_tx_antennas.is_power_of_two() {
            return Err(config(format!("num_tx_antennas must be a power of two >= 1 (got {num_tx_antennas})")));
        }
        if num_tx_antennas > MAX_TX_ANTENNAS {
            return Err(config(format!("num_tx_antennas must not exceed {MAX_TX_ANTENNAS} (got {num_tx_antennas})")));
        }
        if num_rf_mirrors > MAX_RF_MIRRORS {
            return Err(config(format!("num_rf_mirrors must not exceed {MAX_RF_MIRRORS} (got {num_rf_mirrors})")));
        }
        if num_ris_elements == 0 {
            return Err(config("num_ris_elements must be at least 1"));
        }
        let cfg = Self { modulation_order, num_tx_antennas, num_rf_mirrors, num_ris_elements, symbol_period: 1.0 };
        if cfg.spectral_efficiency() > MAX_SPECTRAL_EFFICIENCY {
            return Err(config(format!(
                "spectral efficiency {} exceeds the supported {MAX_SPECTRAL_EFFICIENCY} bits",
                cfg.spectral_efficiency()
            )));
        }
        Ok(cfg)
    }

    pub fn with_symbol_period(mut self, symbol_period: f64) -> Result<Self> {
        if !(symbol_period.is_finite() && symbol_period > 0.0) {
            return Err(config(format!("symbol_period must be positive and finite (got {symbol_period})")));
        }
        self.symbol_period = symbol_period;
        Ok(self)
    }

    pub fn modulation_order(&self) -> usize {
        self.modulation_order
    }

    pub fn num_tx_antennas(&self) -> usize {
        self.num_tx_antennas
    }

    pub fn num_rf_mirrors(&self) -> u32 {
        self.num_rf_mirrors
    }

    pub fn num_ris_elements(&self) -> usize {
        self.num_ris_elements
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    /// Bits carried by the QAM symbol, `log2(M)`.
    pub fn symbol_bits(&self) -> u32 {
        self.modulation_order.trailing_zeros()
    }

    /// Bits carried by the antenna index, `log2(n_T)`.
    pub fn antenna_bits(&self) -> u32 {
        self.num_tx_antennas.trailing_zeros()
    }

    /// Number of mirror activation patterns, `F = 2^m_rf`.
    pub fn map_count(&self) -> usize {
        1 << self.num_rf_mirrors
    }

    /// Number of (antenna, mirror pattern) pairs, `F n_T`.
    pub fn pair_count(&self) -> usize {
        self.map_count() * self.num_tx_antennas
    }

    /// Bits per symbol period, `η`.
    pub fn spectral_efficiency(&self) -> u32 {
        self.symbol_bits() + self.num_rf_mirrors + self.antenna_bits()
    }

    /// Bits carried by the flat pair index (mirror and antenna fields).
    pub fn index_bits(&self) -> u32 {
        self.num_rf_mirrors + self.antenna_bits()
    }
}

/// One frame of `η` bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitFrame(Vec<u8>);

impl BitFrame {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(contract(format!("bit {pos} is {} (expected 0 or 1)", bits[pos])));
        }
        Ok(Self(bits))
    }

    /// Unpacks the `len` low bits of `word`, most significant first.
    pub fn from_word(word: u64, len: u32) -> Self {
        Self((0..len).rev().map(|s| ((word >> s) & 1) as u8).collect())
    }

    /// Packs the frame into a word, first bit most significant.
    pub fn to_word(&self) -> u64 {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | u64::from(b))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// The (symbol, mirror pattern, antenna) triple selected by one frame.
/// All indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TxSelection {
    pub symbol: usize,
    pub map: usize,
    pub antenna: usize,
    pub flat: usize,
}

impl TxSelection {
    pub fn new(symbol: usize, map: usize, antenna: usize, cfg: &SmbmConfig) -> Result<Self> {
        if !(1..=cfg.modulation_order()).contains(&symbol) {
            return Err(contract(format!("symbol index {symbol} outside 1..={}", cfg.modulation_order())));
        }
        if !(1..=cfg.map_count()).contains(&map) {
            return Err(contract(format!("map index {map} outside 1..={}", cfg.map_count())));
        }
        if !(1..=cfg.num_tx_antennas()).contains(&antenna) {
            return Err(contract(format!("antenna index {antenna} outside 1..={}", cfg.num_tx_antennas())));
        }
        Ok(Self { symbol, map, antenna, flat: flat_index(map, antenna, cfg.num_tx_antennas()) })
    }

    /// Builds a selection from a symbol index and a flat pair index.
    pub fn from_flat(symbol: usize, flat: usize, cfg: &SmbmConfig) -> Result<Self> {
        if !(1..=cfg.pair_count()).contains(&flat) {
            return Err(contract(format!("flat index {flat} outside 1..={}", cfg.pair_count())));
        }
        let n_t = cfg.num_tx_antennas();
        Self::new(symbol, (flat - 1) / n_t + 1, (flat - 1) % n_t + 1, cfg)
    }

    /// Zero-based slot of the active entry in the transmission vector.
    pub fn position(&self) -> usize {
        self.flat - 1
    }

    /// Zero-based symbol slot in the constellation.
    pub fn symbol_slot(&self) -> usize {
        self.symbol - 1
    }

    fn validate(&self, cfg: &SmbmConfig) -> Result<()> {
        let rebuilt = Self::new(self.symbol, self.map, self.antenna, cfg)?;
        if rebuilt.flat != self.flat {
            return Err(contract(format!(
                "flat index {} inconsistent with map {} and antenna {}",
                self.flat, self.map, self.antenna
            )));
        }
        Ok(())
    }
}

/// `i = (k - 1) n_T + ℓ`, 1-based.
pub fn flat_index(map: usize, antenna: usize, num_tx_antennas: usize) -> usize {
    (map - 1) * num_tx_antennas + antenna
}

/// Splits a frame into its symbol, mirror and antenna indices.
pub fn split_bits(frame: &BitFrame, cfg: &SmbmConfig) -> Result<TxSelection> {
    let eta = cfg.spectral_efficiency() as usize;
    if frame.len() != eta {
        return Err(contract(format!("frame has {} bits, configuration needs {eta}", frame.len())));
    }
    Ok(split_word(frame.to_word(), cfg))
}

/// Inverse of [`split_bits`].
pub fn merge_bits(sel: &TxSelection, cfg: &SmbmConfig) -> Result<BitFrame> {
    sel.validate(cfg)?;
    Ok(BitFrame::from_word(merge_word(sel, cfg), cfg.spectral_efficiency()))
}

/// Word-level [`split_bits`]; `word` must be below `2^η`.
pub fn split_word(word: u64, cfg: &SmbmConfig) -> TxSelection {
    debug_assert!(word >> cfg.spectral_efficiency() == 0);
    let index_bits = cfg.index_bits();
    let symbol_value = (word >> index_bits) as usize;
    let pair_value = (word & ((1u64 << index_bits) - 1)) as usize;
    let antenna_bits = cfg.antenna_bits();
    TxSelection {
        symbol: symbol_value + 1,
        map: (pair_value >> antenna_bits) + 1,
        antenna: (pair_value & ((1 << antenna_bits) - 1)) + 1,
        flat: pair_value + 1,
    }
}

/// Word-level [`merge_bits`]; the selection is assumed valid.
pub fn merge_word(sel: &TxSelection, cfg: &SmbmConfig) -> u64 {
    (((sel.symbol - 1) as u64) << cfg.index_bits()) | (sel.flat - 1) as u64
}

/// Number of differing bit positions.
pub fn hamming_errors(a: &BitFrame, b: &BitFrame) -> Result<u32> {
    if a.len() != b.len() {
        return Err(contract(format!("frame lengths differ ({} vs {})", a.len(), b.len())));
    }
    Ok(a.bits().iter().zip(b.bits()).filter(|(x, y)| x != y).count() as u32)
}

/// M-QAM point set with unit average energy.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
    grid: Vec<Complex64>,
    scale: f64,
}

impl Constellation {
    pub fn order(&self) -> usize {
        self.points.len()
    }

    /// Normalized points, indexed by `p - 1`.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    /// Normalized point `x_p` (1-based).
    pub fn point(&self, p: usize) -> Complex64 {
        self.points[p - 1]
    }

    /// Pre-normalization odd-integer grid point for index `p` (1-based).
    pub fn grid_point(&self, p: usize) -> Complex64 {
        self.grid[p - 1]
    }

    /// Factor applied to the integer grid to reach unit average energy.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|x| x.norm_sqr()).sum::<f64>() / self.points.len() as f64
    }
}

fn gray_to_binary(mut g: usize) -> usize {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

/// Builds the Gray-coded QAM constellation of order `m`.
pub fn build_constellation(m: usize) -> Result<Constellation> {
    if m < 2 || !m.is_power_of_two() || m > MAX_MODULATION_ORDER {
        return Err(config(format!("modulation_order must be a power of two in 2..={MAX_MODULATION_ORDER} (got {m})")));
    }
    let bits = m.trailing_zeros();
    let q_bits = bits / 2;
    let i_bits = bits - q_bits;
    let i_levels = 1usize << i_bits;
    let q_levels = 1usize << q_bits;
    let grid: Vec<Complex64> = (0..m)
        .map(|label| {
            let i_code = label >> q_bits;
            let q_code = label & (q_levels - 1);
            let re = 2.0 * gray_to_binary(i_code) as f64 - (i_levels - 1) as f64;
            let im = (q_levels - 1) as f64 - 2.0 * gray_to_binary(q_code) as f64;
            Complex64::new(re, im)
        })
        .collect();
    let energy = grid.iter().map(|x| x.norm_sqr()).sum::<f64>() / m as f64;
    let scale = energy.sqrt().recip();
    let points = grid.iter().map(|x| x * scale).collect();
    Ok(Constellation { points, grid, scale })
}

/// One-hot transmission vector of length `F n_T` carrying `x_p` at slot `i`.
pub fn build_tx_vector(sel: &TxSelection, cfg: &SmbmConfig, c: &Constellation) -> Result<Vec<Complex64>> {
    sel.validate(cfg)?;
    if c.order() != cfg.modulation_order() {
        return Err(contract(format!(
            "constellation order {} does not match modulation_order {}",
            c.order(),
            cfg.modulation_order()
        )));
    }
    let mut x = vec![Complex64::new(0.0, 0.0); cfg.pair_count()];
    x[sel.position()] = c.point(sel.symbol);
    Ok(x)
}
