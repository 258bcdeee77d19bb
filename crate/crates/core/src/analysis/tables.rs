//! Formula-level comparisons against the benchmark index-modulation schemes:
//! spectral efficiency, energy saving, throughput and receiver complexity.

use serde::{Deserialize, Serialize};

use crate::detect::{elc_real_mults, ml_real_mults};
use crate::error::{config, Result};
use crate::modulation::SmbmConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "RIS-SMBM")]
    RisSmbm,
    #[serde(rename = "RIS-SM")]
    RisSm,
    #[serde(rename = "RIS-MBM")]
    RisMbm,
    #[serde(rename = "RIS-QSM")]
    RisQsm,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::RisSm, Scheme::RisMbm, Scheme::RisQsm, Scheme::RisSmbm];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::RisSmbm => "RIS-SMBM",
            Scheme::RisSm => "RIS-SM",
            Scheme::RisMbm => "RIS-MBM",
            Scheme::RisQsm => "RIS-QSM",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('_', "-").as_str() {
            "RIS-SMBM" | "SMBM" => Ok(Scheme::RisSmbm),
            "RIS-SM" | "SM" => Ok(Scheme::RisSm),
            "RIS-MBM" | "MBM" => Ok(Scheme::RisMbm),
            "RIS-QSM" | "QSM" => Ok(Scheme::RisQsm),
            _ => Err(format!("unknown scheme '{s}' (expected RIS-SMBM, RIS-SM, RIS-MBM or RIS-QSM)")),
        }
    }
}

/// A scheme evaluated on one shared (M, n_T, m_rf) parameter row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeSpec {
    pub scheme: Scheme,
    pub modulation_order: usize,
    pub num_tx_antennas: usize,
    pub num_rf_mirrors: u32,
}

impl SchemeSpec {
    pub fn new(scheme: Scheme, modulation_order: usize, num_tx_antennas: usize, num_rf_mirrors: u32) -> Result<Self> {
        if modulation_order < 2 || !modulation_order.is_power_of_two() {
            return Err(config(format!("modulation_order must be a power of two >= 2 (got {modulation_order})")));
        }
        if num_tx_antennas == 0 || !num_tx_antennas.is_power_of_two() {
            return Err(config(format!("num_tx_antennas must be a power of two >= 1 (got {num_tx_antennas})")));
        }
        if num_rf_mirrors > 60 {
            return Err(config(format!("num_rf_mirrors too large (got {num_rf_mirrors})")));
        }
        Ok(Self { scheme, modulation_order, num_tx_antennas, num_rf_mirrors })
    }

    /// `n_S = log2 M`.
    pub fn symbol_bits(&self) -> u32 {
        self.modulation_order.trailing_zeros()
    }

    /// `n_SM = log2 n_T`.
    pub fn antenna_bits(&self) -> u32 {
        self.num_tx_antennas.trailing_zeros()
    }

    /// Spectral efficiency `n_b` in bits/s/Hz.
    pub fn rate(&self) -> u32 {
        let (ns, nsm, mrf) = (self.symbol_bits(), self.antenna_bits(), self.num_rf_mirrors);
        match self.scheme {
            Scheme::RisSm => ns + nsm,
            Scheme::RisMbm => ns + mrf,
            Scheme::RisQsm => ns + 2 * nsm,
            Scheme::RisSmbm => ns + mrf + nsm,
        }
    }

    fn same_row(&self, other: &SchemeSpec) -> bool {
        self.modulation_order == other.modulation_order
            && self.num_tx_antennas == other.num_tx_antennas
            && self.num_rf_mirrors == other.num_rf_mirrors
    }
}

/// Energy saved by RIS-SMBM relative to a benchmark, `100 (1 - n_b / η)` percent.
pub fn energy_saving(smbm: &SchemeSpec, bench: &SchemeSpec) -> Result<f64> {
    if smbm.scheme != Scheme::RisSmbm {
        return Err(config(format!("reference scheme must be RIS-SMBM (got {})", smbm.scheme)));
    }
    if !smbm.same_row(bench) {
        return Err(config(format!(
            "parameter rows differ: (M={}, n_T={}, m_rf={}) vs (M={}, n_T={}, m_rf={})",
            smbm.modulation_order,
            smbm.num_tx_antennas,
            smbm.num_rf_mirrors,
            bench.modulation_order,
            bench.num_tx_antennas,
            bench.num_rf_mirrors
        )));
    }
    let eta = smbm.rate();
    let nb = bench.rate();
    if nb > eta {
        return Err(config(format!("benchmark rate {nb} exceeds RIS-SMBM rate {eta}")));
    }
    Ok(100.0 * (1.0 - f64::from(nb) / f64::from(eta)))
}

/// Correctly delivered bits per second, `(1 - P_b) η / T_s`.
pub fn throughput(cfg: &SmbmConfig, aber: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&aber) {
        return Err(config(format!("error rate must lie in [0, 1] (got {aber})")));
    }
    Ok((1.0 - aber) * f64::from(cfg.spectral_efficiency()) / cfg.symbol_period())
}

/// A shared parameter row of the rate and energy tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamRow {
    pub modulation_order: usize,
    pub num_tx_antennas: usize,
    pub num_rf_mirrors: u32,
}

impl ParamRow {
    pub const fn new(modulation_order: usize, num_tx_antennas: usize, num_rf_mirrors: u32) -> Self {
        Self { modulation_order, num_tx_antennas, num_rf_mirrors }
    }

    pub fn spec(&self, scheme: Scheme) -> Result<SchemeSpec> {
        SchemeSpec::new(scheme, self.modulation_order, self.num_tx_antennas, self.num_rf_mirrors)
    }
}

/// Rates of every scheme for one row, ordered as [`Scheme::ALL`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataRateRow {
    pub params: ParamRow,
    pub rates: [u32; 4],
}

pub fn data_rate_table(rows: &[ParamRow]) -> Result<Vec<DataRateRow>> {
    rows.iter()
        .map(|row| {
            let mut rates = [0; 4];
            for (slot, scheme) in rates.iter_mut().zip(Scheme::ALL) {
                *slot = row.spec(scheme)?.rate();
            }
            Ok(DataRateRow { params: *row, rates })
        })
        .collect()
}

/// Energy savings against RIS-SM, RIS-MBM and RIS-QSM for one row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyRow {
    pub params: ParamRow,
    pub savings: [f64; 3],
}

pub const BENCHMARKS: [Scheme; 3] = [Scheme::RisSm, Scheme::RisMbm, Scheme::RisQsm];

pub fn energy_table(rows: &[ParamRow]) -> Result<Vec<EnergyRow>> {
    rows.iter()
        .map(|row| {
            let smbm = row.spec(Scheme::RisSmbm)?;
            let mut savings = [0.0; 3];
            for (slot, bench) in savings.iter_mut().zip(BENCHMARKS) {
                *slot = energy_saving(&smbm, &row.spec(bench)?)?;
            }
            Ok(EnergyRow { params: *row, savings })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityParams {
    pub modulation_order: usize,
    pub num_tx_antennas: usize,
    pub num_rf_mirrors: u32,
    pub num_ris_elements: usize,
}

/// Real multiplications per detection for every scheme on one row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub params: ComplexityParams,
    pub smbm_ml: f64,
    pub smbm_elc: f64,
    pub sm: f64,
    pub qsm: f64,
    pub mbm: f64,
}

pub fn complexity_row(p: &ComplexityParams) -> Result<ComplexityRow> {
    let spec = SchemeSpec::new(Scheme::RisSmbm, p.modulation_order, p.num_tx_antennas, p.num_rf_mirrors)?;
    if p.num_ris_elements == 0 {
        return Err(config("num_ris_elements must be at least 1"));
    }
    let m = p.modulation_order as f64;
    let n_t = p.num_tx_antennas as f64;
    let m_rf = f64::from(p.num_rf_mirrors);
    let n = p.num_ris_elements as f64;
    let ns = f64::from(spec.symbol_bits());
    let nsm = f64::from(spec.antenna_bits());
    let ratio = |num: f64, den: f64, what: &str| {
        if den == 0.0 {
            Err(config(format!("zero denominator in the {what} complexity formula")))
        } else {
            Ok(num / den)
        }
    };
    let base = n + 4.0 * m;
    Ok(ComplexityRow {
        params: *p,
        smbm_ml: ml_real_mults(m, n_t, m_rf, n),
        smbm_elc: elc_real_mults(m, n_t, m_rf, n),
        sm: base * n_t * (1.0 + ratio(m_rf, ns + nsm, "RIS-SM")?),
        qsm: base * n_t * (1.0 + ratio(m_rf, ns + 2.0 * nsm, "RIS-QSM")?),
        mbm: base * m_rf.exp2() * (1.0 + ratio(nsm, ns + m_rf, "RIS-MBM")?),
    })
}

pub fn complexity_table(rows: &[ComplexityParams]) -> Result<Vec<ComplexityRow>> {
    rows.iter().map(complexity_row).collect()
}

/// Built-in parameter rows together with previously reported values, used
/// by the `tables` command to flag disagreements with the formulas.
pub mod reference {
    use super::{ComplexityParams, ParamRow};

    /// Rows of the energy-saving table with the reported percentages
    /// against RIS-SM, RIS-MBM and RIS-QSM.
    pub const ENERGY_ROWS: [(ParamRow, [f64; 3]); 3] = [
        (ParamRow::new(8, 4, 5), [50.00, 20.00, 30.00]),
        (ParamRow::new(16, 16, 10), [55.56, 22.22, 33.33]),
        (ParamRow::new(32, 64, 15), [57.69, 23.08, 34.62]),
    ];

    /// Rows of the data-rate table with the reported rates of
    /// RIS-SM, RIS-MBM, RIS-QSM and RIS-SMBM.
    pub const DATA_RATE_ROWS: [(ParamRow, [u32; 4]); 3] = [
        (ParamRow::new(16, 2, 8), [5, 12, 6, 13]),
        (ParamRow::new(4, 8, 5), [5, 7, 8, 10]),
        (ParamRow::new(8, 32, 10), [9, 13, 13, 18]),
    ];

    /// The two complexity/spectral-efficiency comparison points.
    pub const COMPLEXITY_ROWS: [ComplexityParams; 2] = [
        ComplexityParams { modulation_order: 4, num_tx_antennas: 8, num_rf_mirrors: 5, num_ris_elements: 32 },
        ComplexityParams { modulation_order: 8, num_tx_antennas: 32, num_rf_mirrors: 8, num_ris_elements: 128 },
    ];
}

/// A cell where the formula disagrees with a reported value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub row: usize,
    pub scheme: Scheme,
    pub computed: f64,
    pub reported: f64,
}

/// Compares computed rates with reported ones cell by cell.
pub fn rate_discrepancies(computed: &[DataRateRow], reported: &[[u32; 4]]) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    for (row, (c, r)) in computed.iter().zip(reported).enumerate() {
        for (col, scheme) in Scheme::ALL.iter().enumerate() {
            if c.rates[col] != r[col] {
                out.push(Discrepancy {
                    row,
                    scheme: *scheme,
                    computed: f64::from(c.rates[col]),
                    reported: f64::from(r[col]),
                });
            }
        }
    }
    out
}

/// Compares computed savings with reported ones after rounding to two decimals.
pub fn energy_discrepancies(computed: &[EnergyRow], reported: &[[f64; 3]]) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    for (row, (c, r)) in computed.iter().zip(reported).enumerate() {
        for (col, scheme) in BENCHMARKS.iter().enumerate() {
            if format!("{:.2}", c.savings[col]) != format!("{:.2}", r[col]) {
                out.push(Discrepancy { row, scheme: *scheme, computed: c.savings[col], reported: r[col] });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(m: usize, n_t: usize, m_rf: u32) -> ParamRow {
        ParamRow::new(m, n_t, m_rf)
    }

    #[test]
    fn energy_saving_cells() {
        let r = row(8, 4, 5);
        let smbm = r.spec(Scheme::RisSmbm).unwrap();
        let s = energy_saving(&smbm, &r.spec(Scheme::RisSm).unwrap()).unwrap();
        assert_eq!(format!("{s:.2}"), "50.00");
        let r = row(16, 16, 10);
        let s = energy_saving(&r.spec(Scheme::RisSmbm).unwrap(), &r.spec(Scheme::RisMbm).unwrap()).unwrap();
        assert_eq!(format!("{s:.2}"), "22.22");
        assert_eq!(energy_saving(&smbm, &smbm).unwrap(), 0.0);
    }

    #[test]
    fn energy_saving_rejects_mismatched_rows() {
        let a = row(8, 4, 5).spec(Scheme::RisSmbm).unwrap();
        let b = row(8, 8, 5).spec(Scheme::RisSm).unwrap();
        assert!(energy_saving(&a, &b).is_err());
        assert!(energy_saving(&b, &a).is_err());
    }

    #[test]
    fn reference_energy_table_matches() {
        let rows: Vec<ParamRow> = reference::ENERGY_ROWS.iter().map(|r| r.0).collect();
        let reported: Vec<[f64; 3]> = reference::ENERGY_ROWS.iter().map(|r| r.1).collect();
        let table = energy_table(&rows).unwrap();
        assert!(energy_discrepancies(&table, &reported).is_empty());
    }

    #[test]
    fn data_rates() {
        let t = data_rate_table(&[row(16, 2, 8), row(4, 8, 5), row(8, 32, 10)]).unwrap();
        assert_eq!(t[0].rates, [5, 12, 6, 13]);
        assert_eq!(t[1].rates, [5, 7, 8, 10]);
        assert_eq!(t[2].rates, [8, 13, 13, 18]);
        let reported: Vec<[u32; 4]> = reference::DATA_RATE_ROWS.iter().map(|r| r.1).collect();
        let flags = rate_discrepancies(&t, &reported);
        assert_eq!(flags.len(), 1);
        assert_eq!((flags[0].row, flags[0].scheme), (2, Scheme::RisSm));
        assert_eq!((flags[0].computed, flags[0].reported), (8.0, 9.0));
    }

    #[test]
    fn throughput_formula() {
        let cfg = SmbmConfig::new(16, 4, 4, 8).unwrap();
        assert_eq!(throughput(&cfg, 0.0).unwrap(), 10.0);
        assert_eq!(throughput(&cfg, 1.0).unwrap(), 0.0);
        assert_eq!(throughput(&cfg, 0.5).unwrap(), 5.0);
        let slow = cfg.with_symbol_period(2.0).unwrap();
        assert_eq!(throughput(&slow, 0.0).unwrap(), 5.0);
        assert!(throughput(&cfg, 1.5).is_err());
    }

    #[test]
    fn complexity_points() {
        let rows = complexity_table(&reference::COMPLEXITY_ROWS).unwrap();
        assert_eq!(rows[0].smbm_ml, 12288.0);
        assert_eq!(rows[0].smbm_elc, 7680.0);
        // (32 + 16) * 8 * (1 + 5/5)
        assert_eq!(rows[0].sm, 768.0);
        // (32 + 16) * 8 * (1 + 5/8)
        assert_eq!(rows[0].qsm, 624.0);
        // (32 + 16) * 32 * (1 + 3/7)
        assert!((rows[0].mbm - 48.0 * 32.0 * (10.0 / 7.0)).abs() < 1e-9);
        for r in &rows {
            assert!(r.smbm_elc < r.smbm_ml);
        }
    }

    #[test]
    fn degenerate_mbm_cost() {
        let r = complexity_row(&ComplexityParams {
            modulation_order: 4,
            num_tx_antennas: 1,
            num_rf_mirrors: 0,
            num_ris_elements: 16,
        })
        .unwrap();
        assert_eq!(r.mbm, 16.0 + 16.0);
    }

    #[test]
    fn scheme_parsing() {
        assert_eq!("ris-smbm".parse::<Scheme>().unwrap(), Scheme::RisSmbm);
        assert_eq!("RIS_SM".parse::<Scheme>().unwrap(), Scheme::RisSm);
        assert!("foo".parse::<Scheme>().is_err());
    }
}
