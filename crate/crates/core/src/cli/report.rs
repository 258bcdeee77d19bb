//! CSV and aligned-text rendering. Every CSV has a header row and ends with a
//! newline; floats use fixed formats so reruns are byte-identical.

use std::fmt::Write as _;

use crate::analysis::{
    complexity_table, data_rate_table, energy_discrepancies, energy_table, rate_discrepancies, reference, BoundPoint,
    ComplexityParams, ComplexityRow, DataRateRow, Discrepancy, EnergyRow, ParamRow, Scheme, BENCHMARKS,
};
use crate::simkit::BerPoint;

use super::CliError;

pub const BER_HEADER: &str = "snr_db,ber,stderr,bit_errors,bits,trials,truncated";
pub const BOUND_HEADER: &str = "snr_db,aber_bound,stderr,samples,clamped";

pub fn ber_csv(points: &[BerPoint]) -> String {
    let mut out = format!("{BER_HEADER}\n");
    for p in points {
        writeln!(
            out,
            "{},{:.6e},{:.6e},{},{},{},{}",
            p.snr_db,
            p.ber(),
            p.stderr(),
            p.bit_errors,
            p.bits,
            p.trials,
            p.truncated
        )
        .unwrap();
    }
    out
}

pub fn bound_csv(points: &[BoundPoint]) -> String {
    let mut out = format!("{BOUND_HEADER}\n");
    for p in points {
        writeln!(out, "{},{:.6e},{:.6e},{},{}", p.snr_db, p.aber_bound, p.stderr, p.samples, p.clamped()).unwrap();
    }
    out
}

/// All three comparison tables, with reported values when the built-in rows
/// are used.
#[derive(Debug, Clone)]
pub struct Tables {
    pub energy: Vec<EnergyRow>,
    pub energy_flags: Vec<Discrepancy>,
    pub rates: Vec<DataRateRow>,
    pub rate_flags: Vec<Discrepancy>,
    pub complexity: Vec<ComplexityRow>,
    pub complexity_rates: Vec<DataRateRow>,
    reported_rates: Option<Vec<[u32; 4]>>,
    reported_energy: Option<Vec<[f64; 3]>>,
}

/// Builds the tables from user rows `(M, n_T, m_rf, N)`, or from the
/// built-in rows when `rows` is empty. Rows without `N` are skipped by the
/// complexity table.
pub fn build_tables(rows: &[(usize, usize, u32, Option<usize>)]) -> Result<Tables, CliError> {
    let (param_rows, complexity_rows, reported_rates, reported_energy) = if rows.is_empty() {
        (
            None,
            reference::COMPLEXITY_ROWS.to_vec(),
            Some(reference::DATA_RATE_ROWS.iter().map(|r| r.1).collect::<Vec<_>>()),
            Some(reference::ENERGY_ROWS.iter().map(|r| r.1).collect::<Vec<_>>()),
        )
    } else {
        let params: Vec<ParamRow> = rows.iter().map(|r| ParamRow::new(r.0, r.1, r.2)).collect();
        let complexity = rows
            .iter()
            .filter_map(|r| {
                r.3.map(|n| ComplexityParams {
                    modulation_order: r.0,
                    num_tx_antennas: r.1,
                    num_rf_mirrors: r.2,
                    num_ris_elements: n,
                })
            })
            .collect();
        (Some(params), complexity, None, None)
    };
    let energy_rows: Vec<ParamRow> =
        param_rows.clone().unwrap_or_else(|| reference::ENERGY_ROWS.iter().map(|r| r.0).collect());
    let rate_rows: Vec<ParamRow> =
        param_rows.unwrap_or_else(|| reference::DATA_RATE_ROWS.iter().map(|r| r.0).collect());

    let energy = energy_table(&energy_rows)?;
    let rates = data_rate_table(&rate_rows)?;
    let complexity = complexity_table(&complexity_rows)?;
    let complexity_rates = data_rate_table(
        &complexity_rows
            .iter()
            .map(|p| ParamRow::new(p.modulation_order, p.num_tx_antennas, p.num_rf_mirrors))
            .collect::<Vec<_>>(),
    )?;
    let energy_flags = reported_energy.as_ref().map(|r| energy_discrepancies(&energy, r)).unwrap_or_default();
    let rate_flags = reported_rates.as_ref().map(|r| rate_discrepancies(&rates, r)).unwrap_or_default();
    Ok(Tables {
        energy,
        energy_flags,
        rates,
        rate_flags,
        complexity,
        complexity_rates,
        reported_rates,
        reported_energy,
    })
}

fn flag_for(flags: &[Discrepancy], row: usize, scheme: Scheme) -> Option<&Discrepancy> {
    flags.iter().find(|d| d.row == row && d.scheme == scheme)
}

impl Tables {
    pub fn energy_csv(&self) -> String {
        let mut out = String::from("M,n_T,m_rf,scheme,saving_percent,reported_percent,flag\n");
        for (i, row) in self.energy.iter().enumerate() {
            for (col, scheme) in BENCHMARKS.iter().enumerate() {
                let reported = self.reported_energy.as_ref().map(|r| format!("{:.2}", r[i][col]));
                let flagged = flag_for(&self.energy_flags, i, *scheme).is_some();
                writeln!(
                    out,
                    "{},{},{},{},{:.2},{},{}",
                    row.params.modulation_order,
                    row.params.num_tx_antennas,
                    row.params.num_rf_mirrors,
                    scheme,
                    row.savings[col],
                    reported.unwrap_or_default(),
                    if flagged { "mismatch" } else { "" }
                )
                .unwrap();
            }
        }
        out
    }

    pub fn energy_text(&self) -> String {
        let mut out = String::from("Energy saving of RIS-SMBM [%]\n");
        writeln!(out, "{:>4} {:>5} {:>5} | {:>8} {:>8} {:>8}", "M", "n_T", "m_rf", "RIS-SM", "RIS-MBM", "RIS-QSM")
            .unwrap();
        for (i, row) in self.energy.iter().enumerate() {
            write!(
                out,
                "{:>4} {:>5} {:>5} |",
                row.params.modulation_order, row.params.num_tx_antennas, row.params.num_rf_mirrors
            )
            .unwrap();
            for (col, scheme) in BENCHMARKS.iter().enumerate() {
                let mark = if flag_for(&self.energy_flags, i, *scheme).is_some() { "*" } else { " " };
                write!(out, " {:>7.2}{mark}", row.savings[col]).unwrap();
            }
            out.push('\n');
        }
        for d in &self.energy_flags {
            writeln!(out, "  * row {} {}: formula {:.2}, reported {:.2}", d.row + 1, d.scheme, d.computed, d.reported)
                .unwrap();
        }
        out
    }

    pub fn rate_csv(&self) -> String {
        let mut out = String::from("M,n_T,m_rf,scheme,rate_bits,reported_bits,flag\n");
        for (i, row) in self.rates.iter().enumerate() {
            for (col, scheme) in Scheme::ALL.iter().enumerate() {
                let reported = self.reported_rates.as_ref().map(|r| r[i][col].to_string());
                let flagged = flag_for(&self.rate_flags, i, *scheme).is_some();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    row.params.modulation_order,
                    row.params.num_tx_antennas,
                    row.params.num_rf_mirrors,
                    scheme,
                    row.rates[col],
                    reported.unwrap_or_default(),
                    if flagged { "mismatch" } else { "" }
                )
                .unwrap();
            }
        }
        out
    }

    pub fn rate_text(&self) -> String {
        let mut out = String::from("Data rate [bits/s/Hz]\n");
        writeln!(
            out,
            "{:>4} {:>5} {:>5} | {:>7} {:>8} {:>8} {:>9}",
            "M", "n_T", "m_rf", "RIS-SM", "RIS-MBM", "RIS-QSM", "RIS-SMBM"
        )
        .unwrap();
        for (i, row) in self.rates.iter().enumerate() {
            write!(
                out,
                "{:>4} {:>5} {:>5} |",
                row.params.modulation_order, row.params.num_tx_antennas, row.params.num_rf_mirrors
            )
            .unwrap();
            let widths = [7, 8, 8, 9];
            for (col, scheme) in Scheme::ALL.iter().enumerate() {
                let mark = if flag_for(&self.rate_flags, i, *scheme).is_some() { "*" } else { " " };
                write!(out, " {:>w$}{mark}", row.rates[col], w = widths[col] - 1).unwrap();
            }
            out.push('\n');
        }
        for d in &self.rate_flags {
            writeln!(out, "  * row {} {}: formula {}, reported {}", d.row + 1, d.scheme, d.computed, d.reported)
                .unwrap();
        }
        out
    }

    pub fn complexity_csv(&self) -> String {
        let mut out = String::from(
            "M,n_T,m_rf,N,smbm_ml_rm,smbm_elc_rm,sm_rm,qsm_rm,mbm_rm,sm_rate,mbm_rate,qsm_rate,smbm_rate\n",
        );
        for (row, rates) in self.complexity.iter().zip(&self.complexity_rates) {
            let p = &row.params;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                p.modulation_order,
                p.num_tx_antennas,
                p.num_rf_mirrors,
                p.num_ris_elements,
                row.smbm_ml,
                row.smbm_elc,
                row.sm,
                row.qsm,
                row.mbm,
                rates.rates[0],
                rates.rates[1],
                rates.rates[2],
                rates.rates[3]
            )
            .unwrap();
        }
        out
    }

    pub fn complexity_text(&self) -> String {
        let mut out = String::from("Receiver complexity [real multiplications] and rate [bits/s/Hz]\n");
        writeln!(
            out,
            "{:>4} {:>5} {:>5} {:>5} | {:>10} {:>10} {:>10} {:>10} {:>10} | {:>3} {:>3} {:>3} {:>4}",
            "M", "n_T", "m_rf", "N", "SMBM-ML", "SMBM-ELC", "RIS-SM", "RIS-QSM", "RIS-MBM", "SM", "MBM", "QSM", "SMBM"
        )
        .unwrap();
        for (row, rates) in self.complexity.iter().zip(&self.complexity_rates) {
            let p = &row.params;
            writeln!(
                out,
                "{:>4} {:>5} {:>5} {:>5} | {:>10.0} {:>10.0} {:>10.1} {:>10.1} {:>10.1} | {:>3} {:>3} {:>3} {:>4}",
                p.modulation_order,
                p.num_tx_antennas,
                p.num_rf_mirrors,
                p.num_ris_elements,
                row.smbm_ml,
                row.smbm_elc,
                row.sm,
                row.qsm,
                row.mbm,
                rates.rates[0],
                rates.rates[1],
                rates.rates[2],
                rates.rates[3]
            )
            .unwrap();
        }
        out
    }
}
