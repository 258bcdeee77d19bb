//! Built-in experiment sets for the published figures and tables.
//!
//! Figure presets carry the published system parameters. The published
//! SNR axes use a normalization that is not stated, so the grids below are
//! chosen to cover each curve's waterfall under the `E_s/N_0` convention
//! used here.

use super::{CliError, TableSet};

pub const NAMES: [&str; 9] = ["fig3a", "fig3b", "fig4", "fig5", "fig6a", "fig6b", "table2", "table3", "table4"];

struct Exp {
    name: String,
    scheme: &'static str,
    m: usize,
    n_t: usize,
    m_rf: u32,
    n: usize,
    grid: Grid,
    detector: &'static str,
}

enum Grid {
    Range(f64, f64, f64),
    List(Vec<f64>),
}

fn exp(name: impl Into<String>, scheme: &'static str, m: usize, n_t: usize, m_rf: u32, n: usize, grid: Grid) -> Exp {
    Exp { name: name.into(), scheme, m, n_t, m_rf, n, grid, detector: "ml" }
}

fn render(exps: &[Exp], max_trials: u64) -> String {
    let mut out = String::new();
    for e in exps {
        out.push_str(&format!("[{}]\n", e.name));
        out.push_str(&format!("scheme = \"{}\"\n", e.scheme));
        out.push_str(&format!("modulation_order = {}\n", e.m));
        out.push_str(&format!("num_tx_antennas = {}\n", e.n_t));
        out.push_str(&format!("num_rf_mirrors = {}\n", e.m_rf));
        out.push_str(&format!("num_ris_elements = {}\n", e.n));
        out.push_str(&format!("detector = \"{}\"\n", e.detector));
        match &e.grid {
            Grid::Range(a, b, s) => out.push_str(&format!("start_db = {a:.1}\nstop_db = {b:.1}\nstep_db = {s:.1}\n")),
            Grid::List(v) => {
                let items: Vec<String> = v.iter().map(|x| format!("{x:.1}")).collect();
                out.push_str(&format!("snr_db = [{}]\n", items.join(", ")));
            }
        }
        out.push_str(&format!("max_trials = {max_trials}\n\n"));
    }
    out
}

/// Pairs of RIS-SMBM ML/ELC plus the simulable benchmarks at equal rate.
fn comparison(
    tag: &str,
    smbm: (usize, usize, u32),
    mbm: (usize, u32),
    sm: (usize, usize),
    n: usize,
    grid: (f64, f64),
) -> Vec<Exp> {
    let range = || Grid::Range(grid.0, grid.1, 2.0);
    let ml = exp(format!("{tag}_smbm_ml"), "RIS-SMBM", smbm.0, smbm.1, smbm.2, n, range());
    let mut elc = exp(format!("{tag}_smbm_elc"), "RIS-SMBM", smbm.0, smbm.1, smbm.2, n, range());
    elc.detector = "elc";
    vec![
        ml,
        elc,
        exp(format!("{tag}_mbm"), "RIS-MBM", mbm.0, 1, mbm.1, n, range()),
        exp(format!("{tag}_sm"), "RIS-SM", sm.0, sm.1, 0, n, range()),
    ]
}

/// The TOML text of a figure preset, or the table set of a table preset.
pub enum Preset {
    Config(String),
    Tables(TableSet),
}

pub fn preset(name: &str) -> Result<Preset, CliError> {
    let text = match name {
        "fig3a" => render(
            &[1u32, 3, 5].map(|m_rf| {
                exp(format!("fig3a_mrf{m_rf}"), "RIS-SMBM", 2, 4, m_rf, 64, Grid::Range(-36.0, -10.0, 2.0))
            }),
            2_000_000,
        ),
        "fig3b" => render(
            &[(4usize, 0.0, 24.0), (16, -8.0, 12.0), (64, -20.0, 0.0), (256, -32.0, -12.0)]
                .map(|(n, a, b)| exp(format!("fig3b_n{n}"), "RIS-SMBM", 4, 4, 2, n, Grid::Range(a, b, 2.0))),
            1_000_000,
        ),
        "fig4" => render(&comparison("fig4", (64, 2, 1), (8, 5), (4, 64), 128, (-30.0, 0.0)), 1_000_000),
        "fig5" => render(&comparison("fig5", (128, 4, 1), (16, 6), (4, 256), 256, (-36.0, -6.0)), 200_000),
        "fig6a" => {
            let mut v = Vec::new();
            for m_rf in [1u32, 3, 5, 7, 9] {
                for n_t in [2usize, 4, 8, 16, 32] {
                    v.push(exp(
                        format!("fig6a_mrf{m_rf}_nt{n_t}"),
                        "RIS-SMBM",
                        4,
                        n_t,
                        m_rf,
                        32,
                        Grid::List(vec![-6.0]),
                    ));
                }
            }
            render(&v, 200_000)
        }
        "fig6b" => {
            let mut v = Vec::new();
            for m_rf in [1u32, 2, 3, 4, 5] {
                for n in [4usize, 8, 16, 32, 64] {
                    v.push(exp(format!("fig6b_mrf{m_rf}_n{n}"), "RIS-SMBM", 4, 4, m_rf, n, Grid::List(vec![0.0])));
                }
            }
            render(&v, 200_000)
        }
        "table2" => return Ok(Preset::Tables(TableSet::EnergySaving)),
        "table3" => return Ok(Preset::Tables(TableSet::DataRate)),
        "table4" => return Ok(Preset::Tables(TableSet::Complexity)),
        other => {
            return Err(CliError::Config(format!("unknown preset '{other}' (expected one of {})", NAMES.join(", "))))
        }
    };
    Ok(Preset::Config(text))
}
