//! Link-level simulation and analysis of RIS-aided spatial media-based
//! modulation (RIS-SMBM).
//!
//! A source with `n_T` antennas, each surrounded by `m_rf` RF mirrors, sends
//! one QAM symbol per period through an `N`-element reconfigurable
//! intelligent surface to a single-antenna destination. Information rides on
//! the symbol, the mirror activation pattern and the active antenna index.
//!
//! * [`modulation`]: frame splitting, constellations, index arithmetic
//! * [`channel`]: Rayleigh fading, RIS phase alignment, effective channel
//! * [`detect`]: ML and low-complexity detectors
//! * [`analysis`]: union-bound ABER and the comparison tables
//! * [`simkit`]: deterministic parallel Monte Carlo BER engine
//! * [`cli`]: configuration files, presets and CSV output

pub mod analysis;
pub mod channel;
pub mod cli;
pub mod detect;
pub mod error;
pub mod modulation;
pub mod rng;
pub mod simkit;

pub use error::{Error, Result};

/// Symbol energy and noise variance `(E_s, N_0)` realizing
/// `snr_db = 10 log10(E_s / N_0)`, with the larger of the two fixed at 1.
///
/// `+inf` dB gives a noiseless link and `-inf` dB a link without signal.
pub fn link_energies(snr_db: f64) -> (f64, f64) {
    if snr_db >= 0.0 {
        (1.0, 10f64.powf(-snr_db / 10.0))
    } else {
        (10f64.powf(snr_db / 10.0), 1.0)
    }
}
