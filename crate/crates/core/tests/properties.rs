use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ris_smbm::analysis::{cpep, q_function};
use ris_smbm::channel::{align_phases, draw_channel, effective_channel, transmit};
use ris_smbm::detect::{detect_elc, detect_ml, ml_metrics};
use ris_smbm::link_energies;
use ris_smbm::modulation::{
    build_constellation, build_tx_vector, merge_bits, merge_word, split_bits, split_word, BitFrame, SmbmConfig,
};

fn config() -> impl Strategy<Value = SmbmConfig> {
    (1u32..=8, 0u32..=6, 0u32..=6, 1usize..=24).prop_filter_map("eta too large", |(b, a, m_rf, n)| {
        if b + a + m_rf > 24 {
            return None;
        }
        SmbmConfig::new(1 << b, 1 << a, m_rf, n).ok()
    })
}

fn small_config() -> impl Strategy<Value = SmbmConfig> {
    (1u32..=4, 0u32..=2, 0u32..=2, 1usize..=12)
        .prop_map(|(b, a, m_rf, n)| SmbmConfig::new(1 << b, 1 << a, m_rf, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn frame_round_trip(cfg in config(), raw in any::<u64>()) {
        let eta = cfg.spectral_efficiency();
        let word = raw & ((1u64 << eta) - 1);
        let frame = BitFrame::from_word(word, eta);
        let sel = split_bits(&frame, &cfg).unwrap();
        prop_assert_eq!(&merge_bits(&sel, &cfg).unwrap(), &frame);
        prop_assert_eq!(split_word(word, &cfg), sel);
        prop_assert_eq!(merge_word(&sel, &cfg), word);
        prop_assert!(sel.symbol >= 1 && sel.symbol <= cfg.modulation_order());
        prop_assert!(sel.flat >= 1 && sel.flat <= cfg.pair_count());
    }

    #[test]
    fn tx_vector_is_one_hot(cfg in config(), raw in any::<u64>()) {
        prop_assume!(cfg.pair_count() <= 4096);
        let c = build_constellation(cfg.modulation_order()).unwrap();
        let word = raw & ((1u64 << cfg.spectral_efficiency()) - 1);
        let sel = split_word(word, &cfg);
        let v = build_tx_vector(&sel, &cfg, &c).unwrap();
        prop_assert_eq!(v.len(), cfg.pair_count());
        let nonzero: Vec<usize> = (0..v.len()).filter(|&i| v[i] != Complex64::new(0.0, 0.0)).collect();
        prop_assert_eq!(nonzero, vec![sel.flat - 1]);
        prop_assert_eq!(v[sel.flat - 1], c.point(sel.symbol));
    }

    #[test]
    fn aligned_entry_is_real_positive(cfg in small_config(), seed in any::<u64>(), raw in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = draw_channel(&cfg, &mut rng);
        let active = (raw as usize % cfg.pair_count()) + 1;
        let h = effective_channel(&ch, &align_phases(&ch, active).unwrap()).unwrap();
        let a = h.get(active);
        let magnitude: f64 = (0..cfg.num_ris_elements()).map(|n| ch.alpha(active, n) * ch.beta(n)).sum();
        prop_assert!(a.re > 0.0);
        prop_assert!(a.im.abs() <= 1e-9 * a.re.max(1.0));
        prop_assert!((a.re - magnitude).abs() <= 1e-9 * magnitude.max(1.0));
    }

    #[test]
    fn ml_and_elc_agree(cfg in small_config(), seed in any::<u64>(), snr in -20.0f64..30.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = build_constellation(cfg.modulation_order()).unwrap();
        let word = rand::Rng::gen_range(&mut rng, 0..1u64 << cfg.spectral_efficiency());
        let sel = split_word(word, &cfg);
        let ch = draw_channel(&cfg, &mut rng);
        let h = effective_channel(&ch, &align_phases(&ch, sel.flat).unwrap()).unwrap();
        let (es, n0) = link_energies(snr);
        let rx = transmit(&h, &sel, c.point(sel.symbol), es, n0, &mut rng).unwrap();
        let ml = detect_ml(&rx, &h, &c, &cfg).unwrap();
        let elc = detect_elc(&rx, &h, &c, &cfg).unwrap();
        prop_assert_eq!(ml.selection, elc.selection);
        // the decision is a global minimizer of the ML metric
        let metrics = ml_metrics(&rx, &h, &c);
        let best = metrics.iter().cloned().fold(f64::INFINITY, f64::min);
        let chosen = metrics[(ml.selection.flat - 1) * cfg.modulation_order() + ml.selection.symbol - 1];
        prop_assert!(chosen <= best);
    }

    #[test]
    fn cpep_is_a_bounded_symmetric_probability(cfg in small_config(), seed in any::<u64>(), a in any::<u64>(), b in any::<u64>(), snr in -20.0f64..30.0) {
        let mask = (1u64 << cfg.spectral_efficiency()) - 1;
        prop_assume!(a & mask != b & mask);
        let (tx, hyp) = (split_word(a & mask, &cfg), split_word(b & mask, &cfg));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = build_constellation(cfg.modulation_order()).unwrap();
        let ch = draw_channel(&cfg, &mut rng);
        let h = effective_channel(&ch, &align_phases(&ch, tx.flat).unwrap()).unwrap();
        let (es, n0) = link_energies(snr);
        let p = cpep(&h, &tx, &hyp, &c, es, n0).unwrap();
        prop_assert!((0.0..=0.5).contains(&p));
        prop_assert_eq!(p, cpep(&h, &hyp, &tx, &c, es, n0).unwrap());
    }

    #[test]
    fn link_energies_realize_the_ratio(snr in -80.0f64..80.0) {
        let (es, n0) = link_energies(snr);
        prop_assert!((10.0 * (es / n0).log10() - snr).abs() < 1e-9);
        prop_assert!(es <= 1.0 && n0 <= 1.0 && es.max(n0) == 1.0);
    }

    #[test]
    fn q_function_is_a_decreasing_tail(x in -8.0f64..8.0, dx in 1e-3f64..2.0) {
        prop_assert!(q_function(x) >= q_function(x + dx));
        prop_assert!((q_function(x) + q_function(-x) - 1.0).abs() < 1e-12);
    }
}
