//! Property tests for the structural invariants of the library: bit
//! packing, modulation roundtrips, allocation validity, closed-form
//! positivity, and output determinism.

use dfrc::alloc::{
    combinations, pack_bits, unpack_bits, AllocationPattern, CombinationMap, Scheme,
};
use dfrc::beampattern::{dirichlet_mag, sinc, variance_closed, RandomEnsemble};
use dfrc::comm::comm_noise_variance;
use dfrc::config::binomial;
use dfrc::harness::ResultTable;
use dfrc::radar::wrap_angle;
use dfrc::waveform::{gsm_decode, gsm_encode, psk_demodulate, psk_modulate};
use dfrc::SystemConfig;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn test_config(m: usize, m_t_r: usize, j: usize) -> SystemConfig {
    SystemConfig {
        m,
        m_t_r,
        m_t_c: m - m_t_r,
        j,
        ..SystemConfig::default()
    }
}

proptest! {
    #[test]
    fn pack_unpack_roundtrip(word in 0usize..4096, extra in 0usize..4) {
        let n = 12 + extra;
        prop_assert_eq!(pack_bits(&unpack_bits(word, n)), word);
        prop_assert_eq!(unpack_bits(word, n).len(), n);
    }

    #[test]
    fn psk_roundtrip(word in proptest::collection::vec(0u8..2, 1..=3)) {
        let j = 1usize << word.len();
        let point = psk_modulate(&word, j).unwrap();
        prop_assert!((point.norm() - 1.0).abs() < 1e-12);
        prop_assert_eq!(psk_demodulate(point, j), word);
    }

    #[test]
    fn gsm_bit_roundtrip(seed in any::<u64>(), n_symbols in 1usize..8) {
        let cfg = SystemConfig::default();
        let map = CombinationMap::lexicographic(cfg.m, cfg.m_t_c);
        let rate = cfg.rate_bits();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<u8> = (0..n_symbols * rate)
            .map(|_| if rng.gen::<bool>() { 1 } else { 0 })
            .collect();
        let symbols = gsm_encode(&bits, &cfg, &map).unwrap();
        prop_assert_eq!(symbols.len(), n_symbols);
        prop_assert_eq!(gsm_decode(&symbols, &cfg, &map).unwrap(), bits);
    }

    #[test]
    fn allocations_partition_the_array(
        seed in any::<u64>(),
        m in 2usize..=8,
        split in 1usize..8,
        scheme_idx in 0usize..4,
    ) {
        let m_t_r = 1 + split % (m - 1);
        let cfg = test_config(m, m_t_r, 4);
        let scheme = Scheme::ALL[scheme_idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alloc = AllocationPattern::for_scheme(scheme, &cfg, &mut rng);
        prop_assert_eq!(alloc.num_slots(), cfg.k);
        prop_assert_eq!(alloc.num_elements(), m);
        let expected_radar = if scheme == Scheme::Full { m } else { m_t_r };
        for k in 0..cfg.k {
            let radar = alloc.radar_set(k);
            let comm = alloc.comm_set(k);
            prop_assert_eq!(radar.len(), expected_radar);
            prop_assert_eq!(comm.len(), m - expected_radar);
            let mut all: Vec<usize> = radar.iter().copied().chain(comm).collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..m).collect::<Vec<_>>());
            // radar sets are stored sorted, so windows are strictly increasing
            prop_assert!(radar.windows(2).all(|w| w[0] < w[1]));
        }
        let constant = alloc.is_slot_constant();
        match scheme {
            Scheme::Full | Scheme::FixedAdjacent | Scheme::FixedRandom => prop_assert!(constant),
            Scheme::Hopping => {} // may or may not repeat by chance
        }
    }

    #[test]
    fn combination_map_roundtrip(m in 2usize..=8, r_off in 0usize..8) {
        let r = 1 + r_off % (m - 1).max(1);
        let map = CombinationMap::lexicographic(m, r);
        prop_assert_eq!(map.len(), 1usize << map.spatial_bits());
        for w in 0..map.len() {
            let combo = map.combination(w).to_vec();
            prop_assert_eq!(combo.len(), r);
            prop_assert_eq!(map.index_of(&combo), Some(w));
        }
    }

    #[test]
    fn combinations_are_complete_and_sorted(m in 1usize..=9, r_off in 0usize..10) {
        let r = r_off % (m + 1);
        let all = combinations(m, r);
        prop_assert_eq!(all.len() as u64, binomial(m, r));
        for c in &all {
            prop_assert!(c.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(c.iter().all(|&e| e < m));
        }
    }

    #[test]
    fn wrap_angle_is_canonical(a in -50.0f64..50.0, k in -3i32..=3) {
        let w = wrap_angle(a);
        prop_assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&w));
        let shifted = wrap_angle(a + 2.0 * std::f64::consts::PI * k as f64);
        prop_assert!((shifted - w).abs() < 1e-9);
    }

    #[test]
    fn pattern_closed_forms_are_bounded(td_frac in -2.0f64..2.0, f in -6.3f64..6.3) {
        let cfg = SystemConfig::default();
        let td = td_frac / cfg.b_r;
        prop_assert!(sinc(cfg.b_r * td).abs() <= 1.0 + 1e-12);
        let d = dirichlet_mag(cfg.m, f);
        prop_assert!((0.0..=cfg.m as f64 + 1e-12).contains(&d));
        for ensemble in [RandomEnsemble::PerSlot, RandomEnsemble::PerPulse] {
            prop_assert!(variance_closed(&cfg, ensemble, td, f) >= -1e-12);
        }
    }

    #[test]
    fn noise_variance_monotone_in_snr(snr in -20.0f64..40.0, n_active in 1usize..=8) {
        let v = comm_noise_variance(n_active, snr);
        prop_assert!(v > 0.0);
        prop_assert!(comm_noise_variance(n_active, snr + 1.0) < v);
    }

    #[test]
    fn result_table_csv_is_stable(
        values in proptest::collection::vec(-1.0e3f64..1.0e3, 1..16),
        seed in any::<u64>(),
    ) {
        let mut t = ResultTable::default();
        for (i, &v) in values.iter().enumerate() {
            t.push(i as f64, "hopping", "metric", v, 10, seed);
        }
        let csv = t.to_csv_string();
        prop_assert_eq!(csv.lines().count(), values.len() + 1);
        prop_assert_eq!(csv.clone(), t.to_csv_string());
        for (i, &v) in values.iter().enumerate() {
            prop_assert_eq!(t.get("hopping", "metric", Some(i as f64)), Some(v));
        }
        // every value survives the text roundtrip exactly
        for (line, &v) in csv.lines().skip(1).zip(&values) {
            let field: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
            prop_assert_eq!(field, v);
        }
    }

    #[test]
    fn scheme_names_roundtrip(idx in 0usize..4) {
        let s = Scheme::ALL[idx];
        prop_assert_eq!(Scheme::from_name(s.name()), Some(s));
    }
}
