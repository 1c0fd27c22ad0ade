//! Communication link: candidate transmit vectors for generalized spatial
//! modulation (GSM) and plain spatial multiplexing (SMX), a flat Rayleigh
//! MIMO channel, ML detection, and BER / mutual-information estimators.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::alloc::{unpack_bits, CombinationMap};
use crate::beampattern::mix;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::waveform::{gsm_encode, psk_modulate};

/// Transmission mode over the same antenna array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommMode {
    /// Generalized spatial modulation: spatial bits pick the active element
    /// subset, constellation bits pick its PSK points.
    Gsm,
    /// Spatial multiplexing on a fixed set of active elements, with the PSK
    /// order raised so both modes carry the same bits per symbol.
    Smx,
}

impl CommMode {
    pub fn name(self) -> &'static str {
        match self {
            CommMode::Gsm => "gsm",
            CommMode::Smx => "smx",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "gsm" => Ok(CommMode::Gsm),
            "smx" => Ok(CommMode::Smx),
            other => Err(Error::InvalidConfig(format!("unknown comm mode '{other}'"))),
        }
    }
}

/// Exhaustive candidate alphabet: one length-`m` transmit vector and one
/// `rate_bits`-long label per input word.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub m: usize,
    pub rate_bits: usize,
    /// Active elements per symbol (equal for every candidate).
    pub n_active: usize,
    vectors: Vec<Complex64>,
    labels: Vec<u8>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        1 << self.rate_bits
    }

    pub fn is_empty(&self) -> bool {
        self.rate_bits == 0
    }

    /// Transmit vector of candidate word `i`.
    pub fn vector(&self, i: usize) -> &[Complex64] {
        &self.vectors[i * self.m..(i + 1) * self.m]
    }

    /// Bit label (MSB-first) of candidate word `i`.
    pub fn label(&self, i: usize) -> &[u8] {
        &self.labels[i * self.rate_bits..(i + 1) * self.rate_bits]
    }

    /// All GSM symbols for the configured array: every `rate_bits`-long
    /// word, encoded exactly like the waveform bit mapping.
    pub fn gsm(cfg: &SystemConfig, map: &CombinationMap) -> Result<CandidateSet> {
        if cfg.m_t_c == 0 {
            return Err(Error::InvalidConfig(
                "gsm candidates need m_t_c >= 1".into(),
            ));
        }
        let rate = cfg.rate_bits();
        let mut vectors = Vec::with_capacity((1 << rate) * cfg.m);
        let mut labels = Vec::with_capacity((1 << rate) * rate);
        for word in 0..1usize << rate {
            let bits = unpack_bits(word, rate);
            let sym = gsm_encode(&bits, cfg, map)?.remove(0);
            let mut x = vec![Complex64::new(0.0, 0.0); cfg.m];
            for (&e, &s) in sym.comm_elements.iter().zip(&sym.symbols) {
                x[e] = s;
            }
            vectors.extend(x);
            labels.extend(bits);
        }
        Ok(CandidateSet {
            m: cfg.m,
            rate_bits: rate,
            n_active: cfg.m_t_c,
            vectors,
            labels,
        })
    }

    /// Rate-matched SMX alphabet: the first `m_t_c` elements are always
    /// active and carry J'-PSK with `m_t_c * log2(J') = rate_bits`.
    pub fn smx(cfg: &SystemConfig) -> Result<CandidateSet> {
        if cfg.m_t_c == 0 {
            return Err(Error::InvalidConfig(
                "smx candidates need m_t_c >= 1".into(),
            ));
        }
        let rate = cfg.rate_bits();
        if !rate.is_multiple_of(cfg.m_t_c) {
            return Err(Error::InvalidConfig(format!(
                "rate {rate} bits is not divisible by {} active elements",
                cfg.m_t_c
            )));
        }
        let bits_per_stream = rate / cfg.m_t_c;
        let j = 1usize << bits_per_stream;
        let mut vectors = Vec::with_capacity((1 << rate) * cfg.m);
        let mut labels = Vec::with_capacity((1 << rate) * rate);
        for word in 0..1usize << rate {
            let bits = unpack_bits(word, rate);
            let mut x = vec![Complex64::new(0.0, 0.0); cfg.m];
            for (s, w) in bits.chunks(bits_per_stream).enumerate() {
                x[s] = psk_modulate(w, j)?;
            }
            vectors.extend(x);
            labels.extend(bits);
        }
        Ok(CandidateSet {
            m: cfg.m,
            rate_bits: rate,
            n_active: cfg.m_t_c,
            vectors,
            labels,
        })
    }

    pub fn for_mode(mode: CommMode, cfg: &SystemConfig, map: &CombinationMap) -> Result<Self> {
        match mode {
            CommMode::Gsm => CandidateSet::gsm(cfg, map),
            CommMode::Smx => CandidateSet::smx(cfg),
        }
    }
}

/// Row-major `m_r_c x m` flat-fading channel matrix with i.i.d. CN(0,1)
/// entries.
pub fn channel_rayleigh<R: Rng + ?Sized>(m_r_c: usize, m: usize, rng: &mut R) -> Vec<Complex64> {
    let g = Normal::new(0.0, (0.5f64).sqrt()).expect("valid std");
    (0..m_r_c * m)
        .map(|_| Complex64::new(g.sample(rng), g.sample(rng)))
        .collect()
}

/// y = H x + n with circular complex noise of variance `sigma2` per
/// receive antenna.
pub fn channel_apply<R: Rng + ?Sized>(
    h: &[Complex64],
    x: &[Complex64],
    sigma2: f64,
    rng: &mut R,
) -> Vec<Complex64> {
    let m = x.len();
    let m_r = h.len() / m;
    let g = Normal::new(0.0, (sigma2 / 2.0).sqrt()).expect("valid std");
    (0..m_r)
        .map(|r| {
            let mut acc = Complex64::new(g.sample(rng), g.sample(rng));
            for c in 0..m {
                acc += h[r * m + c] * x[c];
            }
            acc
        })
        .collect()
}

/// Squared distances ||y - H x_i||^2 for every candidate.
fn candidate_distances(y: &[Complex64], h: &[Complex64], cands: &CandidateSet) -> Vec<f64> {
    let m = cands.m;
    let m_r = y.len();
    (0..cands.len())
        .map(|i| {
            let x = cands.vector(i);
            let mut d = 0.0;
            for r in 0..m_r {
                let mut acc = y[r];
                for c in 0..m {
                    acc -= h[r * m + c] * x[c];
                }
                d += acc.norm_sqr();
            }
            d
        })
        .collect()
}

/// Maximum-likelihood detection: the candidate minimizing ||y - H x||^2;
/// ties resolve to the lowest candidate index.
pub fn ml_detect(y: &[Complex64], h: &[Complex64], cands: &CandidateSet) -> usize {
    let d = candidate_distances(y, h, cands);
    let mut best = 0usize;
    for (i, &di) in d.iter().enumerate().skip(1) {
        if di < d[best] {
            best = i;
        }
    }
    best
}

/// Noise variance realizing a per-bit-stream SNR: unit-power PSK on
/// `n_active` elements through CN(0,1) fading gives average receive energy
/// `n_active` per antenna, so sigma^2 = n_active / SNR.
pub fn comm_noise_variance(n_active: usize, snr_db: f64) -> f64 {
    n_active as f64 / 10f64.powf(snr_db / 10.0)
}

/// Monte-Carlo bit error rate of ML detection over i.i.d. Rayleigh fading
/// (fresh H per symbol). Deterministic in `seed`.
pub fn ber_experiment(
    cands: &CandidateSet,
    m_r_c: usize,
    snr_db: f64,
    n_symbols: usize,
    seed: u64,
) -> f64 {
    use rand::SeedableRng;
    let sigma2 = comm_noise_variance(cands.n_active, snr_db);
    let rate = cands.rate_bits;
    let errors: u64 = (0..n_symbols)
        .into_par_iter()
        .map(|i| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(mix(seed) ^ mix(i as u64));
            let tx = (rng.gen::<u64>() % cands.len() as u64) as usize;
            let h = channel_rayleigh(m_r_c, cands.m, &mut rng);
            let y = channel_apply(&h, cands.vector(tx), sigma2, &mut rng);
            let det = ml_detect(&y, &h, cands);
            cands
                .label(tx)
                .iter()
                .zip(cands.label(det))
                .filter(|(a, b)| a != b)
                .count() as u64
        })
        .sum();
    errors as f64 / (n_symbols * rate) as f64
}

/// Monte-Carlo mutual information (bits/symbol) between the uniform
/// candidate input and the ML channel output, for i.i.d. Rayleigh fading:
///
/// I = R - E[ log2 sum_i exp((||y - H x||^2 - ||y - H x_i||^2) / sigma^2) ]
///
/// evaluated with log-sum-exp stabilization and clamped to [0, R].
pub fn mi_estimate(
    cands: &CandidateSet,
    m_r_c: usize,
    snr_db: f64,
    n_samples: usize,
    seed: u64,
) -> f64 {
    use rand::SeedableRng;
    let sigma2 = comm_noise_variance(cands.n_active, snr_db);
    let rate = cands.rate_bits as f64;
    let ln2 = std::f64::consts::LN_2;
    let total: f64 = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(mix(seed.wrapping_add(1)) ^ mix(i as u64));
            let tx = (rng.gen::<u64>() % cands.len() as u64) as usize;
            let h = channel_rayleigh(m_r_c, cands.m, &mut rng);
            let y = channel_apply(&h, cands.vector(tx), sigma2, &mut rng);
            let d = candidate_distances(&y, &h, cands);
            let e: Vec<f64> = d.iter().map(|&di| (d[tx] - di) / sigma2).collect();
            let emax = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = emax + e.iter().map(|&x| (x - emax).exp()).sum::<f64>().ln();
            rate - lse / ln2
        })
        .sum();
    (total / n_samples as f64).clamp(0.0, rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alloc::pack_bits;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    fn map(c: &SystemConfig) -> CombinationMap {
        CombinationMap::lexicographic(c.m, c.m_t_c)
    }

    #[test]
    fn gsm_candidate_count_and_sparsity() {
        let c = cfg();
        let cands = CandidateSet::gsm(&c, &map(&c)).unwrap();
        assert_eq!(cands.rate_bits, 6);
        assert_eq!(cands.len(), 64);
        for i in 0..cands.len() {
            let active = cands.vector(i).iter().filter(|x| x.norm() > 0.0).count();
            assert_eq!(active, 2);
            for x in cands.vector(i) {
                let r = x.norm();
                assert!(r == 0.0 || (r - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gsm_labels_match_waveform_bit_layout() {
        let c = cfg();
        let m = map(&c);
        let cands = CandidateSet::gsm(&c, &m).unwrap();
        // word 0b10_11_01: spatial 10 -> comm set index 2, QPSK words 11, 01
        let bits = [1u8, 0, 1, 1, 0, 1];
        let i = pack_bits(&bits);
        assert_eq!(cands.label(i), &bits);
        let sym = gsm_encode(&bits, &c, &m).unwrap().remove(0);
        for (&e, &s) in sym.comm_elements.iter().zip(&sym.symbols) {
            assert!((cands.vector(i)[e] - s).norm() < 1e-12);
        }
    }

    #[test]
    fn smx_rate_matches_gsm_with_higher_order_psk() {
        let c = cfg();
        let cands = CandidateSet::smx(&c).unwrap();
        // 6 bits over 2 streams -> 8-PSK on elements 0 and 1
        assert_eq!(cands.rate_bits, 6);
        assert_eq!(cands.n_active, 2);
        let distinct: std::collections::HashSet<i64> = (0..cands.len())
            .map(|i| (cands.vector(i)[0].arg() * 1e9).round() as i64)
            .collect();
        assert_eq!(distinct.len(), 8);
        for i in 0..cands.len() {
            assert!(cands.vector(i)[2].norm() == 0.0);
            assert!(cands.vector(i)[3].norm() == 0.0);
        }
    }

    #[test]
    fn candidate_labels_are_all_words_in_order() {
        let c = cfg();
        for cands in [CandidateSet::gsm(&c, &map(&c)).unwrap(), CandidateSet::smx(&c).unwrap()] {
            for i in 0..cands.len() {
                assert_eq!(pack_bits(cands.label(i)), i);
            }
        }
    }

    #[test]
    fn channel_stats_unit_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut acc = 0.0;
        let n = 4000;
        for _ in 0..n {
            let h = channel_rayleigh(4, 4, &mut rng);
            acc += h.iter().map(|x| x.norm_sqr()).sum::<f64>() / 16.0;
        }
        let emp = acc / n as f64;
        assert!((emp - 1.0).abs() < 0.02, "{emp}");
    }

    #[test]
    fn noiseless_detection_is_exact() {
        let c = cfg();
        let cands = CandidateSet::gsm(&c, &map(&c)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let tx = (rng.gen::<u64>() % cands.len() as u64) as usize;
            let h = channel_rayleigh(c.m_r_c, c.m, &mut rng);
            let y = channel_apply(&h, cands.vector(tx), 0.0, &mut rng);
            assert_eq!(ml_detect(&y, &h, &cands), tx);
        }
    }

    #[test]
    fn ml_tie_break_picks_lowest_index() {
        let c = cfg();
        let cands = CandidateSet::smx(&c).unwrap();
        // zero channel: every candidate has identical distance
        let h = vec![Complex64::new(0.0, 0.0); c.m_r_c * c.m];
        let y = vec![Complex64::new(0.3, -0.2); c.m_r_c];
        assert_eq!(ml_detect(&y, &h, &cands), 0);
    }

    #[test]
    fn ber_decreases_with_snr_and_is_deterministic() {
        let c = cfg();
        let cands = CandidateSet::gsm(&c, &map(&c)).unwrap();
        let b0 = ber_experiment(&cands, c.m_r_c, 0.0, 3000, 42);
        let b1 = ber_experiment(&cands, c.m_r_c, 12.0, 3000, 42);
        assert!(b0 > b1, "{b0} vs {b1}");
        assert!(b1 < 0.02);
        assert_eq!(b0, ber_experiment(&cands, c.m_r_c, 0.0, 3000, 42));
        assert_ne!(b0, ber_experiment(&cands, c.m_r_c, 0.0, 3000, 43));
    }

    #[test]
    fn rayleigh_bpsk_mutual_information_reference() {
        // scalar Rayleigh channel, BPSK: ergodic MI at 0 dB is 0.5657 bits.
        // m = 1 makes the spatial bit count zero, leaving pure BPSK.
        let c = SystemConfig {
            m: 1,
            m_t_r: 0,
            m_t_c: 1,
            j: 2,
            m_r_c: 1,
            ..cfg()
        };
        let cands = CandidateSet::smx(&c).unwrap();
        assert_eq!(cands.rate_bits, 1);
        let mi = mi_estimate(&cands, 1, 0.0, 120_000, 7);
        assert!((mi - 0.5657).abs() < 0.02, "mi = {mi}");
    }

    #[test]
    fn mi_is_clamped_and_saturates_at_rate() {
        let c = cfg();
        let cands = CandidateSet::gsm(&c, &map(&c)).unwrap();
        let hi = mi_estimate(&cands, c.m_r_c, 40.0, 2000, 5);
        assert!(hi <= 6.0 + 1e-12);
        assert!(hi > 5.9, "{hi}");
        let lo = mi_estimate(&cands, c.m_r_c, -30.0, 2000, 5);
        assert!((0.0..=0.5).contains(&lo), "{lo}");
    }

    #[test]
    fn radar_only_config_rejected_for_comm() {
        let c = cfg().radar_only();
        assert!(CandidateSet::smx(&c).is_err());
        assert!(CandidateSet::gsm(&c, &CombinationMap::lexicographic(4, 2)).is_err());
    }
}
