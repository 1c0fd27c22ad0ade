//! Chirp generation, GSM symbol synthesis, and the per-element joint
//! radar-communication waveform combiner.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::alloc::{pack_bits, unpack_bits, AllocationPattern, CombinationMap};
use crate::config::SystemConfig;
use crate::error::{Error, Result};

/// Linear-FM pulse parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpParams {
    /// Frequency-modulation rate, Hz/s.
    pub mu: f64,
    /// Pulse width, seconds.
    pub t_r: f64,
}

impl ChirpParams {
    pub fn from_config(cfg: &SystemConfig) -> Self {
        ChirpParams {
            mu: cfg.mu(),
            t_r: cfg.t_r,
        }
    }

    /// Bandwidth mu * t_r, Hz.
    pub fn b_r(&self) -> f64 {
        self.mu * self.t_r
    }
}

/// Rectangular window of unity support: 1 on [0, 1), else 0.
#[inline]
pub fn rect_window(x: f64) -> f64 {
    if (0.0..1.0).contains(&x) {
        1.0
    } else {
        0.0
    }
}

/// Complex baseband chirp sample g(t/T_r) * exp(j*mu*pi*(t - T_r/2)^2).
///
/// The quadratic phase is centered so the sample at t = T_r/2 is exactly 1.
#[inline]
pub fn chirp_sample(p: ChirpParams, t: f64) -> Complex64 {
    if !(0.0..p.t_r).contains(&t) {
        return Complex64::new(0.0, 0.0);
    }
    let ph = p.mu * std::f64::consts::PI * (t - p.t_r / 2.0) * (t - p.t_r / 2.0);
    Complex64::from_polar(1.0, ph)
}

/// Gray-labelled J-PSK point for an MSB-first bit word.
///
/// The constellation point at angle index i carries the label gray(i) =
/// i ^ (i >> 1), so adjacent points differ in exactly one bit.
pub fn psk_modulate(word: &[u8], j: usize) -> Result<Complex64> {
    let n = (j as f64).log2() as usize;
    if !j.is_power_of_two() || word.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "psk word length {} does not match log2({j})",
            word.len()
        )));
    }
    let label = pack_bits(word);
    // invert the Gray code to recover the angle index
    let mut idx = label;
    let mut shift = 1;
    while shift < n {
        idx ^= idx >> shift;
        shift <<= 1;
    }
    let phase = 2.0 * std::f64::consts::PI * idx as f64 / j as f64;
    Ok(Complex64::from_polar(1.0, phase))
}

/// Recovers the MSB-first bit word of a (noise-free) J-PSK point.
pub fn psk_demodulate(point: Complex64, j: usize) -> Vec<u8> {
    let n = (j as f64).log2() as usize;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut angle = point.arg();
    if angle < 0.0 {
        angle += two_pi;
    }
    let idx = ((angle / two_pi * j as f64).round() as usize) % j;
    unpack_bits(idx ^ (idx >> 1), n)
}

/// One GSM symbol: the active communication elements and their PSK points.
#[derive(Debug, Clone, PartialEq)]
pub struct GsmSymbol {
    /// Active comm element indices, strictly increasing.
    pub comm_elements: Vec<usize>,
    /// Unit-modulus constellation points, aligned with `comm_elements`.
    pub symbols: Vec<Complex64>,
}

/// Splits a bit stream into GSM symbols: per symbol, the first
/// `map.spatial_bits()` bits select the comm element set, the remaining
/// `m_t_c * log2(j)` bits are PSK words assigned to elements in increasing
/// index order.
pub fn gsm_encode(
    bits: &[u8],
    cfg: &SystemConfig,
    map: &CombinationMap,
) -> Result<Vec<GsmSymbol>> {
    let psk_bits = (cfg.j as f64).log2() as usize;
    let rate = map.spatial_bits() + cfg.m_t_c * psk_bits;
    if rate == 0 || !bits.len().is_multiple_of(rate) {
        return Err(Error::BadStreamLength {
            len: bits.len(),
            rate,
        });
    }
    let mut out = Vec::with_capacity(bits.len() / rate);
    for chunk in bits.chunks(rate) {
        let (spatial, rest) = chunk.split_at(map.spatial_bits());
        let comm_elements = map.combination(pack_bits(spatial)).to_vec();
        let symbols = rest
            .chunks(psk_bits)
            .map(|w| psk_modulate(w, cfg.j))
            .collect::<Result<Vec<_>>>()?;
        out.push(GsmSymbol {
            comm_elements,
            symbols,
        });
    }
    Ok(out)
}

/// Inverse of [`gsm_encode`] for noise-free symbols (used in roundtrip
/// checks and to translate detected candidates back into bits).
pub fn gsm_decode(
    symbols: &[GsmSymbol],
    cfg: &SystemConfig,
    map: &CombinationMap,
) -> Result<Vec<u8>> {
    let mut bits = Vec::new();
    for sym in symbols {
        let word = map.index_of(&sym.comm_elements).ok_or_else(|| {
            Error::DimensionMismatch("comm element set not in combination map".into())
        })?;
        bits.extend(unpack_bits(word, map.spatial_bits()));
        for &p in &sym.symbols {
            bits.extend(psk_demodulate(p, cfg.j));
        }
    }
    Ok(bits)
}

/// Allocation implied by a pulse worth of GSM symbols: slot k's comm set is
/// the symbol's element set, the radar set its complement.
pub fn allocation_for_symbols(
    symbols: &[GsmSymbol],
    cfg: &SystemConfig,
) -> Result<AllocationPattern> {
    if symbols.len() != cfg.k {
        return Err(Error::DimensionMismatch(format!(
            "got {} GSM symbols for {} slots",
            symbols.len(),
            cfg.k
        )));
    }
    let slots = symbols
        .iter()
        .map(|s| {
            (0..cfg.m)
                .filter(|e| !s.comm_elements.contains(e))
                .collect()
        })
        .collect();
    AllocationPattern::from_radar_sets(cfg.m, slots)
}

/// Steering weights a_m = exp(-j*2*pi*m*(d/lambda)*sin(theta_T)).
pub fn beamform_weights(cfg: &SystemConfig) -> Vec<Complex64> {
    let phase = -2.0 * std::f64::consts::PI * cfg.d_over_lambda * cfg.theta_t.sin();
    (0..cfg.m)
        .map(|m| Complex64::from_polar(1.0, phase * m as f64))
        .collect()
}

/// Logical band of a (element, slot) cell in the combined waveform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    Radar,
    Comm,
}

/// Per-element complex baseband sample matrix for one pulse, with the
/// radar/comm band tag of every (element, slot) cell.
///
/// Radar and communication signals occupy disjoint frequency bands in the
/// modeled system, so they are kept in separate logical channels: the tag
/// says which band a cell belongs to, and cross-interference is
/// structurally zero.
#[derive(Debug, Clone)]
pub struct JrcWaveform {
    /// Element-major samples, `m * n_r` entries.
    pub samples: Vec<Complex64>,
    /// Band tag per element per slot, `m * k` entries.
    pub band_tags: Vec<Band>,
    pub m: usize,
    pub n_r: usize,
    pub k: usize,
}

impl JrcWaveform {
    pub fn sample(&self, m: usize, n: usize) -> Complex64 {
        self.samples[m * self.n_r + n]
    }

    pub fn band_tag(&self, m: usize, k: usize) -> Band {
        self.band_tags[m * self.k + k]
    }

    /// Row of element `m`.
    pub fn row(&self, m: usize) -> &[Complex64] {
        &self.samples[m * self.n_r..(m + 1) * self.n_r]
    }
}

/// Combines radar chirp chips and GSM comm chips into the per-element
/// waveform for one pulse.
///
/// Radar elements of slot k carry the steered, time-gated segment of one
/// continuous chirp (phase-continuous across slots); comm elements carry
/// their constellation point, constant over the slot.
pub fn build_jrc_waveform(
    alloc: &AllocationPattern,
    gsm: &[GsmSymbol],
    cfg: &SystemConfig,
) -> Result<JrcWaveform> {
    let (m, k, n_r, n_c) = (cfg.m, cfg.k, cfg.n_r(), cfg.n_c());
    if alloc.num_slots() != k {
        return Err(Error::DimensionMismatch(format!(
            "allocation has {} slots, config expects {k}",
            alloc.num_slots()
        )));
    }
    if cfg.m_t_c > 0 && gsm.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "got {} GSM symbols for {k} slots",
            gsm.len()
        )));
    }
    let chirp = ChirpParams::from_config(cfg);
    let weights = beamform_weights(cfg);
    let ts = cfg.t_s();
    let mut samples = vec![Complex64::new(0.0, 0.0); m * n_r];
    let mut band_tags = vec![Band::Comm; m * k];
    for slot in 0..k {
        let radar = alloc.radar_set(slot);
        let comm = alloc.comm_set(slot);
        if cfg.m_t_c > 0 {
            let sym = &gsm[slot];
            if sym.comm_elements != comm {
                return Err(Error::DimensionMismatch(format!(
                    "slot {slot}: allocation comm set {:?} does not match symbol elements {:?}",
                    comm, sym.comm_elements
                )));
            }
        }
        for &el in radar {
            band_tags[el * k + slot] = Band::Radar;
            for n in slot * n_c..((slot + 1) * n_c).min(n_r) {
                samples[el * n_r + n] = weights[el] * chirp_sample(chirp, n as f64 * ts);
            }
        }
        if cfg.m_t_c > 0 {
            let sym = &gsm[slot];
            for (i, &el) in comm.iter().enumerate() {
                for n in slot * n_c..((slot + 1) * n_c).min(n_r) {
                    samples[el * n_r + n] = cfg.comm_chip_scale * sym.symbols[i];
                }
            }
        }
    }
    Ok(JrcWaveform {
        samples,
        band_tags,
        m,
        n_r,
        k,
    })
}

/// Writes the waveform as interleaved little-endian f32 (re, im) pairs,
/// row-major over (element, sample), plus a sidecar text header
/// `<path>.hdr` with `m`, `n_r`, and `f_s`.
pub fn write_waveform_dump(
    path: &std::path::Path,
    wf: &JrcWaveform,
    cfg: &SystemConfig,
) -> Result<()> {
    let mut bin = std::io::BufWriter::new(std::fs::File::create(path)?);
    for s in &wf.samples {
        bin.write_all(&(s.re as f32).to_le_bytes())?;
        bin.write_all(&(s.im as f32).to_le_bytes())?;
    }
    bin.flush()?;
    let hdr = format!("m = {}\nn_r = {}\nf_s = {}\n", wf.m, wf.n_r, cfg.f_s);
    std::fs::write(path.with_extension("hdr"), hdr)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    #[test]
    fn chirp_is_unity_at_center_and_zero_outside() {
        let p = ChirpParams::from_config(&cfg());
        let c = chirp_sample(p, p.t_r / 2.0);
        assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(chirp_sample(p, -1.0 / 50e6), Complex64::new(0.0, 0.0));
        assert_eq!(chirp_sample(p, p.t_r), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn chirp_discrete_autocorrelation_follows_sinc() {
        // frozen oracle: independent numpy summation gives |sum| = 1500.0,
        // 1.0, 2.0 at tau_d = 0, 1/B, 2/B and 954.93 at 0.5/B
        let c = cfg();
        let p = ChirpParams::from_config(&c);
        let ts = c.t_s();
        let n_r = c.n_r();
        let acorr = |tau_d: f64| -> f64 {
            (0..n_r)
                .map(|n| chirp_sample(p, n as f64 * ts) * chirp_sample(p, n as f64 * ts - tau_d).conj())
                .sum::<Complex64>()
                .norm()
        };
        assert!((acorr(0.0) - n_r as f64).abs() < 1e-9);
        // nulls of sinc: small absolute residual vs the peak
        assert!(acorr(1.0 / c.b_r) < 0.005 * n_r as f64);
        assert!(acorr(2.0 / c.b_r) < 0.005 * n_r as f64);
        let half = acorr(0.5 / c.b_r);
        let sinc_half = n_r as f64 * (std::f64::consts::PI * 0.5).sin() / (std::f64::consts::PI * 0.5);
        assert!((half - sinc_half).abs() / sinc_half < 0.05, "{half} vs {sinc_half}");
        assert!((half - 954.929).abs() < 0.01);
    }

    #[test]
    fn bpsk_maps_zero_to_plus_one() {
        assert!((psk_modulate(&[0], 2).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((psk_modulate(&[1], 2).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn qpsk_points_are_distinct_and_unit_modulus() {
        let pts: Vec<Complex64> = (0..4)
            .map(|w| psk_modulate(&unpack_bits(w, 2), 4).unwrap())
            .collect();
        for (i, a) in pts.iter().enumerate() {
            assert!((a.norm() - 1.0).abs() < 1e-12);
            for b in &pts[i + 1..] {
                assert!((a - b).norm() > 0.1);
            }
        }
    }

    #[test]
    fn gray_labels_of_adjacent_points_differ_in_one_bit() {
        for j in [2usize, 4, 8, 16] {
            let n = (j as f64).log2() as usize;
            // label of the point at angle index i
            let label_at = |i: usize| -> usize {
                for w in 0..j {
                    let p = psk_modulate(&unpack_bits(w, n), j).unwrap();
                    let idx = ((p.arg().rem_euclid(2.0 * std::f64::consts::PI))
                        / (2.0 * std::f64::consts::PI)
                        * j as f64)
                        .round() as usize
                        % j;
                    if idx == i {
                        return w;
                    }
                }
                unreachable!()
            };
            for i in 0..j {
                let a = label_at(i);
                let b = label_at((i + 1) % j);
                assert_eq!((a ^ b).count_ones(), 1, "j={j} i={i}");
            }
        }
    }

    #[test]
    fn psk_roundtrip_all_orders() {
        for j in [2usize, 4, 8, 16] {
            let n = (j as f64).log2() as usize;
            for w in 0..j {
                let bits = unpack_bits(w, n);
                let p = psk_modulate(&bits, j).unwrap();
                assert_eq!(psk_demodulate(p, j), bits);
            }
        }
    }

    #[test]
    fn gsm_encode_splits_spatial_and_constellation_bits() {
        // single comm element, BPSK: bits "101" -> spatial "10", symbol "1"
        let c = SystemConfig {
            m_t_r: 3,
            m_t_c: 1,
            j: 2,
            ..cfg()
        };
        let map = CombinationMap::lexicographic(4, 1);
        let syms = gsm_encode(&[1, 0, 1], &c, &map).unwrap();
        assert_eq!(syms.len(), 1);
        assert_eq!(syms[0].comm_elements, vec![2]);
        assert!((syms[0].symbols[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gsm_rate_is_six_bits_for_qpsk_pair() {
        let c = cfg();
        let map = CombinationMap::lexicographic(c.m, c.m_t_c);
        assert_eq!(map.spatial_bits() + c.m_t_c * 2, 6);
        assert!(gsm_encode(&[0; 5], &c, &map).is_err());
        assert_eq!(gsm_encode(&[0; 6], &c, &map).unwrap().len(), 1);
    }

    #[test]
    fn gsm_roundtrip_random_streams() {
        let c = cfg();
        let map = CombinationMap::lexicographic(c.m, c.m_t_c);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let bits: Vec<u8> = (0..6).map(|_| rng.gen_range(0..2u8)).collect();
            let syms = gsm_encode(&bits, &c, &map).unwrap();
            assert_eq!(gsm_decode(&syms, &c, &map).unwrap(), bits);
        }
    }

    #[test]
    fn steering_weights_unit_modulus_and_boresight_identity() {
        let mut c = cfg();
        for w in beamform_weights(&c) {
            assert!((w - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        c.theta_t = std::f64::consts::PI / 6.0;
        let w = beamform_weights(&c);
        // m=1: exp(-j*pi*sin(pi/6)) = exp(-j*pi/2)
        assert!((w[1] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        for x in w {
            assert!((x.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn full_scheme_waveform_is_pure_steered_chirp() {
        let c = cfg().radar_only();
        let alloc = AllocationPattern::full(&c);
        let wf = build_jrc_waveform(&alloc, &[], &c).unwrap();
        let p = ChirpParams::from_config(&c);
        for m in 0..c.m {
            for n in 0..c.n_r() {
                let want = chirp_sample(p, n as f64 * c.t_s());
                assert!((wf.sample(m, n) - want).norm() < 1e-12);
            }
            for k in 0..c.k {
                assert_eq!(wf.band_tag(m, k), Band::Radar);
            }
        }
    }

    #[test]
    fn band_tags_match_allocation_and_chip_counts() {
        let c = cfg();
        let map = CombinationMap::lexicographic(c.m, c.m_t_c);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let bits: Vec<u8> = (0..6 * c.k).map(|_| rng.gen_range(0..2u8)).collect();
        let gsm = gsm_encode(&bits, &c, &map).unwrap();
        let alloc = allocation_for_symbols(&gsm, &c).unwrap();
        let wf = build_jrc_waveform(&alloc, &gsm, &c).unwrap();
        let mut radar_cells = 0;
        for m in 0..c.m {
            for k in 0..c.k {
                let tag = wf.band_tag(m, k);
                let in_radar = alloc.radar_set(k).contains(&m);
                assert_eq!(tag == Band::Radar, in_radar);
                radar_cells += (tag == Band::Radar) as usize;
            }
        }
        assert_eq!(radar_cells, c.k * c.m_t_r); // 24 radar chips total
    }

    #[test]
    fn radar_energy_accounting_over_random_allocations() {
        let c = cfg();
        let map = CombinationMap::lexicographic(c.m, c.m_t_c);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let bits: Vec<u8> = (0..6 * c.k).map(|_| rng.gen_range(0..2u8)).collect();
            let gsm = gsm_encode(&bits, &c, &map).unwrap();
            let alloc = allocation_for_symbols(&gsm, &c).unwrap();
            let wf = build_jrc_waveform(&alloc, &gsm, &c).unwrap();
            let mut radar_energy = 0.0;
            for m in 0..c.m {
                for k in 0..c.k {
                    if wf.band_tag(m, k) == Band::Radar {
                        for n in k * c.n_c()..(k + 1) * c.n_c() {
                            radar_energy += wf.sample(m, n).norm_sqr();
                        }
                    }
                }
            }
            let want = (c.m_t_r * c.n_r()) as f64; // unit per-sample power
            assert!((radar_energy - want).abs() < 1e-6 * want);
        }
    }

    #[test]
    fn waveform_dump_roundtrips_via_f32() {
        let c = cfg().radar_only();
        let alloc = AllocationPattern::full(&c);
        let wf = build_jrc_waveform(&alloc, &[], &c).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pulse.bin");
        write_waveform_dump(&path, &wf, &c).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.len(), wf.samples.len() * 8);
        let first_re = f32::from_le_bytes(bytes[0..4].try_into().unwrap());
        assert!((first_re as f64 - wf.samples[0].re).abs() < 1e-6);
        let hdr = std::fs::read_to_string(path.with_extension("hdr")).unwrap();
        assert!(hdr.contains("m = 4") && hdr.contains("n_r = 1500"));
    }
}
