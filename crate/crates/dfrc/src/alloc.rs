//! Antenna allocation: per-slot partition of the array into radar and
//! communication element sets, for all four schemes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{binomial, SystemConfig};
use crate::error::{Error, Result};

/// Antenna allocation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// All elements transmit radar (radar-only reference).
    Full,
    /// Radar on the fixed low-index contiguous sub-ULA.
    FixedAdjacent,
    /// One uniformly random radar subset, held constant over the pulse.
    FixedRandom,
    /// Per-slot random radar subset (data-driven antenna hopping).
    Hopping,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::Full,
        Scheme::Hopping,
        Scheme::FixedRandom,
        Scheme::FixedAdjacent,
    ];

    /// Stable lowercase name used in CLI flags and CSV rows.
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Full => "full",
            Scheme::FixedAdjacent => "fixed-adjacent",
            Scheme::FixedRandom => "fixed-random",
            Scheme::Hopping => "hopping",
        }
    }

    pub fn from_name(s: &str) -> Option<Scheme> {
        match s {
            "full" => Some(Scheme::Full),
            "fixed-adjacent" => Some(Scheme::FixedAdjacent),
            "fixed-random" => Some(Scheme::FixedRandom),
            "hopping" => Some(Scheme::Hopping),
            _ => None,
        }
    }
}

/// Per-slot partition of `{0..m-1}` into radar and communication sets.
///
/// Stores the radar element indices for each of the `k` slots, strictly
/// increasing within a slot; the communication set is the complement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllocationPattern {
    m: usize,
    slots: Vec<Vec<usize>>,
}

impl AllocationPattern {
    /// Builds a pattern from explicit per-slot radar sets, checking the
    /// partition invariants.
    pub fn from_radar_sets(m: usize, slots: Vec<Vec<usize>>) -> Result<Self> {
        for (k, s) in slots.iter().enumerate() {
            if s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&e| e >= m) {
                return Err(Error::InvalidConfig(format!(
                    "slot {k}: radar indices must be strictly increasing and < m"
                )));
            }
        }
        Ok(AllocationPattern { m, slots })
    }

    /// All elements on radar, every slot.
    pub fn full(cfg: &SystemConfig) -> Self {
        let all: Vec<usize> = (0..cfg.m).collect();
        AllocationPattern {
            m: cfg.m,
            slots: vec![all; cfg.k],
        }
    }

    /// Radar on the low-index contiguous sub-ULA `{0..m_t_r-1}`, every slot.
    pub fn fixed_adjacent(cfg: &SystemConfig) -> Self {
        let set: Vec<usize> = (0..cfg.m_t_r).collect();
        AllocationPattern {
            m: cfg.m,
            slots: vec![set; cfg.k],
        }
    }

    /// One radar subset drawn uniformly over all C(m, m_t_r) combinations,
    /// repeated for every slot of the pulse.
    pub fn fixed_random<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Self {
        let combos = combinations(cfg.m, cfg.m_t_r);
        let set = combos[rng.gen_range(0..combos.len())].clone();
        AllocationPattern {
            m: cfg.m,
            slots: vec![set; cfg.k],
        }
    }

    /// Per-slot radar subsets drawn i.i.d. uniformly over ALL C(m, m_t_r)
    /// combinations.
    ///
    /// This is the statistical model behind the beam-pattern mean/variance
    /// closed forms and is used by the radar Monte Carlo experiments. The
    /// deployed system's bit-driven map ([`Self::hopping_from_bits`]) uses
    /// only the first power-of-two prefix of comm combinations, whose radar
    /// complements are element-biased; the analysis model is the uniform one.
    pub fn hopping_random<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Self {
        let combos = combinations(cfg.m, cfg.m_t_r);
        let slots = (0..cfg.k)
            .map(|_| combos[rng.gen_range(0..combos.len())].clone())
            .collect();
        AllocationPattern { m: cfg.m, slots }
    }

    /// Per-slot allocation driven by spatial selection bits: each slot
    /// consumes `map.spatial_bits()` bits choosing the COMM subset via the
    /// combination map; the radar set is the complement.
    pub fn hopping_from_bits(
        cfg: &SystemConfig,
        map: &CombinationMap,
        bits: &[u8],
    ) -> Result<Self> {
        let b = map.spatial_bits();
        let needed = b * cfg.k;
        if bits.len() < needed {
            return Err(Error::InsufficientBits {
                needed,
                got: bits.len(),
            });
        }
        let mut slots = Vec::with_capacity(cfg.k);
        for k in 0..cfg.k {
            let word = pack_bits(&bits[k * b..(k + 1) * b]);
            let comm = map.combination(word);
            let radar: Vec<usize> = (0..cfg.m).filter(|e| !comm.contains(e)).collect();
            slots.push(radar);
        }
        Ok(AllocationPattern { m: cfg.m, slots })
    }

    /// Builds the allocation for a scheme, drawing randomness from `rng`
    /// where the scheme calls for it.
    pub fn for_scheme<R: Rng + ?Sized>(
        scheme: Scheme,
        cfg: &SystemConfig,
        rng: &mut R,
    ) -> Self {
        match scheme {
            Scheme::Full => AllocationPattern::full(cfg),
            Scheme::FixedAdjacent => AllocationPattern::fixed_adjacent(cfg),
            Scheme::FixedRandom => AllocationPattern::fixed_random(cfg, rng),
            Scheme::Hopping => AllocationPattern::hopping_random(cfg, rng),
        }
    }

    pub fn num_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn num_elements(&self) -> usize {
        self.m
    }

    /// Radar element indices of slot `k` (strictly increasing).
    pub fn radar_set(&self, k: usize) -> &[usize] {
        &self.slots[k]
    }

    /// Communication element indices of slot `k` (strictly increasing).
    pub fn comm_set(&self, k: usize) -> Vec<usize> {
        (0..self.m)
            .filter(|e| !self.slots[k].contains(e))
            .collect()
    }

    /// True if every slot carries the same radar set.
    pub fn is_slot_constant(&self) -> bool {
        self.slots.windows(2).all(|w| w[0] == w[1])
    }
}

/// All `r`-element subsets of `{0..m-1}` in lexicographic order of their
/// index tuples.
pub fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(m, r) as usize);
    let mut cur: Vec<usize> = (0..r).collect();
    if r > m {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance to the next lexicographic combination
        let mut i = r;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + m - r {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..r {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Bijection between spatial-bit words and a power-of-two prefix of the
/// lexicographically ordered combinations.
///
/// The default table enumerates combinations lexicographically and keeps the
/// first `2^floor(log2 C(m,r))`; a custom table can be supplied to reproduce
/// other published mappings.
#[derive(Debug, Clone)]
pub struct CombinationMap {
    combos: Vec<Vec<usize>>,
    bits: usize,
}

impl CombinationMap {
    /// Standard lexicographic map for choosing `r` comm elements out of `m`.
    pub fn lexicographic(m: usize, r: usize) -> Self {
        let all = combinations(m, r);
        let bits = (all.len() as f64).log2().floor() as usize;
        let used = 1usize << bits;
        CombinationMap {
            combos: all.into_iter().take(used).collect(),
            bits,
        }
    }

    /// Custom table; length must be a power of two and entries distinct.
    pub fn from_table(m: usize, combos: Vec<Vec<usize>>) -> Result<Self> {
        if !combos.len().is_power_of_two() {
            return Err(Error::InvalidConfig(
                "combination table length must be a power of two".into(),
            ));
        }
        for c in &combos {
            if c.windows(2).any(|w| w[0] >= w[1]) || c.iter().any(|&e| e >= m) {
                return Err(Error::InvalidConfig(
                    "combination table entries must be strictly increasing and < m".into(),
                ));
            }
        }
        let bits = combos.len().trailing_zeros() as usize;
        Ok(CombinationMap { combos, bits })
    }

    /// Spatial bits consumed per symbol.
    pub fn spatial_bits(&self) -> usize {
        self.bits
    }

    /// Number of combinations in use (= 2^spatial_bits).
    pub fn len(&self) -> usize {
        self.combos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.combos.is_empty()
    }

    /// Word -> combination (word must be < len).
    pub fn combination(&self, word: usize) -> &[usize] {
        &self.combos[word]
    }

    /// Combination -> word, if the combination is in the used prefix.
    pub fn index_of(&self, combo: &[usize]) -> Option<usize> {
        self.combos.iter().position(|c| c.as_slice() == combo)
    }
}

/// Packs MSB-first bits into a word.
pub fn pack_bits(bits: &[u8]) -> usize {
    bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize)
}

/// Unpacks a word into `n` MSB-first bits.
pub fn unpack_bits(word: usize, n: usize) -> Vec<u8> {
    (0..n).rev().map(|i| ((word >> i) & 1) as u8).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    #[test]
    fn full_uses_every_element_every_slot() {
        let a = AllocationPattern::full(&cfg());
        for k in 0..12 {
            assert_eq!(a.radar_set(k), &[0, 1, 2, 3]);
            assert!(a.comm_set(k).is_empty());
        }
    }

    #[test]
    fn fixed_adjacent_is_low_index_sub_ula() {
        let a = AllocationPattern::fixed_adjacent(&cfg());
        for k in 0..12 {
            assert_eq!(a.radar_set(k), &[0, 1]);
            assert_eq!(a.comm_set(k), vec![2, 3]);
        }
    }

    #[test]
    fn fixed_random_is_slot_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = AllocationPattern::fixed_random(&cfg(), &mut rng);
        assert!(a.is_slot_constant());
        assert_eq!(a.radar_set(0).len(), 2);
    }

    #[test]
    fn hopping_from_bits_selects_comm_set_by_map() {
        // m=4, one comm element: words 00,01,10,11 -> elements 0,1,2,3
        let c = SystemConfig {
            m_t_r: 3,
            m_t_c: 1,
            ..cfg()
        };
        let map = CombinationMap::lexicographic(4, 1);
        assert_eq!(map.spatial_bits(), 2);
        // word "10" -> comm element {2}, radar = {0,1,3}
        let bits: Vec<u8> = [1u8, 0].repeat(12);
        let a = AllocationPattern::hopping_from_bits(&c, &map, &bits).unwrap();
        for k in 0..12 {
            assert_eq!(a.comm_set(k), vec![2]);
            assert_eq!(a.radar_set(k), &[0, 1, 3]);
        }
    }

    #[test]
    fn hopping_from_bits_rejects_short_stream() {
        let map = CombinationMap::lexicographic(4, 2);
        let err = AllocationPattern::hopping_from_bits(&cfg(), &map, &[1, 0, 1]).unwrap_err();
        assert!(matches!(err, Error::InsufficientBits { .. }));
    }

    #[test]
    fn lexicographic_combinations_of_4_choose_2() {
        assert_eq!(
            combinations(4, 2),
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
    }

    #[test]
    fn map_uses_power_of_two_prefix_and_roundtrips() {
        let map = CombinationMap::lexicographic(4, 2);
        assert_eq!(map.len(), 4); // 4 of 6 combinations, 2 spatial bits
        assert_eq!(map.spatial_bits(), 2);
        for w in 0..map.len() {
            let c = map.combination(w).to_vec();
            assert_eq!(map.index_of(&c), Some(w));
        }
    }

    #[test]
    fn map_single_element_matches_element_index() {
        let map = CombinationMap::lexicographic(4, 1);
        for w in 0..4 {
            assert_eq!(map.combination(w), &[w]);
        }
    }

    #[test]
    fn complementarity_for_all_schemes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for scheme in Scheme::ALL {
            let c = if scheme == Scheme::Full {
                cfg().radar_only()
            } else {
                cfg()
            };
            let a = AllocationPattern::for_scheme(scheme, &c, &mut rng);
            for k in 0..a.num_slots() {
                let mut all: Vec<usize> = a.radar_set(k).to_vec();
                all.extend(a.comm_set(k));
                all.sort_unstable();
                assert_eq!(all, (0..c.m).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn uniform_bits_give_uniform_combination_usage() {
        // chi-square over 10^4 slots, 4 used combinations, 3 dof;
        // threshold 16.27 is the 0.1% tail.
        let c = cfg();
        let map = CombinationMap::lexicographic(4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut counts = [0usize; 4];
        let n_slots = 10_000;
        let mut bits = vec![0u8; 2 * c.k];
        let mut done = 0;
        while done < n_slots {
            for b in bits.iter_mut() {
                *b = rng.gen_range(0..2u8);
            }
            let a = AllocationPattern::hopping_from_bits(&c, &map, &bits).unwrap();
            for k in 0..c.k {
                if done >= n_slots {
                    break;
                }
                let w = map.index_of(&a.comm_set(k)).unwrap();
                counts[w] += 1;
                done += 1;
            }
        }
        let expect = n_slots as f64 / 4.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expect).powi(2) / expect)
            .sum();
        assert!(chi2 < 16.27, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn hopping_produces_distinct_slot_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = AllocationPattern::hopping_random(&cfg(), &mut rng);
        assert!(!a.is_slot_constant());
    }

    #[test]
    fn pack_unpack_roundtrip() {
        for w in 0..16usize {
            assert_eq!(pack_bits(&unpack_bits(w, 4)), w);
        }
    }
}
