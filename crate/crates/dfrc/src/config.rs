//! System configuration: array geometry, timing, chirp, and link parameters.
//!
//! `SystemConfig` is the single validated source of truth for every module.
//! All other code assumes it has passed [`SystemConfig::validate`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complete parameter set for the dual-function array.
///
/// Field names follow the usual radar/MIMO conventions:
/// `m` transmit elements total, split per slot into `m_t_r` radar and
/// `m_t_c` communication elements; a pulse of width `t_r` holds `k` symbol
/// slots of duration `t_c` each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    /// Total transmit array elements (ULA), ≥ 2.
    pub m: usize,
    /// Radar transmit elements per slot.
    pub m_t_r: usize,
    /// Communication transmit elements per slot (0 only for the radar-only
    /// full-array reference mode).
    pub m_t_c: usize,
    /// Symbol slots per pulse.
    pub k: usize,
    /// Symbol (slot) duration, seconds.
    pub t_c: f64,
    /// Pulse width, seconds; equals `k * t_c` up to one sample period.
    pub t_r: f64,
    /// Pulse repetition interval, seconds.
    pub t_pri: f64,
    /// Radar chirp bandwidth, Hz.
    pub b_r: f64,
    /// Complex baseband sample rate, Hz (Nyquist: `f_s >= b_r`).
    pub f_s: f64,
    /// Carrier frequency, Hz. Bookkeeping only: it enters echo templates as
    /// a constant phase per delay and cancels in magnitude decisions.
    pub f_c: f64,
    /// Element spacing in wavelengths (≤ 1/2 to avoid grating lobes).
    pub d_over_lambda: f64,
    /// PSK constellation order for the communication subsystem.
    pub j: usize,
    /// Communication receive antennas.
    pub m_r_c: usize,
    /// Transmit steering direction, radians.
    pub theta_t: f64,
    /// Communication chip amplitude relative to radar chip amplitude.
    pub comm_chip_scale: f64,
}

impl Default for SystemConfig {
    /// Experiment defaults: 4-element ULA split 2/2, twelve 2.5 µs slots per
    /// 30 µs pulse, 50 MHz chirp sampled at 50 MHz, 200 µs PRI.
    fn default() -> Self {
        SystemConfig {
            m: 4,
            m_t_r: 2,
            m_t_c: 2,
            k: 12,
            t_c: 2.5e-6,
            t_r: 30e-6,
            t_pri: 200e-6,
            b_r: 50e6,
            f_s: 50e6,
            f_c: 5.1e9,
            d_over_lambda: 0.5,
            j: 4,
            m_r_c: 4,
            theta_t: 0.0,
            comm_chip_scale: 1.0,
        }
    }
}

impl SystemConfig {
    /// Checks every invariant, returning `self` on success.
    ///
    /// Errors name the violated constraint so CLI users can fix configs
    /// without reading source.
    pub fn validate(self) -> Result<Self> {
        let c = &self;
        if c.m < 2 {
            return Err(Error::InvalidConfig(format!("m = {} must be >= 2", c.m)));
        }
        if c.m_t_r < 1 {
            return Err(Error::InvalidConfig("m_t_r must be >= 1".into()));
        }
        if c.m_t_c == 0 && c.m_t_r != c.m {
            return Err(Error::InvalidConfig(
                "m_t_c = 0 is only valid in the radar-only mode m_t_r = m".into(),
            ));
        }
        if c.m_t_r + c.m_t_c != c.m {
            return Err(Error::InvalidConfig(format!(
                "m_t_r + m_t_c = {} + {} must equal m = {}",
                c.m_t_r, c.m_t_c, c.m
            )));
        }
        if c.k == 0 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        let ts = 1.0 / c.f_s;
        if (c.t_r - c.k as f64 * c.t_c).abs() > ts {
            return Err(Error::InvalidConfig(format!(
                "t_r = {} must equal k*t_c = {} within one sample period",
                c.t_r,
                c.k as f64 * c.t_c
            )));
        }
        if (c.k * c.k) as f64 >= c.b_r * c.t_r {
            return Err(Error::InvalidConfig(format!(
                "k^2 = {} must be < b_r*t_r = {}",
                c.k * c.k,
                c.b_r * c.t_r
            )));
        }
        if c.f_s < c.b_r {
            return Err(Error::InvalidConfig(format!(
                "f_s = {} must be >= b_r = {} (Nyquist)",
                c.f_s, c.b_r
            )));
        }
        if !(c.d_over_lambda > 0.0 && c.d_over_lambda <= 0.5) {
            return Err(Error::InvalidConfig(format!(
                "d_over_lambda = {} must be in (0, 1/2]",
                c.d_over_lambda
            )));
        }
        if c.t_pri < 2.0 * c.t_r {
            return Err(Error::InvalidConfig(format!(
                "t_pri = {} must be >= 2*t_r = {}",
                c.t_pri,
                2.0 * c.t_r
            )));
        }
        if !c.j.is_power_of_two() || c.j < 2 {
            return Err(Error::InvalidConfig(format!(
                "j = {} must be a power of two >= 2",
                c.j
            )));
        }
        if c.m_r_c < 1 {
            return Err(Error::InvalidConfig("m_r_c must be >= 1".into()));
        }
        if !c.comm_chip_scale.is_finite() || c.comm_chip_scale <= 0.0 {
            return Err(Error::InvalidConfig("comm_chip_scale must be > 0".into()));
        }
        Ok(self)
    }

    /// Chirp frequency-modulation rate µ = b_r / t_r (Hz/s).
    pub fn mu(&self) -> f64 {
        self.b_r / self.t_r
    }

    /// Samples per pulse.
    pub fn n_r(&self) -> usize {
        (self.t_r * self.f_s) as usize
    }

    /// Samples in the receive window `[t_r, t_pri)`.
    pub fn n_rec(&self) -> usize {
        ((self.t_pri - self.t_r) * self.f_s) as usize
    }

    /// Samples per symbol slot.
    pub fn n_c(&self) -> usize {
        (self.t_c * self.f_s) as usize
    }

    /// Sample period, seconds.
    pub fn t_s(&self) -> f64 {
        1.0 / self.f_s
    }

    /// Radar transmit duty factor t_r / t_pri (per-element average power of
    /// the unit-modulus pulse over one PRI).
    pub fn p_t(&self) -> f64 {
        self.t_r / self.t_pri
    }

    /// Radar noise variance that realizes a given radar SNR (dB), using
    /// SNR = (m_t_r)^2 * p_t / sigma^2.
    pub fn radar_noise_variance(&self, snr_db: f64) -> f64 {
        let snr = 10f64.powf(snr_db / 10.0);
        (self.m_t_r * self.m_t_r) as f64 * self.p_t() / snr
    }

    /// Bits per communication symbol: spatial bits + constellation bits.
    pub fn rate_bits(&self) -> usize {
        let spatial = if self.m_t_c == 0 {
            0
        } else {
            (binomial(self.m, self.m_t_c) as f64).log2().floor() as usize
        };
        spatial + self.m_t_c * (self.j as f64).log2() as usize
    }

    /// Returns the radar-only variant (all elements assigned to radar),
    /// used as the full-array reference scheme.
    pub fn radar_only(&self) -> SystemConfig {
        SystemConfig {
            m_t_r: self.m,
            m_t_c: 0,
            ..self.clone()
        }
    }

    /// Loads a TOML config file; missing keys take defaults.
    pub fn from_toml_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: SystemConfig =
            toml::from_str(&text).map_err(|e| Error::ConfigParse(e.to_string()))?;
        cfg.validate()
    }
}

/// Binomial coefficient C(n, r) as u64 (small arguments only).
pub fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u64 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_with_k_12() {
        let cfg = SystemConfig::default().validate().unwrap();
        assert_eq!(cfg.k, 12);
        assert_eq!(cfg.n_r(), 1500);
        assert_eq!(cfg.n_c(), 125);
        assert_eq!(cfg.n_rec(), 8500);
        assert!((cfg.mu() - 50e6 / 30e-6).abs() < 1e-3);
    }

    #[test]
    fn rejects_slot_count_violating_time_bandwidth_bound() {
        // k^2 = 1600 >= b_r*t_r = 1500
        let cfg = SystemConfig {
            k: 40,
            t_c: 30e-6 / 40.0,
            ..SystemConfig::default()
        };
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("k^2"));
    }

    #[test]
    fn radar_only_reference_mode_is_valid() {
        let cfg = SystemConfig::default().radar_only().validate().unwrap();
        assert_eq!(cfg.m_t_r, 4);
        assert_eq!(cfg.m_t_c, 0);
    }

    #[test]
    fn rejects_mismatched_split() {
        let cfg = SystemConfig {
            m_t_r: 3,
            ..SystemConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_sub_nyquist_sampling() {
        let cfg = SystemConfig {
            f_s: 40e6,
            ..SystemConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn derived_noise_variance_matches_snr_definition() {
        let cfg = SystemConfig::default();
        // SNR 0 dB: sigma^2 = m_t_r^2 * p_t = 4 * 0.15
        assert!((cfg.radar_noise_variance(0.0) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn rate_bits_for_default_gsm_qpsk() {
        let cfg = SystemConfig::default();
        // 2 spatial bits (floor log2 C(4,2) = 2) + 2*2 constellation bits
        assert_eq!(cfg.rate_bits(), 6);
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(4, 1), 4);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(4, 5), 0);
    }
}
