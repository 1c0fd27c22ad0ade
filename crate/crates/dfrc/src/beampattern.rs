//! Delay-direction transmit beam patterns: instantaneous surfaces computed
//! from first principles, closed-form expressions, and Monte Carlo
//! statistics for the random allocation schemes.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::alloc::AllocationPattern;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::waveform::{chirp_sample, ChirpParams};

/// Evaluation grid: delay offsets (seconds) x spatial-frequency offsets
/// (radians in [-pi, pi)).
#[derive(Debug, Clone, PartialEq)]
pub struct BeamGrid {
    pub tau_d: Vec<f64>,
    pub f_theta: Vec<f64>,
}

impl BeamGrid {
    pub fn new(tau_d: Vec<f64>, f_theta: Vec<f64>) -> Result<Self> {
        if tau_d.windows(2).any(|w| w[0] >= w[1]) || f_theta.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("axes must be strictly increasing".into()));
        }
        if tau_d.is_empty() || f_theta.is_empty() {
            return Err(Error::InvalidGrid("axes must be nonempty".into()));
        }
        Ok(BeamGrid { tau_d, f_theta })
    }

    /// Uniform grid over [-tau_span, tau_span] x [-pi, pi], inclusive ends.
    pub fn symmetric(tau_span: f64, n_tau: usize, n_f: usize) -> Result<Self> {
        let tau_d = linspace(-tau_span, tau_span, n_tau);
        let f_theta = linspace(-std::f64::consts::PI, std::f64::consts::PI, n_f);
        BeamGrid::new(tau_d, f_theta)
    }

    pub fn len(&self) -> usize {
        self.tau_d.len() * self.f_theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// What a surface's values mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceKind {
    /// Complex correlation values of a single realization.
    Instant,
    /// Magnitude of the ensemble mean (real, nonnegative).
    Mean,
    /// Ensemble variance of the normalized pattern (real, nonnegative).
    Variance,
    /// Closed-form magnitude (real, nonnegative).
    ClosedForm,
}

/// Values over a [`BeamGrid`], stored row-major over (tau_d, f_theta).
#[derive(Debug, Clone)]
pub struct BeamSurface {
    pub grid: BeamGrid,
    pub kind: SurfaceKind,
    pub values: Vec<Complex64>,
}

impl BeamSurface {
    pub fn value(&self, i_tau: usize, i_f: usize) -> Complex64 {
        self.values[i_tau * self.grid.f_theta.len() + i_f]
    }

    /// Magnitudes, same layout.
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// Writes `tau_d_s,f_theta_rad,value` rows (value = magnitude for
    /// complex kinds, real part otherwise).
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "tau_d_s,f_theta_rad,value")?;
        for (i, &td) in self.grid.tau_d.iter().enumerate() {
            for (j, &ft) in self.grid.f_theta.iter().enumerate() {
                let v = self.value(i, j);
                let out = match self.kind {
                    SurfaceKind::Instant => v.norm(),
                    _ => v.re,
                };
                writeln!(f, "{td:e},{ft:e},{out:e}")?;
            }
        }
        Ok(())
    }
}

/// Coherent transmit gain of one slot's radar set at spatial-frequency
/// offset `f_theta`: sum of e^{j*m*f_theta} over the active indices.
pub fn transmit_gain(radar_set: &[usize], f_theta: f64) -> Complex64 {
    radar_set
        .iter()
        .map(|&m| Complex64::from_polar(1.0, m as f64 * f_theta))
        .sum()
}

/// |sin(m*f/2) / sin(f/2)| with the removable singularity evaluated as `m`
/// whenever |sin(f/2)| < 1e-9.
pub fn dirichlet_mag(m: usize, f: f64) -> f64 {
    let s = (f / 2.0).sin();
    if s.abs() < 1e-9 {
        m as f64
    } else {
        ((m as f64 * f / 2.0).sin() / s).abs()
    }
}

/// sinc(x) = sin(pi x)/(pi x).
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (std::f64::consts::PI * x).sin() / (std::f64::consts::PI * x)
    }
}

/// Per-slot chirp correlation factors eta[k](tau_d): the part of the
/// delay-direction correlation that does not depend on f_theta.
///
/// eta[k] = sum_n g((n*Ts - k*Tc - tau_d - tau_tilde)/Tc)
///                * h(n*Ts - tau_d - tau_tilde) * conj(h(n*Ts - tau_tilde))
pub fn slot_correlations(cfg: &SystemConfig, tau_d: f64, tau_tilde: f64) -> Vec<Complex64> {
    let p = ChirpParams::from_config(cfg);
    let ts = cfg.t_s();
    let k_slots = cfg.k;
    let mut eta = vec![Complex64::new(0.0, 0.0); k_slots];
    // both chirp factors vanish outside [tau_tilde, tau_tilde + T_r) and
    // [tau_tilde + tau_d, tau_tilde + tau_d + T_r)
    let t_lo = (tau_tilde + tau_d.min(0.0)).max(0.0);
    let t_hi = tau_tilde + tau_d.max(0.0) + cfg.t_r;
    let n_lo = (t_lo / ts).floor().max(0.0) as usize;
    let n_hi = ((t_hi / ts).ceil() as usize).min(cfg.n_rec().max(cfg.n_r() * 2));
    for n in n_lo..n_hi {
        let t = n as f64 * ts;
        let a = chirp_sample(p, t - tau_d - tau_tilde);
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        let b = chirp_sample(p, t - tau_tilde).conj();
        if b == Complex64::new(0.0, 0.0) {
            continue;
        }
        // slot gate: k = floor(x / t_c), nudged by 1e-9 slots so samples
        // landing exactly on a slot boundary are assigned consistently
        // regardless of floating-point rounding of x
        let k = ((t - tau_d - tau_tilde) / cfg.t_c + 1e-9).floor() as isize;
        if (0..k_slots as isize).contains(&k) {
            eta[k as usize] += a * b;
        }
    }
    eta
}

/// Instantaneous delay-direction beam pattern of one allocation realization,
/// evaluated by the exact discrete correlation sum.
pub fn beampattern_instant(
    alloc: &AllocationPattern,
    cfg: &SystemConfig,
    grid: &BeamGrid,
    tau_tilde: f64,
) -> Result<BeamSurface> {
    if alloc.num_slots() != cfg.k {
        return Err(Error::DimensionMismatch(format!(
            "allocation has {} slots, config expects {}",
            alloc.num_slots(),
            cfg.k
        )));
    }
    let nf = grid.f_theta.len();
    let values: Vec<Complex64> = grid
        .tau_d
        .par_iter()
        .flat_map_iter(|&td| {
            let eta = slot_correlations(cfg, td, tau_tilde);
            let gains: Vec<Vec<Complex64>> = (0..cfg.k)
                .map(|k| {
                    grid.f_theta
                        .iter()
                        .map(|&f| transmit_gain(alloc.radar_set(k), f))
                        .collect()
                })
                .collect();
            (0..nf).map(move |j| {
                (0..cfg.k)
                    .map(|k| gains[k][j] * eta[k])
                    .sum::<Complex64>()
            })
        })
        .collect();
    Ok(BeamSurface {
        grid: grid.clone(),
        kind: SurfaceKind::Instant,
        values,
    })
}

/// Closed-form |chi| for the full array: N_r |sinc(B_r tau_d)| * D_M(f).
pub fn full_closed(cfg: &SystemConfig, tau_d: f64, f_theta: f64) -> f64 {
    cfg.n_r() as f64 * sinc(cfg.b_r * tau_d).abs() * dirichlet_mag(cfg.m, f_theta)
}

/// Closed-form |chi| for the fixed adjacent sub-array:
/// (M_T_r N_r / M) |sinc(B_r tau_d)| * D_{M_T_r}(f).
///
/// Note the published prefactor: its peak is M_T_r^2 N_r / M, a factor
/// M_T_r/M below the raw correlation sum's peak M_T_r N_r; the two agree
/// after peak normalization, which is how surfaces are compared and plotted.
pub fn fixed_adjacent_closed(cfg: &SystemConfig, tau_d: f64, f_theta: f64) -> f64 {
    (cfg.m_t_r * cfg.n_r()) as f64 / cfg.m as f64
        * sinc(cfg.b_r * tau_d).abs()
        * dirichlet_mag(cfg.m_t_r, f_theta)
}

/// Closed-form magnitude of the expected pattern under per-slot uniform
/// random allocation: (M_T_r N_r / M) |sinc(B_r tau_d)| * D_M(f).
pub fn expected_closed(cfg: &SystemConfig, tau_d: f64, f_theta: f64) -> f64 {
    (cfg.m_t_r * cfg.n_r()) as f64 / cfg.m as f64
        * sinc(cfg.b_r * tau_d).abs()
        * dirichlet_mag(cfg.m, f_theta)
}

/// Which random-allocation ensemble a statistical quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomEnsemble {
    /// Independent uniform subset per slot.
    PerSlot,
    /// One uniform subset repeated over the pulse.
    PerPulse,
}

/// Closed-form variance of the peak-normalized pattern
/// chi / E{chi(0,0)} = chi / (M_T_r N_r).
pub fn variance_closed(
    cfg: &SystemConfig,
    ensemble: RandomEnsemble,
    tau_d: f64,
    f_theta: f64,
) -> f64 {
    let (m, mtr, k) = (cfg.m as f64, cfg.m_t_r as f64, cfg.k as f64);
    let gamma = match ensemble {
        RandomEnsemble::PerSlot => sinc(cfg.b_r * tau_d / k).powi(2) / k,
        RandomEnsemble::PerPulse => sinc(cfg.b_r * tau_d).powi(2),
    };
    let d2 = dirichlet_mag(cfg.m, f_theta).powi(2);
    gamma * ((mtr - m) / (mtr * m * m * (m - 1.0)) * d2 + (m - mtr) / (mtr * (m - 1.0)))
}

/// First-null-to-first-null half-width of the angular mainlobe: 2*pi/M for
/// the full array and the per-slot random scheme, 2*pi/M_T_r for the fixed
/// adjacent sub-array.
pub fn angular_resolution(cfg: &SystemConfig, uses_full_aperture: bool) -> f64 {
    if uses_full_aperture {
        2.0 * std::f64::consts::PI / cfg.m as f64
    } else {
        2.0 * std::f64::consts::PI / cfg.m_t_r as f64
    }
}

/// Monte Carlo mean and variance of the PEAK-NORMALIZED instantaneous
/// pattern (divided by M_T_r * N_r) at selected grid points, over random
/// allocations of the given ensemble.
///
/// Returns (|mean|, variance) per point. Deterministic for a fixed seed.
pub fn monte_carlo_stats(
    cfg: &SystemConfig,
    points: &[(f64, f64)],
    ensemble: RandomEnsemble,
    trials: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    let norm = (cfg.m_t_r * cfg.n_r()) as f64;
    // eta depends only on tau_d; cache per distinct delay
    let mut taus: Vec<f64> = points.iter().map(|p| p.0).collect();
    taus.dedup();
    let etas: Vec<(f64, Vec<Complex64>)> = taus
        .iter()
        .map(|&td| (td, slot_correlations(cfg, td, 0.0)))
        .collect();
    let eta_for = |td: f64| -> &Vec<Complex64> {
        &etas
            .iter()
            .find(|(t, _)| *t == td)
            .expect("delay cached")
            .1
    };
    let acc: Vec<(Complex64, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ mix(t as u64));
            let alloc = match ensemble {
                RandomEnsemble::PerSlot => AllocationPattern::hopping_random(cfg, &mut rng),
                RandomEnsemble::PerPulse => AllocationPattern::fixed_random(cfg, &mut rng),
            };
            points
                .iter()
                .map(|&(td, f)| {
                    let eta = eta_for(td);
                    let chi: Complex64 = (0..cfg.k)
                        .map(|k| transmit_gain(alloc.radar_set(k), f) * eta[k])
                        .sum();
                    let z = chi / norm;
                    (z, z.norm_sqr())
                })
                .collect::<Vec<_>>()
        })
        .reduce(
            || vec![(Complex64::new(0.0, 0.0), 0.0); points.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.0 += y.0;
                    x.1 += y.1;
                }
                a
            },
        );
    let n = trials as f64;
    let mean: Vec<f64> = acc.iter().map(|(s, _)| (s / n).norm() * norm).collect();
    let var: Vec<f64> = acc
        .iter()
        .map(|(s, q)| (q / n - (s / n).norm_sqr()).max(0.0))
        .collect();
    (mean, var)
}

/// SplitMix64 finalizer, used to derive independent per-trial RNG streams.
pub fn mix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
