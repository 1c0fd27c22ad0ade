//! Radar link: multi-target echo synthesis, clutter generation, the
//! on-grid delay/angle dictionary, and greedy sparse recovery.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::alloc::AllocationPattern;
use crate::beampattern::transmit_gain;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::waveform::{chirp_sample, ChirpParams};

/// Point scatterer: round-trip delay, spatial frequency, complex
/// reflectivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub tau: f64,
    pub vartheta: f64,
    pub alpha: Complex64,
}

/// A list of point scatterers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TargetScene {
    pub targets: Vec<Target>,
}

impl TargetScene {
    pub fn new(targets: Vec<Target>) -> Self {
        TargetScene { targets }
    }

    /// Parses a scene file: CSV with header
    /// `tau_s,vartheta_rad,alpha_re,alpha_im`; `#` lines are comments.
    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut targets = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("tau_s") {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(|s| s.trim()).collect();
            if fields.len() != 4 {
                return Err(Error::SceneParse(format!(
                    "line {}: expected 4 comma-separated fields",
                    ln + 1
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse()
                    .map_err(|_| Error::SceneParse(format!("line {}: bad number '{s}'", ln + 1)))
            };
            targets.push(Target {
                tau: parse(fields[0])?,
                vartheta: parse(fields[1])?,
                alpha: Complex64::new(parse(fields[2])?, parse(fields[3])?),
            });
        }
        Ok(TargetScene { targets })
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "tau_s,vartheta_rad,alpha_re,alpha_im")?;
        for t in &self.targets {
            writeln!(f, "{:e},{:e},{:e},{:e}", t.tau, t.vartheta, t.alpha.re, t.alpha.im)?;
        }
        Ok(())
    }
}

/// Rectangular recovery grid: `p_len` delay points and `q_len` spatial
/// frequency points over `[-pi, pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayAngleGrid {
    pub taus: Vec<f64>,
    pub thetas: Vec<f64>,
}

impl DelayAngleGrid {
    /// Delay points `tau_min + (p/p_len)*(tau_max - tau_min)` and angle
    /// points `-pi + 2*pi*q/q_len`.
    ///
    /// Spacings must satisfy `delta_tau <= 1/b_r` and
    /// `delta_theta <= 2*pi/m`.
    pub fn new(
        cfg: &SystemConfig,
        tau_min: f64,
        tau_max: f64,
        p_len: usize,
        q_len: usize,
    ) -> Result<Self> {
        if p_len == 0 || q_len == 0 || tau_max <= tau_min {
            return Err(Error::InvalidGrid("empty axis or inverted delay span".into()));
        }
        let dt = (tau_max - tau_min) / p_len as f64;
        if p_len > 1 && dt > 1.0 / cfg.b_r + 1e-15 {
            return Err(Error::InvalidGrid(format!(
                "delay spacing {dt} exceeds 1/b_r = {}",
                1.0 / cfg.b_r
            )));
        }
        let dq = 2.0 * std::f64::consts::PI / q_len as f64;
        if dq > 2.0 * std::f64::consts::PI / cfg.m as f64 + 1e-12 {
            return Err(Error::InvalidGrid(format!(
                "angle spacing {dq} exceeds 2*pi/m"
            )));
        }
        let taus = (0..p_len).map(|p| tau_min + p as f64 * dt).collect();
        let thetas = (0..q_len)
            .map(|q| -std::f64::consts::PI + dq * q as f64)
            .collect();
        Ok(DelayAngleGrid { taus, thetas })
    }

    /// Grid over an explicit list of delay cells (range-gated processing)
    /// and `q_len` angle cells.
    pub fn from_delays(cfg: &SystemConfig, taus: Vec<f64>, q_len: usize) -> Result<Self> {
        if taus.is_empty() || taus.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(
                "delay list must be nonempty and strictly increasing".into(),
            ));
        }
        let dq = 2.0 * std::f64::consts::PI / q_len.max(1) as f64;
        if q_len == 0 || dq > 2.0 * std::f64::consts::PI / cfg.m as f64 + 1e-12 {
            return Err(Error::InvalidGrid(format!(
                "angle spacing {dq} exceeds 2*pi/m"
            )));
        }
        let thetas = (0..q_len)
            .map(|q| -std::f64::consts::PI + dq * q as f64)
            .collect();
        Ok(DelayAngleGrid { taus, thetas })
    }

    /// Default experiment grid around a center delay: 5 delay cells at the
    /// spacing 1/(5*b_r) and 5*m angle cells (spacing 2*pi/(5*m)).
    pub fn around(cfg: &SystemConfig, tau_center: f64) -> Result<Self> {
        let dt = 1.0 / (5.0 * cfg.b_r);
        let p_len = 5;
        let tau_min = tau_center - (p_len / 2) as f64 * dt;
        DelayAngleGrid::new(cfg, tau_min, tau_min + p_len as f64 * dt, p_len, 5 * cfg.m)
    }

    pub fn p_len(&self) -> usize {
        self.taus.len()
    }

    pub fn q_len(&self) -> usize {
        self.thetas.len()
    }

    pub fn delta_tau(&self) -> f64 {
        if self.taus.len() > 1 {
            self.taus[1] - self.taus[0]
        } else {
            f64::INFINITY
        }
    }

    pub fn delta_theta(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.thetas.len() as f64
    }

    /// Index of the delay grid cell containing `tau` (nearest grid point),
    /// or None if `tau` is outside all cells.
    pub fn delay_cell_of(&self, tau: f64) -> Option<usize> {
        let dt = self.delta_tau();
        self.taus
            .iter()
            .position(|&t| (tau - t).abs() <= dt / 2.0 + 1e-15)
    }
}

/// Sampled receive block: `rx.len()` rows over the sample window
/// `[n0, n1)` of the receive interval (sample n sits at t = t_r + n*t_s).
#[derive(Debug, Clone)]
pub struct EchoBlock {
    pub samples: Vec<Complex64>,
    /// Receive element indices, one row each.
    pub rx: Vec<usize>,
    pub n0: usize,
    pub n1: usize,
}

impl EchoBlock {
    pub fn width(&self) -> usize {
        self.n1 - self.n0
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.samples[i * self.width()..(i + 1) * self.width()]
    }
}

/// Spatial steering frequency of the transmit beam direction.
fn spatial_steer(cfg: &SystemConfig) -> f64 {
    2.0 * std::f64::consts::PI * cfg.d_over_lambda * cfg.theta_t.sin()
}

/// Chirp samples and slot indices along the receive window for one delay:
/// entry n-n0 holds (h(t_n - tau), slot index), with slot -1 outside the
/// pulse support.
fn chirp_track(cfg: &SystemConfig, tau: f64, n0: usize, n1: usize) -> (Vec<Complex64>, Vec<i32>) {
    let p = ChirpParams::from_config(cfg);
    let ts = cfg.t_s();
    let mut vals = Vec::with_capacity(n1 - n0);
    let mut slots = Vec::with_capacity(n1 - n0);
    for n in n0..n1 {
        let t = cfg.t_r + n as f64 * ts;
        let x = t - tau;
        let h = chirp_sample(p, x);
        if h == Complex64::new(0.0, 0.0) {
            vals.push(h);
            slots.push(-1);
        } else {
            vals.push(h);
            // nudge by 1e-9 slots: boundary samples get a rounding-stable
            // slot assignment (same convention as the beam-pattern module)
            slots.push(((x / cfg.t_c + 1e-9).floor() as i32).clamp(0, cfg.k as i32 - 1));
        }
    }
    (vals, slots)
}

/// Valid target delay window `[t_r, t_pri - t_r)`: echoes are fully
/// captured by the receive interval.
pub fn delay_window(cfg: &SystemConfig) -> (f64, f64) {
    (cfg.t_r, cfg.t_pri - cfg.t_r)
}

/// Single echo template entry h_m[n, tau, vartheta]; a brute-force
/// reference, used by tests and small scenes.
pub fn echo_template(
    m: usize,
    n: usize,
    tau: f64,
    vartheta: f64,
    alloc: &AllocationPattern,
    cfg: &SystemConfig,
) -> Complex64 {
    let (vals, slots) = chirp_track(cfg, tau, n, n + 1);
    if slots[0] < 0 {
        return Complex64::new(0.0, 0.0);
    }
    let rho = transmit_gain(alloc.radar_set(slots[0] as usize), vartheta - spatial_steer(cfg));
    let phase = Complex64::from_polar(
        1.0,
        -2.0 * std::f64::consts::PI * cfg.f_c * tau + m as f64 * vartheta,
    );
    phase * rho * vals[0]
}

/// Noiseless template block of one scatterer over rows `rx` and samples
/// `[n0, n1)`.
fn template_block(
    tau: f64,
    vartheta: f64,
    alloc: &AllocationPattern,
    cfg: &SystemConfig,
    rx: &[usize],
    n0: usize,
    n1: usize,
) -> Vec<Complex64> {
    let (vals, slots) = chirp_track(cfg, tau, n0, n1);
    let steer = spatial_steer(cfg);
    let gains: Vec<Complex64> = (0..cfg.k)
        .map(|k| transmit_gain(alloc.radar_set(k), vartheta - steer))
        .collect();
    let carrier = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * cfg.f_c * tau);
    let width = n1 - n0;
    let mut out = vec![Complex64::new(0.0, 0.0); rx.len() * width];
    // base row: carrier * rho(k) * chirp
    let base: Vec<Complex64> = vals
        .iter()
        .zip(&slots)
        .map(|(&h, &k)| {
            if k < 0 {
                Complex64::new(0.0, 0.0)
            } else {
                carrier * gains[k as usize] * h
            }
        })
        .collect();
    for (i, &m) in rx.iter().enumerate() {
        let ph = Complex64::from_polar(1.0, m as f64 * vartheta);
        for n in 0..width {
            out[i * width + n] = ph * base[n];
        }
    }
    out
}

/// Synthesizes the received block for a scene over a sample window:
/// superposition of per-target templates plus circular complex white
/// Gaussian noise of variance `sigma2` per sample.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_echo_window<R: Rng + ?Sized>(
    scene: &TargetScene,
    alloc: &AllocationPattern,
    cfg: &SystemConfig,
    sigma2: f64,
    rng: &mut R,
    rx: &[usize],
    n0: usize,
    n1: usize,
) -> Result<EchoBlock> {
    let (lo, hi) = delay_window(cfg);
    for t in &scene.targets {
        if !(lo..hi).contains(&t.tau) {
            return Err(Error::DelayOutOfWindow {
                tau_s: t.tau,
                min_s: lo,
                max_s: hi,
            });
        }
    }
    let width = n1 - n0;
    let mut samples = vec![Complex64::new(0.0, 0.0); rx.len() * width];
    for t in &scene.targets {
        let block = template_block(t.tau, t.vartheta, alloc, cfg, rx, n0, n1);
        for (s, b) in samples.iter_mut().zip(&block) {
            *s += t.alpha * b;
        }
    }
    if sigma2 > 0.0 {
        let g = Normal::new(0.0, (sigma2 / 2.0).sqrt()).expect("valid sigma");
        for s in samples.iter_mut() {
            *s += Complex64::new(g.sample(rng), g.sample(rng));
        }
    }
    Ok(EchoBlock {
        samples,
        rx: rx.to_vec(),
        n0,
        n1,
    })
}

/// Full receive window, all elements.
pub fn synthesize_echo<R: Rng + ?Sized>(
    scene: &TargetScene,
    alloc: &AllocationPattern,
    cfg: &SystemConfig,
    sigma2: f64,
    rng: &mut R,
) -> Result<EchoBlock> {
    let rx: Vec<usize> = (0..cfg.m).collect();
    synthesize_echo_window(scene, alloc, cfg, sigma2, rng, &rx, 0, cfg.n_rec())
}

/// Dense on-grid dictionary: column (p*q_len + q) is the template of grid
/// point (tau_p, theta_q) over the rows and sample window of the matrix.
#[derive(Debug, Clone)]
pub struct SensingMatrix {
    pub grid: DelayAngleGrid,
    pub rx: Vec<usize>,
    pub n0: usize,
    pub n1: usize,
    /// Column-major entries, rows*cols.
    cols: Vec<Complex64>,
    norms: Vec<f64>,
}

/// Default dense-matrix memory budget (bytes).
pub const DEFAULT_MATRIX_BUDGET: usize = 1 << 31;

impl SensingMatrix {
    pub fn rows(&self) -> usize {
        self.rx.len() * (self.n1 - self.n0)
    }

    pub fn num_cols(&self) -> usize {
        self.grid.p_len() * self.grid.q_len()
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        let r = self.rows();
        &self.cols[j * r..(j + 1) * r]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }
}

/// Builds the dense dictionary over the tight sample window covering every
/// grid delay, restricted to receive elements `rx`.
pub fn build_sensing_matrix(
    grid: &DelayAngleGrid,
    alloc: &AllocationPattern,
    cfg: &SystemConfig,
    rx: &[usize],
    budget_bytes: usize,
) -> Result<SensingMatrix> {
    let ts = cfg.t_s();
    let tau_min = grid.taus[0];
    let tau_max = *grid.taus.last().unwrap();
    let n0 = (((tau_min - cfg.t_r) / ts).floor().max(0.0)) as usize;
    let n1 = (((tau_max + cfg.t_r - cfg.t_r) / ts).ceil() as usize + 1).min(cfg.n_rec());
    let rows = rx.len() * (n1 - n0);
    let cols_n = grid.p_len() * grid.q_len();
    if rows * cols_n * std::mem::size_of::<Complex64>() > budget_bytes {
        return Err(Error::MatrixBudgetExceeded {
            rows,
            cols: cols_n,
            budget_bytes,
        });
    }
    let steer = spatial_steer(cfg);
    let width = n1 - n0;
    // per-delay chirp tracks are shared by all q columns of that delay
    let tracks: Vec<(Vec<Complex64>, Vec<i32>)> = grid
        .taus
        .iter()
        .map(|&tau| chirp_track(cfg, tau, n0, n1))
        .collect();
    let mut cols = vec![Complex64::new(0.0, 0.0); rows * cols_n];
    cols.par_chunks_mut(rows).enumerate().for_each(|(j, col)| {
        let (p, q) = (j / grid.q_len(), j % grid.q_len());
        let (vals, slots) = &tracks[p];
        let tau = grid.taus[p];
        let vartheta = grid.thetas[q];
        let gains: Vec<Complex64> = (0..cfg.k)
            .map(|k| transmit_gain(alloc.radar_set(k), vartheta - steer))
            .collect();
        let carrier = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * cfg.f_c * tau);
        for (i, &m) in rx.iter().enumerate() {
            let ph = carrier * Complex64::from_polar(1.0, m as f64 * vartheta);
            for n in 0..width {
                let k = slots[n];
                if k >= 0 {
                    col[i * width + n] = ph * gains[k as usize] * vals[n];
                }
            }
        }
    });
    let norms: Vec<f64> = cols
        .par_chunks(rows)
        .map(|c| c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    Ok(SensingMatrix {
        grid: grid.clone(),
        rx: rx.to_vec(),
        n0,
        n1,
        cols,
        norms,
    })
}

/// One recovered dictionary entry.
#[derive(Debug, Clone, Copy)]
pub struct RecoveredEntry {
    pub p: usize,
    pub q: usize,
    pub tau: f64,
    pub vartheta: f64,
    pub amplitude: Complex64,
}

/// Sparse recovery result: selected grid entries, refit amplitudes, and the
/// residual norm after each iteration.
#[derive(Debug, Clone, Default)]
pub struct RecoveredScene {
    pub entries: Vec<RecoveredEntry>,
    pub residual_norm: f64,
    pub residual_history: Vec<f64>,
}

impl RecoveredScene {
    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        use std::io::Write;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "p,q,tau_s,vartheta_rad,amp_re,amp_im,residual")?;
        for e in &self.entries {
            writeln!(
                f,
                "{},{},{:e},{:e},{:e},{:e},{:e}",
                e.p, e.q, e.tau, e.vartheta, e.amplitude.re, e.amplitude.im, self.residual_norm
            )?;
        }
        Ok(())
    }
}

/// Greedy sparse recovery over the dictionary (orthogonal matching
/// pursuit): per iteration, select the atom maximizing the norm-weighted
/// correlation with the residual, then least-squares refit on the selected
/// support; stop at `l_max` atoms or when the residual norm drops to
/// `epsilon`.
///
/// Atoms whose norm is below 1e-6 of the largest (transmit-pattern nulls)
/// are never selected.
pub fn omp_recover(
    y: &EchoBlock,
    a: &SensingMatrix,
    l_max: usize,
    epsilon: f64,
) -> Result<RecoveredScene> {
    if y.rx != a.rx || y.n0 != a.n0 || y.n1 != a.n1 {
        return Err(Error::DimensionMismatch(
            "echo block window/rows do not match the dictionary".into(),
        ));
    }
    let rows = a.rows();
    let cols_n = a.num_cols();
    let max_norm = a.norms.iter().cloned().fold(0.0f64, f64::max);
    let mut residual = y.samples.clone();
    let mut selected: Vec<usize> = Vec::new();
    let mut amps: Vec<Complex64> = Vec::new();
    let mut history = vec![norm2(&residual).sqrt()];
    while selected.len() < l_max && *history.last().unwrap() > epsilon {
        // correlation scan
        let scores: Vec<f64> = (0..cols_n)
            .into_par_iter()
            .map(|j| {
                if a.norms[j] <= 1e-6 * max_norm || selected.contains(&j) {
                    return -1.0;
                }
                dot_conj(a.column(j), &residual).norm() / a.norms[j]
            })
            .collect();
        let (best, score) = scores
            .iter()
            .enumerate()
            .fold((0usize, -1.0f64), |acc, (j, &s)| {
                if s > acc.1 {
                    (j, s)
                } else {
                    acc
                }
            });
        if score <= 0.0 {
            break;
        }
        selected.push(best);
        // least-squares refit on the support via normal equations
        let l = selected.len();
        let mut gram = vec![Complex64::new(0.0, 0.0); l * l];
        let mut rhs = vec![Complex64::new(0.0, 0.0); l];
        for (i, &ji) in selected.iter().enumerate() {
            for (k, &jk) in selected.iter().enumerate().skip(i) {
                let g = dot_conj(a.column(ji), a.column(jk));
                gram[i * l + k] = g;
                gram[k * l + i] = g.conj();
            }
            rhs[i] = dot_conj(a.column(ji), &y.samples);
        }
        amps = match solve_hermitian(&gram, &rhs, l) {
            Some(a) => a,
            None => {
                // near-colinear support (e.g. single-element processing of
                // same-delay atoms): diagonal loading approximates the
                // minimum-norm least-squares solution
                let scale = (0..l).map(|i| gram[i * l + i].re).fold(0.0f64, f64::max);
                let mut loaded = gram.clone();
                for i in 0..l {
                    loaded[i * l + i] += Complex64::new(1e-8 * scale, 0.0);
                }
                solve_hermitian(&loaded, &rhs, l).ok_or(Error::RankDeficientSupport {
                    iteration: l,
                    atom: best,
                })?
            }
        };
        // residual = y - A_s * amps
        residual.copy_from_slice(&y.samples);
        for (i, &j) in selected.iter().enumerate() {
            let col = a.column(j);
            let c = amps[i];
            for n in 0..rows {
                residual[n] -= c * col[n];
            }
        }
        history.push(norm2(&residual).sqrt());
    }
    let entries = selected
        .iter()
        .zip(&amps)
        .map(|(&j, &amp)| {
            let (p, q) = (j / a.grid.q_len(), j % a.grid.q_len());
            RecoveredEntry {
                p,
                q,
                tau: a.grid.taus[p],
                vartheta: a.grid.thetas[q],
                amplitude: amp,
            }
        })
        .collect();
    Ok(RecoveredScene {
        entries,
        residual_norm: *history.last().unwrap(),
        residual_history: history,
    })
}

/// Residual threshold for unknown scene sizes: the expected noise-floor
/// norm sigma * sqrt(2 * rows).
pub fn default_epsilon(sigma2: f64, rows: usize) -> f64 {
    (2.0 * rows as f64 * sigma2).sqrt()
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Solves a Hermitian positive-definite system via Cholesky; None when the
/// matrix is numerically rank deficient.
fn solve_hermitian(gram: &[Complex64], rhs: &[Complex64], l: usize) -> Option<Vec<Complex64>> {
    let mut chol = vec![Complex64::new(0.0, 0.0); l * l];
    let scale = (0..l)
        .map(|i| gram[i * l + i].re)
        .fold(0.0f64, f64::max)
        .max(1e-300);
    for i in 0..l {
        for j in 0..=i {
            let mut s = gram[i * l + j];
            for k in 0..j {
                s -= chol[i * l + k] * chol[j * l + k].conj();
            }
            if i == j {
                let d = s.re;
                if d <= 1e-12 * scale {
                    return None;
                }
                chol[i * l + i] = Complex64::new(d.sqrt(), 0.0);
            } else {
                chol[i * l + j] = s / chol[j * l + j].re;
            }
        }
    }
    // forward then backward substitution
    let mut y = rhs.to_vec();
    for i in 0..l {
        for k in 0..i {
            let t = chol[i * l + k] * y[k];
            y[i] -= t;
        }
        y[i] /= chol[i * l + i].re;
    }
    for i in (0..l).rev() {
        for k in i + 1..l {
            let t = chol[k * l + i].conj() * y[k];
            y[i] -= t;
        }
        y[i] /= chol[i * l + i].re;
    }
    Some(y)
}

/// Adds two clutter scatterers at the first target's delay, angles uniform
/// outside the mainlobe interval |theta - theta_T| <= 2*pi/m (rejection
/// sampled), Rayleigh amplitudes with E{|alpha|^2} = |alpha_target|^2 / SCR,
/// uniform phase.
pub fn generate_clutter<R: Rng + ?Sized>(
    scene: &TargetScene,
    cfg: &SystemConfig,
    scr_db: f64,
    rng: &mut R,
) -> Result<TargetScene> {
    let target = *scene
        .targets
        .first()
        .ok_or_else(|| Error::DimensionMismatch("clutter needs a target".into()))?;
    let scr = 10f64.powf(scr_db / 10.0);
    // Rayleigh with scale s has E{r^2} = 2 s^2
    let scale = (target.alpha.norm_sqr() / scr / 2.0).sqrt();
    let mainlobe = 2.0 * std::f64::consts::PI / cfg.m as f64;
    let steer = spatial_steer(cfg);
    let mut out = scene.clone();
    for _ in 0..2 {
        let vartheta = loop {
            let v = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            if wrap_angle(v - steer).abs() > mainlobe {
                break v;
            }
        };
        // Rayleigh(scale) via inverse transform: scale * sqrt(-2 ln U)
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let amp = scale * (-2.0 * u.ln()).sqrt();
        let phase = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
        out.targets.push(Target {
            tau: target.tau,
            vartheta,
            alpha: Complex64::from_polar(amp, phase),
        });
    }
    Ok(out)
}

/// Wraps an angle to [-pi, pi).
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = (a + std::f64::consts::PI).rem_euclid(two_pi);
    if x < 0.0 {
        x += two_pi;
    }
    x - std::f64::consts::PI
}

/// Per-target hit decision: a target is hit when some recovered entry lies
/// in its delay grid cell and within half an angle cell of its angle.
pub fn hit_test(truth: &TargetScene, rec: &RecoveredScene, grid: &DelayAngleGrid) -> Vec<bool> {
    let half = grid.delta_theta() / 2.0 + 1e-12;
    truth
        .targets
        .iter()
        .map(|t| {
            let Some(cell) = grid.delay_cell_of(t.tau) else {
                return false;
            };
            rec.entries
                .iter()
                .any(|e| e.p == cell && wrap_angle(e.vartheta - t.vartheta).abs() <= half)
        })
        .collect()
}
