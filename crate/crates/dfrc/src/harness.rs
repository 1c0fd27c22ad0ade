//! Experiment harness: seeded Monte Carlo campaigns for the beam-pattern,
//! target-recovery, and communication experiments, reduced into
//! deterministic result tables with CSV and optional SVG plot output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::alloc::{combinations, AllocationPattern, CombinationMap, Scheme};
use crate::beampattern::{
    beampattern_instant, expected_closed, fixed_adjacent_closed, full_closed, mix,
    monte_carlo_stats, variance_closed, BeamGrid, BeamSurface, RandomEnsemble,
};
use crate::comm::{ber_experiment, mi_estimate, CandidateSet, CommMode};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::radar::{
    build_sensing_matrix, generate_clutter, hit_test, omp_recover, synthesize_echo_window,
    DelayAngleGrid, SensingMatrix, Target, TargetScene, DEFAULT_MATRIX_BUDGET,
};

/// Which experiment an [`ExperimentSpec`] drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Beampattern,
    Resolve,
    Hitrate,
    Ber,
    Mi,
}

/// Complete, reproducible description of one experiment run.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub config: SystemConfig,
    /// Sweep axis: SNR (dB) for ber/mi, SCR (dB) for hitrate; a single
    /// placeholder value for the non-swept experiments.
    pub sweep: Vec<f64>,
    /// Monte Carlo trials (or symbols) per sweep point and scheme.
    pub trials: usize,
    pub seed: u64,
    /// Scene override for the resolve experiment; `None` uses the builtin
    /// two-target scene.
    pub scene: Option<TargetScene>,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, config: SystemConfig) -> Self {
        let (sweep, trials) = match kind {
            ExperimentKind::Beampattern => (vec![0.0], 10_000),
            ExperimentKind::Resolve => (vec![0.0], 100),
            ExperimentKind::Hitrate => (default_scr_sweep(), 4000),
            ExperimentKind::Ber | ExperimentKind::Mi => (default_snr_sweep(), 100_000),
        };
        ExperimentSpec {
            kind,
            config,
            sweep,
            trials,
            seed: 0,
            scene: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trial count must be >= 1".into()));
        }
        if self.sweep.is_empty() {
            return Err(Error::InvalidConfig("sweep axis must be nonempty".into()));
        }
        Ok(())
    }
}

/// Default communication SNR sweep: -10..=30 dB step 2.
pub fn default_snr_sweep() -> Vec<f64> {
    (0..=20).map(|i| -10.0 + 2.0 * i as f64).collect()
}

/// Default clutter SCR sweep: -10..=20 dB step 3.
pub fn default_scr_sweep() -> Vec<f64> {
    (0..=10).map(|i| -10.0 + 3.0 * i as f64).collect()
}

/// One result row; every row carries the trial count and seed that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub scheme: String,
    pub metric: String,
    pub value: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Ordered collection of result rows; the row order is deterministic
/// (schemes outer, sweep values inner) so CSV output is byte-stable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn push(
        &mut self,
        sweep_value: f64,
        scheme: &str,
        metric: &str,
        value: f64,
        trials: usize,
        seed: u64,
    ) {
        self.rows.push(ResultRow {
            sweep_value,
            scheme: scheme.to_string(),
            metric: metric.to_string(),
            value,
            trials,
            seed,
        });
    }

    /// First row matching scheme+metric (+ sweep value when given).
    pub fn get(&self, scheme: &str, metric: &str, sweep_value: Option<f64>) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| {
                r.scheme == scheme
                    && r.metric == metric
                    && sweep_value.is_none_or(|s| r.sweep_value == s)
            })
            .map(|r| r.value)
    }

    pub fn to_csv_string(&self) -> String {
        let mut s = String::from("sweep_value,scheme,metric,value,trials,seed\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.sweep_value, r.scheme, r.metric, r.value, r.trials, r.seed
            ));
        }
        s
    }

    pub fn write_csv(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }
}

/// One communication sweep point, in the comm CSV column layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CommPoint {
    pub snr_db: f64,
    pub mode: CommMode,
    pub rate_bits: usize,
    pub value: f64,
    pub n_symbols: usize,
    pub seed: u64,
}

/// Writes comm points as `snr_db,mode,rate_bits,<metric>,n_symbols,seed`.
pub fn write_comm_csv(points: &[CommPoint], metric: &str, path: &std::path::Path) -> Result<()> {
    let mut s = format!("snr_db,mode,rate_bits,{metric},n_symbols,seed\n");
    for p in points {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            p.snr_db,
            p.mode.name(),
            p.rate_bits,
            p.value,
            p.n_symbols,
            p.seed
        ));
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// The per-scheme system configuration: the full-array reference runs with
/// every element on radar, the split schemes with the configured split.
pub fn scheme_config(scheme: Scheme, cfg: &SystemConfig) -> SystemConfig {
    match scheme {
        Scheme::Full => cfg.radar_only(),
        _ => cfg.clone(),
    }
}

/// Center delay used by the builtin recovery scenes: twice the pulse
/// width, comfortably inside the valid window.
pub fn builtin_center_delay(cfg: &SystemConfig) -> f64 {
    2.0 * cfg.t_r
}

/// Recovery grid of the builtin experiments: 5 delay cells around the
/// center delay, 5*m angle cells.
pub fn builtin_grid(cfg: &SystemConfig) -> Result<DelayAngleGrid> {
    DelayAngleGrid::around(cfg, builtin_center_delay(cfg))
}

/// Two unit targets in the same delay cell, angles +-3*pi/8 (separation
/// 3*pi/4: inside the split-array mainlobe, outside the full-aperture one).
pub fn builtin_two_target_scene(grid: &DelayAngleGrid) -> TargetScene {
    let tau = grid.taus[grid.p_len() / 2];
    let a = 3.0 * std::f64::consts::PI / 8.0;
    TargetScene::new(vec![
        Target {
            tau,
            vartheta: -a,
            alpha: num_complex::Complex64::new(1.0, 0.0),
        },
        Target {
            tau,
            vartheta: a,
            alpha: num_complex::Complex64::new(1.0, 0.0),
        },
    ])
}

/// Six unit targets: the +-3*pi/8 pair repeated in three adjacent delay
/// cells.
pub fn builtin_six_target_scene(grid: &DelayAngleGrid) -> TargetScene {
    let a = 3.0 * std::f64::consts::PI / 8.0;
    let mut targets = Vec::new();
    for p in 1..=3 {
        for sign in [-1.0, 1.0] {
            targets.push(Target {
                tau: grid.taus[p],
                vartheta: sign * a,
                alpha: num_complex::Complex64::new(1.0, 0.0),
            });
        }
    }
    TargetScene::new(targets)
}

/// Beam-pattern campaign: emits the four normalized realization surfaces
/// and a table of closed-form/Monte-Carlo agreement metrics.
///
/// Surfaces are peak-normalized by the scheme's expected peak
/// `m_t_r * n_r`; Monte Carlo statistics use `spec.trials` allocations for
/// the mean and twice that for the variance.
pub fn run_beampattern(spec: &ExperimentSpec) -> Result<(ResultTable, Vec<(String, BeamSurface)>)> {
    spec.validate()?;
    let cfg = &spec.config;
    let grid = BeamGrid::symmetric(2.0 / cfg.b_r, 101, 101)?;
    let mut table = ResultTable::default();
    let mut surfaces = Vec::new();

    // realization surfaces, peak normalized
    for scheme in Scheme::ALL {
        let scfg = scheme_config(scheme, cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(mix(spec.seed) ^ mix(scheme as u64));
        let alloc = AllocationPattern::for_scheme(scheme, &scfg, &mut rng);
        let mut surf = beampattern_instant(&alloc, &scfg, &grid, 0.0)?;
        let norm = (scfg.m_t_r * scfg.n_r()) as f64;
        for v in surf.values.iter_mut() {
            *v /= norm;
        }
        let peak = surf.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        table.push(0.0, scheme.name(), "surface_peak", peak, 1, spec.seed);
        surfaces.push((scheme.name().to_string(), surf));
    }

    // closed-form agreement of the deterministic schemes (peak normalized)
    for (scheme, closed) in [
        (Scheme::Full, full_closed as fn(&SystemConfig, f64, f64) -> f64),
        (Scheme::FixedAdjacent, fixed_adjacent_closed),
    ] {
        let scfg = scheme_config(scheme, cfg);
        let alloc = match scheme {
            Scheme::Full => AllocationPattern::full(&scfg),
            _ => AllocationPattern::fixed_adjacent(&scfg),
        };
        let surf = beampattern_instant(&alloc, &scfg, &grid, 0.0)?;
        let direct_peak = surf.value(50, 50).norm();
        let closed_peak = closed(&scfg, 0.0, 0.0);
        let mut err: f64 = 0.0;
        for (i, &td) in grid.tau_d.iter().enumerate() {
            for (j, &f) in grid.f_theta.iter().enumerate() {
                let a = surf.value(i, j).norm() / direct_peak;
                let b = closed(&scfg, td, f) / closed_peak;
                err = err.max((a - b).abs());
            }
        }
        table.push(0.0, scheme.name(), "closed_form_max_err", err, 1, spec.seed);
    }

    // Monte Carlo mean of the per-slot random scheme vs the expected-pattern
    // closed form, at sample points away from pattern nulls
    let br = cfg.b_r;
    // sample points keep the closed-form value well above the Monte Carlo
    // noise floor (no pattern nulls, moderate delay offsets)
    let mean_pts: Vec<(f64, f64)> = [0.0, 0.2 / br, 0.45 / br, 0.7 / br]
        .iter()
        .flat_map(|&td| {
            [-0.9f64, 0.4, 0.7, 1.1, 2.2]
                .iter()
                .map(move |&f| (td, f))
                .collect::<Vec<_>>()
        })
        .collect();
    let (mean, _) = monte_carlo_stats(cfg, &mean_pts, RandomEnsemble::PerSlot, spec.trials, spec.seed);
    let mean_err = mean_pts
        .iter()
        .zip(&mean)
        .map(|(&(td, f), &m)| {
            let want = expected_closed(cfg, td, f);
            (m - want).abs() / want
        })
        .fold(0.0f64, f64::max);
    table.push(0.0, Scheme::Hopping.name(), "mean_max_rel_err", mean_err, spec.trials, spec.seed);

    // Monte Carlo variance vs closed form, |f| >= 2*pi/m, both ensembles
    let var_pts: Vec<(f64, f64)> = [0.0, 0.4 / br, 1.1 / br]
        .iter()
        .flat_map(|&td| {
            [-2.9f64, -1.6, 1.7, 2.4]
                .iter()
                .map(move |&f| (td, f))
                .collect::<Vec<_>>()
        })
        .collect();
    for (ensemble, scheme) in [
        (RandomEnsemble::PerSlot, Scheme::Hopping),
        (RandomEnsemble::PerPulse, Scheme::FixedRandom),
    ] {
        let (_, var) = monte_carlo_stats(cfg, &var_pts, ensemble, 2 * spec.trials, spec.seed);
        let var_err = var_pts
            .iter()
            .zip(&var)
            .map(|(&(td, f), &v)| {
                let want = variance_closed(cfg, ensemble, td, f);
                (v - want).abs() / want
            })
            .fold(0.0f64, f64::max);
        table.push(0.0, scheme.name(), "var_max_rel_err", var_err, 2 * spec.trials, spec.seed);
        // boresight line: the pattern is allocation independent there
        let (_, var0) = monte_carlo_stats(cfg, &[(0.5 / br, 0.0)], ensemble, 2 * spec.trials, spec.seed);
        table.push(0.0, scheme.name(), "var_at_zero_f", var0[0], 2 * spec.trials, spec.seed);
    }

    // zero-delay variance ratio between the per-pulse and per-slot ensembles
    let probe = (0.0, 2.0);
    let (_, vh) = monte_carlo_stats(cfg, &[probe], RandomEnsemble::PerSlot, 2 * spec.trials, spec.seed);
    let (_, vf) = monte_carlo_stats(cfg, &[probe], RandomEnsemble::PerPulse, 2 * spec.trials, spec.seed);
    table.push(0.0, Scheme::Hopping.name(), "var_ratio_mc", vf[0] / vh[0], 2 * spec.trials, spec.seed);
    let closed_ratio = variance_closed(cfg, RandomEnsemble::PerPulse, probe.0, probe.1)
        / variance_closed(cfg, RandomEnsemble::PerSlot, probe.0, probe.1);
    table.push(0.0, Scheme::Hopping.name(), "var_ratio_closed", closed_ratio, 1, spec.seed);
    Ok((table, surfaces))
}

/// Builds the per-trial allocation and sensing matrix for one scheme,
/// reusing prebuilt matrices for the slot-constant schemes.
struct SchemeMatrices {
    scheme: Scheme,
    scfg: SystemConfig,
    rx: Vec<usize>,
    grid: DelayAngleGrid,
    /// Fixed schemes: the single matrix; per-pulse random: one per subset.
    prebuilt: Vec<SensingMatrix>,
    combos: Vec<Vec<usize>>,
}

impl SchemeMatrices {
    fn new(scheme: Scheme, cfg: &SystemConfig, grid: &DelayAngleGrid, rx: &[usize]) -> Result<Self> {
        let scfg = scheme_config(scheme, cfg);
        let combos = combinations(scfg.m, scfg.m_t_r);
        let prebuilt = match scheme {
            Scheme::Full => vec![build_sensing_matrix(
                grid,
                &AllocationPattern::full(&scfg),
                &scfg,
                rx,
                DEFAULT_MATRIX_BUDGET,
            )?],
            Scheme::FixedAdjacent => vec![build_sensing_matrix(
                grid,
                &AllocationPattern::fixed_adjacent(&scfg),
                &scfg,
                rx,
                DEFAULT_MATRIX_BUDGET,
            )?],
            Scheme::FixedRandom => combos
                .iter()
                .map(|c| {
                    let alloc =
                        AllocationPattern::from_radar_sets(scfg.m, vec![c.clone(); scfg.k])?;
                    build_sensing_matrix(grid, &alloc, &scfg, rx, DEFAULT_MATRIX_BUDGET)
                })
                .collect::<Result<Vec<_>>>()?,
            Scheme::Hopping => Vec::new(),
        };
        Ok(SchemeMatrices {
            scheme,
            scfg,
            rx: rx.to_vec(),
            grid: grid.clone(),
            prebuilt,
            combos,
        })
    }

    /// Draws this trial's allocation; returns the matrix by index into the
    /// prebuilt set, or freshly built for the per-slot random scheme.
    fn draw<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(AllocationPattern, Option<usize>, Option<SensingMatrix>)> {
        match self.scheme {
            Scheme::Full => Ok((AllocationPattern::full(&self.scfg), Some(0), None)),
            Scheme::FixedAdjacent => {
                Ok((AllocationPattern::fixed_adjacent(&self.scfg), Some(0), None))
            }
            Scheme::FixedRandom => {
                let i = rng.gen_range(0..self.combos.len());
                let alloc = AllocationPattern::from_radar_sets(
                    self.scfg.m,
                    vec![self.combos[i].clone(); self.scfg.k],
                )?;
                Ok((alloc, Some(i), None))
            }
            Scheme::Hopping => {
                let alloc = AllocationPattern::hopping_random(&self.scfg, rng);
                let mat =
                    build_sensing_matrix(&self.grid, &alloc, &self.scfg, &self.rx, DEFAULT_MATRIX_BUDGET)?;
                Ok((alloc, None, Some(mat)))
            }
        }
    }
}

/// One recovery trial: synthesize the scene echo under this trial's
/// allocation, recover `l_max` entries, and report per-target hits.
fn recovery_trial<R: Rng + ?Sized>(
    mats: &SchemeMatrices,
    scene: &TargetScene,
    sigma2: f64,
    l_max: usize,
    rng: &mut R,
) -> Result<Vec<bool>> {
    let (alloc, idx, fresh) = mats.draw(rng)?;
    let mat = fresh.as_ref().unwrap_or_else(|| &mats.prebuilt[idx.unwrap()]);
    let y = synthesize_echo_window(
        scene, &alloc, &mats.scfg, sigma2, rng, &mats.rx, mat.n0, mat.n1,
    )?;
    let rec = omp_recover(&y, mat, l_max, 0.0)?;
    Ok(hit_test(scene, &rec, &mats.grid))
}

/// Resolution experiment: recovery hit rates for a multi-target scene at
/// radar SNR 0 dB, processed on a single receive element so angular
/// discrimination comes entirely from the transmit pattern.
///
/// Emits `all_hit_rate` (every target recovered) and `target_hit_rate`
/// (mean per-target) per scheme.
pub fn run_resolve(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let cfg = &spec.config;
    let scene = match &spec.scene {
        Some(s) => s.clone(),
        None => builtin_two_target_scene(&builtin_grid(cfg)?),
    };
    // range-gated dictionary: only the delay cells the scene occupies
    let mut taus: Vec<f64> = scene.targets.iter().map(|t| t.tau).collect();
    taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    taus.dedup();
    let grid = DelayAngleGrid::from_delays(cfg, taus, 5 * cfg.m)?;
    let rx = [0usize];
    let mut table = ResultTable::default();
    for scheme in Scheme::ALL {
        let mats = SchemeMatrices::new(scheme, cfg, &grid, &rx)?;
        let sigma2 = mats.scfg.radar_noise_variance(0.0);
        let l_max = scene.targets.len();
        let stream = mix(spec.seed) ^ mix(0x5e50 + scheme as u64);
        let (all, per): (u64, u64) = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(stream ^ mix(t as u64));
                let hits = recovery_trial(&mats, &scene, sigma2, l_max, &mut rng)
                    .expect("trial failed");
                (
                    hits.iter().all(|&h| h) as u64,
                    hits.iter().filter(|&&h| h).count() as u64,
                )
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        table.push(
            0.0,
            scheme.name(),
            "all_hit_rate",
            all as f64 / spec.trials as f64,
            spec.trials,
            spec.seed,
        );
        table.push(
            0.0,
            scheme.name(),
            "target_hit_rate",
            per as f64 / (spec.trials * scene.targets.len()) as f64,
            spec.trials,
            spec.seed,
        );
    }
    Ok(table)
}

/// Anti-clutter experiment: hit rate of the boresight target's angle
/// estimate vs signal-to-clutter ratio, full receive array, two Rayleigh
/// clutter scatterers in the target's delay cell outside the mainlobe,
/// three recovery iterations.
pub fn run_hitrate(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let cfg = &spec.config;
    let grid = builtin_grid(cfg)?;
    let target = Target {
        tau: grid.taus[grid.p_len() / 2],
        vartheta: 0.0,
        alpha: num_complex::Complex64::new(1.0, 0.0),
    };
    let base = TargetScene::new(vec![target]);
    let rx: Vec<usize> = (0..cfg.m).collect();
    let mut table = ResultTable::default();
    for scheme in Scheme::ALL {
        let mats = SchemeMatrices::new(scheme, cfg, &grid, &rx)?;
        let sigma2 = mats.scfg.radar_noise_variance(0.0);
        for &scr_db in &spec.sweep {
            let stream = mix(spec.seed) ^ mix(0xc1 + scheme as u64) ^ mix(scr_db.to_bits());
            let hits: u64 = (0..spec.trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = ChaCha8Rng::seed_from_u64(stream ^ mix(t as u64));
                    let scene = generate_clutter(&base, &mats.scfg, scr_db, &mut rng)
                        .expect("clutter generation");
                    let hit = recovery_trial(&mats, &scene, sigma2, 3, &mut rng)
                        .expect("trial failed");
                    hit[0] as u64
                })
                .sum();
            table.push(
                scr_db,
                scheme.name(),
                "hit_rate",
                hits as f64 / spec.trials as f64,
                spec.trials,
                spec.seed,
            );
        }
    }
    Ok(table)
}

fn comm_modes(cfg: &SystemConfig) -> Result<Vec<(CommMode, CandidateSet)>> {
    let map = CombinationMap::lexicographic(cfg.m, cfg.m_t_c);
    Ok(vec![
        (CommMode::Gsm, CandidateSet::gsm(cfg, &map)?),
        (CommMode::Smx, CandidateSet::smx(cfg)?),
    ])
}

/// Bit-error-rate sweep for the rate-matched GSM and SMX modes.
pub fn run_ber(spec: &ExperimentSpec) -> Result<(ResultTable, Vec<CommPoint>)> {
    run_comm(spec, "ber", |cands, m_r_c, snr_db, n, seed| {
        ber_experiment(cands, m_r_c, snr_db, n, seed)
    })
}

/// Mutual-information sweep for the rate-matched GSM and SMX modes.
pub fn run_mi(spec: &ExperimentSpec) -> Result<(ResultTable, Vec<CommPoint>)> {
    run_comm(spec, "mi_bits", |cands, m_r_c, snr_db, n, seed| {
        mi_estimate(cands, m_r_c, snr_db, n, seed)
    })
}

fn run_comm(
    spec: &ExperimentSpec,
    metric: &str,
    f: impl Fn(&CandidateSet, usize, f64, usize, u64) -> f64,
) -> Result<(ResultTable, Vec<CommPoint>)> {
    spec.validate()?;
    let cfg = &spec.config;
    let mut table = ResultTable::default();
    let mut points = Vec::new();
    for (i, (mode, cands)) in comm_modes(cfg)?.iter().enumerate() {
        for &snr_db in &spec.sweep {
            let seed = spec.seed ^ mix((i as u64) << 32 ^ snr_db.to_bits());
            let value = f(cands, cfg.m_r_c, snr_db, spec.trials, seed);
            table.push(snr_db, mode.name(), metric, value, spec.trials, spec.seed);
            points.push(CommPoint {
                snr_db,
                mode: *mode,
                rate_bits: cands.rate_bits,
                value,
                n_symbols: spec.trials,
                seed: spec.seed,
            });
        }
    }
    Ok((table, points))
}

/// Minimal line-plot SVG for a set of (x, y) series; y may be drawn on a
/// log axis (nonpositive values are dropped there).
pub fn write_svg_plot(
    path: &std::path::Path,
    title: &str,
    series: &[(String, Vec<(f64, f64)>)],
    log_y: bool,
) -> Result<()> {
    let (w, h, ml, mr, mt, mb) = (720.0, 480.0, 70.0, 20.0, 40.0, 50.0);
    let map_y = |y: f64| if log_y { y.log10() } else { y };
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, s)| s.iter().filter(|p| !log_y || p.1 > 0.0).map(|&(x, y)| (x, map_y(y))))
        .collect();
    if pts.is_empty() {
        return Err(Error::InvalidConfig("nothing to plot".into()));
    }
    let (x0, x1) = pts.iter().fold((f64::MAX, f64::MIN), |a, p| (a.0.min(p.0), a.1.max(p.0)));
    let (y0, y1) = pts.iter().fold((f64::MAX, f64::MIN), |a, p| (a.0.min(p.1), a.1.max(p.1)));
    let (xs, ys) = ((x1 - x0).max(1e-12), (y1 - y0).max(1e-12));
    let px = |x: f64| ml + (x - x0) / xs * (w - ml - mr);
    let py = |y: f64| h - mb - (y - y0) / ys * (h - mt - mb);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n\
         <rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n\
         <text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{title}</text>\n\
         <rect x=\"{ml}\" y=\"{mt}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        w / 2.0,
        w - ml - mr,
        h - mt - mb
    );
    for i in 0..=4 {
        let xv = x0 + xs * i as f64 / 4.0;
        let yv = y0 + ys * i as f64 / 4.0;
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{:.3}</text>\n",
            px(xv),
            h - mb + 18.0,
            xv
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
            ml - 6.0,
            py(yv) + 4.0,
            if log_y {
                format!("1e{yv:.2}")
            } else {
                format!("{yv:.3}")
            }
        ));
    }
    for (s, (name, data)) in series.iter().enumerate() {
        let color = colors[s % colors.len()];
        let path_pts: Vec<String> = data
            .iter()
            .filter(|p| !log_y || p.1 > 0.0)
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(map_y(y))))
            .collect();
        if path_pts.is_empty() {
            continue;
        }
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path_pts.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" fill=\"{color}\">{name}</text>\n",
            ml + 10.0,
            mt + 16.0 + 16.0 * s as f64
        ));
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}
