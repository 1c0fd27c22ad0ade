//! Python bindings: `SystemConfig` and `TargetScene` wrappers, the five
//! experiment drivers, and the core encode/recover operations.
//!
//! Experiment results come back as lists of plain dicts mirroring the CSV
//! column layout, so they drop straight into pandas via `DataFrame(rows)`.

use dfrc::alloc::{AllocationPattern, CombinationMap, Scheme};
use dfrc::beampattern as bp;
use dfrc::harness::{
    run_beampattern, run_ber, run_hitrate, run_mi, run_resolve, ExperimentKind, ExperimentSpec,
    ResultTable,
};
use dfrc::radar::{
    build_sensing_matrix, default_epsilon, hit_test, omp_recover, synthesize_echo_window,
    DelayAngleGrid, Target, TargetScene, DEFAULT_MATRIX_BUDGET,
};
use dfrc::waveform::{gsm_decode, gsm_encode, GsmSymbol};
use dfrc::SystemConfig;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn to_py_err(e: dfrc::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Validated system parameter set; unspecified fields take the standard
/// experiment defaults.
#[pyclass(name = "SystemConfig", from_py_object)]
#[derive(Clone)]
struct PySystemConfig {
    inner: SystemConfig,
}

#[pymethods]
impl PySystemConfig {
    #[new]
    #[pyo3(signature = (*, m=None, m_t_r=None, m_t_c=None, k=None, t_c=None, t_r=None,
        t_pri=None, b_r=None, f_s=None, f_c=None, d_over_lambda=None, j=None,
        m_r_c=None, theta_t=None, comm_chip_scale=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        m: Option<usize>,
        m_t_r: Option<usize>,
        m_t_c: Option<usize>,
        k: Option<usize>,
        t_c: Option<f64>,
        t_r: Option<f64>,
        t_pri: Option<f64>,
        b_r: Option<f64>,
        f_s: Option<f64>,
        f_c: Option<f64>,
        d_over_lambda: Option<f64>,
        j: Option<usize>,
        m_r_c: Option<usize>,
        theta_t: Option<f64>,
        comm_chip_scale: Option<f64>,
    ) -> PyResult<Self> {
        let d = SystemConfig::default();
        let cfg = SystemConfig {
            m: m.unwrap_or(d.m),
            m_t_r: m_t_r.unwrap_or(d.m_t_r),
            m_t_c: m_t_c.unwrap_or(d.m_t_c),
            k: k.unwrap_or(d.k),
            t_c: t_c.unwrap_or(d.t_c),
            t_r: t_r.unwrap_or(d.t_r),
            t_pri: t_pri.unwrap_or(d.t_pri),
            b_r: b_r.unwrap_or(d.b_r),
            f_s: f_s.unwrap_or(d.f_s),
            f_c: f_c.unwrap_or(d.f_c),
            d_over_lambda: d_over_lambda.unwrap_or(d.d_over_lambda),
            j: j.unwrap_or(d.j),
            m_r_c: m_r_c.unwrap_or(d.m_r_c),
            theta_t: theta_t.unwrap_or(d.theta_t),
            comm_chip_scale: comm_chip_scale.unwrap_or(d.comm_chip_scale),
        };
        Ok(PySystemConfig {
            inner: cfg.validate().map_err(to_py_err)?,
        })
    }

    /// Loads and validates a TOML configuration file.
    #[staticmethod]
    fn from_toml(path: &str) -> PyResult<Self> {
        Ok(PySystemConfig {
            inner: SystemConfig::from_toml_file(path.as_ref()).map_err(to_py_err)?,
        })
    }

    /// Full-array radar-only variant of this configuration.
    fn radar_only(&self) -> Self {
        PySystemConfig {
            inner: self.inner.radar_only(),
        }
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }
    #[getter]
    fn m_t_r(&self) -> usize {
        self.inner.m_t_r
    }
    #[getter]
    fn m_t_c(&self) -> usize {
        self.inner.m_t_c
    }
    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }
    #[getter]
    fn j(&self) -> usize {
        self.inner.j
    }
    #[getter]
    fn m_r_c(&self) -> usize {
        self.inner.m_r_c
    }
    #[getter]
    fn t_c(&self) -> f64 {
        self.inner.t_c
    }
    #[getter]
    fn t_r(&self) -> f64 {
        self.inner.t_r
    }
    #[getter]
    fn t_pri(&self) -> f64 {
        self.inner.t_pri
    }
    #[getter]
    fn b_r(&self) -> f64 {
        self.inner.b_r
    }
    #[getter]
    fn f_s(&self) -> f64 {
        self.inner.f_s
    }
    #[getter]
    fn f_c(&self) -> f64 {
        self.inner.f_c
    }
    #[getter]
    fn d_over_lambda(&self) -> f64 {
        self.inner.d_over_lambda
    }
    #[getter]
    fn theta_t(&self) -> f64 {
        self.inner.theta_t
    }
    #[getter]
    fn comm_chip_scale(&self) -> f64 {
        self.inner.comm_chip_scale
    }

    /// Samples per pulse.
    #[getter]
    fn n_r(&self) -> usize {
        self.inner.n_r()
    }
    /// Samples per slot.
    #[getter]
    fn n_c(&self) -> usize {
        self.inner.n_c()
    }
    /// Samples in the echo receive window.
    #[getter]
    fn n_rec(&self) -> usize {
        self.inner.n_rec()
    }
    /// Uncoded bits per GSM symbol.
    #[getter]
    fn rate_bits(&self) -> usize {
        self.inner.rate_bits()
    }

    fn __repr__(&self) -> String {
        let c = &self.inner;
        format!(
            "SystemConfig(m={}, m_t_r={}, m_t_c={}, k={}, j={}, m_r_c={})",
            c.m, c.m_t_r, c.m_t_c, c.k, c.j, c.m_r_c
        )
    }
}

/// Point-scatterer scene: a list of (delay_s, angle_rad, amplitude).
#[pyclass(name = "TargetScene", from_py_object)]
#[derive(Clone)]
struct PyTargetScene {
    inner: TargetScene,
}

#[pymethods]
impl PyTargetScene {
    #[new]
    fn new(targets: Vec<(f64, f64, Complex64)>) -> Self {
        PyTargetScene {
            inner: TargetScene::new(
                targets
                    .into_iter()
                    .map(|(tau, vartheta, alpha)| Target {
                        tau,
                        vartheta,
                        alpha,
                    })
                    .collect(),
            ),
        }
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        Ok(PyTargetScene {
            inner: TargetScene::from_file(path.as_ref()).map_err(to_py_err)?,
        })
    }

    fn write_file(&self, path: &str) -> PyResult<()> {
        self.inner.write_file(path.as_ref()).map_err(to_py_err)
    }

    #[getter]
    fn targets(&self) -> Vec<(f64, f64, Complex64)> {
        self.inner
            .targets
            .iter()
            .map(|t| (t.tau, t.vartheta, t.alpha))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.targets.len()
    }
}

fn rows_to_py<'py>(py: Python<'py>, table: &ResultTable) -> PyResult<Vec<Bound<'py, PyDict>>> {
    table
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("sweep_value", r.sweep_value)?;
            d.set_item("scheme", &r.scheme)?;
            d.set_item("metric", &r.metric)?;
            d.set_item("value", r.value)?;
            d.set_item("trials", r.trials)?;
            d.set_item("seed", r.seed)?;
            Ok(d)
        })
        .collect()
}

fn spec_with(
    kind: ExperimentKind,
    cfg: &PySystemConfig,
    trials: Option<usize>,
    seed: u64,
    sweep: Option<Vec<f64>>,
) -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(kind, cfg.inner.clone());
    if let Some(t) = trials {
        spec.trials = t;
    }
    if let Some(s) = sweep {
        spec.sweep = s;
    }
    spec.seed = seed;
    spec
}

/// Beam-pattern campaign: returns (rows, surfaces) where surfaces maps each
/// scheme to (tau_d, f_theta, magnitudes[i_tau][i_f]) of one realization.
#[pyfunction]
#[pyo3(signature = (cfg, trials=None, seed=0))]
fn beampattern<'py>(
    py: Python<'py>,
    cfg: &PySystemConfig,
    trials: Option<usize>,
    seed: u64,
) -> PyResult<(Vec<Bound<'py, PyDict>>, Bound<'py, PyDict>)> {
    let spec = spec_with(ExperimentKind::Beampattern, cfg, trials, seed, None);
    let (table, surfaces) = py
        .detach(|| run_beampattern(&spec))
        .map_err(to_py_err)?;
    let out = PyDict::new(py);
    for (scheme, s) in &surfaces {
        let n_f = s.grid.f_theta.len();
        let mags: Vec<Vec<f64>> = s
            .magnitudes()
            .chunks(n_f)
            .map(|row| row.to_vec())
            .collect();
        out.set_item(scheme, (s.grid.tau_d.clone(), s.grid.f_theta.clone(), mags))?;
    }
    Ok((rows_to_py(py, &table)?, out))
}

/// Two-target resolution experiment; `scene` overrides the builtin pair.
#[pyfunction]
#[pyo3(signature = (cfg, trials=None, seed=0, scene=None))]
fn resolve<'py>(
    py: Python<'py>,
    cfg: &PySystemConfig,
    trials: Option<usize>,
    seed: u64,
    scene: Option<PyTargetScene>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut spec = spec_with(ExperimentKind::Resolve, cfg, trials, seed, None);
    spec.scene = scene.map(|s| s.inner);
    let table = py.detach(|| run_resolve(&spec)).map_err(to_py_err)?;
    rows_to_py(py, &table)
}

/// Hit rate under clutter, swept over SCR (dB).
#[pyfunction]
#[pyo3(signature = (cfg, trials=None, seed=0, scr_db=None))]
fn hitrate<'py>(
    py: Python<'py>,
    cfg: &PySystemConfig,
    trials: Option<usize>,
    seed: u64,
    scr_db: Option<Vec<f64>>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let spec = spec_with(ExperimentKind::Hitrate, cfg, trials, seed, scr_db);
    let table = py.detach(|| run_hitrate(&spec)).map_err(to_py_err)?;
    rows_to_py(py, &table)
}

/// Bit error rate of the rate-matched GSM and SMX modes over SNR (dB).
#[pyfunction]
#[pyo3(signature = (cfg, symbols=None, seed=0, snr_db=None))]
fn ber<'py>(
    py: Python<'py>,
    cfg: &PySystemConfig,
    symbols: Option<usize>,
    seed: u64,
    snr_db: Option<Vec<f64>>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let spec = spec_with(ExperimentKind::Ber, cfg, symbols, seed, snr_db);
    let table = py.detach(|| run_ber(&spec)).map_err(to_py_err)?.0;
    rows_to_py(py, &table)
}

/// Mutual information of the rate-matched GSM and SMX modes over SNR (dB).
#[pyfunction]
#[pyo3(signature = (cfg, symbols=None, seed=0, snr_db=None))]
fn mi<'py>(
    py: Python<'py>,
    cfg: &PySystemConfig,
    symbols: Option<usize>,
    seed: u64,
    snr_db: Option<Vec<f64>>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let spec = spec_with(ExperimentKind::Mi, cfg, symbols, seed, snr_db);
    let table = py.detach(|| run_mi(&spec)).map_err(to_py_err)?.0;
    rows_to_py(py, &table)
}

/// Encodes a bit list into GSM symbols: [(comm_elements, psk_points), ...].
#[pyfunction]
fn gsm_encode_bits(
    cfg: &PySystemConfig,
    bits: Vec<u8>,
) -> PyResult<Vec<(Vec<usize>, Vec<Complex64>)>> {
    let map = CombinationMap::lexicographic(cfg.inner.m, cfg.inner.m_t_c);
    let symbols = gsm_encode(&bits, &cfg.inner, &map).map_err(to_py_err)?;
    Ok(symbols
        .into_iter()
        .map(|s| (s.comm_elements, s.symbols))
        .collect())
}

/// Inverse of `gsm_encode_bits` for noise-free symbols.
#[pyfunction]
fn gsm_decode_symbols(
    cfg: &PySystemConfig,
    symbols: Vec<(Vec<usize>, Vec<Complex64>)>,
) -> PyResult<Vec<u32>> {
    let map = CombinationMap::lexicographic(cfg.inner.m, cfg.inner.m_t_c);
    let syms: Vec<GsmSymbol> = symbols
        .into_iter()
        .map(|(comm_elements, symbols)| GsmSymbol {
            comm_elements,
            symbols,
        })
        .collect();
    Ok(gsm_decode(&syms, &cfg.inner, &map)
        .map_err(to_py_err)?
        .into_iter()
        .map(u32::from)
        .collect())
}

/// Single synthesize-and-recover trial: builds a range-gated dictionary on
/// the scene's delay cells, synthesizes the noisy echo for the given
/// allocation scheme, and runs OMP. Returns recovered entries, the residual
/// history, and per-target hit flags.
#[pyfunction]
#[pyo3(signature = (cfg, scene, scheme="hopping", seed=0, sigma2=None, l=None))]
fn recover_scene<'py>(
    py: Python<'py>,
    cfg: &PySystemConfig,
    scene: &PyTargetScene,
    scheme: &str,
    seed: u64,
    sigma2: Option<f64>,
    l: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let scheme =
        Scheme::from_name(scheme).ok_or_else(|| PyValueError::new_err("unknown scheme"))?;
    let cfg = match scheme {
        Scheme::Full => cfg.inner.radar_only(),
        _ => cfg.inner.clone(),
    };
    if scene.inner.targets.is_empty() {
        return Err(PyValueError::new_err("scene has no targets"));
    }
    let mut taus: Vec<f64> = scene.inner.targets.iter().map(|t| t.tau).collect();
    taus.sort_by(f64::total_cmp);
    taus.dedup();
    let result: dfrc::Result<_> = py.detach(|| {
        let grid = DelayAngleGrid::from_delays(&cfg, taus, 5 * cfg.m)?;
        let rx: Vec<usize> = (0..cfg.m).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alloc = AllocationPattern::for_scheme(scheme, &cfg, &mut rng);
        let a = build_sensing_matrix(&grid, &alloc, &cfg, &rx, DEFAULT_MATRIX_BUDGET)?;
        let sigma2 = sigma2.unwrap_or(0.0);
        let y = synthesize_echo_window(
            &scene.inner,
            &alloc,
            &cfg,
            sigma2,
            &mut rng,
            &rx,
            a.n0,
            a.n1,
        )?;
        let l_max = l.unwrap_or(scene.inner.targets.len());
        let eps = if sigma2 > 0.0 {
            default_epsilon(sigma2, a.rows())
        } else {
            0.0
        };
        let rec = omp_recover(&y, &a, l_max, eps)?;
        let hits = hit_test(&scene.inner, &rec, &grid);
        Ok((rec, hits))
    });
    let (rec, hits) = result.map_err(to_py_err)?;
    let out = PyDict::new(py);
    let entries: Vec<Bound<'py, PyDict>> = rec
        .entries
        .iter()
        .map(|e| {
            let d = PyDict::new(py);
            d.set_item("p", e.p)?;
            d.set_item("q", e.q)?;
            d.set_item("tau", e.tau)?;
            d.set_item("vartheta", e.vartheta)?;
            d.set_item("amplitude", e.amplitude)?;
            Ok(d)
        })
        .collect::<PyResult<_>>()?;
    out.set_item("entries", entries)?;
    out.set_item("residual_history", rec.residual_history)?;
    out.set_item("hits", hits)?;
    Ok(out)
}

/// Closed-form full-array beam pattern (unnormalized magnitude).
#[pyfunction]
fn full_closed(cfg: &PySystemConfig, tau_d: f64, f_theta: f64) -> f64 {
    bp::full_closed(&cfg.inner, tau_d, f_theta)
}

/// Closed-form expected pattern of the per-slot random allocation.
#[pyfunction]
fn expected_closed(cfg: &PySystemConfig, tau_d: f64, f_theta: f64) -> f64 {
    bp::expected_closed(&cfg.inner, tau_d, f_theta)
}

/// Closed-form variance of the peak-normalized pattern; `per_pulse` selects
/// the one-subset-per-pulse ensemble instead of per-slot hopping.
#[pyfunction]
#[pyo3(signature = (cfg, tau_d, f_theta, per_pulse=false))]
fn variance_closed(cfg: &PySystemConfig, tau_d: f64, f_theta: f64, per_pulse: bool) -> f64 {
    let ensemble = if per_pulse {
        bp::RandomEnsemble::PerPulse
    } else {
        bp::RandomEnsemble::PerSlot
    };
    bp::variance_closed(&cfg.inner, ensemble, tau_d, f_theta)
}

/// Names of the four allocation schemes, in plotting order.
#[pyfunction]
fn scheme_names() -> Vec<&'static str> {
    Scheme::ALL.iter().map(|s| s.name()).collect()
}

#[pymodule]
fn dfrc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemConfig>()?;
    m.add_class::<PyTargetScene>()?;
    m.add_function(wrap_pyfunction!(beampattern, m)?)?;
    m.add_function(wrap_pyfunction!(resolve, m)?)?;
    m.add_function(wrap_pyfunction!(hitrate, m)?)?;
    m.add_function(wrap_pyfunction!(ber, m)?)?;
    m.add_function(wrap_pyfunction!(mi, m)?)?;
    m.add_function(wrap_pyfunction!(gsm_encode_bits, m)?)?;
    m.add_function(wrap_pyfunction!(gsm_decode_symbols, m)?)?;
    m.add_function(wrap_pyfunction!(recover_scene, m)?)?;
    m.add_function(wrap_pyfunction!(full_closed, m)?)?;
    m.add_function(wrap_pyfunction!(expected_closed, m)?)?;
    m.add_function(wrap_pyfunction!(variance_closed, m)?)?;
    m.add_function(wrap_pyfunction!(scheme_names, m)?)?;
    Ok(())
}
