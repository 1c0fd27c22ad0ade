//! Command line driver for the dfrc simulator: runs one experiment per
//! invocation and writes its CSV results (and optional SVG plots) to the
//! output directory.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dfrc::harness::{
    run_beampattern, run_ber, run_hitrate, run_mi, run_resolve, write_comm_csv, write_svg_plot,
    CommPoint, ExperimentKind, ExperimentSpec, ResultTable,
};
use dfrc::radar::TargetScene;
use dfrc::SystemConfig;

#[derive(Parser)]
#[command(name = "dfrc", version, about = "GSM-DFRC link-level simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// System configuration TOML; defaults to the built-in parameter set.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Base seed for all randomness in the run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo trials (or symbols) per sweep point; defaults to the
    /// experiment's standard budget.
    #[arg(long, value_name = "N")]
    trials: Option<usize>,
    /// Output directory (created if missing).
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Also write SVG line plots next to the CSVs.
    #[arg(long)]
    plot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Beam-pattern surfaces and closed-form/Monte-Carlo agreement metrics
    Beampattern(Common),
    /// Two-target angular-resolution experiment
    Resolve {
        #[command(flatten)]
        common: Common,
        /// Scene CSV overriding the built-in two-target scene.
        #[arg(long, value_name = "FILE")]
        scene: Option<PathBuf>,
    },
    /// Hit rate vs clutter-to-signal ratio for all allocation schemes
    Hitrate(Common),
    /// Bit error rate vs SNR for the rate-matched GSM and SMX modes
    Ber(Common),
    /// Mutual information vs SNR for the rate-matched GSM and SMX modes
    Mi(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn build_spec(kind: ExperimentKind, common: &Common) -> dfrc::Result<ExperimentSpec> {
    let config = match &common.config {
        Some(path) => SystemConfig::from_toml_file(path)
            .map_err(|e| dfrc::Error::InvalidConfig(format!("{}: {e}", path.display())))?,
        None => SystemConfig::default(),
    };
    let mut spec = ExperimentSpec::new(kind, config);
    spec.seed = common.seed;
    if let Some(t) = common.trials {
        spec.trials = t;
    }
    spec.validate()?;
    std::fs::create_dir_all(&common.out)?;
    Ok(spec)
}

fn run(cli: Cli) -> dfrc::Result<()> {
    match cli.command {
        Command::Beampattern(common) => {
            let spec = build_spec(ExperimentKind::Beampattern, &common)?;
            let (table, surfaces) = run_beampattern(&spec)?;
            table.write_csv(&common.out.join("beampattern.csv"))?;
            let mut cuts = Vec::new();
            for (scheme, surface) in &surfaces {
                surface.write_csv(&common.out.join(format!("surface_{scheme}.csv")))?;
                // zero-delay cut for the overview plot
                let i_tau = surface.grid.tau_d.len() / 2;
                let cut = surface
                    .grid
                    .f_theta
                    .iter()
                    .enumerate()
                    .map(|(j, &f)| (f, surface.value(i_tau, j).norm()))
                    .collect();
                cuts.push((scheme.clone(), cut));
            }
            if common.plot {
                write_svg_plot(
                    &common.out.join("beampattern.svg"),
                    "normalized pattern at zero delay offset",
                    &cuts,
                    false,
                )?;
            }
            report(&common.out, &["beampattern.csv"])
        }
        Command::Resolve { common, scene } => {
            let mut spec = build_spec(ExperimentKind::Resolve, &common)?;
            if let Some(path) = scene {
                spec.scene = Some(TargetScene::from_file(&path).map_err(|e| {
                    dfrc::Error::InvalidConfig(format!("{}: {e}", path.display()))
                })?);
            }
            let table = run_resolve(&spec)?;
            table.write_csv(&common.out.join("resolve.csv"))?;
            report(&common.out, &["resolve.csv"])
        }
        Command::Hitrate(common) => {
            let spec = build_spec(ExperimentKind::Hitrate, &common)?;
            let table = run_hitrate(&spec)?;
            table.write_csv(&common.out.join("hitrate.csv"))?;
            if common.plot {
                write_svg_plot(
                    &common.out.join("hitrate.svg"),
                    "target hit rate vs SCR (dB)",
                    &table_series(&table, "hit_rate"),
                    false,
                )?;
            }
            report(&common.out, &["hitrate.csv"])
        }
        Command::Ber(common) => {
            let spec = build_spec(ExperimentKind::Ber, &common)?;
            let (table, points) = run_ber(&spec)?;
            table.write_csv(&common.out.join("ber.csv"))?;
            write_comm_csv(&points, "ber", &common.out.join("ber_points.csv"))?;
            if common.plot {
                write_svg_plot(
                    &common.out.join("ber.svg"),
                    "bit error rate vs SNR (dB)",
                    &comm_series(&points),
                    true,
                )?;
            }
            report(&common.out, &["ber.csv", "ber_points.csv"])
        }
        Command::Mi(common) => {
            let spec = build_spec(ExperimentKind::Mi, &common)?;
            let (table, points) = run_mi(&spec)?;
            table.write_csv(&common.out.join("mi.csv"))?;
            write_comm_csv(&points, "mi_bits", &common.out.join("mi_points.csv"))?;
            if common.plot {
                write_svg_plot(
                    &common.out.join("mi.svg"),
                    "mutual information (bits) vs SNR (dB)",
                    &comm_series(&points),
                    false,
                )?;
            }
            report(&common.out, &["mi.csv", "mi_points.csv"])
        }
    }
}

/// One (x, y) series per scheme for the given metric.
fn table_series(table: &ResultTable, metric: &str) -> Vec<(String, Vec<(f64, f64)>)> {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for row in &table.rows {
        if row.metric != metric {
            continue;
        }
        match series.iter_mut().find(|(name, _)| *name == row.scheme) {
            Some((_, s)) => s.push((row.sweep_value, row.value)),
            None => series.push((row.scheme.clone(), vec![(row.sweep_value, row.value)])),
        }
    }
    series
}

/// One (x, y) series per communication mode.
fn comm_series(points: &[CommPoint]) -> Vec<(String, Vec<(f64, f64)>)> {
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for p in points {
        let name = p.mode.name().to_string();
        match series.iter_mut().find(|(n, _)| *n == name) {
            Some((_, s)) => s.push((p.snr_db, p.value)),
            None => series.push((name, vec![(p.snr_db, p.value)])),
        }
    }
    series
}

fn report(out: &Path, files: &[&str]) -> dfrc::Result<()> {
    for f in files {
        println!("wrote {}", out.join(f).display());
    }
    Ok(())
}
