//! The `locent` command line: `point`, `map`, `verify` and `models`.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Axis, Mode, Model, RunConfig};
use crate::entanglement::{report, EntanglementReport, MeasurementRegion, ReportOptions, Validity};
use crate::error::{Error, Result};
use crate::oracle::{compare, normalization_constant, ComparisonReport};

/// CSV header of map output.
pub const MAP_HEADER: [&str; 8] = ["axis1", "axis2", "prob_density", "eps", "E_D", "E_ND", "p_ab", "validity"];

#[derive(Debug, Parser)]
#[command(name = "locent", version, about = "Local entanglement of continuous-variable wavefunctions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads; 0 picks automatically.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entanglement report at one point, as JSON.
    Point(IoArgs),
    /// Sweep over one or two coordinates, as CSV.
    Map(IoArgs),
    /// Closed forms against the numerical reduced density matrix.
    Verify(IoArgs),
    /// List the built-in model families.
    Models,
}

#[derive(Debug, Args)]
pub struct IoArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; standard output when omitted and the config names none.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointOutput {
    pub model: String,
    pub region: MeasurementRegion,
    pub report: EntanglementReport,
}

/// Point report plus exit code: 0 when valid, 2 when a cutoff applied.
pub fn run_point(cfg: &RunConfig) -> Result<(PointOutput, i32)> {
    check_mode(cfg, Mode::Point)?;
    let model = cfg.model.build(&cfg.units)?;
    let region = cfg.region.build(&model, cfg.region.center(&model))?;
    let opts = ReportOptions {
        sigma: cfg.region.sigma,
        with_probability: model.state.normalization() != crate::state::Normalization::Unnormalizable,
        ..ReportOptions::default()
    };
    let rep = report(&*model.state, &region, &opts)?;
    let code = if rep.validity == Validity::Valid { 0 } else { 2 };
    Ok((
        PointOutput {
            model: model.state.name(),
            region,
            report: rep,
        },
        code,
    ))
}

/// One map cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapCell {
    pub axis1: f64,
    pub axis2: Option<f64>,
    pub prob_density: f64,
    pub eps: f64,
    pub entropy_d: f64,
    pub entropy_nd: f64,
    pub p_ab: f64,
    /// `valid`, `near_node_cutoff`, `invalid_region_too_large` or `error`.
    pub validity: String,
}

/// Cells in row-major order, the first axis varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementMap {
    pub axes: Vec<Axis>,
    pub cells: Vec<MapCell>,
}

fn validity_name(v: Validity) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|s| s.as_str().map(str::to_owned))
        .unwrap_or_default()
}

pub fn run_map(cfg: &RunConfig) -> Result<EntanglementMap> {
    check_mode(cfg, Mode::Map)?;
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("map needs a `sweep` block".into()))?;
    if sweep.axes.is_empty() || sweep.axes.len() > 2 {
        return Err(Error::Config("sweep needs one or two axes".into()));
    }
    let model = cfg.model.build(&cfg.units)?;
    let base = cfg.region.center(&model);
    let first = sweep.axes[0].values()?;
    let second = match sweep.axes.get(1) {
        Some(a) => a.values()?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    let grid: Vec<(f64, Option<f64>)> = first
        .iter()
        .flat_map(|&x| second.iter().map(move |&y| (x, y)))
        .collect();
    let norm = normalization_constant(&*model.state).ok();
    let opts = ReportOptions {
        sigma: cfg.region.sigma,
        with_probability: true,
        with_lambda3: false,
        probability_order: None,
    };
    // surface configuration mistakes before the sweep
    let mut probe = base.clone();
    for (axis, v) in sweep.axes.iter().zip([Some(grid[0].0), grid[0].1]) {
        axis.coord.apply(&mut probe, v.unwrap_or(0.0), model.masses)?;
    }
    cfg.region.build(&model, probe)?;

    let cells = grid
        .par_iter()
        .map(|&(x, y)| cell(cfg, &model, &base, &sweep.axes, x, y, norm, &opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(EntanglementMap {
        axes: sweep.axes.clone(),
        cells,
    })
}

#[allow(clippy::too_many_arguments)]
fn cell(
    cfg: &RunConfig,
    model: &Model,
    base: &crate::state::ConfigPoint,
    axes: &[Axis],
    x: f64,
    y: Option<f64>,
    norm: Option<f64>,
    opts: &ReportOptions,
) -> Result<MapCell> {
    let mut point = base.clone();
    axes[0].coord.apply(&mut point, x, model.masses)?;
    if let (Some(axis), Some(y)) = (axes.get(1), y) {
        axis.coord.apply(&mut point, y, model.masses)?;
    }
    let density = model
        .state
        .amplitude(&point)
        .map(|z| z.norm_sqr() / norm.unwrap_or(1.0))
        .unwrap_or(f64::NAN);
    let region = cfg.region.build(model, point)?;
    Ok(match report(&*model.state, &region, opts) {
        Ok(r) => MapCell {
            axis1: x,
            axis2: y,
            prob_density: density,
            eps: r.epsilon,
            entropy_d: r.entropy_d,
            entropy_nd: r.entropy_nd.unwrap_or(f64::NAN),
            p_ab: r.p_ab.unwrap_or(f64::NAN),
            validity: validity_name(r.validity),
        },
        Err(_) => MapCell {
            axis1: x,
            axis2: y,
            prob_density: density,
            eps: f64::NAN,
            entropy_d: f64::NAN,
            entropy_nd: f64::NAN,
            p_ab: f64::NAN,
            validity: "error".into(),
        },
    })
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes the map as CSV with fixed 17-significant-digit formatting.
pub fn write_map_csv(map: &EntanglementMap, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MAP_HEADER)?;
    for c in &map.cells {
        w.write_record([
            num(c.axis1),
            c.axis2.map(num).unwrap_or_default(),
            num(c.prob_density),
            num(c.eps),
            num(c.entropy_d),
            num(c.entropy_nd),
            num(c.p_ab),
            c.validity.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Ladder comparisons at each requested centre; exit code 0 iff all pass.
pub fn run_verify(cfg: &RunConfig) -> Result<(Vec<ComparisonReport>, i32)> {
    check_mode(cfg, Mode::Verify)?;
    let model = cfg.model.build(&cfg.units)?;
    let centers = if cfg.verify.points.is_empty() {
        vec![cfg.region.center(&model)]
    } else {
        cfg.verify.points.clone()
    };
    let mut options = cfg.verify.options.clone();
    options.sigma = cfg.region.sigma;
    let reports = centers
        .into_iter()
        .map(|c| {
            let region = cfg.region.build(&model, c)?;
            compare(&*model.state, &region, &options)
        })
        .collect::<Result<Vec<_>>>()?;
    let code = if reports.iter().all(|r| r.passed) { 0 } else { 2 };
    Ok((reports, code))
}

/// Text listing of the model families and their parameters.
pub fn models_text() -> String {
    [
        "coupled_oscillator  n_com, n_rel, mass_a=1, mass_b=1, omega [+ spring] | r_com + r_rel",
        "hydrogen            n, l, m, mass_a=1, mass_b=1836.15..., com={kind: plane_wave|gaussian_packet|oscillator}",
        "gaussian            dim_a, dim_b, a (symmetric matrix), a_imag?, center?",
        "two_mode            alpha, beta, gamma",
        "product             alice, bob: [{kind: gaussian|plane_wave|oscillator, ...}]",
        "normal_modes        dim_a, masses, hessian, quanta?",
        "wkb                 potential={kind: harmonic|morse|tanh_well|linear|tabulated}, energy, mass=1, domain",
    ]
    .join("\n")
        + "\n"
}

fn check_mode(cfg: &RunConfig, want: Mode) -> Result<()> {
    match cfg.mode {
        Some(m) if m != want => Err(Error::Config(format!(
            "config declares mode {m:?} but the {want:?} subcommand was run"
        ))),
        _ => Ok(()),
    }
}

fn sink(path: Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn execute(cli: Cli) -> Result<i32> {
    if cli.threads > 0 {
        // a second initialisation in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    match cli.command {
        Command::Models => {
            print!("{}", models_text());
            Ok(0)
        }
        Command::Point(io) => {
            let cfg = RunConfig::load(&io.config)?;
            let (out, code) = run_point(&cfg)?;
            let mut w = sink(io.out.or(cfg.output.path))?;
            serde_json::to_writer_pretty(&mut w, &out)?;
            writeln!(w)?;
            Ok(code)
        }
        Command::Map(io) => {
            let cfg = RunConfig::load(&io.config)?;
            let map = run_map(&cfg)?;
            write_map_csv(&map, sink(io.out.or(cfg.output.path))?)?;
            Ok(0)
        }
        Command::Verify(io) => {
            let cfg = RunConfig::load(&io.config)?;
            let (reports, code) = run_verify(&cfg)?;
            let mut w = sink(io.out.or(cfg.output.path))?;
            serde_json::to_writer_pretty(&mut w, &reports)?;
            writeln!(w)?;
            Ok(code)
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("locent: {e}");
            1
        }
    }
}
