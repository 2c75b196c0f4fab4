//! The `photonmix` command line: scenario loading, the five subcommands and
//! their CSV output.

pub mod config;
pub mod csv;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{load_scenario, parse_scenario, ScanSpec, Scenario};
pub use csv::{measurement_table, parse_measurement, CsvTable};

use crate::aperture::{hom_metrics, Integrator};
use crate::error::{Error, Result};
use crate::profiling::{reconstruct, synthesize_array, synthesize_array_with_pedestal};
use crate::quantum::{w2_point_general, w2_point_symmetric, LoState, Point};
use config::linspace;

/// |alpha|^2 at which the visibility command normalizes the dip depth to 1.
pub const DEPTH_REFERENCE_ALPHA_SQ: f64 = 4.5;

#[derive(Debug, Parser)]
#[command(name = "photonmix", version, about = "Single-photon / local-oscillator correlation simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct CommonArgs {
    /// Scenario file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand, Clone)]
pub enum Command {
    /// Fixed point aperture at detector 1, scanned point aperture at detector 2.
    PointScan(CommonArgs),
    /// Integrated correlation versus photon-mode displacement.
    Misalignment(CommonArgs),
    /// HOM visibility and depth versus coherent-state intensity.
    Visibility(CommonArgs),
    /// Synthesize detector-array heterodyne correlations.
    Array(CommonArgs),
    /// Reconstruct the photon profile from an array measurement.
    Reconstruct {
        #[command(flatten)]
        common: CommonArgs,
        /// Measurement CSV written by `photonmix array`.
        #[arg(long)]
        input: PathBuf,
    },
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::PointScan(c) | Command::Misalignment(c) | Command::Visibility(c) | Command::Array(c) => c,
            Command::Reconstruct { common, .. } => common,
        }
    }
}

/// Execute a parsed command and return the CSV text it produces.
pub fn run(command: &Command) -> Result<String> {
    let common = command.common();
    let mut scenario = load_scenario(&common.config)?;
    if let Some(seed) = common.seed {
        scenario.seed = seed;
    }
    let integrator = Integrator::from_env()?;
    let table = match command {
        Command::PointScan(_) => cmd_point_scan(&scenario)?,
        Command::Misalignment(_) => cmd_misalignment(&scenario, &integrator)?,
        Command::Visibility(_) => cmd_visibility(&scenario, &integrator)?,
        Command::Array(_) => cmd_array(&scenario)?,
        Command::Reconstruct { input, .. } => {
            let text = std::fs::read_to_string(input)
                .map_err(|e| Error::config(None, format!("cannot read {}: {e}", input.display())))?;
            cmd_reconstruct(&text, &scenario)?
        }
    };
    Ok(table.render())
}

/// Run and write the output, returning the process exit status.
pub fn main_with(cli: Cli) -> i32 {
    let result = run(&cli.command).and_then(|text| match &cli.command.common().out {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("photonmix: {e}");
            e.exit_code()
        }
    }
}

fn scan_values(scenario: &Scenario, parameter: &str, default: ScanSpec) -> Result<Vec<f64>> {
    match &scenario.scan {
        None => Ok(default.values()),
        Some(s) if s.parameter.is_empty() || s.parameter == parameter => Ok(s.values()),
        Some(s) => Err(Error::config(
            None,
            format!("`scan.parameter` is `{}` but this command scans `{parameter}`", s.parameter),
        )),
    }
}

fn lo_description(lo: &LoState) -> String {
    match lo {
        LoState::Fock(n) => format!("fock n={n}"),
        LoState::Coherent(a) => format!("coherent alpha={}{:+}i", a.re, a.im),
    }
}

fn describe(t: &mut CsvTable, command: &str, s: &Scenario) {
    let m = |m: &crate::modes::TransverseMode| {
        format!(
            "TEM{}{} w0={} center=({}, {})",
            m.order_x, m.order_y, m.waist, m.center_x, m.center_y
        )
    };
    t.meta("photonmix", command)
        .meta("lo_state", lo_description(&s.lo_state))
        .meta("lo_mode", m(&s.lo_mode))
        .meta("photon_mode", m(&s.photon_mode));
}

/// Detector 1 fixed, detector 2 scanned along x: `x2, lo_term, het_term, total`.
pub fn cmd_point_scan(s: &Scenario) -> Result<CsvTable> {
    let r1 = match s.detector1.shape {
        crate::aperture::DetectorShape::Point { x, y, .. } => Point::new(x, y),
        _ => return Err(Error::config(None, "point-scan needs `detector1.kind = point`")),
    };
    let y2 = s.detector2.position().y;
    let xs = scan_values(s, "x2", ScanSpec::new("x2", -3.0, 3.0, 121))?;

    let mut t = CsvTable::new(&["x2", "lo_term", "het_term", "total"]);
    describe(&mut t, "point-scan", s);
    let mut prefactor = 0.0;
    for x2 in xs {
        let r2 = Point::new(x2, y2);
        let res = if s.symmetric_bs {
            w2_point_symmetric(&s.lo_state, &s.lo_mode, &s.photon_mode, r1, r2, &s.units)?
        } else {
            w2_point_general(&s.beam_splitter, &s.lo_state, &s.lo_mode, &s.photon_mode, r1, r2, &s.units)?
        };
        prefactor = res.prefactor;
        t.push(vec![x2, res.lo_term, res.het_term, res.total_reduced]);
    }
    t.meta("beam_splitter", if s.symmetric_bs { "symmetric" } else { "custom" })
        .meta("x1", csv::fmt_num(r1.x))
        .meta("y1", csv::fmt_num(r1.y))
        .meta("y2", csv::fmt_num(y2))
        .meta("physical_prefactor", csv::fmt_num(prefactor));
    Ok(t)
}

/// Integrated correlation versus photon displacement: `x_d, total`.
pub fn cmd_misalignment(s: &Scenario, integrator: &Integrator) -> Result<CsvTable> {
    let d = s.misalignment_half_width();
    let xs = scan_values(s, "x_d", ScanSpec::new("x_d", -14.0, 14.0, 141))?;
    let curve = integrator.misalignment_scan(&s.lo_state, &s.lo_mode, &s.photon_mode, d, &xs)?;
    let mut t = CsvTable::new(&["x_d", "total"]);
    describe(&mut t, "misalignment", s);
    t.meta("window_half_width", csv::fmt_num(d))
        .meta("quadrature_order", integrator.order());
    for (x, v) in curve.totals() {
        t.push(vec![x, v]);
    }
    Ok(t)
}

/// Visibility and normalized depth over an |alpha|^2 sweep:
/// `alpha_sq, visibility, depth`. A Fock LO yields a single row keyed by `<n>`.
pub fn cmd_visibility(s: &Scenario, integrator: &Integrator) -> Result<CsvTable> {
    let v = &s.visibility;
    let displacements = linspace(-v.displacement_max, v.displacement_max, v.displacement_count);
    let metrics = |lo: &LoState| -> Result<crate::aperture::HomMetrics> {
        let curve = integrator.misalignment_scan(lo, &s.lo_mode, &s.photon_mode, v.half_width, &displacements)?;
        hom_metrics(&curve)
    };
    let reference = metrics(&LoState::coherent_with_intensity(DEPTH_REFERENCE_ALPHA_SQ)?)?.depth;
    if reference <= 0.0 {
        return Err(Error::NumericalDomain("reference dip depth is not positive".into()));
    }

    let mut t = CsvTable::new(&["alpha_sq", "visibility", "depth"]);
    describe(&mut t, "visibility", s);
    t.meta("window_half_width", csv::fmt_num(v.half_width))
        .meta("depth_reference_alpha_sq", DEPTH_REFERENCE_ALPHA_SQ)
        .meta("quadrature_order", integrator.order());
    match s.lo_state {
        LoState::Fock(_) => {
            let m = metrics(&s.lo_state)?;
            t.push(vec![s.lo_state.mean_photons(), m.visibility, m.depth / reference]);
        }
        LoState::Coherent(_) => {
            let grid = scan_values(s, "alpha_sq", ScanSpec::new("alpha_sq", 0.25, 5.0, 20))?;
            for a2 in grid {
                if !(a2 > 0.0) {
                    return Err(Error::config(None, format!("`scan` values must be positive |alpha|^2, got {a2}")));
                }
                let m = metrics(&LoState::coherent_with_intensity(a2)?)?;
                t.push(vec![a2, m.visibility, m.depth / reference]);
            }
        }
    }
    Ok(t)
}

fn array_points(s: &Scenario) -> Result<Vec<Point>> {
    Ok(scan_values(s, "x_m", ScanSpec::new("x_m", -3.0, 3.0, 64))?
        .into_iter()
        .map(|x| Point::new(x, s.array.y))
        .collect())
}

/// Synthesized detector-array data: `x_m, y_m, w2m[, pedestal]`.
pub fn cmd_array(s: &Scenario) -> Result<CsvTable> {
    let points = array_points(s)?;
    let synth = if s.array.pedestal {
        synthesize_array_with_pedestal
    } else {
        synthesize_array
    };
    let meas = synth(
        &s.lo_state,
        &s.lo_mode,
        &s.photon_mode,
        s.array.ref_point,
        &points,
        s.noise,
        s.seed,
    )?;
    let mut t = measurement_table(&meas);
    t.meta("seed", s.seed);
    Ok(t)
}

/// Profile reconstructed from a measurement: `x_m, y_m, u_ph_est`.
pub fn cmd_reconstruct(measurement_csv: &str, s: &Scenario) -> Result<CsvTable> {
    let meas = parse_measurement(measurement_csv)?;
    let prof = reconstruct(&meas, &s.lo_mode, s.anchor)?;
    let mut t = CsvTable::new(&["x_m", "y_m", "u_ph_est"]);
    t.meta("photonmix", "reconstruct")
        .meta("residual", csv::fmt_num(prof.residual))
        .meta("anchor_value", csv::fmt_num(prof.anchor_value))
        .meta("sign_convention", &prof.sign_convention);
    for (p, u) in prof.points.iter().zip(&prof.amplitudes) {
        t.push(vec![p.x, p.y, *u]);
    }
    Ok(t)
}
