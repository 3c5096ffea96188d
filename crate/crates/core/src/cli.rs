//! Experiment configs, presets and the command-line runner.
//!
//! A config file is JSON of the form
//!
//! ```json
//! { "kind": "ode", "params": { "mu": 5.0, "sigma2": 0.1, "a": 0.0, "dt": 0.02, "t_max": 20.0 } }
//! ```
//!
//! with an optional `"out"` directory. Unknown keys are rejected at every
//! level. Every run validates before computing and writes nothing until all
//! results are in memory, so a rejected config leaves no files behind.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};
use crate::microlocal::{lemma_init_check, packet_ladder, LemmaReport, PacketReport};
use crate::ode::{
    run_ode_experiment, verify_nonmatching, GaussianSource, NonmatchingSetup, OdeConfig, CENTRAL_FD, CORRECTED,
    FORWARD_EULER,
};
use crate::scheme::SchemeSpec;
use crate::series::TimeSeries;
use crate::transforms::{taper, Direction, TransformOperator};
use crate::wave::{run_correction_experiment, CorrectionReport, GridModel, WaveConfig};

/// Version of the `report.json` layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Ode,
    Wave1d,
    Wave2d,
    Wavepacket,
    Transform,
    LemmaInit,
    Nonmatching,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Ode => "ode",
            Kind::Wave1d => "wave1d",
            Kind::Wave2d => "wave2d",
            Kind::Wavepacket => "wavepacket",
            Kind::Transform => "transform",
            Kind::LemmaInit => "lemma-init",
            Kind::Nonmatching => "nonmatching",
        }
    }
}

/// Wave-packet ladder parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketConfig {
    pub t0: f64,
    pub eta0: f64,
    pub dt_list: Vec<f64>,
    pub t_max: f64,
}

/// Initial-condition scan parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LemmaConfig {
    pub source: GaussianSource,
    pub dt_list: Vec<f64>,
    pub t_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    Central,
    Leapfrog,
}

/// Transform of one CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformConfig {
    pub direction: Direction,
    pub scheme: SchemeName,
    /// Must match the file's sampling when given.
    #[serde(default)]
    pub dt: Option<f64>,
    pub input: PathBuf,
    pub output: PathBuf,
    #[serde(default)]
    pub taper_fraction: Option<f64>,
}

/// A typed experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Ode(OdeConfig),
    Wave1d(WaveConfig),
    Wave2d(WaveConfig),
    Wavepacket(PacketConfig),
    Transform(TransformConfig),
    LemmaInit(LemmaConfig),
    Nonmatching(NonmatchingSetup),
}

impl Experiment {
    pub fn kind(&self) -> Kind {
        match self {
            Experiment::Ode(_) => Kind::Ode,
            Experiment::Wave1d(_) => Kind::Wave1d,
            Experiment::Wave2d(_) => Kind::Wave2d,
            Experiment::Wavepacket(_) => Kind::Wavepacket,
            Experiment::Transform(_) => Kind::Transform,
            Experiment::LemmaInit(_) => Kind::LemmaInit,
            Experiment::Nonmatching(_) => Kind::Nonmatching,
        }
    }

    fn params(&self) -> Result<Value> {
        Ok(match self {
            Experiment::Ode(c) => serde_json::to_value(c)?,
            Experiment::Wave1d(c) | Experiment::Wave2d(c) => serde_json::to_value(c)?,
            Experiment::Wavepacket(c) => serde_json::to_value(c)?,
            Experiment::Transform(c) => serde_json::to_value(c)?,
            Experiment::LemmaInit(c) => serde_json::to_value(c)?,
            Experiment::Nonmatching(c) => serde_json::to_value(c)?,
        })
    }

    /// Checks preconditions without running the experiment.
    pub fn validate(&self) -> Result<()> {
        match self {
            Experiment::Ode(c) => c.validate(),
            Experiment::Wave1d(c) | Experiment::Wave2d(c) => {
                let p = c.prepare()?;
                let want_1d = matches!(self, Experiment::Wave1d(_));
                if p.model.is_1d() != want_1d {
                    return invalid(format!("{} needs a {} model", self.kind().name(), if want_1d { "1D" } else { "2D" }));
                }
                Ok(())
            }
            Experiment::Wavepacket(c) => {
                if c.dt_list.windows(2).any(|w| w[1] >= w[0]) {
                    return invalid("dt_list must be strictly descending");
                }
                Ok(())
            }
            Experiment::Transform(c) => {
                if let Some(f) = c.taper_fraction {
                    if !(f > 0.0 && f < 1.0) {
                        return invalid(format!("taper fraction must lie in (0, 1), got {f}"));
                    }
                }
                if let Some(dt) = c.dt {
                    if !(dt > 0.0 && dt.is_finite()) {
                        return invalid(format!("dt must be positive, got {dt}"));
                    }
                }
                Ok(())
            }
            Experiment::LemmaInit(c) => {
                c.source.validate()?;
                if c.dt_list.is_empty() || c.dt_list.windows(2).any(|w| w[1] >= w[0]) {
                    return invalid("dt_list must be non-empty and strictly descending");
                }
                Ok(())
            }
            Experiment::Nonmatching(c) => {
                c.system.validate()?;
                c.source.validate()
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Kind,
    params: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    out: Option<PathBuf>,
}

/// An experiment plus an optional output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub out: Option<PathBuf>,
}

impl TryFrom<RawConfig> for ExperimentConfig {
    type Error = String;

    fn try_from(raw: RawConfig) -> std::result::Result<Self, String> {
        fn parse<T: serde::de::DeserializeOwned>(kind: Kind, p: Value) -> std::result::Result<T, String> {
            serde_json::from_value(p).map_err(|e| format!("params for {}: {e}", kind.name()))
        }
        let (k, p) = (raw.kind, raw.params);
        let experiment = match k {
            Kind::Ode => Experiment::Ode(parse(k, p)?),
            Kind::Wave1d => Experiment::Wave1d(parse(k, p)?),
            Kind::Wave2d => Experiment::Wave2d(parse(k, p)?),
            Kind::Wavepacket => Experiment::Wavepacket(parse(k, p)?),
            Kind::Transform => Experiment::Transform(parse(k, p)?),
            Kind::LemmaInit => Experiment::LemmaInit(parse(k, p)?),
            Kind::Nonmatching => Experiment::Nonmatching(parse(k, p)?),
        };
        Ok(Self { experiment, out: raw.out })
    }
}

impl From<ExperimentConfig> for RawConfig {
    fn from(c: ExperimentConfig) -> Self {
        let params = c.experiment.params().expect("experiment parameters serialize");
        RawConfig { kind: c.experiment.kind(), params, out: c.out }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self { experiment, out: None }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a config; unreadable files count as invalid input.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// A named built-in config.
#[derive(Debug, Clone)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: ExperimentConfig,
}

fn ode_preset(a: f64, dt: f64) -> ExperimentConfig {
    ExperimentConfig::new(Experiment::Ode(OdeConfig { mu: 5.0, sigma2: 0.1, a, dt, t_max: 20.0, taper_fraction: Some(0.1) }))
}

pub fn presets() -> Vec<Preset> {
    vec![
        Preset { name: "fig1a", description: "Gaussian source, a = 0, dt = 0.02", config: ode_preset(0.0, 0.02) },
        Preset { name: "fig1b", description: "modulated source, a = 4, dt = 0.02", config: ode_preset(4.0, 0.02) },
        Preset {
            name: "fig2a",
            description: "a = 7.5 at dt = 0.02, spectrum beyond q(Omega)",
            config: ode_preset(7.5, 0.02),
        },
        Preset { name: "fig2b", description: "a = 7.5 at dt = 0.01", config: ode_preset(7.5, 0.01) },
        Preset {
            name: "wave1d-elastic",
            description: "1D homogeneous elastic line against a dt/50 reference",
            config: ExperimentConfig::new(Experiment::Wave1d(WaveConfig::wave1d_elastic())),
        },
        Preset {
            name: "wave2d-visco",
            description: "2D viscoelastic block, Q = 50, against a dt/50 reference",
            config: ExperimentConfig::new(Experiment::Wave2d(WaveConfig::wave2d_visco())),
        },
        Preset {
            name: "wavepacket",
            description: "packet (t0 = 1, eta0 = 0.1) over dt = 4, 2, 1, 0.5 ms",
            config: ExperimentConfig::new(Experiment::Wavepacket(PacketConfig {
                t0: 1.0,
                eta0: 0.1,
                dt_list: vec![4e-3, 2e-3, 1e-3, 5e-4],
                t_max: 3.0,
            })),
        },
        Preset {
            name: "lemma-init",
            description: "sup over t <= 0 of FTDT(u) for the fig1a source",
            config: ExperimentConfig::new(Experiment::LemmaInit(LemmaConfig {
                source: GaussianSource { mu: 5.0, sigma2: 0.1, a: 0.0 },
                dt_list: vec![0.04, 0.02, 0.01],
                t_max: 20.0,
            })),
        },
        Preset {
            name: "nonmatching",
            description: "2x2 system with a leapfrog auxiliary equation",
            config: ExperimentConfig::new(Experiment::Nonmatching(NonmatchingSetup::default())),
        },
    ]
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    presets().into_iter().find(|p| p.name == name).map(|p| p.config).ok_or_else(|| {
        let names: Vec<_> = presets().iter().map(|p| p.name).collect();
        Error::InvalidArgument(format!("unknown preset {name:?}; available: {}", names.join(", ")))
    })
}

/// Contents of `report.json`. The top-level keys are the same for every
/// kind; kind-specific data sits under `details.<kind>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub kind: Kind,
    pub preset: Option<String>,
    pub config: Value,
    pub runtime_seconds: f64,
    pub summary: BTreeMap<String, f64>,
    pub details: BTreeMap<String, Value>,
}

/// A file to write, relative to the output directory.
enum Artifact {
    Text(PathBuf, String),
    Real(PathBuf, TimeSeries<f64>),
    Complex(PathBuf, TimeSeries<num_complex::Complex64>),
    Model(GridModel),
}

/// Runs an experiment and writes its artifacts into `out`. Returns the report.
///
/// Transform experiments write only their output file and ignore `out`.
pub fn run(config: &ExperimentConfig, preset: Option<&str>, out: &Path) -> Result<Report> {
    let exp = &config.experiment;
    exp.validate()?;
    let start = Instant::now();
    let mut summary = BTreeMap::new();
    let mut artifacts = Vec::new();
    let details: Value = match exp {
        Experiment::Ode(c) => {
            let r = run_ode_experiment(c)?;
            let m = |name| r.report.method(name).map(|m| m.max_error_window).unwrap_or(f64::NAN);
            summary.insert("corrected_max_error".into(), m(CORRECTED));
            summary.insert("central_fd_max_error".into(), m(CENTRAL_FD));
            summary.insert("forward_euler_max_error".into(), m(FORWARD_EULER));
            summary.insert("separation_orders".into(), (m(CENTRAL_FD) / m(CORRECTED)).log10());
            summary.insert("theorem_residual".into(), r.residual.corrected);
            for (name, s) in [
                ("analytic", &r.analytic),
                (FORWARD_EULER, &r.forward_euler),
                (CENTRAL_FD, &r.central_fd),
                (CORRECTED, &r.corrected),
            ] {
                artifacts.push(Artifact::Complex(format!("{name}.csv").into(), s.clone()));
            }
            json!({ "errors": r.report, "theorem_residual": r.residual })
        }
        Experiment::Wave1d(c) | Experiment::Wave2d(c) => {
            let r = run_correction_experiment(c)?;
            if !(r.rms_corrected.is_finite() && r.rms_uncorrected.is_finite()) {
                return Err(Error::Numeric("wave experiment produced non-finite errors".into()));
            }
            summary.insert("rms_uncorrected".into(), r.rms_uncorrected);
            summary.insert("rms_corrected".into(), r.rms_corrected);
            summary.insert("reduction".into(), r.reduction);
            artifacts.extend(wave_artifacts(&r, c)?);
            serde_json::to_value(&r)?
        }
        Experiment::Wavepacket(c) => {
            let r: PacketReport = packet_ladder(c.t0, c.eta0, &c.dt_list, c.t_max)?;
            if let Some(last) = r.rows.last() {
                summary.insert("itdt_center_error".into(), last.itdt_error);
                summary.insert("ftdt_center_error".into(), last.ftdt_error);
            }
            let mut table = String::from("dt,itdt_t,itdt_eta,ftdt_t,ftdt_eta,itdt_error,ftdt_error\n");
            for row in &r.rows {
                table.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    row.dt,
                    row.itdt_center.t,
                    row.itdt_center.eta,
                    row.ftdt_center.t,
                    row.ftdt_center.eta,
                    row.itdt_error,
                    row.ftdt_error
                ));
            }
            artifacts.push(Artifact::Text("centers.csv".into(), table));
            serde_json::to_value(&r)?
        }
        Experiment::LemmaInit(c) => {
            let r: LemmaReport = lemma_init_check(&c.source, &c.dt_list, c.t_max)?;
            if let Some(last) = r.rows.last() {
                summary.insert("sup_finest".into(), last.sup);
            }
            serde_json::to_value(&r)?
        }
        Experiment::Nonmatching(c) => {
            let r = verify_nonmatching(c)?;
            summary.insert("residual_main".into(), r.residual_main);
            summary.insert("residual_aux_with_g".into(), r.residual_aux_with_g);
            summary.insert("residual_aux_without_g".into(), r.residual_aux_without_g);
            serde_json::to_value(r)?
        }
        Experiment::Transform(c) => {
            let (bytes, n) = run_transform(c)?;
            summary.insert("samples".into(), n as f64);
            write_file(&c.output, &bytes)?;
            json!({ "output": c.output })
        }
    };
    let report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        kind: exp.kind(),
        preset: preset.map(str::to_string),
        config: exp.params()?,
        runtime_seconds: start.elapsed().as_secs_f64(),
        summary,
        details: BTreeMap::from([(exp.kind().name().to_string(), details)]),
    };
    if exp.kind() != Kind::Transform {
        fs::create_dir_all(out)?;
        for a in artifacts {
            match a {
                Artifact::Text(p, s) => write_file(&out.join(p), s.as_bytes())?,
                Artifact::Real(p, s) => write_series(&out.join(p), |w| s.write_csv(w))?,
                Artifact::Complex(p, s) => write_series(&out.join(p), |w| s.write_csv(w))?,
                Artifact::Model(m) => {
                    m.write(out, "model")?;
                }
            }
        }
        write_file(&out.join("report.json"), serde_json::to_string_pretty(&report)?.as_bytes())?;
    }
    Ok(report)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    Ok(fs::write(path, bytes)?)
}

fn write_series(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    write_file(path, &buf)
}

fn wave_artifacts(r: &CorrectionReport, c: &WaveConfig) -> Result<Vec<Artifact>> {
    let mut out = Vec::new();
    let mut receivers = Vec::new();
    for (k, rec) in c.receivers.iter().enumerate() {
        let mut files = serde_json::Map::new();
        for (label, traces) in [("reference", &r.reference), ("uncorrected", &r.uncorrected), ("corrected", &r.corrected)] {
            let name = format!("{label}_r{k}.csv");
            out.push(Artifact::Real(Path::new("traces").join(&name), traces[k].clone()));
            files.insert(label.into(), name.into());
        }
        receivers.push(json!({ "index": k, "i": rec.i, "j": rec.j, "files": files }));
    }
    let model = c.model.build(c.wavelet.fpeak)?;
    let manifest = json!({
        "quantity": if model.is_1d() { "sigma" } else { "sigma_xx + sigma_zz" },
        "dt": r.dt,
        "t0": 0.5 * r.dt,
        "samples": r.n_steps,
        "receivers": receivers,
    });
    out.push(Artifact::Text("traces/manifest.json".into(), serde_json::to_string_pretty(&manifest)?));
    out.push(Artifact::Model(model));
    Ok(out)
}

/// Reads and transforms the input. Returns the output CSV and its sample count.
/// Real input gives real output.
fn run_transform(c: &TransformConfig) -> Result<(Vec<u8>, usize)> {
    let text = fs::read(&c.input)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", c.input.display())))?;
    let mut buf = Vec::new();
    let n = match TimeSeries::<f64>::read_csv(text.as_slice()) {
        Ok(x) => {
            let y = transform_series(c, x)?;
            y.write_csv(&mut buf)?;
            y.len()
        }
        Err(_) => {
            let x = TimeSeries::<num_complex::Complex64>::read_csv(text.as_slice())?;
            let y = transform_series(c, x)?;
            y.write_csv(&mut buf)?;
            y.len()
        }
    };
    Ok((buf, n))
}

fn transform_series<T: crate::series::Sample>(c: &TransformConfig, x: TimeSeries<T>) -> Result<TimeSeries<T>> {
    let dt = match c.dt {
        Some(dt) => {
            if (dt - x.dt()).abs() > 1e-9 * dt {
                return invalid(format!("--dt {dt} does not match the file sampling {}", x.dt()));
            }
            dt
        }
        None => x.dt(),
    };
    let t0 = x.t0();
    let x = TimeSeries::with_origin(x.into_samples(), dt, t0)?;
    let scheme = match c.scheme {
        SchemeName::Central => SchemeSpec::central_difference(dt)?,
        SchemeName::Leapfrog => SchemeSpec::leapfrog(dt)?,
    };
    let x = match c.taper_fraction {
        Some(f) => taper(&x, f)?,
        None => x,
    };
    TransformOperator::new(&scheme, x.len(), c.direction, t0)?.apply(&x)
}

/// Command-line interface.
#[derive(Debug, Parser)]
#[command(name = "dispersionlab", version, about = "Time-dispersion removal experiments")]
pub struct Cli {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "DISPERSIONLAB_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalar model problem against its analytic solution.
    Ode(RunArgs),
    /// 1D wave correction experiment.
    Wave1d(RunArgs),
    /// 2D wave correction experiment.
    Wave2d(RunArgs),
    /// Phase-space centers of transformed wave packets.
    Wavepacket(RunArgs),
    /// Transform of negative-time content against dt.
    LemmaInit(RunArgs),
    /// Non-matching stencils with the convolution kernel.
    Nonmatching(RunArgs),
    /// Applies a transform to a CSV time series.
    Transform(TransformArgs),
    /// Lists the built-in presets.
    Presets,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory; defaults to the config's `out` or `dispersionlab-out/<name>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub direction: Direction,
    #[arg(long, value_enum)]
    pub scheme: SchemeName,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub taper: Option<f64>,
}

/// Runs with the process arguments.
pub fn main_from_env() -> i32 {
    main_with_args(std::env::args_os())
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        // a pool may already exist when called more than once in a process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    let (kind, args) = match command {
        Command::Presets => {
            for p in presets() {
                println!("{:<16} {:<12} {}", p.name, p.config.experiment.kind().name(), p.description);
            }
            return Ok(());
        }
        Command::Transform(t) => {
            let cfg = ExperimentConfig::new(Experiment::Transform(TransformConfig {
                direction: t.direction,
                scheme: t.scheme,
                dt: t.dt,
                input: t.input,
                output: t.out,
                taper_fraction: t.taper,
            }));
            let r = run(&cfg, None, Path::new("."))?;
            println!("wrote {} samples", r.summary["samples"]);
            return Ok(());
        }
        Command::Ode(a) => (Kind::Ode, a),
        Command::Wave1d(a) => (Kind::Wave1d, a),
        Command::Wave2d(a) => (Kind::Wave2d, a),
        Command::Wavepacket(a) => (Kind::Wavepacket, a),
        Command::LemmaInit(a) => (Kind::LemmaInit, a),
        Command::Nonmatching(a) => (Kind::Nonmatching, a),
    };
    let (cfg, label) = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(kind.name()).to_string();
            (ExperimentConfig::load(path)?, stem)
        }
        (None, Some(name)) => (preset(name)?, name.clone()),
        (None, None) => return invalid("give --config or --preset"),
    };
    if cfg.experiment.kind() != kind {
        return invalid(format!(
            "config kind is {}, but the {} subcommand was used",
            cfg.experiment.kind().name(),
            kind.name()
        ));
    }
    let out = args
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| Path::new("dispersionlab-out").join(&label));
    let report = run(&cfg, args.preset.as_deref(), &out)?;
    println!("{}", out.join("report.json").display());
    for (k, v) in &report.summary {
        println!("  {k:<24} {v:.6e}");
    }
    Ok(())
}
