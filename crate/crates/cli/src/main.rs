use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use afw_core::bounds::{cb_osc, cb_osc_opt_grid, BoundParams, Envelope, QuantityPreset, T_GRID_POINTS};
use afw_core::spectrum::{Oscillator, SpectrumModel};
use afw_core::thermo::{f_max, FHatFunction};
use afw_core::ufa::{reproduce_tables, write_csv, CapacityKind, UfaProblem};
use afw_core::verify::{run_all, run_suite, tightness_report, Suite, SuiteConfig};
use afw_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

/// Continuity bounds and sufficient input dimensions for energy-constrained
/// quantum systems.
#[derive(Parser, Debug)]
#[command(name = "afw", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Maximal entropy at a given energy and the Gibbs parameters attaining it.
    Fmax {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[arg(long)]
        energy: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Continuity bound for an entropic quantity.
    Bound {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[arg(long)]
        energy: f64,
        #[command(flatten)]
        eps: EpsArgs,
        /// Quantity preset, e.g. entropy, cond-entropy, qcmi, holevo, privacy.
        #[arg(long, default_value = "entropy")]
        kind: String,
        /// Evaluate at this t instead of optimising.
        #[arg(long, conflicts_with = "optimize_t")]
        t: Option<f64>,
        /// Minimise over t (the default).
        #[arg(long)]
        optimize_t: bool,
        #[arg(long, default_value_t = T_GRID_POINTS)]
        tgrid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sufficient input dimension for a capacity.
    Ufa {
        #[command(flatten)]
        spectrum: SpectrumArgs,
        #[arg(long)]
        energy: f64,
        #[command(flatten)]
        eps: EpsArgs,
        /// Capacity: Cchi, C, Qbar, Q, Cpbar or Cp.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = T_GRID_POINTS)]
        tgrid: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sufficient dimensions for the one-mode oscillator at E in {3, 10, 100}
    /// and relative errors 0.1 and 0.01.
    Tables {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Randomised inequality suites; exits with 1 on any violation.
    Verify {
        /// Suite name or "all".
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Dimension of the energy-constrained system.
        #[arg(long, default_value_t = 32)]
        dim: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Entropy gap against the bound for a Gibbs state mixed with the ground
    /// state.
    Tightness {
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct SpectrumArgs {
    /// Mode energies of a multimode oscillator, comma separated.
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<f64>>,
    /// File with an explicit spectrum.
    #[arg(long)]
    spectrum: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct EpsArgs {
    #[arg(long)]
    eps: Option<f64>,
    /// Relative error r; eps = r F(E).
    #[arg(long)]
    rel_err: Option<f64>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

enum Failure {
    Core(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

enum Spectrum {
    Oscillator(Oscillator),
    Explicit(SpectrumModel),
}

impl SpectrumArgs {
    fn resolve(&self) -> CliResult<Spectrum> {
        match (&self.modes, &self.spectrum) {
            (Some(m), None) => Ok(Spectrum::Oscillator(Oscillator::new(m.clone())?)),
            (None, Some(p)) => Ok(Spectrum::Explicit(SpectrumModel::load_explicit(p)?)),
            _ => Err(Error::Parse("give exactly one of --modes and --spectrum".into()).into()),
        }
    }
}

impl Spectrum {
    fn model(&self) -> SpectrumModel {
        match self {
            Spectrum::Oscillator(o) => SpectrumModel::Oscillator(o.clone()),
            Spectrum::Explicit(m) => m.clone(),
        }
    }
}

impl EpsArgs {
    fn resolve(&self, model: &SpectrumModel, energy: f64) -> CliResult<f64> {
        match (self.eps, self.rel_err) {
            (Some(e), None) => Ok(e),
            (None, Some(r)) => {
                if !(r > 0.0 && r.is_finite()) {
                    return Err(Error::Domain("relative error must be positive".into()).into());
                }
                Ok(r * f_max(model, energy)?.entropy)
            }
            _ => Err(Error::Parse("give exactly one of --eps and --rel-err".into()).into()),
        }
    }
}

/// Rounds every number to 12 significant digits; non-finite values become
/// the strings "inf", "-inf" and "nan".
fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => Value::from(format!("{x:.11e}").parse::<f64>().unwrap_or(x)),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn to_json<T: Serialize>(x: &T) -> CliResult<Value> {
    let v = serde_json::to_value(x).map_err(|e| Error::Resource(e.to_string()))?;
    Ok(round_json(v))
}

/// Serialises a float field, mapping non-finite values to strings.
fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Writes a list of flat JSON objects as JSON or as CSV with the keys of the
/// first object as header.
fn emit(rows: Vec<Value>, single: bool, format: Format, out: &OutputArgs) -> CliResult<()> {
    let mut text = String::new();
    match format {
        Format::Json => {
            let body = if single && rows.len() == 1 {
                rows.into_iter().next().unwrap()
            } else {
                Value::Array(rows)
            };
            text.push_str(&body.to_string());
            text.push('\n');
        }
        Format::Csv => {
            if let Some(Value::Object(first)) = rows.first() {
                let keys: Vec<&String> = first.keys().collect();
                text.push_str(&keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","));
                text.push('\n');
                for row in &rows {
                    let fields: Vec<String> = keys.iter().map(|k| row.get(k.as_str()).map(csv_field).unwrap_or_default()).collect();
                    text.push_str(&fields.join(","));
                    text.push('\n');
                }
            }
        }
    }
    write_out(text.as_bytes(), out)
}

fn write_out(bytes: &[u8], out: &OutputArgs) -> CliResult<()> {
    match &out.out {
        Some(path) => File::create(path)?.write_all(bytes)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Fmax { spectrum, energy, output } => {
            let point = f_max(&spectrum.resolve()?.model(), energy)?;
            let row = round_json(object(vec![
                ("energy", num(point.energy)),
                ("lambda", num(point.lambda)),
                ("ln_z", num(point.ln_z)),
                ("entropy", num(point.entropy)),
            ]));
            emit(vec![row], true, output.format.unwrap_or(Format::Json), &output)?;
        }
        Command::Bound { spectrum, energy, eps, kind, t, optimize_t: _, tgrid, output } => {
            let spectrum = spectrum.resolve()?;
            let model = spectrum.model();
            let eps = eps.resolve(&model, energy)?;
            let preset: QuantityPreset = kind.parse()?;
            let (t_star, value) = match &spectrum {
                Spectrum::Oscillator(osc) => {
                    let params = BoundParams::from_preset(preset, BoundParams::oscillator_delta(osc.mode_count()))?;
                    match t {
                        Some(t) => (t, cb_osc(osc, energy, eps, t, &params)?),
                        None => cb_osc_opt_grid(osc, energy, eps, &params, tgrid)?,
                    }
                }
                Spectrum::Explicit(model) => {
                    let env = Envelope::new(FHatFunction::Star(model.clone()))?;
                    let params = BoundParams::from_preset(preset, BoundParams::generic_delta(env.d0()))?;
                    let ebar = energy - model.ground_energy();
                    match t {
                        Some(t) => (t, env.cb(ebar, eps, t, &params)?),
                        None => env.cb_opt_grid(ebar, eps, &params, tgrid)?,
                    }
                }
            };
            let row = round_json(object(vec![
                ("kind", Value::from(preset.name())),
                ("energy", num(energy)),
                ("eps", num(eps)),
                ("t_star", num(t_star)),
                ("value", num(value)),
            ]));
            emit(vec![row], true, output.format.unwrap_or(Format::Json), &output)?;
        }
        Command::Ufa { spectrum, energy, eps, kind, tgrid, output } => {
            let spectrum = spectrum.resolve()?;
            let model = spectrum.model();
            let eps = eps.resolve(&model, energy)?;
            let kind: CapacityKind = kind.parse()?;
            let problem = match spectrum {
                Spectrum::Oscillator(osc) => UfaProblem::oscillator(osc),
                Spectrum::Explicit(model) => {
                    let env = Envelope::new(FHatFunction::Star(model.clone()))?;
                    UfaProblem::generic(model, env)
                }
            }
            .with_t_grid(tgrid)?;
            let res = problem.sufficient_dim(kind, energy, eps)?;
            let row = round_json(object(vec![
                ("kind", Value::from(kind.name())),
                ("energy", num(energy)),
                ("eps", num(eps)),
                ("m", Value::from(res.m)),
                ("t_star", num(res.t_star)),
                ("f_value", num(res.f_value)),
                ("e_m", num(res.e_m)),
            ]));
            emit(vec![row], true, output.format.unwrap_or(Format::Json), &output)?;
        }
        Command::Tables { output } => {
            let rows = reproduce_tables()?;
            match output.format.unwrap_or(Format::Csv) {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&rows, &mut buf)?;
                    write_out(&buf, &output)?;
                }
                Format::Json => {
                    let rows = rows.iter().map(to_json).collect::<CliResult<Vec<_>>>()?;
                    emit(rows, false, Format::Json, &output)?;
                }
            }
        }
        Command::Verify { suite, trials, seed, dim, output } => {
            let cfg = SuiteConfig { trials, seed, dim };
            let (reports, single) = if suite.eq_ignore_ascii_case("all") {
                (run_all(&cfg)?, false)
            } else {
                (vec![run_suite(suite.parse::<Suite>()?, &cfg)?], true)
            };
            let clean = reports.iter().all(|r| r.violations == 0);
            let rows = reports.iter().map(to_json).collect::<CliResult<Vec<_>>>()?;
            emit(rows, single, output.format.unwrap_or(Format::Json), &output)?;
            return Ok(clean);
        }
        Command::Tightness { output } => {
            let rows = tightness_report()?.iter().map(to_json).collect::<CliResult<Vec<_>>>()?;
            emit(rows, false, output.format.unwrap_or(Format::Json), &output)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Core(e)) => {
            eprintln!("afw: {e}");
            ExitCode::from(match e {
                Error::Domain(_) | Error::Validation(_) | Error::Parse(_) => 2,
                Error::Resource(_) | Error::Precision(_) => 3,
            })
        }
        Err(Failure::Io(e)) => {
            eprintln!("afw: {e}");
            ExitCode::from(3)
        }
    }
}
