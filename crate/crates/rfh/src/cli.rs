//! Command-line interface.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rfh_core::gysin::build_morse_complex;
use rfh_core::homology::homology;
use rfh_core::numeric::{
    aleksandrov_battery, gradient_battery, levrel2_battery, levrel_battery, transport_battery, AleksandrovConfig,
};
use rfh_core::rf::synth::SynthOptions;
use rfh_core::rf::{filter_by_action, ActionInterval};
use rfh_core::GradedF2Complex;

use crate::fixtures::{Example, Fixture};
use crate::io::{self, ComplexJson, MapsJson, ModelJson, MorseJson};
use crate::pipeline;
use crate::report::{self, Outcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "rfh", version, about = "GF(2) Morse, Gysin and Rabinowitz-Floer model checks")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Source {
    /// Input JSON file.
    pub input: Option<PathBuf>,
    /// Use a built-in example instead of a file.
    #[arg(long, value_enum, conflicts_with = "input")]
    pub example: Option<Example>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Homology of a complex, of the Morse complex of Morse data, or of a
    /// Rabinowitz-Floer model.
    Homology {
        #[command(flatten)]
        source: Source,
        /// Read the input as Morse data.
        #[arg(long)]
        morse: bool,
    },
    /// Sphere bundle complex, Gysin sequence and comparison with the Betti
    /// table of the unit sphere bundle.
    Gysin {
        #[command(flatten)]
        source: Source,
    },
    /// Rabinowitz-Floer models.
    Rf {
        #[command(subcommand)]
        command: RfCommand,
    },
    /// Numerical batteries.
    Check {
        #[command(subcommand)]
        command: CheckCommand,
    },
    /// Print a built-in example.
    Example {
        #[arg(value_enum)]
        name: Example,
        /// Print the Morse complex of Morse data instead of the data.
        #[arg(long)]
        morse_complex: bool,
    },
}

#[derive(Debug, Args)]
pub struct ModelSource {
    #[command(flatten)]
    pub source: Source,
    /// Coefficients of Φ, Ψ and optionally P, replacing those in the model.
    #[arg(long)]
    pub maps: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum RfCommand {
    /// Validate the model, the maps Φ and Ψ and their splittings.
    Validate(ModelSource),
    /// Check every identity relating Φ, Ψ, P, Θ, Θ̂ and Δ.
    VerifyMain(ModelSource),
    /// Homology of the model by class, compared with the loop space Betti
    /// numbers, optionally truncated to an action window.
    Hrf {
        #[command(flatten)]
        model: ModelSource,
        /// Action window `A-:A+`; ends may be `-inf` or `inf`.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Complete energy data with a random admissible boundary and maps.
    Synth {
        input: PathBuf,
        #[arg(long, env = "RFH_SEED", default_value_t = 0)]
        seed: u64,
        /// Probability of each entry of the conjugating map.
        #[arg(long, default_value_t = 0.3)]
        conjugation: f64,
        /// Probability of each entry of the homotopy added to Φ.
        #[arg(long, default_value_t = 0.3)]
        homotopy: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Upper and lower action bounds at η = ±√E.
    Levrel {
        #[arg(long, default_value_t = 1000)]
        n_loops: usize,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, env = "RFH_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Action against the Lagrangian action for Tonelli Lagrangians.
    Fenchel {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, env = "RFH_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Finite differences of the action against its gradient.
    Gradient {
        #[arg(long, default_value_t = 1e-5)]
        eps: f64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, env = "RFH_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Maximum principle with a Neumann condition on the inner arc.
    Aleksandrov {
        /// Grid cells per unit length.
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// `c` in the tolerance `1e-6 + c h²`.
        #[arg(long, default_value_t = 0.01)]
        c_grid: f64,
        #[arg(long, env = "RFH_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Transformation rules under the cylinder to annulus map.
    Transport {
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, default_value_t = 10000)]
        points: usize,
        #[arg(long, env = "RFH_SEED", default_value_t = 0)]
        seed: u64,
    },
}

/// An error in the input, as opposed to a failed verification.
#[derive(Debug)]
pub struct InputError(pub anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.into())
    }
}

/// What a command produces: a report, or a document such as a fixture or a
/// synthesized model.
pub enum Output {
    Report(Outcome),
    Document(String),
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_file<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> anyhow::Result<T> {
    io::parse(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn no_input() -> anyhow::Error {
    anyhow!("no input: give a file or --example")
}

fn morse_source(s: &Source) -> anyhow::Result<MorseJson> {
    match (&s.input, s.example) {
        (Some(p), _) => parse_file(p),
        (None, Some(e)) => e.morse().ok_or_else(|| anyhow!("example {} is not Morse data", e.name())),
        (None, None) => Err(no_input()),
    }
}

fn model_source(m: &ModelSource) -> anyhow::Result<ModelJson> {
    let model = match (&m.source.input, m.source.example) {
        (Some(p), _) => parse_file(p)?,
        (None, Some(e)) => e.model().ok_or_else(|| anyhow!("example {} is not a Rabinowitz-Floer model", e.name()))?,
        (None, None) => return Err(no_input()),
    };
    Ok(match &m.maps {
        Some(p) => model.with_maps(parse_file::<MapsJson>(p)?),
        None => model,
    })
}

fn parse_end(s: &str) -> anyhow::Result<f64> {
    match s.trim() {
        "-inf" => Ok(f64::NEG_INFINITY),
        "inf" | "+inf" => Ok(f64::INFINITY),
        t => {
            let v: f64 = t.parse().with_context(|| format!("window end {t:?}"))?;
            if !v.is_finite() {
                bail!("window end {t:?} is not a number");
            }
            Ok(v)
        }
    }
}

/// Parse `A-:A+` into a closed window with `A- ≤ A+`.
pub fn parse_window(s: &str) -> anyhow::Result<(f64, f64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| anyhow!("window {s:?} is not of the form A-:A+"))?;
    let (lo, hi) = (parse_end(a)?, parse_end(b)?);
    if lo > hi {
        bail!("window {s:?} has A- > A+");
    }
    Ok((lo, hi))
}

fn homology_complex(source: &Source, morse: bool) -> anyhow::Result<GradedF2Complex> {
    let as_morse = |m: MorseJson| -> anyhow::Result<GradedF2Complex> { Ok(build_morse_complex(&m.to_data()?)?) };
    match (&source.input, source.example) {
        (Some(p), _) if morse => as_morse(parse_file(p)?),
        (Some(p), _) => Ok(parse_file::<ComplexJson>(p)?.to_complex()?),
        (None, Some(e)) => match e.load()? {
            Fixture::Morse(m) => as_morse(m),
            Fixture::Model(m) => Ok(m.complex()?.to_complex()?),
        },
        (None, None) => Err(no_input()),
    }
}

pub fn run(cli: &Cli) -> Result<Output, InputError> {
    let out = match &cli.command {
        Command::Homology { source, morse } => {
            let c = homology_complex(source, *morse)?;
            let h = homology(&c);
            report::homology(&c, &h)
        }
        Command::Gysin { source } => report::gysin(&pipeline::gysin(&morse_source(source)?)?),
        Command::Rf { command } => match command {
            RfCommand::Validate(m) => report::rf_validate(&pipeline::rf_run(&model_source(m)?)?),
            RfCommand::VerifyMain(m) => report::rf_main(&pipeline::verify_main(&model_source(m)?)?),
            RfCommand::Hrf { model, window } => {
                let window = window.as_deref().map(parse_window).transpose()?;
                let j = model_source(model)?;
                let run = pipeline::rf_run(&j)?;
                let table = if j.loop_betti.is_empty() { None } else { Some(pipeline::hrf_table(&run, &j)?) };
                match window {
                    Some((lo, hi)) => {
                        let c = filter_by_action(&run.model, ActionInterval::closed(lo, hi))?;
                        let h = homology(&c);
                        report::rf_hrf(&run, table.as_ref(), Some((lo, hi, &c, &h)))?
                    }
                    None => report::rf_hrf(&run, table.as_ref(), None)?,
                }
            }
            RfCommand::Synth { input, seed, conjugation, homotopy } => {
                for (name, p) in [("conjugation", conjugation), ("homotopy", homotopy)] {
                    if !(0.0..=1.0).contains(p) {
                        return Err(anyhow!("--{name} {p} is not a probability").into());
                    }
                }
                let opts = SynthOptions { conjugation: *conjugation, homotopy: *homotopy };
                let model = pipeline::synth(&parse_file(input)?, *seed, opts)?;
                return Ok(Output::Document(io::to_string(&model)));
            }
        },
        Command::Check { command } => match *command {
            CheckCommand::Levrel { n_loops, samples, seed } => report::levrel(&levrel_battery(seed, n_loops, samples)?),
            CheckCommand::Fenchel { trials, samples, seed } => {
                report::fenchel(&levrel2_battery(seed, trials, samples)?)
            }
            CheckCommand::Gradient { eps, trials, samples, seed } => {
                report::gradient(&gradient_battery(seed, trials, samples, eps)?)
            }
            CheckCommand::Aleksandrov { grid, trials, c_grid, seed } => {
                if grid < 8 {
                    return Err(anyhow!("--grid {grid} is below 8").into());
                }
                let config = AleksandrovConfig { grid, trials, c_grid, ..AleksandrovConfig::default() };
                report::aleksandrov(&aleksandrov_battery(seed, config)?)
            }
            CheckCommand::Transport { trials, points, seed } => {
                report::transport(&transport_battery(seed, trials, points))
            }
        },
        Command::Example { name, morse_complex } => {
            if !*morse_complex {
                return Ok(Output::Document(name.text().to_string()));
            }
            let m = name.morse().ok_or_else(|| anyhow!("example {} is not Morse data", name.name()))?;
            let c = Arc::new(build_morse_complex(&m.to_data()?)?);
            return Ok(Output::Document(io::to_string(&ComplexJson::from_complex(&c))));
        }
    };
    Ok(Output::Report(out))
}

/// Render an outcome in the requested format.
pub fn render(out: &Outcome, format: Format) -> String {
    match format {
        Format::Json => io::to_string(&out.json),
        Format::Text => out.text.clone(),
    }
}

/// Run, write the output, and return the exit code: 0 pass, 1 failed
/// verification, 2 input error.
pub fn main_with(cli: &Cli) -> u8 {
    let (text, code) = match run(cli) {
        Ok(Output::Report(o)) => (render(&o, cli.format), if o.pass { 0 } else { 1 }),
        Ok(Output::Document(d)) => (d, 0),
        Err(InputError(e)) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    match &cli.output {
        Some(p) => {
            if let Err(e) = fs::write(p, &text) {
                eprintln!("error: writing {}: {e}", p.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    code
}
