//! `dchsynth` command-line front end. Reports go to stdout as JSON, codes and
//! gates are written to files.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use dchsynth::code::CodeJson;
use dchsynth::families;
use dchsynth::gate::GateJson;
use dchsynth::synth::{CodeSummary, PipelineOp};
use dchsynth::{BitVec, CssCode, DiagonalGate, LiftPolicy};
use serde::Serialize;

use report::{execute, Job, JobKind, Options};

/// Exit codes.
const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 2;
const EXIT_NOT_PRESERVED: u8 = 3;
const EXIT_SAMPLED_ONLY: u8 = 4;
const EXIT_INADMISSIBLE: u8 = 5;

#[derive(Parser)]
#[command(
    name = "dchsynth",
    version,
    about = "Diagonal gates on CSS codes: verification and synthesis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct EngineArgs {
    /// Enumeration budget as a power of two.
    #[arg(long, default_value_t = dchsynth::gencoeff::EngineConfig::default().budget_log2)]
    budget: u32,
    /// Weight bound for distance searches.
    #[arg(long, default_value_t = dchsynth::synth::PipelineConfig::default().w_max)]
    wmax: usize,
}

#[derive(Args)]
struct Inputs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    gate: PathBuf,
}

#[derive(Args)]
struct Outputs {
    /// Where to write the resulting code.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the resulting gate.
    #[arg(long)]
    gate_out: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named code family member.
    Family {
        /// steane, four22, two_l, tri2, pqrm, qrm, qrm_pipeline.
        name: String,
        params: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        gate_out: Option<PathBuf>,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Decide preservation and identify the logical gate.
    Verify {
        #[command(flatten)]
        inputs: Inputs,
        /// Also certify on N random syndromes and logicals.
        #[arg(long)]
        sampled: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Concatenate with the [[2,1,1]] code and lift the gate.
    Concat {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value = "next_level_rotation")]
        lift: String,
        #[command(flatten)]
        outputs: Outputs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Remove the Z-stabilizers that detect `w0`.
    RemoveZ {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        w0: String,
        #[command(flatten)]
        outputs: Outputs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Add the X-logical `x0` as a stabilizer.
    AddX {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        x0: String,
        #[command(flatten)]
        outputs: Outputs,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Run a JSON script of synthesis steps.
    Pipeline {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        script: PathBuf,
        #[command(flatten)]
        outputs: Outputs,
        /// Cross-check the final code numerically.
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Numerical cross-check from explicit codewords.
    Oracle {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = dchsynth::oracle::DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Re-run a saved report from its recorded inputs.
    Report {
        input: PathBuf,
        /// Exit 3 unless the regenerated report is identical.
        #[arg(long)]
        check: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn load(inputs: &Inputs) -> Result<(CssCode, DiagonalGate)> {
    let code = CssCode::from_json(&read_json::<CodeJson>(&inputs.code)?)
        .with_context(|| format!("invalid code in {}", inputs.code.display()))?;
    let gate = DiagonalGate::from_json(&read_json::<GateJson>(&inputs.gate)?)
        .with_context(|| format!("invalid gate in {}", inputs.gate.display()))?;
    Ok((code, gate))
}

fn bits(s: &str) -> Result<BitVec> {
    s.parse()
        .map_err(|e| anyhow::anyhow!("bad bitstring {s:?}: {e}"))
}

fn options(engine: EngineArgs) -> Options {
    Options {
        budget_log2: engine.budget,
        w_max: engine.wmax,
        ..Options::default()
    }
}

#[derive(Serialize)]
struct FamilySummary {
    family: String,
    params: Vec<usize>,
    code: CodeSummary,
    gate: String,
    expected: families::Expected,
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Family {
            name,
            params,
            out,
            gate_out,
            engine,
        } => {
            let fam = families::named(&name, &params)?;
            let opts = options(engine);
            let summary = FamilySummary {
                family: fam.name.clone(),
                params,
                code: CodeSummary::of(&fam.code, &opts.pipeline_config())?,
                gate: fam.gate.describe(),
                expected: fam.expected.clone(),
            };
            if let Some(p) = out {
                write_json(&p, &fam.code.to_json())?;
            }
            if let Some(p) = gate_out {
                write_json(&p, &fam.gate.to_json())?;
            }
            print_json(&summary)?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            inputs,
            sampled,
            seed,
            engine,
        } => {
            let (code, gate) = load(&inputs)?;
            let job = Job {
                command: JobKind::Verify,
                code: code.to_json(),
                gate: gate.to_json(),
                script: Vec::new(),
                options: Options {
                    sampled,
                    seed,
                    ..options(engine)
                },
            };
            emit(&job, None)
        }
        Command::Concat {
            inputs,
            lift,
            outputs,
            engine,
        } => {
            let lift: LiftPolicy = serde_json::from_value(serde_json::Value::String(lift.clone()))
                .map_err(|_| anyhow::anyhow!("unknown lift policy {lift:?}"))?;
            single_step(&inputs, PipelineOp::Concat { lift }, outputs, engine)
        }
        Command::RemoveZ {
            inputs,
            w0,
            outputs,
            engine,
        } => single_step(
            &inputs,
            PipelineOp::RemoveZ { w0: bits(&w0)? },
            outputs,
            engine,
        ),
        Command::AddX {
            inputs,
            x0,
            outputs,
            engine,
        } => single_step(
            &inputs,
            PipelineOp::AddX { x0: bits(&x0)? },
            outputs,
            engine,
        ),
        Command::Pipeline {
            inputs,
            script,
            outputs,
            oracle,
            engine,
        } => {
            let (code, gate) = load(&inputs)?;
            let script: Vec<PipelineOp> = read_json(&script)?;
            let job = Job {
                command: JobKind::Pipeline,
                code: code.to_json(),
                gate: gate.to_json(),
                script,
                options: Options {
                    strict: outputs.strict,
                    oracle,
                    ..options(engine)
                },
            };
            emit(&job, Some(&outputs))
        }
        Command::Oracle {
            inputs,
            tol,
            engine,
        } => {
            let (code, gate) = load(&inputs)?;
            let job = Job {
                command: JobKind::Oracle,
                code: code.to_json(),
                gate: gate.to_json(),
                script: Vec::new(),
                options: Options {
                    tol,
                    ..options(engine)
                },
            };
            emit(&job, None)
        }
        Command::Report { input, check } => {
            let saved: serde_json::Value = read_json(&input)?;
            let job: Job = serde_json::from_value(
                saved
                    .get("inputs")
                    .cloned()
                    .context("report has no inputs")?,
            )
            .context("malformed report inputs")?;
            let outcome = execute(&job)?;
            let fresh = serde_json::to_value(&outcome.report)?;
            print_json(&outcome.report)?;
            if check && fresh != saved {
                return Ok(EXIT_NOT_PRESERVED);
            }
            Ok(outcome.exit)
        }
    }
}

fn single_step(
    inputs: &Inputs,
    op: PipelineOp,
    outputs: Outputs,
    engine: EngineArgs,
) -> Result<u8> {
    let (code, gate) = load(inputs)?;
    let job = Job {
        command: JobKind::Pipeline,
        code: code.to_json(),
        gate: gate.to_json(),
        script: vec![op],
        options: Options {
            strict: outputs.strict,
            ..options(engine)
        },
    };
    emit(&job, Some(&outputs))
}

fn emit(job: &Job, outputs: Option<&Outputs>) -> Result<u8> {
    let outcome = execute(job)?;
    if let Some(o) = outputs {
        if let Some(p) = &o.out {
            write_json(p, &outcome.code.to_json())?;
        }
        if let Some(p) = &o.gate_out {
            write_json(p, &outcome.gate.to_json())?;
        }
    }
    print_json(&outcome.report)?;
    Ok(outcome.exit)
}
