//! Jobs and their JSON reports. A report records its own inputs, so
//! `dchsynth report` can regenerate it.

use anyhow::Result;
use dchsynth::code::CodeJson;
use dchsynth::gate::GateJson;
use dchsynth::gencoeff::{self, coefficient, EngineConfig, Exactness, RowEntryJson};
use dchsynth::hierarchy;
use dchsynth::oracle::{self, CrosscheckReport, ORACLE_MAX_N};
use dchsynth::synth::{self, CodeSummary, PipelineConfig, PipelineOp, SynthStep, DESCRIBE_CAP};
use dchsynth::{BitVec, CssCode, Cyclo, DiagonalGate, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{EXIT_INADMISSIBLE, EXIT_NOT_PRESERVED, EXIT_OK, EXIT_SAMPLED_ONLY};

/// Largest `k` whose full trivial row is printed.
const ROW_PRINT_CAP: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    Verify,
    Oracle,
    Pipeline,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Options {
    pub budget_log2: u32,
    pub w_max: usize,
    pub sampled: Option<usize>,
    pub seed: u64,
    pub strict: bool,
    pub oracle: bool,
    pub tol: f64,
}

impl Default for Options {
    fn default() -> Self {
        let p = PipelineConfig::default();
        Self {
            budget_log2: p.engine.budget_log2,
            w_max: p.w_max,
            sampled: None,
            seed: 0,
            strict: false,
            oracle: false,
            tol: oracle::DEFAULT_TOL,
        }
    }
}

impl Options {
    pub fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            engine: EngineConfig {
                budget_log2: self.budget_log2,
                ..EngineConfig::default()
            },
            w_max: self.w_max,
            distances: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub command: JobKind,
    pub code: CodeJson,
    pub gate: GateJson,
    #[serde(default)]
    pub script: Vec<PipelineOp>,
    pub options: Options,
}

#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub mu: BitVec,
    pub gamma: BitVec,
    pub value: Cyclo,
}

/// Exact coefficients on a random subset, for codes whose full row is out of budget.
#[derive(Clone, Debug, Serialize)]
pub struct SampledCertificate {
    pub seed: u64,
    /// `A_{0,γ}` on the unit logicals and random ones.
    pub trivial: Vec<RowEntryJson>,
    /// `A_{μ,γ}` at random nonzero syndromes; any nonzero value refutes preservation.
    pub off_syndrome: Vec<Sample>,
    pub refuted: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub inputs: Job,
    /// Final code.
    pub code: CodeSummary,
    pub gate: String,
    pub exactness: Option<Exactness>,
    pub preserved: Option<bool>,
    pub norm: Option<Cyclo>,
    pub row: Option<Vec<RowEntryJson>>,
    pub logical: Option<String>,
    pub level: Option<u32>,
    pub sampled: Option<SampledCertificate>,
    pub steps: Vec<SynthStep>,
    pub oracle: Option<CrosscheckReport>,
    pub notes: Vec<String>,
}

pub struct Outcome {
    pub report: Report,
    pub code: CssCode,
    pub gate: DiagonalGate,
    pub exit: u8,
}

pub fn execute(job: &Job) -> Result<Outcome> {
    let code = CssCode::from_json(&job.code)?;
    let gate = DiagonalGate::from_json(&job.gate)?;
    let cfg = job.options.pipeline_config();
    let (code, gate, steps) = if job.command == JobKind::Pipeline {
        let run = synth::run_pipeline(&code, &gate, &job.script, &cfg)?;
        (run.code, run.gate, run.steps)
    } else {
        (code, gate, Vec::new())
    };
    let mut report = Report {
        inputs: job.clone(),
        code: CodeSummary::of(&code, &cfg)?,
        gate: gate.describe(),
        exactness: None,
        preserved: None,
        norm: None,
        row: None,
        logical: None,
        level: None,
        sampled: None,
        steps,
        oracle: None,
        notes: Vec::new(),
    };
    let exit = match job.command {
        JobKind::Verify => assess(&mut report, &code, &gate, &job.options, true)?,
        JobKind::Oracle => {
            let r = oracle::crosscheck(&code, &gate, &cfg.engine, job.options.tol)?;
            report.preserved = Some(r.preserved_exact);
            let passed = r.passed;
            report.oracle = Some(r);
            if passed {
                EXIT_OK
            } else {
                EXIT_NOT_PRESERVED
            }
        }
        JobKind::Pipeline => {
            assess(&mut report, &code, &gate, &job.options, false)?;
            if job.options.oracle {
                if code.n() <= ORACLE_MAX_N {
                    match oracle::crosscheck(&code, &gate, &cfg.engine, job.options.tol) {
                        Ok(r) => report.oracle = Some(r),
                        Err(e) => report.notes.push(format!("oracle skipped: {e}")),
                    }
                } else {
                    report
                        .notes
                        .push(format!("oracle skipped: n = {} > {ORACLE_MAX_N}", code.n()));
                }
            }
            let inadmissible = report.steps.iter().any(|s| s.admissible == Some(false));
            if job.options.strict && inadmissible {
                EXIT_INADMISSIBLE
            } else {
                EXIT_OK
            }
        }
    };
    Ok(Outcome {
        report,
        code,
        gate,
        exit,
    })
}

/// Fills the preservation fields. Budget overruns fall back to the sampled
/// certificate when one was requested; in a pipeline they only add a note.
fn assess(
    report: &mut Report,
    code: &CssCode,
    gate: &DiagonalGate,
    opts: &Options,
    strict_budget: bool,
) -> Result<u8> {
    let cfg = opts.pipeline_config().engine;
    if let Some(count) = opts.sampled {
        report.sampled = Some(sample(code, gate, count, opts.seed, &cfg)?);
    }
    let refuted = report.sampled.as_ref().is_some_and(|s| s.refuted);
    match gencoeff::analyze(code, gate, &cfg, code.k() <= ROW_PRINT_CAP) {
        Ok(a) => {
            report.exactness = Some(Exactness::Full);
            report.preserved = Some(a.preservation.preserved);
            report.norm = Some(a.preservation.norm);
            report.row = a.row.map(|r| r.to_json());
            if let Some(l) = a.logical.filter(|l| l.k <= DESCRIBE_CAP) {
                let p = hierarchy::logical_polynomial(&l);
                report.logical = Some(p.describe());
                report.level = Some(p.level());
            }
            Ok(if a.preservation.preserved {
                EXIT_OK
            } else {
                EXIT_NOT_PRESERVED
            })
        }
        Err(e @ Error::BudgetExceeded { .. }) => {
            if report.sampled.is_none() && strict_budget {
                return Err(e.into());
            }
            report.notes.push(format!("full verification skipped: {e}"));
            if report.sampled.is_some() {
                report.exactness = Some(Exactness::Sampled);
            }
            if refuted {
                report.preserved = Some(false);
                Ok(EXIT_NOT_PRESERVED)
            } else {
                Ok(EXIT_SAMPLED_ONLY)
            }
        }
        Err(e) => Err(e.into()),
    }
}

fn sample(
    code: &CssCode,
    gate: &DiagonalGate,
    count: usize,
    seed: u64,
    cfg: &EngineConfig,
) -> Result<SampledCertificate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = code.n();
    let k = code.k();
    anyhow::ensure!(k < 64, "sampled mode supports k < 64, got {k}");
    let mut labels: Vec<u64> = (0..k).map(|j| 1u64 << j).collect();
    labels.extend((0..count).map(|_| rng.gen_range(0..1u64 << k)));
    let gammas: Vec<BitVec> = labels.iter().map(|&a| code.z_logical_rep(a)).collect();
    let trivial = gencoeff::sampled_row(code, gate, &BitVec::zeros(n), &gammas, cfg)?.to_json();
    let has_syndromes = code.frame().syndrome_basis.nrows() > 0;
    let mut off_syndrome = Vec::new();
    while has_syndromes && off_syndrome.len() < count {
        let v = BitVec::from_bools(&(0..n).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
        let mu = code.syndrome_rep(&v);
        if mu.is_zero() {
            continue;
        }
        let gamma = code.z_logical_rep(rng.gen_range(0..1u64 << k));
        let value = coefficient(code, gate, &mu, &gamma, cfg)?;
        off_syndrome.push(Sample { mu, gamma, value });
    }
    let refuted = off_syndrome.iter().any(|s| !s.value.is_zero());
    Ok(SampledCertificate {
        seed,
        trivial,
        off_syndrome,
        refuted,
    })
}
