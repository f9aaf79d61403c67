//! Code transformations that keep a diagonal gate transversal: concatenation,
//! Z-stabilizer removal, X-stabilizer addition, and the storage switch.

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::code::CssCode;
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::gate::{DiagonalGate, GateJson, LiftPolicy};
use crate::gencoeff::{self, EngineConfig, RowEntryJson, ROW_CAP_LOG2};
use crate::gf2::{BitVec, Distance, Subspace, DEFAULT_WMAX};
use crate::hierarchy;

/// `C₂' = [1,1]⊗C₂`, `C₁' = [1,1]⊗C₁`, `y' = [y, y]`.
pub fn concatenate(code: &CssCode) -> Result<CssCode> {
    let n = 2 * code.n();
    let double = |s: &Subspace| -> Result<Subspace> {
        let rows = s.basis().rows().iter().map(|r| r.concat(r)).collect();
        Subspace::from_rows(n, rows)
    };
    let c2 = double(code.c2())?;
    let c1 = double(code.c1())?;
    let y = code.y().concat(code.y());
    CssCode::from_spaces(c2, c1.dual(), &y)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemoveZ {
    pub code: CssCode,
    /// Removed Z-stabilizer, now a Z-logical of the new code.
    pub gamma0: BitVec,
    pub admissible: bool,
    /// `Σ|A'_{0,·}|²` of the new code.
    pub norm: Cyclo,
    /// `Σ_γ |s_γ(w0)|²`.
    pub split_norm: Cyclo,
    /// Old `y` ⊕ new canonical `y` (an element of `C₁'`). Coefficients of the
    /// new code in the old frame are `(−1)^{γ·y_shift}` times the stored ones.
    pub y_shift: BitVec,
}

/// Removes the Z-stabilizers detecting `w0`: `C₁' = ⟨C₁, w0⟩`.
///
/// The result is returned even when the split is not admissible.
pub fn remove_z(
    code: &CssCode,
    gate: &DiagonalGate,
    w0: &BitVec,
    cfg: &EngineConfig,
) -> Result<RemoveZ> {
    let split_norm = gencoeff::split_norm_only(code, gate, w0, cfg)?;
    let old = gencoeff::is_preserved(code, gate, cfg)?.norm;
    let norm = (&old + &split_norm).div_pow2(1);
    let c1_perp = code.c1_perp().intersect_dual_of(w0)?;
    let new = CssCode::from_spaces(code.c2().clone(), c1_perp, code.y())?;
    let gamma0 = code
        .c1_perp()
        .basis()
        .rows()
        .iter()
        .find(|r| r.dot(w0))
        .map(|r| new.c1_perp().reduce(r))
        .expect("w0 outside C1 is detected by some Z-stabilizer");
    let y_shift = code.y().xor(new.y());
    Ok(RemoveZ {
        code: new,
        gamma0,
        admissible: norm.is_one(),
        norm,
        split_norm,
        y_shift,
    })
}

/// `[1_n, 0_n]` for a code on `2n` qubits.
pub fn half_ones_w0(n2: usize) -> BitVec {
    let half = n2 / 2;
    BitVec::ones(half).concat(&BitVec::zeros(half))
}

/// Removal with `w0 = [1_n, 0_n]` on a concatenated code under a lifted
/// transversal rotation.
pub fn remove_z_half(code: &CssCode, gate: &DiagonalGate, cfg: &EngineConfig) -> Result<RemoveZ> {
    let n2 = code.n();
    if n2 % 2 == 1 {
        return Err(Error::Invalid(format!(
            "code length {n2} is odd, not a concatenation"
        )));
    }
    let half = n2 / 2;
    let doubled = |s: &Subspace| {
        s.basis()
            .rows()
            .iter()
            .all(|r| r.slice(0, half) == r.slice(half, n2))
    };
    if !doubled(code.c2()) || !doubled(code.c1()) {
        return Err(Error::Invalid(
            "code is not the output of concatenate".into(),
        ));
    }
    if gate.as_transversal_zrot().is_none() {
        return Err(Error::PolicyMismatch {
            policy: LiftPolicy::NextLevelRotation.name().into(),
            reason: "gate is not a transversal Z-rotation".into(),
        });
    }
    remove_z(code, gate, &half_ones_w0(n2), cfg)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AddX {
    pub code: CssCode,
    /// Old Z-logical anticommuting with `x0`; it becomes a syndrome.
    pub mu0: BitVec,
    pub admissible: bool,
    /// `Σ_{γ·x0=1} |A_{0,γ}|²`; zero exactly when admissible.
    pub leaked: Cyclo,
    /// Nonzero `A_{0,γ}` with `γ·x0 = 1` (only when the old row fits in memory).
    pub witness: Vec<(BitVec, Cyclo)>,
}

/// Adds `x0` as an X-stabilizer: `C₂' = ⟨C₂, x0⟩`.
///
/// Coefficients depend only on `μ⊕γ`, so the new trivial row is the old row
/// restricted to `γ·x0 = 0` and the leaked weight is the difference of norms.
pub fn add_x(code: &CssCode, gate: &DiagonalGate, x0: &BitVec, cfg: &EngineConfig) -> Result<AddX> {
    if x0.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            found: x0.len(),
        });
    }
    if !code.c1().contains(x0)? || code.c2().contains(x0)? {
        return Err(Error::NotAnXLogical(x0.to_string()));
    }
    let c2 = code.c2().extend(std::slice::from_ref(x0))?;
    let new = CssCode::from_spaces(c2, code.c1_perp().clone(), code.y())?;
    let mu0 = code
        .frame()
        .z_logical
        .rows()
        .iter()
        .find(|r| r.dot(x0))
        .map(|r| code.c1_perp().reduce(r))
        .expect("x0 outside C2 anticommutes with some Z-logical");
    let old = gencoeff::is_preserved(code, gate, cfg)?.norm;
    let kept = gencoeff::is_preserved(&new, gate, cfg)?.norm;
    let leaked = &old - &kept;
    let admissible = leaked.is_zero();
    let witness = if !admissible && code.k() <= ROW_CAP_LOG2 as usize {
        gencoeff::trivial_row(code, gate, cfg)?
            .entries
            .into_iter()
            .filter(|(g, v)| g.dot(x0) && !v.is_zero())
            .collect()
    } else {
        Vec::new()
    };
    Ok(AddX {
        code: new,
        mu0,
        admissible,
        leaked,
        witness,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RemoveX {
    pub code: CssCode,
    /// X-stabilizer that became an X-logical.
    pub x0: BitVec,
}

/// Inverse of [`add_x`]: `C₂' = C₂ ∩ μ₀^⊥`, with `μ₀` the syndrome that the
/// addition created.
pub fn remove_x(code: &CssCode, mu0: &BitVec) -> Result<RemoveX> {
    if mu0.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            found: mu0.len(),
        });
    }
    let x0 = code
        .c2()
        .basis()
        .rows()
        .iter()
        .find(|r| r.dot(mu0))
        .cloned()
        .ok_or_else(|| Error::Invalid(format!("{mu0} commutes with every X-stabilizer")))?;
    let c2 = code.c2().intersect_dual_of(mu0)?;
    let new = CssCode::from_spaces(c2, code.c1_perp().clone(), code.y())?;
    let x0 = new.c2().reduce(&x0);
    Ok(RemoveX { code: new, x0 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DfsSwitch {
    pub y_balanced: BitVec,
    pub x_positions: BitVec,
}

/// Sign-balanced Z-character: half of every connected component of the graph
/// on X-stabilizer qubits with edges from weight-2 Z-stabilizers.
pub fn dfs_switch(code: &CssCode) -> Result<DfsSwitch> {
    let n = code.n();
    let mut vertex = vec![false; n];
    for r in code.c2().basis().rows() {
        for q in r.support() {
            vertex[q] = true;
        }
    }
    // e_i ⊕ e_j ∈ C₁^⊥ exactly when columns i and j of a C₁ basis agree.
    let columns: Vec<BitVec> = (0..n)
        .map(|q| {
            BitVec::from_bools(
                &code
                    .c1()
                    .basis()
                    .rows()
                    .iter()
                    .map(|r| r.get(q))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let mut uf = UnionFind::<usize>::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if vertex[i] && vertex[j] && columns[i] == columns[j] {
                uf.union(i, j);
            }
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for q in (0..n).filter(|&q| vertex[q]) {
        let root = uf.find(q);
        if slot[root] == usize::MAX {
            slot[root] = components.len();
            components.push(Vec::new());
        }
        components[slot[root]].push(q);
    }
    let mut y = BitVec::zeros(n);
    for comp in &components {
        if comp.len() % 2 == 1 {
            return Err(Error::OddComponent(comp.clone()));
        }
        for &q in &comp[..comp.len() / 2] {
            y.set(q, true);
        }
    }
    let x_positions = y.xor(code.y());
    Ok(DfsSwitch {
        y_balanced: y,
        x_positions,
    })
}

// ---------------------------------------------------------------------------
// Pipelines

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum PipelineOp {
    Concat {
        lift: LiftPolicy,
    },
    RemoveZ {
        w0: BitVec,
    },
    AddX {
        x0: BitVec,
    },
    /// Replace the gate, e.g. with a rotation at a different level.
    Retarget {
        gate: GateJson,
    },
    Verify,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodeSummary {
    pub n: usize,
    pub k: usize,
    pub d_x: Option<Distance>,
    pub d_z: Option<Distance>,
    pub label: String,
}

impl CodeSummary {
    pub fn of(code: &CssCode, cfg: &PipelineConfig) -> Result<Self> {
        let (d_x, d_z) = if code.k() == 0 || !cfg.distances {
            (None, None)
        } else {
            let (dx, dz) = code.distances(cfg.w_max, cfg.engine.budget_log2)?;
            (Some(dx), Some(dz))
        };
        let d = match (d_x, d_z) {
            (Some(Distance::Exact(a)), Some(Distance::Exact(b))) => Some(Distance::Exact(a.min(b))),
            (Some(Distance::Exact(a)), Some(Distance::AtLeast(b)))
            | (Some(Distance::AtLeast(b)), Some(Distance::Exact(a))) => Some(if a < b {
                Distance::Exact(a)
            } else {
                Distance::AtLeast(b)
            }),
            (Some(Distance::AtLeast(a)), Some(Distance::AtLeast(b))) => {
                Some(Distance::AtLeast(a.min(b)))
            }
            _ => None,
        };
        Ok(Self {
            n: code.n(),
            k: code.k(),
            d_x,
            d_z,
            label: code.label(d),
        })
    }
}

/// One executed pipeline step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SynthStep {
    pub op: PipelineOp,
    pub before: CodeSummary,
    pub after: CodeSummary,
    /// Gate after the step.
    pub gate: String,
    pub admissible: Option<bool>,
    /// `Σ|A_{0,·}|²` of the code after the step, when computed.
    pub norm: Option<Cyclo>,
    pub witness: Vec<RowEntryJson>,
    /// Derived choice: `γ₀` for removals, `μ₀` for additions.
    pub derived: Option<BitVec>,
    pub logical: Option<String>,
    pub level: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub engine: EngineConfig,
    pub w_max: usize,
    /// Compute distances in step summaries.
    pub distances: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            engine: EngineConfig::default(),
            w_max: DEFAULT_WMAX,
            distances: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineRun {
    pub code: CssCode,
    pub gate: DiagonalGate,
    pub steps: Vec<SynthStep>,
}

impl PipelineRun {
    pub fn all_admissible(&self) -> bool {
        self.steps.iter().all(|s| s.admissible != Some(false))
    }
}

/// Largest `k` for which a verify step names the logical gate.
pub const DESCRIBE_CAP: usize = 16;

/// Runs `ops` in order, starting from `(code, gate)`.
pub fn run_pipeline(
    code: &CssCode,
    gate: &DiagonalGate,
    ops: &[PipelineOp],
    cfg: &PipelineConfig,
) -> Result<PipelineRun> {
    let mut code = code.clone();
    let mut gate = gate.clone();
    let mut steps = Vec::with_capacity(ops.len());
    let mut summary = CodeSummary::of(&code, cfg)?;
    for op in ops {
        let before = summary.clone();
        let mut step = SynthStep {
            op: op.clone(),
            before: before.clone(),
            after: before,
            gate: String::new(),
            admissible: None,
            norm: None,
            witness: Vec::new(),
            derived: None,
            logical: None,
            level: None,
        };
        match op {
            PipelineOp::Concat { lift } => {
                code = concatenate(&code)?;
                gate = gate.lift(*lift)?;
            }
            PipelineOp::RemoveZ { w0 } => {
                let r = remove_z(&code, &gate, w0, &cfg.engine)?;
                step.admissible = Some(r.admissible);
                step.norm = Some(r.norm);
                step.derived = Some(r.gamma0);
                code = r.code;
            }
            PipelineOp::AddX { x0 } => {
                let r = add_x(&code, &gate, x0, &cfg.engine)?;
                step.admissible = Some(r.admissible);
                step.witness = r
                    .witness
                    .into_iter()
                    .map(|(gamma, value)| RowEntryJson { gamma, value })
                    .collect();
                step.derived = Some(r.mu0);
                code = r.code;
                step.norm = Some(gencoeff::is_preserved(&code, &gate, &cfg.engine)?.norm);
            }
            PipelineOp::Retarget { gate: g } => {
                let g = DiagonalGate::from_json(g)?;
                if g.n() != code.n() {
                    return Err(Error::LengthMismatch {
                        expected: code.n(),
                        found: g.n(),
                    });
                }
                gate = g;
            }
            PipelineOp::Verify => {
                let a = gencoeff::analyze(&code, &gate, &cfg.engine, false)?;
                step.admissible = Some(a.preservation.preserved);
                step.norm = Some(a.preservation.norm);
                if let Some(l) = a.logical.filter(|l| l.k <= DESCRIBE_CAP) {
                    let p = hierarchy::logical_polynomial(&l);
                    step.logical = Some(p.describe());
                    step.level = Some(p.level());
                }
            }
        }
        if !matches!(op, PipelineOp::Verify | PipelineOp::Retarget { .. }) {
            summary = CodeSummary::of(&code, cfg)?;
        }
        step.after = summary.clone();
        step.gate = gate.describe();
        steps.push(step);
    }
    Ok(PipelineRun { code, gate, steps })
}
