//! Named code families and the Reed-Muller machinery behind them.

use serde::Serialize;

use crate::code::CssCode;
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::gate::{transversal_zrot, DiagonalGate, GateJson, LiftPolicy};
use crate::gencoeff::EngineConfig;
use crate::gf2::{BitMat, BitVec};
use crate::synth::{self, PipelineConfig, PipelineOp, PipelineRun};

/// Generator of the Reed-Muller code `RM(r, m)` via `(u, u⊕v)`:
/// rows `[u, u]` for `u ∈ RM(r, m−1)` and `[0, v]` for `v ∈ RM(r−1, m−1)`.
pub fn rm_generator(r: usize, m: usize) -> Result<BitMat> {
    if r > m || m > 20 {
        return Err(Error::Invalid(format!("RM({r},{m}) is out of range")));
    }
    let n = 1usize << m;
    if r == 0 {
        return BitMat::new(n, vec![BitVec::ones(n)]);
    }
    if r == m {
        return Ok(BitMat::identity(n));
    }
    let half = n / 2;
    let mut rows: Vec<BitVec> = rm_generator(r, m - 1)?
        .rows()
        .iter()
        .map(|u| u.concat(u))
        .collect();
    rows.extend(
        rm_generator(r - 1, m - 1)?
            .rows()
            .iter()
            .map(|v| BitVec::zeros(half).concat(v)),
    );
    BitMat::new(n, rows)
}

/// `C₁ = RM(r, m)`, `C₂ = RM(r−1, m)`, Z-stabilizers from `RM(m−r−1, m)`.
pub fn qrm_code(r: usize, m: usize) -> Result<CssCode> {
    if r == 0 || r >= m {
        return Err(Error::Invalid(format!(
            "quantum RM({r},{m}) needs 1 <= r < m"
        )));
    }
    let n = 1usize << m;
    let x = rm_generator(r - 1, m)?;
    let z = rm_generator(m - r - 1, m)?;
    CssCode::new(n, x.rows(), z.rows(), &BitVec::zeros(n))
}

pub fn steane() -> CssCode {
    let h = BitMat::from_strs(&["1010101", "0110011", "0001111"]).expect("static rows");
    CssCode::new(7, h.rows(), h.rows(), &BitVec::zeros(7)).expect("Steane code is valid")
}

pub fn four22() -> CssCode {
    qrm_code(1, 2).expect("RM(1,2) is valid")
}

/// Shortened `RM(r, m)`: keep codewords vanishing on coordinate 0, then drop it.
fn shortened_rm(r: usize, m: usize) -> Result<Vec<BitVec>> {
    let (g, pivots) = rm_generator(r, m)?.rref()?;
    Ok(g.rows()
        .iter()
        .zip(pivots)
        .filter(|(_, p)| *p != 0)
        .map(|(row, _)| row.delete(0))
        .collect())
}

/// The `[[2^{l+1}−1, 1, 3]]` punctured quantum Reed-Muller code.
pub fn punctured_qrm(l: usize) -> Result<CssCode> {
    if !(2..=8).contains(&l) {
        return Err(Error::Invalid(format!(
            "punctured QRM needs 2 <= l <= 8, got {l}"
        )));
    }
    let n = (1usize << (l + 1)) - 1;
    let x = shortened_rm(1, l + 1)?;
    let z = shortened_rm(l - 1, l + 1)?;
    CssCode::new(n, &x, &z, &BitVec::zeros(n))
}

/// Half removal applied to the concatenated punctured QRM code: `[[2^{l+2}−2, 2, 2]]` with
/// the gate `transversal_zrot(2^{l+2}−2, l+1)`.
pub fn triorthogonal_2(l: usize) -> Result<(CssCode, DiagonalGate)> {
    let base = punctured_qrm(l)?;
    let code = synth::concatenate(&base)?;
    let gate = transversal_zrot(code.n(), l as u32 + 1)?;
    let r = synth::remove_z_half(&code, &gate, &EngineConfig::default())?;
    if !r.admissible {
        return Err(Error::NotPreserved(r.norm.to_string()));
    }
    Ok((r.code, gate))
}

/// Iterated concatenation and half removal from `[[4,2,2]]`:
/// `[[2^l, l, 2]]` with gate `transversal_zrot(2^l, l)` and the expected
/// trivial row `((2^{l−1}−1)/2^{l−1}, −1/2^{l−1}, …)` up to a global phase.
pub fn family_2l_l_2(l: usize) -> Result<(CssCode, DiagonalGate, Vec<Cyclo>)> {
    if !(2..=7).contains(&l) {
        return Err(Error::Invalid(format!(
            "[[2^l,l,2]] family needs 2 <= l <= 7, got {l}"
        )));
    }
    let mut code = four22();
    let mut gate = transversal_zrot(4, 2)?;
    for _ in 2..l {
        code = synth::concatenate(&code)?;
        gate = gate.lift(LiftPolicy::NextLevelRotation)?;
        let r = synth::remove_z_half(&code, &gate, &EngineConfig::default())?;
        if !r.admissible {
            return Err(Error::NotPreserved(r.norm.to_string()));
        }
        code = r.code;
    }
    let e = (l - 1) as u32;
    let mut row = vec![Cyclo::dyadic(-1, e); 1 << l];
    row[0] = Cyclo::dyadic((1 << e) - 1, e);
    Ok((code, gate, row))
}

/// Steps and counts of one `(r, m) → (r+1, m+h)` QRM transformation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QrmPipeline {
    pub h: usize,
    pub concatenations: usize,
    pub removals: usize,
    pub additions: usize,
    pub ops: Vec<PipelineOp>,
    pub run: PipelineRun,
    /// Code right after the concatenations and after the removals.
    pub concatenated: CssCode,
    pub removed: CssCode,
}

/// Plan for `qrm_pipeline`: concatenate `h = r + m/r + 1` times, retarget the
/// gate to `transversal_zrot(2^{m+h}, r+2)`, remove Z-stabilizers until
/// `C₁ = RM(r+1, m+h)`, add X-stabilizers until `C₂ = RM(r, m+h)`.
pub fn qrm_plan(r: usize, m: usize) -> Result<(Vec<PipelineOp>, usize)> {
    if r == 0 || !m.is_multiple_of(r) || r >= m {
        return Err(Error::Invalid(format!(
            "QRM pipeline needs 1 <= r < m and r | m, got ({r},{m})"
        )));
    }
    let h = r + m / r + 1;
    let mut code = qrm_code(r, m)?;
    let mut ops = Vec::new();
    for _ in 0..h {
        code = synth::concatenate(&code)?;
        ops.push(PipelineOp::Concat {
            lift: LiftPolicy::IdentityTensor,
        });
    }
    let n = code.n();
    ops.push(PipelineOp::Retarget {
        gate: GateJson::TransversalZrot { n, l: r as u32 + 2 },
    });
    let target = qrm_code(r + 1, m + h)?;
    for w0 in target.c1().complement_basis(code.c1())?.rows() {
        ops.push(PipelineOp::RemoveZ { w0: w0.clone() });
    }
    // After the removals C₁ equals the target's, so additions complete C₂ inside it.
    for x0 in target.c2().complement_basis(code.c2())?.rows() {
        ops.push(PipelineOp::AddX { x0: x0.clone() });
    }
    Ok((ops, h))
}

/// Runs the full QRM transformation starting from `qrm_code(r, m)` with the
/// gate `transversal_zrot(2^m, r+1)`.
pub fn qrm_pipeline(r: usize, m: usize, cfg: &PipelineConfig) -> Result<QrmPipeline> {
    let (ops, h) = qrm_plan(r, m)?;
    let start = qrm_code(r, m)?;
    let gate = transversal_zrot(start.n(), r as u32 + 1)?;
    let run = synth::run_pipeline(&start, &gate, &ops, cfg)?;
    let count = |f: fn(&PipelineOp) -> bool| ops.iter().filter(|o| f(o)).count();
    let removals = count(|o| matches!(o, PipelineOp::RemoveZ { .. }));
    let additions = count(|o| matches!(o, PipelineOp::AddX { .. }));
    let mut concatenated = start.clone();
    for _ in 0..h {
        concatenated = synth::concatenate(&concatenated)?;
    }
    let removed = CssCode::from_spaces(
        concatenated.c2().clone(),
        qrm_code(r + 1, m + h)?.c1_perp().clone(),
        concatenated.y(),
    )?;
    Ok(QrmPipeline {
        h,
        concatenations: h,
        removals,
        additions,
        ops,
        run,
        concatenated,
        removed,
    })
}

/// Counts predicted by the closed formula: removals
/// `C(m+h, r+1) + C(m+h, r) − C(m, r)`, additions `C(m+h, r)`.
pub fn qrm_formula_counts(r: usize, m: usize) -> (usize, usize) {
    let h = r + m / r + 1;
    let c = binomial;
    (c(m + h, r + 1) + c(m + h, r) - c(m, r), c(m + h, r))
}

/// A family member with its physical gate and expected parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    pub name: String,
    pub code: CssCode,
    pub gate: DiagonalGate,
    pub expected: Expected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Expected {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub logical: String,
}

fn expected(n: usize, k: usize, d: usize, logical: &str) -> Expected {
    Expected {
        n,
        k,
        d,
        logical: logical.to_string(),
    }
}

/// `Z^{1/2^j}` by its usual name.
fn root_name(j: u32) -> String {
    match j {
        0 => "Z".into(),
        1 => "P".into(),
        2 => "T".into(),
        j => format!("Z^{{1/{}}}", 1u64 << j),
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Family names accepted by [`named`].
pub const NAMES: [&str; 7] = [
    "steane",
    "four22",
    "two_l",
    "tri2",
    "pqrm",
    "qrm",
    "qrm_pipeline",
];

/// Builds a named family member. `params` holds `l` or `(r, m)`.
pub fn named(name: &str, params: &[usize]) -> Result<Family> {
    let want = |count: usize| -> Result<()> {
        if params.len() != count {
            return Err(Error::Invalid(format!(
                "family {name} takes {count} parameter(s), got {}",
                params.len()
            )));
        }
        Ok(())
    };
    let (code, gate, exp) = match name {
        "steane" => {
            want(0)?;
            (steane(), transversal_zrot(7, 2)?, expected(7, 1, 3, "P†"))
        }
        "four22" => {
            want(0)?;
            (four22(), transversal_zrot(4, 2)?, expected(4, 2, 2, "CZ"))
        }
        "two_l" => {
            want(1)?;
            let l = params[0];
            let (code, gate, _) = family_2l_l_2(l)?;
            let logical = format!("C^({})Z", l - 1);
            (code, gate, expected(1 << l, l, 2, &logical))
        }
        "tri2" => {
            want(1)?;
            let l = params[0];
            let (code, gate) = triorthogonal_2(l)?;
            let logical = format!("({}†)^⊗2", root_name(l as u32));
            (code, gate, expected((1 << (l + 2)) - 2, 2, 2, &logical))
        }
        "pqrm" => {
            want(1)?;
            let l = params[0];
            let code = punctured_qrm(l)?;
            let gate = transversal_zrot(code.n(), l as u32)?;
            let logical = format!("{}†", root_name(l as u32 - 1));
            (code, gate, expected((1 << (l + 1)) - 1, 1, 3, &logical))
        }
        "qrm" => {
            want(2)?;
            let (r, m) = (params[0], params[1]);
            let code = qrm_code(r, m)?;
            let gate = transversal_zrot(code.n(), r as u32 + 1)?;
            let d = 1usize << r.min(m - r);
            (code, gate, expected(1 << m, binomial(m, r), d, "diagonal"))
        }
        "qrm_pipeline" => {
            want(2)?;
            let (r, m) = (params[0], params[1]);
            let (_, h) = qrm_plan(r, m)?;
            let code = qrm_code(r + 1, m + h)?;
            let gate = transversal_zrot(code.n(), r as u32 + 2)?;
            let d = 1usize << (r + 1).min(m + h - r - 1);
            (
                code,
                gate,
                expected(1 << (m + h), binomial(m + h, r + 1), d, "diagonal"),
            )
        }
        other => {
            return Err(Error::Invalid(format!(
                "unknown family \"{other}\" (known: {})",
                NAMES.join(", ")
            )))
        }
    };
    Ok(Family {
        name: name.to_string(),
        code,
        gate,
        expected: exp,
    })
}
