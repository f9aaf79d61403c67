//! Floating-point cross-check of the exact engine from explicit codewords.
//!
//! The logical block `M[β][α] = ⟨β_L| U |α_L⟩` is summed over the sparse
//! supports of the encoded basis states, with no use of generator
//! coefficients.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::code::CssCode;
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::gate::DiagonalGate;
use crate::gencoeff::{self, EngineConfig};
use crate::gf2::{gray_steps, BitVec};

/// Largest physical length the oracle accepts.
pub const ORACLE_MAX_N: usize = 24;
/// Cap on `k + dim C₂` (number of codeword terms, log2).
pub const ORACLE_TERMS_LOG2: usize = 24;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct LogicalBlock {
    pub k: usize,
    /// Row `β`, column `α`.
    pub entries: Vec<Vec<Complex64>>,
}

impl LogicalBlock {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// `max |(M†M − I)_{ij}|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0f64;
        for i in 0..d {
            for j in 0..d {
                let s: Complex64 = (0..d)
                    .map(|r| self.entries[r][i].conj() * self.entries[r][j])
                    .sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| self.entries[i][j].norm())
            .fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.entries[i][i]).collect()
    }
}

fn check_scale(code: &CssCode, gate: &DiagonalGate) -> Result<()> {
    if gate.n() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            found: gate.n(),
        });
    }
    let terms = code.k() + code.c2().dim();
    if code.n() > ORACLE_MAX_N || terms > ORACLE_TERMS_LOG2 {
        return Err(Error::Invalid(format!(
            "oracle limit: n = {} (max {ORACLE_MAX_N}), k + dim C2 = {terms} (max {ORACLE_TERMS_LOG2})",
            code.n()
        )));
    }
    Ok(())
}

fn c2_elements(code: &CssCode) -> Vec<BitVec> {
    let rows = code.c2().basis().rows();
    let mut v = BitVec::zeros(code.n());
    let mut out = vec![v.clone()];
    for j in gray_steps(rows.len() as u32) {
        v.xor_assign(&rows[j]);
        out.push(v.clone());
    }
    out
}

fn float_entry(gate: &DiagonalGate, u: &BitVec) -> Result<Complex64> {
    let e = gate.entry_exponent(u)? as f64;
    let order = (1u64 << gate.level()) as f64;
    Ok(Complex64::from_polar(1.0, 2.0 * PI * e / order))
}

/// Logical block of a diagonal gate in the code's logical basis.
pub fn logical_block(code: &CssCode, gate: &DiagonalGate) -> Result<LogicalBlock> {
    check_scale(code, gate)?;
    let size = 1usize << code.k();
    let c2 = c2_elements(code);
    let amp2 = 1.0 / c2.len() as f64;
    let supports: Vec<Vec<BitVec>> = (0..size)
        .map(|a| {
            let shift = code.x_logical_rep(a as u64).xor(code.y());
            c2.iter().map(|x| x.xor(&shift)).collect()
        })
        .collect();
    let mut owner: HashMap<&BitVec, usize> = HashMap::new();
    for (b, supp) in supports.iter().enumerate() {
        for u in supp {
            owner.insert(u, b);
        }
    }
    let mut entries = vec![vec![Complex64::new(0.0, 0.0); size]; size];
    for (a, supp) in supports.iter().enumerate() {
        for u in supp {
            if let Some(&b) = owner.get(u) {
                entries[b][a] += float_entry(gate, u)? * amp2;
            }
        }
    }
    Ok(LogicalBlock {
        k: code.k(),
        entries,
    })
}

/// Exact `⟨β_L|U|β_L⟩ = |C₂|^{-1} Σ_{x∈C₂} d_{β·G_X ⊕ x ⊕ y}` by direct
/// enumeration of the codeword.
pub fn exact_logical_entry(code: &CssCode, gate: &DiagonalGate, beta: u64) -> Result<Cyclo> {
    let level = gate.level();
    let order = 1usize << level;
    let mut counts = vec![0i64; order];
    let rows = code.c2().basis().rows();
    let mut u = code.x_logical_rep(beta).xor(code.y());
    counts[gate.entry_exponent(&u)? as usize % order] += 1;
    for j in gray_steps(rows.len() as u32) {
        u.xor_assign(&rows[j]);
        counts[gate.entry_exponent(&u)? as usize % order] += 1;
    }
    Cyclo::from_exponent_counts(level, &counts, code.c2().dim() as u32)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub beta: usize,
    pub numeric: [f64; 2],
    pub predicted: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrosscheckReport {
    pub tol: f64,
    pub preserved_exact: bool,
    pub unitary_numeric: bool,
    pub verdicts_agree: bool,
    pub unitarity_deviation: f64,
    /// `max_β |M[β][β] − Σ_α A_{0,g(α)} (−1)^{α·β}|`.
    pub diagonal_deviation: f64,
    pub off_diagonal: f64,
    pub witness: Option<Witness>,
    pub passed: bool,
}

/// Compares the oracle block of `(code, gate)` with the exact engine.
pub fn crosscheck(
    code: &CssCode,
    gate: &DiagonalGate,
    cfg: &EngineConfig,
    tol: f64,
) -> Result<CrosscheckReport> {
    let block = logical_block(code, gate)?;
    compare(&block, code, gate, cfg, tol)
}

/// Compares a logical block computed elsewhere with the exact engine's
/// predictions for `(code, gate)`.
pub fn compare(
    block: &LogicalBlock,
    code: &CssCode,
    gate: &DiagonalGate,
    cfg: &EngineConfig,
    tol: f64,
) -> Result<CrosscheckReport> {
    let row = gencoeff::trivial_row(code, gate, cfg)?;
    let preserved_exact = row.norm().is_one();
    let a: Vec<Complex64> = row.entries.iter().map(|(_, v)| v.to_complex()).collect();
    let size = a.len();
    if size != block.dim() {
        return Err(Error::LengthMismatch {
            expected: size,
            found: block.dim(),
        });
    }
    let predicted: Vec<Complex64> = (0..size)
        .map(|b| {
            (0..size)
                .map(|al| {
                    if (al & b).count_ones() % 2 == 1 {
                        -a[al]
                    } else {
                        a[al]
                    }
                })
                .sum()
        })
        .collect();
    let diag = block.diagonal();
    let (worst_beta, diagonal_deviation) = (0..size)
        .map(|b| (b, (diag[b] - predicted[b]).norm()))
        .fold((0, 0f64), |acc, x| if x.1 > acc.1 { x } else { acc });
    let unitarity_deviation = block.unitarity_deviation();
    let off_diagonal = block.max_off_diagonal();
    let unitary_numeric = unitarity_deviation < tol;
    let verdicts_agree = unitary_numeric == preserved_exact;
    let witness = (diagonal_deviation >= tol).then(|| Witness {
        beta: worst_beta,
        numeric: [diag[worst_beta].re, diag[worst_beta].im],
        predicted: [predicted[worst_beta].re, predicted[worst_beta].im],
    });
    let passed = verdicts_agree && witness.is_none() && (!preserved_exact || off_diagonal < tol);
    Ok(CrosscheckReport {
        tol,
        preserved_exact,
        unitary_numeric,
        verdicts_agree,
        unitarity_deviation,
        diagonal_deviation,
        off_diagonal,
        witness,
        passed,
    })
}
