//! Generator coefficients of a diagonal gate on a CSS code.
//!
//! Two equivalent sums give `A_{μ,γ}`:
//!
//! * Z side: `Σ_{z ∈ C₁^⊥+μ+γ} (−1)^{z·y} f(z)`, `2^{dim C₁^⊥}` terms;
//! * X side: `|C₁|^{-1} Σ_{v ∈ C₁} (−1)^{(μ⊕γ)·v} d_{v⊕y}`, `2^{dim C₁}` terms.
//!
//! The engine walks cosets in Gray-code order so that each step changes the
//! current vector by one basis row and the gate exponent is updated
//! incrementally. Sums are accumulated as integer histograms over exponents
//! and only converted to [`Cyclo`] at the end.
//!
//! For the trivial syndrome the X-side walk over `C₁ = C₂ ⊕ span(G_X)` is
//! bucketed by logical label `β`: because the frame is paired
//! (`G_X G_Zᵀ = I`), `γ_α·v = α·β`, so one walk yields the whole row by a
//! Walsh-Hadamard transform over `β`, and the bucket sums themselves are the
//! logical diagonal `λ_β = |C₂|^{-1} Σ_{x∈C₂} d_{β G_X ⊕ x ⊕ y}`.

use std::collections::HashMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::code::CssCode;
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::gate::{block_index, qfd_exponent, Block, DiagonalGate, LocalDiag, QFD_DENSE_CAP};
use crate::gf2::{gray_steps, BitVec, DEFAULT_BUDGET_LOG2};

/// Largest `k` for which full rows (`2^k` exact entries) are materialised.
pub const ROW_CAP_LOG2: u32 = 16;

/// Largest `k` for which a per-logical histogram is kept in memory.
pub const HIST_CAP_LOG2: u32 = 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    #[default]
    Auto,
    X,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    /// Maximum number of terms in one enumeration, as a power of two.
    pub budget_log2: u32,
    pub side: Side,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            budget_log2: DEFAULT_BUDGET_LOG2,
            side: Side::Auto,
        }
    }
}

impl EngineConfig {
    pub fn with_side(side: Side) -> Self {
        Self {
            side,
            ..Self::default()
        }
    }
}

/// Whether a table covers every logical or only requested ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exactness {
    #[serde(rename = "exact-full")]
    Full,
    #[serde(rename = "exact-sampled")]
    Sampled,
}

/// Generator coefficients for one syndrome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenCoeffRow {
    pub mu: BitVec,
    /// `(γ, A_{μ,γ})`; for full rows `entries[α]` belongs to `γ = α·G_Z`.
    pub entries: Vec<(BitVec, Cyclo)>,
    pub exactness: Exactness,
}

impl GenCoeffRow {
    pub fn values(&self) -> Vec<Cyclo> {
        self.entries.iter().map(|(_, v)| v.clone()).collect()
    }

    /// `Σ_γ |A_{μ,γ}|²`.
    pub fn norm(&self) -> Cyclo {
        self.entries.iter().map(|(_, v)| v.abs_sq()).sum()
    }

    pub fn to_json(&self) -> Vec<RowEntryJson> {
        self.entries
            .iter()
            .map(|(g, v)| RowEntryJson {
                gamma: g.clone(),
                value: v.clone(),
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowEntryJson {
    pub gamma: BitVec,
    pub value: Cyclo,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preservation {
    pub preserved: bool,
    /// `Σ_γ |A_{0,γ}|²`, exact and real.
    pub norm: Cyclo,
}

/// Induced logical diagonal: entry `β` is `ζ_{2^level}^{exponents[β]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalDiagonal {
    pub k: usize,
    pub level: u32,
    pub entries: Vec<Cyclo>,
    pub exponents: Vec<u64>,
}

impl LogicalDiagonal {
    /// Builds from exact entries, checking that each is a root of unity.
    pub fn from_entries(k: usize, entries: Vec<Cyclo>) -> Result<Self> {
        let level = entries.iter().map(Cyclo::level).max().unwrap_or(1);
        let mut exponents = Vec::with_capacity(entries.len());
        for (b, e) in entries.iter().enumerate() {
            match e.root_exponent_at(level) {
                Some(x) => exponents.push(x),
                None => {
                    return Err(Error::NonUnimodularEntry {
                        beta: BitVec::from_u64(k, b as u64).to_string(),
                        value: e.to_string(),
                    })
                }
            }
        }
        Ok(Self {
            k,
            level,
            entries,
            exponents,
        })
    }
}

/// Everything derivable from one trivial-syndrome walk.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub row: Option<GenCoeffRow>,
    pub preservation: Preservation,
    pub logical: Option<LogicalDiagonal>,
}

// ---------------------------------------------------------------------------
// Exponent tracking along a walk.

enum Tracker<'a> {
    /// Every qubit carries the same single-qubit diagonal: `e = base + delta·|u|`.
    Uniform {
        base: u64,
        delta: u64,
        mask: u64,
    },
    Blocks {
        level: u32,
        blocks: &'a [Block],
        touched: Vec<Vec<usize>>,
        idx: Vec<usize>,
        e: u64,
        mask: u64,
    },
    Qfd {
        r: &'a [Vec<u64>],
        m: u64,
    },
}

fn uniform_diag(n: usize, blocks: &[Block]) -> Option<&LocalDiag> {
    if blocks.len() != n || blocks.iter().any(|b| b.qubits.len() != 1) {
        return None;
    }
    let first = &blocks[0].diag;
    blocks.iter().all(|b| b.diag == *first).then_some(first)
}

impl<'a> Tracker<'a> {
    fn new(gate: &'a DiagonalGate, rows: &[BitVec], start: &BitVec) -> Self {
        let level = gate.level();
        let m = 1u64 << level;
        match gate {
            DiagonalGate::Blocks { n, blocks } => {
                if blocks.is_empty() {
                    return Tracker::Uniform {
                        base: 0,
                        delta: 0,
                        mask: m - 1,
                    };
                }
                if let Some(d) = uniform_diag(*n, blocks) {
                    let a0 = d.exponent_at(0, level);
                    let a1 = d.exponent_at(1, level);
                    return Tracker::Uniform {
                        base: (a0 * *n as u64) % m,
                        delta: (a1 + m - a0) % m,
                        mask: m - 1,
                    };
                }
                let mut owner = vec![usize::MAX; *n];
                for (bi, b) in blocks.iter().enumerate() {
                    for &q in &b.qubits {
                        owner[q] = bi;
                    }
                }
                let touched = rows
                    .iter()
                    .map(|r| {
                        let mut t: Vec<usize> = r
                            .support()
                            .into_iter()
                            .map(|q| owner[q])
                            .filter(|&b| b != usize::MAX)
                            .collect();
                        t.sort_unstable();
                        t.dedup();
                        t
                    })
                    .collect();
                let idx: Vec<usize> = blocks
                    .iter()
                    .map(|b| block_index(&b.qubits, start))
                    .collect();
                let e = blocks
                    .iter()
                    .zip(&idx)
                    .map(|(b, &i)| b.diag.exponent_at(i, level))
                    .sum::<u64>()
                    % m;
                Tracker::Blocks {
                    level,
                    blocks,
                    touched,
                    idx,
                    e,
                    mask: m - 1,
                }
            }
            DiagonalGate::Qfd { r, .. } => Tracker::Qfd { r, m },
        }
    }

    #[inline]
    fn exponent(&mut self, u: &BitVec, flipped: Option<usize>) -> u64 {
        match self {
            Tracker::Uniform { base, delta, mask } => (*base + *delta * u.weight() as u64) & *mask,
            Tracker::Blocks {
                level,
                blocks,
                touched,
                idx,
                e,
                mask,
            } => {
                if let Some(j) = flipped {
                    for &b in &touched[j] {
                        let blk = &blocks[b];
                        let new = block_index(&blk.qubits, u);
                        let old = std::mem::replace(&mut idx[b], new);
                        *e = (*e + blk.diag.exponent_at(new, *level) + (*mask + 1)
                            - blk.diag.exponent_at(old, *level))
                            & *mask;
                    }
                }
                *e
            }
            Tracker::Qfd { r, m } => qfd_exponent(r, &u.support(), *m),
        }
    }
}

/// Visits every vector `start ⊕ span(rows)` in Gray-code order, reporting the
/// flipped row (none for the first vector) and the gate exponent there.
fn walk_coset(
    gate: &DiagonalGate,
    start: &BitVec,
    rows: &[BitVec],
    mut visit: impl FnMut(Option<usize>, u64),
) {
    let mut u = start.clone();
    let mut tracker = Tracker::new(gate, rows, &u);
    visit(None, tracker.exponent(&u, None));
    for j in gray_steps(rows.len() as u32) {
        u.xor_assign(&rows[j]);
        let e = tracker.exponent(&u, Some(j));
        visit(Some(j), e);
    }
}

fn check_budget(required: usize, budget: u32) -> Result<()> {
    if required as u32 > budget {
        return Err(Error::BudgetExceeded {
            required: required as u32,
            budget,
        });
    }
    Ok(())
}

fn check_len(code: &CssCode, v: &BitVec) -> Result<()> {
    if v.len() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            found: v.len(),
        });
    }
    Ok(())
}

fn check_gate(code: &CssCode, gate: &DiagonalGate) -> Result<()> {
    if gate.n() != code.n() {
        return Err(Error::LengthMismatch {
            expected: code.n(),
            found: gate.n(),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Folded exponent histograms: slot j < h holds the coefficient of ζ^j, using
// ζ^{j+h} = −ζ^j.

fn fold_into(slots: &mut [i64], e: u64, positive: bool) {
    let h = slots.len() as u64;
    let (j, neg) = if e >= h { (e - h, true) } else { (e, false) };
    if neg ^ !positive {
        slots[j as usize] -= 1;
    } else {
        slots[j as usize] += 1;
    }
}

fn slots_to_cyclo(level: u32, slots: &[i64], denom_exp: u32) -> Cyclo {
    Cyclo::new(
        level,
        slots.iter().map(|&c| BigInt::from(c)).collect(),
        denom_exp,
    )
    .expect("slot vector matches level")
}

/// `Σ |c|²` over folded slot vectors, exact in `i128`.
fn sum_abs_sq(level: u32, vectors: impl Iterator<Item = Vec<i64>>, denom_exp: u32) -> Cyclo {
    let h = 1usize << (level - 1);
    let mut acc = vec![0i128; h];
    for c in vectors {
        // c · conj(c), conj(ζ^j) = −ζ^{h−j} for j > 0.
        let mut conj = vec![0i64; h];
        conj[0] = c[0];
        for j in 1..h {
            conj[h - j] = -c[j];
        }
        for (i, &a) in c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in conj.iter().enumerate() {
                let p = a as i128 * b as i128;
                if i + j < h {
                    acc[i + j] += p;
                } else {
                    acc[i + j - h] -= p;
                }
            }
        }
    }
    Cyclo::new(
        level,
        acc.into_iter().map(BigInt::from).collect(),
        denom_exp,
    )
    .expect("slot vector matches level")
}

/// In-place Walsh-Hadamard transform over the leading index of a
/// `2^k × h` row-major table.
fn wht_slots(data: &mut [i64], k: usize, h: usize) {
    for bit in 0..k {
        let step = 1usize << bit;
        for base in 0..1usize << k {
            if base & step != 0 {
                continue;
            }
            let (lo, hi) = (base * h, (base | step) * h);
            for t in 0..h {
                let a = data[lo + t];
                let b = data[hi + t];
                data[lo + t] = a + b;
                data[hi + t] = a - b;
            }
        }
    }
}

/// Per-logical histogram of `C₁ + shift`, entries evaluated at `v ⊕ shift ⊕ y`.
struct LogicalHistogram {
    k: usize,
    level: u32,
    h: usize,
    data: Vec<i64>,
}

impl LogicalHistogram {
    fn bucket(&self, beta: usize) -> &[i64] {
        &self.data[beta * self.h..(beta + 1) * self.h]
    }
}

fn logical_histogram(
    code: &CssCode,
    gate: &DiagonalGate,
    shift: &BitVec,
    budget_log2: u32,
) -> Result<LogicalHistogram> {
    let k = code.k();
    check_budget(code.c1().dim(), budget_log2)?;
    check_budget(k, HIST_CAP_LOG2)?;
    let level = gate.level();
    let h = 1usize << (level - 1);
    let mut rows: Vec<BitVec> = code.x_stabilizers().rows().to_vec();
    let mut labels = vec![0usize; rows.len()];
    for (j, r) in code.frame().x_logical.rows().iter().enumerate() {
        rows.push(r.clone());
        labels.push(1 << j);
    }
    let start = shift.xor(code.y());
    let mut data = vec![0i64; (1usize << k) * h];
    let mut beta = 0usize;
    walk_coset(gate, &start, &rows, |flip, e| {
        if let Some(j) = flip {
            beta ^= labels[j];
        }
        fold_into(&mut data[beta * h..(beta + 1) * h], e, true);
    });
    Ok(LogicalHistogram { k, level, h, data })
}

// ---------------------------------------------------------------------------
// Public operations.

/// Which side a single-coefficient enumeration should use.
fn choose_side(code: &CssCode, gate: &DiagonalGate, cfg: &EngineConfig) -> Result<Side> {
    let dx = code.c1().dim();
    let dz = code.c1_perp().dim();
    let z_ok = !matches!(gate, DiagonalGate::Qfd { n, .. } if *n > QFD_DENSE_CAP);
    let side = match cfg.side {
        Side::Auto => {
            if dz < dx && z_ok {
                Side::Z
            } else {
                Side::X
            }
        }
        s => s,
    };
    match side {
        Side::X => check_budget(dx, cfg.budget_log2)?,
        Side::Z => {
            if !z_ok {
                return Err(Error::QfdTooLarge(gate.n()));
            }
            let extra = if matches!(gate, DiagonalGate::Qfd { .. }) {
                gate.n()
            } else {
                0
            };
            check_budget(dz + extra, cfg.budget_log2)?
        }
        Side::Auto => unreachable!(),
    }
    Ok(side)
}

/// Exact `A_{μ,γ}`.
pub fn coefficient(
    code: &CssCode,
    gate: &DiagonalGate,
    mu: &BitVec,
    gamma: &BitVec,
    cfg: &EngineConfig,
) -> Result<Cyclo> {
    check_gate(code, gate)?;
    check_len(code, mu)?;
    check_len(code, gamma)?;
    match choose_side(code, gate, cfg)? {
        Side::X => Ok(coefficient_x(code, gate, &mu.xor(gamma))),
        _ => coefficient_z(code, gate, &mu.xor(gamma)),
    }
}

/// X side: `|C₁|^{-1} Σ_{v∈C₁} (−1)^{c·v} d_{v⊕y}` with `c = μ⊕γ`.
fn coefficient_x(code: &CssCode, gate: &DiagonalGate, c: &BitVec) -> Cyclo {
    let rows = code.c1().basis().rows();
    let flips: Vec<bool> = rows.iter().map(|r| r.dot(c)).collect();
    let level = gate.level();
    let mut slots = vec![0i64; 1 << (level - 1)];
    let mut positive = true;
    walk_coset(gate, code.y(), rows, |flip, e| {
        if let Some(j) = flip {
            positive ^= flips[j];
        }
        fold_into(&mut slots, e, positive);
    });
    slots_to_cyclo(level, &slots, code.c1().dim() as u32)
}

/// Z side: `Σ_{z ∈ C₁^⊥ + c} (−1)^{z·y} f(z)`.
fn coefficient_z(code: &CssCode, gate: &DiagonalGate, c: &BitVec) -> Result<Cyclo> {
    let rows = code.c1_perp().basis().rows();
    let y = code.y();
    match gate {
        DiagonalGate::Qfd { .. } => {
            let mut z = c.clone();
            let mut acc = Cyclo::zero();
            let mut visit = |z: &BitVec| -> Result<()> {
                let f = gate.pauli_coeff(z)?;
                acc = if z.dot(y) { &acc - &f } else { &acc + &f };
                Ok(())
            };
            visit(&z)?;
            for j in gray_steps(rows.len() as u32) {
                z.xor_assign(&rows[j]);
                visit(&z)?;
            }
            Ok(acc)
        }
        DiagonalGate::Blocks { n, blocks } => Ok(SignatureSum::new(*n, blocks).sum(c, rows, y)),
    }
}

/// Z-side accumulator: `f(z)` factorises over blocks, so `z` only matters
/// through how many blocks of each type show each local pattern.
struct SignatureSum<'a> {
    blocks: &'a [Block],
    block_type: Vec<usize>,
    tables: Vec<Vec<Cyclo>>,
    uncovered: BitVec,
}

impl<'a> SignatureSum<'a> {
    fn new(n: usize, blocks: &'a [Block]) -> Self {
        let mut types: Vec<&LocalDiag> = Vec::new();
        let mut block_type = Vec::with_capacity(blocks.len());
        let mut uncovered = BitVec::ones(n);
        for b in blocks {
            for &q in &b.qubits {
                uncovered.set(q, false);
            }
            let t = match types.iter().position(|d| **d == b.diag) {
                Some(t) => t,
                None => {
                    types.push(&b.diag);
                    types.len() - 1
                }
            };
            block_type.push(t);
        }
        let tables = types.iter().map(|d| d.pauli_table()).collect();
        Self {
            blocks,
            block_type,
            tables,
            uncovered,
        }
    }

    /// Offset of `(type, pattern)` in the signature vector.
    fn offsets(&self) -> Vec<usize> {
        let mut off = Vec::with_capacity(self.tables.len());
        let mut acc = 0;
        for t in &self.tables {
            off.push(acc);
            acc += t.len();
        }
        off
    }

    fn sum(&self, start: &BitVec, rows: &[BitVec], y: &BitVec) -> Cyclo {
        let offsets = self.offsets();
        let width = offsets
            .last()
            .map_or(0, |o| o + self.tables.last().unwrap().len());
        let mut signature = vec![0u32; width];
        let mut pattern: Vec<usize> = self
            .blocks
            .iter()
            .map(|b| block_index(&b.qubits, start))
            .collect();
        for (b, &p) in pattern.iter().enumerate() {
            signature[offsets[self.block_type[b]] + p] += 1;
        }
        let mut owner = vec![usize::MAX; start.len()];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &q in &b.qubits {
                owner[q] = bi;
            }
        }
        let touched: Vec<Vec<usize>> = rows
            .iter()
            .map(|r| {
                let mut t: Vec<usize> = r
                    .support()
                    .into_iter()
                    .map(|q| owner[q])
                    .filter(|&b| b != usize::MAX)
                    .collect();
                t.sort_unstable();
                t.dedup();
                t
            })
            .collect();
        let row_sign: Vec<bool> = rows.iter().map(|r| r.dot(y)).collect();
        let row_unc: Vec<bool> = rows
            .iter()
            .map(|r| r.and_weight(&self.uncovered) > 0)
            .collect();

        let mut hist: HashMap<Vec<u32>, i64> = HashMap::new();
        let mut z = start.clone();
        let mut negative = start.dot(y);
        let mut unc_weight = start.and_weight(&self.uncovered);
        let mut record = |signature: &Vec<u32>, negative: bool, unc_weight: usize| {
            if unc_weight == 0 {
                *hist.entry(signature.clone()).or_insert(0) += if negative { -1 } else { 1 };
            }
        };
        record(&signature, negative, unc_weight);
        for j in gray_steps(rows.len() as u32) {
            let r = &rows[j];
            z.xor_assign(r);
            negative ^= row_sign[j];
            for &b in &touched[j] {
                let off = offsets[self.block_type[b]];
                signature[off + pattern[b]] -= 1;
                pattern[b] = block_index(&self.blocks[b].qubits, &z);
                signature[off + pattern[b]] += 1;
            }
            if row_unc[j] {
                unc_weight = z.and_weight(&self.uncovered);
            }
            record(&signature, negative, unc_weight);
        }

        let mut total = Cyclo::zero();
        let mut powers: HashMap<(usize, usize, u32), Cyclo> = HashMap::new();
        for (sig, count) in hist {
            if count == 0 {
                continue;
            }
            let mut term = Cyclo::from_int(count);
            for (t, table) in self.tables.iter().enumerate() {
                for (p, f) in table.iter().enumerate() {
                    let c = sig[offsets[t] + p];
                    if c == 0 {
                        continue;
                    }
                    let pw = powers.entry((t, p, c)).or_insert_with(|| f.pow(c as u64));
                    term = &term * pw;
                    if term.is_zero() {
                        break;
                    }
                }
            }
            total = &total + &term;
        }
        total
    }
}

fn full_row_from_hist(code: &CssCode, hist: &LogicalHistogram) -> Result<GenCoeffRow> {
    check_budget(hist.k, ROW_CAP_LOG2)?;
    let mut data = hist.data.clone();
    wht_slots(&mut data, hist.k, hist.h);
    let denom = code.c1().dim() as u32;
    let entries = (0..1usize << hist.k)
        .map(|a| {
            let v = slots_to_cyclo(hist.level, &data[a * hist.h..(a + 1) * hist.h], denom);
            (code.z_logical_rep(a as u64), v)
        })
        .collect();
    Ok(GenCoeffRow {
        mu: BitVec::zeros(code.n()),
        entries,
        exactness: Exactness::Full,
    })
}

/// All `2^k` coefficients of the trivial syndrome.
pub fn trivial_row(code: &CssCode, gate: &DiagonalGate, cfg: &EngineConfig) -> Result<GenCoeffRow> {
    check_gate(code, gate)?;
    check_budget(code.k(), ROW_CAP_LOG2)?;
    let use_x = match cfg.side {
        Side::X => true,
        Side::Z => false,
        Side::Auto => code.c1().dim() <= cfg.budget_log2 as usize,
    };
    if use_x {
        let hist = logical_histogram(code, gate, &BitVec::zeros(code.n()), cfg.budget_log2)?;
        full_row_from_hist(code, &hist)
    } else {
        let gammas = code.z_logical_reps();
        sampled_row(
            code,
            gate,
            &BitVec::zeros(code.n()),
            &gammas,
            &EngineConfig {
                side: Side::Z,
                ..*cfg
            },
        )
        .map(|mut r| {
            r.exactness = Exactness::Full;
            r
        })
    }
}

/// Coefficients for an explicit list of `γ` at syndrome `μ`.
pub fn sampled_row(
    code: &CssCode,
    gate: &DiagonalGate,
    mu: &BitVec,
    gammas: &[BitVec],
    cfg: &EngineConfig,
) -> Result<GenCoeffRow> {
    let entries = gammas
        .iter()
        .map(|g| Ok((g.clone(), coefficient(code, gate, mu, g, cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GenCoeffRow {
        mu: mu.clone(),
        entries,
        exactness: Exactness::Sampled,
    })
}

fn norm_from_hist(code: &CssCode, hist: &LogicalHistogram) -> Cyclo {
    // Parseval: Σ_α |A_α|² = 2^{-k} Σ_β |λ_β|², λ_β = |C₂|^{-1}·bucket_β.
    let denom = (hist.k + 2 * code.c2().dim()) as u32;
    sum_abs_sq(
        hist.level,
        (0..1usize << hist.k).map(|b| hist.bucket(b).to_vec()),
        denom,
    )
}

fn logical_from_hist(code: &CssCode, hist: &LogicalHistogram) -> Result<LogicalDiagonal> {
    let denom = code.c2().dim() as u32;
    let entries = (0..1usize << hist.k)
        .map(|b| slots_to_cyclo(hist.level, hist.bucket(b), denom))
        .collect();
    LogicalDiagonal::from_entries(hist.k, entries)
}

/// Preservation test: `Σ_γ |A_{0,γ}|² = 1`.
pub fn is_preserved(
    code: &CssCode,
    gate: &DiagonalGate,
    cfg: &EngineConfig,
) -> Result<Preservation> {
    check_gate(code, gate)?;
    let x_feasible =
        code.c1().dim() <= cfg.budget_log2 as usize && code.k() <= HIST_CAP_LOG2 as usize;
    let norm = if cfg.side != Side::Z && x_feasible {
        let hist = logical_histogram(code, gate, &BitVec::zeros(code.n()), cfg.budget_log2)?;
        norm_from_hist(code, &hist)
    } else {
        trivial_row(
            code,
            gate,
            &EngineConfig {
                side: Side::Z,
                ..*cfg
            },
        )?
        .norm()
    };
    Ok(Preservation {
        preserved: norm.is_one(),
        norm,
    })
}

/// Induced logical diagonal `λ_β = Σ_α A_{0,g(α)} (−1)^{α·β}`.
pub fn induced_logical(
    code: &CssCode,
    gate: &DiagonalGate,
    cfg: &EngineConfig,
) -> Result<LogicalDiagonal> {
    let analysis = analyze(code, gate, cfg, false)?;
    if !analysis.preservation.preserved {
        return Err(Error::NotPreserved(analysis.preservation.norm.to_string()));
    }
    analysis
        .logical
        .ok_or_else(|| Error::NotPreserved(analysis.preservation.norm.to_string()))
}

/// Logical diagonal from a full row, by the defining transform.
pub fn logical_from_row(row: &GenCoeffRow) -> Result<LogicalDiagonal> {
    let size = row.entries.len();
    let k = size.trailing_zeros() as usize;
    let entries = (0..size)
        .map(|b| {
            row.entries
                .iter()
                .enumerate()
                .map(|(a, (_, v))| {
                    if (a & b).count_ones() % 2 == 1 {
                        -v
                    } else {
                        v.clone()
                    }
                })
                .sum()
        })
        .collect();
    LogicalDiagonal::from_entries(k, entries)
}

/// One walk: preservation, the logical diagonal when preserved, and the full
/// row when `with_row` and `k` is small enough.
pub fn analyze(
    code: &CssCode,
    gate: &DiagonalGate,
    cfg: &EngineConfig,
    with_row: bool,
) -> Result<Analysis> {
    check_gate(code, gate)?;
    let x_feasible =
        code.c1().dim() <= cfg.budget_log2 as usize && code.k() <= HIST_CAP_LOG2 as usize;
    if cfg.side == Side::Z || !x_feasible {
        let row = trivial_row(
            code,
            gate,
            &EngineConfig {
                side: Side::Z,
                ..*cfg
            },
        )?;
        let norm = row.norm();
        let preserved = norm.is_one();
        let logical = if preserved {
            Some(logical_from_row(&row)?)
        } else {
            None
        };
        return Ok(Analysis {
            row: Some(row),
            preservation: Preservation { preserved, norm },
            logical,
        });
    }
    let hist = logical_histogram(code, gate, &BitVec::zeros(code.n()), cfg.budget_log2)?;
    let norm = norm_from_hist(code, &hist);
    let preserved = norm.is_one();
    let logical = if preserved {
        Some(logical_from_hist(code, &hist)?)
    } else {
        None
    };
    let row = if with_row && hist.k <= ROW_CAP_LOG2 as usize {
        Some(full_row_from_hist(code, &hist)?)
    } else {
        None
    };
    Ok(Analysis {
        row,
        preservation: Preservation { preserved, norm },
        logical,
    })
}

/// Split quantities for removing the Z-stabilizers that detect `w0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitValues {
    /// `(γ, s_γ(w0))` over the old code's Z-logical representatives.
    pub entries: Vec<(BitVec, Cyclo)>,
    /// `Σ_γ |s_γ(w0)|²`.
    pub norm: Cyclo,
}

/// `s_γ(w0) = |C₁|^{-1} Σ_{u ∈ C₁+w0} (−1)^{γ·u} d_{u⊕y}` for every old
/// Z-logical representative `γ`.
pub fn split_values(
    code: &CssCode,
    gate: &DiagonalGate,
    w0: &BitVec,
    cfg: &EngineConfig,
) -> Result<SplitValues> {
    let hist = split_histogram(code, gate, w0, cfg)?;
    check_budget(hist.k, ROW_CAP_LOG2)?;
    let k = hist.k;
    let mut data = hist.data.clone();
    wht_slots(&mut data, k, hist.h);
    let denom = code.c1().dim() as u32;
    let entries = (0..1usize << k)
        .map(|a| {
            let gamma = code.z_logical_rep(a as u64);
            let v = slots_to_cyclo(hist.level, &data[a * hist.h..(a + 1) * hist.h], denom);
            (gamma.clone(), if gamma.dot(w0) { -v } else { v })
        })
        .collect();
    Ok(SplitValues {
        entries,
        norm: split_norm(code, &hist),
    })
}

/// `Σ_γ |s_γ(w0)|²` without materialising the split row.
pub fn split_norm_only(
    code: &CssCode,
    gate: &DiagonalGate,
    w0: &BitVec,
    cfg: &EngineConfig,
) -> Result<Cyclo> {
    let hist = split_histogram(code, gate, w0, cfg)?;
    Ok(split_norm(code, &hist))
}

fn split_histogram(
    code: &CssCode,
    gate: &DiagonalGate,
    w0: &BitVec,
    cfg: &EngineConfig,
) -> Result<LogicalHistogram> {
    check_gate(code, gate)?;
    check_len(code, w0)?;
    if code.c1().contains(w0)? {
        return Err(Error::AlreadyInC1(w0.to_string()));
    }
    logical_histogram(code, gate, w0, cfg.budget_log2)
}

fn split_norm(code: &CssCode, hist: &LogicalHistogram) -> Cyclo {
    // The sign (−1)^{γ_α·w0} is a character in α, so Parseval still applies.
    norm_from_hist(code, hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gate::{elementary_ckz, transversal_zrot};
    use crate::gf2::BitMat;

    fn steane() -> CssCode {
        let h = BitMat::from_strs(&["1111000", "1100110", "1010101"]).unwrap();
        CssCode::new(7, h.rows(), h.rows(), &BitVec::zeros(7)).unwrap()
    }

    fn four22() -> CssCode {
        let s: BitVec = "1111".parse().unwrap();
        let rows = [s];
        CssCode::new(4, &rows, &rows, &BitVec::zeros(4)).unwrap()
    }

    fn cfg(side: Side) -> EngineConfig {
        EngineConfig::with_side(side)
    }

    #[test]
    fn steane_phase_row() {
        let code = steane();
        let gate = transversal_zrot(7, 2).unwrap();
        let row = trivial_row(&code, &gate, &cfg(Side::X)).unwrap();
        let c = Cyclo::cos_pi_over_pow2(2).unwrap();
        let s = Cyclo::i_sin_pi_over_pow2(2).unwrap();
        assert_eq!(row.values(), vec![c, s]);
        let z = trivial_row(&code, &gate, &cfg(Side::Z)).unwrap();
        assert_eq!(z.values(), row.values());
        assert!(
            is_preserved(&code, &gate, &EngineConfig::default())
                .unwrap()
                .preserved
        );
    }

    #[test]
    fn four22_rotation_row() {
        let code = four22();
        let gate = transversal_zrot(4, 2).unwrap();
        let row = trivial_row(&code, &gate, &EngineConfig::default()).unwrap();
        let h = Cyclo::dyadic(1, 1);
        let m = -&h;
        assert_eq!(row.values(), vec![h, m.clone(), m.clone(), m]);
    }

    #[test]
    fn four22_cz_pair_row() {
        let code = four22();
        let cz = elementary_ckz(1, 0, false).unwrap();
        let gate = DiagonalGate::blocks(
            4,
            vec![
                Block {
                    qubits: vec![0, 1],
                    diag: cz.clone(),
                },
                Block {
                    qubits: vec![2, 3],
                    diag: cz,
                },
            ],
        )
        .unwrap();
        let h = Cyclo::dyadic(1, 1);
        for (g, expected) in [
            ("0000", h.clone()),
            ("0011", -&h),
            ("0110", h.clone()),
            ("0101", h.clone()),
        ] {
            let gamma: BitVec = g.parse().unwrap();
            for side in [Side::X, Side::Z] {
                let v = coefficient(&code, &gate, &BitVec::zeros(4), &gamma, &cfg(side)).unwrap();
                assert_eq!(v, expected, "gamma {g} side {side:?}");
            }
        }
    }

    #[test]
    fn identity_gate_row() {
        for code in [steane(), four22()] {
            let row = trivial_row(
                &code,
                &DiagonalGate::identity(code.n()),
                &EngineConfig::default(),
            )
            .unwrap();
            assert!(row.entries[0].1.is_one());
            assert!(row.entries[1..].iter().all(|(_, v)| v.is_zero()));
        }
    }

    #[test]
    fn four22_transversal_t_is_not_preserved() {
        let p = is_preserved(
            &four22(),
            &transversal_zrot(4, 3).unwrap(),
            &EngineConfig::default(),
        )
        .unwrap();
        assert!(!p.preserved);
        assert_eq!(p.norm, Cyclo::dyadic(3, 2));
        let pz = is_preserved(&four22(), &transversal_zrot(4, 3).unwrap(), &cfg(Side::Z)).unwrap();
        assert_eq!(pz, p);
    }

    #[test]
    fn steane_logical_is_p_dagger() {
        let l = induced_logical(
            &steane(),
            &transversal_zrot(7, 2).unwrap(),
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(
            l.entries,
            vec![Cyclo::root(3, 1).unwrap(), Cyclo::root(3, -1).unwrap()]
        );
        let row = trivial_row(
            &steane(),
            &transversal_zrot(7, 2).unwrap(),
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(logical_from_row(&row).unwrap(), l);
    }

    #[test]
    fn split_rejects_vectors_in_c1() {
        let code = steane();
        let w0 = code.c1().basis().rows()[0].clone();
        assert!(matches!(
            split_values(
                &code,
                &transversal_zrot(7, 2).unwrap(),
                &w0,
                &EngineConfig::default()
            ),
            Err(Error::AlreadyInC1(_))
        ));
    }

    #[test]
    fn budget_is_enforced() {
        let tight = EngineConfig {
            budget_log2: 2,
            side: Side::X,
        };
        assert_eq!(
            trivial_row(&steane(), &transversal_zrot(7, 2).unwrap(), &tight),
            Err(Error::BudgetExceeded {
                required: 4,
                budget: 2
            })
        );
    }
}
