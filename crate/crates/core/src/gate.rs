//! Diagonal physical gates.
//!
//! A gate is either a tensor product of small local diagonals acting on
//! disjoint qubit blocks, or a quadratic-form diagonal `u ↦ ζ^{u R uᵀ}`.
//! Every entry is a root of unity `ζ_{2^L}^e`, so a gate is fully described
//! by integer exponents and evaluation is exact.

use serde::{Deserialize, Serialize};

use crate::cyclo::{Cyclo, MAX_LEVEL};
use crate::error::{Error, Result};
use crate::gf2::BitVec;

/// Largest block size accepted for a local diagonal.
pub const BLOCK_CAP: usize = 3;

/// Largest qubit count for dense evaluation of quadratic-form gates.
pub const QFD_DENSE_CAP: usize = 20;

/// Diagonal on `b` qubits: entry `u` is `ζ_{2^level}^{exps[u]}`, with bit `t`
/// of `u` the state of the block's `t`-th qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalDiag {
    level: u32,
    exps: Vec<u64>,
}

impl LocalDiag {
    pub fn new(level: u32, exps: Vec<u64>) -> Result<Self> {
        if level == 0 || level > MAX_LEVEL {
            return Err(Error::LevelOverflow(level));
        }
        let len = exps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Invalid(format!(
                "local diagonal needs 2^b entries, got {len}"
            )));
        }
        let b = len.trailing_zeros() as usize;
        if b > BLOCK_CAP {
            return Err(Error::BlockCapExceeded(b));
        }
        let modulus = 1u64 << level;
        Ok(Self {
            level,
            exps: exps.into_iter().map(|e| e % modulus).collect(),
        })
    }

    pub fn identity(b: usize) -> Result<Self> {
        Self::new(1, vec![0; 1 << b])
    }

    pub fn qubits(&self) -> usize {
        self.exps.len().trailing_zeros() as usize
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn exps(&self) -> &[u64] {
        &self.exps
    }

    /// Exponent of entry `u` expressed at level `level >= self.level()`.
    pub fn exponent_at(&self, u: usize, level: u32) -> u64 {
        self.exps[u] << (level - self.level)
    }

    pub fn entry(&self, u: usize) -> Cyclo {
        Cyclo::root(self.level, self.exps[u] as i64).expect("level checked")
    }

    /// Pauli coefficients `f(v) = 2^{-b} Σ_u (−1)^{u·v} d_u` of the block.
    pub fn pauli_table(&self) -> Vec<Cyclo> {
        let len = self.exps.len();
        let b = self.qubits() as u32;
        let order = 1usize << self.level;
        (0..len)
            .map(|v| {
                let mut counts = vec![0i64; order];
                for u in 0..len {
                    let sign = if (u & v).count_ones() % 2 == 0 { 1 } else { -1 };
                    counts[self.exps[u] as usize] += sign;
                }
                Cyclo::from_exponent_counts(self.level, &counts, b).expect("level checked")
            })
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }
}

/// `C^(controls)Z^{±1/2^root}`: phase `e^{±iπ/2^root}` on the all-ones state
/// of a block of `controls + 1` qubits.
pub fn elementary_ckz(controls: usize, root: u32, dagger: bool) -> Result<LocalDiag> {
    let b = controls + 1;
    if b > BLOCK_CAP {
        return Err(Error::BlockCapExceeded(b));
    }
    let level = root + 1;
    if level > MAX_LEVEL {
        return Err(Error::LevelOverflow(level));
    }
    let mut exps = vec![0u64; 1 << b];
    exps[(1 << b) - 1] = if dagger { (1u64 << level) - 1 } else { 1 };
    LocalDiag::new(level, exps)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub qubits: Vec<usize>,
    pub diag: LocalDiag,
}

/// How a gate on `n` qubits is extended to the concatenated code on `2n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftPolicy {
    /// `I ⊗ g`: the gate moves to the second half.
    IdentityTensor,
    /// `transversal_zrot(n, l) ↦ transversal_zrot(2n, l + 1)`.
    NextLevelRotation,
    /// Quadratic form `R ↦ I₂ ⊗ R` one level up.
    QfdTensor,
}

impl LiftPolicy {
    pub const ALL: [LiftPolicy; 3] = [
        LiftPolicy::IdentityTensor,
        LiftPolicy::NextLevelRotation,
        LiftPolicy::QfdTensor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LiftPolicy::IdentityTensor => "identity_tensor",
            LiftPolicy::NextLevelRotation => "next_level_rotation",
            LiftPolicy::QfdTensor => "qfd_tensor",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagonalGate {
    /// Tensor product of local diagonals on disjoint blocks; uncovered qubits
    /// carry the identity.
    Blocks { n: usize, blocks: Vec<Block> },
    /// `u ↦ ζ_{2^level}^{u R uᵀ}` with `R` symmetric over `Z_{2^level}`.
    Qfd {
        n: usize,
        level: u32,
        r: Vec<Vec<u64>>,
    },
}

impl DiagonalGate {
    pub fn blocks(n: usize, blocks: Vec<Block>) -> Result<Self> {
        let mut used = vec![false; n];
        for b in &blocks {
            if b.qubits.len() != b.diag.qubits() {
                return Err(Error::Invalid(format!(
                    "block on {} qubits carries a {}-qubit diagonal",
                    b.qubits.len(),
                    b.diag.qubits()
                )));
            }
            for &q in &b.qubits {
                if q >= n {
                    return Err(Error::Invalid(format!("qubit {q} out of range {n}")));
                }
                if used[q] {
                    return Err(Error::Invalid(format!("qubit {q} appears in two blocks")));
                }
                used[q] = true;
            }
        }
        Ok(DiagonalGate::Blocks { n, blocks })
    }

    pub fn identity(n: usize) -> Self {
        DiagonalGate::Blocks {
            n,
            blocks: Vec::new(),
        }
    }

    pub fn qfd(n: usize, level: u32, r: Vec<Vec<u64>>) -> Result<Self> {
        if level == 0 || level > MAX_LEVEL {
            return Err(Error::LevelOverflow(level));
        }
        if r.len() != n || r.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid("quadratic form must be n×n".into()));
        }
        let m = 1u64 << level;
        let r: Vec<Vec<u64>> = r
            .into_iter()
            .map(|row| row.into_iter().map(|x| x % m).collect())
            .collect();
        for i in 0..n {
            for j in 0..i {
                if r[i][j] != r[j][i] {
                    return Err(Error::Invalid(format!(
                        "quadratic form is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(DiagonalGate::Qfd { n, level, r })
    }

    pub fn n(&self) -> usize {
        match self {
            DiagonalGate::Blocks { n, .. } | DiagonalGate::Qfd { n, .. } => *n,
        }
    }

    /// Common level of all entries.
    pub fn level(&self) -> u32 {
        match self {
            DiagonalGate::Blocks { blocks, .. } => {
                blocks.iter().map(|b| b.diag.level()).max().unwrap_or(1)
            }
            DiagonalGate::Qfd { level, .. } => *level,
        }
    }

    /// `Some(l)` when the gate is exactly `transversal_zrot(n, l)`.
    pub fn as_transversal_zrot(&self) -> Option<u32> {
        let DiagonalGate::Blocks { n, blocks } = self else {
            return None;
        };
        if blocks.len() != *n || *n == 0 {
            return None;
        }
        let level = blocks[0].diag.level();
        if level < 2 {
            return None;
        }
        let expected = LocalDiag::new(level, vec![(1u64 << level) - 1, 1]).ok()?;
        let mut seen = vec![false; *n];
        for b in blocks {
            if b.diag != expected || b.qubits.len() != 1 {
                return None;
            }
            seen[b.qubits[0]] = true;
        }
        seen.iter().all(|&s| s).then_some(level - 1)
    }

    /// Exponent `e` with `d_u = ζ_{2^L}^e`, `L = self.level()`.
    pub fn entry_exponent(&self, u: &BitVec) -> Result<u64> {
        if u.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                found: u.len(),
            });
        }
        let level = self.level();
        let m = 1u64 << level;
        Ok(match self {
            DiagonalGate::Blocks { blocks, .. } => {
                let mut e = 0u64;
                for b in blocks {
                    e += b.diag.exponent_at(block_index(&b.qubits, u), level);
                }
                e % m
            }
            DiagonalGate::Qfd { r, .. } => qfd_exponent(r, &u.support(), m),
        })
    }

    pub fn entry(&self, u: &BitVec) -> Result<Cyclo> {
        let e = self.entry_exponent(u)?;
        Cyclo::root(self.level(), e as i64)
    }

    /// Pauli coefficient `f(v) = 2^{-n} Σ_u (−1)^{u·v} d_u`.
    pub fn pauli_coeff(&self, v: &BitVec) -> Result<Cyclo> {
        let n = self.n();
        if v.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: v.len(),
            });
        }
        match self {
            DiagonalGate::Blocks { blocks, .. } => {
                let mut covered = vec![false; n];
                let mut acc = Cyclo::one();
                for b in blocks {
                    for &q in &b.qubits {
                        covered[q] = true;
                    }
                    let table = b.diag.pauli_table();
                    acc = &acc * &table[block_index(&b.qubits, v)];
                }
                // Identity on an uncovered qubit has no Z component.
                if (0..n).any(|q| !covered[q] && v.get(q)) {
                    return Ok(Cyclo::zero());
                }
                Ok(acc)
            }
            DiagonalGate::Qfd { r, level, .. } => {
                if n > QFD_DENSE_CAP {
                    return Err(Error::QfdTooLarge(n));
                }
                let m = 1u64 << level;
                let mut counts = vec![0i64; m as usize];
                for u in 0..1u64 << n {
                    let ub = BitVec::from_u64(n, u);
                    let e = qfd_exponent(r, &ub.support(), m);
                    counts[e as usize] += if ub.dot(v) { -1 } else { 1 };
                }
                Cyclo::from_exponent_counts(*level, &counts, n as u32)
            }
        }
    }

    /// All `2^n` entry exponents, index bit `i` = qubit `i`.
    pub fn dense_exponents(&self) -> Result<Vec<u64>> {
        let n = self.n();
        if n > 24 {
            return Err(Error::BudgetExceeded {
                required: n as u32,
                budget: 24,
            });
        }
        (0..1u64 << n)
            .map(|u| self.entry_exponent(&BitVec::from_u64(n, u)))
            .collect()
    }

    /// Extension to `2n` qubits with `d'_{[u,u]} = d_u`.
    pub fn lift(&self, policy: LiftPolicy) -> Result<DiagonalGate> {
        let n = self.n();
        match policy {
            LiftPolicy::IdentityTensor => match self {
                DiagonalGate::Blocks { blocks, .. } => {
                    let shifted = blocks
                        .iter()
                        .map(|b| Block {
                            qubits: b.qubits.iter().map(|q| q + n).collect(),
                            diag: b.diag.clone(),
                        })
                        .collect();
                    DiagonalGate::blocks(2 * n, shifted)
                }
                DiagonalGate::Qfd { level, r, .. } => {
                    let mut r2 = vec![vec![0u64; 2 * n]; 2 * n];
                    for i in 0..n {
                        for j in 0..n {
                            r2[n + i][n + j] = r[i][j];
                        }
                    }
                    DiagonalGate::qfd(2 * n, *level, r2)
                }
            },
            LiftPolicy::NextLevelRotation => {
                let l = self
                    .as_transversal_zrot()
                    .ok_or_else(|| Error::PolicyMismatch {
                        policy: policy.name().into(),
                        reason: "gate is not a transversal Z-rotation".into(),
                    })?;
                transversal_zrot(2 * n, l + 1)
            }
            LiftPolicy::QfdTensor => {
                let DiagonalGate::Qfd { level, r, .. } = self else {
                    return Err(Error::PolicyMismatch {
                        policy: policy.name().into(),
                        reason: "gate is not a quadratic-form gate".into(),
                    });
                };
                if *level >= MAX_LEVEL {
                    return Err(Error::LevelOverflow(level + 1));
                }
                let mut r2 = vec![vec![0u64; 2 * n]; 2 * n];
                for i in 0..n {
                    for j in 0..n {
                        r2[i][j] = r[i][j];
                        r2[n + i][n + j] = r[i][j];
                    }
                }
                DiagonalGate::qfd(2 * n, level + 1, r2)
            }
        }
    }

    pub fn to_json(&self) -> GateJson {
        if let Some(l) = self.as_transversal_zrot() {
            return GateJson::TransversalZrot { n: self.n(), l };
        }
        match self {
            DiagonalGate::Blocks { n, blocks } => GateJson::Blocks {
                n: *n,
                blocks: blocks
                    .iter()
                    .map(|b| BlockJson {
                        qubits: b.qubits.clone(),
                        gate: local_to_json(&b.diag),
                    })
                    .collect(),
            },
            DiagonalGate::Qfd { n, level, r } => GateJson::Qfd {
                n: *n,
                l: *level,
                r: r.clone(),
            },
        }
    }

    pub fn from_json(j: &GateJson) -> Result<Self> {
        match j {
            GateJson::TransversalZrot { n, l } => transversal_zrot(*n, *l),
            GateJson::Blocks { n, blocks } => {
                let blocks = blocks
                    .iter()
                    .map(|b| {
                        Ok(Block {
                            qubits: b.qubits.clone(),
                            diag: local_from_json(&b.gate)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                DiagonalGate::blocks(*n, blocks)
            }
            GateJson::Qfd { n, l, r } => DiagonalGate::qfd(*n, *l, r.clone()),
        }
    }

    /// Short description for reports.
    pub fn describe(&self) -> String {
        if let Some(l) = self.as_transversal_zrot() {
            return format!("exp(-iπ/2^{l} Z)^⊗{}", self.n());
        }
        match self {
            DiagonalGate::Blocks { n, blocks } => {
                format!(
                    "{} diagonal blocks on {n} qubits (level {})",
                    blocks.len(),
                    self.level()
                )
            }
            DiagonalGate::Qfd { n, level, .. } => {
                format!("quadratic-form gate on {n} qubits at level {level}")
            }
        }
    }
}

/// `(exp(−iπ/2^l Z))^{⊗n}`, including its global phase:
/// `d_u = e^{−iπ(n − 2|u|)/2^l}`.
pub fn transversal_zrot(n: usize, l: u32) -> Result<DiagonalGate> {
    if n == 0 {
        return Err(Error::EmptyLength);
    }
    if l == 0 || l + 1 > MAX_LEVEL {
        return Err(Error::LevelOverflow(l + 1));
    }
    let level = l + 1;
    let diag = LocalDiag::new(level, vec![(1u64 << level) - 1, 1])?;
    let blocks = (0..n)
        .map(|q| Block {
            qubits: vec![q],
            diag: diag.clone(),
        })
        .collect();
    DiagonalGate::blocks(n, blocks)
}

/// Integer index of `u` restricted to `qubits` (bit `t` ↔ `qubits[t]`).
pub fn block_index(qubits: &[usize], u: &BitVec) -> usize {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (t, &q)| acc | ((u.get(q) as usize) << t))
}

/// `u R uᵀ mod m` for `u` given by its support.
pub fn qfd_exponent(r: &[Vec<u64>], support: &[usize], m: u64) -> u64 {
    let mut e = 0u64;
    for &i in support {
        for &j in support {
            e = (e + r[i][j]) % m;
        }
    }
    e
}

/// Serialized gate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GateJson {
    TransversalZrot {
        n: usize,
        l: u32,
    },
    Blocks {
        n: usize,
        blocks: Vec<BlockJson>,
    },
    Qfd {
        n: usize,
        l: u32,
        #[serde(rename = "R")]
        r: Vec<Vec<u64>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockJson {
    pub qubits: Vec<usize>,
    pub gate: LocalJson,
}

/// A block's local gate: an elementary `C^(i)Z^{1/2^j}` or raw exponents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum LocalJson {
    #[serde(rename = "CkZ")]
    Ckz {
        controls: usize,
        root: u32,
        #[serde(default)]
        dagger: bool,
    },
    #[serde(rename = "diag")]
    Diag { level: u32, exps: Vec<u64> },
}

fn local_from_json(j: &LocalJson) -> Result<LocalDiag> {
    match j {
        LocalJson::Ckz {
            controls,
            root,
            dagger,
        } => elementary_ckz(*controls, *root, *dagger),
        LocalJson::Diag { level, exps } => LocalDiag::new(*level, exps.clone()),
    }
}

fn local_to_json(d: &LocalDiag) -> LocalJson {
    let b = d.qubits();
    let last = (1usize << b) - 1;
    let exps = d.exps();
    let elementary = exps[..last].iter().all(|&e| e == 0);
    if elementary {
        let top = 1u64 << d.level();
        if exps[last] == 1 {
            return LocalJson::Ckz {
                controls: b - 1,
                root: d.level() - 1,
                dagger: false,
            };
        }
        if exps[last] == top - 1 && d.level() > 1 {
            return LocalJson::Ckz {
                controls: b - 1,
                root: d.level() - 1,
                dagger: true,
            };
        }
    }
    LocalJson::Diag {
        level: d.level(),
        exps: exps.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_qubit_rotation() {
        let g = transversal_zrot(1, 1).unwrap();
        assert_eq!(g.entry(&"0".parse().unwrap()).unwrap(), -Cyclo::i());
        assert_eq!(g.entry(&"1".parse().unwrap()).unwrap(), Cyclo::i());
        assert_eq!(g.as_transversal_zrot(), Some(1));
    }

    #[test]
    fn steane_phase_rotation_entries() {
        let g = transversal_zrot(7, 2).unwrap();
        let d0 = g.entry(&BitVec::zeros(7)).unwrap();
        assert_eq!(d0, Cyclo::root(3, -7).unwrap());
        // Entry u equals e^{−7iπ/4} · i^{|u|}.
        for u in 0..128u64 {
            let ub = BitVec::from_u64(7, u);
            let expected = &d0 * &Cyclo::i().pow(ub.weight() as u64);
            assert_eq!(g.entry(&ub).unwrap(), expected);
        }
    }

    #[test]
    fn transversal_t_global_phase() {
        let g = transversal_zrot(14, 3).unwrap();
        let d0 = g.entry(&BitVec::zeros(14)).unwrap();
        assert_eq!(d0, Cyclo::root(4, -14).unwrap());
        let u = BitVec::from_indices(14, &[3]);
        assert_eq!(g.entry(&u).unwrap(), &d0 * &Cyclo::root(3, 1).unwrap());
    }

    #[test]
    fn elementary_gates() {
        let cz = elementary_ckz(1, 0, false).unwrap();
        assert_eq!(cz.level(), 1);
        assert_eq!(cz.exps(), &[0, 0, 0, 1]);
        let t = elementary_ckz(0, 2, false).unwrap();
        assert_eq!(t.entry(1), Cyclo::root(3, 1).unwrap());
        let ccz = elementary_ckz(2, 0, false).unwrap();
        assert_eq!(ccz.exps()[7], 1);
        assert_eq!(elementary_ckz(3, 0, false), Err(Error::BlockCapExceeded(4)));
        let tdg = elementary_ckz(0, 2, true).unwrap();
        assert_eq!(tdg.entry(1), Cyclo::root(3, -1).unwrap());
    }

    #[test]
    fn entry_exponent_examples() {
        let g = transversal_zrot(4, 2).unwrap();
        assert_eq!(g.entry_exponent(&BitVec::zeros(4)).unwrap(), 4);
        let q = DiagonalGate::qfd(2, 2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let u: BitVec = "11".parse().unwrap();
        assert_eq!(q.entry_exponent(&u).unwrap(), 2);
        assert_eq!(q.entry(&u).unwrap(), Cyclo::from_int(-1));
    }

    #[test]
    fn pauli_coeff_examples() {
        let cz = DiagonalGate::blocks(
            2,
            vec![Block {
                qubits: vec![0, 1],
                diag: elementary_ckz(1, 0, false).unwrap(),
            }],
        )
        .unwrap();
        let f: Vec<Cyclo> = ["00", "10", "01", "11"]
            .iter()
            .map(|v| cz.pauli_coeff(&v.parse().unwrap()).unwrap())
            .collect();
        let half = Cyclo::dyadic(1, 1);
        assert_eq!(f, vec![half.clone(), half.clone(), half.clone(), -half]);

        // exp(−iπ/2^l Z) = cos(π/2^l) I − i sin(π/2^l) Z.
        for l in 1..=5 {
            let g = transversal_zrot(1, l).unwrap();
            let f0 = g.pauli_coeff(&"0".parse().unwrap()).unwrap();
            let f1 = g.pauli_coeff(&"1".parse().unwrap()).unwrap();
            assert_eq!(f0, Cyclo::cos_pi_over_pow2(l).unwrap());
            assert_eq!(f1, -Cyclo::i_sin_pi_over_pow2(l).unwrap());
        }

        let id = DiagonalGate::identity(3);
        assert_eq!(id.pauli_coeff(&BitVec::zeros(3)).unwrap(), Cyclo::one());
        assert!(id.pauli_coeff(&"010".parse().unwrap()).unwrap().is_zero());
    }

    #[test]
    fn lift_examples() {
        let g = transversal_zrot(7, 2).unwrap();
        assert_eq!(
            g.lift(LiftPolicy::NextLevelRotation).unwrap(),
            transversal_zrot(14, 3).unwrap()
        );
        let id = g.lift(LiftPolicy::IdentityTensor).unwrap();
        let DiagonalGate::Blocks { blocks, .. } = &id else {
            panic!()
        };
        assert!(blocks.iter().all(|b| b.qubits[0] >= 7));
        assert!(g.lift(LiftPolicy::QfdTensor).is_err());

        let q = DiagonalGate::qfd(2, 2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let lifted = q.lift(LiftPolicy::QfdTensor).unwrap();
        assert_eq!(lifted.level(), 3);
        assert!(q.lift(LiftPolicy::NextLevelRotation).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let gates = vec![
            transversal_zrot(7, 2).unwrap(),
            DiagonalGate::blocks(
                4,
                vec![
                    Block {
                        qubits: vec![0, 1],
                        diag: elementary_ckz(1, 0, false).unwrap(),
                    },
                    Block {
                        qubits: vec![2, 3],
                        diag: elementary_ckz(1, 0, false).unwrap(),
                    },
                ],
            )
            .unwrap(),
            DiagonalGate::qfd(2, 3, vec![vec![1, 2], vec![2, 0]]).unwrap(),
        ];
        for g in gates {
            let s = serde_json::to_string(&g.to_json()).unwrap();
            let back: GateJson = serde_json::from_str(&s).unwrap();
            assert_eq!(DiagonalGate::from_json(&back).unwrap(), g);
        }
        let parsed: GateJson =
            serde_json::from_str(r#"{"kind":"transversal_zrot","n":4,"l":3}"#).unwrap();
        assert_eq!(
            DiagonalGate::from_json(&parsed).unwrap(),
            transversal_zrot(4, 3).unwrap()
        );
    }

    fn arb_block_gate() -> impl Strategy<Value = DiagonalGate> {
        (1usize..=8, 1u32..=4, any::<u64>()).prop_map(|(n, level, seed)| {
            let mut rng = seed;
            let mut next = move || {
                rng ^= rng << 13;
                rng ^= rng >> 7;
                rng ^= rng << 17;
                rng
            };
            let mut blocks = Vec::new();
            let mut q = 0;
            while q < n {
                let b = (1 + (next() % 3) as usize).min(n - q);
                if next() % 4 == 0 {
                    q += b;
                    continue;
                }
                let exps = (0..1 << b).map(|_| next() % (1 << level)).collect();
                blocks.push(Block {
                    qubits: (q..q + b).collect(),
                    diag: LocalDiag::new(level, exps).unwrap(),
                });
                q += b;
            }
            DiagonalGate::blocks(n, blocks).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn pauli_coeffs_invert_entries(g in arb_block_gate()) {
            let n = g.n();
            let f: Vec<Cyclo> = (0..1u64 << n)
                .map(|v| g.pauli_coeff(&BitVec::from_u64(n, v)).unwrap())
                .collect();
            let mut norm = Cyclo::zero();
            for fv in &f {
                norm = &norm + &fv.abs_sq();
            }
            prop_assert!(norm.is_one());
            for u in 0..1u64 << n {
                let ub = BitVec::from_u64(n, u);
                let mut d = Cyclo::zero();
                for (v, fv) in f.iter().enumerate() {
                    if ub.dot(&BitVec::from_u64(n, v as u64)) { d = &d - fv; } else { d = &d + fv; }
                }
                prop_assert_eq!(d, g.entry(&ub).unwrap());
            }
        }

        #[test]
        fn lifts_agree_on_the_diagonal(g in arb_block_gate(), l in 1u32..=5, diag in prop::collection::vec(0u64..16, 21)) {
            let n = g.n().min(6);
            let rot = transversal_zrot(n, l).unwrap();
            let m = 1u64 << 4;
            let mut r = vec![vec![0u64; n]; n];
            let mut it = diag.iter();
            for i in 0..n {
                for j in i..n {
                    let x = it.next().copied().unwrap_or(0) % m;
                    r[i][j] = x;
                    r[j][i] = x;
                }
            }
            let qfd = DiagonalGate::qfd(n, 4, r).unwrap();
            let cases = [
                (g.clone(), LiftPolicy::IdentityTensor),
                (rot.clone(), LiftPolicy::IdentityTensor),
                (rot, LiftPolicy::NextLevelRotation),
                (qfd.clone(), LiftPolicy::QfdTensor),
                (qfd, LiftPolicy::IdentityTensor),
            ];
            for (gate, policy) in cases {
                let lifted = gate.lift(policy).unwrap();
                let gn = gate.n();
                for u in 0..1u64 << gn {
                    let ub = BitVec::from_u64(gn, u);
                    prop_assert_eq!(lifted.entry(&ub.concat(&ub)).unwrap(), gate.entry(&ub).unwrap());
                }
            }
        }
    }
}
