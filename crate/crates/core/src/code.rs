//! CSS codes with a Z-character vector.
//!
//! A code is the pair `C₂ ⊆ C₁`: X-stabilizers span `C₂`, Z-stabilizers span
//! `C₁^⊥`. The X-character vector is fixed to zero; the Z-character vector
//! `y` is kept as its canonical representative modulo `C₁`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::gf2::{self, BitMat, BitVec, Distance, Subspace};

/// Logical and syndrome structure derived from a code.
///
/// Logical qubit `j` has Z-logical `z_logical[j]` and X-logical
/// `x_logical[j]`; the bases are paired so that `x_logical · z_logicalᵀ = I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalFrame {
    pub z_logical: BitMat,
    pub x_logical: BitMat,
    /// Complement of `C₂^⊥` in `F₂ⁿ`; syndrome representatives are its combinations.
    pub syndrome_basis: BitMat,
}

#[derive(Clone, PartialEq, Eq)]
pub struct CssCode {
    n: usize,
    c2: Subspace,
    c1_perp: Subspace,
    c1: Subspace,
    c2_perp: Subspace,
    y: BitVec,
    frame: LogicalFrame,
}

impl CssCode {
    /// Builds a code from X-stabilizer rows (spanning `C₂`), Z-stabilizer rows
    /// (spanning `C₁^⊥`) and a Z-character vector.
    pub fn new(n: usize, x_stab: &[BitVec], z_stab: &[BitVec], y: &BitVec) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLength);
        }
        for v in x_stab.iter().chain(z_stab).chain(std::iter::once(y)) {
            if v.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    found: v.len(),
                });
            }
        }
        for (i, x) in x_stab.iter().enumerate() {
            for (j, z) in z_stab.iter().enumerate() {
                if x.dot(z) {
                    return Err(Error::CommutationViolation { x_row: i, z_row: j });
                }
            }
        }
        let c2 = Subspace::from_rows(n, x_stab.to_vec())?;
        let c1_perp = Subspace::from_rows(n, z_stab.to_vec())?;
        Self::from_spaces(c2, c1_perp, y)
    }

    /// Builds a code directly from the spaces `C₂` and `C₁^⊥`.
    pub fn from_spaces(c2: Subspace, c1_perp: Subspace, y: &BitVec) -> Result<Self> {
        let n = c2.n();
        if c1_perp.n() != n || y.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: if c1_perp.n() != n {
                    c1_perp.n()
                } else {
                    y.len()
                },
            });
        }
        let c1 = c1_perp.dual();
        if !c2.is_subspace_of(&c1) {
            let (i, j) = first_anticommuting(&c2, &c1_perp);
            return Err(Error::CommutationViolation { x_row: i, z_row: j });
        }
        let c2_perp = c2.dual();
        let y = c1.reduce(y);
        let frame = build_frame(&c1, &c2, &c2_perp, &c1_perp)?;
        Ok(Self {
            n,
            c2,
            c1_perp,
            c1,
            c2_perp,
            y,
            frame,
        })
    }

    /// Same spaces with a different Z-character vector.
    pub fn with_y(&self, y: &BitVec) -> Result<Self> {
        if y.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: y.len(),
            });
        }
        let mut c = self.clone();
        c.y = c.c1.reduce(y);
        Ok(c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.c1.dim() - self.c2.dim()
    }

    /// `C₂`, spanned by the X-stabilizers.
    pub fn c2(&self) -> &Subspace {
        &self.c2
    }

    /// `C₁^⊥`, spanned by the Z-stabilizers.
    pub fn c1_perp(&self) -> &Subspace {
        &self.c1_perp
    }

    pub fn c1(&self) -> &Subspace {
        &self.c1
    }

    pub fn c2_perp(&self) -> &Subspace {
        &self.c2_perp
    }

    pub fn x_stabilizers(&self) -> &BitMat {
        self.c2.basis()
    }

    pub fn z_stabilizers(&self) -> &BitMat {
        self.c1_perp.basis()
    }

    pub fn y(&self) -> &BitVec {
        &self.y
    }

    pub fn frame(&self) -> &LogicalFrame {
        &self.frame
    }

    /// Z-logical representative `α · G_Z` for the logical label `α`
    /// (bit `j` of `alpha` selects logical qubit `j`).
    pub fn z_logical_rep(&self, alpha: u64) -> BitVec {
        self.frame
            .z_logical
            .combine(&BitVec::from_u64(self.k(), alpha))
    }

    /// All `2^k` Z-logical representatives, trivial coset first.
    pub fn z_logical_reps(&self) -> Vec<BitVec> {
        (0..1u64 << self.k())
            .map(|a| self.z_logical_rep(a))
            .collect()
    }

    /// X-logical representative `β · G_X`.
    pub fn x_logical_rep(&self, beta: u64) -> BitVec {
        self.frame
            .x_logical
            .combine(&BitVec::from_u64(self.k(), beta))
    }

    /// Logical label of a vector of `C₂^⊥` (its class in `C₂^⊥/C₁^⊥`).
    pub fn z_logical_label(&self, gamma: &BitVec) -> Result<u64> {
        if !self.c2_perp.contains(gamma)? {
            return Err(Error::NotSubspace(format!("{gamma} is not in C2^perp")));
        }
        Ok(self.frame.x_logical.syndrome(gamma).to_u64())
    }

    /// Logical label of a vector of `C₁` (its class in `C₁/C₂`).
    pub fn x_logical_label(&self, v: &BitVec) -> Result<u64> {
        if !self.c1.contains(v)? {
            return Err(Error::NotSubspace(format!("{v} is not in C1")));
        }
        Ok(self.frame.z_logical.syndrome(v).to_u64())
    }

    /// Canonical syndrome representative of `μ` (its class in `F₂ⁿ/C₂^⊥`).
    pub fn syndrome_rep(&self, mu: &BitVec) -> BitVec {
        self.c2_perp.reduce(mu)
    }

    /// Syndrome representatives in binary-counting order over the syndrome
    /// basis, trivial syndrome first.
    pub fn syndrome_reps(&self, budget_log2: u32) -> Result<Vec<BitVec>> {
        let d = self.frame.syndrome_basis.nrows() as u32;
        if d > budget_log2 {
            return Err(Error::BudgetExceeded {
                required: d,
                budget: budget_log2,
            });
        }
        Ok((0..1u64 << d)
            .map(|i| {
                self.frame
                    .syndrome_basis
                    .combine(&BitVec::from_u64(d as usize, i))
            })
            .collect())
    }

    /// `(d_X, d_Z)`: minimum weights over `C₁ \ C₂` and `C₂^⊥ \ C₁^⊥`.
    pub fn distances(&self, w_max: usize, budget_log2: u32) -> Result<(Distance, Distance)> {
        if self.k() == 0 {
            return Err(Error::NoLogicals);
        }
        let dx = gf2::min_weight_excluding(&self.c1, &self.c2, w_max, budget_log2)?;
        let dz = gf2::min_weight_excluding(&self.c2_perp, &self.c1_perp, w_max, budget_log2)?;
        Ok((dx, dz))
    }

    /// Code distance `min(d_X, d_Z)` when both are exact.
    pub fn distance(&self, w_max: usize, budget_log2: u32) -> Result<Distance> {
        let (dx, dz) = self.distances(w_max, budget_log2)?;
        Ok(match (dx, dz) {
            (Distance::Exact(a), Distance::Exact(b)) => Distance::Exact(a.min(b)),
            (Distance::Exact(a), Distance::AtLeast(b))
            | (Distance::AtLeast(b), Distance::Exact(a)) => {
                if a < b {
                    Distance::Exact(a)
                } else {
                    Distance::AtLeast(b)
                }
            }
            (Distance::AtLeast(a), Distance::AtLeast(b)) => Distance::AtLeast(a.min(b)),
        })
    }

    /// Encoded logical basis state `|α⟩_L = |C₂|^{-1/2} Σ_{x∈C₂} |α·G_X ⊕ x ⊕ y⟩`.
    pub fn encode_basis_state(
        &self,
        alpha: &BitVec,
        budget_log2: u32,
    ) -> Result<BTreeMap<BitVec, Cyclo>> {
        self.encode_basis_state_signed(alpha, &BitVec::zeros(self.n), budget_log2)
    }

    /// Encoding with an X-character vector `r`: the term for `x` carries `(−1)^{x·r}`.
    pub fn encode_basis_state_signed(
        &self,
        alpha: &BitVec,
        r: &BitVec,
        budget_log2: u32,
    ) -> Result<BTreeMap<BitVec, Cyclo>> {
        if alpha.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                found: alpha.len(),
            });
        }
        if r.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: r.len(),
            });
        }
        let d = self.c2.dim() as u32;
        if d > budget_log2 {
            return Err(Error::BudgetExceeded {
                required: d,
                budget: budget_log2,
            });
        }
        let amp = inv_sqrt_pow2(d);
        let neg = -&amp;
        let mut u = self.frame.x_logical.combine(alpha).xor(&self.y);
        let mut x = BitVec::zeros(self.n);
        let rows = self.c2.basis().rows();
        let mut state = BTreeMap::new();
        state.insert(u.clone(), amp.clone());
        for j in gf2::gray_steps(d) {
            u.xor_assign(&rows[j]);
            x.xor_assign(&rows[j]);
            let a = if x.dot(r) { neg.clone() } else { amp.clone() };
            state.insert(u.clone(), a);
        }
        Ok(state)
    }

    /// Short parameter label `[[n,k]]` or `[[n,k,d]]`.
    pub fn label(&self, distance: Option<Distance>) -> String {
        match distance {
            Some(Distance::Exact(d)) => format!("[[{},{},{}]]", self.n, self.k(), d),
            Some(Distance::AtLeast(d)) => format!("[[{},{},>={}]]", self.n, self.k(), d),
            None => format!("[[{},{}]]", self.n, self.k()),
        }
    }

    pub fn to_json(&self) -> CodeJson {
        CodeJson {
            n: self.n,
            x_stabilizers: self.x_stabilizers().rows().to_vec(),
            z_stabilizers: self.z_stabilizers().rows().to_vec(),
            y: self.y.clone(),
        }
    }

    pub fn from_json(j: &CodeJson) -> Result<Self> {
        Self::new(j.n, &j.x_stabilizers, &j.z_stabilizers, &j.y)
    }
}

impl fmt::Debug for CssCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CssCode")
            .field("n", &self.n)
            .field("k", &self.k())
            .field("x_stab", self.x_stabilizers())
            .field("z_stab", self.z_stabilizers())
            .field("y", &self.y)
            .finish()
    }
}

/// Serialized code: stabilizer rows as bitstrings, qubit 0 leftmost.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeJson {
    pub n: usize,
    pub x_stabilizers: Vec<BitVec>,
    pub z_stabilizers: Vec<BitVec>,
    pub y: BitVec,
}

/// `2^{-d/2}` exactly.
pub fn inv_sqrt_pow2(d: u32) -> Cyclo {
    if d.is_multiple_of(2) {
        Cyclo::dyadic(1, d / 2)
    } else {
        Cyclo::inv_sqrt2().div_pow2(d / 2)
    }
}

fn first_anticommuting(c2: &Subspace, c1_perp: &Subspace) -> (usize, usize) {
    for (i, x) in c2.basis().rows().iter().enumerate() {
        for (j, z) in c1_perp.basis().rows().iter().enumerate() {
            if x.dot(z) {
                return (i, j);
            }
        }
    }
    (0, 0)
}

fn build_frame(
    c1: &Subspace,
    c2: &Subspace,
    c2_perp: &Subspace,
    c1_perp: &Subspace,
) -> Result<LogicalFrame> {
    let n = c1.n();
    let z_logical = c2_perp.complement_basis(c1_perp)?;
    let x_raw = c1.complement_basis(c2)?;
    let k = z_logical.nrows();
    let x_logical = if k == 0 {
        BitMat::empty(n)
    } else {
        let pairing = BitMat::new(
            k,
            x_raw.rows().iter().map(|r| z_logical.syndrome(r)).collect(),
        )?;
        let inv = pairing.inverse()?;
        let rows = inv
            .rows()
            .iter()
            .map(|c| c2.reduce(&x_raw.combine(c)))
            .collect();
        BitMat::new(n, rows)?
    };
    let full = Subspace::full(n)?;
    let syndrome_basis = full.complement_basis(c2_perp)?;
    Ok(LogicalFrame {
        z_logical,
        x_logical,
        syndrome_basis,
    })
}
