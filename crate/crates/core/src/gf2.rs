//! GF(2) linear algebra on packed bit vectors.
//!
//! Vectors are stored in 64-bit words with bit `i` of the vector in word
//! `i / 64`, position `i % 64`. In string form the leftmost character is
//! index 0 (qubit 0).
//!
//! Subspaces are kept in reduced row-echelon form. Reducing a vector against
//! an RREF basis clears every pivot column, which yields the canonical
//! (reduction-minimal) representative of its coset.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default enumeration budget, as a power of two.
pub const DEFAULT_BUDGET_LOG2: u32 = 26;
/// Default weight bound for bounded distance searches.
pub const DEFAULT_WMAX: usize = 6;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

fn word_count(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    /// Unit vector with a single one at `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in indices {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Low `len` bits of `value`, bit `i` of the integer going to index `i`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len.min(64) {
            v.set(i, (value >> i) & 1 == 1);
        }
        v
    }

    /// Inverse of [`BitVec::from_u64`]; only valid for `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        debug_assert!(self.len <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Weight of the bitwise AND with `other`.
    pub fn and_weight(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len, "and of vectors with different lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    fn check_len(&self, other: &BitVec) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                found: other.len,
            });
        }
        Ok(())
    }

    /// In-place XOR. Panics on length mismatch.
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut r = self.clone();
        r.xor_assign(other);
        r
    }

    pub fn try_xor(&self, other: &BitVec) -> Result<BitVec> {
        self.check_len(other)?;
        Ok(self.xor(other))
    }

    /// Inner product mod 2. Panics on length mismatch.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot of vectors with different lengths");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn try_dot(&self, other: &BitVec) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.dot(other))
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// `[self, other]` as a vector of length `self.len() + other.len()`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.len + other.len);
        for i in self.support() {
            v.set(i, true);
        }
        for i in other.support() {
            v.set(self.len + i, true);
        }
        v
    }

    /// Sub-vector over `range`.
    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        let mut v = BitVec::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                v.set(i - start, true);
            }
        }
        v
    }

    /// Copy with coordinate `index` deleted.
    pub fn delete(&self, index: usize) -> BitVec {
        let mut v = BitVec::zeros(self.len - 1);
        let mut j = 0;
        for i in 0..self.len {
            if i == index {
                continue;
            }
            v.set(j, self.get(i));
            j += 1;
        }
        v
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut v = BitVec::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => return Err(Error::Parse(format!("invalid bit '{c}' in \"{s}\""))),
            }
        }
        Ok(v)
    }
}

impl Serialize for BitVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An ordered list of equal-length rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMat {
    ncols: usize,
    rows: Vec<BitVec>,
}

impl BitMat {
    pub fn new(ncols: usize, rows: Vec<BitVec>) -> Result<Self> {
        for r in &rows {
            if r.len() != ncols {
                return Err(Error::LengthMismatch {
                    expected: ncols,
                    found: r.len(),
                });
            }
        }
        Ok(Self { ncols, rows })
    }

    pub fn empty(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            ncols: n,
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let rows: Vec<BitVec> = rows.iter().map(|s| s.parse()).collect::<Result<_>>()?;
        let ncols = rows.first().map_or(0, BitVec::len);
        Self::new(ncols, rows)
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.rows
    }

    pub fn push(&mut self, row: BitVec) -> Result<()> {
        if row.len() != self.ncols {
            return Err(Error::LengthMismatch {
                expected: self.ncols,
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    /// `v · Mᵀ`: one parity bit per row.
    pub fn syndrome(&self, v: &BitVec) -> BitVec {
        let mut s = BitVec::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.dot(v) {
                s.set(i, true);
            }
        }
        s
    }

    /// Linear combination `Σ coeffs[i]·row[i]`.
    pub fn combine(&self, coeffs: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.ncols);
        for i in coeffs.support() {
            v.xor_assign(&self.rows[i]);
        }
        v
    }

    /// Row reduction to RREF; zero rows are dropped.
    pub fn rref(&self) -> Result<(BitMat, Vec<usize>)> {
        if self.ncols == 0 {
            return Err(Error::EmptyLength);
        }
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.ncols {
            let Some(found) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, found);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rows.truncate(rank);
        Ok((
            BitMat {
                ncols: self.ncols,
                rows,
            },
            pivots,
        ))
    }

    pub fn rank(&self) -> Result<usize> {
        Ok(self.rref()?.0.nrows())
    }

    /// Transpose (rows become columns).
    pub fn transpose(&self) -> BitMat {
        let mut rows = vec![BitVec::zeros(self.rows.len()); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.support() {
                rows[j].set(i, true);
            }
        }
        BitMat {
            ncols: self.rows.len(),
            rows,
        }
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMat) -> Result<BitMat> {
        if self.ncols != other.nrows() {
            return Err(Error::LengthMismatch {
                expected: self.ncols,
                found: other.nrows(),
            });
        }
        let rows = self.rows.iter().map(|r| other.combine(r)).collect();
        Ok(BitMat {
            ncols: other.ncols,
            rows,
        })
    }

    /// Inverse of a square invertible matrix.
    pub fn inverse(&self) -> Result<BitMat> {
        let n = self.nrows();
        if self.ncols != n {
            return Err(Error::Invalid("inverse of a non-square matrix".into()));
        }
        let augmented: Vec<BitVec> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.concat(&BitVec::unit(n, i)))
            .collect();
        let (red, pivots) = BitMat::new(2 * n, augmented)?.rref()?;
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Invalid("matrix is singular".into()));
        }
        let rows = red.rows.iter().map(|r| r.slice(n, 2 * n)).collect();
        Ok(BitMat { ncols: n, rows })
    }
}

impl fmt::Debug for BitMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.rows.iter().map(|r| r.to_string()))
            .finish()
    }
}

/// Row reduction: the RREF basis and its pivot columns.
pub fn rref(m: &BitMat) -> Result<(BitMat, Vec<usize>)> {
    m.rref()
}

/// A linear subspace of F₂ⁿ held as an RREF basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    basis: BitMat,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(m: &BitMat) -> Result<Self> {
        let (basis, pivots) = m.rref()?;
        Ok(Self { basis, pivots })
    }

    pub fn from_rows(n: usize, rows: Vec<BitVec>) -> Result<Self> {
        Self::span(&BitMat::new(n, rows)?)
    }

    pub fn zero(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyLength);
        }
        Ok(Self {
            basis: BitMat::empty(n),
            pivots: Vec::new(),
        })
    }

    pub fn full(n: usize) -> Result<Self> {
        Self::span(&BitMat::identity(n))
    }

    pub fn n(&self) -> usize {
        self.basis.ncols()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &BitMat {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical representative of `v + self`: every pivot column cleared.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut r = v.clone();
        for (row, &p) in self.basis.rows().iter().zip(&self.pivots) {
            if r.get(p) {
                r.xor_assign(row);
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVec) -> Result<bool> {
        if v.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                found: v.len(),
            });
        }
        Ok(self.reduce(v).is_zero())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.n() == other.n() && self.basis.rows().iter().all(|r| other.reduce(r).is_zero())
    }

    /// The orthogonal complement `{v : v·b = 0 for every basis row b}`.
    pub fn dual(&self) -> Subspace {
        let n = self.n();
        let mut rows = Vec::with_capacity(n - self.dim());
        let mut is_pivot = vec![false; n];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        for f in (0..n).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::unit(n, f);
            for (row, &p) in self.basis.rows().iter().zip(&self.pivots) {
                if row.get(f) {
                    v.set(p, true);
                }
            }
            rows.push(v);
        }
        Subspace::from_rows(n, rows).expect("n > 0")
    }

    /// Span of `self` together with extra vectors.
    pub fn extend(&self, extra: &[BitVec]) -> Result<Subspace> {
        let mut rows = self.basis.rows().to_vec();
        rows.extend_from_slice(extra);
        Subspace::from_rows(self.n(), rows)
    }

    pub fn intersect_dual_of(&self, v: &BitVec) -> Result<Subspace> {
        let dual = self.dual().extend(std::slice::from_ref(v))?;
        Ok(dual.dual())
    }

    /// Canonical basis of `self` modulo `sub`: reduced rows, zero at every
    /// pivot of `sub`, in RREF among themselves.
    pub fn complement_basis(&self, sub: &Subspace) -> Result<BitMat> {
        if !sub.is_subspace_of(self) {
            return Err(Error::NotSubspace(
                "quotient requested for a space not containing the subspace".into(),
            ));
        }
        let reduced: Vec<BitVec> = self.basis.rows().iter().map(|r| sub.reduce(r)).collect();
        let (m, _) = BitMat::new(self.n(), reduced)?.rref()?;
        Ok(m)
    }

    /// Number of elements, capped for use in float normalisations.
    pub fn size_log2(&self) -> u32 {
        self.dim() as u32
    }
}

/// Basis of `{v : m·vᵀ = 0}`.
pub fn dual_basis(m: &BitMat) -> Result<BitMat> {
    Ok(Subspace::span(m)?.dual().basis().clone())
}

/// True iff `v` lies in the row space of `space`.
pub fn contains(space: &BitMat, v: &BitVec) -> Result<bool> {
    if v.len() != space.ncols() {
        return Err(Error::LengthMismatch {
            expected: space.ncols(),
            found: v.len(),
        });
    }
    Subspace::span(space)?.contains(v)
}

/// One canonical representative per coset of `sub` in `sup`, the zero coset
/// first. Representative `i` is the combination of the complement basis rows
/// selected by the bits of `i`.
pub fn coset_reps(sup: &BitMat, sub: &BitMat) -> Result<Vec<BitVec>> {
    let sup = Subspace::span(sup)?;
    let sub = if sub.nrows() == 0 {
        Subspace::zero(sup.n())?
    } else {
        Subspace::span(sub)?
    };
    let comp = sup.complement_basis(&sub)?;
    let d = comp.nrows() as u32;
    if d > 30 {
        return Err(Error::BudgetExceeded {
            required: d,
            budget: 30,
        });
    }
    Ok((0..1u64 << d)
        .map(|i| comp.combine(&BitVec::from_u64(d as usize, i)))
        .collect())
}

/// Flipped row index at each step of a binary reflected Gray code walk over
/// `2^d` combinations (the all-zero combination is step 0 and not yielded).
pub fn gray_steps(d: u32) -> impl Iterator<Item = usize> {
    (1u64..(1u64 << d)).map(|i| i.trailing_zeros() as usize)
}

/// Outcome of a minimum-weight search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Distance {
    /// Exact minimum weight.
    Exact(usize),
    /// No witness of weight `<= value - 1` exists.
    AtLeast(usize),
}

impl Distance {
    pub fn exact(self) -> Option<usize> {
        match self {
            Distance::Exact(d) => Some(d),
            Distance::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Exact(d) => write!(f, "{d}"),
            Distance::AtLeast(d) => write!(f, ">={d}"),
        }
    }
}

/// Minimum Hamming weight over `rowspace(big) \ rowspace(small)`.
///
/// Enumerates `big` exhaustively when `dim(big) <= budget_log2`; otherwise
/// walks vectors of weight `1..=w_max` in increasing weight, so the first
/// witness found is the exact minimum.
pub fn min_weight_excluding(
    big: &Subspace,
    small: &Subspace,
    w_max: usize,
    budget_log2: u32,
) -> Result<Distance> {
    if w_max == 0 {
        return Err(Error::Invalid("w_max must be positive".into()));
    }
    if !small.is_subspace_of(big) {
        return Err(Error::NotSubspace(
            "small space is not inside big space".into(),
        ));
    }
    if small.dim() == big.dim() {
        return Err(Error::EmptyDifference);
    }
    let small_checks = small.dual();
    if (big.dim() as u32) <= budget_log2 {
        Ok(Distance::Exact(exhaustive_min_weight(big, &small_checks)))
    } else {
        Ok(bounded_min_weight(big, &small_checks, w_max))
    }
}

fn exhaustive_min_weight(big: &Subspace, small_checks: &Subspace) -> usize {
    let rows = big.basis().rows();
    let syn_rows: Vec<BitVec> = rows
        .iter()
        .map(|r| small_checks.basis().syndrome(r))
        .collect();
    let mut v = BitVec::zeros(big.n());
    let mut syn = BitVec::zeros(small_checks.dim());
    let mut best = usize::MAX;
    for j in gray_steps(rows.len() as u32) {
        v.xor_assign(&rows[j]);
        syn.xor_assign(&syn_rows[j]);
        if !syn.is_zero() {
            best = best.min(v.weight());
        }
    }
    best
}

fn bounded_min_weight(big: &Subspace, small_checks: &Subspace, w_max: usize) -> Distance {
    let n = big.n();
    let big_checks = big.dual();
    // Column syndromes: membership is decided by XOR of the columns in the support.
    let col_big: Vec<BitVec> = (0..n)
        .map(|j| big_checks.basis().syndrome(&BitVec::unit(n, j)))
        .collect();
    let col_small: Vec<BitVec> = (0..n)
        .map(|j| small_checks.basis().syndrome(&BitVec::unit(n, j)))
        .collect();
    for w in 1..=w_max.min(n) {
        for support in (0..n).combinations(w) {
            let mut sb = BitVec::zeros(big_checks.dim());
            for &j in &support {
                sb.xor_assign(&col_big[j]);
            }
            if !sb.is_zero() {
                continue;
            }
            let mut ss = BitVec::zeros(small_checks.dim());
            for &j in &support {
                ss.xor_assign(&col_small[j]);
            }
            if !ss.is_zero() {
                return Distance::Exact(w);
            }
        }
    }
    Distance::AtLeast(w_max + 1)
}
