//! Exact dyadic cyclotomic numbers.
//!
//! A [`Cyclo`] is `2^-e · Σ_j c_j ζ^j` with `ζ = e^{iπ/2^{L-1}}` a primitive
//! `2^L`-th root of unity and `0 <= j < 2^{L-1}`. The powers
//! `1, ζ, …, ζ^{2^{L-1}-1}` form an integral basis of `Z[ζ]`, so once the
//! denominator exponent and the level are both minimal the representation is
//! unique and structural equality is value equality.
//!
//! Values produced at different levels mix freely: operands are re-embedded
//! at the larger level and the result is demoted back as far as it goes.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Highest supported level: `ζ = e^{iπ/128}`.
pub const MAX_LEVEL: u32 = 8;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclo {
    level: u32,
    coeffs: Vec<BigInt>,
    denom_exp: u32,
}

fn half_order(level: u32) -> usize {
    1usize << (level - 1)
}

impl Cyclo {
    /// Builds and canonicalises `2^-denom_exp · Σ coeffs[j] ζ_{2^level}^j`.
    pub fn new(level: u32, coeffs: Vec<BigInt>, denom_exp: u32) -> Result<Self> {
        if level == 0 || level > MAX_LEVEL {
            return Err(Error::LevelOverflow(level));
        }
        if coeffs.len() != half_order(level) {
            return Err(Error::LengthMismatch {
                expected: half_order(level),
                found: coeffs.len(),
            });
        }
        Ok(Self::raw(level, coeffs, denom_exp))
    }

    fn raw(level: u32, coeffs: Vec<BigInt>, denom_exp: u32) -> Self {
        let mut c = Self {
            level,
            coeffs,
            denom_exp,
        };
        c.canonicalize();
        c
    }

    fn canonicalize(&mut self) {
        if self.coeffs.iter().all(Zero::is_zero) {
            self.level = 1;
            self.coeffs = vec![BigInt::zero()];
            self.denom_exp = 0;
            return;
        }
        while self.denom_exp > 0 && self.coeffs.iter().all(|c| c.is_even()) {
            for c in &mut self.coeffs {
                *c >>= 1;
            }
            self.denom_exp -= 1;
        }
        while self.level > 1 && self.coeffs.iter().skip(1).step_by(2).all(Zero::is_zero) {
            self.coeffs = self.coeffs.iter().step_by(2).cloned().collect();
            self.level -= 1;
        }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(v: i64) -> Self {
        Self::raw(1, vec![BigInt::from(v)], 0)
    }

    /// `v / 2^e`.
    pub fn dyadic(v: i64, e: u32) -> Self {
        Self::raw(1, vec![BigInt::from(v)], e)
    }

    /// `ζ_{2^level}^k` for any integer `k`.
    pub fn root(level: u32, k: i64) -> Result<Self> {
        if level == 0 || level > MAX_LEVEL {
            return Err(Error::LevelOverflow(level));
        }
        let order = 1i64 << level;
        let k = k.rem_euclid(order) as usize;
        let h = half_order(level);
        let mut coeffs = vec![BigInt::zero(); h];
        if k < h {
            coeffs[k] = BigInt::one();
        } else {
            coeffs[k - h] = -BigInt::one();
        }
        Ok(Self::raw(level, coeffs, 0))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self::root(2, 1).expect("level 2 is valid")
    }

    /// `√2 = ζ₈ − ζ₈³`.
    pub fn sqrt2() -> Self {
        Self::raw(
            3,
            vec![
                BigInt::zero(),
                BigInt::one(),
                BigInt::zero(),
                -BigInt::one(),
            ],
            0,
        )
    }

    /// `1/√2`.
    pub fn inv_sqrt2() -> Self {
        Self::sqrt2().div_pow2(1)
    }

    /// `cos(π/2^l)` for `l >= 1`.
    pub fn cos_pi_over_pow2(l: u32) -> Result<Self> {
        let z = Self::root(l + 1, 1)?;
        Ok((&z + &z.conj()).div_pow2(1))
    }

    /// `i·sin(π/2^l)` for `l >= 1`.
    pub fn i_sin_pi_over_pow2(l: u32) -> Result<Self> {
        let z = Self::root(l + 1, 1)?;
        Ok((&z - &z.conj()).div_pow2(1))
    }

    /// Folds an exponent histogram into a value: `2^-e · Σ_k counts[k] ζ_{2^level}^k`.
    /// `counts` has one entry per exponent in `Z_{2^level}`.
    pub fn from_exponent_counts(level: u32, counts: &[i64], denom_exp: u32) -> Result<Self> {
        if level == 0 || level > MAX_LEVEL {
            return Err(Error::LevelOverflow(level));
        }
        let h = half_order(level);
        if counts.len() != 2 * h {
            return Err(Error::LengthMismatch {
                expected: 2 * h,
                found: counts.len(),
            });
        }
        let coeffs = (0..h)
            .map(|j| BigInt::from(counts[j]) - BigInt::from(counts[j + h]))
            .collect();
        Ok(Self::raw(level, coeffs, denom_exp))
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn denom_exp(&self) -> u32 {
        self.denom_exp
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    /// Coefficient vector after re-embedding at `level` (same denominator).
    pub fn coeffs_at(&self, level: u32) -> Result<Vec<BigInt>> {
        if level < self.level || level > MAX_LEVEL {
            return Err(Error::Invalid(format!(
                "cannot embed a level-{} value at level {level}",
                self.level
            )));
        }
        let stride = 1usize << (level - self.level);
        let mut out = vec![BigInt::zero(); half_order(level)];
        for (j, c) in self.coeffs.iter().enumerate() {
            out[j * stride] = c.clone();
        }
        Ok(out)
    }

    /// Value-preserving move to level `level`. Values are always stored at
    /// their minimal level, so this only validates the request; the
    /// re-embedded coefficients are available through [`Cyclo::coeffs_at`].
    pub fn promote(&self, level: u32) -> Result<Self> {
        self.coeffs_at(level)?;
        Ok(self.clone())
    }

    /// Common-level, common-denominator coefficient vectors of two values.
    fn aligned(a: &Cyclo, b: &Cyclo) -> (u32, u32, Vec<BigInt>, Vec<BigInt>) {
        let level = a.level.max(b.level);
        let e = a.denom_exp.max(b.denom_exp);
        let lift = |x: &Cyclo| -> Vec<BigInt> {
            let shift = e - x.denom_exp;
            x.coeffs_at(level)
                .expect("level within range")
                .into_iter()
                .map(|c| c << shift)
                .collect()
        };
        (level, e, lift(a), lift(b))
    }

    pub fn conj(&self) -> Self {
        let h = self.coeffs.len();
        let mut out = vec![BigInt::zero(); h];
        out[0] = self.coeffs[0].clone();
        for j in 1..h {
            out[h - j] = -self.coeffs[j].clone();
        }
        Self::raw(self.level, out, self.denom_exp)
    }

    /// `|a|² = a · conj(a)`; always real.
    pub fn abs_sq(&self) -> Self {
        self * &self.conj()
    }

    pub fn is_real(&self) -> bool {
        self.conj() == *self
    }

    /// Divide by `2^e`.
    pub fn div_pow2(&self, e: u32) -> Self {
        Self::raw(self.level, self.coeffs.clone(), self.denom_exp + e)
    }

    pub fn scale(&self, k: i64) -> Self {
        let k = BigInt::from(k);
        Self::raw(
            self.level,
            self.coeffs.iter().map(|c| c * &k).collect(),
            self.denom_exp,
        )
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            exp >>= 1;
        }
        acc
    }

    /// `Some(k)` iff the value equals `ζ_{2^L}^k` with `L` its stored level.
    pub fn as_root_of_unity(&self) -> Option<u64> {
        if self.denom_exp != 0 {
            return None;
        }
        let mut nonzero = self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero());
        let (j, c) = nonzero.next()?;
        if nonzero.next().is_some() {
            return None;
        }
        let h = self.coeffs.len() as u64;
        if c.is_one() {
            Some(j as u64)
        } else if (-c).is_one() {
            Some(j as u64 + h)
        } else {
            None
        }
    }

    /// Root-of-unity exponent expressed at a (possibly higher) level.
    pub fn root_exponent_at(&self, level: u32) -> Option<u64> {
        if level < self.level {
            return None;
        }
        self.as_root_of_unity().map(|k| k << (level - self.level))
    }

    pub fn to_complex(&self) -> Complex64 {
        let scale = 0.5f64.powi(self.denom_exp as i32);
        let order = (1u64 << self.level) as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let theta = 2.0 * std::f64::consts::PI * j as f64 / order;
            let cf = c.to_f64().unwrap_or(f64::NAN);
            acc += Complex64::from_polar(cf, theta);
        }
        acc * scale
    }

    /// Integer numerator when the value is rational: `(num, e)` with value `num/2^e`.
    pub fn as_rational(&self) -> Option<(BigInt, u32)> {
        if self.level == 1 {
            Some((self.coeffs[0].clone(), self.denom_exp))
        } else {
            None
        }
    }
}

impl Default for Cyclo {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for &Cyclo {
    type Output = Cyclo;
    fn add(self, rhs: &Cyclo) -> Cyclo {
        let (level, e, a, b) = Cyclo::aligned(self, rhs);
        Cyclo::raw(level, a.into_iter().zip(b).map(|(x, y)| x + y).collect(), e)
    }
}

impl Sub for &Cyclo {
    type Output = Cyclo;
    fn sub(self, rhs: &Cyclo) -> Cyclo {
        let (level, e, a, b) = Cyclo::aligned(self, rhs);
        Cyclo::raw(level, a.into_iter().zip(b).map(|(x, y)| x - y).collect(), e)
    }
}

impl Mul for &Cyclo {
    type Output = Cyclo;
    fn mul(self, rhs: &Cyclo) -> Cyclo {
        let level = self.level.max(rhs.level);
        let a = self.coeffs_at(level).expect("level within range");
        let b = rhs.coeffs_at(level).expect("level within range");
        let h = a.len();
        let mut out = vec![BigInt::zero(); h];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                // ζ^h = −1: wrap-around terms change sign.
                if i + j < h {
                    out[i + j] += x * y;
                } else {
                    out[i + j - h] -= x * y;
                }
            }
        }
        Cyclo::raw(level, out, self.denom_exp + rhs.denom_exp)
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo::raw(
            self.level,
            self.coeffs.iter().map(|c| -c).collect(),
            self.denom_exp,
        )
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Cyclo {
            type Output = Cyclo;
            fn $m(self, rhs: Cyclo) -> Cyclo {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Cyclo> for Cyclo {
            type Output = Cyclo;
            fn $m(self, rhs: &Cyclo) -> Cyclo {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        -&self
    }
}

impl AddAssign<&Cyclo> for Cyclo {
    fn add_assign(&mut self, rhs: &Cyclo) {
        *self = &*self + rhs;
    }
}

impl std::iter::Sum for Cyclo {
    fn sum<I: Iterator<Item = Cyclo>>(iter: I) -> Cyclo {
        iter.fold(Cyclo::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "2^-{} * [", self.denom_exp)?;
        for (j, c) in self.coeffs.iter().enumerate() {
            if j > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "] @ {}", self.level)
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_complex();
        write!(f, "Cyclo({self} ≈ {:.6}{:+.6}i)", z.re, z.im)
    }
}

impl FromStr for Cyclo {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed cyclotomic value \"{s}\""));
        let (head, rest) = s.trim().split_once('*').ok_or_else(bad)?;
        let e: u32 = head
            .trim()
            .strip_prefix("2^-")
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        let (list, level) = rest.split_once('@').ok_or_else(bad)?;
        let level: u32 = level.trim().parse().map_err(|_| bad())?;
        let list = list
            .trim()
            .strip_prefix('[')
            .and_then(|l| l.strip_suffix(']'))
            .ok_or_else(bad)?;
        let coeffs = list
            .split(',')
            .map(|c| c.trim().parse::<BigInt>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Cyclo::new(level, coeffs, e)
    }
}

impl serde::Serialize for Cyclo {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Cyclo {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Human-readable rendering of a real dyadic value, e.g. `3/4` or `-1/16`.
pub fn format_rational(c: &Cyclo) -> Option<String> {
    let (num, e) = c.as_rational()?;
    if e == 0 {
        Some(num.to_string())
    } else {
        Some(format!("{num}/{}", BigInt::one() << e))
    }
}

/// Sign-aware absolute numerator check used by callers that need `|v| <= 1`.
pub fn rational_abs_le_one(c: &Cyclo) -> Option<bool> {
    let (num, e) = c.as_rational()?;
    Some(num.abs() <= (BigInt::one() << e))
}
