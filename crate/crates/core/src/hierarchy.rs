//! Diagonal gates on `k` qubits as phase polynomials.
//!
//! A diagonal whose entries are `ζ_{2^L}^{e(β)}` has a unique algebraic
//! normal form `e(β) = Σ_S c_S Π_{i∈S} β_i (mod 2^L)`. Variable `i` is bit `i`
//! of the integer index `β` (qubit 0 is the least significant bit). The
//! monomial on `S` with coefficient `o·2^v` (o odd) is exactly the gate
//! `C^(|S|-1)Z^{o/2^{L-1-v}}` on the qubits of `S`, which gives both the
//! level formula and the pretty printer.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gencoeff::LogicalDiagonal;
use crate::gf2::{BitMat, BitVec};

/// Largest `k` for which basis-change matching is attempted.
pub const BASIS_SEARCH_CAP: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePolynomial {
    pub k: usize,
    pub level: u32,
    /// Monomial (bitmask of variables) → nonzero coefficient in `Z_{2^level}`.
    pub coeffs: BTreeMap<u64, u64>,
}

impl PhasePolynomial {
    pub fn evaluate(&self, beta: u64) -> u64 {
        let m = 1u64 << self.level;
        self.coeffs
            .iter()
            .filter(|(&s, _)| beta & s == s)
            .fold(0, |acc, (_, &c)| (acc + c) % m)
    }

    pub fn constant(&self) -> u64 {
        self.coeffs.get(&0).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.coeffs
            .keys()
            .map(|s| s.count_ones())
            .max()
            .unwrap_or(0)
    }

    /// Clifford-hierarchy level of the diagonal (global phase ignored).
    pub fn level(&self) -> u32 {
        self.coeffs
            .iter()
            .filter(|(&s, _)| s != 0)
            .map(|(&s, &c)| s.count_ones() + self.level - 1 - c.trailing_zeros())
            .max()
            .unwrap_or(0)
    }

    /// Text form `e^{iπ·a/b} · NAME[qubits] · … · Z[qubits]`.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        let c0 = self.constant();
        if c0 != 0 {
            parts.push(format_phase(c0, self.level));
        }
        let mut paulis = Vec::new();
        for (&s, &c) in &self.coeffs {
            if s == 0 {
                continue;
            }
            let qubits: Vec<usize> = (0..self.k).filter(|&i| s >> i & 1 == 1).collect();
            if qubits.len() == 1 && c == 1u64 << (self.level - 1) {
                paulis.push(qubits[0]);
                continue;
            }
            parts.push(format!(
                "{}{}",
                gate_name(qubits.len(), c, self.level),
                qubit_list(&qubits)
            ));
        }
        if !paulis.is_empty() {
            parts.push(format!("Z{}", qubit_list(&paulis)));
        }
        if parts.is_empty() {
            "I".to_string()
        } else {
            parts.join(" · ")
        }
    }
}

fn qubit_list(q: &[usize]) -> String {
    let inner: Vec<String> = q.iter().map(|x| x.to_string()).collect();
    format!("[{}]", inner.join(","))
}

/// `e^{iπ·c/2^{L-1}}` in lowest terms.
pub fn format_phase(c: u64, level: u32) -> String {
    let den = 1u64 << (level - 1);
    let g = c.gcd(&den);
    let (num, den) = (c / g, den / g);
    match (num, den) {
        (0, _) => "1".to_string(),
        (1, 1) => "-1".to_string(),
        (1, d) => format!("e^{{iπ/{d}}}"),
        (n, d) => format!("e^{{iπ·{n}/{d}}}"),
    }
}

fn gate_name(arity: usize, c: u64, level: u32) -> String {
    let v = c.trailing_zeros();
    let odd = c >> v;
    let root = level - 1 - v;
    let mut name = match arity {
        1 => match root {
            0 => "Z".to_string(),
            1 => "P".to_string(),
            2 => "T".to_string(),
            j => format!("Z^{{1/{}}}", 1u64 << j),
        },
        a => {
            let base = match a {
                2 => "CZ".to_string(),
                3 => "CCZ".to_string(),
                a => format!("C^({})Z", a - 1),
            };
            if root == 0 {
                base
            } else {
                format!("{base}^{{1/{}}}", 1u64 << root)
            }
        }
    };
    if odd == (1u64 << (root + 1)) - 1 && root > 0 {
        name.push('†');
    } else if odd != 1 {
        let _ = write!(name, "^{odd}");
    }
    name
}

/// Algebraic normal form of exponents `exps[β]` at level `level` (Möbius
/// transform over the subset lattice, mod `2^level`).
pub fn phase_polynomial(exps: &[u64], level: u32) -> Result<PhasePolynomial> {
    let size = exps.len();
    if size == 0 || !size.is_power_of_two() {
        return Err(Error::Invalid(format!(
            "diagonal of size {size} is not 2^k"
        )));
    }
    let k = size.trailing_zeros() as usize;
    let m = 1u64 << level;
    let mut a: Vec<u64> = exps.iter().map(|e| e % m).collect();
    for i in 0..k {
        let bit = 1usize << i;
        for s in 0..size {
            if s & bit != 0 {
                a[s] = (a[s] + m - a[s ^ bit]) % m;
            }
        }
    }
    let coeffs = a
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c != 0)
        .map(|(s, c)| (s as u64, c))
        .collect();
    Ok(PhasePolynomial { k, level, coeffs })
}

/// Phase polynomial of an induced logical diagonal.
pub fn logical_polynomial(d: &LogicalDiagonal) -> PhasePolynomial {
    phase_polynomial(&d.exponents, d.level).expect("logical diagonal has 2^k entries")
}

/// Level by the recursive hierarchy definition: `0` for a multiple of the
/// identity, otherwise `1 + max_i level(U X_i U† X_i)`, where the commutator
/// with `X_i` is the diagonal `β ↦ U(β)·conj(U(β⊕e_i))`.
pub fn recursive_level(exps: &[u64], level: u32) -> u32 {
    let m = 1u64 << level;
    if exps.iter().all(|&e| (e + m - exps[0]).is_multiple_of(m)) {
        return 0;
    }
    let k = exps.len().trailing_zeros() as usize;
    (0..k)
        .map(|i| {
            let bit = 1usize << i;
            let d: Vec<u64> = (0..exps.len())
                .map(|b| (exps[b] + m - exps[b ^ bit] % m) % m)
                .collect();
            recursive_level(&d, level)
        })
        .max()
        .unwrap_or(0)
        + 1
}

/// A named diagonal used as a matching target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub name: String,
    pub k: usize,
    pub level: u32,
    pub exps: Vec<u64>,
}

/// One factor `C^(controls)Z^{odd/2^root}` on explicit qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Factor {
    qubits: Vec<usize>,
    root: u32,
    odd: u64,
}

impl Template {
    /// Parses a gate description on `k` qubits.
    ///
    /// Two forms are accepted. With brackets, factors name their qubits and
    /// are separated by `·`, `*` or spaces: `e^{iπ/4} · T†[0] · CZ[0,1] · Z[1]`
    /// (this is the printer's output format). Without brackets, `⊗`-separated
    /// factors act on consecutive qubits: `T†⊗T†`, `(T†)^⊗2`, `CZ`, `C^(3)Z`.
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        let text = text.trim();
        let mut factors = Vec::new();
        let mut phase: Option<(u64, u32)> = None;
        if text.contains('[') {
            let protected = text.replace("π·", "π#");
            for tok in protected.split(['·', '*', ' ']).filter(|t| !t.is_empty()) {
                let tok = &tok.replace("π#", "π·");
                if tok.starts_with("e^") || tok == "-1" || tok == "1" {
                    phase = Some(parse_phase(tok)?);
                    continue;
                }
                let (name, rest) = tok
                    .split_once('[')
                    .ok_or_else(|| Error::Parse(format!("factor \"{tok}\" lacks qubits")))?;
                let qubits = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse(format!("unterminated qubit list in \"{tok}\"")))?
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad qubit index in \"{tok}\"")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (arity, root, odd) = parse_gate_name(name)?;
                if arity == 1 && qubits.len() > 1 {
                    for q in qubits {
                        factors.push(Factor {
                            qubits: vec![q],
                            root,
                            odd,
                        });
                    }
                } else if arity == 0 || arity == qubits.len() {
                    factors.push(Factor { qubits, root, odd });
                } else {
                    return Err(Error::Parse(format!(
                        "\"{tok}\" has the wrong number of qubits"
                    )));
                }
            }
        } else if text != "I" {
            let mut next = 0usize;
            for part in text.split('⊗').map(str::trim).filter(|p| !p.is_empty()) {
                let (name, reps) = if let Some(inner) = part.strip_prefix('(') {
                    let (name, tail) = inner
                        .split_once(")^")
                        .ok_or_else(|| Error::Parse(format!("bad power in \"{part}\"")))?;
                    // `(G)^⊗r` was split at ⊗ already; the count follows in the next part.
                    if tail.is_empty() {
                        (name, usize::MAX)
                    } else {
                        (
                            name,
                            tail.parse()
                                .map_err(|_| Error::Parse(format!("bad power in \"{part}\"")))?,
                        )
                    }
                } else if let Ok(r) = part.parse::<usize>() {
                    // Count of a preceding `(G)^⊗` group.
                    let last: Factor = factors
                        .last()
                        .cloned()
                        .ok_or_else(|| Error::Parse(format!("dangling power in \"{text}\"")))?;
                    let arity = last.qubits.len();
                    for _ in 1..r {
                        factors.push(Factor {
                            qubits: (next..next + arity).collect(),
                            ..last.clone()
                        });
                        next += arity;
                    }
                    continue;
                } else {
                    (part, 1)
                };
                let (arity, root, odd) = parse_gate_name(name)?;
                let arity = arity.max(1);
                let reps = if reps == usize::MAX { 1 } else { reps };
                for _ in 0..reps {
                    factors.push(Factor {
                        qubits: (next..next + arity).collect(),
                        root,
                        odd,
                    });
                    next += arity;
                }
            }
        }
        Self::from_factors(text, k, &factors, phase)
    }

    fn from_factors(
        name: &str,
        k: usize,
        factors: &[Factor],
        phase: Option<(u64, u32)>,
    ) -> Result<Self> {
        let level = factors
            .iter()
            .map(|f| f.root + 1)
            .chain(phase.map(|(_, l)| l))
            .max()
            .unwrap_or(1);
        if level > crate::cyclo::MAX_LEVEL {
            return Err(Error::LevelOverflow(level));
        }
        let m = 1u64 << level;
        let mut exps = vec![0u64; 1 << k];
        if let Some((c, l)) = phase {
            for e in &mut exps {
                *e = (c << (level - l)) % m;
            }
        }
        for f in factors {
            if f.qubits.iter().any(|&q| q >= k) {
                return Err(Error::Parse(format!(
                    "qubit index out of range for k = {k} in \"{name}\""
                )));
            }
            let mask: usize = f.qubits.iter().map(|&q| 1usize << q).sum();
            let c = (f.odd << (level - 1 - f.root)) % m;
            for (b, e) in exps.iter_mut().enumerate() {
                if b & mask == mask {
                    *e = (*e + c) % m;
                }
            }
        }
        Ok(Self {
            name: name.to_string(),
            k,
            level,
            exps,
        })
    }

    pub fn polynomial(&self) -> PhasePolynomial {
        phase_polynomial(&self.exps, self.level).expect("template has 2^k entries")
    }
}

fn parse_phase(tok: &str) -> Result<(u64, u32)> {
    match tok {
        "1" => return Ok((0, 1)),
        "-1" => return Ok((1, 1)),
        _ => {}
    }
    let bad = || Error::Parse(format!("bad phase \"{tok}\""));
    let inner = tok
        .strip_prefix("e^{iπ")
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(bad)?;
    let (num, den) = if let Some(d) = inner.strip_prefix('/') {
        (1u64, d.parse::<u64>().map_err(|_| bad())?)
    } else {
        let rest = inner.strip_prefix('·').ok_or_else(bad)?;
        let (n, d) = rest.split_once('/').unwrap_or((rest, "1"));
        (n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?)
    };
    if !den.is_power_of_two() {
        return Err(bad());
    }
    let level = den.trailing_zeros() + 1;
    Ok((num % (2 * den), level))
}

/// `(arity, root, odd)` for names like `T†`, `P`, `Z^{1/8}^3`, `CZ`, `CCZ^{1/2}`,
/// `C^(3)Z`. Arity 1 names may be applied to several qubits at once.
fn parse_gate_name(name: &str) -> Result<(usize, u32, u64)> {
    let bad = || Error::Parse(format!("unknown gate \"{name}\""));
    let (mut body, dagger) = match name.strip_suffix('†') {
        Some(b) => (b, true),
        None => (name, false),
    };
    let mut power = 1u64;
    if let Some((b, p)) = body.rsplit_once('^') {
        if !p.is_empty() && p.bytes().all(|c| c.is_ascii_digit()) {
            power = p.parse().map_err(|_| bad())?;
            body = b;
        }
    }
    let (base, root) = match body.split_once("^{1/") {
        Some((b, r)) => {
            let d: u64 = r
                .strip_suffix('}')
                .ok_or_else(bad)?
                .parse()
                .map_err(|_| bad())?;
            if !d.is_power_of_two() {
                return Err(bad());
            }
            (b, d.trailing_zeros())
        }
        None => (body, 0),
    };
    let (arity, root) = match base {
        "Z" => (1, root),
        "P" | "S" if root == 0 => (1, 1),
        "T" if root == 0 => (1, 2),
        "CZ" => (2, root),
        "CCZ" => (3, root),
        _ => {
            let c = base
                .strip_prefix("C^(")
                .and_then(|s| s.strip_suffix(")Z"))
                .ok_or_else(bad)?;
            (c.parse::<usize>().map_err(|_| bad())? + 1, root)
        }
    };
    let modulus = 1u64 << (root + 1);
    let odd = if dagger {
        (modulus - power % modulus) % modulus
    } else {
        power % modulus
    };
    Ok((arity, root, odd))
}

/// Search options for [`match_gate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchOptions {
    pub allow_pauli_z: bool,
    /// Also allow conjugation by a logical Pauli X (`β ↦ β ⊕ a`).
    pub allow_pauli_x: bool,
    pub allow_basis_change: bool,
}

impl Default for MatchOptions {
    fn default() -> Self {
        Self {
            allow_pauli_z: true,
            allow_pauli_x: false,
            allow_basis_change: false,
        }
    }
}

/// Result of matching `D(β) = p + T(β·M ⊕ a) + 2^{L-1}·(z·β)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GateMatch {
    pub matched: bool,
    pub template: String,
    /// Exponent of the global phase at `level`.
    pub global_phase: u64,
    pub level: u32,
    pub pauli_z_mask: BitVec,
    pub pauli_x_mask: BitVec,
    /// Row `i` is the template input selected by logical qubit `i`.
    pub basis_change: Option<BitMat>,
}

impl GateMatch {
    fn unmatched(template: &Template, k: usize, level: u32) -> Self {
        Self {
            matched: false,
            template: template.name.clone(),
            global_phase: 0,
            level,
            pauli_z_mask: BitVec::zeros(k),
            pauli_x_mask: BitVec::zeros(k),
            basis_change: None,
        }
    }

    pub fn phase_string(&self) -> String {
        format_phase(self.global_phase, self.level)
    }
}

impl Serialize for BitMat {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

/// Matches a diagonal (exponents at `level`) against a template up to global
/// phase and, optionally, logical Pauli Z, Pauli-X conjugation and an
/// invertible change of logical basis.
///
/// Search order: shifts `a` in increasing integer order; for each, the
/// identity basis first, then bases whose rows are chosen in increasing
/// integer order. The first hit is returned.
pub fn match_gate(
    exps: &[u64],
    level: u32,
    template: &Template,
    opts: MatchOptions,
) -> Result<GateMatch> {
    let size = exps.len();
    if size != template.exps.len() {
        return Err(Error::LengthMismatch {
            expected: template.exps.len(),
            found: size,
        });
    }
    let k = template.k;
    let lv = level.max(template.level);
    let m = 1u64 << lv;
    let d: Vec<u64> = exps.iter().map(|&e| (e << (lv - level)) % m).collect();
    let t: Vec<u64> = template
        .exps
        .iter()
        .map(|&e| (e << (lv - template.level)) % m)
        .collect();
    let shifts: Vec<usize> = if opts.allow_pauli_x {
        (0..size).collect()
    } else {
        vec![0]
    };
    let search = Search {
        d: &d,
        t: &t,
        k,
        m,
        allow_z: opts.allow_pauli_z,
    };
    for &a in &shifts {
        let identity: Vec<usize> = (0..k).map(|i| 1 << i).collect();
        let found = search
            .check_full(&identity, a)
            .map(|z| (identity.clone(), z))
            .or_else(|| {
                if opts.allow_basis_change && k <= BASIS_SEARCH_CAP {
                    search.backtrack(a)
                } else {
                    None
                }
            });
        if let Some((rows, z)) = found {
            let p = (d[0] + m - t[a]) % m;
            let result = GateMatch {
                matched: true,
                template: template.name.clone(),
                global_phase: p,
                level: lv,
                pauli_z_mask: BitVec::from_u64(k, z as u64),
                pauli_x_mask: BitVec::from_u64(k, a as u64),
                basis_change: Some(
                    BitMat::new(
                        k,
                        rows.iter()
                            .map(|&r| BitVec::from_u64(k, r as u64))
                            .collect(),
                    )
                    .expect("rows have k bits"),
                )
                .filter(|mm| *mm != BitMat::identity(k)),
            };
            assert!(
                verify_match(&d, &t, lv, &result),
                "match postcondition violated"
            );
            return Ok(result);
        }
    }
    Ok(GateMatch::unmatched(template, k, lv))
}

/// Matches an induced logical diagonal.
pub fn match_logical(
    d: &LogicalDiagonal,
    template: &Template,
    opts: MatchOptions,
) -> Result<GateMatch> {
    match_gate(&d.exponents, d.level, template, opts)
}

fn image(rows: &[usize], beta: usize, a: usize) -> usize {
    rows.iter()
        .enumerate()
        .filter(|(i, _)| beta >> i & 1 == 1)
        .fold(a, |acc, (_, &r)| acc ^ r)
}

/// Independent re-evaluation of a reported match.
fn verify_match(d: &[u64], t: &[u64], level: u32, g: &GateMatch) -> bool {
    let m = 1u64 << level;
    let k = g.pauli_z_mask.len();
    let rows: Vec<usize> = match &g.basis_change {
        Some(mm) => mm.rows().iter().map(|r| r.to_u64() as usize).collect(),
        None => (0..k).map(|i| 1 << i).collect(),
    };
    let a = g.pauli_x_mask.to_u64() as usize;
    let z = g.pauli_z_mask.to_u64() as usize;
    (0..d.len()).all(|b| {
        let zb = if (b & z).count_ones() % 2 == 1 {
            m / 2
        } else {
            0
        };
        d[b] == (g.global_phase + t[image(&rows, b, a)] + zb) % m
    })
}

struct Search<'a> {
    d: &'a [u64],
    t: &'a [u64],
    k: usize,
    m: u64,
    allow_z: bool,
}

impl Search<'_> {
    /// Z mask making `rows` (fully chosen) work, if any.
    fn check_full(&self, rows: &[usize], a: usize) -> Option<usize> {
        let p = (self.d[0] + self.m - self.t[a]) % self.m;
        let mut z = 0usize;
        for (i, &r) in rows.iter().enumerate() {
            if self.linear_term(1 << i, r ^ a, p)? {
                z |= 1 << i;
            }
        }
        (0..self.d.len())
            .all(|b| self.holds(b, image(rows, b, a), p, z))
            .then_some(z)
    }

    /// Whether `D(e_i) − T(x) − p` is a Pauli-Z term (true), zero (false) or neither.
    fn linear_term(&self, beta: usize, x: usize, p: u64) -> Option<bool> {
        let diff = (self.d[beta] + 2 * self.m - self.t[x] - p) % self.m;
        if diff == 0 {
            Some(false)
        } else if self.allow_z && diff == self.m / 2 {
            Some(true)
        } else {
            None
        }
    }

    fn holds(&self, beta: usize, x: usize, p: u64, z: usize) -> bool {
        let zb = if (beta & z).count_ones() % 2 == 1 {
            self.m / 2
        } else {
            0
        };
        self.d[beta] == (p + self.t[x] + zb) % self.m
    }

    fn backtrack(&self, a: usize) -> Option<(Vec<usize>, usize)> {
        let p = (self.d[0] + self.m - self.t[a]) % self.m;
        let size = 1usize << self.k;
        let mut rows = Vec::with_capacity(self.k);
        let mut img = vec![0usize; size];
        img[0] = a;
        let mut in_span = vec![false; size];
        in_span[0] = true;
        self.extend(&mut rows, &mut img, &mut in_span, 0, a, p)
    }

    fn extend(
        &self,
        rows: &mut Vec<usize>,
        img: &mut [usize],
        in_span: &mut [bool],
        z: usize,
        a: usize,
        p: u64,
    ) -> Option<(Vec<usize>, usize)> {
        let j = rows.len();
        if j == self.k {
            return Some((rows.clone(), z));
        }
        let half = 1usize << j;
        for r in 1..(1usize << self.k) {
            if in_span[r] {
                continue;
            }
            let Some(zj) = self.linear_term(half, r ^ a, p) else {
                continue;
            };
            let z2 = z | ((zj as usize) << j);
            let mut ok = true;
            for b in half..2 * half {
                img[b] = img[b - half] ^ r;
                if !self.holds(b, img[b], p, z2) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            let added: Vec<usize> = (0..half).map(|b| (img[b] ^ a) ^ r).collect();
            for &s in &added {
                in_span[s] = true;
            }
            rows.push(r);
            if let Some(found) = self.extend(rows, img, in_span, z2, a, p) {
                return Some(found);
            }
            rows.pop();
            for &s in &added {
                in_span[s] = false;
            }
        }
        None
    }
}
