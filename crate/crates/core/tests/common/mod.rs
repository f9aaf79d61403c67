#![allow(dead_code)]

use dchsynth::gate::{transversal_zrot, Block};
use dchsynth::gencoeff::{self, coefficient, EngineConfig, Side};
use dchsynth::hierarchy;
use dchsynth::synth;
use dchsynth::{BitVec, CssCode, Cyclo, DiagonalGate, LocalDiag, Subspace};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> BitVec {
    BitVec::from_bools(&(0..n).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>())
}

/// Random code on `n` qubits with `k >= 1` and random `y`.
pub fn random_code(rng: &mut ChaCha8Rng, n: usize) -> CssCode {
    loop {
        let d1 = rng.gen_range(1..=n);
        let c1 = Subspace::from_rows(n, (0..d1).map(|_| random_vec(rng, n)).collect()).unwrap();
        if c1.dim() == 0 {
            continue;
        }
        let basis = c1.basis().rows().to_vec();
        let d2 = rng.gen_range(0..c1.dim());
        let c2_rows: Vec<BitVec> = (0..d2)
            .map(|_| {
                let mut v = BitVec::zeros(n);
                for r in &basis {
                    if rng.gen_bool(0.5) {
                        v.xor_assign(r);
                    }
                }
                v
            })
            .collect();
        let c2 = Subspace::from_rows(n, c2_rows).unwrap();
        if c2.dim() >= c1.dim() {
            continue;
        }
        let y = random_vec(rng, n);
        return CssCode::from_spaces(c2, c1.dual(), &y).unwrap();
    }
}

/// Random transversal rotation, block-local diagonal, or quadratic-form gate.
pub fn random_gate(rng: &mut ChaCha8Rng, n: usize) -> DiagonalGate {
    match rng.gen_range(0..3) {
        0 => transversal_zrot(n, rng.gen_range(1..=3)).unwrap(),
        1 => {
            let mut qubits: Vec<usize> = (0..n).collect();
            qubits.shuffle(rng);
            let mut blocks = Vec::new();
            let mut rest = &qubits[..];
            while !rest.is_empty() {
                let size = rng.gen_range(1..=rest.len().min(3));
                let (head, tail) = rest.split_at(size);
                rest = tail;
                if rng.gen_bool(0.2) {
                    continue;
                }
                let level = rng.gen_range(1..=3u32);
                let exps = (0..1usize << size)
                    .map(|_| rng.gen_range(0..1u64 << level))
                    .collect();
                blocks.push(Block {
                    qubits: head.to_vec(),
                    diag: LocalDiag::new(level, exps).unwrap(),
                });
            }
            DiagonalGate::blocks(n, blocks).unwrap()
        }
        _ => {
            let level = rng.gen_range(1..=3u32);
            let mut r = vec![vec![0u64; n]; n];
            for i in 0..n {
                for j in i..n {
                    let v = rng.gen_range(0..1u64 << level);
                    r[i][j] = v;
                    r[j][i] = v;
                }
            }
            DiagonalGate::qfd(n, level, r).unwrap()
        }
    }
}

fn a0(code: &CssCode, gate: &DiagonalGate, gamma: &BitVec) -> Cyclo {
    coefficient(
        code,
        gate,
        &BitVec::zeros(code.n()),
        gamma,
        &EngineConfig::default(),
    )
    .unwrap()
}

/// Removal splits each coefficient into the two new ones:
/// `A = A'_γ + A'_{γ⊕γ₀}` and `A'_γ − A'_{γ⊕γ₀} = s_γ(w0)`, with the new
/// coefficients taken in the old frame.
pub fn split_identity(seed: u64, n: usize) -> Result<(), TestCaseError> {
    let cfg = EngineConfig::default();
    let mut r = rng(seed);
    let code = random_code(&mut r, n);
    if code.c1().dim() == n {
        return Ok(());
    }
    let gate = random_gate(&mut r, n);
    let w0 = loop {
        let v = random_vec(&mut r, n);
        if !code.c1().contains(&v).unwrap() {
            break v;
        }
    };
    let split = gencoeff::split_values(&code, &gate, &w0, &cfg).unwrap();
    let rem = synth::remove_z(&code, &gate, &w0, &cfg).unwrap();
    let framed = |g: &BitVec| {
        let v = a0(&rem.code, &gate, g);
        if g.dot(&rem.y_shift) {
            -v
        } else {
            v
        }
    };
    for (gamma, s) in &split.entries {
        let a = a0(&code, &gate, gamma);
        let a1 = framed(gamma);
        let a2 = framed(&gamma.xor(&rem.gamma0));
        prop_assert_eq!(&a1 + &a2, a);
        prop_assert_eq!(&a1 - &a2, s.clone());
    }
    prop_assert_eq!(
        rem.norm,
        gencoeff::is_preserved(&rem.code, &gate, &cfg).unwrap().norm
    );
    Ok(())
}

/// The X-side (codeword) and Z-side (Pauli coefficient) formulas agree.
pub fn side_agreement(seed: u64, n: usize) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let code = random_code(&mut r, n);
    let gate = random_gate(&mut r, n);
    let mu = random_vec(&mut r, n);
    let gamma = random_vec(&mut r, n);
    let x = coefficient(&code, &gate, &mu, &gamma, &EngineConfig::with_side(Side::X)).unwrap();
    let z = coefficient(&code, &gate, &mu, &gamma, &EngineConfig::with_side(Side::Z)).unwrap();
    prop_assert_eq!(x, z);
    Ok(())
}

/// Closed-form level equals the commutator recursion.
pub fn level_recursion(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let k = r.gen_range(1..=4usize);
    let level = r.gen_range(1..=4u32);
    let exps: Vec<u64> = (0..1 << k).map(|_| r.gen_range(0..1u64 << level)).collect();
    let p = hierarchy::phase_polynomial(&exps, level).unwrap();
    prop_assert_eq!(p.level(), hierarchy::recursive_level(&exps, level));
    Ok(())
}

/// `d_u = Σ_v (−1)^{u·v} f(v)` and `Σ_v |f(v)|² = 1`.
pub fn pauli_round_trip(seed: u64, n: usize) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let gate = random_gate(&mut r, n);
    let size = 1u64 << n;
    let f: Vec<Cyclo> = (0..size)
        .map(|v| gate.pauli_coeff(&BitVec::from_u64(n, v)).unwrap())
        .collect();
    let norm: Cyclo = f.iter().map(|c| c.abs_sq()).sum();
    prop_assert!(norm.is_one());
    for u in 0..size {
        let back: Cyclo = (0..size)
            .map(|v| {
                if (u & v).count_ones() % 2 == 1 {
                    -&f[v as usize]
                } else {
                    f[v as usize].clone()
                }
            })
            .sum();
        prop_assert_eq!(back, gate.entry(&BitVec::from_u64(n, u)).unwrap());
    }
    Ok(())
}
