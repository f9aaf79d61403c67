//! Acceptance criteria 1–9. Runs without the libtest harness so that every
//! `criterion N: PASS|FAIL` line is printed; any failure exits nonzero.

mod common;

use std::time::{Duration, Instant};

use dchsynth::families::{self, family_2l_l_2, qrm_code, triorthogonal_2};
use dchsynth::gate::{transversal_zrot, DiagonalGate};
use dchsynth::gencoeff::{self, coefficient, EngineConfig, GenCoeffRow};
use dchsynth::hierarchy::{self, match_logical, MatchOptions, Template};
use dchsynth::oracle;
use dchsynth::synth::{self, PipelineConfig};
use dchsynth::{BitVec, CssCode, Cyclo, Distance, LiftPolicy};
use proptest::test_runner::{Config, TestRunner};
use rand::Rng;

const ORACLE_TOL: f64 = 1e-9;
const PROPERTY_CASES: u32 = 1000;
const SAMPLED_GAMMAS: usize = 100;
const SAMPLED_OFF_SYNDROME: usize = 100;
const SAMPLE_SEED: u64 = 0x5eed_6415;

type Check = Result<String, String>;

fn report(id: u32, title: &str, limit: Duration, check: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed();
    let result = match result {
        Ok(detail) if elapsed > limit => {
            Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"))
        }
        r => r,
    };
    match &result {
        Ok(detail) => println!("criterion {id}: PASS {title} ({detail}; {elapsed:.2?})"),
        Err(why) => println!("criterion {id}: FAIL {title} ({why}; {elapsed:.2?})"),
    }
    result.is_ok()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cfg() -> EngineConfig {
    EngineConfig::default()
}

/// `row = g·target` for one unimodular `g`, checked exactly: all cross products
/// against a pivot agree and the pivot has equal modulus.
fn equal_up_to_phase(row: &[Cyclo], target: &[Cyclo]) -> bool {
    if row.len() != target.len() {
        return false;
    }
    let Some(p) = target.iter().position(|t| !t.is_zero()) else {
        return row.iter().all(Cyclo::is_zero);
    };
    row[p].abs_sq() == target[p].abs_sq()
        && row
            .iter()
            .zip(target)
            .all(|(r, t)| r * &target[p] == t * &row[p])
}

/// Some invertible relabeling `α ↦ αM` of the logical labels makes `row`
/// match `target` up to phase. Returns the images of the unit labels.
fn equal_up_to_relabel(row: &[Cyclo], target: &[Cyclo]) -> Option<Vec<usize>> {
    let size = row.len();
    let k = size.trailing_zeros() as usize;
    fn extend(
        images: &mut Vec<usize>,
        k: usize,
        size: usize,
        row: &[Cyclo],
        target: &[Cyclo],
    ) -> bool {
        if images.len() == k {
            let permuted: Vec<Cyclo> = (0..size)
                .map(|a| {
                    let b = (0..k)
                        .filter(|&j| a >> j & 1 == 1)
                        .fold(0, |acc, j| acc ^ images[j]);
                    row[b].clone()
                })
                .collect();
            return equal_up_to_phase(&permuted, target);
        }
        for img in 1..size {
            let span_hit = (0..1usize << images.len()).any(|s| {
                (0..images.len())
                    .filter(|&j| s >> j & 1 == 1)
                    .fold(0, |acc, j| acc ^ images[j])
                    == img
            });
            if span_hit {
                continue;
            }
            images.push(img);
            if extend(images, k, size, row, target) {
                return true;
            }
            images.pop();
        }
        false
    }
    let mut images = Vec::new();
    extend(&mut images, k, size, row, target).then_some(images)
}

fn row_values(row: &GenCoeffRow) -> Vec<Cyclo> {
    row.values()
}

fn full_row(code: &CssCode, gate: &DiagonalGate) -> Result<GenCoeffRow, String> {
    gencoeff::trivial_row(code, gate, &cfg()).map_err(|e| e.to_string())
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1_steane() -> bool {
    report(
        1,
        "Steane + exp(-iπ/4 Z)^⊗7",
        Duration::from_secs(1),
        || {
            let code = families::steane();
            let gate = transversal_zrot(7, 2).map_err(err)?;
            let a = gencoeff::analyze(&code, &gate, &cfg(), true).map_err(err)?;
            ensure(a.preservation.preserved, || {
                format!("norm {}", a.preservation.norm)
            })?;
            let row = row_values(a.row.as_ref().ok_or("no row")?);
            let target = [
                Cyclo::cos_pi_over_pow2(2).map_err(err)?,
                Cyclo::i_sin_pi_over_pow2(2).map_err(err)?,
            ];
            ensure(equal_up_to_phase(&row, &target), || format!("row {row:?}"))?;
            let logical = a.logical.ok_or("no logical")?;
            let m = match_logical(
                &logical,
                &Template::parse("P†", 1).map_err(err)?,
                MatchOptions::default(),
            )
            .map_err(err)?;
            ensure(m.matched, || "logical is not P†".into())?;
            let level = hierarchy::logical_polynomial(&logical).level();
            ensure(level == 2, || format!("level {level}"))?;
            Ok(format!(
                "row = (cos π/4, i sin π/4), logical {} · P†, level {level}",
                m.phase_string()
            ))
        },
    )
}

fn criterion_2_concatenation_invariance() -> bool {
    report(
        2,
        "concatenation keeps every generator coefficient",
        Duration::from_secs(10),
        || {
            let mut checked = 0usize;
            for code in [families::steane(), families::four22()] {
                let n = code.n();
                let big = synth::concatenate(&code).map_err(err)?;
                for policy in LiftPolicy::ALL {
                    let gate = match policy {
                        LiftPolicy::QfdTensor => {
                            let mut r = vec![vec![0u64; n]; n];
                            for (i, row) in r.iter_mut().enumerate() {
                                row[i] = 1;
                                row[(i + 1) % n] += 1;
                            }
                            for i in 0..n {
                                r[(i + 1) % n][i] = r[i][(i + 1) % n];
                            }
                            DiagonalGate::qfd(n, 2, r).map_err(err)?
                        }
                        _ => transversal_zrot(n, 2).map_err(err)?,
                    };
                    let lifted = gate.lift(policy).map_err(err)?;
                    let zero = BitVec::zeros(n);
                    for mu in code.syndrome_reps(26).map_err(err)? {
                        for gamma in code.z_logical_reps() {
                            let old =
                                coefficient(&code, &gate, &mu, &gamma, &cfg()).map_err(err)?;
                            let new = coefficient(
                                &big,
                                &lifted,
                                &mu.concat(&zero),
                                &gamma.concat(&zero),
                                &cfg(),
                            )
                            .map_err(err)?;
                            ensure(old == new, || format!("{} μ={mu} γ={gamma}", policy.name()))?;
                            checked += 1;
                        }
                    }
                }
            }
            Ok(format!(
                "{checked} entries identical across 3 lift policies"
            ))
        },
    )
}

fn criterion_3_triorthogonal() -> bool {
    report(
        3,
        "Steane → [[14,1,3]] → [[14,2,2]]",
        Duration::from_secs(5),
        || {
            let code = synth::concatenate(&families::steane()).map_err(err)?;
            let gate = transversal_zrot(7, 2)
                .map_err(err)?
                .lift(LiftPolicy::NextLevelRotation)
                .map_err(err)?;
            let r = synth::remove_z_half(&code, &gate, &cfg()).map_err(err)?;
            ensure(r.admissible, || format!("norm {}", r.norm))?;
            let c = &r.code;
            let (_, dz) = c.distances(6, 26).map_err(err)?;
            ensure(
                c.n() == 14 && c.k() == 2 && dz == Distance::Exact(2),
                || c.label(Some(dz)),
            )?;
            let row = row_values(&full_row(c, &gate)?);
            let (cos, isin) = (
                Cyclo::cos_pi_over_pow2(3).map_err(err)?,
                Cyclo::i_sin_pi_over_pow2(3).map_err(err)?,
            );
            let sc = &cos * &isin;
            let target = [&cos * &cos, sc.clone(), &isin * &isin, sc];
            let relabel =
                equal_up_to_relabel(&row, &target).ok_or_else(|| format!("row {row:?}"))?;
            let logical = gencoeff::induced_logical(c, &gate, &cfg()).map_err(err)?;
            let opts = MatchOptions {
                allow_basis_change: true,
                ..MatchOptions::default()
            };
            let m = match_logical(&logical, &Template::parse("(T†)^⊗2", 2).map_err(err)?, opts)
                .map_err(err)?;
            ensure(m.matched, || "logical is not (T†)^⊗2".into())?;
            let level = hierarchy::logical_polynomial(&logical).level();
            ensure(level == 3, || format!("level {level}"))?;
            Ok(format!(
            "row = (cos²π/8, i sin cos, −sin²π/8, i sin cos) with unit labels sent to {relabel:?}, \
             logical (T†)^⊗2 with phase {}, level 3, d_z = 2",
            m.phase_string()
        ))
        },
    )
}

fn criterion_4_table_one() -> bool {
    report(
        4,
        "[[2^l, l, 2]] rows for l = 2..6",
        Duration::from_secs(60),
        || {
            for l in 2..=6usize {
                let (code, gate, expected) = family_2l_l_2(l).map_err(err)?;
                ensure(code.n() == 1 << l && code.k() == l, || code.label(None))?;
                ensure(gate.as_transversal_zrot() == Some(l as u32), || {
                    format!("gate {}", gate.describe())
                })?;
                let a = gencoeff::analyze(&code, &gate, &cfg(), true).map_err(err)?;
                let row = row_values(a.row.as_ref().ok_or("no row")?);
                ensure(equal_up_to_phase(&row, &expected), || {
                    format!("l={l}: row {row:?}")
                })?;
                let logical = a.logical.ok_or_else(|| format!("l={l}: not preserved"))?;
                let level = hierarchy::logical_polynomial(&logical).level();
                ensure(level == l as u32, || format!("l={l}: level {level}"))?;
                let ckz = Template::parse(&format!("C^({})Z", l - 1), l).map_err(err)?;
                let opts = MatchOptions {
                    allow_pauli_x: true,
                    ..MatchOptions::default()
                };
                let m = match_logical(&logical, &ckz, opts).map_err(err)?;
                ensure(m.matched, || {
                    format!("l={l}: logical is not C^({})Z", l - 1)
                })?;
            }
            Ok("rows exact up to phase, logical C^(l-1)Z up to Paulis, level l".into())
        },
    )
}

fn criterion_5_thirty_two_two() -> bool {
    report(
        5,
        "[[30,2,2]] under exp(-iπ/8 Z)^⊗30",
        Duration::from_secs(60),
        || {
            let (code, gate) = triorthogonal_2(3).map_err(err)?;
            ensure(code.n() == 30 && code.k() == 2, || code.label(None))?;
            ensure(gate.as_transversal_zrot() == Some(4), || gate.describe())?;
            let logical = gencoeff::induced_logical(&code, &gate, &cfg()).map_err(err)?;
            let opts = MatchOptions {
                allow_basis_change: true,
                ..MatchOptions::default()
            };
            let t = Template::parse("(Z^{1/8}†)^⊗2", 2).map_err(err)?;
            let m = match_logical(&logical, &t, opts).map_err(err)?;
            ensure(m.matched, || {
                format!(
                    "logical {}",
                    hierarchy::logical_polynomial(&logical).describe()
                )
            })?;
            let level = hierarchy::logical_polynomial(&logical).level();
            ensure(level == 4, || format!("level {level}"))?;
            Ok(format!(
                "logical (√T†)^⊗2 with phase {}, level 4",
                m.phase_string()
            ))
        },
    )
}

fn criterion_6_qrm_pipeline() -> bool {
    report(
        6,
        "[[4,2,2]] → [[64,2,2]] → [[64,21,2]] → [[64,15,4]]",
        Duration::from_secs(600),
        || {
            let pc = PipelineConfig::default();
            let p = families::qrm_pipeline(1, 2, &pc).map_err(err)?;
            ensure(
                (p.concatenations, p.removals, p.additions) == (4, 19, 6),
                || {
                    format!(
                        "counts {} / {} / {}",
                        p.concatenations, p.removals, p.additions
                    )
                },
            )?;
            let labels: Vec<String> = p.run.steps.iter().map(|s| s.after.label.clone()).collect();
            let first = p
                .run
                .steps
                .first()
                .ok_or("empty pipeline")?
                .before
                .label
                .clone();
            let after_concat = labels[3].clone();
            let after_removal = labels[4 + 19].clone();
            let last = labels.last().cloned().unwrap_or_default();
            ensure(
                [first.as_str(), &after_concat, &after_removal, &last]
                    == ["[[4,2,2]]", "[[64,2,2]]", "[[64,21,2]]", "[[64,15,4]]"],
                || format!("labels {first} {after_concat} {after_removal} {last}"),
            )?;
            ensure(p.run.all_admissible(), || {
                "an intermediate step was inadmissible".into()
            })?;

            let code = &p.run.code;
            let gate = &p.run.gate;
            let target = qrm_code(2, 6).map_err(err)?;
            ensure(
                code.c2() == target.c2() && code.c1_perp() == target.c1_perp(),
                || "final code differs from qrm_code(2,6)".into(),
            )?;
            let (_, dz) = code.distances(6, 26).map_err(err)?;
            ensure(dz == Distance::Exact(4), || format!("d_z {dz}"))?;

            // Independent prediction: logical entries from explicit codewords must be
            // ±1 with a phase polynomial of degree ≤ 3 (a product of CCZ, CZ, Z).
            let k = code.k();
            let size = 1usize << k;
            let mut signs = vec![0i64; size];
            let mut exps = vec![0u64; size];
            for (b, s) in signs.iter_mut().enumerate() {
                let v = oracle::exact_logical_entry(code, gate, b as u64).map_err(err)?;
                if v.is_one() {
                    *s = 1;
                } else if v == -&Cyclo::one() {
                    *s = -1;
                    exps[b] = 1;
                } else {
                    return Err(format!("logical entry {b} is {v}, not ±1"));
                }
            }
            let degree = hierarchy::phase_polynomial(&exps, 1).map_err(err)?.degree();
            ensure(degree <= 3, || {
                format!("logical phase polynomial has degree {degree}")
            })?;
            let mut h = 1;
            while h < size {
                for i in (0..size).step_by(2 * h) {
                    for j in i..i + h {
                        let (a, b) = (signs[j], signs[j + h]);
                        signs[j] = a + b;
                        signs[j + h] = a - b;
                    }
                }
                h *= 2;
            }
            let predicted = |alpha: usize| Cyclo::dyadic(signs[alpha], k as u32);

            let mut rng = common::rng(SAMPLE_SEED);
            let zero = BitVec::zeros(code.n());
            let mut alphas: Vec<usize> = (0..k).map(|j| 1 << j).collect();
            alphas.extend((0..SAMPLED_GAMMAS).map(|_| rng.gen_range(0..size)));
            for &alpha in &alphas {
                let gamma = code.z_logical_rep(alpha as u64);
                let a = coefficient(code, gate, &zero, &gamma, &cfg()).map_err(err)?;
                ensure(a == predicted(alpha), || {
                    format!("A_(0,{gamma}) = {a}, predicted {}", predicted(alpha))
                })?;
            }
            let reps = code.frame().syndrome_basis.nrows();
            for _ in 0..SAMPLED_OFF_SYNDROME {
                let mu = loop {
                    let m = code.syndrome_rep(&common::random_vec(&mut rng, code.n()));
                    if !m.is_zero() {
                        break m;
                    }
                };
                let gamma = code.z_logical_rep(rng.gen_range(0..size) as u64);
                let a = coefficient(code, gate, &mu, &gamma, &cfg()).map_err(err)?;
                ensure(a.is_zero(), || format!("A_({mu},{gamma}) = {a}"))?;
            }
            let full = gencoeff::is_preserved(code, gate, &cfg()).map_err(err)?;
            ensure(full.preserved, || format!("exact norm {}", full.norm))?;

            for (name, c, g) in [
                (
                    "[[16,6,4]]",
                    qrm_code(2, 4).map_err(err)?,
                    transversal_zrot(16, 2).map_err(err)?,
                ),
                (
                    "[[32,5,2]]",
                    family_2l_l_2(5).map_err(err)?.0,
                    transversal_zrot(32, 5).map_err(err)?,
                ),
            ] {
                let a = gencoeff::analyze(&c, &g, &cfg(), true).map_err(err)?;
                ensure(a.preservation.preserved && a.row.is_some(), || {
                    format!("{name} not verified")
                })?;
            }
            Ok(format!(
            "counts 4/19/6, d_z = 4, sampled certificate on {} logicals and {SAMPLED_OFF_SYNDROME} syndromes \
             ({reps}-bit syndrome space), exact norm 1, CCZ-product degree {degree}; [[16,6,4]] and [[32,5,2]] fully exact",
            alphas.len()
        ))
        },
    )
}

fn criterion_7_oracle() -> bool {
    report(
        7,
        "oracle agrees on every code with n <= 16",
        Duration::from_secs(120),
        || {
            let steane = families::steane();
            let four = families::four22();
            let c14 = synth::concatenate(&steane).map_err(err)?;
            let c8 = synth::concatenate(&four).map_err(err)?;
            let mut corpus: Vec<(String, CssCode, DiagonalGate)> = vec![
                (
                    "[[7,1,3]]".into(),
                    steane.clone(),
                    transversal_zrot(7, 2).map_err(err)?,
                ),
                (
                    "[[4,2,2]]".into(),
                    four.clone(),
                    transversal_zrot(4, 2).map_err(err)?,
                ),
                (
                    "[[4,2,2]] + T".into(),
                    four.clone(),
                    transversal_zrot(4, 3).map_err(err)?,
                ),
                (
                    "[[14,1,3]]".into(),
                    c14.clone(),
                    transversal_zrot(14, 3).map_err(err)?,
                ),
                (
                    "[[8,2,2]]".into(),
                    c8.clone(),
                    transversal_zrot(8, 3).map_err(err)?,
                ),
                (
                    "[[16,6,4]]".into(),
                    qrm_code(2, 4).map_err(err)?,
                    transversal_zrot(16, 2).map_err(err)?,
                ),
                (
                    "[[15,1,3]]".into(),
                    families::punctured_qrm(3).map_err(err)?,
                    transversal_zrot(15, 3).map_err(err)?,
                ),
            ];
            let (t14, g14) = triorthogonal_2(2).map_err(err)?;
            corpus.push(("[[14,2,2]]".into(), t14, g14));
            for l in 3..=4 {
                let (c, g, _) = family_2l_l_2(l).map_err(err)?;
                corpus.push((c.label(None), c, g));
            }
            let mut worst = 0f64;
            for (name, code, gate) in &corpus {
                let r = oracle::crosscheck(code, gate, &cfg(), ORACLE_TOL).map_err(err)?;
                ensure(r.passed, || format!("{name}: {r:?}"))?;
                worst = worst.max(r.diagonal_deviation);
            }
            Ok(format!(
                "{} pairs, max deviation {worst:.1e} < {ORACLE_TOL:e}",
                corpus.len()
            ))
        },
    )
}

fn criterion_8_properties() -> bool {
    report(8, "property suites", Duration::from_secs(600), || {
        let run =
            |name: &str, f: &dyn Fn(u64) -> Result<(), proptest::test_runner::TestCaseError>| {
                let mut runner = TestRunner::new(Config {
                    cases: PROPERTY_CASES,
                    failure_persistence: None,
                    ..Config::default()
                });
                runner
                    .run(&proptest::num::u64::ANY, f)
                    .map_err(|e| format!("{name}: {e}"))
            };
        run("split identity", &|s| {
            common::split_identity(s, 3 + (s % 6) as usize)
        })?;
        run("side agreement", &|s| {
            common::side_agreement(s, 2 + (s % 7) as usize)
        })?;
        run("level formula", &common::level_recursion)?;
        run("Pauli round trip", &|s| {
            common::pauli_round_trip(s, 1 + (s % 6) as usize)
        })?;
        let c14 = synth::concatenate(&families::steane()).map_err(err)?;
        let s = synth::dfs_switch(&c14).map_err(err)?;
        let expected = BitVec::ones(7).concat(&BitVec::zeros(7));
        ensure(s.x_positions == expected, || {
            format!("x_positions {}", s.x_positions)
        })?;
        Ok(format!(
            "4 suites × {PROPERTY_CASES} cases, DFS x_positions = [1,0]⊗1₇"
        ))
    })
}

fn criterion_9_negative_controls() -> bool {
    report(9, "negative controls", Duration::from_secs(5), || {
        let p = gencoeff::is_preserved(
            &families::four22(),
            &transversal_zrot(4, 3).map_err(err)?,
            &cfg(),
        )
        .map_err(err)?;
        ensure(!p.preserved && p.norm == Cyclo::dyadic(3, 2), || {
            format!("norm {}", p.norm)
        })?;
        let (t14, g14) = triorthogonal_2(2).map_err(err)?;
        let x0 = synth::half_ones_w0(14);
        let a = synth::add_x(&t14, &g14, &x0, &cfg()).map_err(err)?;
        ensure(!a.admissible, || "addition reported admissible".into())?;
        let isc = Cyclo::dyadic(1, 3);
        let w = a
            .witness
            .iter()
            .find(|(_, v)| v.abs_sq() == isc)
            .ok_or_else(|| format!("no |i sin cos| witness in {:?}", a.witness))?;
        Ok(format!(
            "[[4,2,2]]+T norm 3/4; [[14,2,2]] add_x witness A_(0,{}) = {}",
            w.0, w.1
        ))
    })
}

fn main() {
    let criteria: [fn() -> bool; 9] = [
        criterion_1_steane,
        criterion_2_concatenation_invariance,
        criterion_3_triorthogonal,
        criterion_4_table_one,
        criterion_5_thirty_two_two,
        criterion_6_qrm_pipeline,
        criterion_7_oracle,
        criterion_8_properties,
        criterion_9_negative_controls,
    ];
    let failed = criteria.iter().filter(|c| !c()).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
