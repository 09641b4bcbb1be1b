//! Named bundles of checks reproducing the headline computations. Each
//! suite returns one line per check.

use std::ops::ControlFlow;

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::bottsamelson::build_model;
use crate::charcalc::{bwb_cohomology, demazure_op, euler_char_bs, euler_char_x, index_of_contraction, serre_check, GroupAlgebraElement};
use crate::descent::scan::{f4_scan, ScanConfig, ScanMode};
use crate::descent::{d_power, u_power, CertifyOutcome, Engine, EngineConfig, H1Answer};
use crate::dynkin::{builtin, CartanData, TypeLabel};
use crate::lattice::{dominant_representative, named_class, reflect, DivisorClass, NamedClass};
use crate::weyl::{generate_roots, weyl_order, RootSystem};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

pub const SUITES: &[&str] = &[
    "word-counts",
    "dimensions",
    "f4-index",
    "bwb",
    "euler",
    "demazure",
    "cone-duality",
    "ade-uniqueness",
    "bc-uniqueness",
    "f4-sample",
    "roots",
];

/// Runs a suite by name; `all` runs every suite. `None` for unknown names.
pub fn run_suite(name: &str) -> Option<Vec<Check>> {
    Some(match name {
        "word-counts" => word_counts(),
        "dimensions" => dimensions(),
        "f4-index" => f4_index(),
        "bwb" => bwb(),
        "euler" => euler(),
        "demazure" => demazure(),
        "cone-duality" => cone_duality(),
        "ade-uniqueness" => ade_uniqueness(),
        "bc-uniqueness" => bc_uniqueness(),
        "f4-sample" => f4_sample(10_000),
        "roots" => roots(),
        "all" => SUITES.iter().flat_map(|s| run_suite(s).expect("listed suite exists")).collect(),
        _ => return None,
    })
}

fn c(label: TypeLabel, rank: usize) -> CartanData {
    builtin(label, rank).expect("builtin type")
}

fn rs(label: TypeLabel, rank: usize) -> RootSystem {
    generate_roots(&c(label, rank)).expect("finite type")
}

/// Builtin types of rank at most 4.
pub fn small_types() -> Vec<(TypeLabel, usize)> {
    let mut v = Vec::new();
    for rank in 1..=4 {
        for label in [TypeLabel::A, TypeLabel::B, TypeLabel::C, TypeLabel::D, TypeLabel::F, TypeLabel::G] {
            if label.supports(rank) {
                v.push((label, rank));
            }
        }
    }
    v
}

fn word_counts() -> Vec<Check> {
    let mut out = Vec::new();
    for (label, rank, expected, stream) in [
        (TypeLabel::A, 2, 2u64, true),
        (TypeLabel::B, 2, 2, true),
        (TypeLabel::A, 3, 16, true),
        (TypeLabel::F, 4, 2_144_892, true),
    ] {
        let s = rs(label, rank);
        let w0 = s.longest_element();
        let dp = s.count_reduced_words(&w0);
        let mut streamed = 0u64;
        if stream {
            let _ = s.enumerate_reduced_words(&w0, |_| {
                streamed += 1;
                ControlFlow::Continue(())
            });
        }
        let pass = matches!(&dp, Ok(n) if *n == BigUint::from(expected)) && streamed == expected;
        out.push(Check::new(
            format!("reduced words of w0 in {label}{rank}"),
            pass,
            format!("dp {:?}, streamed {streamed}, expected {expected}", dp.map(|n| n.to_string())),
        ));
    }
    out
}

fn dimensions() -> Vec<Check> {
    small_types()
        .into_iter()
        .map(|(label, rank)| {
            let cd = c(label, rank);
            let s = generate_roots(&cd).expect("finite type");
            let kx = named_class(&cd, NamedClass::CanonicalX).expect("canonical class");
            let lam = dominant_representative(&cd, &kx).ok().and_then(|r| r.length());
            let pass = lam == Some(s.num_positive()) && (label != TypeLabel::F || lam == Some(24));
            Check::new(
                format!("length of K_X in {label}{rank}"),
                pass,
                format!("{lam:?} vs {} positive roots", s.num_positive()),
            )
        })
        .collect()
}

fn f4_index() -> Vec<Check> {
    let s = rs(TypeLabel::F, 4);
    let idx = index_of_contraction(&s, 0, 15);
    let mut quiet = true;
    for k in 1..8i64 {
        let p = bwb_cohomology(&s, &DivisorClass::new(vec![-k, 0, 0, 0])).expect("profile");
        quiet &= p.get(15) == BigUint::from(0u32);
    }
    vec![
        Check::new("F4 index of -Lambda_1 in degree 15", matches!(idx, Ok(8)), format!("{idx:?}")),
        Check::new("F4 h^15(-k Lambda_1) = 0 for k < 8", quiet, ""),
    ]
}

fn bwb() -> Vec<Check> {
    let a1 = rs(TypeLabel::A, 1);
    let mut curve = true;
    for d in -10i64..=10 {
        let p = bwb_cohomology(&a1, &DivisorClass::new(vec![d])).expect("profile");
        let (h0, h1) = if d >= 0 { (d as u64 + 1, 0) } else if d <= -2 { (0, (-d - 1) as u64) } else { (0, 0) };
        curve &= p.get(0) == BigUint::from(h0) && p.get(1) == BigUint::from(h1);
    }
    let mut out = vec![Check::new("A1 profiles match the projective line", curve, "")];
    let mut rng = StdRng::seed_from_u64(0x5e77e);
    for (label, rank) in [(TypeLabel::A, 2), (TypeLabel::B, 2)] {
        let s = rs(label, rank);
        let ok = (0..200).all(|_| {
            let l = DivisorClass::new((0..rank).map(|_| rng.gen_range(-8..=8)).collect());
            serre_check(&s, &l)
        });
        out.push(Check::new(format!("Serre duality in {label}{rank}"), ok, "200 random classes"));
    }
    out
}

fn euler() -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = StdRng::seed_from_u64(0xe7e7);
    for (label, rank) in [(TypeLabel::A, 1), (TypeLabel::A, 2), (TypeLabel::A, 3), (TypeLabel::B, 2), (TypeLabel::B, 3)] {
        let cd = c(label, rank);
        let s = generate_roots(&cd).expect("finite type");
        let w = s.longest_element().witness_word().to_vec();
        let ok = (0..100).all(|_| {
            let l = DivisorClass::new((0..rank).map(|_| rng.gen_range(-6..=6)).collect());
            matches!((euler_char_bs(&cd, &w, &l), euler_char_x(&s, &l)), (Ok(a), Ok(b)) if b == a.into())
        });
        out.push(Check::new(format!("tower and flag Euler characteristics agree in {label}{rank}"), ok, "100 random classes"));
    }
    for (label, rank) in [(TypeLabel::A, 2), (TypeLabel::B, 2)] {
        let cd = c(label, rank);
        let s = generate_roots(&cd).expect("finite type");
        let mut words = Vec::new();
        let _ = s.enumerate_reduced_words(&s.longest_element(), |w| {
            words.push(w.to_vec());
            ControlFlow::Continue(())
        });
        let ok = (0..50).all(|_| {
            let l = DivisorClass::new((0..rank).map(|_| rng.gen_range(-6..=6)).collect());
            let x = euler_char_x(&s, &l).expect("integral");
            words.iter().all(|w| matches!(euler_char_bs(&cd, w, &l), Ok(a) if x == a.into()))
        });
        out.push(Check::new(format!("word invariance of the Euler characteristic in {label}{rank}"), ok, ""));
    }
    out
}

fn demazure() -> Vec<Check> {
    let mut rng = StdRng::seed_from_u64(0xde3a);
    let types = [(TypeLabel::A, 2), (TypeLabel::B, 2), (TypeLabel::G, 2)];
    let mut ok = true;
    for n in 0..500 {
        let (label, rank) = types[n % 3];
        let cd = c(label, rank);
        let i = rng.gen_range(0..rank);
        let l = DivisorClass::new((0..rank).map(|_| rng.gen_range(-7..=7)).collect());
        let e = GroupAlgebraElement::monomial(l.clone());
        let once = demazure_op(&cd, i, &e).expect("bounded");
        let twice = demazure_op(&cd, i, &once).expect("bounded");
        let mirror = reflect(&cd, i, &l).expect("valid").add_k(&cd, i, 1);
        let other = demazure_op(&cd, i, &GroupAlgebraElement::monomial(mirror)).expect("bounded");
        ok &= once == twice && once.add(&other).map(|s| s.is_zero()).unwrap_or(false);
    }
    vec![Check::new("Demazure idempotence and sign rule", ok, "500 random terms over A2, B2, G2")]
}

fn cone_duality() -> Vec<Check> {
    let mut rng = StdRng::seed_from_u64(0xc0ae);
    [(TypeLabel::A, 3), (TypeLabel::B, 3), (TypeLabel::F, 4)]
        .into_iter()
        .map(|(label, rank)| {
            let cd = c(label, rank);
            let ok = (0..50).all(|_| {
                let len = rng.gen_range(1..=12);
                let w: Vec<usize> = (0..len).map(|_| rng.gen_range(0..rank)).collect();
                let Ok(m) = build_model(&cd, &w) else { return false };
                let nb = m.n_beta_matrix();
                let ng = m.n_gamma_matrix();
                (0..len).all(|t| {
                    (0..len).all(|i| {
                        let unip = if i == t { nb[t][i] == 1 } else if i > t { nb[t][i] == 0 } else { true };
                        unip && ng[t][i] == i64::from(i == t)
                    })
                })
            });
            Check::new(format!("tower cone duality in {label}{rank}"), ok, "50 random words")
        })
        .collect()
}

fn ade_uniqueness() -> Vec<Check> {
    [(TypeLabel::A, 2), (TypeLabel::A, 3)]
        .into_iter()
        .map(|(label, rank)| {
            let cd = c(label, rank);
            let s = generate_roots(&cd).expect("finite type");
            let e = Engine::new(&cd, EngineConfig::default()).expect("engine");
            let mut total = 0;
            let mut certified = 0;
            let _ = s.enumerate_reduced_words(&s.longest_element(), |w| {
                total += 1;
                if matches!(e.certify_word(w), Ok(r) if r.outcome == CertifyOutcome::Certified) {
                    certified += 1;
                }
                ControlFlow::Continue(())
            });
            Check::new(
                format!("every reduced word of w0 certifies in {label}{rank}"),
                total > 0 && certified == total,
                format!("{certified}/{total}"),
            )
        })
        .collect()
}

fn bc_uniqueness() -> Vec<Check> {
    [
        (TypeLabel::B, 2, u_power(2, 2)),
        (TypeLabel::B, 3, u_power(3, 3)),
        (TypeLabel::C, 3, d_power(3, 3)),
    ]
    .into_iter()
    .map(|(label, rank, word)| {
        let cd = c(label, rank);
        let e = Engine::new(&cd, EngineConfig::default()).expect("engine");
        let rep = e.certify_word(&word);
        let pass = matches!(&rep, Ok(r) if r.outcome == CertifyOutcome::Certified
            && r.steps.iter().all(|s| matches!(s.answer, H1Answer::Exact0 | H1Answer::Exact1)));
        Check::new(
            format!("{label}{rank} word {} certifies", crate::io::format_word(&word)),
            pass,
            format!("{:?}", rep.map(|r| r.outcome)),
        )
    })
    .collect()
}

pub fn f4_sample(k: u64) -> Vec<Check> {
    let rep = f4_scan(&ScanConfig::new(ScanMode::Sample(k)));
    let pass = matches!(&rep, Ok(r) if r.complete && r.tally.processed == k && r.tally.certified == 0);
    let detail = match rep {
        Ok(r) => format!(
            "processed {}, certified {}, failed {}, budget exceeded {}",
            r.tally.processed, r.tally.certified, r.tally.failed, r.tally.budget_exceeded
        ),
        Err(e) => e.to_string(),
    };
    vec![Check::new(format!("F4 sample of {k} words certifies none"), pass, detail)]
}

fn roots() -> Vec<Check> {
    let expected_orders = [
        ((TypeLabel::A, 2), 6u64),
        ((TypeLabel::B, 2), 8),
        ((TypeLabel::G, 2), 12),
        ((TypeLabel::A, 3), 24),
        ((TypeLabel::B, 3), 48),
        ((TypeLabel::F, 4), 1152),
    ];
    small_types()
        .into_iter()
        .map(|(label, rank)| {
            let cd = c(label, rank);
            let s = generate_roots(&cd).expect("finite type");
            let mut problems = Vec::new();
            let set: std::collections::HashSet<&[i64]> = s.roots().iter().map(|r| r.coeffs.as_slice()).collect();
            for r in s.roots() {
                if !(r.coeffs.iter().all(|&x| x >= 0) || r.coeffs.iter().all(|&x| x <= 0)) {
                    problems.push("mixed signs");
                }
                if !set.contains(r.negated().coeffs.as_slice()) {
                    problems.push("not closed under negation");
                }
                for i in 0..rank {
                    let d = DivisorClass::new(r.degrees.clone());
                    let refl = reflect(&cd, i, &d).expect("valid");
                    if s.root_index_by_degrees(&refl.degrees).is_none() {
                        problems.push("not closed under reflections");
                    }
                }
            }
            if s.roots().len() != 2 * s.num_positive() {
                problems.push("positive and negative halves differ");
            }
            let w0 = s.longest_element();
            for r in s.positive_roots() {
                if s.act_on_root(&w0, r).is_positive() {
                    problems.push("w0 keeps a positive root positive");
                }
                if s.coroot_pairing(&r.coeffs, &r.degrees) != Ok(2) {
                    problems.push("root does not pair to 2 with its coroot");
                }
            }
            if !matches!(s.is_reduced(w0.witness_word()), Ok(true)) {
                problems.push("witness word of w0 not reduced");
            }
            let order = weyl_order(&cd);
            if let Some((_, o)) = expected_orders.iter().find(|(t, _)| *t == (label, rank)) {
                if order != Ok(*o) {
                    problems.push("group order");
                }
            }
            problems.dedup();
            Check::new(format!("root system properties of {label}{rank}"), problems.is_empty(), problems.join("; "))
        })
        .collect()
}
