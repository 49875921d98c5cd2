mod common;

use chomp_core::closed_forms::{
    binom_mod, johnson_nim, kneser_chomp_clique, kneser_nim, multipartite_nim, threshold_outcome,
};
use chomp_core::families::{
    johnson_graph, kneser_graph, multipartite_graph, threshold_graph, JohnsonParams, KneserParams, MultipartiteSpec,
    ThresholdSpec,
};
use chomp_core::{solve_auto, EngineConfig, Graph, Outcome};
use num_bigint::BigUint;

fn engine(g: &Graph) -> u32 {
    solve_auto(&common::state(g.as_complex()), &EngineConfig::default()).unwrap().value.0
}

fn big_binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::from(0u32);
    }
    let mut acc = BigUint::from(1u32);
    for i in 0..b {
        acc = acc * BigUint::from(a - i) / BigUint::from(i + 1);
    }
    acc
}

fn partitions(total: u32, max: u32) -> Vec<Vec<u32>> {
    if total == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=max.min(total)).rev() {
        for mut rest in partitions(total - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[test]
fn lucas_matches_big_integers() {
    for a in 0..=60u64 {
        for b in 0..=a {
            let c = big_binomial(a, b);
            for p in [2u64, 3] {
                let expected = (&c % BigUint::from(p)).to_u64_digits().first().copied().unwrap_or(0);
                assert_eq!(binom_mod(a, b, p).unwrap(), expected, "C({a},{b}) mod {p}");
            }
        }
    }
    assert!(binom_mod(5, 2, 5).is_err());
}

#[test]
fn kneser_formula_matches_engine() {
    for n in 0..=5i64 {
        for k in 0..=n {
            for l in -1..k {
                let p = KneserParams::new(n, k, l);
                let r = kneser_nim(&p);
                let nim = r.nim.expect("kneser values are always known").0;
                assert_eq!(nim, engine(&kneser_graph(&p).unwrap()), "KG({n},{k},{l}): {}", r.provenance);
            }
        }
    }
}

#[test]
fn kneser_formula_is_total() {
    for n in -2..=12i64 {
        for k in -2..=12i64 {
            for l in -2..=13i64 {
                let r = kneser_nim(&KneserParams::new(n, k, l));
                assert!(r.nim.is_some(), "({n},{k},{l})");
                assert!(r.nim.unwrap().0 <= 2);
            }
        }
    }
}

#[test]
fn clique_outcome_follows_the_parity_factor() {
    for n in 0..=8i64 {
        for k in 1..=n {
            for l in 0..k {
                let q = 1u64 << (64 - ((k - l) as u64 - 1).leading_zeros()).min(63);
                let q = if k - l == 1 { 1 } else { q };
                let parity = &big_binomial((n as u64) % q, (k as u64) % q) % BigUint::from(2u32) == BigUint::from(1u32);
                let o = kneser_chomp_clique(&KneserParams::new(n, k, l)).unwrap();
                if parity {
                    assert_eq!(o, Outcome::A, "({n},{k},{l})");
                }
                let nim = kneser_nim(&KneserParams::new(n, k, l)).nim.unwrap().0;
                if nim != 0 {
                    assert!(parity, "nonzero Nim needs parity 1 at ({n},{k},{l})");
                }
            }
        }
    }
}

#[test]
fn complete_graphs() {
    for n in 0..=6u32 {
        let g = chomp_core::families::complete_graph(n).unwrap();
        assert_eq!(engine(&g), n % 3, "K_{n}");
    }
}

#[test]
fn multipartite_formula_matches_engine() {
    for total in 1..=7 {
        for parts in partitions(total, total) {
            let spec = MultipartiteSpec::new(parts.clone()).unwrap();
            let nim = multipartite_nim(&spec).nim.unwrap().0;
            assert_eq!(nim, engine(&multipartite_graph(&spec).unwrap()), "{parts:?}");
        }
    }
}

#[test]
fn johnson_formula_matches_engine_where_known() {
    let mut cases: Vec<(u32, u32)> = (0..=4).flat_map(|n| (0..=n).map(move |k| (n, k))).collect();
    cases.push((6, 3));
    for (n, k) in cases {
        let p = JohnsonParams::new(n, k).unwrap();
        let r = johnson_nim(&p);
        let covered = k == 0 || k == n || (n % 2 == 0 && k % 2 == 0) || n == 2 * k;
        assert_eq!(r.nim.is_some(), covered, "J({n},{k})");
        let Some(v) = r.nim else { continue };
        let g = johnson_graph(&p).unwrap();
        if (n, k) == (6, 3) {
            // 20 vertices and 60 edges: exhaustive search does not fit a test budget.
            let cfg = EngineConfig::default().with_budget(20_000);
            match solve_auto(&common::state(g.as_complex()), &cfg) {
                Ok(s) => assert_eq!(s.value, v),
                Err(e) => assert!(e.is_resource_exceeded(), "{e}"),
            }
            continue;
        }
        assert_eq!(v.0, engine(&g), "J({n},{k})");
    }
}

#[test]
fn johnson_unknown_exactly_off_the_involution_cases() {
    for n in 0..=20u32 {
        for k in 0..=n {
            let r = johnson_nim(&JohnsonParams::new(n, k).unwrap());
            let covered = k == 0 || k == n || (n % 2 == 0 && k % 2 == 0) || n == 2 * k;
            assert_eq!(r.is_unknown(), !covered, "J({n},{k})");
        }
    }
}

#[test]
fn threshold_known_cells_match_engine() {
    let mut unknown = Vec::new();
    for n in 0..=5u32 {
        for i in 0..=n {
            let mut lists = vec![vec![i]];
            lists.extend((0..=n).map(|j| vec![i, j]));
            for att in lists {
                let spec = ThresholdSpec::new(n, att.clone()).unwrap();
                let v = engine(&threshold_graph(&spec).unwrap());
                let r = threshold_outcome(&spec).unwrap();
                match r.outcome {
                    Outcome::Unknown => unknown.push((n, att, v)),
                    o => assert_eq!(o, chomp_core::Grundy(v).outcome(), "K_{n}^{att:?}: {}", r.provenance),
                }
            }
        }
    }
    // Single attachments and the {0, i} family are fully classified.
    assert!(unknown.iter().all(|(_, att, _)| att.len() == 2 && att.iter().min() != Some(&0)));
}
