//! Closed-form Nim-values and outcomes for the supported families.
//!
//! Every function answers `Known` only where a proof is available and `Unknown`
//! where the question is open. `Unknown` here never means the engine gave up.

use serde::Serialize;

use crate::complex::DEFAULT_FACE_CAP;
use crate::engine::{Engine, EngineConfig, Grundy, Outcome};
use crate::error::{Error, Result};
use crate::families::{
    binomial, clique_skeleton, complete_graph, FamilySpec, JohnsonParams, KneserParams, MultipartiteSpec, ThresholdSpec,
};
use crate::state::GameState;

pub const OPEN: &str = "open problem";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosedFormResult {
    pub nim: Option<Grundy>,
    pub outcome: Outcome,
    pub provenance: String,
}

impl ClosedFormResult {
    pub fn known(nim: u64, provenance: impl Into<String>) -> Self {
        let nim = Grundy(nim as u32);
        ClosedFormResult { nim: Some(nim), outcome: nim.outcome(), provenance: provenance.into() }
    }

    /// A proven winner without a proven Nim-value.
    pub fn outcome_only(outcome: Outcome, provenance: impl Into<String>) -> Self {
        ClosedFormResult { nim: None, outcome, provenance: provenance.into() }
    }

    pub fn unknown() -> Self {
        ClosedFormResult { nim: None, outcome: Outcome::Unknown, provenance: OPEN.into() }
    }

    pub fn is_unknown(&self) -> bool {
        self.outcome == Outcome::Unknown
    }
}

const BINOM3: [[u64; 3]; 3] = [[1, 0, 0], [1, 1, 0], [1, 2, 1]];

/// `C(a, b) mod p` for `p ∈ {2, 3}`, digit by digit in base `p`.
pub fn binom_mod(a: u64, b: u64, p: u64) -> Result<u64> {
    match p {
        2 => Ok((b & !a == 0) as u64),
        3 => {
            let (mut a, mut b, mut acc) = (a, b, 1);
            while b > 0 {
                let (da, db) = ((a % 3) as usize, (b % 3) as usize);
                acc = acc * BINOM3[da][db] % 3;
                if acc == 0 {
                    return Ok(0);
                }
                a /= 3;
                b /= 3;
            }
            Ok(acc)
        }
        _ => Err(Error::UnsupportedPrime(p)),
    }
}

fn b2(a: i64, b: i64) -> u64 {
    if a < 0 || b < 0 {
        return 0;
    }
    binom_mod(a as u64, b as u64, 2).unwrap()
}

fn b3(a: i64, b: i64) -> u64 {
    if a < 0 || b < 0 {
        return 0;
    }
    binom_mod(a as u64, b as u64, 3).unwrap()
}

/// Kneser parameters with `l ≥ k` folded to `l = k − 1` (same graph).
fn clamp_l(p: &KneserParams) -> KneserParams {
    KneserParams { l: p.l.min(p.k - 1), ..*p }
}

/// Binomial parity factor `C(n mod 2^m, k mod 2^m) mod 2` and `t = C(⌊n/2^m⌋, ⌊k/2^m⌋)`.
fn kneser_factors(p: &KneserParams) -> (u64, u64) {
    let m = p.m().expect("l < k");
    let q = 1i64 << m;
    let parity = b2(p.n.rem_euclid(q), p.k.rem_euclid(q));
    let t = binomial(p.n.div_euclid(q) as u64, p.k.div_euclid(q) as u64);
    (parity, t)
}

/// Nim-value of KG(n,k,l); known for every integer triple.
pub fn kneser_nim(p: &KneserParams) -> ClosedFormResult {
    if p.is_empty_graph() {
        return ClosedFormResult::known(0, "empty graph");
    }
    if p.is_edgeless() {
        return ClosedFormResult::known(b2(p.n, p.k), "edgeless graph: vertex-count parity");
    }
    let p = clamp_l(p);
    if p.is_complete() {
        return ClosedFormResult::known(b3(p.n, p.k), "complete graph: vertex count mod 3");
    }
    let m = p.m().unwrap();
    let q = 1i64 << m;
    let value = b2(p.n % q, p.k % q) * b3(p.n / q, p.k / q);
    ClosedFormResult::known(value, "kneser product formula")
}

/// Winner of chomp on the full clique complex of KG(n,k,l), for `0 ≤ l < k ≤ n`.
pub fn kneser_chomp_clique(p: &KneserParams) -> Result<Outcome> {
    if !(0 <= p.l && p.l < p.k && p.k <= p.n) {
        return Err(Error::InvalidParams(format!("need 0 <= l < k <= n, got ({}, {}, {})", p.n, p.k, p.l)));
    }
    Ok(if kneser_factors(p).0 == 1 { Outcome::A } else { Outcome::B })
}

/// Nim-value of the skeleton `C_s(K_t)`.
///
/// Exact for `s ≤ 2`; C_3(K_7) is a known first-player loss; other small instances
/// are solved with the engine under `config`; for `s ≥ t` the first player wins by
/// strategy stealing even when the value itself is out of reach.
pub fn complete_skeleton_nim(t: u64, s: u32, config: &EngineConfig) -> ClosedFormResult {
    if s <= 2 {
        return ClosedFormResult::known(t % (s as u64 + 1), "skeleton of a complete graph: t mod (s+1)");
    }
    if t <= 2 {
        // s ≥ 3 > t: the skeleton is the whole clique complex, a simplex with at most two vertices.
        return ClosedFormResult::known([0, 1, 2][t as usize], "small simplex");
    }
    if (s, t) == (3, 7) {
        return ClosedFormResult::known(0, "C_3(K_7) is a first-player loss");
    }
    let faces: u64 = (1..=s.min(t as u32) as u64).map(|i| binomial(t, i)).fold(0u64, u64::saturating_add);
    if faces <= DEFAULT_FACE_CAP as u64 {
        let complex = complete_graph(t as u32).and_then(|g| clique_skeleton(&g, s));
        if let Ok(state) = complex.and_then(|c| GameState::new(&c)) {
            match Engine::for_state(&state, config.clone()).grundy(&state) {
                Ok(v) => return ClosedFormResult::known(v.0 as u64, "engine on the reduced skeleton C_s(K_t)"),
                Err(e) if e.is_resource_exceeded() => {}
                Err(e) => unreachable!("engine failed on a valid complex: {e}"),
            }
        }
    }
    if s as u64 >= t {
        return ClosedFormResult::outcome_only(Outcome::A, "full clique complex: strategy stealing");
    }
    ClosedFormResult::unknown()
}

/// Nim-value of `C_s(KG(n,k,l))`: the parity factor times `Nim(C_s(K_t))`.
pub fn kneser_skeleton_nim(p: &KneserParams, s: u32, config: &EngineConfig) -> ClosedFormResult {
    if p.is_empty_graph() || s == 0 {
        return ClosedFormResult::known(0, "empty complex");
    }
    if p.is_edgeless() || s == 1 {
        return ClosedFormResult::known(b2(p.n, p.k), "isolated vertices: vertex-count parity");
    }
    let p = clamp_l(p);
    let (parity, t) = kneser_factors(&p);
    if parity == 0 {
        return ClosedFormResult::known(0, "kneser skeleton: parity factor is zero");
    }
    let mut r = complete_skeleton_nim(t, s, config);
    r.provenance = format!("kneser skeleton reduction to C_{s}(K_{t}); {}", r.provenance);
    r
}

/// Nim-value of a complete multipartite graph: odd-part count mod 3.
pub fn multipartite_nim(spec: &MultipartiteSpec) -> ClosedFormResult {
    ClosedFormResult::known(spec.odd_parts() % 3, "multipartite: odd-part count mod 3")
}

/// `t` such that `Nim(C_s(K_{n_1..n_r})) = Nim(C_s(K_t))`: the number of odd parts.
pub fn multipartite_skeleton_reduction(spec: &MultipartiteSpec, _s: u32) -> u64 {
    spec.odd_parts()
}

pub fn multipartite_skeleton_nim(spec: &MultipartiteSpec, s: u32, config: &EngineConfig) -> ClosedFormResult {
    let t = multipartite_skeleton_reduction(spec, s);
    let mut r = complete_skeleton_nim(t, s, config);
    r.provenance = format!("multipartite skeleton reduction to C_{s}(K_{t}); {}", r.provenance);
    r
}

/// Nim-value of J(n,k) where an involution argument applies; `Unknown` elsewhere.
pub fn johnson_nim(p: &JohnsonParams) -> ClosedFormResult {
    let (n, k) = (p.n as u64, p.k as u64);
    if k == 0 || k == n {
        return ClosedFormResult::known(1, "single vertex");
    }
    if n % 2 == 0 && k % 2 == 0 {
        return ClosedFormResult::known(binom_mod(n, k, 2).unwrap(), "johnson pairing involution: C(n,k) mod 2");
    }
    if (n, k) == (2, 1) {
        return ClosedFormResult::known(2, "J(2,1) is K_2");
    }
    if n == 2 * k {
        return ClosedFormResult::known(0, "johnson complementation involution");
    }
    ClosedFormResult::unknown()
}

/// Nim-value of `C_s(J(n,k))`.
pub fn johnson_skeleton_nim(p: &JohnsonParams, s: u32) -> ClosedFormResult {
    let (n, k) = (p.n as u64, p.k as u64);
    if s == 0 {
        return ClosedFormResult::known(0, "empty complex");
    }
    if s == 1 {
        return ClosedFormResult::known(binom_mod(n, k, 2).unwrap(), "isolated vertices: vertex-count parity");
    }
    let covered = (n % 2 == 0 && k % 2 == 0) || n == 2 * k || k == 0 || k == n;
    match johnson_nim(p) {
        r if covered && r.nim.is_some() => {
            ClosedFormResult { provenance: format!("johnson skeleton equals the graph value; {}", r.provenance), ..r }
        }
        _ => ClosedFormResult::unknown(),
    }
}

/// `B` iff `n ≡ 0 (mod 3)`.
pub fn complete_outcome(n: u64) -> Outcome {
    if n % 3 == 0 {
        Outcome::B
    } else {
        Outcome::A
    }
}

/// Winner of chomp on the threshold graph `K_n^{i_1..i_k}`.
pub fn threshold_outcome(spec: &ThresholdSpec) -> Result<ClosedFormResult> {
    let spec = ThresholdSpec::new(spec.n, spec.attachments.clone())?.sorted();
    let (outcome, why) = threshold_verdict(spec.n, &spec.attachments);
    Ok(match outcome {
        Outcome::Unknown => ClosedFormResult::unknown(),
        o => ClosedFormResult::outcome_only(o, why),
    })
}

fn threshold_verdict(n: u32, att: &[u32]) -> (Outcome, &'static str) {
    use Outcome::{Unknown, A, B};
    let r = n % 3;
    match *att {
        [] => (complete_outcome(n as u64), "complete graph: n mod 3"),
        [i] => {
            let b = (r == 1 && i % 3 == 0) || (r == 2 && i % 3 == 2);
            (if b { B } else { A }, "one attachment: residue table")
        }
        [0, i] => {
            let b = (r == 0 && i % 3 == 0) || (r == 2 && i % 3 == 1);
            (if b { B } else { A }, "attachments 0 and i: residue table")
        }
        [1, i] => match (r, i % 3) {
            (0, 0) | (0, 2) | (1, 0) | (1, 1) | (2, 1) | (2, 2) => (A, "attachments 1 and i: residue table"),
            (0, 1) if i == 1 => (B, "K_n^{1,1} plays as K_n"),
            (1, 2) if i == 2 => (A, "K_n^{1,2}: remove u_2"),
            (2, 0) if i == 3 => (A, "K_n^{1,3}: remove the edge u_2u_3"),
            _ => (Unknown, OPEN),
        },
        _ => {
            // Removing one attachment vertex to reach a known second-player win wins outright.
            for skip in 0..att.len() {
                let rest: Vec<u32> = att.iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &i)| i).collect();
                if threshold_verdict(n, &rest).0 == B {
                    return (A, "remove an attachment vertex to leave a second-player win");
                }
            }
            (Unknown, OPEN)
        }
    }
}

/// Closed-form answer for any family instance.
pub fn closed_form(spec: &FamilySpec, config: &EngineConfig) -> Result<ClosedFormResult> {
    Ok(match spec {
        FamilySpec::Kneser(p) => kneser_nim(p),
        FamilySpec::Johnson(p) => johnson_nim(p),
        FamilySpec::Multipartite(p) => multipartite_nim(p),
        FamilySpec::Complete(n) => ClosedFormResult::known(*n as u64 % 3, "complete graph: n mod 3"),
        FamilySpec::Threshold(p) => threshold_outcome(p)?,
        FamilySpec::Skeleton { s, inner } => match inner.as_ref() {
            FamilySpec::Kneser(p) => kneser_skeleton_nim(p, *s, config),
            FamilySpec::Johnson(p) => johnson_skeleton_nim(p, *s),
            FamilySpec::Multipartite(p) => multipartite_skeleton_nim(p, *s, config),
            FamilySpec::Complete(n) => complete_skeleton_nim(*n as u64, *s, config),
            FamilySpec::Threshold(p) => match s {
                0 => ClosedFormResult::known(0, "empty complex"),
                1 => ClosedFormResult::known(
                    (p.n as u64 + p.attachments.len() as u64) % 2,
                    "isolated vertices: vertex-count parity",
                ),
                2 => threshold_outcome(p)?,
                _ => ClosedFormResult::unknown(),
            },
            FamilySpec::Skeleton { .. } => return Err(Error::InvalidParams("nested skeleton".into())),
        },
    })
}
