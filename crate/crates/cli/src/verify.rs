//! Closed forms against the engine over a parameter range.

use std::fmt;
use std::time::Instant;

use chomp_core::families::{clique_skeleton_with_cap, JohnsonParams, KneserParams, MultipartiteSpec, ThresholdSpec};
use chomp_core::{closed_form, solve_auto, EngineConfig, FamilySpec, GameState, Outcome};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Kneser,
    Complete,
    Multipartite,
    Johnson,
    Threshold,
    Skeleton,
}

#[derive(Debug, Clone, Serialize)]
pub struct Bounds {
    /// Largest ground set (kneser, johnson) or clique size (complete, threshold).
    pub n_max: u32,
    /// Largest total of multipartite part sizes.
    pub sum_max: u32,
    /// Largest number of threshold attachments.
    pub attachments: u32,
    /// Largest skeleton dimension bound.
    pub s_max: u32,
    /// Skeleton instances with more faces are left out.
    pub face_max: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { n_max: 5, sum_max: 7, attachments: 2, s_max: 4, face_max: 40 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub params: String,
    pub closed_nim: Option<u32>,
    pub closed_outcome: Outcome,
    pub provenance: String,
    pub engine_nim: Option<u32>,
    pub engine_outcome: Outcome,
    /// `None` when the closed form is open or the engine gave up.
    pub agree: Option<bool>,
    pub nodes: u64,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub rows: usize,
    pub agree: usize,
    pub disagree: usize,
    pub unknown: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub family: Family,
    pub range: String,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn check(&self) -> CliResult<()> {
        match self.summary.disagree {
            0 => Ok(()),
            n => Err(CliError::Disagreement(n)),
        }
    }
}

fn partitions(total: u32, max: u32) -> Vec<Vec<u32>> {
    if total == 0 {
        return vec![vec![]];
    }
    (1..=max.min(total))
        .rev()
        .flat_map(|first| {
            partitions(total - first, first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// Nondecreasing lists of `len` values from `0..=n`.
fn multisets(n: u32, len: u32, min: u32) -> Vec<Vec<u32>> {
    if len == 0 {
        return vec![vec![]];
    }
    (min..=n)
        .flat_map(|first| {
            multisets(n, len - 1, first).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn kneser_range(n_max: u32) -> impl Iterator<Item = KneserParams> {
    (0..=n_max as i64).flat_map(|n| (0..=n).flat_map(move |k| (-1..k).map(move |l| KneserParams::new(n, k, l))))
}

fn multipartite_range(sum_max: u32) -> impl Iterator<Item = MultipartiteSpec> {
    (1..=sum_max).flat_map(|t| partitions(t, t)).map(|p| MultipartiteSpec::new(p).expect("parts are positive"))
}

fn instances(family: Family, b: &Bounds) -> Vec<FamilySpec> {
    match family {
        Family::Kneser => kneser_range(b.n_max).map(FamilySpec::Kneser).collect(),
        Family::Complete => (0..=b.n_max).map(FamilySpec::Complete).collect(),
        Family::Multipartite => multipartite_range(b.sum_max).map(FamilySpec::Multipartite).collect(),
        Family::Johnson => (0..=b.n_max)
            .flat_map(|n| (0..=n).map(move |k| JohnsonParams::new(n, k).expect("k <= n")))
            .map(FamilySpec::Johnson)
            .collect(),
        Family::Threshold => (0..=b.n_max)
            .flat_map(|n| {
                (1..=b.attachments).flat_map(move |len| multisets(n, len, 0).into_iter().map(move |a| (n, a)))
            })
            .map(|(n, a)| FamilySpec::Threshold(ThresholdSpec::new(n, a).expect("attachments within n")))
            .collect(),
        Family::Skeleton => {
            let graphs: Vec<FamilySpec> = kneser_range(b.n_max)
                .map(FamilySpec::Kneser)
                .chain(multipartite_range(b.sum_max).map(FamilySpec::Multipartite))
                .collect();
            let mut out = Vec::new();
            for g in graphs {
                let Ok(graph) = g.graph() else { continue };
                for s in 0..=b.s_max {
                    if clique_skeleton_with_cap(&graph, s, b.face_max).is_ok() {
                        out.push(FamilySpec::Skeleton { s, inner: Box::new(g.clone()) });
                    }
                }
            }
            out
        }
    }
}

fn range_text(family: Family, b: &Bounds) -> String {
    match family {
        Family::Kneser => format!("KG(n,k,l), 0 <= n <= {}, -1 <= l < k <= n", b.n_max),
        Family::Complete => format!("K_n, n <= {}", b.n_max),
        Family::Multipartite => format!("K_(n1..nr), sum <= {}", b.sum_max),
        Family::Johnson => format!("J(n,k), n <= {}", b.n_max),
        Family::Threshold => format!("K_n^(i1..ij), n <= {}, j <= {}", b.n_max, b.attachments),
        Family::Skeleton => format!(
            "C_s of KG (n <= {}) and multipartite (sum <= {}), s <= {}, <= {} faces",
            b.n_max, b.sum_max, b.s_max, b.face_max
        ),
    }
}

fn row(spec: &FamilySpec, config: &EngineConfig) -> CliResult<Row> {
    let closed = closed_form(spec, config)?;
    let complex = spec.build()?.complex;
    let start = Instant::now();
    let engine = solve_auto(&GameState::new(&complex)?, config);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let (engine_nim, engine_outcome, nodes) = match &engine {
        Ok(s) => (Some(s.value.0), s.value.outcome(), s.nodes),
        Err(e) if e.is_resource_exceeded() => (None, Outcome::Unknown, 0),
        Err(e) => return Err(e.clone().into()),
    };
    let agree = match (&engine, closed.outcome) {
        (Err(_), _) | (_, Outcome::Unknown) => None,
        (Ok(s), _) => Some(match closed.nim {
            Some(v) => v == s.value,
            None => closed.outcome == s.value.outcome(),
        }),
    };
    Ok(Row {
        params: spec.to_string(),
        closed_nim: closed.nim.map(|g| g.0),
        closed_outcome: closed.outcome,
        provenance: closed.provenance,
        engine_nim,
        engine_outcome,
        agree,
        nodes,
        elapsed_ms,
    })
}

pub fn verify(family: Family, bounds: &Bounds, config: &EngineConfig) -> CliResult<VerificationReport> {
    let rows = instances(family, bounds).iter().map(|s| row(s, config)).collect::<CliResult<Vec<_>>>()?;
    let mut summary = Summary { rows: rows.len(), ..Summary::default() };
    for r in &rows {
        match (r.agree, r.closed_outcome, r.engine_nim) {
            (Some(true), ..) => summary.agree += 1,
            (Some(false), ..) => summary.disagree += 1,
            (None, _, None) => summary.skipped += 1,
            (None, ..) => summary.unknown += 1,
        }
    }
    Ok(VerificationReport { family, range: range_text(family, bounds), rows, summary })
}

fn value_text(nim: Option<u32>, outcome: Outcome) -> String {
    match nim {
        Some(v) => v.to_string(),
        None => format!("{outcome}"),
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.range)?;
        let width = self.rows.iter().map(|r| r.params.len()).max().unwrap_or(6).max(6);
        writeln!(
            f,
            "{:<width$}  {:>7}  {:>7}  {:>5}  {:>9}  {:>9}  provenance",
            "params", "formula", "engine", "agree", "nodes", "ms"
        )?;
        let mut open = Vec::new();
        for r in &self.rows {
            let agree = match (r.agree, r.engine_nim) {
                (Some(true), _) => "yes",
                (Some(false), _) => "NO",
                (None, None) => "skip",
                (None, Some(_)) => "-",
            };
            writeln!(
                f,
                "{:<width$}  {:>7}  {:>7}  {:>5}  {:>9}  {:>9.2}  {}",
                r.params,
                value_text(r.closed_nim, r.closed_outcome),
                value_text(r.engine_nim, r.engine_outcome),
                agree,
                r.nodes,
                r.elapsed_ms,
                r.provenance
            )?;
            if r.closed_outcome == Outcome::Unknown && r.engine_nim.is_some() {
                open.push(r);
            }
        }
        if !open.is_empty() {
            writeln!(f, "\nopen cells, engine verdicts:")?;
            for r in open {
                writeln!(f, "  {}: Nim {} (outcome {})", r.params, r.engine_nim.unwrap(), r.engine_outcome)?;
            }
        }
        let s = &self.summary;
        write!(
            f,
            "\n{} rows: {} agree, {} disagree, {} open, {} skipped",
            s.rows, s.agree, s.disagree, s.unknown, s.skipped
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerations() {
        assert_eq!(partitions(4, 4).len(), 5);
        assert_eq!(multisets(2, 2, 0), vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 1], vec![1, 2], vec![2, 2]]);
        assert_eq!(kneser_range(2).count(), 1 + 3 + 6);
    }
}
