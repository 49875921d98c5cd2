//! Text form of family instances, shared by the CLI and the service.
//!
//! ```text
//! kneser:n,k,l | johnson:n,k | multipartite:a+b+... | threshold:n;i1,i2,...
//! complete:n   | skeleton(s=S):<graph spec>
//! ```

use std::fmt;
use std::str::FromStr;

use super::{
    clique_skeleton, complete_graph, johnson_graph, kneser_graph, multipartite_graph, threshold_graph, JohnsonParams,
    KneserParams, MultipartiteSpec, ThresholdSpec,
};
use crate::complex::{Complex, Graph};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FamilySpec {
    Kneser(KneserParams),
    Johnson(JohnsonParams),
    Multipartite(MultipartiteSpec),
    Threshold(ThresholdSpec),
    Complete(u32),
    Skeleton { s: u32, inner: Box<FamilySpec> },
}

/// A constructed instance.
#[derive(Debug, Clone)]
pub struct Built {
    pub complex: Complex,
    /// The underlying graph; for skeletons, the graph whose cliques were taken.
    pub graph: Graph,
}

pub const GRAMMAR: &[&str] = &[
    "kneser:n,k,l",
    "johnson:n,k",
    "multipartite:n1+n2+...",
    "threshold:n;i1,i2,...",
    "complete:n",
    "skeleton(s=<s>):<inner spec>",
];

impl FamilySpec {
    pub fn grammar() -> &'static [&'static str] {
        GRAMMAR
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            FamilySpec::Kneser(_) => "kneser",
            FamilySpec::Johnson(_) => "johnson",
            FamilySpec::Multipartite(_) => "multipartite",
            FamilySpec::Threshold(_) => "threshold",
            FamilySpec::Complete(_) => "complete",
            FamilySpec::Skeleton { .. } => "skeleton",
        }
    }

    pub fn graph(&self) -> Result<Graph> {
        match self {
            FamilySpec::Kneser(p) => kneser_graph(p),
            FamilySpec::Johnson(p) => johnson_graph(p),
            FamilySpec::Multipartite(p) => multipartite_graph(p),
            FamilySpec::Threshold(p) => threshold_graph(p),
            FamilySpec::Complete(n) => complete_graph(*n),
            FamilySpec::Skeleton { inner, .. } => inner.graph(),
        }
    }

    pub fn build(&self) -> Result<Built> {
        let graph = self.graph()?;
        let complex = match self {
            FamilySpec::Skeleton { s, .. } => clique_skeleton(&graph, *s)?,
            _ => graph.as_complex().clone(),
        };
        Ok(Built { complex, graph })
    }
}

fn ints<T: FromStr>(input: &str, body: &str, sep: char, count: Option<usize>) -> Result<Vec<T>> {
    let body = body.trim();
    let values: Vec<T> = if body.is_empty() {
        Vec::new()
    } else {
        body.split(sep)
            .map(|p| {
                p.trim().parse::<T>().map_err(|_| Error::parse(input, format!("`{}` is not a valid integer", p.trim())))
            })
            .collect::<Result<_>>()?
    };
    if let Some(c) = count {
        if values.len() != c {
            return Err(Error::parse(input, format!("expected {c} parameters, found {}", values.len())));
        }
    }
    Ok(values)
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let text = input.trim();
        if let Some(rest) = text.strip_prefix("skeleton(") {
            let (arg, inner) =
                rest.split_once("):").ok_or_else(|| Error::parse(input, "expected `skeleton(s=<s>):<spec>`"))?;
            let s = arg
                .trim()
                .strip_prefix("s=")
                .and_then(|v| v.trim().parse::<u32>().ok())
                .ok_or_else(|| Error::parse(input, "skeleton parameter must be `s=<nonnegative integer>`"))?;
            let inner: FamilySpec = inner.parse().map_err(|e| match e {
                Error::Parse { reason, .. } => Error::parse(input, reason),
                other => other,
            })?;
            if matches!(inner, FamilySpec::Skeleton { .. }) {
                return Err(Error::parse(input, "the inner spec of a skeleton must be a graph family"));
            }
            return Ok(FamilySpec::Skeleton { s, inner: Box::new(inner) });
        }
        let (family, body) = text.split_once(':').ok_or_else(|| Error::parse(input, "expected `<family>:<params>`"))?;
        let invalid = |e: Error| match e {
            Error::InvalidParams(reason) => Error::parse(input, reason),
            other => other,
        };
        match family.trim() {
            "kneser" => {
                let v = ints::<i64>(input, body, ',', Some(3))?;
                Ok(FamilySpec::Kneser(KneserParams::new(v[0], v[1], v[2])))
            }
            "johnson" => {
                let v = ints::<u32>(input, body, ',', Some(2))?;
                Ok(FamilySpec::Johnson(JohnsonParams::new(v[0], v[1]).map_err(invalid)?))
            }
            "multipartite" => {
                let parts = ints::<u32>(input, body, '+', None)?;
                if parts.is_empty() {
                    return Err(Error::parse(input, "at least one part is required"));
                }
                Ok(FamilySpec::Multipartite(MultipartiteSpec::new(parts).map_err(invalid)?))
            }
            "threshold" => {
                let (n, att) = body.split_once(';').unwrap_or((body, ""));
                let n = ints::<u32>(input, n, ',', Some(1))?[0];
                let att = ints::<u32>(input, att, ',', None)?;
                Ok(FamilySpec::Threshold(ThresholdSpec::new(n, att).map_err(invalid)?))
            }
            "complete" => Ok(FamilySpec::Complete(ints::<u32>(input, body, ',', Some(1))?[0])),
            other => Err(Error::parse(input, format!("unknown family `{other}`"))),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::Kneser(p) => write!(f, "kneser:{},{},{}", p.n, p.k, p.l),
            FamilySpec::Johnson(p) => write!(f, "johnson:{},{}", p.n, p.k),
            FamilySpec::Multipartite(p) => {
                let parts: Vec<String> = p.parts.iter().map(u32::to_string).collect();
                write!(f, "multipartite:{}", parts.join("+"))
            }
            FamilySpec::Threshold(p) => {
                let att: Vec<String> = p.attachments.iter().map(u32::to_string).collect();
                write!(f, "threshold:{};{}", p.n, att.join(","))
            }
            FamilySpec::Complete(n) => write!(f, "complete:{n}"),
            FamilySpec::Skeleton { s, inner } => write!(f, "skeleton(s={s}):{inner}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        for text in [
            "kneser:5,2,0",
            "kneser:3,5,-1",
            "johnson:6,3",
            "multipartite:3+5+2",
            "threshold:5;1,3",
            "threshold:3;",
            "complete:6",
            "skeleton(s=3):complete:4",
            "skeleton(s=2):kneser:5,2,0",
        ] {
            let spec: FamilySpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert_eq!("threshold:3".parse::<FamilySpec>().unwrap().to_string(), "threshold:3;");
        assert_eq!(" complete : 4 ".parse::<FamilySpec>().unwrap(), FamilySpec::Complete(4));
    }

    #[test]
    fn rejects_malformed_specs() {
        for text in [
            "",
            "kneser:5,2",
            "kneser:a,b,c",
            "johnson:2,3",
            "multipartite:2+0",
            "multipartite:",
            "threshold:2;3",
            "petersen:1",
            "skeleton(t=3):complete:3",
            "skeleton(s=3):skeleton(s=2):complete:3",
            "complete:-1",
        ] {
            assert!(matches!(text.parse::<FamilySpec>(), Err(Error::Parse { .. })), "{text}");
        }
    }

    #[test]
    fn builds_skeletons() {
        let built = "skeleton(s=3):complete:3".parse::<FamilySpec>().unwrap().build().unwrap();
        assert_eq!(built.complex.face_count(), 7);
        assert_eq!(built.graph.edge_count(), 3);
    }
}
