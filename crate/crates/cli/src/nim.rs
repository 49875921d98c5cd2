use std::fmt;

use chomp_core::{closed_form, solve_auto, ClosedFormResult, EngineConfig, Grundy, Outcome, Solved};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::input::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Formula,
    Engine,
    Auto,
}

#[derive(Debug, Clone, Serialize)]
pub struct NimReport {
    pub instance: String,
    pub method: Method,
    pub nim: Option<Grundy>,
    pub outcome: Outcome,
    pub provenance: String,
    pub closed_form: Option<ClosedFormResult>,
    pub engine: Option<Solved>,
}

impl fmt::Display for NimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.nim {
            Some(v) => write!(f, "Nim = {} ({})", v.0, self.provenance),
            None => write!(f, "outcome {} ({})", self.outcome, self.provenance),
        }
    }
}

fn engine_provenance(s: &Solved) -> String {
    format!("engine, {} search, {} nodes", s.method, s.nodes)
}

/// Nim-value of an instance. `Auto` prefers a known closed form and otherwise runs the engine.
pub fn nim(instance: &Instance, method: Method, config: &EngineConfig) -> CliResult<NimReport> {
    let closed = instance.spec.as_ref().map(|s| closed_form(s, config)).transpose()?;
    let report = |nim, outcome, provenance, engine| NimReport {
        instance: instance.name.clone(),
        method,
        nim,
        outcome,
        provenance,
        closed_form: closed.clone(),
        engine,
    };
    let from_closed = |c: &ClosedFormResult| report(c.nim, c.outcome, c.provenance.clone(), None);
    match method {
        Method::Formula => {
            let c = closed.as_ref().ok_or_else(|| CliError::Usage("the formula method needs a family spec".into()))?;
            Ok(from_closed(c))
        }
        Method::Engine => {
            let s = solve_auto(&instance.state()?, config)?;
            Ok(report(Some(s.value), s.value.outcome(), engine_provenance(&s), Some(s)))
        }
        Method::Auto => {
            if let Some(c) = closed.as_ref().filter(|c| c.nim.is_some()) {
                return Ok(from_closed(c));
            }
            match solve_auto(&instance.state()?, config) {
                Ok(s) => Ok(report(Some(s.value), s.value.outcome(), engine_provenance(&s), Some(s))),
                Err(e) if e.is_resource_exceeded() => match closed.as_ref().filter(|c| !c.is_unknown()) {
                    Some(c) => Ok(from_closed(c)),
                    None => Err(e.into()),
                },
                Err(e) => Err(e.into()),
            }
        }
    }
}
