//! Plain-text LP documents.
//!
//! ```text
//! # vsf lp format 1
//! max <coef>*<var> ...
//! eq <coef>*<var> ... = <rhs>
//! var <name> >= 0
//! ```
//!
//! Zero objective coefficients are omitted. Numbers use the shortest
//! representation that parses back to the same `f64`.

use std::fmt;
use std::io;

use thiserror::Error;

use super::{LinearObjective, Sense, VsfConstraintSystem};

const HEADER: &str = "# vsf lp format 1";

#[derive(Debug, Error)]
pub enum LpError {
    #[error("objective has {objective} coefficients but the system has {vars} variables")]
    Dimension { objective: usize, vars: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    pub terms: Vec<(f64, String)>,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpDocument {
    pub sense: Sense,
    pub objective: Vec<(f64, String)>,
    pub rows: Vec<LpRow>,
    pub vars: Vec<String>,
}

impl LpDocument {
    pub fn new(system: &VsfConstraintSystem, objective: &LinearObjective) -> Result<Self, LpError> {
        if objective.coefficients.len() != system.num_vars() {
            return Err(LpError::Dimension {
                objective: objective.coefficients.len(),
                vars: system.num_vars(),
            });
        }
        let name = |c: usize| system.var_names[c].clone();
        Ok(LpDocument {
            sense: objective.sense,
            objective: objective
                .coefficients
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != 0.0)
                .map(|(c, &a)| (a, name(c)))
                .collect(),
            rows: system
                .rows
                .iter()
                .map(|r| LpRow {
                    terms: r.terms.iter().map(|&(c, a)| (a, name(c))).collect(),
                    rhs: r.rhs,
                })
                .collect(),
            vars: system.var_names.clone(),
        })
    }
}

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[(f64, String)]) -> fmt::Result {
    for (a, v) in terms {
        write!(f, " {a:?}*{v}")?;
    }
    Ok(())
}

impl fmt::Display for LpDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{HEADER}")?;
        f.write_str(match self.sense {
            Sense::Maximize => "max",
            Sense::Minimize => "min",
        })?;
        write_terms(f, &self.objective)?;
        writeln!(f)?;
        for row in &self.rows {
            f.write_str("eq")?;
            write_terms(f, &row.terms)?;
            writeln!(f, " = {:?}", row.rhs)?;
        }
        for v in &self.vars {
            writeln!(f, "var {v} >= 0")?;
        }
        Ok(())
    }
}

/// Writes the LP document for `system` and `objective` to `sink`.
pub fn export_lp(
    system: &VsfConstraintSystem,
    objective: &LinearObjective,
    sink: &mut impl io::Write,
) -> Result<LpDocument, LpError> {
    let doc = LpDocument::new(system, objective)?;
    write!(sink, "{doc}")?;
    Ok(doc)
}

/// Reads a document in the format written by [`export_lp`].
pub fn parse_lp(text: &str) -> Result<LpDocument, LpError> {
    let mut sense = None;
    let mut objective = Vec::new();
    let mut rows = Vec::new();
    let mut vars = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| LpError::Parse { line, message };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut tokens = body.split_whitespace();
        let head = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        match head {
            "max" | "min" => {
                if sense.is_some() {
                    return Err(err("duplicate objective".into()));
                }
                sense = Some(if head == "max" {
                    Sense::Maximize
                } else {
                    Sense::Minimize
                });
                objective = parse_terms(&rest).map_err(err)?;
            }
            "eq" => {
                let [terms @ .., "=", rhs] = rest.as_slice() else {
                    return Err(err("expected `= <rhs>` at the end of the row".into()));
                };
                let rhs = rhs.parse().map_err(|_| err(format!("invalid rhs `{rhs}`")))?;
                rows.push(LpRow {
                    terms: parse_terms(terms).map_err(err)?,
                    rhs,
                });
            }
            "var" => match rest.as_slice() {
                [name, ">=", "0"] => vars.push(name.to_string()),
                _ => return Err(err("expected `var <name> >= 0`".into())),
            },
            other => return Err(err(format!("unknown line kind `{other}`"))),
        }
    }
    Ok(LpDocument {
        sense: sense.ok_or(LpError::Parse {
            line: text.lines().count(),
            message: "missing objective line".into(),
        })?,
        objective,
        rows,
        vars,
    })
}

fn parse_terms(tokens: &[&str]) -> Result<Vec<(f64, String)>, String> {
    tokens
        .iter()
        .map(|t| {
            let (a, v) = t
                .split_once('*')
                .ok_or_else(|| format!("expected <coef>*<var>, found `{t}`"))?;
            let a: f64 = a.parse().map_err(|_| format!("invalid coefficient `{a}`"))?;
            Ok((a, v.to_string()))
        })
        .collect()
}
