use std::fmt::Write as _;

use thiserror::Error;

use super::QbfInstance;
use crate::formula::Quantifier;

pub(super) fn emit(inst: &QbfInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", inst.vars.len(), inst.clauses.len());
    for block in inst.merged_blocks() {
        out.push(match block.quantifier {
            Quantifier::Exists => 'e',
            Quantifier::Forall => 'a',
        });
        for v in &block.vars {
            let _ = write!(out, " {}", v.id());
        }
        out.push_str(" 0\n");
    }
    for clause in &inst.clauses {
        for l in clause {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}

/// A parsed QDIMACS problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qdimacs {
    pub num_vars: u32,
    pub blocks: Vec<(Quantifier, Vec<u32>)>,
    pub clauses: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QdimacsError {
    #[error("line {0}: missing or malformed `p cnf` header")]
    Header(usize),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("header announces {expected} clauses, found {found}")]
    ClauseCount { expected: usize, found: usize },
}

pub fn parse_qdimacs(text: &str) -> Result<Qdimacs, QdimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut blocks = Vec::new();
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let bad = |message: String| QdimacsError::Malformed {
            line: line_no,
            message,
        };
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if header.is_some() || parts.len() != 4 || parts[1] != "cnf" {
                return Err(QdimacsError::Header(line_no));
            }
            let v = parts[2]
                .parse()
                .map_err(|_| QdimacsError::Header(line_no))?;
            let c = parts[3]
                .parse()
                .map_err(|_| QdimacsError::Header(line_no))?;
            header = Some((v, c));
            continue;
        }
        let (num_vars, _) = header.ok_or(QdimacsError::Header(line_no))?;
        let check = |v: u32| {
            if v == 0 || v > num_vars {
                Err(bad(format!("variable {v} out of range 1..={num_vars}")))
            } else {
                Ok(v)
            }
        };
        if line.starts_with('e') || line.starts_with('a') {
            if !clauses.is_empty() || !current.is_empty() {
                return Err(bad("quantifier line after clauses".into()));
            }
            let q = if line.starts_with('e') {
                Quantifier::Exists
            } else {
                Quantifier::Forall
            };
            let mut vars = Vec::new();
            let mut closed = false;
            for tok in line[1..].split_whitespace() {
                let v: u32 = tok
                    .parse()
                    .map_err(|_| bad(format!("bad variable `{tok}`")))?;
                if v == 0 {
                    closed = true;
                    break;
                }
                vars.push(check(v)?);
            }
            if !closed {
                return Err(bad("quantifier line not terminated by 0".into()));
            }
            blocks.push((q, vars));
            continue;
        }
        for tok in line.split_whitespace() {
            let l: i32 = tok
                .parse()
                .map_err(|_| bad(format!("bad literal `{tok}`")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                check(l.unsigned_abs())?;
                current.push(l);
            }
        }
    }
    let (num_vars, expected) = header.ok_or(QdimacsError::Header(0))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != expected {
        return Err(QdimacsError::ClauseCount {
            expected,
            found: clauses.len(),
        });
    }
    Ok(Qdimacs {
        num_vars,
        blocks,
        clauses,
    })
}
