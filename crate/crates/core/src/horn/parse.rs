//! Clause text syntax, one clause per line:
//!
//! ```text
//! x != y \/ u = v
//! x = y, u = v -> z1 < z0 \/ z2 < z0 [alleq]
//! a <= b
//! ```
//!
//! `->` separates equality antecedents from the sequent; `[alleq]` adds the
//! disjunct equating the common head with every tail variable. `a = b = c` is
//! an all-equal literal, `>`/`>=` are read mirrored, `false` is the empty
//! clause. `#` starts a comment.

use super::clause::{Clause, ClauseSet, SeqLit};
use crate::error::{Error, Result};

enum Lit {
    Neq(usize, usize),
    Seq(SeqLit),
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn name(tok: &str, line: usize) -> Result<&str> {
    let t = tok.trim();
    if t.is_empty() || t.contains(char::is_whitespace) {
        return Err(err(line, format!("bad variable `{t}`")));
    }
    Ok(t)
}

fn literal(text: &str, cs: &mut ClauseSet, line: usize) -> Result<Lit> {
    let text = text.trim();
    for (op, len) in [("!=", 2), ("<=", 2), (">=", 2), ("<", 1), (">", 1)] {
        if let Some(i) = text.find(op) {
            let a = cs.var(name(&text[..i], line)?);
            let b = cs.var(name(&text[i + len..], line)?);
            return Ok(match op {
                "!=" => Lit::Neq(a, b),
                "<=" => Lit::Seq(SeqLit::Le(a, b)),
                ">=" => Lit::Seq(SeqLit::Le(b, a)),
                "<" => Lit::Seq(SeqLit::Lt(a, b)),
                _ => Lit::Seq(SeqLit::Lt(b, a)),
            });
        }
    }
    let parts: Vec<&str> = text.split('=').collect();
    if parts.len() < 2 {
        return Err(err(line, format!("expected an atom, found `{text}`")));
    }
    let vs = parts
        .iter()
        .map(|p| name(p, line).map(|n| cs.var(n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Lit::Seq(SeqLit::AllEqual(vs)))
}

/// Parses one clause, declaring unseen variables in `cs`.
pub fn parse_clause(text: &str, cs: &mut ClauseSet, line: usize) -> Result<Clause> {
    let text = text.trim();
    if text == "false" {
        return Ok(Clause::new(vec![], vec![]));
    }
    let (ante, seq) = match text.split_once("->") {
        Some((a, s)) => (Some(a), s),
        None => (None, text),
    };
    let mut neq = Vec::new();
    if let Some(a) = ante.filter(|a| !a.trim().is_empty()) {
        for part in a.split(',') {
            match literal(part, cs, line)? {
                Lit::Seq(SeqLit::AllEqual(vs)) if vs.len() == 2 => neq.push((vs[0], vs[1])),
                _ => return Err(err(line, format!("antecedent `{}` is not an equality", part.trim()))),
            }
        }
    }
    let mut seq_text = seq.trim();
    let alleq = seq_text.ends_with("[alleq]");
    if alleq {
        seq_text = seq_text[..seq_text.len() - "[alleq]".len()].trim();
    }
    let mut lits = Vec::new();
    if !seq_text.is_empty() && seq_text != "false" {
        for part in seq_text.split("\\/") {
            match literal(part, cs, line)? {
                Lit::Neq(a, b) if ante.is_none() => neq.push((a, b)),
                Lit::Neq(..) => return Err(err(line, "disequality after `->`")),
                Lit::Seq(l) => lits.push(l),
            }
        }
    }
    if alleq {
        let mut head = None;
        let mut all = Vec::new();
        for l in &lits {
            let SeqLit::Lt(t, h) = l else {
                return Err(err(line, "[alleq] needs a sequent of strict atoms"));
            };
            if head.is_some_and(|x| x != *h) {
                return Err(err(line, "[alleq] needs one common head"));
            }
            head = Some(*h);
            all.push(*t);
        }
        let Some(h) = head else {
            return Err(err(line, "[alleq] needs a head"));
        };
        all.push(h);
        lits.push(SeqLit::AllEqual(all));
    }
    Ok(Clause::new(neq, lits))
}

impl ClauseSet {
    /// Parses one clause per non-empty line.
    pub fn parse(text: &str) -> Result<ClauseSet> {
        Self::parse_with(ClauseSet::default(), text)
    }

    /// Parses into a set whose variables are already (partly) declared.
    pub fn parse_with(mut cs: ClauseSet, text: &str) -> Result<ClauseSet> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let c = parse_clause(line, &mut cs, i + 1)?;
            cs.clauses.push(c);
        }
        Ok(cs)
    }
}
