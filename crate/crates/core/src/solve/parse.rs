//! The line-oriented instance format:
//!
//! ```text
//! # comment
//! algebra IA            # IA | RA | BA<p> | CDC | DIA | POINT
//! vars X Y Z
//! X { s f } Y           # BA codes as (c1,...,cp)
//! forw X                # DIA only
//! ```
//!
//! POINT instances take raw atoms (`a < b`, `a <= b`, `a = b`, `a != b`,
//! with rational constants allowed on either side), clauses in the Horn
//! syntax (`x != y \/ u = v`, `x = y -> a < b`), and explicit disjunctions
//! `{ a < b , c = d | e < f }`.

use std::str::FromStr;

use crate::domain::{Calculus, Rational};
use crate::error::{Error, Result};
use crate::horn::{parse_clause, ClauseSet, SeqLit};
use crate::instance::{Instance, PointInstance, QualInstance};
use crate::point::atom::{Dnf, Op, OrderAtom, Term};
use crate::relations::basic::BasicCode;
use crate::relations::relation::QualRelation;

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Splits the inside of `{ ... }` into codes, keeping `(s, p)` together.
fn code_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c if c.is_whitespace() => {}
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn qual_line(inst: &mut QualInstance, text: &str, line: usize) -> Result<()> {
    let var = |inst: &QualInstance, name: &str| {
        inst.var(name)
            .ok_or_else(|| err(line, format!("undeclared variable `{name}`")))
    };
    if let Some(rest) = text.strip_prefix("forw ") {
        if inst.calculus != Calculus::Dia {
            return Err(err(line, "`forw` applies to DIA instances only"));
        }
        for name in rest.split_whitespace() {
            let v = var(inst, name)?;
            inst.forw.push(v);
        }
        return Ok(());
    }
    let (x, codes, y) = match (text.find('{'), text.rfind('}')) {
        (Some(open), Some(close)) if open < close => (
            text[..open].trim(),
            code_tokens(&text[open + 1..close]),
            text[close + 1..].trim(),
        ),
        _ => {
            let toks = code_tokens(text);
            if toks.len() != 3 {
                return Err(err(line, format!("expected `X {{ codes }} Y`, found `{text}`")));
            }
            (
                text.split_whitespace().next().unwrap_or(""),
                vec![toks[1].clone()],
                text.split_whitespace().last().unwrap_or(""),
            )
        }
    };
    let (x, y) = (var(inst, x)?, var(inst, y)?);
    let mut rel = QualRelation::empty(inst.calculus);
    for c in codes {
        let code = BasicCode::parse(inst.calculus, &c).map_err(|e| err(line, e.to_string()))?;
        rel.insert(&code).map_err(|e| err(line, e.to_string()))?;
    }
    inst.constraints.push((x, rel, y));
    Ok(())
}

fn term(p: &PointInstance, tok: &str, line: usize) -> Result<Term> {
    let tok = tok.trim();
    if let Ok(q) = Rational::from_str(tok) {
        return Ok(Term::Const(q));
    }
    p.var(tok)
        .map(Term::Var)
        .ok_or_else(|| err(line, format!("undeclared variable `{tok}`")))
}

fn atom(p: &PointInstance, text: &str, line: usize) -> Result<OrderAtom> {
    for (sym, op, flip) in [
        ("!=", Op::Ne, false),
        ("<=", Op::Le, false),
        (">=", Op::Le, true),
        ("<", Op::Lt, false),
        (">", Op::Lt, true),
        ("=", Op::Eq, false),
    ] {
        if let Some(i) = text.find(sym) {
            let (a, b) = (term(p, &text[..i], line)?, term(p, &text[i + sym.len()..], line)?);
            return Ok(if flip {
                OrderAtom::new(b, op, a)
            } else {
                OrderAtom::new(a, op, b)
            });
        }
    }
    Err(err(line, format!("expected an atom, found `{text}`")))
}

/// A clause as a disjunction of conjunctions of atoms.
fn clause_dnf(p: &PointInstance, text: &str, line: usize) -> Result<Dnf> {
    let mut cs = ClauseSet {
        vars: p.vars.clone(),
        ..ClauseSet::default()
    };
    let c = parse_clause(text, &mut cs, line)?;
    if cs.vars.len() > p.vars.len() {
        return Err(err(line, format!("undeclared variable `{}`", cs.vars[p.vars.len()])));
    }
    let mut dnf: Dnf = Vec::new();
    for &(a, b) in &c.neq {
        dnf.push(vec![OrderAtom::lt(a, b)]);
        dnf.push(vec![OrderAtom::lt(b, a)]);
    }
    for l in &c.seq {
        dnf.push(match l {
            SeqLit::AllEqual(vs) => vs.windows(2).map(|w| OrderAtom::eq(w[0], w[1])).collect(),
            l => vec![l.atom().expect("order literal")],
        });
    }
    Ok(dnf)
}

fn point_line(p: &mut PointInstance, text: &str, line: usize) -> Result<()> {
    if let Some(inner) = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
        let mut dnf = Vec::new();
        for alt in inner.split('|') {
            let conj = alt
                .split(',')
                .filter(|a| !a.trim().is_empty())
                .map(|a| atom(p, a, line))
                .collect::<Result<Vec<_>>>()?;
            dnf.push(conj);
        }
        p.constraints.push(dnf);
        return Ok(());
    }
    let is_clause = text.contains("\\/") || text.contains("->") || text.contains("[alleq]") || text.matches('=').count() - text.matches("!=").count() - text.matches("<=").count() - text.matches(">=").count() > 1;
    if is_clause {
        let dnf = clause_dnf(p, text, line)?;
        p.constraints.push(dnf);
        return Ok(());
    }
    let a = atom(p, text, line)?;
    // `x = 3/2` pins a variable
    if let (Term::Var(v), Op::Eq, Term::Const(q)) = (a.lhs, a.op, a.rhs) {
        p.constants.insert(v, q);
        return Ok(());
    }
    p.constraints.push(vec![vec![a]]);
    Ok(())
}

/// Parses an instance; errors carry 1-based line numbers.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut inst: Option<Instance> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.split('#').next().unwrap_or("").trim();
        if t.is_empty() {
            continue;
        }
        if let Some(name) = t.strip_prefix("algebra") {
            if inst.is_some() {
                return Err(err(line, "duplicate `algebra` line"));
            }
            let name = name.trim();
            inst = Some(if name == "POINT" {
                Instance::Point(PointInstance::default())
            } else {
                let c = Calculus::parse(name).ok_or_else(|| err(line, format!("unknown algebra `{name}`")))?;
                Instance::Qual(QualInstance::new(c, &[]))
            });
            continue;
        }
        let Some(cur) = inst.as_mut() else {
            return Err(err(line, "the first line must be `algebra <name>`"));
        };
        if let Some(names) = t.strip_prefix("vars") {
            for n in names.split_whitespace() {
                match cur {
                    Instance::Qual(q) => q.add_var(n),
                    Instance::Point(p) => p.add_var(n),
                };
            }
            continue;
        }
        match cur {
            Instance::Qual(q) => qual_line(q, t, line)?,
            Instance::Point(p) => point_line(p, t, line)?,
        }
    }
    inst.ok_or_else(|| err(0, "empty instance"))
}
