//! Reader for the line-oriented grammar format.
//!
//! ```text
//! ; comment
//! feature idx
//! rule adj_n: N[idx=X, next=R] -> ADJ[mod=X, rank=R] N[idx=X, next=P] where R > P
//! rule tense: VP[ev=E] -> V[ev=E] TNS[ev=E] fuse
//! morph bark + PAST = barked
//! ```
//!
//! Uppercase-initial values are variables, `?X` is a variable that also
//! accepts a sign lacking the feature, digits are indices and anything else
//! is an atom.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::signs::{Atom, CmpOp, Constraint, Grammar, Operand, OrthMode, Rule, SignTemplate, Var};
use crate::syntax::{parse_bundle, strip_comment, RawBundle};

const SOURCE: &str = "grammar";

pub fn parse_grammar(text: &str) -> Result<Grammar> {
    let mut grammar = Grammar::default();
    let mut rule_lines = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "feature" => {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(Error::syntax(SOURCE, line_no, "expected `feature <name>`"));
                }
                grammar.features.insert(Atom::new(rest)?);
            }
            "rule" => {
                let rule = parse_rule(rest).map_err(|m| Error::syntax(SOURCE, line_no, m))?;
                if grammar.rules.iter().any(|r| r.name == rule.name) {
                    return Err(Error::DuplicateRule(rule.name.to_string()));
                }
                grammar.rules.push(rule);
                rule_lines.push(line_no);
            }
            "morph" => {
                let (l, r, fused) = parse_morph(rest).ok_or_else(|| {
                    Error::syntax(SOURCE, line_no, "expected `morph <left> + <right> = <fused>`")
                })?;
                grammar.morph.insert(l, r, fused);
            }
            other => {
                return Err(Error::syntax(SOURCE, line_no, format!("unknown directive `{other}`")));
            }
        }
    }

    // features may be declared after the rules that use them
    for (rule, line) in grammar.rules.iter().zip(rule_lines) {
        for t in [&rule.mother, &rule.left, &rule.right] {
            if let Some(f) = t.feats.keys().find(|f| !grammar.features.contains(*f)) {
                return Err(Error::UndeclaredFeature {
                    line,
                    feature: f.to_string(),
                });
            }
        }
    }
    Ok(grammar)
}

fn parse_morph(rest: &str) -> Option<(String, String, String)> {
    let (lhs, fused) = rest.split_once('=')?;
    let (l, r) = lhs.split_once('+')?;
    let parts = [l.trim(), r.trim(), fused.trim()];
    if parts.iter().any(|p| p.is_empty() || p.contains(char::is_whitespace)) {
        return None;
    }
    Some((parts[0].into(), parts[1].into(), parts[2].into()))
}

fn template(b: RawBundle) -> std::result::Result<SignTemplate, String> {
    let cat = Atom::new(b.head.clone()).map_err(|e| e.to_string())?;
    let feats = b
        .entries
        .into_iter()
        .map(|(name, v)| Ok((Atom::new(name).map_err(|e| e.to_string())?, v.into_slot())))
        .collect::<std::result::Result<_, String>>()?;
    Ok(SignTemplate { cat, feats })
}

fn parse_rule(text: &str) -> std::result::Result<Rule, String> {
    let (name, body) = text
        .split_once(':')
        .ok_or("expected `rule <name>: <mother> -> <left> <right>`")?;
    let name = Atom::new(name.trim()).map_err(|e| e.to_string())?;

    let (mother, rest) = parse_bundle(body)?;
    let rest = rest
        .trim_start()
        .strip_prefix("->")
        .ok_or_else(|| format!("rule `{name}`: expected `->` after the mother"))?;
    let (left, rest) = parse_bundle(rest)?;
    let (right, rest) = parse_bundle(rest)?;

    let mut rest = rest.trim();
    let mut orth_mode = OrthMode::Concat;
    if let Some(r) = rest.strip_prefix("fuse") {
        if r.is_empty() || r.starts_with(char::is_whitespace) {
            orth_mode = OrthMode::Fuse;
            rest = r.trim();
        }
    }
    let constraints = match rest.strip_prefix("where") {
        Some(c) => c
            .split(',')
            .map(parse_constraint)
            .collect::<std::result::Result<Vec<_>, _>>()?,
        None if rest.is_empty() => Vec::new(),
        None => return Err(format!("rule `{name}`: unexpected trailing `{rest}`")),
    };

    let rule = Rule {
        name,
        mother: template(mother)?,
        left: template(left)?,
        right: template(right)?,
        orth_mode,
        constraints,
    };
    check_variables(&rule)?;
    Ok(rule)
}

fn parse_constraint(text: &str) -> std::result::Result<Constraint, String> {
    let text = text.trim();
    // two-character operators first
    let ops = [
        (">=", CmpOp::Ge),
        ("<=", CmpOp::Le),
        ("!=", CmpOp::Ne),
        ("=", CmpOp::Eq),
        ("<", CmpOp::Lt),
        (">", CmpOp::Gt),
    ];
    let (pos, sym, op) = ops
        .iter()
        .filter_map(|(s, op)| text.find(s).map(|p| (p, *s, *op)))
        .min_by_key(|(p, s, _)| (*p, std::cmp::Reverse(s.len())))
        .ok_or_else(|| format!("constraint `{text}` has no comparison operator"))?;
    let lhs = text[..pos].trim();
    let rhs_text = text[pos + sym.len()..].trim();
    if !lhs.starts_with(char::is_uppercase) || lhs.contains(char::is_whitespace) {
        return Err(format!("constraint `{text}`: left side must be a variable"));
    }

    let (base, offset) = match rhs_text.find(['+', '-']) {
        Some(p) => {
            let n: i64 = rhs_text[p + 1..]
                .trim()
                .parse()
                .map_err(|_| format!("constraint `{text}`: bad offset"))?;
            let sign = if rhs_text.as_bytes()[p] == b'-' { -1 } else { 1 };
            (rhs_text[..p].trim(), sign * n)
        }
        None => (rhs_text, 0),
    };
    let rhs = if base.starts_with(char::is_uppercase) && !base.contains(char::is_whitespace) {
        Operand::Var(Var(base.to_string()))
    } else {
        Operand::Int(
            base.parse()
                .map_err(|_| format!("constraint `{text}`: bad right-hand side"))?,
        )
    };
    Ok(Constraint {
        lhs: Var(lhs.to_string()),
        op,
        rhs,
        offset,
    })
}

fn check_variables(rule: &Rule) -> std::result::Result<(), String> {
    let mut bound: BTreeSet<&Var> = rule.left.vars().chain(rule.right.vars()).collect();
    for c in &rule.constraints {
        if let Operand::Var(v) = &c.rhs {
            if !bound.contains(v) {
                return Err(format!("rule `{}`: constraint uses unbound variable `{v}`", rule.name));
            }
        }
        if !bound.contains(&c.lhs) {
            if c.op != CmpOp::Eq {
                return Err(format!("rule `{}`: constraint uses unbound variable `{}`", rule.name, c.lhs));
            }
            bound.insert(&c.lhs);
        }
    }
    if let Some(v) = rule.mother.vars().find(|v| !bound.contains(v)) {
        return Err(format!("rule `{}`: mother variable `{v}` is not bound by a daughter", rule.name));
    }
    Ok(())
}
