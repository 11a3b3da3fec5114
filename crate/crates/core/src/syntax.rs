//! Shared lexical helpers for the line-oriented grammar and lexicon formats.

use crate::signs::{Atom, FeatureValue, Slot, Term, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum RawValue {
    Int(u32),
    Atom(String),
    Var { name: String, optional: bool },
}

impl RawValue {
    pub(crate) fn parse(tok: &str) -> Result<Self, String> {
        let (optional, body) = match tok.strip_prefix('?') {
            Some(rest) => (true, rest),
            None => (false, tok),
        };
        if body.is_empty() {
            return Err("empty feature value".into());
        }
        if body.chars().any(|c| c.is_whitespace() || "[](),=".contains(c)) {
            return Err(format!("bad feature value `{tok}`"));
        }
        let first = body.chars().next().unwrap_or_default();
        if first.is_ascii_digit() {
            return body
                .parse::<u32>()
                .map(RawValue::Int)
                .map_err(|_| format!("bad index `{body}`"));
        }
        if first.is_uppercase() {
            return Ok(RawValue::Var {
                name: body.to_string(),
                optional,
            });
        }
        if optional {
            return Err(format!("only variables can be optional: `{tok}`"));
        }
        Ok(RawValue::Atom(body.to_string()))
    }

    pub(crate) fn into_slot(self) -> Slot {
        match self {
            RawValue::Int(i) => Slot {
                term: Term::Value(FeatureValue::Index(i)),
                optional: false,
            },
            RawValue::Atom(a) => Slot {
                term: Term::Value(FeatureValue::Const(Atom(a))),
                optional: false,
            },
            RawValue::Var { name, optional } => Slot {
                term: Term::Var(Var(name)),
                optional,
            },
        }
    }
}

/// `Head[f=v, g=w]` with optional brackets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct RawBundle {
    pub head: String,
    pub entries: Vec<(String, RawValue)>,
}

/// Parse one bundle at the start of `text` (leading whitespace skipped);
/// returns the bundle and the unparsed remainder.
pub(crate) fn parse_bundle(text: &str) -> Result<(RawBundle, &str), String> {
    let text = text.trim_start();
    let head_end = text
        .find(|c: char| c.is_whitespace() || c == '[')
        .unwrap_or(text.len());
    let head = &text[..head_end];
    if head.is_empty() {
        return Err("expected a category".into());
    }
    let rest = &text[head_end..];
    if !rest.starts_with('[') {
        let bundle = RawBundle {
            head: head.to_string(),
            entries: Vec::new(),
        };
        return Ok((bundle, rest));
    }
    let close = rest.find(']').ok_or_else(|| format!("unclosed `[` after `{head}`"))?;
    let body = &rest[1..close];
    let mut entries = Vec::new();
    for part in body.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected `feature=value`, found `{part}`"))?;
        let name = name.trim();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(format!("bad feature name in `{part}`"));
        }
        if entries.iter().any(|(n, _): &(String, RawValue)| n == name) {
            return Err(format!("feature `{name}` given twice"));
        }
        entries.push((name.to_string(), RawValue::parse(value.trim())?));
    }
    Ok((
        RawBundle {
            head: head.to_string(),
            entries,
        },
        &rest[close + 1..],
    ))
}

/// Drop a `;` comment and surrounding whitespace.
pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find(';') {
        Some(i) => line[..i].trim(),
        None => line.trim(),
    }
}
