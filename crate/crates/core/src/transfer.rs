//! Lexical transfer: map a source-language bag (and optionally its parse
//! bracketing) to a target-language bag.
//!
//! ```text
//! xfer N:chien[idx=X] => N:dog[idx=X, next=0, mods=0]
//! xfer V:a[ev=E] + PRT:b[ev=E] => V:c[ev=E]      ; parsed, not executable
//! ```

use std::collections::{BTreeMap, BTreeSet};

use crate::bag::{Bag, BagEntry};
use crate::error::{Error, Result};
use crate::init::{resolve_labels, Bracketing};
use crate::signs::{unify, Atom, Bindings, Features, Sign, SignTemplate, Term};
use crate::syntax::{parse_bundle, strip_comment};

const SOURCE: &str = "lexicon";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub orth: String,
    pub template: SignTemplate,
}

impl Pattern {
    fn matches(&self, sign: &Sign) -> Option<Bindings> {
        if sign.orth != self.orth {
            return None;
        }
        unify(&self.template, sign, &Bindings::new())
    }

    fn instantiate(&self, b: &Bindings) -> Sign {
        let feats: Features = self
            .template
            .feats
            .iter()
            .filter_map(|(name, slot)| {
                let v = match &slot.term {
                    Term::Value(v) => Some(v.clone()),
                    Term::Var(var) => b.get(var).cloned(),
                };
                v.map(|v| (name.clone(), v))
            })
            .collect();
        Sign::new(self.template.cat.clone(), self.orth.clone(), feats)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexEntry {
    pub line: usize,
    pub source: Vec<Pattern>,
    pub target: Vec<Pattern>,
}

impl LexEntry {
    pub fn is_word_for_word(&self) -> bool {
        self.source.len() == 1 && self.target.len() == 1
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    pub entries: Vec<LexEntry>,
}

fn parse_side(text: &str) -> std::result::Result<Vec<Pattern>, String> {
    let mut out = Vec::new();
    let mut rest = text;
    loop {
        let (b, r) = parse_bundle(rest)?;
        let (cat, orth) = b
            .head
            .split_once(':')
            .filter(|(c, o)| !c.is_empty() && !o.is_empty())
            .ok_or_else(|| format!("expected `CAT:orth`, found `{}`", b.head))?;
        let cat = Atom::new(cat).map_err(|e| e.to_string())?;
        let feats = b
            .entries
            .into_iter()
            .map(|(n, v)| Ok((Atom::new(n).map_err(|e| e.to_string())?, v.into_slot())))
            .collect::<std::result::Result<_, String>>()?;
        out.push(Pattern {
            orth: orth.to_string(),
            template: SignTemplate { cat, feats },
        });
        let r = r.trim_start();
        if r.is_empty() {
            return Ok(out);
        }
        rest = r.strip_prefix('+').ok_or_else(|| format!("unexpected `{r}`"))?;
    }
}

impl Lexicon {
    pub fn parse(text: &str) -> Result<Lexicon> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = strip_comment(raw);
            if body.is_empty() {
                continue;
            }
            let rest = body
                .strip_prefix("xfer")
                .filter(|r| r.starts_with(char::is_whitespace))
                .ok_or_else(|| Error::syntax(SOURCE, line, "expected `xfer <source> => <target>`"))?;
            let (src, tgt) = rest
                .split_once("=>")
                .ok_or_else(|| Error::syntax(SOURCE, line, "missing `=>`"))?;
            let source = parse_side(src).map_err(|m| Error::syntax(SOURCE, line, m))?;
            let target = parse_side(tgt).map_err(|m| Error::syntax(SOURCE, line, m))?;

            let bound: BTreeSet<_> = source.iter().flat_map(|p| p.template.vars()).collect();
            for p in &target {
                for slot in p.template.feats.values() {
                    if slot.optional {
                        return Err(Error::syntax(SOURCE, line, "target features cannot be optional"));
                    }
                    if let Term::Var(v) = &slot.term {
                        if !bound.contains(v) {
                            return Err(Error::syntax(SOURCE, line, format!("target variable `{v}` is unbound")));
                        }
                    }
                }
            }
            entries.push(LexEntry { line, source, target });
        }
        Ok(Lexicon { entries })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transferred {
    pub bag: Bag,
    /// Source bracketing relabelled with target leaf ids, same shape.
    pub bracketing: Option<Bracketing>,
    /// Source leaf id to target leaf id.
    pub leaf_map: BTreeMap<String, String>,
}

fn target_id(orth: &str, taken: &mut BTreeSet<String>) -> String {
    let base: String = orth
        .chars()
        .map(|c| if c.is_whitespace() || c == '(' || c == ')' { '_' } else { c })
        .collect();
    let mut id = base.clone();
    let mut n = 2;
    while !taken.insert(id.clone()) {
        id = format!("{base}-{n}");
        n += 1;
    }
    id
}

pub fn transfer(source: &Bag, bracketing: Option<&Bracketing>, lexicon: &Lexicon) -> Result<Transferred> {
    let mut entries = Vec::with_capacity(source.len());
    let mut leaf_map = BTreeMap::new();
    let mut taken = BTreeSet::new();
    for e in source.entries() {
        let hits: Vec<(&LexEntry, Bindings)> = lexicon
            .entries
            .iter()
            .filter_map(|l| l.source.iter().find_map(|p| p.matches(&e.sign)).map(|b| (l, b)))
            .collect();
        let (entry, bindings) = match &hits[..] {
            [] => return Err(Error::Uncovered(e.sign.to_string())),
            [one] => one,
            many => {
                return Err(Error::AmbiguousCoverage {
                    sign: e.sign.to_string(),
                    lines: many.iter().map(|(l, _)| l.line).collect(),
                })
            }
        };
        if !entry.is_word_for_word() {
            return Err(Error::UnsupportedEntry(entry.line));
        }
        let sign = entry.target[0].instantiate(bindings);
        let id = target_id(&sign.orth, &mut taken);
        leaf_map.insert(e.id.clone(), id.clone());
        entries.push(BagEntry { id, sign });
    }

    let bracketing = match bracketing {
        None => None,
        Some(b) => {
            let resolved = resolve_labels(b, source)?;
            let by_label: BTreeMap<&str, &str> = resolved
                .iter()
                .map(|(label, &i)| (label.as_str(), leaf_map[&source.entries()[i].id].as_str()))
                .collect();
            Some(b.relabel(&|l| by_label[l].to_string()))
        }
    };
    Ok(Transferred {
        bag: Bag::new(entries)?,
        bracketing,
        leaf_map,
    })
}
