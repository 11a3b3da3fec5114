//! Ground signs, rule templates, unification and commutative combination.
//!
//! Feature bundles are flat maps from feature names to atoms or integer
//! indices. Rules are binary; a rule's left daughter always precedes its
//! right daughter in the mother's orthography, and [`Grammar::combine`]
//! tries both orientations so callers never have to care about order.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{Error, Result};

/// A case-sensitive symbol without whitespace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Atom(pub(crate) String);

impl Atom {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidAtom(name));
        }
        Ok(Atom(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Atom {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Atom::new(s)
    }
}

impl From<Atom> for String {
    fn from(a: Atom) -> String {
        a.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ground feature value: an atomic constant or a semantic index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureValue {
    Const(Atom),
    Index(u32),
}

impl FeatureValue {
    pub fn index(&self) -> Option<u32> {
        match self {
            FeatureValue::Index(i) => Some(*i),
            FeatureValue::Const(_) => None,
        }
    }
}

impl fmt::Display for FeatureValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureValue::Const(a) => write!(f, "{a}"),
            FeatureValue::Index(i) => write!(f, "{i}"),
        }
    }
}

pub type Features = BTreeMap<Atom, FeatureValue>;

/// A ground sign. Variables are not representable here, so every `Sign`
/// is ground by construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sign {
    pub cat: Atom,
    pub orth: String,
    pub feats: Features,
}

impl Sign {
    pub fn new(cat: Atom, orth: impl Into<String>, feats: Features) -> Self {
        Sign {
            cat,
            orth: orth.into(),
            feats,
        }
    }

    pub fn feat(&self, name: &str) -> Option<&FeatureValue> {
        self.feats.iter().find(|(k, _)| k.as_str() == name).map(|(_, v)| v)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}", self.orth, self.cat)?;
        for (k, v) in &self.feats {
            write!(f, ",{k}={v}")?;
        }
        f.write_str("]")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub String);

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Value(FeatureValue),
    Var(Var),
}

/// One feature constraint in a template. An `optional` slot is satisfied by
/// a candidate that lacks the feature altogether.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub term: Term,
    pub optional: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignTemplate {
    pub cat: Atom,
    pub feats: BTreeMap<Atom, Slot>,
}

impl SignTemplate {
    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.feats.values().filter_map(|s| match &s.term {
            Term::Var(v) => Some(v),
            Term::Value(_) => None,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bindings(BTreeMap<Var, FeatureValue>);

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, var: &Var) -> Option<&FeatureValue> {
        self.0.get(var)
    }

    pub fn insert(&mut self, var: Var, value: FeatureValue) {
        self.0.insert(var, value);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &FeatureValue)> {
        self.0.iter()
    }
}

/// Unify a template with a ground candidate, extending `bindings`.
/// Returns `None` on failure; the input bindings are never modified.
pub fn unify(template: &SignTemplate, candidate: &Sign, bindings: &Bindings) -> Option<Bindings> {
    if template.cat != candidate.cat {
        return None;
    }
    let mut out = bindings.clone();
    for (name, slot) in &template.feats {
        let Some(value) = candidate.feats.get(name) else {
            if slot.optional {
                continue;
            }
            return None;
        };
        match &slot.term {
            Term::Value(c) => {
                if c != value {
                    return None;
                }
            }
            Term::Var(v) => match out.get(v) {
                Some(bound) if bound != value => return None,
                Some(_) => {}
                None => out.insert(v.clone(), value.clone()),
            },
        }
    }
    Some(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl fmt::Display for CmpOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operand {
    Var(Var),
    Int(i64),
}

/// `lhs op rhs + offset` over bound variables. An `=` whose left side is
/// still unbound binds it instead of testing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub lhs: Var,
    pub op: CmpOp,
    pub rhs: Operand,
    pub offset: i64,
}

impl Constraint {
    fn apply(&self, bindings: &mut Bindings) -> bool {
        let rhs = match &self.rhs {
            Operand::Int(i) => Some(*i),
            Operand::Var(v) => match bindings.get(v).cloned() {
                Some(FeatureValue::Index(i)) => Some(i64::from(i)),
                Some(FeatureValue::Const(a)) => {
                    // atoms only support (in)equality without an offset
                    if self.offset != 0 {
                        return false;
                    }
                    let lhs = bindings.get(&self.lhs);
                    return match (self.op, lhs) {
                        (CmpOp::Eq, None) => {
                            let a = FeatureValue::Const(a.clone());
                            bindings.insert(self.lhs.clone(), a);
                            true
                        }
                        (CmpOp::Eq, Some(l)) => *l == FeatureValue::Const(a.clone()),
                        (CmpOp::Ne, Some(l)) => *l != FeatureValue::Const(a.clone()),
                        _ => false,
                    };
                }
                None => None,
            },
        };
        let Some(rhs) = rhs.map(|r| r + self.offset) else {
            return false;
        };
        match bindings.get(&self.lhs) {
            None if self.op == CmpOp::Eq => match u32::try_from(rhs) {
                Ok(v) => {
                    bindings.insert(self.lhs.clone(), FeatureValue::Index(v));
                    true
                }
                Err(_) => false,
            },
            None | Some(FeatureValue::Const(_)) => false,
            Some(FeatureValue::Index(l)) => {
                let l = i64::from(*l);
                match self.op {
                    CmpOp::Eq => l == rhs,
                    CmpOp::Ne => l != rhs,
                    CmpOp::Lt => l < rhs,
                    CmpOp::Le => l <= rhs,
                    CmpOp::Gt => l > rhs,
                    CmpOp::Ge => l >= rhs,
                }
            }
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ", self.lhs, self.op)?;
        match &self.rhs {
            Operand::Var(v) => write!(f, "{v}")?,
            Operand::Int(i) => write!(f, "{i}")?,
        }
        match self.offset {
            0 => Ok(()),
            o if o > 0 => write!(f, " + {o}"),
            o => write!(f, " - {}", -o),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrthMode {
    Concat,
    Fuse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: Atom,
    pub mother: SignTemplate,
    pub left: SignTemplate,
    pub right: SignTemplate,
    pub orth_mode: OrthMode,
    pub constraints: Vec<Constraint>,
}

impl Rule {
    /// Apply the rule with `left` and `right` in that linear order.
    pub fn apply(&self, left: &Sign, right: &Sign, morph: &MorphTable) -> Result<Option<Sign>, CombineError> {
        let Some(b) = unify(&self.left, left, &Bindings::new()) else {
            return Ok(None);
        };
        let Some(mut b) = unify(&self.right, right, &b) else {
            return Ok(None);
        };
        if !self.constraints.iter().all(|c| c.apply(&mut b)) {
            return Ok(None);
        }
        let mut feats = Features::new();
        for (name, slot) in &self.mother.feats {
            match &slot.term {
                Term::Value(v) => {
                    feats.insert(name.clone(), v.clone());
                }
                Term::Var(v) => {
                    // unbound only when every occurrence was an absent optional slot
                    if let Some(val) = b.get(v) {
                        feats.insert(name.clone(), val.clone());
                    }
                }
            }
        }
        let orth = match self.orth_mode {
            OrthMode::Concat => format!("{} {}", left.orth, right.orth),
            OrthMode::Fuse => morph
                .fuse(&left.orth, &right.orth)
                .ok_or_else(|| CombineError::MissingMorph {
                    rule: self.name.to_string(),
                    left: left.orth.clone(),
                    right: right.orth.clone(),
                })?
                .to_string(),
        };
        Ok(Some(Sign::new(self.mother.cat.clone(), orth, feats)))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MorphTable(BTreeMap<(String, String), String>);

impl MorphTable {
    pub fn insert(&mut self, left: impl Into<String>, right: impl Into<String>, fused: impl Into<String>) {
        self.0.insert((left.into(), right.into()), fused.into());
    }

    pub fn fuse(&self, left: &str, right: &str) -> Option<&str> {
        self.0.get(&(left.to_string(), right.to_string())).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CombineError {
    #[error("precedence violation: `{left}` + `{right}` yield distinct mothers {mothers:?}")]
    PrecedenceViolation {
        left: String,
        right: String,
        mothers: Vec<String>,
    },
    #[error("rule `{rule}` fuses `{left}` + `{right}` but the morph table has no entry")]
    MissingMorph {
        rule: String,
        left: String,
        right: String,
    },
}

/// How `combine` treats a pair that yields more than one distinct mother.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationPolicy {
    #[default]
    Strict,
    FirstRuleWins,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Combination {
    Combined(Sign),
    NoRule,
}

impl Combination {
    pub fn sign(self) -> Option<Sign> {
        match self {
            Combination::Combined(s) => Some(s),
            Combination::NoRule => None,
        }
    }
}

/// A successful rule application found by [`Grammar::attempts`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attempt {
    pub rule: usize,
    pub mother: Sign,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Grammar {
    pub rules: Vec<Rule>,
    pub morph: MorphTable,
    pub features: BTreeSet<Atom>,
}

impl Grammar {
    /// Every successful application of every rule to the pair, in both
    /// linear orders. Attempt order is fixed by rule order and by the
    /// `Ord` of the two signs, so it does not depend on argument order.
    pub fn attempts(&self, a: &Sign, b: &Sign) -> Result<Vec<Attempt>, CombineError> {
        let (x, y) = if a <= b { (a, b) } else { (b, a) };
        let mut out = Vec::new();
        for (i, rule) in self.rules.iter().enumerate() {
            for (l, r) in [(x, y), (y, x)] {
                if let Some(mother) = rule.apply(l, r, &self.morph)? {
                    out.push(Attempt { rule: i, mother });
                }
            }
        }
        Ok(out)
    }

    pub fn combine(&self, a: &Sign, b: &Sign) -> Result<Combination, CombineError> {
        self.combine_with(a, b, ViolationPolicy::Strict)
    }

    pub fn combine_with(&self, a: &Sign, b: &Sign, policy: ViolationPolicy) -> Result<Combination, CombineError> {
        let attempts = self.attempts(a, b)?;
        let Some(first) = attempts.first() else {
            return Ok(Combination::NoRule);
        };
        let distinct: BTreeSet<&Sign> = attempts.iter().map(|a| &a.mother).collect();
        if distinct.len() > 1 && policy == ViolationPolicy::Strict {
            return Err(CombineError::PrecedenceViolation {
                left: a.orth.clone(),
                right: b.orth.clone(),
                mothers: distinct.iter().map(|s| s.orth.clone()).collect(),
            });
        }
        Ok(Combination::Combined(first.mother.clone()))
    }
}

/// Per-run front end to [`Grammar::combine_with`] that counts calls and,
/// under [`ViolationPolicy::FirstRuleWins`], records the violations it let
/// through.
#[derive(Debug)]
pub struct Combiner<'g> {
    grammar: &'g Grammar,
    policy: ViolationPolicy,
    calls: Cell<u64>,
    warnings: RefCell<Vec<CombineError>>,
}

impl<'g> Combiner<'g> {
    pub fn new(grammar: &'g Grammar, policy: ViolationPolicy) -> Self {
        Combiner {
            grammar,
            policy,
            calls: Cell::new(0),
            warnings: RefCell::new(Vec::new()),
        }
    }

    pub fn grammar(&self) -> &'g Grammar {
        self.grammar
    }

    pub fn policy(&self) -> ViolationPolicy {
        self.policy
    }

    pub fn calls(&self) -> u64 {
        self.calls.get()
    }

    pub fn combine(&self, a: &Sign, b: &Sign) -> Result<Combination, CombineError> {
        self.calls.set(self.calls.get() + 1);
        match self.grammar.combine(a, b) {
            Err(e @ CombineError::PrecedenceViolation { .. }) if self.policy == ViolationPolicy::FirstRuleWins => {
                self.warnings.borrow_mut().push(e);
                self.grammar.combine_with(a, b, ViolationPolicy::FirstRuleWins)
            }
            other => other,
        }
    }

    pub fn take_warnings(&self) -> Vec<CombineError> {
        std::mem::take(&mut self.warnings.borrow_mut())
    }
}
