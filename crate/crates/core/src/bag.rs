//! Bags of ground signs and their JSON file format.
//!
//! ```json
//! [{"id": "dog", "cat": "N", "orth": "dog", "feats": {"idx": 1, "case": "nom"}}]
//! ```
//!
//! Integer feature values are indices, strings are atoms.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signs::{Atom, FeatureValue, Sign};

/// A bag element: a ground sign with a stable identifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BagEntry {
    pub id: String,
    pub sign: Sign,
}

/// Multiset of signs. Order is the input order, which only matters for
/// initializers that need one (the right-branching comb, trace output).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bag {
    entries: Vec<BagEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonValue {
    Index(u32),
    Atom(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonEntry {
    id: String,
    cat: String,
    orth: String,
    #[serde(default)]
    feats: BTreeMap<String, JsonValue>,
}

impl Bag {
    pub fn new(entries: Vec<BagEntry>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &entries {
            if e.id.is_empty() || e.id.contains(|c: char| c.is_whitespace() || c == '(' || c == ')') {
                return Err(Error::Bag(format!("invalid leaf id `{}`", e.id)));
            }
            if !seen.insert(e.id.as_str()) {
                return Err(Error::Bag(format!("duplicate leaf id `{}`", e.id)));
            }
            if e.sign.orth.is_empty() {
                return Err(Error::Bag(format!("leaf `{}` has an empty orthography", e.id)));
            }
        }
        Ok(Bag { entries })
    }

    /// Bag from signs, using `w0`, `w1`, ... as ids.
    pub fn from_signs(signs: impl IntoIterator<Item = Sign>) -> Self {
        let entries = signs
            .into_iter()
            .enumerate()
            .map(|(i, sign)| BagEntry {
                id: format!("w{i}"),
                sign,
            })
            .collect();
        Bag { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[BagEntry] {
        &self.entries
    }

    pub fn sign(&self, leaf: usize) -> &Sign {
        &self.entries[leaf].sign
    }

    pub fn signs(&self) -> impl Iterator<Item = &Sign> {
        self.entries.iter().map(|e| &e.sign)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.id == id)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Vec<JsonEntry> = serde_json::from_str(text)?;
        let mut entries = Vec::with_capacity(raw.len());
        for e in raw {
            let feats = e
                .feats
                .into_iter()
                .map(|(k, v)| {
                    let v = match v {
                        JsonValue::Index(i) => FeatureValue::Index(i),
                        JsonValue::Atom(a) => FeatureValue::Const(Atom::new(a)?),
                    };
                    Ok((Atom::new(k)?, v))
                })
                .collect::<Result<_>>()?;
            let cat = Atom::new(e.cat)?;
            entries.push(BagEntry {
                id: e.id,
                sign: Sign::new(cat, e.orth, feats),
            });
        }
        Bag::new(entries)
    }

    pub fn to_json(&self) -> String {
        let raw: Vec<JsonEntry> = self
            .entries
            .iter()
            .map(|e| JsonEntry {
                id: e.id.clone(),
                cat: e.sign.cat.to_string(),
                orth: e.sign.orth.clone(),
                feats: e
                    .sign
                    .feats
                    .iter()
                    .map(|(k, v)| {
                        let v = match v {
                            FeatureValue::Index(i) => JsonValue::Index(*i),
                            FeatureValue::Const(a) => JsonValue::Atom(a.to_string()),
                        };
                        (k.to_string(), v)
                    })
                    .collect(),
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&raw).expect("bag serializes");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::dog_bag;

    #[test]
    fn reads_fixture_bag() {
        let bag = dog_bag();
        assert_eq!(bag.len(), 6);
        assert_eq!(bag.sign(0).orth, "PAST");
        assert_eq!(bag.position("brown"), Some(4));
        assert_eq!(bag.sign(1).feat("next"), Some(&FeatureValue::Index(0)));
    }

    #[test]
    fn json_round_trip() {
        let bag = dog_bag();
        assert_eq!(Bag::from_json(&bag.to_json()).unwrap(), bag);
    }

    #[test]
    fn rejects_duplicate_ids_and_bad_values() {
        let dup = r#"[{"id":"a","cat":"N","orth":"x"},{"id":"a","cat":"N","orth":"y"}]"#;
        assert!(Bag::from_json(dup).is_err());
        let neg = r#"[{"id":"a","cat":"N","orth":"x","feats":{"idx":-1}}]"#;
        assert!(Bag::from_json(neg).is_err());
        let empty_cat = r#"[{"id":"a","cat":"","orth":"x"}]"#;
        assert!(Bag::from_json(empty_cat).is_err());
    }
}
