//! Shared fixtures for unit tests.

use crate::bag::{Bag, BagEntry};
use crate::grammar_file::parse_grammar;
use crate::signs::{Atom, FeatureValue, Grammar, Sign};
use crate::tncb::{NodeId, Tncb};

pub const FIXTURE_GRAMMAR: &str = include_str!("../fixtures/english.grammar");
pub const DOG_BAG: &str = include_str!("../fixtures/dog.bag.json");

pub fn fixture_grammar() -> Grammar {
    parse_grammar(FIXTURE_GRAMMAR).unwrap()
}

pub fn dog_bag() -> Bag {
    Bag::from_json(DOG_BAG).unwrap()
}

pub fn sign(cat: &str, orth: &str, feats: &[(&str, u32)]) -> Sign {
    Sign::new(
        Atom::new(cat).unwrap(),
        orth,
        feats
            .iter()
            .map(|(k, v)| (Atom::new(*k).unwrap(), FeatureValue::Index(*v)))
            .collect(),
    )
}

/// English lexical signs sharing index 1 for the nominal and 2 for the event.
pub fn english(orth: &str) -> Sign {
    match orth {
        "PAST" => sign("TNS", "PAST", &[("ev", 2)]),
        "dog" | "book" => sign("N", orth, &[("idx", 1), ("next", 0), ("mods", 0)]),
        "bark" => sign("V", "bark", &[("ev", 2), ("subj", 1)]),
        "barked" => sign("VP", "barked", &[("ev", 2), ("subj", 1)]),
        "the" => sign("DET", "the", &[("spec", 1)]),
        "brown" => sign("ADJ", "brown", &[("mod", 1), ("rank", 1)]),
        "big" => sign("ADJ", "big", &[("mod", 1), ("rank", 2)]),
        "red" => sign("PRED", "red", &[("subj", 1)]),
        "is" => sign("COP", "is", &[("ev", 2)]),
        other => panic!("no fixture sign for `{other}`"),
    }
}

pub fn english_bag(orths: &[&str]) -> Bag {
    Bag::from_signs(orths.iter().map(|o| english(o)))
}

pub fn sub(bag: &Bag, keep: &[usize]) -> Bag {
    let entries: Vec<BagEntry> = keep.iter().map(|&i| bag.entries()[i].clone()).collect();
    Bag::new(entries).unwrap()
}

pub fn leaf_named(t: &Tncb, orth: &str) -> NodeId {
    t.preorder()
        .into_iter()
        .find(|&id| t.is_leaf(id) && t.sign(id).is_some_and(|s| s.orth == orth))
        .unwrap_or_else(|| panic!("no leaf `{orth}`"))
}
