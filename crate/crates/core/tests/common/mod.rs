#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tncb::signs::{Combination, Combiner};
use tncb::{Atom, Bag, FeatureValue, Grammar, MoveKind, MoveStep, NodeId, Sign, Tncb, Value, ViolationPolicy};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

pub fn grammar(name: &str) -> Grammar {
    tncb::parse_grammar(&read_fixture(name)).unwrap()
}

pub fn english() -> Grammar {
    grammar("english.grammar")
}

pub fn bag(name: &str) -> Bag {
    Bag::from_json(&read_fixture(name)).unwrap()
}

fn sign(cat: &str, orth: &str, feats: &[(&str, u32)]) -> Sign {
    let feats = feats
        .iter()
        .map(|&(k, v)| (Atom::new(k).unwrap(), FeatureValue::Index(v)))
        .collect();
    Sign::new(Atom::new(cat).unwrap(), orth, feats)
}

/// Words of the fixture English grammar, all about one dog-or-book event.
pub fn pool() -> Vec<Sign> {
    vec![
        sign("DET", "the", &[("spec", 1)]),
        sign("N", "dog", &[("idx", 1), ("next", 0), ("mods", 0)]),
        sign("N", "book", &[("idx", 1), ("next", 0), ("mods", 0)]),
        sign("ADJ", "brown", &[("mod", 1), ("rank", 1)]),
        sign("ADJ", "big", &[("mod", 1), ("rank", 2)]),
        sign("ADJ", "old", &[("mod", 1), ("rank", 3)]),
        sign("V", "bark", &[("ev", 2), ("subj", 1)]),
        sign("TNS", "PAST", &[("ev", 2)]),
        sign("VP", "barked", &[("ev", 2), ("subj", 1)]),
        sign("PRED", "red", &[("subj", 1)]),
        sign("COP", "is", &[("ev", 2)]),
    ]
}

/// Indices into [`pool`] of two coherent bags, each role filled once:
/// `the old big brown dog barked` and `the big book is red`.
pub const COHERENT: [&[usize]; 2] = [&[7, 1, 6, 0, 3, 4, 5], &[2, 0, 9, 10, 4]];

/// Sub-bag of a coherent bag selected by the bits of `mask`; at least two
/// signs.
pub fn coherent_bag(which: usize, mask: u32) -> Bag {
    let base = COHERENT[which % 2];
    let mut picks: Vec<usize> = (0..base.len())
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| base[i])
        .collect();
    for &i in base {
        if picks.len() >= 2 {
            break;
        }
        if !picks.contains(&i) {
            picks.push(i);
        }
    }
    bag_from_picks(&picks)
}

pub fn bag_from_picks(picks: &[usize]) -> Bag {
    let pool = pool();
    Bag::from_signs(picks.iter().map(|&i| pool[i % pool.len()].clone()))
}

pub fn random_bag(rng: &mut impl Rng, size: usize) -> Bag {
    let picks: Vec<usize> = (0..size).map(|_| rng.gen_range(0..pool().len())).collect();
    bag_from_picks(&picks)
}

/// Every legal move from an evaluated tree, in no particular order.
pub fn legal_moves(t: &Tncb, comb: &Combiner<'_>) -> Vec<MoveStep> {
    let maximal = t.maximal();
    let mut out = Vec::new();
    for &m in &maximal {
        let a = t.sign(m).unwrap();
        for &h in maximal.iter().filter(|&&h| h != m) {
            if let Ok(Combination::Combined(_)) = comb.combine(a, t.sign(h).unwrap()) {
                out.push(MoveStep {
                    mover: m,
                    destination: h,
                    kind: MoveKind::Conjoin,
                    disrupted: 0,
                });
            }
            for site in t.preorder_from(h).into_iter().filter(|&s| s != h) {
                if let Ok(Combination::Combined(_)) = comb.combine(a, t.sign(site).unwrap()) {
                    out.push(MoveStep {
                        mover: m,
                        destination: site,
                        kind: MoveKind::Adjoin,
                        disrupted: depth_below(t, site, h),
                    });
                }
            }
        }
    }
    out
}

fn depth_below(t: &Tncb, mut node: NodeId, top: NodeId) -> usize {
    let mut d = 0;
    while node != top {
        node = t.parent(node).unwrap();
        d += 1;
    }
    d
}

/// After evaluation: nothing undetermined, leaves well-formed, interior
/// values agree with a fresh combination of their children.
pub fn tags_sound(t: &Tncb, comb: &Combiner<'_>) -> Result<(), String> {
    for id in t.preorder() {
        let v = t.value(id);
        match t.children(id) {
            None if !v.is_well_formed() => return Err(format!("leaf {id} is {v}")),
            None => {}
            Some([a, b]) => {
                let expect = match (t.sign(a), t.sign(b)) {
                    (Some(x), Some(y)) => match comb.combine(x, y).map_err(|e| e.to_string())? {
                        Combination::Combined(s) => Value::WellFormed(s),
                        Combination::NoRule => Value::Inconsistent,
                    },
                    _ => Value::Inconsistent,
                };
                if *v != expect {
                    return Err(format!("{id} is {v}, expected {expect} in {}", t.render_annotated()));
                }
            }
        }
    }
    Ok(())
}

fn sorted_leaves(t: &Tncb) -> Vec<usize> {
    let mut l = t.leaves();
    l.sort_unstable();
    l
}

/// Apply `choices.len()` random operations (move, child swap, full
/// re-evaluation) to a random tree over `bag`, checking the structural
/// invariants after each. Returns the number of operations performed.
pub fn run_ops(g: &Grammar, bag: &Bag, seed: u64, choices: &[(u8, u32)]) -> Result<usize, String> {
    let comb = Combiner::new(g, ViolationPolicy::FirstRuleWins);
    let mut t = tncb::random_tncb(bag, seed).map_err(|e| e.to_string())?;
    t.evaluate(&comb).map_err(|e| e.to_string())?;
    let expected_leaves: Vec<usize> = (0..bag.len()).collect();
    let mut done = 0;
    for &(kind, pick) in choices {
        let nodes = t.node_count();
        match kind % 3 {
            0 => {
                let moves = legal_moves(&t, &comb);
                if !moves.is_empty() {
                    let step = moves[pick as usize % moves.len()];
                    t.apply_move(&step, &comb).map_err(|e| format!("{step:?}: {e}"))?;
                    if t.node_count() != nodes {
                        return Err(format!("move changed node count {nodes} -> {}", t.node_count()));
                    }
                    t.evaluate(&comb).map_err(|e| e.to_string())?;
                }
            }
            1 => {
                let order = t.preorder();
                let id = order[pick as usize % order.len()];
                let before = t.clone();
                t.swap_children(id);
                let mut fresh = t.clone();
                fresh.reset();
                fresh.evaluate(&comb).map_err(|e| e.to_string())?;
                for n in before.preorder() {
                    if before.value(n) != fresh.value(n) {
                        return Err(format!("swap at {id} changed {n}: {} vs {}", before.value(n), fresh.value(n)));
                    }
                }
            }
            _ => {
                t.reset();
                t.evaluate(&comb).map_err(|e| e.to_string())?;
            }
        }
        t.check_invariants(bag.len())?;
        if sorted_leaves(&t) != expected_leaves {
            return Err(format!("leaf multiset changed: {:?}", t.leaves()));
        }
        tags_sound(&t, &comb)?;
        done += 1;
    }
    Ok(done)
}

/// Seeded driver over random bags; stops at the first failure.
pub fn random_op_campaign(seed: u64, total_ops: usize) -> Result<usize, String> {
    let g = english();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < total_ops {
        let size = rng.gen_range(2..=8);
        let bag = random_bag(&mut rng, size);
        let choices: Vec<(u8, u32)> = (0..25).map(|_| (rng.gen(), rng.gen())).collect();
        done += run_ops(&g, &bag, rng.gen(), &choices)?;
    }
    Ok(done)
}
