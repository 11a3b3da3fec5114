//! Exhaustive reference generation over bag subsets, and the two
//! monotonicity checkers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bag::Bag;
use crate::error::{Error, Result};
use crate::generator::{find_move, improvement_metric};
use crate::init::random_tncb;
use crate::signs::{CombineError, Combination, Combiner, Grammar, Sign, ViolationPolicy};
use crate::tncb::{MoveKind, Tncb};

pub const DEFAULT_LIMIT: usize = 10;

fn check_size(bag: &Bag, limit: usize) -> Result<()> {
    if bag.len() > limit {
        return Err(Error::OracleLimit {
            size: bag.len(),
            limit,
        });
    }
    Ok(())
}

/// Proper submasks of `mask` that contain its lowest bit, so every
/// unordered split is visited once.
fn splits(mask: u32) -> impl Iterator<Item = (u32, u32)> {
    let low = mask & mask.wrapping_neg();
    let rest = mask ^ low;
    let mut sub = rest;
    let mut done = false;
    std::iter::from_fn(move || loop {
        if done {
            return None;
        }
        let a = sub | low;
        if sub == 0 {
            done = true;
        } else {
            sub = (sub - 1) & rest;
        }
        if a != mask {
            return Some((a, mask ^ a));
        }
    })
}

/// Derivable signs for every subset of a bag.
#[derive(Clone, Debug)]
pub struct BagChart {
    cells: Vec<BTreeSet<Sign>>,
    combine_calls: u64,
}

impl BagChart {
    pub fn build(bag: &Bag, comb: &Combiner<'_>, limit: usize) -> Result<BagChart> {
        check_size(bag, limit)?;
        let start = comb.calls();
        let n = bag.len();
        let mut cells = vec![BTreeSet::new(); 1usize << n];
        for (i, s) in bag.signs().enumerate() {
            cells[1 << i].insert(s.clone());
        }
        for mask in 1u32..(1u32 << n) {
            if mask.count_ones() < 2 {
                continue;
            }
            let mut found = BTreeSet::new();
            for (a, b) in splits(mask) {
                if cells[a as usize].is_empty() || cells[b as usize].is_empty() {
                    continue;
                }
                for x in &cells[a as usize] {
                    for y in &cells[b as usize] {
                        if let Combination::Combined(s) = comb.combine(x, y)? {
                            found.insert(s);
                        }
                    }
                }
            }
            cells[mask as usize] = found;
        }
        Ok(BagChart {
            cells,
            combine_calls: comb.calls() - start,
        })
    }

    pub fn cell(&self, mask: u32) -> &BTreeSet<Sign> {
        &self.cells[mask as usize]
    }

    pub fn full(&self) -> &BTreeSet<Sign> {
        self.cells.last().expect("chart has at least one cell")
    }

    pub fn combine_calls(&self) -> u64 {
        self.combine_calls
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realizations {
    pub orths: BTreeSet<String>,
    pub combine_calls: u64,
}

pub fn realizations(bag: &Bag, grammar: &Grammar, policy: ViolationPolicy, limit: usize) -> Result<Realizations> {
    if bag.is_empty() {
        return Ok(Realizations {
            orths: BTreeSet::new(),
            combine_calls: 0,
        });
    }
    let comb = Combiner::new(grammar, policy);
    let chart = BagChart::build(bag, &comb, limit)?;
    Ok(Realizations {
        orths: chart.full().iter().map(|s| s.orth.clone()).collect(),
        combine_calls: chart.combine_calls(),
    })
}

/// Orthographies of every sign derivable from the whole bag.
pub fn all_realizations(bag: &Bag, grammar: &Grammar) -> Result<BTreeSet<String>> {
    realizations(bag, grammar, ViolationPolicy::Strict, DEFAULT_LIMIT).map(|r| r.orths)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Two signs combine into more than one mother.
    AmbiguousOrder {
        bag: usize,
        left: Sign,
        right: Sign,
        mothers: Vec<Sign>,
    },
    /// One analysis of each side combines, another pair over the same
    /// split does not.
    SplitDependent {
        bag: usize,
        left_ids: Vec<String>,
        right_ids: Vec<String>,
        combining: (Sign, Sign),
        failing: (Sign, Sign),
    },
    /// An adjunction at the highest admissible site left a disrupted node
    /// ill-formed.
    Dominance {
        bag: usize,
        seed: u64,
        mover: String,
        site: String,
        host: String,
        failed: Vec<String>,
        state: String,
        /// Trials on this bag that hit a violation.
        trials_hit: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AmbiguousOrder {
                bag,
                left,
                right,
                mothers,
            } => {
                write!(f, "precedence: ambiguous order (bag {bag}): {left} + {right} ->")?;
                for m in mothers {
                    write!(f, " \"{}\"", m.orth)?;
                }
                Ok(())
            }
            Violation::SplitDependent {
                bag,
                left_ids,
                right_ids,
                combining,
                failing,
            } => write!(
                f,
                "precedence: split-dependent combination (bag {bag}) over {{{}}} | {{{}}}: {} + {} combine, {} + {} do not",
                left_ids.join(","),
                right_ids.join(","),
                combining.0,
                combining.1,
                failing.0,
                failing.1
            ),
            Violation::Dominance {
                bag,
                seed,
                mover,
                site,
                host,
                failed,
                state,
                trials_hit,
            } => write!(
                f,
                "dominance (bag {bag}, seed {seed}, {trials_hit} trial(s)): adjoining \"{mover}\" at \"{site}\" inside \"{host}\" left ill-formed: {}; state {state}",
                failed.join(", ")
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub bags_checked: usize,
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: Report) {
        self.bags_checked = self.bags_checked.max(other.bags_checked);
        self.violations.extend(other.violations);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        write!(f, "{} bag(s) checked, {} violation(s)", self.bags_checked, self.violations.len())
    }
}

fn ids(bag: &Bag, mask: u32) -> Vec<String> {
    (0..bag.len())
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| bag.entries()[i].id.clone())
        .collect()
}

fn precedence_one(bag_idx: usize, bag: &Bag, grammar: &Grammar, limit: usize, out: &mut Vec<Violation>) -> Result<()> {
    check_size(bag, limit)?;
    let n = bag.len();
    let mut cells = vec![BTreeSet::<Sign>::new(); 1usize << n];
    for (i, s) in bag.signs().enumerate() {
        cells[1 << i].insert(s.clone());
    }
    let mut seen_pairs = BTreeSet::new();
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() < 2 {
            continue;
        }
        let mut found = BTreeSet::new();
        for (a, b) in splits(mask) {
            let mut combining = None;
            let mut failing = None;
            for x in &cells[a as usize] {
                for y in &cells[b as usize] {
                    let mothers: BTreeSet<Sign> = grammar
                        .attempts(x, y)
                        .map_err(Error::Combine)?
                        .into_iter()
                        .map(|at| at.mother)
                        .collect();
                    if mothers.len() > 1 && seen_pairs.insert((x.clone(), y.clone())) {
                        out.push(Violation::AmbiguousOrder {
                            bag: bag_idx,
                            left: x.clone(),
                            right: y.clone(),
                            mothers: mothers.iter().cloned().collect(),
                        });
                    }
                    if mothers.is_empty() {
                        failing.get_or_insert((x.clone(), y.clone()));
                    } else {
                        combining.get_or_insert((x.clone(), y.clone()));
                    }
                    found.extend(mothers);
                }
            }
            if let (Some(combining), Some(failing)) = (combining, failing) {
                out.push(Violation::SplitDependent {
                    bag: bag_idx,
                    left_ids: ids(bag, a),
                    right_ids: ids(bag, b),
                    combining,
                    failing,
                });
            }
        }
        cells[mask as usize] = found;
    }
    Ok(())
}

/// Every pair of constituents over disjoint subsets must combine in at most
/// one way, and whether material from one subset combines with material
/// from another must not depend on how either side was analysed.
pub fn check_precedence_monotonicity(grammar: &Grammar, bags: &[Bag], limit: usize) -> Result<Report> {
    let mut violations = Vec::new();
    for (i, bag) in bags.iter().enumerate() {
        precedence_one(i, bag, grammar, limit, &mut violations)?;
    }
    Ok(Report {
        bags_checked: bags.len(),
        violations,
    })
}

fn host_of(t: &Tncb, site: crate::tncb::NodeId) -> crate::tncb::NodeId {
    let mut top = site;
    while let Some(p) = t.parent(top) {
        if !t.value(p).is_well_formed() {
            break;
        }
        top = p;
    }
    top
}

/// Precedence violations end a dominance trial without counting against it.
fn step_result<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Err(Error::Combine(CombineError::PrecedenceViolation { .. })) => Ok(None),
        other => other.map(Some),
    }
}

/// `Ok(None)` for a clean trial. A trial also ends early, uncounted, when the
/// grammar trips a precedence violation or the metric stops rising.
fn dominance_trial(bag_idx: usize, bag: &Bag, grammar: &Grammar, seed: u64) -> Result<Option<Violation>> {
    let comb = Combiner::new(grammar, ViolationPolicy::Strict);
    let mut t = random_tncb(bag, seed)?;
    if step_result(t.evaluate(&comb).map(|_| ()))?.is_none() {
        return Ok(None);
    }
    for _ in 0..bag.len() {
        if t.value(t.root()).is_well_formed() {
            return Ok(None);
        }
        let Some(Some(step)) = step_result(find_move(&t, &comb))? else {
            return Ok(None);
        };
        let mover = t.sign(step.mover).expect("well-formed").orth.clone();
        let site = t.sign(step.destination).expect("well-formed").orth.clone();
        let host = t.sign(host_of(&t, step.destination)).expect("well-formed").orth.clone();
        let before = improvement_metric(&t);
        let Some(effect) = step_result(t.apply_move(&step, &comb))? else {
            return Ok(None);
        };
        if step_result(t.evaluate(&comb).map(|_| ()))?.is_none() {
            return Ok(None);
        }
        if step.kind == MoveKind::Adjoin {
            let failed: Vec<String> = effect
                .disrupted
                .iter()
                .filter(|&&d| !t.value(d).is_well_formed())
                .map(|&d| format!("{d}"))
                .collect();
            if !failed.is_empty() {
                return Ok(Some(Violation::Dominance {
                    bag: bag_idx,
                    seed,
                    mover,
                    site,
                    host,
                    failed,
                    state: t.render_annotated(),
                    trials_hit: 1,
                }));
            }
        }
        if improvement_metric(&t) <= before {
            return Ok(None);
        }
    }
    Ok(None)
}

/// Random-start generation runs; reports the first witness per bag.
pub fn check_dominance_monotonicity(grammar: &Grammar, bags: &[Bag], trials: usize, seed: u64) -> Result<Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::new();
    for (i, bag) in bags.iter().enumerate() {
        if bag.is_empty() {
            continue;
        }
        let mut first: Option<Violation> = None;
        let mut hits = 0;
        for _ in 0..trials {
            let trial_seed: u64 = rng.gen();
            if let Some(v) = dominance_trial(i, bag, grammar, trial_seed)? {
                hits += 1;
                first.get_or_insert(v);
            }
        }
        if let Some(Violation::Dominance { trials_hit, .. }) = first.as_mut() {
            *trials_hit = hits;
        }
        violations.extend(first);
    }
    Ok(Report {
        bags_checked: bags.len(),
        violations,
    })
}

/// Group realizations by orthography for display: orth to sign count.
pub fn orth_counts(signs: &BTreeSet<Sign>) -> BTreeMap<&str, usize> {
    let mut m = BTreeMap::new();
    for s in signs {
        *m.entry(s.orth.as_str()).or_insert(0) += 1;
    }
    m
}
