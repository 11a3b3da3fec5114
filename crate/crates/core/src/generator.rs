//! The test/rewrite cycle.
//!
//! Test: evaluate the undetermined nodes. Rewrite: scan the maximal TNCBs
//! top-down, left to right, and move the first one that can be conjoined
//! with another maximal TNCB, or failing that adjoined inside one at the
//! shallowest site. The first legal move is taken.

use serde::Serialize;

use crate::bag::Bag;
use crate::error::{Error, Result};
use crate::signs::{Combination, Combiner, Grammar, ViolationPolicy};
use crate::tncb::{MoveKind, MoveStep, NodeId, Tncb};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RewriteBound {
    /// Give up with a monotonicity diagnostic after `n - 1` rewrites.
    #[default]
    NMinus1,
    Unbounded,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GenConfig {
    pub max_rewrites: RewriteBound,
    pub violation_policy: ViolationPolicy,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success(String),
    /// Orthographies of the maximal TNCBs left at termination.
    Failure(Vec<String>),
}

impl Outcome {
    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::Success(_))
    }
}

/// One rewrite as it appears in a serialized trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub kind: MoveKind,
    pub mover_orth: String,
    pub dest_orth: String,
    pub disrupted: usize,
    /// Combine calls spent on this cycle: move search, the move itself and
    /// the re-evaluation that follows.
    pub combine_calls: u64,
}

#[derive(Clone, Debug)]
pub struct GenResult {
    pub outcome: Outcome,
    pub moves: Vec<MoveStep>,
    pub trace: Vec<TraceStep>,
    /// Total combine calls, including the initial test phase.
    pub evaluations: u64,
    pub rewrites: usize,
    pub tree: Tncb,
    /// Precedence violations let through under `FirstRuleWins`.
    pub warnings: Vec<String>,
}

impl GenResult {
    pub fn trace_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.trace).expect("trace serializes");
        s.push('\n');
        s
    }
}

/// Number of well-formed nodes; the loop's progress witness.
pub fn improvement_metric(t: &Tncb) -> usize {
    t.well_formed_count()
}

/// Well-formed nodes strictly inside `host`, grouped by depth below it.
fn levels(t: &Tncb, host: NodeId) -> Vec<Vec<NodeId>> {
    let mut out = Vec::new();
    let mut frontier: Vec<NodeId> = t.children(host).into_iter().flatten().collect();
    while !frontier.is_empty() {
        let next = frontier
            .iter()
            .flat_map(|&id| t.children(id).into_iter().flatten())
            .collect();
        out.push(std::mem::replace(&mut frontier, next));
    }
    out
}

/// The first legal move in scan order, or `None` when no pair of maximal
/// TNCBs admits one. `t` must be evaluated.
pub fn find_move(t: &Tncb, comb: &Combiner<'_>) -> Result<Option<MoveStep>> {
    let maximal = t.maximal();
    if maximal.len() < 2 {
        return Ok(None);
    }
    let sites: Vec<Vec<Vec<NodeId>>> = maximal.iter().map(|&h| levels(t, h)).collect();
    let deepest = sites.iter().map(Vec::len).max().unwrap_or(0);

    for &mover in &maximal {
        let sign = t.sign(mover).expect("maximal TNCBs are well-formed");
        for &dest in maximal.iter().filter(|&&d| d != mover) {
            let other = t.sign(dest).expect("maximal TNCBs are well-formed");
            if let Combination::Combined(_) = comb.combine(sign, other)? {
                return Ok(Some(MoveStep {
                    mover,
                    destination: dest,
                    kind: MoveKind::Conjoin,
                    disrupted: 0,
                }));
            }
        }
        // shallower sites disrupt fewer nodes and are tried first
        for depth in 0..deepest {
            for (host_idx, &host) in maximal.iter().enumerate() {
                if host == mover {
                    continue;
                }
                for &site in sites[host_idx].get(depth).into_iter().flatten() {
                    let other = t.sign(site).expect("nodes inside a maximal TNCB are well-formed");
                    if let Combination::Combined(_) = comb.combine(sign, other)? {
                        return Ok(Some(MoveStep {
                            mover,
                            destination: site,
                            kind: MoveKind::Adjoin,
                            disrupted: depth + 1,
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn check_leaves(bag: &Bag, t: &Tncb) -> Result<()> {
    t.check_invariants(bag.len()).map_err(Error::Precondition)?;
    for id in t.preorder() {
        if let Some(i) = t.leaf_index(id) {
            if t.sign(id) != Some(bag.sign(i)) {
                return Err(Error::Precondition(format!("leaf {id} does not carry bag sign {i}")));
            }
        }
    }
    Ok(())
}

pub fn generate(bag: &Bag, initial: Tncb, grammar: &Grammar, config: GenConfig) -> Result<GenResult> {
    check_leaves(bag, &initial)?;
    let comb = Combiner::new(grammar, config.violation_policy);
    let mut t = initial;
    let bound = bag.len().saturating_sub(1);
    let mut moves = Vec::new();
    let mut trace = Vec::new();

    t.evaluate(&comb)?;
    let outcome = loop {
        let root = t.root();
        if let Some(s) = t.sign(root) {
            break Outcome::Success(s.orth.clone());
        }
        let cycle_start = comb.calls();
        let Some(step) = find_move(&t, &comb)? else {
            let fragments = t.maximal().iter().map(|&m| t.sign(m).expect("well-formed").orth.clone()).collect();
            break Outcome::Failure(fragments);
        };
        if config.max_rewrites == RewriteBound::NMinus1 && moves.len() >= bound {
            return Err(Error::Monotonicity(format!(
                "no well-formed TNCB after {bound} rewrites for {} signs; state {}",
                bag.len(),
                t.render_annotated()
            )));
        }
        let mover_orth = t.sign(step.mover).expect("well-formed").orth.clone();
        let dest_orth = t.sign(step.destination).expect("well-formed").orth.clone();
        let before = improvement_metric(&t);
        t.apply_move(&step, &comb)?;
        t.evaluate(&comb)?;
        let after = improvement_metric(&t);
        moves.push(step);
        trace.push(TraceStep {
            step: moves.len(),
            kind: step.kind,
            mover_orth,
            dest_orth,
            disrupted: step.disrupted,
            combine_calls: comb.calls() - cycle_start,
        });
        if after <= before {
            return Err(Error::Monotonicity(format!(
                "rewrite {} ({:?} `{}` to `{}`) left {after} well-formed nodes, had {before}; state {}",
                moves.len(),
                step.kind,
                trace.last().map_or("", |s| s.mover_orth.as_str()),
                trace.last().map_or("", |s| s.dest_orth.as_str()),
                t.render_annotated()
            )));
        }
    };

    Ok(GenResult {
        outcome,
        rewrites: moves.len(),
        moves,
        trace,
        evaluations: comb.calls(),
        tree: t,
        warnings: comb.take_warnings().iter().map(ToString::to_string).collect(),
    })
}
