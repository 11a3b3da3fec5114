//! Normalised commutative bracketings: binary derivation trees with
//! unordered children, stored in an arena with stable node ids.
//!
//! Children are unordered for evaluation purposes, but each pair keeps its
//! two child slots in creation order so that traversals are reproducible.
//! A move frees exactly one node (the parent of the deleted subtree) and
//! reuses that slot for the node it creates, so node ids and the arena size
//! never change across moves.

use std::fmt;

use serde::Serialize;

use crate::bag::Bag;
use crate::error::{Error, Result};
use crate::signs::{Combination, Combiner, Sign};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    WellFormed(Sign),
    Inconsistent,
    Undetermined,
}

impl Value {
    pub fn is_well_formed(&self) -> bool {
        matches!(self, Value::WellFormed(_))
    }

    pub fn sign(&self) -> Option<&Sign> {
        match self {
            Value::WellFormed(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::WellFormed(s) => f.write_str(&s.orth),
            Value::Inconsistent => f.write_str("INCONSISTENT"),
            Value::Undetermined => f.write_str("UNDETERMINED"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Content {
    /// Index into the bag the tree was built from.
    Leaf(usize),
    Pair([NodeId; 2]),
    /// Freed by a deletion, waiting to be reused.
    Vacant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    value: Value,
    content: Content,
    parent: Option<NodeId>,
}

/// Tree shape over bag leaf indices, with child order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shape {
    Leaf(usize),
    Pair(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn pair(a: Shape, b: Shape) -> Shape {
        Shape::Pair(Box::new(a), Box::new(b))
    }

    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Shape::Leaf(i) => out.push(*i),
            Shape::Pair(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    /// Representative of the commutative equivalence class: children
    /// sorted recursively.
    pub fn canonical(&self) -> Shape {
        match self {
            Shape::Leaf(i) => Shape::Leaf(*i),
            Shape::Pair(a, b) => {
                let (a, b) = (a.canonical(), b.canonical());
                if a <= b {
                    Shape::pair(a, b)
                } else {
                    Shape::pair(b, a)
                }
            }
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Leaf(i) => write!(f, "{i}"),
            Shape::Pair(a, b) => write!(f, "({a} {b})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Conjoin,
    Adjoin,
}

/// A planned move of the maximal TNCB `mover` next to `destination`.
/// `disrupted` is the number of well-formed nodes above the destination
/// inside its maximal TNCB, zero exactly for conjunctions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MoveStep {
    pub mover: NodeId,
    pub destination: NodeId,
    pub kind: MoveKind,
    pub disrupted: usize,
}

/// A subtree detached by [`Tncb::delete`], to be reattached by
/// [`Tncb::conjoin`] or [`Tncb::adjoin`].
#[derive(Debug, PartialEq, Eq)]
#[must_use = "a detached subtree must be reattached"]
pub struct Detached {
    root: NodeId,
}

impl Detached {
    pub fn root(&self) -> NodeId {
        self.root
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Evaluation {
    pub combine_calls: u64,
    /// Nodes that were undetermined and received a value, bottom-up.
    pub recomputed: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveEffect {
    pub new_node: NodeId,
    /// Well-formed nodes above the new node that the move marked
    /// undetermined (empty for a conjunction).
    pub disrupted: Vec<NodeId>,
    pub combine_calls: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tncb {
    nodes: Vec<Node>,
    root: NodeId,
    free: Option<NodeId>,
}

impl Tncb {
    /// Single well-formed leaf.
    pub fn leaf(sign: Sign) -> Tncb {
        Tncb {
            nodes: vec![Node {
                value: Value::WellFormed(sign),
                content: Content::Leaf(0),
                parent: None,
            }],
            root: NodeId(0),
            free: None,
        }
    }

    /// Build a tree of the given shape over `bag`; interior nodes start
    /// undetermined. Every bag leaf must appear exactly once.
    pub fn from_shape(shape: &Shape, bag: &Bag) -> Result<Tncb> {
        let mut leaves = shape.leaves();
        leaves.sort_unstable();
        if leaves != (0..bag.len()).collect::<Vec<_>>() {
            return Err(Error::Precondition(format!(
                "shape {shape} does not cover the {} bag leaves exactly once",
                bag.len()
            )));
        }
        let mut t = Tncb {
            nodes: Vec::with_capacity(2 * bag.len()),
            root: NodeId(0),
            free: None,
        };
        t.root = t.build(shape, bag);
        Ok(t)
    }

    fn build(&mut self, shape: &Shape, bag: &Bag) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        match shape {
            Shape::Leaf(i) => self.nodes.push(Node {
                value: Value::WellFormed(bag.sign(*i).clone()),
                content: Content::Leaf(*i),
                parent: None,
            }),
            Shape::Pair(a, b) => {
                self.nodes.push(Node {
                    value: Value::Undetermined,
                    content: Content::Vacant,
                    parent: None,
                });
                let a = self.build(a, bag);
                let b = self.build(b, bag);
                self.nodes[a.index()].parent = Some(id);
                self.nodes[b.index()].parent = Some(id);
                self.nodes[id.index()].content = Content::Pair([a, b]);
            }
        }
        id
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn value(&self, id: NodeId) -> &Value {
        &self.nodes[id.index()].value
    }

    pub fn sign(&self, id: NodeId) -> Option<&Sign> {
        self.value(id).sign()
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.index()].parent
    }

    pub fn children(&self, id: NodeId) -> Option<[NodeId; 2]> {
        match self.nodes[id.index()].content {
            Content::Pair(c) => Some(c),
            _ => None,
        }
    }

    pub fn leaf_index(&self, id: NodeId) -> Option<usize> {
        match self.nodes[id.index()].content {
            Content::Leaf(i) => Some(i),
            _ => None,
        }
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.leaf_index(id).is_some()
    }

    fn is_maximal(&self, id: NodeId) -> bool {
        self.value(id).is_well_formed() && self.parent(id).is_none_or(|p| !self.value(p).is_well_formed())
    }

    /// Nodes reachable from the root, top-down with child slots in order.
    pub fn preorder(&self) -> Vec<NodeId> {
        self.preorder_from(self.root)
    }

    pub fn preorder_from(&self, top: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![top];
        while let Some(id) = stack.pop() {
            out.push(id);
            if let Some([a, b]) = self.children(id) {
                stack.push(b);
                stack.push(a);
            }
        }
        out
    }

    pub fn node_count(&self) -> usize {
        self.preorder().len()
    }

    pub fn leaf_count(&self) -> usize {
        self.preorder().into_iter().filter(|&id| self.is_leaf(id)).count()
    }

    pub fn interior_count(&self) -> usize {
        self.node_count() - self.leaf_count()
    }

    /// Bag indices of the leaves in traversal order.
    pub fn leaves(&self) -> Vec<usize> {
        self.preorder().into_iter().filter_map(|id| self.leaf_index(id)).collect()
    }

    pub fn shape(&self) -> Shape {
        self.shape_at(self.root)
    }

    pub fn shape_at(&self, id: NodeId) -> Shape {
        match self.nodes[id.index()].content {
            Content::Leaf(i) => Shape::Leaf(i),
            Content::Pair([a, b]) => Shape::pair(self.shape_at(a), self.shape_at(b)),
            Content::Vacant => unreachable!("vacant node {id} reachable from the root"),
        }
    }

    pub fn undetermined(&self) -> Vec<NodeId> {
        self.preorder()
            .into_iter()
            .filter(|&id| *self.value(id) == Value::Undetermined)
            .collect()
    }

    /// Count of well-formed nodes; strictly increases across accepted moves
    /// under a monotonic grammar.
    pub fn well_formed_count(&self) -> usize {
        self.preorder()
            .into_iter()
            .filter(|&id| self.value(id).is_well_formed())
            .count()
    }

    /// Swap the two child slots of `id`. Evaluation is insensitive to this.
    pub fn swap_children(&mut self, id: NodeId) {
        if let Content::Pair(c) = &mut self.nodes[id.index()].content {
            c.swap(0, 1);
        }
    }

    /// Mark every interior node undetermined.
    pub fn reset(&mut self) {
        for id in self.preorder() {
            if !self.is_leaf(id) {
                self.nodes[id.index()].value = Value::Undetermined;
            }
        }
    }

    /// Fill every undetermined node bottom-up. Determined nodes are left
    /// alone; a node is well-formed iff both children are and they combine.
    pub fn evaluate(&mut self, comb: &Combiner<'_>) -> Result<Evaluation> {
        let start = comb.calls();
        // post-order over the undetermined region
        let mut order = Vec::new();
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if *self.value(id) != Value::Undetermined {
                continue;
            }
            match (expanded, self.children(id)) {
                (false, Some([a, b])) => {
                    stack.push((id, true));
                    stack.push((b, false));
                    stack.push((a, false));
                }
                _ => order.push(id),
            }
        }
        for &id in &order {
            let value = match self.children(id) {
                Some([a, b]) => match (self.value(a), self.value(b)) {
                    (Value::WellFormed(x), Value::WellFormed(y)) => match comb.combine(x, y)? {
                        Combination::Combined(s) => Value::WellFormed(s),
                        Combination::NoRule => Value::Inconsistent,
                    },
                    _ => Value::Inconsistent,
                },
                None => unreachable!("leaves are never undetermined"),
            };
            self.nodes[id.index()].value = value;
        }
        Ok(Evaluation {
            combine_calls: comb.calls() - start,
            recomputed: order,
        })
    }

    /// Largest well-formed components, top-down and left to right.
    pub fn maximal(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            if self.value(id).is_well_formed() {
                out.push(id);
            } else if let Some([a, b]) = self.children(id) {
                stack.push(b);
                stack.push(a);
            }
        }
        out
    }

    fn mark_ancestors_undetermined(&mut self, from: Option<NodeId>) -> Vec<NodeId> {
        let mut was_well_formed = Vec::new();
        let mut cur = from;
        while let Some(id) = cur {
            let node = &mut self.nodes[id.index()];
            if node.value.is_well_formed() {
                was_well_formed.push(id);
            }
            node.value = Value::Undetermined;
            cur = node.parent;
        }
        was_well_formed
    }

    fn replace_child(&mut self, parent: Option<NodeId>, old: NodeId, new: NodeId) {
        match parent {
            Some(p) => {
                if let Content::Pair(c) = &mut self.nodes[p.index()].content {
                    let slot = c.iter().position(|&x| x == old).expect("child of its parent");
                    c[slot] = new;
                }
            }
            None => self.root = new,
        }
        self.nodes[new.index()].parent = parent;
    }

    /// Detach the maximal TNCB `m`. Its parent is removed and the sibling
    /// takes the parent's place; everything above becomes undetermined.
    pub fn delete(&mut self, m: NodeId) -> Result<Detached> {
        if self.free.is_some() {
            return Err(Error::Precondition("a detached subtree is still pending".into()));
        }
        let Some(parent) = self.parent(m) else {
            return Err(Error::Precondition(format!("cannot delete the root {m}")));
        };
        if !self.is_maximal(m) {
            return Err(Error::Precondition(format!("{m} is not a maximal TNCB")));
        }
        let [a, b] = self.children(parent).expect("parent is a pair");
        let sibling = if a == m { b } else { a };
        let grand = self.parent(parent);
        self.replace_child(grand, parent, sibling);
        self.mark_ancestors_undetermined(grand);

        let p = &mut self.nodes[parent.index()];
        p.content = Content::Vacant;
        p.value = Value::Undetermined;
        p.parent = None;
        self.nodes[m.index()].parent = None;
        self.free = Some(parent);
        Ok(Detached { root: m })
    }

    fn attach(&mut self, detached: Detached, dest: NodeId, sign: Sign) -> (NodeId, Vec<NodeId>) {
        let slot = self.free.take().expect("a deletion freed a slot");
        let above = self.parent(dest);
        self.nodes[slot.index()] = Node {
            value: Value::WellFormed(sign),
            content: Content::Pair([dest, detached.root]),
            parent: None,
        };
        self.replace_child(above, dest, slot);
        self.nodes[dest.index()].parent = Some(slot);
        self.nodes[detached.root.index()].parent = Some(slot);
        let disrupted = self.mark_ancestors_undetermined(above);
        (slot, disrupted)
    }

    fn combine_for_attach(&self, detached: &Detached, dest: NodeId, comb: &Combiner<'_>) -> Result<Sign> {
        let (Some(a), Some(b)) = (self.sign(detached.root), self.sign(dest)) else {
            return Err(Error::Precondition("attachment needs two well-formed TNCBs".into()));
        };
        comb.combine(a, b)?.sign().ok_or_else(|| {
            Error::Precondition(format!("`{}` and `{}` do not combine", a.orth, b.orth))
        })
    }

    fn check_pending(&self, detached: &Detached, dest: NodeId) -> Result<()> {
        if self.free.is_none() || self.parent(detached.root).is_some() || detached.root == self.root {
            return Err(Error::Precondition(format!("{} is not detached", detached.root)));
        }
        if self.nodes[dest.index()].content == Content::Vacant || self.preorder_from(detached.root).contains(&dest) {
            return Err(Error::Precondition(format!("{dest} is not in the tree")));
        }
        Ok(())
    }

    /// Put a new well-formed node above `detached` and the maximal TNCB
    /// `dest`. Former ancestors of `dest` become undetermined.
    pub fn conjoin(&mut self, detached: Detached, dest: NodeId, comb: &Combiner<'_>) -> Result<NodeId> {
        self.check_pending(&detached, dest)?;
        if !self.is_maximal(dest) {
            return Err(Error::Precondition(format!("{dest} is not a maximal TNCB")));
        }
        let sign = self.combine_for_attach(&detached, dest, comb)?;
        Ok(self.attach(detached, dest, sign).0)
    }

    /// Insert `detached` beside `site`, a well-formed node strictly inside
    /// a maximal TNCB. Returns the new node and the disrupted nodes of the
    /// host, which are now undetermined.
    pub fn adjoin(&mut self, detached: Detached, site: NodeId, comb: &Combiner<'_>) -> Result<(NodeId, Vec<NodeId>)> {
        self.check_pending(&detached, site)?;
        let inside = self.value(site).is_well_formed()
            && self.parent(site).is_some_and(|p| self.value(p).is_well_formed());
        if !inside {
            return Err(Error::Precondition(format!("{site} is not inside a maximal TNCB")));
        }
        let sign = self.combine_for_attach(&detached, site, comb)?;
        Ok(self.attach(detached, site, sign))
    }

    /// Deletion followed by conjunction or adjunction. The arena size and
    /// the number of reachable nodes are unchanged.
    pub fn apply_move(&mut self, step: &MoveStep, comb: &Combiner<'_>) -> Result<MoveEffect> {
        let start = comb.calls();
        let detached = self.delete(step.mover)?;
        let result = match step.kind {
            MoveKind::Conjoin => self.conjoin(detached, step.destination, comb).map(|n| (n, Vec::new())),
            MoveKind::Adjoin => self.adjoin(detached, step.destination, comb),
        };
        let (new_node, disrupted) = result?;
        if disrupted.len() != step.disrupted {
            return Err(Error::Precondition(format!(
                "move disrupted {} nodes, planned {}",
                disrupted.len(),
                step.disrupted
            )));
        }
        Ok(MoveEffect {
            new_node,
            disrupted,
            combine_calls: comb.calls() - start,
        })
    }

    /// Bracketed leaf orthographies, e.g. `((the dog) barked)`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(self.root, false, &mut out);
        out
    }

    /// Like [`render`](Self::render) but prefixes interior nodes with `+`
    /// (well-formed), `x` (inconsistent) or `?` (undetermined).
    pub fn render_annotated(&self) -> String {
        let mut out = String::new();
        self.render_into(self.root, true, &mut out);
        out
    }

    fn render_into(&self, id: NodeId, annotate: bool, out: &mut String) {
        match self.children(id) {
            None => out.push_str(self.sign(id).map_or("?", |s| s.orth.as_str())),
            Some([a, b]) => {
                if annotate {
                    out.push(match self.value(id) {
                        Value::WellFormed(_) => '+',
                        Value::Inconsistent => 'x',
                        Value::Undetermined => '?',
                    });
                }
                out.push('(');
                self.render_into(a, annotate, out);
                out.push(' ');
                self.render_into(b, annotate, out);
                out.push(')');
            }
        }
    }

    /// Structural audit used by tests and the dominance checker.
    pub fn check_invariants(&self, bag_len: usize) -> std::result::Result<(), String> {
        if self.free.is_some() {
            return Err("a detached subtree is pending".into());
        }
        if self.parent(self.root).is_some() {
            return Err("root has a parent".into());
        }
        let order = self.preorder();
        let mut leaves = Vec::new();
        for &id in &order {
            match self.nodes[id.index()].content {
                Content::Leaf(i) => {
                    leaves.push(i);
                    if !self.value(id).is_well_formed() {
                        return Err(format!("leaf {id} is not well-formed"));
                    }
                }
                Content::Pair([a, b]) => {
                    if a == b || self.parent(a) != Some(id) || self.parent(b) != Some(id) {
                        return Err(format!("bad child links at {id}"));
                    }
                    let determined_above_undetermined = *self.value(id) != Value::Undetermined
                        && (*self.value(a) == Value::Undetermined || *self.value(b) == Value::Undetermined);
                    if determined_above_undetermined {
                        return Err(format!("{id} is determined above an undetermined child"));
                    }
                    let well_formed_above_bad = self.value(id).is_well_formed()
                        && !(self.value(a).is_well_formed() && self.value(b).is_well_formed());
                    if well_formed_above_bad {
                        return Err(format!("{id} is well-formed above an ill-formed child"));
                    }
                }
                Content::Vacant => return Err(format!("vacant node {id} is reachable")),
            }
        }
        leaves.sort_unstable();
        if leaves != (0..bag_len).collect::<Vec<_>>() {
            return Err(format!("leaves {leaves:?} do not cover a bag of {bag_len}"));
        }
        if order.len() != 2 * bag_len - 1 {
            return Err(format!("{} nodes for {bag_len} leaves", order.len()));
        }
        Ok(())
    }
}
