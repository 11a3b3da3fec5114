//! Initial trees for the generator.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bag::Bag;
use crate::error::{Error, Result};
use crate::tncb::{Shape, Tncb};

/// Worst-case comb in bag order: the first two signs form the deepest pair
/// and each later sign joins the tree at the top, giving
/// `(((s0 s1) s2) ... sn)`.
pub fn right_branching(bag: &Bag) -> Result<Tncb> {
    if bag.is_empty() {
        return Err(Error::Precondition("cannot build a TNCB over an empty bag".into()));
    }
    let shape = (1..bag.len()).fold(Shape::Leaf(0), |acc, i| Shape::pair(acc, Shape::Leaf(i)));
    Tncb::from_shape(&shape, bag)
}

/// Uniformly random tree shape and leaf assignment, reproducible per seed.
pub fn random_tncb(bag: &Bag, seed: u64) -> Result<Tncb> {
    if bag.is_empty() {
        return Err(Error::Precondition("cannot build a TNCB over an empty bag".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Tncb::from_shape(&random_shape(bag.len(), &mut rng), bag)
}

/// Rémy's algorithm over a shuffled leaf order.
pub(crate) fn random_shape(n: usize, rng: &mut impl Rng) -> Shape {
    let mut leaves: Vec<usize> = (0..n).collect();
    leaves.shuffle(rng);

    // node i: Some((a, b)) for a pair, None for a leaf
    let mut kids: Vec<Option<(usize, usize)>> = vec![None];
    let mut label: Vec<usize> = vec![leaves[0]];
    let mut parent: Vec<Option<usize>> = vec![None];
    let mut root = 0;
    for &leaf in &leaves[1..] {
        let target = rng.gen_range(0..kids.len());
        let new_leaf = kids.len();
        kids.push(None);
        label.push(leaf);
        parent.push(None);
        let pair = kids.len();
        let children = if rng.gen_bool(0.5) { (target, new_leaf) } else { (new_leaf, target) };
        kids.push(Some(children));
        label.push(usize::MAX);
        parent.push(parent[target]);
        match parent[target] {
            Some(p) => {
                let (a, b) = kids[p].expect("parent is a pair");
                kids[p] = Some(if a == target { (pair, b) } else { (a, pair) });
            }
            None => root = pair,
        }
        parent[target] = Some(pair);
        parent[new_leaf] = Some(pair);
    }

    fn to_shape(i: usize, kids: &[Option<(usize, usize)>], label: &[usize]) -> Shape {
        match kids[i] {
            None => Shape::Leaf(label[i]),
            Some((a, b)) => Shape::pair(to_shape(a, kids, label), to_shape(b, kids, label)),
        }
    }
    to_shape(root, &kids, &label)
}

/// Binary grouping over leaf labels, e.g. `((hon wa) (akai desu))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bracketing {
    Leaf(String),
    Pair(Box<Bracketing>, Box<Bracketing>),
}

impl Bracketing {
    pub fn pair(a: Bracketing, b: Bracketing) -> Bracketing {
        Bracketing::Pair(Box::new(a), Box::new(b))
    }

    pub fn parse(text: &str) -> Result<Bracketing> {
        let mut tokens = Vec::new();
        let mut cur = String::new();
        for c in text.chars() {
            if c == '(' || c == ')' || c.is_whitespace() {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                if !c.is_whitespace() {
                    tokens.push(c.to_string());
                }
            } else {
                cur.push(c);
            }
        }
        if !cur.is_empty() {
            tokens.push(cur);
        }
        let mut pos = 0;
        let b = parse_node(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Bracketing(format!("trailing input after `{b}`")));
        }
        let mut seen = std::collections::BTreeSet::new();
        for label in b.labels() {
            if !seen.insert(label) {
                return Err(Error::Bracketing(format!("label `{label}` appears twice")));
            }
        }
        Ok(b)
    }

    pub fn labels(&self) -> Vec<&str> {
        match self {
            Bracketing::Leaf(l) => vec![l.as_str()],
            Bracketing::Pair(a, b) => {
                let mut v = a.labels();
                v.extend(b.labels());
                v
            }
        }
    }

    pub fn relabel(&self, f: &impl Fn(&str) -> String) -> Bracketing {
        match self {
            Bracketing::Leaf(l) => Bracketing::Leaf(f(l)),
            Bracketing::Pair(a, b) => Bracketing::pair(a.relabel(f), b.relabel(f)),
        }
    }

    /// Same nesting with labels forgotten; used to compare shapes.
    pub fn skeleton(&self) -> String {
        match self {
            Bracketing::Leaf(_) => "*".into(),
            Bracketing::Pair(a, b) => format!("({} {})", a.skeleton(), b.skeleton()),
        }
    }

    fn to_shape(&self, leaf_map: &BTreeMap<String, usize>) -> Result<Shape> {
        match self {
            Bracketing::Leaf(l) => leaf_map
                .get(l)
                .map(|&i| Shape::Leaf(i))
                .ok_or_else(|| Error::Bracketing(format!("label `{l}` is not mapped to a bag leaf"))),
            Bracketing::Pair(a, b) => Ok(Shape::pair(a.to_shape(leaf_map)?, b.to_shape(leaf_map)?)),
        }
    }
}

fn parse_node(tokens: &[String], pos: &mut usize) -> Result<Bracketing> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| Error::Bracketing("unexpected end of input".into()))?;
    *pos += 1;
    match tok.as_str() {
        ")" => Err(Error::Bracketing("unexpected `)`".into())),
        "(" => {
            let mut items = Vec::new();
            while tokens.get(*pos).map(String::as_str) != Some(")") {
                if *pos >= tokens.len() {
                    return Err(Error::Bracketing("unclosed `(`".into()));
                }
                items.push(parse_node(tokens, pos)?);
            }
            *pos += 1;
            match <[Bracketing; 2]>::try_from(items) {
                Ok([a, b]) => Ok(Bracketing::pair(a, b)),
                Err(items) => Err(Error::Bracketing(format!(
                    "groups must be binary, found {} elements",
                    items.len()
                ))),
            }
        }
        label => Ok(Bracketing::Leaf(label.to_string())),
    }
}

impl fmt::Display for Bracketing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bracketing::Leaf(l) => f.write_str(l),
            Bracketing::Pair(a, b) => write!(f, "({a} {b})"),
        }
    }
}

/// Map each label to a bag leaf: an exact leaf id first, otherwise an
/// orthography carried by exactly one leaf.
pub fn resolve_labels(b: &Bracketing, bag: &Bag) -> Result<BTreeMap<String, usize>> {
    let mut map = BTreeMap::new();
    for label in b.labels() {
        let leaf = match bag.position(label) {
            Some(i) => i,
            None => {
                let hits: Vec<usize> = (0..bag.len()).filter(|&i| bag.sign(i).orth == label).collect();
                match hits[..] {
                    [i] => i,
                    [] => return Err(Error::Bracketing(format!("label `{label}` matches no bag leaf"))),
                    _ => return Err(Error::Bracketing(format!("label `{label}` matches several bag leaves"))),
                }
            }
        };
        if map.values().any(|&j| j == leaf) {
            return Err(Error::Bracketing(format!("two labels map to bag leaf `{}`", bag.entries()[leaf].id)));
        }
        map.insert(label.to_string(), leaf);
    }
    Ok(map)
}

/// Mirror a bracketing over `bag`; labels resolve as in [`resolve_labels`].
pub fn from_bracketing(b: &Bracketing, bag: &Bag) -> Result<Tncb> {
    let map = resolve_labels(b, bag)?;
    from_bracketing_with(b, &map, bag)
}

pub fn from_bracketing_with(b: &Bracketing, leaf_map: &BTreeMap<String, usize>, bag: &Bag) -> Result<Tncb> {
    let mut targets: Vec<usize> = b.labels().iter().filter_map(|l| leaf_map.get(*l).copied()).collect();
    targets.sort_unstable();
    targets.dedup();
    if targets.len() != b.labels().len() && b.labels().iter().all(|l| leaf_map.contains_key(*l)) {
        return Err(Error::Bracketing("leaf map is not injective".into()));
    }
    let shape = b.to_shape(leaf_map)?;
    if targets.len() != bag.len() {
        return Err(Error::Bracketing(format!(
            "bracketing covers {} of {} bag leaves",
            targets.len(),
            bag.len()
        )));
    }
    Tncb::from_shape(&shape, bag)
}
