//! Greedy bag generation for lexicalist machine translation.
//!
//! A bag of instantiated target signs is arranged into a binary derivation
//! tree with unordered children (a TNCB). The generator alternates a test
//! phase, which evaluates undetermined nodes, with a rewrite phase, which
//! moves one maximal well-formed fragment next to another fragment it
//! combines with. Under grammars whose combinations are order-determinate
//! and whose adjunctions re-evaluate cleanly, this succeeds within `n - 1`
//! rewrites for a bag of `n` signs.
//!
//! * [`signs`]: ground signs, rules, unification and combination
//! * [`tncb`]: the tree and its operations
//! * [`generator`]: the test/rewrite loop
//! * [`init`]: initial trees (worst-case comb, random, mirrored bracketing)
//! * [`transfer`]: one-to-one lexical transfer of a source bag
//! * [`oracle`]: exhaustive bag chart and monotonicity checkers
//! * [`bench`]: scaling families and the complexity benchmark

pub mod bag;
pub mod bench;
pub mod cli;
pub mod error;
pub mod generator;
pub mod grammar_file;
pub mod init;
pub mod oracle;
pub mod signs;
mod syntax;
pub mod tncb;
pub mod transfer;

#[cfg(test)]
mod testutil;

pub use bag::{Bag, BagEntry};
pub use error::{Error, Result};
pub use generator::{generate, GenConfig, GenResult, Outcome, RewriteBound};
pub use grammar_file::parse_grammar;
pub use init::{from_bracketing, random_tncb, right_branching, Bracketing};
pub use signs::{Atom, Combination, Combiner, FeatureValue, Grammar, Sign, ViolationPolicy};
pub use tncb::{MoveKind, MoveStep, NodeId, Tncb, Value};
