//! Scaling families and the combine-call benchmark.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bag::{Bag, BagEntry};
use crate::error::Result;
use crate::generator::{generate, GenConfig};
use crate::grammar_file::parse_grammar;
use crate::init::right_branching;
use crate::oracle;
use crate::signs::{Atom, FeatureValue, Grammar, Sign, ViolationPolicy};

const NP_GRAMMAR: &str = include_str!("../fixtures/english.grammar");
const CLAUSE_GRAMMAR: &str = include_str!("../fixtures/clause_chain.grammar");

const ADJECTIVES: [&str; 16] = [
    "brown", "big", "old", "fierce", "lazy", "happy", "small", "young", "loud", "tired", "hungry", "proud", "wild",
    "calm", "clever", "noble",
];
const ADVERBS: [&str; 16] = [
    "loudly", "often", "again", "today", "twice", "briefly", "softly", "madly", "rarely", "early", "once", "still",
    "gladly", "boldly", "weakly", "lately",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Template {
    /// `the ADJ_k .. ADJ_1 dog barked`
    NpAdjuncts,
    /// `the dog barked ADV_1 .. ADV_k`
    ClauseChain,
}

impl Template {
    pub fn max_k(self) -> usize {
        ADJECTIVES.len()
    }
}

fn sign(cat: &str, orth: &str, feats: &[(&str, u32)]) -> Sign {
    let feats = feats
        .iter()
        .map(|&(k, v)| (Atom::new(k).expect("valid name"), FeatureValue::Index(v)))
        .collect();
    Sign::new(Atom::new(cat).expect("valid name"), orth, feats)
}

/// Bag of size `k + 4` for the template, modifiers ranked `1..=k` in
/// ascending order, plus the grammar it is meant for.
///
/// # Panics
/// When `k` exceeds [`Template::max_k`].
pub fn synth_bag(template: Template, k: usize) -> (Bag, Grammar) {
    assert!(k <= template.max_k(), "k = {k} exceeds {}", template.max_k());
    let mut signs = vec![
        ("PAST", sign("TNS", "PAST", &[("ev", 2)])),
        ("dog", match template {
            Template::NpAdjuncts => sign("N", "dog", &[("idx", 1), ("next", 0), ("mods", 0)]),
            Template::ClauseChain => sign("N", "dog", &[("idx", 1)]),
        }),
        ("bark", sign("V", "bark", &[("ev", 2), ("subj", 1)])),
        ("the", sign("DET", "the", &[("spec", 1)])),
    ];
    for r in 1..=k {
        let rank = u32::try_from(r).expect("small rank");
        signs.push(match template {
            Template::NpAdjuncts => (ADJECTIVES[r - 1], sign("ADJ", ADJECTIVES[r - 1], &[("mod", 1), ("rank", rank)])),
            Template::ClauseChain => (ADVERBS[r - 1], sign("ADV", ADVERBS[r - 1], &[("ev", 2), ("rank", rank)])),
        });
    }
    let entries = signs
        .into_iter()
        .map(|(id, sign)| BagEntry { id: id.to_string(), sign })
        .collect();
    let grammar = match template {
        Template::NpAdjuncts => NP_GRAMMAR,
        Template::ClauseChain => CLAUSE_GRAMMAR,
    };
    (
        Bag::new(entries).expect("synthetic ids are unique"),
        parse_grammar(grammar).expect("bundled grammar parses"),
    )
}

/// The realization [`synth_bag`] is built to have.
pub fn expected_realization(template: Template, k: usize) -> String {
    match template {
        Template::NpAdjuncts => {
            let mut words = vec!["the"];
            words.extend(ADJECTIVES[..k].iter().rev());
            words.extend(["dog", "barked"]);
            words.join(" ")
        }
        Template::ClauseChain => {
            let mut words = vec!["the", "dog", "barked"];
            words.extend(&ADVERBS[..k]);
            words.join(" ")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    Greedy,
    Oracle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub method: Method,
    pub n: usize,
    /// Always 0 for oracle rows.
    pub rewrites: usize,
    pub combine_calls: u64,
    pub wall_time: Duration,
    pub succeeded: bool,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub template: Template,
    /// Bag sizes, ascending, each at least 4.
    pub sizes: Vec<usize>,
    /// Timing repetitions; the fastest is reported.
    pub reps: usize,
    /// Largest bag handed to the oracle.
    pub oracle_max: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            template: Template::NpAdjuncts,
            sizes: (4..=16).collect(),
            reps: 1,
            oracle_max: 16,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Least-squares slope of ln(combine_calls) against ln(n), greedy rows.
    pub greedy_exponent: f64,
    /// Local log-log slopes between consecutive oracle rows.
    pub oracle_slopes: Vec<f64>,
}

impl BenchReport {
    pub fn greedy(&self) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().filter(|r| r.method == Method::Greedy)
    }

    pub fn oracle(&self) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().filter(|r| r.method == Method::Oracle)
    }

    /// Oracle cost outgrows every fixed polynomial degree: the local
    /// exponent keeps rising.
    pub fn oracle_super_polynomial(&self) -> bool {
        self.oracle_slopes.len() >= 2 && self.oracle_slopes.windows(2).all(|w| w[1] > w[0])
    }
}

pub fn loglog_slope(points: &[(usize, u64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, c)| (c.max(1) as f64).ln()).collect();
    let len = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / len;
    let my = ys.iter().sum::<f64>() / len;
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn timed<T>(reps: usize, mut f: impl FnMut() -> Result<T>) -> Result<(T, Duration)> {
    let mut best = Duration::MAX;
    let mut out = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let v = f()?;
        best = best.min(start.elapsed());
        out = Some(v);
    }
    Ok((out.expect("at least one repetition"), best))
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    let mut rows = Vec::new();
    for &n in &config.sizes {
        let (bag, grammar) = synth_bag(config.template, n.saturating_sub(4));
        let (r, wall_time) = timed(config.reps, || {
            generate(&bag, right_branching(&bag)?, &grammar, GenConfig::default())
        })?;
        rows.push(BenchRow {
            method: Method::Greedy,
            n,
            rewrites: r.rewrites,
            combine_calls: r.evaluations,
            wall_time,
            succeeded: r.outcome.is_success(),
        });
    }
    for &n in config.sizes.iter().filter(|&&n| n <= config.oracle_max) {
        let (bag, grammar) = synth_bag(config.template, n.saturating_sub(4));
        let (r, wall_time) = timed(config.reps, || {
            oracle::realizations(&bag, &grammar, ViolationPolicy::Strict, config.oracle_max)
        })?;
        rows.push(BenchRow {
            method: Method::Oracle,
            n,
            rewrites: 0,
            combine_calls: r.combine_calls,
            wall_time,
            succeeded: !r.orths.is_empty(),
        });
    }

    let greedy: Vec<_> = rows
        .iter()
        .filter(|r| r.method == Method::Greedy)
        .map(|r| (r.n, r.combine_calls))
        .collect();
    let oracle: Vec<_> = rows
        .iter()
        .filter(|r| r.method == Method::Oracle)
        .map(|r| (r.n, r.combine_calls))
        .collect();
    Ok(BenchReport {
        greedy_exponent: loglog_slope(&greedy),
        oracle_slopes: oracle.windows(2).map(loglog_slope).collect(),
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Emit {
    Csv,
    #[default]
    Table,
}

pub fn render(report: &BenchReport, emit: Emit) -> String {
    let mut out = String::new();
    let method = |m: Method| match m {
        Method::Greedy => "GREEDY",
        Method::Oracle => "ORACLE",
    };
    match emit {
        Emit::Csv => {
            out.push_str("method,n,rewrites,combine_calls,wall_us,succeeded\n");
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    method(r.method),
                    r.n,
                    r.rewrites,
                    r.combine_calls,
                    r.wall_time.as_micros(),
                    r.succeeded
                );
            }
        }
        Emit::Table => {
            let _ = writeln!(
                out,
                "{:<8} {:>4} {:>8} {:>14} {:>12} {:>5}",
                "method", "n", "rewrites", "combine_calls", "wall_us", "ok"
            );
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "{:<8} {:>4} {:>8} {:>14} {:>12} {:>5}",
                    method(r.method),
                    r.n,
                    r.rewrites,
                    r.combine_calls,
                    r.wall_time.as_micros(),
                    r.succeeded
                );
            }
        }
    }
    let _ = writeln!(out, "# greedy exponent: {:.3}", report.greedy_exponent);
    let slopes: Vec<String> = report.oracle_slopes.iter().map(|s| format!("{s:.3}")).collect();
    let _ = writeln!(out, "# oracle local exponents: {}", slopes.join(" "));
    let _ = writeln!(out, "# oracle super-polynomial: {}", report.oracle_super_polynomial());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::dog_bag;

    #[test]
    fn two_adjectives_give_the_worked_example_bag() {
        let (bag, _) = synth_bag(Template::NpAdjuncts, 2);
        assert_eq!(bag, dog_bag());
        assert_eq!(expected_realization(Template::NpAdjuncts, 2), "the big brown dog barked");
    }

    #[test]
    fn synth_is_deterministic() {
        for t in [Template::NpAdjuncts, Template::ClauseChain] {
            assert_eq!(synth_bag(t, 5).0, synth_bag(t, 5).0);
            assert_eq!(synth_bag(t, 5).0.len(), 9);
        }
    }

    #[test]
    fn synth_bags_have_the_intended_unique_realization() {
        for t in [Template::NpAdjuncts, Template::ClauseChain] {
            for k in 0..=4 {
                let (bag, g) = synth_bag(t, k);
                let r = oracle::all_realizations(&bag, &g).unwrap();
                assert_eq!(r, [expected_realization(t, k)].into(), "{t:?} {k}");
            }
        }
        assert_eq!(expected_realization(Template::NpAdjuncts, 0), "the dog barked");
    }

    #[test]
    fn slope_of_a_cubic_is_three() {
        let pts: Vec<_> = (2..10).map(|n| (n, (n * n * n) as u64)).collect();
        assert!((loglog_slope(&pts) - 3.0).abs() < 1e-9);
    }

    #[test]
    fn greedy_rows_respect_the_rewrite_bound() {
        for t in [Template::NpAdjuncts, Template::ClauseChain] {
            let report = run_bench(&BenchConfig {
                template: t,
                sizes: (4..=9).collect(),
                reps: 1,
                oracle_max: 7,
            })
            .unwrap();
            for r in report.greedy() {
                assert!(r.succeeded);
                assert!(r.rewrites < r.n, "{r:?}");
            }
            assert_eq!(report.oracle().count(), 4);
        }
    }

    #[test]
    fn np_adjunct_rewrites_are_n_minus_two() {
        for k in 0..=8 {
            let (bag, g) = synth_bag(Template::NpAdjuncts, k);
            let r = generate(&bag, right_branching(&bag).unwrap(), &g, GenConfig::default()).unwrap();
            assert_eq!(r.outcome, crate::generator::Outcome::Success(expected_realization(Template::NpAdjuncts, k)));
            assert_eq!(r.rewrites, bag.len() - 2, "k = {k}");
        }
    }

    #[test]
    fn greedy_combine_calls_golden() {
        let config = |template| BenchConfig {
            template,
            sizes: (4..=16).collect(),
            reps: 1,
            oracle_max: 0,
        };
        let calls = |t| -> Vec<u64> { run_bench(&config(t)).unwrap().greedy().map(|r| r.combine_calls).collect() };
        assert_eq!(
            calls(Template::NpAdjuncts),
            [9, 21, 35, 51, 69, 89, 111, 135, 161, 189, 219, 251, 285]
        );
        assert_eq!(
            calls(Template::ClauseChain),
            [9, 15, 23, 33, 45, 59, 75, 93, 113, 135, 159, 185, 213]
        );
    }

    #[test]
    fn csv_has_one_line_per_row() {
        let report = run_bench(&BenchConfig {
            sizes: vec![4, 5],
            oracle_max: 5,
            ..BenchConfig::default()
        })
        .unwrap();
        let csv = render(&report, Emit::Csv);
        let data: Vec<_> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 1 + 4);
        assert!(data[1].starts_with("GREEDY,4,2,"));
    }
}
