//! Command-line front end.
//!
//! Exit codes: 0 success, 1 generation failure or reported violations,
//! 2 bad input, 3 grammar assumption violated.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::bag::Bag;
use crate::bench::{self, BenchConfig, Emit, Template};
use crate::error::{Error, Result};
use crate::generator::{generate, GenConfig, Outcome, RewriteBound};
use crate::grammar_file::parse_grammar;
use crate::init::{from_bracketing, random_tncb, right_branching, Bracketing};
use crate::oracle::{self, DEFAULT_LIMIT};
use crate::signs::{Grammar, ViolationPolicy};
use crate::transfer::{transfer, Lexicon};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ASSUMPTION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tncb", version, about = "Greedy bag generation over target-language normalised commutative bracketings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Order a bag of signs into a sentence.
    Generate(GenerateArgs),
    /// List every realization of a small bag by exhaustive search.
    Oracle(OracleArgs),
    /// Test a grammar for the two monotonicity properties.
    Check(CheckArgs),
    /// Measure combine calls over a scaling family.
    Bench(BenchArgs),
    /// Map a source bag (and bracketing) to a target bag.
    Transfer(TransferArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InitKind {
    /// Worst-case comb in bag order.
    Right,
    /// Random shape and leaf order from `--seed`.
    Random,
    /// Mirror `--bracketing`.
    Mirror,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long)]
    bag: PathBuf,
    #[arg(long, value_enum, default_value = "right")]
    init: InitKind,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    bracketing: Option<PathBuf>,
    /// Write the move trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Do not stop after n-1 rewrites.
    #[arg(long)]
    unbounded: bool,
    /// Let the first matching rule win when a pair combines ambiguously.
    #[arg(long)]
    lenient: bool,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long)]
    grammar: PathBuf,
    #[arg(long)]
    bag: PathBuf,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
    #[arg(long)]
    lenient: bool,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long)]
    grammar: PathBuf,
    /// Bag to test; repeatable.
    #[arg(long)]
    bag: Vec<PathBuf>,
    /// JSON file `{"bags": [paths]}`, paths relative to the manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Random generation runs per bag for the dominance check.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TemplateArg {
    NpAdjuncts,
    ClauseChain,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EmitArg {
    Csv,
    Table,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "np-adjuncts")]
    template: TemplateArg,
    /// `LO..HI` inclusive, or a comma list.
    #[arg(long, default_value = "4..16", value_parser = parse_sizes)]
    sizes: Sizes,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long, default_value_t = 16)]
    oracle_max: usize,
    #[arg(long, value_enum, default_value = "table")]
    emit: EmitArg,
}

#[derive(Debug, Args)]
struct TransferArgs {
    #[arg(long)]
    bag: PathBuf,
    #[arg(long)]
    lexicon: PathBuf,
    #[arg(long)]
    bracketing: Option<PathBuf>,
    #[arg(long)]
    out_bag: PathBuf,
    #[arg(long)]
    out_bracketing: Option<PathBuf>,
}

#[derive(Clone, Debug)]
struct Sizes(Vec<usize>);

fn parse_sizes(s: &str) -> std::result::Result<Sizes, String> {
    let sizes: Vec<usize> = if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| format!("bad size `{lo}`"))?;
        let hi: usize = hi.trim().parse().map_err(|_| format!("bad size `{hi}`"))?;
        (lo..=hi).collect()
    } else {
        s.split(',')
            .map(|p| p.trim().parse().map_err(|_| format!("bad size `{p}`")))
            .collect::<std::result::Result<_, _>>()?
    };
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err("sizes must be non-empty and ascending".into());
    }
    if let Some(bad) = sizes.iter().find(|&&n| !(4..=4 + bench::Template::NpAdjuncts.max_k()).contains(&n)) {
        return Err(format!("size {bad} is outside 4..={}", 4 + bench::Template::NpAdjuncts.max_k()));
    }
    Ok(Sizes(sizes))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_grammar(path: &Path) -> Result<Grammar> {
    parse_grammar(&read(path)?).map_err(|e| match e {
        Error::Syntax { line, message, .. } => Error::Syntax {
            source_name: path.display().to_string(),
            line,
            message,
        },
        other => other,
    })
}

fn load_bag(path: &Path) -> Result<Bag> {
    Bag::from_json(&read(path)?).map_err(|e| Error::Bag(format!("{}: {e}", path.display())))
}

fn policy(lenient: bool, err: &mut dyn Write) -> ViolationPolicy {
    if lenient {
        let _ = writeln!(err, "warning: precedence violations downgraded to first-rule-wins");
        ViolationPolicy::FirstRuleWins
    } else {
        ViolationPolicy::Strict
    }
}

fn cmd_generate(a: &GenerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let grammar = load_grammar(&a.grammar)?;
    let bag = load_bag(&a.bag)?;
    let initial = match a.init {
        InitKind::Right => right_branching(&bag)?,
        InitKind::Random => random_tncb(&bag, a.seed)?,
        InitKind::Mirror => {
            let path = a
                .bracketing
                .as_ref()
                .ok_or_else(|| Error::Precondition("--init mirror needs --bracketing".into()))?;
            from_bracketing(&Bracketing::parse(&read(path)?)?, &bag)?
        }
    };
    let config = GenConfig {
        max_rewrites: if a.unbounded { RewriteBound::Unbounded } else { RewriteBound::NMinus1 },
        violation_policy: policy(a.lenient, err),
    };
    let r = generate(&bag, initial, &grammar, config)?;
    for w in &r.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    if let Some(path) = &a.trace {
        write(path, &r.trace_json())?;
    }
    let _ = writeln!(err, "rewrites: {}  combine calls: {}", r.rewrites, r.evaluations);
    Ok(match &r.outcome {
        Outcome::Success(orth) => {
            let _ = writeln!(out, "{orth}");
            EXIT_OK
        }
        Outcome::Failure(fragments) => {
            let _ = writeln!(err, "no complete sentence; {} fragment(s)", fragments.len());
            for f in fragments {
                let _ = writeln!(out, "{f}");
            }
            EXIT_FAILURE
        }
    })
}

fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let grammar = load_grammar(&a.grammar)?;
    let bag = load_bag(&a.bag)?;
    let r = oracle::realizations(&bag, &grammar, policy(a.lenient, err), a.limit)?;
    for orth in &r.orths {
        let _ = writeln!(out, "{orth}");
    }
    let _ = writeln!(err, "{} realization(s), {} combine calls", r.orths.len(), r.combine_calls);
    Ok(if r.orths.is_empty() { EXIT_FAILURE } else { EXIT_OK })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Manifest {
    bags: Vec<PathBuf>,
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write) -> Result<i32> {
    let grammar = load_grammar(&a.grammar)?;
    let mut paths = a.bag.clone();
    if let Some(m) = &a.manifest {
        let manifest: Manifest = serde_json::from_str(&read(m)?)?;
        let base = m.parent().unwrap_or(Path::new(""));
        paths.extend(manifest.bags.iter().map(|p| base.join(p)));
    }
    if paths.is_empty() {
        return Err(Error::Precondition("check needs --bag or --manifest".into()));
    }
    let bags = paths.iter().map(|p| load_bag(p)).collect::<Result<Vec<_>>>()?;
    let mut report = oracle::check_precedence_monotonicity(&grammar, &bags, a.limit)?;
    report.merge(oracle::check_dominance_monotonicity(&grammar, &bags, a.trials, a.seed)?);
    for v in &report.violations {
        let _ = writeln!(out, "{v}");
    }
    let _ = writeln!(
        out,
        "{} bag(s), {} dominance trial(s) each: {} violation(s)",
        bags.len(),
        a.trials,
        report.violations.len()
    );
    Ok(if report.is_clean() { EXIT_OK } else { EXIT_FAILURE })
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<i32> {
    let config = BenchConfig {
        template: match a.template {
            TemplateArg::NpAdjuncts => Template::NpAdjuncts,
            TemplateArg::ClauseChain => Template::ClauseChain,
        },
        sizes: a.sizes.0.clone(),
        reps: a.reps,
        oracle_max: a.oracle_max,
    };
    let report = bench::run_bench(&config)?;
    let emit = match a.emit {
        EmitArg::Csv => Emit::Csv,
        EmitArg::Table => Emit::Table,
    };
    let _ = out.write_all(bench::render(&report, emit).as_bytes());
    Ok(EXIT_OK)
}

fn cmd_transfer(a: &TransferArgs, err: &mut dyn Write) -> Result<i32> {
    let bag = load_bag(&a.bag)?;
    let lexicon = Lexicon::parse(&read(&a.lexicon)?)?;
    let bracketing = a.bracketing.as_deref().map(read).transpose()?;
    let bracketing = bracketing.as_deref().map(Bracketing::parse).transpose()?;
    let t = transfer(&bag, bracketing.as_ref(), &lexicon)?;
    write(&a.out_bag, &t.bag.to_json())?;
    match (&a.out_bracketing, &t.bracketing) {
        (Some(path), Some(b)) => write(path, &format!("{b}\n"))?,
        (Some(_), None) => return Err(Error::Precondition("--out-bracketing needs --bracketing".into())),
        _ => {}
    }
    let _ = writeln!(err, "transferred {} sign(s)", t.bag.len());
    Ok(EXIT_OK)
}

/// Run with explicit arguments (program name first) and streams; returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a, out, err),
        Command::Oracle(a) => cmd_oracle(a, out, err),
        Command::Check(a) => cmd_check(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Transfer(a) => cmd_transfer(a, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_assumption_violation() {
                EXIT_ASSUMPTION
            } else {
                EXIT_INPUT
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture(name: &str) -> String {
        format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
    }

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("tncb").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn sizes_parse() {
        assert_eq!(parse_sizes("4..7").unwrap().0, [4, 5, 6, 7]);
        assert_eq!(parse_sizes("4,6,9").unwrap().0, [4, 6, 9]);
        assert!(parse_sizes("6,4").is_err());
        assert!(parse_sizes("3..5").is_err());
        assert!(parse_sizes("x").is_err());
    }

    #[test]
    fn generate_dog() {
        let g = fixture("english.grammar");
        let b = fixture("dog.bag.json");
        let (code, out, err) = run_args(&["generate", "--grammar", &g, "--bag", &b]);
        assert_eq!(code, EXIT_OK, "{err}");
        assert_eq!(out, "the big brown dog barked\n");
        assert!(err.contains("rewrites: 4"));
    }

    #[test]
    fn bench_csv() {
        let (code, out, _) = run_args(&["bench", "--sizes", "4,5", "--oracle-max", "4", "--emit", "csv"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.starts_with("method,n,"));
        assert_eq!(out.lines().filter(|l| l.starts_with("GREEDY")).count(), 2);
        assert_eq!(out.lines().filter(|l| l.starts_with("ORACLE")).count(), 1);
    }

    #[test]
    fn mirror_needs_bracketing() {
        let g = fixture("english.grammar");
        let b = fixture("dog.bag.json");
        let (code, _, err) = run_args(&["generate", "--grammar", &g, "--bag", &b, "--init", "mirror"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("--bracketing"));
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let (code, _, err) = run_args(&["oracle", "--grammar", "/nonexistent", "--bag", "/nonexistent"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("/nonexistent"));
        let (code, _, _) = run_args(&["frobnicate"]);
        assert_eq!(code, EXIT_INPUT);
    }
}
