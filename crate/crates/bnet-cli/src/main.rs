//! Command-line front end for the `bnet` toolkit.
//!
//! Three subcommands cover the pipeline:
//!
//! * `compile` — parse a network and print its transition matrix in
//!   δ-notation plus a JSON line that round-trips as a raw graph input.
//! * `invariant` — the smallest invariant dual subspace containing a
//!   state subset or a list of Boolean functions, as a partition with its
//!   quotient map and the number of refinement rounds.
//! * `observability` — indistinguishability analysis of a network with
//!   outputs, or construction of an output map that makes it observable.
//!
//! Inputs are either Boolean network text files or raw state-transition
//! graphs in JSON (`{"n":…,"succ":[…]}`); the two are told apart by the
//! leading `{`. All output is deterministic: the same invocation always
//! produces byte-identical bytes.
//!
//! Exit codes: 0 success, 1 parse error, 2 semantic error, 3 violated
//! engine precondition.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use bnet::net::DEFAULT_MAX_VARS;
use bnet::{
    analyze, coarsest_equitable_refinement, construct_observable_output, is_invariant,
    partition_of_dual, quotient, smallest_invariant_algebraic, smallest_invariant_structural,
    union_invariant, BooleanNetwork, Error as AnalysisError, ErrorKind, InvariantResult,
    LogicalMatrix, ObservedBn, Partition, Stg, WeightedDigraph,
};
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde::Serialize;

// ============================================================================
// Command-line surface
// ============================================================================

#[derive(Parser)]
#[command(name = "bnet", version, about = "Boolean network analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a network's transition matrix in δ-notation and JSON.
    Compile {
        /// Network text file, or raw graph JSON ({"n":…,"succ":[…]}).
        file: PathBuf,
        /// Emit the state-transition graph as DOT instead.
        #[arg(long)]
        dot: bool,
        /// Write to a file instead of standard output.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Smallest invariant dual subspace containing the given target.
    #[command(group(ArgGroup::new("target").required(true).args(["subset", "function"])))]
    Invariant {
        /// Network text file, or raw graph JSON ({"n":…,"succ":[…]}).
        file: PathBuf,
        /// Comma-separated 1-based state indices, e.g. "1,4,5".
        #[arg(long, value_name = "INDICES")]
        subset: Option<String>,
        /// Boolean expression over the network variables; repeat the flag
        /// to generate the subspace from several functions at once.
        #[arg(long, value_name = "EXPR")]
        function: Vec<String>,
        /// Which engine computes the answer (they always agree).
        #[arg(long, value_enum, default_value_t = EngineChoice::Refine)]
        engine: EngineChoice,
        /// Cross-check all applicable engines before printing.
        #[arg(long)]
        verify: bool,
        /// Emit the quotient graph as DOT instead of JSON.
        #[arg(long)]
        dot: bool,
        /// Write to a file instead of standard output.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Analyze observability of a network with declared outputs.
    Observability {
        /// Network text file, or raw graph JSON ({"n":…,"succ":[…]}).
        file: PathBuf,
        /// Construct and print an output map that makes the state graph
        /// observable, ignoring any declared outputs.
        #[arg(long)]
        construct_output: bool,
        /// Emit the state graph colored by output symbol as DOT.
        #[arg(long)]
        dot: bool,
        /// Write to a file instead of standard output.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

/// Engine selector for the `invariant` command.
#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum EngineChoice {
    /// Stack output rows of increasing step depth until the rank settles.
    Algebraic,
    /// Split cells by successor cells until the partition is stable.
    Refine,
    /// Recurse on the graph shape (connected graphs only).
    Structural,
}

// ============================================================================
// Errors and exit codes
// ============================================================================

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Analysis(e) => match e.kind() {
                ErrorKind::Parse => 1,
                ErrorKind::Semantic => 2,
                ErrorKind::Precondition => 3,
            },
            CliError::Io { .. } => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Compile { file, dot, out } => cmd_compile(&file, dot, out.as_deref()),
        Command::Invariant {
            file,
            subset,
            function,
            engine,
            verify,
            dot,
            out,
        } => cmd_invariant(
            &file,
            subset.as_deref(),
            &function,
            engine,
            verify,
            dot,
            out.as_deref(),
        ),
        Command::Observability {
            file,
            construct_output,
            dot,
            out,
        } => cmd_observability(&file, construct_output, dot, out.as_deref()),
    }
}

// ============================================================================
// Input handling
// ============================================================================

/// A parsed input file: either a full network or a bare state graph.
enum Input {
    Network(BooleanNetwork),
    Graph(Stg),
}

impl Input {
    /// The state-transition graph of either input form.
    fn stg(&self) -> Stg {
        match self {
            Input::Network(net) => Stg::from_matrix(&net.transition_matrix())
                .expect("a transition matrix is always square"),
            Input::Graph(g) => g.clone(),
        }
    }
}

/// Variable cap for network parsing; `BN_MAX_VARS` overrides the default.
fn max_vars() -> usize {
    std::env::var("BN_MAX_VARS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_VARS)
}

fn load(path: &std::path::Path) -> Result<Input, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if text.trim_start().starts_with('{') {
        Ok(Input::Graph(Stg::from_json(&text)?))
    } else {
        Ok(Input::Network(BooleanNetwork::parse_with_limit(
            &text,
            max_vars(),
        )?))
    }
}

fn emit(out: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ============================================================================
// compile
// ============================================================================

fn cmd_compile(
    file: &std::path::Path,
    dot: bool,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let input = load(file)?;
    let g = input.stg();
    let text = if dot {
        g.to_dot()
    } else {
        format!("{}\n{}\n", g.to_matrix(), g.to_json())
    };
    emit(out, &text)
}

// ============================================================================
// invariant
// ============================================================================

/// What the invariant engines should start from: the joined starting
/// partition, plus the generating state sets one per requested function
/// (a single set for `--subset`), which the structural engine consumes.
struct Target {
    p0: Partition,
    pieces: Vec<Vec<usize>>,
}

fn parse_subset(arg: &str, n: usize) -> Result<Vec<usize>, CliError> {
    let mut idx = Vec::new();
    for part in arg.split(',') {
        let part = part.trim();
        let v: usize = part.parse().map_err(|_| {
            AnalysisError::InvalidIndexSet(format!("`{part}` is not a state index"))
        })?;
        if v < 1 || v > n {
            return Err(AnalysisError::InvalidIndexSet(format!(
                "state index {v} is out of range 1..={n}"
            ))
            .into());
        }
        idx.push(v);
    }
    idx.sort_unstable();
    idx.dedup();
    Ok(idx)
}

fn build_target(
    input: &Input,
    n: usize,
    subset: Option<&str>,
    functions: &[String],
) -> Result<Target, CliError> {
    if let Some(arg) = subset {
        let idx = parse_subset(arg, n)?;
        let p0 = Partition::from_subset(&idx, n)?;
        return Ok(Target {
            p0,
            pieces: vec![idx],
        });
    }
    let net = match input {
        Input::Network(net) => net,
        Input::Graph(_) => {
            return Err(AnalysisError::InvalidStructure(
                "function targets need a network input; raw graphs have no variables".into(),
            )
            .into())
        }
    };
    let mut p0 = Partition::one_cell(n);
    let mut pieces = Vec::new();
    for text in functions {
        let e = net.parse_expression(text)?;
        let m = net.expression_structure_matrix(&e);
        p0 = p0.join(&partition_of_dual(&m))?;
        pieces.push((1..=n).filter(|&j| m.col(j) == 1).collect());
    }
    Ok(Target { p0, pieces })
}

fn run_engine(engine: EngineChoice, g: &Stg, target: &Target) -> Result<InvariantResult, CliError> {
    match engine {
        EngineChoice::Algebraic => Ok(smallest_invariant_algebraic(
            &g.to_matrix(),
            &target.p0.to_characteristic(),
        )?),
        EngineChoice::Refine => Ok(coarsest_equitable_refinement(g, &target.p0)?),
        EngineChoice::Structural => {
            let mut acc: Option<InvariantResult> = None;
            for piece in &target.pieces {
                let next = structural_piece(g, piece)?;
                acc = Some(match acc {
                    None => next,
                    Some(prev) => union_invariant(g, &prev, &next)?,
                });
            }
            Ok(acc.expect("a target always has at least one piece"))
        }
    }
}

fn structural_piece(g: &Stg, piece: &[usize]) -> Result<InvariantResult, CliError> {
    if piece.is_empty() || piece.len() == g.n() {
        // Constant functions generate the trivial subspace.
        let partition = Partition::one_cell(g.n());
        let quotient_h = is_invariant(&g.to_matrix(), &partition.to_characteristic())?
            .expect("the one-cell partition is invariant for every graph");
        return Ok(InvariantResult {
            partition,
            quotient_h,
            iterations: 0,
        });
    }
    Ok(smallest_invariant_structural(g, piece)?)
}

/// Runs every applicable engine and insists the answers coincide. The
/// structural engine only covers connected graphs and, for multi-function
/// targets, reports its round count as zero, so those comparisons are
/// narrowed accordingly.
fn verify_engines(g: &Stg, target: &Target) -> Result<(), CliError> {
    let algebraic = run_engine(EngineChoice::Algebraic, g, target)?;
    let refine = run_engine(EngineChoice::Refine, g, target)?;
    assert!(
        algebraic.partition == refine.partition
            && algebraic.quotient_h == refine.quotient_h
            && algebraic.iterations == refine.iterations,
        "internal error: algebraic and refinement engines disagree"
    );
    if g.is_connected() {
        let structural = run_engine(EngineChoice::Structural, g, target)?;
        assert!(
            structural.partition == refine.partition && structural.quotient_h == refine.quotient_h,
            "internal error: structural engine disagrees"
        );
        if target.pieces.len() == 1 {
            assert!(
                structural.iterations == refine.iterations,
                "internal error: engines disagree on the round count"
            );
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct PartitionJson {
    n: usize,
    cells: Vec<Vec<usize>>,
}

#[derive(Serialize)]
struct InvariantJson {
    partition: PartitionJson,
    h: String,
    iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<bool>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_invariant(
    file: &std::path::Path,
    subset: Option<&str>,
    functions: &[String],
    engine: EngineChoice,
    verify: bool,
    dot: bool,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let input = load(file)?;
    let g = input.stg();
    let target = build_target(&input, g.n(), subset, functions)?;
    let result = run_engine(engine, &g, &target)?;
    if verify {
        verify_engines(&g, &target)?;
    }
    let text = if dot {
        let (q, _) = quotient(&WeightedDigraph::from(&g), &result.partition)?;
        q.to_dot()
    } else {
        let json = InvariantJson {
            partition: PartitionJson {
                n: result.partition.n(),
                cells: result.partition.cells(),
            },
            h: result.quotient_h.to_string(),
            iterations: result.iterations,
            verified: verify.then_some(true),
        };
        let mut line = serde_json::to_string(&json).expect("plain struct always serializes");
        line.push('\n');
        line
    };
    emit(out, &text)
}

// ============================================================================
// observability
// ============================================================================

#[derive(Serialize)]
struct ObservabilityJson {
    r0: usize,
    observable: bool,
    classes: Vec<Vec<usize>>,
    h: String,
}

/// DOT rendering of the state graph with vertices colored (or annotated,
/// past twelve symbols) by their output value.
fn colored_dot(g: &Stg, e: &LogicalMatrix) -> String {
    let mut text = String::from("digraph stg {\n");
    if e.rows() <= 12 {
        text.push_str("  node [style=filled, colorscheme=paired12];\n");
        for v in 1..=g.n() {
            let _ = writeln!(text, "  {} [fillcolor={}];", v, e.col(v));
        }
    } else {
        for v in 1..=g.n() {
            let _ = writeln!(text, "  {} [label=\"{} : {}\"];", v, v, e.col(v));
        }
    }
    for v in 1..=g.n() {
        let _ = writeln!(text, "  {} -> {};", v, g.succ(v));
    }
    text.push_str("}\n");
    text
}

fn cmd_observability(
    file: &std::path::Path,
    construct: bool,
    dot: bool,
    out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let input = load(file)?;
    let g = input.stg();
    if construct {
        let e = construct_observable_output(&g.to_matrix());
        let text = if dot {
            colored_dot(&g, &e)
        } else {
            format!("{e}\n")
        };
        return emit(out, &text);
    }
    let e = match &input {
        Input::Network(net) => net.output_matrix().ok_or_else(|| {
            AnalysisError::InvalidStructure(
                "the network declares no outputs; add some or pass --construct-output".into(),
            )
        })?,
        Input::Graph(_) => {
            return Err(AnalysisError::InvalidStructure(
                "raw graphs carry no outputs; pass --construct-output to build one".into(),
            )
            .into())
        }
    };
    let report = analyze(&ObservedBn::new(g.to_matrix(), e.clone())?);
    let text = if dot {
        colored_dot(&g, &e)
    } else {
        let json = ObservabilityJson {
            r0: report.index_r0,
            observable: report.observable,
            classes: report.classes.cells(),
            h: report.quotient_h.to_string(),
        };
        let mut line = serde_json::to_string(&json).expect("plain struct always serializes");
        line.push('\n');
        line
    };
    emit(out, &text)
}
