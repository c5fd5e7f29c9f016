//! Command-line front end: model checking, benchmark generation, and the
//! ordered-partition counting formulas.
//!
//! Exit status: 0 when a verdict was computed (the verdict itself is in the
//! report, so scripts can tell "tool failed" from "property false"), 2 when
//! a search limit was exceeded, 1 on usage, parse or validation errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tarzan_core::bench::{canonical_query, gen_boolean, gen_flower, gen_gates, gen_ring};
use tarzan_core::explore::{
    backward_reach, forward_reach, Direction, SearchConfig, SearchStats, Strategy, Verdict,
};
use tarzan_core::model::AutomatonDef;
use tarzan_core::oracle::{fubini, lemma1_bound, stirling2};
use tarzan_core::textio::{
    parse_model, parse_pattern, parse_query, render_model, stats_json, stats_text, ModelSource,
};

#[derive(Parser)]
#[command(
    name = "tarzan",
    version,
    about = "Region-based forward and backward reachability for timed automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a reachability query (forward) or a region pattern (backward)
    Check(CheckArgs),
    /// Generate a benchmark model family and print its canonical query
    Gen(GenArgs),
    /// Evaluate the ordered-partition counting formulas
    Math(MathArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Dfs,
    Bfs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StatsArg {
    Text,
    Json,
}

#[derive(Args)]
struct CheckArgs {
    /// Model file (.ta); repeat the flag to form a network
    #[arg(long = "model", value_name = "FILE", required = true)]
    models: Vec<PathBuf>,
    /// Query string `E<> (...)` or `@FILE`
    #[arg(long)]
    query: Option<String>,
    /// Region-pattern file (.pat) seeding a backward search
    #[arg(long, value_name = "FILE")]
    pattern: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StrategyArg::Dfs)]
    strategy: StrategyArg,
    #[arg(long, value_enum)]
    direction: Option<DirectionArg>,
    /// Stop after generating this many regions
    #[arg(long = "max-regions", value_name = "N")]
    max_regions: Option<usize>,
    /// Stop after this many milliseconds
    #[arg(long = "max-ms", value_name = "T")]
    max_ms: Option<u64>,
    #[arg(long, value_enum, default_value_t = StatsArg::Text)]
    stats: StatsArg,
    /// Accelerate backward delay chains by whole periods where sound
    #[arg(long = "delay-skip")]
    delay_skip: bool,
}

#[derive(Args)]
struct GenArgs {
    /// flower, boolean, ring or gates
    family: String,
    /// Size parameter (clock count for flower, component count otherwise)
    size: u32,
    /// Output directory for the generated .ta files
    #[arg(short, long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct MathArgs {
    #[command(subcommand)]
    op: MathOp,
}

#[derive(Subcommand)]
enum MathOp {
    /// Ordered set partitions of an n-element set
    Fubini { n: u64 },
    /// Stirling numbers of the second kind
    Stirling { n: u64, k: u64 },
    /// Upper bound on discrete predecessors over one transition
    Lemma1 { n: u64, c_m: u64 },
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("error: {}", message);
    ExitCode::from(1)
}

fn run_check(args: &CheckArgs) -> ExitCode {
    let direction = match (&args.query, &args.pattern, args.direction) {
        (Some(_), Some(_), _) => return usage_error("give either --query or --pattern, not both"),
        (None, None, _) => return usage_error("one of --query or --pattern is required"),
        (Some(_), None, Some(DirectionArg::Backward)) => {
            return usage_error("backward reachability takes a --pattern, not a --query")
        }
        (None, Some(_), Some(DirectionArg::Forward)) => {
            return usage_error("a --pattern implies backward reachability")
        }
        (Some(_), None, _) => Direction::Forward,
        (None, Some(_), _) => Direction::Backward,
    };
    if direction == Direction::Backward && args.models.len() > 1 {
        return usage_error("backward reachability supports a single automaton");
    }

    let mut sources = Vec::new();
    for path in &args.models {
        match fs::read_to_string(path) {
            Ok(text) => sources.push(ModelSource::new(path.display().to_string(), text)),
            Err(e) => return usage_error(&format!("cannot read {}: {}", path.display(), e)),
        }
    }
    let net = match parse_model(&sources) {
        Ok(net) => net,
        Err(diags) => {
            for d in diags {
                eprintln!("error: {}", d);
            }
            return ExitCode::from(1);
        }
    };
    log::info!(
        "linked {} automaton(s), {} clocks, {} integer variables",
        net.components.len(),
        net.clock_count(),
        net.vars.len()
    );

    let cfg = SearchConfig {
        strategy: match args.strategy {
            StrategyArg::Dfs => Strategy::Dfs,
            StrategyArg::Bfs => Strategy::Bfs,
        },
        direction,
        max_regions: args.max_regions,
        max_millis: args.max_ms,
        delay_skip: args.delay_skip,
    };

    let stats: SearchStats = match direction {
        Direction::Forward => {
            let text = args.query.as_ref().unwrap();
            let text = if let Some(path) = text.strip_prefix('@') {
                match fs::read_to_string(path) {
                    Ok(t) => t,
                    Err(e) => return usage_error(&format!("cannot read {}: {}", path, e)),
                }
            } else {
                text.clone()
            };
            let query = match parse_query(text.trim(), &net) {
                Ok(q) => q,
                Err(d) => {
                    eprintln!("error: {}", d);
                    return ExitCode::from(1);
                }
            };
            match forward_reach(&net, &query, &cfg) {
                Ok(stats) => stats,
                Err(e) => {
                    eprintln!("error: {}", e);
                    return ExitCode::from(1);
                }
            }
        }
        Direction::Backward => {
            let path = args.pattern.as_ref().unwrap();
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return usage_error(&format!("cannot read {}: {}", path.display(), e)),
            };
            let pattern = match parse_pattern(&text, &net) {
                Ok(p) => p,
                Err(d) => {
                    eprintln!("error: {}", d);
                    return ExitCode::from(1);
                }
            };
            match backward_reach(&net, &pattern, &cfg) {
                Ok(stats) => stats,
                Err(e) => {
                    eprintln!("error: {}", e);
                    return ExitCode::from(1);
                }
            }
        }
    };

    match args.stats {
        StatsArg::Text => print!("{}", stats_text(&stats)),
        StatsArg::Json => println!("{}", stats_json(&stats)),
    }
    if stats.verdict == Verdict::LimitExceeded {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn write_defs(dir: &Path, stem: &str, defs: &[AutomatonDef]) -> Result<Vec<PathBuf>, String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {}", dir.display(), e))?;
    let mut paths = Vec::new();
    for def in defs {
        let name = if defs.len() == 1 {
            format!("{}.ta", stem)
        } else {
            format!("{}_{}.ta", stem, def.name)
        };
        let path = dir.join(name);
        fs::write(&path, render_model(def))
            .map_err(|e| format!("cannot write {}: {}", path.display(), e))?;
        paths.push(path);
    }
    Ok(paths)
}

fn run_gen(args: &GenArgs) -> ExitCode {
    let defs = match (args.family.as_str(), args.size) {
        ("flower", n) if n >= 1 => vec![gen_flower(n)],
        ("boolean", k) if k >= 2 => gen_boolean(k),
        ("ring", k) if k >= 2 => gen_ring(k),
        ("gates", k) if k >= 2 => gen_gates(k),
        ("flower" | "boolean" | "ring" | "gates", k) => {
            return usage_error(&format!("size {} is too small for {}", k, args.family))
        }
        (other, _) => return usage_error(&format!("unknown family '{}'", other)),
    };
    let stem = format!("{}{}", args.family, args.size);
    match write_defs(&args.out, &stem, &defs) {
        Ok(paths) => {
            for p in &paths {
                println!("wrote {}", p.display());
            }
            println!("query: {}", canonical_query(&args.family, args.size));
            ExitCode::SUCCESS
        }
        Err(msg) => usage_error(&msg),
    }
}

fn run_math(args: &MathArgs) -> ExitCode {
    match args.op {
        MathOp::Fubini { n } => println!("{}", fubini(n)),
        MathOp::Stirling { n, k } => println!("{}", stirling2(n, k)),
        MathOp::Lemma1 { n, c_m } => println!("{}", lemma1_bound(n, c_m)),
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("TARZAN_LOG")).init();
    let cli = Cli::parse();
    match &cli.command {
        Command::Check(args) => run_check(args),
        Command::Gen(args) => run_gen(args),
        Command::Math(args) => run_math(args),
    }
}
