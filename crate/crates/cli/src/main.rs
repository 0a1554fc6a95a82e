use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use cubepaths::basesolver::{enumerate_classes, CensusFilter, CensusScope, EdgeCount, ParityClass};
use cubepaths::io::{ConnectorJson, SCHEMA_VERSION};
use cubepaths::solver::{gray_path, solve, GrayError, SolveConfig, SolveReport, Verdict};
use cubepaths::verify;
use cubepaths::{sample, Connector, PairSet, Vertex};

const EXIT_NEGATIVE: u8 = 2;
const EXIT_UNRESOLVED: u8 = 3;
const EXIT_BAD_INPUT: u8 = 64;
const EXIT_UNSUPPORTED: u8 = 65;
const MAX_DIM: u8 = 30;

#[derive(Parser)]
#[command(name = "cubepaths", version, about = "Disjoint path covers of hypercubes with prescribed endpoints")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    #[arg(long, global = true, env = "CUBEPATHS_SEED", default_value_t = 0)]
    seed: u64,
    /// Completion seeds tried per coordinate
    #[arg(long, global = true, default_value_t = 32)]
    retries: u32,
    /// Node budget of the last-resort search
    #[arg(long, global = true, default_value_t = 5_000_000)]
    fallback_budget: u64,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Include the strategy trail and statistics in solver output
    #[arg(long, global = true)]
    dump_trace: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Find a connector of a pair-set
    Solve {
        /// Pair-set JSON file, inline JSON, or `-` for stdin
        input: String,
        /// Accept any balanced pair-set, not only odd ones
        #[arg(long)]
        balanced: bool,
    },
    /// Check a connector against a pair-set (exit 0 valid, 1 invalid)
    Verify { pairs: String, connector: String },
    /// Structural facts about a pair-set
    Classify { input: String },
    /// Hamiltonian path between two vertices of opposite parity
    Gray {
        n: u8,
        /// Bitstring or integer
        from: String,
        to: String,
    },
    /// Enumerate isomorphism classes of small pair-sets and decide each
    Census(CensusArgs),
    /// Solve random odd pair-sets with at most n-1 pairs and time them
    Bench {
        #[arg(long, default_value_t = 5)]
        from: u8,
        #[arg(long, default_value_t = 10)]
        to: u8,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

#[derive(Args)]
struct CensusArgs {
    n: u8,
    /// Balanced pair-sets (even pairs allowed) instead of odd ones
    #[arg(long)]
    balanced: bool,
    #[arg(long, default_value_t = 1)]
    min_size: usize,
    #[arg(long)]
    max_size: Option<usize>,
    /// Exact number of edge pairs
    #[arg(long, conflicts_with = "min_edge_pairs")]
    edge_pairs: Option<usize>,
    #[arg(long)]
    min_edge_pairs: Option<usize>,
    /// Only pair-sets without encompassed vertices
    #[arg(long)]
    enc_empty: bool,
    #[arg(long)]
    diminishable: bool,
    /// Random samples instead of the full enumeration
    #[arg(long)]
    sampled: Option<usize>,
    /// Compare the non-connectable count against this number
    #[arg(long)]
    expect: Option<u64>,
    /// Write the census here instead of stdout
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Failure with a chosen exit code.
struct Exit(u8, anyhow::Error);

fn bad_input(e: impl Into<anyhow::Error>) -> Exit {
    Exit(EXIT_BAD_INPUT, e.into())
}

fn read_source(src: &str) -> anyhow::Result<String> {
    let t = src.trim_start();
    if t.starts_with('{') {
        return Ok(src.to_string());
    }
    if src == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(src).with_context(|| format!("reading {src}"))
}

fn read_pairs(src: &str) -> Result<PairSet, Exit> {
    let text = read_source(src).map_err(bad_input)?;
    let a: PairSet = serde_json::from_str(&text).context("parsing pair-set").map_err(bad_input)?;
    if a.dim() > MAX_DIM {
        return Err(Exit(EXIT_UNSUPPORTED, anyhow::anyhow!("dimension {} exceeds {MAX_DIM}", a.dim())));
    }
    Ok(a)
}

fn read_connector(src: &str) -> Result<Connector, Exit> {
    let text = read_source(src).map_err(bad_input)?;
    serde_json::from_str(&text).context("parsing connector").map_err(bad_input)
}

fn parse_vertex(s: &str, n: u8) -> Result<Vertex, Exit> {
    let v = if s.chars().all(|c| c == '0' || c == '1') && s.len() == n as usize {
        Vertex::parse_bitstring(s).map_err(bad_input)?
    } else {
        let x: u64 = s.parse().with_context(|| format!("vertex {s:?}")).map_err(bad_input)?;
        Vertex::new(x, n as u32).map_err(bad_input)?
    };
    Ok(v)
}

fn emit<W: Write + ?Sized>(out: &mut W, v: &Value) -> io::Result<()> {
    serde_json::to_writer(&mut *out, v)?;
    writeln!(out)
}

fn path_text(p: &[Vertex]) -> String {
    p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn config(opts: &Opts, require_odd: bool) -> SolveConfig {
    SolveConfig {
        seed: opts.seed,
        retries: opts.retries,
        fallback_budget: opts.fallback_budget,
        require_odd,
        ..SolveConfig::default()
    }
}

fn report_json(r: &SolveReport, dump_trace: bool) -> Value {
    let mut v = json!({ "schema_version": SCHEMA_VERSION });
    let verdict = match &r.verdict {
        Verdict::Connected { connector } => json!({ "verdict": "connected", "connector": ConnectorJson::from(connector) }),
        other => serde_json::to_value(other).expect("serializable verdict"),
    };
    merge(&mut v, verdict);
    if dump_trace {
        merge(&mut v, json!({ "trail": r.trail, "stats": r.stats }));
    }
    v
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn cmd_solve(opts: &Opts, input: &str, balanced: bool, out: &mut impl Write) -> Result<u8, Exit> {
    let a = read_pairs(input)?;
    let r = solve(&a, &config(opts, !balanced)).map_err(bad_input)?;
    let code = match r.verdict {
        Verdict::Connected { .. } => 0,
        Verdict::NonConnectable { .. } => EXIT_NEGATIVE,
        Verdict::Unresolved => EXIT_UNRESOLVED,
    };
    let io_err = |e: io::Error| Exit(1, e.into());
    match opts.format {
        Format::Json => emit(out, &report_json(&r, opts.dump_trace)).map_err(io_err)?,
        Format::Text => {
            match &r.verdict {
                Verdict::Connected { connector } => {
                    writeln!(out, "connected").map_err(io_err)?;
                    for p in connector.paths() {
                        writeln!(out, "{}", path_text(&p)).map_err(io_err)?;
                    }
                }
                Verdict::NonConnectable { obstruction } => {
                    writeln!(out, "non-connectable: {obstruction:?}").map_err(io_err)?;
                }
                Verdict::Unresolved => writeln!(out, "unresolved").map_err(io_err)?,
            }
            if opts.dump_trace {
                for t in &r.trail {
                    writeln!(out, "# depth {} n={} |A|={} {:?}", t.depth, t.dim, t.pairs, t.strategy).map_err(io_err)?;
                }
                writeln!(out, "# {:?}", r.stats).map_err(io_err)?;
            }
        }
    }
    Ok(code)
}

fn cmd_verify(opts: &Opts, pairs: &str, connector: &str, out: &mut impl Write) -> Result<u8, Exit> {
    let a = read_pairs(pairs)?;
    let c = read_connector(connector)?;
    let result = verify::check(&a, &c);
    let text = match (&result, opts.format) {
        (Ok(()), Format::Json) => json!({ "schema_version": SCHEMA_VERSION, "valid": true }).to_string(),
        (Err(v), Format::Json) => json!({ "schema_version": SCHEMA_VERSION, "valid": false, "violation": v }).to_string(),
        (Ok(()), Format::Text) => "valid".to_string(),
        (Err(v), Format::Text) => format!("invalid: {v}"),
    };
    writeln!(out, "{text}").map_err(|e| Exit(1, e.into()))?;
    Ok(if result.is_ok() { 0 } else { 1 })
}

fn cmd_classify(opts: &Opts, input: &str, out: &mut impl Write) -> Result<u8, Exit> {
    let a = read_pairs(input)?;
    let dim = a.is_diminishable().map_err(bad_input)?;
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "n": a.dim(),
        "size": a.len(),
        "odd": a.is_odd(),
        "balanced": a.is_balanced(),
        "chi": a.chi(),
        "edge_pairs": a.edge_pair_count(),
        "diminishable": dim.diminishable,
        "reason": dim.reason,
        "separating": a.separating_coordinates(),
        "bad": a.bad_coordinates(),
        "enc": a.enc(),
    });
    let io_err = |e: io::Error| Exit(1, e.into());
    match opts.format {
        Format::Json => emit(out, &v).map_err(io_err)?,
        Format::Text => {
            for (k, x) in v.as_object().expect("object") {
                writeln!(out, "{k}: {x}").map_err(io_err)?;
            }
        }
    }
    Ok(0)
}

fn cmd_gray(opts: &Opts, n: u8, from: &str, to: &str, out: &mut impl Write) -> Result<u8, Exit> {
    if n == 0 || n > MAX_DIM {
        return Err(Exit(EXIT_UNSUPPORTED, anyhow::anyhow!("dimension must be in 1..={MAX_DIM}")));
    }
    let (x, y) = (parse_vertex(from, n)?, parse_vertex(to, n)?);
    let path = match gray_path(x, y, opts.seed) {
        Ok(p) => p,
        Err(e @ GrayError::EvenDistance(..)) => {
            let v = json!({ "schema_version": SCHEMA_VERSION, "verdict": "non_connectable", "reason": "even_distance" });
            emit(out, &v).map_err(|e| Exit(1, e.into()))?;
            eprintln!("{e}");
            return Ok(EXIT_NEGATIVE);
        }
        Err(GrayError::Unresolved) => return Ok(EXIT_UNRESOLVED),
        Err(e) => return Err(bad_input(e)),
    };
    verify::check_gray_between(n, &path, x, y).map_err(|v| Exit(1, anyhow::anyhow!("internal error: {v}")))?;
    let io_err = |e: io::Error| Exit(1, e.into());
    match opts.format {
        Format::Json => emit(out, &json!({ "schema_version": SCHEMA_VERSION, "n": n, "path": path })).map_err(io_err)?,
        Format::Text => {
            for v in &path {
                writeln!(out, "{v}").map_err(io_err)?;
            }
        }
    }
    Ok(0)
}

fn cmd_census(opts: &Opts, args: &CensusArgs, out: &mut impl Write) -> Result<u8, Exit> {
    let max_size = args.max_size.unwrap_or(1 << args.n.saturating_sub(1).min(8));
    let mut filter = if args.balanced {
        CensusFilter::balanced(args.min_size, max_size)
    } else {
        CensusFilter::odd(args.min_size, max_size)
    };
    filter.edge_pairs = match (args.edge_pairs, args.min_edge_pairs) {
        (Some(k), _) => EdgeCount::Exactly(k),
        (None, Some(k)) => EdgeCount::AtLeast(k),
        (None, None) => EdgeCount::Any,
    };
    filter.enc_empty = args.enc_empty;
    filter.diminishable = args.diminishable;
    let scope = match args.sampled {
        Some(samples) => CensusScope::Sampled { samples, seed: opts.seed },
        None => CensusScope::Exhaustive,
    };
    let census = enumerate_classes(args.n, filter, scope).map_err(|e| Exit(EXIT_UNSUPPORTED, e.into()))?;
    let s = census.summary();
    let convention = args.expect.map(|want| {
        match (s.non_connectable_raw == want, s.non_connectable_classes as u64 == want) {
            (true, true) => "both",
            (true, false) => "raw",
            (false, true) => "classes",
            (false, false) => "none",
        }
    });
    let summary = json!({
        "schema_version": SCHEMA_VERSION,
        "summary": {
            "n": census.n,
            "parity": match filter.parity { ParityClass::Odd => "odd", ParityClass::Balanced => "balanced" },
            "scope": census.scope,
            "classes": s.classes,
            "raw": s.raw,
            "non_connectable_classes": s.non_connectable_classes,
            "non_connectable_raw": s.non_connectable_raw,
            "expected": args.expect,
            "matching_convention": convention,
        }
    });
    let io_err = |e: io::Error| Exit(1, e.into());
    let mut file;
    let w: &mut dyn Write = match &args.output {
        Some(p) => {
            file = BufWriter::new(std::fs::File::create(p).map_err(io_err)?);
            &mut file
        }
        None => out,
    };
    match opts.format {
        Format::Json => {
            census.write_jsonl(&mut *w).map_err(io_err)?;
            emit(w, &summary).map_err(io_err)?;
        }
        Format::Text => {
            for r in census.non_connectable() {
                let pairs: Vec<String> = r.class.pairs().iter().map(|p| format!("{}-{}", p.a(), p.b())).collect();
                writeln!(w, "non-connectable  {}  (orbit {}, generated {})", pairs.join(" "), r.orbit_size, r.raw_count).map_err(io_err)?;
            }
            writeln!(
                w,
                "classes {} (raw {}), non-connectable classes {} (raw {})",
                s.classes, s.raw, s.non_connectable_classes, s.non_connectable_raw
            )
            .map_err(io_err)?;
            if let (Some(want), Some(c)) = (args.expect, convention) {
                writeln!(w, "expected {want}: matching convention {c}").map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)?;
    Ok(0)
}

fn cmd_bench(opts: &Opts, from: u8, to: u8, samples: usize, out: &mut impl Write) -> Result<u8, Exit> {
    if from < 2 || to > MAX_DIM || from > to {
        return Err(Exit(EXIT_UNSUPPORTED, anyhow::anyhow!("dimension range must lie in 2..={MAX_DIM}")));
    }
    let io_err = |e: io::Error| Exit(1, e.into());
    let mut worst = 0;
    for n in from..=to {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ u64::from(n) << 32);
        let mut times = Vec::with_capacity(samples);
        let (mut connected, mut negative, mut unresolved, mut verified) = (0usize, 0usize, 0usize, 0usize);
        for k in 0..samples {
            let size = rng.gen_range(1..n as usize);
            let a = sample::random_odd(n, size, &mut rng);
            let cfg = SolveConfig { seed: opts.seed.wrapping_add(k as u64), ..config(opts, true) };
            let t = Instant::now();
            let r = solve(&a, &cfg).map_err(bad_input)?;
            times.push(t.elapsed().as_secs_f64() * 1e3);
            match &r.verdict {
                Verdict::Connected { connector } => {
                    connected += 1;
                    verified += usize::from(verify::check(&a, connector).is_ok());
                }
                Verdict::NonConnectable { .. } => negative += 1,
                Verdict::Unresolved => unresolved += 1,
            }
        }
        times.sort_by(f64::total_cmp);
        let median = times.get(times.len() / 2).copied().unwrap_or(0.0);
        let max = times.last().copied().unwrap_or(0.0);
        let pass_rate = if connected == 0 { 1.0 } else { verified as f64 / connected as f64 };
        if unresolved > 0 {
            worst = EXIT_UNRESOLVED;
        }
        match opts.format {
            Format::Json => emit(
                out,
                &json!({
                    "schema_version": SCHEMA_VERSION,
                    "n": n,
                    "samples": samples,
                    "connected": connected,
                    "non_connectable": negative,
                    "unresolved": unresolved,
                    "verification_pass_rate": pass_rate,
                    "median_ms": median,
                    "max_ms": max,
                }),
            )
            .map_err(io_err)?,
            Format::Text => writeln!(
                out,
                "n={n:2} samples={samples} connected={connected} non-connectable={negative} unresolved={unresolved} verified={:.1}% median={median:.2}ms max={max:.2}ms",
                pass_rate * 100.0
            )
            .map_err(io_err)?,
        }
    }
    Ok(worst)
}

fn run(cli: &Cli) -> Result<u8, Exit> {
    if let Some(t) = cli.opts.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(bad_input)?;
    }
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let opts = &cli.opts;
    let code = match &cli.command {
        Command::Solve { input, balanced } => cmd_solve(opts, input, *balanced, &mut out),
        Command::Verify { pairs, connector } => cmd_verify(opts, pairs, connector, &mut out),
        Command::Classify { input } => cmd_classify(opts, input, &mut out),
        Command::Gray { n, from, to } => cmd_gray(opts, *n, from, to, &mut out),
        Command::Census(args) => cmd_census(opts, args, &mut out),
        Command::Bench { from, to, samples } => cmd_bench(opts, *from, *to, *samples, &mut out),
    }?;
    out.flush().map_err(|e| Exit(1, e.into()))?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertices_parse_as_bits_or_integers() {
        assert_eq!(parse_vertex("011", 3).ok().map(|v| v.bits()), Some(6));
        assert_eq!(parse_vertex("6", 3).ok().map(|v| v.bits()), Some(6));
        assert!(parse_vertex("9", 3).is_err());
    }

    #[test]
    fn inline_json_is_not_a_path() {
        assert_eq!(read_source(r#" {"n":1}"#).unwrap(), r#" {"n":1}"#);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
