//! `rbd`: generate worlds, describe and resolve nodes, encode messages and
//! run experiment sweeps.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data or parse
//! error.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rbd_core::describe::{
    build_extended_description, rewrite_adjacency_for_depth, SelectionStrategy, SharedContext, Vocabulary,
};
use rbd_core::experiments::{self, SweepConfig, SweepKind, DEFAULT_SEED};
use rbd_core::graph::{
    generate_clique, generate_er_labeled, generate_path, generate_ring_regular, parse_graph, write_graph,
    LabelAlphabet, LabelDistribution, WorldGraph,
};
use rbd_core::info::{empirical_label_entropy, joint_stats_of};
use rbd_core::protocol::{decode_wire, encode_message, resolve_message, Message, NodeRef, Triple};

use config::{parse_f64s, parse_usizes, ConfigFile};

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<rbd_core::Error> for CliError {
    fn from(e: rbd_core::Error) -> Self {
        match e {
            rbd_core::Error::InvalidInput(_) => CliError::usage(e.to_string()),
            _ => CliError::data(e.to_string()),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "rbd", version, about = "Reference by description over labeled graphs")]
struct Cli {
    /// Seed; falls back to the config file, then $RBD_SEED, then 7.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Flat key=value file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print diagnostics to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated world graph.
    Generate(GenerateArgs),
    /// Print the description of a node.
    Describe(DescribeArgs),
    /// Build and encode a message of triples.
    Encode(EncodeArgs),
    /// Resolve every reference of an encoded message.
    Resolve(ResolveArgs),
    /// Run an experiment sweep and write its report.
    Sweep(SweepArgs),
    /// Run the hand-built reference scenarios.
    Fixtures(FixturesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Generator {
    Er,
    Clique,
    Ring,
    Path,
}

#[derive(Args)]
struct GenerateArgs {
    generator: Generator,
    #[arg(long)]
    n: usize,
    /// ER label probabilities, e.g. `P:0.5,Q:0.2`; null takes the rest.
    #[arg(long, default_value = "P:0.5")]
    labels: String,
    /// Arc label for clique, ring and path graphs.
    #[arg(long, default_value = "P")]
    label: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DescribeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    node: usize,
    /// Shared node ids in slot order.
    #[arg(long, value_delimiter = ',')]
    shared: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    depth: usize,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_delimiter = ',')]
    shared: Vec<usize>,
    /// `SOURCE:LABEL:TARGET` with node ids; shared nodes go by name.
    #[arg(long = "triple", required = true)]
    triples: Vec<String>,
    #[arg(long, default_value_t = 0)]
    depth: usize,
    /// Trailing shared anchors used as redundant description slots.
    #[arg(long, default_value_t = 0)]
    redundancy: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ResolveArgs {
    #[arg(long)]
    message: PathBuf,
    /// Receiver's view.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_delimiter = ',')]
    shared: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    depth: usize,
    /// Sender's view; enables maximum-likelihood fallback using the joint
    /// label statistics of the two views.
    #[arg(long)]
    sender: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(value_parser = ["collision", "threshold", "noisy", "overhead"])]
    kind: String,
    /// Node counts, `256,1024` or `a..b[:step]`.
    #[arg(long)]
    n: Option<String>,
    /// Label distributions separated by `;`, each like `P:0.5`.
    #[arg(long)]
    labels: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    strategy: Option<String>,
    #[arg(long)]
    redundancy: Option<usize>,
    #[arg(long)]
    pairs: Option<usize>,
    /// Point CSV.
    #[arg(long)]
    out: PathBuf,
    /// Knee CSV.
    #[arg(long)]
    knees: Option<PathBuf>,
    /// JSON report with the effective config.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Include per-trial arrays in the JSON report.
    #[arg(long, requires = "json")]
    full: bool,
}

#[derive(Args)]
struct FixturesArgs {
    /// Directory for fixture graphs and messages.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> CliResult<WorldGraph> {
    parse_graph(&read_text(path)?).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult {
    fs::write(path, bytes).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn check_output(path: &Path) -> CliResult {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(CliError::usage(format!(
            "output directory {} does not exist",
            dir.display()
        ))),
        _ => Ok(()),
    }
}

fn context(shared: &[usize], n: usize) -> CliResult<SharedContext> {
    Ok(SharedContext::new(shared.to_vec(), n)?)
}

fn resolve_seed(flag: Option<u64>, file: &ConfigFile) -> CliResult<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = file.get("seed") {
        return s
            .parse()
            .map_err(|_| CliError::usage(format!("bad seed {s:?} in config")));
    }
    match std::env::var("RBD_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad RBD_SEED {s:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn cmd_generate(args: &GenerateArgs, seed: u64) -> CliResult {
    check_output(&args.out)?;
    let single = || LabelAlphabet::new([args.label.as_str()]);
    let g = match args.generator {
        Generator::Er => generate_er_labeled(args.n, &LabelDistribution::parse(&args.labels)?, seed)?,
        Generator::Clique => generate_clique(args.n, &single()?, 1)?,
        Generator::Ring => generate_ring_regular(args.n, &single()?, 1)?,
        Generator::Path => generate_path(args.n, &single()?, 1)?,
    };
    write_file(&args.out, write_graph(&g))?;
    let h: f64 = empirical_label_entropy(&g);
    println!("n={} arcs={} H={h:.4} bits", g.n(), g.arc_count());
    Ok(())
}

fn cmd_describe(args: &DescribeArgs) -> CliResult {
    let g = read_graph(&args.graph)?;
    if args.node >= g.n() {
        return Err(CliError::usage(format!(
            "unknown node {} (graph has {})",
            args.node,
            g.n()
        )));
    }
    let ctx = context(&args.shared, g.n())?;
    let vocab = Vocabulary::new(g.alphabet(), args.depth)?;
    let d = build_extended_description(&g, args.node, &ctx, args.depth)?;
    let h: f64 = if args.depth == 0 {
        empirical_label_entropy(&g)
    } else {
        empirical_label_entropy(&rewrite_adjacency_for_depth(&g, args.depth)?.0)
    };
    println!("{}", d.render(&vocab));
    println!(
        "symbols={} bits≈{:.3} (H={h:.4} bits/symbol)",
        d.len(),
        d.len() as f64 * h
    );
    Ok(())
}

fn parse_triple(s: &str, g: &WorldGraph) -> CliResult<(usize, u16, usize)> {
    let bad = || CliError::usage(format!("triple {s:?} is not SOURCE:LABEL:TARGET"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, l, b] = parts[..] else { return Err(bad()) };
    let node = |v: &str| -> CliResult<usize> {
        let id: usize = v.trim().parse().map_err(|_| bad())?;
        if id >= g.n() {
            return Err(CliError::usage(format!("unknown node {id}")));
        }
        Ok(id)
    };
    let label = g
        .alphabet()
        .index_of(l.trim())
        .filter(|&l| l != 0)
        .ok_or_else(|| CliError::usage(format!("unknown label {l:?}")))?;
    Ok((node(a)?, label, node(b)?))
}

fn cmd_encode(args: &EncodeArgs) -> CliResult {
    check_output(&args.out)?;
    let g = read_graph(&args.graph)?;
    let ctx = context(&args.shared, g.n())?;
    if args.redundancy >= ctx.len() {
        return Err(CliError::usage(format!(
            "redundancy {} leaves no base slot among {} shared nodes",
            args.redundancy,
            ctx.len()
        )));
    }
    let base = ctx.len() - args.redundancy;
    let vocab = Vocabulary::new(g.alphabet(), args.depth)?;
    let node_ref = |x: usize| -> CliResult<NodeRef> {
        if ctx.contains(x) {
            Ok(NodeRef::SharedName(x))
        } else {
            Ok(NodeRef::describe(&g, x, &ctx, args.depth, base, args.redundancy)?)
        }
    };
    let mut triples = Vec::new();
    for t in &args.triples {
        let (a, l, b) = parse_triple(t, &g)?;
        triples.push(Triple::new(node_ref(a)?, l, node_ref(b)?));
    }
    let (bytes, stats) = encode_message(&Message::new(triples), g.n(), &ctx, vocab.len())?;
    write_file(&args.out, &bytes)?;
    println!(
        "bytes={} raw_bits={} coded_bits={} baseline_bits={:.3} overhead={:.4}",
        stats.wire_bytes, stats.raw_bits, stats.entropy_coded_bits, stats.baseline_bits, stats.overhead_factor
    );
    Ok(())
}

fn cmd_resolve(args: &ResolveArgs) -> CliResult {
    let bytes = fs::read(&args.message).map_err(|e| CliError::usage(format!("{}: {e}", args.message.display())))?;
    let receiver = read_graph(&args.graph)?;
    let sender = args.sender.as_deref().map(read_graph).transpose()?;
    let (header, msg) = decode_wire(&bytes).map_err(|e| CliError::data(format!("{}: {e}", args.message.display())))?;
    if header.n != receiver.n() {
        return Err(CliError::data(format!(
            "message is for {} nodes, graph has {}",
            header.n,
            receiver.n()
        )));
    }
    if header.k != args.shared.len() {
        return Err(CliError::usage(format!(
            "message uses {} shared anchors, {} given",
            header.k,
            args.shared.len()
        )));
    }
    let ctx = context(&args.shared, receiver.n())?;
    let stats = sender.as_ref().map(|s| joint_stats_of(s, &receiver)).transpose()?;
    for (i, r) in resolve_message(&msg, &receiver, &ctx, args.depth, stats.as_ref())?
        .iter()
        .enumerate()
    {
        for (role, res) in [("source", r.source), ("target", r.target)] {
            let node = res.node.map_or("-".to_string(), |v| v.to_string());
            println!("{i} {role} {node} {}", res.flag.name());
        }
    }
    Ok(())
}

fn sweep_config(args: &SweepArgs, file: &ConfigFile, seed: u64) -> CliResult<SweepConfig> {
    let pick = |flag: &Option<String>, key: &str| flag.clone().or_else(|| file.get(key).map(str::to_string));
    let pick_num = |flag: Option<usize>, key: &str| -> CliResult<Option<usize>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => file
                .get(key)
                .map(|s| {
                    s.parse()
                        .map_err(|_| CliError::usage(format!("bad {key} {s:?} in config")))
                })
                .transpose(),
        }
    };
    let mut cfg = SweepConfig {
        seed,
        ..SweepConfig::default()
    };
    if let Some(s) = pick(&args.n, "n") {
        cfg.n_values = parse_usizes(&s, "n")?;
    }
    if let Some(s) = pick(&args.labels, "labels") {
        cfg.labels = s
            .split(';')
            .map(|d| LabelDistribution::parse(d.trim()))
            .collect::<rbd_core::Result<_>>()?;
    }
    if let Some(s) = pick(&args.eps, "eps") {
        cfg.eps_values = parse_f64s(&s, "eps")?;
    }
    if let Some(s) = pick(&args.k, "k") {
        cfg.k_values = parse_usizes(&s, "k")?;
    }
    if let Some(s) = pick(&args.g, "g") {
        cfg.g_values = parse_f64s(&s, "g")?;
    }
    if let Some(s) = pick(&args.strategy, "strategy") {
        cfg.strategy = SelectionStrategy::parse(&s)?;
    }
    cfg.depth = pick_num(args.depth, "depth")?.unwrap_or(cfg.depth);
    cfg.trials = pick_num(args.trials, "trials")?.unwrap_or(cfg.trials);
    cfg.redundancy = pick_num(args.redundancy, "redundancy")?.unwrap_or(cfg.redundancy);
    cfg.pairs = pick_num(args.pairs, "pairs")?.unwrap_or(cfg.pairs);
    Ok(cfg)
}

fn cmd_sweep(args: &SweepArgs, file: &ConfigFile, seed: u64, verbose: bool) -> CliResult {
    for path in [Some(&args.out), args.knees.as_ref(), args.json.as_ref()]
        .into_iter()
        .flatten()
    {
        check_output(path)?;
    }
    let kind = SweepKind::parse(&args.kind)?;
    let cfg = sweep_config(args, file, seed)?;
    cfg.validate(kind)?;
    let started = Instant::now();
    let report = experiments::run_sweep(kind, &cfg)?;
    if verbose {
        eprintln!(
            "{} sweep: {} points in {:.2?}",
            kind.name(),
            report.points.len(),
            started.elapsed()
        );
    }
    write_file(&args.out, report.to_csv()?)?;
    if let Some(path) = &args.knees {
        write_file(path, report.knees_csv()?)?;
    }
    if let Some(path) = &args.json {
        write_file(path, report.to_json(args.full)?)?;
    }
    println!("{} points written to {}", report.points.len(), args.out.display());
    Ok(())
}

fn cmd_fixtures(args: &FixturesArgs) -> CliResult {
    if let Some(dir) = &args.out {
        if !dir.is_dir() {
            return Err(CliError::usage(format!("{} is not a directory", dir.display())));
        }
        for f in experiments::fixtures() {
            write_file(&dir.join(format!("{}.sender.graph", f.name)), write_graph(&f.sender))?;
            write_file(
                &dir.join(format!("{}.receiver.graph", f.name)),
                write_graph(&f.receiver),
            )?;
            if let Some(msg) = &f.message {
                let m_voc = Vocabulary::new(f.sender.alphabet(), f.depth)?.len();
                let (bytes, _) = encode_message(msg, f.sender.n(), &f.ctx, m_voc)?;
                write_file(&dir.join(format!("{}.msg", f.name)), bytes)?;
            }
        }
    }
    let shared: Vec<(String, String)> = experiments::fixtures()
        .iter()
        .map(|f| {
            let ids: Vec<String> = f.ctx.nodes().iter().map(|v| v.to_string()).collect();
            (f.name.to_string(), ids.join(","))
        })
        .collect();
    for (o, (_, ids)) in experiments::figure_fixtures().iter().zip(&shared) {
        let verdict = if o.passed { "pass" } else { "FAIL" };
        println!("{} {verdict} shared=[{ids}] {}: {}", o.name, o.caption, o.detail);
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult {
    let file = match &cli.config {
        Some(path) => ConfigFile::parse(&read_text(path)?)?,
        None => ConfigFile::default(),
    };
    let seed = resolve_seed(cli.seed, &file)?;
    match &cli.command {
        Command::Generate(a) => cmd_generate(a, seed),
        Command::Describe(a) => cmd_describe(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Resolve(a) => cmd_resolve(a),
        Command::Sweep(a) => cmd_sweep(a, &file, seed, cli.verbose),
        Command::Fixtures(a) => cmd_fixtures(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.jobs {
        Some(0) => Err(CliError::usage("--jobs must be ≥ 1")),
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(CliError::usage(format!("thread pool: {e}"))),
        },
        None => run(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rbd: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
