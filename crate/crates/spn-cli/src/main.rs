//! Command-line front end: validate models, run simulations, query state,
//! unfold to a plain colored net, and drive the bundled scenarios.
//!
//! Exit codes: 0 success, 1 validation or verdict failure, 2 usage error.
//! Input files are never mutated; all outputs go to `--out`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use spn_core::cases::{
    self, assess_terminal_state, generate_construction_model, model_shape, parse_schedule,
    BuildingSpec, Feasibility,
};
use spn_core::model::{load_model, SpnModel};
use spn_core::rdf::{parse_turtle, serialize_turtle, Graph};
use spn_core::runtime::{render_event_log, EngineConfig, Runtime};
use spn_core::sparql::QueryResult;
use spn_core::unfold::{
    explore, export_cpn_json, export_reachability_json, unfold, MutableDeclaration,
};

#[derive(Parser)]
#[command(name = "spn", version, about = "Semantic Petri-net engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate model files.
    Validate {
        /// Turtle model files.
        #[arg(long = "model", required = true, num_args = 1..)]
        models: Vec<PathBuf>,
    },
    /// Simulate a model and write stats, event log and final snapshot.
    Run {
        #[arg(long)]
        model: PathBuf,
        /// Engine config (TOML).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Scheduler seed; overrides the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Tick limit; overrides the config file.
        #[arg(long)]
        ticks: Option<u64>,
        /// Enforce color rules on every produced token.
        #[arg(long = "strict-colors")]
        strict_colors: bool,
    },
    /// Evaluate a query file against a model or snapshot.
    Query {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        query: PathBuf,
    },
    /// Unfold a model into a plain colored net and explore it.
    Unfold {
        #[arg(long)]
        model: PathBuf,
        /// Mutable-predicate declaration file.
        #[arg(long)]
        mutable: Option<PathBuf>,
        /// Maximum vocabulary size eligible for tabulation.
        #[arg(long = "vocab-bound", default_value_t = 300)]
        vocab_bound: usize,
        /// Reachability state bound.
        #[arg(long, default_value_t = 10_000)]
        bound: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate the construction-process model from a building spec and a
    /// schedule.
    ConstructionGen {
        /// Building spec (TOML); defaults apply when omitted.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Schedule file: `level,discipline,start,end` lines.
        #[arg(long)]
        schedule: PathBuf,
        /// Output model file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run checking pipes over a data graph.
    Pipes(PipesArgs),
}

#[derive(Args)]
struct PipesArgs {
    /// Data graph (Turtle). Omit to use generated data.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Pipe definitions: `pipe <name> <class> <property>` lines. Omit to
    /// derive property-existence pipes for generated data.
    #[arg(long)]
    pipes: Option<PathBuf>,
    /// Synthetic data shape, used when --data is omitted.
    #[arg(long, default_value_t = 10)]
    classes: usize,
    #[arg(long, default_value_t = 10)]
    entities: usize,
    #[arg(long = "with-property", default_value_t = 7)]
    with_property: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report output directory; stdout only when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { models } => cmd_validate(&models),
        Command::Run {
            model,
            config,
            out,
            seed,
            ticks,
            strict_colors,
        } => cmd_run(&model, config.as_deref(), &out, seed, ticks, strict_colors),
        Command::Query { model, query } => cmd_query(&model, &query),
        Command::Unfold {
            model,
            mutable,
            vocab_bound,
            bound,
            out,
        } => cmd_unfold(&model, mutable.as_deref(), vocab_bound, bound, &out),
        Command::ConstructionGen {
            spec,
            schedule,
            out,
        } => cmd_construction_gen(spec.as_deref(), &schedule, &out),
        Command::Pipes(args) => cmd_pipes(&args),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph> {
    let text = read(path)?;
    parse_turtle(&text, None).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn cmd_validate(models: &[PathBuf]) -> Result<ExitCode> {
    let mut failed = false;
    for path in models {
        let graph = load_graph(path)?;
        match load_model(graph) {
            Ok(model) if model.is_empty() => {
                failed = true;
                println!("{}: no SPN nodes found", path.display());
            }
            Ok(model) => {
                let (places, transitions, arcs) = model_shape(&model);
                println!(
                    "{}: ok ({places} places, {transitions} transitions, {arcs} arcs)",
                    path.display()
                );
            }
            Err(e) => {
                failed = true;
                println!("{}: invalid", path.display());
                for err in &e.errors {
                    println!("  - {err}");
                }
            }
        }
    }
    Ok(exit_flag(failed))
}

fn exit_flag(failed: bool) -> ExitCode {
    if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn build_config(
    config: Option<&Path>,
    seed: Option<u64>,
    ticks: Option<u64>,
    strict_colors: bool,
) -> Result<EngineConfig> {
    let mut cfg = match config {
        Some(path) => EngineConfig::from_toml(&read(path)?)?,
        None => EngineConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.scheduler_seed = seed;
    }
    if let Some(ticks) = ticks {
        cfg.max_ticks = ticks;
    }
    if strict_colors {
        cfg.strict_color_check = true;
    }
    Ok(cfg)
}

/// Models whose places carry state tags get a schedule verdict after the
/// run.
fn has_state_tags(model: &SpnModel) -> bool {
    let tag = spn_core::Term::iri(format!("{}stateTag", spn_core::rdf::vocab::BIMSN_NS));
    model.places.values().any(|p| p.annotations.contains_key(&tag))
}

fn cmd_run(
    model_path: &Path,
    config: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
    ticks: Option<u64>,
    strict_colors: bool,
) -> Result<ExitCode> {
    let graph = load_graph(model_path)?;
    let cfg = build_config(config, seed, ticks, strict_colors)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;

    let model = match load_model(graph) {
        Ok(m) => m,
        Err(e) => {
            println!("{e}");
            return Ok(ExitCode::from(1));
        }
    };
    let judge = has_state_tags(&model);
    let cfg = if judge {
        EngineConfig {
            allow_shared_tokens: true,
            ..cfg
        }
    } else {
        cfg
    };
    let mut runtime = Runtime::new(model, cfg);
    let stats = runtime.run().map_err(|e| anyhow::anyhow!("run failed: {e}"))?;

    fs::write(out.join("stats.txt"), stats.report())?;
    fs::write(out.join("events.ndjson"), render_event_log(runtime.events()))?;
    fs::write(out.join("final.ttl"), runtime.snapshot_turtle())?;

    println!(
        "{} ticks, {} firings, {} rule checks ({} ms)",
        stats.ticks_elapsed,
        stats.firings,
        stats.rule_checks,
        stats.wall_time.as_millis()
    );

    if judge {
        let verdict = assess_terminal_state(&mut runtime)
            .map_err(|e| anyhow::anyhow!("verdict failed: {e}"))?;
        fs::write(out.join("verdict.txt"), verdict.report())?;
        println!(
            "verdict: {}",
            match verdict.feasibility {
                Feasibility::Feasible => "FEASIBLE",
                Feasibility::Infeasible => "INFEASIBLE",
            }
        );
        return Ok(exit_flag(verdict.feasibility == Feasibility::Infeasible));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_query(model_path: &Path, query_path: &Path) -> Result<ExitCode> {
    let graph = load_graph(model_path)?;
    let query_text = read(query_path)?;
    let model = load_model(graph).map_err(|e| anyhow::anyhow!("{e}"))?;
    let runtime = Runtime::new(model, EngineConfig::default());
    let result = runtime
        .query_state(&query_text)
        .map_err(|e| anyhow::anyhow!("query failed: {e}"))?;
    match result {
        QueryResult::Boolean(b) => println!("{b}"),
        QueryResult::Solutions(solutions) => {
            for s in &solutions {
                println!("{s}");
            }
            println!("# {} solution(s)", solutions.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_unfold(
    model_path: &Path,
    mutable: Option<&Path>,
    vocab_bound: usize,
    bound: usize,
    out: &Path,
) -> Result<ExitCode> {
    let graph = load_graph(model_path)?;
    let declaration = match mutable {
        Some(path) => {
            let text = read(path)?;
            MutableDeclaration::parse(&text, graph.prefixes())
                .map_err(|e| anyhow::anyhow!("{e}"))?
        }
        None => MutableDeclaration::empty(),
    };
    let model = match load_model(graph) {
        Ok(m) => m,
        Err(e) => {
            println!("{e}");
            return Ok(ExitCode::from(1));
        }
    };
    fs::create_dir_all(out)?;
    let net = unfold(&model, &declaration, vocab_bound)
        .map_err(|e| anyhow::anyhow!("unfolding failed: {e}"))?;
    let reach = explore(&net, bound);
    fs::write(out.join("cpn.json"), export_cpn_json(&net))?;
    fs::write(
        out.join("reachability.json"),
        export_reachability_json(&reach),
    )?;
    println!(
        "{} places, {} transitions, {} table rows; {} reachable markings{}",
        net.places.len(),
        net.transitions.len(),
        net.row_count(),
        reach.markings.len(),
        if reach.truncated { " (truncated)" } else { "" }
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_construction_gen(
    spec: Option<&Path>,
    schedule_path: &Path,
    out: &Path,
) -> Result<ExitCode> {
    let spec = match spec {
        Some(path) => BuildingSpec::from_toml(&read(path)?).map_err(|e| anyhow::anyhow!("{e}"))?,
        None => BuildingSpec::default(),
    };
    let schedule =
        parse_schedule(&read(schedule_path)?).map_err(|e| anyhow::anyhow!("{e}"))?;
    let graph = generate_construction_model(&spec, &schedule)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    let model = load_model(graph.clone()).map_err(|e| anyhow::anyhow!("{e}"))?;
    let (places, transitions, arcs) = model_shape(&model);
    fs::write(out, serialize_turtle(&graph))?;
    println!(
        "wrote {} ({places} places, {transitions} transitions, {arcs} arcs)",
        out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_pipes_file(text: &str, graph: &Graph) -> Result<Vec<cases::CheckingPipe>> {
    let mut pipes = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [kw, name, class, property] = fields.as_slice() else {
            bail!("pipes file line {}: expected 'pipe <name> <class> <property>'", i + 1);
        };
        if *kw != "pipe" {
            bail!("pipes file line {}: expected 'pipe', got '{kw}'", i + 1);
        }
        let term = |s: &str| -> Result<spn_core::Term> {
            if let Some(stripped) = s.strip_prefix('<') {
                let Some(inner) = stripped.strip_suffix('>') else {
                    bail!("pipes file line {}: unterminated IRI '{s}'", i + 1);
                };
                Ok(spn_core::Term::iri(inner))
            } else if let Some((short, local)) = s.split_once(':') {
                graph
                    .prefixes()
                    .expand(short, local)
                    .map(spn_core::Term::iri)
                    .ok_or_else(|| {
                        anyhow::anyhow!("pipes file line {}: unknown prefix '{short}:'", i + 1)
                    })
            } else {
                bail!("pipes file line {}: '{s}' is not an IRI", i + 1)
            }
        };
        pipes.push(cases::property_existence_pipe(
            name.to_string(),
            term(class)?,
            term(property)?,
        ));
    }
    Ok(pipes)
}

fn cmd_pipes(args: &PipesArgs) -> Result<ExitCode> {
    let data = match &args.data {
        Some(path) => load_graph(path)?,
        None => cases::generate_checking_data(
            args.classes,
            args.entities,
            args.with_property,
            args.seed,
        ),
    };
    let pipes = match &args.pipes {
        Some(path) => parse_pipes_file(&read(path)?, &data)?,
        None => cases::pipes_for_checking_data(args.classes),
    };
    let report = cases::run_pipes(&pipes, &data).map_err(|e| anyhow::anyhow!("{e}"))?;
    let rendered = report.to_string();
    print!("{rendered}");
    if let Some(out) = &args.out {
        fs::create_dir_all(out)?;
        fs::write(out.join("pipes.txt"), &rendered)?;
    }
    let any_failed = report.pipes.iter().any(|p| p.failed > 0);
    Ok(exit_flag(any_failed))
}
