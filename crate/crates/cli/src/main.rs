use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand};

use qlattice::diagnostics::Diagnostic;
use qlattice::dsl::parse;
use qlattice::execute::{aggregate, execute_step, export, ExecOptions, ExecutionState, ResultsExport, Status, DEFAULT_LIMIT};
use qlattice::fixtures::{chain_graph, fixture_check, list_fixtures, load_fixture, FixtureError};
use qlattice::graph::PropertyGraph;
use qlattice::instantiate::{build_lattice, InstantiationLattice, LatticeOptions};
use qlattice::query::{classify_rules, QueryRepresentation};
use qlattice::translate::translate;
use qlattice_cli::service::{serve, ServiceConfig};

#[derive(Parser)]
#[command(name = "qlattice", version, about = "Underspecified graph queries over property graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a query file.
    Validate { query: PathBuf },
    /// Build the instantiation lattice of a query.
    Instantiate {
        query: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Take the graph mode from this graph instead of the query's edges.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Print the Cypher text of one instance.
    Translate {
        query: PathBuf,
        #[arg(long)]
        instance: String,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Run one or more steps against a graph.
    Exec {
        query: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Step reference; repeat to run several steps in order.
        #[arg(long, required = true)]
        step: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        #[arg(long)]
        time_budget_ms: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Frequency overview over instances of a results file.
    Overview {
        #[arg(long)]
        results: PathBuf,
        /// Comma-separated instance ids, or `found` for every instance with results.
        #[arg(long, default_value = "found")]
        select: String,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, env = "QLAT_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Graph loaded into every new session.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Static files served for paths outside the API.
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 30 * 60)]
        idle_secs: u64,
    },
    /// Bundled case fixtures.
    Fixture {
        #[command(subcommand)]
        command: FixtureCommand,
    },
}

#[derive(Subcommand)]
enum FixtureCommand {
    /// Run fixtures and compare statuses with their expectation tables.
    Check {
        /// Fixture names; all fixtures under the root when empty.
        names: Vec<String>,
        #[arg(long, default_value = "fixtures")]
        root: PathBuf,
    },
    /// Write graph.json of a generated fixture from its recorded seed.
    Generate { dir: PathBuf },
}

/// Exit 1 for problems with the inputs' content, 2 for I/O.
enum Failure {
    Diagnostics(String),
    Io(String),
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn render(path: &Path, diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| match d.span {
            Some(_) => format!("{}:{d}", path.display()),
            None => format!("{}: {d}", path.display()),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn load_query(path: &Path) -> Result<QueryRepresentation, Failure> {
    let text = read(path)?;
    let parsed = parse(&text).map_err(|d| Failure::Diagnostics(render(path, &d)))?;
    if !parsed.warnings.is_empty() {
        eprintln!("{}", render(path, &parsed.warnings));
    }
    Ok(parsed.query)
}

fn load_graph(path: &Path) -> Result<PropertyGraph, Failure> {
    PropertyGraph::from_json(&read(path)?).map_err(|e| Failure::Diagnostics(format!("{}: {e}", path.display())))
}

fn lattice(qr: &QueryRepresentation, directed: Option<bool>) -> Result<InstantiationLattice, Failure> {
    build_lattice(
        qr,
        &LatticeOptions {
            directed,
            ..Default::default()
        },
    )
    .map_err(|e| match e {
        qlattice::instantiate::InstantiateError::Invalid(d) => Failure::Diagnostics(
            d.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"),
        ),
        e => Failure::Diagnostics(e.to_string()),
    })
}

fn status_line(id: &str, s: &Status) -> String {
    match s {
        Status::NotRun => format!("{id}\tnot_run"),
        Status::Empty => format!("{id}\tempty"),
        Status::Found { count, complete } => {
            format!("{id}\tfound\t{count}{}", if *complete { "" } else { "+" })
        }
        Status::PrunedEmpty { cause } => format!("{id}\tpruned_empty\t{cause}"),
        Status::TimedOut => format!("{id}\ttimed_out"),
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { query } => {
            let qr = load_query(&query)?;
            let (fully, under) = classify_rules(&qr);
            println!(
                "{}: ok, {} entities, {} rules ({} fully specified, {} underspecified, {} attribute)",
                query.display(),
                qr.entities.len(),
                qr.rules.len(),
                fully.len(),
                under.len(),
                qr.rules.len() - fully.len() - under.len()
            );
            Ok(())
        }
        Command::Instantiate { query, out, graph } => {
            let qr = load_query(&query)?;
            let directed = match graph {
                Some(g) => Some(load_graph(&g)?.is_directed()),
                None => None,
            };
            let l = lattice(&qr, directed)?;
            let text = l.to_json();
            match out {
                Some(path) => {
                    write(&path, &(text + "\n"))?;
                    let s = l.summary();
                    println!(
                        "{} instances; layers {:?}; final: {}",
                        s.instance_count,
                        s.layer_sizes,
                        s.final_instances.join(", ")
                    );
                }
                None => println!("{text}"),
            }
            Ok(())
        }
        Command::Translate {
            query,
            instance,
            limit,
            graph,
        } => {
            let qr = load_query(&query)?;
            let directed = match graph {
                Some(g) => Some(load_graph(&g)?.is_directed()),
                None => None,
            };
            let l = lattice(&qr, directed)?;
            let inst = l
                .instance(&instance)
                .ok_or_else(|| Failure::Diagnostics(format!("unknown instance `{instance}`")))?;
            let t = translate(inst, limit).map_err(|e| Failure::Diagnostics(e.to_string()))?;
            println!("{}", t.text);
            Ok(())
        }
        Command::Exec {
            query,
            graph,
            step,
            limit,
            time_budget_ms,
            out,
        } => {
            let qr = load_query(&query)?;
            let g = load_graph(&graph)?;
            let l = lattice(&qr, Some(g.is_directed()))?;
            let mut state = ExecutionState::new(&l);
            let opts = ExecOptions {
                limit,
                time_budget: time_budget_ms.map(Duration::from_millis),
            };
            let mut lines = String::new();
            for s in &step {
                let report =
                    execute_step(&l, &g, &mut state, s, &opts).map_err(|e| Failure::Diagnostics(e.to_string()))?;
                for (id, st) in &report.statuses {
                    let _ = writeln!(lines, "{}", status_line(id, st));
                }
            }
            print!("{lines}");
            if let Some(path) = out {
                write(&path, &(export(&l, &state).to_json() + "\n"))?;
            }
            Ok(())
        }
        Command::Overview { results, select } => {
            let ex = ResultsExport::from_json(&read(&results)?)
                .map_err(|e| Failure::Diagnostics(format!("{}: {e}", results.display())))?;
            let state = ex.to_state();
            let ids: Vec<String> = if select == "found" {
                ex.instances
                    .iter()
                    .filter(|i| matches!(i.status, Status::Found { .. }))
                    .map(|i| i.id.clone())
                    .collect()
            } else {
                select.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
            };
            let o = aggregate(&state, &ids).map_err(|e| Failure::Diagnostics(e.to_string()))?;
            println!("{}", serde_json::to_string_pretty(&o).expect("overviews serialize"));
            Ok(())
        }
        Command::Serve {
            port,
            host,
            graph,
            ui_dir,
            idle_secs,
        } => {
            let preload = match graph {
                Some(g) => Some(Arc::new(load_graph(&g)?)),
                None => None,
            };
            let config = ServiceConfig {
                idle_timeout: Duration::from_secs(idle_secs),
                preload,
                ui_dir,
                ..Default::default()
            };
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port))
                    .await
                    .map_err(|e| Failure::Io(format!("{host}:{port}: {e}")))?;
                eprintln!("listening on http://{}", listener.local_addr().map_err(|e| Failure::Io(e.to_string()))?);
                serve(listener, config).await.map_err(|e| Failure::Io(e.to_string()))
            })
        }
        Command::Fixture { command } => match command {
            FixtureCommand::Check { names, root } => {
                let dirs = if names.is_empty() {
                    list_fixtures(&root).map_err(|e| Failure::Io(format!("{}: {e}", root.display())))?
                } else {
                    names.iter().map(|n| root.join(n)).collect()
                };
                let mut failed = 0;
                for dir in dirs {
                    let report = fixture_check(&dir).map_err(fixture_failure)?;
                    for row in &report.rows {
                        let actual = status_line(&row.instance, &row.actual);
                        println!(
                            "{} {}: expected {:?} ({:?}), got {}{}",
                            if row.pass { "PASS" } else { "FAIL" },
                            report.name,
                            row.expected,
                            row.provenance,
                            actual.replace('\t', " "),
                            row.oracle.map(|o| format!(", brute force {o:?}")).unwrap_or_default()
                        );
                    }
                    if !report.graph_regenerates {
                        println!("FAIL {}: graph.json differs from its generator output", report.name);
                    }
                    failed += usize::from(!report.pass);
                }
                if failed > 0 {
                    return Err(Failure::Diagnostics(format!("{failed} fixture(s) failed")));
                }
                Ok(())
            }
            FixtureCommand::Generate { dir } => {
                let expected = dir.join("expected.json");
                let table: qlattice::fixtures::ExpectedTable = serde_json::from_str(&read(&expected)?)
                    .map_err(|e| Failure::Diagnostics(format!("{}: {e}", expected.display())))?;
                let params = table
                    .generator
                    .ok_or_else(|| Failure::Diagnostics(format!("{} records no generator", expected.display())))?;
                write(&dir.join("graph.json"), &(chain_graph(&params).to_json() + "\n"))?;
                // reload to catch a graph the query cannot run on
                load_fixture(&dir).map_err(fixture_failure)?;
                Ok(())
            }
        },
    }
}

fn fixture_failure(e: FixtureError) -> Failure {
    match e {
        FixtureError::MissingDataset { .. } | FixtureError::Io { .. } => Failure::Io(e.to_string()),
        e => Failure::Diagnostics(e.to_string()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Diagnostics(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
