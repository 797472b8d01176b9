use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ghz_multipath::graph::Subgraph;
use ghz_multipath::harness::{
    analyze, run_scenario, scenario_table, speedup_report, sweep, sweep_table, Format, Scenario,
    SweepAxis, Table,
};
use ghz_multipath::netstate::CutOff;
use ghz_multipath::protocols::Protocol;
use ghz_multipath::topology::{build_grid, load_topology_file, Topology};
use ghz_multipath::Error;

#[derive(Debug, Parser)]
#[command(name = "ghznet", version, about = "Multipath GHZ distribution simulator")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Root seed. Overrides the scenario file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials per datapoint. Overrides the scenario file.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    #[command(subcommand)]
    Topo(Topo),
    /// Run one scenario file.
    Run { scenario: PathBuf },
    /// Run a scenario once per value of one parameter.
    Sweep {
        scenario: PathBuf,
        /// p, p_op, q_c, users, grid_M or protocol.
        #[arg(long)]
        axis: String,
        /// Comma-separated values, or `start:stop:step` for numeric axes.
        #[arg(long)]
        values: String,
    },
    /// Rate ratio of two protocols over a p x Q_c grid.
    Speedup {
        scenario: PathBuf,
        #[arg(long)]
        p_range: String,
        #[arg(long, default_value = "1")]
        qc_range: String,
        #[arg(long, default_value = "mp-p")]
        numerator: Protocol,
        #[arg(long, default_value = "sp")]
        denominator: Protocol,
        /// Take the denominator from the closed form at Q_c = 1.
        #[arg(long)]
        analytic_sp: bool,
    },
    /// Closed-form and percolation estimates for a scenario.
    Analyze {
        scenario: PathBuf,
        /// Sampled link graphs for the component distribution. Defaults to
        /// `--trials`, then 10000.
        #[arg(long)]
        samples: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
enum Topo {
    /// Emit an M x M grid. Without `--format` the topology document format
    /// is written; csv gives an edge table.
    GenGrid {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Parse a topology file and print its summary.
    Validate { file: PathBuf },
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_list<T>(text: &str, parse: impl Fn(&str) -> ghz_multipath::Result<T>) -> ghz_multipath::Result<Vec<T>> {
    text.split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| parse(v.trim()))
        .collect()
}

fn number(v: &str) -> ghz_multipath::Result<f64> {
    v.parse()
        .map_err(|_| Error::Domain(format!("`{v}` is not a number")))
}

/// `a:b:s` expands to `a, a+s, ...` up to `b` inclusive.
fn expand(text: &str) -> ghz_multipath::Result<Vec<String>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return parse_list(text, |v| Ok(v.to_string()));
    }
    let (a, b, s) = (number(parts[0])?, number(parts[1])?, number(parts[2])?);
    if !(s > 0.0) || b < a {
        return Err(Error::Domain(format!("bad range `{text}`")));
    }
    let n = ((b - a) / s + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| {
            let x = a + s * i as f64;
            // Trim float noise like 0.30000000000000004.
            format!("{}", (x * 1e9).round() / 1e9)
        })
        .collect())
}

fn load(path: &Path, common: &Common) -> ghz_multipath::Result<Scenario> {
    let mut s = Scenario::load(path)?;
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    if let Some(trials) = common.trials {
        s.trials = trials;
    }
    s.validate()?;
    Ok(s)
}

fn emit(text: String, out: Option<&Path>) -> ghz_multipath::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn edge_table(t: &Topology) -> Table {
    let mut table = Table::new(&["u", "v", "length_km", "p_op", "p_e"]);
    for e in t.edges() {
        table.push(vec![
            e.a.0.into(),
            e.b.0.into(),
            e.length_km.into(),
            e.p_op.into(),
            e.p_e.into(),
        ]);
    }
    table
}

fn json_document(t: &Topology) -> String {
    let edges: Vec<_> = t
        .edges()
        .iter()
        .map(|e| serde_json::json!({"u": e.a.0, "v": e.b.0, "length_km": e.length_km, "p_op": e.p_op}))
        .collect();
    let doc = serde_json::json!({
        "name": t.name(),
        "p_op": t.default_p_op(),
        "attenuation_db_per_km": t.attenuation_db_per_km(),
        "nodes": t.node_count(),
        "edges": edges,
    });
    serde_json::to_string_pretty(&doc).expect("json values serialize") + "\n"
}

fn summary(t: &Topology) -> Table {
    let stats = t.catalog_stats();
    let connected = Subgraph::full(t).components().iter().all(|&c| c == 0);
    let mut table = Table::new(&[
        "name",
        "nodes",
        "edges",
        "mean_edge_length_km",
        "mean_nodal_degree",
        "mean_p_e",
        "connected",
    ]);
    table.push(vec![
        t.name().into(),
        stats.node_count.into(),
        stats.edge_count.into(),
        stats.mean_edge_length_km.into(),
        stats.mean_nodal_degree.into(),
        t.mean_p_e().into(),
        connected.into(),
    ]);
    table
}

fn run(cli: Cli) -> ghz_multipath::Result<()> {
    let common = &cli.common;
    let format = common.format.unwrap_or_default();
    let out = common.out.as_deref();
    let table = match cli.command {
        Command::Topo(Topo::GenGrid { m, p }) => {
            let t = build_grid(m, p)?;
            let text = match common.format {
                None => t.to_document(),
                Some(Format::Csv) => edge_table(&t).to_csv()?,
                Some(Format::Json) => json_document(&t),
            };
            return emit(text, out);
        }
        Command::Topo(Topo::Validate { file }) => {
            let doc = load_topology_file(&file)?;
            if !Subgraph::full(&doc.topology).components().iter().all(|&c| c == 0) {
                return Err(Error::Validation {
                    line: None,
                    msg: "topology is not connected".into(),
                });
            }
            summary(&doc.topology)
        }
        Command::Run { scenario } => {
            let s = load(&scenario, common)?;
            scenario_table(&s, &run_scenario(&s)?)
        }
        Command::Sweep {
            scenario,
            axis,
            values,
        } => {
            let s = load(&scenario, common)?;
            let axis: SweepAxis = axis.parse()?;
            let values = expand(&values)?;
            if values.is_empty() {
                return Err(Error::Domain("no sweep values".into()));
            }
            let points = sweep(&s, axis, &values)?;
            let table = sweep_table(axis, &points);
            emit(table.render(format)?, out)?;
            if points.iter().all(|p| p.result.is_err()) {
                return Err(Error::Infeasible("every sweep point is infeasible".into()));
            }
            return Ok(());
        }
        Command::Speedup {
            scenario,
            p_range,
            qc_range,
            numerator,
            denominator,
            analytic_sp,
        } => {
            let s = load(&scenario, common)?;
            let ps = expand(&p_range)?
                .iter()
                .map(|v| number(v))
                .collect::<ghz_multipath::Result<Vec<f64>>>()?;
            let qcs = expand(&qc_range)?
                .iter()
                .map(|v| v.parse::<CutOff>())
                .collect::<ghz_multipath::Result<Vec<CutOff>>>()?;
            speedup_report(&s, &ps, &qcs, numerator, denominator, analytic_sp)?
        }
        Command::Analyze { scenario, samples } => {
            let s = load(&scenario, common)?;
            let samples = samples.or(common.trials).unwrap_or(10_000);
            analyze(&s, samples)?
        }
    };
    emit(table.render(format)?, out)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) => 3,
        Error::ProtocolLogic(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ghznet: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
