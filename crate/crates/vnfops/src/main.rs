// SPDX-License-Identifier: Apache-2.0

//! The workbench front-end. Exit codes: 0 success, 1 failed verification /
//! rejected deployment / oracle disagreement, 2 usage, 3 file or parse
//! problems.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nffg_core::graph::Nffg;
use scenario::{ScenarioConfig, Snapshot};
use verifier::{
    check_isolation, check_reachability, oracle_reachability, policies_from_json,
    report_to_json, timings_to_csv, verify_policy_set, BatchReport, Policy, PolicyKind,
};
use vnfops::{opex_savings, IncidentModel, Scenario};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "vnfops",
    about = "Verify, simulate, monitor, and troubleshoot virtualized service chains",
    version
)]
struct Cli {
    /// Override the run seed (where one applies).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for generated report files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output rendering on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a policy set against a service graph.
    Verify {
        /// Service graph (JSON).
        nffg: PathBuf,
        /// Policy set (JSON).
        policies: PathBuf,
    },
    /// List the traffic chains a service graph decomposes into.
    Extract { nffg: PathBuf },
    /// Run a simulated scenario and export its reports.
    Run {
        /// Scenario configuration (TOML).
        config: PathBuf,
    },
    /// Execute a troubleshooting graph against a scenario snapshot.
    Troubleshoot {
        /// Troubleshooting graph file.
        tsg: PathBuf,
        /// End-state snapshot produced by `run`.
        #[arg(long)]
        snapshot: PathBuf,
    },
    /// Estimate operational savings from the incident-category model.
    Opex {
        #[arg(long, value_enum, default_value_t = OpexScenario::Optimistic)]
        scenario: OpexScenario,
        /// Replace the embedded incident model (JSON).
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Cross-check symbolic verdicts against brute-force enumeration.
    Oracle {
        nffg: PathBuf,
        policies: PathBuf,
        /// Reduced-domain width in bits (interval fields share them).
        #[arg(long, default_value_t = 8)]
        bits: u8,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OpexScenario {
    Conservative,
    Optimistic,
}

/// A failure with its documented exit code.
enum Failure {
    /// Exit 1: checks ran and said no.
    Check(String),
    /// Exit 3: could not read or parse an input.
    File(String),
}

impl Failure {
    fn code(&self) -> ExitCode {
        match self {
            Failure::Check(_) => ExitCode::from(1),
            Failure::File(_) => ExitCode::from(3),
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::File(format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Nffg, Failure> {
    nffg_core::io::load(path).map_err(|e| Failure::File(e.to_string()))
}

fn load_policies(path: &Path) -> Result<Vec<Policy>, Failure> {
    policies_from_json(&read_file(path)?)
        .map_err(|e| Failure::File(format!("{}: {e}", path.display())))
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .and_then(|()| std::fs::write(dir.join(name), contents))
        .map_err(|e| Failure::File(format!("{}: {e}", dir.join(name).display())))
}

fn policy_line(item: &verifier::BatchItem) -> String {
    let p = &item.policy;
    let kind = match p.kind {
        PolicyKind::Reachability => "REACHABILITY",
        PolicyKind::Isolation => "ISOLATION",
    };
    let head = format!("{kind} {} -> {}", p.from, p.to);
    match (&item.verdict, &item.error) {
        (Some(v), _) if v.holds => {
            let detail = match (&v.witness, &v.cause) {
                (Some(w), _) => {
                    let hops: Vec<String> = w.path.iter().map(|n| n.to_string()).collect();
                    format!(" (witness {})", hops.join(" -> "))
                }
                (None, Some(c)) => format!(" (cause {} {:?})", c.node, c.kind),
                (None, None) => String::new(),
            };
            format!("{head}: HOLDS{detail}")
        }
        (Some(v), _) => {
            let detail = v
                .witness
                .as_ref()
                .map(|w| {
                    let hops: Vec<String> = w.path.iter().map(|n| n.to_string()).collect();
                    format!(" (counterexample {})", hops.join(" -> "))
                })
                .unwrap_or_default();
            format!("{head}: FAILS{detail}")
        }
        (None, Some(e)) => format!("{head}: ERROR {e}"),
        (None, None) => format!("{head}: ERROR (no verdict)"),
    }
}

fn print_report(report: &BatchReport, format: Format) {
    match format {
        Format::Text => {
            for item in &report.items {
                println!("{}", policy_line(item));
            }
            let s = &report.summary;
            let held = report
                .items
                .iter()
                .filter(|it| it.verdict.as_ref().is_some_and(|v| v.holds))
                .count();
            println!(
                "{held}/{} hold; reachability {:.2} ms mean / {:.2} ms max, isolation {:.2} ms mean / {:.2} ms max",
                report.items.len(),
                s.reachability.mean_ms,
                s.reachability.max_ms,
                s.isolation.mean_ms,
                s.isolation.max_ms,
            );
        }
        Format::Json => print!("{}", report_to_json(report)),
        Format::Csv => print!("{}", timings_to_csv(report)),
    }
}

fn all_hold(report: &BatchReport) -> bool {
    !report.items.is_empty()
        && report
            .items
            .iter()
            .all(|it| it.verdict.as_ref().is_some_and(|v| v.holds))
}

fn cmd_verify(cli: &Cli, nffg: &Path, policies: &Path) -> Result<(), Failure> {
    let g = load_graph(nffg)?;
    let ps = load_policies(policies)?;
    let report = verify_policy_set(&g, &ps);
    print_report(&report, cli.format);
    if let Some(dir) = &cli.out {
        write_out(dir, "report.json", &report_to_json(&report))?;
        write_out(dir, "timings.csv", &timings_to_csv(&report))?;
    }
    if all_hold(&report) {
        Ok(())
    } else {
        Err(Failure::Check("one or more policies do not hold".into()))
    }
}

fn cmd_extract(cli: &Cli, nffg: &Path) -> Result<(), Failure> {
    let g = load_graph(nffg)?;
    let chains = nffg_core::extract_chains(&g).map_err(|e| Failure::File(e.to_string()))?;
    match cli.format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = chains
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "nodes": c.node_ids(),
                        "traffic_class": c.traffic_class,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&rows).expect("chains serialize"));
        }
        _ => {
            for (i, c) in chains.iter().enumerate() {
                let hops: Vec<String> = c.node_ids().iter().map(|n| n.to_string()).collect();
                println!("chain {}: {}", i + 1, hops.join(" -> "));
            }
        }
    }
    Ok(())
}

fn cmd_run(cli: &Cli, config: &Path) -> Result<(), Failure> {
    let mut cfg = ScenarioConfig::from_toml_str(&read_file(config)?)
        .map_err(|e| Failure::File(e.to_string()))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = match scenario::run_from_config(&cfg) {
        Ok(out) => out,
        Err(e @ scenario::ScenarioError::DeploymentRejected { .. }) => {
            if let scenario::ScenarioError::DeploymentRejected { report, .. } = &e {
                for item in &report.items {
                    eprintln!("{}", policy_line(item));
                }
            }
            return Err(Failure::Check(e.to_string()));
        }
        Err(e) => return Err(Failure::File(e.to_string())),
    };
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    scenario::export_report(&out, &dir)
        .map_err(|e| Failure::File(format!("{}: {e}", dir.display())))?;
    let snap = Snapshot::from_output(&out, &cfg);
    write_out(&dir, "snapshot.json", &snap.to_json())?;

    let c = &out.ledger.counters;
    match cli.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&c).expect("counters serialize")
        ),
        _ => {
            println!(
                "{} ticks, {} instances final; raw_samples {}, estimates {}, triggers {}, central {}, scale_ops {}, verifications {}",
                cfg.duration_s * 100,
                nffg_core::fixtures::firewall_count(&out.final_graph),
                c.raw_samples,
                c.estimates,
                c.local_triggers,
                c.central_events,
                c.scale_ops,
                c.verification_runs,
            );
            println!("reports written to {}", dir.display());
        }
    }
    Ok(())
}

fn cmd_troubleshoot(cli: &Cli, tsg: &Path, snapshot: &Path) -> Result<(), Failure> {
    let graph = troubleshooter::parse_tsg(&read_file(tsg)?)
        .map_err(|e| Failure::File(e.to_string()))?;
    let snap = Snapshot::from_json(&read_file(snapshot)?)
        .map_err(|e| Failure::File(format!("{}: {e}", snapshot.display())))?;
    let mut sim = troubleshooter::SimHandle::from_snapshot(&snap)
        .map_err(|e| Failure::File(e.to_string()))?;
    let dx = troubleshooter::run_tsg(&graph, &mut sim)
        .map_err(|e| Failure::File(e.to_string()))?;
    match cli.format {
        Format::Json => print!("{}", dx.to_json()),
        _ => print!("{dx}"),
    }
    if let Some(dir) = &cli.out {
        write_out(dir, "diagnosis.json", &dx.to_json())?;
    }
    Ok(())
}

fn cmd_opex(cli: &Cli, scenario: OpexScenario, model: Option<&Path>) -> Result<(), Failure> {
    let m = match model {
        Some(path) => IncidentModel::from_json(&read_file(path)?)
            .map_err(|e| Failure::File(e.to_string()))?,
        None => IncidentModel::default_model(),
    };
    let s = match scenario {
        OpexScenario::Conservative => Scenario::Conservative,
        OpexScenario::Optimistic => Scenario::Optimistic,
    };
    let report = opex_savings(&m, s).map_err(|e| Failure::File(e.to_string()))?;
    match cli.format {
        Format::Json => print!("{}", report.to_json()),
        Format::Csv => print!("{}", report.to_csv()),
        Format::Text => print!("{}", report.to_text()),
    }
    Ok(())
}

fn cmd_oracle(cli: &Cli, nffg: &Path, policies: &Path, bits: u8) -> Result<(), Failure> {
    let g = load_graph(nffg)?;
    let ps = load_policies(policies)?;
    let mut mismatches = 0;
    for p in &ps {
        let engine = match p.kind {
            PolicyKind::Reachability => check_reachability(&g, p),
            PolicyKind::Isolation => check_isolation(&g, p),
        };
        let engine_holds = match engine {
            Ok(v) => v.holds,
            Err(e) => return Err(Failure::File(format!("symbolic check: {e}"))),
        };
        let oracle_reaches = oracle_reachability(&g, p, bits)
            .map_err(|e| Failure::File(e.to_string()))?;
        let expect = match p.kind {
            PolicyKind::Reachability => oracle_reaches,
            PolicyKind::Isolation => !oracle_reaches,
        };
        let agree = engine_holds == expect;
        if !agree {
            mismatches += 1;
        }
        if cli.format == Format::Text {
            let kind = match p.kind {
                PolicyKind::Reachability => "REACHABILITY",
                PolicyKind::Isolation => "ISOLATION",
            };
            println!(
                "{kind} {} -> {}: symbolic={engine_holds} enumerated({bits} bits)={expect} {}",
                p.from,
                p.to,
                if agree { "AGREE" } else { "MISMATCH" }
            );
        }
    }
    if cli.format != Format::Text {
        println!(
            "{}",
            serde_json::json!({ "policies": ps.len(), "mismatches": mismatches })
        );
    }
    if mismatches == 0 {
        Ok(())
    } else {
        Err(Failure::Check(format!("{mismatches} verdict(s) disagree with enumeration")))
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Verify { nffg, policies } => cmd_verify(cli, nffg, policies),
        Command::Extract { nffg } => cmd_extract(cli, nffg),
        Command::Run { config } => cmd_run(cli, config),
        Command::Troubleshoot { tsg, snapshot } => cmd_troubleshoot(cli, tsg, snapshot),
        Command::Opex { scenario, model } => cmd_opex(cli, *scenario, model.as_deref()),
        Command::Oracle { nffg, policies, bits } => cmd_oracle(cli, nffg, policies, *bits),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Check(msg) | Failure::File(msg) => eprintln!("error: {msg}"),
            }
            f.code()
        }
    }
}
