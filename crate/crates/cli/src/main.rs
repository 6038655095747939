use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use congestcut::certificate::{certificate_distributed, make_params};
use congestcut::charge::ChargeInputs;
use congestcut::contraction::build_msgc;
use congestcut::decomposition::{check_invariants, tripartition};
use congestcut::graph::{parse_graph, write_graph, Graph};
use congestcut::oracle;
use congestcut::pipeline::{pipeline, report, verify};
use congestcut::treecut::{min_cut_contracted, min_cut_exact};
use congestcut::Config;
use serde_json::json;

#[derive(Parser)]
#[command(name = "congestcut", version, about = "Round-accounted CONGEST minimum cut pipeline")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Edge-list file; `-` reads stdin.
    #[arg(long, short, default_value = "-")]
    input: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// TOML config; omitted keys keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full pipeline with branch selection.
    Run {
        #[command(flatten)]
        common: Common,
        /// Compare with Stoer-Wagner; exit 2 on disagreement.
        #[arg(long)]
        verify: bool,
        /// Also write the report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Sparse connectivity certificate with `k` forests worth of edges.
    Certificate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 3.0)]
        tau: f64,
        /// Write the certificate subgraph in edge-list format.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Edge tripartition into E_h, E_s and E_r.
    Tripartition {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        rho: f64,
    },
    /// Certificate, tripartition, trim, shave and core contraction.
    Contract {
        #[command(flatten)]
        common: Common,
        /// Defaults to `ln(delta) / (2 ln n)`, clamped by the config.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Tree-packing minimum cut, on the input or on its contraction.
    Mincut {
        #[command(flatten)]
        common: Common,
        /// Search the input graph directly (the default).
        #[arg(long, conflicts_with = "contracted")]
        exact: bool,
        #[arg(long)]
        contracted: bool,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        verify: bool,
    },
    /// Sequential reference minimum cut.
    Oracle {
        #[arg(long)]
        stoer_wagner: bool,
        /// Enumerate every minimum cut (n <= 20).
        #[arg(long, conflicts_with = "stoer_wagner")]
        enumerate: bool,
        file: String,
    },
    /// Emit a generated graph in edge-list format.
    Gen {
        #[command(subcommand)]
        family: Family,
        /// Replace unit weights by uniform weights in `1..=max_weight`.
        #[arg(long, global = true)]
        max_weight: Option<u64>,
        #[arg(long, global = true, default_value_t = 0)]
        weight_seed: u64,
    },
}

#[derive(Subcommand)]
enum Family {
    Cycle { n: usize },
    Path { n: usize },
    Clique { n: usize },
    Star { n: usize },
    Grid { rows: usize, cols: usize },
    Gnp {
        n: usize,
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Add edges until connected.
        #[arg(long)]
        connected: bool,
    },
    Barbell { clique_size: usize, bridges: usize },
    Planted {
        n: usize,
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read_graph(input: &str) -> Result<Graph<u64>> {
    let text = if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(input).with_context(|| format!("reading {input}"))?
    };
    Ok(parse_graph(&text)?)
}

fn load_config(path: &Option<PathBuf>) -> Result<Config> {
    Ok(match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    })
}

fn degree_eps(g: &Graph<u64>, cfg: &Config) -> f64 {
    let ln_n = (g.n().max(2) as f64).ln();
    ((g.min_degree().max(1) as f64).ln() / (2.0 * ln_n)).min(cfg.selection.eps_cap)
}

fn diameter(g: &Graph<u64>) -> usize {
    if g.n() == 0 {
        0
    } else {
        g.eccentricity(0, |_| true)
    }
}

fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn print(v: &serde_json::Value) {
    emit(&format!("{}\n", serde_json::to_string_pretty(v).expect("json")));
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Run { common, verify: check, json } => {
            let g = read_graph(&common.input)?;
            let cfg = load_config(&common.config)?;
            let r = pipeline(&g, &cfg, common.seed)?;
            let v = if check { Some(verify(&g, &r)?) } else { None };
            let out = report(&r, &cfg, common.seed, v.as_ref());
            if let Some(p) = json {
                write_file(&p, &serde_json::to_string_pretty(&out)?)?;
            }
            print(&out);
            if !r.transcript.violations.is_empty() {
                eprintln!("{} simulator violations", r.transcript.violations.len());
                return Ok(ExitCode::from(3));
            }
            if let Some(c) = &r.contraction {
                if !c.structure_violations.is_empty() {
                    eprintln!("structure violations: {:?}", c.structure_violations);
                    return Ok(ExitCode::from(3));
                }
            }
            if v.is_some_and(|v| !v.agrees) {
                eprintln!("pipeline answer {} disagrees with the oracle", r.cut.value);
                return Ok(ExitCode::from(2));
            }
        }
        Cmd::Certificate { common, k, eps, tau, out } => {
            let g = read_graph(&common.input)?;
            let cfg = load_config(&common.config)?;
            let params = make_params(g.n(), k, eps, tau)?;
            let (cert, tr) = certificate_distributed(&g, &params, common.seed, &cfg.charges, diameter(&g))?;
            if let Some(p) = out {
                write_file(&p, &write_graph(&cert.subgraph(&g).0))?;
            }
            let edges: Vec<(usize, usize)> = cert.edges.iter().map(|&e| (g.edge(e).u, g.edge(e).v)).collect();
            print(&json!({
                "edges_kept": cert.edges.len(),
                "classes": params.classes,
                "forests_per_class": params.forests_per_class,
                "p": params.p,
                "rounds_charged": tr.charged_rounds,
                "edges": edges,
            }));
        }
        Cmd::Tripartition { common, gamma, rho } => {
            let g = read_graph(&common.input)?;
            let cfg = load_config(&common.config)?;
            let t = tripartition(&g, gamma, rho, &cfg.msgc.decomposition, &cfg.charges, common.seed)?;
            let inv = check_invariants(&g, &t, rho);
            print(&json!({
                "e_h_components": t.components,
                "e_h_size": t.e_h.len(),
                "e_s_per_vertex_sizes": t.e_s.iter().map(Vec::len).collect::<Vec<_>>(),
                "e_r_size": t.e_r.len(),
                "levels": t.levels,
                "cases": t.cases,
                "rounds_charged": t.transcript.charged_rounds,
                "invariant_report": inv,
            }));
            if !inv.holds() {
                return Ok(ExitCode::from(3));
            }
        }
        Cmd::Contract { common, eps } => {
            let g = read_graph(&common.input)?;
            let cfg = load_config(&common.config)?;
            let eps = eps.unwrap_or_else(|| degree_eps(&g, &cfg));
            let m = build_msgc(&g, eps, &cfg.msgc, &cfg.charges, common.seed)?;
            let members: Vec<_> = (0..g.n())
                .map(|v| json!({"vertex": v, "group_id": m.clustering.group_id[v], "regular": m.clustering.regular[v]}))
                .collect();
            print(&json!({
                "eps": eps,
                "structure_report": m.report,
                "low_degree_warning": m.low_degree_warning,
                "contracted_n": m.contracted.graph.n(),
                "contracted_m": m.contracted.graph.m(),
                "rounds_charged": m.transcript.charged_rounds,
                "clusters": members,
            }));
            if !m.report.violations.is_empty() {
                return Ok(ExitCode::from(3));
            }
        }
        Cmd::Mincut { common, exact: _, contracted, eps, verify: check } => {
            let g = read_graph(&common.input)?;
            let cfg = load_config(&common.config)?;
            let lambda_est = oracle::stoer_wagner(&g)?.value as u128;
            let tree_charge = |n: usize| {
                cfg.charges.charge("tree_cut_exact", ChargeInputs { n: n as f64, ..Default::default() }).map(|c| c.rounds)
            };
            let (cut, trees, exponent, rounds) = if contracted {
                let eps = eps.unwrap_or_else(|| degree_eps(&g, &cfg));
                let m = build_msgc(&g, eps, &cfg.msgc, &cfg.charges, common.seed)?;
                let r = min_cut_contracted(&g, &m.contracted, lambda_est, common.seed, &cfg.treecut)?;
                (r.cut, r.trees, r.exponent, m.transcript.charged_rounds + tree_charge(m.contracted.graph.n())?)
            } else {
                let r = min_cut_exact(&g, lambda_est, common.seed, &cfg.treecut)?;
                (r.cut, r.trees, r.exponent, tree_charge(g.n())?)
            };
            let agreement = check.then_some(lambda_est == cut.value as u128);
            print(&json!({
                "lambda": cut.value,
                "side": cut.side,
                "cut_edges": cut.crossing.iter().map(|&e| (g.edge(e).u, g.edge(e).v)).collect::<Vec<_>>(),
                "tree_count": trees,
                "p_skeleton": 0.5f64.powi(exponent as i32),
                "rounds_charged": rounds,
                "oracle_agreement": agreement,
            }));
            if agreement == Some(false) {
                return Ok(ExitCode::from(2));
            }
        }
        Cmd::Oracle { stoer_wagner: _, enumerate, file } => {
            let g = read_graph(&file)?;
            if enumerate {
                let cuts = oracle::enumerate_min_cuts(&g)?;
                let list: Vec<_> = cuts.iter().map(|c| json!({"side": c.side, "cut_edges": c.crossing})).collect();
                print(&json!({"lambda": cuts.first().map(|c| c.value), "count": cuts.len(), "cuts": list}));
            } else {
                let c = oracle::stoer_wagner(&g)?;
                print(&json!({"lambda": c.value, "side": c.side, "cut_edges": c.crossing}));
            }
        }
        Cmd::Gen { family, max_weight, weight_seed } => {
            let g = match family {
                Family::Cycle { n } => oracle::cycle(n),
                Family::Path { n } => oracle::path(n),
                Family::Clique { n } => oracle::clique(n),
                Family::Star { n } => oracle::star(n),
                Family::Grid { rows, cols } => oracle::grid(rows, cols),
                Family::Gnp { n, p, seed, connected } => {
                    if !(0.0..=1.0).contains(&p) {
                        bail!("p must lie in [0, 1]");
                    }
                    if connected {
                        oracle::gnp_connected(n, p, seed)
                    } else {
                        oracle::gnp(n, p, seed)
                    }
                }
                Family::Barbell { clique_size, bridges } => oracle::barbell(clique_size, bridges)?,
                Family::Planted { n, k, seed } => oracle::planted_cut(n, k, seed)?,
            };
            let g = match max_weight {
                Some(w) => oracle::with_random_weights(&g, w, weight_seed),
                None => g,
            };
            emit(&write_graph(&g));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
