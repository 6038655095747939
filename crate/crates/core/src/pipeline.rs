//! End-to-end driver: diameter and connectivity estimates, branch selection,
//! then either the contraction path or the direct tree-packing path.

use serde::{Deserialize, Serialize};

use crate::charge::ChargeInputs;
use crate::config::{Config, SelectionConfig};
use crate::contraction::build_msgc;
use crate::error::{Error, Result};
use crate::graph::{CutResult, Graph, VertexSet};
use crate::oracle;
use crate::scalar::Weight;
use crate::sim::{bfs_protocol, Transcript};
use crate::tree::RootedTree;
use crate::treecut::{
    cross_values, min_cut_contracted, min_cut_exact, one_respect_values, simulated_tree_values, spanning_tree_set,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Disconnected,
    Direct,
    SmallLambda,
    Contracted,
}

/// Inputs and exponent arithmetic behind the branch choice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub n: usize,
    pub diameter_est: usize,
    pub lambda_est: u64,
    pub min_degree: usize,
    pub weighted: bool,
    /// `ln(delta) / (2 ln n)`, so that `delta = n^(2 eps)`.
    pub eps_degree: f64,
    /// `1 - ln(D') / ln(n)`, so that `D' = n^(1 - mu)`.
    pub mu: f64,
    /// `22/353` when `mu > 1/2`, else `44 mu / 353`.
    pub eps_star: f64,
    /// The `eps` handed to the contraction, when that branch runs.
    pub eps_used: Option<f64>,
    pub branch: Branch,
    pub reason: String,
}

/// Pure function of `(n, D', lambda', delta)` and the weightedness flag.
pub fn select_branch(
    n: usize,
    diameter_est: usize,
    lambda_est: u64,
    min_degree: usize,
    weighted: bool,
    cfg: &SelectionConfig,
) -> Selection {
    let ln_n = (n.max(2) as f64).ln();
    let eps_degree = if min_degree >= 1 { (min_degree as f64).ln() / (2.0 * ln_n) } else { 0.0 };
    let mu = 1.0 - (diameter_est.max(1) as f64).ln() / ln_n;
    let eps_star = if mu > 0.5 { 22.0 / 353.0 } else { 44.0 * mu / 353.0 };
    let mut s = Selection {
        n,
        diameter_est,
        lambda_est,
        min_degree,
        weighted,
        eps_degree,
        mu,
        eps_star,
        eps_used: None,
        branch: Branch::Direct,
        reason: String::new(),
    };
    if weighted {
        s.reason = "weighted input".into();
    } else if n < cfg.min_n_for_contraction {
        s.reason = format!("n = {n} below {}", cfg.min_n_for_contraction);
    } else if eps_star > 0.0 && eps_degree >= eps_star {
        s.branch = Branch::Contracted;
        s.eps_used = Some(eps_degree.min(cfg.eps_cap));
        s.reason = format!("delta = {min_degree} >= n^(2 eps*) with eps* = {eps_star:.5}");
    } else if cfg.small_lambda_branch {
        s.branch = Branch::SmallLambda;
        s.reason = format!("delta = {min_degree} < n^(2 eps*) with eps* = {eps_star:.5}");
    } else {
        s.reason = format!("delta = {min_degree} < n^(2 eps*), small-lambda branch disabled");
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionSummary {
    pub eps: f64,
    pub certificate_edges: usize,
    pub e_h_components: usize,
    pub nontrivial_clusters: usize,
    pub trimmed: usize,
    pub contracted_n: usize,
    pub contracted_m: usize,
    pub sum_cluster_diameters: usize,
    pub low_degree_warning: bool,
    pub structure_violations: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    /// Vertices of the network the tree stages ran on.
    pub network_n: usize,
    pub trees: usize,
    pub bfs_depths: Vec<usize>,
    pub rounds: u64,
    pub violations: usize,
}

#[derive(Clone, Debug)]
pub struct PipelineResult<W> {
    pub cut: CutResult<W>,
    pub selection: Selection,
    pub trees: usize,
    pub exponent: u32,
    pub trivial_fallback: bool,
    pub contraction: Option<ContractionSummary>,
    pub simulation: Option<SimulationSummary>,
    pub transcript: Transcript,
}

pub fn pipeline<W: Weight>(g: &Graph<W>, cfg: &Config, seed: u64) -> Result<PipelineResult<W>> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Precondition("minimum cut needs at least two vertices".into()));
    }
    g.check_weight_bound(cfg.weight_exponent)?;
    let reg = &cfg.charges;
    let mut tr = Transcript::default();
    let comps = g.connected_components(|_| true);
    if comps.len() != 1 || comps[0].len() != n {
        let side = comps.first().cloned().unwrap_or_else(|| vec![0]);
        let cut = CutResult::from_set(g, &VertexSet::from_slice(n, &side))?;
        let mut selection = select_branch(n, 0, 0, g.min_degree(), g.is_weighted(), &cfg.selection);
        selection.branch = Branch::Disconnected;
        selection.eps_used = None;
        let isolated = n - comps.iter().map(Vec::len).sum::<usize>();
        selection.reason = format!("{} components", comps.len() + isolated);
        return Ok(PipelineResult {
            cut,
            selection,
            trees: 0,
            exponent: 0,
            trivial_fallback: false,
            contraction: None,
            simulation: None,
            transcript: tr,
        });
    }
    let simulate = n <= cfg.selection.simulate_up_to;
    let mut sim_summary = SimulationSummary { network_n: 0, trees: 0, bfs_depths: Vec::new(), rounds: 0, violations: 0 };

    // double sweep: ecc(0) <= D <= 2 ecc(0)
    let first = g.bfs(0, |_| true);
    let far = *first.order().last().expect("nonempty");
    let diameter_est = 2 * first.depth();
    if simulate {
        for root in [0, far] {
            let (t, sub) = bfs_protocol(g, root, &cfg.sim)?;
            if t.depth() != g.eccentricity(root, |_| true) {
                return Err(Error::Invariant(format!("simulated BFS from {root} has wrong depth")));
            }
            sim_summary.bfs_depths.push(t.depth());
            sim_summary.rounds += sub.simulated_rounds;
            tr.absorb(&format!("pipeline/bfs{root}"), sub);
        }
    } else {
        for (label, root) in [("pipeline/bfs_first", 0), ("pipeline/bfs_second", far)] {
            let d = g.eccentricity(root, |_| true);
            tr.add_charge(reg.charge_as("diameter", label, ChargeInputs { d: d as f64, ..Default::default() })?);
        }
    }
    let (lambda_est, charge) = oracle::lambda_estimate(g, cfg.msgc.cert_eps, diameter_est, reg)?;
    tr.add_charge(charge);
    let (dmin, dv) = g.min_weighted_degree().expect("n >= 2");
    let selection = select_branch(n, diameter_est, lambda_est, g.min_degree(), g.is_weighted(), &cfg.selection);

    let (cut, trees, exponent, trivial_fallback, contraction, network) = match selection.branch {
        Branch::Contracted => {
            let eps = selection.eps_used.expect("contracted branch sets eps");
            let m = build_msgc(g, eps, &cfg.msgc, reg, seed)?;
            tr.absorb("msgc", m.transcript.clone());
            let cg = &m.contracted;
            let r = min_cut_contracted(g, cg, lambda_est as u128, seed, &cfg.treecut)?;
            if !simulate {
                tr.add_charge(reg.charge_as(
                    "tree_cut_exact",
                    "pipeline/tree_cut_contracted",
                    ChargeInputs { n: cg.graph.n() as f64, ..Default::default() },
                )?);
            }
            // each tree's aggregation also crosses every cluster's internal tree once
            let routing = (r.trees * cg.sum_diameters()) as f64;
            tr.add_charge(reg.charge_as(
                "measured",
                "pipeline/cluster_routing",
                ChargeInputs { rounds: routing, ..Default::default() },
            )?);
            let summary = ContractionSummary {
                eps,
                certificate_edges: m.certificate.edges.len(),
                e_h_components: m.tripartition.components.len(),
                nontrivial_clusters: m.report.nontrivial_cluster_count,
                trimmed: m.report.trimmed_count,
                contracted_n: cg.graph.n(),
                contracted_m: cg.graph.m(),
                sum_cluster_diameters: cg.sum_diameters(),
                low_degree_warning: m.low_degree_warning,
                structure_violations: m.report.violations.clone(),
            };
            let network = (cg.graph.n() >= 2).then(|| cg.graph.clone());
            (r.cut, r.trees, r.exponent, r.trivial_fallback, Some(summary), network)
        }
        Branch::Direct | Branch::SmallLambda => {
            let r = min_cut_exact(g, lambda_est as u128, seed, &cfg.treecut)?;
            if selection.branch == Branch::SmallLambda {
                tr.add_charge(reg.charge_as(
                    "lambda_exact",
                    "pipeline/small_lambda_exact",
                    ChargeInputs { n: n as f64, d: diameter_est as f64, lambda: lambda_est as f64, ..Default::default() },
                )?);
            } else if !simulate {
                tr.add_charge(reg.charge_as(
                    "tree_cut_exact",
                    "pipeline/tree_cut_direct",
                    ChargeInputs { n: n as f64, ..Default::default() },
                )?);
            }
            let (cut, fallback) = if dmin < r.cut.value {
                (CutResult::from_set(g, &VertexSet::from_slice(n, &[dv]))?, true)
            } else {
                (r.cut, false)
            };
            (cut, r.trees, r.exponent, fallback, None, Some(g.clone()))
        }
        Branch::Disconnected => unreachable!("handled above"),
    };

    if simulate {
        if let Some(net) = &network {
            sim_summary.network_n = net.n();
            let set = spanning_tree_set(net, lambda_est as u128, seed, &cfg.treecut);
            for (i, edges) in set.trees.iter().enumerate() {
                let t = RootedTree::from_edges(net, 0, edges)?;
                let sv = simulated_tree_values(net, &t, &cfg.sim)?;
                check_tree_values(net, &t, &sv.one_respect, &sv.cross, i)?;
                sim_summary.rounds += sv.transcript.simulated_rounds;
                tr.absorb(&format!("pipeline/tree{i}"), sv.transcript);
                sim_summary.trees += 1;
            }
        }
        sim_summary.violations = tr.violations.len();
    }

    Ok(PipelineResult {
        cut,
        selection,
        trees,
        exponent,
        trivial_fallback,
        contraction,
        simulation: simulate.then_some(sim_summary),
        transcript: tr,
    })
}

fn check_tree_values<W: Weight>(g: &Graph<W>, t: &RootedTree, one: &[u128], cross: &[Vec<u128>], i: usize) -> Result<()> {
    let want: Vec<u128> = one_respect_values(g, t).into_iter().map(Weight::to_u128).collect();
    if want != one {
        return Err(Error::Invariant(format!("tree {i}: simulated one-respect values differ")));
    }
    for (u, row) in cross.iter().enumerate() {
        let want: Vec<u128> = cross_values(g, t, u).into_iter().map(Weight::to_u128).collect();
        if &want != row {
            return Err(Error::Invariant(format!("tree {i}: simulated cross values of {u} differ")));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub oracle_lambda: u128,
    pub agrees: bool,
}

/// Compares the pipeline answer with Stoer–Wagner and rechecks the cut value.
pub fn verify<W: Weight>(g: &Graph<W>, r: &PipelineResult<W>) -> Result<Verification> {
    let oracle_lambda = oracle::stoer_wagner(g)?.value.to_u128();
    let recount = g.cut_weight(&r.cut.set(g.n()))?.to_u128();
    Ok(Verification { oracle_lambda, agrees: oracle_lambda == r.cut.value.to_u128() && recount == oracle_lambda })
}

/// Machine-readable summary: answer, selection arithmetic, per-stage rounds,
/// violations, seed and the config echo.
pub fn report<W: Weight>(r: &PipelineResult<W>, cfg: &Config, seed: u64, verification: Option<&Verification>) -> serde_json::Value {
    serde_json::json!({
        "lambda": r.cut.value.to_u128(),
        "side": r.cut.side,
        "cut_edges": r.cut.crossing,
        "selection": r.selection,
        "tree_count": r.trees,
        "skeleton_exponent": r.exponent,
        "trivial_fallback": r.trivial_fallback,
        "contraction": r.contraction,
        "simulation": r.simulation,
        "rounds": r.transcript.rounds,
        "simulated_rounds": r.transcript.simulated_rounds,
        "charged_rounds": r.transcript.charged_rounds,
        "stages": r.transcript.stages,
        "violations": r.transcript.violations,
        "verification": verification,
        "seed": seed,
        "config": cfg,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub n: usize,
    pub m: usize,
    pub branch: Branch,
    pub lambda: u128,
    pub rounds: f64,
    pub charged_rounds: f64,
    pub simulated_rounds: u64,
}

/// Pipeline rounds over a family of graphs, for rounds-versus-`n` plots.
pub fn rounds_sweep<W: Weight>(graphs: &[Graph<W>], cfg: &Config, seed: u64) -> Result<Vec<SweepPoint>> {
    graphs
        .iter()
        .map(|g| {
            let r = pipeline(g, cfg, seed)?;
            Ok(SweepPoint {
                n: g.n(),
                m: g.m(),
                branch: r.selection.branch,
                lambda: r.cut.value.to_u128(),
                rounds: r.transcript.rounds,
                charged_rounds: r.transcript.charged_rounds,
                simulated_rounds: r.transcript.simulated_rounds,
            })
        })
        .collect()
}
