//! Sparse k-edge connectivity certificates from colored spanning forests.

use rand::Rng as _;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::charge::{Charge, ChargeInputs, ChargeRegistry};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::mst::boruvka;
use crate::oracle;
use crate::rng::stream;
use crate::scalar::Weight;
use crate::sim::Transcript;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    pub k: u64,
    pub eps: f64,
    pub tau: f64,
    pub ln_n: f64,
    /// `tau ln n / (eps^2 k)`
    pub p: f64,
    pub classes: usize,
    pub forests_per_class: usize,
}

pub fn make_params(n: usize, k: u64, eps: f64, tau: f64) -> Result<CertificateParams> {
    make_params_ln((n.max(2) as f64).ln(), k, eps, tau)
}

/// As [`make_params`] with `ln n` supplied directly.
pub fn make_params_ln(ln_n: f64, k: u64, eps: f64, tau: f64) -> Result<CertificateParams> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Precondition(format!("eps must lie in (0,1), got {eps}")));
    }
    if tau < 3.0 {
        return Err(Error::Precondition(format!("tau must be at least 3, got {tau}")));
    }
    if k == 0 {
        return Err(Error::Precondition("k must be at least 1".into()));
    }
    let p = tau * ln_n / (eps * eps * k as f64);
    let classes = (1.0 / p).round().max(1.0) as usize;
    let forests_per_class = ((1.0 + eps) * tau * ln_n / (eps * eps)).ceil().max(1.0) as usize;
    Ok(CertificateParams { k, eps, tau, ln_n, p, classes, forests_per_class })
}

/// Color in `0..classes` per edge. Each edge is colored by its larger-id
/// endpoint, which draws from its own stream in neighbor order.
pub fn color_edges<W: Weight>(g: &Graph<W>, classes: usize, seed: u64) -> Vec<usize> {
    let mut color = vec![0; g.m()];
    for v in 0..g.n() {
        let mut rng = stream(seed, v as u64, 0);
        for &(y, e) in g.adj(v) {
            if y < v {
                color[e] = rng.gen_range(0..classes);
            }
        }
    }
    color
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    /// Sorted edge ids of `E'`.
    pub edges: Vec<usize>,
    /// `forests[i][j]`: edge ids of forest `j` of class `i`.
    pub forests: Vec<Vec<Vec<usize>>>,
    pub coloring: Vec<usize>,
    pub params: CertificateParams,
}

impl Certificate {
    fn assemble(forests: Vec<Vec<Vec<usize>>>, coloring: Vec<usize>, params: CertificateParams, n: usize) -> Result<Self> {
        let mut edges: Vec<usize> = forests.iter().flatten().flatten().copied().collect();
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        if edges.len() != before {
            return Err(Error::Invariant("forests within a class overlap".into()));
        }
        let bound = params.classes * params.forests_per_class * n.saturating_sub(1);
        if edges.len() > bound {
            return Err(Error::Invariant(format!("certificate has {} edges, bound {bound}", edges.len())));
        }
        Ok(Certificate { edges, forests, coloring, params })
    }

    /// `G[E']` on the same vertex set, with the original edge id per new edge.
    pub fn subgraph<W: Weight>(&self, g: &Graph<W>) -> (Graph<W>, Vec<usize>) {
        let mut keep = vec![false; g.m()];
        for &e in &self.edges {
            keep[e] = true;
        }
        g.edge_subgraph(|e| keep[e])
    }
}

pub fn certificate_sequential<W: Weight>(g: &Graph<W>, params: &CertificateParams, seed: u64) -> Result<Certificate> {
    let coloring = color_edges(g, params.classes, seed);
    let mut forests = Vec::with_capacity(params.classes);
    for class in 0..params.classes {
        let mut residual: Vec<usize> = (0..g.m()).filter(|&e| coloring[e] == class).collect();
        let mut mine = Vec::new();
        for _ in 0..params.forests_per_class {
            if residual.is_empty() {
                break;
            }
            let keyed: Vec<(usize, usize, usize)> = residual.iter().map(|&e| (g.edge(e).u, g.edge(e).v, e)).collect();
            let (sel, _) = boruvka(g.n(), &keyed);
            let mut forest: Vec<usize> = sel.into_iter().map(|i| residual[i]).collect();
            forest.sort_unstable();
            residual.retain(|e| forest.binary_search(e).is_err());
            mine.push(forest);
        }
        forests.push(mine);
    }
    Certificate::assemble(forests, coloring, params.clone(), g.n())
}

/// One minimum spanning forest per weight function; `None` marks an absent
/// (infinite) edge. Ties are broken by edge id.
pub fn c_slot_mst<W: Weight>(g: &Graph<W>, slots: &[Vec<Option<u64>>]) -> Vec<Vec<usize>> {
    slots
        .iter()
        .map(|w| {
            // infinite edges sort last; the finite part of the MST is the MSF of finite edges
            let keyed: Vec<(usize, usize, (bool, u64, usize))> = g
                .edges()
                .iter()
                .enumerate()
                .map(|(id, e)| (e.u, e.v, (w[id].is_none(), w[id].unwrap_or(0), id)))
                .collect();
            let (sel, _) = boruvka(g.n(), &keyed);
            let mut finite: Vec<usize> = sel.into_iter().filter(|&i| w[i].is_some()).collect();
            finite.sort_unstable();
            finite
        })
        .collect()
}

/// Algorithm with `W_i(e) = 1` for class-`i` edges not yet selected and
/// infinity otherwise, iterated `forests_per_class` times.
pub fn certificate_distributed<W: Weight>(
    g: &Graph<W>,
    params: &CertificateParams,
    seed: u64,
    registry: &ChargeRegistry,
    diameter: usize,
) -> Result<(Certificate, Transcript)> {
    let mut tr = Transcript::default();
    let d = diameter as f64;
    tr.add_charge(registry.charge_as("diameter", "certificate/broadcast_c", ChargeInputs { d, ..Default::default() })?);
    let coloring = color_edges(g, params.classes, seed);
    let mut slots: Vec<Vec<Option<u64>>> = (0..params.classes)
        .map(|i| coloring.iter().map(|&c| (c == i).then_some(1)).collect())
        .collect();
    let mut forests = vec![Vec::new(); params.classes];
    let per = registry.charge_as(
        "c_slot_mst",
        "certificate/c_slot_mst",
        ChargeInputs { n: g.n() as f64, l: params.classes as f64, d, ..Default::default() },
    )?;
    for _ in 0..params.forests_per_class {
        if slots.iter().all(|s| s.iter().all(Option::is_none)) {
            break;
        }
        let picked = c_slot_mst(g, &slots);
        for (i, f) in picked.into_iter().enumerate() {
            for &e in &f {
                slots[i][e] = None;
            }
            if !f.is_empty() {
                forests[i].push(f);
            }
        }
    }
    // every iteration is scheduled, including those after the classes run dry
    let fpc = params.forests_per_class as f64;
    tr.add_charge(Charge {
        formula: format!("{fpc} x ({})", per.formula),
        inputs: ChargeInputs { k: fpc, ..per.inputs },
        rounds: per.rounds * fpc,
        label: per.label,
    });
    let cert = Certificate::assemble(forests, coloring, params.clone(), g.n())?;
    Ok((cert, tr))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub p: f64,
    pub cuts: usize,
    pub trials: usize,
    /// `(trial, cut)` pairs with at least `(1 + eps) p |C|` sampled edges.
    pub violating_pairs: usize,
    pub pair_rate: f64,
    /// Trials in which some cut violated.
    pub violating_trials: usize,
    pub max_ratio: f64,
}

/// Samples each edge with probability `min(1, p)` and compares every cut's
/// sampled count with `(1 + eps) p |C|`. Cuts are enumerated exhaustively.
/// A weight `w` stands for `w` parallel edges, each sampled independently.
pub fn sampling_concentration_check<W: Weight>(
    g: &Graph<W>,
    p: f64,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<ConcentrationReport> {
    const LIMIT: usize = 24;
    let n = g.n();
    if n > LIMIT {
        return Err(Error::Capacity { what: "exhaustive cut family", limit: LIMIT, got: n });
    }
    let p = p.min(1.0);
    // per cut, bitmask of crossing edges is too wide; keep crossing lists
    let cuts: Vec<Vec<usize>> = (1u32..(1u32 << (n - 1)))
        .map(|mask| {
            let s = VertexSet::from_mask((0..n).map(|v| v < n - 1 && mask >> v & 1 == 1).collect());
            g.crossing_edges(&s)
        })
        .filter(|c| !c.is_empty())
        .collect();
    let sizes: Vec<u64> = cuts.iter().map(|c| c.iter().map(|&e| g.edge(e).w.to_u128() as u64).sum()).collect();
    let mut rng = stream(seed, 0xc0c, 0);
    let mut report = ConcentrationReport {
        p,
        cuts: cuts.len(),
        trials,
        violating_pairs: 0,
        pair_rate: 0.0,
        violating_trials: 0,
        max_ratio: 0.0,
    };
    for _ in 0..trials {
        let sampled: Vec<u64> = g
            .edges()
            .iter()
            .map(|e| Binomial::new(e.w.to_u128() as u64, p).expect("valid binomial").sample(&mut rng))
            .collect();
        let mut any = false;
        for (c, size) in cuts.iter().zip(&sizes) {
            let kept = c.iter().map(|&e| sampled[e]).sum::<u64>() as f64;
            let expect = p * *size as f64;
            report.max_ratio = report.max_ratio.max(kept / expect);
            if kept >= (1.0 + eps) * expect {
                report.violating_pairs += 1;
                any = true;
            }
        }
        report.violating_trials += any as usize;
    }
    let pairs = (cuts.len() * trials).max(1);
    report.pair_rate = report.violating_pairs as f64 / pairs as f64;
    Ok(report)
}

#[derive(Clone, Debug)]
pub struct PipelineCertificate {
    /// Sorted edge ids kept.
    pub edges: Vec<usize>,
    pub lambda_est: u64,
    /// `None` when the whole edge set was returned.
    pub certificate: Option<Certificate>,
    pub transcript: Transcript,
}

/// Runs the certificate with `k = lambda'` when `lambda' < n^(1 - 2 eps_outer)`,
/// else keeps every edge. `cert_eps` is the certificate accuracy and also the
/// accuracy charged for the lambda estimate.
#[allow(clippy::too_many_arguments)]
pub fn certificate_pipeline<W: Weight>(
    g: &Graph<W>,
    eps_outer: f64,
    cert_eps: f64,
    tau: f64,
    seed: u64,
    registry: &ChargeRegistry,
    diameter: usize,
) -> Result<PipelineCertificate> {
    if !(eps_outer > 0.0 && eps_outer < 0.5) {
        return Err(Error::Precondition(format!("eps_outer must lie in (0, 1/2), got {eps_outer}")));
    }
    let mut tr = Transcript::default();
    let (lambda_est, charge) = oracle::lambda_estimate(g, cert_eps, diameter, registry)?;
    tr.add_charge(charge);
    let n = g.n();
    let threshold = (n as f64).powf(1.0 - 2.0 * eps_outer);
    if (lambda_est as f64) < threshold && lambda_est >= 1 {
        let params = make_params(n, lambda_est, cert_eps, tau)?;
        let (cert, sub) = certificate_distributed(g, &params, seed, registry, diameter)?;
        for c in sub.charges {
            tr.add_charge(c);
        }
        return Ok(PipelineCertificate { edges: cert.edges.clone(), lambda_est, certificate: Some(cert), transcript: tr });
    }
    Ok(PipelineCertificate { edges: (0..g.m()).collect(), lambda_est, certificate: None, transcript: tr })
}
