//! Vertex groups from expander components, trimmed and shaved into
//! clusters whose cores collapse without touching non-trivial minimum cuts.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::certificate::{certificate_pipeline, PipelineCertificate};
use crate::charge::{ChargeInputs, ChargeRegistry};
use crate::decomposition::{tripartition, DecompositionConfig, Tripartition};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::oracle::enumerate_min_cuts;
use crate::scalar::Weight;
use crate::sim::Transcript;

/// Group ids live in `0..2n`: `max` member id for groups grown from a
/// component, `n + v` once `v` is trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clustering {
    pub group_id: Vec<usize>,
    pub regular: Vec<bool>,
    /// Whether the vertex started inside an `E_h` component.
    pub from_component: Vec<bool>,
}

impl Clustering {
    pub fn n(&self) -> usize {
        self.group_id.len()
    }

    pub fn groups(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut g: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &id) in self.group_id.iter().enumerate() {
            g.entry(id).or_default().push(v);
        }
        g
    }

    pub fn nontrivial(&self) -> Vec<Vec<usize>> {
        self.groups().into_values().filter(|c| c.len() > 1).collect()
    }

    /// Non-regular members of each nontrivial group, skipping empty cores.
    pub fn cores(&self) -> Vec<Vec<usize>> {
        self.nontrivial()
            .into_iter()
            .map(|c| c.into_iter().filter(|&v| !self.regular[v]).collect::<Vec<_>>())
            .filter(|c| !c.is_empty())
            .collect()
    }

    fn same_group<W: Weight>(&self, g: &Graph<W>, v: usize) -> usize {
        g.adj(v).iter().filter(|&&(u, _)| self.group_id[u] == self.group_id[v]).count()
    }
}

/// One group per component, named by its largest member; every other
/// vertex is its own group.
pub fn init_groups(n: usize, components: &[Vec<usize>]) -> Clustering {
    let mut group_id: Vec<usize> = (0..n).collect();
    let mut from_component = vec![false; n];
    for c in components {
        let id = *c.iter().max().expect("components are nonempty");
        for &v in c {
            group_id[v] = id;
            from_component[v] = true;
        }
    }
    Clustering { group_id, regular: vec![false; n], from_component }
}

/// Bulk-synchronous trimming to the fixed point where every remaining member
/// of a component group keeps at least `2/5` of its degree inside its group.
/// Returns the new clustering and the number of trimmed vertices.
pub fn trim<W: Weight>(g: &Graph<W>, c: &Clustering) -> (Clustering, usize) {
    let n = g.n();
    let mut c = c.clone();
    let mut trimmed = 0;
    loop {
        let out: Vec<usize> = (0..n)
            .filter(|&v| c.from_component[v] && c.group_id[v] < n && 5 * c.same_group(g, v) < 2 * g.degree(v))
            .collect();
        if out.is_empty() {
            break;
        }
        trimmed += out.len();
        for v in out {
            c.group_id[v] = n + v;
        }
    }
    (c, trimmed)
}

/// Splits every group whose induced subgraph is disconnected into its
/// connected pieces, each named by its largest member. Returns the number of
/// groups split.
pub fn split_disconnected<W: Weight>(g: &Graph<W>, c: &mut Clustering) -> usize {
    let mut split = 0;
    for members in c.groups().into_values() {
        if members.len() < 2 {
            continue;
        }
        let pieces = induced_pieces(g, &members, &c.group_id);
        if pieces.len() > 1 {
            split += 1;
            for p in pieces {
                let id = *p.iter().max().expect("nonempty piece");
                for v in p {
                    c.group_id[v] = id;
                }
            }
        }
    }
    split
}

fn induced_pieces<W: Weight>(g: &Graph<W>, members: &[usize], gid: &[usize]) -> Vec<Vec<usize>> {
    let id = gid[members[0]];
    let mut seen: BTreeMap<usize, bool> = members.iter().map(|&v| (v, false)).collect();
    let mut out = Vec::new();
    for &s in members {
        if seen[&s] {
            continue;
        }
        seen.insert(s, true);
        let mut piece = vec![s];
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &(y, _) in g.adj(x) {
                if gid[y] == id && !seen[&y] {
                    seen.insert(y, true);
                    piece.push(y);
                    q.push_back(y);
                }
            }
        }
        piece.sort_unstable();
        out.push(piece);
    }
    out
}

/// One pass: a member of a component group is Regular when at most
/// `deg/2 + 1` of its neighbours share its group. Trivial groups are Regular.
pub fn shave<W: Weight>(g: &Graph<W>, c: &Clustering) -> Clustering {
    let n = g.n();
    let groups = c.groups();
    let mut out = c.clone();
    for v in 0..n {
        let trivial = groups[&c.group_id[v]].len() == 1;
        out.regular[v] = trivial || (c.group_id[v] < n && 2 * c.same_group(g, v) <= g.degree(v) + 2);
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractedGraph<W: Weight> {
    pub graph: Graph<W>,
    /// Super-vertex of each original vertex.
    pub super_of: Vec<usize>,
    /// Original vertices behind each super-vertex.
    pub members: Vec<Vec<usize>>,
    pub core_count: usize,
    /// `(group id, diam(G[C]))` for nontrivial groups.
    pub cluster_diameters: Vec<(usize, usize)>,
}

impl<W: Weight> ContractedGraph<W> {
    /// Original vertex set behind a set of super-vertices.
    pub fn lift(&self, side: &VertexSet) -> VertexSet {
        let mut s = VertexSet::empty(self.super_of.len());
        for x in side.iter() {
            for &v in &self.members[x] {
                s.insert(v);
            }
        }
        s
    }

    pub fn sum_diameters(&self) -> usize {
        self.cluster_diameters.iter().map(|&(_, d)| d).sum()
    }
}

/// Collapses every core of `c` into one vertex, dropping edges inside a core
/// and merging parallel edges by summing weights.
pub fn contract<W: Weight>(g: &Graph<W>, c: &Clustering) -> Result<ContractedGraph<W>> {
    let n = g.n();
    if c.n() != n {
        return Err(Error::InvalidGraph(format!("clustering over {} vertices, graph has {n}", c.n())));
    }
    let groups = c.groups();
    let mut super_of = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut core_super: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..n {
        let in_core = !c.regular[v] && groups[&c.group_id[v]].len() > 1;
        let s = if in_core {
            *core_super.entry(c.group_id[v]).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            })
        } else {
            members.push(Vec::new());
            members.len() - 1
        };
        super_of[v] = s;
        members[s].push(v);
    }
    let mut merged: BTreeMap<(usize, usize), W> = BTreeMap::new();
    for e in g.edges() {
        let (a, b) = (super_of[e.u], super_of[e.v]);
        if a != b {
            let w = merged.entry((a.min(b), a.max(b))).or_insert(W::zero());
            *w = *w + e.w;
        }
    }
    let graph = Graph::new(members.len(), merged.into_iter().map(|((a, b), w)| (a, b, w)))?;
    let cluster_diameters = groups
        .iter()
        .filter(|(_, m)| m.len() > 1)
        .map(|(&id, m)| (id, induced_diameter(g, m, &c.group_id)))
        .collect();
    Ok(ContractedGraph { graph, super_of, members, core_count: core_super.len(), cluster_diameters })
}

/// Diameter of the subgraph induced by one group; `usize::MAX` if disconnected.
fn induced_diameter<W: Weight>(g: &Graph<W>, members: &[usize], gid: &[usize]) -> usize {
    let id = gid[members[0]];
    let mut dist = vec![usize::MAX; g.n()];
    let mut best = 0;
    for &s in members {
        for &v in members {
            dist[v] = usize::MAX;
        }
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        let mut reached = 1;
        while let Some(x) = q.pop_front() {
            for &(y, _) in g.adj(x) {
                if gid[y] == id && dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    best = best.max(dist[y]);
                    reached += 1;
                    q.push_back(y);
                }
            }
        }
        if reached < members.len() {
            return usize::MAX;
        }
    }
    best
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PreservationReport {
    pub min_cuts: usize,
    pub nontrivial_min_cuts: usize,
    /// A core with members on both sides of a non-trivial minimum cut.
    pub core_splits: Vec<String>,
    /// A group with more than two members on both sides of a minimum cut.
    pub group_splits: Vec<String>,
    /// A group with at least `delta / 100` members on both sides.
    pub dichotomy_failures: Vec<String>,
}

impl PreservationReport {
    pub fn cores_intact(&self) -> bool {
        self.core_splits.is_empty()
    }
}

/// Checks every minimum cut of a small graph against every nontrivial group.
pub fn validate_min_cut_preservation<W: Weight>(g: &Graph<W>, c: &Clustering) -> Result<PreservationReport> {
    let cuts = enumerate_min_cuts(g)?;
    let n = g.n();
    let delta = g.min_degree() as f64;
    let mut r = PreservationReport { min_cuts: cuts.len(), ..Default::default() };
    let groups: Vec<Vec<usize>> = c.nontrivial();
    for cut in &cuts {
        let t = cut.set(n);
        let nontrivial = t.len() >= 2 && n - t.len() >= 2;
        if nontrivial {
            r.nontrivial_min_cuts += 1;
        }
        for grp in &groups {
            let in_t = grp.iter().filter(|&&v| t.contains(v)).count();
            let in_u = grp.len() - in_t;
            let id = c.group_id[grp[0]];
            if in_t > 2 && in_u > 2 {
                r.group_splits.push(format!("group {id} splits {in_t}/{in_u} across cut {:?}", cut.side));
            }
            if in_t as f64 >= delta / 100.0 && in_u as f64 >= delta / 100.0 {
                r.dichotomy_failures.push(format!("group {id} splits {in_t}/{in_u}"));
            }
            if nontrivial {
                let core: Vec<usize> = grp.iter().copied().filter(|&v| !c.regular[v]).collect();
                let ct = core.iter().filter(|&&v| t.contains(v)).count();
                if ct > 0 && ct < core.len() {
                    r.core_splits.push(format!("core of group {id} splits {ct}/{} across cut {:?}", core.len() - ct, cut.side));
                }
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub nontrivial_cluster_count: usize,
    pub trimmed_count: usize,
    /// Members of every group flagged Regular, trivial groups included.
    pub regular_count: usize,
    /// Regular members of nontrivial groups.
    pub shaved_count: usize,
    pub sum_cluster_diameters: usize,
    pub delta_used: usize,
    pub min_cluster_size: Option<usize>,
    /// `3n / delta`
    pub cluster_count_bound: f64,
    /// `2 delta / 5`
    pub cluster_size_floor: f64,
    /// `n^(1 - eps/22)`
    pub trimmed_target: f64,
    /// `n^(1 - 2 eps)`
    pub cluster_target: f64,
    /// `n^(1 - eps/20)`
    pub diameter_target: f64,
    pub violations: Vec<String>,
}

pub fn structure_report<W: Weight>(g: &Graph<W>, c: &Clustering, trimmed: usize, eps: f64) -> StructureReport {
    let n = g.n() as f64;
    let delta = g.min_degree();
    let groups = c.nontrivial();
    let sum_diam = groups
        .iter()
        .map(|m| induced_diameter(g, m, &c.group_id))
        .fold(0usize, |a, d| a.saturating_add(d));
    let cluster_count_bound = if delta == 0 { f64::INFINITY } else { 3.0 * n / delta as f64 };
    let cluster_size_floor = 2.0 * delta as f64 / 5.0;
    let min_cluster_size = groups.iter().map(Vec::len).min();
    let mut violations = Vec::new();
    if groups.len() as f64 > cluster_count_bound {
        violations.push(format!("{} nontrivial clusters exceed 3n/delta = {cluster_count_bound:.2}", groups.len()));
    }
    if let Some(s) = min_cluster_size.filter(|&s| (s as f64) < cluster_size_floor) {
        violations.push(format!("cluster of size {s} below 2 delta/5 = {cluster_size_floor:.2}"));
    }
    StructureReport {
        nontrivial_cluster_count: groups.len(),
        trimmed_count: trimmed,
        regular_count: c.regular.iter().filter(|&&r| r).count(),
        shaved_count: groups.iter().flatten().filter(|&&v| c.regular[v]).count(),
        sum_cluster_diameters: sum_diam,
        delta_used: delta,
        min_cluster_size,
        cluster_count_bound,
        cluster_size_floor,
        trimmed_target: n.powf(1.0 - eps / 22.0),
        cluster_target: n.powf(1.0 - 2.0 * eps),
        diameter_target: n.powf(1.0 - eps / 20.0),
        violations,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MsgcConfig {
    /// Accuracy of the certificate and of the charged lambda estimate.
    pub cert_eps: f64,
    pub tau: f64,
    pub decomposition: DecompositionConfig,
}

impl Default for MsgcConfig {
    fn default() -> Self {
        MsgcConfig { cert_eps: 0.5, tau: 3.0, decomposition: DecompositionConfig::default() }
    }
}

#[derive(Clone, Debug)]
pub struct Msgc<W: Weight> {
    pub certificate: PipelineCertificate,
    /// The certificate subgraph on the original vertex ids.
    pub sparse: Graph<W>,
    pub tripartition: Tripartition,
    pub clustering: Clustering,
    pub contracted: ContractedGraph<W>,
    pub report: StructureReport,
    /// Set when `delta < n^(2 eps)`.
    pub low_degree_warning: bool,
    pub transcript: Transcript,
}

/// Certificate, tripartition with `gamma = eps` and `rho = eps/11`, groups,
/// trim, shave and core contraction. Clusters come from the certificate; the
/// contracted graph keeps every edge of `g`.
pub fn build_msgc<W: Weight>(
    g: &Graph<W>,
    eps: f64,
    cfg: &MsgcConfig,
    registry: &ChargeRegistry,
    seed: u64,
) -> Result<Msgc<W>> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Precondition(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    if g.is_weighted() {
        return Err(Error::Precondition("contraction expects an unweighted graph".into()));
    }
    let n = g.n();
    let mut tr = Transcript::default();
    let d = if n > 0 { g.eccentricity(0, |_| true) } else { 0 };
    tr.add_charge(registry.charge_as("diameter", "msgc/bfs", ChargeInputs { d: d as f64, ..Default::default() })?);
    let cert = certificate_pipeline(g, eps / 44.0, cfg.cert_eps, cfg.tau, seed, registry, d)?;
    for c in &cert.transcript.charges {
        tr.add_charge(c.clone());
    }
    let keep: Vec<bool> = {
        let mut k = vec![false; g.m()];
        for &e in &cert.edges {
            k[e] = true;
        }
        k
    };
    let (sparse, _) = g.edge_subgraph(|e| keep[e]);
    let tp = tripartition(&sparse, eps, eps / 11.0, &cfg.decomposition, registry, seed ^ 0x7219)?;
    tr.absorb("tripartition", tp.transcript.clone());
    let depth = tp
        .components
        .iter()
        .map(|c| sparse.eccentricity(c[0], |e| tp.e_h.binary_search(&e).is_ok()))
        .max()
        .unwrap_or(0);
    tr.add_charge(registry.charge_as("diameter", "msgc/group_ids", ChargeInputs { d: depth as f64, ..Default::default() })?);
    let init = init_groups(n, &tp.components);
    let (mut trimmed, count) = trim(&sparse, &init);
    split_disconnected(&sparse, &mut trimmed);
    tr.add_charge(registry.charge_as(
        "trim",
        "msgc/trim",
        ChargeInputs { k: count as f64, d: d as f64, ..Default::default() },
    )?);
    let clustering = shave(&sparse, &trimmed);
    tr.add_charge(registry.charge_as("measured", "msgc/shave", ChargeInputs { rounds: 1.0, ..Default::default() })?);
    let contracted = contract(g, &clustering)?;
    let report = structure_report(&sparse, &clustering, count, eps);
    let low_degree_warning = (g.min_degree() as f64) < (n as f64).powf(2.0 * eps);
    Ok(Msgc {
        certificate: cert,
        sparse,
        tripartition: tp,
        clustering,
        contracted,
        report,
        low_degree_warning,
        transcript: tr,
    })
}
