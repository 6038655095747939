//! Minimum cuts that 2-respect a packed spanning tree.
//!
//! For a rooted tree `T`, `C(v)` is the weight leaving `desc(v)` and
//! `C(u, v)` the weight of edges leaving both `desc(u)` and `desc(v)`. The cut
//! `desc(u) xor desc(v)` has value `C(u) + C(v) - 2 C(u, v)` and crosses
//! exactly the parent edges of `u` and `v`.

use rand::Rng as _;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::contraction::{Clustering, ContractedGraph};
use crate::error::{Error, Result};
use crate::graph::{CutResult, Graph, VertexSet};
use crate::mst::boruvka;
use crate::rng::stream;
use crate::scalar::Weight;
use crate::sim::{self, SimConfig, Transcript, Word};
use crate::tree::RootedTree;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TreeCutConfig {
    /// Skeleton target: `lambda * p ~ c_skel * (log2 n)^skel_exp`.
    pub c_skel: f64,
    pub skel_exp: f64,
    /// Tree count: `ceil(c_pack * (log2 n)^pack_exp)`.
    pub c_pack: f64,
    pub pack_exp: f64,
}

impl Default for TreeCutConfig {
    fn default() -> Self {
        TreeCutConfig { c_skel: 4.0, skel_exp: 1.1, c_pack: 2.0, pack_exp: 2.2 }
    }
}

impl TreeCutConfig {
    pub fn tree_count(&self, n: usize) -> usize {
        let lg = (n.max(2) as f64).log2();
        (self.c_pack * lg.powf(self.pack_exp)).ceil().max(1.0) as usize
    }

    /// `i = max(0, ceil(log2(lambda / (c_skel * (log2 n)^skel_exp))))`.
    pub fn sample_exponent(&self, n: usize, lambda_est: u128) -> u32 {
        if lambda_est == 0 {
            return 0;
        }
        let target = self.c_skel * (n.max(2) as f64).log2().powf(self.skel_exp);
        let r = (lambda_est as f64 / target).log2().ceil();
        if r <= 0.0 {
            0
        } else {
            r as u32
        }
    }
}

/// Greedy packing: each tree is a minimum spanning tree under `load / w`,
/// ties broken by `(load, edge id)`, after which its edges' loads rise by one.
pub fn greedy_tree_packing<W: Weight>(g: &Graph<W>, count: usize) -> Result<Vec<Vec<usize>>> {
    if !g.is_connected() {
        return Err(Error::Precondition("tree packing needs a connected graph".into()));
    }
    Ok(greedy_forest_packing(g, count))
}

/// The same packing with spanning forests, for possibly disconnected skeletons.
fn greedy_forest_packing<W: Weight>(g: &Graph<W>, count: usize) -> Vec<Vec<usize>> {
    let m = g.m();
    let mut load = vec![0u64; m];
    let w: Vec<u128> = g.edges().iter().map(|e| e.w.to_u128()).collect();
    let mut order: Vec<usize> = (0..m).collect();
    let mut trees = Vec::with_capacity(count);
    for _ in 0..count {
        order.sort_by(|&a, &b| {
            (load[a] as u128 * w[b])
                .cmp(&(load[b] as u128 * w[a]))
                .then(load[a].cmp(&load[b]))
                .then(a.cmp(&b))
        });
        let mut dsu = crate::mst::Dsu::new(g.n());
        let mut tree = Vec::with_capacity(g.n().saturating_sub(1));
        for &e in &order {
            let ed = g.edge(e);
            if dsu.union(ed.u, ed.v) {
                tree.push(e);
            }
        }
        for &e in &tree {
            load[e] += 1;
        }
        tree.sort_unstable();
        trees.push(tree);
    }
    trees
}

/// Sampled skeleton: edge `e` keeps `Binomial(w(e), p)` weight, `p = 2^-i`.
#[derive(Clone, Debug)]
pub struct Skeleton {
    pub graph: Graph<u64>,
    /// Original edge id per skeleton edge.
    pub origin: Vec<usize>,
    pub exponent: u32,
    pub p: f64,
}

pub fn skeleton_sample<W: Weight>(g: &Graph<W>, lambda_est: u128, seed: u64, cfg: &TreeCutConfig) -> Skeleton {
    let i = cfg.sample_exponent(g.n(), lambda_est);
    let p = 0.5f64.powi(i as i32);
    let mut rng = stream(seed, 0x5e1e, 0);
    let mut kept = Vec::new();
    let mut origin = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        let w = e.w.to_u128() as u64;
        let r = if i == 0 {
            w
        } else if w == 1 {
            rng.gen_bool(p) as u64
        } else {
            Binomial::new(w, p).expect("valid binomial").sample(&mut rng)
        };
        if r > 0 {
            kept.push((e.u, e.v, r));
            origin.push(id);
        }
    }
    let graph = Graph::new(g.n(), kept).expect("skeleton is a subgraph");
    Skeleton { graph, origin, exponent: i, p }
}

#[derive(Clone, Debug)]
pub struct TreeSet {
    /// Spanning forests of `g` as edge id lists.
    pub trees: Vec<Vec<usize>>,
    pub exponent: u32,
    pub p: f64,
    pub skeleton_edges: usize,
}

/// Packs trees in a skeleton and completes each to a spanning forest of `g`,
/// keeping every skeleton tree edge.
pub fn spanning_tree_set<W: Weight>(g: &Graph<W>, lambda_est: u128, seed: u64, cfg: &TreeCutConfig) -> TreeSet {
    let sk = skeleton_sample(g, lambda_est, seed, cfg);
    let packed = greedy_forest_packing(&sk.graph, cfg.tree_count(g.n()));
    let trees = packed
        .into_iter()
        .map(|t| {
            let mut fixed = vec![false; g.m()];
            for e in t {
                fixed[sk.origin[e]] = true;
            }
            let keyed: Vec<(usize, usize, (bool, usize))> =
                g.edges().iter().enumerate().map(|(id, e)| (e.u, e.v, (!fixed[id], id))).collect();
            let (sel, _) = boruvka(g.n(), &keyed);
            let mut ids: Vec<usize> = sel.into_iter().collect();
            ids.sort_unstable();
            ids
        })
        .collect();
    TreeSet { trees, exponent: sk.exponent, p: sk.p, skeleton_edges: sk.graph.m() }
}

/// `C(desc v, {x})`: weight at `x` crossing `desc(v)`.
pub fn local_cross<W: Weight>(g: &Graph<W>, t: &RootedTree, v: usize, x: usize) -> u128 {
    let x_in = t.is_ancestor(v, x);
    g.adj(x)
        .iter()
        .filter(|&&(y, _)| t.is_ancestor(v, y) != x_in)
        .map(|&(_, e)| g.edge(e).w.to_u128())
        .sum()
}

fn cast<W: Weight>(x: u128) -> W {
    num_traits::cast(x).expect("cut value fits the weight type")
}

/// `C(v)` for every tree vertex, as descendant sums of `C(desc v, {x})`.
pub fn one_respect_values<W: Weight>(g: &Graph<W>, t: &RootedTree) -> Vec<W> {
    let n = g.n();
    let mut acc = vec![0u128; n];
    for &x in t.order() {
        for a in t.ancestors(x) {
            acc[a] += local_cross(g, t, a, x);
        }
    }
    acc.into_iter().map(cast).collect()
}

/// `F_u(b) = sum over x in desc(b) of C(desc u, {x})`, a subtree convergecast.
/// Equals `C(u, b)` whenever `b` is not a proper ancestor of `u`.
pub fn cross_values<W: Weight>(g: &Graph<W>, t: &RootedTree, u: usize) -> Vec<W> {
    let mut f = vec![0u128; g.n()];
    for &x in t.order() {
        f[x] = local_cross(g, t, u, x);
    }
    for &x in t.order().iter().rev() {
        if let Some(p) = t.parent(x) {
            f[p] += f[x];
        }
    }
    f.into_iter().map(cast).collect()
}

/// `desc(u) xor desc(v)`; `u == v` gives `desc(v)`.
pub fn pair_side(t: &RootedTree, u: usize, v: usize) -> VertexSet {
    let mut s = VertexSet::empty(t.universe());
    for x in t.order() {
        let inside = if u == v { t.is_ancestor(v, *x) } else { t.is_ancestor(u, *x) != t.is_ancestor(v, *x) };
        if inside {
            s.insert(*x);
        }
    }
    s
}

/// Edges crossing `desc(u) xor desc(v)`, from ancestor tests alone.
pub fn recover_cut_edges<W: Weight>(g: &Graph<W>, t: &RootedTree, u: usize, v: usize) -> Vec<usize> {
    let side = |z: usize| if u == v { t.is_ancestor(v, z) } else { t.is_ancestor(u, z) != t.is_ancestor(v, z) };
    (0..g.m()).filter(|&e| side(g.edge(e).u) != side(g.edge(e).v)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoRespecting<W> {
    pub value: W,
    /// `(u, u)` for a 1-respecting cut.
    pub pair: (usize, usize),
    pub cut: CutResult<W>,
}

/// All-pairs `S[a][b]`: weight of `(x, y)` pairs with `x` in `desc(a)` and `y`
/// in `desc(b)`, counting an edge once per orientation.
fn subtree_pair_sums<W: Weight>(g: &Graph<W>, t: &RootedTree) -> Vec<Vec<u128>> {
    let n = g.n();
    let mut s = vec![vec![0u128; n]; n];
    for e in g.edges() {
        s[e.u][e.v] += e.w.to_u128();
        s[e.v][e.u] += e.w.to_u128();
    }
    let bottom_up: Vec<usize> = t.order().iter().rev().copied().collect();
    for &x in &bottom_up {
        if let Some(p) = t.parent(x) {
            let (a, b) = if p < x {
                let (lo, hi) = s.split_at_mut(x);
                (&mut lo[p], &hi[0])
            } else {
                let (lo, hi) = s.split_at_mut(p);
                (&mut hi[0], &lo[x])
            };
            for (dst, src) in a.iter_mut().zip(b.iter()) {
                *dst += *src;
            }
        }
    }
    for row in s.iter_mut() {
        for &x in &bottom_up {
            if let Some(p) = t.parent(x) {
                row[p] += row[x];
            }
        }
    }
    s
}

/// Minimum over every cut crossing at most two tree edges. Ties go to the
/// smallest `(value, a, b)` with `a <= b` and a single edge written `(v, v)`.
/// The chosen cut is re-evaluated directly before it is returned.
pub fn min_2respect<W: Weight>(g: &Graph<W>, t: &RootedTree) -> Result<TwoRespecting<W>> {
    if t.size() != g.n() || g.n() < 2 {
        return Err(Error::Precondition("2-respecting search needs a spanning tree on >= 2 vertices".into()));
    }
    let s = subtree_pair_sums(g, t);
    let n = g.n();
    let mut wdeg = vec![0u128; n];
    for &x in t.order() {
        wdeg[x] = g.weighted_degree(x).to_u128();
    }
    for &x in t.order().iter().rev() {
        if let Some(p) = t.parent(x) {
            wdeg[p] += wdeg[x];
        }
    }
    let c1: Vec<u128> = (0..n).map(|v| wdeg[v] - s[v][v]).collect();
    let root = t.root();
    let mut best: Option<(u128, usize, usize)> = None;
    let mut offer = |val: u128, a: usize, b: usize| {
        let cand = (val, a.min(b), a.max(b));
        if best.map_or(true, |cur| cand < cur) {
            best = Some(cand);
        }
    };
    for v in 0..n {
        if v == root {
            continue;
        }
        offer(c1[v], v, v);
        for u in v + 1..n {
            if u == root {
                continue;
            }
            let val = if t.is_ancestor(v, u) {
                // desc(v) minus desc(u)
                c1[v] + 2 * (s[u][v] - s[u][u]) - c1[u]
            } else if t.is_ancestor(u, v) {
                c1[u] + 2 * (s[v][u] - s[v][v]) - c1[v]
            } else {
                c1[u] + c1[v] - 2 * s[u][v]
            };
            offer(val, u, v);
        }
    }
    let (val, a, b) = best.expect("n >= 2 gives a non-root vertex");
    let side = pair_side(t, a, b);
    let cut = CutResult::from_set(g, &side)?;
    if cut.value.to_u128() != val {
        return Err(Error::Invariant(format!("pair ({a},{b}) evaluates to {} but formula gave {val}", cut.value)));
    }
    Ok(TwoRespecting { value: cut.value, pair: (a, b), cut })
}

#[derive(Clone, Debug)]
pub struct ExactCut<W> {
    pub cut: CutResult<W>,
    pub trees: usize,
    /// Index of the first tree attaining the minimum.
    pub best_tree: usize,
    pub exponent: u32,
}

/// Minimum cut over a packed tree set. `lambda_est` sets the skeleton rate.
pub fn min_cut_exact<W: Weight>(g: &Graph<W>, lambda_est: u128, seed: u64, cfg: &TreeCutConfig) -> Result<ExactCut<W>> {
    if g.n() < 2 {
        return Err(Error::Precondition("minimum cut needs at least two vertices".into()));
    }
    let comps = g.connected_components(|_| true);
    if comps.len() != 1 || comps[0].len() != g.n() {
        let side = comps.first().cloned().unwrap_or_else(|| vec![0]);
        let cut = CutResult::from_set(g, &VertexSet::from_slice(g.n(), &side))?;
        return Ok(ExactCut { cut, trees: 0, best_tree: 0, exponent: 0 });
    }
    let set = spanning_tree_set(g, lambda_est, seed, cfg);
    let mut best: Option<(TwoRespecting<W>, usize)> = None;
    for (i, edges) in set.trees.iter().enumerate() {
        let t = RootedTree::from_edges(g, 0, edges)?;
        let r = min_2respect(g, &t)?;
        if best.as_ref().map_or(true, |(b, _)| r.value < b.value) {
            best = Some((r, i));
        }
    }
    let (r, i) = best.expect("at least one tree");
    Ok(ExactCut { cut: r.cut, trees: set.trees.len(), best_tree: i, exponent: set.exponent })
}

/// Physical edges carrying a spanning tree of a contracted graph: one edge per
/// contracted tree edge plus a BFS tree inside every cluster.
#[derive(Clone, Debug, PartialEq)]
pub struct Mapping {
    /// Physical edge behind the parent edge of each non-root super-vertex.
    pub tree_edges: Vec<usize>,
    pub clusters: Vec<ClusterTree>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterTree {
    pub group: usize,
    /// Super-vertex of the collapsed core.
    pub core: usize,
    pub leader: usize,
    /// BFS tree of `G[C]` rooted at the leader.
    pub edges: Vec<usize>,
    pub depth: usize,
}

impl Mapping {
    /// Copies of each physical edge in the multiset.
    pub fn multiplicity(&self, m: usize) -> Vec<usize> {
        let mut k = vec![0; m];
        for &e in self.tree_edges.iter().chain(self.clusters.iter().flat_map(|c| &c.edges)) {
            k[e] += 1;
        }
        k
    }

    pub fn sum_cluster_depths(&self) -> usize {
        self.clusters.iter().map(|c| c.depth).sum()
    }
}

/// Smallest physical edge id between each pair of adjacent super-vertices.
fn physical_edges<W: Weight>(g: &Graph<W>, cg: &ContractedGraph<W>) -> std::collections::BTreeMap<(usize, usize), usize> {
    let mut first = std::collections::BTreeMap::new();
    for (id, e) in g.edges().iter().enumerate() {
        let (a, b) = (cg.super_of[e.u], cg.super_of[e.v]);
        if a != b {
            first.entry((a.min(b), a.max(b))).or_insert(id);
        }
    }
    first
}

/// The leader of a cluster owns the physical edge from its core to the core's
/// tree parent, or is the smallest core member when the core is the root.
pub fn build_mapping<W: Weight>(g: &Graph<W>, c: &Clustering, cg: &ContractedGraph<W>, tree: &RootedTree) -> Result<Mapping> {
    if tree.size() != cg.graph.n() {
        return Err(Error::Precondition("tree must span the contracted graph".into()));
    }
    let first = physical_edges(g, cg);
    let mut tree_edges = Vec::new();
    for &s in tree.order() {
        if let Some(p) = tree.parent(s) {
            tree_edges.push(first[&(s.min(p), s.max(p))]);
        }
    }
    let mut clusters = Vec::new();
    for (group, members) in c.groups() {
        if members.len() < 2 {
            continue;
        }
        let Some(&core_v) = members.iter().find(|&&v| !c.regular[v]) else {
            continue;
        };
        let core = cg.super_of[core_v];
        let leader = match tree.parent(core) {
            None => cg.members[core][0],
            Some(p) => {
                let e = g.edge(first[&(core.min(p), core.max(p))]);
                if cg.super_of[e.u] == core {
                    e.u
                } else {
                    e.v
                }
            }
        };
        let bfs = g.bfs(leader, |e| c.group_id[g.edge(e).u] == group && c.group_id[g.edge(e).v] == group);
        if bfs.size() != members.len() {
            return Err(Error::Invariant(format!("cluster {group} is disconnected in G[C]")));
        }
        clusters.push(ClusterTree { group, core, leader, edges: bfs.edges(), depth: bfs.depth() });
    }
    Ok(Mapping { tree_edges, clusters })
}

#[derive(Clone, Debug)]
pub struct ContractedCut<W> {
    /// The cut lifted to the original vertices.
    pub cut: CutResult<W>,
    /// Value found on the contracted graph, before the degree fallback.
    pub contracted_value: Option<W>,
    pub trees: usize,
    pub exponent: u32,
    /// Set when the minimum weighted degree beat the contracted search.
    pub trivial_fallback: bool,
}

/// Minimum cut of `g` through its contraction; edges inside a core never
/// reach the contracted graph, so they can never be cut. The answer is the
/// smaller of the contracted minimum and the minimum weighted degree of `g`.
pub fn min_cut_contracted<W: Weight>(
    g: &Graph<W>,
    cg: &ContractedGraph<W>,
    lambda_est: u128,
    seed: u64,
    cfg: &TreeCutConfig,
) -> Result<ContractedCut<W>> {
    let (dmin, dv) = g
        .min_weighted_degree()
        .ok_or_else(|| Error::Precondition("minimum cut needs at least two vertices".into()))?;
    let found = if cg.graph.n() >= 2 { Some(min_cut_exact(&cg.graph, lambda_est, seed, cfg)?) } else { None };
    let (trees, exponent) = found.as_ref().map_or((0, 0), |f| (f.trees, f.exponent));
    match found {
        Some(f) if f.cut.value <= dmin => {
            let side = cg.lift(&f.cut.set(cg.graph.n()));
            let cut = CutResult::from_set(g, &side)?;
            if cut.value != f.cut.value {
                return Err(Error::Invariant(format!("lifted cut has value {} not {}", cut.value, f.cut.value)));
            }
            Ok(ContractedCut { cut, contracted_value: Some(f.cut.value), trees, exponent, trivial_fallback: false })
        }
        other => {
            let cut = CutResult::from_set(g, &VertexSet::from_slice(g.n(), &[dv]))?;
            Ok(ContractedCut { cut, contracted_value: other.map(|f| f.cut.value), trees, exponent, trivial_fallback: true })
        }
    }
}

/// Tree values computed by message passing.
#[derive(Clone, Debug)]
pub struct SimulatedTreeValues {
    /// `C(v)` per vertex; the root holds zero.
    pub one_respect: Vec<u128>,
    /// `cross[u][b] = F_u(b)`, as returned by `cross_values`.
    pub cross: Vec<Vec<u128>>,
    pub transcript: Transcript,
}

/// Ancestor downcast, list exchange with neighbors, one descendant-sum
/// aggregation for `C(v)` and an `n`-wide convergecast for the cross values.
pub fn simulated_tree_values<W: Weight>(g: &Graph<W>, t: &RootedTree, sim: &SimConfig) -> Result<SimulatedTreeValues> {
    let n = g.n();
    if t.size() != n {
        return Err(Error::Precondition("simulation needs a spanning tree".into()));
    }
    let mut tr = Transcript::default();
    let ids: Vec<Word> = (0..n as Word).collect();
    let (anc, t1) = sim::downcast(g, t, &ids, sim)?;
    tr.absorb("tree/ancestors", t1);
    // own id first, then ancestors nearest first
    let lists: Vec<Vec<Word>> = (0..n).map(|v| std::iter::once(v as Word).chain(anc[v].iter().copied()).collect()).collect();
    let (heard, t2) = sim::exchange_lists(g, &lists, sim)?;
    tr.absorb("tree/exchange", t2);
    let member = |list: &[Word], a: usize| list.contains(&(a as Word));
    let mut local_c = Vec::with_capacity(n);
    let mut local_x = Vec::with_capacity(n);
    for x in 0..n {
        let weight_to = |y: usize| g.edge(g.edge_between(x, y).expect("neighbor")).w.to_u128() as Word;
        let cross_at = |a: usize| -> Word {
            let x_in = member(&lists[x], a);
            heard[x].iter().filter(|(_, yl)| member(yl, a) != x_in).map(|(y, _)| weight_to(*y)).sum()
        };
        // levels 0..=level(x), root first
        local_c.push(lists[x].iter().rev().map(|&a| cross_at(a as usize)).collect::<Vec<_>>());
        local_x.push((0..n).map(cross_at).collect::<Vec<_>>());
    }
    let (one, t3) = sim::aggregate_descendant_sums(g, t, &local_c, sim)?;
    tr.absorb("tree/one_respect", t3);
    let (sums, t4) = sim::convergecast_subtree(g, t, &local_x, n, sim)?;
    tr.absorb("tree/cross", t4);
    let mut cross = vec![vec![0u128; n]; n];
    for (b, row) in sums.iter().enumerate() {
        for (u, &val) in row.iter().enumerate() {
            cross[u][b] = val as u128;
        }
    }
    let one_respect: Vec<u128> = one.into_iter().map(|x| x as u128).collect();
    Ok(SimulatedTreeValues { one_respect, cross, transcript: tr })
}
