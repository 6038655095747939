//! Simple undirected graphs with dense vertex ids and positive integer weights.

use std::collections::VecDeque;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::scalar::{pow_saturating, Weight};
use crate::tree::RootedTree;

/// Edge with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge<W> {
    pub u: usize,
    pub v: usize,
    pub w: W,
}

impl<W> Edge<W> {
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph<W: Weight = u64> {
    n: usize,
    edges: Vec<Edge<W>>,
    // (neighbor, edge id), sorted by neighbor
    adj: Vec<Vec<(usize, usize)>>,
}

impl<W: Weight> Graph<W> {
    /// Builds a graph, rejecting self-loops, duplicates, out-of-range ids and
    /// zero weights. Edge ids follow input order.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, W)>) -> Result<Self> {
        let mut list = Vec::new();
        let mut adj = vec![Vec::new(); n];
        for (i, (a, b, w)) in edges.into_iter().enumerate() {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!("edge {i} ({a},{b}) out of range for n={n}")));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("edge {i} is a self-loop at {a}")));
            }
            if w.is_zero() {
                return Err(Error::InvalidGraph(format!("edge {i} ({a},{b}) has zero weight")));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            adj[u].push((v, i));
            adj[v].push((u, i));
            list.push(Edge { u, v, w });
        }
        for (x, nb) in adj.iter_mut().enumerate() {
            nb.sort_unstable();
            if let Some(p) = nb.windows(2).find(|p| p[0].0 == p[1].0) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({},{}) as ids {} and {}",
                    x.min(p[0].0),
                    x.max(p[0].0),
                    p[0].1,
                    p[1].1
                )));
            }
        }
        Ok(Graph { n, edges: list, adj })
    }

    pub fn unweighted(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::new(n, edges.into_iter().map(|(u, v)| (u, v, W::one())))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge<W> {
        &self.edges[id]
    }

    /// `(neighbor, edge id)` pairs sorted by neighbor.
    pub fn adj(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn weighted_degree(&self, v: usize) -> W {
        self.adj[v].iter().map(|&(_, e)| self.edges[e].w).sum()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// Smallest weighted degree and a vertex attaining it.
    pub fn min_weighted_degree(&self) -> Option<(W, usize)> {
        (0..self.n).map(|v| (self.weighted_degree(v), v)).min()
    }

    pub fn is_weighted(&self) -> bool {
        self.edges.iter().any(|e| !e.w.is_one())
    }

    pub fn total_weight(&self) -> W {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        let nb = &self.adj[u];
        nb.binary_search_by_key(&v, |&(x, _)| x).ok().map(|i| nb[i].1)
    }

    /// Re-checks the structural invariants.
    pub fn validate(&self) -> Result<()> {
        let mut seen = 0usize;
        for (x, nb) in self.adj.iter().enumerate() {
            for w in nb.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(Error::InvalidGraph(format!("adjacency of {x} not strictly sorted")));
                }
            }
            for &(y, e) in nb {
                let ed = self.edges.get(e).ok_or_else(|| Error::InvalidGraph(format!("dangling edge id {e}")))?;
                if !(ed.u == x && ed.v == y || ed.v == x && ed.u == y) {
                    return Err(Error::InvalidGraph(format!("edge {e} does not join {x} and {y}")));
                }
                seen += 1;
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.u >= e.v || e.v >= self.n || e.w.is_zero() {
                return Err(Error::InvalidGraph(format!("malformed edge {i}")));
            }
        }
        if seen != 2 * self.edges.len() {
            return Err(Error::InvalidGraph("adjacency and edge list disagree".into()));
        }
        Ok(())
    }

    /// Rejects weights above `n^c_w`.
    pub fn check_weight_bound(&self, c_w: u32) -> Result<()> {
        let cap = pow_saturating(self.n.max(2) as u64, c_w) as u128;
        match self.edges.iter().position(|e| e.w.to_u128() > cap) {
            Some(i) => Err(Error::InvalidGraph(format!(
                "edge {i} weight {} exceeds n^{c_w} = {cap}",
                self.edges[i].w
            ))),
            None => Ok(()),
        }
    }

    /// Same weights reinterpreted in another weight type.
    pub fn convert<V: Weight>(&self) -> Result<Graph<V>> {
        let mut out = Vec::with_capacity(self.m());
        for (i, e) in self.edges.iter().enumerate() {
            let w = num_traits::cast::<W, V>(e.w)
                .ok_or_else(|| Error::InvalidGraph(format!("edge {i} weight {} does not fit", e.w)))?;
            out.push((e.u, e.v, w));
        }
        Graph::new(self.n, out)
    }

    /// Unit-weight copy.
    pub fn unit<V: Weight>(&self) -> Graph<V> {
        Graph::unweighted(self.n, self.edges.iter().map(|e| (e.u, e.v))).expect("same structure")
    }

    /// Spanning subgraph on the edges accepted by `keep`, renumbered in id order.
    /// Returns the subgraph and, per new edge id, the original id.
    pub fn edge_subgraph(&self, keep: impl Fn(usize) -> bool) -> (Graph<W>, Vec<usize>) {
        let ids: Vec<usize> = (0..self.m()).filter(|&e| keep(e)).collect();
        let g = Graph::new(self.n, ids.iter().map(|&e| (self.edges[e].u, self.edges[e].v, self.edges[e].w)))
            .expect("subgraph of a simple graph is simple");
        (g, ids)
    }

    pub fn crossing_edges(&self, s: &VertexSet) -> Vec<usize> {
        (0..self.m())
            .filter(|&e| s.contains(self.edges[e].u) != s.contains(self.edges[e].v))
            .collect()
    }

    /// Total weight of edges leaving `s`.
    pub fn cut_weight(&self, s: &VertexSet) -> Result<W> {
        self.check_proper(s)?;
        Ok(self
            .edges
            .iter()
            .filter(|e| s.contains(e.u) != s.contains(e.v))
            .map(|e| e.w)
            .sum())
    }

    /// Unweighted degree sum of `s`.
    pub fn volume(&self, s: &VertexSet) -> u64 {
        s.iter().map(|v| self.degree(v) as u64).sum()
    }

    /// Crossing-edge count over the smaller side volume, as an exact fraction.
    pub fn conductance(&self, s: &VertexSet) -> Result<Ratio<u64>> {
        self.check_proper(s)?;
        let crossing = self.edges.iter().filter(|e| s.contains(e.u) != s.contains(e.v)).count() as u64;
        let vs = self.volume(s);
        let denom = vs.min(2 * self.m() as u64 - vs);
        if denom == 0 {
            return Err(Error::Precondition("conductance of a zero-volume side".into()));
        }
        Ok(Ratio::new(crossing, denom))
    }

    fn check_proper(&self, s: &VertexSet) -> Result<()> {
        if s.universe() != self.n {
            return Err(Error::InvalidGraph(format!("vertex set over {} ids, graph has {}", s.universe(), self.n)));
        }
        if s.is_empty() || s.len() == self.n {
            return Err(Error::TrivialSet);
        }
        Ok(())
    }

    /// Vertex sets of the components of the subgraph on accepted edges.
    /// Vertices with no accepted edge are left out. Components are sorted by
    /// their smallest member.
    pub fn connected_components(&self, keep: impl Fn(usize) -> bool) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX || !self.adj[s].iter().any(|&(_, e)| keep(e)) {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let x = members[i];
                i += 1;
                for &(y, e) in &self.adj[x] {
                    if comp[y] == usize::MAX && keep(e) {
                        comp[y] = id;
                        members.push(y);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        let c = self.connected_components(|_| true);
        c.len() == 1 && c[0].len() == self.n
    }

    /// BFS tree from `root` over accepted edges, visiting neighbors in id order.
    pub fn bfs(&self, root: usize, keep: impl Fn(usize) -> bool) -> RootedTree {
        let mut parent = vec![None; self.n];
        let mut parent_edge = vec![None; self.n];
        let mut seen = vec![false; self.n];
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(x) = q.pop_front() {
            for &(y, e) in &self.adj[x] {
                if !seen[y] && keep(e) {
                    seen[y] = true;
                    parent[y] = Some(x);
                    parent_edge[y] = Some(e);
                    q.push_back(y);
                }
            }
        }
        RootedTree::from_parents(root, parent, parent_edge, seen).expect("bfs parents form a tree")
    }

    /// Eccentricity of `root` over accepted edges.
    pub fn eccentricity(&self, root: usize, keep: impl Fn(usize) -> bool) -> usize {
        self.bfs(root, keep).depth()
    }
}

/// Exact conductance by enumerating every proper subset. Sides of zero volume
/// are skipped.
pub fn graph_conductance_exhaustive<W: Weight>(g: &Graph<W>) -> Result<Ratio<u64>> {
    const LIMIT: usize = 20;
    if g.n() > LIMIT {
        return Err(Error::Capacity { what: "exhaustive conductance", limit: LIMIT, got: g.n() });
    }
    if g.n() < 2 || g.m() == 0 {
        return Err(Error::Precondition("conductance needs an edge and two vertices".into()));
    }
    let n = g.n();
    let total = 2 * g.m() as u64;
    let deg: Vec<u64> = (0..n).map(|v| g.degree(v) as u64).collect();
    let mut best: Option<Ratio<u64>> = None;
    // vertex n-1 stays outside, covering each unordered pair of sides once
    for mask in 1u32..(1u32 << (n - 1)) {
        let mut vol = 0;
        for (v, d) in deg.iter().enumerate().take(n - 1) {
            if mask >> v & 1 == 1 {
                vol += d;
            }
        }
        let denom = vol.min(total - vol);
        if denom == 0 {
            continue;
        }
        let crossing = g
            .edges()
            .iter()
            .filter(|e| (mask >> e.u & 1 == 1) != (e.v < n - 1 && mask >> e.v & 1 == 1))
            .count() as u64;
        let r = Ratio::new(crossing, denom);
        if best.map_or(true, |b| r < b) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::Precondition("no side with positive volume".into()))
}

/// Subset of `0..universe`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    members: Vec<bool>,
    len: usize,
}

impl VertexSet {
    pub fn empty(universe: usize) -> Self {
        VertexSet { members: vec![false; universe], len: 0 }
    }

    pub fn from_slice(universe: usize, vs: &[usize]) -> Self {
        let mut s = Self::empty(universe);
        for &v in vs {
            s.insert(v);
        }
        s
    }

    pub fn from_mask(members: Vec<bool>) -> Self {
        let len = members.iter().filter(|&&b| b).count();
        VertexSet { members, len }
    }

    pub fn insert(&mut self, v: usize) {
        if !self.members[v] {
            self.members[v] = true;
            self.len += 1;
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members[v]
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn complement(&self) -> Self {
        VertexSet::from_mask(self.members.iter().map(|b| !b).collect())
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// The side containing vertex 0.
    pub fn canonical(&self) -> Self {
        if self.members.first() == Some(&false) {
            self.complement()
        } else {
            self.clone()
        }
    }
}

/// A cut: the side holding vertex 0, its value and crossing edge ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutResult<W> {
    pub side: Vec<usize>,
    pub value: W,
    pub crossing: Vec<usize>,
}

impl<W: Weight> CutResult<W> {
    pub fn from_set(g: &Graph<W>, s: &VertexSet) -> Result<Self> {
        let value = g.cut_weight(s)?;
        let c = s.canonical();
        Ok(CutResult { side: c.to_vec(), value, crossing: g.crossing_edges(&c) })
    }

    pub fn set(&self, n: usize) -> VertexSet {
        VertexSet::from_slice(n, &self.side)
    }
}

/// Parses `n m [weighted]` followed by `u v [w]` lines. `#` starts a comment.
pub fn parse_graph(text: &str) -> Result<Graph<u64>> {
    let mut header: Option<(usize, usize, bool)> = None;
    let mut edges = Vec::new();
    let mut seen = std::collections::HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let num = |s: &str| -> Result<u64> {
            s.parse::<u64>().map_err(|_| Error::Parse { line, msg: format!("expected an unsigned integer, found '{s}'") })
        };
        let Some((n, _, weighted)) = header else {
            let weighted = match toks.as_slice() {
                [_, _] => false,
                [_, _, "weighted"] => true,
                _ => return Err(Error::Parse { line, msg: "header must be 'n m [weighted]'".into() }),
            };
            header = Some((num(toks[0])? as usize, num(toks[1])? as usize, weighted));
            continue;
        };
        let want = if weighted { 3 } else { 2 };
        if toks.len() != want {
            return Err(Error::Parse { line, msg: format!("expected {want} fields, found {}", toks.len()) });
        }
        let (a, b) = (num(toks[0])? as usize, num(toks[1])? as usize);
        let w = if weighted { num(toks[2])? } else { 1 };
        if a >= n || b >= n {
            return Err(Error::Parse { line, msg: format!("vertex out of range 0..{n}") });
        }
        if a == b {
            return Err(Error::Parse { line, msg: format!("self-loop at {a}") });
        }
        if w == 0 {
            return Err(Error::Parse { line, msg: "zero weight".into() });
        }
        if let Some(prev) = seen.insert((a.min(b), a.max(b)), line) {
            return Err(Error::Parse { line, msg: format!("duplicate edge ({a},{b}), first on line {prev}") });
        }
        edges.push((a, b, w));
    }
    let (n, m, _) = header.ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
    if edges.len() != m {
        return Err(Error::Parse { line: text.lines().count(), msg: format!("header says {m} edges, found {}", edges.len()) });
    }
    Graph::new(n, edges)
}

pub fn write_graph<W: Weight>(g: &Graph<W>) -> String {
    let weighted = g.is_weighted();
    let mut s = format!("{} {}{}\n", g.n(), g.m(), if weighted { " weighted" } else { "" });
    for e in g.edges() {
        if weighted {
            s.push_str(&format!("{} {} {}\n", e.u, e.v, e.w));
        } else {
            s.push_str(&format!("{} {}\n", e.u, e.v));
        }
    }
    s
}
