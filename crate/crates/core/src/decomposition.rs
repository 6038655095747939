//! Edge tripartition into expander-like components, a low-arboricity
//! remainder and few inter-component edges, built by recursive application
//! of a partitioning black box.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::charge::{ChargeInputs, ChargeRegistry};
use crate::error::{Error, Result};
use crate::graph::{graph_conductance_exhaustive, CutResult, Graph, VertexSet};
use crate::rng::stream;
use crate::scalar::{ceil_log2, Weight};
use crate::sim::Transcript;

/// The three magnitudes every threshold is built from: `n^gamma`, `n^rho`
/// and `log2 m`, with `n` and `m` taken from the whole input graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scale {
    pub n_gamma: f64,
    pub n_rho: f64,
    pub log_m: f64,
}

impl Scale {
    pub fn new(n: usize, m: usize, gamma: f64, rho: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0 && rho > 0.0 && rho < 1.0) {
            return Err(Error::Precondition(format!("gamma = {gamma} and rho = {rho} must lie in (0, 1)")));
        }
        let n = n.max(1) as f64;
        Ok(Scale { n_gamma: n.powf(gamma), n_rho: n.powf(rho), log_m: (m.max(2) as f64).log2() })
    }

    /// `12 n^rho log m`, the sparsity divisor.
    pub fn sparsity(&self) -> f64 {
        12.0 * self.n_rho * self.log_m
    }

    /// `48 n^rho log^2 m`, the depth from which a component counts as high diameter.
    pub fn high_diameter(&self) -> f64 {
        48.0 * self.n_rho * self.log_m * self.log_m
    }

    /// `1 / (144 n^rho log m)`
    pub fn phi(&self) -> f64 {
        1.0 / (144.0 * self.n_rho * self.log_m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecompositionConfig {
    /// Lazy walk length cap for the sweep-cut finder.
    pub walk_steps: usize,
    /// Walk start vertices; 0 means `ceil(log2 n) + 1`.
    pub walk_seeds: usize,
    /// Constant `c` of the `c / n^rho` conductance target, reported only.
    pub phi_constant: f64,
}

impl Default for DecompositionConfig {
    fn default() -> Self {
        DecompositionConfig { walk_steps: 256, walk_seeds: 0, phi_constant: 1000.0 }
    }
}

/// First index `j` (1-based) in `[ceil(D/4), floor(3D/4)]` with
/// `a_j * sparsity <= min(a_1 + .. + a_{j-1}, a_{j+1} + .. + a_D)`, scanning
/// outward from the lighter half.
pub fn find_sparse_index(a: &[u64], sparsity: f64) -> Result<usize> {
    let d = a.len();
    if d == 0 {
        return Err(Error::Precondition("empty level sequence".into()));
    }
    let mut prefix = vec![0u64; d + 1];
    for i in 0..d {
        prefix[i + 1] = prefix[i] + a[i];
    }
    let total = prefix[d];
    let ok = |j: usize| {
        let lo = prefix[j - 1];
        let hi = total - prefix[j];
        a[j - 1] as f64 * sparsity <= lo.min(hi) as f64
    };
    let first = d.div_ceil(4).max(1);
    let last = 3 * d / 4;
    if first > last {
        return Err(Error::Precondition(format!("no index range for a sequence of length {d}")));
    }
    let half = prefix[d / 2];
    let found = if half <= total - half {
        (first..=last).find(|&j| ok(j))
    } else {
        (first..=last).rev().find(|&j| ok(j))
    };
    found.ok_or_else(|| Error::Precondition(format!("no sparse level among {first}..={last}")))
}

/// Cut at a sparse BFS level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelCut<W> {
    pub cut: CutResult<W>,
    /// The side holding the root is every level below this one.
    pub level: usize,
    pub depth: usize,
}

/// Sparse level cut of a connected graph from `root`. Level sizes `a_i` count
/// edges between BFS levels `i - 1` and `i`, and the side is levels `0..j`.
pub fn high_diameter_cut<W: Weight>(g: &Graph<W>, root: usize, scale: &Scale) -> Result<LevelCut<W>> {
    let t = g.bfs(root, |_| true);
    if t.size() != g.n() {
        return Err(Error::Precondition("high diameter cut needs a connected graph".into()));
    }
    let depth = t.depth();
    if (depth as f64) < scale.high_diameter() {
        return Err(Error::Precondition(format!(
            "depth {depth} below the high diameter threshold {:.1}",
            scale.high_diameter()
        )));
    }
    let low = |v: usize| g.degree(v) as f64 <= scale.n_gamma / 2.0;
    if let Some(e) = g.edges().iter().find(|e| low(e.u) && low(e.v)) {
        return Err(Error::Precondition(format!("edge {{{}, {}}} joins two low degree vertices", e.u, e.v)));
    }
    let mut a = vec![0u64; depth];
    for e in g.edges() {
        let (lu, lv) = (t.level(e.u), t.level(e.v));
        if lu != lv {
            a[lu.max(lv) - 1] += 1;
        }
    }
    let j = find_sparse_index(&a, scale.sparsity())?;
    let side: Vec<usize> = (0..g.n()).filter(|&v| t.level(v) < j).collect();
    let cut = CutResult::from_set(g, &VertexSet::from_slice(g.n(), &side))?;
    Ok(LevelCut { cut, level: j, depth })
}

/// Outcome of batch peeling.
#[derive(Clone, Debug, PartialEq)]
pub struct Peel {
    /// Per edge, whether it survived.
    pub kept: Vec<bool>,
    /// Per vertex, the removed edges oriented away from it.
    pub out: Vec<Vec<usize>>,
    pub iterations: usize,
}

/// Repeatedly removes every vertex with at most `n^gamma` remaining edges,
/// stopping after a batch of at most `n^gamma / 2` vertices.
pub fn low_degree_peel<W: Weight>(g: &Graph<W>, n_gamma: f64) -> Peel {
    let n = g.n();
    let mut kept = vec![true; g.m()];
    let mut rdeg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut out = vec![Vec::new(); n];
    let mut in_z = vec![false; n];
    let mut iterations = 0;
    loop {
        let z: Vec<usize> = (0..n).filter(|&v| rdeg[v] > 0 && rdeg[v] as f64 <= n_gamma).collect();
        if z.is_empty() {
            break;
        }
        iterations += 1;
        for &v in &z {
            in_z[v] = true;
        }
        for &v in &z {
            for &(y, e) in g.adj(v) {
                if !kept[e] {
                    continue;
                }
                let tail = if in_z[y] { v.min(y) } else { v };
                if tail == v {
                    kept[e] = false;
                    out[v].push(e);
                    rdeg[v] -= 1;
                    rdeg[y] -= 1;
                }
            }
        }
        for &v in &z {
            in_z[v] = false;
        }
        if z.len() as f64 <= n_gamma / 2.0 {
            break;
        }
    }
    Peel { kept, out, iterations }
}

/// Sweep cut over lazy random walk distributions. Returns a cut of
/// conductance at most `12 phi` when a sweep finds one.
pub fn low_conductance_cut<W: Weight>(
    g: &Graph<W>,
    phi: f64,
    cfg: &DecompositionConfig,
    seed: u64,
) -> Result<Option<CutResult<W>>> {
    if !(phi > 0.0 && phi <= 1.0 / 12.0) {
        return Err(Error::Precondition(format!("phi = {phi} must lie in (0, 1/12]")));
    }
    let n = g.n();
    let active: Vec<usize> = (0..n).filter(|&v| g.degree(v) > 0).collect();
    if active.len() < 2 {
        return Ok(None);
    }
    let deg: Vec<f64> = (0..n).map(|v| g.degree(v) as f64).collect();
    let vol = 2.0 * g.m() as f64;
    let seeds = if cfg.walk_seeds == 0 { ceil_log2(n as u64) as usize + 1 } else { cfg.walk_seeds };
    let mut rng = stream(seed, 0x5eed, 0);
    let mut p = vec![0.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..seeds {
        let start = active[rng.gen_range(0..active.len())];
        p.iter_mut().for_each(|x| *x = 0.0);
        p[start] = 1.0;
        let mut check = 1;
        for t in 1..=cfg.walk_steps.max(1) {
            for v in 0..n {
                next[v] = p[v] / 2.0;
            }
            for v in &active {
                let share = p[*v] / (2.0 * deg[*v]);
                for &(y, _) in g.adj(*v) {
                    next[y] += share;
                }
            }
            std::mem::swap(&mut p, &mut next);
            if t == check || t == cfg.walk_steps {
                check *= 2;
                if let Some(side) = sweep(g, &p, &active, 12.0 * phi) {
                    return Ok(Some(CutResult::from_set(g, &side)?));
                }
                let gap: f64 = active.iter().map(|&v| (p[v] - deg[v] / vol).abs()).sum();
                if gap < 1e-9 {
                    break;
                }
            }
        }
    }
    Ok(None)
}

/// Best prefix of the `p / deg` order, if its conductance is within `limit`.
fn sweep<W: Weight>(g: &Graph<W>, p: &[f64], active: &[usize], limit: f64) -> Option<VertexSet> {
    let mut order = active.to_vec();
    order.sort_by(|&x, &y| {
        let (a, b) = (p[x] / g.degree(x) as f64, p[y] / g.degree(y) as f64);
        b.partial_cmp(&a).unwrap_or(std::cmp::Ordering::Equal).then(x.cmp(&y))
    });
    let total = 2 * g.m() as u64;
    let mut inside = vec![false; g.n()];
    let (mut cut, mut vol) = (0i64, 0u64);
    let mut best: Option<(u64, u64, usize)> = None;
    for (i, &v) in order.iter().enumerate().take(order.len() - 1) {
        let d = g.degree(v);
        let back = g.adj(v).iter().filter(|&&(y, _)| inside[y]).count();
        inside[v] = true;
        cut += d as i64 - 2 * back as i64;
        vol += d as u64;
        let denom = vol.min(total - vol);
        if denom == 0 {
            continue;
        }
        let c = cut as u64;
        if best.map_or(true, |(bc, bd, _)| (c as u128) * (bd as u128) < (bc as u128) * (denom as u128)) {
            best = Some((c, denom, i));
        }
    }
    let (c, d, i) = best?;
    if c as f64 > limit * d as f64 {
        return None;
    }
    Some(VertexSet::from_slice(g.n(), &order[..=i]))
}

/// A graph on a subset of edges, renumbered so that vertex order is kept.
struct Piece {
    g: Graph<u32>,
    vmap: Vec<usize>,
    emap: Vec<usize>,
}

impl Piece {
    fn new<W: Weight>(g: &Graph<W>, edges: &[usize]) -> Piece {
        let mut emap = edges.to_vec();
        emap.sort_unstable();
        let mut vmap: Vec<usize> = emap.iter().flat_map(|&e| [g.edge(e).u, g.edge(e).v]).collect();
        vmap.sort_unstable();
        vmap.dedup();
        let local = |v: usize| vmap.binary_search(&v).expect("endpoint present");
        let g2 = Graph::new(vmap.len(), emap.iter().map(|&e| (local(g.edge(e).u), local(g.edge(e).v), 1u32)))
            .expect("piece of a simple graph");
        Piece { g: g2, vmap, emap }
    }

    fn depth(&self) -> usize {
        self.g.eccentricity(0, |_| true)
    }

    /// Global edge ids of each connected component of the kept edges.
    fn components(&self, keep: impl Fn(usize) -> bool + Copy) -> Vec<Vec<usize>> {
        let comps = self.g.connected_components(keep);
        let mut which = vec![usize::MAX; self.g.n()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                which[v] = i;
            }
        }
        let mut out = vec![Vec::new(); comps.len()];
        for (e, edge) in self.g.edges().iter().enumerate() {
            if keep(e) {
                out[which[edge.u]].push(self.emap[e]);
            }
        }
        out
    }
}

/// Termination condition of a black box part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// No sparse cut found at small diameter; final.
    #[serde(rename = "C3-1")]
    Expander,
    /// Shrunk by a cut; recursed on.
    #[serde(rename = "C3-2")]
    Shrunk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Part {
    pub id: usize,
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
    pub termination: Termination,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CaseCounts {
    pub high_diameter: usize,
    pub high_diameter_after_peel: usize,
    pub sparse_cut: usize,
    pub expander: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlackBoxOutput {
    pub parts: Vec<Part>,
    /// `(v, e)`: edge `e` joins `E_{s,v}`, oriented away from `v`.
    pub e_s: Vec<(usize, usize)>,
    pub e_r: Vec<usize>,
    /// Input vertices left without any part edge.
    pub untouched: Vec<usize>,
    pub rounds: f64,
    pub cases: CaseCounts,
}

/// One application of the partitioning black box to the edges `edges` of `g`.
pub fn blackbox_partition<W: Weight>(
    g: &Graph<W>,
    edges: &[usize],
    scale: &Scale,
    cfg: &DecompositionConfig,
    registry: &ChargeRegistry,
    seed: u64,
) -> Result<BlackBoxOutput> {
    let p = Piece::new(g, edges);
    let mut out = BlackBoxOutput {
        parts: Vec::new(),
        e_s: Vec::new(),
        e_r: Vec::new(),
        untouched: Vec::new(),
        rounds: 0.0,
        cases: CaseCounts::default(),
    };
    if p.g.m() == 0 {
        return Ok(out);
    }
    let low: Vec<bool> = (0..p.g.n()).map(|v| p.g.degree(v) as f64 <= scale.n_gamma).collect();
    let mut active = vec![true; p.g.m()];
    for (e, edge) in p.g.edges().iter().enumerate() {
        if low[edge.u] && low[edge.v] {
            active[e] = false;
            out.e_s.push((p.vmap[edge.u], p.emap[e]));
        }
    }
    let diameter = |d: usize| -> Result<f64> {
        Ok(registry.charge("diameter", ChargeInputs { d: d as f64, ..Default::default() })?.rounds)
    };
    let split = |piece: &Piece, side: &VertexSet, out: &mut BlackBoxOutput| {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (e, edge) in piece.g.edges().iter().enumerate() {
            match (side.contains(edge.u), side.contains(edge.v)) {
                (true, true) => a.push(piece.emap[e]),
                (false, false) => b.push(piece.emap[e]),
                _ => out.e_r.push(piece.emap[e]),
            }
        }
        for es in [a, b] {
            if !es.is_empty() {
                push_part(g, &mut out.parts, es, Termination::Shrunk);
            }
        }
    };
    let mut call_rounds: f64 = 0.0;
    for (ci, comp) in p.components(|e| active[e]).into_iter().enumerate() {
        let c = Piece::new(g, &comp);
        let d = c.depth();
        let mut r = 1.0 + diameter(d)?;
        if d as f64 >= scale.high_diameter() {
            let lc = high_diameter_cut(&c.g, 0, scale)?;
            split(&c, &lc.cut.set(c.g.n()), &mut out);
            out.cases.high_diameter += 1;
            r += 3.0 * d as f64;
            call_rounds = call_rounds.max(r);
            continue;
        }
        let peel = low_degree_peel(&c.g, scale.n_gamma);
        for (v, es) in peel.out.iter().enumerate() {
            out.e_s.extend(es.iter().map(|&e| (c.vmap[v], c.emap[e])));
        }
        r += (d + peel.iterations) as f64;
        let mut sub_rounds: f64 = 0.0;
        for (si, sub) in c.components(|e| peel.kept[e]).into_iter().enumerate() {
            let s = Piece::new(g, &sub);
            let ds = s.depth();
            let mut rs = diameter(ds)?;
            if ds as f64 >= scale.high_diameter() {
                let lc = high_diameter_cut(&s.g, 0, scale)?;
                split(&s, &lc.cut.set(s.g.n()), &mut out);
                out.cases.high_diameter_after_peel += 1;
                rs += 3.0 * ds as f64;
            } else {
                let phi = scale.phi();
                rs += registry
                    .charge(
                        "low_conductance",
                        ChargeInputs { d: ds as f64, m: 2f64.powf(scale.log_m), phi, ..Default::default() },
                    )?
                    .rounds;
                let sub_seed = stream(seed, ci as u64, si as u64).gen::<u64>();
                match low_conductance_cut(&s.g, phi, cfg, sub_seed)? {
                    Some(cut) => {
                        split(&s, &cut.set(s.g.n()), &mut out);
                        out.cases.sparse_cut += 1;
                    }
                    None => {
                        push_part(g, &mut out.parts, sub, Termination::Expander);
                        out.cases.expander += 1;
                    }
                }
            }
            sub_rounds = sub_rounds.max(rs);
        }
        call_rounds = call_rounds.max(r + sub_rounds);
    }
    out.rounds = call_rounds;
    let mut owner = vec![usize::MAX; g.n()];
    for part in &out.parts {
        for &v in &part.vertices {
            if owner[v] != usize::MAX {
                return Err(Error::Invariant(format!("C1: vertex {v} lies in parts {} and {}", owner[v], part.id)));
            }
            owner[v] = part.id;
        }
    }
    out.untouched = p.vmap.iter().copied().filter(|&v| owner[v] == usize::MAX).collect();
    check_c2(g, &out, scale)?;
    check_c5(&out, p.g.m(), scale)?;
    Ok(out)
}

fn push_part<W: Weight>(g: &Graph<W>, parts: &mut Vec<Part>, mut edges: Vec<usize>, termination: Termination) {
    edges.sort_unstable();
    let mut vertices: Vec<usize> = edges.iter().flat_map(|&e| [g.edge(e).u, g.edge(e).v]).collect();
    vertices.sort_unstable();
    vertices.dedup();
    parts.push(Part { id: parts.len(), edges, vertices, termination });
}

fn check_c2<W: Weight>(g: &Graph<W>, out: &BlackBoxOutput, scale: &Scale) -> Result<()> {
    let mut s_count: BTreeMap<usize, usize> = BTreeMap::new();
    for &(v, _) in &out.e_s {
        *s_count.entry(v).or_default() += 1;
    }
    let mut h_deg = vec![0usize; g.n()];
    for part in &out.parts {
        for &e in &part.edges {
            h_deg[g.edge(e).u] += 1;
            h_deg[g.edge(e).v] += 1;
        }
    }
    for (v, c) in s_count {
        if (c + h_deg[v]) as f64 > scale.n_gamma {
            return Err(Error::Invariant(format!(
                "C2: vertex {v} has {c} oriented edges and {} part edges, above {:.2}",
                h_deg[v], scale.n_gamma
            )));
        }
    }
    Ok(())
}

fn xlogx(x: usize) -> f64 {
    if x == 0 {
        0.0
    } else {
        x as f64 * (x as f64).log2()
    }
}

fn check_c5(out: &BlackBoxOutput, m_in: usize, scale: &Scale) -> Result<()> {
    let budget = (xlogx(m_in) - out.parts.iter().map(|p| xlogx(p.edges.len())).sum::<f64>())
        / (6.0 * scale.n_rho * scale.log_m);
    if out.e_r.len() as f64 > budget * (1.0 + 1e-9) + 1e-9 {
        return Err(Error::Invariant(format!("C5: {} removed edges exceed the budget {budget:.3}", out.e_r.len())));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tripartition {
    pub e_h: Vec<usize>,
    /// Per vertex, the edges of `E_{s,v}`, oriented away from `v`.
    pub e_s: Vec<Vec<usize>>,
    pub e_r: Vec<usize>,
    /// Vertex sets of the components of `G[E_h]`, ordered by smallest member.
    pub components: Vec<Vec<usize>>,
    pub scale: Scale,
    pub levels: usize,
    pub calls: usize,
    pub cases: CaseCounts,
    pub transcript: Transcript,
}

impl Tripartition {
    /// Component index per vertex, `None` outside `G[E_h]`.
    pub fn component_of(&self, n: usize) -> Vec<Option<usize>> {
        let mut c = vec![None; n];
        for (i, comp) in self.components.iter().enumerate() {
            for &v in comp {
                c[v] = Some(i);
            }
        }
        c
    }
}

pub fn tripartition<W: Weight>(
    g: &Graph<W>,
    gamma: f64,
    rho: f64,
    cfg: &DecompositionConfig,
    registry: &ChargeRegistry,
    seed: u64,
) -> Result<Tripartition> {
    let scale = Scale::new(g.n(), g.m(), gamma, rho)?;
    tripartition_with_scale(g, scale, cfg, registry, seed)
}

/// Recursion driver. Parts ending without a cut become `E_h` components,
/// every other part is partitioned again one level deeper.
pub fn tripartition_with_scale<W: Weight>(
    g: &Graph<W>,
    scale: Scale,
    cfg: &DecompositionConfig,
    registry: &ChargeRegistry,
    seed: u64,
) -> Result<Tripartition> {
    let guard = (3.0 * g.n() as f64 / scale.n_gamma).ceil() as usize + 2;
    let mut t = Tripartition {
        e_h: Vec::new(),
        e_s: vec![Vec::new(); g.n()],
        e_r: Vec::new(),
        components: Vec::new(),
        scale,
        levels: 0,
        calls: 0,
        cases: CaseCounts::default(),
        transcript: Transcript::default(),
    };
    let mut queue: Vec<Vec<usize>> = if g.m() > 0 { vec![(0..g.m()).collect()] } else { Vec::new() };
    while !queue.is_empty() {
        if t.levels > guard {
            return Err(Error::Invariant(format!("recursion exceeded {guard} levels")));
        }
        let mut next = Vec::new();
        let mut level_rounds: f64 = 0.0;
        for part in &queue {
            let out = blackbox_partition(g, part, &scale, cfg, registry, stream(seed, t.calls as u64, 1).gen())?;
            t.calls += 1;
            level_rounds = level_rounds.max(out.rounds);
            for (v, e) in out.e_s {
                t.e_s[v].push(e);
            }
            t.e_r.extend(out.e_r);
            t.cases.high_diameter += out.cases.high_diameter;
            t.cases.high_diameter_after_peel += out.cases.high_diameter_after_peel;
            t.cases.sparse_cut += out.cases.sparse_cut;
            t.cases.expander += out.cases.expander;
            for p in out.parts {
                match p.termination {
                    Termination::Expander => {
                        t.e_h.extend(p.edges);
                        t.components.push(p.vertices);
                    }
                    Termination::Shrunk => next.push(p.edges),
                }
            }
        }
        let charge = registry.charge_as(
            "measured",
            &format!("tripartition/level{}", t.levels),
            ChargeInputs { rounds: level_rounds, ..Default::default() },
        )?;
        t.transcript.add_charge(charge);
        t.levels += 1;
        queue = next;
    }
    t.e_h.sort_unstable();
    t.e_r.sort_unstable();
    t.components.sort();
    Ok(t)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub partition_exact: bool,
    pub e_r_between_components: bool,
    pub e_s_max: usize,
    pub e_s_bound: f64,
    pub e_r_size: usize,
    pub e_r_bound: f64,
    /// `m^(1 - rho/2)` form of the bound; reported, not checked.
    pub e_r_alt_bound: f64,
    pub acyclic: bool,
    pub min_component_degree: Option<usize>,
    pub degree_floor: f64,
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_invariants<W: Weight>(g: &Graph<W>, t: &Tripartition, rho: f64) -> InvariantReport {
    let m = g.m();
    let mut v = Vec::new();
    let mut seen = vec![0u8; m];
    for &e in t.e_h.iter().chain(&t.e_r).chain(t.e_s.iter().flatten()) {
        if e < m {
            seen[e] += 1;
        }
    }
    let partition_exact = seen.iter().all(|&c| c == 1)
        && t.e_h.len() + t.e_r.len() + t.e_s.iter().map(Vec::len).sum::<usize>() == m;
    if !partition_exact {
        v.push("edge classes do not partition E".to_string());
    }
    for (x, es) in t.e_s.iter().enumerate() {
        if let Some(&e) = es.iter().find(|&&e| e >= m || (g.edge(e).u != x && g.edge(e).v != x)) {
            v.push(format!("E_s of {x} holds non-incident edge {e}"));
        }
    }
    let comp = t.component_of(g.n());
    let e_r_between_components = t.e_r.iter().all(|&e| {
        let (a, b) = (comp[g.edge(e).u], comp[g.edge(e).v]);
        a.is_none() || b.is_none() || a != b
    });
    if !e_r_between_components {
        v.push("an E_r edge lies inside one E_h component".into());
    }
    let e_s_max = t.e_s.iter().map(Vec::len).max().unwrap_or(0);
    if e_s_max as f64 > t.scale.n_gamma {
        v.push(format!("|E_s,v| = {e_s_max} exceeds n^gamma = {:.2}", t.scale.n_gamma));
    }
    let e_r_bound = m as f64 / (6.0 * t.scale.n_rho);
    if t.e_r.len() as f64 > e_r_bound {
        v.push(format!("|E_r| = {} exceeds {e_r_bound:.2}", t.e_r.len()));
    }
    let acyclic = orientation_acyclic(g, &t.e_s);
    if !acyclic {
        v.push("E_s orientation has a cycle".into());
    }
    let mut hdeg = vec![0usize; g.n()];
    for &e in &t.e_h {
        hdeg[g.edge(e).u] += 1;
        hdeg[g.edge(e).v] += 1;
    }
    let min_component_degree = t.components.iter().flatten().map(|&x| hdeg[x]).min();
    let degree_floor = t.scale.n_gamma / 2.0;
    if min_component_degree.is_some_and(|d| d as f64 <= degree_floor) {
        v.push(format!("an E_h component vertex has degree <= {degree_floor:.2}"));
    }
    InvariantReport {
        partition_exact,
        e_r_between_components,
        e_s_max,
        e_s_bound: t.scale.n_gamma,
        e_r_size: t.e_r.len(),
        e_r_bound,
        e_r_alt_bound: (m as f64).powf(1.0 - rho / 2.0),
        acyclic,
        min_component_degree,
        degree_floor,
        violations: v,
    }
}

/// Kahn's algorithm over the `E_s` orientation.
fn orientation_acyclic<W: Weight>(g: &Graph<W>, e_s: &[Vec<usize>]) -> bool {
    let n = g.n();
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for (x, es) in e_s.iter().enumerate() {
        for &e in es {
            if e >= g.m() {
                continue;
            }
            let y = g.edge(e).other(x);
            out[x].push(y);
            indeg[y] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).filter(|&x| indeg[x] == 0).collect();
    let mut done = 0;
    while let Some(x) = stack.pop() {
        done += 1;
        for &y in &out[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                stack.push(y);
            }
        }
    }
    done == n
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpotCheck {
    pub checked: usize,
    pub passed: usize,
}

/// Exhaustive conductance of every `E_h` component on at most 18 vertices,
/// against `phi^3 / (19208 ln^2(|E| e^4))`.
pub fn conductance_spot_check<W: Weight>(g: &Graph<W>, t: &Tripartition) -> Result<SpotCheck> {
    let comp = t.component_of(g.n());
    let mut by_comp: Vec<Vec<usize>> = vec![Vec::new(); t.components.len()];
    for &e in &t.e_h {
        if let Some(c) = comp[g.edge(e).u] {
            by_comp[c].push(e);
        }
    }
    let phi = t.scale.phi();
    let mut s = SpotCheck::default();
    for (c, edges) in by_comp.iter().enumerate() {
        if t.components[c].len() > 18 || edges.is_empty() {
            continue;
        }
        let p = Piece::new(g, edges);
        let floor = phi.powi(3) / (19208.0 * ((edges.len() as f64).ln() + 4.0).powi(2));
        let got = graph_conductance_exhaustive(&p.g)?;
        s.checked += 1;
        if *got.numer() as f64 > floor * *got.denom() as f64 {
            s.passed += 1;
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{barbell, clique, path};

    fn unit_scale(n_gamma: f64) -> Scale {
        Scale { n_gamma, n_rho: 1.0, log_m: 1.0 }
    }

    #[test]
    fn sparse_index_on_ones() {
        let a = vec![1u64; 400];
        let j = find_sparse_index(&a, 10.0).unwrap();
        assert!((100..=300).contains(&j));
        assert!(10 <= (j - 1).min(400 - j));
    }

    #[test]
    fn sparse_index_short_sequence_fails() {
        assert!(find_sparse_index(&[1, 1, 1], 12.0).is_err());
    }

    #[test]
    fn star_peels_leaves_then_stops() {
        let g = crate::oracle::star(11);
        let p = low_degree_peel(&g, 3.0);
        assert!(p.kept.iter().all(|k| !k));
        assert!(p.out[0].is_empty());
        assert!((1..11).all(|v| p.out[v].len() == 1));
        assert_eq!(p.iterations, 1);
    }

    #[test]
    fn clique_is_not_peeled() {
        let p = low_degree_peel(&clique(8), 4.0);
        assert!(p.kept.iter().all(|&k| k));
        assert_eq!(p.iterations, 0);
    }

    #[test]
    fn path_goes_to_e_s_at_first_removal() {
        let g = path(200);
        let out = blackbox_partition(&g, &(0..g.m()).collect::<Vec<_>>(), &unit_scale(5.0), &Default::default(), &ChargeRegistry::default(), 1)
            .unwrap();
        assert!(out.parts.is_empty() && out.e_r.is_empty());
        assert_eq!(out.e_s.len(), 199);
        assert!(out.e_s.iter().all(|&(v, e)| g.edge(e).u == v));
    }

    #[test]
    fn barbell_splits_on_bridge() {
        let g = barbell(12, 1).unwrap();
        let scale = Scale::new(24, g.m(), 0.5, 0.1).unwrap();
        let all: Vec<usize> = (0..g.m()).collect();
        let out = blackbox_partition(&g, &all, &scale, &Default::default(), &ChargeRegistry::default(), 3).unwrap();
        let bridge = g.edge_between(0, 12).unwrap();
        assert_eq!(out.e_r, vec![bridge]);
        assert_eq!(out.parts.len(), 2);
    }

    #[test]
    fn phi_range_checked() {
        assert!(low_conductance_cut(&clique(4), 0.1, &Default::default(), 0).is_err());
    }
}
