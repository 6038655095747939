//! Synchronous CONGEST engine with per-edge bandwidth auditing.
//!
//! Round 0 is `init`; a message sent in round `r` is read in round `r + 1`.
//! A node's halt round is the round in which it first reports `halted`;
//! messages emitted in that call are still delivered.

use serde::{Deserialize, Serialize};

use crate::charge::Charge;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::{stream, Rng};
use crate::scalar::{ceil_log2, Weight};
use crate::tree::RootedTree;

pub type Word = u64;

/// `(neighbor, words)`.
pub type Outbox = Vec<(usize, Vec<Word>)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Incoming {
    pub from: usize,
    pub edge: usize,
    pub words: Vec<Word>,
}

pub struct NodeCtx<'a> {
    pub id: usize,
    pub n: usize,
    /// `(neighbor, edge id)` sorted by neighbor.
    pub neighbors: &'a [(usize, usize)],
    seed: u64,
}

impl NodeCtx<'_> {
    pub fn rng(&self, round: u64) -> Rng {
        stream(self.seed, self.id as u64, round)
    }
}

pub trait NodeProgram {
    fn init(&mut self, ctx: &NodeCtx) -> Outbox;
    fn on_round(&mut self, ctx: &NodeCtx, round: u64, inbox: &[Incoming]) -> Outbox;
    fn halted(&self) -> bool;
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    /// Words per edge per direction per round.
    pub bandwidth: usize,
    /// A word holds values below `n^word_exponent`.
    pub word_exponent: u32,
    pub max_rounds: u64,
    /// Log violations instead of failing.
    pub audit: bool,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { bandwidth: 1, word_exponent: 8, max_rounds: 1_000_000, audit: false, seed: 0 }
    }
}

impl SimConfig {
    pub fn word_bits(&self, n: usize) -> u32 {
        (self.word_exponent * ceil_log2(n.max(2) as u64)).min(64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: String,
    pub node: usize,
    pub edge: Option<usize>,
    pub round: u64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub label: String,
    /// `simulated` or `charged`.
    pub mode: String,
    pub rounds: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    /// Simulated plus charged rounds. Charged formulas can exceed any
    /// integer width, hence a float.
    pub rounds: f64,
    /// Rounds actually executed by the engine.
    pub simulated_rounds: u64,
    pub charged_rounds: f64,
    pub messages_per_round: Vec<u64>,
    /// Halt round per node of the most recent simulated run.
    pub halts: Vec<u64>,
    pub charges: Vec<Charge>,
    pub violations: Vec<Violation>,
    pub stages: Vec<Stage>,
}

impl Transcript {
    /// Appends a simulated run as a sequential stage.
    pub fn absorb(&mut self, label: &str, other: Transcript) {
        self.rounds += other.rounds;
        self.simulated_rounds += other.simulated_rounds;
        self.charged_rounds += other.charged_rounds;
        self.messages_per_round.extend(other.messages_per_round);
        self.halts = other.halts;
        self.charges.extend(other.charges);
        self.violations.extend(other.violations);
        let mode = if other.charged_rounds > 0.0 { "mixed" } else { "simulated" };
        self.stages.push(Stage { label: label.into(), mode: mode.into(), rounds: other.rounds });
    }

    /// Records a charged oracle call as a sequential stage.
    pub fn add_charge(&mut self, charge: Charge) {
        self.rounds += charge.rounds;
        self.charged_rounds += charge.rounds;
        self.stages.push(Stage { label: charge.label.clone(), mode: "charged".into(), rounds: charge.rounds });
        self.charges.push(charge);
    }

    pub fn total_messages(&self) -> u64 {
        self.messages_per_round.iter().sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("transcript serializes")
    }
}

/// Runs `programs` (one per vertex) on `g` until every node halts.
pub fn run<W: Weight, P: NodeProgram>(g: &Graph<W>, mut programs: Vec<P>, cfg: &SimConfig) -> Result<(Vec<P>, Transcript)> {
    let n = g.n();
    assert_eq!(programs.len(), n, "one program per vertex");
    let bits = cfg.word_bits(n);
    let mut tr = Transcript { halts: vec![0; n], ..Default::default() };
    let mut halted = vec![false; n];
    let mut pending: Vec<Vec<Incoming>> = vec![Vec::new(); n];
    for v in 0..n {
        let ctx = NodeCtx { id: v, n, neighbors: g.adj(v), seed: cfg.seed };
        let out = programs[v].init(&ctx);
        post(g, v, 0, out, &mut pending, cfg, bits, &mut tr)?;
        if programs[v].halted() {
            halted[v] = true;
        }
    }
    let mut round = 0u64;
    while halted.iter().any(|&h| !h) {
        round += 1;
        if round > cfg.max_rounds {
            return Err(Error::Timeout(cfg.max_rounds));
        }
        let mut inboxes = std::mem::replace(&mut pending, vec![Vec::new(); n]);
        let mut delivered = 0u64;
        for v in 0..n {
            if halted[v] {
                continue;
            }
            let inbox = &mut inboxes[v];
            inbox.sort_by_key(|m| (m.from, m.edge));
            delivered += inbox.len() as u64;
            let ctx = NodeCtx { id: v, n, neighbors: g.adj(v), seed: cfg.seed };
            let out = programs[v].on_round(&ctx, round, inbox);
            post(g, v, round, out, &mut pending, cfg, bits, &mut tr)?;
            if programs[v].halted() {
                halted[v] = true;
                tr.halts[v] = round;
            }
        }
        tr.messages_per_round.push(delivered);
    }
    tr.rounds = round as f64;
    tr.simulated_rounds = round;
    tr.stages.push(Stage { label: "run".into(), mode: "simulated".into(), rounds: round as f64 });
    Ok((programs, tr))
}

#[allow(clippy::too_many_arguments)]
fn post<W: Weight>(
    g: &Graph<W>,
    v: usize,
    round: u64,
    out: Outbox,
    pending: &mut [Vec<Incoming>],
    cfg: &SimConfig,
    bits: u32,
    tr: &mut Transcript,
) -> Result<()> {
    let mut used: Vec<(usize, usize)> = Vec::new();
    for (to, words) in out {
        let Some(edge) = g.edge_between(v, to) else {
            return Err(Error::Locality { node: v, target: to, round });
        };
        let prior = used.iter().find(|u| u.0 == edge).map_or(0, |u| u.1);
        let total = prior + words.len();
        if total > cfg.bandwidth {
            let err = Error::Bandwidth { node: v, edge, round, words: total, limit: cfg.bandwidth };
            if !cfg.audit {
                return Err(err);
            }
            tr.violations.push(Violation { kind: "bandwidth".into(), node: v, edge: Some(edge), round, detail: err.to_string() });
        }
        if let Some(&value) = words.iter().find(|&&w| bits < 64 && w >> bits != 0) {
            let err = Error::WordWidth { node: v, round, value, bits };
            if !cfg.audit {
                return Err(err);
            }
            tr.violations.push(Violation { kind: "word_width".into(), node: v, edge: Some(edge), round, detail: err.to_string() });
        }
        match used.iter_mut().find(|u| u.0 == edge) {
            Some(u) => u.1 = total,
            None => used.push((edge, total)),
        }
        pending[to].push(Incoming { from: v, edge, words });
    }
    Ok(())
}

/// Floods from `root`; each node's parent is its smallest-id neighbor one level up.
pub fn bfs_protocol<W: Weight>(g: &Graph<W>, root: usize, cfg: &SimConfig) -> Result<(RootedTree, Transcript)> {
    struct Node {
        is_root: bool,
        joined: Option<u64>,
        parent: Option<(usize, usize)>,
        done: bool,
    }
    impl NodeProgram for Node {
        fn init(&mut self, ctx: &NodeCtx) -> Outbox {
            if self.is_root {
                self.joined = Some(0);
                self.done = true;
                return ctx.neighbors.iter().map(|&(y, _)| (y, vec![0])).collect();
            }
            if ctx.neighbors.is_empty() {
                self.done = true;
            }
            Vec::new()
        }
        fn on_round(&mut self, ctx: &NodeCtx, round: u64, inbox: &[Incoming]) -> Outbox {
            match inbox.first() {
                Some(m) => {
                    self.joined = Some(round);
                    self.done = true;
                    self.parent = Some((m.from, m.edge));
                    let me = ctx.id as u64 + 1;
                    ctx.neighbors.iter().filter(|&&(y, _)| y != m.from).map(|&(y, _)| (y, vec![me])).collect()
                }
                None => Vec::new(),
            }
        }
        fn halted(&self) -> bool {
            self.done
        }
    }
    let comp = g.bfs(root, |_| true);
    let progs = (0..g.n())
        .map(|v| Node { is_root: v == root, joined: None, parent: None, done: !comp.contains(v) })
        .collect();
    let (nodes, tr) = run(g, progs, cfg)?;
    let member: Vec<bool> = nodes.iter().map(|x| x.joined.is_some()).collect();
    let parent = nodes.iter().map(|x| x.parent.map(|p| p.0)).collect();
    let parent_edge = nodes.iter().map(|x| x.parent.map(|p| p.1)).collect();
    Ok((RootedTree::from_parents(root, parent, parent_edge, member)?, tr))
}

/// Every node sends one word down the tree; afterwards each node holds the
/// words of its proper ancestors, nearest first.
pub fn downcast<W: Weight>(g: &Graph<W>, tree: &RootedTree, msgs: &[Word], cfg: &SimConfig) -> Result<(Vec<Vec<Word>>, Transcript)> {
    struct Node {
        level: usize,
        children: Vec<usize>,
        own: Word,
        got: Vec<Word>,
        done: bool,
    }
    impl NodeProgram for Node {
        fn init(&mut self, _: &NodeCtx) -> Outbox {
            if self.level == 0 {
                self.done = true;
            }
            self.children.iter().map(|&c| (c, vec![self.own])).collect()
        }
        fn on_round(&mut self, _: &NodeCtx, _: u64, inbox: &[Incoming]) -> Outbox {
            let mut out = Vec::new();
            for m in inbox {
                self.got.push(m.words[0]);
                out.extend(self.children.iter().map(|&c| (c, m.words.clone())));
            }
            if self.got.len() >= self.level {
                self.done = true;
            }
            out
        }
        fn halted(&self) -> bool {
            self.done
        }
    }
    let progs = (0..g.n())
        .map(|v| {
            let inside = tree.contains(v);
            Node {
                level: if inside { tree.level(v) } else { 0 },
                children: if inside { tree.children(v).to_vec() } else { Vec::new() },
                own: msgs[v],
                got: Vec::new(),
                done: false,
            }
        })
        .collect();
    let (nodes, tr) = run(g, progs, cfg)?;
    Ok((nodes.into_iter().map(|x| x.got).collect(), tr))
}

/// `f(v) = sum over x in desc(v) of g(v, x)`. Node `x` supplies `local[x][l]`,
/// the value `g(a, x)` for its ancestor `a` at level `l` (`l = 0..=level(x)`).
/// Partial sums for level `l` climb one level per round, level-synchronized so
/// that every child of a node reports level `l` in the same round.
pub fn aggregate_descendant_sums<W: Weight>(
    g: &Graph<W>,
    tree: &RootedTree,
    local: &[Vec<Word>],
    cfg: &SimConfig,
) -> Result<(Vec<Word>, Transcript)> {
    struct Node {
        level: u64,
        depth: u64,
        parent: Option<usize>,
        has_children: bool,
        acc: Vec<Word>,
        done: bool,
    }
    impl Node {
        fn step(&mut self, t: u64, inbox: &[Incoming]) -> Outbox {
            let base = self.depth - self.level;
            if !inbox.is_empty() {
                let l = (t - base) as usize;
                for m in inbox {
                    self.acc[l] += m.words[0];
                }
            }
            let mut out = Vec::new();
            if let Some(p) = self.parent {
                if t >= base && t - base < self.level {
                    out.push((p, vec![self.acc[(t - base) as usize]]));
                }
            }
            let last = if self.has_children { self.depth } else { (base + self.level).saturating_sub(1) };
            if t >= last {
                self.done = true;
            }
            out
        }
    }
    impl NodeProgram for Node {
        fn init(&mut self, _: &NodeCtx) -> Outbox {
            self.step(0, &[])
        }
        fn on_round(&mut self, _: &NodeCtx, round: u64, inbox: &[Incoming]) -> Outbox {
            self.step(round, inbox)
        }
        fn halted(&self) -> bool {
            self.done
        }
    }
    let depth = tree.depth() as u64;
    let progs = (0..g.n())
        .map(|v| {
            if !tree.contains(v) {
                return Node { level: 0, depth: 0, parent: None, has_children: false, acc: vec![0], done: true };
            }
            assert_eq!(local[v].len(), tree.level(v) + 1, "one local value per ancestor level");
            Node {
                level: tree.level(v) as u64,
                depth,
                parent: tree.parent(v),
                has_children: !tree.children(v).is_empty(),
                acc: local[v].clone(),
                done: false,
            }
        })
        .collect();
    let (nodes, tr) = run(g, progs, cfg)?;
    Ok((nodes.into_iter().map(|x| x.acc[x.level as usize]).collect(), tr))
}

/// `k` subtree sums at once: `f_i(v) = g_i(v) + sum over children c of f_i(c)`.
/// Values for index `i` leave level `l` in round `depth - l + i`.
pub fn convergecast_subtree<W: Weight>(
    g: &Graph<W>,
    tree: &RootedTree,
    local: &[Vec<Word>],
    k: usize,
    cfg: &SimConfig,
) -> Result<(Vec<Vec<Word>>, Transcript)> {
    struct Node {
        level: u64,
        depth: u64,
        k: u64,
        parent: Option<usize>,
        acc: Vec<Word>,
        done: bool,
    }
    impl Node {
        fn step(&mut self, t: u64, inbox: &[Incoming]) -> Outbox {
            let base = self.depth - self.level;
            if !inbox.is_empty() {
                let i = (t - base) as usize;
                for m in inbox {
                    self.acc[i] += m.words[0];
                }
            }
            let mut out = Vec::new();
            if let Some(p) = self.parent {
                if t >= base && t - base < self.k {
                    out.push((p, vec![self.acc[(t - base) as usize]]));
                }
            }
            if t + 1 >= base + self.k {
                self.done = true;
            }
            out
        }
    }
    impl NodeProgram for Node {
        fn init(&mut self, _: &NodeCtx) -> Outbox {
            self.step(0, &[])
        }
        fn on_round(&mut self, _: &NodeCtx, round: u64, inbox: &[Incoming]) -> Outbox {
            self.step(round, inbox)
        }
        fn halted(&self) -> bool {
            self.done
        }
    }
    let depth = tree.depth() as u64;
    let single = tree.size() == 1;
    let progs = (0..g.n())
        .map(|v| {
            if !tree.contains(v) || k == 0 {
                return Node { level: 0, depth: 0, k: 0, parent: None, acc: local[v].clone(), done: true };
            }
            assert_eq!(local[v].len(), k, "k local values per node");
            Node {
                level: tree.level(v) as u64,
                depth,
                k: k as u64,
                parent: tree.parent(v),
                acc: local[v].clone(),
                done: single,
            }
        })
        .collect();
    let (nodes, tr) = run(g, progs, cfg)?;
    Ok((nodes.into_iter().map(|x| x.acc).collect(), tr))
}

/// Every node sends a list of words to every neighbor, one word per round.
/// Returns, per node, the lists received, keyed by neighbor.
pub fn exchange_lists<W: Weight>(g: &Graph<W>, lists: &[Vec<Word>], cfg: &SimConfig) -> Result<(Vec<Vec<(usize, Vec<Word>)>>, Transcript)> {
    struct Node {
        list: Vec<Word>,
        expect: Vec<(usize, usize)>,
        got: Vec<(usize, Vec<Word>)>,
        sent: usize,
        done: bool,
    }
    impl Node {
        fn step(&mut self, ctx: &NodeCtx, inbox: &[Incoming]) -> Outbox {
            for m in inbox {
                let slot = self.got.iter_mut().find(|x| x.0 == m.from).expect("neighbor slot");
                slot.1.push(m.words[0]);
            }
            let out = if self.sent < self.list.len() {
                let w = self.list[self.sent];
                self.sent += 1;
                ctx.neighbors.iter().map(|&(y, _)| (y, vec![w])).collect()
            } else {
                Vec::new()
            };
            let complete = self.got.iter().zip(&self.expect).all(|(g, e)| g.1.len() >= e.1);
            if complete && self.sent >= self.list.len() {
                self.done = true;
            }
            out
        }
    }
    impl NodeProgram for Node {
        fn init(&mut self, ctx: &NodeCtx) -> Outbox {
            self.step(ctx, &[])
        }
        fn on_round(&mut self, ctx: &NodeCtx, _: u64, inbox: &[Incoming]) -> Outbox {
            self.step(ctx, inbox)
        }
        fn halted(&self) -> bool {
            self.done
        }
    }
    let progs = (0..g.n())
        .map(|v| {
            let expect: Vec<(usize, usize)> = g.adj(v).iter().map(|&(y, _)| (y, lists[y].len())).collect();
            Node {
                list: lists[v].clone(),
                got: expect.iter().map(|&(y, _)| (y, Vec::new())).collect(),
                expect,
                sent: 0,
                done: false,
            }
        })
        .collect();
    let (nodes, tr) = run(g, progs, cfg)?;
    Ok((nodes.into_iter().map(|x| x.got).collect(), tr))
}
