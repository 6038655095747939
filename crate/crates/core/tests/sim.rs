use congestcut::charge::{ChargeInputs, ChargeRegistry, Formula};
use congestcut::graph::Graph;
use congestcut::oracle::{cycle, gnp_connected, path, star};
use congestcut::rng::seeded;
use congestcut::sim::*;
use congestcut::{Error, RootedTree};
use rand::Rng;

/// Floods the largest id seen; halts after `horizon` rounds.
struct MaxFlood {
    best: Word,
    horizon: u64,
    done: bool,
}

impl NodeProgram for MaxFlood {
    fn init(&mut self, ctx: &NodeCtx) -> Outbox {
        self.best = ctx.id as Word;
        ctx.neighbors.iter().map(|&(y, _)| (y, vec![self.best])).collect()
    }
    fn on_round(&mut self, ctx: &NodeCtx, round: u64, inbox: &[Incoming]) -> Outbox {
        let before = self.best;
        for m in inbox {
            self.best = self.best.max(m.words[0]);
        }
        if round >= self.horizon {
            self.done = true;
        }
        if self.best > before {
            ctx.neighbors.iter().map(|&(y, _)| (y, vec![self.best])).collect()
        } else {
            Vec::new()
        }
    }
    fn halted(&self) -> bool {
        self.done
    }
}

fn flood(g: &Graph<u64>, horizon: u64) -> (Vec<MaxFlood>, Transcript) {
    let progs = (0..g.n()).map(|_| MaxFlood { best: 0, horizon, done: false }).collect();
    run(g, progs, &SimConfig::default()).unwrap()
}

fn diameter(g: &Graph<u64>) -> usize {
    (0..g.n()).map(|v| g.eccentricity(v, |_| true)).max().unwrap()
}

#[test]
fn flood_max_on_c8() {
    let g = cycle(8);
    let (nodes, tr) = flood(&g, 8);
    assert!(nodes.iter().all(|x| x.best == 7));
    assert!(tr.simulated_rounds <= 8);
}

#[test]
fn leader_election_within_diameter() {
    let g = gnp_connected(32, 0.2, 3);
    let d = diameter(&g) as u64;
    let (nodes, tr) = flood(&g, d);
    assert!(nodes.iter().all(|x| x.best == 31));
    assert!(tr.simulated_rounds <= d);
}

#[test]
fn runs_are_deterministic() {
    let g = gnp_connected(40, 0.1, 8);
    let (_, a) = flood(&g, 12);
    let (_, b) = flood(&g, 12);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}

#[derive(Debug)]
struct Stranger;
impl NodeProgram for Stranger {
    fn init(&mut self, ctx: &NodeCtx) -> Outbox {
        if ctx.id == 0 {
            vec![(2, vec![1])]
        } else {
            Vec::new()
        }
    }
    fn on_round(&mut self, _: &NodeCtx, _: u64, _: &[Incoming]) -> Outbox {
        Vec::new()
    }
    fn halted(&self) -> bool {
        true
    }
}

#[test]
fn messages_to_non_neighbors_fail() {
    let g = path(3);
    let err = run(&g, vec![Stranger, Stranger, Stranger], &SimConfig::default()).unwrap_err();
    assert_eq!(err, Error::Locality { node: 0, target: 2, round: 0 });
}

#[test]
fn oversized_words_are_reported() {
    let g = path(4);
    let t = g.bfs(0, |_| true);
    // 4 vertices: 8 * 2 = 16-bit words
    let msgs = vec![1 << 20, 1, 2, 3];
    let err = downcast(&g, &t, &msgs, &SimConfig::default()).unwrap_err();
    assert!(matches!(err, Error::WordWidth { bits: 16, .. }));
    let (_, tr) = downcast(&g, &t, &msgs, &SimConfig { audit: true, ..Default::default() }).unwrap();
    assert!(tr.violations.iter().all(|v| v.kind == "word_width"));
    assert!(!tr.violations.is_empty());
}

fn random_tree(n: usize, seed: u64) -> (Graph<u64>, RootedTree) {
    let g = gnp_connected(n, 0.1, seed);
    let root = seed as usize % n;
    let t = g.bfs(root, |_| true);
    (g, t)
}

#[test]
fn downcast_examples() {
    let g = path(5);
    let t = g.bfs(0, |_| true);
    let (got, tr) = downcast(&g, &t, &[0, 1, 2, 3, 4], &SimConfig::default()).unwrap();
    assert_eq!(got[4], vec![3, 2, 1, 0]);
    assert!(tr.simulated_rounds <= 9);
    let s = star(6);
    let t = s.bfs(0, |_| true);
    let (got, tr) = downcast(&s, &t, &[9, 1, 2, 3, 4, 5], &SimConfig::default()).unwrap();
    assert!(got[1..].iter().all(|x| *x == vec![9]));
    assert!(tr.simulated_rounds <= 3);
}

#[test]
fn downcast_delivers_ancestor_sets() {
    let (g, t) = random_tree(64, 1);
    let msgs: Vec<Word> = (0..64).collect();
    let (got, tr) = downcast(&g, &t, &msgs, &SimConfig::default()).unwrap();
    for v in 0..64 {
        // offline walk up the parent pointers
        let mut expect = Vec::new();
        let mut x = v;
        while let Some(p) = t.parent(x) {
            expect.push(p as Word);
            x = p;
        }
        assert_eq!(got[v], expect);
    }
    assert!(tr.simulated_rounds <= 2 * t.depth() as u64 + 1);
}

fn ancestors_root_first(t: &RootedTree, x: usize) -> Vec<usize> {
    let mut a = vec![x];
    let mut y = x;
    while let Some(p) = t.parent(y) {
        a.push(p);
        y = p;
    }
    a.reverse();
    a
}

#[test]
fn aggregate_subtree_sizes_on_p6() {
    let g = path(6);
    let t = g.bfs(0, |_| true);
    let local: Vec<Vec<Word>> = (0..6).map(|x| vec![1; t.level(x) + 1]).collect();
    let (f, tr) = aggregate_descendant_sums(&g, &t, &local, &SimConfig::default()).unwrap();
    assert_eq!(f, vec![6, 5, 4, 3, 2, 1]);
    assert!(tr.simulated_rounds <= 2 * 5 + 1);
    let zero: Vec<Vec<Word>> = (0..6).map(|x| vec![0; t.level(x) + 1]).collect();
    assert!(aggregate_descendant_sums(&g, &t, &zero, &SimConfig::default()).unwrap().0.iter().all(|&x| x == 0));
}

#[test]
fn aggregate_weighted_degrees() {
    let g = gnp_connected(48, 0.15, 9);
    let t = g.bfs(0, |_| true);
    let mut rng = seeded(9);
    // g(v, x) depends on both the ancestor and x
    let gv: Vec<Vec<Word>> = (0..48).map(|_| (0..48).map(|_| rng.gen_range(0..100)).collect()).collect();
    let local: Vec<Vec<Word>> = (0..48)
        .map(|x| ancestors_root_first(&t, x).into_iter().map(|a| gv[a][x] + g.degree(x) as Word).collect())
        .collect();
    let (f, tr) = aggregate_descendant_sums(&g, &t, &local, &SimConfig::default()).unwrap();
    for v in 0..48 {
        let expect: Word = t.descendants(v).into_iter().map(|x| gv[v][x] + g.degree(x) as Word).sum();
        assert_eq!(f[v], expect);
    }
    assert!(tr.simulated_rounds <= 2 * t.depth() as u64 + 1);
}

#[test]
fn convergecast_examples() {
    let (g, t) = random_tree(50, 4);
    let ones: Vec<Vec<Word>> = vec![vec![1]; 50];
    let (f, tr) = convergecast_subtree(&g, &t, &ones, 1, &SimConfig::default()).unwrap();
    for v in 0..50 {
        assert_eq!(f[v][0] as usize, t.subtree_size(v));
    }
    assert!(tr.simulated_rounds <= 2 * t.depth() as u64 + 2);
    let leaf: Vec<Vec<Word>> = (0..50).map(|v| vec![t.children(v).is_empty() as Word]).collect();
    let (f, _) = convergecast_subtree(&g, &t, &leaf, 1, &SimConfig::default()).unwrap();
    fn leaves(t: &RootedTree, v: usize) -> Word {
        if t.children(v).is_empty() {
            1
        } else {
            t.children(v).iter().map(|&c| leaves(t, c)).sum()
        }
    }
    for v in 0..50 {
        assert_eq!(f[v][0], leaves(&t, v));
    }
    let five: Vec<Vec<Word>> = (0..50).map(|v| vec![v as Word; 5]).collect();
    let (f, tr) = convergecast_subtree(&g, &t, &five, 5, &SimConfig::default()).unwrap();
    assert!(f.iter().all(|row| row.iter().all(|&x| x == row[0])));
    assert!(tr.simulated_rounds <= 2 * t.depth() as u64 + 6);
}

#[test]
fn round_bounds_on_many_trees() {
    for seed in 0..15 {
        let (g, t) = random_tree(30 + 5 * seed as usize, seed);
        let n = g.n();
        let d = t.depth() as u64;
        let cfg = SimConfig::default();
        let (_, a) = downcast(&g, &t, &vec![1; n], &cfg).unwrap();
        assert!(a.simulated_rounds <= 2 * d + 1);
        let local: Vec<Vec<Word>> = (0..n).map(|x| vec![1; t.level(x) + 1]).collect();
        let (_, b) = aggregate_descendant_sums(&g, &t, &local, &cfg).unwrap();
        assert!(b.simulated_rounds <= 2 * d + 1);
        let k = 1 + seed as usize;
        let (_, c) = convergecast_subtree(&g, &t, &vec![vec![1; k]; n], k, &cfg).unwrap();
        assert!(c.simulated_rounds <= 2 * d + k as u64 + 1);
    }
}

#[test]
fn exchange_lists_delivers_everything() {
    let g = gnp_connected(20, 0.3, 2);
    let lists: Vec<Vec<Word>> = (0..20).map(|v| (0..(v % 4) as Word).map(|i| 10 * v as Word + i).collect()).collect();
    let (got, tr) = exchange_lists(&g, &lists, &SimConfig::default()).unwrap();
    for v in 0..20 {
        for &(y, _) in g.adj(v) {
            let slot = got[v].iter().find(|s| s.0 == y).unwrap();
            assert_eq!(slot.1, lists[y]);
        }
    }
    assert!(tr.simulated_rounds <= 4);
}

#[test]
fn bfs_protocol_levels() {
    let g = gnp_connected(60, 0.08, 5);
    let (t, tr) = bfs_protocol(&g, 7, &SimConfig::default()).unwrap();
    let r = g.bfs(7, |_| true);
    for v in 0..60 {
        assert_eq!(t.level(v), r.level(v));
    }
    assert_eq!(tr.simulated_rounds, r.depth() as u64);
}

#[test]
fn charge_examples() {
    let reg = ChargeRegistry::default();
    let c = reg.charge("c_slot_mst", ChargeInputs { n: 100.0, l: 4.0, d: 10.0, ..Default::default() }).unwrap();
    assert_eq!(c.rounds, 210.0);
    let zero = reg.charge("measured", ChargeInputs::default()).unwrap();
    assert_eq!(zero.rounds, 0.0);
    let mut simple = ChargeRegistry::default();
    simple.formulas.insert("lambda_estimate".into(), Formula::LambdaEstimate { c: 1.0, a: 0.0, b: 0.0, e: 1.0 });
    let l = simple.charge("lambda_estimate", ChargeInputs { n: 100.0, d: 10.0, eps: 0.5, ..Default::default() }).unwrap();
    assert_eq!(l.rounds, 140.0);
    let mut tr = Transcript::default();
    tr.add_charge(c.clone());
    assert_eq!(tr.rounds, 210.0);
    assert_eq!(tr.charges[0].formula, c.formula);
    assert_eq!(tr.stages[0].mode, "charged");
    assert!(matches!(reg.charge("unknown", ChargeInputs::default()), Err(Error::UnknownCharge(_))));
}

#[test]
fn transcript_json_shape() {
    let g = path(3);
    let (_, tr) = flood(&g, 2);
    let v = tr.to_json();
    for key in ["rounds", "halts", "charges", "violations"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert_eq!(Transcript::default().rounds, 0.0);
}
