use std::collections::VecDeque;

use congestcut::charge::ChargeRegistry;
use congestcut::contraction::{build_msgc, MsgcConfig};
use congestcut::graph::{Graph, VertexSet};
use congestcut::oracle::{barbell, clique, cycle, gnp, gnp_connected, path, planted_cut, star, stoer_wagner, with_random_weights};
use congestcut::sim::SimConfig;
use congestcut::treecut::*;
use congestcut::RootedTree;

fn desc(t: &RootedTree, v: usize) -> VertexSet {
    VertexSet::from_slice(t.universe(), &t.descendants(v))
}

fn xor(a: &VertexSet, b: &VertexSet) -> VertexSet {
    VertexSet::from_mask((0..a.universe()).map(|x| a.contains(x) != b.contains(x)).collect())
}

fn boundary(g: &Graph<u64>, s: &VertexSet) -> Vec<usize> {
    (0..g.m()).filter(|&e| s.contains(g.edge(e).u) != s.contains(g.edge(e).v)).collect()
}

fn weight_of(g: &Graph<u64>, es: &[usize]) -> u64 {
    es.iter().map(|&e| g.edge(e).w).sum()
}

/// Plain Kruskal under integer keys `load * W / w`, compared by cross products.
fn min_load_cost(g: &Graph<u64>, load: &[u64]) -> (u64, u64) {
    let mut order: Vec<usize> = (0..g.m()).collect();
    order.sort_by(|&a, &b| (load[a] as u128 * g.edge(b).w as u128).cmp(&(load[b] as u128 * g.edge(a).w as u128)));
    let mut comp: Vec<usize> = (0..g.n()).collect();
    let mut num = 0u128;
    let mut picked = Vec::new();
    for e in order {
        let (u, v) = (g.edge(e).u, g.edge(e).v);
        let (cu, cv) = (comp[u], comp[v]);
        if cu != cv {
            for c in comp.iter_mut() {
                if *c == cv {
                    *c = cu;
                }
            }
            picked.push(e);
        }
    }
    // sum of load / w as an exact fraction over the common denominator
    let den: u128 = picked.iter().map(|&e| g.edge(e).w as u128).product::<u128>().max(1);
    for &e in &picked {
        num += load[e] as u128 * (den / g.edge(e).w as u128);
    }
    (num as u64, den as u64)
}

#[test]
fn packing_on_c4() {
    let g = cycle(4);
    let trees = greedy_tree_packing(&g, 2).unwrap();
    let mut load = [0; 4];
    for t in &trees {
        assert_eq!(t.len(), 3);
        t.iter().for_each(|&e| load[e] += 1);
    }
    assert!(load.iter().all(|&l| l <= 2));
}

#[test]
fn packing_on_k4() {
    let g = clique(4);
    let trees = greedy_tree_packing(&g, 3).unwrap();
    let mut load = vec![0u64; 6];
    for t in &trees {
        let cost: u64 = t.iter().map(|&e| load[e]).sum();
        assert_eq!(cost, min_load_cost(&g, &load).0);
        t.iter().for_each(|&e| load[e] += 1);
    }
    assert_eq!(load.iter().sum::<u64>(), 9);
    assert!(load.iter().all(|&l| l <= 2));
}

#[test]
fn packing_on_a_tree_repeats_it() {
    let g = star(7);
    let trees = greedy_tree_packing(&g, 4).unwrap();
    assert!(trees.iter().all(|t| *t == (0..6).collect::<Vec<_>>()));
}

#[test]
fn packing_trees_are_minimum_under_prefix_loads() {
    for seed in 0..5 {
        let g = gnp_connected(20, 0.3, seed);
        let trees = greedy_tree_packing(&g, 12).unwrap();
        let mut load = vec![0u64; g.m()];
        for t in &trees {
            let cost: u64 = t.iter().map(|&e| load[e]).sum();
            assert_eq!(cost, min_load_cost(&g, &load).0);
            t.iter().for_each(|&e| load[e] += 1);
        }
    }
}

#[test]
fn packing_rejects_disconnected() {
    let g = Graph::<u64>::unweighted(4, [(0, 1), (2, 3)]).unwrap();
    assert!(greedy_tree_packing(&g, 1).is_err());
}

#[test]
fn skeleton_is_the_graph_for_small_lambda() {
    let g = gnp_connected(40, 0.2, 3);
    let cfg = TreeCutConfig::default();
    let s = skeleton_sample(&g, 4, 9, &cfg);
    assert_eq!(s.p, 1.0);
    assert_eq!(s.graph.m(), g.m());
    assert_eq!(stoer_wagner(&s.graph).unwrap().value, stoer_wagner(&g).unwrap().value);
}

/// Two K32 with edge weight 2 joined by 40 unit bridges; the bridges are the minimum cut.
fn heavy_barbell() -> Graph<u64> {
    let mut edges = Vec::new();
    for off in [0, 32] {
        for i in 0..32 {
            for j in i + 1..32 {
                edges.push((off + i, off + j, 2));
            }
        }
    }
    for b in 0..40 {
        edges.push((b % 32, 32 + (b * 7 + b / 32) % 32, 1));
    }
    Graph::new(64, edges).unwrap()
}

#[test]
fn skeleton_scales_lambda() {
    let g = heavy_barbell();
    assert_eq!(stoer_wagner(&g).unwrap().value, 40);
    let cfg = TreeCutConfig::default();
    let mut good = 0;
    for seed in 0..100 {
        let s = skeleton_sample(&g, 40, seed, &cfg);
        assert!(s.p < 1.0);
        let lh = stoer_wagner(&s.graph).unwrap().value as f64;
        let r = lh / (s.p * 40.0);
        if (0.5..=1.5).contains(&r) {
            good += 1;
        }
    }
    assert!(good >= 90, "{good}");
}

#[test]
fn tree_input_gives_the_tree() {
    let g = path(9);
    let set = spanning_tree_set(&g, 1, 0, &TreeCutConfig::default());
    assert!(set.trees.iter().all(|t| *t == (0..8).collect::<Vec<_>>()));
}

#[test]
fn cycle_cuts_respect_every_tree() {
    let g = cycle(8);
    let set = spanning_tree_set(&g, 2, 0, &TreeCutConfig::default());
    for t in &set.trees {
        assert_eq!(t.len(), 7);
        for a in 0..8 {
            for b in a + 1..8 {
                let side = VertexSet::from_slice(8, &(a + 1..=b).collect::<Vec<_>>());
                let cut = boundary(&g, &side);
                assert_eq!(cut.len(), 2);
                assert!(cut.iter().filter(|e| t.contains(e)).count() <= 2);
            }
        }
    }
}

#[test]
fn one_respect_on_path_and_star() {
    let g = path(4);
    let t = RootedTree::from_edges(&g, 0, &[0, 1, 2]).unwrap();
    let c = one_respect_values(&g, &t);
    assert_eq!(&c[1..], &[1, 1, 1]);
    let s = star(6);
    let t = s.bfs(0, |_| true);
    let c = one_respect_values(&s, &t);
    assert!(c[1..].iter().all(|&x| x == 1));
}

#[test]
fn one_respect_matches_direct_recount() {
    let g = gnp(32, 0.4, 6);
    assert!(g.is_connected());
    let t = g.bfs(5, |_| true);
    let c = one_respect_values(&g, &t);
    for v in 0..32 {
        if v != 5 {
            assert_eq!(c[v], weight_of(&g, &boundary(&g, &desc(&t, v))));
        }
    }
}

#[test]
fn cross_values_on_disjoint_intervals() {
    // path tree 0-1-2-3-4 rooted at 2 on a denser graph
    let g = Graph::<u64>::unweighted(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3), (0, 3)]).unwrap();
    let t = RootedTree::from_edges(&g, 2, &[0, 1, 2, 3]).unwrap();
    let f = cross_values(&g, &t, 1);
    let between = g.edges().iter().filter(|e| (e.u <= 1) != (e.v <= 1) && e.u.max(e.v) >= 3 && e.u.min(e.v) <= 1).count();
    assert_eq!(f[3] as usize, between);
    assert_eq!(between, 3);
}

#[test]
fn cross_values_match_boundary_intersections() {
    let g = with_random_weights(&gnp_connected(24, 0.3, 2), 50, 2);
    let t = g.bfs(0, |_| true);
    for u in 1..24 {
        let f = cross_values(&g, &t, u);
        let du = boundary(&g, &desc(&t, u));
        for b in 1..24 {
            if t.is_ancestor(b, u) && b != u {
                continue;
            }
            let db = boundary(&g, &desc(&t, b));
            let common: Vec<usize> = du.iter().copied().filter(|e| db.contains(e)).collect();
            if !t.is_ancestor(u, b) || u == b {
                assert_eq!(f[b], weight_of(&g, &common), "u {u} b {b}");
            }
        }
        // leaf b: the weight from b into desc(u)
        for b in 0..24 {
            if t.children(b).is_empty() && !t.is_ancestor(u, b) {
                let du_set = desc(&t, u);
                let w: u64 = g.adj(b).iter().filter(|&&(y, _)| du_set.contains(y)).map(|&(_, e)| g.edge(e).w).sum();
                assert_eq!(f[b], w);
            }
        }
    }
}

#[test]
fn two_respect_examples() {
    let c6 = cycle(6);
    let t = c6.bfs(0, |_| true);
    let r = min_2respect(&c6, &t).unwrap();
    assert_eq!(r.value, 2);
    let (a, b) = r.pair;
    if a != b {
        assert_eq!(t.level(a), t.level(b));
    }
    let p5 = path(5);
    let r = min_2respect(&p5, &p5.bfs(0, |_| true)).unwrap();
    assert_eq!(r.value, 1);
    assert_eq!(r.pair.0, r.pair.1);
    let k5 = clique(5);
    let r = min_2respect(&k5, &k5.bfs(0, |_| true)).unwrap();
    assert_eq!(r.value, 4);
    assert_eq!(r.pair, (1, 1));
}

#[test]
fn symmetric_difference_and_tree_edge_identities() {
    for seed in 0..4 {
        let g = with_random_weights(&gnp_connected(30, 0.25, seed), 9, seed);
        let t = g.bfs(0, |_| true);
        let c1 = one_respect_values(&g, &t);
        let tree_edges = t.edges();
        for u in 1..30 {
            let f = cross_values(&g, &t, u);
            for v in 1..30 {
                if u == v || t.is_ancestor(v, u) {
                    continue;
                }
                // u is an ancestor of v or the two are disjoint: F_u(v) = C(u, v)
                let side = xor(&desc(&t, u), &desc(&t, v));
                let direct = weight_of(&g, &boundary(&g, &side));
                if !t.is_ancestor(u, v) {
                    assert_eq!(c1[u] + c1[v] - 2 * f[v], direct);
                }
                let mut on_tree: Vec<usize> = boundary(&g, &side).into_iter().filter(|e| tree_edges.contains(e)).collect();
                on_tree.sort_unstable();
                let mut expect = vec![t.parent_edge(u).unwrap(), t.parent_edge(v).unwrap()];
                expect.sort_unstable();
                assert_eq!(on_tree, expect);
            }
        }
    }
}

#[test]
fn exact_on_weighted_c4() {
    let g = Graph::<u64>::new(4, [(0, 1, 5), (1, 2, 1), (2, 3, 7), (3, 0, 1)]).unwrap();
    let r = min_cut_exact(&g, 2, 0, &TreeCutConfig::default()).unwrap();
    assert_eq!(r.cut.value, 2);
    let mut c = r.cut.crossing.clone();
    c.sort_unstable();
    assert_eq!(c, vec![1, 3]);
}

#[test]
fn exact_on_weighted_tree() {
    let g = Graph::<u64>::new(5, [(0, 1, 9), (1, 2, 4), (1, 3, 7), (3, 4, 6)]).unwrap();
    assert_eq!(min_cut_exact(&g, 4, 0, &TreeCutConfig::default()).unwrap().cut.value, 4);
}

#[test]
fn exact_matches_stoer_wagner() {
    for seed in 0..20 {
        let n = 20 + (seed as usize * 7) % 60;
        let g = with_random_weights(&gnp_connected(n, 0.3, seed), (n as u64).pow(4), seed);
        let sw = stoer_wagner(&g).unwrap().value;
        let r = min_cut_exact(&g, sw as u128, seed, &TreeCutConfig::default()).unwrap();
        assert_eq!(r.cut.value, sw, "seed {seed}");
    }
}

#[test]
fn recovered_edges_match_the_boundary() {
    let c6 = cycle(6);
    let t = c6.bfs(0, |_| true);
    let r = min_2respect(&c6, &t).unwrap();
    assert_eq!(recover_cut_edges(&c6, &t, r.pair.0, r.pair.1).len(), 2);
    let g = gnp_connected(30, 0.3, 8);
    let t = g.bfs(3, |_| true);
    assert_eq!(recover_cut_edges(&g, &t, 7, 7), boundary(&g, &desc(&t, 7)));
    for (u, v) in [(1, 9), (4, 20), (12, 13)] {
        let side = xor(&desc(&t, u), &desc(&t, v));
        assert_eq!(recover_cut_edges(&g, &t, u, v), boundary(&g, &side));
    }
}

fn eps_for(g: &Graph<u64>) -> f64 {
    (g.min_degree() as f64).ln() / (2.0 * (g.n() as f64).ln())
}

/// Multi-source BFS over the physical edges of a mapping.
fn hops(g: &Graph<u64>, allowed: &[usize], from: &[usize], to: &[usize]) -> Option<usize> {
    let mut dist = vec![usize::MAX; g.n()];
    let mut q = VecDeque::new();
    for &s in from {
        dist[s] = 0;
        q.push_back(s);
    }
    while let Some(x) = q.pop_front() {
        if to.contains(&x) {
            return Some(dist[x]);
        }
        for &(y, e) in g.adj(x) {
            if allowed[e] > 0 && dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                q.push_back(y);
            }
        }
    }
    None
}

#[test]
fn mapping_on_two_cliques() {
    let g = barbell(20, 3).unwrap();
    let m = build_msgc(&g, eps_for(&g), &MsgcConfig::default(), &ChargeRegistry::default(), 1).unwrap();
    let cg = &m.contracted;
    let t = cg.graph.bfs(0, |_| true);
    let map = build_mapping(&g, &m.clustering, cg, &t).unwrap();
    assert_eq!(map.tree_edges.len(), cg.graph.n() - 1);
    assert_eq!(map.clusters.len(), 2);
    for c in &map.clusters {
        let members: Vec<usize> = (0..g.n()).filter(|&v| m.clustering.group_id[v] == c.group).collect();
        assert_eq!(c.edges.len(), members.len() - 1);
        assert!(c.edges.iter().all(|&e| members.contains(&g.edge(e).u) && members.contains(&g.edge(e).v)));
        assert!(cg.members[c.core].contains(&c.leader));
    }
    let mult = map.multiplicity(g.m());
    assert!(mult.iter().all(|&k| k <= 2));
    // every tree edge maps to a physical edge joining the right super-vertices
    for &e in &map.tree_edges {
        let (a, b) = (cg.super_of[g.edge(e).u], cg.super_of[g.edge(e).v]);
        assert!(t.parent(a) == Some(b) || t.parent(b) == Some(a));
    }
}

#[test]
fn mapping_on_a_single_cluster() {
    let g = clique(12);
    let m = build_msgc(&g, eps_for(&g).min(0.49), &MsgcConfig::default(), &ChargeRegistry::default(), 0).unwrap();
    let cg = &m.contracted;
    let t = cg.graph.bfs(0, |_| true);
    let map = build_mapping(&g, &m.clustering, cg, &t).unwrap();
    assert!(map.tree_edges.is_empty());
    assert_eq!(map.clusters.len(), 1);
    assert_eq!(map.clusters[0].edges.len(), 11);
    assert_eq!(map.clusters[0].depth, 1);
}

#[test]
fn mapping_paths_to_ancestors_are_short() {
    for seed in 0..4 {
        let g = planted_cut(200, 4, seed).unwrap();
        let m = build_msgc(&g, eps_for(&g), &MsgcConfig::default(), &ChargeRegistry::default(), seed).unwrap();
        let cg = &m.contracted;
        if cg.graph.n() < 2 {
            continue;
        }
        let tree = cg.graph.bfs(0, |_| true);
        let map = build_mapping(&g, &m.clustering, cg, &tree).unwrap();
        let mult = map.multiplicity(g.m());
        assert!(mult.iter().all(|&k| k <= 2));
        let bound = map.sum_cluster_depths() + tree.depth();
        for s in 0..cg.graph.n() {
            for a in tree.ancestors(s) {
                let d = hops(&g, &mult, &cg.members[s], &cg.members[a]).expect("mapping connects ancestors");
                assert!(d <= bound, "seed {seed}: {d} > {bound}");
            }
        }
    }
}

#[test]
fn contracted_two_cliques() {
    let g = barbell(20, 3).unwrap();
    let m = build_msgc(&g, eps_for(&g), &MsgcConfig::default(), &ChargeRegistry::default(), 1).unwrap();
    let r = min_cut_contracted(&g, &m.contracted, 3, 1, &TreeCutConfig::default()).unwrap();
    assert_eq!(r.cut.value, 3);
    assert!(!r.trivial_fallback);
    let mut bridges: Vec<usize> = (0..3).map(|i| g.edge_between(i, 20 + i).unwrap()).collect();
    bridges.sort_unstable();
    assert_eq!(r.cut.crossing, bridges);
}

#[test]
fn contracted_clique_falls_back_to_degree() {
    let g = clique(16);
    let m = build_msgc(&g, eps_for(&g).min(0.49), &MsgcConfig::default(), &ChargeRegistry::default(), 1).unwrap();
    let r = min_cut_contracted(&g, &m.contracted, 15, 1, &TreeCutConfig::default()).unwrap();
    assert_eq!(r.cut.value, 15);
    assert!(r.trivial_fallback);
}

#[test]
fn contracted_matches_stoer_wagner_on_planted_sweep() {
    for seed in 0..30u64 {
        let n = 120 + 10 * (seed as usize % 9);
        let k = 1 + seed as usize % 5;
        let g = planted_cut(n, k, seed).unwrap();
        let m = build_msgc(&g, eps_for(&g), &MsgcConfig::default(), &ChargeRegistry::default(), seed).unwrap();
        let r = min_cut_contracted(&g, &m.contracted, k as u128, seed, &TreeCutConfig::default()).unwrap();
        assert_eq!(r.cut.value, stoer_wagner(&g).unwrap().value, "seed {seed} n {n} k {k}");
    }
}

#[test]
fn simulated_tree_values_match_centralized() {
    for seed in 0..3 {
        let g = with_random_weights(&gnp_connected(40, 0.2, seed), 40u64.pow(2), seed);
        let t = g.bfs(seed as usize, |_| true);
        let sim = SimConfig { audit: true, ..Default::default() };
        let s = simulated_tree_values(&g, &t, &sim).unwrap();
        assert!(s.transcript.violations.is_empty());
        let c1 = one_respect_values(&g, &t);
        for v in 0..40 {
            assert_eq!(s.one_respect[v], c1[v] as u128);
            let f = cross_values(&g, &t, v);
            for b in 0..40 {
                assert_eq!(s.cross[v][b], f[b] as u128);
            }
        }
        let d = t.depth() as u64;
        // downcast, exchange, aggregate, convergecast
        let bound = (2 * d + 1) + (d + 2) + (2 * d + 1) + (2 * d + 40 + 1);
        assert!(s.transcript.simulated_rounds <= bound);
    }
}
