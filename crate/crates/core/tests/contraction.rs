use congestcut::charge::ChargeRegistry;
use congestcut::contraction::*;
use congestcut::decomposition::tripartition;
use congestcut::graph::Graph;
use congestcut::oracle::{barbell, clique, gnp_connected, planted_cut, stoer_wagner};
use congestcut::rng::seeded;
use rand::Rng;

/// Reference trimming: one vertex at a time, first offender by id, until none.
fn naive_trim(g: &Graph<u64>, start: &[Option<usize>]) -> Vec<Option<usize>> {
    let mut grp = start.to_vec();
    loop {
        let offender = (0..g.n()).find(|&v| {
            grp[v].is_some_and(|id| {
                let inside = g.adj(v).iter().filter(|&&(u, _)| grp[u] == Some(id)).count();
                5 * inside < 2 * g.degree(v)
            })
        });
        match offender {
            Some(v) => grp[v] = None,
            None => return grp,
        }
    }
}

fn as_groups(n: usize, c: &Clustering) -> Vec<Option<usize>> {
    (0..n).map(|v| (c.from_component[v] && c.group_id[v] < n).then_some(c.group_id[v])).collect()
}

fn eps_for(g: &Graph<u64>, target_delta: f64) -> f64 {
    target_delta.ln() / (2.0 * (g.n() as f64).ln())
}

#[test]
fn init_group_count_matches_components() {
    let g = planted_cut(120, 3, 4).unwrap();
    let t = tripartition(&g, 0.3, 0.03, &Default::default(), &ChargeRegistry::default(), 4).unwrap();
    let c = init_groups(g.n(), &t.components);
    let covered: usize = t.components.iter().map(Vec::len).sum();
    assert_eq!(c.groups().len(), t.components.len() + (g.n() - covered));
}

#[test]
fn dense_cluster_with_pendant_path_trims_the_path() {
    // K12 on 0..12, a path 11-12-13-14-15 in the same group, and four
    // outside leaves on every path vertex
    let mut edges = Vec::new();
    for i in 0..12 {
        for j in i + 1..12 {
            edges.push((i, j));
        }
    }
    edges.extend([(11, 12), (12, 13), (13, 14), (14, 15)]);
    for (k, p) in (12..16).enumerate() {
        edges.extend((0..4).map(|j| (p, 16 + 4 * k + j)));
    }
    let g = Graph::<u64>::unweighted(32, edges).unwrap();
    let c = init_groups(32, &[(0..16).collect()]);
    let (t, k) = trim(&g, &c);
    let reference = naive_trim(&g, &as_groups(32, &c));
    assert_eq!(as_groups(32, &t), reference);
    let gone: Vec<usize> = (0..16).filter(|&v| reference[v].is_none()).collect();
    assert_eq!(gone, vec![12, 13, 14, 15]);
    assert_eq!(k, 4);
}

#[test]
fn trim_matches_naive_reference_on_random_groupings() {
    let mut rng = seeded(31);
    for seed in 0..20 {
        let g = gnp_connected(40, 0.2, seed);
        let parts = rng.gen_range(2..5);
        let labels: Vec<usize> = (0..40).map(|_| rng.gen_range(0..parts)).collect();
        let comps: Vec<Vec<usize>> =
            (0..parts).map(|p| (0..40).filter(|&v| labels[v] == p).collect::<Vec<_>>()).filter(|c| !c.is_empty()).collect();
        let c = init_groups(40, &comps);
        let (t, k) = trim(&g, &c);
        let reference = naive_trim(&g, &as_groups(40, &c));
        assert_eq!(as_groups(40, &t), reference, "seed {seed}");
        assert_eq!(k, reference.iter().filter(|x| x.is_none()).count());
        // trimmed ids sit above n
        assert!((0..40).all(|v| reference[v].is_some() || t.group_id[v] == 40 + v));
    }
}

#[test]
fn shave_matches_recount() {
    for seed in 0..10 {
        let g = planted_cut(80, 4, seed).unwrap();
        let t = tripartition(&g, 0.3, 0.03, &Default::default(), &ChargeRegistry::default(), seed).unwrap();
        let (mut c, _) = trim(&g, &init_groups(80, &t.components));
        split_disconnected(&g, &mut c);
        let s = shave(&g, &c);
        assert_eq!(s.group_id, c.group_id);
        let size = |id: usize| c.group_id.iter().filter(|&&x| x == id).count();
        for v in 0..80 {
            let id = c.group_id[v];
            let good = g.adj(v).iter().filter(|&&(u, _)| c.group_id[u] == id).count();
            let expect = size(id) == 1 || (id < 80 && 2 * good <= g.degree(v) + 2);
            assert_eq!(s.regular[v], expect, "seed {seed} vertex {v}");
        }
    }
}

#[test]
fn two_cliques_three_bridges() {
    let g = barbell(20, 3).unwrap();
    let eps = eps_for(&g, 19.0);
    let m = build_msgc(&g, eps, &MsgcConfig::default(), &ChargeRegistry::default(), 1).unwrap();
    assert_eq!(m.report.nontrivial_cluster_count, 2);
    let cg = &m.contracted;
    assert_eq!(cg.core_count, 2);
    let regular = m.clustering.regular.iter().filter(|&&r| r).count();
    assert_eq!(cg.graph.n(), cg.core_count + regular);
    assert_eq!(stoer_wagner(&g).unwrap().value, 3);
    assert_eq!(stoer_wagner(&cg.graph).unwrap().value, 3);
    assert!(m.report.nontrivial_cluster_count as f64 <= m.report.cluster_count_bound);
}

#[test]
fn clique_is_one_cluster() {
    let g = clique(30);
    let eps = eps_for(&g, 29.0).min(0.49);
    let m = build_msgc(&g, eps, &MsgcConfig::default(), &ChargeRegistry::default(), 2).unwrap();
    assert_eq!(m.report.nontrivial_cluster_count, 1);
    assert_eq!(m.report.trimmed_count, 0);
    // nothing left to cut in the contraction; the trivial cut carries the answer
    assert_eq!(m.contracted.graph.n(), 1);
    assert_eq!(g.min_weighted_degree().unwrap().0, 29);
}

#[test]
fn contraction_never_undercuts() {
    for seed in 0..6 {
        let g = planted_cut(160, 3 + seed as usize, seed).unwrap();
        let eps = eps_for(&g, g.min_degree() as f64);
        let m = build_msgc(&g, eps, &MsgcConfig::default(), &ChargeRegistry::default(), seed).unwrap();
        let lam = stoer_wagner(&g).unwrap().value;
        if m.contracted.graph.n() >= 2 {
            let cut = stoer_wagner(&m.contracted.graph).unwrap();
            assert!(cut.value >= lam);
            let lifted = m.contracted.lift(&cut.set(m.contracted.graph.n()));
            assert_eq!(g.cut_weight(&lifted).unwrap(), cut.value);
        }
    }
}

#[test]
fn contracted_graph_has_no_core_internal_edges() {
    let g = planted_cut(200, 5, 3).unwrap();
    let eps = eps_for(&g, g.min_degree() as f64);
    let m = build_msgc(&g, eps, &MsgcConfig::default(), &ChargeRegistry::default(), 3).unwrap();
    let cg = &m.contracted;
    let total: u64 = cg.graph.edges().iter().map(|e| e.w).sum();
    let crossing = g.edges().iter().filter(|e| cg.super_of[e.u] != cg.super_of[e.v]).count() as u64;
    assert_eq!(total, crossing);
    for (s, mem) in cg.members.iter().enumerate() {
        assert!(mem.iter().all(|&v| cg.super_of[v] == s));
    }
}

#[test]
fn structure_bounds_on_dense_instances() {
    for seed in 0..5 {
        let g = planted_cut(300, 6, 50 + seed).unwrap();
        let eps = eps_for(&g, g.min_degree() as f64);
        let m = build_msgc(&g, eps, &MsgcConfig::default(), &ChargeRegistry::default(), seed).unwrap();
        let r = &m.report;
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        // independent recount on the certificate graph
        let delta = m.sparse.min_degree() as f64;
        let groups = m.clustering.nontrivial();
        assert!(groups.len() as f64 <= 3.0 * 300.0 / delta);
        assert!(groups.iter().all(|c| c.len() as f64 >= 0.4 * delta));
        for c in &groups {
            for &v in c {
                let inside = m.sparse.adj(v).iter().filter(|&&(u, _)| m.clustering.group_id[u] == m.clustering.group_id[v]).count();
                assert!(5 * inside >= 2 * m.sparse.degree(v));
            }
        }
    }
}

#[test]
fn preservation_report_on_small_barbell() {
    let g = barbell(10, 1).unwrap();
    let eps = eps_for(&g, 9.0);
    let m = build_msgc(&g, eps, &MsgcConfig::default(), &ChargeRegistry::default(), 1).unwrap();
    let r = validate_min_cut_preservation(&g, &m.clustering).unwrap();
    assert_eq!(r.min_cuts, 1);
    assert_eq!(r.nontrivial_min_cuts, 1);
    assert!(r.cores_intact(), "{:?}", r.core_splits);
}

#[test]
fn only_trivial_min_cuts_pass_vacuously() {
    let g = clique(6);
    let c = init_groups(6, &[(0..6).collect()]);
    let r = validate_min_cut_preservation(&g, &shave(&g, &c)).unwrap();
    assert_eq!(r.nontrivial_min_cuts, 0);
    assert!(r.cores_intact());
}

#[test]
fn build_is_deterministic() {
    let g = planted_cut(150, 4, 9).unwrap();
    let eps = eps_for(&g, g.min_degree() as f64);
    let a = build_msgc(&g, eps, &MsgcConfig::default(), &ChargeRegistry::default(), 5).unwrap();
    let b = build_msgc(&g, eps, &MsgcConfig::default(), &ChargeRegistry::default(), 5).unwrap();
    assert_eq!(a.clustering, b.clustering);
    assert_eq!(a.contracted, b.contracted);
    assert_eq!(a.transcript, b.transcript);
}

#[test]
fn weighted_input_is_rejected() {
    let g = Graph::<u64>::new(3, [(0, 1, 2), (1, 2, 1), (0, 2, 1)]).unwrap();
    assert!(build_msgc(&g, 0.2, &MsgcConfig::default(), &ChargeRegistry::default(), 0).is_err());
    assert!(build_msgc(&clique(5), 0.5, &MsgcConfig::default(), &ChargeRegistry::default(), 0).is_err());
}
