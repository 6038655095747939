use congestcut::graph::{Graph, VertexSet};
use congestcut::oracle::*;

/// Minimum over every bipartition, by direct scan.
fn brute_lambda(g: &Graph<u64>) -> u64 {
    let n = g.n();
    (1u32..(1 << (n - 1)))
        .map(|mask| {
            let s = VertexSet::from_mask((0..n).map(|v| v < n - 1 && mask >> v & 1 == 1).collect());
            g.edges().iter().filter(|e| s.contains(e.u) != s.contains(e.v)).map(|e| e.w).sum()
        })
        .min()
        .unwrap()
}

#[test]
fn stoer_wagner_examples() {
    assert_eq!(stoer_wagner(&clique(4)).unwrap().value, 3);
    let tri = Graph::<u64>::new(3, [(0, 1, 1), (1, 2, 2), (0, 2, 3)]).unwrap();
    let c = stoer_wagner(&tri).unwrap();
    assert_eq!(c.value, 3);
    assert_eq!(brute_lambda(&tri), 3);
    assert_eq!(stoer_wagner(&barbell(6, 1).unwrap()).unwrap().value, 1);
}

#[test]
fn stoer_wagner_reports_its_cut() {
    for seed in 0..10 {
        let g = with_random_weights(&gnp_connected(30, 0.2, seed), 50, seed);
        let c = stoer_wagner(&g).unwrap();
        assert_eq!(g.cut_weight(&c.set(30)).unwrap(), c.value);
    }
}

#[test]
fn disconnected_gives_zero() {
    let g = Graph::<u64>::unweighted(5, [(0, 1), (1, 2), (3, 4)]).unwrap();
    let c = stoer_wagner(&g).unwrap();
    assert_eq!(c.value, 0);
    assert_eq!(c.side, vec![0, 1, 2]);
}

#[test]
fn enumeration_examples() {
    let c5 = enumerate_min_cuts(&cycle(5)).unwrap();
    assert_eq!(c5.len(), 5 * 4 / 2);
    let k4 = enumerate_min_cuts(&clique(4)).unwrap();
    assert_eq!(k4.len(), 4);
    assert!(k4.iter().all(|c| c.value == 3 && (c.side.len() == 1 || c.side.len() == 3)));
    let p4 = enumerate_min_cuts(&path(4)).unwrap();
    assert_eq!(p4.len(), 3);
    assert!(enumerate_min_cuts(&cycle(21)).is_err());
}

#[test]
fn oracles_agree_on_small_graphs() {
    for seed in 0..40 {
        let n = 5 + seed as usize % 12;
        let g = with_random_weights(&gnp_connected(n, 0.35, seed), 9, seed);
        let sw = stoer_wagner(&g).unwrap().value;
        let en = enumerate_min_cuts(&g).unwrap();
        assert_eq!(sw, en[0].value, "seed {seed}");
        assert_eq!(sw, brute_lambda(&g));
        assert!(en.iter().all(|c| g.cut_weight(&c.set(n)).unwrap() == sw));
    }
}

#[test]
fn generator_examples() {
    assert_eq!(stoer_wagner(&barbell(8, 3).unwrap()).unwrap().value, 3);
    assert_eq!(stoer_wagner(&cycle(7)).unwrap().value, 2);
    assert_eq!(stoer_wagner(&planted_cut(40, 5, 1).unwrap()).unwrap().value, 5);
    assert!(barbell(3, 4).is_err());
    assert!(planted_cut(6, 5, 0).is_err());
}

#[test]
fn planted_cut_structure() {
    for seed in 0..10 {
        for k in [1, 3, 7] {
            let g = planted_cut(60, k, seed).unwrap();
            let crossing = g.edges().iter().filter(|e| (e.u < 30) != (e.v < 30)).count();
            assert_eq!(crossing, k);
            assert!(g.min_degree() > k);
            assert_eq!(stoer_wagner(&g).unwrap().value, k as u64);
        }
    }
}

#[test]
fn generators_are_deterministic() {
    assert_eq!(gnp(50, 0.1, 3), gnp(50, 0.1, 3));
    assert_eq!(planted_cut(50, 3, 9).unwrap(), planted_cut(50, 3, 9).unwrap());
    assert_eq!(gnp_connected(50, 0.02, 1), gnp_connected(50, 0.02, 1));
    assert!(gnp_connected(50, 0.02, 1).is_connected());
    let g = gnp(20, 0.5, 1);
    assert_eq!(with_random_weights(&g, 7, 2), with_random_weights(&g, 7, 2));
    assert!(with_random_weights(&g, 7, 2).edges().iter().all(|e| (1..=7).contains(&e.w)));
}
