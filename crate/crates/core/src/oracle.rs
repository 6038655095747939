//! Sequential reference solvers and instance generators.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::charge::{Charge, ChargeInputs, ChargeRegistry};
use crate::error::{Error, Result};
use crate::graph::{CutResult, Graph, VertexSet};
use crate::rng::seeded;
use crate::scalar::Weight;

/// Global minimum cut by Stoer-Wagner. A disconnected graph yields 0 with a
/// component as the side.
pub fn stoer_wagner<W: Weight>(g: &Graph<W>) -> Result<CutResult<W>> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Precondition("minimum cut needs at least two vertices".into()));
    }
    let comps = g.connected_components(|_| true);
    if comps.len() != 1 || comps[0].len() != n {
        let side = match comps.first() {
            Some(c) => VertexSet::from_slice(n, c),
            None => VertexSet::from_slice(n, &[0]),
        };
        return CutResult::from_set(g, &side);
    }
    let mut w = vec![vec![0u128; n]; n];
    for e in g.edges() {
        w[e.u][e.v] += e.w.to_u128();
        w[e.v][e.u] += e.w.to_u128();
    }
    // groups[i] holds the original vertices merged into super-vertex i
    let mut groups: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = u128::MAX;
    let mut best_side = Vec::new();
    let mut key = vec![0u128; n];
    let mut added = vec![false; n];
    while alive.len() > 1 {
        for &v in &alive {
            key[v] = 0;
            added[v] = false;
        }
        let mut prev = alive[0];
        let mut last = alive[0];
        for step in 0..alive.len() {
            let mut pick = usize::MAX;
            for &v in &alive {
                if !added[v] && (pick == usize::MAX || key[v] > key[pick]) {
                    pick = v;
                }
            }
            added[pick] = true;
            if step == alive.len() - 1 {
                if key[pick] < best {
                    best = key[pick];
                    best_side = groups[pick].clone();
                }
                last = pick;
            } else {
                prev = pick;
            }
            for &v in &alive {
                if !added[v] {
                    key[v] += w[pick][v];
                }
            }
        }
        let moved = std::mem::take(&mut groups[last]);
        groups[prev].extend(moved);
        for &v in &alive {
            let x = w[last][v];
            w[prev][v] += x;
            w[v][prev] = w[prev][v];
        }
        w[prev][prev] = 0;
        alive.retain(|&v| v != last);
    }
    let cut = CutResult::from_set(g, &VertexSet::from_slice(n, &best_side))?;
    debug_assert_eq!(cut.value.to_u128(), best);
    Ok(cut)
}

/// Every minimum cut, each listed once by its side containing vertex 0.
pub fn enumerate_min_cuts<W: Weight>(g: &Graph<W>) -> Result<Vec<CutResult<W>>> {
    const LIMIT: usize = 20;
    let n = g.n();
    if n > LIMIT {
        return Err(Error::Capacity { what: "min cut enumeration", limit: LIMIT, got: n });
    }
    if n < 2 {
        return Err(Error::Precondition("minimum cut needs at least two vertices".into()));
    }
    // Gray code over vertices 1..n; vertex 0 stays on the counted side's complement
    let mut inside = vec![false; n];
    let mut value: i128 = 0;
    let mut best = i128::MAX;
    let mut masks: Vec<u32> = Vec::new();
    let mut mask: u32 = 0;
    for i in 1u32..(1u32 << (n - 1)) {
        let v = i.trailing_zeros() as usize + 1;
        for &(y, e) in g.adj(v) {
            let w = g.edge(e).w.to_u128() as i128;
            if inside[y] == inside[v] {
                value += w;
            } else {
                value -= w;
            }
        }
        inside[v] = !inside[v];
        mask ^= 1 << (v - 1);
        if value < best {
            best = value;
            masks.clear();
        }
        if value == best {
            masks.push(mask);
        }
    }
    masks
        .into_iter()
        .map(|mk| {
            let side: Vec<usize> = (1..n).filter(|&v| mk >> (v - 1) & 1 == 1).collect();
            CutResult::from_set(g, &VertexSet::from_slice(n, &side))
        })
        .collect()
}

/// Stand-in for the distributed approximate edge-connectivity routine: the
/// exact value (a valid `(1 + eps)`-approximation) with its round charge.
pub fn lambda_estimate<W: Weight>(
    g: &Graph<W>,
    eps: f64,
    diameter: usize,
    registry: &ChargeRegistry,
) -> Result<(u64, Charge)> {
    let lambda = stoer_wagner(g)?.value.to_u128() as u64;
    let charge = registry.charge(
        "lambda_estimate",
        ChargeInputs { n: g.n() as f64, d: diameter as f64, eps, ..Default::default() },
    )?;
    Ok((lambda, charge))
}

pub fn cycle(n: usize) -> Graph<u64> {
    Graph::unweighted(n, (0..n).map(|i| (i, (i + 1) % n))).expect("n >= 3")
}

pub fn path(n: usize) -> Graph<u64> {
    Graph::unweighted(n, (1..n).map(|i| (i - 1, i))).expect("path")
}

pub fn clique(n: usize) -> Graph<u64> {
    Graph::unweighted(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("clique")
}

pub fn star(n: usize) -> Graph<u64> {
    Graph::unweighted(n, (1..n).map(|i| (0, i))).expect("star")
}

pub fn grid(rows: usize, cols: usize) -> Graph<u64> {
    let id = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
        }
    }
    Graph::unweighted(rows * cols, edges).expect("grid")
}

/// Erdos-Renyi G(n, p).
pub fn gnp(n: usize, p: f64, seed: u64) -> Graph<u64> {
    let mut rng = seeded(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(p) {
                edges.push((i, j));
            }
        }
    }
    Graph::unweighted(n, edges).expect("gnp")
}

/// G(n, p) with one extra edge between consecutive components, so the result is connected.
pub fn gnp_connected(n: usize, p: f64, seed: u64) -> Graph<u64> {
    let g = gnp(n, p, seed);
    let mut rep = vec![usize::MAX; n];
    for (i, c) in g.connected_components(|_| true).iter().enumerate() {
        for &v in c {
            rep[v] = i;
        }
    }
    let mut heads: Vec<usize> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for v in 0..n {
        let key = if rep[v] == usize::MAX { n + v } else { rep[v] };
        if seen.insert(key) {
            heads.push(v);
        }
    }
    let mut edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    edges.extend(heads.windows(2).map(|w| (w[0], w[1])));
    Graph::unweighted(n, edges).expect("connected gnp")
}

/// Two cliques on `0..s` and `s..2s`, joined by bridges `(i, s + i)`.
pub fn barbell(clique_size: usize, bridge_count: usize) -> Result<Graph<u64>> {
    let s = clique_size;
    if bridge_count > s || s < 2 {
        return Err(Error::Precondition(format!("barbell needs 2 <= clique size and bridges <= {s}")));
    }
    let mut edges = Vec::new();
    for off in [0, s] {
        for i in 0..s {
            for j in i + 1..s {
                edges.push((off + i, off + j));
            }
        }
    }
    edges.extend((0..bridge_count).map(|i| (i, s + i)));
    Graph::unweighted(2 * s, edges)
}

/// Two halves, each a circulant of degree at least `k + 2` plus random chords,
/// joined by exactly `k` bridges on distinct endpoints. Minimum cut is `k`.
pub fn planted_cut(n: usize, k: usize, seed: u64) -> Result<Graph<u64>> {
    let h1 = n / 2;
    let h2 = n - h1;
    let r = (k + 2).div_ceil(2);
    if h1 < 2 * r + 1 || k > h1 || k == 0 {
        return Err(Error::Precondition(format!("planted_cut({n}, {k}) needs halves of at least {}", 2 * r + 1)));
    }
    let mut rng = seeded(seed);
    let mut edges = std::collections::BTreeSet::new();
    for (off, h) in [(0, h1), (h1, h2)] {
        for i in 0..h {
            for d in 1..=r {
                let j = (i + d) % h;
                edges.insert(((off + i).min(off + j), (off + i).max(off + j)));
            }
        }
        let extra = 2.0 * r as f64 / h as f64;
        for i in 0..h {
            for j in i + 1..h {
                if rng.gen_bool(extra.min(1.0)) {
                    edges.insert((off + i, off + j));
                }
            }
        }
    }
    let mut left: Vec<usize> = (0..h1).collect();
    let mut right: Vec<usize> = (h1..n).collect();
    left.shuffle(&mut rng);
    right.shuffle(&mut rng);
    for i in 0..k {
        edges.insert((left[i], right[i]));
    }
    Graph::unweighted(n, edges)
}

/// Same structure with weights drawn uniformly from `1..=max_w`.
pub fn with_random_weights(g: &Graph<u64>, max_w: u64, seed: u64) -> Graph<u64> {
    let mut rng = seeded(seed);
    Graph::new(g.n(), g.edges().iter().map(|e| (e.u, e.v, rng.gen_range(1..=max_w)))).expect("reweighted")
}
