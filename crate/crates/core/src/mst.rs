//! Boruvka minimum spanning forest over distinct keys.

pub struct Dsu {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        match self.rank[a].cmp(&self.rank[b]) {
            std::cmp::Ordering::Less => self.parent[a] = b,
            std::cmp::Ordering::Greater => self.parent[b] = a,
            std::cmp::Ordering::Equal => {
                self.parent[b] = a;
                self.rank[a] += 1;
            }
        }
        true
    }
}

/// Minimum spanning forest of `edges = (u, v, key)` on `n` vertices. Keys
/// must be distinct. Returns indices into `edges` in selection order and the
/// number of Boruvka phases.
pub fn boruvka<K: Ord + Copy>(n: usize, edges: &[(usize, usize, K)]) -> (Vec<usize>, usize) {
    let mut dsu = Dsu::new(n);
    let mut chosen = Vec::new();
    let mut phases = 0;
    loop {
        let mut best: Vec<Option<usize>> = vec![None; n];
        for (i, &(u, v, k)) in edges.iter().enumerate() {
            let (a, b) = (dsu.find(u), dsu.find(v));
            if a == b {
                continue;
            }
            for c in [a, b] {
                if best[c].map_or(true, |j| k < edges[j].2) {
                    best[c] = Some(i);
                }
            }
        }
        let mut picked: Vec<usize> = best.into_iter().flatten().collect();
        if picked.is_empty() {
            break;
        }
        phases += 1;
        picked.sort_unstable();
        picked.dedup();
        for i in picked {
            if dsu.union(edges[i].0, edges[i].1) {
                chosen.push(i);
            }
        }
    }
    (chosen, phases)
}
