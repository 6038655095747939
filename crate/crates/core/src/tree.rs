//! Rooted trees over a subset of a graph's vertices.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Weight;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    root: usize,
    parent: Vec<Option<usize>>,
    parent_edge: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    level: Vec<usize>,
    member: Vec<bool>,
    // members in BFS order from the root
    order: Vec<usize>,
    // preorder interval, for O(1) ancestor tests
    tin: Vec<usize>,
    tout: Vec<usize>,
}

impl RootedTree {
    /// `member[v]` marks the tree's vertices; every member other than the root
    /// needs a parent that is a member.
    pub fn from_parents(
        root: usize,
        parent: Vec<Option<usize>>,
        parent_edge: Vec<Option<usize>>,
        member: Vec<bool>,
    ) -> Result<Self> {
        let n = parent.len();
        if root >= n || !member[root] || parent[root].is_some() {
            return Err(Error::InvalidGraph("bad tree root".into()));
        }
        let mut children = vec![Vec::new(); n];
        for v in 0..n {
            if !member[v] || v == root {
                continue;
            }
            match parent[v] {
                Some(p) if member[p] => children[p].push(v),
                _ => return Err(Error::InvalidGraph(format!("tree vertex {v} has no member parent"))),
            }
        }
        let mut level = vec![0; n];
        let mut order = vec![root];
        let mut i = 0;
        while i < order.len() {
            let x = order[i];
            i += 1;
            for &c in &children[x] {
                level[c] = level[x] + 1;
                order.push(c);
            }
        }
        let count = member.iter().filter(|&&b| b).count();
        if order.len() != count {
            return Err(Error::InvalidGraph("parent pointers contain a cycle".into()));
        }
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        let mut clock = 0;
        let mut stack = vec![(root, 0usize)];
        tin[root] = clock;
        clock += 1;
        while let Some(&mut (x, ref mut next)) = stack.last_mut() {
            if *next < children[x].len() {
                let c = children[x][*next];
                *next += 1;
                tin[c] = clock;
                clock += 1;
                stack.push((c, 0));
            } else {
                tout[x] = clock;
                stack.pop();
            }
        }
        Ok(RootedTree { root, parent, parent_edge, children, level, member, order, tin, tout })
    }

    /// Tree spanning the component of `root` in the subgraph formed by `edge_ids`.
    /// Errors if those edges contain a cycle within that component.
    pub fn from_edges<W: Weight>(g: &Graph<W>, root: usize, edge_ids: &[usize]) -> Result<Self> {
        let n = g.n();
        let mut adj = vec![Vec::new(); n];
        for &e in edge_ids {
            let ed = g.edge(e);
            adj[ed.u].push((ed.v, e));
            adj[ed.v].push((ed.u, e));
        }
        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        let mut used = 0;
        while let Some(x) = q.pop_front() {
            for &(y, e) in &adj[x] {
                if Some(e) == parent_edge[x] {
                    continue;
                }
                if seen[y] {
                    return Err(Error::InvalidGraph(format!("tree edges contain a cycle through edge {e}")));
                }
                seen[y] = true;
                parent[y] = Some(x);
                parent_edge[y] = Some(e);
                used += 1;
                q.push_back(y);
            }
        }
        debug_assert!(used < n);
        Self::from_parents(root, parent, parent_edge, seen)
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Size of the underlying id space.
    pub fn universe(&self) -> usize {
        self.parent.len()
    }

    pub fn size(&self) -> usize {
        self.order.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.member[v]
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v].filter(|_| self.member[v])
    }

    pub fn parent_edge(&self, v: usize) -> Option<usize> {
        self.parent_edge[v].filter(|_| self.member[v])
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn level(&self, v: usize) -> usize {
        self.level[v]
    }

    pub fn depth(&self) -> usize {
        self.order.iter().map(|&v| self.level[v]).max().unwrap_or(0)
    }

    /// Members in BFS order; reversed, this is a valid bottom-up order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// True when `a` is `x` or an ancestor of `x`.
    pub fn is_ancestor(&self, a: usize, x: usize) -> bool {
        self.member[a] && self.member[x] && self.tin[a] <= self.tin[x] && self.tin[x] < self.tout[a]
    }

    /// `x` first, then its ancestors up to the root.
    pub fn ancestors(&self, x: usize) -> Vec<usize> {
        let mut out = vec![x];
        let mut cur = x;
        while let Some(p) = self.parent[cur] {
            out.push(p);
            cur = p;
        }
        out
    }

    pub fn descendants(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            i += 1;
            out.extend_from_slice(&self.children[x]);
        }
        out
    }

    pub fn subtree_size(&self, v: usize) -> usize {
        let t = self.tout[v] - self.tin[v];
        if self.member[v] {
            t
        } else {
            0
        }
    }

    /// Edge ids of the tree.
    pub fn edges(&self) -> Vec<usize> {
        self.order.iter().filter_map(|&v| self.parent_edge[v]).collect()
    }
}
