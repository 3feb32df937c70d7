//! Simple undirected graphs with index-ordered vertices.
//!
//! Vertices are `0..n-1` and the total vertex order used by instance
//! surgery (the split of a neighborhood into earlier and later vertices)
//! is the index order. Neighbor lists are kept sorted ascending so that
//! every traversal is deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph on vertices `0..n-1` from an edge list.
    ///
    /// Rejects self-loops, duplicate edges, and endpoints outside range.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            for &x in &[u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if adj[u].contains(&v) {
                return Err(Error::DuplicateEdge(u, v));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { adj })
    }

    pub fn edgeless(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Neighbors of `v`, sorted ascending.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// All edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// True iff the graph contains no 3-cycle.
    ///
    /// Neighbor-intersection scan over sorted lists, O(sum_v deg(v)^2).
    pub fn is_triangle_free(&self) -> bool {
        for u in 0..self.n() {
            for &v in &self.adj[u] {
                if v <= u {
                    continue;
                }
                // sorted-merge intersection of N(u) and N(v)
                let (mut i, mut j) = (0, 0);
                let (a, b) = (&self.adj[u], &self.adj[v]);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => return false,
                    }
                }
            }
        }
        true
    }

    /// Induced subgraph on the vertices with `keep[v] == true`.
    ///
    /// Surviving vertices are renumbered monotonically, which preserves the
    /// index order relation between them.
    pub fn induced_subgraph(&self, keep: &[bool]) -> (Graph, VertexMap) {
        assert_eq!(keep.len(), self.n());
        let map = VertexMap::from_keep(keep);
        let mut adj = vec![Vec::new(); map.new_len()];
        for old in 0..self.n() {
            if let Some(new) = map.new_of_old(old) {
                adj[new] = self.adj[old]
                    .iter()
                    .filter_map(|&w| map.new_of_old(w))
                    .collect();
            }
        }
        (Graph { adj }, map)
    }

    pub fn remove_vertex(&self, v: usize) -> (Graph, VertexMap) {
        let mut keep = vec![true; self.n()];
        keep[v] = false;
        self.induced_subgraph(&keep)
    }

    /// Relabels vertices by the permutation `perm` (new label of old `v` is
    /// `perm[v]`). Used by order-invariance tests.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut adj = vec![Vec::new(); self.n()];
        for old in 0..self.n() {
            let mut list: Vec<usize> = self.adj[old].iter().map(|&w| perm[w]).collect();
            list.sort_unstable();
            adj[perm[old]] = list;
        }
        Graph { adj }
    }
}

/// Monotone renumbering produced by vertex deletion.
#[derive(Debug, Clone)]
pub struct VertexMap {
    old_of_new: Vec<usize>,
    new_of_old: Vec<Option<usize>>,
}

impl VertexMap {
    fn from_keep(keep: &[bool]) -> Self {
        let mut old_of_new = Vec::new();
        let mut new_of_old = vec![None; keep.len()];
        for (old, &k) in keep.iter().enumerate() {
            if k {
                new_of_old[old] = Some(old_of_new.len());
                old_of_new.push(old);
            }
        }
        VertexMap {
            old_of_new,
            new_of_old,
        }
    }

    pub fn identity(n: usize) -> Self {
        VertexMap {
            old_of_new: (0..n).collect(),
            new_of_old: (0..n).map(Some).collect(),
        }
    }

    pub fn new_len(&self) -> usize {
        self.old_of_new.len()
    }

    pub fn new_of_old(&self, old: usize) -> Option<usize> {
        self.new_of_old.get(old).copied().flatten()
    }

    pub fn old_of_new(&self, new: usize) -> usize {
        self.old_of_new[new]
    }
}
