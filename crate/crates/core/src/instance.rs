//! List-coloring instances, conditioning, and instance surgery.
//!
//! An instance is a graph together with a sorted list of allowed colors per
//! vertex, colors being integers in `1..=q`. Conditioning on a partial
//! coloring deletes the assigned vertices and strips their colors from the
//! neighbors' lists. The derivation `(G \ v, L_u^{ij})` removes `v` and
//! splits its neighborhood by the vertex order: earlier neighbors lose color
//! `i`, later ones lose `j`, and `u` itself keeps its list.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::error::{Color, Error, Result};
use crate::graph::{Graph, VertexMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ListColoringInstance {
    graph: Graph,
    lists: Vec<Vec<Color>>,
    q: u32,
}

impl ListColoringInstance {
    /// Validates and normalizes an instance. Lists are sorted and deduplicated.
    pub fn new(graph: Graph, lists: Vec<Vec<Color>>, q: u32) -> Result<Self> {
        if q == 0 {
            return Err(Error::BadParams("q must be at least 1".into()));
        }
        if lists.len() != graph.n() {
            return Err(Error::BadParams(format!(
                "got {} lists for {} vertices",
                lists.len(),
                graph.n()
            )));
        }
        let mut lists = lists;
        for (v, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            list.dedup();
            if list.is_empty() {
                return Err(Error::EmptyList(v));
            }
            for &c in list.iter() {
                if c == 0 || c > q {
                    return Err(Error::ColorOutOfRange {
                        vertex: v,
                        color: c,
                        q,
                    });
                }
            }
        }
        Ok(ListColoringInstance { graph, lists, q })
    }

    /// Builds an instance from an explicit edge list; the usual entry point.
    pub fn build(
        n: usize,
        edges: &[(usize, usize)],
        lists: Vec<Vec<Color>>,
        q: u32,
    ) -> Result<Self> {
        Self::new(Graph::from_edges(n, edges)?, lists, q)
    }

    /// The q-coloring special case: every list is the full palette `1..=q`.
    pub fn full_palette(graph: Graph, q: u32) -> Result<Self> {
        let full: Vec<Color> = (1..=q).collect();
        let n = graph.n();
        Self::new(graph, vec![full; n], q)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Sorted list of allowed colors at `v`.
    pub fn list(&self, v: usize) -> &[Color] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<Color>] {
        &self.lists
    }

    pub fn has_color(&self, v: usize, c: Color) -> bool {
        self.lists[v].binary_search(&c).is_ok()
    }

    /// Largest list size, the `Q` of the single-site mixing bound.
    pub fn max_list_len(&self) -> usize {
        self.lists.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True iff `|L(v)| >= deg(v) + 2` for all `v`: the standing condition
    /// that makes the Glauber dynamics irreducible.
    pub fn is_glauber_valid(&self) -> bool {
        (0..self.n()).all(|v| self.lists[v].len() >= self.graph.degree(v) + 2)
    }

    /// First vertex violating `|L(v)| >= deg(v) + 2`, if any.
    pub fn ergodicity_violation(&self) -> Option<usize> {
        (0..self.n()).find(|&v| self.lists[v].len() < self.graph.degree(v) + 2)
    }

    /// True iff `|L(v)| >= deg(v) + 1` for all `v`, which already guarantees
    /// satisfiability and strictly positive marginals.
    pub fn satisfiability_guaranteed(&self) -> bool {
        (0..self.n()).all(|v| self.lists[v].len() >= self.graph.degree(v) + 1)
    }

    /// Checks whether σ is a proper list-coloring of this instance.
    pub fn is_proper(&self, coloring: &[Color]) -> bool {
        if coloring.len() != self.n() {
            return false;
        }
        for v in 0..self.n() {
            if !self.has_color(v, coloring[v]) {
                return false;
            }
            for &w in self.graph.neighbors(v) {
                if coloring[w] == coloring[v] {
                    return false;
                }
            }
        }
        true
    }

    /// The conditioned instance `(G_tau, L_tau)`: delete the assigned
    /// vertices and remove each assigned color from the lists of unassigned
    /// neighbors.
    ///
    /// Fails with `NonExtendable` if the partial coloring violates an edge,
    /// uses a color outside a list, or empties some remaining list.
    pub fn condition(
        &self,
        partial: &PartialColoring,
    ) -> Result<(ListColoringInstance, VertexMap)> {
        for (&v, &c) in partial.iter() {
            if v >= self.n() {
                return Err(Error::VertexOutOfRange {
                    vertex: v,
                    n: self.n(),
                });
            }
            if !self.has_color(v, c) {
                return Err(Error::NonExtendable(format!(
                    "vertex {v} is assigned color {c} outside its list"
                )));
            }
            for &w in self.graph.neighbors(v) {
                if partial.get(w) == Some(c) {
                    return Err(Error::NonExtendable(format!(
                        "adjacent vertices {v} and {w} share color {c}"
                    )));
                }
            }
        }
        let keep: Vec<bool> = (0..self.n()).map(|v| !partial.contains(v)).collect();
        let (sub, map) = self.graph.induced_subgraph(&keep);
        let mut lists = Vec::with_capacity(sub.n());
        for new in 0..sub.n() {
            let old = map.old_of_new(new);
            let banned: Vec<Color> = self
                .graph
                .neighbors(old)
                .iter()
                .filter_map(|&w| partial.get(w))
                .collect();
            let list: Vec<Color> = self.lists[old]
                .iter()
                .copied()
                .filter(|c| !banned.contains(c))
                .collect();
            if list.is_empty() {
                return Err(Error::NonExtendable(format!(
                    "list of vertex {old} becomes empty"
                )));
            }
            lists.push(list);
        }
        let inst = ListColoringInstance::new(sub, lists, self.q)?;
        Ok((inst, map))
    }

    /// The derived instance `(G \ v, L_u^{ij})`: delete `v`; neighbors of `v`
    /// earlier than `u` lose color `i`, later ones lose `j`, and `u` itself
    /// is untouched. Comparisons use the labels of the original graph.
    pub fn derive(
        &self,
        v: usize,
        u: usize,
        i: Color,
        j: Color,
    ) -> Result<(ListColoringInstance, VertexMap)> {
        if v >= self.n() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n(),
            });
        }
        if !self.graph.has_edge(v, u) {
            return Err(Error::NotNeighbor { v, u });
        }
        for &c in &[i, j] {
            if !self.has_color(v, c) {
                return Err(Error::ColorNotInList { vertex: v, color: c });
            }
        }
        if i == j {
            return Err(Error::BadParams("derive requires i != j".into()));
        }
        let (sub, map) = self.graph.remove_vertex(v);
        let mut lists = Vec::with_capacity(sub.n());
        for new in 0..sub.n() {
            let old = map.old_of_new(new);
            let removed = if old != u && self.graph.has_edge(v, old) {
                Some(if old < u { i } else { j })
            } else {
                None
            };
            let list: Vec<Color> = self.lists[old]
                .iter()
                .copied()
                .filter(|&c| Some(c) != removed)
                .collect();
            if list.is_empty() {
                return Err(Error::EmptyList(old));
            }
            lists.push(list);
        }
        let inst = ListColoringInstance::new(sub, lists, self.q)?;
        Ok((inst, map))
    }

    /// Relabels the instance by a vertex permutation; used to test that
    /// influence quantities do not depend on the chosen order.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let graph = self.graph.relabel(perm);
        let mut lists = vec![Vec::new(); self.n()];
        for old in 0..self.n() {
            lists[perm[old]] = self.lists[old].clone();
        }
        ListColoringInstance::new(graph, lists, self.q)
    }
}

/// True iff `inst` is a `(delta, q)`-list-coloring instance: max degree at
/// most `delta`, all lists inside `1..=q`, and `|L(v)| >= q - delta + deg(v)`
/// for every vertex.
pub fn is_delta_q_instance(inst: &ListColoringInstance, delta: u32, q: u32) -> Result<bool> {
    if delta < 3 || q < delta + 2 {
        return Err(Error::BadParams(format!(
            "(delta, q) = ({delta}, {q}) requires delta >= 3 and q >= delta + 2"
        )));
    }
    if inst.graph().max_degree() as u32 > delta {
        return Ok(false);
    }
    if inst.q() > q {
        // lists range over 1..=inst.q; they still might fit in [q]
        if inst.lists().iter().flatten().any(|&c| c > q) {
            return Ok(false);
        }
    }
    Ok((0..inst.n()).all(|v| {
        inst.list(v).len() as i64 >= q as i64 - delta as i64 + inst.graph().degree(v) as i64
    }))
}

/// An assignment of colors to a subset of the vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PartialColoring {
    assignments: BTreeMap<usize, Color>,
}

impl PartialColoring {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: &[(usize, Color)]) -> Self {
        PartialColoring {
            assignments: pairs.iter().copied().collect(),
        }
    }

    pub fn insert(&mut self, v: usize, c: Color) {
        self.assignments.insert(v, c);
    }

    pub fn get(&self, v: usize) -> Option<Color> {
        self.assignments.get(&v).copied()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.assignments.contains_key(&v)
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &Color)> {
        self.assignments.iter()
    }

    /// Union of two partial colorings; fails on conflicting assignments.
    pub fn union(&self, other: &PartialColoring) -> Result<PartialColoring> {
        let mut out = self.clone();
        for (&v, &c) in other.iter() {
            if let Some(prev) = out.get(v) {
                if prev != c {
                    return Err(Error::BadParams(format!(
                        "conflicting assignments at vertex {v}: {prev} vs {c}"
                    )));
                }
            }
            out.insert(v, c);
        }
        Ok(out)
    }
}

/// Several list assignments over one shared graph.
#[derive(Debug, Clone)]
pub struct InstanceCollection {
    graph: Graph,
    q: u32,
    lists_family: Vec<Vec<Vec<Color>>>,
}

impl InstanceCollection {
    pub fn singleton(inst: &ListColoringInstance) -> Self {
        InstanceCollection {
            graph: inst.graph().clone(),
            q: inst.q(),
            lists_family: vec![inst.lists().to_vec()],
        }
    }

    pub fn from_instances(instances: &[ListColoringInstance]) -> Result<Self> {
        let first = instances
            .first()
            .ok_or_else(|| Error::BadParams("empty collection".into()))?;
        for inst in instances.iter().skip(1) {
            if inst.graph() != first.graph() || inst.q() != first.q() {
                return Err(Error::BadParams(
                    "collection members must share the same graph and palette".into(),
                ));
            }
        }
        Ok(InstanceCollection {
            graph: first.graph().clone(),
            q: first.q(),
            lists_family: instances.iter().map(|i| i.lists().to_vec()).collect(),
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.lists_family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists_family.is_empty()
    }

    pub fn member(&self, idx: usize) -> ListColoringInstance {
        ListColoringInstance::new(self.graph.clone(), self.lists_family[idx].clone(), self.q)
            .expect("collection members are validated on construction")
    }

    pub fn members(&self) -> impl Iterator<Item = ListColoringInstance> + '_ {
        (0..self.len()).map(|i| self.member(i))
    }

    /// The derived collection at `v`: every `L_u^{ij}` for every member `L`,
    /// neighbor `u` of `v`, and ordered color pair `i != j` from `L(v)`.
    ///
    /// Identical derived list-families are deduplicated; influence maxima
    /// over the collection are unaffected by duplicates.
    pub fn derive(&self, v: usize) -> Result<(InstanceCollection, VertexMap)> {
        self.derive_with_dedup(v, true)
    }

    pub fn derive_with_dedup(
        &self,
        v: usize,
        dedup: bool,
    ) -> Result<(InstanceCollection, VertexMap)> {
        if self.graph.degree(v) == 0 {
            return Err(Error::IsolatedVertex(v));
        }
        let mut family = Vec::new();
        let mut seen: HashSet<Vec<Vec<Color>>> = HashSet::new();
        let mut map = None;
        for lists in &self.lists_family {
            let member =
                ListColoringInstance::new(self.graph.clone(), lists.clone(), self.q)?;
            for &u in self.graph.neighbors(v) {
                for &i in member.list(v) {
                    for &j in member.list(v) {
                        if i == j {
                            continue;
                        }
                        let (derived, m) = member.derive(v, u, i, j)?;
                        if map.is_none() {
                            map = Some(m);
                        }
                        let dl = derived.lists().to_vec();
                        if !dedup || seen.insert(dl.clone()) {
                            family.push(dl);
                        }
                    }
                }
            }
        }
        let (sub, fallback_map) = self.graph.remove_vertex(v);
        Ok((
            InstanceCollection {
                graph: sub,
                q: self.q,
                lists_family: family,
            },
            map.unwrap_or(fallback_map),
        ))
    }
}

/// Ordered index of the vertex-color pair set `U`: all `(v, c)` with
/// `c` in `L(v)`, sorted by vertex then color.
#[derive(Debug, Clone)]
pub struct PairIndex {
    pairs: Vec<(usize, Color)>,
    offsets: Vec<usize>,
    pos: Vec<Vec<Option<usize>>>,
}

impl PairIndex {
    pub fn new(inst: &ListColoringInstance) -> Self {
        let n = inst.n();
        let q = inst.q() as usize;
        let mut pairs = Vec::new();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut pos = vec![vec![None; q]; n];
        for v in 0..n {
            offsets.push(pairs.len());
            for &c in inst.list(v) {
                pos[v][(c - 1) as usize] = Some(pairs.len());
                pairs.push((v, c));
            }
        }
        offsets.push(pairs.len());
        PairIndex {
            pairs,
            offsets,
            pos,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, idx: usize) -> (usize, Color) {
        self.pairs[idx]
    }

    pub fn pairs(&self) -> &[(usize, Color)] {
        &self.pairs
    }

    /// Index of `(v, c)`, or `None` when `c` is not in `L(v)` (the
    /// zero-extension convention lives on top of this lookup).
    pub fn index_of(&self, v: usize, c: Color) -> Option<usize> {
        if c == 0 {
            return None;
        }
        self.pos
            .get(v)
            .and_then(|row| row.get((c - 1) as usize))
            .copied()
            .flatten()
    }

    /// Half-open range of indices whose vertex is `v`.
    pub fn vertex_range(&self, v: usize) -> std::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }
}
