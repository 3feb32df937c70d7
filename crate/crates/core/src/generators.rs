//! Deterministic and seeded graph generators for tests and experiments.
//!
//! Same spec, same graph: the seeded families draw all randomness from a
//! ChaCha8 generator keyed by the spec's seed, so adjacency is identical
//! across runs. Every family except `cycle(3)` produces triangle-free
//! graphs (a 3-cycle is of course a triangle; callers probing triangle-free
//! claims should check [`Graph::is_triangle_free`]).

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Color, Error, Result};
use crate::graph::Graph;
use crate::instance::ListColoringInstance;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Star { delta: usize },
    Path { n: usize },
    Cycle { n: usize },
    Grid { rows: usize, cols: usize },
    CompleteBipartite { a: usize, b: usize },
    RandomBipartite { a: usize, b: usize, edges: usize, seed: u64 },
    RandomTriangleFree { n: usize, max_degree: usize, edges: usize, seed: u64 },
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Graph> {
        match *self {
            GeneratorSpec::Star { delta } => star(delta),
            GeneratorSpec::Path { n } => path(n),
            GeneratorSpec::Cycle { n } => cycle(n),
            GeneratorSpec::Grid { rows, cols } => grid(rows, cols),
            GeneratorSpec::CompleteBipartite { a, b } => complete_bipartite(a, b),
            GeneratorSpec::RandomBipartite { a, b, edges, seed } => {
                random_bipartite(a, b, edges, seed)
            }
            GeneratorSpec::RandomTriangleFree {
                n,
                max_degree,
                edges,
                seed,
            } => Ok(random_triangle_free(n, max_degree, edges, seed)),
        }
    }

    /// Parses compact command-line specs such as `star:3`, `path:5`,
    /// `grid:3x3`, `kbip:2x3`, `rbip:a=4,b=4,edges=6,seed=1`,
    /// `rtf:n=10,dmax=3,edges=15,seed=1`.
    pub fn parse(s: &str) -> Result<Self> {
        let (family, rest) = s.split_once(':').unwrap_or((s, ""));
        let bad = |msg: &str| Error::BadParams(format!("generator spec '{s}': {msg}"));
        let fields = parse_fields(rest);
        let get = |key: &str| fields.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
        let get_num = |key: &str| -> Result<usize> {
            get(key)
                .ok_or_else(|| bad(&format!("missing field '{key}'")))?
                .parse()
                .map_err(|_| bad(&format!("field '{key}' is not a number")))
        };
        match family {
            "star" => Ok(GeneratorSpec::Star {
                delta: single_number(rest, "d").ok_or_else(|| bad("expected star:<delta>"))?,
            }),
            "path" => Ok(GeneratorSpec::Path {
                n: single_number(rest, "n").ok_or_else(|| bad("expected path:<n>"))?,
            }),
            "cycle" => Ok(GeneratorSpec::Cycle {
                n: single_number(rest, "n").ok_or_else(|| bad("expected cycle:<n>"))?,
            }),
            "grid" => {
                let (r, c) = pair_number(rest, "r", "c").ok_or_else(|| bad("expected grid:RxC"))?;
                Ok(GeneratorSpec::Grid { rows: r, cols: c })
            }
            "kbip" => {
                let (a, b) = pair_number(rest, "a", "b").ok_or_else(|| bad("expected kbip:AxB"))?;
                Ok(GeneratorSpec::CompleteBipartite { a, b })
            }
            "rbip" => Ok(GeneratorSpec::RandomBipartite {
                a: get_num("a")?,
                b: get_num("b")?,
                edges: get_num("edges")?,
                seed: get_num("seed")? as u64,
            }),
            "rtf" => Ok(GeneratorSpec::RandomTriangleFree {
                n: get_num("n")?,
                max_degree: get_num("dmax")?,
                edges: get_num("edges")?,
                seed: get_num("seed")? as u64,
            }),
            other => Err(bad(&format!("unknown family '{other}'"))),
        }
    }
}

fn parse_fields(rest: &str) -> Vec<(String, &str)> {
    rest.split(',')
        .filter_map(|part| {
            part.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim()))
        })
        .collect()
}

/// Accepts either a bare number or `key=number`.
fn single_number(rest: &str, key: &str) -> Option<usize> {
    if let Ok(v) = rest.trim().parse() {
        return Some(v);
    }
    rest.split(',').find_map(|part| {
        let (k, v) = part.split_once('=')?;
        (k.trim() == key).then(|| v.trim().parse().ok()).flatten()
    })
}

/// Accepts `AxB` or `key1=A,key2=B`.
fn pair_number(rest: &str, k1: &str, k2: &str) -> Option<(usize, usize)> {
    if let Some((a, b)) = rest.split_once('x') {
        if let (Ok(a), Ok(b)) = (a.trim().parse(), b.trim().parse()) {
            return Some((a, b));
        }
    }
    let fields = parse_fields(rest);
    let get = |key: &str| {
        fields
            .iter()
            .find(|(k, _)| k == key)
            .and_then(|(_, v)| v.parse().ok())
    };
    Some((get(k1)?, get(k2)?))
}

/// Star with `delta` leaves: vertex 0 is the center.
pub fn star(delta: usize) -> Result<Graph> {
    if delta == 0 {
        return Err(Error::BadParams("star needs at least one leaf".into()));
    }
    let edges: Vec<(usize, usize)> = (1..=delta).map(|i| (0, i)).collect();
    Graph::from_edges(delta + 1, &edges)
}

pub fn path(n: usize) -> Result<Graph> {
    if n == 0 {
        return Err(Error::BadParams("path needs at least one vertex".into()));
    }
    let edges: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
    Graph::from_edges(n, &edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::BadParams("cycle needs at least three vertices".into()));
    }
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

/// The `rows x cols` lattice; bipartite, hence triangle-free.
pub fn grid(rows: usize, cols: usize) -> Result<Graph> {
    if rows == 0 || cols == 0 {
        return Err(Error::BadParams("grid needs positive dimensions".into()));
    }
    let idx = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push((idx(r, c), idx(r, c + 1)));
            }
            if r + 1 < rows {
                edges.push((idx(r, c), idx(r + 1, c)));
            }
        }
    }
    Graph::from_edges(rows * cols, &edges)
}

pub fn complete_bipartite(a: usize, b: usize) -> Result<Graph> {
    if a == 0 || b == 0 {
        return Err(Error::BadParams("bipartite sides must be nonempty".into()));
    }
    let mut edges = Vec::with_capacity(a * b);
    for i in 0..a {
        for j in 0..b {
            edges.push((i, a + j));
        }
    }
    Graph::from_edges(a + b, &edges)
}

/// `edges` edges drawn without replacement from the `a x b` bipartite
/// candidates; always triangle-free.
pub fn random_bipartite(a: usize, b: usize, edges: usize, seed: u64) -> Result<Graph> {
    if a == 0 || b == 0 {
        return Err(Error::BadParams("bipartite sides must be nonempty".into()));
    }
    let mut candidates: Vec<(usize, usize)> = (0..a)
        .flat_map(|i| (0..b).map(move |j| (i, a + j)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    candidates.shuffle(&mut rng);
    candidates.truncate(edges.min(a * b));
    Graph::from_edges(a + b, &candidates)
}

/// Greedy seeded construction: walk candidate vertex pairs in random order,
/// add an edge iff it keeps both endpoint degrees within `max_degree` and
/// closes no triangle, until `edge_target` edges or exhaustion. May return
/// fewer edges than the target; check [`Graph::edge_count`].
///
/// Small graphs shuffle the full pair list (guaranteed exhaustion); above
/// two million candidate pairs the pairs are rejection-sampled instead.
pub fn random_triangle_free(
    n: usize,
    max_degree: usize,
    edge_target: usize,
    seed: u64,
) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edges = Vec::new();
    let mut try_edge = |u: usize, v: usize, adj: &mut Vec<Vec<usize>>, edges: &mut Vec<(usize, usize)>| {
        if u == v
            || adj[u].len() >= max_degree
            || adj[v].len() >= max_degree
            || adj[u].contains(&v)
            || adj[u].iter().any(|w| adj[v].contains(w))
        {
            return;
        }
        adj[u].push(v);
        adj[v].push(u);
        edges.push((u, v));
    };
    let total_pairs = n.saturating_mul(n.saturating_sub(1)) / 2;
    if total_pairs <= 2_000_000 {
        let mut candidates: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
            .collect();
        candidates.shuffle(&mut rng);
        for (u, v) in candidates {
            if edges.len() >= edge_target {
                break;
            }
            try_edge(u, v, &mut adj, &mut edges);
        }
    } else {
        let mut tries = edge_target.saturating_mul(60);
        while edges.len() < edge_target && tries > 0 {
            tries -= 1;
            let u = (rng.next_u64() % n as u64) as usize;
            let v = (rng.next_u64() % n as u64) as usize;
            try_edge(u.min(v), u.max(v), &mut adj, &mut edges);
        }
    }
    Graph::from_edges(n, &edges).expect("greedy construction yields a simple graph")
}

/// Seeded random lists over `1..=q` with `|L(v)| >= max(floor(v), q - delta + deg(v))`,
/// the list-size floor of a `(delta, q)`-instance. `extra_floor` tightens the
/// minimum further (e.g. `deg(v) + 2` for chains that must be ergodic).
pub fn random_lists<R: RngCore>(
    graph: &Graph,
    q: u32,
    delta: u32,
    extra_floor: impl Fn(usize) -> usize,
    rng: &mut R,
) -> Result<Vec<Vec<Color>>> {
    let mut lists = Vec::with_capacity(graph.n());
    for v in 0..graph.n() {
        let deg = graph.degree(v);
        let dq_floor = (q as i64 - delta as i64 + deg as i64).max(1) as usize;
        let floor = dq_floor.max(extra_floor(v)).min(q as usize);
        let span = q as usize - floor;
        let size = floor + (rng.next_u64() as usize) % (span + 1);
        let mut palette: Vec<Color> = (1..=q).collect();
        palette.shuffle(rng);
        let mut list: Vec<Color> = palette.into_iter().take(size).collect();
        list.sort_unstable();
        lists.push(list);
    }
    Ok(lists)
}

/// Instance with full palettes over a generated graph.
pub fn full_palette_instance(spec: &GeneratorSpec, q: u32) -> Result<ListColoringInstance> {
    ListColoringInstance::full_palette(spec.build()?, q)
}
