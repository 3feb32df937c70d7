//! Instance file formats.
//!
//! The JSON format is
//! `{"n": 3, "q": 4, "edges": [[0,1],[1,2]], "lists": [[1,2,3],[1,2,3,4],[2,4]]}`
//! with 0-based vertices and 1-based colors; `lists` may be omitted for
//! full palettes. A bare edge-list text format (`u v` per line, `#`
//! comments) is also accepted and implies full palettes, with `q` supplied
//! by the caller.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Color, Error, Result};
use crate::instance::ListColoringInstance;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub q: u32,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lists: Option<Vec<Vec<Color>>>,
}

impl InstanceJson {
    pub fn from_instance(inst: &ListColoringInstance) -> Self {
        InstanceJson {
            n: inst.n(),
            q: inst.q(),
            edges: inst.graph().edges(),
            lists: Some(inst.lists().to_vec()),
        }
    }

    pub fn into_instance(self) -> Result<ListColoringInstance> {
        let lists = match self.lists {
            Some(lists) => lists,
            None => vec![(1..=self.q).collect(); self.n],
        };
        ListColoringInstance::build(self.n, &self.edges, lists, self.q)
    }
}

pub fn to_json_string(inst: &ListColoringInstance) -> String {
    serde_json::to_string_pretty(&InstanceJson::from_instance(inst))
        .expect("instance serialization cannot fail")
}

pub fn from_json_str(s: &str) -> Result<ListColoringInstance> {
    let parsed: InstanceJson =
        serde_json::from_str(s).map_err(|e| Error::InvalidInstance(e.to_string()))?;
    parsed.into_instance()
}

/// Edge-list text: one `u v` pair per line; blank lines and `#` comments
/// ignored; vertex count inferred from the largest endpoint.
pub fn from_edge_list_str(s: &str, q: u32) -> Result<ListColoringInstance> {
    let mut edges = Vec::new();
    let mut max_v = 0usize;
    for (lineno, line) in s.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.ok_or_else(|| {
                Error::InvalidInstance(format!("line {}: expected 'u v'", lineno + 1))
            })?
            .parse()
            .map_err(|_| Error::InvalidInstance(format!("line {}: not a vertex id", lineno + 1)))
        };
        let u = parse(parts.next())?;
        let v = parse(parts.next())?;
        if parts.next().is_some() {
            return Err(Error::InvalidInstance(format!(
                "line {}: trailing tokens",
                lineno + 1
            )));
        }
        max_v = max_v.max(u).max(v);
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(Error::InvalidInstance("no edges in edge-list input".into()));
    }
    let n = max_v + 1;
    let lists = vec![(1..=q).collect(); n];
    ListColoringInstance::build(n, &edges, lists, q)
}

/// Loads an instance from a path: `.json` files use the JSON schema, any
/// other extension is treated as an edge list (requiring `q`).
pub fn load_instance(path: &Path, q_for_edge_list: Option<u32>) -> Result<ListColoringInstance> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInstance(format!("{}: {e}", path.display())))?;
    let looks_json = path.extension().is_some_and(|e| e == "json")
        || content.trim_start().starts_with('{');
    if looks_json {
        from_json_str(&content)
    } else {
        let q = q_for_edge_list.ok_or_else(|| {
            Error::InvalidInstance("edge-list input needs a palette size (--q)".into())
        })?;
        from_edge_list_str(&content, q)
    }
}
