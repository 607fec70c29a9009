use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use rand::Rng;

use crate::{Error, Result, SimRng};

/// Undirected simple graph with dense node ids, stored as CSR adjacency.
///
/// The edge list is kept in insertion order so that [`emit_edge_list`]
/// reproduces the same id assignment on reload.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    node_count: usize,
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds a graph from edges over `0..node_count`. Self-loops, duplicate
    /// edges and out-of-range ids are rejected.
    pub fn from_edges(node_count: usize, edges: Vec<(u32, u32)>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::EmptyGraph);
        }
        if node_count > u32::MAX as usize {
            return Err(Error::domain("too many nodes"));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut degree = vec![0usize; node_count];
        for &(u, v) in &edges {
            if u as usize >= node_count || v as usize >= node_count {
                return Err(Error::domain(format!(
                    "edge ({u}, {v}) out of range for {node_count} nodes"
                )));
            }
            if u == v {
                return Err(Error::domain(format!("self-loop at node {u}")));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(Error::domain(format!("duplicate edge ({u}, {v})")));
            }
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..node_count].to_vec();
        let mut neighbors = vec![0u32; offsets[node_count]];
        for &(u, v) in &edges {
            neighbors[fill[u as usize]] = v;
            fill[u as usize] += 1;
            neighbors[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        Ok(Self {
            node_count,
            offsets,
            neighbors,
            edges,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    #[inline]
    pub fn neighbors(&self, node: usize) -> &[u32] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }
}

/// A parsed edge list together with what ingestion discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub dropped_self_loops: usize,
    pub dropped_duplicates: usize,
    /// Original id of each dense node id.
    pub original_ids: Vec<u64>,
}

/// Parses a whitespace- or comma-separated edge list.
///
/// Lines starting with `#` and blank lines are skipped; tokens after the first
/// two are ignored. Node ids are remapped densely in first-appearance order.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph> {
    let mut ids: HashMap<u64, u32> = HashMap::new();
    let mut original_ids = Vec::new();
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    let (mut self_loops, mut duplicates) = (0, 0);

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut tokens = trimmed
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty());
        let mut endpoint = || -> Result<u64> {
            let token = tokens.next().ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two node ids".to_string(),
            })?;
            token.parse::<u64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("invalid node id {token:?}"),
            })
        };
        let (a, b) = (endpoint()?, endpoint()?);
        let mut intern = |raw: u64| -> u32 {
            *ids.entry(raw).or_insert_with(|| {
                original_ids.push(raw);
                (original_ids.len() - 1) as u32
            })
        };
        let (u, v) = (intern(a), intern(b));
        if u == v {
            self_loops += 1;
        } else if !seen.insert((u.min(v), u.max(v))) {
            duplicates += 1;
        } else {
            edges.push((u, v));
        }
    }
    if original_ids.is_empty() {
        return Err(Error::EmptyGraph);
    }
    if self_loops + duplicates > 0 {
        log::debug!("edge list: dropped {self_loops} self-loops, {duplicates} duplicates");
    }
    Ok(LoadedGraph {
        graph: Graph::from_edges(original_ids.len(), edges)?,
        dropped_self_loops: self_loops,
        dropped_duplicates: duplicates,
        original_ids,
    })
}

/// Writes `graph` as an edge list that [`load_edge_list`] maps back to the
/// same structure. Nodes without incident edges are emitted as self-loop
/// lines at the position where they first appeared.
pub fn emit_edge_list(graph: &Graph) -> String {
    let mut out = format!(
        "# {} nodes, {} edges\n",
        graph.node_count(),
        graph.edge_count()
    );
    // Ids are dense in first-appearance order, so any id below an endpoint
    // that has not been written yet was introduced by a dropped self-loop.
    let mut next = 0u32;
    for &(u, v) in graph.edges() {
        while next < u {
            out.push_str(&format!("{next} {next}\n"));
            next += 1;
        }
        let u_new = u >= next;
        next = next.max(u + 1);
        if next < v {
            // a new `u` must be introduced before the fillers below `v`
            if u_new {
                out.push_str(&format!("{u} {u}\n"));
            }
            while next < v {
                out.push_str(&format!("{next} {next}\n"));
                next += 1;
            }
        }
        next = next.max(v + 1);
        out.push_str(&format!("{u} {v}\n"));
    }
    for w in next as usize..graph.node_count() {
        out.push_str(&format!("{w} {w}\n"));
    }
    out
}

/// Barabási–Albert style graph: a clique on `attach + 1` nodes, then each new
/// node links to `attach` distinct existing nodes chosen proportionally to degree.
pub fn preferential_attachment(nodes: usize, attach: usize, rng: &mut SimRng) -> Result<Graph> {
    if attach == 0 || nodes <= attach {
        return Err(Error::domain(format!(
            "preferential attachment needs nodes > attach >= 1 (got {nodes}, {attach})"
        )));
    }
    let mut edges = Vec::new();
    let mut endpoints: Vec<u32> = Vec::new();
    for u in 0..=attach as u32 {
        for v in 0..u {
            edges.push((v, u));
            endpoints.extend([u, v]);
        }
    }
    let mut targets = Vec::with_capacity(attach);
    for u in (attach + 1) as u32..nodes as u32 {
        targets.clear();
        while targets.len() < attach {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, u));
            endpoints.extend([t, u]);
        }
    }
    Graph::from_edges(nodes, edges)
}
