//! Simple graphs and bipartite graphs over dense integer vertex ids.
//!
//! Subgraph-producing operations return fresh compact structures together
//! with a vertex relabeling (new id -> old id) so that any output can be
//! traced back to, and certified against, the original input. All operations
//! accept isolated vertices.

use crate::{Error, Result};

// ==== simple graphs ====================================================

/// Undirected simple graph. Vertices are `0..vertex_count()`; edges are kept
/// canonically as `(u, v)` with `u < v`, sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Edge endpoints may come in either
    /// order; self-loops and duplicate edges are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Graph> {
        let mut canon: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            if u as usize >= n {
                return Err(Error::VertexOutOfRange { id: u, n });
            }
            if v as usize >= n {
                return Err(Error::VertexOutOfRange { id: v, n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        for w in canon.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &canon {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for nb in &mut adj {
            nb.sort_unstable();
        }
        Ok(Graph { adj, edges: canon })
    }

    pub fn empty(n: usize) -> Graph {
        Graph { adj: vec![Vec::new(); n], edges: Vec::new() }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.adj.iter().map(Vec::len).min()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.adj.iter().map(Vec::len).max()
    }

    /// `2e / n`; zero for an edgeless graph, an error-free 0.0 only when
    /// vertices exist.
    pub fn avg_degree(&self) -> f64 {
        if self.adj.is_empty() {
            return 0.0;
        }
        2.0 * self.edges.len() as f64 / self.adj.len() as f64
    }

    /// Induced subgraph on `vertices` (deduplicated, any order), compacted to
    /// ids `0..k`, plus the relabeling new id -> old id.
    pub fn induced(&self, vertices: &[u32]) -> (Graph, Vec<u32>) {
        let mut keep: Vec<u32> = vertices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut old_to_new = vec![u32::MAX; self.adj.len()];
        for (new, &old) in keep.iter().enumerate() {
            old_to_new[old as usize] = new as u32;
        }
        let mut edges = Vec::new();
        for &(u, v) in &self.edges {
            let (nu, nv) = (old_to_new[u as usize], old_to_new[v as usize]);
            if nu != u32::MAX && nv != u32::MAX {
                edges.push((nu, nv));
            }
        }
        let g = Graph::new(keep.len(), edges).expect("induced subgraph of a valid graph is valid");
        (g, keep)
    }

    /// Graph with the same vertex set and the given subset of this graph's
    /// edges.
    pub fn edge_subgraph(&self, keep: impl Iterator<Item = (u32, u32)>) -> Result<Graph> {
        let mut edges = Vec::new();
        for (u, v) in keep {
            if !self.has_edge(u, v) {
                return Err(Error::Internal(format!("edge ({u}, {v}) not present in host graph")));
            }
            edges.push((u, v));
        }
        Graph::new(self.adj.len(), edges)
    }
}

/// Minimum, maximum and exact average degree of a nonempty graph.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DegreeSummary {
    pub min_deg: usize,
    pub max_deg: usize,
    pub avg_deg: f64,
}

/// Degree summary of `g`; rejects graphs without vertices.
pub fn degree_summary(g: &Graph) -> Result<DegreeSummary> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(DegreeSummary {
        min_deg: g.min_degree().unwrap(),
        max_deg: g.max_degree().unwrap(),
        avg_deg: g.avg_degree(),
    })
}

// ==== subgraph witnesses ================================================

/// A compact subgraph together with the original id of each of its vertices
/// in some host graph. Extraction pipelines thread these through every stage
/// so the final output can be checked edge-by-edge against the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphWitness {
    pub graph: Graph,
    /// `vertices[new_id] = host_id`, strictly increasing is not required,
    /// but entries are pairwise distinct.
    pub vertices: Vec<u32>,
}

impl SubgraphWitness {
    pub fn identity(g: &Graph) -> SubgraphWitness {
        SubgraphWitness { graph: g.clone(), vertices: (0..g.vertex_count() as u32).collect() }
    }

    pub fn new(graph: Graph, vertices: Vec<u32>) -> Result<SubgraphWitness> {
        if vertices.len() != graph.vertex_count() {
            return Err(Error::Internal("witness map length differs from vertex count".into()));
        }
        let mut sorted = vertices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Internal("witness map has repeated host ids".into()));
        }
        Ok(SubgraphWitness { graph, vertices })
    }

    /// Edges expressed in host ids, canonicalized.
    pub fn host_edges(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = self
            .graph
            .edges()
            .iter()
            .map(|&(u, v)| {
                let (hu, hv) = (self.vertices[u as usize], self.vertices[v as usize]);
                (hu.min(hv), hu.max(hv))
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// True when every edge, mapped through the relabeling, is an edge of
    /// `host`.
    pub fn is_subgraph_of(&self, host: &Graph) -> bool {
        self.vertices.iter().all(|&v| (v as usize) < host.vertex_count())
            && self
                .graph
                .edges()
                .iter()
                .all(|&(u, v)| host.has_edge(self.vertices[u as usize], self.vertices[v as usize]))
    }

    /// Reinterprets a witness whose host ids refer to an intermediate graph:
    /// `parent[i]` is the intermediate graph's id `i` expressed in the
    /// outer host's ids.
    pub fn lift(mut self, parent: &[u32]) -> SubgraphWitness {
        for v in &mut self.vertices {
            *v = parent[*v as usize];
        }
        self
    }
}

// ==== bipartite graphs ==================================================

/// Bipartite graph with parts indexed independently: A-vertices are
/// `0..a_count()`, B-vertices `0..b_count()`. Edges are `(a, b)` pairs,
/// sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartiteGraph {
    a_adj: Vec<Vec<u32>>,
    b_adj: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
}

impl BipartiteGraph {
    pub fn new(na: usize, nb: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<BipartiteGraph> {
        let mut canon: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a as usize >= na {
                return Err(Error::VertexOutOfRange { id: a, n: na });
            }
            if b as usize >= nb {
                return Err(Error::VertexOutOfRange { id: b, n: nb });
            }
            canon.push((a, b));
        }
        canon.sort_unstable();
        for w in canon.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        let mut a_adj = vec![Vec::new(); na];
        let mut b_adj = vec![Vec::new(); nb];
        for &(a, b) in &canon {
            a_adj[a as usize].push(b);
            b_adj[b as usize].push(a);
        }
        for nb in a_adj.iter_mut().chain(b_adj.iter_mut()) {
            nb.sort_unstable();
        }
        Ok(BipartiteGraph { a_adj, b_adj, edges: canon })
    }

    pub fn a_count(&self) -> usize {
        self.a_adj.len()
    }

    pub fn b_count(&self) -> usize {
        self.b_adj.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.a_adj.len() + self.b_adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn degree_a(&self, a: u32) -> usize {
        self.a_adj[a as usize].len()
    }

    pub fn degree_b(&self, b: u32) -> usize {
        self.b_adj[b as usize].len()
    }

    pub fn neighbors_a(&self, a: u32) -> &[u32] {
        &self.a_adj[a as usize]
    }

    pub fn neighbors_b(&self, b: u32) -> &[u32] {
        &self.b_adj[b as usize]
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.a_adj[a as usize].binary_search(&b).is_ok()
    }

    /// `Some(s)` when every vertex on both sides has degree exactly `s`.
    pub fn regularity(&self) -> Option<usize> {
        let s = self.a_adj.first().map(Vec::len)?;
        if self.a_adj.iter().all(|nb| nb.len() == s) && self.b_adj.iter().all(|nb| nb.len() == s) {
            Some(s)
        } else {
            None
        }
    }

    /// The same graph with A-ids `0..na` and B-ids `na..na+nb`.
    pub fn to_graph(&self) -> Graph {
        let na = self.a_count() as u32;
        let edges = self.edges.iter().map(|&(a, b)| (a, na + b));
        Graph::new(self.vertex_count(), edges).expect("bipartite edges are simple by construction")
    }

    /// Induced bipartite subgraph on the given A- and B-subsets, plus the
    /// relabelings (new index -> old index) for each part.
    pub fn induced(&self, a_keep: &[u32], b_keep: &[u32]) -> (BipartiteGraph, Vec<u32>, Vec<u32>) {
        let mut a_keep = a_keep.to_vec();
        a_keep.sort_unstable();
        a_keep.dedup();
        let mut b_keep = b_keep.to_vec();
        b_keep.sort_unstable();
        b_keep.dedup();
        let mut a_map = vec![u32::MAX; self.a_count()];
        for (new, &old) in a_keep.iter().enumerate() {
            a_map[old as usize] = new as u32;
        }
        let mut b_map = vec![u32::MAX; self.b_count()];
        for (new, &old) in b_keep.iter().enumerate() {
            b_map[old as usize] = new as u32;
        }
        let edges = self.edges.iter().filter_map(|&(a, b)| {
            let (na, nb) = (a_map[a as usize], b_map[b as usize]);
            (na != u32::MAX && nb != u32::MAX).then_some((na, nb))
        });
        let g = BipartiteGraph::new(a_keep.len(), b_keep.len(), edges)
            .expect("induced subgraph of a valid bipartite graph is valid");
        (g, a_keep, b_keep)
    }

    /// Same parts, minus the given edge set.
    pub fn without_edges(&self, remove: &[(u32, u32)]) -> BipartiteGraph {
        let gone: std::collections::BTreeSet<(u32, u32)> = remove.iter().copied().collect();
        let edges = self.edges.iter().copied().filter(|e| !gone.contains(e));
        BipartiteGraph::new(self.a_count(), self.b_count(), edges)
            .expect("removing edges keeps the graph valid")
    }
}

// ==== spanning bipartition by local moves ===============================

/// Splits `g` into a spanning bipartition keeping only crossing edges, of
/// which there are at least `ceil(e/2)`: single-vertex moves are applied
/// until no move strictly increases the cut, at which point every vertex has
/// at least half of its edges crossing.
///
/// Returns the bipartite graph and, per part, the original vertex ids.
/// Proper 2-coloring found by BFS, or `None` when an odd cycle exists.
pub fn proper_two_coloring(g: &Graph) -> Option<Vec<u8>> {
    let n = g.vertex_count();
    let mut color = vec![u8::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        queue.push_back(s as u32);
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if color[w as usize] == u8::MAX {
                    color[w as usize] = 1 - color[v as usize];
                    queue.push_back(w);
                } else if color[w as usize] == color[v as usize] {
                    return None;
                }
            }
        }
    }
    Some(color)
}

pub fn bipartite_half(g: &Graph) -> Result<(BipartiteGraph, Vec<u32>, Vec<u32>)> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let n = g.vertex_count();
    let mut side = vec![false; n];
    if let Some(color) = proper_two_coloring(g) {
        // 2-colorable inputs keep every edge, so the cut bound is free and
        // downstream stages see the whole graph.
        for v in 0..n {
            side[v] = color[v] == 1;
        }
    } else {
        // crossing[v] tracks the number of v's edges with endpoints on
        // opposite sides; a move strictly helps iff 2 * crossing[v] < deg(v).
        let mut crossing = vec![0usize; n];
        loop {
            let mut moved = false;
            for v in 0..n {
                if 2 * crossing[v] < g.degree(v as u32) {
                    side[v] = !side[v];
                    moved = true;
                    crossing[v] = g.degree(v as u32) - crossing[v];
                    for &u in g.neighbors(v as u32) {
                        if side[u as usize] == side[v] {
                            crossing[u as usize] -= 1;
                        } else {
                            crossing[u as usize] += 1;
                        }
                    }
                }
            }
            if !moved {
                break;
            }
        }
    }
    let a_ids: Vec<u32> = (0..n as u32).filter(|&v| !side[v as usize]).collect();
    let b_ids: Vec<u32> = (0..n as u32).filter(|&v| side[v as usize]).collect();
    let mut a_index = vec![u32::MAX; n];
    for (i, &v) in a_ids.iter().enumerate() {
        a_index[v as usize] = i as u32;
    }
    let mut b_index = vec![u32::MAX; n];
    for (i, &v) in b_ids.iter().enumerate() {
        b_index[v as usize] = i as u32;
    }
    let cross_edges = g.edges().iter().filter_map(|&(u, v)| {
        if side[u as usize] == side[v as usize] {
            return None;
        }
        let (a, b) = if side[u as usize] { (v, u) } else { (u, v) };
        Some((a_index[a as usize], b_index[b as usize]))
    });
    let bigraph = BipartiteGraph::new(a_ids.len(), b_ids.len(), cross_edges)?;
    debug_assert!(bigraph.edge_count() * 2 >= g.edge_count());
    Ok((bigraph, a_ids, b_ids))
}

// ==== min-degree peeling ================================================

/// The unique maximal subgraph of `g` in which every vertex has degree at
/// least `threshold`, compacted, plus the relabeling new id -> old id. May
/// be empty. Idempotent: peeling the output again changes nothing.
pub fn min_degree_peel(g: &Graph, threshold: f64) -> (Graph, Vec<u32>) {
    let n = g.vertex_count();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v as u32)).collect();
    let mut stack: Vec<u32> = (0..n as u32).filter(|&v| (deg[v as usize] as f64) < threshold).collect();
    for &v in &stack {
        alive[v as usize] = false;
    }
    while let Some(v) = stack.pop() {
        for &u in g.neighbors(v) {
            if alive[u as usize] {
                deg[u as usize] -= 1;
                if (deg[u as usize] as f64) < threshold {
                    alive[u as usize] = false;
                    stack.push(u);
                }
            }
        }
    }
    let survivors: Vec<u32> = (0..n as u32).filter(|&v| alive[v as usize]).collect();
    g.induced(&survivors)
}

/// Bipartite analogue of `min_degree_peel`: the maximal sub-bigraph with
/// all degrees at least `threshold`, plus relabelings for both parts.
pub fn bipartite_peel(h: &BipartiteGraph, threshold: f64) -> (BipartiteGraph, Vec<u32>, Vec<u32>) {
    let (na, nb) = (h.a_count(), h.b_count());
    let mut alive_a = vec![true; na];
    let mut alive_b = vec![true; nb];
    let mut deg_a: Vec<usize> = (0..na).map(|a| h.degree_a(a as u32)).collect();
    let mut deg_b: Vec<usize> = (0..nb).map(|b| h.degree_b(b as u32)).collect();
    // Work items tagged by side: (false, a) or (true, b).
    let mut stack: Vec<(bool, u32)> = Vec::new();
    for a in 0..na {
        if (deg_a[a] as f64) < threshold {
            alive_a[a] = false;
            stack.push((false, a as u32));
        }
    }
    for b in 0..nb {
        if (deg_b[b] as f64) < threshold {
            alive_b[b] = false;
            stack.push((true, b as u32));
        }
    }
    while let Some((is_b, v)) = stack.pop() {
        if is_b {
            for &a in h.neighbors_b(v) {
                if alive_a[a as usize] {
                    deg_a[a as usize] -= 1;
                    if (deg_a[a as usize] as f64) < threshold {
                        alive_a[a as usize] = false;
                        stack.push((false, a));
                    }
                }
            }
        } else {
            for &b in h.neighbors_a(v) {
                if alive_b[b as usize] {
                    deg_b[b as usize] -= 1;
                    if (deg_b[b as usize] as f64) < threshold {
                        alive_b[b as usize] = false;
                        stack.push((true, b));
                    }
                }
            }
        }
    }
    let keep_a: Vec<u32> = (0..na as u32).filter(|&a| alive_a[a as usize]).collect();
    let keep_b: Vec<u32> = (0..nb as u32).filter(|&b| alive_b[b as usize]).collect();
    h.induced(&keep_a, &keep_b)
}

// ==== dyadic degree classes =============================================

/// Partitions the A-side of `h` by degree against the thresholds
/// `2^{t_0} < 2^{t_1} < ...`: class 0 holds degrees at most `2^{t_0}`,
/// class `i` degrees in `(2^{t_{i-1}}, 2^{t_i}]`, and the last class is
/// unbounded above so the classes always partition the whole part.
pub fn dyadic_degree_classes(h: &BipartiteGraph, thresholds: &[f64]) -> Result<Vec<Vec<u32>>> {
    if thresholds.is_empty() {
        return Err(Error::pre("dyadic classes need at least one threshold"));
    }
    if thresholds.iter().any(|t| !t.is_finite()) {
        return Err(Error::pre("dyadic thresholds must be finite"));
    }
    if thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::pre("dyadic thresholds must be strictly increasing"));
    }
    let bounds: Vec<f64> = thresholds.iter().map(|&t| t.exp2()).collect();
    let k = bounds.len();
    let mut classes = vec![Vec::new(); k];
    for a in 0..h.a_count() as u32 {
        let d = h.degree_a(a) as f64;
        let mut idx = k - 1;
        for (i, &b) in bounds.iter().enumerate() {
            if d <= b {
                idx = i;
                break;
            }
        }
        classes[idx].push(a);
    }
    Ok(classes)
}

// ==== text formats ======================================================

/// Canonical text form: header `graph <n> <m>`, then one `u v` line per
/// edge with `u < v`, edges sorted. Writing then parsing then writing again
/// reproduces the bytes exactly.
pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("graph {} {}\n", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 3 || toks[0] != "graph" {
        return Err(Error::Parse { line: 1, msg: "expected header `graph <n> <m>`".into() });
    }
    let n: usize = toks[1].parse().map_err(|_| Error::Parse { line: 1, msg: "bad vertex count".into() })?;
    let m: usize = toks[2].parse().map_err(|_| Error::Parse { line: 1, msg: "bad edge count".into() })?;
    let mut edges = Vec::with_capacity(m);
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (u, v) = parse_edge_line(line, idx + 1)?;
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    Graph::new(n, edges)
}

/// Canonical text form for bipartite graphs: header `bigraph <nA> <nB> <m>`;
/// edge lines use global ids, A-vertices `0..nA` and B-vertices
/// `nA..nA+nB`.
pub fn write_bigraph(h: &BipartiteGraph) -> String {
    let na = h.a_count() as u32;
    let mut out = format!("bigraph {} {} {}\n", h.a_count(), h.b_count(), h.edge_count());
    for &(a, b) in h.edges() {
        out.push_str(&format!("{} {}\n", a, na + b));
    }
    out
}

pub fn parse_bigraph(text: &str) -> Result<BipartiteGraph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "bigraph" {
        return Err(Error::Parse { line: 1, msg: "expected header `bigraph <nA> <nB> <m>`".into() });
    }
    let na: usize = toks[1].parse().map_err(|_| Error::Parse { line: 1, msg: "bad A count".into() })?;
    let nb: usize = toks[2].parse().map_err(|_| Error::Parse { line: 1, msg: "bad B count".into() })?;
    let m: usize = toks[3].parse().map_err(|_| Error::Parse { line: 1, msg: "bad edge count".into() })?;
    let total = na + nb;
    let mut edges = Vec::with_capacity(m);
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (u, v) = parse_edge_line(line, idx + 1)?;
        let (u, v) = (u.min(v), u.max(v));
        if (u as usize) >= na || (v as usize) < na || (v as usize) >= total {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("edge ({u}, {v}) does not cross the bipartition"),
            });
        }
        edges.push((u, v - na as u32));
    }
    if edges.len() != m {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    BipartiteGraph::new(na, nb, edges)
}

fn parse_edge_line(line: &str, lineno: usize) -> Result<(u32, u32)> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    if toks.len() != 2 {
        return Err(Error::Parse { line: lineno, msg: "expected `u v`".into() });
    }
    let u: u32 = toks[0].parse().map_err(|_| Error::Parse { line: lineno, msg: "bad vertex id".into() })?;
    let v: u32 = toks[1].parse().map_err(|_| Error::Parse { line: lineno, msg: "bad vertex id".into() })?;
    Ok((u, v))
}

// ==== shared small constructions (used across the crate's tests) ========

/// Cycle on `n >= 3` vertices.
pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3);
    let edges = (0..n as u32).map(|i| (i, (i + 1) % n as u32));
    Graph::new(n, edges).unwrap()
}

/// Complete graph on `n` vertices.
pub fn complete(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            edges.push((u, v));
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Complete bipartite graph as a `Graph`, A-ids first.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..a as u32 {
        for v in 0..b as u32 {
            edges.push((u, a as u32 + v));
        }
    }
    Graph::new(a + b, edges).unwrap()
}

/// Path on `n` vertices (`n - 1` edges).
pub fn path(n: usize) -> Graph {
    let edges = (0..n.saturating_sub(1) as u32).map(|i| (i, i + 1));
    Graph::new(n, edges).unwrap()
}

/// Star with `leaves` leaves; the hub is vertex 0.
pub fn star(leaves: usize) -> Graph {
    let edges = (1..=leaves as u32).map(|v| (0, v));
    Graph::new(leaves + 1, edges).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn petersen() -> Graph {
        let outer = (0u32..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0u32..5).map(|i| (i, i + 5));
        let inner = (0u32..5).map(|i| (i + 5, (i + 2) % 5 + 5));
        Graph::new(10, outer.chain(spokes).chain(inner)).unwrap()
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert!(matches!(Graph::new(3, vec![(0, 3)]), Err(Error::VertexOutOfRange { .. })));
        assert!(matches!(Graph::new(3, vec![(1, 1)]), Err(Error::SelfLoop(1))));
        assert!(matches!(Graph::new(3, vec![(0, 1), (1, 0)]), Err(Error::DuplicateEdge(0, 1))));
    }

    #[test]
    fn handshake_holds_on_assorted_graphs() {
        for g in [cycle(7), complete(6), petersen(), star(5), path(9)] {
            let total: usize = (0..g.vertex_count() as u32).map(|v| g.degree(v)).sum();
            assert_eq!(total, 2 * g.edge_count());
        }
    }

    #[test]
    fn degree_summary_on_known_graphs() {
        let s = degree_summary(&cycle(4)).unwrap();
        assert_eq!((s.min_deg, s.max_deg), (2, 2));
        assert_eq!(s.avg_deg, 2.0);

        let s = degree_summary(&path(3)).unwrap();
        assert_eq!((s.min_deg, s.max_deg), (1, 2));
        assert_eq!(s.avg_deg, 4.0 / 3.0);

        let s = degree_summary(&petersen()).unwrap();
        assert_eq!((s.min_deg, s.max_deg, s.avg_deg), (3, 3, 3.0));

        assert!(matches!(degree_summary(&Graph::empty(0)), Err(Error::EmptyGraph)));
    }

    #[test]
    fn bipartite_half_keeps_all_of_c4() {
        let (h, a_ids, b_ids) = bipartite_half(&cycle(4)).unwrap();
        assert_eq!(h.edge_count(), 4);
        assert_eq!(a_ids.len() + b_ids.len(), 4);
    }

    #[test]
    fn bipartite_half_on_triangle_keeps_two_edges() {
        let (h, _, _) = bipartite_half(&complete(3)).unwrap();
        assert_eq!(h.edge_count(), 2);
    }

    #[test]
    fn bipartite_half_on_k4_matches_exhaustive_max_cut() {
        let g = complete(4);
        // Exhaustive maximum cut over all 2^4 bipartitions.
        let mut best = 0;
        for mask in 0u32..16 {
            let cut = g
                .edges()
                .iter()
                .filter(|&&(u, v)| (mask >> u) & 1 != (mask >> v) & 1)
                .count();
            best = best.max(cut);
        }
        assert_eq!(best, 4);
        let (h, _, _) = bipartite_half(&g).unwrap();
        assert_eq!(h.edge_count(), 4);
    }

    #[test]
    fn bipartite_half_crossing_bound_on_random_graphs() {
        use rand::Rng;
        let mut rng = crate::config::stage_rng(7, "halving-bound");
        for _ in 0..30 {
            let n = rng.gen_range(2..40);
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in (u + 1)..n as u32 {
                    if rng.gen_bool(0.25) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, edges).unwrap();
            let (h, a_ids, b_ids) = bipartite_half(&g).unwrap();
            assert!(h.edge_count() >= g.edge_count().div_ceil(2));
            assert_eq!(a_ids.len() + b_ids.len(), n);
            // Every crossing edge is an edge of g.
            for &(a, b) in h.edges() {
                assert!(g.has_edge(a_ids[a as usize], b_ids[b as usize]));
            }
        }
    }

    #[test]
    fn peel_star_at_two_is_empty() {
        let (g, map) = min_degree_peel(&star(5), 2.0);
        assert_eq!(g.vertex_count(), 0);
        assert!(map.is_empty());
    }

    #[test]
    fn peel_cycle_is_identity() {
        let (g, map) = min_degree_peel(&cycle(6), 2.0);
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 6);
        assert_eq!(map, (0..6).collect::<Vec<u32>>());
    }

    #[test]
    fn peel_path_cascades_to_empty() {
        let (g, _) = min_degree_peel(&path(4), 2.0);
        assert_eq!(g.vertex_count(), 0);
    }

    #[test]
    fn peel_is_idempotent_and_threshold_holds() {
        use rand::Rng;
        let mut rng = crate::config::stage_rng(11, "peel-idempotent");
        for _ in 0..25 {
            let n = rng.gen_range(1..50);
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in (u + 1)..n as u32 {
                    if rng.gen_bool(0.1) {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, edges).unwrap();
            let thr = rng.gen_range(0..5) as f64;
            let (p1, map1) = min_degree_peel(&g, thr);
            for v in 0..p1.vertex_count() as u32 {
                assert!(p1.degree(v) as f64 >= thr);
            }
            let (p2, map2) = min_degree_peel(&p1, thr);
            assert_eq!(p1, p2);
            assert_eq!(map2, (0..p1.vertex_count() as u32).collect::<Vec<u32>>());
            // Survivors are a subset of the input with induced edges.
            let w = SubgraphWitness::new(p1.clone(), map1).unwrap();
            assert!(w.is_subgraph_of(&g));
        }
    }

    #[test]
    fn peel_keeps_the_unique_maximal_core() {
        // Exhaustive check on a small graph: the peel result contains every
        // vertex subset whose induced subgraph has min degree >= threshold.
        let g = Graph::new(
            7,
            vec![(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 3), (5, 6)],
        )
        .unwrap();
        let thr = 2.0;
        let (core, map) = min_degree_peel(&g, thr);
        let in_core: std::collections::BTreeSet<u32> = map.iter().copied().collect();
        for mask in 1u32..(1 << 7) {
            let vs: Vec<u32> = (0..7).filter(|&v| (mask >> v) & 1 == 1).collect();
            let (sub, _) = g.induced(&vs);
            let ok = (0..sub.vertex_count() as u32).all(|v| sub.degree(v) as f64 >= thr);
            if ok {
                assert!(vs.iter().all(|v| in_core.contains(v)), "subset {vs:?} escaped the core");
            }
        }
        assert_eq!(core.vertex_count(), 6);
    }

    #[test]
    fn dyadic_classes_match_reference_scan() {
        // Thresholds (1, 2) over degrees {1, 3, 4}: class 0 holds degree 1,
        // class 1 degrees 3 and 4.
        let h = BipartiteGraph::new(
            3,
            4,
            vec![(0, 0), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2), (2, 3)],
        )
        .unwrap();
        let classes = dyadic_degree_classes(&h, &[1.0, 2.0]).unwrap();
        assert_eq!(classes, vec![vec![0], vec![1, 2]]);

        // Single threshold dominating every degree: one class, all of A.
        let classes = dyadic_degree_classes(&h, &[3.0]).unwrap();
        assert_eq!(classes, vec![vec![0, 1, 2]]);

        assert!(dyadic_degree_classes(&h, &[2.0, 2.0]).is_err());
        assert!(dyadic_degree_classes(&h, &[]).is_err());
    }

    #[test]
    fn dyadic_classes_partition_part_a() {
        use rand::Rng;
        let mut rng = crate::config::stage_rng(3, "dyadic-partition");
        for _ in 0..20 {
            let na = rng.gen_range(1..30);
            let nb = rng.gen_range(1..30);
            let mut edges = Vec::new();
            for a in 0..na as u32 {
                for b in 0..nb as u32 {
                    if rng.gen_bool(0.3) {
                        edges.push((a, b));
                    }
                }
            }
            let h = BipartiteGraph::new(na, nb, edges).unwrap();
            let classes = dyadic_degree_classes(&h, &[0.5, 1.5, 3.0]).unwrap();
            let mut seen = vec![false; na];
            for class in &classes {
                for &a in class {
                    assert!(!seen[a as usize], "vertex in two classes");
                    seen[a as usize] = true;
                }
            }
            assert!(seen.iter().all(|&s| s), "classes must cover part A");
        }
    }

    #[test]
    fn graph_text_roundtrip_is_bit_exact() {
        for g in [cycle(5), complete(4), petersen(), Graph::empty(3), star(4)] {
            let text = write_graph(&g);
            let parsed = parse_graph(&text).unwrap();
            assert_eq!(parsed, g);
            assert_eq!(write_graph(&parsed), text);
        }
    }

    #[test]
    fn bigraph_text_roundtrip_is_bit_exact() {
        let h = BipartiteGraph::new(3, 2, vec![(0, 0), (0, 1), (2, 0)]).unwrap();
        let text = write_bigraph(&h);
        assert!(text.starts_with("bigraph 3 2 3\n"));
        let parsed = parse_bigraph(&text).unwrap();
        assert_eq!(parsed, h);
        assert_eq!(write_bigraph(&parsed), text);
    }

    #[test]
    fn parsers_reject_malformed_input() {
        assert!(parse_graph("").is_err());
        assert!(parse_graph("graph 2\n").is_err());
        assert!(parse_graph("graph 2 1\n0 1\n0 1\n").is_err());
        assert!(parse_graph("graph 2 2\n0 1\n").is_err());
        assert!(parse_graph("graph 2 1\n0 2\n").is_err());
        assert!(parse_bigraph("bigraph 2 2 1\n0 1\n").is_err());
        assert!(parse_bigraph("bigraph 2 2 1\n0 5\n").is_err());
    }

    #[test]
    fn induced_subgraph_and_witness_tracing() {
        let g = complete(5);
        let (sub, map) = g.induced(&[1, 3, 4]);
        assert_eq!(sub.vertex_count(), 3);
        assert_eq!(sub.edge_count(), 3);
        let w = SubgraphWitness::new(sub, map).unwrap();
        assert!(w.is_subgraph_of(&g));
        assert_eq!(w.host_edges(), vec![(1, 3), (1, 4), (3, 4)]);
    }

    #[test]
    fn witness_lift_composes_relabelings() {
        let g = complete(6);
        let (mid, mid_map) = g.induced(&[0, 2, 4, 5]);
        let (inner, inner_map) = mid.induced(&[1, 3]);
        let w = SubgraphWitness::new(inner, inner_map).unwrap().lift(&mid_map);
        assert_eq!(w.vertices, vec![2, 5]);
        assert!(w.is_subgraph_of(&g));
    }

    #[test]
    fn bipartite_accessors_and_regularity() {
        let h = BipartiteGraph::new(2, 2, vec![(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert_eq!(h.regularity(), Some(2));
        assert_eq!(h.to_graph().edge_count(), 4);
        let (sub, a_keep, b_keep) = h.induced(&[0], &[0, 1]);
        assert_eq!(sub.a_count(), 1);
        assert_eq!(sub.edge_count(), 2);
        assert_eq!((a_keep, b_keep), (vec![0], vec![0, 1]));
        let h2 = h.without_edges(&[(0, 0)]);
        assert_eq!(h2.edge_count(), 3);
        assert_eq!(h2.regularity(), None);
    }
}
