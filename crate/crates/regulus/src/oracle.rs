//! Ground-truth machinery: exact regular-subgraph search under a node
//! budget, regularity certification, and the prime-power degree predicates
//! used to pick extraction parameters.
//!
//! The search is complete: `Absent` means the space was exhausted, not
//! merely that nothing turned up. Budget exhaustion is its own verdict,
//! `Indeterminate`, so a timeout can never be misread as nonexistence.

use crate::config::SearchBudget;
use crate::graph::{min_degree_peel, proper_two_coloring, Graph, SubgraphWitness};
use crate::matching::regular_core;
use crate::BipartiteGraph;
use crate::{Error, Result};

/// Outcome of a budgeted existence search.
#[derive(Debug, Clone)]
pub enum SearchVerdict {
    /// A verified witness.
    Found(SubgraphWitness),
    /// The search space was exhausted; no such subgraph exists.
    Absent,
    /// The node budget ran out before the question was settled.
    Indeterminate,
}

impl SearchVerdict {
    pub fn found(&self) -> Option<&SubgraphWitness> {
        match self {
            SearchVerdict::Found(w) => Some(w),
            _ => None,
        }
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, SearchVerdict::Absent)
    }
}

/// `max_regular_degree` answer: exact value, or budget ran out first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeVerdict {
    Exact(usize),
    Indeterminate,
}

/// True iff every vertex of `g` has degree exactly `r`, `g` has at least
/// one vertex, and at least one edge.
pub fn is_r_regular(g: &Graph, r: usize) -> bool {
    g.vertex_count() >= 1
        && g.edge_count() >= 1
        && (0..g.vertex_count() as u32).all(|v| g.degree(v) == r)
}

const UNDECIDED: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

struct Search<'g> {
    g: &'g Graph,
    r: u32,
    incident: Vec<Vec<u32>>,
    state: Vec<u8>,
    in_deg: Vec<u32>,
    und_deg: Vec<u32>,
    /// Vertices with `1 <= in_deg < r`; zero means every touched vertex is
    /// finished.
    deficit: usize,
    in_total: usize,
    trail: Vec<u32>,
    nodes: u64,
    limit: u64,
}

enum Inner {
    Found,
    Exhausted,
    NodesOut,
}

impl<'g> Search<'g> {
    fn new(g: &'g Graph, r: u32, limit: u64) -> Search<'g> {
        let mut incident = vec![Vec::new(); g.vertex_count()];
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            incident[u as usize].push(i as u32);
            incident[v as usize].push(i as u32);
        }
        let und_deg = (0..g.vertex_count()).map(|v| g.degree(v as u32) as u32).collect();
        Search {
            g,
            r,
            incident,
            state: vec![UNDECIDED; g.edge_count()],
            in_deg: vec![0; g.vertex_count()],
            und_deg,
            deficit: 0,
            in_total: 0,
            trail: Vec::new(),
            nodes: 0,
            limit,
        }
    }

    fn contributes(&self, v: usize) -> bool {
        self.in_deg[v] >= 1 && self.in_deg[v] < self.r
    }

    /// Flips edge `e` from undecided; updates counters and the trail.
    fn assign(&mut self, e: u32, val: u8) {
        debug_assert_eq!(self.state[e as usize], UNDECIDED);
        let (u, v) = self.g.edges()[e as usize];
        for w in [u as usize, v as usize] {
            let before = self.contributes(w);
            self.und_deg[w] -= 1;
            if val == IN {
                self.in_deg[w] += 1;
            }
            let after = self.contributes(w);
            match (before, after) {
                (false, true) => self.deficit += 1,
                (true, false) => self.deficit -= 1,
                _ => {}
            }
        }
        if val == IN {
            self.in_total += 1;
        }
        self.state[e as usize] = val;
        self.trail.push(e);
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let e = self.trail.pop().unwrap();
            let val = self.state[e as usize];
            let (u, v) = self.g.edges()[e as usize];
            for w in [u as usize, v as usize] {
                let before = self.contributes(w);
                self.und_deg[w] += 1;
                if val == IN {
                    self.in_deg[w] -= 1;
                }
                let after = self.contributes(w);
                match (before, after) {
                    (false, true) => self.deficit += 1,
                    (true, false) => self.deficit -= 1,
                    _ => {}
                }
            }
            if val == IN {
                self.in_total -= 1;
            }
            self.state[e as usize] = UNDECIDED;
        }
    }

    /// Forces every consequence of the current assignment. Returns false on
    /// contradiction. Rules per vertex: a touched vertex must end at
    /// exactly `r`, an untouched vertex that can no longer reach `r` must
    /// stay untouched.
    fn propagate(&mut self, seed_u: u32, seed_v: u32) -> bool {
        let mut work = vec![seed_u, seed_v];
        while let Some(v) = work.pop() {
            let vi = v as usize;
            let (ind, und) = (self.in_deg[vi], self.und_deg[vi]);
            if ind > self.r {
                return false;
            }
            if ind >= 1 && ind + und < self.r {
                return false;
            }
            let force = if ind == self.r && und > 0 {
                Some(OUT)
            } else if ind >= 1 && ind + und == self.r && und > 0 {
                Some(IN)
            } else if ind == 0 && und < self.r && und > 0 {
                Some(OUT)
            } else {
                None
            };
            if let Some(val) = force {
                for i in 0..self.incident[vi].len() {
                    let e = self.incident[vi][i];
                    if self.state[e as usize] != UNDECIDED {
                        continue;
                    }
                    self.assign(e, val);
                    let (a, b) = self.g.edges()[e as usize];
                    work.push(a);
                    work.push(b);
                }
            }
        }
        true
    }

    /// Branch choice: an undecided edge at the most constrained touched
    /// vertex, else the lowest-numbered undecided edge.
    fn choose_edge(&self) -> Option<u32> {
        let mut best: Option<(u32, u32)> = None;
        for v in 0..self.g.vertex_count() {
            if self.contributes(v) && self.und_deg[v] > 0 {
                let slack = self.und_deg[v];
                if best.map_or(true, |(s, _)| slack < s) {
                    let e = *self.incident[v]
                        .iter()
                        .find(|&&e| self.state[e as usize] == UNDECIDED)
                        .expect("und_deg > 0 implies an undecided incident edge");
                    best = Some((slack, e));
                }
            }
        }
        if let Some((_, e)) = best {
            return Some(e);
        }
        (0..self.state.len() as u32).find(|&e| self.state[e as usize] == UNDECIDED)
    }

    fn run(&mut self) -> Inner {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Inner::NodesOut;
        }
        if self.deficit == 0 && self.in_total >= 1 {
            return Inner::Found;
        }
        let Some(e) = self.choose_edge() else {
            return Inner::Exhausted;
        };
        for val in [IN, OUT] {
            let mark = self.trail.len();
            self.assign(e, val);
            let (u, v) = self.g.edges()[e as usize];
            if self.propagate(u, v) {
                match self.run() {
                    Inner::Found => return Inner::Found,
                    Inner::NodesOut => return Inner::NodesOut,
                    Inner::Exhausted => {}
                }
            }
            self.undo_to(mark);
        }
        Inner::Exhausted
    }

    fn witness(&self, core_map: &[u32], host: &Graph) -> Result<SubgraphWitness> {
        let chosen: Vec<(u32, u32)> = self
            .g
            .edges()
            .iter()
            .enumerate()
            .filter_map(|(i, &e)| (self.state[i] == IN).then_some(e))
            .collect();
        let mut touched: Vec<u32> = chosen.iter().flat_map(|&(u, v)| [u, v]).collect();
        touched.sort_unstable();
        touched.dedup();
        let mut local = vec![u32::MAX; self.g.vertex_count()];
        for (i, &v) in touched.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let edges = chosen.iter().map(|&(u, v)| (local[u as usize], local[v as usize]));
        let sub = Graph::new(touched.len(), edges)?;
        let vertices = touched.iter().map(|&v| core_map[v as usize]).collect();
        let w = SubgraphWitness::new(sub, vertices)?;
        check_regular_witness(host, &w, self.r as usize)?;
        Ok(w)
    }
}

/// On 2-colorable cores, try a flow fixpoint for an `r`-regular piece
/// before any branching. Success is verified; failure proves nothing.
fn bipartite_fast_path(core: &Graph, core_map: &[u32], r: usize, host: &Graph) -> Option<SubgraphWitness> {
    let color = proper_two_coloring(core)?;
    let a_ids: Vec<u32> = (0..core.vertex_count() as u32).filter(|&v| color[v as usize] == 0).collect();
    let b_ids: Vec<u32> = (0..core.vertex_count() as u32).filter(|&v| color[v as usize] == 1).collect();
    let mut side = vec![u32::MAX; core.vertex_count()];
    for (i, &v) in a_ids.iter().enumerate() {
        side[v as usize] = i as u32;
    }
    for (i, &v) in b_ids.iter().enumerate() {
        side[v as usize] = i as u32;
    }
    let edges = core
        .edges()
        .iter()
        .map(|&(u, v)| {
            if color[u as usize] == 0 {
                (side[u as usize], side[v as usize])
            } else {
                (side[v as usize], side[u as usize])
            }
        })
        .collect::<Vec<_>>();
    let h = BipartiteGraph::new(a_ids.len(), b_ids.len(), edges).ok()?;
    let (sub, sa, sb) = regular_core(&h, r)?;
    let na = sub.a_count();
    let graph = sub.to_graph();
    let vertices: Vec<u32> = sa
        .iter()
        .map(|&i| core_map[a_ids[i as usize] as usize])
        .chain(sb.iter().map(|&i| core_map[b_ids[i as usize] as usize]))
        .collect();
    debug_assert_eq!(vertices.len(), na + sub.b_count());
    let w = SubgraphWitness::new(graph, vertices).ok()?;
    if check_regular_witness(host, &w, r).is_ok() {
        Some(w)
    } else {
        debug_assert!(false, "flow fixpoint produced an invalid witness");
        None
    }
}

/// Decides whether `g` has a nonempty `r`-regular subgraph.
///
/// `Found` carries a verified witness. `Absent` certifies nonexistence.
/// `Indeterminate` means the node budget ran out first. Strategy:
/// min-degree peel, then on 2-colorable cores a flow fixpoint that can
/// only confirm existence, then complete edge backtracking with
/// degree-window propagation.
pub fn find_regular_subgraph_exact(g: &Graph, r: usize, budget: &SearchBudget) -> Result<SearchVerdict> {
    if r == 0 {
        return Err(Error::pre("regular-subgraph search needs r >= 1"));
    }
    budget.validate()?;
    // Vertices of degree < r can never appear in an r-regular subgraph, so
    // the peel preserves the answer while shrinking the search space.
    let (core, core_map) = min_degree_peel(g, r as f64);
    if core.edge_count() == 0 {
        return Ok(SearchVerdict::Absent);
    }
    if let Some(w) = bipartite_fast_path(&core, &core_map, r, g) {
        return Ok(SearchVerdict::Found(w));
    }
    let mut search = Search::new(&core, r as u32, budget.node_limit);
    match search.run() {
        Inner::Exhausted => Ok(SearchVerdict::Absent),
        Inner::NodesOut => Ok(SearchVerdict::Indeterminate),
        Inner::Found => Ok(SearchVerdict::Found(search.witness(&core_map, g)?)),
    }
}

/// The largest `r` for which `g` has an `r`-regular subgraph, settled by
/// descending exact searches that share one node budget. Edgeless graphs
/// give 0; any edge gives at least 1. A budget exhaustion at any level
/// leaves the maximum unsettled, hence `Indeterminate`.
pub fn max_regular_degree(g: &Graph, budget: &SearchBudget) -> Result<DegreeVerdict> {
    budget.validate()?;
    if g.edge_count() == 0 {
        return Ok(DegreeVerdict::Exact(0));
    }
    let top = g.max_degree().expect("nonempty: edge_count >= 1");
    let mut used = 0u64;
    for r in (1..=top).rev() {
        if used >= budget.node_limit {
            return Ok(DegreeVerdict::Indeterminate);
        }
        let remaining = SearchBudget { node_limit: budget.node_limit - used, ..*budget };
        match find_regular_subgraph_exact(g, r, &remaining)? {
            SearchVerdict::Found(_) => return Ok(DegreeVerdict::Exact(r)),
            SearchVerdict::Indeterminate => return Ok(DegreeVerdict::Indeterminate),
            SearchVerdict::Absent => {}
        }
        // The fast path and peel run outside the node counter; charge one
        // node minimum per level so the loop is still budget-bounded.
        used += 1;
    }
    Ok(DegreeVerdict::Exact(0))
}

/// Whether the prime-power degree condition holds: `q` a prime power with
/// `q >= r`, `q = r (mod 2)`, max degree `delta >= 2q - 2`, and average
/// degree `d > (2q-2)/(2q-1) * (delta + 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AfkVerdict {
    Holds,
    Fails(String),
}

impl AfkVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, AfkVerdict::Holds)
    }
}

fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            let mut m = q;
            while m % p == 0 {
                m /= p;
            }
            return m == 1;
        }
        p += 1;
    }
    true
}

pub fn afk_condition(q: u64, r: usize, d: f64, delta: f64) -> AfkVerdict {
    if !is_prime_power(q) {
        return AfkVerdict::Fails(format!("q = {q} is not a prime power"));
    }
    if q < r as u64 {
        return AfkVerdict::Fails(format!("q = {q} is below r = {r}"));
    }
    if q % 2 != r as u64 % 2 {
        return AfkVerdict::Fails(format!("parity mismatch: q = {q}, r = {r}"));
    }
    let threshold = 2.0 * q as f64 - 2.0;
    if delta < threshold {
        return AfkVerdict::Fails(format!("max degree {delta} is below 2q - 2 = {threshold}"));
    }
    let bound = threshold / (threshold + 1.0) * (delta + 1.0);
    if d <= bound {
        return AfkVerdict::Fails(format!("average degree {d} does not exceed {bound}"));
    }
    AfkVerdict::Holds
}

/// The power of 2 in `[d/(10 lambda), d/(5 lambda))`; the interval spans a
/// factor of 2, so exactly one exists once `d/(10 lambda) >= 1`.
pub fn choose_q(d: f64, lambda: f64) -> Result<u64> {
    if !(d > 0.0) || !(lambda >= 1.0) {
        return Err(Error::pre(format!("need d > 0 and lambda >= 1, got d = {d}, lambda = {lambda}")));
    }
    let lo = d / (10.0 * lambda);
    let hi = d / (5.0 * lambda);
    if lo < 1.0 {
        return Err(Error::pre(format!("d/(10 lambda) = {lo} is below 1; degree too small")));
    }
    let mut q = 1u64;
    while (q as f64) < lo {
        q = q.checked_mul(2).ok_or_else(|| Error::Internal("q overflow".into()))?;
    }
    if (q as f64) >= hi {
        return Err(Error::Internal(format!("no power of 2 in [{lo}, {hi})")));
    }
    Ok(q)
}

/// Verifies that `w` is a nonempty `r`-regular subgraph of `host`: the
/// vertex map is injective and in range, every edge exists in `host`, and
/// every vertex has degree exactly `r`.
pub fn check_regular_witness(host: &Graph, w: &SubgraphWitness, r: usize) -> Result<()> {
    if w.graph.vertex_count() == 0 {
        return Err(Error::pre("witness is empty"));
    }
    SubgraphWitness::new(w.graph.clone(), w.vertices.clone())?;
    if let Some(&bad) = w.vertices.iter().find(|&&v| v as usize >= host.vertex_count()) {
        return Err(Error::VertexOutOfRange { id: bad, n: host.vertex_count() });
    }
    for &(u, v) in w.graph.edges() {
        let (hu, hv) = (w.vertices[u as usize], w.vertices[v as usize]);
        if !host.has_edge(hu, hv) {
            return Err(Error::pre(format!("witness edge ({hu}, {hv}) is not a host edge")));
        }
    }
    if !is_r_regular(&w.graph, r) {
        return Err(Error::pre(format!("witness is not {r}-regular")));
    }
    Ok(())
}
