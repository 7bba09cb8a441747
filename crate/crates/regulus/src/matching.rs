//! Bipartite matching and flow primitives: maximum matching, degree-capped
//! edge selection, regular cores, and inclusion-minimal tight sets.
//!
//! A set `S` of A-vertices is *tight* when `|N(S)| <= |S|`. Tight sets are
//! where Hall's condition stops being slack, and the chain decompositions
//! peel them off one inclusion-minimal set at a time.

use std::collections::VecDeque;

use crate::graph::BipartiteGraph;
use crate::{Error, Result};

// ==== maximum matching ==================================================

/// Matching in a bipartite graph, stored from both sides.
#[derive(Clone, Debug)]
pub struct Matching {
    pub a_to_b: Vec<Option<u32>>,
    pub b_to_a: Vec<Option<u32>>,
}

impl Matching {
    pub fn size(&self) -> usize {
        self.a_to_b.iter().filter(|m| m.is_some()).count()
    }

    /// Matched pairs `(a, b)` sorted by `a`.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        self.a_to_b
            .iter()
            .enumerate()
            .filter_map(|(a, m)| m.map(|b| (a as u32, b)))
            .collect()
    }
}

/// Maximum matching via Hopcroft-Karp. Deterministic for a fixed input.
pub fn hopcroft_karp(h: &BipartiteGraph) -> Matching {
    let na = h.a_count();
    let mut a_to_b: Vec<Option<u32>> = vec![None; na];
    let mut b_to_a: Vec<Option<u32>> = vec![None; h.b_count()];
    let mut dist = vec![u32::MAX; na];
    loop {
        // BFS from free A-vertices builds the layer structure.
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        let mut queue: VecDeque<u32> = VecDeque::new();
        for a in 0..na as u32 {
            if a_to_b[a as usize].is_none() {
                dist[a as usize] = 0;
                queue.push_back(a);
            }
        }
        let mut reachable_free_b = false;
        while let Some(a) = queue.pop_front() {
            for &b in h.neighbors_a(a) {
                match b_to_a[b as usize] {
                    None => reachable_free_b = true,
                    Some(a2) => {
                        if dist[a2 as usize] == u32::MAX {
                            dist[a2 as usize] = dist[a as usize] + 1;
                            queue.push_back(a2);
                        }
                    }
                }
            }
        }
        if !reachable_free_b {
            break;
        }
        let mut augmented = false;
        for a in 0..na as u32 {
            if a_to_b[a as usize].is_none() && augment(h, a, &mut dist, &mut a_to_b, &mut b_to_a) {
                augmented = true;
            }
        }
        if !augmented {
            break;
        }
    }
    Matching { a_to_b, b_to_a }
}

fn augment(
    h: &BipartiteGraph,
    a: u32,
    dist: &mut [u32],
    a_to_b: &mut [Option<u32>],
    b_to_a: &mut [Option<u32>],
) -> bool {
    for &b in h.neighbors_a(a) {
        let advance = match b_to_a[b as usize] {
            None => true,
            Some(a2) => {
                dist[a2 as usize] == dist[a as usize] + 1
                    && augment(h, a2, dist, a_to_b, b_to_a)
            }
        };
        if advance {
            a_to_b[a as usize] = Some(b);
            b_to_a[b as usize] = Some(a);
            return true;
        }
    }
    // Dead end: keep later DFS passes from re-exploring this vertex.
    dist[a as usize] = u32::MAX;
    false
}

// ==== degree-capped edge selection (Dinic) ===============================

struct Dinic {
    head: Vec<Vec<u32>>,
    to: Vec<u32>,
    cap: Vec<u32>,
    level: Vec<u32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Dinic {
        Dinic { head: vec![Vec::new(); n], to: Vec::new(), cap: Vec::new(), level: vec![0; n], iter: vec![0; n] }
    }

    fn add_edge(&mut self, u: usize, v: usize, c: u32) -> usize {
        let id = self.to.len();
        self.head[u].push(id as u32);
        self.to.push(v as u32);
        self.cap.push(c);
        self.head[v].push(id as u32 + 1);
        self.to.push(u as u32);
        self.cap.push(0);
        id
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = u32::MAX);
        self.level[s] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(s as u32);
        while let Some(u) = queue.pop_front() {
            for &id in &self.head[u as usize] {
                let v = self.to[id as usize];
                if self.cap[id as usize] > 0 && self.level[v as usize] == u32::MAX {
                    self.level[v as usize] = self.level[u as usize] + 1;
                    queue.push_back(v);
                }
            }
        }
        self.level[t] != u32::MAX
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: u32) -> u32 {
        if u == t {
            return pushed;
        }
        while self.iter[u] < self.head[u].len() {
            let id = self.head[u][self.iter[u]] as usize;
            let v = self.to[id] as usize;
            if self.cap[id] > 0 && self.level[v] == self.level[u] + 1 {
                let got = self.dfs(v, t, pushed.min(self.cap[id]));
                if got > 0 {
                    self.cap[id] -= got;
                    self.cap[id ^ 1] += got;
                    return got;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut total = 0u64;
        while self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let got = self.dfs(s, t, u32::MAX);
                if got == 0 {
                    break;
                }
                total += got as u64;
            }
        }
        total
    }
}

/// Largest edge subset in which every A-vertex keeps at most `cap_a` edges
/// and every B-vertex at most `cap_b`. Returned sorted, deterministic.
pub fn b_matching(h: &BipartiteGraph, cap_a: usize, cap_b: usize) -> Vec<(u32, u32)> {
    let na = h.a_count();
    let nb = h.b_count();
    let (s, t) = (0usize, 1usize);
    let mut net = Dinic::new(2 + na + nb);
    for a in 0..na {
        net.add_edge(s, 2 + a, cap_a.min(h.degree_a(a as u32)) as u32);
    }
    for b in 0..nb {
        net.add_edge(2 + na + b, t, cap_b.min(h.degree_b(b as u32)) as u32);
    }
    let arc_ids: Vec<usize> = h
        .edges()
        .iter()
        .map(|&(a, b)| net.add_edge(2 + a as usize, 2 + na + b as usize, 1))
        .collect();
    net.max_flow(s, t);
    h.edges()
        .iter()
        .zip(arc_ids)
        .filter_map(|(&e, id)| (net.cap[id] == 0).then_some(e))
        .collect()
}

/// Edge subset giving every B-vertex degree exactly `r` (A-degrees
/// unconstrained), or `None` when no such subset exists.
pub fn exact_right_degrees(h: &BipartiteGraph, r: usize) -> Option<Vec<(u32, u32)>> {
    let chosen = b_matching(h, usize::MAX, r);
    let mut db = vec![0usize; h.b_count()];
    for &(_, b) in &chosen {
        db[b as usize] += 1;
    }
    db.iter().all(|&d| d == r).then_some(chosen)
}

// ==== regular cores ======================================================

/// Searches for an `s`-regular subgraph by repeated degree-capped selection:
/// vertices the selection cannot saturate are dropped and the selection is
/// rerun, until either every survivor has degree exactly `s` (success) or
/// nothing survives. A heuristic: it can miss cores in adversarial inputs,
/// so callers verify and fall back. Returns the core plus maps into `h`'s
/// A- and B-indices.
pub fn regular_core(h: &BipartiteGraph, s: usize) -> Option<(BipartiteGraph, Vec<u32>, Vec<u32>)> {
    if s == 0 {
        return None;
    }
    let mut cur = h.clone();
    let mut a_map: Vec<u32> = (0..h.a_count() as u32).collect();
    let mut b_map: Vec<u32> = (0..h.b_count() as u32).collect();
    loop {
        if cur.a_count() == 0 || cur.b_count() == 0 {
            return None;
        }
        let chosen = b_matching(&cur, s, s);
        let mut da = vec![0usize; cur.a_count()];
        let mut db = vec![0usize; cur.b_count()];
        for &(a, b) in &chosen {
            da[a as usize] += 1;
            db[b as usize] += 1;
        }
        let keep_a: Vec<u32> = (0..cur.a_count() as u32).filter(|&a| da[a as usize] == s).collect();
        let keep_b: Vec<u32> = (0..cur.b_count() as u32).filter(|&b| db[b as usize] == s).collect();
        if keep_a.len() == cur.a_count() && keep_b.len() == cur.b_count() {
            let core = BipartiteGraph::new(cur.a_count(), cur.b_count(), chosen)
                .expect("selected edges come from a valid graph");
            return Some((core, a_map, b_map));
        }
        if keep_a.is_empty() || keep_b.is_empty() {
            return None;
        }
        let (next, ka, kb) = cur.induced(&keep_a, &keep_b);
        a_map = ka.iter().map(|&i| a_map[i as usize]).collect();
        b_map = kb.iter().map(|&i| b_map[i as usize]).collect();
        cur = next;
    }
}

/// Extracts an `r`-regular spanning subgraph from an `s`-regular bipartite
/// graph (`r <= s`) by removing `r` successive perfect matchings; each
/// removal lowers every degree by one, so a perfect matching always exists.
pub fn regular_bipartite_extract(h: &BipartiteGraph, r: usize) -> Result<BipartiteGraph> {
    let s = h
        .regularity()
        .ok_or_else(|| Error::pre("extraction needs a regular bipartite graph"))?;
    if r > s {
        return Err(Error::pre(format!("cannot extract degree {r} from a {s}-regular graph")));
    }
    let mut work = h.clone();
    let mut kept: Vec<(u32, u32)> = Vec::new();
    for round in 0..r {
        let m = hopcroft_karp(&work);
        if m.size() != work.a_count() || m.size() != work.b_count() {
            return Err(Error::Internal(format!(
                "round {round}: regular bipartite graph lacked a perfect matching"
            )));
        }
        let pairs = m.pairs();
        work = work.without_edges(&pairs);
        kept.extend(pairs);
    }
    BipartiteGraph::new(h.a_count(), h.b_count(), kept)
}

// ==== minimal tight sets ==================================================

/// Finds an inclusion-minimal nonempty tight set of A-vertices
/// (`|N(S)| <= |S|`), or `None` when every nonempty A-subset expands.
///
/// Method: fix a maximum matching and build the digraph on A with an arc
/// `a -> partner(b)` for every matched neighbor `b` of `a`. Discard the
/// vertices that can reach a vertex with an unmatched neighbor; over the
/// rest, any terminal strongly connected component `C` satisfies
/// `N(C) = partners(C)`, hence is tight, and strong connectivity makes it
/// inclusion-minimal. If instead every vertex reaches an unmatched
/// neighbor, every A-subset has an alternating escape route and no tight
/// set exists.
pub fn minimal_tight_set(h: &BipartiteGraph) -> Option<Vec<u32>> {
    let na = h.a_count();
    if na == 0 {
        return None;
    }
    let m = hopcroft_karp(h);

    // Digraph arcs a -> partner(b), plus the escape marks.
    let mut arcs: Vec<Vec<u32>> = vec![Vec::new(); na];
    let mut escapes = vec![false; na];
    for a in 0..na as u32 {
        for &b in h.neighbors_a(a) {
            match m.b_to_a[b as usize] {
                None => escapes[a as usize] = true,
                Some(a2) if a2 != a => arcs[a as usize].push(a2),
                Some(_) => {}
            }
        }
        arcs[a as usize].sort_unstable();
        arcs[a as usize].dedup();
    }

    // Vertices with an alternating route to an unmatched B-vertex can never
    // sit inside a tight set; drop everything that reaches an escape.
    let mut rev: Vec<Vec<u32>> = vec![Vec::new(); na];
    for a in 0..na as u32 {
        for &a2 in &arcs[a as usize] {
            rev[a2 as usize].push(a);
        }
    }
    let mut doomed = vec![false; na];
    let mut queue: VecDeque<u32> = (0..na as u32).filter(|&a| escapes[a as usize]).collect();
    for &a in &queue {
        doomed[a as usize] = true;
    }
    while let Some(a) = queue.pop_front() {
        for &p in &rev[a as usize] {
            if !doomed[p as usize] {
                doomed[p as usize] = true;
                queue.push_back(p);
            }
        }
    }
    if doomed.iter().all(|&d| d) {
        return None;
    }

    let comps = strongly_connected_components(&arcs, &doomed);
    let mut comp_id = vec![usize::MAX; na];
    for (i, comp) in comps.iter().enumerate() {
        for &v in comp {
            comp_id[v as usize] = i;
        }
    }
    // Terminal components have no arcs leaving them; all their arcs stay
    // among surviving vertices because the survivor set is closed.
    let mut best: Option<&Vec<u32>> = None;
    for comp in &comps {
        let terminal = comp.iter().all(|&v| {
            arcs[v as usize].iter().all(|&w| {
                debug_assert!(!doomed[w as usize], "closed set has an arc to a doomed vertex");
                comp_id[w as usize] == comp_id[v as usize]
            })
        });
        if terminal && best.map_or(true, |b| comp.iter().min() < b.iter().min()) {
            best = Some(comp);
        }
    }
    let mut out = best.expect("a nonempty finite digraph has a terminal component").clone();
    out.sort_unstable();
    Some(out)
}

/// Iterative Tarjan over the vertices with `skip[v] == false`.
fn strongly_connected_components(adj: &[Vec<u32>], skip: &[bool]) -> Vec<Vec<u32>> {
    let n = adj.len();
    let mut index = vec![u32::MAX; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next = 0u32;
    let mut comps: Vec<Vec<u32>> = Vec::new();
    let mut frames: Vec<(u32, usize)> = Vec::new();

    for root in 0..n as u32 {
        if skip[root as usize] || index[root as usize] != u32::MAX {
            continue;
        }
        frames.push((root, 0));
        while let Some(&mut (v, ref mut child)) = frames.last_mut() {
            if *child == 0 {
                index[v as usize] = next;
                low[v as usize] = next;
                next += 1;
                stack.push(v);
                on_stack[v as usize] = true;
            }
            let mut descended = false;
            while *child < adj[v as usize].len() {
                let w = adj[v as usize][*child];
                *child += 1;
                if skip[w as usize] {
                    continue;
                }
                if index[w as usize] == u32::MAX {
                    frames.push((w, 0));
                    descended = true;
                    break;
                }
                if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
            }
            if descended {
                continue;
            }
            if low[v as usize] == index[v as usize] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w as usize] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comps.push(comp);
            }
            frames.pop();
            if let Some(&mut (p, _)) = frames.last_mut() {
                low[p as usize] = low[p as usize].min(low[v as usize]);
            }
        }
    }
    comps
}

/// Perfect matching between a tight set `a_set` and its full neighborhood,
/// as `(a, b)` pairs in `h`'s indices. Errors if the neighborhood cannot be
/// saturated, which cannot happen for the sets `minimal_tight_set` returns.
pub fn match_tight_set(h: &BipartiteGraph, a_set: &[u32]) -> Result<Vec<(u32, u32)>> {
    let mut b_set: Vec<u32> = a_set.iter().flat_map(|&a| h.neighbors_a(a).iter().copied()).collect();
    b_set.sort_unstable();
    b_set.dedup();
    let (sub, a_ids, b_ids) = h.induced(a_set, &b_set);
    let m = hopcroft_karp(&sub);
    if m.size() != b_set.len() {
        return Err(Error::Internal(format!(
            "tight set of size {} left {} of its {} neighbors unmatched",
            a_set.len(),
            b_set.len() - m.size(),
            b_set.len()
        )));
    }
    Ok(m
        .pairs()
        .into_iter()
        .map(|(a, b)| (a_ids[a as usize], b_ids[b as usize]))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::stage_rng;
    use rand::Rng;

    fn complete_bi(na: usize, nb: usize) -> BipartiteGraph {
        let mut edges = Vec::new();
        for a in 0..na as u32 {
            for b in 0..nb as u32 {
                edges.push((a, b));
            }
        }
        BipartiteGraph::new(na, nb, edges).unwrap()
    }

    fn random_bi(rng: &mut impl Rng, na: usize, nb: usize, p: f64) -> BipartiteGraph {
        let mut edges = Vec::new();
        for a in 0..na as u32 {
            for b in 0..nb as u32 {
                if rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        BipartiteGraph::new(na, nb, edges).unwrap()
    }

    /// Exact maximum matching by bitmask DP over B.
    fn brute_matching(h: &BipartiteGraph) -> usize {
        assert!(h.b_count() <= 16);
        let na = h.a_count();
        let mut memo = vec![u8::MAX; (na + 1) << h.b_count()];
        fn rec(h: &BipartiteGraph, a: usize, used: u32, memo: &mut [u8]) -> u8 {
            if a == h.a_count() {
                return 0;
            }
            let key = (a << h.b_count()) | used as usize;
            if memo[key] != u8::MAX {
                return memo[key];
            }
            let mut best = rec(h, a + 1, used, memo);
            for &b in h.neighbors_a(a as u32) {
                if used & (1 << b) == 0 {
                    best = best.max(1 + rec(h, a + 1, used | (1 << b), memo));
                }
            }
            memo[key] = best;
            best
        }
        rec(h, 0, 0, &mut memo) as usize
    }

    #[test]
    fn hopcroft_karp_on_known_graphs() {
        assert_eq!(hopcroft_karp(&complete_bi(3, 3)).size(), 3);
        assert_eq!(hopcroft_karp(&complete_bi(5, 2)).size(), 2);
        let path = BipartiteGraph::new(2, 2, vec![(0, 0), (1, 0), (1, 1)]).unwrap();
        assert_eq!(hopcroft_karp(&path).size(), 2);
        let empty = BipartiteGraph::new(3, 3, Vec::<(u32, u32)>::new()).unwrap();
        assert_eq!(hopcroft_karp(&empty).size(), 0);
    }

    #[test]
    fn hopcroft_karp_matches_brute_force() {
        let mut rng = stage_rng(21, "hk-brute");
        for _ in 0..60 {
            let na = rng.gen_range(1..9);
            let nb = rng.gen_range(1..9);
            let h = random_bi(&mut rng, na, nb, 0.4);
            let m = hopcroft_karp(&h);
            assert_eq!(m.size(), brute_matching(&h));
            // Consistency of the two directions.
            for (a, &mb) in m.a_to_b.iter().enumerate() {
                if let Some(b) = mb {
                    assert!(h.has_edge(a as u32, b));
                    assert_eq!(m.b_to_a[b as usize], Some(a as u32));
                }
            }
        }
    }

    #[test]
    fn b_matching_respects_caps_and_is_maximum() {
        let mut rng = stage_rng(22, "bmatch-brute");
        for _ in 0..40 {
            let na = rng.gen_range(1..5);
            let nb = rng.gen_range(1..5);
            let h = random_bi(&mut rng, na, nb, 0.5);
            if h.edge_count() > 14 {
                continue;
            }
            let ca = rng.gen_range(1..4usize);
            let cb = rng.gen_range(1..4usize);
            let picked = b_matching(&h, ca, cb);
            let mut da = vec![0usize; na];
            let mut db = vec![0usize; nb];
            for &(a, b) in &picked {
                assert!(h.has_edge(a, b));
                da[a as usize] += 1;
                db[b as usize] += 1;
            }
            assert!(da.iter().all(|&d| d <= ca));
            assert!(db.iter().all(|&d| d <= cb));
            // Exhaustive maximum over all edge subsets.
            let m = h.edge_count();
            let mut best = 0;
            for mask in 0u32..(1 << m) {
                let mut ea = vec![0usize; na];
                let mut eb = vec![0usize; nb];
                let mut ok = true;
                let mut count = 0;
                for (i, &(a, b)) in h.edges().iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        ea[a as usize] += 1;
                        eb[b as usize] += 1;
                        count += 1;
                        if ea[a as usize] > ca || eb[b as usize] > cb {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok {
                    best = best.max(count);
                }
            }
            assert_eq!(picked.len(), best);
        }
    }

    #[test]
    fn b_matching_with_unit_caps_agrees_with_hopcroft_karp() {
        let mut rng = stage_rng(23, "bmatch-hk");
        for _ in 0..40 {
            let (na, nb) = (rng.gen_range(1..12), rng.gen_range(1..12));
            let h = random_bi(&mut rng, na, nb, 0.3);
            assert_eq!(b_matching(&h, 1, 1).len(), hopcroft_karp(&h).size());
        }
    }

    #[test]
    fn exact_right_degrees_known_cases() {
        // Every B-vertex of K_{3,4} can take 2 of its 3 edges.
        let picked = exact_right_degrees(&complete_bi(3, 4), 2).unwrap();
        assert_eq!(picked.len(), 8);
        // A star cannot give 3 leaves degree 2 each.
        assert!(exact_right_degrees(&complete_bi(1, 3), 2).is_none());
    }

    #[test]
    fn regular_core_known_cases() {
        // An 8-cycle as a 2-regular bipartite graph survives whole.
        let c8 = BipartiteGraph::new(4, 4, vec![(0, 0), (0, 3), (1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3)]).unwrap();
        let (core, _, _) = regular_core(&c8, 2).unwrap();
        assert_eq!(core.edge_count(), 8);
        assert_eq!(core.regularity(), Some(2));

        // A star has no 2-regular subgraph.
        assert!(regular_core(&complete_bi(1, 5), 2).is_none());
        assert!(regular_core(&complete_bi(4, 4), 0).is_none());
    }

    #[test]
    fn regular_core_strips_pendants_off_a_planted_block() {
        // K_{3,3} plus pendant B-vertices hanging off A-vertex 0.
        let mut edges = Vec::new();
        for a in 0..3u32 {
            for b in 0..3u32 {
                edges.push((a, b));
            }
        }
        edges.push((0, 3));
        edges.push((0, 4));
        let h = BipartiteGraph::new(3, 5, edges).unwrap();
        let (core, a_map, b_map) = regular_core(&h, 3).unwrap();
        assert_eq!(core.regularity(), Some(3));
        assert_eq!(a_map, vec![0, 1, 2]);
        assert_eq!(b_map, vec![0, 1, 2]);
        // The core's edges exist in the host.
        for &(a, b) in core.edges() {
            assert!(h.has_edge(a_map[a as usize], b_map[b as usize]));
        }
    }

    #[test]
    fn regular_extract_peels_matchings() {
        let h = complete_bi(4, 4);
        for r in 0..=4 {
            let sub = regular_bipartite_extract(&h, r).unwrap();
            assert_eq!(sub.regularity(), Some(r));
            for &(a, b) in sub.edges() {
                assert!(h.has_edge(a, b));
            }
        }
        assert!(regular_bipartite_extract(&h, 5).is_err());
        let irregular = BipartiteGraph::new(2, 2, vec![(0, 0), (0, 1), (1, 0)]).unwrap();
        assert!(regular_bipartite_extract(&irregular, 1).is_err());
    }

    #[test]
    fn tight_set_on_expander_is_none() {
        // K_{3,4}: every A-subset has 4 neighbors, never tight.
        assert!(minimal_tight_set(&complete_bi(3, 4)).is_none());
        // K_{3,3}: the whole side is tight; some pair is minimal? No:
        // every pair has 3 neighbors > 2, so only the full side is tight.
        assert_eq!(minimal_tight_set(&complete_bi(3, 3)), Some(vec![0, 1, 2]));
    }

    #[test]
    fn tight_set_skips_expanding_pockets() {
        // a0, a1 share one neighbor; a2, a3 jointly see three vertices.
        // {a0} and {a1} are the minimal tight sets; {a2, a3} region expands
        // pairwise but its singletons do not ({a2}: 3 neighbors > 1).
        let h = BipartiteGraph::new(
            4,
            4,
            vec![(0, 0), (1, 0), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)],
        )
        .unwrap();
        let s = minimal_tight_set(&h).unwrap();
        assert!(s == vec![0] || s == vec![1], "got {s:?}");
    }

    /// Reference enumeration of tight sets via bitmasks.
    fn tight_masks(h: &BipartiteGraph) -> Vec<u32> {
        let na = h.a_count();
        let nbh: Vec<u32> = (0..na as u32)
            .map(|a| h.neighbors_a(a).iter().fold(0u32, |acc, &b| acc | 1 << b))
            .collect();
        (1u32..1 << na)
            .filter(|&mask| {
                let mut n = 0u32;
                for a in 0..na {
                    if mask >> a & 1 == 1 {
                        n |= nbh[a];
                    }
                }
                n.count_ones() <= mask.count_ones()
            })
            .collect()
    }

    #[test]
    fn tight_set_agrees_with_exhaustive_enumeration() {
        let mut rng = stage_rng(24, "tight-exhaustive");
        for round in 0..120 {
            let na = rng.gen_range(1..9);
            let nb = rng.gen_range(1..9);
            let p = rng.gen_range(0.15..0.6);
            let h = random_bi(&mut rng, na, nb, p);
            let all_tight = tight_masks(&h);
            match minimal_tight_set(&h) {
                None => assert!(all_tight.is_empty(), "round {round}: missed a tight set"),
                Some(s) => {
                    let mask = s.iter().fold(0u32, |acc, &a| acc | 1 << a);
                    assert!(all_tight.contains(&mask), "round {round}: returned set not tight");
                    // Inclusion-minimal: no proper nonempty submask is tight.
                    let mut sub = (mask - 1) & mask;
                    while sub != 0 {
                        assert!(!all_tight.contains(&sub), "round {round}: {s:?} not minimal");
                        sub = (sub - 1) & mask;
                    }
                }
            }
        }
    }

    #[test]
    fn matching_a_tight_set_saturates_its_neighborhood() {
        let mut rng = stage_rng(25, "tight-match");
        let mut seen = 0;
        for _ in 0..200 {
            let (na, nb) = (rng.gen_range(2..10), rng.gen_range(2..10));
            let h = random_bi(&mut rng, na, nb, 0.3);
            if let Some(s) = minimal_tight_set(&h) {
                let pairs = match_tight_set(&h, &s).unwrap();
                let mut b_seen: Vec<u32> = pairs.iter().map(|&(_, b)| b).collect();
                b_seen.sort_unstable();
                b_seen.dedup();
                let mut expect: Vec<u32> =
                    s.iter().flat_map(|&a| h.neighbors_a(a).iter().copied()).collect();
                expect.sort_unstable();
                expect.dedup();
                assert_eq!(b_seen, expect);
                for &(a, b) in &pairs {
                    assert!(h.has_edge(a, b));
                    assert!(s.contains(&a));
                }
                seen += 1;
            }
        }
        assert!(seen > 20, "corpus failed to produce tight instances");
    }
}
