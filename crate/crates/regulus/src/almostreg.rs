//! Hall-chain almost-regularization: grow nested tight sets with
//! edge-disjoint perfect matchings, pick a window of stages whose top set
//! has barely shrunk, and union those matchings into a subgraph whose
//! max/min degree ratio is at most 4. Composing with exact extraction
//! turns the almost-regular subgraph into an exactly regular one.

use crate::config::ConstantsConfig;
use crate::graph::{bipartite_half, bipartite_peel, min_degree_peel, Graph, SubgraphWitness};
use crate::matching::{match_tight_set, minimal_tight_set};
use crate::nearreg::regular_in_almost_regular;
use crate::oracle::check_regular_witness;
use crate::{BipartiteGraph, Error, Result};
use rand::Rng;
use std::collections::BTreeSet;

// ==== Hall chains =======================================================

/// A chain of nested vertex sets A_1 ⊇ A_2 ⊇ ... and B_1 ⊇ B_2 ⊇ ...
/// with pairwise edge-disjoint perfect matchings M_i between A_i and B_i,
/// where M_i avoids all earlier matchings. Sets and matching pairs are in
/// the working orientation: `swapped` records that the host's sides were
/// exchanged so the working A side is the larger one.
#[derive(Clone, Debug)]
pub struct PyberChain {
    pub d: usize,
    pub swapped: bool,
    pub a_sets: Vec<Vec<u32>>,
    pub b_sets: Vec<Vec<u32>>,
    pub matchings: Vec<Vec<(u32, u32)>>,
}

fn bi_min_degree(h: &BipartiteGraph) -> usize {
    let a = (0..h.a_count() as u32).map(|v| h.degree_a(v)).min().unwrap_or(0);
    let b = (0..h.b_count() as u32).map(|v| h.degree_b(v)).min().unwrap_or(0);
    a.min(b)
}

/// The host graph in working orientation: sides swapped when A is the
/// smaller part.
fn working_orientation(h: &BipartiteGraph) -> (BipartiteGraph, bool) {
    if h.a_count() >= h.b_count() {
        (h.clone(), false)
    } else {
        let flipped = h.edges().iter().map(|&(a, b)| (b, a));
        (BipartiteGraph::new(h.b_count(), h.a_count(), flipped).expect("flip preserves validity"), true)
    }
}

impl PyberChain {
    pub fn depth(&self) -> usize {
        self.matchings.len()
    }

    /// Element-wise check of every chain invariant against its host:
    /// nesting, |A_i| = |B_i| = |M_i|, M_i a perfect matching between A_i
    /// and B_i using host edges, pairwise edge-disjointness, and residual
    /// degree at least d - i for every u in A_i after removing M_1..M_i.
    pub fn verify(&self, h: &BipartiteGraph) -> Result<()> {
        let (work, swapped) = working_orientation(h);
        if swapped != self.swapped {
            return Err(Error::Internal("chain orientation does not match its host".into()));
        }
        let t = self.depth();
        if t == 0 || self.a_sets.len() != t || self.b_sets.len() != t {
            return Err(Error::Internal("chain stage lists are inconsistent".into()));
        }
        let mut used: BTreeSet<(u32, u32)> = BTreeSet::new();
        for i in 0..t {
            let a_i: BTreeSet<u32> = self.a_sets[i].iter().copied().collect();
            let b_i: BTreeSet<u32> = self.b_sets[i].iter().copied().collect();
            if a_i.len() != b_i.len() || a_i.len() != self.matchings[i].len() {
                return Err(Error::Internal(format!("stage {} sizes disagree", i + 1)));
            }
            if i > 0 {
                let prev_a: BTreeSet<u32> = self.a_sets[i - 1].iter().copied().collect();
                let prev_b: BTreeSet<u32> = self.b_sets[i - 1].iter().copied().collect();
                if !a_i.is_subset(&prev_a) || !b_i.is_subset(&prev_b) {
                    return Err(Error::Internal(format!("stage {} breaks nesting", i + 1)));
                }
            }
            let mut cov_a = BTreeSet::new();
            let mut cov_b = BTreeSet::new();
            for &(a, b) in &self.matchings[i] {
                if !a_i.contains(&a) || !b_i.contains(&b) || !work.has_edge(a, b) {
                    return Err(Error::Internal(format!("stage {} matching leaves its stage sets", i + 1)));
                }
                if !used.insert((a, b)) {
                    return Err(Error::Internal(format!("edge ({a}, {b}) reused by stage {}", i + 1)));
                }
                if !cov_a.insert(a) || !cov_b.insert(b) {
                    return Err(Error::Internal(format!("stage {} matching is not a matching", i + 1)));
                }
            }
            if cov_a != a_i || cov_b != b_i {
                return Err(Error::Internal(format!("stage {} matching is not perfect", i + 1)));
            }
            // Residual degree after this stage.
            for &a in &a_i {
                let residual = work
                    .neighbors_a(a)
                    .iter()
                    .filter(|&&b| b_i.contains(&b) && !used.contains(&(a, b)))
                    .count();
                if residual + (i + 1) < self.d {
                    return Err(Error::Internal(format!(
                        "vertex {a} has residual degree {residual} at stage {}, below {}",
                        i + 1,
                        self.d as isize - (i as isize + 1)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Grows a Hall chain of depth max(1, d/2): each stage takes a minimal
/// set with no Hall surplus in the residual graph (it always exists since
/// |B_i| = |A_i|), so the stage admits a perfect matching; removing the
/// matching costs each surviving vertex at most one residual edge.
pub fn pyber_chain(h: &BipartiteGraph, d: usize) -> Result<PyberChain> {
    if d < 1 {
        return Err(Error::pre("chain depth parameter d must be at least 1"));
    }
    if h.a_count() == 0 || h.b_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if bi_min_degree(h) < d {
        return Err(Error::pre(format!(
            "minimum degree {} is below d = {d}",
            bi_min_degree(h)
        )));
    }
    let (work, swapped) = working_orientation(h);
    let t = (d / 2).max(1);

    let mut a_cur: Vec<u32> = (0..work.a_count() as u32).collect();
    let mut b_cur: Vec<u32> = (0..work.b_count() as u32).collect();
    let mut used: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut a_sets = Vec::with_capacity(t);
    let mut b_sets = Vec::with_capacity(t);
    let mut matchings = Vec::with_capacity(t);

    for stage in 1..=t {
        let mut b_local = vec![u32::MAX; work.b_count()];
        for (j, &b) in b_cur.iter().enumerate() {
            b_local[b as usize] = j as u32;
        }
        let mut edges = Vec::new();
        for (ai, &a) in a_cur.iter().enumerate() {
            for &b in work.neighbors_a(a) {
                if b_local[b as usize] != u32::MAX && !used.contains(&(a, b)) {
                    edges.push((ai as u32, b_local[b as usize]));
                }
            }
        }
        let local = BipartiteGraph::new(a_cur.len(), b_cur.len(), edges)?;
        let tight = minimal_tight_set(&local).ok_or_else(|| {
            Error::Internal(format!("stage {stage} found no set without Hall surplus"))
        })?;
        let pairs = match_tight_set(&local, &tight)?;
        let a_next: Vec<u32> = {
            let mut v: Vec<u32> = tight.iter().map(|&i| a_cur[i as usize]).collect();
            v.sort_unstable();
            v
        };
        let b_next: Vec<u32> = {
            let mut seen = BTreeSet::new();
            for &i in &tight {
                for &b in local.neighbors_a(i) {
                    seen.insert(b_cur[b as usize]);
                }
            }
            seen.into_iter().collect()
        };
        if b_next.len() != a_next.len() {
            return Err(Error::Internal(format!(
                "stage {stage} set expands: |A| = {}, |N(A)| = {}",
                a_next.len(),
                b_next.len()
            )));
        }
        let global_pairs: Vec<(u32, u32)> = pairs
            .iter()
            .map(|&(ai, bi)| (a_cur[ai as usize], b_cur[bi as usize]))
            .collect();
        for &p in &global_pairs {
            if !used.insert(p) {
                return Err(Error::Internal(format!("stage {stage} reused an edge")));
            }
        }
        a_sets.push(a_next.clone());
        b_sets.push(b_next.clone());
        matchings.push(global_pairs);
        a_cur = a_next;
        b_cur = b_next;
    }

    let chain = PyberChain { d, swapped, a_sets, b_sets, matchings };
    chain.verify(h)?;
    Ok(chain)
}

// ==== the almost-regular subgraph =======================================

/// Result of almost-regularization: the subgraph (max/min degree ratio at
/// most 4), the chain depth, the matching window used, and the declared
/// average-degree floor (binding only when at least 1).
#[derive(Clone, Debug)]
pub struct AlmostRegOutcome {
    pub witness: SubgraphWitness,
    pub chain_depth: usize,
    pub window_start: usize,
    pub window_len: usize,
    pub bound: f64,
}

/// The guaranteed average-degree floor d / (100 log2(32 n / d)).
pub fn almost_regular_bound(n: usize, d: f64) -> f64 {
    d / (100.0 * (32.0 * n as f64 / d).log2())
}

fn single_edge_outcome(g: &Graph, t: usize, bound: f64) -> Result<AlmostRegOutcome> {
    if bound > 1.0 {
        return Err(Error::Internal(format!(
            "degenerate window but the average-degree floor {bound:.3} exceeds a single edge"
        )));
    }
    let &(u, v) = g.edges().first().ok_or(Error::EmptyGraph)?;
    let graph = Graph::new(2, [(0u32, 1u32)])?;
    let witness = SubgraphWitness::new(graph, vec![u, v])?;
    Ok(AlmostRegOutcome { witness, chain_depth: t, window_start: 0, window_len: 0, bound })
}

/// Finds a subgraph with max/min degree ratio at most 4 and average
/// degree at least d / (100 log2(32 n / d)) when that floor is at least 1
/// (any single edge satisfies a floor below 1). Pipeline: bipartite
/// halving, peel to min degree d/4, grow a Hall chain, find a window of
/// s+1 stages over which the top set at most halves, union that window's
/// matchings (max degree s+1, at least (s+1)|A_j|/2 edges), and peel at
/// (s+1)/4. Deterministic.
pub fn almost_regular_subgraph(g: &Graph) -> Result<AlmostRegOutcome> {
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let d = g.avg_degree();
    if d < 1.0 {
        return Err(Error::pre(format!("average degree {d:.3} is below 1")));
    }
    let n = g.vertex_count();
    let bound = almost_regular_bound(n, d);

    let (hb, a_ids, b_ids) = bipartite_half(g)?;
    let (hp, pa, pb) = bipartite_peel(&hb, d / 4.0);
    if hp.edge_count() == 0 {
        return single_edge_outcome(g, 0, bound);
    }
    let pa_g: Vec<u32> = pa.iter().map(|&i| a_ids[i as usize]).collect();
    let pb_g: Vec<u32> = pb.iter().map(|&i| b_ids[i as usize]).collect();

    let d_chain = bi_min_degree(&hp);
    if d_chain < 1 {
        return single_edge_outcome(g, 0, bound);
    }
    let chain = pyber_chain(&hp, d_chain)?;
    let t = chain.depth();

    let log_ratio = (8.0 * n as f64 / d).log2();
    let s = (t as f64 / log_ratio).floor() as usize;
    if s == 0 || s >= t {
        return single_edge_outcome(g, t, bound);
    }

    // First window j (1-indexed stages) over which the top set at most
    // halves; one exists whenever the sets shrink slowly enough.
    let Some(j) = (1..=t - s).find(|&j| 2 * chain.a_sets[j + s - 1].len() >= chain.a_sets[j - 1].len())
    else {
        return single_edge_outcome(g, t, bound);
    };

    let window: Vec<&Vec<(u32, u32)>> = chain.matchings[j - 1..j + s].iter().collect();
    let mut union_pairs: Vec<(u32, u32)> = Vec::new();
    for m in &window {
        union_pairs.extend(m.iter().copied());
    }
    // Working orientation -> peeled-graph sides -> host ids.
    let to_g = |&(wa, wb): &(u32, u32)| -> (u32, u32) {
        let (a, b) = if chain.swapped { (wb, wa) } else { (wa, wb) };
        (pa_g[a as usize], pb_g[b as usize])
    };
    let g_pairs: Vec<(u32, u32)> = union_pairs.iter().map(to_g).collect();
    let mut vertices: Vec<u32> = g_pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
    vertices.sort_unstable();
    vertices.dedup();
    let mut local = vec![u32::MAX; g.vertex_count()];
    for (i, &v) in vertices.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let h_union = Graph::new(
        vertices.len(),
        g_pairs.iter().map(|&(u, v)| (local[u as usize], local[v as usize])),
    )?;

    // Window-graph guarantees, checked exactly.
    let a_j = chain.a_sets[j - 1].len();
    if 2 * h_union.edge_count() < (s + 1) * a_j {
        return Err(Error::Internal("window union has too few edges".into()));
    }
    if h_union.max_degree().unwrap_or(0) > s + 1 {
        return Err(Error::Internal("window union exceeds its degree cap".into()));
    }

    let (peeled, pmap) = min_degree_peel(&h_union, (s + 1) as f64 / 4.0);
    if peeled.vertex_count() == 0 || peeled.edge_count() == 0 {
        return Err(Error::Internal("window peel emptied the union".into()));
    }
    let final_ids: Vec<u32> = pmap.iter().map(|&i| vertices[i as usize]).collect();
    let witness = SubgraphWitness::new(peeled, final_ids)?;
    debug_assert!(witness.is_subgraph_of(g));

    let h = &witness.graph;
    let (min_d, max_d) = (h.min_degree().unwrap_or(0), h.max_degree().unwrap_or(0));
    if max_d > 4 * min_d {
        return Err(Error::Internal(format!("ratio {max_d}/{min_d} exceeds 4")));
    }
    if bound >= 1.0 && h.avg_degree() < bound {
        return Err(Error::Internal(format!(
            "average degree {:.3} misses the floor {bound:.3}",
            h.avg_degree()
        )));
    }
    Ok(AlmostRegOutcome { witness, chain_depth: t, window_start: j, window_len: s + 1, bound })
}

// ==== regularization by composition =====================================

/// Finds an exactly r-regular subgraph by almost-regularizing first and
/// extracting from the result; when the almost-regular stage is too thin
/// for extraction the same extraction runs directly on the input. The
/// failure report carries the intermediate degrees actually achieved.
pub fn regular_by_regularization<R: Rng>(
    g: &Graph,
    r: usize,
    cfg: &ConstantsConfig,
    rng: &mut R,
) -> Result<SubgraphWitness> {
    cfg.validate()?;
    if r == 0 {
        return Err(Error::pre("regularization needs r >= 1"));
    }
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.edge_count() == 0 {
        return Err(Error::RouteFailed("no edges, so no regular subgraph".into()));
    }

    let mut stage_report = String::from("almost-regular stage skipped (average degree below 1)");
    if g.avg_degree() >= 1.0 {
        match almost_regular_subgraph(g) {
            Ok(ar) => {
                let h = &ar.witness.graph;
                stage_report = format!(
                    "almost-regular stage reached {} vertices, degrees {}..{} (avg {:.2})",
                    h.vertex_count(),
                    h.min_degree().unwrap_or(0),
                    h.max_degree().unwrap_or(0),
                    h.avg_degree()
                );
                if let Ok(w) = regular_in_almost_regular(h, r, cfg, rng) {
                    let lifted = w.lift(&ar.witness.vertices);
                    check_regular_witness(g, &lifted, r)?;
                    return Ok(lifted);
                }
            }
            Err(e) => stage_report = format!("almost-regular stage failed: {e}"),
        }
    }

    match regular_in_almost_regular(g, r, cfg, rng) {
        Ok(w) => {
            check_regular_witness(g, &w, r)?;
            Ok(w)
        }
        Err(e) => Err(Error::RouteFailed(format!(
            "no {r}-regular subgraph extracted: {stage_report}; direct extraction: {e}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::stage_rng;
    use crate::graph::{complete_bipartite, cycle, path};
    use crate::oracle::is_r_regular;

    fn bipartite_circulant(n: usize, offsets: &[u32]) -> BipartiteGraph {
        let edges = (0..n as u32).flat_map(|a| offsets.iter().map(move |&o| (a, (a + o) % n as u32)));
        BipartiteGraph::new(n, n, edges).unwrap()
    }

    #[test]
    fn chain_on_a_perfect_matching_is_a_single_tight_edge() {
        let h = BipartiteGraph::new(3, 3, [(0, 0), (1, 1), (2, 2)]).unwrap();
        let chain = pyber_chain(&h, 1).unwrap();
        assert_eq!(chain.depth(), 1);
        assert_eq!(chain.a_sets[0].len(), 1);
        assert_eq!(chain.matchings[0].len(), 1);
        chain.verify(&h).unwrap();
    }

    #[test]
    fn chain_on_a_six_cycle_is_one_perfect_matching() {
        // C_6 as a bipartite graph: a_i adjacent to b_i and b_{i+1}.
        let h = BipartiteGraph::new(3, 3, [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2), (2, 0)]).unwrap();
        let chain = pyber_chain(&h, 2).unwrap();
        assert_eq!(chain.depth(), 1);
        assert_eq!(chain.matchings[0].len(), 3);
        chain.verify(&h).unwrap();
    }

    #[test]
    fn chain_invariants_hold_on_seeded_hosts() {
        let mut rng = stage_rng(31, "chain-hosts");
        // A regular host plus random extra edges keeps min degree >= 10.
        let base = bipartite_circulant(20, &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9]);
        let mut edges: BTreeSet<(u32, u32)> = base.edges().iter().copied().collect();
        for _ in 0..40 {
            let a = rand::Rng::gen_range(&mut rng, 0..20u32);
            let b = rand::Rng::gen_range(&mut rng, 0..20u32);
            edges.insert((a, b));
        }
        let h = BipartiteGraph::new(20, 20, edges).unwrap();
        let chain = pyber_chain(&h, 8).unwrap();
        assert_eq!(chain.depth(), 4);
        chain.verify(&h).unwrap();

        // Unequal sides exercise the swap.
        let wide = BipartiteGraph::new(
            6,
            9,
            (0..6u32).flat_map(|a| (0..9u32).map(move |b| (a, b))),
        )
        .unwrap();
        let chain = pyber_chain(&wide, 5).unwrap();
        assert!(chain.swapped);
        assert_eq!(chain.depth(), 2);
        chain.verify(&wide).unwrap();
    }

    #[test]
    fn chain_rejects_thin_hosts() {
        let h = BipartiteGraph::new(3, 3, [(0, 0), (1, 1), (2, 2)]).unwrap();
        assert!(pyber_chain(&h, 2).is_err());
        assert!(pyber_chain(&h, 0).is_err());
    }

    #[test]
    fn almost_regular_ratio_holds_on_small_graphs() {
        for g in [cycle(8), complete_bipartite(6, 6), path(12)] {
            let out = almost_regular_subgraph(&g).unwrap();
            let h = &out.witness.graph;
            let (lo, hi) = (h.min_degree().unwrap(), h.max_degree().unwrap());
            assert!(hi <= 4 * lo, "ratio {hi}/{lo}");
            assert!(out.bound < 1.0);
            assert!(out.witness.is_subgraph_of(&g));
        }
    }

    #[test]
    fn almost_regular_window_route_on_regular_bipartite_hosts() {
        // 12-regular bipartite on 30+30: the chain keeps whole sides, so
        // the first window qualifies and the union is a clean subgraph.
        let h = bipartite_circulant(30, &[0, 1, 2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(h.regularity(), Some(12));
        let g = h.to_graph();
        let out = almost_regular_subgraph(&g).unwrap();
        assert!(out.window_len >= 1);
        let hg = &out.witness.graph;
        assert!(hg.max_degree().unwrap() <= 4 * hg.min_degree().unwrap());
        assert!(out.witness.is_subgraph_of(&g));
    }

    #[test]
    fn almost_regular_contract_on_a_seeded_dense_graph() {
        let mut rng = stage_rng(77, "ar-dense");
        let n = 300usize;
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if rand::Rng::gen_bool(&mut rng, 0.1) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, edges).unwrap();
        let out = almost_regular_subgraph(&g).unwrap();
        let h = &out.witness.graph;
        assert!(h.max_degree().unwrap() <= 4 * h.min_degree().unwrap());
        if out.bound >= 1.0 {
            assert!(h.avg_degree() >= out.bound);
        }
    }

    #[test]
    fn regularization_succeeds_and_certifies_on_k66() {
        let cfg = ConstantsConfig::default();
        let mut rng = stage_rng(41, "reg-k66");
        let g = complete_bipartite(6, 6);
        let w = regular_by_regularization(&g, 2, &cfg, &mut rng).unwrap();
        assert!(is_r_regular(&w.graph, 2));
        assert!(w.is_subgraph_of(&g));
    }

    #[test]
    fn regularization_fails_on_trees() {
        let cfg = ConstantsConfig::default();
        let mut rng = stage_rng(42, "reg-tree");
        let g = path(10);
        match regular_by_regularization(&g, 2, &cfg, &mut rng) {
            Err(Error::RouteFailed(msg)) => {
                assert!(msg.contains("almost-regular stage"), "{msg}");
            }
            other => panic!("expected explicit failure, got {other:?}"),
        }
    }

    #[test]
    fn regularization_on_a_seeded_dense_graph() {
        let cfg = ConstantsConfig::default();
        let mut rng = stage_rng(43, "reg-dense");
        let n = 200usize;
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if rand::Rng::gen_bool(&mut rng, 0.3) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, edges).unwrap();
        let w = regular_by_regularization(&g, 3, &cfg, &mut rng).unwrap();
        assert!(is_r_regular(&w.graph, 3));
        assert!(w.is_subgraph_of(&g));
    }
}
