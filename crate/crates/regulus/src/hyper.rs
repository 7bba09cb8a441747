//! Multi-hypergraph machinery: exhaustive matching enumeration with its
//! counting floor, exact sunflower search (budgeted, with an explicit
//! incomplete-search verdict), regular sub-hypergraph extraction by
//! core-stripping a sunflower of matchings, and the reductions between
//! bipartite graphs with exact right degrees and uniform hypergraphs.

use crate::config::ConstantsConfig;
use crate::{BipartiteGraph, Error, Result};
use rand::Rng;
use std::collections::BTreeMap;

// ==== multi-hypergraphs =================================================

/// An r-uniform multi-hypergraph: edges are r-element vertex sets, stored
/// sorted; duplicate edges are allowed and keep distinct ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiHypergraph {
    n: usize,
    r: usize,
    edges: Vec<Vec<u32>>,
}

impl MultiHypergraph {
    pub fn new(n: usize, r: usize, edges: impl IntoIterator<Item = Vec<u32>>) -> Result<MultiHypergraph> {
        if r < 1 {
            return Err(Error::pre("uniformity must be at least 1"));
        }
        let mut stored = Vec::new();
        for (id, mut e) in edges.into_iter().enumerate() {
            e.sort_unstable();
            if e.len() != r {
                return Err(Error::pre(format!("edge {id} has {} vertices, expected {r}", e.len())));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::pre(format!("edge {id} repeats a vertex")));
            }
            if let Some(&v) = e.last() {
                if v as usize >= n {
                    return Err(Error::VertexOutOfRange { id: v, n });
                }
            }
            stored.push(e);
        }
        Ok(MultiHypergraph { n, r, edges: stored })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn uniformity(&self) -> usize {
        self.r
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: u32) -> &[u32] {
        &self.edges[id as usize]
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    /// Occurrence count of v over all edges.
    pub fn degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|e| e.binary_search(&v).is_ok()).count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for e in &self.edges {
            for &v in e {
                deg[v as usize] += 1;
            }
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Average degree r * m / N.
    pub fn avg_degree(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.r * self.edges.len()) as f64 / self.n as f64
    }
}

// ==== matchings =========================================================

/// A set of pairwise vertex-disjoint edge ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperMatching {
    pub edge_ids: Vec<u32>,
}

impl HyperMatching {
    pub fn verify(&self, hg: &MultiHypergraph) -> Result<()> {
        let mut seen = vec![false; hg.vertex_count()];
        for &id in &self.edge_ids {
            if id as usize >= hg.edge_count() {
                return Err(Error::pre(format!("edge id {id} out of range")));
            }
            for &v in hg.edge(id) {
                if seen[v as usize] {
                    return Err(Error::pre(format!("vertex {v} covered twice")));
                }
                seen[v as usize] = true;
            }
        }
        Ok(())
    }
}

/// All matchings of size exactly t, in DFS order over increasing edge
/// ids, truncated at `cap`: the result is the complete list whenever its
/// length is below cap.
pub fn enumerate_matchings(hg: &MultiHypergraph, t: usize, cap: usize) -> Result<Vec<HyperMatching>> {
    if t < 1 || cap < 1 {
        return Err(Error::pre("need t >= 1 and cap >= 1"));
    }
    let mut out = Vec::new();
    let mut used = vec![false; hg.vertex_count()];
    let mut cur: Vec<u32> = Vec::with_capacity(t);

    fn rec(
        hg: &MultiHypergraph,
        t: usize,
        cap: usize,
        start: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<u32>,
        out: &mut Vec<HyperMatching>,
    ) {
        if out.len() >= cap {
            return;
        }
        if cur.len() == t {
            out.push(HyperMatching { edge_ids: cur.clone() });
            return;
        }
        let need = t - cur.len();
        let m = hg.edge_count();
        for id in start..m {
            if m - id < need {
                break;
            }
            let e = hg.edge(id as u32);
            if e.iter().any(|&v| used[v as usize]) {
                continue;
            }
            for &v in e {
                used[v as usize] = true;
            }
            cur.push(id as u32);
            rec(hg, t, cap, id + 1, used, cur, out);
            cur.pop();
            for &v in e {
                used[v as usize] = false;
            }
            if out.len() >= cap {
                return;
            }
        }
    }
    rec(hg, t, cap, 0, &mut used, &mut cur, &mut out);
    Ok(out)
}

/// The counting floor (e / 2t)^t for size-t matchings, plus whether the
/// hypothesis t <= N / (2 r^2 mu) + 1 holds. Requires the degree spread
/// condition max degree <= mu * average degree.
pub fn matching_count_bound(hg: &MultiHypergraph, t: usize, mu: f64) -> Result<(f64, bool)> {
    if t < 1 || !(mu > 0.0) {
        return Err(Error::pre("need t >= 1 and mu > 0"));
    }
    let d = hg.avg_degree();
    if hg.max_degree() as f64 > mu * d {
        return Err(Error::pre(format!(
            "max degree {} exceeds mu * average = {:.3}",
            hg.max_degree(),
            mu * d
        )));
    }
    let e = hg.edge_count() as f64;
    let bound = (e / (2.0 * t as f64)).powi(t as i32);
    let r = hg.uniformity() as f64;
    let hypothesis = t as f64 <= hg.vertex_count() as f64 / (2.0 * r * r * mu) + 1.0;
    Ok((bound, hypothesis))
}

// ==== sunflowers ========================================================

/// Petals (indices into the searched family) whose pairwise intersections
/// all equal `core`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sunflower {
    pub petals: Vec<usize>,
    pub core: Vec<u32>,
}

impl Sunflower {
    /// Checks the defining predicate exactly: petals are valid indices of
    /// pairwise-distinct sets, and every pairwise intersection equals the
    /// core.
    pub fn verify(&self, family: &[Vec<u32>]) -> Result<()> {
        if self.petals.len() < 2 {
            return Err(Error::pre("a sunflower needs at least 2 petals"));
        }
        let sets: Vec<Vec<u32>> = self
            .petals
            .iter()
            .map(|&i| {
                family.get(i).cloned().ok_or_else(|| Error::pre(format!("petal index {i} out of range")))
            })
            .collect::<Result<Vec<Vec<u32>>>>()?
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s
            })
            .collect();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if sets[i] == sets[j] {
                    return Err(Error::pre("two petals are the same set"));
                }
                if intersect_sorted(&sets[i], &sets[j]) != self.core {
                    return Err(Error::pre("a pairwise intersection differs from the core"));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of a sunflower search: found, certified absent, or stopped by
/// the budget before either could be certified.
#[derive(Clone, Debug)]
pub enum SunflowerVerdict {
    Found(Sunflower),
    Absent,
    Indeterminate,
}

impl SunflowerVerdict {
    pub fn found(&self) -> Option<&Sunflower> {
        match self {
            SunflowerVerdict::Found(s) => Some(s),
            _ => None,
        }
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset_sorted(small: &[u32], big: &[u32]) -> bool {
    intersect_sorted(small, big).len() == small.len()
}

struct SunflowerSearch<'a> {
    sets: &'a [Vec<u32>],
    want: usize,
    nodes: u64,
    budget: u64,
    found: Option<Sunflower>,
}

impl SunflowerSearch<'_> {
    /// Exact backtracking over index-increasing petal choices; the core is
    /// pinned by the first two petals. Returns false when the budget ran
    /// out (search incomplete).
    fn run(&mut self, start: usize, chosen: &mut Vec<usize>, core: Option<Vec<u32>>) -> bool {
        if self.found.is_some() {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        if chosen.len() == self.want {
            self.found = Some(Sunflower {
                petals: chosen.clone(),
                core: core.expect("want >= 2 pins the core"),
            });
            return true;
        }
        let remaining_needed = self.want - chosen.len();
        for i in start..self.sets.len() {
            if self.sets.len() - i < remaining_needed {
                break;
            }
            let cand = &self.sets[i];
            if chosen.iter().any(|&j| &self.sets[j] == cand) {
                continue;
            }
            let next_core = match &core {
                None if chosen.is_empty() => None,
                None => {
                    let c = intersect_sorted(&self.sets[chosen[0]], cand);
                    Some(c)
                }
                Some(c) => {
                    if chosen.iter().any(|&j| intersect_sorted(&self.sets[j], cand) != *c) {
                        continue;
                    }
                    Some(c.clone())
                }
            };
            chosen.push(i);
            let complete = self.run(i + 1, chosen, next_core);
            chosen.pop();
            if self.found.is_some() {
                return true;
            }
            if !complete {
                return false;
            }
        }
        true
    }
}

/// Searches `family` for `r` pairwise-distinct sets whose pairwise
/// intersections coincide. A greedy pass over candidate cores (pairwise
/// intersections, most frequent first) answers most instances; full
/// backtracking then certifies absence. Exceeding `budget` backtracking
/// nodes yields Indeterminate: an incomplete search never claims absence.
pub fn find_sunflower(family: &[Vec<u32>], r: usize, budget: u64) -> Result<SunflowerVerdict> {
    if r < 2 {
        return Err(Error::pre("a sunflower needs r >= 2"));
    }
    if budget < 1 {
        return Err(Error::pre("budget must be at least 1"));
    }
    let mut sets: Vec<Vec<u32>> = family.to_vec();
    for s in &mut sets {
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::pre("family members must be sets (no repeats)"));
        }
    }
    if let Some(t) = sets.first().map(|s| s.len()) {
        if sets.iter().any(|s| s.len() != t) {
            return Err(Error::pre("family members must all have the same size"));
        }
    }
    if sets.len() < r {
        return Ok(SunflowerVerdict::Absent);
    }

    // Greedy pass: candidate cores by decreasing frequency among pairwise
    // intersections of distinct sets.
    let mut freq: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if sets[i] != sets[j] {
                *freq.entry(intersect_sorted(&sets[i], &sets[j])).or_default() += 1;
            }
        }
    }
    let mut cores: Vec<(Vec<u32>, usize)> = freq.into_iter().collect();
    cores.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    for (core, _) in &cores {
        let mut picked: Vec<usize> = Vec::new();
        for (i, s) in sets.iter().enumerate() {
            if !is_subset_sorted(core, s) {
                continue;
            }
            if picked.iter().any(|&j| &sets[j] == s) {
                continue;
            }
            if picked.iter().all(|&j| intersect_sorted(&sets[j], s) == *core) {
                picked.push(i);
                if picked.len() == r {
                    let sf = Sunflower { petals: picked, core: core.clone() };
                    sf.verify(&sets)?;
                    return Ok(SunflowerVerdict::Found(sf));
                }
            }
        }
    }

    // Exact phase.
    let mut search = SunflowerSearch { sets: &sets, want: r, nodes: 0, budget, found: None };
    let mut chosen = Vec::new();
    let complete = search.run(0, &mut chosen, None);
    match search.found {
        Some(sf) => {
            sf.verify(&sets)?;
            Ok(SunflowerVerdict::Found(sf))
        }
        None if complete => Ok(SunflowerVerdict::Absent),
        None => Ok(SunflowerVerdict::Indeterminate),
    }
}

/// The reporting threshold (alpha * r * ln(t r))^t: families of same-size
/// sets larger than this are guaranteed a sunflower at a suitable alpha.
/// Reporting only; extraction relies on exact search, never on this
/// value.
pub fn rao_threshold(t: usize, r: usize, alpha: f64) -> Result<f64> {
    if t < 1 || r < 1 || !(alpha > 0.0) {
        return Err(Error::pre("need t, r >= 1 and alpha > 0"));
    }
    Ok((alpha * r as f64 * ((t * r) as f64).ln()).powi(t as i32))
}

// ==== regular sub-hypergraph extraction =================================

/// A regular sub-multihypergraph plus its provenance: ids of the chosen
/// edges in the host, the spanned vertex set, and the matching size and
/// degree-spread parameter used.
#[derive(Clone, Debug)]
pub struct RegularSub {
    pub sub: MultiHypergraph,
    pub edge_ids: Vec<u32>,
    pub spanned: Vec<u32>,
    pub t_used: usize,
    pub mu: f64,
}

/// Extracts a nonempty sub-multihypergraph in which every vertex has
/// degree exactly r or 0: enumerate size-t matchings (t from
/// ceil(N / (2 u^2 mu)) with mu = d^(1/2u) for uniformity u, then other
/// sizes), group them by spanned vertex set, and search the largest
/// groups for an r-sunflower of matchings; removing the edges in the
/// sunflower's core leaves each spanned vertex covered exactly once per
/// petal. Returns Ok(None) only when every search completed and found
/// nothing; a budget-limited search errors instead of claiming absence.
pub fn regular_subhypergraph<R: Rng>(
    hg: &MultiHypergraph,
    r: usize,
    cfg: &ConstantsConfig,
    _rng: &mut R,
) -> Result<Option<RegularSub>> {
    cfg.validate()?;
    if r < 1 {
        return Err(Error::pre("need r >= 1"));
    }
    if hg.edge_count() == 0 {
        return Ok(None);
    }
    let u = hg.uniformity();
    if r == 1 {
        let sub = MultiHypergraph::new(hg.vertex_count(), u, [hg.edge(0).to_vec()])?;
        return Ok(Some(RegularSub {
            sub,
            edge_ids: vec![0],
            spanned: hg.edge(0).to_vec(),
            t_used: 1,
            mu: 1.0,
        }));
    }

    let n = hg.vertex_count();
    let t_max = n / u;
    if t_max == 0 {
        return Ok(None);
    }
    let d = hg.avg_degree();
    let mu = d.max(1.0).powf(1.0 / (2.0 * u as f64));
    let t_formula =
        ((n as f64 / (2.0 * (u * u) as f64 * mu)).ceil() as usize).clamp(1, t_max);
    let mut order = vec![t_formula];
    order.extend((1..=t_max).filter(|&t| t != t_formula));

    let cap = cfg.search_budget.max(1) as usize;
    let mut indeterminate = false;
    for t in order {
        let matchings = enumerate_matchings(hg, t, cap)?;
        if matchings.len() >= cap {
            indeterminate = true;
        }
        if matchings.len() < r {
            continue;
        }
        let mut groups: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
        for (i, m) in matchings.iter().enumerate() {
            let mut span: Vec<u32> =
                m.edge_ids.iter().flat_map(|&id| hg.edge(id).iter().copied()).collect();
            span.sort_unstable();
            groups.entry(span).or_default().push(i);
        }
        let mut by_size: Vec<(&Vec<u32>, &Vec<usize>)> = groups.iter().collect();
        by_size.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then_with(|| a.0.cmp(b.0)));

        for (span, members) in by_size {
            if members.len() < r {
                break;
            }
            let family: Vec<Vec<u32>> =
                members.iter().map(|&i| matchings[i].edge_ids.clone()).collect();
            match find_sunflower(&family, r, cfg.search_budget)? {
                SunflowerVerdict::Found(sf) => {
                    let mut ids: Vec<u32> = sf
                        .petals
                        .iter()
                        .flat_map(|&p| family[p].iter().copied())
                        .filter(|id| sf.core.binary_search(id).is_err())
                        .collect();
                    ids.sort_unstable();
                    ids.dedup();
                    let sub = MultiHypergraph::new(n, u, ids.iter().map(|&id| hg.edge(id).to_vec()))?;
                    let deg = sub.degrees();
                    if !deg.iter().all(|&x| x == 0 || x == r) || !deg.iter().any(|&x| x == r) {
                        return Err(Error::Internal(
                            "core-stripped sunflower union is not regular".into(),
                        ));
                    }
                    return Ok(Some(RegularSub {
                        sub,
                        edge_ids: ids,
                        spanned: span.clone(),
                        t_used: t,
                        mu,
                    }));
                }
                SunflowerVerdict::Absent => {}
                SunflowerVerdict::Indeterminate => indeterminate = true,
            }
        }
    }
    if indeterminate {
        Err(Error::Budget(
            "sunflower search hit its budget before certifying presence or absence".into(),
        ))
    } else {
        Ok(None)
    }
}

// ==== bipartite reductions ==============================================

/// Views a bipartite graph whose every B-vertex has degree exactly r as
/// an r-uniform multi-hypergraph on the A side: edge id j is the
/// neighborhood of B-vertex j. The hypergraph's average degree equals
/// e(h) / |A|.
pub fn bipartite_to_hyper(h: &BipartiteGraph, r: usize) -> Result<MultiHypergraph> {
    if r < 1 {
        return Err(Error::pre("need r >= 1"));
    }
    for b in 0..h.b_count() as u32 {
        if h.degree_b(b) != r {
            return Err(Error::pre(format!(
                "B-vertex {b} has degree {}, expected exactly {r}",
                h.degree_b(b)
            )));
        }
    }
    MultiHypergraph::new(h.a_count(), r, (0..h.b_count() as u32).map(|b| h.neighbors_b(b).to_vec()))
}

/// Maps a regular sub-hypergraph back into the bipartite graph it came
/// from: `edge_origin[j]` names the B-vertex whose neighborhood is sub
/// edge j. Validates the provenance edge by edge and that positive
/// degrees all equal the uniformity, then returns the induced r-regular
/// bipartite subgraph with its A- and B-side id maps.
pub fn hyper_to_bipartite_regular(
    sub: &MultiHypergraph,
    origin: &BipartiteGraph,
    edge_origin: &[u32],
) -> Result<(BipartiteGraph, Vec<u32>, Vec<u32>)> {
    let r = sub.uniformity();
    if edge_origin.len() != sub.edge_count() {
        return Err(Error::pre(format!(
            "edge_origin has {} entries for {} edges",
            edge_origin.len(),
            sub.edge_count()
        )));
    }
    if sub.vertex_count() != origin.a_count() {
        return Err(Error::pre("sub-hypergraph vertex set does not match origin's A side"));
    }
    let mut seen_b = vec![false; origin.b_count()];
    for (j, &b) in edge_origin.iter().enumerate() {
        if b as usize >= origin.b_count() {
            return Err(Error::VertexOutOfRange { id: b, n: origin.b_count() });
        }
        if seen_b[b as usize] {
            return Err(Error::pre(format!("B-vertex {b} claimed by two edges")));
        }
        seen_b[b as usize] = true;
        let mut nb = origin.neighbors_b(b).to_vec();
        nb.sort_unstable();
        if nb != sub.edge(j as u32) {
            return Err(Error::pre(format!(
                "edge {j} does not equal the neighborhood of B-vertex {b}"
            )));
        }
    }
    let deg = sub.degrees();
    if !deg.iter().all(|&x| x == 0 || x == r) || sub.edge_count() == 0 {
        return Err(Error::pre("sub-hypergraph degrees are not exactly r or 0"));
    }

    let a_ids: Vec<u32> =
        (0..sub.vertex_count() as u32).filter(|&v| deg[v as usize] > 0).collect();
    let mut a_local = vec![u32::MAX; sub.vertex_count()];
    for (i, &v) in a_ids.iter().enumerate() {
        a_local[v as usize] = i as u32;
    }
    let b_ids: Vec<u32> = edge_origin.to_vec();
    let mut edges = Vec::with_capacity(sub.edge_count() * r);
    for j in 0..sub.edge_count() {
        for &v in sub.edge(j as u32) {
            edges.push((a_local[v as usize], j as u32));
        }
    }
    let out = BipartiteGraph::new(a_ids.len(), b_ids.len(), edges)?;
    if out.regularity() != Some(r) {
        return Err(Error::Internal("rebuilt bipartite subgraph is not r-regular".into()));
    }
    Ok((out, a_ids, b_ids))
}

// ==== text format =======================================================

/// Serializes as `hyper <r> <N> <m>` followed by m lines of r vertex ids.
pub fn write_hyper(hg: &MultiHypergraph) -> String {
    let mut s = format!("hyper {} {} {}\n", hg.uniformity(), hg.vertex_count(), hg.edge_count());
    for e in hg.edges() {
        let words: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        s.push_str(&words.join(" "));
        s.push('\n');
    }
    s
}

pub fn parse_hyper(text: &str) -> Result<MultiHypergraph> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (ln, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let mut words = header.split_whitespace();
    if words.next() != Some("hyper") {
        return Err(Error::Parse { line: ln + 1, msg: "expected 'hyper <r> <N> <m>'".into() });
    }
    let mut field = |name: &str| -> Result<usize> {
        words
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or(Error::Parse { line: ln + 1, msg: format!("bad or missing {name}") })
    };
    let r = field("uniformity")?;
    let n = field("vertex count")?;
    let m = field("edge count")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) =
            lines.next().ok_or(Error::Parse { line: 0, msg: "fewer edge lines than declared".into() })?;
        let ids: Vec<u32> = line
            .split_whitespace()
            .map(|w| {
                w.parse::<u32>().map_err(|_| Error::Parse { line: ln + 1, msg: format!("bad vertex id '{w}'") })
            })
            .collect::<Result<_>>()?;
        edges.push(ids);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(Error::Parse { line: ln + 1, msg: "more edge lines than declared".into() });
    }
    MultiHypergraph::new(n, r, edges)
}
