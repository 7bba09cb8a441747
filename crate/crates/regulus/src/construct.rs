//! Seeded generators for layered sparse host graphs engineered to lack
//! r-regular subgraphs, plus a budgeted sparsity-witness checker.
//!
//! Two families are provided. The `small_r` family joins a left part of
//! size n to a tower of doubly-exponentially shrinking layers, giving each
//! left vertex an exact per-layer quota of random neighbors. The `large_r`
//! family joins a left part of size n/2 to geometrically growing layers
//! with geometrically decaying edge probabilities. At default constants
//! both families only make sense at astronomical n, so every constant can
//! be overridden; the shipped tiny presets are certified free of r-regular
//! subgraphs by the exact search oracle rather than by asymptotics.

use serde::{Deserialize, Serialize};

use crate::config::{stage_rng, SearchBudget};
use crate::graph::{BipartiteGraph, Graph};
use crate::{Error, Result};

/// Which generator a [`ConstructionSpec`] drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    SmallR,
    LargeR,
}

/// Optional constant overrides. Every `None` falls back to the default
/// formula; validation requires any supplied value to be positive.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Overrides {
    /// First layer index (small_r).
    pub i_min: Option<i64>,
    /// Last layer index (small_r).
    pub i_max: Option<i64>,
    /// The `20` in the layer-size exponent `2^(20 i / r)` (small_r).
    pub exponent_scale: Option<f64>,
    /// Per-vertex per-layer neighbor quota, default `r / 8` (small_r).
    pub per_layer: Option<usize>,
    /// Multiplier on the per-layer edge probability `1 / (100 * 2^i)` (large_r).
    pub p_scale: Option<f64>,
    /// Number of layers, default `floor(log2(n / r) / 2)` (large_r).
    pub levels: Option<usize>,
}

/// A reproducible generation request: family, size, target regularity,
/// constant overrides, and the RNG seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSpec {
    pub kind: ConstructionKind,
    pub n: usize,
    pub r: usize,
    #[serde(default)]
    pub overrides: Overrides,
    pub seed: u64,
}

impl ConstructionSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.r == 0 {
            return Err(Error::pre("construction needs n >= 1 and r >= 1"));
        }
        let o = &self.overrides;
        if let Some(s) = o.exponent_scale {
            if !(s > 0.0) {
                return Err(Error::pre("exponent_scale override must be positive"));
            }
        }
        if o.per_layer == Some(0) {
            return Err(Error::pre("per_layer override must be positive"));
        }
        if let Some(p) = o.p_scale {
            if !(p > 0.0) {
                return Err(Error::pre("p_scale override must be positive"));
            }
        }
        if o.levels == Some(0) {
            return Err(Error::pre("levels override must be positive"));
        }
        Ok(())
    }
}

/// Per-layer bookkeeping recorded during generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerReport {
    pub index: i64,
    pub size: usize,
    /// Neighbors actually taken per left vertex (small_r only).
    pub quota: Option<usize>,
    /// Edge probability (large_r only).
    pub p: Option<f64>,
    /// True when the requested quota exceeded the layer size.
    pub clamped: bool,
}

/// Deterministic sidecar describing one generated instance. Contains no
/// timing, so regenerating from the same spec reproduces it byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenReport {
    pub kind: ConstructionKind,
    pub n: usize,
    pub r: usize,
    pub seed: u64,
    pub layers: Vec<LayerReport>,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub measured_avg_degree: f64,
    /// Closed-form expected edge count (large_r only).
    pub expected_edges: Option<f64>,
    /// `|A| * layers * quota`: the exact edge count absent clamping (small_r only).
    pub quota_identity: Option<usize>,
    /// True when any layer clamped its quota.
    pub clamped: bool,
}

fn small_r_layer_size(n: usize, scale: f64, i: i64, r: usize) -> usize {
    let inner = (scale * i as f64 / r as f64).exp2();
    let denom = inner.exp2();
    if !denom.is_finite() {
        return 1;
    }
    ((n as f64 / denom).ceil() as usize).max(1)
}

/// Builds the layered small-r instance: left part of size n, layer i of
/// size `ceil(n / 2^(2^(scale*i/r)))` (floor 1), and exactly
/// `min(quota, layer size)` distinct random neighbors per left vertex per
/// layer. Layer sizes must come out strictly decreasing and sum to at most
/// n, keeping the total vertex count at most 2n.
pub fn gen_small_r(spec: &ConstructionSpec) -> Result<(BipartiteGraph, GenReport)> {
    spec.validate()?;
    if spec.kind != ConstructionKind::SmallR {
        return Err(Error::pre("gen_small_r needs a small_r spec"));
    }
    let (n, r) = (spec.n, spec.r);
    let quota = spec.overrides.per_layer.unwrap_or(r / 8);
    if quota == 0 {
        return Err(Error::pre(
            "per-layer quota r/8 is zero; r < 8 needs a per_layer override",
        ));
    }
    let scale = spec.overrides.exponent_scale.unwrap_or(20.0);
    let rf = r as f64;
    let default_lo = (rf * rf.log2() / 20.0 + rf).ceil();
    let default_hi = ((n as f64).log2().log2() * rf / 20.0 - rf).floor();
    let i_lo = spec.overrides.i_min.unwrap_or(default_lo as i64);
    let i_hi = spec.overrides.i_max.unwrap_or(default_hi as i64);
    if i_lo > i_hi {
        return Err(Error::Precondition(format!(
            "empty layer range: i_min {i_lo} > i_max {i_hi} (defaults here: {default_lo} and {default_hi})"
        )));
    }

    let sizes: Vec<usize> = (i_lo..=i_hi)
        .map(|i| small_r_layer_size(n, scale, i, r))
        .collect();
    for w in sizes.windows(2) {
        if w[0] <= w[1] {
            return Err(Error::Precondition(format!(
                "layer sizes must strictly decrease after rounding; got {} then {}",
                w[0], w[1]
            )));
        }
    }
    let total_b: usize = sizes.iter().sum();
    if total_b > n {
        return Err(Error::Precondition(format!(
            "layer sizes sum to {total_b} > n = {n}, breaking the 2n vertex cap"
        )));
    }

    let mut rng = stage_rng(spec.seed, "construct:small_r");
    let mut edges = Vec::with_capacity(n * sizes.len() * quota);
    let mut layers = Vec::with_capacity(sizes.len());
    let mut offset = 0u32;
    let mut clamped_any = false;
    for (k, &size) in sizes.iter().enumerate() {
        let take = quota.min(size);
        let clamped = take < quota;
        clamped_any |= clamped;
        layers.push(LayerReport {
            index: i_lo + k as i64,
            size,
            quota: Some(take),
            p: None,
            clamped,
        });
        for u in 0..n as u32 {
            for idx in rand::seq::index::sample(&mut rng, size, take) {
                edges.push((u, offset + idx as u32));
            }
        }
        offset += size as u32;
    }

    let g = BipartiteGraph::new(n, total_b, edges)?;
    let identity = n * sizes.len() * quota;
    if !clamped_any && g.edge_count() != identity {
        return Err(Error::Internal(format!(
            "unclamped small_r edge count {} misses the identity {identity}",
            g.edge_count()
        )));
    }
    let report = GenReport {
        kind: ConstructionKind::SmallR,
        n,
        r,
        seed: spec.seed,
        layers,
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        measured_avg_degree: 2.0 * g.edge_count() as f64 / g.vertex_count() as f64,
        expected_edges: None,
        quota_identity: Some(identity),
        clamped: clamped_any,
    };
    Ok((g, report))
}

/// One geometric inter-arrival skip for Bernoulli(p) cell scanning.
fn geometric_skip<R: rand::Rng>(rng: &mut R, p: f64) -> u64 {
    if p >= 1.0 {
        return 0;
    }
    let u = 1.0 - rng.gen::<f64>();
    let skip = (u.ln() / (1.0 - p).ln()).floor();
    if skip >= u64::MAX as f64 {
        u64::MAX
    } else {
        skip as u64
    }
}

/// Builds the large-r instance: left part of size n/2, layer i in 1..=levels
/// of size `2^i * r`, each left-to-layer-i edge present independently with
/// probability `p_scale / (100 * 2^i)`, then isolated vertices padded so the
/// graph has exactly n vertices. Present edges are found by geometric gap
/// skipping over the cell grid, so reruns of a spec are byte-identical.
pub fn gen_large_r(spec: &ConstructionSpec) -> Result<(Graph, GenReport)> {
    spec.validate()?;
    if spec.kind != ConstructionKind::LargeR {
        return Err(Error::pre("gen_large_r needs a large_r spec"));
    }
    let (n, r) = (spec.n, spec.r);
    let a_count = n / 2;
    if a_count == 0 {
        return Err(Error::pre("large_r needs n >= 2"));
    }
    let levels = match spec.overrides.levels {
        Some(l) => l,
        None => {
            let l = (0.5 * (n as f64 / r as f64).log2()).floor();
            if !(l >= 1.0) {
                return Err(Error::Precondition(format!(
                    "level count floor(log2(n/r)/2) = {l} is below 1; increase n/r or override levels"
                )));
            }
            l as usize
        }
    };
    let p_scale = spec.overrides.p_scale.unwrap_or(1.0);

    let mut sizes = Vec::with_capacity(levels);
    let mut probs = Vec::with_capacity(levels);
    let mut total_b = 0usize;
    for i in 1..=levels {
        let size = 1usize
            .checked_shl(i as u32)
            .and_then(|s| s.checked_mul(r))
            .ok_or_else(|| Error::pre("layer size 2^i * r overflows"))?;
        total_b = total_b
            .checked_add(size)
            .ok_or_else(|| Error::pre("layer sizes overflow"))?;
        let p = p_scale / (100.0 * (i as f64).exp2());
        if p > 1.0 {
            return Err(Error::Precondition(format!(
                "edge probability {p} exceeds 1 at layer {i}; lower p_scale"
            )));
        }
        sizes.push(size);
        probs.push(p);
    }
    if a_count + total_b > n {
        return Err(Error::Precondition(format!(
            "side sizes exceed n: |A| = {a_count}, layer sum = {total_b}, n = {n}"
        )));
    }

    let mut rng = stage_rng(spec.seed, "construct:large_r");
    let mut edges = Vec::new();
    let mut layers = Vec::with_capacity(levels);
    let mut offset = a_count as u32;
    for (k, (&size, &p)) in sizes.iter().zip(&probs).enumerate() {
        layers.push(LayerReport {
            index: (k + 1) as i64,
            size,
            quota: None,
            p: Some(p),
            clamped: false,
        });
        let cells = a_count as u64 * size as u64;
        let mut pos = 0u64;
        while pos < cells {
            pos = pos.saturating_add(geometric_skip(&mut rng, p));
            if pos >= cells {
                break;
            }
            let u = (pos / size as u64) as u32;
            let v = (pos % size as u64) as u32;
            edges.push((u, offset + v));
            pos += 1;
        }
        offset += size as u32;
    }

    let g = Graph::new(n, edges)?;
    let expected = levels as f64 * a_count as f64 * r as f64 * p_scale / 100.0;
    let report = GenReport {
        kind: ConstructionKind::LargeR,
        n,
        r,
        seed: spec.seed,
        layers,
        vertex_count: g.vertex_count(),
        edge_count: g.edge_count(),
        measured_avg_degree: 2.0 * g.edge_count() as f64 / g.vertex_count() as f64,
        expected_edges: Some(expected),
        quota_identity: None,
        clamped: false,
    };
    Ok((g, report))
}

/// Which sparsity claim [`sparse_witness_check`] probes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SparsityMode {
    /// A vertex set S with |S| <= m and e(G[S]) >= m*r/8.
    InducedEdges,
    /// Sets A' in 0..left and B' in left.., each of size <= m, with
    /// e(A', B') > m*r/2. Edges inside a side never count.
    CrossEdges { left: usize },
}

/// A concrete density violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SparsityWitness {
    Induced { vertices: Vec<u32>, edges: usize },
    Cross { left: Vec<u32>, right: Vec<u32>, edges: usize },
}

/// Three-valued outcome: every candidate checked and none violates, a
/// verified violation, or the node budget ran out first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SparsityVerdict {
    Pass,
    Violation(SparsityWitness),
    Indeterminate,
}

struct InducedSearch<'a> {
    g: &'a Graph,
    order: Vec<u32>,
    need: usize,
    k: usize,
    limit: u64,
    nodes: u64,
    interrupted: bool,
    chosen: Vec<u32>,
    in_set: Vec<bool>,
    edges_in: usize,
    hit: Option<(Vec<u32>, usize)>,
}

impl InducedSearch<'_> {
    fn run(&mut self, start: usize) {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.interrupted = true;
            return;
        }
        if self.edges_in >= self.need {
            let mut vs = self.chosen.clone();
            vs.sort_unstable();
            self.hit = Some((vs, self.edges_in));
            return;
        }
        if self.chosen.len() == self.k {
            return;
        }
        // Degree-descending order makes the first `slots` suffix entries an
        // upper bound on everything a completion could still add.
        let slots = self.k - self.chosen.len();
        let mut bound = self.edges_in;
        for &v in self.order[start..].iter().take(slots) {
            bound += self.g.degree(v);
        }
        if bound < self.need {
            return;
        }
        for idx in start..self.order.len() {
            let v = self.order[idx];
            let added = self
                .g
                .neighbors(v)
                .iter()
                .filter(|&&w| self.in_set[w as usize])
                .count();
            self.chosen.push(v);
            self.in_set[v as usize] = true;
            self.edges_in += added;
            self.run(idx + 1);
            self.in_set[v as usize] = false;
            self.chosen.pop();
            self.edges_in -= added;
            if self.hit.is_some() || self.interrupted {
                return;
            }
        }
    }
}

struct CrossSearch<'a> {
    g: &'a Graph,
    left: usize,
    order: Vec<u32>,
    cross_deg: Vec<usize>,
    need: usize,
    ka: usize,
    kb: usize,
    limit: u64,
    nodes: u64,
    interrupted: bool,
    chosen: Vec<u32>,
    counts: Vec<usize>,
    counts_total: usize,
    hit: Option<(Vec<u32>, Vec<u32>, usize)>,
}

impl CrossSearch<'_> {
    /// Best right set for the current left set: the kb largest per-vertex
    /// counts (zero-count vertices are never worth taking).
    fn best_right(&self) -> (Vec<u32>, usize) {
        let mut idx: Vec<usize> = (0..self.counts.len()).filter(|&i| self.counts[i] > 0).collect();
        idx.sort_by(|&a, &b| self.counts[b].cmp(&self.counts[a]).then(a.cmp(&b)));
        idx.truncate(self.kb);
        let sum = idx.iter().map(|&i| self.counts[i]).sum();
        (idx.into_iter().map(|i| (self.left + i) as u32).collect(), sum)
    }

    fn run(&mut self, start: usize) {
        self.nodes += 1;
        if self.nodes > self.limit {
            self.interrupted = true;
            return;
        }
        let (right, sum) = self.best_right();
        if sum >= self.need {
            let mut ls = self.chosen.clone();
            ls.sort_unstable();
            self.hit = Some((ls, right, sum));
            return;
        }
        if self.chosen.len() == self.ka {
            return;
        }
        let slots = self.ka - self.chosen.len();
        let mut bound = self.counts_total;
        for &v in self.order[start..].iter().take(slots) {
            bound += self.cross_deg[v as usize];
        }
        if bound < self.need {
            return;
        }
        for idx in start..self.order.len() {
            let v = self.order[idx];
            self.apply(v, 1);
            self.chosen.push(v);
            self.run(idx + 1);
            self.chosen.pop();
            self.apply(v, -1);
            if self.hit.is_some() || self.interrupted {
                return;
            }
        }
    }

    fn apply(&mut self, v: u32, delta: isize) {
        for &w in self.g.neighbors(v) {
            if (w as usize) >= self.left {
                let c = &mut self.counts[w as usize - self.left];
                *c = c.wrapping_add_signed(delta);
            }
        }
        self.counts_total = self
            .counts_total
            .wrapping_add_signed(delta * self.cross_deg[v as usize] as isize);
    }
}

fn count_induced_edges(g: &Graph, vs: &[u32]) -> usize {
    let mut in_set = vec![false; g.vertex_count()];
    for &v in vs {
        in_set[v as usize] = true;
    }
    g.edges()
        .iter()
        .filter(|&&(u, v)| in_set[u as usize] && in_set[v as usize])
        .count()
}

fn count_cross_edges(g: &Graph, left: &[u32], right: &[u32]) -> usize {
    let mut side = vec![0u8; g.vertex_count()];
    for &v in left {
        side[v as usize] = 1;
    }
    for &v in right {
        side[v as usize] = 2;
    }
    g.edges()
        .iter()
        .filter(|&&(u, v)| {
            (side[u as usize] == 1 && side[v as usize] == 2)
                || (side[u as usize] == 2 && side[v as usize] == 1)
        })
        .count()
}

/// Branch-and-bound search for a density violation at size cap m. Induced
/// mode asks for e(G[S]) >= m*r/8 with |S| <= m; cross mode asks for
/// e(A', B') > m*r/2 with |A'|, |B'| <= m on the given vertex split.
/// Exact within the node budget; running out yields `Indeterminate`.
pub fn sparse_witness_check(
    g: &Graph,
    m: usize,
    r: usize,
    mode: SparsityMode,
    budget: &SearchBudget,
) -> Result<SparsityVerdict> {
    if m == 0 || r == 0 {
        return Err(Error::pre("sparsity check needs m >= 1 and r >= 1"));
    }
    budget.validate()?;
    let n = g.vertex_count();
    match mode {
        SparsityMode::InducedEdges => {
            let need = (m * r).div_ceil(8);
            let mut order: Vec<u32> = (0..n as u32).collect();
            order.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
            let mut search = InducedSearch {
                g,
                order,
                need,
                k: m.min(n),
                limit: budget.node_limit,
                nodes: 0,
                interrupted: false,
                chosen: Vec::new(),
                in_set: vec![false; n],
                edges_in: 0,
                hit: None,
            };
            search.run(0);
            if let Some((vertices, edges)) = search.hit {
                if count_induced_edges(g, &vertices) != edges || edges < need {
                    return Err(Error::Internal("induced witness recount mismatch".into()));
                }
                return Ok(SparsityVerdict::Violation(SparsityWitness::Induced {
                    vertices,
                    edges,
                }));
            }
            Ok(if search.interrupted {
                SparsityVerdict::Indeterminate
            } else {
                SparsityVerdict::Pass
            })
        }
        SparsityMode::CrossEdges { left } => {
            if left > n {
                return Err(Error::pre("cross split exceeds the vertex count"));
            }
            let need = m * r / 2 + 1;
            let cross_deg: Vec<usize> = (0..n)
                .map(|v| {
                    g.neighbors(v as u32)
                        .iter()
                        .filter(|&&w| ((w as usize) < left) != (v < left))
                        .count()
                })
                .collect();
            let mut order: Vec<u32> = (0..left as u32).collect();
            order.sort_by(|&a, &b| {
                cross_deg[b as usize].cmp(&cross_deg[a as usize]).then(a.cmp(&b))
            });
            let mut search = CrossSearch {
                g,
                left,
                order,
                cross_deg,
                need,
                ka: m.min(left),
                kb: m.min(n - left),
                limit: budget.node_limit,
                nodes: 0,
                interrupted: false,
                chosen: Vec::new(),
                counts: vec![0; n - left],
                counts_total: 0,
                hit: None,
            };
            search.run(0);
            if let Some((lvs, rvs, edges)) = search.hit {
                if count_cross_edges(g, &lvs, &rvs) != edges || edges < need {
                    return Err(Error::Internal("cross witness recount mismatch".into()));
                }
                return Ok(SparsityVerdict::Violation(SparsityWitness::Cross {
                    left: lvs,
                    right: rvs,
                    edges,
                }));
            }
            Ok(if search.interrupted {
                SparsityVerdict::Indeterminate
            } else {
                SparsityVerdict::Pass
            })
        }
    }
}

/// Shipped small_r regression instance: n = 64, r = 8, layers 1..=3 at
/// exponent scale 8 (sizes 16, 4, 1). Certified free of 8-regular
/// subgraphs by the exact oracle under a fixed seed.
pub fn tiny_small_r_preset() -> ConstructionSpec {
    ConstructionSpec {
        kind: ConstructionKind::SmallR,
        n: 64,
        r: 8,
        overrides: Overrides {
            i_min: Some(1),
            i_max: Some(3),
            exponent_scale: Some(8.0),
            ..Overrides::default()
        },
        seed: 0x5EED_5A11,
    }
}

/// Shipped large_r regression instance: n = 64, r = 4, default level count
/// 2 with probabilities scaled 20x so the instance is not near-edgeless.
/// Certified free of 4-regular subgraphs by the exact oracle under a fixed
/// seed.
pub fn tiny_large_r_preset() -> ConstructionSpec {
    ConstructionSpec {
        kind: ConstructionKind::LargeR,
        n: 64,
        r: 4,
        overrides: Overrides {
            p_scale: Some(20.0),
            ..Overrides::default()
        },
        seed: 0x5EED_1A26,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, complete_bipartite, path};
    use crate::oracle::{find_regular_subgraph_exact, SearchVerdict};

    fn small_spec(n: usize, r: usize, scale: f64, lo: i64, hi: i64, seed: u64) -> ConstructionSpec {
        ConstructionSpec {
            kind: ConstructionKind::SmallR,
            n,
            r,
            overrides: Overrides {
                i_min: Some(lo),
                i_max: Some(hi),
                exponent_scale: Some(scale),
                ..Overrides::default()
            },
            seed,
        }
    }

    #[test]
    fn small_r_layers_shrink_and_edge_identity_holds() {
        let spec = tiny_small_r_preset();
        let (g, report) = gen_small_r(&spec).unwrap();
        let sizes: Vec<usize> = report.layers.iter().map(|l| l.size).collect();
        assert_eq!(sizes, vec![16, 4, 1]);
        assert!(!report.clamped);
        assert_eq!(report.quota_identity, Some(64 * 3));
        assert_eq!(g.edge_count(), 64 * 3);
        assert_eq!(g.a_count(), 64);
        assert!(g.vertex_count() <= 2 * spec.n);
        for a in 0..g.a_count() as u32 {
            assert_eq!(g.degree_a(a), 3);
        }
        // Per-layer degree is exactly the recorded quota.
        let bounds = [0u32, 16, 20, 21];
        for a in 0..g.a_count() as u32 {
            for w in bounds.windows(2) {
                let in_layer = g
                    .neighbors_a(a)
                    .iter()
                    .filter(|&&b| b >= w[0] && b < w[1])
                    .count();
                assert_eq!(in_layer, 1);
            }
        }
    }

    #[test]
    fn small_r_reruns_are_identical() {
        let spec = tiny_small_r_preset();
        let (g1, r1) = gen_small_r(&spec).unwrap();
        let (g2, r2) = gen_small_r(&spec).unwrap();
        assert_eq!(g1.edges(), g2.edges());
        assert_eq!(r1, r2);
        let other = ConstructionSpec { seed: spec.seed + 1, ..spec };
        let (g3, _) = gen_small_r(&other).unwrap();
        assert_ne!(g1.edges(), g3.edges());
    }

    #[test]
    fn small_r_rejects_empty_default_range_with_computed_bounds() {
        let spec = ConstructionSpec {
            kind: ConstructionKind::SmallR,
            n: 64,
            r: 8,
            overrides: Overrides::default(),
            seed: 1,
        };
        let msg = gen_small_r(&spec).unwrap_err().to_string();
        assert!(msg.contains("empty layer range"), "{msg}");
        assert!(msg.contains("10") && msg.contains("-7"), "{msg}");
    }

    #[test]
    fn small_r_quota_rules() {
        // r < 8 gives a zero default quota.
        let spec = small_spec(32, 4, 8.0, 1, 2, 3);
        let msg = gen_small_r(&spec).unwrap_err().to_string();
        assert!(msg.contains("quota"), "{msg}");

        // With an override, undersized layers clamp and the identity is off.
        let mut spec = small_spec(32, 4, 8.0, 1, 2, 3);
        spec.overrides.per_layer = Some(2);
        let (g, report) = gen_small_r(&spec).unwrap();
        let sizes: Vec<usize> = report.layers.iter().map(|l| l.size).collect();
        assert_eq!(sizes, vec![2, 1]);
        assert!(report.clamped);
        assert!(report.layers[1].clamped && !report.layers[0].clamped);
        assert_eq!(report.layers[1].quota, Some(1));
        assert_eq!(g.edge_count(), 32 * 2 + 32);
        assert_eq!(report.quota_identity, Some(32 * 2 * 2));
    }

    #[test]
    fn small_r_rejects_layer_size_ties() {
        // A near-zero exponent scale makes consecutive layer sizes round
        // to the same value.
        let spec = small_spec(4, 8, 0.001, 1, 2, 5);
        let msg = gen_small_r(&spec).unwrap_err().to_string();
        assert!(msg.contains("strictly decrease"), "{msg}");
    }

    #[test]
    fn default_scale_layer_ratios_shrink_by_ten_bits() {
        // log2(|B_i| / |B_{i+1}|) = 2^(20i/r) * (2^(20/r) - 1), which is at
        // least 10 once i clears the default lower index.
        for r in [8usize, 20, 40, 128] {
            let rf = r as f64;
            let i_min = (rf * rf.log2() / 20.0 + rf).ceil() as i64;
            for i in i_min..i_min + 5 {
                let log2_ratio = (20.0 * i as f64 / rf).exp2() * ((20.0 / rf).exp2() - 1.0);
                assert!(
                    log2_ratio >= 10.0,
                    "ratio 2^{log2_ratio} too small at r = {r}, i = {i}"
                );
            }
        }
    }

    #[test]
    fn large_r_shapes_layers_and_pads_to_n() {
        let spec = tiny_large_r_preset();
        let (g, report) = gen_large_r(&spec).unwrap();
        assert_eq!(g.vertex_count(), 64);
        let sizes: Vec<usize> = report.layers.iter().map(|l| l.size).collect();
        assert_eq!(sizes, vec![8, 16]);
        assert_eq!(report.layers[0].p, Some(0.1));
        assert_eq!(report.layers[1].p, Some(0.05));
        // All edges cross from the left part into the layer range.
        for &(u, v) in g.edges() {
            assert!(u < 32 && (32..56).contains(&v), "edge ({u}, {v})");
        }
        let (g2, r2) = gen_large_r(&spec).unwrap();
        assert_eq!(g.edges(), g2.edges());
        assert_eq!(report, r2);
    }

    #[test]
    fn large_r_empirical_mean_tracks_the_expectation() {
        let base = ConstructionSpec {
            kind: ConstructionKind::LargeR,
            n: 1024,
            r: 16,
            overrides: Overrides::default(),
            seed: 0,
        };
        let expected = 3.0 * 512.0 * 16.0 / 100.0;
        let mut total = 0usize;
        let reps = 40;
        for seed in 0..reps {
            let spec = ConstructionSpec { seed, ..base.clone() };
            let (g, report) = gen_large_r(&spec).unwrap();
            assert_eq!(report.expected_edges, Some(expected));
            total += g.edge_count();
        }
        let mean = total as f64 / reps as f64;
        assert!(
            (mean - expected).abs() <= 0.1 * expected,
            "mean {mean} strays from {expected}"
        );
    }

    #[test]
    fn large_r_rejects_impossible_shapes() {
        // n/r too small for even one level.
        let spec = ConstructionSpec {
            kind: ConstructionKind::LargeR,
            n: 16,
            r: 8,
            overrides: Overrides::default(),
            seed: 1,
        };
        let msg = gen_large_r(&spec).unwrap_err().to_string();
        assert!(msg.contains("level count"), "{msg}");

        // Forced levels blow past n.
        let spec = ConstructionSpec {
            kind: ConstructionKind::LargeR,
            n: 16,
            r: 8,
            overrides: Overrides { levels: Some(1), ..Overrides::default() },
            seed: 1,
        };
        let msg = gen_large_r(&spec).unwrap_err().to_string();
        assert!(msg.contains("exceed n"), "{msg}");

        // Probability above 1.
        let spec = ConstructionSpec {
            kind: ConstructionKind::LargeR,
            n: 4096,
            r: 4,
            overrides: Overrides { p_scale: Some(1000.0), ..Overrides::default() },
            seed: 1,
        };
        let msg = gen_large_r(&spec).unwrap_err().to_string();
        assert!(msg.contains("exceeds 1"), "{msg}");

        // Kind mismatch both ways.
        assert!(gen_large_r(&tiny_small_r_preset()).is_err());
        assert!(gen_small_r(&tiny_large_r_preset()).is_err());
    }

    #[test]
    fn tiny_presets_are_certified_free_of_target_regular_subgraphs() {
        let spec = tiny_small_r_preset();
        let (g, _) = gen_small_r(&spec).unwrap();
        let verdict =
            find_regular_subgraph_exact(&g.to_graph(), spec.r, &SearchBudget::nodes(2_000_000))
                .unwrap();
        assert!(matches!(verdict, SearchVerdict::Absent), "small_r preset: {verdict:?}");

        let spec = tiny_large_r_preset();
        let (g, _) = gen_large_r(&spec).unwrap();
        let verdict =
            find_regular_subgraph_exact(&g, spec.r, &SearchBudget::nodes(2_000_000)).unwrap();
        assert!(matches!(verdict, SearchVerdict::Absent), "large_r preset: {verdict:?}");
    }

    #[test]
    fn sparsity_check_trivial_cases() {
        let empty = Graph::new(5, Vec::<(u32, u32)>::new()).unwrap();
        let budget = SearchBudget::nodes(100_000);
        assert_eq!(
            sparse_witness_check(&empty, 3, 8, SparsityMode::InducedEdges, &budget).unwrap(),
            SparsityVerdict::Pass
        );
        assert_eq!(
            sparse_witness_check(&empty, 3, 8, SparsityMode::CrossEdges { left: 2 }, &budget)
                .unwrap(),
            SparsityVerdict::Pass
        );

        // A clique of size m has m(m-1)/2 >= m*8/8 edges for m >= 3.
        let k5 = complete(5);
        match sparse_witness_check(&k5, 5, 8, SparsityMode::InducedEdges, &budget).unwrap() {
            SparsityVerdict::Violation(SparsityWitness::Induced { vertices, edges }) => {
                assert!(vertices.len() <= 5);
                assert!(edges >= 5);
            }
            other => panic!("expected a violation, got {other:?}"),
        }

        assert!(sparse_witness_check(&k5, 0, 8, SparsityMode::InducedEdges, &budget).is_err());
        assert!(
            sparse_witness_check(&k5, 2, 8, SparsityMode::CrossEdges { left: 9 }, &budget)
                .is_err()
        );
    }

    #[test]
    fn sparsity_check_cross_mode_counts_only_crossing_edges() {
        let kb = complete_bipartite(4, 4);
        let budget = SearchBudget::nodes(100_000);
        match sparse_witness_check(&kb, 2, 1, SparsityMode::CrossEdges { left: 4 }, &budget)
            .unwrap()
        {
            SparsityVerdict::Violation(SparsityWitness::Cross { left, right, edges }) => {
                assert!(left.len() <= 2 && right.len() <= 2);
                assert!(edges > 1);
                assert!(left.iter().all(|&v| v < 4) && right.iter().all(|&v| v >= 4));
            }
            other => panic!("expected a violation, got {other:?}"),
        }

        // The path 0-1-2-3-4-5 split at 3 has a single crossing edge, so
        // the strict m*r/2 threshold holds.
        let p6 = path(6);
        assert_eq!(
            sparse_witness_check(&p6, 2, 4, SparsityMode::CrossEdges { left: 3 }, &budget)
                .unwrap(),
            SparsityVerdict::Pass
        );
    }

    #[test]
    fn sparsity_check_exhausted_budget_is_indeterminate() {
        // Thresholds sit below the degree bound (so nothing prunes at the
        // root) but need nine-plus picks before any hit, past the budget.
        let g = complete(30);
        let tiny = SearchBudget::nodes(5);
        assert_eq!(
            sparse_witness_check(&g, 10, 23, SparsityMode::InducedEdges, &tiny).unwrap(),
            SparsityVerdict::Indeterminate
        );
        assert_eq!(
            sparse_witness_check(
                &complete_bipartite(15, 15),
                10,
                25,
                SparsityMode::CrossEdges { left: 15 },
                &tiny
            )
            .unwrap(),
            SparsityVerdict::Indeterminate
        );
    }

    fn brute_force_induced(g: &Graph, m: usize, r: usize) -> bool {
        let n = g.vertex_count();
        let need = (m * r).div_ceil(8);
        for mask in 0u32..(1u32 << n) {
            if (mask.count_ones() as usize) > m {
                continue;
            }
            let count = g
                .edges()
                .iter()
                .filter(|&&(u, v)| mask & (1 << u) != 0 && mask & (1 << v) != 0)
                .count();
            if count >= need {
                return true;
            }
        }
        false
    }

    fn brute_force_cross(g: &Graph, m: usize, r: usize, left: usize) -> bool {
        let n = g.vertex_count();
        let need = m * r / 2 + 1;
        let right = n - left;
        for amask in 0u32..(1u32 << left) {
            if (amask.count_ones() as usize) > m {
                continue;
            }
            for bmask in 0u32..(1u32 << right) {
                if (bmask.count_ones() as usize) > m {
                    continue;
                }
                let count = g
                    .edges()
                    .iter()
                    .filter(|&&(u, v)| {
                        let (lo, hi) = if (u as usize) < left { (u, v) } else { (v, u) };
                        (lo as usize) < left
                            && (hi as usize) >= left
                            && amask & (1 << lo) != 0
                            && bmask & (1 << (hi as usize - left)) != 0
                    })
                    .count();
                if count >= need {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn sparsity_check_agrees_with_exhaustive_enumeration() {
        let spec = small_spec(10, 8, 4.0, 1, 2, 42);
        let (bg, report) = gen_small_r(&spec).unwrap();
        let sizes: Vec<usize> = report.layers.iter().map(|l| l.size).collect();
        assert_eq!(sizes, vec![4, 3]);
        let g = bg.to_graph();
        assert!(g.vertex_count() <= 20);
        let budget = SearchBudget::nodes(10_000_000);
        for m in 1..=5 {
            for r in [4usize, 8] {
                let got = sparse_witness_check(&g, m, r, SparsityMode::InducedEdges, &budget)
                    .unwrap();
                let expect = brute_force_induced(&g, m, r);
                assert_eq!(
                    matches!(got, SparsityVerdict::Violation(_)),
                    expect,
                    "induced m = {m}, r = {r}"
                );
                assert_ne!(got, SparsityVerdict::Indeterminate);

                let mode = SparsityMode::CrossEdges { left: 10 };
                let got = sparse_witness_check(&g, m, r, mode, &budget).unwrap();
                let expect = brute_force_cross(&g, m, r, 10);
                assert_eq!(
                    matches!(got, SparsityVerdict::Violation(_)),
                    expect,
                    "cross m = {m}, r = {r}"
                );
                assert_ne!(got, SparsityVerdict::Indeterminate);
            }
        }
    }

    #[test]
    fn spec_and_report_round_trip_through_json() {
        let spec = tiny_small_r_preset();
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("small_r"));
        let back: ConstructionSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(spec, back);

        let (_, report) = gen_small_r(&spec).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: GenReport = serde_json::from_str(&json).unwrap();
        assert_eq!(report, back);

        // Omitted overrides deserialize as defaults.
        let bare: ConstructionSpec = serde_json::from_str(
            r#"{"kind":"large_r","n":64,"r":4,"seed":7}"#,
        )
        .unwrap();
        assert_eq!(bare.overrides, Overrides::default());
    }
}
