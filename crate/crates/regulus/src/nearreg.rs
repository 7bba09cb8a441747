//! Randomized near-regularization: a single shrinking round that narrows a
//! graph's corrected-degree window, the deterministic (eps, d, delta)
//! schedule that drives rounds to termination, the iterated wrapper, and
//! extraction of exactly regular subgraphs from almost-regular hosts.
//!
//! The process is Las Vegas throughout: every accepted stage and every
//! final output is certified by direct counting, so weakened desk-scale
//! constants cost retries, never correctness.

use crate::config::{ConstantsConfig, SearchBudget};
use crate::graph::{bipartite_half, bipartite_peel, Graph, SubgraphWitness};
use crate::matching::{regular_bipartite_extract, regular_core};
use crate::oracle::{check_regular_witness, find_regular_subgraph_exact, SearchVerdict};
use crate::{BipartiteGraph, Error, Result};
use rand::Rng;

// ==== corrected graphs ==================================================

/// A graph together with a nonnegative per-vertex correction. The process
/// tracks corrected degrees deg(v) + correction(v), which stay inside a
/// shrinking window even when real degrees momentarily fall out.
#[derive(Clone, Debug)]
pub struct CorrectedGraph {
    pub graph: Graph,
    pub correction: Vec<u32>,
}

impl CorrectedGraph {
    pub fn from_graph(graph: Graph) -> CorrectedGraph {
        let n = graph.vertex_count();
        CorrectedGraph { graph, correction: vec![0; n] }
    }

    pub fn new(graph: Graph, correction: Vec<u32>) -> Result<CorrectedGraph> {
        if correction.len() != graph.vertex_count() {
            return Err(Error::pre(format!(
                "correction length {} does not match vertex count {}",
                correction.len(),
                graph.vertex_count()
            )));
        }
        Ok(CorrectedGraph { graph, correction })
    }

    pub fn corrected_degree(&self, v: u32) -> usize {
        self.graph.degree(v) + self.correction[v as usize] as usize
    }

    pub fn sum_correction(&self) -> u64 {
        self.correction.iter().map(|&f| f as u64).sum()
    }

    /// Every corrected degree must sit in [d, delta].
    pub fn check_window(&self, d: f64, delta: f64) -> Result<()> {
        let tol = 1e-9 * delta.max(1.0);
        for v in 0..self.graph.vertex_count() as u32 {
            let cd = self.corrected_degree(v) as f64;
            if cd + tol < d || cd > delta + tol {
                return Err(Error::pre(format!(
                    "vertex {v} has corrected degree {cd}, outside [{d}, {delta}]"
                )));
            }
        }
        Ok(())
    }
}

// ==== the deterministic schedule ========================================

/// State entering stage i: the current window [d, delta] and the deletion
/// rate eps chosen for the round.
#[derive(Clone, Copy, Debug)]
pub struct ScheduleStage {
    pub eps: f64,
    pub d: f64,
    pub delta: f64,
}

/// The full stage sequence plus the terminal window.
#[derive(Clone, Debug)]
pub struct Schedule {
    pub stages: Vec<ScheduleStage>,
    pub d0: f64,
    pub delta0: f64,
    pub slack: f64,
    pub d_final: f64,
    pub delta_final: f64,
}

const MAX_STAGES: usize = 50_000_000;

/// Builds the stage sequence: eps is maximal subject to eps <= 1/100 and
/// delta >= (1 + 10 eps) d, the window shrinks by the fixed factors
/// (1 - 5/4 eps) and (1 - 7/4 eps), and the sequence stops as soon as
/// delta <= d + slack. Stage values use exactly the update expressions
/// below, so callers replaying them see bit-identical windows.
pub fn build_schedule(d: f64, delta0: f64, slack: f64) -> Result<Schedule> {
    if !(d > 0.0) || !d.is_finite() || !delta0.is_finite() || !(slack > 0.0) || !slack.is_finite() {
        return Err(Error::pre(format!("need finite delta0 >= d > 0 and slack > 0; got d = {d}, delta0 = {delta0}, slack = {slack}")));
    }
    if delta0 < d {
        return Err(Error::pre(format!("delta0 = {delta0} is below d = {d}")));
    }
    let mut stages = Vec::new();
    let (mut cur_d, mut cur_delta) = (d, delta0);
    while cur_delta > cur_d + slack {
        if stages.len() >= MAX_STAGES {
            return Err(Error::Internal("schedule did not terminate".into()));
        }
        let eps = (cur_delta / cur_d - 1.0) / 10.0;
        let eps = if eps > 0.01 { 0.01 } else { eps };
        stages.push(ScheduleStage { eps, d: cur_d, delta: cur_delta });
        cur_d = (1.0 - 1.25 * eps) * cur_d;
        cur_delta = (1.0 - 1.75 * eps) * cur_delta;
    }
    Ok(Schedule { stages, d0: d, delta0, slack, d_final: cur_d, delta_final: cur_delta })
}

impl Schedule {
    /// Re-derives the whole sequence and checks every declared invariant:
    /// recursion exactness, eps maximality, the termination condition, the
    /// cubic lower bound on the final d, the 1% geometric decay of eps * d,
    /// and per-stage contraction of the window ratio.
    pub fn verify(&self) -> Result<()> {
        let lambda = self.delta0 / self.d0;
        let (mut cur_d, mut cur_delta) = (self.d0, self.delta0);
        for (i, st) in self.stages.iter().enumerate() {
            if st.d != cur_d || st.delta != cur_delta {
                return Err(Error::Internal(format!("stage {i} does not replay the recursion")));
            }
            if cur_delta <= cur_d + self.slack {
                return Err(Error::Internal(format!("stage {i} ran past termination")));
            }
            let want = ((cur_delta / cur_d - 1.0) / 10.0).min(0.01);
            if st.eps != want || !(st.eps > 0.0) {
                return Err(Error::Internal(format!("stage {i} eps {} is not maximal ({want})", st.eps)));
            }
            let next_d = (1.0 - 1.25 * st.eps) * cur_d;
            let next_delta = (1.0 - 1.75 * st.eps) * cur_delta;
            if next_delta / next_d > (1.0 - st.eps / 2.0) * (cur_delta / cur_d) {
                return Err(Error::Internal(format!("stage {i} ratio failed to contract")));
            }
            cur_d = next_d;
            cur_delta = next_delta;
        }
        if cur_d != self.d_final || cur_delta != self.delta_final {
            return Err(Error::Internal("terminal window does not replay".into()));
        }
        if cur_delta > cur_d + self.slack {
            return Err(Error::Internal("schedule stopped before termination".into()));
        }
        if self.d_final < self.d0 / lambda.powi(3) {
            return Err(Error::Internal(format!(
                "final d {} fell below d0 / lambda^3 = {}",
                self.d_final,
                self.d0 / lambda.powi(3)
            )));
        }
        for w in self.stages.windows(2) {
            if w[1].eps * w[1].d > 0.99 * w[0].eps * w[0].d {
                return Err(Error::Internal("eps * d failed the 1% decay".into()));
            }
        }
        Ok(())
    }
}

// ==== one random deletion round =========================================

/// Raw output of a single random round, before any acceptance check.
#[derive(Clone, Debug)]
pub struct DeletionRound {
    /// Surviving graph, compacted.
    pub graph: Graph,
    /// Thinned corrections on the surviving vertices.
    pub correction: Vec<u32>,
    /// Surviving vertex i had input id kept[i].
    pub kept: Vec<u32>,
    /// Whether kept[i] was in the low class at split time.
    pub was_low: Vec<bool>,
}

fn binomial_thin<R: Rng>(rng: &mut R, n: u32, p: f64) -> u32 {
    (0..n).filter(|_| rng.gen_bool(p)).count() as u32
}

/// One random deletion round on a corrected graph whose corrected degrees
/// all lie in [d, delta]. Splitting at (1 + gamma/2) d with
/// gamma = delta/d - 1, the round deletes edges inside the high class with
/// probability 2 eps - eps^2, edges across the split with probability eps,
/// and low-class vertices with probability eps, then thins corrections
/// binomially with survival 1 - eps (low) or (1 - eps)^2 (high).
///
/// Conditioned on survival, a low vertex's corrected degree is exactly
/// Bin(old corrected degree, 1 - eps): each incident edge dies only
/// through its far endpoint's single eps-coin, and correction units carry
/// independent 1 - eps coins. High vertices get the (1 - eps)^2 law the
/// same way. Draws happen in canonical order (edges, then vertices, then
/// corrections), so a seeded generator reproduces the round bit for bit.
pub fn deletion_round<R: Rng>(
    cg: &CorrectedGraph,
    eps: f64,
    d: f64,
    delta: f64,
    rng: &mut R,
) -> Result<DeletionRound> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::pre(format!("eps = {eps} must lie in (0, 1)")));
    }
    if !(d > 0.0) || delta < d {
        return Err(Error::pre(format!("window [{d}, {delta}] is invalid")));
    }
    cg.check_window(d, delta)?;
    let n = cg.graph.vertex_count();
    let gamma = delta / d - 1.0;
    let low_bound = (1.0 + gamma / 2.0) * d;
    let low: Vec<bool> =
        (0..n as u32).map(|v| cg.corrected_degree(v) as f64 <= low_bound).collect();

    let p_high = 2.0 * eps - eps * eps;
    let edge_survives: Vec<bool> = cg
        .graph
        .edges()
        .iter()
        .map(|&(u, v)| match (low[u as usize], low[v as usize]) {
            (false, false) => !rng.gen_bool(p_high),
            (true, true) => true,
            _ => !rng.gen_bool(eps),
        })
        .collect();
    let alive: Vec<bool> = (0..n).map(|v| !low[v] || !rng.gen_bool(eps)).collect();

    let kept: Vec<u32> = (0..n as u32).filter(|&v| alive[v as usize]).collect();
    let mut local = vec![u32::MAX; n];
    for (i, &v) in kept.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let edges = cg.graph.edges().iter().zip(&edge_survives).filter_map(|(&(u, v), &s)| {
        (s && alive[u as usize] && alive[v as usize]).then(|| (local[u as usize], local[v as usize]))
    });
    let graph = Graph::new(kept.len(), edges)?;
    let correction: Vec<u32> = kept
        .iter()
        .map(|&v| {
            let p = if low[v as usize] { 1.0 - eps } else { (1.0 - eps) * (1.0 - eps) };
            binomial_thin(rng, cg.correction[v as usize], p)
        })
        .collect();
    let was_low = kept.iter().map(|&v| low[v as usize]).collect();
    Ok(DeletionRound { graph, correction, kept, was_low })
}

// ==== one accepted stage ================================================

/// Diagnostics from an accepted stage.
#[derive(Clone, Copy, Debug, Default)]
pub struct StepStats {
    pub attempts: u64,
    pub survivors: usize,
    pub over_cap: usize,
    pub sum_deficiency: u64,
    pub cap_removed_edges: usize,
    pub sum_correction_in: u64,
    pub sum_correction_out: u64,
}

/// An accepted stage: the shrunken corrected graph, the surviving-vertex
/// relabeling, and acceptance diagnostics.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    pub cg: CorrectedGraph,
    pub kept: Vec<u32>,
    pub stats: StepStats,
}

fn ceil_deficiency(target: f64, have: usize) -> u32 {
    let gap = target - have as f64;
    if gap <= 0.0 {
        0
    } else {
        gap.ceil() as u32
    }
}

/// Runs deletion rounds until one passes the acceptance checks, then
/// repairs it:
///
/// * size: at least (1 - 4 eps) |G| vertices survive;
/// * few over-cap vertices: graph degrees above (1 - 7/4 eps) delta number
///   at most 4 |G| exp(-eps delta / 500);
/// * small deficiency: topping every corrected degree up to
///   (1 - 5/4 eps) d costs at most 4 |G| exp(-eps d / 100) in total;
/// * bounded correction growth: the rebuilt correction sum exceeds the old
///   one by at most sum_tolerance * |G| * exp(-eps d / 1000).
///
/// Repair deletes edges at over-cap vertices, always at the currently
/// highest-degree vertex toward its highest-degree neighbor, then sets
/// each correction to the least value lifting the vertex to the new lower
/// bound. The gap between the new bounds exceeds 9 eps d >= 72 under the
/// eps-d floor, so the lift never overshoots the new upper bound; the
/// finished window is still re-checked vertex by vertex. Budget
/// exhaustion reports the last attempt's failures.
pub fn one_step<R: Rng>(
    cg: &CorrectedGraph,
    eps: f64,
    d: f64,
    delta: f64,
    cfg: &ConstantsConfig,
    rng: &mut R,
) -> Result<StepOutcome> {
    cfg.validate()?;
    if !(eps > 0.0 && eps <= 0.01) {
        return Err(Error::pre(format!("eps = {eps} must lie in (0, 1/100]")));
    }
    if eps * d < cfg.eps_d_floor {
        return Err(Error::pre(format!(
            "eps * d = {} is below the configured floor {}",
            eps * d,
            cfg.eps_d_floor
        )));
    }
    let tol = 1e-9 * delta.max(1.0);
    if delta + tol < (1.0 + 10.0 * eps) * d {
        return Err(Error::pre(format!("delta = {delta} is below (1 + 10 eps) d = {}", (1.0 + 10.0 * eps) * d)));
    }
    let n = cg.graph.vertex_count();
    if n == 0 {
        return Err(Error::EmptyGraph);
    }

    let lower = (1.0 - 1.25 * eps) * d;
    let upper = (1.0 - 1.75 * eps) * delta;
    let size_floor = (1.0 - 4.0 * eps) * n as f64;
    let cap_allow = 4.0 * n as f64 * (-eps * delta / 500.0).exp();
    let deficiency_allow = 4.0 * n as f64 * (-eps * d / 100.0).exp();
    let growth_allow = cfg.sum_tolerance * n as f64 * (-eps * d / 1000.0).exp();
    let sum_in = cg.sum_correction();

    let mut last_reason = String::new();
    for attempt in 1..=cfg.retry_budget {
        let round = deletion_round(cg, eps, d, delta, rng)?;
        let kept_n = round.kept.len();
        let over_cap = (0..kept_n as u32).filter(|&v| round.graph.degree(v) as f64 > upper).count();
        let deficiency: u64 = (0..kept_n as u32)
            .map(|v| {
                let have = round.graph.degree(v) + round.correction[v as usize] as usize;
                ceil_deficiency(lower, have) as u64
            })
            .sum();

        let mut fails = Vec::new();
        if (kept_n as f64) < size_floor {
            fails.push(format!("survivors {kept_n} below {size_floor:.2}"));
        }
        if over_cap as f64 > cap_allow {
            fails.push(format!("{over_cap} over-cap vertices exceed {cap_allow:.2}"));
        }
        if deficiency as f64 > deficiency_allow {
            fails.push(format!("deficiency {deficiency} exceeds {deficiency_allow:.2}"));
        }
        if !fails.is_empty() {
            last_reason = fails.join("; ");
            continue;
        }

        // Cap repair on the accepted round.
        let mut adj: Vec<std::collections::BTreeSet<u32>> = vec![Default::default(); kept_n];
        for &(u, v) in round.graph.edges() {
            adj[u as usize].insert(v);
            adj[v as usize].insert(u);
        }
        let mut removed = 0usize;
        loop {
            let Some(v) = (0..kept_n)
                .filter(|&v| adj[v].len() as f64 > upper)
                .max_by_key(|&v| (adj[v].len(), std::cmp::Reverse(v)))
            else {
                break;
            };
            let &u = adj[v]
                .iter()
                .max_by_key(|&&u| (adj[u as usize].len(), std::cmp::Reverse(u)))
                .expect("over-cap vertex has a neighbor");
            adj[v].remove(&u);
            adj[u as usize].remove(&(v as u32));
            removed += 1;
        }
        let capped_edges = adj
            .iter()
            .enumerate()
            .flat_map(|(v, nb)| nb.iter().filter(move |&&u| (v as u32) < u).map(move |&u| (v as u32, u)));
        let graph2 = Graph::new(kept_n, capped_edges)?;

        let correction2: Vec<u32> =
            (0..kept_n as u32).map(|v| ceil_deficiency(lower, graph2.degree(v))).collect();
        let sum_out: u64 = correction2.iter().map(|&f| f as u64).sum();
        if sum_out as f64 > sum_in as f64 + growth_allow {
            last_reason = format!("correction sum grew {sum_in} -> {sum_out}, over budget {growth_allow:.2}");
            continue;
        }

        let out = CorrectedGraph::new(graph2, correction2)?;
        out.check_window(lower, upper)?;
        let stats = StepStats {
            attempts: attempt,
            survivors: kept_n,
            over_cap,
            sum_deficiency: deficiency,
            cap_removed_edges: removed,
            sum_correction_in: sum_in,
            sum_correction_out: sum_out,
        };
        return Ok(StepOutcome { cg: out, kept: round.kept, stats });
    }
    Err(Error::LasVegas {
        attempts: cfg.retry_budget,
        reason: format!("stage at eps = {eps}, d = {d} kept failing: {last_reason}"),
    })
}

// ==== the iterated wrapper ==============================================

/// Which of the three routes produced the output.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegRoute {
    /// The input window was already within slack; the graph is its own
    /// answer.
    Identity,
    /// The staged random process ran to termination.
    FullProcess,
    /// Degenerate small-degree shortcut: a maximal matching.
    MaximalMatching,
}

/// Near-regularization result: the subgraph, its average degree, and how
/// it was obtained.
#[derive(Clone, Debug)]
pub struct NearRegOutcome {
    pub witness: SubgraphWitness,
    pub d_prime: f64,
    pub route: RegRoute,
    pub stages_run: usize,
    pub attempts: u64,
}

fn check_near_reg_posts(
    n_in: usize,
    h: &Graph,
    d0: f64,
    lambda: f64,
    cfg: &ConstantsConfig,
) -> std::result::Result<f64, String> {
    if h.vertex_count() == 0 || h.edge_count() == 0 {
        return Err("output graph is empty".into());
    }
    let d_prime = h.avg_degree();
    let avg_floor = cfg.c_scale * d0 / lambda.powi(3) - 1.0;
    if d_prime < avg_floor {
        return Err(format!("average degree {d_prime:.3} below {avg_floor:.3}"));
    }
    let max_deg = h.max_degree().unwrap_or(0) as f64;
    if max_deg > d_prime + cfg.slack + 1.0 {
        return Err(format!("max degree {max_deg} above {:.3}", d_prime + cfg.slack + 1.0));
    }
    let size_floor = cfg.c_scale * n_in as f64 / lambda.powi(10);
    if (h.vertex_count() as f64) < size_floor {
        return Err(format!("size {} below {size_floor:.3}", h.vertex_count()));
    }
    Ok(d_prime)
}

/// Shrinks `g` to a subgraph H whose maximum degree exceeds its average
/// degree d' by at most slack + 1, with d' at least
/// c_scale * d / lambda^3 - 1 and |H| at least c_scale |g| / lambda^10,
/// where d is the minimum degree and lambda the max/min degree ratio.
///
/// Route selection: an already-narrow window returns the graph unchanged;
/// if every scheduled stage clears the eps-d floor the staged process runs
/// and its output is checked directly (retrying the whole chain on a
/// failed check); otherwise the degenerate maximal-matching shortcut
/// answers with d' = 1, which is only correct while the average-degree
/// floor is at most 1 -- larger inputs get an explicit error instead of a
/// silently weakened answer.
pub fn near_regularize<R: Rng>(g: &Graph, cfg: &ConstantsConfig, rng: &mut R) -> Result<NearRegOutcome> {
    cfg.validate()?;
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let d0 = g.min_degree().unwrap_or(0) as f64;
    if d0 < 1.0 {
        return Err(Error::pre("near-regularization needs minimum degree at least 1"));
    }
    let delta0 = g.max_degree().unwrap_or(0) as f64;
    let lambda = delta0 / d0;
    let n = g.vertex_count();
    let schedule = build_schedule(d0, delta0, cfg.slack)?;

    if schedule.stages.is_empty() {
        let d_prime = check_near_reg_posts(n, g, d0, lambda, cfg).map_err(Error::Internal)?;
        return Ok(NearRegOutcome {
            witness: SubgraphWitness::identity(g),
            d_prime,
            route: RegRoute::Identity,
            stages_run: 0,
            attempts: 0,
        });
    }

    if schedule.stages.iter().all(|st| st.eps * st.d >= cfg.eps_d_floor) {
        let mut attempts_total = 0u64;
        let mut last = String::new();
        for _ in 0..cfg.retry_budget {
            let mut cur = CorrectedGraph::from_graph(g.clone());
            let mut map: Vec<u32> = (0..n as u32).collect();
            for st in &schedule.stages {
                let out = one_step(&cur, st.eps, st.d, st.delta, cfg, rng)?;
                map = out.kept.iter().map(|&i| map[i as usize]).collect();
                cur = out.cg;
                attempts_total += out.stats.attempts;
            }
            match check_near_reg_posts(n, &cur.graph, d0, lambda, cfg) {
                Ok(d_prime) => {
                    let witness = SubgraphWitness::new(cur.graph, map)?;
                    debug_assert!(witness.is_subgraph_of(g));
                    return Ok(NearRegOutcome {
                        witness,
                        d_prime,
                        route: RegRoute::FullProcess,
                        stages_run: schedule.stages.len(),
                        attempts: attempts_total,
                    });
                }
                Err(reason) => last = reason,
            }
        }
        return Err(Error::LasVegas {
            attempts: cfg.retry_budget,
            reason: format!("staged process kept missing its output bounds: {last}"),
        });
    }

    // Maximal matching shortcut.
    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    for &(u, v) in g.edges() {
        if !used[u as usize] && !used[v as usize] {
            used[u as usize] = true;
            used[v as usize] = true;
            pairs.push((u, v));
        }
    }
    let vertices: Vec<u32> = (0..n as u32).filter(|&v| used[v as usize]).collect();
    let mut local = vec![u32::MAX; n];
    for (i, &v) in vertices.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let graph = Graph::new(vertices.len(), pairs.iter().map(|&(u, v)| (local[u as usize], local[v as usize])))?;
    let d_prime = check_near_reg_posts(n, &graph, d0, lambda, cfg).map_err(|reason| {
        Error::RouteFailed(format!(
            "matching shortcut cannot meet the bounds at min degree {d0}, ratio {lambda:.3}: {reason}; \
             raise slack so the staged process applies, or lower c_scale"
        ))
    })?;
    let witness = SubgraphWitness::new(graph, vertices)?;
    debug_assert!(witness.is_subgraph_of(g));
    Ok(NearRegOutcome {
        witness,
        d_prime,
        route: RegRoute::MaximalMatching,
        stages_run: 0,
        attempts: 0,
    })
}

// ==== exact extraction from almost-regular hosts ========================

/// Splits the vertices of a graph over a known bipartition (a predicate
/// on local indices) and rebuilds it as a bipartite graph plus per-side
/// host ids.
fn graph_as_bipartite(
    w_graph: &Graph,
    host_ids: &[u32],
    on_a: &[bool],
) -> Option<(BipartiteGraph, Vec<u32>, Vec<u32>)> {
    let n = w_graph.vertex_count();
    let mut a_ids = Vec::new();
    let mut b_ids = Vec::new();
    let mut side_index = vec![u32::MAX; n];
    for v in 0..n {
        if on_a[v] {
            side_index[v] = a_ids.len() as u32;
            a_ids.push(host_ids[v]);
        } else {
            side_index[v] = b_ids.len() as u32;
            b_ids.push(host_ids[v]);
        }
    }
    let mut edges = Vec::with_capacity(w_graph.edge_count());
    for &(u, v) in w_graph.edges() {
        let (a, b) = match (on_a[u as usize], on_a[v as usize]) {
            (true, false) => (u, v),
            (false, true) => (v, u),
            _ => return None,
        };
        edges.push((side_index[a as usize], side_index[b as usize]));
    }
    BipartiteGraph::new(a_ids.len(), b_ids.len(), edges).ok().map(|h| (h, a_ids, b_ids))
}

/// Flow-extracts an r-regular piece of `h`: find an s-regular core for
/// some s in [r, s_top] (largest first), then peel it down to r by
/// repeated perfect-matching removal. Ids returned are h-side indices.
fn flow_extract_r(h: &BipartiteGraph, r: usize, s_top: usize) -> Option<(BipartiteGraph, Vec<u32>, Vec<u32>, usize)> {
    for s in (r..=s_top).rev() {
        if let Some((core, ca, cb)) = regular_core(h, s) {
            let reg = if s == r { core } else { regular_bipartite_extract(&core, r).ok()? };
            return Some((reg, ca, cb, s));
        }
    }
    None
}

/// Builds a verified witness from a bipartite subgraph expressed through
/// two id chains back to the host graph.
fn bipartite_to_witness(
    host: &Graph,
    sub: &BipartiteGraph,
    a_host: &[u32],
    b_host: &[u32],
    r: usize,
) -> Result<SubgraphWitness> {
    let graph = sub.to_graph();
    let vertices: Vec<u32> = a_host.iter().chain(b_host.iter()).copied().collect();
    let w = SubgraphWitness::new(graph, vertices)?;
    check_regular_witness(host, &w, r)?;
    Ok(w)
}

/// Finds an exactly r-regular subgraph of an almost-regular graph: halve
/// into a bipartite subgraph, peel to min degree avg/4, near-regularize,
/// then flow-extract an s-regular core (s >= r) and peel matchings down
/// to r. Desk-scale fallbacks keep the route honest when the randomized
/// middle returns something too thin to extract from: flow extraction
/// directly on the peeled bipartite graph, then the exact budgeted
/// search on the original input. Every success is re-certified.
pub fn regular_in_almost_regular<R: Rng>(
    g: &Graph,
    r: usize,
    cfg: &ConstantsConfig,
    rng: &mut R,
) -> Result<SubgraphWitness> {
    cfg.validate()?;
    if r == 0 {
        return Err(Error::pre("extraction needs r >= 1"));
    }
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.edge_count() == 0 {
        return Err(Error::RouteFailed("no edges, so no regular subgraph".into()));
    }
    let d_avg = g.avg_degree();
    let mut best_s = 0usize;

    let (hb, a_ids, b_ids) = bipartite_half(g)?;
    let (hp, pa, pb) = bipartite_peel(&hb, d_avg / 4.0);
    let pa_g: Vec<u32> = pa.iter().map(|&i| a_ids[i as usize]).collect();
    let pb_g: Vec<u32> = pb.iter().map(|&i| b_ids[i as usize]).collect();

    if hp.edge_count() > 0 {
        let na_p = hp.a_count();
        let ph = hp.to_graph();
        // ph layout: ids below na_p are A-side.
        let ph_to_g: Vec<u32> = (0..ph.vertex_count() as u32)
            .map(|v| if (v as usize) < na_p { pa_g[v as usize] } else { pb_g[v as usize - na_p] })
            .collect();

        if let Ok(nro) = near_regularize(&ph, cfg, rng) {
            let side_is_a: Vec<bool> = nro.witness.vertices.iter().map(|&v| (v as usize) < na_p).collect();
            let host_ids: Vec<u32> =
                nro.witness.vertices.iter().map(|&v| ph_to_g[v as usize]).collect();
            let s_top = ((nro.d_prime / 10.0).ceil() as usize).max(r);
            if let Some((h2, wa, wb)) = graph_as_bipartite(&nro.witness.graph, &host_ids, &side_is_a) {
                if let Some((reg, ca, cb, s)) = flow_extract_r(&h2, r, s_top) {
                    best_s = best_s.max(s);
                    let a_host: Vec<u32> = ca.iter().map(|&i| wa[i as usize]).collect();
                    let b_host: Vec<u32> = cb.iter().map(|&i| wb[i as usize]).collect();
                    if let Ok(w) = bipartite_to_witness(g, &reg, &a_host, &b_host, r) {
                        return Ok(w);
                    }
                }
            }
        }

        // Fallback: flow extraction straight off the peeled bipartite graph.
        let s_top = ((hp.edge_count() as f64 * 2.0 / ph.vertex_count() as f64).floor() as usize)
            .clamp(r, r + 8);
        if let Some((reg, ca, cb, s)) = flow_extract_r(&hp, r, s_top) {
            best_s = best_s.max(s);
            let a_host: Vec<u32> = ca.iter().map(|&i| pa_g[i as usize]).collect();
            let b_host: Vec<u32> = cb.iter().map(|&i| pb_g[i as usize]).collect();
            if let Ok(w) = bipartite_to_witness(g, &reg, &a_host, &b_host, r) {
                return Ok(w);
            }
        }
    }

    // Last resort: the exact budgeted search on the original input.
    let budget = SearchBudget::nodes(cfg.search_budget);
    match find_regular_subgraph_exact(g, r, &budget)? {
        SearchVerdict::Found(w) => Ok(w),
        SearchVerdict::Absent => Err(Error::RouteFailed(format!(
            "no {r}-regular subgraph exists in this input (search space exhausted); best regular degree reached: {best_s}"
        ))),
        SearchVerdict::Indeterminate => Err(Error::RouteFailed(format!(
            "extraction failed and the exact search ran out of budget; best regular degree reached: {best_s}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::stage_rng;
    use crate::graph::{complete_bipartite, cycle, degree_summary};

    fn circulant(n: u32, offsets: &[u32]) -> Graph {
        let mut edges = std::collections::BTreeSet::new();
        for v in 0..n {
            for &o in offsets {
                let u = (v + o) % n;
                if u != v {
                    edges.insert((v.min(u), v.max(u)));
                }
            }
        }
        Graph::new(n as usize, edges).unwrap()
    }

    #[test]
    fn schedule_trivial_and_cubic_floor() {
        let s = build_schedule(1000.0, 1000.0, 10.0).unwrap();
        assert!(s.stages.is_empty());
        assert_eq!(s.d_final, 1000.0);
        s.verify().unwrap();

        let s = build_schedule(1000.0, 2000.0, 10.0).unwrap();
        assert!(!s.stages.is_empty());
        assert!(s.d_final >= 125.0, "final d {}", s.d_final);
        assert!(s.delta_final <= s.d_final + 10.0);
        s.verify().unwrap();

        assert!(build_schedule(0.0, 1.0, 1.0).is_err());
        assert!(build_schedule(10.0, 5.0, 1.0).is_err());
        assert!(build_schedule(10.0, 15.0, 0.0).is_err());
    }

    #[test]
    fn schedule_invariants_on_a_grid() {
        for d in [5.0, 50.0, 800.0, 12345.6] {
            for lam in [1.0, 1.3, 2.0, 5.0, 10.0] {
                for slack in [0.5, 4.0, 100.0] {
                    let s = build_schedule(d, lam * d, slack).unwrap();
                    s.verify().unwrap();
                }
            }
        }
    }

    #[test]
    fn round_with_empty_high_class_only_deletes_vertices() {
        // 20-regular, corrections zero, window [20, 24.2]: the split point
        // (1 + gamma/2) d = 22.1 puts everyone low, so surviving pairs
        // keep their edges.
        let g = complete_bipartite(20, 20);
        let cg = CorrectedGraph::from_graph(g.clone());
        let mut rng = stage_rng(5, "round-low");
        let round = deletion_round(&cg, 0.01, 20.0, 24.2, &mut rng).unwrap();
        assert!(round.was_low.iter().all(|&l| l));
        for (i, &u) in round.kept.iter().enumerate() {
            for (j, &v) in round.kept.iter().enumerate().skip(i + 1) {
                if g.has_edge(u, v) {
                    assert!(round.graph.has_edge(i as u32, j as u32));
                }
            }
        }
        // Corrections thin binomially and stay within their old values.
        let cg2 = CorrectedGraph::new(g, vec![3; 40]).unwrap();
        let round = deletion_round(&cg2, 0.2, 20.0, 24.2, &mut rng).unwrap();
        assert!(round.correction.iter().all(|&f| f <= 3));
    }

    #[test]
    fn round_is_reproducible_from_the_seed() {
        let g = circulant(300, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        let cg = CorrectedGraph::from_graph(g);
        let mut r1 = stage_rng(77, "round-repro");
        let mut r2 = stage_rng(77, "round-repro");
        let a = deletion_round(&cg, 0.05, 20.0, 22.0, &mut r1).unwrap();
        let b = deletion_round(&cg, 0.05, 20.0, 22.0, &mut r2).unwrap();
        assert_eq!(a.kept, b.kept);
        assert_eq!(a.graph.edges(), b.graph.edges());
        assert_eq!(a.correction, b.correction);
    }

    #[test]
    fn step_rejects_violated_preconditions() {
        let cfg = ConstantsConfig::default();
        let g = complete_bipartite(900, 900);
        let cg = CorrectedGraph::from_graph(g);
        let mut rng = stage_rng(1, "step-pre");
        // eps above the cap.
        assert!(one_step(&cg, 0.02, 880.0, 970.0, &cfg, &mut rng).is_err());
        // eps * d below the floor.
        assert!(one_step(&cg, 0.001, 880.0, 970.0, &cfg, &mut rng).is_err());
        // Window missing the actual degrees.
        assert!(one_step(&cg, 0.01, 950.0, 1100.0, &cfg, &mut rng).is_err());
        // delta below (1 + 10 eps) d.
        assert!(one_step(&cg, 0.01, 899.0, 905.0, &cfg, &mut rng).is_err());
    }

    #[test]
    fn step_lands_in_the_contracted_window() {
        let cfg = ConstantsConfig::default();
        let g = complete_bipartite(900, 900);
        let n = g.vertex_count();
        let cg = CorrectedGraph::from_graph(g);
        let mut rng = stage_rng(9, "step-window");
        let (eps, d, delta) = (0.01, 880.0, 970.0);
        let out = one_step(&cg, eps, d, delta, &cfg, &mut rng).unwrap();
        let lower = (1.0 - 1.25 * eps) * d;
        let upper = (1.0 - 1.75 * eps) * delta;
        out.cg.check_window(lower, upper).unwrap();
        assert!(out.kept.len() as f64 >= (1.0 - 4.0 * eps) * n as f64);
        assert!(out.stats.attempts >= 1);
        // Survivor relabeling points back into the input.
        assert!(out.kept.iter().all(|&v| (v as usize) < n));
    }

    #[test]
    fn near_regularize_identity_on_regular_inputs() {
        let cfg = ConstantsConfig::default();
        let g = cycle(50);
        let mut rng = stage_rng(3, "nr-identity");
        let out = near_regularize(&g, &cfg, &mut rng).unwrap();
        assert_eq!(out.route, RegRoute::Identity);
        assert_eq!(out.d_prime, 2.0);
        assert_eq!(out.witness.graph.edge_count(), 50);
    }

    #[test]
    fn near_regularize_matching_shortcut_meets_its_bounds() {
        // Degrees 40 on half the vertices, 80 on the other half: ratio 2,
        // so with slack 4 the schedule is nonempty but the floor routes the
        // run to the matching shortcut, whose bounds are then checked.
        let mut rng = stage_rng(21, "nr-matching");
        let base = circulant(2000, &(1..=20).collect::<Vec<_>>());
        let mut edges: std::collections::BTreeSet<(u32, u32)> = base.edges().iter().copied().collect();
        let mut extra: Vec<u32> = Vec::new();
        while extra.len() < 20 {
            let o = 25 + (rand::Rng::gen_range(&mut rng, 0..400u32));
            if !extra.contains(&o) {
                extra.push(o);
            }
        }
        for v in 0..1000u32 {
            for &o in &extra {
                let u = (v + o) % 1000;
                let (x, y) = (v.min(u), v.max(u));
                if x != y {
                    edges.insert((x, y));
                }
            }
        }
        let g = Graph::new(2000, edges).unwrap();
        let summary = degree_summary(&g).unwrap();
        assert!(summary.max_deg as f64 <= 2.0 * summary.min_deg as f64 + 1.0);

        let cfg = ConstantsConfig::default();
        let out = near_regularize(&g, &cfg, &mut rng).unwrap();
        assert_eq!(out.route, RegRoute::MaximalMatching);
        assert_eq!(out.d_prime, 1.0);
        let hs = degree_summary(&out.witness.graph).unwrap();
        assert_eq!(hs.max_deg, 1);
        assert!(out.witness.is_subgraph_of(&g));
        // The declared output bounds, re-checked here.
        let (d0, lam) = (summary.min_deg as f64, summary.max_deg as f64 / summary.min_deg as f64);
        assert!(1.0 >= cfg.c_scale * d0 / lam.powi(3) - 1.0);
        assert!(out.witness.graph.vertex_count() as f64 >= cfg.c_scale * 2000.0 / lam.powi(10));
    }

    #[test]
    fn near_regularize_staged_process_end_to_end() {
        // Dense random graph: degrees around 1200 with ratio ~1.1. At
        // slack 80 every non-terminal stage has eps * d > min(d/100, 8),
        // and d never drops below d0 / ratio^3 > 800, so the staged route
        // applies and its output bounds are verified directly.
        let mut rng = stage_rng(101, "nr-staged");
        let n = 1600usize;
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in (u + 1)..n as u32 {
                if rand::Rng::gen_bool(&mut rng, 0.75) {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, edges).unwrap();
        let s = degree_summary(&g).unwrap();
        let cfg = ConstantsConfig { slack: 80.0, ..ConstantsConfig::default() };
        let sched = build_schedule(s.min_deg as f64, s.max_deg as f64, cfg.slack).unwrap();
        assert!(!sched.stages.is_empty());
        assert!(sched.stages.iter().all(|st| st.eps * st.d >= cfg.eps_d_floor), "instance must exercise the staged route");

        let out = near_regularize(&g, &cfg, &mut rng).unwrap();
        assert_eq!(out.route, RegRoute::FullProcess);
        assert!(out.stages_run >= 1);
        assert!(out.witness.is_subgraph_of(&g));
        let hs = degree_summary(&out.witness.graph).unwrap();
        let lam = s.max_deg as f64 / s.min_deg as f64;
        assert!(out.d_prime >= cfg.c_scale * s.min_deg as f64 / lam.powi(3) - 1.0);
        assert!(hs.max_deg as f64 <= out.d_prime + cfg.slack + 1.0);
        assert!(out.witness.graph.vertex_count() as f64 >= cfg.c_scale * n as f64 / lam.powi(10));
    }

    #[test]
    fn extraction_on_bipartite_regular_hosts() {
        let cfg = ConstantsConfig::default();
        let mut rng = stage_rng(11, "extract-k44");
        let g = complete_bipartite(4, 4);
        let w = regular_in_almost_regular(&g, 2, &cfg, &mut rng).unwrap();
        check_regular_witness(&g, &w, 2).unwrap();

        // The 8-cycle's only 2-regular subgraph is the whole cycle.
        let mut rng = stage_rng(12, "extract-c8");
        let g = cycle(8);
        let w = regular_in_almost_regular(&g, 2, &cfg, &mut rng).unwrap();
        assert_eq!(w.graph.edge_count(), 8);
        assert_eq!(w.host_edges(), g.edges().to_vec());
    }

    #[test]
    fn extraction_from_a_seeded_regular_bipartite_host() {
        // 12-regular bipartite graph on 400 vertices via random distinct
        // circulant offsets.
        let mut rng = stage_rng(13, "extract-12reg");
        let mut offsets = Vec::new();
        while offsets.len() < 12 {
            let o = rand::Rng::gen_range(&mut rng, 0..200u32);
            if !offsets.contains(&o) {
                offsets.push(o);
            }
        }
        let edges = (0..200u32).flat_map(|a| offsets.iter().map(move |&o| (a, (a + o) % 200)));
        let h = BipartiteGraph::new(200, 200, edges).unwrap();
        assert_eq!(h.regularity(), Some(12));
        let g = h.to_graph();
        let cfg = ConstantsConfig::default();
        let w = regular_in_almost_regular(&g, 3, &cfg, &mut rng).unwrap();
        check_regular_witness(&g, &w, 3).unwrap();
    }

    #[test]
    fn extraction_reports_absence_honestly() {
        let cfg = ConstantsConfig::default();
        let mut rng = stage_rng(14, "extract-path");
        let g = crate::graph::path(9);
        match regular_in_almost_regular(&g, 2, &cfg, &mut rng) {
            Err(Error::RouteFailed(msg)) => assert!(msg.contains("exhausted"), "{msg}"),
            other => panic!("expected an explicit failure, got {other:?}"),
        }
    }
}
