//! Degree-class orchestration: split a uniform-right-degree bipartite host
//! by dyadic A-degree classes, then extract an r-regular subgraph along one
//! of two routes. Low-degree hosts go through an almost-biregular
//! descriptor, a dyadic-class substitute step, and the randomized
//! regularization extractor; high-degree classes keep exactly r edges per
//! right vertex and go through the sunflower machinery. Every success is
//! re-certified against the original input before it is returned.

use crate::config::ConstantsConfig;
use crate::graph::{
    bipartite_half, bipartite_peel, degree_summary, dyadic_degree_classes, min_degree_peel,
};
use crate::hyper::{bipartite_to_hyper, hyper_to_bipartite_regular, regular_subhypergraph};
use crate::nearreg::regular_in_almost_regular;
use crate::oracle::check_regular_witness;
use crate::{BipartiteGraph, Error, Graph, Result, SubgraphWitness};
use rand::seq::index::sample;
use rand::Rng;

// ==== almost-biregular descriptor =======================================

/// Witness that a bipartite graph is (L, s)-almost-biregular: every
/// B-degree equals s, the A-side average d = e/|A| is at least s
/// (equivalently |A| <= |B|), and every A-degree is at most L * d.
#[derive(Clone, Debug)]
pub struct AlmostBiregularDescriptor {
    pub l: f64,
    pub s: usize,
    pub d: f64,
}

impl AlmostBiregularDescriptor {
    pub fn check(h: &BipartiteGraph, l: f64, s: usize) -> Result<AlmostBiregularDescriptor> {
        if !(l >= 1.0) || s < 1 {
            return Err(Error::pre("need L >= 1 and s >= 1"));
        }
        if h.a_count() == 0 || h.b_count() == 0 {
            return Err(Error::EmptyGraph);
        }
        for b in 0..h.b_count() as u32 {
            if h.degree_b(b) != s {
                return Err(Error::pre(format!(
                    "B-vertex {b} has degree {}, expected {s}",
                    h.degree_b(b)
                )));
            }
        }
        if h.a_count() > h.b_count() {
            return Err(Error::pre(format!(
                "|A| = {} exceeds |B| = {}, so the average d falls below s",
                h.a_count(),
                h.b_count()
            )));
        }
        let d = h.edge_count() as f64 / h.a_count() as f64;
        for a in 0..h.a_count() as u32 {
            if h.degree_a(a) as f64 > l * d + 1e-9 {
                return Err(Error::pre(format!(
                    "A-vertex {a} has degree {} above L*d = {:.3}",
                    h.degree_a(a),
                    l * d
                )));
            }
        }
        Ok(AlmostBiregularDescriptor { l, s, d })
    }
}

// ==== trace =============================================================

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EsCase {
    One,
    Two,
}

impl std::fmt::Display for EsCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EsCase::One => write!(f, "1"),
            EsCase::Two => write!(f, "2"),
        }
    }
}

/// Everything the case split produced: the degree-class thresholds t_i,
/// the A-side classes they induce, the chosen case with its class index
/// and qualifying right vertices, and the working graphs. b_double_prime
/// and h_prime are filled in by the route that runs afterwards.
#[derive(Clone, Debug)]
pub struct ErdosSauerTrace {
    pub t0: f64,
    pub ts: Vec<f64>,
    pub ell: usize,
    pub classes: Vec<Vec<u32>>,
    pub case: EsCase,
    pub class_index: usize,
    pub b_prime: Vec<u32>,
    pub b_double_prime: Vec<u32>,
    pub h: BipartiteGraph,
    pub h_prime: Option<BipartiteGraph>,
    pub s_used: usize,
    pub r: usize,
}

// ==== case split ========================================================

/// Splits a host whose B-degrees all equal one value s into the two
/// routes. Thresholds grow as t_i = t_0 * (1 + 1/3r)^i until t_ell covers
/// log2 of the vertex count, so the dyadic classes partition A. Case 1
/// holds when at least half of B sends at least half its degree into the
/// lowest class; otherwise some class i >= 1 must have at least
/// |B| / (2 ell) right vertices with r or more neighbors in it, and the
/// largest such class is chosen. Neither holding is a consistency error:
/// the disjunction is a theorem at full-scale constants, and scaled-down
/// constants surface the miss instead of silently falling back.
pub fn classify_cases(h: &BipartiteGraph, r: usize, cfg: &ConstantsConfig) -> Result<ErdosSauerTrace> {
    cfg.validate()?;
    if r < 1 {
        return Err(Error::pre("need r >= 1"));
    }
    if h.a_count() == 0 || h.b_count() == 0 || h.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let s_used = h.degree_b(0);
    for b in 0..h.b_count() as u32 {
        if h.degree_b(b) != s_used {
            return Err(Error::pre(format!(
                "B-degrees must all be equal; vertex {b} has {} against {s_used}",
                h.degree_b(b)
            )));
        }
    }

    let ns = h.a_count() + h.b_count();
    let log2n = (ns as f64).log2();
    let ll = log2n.log2().max(0.0);
    let t0 = (cfg.t0_mult * r as f64 * ll).max(1.0);
    let ratio = 1.0 + 1.0 / (3.0 * r as f64);
    let mut ts = vec![t0];
    while *ts.last().expect("nonempty") < log2n {
        let next = ts.last().unwrap() * ratio;
        ts.push(next);
        if ts.len() > 100_000 {
            return Err(Error::Internal("threshold sequence failed to reach log n".into()));
        }
    }
    let ell = ts.len() - 1;
    if *ts.last().unwrap() < log2n {
        return Err(Error::Internal("t_ell fell short of log n".into()));
    }
    if ell as f64 > 6.0 * r as f64 * ll.max(1.0) {
        return Err(Error::Internal(format!(
            "ell = {ell} exceeds its bound {:.1}",
            6.0 * r as f64 * ll.max(1.0)
        )));
    }

    let classes = dyadic_degree_classes(h, &ts)?;
    let mut class_of = vec![0usize; h.a_count()];
    for (i, class) in classes.iter().enumerate() {
        for &a in class {
            class_of[a as usize] = i;
        }
    }

    // One pass over B: count neighbors per class for each right vertex.
    let mut case1_qualifiers: Vec<u32> = Vec::new();
    let mut class_qualifiers: Vec<Vec<u32>> = vec![Vec::new(); ell + 1];
    let mut counts = vec![0usize; ell + 1];
    for b in 0..h.b_count() as u32 {
        counts.iter_mut().for_each(|c| *c = 0);
        for &a in h.neighbors_b(b) {
            counts[class_of[a as usize]] += 1;
        }
        if 2 * counts[0] >= h.degree_b(b) {
            case1_qualifiers.push(b);
        }
        for i in 1..=ell {
            if counts[i] >= r {
                class_qualifiers[i].push(b);
            }
        }
    }

    let (case, class_index, b_prime) = if 2 * case1_qualifiers.len() >= h.b_count() {
        (EsCase::One, 0, case1_qualifiers)
    } else {
        let best = (1..=ell).max_by_key(|&i| (class_qualifiers[i].len(), std::cmp::Reverse(i)));
        match best {
            Some(i) if 2 * ell * class_qualifiers[i].len() >= h.b_count() => {
                (EsCase::Two, i, std::mem::take(&mut class_qualifiers[i]))
            }
            _ => {
                let best_n = best.map(|i| class_qualifiers[i].len()).unwrap_or(0);
                return Err(Error::Internal(format!(
                    "neither case holds at these constants: {} of {} right vertices qualify \
                     for case 1, best class has {best_n} (need {})",
                    case1_qualifiers.len(),
                    h.b_count(),
                    h.b_count().div_ceil(2 * ell.max(1)),
                )));
            }
        }
    };

    Ok(ErdosSauerTrace {
        t0,
        ts,
        ell,
        classes,
        case,
        class_index,
        b_prime,
        b_double_prime: Vec::new(),
        h: h.clone(),
        h_prime: None,
        s_used,
        r,
    })
}

// ==== dyadic-class substitute ===========================================

/// Deterministic stand-in for the external regularization step: partition
/// A by dyadic degree, keep the class carrying the most edges, cap
/// B-degrees at twice their average in that class, and peel to min degree
/// a quarter of the average. The output contract (degree ratio at most
/// cfg.jsr_ratio and average degree at least s / (cfg.jsr_c * log2 L)) is
/// verified numerically on the result and a miss is an explicit failure,
/// so nothing downstream rests on the construction itself. Returns the
/// subgraph plus a map from its vertices to `h.to_graph()` ids.
pub fn jsr_substitute(
    h: &BipartiteGraph,
    desc: &AlmostBiregularDescriptor,
    cfg: &ConstantsConfig,
) -> Result<(Graph, Vec<u32>)> {
    cfg.validate()?;
    let desc = AlmostBiregularDescriptor::check(h, desc.l, desc.s)?;
    if desc.l < desc.s as f64 || desc.s < 2 {
        return Err(Error::pre("need L >= s >= 2"));
    }

    let max_a = (0..h.a_count() as u32).map(|a| h.degree_a(a)).max().unwrap_or(0);
    if max_a == 0 {
        return Err(Error::pre("A side has no edges"));
    }
    let kmax = (max_a as f64).log2().ceil().max(0.0) as usize;
    let ts: Vec<f64> = (0..=kmax).map(|k| k as f64).collect();
    let classes = dyadic_degree_classes(h, &ts)?;
    let class_edges = |class: &Vec<u32>| -> usize {
        class.iter().map(|&a| h.degree_a(a)).sum()
    };
    let best = classes
        .iter()
        .enumerate()
        .max_by_key(|&(i, c)| (class_edges(c), std::cmp::Reverse(i)))
        .map(|(_, c)| c.clone())
        .unwrap_or_default();
    if class_edges(&best) == 0 {
        return Err(Error::Internal("the heaviest class carries no edges".into()));
    }

    // Class-restricted graph, with B-degrees capped at twice the class's
    // B-side average.
    let mut a_local = vec![u32::MAX; h.a_count()];
    for (i, &a) in best.iter().enumerate() {
        a_local[a as usize] = i as u32;
    }
    let mut per_b: Vec<Vec<u32>> = vec![Vec::new(); h.b_count()];
    let mut e_k = 0usize;
    for b in 0..h.b_count() as u32 {
        for &a in h.neighbors_b(b) {
            if a_local[a as usize] != u32::MAX {
                per_b[b as usize].push(a_local[a as usize]);
                e_k += 1;
            }
        }
    }
    let live_b = per_b.iter().filter(|v| !v.is_empty()).count();
    if live_b == 0 {
        return Err(Error::Internal("the heaviest class lost its B side".into()));
    }
    let avg_b = e_k as f64 / live_b as f64;
    let cap = ((2.0 * avg_b).round() as usize).clamp(1, desc.s);
    let edges = per_b
        .iter()
        .enumerate()
        .flat_map(|(b, nbrs)| nbrs.iter().take(cap).map(move |&al| (al, b as u32)));
    let hk = BipartiteGraph::new(best.len(), h.b_count(), edges)?;

    let gk = hk.to_graph();
    let (gp, keep) = min_degree_peel(&gk, gk.avg_degree() / 4.0);
    if gp.vertex_count() == 0 || gp.edge_count() == 0 {
        return Err(Error::RouteFailed("peel emptied the class subgraph".into()));
    }

    let summary = degree_summary(&gp)?;
    let ratio = summary.max_deg as f64 / summary.min_deg.max(1) as f64;
    let floor = desc.s as f64 / (cfg.jsr_c * desc.l.log2().max(1.0));
    if ratio > cfg.jsr_ratio + 1e-9 || summary.avg_deg + 1e-9 < floor {
        return Err(Error::RouteFailed(format!(
            "substitute contract miss: ratio {ratio:.2} (cap {}), average {:.3} (floor {floor:.3})",
            cfg.jsr_ratio, summary.avg_deg
        )));
    }

    let na = best.len() as u32;
    let map = keep
        .iter()
        .map(|&v| if v < na { best[v as usize] } else { h.a_count() as u32 + (v - na) })
        .collect();
    Ok((gp, map))
}

// ==== routes ============================================================

/// Low-class route: sample a third of the lowest class (at least s1
/// vertices), keep the right vertices that retain s1 neighbors in the
/// sample, truncate them to exactly s1 edges, validate the
/// almost-biregular descriptor, and run the substitute step plus the
/// randomized extractor. Acceptance (two thirds of B' retained and the
/// descriptor holding) is resampled up to cfg.retry_budget times. The
/// returned witness is relative to `trace.h.to_graph()`.
pub fn case1_route<R: Rng>(
    trace: &mut ErdosSauerTrace,
    cfg: &ConstantsConfig,
    rng: &mut R,
) -> Result<SubgraphWitness> {
    cfg.validate()?;
    if trace.case != EsCase::One {
        return Err(Error::pre("trace did not select case 1"));
    }
    let a0 = trace.classes[0].clone();
    if a0.is_empty() || trace.b_prime.is_empty() {
        return Err(Error::RouteFailed("case 1 has an empty class or no qualifiers".into()));
    }
    let s1 = ((trace.s_used as f64 / cfg.case1_s_div).ceil() as usize).max(trace.r);
    if s1 > a0.len() {
        return Err(Error::RouteFailed(format!(
            "lowest class has {} vertices but each right vertex must keep {s1}",
            a0.len()
        )));
    }
    let k = (a0.len() / 3).max(s1).max(1).min(a0.len());
    let na = trace.h.a_count() as u32;
    let l = trace.t0.exp2();

    let mut last_reason = String::from("no attempt ran");
    for attempt in 1..=cfg.retry_budget {
        let mut a0p: Vec<u32> = sample(rng, a0.len(), k).iter().map(|i| a0[i]).collect();
        a0p.sort_unstable();
        let mut in_a0p = vec![false; trace.h.a_count()];
        for &a in &a0p {
            in_a0p[a as usize] = true;
        }
        let bpp: Vec<u32> = trace
            .b_prime
            .iter()
            .copied()
            .filter(|&v| {
                trace.h.neighbors_b(v).iter().filter(|&&a| in_a0p[a as usize]).count() >= s1
            })
            .collect();
        if 3 * bpp.len() < 2 * trace.b_prime.len() {
            last_reason = format!(
                "attempt {attempt}: only {} of {} right vertices kept {s1} sampled neighbors",
                bpp.len(),
                trace.b_prime.len()
            );
            continue;
        }

        let mut a_sub = vec![u32::MAX; trace.h.a_count()];
        for (i, &a) in a0p.iter().enumerate() {
            a_sub[a as usize] = i as u32;
        }
        let edges = bpp.iter().enumerate().flat_map(|(j, &v)| {
            trace
                .h
                .neighbors_b(v)
                .iter()
                .filter(|&&a| in_a0p[a as usize])
                .take(s1)
                .map(|&a| (a_sub[a as usize], j as u32))
                .collect::<Vec<_>>()
        });
        let hp = BipartiteGraph::new(a0p.len(), bpp.len(), edges)?;
        let desc = match AlmostBiregularDescriptor::check(&hp, l, s1) {
            Ok(d) => d,
            Err(e) => {
                last_reason = format!("attempt {attempt}: descriptor rejected: {e}");
                continue;
            }
        };
        trace.b_double_prime = bpp.clone();
        trace.h_prime = Some(hp.clone());

        let (jg, jmap) = match jsr_substitute(&hp, &desc, cfg) {
            Ok(x) => x,
            Err(e) => {
                last_reason = format!("attempt {attempt}: substitute step failed: {e}");
                continue;
            }
        };
        let w = match regular_in_almost_regular(&jg, trace.r, cfg, rng) {
            Ok(w) => w,
            Err(e) => {
                last_reason = format!("attempt {attempt}: extraction failed: {e}");
                continue;
            }
        };

        let nap = a0p.len() as u32;
        let vertices = w
            .vertices
            .iter()
            .map(|&v| {
                let hp_id = jmap[v as usize];
                if hp_id < nap {
                    a0p[hp_id as usize]
                } else {
                    na + bpp[(hp_id - nap) as usize]
                }
            })
            .collect();
        return SubgraphWitness::new(w.graph, vertices);
    }
    Err(Error::LasVegas { attempts: cfg.retry_budget, reason: last_reason })
}

/// High-class route: keep exactly r edges from each qualifying right
/// vertex into the chosen class, view the result as an r-uniform
/// multi-hypergraph on that class, extract a regular sub-hypergraph via
/// the sunflower search, and map it back. The returned witness is
/// relative to `trace.h.to_graph()`.
pub fn case2_route<R: Rng>(
    trace: &mut ErdosSauerTrace,
    r: usize,
    cfg: &ConstantsConfig,
    rng: &mut R,
) -> Result<SubgraphWitness> {
    cfg.validate()?;
    if trace.case != EsCase::Two {
        return Err(Error::pre("trace did not select case 2"));
    }
    if r < 1 {
        return Err(Error::pre("need r >= 1"));
    }
    let ai = trace.classes[trace.class_index].clone();
    let mut in_ai = vec![false; trace.h.a_count()];
    for &a in &ai {
        in_ai[a as usize] = true;
    }
    let mut a_sub = vec![u32::MAX; trace.h.a_count()];
    for (i, &a) in ai.iter().enumerate() {
        a_sub[a as usize] = i as u32;
    }

    let mut bkeep: Vec<u32> = Vec::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for &v in &trace.b_prime {
        let nbrs: Vec<u32> = trace
            .h
            .neighbors_b(v)
            .iter()
            .copied()
            .filter(|&a| in_ai[a as usize])
            .take(r)
            .collect();
        if nbrs.len() < r {
            continue;
        }
        let j = bkeep.len() as u32;
        bkeep.push(v);
        edges.extend(nbrs.into_iter().map(|a| (a_sub[a as usize], j)));
    }
    if bkeep.is_empty() {
        return Err(Error::RouteFailed("no right vertex kept r edges into the class".into()));
    }
    let hp = BipartiteGraph::new(ai.len(), bkeep.len(), edges)?;
    trace.h_prime = Some(hp.clone());

    let hg = bipartite_to_hyper(&hp, r)?;
    let sub = regular_subhypergraph(&hg, r, cfg, rng)?.ok_or_else(|| {
        Error::RouteFailed("the hypergraph route certified no regular sub-hypergraph".into())
    })?;
    let (hb, a_ids, b_ids) = hyper_to_bipartite_regular(&sub.sub, &hp, &sub.edge_ids)?;

    let na = trace.h.a_count() as u32;
    let nap = a_ids.len() as u32;
    let vertices = (0..hb.vertex_count() as u32)
        .map(|v| {
            if v < nap {
                ai[a_ids[v as usize] as usize]
            } else {
                na + bkeep[b_ids[(v - nap) as usize] as usize]
            }
        })
        .collect();
    SubgraphWitness::new(hb.to_graph(), vertices)
}

// ==== top-level drivers =================================================

/// An extraction outcome: the certified witness, the case-split trace,
/// and a human-readable stage log for reports.
#[derive(Clone, Debug)]
pub struct EsOutcome {
    pub witness: SubgraphWitness,
    pub trace: ErdosSauerTrace,
    pub stages: Vec<String>,
}

/// A route outcome without a case split (used by the direct hypergraph
/// driver).
#[derive(Clone, Debug)]
pub struct RouteOutcome {
    pub witness: SubgraphWitness,
    pub stages: Vec<String>,
}

fn transpose(h: &BipartiteGraph) -> Result<BipartiteGraph> {
    BipartiteGraph::new(h.b_count(), h.a_count(), h.edges().iter().map(|&(a, b)| (b, a)))
}

fn truncate_right(h: &BipartiteGraph, s: usize) -> Result<BipartiteGraph> {
    let edges = (0..h.b_count() as u32)
        .flat_map(|b| h.neighbors_b(b).iter().take(s).map(move |&a| (a, b)).collect::<Vec<_>>());
    BipartiteGraph::new(h.a_count(), h.b_count(), edges)
}

/// Full driver: halve into a bipartite subgraph, peel to min degree half
/// the average, orient so A is the smaller side, truncate B-degrees to a
/// common value s (the configured r^2 loglog-scale target, lowered to the
/// B-side minimum when the host is thinner), classify, and run the chosen
/// route. The witness is certified r-regular and a subgraph of g before
/// it is returned.
pub fn erdos_sauer<R: Rng>(
    g: &Graph,
    r: usize,
    cfg: &ConstantsConfig,
    rng: &mut R,
) -> Result<EsOutcome> {
    cfg.validate()?;
    if r < 1 {
        return Err(Error::pre("need r >= 1"));
    }
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.edge_count() == 0 {
        return Err(Error::RouteFailed("no edges, so no regular subgraph".into()));
    }
    let mut stages = Vec::new();

    let (h0, a0_ids, b0_ids) = bipartite_half(g)?;
    stages.push(format!(
        "bipartite-half: {}+{} vertices, {} of {} edges kept",
        h0.a_count(),
        h0.b_count(),
        h0.edge_count(),
        g.edge_count()
    ));

    let avg0 = 2.0 * h0.edge_count() as f64 / h0.vertex_count() as f64;
    let (h1, pa, pb) = bipartite_peel(&h0, avg0 / 2.0);
    if h1.a_count() == 0 || h1.b_count() == 0 || h1.edge_count() == 0 {
        return Err(Error::RouteFailed("peeling to half the average emptied the host".into()));
    }
    stages.push(format!(
        "peel at {:.2}: {}+{} vertices, {} edges",
        avg0 / 2.0,
        h1.a_count(),
        h1.b_count(),
        h1.edge_count()
    ));

    let swap = h1.a_count() > h1.b_count();
    let h2 = if swap { transpose(&h1)? } else { h1.clone() };
    let ag: Vec<u32> = if swap {
        pb.iter().map(|&j| b0_ids[j as usize]).collect()
    } else {
        pa.iter().map(|&i| a0_ids[i as usize]).collect()
    };
    let bg: Vec<u32> = if swap {
        pa.iter().map(|&i| a0_ids[i as usize]).collect()
    } else {
        pb.iter().map(|&j| b0_ids[j as usize]).collect()
    };

    let nv = g.vertex_count().max(4) as f64;
    let ll = nv.log2().log2().max(0.0);
    let s_target = ((cfg.big_c / 4.0) * (r * r) as f64 * ll).ceil().max(r as f64) as usize;
    let delta_b = (0..h2.b_count() as u32).map(|b| h2.degree_b(b)).min().unwrap_or(0);
    let s_used = s_target.min(delta_b);
    if s_used < r {
        return Err(Error::RouteFailed(format!(
            "B-side minimum degree {delta_b} cannot support the common degree {r}"
        )));
    }
    let h3 = truncate_right(&h2, s_used)?;
    stages.push(format!(
        "orient+truncate: A = {} B = {} (swapped: {swap}), s_target = {s_target}, s_used = {s_used}",
        h3.a_count(),
        h3.b_count()
    ));

    let mut trace = classify_cases(&h3, r, cfg)?;
    stages.push(format!(
        "classify: case {} class {} with |B'| = {}, t0 = {:.2}, ell = {}",
        trace.case,
        trace.class_index,
        trace.b_prime.len(),
        trace.t0,
        trace.ell
    ));

    let w_local = match trace.case {
        EsCase::One => case1_route(&mut trace, cfg, rng)?,
        EsCase::Two => case2_route(&mut trace, r, cfg, rng)?,
    };
    stages.push(format!(
        "route: witness with {} vertices, {} edges",
        w_local.graph.vertex_count(),
        w_local.graph.edge_count()
    ));

    let na = h3.a_count() as u32;
    let vertices: Vec<u32> = w_local
        .vertices
        .iter()
        .map(|&v| if v < na { ag[v as usize] } else { bg[(v - na) as usize] })
        .collect();
    let witness = SubgraphWitness::new(w_local.graph, vertices)?;
    check_regular_witness(g, &witness, r)?;
    stages.push(format!("certify: {r}-regular on {} vertices", witness.vertices.len()));

    Ok(EsOutcome { witness, trace, stages })
}

/// Direct hypergraph driver: halve, keep the side with more degree-r
/// candidates as B, truncate those right vertices to exactly r edges, and
/// run the sunflower extraction. Certified before returning.
pub fn hyper_route<R: Rng>(
    g: &Graph,
    r: usize,
    cfg: &ConstantsConfig,
    rng: &mut R,
) -> Result<RouteOutcome> {
    cfg.validate()?;
    if r < 1 {
        return Err(Error::pre("need r >= 1"));
    }
    if g.vertex_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    if g.edge_count() == 0 {
        return Err(Error::RouteFailed("no edges, so no regular subgraph".into()));
    }
    let mut stages = Vec::new();

    let (h0, a0_ids, b0_ids) = bipartite_half(g)?;
    let rich_b = (0..h0.b_count() as u32).filter(|&b| h0.degree_b(b) >= r).count();
    let rich_a = (0..h0.a_count() as u32).filter(|&a| h0.degree_a(a) >= r).count();
    let swap = rich_a > rich_b;
    let h1 = if swap { transpose(&h0)? } else { h0.clone() };
    let ag: Vec<u32> = if swap { b0_ids.clone() } else { a0_ids.clone() };
    let bg: Vec<u32> = if swap { a0_ids } else { b0_ids };
    stages.push(format!(
        "bipartite-half: {}+{} vertices (swapped: {swap}), {} right vertices of degree >= {r}",
        h1.a_count(),
        h1.b_count(),
        rich_b.max(rich_a)
    ));

    let bkeep: Vec<u32> = (0..h1.b_count() as u32).filter(|&b| h1.degree_b(b) >= r).collect();
    if bkeep.is_empty() {
        return Err(Error::RouteFailed(format!("no right vertex has degree at least {r}")));
    }
    let edges = bkeep.iter().enumerate().flat_map(|(j, &b)| {
        h1.neighbors_b(b).iter().take(r).map(move |&a| (a, j as u32)).collect::<Vec<_>>()
    });
    let hp = BipartiteGraph::new(h1.a_count(), bkeep.len(), edges)?;

    let hg = bipartite_to_hyper(&hp, r)?;
    stages.push(format!(
        "hypergraph: {} vertices, {} edges, average degree {:.2}",
        hg.vertex_count(),
        hg.edge_count(),
        hg.avg_degree()
    ));
    let sub = regular_subhypergraph(&hg, r, cfg, rng)?.ok_or_else(|| {
        Error::RouteFailed("the hypergraph route certified no regular sub-hypergraph".into())
    })?;
    stages.push(format!(
        "sunflower: t = {}, {} edges kept, {} vertices spanned",
        sub.t_used,
        sub.edge_ids.len(),
        sub.spanned.len()
    ));
    let (hb, a_ids, b_ids) = hyper_to_bipartite_regular(&sub.sub, &hp, &sub.edge_ids)?;

    let nap = a_ids.len() as u32;
    let vertices: Vec<u32> = (0..hb.vertex_count() as u32)
        .map(|v| {
            if v < nap {
                ag[a_ids[v as usize] as usize]
            } else {
                bg[bkeep[b_ids[(v - nap) as usize] as usize] as usize]
            }
        })
        .collect();
    let witness = SubgraphWitness::new(hb.to_graph(), vertices)?;
    check_regular_witness(g, &witness, r)?;
    stages.push(format!("certify: {r}-regular on {} vertices", witness.vertices.len()));
    Ok(RouteOutcome { witness, stages })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::stage_rng;
    use crate::graph::{complete_bipartite, path};
    use crate::oracle::is_r_regular;

    fn complete_bi(a: usize, b: usize) -> BipartiteGraph {
        let mut edges = Vec::new();
        for u in 0..a as u32 {
            for v in 0..b as u32 {
                edges.push((u, v));
            }
        }
        BipartiteGraph::new(a, b, edges).unwrap()
    }

    #[test]
    fn descriptor_checks_biregular_and_rejects_violations() {
        let h = complete_bi(4, 8);
        let d = AlmostBiregularDescriptor::check(&h, 1.0, 4).unwrap();
        assert_eq!(d.d, 8.0);

        // Nonuniform B-degrees.
        let h2 = BipartiteGraph::new(2, 2, [(0, 0), (1, 0), (0, 1)]).unwrap();
        assert!(AlmostBiregularDescriptor::check(&h2, 4.0, 2).is_err());

        // |A| > |B| makes d fall below s.
        let h3 = BipartiteGraph::new(4, 2, [(0, 0), (1, 0), (2, 1), (3, 1)]).unwrap();
        assert!(AlmostBiregularDescriptor::check(&h3, 4.0, 2).is_err());

        // A-degree above L*d.
        let h4 = BipartiteGraph::new(3, 6, [(0, 0), (0, 1), (0, 2), (0, 3), (0, 4), (1, 5)])
            .unwrap();
        assert!(AlmostBiregularDescriptor::check(&h4, 1.0, 1).is_err());
    }

    #[test]
    fn classify_low_degree_hosts_as_case_one() {
        let h = complete_bi(6, 6);
        let trace = classify_cases(&h, 2, &ConstantsConfig::default()).unwrap();
        assert_eq!(trace.case, EsCase::One);
        assert_eq!(trace.class_index, 0);
        assert_eq!(trace.b_prime.len(), 6);
        assert_eq!(trace.classes[0].len(), 6);
        assert_eq!(trace.s_used, 6);
    }

    #[test]
    fn classify_high_class_hosts_as_case_two() {
        // 8 left vertices of degree 8 feeding 64 right vertices of degree
        // 1: the lowest class is empty, so case 2 must fire on class 1.
        let mut edges = Vec::new();
        for a in 0..8u32 {
            for j in 0..8u32 {
                edges.push((a, 8 * a + j));
            }
        }
        let h = BipartiteGraph::new(8, 64, edges).unwrap();
        let trace = classify_cases(&h, 1, &ConstantsConfig::default()).unwrap();
        assert_eq!(trace.case, EsCase::Two);
        assert_eq!(trace.class_index, 1);
        assert!(trace.classes[0].is_empty());
        assert_eq!(trace.b_prime.len(), 64);
        assert!(trace.ell >= 1);
    }

    #[test]
    fn classify_decision_matches_an_independent_recount() {
        let mut rng = stage_rng(71, "classify-recount");
        for round in 0..10 {
            let na = 30;
            let nb = 40;
            let s = 6;
            let mut edges = Vec::new();
            for b in 0..nb as u32 {
                let mut picked = std::collections::BTreeSet::new();
                while picked.len() < s {
                    picked.insert(rng.gen_range(0..na as u32));
                }
                edges.extend(picked.into_iter().map(|a| (a, b)));
            }
            let h = BipartiteGraph::new(na, nb, edges).unwrap();
            let trace = classify_cases(&h, 2, &ConstantsConfig::default()).unwrap();

            let mut in_class = vec![usize::MAX; na];
            for (i, c) in trace.classes.iter().enumerate() {
                for &a in c {
                    in_class[a as usize] = i;
                }
            }
            assert!(in_class.iter().all(|&i| i != usize::MAX), "classes partition A");
            match trace.case {
                EsCase::One => {
                    let q = (0..nb as u32)
                        .filter(|&v| {
                            let e0 = h
                                .neighbors_b(v)
                                .iter()
                                .filter(|&&a| in_class[a as usize] == 0)
                                .count();
                            2 * e0 >= h.degree_b(v)
                        })
                        .count();
                    assert!(2 * q >= nb, "round {round}: case 1 recount");
                    assert_eq!(q, trace.b_prime.len());
                }
                EsCase::Two => {
                    let i = trace.class_index;
                    let q = (0..nb as u32)
                        .filter(|&v| {
                            h.neighbors_b(v)
                                .iter()
                                .filter(|&&a| in_class[a as usize] == i)
                                .count()
                                >= 2
                        })
                        .count();
                    assert!(2 * trace.ell * q >= nb, "round {round}: case 2 recount");
                    assert_eq!(q, trace.b_prime.len());
                }
            }
        }
    }

    #[test]
    fn classify_rejects_nonuniform_right_degrees() {
        let h = BipartiteGraph::new(2, 2, [(0, 0), (1, 0), (0, 1)]).unwrap();
        assert!(classify_cases(&h, 1, &ConstantsConfig::default()).is_err());
    }

    #[test]
    fn substitute_keeps_balanced_biregular_inputs_whole() {
        let h = complete_bi(6, 6);
        let desc = AlmostBiregularDescriptor::check(&h, 6.0, 6).unwrap();
        let (g, map) = jsr_substitute(&h, &desc, &ConstantsConfig::default()).unwrap();
        assert_eq!(g.edge_count(), 36);
        assert_eq!(map.len(), 12);
        let s = degree_summary(&g).unwrap();
        assert_eq!(s.max_deg, s.min_deg);
    }

    #[test]
    fn substitute_selects_the_heavier_dyadic_class() {
        // A-degrees (8,8,8,8,2,2) over 18 right vertices of degree 2: the
        // degree-8 class carries 32 of 36 edges and must win.
        let mut edges = Vec::new();
        for j in 0..8u32 {
            edges.push((0, j));
        }
        for j in 8..16u32 {
            edges.push((1, j));
        }
        for j in [16u32, 17, 0, 1, 2, 3, 4, 5] {
            edges.push((2, j));
        }
        for j in 6..14u32 {
            edges.push((3, j));
        }
        edges.push((4, 14));
        edges.push((4, 15));
        edges.push((5, 16));
        edges.push((5, 17));
        let h = BipartiteGraph::new(6, 18, edges).unwrap();
        assert_eq!((0..18u32).map(|b| h.degree_b(b)).collect::<Vec<_>>(), vec![2; 18]);
        let desc = AlmostBiregularDescriptor::check(&h, 2.0, 2).unwrap();
        let (g, map) = jsr_substitute(&h, &desc, &ConstantsConfig::default()).unwrap();
        assert!(g.edge_count() > 0);
        assert!(!map.contains(&4) && !map.contains(&5), "light class dropped");
        let s = degree_summary(&g).unwrap();
        assert!(s.max_deg as f64 / s.min_deg as f64 <= 64.0);
    }

    #[test]
    fn driver_extracts_from_complete_bipartite_case_one() {
        let g = complete_bipartite(40, 40);
        let cfg = ConstantsConfig::default();
        let mut rng = stage_rng(73, "es-k4040");
        let out = erdos_sauer(&g, 3, &cfg, &mut rng).unwrap();
        assert_eq!(out.trace.case, EsCase::One);
        assert!(is_r_regular(&out.witness.graph, 3));
        assert!(out.witness.is_subgraph_of(&g));
        assert!(!out.stages.is_empty());
    }

    #[test]
    fn driver_extracts_from_k88() {
        let g = complete_bipartite(8, 8);
        let cfg = ConstantsConfig::default();
        let mut rng = stage_rng(74, "es-k88");
        let out = erdos_sauer(&g, 3, &cfg, &mut rng).unwrap();
        assert!(is_r_regular(&out.witness.graph, 3));
        assert!(out.witness.is_subgraph_of(&g));
    }

    #[test]
    fn driver_routes_thin_right_hosts_through_case_two() {
        // 8 hubs, 320 right vertices each holding one adjacent hub pair:
        // hub degrees overflow the lowest class, so case 2 fires, and the
        // pair multiplicities give the sunflower search an easy target.
        let mut edges = Vec::new();
        let mut next = 8u32;
        for _rep in 0..40u32 {
            for p in 0..8u32 {
                let (x, y) = (p, (p + 1) % 8);
                edges.push((x.min(y), next));
                edges.push((x.max(y), next));
                next += 1;
            }
        }
        let g = Graph::new(8 + 320, edges).unwrap();
        let cfg = ConstantsConfig::default();
        let mut rng = stage_rng(75, "es-case2");
        let out = erdos_sauer(&g, 2, &cfg, &mut rng).unwrap();
        assert_eq!(out.trace.case, EsCase::Two);
        assert!(out.trace.class_index >= 1);
        assert!(is_r_regular(&out.witness.graph, 2));
        assert!(out.witness.is_subgraph_of(&g));
    }

    #[test]
    fn driver_rejects_forests_and_bad_inputs() {
        let cfg = ConstantsConfig::default();
        let mut rng = stage_rng(76, "es-forest");
        let err = erdos_sauer(&path(10), 2, &cfg, &mut rng).unwrap_err();
        assert!(matches!(err, Error::RouteFailed(_)));
        assert!(erdos_sauer(&path(10), 0, &cfg, &mut rng).is_err());
        assert!(erdos_sauer(&Graph::empty(5), 1, &cfg, &mut rng).is_err());
    }

    #[test]
    fn hyper_driver_extracts_from_k44() {
        let g = complete_bipartite(4, 4);
        let cfg = ConstantsConfig::default();
        let mut rng = stage_rng(77, "hyper-k44");
        let out = hyper_route(&g, 2, &cfg, &mut rng).unwrap();
        assert!(is_r_regular(&out.witness.graph, 2));
        assert!(out.witness.is_subgraph_of(&g));
        assert!(out.stages.iter().any(|s| s.contains("sunflower")));
    }
}
