//! Grid experiments: success-rate sweeps over (n, r, density) cells.
//!
//! Each cell runs the selected method on fresh random hosts, one per seed
//! index. Host graphs and per-run seeds are derived from the root seed by
//! labeled splitmix streams:
//!
//! - host for seed index `i`:  `exp:host:{n}:{dm}:{i}`
//! - run root for seed `i`:    `exp:run:{n}:{r}:{dm}:{i}`
//!
//! where `dm` is the density in thousandths. The run root is then consumed by
//! the same driver `regularize` uses, so a one-cell one-seed grid reproduces a
//! standalone run on the same host byte for byte.

use std::collections::VecDeque;
use std::fs;
use std::path::Path;
use std::sync::Mutex;
use std::time::Instant;

use rand::Rng;
use regulus::config::{derive_seed, stage_rng};
use regulus::oracle::{find_regular_subgraph_exact, SearchVerdict};
use regulus::{ConstantsConfig, Error, Graph, SearchBudget};
use serde::{Deserialize, Serialize};

use crate::report::SCHEMA_VERSION;
use crate::runner::{run_method, MethodKind};

/// Grid description, read from a JSON file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridConfig {
    /// Host vertex counts.
    pub ns: Vec<usize>,
    /// Target degrees.
    pub rs: Vec<usize>,
    /// Target average degrees; evaluated in ascending order per row.
    pub densities: Vec<f64>,
    /// Independent seed indices per cell.
    pub seeds: u32,
    pub method: MethodKind,
    /// Cells with n at most this get an exact-search ground-truth column.
    #[serde(default = "default_oracle_cap")]
    pub oracle_n_cap: usize,
    /// Node budget for each ground-truth search.
    #[serde(default = "default_oracle_budget")]
    pub oracle_budget: u64,
}

fn default_oracle_cap() -> usize {
    12
}

fn default_oracle_budget() -> u64 {
    5_000_000
}

impl GridConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.ns.is_empty() || self.rs.is_empty() || self.densities.is_empty() {
            return Err(Error::Precondition("grid axes must be nonempty".into()));
        }
        if self.seeds == 0 {
            return Err(Error::Precondition("grid needs at least one seed".into()));
        }
        if self.oracle_budget == 0 {
            return Err(Error::Precondition("oracle_budget must be positive".into()));
        }
        for &n in &self.ns {
            if n < 2 {
                return Err(Error::Precondition(format!("host size {n} is too small")));
            }
            for &d in &self.densities {
                if !d.is_finite() || d <= 0.0 {
                    return Err(Error::Precondition(format!("density {d} must be positive")));
                }
                let m = edge_target(n, d);
                let cap = n * (n - 1) / 2;
                if m > cap {
                    return Err(Error::Precondition(format!(
                        "density {d} needs {m} edges on {n} vertices, but only {cap} exist"
                    )));
                }
            }
        }
        for &r in &self.rs {
            if r == 0 {
                return Err(Error::Precondition("target degree 0 is not searchable".into()));
            }
        }
        Ok(())
    }
}

/// Tallies for one (n, r, density) cell. Indeterminate runs stay in
/// `attempts` and are reported, never dropped or folded into failures.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CellResult {
    pub n: usize,
    pub r: usize,
    pub density: f64,
    pub attempts: u32,
    pub successes: u32,
    pub failures: u32,
    pub indeterminate: u32,
    pub success_rate: f64,
    /// Ground-truth tallies over the same hosts; present iff n is within
    /// the oracle cap.
    pub oracle_found: Option<u32>,
    pub oracle_absent: Option<u32>,
    pub oracle_indeterminate: Option<u32>,
}

/// Per-(n, r) row digest over ascending densities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RowSummary {
    pub n: usize,
    pub r: usize,
    /// Least density whose success rate reached 0.9, if any did.
    pub min_density_90: Option<f64>,
    /// True when the success rate never drops as density grows.
    pub monotone: bool,
    /// Density pairs (lower, higher) across which the rate dropped.
    pub violations: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub config: ConstantsConfig,
    pub grid: GridConfig,
    pub input_sha256: String,
    pub cells: Vec<CellResult>,
    pub rows: Vec<RowSummary>,
    pub wall_time_ms: u64,
}

pub fn edge_target(n: usize, density: f64) -> usize {
    (density * n as f64 / 2.0).round() as usize
}

fn density_milli(d: f64) -> u64 {
    (d * 1000.0).round() as u64
}

/// Uniform random graph with exactly `m` distinct edges.
pub fn gnm<R: Rng>(n: usize, m: usize, rng: &mut R) -> Graph {
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u == v {
            continue;
        }
        let e = (u.min(v), u.max(v));
        if !edges.contains(&e) {
            edges.push(e);
        }
    }
    Graph::new(n, edges).expect("distinct in-range pairs")
}

pub fn host_for(root_seed: u64, n: usize, density: f64, seed_idx: u32) -> Graph {
    let label = format!("exp:host:{n}:{}:{seed_idx}", density_milli(density));
    let mut rng = stage_rng(root_seed, &label);
    gnm(n, edge_target(n, density), &mut rng)
}

pub fn run_root_for(root_seed: u64, n: usize, r: usize, density: f64, seed_idx: u32) -> u64 {
    let label = format!("exp:run:{n}:{r}:{}:{seed_idx}", density_milli(density));
    derive_seed(root_seed, &label)
}

struct Task {
    n: usize,
    r: usize,
    density: f64,
}

fn run_cell(
    grid: &GridConfig,
    cfg: &ConstantsConfig,
    root_seed: u64,
    task: &Task,
    deadline: Option<Instant>,
    time_hint: f64,
) -> CellResult {
    let (n, r, density) = (task.n, task.r, task.density);
    let with_oracle = n <= grid.oracle_n_cap;
    let mut successes = 0u32;
    let mut failures = 0u32;
    let mut indeterminate = 0u32;
    let (mut o_found, mut o_absent, mut o_indet) = (0u32, 0u32, 0u32);

    for seed_idx in 0..grid.seeds {
        if deadline.is_some_and(|t| Instant::now() >= t) {
            // Out of wall-clock budget: the remaining seeds are recorded as
            // indeterminate rather than silently shrinking the denominator.
            let left = grid.seeds - seed_idx;
            indeterminate += left;
            if with_oracle {
                o_indet += left;
            }
            break;
        }
        let host = host_for(root_seed, n, density, seed_idx);
        let run_root = run_root_for(root_seed, n, r, density, seed_idx);
        match run_method(&host, Some(r), grid.method, cfg, run_root) {
            Ok(_) => successes += 1,
            Err(Error::Budget(_)) => indeterminate += 1,
            Err(_) => failures += 1,
        }
        if with_oracle {
            let budget = SearchBudget { node_limit: grid.oracle_budget, time_hint_secs: time_hint };
            match find_regular_subgraph_exact(&host, r, &budget) {
                Ok(SearchVerdict::Found(_)) => o_found += 1,
                Ok(SearchVerdict::Absent) => o_absent += 1,
                Ok(SearchVerdict::Indeterminate) | Err(_) => o_indet += 1,
            }
        }
    }

    CellResult {
        n,
        r,
        density,
        attempts: grid.seeds,
        successes,
        failures,
        indeterminate,
        success_rate: successes as f64 / grid.seeds as f64,
        oracle_found: with_oracle.then_some(o_found),
        oracle_absent: with_oracle.then_some(o_absent),
        oracle_indeterminate: with_oracle.then_some(o_indet),
    }
}

/// Runs every cell, up to `jobs` in parallel, and merges results in grid
/// order so the output is independent of scheduling.
pub fn run_grid(
    grid: &GridConfig,
    cfg: &ConstantsConfig,
    root_seed: u64,
    jobs: usize,
    budget_secs: Option<f64>,
) -> (Vec<CellResult>, Vec<RowSummary>) {
    let mut densities = grid.densities.clone();
    densities.sort_by(|a, b| a.partial_cmp(b).expect("validated finite"));

    let mut queue = VecDeque::new();
    for &n in &grid.ns {
        for &r in &grid.rs {
            for &density in &densities {
                queue.push_back(Task { n, r, density });
            }
        }
    }
    let deadline = budget_secs.map(|s| Instant::now() + std::time::Duration::from_secs_f64(s));
    let time_hint = budget_secs.unwrap_or(60.0);

    let queue = Mutex::new(queue);
    let results: Mutex<Vec<CellResult>> = Mutex::new(Vec::new());
    let workers = jobs.max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let task = match queue.lock().expect("queue lock").pop_front() {
                    Some(t) => t,
                    None => break,
                };
                let cell = run_cell(grid, cfg, root_seed, &task, deadline, time_hint);
                results.lock().expect("results lock").push(cell);
            });
        }
    });

    let mut cells = results.into_inner().expect("workers joined");
    cells.sort_by_key(|c| (c.n, c.r, density_milli(c.density)));

    let mut rows = Vec::new();
    for &n in &grid.ns {
        for &r in &grid.rs {
            let row: Vec<&CellResult> =
                cells.iter().filter(|c| c.n == n && c.r == r).collect();
            let mut violations = Vec::new();
            for pair in row.windows(2) {
                if pair[1].success_rate < pair[0].success_rate - 1e-12 {
                    violations.push([pair[0].density, pair[1].density]);
                }
            }
            let min_density_90 =
                row.iter().find(|c| c.success_rate >= 0.9).map(|c| c.density);
            rows.push(RowSummary {
                n,
                r,
                min_density_90,
                monotone: violations.is_empty(),
                violations,
            });
        }
    }
    rows.sort_by_key(|s| (s.n, s.r));
    (cells, rows)
}

pub fn write_cells_csv(path: &Path, cells: &[CellResult]) -> anyhow::Result<()> {
    let mut out = String::from(
        "n,r,density,attempts,successes,failures,indeterminate,success_rate,\
         oracle_found,oracle_absent,oracle_indeterminate\n",
    );
    for c in cells {
        let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:.6},{},{},{}\n",
            c.n,
            c.r,
            c.density,
            c.attempts,
            c.successes,
            c.failures,
            c.indeterminate,
            c.success_rate,
            opt(c.oracle_found),
            opt(c.oracle_absent),
            opt(c.oracle_indeterminate),
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_summary_csv(path: &Path, rows: &[RowSummary]) -> anyhow::Result<()> {
    let mut out = String::from("n,r,min_density_90,monotone,violations\n");
    for s in rows {
        let md = s.min_density_90.map(|d| d.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{},{},{}\n", s.n, s.r, md, s.monotone, s.violations.len()));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn build_report(
    grid: GridConfig,
    cfg: ConstantsConfig,
    seed: u64,
    digest: String,
    cells: Vec<CellResult>,
    rows: Vec<RowSummary>,
    wall_time_ms: u64,
) -> ExperimentReport {
    ExperimentReport {
        schema_version: SCHEMA_VERSION,
        command: "experiment".into(),
        seed,
        config: cfg,
        grid,
        input_sha256: digest,
        cells,
        rows,
        wall_time_ms,
    }
}
