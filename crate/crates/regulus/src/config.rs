//! Tunable constants and budgets shared by the randomized pipelines.
//!
//! Every absolute constant that gates a route or scales a threshold lives
//! here so that experiments can move them without touching pipeline code.
//! The defaults target desk-scale instances (thousands of vertices); all
//! quality claims are re-verified on outputs rather than assumed from the
//! constants, so weakening a constant costs retries, not correctness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Knobs for the randomized regularization and extraction routes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstantsConfig {
    /// Additive degree window at schedule termination: stages run while
    /// `delta_i > d_i + slack`.
    pub slack: f64,
    /// Quality constant in the regularization contract: accepted outputs
    /// have average degree at least `c_scale * d / lambda^3 - 1`.
    pub c_scale: f64,
    /// Attempt budget for Las Vegas loops (per randomized stage).
    pub retry_budget: u64,
    /// Node budget for exact searches and matching enumeration caps.
    pub search_budget: u64,
    /// Constant in the sunflower-count threshold `(alpha * r * log2(t*r))^t`.
    pub alpha: f64,
    /// Minimum `eps * d` at the first schedule stage for the randomized
    /// route to be attempted at all; below it the window is too noisy to be
    /// worth retrying.
    pub eps_d_floor: f64,
    /// Tolerance factor on per-step correction growth: a step is accepted
    /// only if the correction sum grew by at most
    /// `sum_tolerance * |G| * exp(-eps*d/1000)`.
    pub sum_tolerance: f64,
    /// Multiplier in the dense-class threshold `t_0 = t0_mult * r * loglog n`.
    pub t0_mult: f64,
    /// Constant in the uniform B-side degree target
    /// `s_target = (big_c / 4) * r^2 * loglog n`.
    pub big_c: f64,
    /// Divisor applied to `s_target` when thinning B-degrees after the
    /// random one-third A-sample in the dense-class route.
    pub case1_s_div: f64,
    /// Almost-regularity ratio contract for the biregular reduction.
    pub jsr_ratio: f64,
    /// Log-factor constant in the biregular reduction's average-degree
    /// contract `avg >= s / (jsr_c * log2 L)`.
    pub jsr_c: f64,
    /// Scale on the sparse-class density floor `r^{3r} * (log2 n)^2`
    /// recorded (not gated) by the hypergraph route.
    pub hyper_floor_scale: f64,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        ConstantsConfig {
            slack: 4.0,
            c_scale: 0.25,
            retry_budget: 200,
            search_budget: 1_000_000,
            alpha: 2.0,
            eps_d_floor: 8.0,
            sum_tolerance: 50.0,
            t0_mult: 1.0,
            big_c: 4.0,
            case1_s_div: 25.0,
            jsr_ratio: 64.0,
            jsr_c: 16.0,
            hyper_floor_scale: 1.0,
        }
    }
}

impl ConstantsConfig {
    /// Rejects non-positive values; every field scales or bounds something
    /// that must stay strictly positive.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("slack", self.slack),
            ("c_scale", self.c_scale),
            ("alpha", self.alpha),
            ("eps_d_floor", self.eps_d_floor),
            ("sum_tolerance", self.sum_tolerance),
            ("t0_mult", self.t0_mult),
            ("big_c", self.big_c),
            ("case1_s_div", self.case1_s_div),
            ("jsr_ratio", self.jsr_ratio),
            ("jsr_c", self.jsr_c),
            ("hyper_floor_scale", self.hyper_floor_scale),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::pre(format!("config field {name} must be positive, got {v}")));
            }
        }
        if self.retry_budget == 0 || self.search_budget == 0 {
            return Err(Error::pre("config budgets must be positive"));
        }
        Ok(())
    }
}

/// Node/time budget for exact searches. `node_limit` bounds explored search
/// nodes; `time_hint_secs` is a soft wall-clock cap checked periodically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchBudget {
    pub node_limit: u64,
    pub time_hint_secs: f64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { node_limit: 1_000_000, time_hint_secs: 60.0 }
    }
}

impl SearchBudget {
    pub fn nodes(node_limit: u64) -> Self {
        SearchBudget { node_limit, ..SearchBudget::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_limit == 0 || !(self.time_hint_secs > 0.0) {
            return Err(Error::pre("search budget must be positive"));
        }
        Ok(())
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a per-stage seed from the root seed and a stage label.
///
/// The label is folded with FNV-1a and the combined state finalized with one
/// splitmix64 round, so distinct stages of one run draw from independent
/// streams while the whole run stays reproducible from the root seed.
pub fn derive_seed(root: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in label.as_bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut state = root ^ h;
    splitmix64(&mut state)
}

/// Seeded generator for one named stage of a run.
pub fn stage_rng(root: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, label))
}
