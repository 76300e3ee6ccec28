//! Strongly heterogeneous expected-degree sequences and directed Chung-Lu
//! random graphs.
//!
//! The model: node degrees are driven by a weight vector w sorted
//! non-increasingly, rho = 1 / sum(w), and each ordered pair (i, j), i != j,
//! independently carries an edge j -> i with probability p_ij = w_i w_j rho.
//! Graphicality requires Delta^2 rho <= 1 where Delta = w_1. The first `ell`
//! nodes are hubs with normalized degrees kappa_i = w_i / Delta.

use std::io::{BufRead, Write};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Tolerance used when checking exact-by-construction identities.
const EPS: f64 = 1e-12;

/// Parameters of a strongly heterogeneous family: a handful of hubs with
/// degrees kappa_i * Delta, slowly growing low degrees, hub count <= C * Delta^theta.
#[derive(Debug, Clone)]
pub struct HeterogeneityParams {
    /// Node count.
    pub n: usize,
    /// Scale-separation exponent gamma in (0, 1]: low degrees <~ Delta^(1-gamma).
    pub gamma: f64,
    /// Hub-cardinality exponent theta in (0, 1].
    pub theta: f64,
    /// Growth exponent sigma with Delta = n^sigma.
    pub sigma_delta: f64,
    /// Hub count.
    pub ell: usize,
    /// Normalized hub degrees kappa_1..kappa_ell, kappa_1 = 1, non-increasing.
    pub kappas: Vec<f64>,
    /// Constant low-degree value; when absent, floor(Delta^(1-gamma)) is used.
    pub low_degree_base: Option<f64>,
}

impl HeterogeneityParams {
    /// Canonical construction: Delta = round(n^sigma), ell = floor(Delta^theta),
    /// all hub weights equal to Delta.
    pub fn from_exponents(n: usize, gamma: f64, theta: f64, sigma: f64) -> Result<Self> {
        let delta = (n as f64).powf(sigma).round();
        let ell = delta.powf(theta).floor() as usize;
        let params = Self {
            n,
            gamma,
            theta,
            sigma_delta: sigma,
            ell: ell.max(1),
            kappas: vec![1.0; ell.max(1)],
            low_degree_base: None,
        };
        params.validate()?;
        Ok(params)
    }

    /// Check the structural invariants (kappa ordering, exponent ranges).
    pub fn validate(&self) -> Result<()> {
        if self.ell == 0 || self.ell >= self.n {
            return Err(Error::InvalidSequence(format!(
                "hub count ell={} must satisfy 1 <= ell < n={}",
                self.ell, self.n
            )));
        }
        if self.kappas.len() != self.ell {
            return Err(Error::InvalidSequence(format!(
                "kappas has {} entries, expected ell={}",
                self.kappas.len(),
                self.ell
            )));
        }
        if (self.kappas[0] - 1.0).abs() > EPS {
            return Err(Error::InvalidSequence(format!(
                "kappa_1 must equal 1, got {}",
                self.kappas[0]
            )));
        }
        for pair in self.kappas.windows(2) {
            if pair[1] > pair[0] + EPS {
                return Err(Error::InvalidSequence(
                    "kappa ordering violated: kappas must be non-increasing (N1)".into(),
                ));
            }
        }
        if *self.kappas.last().unwrap() <= 0.0 {
            return Err(Error::InvalidSequence(
                "kappa_ell must be positive (N1)".into(),
            ));
        }
        if !(0.0 < self.gamma && self.gamma <= 1.0) {
            return Err(Error::InvalidSequence(format!(
                "gamma must lie in (0,1], got {}",
                self.gamma
            )));
        }
        if !(0.0 < self.theta && self.theta <= 1.0) {
            return Err(Error::InvalidSequence(format!(
                "theta must lie in (0,1], got {}",
                self.theta
            )));
        }
        Ok(())
    }
}

/// An expected-degree sequence together with the derived quantities the
/// heterogeneous model is phrased in.
#[derive(Debug, Clone)]
pub struct DegreeSequence {
    w: Vec<f64>,
    delta: f64,
    rho: f64,
    ell: usize,
    kappas: Vec<f64>,
}

impl DegreeSequence {
    /// Build from explicit weights, enforcing ordering and Delta^2 rho <= 1.
    pub fn from_weights(w: Vec<f64>, ell: usize) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::InvalidSequence("empty weight vector".into()));
        }
        if ell == 0 || ell > w.len() {
            return Err(Error::InvalidSequence(format!(
                "hub count ell={} out of range for n={}",
                ell,
                w.len()
            )));
        }
        for (i, pair) in w.windows(2).enumerate() {
            if pair[1] > pair[0] + EPS {
                return Err(Error::InvalidSequence(format!(
                    "ordering violated: w[{}]={} < w[{}]={}",
                    i,
                    pair[0],
                    i + 1,
                    pair[1]
                )));
            }
        }
        if w.iter().any(|&x| x < 0.0 || !x.is_finite()) {
            return Err(Error::InvalidSequence(
                "weights must be finite and non-negative".into(),
            ));
        }
        let seq = Self::from_weights_unchecked(w, ell);
        if seq.delta * seq.delta * seq.rho > 1.0 + EPS {
            return Err(Error::InvalidSequence(format!(
                "graphicality violated: Delta^2 rho = {} > 1",
                seq.delta * seq.delta * seq.rho
            )));
        }
        Ok(seq)
    }

    /// Build without invariant checks. Intended for validator tests and
    /// diagnostics on deliberately broken sequences.
    pub fn from_weights_unchecked(w: Vec<f64>, ell: usize) -> Self {
        let total: f64 = w.iter().sum();
        let delta = w.first().copied().unwrap_or(0.0);
        let rho = if total > 0.0 { 1.0 / total } else { 0.0 };
        let kappas = if delta > 0.0 {
            w.iter().take(ell).map(|&x| x / delta).collect()
        } else {
            vec![0.0; ell.min(w.len())]
        };
        Self {
            w,
            delta,
            rho,
            ell,
            kappas,
        }
    }

    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.w[i]
    }

    /// Largest expected degree Delta = w_1.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// rho = 1 / sum(w).
    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Normalized hub degree kappa_i = w_i / Delta for hub index i < ell.
    pub fn kappa(&self, i: usize) -> f64 {
        self.kappas[i]
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    /// Edge probability p_ij = w_i w_j rho.
    pub fn edge_probability(&self, i: usize, j: usize) -> f64 {
        self.w[i] * self.w[j] * self.rho
    }

    pub fn sum_w(&self) -> f64 {
        self.w.iter().sum()
    }

    pub fn sum_w_squared(&self) -> f64 {
        self.w.iter().map(|&x| x * x).sum()
    }
}

/// Degree sequence of Example 1: ell hub weights kappa_i * Delta followed by a
/// constant block of low degrees.
///
/// `delta_override` pins Delta directly; otherwise Delta = round(n^sigma) and
/// the sigma < 1/(1+gamma) growth condition is enforced.
pub fn build_example1(
    params: &HeterogeneityParams,
    delta_override: Option<f64>,
) -> Result<DegreeSequence> {
    params.validate()?;
    let delta = match delta_override {
        Some(d) => {
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::InvalidSequence(format!(
                    "delta override must be positive, got {d}"
                )));
            }
            d
        }
        None => {
            if params.sigma_delta >= 1.0 / (1.0 + params.gamma) {
                return Err(Error::InvalidSequence(format!(
                    "sigma={} violates sigma < 1/(1+gamma)={}",
                    params.sigma_delta,
                    1.0 / (1.0 + params.gamma)
                )));
            }
            (params.n as f64).powf(params.sigma_delta).round()
        }
    };
    let low = match params.low_degree_base {
        Some(b) => {
            if b < 0.0 {
                return Err(Error::InvalidSequence(format!(
                    "low_degree_base must be non-negative, got {b}"
                )));
            }
            b
        }
        None => delta.powf(1.0 - params.gamma).floor(),
    };
    let last_hub = params.kappas[params.ell - 1] * delta;
    if low > last_hub + EPS {
        return Err(Error::InvalidSequence(format!(
            "ordering violated: low degree {low} exceeds smallest hub weight {last_hub}"
        )));
    }
    let mut w = Vec::with_capacity(params.n);
    w.extend(params.kappas.iter().map(|k| k * delta));
    w.resize(params.n, low);
    DegreeSequence::from_weights(w, params.ell)
}

/// Outcome of a single named heterogeneity check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Report of all heterogeneity checks; report-only, never an error.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Multiplicative slack constants for the asymptotic inequalities; the
/// conditions only fix them up to constants, so the validator takes them as
/// parameters.
#[derive(Debug, Clone, Copy)]
pub struct ValidationConstants {
    pub n2_lower: f64,
    pub n2_upper: f64,
    pub n3: f64,
    pub remark_lower: f64,
    pub remark_upper: f64,
    /// Exponent slack delta in the Delta <~ max(n^(1/2+delta), n^(1/(1+gamma))) bound.
    pub remark_exponent_slack: f64,
}

impl Default for ValidationConstants {
    fn default() -> Self {
        Self {
            n2_lower: 1.0,
            n2_upper: 1.0,
            n3: 1.0,
            remark_lower: 1.0,
            remark_upper: 1.0,
            remark_exponent_slack: 0.1,
        }
    }
}

impl ValidationConstants {
    /// The same slack constant everywhere.
    pub fn uniform(c: f64) -> Self {
        Self {
            n2_lower: c,
            n2_upper: c,
            n3: c,
            remark_lower: c,
            remark_upper: c,
            ..Self::default()
        }
    }
}

/// Evaluate every heterogeneity condition numerically and report pass/fail.
///
/// At gamma = 1 the bounds `w_i <~ Delta^(1-gamma)` and
/// `Delta >~ (log n)^(1/(1-gamma))` degenerate (the scale Delta^0 is constant
/// and the exponent blows up); the former is then checked as bounded spread of
/// the low-degree block and the latter passes vacuously.
pub fn validate_heterogeneity(
    seq: &DegreeSequence,
    params: &HeterogeneityParams,
    consts: &ValidationConstants,
) -> ValidationReport {
    let mut checks = Vec::new();
    let n = seq.n() as f64;
    let delta = seq.delta();
    let ell = seq.ell();

    // N1: ordering of the whole sequence and of the normalized hub degrees.
    let ordered = seq.weights().windows(2).all(|p| p[1] <= p[0] + EPS);
    let kappa_ok = !seq.kappas().is_empty()
        && (seq.kappa(0) - 1.0).abs() <= EPS
        && seq.kappas().windows(2).all(|p| p[1] <= p[0] + EPS)
        && *seq.kappas().last().unwrap() > 0.0;
    checks.push(CheckResult {
        name: "N1-ordering",
        passed: ordered && kappa_ok,
        detail: format!(
            "weights non-increasing: {ordered}, kappa_1=1 and non-increasing: {kappa_ok}"
        ),
    });

    // N2 lower: log n <= C * w_i for every low-degree node.
    let low_block = &seq.weights()[ell..];
    let w_min = low_block.iter().copied().fold(f64::INFINITY, f64::min);
    let w_max = low_block.iter().copied().fold(0.0_f64, f64::max);
    let log_n = n.ln();
    let lower_ok = log_n <= consts.n2_lower * w_min;
    checks.push(CheckResult {
        name: "N2-lower",
        passed: lower_ok,
        detail: format!(
            "log n = {log_n:.4} vs C*w_min = {:.4}",
            consts.n2_lower * w_min
        ),
    });

    // N2 upper: w_i <= C * Delta^(1-gamma); bounded spread at gamma = 1.
    let (upper_ok, upper_detail) = if params.gamma < 1.0 {
        let bound = consts.n2_upper * delta.powf(1.0 - params.gamma);
        (
            w_max <= bound,
            format!("w_max = {w_max} vs C*Delta^(1-gamma) = {bound:.4}"),
        )
    } else {
        let bound = consts.n2_upper * w_min;
        (
            w_max <= bound,
            format!("gamma=1 (Delta^0 scale): w_max = {w_max} vs C*w_min = {bound:.4}"),
        )
    };
    checks.push(CheckResult {
        name: "N2-upper",
        passed: upper_ok,
        detail: upper_detail,
    });

    // N3: ell <= C * Delta^theta.
    let n3_bound = consts.n3 * delta.powf(params.theta);
    checks.push(CheckResult {
        name: "N3-hub-count",
        passed: (ell as f64) <= n3_bound,
        detail: format!("ell = {ell} vs C*Delta^theta = {n3_bound:.4}"),
    });

    // Graphicality.
    let d2rho = delta * delta * seq.rho();
    checks.push(CheckResult {
        name: "DeltaRho",
        passed: d2rho <= 1.0 + EPS,
        detail: format!("Delta^2 rho = {d2rho:.6}"),
    });

    // Remark: minimum growth Delta >~ (log n)^(1/(1-gamma)).
    let (rl_ok, rl_detail) = if params.gamma < 1.0 {
        let bound = log_n.powf(1.0 / (1.0 - params.gamma)) / consts.remark_lower;
        (
            delta >= bound,
            format!("Delta = {delta} vs (log n)^(1/(1-gamma))/C = {bound:.4}"),
        )
    } else {
        (true, "gamma=1: exponent degenerates, vacuous".into())
    };
    checks.push(CheckResult {
        name: "Remark-min-growth",
        passed: rl_ok,
        detail: rl_detail,
    });

    // Remark: maximum growth Delta <~ max(n^(1/2+delta), n^(1/(1+gamma))).
    let s = consts.remark_exponent_slack;
    let bound = consts.remark_upper * n.powf(0.5 + s).max(n.powf(1.0 / (1.0 + params.gamma)));
    checks.push(CheckResult {
        name: "Remark-max-growth",
        passed: delta <= bound,
        detail: format!("Delta = {delta} vs C*max(n^(1/2+s), n^(1/(1+gamma))) = {bound:.4}"),
    });

    ValidationReport { checks }
}

/// A sampled directed graph, stored as compressed sparse rows of in-neighbors.
/// `in_neighbors(i)` lists the nodes j with an edge j -> i, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    seed: u64,
}

impl DirectedGraph {
    /// Assemble from per-node in-neighbor lists (must be sorted, in range,
    /// self-loop free).
    pub fn from_in_neighbors(lists: Vec<Vec<u32>>, seed: u64) -> Result<Self> {
        let n = lists.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for (i, list) in lists.iter().enumerate() {
            for pair in list.windows(2) {
                if pair[1] <= pair[0] {
                    return Err(Error::InvalidParameter(format!(
                        "in-neighbors of node {i} not strictly ascending"
                    )));
                }
            }
            for &j in list {
                if j as usize >= n {
                    return Err(Error::InvalidParameter(format!(
                        "neighbor {j} out of range for n={n}"
                    )));
                }
                if j as usize == i {
                    return Err(Error::InvalidParameter(format!("self-loop at node {i}")));
                }
                col_idx.push(j);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn edge_count(&self) -> usize {
        self.col_idx.len()
    }

    #[inline]
    pub fn in_neighbors(&self, i: usize) -> &[u32] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn in_degree(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.in_degree(i)).collect()
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.n];
        for &j in &self.col_idx {
            out[j as usize] += 1;
        }
        out
    }
}

/// Sample one in-neighbor row. Hub columns get individual Bernoulli draws;
/// each constant-weight run in the tail is swept by geometric skip-ahead, so
/// the expected cost is O(edges) rather than O(n).
fn sample_row(seq: &DegreeSequence, i: usize, seed: u64) -> Vec<u32> {
    let mut rng = stream_rng(seed, i as u64);
    let w = seq.weights();
    let wi = w[i];
    let rho = seq.rho();
    let ell = seq.ell();
    let mut nbrs = Vec::with_capacity((wi * 1.5) as usize + 4);
    if wi == 0.0 || rho == 0.0 {
        // Still advance nothing: all probabilities vanish.
        return nbrs;
    }
    for (j, &wj) in w.iter().enumerate().take(ell.min(seq.n())) {
        if j == i {
            continue;
        }
        let p = wi * wj * rho;
        if rng.random::<f64>() < p {
            nbrs.push(j as u32);
        }
    }
    let mut run_start = ell;
    let n = seq.n();
    while run_start < n {
        let wv = w[run_start];
        let mut run_end = run_start + 1;
        while run_end < n && w[run_end] == wv {
            run_end += 1;
        }
        let p = wi * wv * rho;
        if p >= 1.0 {
            for j in run_start..run_end {
                if j != i {
                    nbrs.push(j as u32);
                }
            }
        } else if p > 0.0 {
            let ln_q = (1.0 - p).ln();
            let mut pos = run_start as f64 - 1.0;
            loop {
                let u = 1.0 - rng.random::<f64>(); // (0, 1]
                pos += 1.0 + (u.ln() / ln_q).floor();
                if pos >= run_end as f64 {
                    break;
                }
                let j = pos as usize;
                if j != i {
                    nbrs.push(j as u32);
                }
            }
        }
        run_start = run_end;
    }
    nbrs
}

/// Sample a directed Chung-Lu graph: every ordered pair (i, j), i != j, is an
/// independent Bernoulli(w_i w_j rho) edge j -> i. Self-loops are excluded, so
/// E[k_i] = w_i (1 - w_i rho).
///
/// Row i draws from the ChaCha stream (seed, i); the result is bit-identical
/// for a given (sequence, seed) regardless of thread count.
pub fn sample_graph(seq: &DegreeSequence, seed: u64) -> Result<DirectedGraph> {
    let p_max = seq.delta() * seq.delta() * seq.rho();
    if p_max > 1.0 + EPS {
        return Err(Error::InvalidSequence(format!(
            "edge probability p_11 = Delta^2 rho = {p_max} exceeds 1"
        )));
    }
    // Parallel row sampling only pays off on large graphs.
    let rows: Vec<Vec<u32>> = if seq.n() >= 512 {
        (0..seq.n())
            .into_par_iter()
            .map(|i| sample_row(seq, i, seed))
            .collect()
    } else {
        (0..seq.n()).map(|i| sample_row(seq, i, seed)).collect()
    };
    let mut row_ptr = Vec::with_capacity(seq.n() + 1);
    row_ptr.push(0usize);
    let mut total = 0usize;
    for r in &rows {
        total += r.len();
        row_ptr.push(total);
    }
    let mut col_idx = Vec::with_capacity(total);
    for r in rows {
        col_idx.extend(r);
    }
    Ok(DirectedGraph {
        n: seq.n(),
        row_ptr,
        col_idx,
        seed,
    })
}

/// Empirical degrees of one node next to the analytic moments of the model.
#[derive(Debug, Clone, Copy)]
pub struct NodeDegrees {
    pub node: usize,
    pub w: f64,
    pub k_in: usize,
    pub k_out: usize,
    /// k_in - w.
    pub dev: f64,
    /// E[k_i] = w_i (1 - w_i rho) with the self-pair excluded.
    pub mean_expected: f64,
    /// Var(k_i) for the sampler actually used (self-pair excluded):
    /// w_i - w_i^2 rho^2 sum(w_j^2) - w_i^2 rho (1 - w_i^2 rho).
    pub var_expected: f64,
    /// The closed form with the self-pair kept: w_i - w_i^2 rho^2 sum(w_j^2).
    pub var_with_self_pair: f64,
}

/// Per-node empirical degrees and closed-form first/second moments.
pub fn degree_stats(graph: &DirectedGraph, seq: &DegreeSequence) -> Result<Vec<NodeDegrees>> {
    if graph.n() != seq.n() {
        return Err(Error::DimensionMismatch(format!(
            "graph has {} nodes, sequence has {}",
            graph.n(),
            seq.n()
        )));
    }
    let rho = seq.rho();
    let sw2 = seq.sum_w_squared();
    let out = graph.out_degrees();
    Ok((0..seq.n())
        .map(|i| {
            let w = seq.weight(i);
            let k_in = graph.in_degree(i);
            let var_with_self_pair = w - w * w * rho * rho * sw2;
            let self_term = w * w * rho * (1.0 - w * w * rho);
            NodeDegrees {
                node: i,
                w,
                k_in,
                k_out: out[i],
                dev: k_in as f64 - w,
                mean_expected: w * (1.0 - w * rho),
                var_expected: var_with_self_pair - self_term,
                var_with_self_pair,
            }
        })
        .collect())
}

/// Result of the degree-concentration scan |k_i - w_i| < band * w_i^(1/2 - eps).
#[derive(Debug, Clone)]
pub struct ConcentrationReport {
    pub tested: usize,
    pub violations: usize,
    pub violating_fraction: f64,
    /// Per tested node, the Chebyshev tail bound
    /// min(1, Var(k_i) / (band * w_i^(1/2 - eps))^2).
    pub chebyshev_bounds: Vec<f64>,
}

/// Count nodes violating the concentration band. Nodes with w_i = 0 are not
/// tested. `band` scales the threshold (band = 3, eps = 0 is the 3-sigma scan).
pub fn concentration_check(
    graph: &DirectedGraph,
    seq: &DegreeSequence,
    eps: f64,
    band: f64,
) -> Result<ConcentrationReport> {
    if graph.n() != seq.n() {
        return Err(Error::DimensionMismatch(
            "graph/sequence size mismatch".into(),
        ));
    }
    if !(0.0..0.5).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in [0, 1/2), got {eps}"
        )));
    }
    if band <= 0.0 {
        return Err(Error::InvalidParameter("band must be positive".into()));
    }
    let rho = seq.rho();
    let sw2 = seq.sum_w_squared();
    let mut tested = 0usize;
    let mut violations = 0usize;
    let mut bounds = Vec::new();
    for i in 0..seq.n() {
        let w = seq.weight(i);
        if w <= 0.0 {
            continue;
        }
        tested += 1;
        let threshold = band * w.powf(0.5 - eps);
        if (graph.in_degree(i) as f64 - w).abs() >= threshold {
            violations += 1;
        }
        let var = w - w * w * rho * rho * sw2 - w * w * rho * (1.0 - w * w * rho);
        bounds.push((var / (threshold * threshold)).min(1.0));
    }
    Ok(ConcentrationReport {
        tested,
        violations,
        violating_fraction: if tested > 0 {
            violations as f64 / tested as f64
        } else {
            0.0
        },
        chebyshev_bounds: bounds,
    })
}

/// Y_i = Delta^-2 (sum over low-degree in-neighbors of hub i)^2, the quantity
/// that concentrates at kappa_i^2.
#[derive(Debug, Clone, Copy)]
pub struct YStatistic {
    pub y: f64,
    /// |Y_i - kappa_i^2|.
    pub deviation: f64,
}

pub fn y_statistic(graph: &DirectedGraph, seq: &DegreeSequence, i: usize) -> Result<YStatistic> {
    if i >= seq.ell() {
        return Err(Error::InvalidParameter(format!(
            "node {i} is not a hub (ell = {})",
            seq.ell()
        )));
    }
    if graph.n() != seq.n() {
        return Err(Error::DimensionMismatch(
            "graph/sequence size mismatch".into(),
        ));
    }
    let ell = seq.ell() as u32;
    let low_in = graph.in_neighbors(i).iter().filter(|&&j| j >= ell).count();
    let y = (low_in as f64 / seq.delta()).powi(2);
    Ok(YStatistic {
        y,
        deviation: (y - seq.kappa(i).powi(2)).abs(),
    })
}

/// Exact probability that node i receives no edge at all, with the
/// exponential upper bound exp(-sum p_ij).
#[derive(Debug, Clone, Copy)]
pub struct IsolationProbability {
    pub exact: f64,
    pub bound: f64,
    pub log_exact: f64,
    pub log_bound: f64,
}

pub fn isolated_hub_probability(seq: &DegreeSequence, i: usize) -> Result<IsolationProbability> {
    if i >= seq.n() {
        return Err(Error::InvalidParameter(format!(
            "node index {i} out of range"
        )));
    }
    let mut log_exact = 0.0f64;
    let mut sum_p = 0.0f64;
    for j in 0..seq.n() {
        if j == i {
            continue;
        }
        let p = seq.edge_probability(i, j).min(1.0);
        sum_p += p;
        log_exact += (1.0 - p).ln(); // -inf when p = 1, giving exact = 0
    }
    Ok(IsolationProbability {
        exact: log_exact.exp(),
        bound: (-sum_p).exp(),
        log_exact,
        log_bound: -sum_p,
    })
}

/// Plain-text graph format: header `n ell delta rho`, one `i w_i k_i` line per
/// node, then one `i j` line per edge (j is an in-neighbor of i).
pub fn write_graph_text<W: Write>(
    out: &mut W,
    graph: &DirectedGraph,
    seq: &DegreeSequence,
) -> Result<()> {
    writeln!(
        out,
        "{} {} {} {}",
        seq.n(),
        seq.ell(),
        seq.delta(),
        seq.rho()
    )?;
    for i in 0..seq.n() {
        writeln!(out, "{} {} {}", i, seq.weight(i), graph.in_degree(i))?;
    }
    for i in 0..graph.n() {
        for &j in graph.in_neighbors(i) {
            writeln!(out, "{i} {j}")?;
        }
    }
    Ok(())
}

/// Parse the plain-text graph format back into a (sequence, graph) pair.
pub fn read_graph_text<R: BufRead>(input: R) -> Result<(DegreeSequence, DirectedGraph)> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty graph file".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(Error::InvalidParameter(
            "header must be `n ell delta rho`".into(),
        ));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| Error::InvalidParameter("bad n in header".into()))?;
    let ell: usize = fields[1]
        .parse()
        .map_err(|_| Error::InvalidParameter("bad ell in header".into()))?;
    let mut w = vec![0.0f64; n];
    for _ in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::InvalidParameter("truncated node section".into()))??;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 {
            return Err(Error::InvalidParameter(format!("bad node line: {line}")));
        }
        let i: usize = f[0]
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad node index: {line}")))?;
        w[i] = f[1]
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad weight: {line}")))?;
    }
    let mut nbrs: Vec<Vec<u32>> = vec![Vec::new(); n];
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 2 {
            return Err(Error::InvalidParameter(format!("bad edge line: {line}")));
        }
        let i: usize = f[0]
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad edge line: {line}")))?;
        let j: u32 = f[1]
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bad edge line: {line}")))?;
        nbrs[i].push(j);
    }
    let seq = DegreeSequence::from_weights(w, ell)?;
    let graph = DirectedGraph::from_in_neighbors(nbrs, 0)?;
    Ok((seq, graph))
}

/// CSV export of degree statistics: `node,w,k_in,k_out,dev`.
pub fn write_degree_csv<W: Write>(out: &mut W, stats: &[NodeDegrees]) -> Result<()> {
    writeln!(out, "node,w,k_in,k_out,dev")?;
    for s in stats {
        writeln!(out, "{},{},{},{},{}", s.node, s.w, s.k_in, s.k_out, s.dev)?;
    }
    Ok(())
}
