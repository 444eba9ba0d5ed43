//! Euler–Maruyama paths of `dX = ∇(Z+Y)(X)dt + dB` killed at the boundary of a centred box,
//! with the log-weight `log 𝒟` accumulated by the trapezoid rule.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::DriftData;
use crate::error::{Error, Result};
use crate::grid::GridField;
use crate::rng::{stream, Domain};

/// Four fields stored node-interleaved for bilinear evaluation.
#[derive(Clone, Debug)]
pub(crate) struct Interpolant {
    points: usize,
    side: f64,
    spacing: f64,
    nodes: Vec<[f64; 4]>,
}

impl Interpolant {
    pub(crate) fn new(fields: [&GridField; 4]) -> Result<Self> {
        for f in &fields[1..] {
            fields[0].check_same_box(f)?;
        }
        let spec = fields[0].spec();
        let nodes = (0..spec.len()).map(|idx| std::array::from_fn(|c| fields[c].values()[idx])).collect();
        Ok(Self { points: spec.points(), side: spec.side(), spacing: spec.spacing(), nodes })
    }

    /// Bilinear value at `x`; points outside the box are clamped to it.
    pub(crate) fn sample(&self, x: [f64; 2]) -> [f64; 4] {
        let last = self.points - 2;
        let locate = |c: f64| {
            let s = ((c + 0.5 * self.side) / self.spacing).max(0.0);
            let i = (s.floor() as usize).min(last);
            (i, (s - i as f64).min(1.0))
        };
        let (i, a) = locate(x[0]);
        let (j, b) = locate(x[1]);
        let n = self.points;
        let (v00, v01, v10, v11) =
            (self.nodes[i * n + j], self.nodes[i * n + j + 1], self.nodes[(i + 1) * n + j], self.nodes[(i + 1) * n + j + 1]);
        std::array::from_fn(|c| (1.0 - a) * ((1.0 - b) * v00[c] + b * v01[c]) + a * ((1.0 - b) * v10[c] + b * v11[c]))
    }
}

/// Simulation parameters shared by the estimators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathOptions {
    pub dt: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub start: [f64; 2],
    /// Side of the centred killing box; `None` uses the drift box.
    pub kill_side: Option<f64>,
    /// Sides of centred boxes whose first exit is flagged.
    pub sub_boxes: Vec<f64>,
    /// Kill and flag on Brownian-bridge crossings between lattice times.
    pub bridge: bool,
    /// Number of leading paths whose trajectories are kept.
    pub record: usize,
}

impl Default for PathOptions {
    fn default() -> Self {
        Self { dt: 1e-3, n_paths: 10_000, seed: 0, start: [0.0; 2], kill_side: None, sub_boxes: Vec::new(), bridge: true, record: 0 }
    }
}

/// Outcome of one simulated batch.
#[derive(Clone, Debug)]
pub struct PathBatch {
    pub n_paths: usize,
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
    pub kill_side: f64,
    pub sub_boxes: Vec<f64>,
    /// Whether each path stayed in the killing box up to `t_final`.
    pub survived: Vec<bool>,
    /// `exited[p][b]`: path `p` left sub-box `b`; a killed path has left every sub-box.
    pub exited: Vec<Vec<bool>>,
    /// `log 𝒟(0, t_final)` for survivors, `−∞` for killed paths.
    pub log_weight: Vec<f64>,
    pub final_position: Vec<[f64; 2]>,
    /// Positions at every step (up to the kill) of the first `record` paths.
    pub trajectories: Vec<Vec<[f64; 2]>>,
}

/// Probability that a Brownian bridge from `p` to `q` over `dt` stays in `(−h, h)²`.
fn bridge_stays(half: f64, p: [f64; 2], q: [f64; 2], dt: f64) -> f64 {
    (0..2)
        .map(|a| {
            let upper = (-2.0 * (half - p[a]) * (half - q[a]) / dt).exp();
            let lower = (-2.0 * (half + p[a]) * (half + q[a]) / dt).exp();
            (1.0 - upper) * (1.0 - lower)
        })
        .product()
}

fn inside(half: f64, x: [f64; 2]) -> bool {
    x[0].abs() < half && x[1].abs() < half
}

struct PathOutcome {
    survived: bool,
    exited: Vec<bool>,
    log_weight: f64,
    end: [f64; 2],
    trajectory: Option<Vec<[f64; 2]>>,
}

fn run_path(drift: &DriftData, t: f64, steps: usize, opts: &PathOptions, kill_side: f64, index: usize) -> PathOutcome {
    let dt = t / steps as f64;
    let sq = dt.sqrt();
    let kill_half = 0.5 * kill_side;
    let sub_halves: Vec<f64> = opts.sub_boxes.iter().map(|s| 0.5 * s).collect();
    let mut rng = stream(opts.seed, Domain::Path, index as u64);
    let mut x = opts.start;
    let mut exited: Vec<bool> = sub_halves.iter().map(|&h| !inside(h, x)).collect();
    let mut trajectory = (index < opts.record).then(|| vec![x]);
    let first = drift.sample(x);
    let mut current = first;
    let mut integral = 0.0;
    for _ in 0..steps {
        let g1: f64 = rng.sample(StandardNormal);
        let g2: f64 = rng.sample(StandardNormal);
        let next = [x[0] + current[0] * dt + sq * g1, x[1] + current[1] * dt + sq * g2];
        let u: f64 = if opts.bridge { rng.random() } else { 0.0 };
        let killed = !inside(kill_half, next) || (opts.bridge && u > bridge_stays(kill_half, x, next, dt));
        if killed {
            if let Some(tr) = trajectory.as_mut() {
                tr.push(next);
            }
            return PathOutcome {
                survived: false,
                exited: vec![true; sub_halves.len()],
                log_weight: f64::NEG_INFINITY,
                end: next,
                trajectory,
            };
        }
        for (flag, &h) in exited.iter_mut().zip(&sub_halves) {
            // one uniform per step couples the nested crossings: a larger box is left only if
            // every smaller one is
            if !*flag && (!inside(h, next) || (opts.bridge && u > bridge_stays(h, x, next, dt))) {
                *flag = true;
            }
        }
        let sample = drift.sample(next);
        integral += 0.5 * (current[2] + sample[2]) * dt;
        current = sample;
        x = next;
        if let Some(tr) = trajectory.as_mut() {
            tr.push(x);
        }
    }
    PathOutcome { survived: true, exited, log_weight: integral + first[3] - current[3], end: x, trajectory }
}

/// Simulates `opts.n_paths` independent paths on `[0, t]`; path `p` draws from its own
/// counter stream, so results do not depend on the thread count.
pub fn simulate_paths(drift: &DriftData, t: f64, opts: &PathOptions) -> Result<PathBatch> {
    if !(t > 0.0) || !(opts.dt > 0.0) || opts.n_paths == 0 {
        return Err(Error::InvalidParameter(format!(
            "need t > 0, dt > 0 and at least one path (t = {t}, dt = {}, paths = {})",
            opts.dt, opts.n_paths
        )));
    }
    let side = drift.spec().side();
    let kill_side = opts.kill_side.unwrap_or(side);
    if !(kill_side > 0.0 && kill_side <= side * (1.0 + 1e-12)) {
        return Err(Error::InvalidParameter(format!("killing box {kill_side} must fit in the drift box {side}")));
    }
    if !inside(0.5 * kill_side, opts.start) {
        return Err(Error::InvalidParameter("start point outside the killing box".into()));
    }
    let steps = (t / opts.dt).round().max(1.0) as usize;
    let outcomes: Vec<PathOutcome> =
        (0..opts.n_paths).into_par_iter().map(|p| run_path(drift, t, steps, opts, kill_side, p)).collect();
    let mut batch = PathBatch {
        n_paths: opts.n_paths,
        dt: t / steps as f64,
        t_final: t,
        seed: opts.seed,
        kill_side,
        sub_boxes: opts.sub_boxes.clone(),
        survived: Vec::with_capacity(opts.n_paths),
        exited: Vec::with_capacity(opts.n_paths),
        log_weight: Vec::with_capacity(opts.n_paths),
        final_position: Vec::with_capacity(opts.n_paths),
        trajectories: Vec::new(),
    };
    for o in outcomes {
        batch.survived.push(o.survived);
        batch.exited.push(o.exited);
        batch.log_weight.push(o.log_weight);
        batch.final_position.push(o.end);
        batch.trajectories.extend(o.trajectory);
    }
    Ok(batch)
}

/// `log 𝒟` of a path sampled at uniform steps `dt`: trapezoid integral of
/// `Z + ηY + ½|∇Y|²` plus `(Z+Y)(first) − (Z+Y)(last)`.
pub fn log_weight(drift: &DriftData, path: &[[f64; 2]], dt: f64) -> f64 {
    let samples: Vec<[f64; 4]> = path.iter().map(|&x| drift.sample(x)).collect();
    match (samples.first(), samples.last()) {
        (Some(first), Some(last)) => {
            let integral: f64 = samples.windows(2).map(|w| 0.5 * (w[0][2] + w[1][2]) * dt).sum();
            integral + first[3] - last[3]
        }
        _ => 0.0,
    }
}

/// Monte Carlo mean of nonnegative weights given by their logarithms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// `log mean`; finite even when `mean` overflows.
    pub log_mean: f64,
    pub n_paths: usize,
    /// Paths with nonzero weight.
    pub n_survived: usize,
    /// `(Σw)² / Σw²`.
    pub n_effective: f64,
    /// The weights exceeded the `f64` exponent range and were summed after a shift.
    pub log_domain: bool,
    /// No path carried weight.
    pub degenerate: bool,
}

impl WeightedEstimate {
    /// Estimate from per-path log-weights (`−∞` for zero weight).
    pub fn from_log_weights(logs: &[f64]) -> Self {
        let n = logs.len();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let survivors = logs.iter().filter(|l| l.is_finite()).count();
        if survivors == 0 || !top.is_finite() {
            return Self {
                mean: 0.0,
                stderr: 0.0,
                log_mean: f64::NEG_INFINITY,
                n_paths: n,
                n_survived: 0,
                n_effective: 0.0,
                log_domain: false,
                degenerate: true,
            };
        }
        let (s1, s2) = logs.iter().fold((0.0, 0.0), |(a, b), l| {
            let w = (l - top).exp();
            (a + w, b + w * w)
        });
        let mean = s1 / n as f64;
        let var = if n > 1 { (s2 / n as f64 - mean * mean).max(0.0) * n as f64 / (n - 1) as f64 } else { 0.0 };
        let scale = top.exp();
        Self {
            mean: mean * scale,
            stderr: (var / n as f64).sqrt() * scale,
            log_mean: top + mean.ln(),
            n_paths: n,
            n_survived: survivors,
            n_effective: s1 * s1 / s2,
            log_domain: top.abs() > 600.0,
            degenerate: false,
        }
    }

    /// Estimate of a probability from indicators.
    pub fn from_indicators(hits: impl Iterator<Item = bool>) -> Self {
        let logs: Vec<f64> = hits.map(|h| if h { 0.0 } else { f64::NEG_INFINITY }).collect();
        Self::from_log_weights(&logs)
    }

    /// `(mean − reference) / stderr`.
    pub fn z_score(&self, reference: f64) -> f64 {
        (self.mean - reference) / self.stderr
    }
}

/// `U_L^x(t) = E_ℚ[𝒟(0,t) 1{X stays in Q_L}]` with `L = box_side` and `x = opts.start`.
pub fn mc_total_mass(drift: &DriftData, box_side: f64, t: f64, opts: &PathOptions) -> Result<WeightedEstimate> {
    let opts = PathOptions { kill_side: Some(box_side), ..opts.clone() };
    let batch = simulate_paths(drift, t, &opts)?;
    Ok(WeightedEstimate::from_log_weights(&batch.log_weight))
}

/// `ℚ[X leaves Q_r before t]` under the drift, unweighted.
pub fn escape_probability(drift: &DriftData, r: f64, t: f64, opts: &PathOptions) -> Result<WeightedEstimate> {
    let side = opts.kill_side.unwrap_or(drift.spec().side());
    if !(r > 0.0 && r < side) {
        return Err(Error::InvalidParameter(format!("sub-box side {r} must lie in (0, {side})")));
    }
    let opts = PathOptions { sub_boxes: vec![r], ..opts.clone() };
    let batch = simulate_paths(drift, t, &opts)?;
    Ok(WeightedEstimate::from_indicators(batch.exited.iter().map(|e| e[0])))
}

/// One term `𝔘_k = E_ℚ[𝒟 1{X ⊄ Q_{L^k}, X ⊂ Q_{L^{k+1}}}]` (for `k = 0` only the second event).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitTerm {
    pub k: usize,
    pub inner_side: Option<f64>,
    pub outer_side: f64,
    pub estimate: WeightedEstimate,
}

/// Decomposition of the total mass over nested boxes `Q_{L^k}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSplitting {
    pub base_side: f64,
    pub t: f64,
    pub terms: Vec<SplitTerm>,
    pub total: f64,
    pub total_stderr: f64,
}

impl BoxSplitting {
    /// `𝔘_k / 𝔘_0` with its delta-method standard error (terms are independent).
    pub fn ratio_to_first(&self, k: usize) -> Option<(f64, f64)> {
        let first = &self.terms.first()?.estimate;
        let term = &self.terms.get(k)?.estimate;
        let ratio = term.mean / first.mean;
        let rel = ((term.stderr / term.mean).powi(2) + (first.stderr / first.mean).powi(2)).sqrt();
        Some((ratio, ratio * rel))
    }
}

/// Estimates `𝔘_0, …, 𝔘_{k_max}` for boxes of side `L^{k+1}`, each under the drift that
/// `family` builds on that box. Term `k` uses seed `opts.seed + k`, so the terms are
/// independent.
pub fn box_splitting_experiment(
    family: impl Fn(f64) -> Result<DriftData>,
    base_side: f64,
    t: f64,
    k_max: usize,
    opts: &PathOptions,
) -> Result<BoxSplitting> {
    if !(base_side > 1.0) {
        return Err(Error::InvalidParameter(format!("nested boxes need L > 1, got {base_side}")));
    }
    let mut terms = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let outer = base_side.powi(k as i32 + 1);
        let inner = (k > 0).then(|| base_side.powi(k as i32));
        let drift = family(outer)?;
        let run = PathOptions {
            kill_side: Some(outer),
            sub_boxes: inner.into_iter().collect(),
            seed: opts.seed.wrapping_add(k as u64),
            ..opts.clone()
        };
        let batch = simulate_paths(&drift, t, &run)?;
        let logs: Vec<f64> = batch
            .log_weight
            .iter()
            .zip(&batch.exited)
            .map(|(&l, e)| if inner.is_none() || e[0] { l } else { f64::NEG_INFINITY })
            .collect();
        terms.push(SplitTerm { k, inner_side: inner, outer_side: outer, estimate: WeightedEstimate::from_log_weights(&logs) });
    }
    let total = terms.iter().map(|s| s.estimate.mean).sum();
    let total_stderr = terms.iter().map(|s| s.estimate.stderr.powi(2)).sum::<f64>().sqrt();
    Ok(BoxSplitting { base_side, t, terms, total, total_stderr })
}
