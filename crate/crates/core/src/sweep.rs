//! One-parameter sweeps around a benchmark configuration.
//!
//! For each swept value the grid and all three bounds are computed, then
//! `trials` seeded coverage runs measure the actual number of samples to full
//! coverage. Points whose grid exceeds `max_cells` keep their bound columns but
//! skip simulation.

use serde::{Deserialize, Serialize};

use crate::bounds::{subcube_count, BoundParams, BoundSet, GridSpec};
use crate::error::{Error, Result};
use crate::montecarlo::{Experiment, TrialResult, DEFAULT_MAX_CELLS, DEFAULT_MAX_SAMPLES, DEFAULT_SEED, DEFAULT_TRIALS};

/// Multiple of `m_approx` used as the per-trial sample cap when the plan
/// does not set one.
const AUTO_CAP_FACTOR: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Dimension,
    Epsilon,
    Delta,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Dimension => "dimension",
            SweepParam::Epsilon => "epsilon",
            SweepParam::Delta => "delta",
        }
    }

    /// Applies `value` to `benchmark`, leaving the other parameters untouched.
    pub fn apply(self, benchmark: &BoundParams, value: f64) -> Result<BoundParams> {
        let params = match self {
            SweepParam::Dimension => {
                if value.fract() != 0.0 || !(1.0..=f64::from(u32::MAX)).contains(&value) {
                    return Err(Error::invalid(format!("dimension must be a positive integer, got {value}")));
                }
                benchmark.with_d(value as u32)
            }
            SweepParam::Epsilon => benchmark.with_epsilon(value),
            SweepParam::Delta => benchmark.with_delta(value),
        };
        params.validate()?;
        Ok(params)
    }
}

impl std::str::FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dimension" | "d" => Ok(SweepParam::Dimension),
            "epsilon" => Ok(SweepParam::Epsilon),
            "delta" => Ok(SweepParam::Delta),
            other => Err(Error::invalid(format!("unknown sweep parameter `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub vary: SweepParam,
    pub values: Vec<f64>,
    pub benchmark: BoundParams,
    pub trials: u64,
    pub base_seed: u64,
    pub max_cells: u64,
    /// Per-trial sample cap. `None` means `max(1_000_000, 10·m_approx)` per point.
    pub max_samples: Option<u64>,
}

impl SweepPlan {
    pub fn new(vary: SweepParam, values: Vec<f64>, benchmark: BoundParams) -> Self {
        SweepPlan {
            vary,
            values,
            benchmark,
            trials: DEFAULT_TRIALS,
            base_seed: DEFAULT_SEED,
            max_cells: DEFAULT_MAX_CELLS,
            max_samples: None,
        }
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    pub fn with_max_cells(mut self, max_cells: u64) -> Self {
        self.max_cells = max_cells;
        self
    }

    pub fn with_max_samples(mut self, max_samples: u64) -> Self {
        self.max_samples = Some(max_samples);
        self
    }

    /// Dimension study: `d ∈ {1, 2, 3}` at the benchmark.
    pub fn dimension_study() -> Self {
        SweepPlan::new(SweepParam::Dimension, vec![1.0, 2.0, 3.0], BoundParams::benchmark())
    }

    /// Precision study: ten equispaced `ε ∈ [0.05, 0.5]` at the benchmark.
    pub fn epsilon_study() -> Self {
        SweepPlan::new(SweepParam::Epsilon, linspace(0.05, 0.5, 10), BoundParams::benchmark())
    }

    /// Failure-probability study: ten equispaced `δ ∈ [0.02, 0.2]` at the benchmark.
    pub fn delta_study() -> Self {
        SweepPlan::new(SweepParam::Delta, linspace(0.02, 0.2, 10), BoundParams::benchmark())
    }
}

/// `n` equispaced values from `start` to `end` inclusive, rounded to 12
/// significant digits so that `0.15` does not come out as `0.15000000000000002`.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    let snap = |x: f64| format!("{x:.11e}").parse::<f64>().unwrap_or(x);
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| snap(start + (end - start) * i as f64 / (n - 1) as f64))
            .collect(),
    }
}

/// The three supplementary studies, each at 20 trials:
///
/// 1. `d ∈ {2, 3, 4}` with `ε = 0.2, δ = 0.05, L̃ = 1`;
/// 2. ten equispaced `ε ∈ [0.03, 0.3]` with `d = 3, δ = 0.05`;
/// 3. `δ ∈ {0.01, 0.02, …, 0.10}` with `d = 3, ε = 0.2`.
pub fn supplement_sweeps() -> [SweepPlan; 3] {
    let base = |d, epsilon, delta| BoundParams {
        d,
        epsilon,
        delta,
        lipschitz: 1.0,
    };
    [
        SweepPlan::new(SweepParam::Dimension, vec![2.0, 3.0, 4.0], base(2, 0.2, 0.05)).with_trials(20),
        SweepPlan::new(SweepParam::Epsilon, linspace(0.03, 0.3, 10), base(3, 0.2, 0.05)).with_trials(20),
        SweepPlan::new(
            SweepParam::Delta,
            (1..=10).map(|i| f64::from(i) / 100.0).collect(),
            base(3, 0.2, 0.05),
        )
        .with_trials(20),
    ]
}

/// Results for one swept value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub value: f64,
    pub params: BoundParams,
    pub grid: GridSpec,
    pub bounds: BoundSet,
    /// Per-trial outcomes; empty when the point was skipped.
    pub trials: Vec<TrialResult>,
    pub max_samples: u64,
    pub skipped: bool,
}

impl PointRecord {
    /// Mean coverage time over trials that reached full coverage.
    pub fn mean_m_actual(&self) -> Option<f64> {
        let done: Vec<f64> = self.trials.iter().filter_map(|t| t.m_actual).map(|m| m as f64).collect();
        (!done.is_empty()).then(|| done.iter().sum::<f64>() / done.len() as f64)
    }

    /// Mean of `m_actual / m_approx`.
    pub fn mean_ratio(&self) -> Option<f64> {
        self.mean_m_actual().map(|m| m / self.bounds.m_approx as f64)
    }

    pub fn improvement(&self) -> f64 {
        self.bounds.improvement()
    }

    /// Fraction of trials still uncovered after `m_approx` samples.
    pub fn empirical_failure_rate(&self) -> Option<f64> {
        if self.trials.is_empty() {
            return None;
        }
        let failed = self.trials.iter().filter(|t| trial_failed(t, self.bounds.m_approx)).count();
        Some(failed as f64 / self.trials.len() as f64)
    }
}

fn trial_failed(trial: &TrialResult, m_approx: u64) -> bool {
    trial.m_actual.is_none_or(|m| m > m_approx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub grand_mean_ratio: Option<f64>,
    pub min_improvement: Option<f64>,
    pub max_improvement: Option<f64>,
    pub skipped_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub plan: SweepPlan,
    pub points: Vec<PointRecord>,
    pub summary: SweepSummary,
}

impl SweepReport {
    pub fn from_points(plan: SweepPlan, points: Vec<PointRecord>) -> Self {
        let ratios: Vec<f64> = points.iter().filter_map(PointRecord::mean_ratio).collect();
        let improvements = points.iter().map(PointRecord::improvement);
        let summary = SweepSummary {
            grand_mean_ratio: (!ratios.is_empty()).then(|| ratios.iter().sum::<f64>() / ratios.len() as f64),
            min_improvement: improvements.clone().reduce(f64::min),
            max_improvement: improvements.reduce(f64::max),
            skipped_points: points.iter().filter(|p| p.skipped).count(),
        };
        SweepReport { plan, points, summary }
    }
}

/// Runs every point of `plan` in order. Trials within a point run in parallel.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepReport> {
    plan.benchmark.validate()?;
    if plan.trials == 0 {
        return Err(Error::invalid("a sweep needs at least one trial per point"));
    }
    let mut points = Vec::with_capacity(plan.values.len());
    for &value in &plan.values {
        points.push(run_point(plan, value)?);
    }
    Ok(SweepReport::from_points(plan.clone(), points))
}

fn run_point(plan: &SweepPlan, value: f64) -> Result<PointRecord> {
    let params = plan.vary.apply(&plan.benchmark, value)?;
    let grid = subcube_count(&params)?;
    let bounds = BoundSet::compute(grid.cells, params.delta)?;
    let max_samples = plan
        .max_samples
        .unwrap_or_else(|| DEFAULT_MAX_SAMPLES.max(bounds.m_approx.saturating_mul(AUTO_CAP_FACTOR)));
    let skipped = grid.cells > plan.max_cells;
    let trials = if skipped {
        Vec::new()
    } else {
        Experiment::on_grid(grid, plan.trials, plan.base_seed)?
            .with_max_samples(max_samples)?
            .coverage_trials(None)
    };
    Ok(PointRecord {
        value,
        params,
        grid,
        bounds,
        trials,
        max_samples,
        skipped,
    })
}
