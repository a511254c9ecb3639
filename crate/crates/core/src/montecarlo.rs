//! Monte Carlo validation of the coverage bounds.
//!
//! Each trial owns its own generator, `ChaCha8Rng::seed_from_u64(base_seed + t)`,
//! so results depend only on the trial index and never on how trials are
//! scheduled across threads. Trials fan out over rayon and are collected in
//! index order before any reduction.
//!
//! Two sampling paths are available. The index path draws a uniform integer in
//! `[0, C̃)` directly; the point path draws a uniform point in `[0,1)^d` and
//! maps it through [`point_to_cell`]. Under uniform sampling only the cell
//! identity matters, so both produce the same coverage-time distribution.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{subcube_count, BoundParams, GridSpec};
use crate::error::{Error, Result};
use crate::grid::{point_to_cell, CellIndex, CoverageState};

pub const DEFAULT_TRIALS: u64 = 32;
pub const DEFAULT_MAX_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 42;
/// Largest grid simulated by default: 10⁸ cells, i.e. 12.5 MB of occupancy bits.
pub const DEFAULT_MAX_CELLS: u64 = 100_000_000;
/// Largest grid accepted by [`exact_coverage_failure`].
pub const EXACT_ORACLE_MAX_CELLS: u64 = 24;

/// The generator used for trial `seed`.
pub fn trial_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingPath {
    #[default]
    Index,
    Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub params: BoundParams,
    pub trials: u64,
    pub base_seed: u64,
    pub max_samples: u64,
}

impl TrialConfig {
    pub fn new(params: BoundParams) -> Self {
        TrialConfig {
            params,
            trials: DEFAULT_TRIALS,
            base_seed: DEFAULT_SEED,
            max_samples: DEFAULT_MAX_SAMPLES,
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

    pub fn with_max_samples(mut self, max_samples: u64) -> Self {
        self.max_samples = max_samples;
        self
    }
}

/// Outcome of one coverage trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialResult {
    /// Samples needed for full coverage; `None` if the cap was reached first.
    pub m_actual: Option<u64>,
    /// Uncovered cells after the probe sample count, when a probe was requested
    /// and reached.
    pub z_at_m: Option<u64>,
    pub hit_cap: bool,
}

/// Sample moments of `Z` and of one fixed pair `(Y_0, Y_1)` across trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub trials: u64,
    pub mean_z: f64,
    pub var_z: f64,
    pub cov_pair: f64,
    pub se_mean_z: f64,
    pub se_cov_pair: f64,
}

#[inline]
fn draw_cell<R: Rng>(rng: &mut R, grid: &GridSpec, path: SamplingPath, point: &mut [f64]) -> CellIndex {
    match path {
        SamplingPath::Index => {
            if grid.cells <= u64::from(u32::MAX) {
                CellIndex(u64::from(rng.gen_range(0..grid.cells as u32)))
            } else {
                CellIndex(rng.gen_range(0..grid.cells))
            }
        }
        SamplingPath::Point => {
            for x in point.iter_mut() {
                *x = rng.gen::<f64>();
            }
            point_to_cell(point, grid.k).expect("unit-cube point maps to a cell")
        }
    }
}

/// Runs one trial on a reusable state until full coverage or `max_samples`.
fn run_trial(
    grid: &GridSpec,
    state: &mut CoverageState,
    seed: u64,
    max_samples: u64,
    probe: Option<u64>,
    path: SamplingPath,
) -> TrialResult {
    state.reset();
    let mut rng = trial_rng(seed);
    let mut point = vec![0.0; grid.d as usize];
    let mut z_at_m = (probe == Some(0)).then_some(grid.cells);
    while !state.is_fully_covered() && state.samples_drawn() < max_samples {
        let cell = draw_cell(&mut rng, grid, path, &mut point);
        state.record(cell);
        if probe == Some(state.samples_drawn()) {
            z_at_m = Some(state.uncovered_count());
        }
    }
    let covered = state.is_fully_covered();
    if covered && z_at_m.is_none() && probe.is_some() {
        z_at_m = Some(0);
    }
    TrialResult {
        m_actual: covered.then_some(state.samples_drawn()),
        z_at_m,
        hit_cap: !covered,
    }
}

/// Draws exactly `m` samples (stopping early once nothing is left uncovered).
fn run_fixed(grid: &GridSpec, state: &mut CoverageState, seed: u64, m: u64, path: SamplingPath) {
    state.reset();
    let mut rng = trial_rng(seed);
    let mut point = vec![0.0; grid.d as usize];
    while state.samples_drawn() < m && !state.is_fully_covered() {
        let cell = draw_cell(&mut rng, grid, path, &mut point);
        state.record(cell);
    }
}

/// Samples uniform cells until every cell is covered or `max_samples` is reached.
pub fn simulate_until_covered(grid: &GridSpec, seed: u64, max_samples: u64) -> Result<TrialResult> {
    if max_samples == 0 {
        return Err(Error::invalid("max_samples must be positive"));
    }
    let mut state = CoverageState::for_grid(grid)?;
    Ok(run_trial(grid, &mut state, seed, max_samples, None, SamplingPath::Index))
}

/// Realized number of uncovered cells after `m` uniform samples.
pub fn uncovered_after(grid: &GridSpec, m: u64, seed: u64) -> Result<u64> {
    let mut state = CoverageState::for_grid(grid)?;
    run_fixed(grid, &mut state, seed, m, SamplingPath::Index);
    Ok(state.uncovered_count())
}

/// Fraction of `config.trials` trials with at least one uncovered cell after `m` samples.
pub fn empirical_failure_rate(config: &TrialConfig, m: u64) -> Result<f64> {
    Ok(Experiment::new(config)?.failure_rate(m))
}

pub fn empirical_moments(config: &TrialConfig, m: u64) -> Result<Moments> {
    Experiment::new(config)?.moments(m)
}

/// A batch of seeded trials on one grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Experiment {
    grid: GridSpec,
    trials: u64,
    base_seed: u64,
    max_samples: u64,
    path: SamplingPath,
}

impl Experiment {
    /// Builds the grid for `config.params`; refuses grids above [`DEFAULT_MAX_CELLS`].
    pub fn new(config: &TrialConfig) -> Result<Self> {
        Self::with_cap(config, DEFAULT_MAX_CELLS)
    }

    pub fn with_cap(config: &TrialConfig, max_cells: u64) -> Result<Self> {
        let grid = subcube_count(&config.params)?;
        if grid.cells > max_cells {
            return Err(Error::Capacity {
                cells: grid.cells,
                max_cells,
            });
        }
        Self::on_grid(grid, config.trials, config.base_seed)?.with_max_samples(config.max_samples)
    }

    pub fn on_grid(grid: GridSpec, trials: u64, base_seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        // Probe allocation once so workers can rely on it.
        CoverageState::for_grid(&grid)?;
        Ok(Experiment {
            grid,
            trials,
            base_seed,
            max_samples: DEFAULT_MAX_SAMPLES,
            path: SamplingPath::Index,
        })
    }

    pub fn with_max_samples(mut self, max_samples: u64) -> Result<Self> {
        if max_samples == 0 {
            return Err(Error::invalid("max_samples must be positive"));
        }
        self.max_samples = max_samples;
        Ok(self)
    }

    pub fn with_path(mut self, path: SamplingPath) -> Self {
        self.path = path;
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed_for(&self, trial: u64) -> u64 {
        self.base_seed.wrapping_add(trial)
    }

    fn new_state(&self) -> CoverageState {
        CoverageState::for_grid(&self.grid).expect("grid validated at construction")
    }

    /// Per-trial coverage results in trial order.
    pub fn coverage_trials(&self, probe: Option<u64>) -> Vec<TrialResult> {
        (0..self.trials)
            .into_par_iter()
            .map_init(
                || self.new_state(),
                |state, t| run_trial(&self.grid, state, self.seed_for(t), self.max_samples, probe, self.path),
            )
            .collect()
    }

    /// Realized `Z` after `m` samples for every trial, in trial order.
    pub fn uncovered_counts(&self, m: u64) -> Vec<u64> {
        (0..self.trials)
            .into_par_iter()
            .map_init(
                || self.new_state(),
                |state, t| {
                    run_fixed(&self.grid, state, self.seed_for(t), m, self.path);
                    state.uncovered_count()
                },
            )
            .collect()
    }

    pub fn failure_rate(&self, m: u64) -> f64 {
        let failures = self.uncovered_counts(m).iter().filter(|&&z| z >= 1).count();
        failures as f64 / self.trials as f64
    }

    pub fn moments(&self, m: u64) -> Result<Moments> {
        if self.trials < 2 {
            return Err(Error::invalid("moments need at least two trials"));
        }
        if self.grid.cells < 2 {
            return Err(Error::invalid("pair covariance needs at least two cells"));
        }
        let samples: Vec<(f64, f64, f64)> = (0..self.trials)
            .into_par_iter()
            .map_init(
                || self.new_state(),
                |state, t| {
                    run_fixed(&self.grid, state, self.seed_for(t), m, self.path);
                    let y = |c| if state.is_covered(CellIndex(c)) { 0.0 } else { 1.0 };
                    (state.uncovered_count() as f64, y(0), y(1))
                },
            )
            .collect();
        let n = samples.len() as f64;
        let mean = |f: fn(&(f64, f64, f64)) -> f64| samples.iter().map(f).sum::<f64>() / n;
        let mean_z = mean(|s| s.0);
        let mean_y0 = mean(|s| s.1);
        let mean_y1 = mean(|s| s.2);
        let var_z = samples.iter().map(|s| (s.0 - mean_z).powi(2)).sum::<f64>() / (n - 1.0);
        let products: Vec<f64> = samples
            .iter()
            .map(|s| (s.1 - mean_y0) * (s.2 - mean_y1))
            .collect();
        let cov_pair = products.iter().sum::<f64>() / (n - 1.0);
        let mean_p = products.iter().sum::<f64>() / n;
        let var_p = products.iter().map(|p| (p - mean_p).powi(2)).sum::<f64>() / (n - 1.0);
        Ok(Moments {
            trials: self.trials,
            mean_z,
            var_z,
            cov_pair,
            se_mean_z: (var_z / n).sqrt(),
            se_cov_pair: (var_p / n).sqrt(),
        })
    }
}

/// Exact `P(Z ≥ 1)` after `m` samples on `cells` cells by inclusion–exclusion:
/// `1 − Σ_j (−1)^j·C(C̃, j)·(1 − j/C̃)^M`, summed with Neumaier compensation.
///
/// Limited to 24 cells; beyond that the alternating sum loses too many digits.
pub fn exact_coverage_failure(cells: u64, m: u64) -> Result<f64> {
    if cells == 0 || cells > EXACT_ORACLE_MAX_CELLS {
        return Err(Error::invalid(format!(
            "exact oracle supports 1..={EXACT_ORACLE_MAX_CELLS} cells, got {cells}"
        )));
    }
    let c = cells as f64;
    let mut sum = 0.0f64;
    let mut compensation = 0.0f64;
    let mut binom = 1.0f64;
    for j in 0..=cells {
        if j > 0 {
            binom = binom * (cells - j + 1) as f64 / j as f64;
        }
        let base = 1.0 - j as f64 / c;
        let power = if m == 0 { 1.0 } else { base.powf(m as f64) };
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * binom * power;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            compensation += (sum - t) + term;
        } else {
            compensation += (term - t) + sum;
        }
        sum = t;
    }
    let p_covered = (sum + compensation).clamp(0.0, 1.0);
    Ok(1.0 - p_covered)
}

/// Expected coupon-collector time `C̃·H_C̃`.
pub fn expected_coverage_time(cells: u64) -> f64 {
    let harmonic: f64 = (1..=cells).rev().map(|i| 1.0 / i as f64).sum();
    cells as f64 * harmonic
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{expected_uncovered, sample_bound_exact};

    fn linear(cells: u64) -> GridSpec {
        GridSpec::linear(cells).unwrap()
    }

    #[test]
    fn single_cell_needs_one_sample() {
        let r = simulate_until_covered(&linear(1), 7, 10).unwrap();
        assert_eq!(r.m_actual, Some(1));
        assert!(!r.hit_cap);
    }

    #[test]
    fn cap_is_reported_not_fatal() {
        let r = simulate_until_covered(&linear(1000), 1, 10).unwrap();
        assert_eq!(r.m_actual, None);
        assert!(r.hit_cap);
        assert!(simulate_until_covered(&linear(10), 1, 0).is_err());
    }

    #[test]
    fn two_cells_mean_coverage_time() {
        let e = Experiment::on_grid(linear(2), 20_000, 11).unwrap();
        let times = e.coverage_trials(None);
        let mean = times.iter().map(|r| r.m_actual.unwrap() as f64).sum::<f64>() / times.len() as f64;
        assert!((mean - 3.0).abs() < 0.1, "{mean}");
    }

    #[test]
    fn benchmark_grid_mean_coverage_time() {
        let grid = subcube_count(&BoundParams::benchmark()).unwrap();
        assert_eq!(grid.cells, 841);
        let e = Experiment::on_grid(grid, 200, 3).unwrap();
        let times = e.coverage_trials(None);
        let mean = times.iter().map(|r| r.m_actual.unwrap() as f64).sum::<f64>() / times.len() as f64;
        let oracle = 841.0 * ((841f64).ln() + 0.577_215_664_9);
        assert!(((mean - oracle) / oracle).abs() < 0.05, "{mean} vs {oracle}");
    }

    #[test]
    fn uncovered_after_examples() {
        assert_eq!(uncovered_after(&linear(5), 0, 1).unwrap(), 5);
        let e = Experiment::on_grid(linear(2), 10_000, 0).unwrap();
        let zs = e.uncovered_counts(20);
        let mean = zs.iter().sum::<u64>() as f64 / zs.len() as f64;
        assert!(mean <= 2.0 * 2.0 * 0.5f64.powi(20));
    }

    #[test]
    fn headline_grid_rarely_fails() {
        let e = Experiment::on_grid(linear(3249), 1000, 5).unwrap();
        assert!(e.failure_rate(43_486) <= 0.01);
    }

    #[test]
    fn failure_rate_examples() {
        let cfg = TrialConfig::new(BoundParams::new(1, 2.0, 0.1, 1.0).unwrap()).with_trials(50);
        assert_eq!(empirical_failure_rate(&cfg, 1).unwrap(), 0.0);
        let e = Experiment::on_grid(linear(2), 100, 0).unwrap();
        assert_eq!(e.failure_rate(1), 1.0);
        let m = sample_bound_exact(10, 0.1).unwrap();
        let e = Experiment::on_grid(linear(10), 10_000, 0).unwrap();
        let rate = e.failure_rate(m);
        assert!(rate <= 0.05, "{rate}");
        let union = expected_uncovered(10, m);
        assert!(rate <= union + 4.0 * (union / 10_000.0).sqrt());
    }

    #[test]
    fn exact_oracle_examples() {
        assert!((exact_coverage_failure(2, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!((exact_coverage_failure(3, 3).unwrap() - 7.0 / 9.0).abs() < 1e-14);
        assert_eq!(exact_coverage_failure(2, 1).unwrap(), 1.0);
        assert_eq!(exact_coverage_failure(1, 0).unwrap(), 1.0);
        assert_eq!(exact_coverage_failure(1, 1).unwrap(), 0.0);
        assert!(exact_coverage_failure(25, 10).is_err());
        assert!(exact_coverage_failure(0, 10).is_err());
    }

    /// Enumerates all `C^M` sample sequences.
    fn brute_force_failure(cells: u64, m: u32) -> f64 {
        let total = cells.pow(m);
        let mut failures = 0u64;
        for mut code in 0..total {
            let mut seen = 0u64;
            for _ in 0..m {
                seen |= 1 << (code % cells);
                code /= cells;
            }
            if seen.count_ones() as u64 != cells {
                failures += 1;
            }
        }
        failures as f64 / total as f64
    }

    #[test]
    fn exact_oracle_matches_enumeration() {
        for cells in 1..=5u64 {
            for m in 0..=8u32 {
                let exact = exact_coverage_failure(cells, u64::from(m)).unwrap();
                let brute = brute_force_failure(cells, m);
                assert!((exact - brute).abs() < 1e-12, "C={cells} M={m}");
            }
        }
    }

    #[test]
    fn moments_examples() {
        let e = Experiment::on_grid(linear(2), 500, 0).unwrap();
        let mo = e.moments(1).unwrap();
        assert_eq!(mo.mean_z, 1.0);
        assert_eq!(mo.var_z, 0.0);

        let e = Experiment::on_grid(linear(10), 10_000, 1).unwrap();
        let mo = e.moments(10).unwrap();
        let ez = 10.0 * 0.9f64.powi(10);
        assert!((mo.mean_z - ez).abs() <= 3.0 * mo.se_mean_z, "{mo:?}");
        let cov = 0.8f64.powi(10) - 0.9f64.powi(20);
        assert!((mo.cov_pair - cov).abs() <= 3.0 * mo.se_cov_pair, "{mo:?}");
        assert!(Experiment::on_grid(linear(10), 1, 1).unwrap().moments(3).is_err());
    }

    #[test]
    fn results_are_deterministic() {
        let e = Experiment::on_grid(linear(300), 64, 99).unwrap();
        assert_eq!(e.coverage_trials(Some(500)), e.coverage_trials(Some(500)));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let parallel = pool.install(|| e.coverage_trials(Some(500)));
        assert_eq!(parallel, e.coverage_trials(Some(500)));
        let serial: Vec<_> = (0..64)
            .map(|t| {
                let mut s = CoverageState::new(300).unwrap();
                run_trial(e.grid(), &mut s, 99 + t, DEFAULT_MAX_SAMPLES, Some(500), SamplingPath::Index)
            })
            .collect();
        assert_eq!(serial, parallel);
    }

    #[test]
    fn probe_records_z() {
        let e = Experiment::on_grid(linear(50), 20, 4).unwrap();
        let with_probe = e.coverage_trials(Some(60));
        let direct = e.uncovered_counts(60);
        for (r, z) in with_probe.iter().zip(direct) {
            assert_eq!(r.z_at_m, Some(z));
        }
        let r = e.coverage_trials(Some(0));
        assert!(r.iter().all(|r| r.z_at_m == Some(50)));
    }

    #[test]
    fn expected_coverage_time_small() {
        assert_eq!(expected_coverage_time(1), 1.0);
        assert!((expected_coverage_time(2) - 3.0).abs() < 1e-12);
        assert!((expected_coverage_time(3) - 5.5).abs() < 1e-12);
    }
}
