//! Closed-form sample-complexity bounds for covering a discretized unit hypercube.
//!
//! The cube `[0,1]^d` is split into `k` segments per axis with
//! `k = ⌈2·L̃·√d / ε⌉`, giving `C̃ = k^d` cells. With `M` i.i.d. uniform
//! samples the single-cell miss probability is `q = (1 − 1/C̃)^M` and the
//! number of uncovered cells `Z` has `E[Z] = C̃·q`.
//!
//! Requiring the one-sided Chebyshev bound `Var[Z] / (1 − E[Z])² ≤ δ/2`,
//! with `Var[Z] ≤ C̃·q·(1 − q)` because distinct cells are negatively
//! correlated, leads to the quadratic
//!
//! ```text
//! (2C̃ + δC̃²)·q² − 2C̃(1 + δ)·q + δ ≥ 0
//! ```
//!
//! whose smaller root `q1` fixes the exact bound `M = ⌈ln q1 / ln(1 − 1/C̃)⌉`.
//! Because `q1 ≈ δ / (2C̃)` as `δ → 0`, the approximate bound is
//! `M = ⌈C̃·ln(2C̃/δ)⌉`. The classical coupon-collector comparator grows
//! linearly in `1/δ`: `M = ⌈(C̃/δ)·ln(2C̃)⌉`.
//!
//! All powers of `(1 − 1/C̃)` are evaluated in log space with `ln_1p`/`exp_m1`
//! so that grids with millions of cells keep full precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest cell count accepted by [`subcube_count`]; larger grids report
/// [`Error::Overflow`].
pub const MAX_CELLS: u64 = 1 << 63;

/// The problem quadruple `(d, ε, δ, L̃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub d: u32,
    pub epsilon: f64,
    pub delta: f64,
    pub lipschitz: f64,
}

impl BoundParams {
    pub fn new(d: u32, epsilon: f64, delta: f64, lipschitz: f64) -> Result<Self> {
        let params = BoundParams {
            d,
            epsilon,
            delta,
            lipschitz,
        };
        params.validate()?;
        Ok(params)
    }

    /// The benchmark configuration used throughout the parameter studies:
    /// `d = 2, ε = 0.1, δ = 0.1, L̃ = 1`.
    pub fn benchmark() -> Self {
        BoundParams {
            d: 2,
            epsilon: 0.1,
            delta: 0.1,
            lipschitz: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 1 {
            return Err(Error::invalid("dimension d must be at least 1"));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::invalid(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        check_delta(self.delta)?;
        if !(self.lipschitz.is_finite() && self.lipschitz > 0.0) {
            return Err(Error::invalid(format!(
                "lipschitz must be positive, got {}",
                self.lipschitz
            )));
        }
        Ok(())
    }

    pub fn with_d(self, d: u32) -> Self {
        BoundParams { d, ..self }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        BoundParams { epsilon, ..self }
    }

    pub fn with_delta(self, delta: f64) -> Self {
        BoundParams { delta, ..self }
    }

    /// `2·L̃·√d / ε`, the real-valued number of segments per axis before rounding up.
    pub fn segments_real(&self) -> f64 {
        2.0 * self.lipschitz * f64::from(self.d).sqrt() / self.epsilon
    }
}

/// Discretization of the unit hypercube derived from [`BoundParams`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: u32,
    /// Segments per axis.
    pub k: u64,
    /// `k^d`.
    pub cells: u64,
}

impl GridSpec {
    /// A one-dimensional grid with `cells` segments. Any cell count can be
    /// simulated this way since only cell identity matters for coverage.
    pub fn linear(cells: u64) -> Result<Self> {
        if cells == 0 {
            return Err(Error::invalid("a grid needs at least one cell"));
        }
        Ok(GridSpec { d: 1, k: cells, cells })
    }

    /// Builds a grid from explicit segment count and dimension.
    pub fn new(d: u32, k: u64) -> Result<Self> {
        if d == 0 || k == 0 {
            return Err(Error::invalid("grid needs d ≥ 1 and k ≥ 1"));
        }
        let cells = checked_cells(k, d)?;
        Ok(GridSpec { d, k, cells })
    }

    pub fn ln_cells(&self) -> f64 {
        f64::from(self.d) * (self.k as f64).ln()
    }
}

/// Cell radius `r̃ = ε / (2L̃)`.
pub fn cell_radius(params: &BoundParams) -> f64 {
    params.epsilon / (2.0 * params.lipschitz)
}

/// Computes `k = ⌈2L̃√d/ε⌉` and `C̃ = k^d`.
pub fn subcube_count(params: &BoundParams) -> Result<GridSpec> {
    params.validate()?;
    let k = segments_per_axis(params)?;
    let cells = checked_cells(k, params.d)?;
    Ok(GridSpec {
        d: params.d,
        k,
        cells,
    })
}

fn segments_per_axis(params: &BoundParams) -> Result<u64> {
    let k = params.segments_real().ceil();
    if !k.is_finite() || k >= u64::MAX as f64 {
        return Err(Error::Overflow(format!(
            "segments per axis {k} exceed 64-bit range"
        )));
    }
    Ok((k as u64).max(1))
}

fn checked_cells(k: u64, d: u32) -> Result<u64> {
    match k.checked_pow(d) {
        Some(c) if c <= MAX_CELLS => Ok(c),
        _ => Err(Error::Overflow(format!(
            "{k}^{d} cells exceed 2^63; the grid cannot be simulated"
        ))),
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")))
    }
}

fn check_cells(cells: u64, min: u64) -> Result<()> {
    if cells < min {
        Err(Error::invalid(format!("need at least {min} cells, got {cells}")))
    } else {
        Ok(())
    }
}

fn to_count(value: f64) -> Result<u64> {
    // 2^64 as f64; anything at or above it does not fit.
    if !value.is_finite() || value >= 18_446_744_073_709_551_616.0 {
        return Err(Error::Overflow(format!(
            "sample count {value} exceeds 64-bit range"
        )));
    }
    Ok((value.ceil() as u64).max(1))
}

/// `ln(1 − 1/C̃)`; `-inf` for a single cell.
fn ln_miss(cells: u64) -> f64 {
    (-1.0 / cells as f64).ln_1p()
}

/// `M·ln(1 − 1/C̃)` with the `M = 0` case pinned to zero.
fn ln_q(cells: u64, m: u64) -> f64 {
    if m == 0 {
        0.0
    } else {
        m as f64 * ln_miss(cells)
    }
}

/// Single-cell miss probability `q = (1 − 1/C̃)^M`.
pub fn miss_probability(cells: u64, m: u64) -> f64 {
    ln_q(cells, m).exp()
}

/// Expected number of uncovered cells after `m` samples, `C̃·(1 − 1/C̃)^M`.
///
/// Panics if `cells == 0`.
pub fn expected_uncovered(cells: u64, m: u64) -> f64 {
    assert!(cells >= 1, "expected_uncovered needs at least one cell");
    if m == 0 {
        return cells as f64;
    }
    if cells == 1 {
        return 0.0;
    }
    ((cells as f64).ln() + ln_q(cells, m)).exp()
}

/// `Cov(Y_i, Y_j) = (1 − 2/C̃)^M − (1 − 1/C̃)^{2M}` for two distinct cells.
///
/// Evaluated as `(1 − 1/C̃)^{2M} · expm1(M·ln(1 − 1/(C̃ − 1)²))`, which keeps
/// the small negative difference exact to rounding.
pub fn covariance_pair(cells: u64, m: u64) -> Result<f64> {
    check_cells(cells, 2)?;
    if m == 0 {
        return Ok(0.0);
    }
    let both_missed = (2.0 * ln_q(cells, m)).exp();
    let cm1 = (cells - 1) as f64;
    let ratio_ln = (-1.0 / (cm1 * cm1)).ln_1p();
    Ok(both_missed * (m as f64 * ratio_ln).exp_m1())
}

/// Upper bound on `Var[Z]` obtained by dropping the negative covariances:
/// `C̃·q·(1 − q)`.
pub fn variance_upper_bound(cells: u64, m: u64) -> f64 {
    assert!(cells >= 1, "variance_upper_bound needs at least one cell");
    let lq = ln_q(cells, m);
    cells as f64 * lq.exp() * -lq.exp_m1()
}

/// Roots of `(2C̃ + δC̃²)q² − 2C̃(1 + δ)q + δ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticRoots {
    pub q1: f64,
    pub q2: f64,
    pub discriminant: f64,
}

/// Coefficients `(a, b, c)` of the quadratic in the form `a·q² − b·q + c`.
pub fn quadratic_coefficients(cells: u64, delta: f64) -> (f64, f64, f64) {
    let c = cells as f64;
    (2.0 * c + delta * c * c, 2.0 * c * (1.0 + delta), delta)
}

/// Solves the Chebyshev quadratic. `q1` uses the conjugate form
/// `2δ / (b + √Δ)`; the textbook `(b − √Δ)/(2a)` cancels catastrophically
/// for small δ.
pub fn q_roots(cells: u64, delta: f64) -> Result<QuadraticRoots> {
    check_cells(cells, 1)?;
    check_delta(delta)?;
    let c = cells as f64;
    let (a, b, _) = quadratic_coefficients(cells, delta);
    let discriminant = 4.0 * c * c + 8.0 * c * delta * (c - 1.0);
    let root = discriminant.sqrt();
    Ok(QuadraticRoots {
        q1: 2.0 * delta / (b + root),
        q2: (b + root) / (2.0 * a),
        discriminant,
    })
}

/// Evaluates `C̃q(1 − q)/(1 − C̃q)² ≤ δ/2` at `q = (1 − 1/C̃)^M`.
///
/// Returns `false` whenever `E[Z] ≥ 1`, where the one-sided bound says nothing.
pub fn chebyshev_condition(cells: u64, m: u64, delta: f64) -> bool {
    if cells == 0 || m == 0 {
        return false;
    }
    let lq = ln_q(cells, m);
    let ln_ez = (cells as f64).ln() + lq;
    if ln_ez >= 0.0 {
        return false;
    }
    let variance = cells as f64 * lq.exp() * -lq.exp_m1();
    let gap = -ln_ez.exp_m1();
    variance / (gap * gap) <= delta / 2.0
}

/// Exact Chebyshev-based bound `⌈ln q1 / ln(1 − 1/C̃)⌉`. A single cell needs one sample.
pub fn sample_bound_exact(cells: u64, delta: f64) -> Result<u64> {
    check_cells(cells, 1)?;
    check_delta(delta)?;
    if cells == 1 {
        return Ok(1);
    }
    let roots = q_roots(cells, delta)?;
    to_count(roots.q1.ln() / ln_miss(cells))
}

/// Logarithmic approximation `⌈C̃·ln(2C̃/δ)⌉`. One cell needs one sample.
pub fn sample_bound_approx(cells: u64, delta: f64) -> Result<u64> {
    check_cells(cells, 1)?;
    check_delta(delta)?;
    if cells == 1 {
        return Ok(1);
    }
    let c = cells as f64;
    to_count(c * (std::f64::consts::LN_2 + c.ln() - delta.ln()))
}

/// Classical coupon-collector comparator `⌈(C̃/δ)·ln(2C̃)⌉`; one cell needs one sample.
pub fn sample_bound_classic(cells: u64, delta: f64) -> Result<u64> {
    check_cells(cells, 1)?;
    check_delta(delta)?;
    if cells == 1 {
        return Ok(1);
    }
    let c = cells as f64;
    to_count(c / delta * (2.0 * c).ln())
}

/// Relative saving `1 − m_ours / m_classic`. Negative when `m_ours` is larger.
pub fn improvement(m_ours: u64, m_classic: u64) -> f64 {
    1.0 - m_ours as f64 / m_classic as f64
}

/// Every bound for one `(C̃, δ)` pair plus the quadratic intermediates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSet {
    pub cells: u64,
    pub delta: f64,
    pub m_exact: u64,
    pub m_approx: u64,
    pub m_classic: u64,
    pub q1: f64,
    pub q2: f64,
    pub discriminant: f64,
}

impl BoundSet {
    pub fn compute(cells: u64, delta: f64) -> Result<Self> {
        let roots = q_roots(cells, delta)?;
        Ok(BoundSet {
            cells,
            delta,
            m_exact: sample_bound_exact(cells, delta)?,
            m_approx: sample_bound_approx(cells, delta)?,
            m_classic: sample_bound_classic(cells, delta)?,
            q1: roots.q1,
            q2: roots.q2,
            discriminant: roots.discriminant,
        })
    }

    pub fn for_params(params: &BoundParams) -> Result<(GridSpec, Self)> {
        let grid = subcube_count(params)?;
        let set = BoundSet::compute(grid.cells, params.delta)?;
        Ok((grid, set))
    }

    /// Improvement of the approximate bound over the classical one.
    pub fn improvement(&self) -> f64 {
        improvement(self.m_approx, self.m_classic)
    }
}

/// Natural logs of the grid size and of the approximate and classical
/// bounds. Usable when `k^d` itself overflows 64 bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogBounds {
    pub ln_cells: f64,
    pub ln_m_approx: f64,
    pub ln_m_classic: f64,
}

pub fn log_space_bounds(params: &BoundParams) -> Result<LogBounds> {
    params.validate()?;
    let k = params.segments_real().ceil().max(1.0);
    let ln_cells = f64::from(params.d) * k.ln();
    let ln2 = std::f64::consts::LN_2;
    if ln_cells == 0.0 {
        return Ok(LogBounds {
            ln_cells,
            ln_m_approx: 0.0,
            ln_m_classic: 0.0,
        });
    }
    Ok(LogBounds {
        ln_cells,
        ln_m_approx: ln_cells + (ln2 + ln_cells - params.delta.ln()).ln(),
        ln_m_classic: ln_cells - params.delta.ln() + (ln2 + ln_cells).ln(),
    })
}
