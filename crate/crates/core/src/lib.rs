//! Sample-complexity toolkit for uniform coverage of the unit hypercube.
//!
//! Splitting `[0,1]^d` into `C̃ = ⌈2L̃√d/ε⌉^d` cells, the crate computes how
//! many i.i.d. uniform samples guarantee that every cell is hit with
//! probability at least `1 − δ/2`:
//!
//! - [`bounds`]: closed-form exact (Chebyshev quadratic), approximate
//!   `C̃·ln(2C̃/δ)` and classical coupon-collector sample sizes;
//! - [`grid`]: point-to-cell indexing and bitset coverage tracking;
//! - [`montecarlo`]: seeded, parallel coverage trials plus an exact
//!   inclusion–exclusion oracle for small grids;
//! - [`sweep`] and [`report`]: one-parameter studies with CSV/JSON output;
//! - [`verify`]: certificates bounding the supremum of a Lipschitz function
//!   by its sampled maximum plus `ε/2`;
//! - [`cli`]: the `gridcover` command line.
//!
//! ```
//! use gridcover::bounds::{BoundParams, BoundSet};
//!
//! let params = BoundParams::new(2, 0.05, 0.01, 1.0).unwrap();
//! let (grid, set) = BoundSet::for_params(&params).unwrap();
//! assert_eq!(grid.cells, 3249);
//! assert_eq!(set.m_approx, 43_486);
//! ```

pub mod bounds;
pub mod cli;
pub mod error;
pub mod grid;
pub mod montecarlo;
pub mod report;
pub mod sweep;
pub mod verify;

pub use bounds::{BoundParams, BoundSet, GridSpec};
pub use error::{Error, Result};
pub use grid::{CellIndex, CoverageState};
pub use montecarlo::{Experiment, TrialConfig, TrialResult};
pub use sweep::{run_sweep, SweepParam, SweepPlan, SweepReport};
pub use verify::{certify_sup, Certificate, TargetFunction};
