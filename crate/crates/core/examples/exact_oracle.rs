//! Exact probability that M draws leave some of C cells empty, next to the
//! Monte Carlo estimate and the Chebyshev sample bound.

use gridcover::bounds::sample_bound_exact;
use gridcover::montecarlo::exact_coverage_failure;
use gridcover::{Experiment, GridSpec};

fn main() -> gridcover::Result<()> {
    let delta = 0.1;
    for cells in [2u64, 6, 12, 24] {
        let m = sample_bound_exact(cells, delta)?;
        let exact = exact_coverage_failure(cells, m)?;
        let simulated = Experiment::on_grid(GridSpec::linear(cells)?, 100_000, cells)?.failure_rate(m);
        println!("C = {cells:>2}: M = {m:>4}, P(uncovered) exact {exact:.6}, simulated {simulated:.6}");
    }

    // Smallest M with failure probability at most δ, found from the oracle directly.
    let cells = 24;
    let mut m = cells;
    while exact_coverage_failure(cells, m)? > delta {
        m += 1;
    }
    println!("C = 24: the true minimum is M = {m}, the bound asks for {}", sample_bound_exact(cells, delta)?);
    Ok(())
}
