//! Sample sizes for a Lipschitz function on the unit square at ε = 0.05, δ = 0.01.
//!
//! ```text
//! cargo run --example headline_bound
//! ```

use gridcover::bounds::{log_space_bounds, BoundParams, BoundSet};

fn main() -> gridcover::Result<()> {
    let params = BoundParams::new(2, 0.05, 0.01, 1.0)?;
    let (grid, set) = BoundSet::for_params(&params)?;

    println!("grid: k = {} per axis, {} cells", grid.k, grid.cells);
    println!("roots: q1 = {:.6e}, q2 = {:.6e}", set.q1, set.q2);
    println!("m_exact   = {}", set.m_exact);
    println!("m_approx  = {}", set.m_approx);
    println!("m_classic = {}", set.m_classic);
    println!("improvement over the coupon-collector bound: {:.1}%", 100.0 * set.improvement());

    // Far past u64 the bounds are still available as logarithms.
    let huge = BoundParams::new(40, 0.001, 0.01, 1.0)?;
    let logs = log_space_bounds(&huge)?;
    println!(
        "d = 40, ε = 0.001: ln cells = {:.1}, ln m_approx = {:.1}, ln m_classic = {:.1}",
        logs.ln_cells, logs.ln_m_approx, logs.ln_m_classic
    );
    Ok(())
}
