//! Wider grids for each swept parameter, 20 trials per point, as JSON on stdout.
//! The ε sweep reaches 1.5 million cells, so this takes a while.
//!
//! ```text
//! cargo run --release --example supplement_sweeps > supplement.json
//! ```

use std::io;

use gridcover::report::emit_json;
use gridcover::run_sweep;
use gridcover::sweep::supplement_sweeps;

fn main() -> gridcover::Result<()> {
    for plan in supplement_sweeps() {
        let plan = plan.with_max_cells(10_000_000);
        let report = run_sweep(&plan)?;
        let s = &report.summary;
        eprintln!(
            "{:?}: {} points, grand mean ratio {:.3}, improvement {:.3}..{:.3}",
            plan.vary,
            report.points.len(),
            s.grand_mean_ratio.unwrap_or(f64::NAN),
            s.min_improvement.unwrap_or(f64::NAN),
            s.max_improvement.unwrap_or(f64::NAN),
        );
        emit_json(&report, io::stdout().lock())?;
    }
    Ok(())
}
