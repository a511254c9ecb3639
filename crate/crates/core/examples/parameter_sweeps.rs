//! The three one-at-a-time studies around the benchmark (d = 2, ε = 0.1,
//! δ = 0.1, L̃ = 1), written as CSV into `target/sweeps/`.

use std::fs::{self, File};
use std::path::Path;

use gridcover::report::emit_csv;
use gridcover::{run_sweep, SweepPlan};

fn main() -> gridcover::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../target/sweeps");
    fs::create_dir_all(&dir)?;

    for (name, plan) in [
        ("dimension", SweepPlan::dimension_study()),
        ("epsilon", SweepPlan::epsilon_study()),
        ("delta", SweepPlan::delta_study()),
    ] {
        let report = run_sweep(&plan)?;
        let path = dir.join(format!("{name}.csv"));
        emit_csv(&report, File::create(&path)?)?;

        println!("{name}: {}", path.display());
        for p in &report.points {
            println!(
                "  {:<8} cells {:>6}  m_approx {:>7}  m_classic {:>8}  mean ratio {:.3}  improvement {:.3}",
                p.value,
                p.grid.cells,
                p.bounds.m_approx,
                p.bounds.m_classic,
                p.mean_ratio().unwrap_or(f64::NAN),
                p.improvement()
            );
        }
        let s = &report.summary;
        println!("  grand mean ratio {:.3}", s.grand_mean_ratio.unwrap_or(f64::NAN));
    }
    Ok(())
}
