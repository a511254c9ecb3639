//! Draws uniform samples until every cell of the benchmark grid is hit, and
//! compares the observed coverage times with the closed-form bounds.

use gridcover::bounds::BoundParams;
use gridcover::montecarlo::expected_coverage_time;
use gridcover::{BoundSet, Experiment, TrialConfig};

fn main() -> gridcover::Result<()> {
    let params = BoundParams::benchmark();
    let (grid, set) = BoundSet::for_params(&params)?;
    let config = TrialConfig::new(params).with_trials(64).with_seed(7);
    let experiment = Experiment::new(&config)?;

    let results = experiment.coverage_trials(Some(set.m_exact));
    let times: Vec<u64> = results.iter().filter_map(|r| r.m_actual).collect();
    let mean = times.iter().sum::<u64>() as f64 / times.len() as f64;

    println!("{} cells, {} trials", grid.cells, results.len());
    println!("coverage time: min {}, mean {mean:.0}, max {}", times.iter().min().unwrap(), times.iter().max().unwrap());
    println!("expected (C·H_C): {:.0}", expected_coverage_time(grid.cells));
    println!("mean / m_approx = {:.3}", mean / set.m_approx as f64);

    let failed = results.iter().filter(|r| r.z_at_m.is_some_and(|z| z > 0)).count();
    println!("uncovered after m_exact = {}: {failed}/{} trials (δ = {})", set.m_exact, results.len(), params.delta);
    Ok(())
}
