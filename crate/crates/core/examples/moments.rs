//! Mean of the uncovered count and the covariance of two cell indicators,
//! simulated against their closed forms. The covariance is always negative:
//! a sample landing in one cell is a sample not landing in the other.

use gridcover::bounds::{covariance_pair, expected_uncovered, variance_upper_bound};
use gridcover::{Experiment, GridSpec};

fn main() -> gridcover::Result<()> {
    println!("{:>4} {:>4} {:>10} {:>10} {:>11} {:>11} {:>9} {:>9}", "C", "M", "E[Z]", "mean Z", "cov", "sim cov", "± se", "Var ≤");
    for (cells, m) in [(5, 3), (5, 10), (10, 10), (10, 25), (20, 30), (20, 60)] {
        let experiment = Experiment::on_grid(GridSpec::linear(cells)?, 50_000, cells * 1000 + m)?;
        let mo = experiment.moments(m)?;
        println!(
            "{cells:>4} {m:>4} {:>10.4} {:>10.4} {:>11.3e} {:>11.3e} {:>9.1e} {:>9.3}",
            expected_uncovered(cells, m),
            mo.mean_z,
            covariance_pair(cells, m)?,
            mo.cov_pair,
            mo.se_cov_pair,
            variance_upper_bound(cells, m),
        );
    }
    Ok(())
}
