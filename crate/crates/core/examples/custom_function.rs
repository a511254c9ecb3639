//! Certifying a user-supplied function. Marking it serial keeps every
//! evaluation on the calling thread.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use gridcover::bounds::BoundParams;
use gridcover::verify::observed_lipschitz;
use gridcover::{certify_sup, Error, TargetFunction};

fn main() -> gridcover::Result<()> {
    // A bump peaking at (0.3, 0.7) with height 2. Steepest slope 20·e^{-1/2} ≈ 12.13 at radius 0.1.
    let bump = |x: &[f64]| {
        let r2 = (x[0] - 0.3).powi(2) + (x[1] - 0.7).powi(2);
        2.0 * (-r2 / 0.02).exp()
    };
    let calls = Arc::new(AtomicU64::new(0));
    let counter = Arc::clone(&calls);
    let f = TargetFunction::new("bump", 12.2, move |x: &[f64]| {
        counter.fetch_add(1, Ordering::Relaxed);
        bump(x)
    })
    .serial();

    println!("largest slope seen on 10k random pairs: {:.3}", observed_lipschitz(&f, 2, 10_000, 1));
    calls.store(0, Ordering::Relaxed);

    let params = BoundParams::new(2, 0.2, 0.05, 12.2)?;
    let cert = certify_sup(&f, &params, 3)?;
    println!("{} evaluations, sup ≤ {:.4} (true sup 2)", calls.load(Ordering::Relaxed), cert.certified_sup_bound);

    // Understating the function's constant is refused.
    match certify_sup(&f, &BoundParams::new(2, 0.2, 0.05, 1.0)?, 3) {
        Err(Error::LipschitzMismatch { declared, supplied }) => {
            println!("rejected: declared L = {declared}, supplied {supplied}")
        }
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
