//! Sup-certification of Lipschitz functions from uniform samples.
//!
//! With `k = ⌈2L̃√d/ε⌉` segments per axis a cell has Euclidean diameter
//! `√d/k ≤ ε/(2L̃)`, so a function with Lipschitz constant at most `L̃` varies
//! by at most `ε/2` inside any cell. Once every cell holds a sample, the
//! supremum over `[0,1]^d` is at most the sampled maximum plus `ε/2`. Drawing
//! `M = ⌈C̃·ln(2C̃/δ)⌉` points makes full coverage fail with probability at
//! most `δ/2`, which is the confidence attached to the certificate.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{sample_bound_approx, subcube_count, BoundParams};
use crate::error::{Error, Result};
use crate::montecarlo::trial_rng;

type Evaluator = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Points evaluated per batch; each batch is drawn serially, then evaluated.
const BATCH: usize = 4096;

/// A function on `[0,1]^d` with a declared Lipschitz constant.
#[derive(Clone)]
pub struct TargetFunction {
    pub name: String,
    pub declared_lipschitz: f64,
    /// Supremum over the unit cube, when known in closed form.
    pub known_sup: Option<f64>,
    /// Whether the evaluator may be called from several threads at once.
    pub concurrent: bool,
    evaluator: Arc<Evaluator>,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("name", &self.name)
            .field("declared_lipschitz", &self.declared_lipschitz)
            .field("known_sup", &self.known_sup)
            .field("concurrent", &self.concurrent)
            .finish_non_exhaustive()
    }
}

impl TargetFunction {
    pub fn new<F>(name: impl Into<String>, declared_lipschitz: f64, f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        TargetFunction {
            name: name.into(),
            declared_lipschitz,
            known_sup: None,
            concurrent: true,
            evaluator: Arc::new(f),
        }
    }

    pub fn with_known_sup(mut self, sup: f64) -> Self {
        self.known_sup = Some(sup);
        self
    }

    /// Forces evaluation onto a single thread.
    pub fn serial(mut self) -> Self {
        self.concurrent = false;
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }

    /// `f(x) = c`. Any positive Lipschitz constant is valid; 1 is declared.
    pub fn constant(c: f64) -> Self {
        TargetFunction::new("constant", 1.0, move |_| c).with_known_sup(c)
    }

    /// `f(x) = a·x₁ + b`, Lipschitz constant `|a|`.
    pub fn affine(a: f64, b: f64) -> Self {
        TargetFunction::new("affine", a.abs().max(f64::MIN_POSITIVE), move |x: &[f64]| a * x[0] + b)
            .with_known_sup(b + a.max(0.0))
    }

    /// `f(x) = −‖x − centre‖₂`, Lipschitz constant 1, supremum 0 at the centre.
    pub fn negdist() -> Self {
        TargetFunction::new("negdist", 1.0, |x: &[f64]| {
            -x.iter().map(|xi| (xi - 0.5).powi(2)).sum::<f64>().sqrt()
        })
        .with_known_sup(0.0)
    }

    /// `f(x) = Π sin(π·x_i)`, supremum 1 at the centre. Each partial derivative
    /// is bounded by π, so `π·√d` is a valid Lipschitz constant.
    pub fn sinprod(d: u32) -> Self {
        TargetFunction::new("sinprod", PI * f64::from(d).sqrt(), |x: &[f64]| {
            x.iter().map(|xi| (PI * xi).sin()).product()
        })
        .with_known_sup(1.0)
    }
}

/// The builtin registry for dimension `d`: `constant` (c = 1), `affine`
/// (a = 2, b = 0), `negdist`, `sinprod`.
pub fn builtin_functions(d: u32) -> Vec<TargetFunction> {
    vec![
        TargetFunction::constant(1.0),
        TargetFunction::affine(2.0, 0.0),
        TargetFunction::negdist(),
        TargetFunction::sinprod(d),
    ]
}

pub fn builtin(name: &str, d: u32) -> Result<TargetFunction> {
    builtin_functions(d)
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownFunction(name.to_string()))
}

/// Statement that `sup f ≤ certified_sup_bound` over `[0,1]^d` with probability
/// at least `confidence`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub function: String,
    pub params: BoundParams,
    pub m_used: u64,
    pub sampled_max: f64,
    pub certified_sup_bound: f64,
    pub confidence: f64,
    pub seed: u64,
}

/// Samples `M = ⌈C̃·ln(2C̃/δ)⌉` uniform points and bounds the supremum of `f`.
pub fn certify_sup(f: &TargetFunction, params: &BoundParams, seed: u64) -> Result<Certificate> {
    params.validate()?;
    if params.lipschitz < f.declared_lipschitz {
        return Err(Error::LipschitzMismatch {
            declared: f.declared_lipschitz,
            supplied: params.lipschitz,
        });
    }
    let grid = subcube_count(params)?;
    let m = sample_bound_approx(grid.cells, params.delta)?;
    let d = params.d as usize;

    let mut rng = trial_rng(seed);
    let mut sampled_max = f64::NEG_INFINITY;
    let mut buf = vec![0.0; BATCH * d];
    let mut remaining = m;
    while remaining > 0 {
        let n = remaining.min(BATCH as u64) as usize;
        let points = &mut buf[..n * d];
        points.iter_mut().for_each(|x| *x = rng.gen::<f64>());
        let batch_max = if f.concurrent {
            points
                .par_chunks(d)
                .map(|x| f.eval(x))
                .reduce(|| f64::NEG_INFINITY, nan_max)
        } else {
            points.chunks(d).map(|x| f.eval(x)).fold(f64::NEG_INFINITY, nan_max)
        };
        if !batch_max.is_finite() {
            return Err(Error::Evaluation {
                function: f.name.clone(),
                value: batch_max,
            });
        }
        sampled_max = sampled_max.max(batch_max);
        remaining -= n as u64;
    }

    Ok(Certificate {
        function: f.name.clone(),
        params: *params,
        m_used: m,
        sampled_max,
        certified_sup_bound: sampled_max + params.epsilon / 2.0,
        confidence: 1.0 - params.delta / 2.0,
        seed,
    })
}

/// Max that propagates NaN and +∞ so that a bad evaluation is never hidden.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Largest observed `|f(x) − f(y)| / ‖x − y‖` over `pairs` random pairs.
pub fn observed_lipschitz(f: &TargetFunction, d: u32, pairs: usize, seed: u64) -> f64 {
    let mut rng = trial_rng(seed);
    let d = d as usize;
    let mut x = vec![0.0f64; d];
    let mut y = vec![0.0f64; d];
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        x.iter_mut().for_each(|v| *v = rng.gen());
        y.iter_mut().for_each(|v| *v = rng.gen());
        let dist = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if dist > 0.0 {
            worst = worst.max((f.eval(&x) - f.eval(&y)).abs() / dist);
        }
    }
    worst
}
