//! Non-certified floating-point cross-check.
//!
//! The pencil matrix is affine in `lambda`, so a float Sturm count of its
//! negative eigenvalues locates the Galerkin approximations of the positive
//! spectrum by bisection in `lambda`. Galerkin values overestimate the true
//! eigenvalues, which makes this a one-sided sanity check on certificates.
//! Nothing here carries a proof.

use crate::pencil::assemble;
use crate::scalar::Rational;
use crate::selfsim::{MomentData, SimilaritySet};
use crate::Error;

/// Float estimate of the n-th positive eigenvalue at one mesh level.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct OracleEstimate {
    pub n: usize,
    pub value: f64,
    pub mesh_level: usize,
}

const PIVOT_GUARD: f64 = 1e-300;

/// Count negative pivots of `base + lambda * slope` (float LDL Sturm
/// sequence with a tiny-pivot guard).
fn negative_count(
    base_diag: &[f64],
    base_off: &[f64],
    slope_diag: &[f64],
    slope_off: &[f64],
    lambda: f64,
) -> usize {
    let n = base_diag.len();
    let mut count = 0;
    let mut pivot = base_diag[0] + lambda * slope_diag[0];
    if pivot < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let safe = if pivot.abs() < PIVOT_GUARD {
            if pivot >= 0.0 {
                PIVOT_GUARD
            } else {
                -PIVOT_GUARD
            }
        } else {
            pivot
        };
        let e = base_off[i - 1] + lambda * slope_off[i - 1];
        pivot = (base_diag[i] + lambda * slope_diag[i]) - e * e / safe;
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

/// Approximate the first `count` positive eigenvalues at `mesh_level`
/// refinements: the values of `lambda` where the float negative-inertia
/// count of the pencil block increments, each resolved to relative
/// precision 1e-9. Returns fewer entries when the count never reaches
/// `count` below `lambda_max`.
pub fn approx_eigenvalues(
    s: &SimilaritySet,
    mom: &MomentData,
    count: usize,
    mesh_level: usize,
    lambda_max: f64,
) -> Result<Vec<OracleEstimate>, Error> {
    assert!(count >= 1, "need at least one eigenvalue");
    let refined = s.iterate(mesh_level)?;
    let stiff = assemble(&refined, mom, &Rational::zero(), &Rational::zero());
    let at_one = assemble(&refined, mom, &Rational::one(), &Rational::zero());
    let base_diag: Vec<f64> = stiff.diag.iter().map(Rational::to_f64).collect();
    let base_off: Vec<f64> = stiff.offdiag.iter().map(Rational::to_f64).collect();
    let slope_diag: Vec<f64> = at_one
        .diag
        .iter()
        .zip(&stiff.diag)
        .map(|(a, b)| (a - b).to_f64())
        .collect();
    let slope_off: Vec<f64> = at_one
        .offdiag
        .iter()
        .zip(&stiff.offdiag)
        .map(|(a, b)| (a - b).to_f64())
        .collect();
    let count_at =
        |lam: f64| negative_count(&base_diag, &base_off, &slope_diag, &slope_off, lam);

    let mut estimates = Vec::with_capacity(count);
    let mut lo = 0.0f64; // stiffness alone is positive definite
    for n in 1..=count {
        // exponential search for a lambda with count >= n
        let mut hi = if lo > 0.0 { lo * 2.0 } else { 1.0 };
        while count_at(hi) < n {
            hi *= 2.0;
            if hi > lambda_max {
                return Ok(estimates);
            }
        }
        let mut a = lo;
        let mut b = hi;
        while b - a > 1e-9 * b.max(1.0) {
            let mid = 0.5 * (a + b);
            if count_at(mid) >= n {
                b = mid;
            } else {
                a = mid;
            }
        }
        let value = 0.5 * (a + b);
        estimates.push(OracleEstimate {
            n,
            value,
            mesh_level,
        });
        lo = a;
    }
    Ok(estimates)
}
