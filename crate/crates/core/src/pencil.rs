//! Assembly of the finite-dimensional pencil block in the hat basis.
//!
//! For a parameter set with `N` pieces the hat functions peaking at the
//! interior breakpoints span an `(N-1)`-dimensional subspace. On it the
//! shifted operator `A_S(lambda) - epsilon` has an exact symmetric
//! tridiagonal matrix whose entries are rational in the parameters, the
//! moments of the fixed point, `lambda` and `epsilon`.

use std::io::Write;

use crate::scalar::Rational;
use crate::selfsim::{MomentData, SimilaritySet};

/// Symmetric tridiagonal matrix stored as diagonal / off-diagonal arrays.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TridiagonalSymmetric {
    pub diag: Vec<Rational>,
    pub offdiag: Vec<Rational>,
}

impl TridiagonalSymmetric {
    pub fn new(diag: Vec<Rational>, offdiag: Vec<Rational>) -> Self {
        assert!(!diag.is_empty(), "dimension must be at least 1");
        assert_eq!(
            offdiag.len() + 1,
            diag.len(),
            "off-diagonal must be one shorter than diagonal"
        );
        TridiagonalSymmetric { diag, offdiag }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Debug dump as CSV rows `index,diag,offdiag` (last offdiag empty).
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,diag,offdiag")?;
        for i in 0..self.dim() {
            if i + 1 < self.dim() {
                writeln!(w, "{},{},{}", i + 1, self.diag[i], self.offdiag[i])?;
            } else {
                writeln!(w, "{},{},", i + 1, self.diag[i])?;
            }
        }
        Ok(())
    }
}

/// Assemble the exact matrix of `A_S(lambda) - epsilon` in the hat basis.
///
/// Diagonal entry `k` (1-based, `k = 1..N-1`):
/// `(1-eps)(1/a_k + 1/a_{k+1}) + lambda (2 d_{k+1}(P1 - P0) + 2 d_k P1 + beta_k - beta_{k+1})`.
/// Off-diagonal entry coupling `k` with `k-1` (`k = 2..N-1`):
/// `-(1-eps)/a_k - lambda d_k (2 P1 - P0)`.
///
/// `mom` must be the moments of `s` (or of any parameter set with the same
/// fixed point; the moments depend only on the fixed point).
pub fn assemble(
    s: &SimilaritySet,
    mom: &MomentData,
    lambda: &Rational,
    epsilon: &Rational,
) -> TridiagonalSymmetric {
    assert!(!epsilon.is_negative(), "epsilon must be nonnegative");
    let n = s.n_pieces();
    let a = s.widths();
    let d = s.scalings();
    let beta = s.offsets();
    let two = Rational::from_integer(2);
    let stiff_scale = &Rational::one() - epsilon;
    let p1_minus_p0 = &mom.p1 - &mom.p0;
    let two_p1 = &two * &mom.p1;
    let two_p1_minus_p0 = &two_p1 - &mom.p0;

    let mut diag = Vec::with_capacity(n - 1);
    let mut offdiag = Vec::with_capacity(n.saturating_sub(2));
    for k in 1..n {
        // a, d, beta indexed 0-based: piece k is a[k-1]
        let inv_sum = &a[k - 1].recip().expect("widths are positive")
            + &a[k].recip().expect("widths are positive");
        let weight_part = &(&(&two * &d[k]) * &p1_minus_p0)
            + &(&(&(&two * &d[k - 1]) * &mom.p1) + &(&beta[k - 1] - &beta[k]));
        diag.push(&(&stiff_scale * &inv_sum) + &(lambda * &weight_part));
        if k >= 2 {
            let e = -&(&(&stiff_scale * &a[k - 1].recip().expect("widths are positive"))
                + &(&(lambda * &d[k - 1]) * &two_p1_minus_p0));
            offdiag.push(e);
        }
    }
    // the k-th off-diagonal couples hats k and k-1; for N = 2 there is none
    TridiagonalSymmetric::new(diag, offdiag)
}
