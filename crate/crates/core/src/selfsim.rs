//! Self-similarity parameter sets and the fixed-point function they define.
//!
//! A parameter set `S = (N, a_k, d_k, beta_k)` describes an affine similarity
//! operator acting on `L_2[0,1]`: the unit interval is split into `N`
//! consecutive pieces of widths `a_k`, and a function is mapped to its
//! rescaled copies on the pieces, scaled vertically by `d_k` and offset by
//! `beta_k`. When the squared contraction ratio `theta^2 = sum a_k d_k^2`
//! is below one the operator has a unique fixed point `P`, whose
//! distributional derivative is the (generally singular, possibly signed)
//! weight of the boundary problem.

use serde::{Deserialize, Serialize};

use crate::scalar::Rational;
use crate::Error;

/// Hard cap on the number of pieces a refined parameter set may have.
pub const SIZE_CAP: usize = 1 << 20;

/// A validated self-similarity parameter set.
///
/// Immutable after construction; `alpha` (breakpoints) and `theta_sq` are
/// derived exactly on validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilaritySet {
    n_pieces: usize,
    a: Vec<Rational>,
    d: Vec<Rational>,
    beta: Vec<Rational>,
    alpha: Vec<Rational>,
    theta_sq: Rational,
}

/// Exact moments of the fixed point `P`: `p0 = int P`, `p1 = int P x`,
/// `norm_sq = int P^2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MomentData {
    pub p0: Rational,
    pub p1: Rational,
    pub norm_sq: Rational,
}

/// Piecewise-constant float approximation of the fixed point, for export
/// and plotting. Carries a Banach fixed-point error bound; never used on
/// the certification path.
#[derive(Clone, Debug)]
pub struct SampledFunction {
    pub breakpoints: Vec<Rational>,
    pub values: Vec<f64>,
    pub sup_error_bound: f64,
}

/// Exact piecewise-constant function on [0,1]. `breakpoints` has one more
/// entry than `values`, starts at 0 and ends at 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFunction {
    pub breakpoints: Vec<Rational>,
    pub values: Vec<Rational>,
}

/// JSON parameter-set document: `{"a": [...], "d": [...], "beta": [...]}`
/// with scalar literals ("1/3", "0.5", "2").
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParameterDoc {
    pub a: Vec<Rational>,
    pub d: Vec<Rational>,
    pub beta: Vec<Rational>,
}

impl SimilaritySet {
    /// Validate raw parameter lists and derive breakpoints and `theta^2`.
    pub fn new(
        a: Vec<Rational>,
        d: Vec<Rational>,
        beta: Vec<Rational>,
    ) -> Result<Self, Error> {
        let n = a.len();
        if n < 2 {
            return Err(Error::Validation(format!(
                "need at least 2 pieces, got {n}"
            )));
        }
        if d.len() != n || beta.len() != n {
            return Err(Error::Validation(format!(
                "parameter lists must have equal length: a has {}, d has {}, beta has {}",
                n,
                d.len(),
                beta.len()
            )));
        }
        for (k, w) in a.iter().enumerate() {
            if !w.is_positive() {
                return Err(Error::Validation(format!(
                    "piece width a[{k}] = {w} is not positive"
                )));
            }
        }
        let mut alpha = Vec::with_capacity(n + 1);
        let mut acc = Rational::zero();
        alpha.push(acc.clone());
        for w in &a {
            acc += w;
            alpha.push(acc.clone());
        }
        if alpha[n] != Rational::one() {
            return Err(Error::Validation(format!(
                "piece widths must sum to 1, got {}",
                alpha[n]
            )));
        }
        let mut theta_sq = Rational::zero();
        for (w, s) in a.iter().zip(&d) {
            theta_sq += &(w * &(s * s));
        }
        if theta_sq >= 1 {
            return Err(Error::Validation(format!(
                "not a contraction: theta^2 = {theta_sq} >= 1"
            )));
        }
        Ok(SimilaritySet {
            n_pieces: n,
            a,
            d,
            beta,
            alpha,
            theta_sq,
        })
    }

    pub fn from_doc(doc: &ParameterDoc) -> Result<Self, Error> {
        SimilaritySet::new(doc.a.clone(), doc.d.clone(), doc.beta.clone())
    }

    pub fn to_doc(&self) -> ParameterDoc {
        ParameterDoc {
            a: self.a.clone(),
            d: self.d.clone(),
            beta: self.beta.clone(),
        }
    }

    pub fn n_pieces(&self) -> usize {
        self.n_pieces
    }

    pub fn widths(&self) -> &[Rational] {
        &self.a
    }

    pub fn scalings(&self) -> &[Rational] {
        &self.d
    }

    pub fn offsets(&self) -> &[Rational] {
        &self.beta
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.alpha
    }

    pub fn theta_sq(&self) -> &Rational {
        &self.theta_sq
    }

    /// Composition `G_self . G_inner`, pieces ordered lexicographically by
    /// (outer piece, inner piece). When both operands share a fixed point,
    /// so does the composition.
    pub fn compose(&self, inner: &SimilaritySet) -> Result<SimilaritySet, Error> {
        let total = self
            .n_pieces
            .checked_mul(inner.n_pieces)
            .filter(|&t| t <= SIZE_CAP)
            .ok_or(Error::SizeCapExceeded {
                pieces: self.n_pieces.saturating_mul(inner.n_pieces),
                cap: SIZE_CAP,
            })?;
        let mut a = Vec::with_capacity(total);
        let mut d = Vec::with_capacity(total);
        let mut beta = Vec::with_capacity(total);
        for k in 0..self.n_pieces {
            for j in 0..inner.n_pieces {
                a.push(&self.a[k] * &inner.a[j]);
                d.push(&self.d[k] * &inner.d[j]);
                beta.push(&self.beta[k] + &(&self.d[k] * &inner.beta[j]));
            }
        }
        SimilaritySet::new(a, d, beta)
    }

    /// Parameter set of the m-fold iterate `G_S^m`: `N^m` pieces, same
    /// fixed point, `theta^2` raised to the m-th power.
    pub fn iterate(&self, m: usize) -> Result<SimilaritySet, Error> {
        assert!(m >= 1, "iteration count must be at least 1");
        let mut acc = self.clone();
        for _ in 1..m {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Parameter set of `-P`: offsets negated, widths and scalings kept.
    pub fn reflect(&self) -> SimilaritySet {
        SimilaritySet {
            n_pieces: self.n_pieces,
            a: self.a.clone(),
            d: self.d.clone(),
            beta: self.beta.iter().map(|b| -b).collect(),
            alpha: self.alpha.clone(),
            theta_sq: self.theta_sq.clone(),
        }
    }

    /// Exact moments of the fixed point.
    ///
    /// `p0` and `p1` come from the closed-form recurrences obtained by
    /// splitting the integral along the pieces and changing variables; the
    /// squared norm satisfies
    /// `(1 - theta^2) ||P||^2 = sum a_k (2 d_k beta_k p0 + beta_k^2)`.
    pub fn moments(&self) -> Result<MomentData, Error> {
        let one = Rational::one();
        let half = Rational::from_ratio(1, 2);

        let mut sum_ab = Rational::zero();
        let mut sum_ad = Rational::zero();
        let mut sum_aad = Rational::zero();
        for k in 0..self.n_pieces {
            sum_ab += &(&self.a[k] * &self.beta[k]);
            sum_ad += &(&self.a[k] * &self.d[k]);
            sum_aad += &(&(&self.a[k] * &self.a[k]) * &self.d[k]);
        }
        let den0 = &one - &sum_ad;
        if den0.is_zero() {
            return Err(Error::DegenerateMoments("sum a_k d_k = 1".into()));
        }
        let p0 = &sum_ab / &den0;

        let den1 = &one - &sum_aad;
        if den1.is_zero() {
            return Err(Error::DegenerateMoments("sum a_k^2 d_k = 1".into()));
        }
        let mut num1 = Rational::zero();
        for k in 0..self.n_pieces {
            let inner = &(&(&self.a[k] * &self.beta[k]) * &half)
                + &(&self.alpha[k] * &(&(&self.d[k] * &p0) + &self.beta[k]));
            num1 += &(&self.a[k] * &inner);
        }
        let p1 = &num1 / &den1;

        let mut num2 = Rational::zero();
        let two = Rational::from_integer(2);
        for k in 0..self.n_pieces {
            let inner = &(&(&(&two * &self.d[k]) * &self.beta[k]) * &p0)
                + &(&self.beta[k] * &self.beta[k]);
            num2 += &(&self.a[k] * &inner);
        }
        let norm_sq = &num2 / &(&one - &self.theta_sq);

        Ok(MomentData { p0, p1, norm_sq })
    }

    /// Apply the similarity operator to an exact step function.
    pub fn apply(&self, f: &StepFunction) -> Result<StepFunction, Error> {
        let total = self
            .n_pieces
            .checked_mul(f.values.len())
            .filter(|&t| t <= SIZE_CAP)
            .ok_or(Error::SizeCapExceeded {
                pieces: usize::MAX,
                cap: SIZE_CAP,
            })?;
        let mut breakpoints = Vec::with_capacity(total + 1);
        let mut values = Vec::with_capacity(total);
        breakpoints.push(Rational::zero());
        for k in 0..self.n_pieces {
            for (j, v) in f.values.iter().enumerate() {
                breakpoints.push(&self.alpha[k] + &(&self.a[k] * &f.breakpoints[j + 1]));
                values.push(&(&self.d[k] * v) + &self.beta[k]);
            }
        }
        // alpha_{k} + a_k * 1 == alpha_{k+1}, so the endpoint chain is exact
        Ok(StepFunction {
            breakpoints,
            values,
        })
    }

    /// Point evaluation of the fixed point by descending the piece tree.
    ///
    /// At a breakpoint the right-hand piece wins (except at x = 1). The
    /// accumulated vertical scale shrinks like products of `|d_k|`; the
    /// recursion stops once it is below `scale_tol`, bounding the error by
    /// `scale_tol * sup|P|`.
    pub fn fixed_point_value(&self, x: &Rational, scale_tol: f64) -> f64 {
        assert!(
            !x.is_negative() && *x <= 1,
            "evaluation point outside [0,1]"
        );
        let mut t = x.clone();
        let mut scale = 1.0f64;
        let mut offset = 0.0f64;
        for _ in 0..4096 {
            if scale.abs() < scale_tol {
                break;
            }
            let k = self.piece_of(&t);
            offset += scale * self.beta[k].to_f64();
            scale *= self.d[k].to_f64();
            t = &(&t - &self.alpha[k]) / &self.a[k];
        }
        offset
    }

    fn piece_of(&self, t: &Rational) -> usize {
        if *t >= 1 {
            return self.n_pieces - 1;
        }
        // binary search over the breakpoints
        let mut lo = 0;
        let mut hi = self.n_pieces;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if *t >= self.alpha[mid] {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Piecewise-constant approximation of the fixed point: the similarity
    /// operator applied `iterations` times to the zero function, restricted
    /// to a uniform grid of `grid` cells (cell midpoint values).
    pub fn sample(&self, iterations: usize, grid: usize) -> Result<SampledFunction, Error> {
        assert!(iterations >= 1, "need at least one iteration");
        assert!(grid >= 2, "need at least two grid cells");
        let mut f = StepFunction::zero();
        for _ in 0..iterations {
            f = self.apply(&f)?;
        }
        let g = Rational::from_integer(grid as i64);
        let mut breakpoints = Vec::with_capacity(grid + 1);
        let mut values = Vec::with_capacity(grid);
        for i in 0..=grid {
            breakpoints.push(&Rational::from_integer(i as i64) / &g);
        }
        for i in 0..grid {
            let mid = &Rational::from_ratio(2 * i as i64 + 1, 2) / &g;
            values.push(f.value_at(&mid).to_f64());
        }

        let theta = self.theta_sq.to_f64().sqrt();
        let beta_sup = self
            .beta
            .iter()
            .map(|b| b.to_f64().abs())
            .fold(0.0, f64::max);
        // outward-rounded Banach bound theta^it / (1 - theta) * ||G 0||_sup
        let mut bound = theta.powi(iterations as i32) / (1.0 - theta) * beta_sup;
        for _ in 0..4 {
            bound = bound.next_up();
        }
        Ok(SampledFunction {
            breakpoints,
            values,
            sup_error_bound: bound,
        })
    }
}

impl StepFunction {
    /// The zero function as a single piece.
    pub fn zero() -> Self {
        StepFunction {
            breakpoints: vec![Rational::zero(), Rational::one()],
            values: vec![Rational::zero()],
        }
    }

    pub fn value_at(&self, x: &Rational) -> &Rational {
        let mut lo = 0;
        let mut hi = self.values.len();
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if *x >= self.breakpoints[mid] {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        &self.values[lo]
    }

    pub fn integral(&self) -> Rational {
        let mut acc = Rational::zero();
        for (i, v) in self.values.iter().enumerate() {
            let w = &self.breakpoints[i + 1] - &self.breakpoints[i];
            acc += &(&w * v);
        }
        acc
    }

    /// Exact squared L2 norm.
    pub fn l2_norm_sq(&self) -> Rational {
        let mut acc = Rational::zero();
        for (i, v) in self.values.iter().enumerate() {
            let w = &self.breakpoints[i + 1] - &self.breakpoints[i];
            acc += &(&w * &(v * v));
        }
        acc
    }

    /// Pointwise difference on the common refinement of the two grids.
    pub fn sub(&self, other: &StepFunction) -> StepFunction {
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        let mut i = 0;
        let mut j = 0;
        breakpoints.push(Rational::zero());
        while i < self.values.len() && j < other.values.len() {
            values.push(&self.values[i] - &other.values[j]);
            let ri = &self.breakpoints[i + 1];
            let rj = &other.breakpoints[j + 1];
            let next = if ri <= rj {
                let b = ri.clone();
                i += 1;
                if rj == &b {
                    j += 1;
                }
                b
            } else {
                let b = rj.clone();
                j += 1;
                b
            };
            breakpoints.push(next);
        }
        StepFunction {
            breakpoints,
            values,
        }
    }
}

/// Well-known parameter sets used throughout the test suites.
pub mod presets {
    use super::SimilaritySet;
    use crate::scalar::Rational;

    /// Fixed point `P(x) = x`, i.e. the classical weight `rho = 1`.
    pub fn lebesgue() -> SimilaritySet {
        SimilaritySet::new(
            vec![Rational::from_ratio(1, 2), Rational::from_ratio(1, 2)],
            vec![Rational::from_ratio(1, 2), Rational::from_ratio(1, 2)],
            vec![Rational::zero(), Rational::from_ratio(1, 2)],
        )
        .expect("lebesgue preset is valid")
    }

    /// The Cantor ladder (devil's staircase); its derivative is the
    /// singular Cantor measure.
    pub fn cantor() -> SimilaritySet {
        let third = Rational::from_ratio(1, 3);
        SimilaritySet::new(
            vec![third.clone(), third.clone(), third],
            vec![
                Rational::from_ratio(1, 2),
                Rational::zero(),
                Rational::from_ratio(1, 2),
            ],
            vec![
                Rational::zero(),
                Rational::from_ratio(1, 2),
                Rational::from_ratio(1, 2),
            ],
        )
        .expect("cantor preset is valid")
    }

    /// Sign-changing weight: spectrum on both sides of zero.
    pub fn indefinite() -> SimilaritySet {
        SimilaritySet::new(
            vec![Rational::from_ratio(1, 2), Rational::from_ratio(1, 2)],
            vec![Rational::from_ratio(1, 2), Rational::from_ratio(-1, 2)],
            vec![Rational::zero(), Rational::from_ratio(1, 2)],
        )
        .expect("indefinite preset is valid")
    }
}
