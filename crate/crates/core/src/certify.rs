//! Certified counting-function bounds and the bisection driver.
//!
//! For a refinement level `m` the finite block of the pencil sandwiches the
//! counting function: `ind A(lambda) <= ind F(lambda) <= ind(A(lambda) - eps)`
//! with `eps = 2 lambda^2 theta^{2m} ||P||^2`, valid whenever
//! `lambda^2 theta^{2m} ||P||^2 < 1/4`. A side test for the n-th positive
//! eigenvalue escalates `m` until one of the two counts resolves; bisection
//! over certified endpoints then brackets the eigenvalue to any width.

use serde::Serialize;

use crate::inertia::inertia;
use crate::pencil::assemble;
use crate::scalar::Rational;
use crate::selfsim::{MomentData, SimilaritySet, SIZE_CAP};
use crate::Error;

/// Two-sided bound on the counting function at one `lambda` and level `m`.
#[derive(Clone, Debug, Serialize)]
pub struct CountingBounds {
    pub lambda: Rational,
    /// Certified `ind A(lambda) <= ind F(lambda)`.
    pub lower: usize,
    /// Certified `ind F(lambda) <= ind(A(lambda) - eps)`.
    pub upper: usize,
    pub m_used: usize,
    pub epsilon_used: Rational,
    /// True when the margin condition `lambda^2 theta^{2m} ||P||^2 < 1/4`
    /// held; otherwise `lower`/`upper` are the trivial pair (0, dim).
    pub conclusive_margin: bool,
}

/// Outcome of a one-sided test against the n-th positive eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `nu_n >= lambda`.
    Below,
    /// `nu_n <= lambda`.
    Above,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BracketStatus {
    Certified,
    NotFoundUpTo(Rational),
    RefinementExhausted,
}

/// One entry of the certificate log: everything needed to re-verify a
/// single counting test by independent means.
#[derive(Clone, Debug, Serialize)]
pub struct TestRecord {
    pub lambda: Rational,
    pub m: usize,
    pub epsilon: Rational,
    pub lower: usize,
    pub upper: usize,
}

/// Certified bracket for the n-th positive eigenvalue.
#[derive(Clone, Debug, Serialize)]
pub struct EigenvalueBracket {
    pub n: usize,
    pub lo: Rational,
    pub hi: Rational,
    pub status: BracketStatus,
    pub log: Vec<TestRecord>,
}

/// Largest refinement level whose piece count stays within [`SIZE_CAP`].
pub fn max_refinement_level(s: &SimilaritySet) -> usize {
    let n = s.n_pieces();
    let mut pieces = n;
    let mut m = 1;
    while pieces.checked_mul(n).map_or(false, |p| p <= SIZE_CAP) {
        pieces *= n;
        m += 1;
    }
    m
}

struct LevelOutcome {
    bounds: CountingBounds,
    /// A Galerkin matrix was exactly singular; the level is treated as
    /// inconclusive so the caller moves the test point or refines.
    singular: bool,
}

fn counting_bounds_detail(
    s: &SimilaritySet,
    mom: &MomentData,
    lambda: &Rational,
    m: usize,
) -> Result<LevelOutcome, Error> {
    assert!(lambda.is_positive(), "lambda must be positive");
    assert!(m >= 1, "refinement level must be at least 1");
    let refined = s.iterate(m)?;
    let theta_m = refined.theta_sq();
    let margin = &(&(lambda * lambda) * theta_m) * &mom.norm_sq;
    let epsilon = &Rational::from_integer(2) * &margin;
    let quarter = Rational::from_ratio(1, 4);
    let dim = refined.n_pieces() - 1;
    if margin >= quarter {
        return Ok(LevelOutcome {
            bounds: CountingBounds {
                lambda: lambda.clone(),
                lower: 0,
                upper: dim,
                m_used: m,
                epsilon_used: epsilon,
                conclusive_margin: false,
            },
            singular: false,
        });
    }
    let plain = inertia(&assemble(&refined, mom, lambda, &Rational::zero()));
    let shifted = inertia(&assemble(&refined, mom, lambda, &epsilon));
    Ok(LevelOutcome {
        bounds: CountingBounds {
            lambda: lambda.clone(),
            lower: plain.negatives,
            upper: shifted.negatives,
            m_used: m,
            epsilon_used: epsilon,
            conclusive_margin: true,
        },
        singular: plain.zeros > 0 || shifted.zeros > 0,
    })
}

/// Counting-function bounds at one `lambda` and refinement level `m`.
pub fn counting_bounds(
    s: &SimilaritySet,
    mom: &MomentData,
    lambda: &Rational,
    m: usize,
) -> Result<CountingBounds, Error> {
    counting_bounds_detail(s, mom, lambda, m).map(|o| o.bounds)
}

/// Smallest level at which the margin condition holds, if any within cap.
fn first_conclusive_level(
    s: &SimilaritySet,
    mom: &MomentData,
    lambda: &Rational,
    m_max: usize,
) -> Option<usize> {
    let quarter = Rational::from_ratio(1, 4);
    let mut q = &(&(lambda * lambda) * s.theta_sq()) * &mom.norm_sq;
    let mut m = 1;
    while q >= quarter {
        if m >= m_max {
            return None;
        }
        m += 1;
        q = &q * s.theta_sq();
    }
    Some(m)
}

fn test_side_logged(
    s: &SimilaritySet,
    mom: &MomentData,
    lambda: &Rational,
    n: usize,
    m_max: usize,
    log: &mut Vec<TestRecord>,
) -> Result<Verdict, Error> {
    assert!(n >= 1, "eigenvalue index must be at least 1");
    let m_cap = m_max.min(max_refinement_level(s));
    let Some(m0) = first_conclusive_level(s, mom, lambda, m_cap) else {
        return Ok(Verdict::Inconclusive);
    };
    for m in m0..=m_cap {
        let out = counting_bounds_detail(s, mom, lambda, m)?;
        log.push(TestRecord {
            lambda: out.bounds.lambda.clone(),
            m,
            epsilon: out.bounds.epsilon_used.clone(),
            lower: out.bounds.lower,
            upper: out.bounds.upper,
        });
        if out.singular {
            continue;
        }
        if out.bounds.upper < n {
            return Ok(Verdict::Below);
        }
        if out.bounds.lower >= n {
            return Ok(Verdict::Above);
        }
    }
    Ok(Verdict::Inconclusive)
}

/// Decide on which side of the n-th positive eigenvalue `lambda` lies,
/// escalating the refinement level up to `m_max`.
pub fn test_side(
    s: &SimilaritySet,
    mom: &MomentData,
    lambda: &Rational,
    n: usize,
    m_max: usize,
) -> Result<Verdict, Error> {
    let mut log = Vec::new();
    test_side_logged(s, mom, lambda, n, m_max, &mut log)
}

/// Bracket the n-th positive eigenvalue to width `width_tol`.
///
/// Exponential search (factor 2, capped at `lambda_max`) establishes
/// certified endpoints; bisection then shrinks the interval, falling back
/// to the 1/3 and 2/3 points of the current interval when a midpoint test
/// is inconclusive.
pub fn bracket_eigenvalue(
    s: &SimilaritySet,
    mom: &MomentData,
    n: usize,
    width_tol: &Rational,
    lambda_max: &Rational,
    m_max: usize,
) -> Result<EigenvalueBracket, Error> {
    assert!(n >= 1, "eigenvalue index must be at least 1");
    assert!(width_tol.is_positive(), "width tolerance must be positive");
    assert!(lambda_max.is_positive(), "lambda_max must be positive");
    let mut log = Vec::new();
    let two = Rational::from_integer(2);

    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    let mut lam = Rational::one();
    while lam <= *lambda_max {
        match test_side_logged(s, mom, &lam, n, m_max, &mut log)? {
            Verdict::Above => {
                hi = Some(lam);
                break;
            }
            Verdict::Below => lo = Some(lam.clone()),
            Verdict::Inconclusive => {}
        }
        lam = &lam * &two;
    }
    let Some(mut hi) = hi else {
        return Ok(EigenvalueBracket {
            n,
            lo: lo.unwrap_or_else(Rational::zero),
            hi: lambda_max.clone(),
            status: BracketStatus::NotFoundUpTo(lambda_max.clone()),
            log,
        });
    };
    let mut lo = match lo {
        Some(l) => l,
        None => {
            // the positive spectrum is positive, so 0 is always a sound
            // left end; try to certify something better first
            let mut found = Rational::zero();
            let mut lam = &hi / &two;
            for _ in 0..128 {
                match test_side_logged(s, mom, &lam, n, m_max, &mut log)? {
                    Verdict::Below => {
                        found = lam;
                        break;
                    }
                    Verdict::Above => {
                        hi = lam.clone();
                        lam = &lam / &two;
                    }
                    Verdict::Inconclusive => lam = &lam / &two,
                }
            }
            found
        }
    };

    while &(&hi - &lo) > width_tol {
        let width = &hi - &lo;
        let third = &width / &Rational::from_integer(3);
        let candidates = [
            &lo + &(&width / &two),
            &lo + &third,
            &lo + &(&third * &two),
        ];
        let mut progressed = false;
        for cand in candidates {
            match test_side_logged(s, mom, &cand, n, m_max, &mut log)? {
                Verdict::Below => {
                    lo = cand;
                    progressed = true;
                    break;
                }
                Verdict::Above => {
                    hi = cand;
                    progressed = true;
                    break;
                }
                Verdict::Inconclusive => {}
            }
        }
        if !progressed {
            return Ok(EigenvalueBracket {
                n,
                lo,
                hi,
                status: BracketStatus::RefinementExhausted,
                log,
            });
        }
    }
    Ok(EigenvalueBracket {
        n,
        lo,
        hi,
        status: BracketStatus::Certified,
        log,
    })
}

/// Bracket the n-th negative eigenvalue of the original problem by solving
/// the reflected problem (weight negated) and negating the interval.
pub fn negative_eigenvalues(
    s: &SimilaritySet,
    mom: &MomentData,
    n: usize,
    width_tol: &Rational,
    lambda_max: &Rational,
    m_max: usize,
) -> Result<EigenvalueBracket, Error> {
    let reflected = s.reflect();
    let rmom = MomentData {
        p0: -&mom.p0,
        p1: -&mom.p1,
        norm_sq: mom.norm_sq.clone(),
    };
    let br = bracket_eigenvalue(&reflected, &rmom, n, width_tol, lambda_max, m_max)?;
    Ok(EigenvalueBracket {
        n: br.n,
        lo: -&br.hi,
        hi: -&br.lo,
        status: br.status,
        log: br.log,
    })
}
