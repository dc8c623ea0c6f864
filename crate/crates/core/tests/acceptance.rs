//! Acceptance suite: end-to-end checks of the certified pipeline against
//! analytic ground truth and independent oracles. Each test prints a
//! pass/fail line; run with `--nocapture` to see them.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use selfsim_sturm::certify::{
    bracket_eigenvalue, counting_bounds, max_refinement_level, negative_eigenvalues,
    BracketStatus,
};
use selfsim_sturm::selfsim::presets::{cantor, indefinite, lebesgue};
use selfsim_sturm::{
    approx_eigenvalues, assemble, inertia, MomentData, Rational, SimilaritySet,
    TridiagonalSymmetric,
};

const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

fn r(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn example_sets() -> Vec<(&'static str, SimilaritySet)> {
    vec![
        ("lebesgue", lebesgue()),
        ("cantor", cantor()),
        ("indefinite", indefinite()),
    ]
}

#[test]
fn criterion_1_lebesgue_reproduction() {
    let s = lebesgue();
    let mom = s.moments().unwrap();
    for n in 1..=3usize {
        let start = Instant::now();
        let target = (n * n) as f64 * PI2;
        // rational tolerance just below 1e-3 * n^2 * pi^2
        let tol = &r((n * n) as i64, 1) * &r(9869, 1_000_000);
        let br = bracket_eigenvalue(&s, &mom, n, &tol, &r(200, 1), 14).unwrap();
        let elapsed = start.elapsed();
        assert_eq!(br.status, BracketStatus::Certified, "n = {n} not certified");
        assert!(
            br.lo.to_f64() < target && target < br.hi.to_f64(),
            "bracket [{}, {}] misses {target}",
            br.lo,
            br.hi
        );
        assert!(&br.hi - &br.lo <= tol);
        assert!(
            elapsed.as_secs() < 60,
            "n = {n} took {elapsed:?}, over the 60 s budget"
        );
        println!(
            "PASS criterion 1: n={n} bracket [{}, {}] contains {target:.7} ({elapsed:.2?})",
            br.lo.to_f64(),
            br.hi.to_f64()
        );
    }
}

#[test]
fn criterion_2_exact_structural_equality() {
    let s = lebesgue();
    let mom = s.moments().unwrap();
    for m in 1..=6usize {
        let refined = s.iterate(m).unwrap();
        let cells = 1usize << m;
        let h = r(1, cells as i64);
        let dim = cells - 1;
        let k_diag = &r(2, 1) / &h;
        let k_off = -&(&Rational::one() / &h);
        let m_diag = &(&r(2, 1) * &h) / &r(3, 1);
        let m_off = &h / &r(6, 1);
        for lam in [r(0, 1), r(1, 1), r(17, 3)] {
            let got = assemble(&refined, &mom, &lam, &Rational::zero());
            let want = TridiagonalSymmetric::new(
                vec![&k_diag - &(&lam * &m_diag); dim],
                vec![&k_off - &(&lam * &m_off); dim - 1],
            );
            assert_eq!(got, want, "m = {m}, lambda = {lam}");
        }
    }
    println!("PASS criterion 2: K - lambda*M equality for m = 1..6, lambda in {{0, 1, 17/3}}");
}

#[test]
fn criterion_3_moment_invariance() {
    for (name, s) in example_sets() {
        let mom = s.moments().unwrap();
        for m in 1..=4usize {
            assert_eq!(
                s.iterate(m).unwrap().moments().unwrap(),
                mom,
                "{name} at m = {m}"
            );
        }
    }
    println!("PASS criterion 3: moments invariant under iteration (m = 1..4, all sets)");
}

/// Midpoint quadrature of `P^2` on the 12-fold refined self-similar grid.
///
/// Independent of the moment recurrences: each depth-12 cell carries an
/// affine copy of `P`, so the cell-midpoint value is `scale * P(1/2) +
/// offset` with `P(1/2)` obtained by pointwise fixed-point recursion.
fn quadrature_norm_sq(s: &SimilaritySet, depth: usize) -> f64 {
    let mid_value = s.fixed_point_value(&r(1, 2), 1e-18);
    fn walk(
        s: &SimilaritySet,
        depth: usize,
        width: f64,
        scale: f64,
        offset: f64,
        mid_value: f64,
        acc: &mut f64,
    ) {
        if depth == 0 {
            let v = scale * mid_value + offset;
            *acc += width * v * v;
            return;
        }
        for k in 0..s.n_pieces() {
            walk(
                s,
                depth - 1,
                width * s.widths()[k].to_f64(),
                scale * s.scalings()[k].to_f64(),
                offset + scale * s.offsets()[k].to_f64(),
                mid_value,
                acc,
            );
        }
    }
    let mut acc = 0.0;
    walk(s, depth, 1.0, 1.0, 0.0, mid_value, &mut acc);
    acc
}

#[test]
fn criterion_4_norm_sq_oracle() {
    for (name, s) in example_sets() {
        let mom = s.moments().unwrap();
        let quad = quadrature_norm_sq(&s, 12);
        let exact = mom.norm_sq.to_f64();
        let err = (quad - exact).abs();
        assert!(
            err <= 1e-8,
            "{name}: quadrature {quad} vs recurrence {exact}, error {err:.3e}"
        );
        println!("PASS criterion 4: {name} norm_sq {exact:.12} matches quadrature (err {err:.2e})");
    }
    assert_eq!(lebesgue().moments().unwrap().norm_sq, r(1, 3));
    println!("PASS criterion 4: lebesgue norm_sq exactly 1/3");
}

// ---------------------------------------------------------------------------
// Independent inertia oracle: characteristic polynomial + Sturm chains.
// ---------------------------------------------------------------------------

type Poly = Vec<Rational>; // low-to-high coefficients, no trailing zeros

fn poly_trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

fn poly_deg(p: &Poly) -> usize {
    p.len() - 1
}

fn poly_is_zero(p: &Poly) -> bool {
    p.len() == 1 && p[0].is_zero()
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += &(x * y);
        }
    }
    poly_trim(out)
}

fn poly_sub(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Rational::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    poly_trim(out)
}

fn poly_derivative(p: &Poly) -> Poly {
    if p.len() == 1 {
        return vec![Rational::zero()];
    }
    poly_trim(
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| &Rational::from_integer(i as i64) * c)
            .collect(),
    )
}

/// Remainder of `a` divided by `b`.
fn poly_rem(a: &Poly, b: &Poly) -> Poly {
    let mut rem = a.clone();
    let lead = b.last().unwrap();
    while !poly_is_zero(&rem) && poly_deg(&rem) >= poly_deg(b) {
        let shift = poly_deg(&rem) - poly_deg(b);
        let factor = rem.last().unwrap() / lead;
        let mut sub = vec![Rational::zero(); shift];
        sub.extend(b.iter().map(|c| c * &factor));
        rem = poly_sub(&rem, &sub); // leading term cancels exactly, trim drops it
    }
    rem
}

fn poly_div_exact(a: &Poly, b: &Poly) -> Poly {
    let mut rem = a.clone();
    let lead = b.last().unwrap();
    let mut quot = vec![Rational::zero(); a.len().saturating_sub(b.len()) + 1];
    while !poly_is_zero(&rem) && poly_deg(&rem) >= poly_deg(b) {
        let shift = poly_deg(&rem) - poly_deg(b);
        let factor = rem.last().unwrap() / lead;
        quot[shift] = factor.clone();
        let mut sub = vec![Rational::zero(); shift];
        sub.extend(b.iter().map(|c| c * &factor));
        rem = poly_sub(&rem, &sub);
    }
    assert!(poly_is_zero(&rem), "not an exact division");
    poly_trim(quot)
}

fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    while !poly_is_zero(&y) {
        let r = poly_rem(&x, &y);
        x = y;
        y = r;
    }
    // make monic for stable exact division
    let lead = x.last().unwrap().clone();
    if !lead.is_zero() {
        for c in &mut x {
            *c = &*c / &lead;
        }
    }
    x
}

/// Sign variations of a Sturm chain at -infinity and at 0; their
/// difference counts distinct roots in (-inf, 0] (the chain head must not
/// vanish at 0).
fn sturm_distinct_negative_roots(p: &Poly) -> usize {
    assert!(!p[0].is_zero());
    let mut chain = vec![p.clone(), poly_derivative(p)];
    while !poly_is_zero(chain.last().unwrap()) {
        let k = chain.len();
        let rem = poly_rem(&chain[k - 2], &chain[k - 1]);
        chain.push(poly_trim(rem.iter().map(|c| -c).collect()));
    }
    chain.pop();
    let variations = |signs: Vec<i32>| {
        let nz: Vec<i32> = signs.into_iter().filter(|&s| s != 0).collect();
        nz.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let at_minus_inf = variations(
        chain
            .iter()
            .map(|q| {
                let s = q.last().unwrap().signum();
                if poly_deg(q) % 2 == 1 {
                    -s
                } else {
                    s
                }
            })
            .collect(),
    );
    let at_zero = variations(chain.iter().map(|q| q[0].signum()).collect());
    at_minus_inf - at_zero
}

/// Negative/zero/positive eigenvalue counts from the characteristic
/// polynomial, with multiplicity via repeated square-free reduction.
fn eigen_sign_counts_oracle(t: &TridiagonalSymmetric) -> (usize, usize, usize) {
    // char poly of leading blocks: chi_i = (d_i - x) chi_{i-1} - e_{i-1}^2 chi_{i-2}
    let n = t.dim();
    let mut prev2: Poly = vec![Rational::one()];
    let mut prev1: Poly = vec![t.diag[0].clone(), -Rational::one()];
    for i in 1..n {
        let lin = vec![t.diag[i].clone(), -Rational::one()];
        let e2 = &t.offdiag[i - 1] * &t.offdiag[i - 1];
        let cur = poly_sub(
            &poly_mul(&lin, &prev1),
            &poly_mul(&vec![e2], &prev2),
        );
        prev2 = prev1;
        prev1 = cur;
    }
    let mut chi = prev1;
    let mut zeros = 0;
    while chi[0].is_zero() {
        chi.remove(0); // divide by x
        zeros += 1;
    }
    let mut negatives = 0;
    let mut p = chi;
    while poly_deg(&p) > 0 {
        let g = poly_gcd(&p, &poly_derivative(&p));
        let square_free = poly_div_exact(&p, &g);
        negatives += sturm_distinct_negative_roots(&square_free);
        p = g;
    }
    (negatives, zeros, n - negatives - zeros)
}

fn random_tridiagonal(rng: &mut ChaCha8Rng) -> TridiagonalSymmetric {
    let dim = rng.gen_range(1..=8);
    let entry = |rng: &mut ChaCha8Rng| {
        let den = rng.gen_range(1i64..=4);
        let num = rng.gen_range(-10 * den..=10 * den);
        Rational::from_ratio(num, den)
    };
    TridiagonalSymmetric::new(
        (0..dim).map(|_| entry(rng)).collect(),
        (0..dim - 1).map(|_| entry(rng)).collect(),
    )
}

/// Adjust the last diagonal entry so the matrix is exactly singular.
fn make_singular(t: &TridiagonalSymmetric) -> Option<TridiagonalSymmetric> {
    let n = t.dim();
    if n == 1 {
        let mut d = t.diag.clone();
        d[0] = Rational::zero();
        return Some(TridiagonalSymmetric::new(d, vec![]));
    }
    // leading minors D_{n-1}, D_{n-2}
    let mut prev2 = Rational::one();
    let mut prev1 = t.diag[0].clone();
    for i in 1..n - 1 {
        let cur = &(&t.diag[i] * &prev1)
            - &(&(&t.offdiag[i - 1] * &t.offdiag[i - 1]) * &prev2);
        prev2 = prev1;
        prev1 = cur;
    }
    if prev1.is_zero() {
        return None;
    }
    let e2 = &t.offdiag[n - 2] * &t.offdiag[n - 2];
    let mut d = t.diag.clone();
    d[n - 1] = &(&e2 * &prev2) / &prev1;
    Some(TridiagonalSymmetric::new(d, t.offdiag.clone()))
}

#[test]
fn criterion_5_inertia_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut singular_seen = 0usize;
    for case in 0..1000 {
        let t = if case % 10 == 9 {
            match make_singular(&random_tridiagonal(&mut rng)) {
                Some(t) => t,
                None => random_tridiagonal(&mut rng),
            }
        } else {
            random_tridiagonal(&mut rng)
        };
        let got = inertia(&t);
        let (neg, zero, pos) = eigen_sign_counts_oracle(&t);
        assert_eq!(
            (got.negatives, got.zeros, got.positives),
            (neg, zero, pos),
            "case {case}: {t:?}"
        );
        singular_seen += (zero > 0) as usize;
    }
    assert!(singular_seen >= 50, "want exact-zero cases, got {singular_seen}");
    println!(
        "PASS criterion 5: inertia matches root-isolation oracle on 1000 matrices \
         ({singular_seen} with exact zero eigenvalues)"
    );
}

#[test]
fn criterion_6_certification_soundness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xdecade);
    for (name, s) in example_sets() {
        let mom = s.moments().unwrap();
        let m_max = if s.n_pieces() == 3 { 7 } else { 8 };
        // per index: the largest certified Below must not exceed the
        // smallest certified Above
        let mut max_below = vec![Rational::zero(); 6];
        let mut min_above: Vec<Option<Rational>> = vec![None; 6];
        for _ in 0..50 {
            let lambda = Rational::from_ratio(rng.gen_range(1i64..=2000), rng.gen_range(1i64..=10));
            let levels: Vec<_> = (1..=m_max)
                .map(|m| counting_bounds(&s, &mom, &lambda, m).unwrap())
                .filter(|cb| cb.conclusive_margin)
                .collect();
            for n in 1..=5usize {
                // per-level verdicts: they must never flip as m grows
                let mut verdict: Option<bool> = None; // true = Below
                for cb in &levels {
                    let level_verdict = if cb.upper < n {
                        Some(true)
                    } else if cb.lower >= n {
                        Some(false)
                    } else {
                        None
                    };
                    if let Some(v) = level_verdict {
                        if let Some(prev) = verdict {
                            assert_eq!(
                                prev, v,
                                "{name}: verdict flipped at lambda={lambda}, n={n}, m={}",
                                cb.m_used
                            );
                        }
                        verdict = Some(v);
                    }
                }
                match verdict {
                    Some(true) => {
                        if lambda > max_below[n] {
                            max_below[n] = lambda.clone();
                        }
                    }
                    Some(false) => {
                        if min_above[n].as_ref().map_or(true, |m| lambda < *m) {
                            min_above[n] = Some(lambda.clone());
                        }
                    }
                    None => {}
                }
            }
        }
        for n in 1..=5 {
            if let Some(above) = &min_above[n] {
                assert!(
                    max_below[n] <= *above,
                    "{name}: Below at {} and Above at {} for n={n}",
                    max_below[n],
                    above
                );
            }
        }
        println!("PASS criterion 6: soundness and verdict stability on {name}");
    }
}

fn certified_brackets(
    s: &SimilaritySet,
    mom: &MomentData,
    indices: &[usize],
    tol: Rational,
    m_max: usize,
) -> Vec<selfsim_sturm::EigenvalueBracket> {
    indices
        .iter()
        .map(|&n| {
            let br = bracket_eigenvalue(s, mom, n, &tol, &r(4096, 1), m_max).unwrap();
            assert_eq!(br.status, BracketStatus::Certified, "index {n}");
            br
        })
        .collect()
}

#[test]
fn criterion_7_galerkin_dominance() {
    for (name, s) in example_sets() {
        let mom = s.moments().unwrap();
        let (indices, tol, m_max): (&[usize], _, _) = if s.n_pieces() == 3 {
            (&[1, 2], r(1, 4), 8)
        } else {
            (&[1, 2, 3], r(1, 4), 12)
        };
        let mesh_level = if s.n_pieces() == 3 { 8 } else { 10 };
        let brackets = certified_brackets(&s, &mom, indices, tol, m_max);
        let estimates =
            approx_eigenvalues(&s, &mom, *indices.last().unwrap(), mesh_level, 1e6).unwrap();
        for (br, est) in brackets.iter().zip(&estimates) {
            assert_eq!(br.n, est.n);
            assert!(
                est.value >= br.lo.to_f64() - 1e-9 * est.value.abs(),
                "{name} n={}: oracle {} below certified lower bound {}",
                br.n,
                est.value,
                br.lo
            );
        }
        println!("PASS criterion 7: oracle estimates dominate certified lower bounds on {name}");
    }
}

#[test]
fn criterion_8_reflection_correctness() {
    let s = indefinite();
    let mom = s.moments().unwrap();
    let neg = negative_eigenvalues(&s, &mom, 1, &r(1, 4), &r(4096, 1), 10).unwrap();
    assert_eq!(neg.status, BracketStatus::Certified);
    assert!(neg.lo < neg.hi && neg.hi.is_negative());

    let reflected = s.reflect();
    let rmom = reflected.moments().unwrap();
    let est = approx_eigenvalues(&reflected, &rmom, 1, 10, 1e6).unwrap();
    let (lo, hi) = (-neg.hi.to_f64(), -neg.lo.to_f64());
    let v = est[0].value;
    let dist = if v < lo {
        lo - v
    } else if v > hi {
        v - hi
    } else {
        0.0
    };
    assert!(
        dist <= 0.01 * v.abs(),
        "oracle {v} more than 1% outside [{lo}, {hi}]"
    );

    let rl = lebesgue().reflect();
    let rlmom = rl.moments().unwrap();
    let br = bracket_eigenvalue(&rl, &rlmom, 1, &r(1, 10), &r(128, 1), 8).unwrap();
    assert_eq!(br.status, BracketStatus::NotFoundUpTo(r(128, 1)));
    println!("PASS criterion 8: negative bracket certified, oracle within 1%, reflected lebesgue has no positive spectrum");
}

#[test]
fn criterion_9_condition_gating() {
    // boundary construction: theta^2 = 8/9, ||P||^2 = 9/32, so
    // lambda^2 theta^2 ||P||^2 = lambda^2 / 4 and lambda = 1 sits exactly
    // on the margin at m = 1
    let s = SimilaritySet::new(
        vec![r(1, 2), r(1, 2)],
        vec![r(4, 3), r(0, 1)],
        vec![r(0, 1), r(1, 4)],
    )
    .unwrap();
    let mom = s.moments().unwrap();
    assert_eq!(*s.theta_sq(), r(8, 9));
    assert_eq!(mom.norm_sq, r(9, 32));
    let boundary = counting_bounds(&s, &mom, &Rational::one(), 1).unwrap();
    assert!(!boundary.conclusive_margin, "equality must gate as false");
    let inside = counting_bounds(&s, &mom, &r(999, 1000), 1).unwrap();
    assert!(inside.conclusive_margin);
    let outside = counting_bounds(&s, &mom, &r(1001, 1000), 1).unwrap();
    assert!(!outside.conclusive_margin);

    // generic agreement with the exact predicate
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (_, set) in example_sets() {
        let mom = set.moments().unwrap();
        let m_cap = max_refinement_level(&set).min(6);
        for _ in 0..20 {
            let lambda =
                Rational::from_ratio(rng.gen_range(1i64..=500), rng.gen_range(1i64..=7));
            let m = rng.gen_range(1..=m_cap);
            let cb = counting_bounds(&set, &mom, &lambda, m).unwrap();
            let q = &(&(&lambda * &lambda) * &set.theta_sq().pow(m as u32)) * &mom.norm_sq;
            assert_eq!(cb.conclusive_margin, q < r(1, 4));
        }
    }
    println!("PASS criterion 9: conclusive_margin gates exactly on the rational predicate");
}
