//! End-to-end verification suites for the reductions and the Lie algebra
//! correspondence. Each case draws from its own seeded stream, so cases can
//! run in parallel and reports remain byte-identical apart from timing.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::lie::{border, derived_subalgebra, iso_from_similarity, jacobi_holds, lie_build, similarity_from_iso, tilde_conjugates_into, verify_lie_iso};
use crate::matrix::Matrix;
use crate::pencil::{are_weakly_similar, contains_nonsingular, pencil_transform, space_make, verify_weak, PencilTransform};
use crate::random::{random_instance, random_invertible, random_matrix, random_scalar, random_transform, rng_for_case, RandomMode};
use crate::reduction::{build_m_pair, full_reduce, gp_reduce, lift_full_witness};
use crate::similarity::{are_similar, verify_similarity, CertificateKind, MatrixPair, SearchBudget, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseFailure {
    pub case: usize,
    pub input: Value,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases_run: usize,
    pub cases_passed: usize,
    pub wall_time_ms: u128,
    pub failures: Vec<CaseFailure>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.cases_passed == self.cases_run && self.failures.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteParams {
    pub seed: u64,
    /// Number of random cases; `None` uses the suite default. Exhaustive suites ignore it.
    pub count: Option<usize>,
    pub budget: SearchBudget,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            seed: 7,
            count: None,
            budget: SearchBudget::default(),
        }
    }
}

/// Published suite names with their default case counts (`None` = exhaustive).
pub const SUITES: &[(&str, Option<usize>)] = &[
    ("gp-invariants", Some(200)),
    ("njk1-exhaustive-gf3", None),
    ("njk-exhaustive-gf3", None),
    ("rank-laws", Some(200)),
    ("full-chain", Some(50)),
    ("thm2-roundtrip", Some(100)),
    ("simdecide-oracle", Some(50)),
    ("nonsingular-detection", Some(100)),
];

type CaseOutcome = std::result::Result<(), (Value, String)>;

fn check(cond: bool, input: &impl Fn() -> Value, reason: &str) -> CaseOutcome {
    if cond {
        Ok(())
    } else {
        Err((input(), reason.to_string()))
    }
}

fn lift_err<T>(r: Result<T>, input: &impl Fn() -> Value) -> std::result::Result<T, (Value, String)> {
    r.map_err(|e| (input(), e.to_string()))
}

fn run_cases(name: &str, count: usize, case: impl Fn(usize) -> CaseOutcome + Sync) -> SuiteReport {
    let start = Instant::now();
    let outcomes: Vec<CaseOutcome> = (0..count).into_par_iter().map(&case).collect();
    let failures: Vec<CaseFailure> = outcomes
        .into_iter()
        .enumerate()
        .filter_map(|(i, o)| {
            o.err().map(|(input, reason)| CaseFailure {
                case: i,
                input,
                reason,
            })
        })
        .collect();
    SuiteReport {
        suite: name.to_string(),
        cases_run: count,
        cases_passed: count - failures.len(),
        wall_time_ms: start.elapsed().as_millis(),
        failures,
    }
}

fn gf(p: u64) -> Field {
    Field::prime(p).expect("small prime")
}

pub fn run_suite(name: &str, params: &SuiteParams) -> Result<SuiteReport> {
    let default_count = SUITES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::Precondition(format!("unknown suite {name:?}")))?
        .1;
    let count = params.count.or(default_count).unwrap_or(0);
    Ok(match name {
        "gp-invariants" => gp_invariants(params.seed, count),
        "njk1-exhaustive-gf3" => njk1_exhaustive(&params.budget),
        "njk-exhaustive-gf3" => njk_exhaustive(&params.budget),
        "rank-laws" => rank_laws(params.seed, count),
        "full-chain" => full_chain(params.seed, count),
        "thm2-roundtrip" => lie_roundtrip(params.seed, count),
        "simdecide-oracle" => simdecide_oracle(params.seed, count, &params.budget),
        "nonsingular-detection" => nonsingular_detection(params.seed, count),
        _ => unreachable!("name validated against SUITES"),
    })
}

/// `J·K = K·J`, `J⁴ = 0`, `K³ = 0` and block (1,4) of `J·K` equal to `X`,
/// over GF(5) with `n ∈ {1,2,3}`.
pub fn gp_invariants(seed: u64, count: usize) -> SuiteReport {
    let f = gf(5);
    run_cases("gp-invariants", count, |i| {
        let mut rng = rng_for_case(seed, i as u64);
        let n = rng.gen_range(1..=3);
        let x = random_matrix(&mut rng, f, n, n);
        let y = random_matrix(&mut rng, f, n, n);
        let input = || json!({ "x": &x, "y": &y });
        let gp = lift_err(gp_reduce(&x, &y), &input)?;
        let (j, k) = (gp.pair.a(), gp.pair.b());
        let jk = j.matmul(k).expect("square");
        check(jk == k.matmul(j).expect("square"), &input, "J·K ≠ K·J")?;
        check(j.pow(4).expect("square").is_zero(), &input, "J⁴ ≠ 0")?;
        check(k.pow(3).expect("square").is_zero(), &input, "K³ ≠ 0")?;
        check(
            jk.submatrix(0, 3 * n, n, n).expect("in range") == x,
            &input,
            "block (1,4) of J·K differs from X",
        )
    })
}

fn scalar_pairs(f: Field) -> Vec<(Scalar, Scalar)> {
    let els = f.elements().expect("finite");
    els.iter()
        .flat_map(|a| els.iter().map(move |b| (a.clone(), b.clone())))
        .collect()
}

fn one_by_one(f: Field, s: &Scalar) -> Matrix {
    Matrix::new(f, 1, 1, vec![s.clone()]).expect("1x1")
}

/// Over GF(3) at `n = 1`: `(J,K_xy)` and `(J,K_x'y')` are similar iff
/// `(x,y) = (x',y')`, with exhaustive certificates.
pub fn njk1_exhaustive(budget: &SearchBudget) -> SuiteReport {
    let f = gf(3);
    let pairs = scalar_pairs(f);
    let k = pairs.len();
    run_cases("njk1-exhaustive-gf3", k * k, |i| {
        let ((x, y), (x2, y2)) = (&pairs[i / k], &pairs[i % k]);
        let input = || json!({ "left": [x, y], "right": [x2, y2] });
        let l = lift_err(gp_reduce(&one_by_one(f, x), &one_by_one(f, y)), &input)?;
        let r = lift_err(gp_reduce(&one_by_one(f, x2), &one_by_one(f, y2)), &input)?;
        let d = lift_err(are_similar(&l.pair, &r.pair, budget), &input)?;
        check(d.certificate == CertificateKind::Exhaustive, &input, "certificate is not exhaustive")?;
        let expected = if (x, y) == (x2, y2) { Verdict::Yes } else { Verdict::No };
        check(d.verdict == expected, &input, &format!("verdict {:?}, expected {expected:?}", d.verdict))
    })
}

/// Over GF(3) at `m = 1`, `λ = 1`: the M-pairs of `(a,b)` and `(a',b')` are
/// weakly similar iff `(a,b) = (a',b')`.
pub fn njk_exhaustive(budget: &SearchBudget) -> SuiteReport {
    let f = gf(3);
    let lambda = f.one();
    let pairs = scalar_pairs(f);
    let k = pairs.len();
    run_cases("njk-exhaustive-gf3", k * k, |i| {
        let ((a, b), (a2, b2)) = (&pairs[i / k], &pairs[i % k]);
        let input = || json!({ "left": [a, b], "right": [a2, b2], "lambda": &lambda });
        let l = lift_err(build_m_pair(&one_by_one(f, a), &one_by_one(f, b), &lambda), &input)?;
        let r = lift_err(build_m_pair(&one_by_one(f, a2), &one_by_one(f, b2), &lambda), &input)?;
        let d = lift_err(are_weakly_similar(&l.pair, &r.pair, budget, None), &input)?;
        let expected = if (a, b) == (a2, b2) { Verdict::Yes } else { Verdict::No };
        check(d.verdict == expected, &input, &format!("verdict {:?}, expected {expected:?}", d.verdict))?;
        if let Some(w) = &d.witness {
            check(verify_weak(&l.pair, &r.pair, &w.t, &w.s), &input, "witness fails verify_weak")?;
        }
        Ok(())
    })
}

/// Rank inequalities for `αM₁(A) + βM₂(B)` over GF(3) and GF(5), `m ∈ {1,2}`.
pub fn rank_laws(seed: u64, count: usize) -> SuiteReport {
    run_cases("rank-laws", count, |i| {
        let mut rng = rng_for_case(seed, i as u64);
        let f = if rng.gen_bool(0.5) { gf(3) } else { gf(5) };
        let m: usize = rng.gen_range(1..=2);
        let a = random_matrix(&mut rng, f, m, m);
        let b = random_matrix(&mut rng, f, m, m);
        let [al, be, ga, de] = [(); 4].map(|_| random_scalar(&mut rng, f));
        let input = || json!({ "a": &a, "b": &b, "alpha": &al, "beta": &be, "gamma": &ga, "delta": &de });
        let w = lift_err(build_m_pair(&a, &b, &f.default_lambda()), &input)?;
        let (m1, m2) = (w.pair.a(), w.pair.b());
        check(m1.rank() <= 4 * m + 3, &input, "rank M₁(A) > 4m+3")?;
        check(m2.rank() <= 5 * m + 4, &input, "rank M₂(B) > 5m+4")?;
        if !be.is_zero() {
            let r = m1.lin_comb(&al, m2, &be).expect("same shape").rank();
            check(r > 4 * m + 3, &input, "β ≠ 0 but rank(αM₁+βM₂) ≤ 4m+3")?;
        }
        if !ga.is_zero() && !de.is_zero() {
            let r = m1.lin_comb(&ga, m2, &de).expect("same shape").rank();
            check(r > 5 * m + 4, &input, "γ,δ ≠ 0 but rank(γM₁+δM₂) ≤ 5m+4")?;
        }
        Ok(())
    })
}

/// Composed reduction over GF(5), `n ∈ {1,2}`, `λ = 1`: commutation,
/// nonsingular sum, and the lifted witness for a random similarity.
pub fn full_chain(seed: u64, count: usize) -> SuiteReport {
    let f = gf(5);
    let lambda = f.one();
    run_cases("full-chain", count, |i| {
        let mut rng = rng_for_case(seed, i as u64);
        let n = rng.gen_range(1..=2);
        let x = random_matrix(&mut rng, f, n, n);
        let y = random_matrix(&mut rng, f, n, n);
        let s = random_invertible(&mut rng, f, n);
        let input = || json!({ "x": &x, "y": &y, "s": &s });
        let moved = lift_err(MatrixPair::new(x.clone(), y.clone()).and_then(|p| p.conjugate(&s)), &input)?;
        let (x2, y2) = moved.into_parts();
        let w1 = lift_err(full_reduce(&x, &y, &lambda), &input)?;
        let w2 = lift_err(full_reduce(&x2, &y2, &lambda), &input)?;
        check(w1.pair.commutes() && w2.pair.commutes(), &input, "full reduction does not commute")?;
        check(w1.sum_is_nonsingular(), &input, "M₁(λI+J)+M₂(K_XY) is singular")?;
        let lifted = lift_err(lift_full_witness(&s), &input)?;
        check(
            verify_weak(&w1.pair, &w2.pair, &PencilTransform::identity(f), &lifted),
            &input,
            "lifted witness fails verify_weak",
        )
    })
}

/// Lie algebra correspondence over GF(5), `n ∈ {2,3}`.
pub fn lie_roundtrip(seed: u64, count: usize) -> SuiteReport {
    let f = gf(5);
    run_cases("thm2-roundtrip", count, |i| {
        let mut rng = rng_for_case(seed, i as u64);
        let n = rng.gen_range(2..=3);
        let base = random_instance(&mut rng, f, n, RandomMode::CommutingSpaceWithNonsingular)
            .map_err(|e| (json!({ "n": n }), e.to_string()))?;
        let s = random_invertible(&mut rng, f, n);
        let p = random_transform(&mut rng, f);
        let input = || json!({ "space": &base, "s": &s, "p": p.matrix() });
        let (a, b) = base.clone().into_parts();
        let v = lift_err(space_make(a, b), &input)?;
        // V′ has basis P⁻¹·(S·A·S⁻¹, S·B·S⁻¹), so (S·A·S⁻¹, S·B·S⁻¹) = P·(A′, B′).
        let s_inv = s.inverse().expect("square").expect("invertible");
        let conj = lift_err(base.conjugate(&s_inv), &input)?;
        let rebased = lift_err(pencil_transform(&conj, &p.inverse()), &input)?;
        let (a2, b2) = rebased.into_parts();
        let v2 = lift_err(space_make(a2, b2), &input)?;

        let l = lift_err(lie_build(&v), &input)?;
        let l2 = lift_err(lie_build(&v2), &input)?;
        check(jacobi_holds(&l) && jacobi_holds(&l2), &input, "Jacobi identity fails")?;
        check(derived_subalgebra(&l).0 == n, &input, "derived subalgebra dimension ≠ n")?;
        let phi = lift_err(iso_from_similarity(&v, &v2, &s, p.matrix()), &input)?;
        check(verify_lie_iso(&l, &l2, &phi), &input, "induced map is not an isomorphism")?;
        let (s_back, p_back) = lift_err(similarity_from_iso(&l, &l2, &phi), &input)?;
        check(s_back == s && &p_back == p.matrix(), &input, "similarity_from_iso did not recover (S, P)")?;
        let t_back = lift_err(PencilTransform::new(p_back), &input)?;
        check(
            verify_weak(v2.basis(), v.basis(), &t_back, &s_back),
            &input,
            "recovered witness fails space similarity verification",
        )?;
        let r = lift_err(border(&s), &input)?;
        check(
            lift_err(tilde_conjugates_into(&l, &l2, &r), &input)?,
            &input,
            "(S ⊕ I₁)·Ṽ·(S ⊕ I₁)⁻¹ is not Ṽ′",
        )
    })
}

fn all_invertible_gf2_2x2() -> Vec<Matrix> {
    let f = gf(2);
    (0u32..16)
        .map(|bits| Matrix::from_fn(f, 2, 2, |i, j| f.from_u64(((bits >> (2 * i + j)) & 1) as u64)))
        .filter(Matrix::is_invertible)
        .collect()
}

/// `are_similar` against brute force over the 6 invertible 2x2 matrices of GF(2).
pub fn simdecide_oracle(seed: u64, count: usize, budget: &SearchBudget) -> SuiteReport {
    let f = gf(2);
    let gl2 = all_invertible_gf2_2x2();
    run_cases("simdecide-oracle", count, |i| {
        let mut rng = rng_for_case(seed, i as u64);
        let l = random_instance(&mut rng, f, 2, RandomMode::ArbitraryPair).expect("n ≥ 1");
        let r = if rng.gen_bool(0.5) {
            l.conjugate(&gl2[rng.gen_range(0..gl2.len())]).expect("invertible")
        } else {
            random_instance(&mut rng, f, 2, RandomMode::ArbitraryPair).expect("n ≥ 1")
        };
        let input = || json!({ "left": &l, "right": &r });
        let oracle = gl2.iter().any(|s| verify_similarity(&l, &r, s));
        let d = lift_err(are_similar(&l, &r, budget), &input)?;
        check(d.verdict != Verdict::Inconclusive, &input, "inconclusive verdict")?;
        check(d.is_yes() == oracle, &input, &format!("decider says {:?}, brute force {oracle}", d.verdict))
    })
}

/// `contains_nonsingular` against the full 9-combination scan over GF(3), plus
/// the all-singular space `span(E₁₃, E₂₃)`.
pub fn nonsingular_detection(seed: u64, count: usize) -> SuiteReport {
    let f = gf(3);
    let els = f.elements().expect("finite");
    let mut spaces = Vec::new();
    for i in 0..count {
        let mut rng = rng_for_case(seed, i as u64);
        let mode = if rng.gen_bool(0.5) {
            RandomMode::CommutingPair
        } else {
            RandomMode::ArbitraryPair
        };
        let (a, b) = random_instance(&mut rng, f, 2, mode).expect("n ≥ 1").into_parts();
        if let Ok(v) = space_make(a, b) {
            spaces.push(v);
        }
    }
    let unit = |i, j| {
        let mut e = Matrix::zeros(f, 3, 3);
        e[(i, j)] = f.one();
        e
    };
    let singular = space_make(unit(0, 2), unit(1, 2)).expect("E13, E23 commute");
    let total = spaces.len() + 1;
    run_cases("nonsingular-detection", total, |i| {
        if i == spaces.len() {
            let input = || json!({ "space": &singular });
            let found = lift_err(contains_nonsingular(&singular), &input)?;
            return check(found.is_none(), &input, "span(E13, E23) reported a nonsingular member");
        }
        let v = &spaces[i];
        let input = || json!({ "space": v });
        let scan = els.iter().any(|x| {
            els.iter()
                .any(|y| v.a().lin_comb(x, v.b(), y).expect("same shape").is_invertible())
        });
        let found = lift_err(contains_nonsingular(v), &input)?;
        check(found.is_some() == scan, &input, "disagrees with the exhaustive scan")?;
        if let Some((x, y)) = found {
            check(
                v.a().lin_comb(&x, v.b(), &y).expect("same shape").is_invertible(),
                &input,
                "returned combination is singular",
            )?;
        }
        Ok(())
    })
}
