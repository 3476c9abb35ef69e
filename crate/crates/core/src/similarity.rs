//! Simultaneous similarity of matrix pairs.
//!
//! Pairs `L` and `R` are similar when `S⁻¹·L·S = R` for one invertible `S`.
//! Equivalently `L.a·S = S·R.a` and `L.b·S = S·R.b`, a linear system in the
//! entries of `S`; the pairs are similar iff its solution space (the
//! intertwiner space) contains an invertible matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;

/// Marker attached to results whose underlying statements need `|F| >= 3`.
pub const GF2_WARNING: &str = "gf2-unsupported-claims";

/// An ordered pair of square matrices of one size over one field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixPair {
    a: Matrix,
    b: Matrix,
}

impl MatrixPair {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        if a.field() != b.field() {
            return Err(Error::FieldMismatch(a.field(), b.field()));
        }
        if !a.is_square() || a.shape() != b.shape() {
            return Err(Error::Shape(format!(
                "pair needs two square matrices of one size, got {:?} and {:?}",
                a.shape(),
                b.shape()
            )));
        }
        Ok(MatrixPair { a, b })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn field(&self) -> Field {
        self.a.field()
    }

    pub fn size(&self) -> usize {
        self.a.rows()
    }

    pub fn into_parts(self) -> (Matrix, Matrix) {
        (self.a, self.b)
    }

    pub fn commutes(&self) -> bool {
        self.a.commutes_with(&self.b).expect("pair shapes agree")
    }

    /// `(S⁻¹·a·S, S⁻¹·b·S)`.
    pub fn conjugate(&self, s: &Matrix) -> Result<MatrixPair> {
        let inv = s
            .inverse()?
            .ok_or_else(|| Error::Precondition("conjugating matrix is singular".into()))?;
        MatrixPair::new(
            inv.matmul(&self.a)?.matmul(s)?,
            inv.matmul(&self.b)?.matmul(s)?,
        )
    }

    pub(crate) fn check_compatible(&self, other: &MatrixPair) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(self.field(), other.field()));
        }
        if self.size() != other.size() {
            return Err(Error::Shape(format!(
                "pairs of size {} and {}",
                self.size(),
                other.size()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

/// How the verdict was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    /// Every candidate in a finite search space was examined.
    Exhaustive,
    /// A polynomial identity was certified by evaluation on a full grid.
    DeterministicPolynomial,
    /// Random sampling; only ever attached to `yes` or `inconclusive`.
    Probabilistic,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub candidates_tried: u64,
    pub search_dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decision<W> {
    pub verdict: Verdict,
    pub witness: Option<W>,
    pub certificate: CertificateKind,
    pub budget: BudgetReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl<W> Decision<W> {
    pub fn yes(witness: W, certificate: CertificateKind, budget: BudgetReport) -> Self {
        Decision {
            verdict: Verdict::Yes,
            witness: Some(witness),
            certificate,
            budget,
            warnings: Vec::new(),
        }
    }

    pub fn no(certificate: CertificateKind, budget: BudgetReport) -> Self {
        assert_ne!(
            certificate,
            CertificateKind::Probabilistic,
            "a probabilistic search cannot certify `no`"
        );
        Decision {
            verdict: Verdict::No,
            witness: None,
            certificate,
            budget,
            warnings: Vec::new(),
        }
    }

    pub fn inconclusive(budget: BudgetReport) -> Self {
        Decision {
            verdict: Verdict::Inconclusive,
            witness: None,
            certificate: CertificateKind::Probabilistic,
            budget,
            warnings: Vec::new(),
        }
    }

    pub fn is_yes(&self) -> bool {
        self.verdict == Verdict::Yes
    }

    pub fn is_no(&self) -> bool {
        self.verdict == Verdict::No
    }

    pub fn map_witness<V>(self, f: impl FnOnce(W) -> V) -> Decision<V> {
        Decision {
            verdict: self.verdict,
            witness: self.witness.map(f),
            certificate: self.certificate,
            budget: self.budget,
            warnings: self.warnings,
        }
    }
}

/// Limits for the invertible-element search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest candidate count searched exhaustively (`p^d` or `(n+1)^d`).
    pub enumeration_limit: u64,
    /// Random candidates drawn once the exhaustive regime is exceeded.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            enumeration_limit: 1_000_000,
            samples: 64,
            seed: 0,
        }
    }
}

/// Basis of `{S : L.a·S = S·R.a, L.b·S = S·R.b}`, from the kernel of the
/// stacked `2n² x n²` system in the row-major entries of `S`.
pub fn intertwiner_basis(l: &MatrixPair, r: &MatrixPair) -> Result<Vec<Matrix>> {
    l.check_compatible(r)?;
    let n = l.size();
    let field = l.field();
    let mut system = Matrix::zeros(field, 2 * n * n, n * n);
    for (block, (lm, rm)) in [(&l.a, &r.a), (&l.b, &r.b)].into_iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let row = block * n * n + i * n + j;
                for k in 0..n {
                    // (Lm·S)_ij = Σ_k Lm_ik S_kj
                    let c = &system[(row, k * n + j)] + &lm[(i, k)];
                    system[(row, k * n + j)] = c;
                    // (S·Rm)_ij = Σ_k S_ik Rm_kj
                    let c = &system[(row, i * n + k)] - &rm[(k, j)];
                    system[(row, i * n + k)] = c;
                }
            }
        }
    }
    Ok(system
        .kernel_basis()
        .into_iter()
        .map(|v| Matrix::new(field, n, n, v).expect("kernel vector has n² entries"))
        .collect())
}

/// Linear combination `Σ c_i·basis_i` (zero matrix of `n x n` for an empty basis).
pub fn combine(field: Field, n: usize, basis: &[Matrix], coeffs: &[Scalar]) -> Matrix {
    let mut acc = Matrix::zeros(field, n, n);
    for (b, c) in basis.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&b.scale(c)).expect("basis shapes agree");
    }
    acc
}

/// Steps a coefficient vector over `{0..base}^d` in lexicographic order, last
/// coordinate fastest. Returns `false` after the final vector.
fn advance(digits: &mut [u64], base: u64) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn checked_power(base: u64, exp: usize, limit: u64) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
        if acc > limit {
            return None;
        }
    }
    Some(acc)
}

/// Searches the span of `basis` (square `n x n` matrices over `field`) for an
/// invertible element.
///
/// Over GF(p) the span is enumerated exhaustively when `p^d` fits the budget,
/// otherwise `budget.samples` uniform elements are drawn. Over the rationals
/// the determinant is a polynomial of degree `n` in the `d` coefficients: it is
/// evaluated on the grid `{0..n}^d` when that grid fits (a full grid certifies
/// the zero polynomial), and sampled on `{0..2n²}^d` otherwise.
pub fn invertible_in_span(field: Field, n: usize, basis: &[Matrix], budget: &SearchBudget) -> Result<Decision<Matrix>> {
    if let Some(bad) = basis.iter().find(|b| b.field() != field || b.shape() != (n, n)) {
        return Err(Error::Shape(format!(
            "span element {:?} over {} does not match {n}x{n} over {field}",
            bad.shape(),
            bad.field()
        )));
    }
    let d = basis.len();
    let mut report = BudgetReport {
        candidates_tried: 0,
        search_dimension: d,
    };
    if n == 0 {
        report.candidates_tried = 1;
        return Ok(Decision::yes(Matrix::zeros(field, 0, 0), CertificateKind::Exhaustive, report));
    }
    if d == 0 {
        return Ok(Decision::no(CertificateKind::Exhaustive, report));
    }

    let to_scalars = |digits: &[u64]| -> Vec<Scalar> { digits.iter().map(|&v| field.from_u64(v)).collect() };

    let (grid_base, exhaustive) = match field.modulus() {
        Some(p) => (p, checked_power(p, d, budget.enumeration_limit).is_some()),
        None => {
            let base = n as u64 + 1;
            (base, d == 1 || checked_power(base, d, budget.enumeration_limit).is_some())
        }
    };

    if exhaustive {
        let certificate = if field.is_finite() {
            CertificateKind::Exhaustive
        } else {
            CertificateKind::DeterministicPolynomial
        };
        let mut digits = vec![0u64; d];
        loop {
            report.candidates_tried += 1;
            let s = combine(field, n, basis, &to_scalars(&digits));
            if s.is_invertible() {
                return Ok(Decision::yes(s, certificate, report));
            }
            if !advance(&mut digits, grid_base) {
                return Ok(Decision::no(certificate, report));
            }
        }
    }

    let sample_base = match field.modulus() {
        Some(p) => p,
        None => 2 * (n as u64) * (n as u64) + 1,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    for _ in 0..budget.samples {
        report.candidates_tried += 1;
        let digits: Vec<u64> = (0..d).map(|_| rng.gen_range(0..sample_base)).collect();
        let s = combine(field, n, basis, &to_scalars(&digits));
        if s.is_invertible() {
            return Ok(Decision::yes(s, CertificateKind::Probabilistic, report));
        }
    }
    Ok(Decision::inconclusive(report))
}

/// Decides whether `S⁻¹·L·S = R` for some invertible `S`; a `yes` carries
/// the canonically-first such `S`, already verified.
pub fn are_similar(l: &MatrixPair, r: &MatrixPair, budget: &SearchBudget) -> Result<Decision<Matrix>> {
    l.check_compatible(r)?;
    let basis = intertwiner_basis(l, r)?;
    let decision = invertible_in_span(l.field(), l.size(), &basis, budget)?;
    if let Some(s) = &decision.witness {
        if !verify_similarity(l, r, s) {
            return Err(Error::Internal("similarity witness failed verification".into()));
        }
    }
    Ok(decision)
}

/// True iff `S` is invertible and `L.a·S = S·R.a`, `L.b·S = S·R.b`
/// (that is, `S⁻¹·L·S = R`). Mismatched shapes give `false`.
pub fn verify_similarity(l: &MatrixPair, r: &MatrixPair, s: &Matrix) -> bool {
    if l.check_compatible(r).is_err() || s.field() != l.field() || s.shape() != (l.size(), l.size()) {
        return false;
    }
    if !s.is_invertible() {
        return false;
    }
    let side = |lm: &Matrix, rm: &Matrix| -> bool {
        match (lm.matmul(s), s.matmul(rm)) {
            (Ok(x), Ok(y)) => x == y,
            _ => false,
        }
    };
    side(&l.a, &r.a) && side(&l.b, &r.b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn pair(f: Field, a: &[&[i64]], b: &[&[i64]]) -> MatrixPair {
        MatrixPair::new(Matrix::from_i64_rows(f, a), Matrix::from_i64_rows(f, b)).unwrap()
    }

    #[test]
    fn pair_rejects_bad_shapes() {
        let f = gf(3);
        assert!(MatrixPair::new(Matrix::zeros(f, 2, 2), Matrix::zeros(f, 3, 3)).is_err());
        assert!(MatrixPair::new(Matrix::zeros(f, 2, 3), Matrix::zeros(f, 2, 3)).is_err());
        assert!(MatrixPair::new(Matrix::zeros(f, 2, 2), Matrix::zeros(gf(5), 2, 2)).is_err());
    }

    #[test]
    fn identity_pairs_intertwine_everything() {
        let f = gf(3);
        let id = pair(f, &[&[1, 0], &[0, 1]], &[&[1, 0], &[0, 1]]);
        assert_eq!(intertwiner_basis(&id, &id).unwrap().len(), 4);
    }

    #[test]
    fn distinct_scalars_have_no_intertwiner() {
        let f = gf(3);
        let l = pair(f, &[&[1]], &[&[0]]);
        let r = pair(f, &[&[0]], &[&[1]]);
        assert!(intertwiner_basis(&l, &r).unwrap().is_empty());
        let d = are_similar(&l, &r, &SearchBudget::default()).unwrap();
        assert_eq!(d.verdict, Verdict::No);
        assert_eq!(d.certificate, CertificateKind::Exhaustive);
    }

    #[test]
    fn span_of_identity() {
        let f = gf(5);
        let d = invertible_in_span(f, 3, &[Matrix::identity(f, 3)], &SearchBudget::default()).unwrap();
        assert!(d.is_yes());
        assert!(d.witness.unwrap().is_identity());
    }

    #[test]
    fn strictly_upper_span_is_singular() {
        for p in [2, 3, 5] {
            let f = gf(p);
            let basis = [Matrix::from_i64_rows(f, &[[0, 1], [0, 0]])];
            let d = invertible_in_span(f, 2, &basis, &SearchBudget::default()).unwrap();
            assert_eq!(d.verdict, Verdict::No);
            assert_eq!(d.certificate, CertificateKind::Exhaustive);
            assert_eq!(d.budget.candidates_tried, p);
        }
    }

    #[test]
    fn first_invertible_in_canonical_order() {
        // Enumeration (0,0), (0,1), (0,2), (1,0), (1,1): the first invertible is (1,1).
        let f = gf(3);
        let basis = [
            Matrix::from_i64_rows(f, &[[1, 0], [0, 0]]),
            Matrix::from_i64_rows(f, &[[0, 0], [0, 1]]),
        ];
        let d = invertible_in_span(f, 2, &basis, &SearchBudget::default()).unwrap();
        assert!(d.witness.unwrap().is_identity());
        assert_eq!(d.budget.candidates_tried, 5);
    }

    #[test]
    fn empty_span_and_empty_matrices() {
        let f = gf(3);
        let d = invertible_in_span(f, 2, &[], &SearchBudget::default()).unwrap();
        assert_eq!((d.verdict, d.certificate), (Verdict::No, CertificateKind::Exhaustive));
        let e = MatrixPair::new(Matrix::zeros(f, 0, 0), Matrix::zeros(f, 0, 0)).unwrap();
        let d = are_similar(&e, &e, &SearchBudget::default()).unwrap();
        assert!(d.is_yes());
        assert_eq!(d.witness.unwrap().shape(), (0, 0));
    }

    #[test]
    fn nilpotent_pair_is_self_similar() {
        let f = gf(5);
        let l = pair(f, &[&[0, 1], &[0, 0]], &[&[0, 0], &[0, 0]]);
        let d = are_similar(&l, &l, &SearchBudget::default()).unwrap();
        assert!(d.is_yes());
        assert!(verify_similarity(&l, &l, d.witness.as_ref().unwrap()));
    }

    #[test]
    fn gf2_swap_is_found() {
        let f = gf(2);
        let l = pair(f, &[&[1, 0], &[0, 0]], &[&[0, 0], &[0, 1]]);
        let r = pair(f, &[&[0, 0], &[0, 1]], &[&[1, 0], &[0, 0]]);
        let d = are_similar(&l, &r, &SearchBudget::default()).unwrap();
        let s = d.witness.unwrap();
        assert_eq!(s, Matrix::from_i64_rows(f, &[[0, 1], [1, 0]]));
        assert!(verify_similarity(&l, &r, &s));
    }

    #[test]
    fn verify_rejects_singular_and_misshapen() {
        let f = gf(3);
        let l = pair(f, &[&[1, 0], &[0, 2]], &[&[0, 1], &[0, 0]]);
        assert!(verify_similarity(&l, &l, &Matrix::identity(f, 2)));
        assert!(!verify_similarity(&l, &l, &Matrix::zeros(f, 2, 2)));
        assert!(!verify_similarity(&l, &l, &Matrix::identity(f, 3)));
    }

    #[test]
    fn rational_similarity_with_deterministic_certificates() {
        let q = Field::Rational;
        let l = pair(q, &[&[1, 1], &[0, 2]], &[&[0, 0], &[0, 0]]);
        let s = Matrix::from_i64_rows(q, &[[2, 1], [1, 1]]);
        let r = l.conjugate(&s).unwrap();
        let d = are_similar(&l, &r, &SearchBudget::default()).unwrap();
        assert!(d.is_yes());
        assert_eq!(d.certificate, CertificateKind::DeterministicPolynomial);
        // diag(1,2) is not similar to diag(1,1): that intertwiner space is
        // nonempty but every element is singular.
        let r2 = pair(q, &[&[1, 0], &[0, 1]], &[&[0, 0], &[0, 0]]);
        let d = are_similar(&l, &r2, &SearchBudget::default()).unwrap();
        assert_eq!((d.verdict, d.certificate), (Verdict::No, CertificateKind::DeterministicPolynomial));
    }

    #[test]
    fn sampling_regime_reports_probabilistic() {
        let f = gf(5);
        let id = pair(f, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], &[&[0; 3], &[0; 3], &[0; 3]]);
        let budget = SearchBudget {
            enumeration_limit: 10,
            ..SearchBudget::default()
        };
        let d = are_similar(&id, &id, &budget).unwrap();
        assert!(d.is_yes());
        assert_eq!(d.certificate, CertificateKind::Probabilistic);
        assert_eq!(d.budget.search_dimension, 9);
    }

    #[test]
    fn sampling_failure_is_inconclusive_not_no() {
        let f = gf(3);
        let basis = [
            Matrix::from_i64_rows(f, &[[0, 1], [0, 0]]),
            Matrix::from_i64_rows(f, &[[0, 2], [0, 0]]),
        ];
        let budget = SearchBudget {
            enumeration_limit: 1,
            samples: 8,
            seed: 3,
        };
        let d = invertible_in_span(f, 2, &basis, &budget).unwrap();
        assert_eq!(d.verdict, Verdict::Inconclusive);
        assert_eq!(d.budget.candidates_tried, 8);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_pair(p: u64, n: usize) -> impl Strategy<Value = MatrixPair> {
            proptest::collection::vec(0..p, 2 * n * n).prop_map(move |v| {
                let f = Field::prime(p).unwrap();
                let a = Matrix::from_fn(f, n, n, |i, j| f.from_u64(v[i * n + j]));
                let b = Matrix::from_fn(f, n, n, |i, j| f.from_u64(v[n * n + i * n + j]));
                MatrixPair::new(a, b).unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn reflexive_with_identity_in_intertwiner(l in arb_pair(3, 3)) {
                let basis = intertwiner_basis(&l, &l).unwrap();
                prop_assert!(!basis.is_empty());
                let d = are_similar(&l, &l, &SearchBudget::default()).unwrap();
                prop_assert!(d.is_yes());
            }

            #[test]
            fn intertwiners_satisfy_the_equations(l in arb_pair(5, 3), r in arb_pair(5, 3)) {
                for s in intertwiner_basis(&l, &r).unwrap() {
                    prop_assert_eq!(l.a().matmul(&s).unwrap(), s.matmul(r.a()).unwrap());
                    prop_assert_eq!(l.b().matmul(&s).unwrap(), s.matmul(r.b()).unwrap());
                }
            }

            #[test]
            fn symmetric_and_rank_preserving(l in arb_pair(2, 3), r in arb_pair(2, 3)) {
                let b = SearchBudget::default();
                let lr = are_similar(&l, &r, &b).unwrap();
                let rl = are_similar(&r, &l, &b).unwrap();
                prop_assert_eq!(lr.verdict, rl.verdict);
                if lr.is_yes() {
                    prop_assert_eq!(l.a().rank(), r.a().rank());
                    prop_assert_eq!(l.b().rank(), r.b().rank());
                }
            }

            #[test]
            fn conjugates_are_found(l in arb_pair(3, 3), s in arb_pair(3, 3)) {
                let s = s.a().clone();
                if s.is_invertible() {
                    let r = l.conjugate(&s).unwrap();
                    prop_assert!(verify_similarity(&l, &r, &s));
                    let d = are_similar(&l, &r, &SearchBudget::default()).unwrap();
                    prop_assert!(d.is_yes());
                }
            }
        }
    }
}
