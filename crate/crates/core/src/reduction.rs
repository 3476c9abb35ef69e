//! Reductions showing the wildness of commuting pairs under similarity and
//! under weak similarity.
//!
//! * `(X, Y) ↦ (J, K_XY)`: an arbitrary pair of `n x n` matrices becomes a
//!   commuting nilpotent pair of `5n x 5n` matrices, and similarity is both
//!   preserved and reflected.
//! * `(A, B) ↦ (M₁(A), M₂(B))`: similarity of `m x m` pairs becomes weak
//!   similarity of `(7m+6) x (7m+6)` pairs.
//! * The composition `(X, Y) ↦ (M₁(λI + J), M₂(K_XY))` lands in commuting
//!   pairs whose pencil contains a nonsingular matrix.

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::{BlockGrid, Matrix};
use crate::similarity::{MatrixPair, GF2_WARNING};

/// Output of [`gp_reduce`], keeping the `(X, Y)` it was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GpPair {
    pub n: usize,
    pub pair: MatrixPair,
    pub x: Matrix,
    pub y: Matrix,
}

/// Output of [`build_m_pair`] and [`full_reduce`], keeping the `(A, B)` it was
/// built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakPair {
    pub m: usize,
    pub lambda: Scalar,
    pub pair: MatrixPair,
    pub a: Matrix,
    pub b: Matrix,
    pub warnings: Vec<String>,
}

impl WeakPair {
    /// Whether `M₁ + M₂` is nonsingular.
    pub fn sum_is_nonsingular(&self) -> bool {
        self.pair
            .a()
            .add(self.pair.b())
            .expect("pair shapes agree")
            .is_invertible()
    }
}

/// `5n x 5n` matrix with identity blocks at block positions (1,2), (2,3), (3,4).
pub fn build_j(n: usize, field: Field) -> Result<Matrix> {
    if n < 1 {
        return Err(Error::Precondition("block size n must be at least 1".into()));
    }
    let mut g = BlockGrid::uniform(field, 5, n);
    for i in 0..3 {
        g.set(i, i + 1, Matrix::identity(field, n))?;
    }
    Ok(g.assemble()?)
}

/// `5n x 5n` matrix with blocks (1,3) = X, (1,5) = Y, (2,4) = X, (5,4) = I.
pub fn build_k(x: &Matrix, y: &Matrix) -> Result<Matrix> {
    let xy = MatrixPair::new(x.clone(), y.clone())?;
    let (n, field) = (xy.size(), xy.field());
    if n < 1 {
        return Err(Error::Precondition("block size n must be at least 1".into()));
    }
    let mut g = BlockGrid::uniform(field, 5, n);
    g.set(0, 2, x.clone())?
        .set(0, 4, y.clone())?
        .set(1, 3, x.clone())?
        .set(4, 3, Matrix::identity(field, n))?;
    Ok(g.assemble()?)
}

/// `(J, K_XY)`, with commutation, `J⁴ = 0` and `K³ = 0` checked.
pub fn gp_reduce(x: &Matrix, y: &Matrix) -> Result<GpPair> {
    let k = build_k(x, y)?;
    let n = x.rows();
    let j = build_j(n, x.field())?;
    let pair = MatrixPair::new(j, k)?;
    if !pair.commutes() {
        return Err(Error::Internal("J and K_XY do not commute".into()));
    }
    if !pair.a().pow(4)?.is_zero() || !pair.b().pow(3)?.is_zero() {
        return Err(Error::Internal("J or K_XY has the wrong nilpotency".into()));
    }
    Ok(GpPair {
        n,
        pair,
        x: x.clone(),
        y: y.clone(),
    })
}

/// `S ⊕ S ⊕ S ⊕ S ⊕ S`: carries a similarity `(X,Y)S = S(X',Y')` to
/// `(J,K_XY)R = R(J,K_X'Y')`.
pub fn lift_gp_witness(s: &Matrix) -> Result<Matrix> {
    if !s.is_square() {
        return Err(Error::Shape(format!("witness must be square, got {:?}", s.shape())));
    }
    Ok(Matrix::direct_sum(s.field(), &[s, s, s, s, s])?)
}

fn check_lambda(field: Field, lambda: &Scalar) -> Result<()> {
    if lambda.field() != field {
        return Err(Error::FieldMismatch(field, lambda.field()));
    }
    let bad = if field.is_gf2() {
        !lambda.is_one()
    } else {
        lambda.is_zero() || (lambda + &field.one()).is_zero()
    };
    if bad {
        return Err(Error::InvalidLambda {
            lambda: lambda.clone(),
            field,
        });
    }
    Ok(())
}

/// `M₁(A) = I_{2m+2} ⊕ 0_{3m+3} ⊕ I_{m+1} ⊕ A`,
/// `M₂(B) = 0_{2m+2} ⊕ I_{3m+3} ⊕ λI_{m+1} ⊕ B`.
///
/// λ must avoid 0 and −1; over GF(2) only λ = 1 is accepted and the result
/// carries [`GF2_WARNING`].
pub fn build_m_pair(a: &Matrix, b: &Matrix, lambda: &Scalar) -> Result<WeakPair> {
    let ab = MatrixPair::new(a.clone(), b.clone())?;
    let (m, field) = (ab.size(), ab.field());
    if m < 1 {
        return Err(Error::Precondition("input size m must be at least 1".into()));
    }
    check_lambda(field, lambda)?;
    let id = |k| Matrix::identity(field, k);
    let zero = |k| Matrix::zeros(field, k, k);
    let m1 = Matrix::direct_sum(field, &[&id(2 * m + 2), &zero(3 * m + 3), &id(m + 1), a])?;
    let m2 = Matrix::direct_sum(
        field,
        &[&zero(2 * m + 2), &id(3 * m + 3), &Matrix::scalar(field, m + 1, lambda), b],
    )?;
    let pair = MatrixPair::new(m1, m2)?;
    if ab.commutes() && !pair.commutes() {
        return Err(Error::Internal("M₁(A), M₂(B) fail to commute for commuting A, B".into()));
    }
    let warnings = if field.is_gf2() {
        vec![GF2_WARNING.to_string()]
    } else {
        Vec::new()
    };
    Ok(WeakPair {
        m,
        lambda: lambda.clone(),
        pair,
        a: a.clone(),
        b: b.clone(),
        warnings,
    })
}

/// `I_{6m+6} ⊕ S`: carries `S⁻¹(A,B)S = (A',B')` to a similarity of the
/// M-pairs with trivial pencil transform.
pub fn lift_weak_witness(s: &Matrix) -> Result<Matrix> {
    if !s.is_square() {
        return Err(Error::Shape(format!("witness must be square, got {:?}", s.shape())));
    }
    let m = s.rows();
    Ok(Matrix::direct_sum(s.field(), &[&Matrix::identity(s.field(), 6 * m + 6), s])?)
}

/// `I_{6·5n+6} ⊕ S⊕⁵`, the witness for [`full_reduce`] outputs.
pub fn lift_full_witness(s: &Matrix) -> Result<Matrix> {
    lift_weak_witness(&lift_gp_witness(s)?)
}

/// `(M₁(λI + J), M₂(K_XY))` of size `35n + 6`.
///
/// The output always commutes. Outside GF(2) the sum of the two matrices is
/// nonsingular; both facts are checked before returning.
pub fn full_reduce(x: &Matrix, y: &Matrix, lambda: &Scalar) -> Result<WeakPair> {
    check_lambda(x.field(), lambda)?;
    let gp = gp_reduce(x, y)?;
    let (j, k) = gp.pair.into_parts();
    let field = j.field();
    let shifted = Matrix::scalar(field, j.rows(), lambda).add(&j)?;
    let weak = build_m_pair(&shifted, &k, lambda)?;
    if !weak.pair.commutes() {
        return Err(Error::Internal("full reduction output does not commute".into()));
    }
    if !field.is_gf2() && !weak.sum_is_nonsingular() {
        return Err(Error::Internal("M₁(λI+J) + M₂(K_XY) is singular".into()));
    }
    Ok(weak)
}

pub fn default_lambda(field: Field) -> Scalar {
    field.default_lambda()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::{verify_weak, PencilTransform};
    use crate::similarity::verify_similarity;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn scalar_matrix(f: Field, v: i64) -> Matrix {
        Matrix::from_i64_rows(f, &[[v]])
    }

    /// Positions (1-based) of nonzero entries, with their values.
    fn nonzeros(m: &Matrix) -> Vec<((usize, usize), String)> {
        let mut out = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if !m[(i, j)].is_zero() {
                    out.push(((i + 1, j + 1), m[(i, j)].to_string()));
                }
            }
        }
        out
    }

    #[test]
    fn j_at_n1() {
        let j = build_j(1, gf(3)).unwrap();
        let nz: Vec<_> = nonzeros(&j).into_iter().map(|(p, _)| p).collect();
        assert_eq!(nz, vec![(1, 2), (2, 3), (3, 4)]);
        assert_eq!(j.nilpotency_index().unwrap(), Some(4));
        assert!(build_j(0, gf(3)).is_err());
    }

    #[test]
    fn j_rank_and_index_for_several_n() {
        for n in 1..=4 {
            let j = build_j(n, gf(5)).unwrap();
            assert_eq!(j.rank(), 3 * n);
            assert_eq!(j.nilpotency_index().unwrap(), Some(4));
        }
    }

    #[test]
    fn k_at_n1() {
        let f = gf(3);
        let k = build_k(&scalar_matrix(f, 1), &scalar_matrix(f, 2)).unwrap();
        assert_eq!(
            nonzeros(&k),
            vec![
                ((1, 3), "1".to_string()),
                ((1, 5), "2".to_string()),
                ((2, 4), "1".to_string()),
                ((5, 4), "1".to_string())
            ]
        );
        assert_eq!(k.nilpotency_index().unwrap(), Some(3));
    }

    #[test]
    fn k_with_zero_inputs() {
        let f = gf(5);
        let z = Matrix::zeros(f, 2, 2);
        let k = build_k(&z, &z).unwrap();
        let mut expected = Matrix::zeros(f, 10, 10);
        expected[(8, 6)] = f.one();
        expected[(9, 7)] = f.one();
        assert_eq!(k, expected);
    }

    #[test]
    fn jk_product_at_n1() {
        let f = gf(3);
        let j = build_j(1, f).unwrap();
        let k = build_k(&scalar_matrix(f, 1), &scalar_matrix(f, 2)).unwrap();
        assert_eq!(nonzeros(&j.matmul(&k).unwrap()), vec![((1, 4), "1".to_string())]);
    }

    #[test]
    fn k_squared_is_y_in_corner() {
        let f = gf(7);
        let x = Matrix::from_i64_rows(f, &[[1, 2], [3, 4]]);
        let y = Matrix::from_i64_rows(f, &[[5, 6], [0, 1]]);
        let k2 = build_k(&x, &y).unwrap().pow(2).unwrap();
        let mut g = BlockGrid::uniform(f, 5, 2);
        g.set(0, 3, y).unwrap();
        assert_eq!(k2, g.assemble().unwrap());
    }

    #[test]
    fn m_pair_example() {
        let f = gf(3);
        let w = build_m_pair(&scalar_matrix(f, 2), &scalar_matrix(f, 1), &f.one()).unwrap();
        let d1: Vec<i64> = vec![1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 1, 1, 2];
        let d2: Vec<i64> = vec![0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1];
        let diag = |d: &[i64]| Matrix::diagonal(f, &d.iter().map(|&v| f.from_i64(v)).collect::<Vec<_>>());
        assert_eq!(w.pair.a(), &diag(&d1));
        assert_eq!(w.pair.b(), &diag(&d2));
        assert_eq!(w.pair.a().rank(), 7);
        assert_eq!(w.pair.b().rank(), 9);
        assert!(w.warnings.is_empty());
    }

    #[test]
    fn lambda_validation() {
        let f = gf(3);
        let a = scalar_matrix(f, 1);
        assert!(matches!(
            build_m_pair(&a, &a, &f.zero()),
            Err(Error::InvalidLambda { .. })
        ));
        assert!(matches!(
            build_m_pair(&a, &a, &f.from_i64(-1)),
            Err(Error::InvalidLambda { .. })
        ));
        let g2 = gf(2);
        let w = build_m_pair(&scalar_matrix(g2, 1), &scalar_matrix(g2, 0), &g2.one()).unwrap();
        assert_eq!(w.warnings, vec![GF2_WARNING.to_string()]);
        assert!(build_m_pair(&scalar_matrix(g2, 1), &scalar_matrix(g2, 0), &g2.zero()).is_err());
        let q = Field::Rational;
        assert!(build_m_pair(&scalar_matrix(q, 1), &scalar_matrix(q, 0), &q.parse("-1").unwrap()).is_err());
        assert!(build_m_pair(&scalar_matrix(q, 1), &scalar_matrix(q, 0), &q.parse("1/2").unwrap()).is_ok());
    }

    #[test]
    fn lifts() {
        let f = gf(3);
        assert!(lift_gp_witness(&Matrix::identity(f, 2)).unwrap().is_identity());
        let two = scalar_matrix(f, 2);
        assert_eq!(lift_gp_witness(&two).unwrap(), Matrix::scalar(f, 5, &f.from_u64(2)));
        assert!(lift_weak_witness(&Matrix::identity(f, 3)).unwrap().is_identity());
        let lw = lift_weak_witness(&two).unwrap();
        let mut diag = vec![f.one(); 12];
        diag.push(f.from_u64(2));
        assert_eq!(lw, Matrix::diagonal(f, &diag));
        assert_eq!(lift_full_witness(&Matrix::identity(f, 2)).unwrap().rows(), 35 * 2 + 6);
    }

    #[test]
    fn full_reduce_n1_gf3() {
        let f = gf(3);
        let w = full_reduce(&scalar_matrix(f, 1), &scalar_matrix(f, 2), &default_lambda(f)).unwrap();
        assert_eq!(w.pair.size(), 41);
        assert_eq!(w.m, 5);
        assert!(w.pair.commutes());
        let (det, inv) = w.pair.a().add(w.pair.b()).unwrap().det_inv().unwrap();
        assert!(!det.is_zero());
        assert!(inv.is_some());
    }

    #[test]
    fn full_reduce_over_gf2_warns() {
        let f = gf(2);
        let w = full_reduce(&scalar_matrix(f, 1), &scalar_matrix(f, 1), &f.one()).unwrap();
        assert!(w.pair.commutes());
        assert!(!w.sum_is_nonsingular());
        assert_eq!(w.warnings, vec![GF2_WARNING.to_string()]);
    }

    #[test]
    fn lifted_witnesses_verify() {
        let f = gf(5);
        let x = Matrix::from_i64_rows(f, &[[1, 2], [0, 3]]);
        let y = Matrix::from_i64_rows(f, &[[4, 0], [1, 1]]);
        let s = Matrix::from_i64_rows(f, &[[2, 1], [1, 1]]);
        let xy = MatrixPair::new(x.clone(), y.clone()).unwrap().conjugate(&s).unwrap();
        let (x2, y2) = xy.into_parts();

        let gp1 = gp_reduce(&x, &y).unwrap();
        let gp2 = gp_reduce(&x2, &y2).unwrap();
        assert!(verify_similarity(&gp1.pair, &gp2.pair, &lift_gp_witness(&s).unwrap()));

        let lambda = default_lambda(f);
        let w1 = build_m_pair(&x, &y, &lambda).unwrap();
        let w2 = build_m_pair(&x2, &y2, &lambda).unwrap();
        let id = PencilTransform::identity(f);
        assert!(verify_weak(&w1.pair, &w2.pair, &id, &lift_weak_witness(&s).unwrap()));

        let full1 = full_reduce(&x, &y, &lambda).unwrap();
        let full2 = full_reduce(&x2, &y2, &lambda).unwrap();
        assert!(verify_weak(&full1.pair, &full2.pair, &id, &lift_full_witness(&s).unwrap()));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_square(p: u64, n: usize) -> impl Strategy<Value = Matrix> {
            proptest::collection::vec(0..p, n * n).prop_map(move |v| {
                let f = Field::prime(p).unwrap();
                Matrix::from_fn(f, n, n, |i, j| f.from_u64(v[i * n + j]))
            })
        }

        fn arb_xy() -> impl Strategy<Value = (Matrix, Matrix)> {
            (1usize..=3).prop_flat_map(|n| (arb_square(5, n), arb_square(5, n)))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(40))]

            #[test]
            fn gp_invariants((x, y) in arb_xy()) {
                let gp = gp_reduce(&x, &y).unwrap();
                let (j, k) = (gp.pair.a(), gp.pair.b());
                prop_assert!(j.commutes_with(k).unwrap());
                prop_assert!(j.pow(4).unwrap().is_zero());
                prop_assert!(k.pow(3).unwrap().is_zero());
                let n = x.rows();
                let jk = j.matmul(k).unwrap();
                prop_assert_eq!(jk.submatrix(0, 3 * n, n, n).unwrap(), x.clone());
                let mut only = BlockGrid::uniform(x.field(), 5, n);
                only.set(0, 3, x).unwrap();
                prop_assert_eq!(jk, only.assemble().unwrap());
            }

            #[test]
            fn m_pair_rank_bounds(
                (a, b) in (1usize..=2).prop_flat_map(|m| (arb_square(5, m), arb_square(5, m))),
                co in proptest::collection::vec(0u64..5, 4),
            ) {
                let f = a.field();
                let m = a.rows();
                let w = build_m_pair(&a, &b, &default_lambda(f)).unwrap();
                let (m1, m2) = (w.pair.a(), w.pair.b());
                prop_assert!(m1.rank() <= 4 * m + 3);
                prop_assert!(m2.rank() <= 5 * m + 4);
                let [al, be, ga, de] = [0, 1, 2, 3].map(|i| f.from_u64(co[i]));
                if !be.is_zero() {
                    prop_assert!(m1.lin_comb(&al, m2, &be).unwrap().rank() >= 4 * m + 4);
                }
                if !ga.is_zero() && !de.is_zero() {
                    prop_assert!(m1.lin_comb(&ga, m2, &de).unwrap().rank() >= 5 * m + 5);
                }
            }

            #[test]
            fn full_reduce_commutes_and_sum_invertible((x, y) in (1usize..=2).prop_flat_map(|n| (arb_square(5, n), arb_square(5, n)))) {
                let w = full_reduce(&x, &y, &default_lambda(x.field())).unwrap();
                prop_assert!(w.pair.commutes());
                prop_assert!(w.sum_is_nonsingular());
                prop_assert_eq!(w.pair.size(), 35 * x.rows() + 6);
            }
        }
    }
}
