//! The Lie algebra `L(V)` of bordered matrices `(A|a)` with `A ∈ V`,
//! `a ∈ Fⁿ`, and bracket the commutator `[(A|a),(B|b)] = (0|Ab − Ba)`.
//!
//! Elements are coordinate vectors in the basis `x, y, e₁, …, eₙ`, where
//! `x = (A|0)`, `y = (B|0)` for the stored basis `(A, B)` of `V` and
//! `eᵢ = (0|eᵢ)`. The nonzero structure constants are `[x, eⱼ] = A·eⱼ` and
//! `[y, eⱼ] = B·eⱼ`.

use std::collections::BTreeMap;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::pencil::{contains_nonsingular, TwoDimSpace};
use crate::similarity::GF2_WARNING;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    field: Field,
    /// `[b_i, b_j]` for `i < j`; absent pairs bracket to zero.
    structure: BTreeMap<(usize, usize), Vec<Scalar>>,
    source: TwoDimSpace,
    warnings: Vec<String>,
}

/// Linear map between coordinate spaces of two `L(V)`s, as a matrix acting on
/// column vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieIso {
    phi: Matrix,
}

impl LieIso {
    pub fn new(phi: Matrix) -> Result<Self> {
        if !phi.is_square() {
            return Err(Error::Shape(format!("isomorphism matrix is {:?}", phi.shape())));
        }
        Ok(LieIso { phi })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.phi
    }

    pub fn apply(&self, u: &[Scalar]) -> Vec<Scalar> {
        self.phi
            .matmul(&Matrix::column(self.phi.field(), u))
            .expect("coordinate length matches")
            .col(0)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &LieIso) -> Result<LieIso> {
        LieIso::new(self.phi.matmul(&first.phi)?)
    }
}

impl LieAlgebra {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Size `n` of the underlying matrices.
    pub fn n(&self) -> usize {
        self.dim - 2
    }

    pub fn source(&self) -> &TwoDimSpace {
        &self.source
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn basis_labels(&self) -> Vec<String> {
        let mut labels = vec!["x".to_string(), "y".to_string()];
        labels.extend((1..=self.n()).map(|i| format!("e{i}")));
        labels
    }

    /// Nonzero structure constants `(i, j, [b_i, b_j])`, `i < j`.
    pub fn structure(&self) -> impl Iterator<Item = (usize, usize, &[Scalar])> {
        self.structure.iter().map(|(&(i, j), v)| (i, j, v.as_slice()))
    }

    pub fn basis_vector(&self, i: usize) -> Vec<Scalar> {
        let mut v = vec![self.field.zero(); self.dim];
        v[i] = self.field.one();
        v
    }

    fn basis_bracket(&self, i: usize, j: usize) -> Vec<Scalar> {
        let zero = || vec![self.field.zero(); self.dim];
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => zero(),
            std::cmp::Ordering::Less => self.structure.get(&(i, j)).cloned().unwrap_or_else(zero),
            std::cmp::Ordering::Greater => self
                .structure
                .get(&(j, i))
                .map(|v| v.iter().map(|s| -s).collect())
                .unwrap_or_else(zero),
        }
    }

    fn check_coords(&self, u: &[Scalar]) -> Result<()> {
        if u.len() != self.dim {
            return Err(Error::Shape(format!(
                "coordinate vector of length {}, algebra has dimension {}",
                u.len(),
                self.dim
            )));
        }
        if let Some(bad) = u.iter().find(|s| s.field() != self.field) {
            return Err(Error::FieldMismatch(self.field, bad.field()));
        }
        Ok(())
    }

    /// `(u_x·A + u_y·B | a)` as an `(n+1) x (n+1)` matrix.
    pub fn tilde_embed(&self, u: &[Scalar]) -> Result<Matrix> {
        self.check_coords(u)?;
        let n = self.n();
        let top = self.source.a().lin_comb(&u[0], self.source.b(), &u[1])?;
        Ok(Matrix::from_fn(self.field, n + 1, n + 1, |i, j| {
            if i == n {
                self.field.zero()
            } else if j == n {
                u[2 + i].clone()
            } else {
                top[(i, j)].clone()
            }
        }))
    }

    /// Coordinates of an `(n+1) x (n+1)` matrix lying in `Ṽ`, or `None` when it does not.
    pub fn tilde_coords(&self, m: &Matrix) -> Result<Option<Vec<Scalar>>> {
        let n = self.n();
        if m.shape() != (n + 1, n + 1) || m.field() != self.field {
            return Err(Error::Shape(format!("expected a {0}x{0} matrix over {1}", n + 1, self.field)));
        }
        if !m.row(n).iter().all(Scalar::is_zero) {
            return Ok(None);
        }
        let Some((c1, c2)) = self.source.coordinates(&m.submatrix(0, 0, n, n)?)? else {
            return Ok(None);
        };
        let mut out = vec![c1, c2];
        out.extend((0..n).map(|i| m[(i, n)].clone()));
        Ok(Some(out))
    }
}

/// Builds `L(V)` and checks the Jacobi identity on every basis triple.
pub fn lie_build(v: &TwoDimSpace) -> Result<LieAlgebra> {
    let n = v.size();
    let field = v.field();
    let dim = n + 2;
    let mut structure = BTreeMap::new();
    for (row, gen) in [v.a(), v.b()].into_iter().enumerate() {
        for j in 0..n {
            let column = gen.col(j);
            if column.iter().all(Scalar::is_zero) {
                continue;
            }
            let mut c = vec![field.zero(), field.zero()];
            c.extend(column);
            structure.insert((row, 2 + j), c);
        }
    }
    let warnings = if field.is_gf2() {
        vec![GF2_WARNING.to_string()]
    } else {
        Vec::new()
    };
    let l = LieAlgebra {
        dim,
        field,
        structure,
        source: v.clone(),
        warnings,
    };
    if !jacobi_holds(&l) {
        return Err(Error::Internal("Jacobi identity fails on L(V)".into()));
    }
    Ok(l)
}

/// Bilinear extension of the structure constants.
pub fn bracket(l: &LieAlgebra, u: &[Scalar], v: &[Scalar]) -> Result<Vec<Scalar>> {
    l.check_coords(u)?;
    l.check_coords(v)?;
    let mut out = vec![l.field.zero(); l.dim];
    for (&(i, j), c) in &l.structure {
        let coeff = &(&u[i] * &v[j]) - &(&u[j] * &v[i]);
        if coeff.is_zero() {
            continue;
        }
        for (o, ck) in out.iter_mut().zip(c) {
            *o = &*o + &(&coeff * ck);
        }
    }
    Ok(out)
}

fn add_vec(a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Jacobi identity on all `C(dim, 3)` basis triples (bilinearity covers the rest).
pub fn jacobi_holds(l: &LieAlgebra) -> bool {
    let d = l.dim;
    let br = |u: &[Scalar], v: &[Scalar]| bracket(l, u, v).expect("coordinates sized by construction");
    for i in 0..d {
        for j in i + 1..d {
            for k in j + 1..d {
                let (bi, bj, bk) = (l.basis_vector(i), l.basis_vector(j), l.basis_vector(k));
                let sum = add_vec(
                    &add_vec(&br(&bi, &l.basis_bracket(j, k)), &br(&bj, &l.basis_bracket(k, i))),
                    &br(&bk, &l.basis_bracket(i, j)),
                );
                if !sum.iter().all(Scalar::is_zero) {
                    return false;
                }
            }
        }
    }
    true
}

/// Echelonized basis of `[L, L]`, the span of all basis brackets.
pub fn derived_subalgebra(l: &LieAlgebra) -> (usize, Vec<Vec<Scalar>>) {
    let rows: Vec<Scalar> = l.structure.values().flatten().cloned().collect();
    let count = l.structure.len();
    let m = Matrix::new(l.field, count, l.dim, rows).expect("structure vectors have length dim");
    let r = m.rref();
    let basis = (0..r.rank).map(|i| r.matrix.row(i).to_vec()).collect();
    (r.rank, basis)
}

/// True iff `phi` is invertible and `phi[b_i, b_j] = [phi b_i, phi b_j]` for all basis pairs.
pub fn verify_lie_iso(l: &LieAlgebra, l2: &LieAlgebra, phi: &LieIso) -> bool {
    if l.dim != l2.dim || l.field != l2.field {
        return false;
    }
    let m = phi.matrix();
    if m.field() != l.field || m.shape() != (l.dim, l.dim) || !m.is_invertible() {
        return false;
    }
    let images: Vec<Vec<Scalar>> = (0..l.dim).map(|i| m.col(i)).collect();
    for i in 0..l.dim {
        for j in i + 1..l.dim {
            let lhs = phi.apply(&l.basis_bracket(i, j));
            match bracket(l2, &images[i], &images[j]) {
                Ok(rhs) if rhs == lhs => {}
                _ => return false,
            }
        }
    }
    true
}

/// Isomorphism `L(V) → L(V′)` induced by `X ↦ R·X·R⁻¹`, `R = S ⊕ I₁`.
///
/// Requires `(S·A·S⁻¹, S·B·S⁻¹) = P·(A′, B′)` on the stored bases, i.e.
/// `S·A·S⁻¹ = p₁₁A′ + p₁₂B′` and `S·B·S⁻¹ = p₂₁A′ + p₂₂B′`. The result acts as
/// `Pᵀ` on `(x, y)`-coordinates (row `k` of `P` is the image of the `k`-th
/// generator) and as `S` on `e`-coordinates.
pub fn iso_from_similarity(v: &TwoDimSpace, v2: &TwoDimSpace, s: &Matrix, p: &Matrix) -> Result<LieIso> {
    let n = v.size();
    if v2.size() != n || v.field() != v2.field() {
        return Err(Error::Shape("spaces differ in size or field".into()));
    }
    let field = v.field();
    if s.shape() != (n, n) || p.shape() != (2, 2) || s.field() != field || p.field() != field {
        return Err(Error::Shape(format!(
            "S must be {n}x{n} and P must be 2x2 over {field}"
        )));
    }
    let s_inv = s
        .inverse()?
        .ok_or_else(|| Error::Precondition("S is singular".into()))?;
    if !p.is_invertible() {
        return Err(Error::Precondition("P is singular".into()));
    }
    for (k, gen) in [v.a(), v.b()].into_iter().enumerate() {
        let conj = s.matmul(gen)?.matmul(&s_inv)?;
        let target = v2.a().lin_comb(&p[(k, 0)], v2.b(), &p[(k, 1)])?;
        if conj != target {
            return Err(Error::Precondition(format!(
                "S·{}·S⁻¹ is not row {} of P applied to the basis of V′",
                ["A", "B"][k],
                k + 1
            )));
        }
    }
    let phi = LieIso::new(Matrix::direct_sum(field, &[&p.transpose(), s])?)?;
    let (l, l2) = (lie_build(v)?, lie_build(v2)?);
    if !verify_lie_iso(&l, &l2, &phi) {
        return Err(Error::Internal("induced map does not preserve brackets".into()));
    }
    Ok(phi)
}

/// Recovers `(S, P)` from an isomorphism `phi : L(V) → L(V′)` of algebras
/// whose spaces contain nonsingular matrices: `S = [phi(e₁) … phi(eₙ)]` and
/// row `k` of `P` holds the `(x, y)`-coordinates of the image of the `k`-th
/// generator. On return `B·S = S·A` for each generator `A` with image `B`.
pub fn similarity_from_iso(l: &LieAlgebra, l2: &LieAlgebra, phi: &LieIso) -> Result<(Matrix, Matrix)> {
    if !verify_lie_iso(l, l2, phi) {
        return Err(Error::Precondition("phi is not a Lie algebra isomorphism".into()));
    }
    for (name, alg) in [("V", l), ("V′", l2)] {
        if contains_nonsingular(alg.source())?.is_none() {
            return Err(Error::Hypothesis(format!("{name} contains no nonsingular matrix")));
        }
    }
    let n = l.n();
    let field = l.field;
    let m = phi.matrix();
    for i in 0..n {
        if !m[(0, 2 + i)].is_zero() || !m[(1, 2 + i)].is_zero() {
            return Err(Error::Hypothesis(
                "phi does not map the derived subalgebra onto the derived subalgebra".into(),
            ));
        }
    }
    let s = m.submatrix(2, 2, n, n)?;
    let p = m.submatrix(0, 0, 2, 2)?.transpose();
    for (k, gen) in [l.source.a(), l.source.b()].into_iter().enumerate() {
        let image = l2.source.a().lin_comb(&p[(k, 0)], l2.source.b(), &p[(k, 1)])?;
        if image.matmul(&s)? != s.matmul(gen)? {
            return Err(Error::Internal("extracted S fails B·S = S·A".into()));
        }
    }
    debug_assert_eq!(s.field(), field);
    Ok((s, p))
}

/// Whether `R·X·R⁻¹ ∈ Ṽ′` for every generator `X` of `Ṽ`; since conjugation
/// is injective and the dimensions agree this means `R·Ṽ·R⁻¹ = Ṽ′`.
pub fn tilde_conjugates_into(l: &LieAlgebra, l2: &LieAlgebra, r: &Matrix) -> Result<bool> {
    if l.dim != l2.dim || l.field != l2.field {
        return Ok(false);
    }
    let r_inv = r
        .inverse()?
        .ok_or_else(|| Error::Precondition("R is singular".into()))?;
    for i in 0..l.dim {
        let x = l.tilde_embed(&l.basis_vector(i))?;
        let conj = r.matmul(&x)?.matmul(&r_inv)?;
        if l2.tilde_coords(&conj)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `S ⊕ I₁`.
pub fn border(s: &Matrix) -> Result<Matrix> {
    Ok(Matrix::direct_sum(s.field(), &[s, &Matrix::identity(s.field(), 1)])?)
}

impl Serialize for LieAlgebra {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            i: usize,
            j: usize,
            bracket: &'a [Scalar],
        }
        let structure: Vec<Entry> = self
            .structure()
            .map(|(i, j, bracket)| Entry { i, j, bracket })
            .collect();
        let mut st = ser.serialize_struct("LieAlgebra", 5)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("field", &self.field)?;
        st.serialize_field("basis", &self.basis_labels())?;
        st.serialize_field("structure", &structure)?;
        st.serialize_field("source", &self.source)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for LieAlgebra {
    /// Rebuilds from `source` and rejects documents whose listed structure
    /// constants disagree with it.
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Entry {
            i: usize,
            j: usize,
            bracket: Vec<String>,
        }
        #[derive(Deserialize)]
        struct Repr {
            dim: usize,
            field: Field,
            #[serde(default)]
            #[allow(dead_code)]
            basis: Option<Vec<String>>,
            structure: Vec<Entry>,
            source: TwoDimSpace,
        }
        let r = Repr::deserialize(de)?;
        let l = lie_build(&r.source).map_err(de::Error::custom)?;
        if r.dim != l.dim || r.field != l.field {
            return Err(de::Error::custom("dim/field disagree with the source space"));
        }
        let mut listed = BTreeMap::new();
        for e in r.structure {
            let v = e
                .bracket
                .iter()
                .map(|s| l.field.parse(s))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(de::Error::custom)?;
            if v.iter().all(Scalar::is_zero) {
                continue;
            }
            listed.insert((e.i, e.j), v);
        }
        if listed != l.structure {
            return Err(de::Error::custom("structure constants disagree with the source space"));
        }
        Ok(l)
    }
}

impl Serialize for LieIso {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.phi.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for LieIso {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        LieIso::new(Matrix::deserialize(de)?).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pencil::space_make;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn unit(f: Field, n: usize, i: usize, j: usize) -> Matrix {
        let mut e = Matrix::zeros(f, n, n);
        e[(i, j)] = f.one();
        e
    }

    fn coords(f: Field, v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| f.from_i64(x)).collect()
    }

    fn example(f: Field) -> LieAlgebra {
        lie_build(&space_make(Matrix::identity(f, 2), unit(f, 2, 0, 1)).unwrap()).unwrap()
    }

    #[test]
    fn structure_of_identity_and_e12() {
        let f = gf(3);
        let l = example(f);
        assert_eq!(l.dim(), 4);
        assert_eq!(l.basis_labels(), ["x", "y", "e1", "e2"]);
        let b = |i, j| bracket(&l, &l.basis_vector(i), &l.basis_vector(j)).unwrap();
        assert_eq!(b(0, 2), coords(f, &[0, 0, 1, 0]));
        assert_eq!(b(0, 3), coords(f, &[0, 0, 0, 1]));
        assert_eq!(b(1, 2), coords(f, &[0, 0, 0, 0]));
        assert_eq!(b(1, 3), coords(f, &[0, 0, 1, 0]));
        assert_eq!(b(0, 1), coords(f, &[0; 4]));
        assert_eq!(b(2, 3), coords(f, &[0; 4]));
    }

    #[test]
    fn bracket_examples() {
        let f = gf(3);
        let l = example(f);
        let u = coords(f, &[1, 0, 0, 1]);
        assert_eq!(bracket(&l, &u, &u).unwrap(), coords(f, &[0; 4]));
        let y = l.basis_vector(1);
        assert_eq!(bracket(&l, &u, &y).unwrap(), coords(f, &[0, 0, -1, 0]));
        assert!(bracket(&l, &coords(f, &[1, 0]), &y).is_err());
    }

    #[test]
    fn derived_of_examples() {
        let f = gf(3);
        let (d, basis) = derived_subalgebra(&example(f));
        assert_eq!(d, 2);
        assert!(basis.iter().all(|v| v[0].is_zero() && v[1].is_zero()));
        let singular = lie_build(&space_make(unit(f, 3, 0, 2), unit(f, 3, 1, 2)).unwrap()).unwrap();
        // Columns of E13 and E23 are e1 and e2 (from column 3): span is 2-dimensional.
        assert_eq!(derived_subalgebra(&singular).0, 2);
    }

    #[test]
    fn identity_iso() {
        let f = gf(3);
        let l = example(f);
        let id = LieIso::new(Matrix::identity(f, 4)).unwrap();
        assert!(verify_lie_iso(&l, &l, &id));
        let (s, p) = similarity_from_iso(&l, &l, &id).unwrap();
        assert!(s.is_identity() && p.is_identity());
    }

    #[test]
    fn scaling_e1_breaks_brackets() {
        let f = gf(3);
        let l = example(f);
        let phi = LieIso::new(Matrix::diagonal(f, &coords(f, &[1, 1, 2, 1]))).unwrap();
        assert!(!verify_lie_iso(&l, &l, &phi));
        assert!(matches!(similarity_from_iso(&l, &l, &phi), Err(Error::Precondition(_))));
    }

    #[test]
    fn automorphism_from_unipotent_conjugation() {
        let f = gf(3);
        let v = space_make(Matrix::identity(f, 2), unit(f, 2, 0, 1)).unwrap();
        let s = Matrix::from_i64_rows(f, &[[1, 1], [0, 1]]);
        let phi = iso_from_similarity(&v, &v, &s, &Matrix::identity(f, 2)).unwrap();
        assert_eq!(phi.matrix(), &Matrix::direct_sum(f, &[&Matrix::identity(f, 2), &s]).unwrap());
        let l = lie_build(&v).unwrap();
        let (s2, p2) = similarity_from_iso(&l, &l, &phi).unwrap();
        assert_eq!(s2, s);
        assert!(p2.is_identity());
    }

    #[test]
    fn scaled_basis_gives_diagonal_p() {
        let f = gf(3);
        let a = Matrix::identity(f, 2);
        let b = unit(f, 2, 0, 1);
        let v = space_make(a.clone(), b.clone()).unwrap();
        let v2 = space_make(a, b.scale(&f.from_u64(2))).unwrap();
        let p = Matrix::diagonal(f, &coords(f, &[1, 2]));
        let phi = iso_from_similarity(&v, &v2, &Matrix::identity(f, 2), &p).unwrap();
        let (l, l2) = (lie_build(&v).unwrap(), lie_build(&v2).unwrap());
        assert!(verify_lie_iso(&l, &l2, &phi));
        let (s, p_back) = similarity_from_iso(&l, &l2, &phi).unwrap();
        assert!(s.is_identity());
        assert_eq!(p_back, p);
        assert!(iso_from_similarity(&v, &v2, &Matrix::identity(f, 2), &Matrix::identity(f, 2)).is_err());
    }

    #[test]
    fn composite_iso_composes_witnesses() {
        let f = gf(5);
        let v = space_make(Matrix::identity(f, 2), Matrix::from_i64_rows(f, &[[1, 2], [0, 1]])).unwrap();
        let s1 = Matrix::from_i64_rows(f, &[[2, 1], [1, 1]]);
        let s2 = Matrix::from_i64_rows(f, &[[1, 3], [0, 2]]);
        let conj = |w: &TwoDimSpace, s: &Matrix| w.conjugate(&s.inverse().unwrap().unwrap()).unwrap();
        let v1 = conj(&v, &s1);
        let v2 = conj(&v1, &s2);
        let id = Matrix::identity(f, 2);
        let phi1 = iso_from_similarity(&v, &v1, &s1, &id).unwrap();
        let phi2 = iso_from_similarity(&v1, &v2, &s2, &id).unwrap();
        let (l, l2) = (lie_build(&v).unwrap(), lie_build(&v2).unwrap());
        let (s, _) = similarity_from_iso(&l, &l2, &phi2.after(&phi1).unwrap()).unwrap();
        assert_eq!(s, s2.matmul(&s1).unwrap());
    }

    #[test]
    fn hypothesis_without_nonsingular_member() {
        let f = gf(3);
        let l = lie_build(&space_make(unit(f, 3, 0, 2), unit(f, 3, 1, 2)).unwrap()).unwrap();
        let id = LieIso::new(Matrix::identity(f, 5)).unwrap();
        assert!(verify_lie_iso(&l, &l, &id));
        assert!(matches!(similarity_from_iso(&l, &l, &id), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn tilde_roundtrip_and_membership() {
        let f = gf(5);
        let l = example(f);
        let u = coords(f, &[2, 3, 1, 4]);
        let m = l.tilde_embed(&u).unwrap();
        assert_eq!(l.tilde_coords(&m).unwrap(), Some(u));
        let mut off = m.clone();
        off[(2, 0)] = f.one();
        assert_eq!(l.tilde_coords(&off).unwrap(), None);
        let mut outside = Matrix::zeros(f, 3, 3);
        outside[(1, 0)] = f.one();
        assert_eq!(l.tilde_coords(&outside).unwrap(), None);
    }

    #[test]
    fn gf2_algebra_warns() {
        let f = gf(2);
        assert_eq!(example(f).warnings(), [GF2_WARNING.to_string()]);
    }

    #[test]
    fn json_roundtrip_and_tamper_detection() {
        let f = gf(3);
        let l = example(f);
        let text = serde_json::to_string(&l).unwrap();
        let back: LieAlgebra = serde_json::from_str(&text).unwrap();
        assert_eq!(back, l);
        let tampered = text.replacen(r#""bracket":["0","0","1","0"]"#, r#""bracket":["0","0","2","0"]"#, 1);
        assert_ne!(tampered, text);
        assert!(serde_json::from_str::<LieAlgebra>(&tampered).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_space(p: u64, n: usize) -> impl Strategy<Value = TwoDimSpace> {
            // span(C, q(C)) with q of degree < n; retried by filtering.
            (proptest::collection::vec(0..p, n * n), proptest::collection::vec(0..p, n))
                .prop_filter_map("dependent basis", move |(c, q)| {
                    let f = Field::prime(p).unwrap();
                    let c = Matrix::from_fn(f, n, n, |i, j| f.from_u64(c[i * n + j]));
                    let mut qc = Matrix::zeros(f, n, n);
                    let mut power = Matrix::identity(f, n);
                    for coef in &q {
                        qc = qc.add(&power.scale(&f.from_u64(*coef))).unwrap();
                        power = power.matmul(&c).unwrap();
                    }
                    space_make(c, qc).ok()
                })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn bracket_matches_commutator(
                v in (2usize..=4).prop_flat_map(|n| arb_space(5, n)),
                raw in proptest::collection::vec(0u64..5, 12),
            ) {
                let l = lie_build(&v).unwrap();
                let f = l.field();
                let d = l.dim();
                let u: Vec<Scalar> = raw[..d].iter().map(|&x| f.from_u64(x)).collect();
                let w: Vec<Scalar> = raw[6..6 + d].iter().map(|&x| f.from_u64(x)).collect();
                let comm = l.tilde_embed(&u).unwrap().commutator(&l.tilde_embed(&w).unwrap()).unwrap();
                prop_assert_eq!(l.tilde_coords(&comm).unwrap(), Some(bracket(&l, &u, &w).unwrap()));
            }

            #[test]
            fn jacobi_and_derived_dimension(v in (2usize..=4).prop_flat_map(|n| arb_space(3, n))) {
                let l = lie_build(&v).unwrap();
                prop_assert!(jacobi_holds(&l));
                let (d, basis) = derived_subalgebra(&l);
                prop_assert!(d <= v.size());
                prop_assert!(basis.iter().all(|b| b[0].is_zero() && b[1].is_zero()));
                if contains_nonsingular(&v).unwrap().is_some() {
                    prop_assert_eq!(d, v.size());
                }
            }
        }
    }
}
