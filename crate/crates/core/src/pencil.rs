//! Weak similarity and two-dimensional commuting matrix spaces.
//!
//! Pairs `(A, B)` and `(A', B')` are weakly similar when
//! `S⁻¹·(αA + βB, γA + δB)·S = (A', B')` for an invertible `S` and a
//! nonsingular pencil transform `[[α, β], [γ, δ]]`. A two-dimensional space
//! given by an ordered basis is similar to another exactly when the bases are
//! weakly similar.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::similarity::{are_similar, BudgetReport, CertificateKind, Decision, MatrixPair, SearchBudget, Verdict};

/// Nonsingular 2x2 matrix `[[α, β], [γ, δ]]` acting on a pair as
/// `(A, B) ↦ (αA + βB, γA + δB)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PencilTransform {
    t: Matrix,
}

impl PencilTransform {
    pub fn new(t: Matrix) -> Result<Self> {
        if t.shape() != (2, 2) {
            return Err(Error::Shape(format!("pencil transform must be 2x2, got {:?}", t.shape())));
        }
        if !t.is_invertible() {
            return Err(Error::SingularTransform);
        }
        Ok(PencilTransform { t })
    }

    pub fn from_entries(field: Field, alpha: Scalar, beta: Scalar, gamma: Scalar, delta: Scalar) -> Result<Self> {
        Self::new(Matrix::new(field, 2, 2, vec![alpha, beta, gamma, delta])?)
    }

    pub fn identity(field: Field) -> Self {
        PencilTransform {
            t: Matrix::identity(field, 2),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.t
    }

    pub fn field(&self) -> Field {
        self.t.field()
    }

    pub fn alpha(&self) -> &Scalar {
        &self.t[(0, 0)]
    }

    pub fn beta(&self) -> &Scalar {
        &self.t[(0, 1)]
    }

    pub fn gamma(&self) -> &Scalar {
        &self.t[(1, 0)]
    }

    pub fn delta(&self) -> &Scalar {
        &self.t[(1, 1)]
    }

    /// `other ∘ self`: applying `self` and then `other` is the action of `other·self`.
    pub fn then(&self, other: &PencilTransform) -> PencilTransform {
        PencilTransform {
            t: other.t.matmul(&self.t).expect("2x2 product"),
        }
    }

    pub fn inverse(&self) -> PencilTransform {
        PencilTransform {
            t: self.t.inverse().expect("2x2").expect("nonsingular by construction"),
        }
    }
}

/// All nonsingular transforms over GF(p), lexicographic in `(α, β, γ, δ)`.
pub fn nonsingular_transforms(field: Field) -> Result<Vec<PencilTransform>> {
    let els = field.elements()?;
    let mut out = Vec::new();
    for a in &els {
        for b in &els {
            for c in &els {
                for d in &els {
                    if (a * d - b * c).is_zero() {
                        continue;
                    }
                    out.push(PencilTransform {
                        t: Matrix::new(field, 2, 2, vec![a.clone(), b.clone(), c.clone(), d.clone()])?,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// `(αA + βB, γA + δB)`.
pub fn pencil_transform(p: &MatrixPair, t: &PencilTransform) -> Result<MatrixPair> {
    if p.field() != t.field() {
        return Err(Error::FieldMismatch(p.field(), t.field()));
    }
    MatrixPair::new(
        p.a().lin_comb(t.alpha(), p.b(), t.beta())?,
        p.a().lin_comb(t.gamma(), p.b(), t.delta())?,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakWitness {
    pub t: PencilTransform,
    pub s: Matrix,
}

impl Serialize for WeakWitness {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("WeakWitness", 2)?;
        st.serialize_field("t", self.t.matrix())?;
        st.serialize_field("s", &self.s)?;
        st.end()
    }
}

/// True iff `S` is invertible, `T` nonsingular and `S⁻¹·T(L)·S = R`.
pub fn verify_weak(l: &MatrixPair, r: &MatrixPair, t: &PencilTransform, s: &Matrix) -> bool {
    if !t.matrix().is_invertible() {
        return false;
    }
    match pencil_transform(l, t) {
        Ok(lt) => crate::similarity::verify_similarity(&lt, r, s),
        Err(_) => false,
    }
}

/// `rank(u·A + v·B - c·I)` for every `(u, v, c)` in GF(p)^3, indexed `u·p² + v·p + c`.
fn rank_table(pair: &MatrixPair, els: &[Scalar]) -> Vec<usize> {
    let n = pair.size();
    let field = pair.field();
    let mut out = Vec::with_capacity(els.len().pow(3));
    for u in els {
        for v in els {
            let member = pair.a().lin_comb(u, pair.b(), v).expect("pair shapes agree");
            for c in els {
                let shifted = member.sub(&Matrix::scalar(field, n, c)).expect("square");
                out.push(shifted.rank());
            }
        }
    }
    out
}

/// Largest characteristic for which the rank-table prefilter is computed.
const PREFILTER_MAX_PRIME: u64 = 7;

/// Decides weak similarity.
///
/// Over GF(p) every nonsingular `T` is tried in canonical order and
/// [`are_similar`] is asked whether `T(L)` and `R` are similar. A candidate
/// `T` is skipped without an inner call when some member `s·T(L).a + t·T(L).b - cI`
/// has a different rank from the matching member of `R`; similar pairs never
/// differ there, so skipping never changes the verdict.
///
/// With an explicit candidate list (the only option over the rationals) the
/// listed transforms are tried in order, and exhausting the list yields
/// `inconclusive`.
pub fn are_weakly_similar(
    l: &MatrixPair,
    r: &MatrixPair,
    budget: &SearchBudget,
    candidates: Option<&[PencilTransform]>,
) -> Result<Decision<WeakWitness>> {
    l.check_compatible(r)?;
    let field = l.field();
    if let Some(ts) = candidates {
        let mut report = BudgetReport::default();
        for t in ts {
            if t.field() != field {
                return Err(Error::FieldMismatch(field, t.field()));
            }
            report.candidates_tried += 1;
            let inner = are_similar(&pencil_transform(l, t)?, r, budget)?;
            report.search_dimension = report.search_dimension.max(inner.budget.search_dimension);
            if let Some(s) = inner.witness {
                return Ok(Decision::yes(WeakWitness { t: t.clone(), s }, inner.certificate, report));
            }
        }
        return Ok(Decision::inconclusive(report));
    }
    let Some(p) = field.modulus() else {
        return Ok(Decision::inconclusive(BudgetReport::default()));
    };

    let els = field.elements()?;
    let filter = (p <= PREFILTER_MAX_PRIME).then(|| (rank_table(l, &els), rank_table(r, &els)));
    let idx = |s: &Scalar| s.residue().expect("prime field") as usize;
    let pu = p as usize;

    let mut report = BudgetReport::default();
    let mut any_inconclusive = false;
    for t in nonsingular_transforms(field)? {
        report.candidates_tried += 1;
        if let Some((lt, rt)) = &filter {
            let consistent = els.iter().all(|s| {
                els.iter().all(|tt| {
                    let u = s * t.alpha() + tt * t.gamma();
                    let v = s * t.beta() + tt * t.delta();
                    (0..pu).all(|c| {
                        rt[(idx(s) * pu + idx(tt)) * pu + c] == lt[(idx(&u) * pu + idx(&v)) * pu + c]
                    })
                })
            });
            if !consistent {
                continue;
            }
        }
        let inner = are_similar(&pencil_transform(l, &t)?, r, budget)?;
        report.search_dimension = report.search_dimension.max(inner.budget.search_dimension);
        match inner.verdict {
            Verdict::Yes => {
                let s = inner.witness.expect("yes carries a witness");
                if !verify_weak(l, r, &t, &s) {
                    return Err(Error::Internal("weak-similarity witness failed verification".into()));
                }
                return Ok(Decision::yes(WeakWitness { t, s }, inner.certificate, report));
            }
            Verdict::Inconclusive => any_inconclusive = true,
            Verdict::No => {}
        }
    }
    if any_inconclusive {
        Ok(Decision::inconclusive(report))
    } else {
        Ok(Decision::no(CertificateKind::Exhaustive, report))
    }
}

/// Sorted multiset of `rank(αA + βB)` over the `p + 1` projective directions
/// `(1, t)` and `(0, 1)`. Invariant under weak similarity.
pub fn pencil_rank_profile(pair: &MatrixPair) -> Result<Vec<usize>> {
    let field = pair.field();
    let mut ranks: Vec<usize> = projective_directions(field)?
        .iter()
        .map(|(a, b)| pair.a().lin_comb(a, pair.b(), b).expect("pair shapes agree").rank())
        .collect();
    ranks.sort_unstable();
    Ok(ranks)
}

/// `(1, t)` for `t` in field order, then `(0, 1)`.
fn projective_directions(field: Field) -> Result<Vec<(Scalar, Scalar)>> {
    let mut dirs: Vec<(Scalar, Scalar)> = field.elements()?.into_iter().map(|t| (field.one(), t)).collect();
    dirs.push((field.zero(), field.one()));
    Ok(dirs)
}

/// A two-dimensional space of commuting matrices, presented by an ordered basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoDimSpace {
    basis: MatrixPair,
}

/// Builds `span(A, B)` after checking `AB = BA` and linear independence.
pub fn space_make(a: Matrix, b: Matrix) -> Result<TwoDimSpace> {
    let basis = MatrixPair::new(a, b)?;
    if !basis.commutes() {
        return Err(Error::NonCommuting);
    }
    let field = basis.field();
    let n2 = basis.size() * basis.size();
    let mut stacked = basis.a().to_vector();
    stacked.extend(basis.b().to_vector());
    if Matrix::new(field, 2, n2, stacked)?.rank() < 2 {
        return Err(Error::Dependent);
    }
    Ok(TwoDimSpace { basis })
}

impl TwoDimSpace {
    pub fn basis(&self) -> &MatrixPair {
        &self.basis
    }

    pub fn a(&self) -> &Matrix {
        self.basis.a()
    }

    pub fn b(&self) -> &Matrix {
        self.basis.b()
    }

    pub fn field(&self) -> Field {
        self.basis.field()
    }

    pub fn size(&self) -> usize {
        self.basis.size()
    }

    /// `S⁻¹·V·S` with the conjugated basis.
    pub fn conjugate(&self, s: &Matrix) -> Result<TwoDimSpace> {
        let c = self.basis.conjugate(s)?;
        Ok(TwoDimSpace { basis: c })
    }

    /// Same space, basis changed to `T(A, B)`.
    pub fn rebase(&self, t: &PencilTransform) -> Result<TwoDimSpace> {
        Ok(TwoDimSpace {
            basis: pencil_transform(&self.basis, t)?,
        })
    }

    /// Coordinates `(c₁, c₂)` of `m = c₁·A + c₂·B`, or `None` when `m ∉ V`.
    pub fn coordinates(&self, m: &Matrix) -> Result<Option<(Scalar, Scalar)>> {
        if m.field() != self.field() || m.shape() != self.a().shape() {
            return Err(Error::Shape(format!("{:?} is not in the ambient space of V", m.shape())));
        }
        let n2 = self.size() * self.size();
        let system = Matrix::from_fn(self.field(), n2, 2, |i, j| {
            if j == 0 {
                self.a().entries()[i].clone()
            } else {
                self.b().entries()[i].clone()
            }
        });
        Ok(system.solve(m.entries())?.map(|x| (x[0].clone(), x[1].clone())))
    }
}

/// Some `(α, β)` with `αA + βB` nonsingular, or `None` when every member of
/// `V` is singular.
pub fn contains_nonsingular(v: &TwoDimSpace) -> Result<Option<(Scalar, Scalar)>> {
    let field = v.field();
    let det_at = |a: &Scalar, b: &Scalar| -> Result<bool> {
        Ok(!v.a().lin_comb(a, v.b(), b)?.determinant()?.is_zero())
    };
    if field.is_finite() {
        for (a, b) in projective_directions(field)? {
            if det_at(&a, &b)? {
                return Ok(Some((a, b)));
            }
        }
        return Ok(None);
    }
    if det_at(&field.zero(), &field.one())? {
        return Ok(Some((field.zero(), field.one())));
    }
    // det(A + tB) has degree <= n in t; n + 1 roots make it vanish identically.
    for t in 0..=v.size() as u64 {
        let t = field.from_u64(t);
        if det_at(&field.one(), &t)? {
            return Ok(Some((field.one(), t)));
        }
    }
    Ok(None)
}

/// Decides `S⁻¹·V·S = W` through weak similarity of the presenting bases.
pub fn spaces_similar(v: &TwoDimSpace, w: &TwoDimSpace, budget: &SearchBudget) -> Result<Decision<WeakWitness>> {
    are_weakly_similar(v.basis(), w.basis(), budget, None)
}
