//! Seeded instance generation.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64`; integers
//! are drawn with `Rng::gen_range` from `rand` 0.8. A given seed and spec
//! always produce the same stream.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::matrix::Matrix;
use crate::pencil::{contains_nonsingular, space_make, PencilTransform};
use crate::similarity::MatrixPair;

pub use rand::SeedableRng;
pub type InstanceRng = ChaCha8Rng;

/// Bound on numerators (and denominators) of random rationals.
pub const RATIONAL_HEIGHT: i64 = 9;

const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RandomMode {
    ArbitraryPair,
    /// `(C, q(C))` with random `C` and random `q` of degree `< n`.
    CommutingPair,
    /// Commuting pair with independent members and a nonsingular combination.
    CommutingSpaceWithNonsingular,
}

impl std::str::FromStr for RandomMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arbitrary-pair" => Ok(RandomMode::ArbitraryPair),
            "commuting-pair" => Ok(RandomMode::CommutingPair),
            "commuting-space-with-nonsingular" | "commuting-space" => Ok(RandomMode::CommutingSpaceWithNonsingular),
            other => Err(Error::Precondition(format!("unknown random mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub field: Field,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    pub mode: RandomMode,
}

pub fn rng_from_seed(seed: u64) -> InstanceRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded by `seed`.
pub fn rng_for_case(seed: u64, stream: u64) -> InstanceRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn random_scalar(rng: &mut impl Rng, field: Field) -> Scalar {
    match field.modulus() {
        Some(p) => field.from_u64(rng.gen_range(0..p)),
        None => {
            let num = rng.gen_range(-RATIONAL_HEIGHT..=RATIONAL_HEIGHT);
            let den = rng.gen_range(1..=RATIONAL_HEIGHT);
            field.from_i64(num).div(&field.from_i64(den)).expect("nonzero denominator")
        }
    }
}

pub fn random_nonzero_scalar(rng: &mut impl Rng, field: Field) -> Scalar {
    loop {
        let s = random_scalar(rng, field);
        if !s.is_zero() {
            return s;
        }
    }
}

pub fn random_matrix(rng: &mut impl Rng, field: Field, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(field, rows, cols, |_, _| random_scalar(rng, field))
}

pub fn random_invertible(rng: &mut impl Rng, field: Field, n: usize) -> Matrix {
    loop {
        let m = random_matrix(rng, field, n, n);
        if m.is_invertible() {
            return m;
        }
    }
}

pub fn random_transform(rng: &mut impl Rng, field: Field) -> PencilTransform {
    PencilTransform::new(random_invertible(rng, field, 2)).expect("invertible 2x2")
}

/// `q(C)` for coefficients `q[0] + q[1]·C + …`.
pub fn poly_eval(c: &Matrix, q: &[Scalar]) -> Matrix {
    let field = c.field();
    let n = c.rows();
    let mut acc = Matrix::zeros(field, n, n);
    let mut power = Matrix::identity(field, n);
    for coef in q {
        acc = acc.add(&power.scale(coef)).expect("square");
        power = power.matmul(c).expect("square");
    }
    acc
}

fn commuting_pair(rng: &mut impl Rng, field: Field, n: usize) -> MatrixPair {
    let c = random_matrix(rng, field, n, n);
    let q: Vec<Scalar> = (0..n).map(|_| random_scalar(rng, field)).collect();
    let b = poly_eval(&c, &q);
    MatrixPair::new(c, b).expect("square pair")
}

/// One instance for `spec.mode`.
pub fn random_instance(rng: &mut impl Rng, field: Field, n: usize, mode: RandomMode) -> Result<MatrixPair> {
    match mode {
        RandomMode::ArbitraryPair => Ok(MatrixPair::new(
            random_matrix(rng, field, n, n),
            random_matrix(rng, field, n, n),
        )?),
        RandomMode::CommutingPair => Ok(commuting_pair(rng, field, n)),
        RandomMode::CommutingSpaceWithNonsingular => {
            for _ in 0..MAX_ATTEMPTS {
                let (a, b) = commuting_pair(rng, field, n).into_parts();
                if let Ok(v) = space_make(a, b) {
                    if contains_nonsingular(&v)?.is_some() {
                        return Ok(v.basis().clone());
                    }
                }
            }
            Err(Error::Precondition(format!(
                "no commuting space with a nonsingular member found after {MAX_ATTEMPTS} attempts"
            )))
        }
    }
}

/// Deterministic instance stream for `spec`.
pub fn gen_random(spec: &RandomSpec) -> Result<Vec<MatrixPair>> {
    if spec.n == 0 {
        return Err(Error::Precondition("matrix size must be at least 1".into()));
    }
    if spec.mode == RandomMode::CommutingSpaceWithNonsingular && spec.n < 2 {
        return Err(Error::Precondition(
            "a two-dimensional space of 1x1 matrices does not exist".into(),
        ));
    }
    let mut rng = rng_from_seed(spec.seed);
    (0..spec.count)
        .map(|_| random_instance(&mut rng, spec.field, spec.n, spec.mode))
        .collect()
}
