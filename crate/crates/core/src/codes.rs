//! Random linear codes `[n, m]_q` and the smoothing encoder `x + kG`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldMatrix, FieldVector, PrimeField};

/// A linear code given by its `m x n` generator matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CodeRepr", into = "CodeRepr")]
pub struct LinearCode {
    generator: FieldMatrix,
}

#[derive(Serialize, Deserialize)]
struct CodeRepr {
    n: usize,
    m: usize,
    q: u32,
    #[serde(rename = "G")]
    g: Vec<Vec<u64>>,
}

impl TryFrom<CodeRepr> for LinearCode {
    type Error = Error;
    fn try_from(r: CodeRepr) -> Result<Self> {
        let g = FieldMatrix::from_rows(PrimeField::new(r.q)?, r.g)?;
        if g.rows() != r.m || g.cols() != r.n {
            return Err(Error::InvalidParameter(format!(
                "G is {}x{} but header says m={}, n={}",
                g.rows(),
                g.cols(),
                r.m,
                r.n
            )));
        }
        LinearCode::new(g)
    }
}

impl From<LinearCode> for CodeRepr {
    fn from(c: LinearCode) -> Self {
        let g = &c.generator;
        CodeRepr {
            n: g.cols(),
            m: g.rows(),
            q: g.field().order(),
            g: (0..g.rows())
                .map(|i| g.row(i).iter().map(|&v| v as u64).collect())
                .collect(),
        }
    }
}

/// The user's secret key `K`, uniform over `F_q^m` when produced by [`key_gen`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SecretKey(FieldVector);

impl SecretKey {
    pub fn new(k: FieldVector) -> Self {
        Self(k)
    }

    pub fn as_vector(&self) -> &FieldVector {
        &self.0
    }
}

impl LinearCode {
    pub fn new(generator: FieldMatrix) -> Result<Self> {
        check_dims(generator.cols(), generator.rows())?;
        Ok(Self { generator })
    }

    pub fn generator(&self) -> &FieldMatrix {
        &self.generator
    }

    pub fn field(&self) -> PrimeField {
        self.generator.field()
    }

    /// Block length.
    pub fn n(&self) -> usize {
        self.generator.cols()
    }

    /// Dimension, i.e. the key length.
    pub fn m(&self) -> usize {
        self.generator.rows()
    }

    pub fn codeword(&self, k: &FieldVector) -> Result<FieldVector> {
        self.generator.left_mul(k)
    }

    /// `x + kG`.
    pub fn encode(&self, x: &FieldVector, key: &SecretKey) -> Result<FieldVector> {
        self.check_data(x)?;
        x.add(&self.codeword(key.as_vector())?)
    }

    /// `x_tilde - tG`.
    pub fn shift(&self, x_tilde: &FieldVector, t: &FieldVector) -> Result<FieldVector> {
        self.check_data(x_tilde)?;
        x_tilde.sub(&self.codeword(t)?)
    }

    /// Whether the columns of `G` indexed by `subset` are linearly independent,
    /// which is the same as `k G_R` being uniform over `F_q^r` for uniform `k`.
    pub fn subcolumns_full_rank(&self, subset: &[usize]) -> Result<bool> {
        if subset.len() > self.m() {
            return Err(Error::InvalidParameter(format!(
                "subset size {} exceeds code dimension {}",
                subset.len(),
                self.m()
            )));
        }
        if let Some(&bad) = subset.iter().find(|&&j| j >= self.n()) {
            return Err(Error::InvalidParameter(format!(
                "column {bad} out of range for n={}",
                self.n()
            )));
        }
        Ok(self.generator.select_columns(subset).rank() == subset.len())
    }

    fn check_data(&self, x: &FieldVector) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= m <= n, got n={n}, m={m}"
        )));
    }
    Ok(())
}

/// A code whose generator entries are i.i.d. uniform over `F_q`. No rejection
/// on rank: the ensemble is the unconditioned one.
pub fn sample_code(n: usize, m: usize, field: PrimeField, seed: u64) -> Result<LinearCode> {
    check_dims(n, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = field.order();
    let data = (0..n * m).map(|_| rng.random_range(0..q) as u64).collect();
    LinearCode::new(FieldMatrix::new(field, m, n, data)?)
}

pub fn key_gen(m: usize, field: PrimeField, seed: u64) -> Result<SecretKey> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "key length must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = field.order();
    let k = (0..m).map(|_| rng.random_range(0..q) as u64).collect();
    Ok(SecretKey(FieldVector::new(field, k)?))
}
