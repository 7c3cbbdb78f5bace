use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{index_of_point, point_from_index, space_size, PrimeField};
use crate::subsets::combinations;

/// Normalization slack accepted for a probability table.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Default cap on enumerated joint outcomes, `2^24`.
pub const DEFAULT_CAP: u64 = 1 << 24;

/// An explicit probability table over `F_q^n`, indexed by the canonical
/// lexicographic enumeration of the space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DistRepr", into = "DistRepr")]
pub struct Distribution {
    field: PrimeField,
    n: usize,
    probs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct DistRepr {
    q: u32,
    n: usize,
    probs: Vec<f64>,
}

impl TryFrom<DistRepr> for Distribution {
    type Error = Error;
    fn try_from(r: DistRepr) -> Result<Self> {
        Distribution::new(PrimeField::new(r.q)?, r.n, r.probs)
    }
}

impl From<Distribution> for DistRepr {
    fn from(d: Distribution) -> Self {
        DistRepr {
            q: d.field.order(),
            n: d.n,
            probs: d.probs,
        }
    }
}

fn table_len(field: PrimeField, n: usize) -> Result<usize> {
    let size = space_size(field.order(), n);
    if size > DEFAULT_CAP as u128 {
        return Err(Error::EnumerationCap {
            outcomes: size,
            cap: DEFAULT_CAP,
        });
    }
    Ok(size as usize)
}

impl Distribution {
    /// Validates length `q^n`, non-negativity and normalization.
    pub fn new(field: PrimeField, n: usize, probs: Vec<f64>) -> Result<Self> {
        let len = table_len(field, n)?;
        if probs.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: probs.len(),
            });
        }
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) || (sum - 1.0).abs() > NORMALIZATION_TOL
        {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { field, n, probs })
    }

    /// Normalizes non-negative weights into a distribution.
    pub fn from_weights(field: PrimeField, n: usize, weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if sum.is_nan() || sum <= 0.0 || weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::NotNormalized { sum });
        }
        Self::new(field, n, weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(field: PrimeField, n: usize) -> Result<Self> {
        let len = table_len(field, n)?;
        Ok(Self {
            field,
            n,
            probs: vec![1.0 / len as f64; len],
        })
    }

    pub fn point_mass(field: PrimeField, n: usize, index: usize) -> Result<Self> {
        let len = table_len(field, n)?;
        if index >= len {
            return Err(Error::InvalidParameter(format!(
                "index {index} outside F_q^n"
            )));
        }
        let mut probs = vec![0.0; len];
        probs[index] = 1.0;
        Ok(Self { field, n, probs })
    }

    /// Product of `n` i.i.d. symbols with the given per-symbol law.
    pub fn iid(field: PrimeField, n: usize, symbol: &[f64]) -> Result<Self> {
        let q = field.order() as usize;
        if symbol.len() != q {
            return Err(Error::DimensionMismatch {
                expected: q,
                got: symbol.len(),
            });
        }
        let len = table_len(field, n)?;
        let probs = (0..len)
            .map(|i| {
                point_from_index(field.order(), n, i)
                    .iter()
                    .map(|&d| symbol[d as usize])
                    .product()
            })
            .collect();
        Self::from_weights(field, n, probs)
    }

    /// i.i.d. symbols equal to 1 with probability `alpha` and 0 otherwise.
    pub fn bernoulli(field: PrimeField, n: usize, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha={alpha} outside [0,1]"
            )));
        }
        let mut symbol = vec![0.0; field.order() as usize];
        symbol[0] = 1.0 - alpha;
        symbol[1] = alpha;
        Self::iid(field, n, &symbol)
    }

    /// A draw from the symmetric Dirichlet law with the given concentration.
    pub fn random_dirichlet(
        field: PrimeField,
        n: usize,
        concentration: f64,
        seed: u64,
    ) -> Result<Self> {
        let len = table_len(field, n)?;
        let gamma = Gamma::new(concentration, 1.0)
            .map_err(|e| Error::InvalidParameter(format!("concentration: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = (0..len).map(|_| gamma.sample(&mut rng)).collect();
        Self::from_weights(field, n, weights)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn q(&self) -> u32 {
        self.field.order()
    }

    /// Number of coordinates.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub(crate) fn from_raw(field: PrimeField, n: usize, probs: Vec<f64>) -> Self {
        Self { field, n, probs }
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch {
                left: self.q(),
                right: other.q(),
            });
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    /// Law of `X_R` over `F_q^r`.
    pub fn marginal(&self, subset: &SubsetSelector) -> Result<Self> {
        subset.check_within(self.n)?;
        let q = self.q();
        let r = subset.len();
        let mut out = vec![0.0; space_size(q, r) as usize];
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                out[subset.project_index(q, self.n, i)] += p;
            }
        }
        Ok(Self::from_raw(self.field, r, out))
    }

    /// Law of `X` given `X_R = z`, still over `F_q^n`.
    pub fn conditional(&self, subset: &SubsetSelector, z: &[u32]) -> Result<Self> {
        subset.check_within(self.n)?;
        if z.len() != subset.len() {
            return Err(Error::DimensionMismatch {
                expected: subset.len(),
                got: z.len(),
            });
        }
        let q = self.q();
        let zi = index_of_point(q, z);
        let mut out = vec![0.0; self.probs.len()];
        let mut mass = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 && subset.project_index(q, self.n, i) == zi {
                out[i] = p;
                mass += p;
            }
        }
        if mass <= 0.0 {
            return Err(Error::NullEvent);
        }
        for p in &mut out {
            *p /= mass;
        }
        Ok(Self::from_raw(self.field, self.n, out))
    }
}

/// A sorted set `R` of coordinates with `1 <= |R| < n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsetSelector {
    indices: Vec<usize>,
}

impl SubsetSelector {
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        let s = Self { indices };
        s.check_within(n)?;
        Ok(s)
    }

    /// All `r`-subsets of `0..n`, lexicographically.
    pub fn all(n: usize, r: usize) -> Result<Vec<Self>> {
        if r == 0 || r >= n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= r < n, got r={r}, n={n}"
            )));
        }
        Ok(combinations(n, r).map(|indices| Self { indices }).collect())
    }

    fn check_within(&self, n: usize) -> Result<()> {
        let r = self.indices.len();
        if r == 0 || r >= n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= r < n, got r={r}, n={n}"
            )));
        }
        if let Some(&bad) = self.indices.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidParameter(format!(
                "coordinate {bad} out of range for n={n}"
            )));
        }
        Ok(())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Index of `x_R` in `F_q^r`, given the index of `x` in `F_q^n`.
    pub(crate) fn project_index(&self, q: u32, n: usize, index: usize) -> usize {
        let q = q as usize;
        self.indices.iter().fold(0usize, |acc, &coord| {
            let digit = (index / q.pow((n - 1 - coord) as u32)) % q;
            acc * q + digit
        })
    }
}

impl std::fmt::Display for SubsetSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join(";"))
    }
}
