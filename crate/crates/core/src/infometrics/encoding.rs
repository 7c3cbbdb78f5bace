//! Exact laws of the encoded data `X + KG` with `K` uniform, by enumeration.

use super::{Distribution, SubsetSelector, DEFAULT_CAP};
use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf::{index_of_point, point_from_index, space_size};
use crate::infometrics::measures::log_q;

/// Enumeration engine bounded by a cap on joint outcomes `q^{n+m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Enumerator {
    cap: u64,
}

impl Default for Enumerator {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP }
    }
}

/// Digit-wise addition of two points given by their indices in `F_q^n`.
struct PointAdder {
    q: usize,
    n: usize,
}

impl PointAdder {
    #[inline]
    fn add(&self, a: usize, b: usize) -> usize {
        if self.q == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0usize;
        let mut place = 1usize;
        for _ in 0..self.n {
            let d = (a % self.q + b % self.q) % self.q;
            out += d * place;
            place *= self.q;
            a /= self.q;
            b /= self.q;
        }
        out
    }
}

impl Enumerator {
    pub fn new(cap: u64) -> Self {
        Self { cap }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    fn check(&self, dist: &Distribution, code: &LinearCode) -> Result<()> {
        if dist.field() != code.field() {
            return Err(Error::ModulusMismatch {
                left: dist.q(),
                right: code.field().order(),
            });
        }
        if dist.n() != code.n() {
            return Err(Error::DimensionMismatch {
                expected: code.n(),
                got: dist.n(),
            });
        }
        let outcomes = space_size(dist.q(), dist.n() + code.m());
        if outcomes > self.cap as u128 {
            return Err(Error::EnumerationCap {
                outcomes,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// Indices of all `q^m` codewords `kG` (with multiplicity).
    fn codeword_indices(code: &LinearCode) -> Vec<usize> {
        let q = code.field().order();
        let g = code.generator();
        (0..space_size(q, code.m()) as usize)
            .map(|ki| index_of_point(q, &g.left_mul_raw(&point_from_index(q, code.m(), ki))))
            .collect()
    }

    /// `p(y) = q^{-m} sum_k P_X(y - kG)`.
    pub fn pushforward(&self, dist: &Distribution, code: &LinearCode) -> Result<Distribution> {
        self.check(dist, code)?;
        let adder = PointAdder {
            q: dist.q() as usize,
            n: dist.n(),
        };
        let words = Self::codeword_indices(code);
        let w = 1.0 / words.len() as f64;
        let mut out = vec![0.0; dist.len()];
        for (x, &px) in dist.probs().iter().enumerate() {
            if px > 0.0 {
                let mass = px * w;
                for &c in &words {
                    out[adder.add(x, c)] += mass;
                }
            }
        }
        Ok(Distribution::from_raw(dist.field(), dist.n(), out))
    }

    /// Law of the encoding given `X_R = z`.
    pub fn conditional_encoded(
        &self,
        dist: &Distribution,
        code: &LinearCode,
        subset: &SubsetSelector,
        z: &[u32],
    ) -> Result<Distribution> {
        self.check(dist, code)?;
        self.pushforward(&dist.conditional(subset, z)?, code)
    }

    /// Exact `I(X_tilde; X_R)` in `q`-ary units from the joint table of
    /// `(X + KG, X_R)`.
    pub fn mutual_information(
        &self,
        dist: &Distribution,
        code: &LinearCode,
        subset: &SubsetSelector,
    ) -> Result<f64> {
        self.check(dist, code)?;
        let words = Self::codeword_indices(code);
        Ok(self.mutual_information_with(dist, &words, subset))
    }

    /// `I(X_tilde; X_R)` for every `r`-subset, in lexicographic order.
    pub fn leakage_profile(
        &self,
        dist: &Distribution,
        code: &LinearCode,
        r: usize,
    ) -> Result<Vec<(SubsetSelector, f64)>> {
        self.check(dist, code)?;
        let words = Self::codeword_indices(code);
        Ok(SubsetSelector::all(dist.n(), r)?
            .into_iter()
            .map(|s| {
                let i = self.mutual_information_with(dist, &words, &s);
                (s, i)
            })
            .collect())
    }

    fn mutual_information_with(
        &self,
        dist: &Distribution,
        words: &[usize],
        subset: &SubsetSelector,
    ) -> f64 {
        let q = dist.q();
        let n = dist.n();
        let adder = PointAdder { q: q as usize, n };
        let zsize = space_size(q, subset.len()) as usize;
        let w = 1.0 / words.len() as f64;
        let mut joint = vec![0.0; dist.len() * zsize];
        let mut p_z = vec![0.0; zsize];
        for (x, &px) in dist.probs().iter().enumerate() {
            if px > 0.0 {
                let z = subset.project_index(q, n, x);
                p_z[z] += px;
                let mass = px * w;
                for &c in words {
                    joint[adder.add(x, c) * zsize + z] += mass;
                }
            }
        }
        let mut acc = 0.0;
        for row in joint.chunks_exact(zsize) {
            let p_y: f64 = row.iter().sum();
            if p_y <= 0.0 {
                continue;
            }
            for (z, &pj) in row.iter().enumerate() {
                if pj > 0.0 {
                    acc += pj * log_q(pj / (p_y * p_z[z]), q);
                }
            }
        }
        acc.max(0.0)
    }
}

pub fn pushforward_encode(dist: &Distribution, code: &LinearCode) -> Result<Distribution> {
    Enumerator::default().pushforward(dist, code)
}

pub fn conditional_encoded(
    dist: &Distribution,
    code: &LinearCode,
    subset: &SubsetSelector,
    z: &[u32],
) -> Result<Distribution> {
    Enumerator::default().conditional_encoded(dist, code, subset, z)
}

pub fn mutual_information(
    dist: &Distribution,
    code: &LinearCode,
    subset: &SubsetSelector,
) -> Result<f64> {
    Enumerator::default().mutual_information(dist, code, subset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{sample_code, LinearCode, SecretKey};
    use crate::gf::{FieldMatrix, FieldVector, PrimeField};
    use crate::infometrics::measures::{kl_divergence, shannon_entropy, v_distance};

    fn gf(q: u32) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn code(q: u32, rows: Vec<Vec<u64>>) -> LinearCode {
        LinearCode::new(FieldMatrix::from_rows(gf(q), rows).unwrap()).unwrap()
    }

    fn correlated_pair() -> Distribution {
        // 1/2 on 00, 1/2 on 11
        Distribution::new(gf(2), 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    // Oracle: encode every (x, k) pair explicitly with the code's own encoder.
    fn brute_pushforward(dist: &Distribution, c: &LinearCode) -> Vec<f64> {
        let q = dist.q();
        let nk = (q as usize).pow(c.m() as u32);
        let mut out = vec![0.0; dist.len()];
        for (xi, &px) in dist.probs().iter().enumerate() {
            let x = FieldVector::from_index(gf(q), dist.n(), xi);
            for ki in 0..nk {
                let k = SecretKey::new(FieldVector::from_index(gf(q), c.m(), ki));
                out[c.encode(&x, &k).unwrap().to_index()] += px / nk as f64;
            }
        }
        out
    }

    // Oracle: I = H(X~) - sum_z P(z) H(X~ | z).
    fn entropy_route_mi(dist: &Distribution, c: &LinearCode, s: &SubsetSelector) -> f64 {
        let h = shannon_entropy(&pushforward_encode(dist, c).unwrap());
        let marg = dist.marginal(s).unwrap();
        let mut cond = 0.0;
        for (zi, &pz) in marg.probs().iter().enumerate() {
            if pz > 0.0 {
                let z = point_from_index(dist.q(), s.len(), zi);
                cond += pz * shannon_entropy(&conditional_encoded(dist, c, s, &z).unwrap());
            }
        }
        h - cond
    }

    #[test]
    fn pushforward_examples() {
        let u = Distribution::uniform(gf(3), 3).unwrap();
        let c = sample_code(3, 2, gf(3), 5).unwrap();
        let pu = pushforward_encode(&u, &c).unwrap();
        assert!(pu.probs().iter().all(|&p| (p - 1.0 / 27.0).abs() < 1e-15));

        let x = Distribution::random_dirichlet(gf(2), 3, 1.0, 3).unwrap();
        let zero = code(2, vec![vec![0, 0, 0]]);
        let px = pushforward_encode(&x, &zero).unwrap();
        assert!(v_distance(&px, &x).unwrap() < 1e-15);

        let out = pushforward_encode(&correlated_pair(), &code(2, vec![vec![1, 1]])).unwrap();
        assert_eq!(out.probs(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn pushforward_matches_brute_force() {
        for (q, n, m, seed) in [
            (2u32, 4usize, 2usize, 1u64),
            (3, 3, 2, 2),
            (5, 2, 1, 3),
            (2, 5, 3, 4),
        ] {
            let d = Distribution::random_dirichlet(gf(q), n, 0.7, seed).unwrap();
            let c = sample_code(n, m, gf(q), seed).unwrap();
            let fast = pushforward_encode(&d, &c).unwrap();
            for (a, b) in fast.probs().iter().zip(brute_pushforward(&d, &c)) {
                assert!((a - b).abs() < 1e-14);
            }
            assert!((fast.total() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn conditional_examples() {
        let c = code(2, vec![vec![1, 0, 1]]);
        // Deterministic X = 110: conditional is uniform on the coset {110, 011}.
        let x = Distribution::point_mass(gf(2), 3, 0b110).unwrap();
        let s = SubsetSelector::new(vec![0], 3).unwrap();
        let out = conditional_encoded(&x, &c, &s, &[1]).unwrap();
        assert_eq!(out.prob(0b110), 0.5);
        assert_eq!(out.prob(0b011), 0.5);
        assert_eq!(conditional_encoded(&x, &c, &s, &[0]), Err(Error::NullEvent));

        let u = Distribution::uniform(gf(3), 3).unwrap();
        let c = code(3, vec![vec![1, 0, 2], vec![0, 1, 1]]);
        let s = SubsetSelector::new(vec![0, 1], 3).unwrap();
        assert!(c.subcolumns_full_rank(s.indices()).unwrap());
        let full = pushforward_encode(&u, &c).unwrap();
        for z in [[0u32, 0], [2, 1], [1, 2]] {
            let cond = conditional_encoded(&u, &c, &s, &z).unwrap();
            assert!(v_distance(&cond, &full).unwrap() < 1e-14);
        }
    }

    #[test]
    fn mutual_information_worked_cases() {
        let p = correlated_pair();
        let first = SubsetSelector::new(vec![0], 2).unwrap();
        let i10 = mutual_information(&p, &code(2, vec![vec![1, 0]]), &first).unwrap();
        assert!((i10 - 1.0).abs() < 1e-12);
        let i11 = mutual_information(&p, &code(2, vec![vec![1, 1]]), &first).unwrap();
        assert!(i11.abs() < 1e-12);
    }

    #[test]
    fn mutual_information_two_routes_agree() {
        for seed in 0..40u64 {
            let (q, n, m) = [(2u32, 4usize, 2usize), (3, 3, 1), (2, 5, 3)][(seed % 3) as usize];
            let d = Distribution::random_dirichlet(gf(q), n, 0.5, seed).unwrap();
            let c = sample_code(n, m, gf(q), seed + 7).unwrap();
            for s in SubsetSelector::all(n, 2).unwrap() {
                let fast = mutual_information(&d, &c, &s).unwrap();
                let slow = entropy_route_mi(&d, &c, &s);
                assert!((fast - slow).abs() < 1e-10, "{fast} vs {slow}");
                assert!(fast >= 0.0 && fast <= s.len() as f64 + 1e-9);

                // Third route: sum_z P(z) D(P_{X~|z} || P_X~).
                let px = pushforward_encode(&d, &c).unwrap();
                let marg = d.marginal(&s).unwrap();
                let via_kl: f64 = marg
                    .probs()
                    .iter()
                    .enumerate()
                    .filter(|(_, &pz)| pz > 0.0)
                    .map(|(zi, &pz)| {
                        let z = point_from_index(q, s.len(), zi);
                        pz * kl_divergence(&conditional_encoded(&d, &c, &s, &z).unwrap(), &px)
                            .unwrap()
                    })
                    .sum();
                assert!((fast - via_kl).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn uniform_full_rank_subsets_leak_nothing() {
        for seed in 0..30u64 {
            let c = sample_code(5, 3, gf(2), seed).unwrap();
            let u = Distribution::uniform(gf(2), 5).unwrap();
            for (s, i) in Enumerator::default().leakage_profile(&u, &c, 2).unwrap() {
                if c.subcolumns_full_rank(s.indices()).unwrap() {
                    assert!(i <= 1e-9, "{s}: {i}");
                }
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let d = Distribution::uniform(gf(2), 10).unwrap();
        let c = sample_code(10, 5, gf(2), 0).unwrap();
        let e = Enumerator::new(1 << 14);
        assert!(matches!(
            e.pushforward(&d, &c),
            Err(Error::EnumerationCap { .. })
        ));
        assert!(Enumerator::new(1 << 15).pushforward(&d, &c).is_ok());
    }
}
