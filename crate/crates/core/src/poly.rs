//! Sparse multivariate polynomials over `F_q` with a declared total-degree bound.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldVector, PrimeField};

/// A polynomial in `n` variables over `F_q`.
///
/// Exponents are kept reduced (each `< q`, using `x^q = x` on `F_q`), zero
/// coefficients are never stored, and every term respects the degree bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PolyRepr", into = "PolyRepr")]
pub struct MultiPoly {
    field: PrimeField,
    num_vars: usize,
    degree_bound: u32,
    terms: BTreeMap<Vec<u32>, u32>,
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<u32>,
    coef: u64,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    n: usize,
    q: u32,
    d: u32,
    terms: Vec<TermRepr>,
}

impl TryFrom<PolyRepr> for MultiPoly {
    type Error = Error;
    fn try_from(r: PolyRepr) -> Result<Self> {
        let mut p = MultiPoly::zero(PrimeField::new(r.q)?, r.n, r.d);
        for t in r.terms {
            let coef = FieldElement::new(p.field, t.coef)?;
            p.add_term(&t.exp, coef.value())?;
        }
        Ok(p)
    }
}

impl From<MultiPoly> for PolyRepr {
    fn from(p: MultiPoly) -> Self {
        PolyRepr {
            n: p.num_vars,
            q: p.field.order(),
            d: p.degree_bound,
            terms: p
                .terms
                .into_iter()
                .map(|(exp, coef)| TermRepr {
                    exp,
                    coef: coef as u64,
                })
                .collect(),
        }
    }
}

/// Canonical representative of `x^e` as a function on `F_q`.
pub fn reduce_exponent(e: u32, q: u32) -> u32 {
    if e == 0 {
        0
    } else {
        (e - 1) % (q - 1) + 1
    }
}

/// All reduced exponent tuples of length `n` with total degree at most `d`,
/// in lexicographic order.
pub fn admissible_monomials(n: usize, d: u32, q: u32) -> Vec<Vec<u32>> {
    fn rec(pos: usize, left: u32, q: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if pos == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left.min(q - 1) {
            cur[pos] = e;
            rec(pos + 1, left - e, q, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    rec(0, d, q, &mut vec![0; n], &mut out);
    out
}

/// `x^exp` at a point, with `0^0 = 1`.
pub(crate) fn eval_monomial(field: PrimeField, exp: &[u32], x: &[u32]) -> u32 {
    exp.iter().zip(x).fold(1, |acc, (&e, &v)| match e {
        0 => acc,
        1 => field.mul(acc, v),
        _ => field.mul(acc, field.pow(v, e as u64)),
    })
}

impl MultiPoly {
    pub fn zero(field: PrimeField, num_vars: usize, degree_bound: u32) -> Self {
        Self {
            field,
            num_vars,
            degree_bound,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, num_vars: usize, c: u32) -> Self {
        let mut p = Self::zero(field, num_vars, 0);
        p.add_term(&vec![0; num_vars], c)
            .expect("constant term always fits");
        p
    }

    /// Adds `coef * x^exp`. Exponents are reduced first; the reduced term must
    /// respect the degree bound.
    pub fn add_term(&mut self, exp: &[u32], coef: u32) -> Result<()> {
        if exp.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: exp.len(),
            });
        }
        let q = self.field.order();
        let exp: Vec<u32> = exp.iter().map(|&e| reduce_exponent(e, q)).collect();
        let degree: u32 = exp.iter().sum();
        if degree > self.degree_bound {
            return Err(Error::DegreeExceeded {
                degree,
                bound: self.degree_bound,
            });
        }
        let coef = self.field.reduce(coef as u64);
        let entry = self.terms.entry(exp).or_insert(0);
        *entry = self.field.add(*entry, coef);
        if *entry == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
        Ok(())
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    #[inline]
    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], u32)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest exponent sum over all terms; `0` for constants and for the
    /// zero polynomial (check [`is_zero`](Self::is_zero) to tell them apart).
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &FieldVector) -> Result<FieldElement> {
        if x.field() != self.field {
            return Err(Error::ModulusMismatch {
                left: self.field.order(),
                right: x.field().order(),
            });
        }
        if x.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: x.len(),
            });
        }
        Ok(self.field.element(self.eval_raw(x.as_slice()) as u64))
    }

    pub(crate) fn eval_raw(&self, x: &[u32]) -> u32 {
        let f = self.field;
        self.terms.iter().fold(0, |acc, (exp, &c)| {
            f.add(acc, f.mul(c, eval_monomial(f, exp, x)))
        })
    }

    /// Sum of two polynomials; the result's bound is the larger of the two.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::ModulusMismatch {
                left: self.field.order(),
                right: other.field.order(),
            });
        }
        if self.num_vars != other.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: other.num_vars,
            });
        }
        let mut out = self.clone();
        out.degree_bound = self.degree_bound.max(other.degree_bound);
        for (e, c) in other.terms() {
            out.add_term(e, c)?;
        }
        Ok(out)
    }
}

/// A polynomial with an independent uniform coefficient on every admissible
/// monomial of total degree `<= d`. Deterministic in `seed`.
pub fn random_poly(n: usize, d: u32, field: PrimeField, seed: u64) -> MultiPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = MultiPoly::zero(field, n, d);
    for exp in admissible_monomials(n, d, field.order()) {
        let c = rng.random_range(0..field.order());
        if c != 0 {
            p.terms.insert(exp, c);
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u32) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn poly(q: u32, n: usize, d: u32, terms: &[(&[u32], u32)]) -> MultiPoly {
        let mut p = MultiPoly::zero(gf(q), n, d);
        for (e, c) in terms {
            p.add_term(e, *c).unwrap();
        }
        p
    }

    fn point(q: u32, v: &[u64]) -> FieldVector {
        FieldVector::new(gf(q), v.to_vec()).unwrap()
    }

    #[test]
    fn total_degree_examples() {
        assert_eq!(
            poly(2, 3, 2, &[(&[1, 1, 0], 1), (&[0, 0, 1], 1)]).total_degree(),
            2
        );
        let c = MultiPoly::constant(gf(11), 2, 7);
        assert_eq!(c.total_degree(), 0);
        assert!(!c.is_zero());
        assert_eq!(
            poly(5, 2, 3, &[(&[2, 1], 1), (&[1, 0], 1)]).total_degree(),
            3
        );
        let z = MultiPoly::zero(gf(3), 2, 2);
        assert_eq!(z.total_degree(), 0);
        assert!(z.is_zero());
    }

    #[test]
    fn eval_examples() {
        let f = poly(2, 2, 1, &[(&[1, 0], 1), (&[0, 1], 1)]);
        assert_eq!(f.eval(&point(2, &[1, 1])).unwrap().value(), 0);
        let f = poly(2, 3, 3, &[(&[1, 1, 1], 1)]);
        assert_eq!(f.eval(&point(2, &[1, 1, 1])).unwrap().value(), 1);
        let f = poly(5, 2, 2, &[(&[2, 0], 1), (&[0, 1], 2)]);
        assert_eq!(f.eval(&point(5, &[2, 3])).unwrap().value(), 0);
        assert!(f.eval(&point(5, &[2])).is_err());
        assert!(f.eval(&point(3, &[2, 1])).is_err());
        assert_eq!(
            MultiPoly::zero(gf(7), 2, 1)
                .eval(&point(7, &[3, 4]))
                .unwrap()
                .value(),
            0
        );
    }

    #[test]
    fn degree_bound_enforced_after_reduction() {
        let mut p = MultiPoly::zero(gf(2), 2, 1);
        // x1^5 reduces to x1 over F_2.
        p.add_term(&[5, 0], 1).unwrap();
        assert_eq!(p.terms().next().unwrap().0, &[1, 0]);
        assert_eq!(
            p.add_term(&[1, 1], 1),
            Err(Error::DegreeExceeded {
                degree: 2,
                bound: 1
            })
        );
    }

    #[test]
    fn cancelling_terms_are_dropped() {
        let p = poly(3, 1, 1, &[(&[1], 1), (&[1], 2)]);
        assert!(p.is_zero());
    }

    #[test]
    fn random_poly_properties() {
        let c = random_poly(4, 0, gf(7), 3);
        assert!(c.terms().all(|(e, _)| e.iter().all(|&x| x == 0)));
        assert_eq!(random_poly(5, 3, gf(5), 42), random_poly(5, 3, gf(5), 42));
        assert_ne!(random_poly(5, 3, gf(5), 42), random_poly(5, 3, gf(5), 43));
    }

    #[test]
    fn random_poly_support_q2() {
        // Oracle: the 7 multilinear monomials of degree <= 2 in 3 variables.
        let allowed: Vec<Vec<u32>> = vec![
            vec![0, 0, 0],
            vec![1, 0, 0],
            vec![0, 1, 0],
            vec![0, 0, 1],
            vec![1, 1, 0],
            vec![1, 0, 1],
            vec![0, 1, 1],
        ];
        let mut allowed_sorted = allowed.clone();
        allowed_sorted.sort();
        assert_eq!(admissible_monomials(3, 2, 2), allowed_sorted);
        for seed in 0..50 {
            let p = random_poly(3, 2, gf(2), seed);
            assert!(p.terms().all(|(e, _)| allowed.contains(&e.to_vec())));
        }
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let p = poly(5, 2, 3, &[(&[2, 1], 3), (&[0, 0], 1)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"n":2,"q":5,"d":3,"terms":[{"exp":[0,0],"coef":1},{"exp":[2,1],"coef":3}]}"#
        );
        assert_eq!(serde_json::from_str::<MultiPoly>(&s).unwrap(), p);
        let too_high = r#"{"n":2,"q":5,"d":1,"terms":[{"exp":[1,1],"coef":1}]}"#;
        assert!(serde_json::from_str::<MultiPoly>(too_high).is_err());
        let bad_coef = r#"{"n":1,"q":5,"d":1,"terms":[{"exp":[1],"coef":5}]}"#;
        assert!(serde_json::from_str::<MultiPoly>(bad_coef).is_err());
    }

    fn all_points(q: u32, n: usize) -> impl Iterator<Item = FieldVector> {
        (0..(q as usize).pow(n as u32)).map(move |i| FieldVector::from_index(gf(q), n, i))
    }

    #[test]
    fn eval_is_additive_exhaustive() {
        for q in [2u32, 3, 5] {
            for n in 1..=4usize {
                for seed in 0..4 {
                    let d = (seed as u32 % 3) + 1;
                    let f = random_poly(n, d, gf(q), seed);
                    let g = random_poly(n, 2, gf(q), seed + 100);
                    let h = f.add(&g).unwrap();
                    for x in all_points(q, n) {
                        let lhs = h.eval(&x).unwrap();
                        let rhs = f.eval(&x).unwrap() + g.eval(&x).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn exponent_reduction_is_sound() {
        // Fermat: v^e == v^reduce(e) for every v in F_q.
        for q in [2u32, 3, 5] {
            let f = gf(q);
            for e in 0..3 * q {
                let r = reduce_exponent(e, q);
                assert!(r < q);
                for v in 0..q {
                    assert_eq!(f.pow(v, e as u64), f.pow(v, r as u64), "q={q} e={e} v={v}");
                }
            }
            for n in 1..=3usize {
                // Unreduced evaluation vs the reduced polynomial.
                let raw: Vec<(Vec<u32>, u32)> = vec![
                    (vec![q + 1; n], 1),
                    ((0..n as u32).map(|i| 2 * q + i).collect(), q - 1),
                ];
                let mut p = MultiPoly::zero(f, n, u32::MAX);
                for (e, c) in &raw {
                    p.add_term(e, *c).unwrap();
                }
                for x in all_points(q, n) {
                    let direct = raw.iter().fold(0, |acc, (e, c)| {
                        let m = e
                            .iter()
                            .zip(x.as_slice())
                            .fold(1, |a, (&e, &v)| f.mul(a, f.pow(v, e as u64)));
                        f.add(acc, f.mul(*c, m))
                    });
                    assert_eq!(p.eval(&x).unwrap().value(), direct);
                }
            }
        }
    }
}
