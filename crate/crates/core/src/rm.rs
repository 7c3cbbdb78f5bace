//! Reed-Muller codes `RM_q(d, m)`: evaluations of all `m`-variate polynomials
//! of total degree at most `d` on every point of `F_q^m`.
//!
//! Provides the pieces the distributed scheme needs: the code dimension (the
//! download cost), an information set, the trivial `(S+1)`-fold replicated
//! information super-set, selection of a surviving information set under
//! stragglers, and interpolation of `g` from its values on an information set.

use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gf::{point_from_index, space_size, FieldElement, FieldMatrix, FieldVector, PrimeField};
use crate::poly::{admissible_monomials, eval_monomial};
use crate::subsets::combinations;

/// A point of `F_q^m`, as canonical residues.
pub type Point = Vec<u32>;

/// Largest `q^m` for which the full evaluation-point list is materialized.
pub const MAX_EVAL_POINTS: u128 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RmCode {
    field: PrimeField,
    d: u32,
    m: usize,
    basis: Vec<Vec<u32>>,
    points: Vec<Point>,
}

fn check_params(q: u32, d: u32, m: usize) -> Result<()> {
    if m == 0 || (d as u64) >= m as u64 * (q as u64 - 1) {
        return Err(Error::DegreeTooLarge { d, m, q });
    }
    Ok(())
}

/// Dimension of `RM_q(d, m)`: the number of reduced monomials of total degree `<= d`.
pub fn rm_dimension(q: u32, d: u32, m: usize) -> Result<usize> {
    PrimeField::new(q)?;
    check_params(q, d, m)?;
    Ok(admissible_monomials(m, d, q).len())
}

/// An ordered list of evaluation points on which the restricted generator is invertible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfoSet {
    pub points: Vec<Point>,
}

impl InfoSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A multiset of evaluation points tolerating `stragglers` missing entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuperSet {
    pub entries: Vec<Point>,
    pub stragglers: usize,
    /// `Some(D)` when entries are replicas of one information set laid out
    /// replica-major (`entries[j * D + i]` is position `i` of replica `j`).
    replica_width: Option<usize>,
}

impl SuperSet {
    /// A general super-set with no known structure.
    pub fn new(entries: Vec<Point>, stragglers: usize) -> Self {
        Self {
            entries,
            stragglers,
            replica_width: None,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_replicated(&self) -> bool {
        self.replica_width.is_some()
    }

    pub fn replica_width(&self) -> Option<usize> {
        self.replica_width
    }

    /// Exhaustively checks that removing any `stragglers` entries still leaves
    /// an information set. Cost is `C(N, S)` rank computations.
    pub fn satisfies_property(&self, rm: &RmCode) -> bool {
        let n = self.entries.len();
        if self.stragglers > n {
            return false;
        }
        combinations(n, self.stragglers).all(|removed| {
            let kept: Vec<Point> = (0..n)
                .filter(|i| !removed.contains(i))
                .map(|i| self.entries[i].clone())
                .collect();
            rm.restricted(&kept).rank() == rm.dimension()
        })
    }
}

/// An information set picked from responding super-set entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selection {
    /// Indices into `SuperSet::entries`, one per information-set position.
    pub entries: Vec<usize>,
    pub info_set: InfoSet,
}

/// Values of `g` at evaluation points, in the order they were produced.
///
/// Serialized as a JSON object mapping `"z1,z2,..."` to the value.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Answers(pub Vec<(Point, u32)>);

impl Serialize for Answers {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (p, v) in &self.0 {
            let key = p.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
            map.serialize_entry(&key, v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Answers {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct AnswersVisitor;
        impl<'de> Visitor<'de> for AnswersVisitor {
            type Value = Answers;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from comma-separated point tuples to values")
            }
            fn visit_map<A: MapAccess<'de>>(
                self,
                mut map: A,
            ) -> std::result::Result<Answers, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = map.next_entry::<String, u32>()? {
                    let point = if k.is_empty() {
                        Vec::new()
                    } else {
                        k.split(',')
                            .map(|s| s.trim().parse::<u32>())
                            .collect::<std::result::Result<Vec<_>, _>>()
                            .map_err(serde::de::Error::custom)?
                    };
                    out.push((point, v));
                }
                Ok(Answers(out))
            }
        }
        d.deserialize_map(AnswersVisitor)
    }
}

impl RmCode {
    pub fn new(field: PrimeField, d: u32, m: usize) -> Result<Self> {
        let q = field.order();
        check_params(q, d, m)?;
        let size = space_size(q, m);
        if size > MAX_EVAL_POINTS {
            return Err(Error::EnumerationCap {
                outcomes: size,
                cap: MAX_EVAL_POINTS as u64,
            });
        }
        let points = (0..size as usize)
            .map(|i| point_from_index(q, m, i))
            .collect();
        Ok(Self {
            field,
            d,
            m,
            basis: admissible_monomials(m, d, q),
            points,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn num_vars(&self) -> usize {
        self.m
    }

    /// Number of monomials in the basis, `D`.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn monomial_basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    /// All of `F_q^m` in lexicographic order.
    pub fn eval_points(&self) -> &[Point] {
        &self.points
    }

    /// Basis monomials evaluated at `z`.
    pub fn basis_at(&self, z: &[u32]) -> Vec<u32> {
        self.basis
            .iter()
            .map(|e| eval_monomial(self.field, e, z))
            .collect()
    }

    /// `D x q^m` generator: row `j` is `Eval` of the `j`-th basis monomial.
    pub fn generator(&self) -> FieldMatrix {
        self.restricted(&self.points).transpose()
    }

    /// `|points| x D` matrix whose row `i` is the basis evaluated at `points[i]`.
    pub fn restricted(&self, points: &[Point]) -> FieldMatrix {
        let d = self.dimension();
        let mut data = Vec::with_capacity(points.len() * d);
        for z in points {
            data.extend(self.basis_at(z));
        }
        FieldMatrix::from_raw(self.field, points.len(), d, data)
    }

    pub fn is_information_set(&self, points: &[Point]) -> bool {
        points.len() == self.dimension() && self.restricted(points).rank() == self.dimension()
    }

    /// Whether `word` (indexed like `eval_points`) is a codeword.
    pub fn contains(&self, word: &[u32]) -> bool {
        if word.len() != self.points.len() {
            return false;
        }
        let g = self.generator();
        let mut rows: Vec<Vec<u64>> = (0..g.rows())
            .map(|i| g.row(i).iter().map(|&v| v as u64).collect())
            .collect();
        rows.push(word.iter().map(|&v| v as u64).collect());
        FieldMatrix::from_rows(self.field, rows)
            .map(|m| m.rank() == self.dimension())
            .unwrap_or(false)
    }

    /// The pivot columns of the generator under elimination in canonical
    /// point order: the lexicographically first information set.
    pub fn information_set(&self) -> InfoSet {
        let ech = self.generator().row_reduce();
        debug_assert_eq!(ech.rank, self.dimension());
        InfoSet {
            points: ech.pivots.iter().map(|&c| self.points[c].clone()).collect(),
        }
    }

    /// `S + 1` replicas of [`information_set`](Self::information_set), so `N = (S+1) D`.
    pub fn trivial_superset(&self, stragglers: usize) -> SuperSet {
        let info = self.information_set();
        let d = info.len();
        let entries = (0..=stragglers)
            .flat_map(|_| info.points.iter().cloned())
            .collect();
        SuperSet {
            entries,
            stragglers,
            replica_width: Some(d),
        }
    }

    /// Picks an information set among entries whose `responded` flag is set.
    ///
    /// Replicated super-sets take, for each position, the first replica that
    /// responded. Anything else (or a replicated set with a position lost in
    /// every replica) falls back to a greedy scan in entry order, which yields
    /// the lexicographically first independent choice.
    pub fn select_available_infoset(&self, ss: &SuperSet, responded: &[bool]) -> Result<Selection> {
        if responded.len() != ss.entries.len() {
            return Err(Error::DimensionMismatch {
                expected: ss.entries.len(),
                got: responded.len(),
            });
        }
        if let Some(width) = ss.replica_width {
            let replicas = ss.entries.len() / width.max(1);
            let picked: Option<Vec<usize>> = (0..width)
                .map(|pos| {
                    (0..replicas)
                        .map(|j| j * width + pos)
                        .find(|&e| responded[e])
                })
                .collect();
            if let Some(entries) = picked {
                let points = entries.iter().map(|&e| ss.entries[e].clone()).collect();
                return Ok(Selection {
                    entries,
                    info_set: InfoSet { points },
                });
            }
        }
        self.greedy_select(ss, responded)
    }

    fn greedy_select(&self, ss: &SuperSet, responded: &[bool]) -> Result<Selection> {
        let f = self.field;
        let dim = self.dimension();
        // Reduced basis rows keyed by their pivot coordinate.
        let mut basis: Vec<(usize, Vec<u32>)> = Vec::with_capacity(dim);
        let mut chosen = Vec::with_capacity(dim);
        for (e, point) in ss.entries.iter().enumerate() {
            if !responded[e] {
                continue;
            }
            let mut v = self.basis_at(point);
            for (pc, row) in &basis {
                let c = v[*pc];
                if c != 0 {
                    for (x, &r) in v.iter_mut().zip(row) {
                        *x = f.sub(*x, f.mul(c, r));
                    }
                }
            }
            if let Some(pc) = v.iter().position(|&x| x != 0) {
                let inv = f.inv(v[pc]).expect("nonzero");
                for x in v.iter_mut() {
                    *x = f.mul(*x, inv);
                }
                basis.push((pc, v));
                chosen.push(e);
                if chosen.len() == dim {
                    let points = chosen.iter().map(|&i| ss.entries[i].clone()).collect();
                    return Ok(Selection {
                        entries: chosen,
                        info_set: InfoSet { points },
                    });
                }
            }
        }
        Err(Error::NoInformationSetAvailable)
    }

    /// Interpolates the unique degree-`<= d` polynomial `g` matching `answers`
    /// and returns `g(k)`. Extra answers beyond an information set are
    /// ignored; too few independent ones is an error.
    pub fn decode_g_at_k(&self, answers: &Answers, k: &FieldVector) -> Result<FieldElement> {
        self.check_point_vector(k)?;
        let points: Vec<Point> = answers.0.iter().map(|(p, _)| p.clone()).collect();
        for p in &points {
            if p.len() != self.m || p.iter().any(|&v| v >= self.field.order()) {
                return Err(Error::InvalidParameter(format!(
                    "bad evaluation point {p:?}"
                )));
            }
        }
        let a = self.restricted(&points);
        let ech = a.transpose().row_reduce();
        if ech.rank < self.dimension() {
            return Err(Error::NotInformationSet);
        }
        let m = a.select_rows(&ech.pivots);
        let values: Vec<u32> = ech
            .pivots
            .iter()
            .map(|&i| self.field.reduce(answers.0[i].1 as u64))
            .collect();
        let coeffs = m.solve(&FieldVector::from_raw(self.field, values))?;
        let f = self.field;
        let g_k = self
            .basis_at(k.as_slice())
            .iter()
            .zip(coeffs.as_slice())
            .fold(0, |acc, (&b, &c)| f.add(acc, f.mul(b, c)));
        Ok(f.element(g_k as u64))
    }

    /// Weights `w` with `g(k) = sum_i w_i g(points_i)` for every `g` in the
    /// code, where `points` is an information set.
    pub fn decode_weights(&self, info: &InfoSet, k: &FieldVector) -> Result<Vec<u32>> {
        self.check_point_vector(k)?;
        if info.len() != self.dimension() {
            return Err(Error::NotInformationSet);
        }
        let m = self.restricted(&info.points);
        let b = FieldVector::from_raw(self.field, self.basis_at(k.as_slice()));
        match m.transpose().solve(&b) {
            Ok(w) => Ok(w.as_slice().to_vec()),
            Err(Error::Singular) => Err(Error::NotInformationSet),
            Err(e) => Err(e),
        }
    }

    fn check_point_vector(&self, k: &FieldVector) -> Result<()> {
        if k.field() != self.field {
            return Err(Error::ModulusMismatch {
                left: self.field.order(),
                right: k.field().order(),
            });
        }
        if k.len() != self.m {
            return Err(Error::DimensionMismatch {
                expected: self.m,
                got: k.len(),
            });
        }
        Ok(())
    }
}
