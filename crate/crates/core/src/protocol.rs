//! The distributed scheme end to end.
//!
//! Storage phase: the user draws `K`, hands `X_tilde = X + KG` to the admin and
//! keeps only `K`. The admin gives worker `i` the share `X_tilde - T_i G` for
//! every entry `T_i` of an information super-set of `RM_q(d, m)`.
//!
//! Computation phase: each responding worker returns `f(share) = g(T_i)` where
//! `g(T) = f(X_tilde - TG)` has degree at most `d` in `T`. The admin forwards
//! the answers on an information set; the user interpolates and evaluates
//! `g(K) = f(X)`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{key_gen, sample_code, LinearCode, SecretKey};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, FieldVector, PrimeField};
use crate::infometrics::{
    epsilon_c_both, smoothing_threshold, v_p_distance, BoundParams, Distribution, Enumerator,
    EpsilonC, EpsilonCVariant, Order, SubsetSelector, HOLD_TOL,
};
use crate::poly::MultiPoly;
use crate::rm::{rm_dimension, Answers, InfoSet, Point, RmCode, SuperSet};

/// An `(n, q, r, d, S)` scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub n: usize,
    pub q: u32,
    pub r: usize,
    pub d: u32,
    #[serde(rename = "S")]
    pub stragglers: usize,
}

impl SchemeParams {
    pub fn new(n: usize, q: u32, r: usize, d: u32, stragglers: usize) -> Result<Self> {
        let p = Self {
            n,
            q,
            r,
            d,
            stragglers,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        PrimeField::new(self.q)?;
        if self.r == 0 || self.r >= self.n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= r < n, got r={}, n={}",
                self.r, self.n
            )));
        }
        Ok(())
    }

    pub fn field(&self) -> PrimeField {
        PrimeField::new(self.q).expect("validated")
    }
}

/// Scheme parameters plus key size and seed, as read from a JSON config.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeConfig {
    #[serde(flatten)]
    pub params: SchemeParams,
    pub m: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeMetrics {
    /// Number of workers.
    #[serde(rename = "N")]
    pub workers: usize,
    /// Download cost in `F_q` symbols.
    #[serde(rename = "D")]
    pub download_cost: usize,
    /// Key size.
    pub m: usize,
}

/// Costs of the trivial construction: `D = dim RM_q(d, m)` and `N = (S+1) D`.
pub fn plan(params: &SchemeParams, m: usize) -> Result<SchemeMetrics> {
    params.validate()?;
    if m < params.r {
        return Err(Error::InvalidParameter(format!(
            "key size m={m} is below the security parameter r={}",
            params.r
        )));
    }
    let d = rm_dimension(params.q, params.d, m)?;
    Ok(SchemeMetrics {
        workers: (params.stragglers + 1) * d,
        download_cost: d,
        m,
    })
}

/// Public parameters shared by every session of one scheme: the RM code and
/// its replicated super-set. Building these is the expensive part, so a
/// `Scheme` is meant to be reused across sessions.
#[derive(Debug)]
pub struct Scheme {
    params: SchemeParams,
    metrics: SchemeMetrics,
    rm: RmCode,
    info_set: InfoSet,
    superset: SuperSet,
}

impl Scheme {
    pub fn new(params: SchemeParams, m: usize) -> Result<Arc<Self>> {
        let metrics = plan(&params, m)?;
        let rm = RmCode::new(params.field(), params.d, m)?;
        let superset = rm.trivial_superset(params.stragglers);
        let info_set = rm.information_set();
        Ok(Arc::new(Self {
            params,
            metrics,
            rm,
            info_set,
            superset,
        }))
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn metrics(&self) -> &SchemeMetrics {
        &self.metrics
    }

    pub fn rm(&self) -> &RmCode {
        &self.rm
    }

    pub fn superset(&self) -> &SuperSet {
        &self.superset
    }

    /// Runs the storage phase with a fresh key drawn from `seed`.
    pub fn storage_phase(
        self: &Arc<Self>,
        x: &FieldVector,
        code: LinearCode,
        seed: u64,
    ) -> Result<SessionState> {
        let key = key_gen(self.metrics.m, self.params.field(), seed)?;
        self.storage_phase_with_key(x, code, key)
    }

    /// Storage phase with a caller-chosen key. A zero key makes `X_tilde = x`,
    /// which is only useful for diagnostics.
    pub fn storage_phase_with_key(
        self: &Arc<Self>,
        x: &FieldVector,
        code: LinearCode,
        key: SecretKey,
    ) -> Result<SessionState> {
        let p = &self.params;
        if x.len() != p.n {
            return Err(Error::DimensionMismatch {
                expected: p.n,
                got: x.len(),
            });
        }
        if code.n() != p.n || code.m() != self.metrics.m {
            return Err(Error::InvalidParameter(format!(
                "code is [{}, {}] but the scheme needs [{}, {}]",
                code.n(),
                code.m(),
                p.n,
                self.metrics.m
            )));
        }
        if code.field() != p.field() || x.field() != p.field() {
            return Err(Error::ModulusMismatch {
                left: p.q,
                right: if x.field() != p.field() {
                    x.field().order()
                } else {
                    code.field().order()
                },
            });
        }
        let x_tilde = code.encode(x, &key)?;
        let shares = self
            .superset
            .entries
            .iter()
            .enumerate()
            .map(|(worker, t)| {
                let t_vec = FieldVector::from_raw(p.field(), t.clone());
                Ok(WorkerShare {
                    worker,
                    t: t.clone(),
                    data: code.shift(&x_tilde, &t_vec)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let weights = self.rm.decode_weights(&self.info_set, key.as_vector())?;
        let transcript = vec![Event::Storage {
            n: p.n,
            m: self.metrics.m,
            workers: shares.len(),
        }];
        Ok(SessionState {
            scheme: Arc::clone(self),
            user: UserRecord {
                params: *p,
                m: self.metrics.m,
                key,
                weights,
            },
            admin: AdminRecord {
                x_tilde,
                code,
                superset: self.superset.clone(),
                shares,
            },
            transcript,
            last_download_cost: None,
        })
    }
}

/// `storage_phase` for a one-off session; builds the scheme on the fly.
pub fn storage_phase(
    x: &FieldVector,
    params: &SchemeParams,
    code: LinearCode,
    seed: u64,
) -> Result<SessionState> {
    Scheme::new(*params, code.m())?.storage_phase(x, code, seed)
}

/// What worker `worker` holds: `X_tilde - tG`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkerShare {
    pub worker: usize,
    pub t: Point,
    pub data: FieldVector,
}

/// Everything the user keeps after the storage phase.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserRecord {
    pub params: SchemeParams,
    pub m: usize,
    pub key: SecretKey,
    /// `g(K) = sum_i weights_i g(T_i)` over the scheme's base information set.
    pub weights: Vec<u32>,
}

/// Everything the admin holds. Deliberately has no key.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdminRecord {
    pub x_tilde: FieldVector,
    pub code: LinearCode,
    pub superset: SuperSet,
    pub shares: Vec<WorkerShare>,
}

/// One entry of the session transcript.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Storage {
        n: usize,
        m: usize,
        workers: usize,
    },
    PolynomialShared {
        f: MultiPoly,
    },
    WorkerResponded {
        worker: usize,
        value: u32,
    },
    WorkerStraggled {
        worker: usize,
    },
    AnswersForwarded {
        workers: Vec<usize>,
        answers: Answers,
    },
    Decoded {
        symbols: usize,
    },
}

#[derive(Clone, Debug)]
pub struct SessionState {
    scheme: Arc<Scheme>,
    user: UserRecord,
    admin: AdminRecord,
    transcript: Vec<Event>,
    last_download_cost: Option<usize>,
}

impl SessionState {
    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn user(&self) -> &UserRecord {
        &self.user
    }

    pub fn admin(&self) -> &AdminRecord {
        &self.admin
    }

    pub fn transcript(&self) -> &[Event] {
        &self.transcript
    }

    pub fn user_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.user).expect("serializable")
    }

    pub fn admin_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.admin).expect("serializable")
    }

    pub fn transcript_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.transcript).expect("serializable")
    }

    fn check_poly(&self, f: &MultiPoly) -> Result<()> {
        let p = &self.user.params;
        if f.field() != p.field() {
            return Err(Error::ModulusMismatch {
                left: p.q,
                right: f.field().order(),
            });
        }
        if f.num_vars() != p.n {
            return Err(Error::DimensionMismatch {
                expected: p.n,
                got: f.num_vars(),
            });
        }
        if f.total_degree() > p.d {
            return Err(Error::DegreeExceeded {
                degree: f.total_degree(),
                bound: p.d,
            });
        }
        Ok(())
    }

    /// `f(share_i)` for every worker, evaluated in parallel, in worker order.
    pub fn worker_responses(&self, f: &MultiPoly) -> Result<Vec<u32>> {
        self.check_poly(f)?;
        Ok(self
            .admin
            .shares
            .par_iter()
            .map(|s| f.eval_raw(s.data.as_slice()))
            .collect())
    }

    /// Admin aggregation plus user decoding, given each worker's answer or
    /// `None` for a straggler. Does not touch the transcript.
    pub fn aggregate_and_decode(&self, responses: &[Option<u32>]) -> Result<FieldElement> {
        if let Some(v) = self.replica_fast_path(responses) {
            return Ok(v);
        }
        self.aggregate_and_decode_logged(responses)
            .map(|(v, _, _)| v)
    }

    /// Per-replica selection always lands on the base information set, so the
    /// weights apply directly. `None` when some position is lost in every replica.
    fn replica_fast_path(&self, responses: &[Option<u32>]) -> Option<FieldElement> {
        let ss = &self.scheme.superset;
        let width = ss.replica_width()?;
        if responses.len() != ss.len() || width != self.user.weights.len() || width == 0 {
            return None;
        }
        let field = self.user.params.field();
        let replicas = responses.len() / width;
        let mut acc = 0;
        for (pos, &w) in self.user.weights.iter().enumerate() {
            let a = (0..replicas).find_map(|j| responses[j * width + pos])?;
            acc = field.add(acc, field.mul(w, a));
        }
        Some(field.element(acc as u64))
    }

    fn aggregate_and_decode_logged(
        &self,
        responses: &[Option<u32>],
    ) -> Result<(FieldElement, Vec<usize>, Answers)> {
        let ss = &self.admin.superset;
        if responses.len() != ss.len() {
            return Err(Error::DimensionMismatch {
                expected: ss.len(),
                got: responses.len(),
            });
        }
        let responded: Vec<bool> = responses.iter().map(Option::is_some).collect();
        let sel = self.scheme.rm.select_available_infoset(ss, &responded)?;
        let answers = Answers(
            sel.entries
                .iter()
                .map(|&e| {
                    (
                        ss.entries[e].clone(),
                        responses[e].expect("selected entries responded"),
                    )
                })
                .collect(),
        );
        let field = self.user.params.field();
        let value = if sel.info_set == self.scheme.info_set {
            let v = self
                .user
                .weights
                .iter()
                .zip(&answers.0)
                .fold(0, |acc, (&w, (_, a))| field.add(acc, field.mul(w, *a)));
            field.element(v as u64)
        } else {
            self.scheme
                .rm
                .decode_g_at_k(&answers, self.user.key.as_vector())?
        };
        Ok((value, sel.entries, answers))
    }

    /// Runs one computation phase for `f` with the given workers silent.
    /// May be called repeatedly on the same stored data.
    pub fn computation_phase(
        &mut self,
        f: &MultiPoly,
        stragglers: &BTreeSet<usize>,
    ) -> Result<FieldElement> {
        let budget = self.user.params.stragglers;
        if stragglers.len() > budget {
            return Err(Error::StragglerBudgetExceeded {
                stragglers: stragglers.len(),
                budget,
            });
        }
        let workers = self.admin.shares.len();
        if let Some(&w) = stragglers.iter().find(|&&w| w >= workers) {
            return Err(Error::InvalidParameter(format!(
                "straggler id {w} out of range (N={workers})"
            )));
        }
        let all = self.worker_responses(f)?;
        let responses: Vec<Option<u32>> = all
            .iter()
            .enumerate()
            .map(|(i, &v)| (!stragglers.contains(&i)).then_some(v))
            .collect();
        self.transcript
            .push(Event::PolynomialShared { f: f.clone() });
        for (worker, r) in responses.iter().enumerate() {
            self.transcript.push(match r {
                Some(value) => Event::WorkerResponded {
                    worker,
                    value: *value,
                },
                None => Event::WorkerStraggled { worker },
            });
        }
        let (value, entries, answers) = self.aggregate_and_decode_logged(&responses)?;
        let symbols = answers.0.len();
        self.transcript.push(Event::AnswersForwarded {
            workers: entries,
            answers,
        });
        self.transcript.push(Event::Decoded { symbols });
        self.last_download_cost = Some(symbols);
        Ok(value)
    }
}

/// Symbols downloaded by the user in the latest computation phase.
pub fn download_cost(session: &SessionState) -> Result<usize> {
    session.last_download_cost.ok_or(Error::NoComputation)
}

/// Caller-supplied inputs of the leakage bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditParams {
    pub r: usize,
    pub p: Order,
    pub epsilon: f64,
    pub a: f64,
    #[serde(default)]
    pub variant: EpsilonCVariant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    /// `I(X_tilde; X_R)` in `q`-ary units for every `r`-subset.
    pub per_subset: Vec<(SubsetSelector, f64)>,
    pub max_leakage: f64,
    pub argmax: SubsetSelector,
    pub bound: BoundParams,
    pub epsilon_c: EpsilonC,
    pub variant: EpsilonCVariant,
    pub pass: bool,
}

/// Exact leakage of `X + KG` to an admin that sees all of `X_tilde`,
/// compared against the bound for the caller's `(p, eps, a)`.
pub fn leakage_audit(
    enumerator: &Enumerator,
    dist: &Distribution,
    code: &LinearCode,
    params: &AuditParams,
) -> Result<LeakageReport> {
    let bound = BoundParams::from_distribution(dist, params.r, params.p, params.epsilon, params.a)?;
    leakage_audit_with(enumerator, dist, code, params, bound)
}

fn leakage_audit_with(
    enumerator: &Enumerator,
    dist: &Distribution,
    code: &LinearCode,
    params: &AuditParams,
    bound: BoundParams,
) -> Result<LeakageReport> {
    let per_subset = enumerator.leakage_profile(dist, code, params.r)?;
    let (argmax, max_leakage) = per_subset
        .iter()
        .fold(None::<(&SubsetSelector, f64)>, |best, (s, i)| match best {
            Some((_, b)) if b >= *i => best,
            _ => Some((s, *i)),
        })
        .map(|(s, i)| (s.clone(), i))
        .expect("at least one subset");
    let epsilon_c = epsilon_c_both(&bound);
    let pass = max_leakage <= epsilon_c.get(params.variant) + HOLD_TOL;
    Ok(LeakageReport {
        per_subset,
        max_leakage,
        argmax,
        bound,
        epsilon_c,
        variant: params.variant,
        pass,
    })
}

/// One sampled code of an ensemble audit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub code_seed: u64,
    /// The subset attaining the maximum leakage.
    #[serde(rename = "R")]
    pub subset: SubsetSelector,
    /// `max_R I(X_tilde; X_R)` in `q`-ary units.
    #[serde(rename = "I_bits_q")]
    pub leakage: f64,
    pub bound: f64,
    pub pass: bool,
    /// `V_p(P_X_tilde, uniform)` for this code.
    pub vp_uniform: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub codes: usize,
    pub pass_fraction: f64,
    /// `1 - 1/a`.
    pub target: f64,
    /// Binomial standard deviation of the pass fraction at `target`.
    pub sigma: f64,
    pub epsilon_c: EpsilonC,
    pub mean_vp_uniform: f64,
    pub sd_vp_uniform: f64,
    pub smoothing_threshold: f64,
}

/// Samples one `[n, m]` code per seed and audits each; rows come back in
/// seed order regardless of scheduling.
pub fn ensemble_audit(
    enumerator: &Enumerator,
    dist: &Distribution,
    m: usize,
    code_seeds: &[u64],
    params: &AuditParams,
) -> Result<Vec<AuditRow>> {
    let bound = BoundParams::from_distribution(dist, params.r, params.p, params.epsilon, params.a)?;
    let uniform = Distribution::uniform(dist.field(), dist.n())?;
    let mut rows = code_seeds
        .par_iter()
        .map(|&seed| {
            let code = sample_code(dist.n(), m, dist.field(), seed)?;
            let rep = leakage_audit_with(enumerator, dist, &code, params, bound)?;
            let vp = v_p_distance(&enumerator.pushforward(dist, &code)?, &uniform, params.p)?;
            Ok(AuditRow {
                code_seed: seed,
                subset: rep.argmax,
                leakage: rep.max_leakage,
                bound: rep.epsilon_c.get(params.variant),
                pass: rep.pass,
                vp_uniform: vp,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.code_seed);
    Ok(rows)
}

pub fn summarize_ensemble(
    rows: &[AuditRow],
    dist: &Distribution,
    params: &AuditParams,
) -> Result<EnsembleSummary> {
    let bound = BoundParams::from_distribution(dist, params.r, params.p, params.epsilon, params.a)?;
    let k = rows.len().max(1) as f64;
    let pass_fraction = rows.iter().filter(|r| r.pass).count() as f64 / k;
    let target = 1.0 - 1.0 / params.a;
    let mean = rows.iter().map(|r| r.vp_uniform).sum::<f64>() / k;
    let var = rows
        .iter()
        .map(|r| (r.vp_uniform - mean).powi(2))
        .sum::<f64>()
        / (k - 1.0).max(1.0);
    Ok(EnsembleSummary {
        codes: rows.len(),
        pass_fraction,
        target,
        sigma: (target * (1.0 - target) / k).sqrt(),
        epsilon_c: epsilon_c_both(&bound),
        mean_vp_uniform: mean,
        sd_vp_uniform: var.sqrt(),
        smoothing_threshold: smoothing_threshold(params.p, params.epsilon),
    })
}
