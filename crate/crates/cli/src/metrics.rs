use std::collections::BTreeMap;

use anyhow::ensure;
use icc_core::codes::sample_code;
use icc_core::gf::{point_from_index, PrimeField};
use icc_core::infometrics::{
    check_conditional_entropy, check_divergence_relation, keysize_formula, kl_divergence,
    max_marginal_entropy, pinsker_check, renyi_divergence, renyi_entropy, triangle_audit,
    v_distance, v_p_distance, Distribution, Enumerator, Order, SubsetSelector, HOLD_TOL,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{json_document, GlobalOpts, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Dirichlet,
    Uniform,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    /// Random distributions for the conditional-entropy inequality.
    pub distributions: usize,
    pub n_max: usize,
    pub q: Vec<u32>,
    pub r: Vec<usize>,
    pub p: Vec<u32>,
    pub family: Family,
    pub concentration: f64,
    /// Cases for each of the pairwise checks.
    pub pairs: usize,
    pub seed: u64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            distributions: 200,
            n_max: 6,
            q: vec![2, 3],
            r: vec![1, 2],
            p: vec![2, 3],
            family: Family::Dirichlet,
            concentration: 1.0,
            pairs: 1000,
            seed: 0,
        }
    }
}

/// Pass count for one inequality, with the smallest observed margin
/// (bound minus value; negative means violated).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tally {
    pub cases: usize,
    pub passed: usize,
    pub min_slack: f64,
}

impl Default for Tally {
    fn default() -> Self {
        Self {
            cases: 0,
            passed: 0,
            min_slack: f64::INFINITY,
        }
    }
}

impl Tally {
    fn record(&mut self, slack: f64, holds: bool) {
        self.cases += 1;
        self.passed += holds as usize;
        self.min_slack = self.min_slack.min(slack);
    }

    fn ok(&self) -> bool {
        self.cases == self.passed
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricsReport {
    pub config: MetricsConfig,
    pub checks: BTreeMap<&'static str, Tally>,
    /// Recorded but not counted towards `all_passed`.
    pub informational: BTreeMap<&'static str, Tally>,
    /// Largest `|slack|` of the conditional-entropy inequality.
    pub conditional_entropy_max_abs_slack: f64,
    /// Draws discarded because no `eps < 1` puts the key-size bound at or below `n`.
    pub keyed_draws_rejected: usize,
    pub all_passed: bool,
}

struct Sampler<'a> {
    cfg: &'a MetricsConfig,
    rng: ChaCha8Rng,
}

impl Sampler<'_> {
    fn field(&mut self) -> PrimeField {
        PrimeField::new(*self.cfg.q.choose(&mut self.rng).expect("non-empty")).expect("validated")
    }

    fn order(&mut self) -> Order {
        Order::new(*self.cfg.p.choose(&mut self.rng).expect("non-empty")).expect("validated")
    }

    fn dist(&mut self, field: PrimeField, n: usize) -> icc_core::Result<Distribution> {
        match self.cfg.family {
            Family::Uniform => Distribution::uniform(field, n),
            Family::Dirichlet => {
                let seed = self.rng.random();
                Distribution::random_dirichlet(field, n, self.cfg.concentration, seed)
            }
        }
    }

    /// `n` in `lo..=hi`, shrunk for large fields so tables stay small.
    fn n(&mut self, field: PrimeField, lo: usize, hi: usize) -> usize {
        let hi = match field.order() {
            2 | 3 => hi,
            5 => hi.min(4),
            _ => hi.min(3),
        };
        self.rng.random_range(lo..=hi.max(lo))
    }
}

struct KeyedCase {
    x: Distribution,
    code: icc_core::codes::LinearCode,
    subset: SubsetSelector,
    z: Vec<u32>,
    p: Order,
    cond: Distribution,
    encoded: Distribution,
}

const MAX_KEYED_ATTEMPTS: usize = 10_000;

impl Sampler<'_> {
    /// A random `(P_X, code, R, z)` with `m = ceil(keysize bound)` for a random
    /// `eps` in the range where that bound is at most `n`.
    fn keyed_case(
        &mut self,
        enumerator: &Enumerator,
        rejected: &mut usize,
    ) -> anyhow::Result<KeyedCase> {
        for _ in 0..MAX_KEYED_ATTEMPTS {
            let field = self.field();
            let q = field.order();
            let p = self.order();
            let r = *self.cfg.r.choose(&mut self.rng).expect("non-empty");
            let n = self.n(field, (r + 1).max(3), self.cfg.n_max);
            if r >= n {
                *rejected += 1;
                continue;
            }
            let x = self.dist(field, n)?;
            let hp_x = renyi_entropy(&x, p);
            let max_hp = max_marginal_entropy(&x, r, p)?;
            let room = hp_x - max_hp - p.as_f64();
            if room <= 1e-9 {
                *rejected += 1;
                continue;
            }
            let eps = (q as f64).powf(-self.rng.random_range(1e-9..=room));
            let bound = keysize_formula(n as u64, q, p.get(), eps, hp_x, max_hp);
            let m = ((bound - 1e-9).ceil() as usize).clamp(1, n);
            let code = sample_code(n, m, field, self.rng.random())?;
            let all = SubsetSelector::all(n, r)?;
            let subset = all.choose(&mut self.rng).expect("non-empty").clone();
            let marg = x.marginal(&subset)?;
            let support: Vec<usize> = (0..marg.len()).filter(|&i| marg.prob(i) > 0.0).collect();
            let z = point_from_index(q, r, *support.choose(&mut self.rng).expect("mass"));
            let cond = enumerator.conditional_encoded(&x, &code, &subset, &z)?;
            let encoded = enumerator.pushforward(&x, &code)?;
            return Ok(KeyedCase {
                x,
                code,
                subset,
                z,
                p,
                cond,
                encoded,
            });
        }
        anyhow::bail!("no distribution in {MAX_KEYED_ATTEMPTS} draws admits a key size at most n; raise n_max or lower p")
    }
}

pub fn compute(mut cfg: MetricsConfig, opts: &GlobalOpts) -> anyhow::Result<MetricsReport> {
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    ensure!(
        !cfg.q.is_empty() && !cfg.r.is_empty() && !cfg.p.is_empty(),
        "q, r and p lists must be non-empty"
    );
    ensure!(cfg.n_max >= 2, "n_max must be at least 2");
    for &q in &cfg.q {
        PrimeField::new(q)?;
    }
    for &p in &cfg.p {
        Order::new(p)?;
    }
    ensure!(
        cfg.r.iter().all(|&r| r >= 1 && r < cfg.n_max),
        "every r needs 1 <= r < n_max"
    );

    let enumerator = Enumerator::new(opts.cap);
    let mut s = Sampler {
        cfg: &cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };
    let mut checks: BTreeMap<&'static str, Tally> = BTreeMap::new();
    let mut informational: BTreeMap<&'static str, Tally> = BTreeMap::new();
    let mut max_abs = 0.0f64;
    let mut rejected = 0usize;

    for _ in 0..cfg.distributions {
        let field = s.field();
        let r = *cfg.r.choose(&mut s.rng).expect("non-empty");
        let n = s.n(field, r + 1, cfg.n_max);
        let p = s.order();
        let d = s.dist(field, n)?;
        let rep = check_conditional_entropy(&d, p, r)?;
        max_abs = max_abs.max(rep.slack.abs());
        checks
            .entry("conditional_entropy")
            .or_default()
            .record(rep.slack, rep.holds);
    }

    for _ in 0..cfg.pairs {
        // Pairwise distance and divergence inequalities.
        let field = s.field();
        let n = s.n(field, 1, 3);
        let p = s.order();
        let a = s.dist(field, n)?;
        let b = s.dist(field, n)?;
        let (v, vp) = (v_distance(&a, &b)?, v_p_distance(&a, &b, p)?);
        checks
            .entry("v_le_vp")
            .or_default()
            .record(vp - v, v <= vp + HOLD_TOL);
        let (d, dp) = (kl_divergence(&a, &b)?, renyi_divergence(&a, &b, p)?);
        let slack = if dp.is_infinite() {
            f64::INFINITY
        } else {
            dp - d
        };
        checks
            .entry("d_le_dp")
            .or_default()
            .record(slack, d <= dp + HOLD_TOL);
        let pk = pinsker_check(&a, &b)?;
        checks
            .entry("pinsker_standard")
            .or_default()
            .record((0.5 * pk.d_nats).sqrt() - pk.tv, pk.standard_holds);
        informational
            .entry("pinsker_v_form")
            .or_default()
            .record((0.5 * pk.d).sqrt() - pk.v, pk.v_form_holds);

        // Entropy normalizations.
        let n = s.n(field, 1, cfg.n_max);
        let u = Distribution::uniform(field, n)?;
        let h = renyi_entropy(&u, p);
        let err = (h - n as f64).abs();
        checks
            .entry("entropy_uniform")
            .or_default()
            .record(-err, err <= 1e-12);
        let idx = s.rng.random_range(0..u.len());
        let h0 = renyi_entropy(&Distribution::point_mass(field, n, idx)?, p);
        checks
            .entry("entropy_point_mass")
            .or_default()
            .record(-h0.abs(), h0 == 0.0);

        // Conditional encoded law against the encoded law, with the key at the
        // size the bound asks for.
        let case = s.keyed_case(&enumerator, &mut rejected)?;
        let rel = check_divergence_relation(&case.cond, &case.encoded, case.p)?;
        checks
            .entry("divergence_relation")
            .or_default()
            .record(rel.bound - rel.dp, rel.holds);
        let tri = triangle_audit(&enumerator, &case.x, &case.code, &case.subset, &case.z)?;
        checks.entry("triangle").or_default().record(
            tri.conditional_to_uniform + tri.encoded_to_uniform - tri.lhs,
            tri.holds,
        );
    }

    let all_passed = checks.values().all(Tally::ok);
    Ok(MetricsReport {
        config: cfg,
        checks,
        informational,
        conditional_entropy_max_abs_slack: max_abs,
        keyed_draws_rejected: rejected,
        all_passed,
    })
}

pub fn run(cfg: MetricsConfig, opts: &GlobalOpts) -> anyhow::Result<Report> {
    let report = compute(cfg, opts)?;
    Ok(Report::single(
        "metrics.json",
        json_document(&report),
        report.all_passed,
    ))
}
