use anyhow::{bail, ensure};
use icc_core::gf::PrimeField;
use icc_core::infometrics::{
    keysize_lower_bound, log_q, max_marginal_entropy, renyi_entropy, BoundParams, Distribution,
    Enumerator, Order,
};
use icc_core::protocol::{ensemble_audit, summarize_ensemble, AuditParams, EnsembleSummary};
use serde::{Deserialize, Serialize};

use crate::{comment_line, GlobalOpts, Report};

/// How `P_X` is produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DistSpec {
    /// Dirichlet weights over the whole table, seeded by the config seed.
    Dirichlet {
        concentration: f64,
    },
    Uniform,
    /// i.i.d. symbols with `P(1) = alpha`, `P(0) = 1 - alpha`.
    Bernoulli {
        alpha: f64,
    },
    /// Explicit table in lexicographic order.
    Table {
        probs: Vec<f64>,
    },
}

impl DistSpec {
    pub fn build(&self, field: PrimeField, n: usize, seed: u64) -> icc_core::Result<Distribution> {
        match self {
            Self::Dirichlet { concentration } => {
                Distribution::random_dirichlet(field, n, *concentration, seed)
            }
            Self::Uniform => Distribution::uniform(field, n),
            Self::Bernoulli { alpha } => Distribution::bernoulli(field, n, *alpha),
            Self::Table { probs } => Distribution::new(field, n, probs.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditConfig {
    pub n: usize,
    pub q: u32,
    pub r: usize,
    pub p: u32,
    pub a: f64,
    /// Defaults to `q^-(H_p(X) - max_R H_p(X_R) - p)`, which puts the key-size
    /// bound at `n`.
    pub epsilon: Option<f64>,
    /// Defaults to `ceil(keysize_lower_bound)`.
    pub m: Option<usize>,
    pub codes: usize,
    pub distribution: DistSpec,
    /// Seeds the distribution; code `i` uses seed `seed + 1 + i`.
    pub seed: u64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            n: 6,
            q: 2,
            r: 2,
            p: 2,
            a: 2.0,
            epsilon: None,
            m: None,
            codes: 500,
            distribution: DistSpec::Dirichlet { concentration: 1.0 },
            seed: 0,
        }
    }
}

/// Integer key size for a real bound, forgiving rounding noise just above an integer.
pub fn ceil_keysize(bound: f64) -> usize {
    (bound - 1e-9).ceil().max(1.0) as usize
}

#[derive(Debug, Serialize)]
struct Header<'a> {
    config: &'a AuditConfig,
    seed: u64,
    cap: u64,
    variant: &'a str,
    hp_x: f64,
    max_hp_xr: f64,
    keysize_bound: f64,
}

#[derive(Debug, Serialize)]
struct Footer<'a> {
    #[serde(flatten)]
    summary: &'a EnsembleSummary,
    /// `pass_fraction >= target - 3 sigma`.
    pass: bool,
}

pub struct AuditOutcome {
    pub config: AuditConfig,
    pub rows: Vec<icc_core::protocol::AuditRow>,
    pub summary: EnsembleSummary,
    pub csv: String,
}

/// Resolves the config, runs the ensemble and renders the CSV.
pub fn execute(mut cfg: AuditConfig, opts: &GlobalOpts) -> anyhow::Result<AuditOutcome> {
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    ensure!(cfg.codes >= 1, "codes must be at least 1");
    let field = PrimeField::new(cfg.q)?;
    let order = Order::new(cfg.p)?;
    let dist = cfg.distribution.build(field, cfg.n, cfg.seed)?;
    let hp_x = renyi_entropy(&dist, order);
    let max_hp = max_marginal_entropy(&dist, cfg.r, order)?;
    let epsilon = match cfg.epsilon {
        Some(e) => e,
        None => {
            let e = (cfg.q as f64).powf(-(hp_x - max_hp - cfg.p as f64));
            if e >= 1.0 {
                bail!(
                    "H_p(X) - max H_p(X_R) - p = {} is not positive; no epsilon < 1 keeps the key size at n. Set epsilon explicitly.",
                    hp_x - max_hp - cfg.p as f64
                );
            }
            e
        }
    };
    cfg.epsilon = Some(epsilon);
    let bp = BoundParams::new(cfg.n as u64, cfg.q, order, epsilon, cfg.a, hp_x, max_hp)?;
    let bound = keysize_lower_bound(&bp);
    let m = match cfg.m {
        Some(m) => m,
        None => ceil_keysize(bound),
    };
    ensure!(
        m >= 1 && m <= cfg.n,
        "key size m={m} (bound {bound:.6}, log_q(1/eps)={:.6}) must lie in 1..=n={}",
        log_q(1.0 / epsilon, cfg.q),
        cfg.n
    );
    cfg.m = Some(m);

    let params = AuditParams {
        r: cfg.r,
        p: order,
        epsilon,
        a: cfg.a,
        variant: opts.variant.into(),
    };
    let enumerator = Enumerator::new(opts.cap);
    let seeds: Vec<u64> = (0..cfg.codes as u64)
        .map(|i| cfg.seed.wrapping_add(1 + i))
        .collect();
    let rows = ensemble_audit(&enumerator, &dist, m, &seeds, &params)?;
    let summary = summarize_ensemble(&rows, &dist, &params)?;

    let variant = match opts.variant {
        crate::Variant::Sharp => "sharp",
        crate::Variant::Conservative => "conservative",
    };
    let mut csv = comment_line(&Header {
        config: &cfg,
        seed: cfg.seed,
        cap: opts.cap,
        variant,
        hp_x,
        max_hp_xr: max_hp,
        keysize_bound: bound,
    });
    csv.push_str("code_seed,R,I_bits_q,bound,pass\n");
    for row in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            row.code_seed, row.subset, row.leakage, row.bound, row.pass
        ));
    }
    csv.push_str(&comment_line(&Footer {
        summary: &summary,
        pass: fraction_ok(&summary),
    }));
    Ok(AuditOutcome {
        config: cfg,
        rows,
        summary,
        csv,
    })
}

fn fraction_ok(s: &EnsembleSummary) -> bool {
    s.pass_fraction >= s.target - 3.0 * s.sigma
}

pub fn run(cfg: AuditConfig, opts: &GlobalOpts) -> anyhow::Result<Report> {
    let out = execute(cfg, opts)?;
    let ok = fraction_ok(&out.summary);
    Ok(Report::single("audit.csv", out.csv, ok))
}
