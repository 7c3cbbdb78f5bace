use std::collections::BTreeSet;

use anyhow::{ensure, Context};
use icc_core::codes::sample_code;
use icc_core::gf::{space_size, FieldVector};
use icc_core::poly::{random_poly, MultiPoly};
use icc_core::protocol::{download_cost, Scheme, SchemeMetrics, SchemeParams};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{json_document, GlobalOpts, Report};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub n: usize,
    pub q: u32,
    pub r: usize,
    pub d: u32,
    #[serde(rename = "S")]
    pub stragglers: usize,
    pub m: usize,
    pub seed: u64,
    /// Number of independent runs; run `i` uses seed `seed + i`.
    pub runs: usize,
    /// Fixed data vector; random per run when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<u64>>,
    /// Fixed polynomial; random of degree `d` per run when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<MultiPoly>,
    /// Fixed straggler ids; `S` random workers per run when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub straggler_ids: Option<Vec<usize>>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            n: 4,
            q: 3,
            r: 1,
            d: 2,
            stragglers: 1,
            m: 3,
            seed: 0,
            runs: 1,
            x: None,
            f: None,
            straggler_ids: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct RunResult {
    seed: u64,
    stragglers: Vec<usize>,
    decoded: u32,
    direct: u32,
    #[serde(rename = "match")]
    matched: bool,
    download_cost: usize,
}

#[derive(Debug, Serialize)]
struct SimulateOutput {
    config: SimulateConfig,
    metrics: SchemeMetrics,
    runs: Vec<RunResult>,
    matches: usize,
    #[serde(rename = "match")]
    all_match: bool,
}

pub fn run(mut cfg: SimulateConfig, opts: &GlobalOpts) -> anyhow::Result<Report> {
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    ensure!(cfg.runs >= 1, "runs must be at least 1");
    let params = SchemeParams::new(cfg.n, cfg.q, cfg.r, cfg.d, cfg.stragglers)?;
    let scheme = Scheme::new(params, cfg.m)?;
    let field = params.field();
    let x_fixed = cfg
        .x
        .clone()
        .map(|v| FieldVector::new(field, v))
        .transpose()
        .context("invalid x")?;
    let workers = scheme.metrics().workers;

    let mut runs = Vec::with_capacity(cfg.runs);
    for i in 0..cfg.runs as u64 {
        let seed = cfg.seed.wrapping_add(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = sample_code(cfg.n, cfg.m, field, rng.random())?;
        let x = match &x_fixed {
            Some(x) => x.clone(),
            None => {
                let size = space_size(cfg.q, cfg.n) as usize;
                FieldVector::from_index(field, cfg.n, rng.random_range(0..size))
            }
        };
        let key_seed: u64 = rng.random();
        let f = match &cfg.f {
            Some(f) => f.clone(),
            None => random_poly(cfg.n, cfg.d, field, rng.random()),
        };
        let stragglers: BTreeSet<usize> = match &cfg.straggler_ids {
            Some(ids) => ids.iter().copied().collect(),
            None => sample(&mut rng, workers, cfg.stragglers.min(workers))
                .into_iter()
                .collect(),
        };
        let mut session = scheme.storage_phase(&x, code, key_seed)?;
        let decoded = session.computation_phase(&f, &stragglers)?;
        let direct = f.eval(&x)?;
        runs.push(RunResult {
            seed,
            stragglers: stragglers.into_iter().collect(),
            decoded: decoded.value(),
            direct: direct.value(),
            matched: decoded == direct,
            download_cost: download_cost(&session)?,
        });
    }
    let matches = runs.iter().filter(|r| r.matched).count();
    let out = SimulateOutput {
        metrics: *scheme.metrics(),
        config: cfg,
        all_match: matches == runs.len(),
        matches,
        runs,
    };
    Ok(Report::single(
        "simulate.json",
        json_document(&out),
        out.all_match,
    ))
}
