//! Closed-form key-size and leakage bounds for smoothing with random linear codes.

use serde::{Deserialize, Serialize};

use super::measures::{log_q, renyi_entropy, Order};
use super::{Distribution, SubsetSelector};
use crate::error::{Error, Result};
use crate::gf::PrimeField;

/// Inputs to the key-size and leakage bounds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub n: u64,
    pub q: u32,
    pub p: Order,
    /// Smoothing tolerance, `0 < epsilon < 1`.
    pub epsilon: f64,
    /// Markov factor, `a > 1`.
    pub a: f64,
    /// `H_p(X)` in q-ary units.
    pub hp_x: f64,
    /// `max_R H_p(X_R)` over all `r`-subsets.
    pub max_hp_xr: f64,
}

/// Which factor multiplies `epsilon^{1/p}` in the leakage bound: `Sharp` uses
/// `1 + q^{-maxH}`, `Conservative` uses `1 + q^{-maxH/p}` (what the
/// variational-distance argument yields directly).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsilonCVariant {
    #[default]
    Sharp,
    Conservative,
}

impl std::str::FromStr for EpsilonCVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sharp" => Ok(Self::Sharp),
            "conservative" => Ok(Self::Conservative),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant '{other}' (expected sharp|conservative)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonC {
    pub sharp: f64,
    pub conservative: f64,
}

impl EpsilonC {
    pub fn get(&self, variant: EpsilonCVariant) -> f64 {
        match variant {
            EpsilonCVariant::Sharp => self.sharp,
            EpsilonCVariant::Conservative => self.conservative,
        }
    }
}

impl BoundParams {
    pub fn new(
        n: u64,
        q: u32,
        p: Order,
        epsilon: f64,
        a: f64,
        hp_x: f64,
        max_hp_xr: f64,
    ) -> Result<Self> {
        PrimeField::new(q)?;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon={epsilon} must lie in (0, 1)"
            )));
        }
        if a.is_nan() || a <= 1.0 {
            return Err(Error::InvalidParameter(format!("a={a} must exceed 1")));
        }
        Ok(Self {
            n,
            q,
            p,
            epsilon,
            a,
            hp_x,
            max_hp_xr,
        })
    }

    /// Fills in `H_p(X)` and `max_R H_p(X_R)` from an explicit table.
    pub fn from_distribution(
        dist: &Distribution,
        r: usize,
        p: Order,
        epsilon: f64,
        a: f64,
    ) -> Result<Self> {
        let hp_x = renyi_entropy(dist, p);
        let max_hp_xr = max_marginal_entropy(dist, r, p)?;
        Self::new(dist.n() as u64, dist.q(), p, epsilon, a, hp_x, max_hp_xr)
    }
}

/// `max_R H_p(X_R)` over all `r`-subsets.
pub fn max_marginal_entropy(dist: &Distribution, r: usize, p: Order) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for s in SubsetSelector::all(dist.n(), r)? {
        best = best.max(renyi_entropy(&dist.marginal(&s)?, p));
    }
    Ok(best)
}

/// `n + p + log_q(1/eps) - H_p(X) + max_R H_p(X_R)`, for any `eps > 0`.
pub fn keysize_formula(n: u64, q: u32, p: u32, epsilon: f64, hp_x: f64, max_hp_xr: f64) -> f64 {
    n as f64 + p as f64 + log_q(1.0 / epsilon, q) - hp_x + max_hp_xr
}

/// Real-valued lower bound on the key size `m`; round up for an integer key.
pub fn keysize_lower_bound(bp: &BoundParams) -> f64 {
    keysize_formula(bp.n, bp.q, bp.p.get(), bp.epsilon, bp.hp_x, bp.max_hp_xr)
}

/// `m >= r + p + b log_q(n)`: the bound when `eps = n^{-b}`,
/// `H_p(X) = n - 1` and `max_R H_p(X_R) = r - 1`.
pub fn example_keysize(n: u64, q: u32, r: u64, p: u32, b: f64) -> f64 {
    r as f64 + p as f64 + b * log_q(n as f64, q)
}

/// `delta = a 2^{(2p-1)/p} (1 + factor) eps^{1/p}`.
pub fn leakage_delta(bp: &BoundParams, variant: EpsilonCVariant) -> f64 {
    let p = bp.p.as_f64();
    let q = bp.q as f64;
    let factor = match variant {
        EpsilonCVariant::Sharp => q.powf(-bp.max_hp_xr),
        EpsilonCVariant::Conservative => q.powf(-bp.max_hp_xr / p),
    };
    bp.a * 2f64.powf((2.0 * p - 1.0) / p) * (1.0 + factor) * bp.epsilon.powf(1.0 / p)
}

/// `eps_c = p/(p-1) log_q(1 + delta)`.
pub fn leakage_bound_epsilon_c(bp: &BoundParams, variant: EpsilonCVariant) -> f64 {
    let p = bp.p.as_f64();
    p / (p - 1.0) * log_q(1.0 + leakage_delta(bp, variant), bp.q)
}

pub fn epsilon_c_both(bp: &BoundParams) -> EpsilonC {
    EpsilonC {
        sharp: leakage_bound_epsilon_c(bp, EpsilonCVariant::Sharp),
        conservative: leakage_bound_epsilon_c(bp, EpsilonCVariant::Conservative),
    }
}

/// `2^{(p-1)/p} ((1+eps)^p - 1)^{1/p}`: the expected `V_p` distance to uniform
/// attained by a random code of sufficient dimension.
pub fn smoothing_threshold(p: Order, epsilon: f64) -> f64 {
    let p = p.as_f64();
    2f64.powf((p - 1.0) / p) * ((1.0 + epsilon).powf(p) - 1.0).powf(1.0 / p)
}

/// One sample of a key-size curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    pub m_real: f64,
    pub m_ceil: f64,
}

fn curve_point(x: f64, m_real: f64) -> CurvePoint {
    CurvePoint {
        x,
        m_real,
        m_ceil: m_real.ceil(),
    }
}

/// `m(eps) = n + p + log_q(1/eps) - h_cond` for each `eps`, with `h_cond` the
/// minimum conditional Rényi entropy.
pub fn keysize_vs_leakage(
    n: u64,
    q: u32,
    p: u32,
    h_cond: f64,
    epsilons: &[f64],
) -> Vec<CurvePoint> {
    epsilons
        .iter()
        .map(|&eps| curve_point(eps, keysize_formula(n, q, p, eps, h_cond, 0.0)))
        .collect()
}

/// `m(H) = n + p + log_q(1/eps) - H` for each entropy `H`.
pub fn keysize_vs_entropy(
    n: u64,
    q: u32,
    p: u32,
    epsilon: f64,
    entropies: &[f64],
) -> Vec<CurvePoint> {
    entropies
        .iter()
        .map(|&h| curve_point(h, keysize_formula(n, q, p, epsilon, h, 0.0)))
        .collect()
}
