//! Exhaustive checks of the inequalities the leakage argument relies on.
//! Every report carries the raw quantities so violations can be inspected.

use serde::{Deserialize, Serialize};

use super::bounds::smoothing_threshold;
use super::encoding::Enumerator;
use super::measures::{
    kl_divergence, log_q, renyi_divergence, renyi_entropy, to_nats, total_variation, v_distance,
    v_p_distance, Order,
};
use super::{Distribution, SubsetSelector};
use crate::codes::LinearCode;
use crate::error::Result;
use crate::gf::point_from_index;

/// Absolute slack allowed before a "holds" verdict turns false.
pub const HOLD_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalEntropyReport {
    /// `H_p(X) - max_R H_p(X_R)`.
    pub lhs: f64,
    /// `min_{R, z} H_p(X | X_R = z)` over `z` of positive probability.
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub argmin_subset: SubsetSelector,
    pub argmin_z: Vec<u32>,
}

/// Compares `H_p(X) - max_R H_p(X_R)` against `min_{R,z} H_p(X | X_R = z)`.
pub fn check_conditional_entropy(
    dist: &Distribution,
    p: Order,
    r: usize,
) -> Result<ConditionalEntropyReport> {
    let q = dist.q();
    let hp_x = renyi_entropy(dist, p);
    let mut max_marginal = f64::NEG_INFINITY;
    let mut best: Option<(f64, SubsetSelector, Vec<u32>)> = None;
    for s in SubsetSelector::all(dist.n(), r)? {
        let marg = dist.marginal(&s)?;
        max_marginal = max_marginal.max(renyi_entropy(&marg, p));
        for (zi, &pz) in marg.probs().iter().enumerate() {
            if pz <= 0.0 {
                continue;
            }
            let z = point_from_index(q, s.len(), zi);
            let h = renyi_entropy(&dist.conditional(&s, &z)?, p);
            if best.as_ref().is_none_or(|(b, _, _)| h < *b) {
                best = Some((h, s.clone(), z));
            }
        }
    }
    let (rhs, argmin_subset, argmin_z) = best.expect("some z has positive mass");
    let lhs = hp_x - max_marginal;
    let slack = lhs - rhs;
    Ok(ConditionalEntropyReport {
        lhs,
        rhs,
        slack,
        holds: slack >= -HOLD_TOL,
        argmin_subset,
        argmin_z,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRelationReport {
    pub vp: f64,
    pub dp: f64,
    pub bound: f64,
    pub holds: bool,
}

/// With `delta = V_p(P, Q)`, whether `D_p(P || Q) <= p/(p-1) log_q(1 + delta)`.
pub fn check_divergence_relation(
    a: &Distribution,
    b: &Distribution,
    p: Order,
) -> Result<DivergenceRelationReport> {
    let vp = v_p_distance(a, b, p)?;
    let dp = renyi_divergence(a, b, p)?;
    let pf = p.as_f64();
    let bound = pf / (pf - 1.0) * log_q(1.0 + vp, a.q());
    Ok(DivergenceRelationReport {
        vp,
        dp,
        bound,
        holds: dp <= bound + HOLD_TOL,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinskerReport {
    /// `sum |P - Q|`.
    pub v: f64,
    /// KL divergence in base `q`.
    pub d: f64,
    /// `v <= sqrt(d / 2)` with the mixed conventions above; informational only.
    pub v_form_holds: bool,
    /// `(1/2) sum |P - Q|`.
    pub tv: f64,
    pub d_nats: f64,
    /// `tv <= sqrt(d_nats / 2)`, the classical inequality.
    pub standard_holds: bool,
}

pub fn pinsker_check(a: &Distribution, b: &Distribution) -> Result<PinskerReport> {
    let v = v_distance(a, b)?;
    let d = kl_divergence(a, b)?;
    let tv = total_variation(a, b)?;
    let d_nats = to_nats(d, a.q());
    Ok(PinskerReport {
        v,
        d,
        v_form_holds: v <= (0.5 * d).sqrt() + HOLD_TOL,
        tv,
        d_nats,
        standard_holds: tv <= (0.5 * d_nats).sqrt() + HOLD_TOL,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleReport {
    /// `V(P_{X~|X_R=z}, P_X~)`.
    pub lhs: f64,
    /// `V(P_{X~|X_R=z}, U)`.
    pub conditional_to_uniform: f64,
    /// `V(P_X~, U)`.
    pub encoded_to_uniform: f64,
    pub holds: bool,
}

pub fn triangle_audit(
    enumerator: &Enumerator,
    dist: &Distribution,
    code: &LinearCode,
    subset: &SubsetSelector,
    z: &[u32],
) -> Result<TriangleReport> {
    let encoded = enumerator.pushforward(dist, code)?;
    let cond = enumerator.conditional_encoded(dist, code, subset, z)?;
    let uniform = Distribution::uniform(dist.field(), dist.n())?;
    let lhs = v_distance(&cond, &encoded)?;
    let a = v_distance(&cond, &uniform)?;
    let b = v_distance(&encoded, &uniform)?;
    Ok(TriangleReport {
        lhs,
        conditional_to_uniform: a,
        encoded_to_uniform: b,
        holds: lhs <= a + b + HOLD_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalVp {
    pub subset: SubsetSelector,
    pub z: Vec<u32>,
    pub vp: f64,
}

/// How close one code brings the encoded law (and its conditionals) to uniform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    pub code_seed: Option<u64>,
    pub n: usize,
    pub m: usize,
    pub q: u32,
    pub p: Order,
    pub epsilon: f64,
    /// `eps * q^{-max_R H_p(X_R)}`.
    pub epsilon_prime: f64,
    /// `V_p(P_X~, U)`.
    pub uniform_target_vp: f64,
    pub conditional_vp: Vec<ConditionalVp>,
    pub threshold: f64,
    pub threshold_prime: f64,
}

pub fn smoothing_report(
    enumerator: &Enumerator,
    dist: &Distribution,
    code: &LinearCode,
    code_seed: Option<u64>,
    r: usize,
    p: Order,
    epsilon: f64,
) -> Result<SmoothingReport> {
    let uniform = Distribution::uniform(dist.field(), dist.n())?;
    let encoded = enumerator.pushforward(dist, code)?;
    let uniform_target_vp = v_p_distance(&encoded, &uniform, p)?;
    let q = dist.q();
    let mut conditional_vp = Vec::new();
    let mut max_marginal = f64::NEG_INFINITY;
    for s in SubsetSelector::all(dist.n(), r)? {
        let marg = dist.marginal(&s)?;
        max_marginal = max_marginal.max(renyi_entropy(&marg, p));
        for (zi, &pz) in marg.probs().iter().enumerate() {
            if pz > 0.0 {
                let z = point_from_index(q, s.len(), zi);
                let cond = enumerator.conditional_encoded(dist, code, &s, &z)?;
                conditional_vp.push(ConditionalVp {
                    subset: s.clone(),
                    z,
                    vp: v_p_distance(&cond, &uniform, p)?,
                });
            }
        }
    }
    let epsilon_prime = epsilon * (q as f64).powf(-max_marginal);
    Ok(SmoothingReport {
        code_seed,
        n: dist.n(),
        m: code.m(),
        q,
        p,
        epsilon,
        epsilon_prime,
        uniform_target_vp,
        conditional_vp,
        threshold: smoothing_threshold(p, epsilon),
        threshold_prime: smoothing_threshold(p, epsilon_prime),
    })
}
