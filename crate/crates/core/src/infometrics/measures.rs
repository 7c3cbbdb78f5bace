//! Entropies, distances and divergences between tables over the same space.
//! Logarithms are base `q` unless a name says otherwise.

use serde::{Deserialize, Serialize};

use super::Distribution;
use crate::error::{Error, Result};

/// Integer Rényi order `p >= 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Order(u32);

impl Order {
    pub fn new(p: u32) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidParameter(format!("order p={p} must be >= 2")));
        }
        Ok(Self(p))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

impl TryFrom<u32> for Order {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        Self::new(p)
    }
}

impl From<Order> for u32 {
    fn from(p: Order) -> u32 {
        p.0
    }
}

/// `log_q(x)`; exact on powers of two when `q = 2`.
pub fn log_q(x: f64, q: u32) -> f64 {
    if q == 2 {
        x.log2()
    } else {
        x.ln() / (q as f64).ln()
    }
}

/// Converts an amount in `q`-ary units to nats.
pub fn to_nats(value: f64, q: u32) -> f64 {
    value * (q as f64).ln()
}

/// Converts an amount in `q`-ary units to bits.
pub fn to_bits(value: f64, q: u32) -> f64 {
    value * (q as f64).log2()
}

fn power_sum(probs: &[f64], p: Order) -> f64 {
    let p = p.get() as i32;
    probs.iter().filter(|&&x| x > 0.0).map(|&x| x.powi(p)).sum()
}

/// Rényi entropy `H_p = log_q(sum P^p) / (1 - p)`. Equals `n` on the uniform
/// law over `F_q^n` and 0 on a point mass.
pub fn renyi_entropy(dist: &Distribution, p: Order) -> f64 {
    let h = log_q(power_sum(dist.probs(), p), dist.q()) / (1.0 - p.as_f64());
    // -0.0 on point masses
    h + 0.0
}

pub fn shannon_entropy(dist: &Distribution) -> f64 {
    let q = dist.q();
    -dist
        .probs()
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * log_q(x, q))
        .sum::<f64>()
}

/// Variational distance `sum |P - Q|` (twice the total variation).
pub fn v_distance(a: &Distribution, b: &Distribution) -> Result<f64> {
    a.same_shape(b)?;
    Ok(a.probs()
        .iter()
        .zip(b.probs())
        .map(|(x, y)| (x - y).abs())
        .sum())
}

/// `V_p = q^n (q^{-n} sum |P - Q|^p)^{1/p}`; always at least [`v_distance`].
pub fn v_p_distance(a: &Distribution, b: &Distribution, p: Order) -> Result<f64> {
    a.same_shape(b)?;
    let size = a.len() as f64;
    let pe = p.get() as i32;
    let mean = a
        .probs()
        .iter()
        .zip(b.probs())
        .map(|(x, y)| (x - y).abs().powi(pe))
        .sum::<f64>()
        / size;
    Ok(size * mean.powf(1.0 / p.as_f64()))
}

/// Half the variational distance.
pub fn total_variation(a: &Distribution, b: &Distribution) -> Result<f64> {
    Ok(0.5 * v_distance(a, b)?)
}

/// KL divergence in base `q`; `+inf` when `a` is not absolutely continuous
/// with respect to `b`.
pub fn kl_divergence(a: &Distribution, b: &Distribution) -> Result<f64> {
    a.same_shape(b)?;
    let q = a.q();
    let mut acc = 0.0;
    for (&x, &y) in a.probs().iter().zip(b.probs()) {
        if x > 0.0 {
            if y <= 0.0 {
                return Ok(f64::INFINITY);
            }
            acc += x * log_q(x / y, q);
        }
    }
    Ok(acc.max(0.0))
}

/// Order-`p` Rényi divergence `log_q(sum P^p Q^{1-p}) / (p - 1)`, `+inf` on
/// support violation.
pub fn renyi_divergence(a: &Distribution, b: &Distribution, p: Order) -> Result<f64> {
    a.same_shape(b)?;
    let pe = p.get() as i32;
    let mut acc = 0.0;
    for (&x, &y) in a.probs().iter().zip(b.probs()) {
        if x > 0.0 {
            if y <= 0.0 {
                return Ok(f64::INFINITY);
            }
            acc += x.powi(pe) / y.powi(pe - 1);
        }
    }
    Ok((log_q(acc, a.q()) / (p.as_f64() - 1.0)).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::PrimeField;
    use rand::{Rng, SeedableRng};

    fn gf(q: u32) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    fn p2() -> Order {
        Order::new(2).unwrap()
    }

    #[test]
    fn order_validation() {
        assert!(Order::new(1).is_err());
        assert!(Order::new(0).is_err());
        assert_eq!(Order::new(3).unwrap().get(), 3);
    }

    #[test]
    fn renyi_entropy_examples() {
        let u = Distribution::uniform(gf(2), 3).unwrap();
        assert_eq!(renyi_entropy(&u, p2()), 3.0);
        let pm = Distribution::point_mass(gf(3), 2, 4).unwrap();
        assert_eq!(renyi_entropy(&pm, p2()), 0.0);
        let b = Distribution::new(gf(2), 1, vec![0.75, 0.25]).unwrap();
        let oracle = -(10.0f64 / 16.0).log2();
        assert!((renyi_entropy(&b, p2()) - oracle).abs() < 1e-15);
        assert!((oracle - 0.6781).abs() < 1e-4);
    }

    #[test]
    fn entropy_uniform_is_n_and_monotone_in_order() {
        for (q, n) in [(2u32, 5usize), (3, 3), (5, 2), (7, 2)] {
            let u = Distribution::uniform(gf(q), n).unwrap();
            for p in 2..6 {
                assert!((renyi_entropy(&u, Order::new(p).unwrap()) - n as f64).abs() < 1e-12);
            }
            assert!((shannon_entropy(&u) - n as f64).abs() < 1e-12);
        }
        for seed in 0..100 {
            let d = Distribution::random_dirichlet(gf(3), 3, 0.5, seed).unwrap();
            let mut prev = shannon_entropy(&d);
            for p in 2..7 {
                let h = renyi_entropy(&d, Order::new(p).unwrap());
                assert!(h <= prev + 1e-12);
                prev = h;
            }
        }
    }

    #[test]
    fn distance_examples() {
        let a = Distribution::new(gf(2), 1, vec![1.0, 0.0]).unwrap();
        let u = Distribution::uniform(gf(2), 1).unwrap();
        assert_eq!(v_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(v_p_distance(&a, &a, p2()).unwrap(), 0.0);
        assert!((v_distance(&a, &u).unwrap() - 1.0).abs() < 1e-15);
        assert!((v_p_distance(&a, &u, p2()).unwrap() - 1.0).abs() < 1e-15);
        let other = Distribution::uniform(gf(2), 2).unwrap();
        assert!(v_distance(&a, &other).is_err());
    }

    #[test]
    fn divergence_examples() {
        let u = Distribution::uniform(gf(2), 2).unwrap();
        let pm = Distribution::point_mass(gf(2), 2, 2).unwrap();
        assert_eq!(kl_divergence(&u, &u).unwrap(), 0.0);
        assert_eq!(renyi_divergence(&u, &u, p2()).unwrap(), 0.0);
        assert!((kl_divergence(&pm, &u).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(kl_divergence(&u, &pm).unwrap(), f64::INFINITY);
        assert_eq!(renyi_divergence(&u, &pm, p2()).unwrap(), f64::INFINITY);
    }

    #[test]
    fn v_le_vp_and_d_le_dp_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for t in 0..1000u64 {
            let q = [2u32, 3][rng.random_range(0..2)];
            let n = rng.random_range(1..=4);
            let p = Order::new(rng.random_range(2..=4)).unwrap();
            let a = Distribution::random_dirichlet(gf(q), n, 0.5, 2 * t).unwrap();
            let b = Distribution::random_dirichlet(gf(q), n, 1.0, 2 * t + 1).unwrap();
            assert!(v_distance(&a, &b).unwrap() <= v_p_distance(&a, &b, p).unwrap() + 1e-12);
            assert!(kl_divergence(&a, &b).unwrap() <= renyi_divergence(&a, &b, p).unwrap() + 1e-12);
        }
    }

    #[test]
    fn unit_conversions() {
        assert!((to_bits(1.0, 4 + 1) - 5f64.log2()).abs() < 1e-15);
        assert!((to_nats(1.0, 2) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(log_q(1.0 / 64.0, 2), -6.0);
    }
}
