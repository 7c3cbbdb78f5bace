//! Exact probability machinery over `F_q^n`: explicit distribution tables,
//! Rényi entropies and divergences, variational distances, exact mutual
//! information of the encoding, the key-size / leakage bound calculators, and
//! enumeration-based checks of the supporting inequalities.
//!
//! Everything is computed from full tables; requests beyond the enumeration
//! cap are rejected instead of sampled.

mod bounds;
mod checks;
mod distribution;
mod encoding;
mod measures;

pub use bounds::{
    epsilon_c_both, example_keysize, keysize_formula, keysize_lower_bound, keysize_vs_entropy,
    keysize_vs_leakage, leakage_bound_epsilon_c, leakage_delta, max_marginal_entropy,
    smoothing_threshold, BoundParams, CurvePoint, EpsilonC, EpsilonCVariant,
};
pub use checks::{
    check_conditional_entropy, check_divergence_relation, pinsker_check, smoothing_report,
    triangle_audit, ConditionalEntropyReport, ConditionalVp, DivergenceRelationReport,
    PinskerReport, SmoothingReport, TriangleReport, HOLD_TOL,
};
pub use distribution::{Distribution, SubsetSelector, DEFAULT_CAP, NORMALIZATION_TOL};
pub use encoding::{conditional_encoded, mutual_information, pushforward_encode, Enumerator};
pub use measures::{
    kl_divergence, log_q, renyi_divergence, renyi_entropy, shannon_entropy, to_bits, to_nats,
    total_variation, v_distance, v_p_distance, Order,
};
