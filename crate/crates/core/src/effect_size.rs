//! Population standardized mean difference, the reliability term δ,
//! invariance verdicts across measures, and observed-score attenuation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::GroupElement;
use crate::measurement::Population;

/// Default tolerance for invariance verdicts on analytic transforms.
pub const DEFAULT_INVARIANCE_TOLERANCE: f64 = 1e-9;

/// The reliability term `δ = (1 − ρ)/ρ`; `(1 + δ)` inflates true-score
/// variance to observed-score variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTerm(f64);

impl DeltaTerm {
    pub fn value(&self) -> f64 {
        self.0
    }
}

/// `δ = (1 − ρ)/ρ` for `ρ ∈ (0, 1]`.
pub fn delta(rho: f64) -> Result<DeltaTerm> {
    if !(rho > 0.0) || rho > 1.0 {
        return Err(Error::ReliabilityNotPositive { rho });
    }
    Ok(DeltaTerm((1.0 - rho) / rho))
}

/// Size-weighted pooled SD: `√((n1·var1 + n2·var2)/(n1 + n2))`.
///
/// Variances passed in already include the `[1 + δ]` factor when
/// modeling observed scores. Weighting is by `N` exactly, not `N − 1`.
pub fn pooled_sd(var1: f64, n1: usize, var2: f64, n2: usize) -> f64 {
    debug_assert!(n1 >= 1 && n2 >= 1, "group sizes must be positive");
    debug_assert!(var1 >= 0.0 && var2 >= 0.0, "variances must be nonnegative");
    ((n1 as f64 * var1 + n2 as f64 * var2) / (n1 + n2) as f64).sqrt()
}

/// SMD from group moments; `var1`/`var2` already include any `[1 + δ]`
/// inflation.
pub fn smd_from_moments(
    mu1: f64,
    var1: f64,
    n1: usize,
    mu2: f64,
    var2: f64,
    n2: usize,
) -> Result<f64> {
    let pooled = pooled_sd(var1, n1, var2, n2);
    if pooled <= 0.0 || !pooled.is_finite() {
        return Err(Error::ZeroPooledSd);
    }
    Ok((mu1 - mu2) / pooled)
}

/// True-score SMD: `(μ₁ − μ₂)` over the N-weighted pooled true-score SD.
pub fn smd(p1: &Population, p2: &Population) -> Result<f64> {
    smd_from_moments(
        p1.mean(),
        p1.variance(),
        p1.len(),
        p2.mean(),
        p2.variance(),
        p2.len(),
    )
}

/// Observed-score SMD with a shared reliability: each group variance is
/// inflated by the same `(1 + δ(ρ))`.
pub fn smd_with_reliability(p1: &Population, p2: &Population, rho: f64) -> Result<f64> {
    smd_with_reliabilities(p1, p2, rho, rho)
}

/// Observed-score SMD with per-population reliabilities; the `[1 + δ]`
/// factors are bracketed per group.
pub fn smd_with_reliabilities(
    p1: &Population,
    p2: &Population,
    rho1: f64,
    rho2: f64,
) -> Result<f64> {
    let d1 = delta(rho1)?.value();
    let d2 = delta(rho2)?.value();
    smd_from_moments(
        p1.mean(),
        p1.variance() * (1.0 + d1),
        p1.len(),
        p2.mean(),
        p2.variance() * (1.0 + d2),
        p2.len(),
    )
}

/// Attenuation of a true-score SMD at the observed level: `√ρ · SMD`.
pub fn attenuate(smd_true: f64, rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::ReliabilityOutOfRange { rho });
    }
    Ok(rho.sqrt() * smd_true)
}

/// SMD values for a population pair before and after a shared linkage,
/// with an invariance verdict at the stated tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmdReport {
    pub smd_a: f64,
    pub smd_b: f64,
    pub deviation: f64,
    pub invariant: bool,
    pub tolerance: f64,
}

impl SmdReport {
    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// Computes the true-score SMD before and after applying `g` to both
/// populations and issues the verdict `deviation ≤ tolerance`.
pub fn smd_invariance(
    p1: &Population,
    p2: &Population,
    g: &GroupElement,
    tolerance: f64,
) -> Result<SmdReport> {
    let before = smd(p1, p2)?;
    let after = smd(&p1.transform(g), &p2.transform(g))?;
    let deviation = (after - before).abs();
    Ok(SmdReport {
        smd_a: before,
        smd_b: after,
        deviation,
        invariant: deviation <= tolerance,
        tolerance,
    })
}
