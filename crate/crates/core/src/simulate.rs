//! Symmetry-breaking sweep: paired populations linked by the power map
//! `τ_B = γ·τ_A^k`, with `k` held at 1 in the first population and swept
//! above 1 in the second. Records how far the true-score SMD moves from
//! its measure-A baseline at each grid point.

use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::effect_size::smd;
use crate::error::{Error, Result};
use crate::measurement::Population;
use crate::seed::{child_seed, STREAM_POPULATION_P1, STREAM_POPULATION_P2};

/// Sweep parameters. Defaults reproduce the experiment at desk scale:
/// `n = 10⁵` per population (paper scale `10⁶` is a flag away), target
/// moments 63.05/13.08 and 63.04/13.06, linkage scale 1.125, and the
/// exponent grid 1.000..=1.020 in steps of 0.001.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub mu1: f64,
    pub sd1: f64,
    pub mu2: f64,
    pub sd2: f64,
    pub gamma: f64,
    pub k_start: f64,
    pub k_end: f64,
    pub k_step: f64,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n: 100_000,
            mu1: 63.05,
            sd1: 13.08,
            mu2: 63.04,
            sd2: 13.06,
            gamma: 1.125,
            k_start: 1.0,
            k_end: 1.02,
            k_step: 0.001,
            seed: 42,
        }
    }
}

impl SweepConfig {
    /// Validates every field, collecting all offending fields into one
    /// message.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.n < 100 {
            problems.push(format!("n must be at least 100 (got {})", self.n));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            problems.push(format!("gamma must be positive (got {})", self.gamma));
        }
        if !(self.sd1 > 0.0) || !self.sd1.is_finite() {
            problems.push(format!("sd1 must be positive (got {})", self.sd1));
        }
        if !(self.sd2 > 0.0) || !self.sd2.is_finite() {
            problems.push(format!("sd2 must be positive (got {})", self.sd2));
        }
        if !self.mu1.is_finite() || !self.mu2.is_finite() {
            problems.push("mu1 and mu2 must be finite".into());
        }
        if self.k_start > self.k_end {
            problems.push(format!(
                "k_start must not exceed k_end (got {} > {})",
                self.k_start, self.k_end
            ));
        }
        if !(self.k_step > 0.0) || !self.k_step.is_finite() {
            problems.push(format!("k_step must be positive (got {})", self.k_step));
        }
        if !(self.k_start > 0.0) {
            problems.push(format!("k_start must be positive (got {})", self.k_start));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems.join("; ")))
        }
    }

    /// Grid points `k_start + i·k_step`, both endpoints included.
    /// Indexed integer arithmetic keeps 21 steps of 0.001 from drifting.
    pub fn grid(&self) -> Vec<f64> {
        let span = self.k_end - self.k_start;
        let count = (span / self.k_step).round() as usize + 1;
        (0..count)
            .map(|i| self.k_start + i as f64 * self.k_step)
            .filter(|k| *k <= self.k_end + self.k_step * 1e-9)
            .collect()
    }
}

/// One grid point of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: f64,
    pub smd_baseline: f64,
    pub smd_broken: f64,
    pub deviation: f64,
}

/// Config echo plus provenance for a completed sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMetadata {
    pub config: SweepConfig,
    pub version: String,
    pub elapsed_ms: u64,
    /// Nonpositive draws rejected and redrawn during generation.
    pub rejected_draws: u64,
}

/// Full sweep output: the measure-A baseline SMD and one row per `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub baseline: f64,
    pub rows: Vec<SweepRow>,
    pub metadata: SweepMetadata,
}

impl SweepResult {
    /// CSV with header `k,smd_baseline,smd_broken,deviation`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,smd_baseline,smd_broken,deviation")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{},{},{}",
                row.k, row.smd_baseline, row.smd_broken, row.deviation
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// Draws `n` scores from `Normal(mu, sd)`, rejecting and redrawing any
/// nonpositive value so the power map stays total. Returns the
/// population and the rejection count.
fn draw_positive_normal(
    label: &str,
    n: usize,
    mu: f64,
    sd: f64,
    seed: u64,
) -> Result<(Population, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Normal::new(mu, sd).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut rejected = 0u64;
    let mut scores = Vec::with_capacity(n);
    while scores.len() < n {
        let v = dist.sample(&mut rng);
        if v > 0.0 {
            scores.push(v);
        } else {
            rejected += 1;
        }
    }
    Ok((Population::new(label, scores)?, rejected))
}

/// Generates the paired populations from child seeds of the master
/// seed. Deterministic per seed; nonpositive draws are rejected and
/// redrawn.
pub fn generate_populations(config: &SweepConfig) -> Result<(Population, Population)> {
    config.validate()?;
    let (p1, _) = draw_positive_normal(
        "P1",
        config.n,
        config.mu1,
        config.sd1,
        child_seed(config.seed, STREAM_POPULATION_P1),
    )?;
    let (p2, _) = draw_positive_normal(
        "P2",
        config.n,
        config.mu2,
        config.sd2,
        child_seed(config.seed, STREAM_POPULATION_P2),
    )?;
    Ok((p1, p2))
}

/// The nonlinear linkage `τ ↦ γ·τ^k`. At `k = 1` this is exact uniform
/// scaling; otherwise every score must be positive.
pub fn nonlinear_link(p: &Population, gamma: f64, k: f64) -> Result<Population> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::ScaleNotPositive { gamma });
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "power exponent must be positive, got {k}"
        )));
    }
    if k == 1.0 {
        return Population::new(p.label(), p.scores().iter().map(|&s| gamma * s).collect());
    }
    if let Some(&bad) = p.scores().iter().find(|s| **s <= 0.0) {
        return Err(Error::NonPositiveScore { value: bad });
    }
    Population::new(
        p.label(),
        p.scores().iter().map(|&s| gamma * s.powf(k)).collect(),
    )
}

/// Runs the sweep: the baseline is the true-score SMD on measure A;
/// each grid point links P1 with `k = 1` and P2 with the grid `k`, then
/// records the measure-B SMD and its deviation from baseline. Grid
/// points evaluate in parallel; rows come back in ascending `k` order.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.validate()?;
    let start = Instant::now();

    let (p1, rejected1) = draw_positive_normal(
        "P1",
        config.n,
        config.mu1,
        config.sd1,
        child_seed(config.seed, STREAM_POPULATION_P1),
    )?;
    let (p2, rejected2) = draw_positive_normal(
        "P2",
        config.n,
        config.mu2,
        config.sd2,
        child_seed(config.seed, STREAM_POPULATION_P2),
    )?;

    let baseline = smd(&p1, &p2)?;
    // k = 1 in P1 at every grid point, so its linked form is shared
    let p1_linked = nonlinear_link(&p1, config.gamma, 1.0)?;

    let rows: Result<Vec<SweepRow>> = config
        .grid()
        .par_iter()
        .map(|&k| {
            let p2_linked = nonlinear_link(&p2, config.gamma, k)?;
            let smd_broken = smd(&p1_linked, &p2_linked)?;
            Ok(SweepRow {
                k,
                smd_baseline: baseline,
                smd_broken,
                deviation: (smd_broken - baseline).abs(),
            })
        })
        .collect();

    Ok(SweepResult {
        baseline,
        rows: rows?,
        metadata: SweepMetadata {
            config: *config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            elapsed_ms: start.elapsed().as_millis() as u64,
            rejected_draws: rejected1 + rejected2,
        },
    })
}
