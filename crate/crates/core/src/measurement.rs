//! Classical-test-theory layer: true-score populations, observed-score
//! models with error, reliability, and the approximate-symmetry indices.
//!
//! Moments use the population convention (divisor `N`) throughout, and
//! sums are compensated so that invariance claims hold to near machine
//! precision even at large `N`.

use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::lie::GroupElement;
use crate::seed::{child_seed, STREAM_ERROR_DRAW, STREAM_TRANSFORMED_MODEL};

/// Compensated (Kahan) sum.
pub(crate) fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

pub(crate) fn mean_of(values: &[f64]) -> f64 {
    kahan_sum(values.iter().copied()) / values.len() as f64
}

/// Population variance (divisor `N`), two-pass.
pub(crate) fn variance_of(values: &[f64]) -> f64 {
    let m = mean_of(values);
    kahan_sum(values.iter().map(|v| (v - m) * (v - m))) / values.len() as f64
}

/// Population Pearson correlation between two equally long sequences.
pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::TooFewScores { len: a.len(), min: 2 });
    }
    let ma = mean_of(a);
    let mb = mean_of(b);
    let cov = kahan_sum(a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb))) / a.len() as f64;
    let sa = variance_of(a).sqrt();
    let sb = variance_of(b).sqrt();
    if sa == 0.0 || sb == 0.0 {
        return Err(Error::ConstantScores);
    }
    Ok(cov / (sa * sb))
}

/// A finite collection of true scores.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    label: String,
    scores: Vec<f64>,
}

impl Population {
    /// At least two scores are required for any moment computation.
    pub fn new(label: impl Into<String>, scores: Vec<f64>) -> Result<Self> {
        if scores.len() < 2 {
            return Err(Error::TooFewScores {
                len: scores.len(),
                min: 2,
            });
        }
        Ok(Self {
            label: label.into(),
            scores,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn mean(&self) -> f64 {
        mean_of(&self.scores)
    }

    /// Population variance, divisor `N`.
    pub fn variance(&self) -> f64 {
        variance_of(&self.scores)
    }

    pub fn sd(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Applies a group element to every true score: `τ ↦ γτ + ω`.
    pub fn transform(&self, g: &GroupElement) -> Population {
        Population {
            label: self.label.clone(),
            scores: self
                .scores
                .iter()
                .map(|&s| g.gamma() * s + g.omega())
                .collect(),
        }
    }

    /// Writes the single-column CSV form: a `score` header then one
    /// score per line.
    pub fn to_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "score")?;
        for s in &self.scores {
            writeln!(w, "{s}")?;
        }
        Ok(())
    }

    /// Reads the single-column CSV form written by [`Population::to_csv`].
    pub fn from_csv<R: BufRead>(label: impl Into<String>, r: R) -> Result<Self> {
        let mut lines = r.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "score" => {}
            Some(Ok(h)) => return Err(Error::Parse(format!("expected header 'score', got '{h}'"))),
            Some(Err(e)) => return Err(Error::Parse(e.to_string())),
            None => return Err(Error::Parse("empty population file".into())),
        }
        let mut scores = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let v: f64 = trimmed
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: not a number: '{trimmed}'", i + 2)))?;
            scores.push(v);
        }
        Population::new(label, scores)
    }
}

/// Observed-score model for one measure: true scores plus normal error.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureModel {
    population: Population,
    error_sd: f64,
    seed: u64,
}

impl MeasureModel {
    pub fn new(population: Population, error_sd: f64, seed: u64) -> Result<Self> {
        if error_sd < 0.0 || !error_sd.is_finite() {
            return Err(Error::NegativeErrorSd { sigma: error_sd });
        }
        Ok(Self {
            population,
            error_sd,
            seed,
        })
    }

    pub fn population(&self) -> &Population {
        &self.population
    }

    pub fn error_sd(&self) -> f64 {
        self.error_sd
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Reliability `ρ = σ²(τ)/(σ²(τ) + σ_E²)`.
    pub fn reliability(&self) -> Result<f64> {
        let var_tau = self.population.variance();
        let var_err = self.error_sd * self.error_sd;
        if var_tau == 0.0 && var_err == 0.0 {
            return Err(Error::DegenerateMeasure);
        }
        Ok(var_tau / (var_tau + var_err))
    }

    /// Draws observed scores `Y_i = τ_i + ε_i` with
    /// `ε_i ~ Normal(0, σ_E)` i.i.d. from the model's error stream.
    /// Deterministic for a fixed seed.
    pub fn observe(&self) -> Vec<f64> {
        if self.error_sd == 0.0 {
            return self.population.scores().to_vec();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(child_seed(self.seed, STREAM_ERROR_DRAW));
        let noise = Normal::new(0.0, self.error_sd).expect("validated error SD");
        self.population
            .scores()
            .iter()
            .map(|&tau| tau + noise.sample(&mut rng))
            .collect()
    }

    /// New model with true scores `γτ + ω` and error SD `γσ_E`. The
    /// transformed model gets a child seed, so its error draws are
    /// fresh and independent while the true scores stay linked.
    pub fn transform(&self, g: &GroupElement) -> MeasureModel {
        MeasureModel {
            population: self.population.transform(g),
            error_sd: g.gamma() * self.error_sd,
            seed: child_seed(self.seed, STREAM_TRANSFORMED_MODEL),
        }
    }

    /// Key-value metadata sidecar: label, error_sd, seed.
    pub fn write_metadata<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "label = {}", self.population.label())?;
        writeln!(w, "error_sd = {}", self.error_sd)?;
        writeln!(w, "seed = {}", self.seed)?;
        Ok(())
    }
}

/// Standardized scores: mean 0 and population SD 1 by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScores {
    values: Vec<f64>,
}

impl ZScores {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Standardizes scores with the realized sample mean and population SD.
/// Order-preserving: ranks (including ties) are unchanged.
pub fn z_standardize(scores: &[f64]) -> Result<ZScores> {
    if scores.len() < 2 {
        return Err(Error::TooFewScores {
            len: scores.len(),
            min: 2,
        });
    }
    let m = mean_of(scores);
    let sd = variance_of(scores).sqrt();
    if sd == 0.0 {
        return Err(Error::ConstantScores);
    }
    Ok(ZScores {
        values: scores.iter().map(|&s| (s - m) / sd).collect(),
    })
}

/// Index of approximate symmetry, `√(1 − ρ)`.
pub fn ias(rho: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::ReliabilityOutOfRange { rho });
    }
    Ok((1.0 - rho).sqrt())
}

/// Standardized Euclidean distance between two z-score distributions,
/// `√((1/N)·Σ(z_iA − z_iB)²)`.
pub fn sed(za: &ZScores, zb: &ZScores) -> Result<f64> {
    if za.len() != zb.len() {
        return Err(Error::LengthMismatch {
            left: za.len(),
            right: zb.len(),
        });
    }
    if za.len() < 2 {
        return Err(Error::TooFewScores { len: za.len(), min: 2 });
    }
    let sum = kahan_sum(
        za.values()
            .iter()
            .zip(zb.values())
            .map(|(a, b)| (a - b) * (a - b)),
    );
    Ok((sum / za.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::STREAM_POPULATION_P1;
    use proptest::prelude::*;

    fn brute_mean(xs: &[f64]) -> f64 {
        let mut s = 0.0;
        for x in xs {
            s += x;
        }
        s / xs.len() as f64
    }

    fn brute_pop_sd(xs: &[f64]) -> f64 {
        let m = brute_mean(xs);
        let mut s = 0.0;
        for x in xs {
            s += (x - m) * (x - m);
        }
        (s / xs.len() as f64).sqrt()
    }

    fn normal_population(label: &str, n: usize, mu: f64, sd: f64, seed: u64) -> Population {
        let mut rng = ChaCha8Rng::seed_from_u64(child_seed(seed, STREAM_POPULATION_P1));
        let dist = Normal::new(mu, sd).unwrap();
        Population::new(label, (0..n).map(|_| dist.sample(&mut rng)).collect()).unwrap()
    }

    #[test]
    fn population_needs_two_scores() {
        assert!(Population::new("p", vec![1.0]).is_err());
        assert!(Population::new("p", vec![]).is_err());
    }

    #[test]
    fn population_moments_match_brute_force() {
        let p = Population::new("p", vec![1.0, 2.0, 3.0, 10.0]).unwrap();
        assert!((p.mean() - brute_mean(p.scores())).abs() < 1e-12);
        assert!((p.sd() - brute_pop_sd(p.scores())).abs() < 1e-12);
    }

    #[test]
    fn reliability_error_free_is_one() {
        let p = Population::new("p", vec![1.0, 2.0, 3.0]).unwrap();
        let m = MeasureModel::new(p, 0.0, 1).unwrap();
        assert_eq!(m.reliability().unwrap(), 1.0);
    }

    #[test]
    fn reliability_three_to_one() {
        // variance of {0, 2·√3} is 3; error variance 1 gives ρ = 0.75
        let sd3 = 3.0_f64.sqrt();
        let p = Population::new("p", vec![0.0, 2.0 * sd3]).unwrap();
        assert!((p.variance() - 3.0).abs() < 1e-12);
        let m = MeasureModel::new(p, 1.0, 1).unwrap();
        assert!((m.reliability().unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn reliability_equal_variances_is_half() {
        let p = Population::new("p", vec![0.0, 2.0]).unwrap(); // variance 1
        let m = MeasureModel::new(p, 1.0, 1).unwrap();
        assert!((m.reliability().unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn reliability_degenerate_errors() {
        let p = Population::new("p", vec![5.0, 5.0]).unwrap();
        let m = MeasureModel::new(p, 0.0, 1).unwrap();
        assert_eq!(m.reliability(), Err(Error::DegenerateMeasure));
    }

    #[test]
    fn ias_boundaries() {
        assert_eq!(ias(1.0).unwrap(), 0.0);
        assert_eq!(ias(0.0).unwrap(), 1.0);
        assert!((ias(0.75).unwrap() - 0.5).abs() < 1e-15);
        assert!(ias(1.5).is_err());
        assert!(ias(-0.1).is_err());
    }

    #[test]
    fn sed_identical_is_zero() {
        let z = z_standardize(&[1.0, 2.0, 5.0]).unwrap();
        assert_eq!(sed(&z, &z).unwrap(), 0.0);
    }

    #[test]
    fn sed_two_point_case() {
        // zA = (−1, 1), zB = (1, −1): brute-force loop gives
        // √((4 + 4)/2) = 2.
        let za = z_standardize(&[0.0, 2.0]).unwrap();
        let zb = z_standardize(&[2.0, 0.0]).unwrap();
        assert_eq!(za.values(), &[-1.0, 1.0]);
        assert_eq!(zb.values(), &[1.0, -1.0]);
        let mut brute = 0.0;
        for (a, b) in za.values().iter().zip(zb.values()) {
            brute += (a - b) * (a - b);
        }
        let brute = (brute / 2.0).sqrt();
        assert_eq!(brute, 2.0);
        assert_eq!(sed(&za, &zb).unwrap(), 2.0);
    }

    #[test]
    fn sed_rejects_length_mismatch() {
        let za = z_standardize(&[0.0, 2.0]).unwrap();
        let zb = z_standardize(&[0.0, 1.0, 2.0]).unwrap();
        assert!(matches!(sed(&za, &zb), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn z_standardize_two_point_symmetry() {
        let z = z_standardize(&[0.0, 2.0]).unwrap();
        assert_eq!(z.values(), &[-1.0, 1.0]);
    }

    #[test]
    fn z_standardize_three_points_matches_oracle() {
        let xs = [1.0, 2.0, 3.0];
        let m = brute_mean(&xs);
        let sd = brute_pop_sd(&xs);
        let expect: Vec<f64> = xs.iter().map(|x| (x - m) / sd).collect();
        let z = z_standardize(&xs).unwrap();
        for (got, want) in z.values().iter().zip(&expect) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((z.values()[2] - 1.224744871391589).abs() < 1e-12);
    }

    #[test]
    fn z_standardize_rejects_constant() {
        assert_eq!(z_standardize(&[3.0, 3.0, 3.0]), Err(Error::ConstantScores));
    }

    #[test]
    fn z_invariants_hold() {
        let z = z_standardize(&[4.0, 8.0, 15.0, 16.0, 23.0, 42.0]).unwrap();
        assert!(mean_of(z.values()).abs() < 1e-10);
        assert!((variance_of(z.values()).sqrt() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn observe_zero_error_returns_true_scores() {
        let p = Population::new("p", vec![1.0, 2.0, 3.0]).unwrap();
        let m = MeasureModel::new(p.clone(), 0.0, 99).unwrap();
        assert_eq!(m.observe(), p.scores());
    }

    #[test]
    fn observe_is_deterministic_per_seed() {
        let p = normal_population("p", 100, 50.0, 10.0, 7);
        let m = MeasureModel::new(p, 5.0, 7).unwrap();
        assert_eq!(m.observe(), m.observe());
        let other = MeasureModel::new(m.population().clone(), 5.0, 8).unwrap();
        assert_ne!(m.observe(), other.observe());
    }

    #[test]
    fn observe_residual_sd_matches_model() {
        let n = 100_000;
        let p = normal_population("p", n, 60.0, 12.0, 11);
        let m = MeasureModel::new(p.clone(), 5.0, 11).unwrap();
        let observed = m.observe();
        let residuals: Vec<f64> = observed
            .iter()
            .zip(p.scores())
            .map(|(y, t)| y - t)
            .collect();
        let sd = variance_of(&residuals).sqrt();
        assert!(
            (sd - 5.0).abs() / 5.0 < 0.02,
            "residual SD {sd} strays more than 2% from 5"
        );
        // error independence
        let r = correlation(p.scores(), &residuals).unwrap();
        assert!(r.abs() < 0.01, "true scores correlate with errors: {r}");
    }

    #[test]
    fn transform_identity_keeps_model() {
        let p = Population::new("p", vec![1.0, 2.0, 3.0]).unwrap();
        let m = MeasureModel::new(p, 2.0, 5).unwrap();
        let t = m.transform(&GroupElement::identity());
        assert_eq!(t.population().scores(), m.population().scores());
        assert_eq!(t.error_sd(), m.error_sd());
    }

    #[test]
    fn transform_scales_mean() {
        let p = normal_population("p1", 50_000, 63.05, 13.08, 123);
        let m = MeasureModel::new(p.clone(), 0.0, 123).unwrap();
        let g = GroupElement::new(1.125, 0.0).unwrap();
        let t = m.transform(&g);
        let want = 1.125 * p.mean();
        assert!((t.population().mean() - want).abs() < 1e-9);
    }

    #[test]
    fn reliability_is_invariant_under_transform() {
        let p = normal_population("p", 20_000, 63.05, 13.08, 17);
        let m = MeasureModel::new(p, 6.5, 17).unwrap();
        let rho = m.reliability().unwrap();
        for (gamma, omega) in [(2.0, 0.0), (1.125, 0.0), (0.5, 30.0), (7.0, -12.0)] {
            let g = GroupElement::new(gamma, omega).unwrap();
            let rho_b = m.transform(&g).reliability().unwrap();
            assert!(
                (rho_b - rho).abs() < 1e-12,
                "reliability moved by {} under gamma = {gamma}, omega = {omega}",
                (rho_b - rho).abs()
            );
        }
    }

    #[test]
    fn cross_measure_correlation_approaches_reliability() {
        let n = 100_000;
        let p = normal_population("p", n, 63.05, 13.08, 23);
        let m = MeasureModel::new(p, 6.54, 23).unwrap();
        let rho = m.reliability().unwrap();
        let b = m.transform(&GroupElement::new(1.125, 4.0).unwrap());
        let ya = m.observe();
        let yb = b.observe();
        let r = correlation(&ya, &yb).unwrap();
        assert!(
            (r - rho).abs() < 0.01,
            "corr {r} vs reliability {rho} differ by more than 0.01"
        );
    }

    #[test]
    fn sed_over_ias_approaches_sqrt_two() {
        let n = 100_000;
        let p = normal_population("p", n, 63.05, 13.08, 29);
        let m = MeasureModel::new(p, 6.54, 29).unwrap();
        let rho = m.reliability().unwrap();
        let b = m.transform(&GroupElement::new(1.125, 4.0).unwrap());
        let za = z_standardize(&m.observe()).unwrap();
        let zb = z_standardize(&b.observe()).unwrap();
        let ratio = sed(&za, &zb).unwrap() / ias(rho).unwrap();
        let rel = (ratio / std::f64::consts::SQRT_2 - 1.0).abs();
        assert!(rel < 0.02, "SED/IAS = {ratio}, off by {rel} relative");
    }

    #[test]
    fn population_csv_round_trip() {
        let p = Population::new("p", vec![1.5, -2.25, 63.05]).unwrap();
        let mut buf = Vec::new();
        p.to_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf), "score\n1.5\n-2.25\n63.05\n");
        let back = Population::from_csv("p", buf.as_slice()).unwrap();
        assert_eq!(back.scores(), p.scores());
    }

    #[test]
    fn population_csv_rejects_bad_input() {
        assert!(Population::from_csv("p", "value\n1\n2\n".as_bytes()).is_err());
        assert!(Population::from_csv("p", "score\n1\nxyz\n".as_bytes()).is_err());
        assert!(Population::from_csv("p", "".as_bytes()).is_err());
    }

    #[test]
    fn metadata_sidecar_format() {
        let p = Population::new("wave-1", vec![1.0, 2.0]).unwrap();
        let m = MeasureModel::new(p, 2.5, 77).unwrap();
        let mut buf = Vec::new();
        m.write_metadata(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8_lossy(&buf),
            "label = wave-1\nerror_sd = 2.5\nseed = 77\n"
        );
    }

    proptest! {
        #[test]
        fn z_standardize_absorbs_affine_maps(
            base in proptest::collection::vec(-1000.0..1000.0f64, 2..40),
            a in 0.01..50.0f64,
            b in -100.0..100.0f64,
        ) {
            prop_assume!(brute_pop_sd(&base) > 1e-6);
            let shifted: Vec<f64> = base.iter().map(|x| a * x + b).collect();
            let z1 = z_standardize(&base).unwrap();
            let z2 = z_standardize(&shifted).unwrap();
            for (u, v) in z1.values().iter().zip(z2.values()) {
                prop_assert!((u - v).abs() < 1e-9, "affine map changed z-scores: {u} vs {v}");
            }
        }

        #[test]
        fn z_standardize_preserves_ranks(
            grid in proptest::collection::vec(-1_000_000i64..1_000_000, 2..50),
        ) {
            // integer-grid scores keep spacings far above rounding noise
            let scores: Vec<f64> = grid.iter().map(|&g| g as f64 / 1000.0).collect();
            prop_assume!(brute_pop_sd(&scores) > 1e-6);
            let z = z_standardize(&scores).unwrap();
            for i in 0..scores.len() {
                for j in 0..scores.len() {
                    let raw = scores[i].partial_cmp(&scores[j]).unwrap();
                    let std = z.values()[i].partial_cmp(&z.values()[j]).unwrap();
                    prop_assert_eq!(raw, std, "rank flipped between positions {} and {}", i, j);
                }
            }
        }
    }
}
