//! Dynamic transformation flows.
//!
//! Population summaries evolve along the one-parameter subgroup: means
//! follow `dμ/dt = ln γ·μ + c` and SDs follow `dσ/dt = ln γ·σ`, with
//! `c = ω·ln γ/(γ−1)`. A symmetric flow moves both populations with
//! these rates and keeps SMD(t) constant; a broken flow replaces one or
//! more rates from a small catalog and loses the invariance. The
//! integrator is classical fixed-step RK4, so traces are reproducible
//! bit for bit.
//!
//! Flows are parameterized in SDs, not variances; squared quantities
//! are derived. The pooled variance sums per-population true-score and
//! error variances, which equals the frozen-`[1+δ]` bracketing for
//! symmetric flows (reliability is preserved along them) and the
//! recomputed-`δ` bracketing when an error-variance rate is overridden.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{Generator, GroupElement};

/// Absolute tolerance for the rate conditions checked by
/// [`verify_invariance_conditions`].
pub const CONDITION_TOLERANCE: f64 = 1e-9;

/// Named rate forms available for breaking a flow.
///
/// Applied to a mean, the symmetric rate is `ln γ·x + c`; applied to an
/// SD it is `ln γ·x`. Each catalog entry replaces that form:
/// `ConstantRate(α)` gives `α·x` (plus the translation term for means),
/// `LinearDrift(β)` gives `ln γ·x + β`, and `PowerRate(α, p)` gives
/// `α·x^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RateFn {
    ConstantRate { alpha: f64 },
    LinearDrift { beta: f64 },
    PowerRate { alpha: f64, power: f64 },
}

impl RateFn {
    /// Evaluates the rate at `x`. `translation` is the generator's `c`
    /// for means and 0 for SDs.
    fn eval(&self, x: f64, ln_gamma: f64, translation: f64) -> f64 {
        match *self {
            RateFn::ConstantRate { alpha } => alpha * x + translation,
            RateFn::LinearDrift { beta } => ln_gamma * x + beta,
            RateFn::PowerRate { alpha, power } => alpha * x.powf(power),
        }
    }

    /// Parses the compact CLI form: `constant:A`, `linear:B`, or
    /// `power:A,P` (long names `constant-rate`, `linear-drift`,
    /// `power-rate` also accepted).
    pub fn parse(s: &str) -> Result<RateFn> {
        let (name, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("rate '{s}' missing ':' separator")))?;
        let parse_num = |v: &str| -> Result<f64> {
            v.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("rate '{s}': bad number '{v}'")))
        };
        match name.trim() {
            "constant" | "constant-rate" => Ok(RateFn::ConstantRate {
                alpha: parse_num(args)?,
            }),
            "linear" | "linear-drift" => Ok(RateFn::LinearDrift {
                beta: parse_num(args)?,
            }),
            "power" | "power-rate" => {
                let (a, p) = args
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("rate '{s}' needs 'power:alpha,p'")))?;
                Ok(RateFn::PowerRate {
                    alpha: parse_num(a)?,
                    power: parse_num(p)?,
                })
            }
            other => Err(Error::Parse(format!("unknown rate form '{other}'"))),
        }
    }
}

/// Whether a flow is Lie-generated or carries rate overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowKind {
    Symmetric,
    Broken,
}

/// Optional replacements for the four evolving rates: population means
/// (`f₁`, `f₂`) and error SDs (`g₁`, `g₂`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RateOverrides {
    pub mean_p1: Option<RateFn>,
    pub mean_p2: Option<RateFn>,
    pub error_p1: Option<RateFn>,
    pub error_p2: Option<RateFn>,
}

impl RateOverrides {
    pub fn is_empty(&self) -> bool {
        self.mean_p1.is_none()
            && self.mean_p2.is_none()
            && self.error_p1.is_none()
            && self.error_p2.is_none()
    }
}

/// A transformation flow: the group parameters plus any rate overrides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowSpec {
    kind: FlowKind,
    gamma: f64,
    omega: f64,
    overrides: RateOverrides,
}

impl FlowSpec {
    /// A Lie-generated flow with no overrides.
    pub fn symmetric(gamma: f64, omega: f64) -> Result<Self> {
        let _ = GroupElement::new(gamma, omega)?;
        Ok(Self {
            kind: FlowKind::Symmetric,
            gamma,
            omega,
            overrides: RateOverrides::default(),
        })
    }

    /// A broken flow; at least one override is required.
    pub fn broken(gamma: f64, omega: f64, overrides: RateOverrides) -> Result<Self> {
        let _ = GroupElement::new(gamma, omega)?;
        if overrides.is_empty() {
            return Err(Error::InvalidConfig(
                "broken flow requires at least one rate override".into(),
            ));
        }
        Ok(Self {
            kind: FlowKind::Broken,
            gamma,
            omega,
            overrides,
        })
    }

    pub fn kind(&self) -> FlowKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn overrides(&self) -> &RateOverrides {
        &self.overrides
    }

    pub fn generator(&self) -> Generator {
        GroupElement::new(self.gamma, self.omega)
            .expect("validated at construction")
            .log()
    }

    /// Time derivative of the six-component state
    /// `(μ₁, μ₂, σ_τ1, σ_τ2, σ_E1, σ_E2)`.
    fn derivative(&self, state: &[f64; 6]) -> [f64; 6] {
        let gen = self.generator();
        let a = gen.scale_rate();
        let c = gen.translation_rate();
        let mean_rate = |x: f64, ov: Option<RateFn>| match ov {
            Some(r) => r.eval(x, a, c),
            None => a * x + c,
        };
        let sd_rate = |x: f64, ov: Option<RateFn>| match ov {
            Some(r) => r.eval(x, a, 0.0),
            None => a * x,
        };
        [
            mean_rate(state[0], self.overrides.mean_p1),
            mean_rate(state[1], self.overrides.mean_p2),
            // true-score SDs always follow the Lie-generated rate
            a * state[2],
            a * state[3],
            sd_rate(state[4], self.overrides.error_p1),
            sd_rate(state[5], self.overrides.error_p2),
        ]
    }
}

/// Population summaries at `t = 0`: means, true-score SDs, error SDs,
/// and the group sizes used as pooling weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub mu1: f64,
    pub mu2: f64,
    pub tau_sd1: f64,
    pub tau_sd2: f64,
    pub err_sd1: f64,
    pub err_sd2: f64,
    pub n1: u64,
    pub n2: u64,
}

impl InitialState {
    /// The standard state used by the CLI and the catalog tests: the
    /// first population sits well above the second so symmetry breaking
    /// moves the SMD visibly, with reliability 0.8 in both groups.
    pub fn standard() -> Self {
        Self {
            mu1: 63.05,
            mu2: 55.0,
            tau_sd1: 13.08,
            tau_sd2: 13.06,
            err_sd1: 6.54,
            err_sd2: 6.53,
            n1: 1,
            n2: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let sds = [self.tau_sd1, self.tau_sd2, self.err_sd1, self.err_sd2];
        if sds.iter().any(|s| *s < 0.0 || !s.is_finite()) {
            return Err(Error::InvalidConfig(
                "initial SDs must be finite and nonnegative".into(),
            ));
        }
        if !self.mu1.is_finite() || !self.mu2.is_finite() {
            return Err(Error::InvalidConfig("initial means must be finite".into()));
        }
        if self.n1 == 0 || self.n2 == 0 {
            return Err(Error::InvalidConfig("group sizes must be positive".into()));
        }
        Ok(())
    }

    fn as_state(&self) -> [f64; 6] {
        [
            self.mu1,
            self.mu2,
            self.tau_sd1,
            self.tau_sd2,
            self.err_sd1,
            self.err_sd2,
        ]
    }
}

/// Pooled SD over evolving summaries: observed variance per group is
/// `σ_τ² + σ_E²`, weighted by group size.
fn pooled_sd_of(state: &[f64; 6], n1: f64, n2: f64) -> f64 {
    let v1 = state[2] * state[2] + state[4] * state[4];
    let v2 = state[3] * state[3] + state[5] * state[5];
    ((n1 * v1 + n2 * v2) / (n1 + n2)).sqrt()
}

/// Trajectories of a flow over a uniform grid on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    times: Vec<f64>,
    mu1: Vec<f64>,
    mu2: Vec<f64>,
    sigma_pooled: Vec<f64>,
    smd: Vec<f64>,
    max_smd_drift: f64,
}

impl FlowTrace {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn mu1(&self) -> &[f64] {
        &self.mu1
    }

    pub fn mu2(&self) -> &[f64] {
        &self.mu2
    }

    pub fn sigma_pooled(&self) -> &[f64] {
        &self.sigma_pooled
    }

    pub fn smd(&self) -> &[f64] {
        &self.smd
    }

    /// `max_t |SMD(t) − SMD(0)|` over the grid.
    pub fn max_smd_drift(&self) -> f64 {
        self.max_smd_drift
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// CSV with columns `t,mu1,mu2,sigma_pooled,smd`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,mu1,mu2,sigma_pooled,smd")?;
        for i in 0..self.times.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.times[i], self.mu1[i], self.mu2[i], self.sigma_pooled[i], self.smd[i]
            )?;
        }
        Ok(())
    }
}

/// Closed-form state along the subgroup:
/// `τ(t) = γ^t·τ₀ + ω·(γ^t−1)/(γ−1)` and `σ_E(t) = γ^t·σ₀`.
pub fn closed_form_state(gen: &Generator, tau0: f64, sigma0: f64, t: f64) -> (f64, f64) {
    let x = gen.exp(t);
    (x.gamma() * tau0 + x.omega(), x.gamma() * sigma0)
}

fn rk4_step(spec: &FlowSpec, state: &[f64; 6], h: f64) -> [f64; 6] {
    let shift = |y: &[f64; 6], k: &[f64; 6], s: f64| {
        let mut out = *y;
        for i in 0..6 {
            out[i] += s * k[i];
        }
        out
    };
    let k1 = spec.derivative(state);
    let k2 = spec.derivative(&shift(state, &k1, h / 2.0));
    let k3 = spec.derivative(&shift(state, &k2, h / 2.0));
    let k4 = spec.derivative(&shift(state, &k3, h));
    let mut next = *state;
    for i in 0..6 {
        next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    next
}

/// Integrates the flow over `[0, 1]` on a uniform grid of `steps`
/// RK4 steps (`steps + 1` trace points). Fails with a variance-collapse
/// error if the pooled SD stops being positive and finite.
pub fn integrate(spec: &FlowSpec, initial: &InitialState, steps: usize) -> Result<FlowTrace> {
    if steps < 10 {
        return Err(Error::InvalidConfig(format!(
            "steps must be at least 10, got {steps}"
        )));
    }
    initial.validate()?;
    let n1 = initial.n1 as f64;
    let n2 = initial.n2 as f64;
    let h = 1.0 / steps as f64;

    let mut state = initial.as_state();
    let mut trace = FlowTrace {
        times: Vec::with_capacity(steps + 1),
        mu1: Vec::with_capacity(steps + 1),
        mu2: Vec::with_capacity(steps + 1),
        sigma_pooled: Vec::with_capacity(steps + 1),
        smd: Vec::with_capacity(steps + 1),
        max_smd_drift: 0.0,
    };

    let record = |state: &[f64; 6], t: f64, trace: &mut FlowTrace| -> Result<()> {
        let pooled = pooled_sd_of(state, n1, n2);
        if !(pooled > 0.0) || !pooled.is_finite() || state.iter().any(|v| !v.is_finite()) {
            return Err(Error::VarianceCollapse { t });
        }
        trace.times.push(t);
        trace.mu1.push(state[0]);
        trace.mu2.push(state[1]);
        trace.sigma_pooled.push(pooled);
        trace.smd.push((state[0] - state[1]) / pooled);
        Ok(())
    };

    record(&state, 0.0, &mut trace)?;
    for i in 1..=steps {
        state = rk4_step(spec, &state, h);
        record(&state, i as f64 / steps as f64, &mut trace)?;
    }

    let smd0 = trace.smd[0];
    trace.max_smd_drift = trace
        .smd
        .iter()
        .map(|s| (s - smd0).abs())
        .fold(0.0, f64::max);
    Ok(trace)
}

/// Maximum absolute central-difference estimate of `d/dt SMD(t)` over
/// the interior grid points.
pub fn smd_derivative_check(trace: &FlowTrace) -> f64 {
    let t = trace.times();
    let s = trace.smd();
    let mut worst = 0.0_f64;
    for i in 1..t.len().saturating_sub(1) {
        let d = (s[i + 1] - s[i - 1]) / (t[i + 1] - t[i - 1]);
        worst = worst.max(d.abs());
    }
    worst
}

/// Checks the two invariance conditions at `t_probe`: the mean rates
/// must differ by `ln γ·(μ₁ − μ₂)` and the pooled SD must grow at rate
/// `ln γ`. Returns true iff both hold within [`CONDITION_TOLERANCE`].
pub fn verify_invariance_conditions(
    spec: &FlowSpec,
    initial: &InitialState,
    t_probe: f64,
) -> bool {
    if initial.validate().is_err() {
        return false;
    }
    let mut state = initial.as_state();
    if t_probe != 0.0 {
        let steps = 1000;
        let h = t_probe / steps as f64;
        for _ in 0..steps {
            state = rk4_step(spec, &state, h);
        }
    }
    if state.iter().any(|v| !v.is_finite()) {
        return false;
    }

    let n1 = initial.n1 as f64;
    let n2 = initial.n2 as f64;
    let a = spec.generator().scale_rate();
    let rates = spec.derivative(&state);

    // mean condition: f1 − f2 = ln γ·(μ1 − μ2)
    let mean_gap = rates[0] - rates[1] - a * (state[0] - state[1]);

    // SD condition: d/dt pooled = ln γ·pooled
    let pooled = pooled_sd_of(&state, n1, n2);
    if !(pooled > 0.0) || !pooled.is_finite() {
        return false;
    }
    let dpooled_sq = (n1 * 2.0 * (state[2] * rates[2] + state[4] * rates[4])
        + n2 * 2.0 * (state[3] * rates[3] + state[5] * rates[5]))
        / (n1 + n2);
    let sd_gap = dpooled_sq / (2.0 * pooled) - a * pooled;

    mean_gap.abs() <= CONDITION_TOLERANCE && sd_gap.abs() <= CONDITION_TOLERANCE
}
