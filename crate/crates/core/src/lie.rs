//! The affine linkage group and its algebra.
//!
//! Two measures of the same construct are linked by a uniform scaling `γ`
//! of true scores and error SDs plus a translation `ω` of true scores.
//! Acting on the homogeneous vector `(τ, σ_E, 1)` the linkage is the 3×3
//! matrix `[[γ,0,ω],[0,γ,0],[0,0,1]]`, an element of a two-parameter
//! matrix Lie group. Its generator is `[[a,0,c],[0,a,0],[0,0,0]]` with
//! `a = ln γ` and `c = ω·ln γ/(γ−1)`, and the one-parameter subgroup
//! `X(t) = exp(t·g)` interpolates from the identity at `t = 0` to the
//! full linkage at `t = 1`.
//!
//! Elements are stored as the two scalar parameters; the 3×3 forms are
//! materialized on demand for display and for the matrix oracles.

use crate::error::{Error, Result};
use crate::mat3::{self, Mat3};

/// Below this distance from `γ = 1` the `ln γ/(γ−1)` ratio switches to
/// its analytic limit 1, avoiding 0/0 at the identity.
pub const GAMMA_UNITY_EPS: f64 = 1e-12;

/// `ln γ / (γ − 1)`, continuously extended to 1 at `γ = 1`.
///
/// Computed through `ln_1p` so the ratio stays accurate arbitrarily
/// close to the switch point.
fn log_ratio(gamma: f64) -> f64 {
    let d = gamma - 1.0;
    if d.abs() < GAMMA_UNITY_EPS {
        1.0
    } else {
        d.ln_1p() / d
    }
}

/// An element of the affine linkage group: scale `γ > 0`, translation `ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    gamma: f64,
    omega: f64,
}

impl GroupElement {
    /// Builds the element with the given parameters. Fails unless `γ > 0`.
    pub fn new(gamma: f64, omega: f64) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() || !omega.is_finite() {
            return Err(Error::ScaleNotPositive { gamma });
        }
        Ok(Self { gamma, omega })
    }

    pub fn identity() -> Self {
        Self {
            gamma: 1.0,
            omega: 0.0,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// The 3×3 matrix form `[[γ,0,ω],[0,γ,0],[0,0,1]]`.
    pub fn matrix(&self) -> Mat3 {
        [
            [self.gamma, 0.0, self.omega],
            [0.0, self.gamma, 0.0],
            [0.0, 0.0, 1.0],
        ]
    }

    /// Determinant of the matrix form, `γ²`.
    pub fn determinant(&self) -> f64 {
        self.gamma * self.gamma
    }

    /// Acts on a measurement vector: `(γτ + ω, γσ_E, 1)`.
    pub fn apply(&self, v: &MeasurementVector) -> MeasurementVector {
        MeasurementVector {
            tau: self.gamma * v.tau + self.omega,
            sigma_e: self.gamma * v.sigma_e,
        }
    }

    /// Group product `self · other`: parameters `(γ₁γ₂, γ₁ω₂ + ω₁)`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement {
            gamma: self.gamma * other.gamma,
            omega: self.gamma * other.omega + self.omega,
        }
    }

    /// Group inverse: parameters `(1/γ, −ω/γ)`.
    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            gamma: 1.0 / self.gamma,
            omega: -self.omega / self.gamma,
        }
    }

    /// Logarithm: the generator with `a = ln γ` and
    /// `c = ω·ln γ/(γ−1)` (limit `c = ω` at `γ = 1`).
    pub fn log(&self) -> Generator {
        Generator {
            scale_rate: self.gamma.ln(),
            translation_rate: self.omega * log_ratio(self.gamma),
        }
    }
}

/// A generator of the group: the matrix `[[a,0,c],[0,a,0],[0,0,0]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Generator {
    scale_rate: f64,
    translation_rate: f64,
}

impl Generator {
    pub fn new(scale_rate: f64, translation_rate: f64) -> Self {
        Self {
            scale_rate,
            translation_rate,
        }
    }

    /// Diagonal rate `a = ln γ`.
    pub fn scale_rate(&self) -> f64 {
        self.scale_rate
    }

    /// Translation rate `c = ω·ln γ/(γ−1)`.
    pub fn translation_rate(&self) -> f64 {
        self.translation_rate
    }

    pub fn matrix(&self) -> Mat3 {
        [
            [self.scale_rate, 0.0, self.translation_rate],
            [0.0, self.scale_rate, 0.0],
            [0.0, 0.0, 0.0],
        ]
    }

    /// Diagonal part `D = diag(a, a, 0)`.
    pub fn scaling_part(&self) -> Mat3 {
        [
            [self.scale_rate, 0.0, 0.0],
            [0.0, self.scale_rate, 0.0],
            [0.0, 0.0, 0.0],
        ]
    }

    /// Translation part `T`, carrying only the `c` entry.
    pub fn translation_part(&self) -> Mat3 {
        let mut t = mat3::zeros();
        t[0][2] = self.translation_rate;
        t
    }

    /// The one-parameter subgroup `X(t) = exp(t·g)` in closed form:
    /// scale `e^{at}`, translation `c·(e^{at}−1)/a` (limit `c·t` at
    /// `a = 0`). `X(0)` is the identity and `X(1)` recovers the group
    /// element the generator was derived from.
    ///
    /// Defined for all real `t`; values outside `[0, 1]` extrapolate
    /// beyond the linkage path (callers that report flag this).
    pub fn exp(&self, t: f64) -> GroupElement {
        let a = self.scale_rate;
        let gamma_t = (a * t).exp();
        let omega_t = if a.abs() < GAMMA_UNITY_EPS {
            self.translation_rate * t
        } else {
            self.translation_rate * (a * t).exp_m1() / a
        };
        GroupElement {
            gamma: gamma_t,
            omega: omega_t,
        }
    }
}

/// Homogeneous measurement vector `(τ, σ_E, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementVector {
    tau: f64,
    sigma_e: f64,
}

impl MeasurementVector {
    /// Fails if `σ_E < 0`.
    pub fn new(tau: f64, sigma_e: f64) -> Result<Self> {
        if sigma_e < 0.0 || !sigma_e.is_finite() || !tau.is_finite() {
            return Err(Error::NegativeErrorSd { sigma: sigma_e });
        }
        Ok(Self { tau, sigma_e })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sigma_e(&self) -> f64 {
        self.sigma_e
    }

    /// The anchor coordinate, exactly 1 by construction and under any
    /// group action.
    pub fn anchor(&self) -> f64 {
        1.0
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.tau, self.sigma_e, 1.0]
    }
}

/// Commutator `[x, y] = xy − yx` of two 3×3 matrices.
///
/// For the diagonal part `D` and translation part `T` of a generator
/// this evaluates to `(ln γ)·T`. The algebra is non-commutative: the
/// order of multiplication matters.
pub fn bracket(x: &Mat3, y: &Mat3) -> Mat3 {
    mat3::sub(&mat3::mat_mul(x, y), &mat3::mat_mul(y, x))
}
