//! The correlational function `I(t) = λ(t/t_c)^(λ-1) + 1 - e^(-t/t_c)`.

use crate::error::{domain, Result};
use crate::numeric::phi2;

/// Correlation time `t_c` and anomaly exponent `λ`.
///
/// `λ = 0` is normal (eventually Markovian) diffusion; `λ > 1` is anomalous.
/// Exponents in `(0, 1]` have no finite `I(t)` at short times and are rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationKernel {
    t_c: f64,
    lambda: f64,
}

impl CorrelationKernel {
    pub fn new(t_c: f64, lambda: f64) -> Result<Self> {
        if !(t_c.is_finite() && t_c > 0.0) {
            return domain(format!("t_c must be positive and finite, got {t_c}"));
        }
        if !(lambda == 0.0 || (lambda.is_finite() && lambda > 1.0)) {
            return domain(format!("lambda must be 0 or greater than 1, got {lambda}"));
        }
        Ok(Self { t_c, lambda })
    }

    /// Normal diffusion kernel (`λ = 0`).
    pub fn normal(t_c: f64) -> Result<Self> {
        Self::new(t_c, 0.0)
    }

    pub fn t_c(&self) -> f64 {
        self.t_c
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_normal(&self) -> bool {
        self.lambda == 0.0
    }

    /// `I(t)`.
    pub fn intensity(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return domain(format!("time must be nonnegative, got {t}"));
        }
        self.alpha_intensity(t / self.t_c)
    }

    /// `I(α) = λα^(λ-1) + 1 - e^(-α)`, i.e. `I` at `t = α t_c`.
    pub fn alpha_intensity(&self, alpha: f64) -> Result<f64> {
        if !(alpha >= 0.0) {
            return domain(format!("alpha must be nonnegative, got {alpha}"));
        }
        Ok(self.anomalous_part(alpha) - (-alpha).exp_m1())
    }

    /// `J(t) = ∫₀ᵗ I(s) ds = t^λ/t_c^(λ-1) + t + t_c(e^(-t/t_c) - 1)`.
    pub fn intensity_integral(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return domain(format!("time must be nonnegative, got {t}"));
        }
        let markov = self.t_c * phi2(t / self.t_c);
        if self.lambda == 0.0 {
            Ok(markov)
        } else {
            Ok(t.powf(self.lambda) / self.t_c.powf(self.lambda - 1.0) + markov)
        }
    }

    /// Infallible `I(t)` for internal use once `t ≥ 0` has been established.
    pub(crate) fn i(&self, t: f64) -> f64 {
        let alpha = t / self.t_c;
        self.anomalous_part(alpha) - (-alpha).exp_m1()
    }

    pub(crate) fn j(&self, t: f64) -> f64 {
        let markov = self.t_c * phi2(t / self.t_c);
        if self.lambda == 0.0 {
            markov
        } else {
            t.powf(self.lambda) / self.t_c.powf(self.lambda - 1.0) + markov
        }
    }

    fn anomalous_part(&self, alpha: f64) -> f64 {
        if self.lambda == 0.0 || alpha == 0.0 {
            0.0
        } else {
            self.lambda * alpha.powf(self.lambda - 1.0)
        }
    }

    /// Integer exponent `n = λ - 1` when `λ ∈ {2, 3, 4}`.
    pub(crate) fn integer_order(&self) -> Option<u32> {
        [2.0, 3.0, 4.0].iter().position(|&l| l == self.lambda).map(|i| i as u32 + 1)
    }
}
