//! Kramers escape rates out of a metastable well.

use std::f64::consts::PI;

use crate::analytic::ParticleSpec;
use crate::environment::{Environment, HBAR, K_B};
use crate::error::{domain, Error, Result};
use crate::kernel::CorrelationKernel;

/// Well and barrier curvatures and the barrier height `V(x_b) - V(x_a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSpec {
    pub omega_a: f64,
    pub omega_b: f64,
    pub delta_v: f64,
}

impl BarrierSpec {
    pub fn new(omega_a: f64, omega_b: f64, delta_v: f64) -> Result<Self> {
        let b = Self { omega_a, omega_b, delta_v };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_a.is_finite() && self.omega_a > 0.0) {
            return domain(format!("omega_a must be positive, got {}", self.omega_a));
        }
        if !(self.omega_b.is_finite() && self.omega_b > 0.0) {
            return domain(format!("omega_b must be positive, got {}", self.omega_b));
        }
        if !(self.delta_v.is_finite() && self.delta_v >= 0.0) {
            return domain(format!("delta_V must be nonnegative, got {}", self.delta_v));
        }
        Ok(())
    }
}

/// One checked condition. `margin` is positive when the condition holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Validity {
    pub condition: String,
    pub satisfied: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub rate: f64,
    pub valid: bool,
    pub validity: Vec<Validity>,
    pub regime_note: String,
}

impl RateResult {
    fn new(rate: f64, validity: Vec<Validity>, regime_note: impl Into<String>) -> Self {
        let valid = validity.iter().all(|v| v.satisfied);
        Self { rate, valid, validity, regime_note: regime_note.into() }
    }
}

fn positive_energy(e: f64) -> Result<()> {
    if e.is_finite() && e > 0.0 {
        Ok(())
    } else {
        domain(format!("escape needs a positive diffusion energy, got {e}"))
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma >= 0.0 {
        Ok(())
    } else {
        domain(format!("gamma must be nonnegative, got {gamma}"))
    }
}

fn friction_regime(gamma: f64, omega_b: f64) -> &'static str {
    if gamma <= 0.1 * omega_b {
        "weak friction"
    } else if gamma >= 10.0 * omega_b {
        "strong friction"
    } else {
        "intermediate friction"
    }
}

/// `(ω_a/2πω_b)(√(γ² + ω_b²) - γ) e^(-ΔV/ℰ)`, with the difference evaluated
/// as `ω_b²/(√(γ² + ω_b²) + γ)`.
fn steady(barrier: &BarrierSpec, gamma: f64, energy: f64) -> Result<RateResult> {
    barrier.validate()?;
    check_gamma(gamma)?;
    positive_energy(energy)?;
    let s = gamma.hypot(barrier.omega_b);
    let rate = barrier.omega_a * barrier.omega_b / (2.0 * PI * (s + gamma)) * (-barrier.delta_v / energy).exp();
    Ok(RateResult::new(rate, Vec::new(), friction_regime(gamma, barrier.omega_b)))
}

/// Classical steady rate with diffusion energy `E`.
pub fn kramers_classical(barrier: &BarrierSpec, gamma: f64, energy: f64) -> Result<RateResult> {
    steady(barrier, gamma, energy)
}

/// Strong-friction asymptote `(ω_a ω_b/4πγ) e^(-ΔV/ℰ)` of the steady rate.
pub fn strong_friction_limit(barrier: &BarrierSpec, gamma: f64, energy: f64) -> Result<f64> {
    barrier.validate()?;
    positive_energy(energy)?;
    if !(gamma > 0.0) {
        return domain("the strong-friction limit needs gamma > 0");
    }
    Ok(barrier.omega_a * barrier.omega_b / (4.0 * PI * gamma) * (-barrier.delta_v / energy).exp())
}

/// Default horizon `20/γ` beyond which time-dependent rates are flagged.
pub fn default_horizon(gamma: f64) -> f64 {
    if gamma > 0.0 {
        20.0 / gamma
    } else {
        f64::INFINITY
    }
}

fn nonmarkov(
    barrier: &BarrierSpec,
    gamma: f64,
    energy: f64,
    kernel: &CorrelationKernel,
    t: f64,
    horizon: f64,
) -> Result<RateResult> {
    barrier.validate()?;
    check_gamma(gamma)?;
    positive_energy(energy)?;
    if !(t.is_finite() && t >= 0.0) {
        return domain(format!("time must be finite and nonnegative, got {t}"));
    }
    if !(horizon > 0.0) {
        return domain(format!("horizon must be positive, got {horizon}"));
    }
    let te = t.min(horizon);
    let s = gamma.hypot(barrier.omega_b);
    let i = kernel.intensity(te)?;
    let markov = barrier.omega_a / (2.0 * PI) * (-barrier.delta_v / energy).exp();
    let rate = markov * (2.0 * gamma * te).exp() * ((gamma + s) / (2.0 * gamma * i + gamma + s)).sqrt();
    let check =
        Validity { condition: format!("t <= horizon {horizon:e} s"), satisfied: t <= horizon, margin: horizon - t };
    let note = if t > horizon {
        "time capped at the horizon"
    } else if t == 0.0 {
        "Markovian friction-independent start"
    } else {
        "non-Markovian transient"
    };
    Ok(RateResult::new(rate, vec![check], note))
}

/// Classical time-dependent rate at temperature `T`, horizon `20/γ`.
pub fn kramers_classical_nonmarkov(
    barrier: &BarrierSpec,
    gamma: f64,
    temperature: f64,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<RateResult> {
    kramers_classical_nonmarkov_with_horizon(barrier, gamma, temperature, kernel, t, default_horizon(gamma))
}

/// [`kramers_classical_nonmarkov`] with an explicit horizon.
pub fn kramers_classical_nonmarkov_with_horizon(
    barrier: &BarrierSpec,
    gamma: f64,
    temperature: f64,
    kernel: &CorrelationKernel,
    t: f64,
    horizon: f64,
) -> Result<RateResult> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return domain(format!("temperature must be positive, got {temperature}"));
    }
    nonmarkov(barrier, gamma, K_B * temperature, kernel, t, horizon)
}

/// Markovian quantum rate; the same expression as the classical one with `ℰ_ℏ`.
pub fn kramers_quantum_inertial(barrier: &BarrierSpec, gamma: f64, env: &Environment) -> Result<RateResult> {
    env.validate()?;
    steady(barrier, gamma, env.diffusion_energy())
}

/// Non-Markovian quantum rate, horizon `20/γ`.
pub fn kramers_quantum_inertial_nonmarkov(
    barrier: &BarrierSpec,
    gamma: f64,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<RateResult> {
    kramers_quantum_inertial_nonmarkov_with_horizon(barrier, gamma, env, kernel, t, default_horizon(gamma))
}

/// [`kramers_quantum_inertial_nonmarkov`] with an explicit horizon.
pub fn kramers_quantum_inertial_nonmarkov_with_horizon(
    barrier: &BarrierSpec,
    gamma: f64,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
    horizon: f64,
) -> Result<RateResult> {
    env.validate()?;
    nonmarkov(barrier, gamma, env.diffusion_energy(), kernel, t, horizon)
}

/// Named choices of the width parameter `a` (kg/s) of the non-inertial rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum APreset {
    Zero,
    /// `a = mω_b/2`.
    HalfMassOmegaB,
    /// `a = m/2t_c`.
    HalfMassOverTc(f64),
}

impl APreset {
    pub fn value(&self, mass: f64, omega_b: f64) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::HalfMassOmegaB => 0.5 * mass * omega_b,
            Self::HalfMassOverTc(t_c) => 0.5 * mass / t_c,
        }
    }
}

/// Upper bound `mℏω_b²/2ℰ_ℏ` on `a`.
pub fn a_param_bound(mass: f64, omega_b: f64, energy: f64) -> f64 {
    mass * HBAR * omega_b * omega_b / (2.0 * energy)
}

/// Non-inertial quantum rate
/// `(ω_b⁴mℏ²/4πℰ_ℏ) e^(-ΔV/ℰ_ℏ) / √(m²ω_b⁴ℏ² - 4a²ℰ_ℏ²)` for `0 ≤ a < mℏω_b²/2ℰ_ℏ`.
pub fn kramers_quantum_noninertial(
    barrier: &BarrierSpec,
    spec: &ParticleSpec,
    env: &Environment,
    a_param: f64,
) -> Result<RateResult> {
    barrier.validate()?;
    spec.validate()?;
    env.validate()?;
    let e = env.diffusion_energy();
    positive_energy(e)?;
    let (m, wb) = (spec.mass, barrier.omega_b);
    let bound = a_param_bound(m, wb, e);
    if !(a_param.is_finite() && a_param >= 0.0 && a_param < bound) {
        return Err(Error::Numerical(format!(
            "a = {a_param:e} kg/s violates 0 <= a < m*hbar*omega_b^2/(2E) = {bound:e} kg/s"
        )));
    }
    let wb2 = wb * wb;
    let root = ((m * wb2 * HBAR).powi(2) - (2.0 * a_param * e).powi(2)).sqrt();
    let rate = wb2 * wb2 * m * HBAR * HBAR / (4.0 * PI * e) * (-barrier.delta_v / e).exp() / root;
    let check = Validity { condition: format!("a < {bound:e} kg/s"), satisfied: true, margin: bound - a_param };
    Ok(RateResult::new(rate, vec![check], "non-inertial quantum escape"))
}

/// [`kramers_quantum_noninertial`] at a named `a`, reporting the preset's own condition.
pub fn kramers_quantum_noninertial_preset(
    barrier: &BarrierSpec,
    spec: &ParticleSpec,
    env: &Environment,
    preset: APreset,
) -> Result<RateResult> {
    let e = env.diffusion_energy();
    let (m, wb) = (spec.mass, barrier.omega_b);
    let (condition, margin, note) = match preset {
        APreset::Zero => (None, 0.0, "a = 0"),
        APreset::HalfMassOmegaB => (Some("E < hbar*omega_b".to_string()), HBAR * wb - e, "a = m*omega_b/2"),
        APreset::HalfMassOverTc(t_c) => {
            if !(t_c.is_finite() && t_c > 0.0) {
                return domain(format!("t_c must be positive, got {t_c}"));
            }
            let need = e / (HBAR * wb * wb);
            (Some(format!("t_c > {need:e} s")), t_c - need, "a = m/(2 t_c)")
        }
    };
    if let Some(cond) = &condition {
        if !(margin > 0.0) {
            return Err(Error::Numerical(format!("preset {note} requires {cond}")));
        }
    }
    let mut r = kramers_quantum_noninertial(barrier, spec, env, preset.value(m, wb))?;
    if let Some(cond) = condition {
        r.validity.push(Validity { condition: cond, satisfied: true, margin });
    }
    r.regime_note = note.to_string();
    Ok(r)
}

/// Reduced form at `a = 0`: `(ℏω_b²/4πℰ_ℏ) e^(-ΔV/ℰ_ℏ)`.
pub fn noninertial_rate_a_zero(barrier: &BarrierSpec, env: &Environment) -> Result<f64> {
    barrier.validate()?;
    let e = env.diffusion_energy();
    positive_energy(e)?;
    Ok(HBAR * barrier.omega_b * barrier.omega_b / (4.0 * PI * e) * (-barrier.delta_v / e).exp())
}

/// Reduced form at `a = mω_b/2`: `ω_b³ℏ² e^(-ΔV/ℰ_ℏ) / (4πℰ_ℏ√(ω_b²ℏ² - ℰ_ℏ²))`, needs `ℰ_ℏ < ℏω_b`.
pub fn noninertial_rate_half_mass_omega_b(barrier: &BarrierSpec, env: &Environment) -> Result<f64> {
    barrier.validate()?;
    let e = env.diffusion_energy();
    positive_energy(e)?;
    let wb = barrier.omega_b;
    if !(e < HBAR * wb) {
        return Err(Error::Numerical("a = m*omega_b/2 requires E < hbar*omega_b".into()));
    }
    let root = ((wb * HBAR).powi(2) - e * e).sqrt();
    Ok(wb.powi(3) * HBAR * HBAR * (-barrier.delta_v / e).exp() / (4.0 * PI * e * root))
}

/// Reduced form at `a = m/2t_c`: `t_c ω_b⁴ℏ² e^(-ΔV/ℰ_ℏ) / (4πℰ_ℏ√(t_c²ω_b⁴ℏ² - ℰ_ℏ²))`,
/// needs `t_c > ℰ_ℏ/ℏω_b²`.
pub fn noninertial_rate_half_mass_over_tc(barrier: &BarrierSpec, env: &Environment, t_c: f64) -> Result<f64> {
    barrier.validate()?;
    let e = env.diffusion_energy();
    positive_energy(e)?;
    let wb2 = barrier.omega_b * barrier.omega_b;
    if !(t_c > e / (HBAR * wb2)) {
        return Err(Error::Numerical("a = m/(2 t_c) requires t_c > E/(hbar*omega_b^2)".into()));
    }
    let root = ((t_c * wb2 * HBAR).powi(2) - e * e).sqrt();
    Ok(t_c * wb2 * wb2 * HBAR * HBAR * (-barrier.delta_v / e).exp() / (4.0 * PI * e * root))
}
