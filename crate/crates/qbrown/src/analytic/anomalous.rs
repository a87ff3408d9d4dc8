use super::moments::{inertial_free_moments, noninertial_msd};
use super::{check_time, require_free, require_harmonic, InitialCondition, ParticleSpec};
use crate::environment::{Environment, HBAR};
use crate::error::{unsupported, Result};
use crate::kernel::CorrelationKernel;

/// Anomalous-diffusion scenarios with closed-form mean square values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnomalousScenario {
    /// `⟨X²⟩` of the overdamped free particle, any `λ > 1`.
    NonInertialFree,
    /// `⟨X²⟩` of the overdamped oscillator, `λ ∈ {2, 3, 4}`.
    NonInertialOscillator,
    /// `⟨P²⟩` of the inertial free particle from `δ(p)`, `λ ∈ {2, 3, 4}`.
    MomentumSpace,
    /// `⟨X²⟩` of the inertial free particle with `⟨P²(0)⟩ = mℰ`, `λ ∈ {2, 3, 4}`.
    ConfigInertial,
}

/// Mean square displacement (m²) or momentum ((kg·m/s)²) for an anomalous kernel.
pub fn anomalous_msd(
    scenario: AnomalousScenario,
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    if kernel.is_normal() {
        return unsupported("anomalous_msd with lambda = 0");
    }
    let sharp = InitialCondition::SharpOrigin;
    match scenario {
        AnomalousScenario::NonInertialFree => {
            require_free(spec, "NonInertialFree")?;
            noninertial_msd(spec, &sharp, env, kernel, HBAR, t)
        }
        AnomalousScenario::NonInertialOscillator => {
            require_harmonic(spec, "NonInertialOscillator")?;
            integer_lambda(kernel)?;
            noninertial_msd(spec, &sharp, env, kernel, HBAR, t)
        }
        AnomalousScenario::MomentumSpace => {
            integer_lambda(kernel)?;
            Ok(inertial_free_moments(spec, &sharp, env, kernel, HBAR, t)?.p2)
        }
        AnomalousScenario::ConfigInertial => {
            integer_lambda(kernel)?;
            let init = InitialCondition::MomentumVariance { p2_0: spec.mass * env.diffusion_energy() };
            Ok(inertial_free_moments(spec, &init, env, kernel, HBAR, t)?.x2)
        }
    }
}

fn integer_lambda(kernel: &CorrelationKernel) -> Result<()> {
    match kernel.integer_order() {
        Some(_) => Ok(()),
        None => unsupported(format!("lambda = {} (closed forms exist for 2, 3, 4)", kernel.lambda())),
    }
}
