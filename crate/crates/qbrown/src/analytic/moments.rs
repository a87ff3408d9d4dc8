//! Second moments of the linear Langevin equations for arbitrary Gaussian
//! initial states. These back the scenario functions and serve as the
//! analytic reference for Monte Carlo and PDE runs.

use super::{check_time, require_damping, require_free, InitialCondition, ParticleSpec, Potential};
use crate::environment::Environment;
use crate::error::{unsupported, Result};
use crate::kernel::CorrelationKernel;
use crate::numeric::{damped_square_moment, exp_moment, expdiff, exprel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    pub x2: f64,
    pub p2: f64,
    /// `⟨X P⟩`, available for normal kernels.
    pub xp: Option<f64>,
}

fn anomalous_order(kernel: &CorrelationKernel) -> Result<Option<u32>> {
    if kernel.is_normal() {
        return Ok(None);
    }
    match kernel.integer_order() {
        Some(n) => Ok(Some(n)),
        None => unsupported(format!("closed form for lambda = {} (only 2, 3, 4)", kernel.lambda())),
    }
}

/// `⟨P²⟩` of the free inertial particle, `dP = -2γP dt + √(4γmℰ I(t)) dW`.
pub(crate) fn free_msp(m: f64, gamma: f64, energy: f64, kernel: &CorrelationKernel, p2_0: f64, t: f64) -> Result<f64> {
    let q = 4.0 * gamma;
    let me = m * energy;
    let mut p2 = p2_0 * (-q * t).exp() + me * (-(-q * t).exp_m1() - q * expdiff(1.0 / kernel.t_c(), q, t));
    if let Some(n) = anomalous_order(kernel)? {
        p2 += me * kernel.lambda() / kernel.t_c().powi(n as i32) * exp_moment(n, t, 1.0 / q);
    }
    Ok(p2)
}

/// `d⟨P²⟩/dt` for a normal kernel.
pub(crate) fn free_msp_dt(m: f64, gamma: f64, energy: f64, t_c: f64, p2_0: f64, t: f64) -> f64 {
    let q = 4.0 * gamma;
    let me = m * energy;
    -q * (p2_0 - me) * (-q * t).exp() - q * me * ((-t / t_c).exp() - q * expdiff(1.0 / t_c, q, t))
}

/// Inertial free particle: `⟨X²⟩`, `⟨P²⟩`, `⟨XP⟩` with `X(0)`, `P(0)` independent.
pub fn inertial_free_moments(
    spec: &ParticleSpec,
    init: &InitialCondition,
    env: &Environment,
    kernel: &CorrelationKernel,
    hbar: f64,
    t: f64,
) -> Result<SecondMoments> {
    check_time(t)?;
    require_free(spec, "inertial free moments")?;
    require_damping(spec, "inertial free moments")?;
    init.validate()?;
    let (m, g, e) = (spec.mass, spec.gamma, env.diffusion_energy());
    let tc = kernel.t_c();
    let p2_0 = init.p2_0(m, hbar);
    let x2_0 = init.x2_0(m, hbar);
    let p2 = free_msp(m, g, e, kernel, p2_0, t)?;

    let relax = -(-2.0 * g * t).exp_m1();
    let ed2 = expdiff(1.0 / tc, 2.0 * g, t);
    let ed4 = expdiff(1.0 / tc, 4.0 * g, t);
    // ∫₀ᵗ (1 - e^{-2γu})² (1 - e^{-(t-u)/t_c}) du
    let markov = damped_square_moment(0, 2.0 * g, t) - tc * -(-t / tc).exp_m1() + 2.0 * ed2 - ed4;
    let mut x2 = x2_0 + p2_0 * relax * relax / (4.0 * g * g * m * m) + e / (g * m) * markov;
    let xp = match anomalous_order(kernel)? {
        None => {
            let d_markov = relax * relax - 4.0 * g * (ed2 - ed4);
            Some(p2_0 * relax * (-2.0 * g * t).exp() / (2.0 * g * m) + e / (2.0 * g) * d_markov)
        }
        Some(n) => {
            x2 += e / (g * m) * kernel.lambda() / tc.powi(n as i32) * damped_square_moment(n, 2.0 * g, t);
            None
        }
    };
    Ok(SecondMoments { x2, p2, xp })
}

/// Non-inertial `⟨X²⟩` for `dX = -V'(X)/(γm) dt + √(2ℰ I(t)/γm) dW`.
pub fn noninertial_msd(
    spec: &ParticleSpec,
    init: &InitialCondition,
    env: &Environment,
    kernel: &CorrelationKernel,
    hbar: f64,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    require_damping(spec, "non-inertial moments")?;
    init.validate()?;
    let (m, g, e) = (spec.mass, spec.gamma, env.diffusion_energy());
    let x2_0 = init.x2_0(m, hbar);
    let scale = 2.0 * e / (g * m);
    match spec.potential {
        Potential::Free => Ok(x2_0 + scale * kernel.j(t)),
        Potential::Harmonic { omega } => {
            let r = 2.0 * omega * omega / g;
            let tc = kernel.t_c();
            let mut conv = t * exprel(r * t) - expdiff(1.0 / tc, r, t);
            if let Some(n) = anomalous_order(kernel)? {
                conv += kernel.lambda() / tc.powi(n as i32) * exp_moment(n, t, 1.0 / r) / r;
            }
            Ok(x2_0 * (-r * t).exp() + scale * conv)
        }
    }
}
