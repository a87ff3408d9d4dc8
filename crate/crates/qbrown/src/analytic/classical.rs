use super::moments::{free_msp, free_msp_dt};
use super::{
    check_time, require_damping, require_free, require_harmonic, require_normal, InitialCondition, Observables,
    ParticleSpec,
};
use crate::environment::{Environment, HBAR};
use crate::error::Result;
use crate::kernel::CorrelationKernel;
use crate::numeric::{expdiff, exprel};

/// Mean square momentum `⟨P²(t)⟩` of the free inertial particle.
pub fn classical_inertial_free_msp(
    spec: &ParticleSpec,
    init: &InitialCondition,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<f64> {
    check_time(t)?;
    require_free(spec, "classical_inertial_free_msp")?;
    require_normal(kernel, "classical_inertial_free_msp")?;
    init.validate()?;
    free_msp(spec.mass, spec.gamma, env.diffusion_energy(), kernel, init.p2_0(spec.mass, HBAR), t)
}

/// Thermal force `F = d√⟨P²⟩/dt`.
pub fn classical_inertial_free_force(
    spec: &ParticleSpec,
    init: &InitialCondition,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<f64> {
    let p2 = classical_inertial_free_msp(spec, init, env, kernel, t)?;
    let (m, g, e) = (spec.mass, spec.gamma, env.diffusion_energy());
    let p2_0 = init.p2_0(m, HBAR);
    if p2 == 0.0 {
        // ⟨P²⟩ ≈ (2γmℰ/t_c) t² near a sharp start
        return Ok(if t == 0.0 { (2.0 * g * m * e / kernel.t_c()).sqrt() } else { 0.0 });
    }
    Ok(free_msp_dt(m, g, e, kernel.t_c(), p2_0, t) / (2.0 * p2.sqrt()))
}

/// RMS displacement, velocity and diffusion coefficient of the free inertial
/// particle started at `x = 0` with `⟨P²(0)⟩ = mℰ`.
pub fn classical_inertial_free_rmsd(
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<Observables> {
    check_time(t)?;
    require_free(spec, "classical_inertial_free_rmsd")?;
    require_normal(kernel, "classical_inertial_free_rmsd")?;
    require_damping(spec, "classical_inertial_free_rmsd")?;
    let (m, g, e) = (spec.mass, spec.gamma, env.diffusion_energy());
    let (x2, d) = equipartition_rmsd(m, g, e, kernel.t_c(), t);
    let mut obs = Observables::at(t);
    let x = x2.sqrt();
    obs.x = Some(x);
    obs.d = Some(d);
    obs.v = Some(if t == 0.0 { (e / m).sqrt() } else { d / x });
    Ok(obs)
}

/// `(⟨X²⟩, D)` for the equipartition-started free inertial particle.
pub(crate) fn equipartition_rmsd(m: f64, g: f64, e: f64, tc: f64, t: f64) -> (f64, f64) {
    let y = 2.0 * g * t;
    let ed2 = expdiff(1.0 / tc, 2.0 * g, t);
    let ed4 = expdiff(1.0 / tc, 4.0 * g, t);
    // 2γt_c·N(t) rewritten with exponential differences
    let n_term = 2.0 * g * (tc * -(-t / tc).exp_m1() + ed4 - 2.0 * ed2);
    let bracket = crate::numeric::phi2(y) - n_term;
    let x2 = e / (2.0 * m * g * g) * bracket;
    let d = e / (2.0 * m * g) * (-(-y).exp_m1() - 4.0 * g * (ed2 - ed4));
    (x2, d)
}

/// Non-inertial free particle from `δ(x)`.
pub fn classical_noninertial_free(
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<Observables> {
    check_time(t)?;
    require_free(spec, "classical_noninertial_free")?;
    require_normal(kernel, "classical_noninertial_free")?;
    require_damping(spec, "classical_noninertial_free")?;
    let scale = env.diffusion_energy() / (spec.mass * spec.gamma);
    let x = (2.0 * scale * kernel.j(t)).sqrt();
    let d = scale * kernel.i(t);
    let mut obs = Observables::at(t);
    obs.x = Some(x);
    obs.d = Some(d);
    obs.v = Some(if t == 0.0 { (scale / kernel.t_c()).sqrt() } else { d / x });
    Ok(obs)
}

/// Non-inertial oscillator observables together with `G(t) = ⟨X²⟩/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorObservables {
    pub g: f64,
    pub observables: Observables,
}

/// Non-inertial harmonic oscillator from `δ(x)`, relaxation time `τ_r = γ/2ω²`.
pub fn classical_noninertial_oscillator(
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<OscillatorObservables> {
    check_time(t)?;
    let omega = require_harmonic(spec, "classical_noninertial_oscillator")?;
    require_normal(kernel, "classical_noninertial_oscillator")?;
    require_damping(spec, "classical_noninertial_oscillator")?;
    let (m, gamma, e) = (spec.mass, spec.gamma, env.diffusion_energy());
    let r = 2.0 * omega * omega / gamma;
    let tc = kernel.t_c();
    let scale = 2.0 * e / (gamma * m);
    let x2 = scale * (t * exprel(r * t) - expdiff(1.0 / tc, r, t));
    let d = 0.5 * (-r * x2 + scale * kernel.i(t));
    let x = x2.sqrt();
    let mut obs = Observables::at(t);
    obs.x = Some(x);
    obs.d = Some(d);
    obs.v = Some(if t == 0.0 { (scale / (2.0 * tc)).sqrt() } else { d / x });
    obs.mean_energy = Some(0.5 * m * omega * omega * x2);
    Ok(OscillatorObservables { g: 0.5 * x2, observables: obs })
}
