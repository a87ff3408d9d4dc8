use super::classical::equipartition_rmsd;
use super::moments::free_msp_dt;
use super::{
    check_time, require_damping, require_free, require_harmonic, require_normal, GaussianState, Observables,
    ParticleSpec,
};
use crate::environment::{Environment, HBAR};
use crate::error::{domain, Error, Result};
use crate::kernel::CorrelationKernel;
use crate::numeric::{expdiff, expdiff_dt, exprel};

fn positive_energy(env: &Environment) -> Result<f64> {
    let e = env.diffusion_energy();
    if e > 0.0 {
        Ok(e)
    } else {
        domain("quantum scenarios need a positive diffusion energy")
    }
}

fn positive_a(a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        domain(format!("initial width parameter a must be positive, got {a}"))
    }
}

/// Quantum Fokker-Planck free particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumFpFree {
    /// `A(t) = ⟨P²⟩/2`.
    pub a_t: f64,
    pub state: GaussianState,
    pub observables: Observables,
}

/// Free particle in the quantum Fokker-Planck description, Gaussian start of width `a`.
pub fn quantum_fp_free(
    spec: &ParticleSpec,
    a: f64,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<QuantumFpFree> {
    quantum_fp_free_with_hbar(spec, a, env, kernel, t, HBAR)
}

/// [`quantum_fp_free`] with an explicit Planck constant.
pub fn quantum_fp_free_with_hbar(
    spec: &ParticleSpec,
    a: f64,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
    hbar: f64,
) -> Result<QuantumFpFree> {
    check_time(t)?;
    require_free(spec, "quantum_fp_free")?;
    require_normal(kernel, "quantum_fp_free")?;
    positive_a(a)?;
    let e = positive_energy(env)?;
    let (m, g, tc) = (spec.mass, spec.gamma, kernel.t_c());
    let c = 2.0 * a * e / hbar;
    let pre = m * hbar / (4.0 * a);
    let q = 4.0 * g;
    let decay = (-q * t).exp();
    let ed = expdiff(1.0 / tc, q, t);
    let a_t = pre * ((1.0 - c) * decay + c * (1.0 - q * ed));
    if !(a_t > 0.0) {
        return Err(Error::Numerical(format!("A(t) = {a_t} is not positive at t = {t}")));
    }
    let a_dt = pre * (-q * (1.0 - c) * decay - q * c * expdiff_dt(1.0 / tc, q, t));
    let p = (2.0 * a_t).sqrt();
    let x = hbar / (8.0 * a_t).sqrt();
    let f = a_dt / p;
    let v = -4.0 * hbar * a_dt / (8.0 * a_t).powf(1.5);
    let mut obs = Observables::at(t);
    obs.x = Some(x);
    obs.p = Some(p);
    obs.f = Some(f);
    obs.v = Some(v);
    obs.d = Some(x * v);
    obs.d_valid = f <= 0.0;
    Ok(QuantumFpFree { a_t, state: GaussianState { t, sigma_x: x, sigma_p: p, cov_xp: None }, observables: obs })
}

/// Closed-form quantum free particle under the closure `a = t_c = ℏ/2ℰ_ℏ`, `γ = ℰ_ℏ/ℏ`.
pub fn quantum_fp_free_closed(mass: f64, env: &Environment, t: f64) -> Result<Observables> {
    quantum_fp_free_closed_with_hbar(mass, env, t, HBAR)
}

/// [`quantum_fp_free_closed`] with an explicit Planck constant.
pub fn quantum_fp_free_closed_with_hbar(mass: f64, env: &Environment, t: f64, hbar: f64) -> Result<Observables> {
    check_time(t)?;
    if !(mass.is_finite() && mass > 0.0) {
        return domain(format!("mass must be positive, got {mass}"));
    }
    let e = positive_energy(env)?;
    let u = (-2.0 * e * t / hbar).exp();
    let s = 1.0 + 2.0 * u * (u - 1.0);
    let w = u * (2.0 * u - 1.0);
    let p = (mass * e * s).sqrt();
    let mut obs = Observables::at(t);
    obs.p = Some(p);
    obs.x = Some(hbar / (2.0 * p));
    obs.f = Some(-(4.0 * mass * e.powi(3) / (hbar * hbar)).sqrt() * w / s.sqrt());
    obs.v = Some((e / mass).sqrt() * w / s.powf(1.5));
    obs.d = Some(hbar / (2.0 * mass) * w / (s * s));
    obs.d_valid = t <= hbar / (2.0 * e) * std::f64::consts::LN_2;
    Ok(obs)
}

/// Time at which the closed-form force and velocity vanish, found by bisection.
pub fn quantum_force_zero_time(env: &Environment) -> Result<f64> {
    let e = positive_energy(env)?;
    let t_q = HBAR / (2.0 * e);
    let force = |t: f64| -> f64 {
        let u = (-t / t_q).exp();
        u * (2.0 * u - 1.0)
    };
    let (mut lo, mut hi) = (0.0, 5.0 * t_q);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if force(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `⟨P(t)P(t')⟩` of the quantum Langevin free particle with `⟨P²(0)⟩ = mℰ_ℏ`.
pub fn momentum_autocorrelation(
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
    t2: f64,
) -> Result<f64> {
    check_time(t)?;
    check_time(t2)?;
    require_free(spec, "momentum_autocorrelation")?;
    require_normal(kernel, "momentum_autocorrelation")?;
    let (s, u) = if t <= t2 { (t, t2) } else { (t2, t) };
    let me = spec.mass * env.diffusion_energy();
    let q = 4.0 * spec.gamma;
    let lag = (-2.0 * spec.gamma * (u - s)).exp();
    Ok(me * lag - me * q * lag * expdiff(1.0 / kernel.t_c(), q, s))
}

/// Quantum Langevin free particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumLangevinFree {
    pub state: GaussianState,
    pub observables: Observables,
}

/// Free particle in the quantum Langevin description, started from the
/// minimal Gaussian with `⟨P²(0)⟩ = mℰ_ℏ`.
pub fn quantum_langevin_free(
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<QuantumLangevinFree> {
    quantum_langevin_free_with_hbar(spec, env, kernel, t, HBAR)
}

/// [`quantum_langevin_free`] with an explicit Planck constant.
pub fn quantum_langevin_free_with_hbar(
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
    hbar: f64,
) -> Result<QuantumLangevinFree> {
    check_time(t)?;
    require_free(spec, "quantum_langevin_free")?;
    require_normal(kernel, "quantum_langevin_free")?;
    require_damping(spec, "quantum_langevin_free")?;
    let e = positive_energy(env)?;
    let (m, g, tc) = (spec.mass, spec.gamma, kernel.t_c());
    let p2 = momentum_autocorrelation(spec, env, kernel, t, t)?;
    let (x2_thermal, d) = equipartition_rmsd(m, g, e, tc, t);
    let x = (hbar * hbar / (4.0 * m * e) + x2_thermal).sqrt();
    let p = p2.sqrt();
    let mut obs = Observables::at(t);
    obs.x = Some(x);
    obs.p = Some(p);
    obs.d = Some(d);
    obs.v = Some(d / x);
    obs.f = Some(free_msp_dt(m, g, e, tc, m * e, t) / (2.0 * p));
    Ok(QuantumLangevinFree {
        state: GaussianState { t, sigma_x: x, sigma_p: p, cov_xp: Some(m * d) },
        observables: obs,
    })
}

/// Quantum Smoluchowski solutions: the width function (`b_ℏ` for the free
/// particle, `B_ℏ` for the oscillator), the state and the observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumSmoluchowski {
    pub width: f64,
    pub state: GaussianState,
    pub observables: Observables,
}

/// `B_ℏ(t)` and its derivative; `r = 2k/mγ` is zero for the free particle.
#[allow(clippy::too_many_arguments)]
fn smoluchowski_width(
    m: f64,
    gamma: f64,
    e: f64,
    r: f64,
    a: f64,
    kernel: &CorrelationKernel,
    t: f64,
    hbar: f64,
) -> (f64, f64) {
    let scale = 4.0 * e / (gamma * m);
    let conv = if r == 0.0 { kernel.j(t) } else { t * exprel(r * t) - expdiff(1.0 / kernel.t_c(), r, t) };
    let b = a * hbar / m * (-r * t).exp() + scale * conv;
    let b_dt = -r * b + scale * kernel.i(t);
    (b, b_dt)
}

fn smoluchowski_observables(big_b: f64, big_b_dt: f64, t: f64, hbar: f64) -> (GaussianState, Observables) {
    let x = (big_b / 2.0).sqrt();
    let p = hbar / (2.0 * big_b).sqrt();
    let mut obs = Observables::at(t);
    obs.x = Some(x);
    obs.p = Some(p);
    obs.v = Some(big_b_dt / (2.0 * (2.0 * big_b).sqrt()));
    obs.d = Some(big_b_dt / 4.0);
    obs.f = Some(-hbar * big_b_dt / (2.0 * big_b).powf(1.5));
    (GaussianState { t, sigma_x: x, sigma_p: p, cov_xp: None }, obs)
}

/// Free particle in the quantum Smoluchowski description; `width` is `b_ℏ(t)`.
pub fn quantum_smoluchowski_free(
    spec: &ParticleSpec,
    a: f64,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<QuantumSmoluchowski> {
    quantum_smoluchowski_free_with_hbar(spec, a, env, kernel, t, HBAR)
}

/// [`quantum_smoluchowski_free`] with an explicit Planck constant.
pub fn quantum_smoluchowski_free_with_hbar(
    spec: &ParticleSpec,
    a: f64,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
    hbar: f64,
) -> Result<QuantumSmoluchowski> {
    check_time(t)?;
    require_free(spec, "quantum_smoluchowski_free")?;
    require_normal(kernel, "quantum_smoluchowski_free")?;
    require_damping(spec, "quantum_smoluchowski_free")?;
    positive_a(a)?;
    let e = positive_energy(env)?;
    let (big_b, big_b_dt) = smoluchowski_width(spec.mass, spec.gamma, e, 0.0, a, kernel, t, hbar);
    let (state, observables) = smoluchowski_observables(big_b, big_b_dt, t, hbar);
    Ok(QuantumSmoluchowski { width: big_b / 4.0, state, observables })
}

/// Harmonic oscillator in the quantum Smoluchowski description; `width` is `B_ℏ(t)`.
pub fn quantum_smoluchowski_oscillator(
    spec: &ParticleSpec,
    a: f64,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<QuantumSmoluchowski> {
    quantum_smoluchowski_oscillator_with_hbar(spec, a, env, kernel, t, HBAR)
}

/// [`quantum_smoluchowski_oscillator`] with an explicit Planck constant.
pub fn quantum_smoluchowski_oscillator_with_hbar(
    spec: &ParticleSpec,
    a: f64,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
    hbar: f64,
) -> Result<QuantumSmoluchowski> {
    check_time(t)?;
    require_harmonic(spec, "quantum_smoluchowski_oscillator")?;
    require_normal(kernel, "quantum_smoluchowski_oscillator")?;
    require_damping(spec, "quantum_smoluchowski_oscillator")?;
    positive_a(a)?;
    let e = positive_energy(env)?;
    let r = 2.0 * spec.stiffness() / (spec.mass * spec.gamma);
    let (big_b, big_b_dt) = smoluchowski_width(spec.mass, spec.gamma, e, r, a, kernel, t, hbar);
    let (state, observables) = smoluchowski_observables(big_b, big_b_dt, t, hbar);
    Ok(QuantumSmoluchowski { width: big_b, state, observables })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticScenario {
    Inertial,
    NonInertial,
}

/// Long-time `(⟨P²⟩, ⟨X²⟩)` of the anomalous quantum free particle.
pub fn quantum_anomalous_asymptotics(
    scenario: AsymptoticScenario,
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    t: f64,
) -> Result<(f64, f64)> {
    check_time(t)?;
    require_free(spec, "quantum_anomalous_asymptotics")?;
    let lambda = kernel.lambda();
    if !(lambda > 1.0) {
        return domain(format!("asymptotics need lambda > 1, got {lambda}"));
    }
    let e = positive_energy(env)?;
    let (m, tc) = (spec.mass, kernel.t_c());
    let quarter_hbar2 = HBAR * HBAR / 4.0;
    match scenario {
        AsymptoticScenario::Inertial => {
            let p2 = lambda * m * e * (t / tc).powf(lambda - 1.0);
            Ok((p2, quarter_hbar2 / p2))
        }
        AsymptoticScenario::NonInertial => {
            require_damping(spec, "quantum_anomalous_asymptotics")?;
            let x2 = 2.0 * e / (m * spec.gamma) * t.powf(lambda) / tc.powf(lambda - 1.0);
            Ok((quarter_hbar2 / x2, x2))
        }
    }
}
