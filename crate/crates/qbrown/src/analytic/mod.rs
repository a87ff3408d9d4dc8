//! Closed-form second moments and derived observables.
//!
//! Inertial scenarios damp the momentum at rate `2γ`; non-inertial ones use
//! `γ` directly. Forces and velocities are exact time derivatives of the
//! closed forms.

mod anomalous;
mod classical;
mod moments;
mod quantum;

pub use anomalous::{anomalous_msd, AnomalousScenario};
pub use classical::{
    classical_inertial_free_force, classical_inertial_free_msp, classical_inertial_free_rmsd,
    classical_noninertial_free, classical_noninertial_oscillator, OscillatorObservables,
};
pub use moments::{inertial_free_moments, noninertial_msd, SecondMoments};
pub use quantum::{
    momentum_autocorrelation, quantum_anomalous_asymptotics, quantum_force_zero_time, quantum_fp_free,
    quantum_fp_free_closed, quantum_fp_free_closed_with_hbar, quantum_fp_free_with_hbar, quantum_langevin_free,
    quantum_langevin_free_with_hbar, quantum_smoluchowski_free, quantum_smoluchowski_free_with_hbar,
    quantum_smoluchowski_oscillator, quantum_smoluchowski_oscillator_with_hbar, AsymptoticScenario, QuantumFpFree,
    QuantumLangevinFree, QuantumSmoluchowski,
};

use crate::error::{domain, unsupported, Result};
use crate::kernel::CorrelationKernel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Free,
    /// `V(x) = m ω² x² / 2`.
    Harmonic {
        omega: f64,
    },
}

/// Mass, damping and potential of the Brownian particle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleSpec {
    pub mass: f64,
    pub gamma: f64,
    pub potential: Potential,
}

impl ParticleSpec {
    pub fn new(mass: f64, gamma: f64, potential: Potential) -> Result<Self> {
        let spec = Self { mass, gamma, potential };
        spec.validate()?;
        Ok(spec)
    }

    pub fn free(mass: f64, gamma: f64) -> Result<Self> {
        Self::new(mass, gamma, Potential::Free)
    }

    pub fn harmonic(mass: f64, gamma: f64, omega: f64) -> Result<Self> {
        Self::new(mass, gamma, Potential::Harmonic { omega })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return domain(format!("mass must be positive, got {}", self.mass));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return domain(format!("gamma must be nonnegative, got {}", self.gamma));
        }
        if let Potential::Harmonic { omega } = self.potential {
            if !(omega.is_finite() && omega > 0.0) {
                return domain(format!("omega must be positive, got {omega}"));
            }
        }
        Ok(())
    }

    /// `k = m ω²`, zero for a free particle.
    pub fn stiffness(&self) -> f64 {
        match self.potential {
            Potential::Free => 0.0,
            Potential::Harmonic { omega } => self.mass * omega * omega,
        }
    }

    /// `V'(x)`.
    pub fn force_gradient(&self, x: f64) -> f64 {
        self.stiffness() * x
    }
}

/// Initial Gaussian state with zero means and zero cross-covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// `δ(x) δ(p)`.
    SharpOrigin,
    /// `⟨P²(0)⟩ = p2_0`, `⟨X²(0)⟩ = 0`.
    MomentumVariance { p2_0: f64 },
    /// `⟨X²(0)⟩ = x2_0`, `⟨P²(0)⟩ = 0`.
    PositionVariance { x2_0: f64 },
    /// `⟨P²(0)⟩ = ℏm/2a`, `⟨X²(0)⟩ = aℏ/2m`.
    MinimalGaussian { a: f64 },
}

impl InitialCondition {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::SharpOrigin => Ok(()),
            Self::MomentumVariance { p2_0 } if p2_0.is_finite() && p2_0 >= 0.0 => Ok(()),
            Self::PositionVariance { x2_0 } if x2_0.is_finite() && x2_0 >= 0.0 => Ok(()),
            Self::MinimalGaussian { a } if a.is_finite() && a > 0.0 => Ok(()),
            Self::MomentumVariance { p2_0 } => domain(format!("p2_0 must be nonnegative, got {p2_0}")),
            Self::PositionVariance { x2_0 } => domain(format!("x2_0 must be nonnegative, got {x2_0}")),
            Self::MinimalGaussian { a } => domain(format!("a must be positive, got {a}")),
        }
    }

    pub fn p2_0(&self, mass: f64, hbar: f64) -> f64 {
        match *self {
            Self::SharpOrigin | Self::PositionVariance { .. } => 0.0,
            Self::MomentumVariance { p2_0 } => p2_0,
            Self::MinimalGaussian { a } => hbar * mass / (2.0 * a),
        }
    }

    pub fn x2_0(&self, mass: f64, hbar: f64) -> f64 {
        match *self {
            Self::PositionVariance { x2_0 } => x2_0,
            Self::MinimalGaussian { a } => a * hbar / (2.0 * mass),
            _ => 0.0,
        }
    }
}

/// RMS fluctuations at time `t`; all means vanish in the implemented scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub t: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
    pub cov_xp: Option<f64>,
}

/// RMS displacement `X`, RMS momentum `P`, velocity `V = dX/dt`, force
/// `F = dP/dt`, diffusion coefficient `D = X V` and mean energy.
///
/// Quantities a scenario does not define are `None`. `d_valid` is false
/// where the scenario restricts `D` to part of the time axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub t: f64,
    pub x: Option<f64>,
    pub p: Option<f64>,
    pub v: Option<f64>,
    pub f: Option<f64>,
    pub d: Option<f64>,
    pub mean_energy: Option<f64>,
    pub d_valid: bool,
}

impl Observables {
    pub(crate) fn at(t: f64) -> Self {
        Self { t, x: None, p: None, v: None, f: None, d: None, mean_energy: None, d_valid: true }
    }

    /// `X·P` when both are defined.
    pub fn heisenberg_product(&self) -> Option<f64> {
        Some(self.x? * self.p?)
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        domain(format!("time must be finite and nonnegative, got {t}"))
    }
}

pub(crate) fn require_free(spec: &ParticleSpec, op: &str) -> Result<()> {
    match spec.potential {
        Potential::Free => Ok(()),
        Potential::Harmonic { .. } => unsupported(format!("{op} with a harmonic potential")),
    }
}

pub(crate) fn require_harmonic(spec: &ParticleSpec, op: &str) -> Result<f64> {
    match spec.potential {
        Potential::Harmonic { omega } => Ok(omega),
        Potential::Free => unsupported(format!("{op} with a free particle")),
    }
}

pub(crate) fn require_normal(kernel: &CorrelationKernel, op: &str) -> Result<()> {
    if kernel.is_normal() {
        Ok(())
    } else {
        unsupported(format!("{op} with anomalous kernel lambda = {}", kernel.lambda()))
    }
}

pub(crate) fn require_damping(spec: &ParticleSpec, op: &str) -> Result<()> {
    if spec.gamma > 0.0 {
        Ok(())
    } else {
        domain(format!("{op} requires gamma > 0"))
    }
}
