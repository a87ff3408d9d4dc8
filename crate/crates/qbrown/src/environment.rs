//! Heat baths and their diffusion energies.

use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::numeric::coth;

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054571817e-34;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380649e-23;

/// The fixed physical constants used throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants { hbar: HBAR, k_b: K_B };
}

/// Source of the diffusion energy `ℰ` (classical) or `ℰ_ℏ` (quantum).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Environment {
    /// A directly specified diffusion energy (J).
    NonThermal { energy: f64 },
    /// `ℰ = k_B T`.
    ClassicalThermal { temperature: f64 },
    /// Bath of quantum harmonic oscillators of angular frequency `omega`.
    OscillatorBath { omega: f64, temperature: f64 },
    /// Ideal Fermi gas, low-temperature expansion (`T ≤ T_F`).
    FermiBath { fermi_temperature: f64, temperature: f64 },
    /// Ideal Bose gas at or below condensation (`T ≤ T_BE`).
    BoseBath { bose_temperature: f64, temperature: f64 },
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        domain(format!("{name} must be finite and nonnegative, got {v}"))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        domain(format!("{name} must be finite and positive, got {v}"))
    }
}

impl Environment {
    pub fn non_thermal(energy: f64) -> Result<Self> {
        nonneg("energy", energy)?;
        Ok(Self::NonThermal { energy })
    }

    pub fn classical(temperature: f64) -> Result<Self> {
        nonneg("temperature", temperature)?;
        Ok(Self::ClassicalThermal { temperature })
    }

    pub fn oscillator_bath(omega: f64, temperature: f64) -> Result<Self> {
        positive("omega", omega)?;
        nonneg("temperature", temperature)?;
        Ok(Self::OscillatorBath { omega, temperature })
    }

    pub fn fermi_bath(fermi_temperature: f64, temperature: f64) -> Result<Self> {
        positive("fermi_temperature", fermi_temperature)?;
        nonneg("temperature", temperature)?;
        if temperature > fermi_temperature {
            return domain("fermionic bath requires T <= T_F");
        }
        Ok(Self::FermiBath { fermi_temperature, temperature })
    }

    pub fn bose_bath(bose_temperature: f64, temperature: f64) -> Result<Self> {
        positive("bose_temperature", bose_temperature)?;
        nonneg("temperature", temperature)?;
        if temperature > bose_temperature {
            return domain("bosonic bath requires T <= T_BE");
        }
        Ok(Self::BoseBath { bose_temperature, temperature })
    }

    /// Re-checks the invariants of a value built without a constructor.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::NonThermal { energy } => Self::non_thermal(energy).map(|_| ()),
            Self::ClassicalThermal { temperature } => Self::classical(temperature).map(|_| ()),
            Self::OscillatorBath { omega, temperature } => Self::oscillator_bath(omega, temperature).map(|_| ()),
            Self::FermiBath { fermi_temperature, temperature } => {
                Self::fermi_bath(fermi_temperature, temperature).map(|_| ())
            }
            Self::BoseBath { bose_temperature, temperature } => {
                Self::bose_bath(bose_temperature, temperature).map(|_| ())
            }
        }
    }

    /// `ℰ` or `ℰ_ℏ` in joules.
    pub fn diffusion_energy(&self) -> f64 {
        match *self {
            Self::NonThermal { energy } => energy,
            Self::ClassicalThermal { temperature } => K_B * temperature,
            Self::OscillatorBath { omega, temperature } => {
                let zero_point = omega * HBAR / 2.0;
                if temperature == 0.0 {
                    zero_point
                } else {
                    zero_point * coth(zero_point / (K_B * temperature))
                }
            }
            Self::FermiBath { fermi_temperature: tf, temperature: t } => {
                0.6 * K_B * tf * (1.0 + 5.0 * PI * PI / 12.0 * (t / tf).powi(2))
            }
            Self::BoseBath { bose_temperature: tb, temperature: t } => {
                0.77 * K_B * ((t.powi(5) / tb.powi(3)).sqrt() + tb * (1.0 - (t / tb).powi(3)).sqrt())
            }
        }
    }

    /// True for baths whose energy carries `ℏ`.
    pub fn is_quantum(&self) -> bool {
        matches!(self, Self::OscillatorBath { .. } | Self::FermiBath { .. } | Self::BoseBath { .. })
    }
}

fn check_gas(n: f64, g: u32, m: f64) -> Result<()> {
    positive("number density", n)?;
    positive("mass", m)?;
    if g < 1 {
        return domain("spin degeneracy must be at least 1");
    }
    Ok(())
}

/// Fermi temperature `T_F = (ℏ²/2m)(6π²/g)^(2/3) n^(2/3) / k_B`.
pub fn fermi_temperature(n: f64, g: u32, m: f64) -> Result<f64> {
    check_gas(n, g, m)?;
    let eps_f = HBAR * HBAR / (2.0 * m) * (6.0 * PI * PI / g as f64).powf(2.0 / 3.0) * n.powf(2.0 / 3.0);
    Ok(eps_f / K_B)
}

/// Bose-Einstein temperature `T_BE = g (2πℏ²/m k_B)(n/2.612)^(2/3)`.
pub fn bose_einstein_temperature(n: f64, g: u32, m: f64) -> Result<f64> {
    check_gas(n, g, m)?;
    Ok(g as f64 * (2.0 * PI * HBAR * HBAR / (m * K_B)) * (n / 2.612).powf(2.0 / 3.0))
}

/// Closure parameters collapsing the three quantum time scales into one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Closure {
    pub a: f64,
    pub gamma: f64,
    pub t_c: f64,
}

/// `a = t_c = ℏ/2ℰ_ℏ`, `γ = ℰ_ℏ/ℏ`.
pub fn closure(energy: f64) -> Result<Closure> {
    closure_with_hbar(energy, HBAR)
}

/// [`closure`] for a rescaled Planck constant (dimensionless units, classical limits).
pub fn closure_with_hbar(energy: f64, hbar: f64) -> Result<Closure> {
    positive("diffusion energy", energy)?;
    let t = hbar / (2.0 * energy);
    Ok(Closure { a: t, gamma: energy / hbar, t_c: t })
}

/// `b = √(2βmℰ)`.
pub fn fluctuation_strength(beta: f64, m: f64, energy: f64) -> Result<f64> {
    nonneg("beta", beta)?;
    positive("mass", m)?;
    nonneg("energy", energy)?;
    Ok((2.0 * beta * m * energy).sqrt())
}
