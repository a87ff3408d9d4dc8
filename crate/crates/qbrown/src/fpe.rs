//! Finite-volume solver for the non-Markovian Rayleigh (momentum space) and
//! Smoluchowski (configuration space) equations.
//!
//! Both are written as `∂f/∂t = -∂F/∂y` with `F = v(y) f - D(t) ∂f/∂y` and
//! zero flux through the outer faces. Face densities are central where the
//! cell Péclet number `|v| dy / D` is below 2 and upwind elsewhere. Time
//! stepping is explicit Euler with automatic substepping.

use crate::analytic::{inertial_free_moments, noninertial_msd, InitialCondition, ParticleSpec, Potential};
use crate::environment::Environment;
use crate::error::{domain, unsupported, Error, Result};
use crate::kernel::CorrelationKernel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub y_min: f64,
    pub y_max: f64,
    pub n_cells: usize,
}

impl Grid1D {
    pub fn new(y_min: f64, y_max: f64, n_cells: usize) -> Result<Self> {
        if !(y_min.is_finite() && y_max.is_finite() && y_min < y_max) {
            return Err(Error::Config(format!("grid bounds must satisfy y_min < y_max, got [{y_min}, {y_max}]")));
        }
        if n_cells < 64 {
            return Err(Error::Config(format!("n_cells must be at least 64, got {n_cells}")));
        }
        Ok(Self { y_min, y_max, n_cells })
    }

    /// Symmetric grid spanning `±8σ`.
    pub fn symmetric(sigma: f64, n_cells: usize) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return domain(format!("grid width needs a positive sigma, got {sigma}"));
        }
        Self::new(-8.0 * sigma, 8.0 * sigma, n_cells)
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.n_cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.y_min + (i as f64 + 0.5) * self.dy()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensitySnapshot {
    pub t: f64,
    /// Density at the cell centres.
    pub values: Vec<f64>,
    pub norm: f64,
    pub mean: f64,
    pub variance: f64,
    /// Mass removed by clipping round-off negatives, accumulated over the solve.
    pub clipped_mass: f64,
}

impl DensitySnapshot {
    fn new(t: f64, grid: &Grid1D, values: Vec<f64>, clipped_mass: f64) -> Self {
        let dy = grid.dy();
        let norm: f64 = values.iter().sum::<f64>() * dy;
        let mean = values.iter().enumerate().map(|(i, f)| f * grid.center(i)).sum::<f64>() * dy / norm;
        let variance =
            values.iter().enumerate().map(|(i, f)| f * (grid.center(i) - mean).powi(2)).sum::<f64>() * dy / norm;
        Self { t, values, norm, mean, variance, clipped_mass }
    }
}

/// The discrete start density: a Gaussian of standard deviation `3·dy` at the
/// origin, normalised on the grid. Its variance is the offset used by the
/// analytic references.
pub fn initial_density(grid: &Grid1D) -> DensitySnapshot {
    let s = 3.0 * grid.dy();
    let mut values: Vec<f64> = grid.centers().iter().map(|y| (-0.5 * (y / s).powi(2)).exp()).collect();
    let total: f64 = values.iter().sum::<f64>() * grid.dy();
    values.iter_mut().for_each(|v| *v /= total);
    DensitySnapshot::new(0.0, grid, values, 0.0)
}

struct Problem<'a> {
    kernel: &'a CorrelationKernel,
    /// `v(y) = -drift·y`.
    drift: f64,
    /// `D(t) = diffusion·I(t)`.
    diffusion: f64,
}

/// Rayleigh equation `∂f/∂t = 2γ ∂(p f)/∂p + 2γmℰ I(t) ∂²f/∂p²` for the free particle.
pub fn solve_rayleigh(
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    grid: &Grid1D,
    dt: f64,
    t_end: f64,
    record_times: &[f64],
) -> Result<Vec<DensitySnapshot>> {
    spec.validate()?;
    if spec.potential != Potential::Free {
        return unsupported("the Rayleigh equation with a potential");
    }
    let problem =
        Problem { kernel, drift: 2.0 * spec.gamma, diffusion: 2.0 * spec.gamma * spec.mass * env.diffusion_energy() };
    solve(&problem, grid, dt, t_end, record_times)
}

/// Smoluchowski equation `∂f/∂t = (1/γm) ∂(V'(x) f)/∂x + (ℰ/γm) I(t) ∂²f/∂x²`.
pub fn solve_smoluchowski(
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    grid: &Grid1D,
    dt: f64,
    t_end: f64,
    record_times: &[f64],
) -> Result<Vec<DensitySnapshot>> {
    spec.validate()?;
    if !(spec.gamma > 0.0) {
        return domain("the Smoluchowski equation requires gamma > 0");
    }
    let gm = spec.gamma * spec.mass;
    let problem = Problem { kernel, drift: spec.stiffness() / gm, diffusion: env.diffusion_energy() / gm };
    solve(&problem, grid, dt, t_end, record_times)
}

/// Analytic `⟨P²⟩` of the Rayleigh solution started from the variance `var0`.
pub fn rayleigh_reference(
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    var0: f64,
    t: f64,
) -> Result<f64> {
    Ok(inertial_free_moments(spec, &InitialCondition::MomentumVariance { p2_0: var0 }, env, kernel, 1.0, t)?.p2)
}

/// Analytic `⟨X²⟩` of the Smoluchowski solution started from the variance `var0`.
pub fn smoluchowski_reference(
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    var0: f64,
    t: f64,
) -> Result<f64> {
    noninertial_msd(spec, &InitialCondition::PositionVariance { x2_0: var0 }, env, kernel, 1.0, t)
}

fn solve(p: &Problem, grid: &Grid1D, dt: f64, t_end: f64, record_times: &[f64]) -> Result<Vec<DensitySnapshot>> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Config(format!("dt must be positive, got {dt}")));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::Config(format!("t_end must be positive, got {t_end}")));
    }
    let mut prev = 0.0;
    for &t in record_times {
        if !(t >= prev && t <= t_end * (1.0 + 1e-12)) {
            return Err(Error::Config(format!("record time {t} is out of order or outside [0, t_end]")));
        }
        prev = t;
    }
    if !(p.diffusion >= 0.0) {
        return domain("diffusion coefficient must be nonnegative");
    }

    let n = grid.n_cells;
    let dy = grid.dy();
    let faces: Vec<f64> = (0..n - 1).map(|i| grid.y_min + (i + 1) as f64 * dy).collect();
    let v_max = p.drift.abs() * grid.y_min.abs().max(grid.y_max.abs());
    let mut f = initial_density(grid).values;
    let mut flux = vec![0.0; n - 1];
    let mut clipped = 0.0;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(record_times.len());

    for &target in record_times {
        while t < target {
            let h = dt.min(target - t);
            let d_max = p.diffusion * p.kernel.i(t + h);
            let mut limit = f64::INFINITY;
            if d_max > 0.0 {
                limit = limit.min(0.4 * dy * dy / (2.0 * d_max));
            }
            if v_max > 0.0 {
                limit = limit.min(0.4 * dy / v_max);
            }
            let subs = if limit.is_finite() { (h / limit).ceil().max(1.0) as usize } else { 1 };
            let tau = h / subs as f64;
            for k in 0..subs {
                let d = p.diffusion * p.kernel.i(t + (k as f64 + 0.5) * tau);
                for (i, face) in faces.iter().enumerate() {
                    let v = -p.drift * face;
                    let central = v.abs() * dy < 2.0 * d;
                    let f_face = if central {
                        0.5 * (f[i] + f[i + 1])
                    } else if v > 0.0 {
                        f[i]
                    } else {
                        f[i + 1]
                    };
                    flux[i] = v * f_face - d * (f[i + 1] - f[i]) / dy;
                }
                let c = tau / dy;
                f[0] -= c * flux[0];
                for i in 1..n - 1 {
                    f[i] -= c * (flux[i] - flux[i - 1]);
                }
                f[n - 1] += c * flux[n - 2];
                for v in f.iter_mut() {
                    if *v < 0.0 {
                        if *v < -1e-14 {
                            return Err(Error::Numerical(format!("density went negative ({v}) at t = {t}")));
                        }
                        clipped -= *v * dy;
                        *v = 0.0;
                    }
                }
            }
            t = if target - (t + h) <= 1e-12 * target { target } else { t + h };
            check_boundaries(&f, t)?;
        }
        out.push(DensitySnapshot::new(target, grid, f.clone(), clipped));
    }
    Ok(out)
}

fn check_boundaries(f: &[f64], t: f64) -> Result<()> {
    let peak = f.iter().cloned().fold(0.0, f64::max);
    let edge = f[0].max(f[f.len() - 1]);
    if edge > 1e-12 * peak {
        return Err(Error::Numerical(format!(
            "density reached the domain boundary at t = {t} (edge/peak = {:.3e}); widen the grid",
            edge / peak
        )));
    }
    Ok(())
}
