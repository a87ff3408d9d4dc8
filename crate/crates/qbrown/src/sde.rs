//! Euler-Maruyama Monte Carlo of the Langevin equations with noise
//! `Ψ(t) = √I(t)·ξ(t)`.
//!
//! Every path owns a ChaCha8 stream selected by its index, and paths are
//! merged in a fixed order, so results do not depend on the thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::analytic::{InitialCondition, ParticleSpec, Potential};
use crate::environment::{Environment, HBAR};
use crate::error::{Error, Result};
use crate::kernel::CorrelationKernel;

const CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub dt: f64,
    pub t_end: f64,
    pub n_paths: usize,
    pub seed: u64,
    /// Ascending times in `[0, t_end]`, snapped to the nearest step.
    pub record_times: Vec<f64>,
    /// Skip the `dt ≤ min(t_c, 1/2γ, 1/ω)/20` check.
    pub override_stability: bool,
}

impl SimulationConfig {
    pub fn new(dt: f64, t_end: f64, n_paths: usize, seed: u64, record_times: Vec<f64>) -> Self {
        Self { dt, t_end, n_paths, seed, record_times, override_stability: false }
    }

    /// Largest step allowed without the override.
    pub fn stability_bound(spec: &ParticleSpec, kernel: &CorrelationKernel) -> f64 {
        let mut scale = kernel.t_c();
        if spec.gamma > 0.0 {
            scale = scale.min(0.5 / spec.gamma);
        }
        if let Potential::Harmonic { omega } = spec.potential {
            scale = scale.min(1.0 / omega);
        }
        scale / 20.0
    }

    fn record_steps(&self, spec: &ParticleSpec, kernel: &CorrelationKernel) -> Result<Vec<usize>> {
        let cfg_err = |msg: String| Err(Error::Config(msg));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return cfg_err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end > self.dt) {
            return cfg_err(format!("t_end must exceed dt, got {}", self.t_end));
        }
        if self.n_paths == 0 {
            return cfg_err("n_paths must be at least 1".into());
        }
        if self.record_times.is_empty() {
            return cfg_err("record_times is empty".into());
        }
        let bound = Self::stability_bound(spec, kernel);
        if !self.override_stability && self.dt > bound {
            return cfg_err(format!("dt = {} exceeds the stability bound {bound}", self.dt));
        }
        let mut prev = 0.0;
        let mut steps = Vec::with_capacity(self.record_times.len());
        for &t in &self.record_times {
            if !(t >= prev && t <= self.t_end * (1.0 + 1e-12)) {
                return cfg_err(format!("record time {t} is out of order or outside [0, t_end]"));
            }
            prev = t;
            steps.push((t.min(self.t_end) / self.dt).round() as usize);
        }
        Ok(steps)
    }
}

/// Sample moments at the record times. Momentum fields are empty for
/// non-inertial runs.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub times: Vec<f64>,
    pub mean_x: Vec<f64>,
    pub mean_p: Vec<f64>,
    pub m2_x: Vec<f64>,
    pub m2_p: Vec<f64>,
    pub mean_px: Vec<f64>,
    pub se_mean_x: Vec<f64>,
    pub se_mean_p: Vec<f64>,
    pub se_m2_x: Vec<f64>,
    pub se_m2_p: Vec<f64>,
    pub se_mean_px: Vec<f64>,
    pub n_paths: usize,
}

/// Streaming mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moment {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moment {
    fn push(&mut self, v: f64) {
        self.n += 1.0;
        let d = v - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (v - self.mean);
    }

    fn merge(&mut self, o: &Moment) {
        if o.n == 0.0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n / n;
        self.m2 += o.m2 + d * d * self.n * o.n / n;
        self.n = n;
    }

    fn se(&self) -> f64 {
        if self.n < 2.0 {
            return 0.0;
        }
        (self.m2 / (self.n - 1.0)).sqrt() / self.n.sqrt()
    }
}

// x, p, x², p², xp
type Record = [Moment; 5];

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Noise increments `b·√(I(t_n)·dt)·ξ` at step `n` for `count` paths, using
/// the integrator's per-path streams and scaling.
pub fn noise_increments(
    amplitude: f64,
    kernel: &CorrelationKernel,
    dt: f64,
    step: usize,
    count: usize,
    seed: u64,
) -> Vec<f64> {
    let scale = amplitude * (kernel.i(step as f64 * dt) * dt).sqrt();
    (0..count).map(|k| scale * normal(&mut path_rng(seed, k))).collect()
}

enum Dynamics {
    Inertial { mass: f64, damping: f64, stiffness: f64 },
    NonInertial { drift: f64 },
}

/// Inertial Langevin ensemble: `dP = (-V'(X) - 2γP)dt + √(4γmℰ I(t)) dW`, `dX = P/m dt`.
pub fn simulate_inertial(
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    init: &InitialCondition,
    cfg: &SimulationConfig,
) -> Result<EnsembleStats> {
    spec.validate()?;
    env.validate()?;
    init.validate()?;
    let b = (4.0 * spec.gamma * spec.mass * env.diffusion_energy()).sqrt();
    let dynamics = Dynamics::Inertial { mass: spec.mass, damping: 2.0 * spec.gamma, stiffness: spec.stiffness() };
    run(spec, kernel, init, cfg, dynamics, b)
}

/// Overdamped ensemble: `dX = -V'(X)/(γm) dt + √(2ℰ I(t)/γm) dW`.
pub fn simulate_noninertial(
    spec: &ParticleSpec,
    env: &Environment,
    kernel: &CorrelationKernel,
    init: &InitialCondition,
    cfg: &SimulationConfig,
) -> Result<EnsembleStats> {
    spec.validate()?;
    env.validate()?;
    init.validate()?;
    if !(spec.gamma > 0.0) {
        return Err(Error::Domain("non-inertial dynamics require gamma > 0".into()));
    }
    let gm = spec.gamma * spec.mass;
    let b = (2.0 * env.diffusion_energy() / gm).sqrt();
    run(spec, kernel, init, cfg, Dynamics::NonInertial { drift: spec.stiffness() / gm }, b)
}

fn run(
    spec: &ParticleSpec,
    kernel: &CorrelationKernel,
    init: &InitialCondition,
    cfg: &SimulationConfig,
    dynamics: Dynamics,
    b: f64,
) -> Result<EnsembleStats> {
    let steps = cfg.record_steps(spec, kernel)?;
    let x_sd = init.x2_0(spec.mass, HBAR).sqrt();
    let p_sd = init.p2_0(spec.mass, HBAR).sqrt();
    let n_chunks = cfg.n_paths.div_ceil(CHUNK);

    let chunks: Vec<Vec<Record>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let first = c * CHUNK;
            let len = CHUNK.min(cfg.n_paths - first);
            let mut rngs: Vec<ChaCha8Rng> = (first..first + len).map(|k| path_rng(cfg.seed, k)).collect();
            let mut xs = Vec::with_capacity(len);
            let mut ps = Vec::with_capacity(len);
            for rng in rngs.iter_mut() {
                xs.push(if x_sd > 0.0 { x_sd * normal(rng) } else { 0.0 });
                ps.push(if p_sd > 0.0 { p_sd * normal(rng) } else { 0.0 });
            }
            let mut records = vec![Record::default(); steps.len()];
            let mut step = 0usize;
            for (r, &target) in steps.iter().enumerate() {
                while step < target {
                    let noise = b * (kernel.i(step as f64 * cfg.dt) * cfg.dt).sqrt();
                    advance(&dynamics, &mut xs, &mut ps, &mut rngs, cfg.dt, noise);
                    step += 1;
                }
                let rec = &mut records[r];
                for (&x, &p) in xs.iter().zip(&ps) {
                    rec[0].push(x);
                    rec[1].push(p);
                    rec[2].push(x * x);
                    rec[3].push(p * p);
                    rec[4].push(x * p);
                }
            }
            records
        })
        .collect();

    let mut total = vec![Record::default(); steps.len()];
    for chunk in &chunks {
        for (acc, rec) in total.iter_mut().zip(chunk) {
            for (a, m) in acc.iter_mut().zip(rec) {
                a.merge(m);
            }
        }
    }
    let column = |i: usize, f: fn(&Moment) -> f64| -> Vec<f64> { total.iter().map(|r| f(&r[i])).collect() };
    let mean = |m: &Moment| m.mean;
    let se = |m: &Moment| m.se();
    let inertial = matches!(dynamics, Dynamics::Inertial { .. });
    let momentum = |i: usize, f: fn(&Moment) -> f64| if inertial { column(i, f) } else { Vec::new() };
    Ok(EnsembleStats {
        times: steps.iter().map(|&s| s as f64 * cfg.dt).collect(),
        mean_x: column(0, mean),
        mean_p: momentum(1, mean),
        m2_x: column(2, mean),
        m2_p: momentum(3, mean),
        mean_px: momentum(4, mean),
        se_mean_x: column(0, se),
        se_mean_p: momentum(1, se),
        se_m2_x: column(2, se),
        se_m2_p: momentum(3, se),
        se_mean_px: momentum(4, se),
        n_paths: cfg.n_paths,
    })
}

fn advance(dynamics: &Dynamics, xs: &mut [f64], ps: &mut [f64], rngs: &mut [ChaCha8Rng], dt: f64, noise: f64) {
    match *dynamics {
        Dynamics::Inertial { mass, damping, stiffness } => {
            for ((x, p), rng) in xs.iter_mut().zip(ps.iter_mut()).zip(rngs.iter_mut()) {
                let kick = if noise > 0.0 { noise * normal(rng) } else { 0.0 };
                let x0 = *x;
                *x += *p / mass * dt;
                *p += (-stiffness * x0 - damping * *p) * dt + kick;
            }
        }
        Dynamics::NonInertial { drift } => {
            for (x, rng) in xs.iter_mut().zip(rngs.iter_mut()) {
                let kick = if noise > 0.0 { noise * normal(rng) } else { 0.0 };
                *x += -drift * *x * dt + kick;
            }
        }
    }
}

/// Fitted MSD exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentEstimate {
    pub lambda: f64,
    pub se: f64,
    pub n_points: usize,
}

/// OLS slope of `log⟨X²⟩` against `log t` over record times inside `window`.
pub fn estimate_msd_exponent(stats: &EnsembleStats, window: (f64, f64)) -> Result<ExponentEstimate> {
    let (lo, hi) = window;
    let mut pts = Vec::new();
    for (&t, &msd) in stats.times.iter().zip(&stats.m2_x) {
        if t >= lo && t <= hi {
            if !(msd > 0.0 && t > 0.0) {
                return Err(Error::Estimation(format!("nonpositive MSD {msd} at t = {t}")));
            }
            pts.push((t.ln(), msd.ln()));
        }
    }
    let n = pts.len();
    if n < 5 {
        return Err(Error::Estimation(format!("{n} record points in window, need at least 5")));
    }
    let nf = n as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Estimation("record times in window are not distinct".into()));
    }
    let slope = sxy / sxx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    Ok(ExponentEstimate { lambda: slope, se: (ssr / (nf - 2.0) / sxx).sqrt(), n_points: n })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(f: impl Fn(f64) -> f64) -> EnsembleStats {
        let times: Vec<f64> = (1..=20).map(|k| k as f64 * 0.5).collect();
        let m2_x = times.iter().map(|&t| f(t)).collect();
        EnsembleStats {
            times,
            mean_x: vec![],
            mean_p: vec![],
            m2_x,
            m2_p: vec![],
            mean_px: vec![],
            se_mean_x: vec![],
            se_mean_p: vec![],
            se_m2_x: vec![],
            se_m2_p: vec![],
            se_mean_px: vec![],
            n_paths: 1,
        }
    }

    #[test]
    fn exponent_of_exact_power_laws() {
        let s = synthetic(|t| 3.0 * t.powf(2.5));
        assert!((estimate_msd_exponent(&s, (0.0, 100.0)).unwrap().lambda - 2.5).abs() < 1e-12);
        let s = synthetic(|_| 7.0);
        assert!(estimate_msd_exponent(&s, (0.0, 100.0)).unwrap().lambda.abs() < 1e-12);
    }

    #[test]
    fn exponent_errors() {
        let s = synthetic(|t| t);
        assert!(matches!(estimate_msd_exponent(&s, (0.9, 2.1)), Err(Error::Estimation(_))));
        let s = synthetic(|t| t - 1.0);
        assert!(matches!(estimate_msd_exponent(&s, (0.0, 100.0)), Err(Error::Estimation(_))));
    }

    #[test]
    fn merge_matches_single_pass() {
        let data: Vec<f64> = (0..100).map(|k| (k as f64 * 0.37).sin()).collect();
        let mut whole = Moment::default();
        data.iter().for_each(|&v| whole.push(v));
        let mut a = Moment::default();
        let mut b = Moment::default();
        data[..37].iter().for_each(|&v| a.push(v));
        data[37..].iter().for_each(|&v| b.push(v));
        a.merge(&b);
        assert!((a.mean - whole.mean).abs() < 1e-15);
        assert!((a.m2 - whole.m2).abs() < 1e-12);
    }

    #[test]
    fn stability_bound_is_enforced() {
        let spec = ParticleSpec::free(1.0, 1.0).unwrap();
        let env = Environment::non_thermal(1.0).unwrap();
        let k = CorrelationKernel::normal(0.5).unwrap();
        let mut cfg = SimulationConfig::new(0.1, 1.0, 10, 1, vec![1.0]);
        let r = simulate_inertial(&spec, &env, &k, &InitialCondition::SharpOrigin, &cfg);
        assert!(matches!(r, Err(Error::Config(_))));
        cfg.override_stability = true;
        assert!(simulate_inertial(&spec, &env, &k, &InitialCondition::SharpOrigin, &cfg).is_ok());
    }
}
