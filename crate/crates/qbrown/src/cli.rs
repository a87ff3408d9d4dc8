//! Config-driven experiment runner behind the `qbrown` binary.
//!
//! A run reads a TOML scenario file (SI units throughout), evaluates one mode
//! and writes a table as CSV or JSON. Unknown keys are rejected with their
//! dotted path.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::analytic::{
    self, AnomalousScenario, AsymptoticScenario, InitialCondition, Observables, ParticleSpec, Potential,
};
use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::fpe::{self, Grid1D};
use crate::kernel::CorrelationKernel;
use crate::rates::{self, APreset, BarrierSpec, RateResult};
use crate::sde::{self, SimulationConfig};

#[derive(Debug, Clone, Deserialize)]
pub struct Config {
    pub particle: ParticleSection,
    pub environment: EnvironmentSection,
    pub kernel: KernelSection,
    pub initial: Option<InitialSection>,
    pub run: RunSection,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ParticleSection {
    /// kg
    pub mass: f64,
    /// 1/s
    pub gamma: f64,
    pub potential: Option<PotentialSection>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PotentialSection {
    /// `free` or `harmonic`
    pub kind: String,
    /// rad/s
    pub omega: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct EnvironmentSection {
    /// `non_thermal`, `classical`, `oscillator_bath`, `fermi_bath` or `bose_bath`
    pub kind: String,
    /// J
    pub energy: Option<f64>,
    /// K
    pub temperature: Option<f64>,
    /// rad/s
    pub omega: Option<f64>,
    /// K
    pub fermi_temperature: Option<f64>,
    /// K
    pub bose_temperature: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct KernelSection {
    /// s
    pub t_c: f64,
    #[serde(default)]
    pub lambda: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct InitialSection {
    /// `sharp`, `momentum_variance`, `position_variance` or `minimal_gaussian`
    pub kind: String,
    /// (kg·m/s)²
    pub p2_0: Option<f64>,
    /// m²
    pub x2_0: Option<f64>,
    /// kg/s
    pub a: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RunSection {
    pub mode: Option<String>,
    pub scenario: Option<String>,
    pub time_grid: Option<TimeGrid>,
    pub sde: Option<SdeSection>,
    pub pde: Option<PdeSection>,
    pub rates: Option<RatesSection>,
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TimeGrid {
    /// s
    pub min: f64,
    /// s
    pub max: f64,
    pub points: usize,
    /// `linear` or `log`
    #[serde(default = "linear")]
    pub spacing: String,
}

fn linear() -> String {
    "linear".into()
}

#[derive(Debug, Clone, Deserialize)]
pub struct SdeSection {
    /// s
    pub dt: f64,
    /// s
    pub t_end: f64,
    pub n_paths: usize,
    pub seed: Option<u64>,
    /// `inertial` (default) or `noninertial`
    pub dynamics: Option<String>,
    #[serde(default)]
    pub override_stability: bool,
    /// s, `[t_lo, t_hi]` for the MSD exponent fit
    pub fit_window: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PdeSection {
    /// `rayleigh` or `smoluchowski`
    pub equation: String,
    /// kg·m/s or m; both bounds absent means `±8σ` of the terminal state
    pub y_min: Option<f64>,
    pub y_max: Option<f64>,
    pub n_cells: usize,
    /// s
    pub dt: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RatesSection {
    /// `classical`, `classical_nonmarkov`, `quantum_inertial`,
    /// `quantum_inertial_nonmarkov` or `quantum_noninertial`
    pub formula: String,
    /// rad/s
    pub omega_a: f64,
    /// rad/s
    pub omega_b: f64,
    /// J
    #[serde(rename = "delta_V")]
    pub delta_v: f64,
    /// s
    pub t: Option<f64>,
    /// kg/s
    pub a_param: Option<f64>,
    /// `zero`, `half_mass_omega_b` or `half_mass_over_tc`
    pub a_preset: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SweepSection {
    pub parameter_path: String,
    pub values: Vec<f64>,
    /// mode run for every value: `analytic`, `simulate`, `pde` or `rates`
    pub mode: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    Simulate,
    Pde,
    Rates,
    Sweep,
}

impl Mode {
    fn parse(s: &str, key: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Self::Analytic),
            "simulate" => Ok(Self::Simulate),
            "pde" => Ok(Self::Pde),
            "rates" => Ok(Self::Rates),
            "sweep" => Ok(Self::Sweep),
            _ => Err(config(key, format!("unknown mode `{s}`"))),
        }
    }
}

fn config(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

/// Rewrites domain errors from constructors as configuration errors on `key`.
fn at<T>(key: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Domain(m) => config(key, m),
        other => other,
    })
}

fn require<T: Copy>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| config(key, "missing"))
}

/// Parses a scenario file, rejecting unknown keys.
pub fn parse_config(text: &str) -> Result<Config> {
    let value: toml::Value = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    config_from_value(value)
}

fn config_from_value(value: toml::Value) -> Result<Config> {
    let mut unknown = Vec::new();
    let cfg: Config = serde_ignored::deserialize(value, |path| unknown.push(path.to_string()))
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    if !unknown.is_empty() {
        return Err(Error::Config(format!("unknown key `{}`", unknown.join("`, `"))));
    }
    Ok(cfg)
}

impl Config {
    pub fn particle(&self) -> Result<ParticleSpec> {
        let p = &self.particle;
        let potential = match &p.potential {
            None => Potential::Free,
            Some(s) => match s.kind.as_str() {
                "free" => Potential::Free,
                "harmonic" => Potential::Harmonic { omega: require(s.omega, "particle.potential.omega")? },
                k => return Err(config("particle.potential.kind", format!("unknown potential `{k}`"))),
            },
        };
        at("particle", ParticleSpec::new(p.mass, p.gamma, potential))
    }

    pub fn environment(&self) -> Result<Environment> {
        let e = &self.environment;
        let temp = || require(e.temperature, "environment.temperature");
        let env = match e.kind.as_str() {
            "non_thermal" => Environment::non_thermal(require(e.energy, "environment.energy")?),
            "classical" => Environment::classical(temp()?),
            "oscillator_bath" => Environment::oscillator_bath(require(e.omega, "environment.omega")?, temp()?),
            "fermi_bath" => {
                Environment::fermi_bath(require(e.fermi_temperature, "environment.fermi_temperature")?, temp()?)
            }
            "bose_bath" => {
                Environment::bose_bath(require(e.bose_temperature, "environment.bose_temperature")?, temp()?)
            }
            k => return Err(config("environment.kind", format!("unknown environment `{k}`"))),
        };
        at("environment", env)
    }

    pub fn kernel(&self) -> Result<CorrelationKernel> {
        at("kernel", CorrelationKernel::new(self.kernel.t_c, self.kernel.lambda))
    }

    pub fn initial(&self) -> Result<InitialCondition> {
        let Some(i) = &self.initial else {
            return Ok(InitialCondition::SharpOrigin);
        };
        let init = match i.kind.as_str() {
            "sharp" => InitialCondition::SharpOrigin,
            "momentum_variance" => InitialCondition::MomentumVariance { p2_0: require(i.p2_0, "initial.p2_0")? },
            "position_variance" => InitialCondition::PositionVariance { x2_0: require(i.x2_0, "initial.x2_0")? },
            "minimal_gaussian" => InitialCondition::MinimalGaussian { a: require(i.a, "initial.a")? },
            k => return Err(config("initial.kind", format!("unknown initial condition `{k}`"))),
        };
        at("initial", init.validate())?;
        Ok(init)
    }

    fn minimal_gaussian_a(&self) -> Result<f64> {
        match self.initial()? {
            InitialCondition::MinimalGaussian { a } => Ok(a),
            _ => Err(config("initial.kind", "this scenario needs `minimal_gaussian` with `a`")),
        }
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        let g = self.run.time_grid.as_ref().ok_or_else(|| config("run.time_grid", "missing"))?;
        if g.points < 1 {
            return Err(config("run.time_grid.points", "must be at least 1"));
        }
        if !(g.min.is_finite() && g.max.is_finite() && g.min >= 0.0 && g.max >= g.min) {
            return Err(config("run.time_grid", "need 0 <= min <= max"));
        }
        let n = g.points;
        let frac = |k: usize| if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
        match g.spacing.as_str() {
            "linear" => Ok((0..n).map(|k| g.min + (g.max - g.min) * frac(k)).collect()),
            "log" => {
                if !(g.min > 0.0) {
                    return Err(config("run.time_grid.min", "log spacing needs min > 0"));
                }
                let (a, b) = (g.min.ln(), g.max.ln());
                let mut v: Vec<f64> = (0..n).map(|k| (a + (b - a) * frac(k)).exp()).collect();
                v[0] = g.min;
                if n > 1 {
                    v[n - 1] = g.max;
                }
                Ok(v)
            }
            s => Err(config("run.time_grid.spacing", format!("unknown spacing `{s}`"))),
        }
    }
}

/// Column-oriented numeric result with units.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub units: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Free-text remarks carried in JSON output.
    pub notes: Vec<String>,
}

/// Config hash, seed and tool version stamped on every table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn new(config_bytes: &[u8], seed: u64) -> Self {
        Self {
            config_hash: hex::encode(Sha256::digest(config_bytes)),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

impl ResultTable {
    fn new(spec: &[(&str, &str)]) -> Self {
        Self {
            columns: spec.iter().map(|c| c.0.to_string()).collect(),
            units: spec.iter().map(|c| c.1.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self, prov: &Provenance) -> String {
        let mut s = format!("# provenance: {} {} {}\n", prov.config_hash, prov.seed, prov.version);
        let header: Vec<String> = self.columns.iter().zip(&self.units).map(|(c, u)| format!("{c}({u})")).collect();
        s.push_str(&header.join(","));
        s.push('\n');
        for row in &self.rows {
            for (i, v) in row.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{v:.16e}");
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self, prov: &Provenance) -> String {
        let rows: Vec<Vec<serde_json::Value>> = self
            .rows
            .iter()
            .map(|r| {
                r.iter().map(|&v| serde_json::Number::from_f64(v).map_or(serde_json::Value::Null, Into::into)).collect()
            })
            .collect();
        let doc = serde_json::json!({
            "provenance": { "config_hash": prov.config_hash, "seed": prov.seed, "version": prov.version },
            "columns": self.columns,
            "units": self.units,
            "rows": rows,
            "notes": self.notes,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

const ANALYTIC_COLUMNS: [(&str, &str); 9] = [
    ("t", "s"),
    ("X", "m"),
    ("P", "kg*m/s"),
    ("V", "m/s"),
    ("F", "N"),
    ("D", "m^2/s"),
    ("meanE", "J"),
    ("heisenberg_product", "J*s"),
    ("D_valid", "1"),
];

/// Observables of the configured analytic scenario at `t`.
pub fn analytic_observables(cfg: &Config, t: f64) -> Result<Observables> {
    let scenario = cfg.run.scenario.as_deref().ok_or_else(|| config("run.scenario", "missing"))?;
    let spec = cfg.particle()?;
    let env = cfg.environment()?;
    let k = cfg.kernel()?;
    let mut obs = Observables { t, x: None, p: None, v: None, f: None, d: None, mean_energy: None, d_valid: true };
    match scenario {
        "classical_inertial_free_msp" => {
            let init = cfg.initial()?;
            obs.p = Some(analytic::classical_inertial_free_msp(&spec, &init, &env, &k, t)?.sqrt());
            obs.f = Some(analytic::classical_inertial_free_force(&spec, &init, &env, &k, t)?);
        }
        "classical_inertial_free_rmsd" => obs = analytic::classical_inertial_free_rmsd(&spec, &env, &k, t)?,
        "classical_noninertial_free" => obs = analytic::classical_noninertial_free(&spec, &env, &k, t)?,
        "classical_noninertial_oscillator" => {
            obs = analytic::classical_noninertial_oscillator(&spec, &env, &k, t)?.observables
        }
        "quantum_fp_free" => {
            obs = analytic::quantum_fp_free(&spec, cfg.minimal_gaussian_a()?, &env, &k, t)?.observables
        }
        "quantum_fp_free_closed" => obs = analytic::quantum_fp_free_closed(spec.mass, &env, t)?,
        "quantum_langevin_free" => obs = analytic::quantum_langevin_free(&spec, &env, &k, t)?.observables,
        "quantum_smoluchowski_free" => {
            obs = analytic::quantum_smoluchowski_free(&spec, cfg.minimal_gaussian_a()?, &env, &k, t)?.observables
        }
        "quantum_smoluchowski_oscillator" => {
            obs = analytic::quantum_smoluchowski_oscillator(&spec, cfg.minimal_gaussian_a()?, &env, &k, t)?.observables
        }
        "anomalous_noninertial_free" | "anomalous_noninertial_oscillator" | "anomalous_config_inertial" => {
            let s = match scenario {
                "anomalous_noninertial_free" => AnomalousScenario::NonInertialFree,
                "anomalous_noninertial_oscillator" => AnomalousScenario::NonInertialOscillator,
                _ => AnomalousScenario::ConfigInertial,
            };
            obs.x = Some(analytic::anomalous_msd(s, &spec, &env, &k, t)?.sqrt());
        }
        "anomalous_momentum" => {
            obs.p = Some(analytic::anomalous_msd(AnomalousScenario::MomentumSpace, &spec, &env, &k, t)?.sqrt());
        }
        "quantum_anomalous_inertial" | "quantum_anomalous_noninertial" => {
            let s = if scenario.ends_with("noninertial") {
                AsymptoticScenario::NonInertial
            } else {
                AsymptoticScenario::Inertial
            };
            let (p2, x2) = analytic::quantum_anomalous_asymptotics(s, &spec, &env, &k, t)?;
            obs.p = Some(p2.sqrt());
            obs.x = Some(x2.sqrt());
        }
        s => return Err(config("run.scenario", format!("unknown analytic scenario `{s}`"))),
    }
    Ok(obs)
}

fn run_analytic(cfg: &Config) -> Result<ResultTable> {
    let mut table = ResultTable::new(&ANALYTIC_COLUMNS);
    for t in cfg.times()? {
        let o = analytic_observables(cfg, t)?;
        let hp = o.heisenberg_product();
        table.push(vec![
            t,
            opt(o.x),
            opt(o.p),
            opt(o.v),
            opt(o.f),
            opt(o.d),
            opt(o.mean_energy),
            opt(hp),
            flag(o.d_valid),
        ]);
    }
    Ok(table)
}

fn reference_or_nan(r: Result<f64>) -> Result<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::Unsupported(_)) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

fn run_simulate(cfg: &Config, seed: u64) -> Result<ResultTable> {
    let s = cfg.run.sde.as_ref().ok_or_else(|| config("run.sde", "missing"))?;
    let spec = cfg.particle()?;
    let env = cfg.environment()?;
    let k = cfg.kernel()?;
    let init = cfg.initial()?;
    let times = cfg.times()?;
    let sim = SimulationConfig {
        dt: s.dt,
        t_end: s.t_end,
        n_paths: s.n_paths,
        seed,
        record_times: times,
        override_stability: s.override_stability,
    };
    let inertial = match s.dynamics.as_deref().unwrap_or("inertial") {
        "inertial" => true,
        "noninertial" => false,
        d => return Err(config("run.sde.dynamics", format!("unknown dynamics `{d}`"))),
    };
    let stats = if inertial {
        sde::simulate_inertial(&spec, &env, &k, &init, &sim)?
    } else {
        sde::simulate_noninertial(&spec, &env, &k, &init, &sim)?
    };
    let fit = match s.fit_window {
        Some([lo, hi]) => Some(sde::estimate_msd_exponent(&stats, (lo, hi))?),
        None => None,
    };

    let mut cols: Vec<(&str, &str)> =
        vec![("t", "s"), ("mean_x", "m"), ("se_mean_x", "m"), ("m2_x", "m^2"), ("se_m2_x", "m^2")];
    if inertial {
        cols.extend([
            ("mean_p", "kg*m/s"),
            ("se_mean_p", "kg*m/s"),
            ("m2_p", "kg^2*m^2/s^2"),
            ("se_m2_p", "kg^2*m^2/s^2"),
            ("mean_px", "kg*m^2/s"),
            ("se_mean_px", "kg*m^2/s"),
            ("ref_m2_p", "kg^2*m^2/s^2"),
            ("z_m2_p", "1"),
        ]);
    }
    cols.extend([("ref_m2_x", "m^2"), ("z_m2_x", "1")]);
    if fit.is_some() {
        cols.extend([("lambda_hat", "1"), ("se_lambda_hat", "1")]);
    }
    let mut table = ResultTable::new(&cols);
    let z = |v: f64, r: f64, se: f64| (v - r) / se;
    for (i, &t) in stats.times.iter().enumerate() {
        let mut row = vec![t, stats.mean_x[i], stats.se_mean_x[i], stats.m2_x[i], stats.se_m2_x[i]];
        let ref_x2 = if inertial {
            let (rx, rp) = match spec.potential {
                Potential::Free => match analytic::inertial_free_moments(&spec, &init, &env, &k, crate::HBAR, t) {
                    Ok(m) => (m.x2, m.p2),
                    Err(Error::Unsupported(_)) => (f64::NAN, f64::NAN),
                    Err(e) => return Err(e),
                },
                Potential::Harmonic { .. } => (f64::NAN, f64::NAN),
            };
            row.extend([
                stats.mean_p[i],
                stats.se_mean_p[i],
                stats.m2_p[i],
                stats.se_m2_p[i],
                stats.mean_px[i],
                stats.se_mean_px[i],
                rp,
                z(stats.m2_p[i], rp, stats.se_m2_p[i]),
            ]);
            rx
        } else {
            reference_or_nan(analytic::noninertial_msd(&spec, &init, &env, &k, crate::HBAR, t))?
        };
        row.extend([ref_x2, z(stats.m2_x[i], ref_x2, stats.se_m2_x[i])]);
        if let Some(f) = fit {
            row.extend([f.lambda, f.se]);
        }
        table.push(row);
    }
    Ok(table)
}

fn run_pde(cfg: &Config) -> Result<ResultTable> {
    let p = cfg.run.pde.as_ref().ok_or_else(|| config("run.pde", "missing"))?;
    let spec = cfg.particle()?;
    let env = cfg.environment()?;
    let k = cfg.kernel()?;
    let times = cfg.times()?;
    let t_end = *times.last().expect("time grid is nonempty");
    let rayleigh = match p.equation.as_str() {
        "rayleigh" => true,
        "smoluchowski" => false,
        e => return Err(config("run.pde.equation", format!("unknown equation `{e}`"))),
    };
    let reference = |var0: f64, t: f64| {
        if rayleigh {
            fpe::rayleigh_reference(&spec, &env, &k, var0, t)
        } else {
            fpe::smoluchowski_reference(&spec, &env, &k, var0, t)
        }
    };
    let grid = match (p.y_min, p.y_max) {
        (Some(lo), Some(hi)) => at("run.pde", Grid1D::new(lo, hi, p.n_cells))?,
        (None, None) => {
            let var = reference(0.0, t_end).map_err(|e| match e {
                Error::Unsupported(m) => config("run.pde", format!("set y_min and y_max explicitly ({m})")),
                other => other,
            })?;
            at("run.pde", Grid1D::symmetric(var.sqrt(), p.n_cells))?
        }
        _ => return Err(config("run.pde", "give both y_min and y_max or neither")),
    };
    let var0 = fpe::initial_density(&grid).variance;
    let snaps = if rayleigh {
        fpe::solve_rayleigh(&spec, &env, &k, &grid, p.dt, t_end, &times)?
    } else {
        fpe::solve_smoluchowski(&spec, &env, &k, &grid, p.dt, t_end, &times)?
    };
    let u = if rayleigh { ("kg*m/s", "kg^2*m^2/s^2") } else { ("m", "m^2") };
    let mut table = ResultTable::new(&[
        ("t", "s"),
        ("norm", "1"),
        ("mean", u.0),
        ("variance", u.1),
        ("ref_variance", u.1),
        ("rel_error", "1"),
        ("clipped_mass", "1"),
    ]);
    for s in &snaps {
        let r = reference_or_nan(reference(var0, s.t))?;
        table.push(vec![s.t, s.norm, s.mean, s.variance, r, (s.variance - r) / r, s.clipped_mass]);
    }
    Ok(table)
}

fn rate_at(cfg: &Config, r: &RatesSection, t: f64) -> Result<RateResult> {
    let barrier = at("run.rates", BarrierSpec::new(r.omega_a, r.omega_b, r.delta_v))?;
    let spec = cfg.particle()?;
    let env = cfg.environment()?;
    let gamma = spec.gamma;
    match r.formula.as_str() {
        "classical" => rates::kramers_classical(&barrier, gamma, env.diffusion_energy()),
        "classical_nonmarkov" => {
            let Environment::ClassicalThermal { temperature } = env else {
                return Err(config("environment.kind", "classical_nonmarkov needs a `classical` environment"));
            };
            rates::kramers_classical_nonmarkov(&barrier, gamma, temperature, &cfg.kernel()?, t)
        }
        "quantum_inertial" => rates::kramers_quantum_inertial(&barrier, gamma, &env),
        "quantum_inertial_nonmarkov" => {
            rates::kramers_quantum_inertial_nonmarkov(&barrier, gamma, &env, &cfg.kernel()?, t)
        }
        "quantum_noninertial" => match (r.a_param, r.a_preset.as_deref()) {
            (Some(a), None) => rates::kramers_quantum_noninertial(&barrier, &spec, &env, a),
            (None, Some(p)) => {
                let preset = match p {
                    "zero" => APreset::Zero,
                    "half_mass_omega_b" => APreset::HalfMassOmegaB,
                    "half_mass_over_tc" => APreset::HalfMassOverTc(cfg.kernel.t_c),
                    other => return Err(config("run.rates.a_preset", format!("unknown preset `{other}`"))),
                };
                rates::kramers_quantum_noninertial_preset(&barrier, &spec, &env, preset)
            }
            _ => Err(config("run.rates", "quantum_noninertial needs exactly one of a_param and a_preset")),
        },
        f => Err(config("run.rates.formula", format!("unknown formula `{f}`"))),
    }
}

fn run_rates(cfg: &Config) -> Result<ResultTable> {
    let r = cfg.run.rates.as_ref().ok_or_else(|| config("run.rates", "missing"))?;
    let time_dependent = r.formula.ends_with("nonmarkov");
    let times = match (r.t, time_dependent) {
        (Some(t), _) => vec![t],
        (None, true) => cfg.times()?,
        (None, false) => vec![f64::NAN],
    };
    let mut table = ResultTable::new(&[("t", "s"), ("rate", "1/s"), ("valid", "1")]);
    for t in times {
        let res = at("run.rates", rate_at(cfg, r, if t.is_nan() { 0.0 } else { t }))?;
        if !table.notes.contains(&res.regime_note) {
            table.notes.push(res.regime_note.clone());
        }
        for v in res.validity.iter().filter(|v| !v.satisfied) {
            table.notes.push(format!("t = {t:e}: {} violated", v.condition));
        }
        table.push(vec![t, res.rate, flag(res.valid)]);
    }
    Ok(table)
}

/// Seed for the `index`-th sweep value (SplitMix64 finaliser).
pub fn derive_seed(base: u64, index: usize) -> u64 {
    let mut z = base.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn set_path(root: &mut toml::Value, path: &str, v: f64) -> Result<()> {
    let key = "run.sweep.parameter_path";
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let table = node.as_table_mut().ok_or_else(|| config(key, format!("`{path}` does not resolve")))?;
        let next = table.get_mut(*part).ok_or_else(|| config(key, format!("`{path}` does not resolve")))?;
        if i + 1 == parts.len() {
            *next = match next {
                toml::Value::Float(_) => toml::Value::Float(v),
                toml::Value::Integer(_) if v.fract() == 0.0 => toml::Value::Integer(v as i64),
                toml::Value::Integer(_) => return Err(config(key, format!("`{path}` is an integer key, got {v}"))),
                _ => return Err(config(key, format!("`{path}` is not numeric"))),
            };
            return Ok(());
        }
        node = next;
    }
    unreachable!("split yields at least one part")
}

fn run_sweep(
    root: &toml::Value,
    cfg: &Config,
    seed: u64,
    param: Option<&str>,
    values: Option<&[f64]>,
) -> Result<ResultTable> {
    let sweep = cfg.run.sweep.as_ref();
    let path = param
        .or(sweep.map(|s| s.parameter_path.as_str()))
        .ok_or_else(|| config("run.sweep.parameter_path", "missing"))?;
    let values = values.or(sweep.map(|s| s.values.as_slice())).ok_or_else(|| config("run.sweep.values", "missing"))?;
    if values.is_empty() {
        return Err(config("run.sweep.values", "empty list"));
    }
    let mode = Mode::parse(sweep.map_or("analytic", |s| s.mode.as_str()), "run.sweep.mode")?;
    if mode == Mode::Sweep {
        return Err(config("run.sweep.mode", "sweeps cannot nest"));
    }
    let mut out: Option<ResultTable> = None;
    for (i, &v) in values.iter().enumerate() {
        let mut doc = root.clone();
        set_path(&mut doc, path, v)?;
        let inner = config_from_value(doc)?;
        let t = execute(&inner, mode, derive_seed(seed, i))?;
        let dst = out.get_or_insert_with(|| {
            let mut cols = vec![("sweep_value".to_string(), "1".to_string())];
            cols.extend(t.columns.iter().cloned().zip(t.units.iter().cloned()));
            ResultTable {
                columns: cols.iter().map(|c| c.0.clone()).collect(),
                units: cols.iter().map(|c| c.1.clone()).collect(),
                rows: Vec::new(),
                notes: Vec::new(),
            }
        });
        if dst.columns.len() != t.columns.len() + 1 {
            return Err(config(path, "sweep values change the table layout"));
        }
        for row in t.rows {
            let mut r = vec![v];
            r.extend(row);
            dst.rows.push(r);
        }
        dst.notes.extend(t.notes.into_iter().map(|n| format!("{path} = {v}: {n}")));
    }
    Ok(out.expect("values is nonempty"))
}

/// Runs one non-sweep mode.
pub fn execute(cfg: &Config, mode: Mode, seed: u64) -> Result<ResultTable> {
    match mode {
        Mode::Analytic => run_analytic(cfg),
        Mode::Simulate => run_simulate(cfg, seed),
        Mode::Pde => run_pde(cfg),
        Mode::Rates => run_rates(cfg),
        Mode::Sweep => Err(config("run.mode", "use the sweep subcommand")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "qbrown", version, about = "Non-Markovian classical and quantum Brownian motion experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (TOML, SI units).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Overrides `run.sde.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for Monte Carlo paths.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form observables on the time grid.
    Moments,
    /// Monte Carlo ensemble with analytic references.
    Simulate,
    /// Fokker-Planck solve with analytic references.
    Pde,
    /// Kramers escape rates.
    Rates,
    /// Repeat a mode over values of one config key.
    Sweep {
        /// Dotted key, e.g. `kernel.t_c`; overrides `run.sweep.parameter_path`.
        #[arg(long)]
        parameter: Option<String>,
        /// Comma-separated values; overrides `run.sweep.values`.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
    },
}

/// Process exit status for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) => 2,
        Error::Unsupported(_) => 3,
        Error::Numerical(_) | Error::Estimation(_) => 4,
    }
}

fn run_cli(cli: &Cli) -> Result<String> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config("--config is required".into()))?;
    let bytes = std::fs::read(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Error::Config(format!("{}: not UTF-8", path.display())))?;
    let root: toml::Value = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let cfg = config_from_value(root.clone())?;
    let mode = match cli.command {
        Command::Moments => Mode::Analytic,
        Command::Simulate => Mode::Simulate,
        Command::Pde => Mode::Pde,
        Command::Rates => Mode::Rates,
        Command::Sweep { .. } => Mode::Sweep,
    };
    if let Some(m) = &cfg.run.mode {
        if Mode::parse(m, "run.mode")? != mode {
            return Err(config("run.mode", format!("`{m}` does not match the subcommand")));
        }
    }
    let seed = cli.seed.or(cfg.run.sde.as_ref().and_then(|s| s.seed)).unwrap_or(0);
    let table = match &cli.command {
        Command::Sweep { parameter, values } => run_sweep(&root, &cfg, seed, parameter.as_deref(), values.as_deref())?,
        _ => execute(&cfg, mode, seed)?,
    };
    let prov = Provenance::new(&bytes, seed);
    Ok(match cli.format {
        Format::Csv => table.to_csv(&prov),
        Format::Json => table.to_json(&prov),
    })
}

/// Entry point of the binary; returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let output = match run_cli(&cli) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, output) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return 1;
            }
        }
        None => print!("{output}"),
    }
    0
}
