use std::collections::HashMap;

use pyo3::exceptions::{PyArithmeticError, PyNotImplementedError, PyValueError};
use pyo3::prelude::*;

use ::qbrown as core;
use core::analytic::{self, Observables};
use core::sde::{EnsembleStats, SimulationConfig};

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::Unsupported(m) => PyNotImplementedError::new_err(m),
        core::Error::Numerical(m) | core::Error::Estimation(m) => PyArithmeticError::new_err(m),
        core::Error::Domain(m) | core::Error::Config(m) => PyValueError::new_err(m),
    }
}

type Dict = HashMap<&'static str, Option<f64>>;

fn observables(o: Observables) -> Dict {
    HashMap::from([
        ("t", Some(o.t)),
        ("x", o.x),
        ("p", o.p),
        ("v", o.v),
        ("f", o.f),
        ("d", o.d),
        ("mean_energy", o.mean_energy),
        ("d_valid", Some(if o.d_valid { 1.0 } else { 0.0 })),
    ])
}

#[pyclass(name = "CorrelationKernel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Kernel(core::CorrelationKernel);

#[pymethods]
impl Kernel {
    #[new]
    #[pyo3(signature = (t_c, lambda_ = 0.0))]
    fn new(t_c: f64, lambda_: f64) -> PyResult<Self> {
        core::CorrelationKernel::new(t_c, lambda_).map(Self).map_err(err)
    }

    #[getter]
    fn t_c(&self) -> f64 {
        self.0.t_c()
    }

    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda()
    }

    fn intensity(&self, t: f64) -> PyResult<f64> {
        self.0.intensity(t).map_err(err)
    }

    fn intensity_integral(&self, t: f64) -> PyResult<f64> {
        self.0.intensity_integral(t).map_err(err)
    }
}

#[pyclass(name = "Environment", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Env(core::Environment);

#[pymethods]
impl Env {
    #[staticmethod]
    fn non_thermal(energy: f64) -> PyResult<Self> {
        core::Environment::non_thermal(energy).map(Self).map_err(err)
    }

    #[staticmethod]
    fn classical(temperature: f64) -> PyResult<Self> {
        core::Environment::classical(temperature).map(Self).map_err(err)
    }

    #[staticmethod]
    fn oscillator_bath(omega: f64, temperature: f64) -> PyResult<Self> {
        core::Environment::oscillator_bath(omega, temperature).map(Self).map_err(err)
    }

    #[staticmethod]
    fn fermi_bath(fermi_temperature: f64, temperature: f64) -> PyResult<Self> {
        core::Environment::fermi_bath(fermi_temperature, temperature).map(Self).map_err(err)
    }

    #[staticmethod]
    fn bose_bath(bose_temperature: f64, temperature: f64) -> PyResult<Self> {
        core::Environment::bose_bath(bose_temperature, temperature).map(Self).map_err(err)
    }

    fn diffusion_energy(&self) -> f64 {
        self.0.diffusion_energy()
    }
}

#[pyclass(name = "ParticleSpec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Particle(core::ParticleSpec);

#[pymethods]
impl Particle {
    #[new]
    #[pyo3(signature = (mass, gamma, omega = None))]
    fn new(mass: f64, gamma: f64, omega: Option<f64>) -> PyResult<Self> {
        match omega {
            None => core::ParticleSpec::free(mass, gamma),
            Some(w) => core::ParticleSpec::harmonic(mass, gamma, w),
        }
        .map(Self)
        .map_err(err)
    }

    #[getter]
    fn mass(&self) -> f64 {
        self.0.mass
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma
    }
}

fn initial(p2_0: Option<f64>, a: Option<f64>) -> PyResult<core::InitialCondition> {
    match (p2_0, a) {
        (None, None) => Ok(core::InitialCondition::SharpOrigin),
        (Some(p2_0), None) => Ok(core::InitialCondition::MomentumVariance { p2_0 }),
        (None, Some(a)) => Ok(core::InitialCondition::MinimalGaussian { a }),
        _ => Err(PyValueError::new_err("give at most one of p2_0 and a")),
    }
}

#[pyfunction]
fn classical_noninertial_free(spec: &Particle, env: &Env, kernel: &Kernel, t: f64) -> PyResult<Dict> {
    analytic::classical_noninertial_free(&spec.0, &env.0, &kernel.0, t).map(observables).map_err(err)
}

#[pyfunction]
fn classical_inertial_free_rmsd(spec: &Particle, env: &Env, kernel: &Kernel, t: f64) -> PyResult<Dict> {
    analytic::classical_inertial_free_rmsd(&spec.0, &env.0, &kernel.0, t).map(observables).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (spec, env, kernel, t, p2_0 = None))]
fn classical_inertial_free_msp(
    spec: &Particle,
    env: &Env,
    kernel: &Kernel,
    t: f64,
    p2_0: Option<f64>,
) -> PyResult<f64> {
    analytic::classical_inertial_free_msp(&spec.0, &initial(p2_0, None)?, &env.0, &kernel.0, t).map_err(err)
}

#[pyfunction]
fn quantum_fp_free(spec: &Particle, a: f64, env: &Env, kernel: &Kernel, t: f64) -> PyResult<Dict> {
    analytic::quantum_fp_free(&spec.0, a, &env.0, &kernel.0, t).map(|r| observables(r.observables)).map_err(err)
}

#[pyfunction]
fn quantum_langevin_free(spec: &Particle, env: &Env, kernel: &Kernel, t: f64) -> PyResult<Dict> {
    analytic::quantum_langevin_free(&spec.0, &env.0, &kernel.0, t).map(|r| observables(r.observables)).map_err(err)
}

#[pyfunction]
fn quantum_smoluchowski_free(spec: &Particle, a: f64, env: &Env, kernel: &Kernel, t: f64) -> PyResult<Dict> {
    analytic::quantum_smoluchowski_free(&spec.0, a, &env.0, &kernel.0, t)
        .map(|r| observables(r.observables))
        .map_err(err)
}

#[pyfunction]
fn quantum_smoluchowski_oscillator(spec: &Particle, a: f64, env: &Env, kernel: &Kernel, t: f64) -> PyResult<Dict> {
    analytic::quantum_smoluchowski_oscillator(&spec.0, a, &env.0, &kernel.0, t)
        .map(|r| observables(r.observables))
        .map_err(err)
}

fn stats(s: EnsembleStats) -> HashMap<&'static str, Vec<f64>> {
    HashMap::from([
        ("times", s.times),
        ("mean_x", s.mean_x),
        ("mean_p", s.mean_p),
        ("m2_x", s.m2_x),
        ("m2_p", s.m2_p),
        ("mean_px", s.mean_px),
        ("se_m2_x", s.se_m2_x),
        ("se_m2_p", s.se_m2_p),
    ])
}

#[pyfunction]
#[pyo3(signature = (spec, env, kernel, dt, t_end, n_paths, seed, record_times, inertial = true, p2_0 = None))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    spec: &Particle,
    env: &Env,
    kernel: &Kernel,
    dt: f64,
    t_end: f64,
    n_paths: usize,
    seed: u64,
    record_times: Vec<f64>,
    inertial: bool,
    p2_0: Option<f64>,
) -> PyResult<HashMap<&'static str, Vec<f64>>> {
    let init = initial(p2_0, None)?;
    let cfg = SimulationConfig::new(dt, t_end, n_paths, seed, record_times);
    let (s, e, k) = (spec.0, env.0, kernel.0);
    let out = py.detach(move || {
        if inertial {
            core::sde::simulate_inertial(&s, &e, &k, &init, &cfg)
        } else {
            core::sde::simulate_noninertial(&s, &e, &k, &init, &cfg)
        }
    });
    out.map(stats).map_err(err)
}

#[pyfunction]
fn kramers_classical(omega_a: f64, omega_b: f64, delta_v: f64, gamma: f64, energy: f64) -> PyResult<f64> {
    let b = core::rates::BarrierSpec::new(omega_a, omega_b, delta_v).map_err(err)?;
    core::rates::kramers_classical(&b, gamma, energy).map(|r| r.rate).map_err(err)
}

#[pyfunction]
fn closure(energy: f64) -> PyResult<(f64, f64, f64)> {
    core::environment::closure(energy).map(|c| (c.a, c.gamma, c.t_c)).map_err(err)
}

#[pymodule]
fn qbrown(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("HBAR", core::HBAR)?;
    m.add("K_B", core::K_B)?;
    m.add_class::<Kernel>()?;
    m.add_class::<Env>()?;
    m.add_class::<Particle>()?;
    m.add_function(wrap_pyfunction!(classical_noninertial_free, m)?)?;
    m.add_function(wrap_pyfunction!(classical_inertial_free_rmsd, m)?)?;
    m.add_function(wrap_pyfunction!(classical_inertial_free_msp, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_fp_free, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_langevin_free, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_smoluchowski_free, m)?)?;
    m.add_function(wrap_pyfunction!(quantum_smoluchowski_oscillator, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(kramers_classical, m)?)?;
    m.add_function(wrap_pyfunction!(closure, m)?)?;
    Ok(())
}
