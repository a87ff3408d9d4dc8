#![allow(clippy::excessive_precision)]

use qbrown::analytic::{self, InitialCondition, ParticleSpec};
use qbrown::environment::{self, Environment};
use qbrown::{CorrelationKernel, HBAR, K_B};

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn reference_constants() {
    let eps_f = environment::fermi_temperature(8.5e28, 2, 9.109e-31).unwrap() * K_B;
    assert!(rel(eps_f, 1.1294792092105524e-18) < 1e-12);
    let t_be = environment::bose_einstein_temperature(2.2e28, 1, 6.65e-27).unwrap();
    assert!(rel(t_be, 3.1506024094861798) < 1e-12);
    let c = environment::closure(1e-21).unwrap();
    assert!(rel(c.gamma, 9482521568277.4121) < 1e-14);
    assert!(rel(c.t_c, 5.272859085e-14) < 1e-14);
    assert_eq!(c.a, c.t_c);
    let b = environment::fluctuation_strength(2e12, 1e-3, K_B * 300.0).unwrap();
    assert!(rel(b, 4.0703547756921632e-6) < 1e-14);
}

#[test]
fn kernel_reference_values() {
    let k = CorrelationKernel::normal(1.0).unwrap();
    assert!(rel(k.intensity(1.0).unwrap(), 0.63212055882855768) < 1e-15);
    assert!(rel(k.intensity_integral(1.0).unwrap(), 0.36787944117144232) < 1e-14);
    let k = CorrelationKernel::new(1.0, 2.0).unwrap();
    assert!(rel(k.intensity(1.0).unwrap(), 2.6321205588285577) < 1e-15);
    assert!(rel(k.intensity(10.0).unwrap(), 20.999954600070238) < 1e-15);
}

#[test]
fn thermal_steady_states() {
    let temp = 300.0;
    let env = Environment::classical(temp).unwrap();
    let k = CorrelationKernel::normal(1e-12).unwrap();
    let free = ParticleSpec::free(1e-25, 1e11).unwrap();
    let msp = analytic::classical_inertial_free_msp(&free, &InitialCondition::SharpOrigin, &env, &k, 1e-8).unwrap();
    assert!(rel(msp, 1e-25 * K_B * temp) < 1e-12);
    let osc = ParticleSpec::harmonic(1e-25, 1e11, 1e6).unwrap();
    let o = analytic::classical_noninertial_oscillator(&osc, &env, &k, 10.0).unwrap().observables;
    assert!(rel(o.mean_energy.unwrap(), K_B * temp / 2.0) < 1e-12);
}

#[test]
fn quantum_smoluchowski_tends_to_classical() {
    let env = Environment::non_thermal(1.0).unwrap();
    let k = CorrelationKernel::normal(0.5).unwrap();
    let spec = ParticleSpec::free(1.0, 1.0).unwrap();
    let eps = 1e-6;
    for t in [0.1, 0.5, 2.0, 8.0] {
        let q = analytic::quantum_smoluchowski_free_with_hbar(&spec, 0.3, &env, &k, t, eps).unwrap().observables;
        let c = analytic::classical_noninertial_free(&spec, &env, &k, t).unwrap();
        assert!(rel(q.x.unwrap(), c.x.unwrap()) < 1e-5, "t = {t}");
    }
}

#[test]
fn diffusion_is_displacement_times_velocity() {
    let env = Environment::oscillator_bath(1e13, 10.0).unwrap();
    let k = CorrelationKernel::normal(1e-13).unwrap();
    let spec = ParticleSpec::free(1e-26, 1e12).unwrap();
    for t in [1e-14, 1e-13, 1e-12, 1e-11] {
        for o in [
            analytic::classical_noninertial_free(&spec, &env, &k, t).unwrap(),
            analytic::classical_inertial_free_rmsd(&spec, &env, &k, t).unwrap(),
            analytic::quantum_langevin_free(&spec, &env, &k, t).unwrap().observables,
            analytic::quantum_smoluchowski_free(&spec, 1e-14, &env, &k, t).unwrap().observables,
        ] {
            let (x, v, d) = (o.x.unwrap(), o.v.unwrap(), o.d.unwrap());
            assert!((x * v - d).abs() <= 1e-12 * d.abs(), "t = {t}");
        }
    }
}

#[test]
fn fokker_planck_and_langevin_momenta_agree() {
    let env = Environment::oscillator_bath(1e13, 10.0).unwrap();
    let k = CorrelationKernel::normal(1e-13).unwrap();
    let spec = ParticleSpec::free(1e-26, 1e12).unwrap();
    let a = HBAR / (2.0 * env.diffusion_energy());
    for i in 0..50 {
        let t = 1e-15 * 10f64.powf(i as f64 / 10.0);
        let fp = analytic::quantum_fp_free(&spec, a, &env, &k, t).unwrap().state.sigma_p;
        let lv = analytic::quantum_langevin_free(&spec, &env, &k, t).unwrap().state.sigma_p;
        assert!(rel(fp, lv) < 1e-12, "t = {t}");
    }
}

#[test]
fn markovian_limit_of_short_correlation() {
    let env = Environment::non_thermal(1.0).unwrap();
    let spec = ParticleSpec::free(1.0, 1.0).unwrap();
    let init = InitialCondition::MomentumVariance { p2_0: 0.3 };
    let k = CorrelationKernel::normal(1e-9).unwrap();
    let t = 0.8;
    let msp = analytic::classical_inertial_free_msp(&spec, &init, &env, &k, t).unwrap();
    let markov = 0.3 * (-4.0 * t).exp() + (1.0 - (-4.0 * t).exp());
    assert!(rel(msp, markov) < 1e-8);
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(CorrelationKernel::new(1.0, 0.5).is_err());
    assert!(CorrelationKernel::normal(0.0).is_err());
    assert!(ParticleSpec::free(0.0, 1.0).is_err());
    assert!(ParticleSpec::harmonic(1.0, 1.0, 0.0).is_err());
    let spec = ParticleSpec::free(1.0, 1.0).unwrap();
    let env = Environment::non_thermal(1.0).unwrap();
    let k = CorrelationKernel::normal(1.0).unwrap();
    assert!(analytic::classical_noninertial_free(&spec, &env, &k, -1.0).is_err());
}
