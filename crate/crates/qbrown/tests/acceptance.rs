//! Acceptance criteria 1 to 13. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use qbrown::analytic::{self, InitialCondition, Observables, ParticleSpec};
use qbrown::environment::{closure, Environment};
use qbrown::fpe::{self, Grid1D};
use qbrown::rates::{self, APreset, BarrierSpec};
use qbrown::sde::{self, SimulationConfig};
use qbrown::{CorrelationKernel, HBAR, K_B};

type Outcome = Result<String, String>;

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp()).collect();
    v[0] = lo;
    v[n - 1] = hi;
    v
}

fn unit_free() -> ParticleSpec {
    ParticleSpec::free(1.0, 1.0).unwrap()
}

fn unit_env() -> Environment {
    Environment::non_thermal(1.0).unwrap()
}

fn kernel(lambda: f64) -> CorrelationKernel {
    CorrelationKernel::new(0.5, lambda).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn kernel_fidelity() -> Outcome {
    let mut worst: f64 = 0.0;
    for lambda in [0.0, 2.0, 3.0, 4.0] {
        let k = kernel(lambda);
        for t in logspace(1e-3, 1e2, 50) {
            let scale = t * k.intensity(t).unwrap();
            let q = quadrature::integrate(|s| k.intensity(s).unwrap(), 0.0, t, 1e-15 * scale).integral;
            worst = worst.max(rel(k.intensity_integral(t).unwrap(), q));
        }
    }
    check(worst < 1e-10, format!("max relative deviation {worst:.2e} (limit 1e-10)"))
}

fn z_scores(values: &[f64], refs: &[f64], se: &[f64]) -> f64 {
    values.iter().zip(refs).zip(se).map(|((v, r), s)| ((v - r) / s).abs()).fold(0.0, f64::max)
}

fn mc_inertial() -> Outcome {
    let (spec, env, k) = (unit_free(), unit_env(), kernel(0.0));
    let scale: f64 = 0.5f64.max(0.25);
    let times = logspace(0.1 * scale, 10.0 * scale, 10);
    let cfg = SimulationConfig::new(1e-3, 10.0 * scale, 10_000, 20240501, times);
    let start = Instant::now();
    let s = sde::simulate_inertial(&spec, &env, &k, &InitialCondition::SharpOrigin, &cfg).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let refs: Vec<f64> = s
        .times
        .iter()
        .map(|&t| analytic::classical_inertial_free_msp(&spec, &InitialCondition::SharpOrigin, &env, &k, t).unwrap())
        .collect();
    let z = z_scores(&s.m2_p, &refs, &s.se_m2_p);
    check(z <= 3.0 && secs < 60.0, format!("max |z| of <P^2> = {z:.2} (limit 3) in {secs:.1} s"))
}

fn mc_noninertial() -> Outcome {
    let env = unit_env();
    let k = kernel(0.0);
    let times = logspace(0.05, 5.0, 10);
    let cfg = SimulationConfig::new(1e-3, 5.0, 10_000, 7, times);
    let init = InitialCondition::SharpOrigin;
    let free = unit_free();
    let s = sde::simulate_noninertial(&free, &env, &k, &init, &cfg).unwrap();
    let refs: Vec<f64> =
        s.times.iter().map(|&t| analytic::noninertial_msd(&free, &init, &env, &k, HBAR, t).unwrap()).collect();
    let z_free = z_scores(&s.m2_x, &refs, &s.se_m2_x);
    let osc = ParticleSpec::harmonic(1.0, 1.0, 1.3).unwrap();
    let s = sde::simulate_noninertial(&osc, &env, &k, &init, &cfg).unwrap();
    let refs: Vec<f64> = s
        .times
        .iter()
        .map(|&t| 2.0 * analytic::classical_noninertial_oscillator(&osc, &env, &k, t).unwrap().g)
        .collect();
    let z_osc = z_scores(&s.m2_x, &refs, &s.se_m2_x);
    check(z_free <= 3.0 && z_osc <= 3.0, format!("max |z| free {z_free:.2}, oscillator {z_osc:.2} (limit 3)"))
}

fn rayleigh_error(n_cells: usize, t: f64) -> f64 {
    let (spec, env, k) = (unit_free(), unit_env(), kernel(0.0));
    let grid = Grid1D::symmetric(1.0, n_cells).unwrap();
    let var0 = fpe::initial_density(&grid).variance;
    let snap = fpe::solve_rayleigh(&spec, &env, &k, &grid, 0.01, t, &[t]).unwrap();
    let r = fpe::rayleigh_reference(&spec, &env, &k, var0, t).unwrap();
    (snap[0].variance - r) / r
}

fn pde_vs_analytic() -> Outcome {
    let (spec, env, k) = (unit_free(), unit_env(), kernel(0.0));
    let grid = Grid1D::symmetric(1.0, 2048).unwrap();
    let var0 = fpe::initial_density(&grid).variance;
    let times: Vec<f64> = (1..=40).map(|i| i as f64 * 0.05).collect();
    let snaps = fpe::solve_rayleigh(&spec, &env, &k, &grid, 0.05, 2.0, &times).unwrap();
    let last = snaps.last().unwrap();
    let reference = fpe::rayleigh_reference(&spec, &env, &k, var0, 2.0).unwrap();
    let err2 = rel(last.variance, reference);
    let mass = snaps.iter().map(|s| (s.norm - 1.0).abs()).fold(0.0, f64::max);

    let coarse = Grid1D::symmetric(1.0, 512).unwrap();
    let steady = fpe::solve_rayleigh(&spec, &env, &k, &coarse, 0.5, 12.0, &[12.0]).unwrap();
    let dy = coarse.dy();
    let l2 = steady[0]
        .values
        .iter()
        .zip(coarse.centers())
        .map(|(f, p)| (f - (-p * p / 2.0).exp() / (2.0 * PI).sqrt()).powi(2))
        .sum::<f64>()
        .mul_add(dy, 0.0)
        .sqrt();

    let ratio = rayleigh_error(256, 1.0) / rayleigh_error(512, 1.0);
    let ok = err2 < 0.01 && l2 < 1e-3 && mass < 1e-8 && (3.4..=4.6).contains(&ratio);
    check(
        ok,
        format!("<P^2>(2) rel err {err2:.2e}; steady L2 {l2:.2e}; |norm-1| {mass:.1e}; dy-halving ratio {ratio:.3}"),
    )
}

fn heisenberg() -> Outcome {
    let env = unit_env();
    let free = unit_free();
    let osc = ParticleSpec::harmonic(1.0, 1.0, 1.3).unwrap();
    let k = kernel(0.0);
    let a = 0.7;
    let half = 0.5;
    let times = logspace(1e-4, 1e2, 100);
    let mut worst: f64 = 0.0;
    for &t in &times {
        for o in [
            analytic::quantum_smoluchowski_free_with_hbar(&free, a, &env, &k, t, 1.0).unwrap().observables,
            analytic::quantum_smoluchowski_oscillator_with_hbar(&osc, a, &env, &k, t, 1.0).unwrap().observables,
        ] {
            worst = worst.max(rel(o.heisenberg_product().unwrap(), half));
        }
    }
    let langevin = |t: f64| analytic::quantum_langevin_free_with_hbar(&free, &env, &k, t, 1.0).unwrap().observables;
    let eq0 = rel(langevin(0.0).heisenberg_product().unwrap(), half);
    let (mut dip, mut t_dip) = (f64::INFINITY, 0.0);
    for &t in &times {
        let r = langevin(t).heisenberg_product().unwrap() / half - 1.0;
        if r < dip {
            (dip, t_dip) = (r, t);
        }
    }
    check(
        worst < 1e-12 && eq0 < 1e-15 && dip > 0.0,
        format!(
            "Smoluchowski max |XP/(hbar/2)-1| {worst:.1e}; Langevin equality at t=0 ({eq0:.1e}), \
             min XP/(hbar/2)-1 for t>0 is {dip:.2e} at t = {t_dip:.2e} (need > 0)"
        ),
    )
}

fn classical_limit() -> Outcome {
    let (spec, env, k) = (unit_free(), unit_env(), kernel(0.0));
    let t = 0.5;
    let q = analytic::quantum_smoluchowski_free_with_hbar(&spec, 1.0, &env, &k, t, 1e-6).unwrap();
    let c = analytic::classical_noninertial_free(&spec, &env, &k, t).unwrap();
    let d = rel(q.observables.x.unwrap(), c.x.unwrap());
    check(d < 1e-6, format!("relative X difference at t = t_c: {d:.2e} (limit 1e-6)"))
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (f(lo) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn zero_crossings() -> Outcome {
    let e = 4.1e-21;
    let env = Environment::non_thermal(e).unwrap();
    let m = 1e-15;
    let t_q = HBAR / (2.0 * e);
    let expected = t_q * LN_2;
    let f0 = bisect(|t| analytic::quantum_fp_free_closed(m, &env, t).unwrap().f.unwrap(), 0.1 * t_q, 3.0 * t_q);
    let v0 = bisect(|t| analytic::quantum_fp_free_closed(m, &env, t).unwrap().v.unwrap(), 0.1 * t_q, 3.0 * t_q);
    let lib = analytic::quantum_force_zero_time(&env).unwrap();
    let worst = rel(f0, expected).max(rel(v0, expected)).max(rel(lib, expected));
    check(worst < 1e-10, format!("F and V zeros at t_q ln2 to {worst:.1e} (limit 1e-10)"))
}

fn velocity_ratios() -> Outcome {
    let e = 4.1e-21;
    let env = Environment::non_thermal(e).unwrap();
    let m = 1e-15;
    let t_q = HBAR / (2.0 * e);
    let v = |t: f64| analytic::quantum_fp_free_closed(m, &env, t).unwrap().v.unwrap();
    let r10 = (v(10.0 * t_q) / v(0.0)).abs();
    let r1 = (v(t_q) / v(0.0)).abs();
    let ok = (3e-6..=3e-5).contains(&r10) && (0.2..=0.3).contains(&r1);
    check(ok, format!("|V(10 t_q)/V(0)| = {r10:.3e} (band [3e-6, 3e-5]); |V(t_q)/V(0)| = {r1:.4} (band [0.2, 0.3])"))
}

fn si_magnitudes() -> Outcome {
    let env = Environment::classical(300.0).unwrap();
    let spec = ParticleSpec::free(1e-3, 1e12).unwrap();
    let k = CorrelationKernel::normal(1e-12).unwrap();
    let f_nm = analytic::classical_inertial_free_force(&spec, &InitialCondition::SharpOrigin, &env, &k, 0.0).unwrap();
    let eq = InitialCondition::MomentumVariance { p2_0: 1e-3 * K_B * 300.0 };
    let f_m = analytic::classical_inertial_free_force(&spec, &eq, &env, &k, 0.0).unwrap();
    let d0 = analytic::quantum_fp_free_closed(1e-15, &env, 0.0).unwrap().d.unwrap();
    let ok = (0.5..=5.0).contains(&f_nm) && rel(f_m, -3.5) <= 0.2 && rel(d0, 5.27e-20) <= 0.01;
    check(ok, format!("F(0) = {f_nm:.3} N; Markovian F(0) = {f_m:.3} N; D(0) = {d0:.4e} m^2/s"))
}

fn anomalous_exponents() -> Outcome {
    let (spec, env) = (unit_free(), unit_env());
    let times = logspace(50.0, 5000.0, 25);
    let mut detail = Vec::new();
    let mut ok = true;
    for (i, lambda) in [2.0, 3.0, 4.0].into_iter().enumerate() {
        let cfg = SimulationConfig::new(0.025, 5000.0, 1000, 100 + i as u64, times.clone());
        let s = sde::simulate_noninertial(&spec, &env, &kernel(lambda), &InitialCondition::SharpOrigin, &cfg).unwrap();
        let fit = sde::estimate_msd_exponent(&s, (50.0, 5000.0)).unwrap();
        ok &= rel(fit.lambda, lambda) <= 0.05;
        detail.push(format!("{lambda} -> {:.3}", fit.lambda));
    }
    check(ok, format!("fitted exponents {} (limit 5%)", detail.join(", ")))
}

fn rate_identities() -> Outcome {
    let mut worst_a0: f64 = 0.0;
    let mut worst_half: f64 = 0.0;
    let spec = ParticleSpec::free(1e-26, 1e12).unwrap();
    for i in 0..100 {
        let x = i as f64 / 99.0;
        let wb = 1e12 * (1.0 + 9.0 * x);
        let e = HBAR * wb * (0.05 + 0.85 * (1.0 - x));
        let b = BarrierSpec::new(2e12, wb, e * (0.5 + 4.0 * x)).unwrap();
        let env = Environment::non_thermal(e).unwrap();
        let general = rates::kramers_quantum_noninertial(&b, &spec, &env, 0.0).unwrap().rate;
        worst_a0 = worst_a0.max(rel(general, rates::noninertial_rate_a_zero(&b, &env).unwrap()));
        let general = rates::kramers_quantum_noninertial_preset(&b, &spec, &env, APreset::HalfMassOmegaB).unwrap().rate;
        worst_half = worst_half.max(rel(general, rates::noninertial_rate_half_mass_omega_b(&b, &env).unwrap()));
    }
    let t = 300.0;
    let b = BarrierSpec::new(2e12, 3e12, 2.0 * K_B * t).unwrap();
    let classical = rates::kramers_classical(&b, 1e12, K_B * t).unwrap().rate;
    let quantum = rates::kramers_quantum_inertial(&b, 1e12, &Environment::classical(t).unwrap()).unwrap().rate;
    let bridge = classical.to_bits() == quantum.to_bits();
    let g0 =
        rates::kramers_classical_nonmarkov(&b, 1e12, t, &CorrelationKernel::normal(1e-13).unwrap(), 0.0).unwrap().rate;
    let start = rel(g0, 2e12 / (2.0 * PI) * (-2.0f64).exp());
    let ok = worst_a0 <= 1e-14 && worst_half <= 1e-14 && bridge && start <= 1e-15;
    check(
        ok,
        format!("a=0 {worst_a0:.1e}, a=m*omega_b/2 {worst_half:.1e}; quantum==classical bitwise: {bridge}; Gamma(0) {start:.1e}"),
    )
}

fn description_consistency() -> Outcome {
    let env = Environment::oscillator_bath(2e13, 50.0).unwrap();
    let e = env.diffusion_energy();
    let spec = ParticleSpec::free(1e-26, 1e12).unwrap();
    let k = CorrelationKernel::normal(1e-13).unwrap();
    let a = HBAR / (2.0 * e);
    let mut worst: f64 = 0.0;
    for t in logspace(1e-16, 1e-10, 50) {
        let fp = analytic::quantum_fp_free(&spec, a, &env, &k, t).unwrap().state.sigma_p;
        let lv = analytic::quantum_langevin_free(&spec, &env, &k, t).unwrap().state.sigma_p;
        worst = worst.max(rel(fp, lv));
    }
    let _ = closure;
    check(worst < 1e-12, format!("max relative sigma_p difference {worst:.1e} (limit 1e-12)"))
}

fn fd_check(f: &dyn Fn(f64) -> Observables, times: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for &t in times {
        let h = 1e-5 * t;
        let (lo, mid, hi) = (f(t - h), f(t), f(t + h));
        if let (Some(v), Some(a), Some(b)) = (mid.v, lo.x, hi.x) {
            worst = worst.max(rel((b - a) / (2.0 * h), v));
        }
        if let (Some(force), Some(a), Some(b)) = (mid.f, lo.p, hi.p) {
            worst = worst.max(rel((b - a) / (2.0 * h), force));
        }
    }
    worst
}

type Scenario<'a> = Box<dyn Fn(f64) -> Observables + 'a>;

fn derivative_oracles() -> Outcome {
    let (free, env, k) = (unit_free(), unit_env(), kernel(0.0));
    let osc = ParticleSpec::harmonic(1.0, 1.0, 1.3).unwrap();
    let times = logspace(0.05, 5.0, 20);
    let msp = |init: InitialCondition| {
        move |t: f64| {
            let mut o = analytic::classical_noninertial_free(&free, &env, &k, t).unwrap();
            o.x = None;
            o.p = Some(analytic::classical_inertial_free_msp(&free, &init, &env, &k, t).unwrap().sqrt());
            o.f = Some(analytic::classical_inertial_free_force(&free, &init, &env, &k, t).unwrap());
            o
        }
    };
    let closure_e = 1.0;
    let scenarios: Vec<(&str, Scenario)> = vec![
        ("inertial msp sharp", Box::new(msp(InitialCondition::SharpOrigin))),
        ("inertial msp p2_0", Box::new(msp(InitialCondition::MomentumVariance { p2_0: 0.3 }))),
        ("inertial rmsd", Box::new(|t| analytic::classical_inertial_free_rmsd(&free, &env, &k, t).unwrap())),
        ("non-inertial free", Box::new(|t| analytic::classical_noninertial_free(&free, &env, &k, t).unwrap())),
        (
            "non-inertial oscillator",
            Box::new(|t| analytic::classical_noninertial_oscillator(&osc, &env, &k, t).unwrap().observables),
        ),
        (
            "quantum FP free",
            Box::new(|t| analytic::quantum_fp_free_with_hbar(&free, 0.3, &env, &k, t, 1.0).unwrap().observables),
        ),
        (
            "quantum FP closed",
            Box::new(move |t| {
                analytic::quantum_fp_free_closed_with_hbar(1.0, &Environment::non_thermal(closure_e).unwrap(), t, 1.0)
                    .unwrap()
            }),
        ),
        (
            "quantum Langevin free",
            Box::new(|t| analytic::quantum_langevin_free_with_hbar(&free, &env, &k, t, 1.0).unwrap().observables),
        ),
        (
            "quantum Smoluchowski free",
            Box::new(|t| {
                analytic::quantum_smoluchowski_free_with_hbar(&free, 0.7, &env, &k, t, 1.0).unwrap().observables
            }),
        ),
        (
            "quantum Smoluchowski oscillator",
            Box::new(|t| {
                analytic::quantum_smoluchowski_oscillator_with_hbar(&osc, 0.7, &env, &k, t, 1.0).unwrap().observables
            }),
        ),
    ];
    let mut worst: f64 = 0.0;
    let mut name = "";
    for (n, f) in &scenarios {
        let w = fd_check(f.as_ref(), &times);
        if w > worst {
            worst = w;
            name = n;
        }
    }
    check(
        worst < 1e-6,
        format!("{} scenarios, max relative deviation {worst:.1e} ({name}) (limit 1e-6)", scenarios.len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 13] = [
        ("kernel fidelity", kernel_fidelity),
        ("MC vs analytic, inertial", mc_inertial),
        ("MC vs analytic, non-inertial", mc_noninertial),
        ("PDE vs analytic", pde_vs_analytic),
        ("Heisenberg exactness", heisenberg),
        ("classical limit", classical_limit),
        ("quantum zero crossings", zero_crossings),
        ("velocity ratio check", velocity_ratios),
        ("SI magnitudes", si_magnitudes),
        ("anomalous exponents", anomalous_exponents),
        ("rate identities", rate_identities),
        ("description consistency", description_consistency),
        ("derivative oracles", derivative_oracles),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {tag} {name}: {detail} [{:.1} s]", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
