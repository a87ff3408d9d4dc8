"""Independent reference values for the Rust test suite.

Every moment is obtained by quadrature of the stochastic integral that
defines it, never from the closed forms used in the library.
Run: python3 tools/oracles.py
"""
import mpmath as mp

mp.mp.dps = 40

HBAR = mp.mpf("1.054571817e-34")
KB = mp.mpf("1.380649e-23")


def intensity(t, tc, lam):
    x = t / tc
    v = 1 - mp.e ** (-x)
    if lam != 0:
        v += lam * x ** (lam - 1)
    return v


def msp(t, m, g, E, tc, lam, p20):
    """<P^2> for dP = -2g P dt + sqrt(4 g m E I) dW."""
    b2 = 4 * g * m * E
    noise = mp.quad(lambda s: mp.e ** (-4 * g * (t - s)) * intensity(s, tc, lam), [0, t])
    return p20 * mp.e ** (-4 * g * t) + b2 * noise


def msd_inertial(t, m, g, E, tc, lam, p20):
    """<X^2> for the free inertial particle with X(0) = 0."""
    det = p20 * (1 - mp.e ** (-2 * g * t)) ** 2 / (4 * g**2 * m**2)
    noise = mp.quad(lambda s: (1 - mp.e ** (-2 * g * (t - s))) ** 2 * intensity(s, tc, lam), [0, t])
    return det + E / (g * m) * noise


def xp_inertial(t, m, g, E, tc, lam, p20):
    det = p20 * (1 - mp.e ** (-2 * g * t)) * mp.e ** (-2 * g * t) / (2 * g * m)
    noise = mp.quad(
        lambda s: 2 * (1 - mp.e ** (-2 * g * (t - s))) * 2 * g * mp.e ** (-2 * g * (t - s)) * intensity(s, tc, lam),
        [0, t],
    )
    return det + (m / 2) * E / (g * m) * noise


def msd_overdamped_osc(t, m, g, E, tc, lam, omega, x20=0):
    r = 2 * omega**2 / g
    noise = mp.quad(lambda s: mp.e ** (-r * (t - s)) * intensity(s, tc, lam), [0, t])
    return x20 * mp.e ** (-r * t) + 2 * E / (g * m) * noise


def show(name, v):
    print(f"{name} = {mp.nstr(v, 17)}")


def kernel_values():
    show("I(lam=0, t=tc)", intensity(mp.mpf(1), 1, 0))
    show("I(lam=2, t=tc)", intensity(mp.mpf(1), 1, 2))
    show("I(lam=2, alpha=10)", intensity(mp.mpf(10), 1, 2))
    show("J(lam=0, t=tc)/tc", mp.quad(lambda s: intensity(s, 1, 0), [0, 1]))
    show("J(lam=0, t=3.7, tc=1)", mp.quad(lambda s: intensity(s, 1, 0), [0, 3.7]))


def environment_values():
    m_e = mp.mpf("9.109e-31")
    n = mp.mpf("8.5e28")
    eps_f = HBAR**2 / (2 * m_e) * (6 * mp.pi**2 / 2) ** (mp.mpf(2) / 3) * n ** (mp.mpf(2) / 3)
    show("eps_F copper (J)", eps_f)
    show("T_F copper (K)", eps_f / KB)
    m_he = mp.mpf("6.65e-27")
    n_he = mp.mpf("2.2e28")
    show("T_BE He4 (K)", 2 * mp.pi * HBAR**2 / (m_he * KB) * (n_he / mp.mpf("2.612")) ** (mp.mpf(2) / 3))
    E = mp.mpf("1e-21")
    show("closure gamma (1/s)", E / HBAR)
    show("closure t_c (s)", HBAR / (2 * E))
    show("b(beta=2e12, m=1e-3, E=kB*300)", mp.sqrt(2 * mp.mpf("2e12") * mp.mpf("1e-3") * KB * 300))


def moment_values():
    m, g, E, tc = mp.mpf(1), mp.mpf(1), mp.mpf(1), mp.mpf("0.5")
    for t in ["0.05", "0.3", "1.7", "6"]:
        t = mp.mpf(t)
        show(f"msp p20=0 t={t}", msp(t, m, g, E, tc, 0, 0))
        show(f"msp p20=0.3 t={t}", msp(t, m, g, E, tc, 0, mp.mpf("0.3")))
        show(f"msd inertial p20=mE t={t}", msd_inertial(t, m, g, E, tc, 0, m * E))
        show(f"xp inertial p20=mE t={t}", xp_inertial(t, m, g, E, tc, 0, m * E))
        show(f"msd overdamped osc omega=1.3 t={t}", msd_overdamped_osc(t, m, g, E, tc, 0, mp.mpf("1.3")))
        for lam in [2, 3, 4]:
            show(f"msp lam={lam} t={t}", msp(t, m, g, E, tc, lam, 0))
            show(f"msd inertial lam={lam} t={t}", msd_inertial(t, m, g, E, tc, lam, m * E))
            show(f"msd overdamped osc lam={lam} t={t}", msd_overdamped_osc(t, m, g, E, tc, lam, mp.mpf("1.3")))
    # quantum Smoluchowski oscillator: B = 2<X^2> with <X^2(0)> = a hbar / 2m, hbar = 1
    a, hb, omega = mp.mpf("0.7"), mp.mpf(1), mp.mpf("1.3")
    for t in ["0.05", "0.3", "1.7", "6"]:
        t = mp.mpf(t)
        show(f"B smol osc t={t}", 2 * msd_overdamped_osc(t, m, g, E, tc, 0, omega, a * hb / (2 * m)))


def nonmarkov_rate():
    # omega_a = 2, omega_b = 3, gamma = 0.5, dV/kT = 1.5, t = t_c = 0.8
    wa, wb, g, t = mp.mpf(2), mp.mpf(3), mp.mpf("0.5"), mp.mpf("0.8")
    s = mp.sqrt(g**2 + wb**2)
    i1 = 1 - mp.e ** (-1)
    show("Gamma(t=t_c)", mp.e ** (2 * g * t) * wa / (2 * mp.pi) * mp.sqrt((g + s) / (2 * g * i1 + g + s)) * mp.e ** (-1.5))


def quantum_closed_ratios():
    def vel(x):
        u = mp.e ** (-x)
        return u * (2 * u - 1) / (1 + 2 * u * (u - 1)) ** mp.mpf(1.5)

    def force(x):
        u = mp.e ** (-x)
        return u * (2 * u - 1) / mp.sqrt(1 + 2 * u * (u - 1))

    show("V(t_q)/V(0)", vel(1) / vel(0))
    show("V(10 t_q)/V(0)", vel(10) / vel(0))
    show("F(t_q)/F(0)", force(1) / force(0))


def damped_oscillator():
    # m x'' = -k x - 2 gamma p, m = 1, gamma = 0.5, omega = 1.5, x0 = 1, p0 = 0
    g, w = mp.mpf("0.5"), mp.mpf("1.5")
    f = mp.odefun(lambda t, y: [y[1], -(w**2) * y[0] - 2 * g * y[1]], 0, [mp.mpf(1), mp.mpf(0)])
    y = f(mp.mpf(2))
    show("damped oscillator x(2)", y[0])
    show("damped oscillator p(2)", y[1])


if __name__ == "__main__":
    kernel_values()
    environment_values()
    moment_values()
    nonmarkov_rate()
    quantum_closed_ratios()
    damped_oscillator()
