//! Cancellation-free building blocks shared by the closed forms.

/// `(1 - e^{-y}) / y`, continuous at `y = 0`.
pub(crate) fn exprel(y: f64) -> f64 {
    if y.abs() < 1e-6 {
        1.0 - y / 2.0 + y * y / 6.0
    } else {
        -(-y).exp_m1() / y
    }
}

/// `(e^{-p t} - e^{-q t}) / (q - p)`, symmetric in `p` and `q` and continuous
/// across `p = q`, where it equals `t e^{-p t}`.
pub(crate) fn expdiff(p: f64, q: f64, t: f64) -> f64 {
    let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
    t * (-lo * t).exp() * exprel((hi - lo) * t)
}

/// Time derivative of [`expdiff`]: `e^{-p t} - q·expdiff(p, q, t)`.
pub(crate) fn expdiff_dt(p: f64, q: f64, t: f64) -> f64 {
    (-p * t).exp() - q * expdiff(p, q, t)
}

/// `x - 1 + e^{-x}` without cancellation at small `x`.
pub(crate) fn phi2(x: f64) -> f64 {
    if x.abs() < 0.1 {
        let mut term = x * x / 2.0;
        let mut sum = term;
        for k in 3..20 {
            term *= -x / k as f64;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        x + (-x).exp_m1()
    }
}

/// `(1/τ) ∫₀ᵗ sⁿ e^{-(t-s)/τ} ds` for integer `n ≥ 0`.
pub(crate) fn exp_moment(n: u32, t: f64, tau: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let x = t / tau;
    let nf = factorial(n);
    if x < 2.0 {
        // (t^{n+1}/τ) Σ_j (-x)^j n!/(n+j+1)!
        let mut term = 1.0 / (n + 1) as f64;
        let mut sum = term;
        for j in 1..200 {
            term *= -x / (n + j + 1) as f64;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        t.powi(n as i32) * x * sum
    } else {
        let mut sum = 0.0;
        for k in 0..=n {
            let sign = if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
            sum += sign * nf / factorial(k) * tau.powi((n - k) as i32) * t.powi(k as i32);
        }
        let sign = if n.is_multiple_of(2) { -1.0 } else { 1.0 };
        sum + sign * nf * tau.powi(n as i32) * (-x).exp()
    }
}

/// `∫₀ᵗ (1 - e^{-c u})² (t - u)ⁿ du` for integer `n ≥ 0`.
pub(crate) fn damped_square_moment(n: u32, c: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let y = c * t;
    if y < 1.0 {
        // Σ_{k≥2} (-1)^k (2^k - 2) c^k t^{k+n+1} n!/(k+n+1)!
        let mut sum = 0.0;
        let mut pow_y = 1.0;
        let mut inv = 1.0; // n!/(k+n+1)! built incrementally
        for k in 0..60u32 {
            inv /= (k + n + 1) as f64;
            if k >= 2 {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let term = sign * (2f64.powi(k as i32) - 2.0) * pow_y * inv;
                sum += term;
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
            }
            pow_y *= y;
        }
        sum * t.powi(n as i32 + 1)
    } else {
        let tn1 = t.powi(n as i32 + 1) / (n + 1) as f64;
        let one = exp_moment(n, t, 1.0 / c) / c;
        let two = exp_moment(n, t, 1.0 / (2.0 * c)) / (2.0 * c);
        tn1 - 2.0 * one + two
    }
}

pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `coth(y)` with the small-argument series `1/y + y/3`.
pub(crate) fn coth(y: f64) -> f64 {
    if y.abs() < 1e-6 {
        1.0 / y + y / 3.0
    } else {
        1.0 / y.tanh()
    }
}
