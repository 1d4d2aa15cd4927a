//! Incomplete gamma functions on the range the tempered-stable Lévy
//! densities need, including the non-positive shape parameters that show up
//! in tail masses (`Γ(-σ, x)` and `E₁(x) = Γ(0, x)`).

use statrs::function::gamma::gamma;

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 10_000;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E₁(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_int_e1(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x <= 1.0 {
        // E₁(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!)
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..MAX_ITER {
            let kf = k as f64;
            term *= -x / kf;
            let contrib = term / kf;
            sum += contrib;
            if contrib.abs() < sum.abs().max(1e-300) * EPS {
                break;
            }
        }
        -EULER_GAMMA - x.ln() - sum
    } else {
        upper_gamma_cf(0.0, x)
    }
}

/// Unregularized upper incomplete gamma `Γ(a, x) = ∫_x^∞ t^{a-1} e^{-t} dt`
/// for `a > -1` and `x > 0`.
pub fn upper_gamma(a: f64, x: f64) -> f64 {
    debug_assert!(a > -1.0 && x > 0.0);
    if a == 0.0 {
        return exp_int_e1(x);
    }
    if a < 0.0 {
        if x >= 1.0 {
            return upper_gamma_cf(a, x);
        }
        // Γ(a, x) = (Γ(a+1, x) - x^a e^{-x}) / a
        return (upper_gamma(a + 1.0, x) - (a * x.ln() - x).exp()) / a;
    }
    if x < a + 1.0 {
        gamma(a) - lower_gamma_series(a, x)
    } else {
        upper_gamma_cf(a, x)
    }
}

/// Unregularized lower incomplete gamma `γ(a, x) = ∫_0^x t^{a-1} e^{-t} dt`
/// for `a > 0`, `x ≥ 0`.
pub fn lower_gamma(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        0.0
    } else if x < a + 1.0 {
        lower_gamma_series(a, x)
    } else {
        gamma(a) - upper_gamma_cf(a, x)
    }
}

fn lower_gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * (a * x.ln() - x).exp()
}

// Modified Lentz evaluation of the Legendre continued fraction.
fn upper_gamma_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        let an = -fi * (fi - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    (a * x.ln() - x).exp() * h
}
