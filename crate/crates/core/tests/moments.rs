use std::f64::consts::PI;

use nrmi_core::*;
use num_complex::Complex64;

type Exponent = Box<dyn Fn(Complex64) -> Complex64>;

/// `E[X^p]` from `E e^{zX} = exp(−hψ(−z))` by a trapezoid Cauchy integral on
/// `|z| = r`.
fn cauchy_moment<F: Fn(Complex64) -> Complex64>(psi: F, h: f64, p: u32, r: f64) -> f64 {
    let n = 256;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let z = Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64);
        acc += (-h * psi(-z)).exp() / z.powu(p);
    }
    let fact: f64 = (1..=p).map(f64::from).product();
    fact * acc.re / n as f64
}

#[test]
fn faa_di_bruno_matches_cauchy_integral() {
    let one = Complex64::new(1.0, 0.0);
    let cases: Vec<(&str, Exponent, f64)> = vec![
        ("dirichlet", Box::new(move |l: Complex64| (one + l).ln()), 0.5),
        ("nig", Box::new(move |l: Complex64| (one + 2.0 * l).sqrt() - one), 0.25),
        ("gdir:2", Box::new(move |l: Complex64| (one + l).ln() + (one + l / 2.0).ln()), 0.5),
    ];
    for (name, psi, r) in &cases {
        let family: LevyFamily = name.parse().unwrap();
        for h in [0.2, 0.7, 1.0] {
            for p in 1..=6 {
                let got = crm_moment(&family, p, h).unwrap();
                let want = cauchy_moment(psi, h, p, *r);
                assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{name} p={p} h={h}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn laplace_exponent_matches_closed_forms() {
    let nig = LevyFamily::nig();
    let d = LevyFamily::dirichlet();
    for lam in [0.01, 0.5, 3.0, 40.0] {
        assert!((d.laplace_exponent(lam).unwrap() - (1.0 + lam).ln()).abs() < 1e-12);
        assert!((nig.laplace_exponent(lam).unwrap() - ((1.0 + 2.0 * lam).sqrt() - 1.0)).abs() < 1e-12);
    }
}

#[test]
fn va_moments_dirichlet_are_gamma_moments() {
    // μ̃(X) ~ Gamma(a, 1) so E V^k = a(a+1)…(a+k−1)/a^k
    for a in [1.0, 10.0, 55.0] {
        let m = va_moments(&LevyFamily::dirichlet(), a).unwrap();
        assert!((m.m2 - (a + 1.0) / a).abs() < 1e-12);
        assert!((m.m3 - (a + 1.0) * (a + 2.0) / (a * a)).abs() < 1e-12);
    }
}

#[test]
fn variance_integral_is_dirichlet_beta_variance() {
    for a in [0.5, 2.0, 30.0, 500.0] {
        let ia = variance_integral_ia(&LevyFamily::dirichlet(), a).unwrap();
        assert!((ia - 1.0 / (a + 1.0)).abs() < 1e-8, "a={a}: {ia}");
    }
    assert!(ia_order_check(&LevyFamily::nig(), &[10.0, 50.0]).is_err());
}

#[test]
fn clt_covariance_entries() {
    let s = clt_covariance(&[0.3, 0.4, 0.3]).unwrap();
    assert!((s.entries[0][1] + 0.534_522_483_824_848_8).abs() < 1e-12);
    assert!((s.entries[0][2] + 0.428_571_428_571_428_6).abs() < 1e-12);
    let q = s.quadratic_form(&[1.6, 1.49, 0.5]).unwrap();
    let direct = 1.6f64.powi(2)
        + 1.49f64.powi(2)
        + 0.25
        + 2.0 * (1.6 * 1.49 * s.entries[0][1] + 1.6 * 0.5 * s.entries[0][2] + 1.49 * 0.5 * s.entries[1][2]);
    assert!((q - direct).abs() < 1e-12);
    assert!((q - 0.999_34).abs() < 1e-5);
}
