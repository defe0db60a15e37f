//! The Lobachevsky function `L(x) = -∫₀ˣ log|2 sin t| dt`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

const TERMS: usize = 64;

/// `ζ(s)` for even `s ≥ 2`: direct sum plus an Euler–Maclaurin tail.
fn zeta(s: f64) -> f64 {
    const N: usize = 1000;
    let mut sum = 0.0;
    for k in (1..N).rev() {
        sum += (k as f64).powf(-s);
    }
    let n = N as f64;
    let tail = n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0;
    sum + tail
}

/// Coefficients `ζ(2k) / (k (2k+1) π^{2k})`.
fn coefficients() -> &'static [f64; TERMS] {
    static COEFFS: OnceLock<[f64; TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut c = [0.0; TERMS];
        for (i, v) in c.iter_mut().enumerate() {
            let k = (i + 1) as f64;
            *v = zeta(2.0 * k) / (k * (2.0 * k + 1.0) * PI.powf(2.0 * k));
        }
        c
    })
}

/// Series valid on `[0, π/2]`.
fn series(theta: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let t2 = theta * theta;
    let mut power = theta * t2;
    let mut sum = 0.0;
    for &c in coefficients() {
        let term = c * power;
        sum += term;
        if term < 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        power *= t2;
    }
    theta - theta * (2.0 * theta).ln() + sum
}

/// Odd and π-periodic; accurate to about 1e-15 on `[0, π]`.
pub fn lobachevsky(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let r = x.rem_euclid(PI);
    if r > FRAC_PI_2 {
        -series(PI - r)
    } else {
        series(r)
    }
}

/// Derivative `-log|2 sin x|`.
pub fn lobachevsky_derivative(x: f64) -> f64 {
    -(2.0 * x.sin()).abs().ln()
}
