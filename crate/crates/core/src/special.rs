//! Complex gamma, incomplete gamma and the two-sided Mellin kernel
//! `∫_{t0}^∞ t^{ν−1} e^{−at−b/t} dt` used by the Ewald split.

use std::f64::consts::PI;

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::quad;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_ITER: usize = 5000;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

pub fn is_nonpositive_integer(s: C) -> bool {
    s.im == 0.0 && s.re <= 0.0 && s.re == s.re.round()
}

// Lanczos form, valid for Re z ≥ 1/2.
fn lanczos(z: C) -> C {
    let z = z - 1.0;
    let mut a = c(LANCZOS[0]);
    for (k, &p) in LANCZOS.iter().enumerate().skip(1) {
        a += p / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    ((z + 0.5) * t.ln() - t).exp() * a * (2.0 * PI).sqrt()
}

/// Γ(s); the Lanczos form is shifted up by the recurrence for Re s < 1/2.
pub fn gamma(s: C) -> Result<C> {
    if is_nonpositive_integer(s) {
        return Err(Error::PoleAtNonPositiveInteger(s));
    }
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {s}")));
    }
    if s.re >= 0.5 {
        return Ok(lanczos(s));
    }
    let k = (0.5 - s.re).ceil() as usize;
    let mut den = c(1.0);
    for j in 0..k {
        den *= s + j as f64;
    }
    Ok(lanczos(s + k as f64) / den)
}

/// 1/Γ(s), zero at the poles of Γ.
pub fn rgamma(s: C) -> C {
    match gamma(s) {
        Ok(g) => 1.0 / g,
        Err(_) => c(0.0),
    }
}

fn zeta_int(k: usize) -> f64 {
    // direct sum to N plus Euler–Maclaurin tail
    const N: usize = 50;
    let kf = k as f64;
    let mut s = 0.0;
    for n in (1..N).rev() {
        s += (n as f64).powf(-kf);
    }
    let nf = N as f64;
    s + nf.powf(1.0 - kf) / (kf - 1.0) + 0.5 * nf.powf(-kf) + kf * nf.powf(-kf - 1.0) / 12.0
        - kf * (kf + 1.0) * (kf + 2.0) * nf.powf(-kf - 3.0) / 720.0
}

// ln Γ(1+ε) for |ε| ≤ 0.1 from the Taylor series in ζ values.
fn ln_gamma_1p_small(e: C) -> C {
    let mut acc = -EULER_GAMMA * e;
    let mut p = -e;
    for k in 2..30 {
        p *= -e;
        acc += p * (zeta_int(k) / k as f64);
    }
    acc
}

fn expm1(z: C) -> C {
    if z.norm() > 0.5 {
        return z.exp() - 1.0;
    }
    let mut term = z;
    let mut sum = z;
    for k in 2..40 {
        term *= z / k as f64;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// γ(s, x) by the Kummer-type series `x^s e^{−x} Σ x^k / (s)_{k+1}`.
fn lower_series(s: C, x: f64) -> C {
    let mut term = 1.0 / s;
    let mut sum = term;
    for k in 1..MAX_ITER {
        term *= x / (s + k as f64);
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
    }
    (s * x.ln() - x).exp() * sum
}

/// Γ(s, z) by the Legendre continued fraction (modified Lentz). Accurate for
/// |z| large compared with |s| and z off the negative real axis.
pub fn upper_gamma_cf(s: C, z: C) -> C {
    const TINY: f64 = 1e-300;
    let mut b = z + 1.0 - s;
    let mut cc = c(1.0 / TINY);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.norm() < TINY {
            d = c(TINY);
        }
        cc = b + an / cc;
        if cc.norm() < TINY {
            cc = c(TINY);
        }
        d = 1.0 / d;
        let del = d * cc;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    (s * z.ln() - z).exp() * h
}

// Γ(ε, x) for |ε| < 0.1 and x ≤ ~1: cancellation-free split of the pole of
// Γ(ε) against the k = 0 term of the series.
fn upper_near_zero(e: C, x: f64) -> C {
    let lx = x.ln();
    let head = if e == c(0.0) {
        c(-EULER_GAMMA - lx)
    } else {
        let a = ln_gamma_1p_small(e);
        let b = e * lx;
        b.exp() * expm1(a - b) / e
    };
    let mut tail = c(0.0);
    let mut p = 1.0;
    for k in 1..MAX_ITER {
        p *= -x / k as f64;
        let t = (e * lx).exp() * p / (e + k as f64);
        tail += t;
        if t.norm() < 1e-18 * (head.norm() + tail.norm()) {
            break;
        }
    }
    head - tail
}

/// Upper incomplete gamma Γ(s, x) = ∫_x^∞ t^{s−1} e^{−t} dt for complex s and
/// real x ≥ 0.
pub fn upper_incomplete_gamma(s: C, x: f64) -> Result<C> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("upper incomplete gamma needs finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        return if s.re > 0.0 {
            gamma(s)
        } else {
            Err(Error::Domain(format!("Γ(s, 0) diverges for Re s = {} <= 0", s.re)))
        };
    }
    // for Re s < 1/2 the difference Γ(s) − γ(s, x) cancels badly once x ~ 1,
    // where the continued fraction is already fast
    if x >= s.norm() + 1.0 || (s.re < 0.5 && x >= 1.0) {
        if s.re * x.ln() - x < -745.0 {
            return Ok(c(0.0));
        }
        return Ok(upper_gamma_cf(s, c(x)));
    }
    let m = (-s.re).round();
    if m >= 0.0 && (s + m).norm() < 0.1 {
        // start at ε = s + m and recur downward: Γ(s,x) = (Γ(s+1,x) − x^s e^{−x}) / s
        let e = s + m;
        let mut g = if x >= e.norm() + 1.0 { upper_gamma_cf(e, c(x)) } else { upper_near_zero(e, x) };
        for j in 1..=(m as usize) {
            let sj = e - j as f64;
            g = (g - (sj * x.ln() - x).exp()) / sj;
        }
        return Ok(g);
    }
    Ok(gamma(s)? - lower_series(s, x))
}

/// Lower incomplete gamma γ(s, x), analytically continued in s.
pub fn lower_incomplete_gamma(s: C, x: f64) -> Result<C> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("lower incomplete gamma needs finite x > 0, got {x}")));
    }
    let m = (-s.re).round();
    if m >= 0.0 && (s + m).norm() < 1e-12 {
        return Err(Error::PoleAtNonPositiveInteger(s));
    }
    if x < s.norm() + 1.0 || x < 30.0 {
        Ok(lower_series(s, x))
    } else {
        Ok(gamma(s)? - upper_gamma_cf(s, c(x)))
    }
}

/// Two-sided Mellin tail `∫_{t0}^∞ t^{ν−1} e^{−a t − b/t} dt` for a, b ≥ 0.
///
/// For a = b = 0 the value `−t0^ν/ν` is the continuation from Re ν < 0; its
/// pole (ν within 1e−8 of 0) is reported as
/// `PoleAtS { s: ν }`; callers translate ν back to their own parameter.
pub fn mellin_tail(nu: C, a: f64, b: f64, t0: f64) -> Result<C> {
    debug_assert!(t0 > 0.0 && a >= 0.0 && b >= 0.0);
    match (a > 0.0, b > 0.0) {
        (true, false) => Ok((-nu * a.ln()).exp() * upper_incomplete_gamma(nu, a * t0)?),
        (false, false) => {
            if nu.norm() < 1e-8 {
                return Err(Error::PoleAtS { s: nu });
            }
            // analytic continuation in ν of the convergent Re ν < 0 value
            Ok(-(nu * t0.ln()).exp() / nu)
        }
        (false, true) => {
            let m = nu.re.round();
            if m >= 0.0 && (nu - m).norm() < 1e-8 {
                return Err(Error::PoleAtS { s: nu });
            }
            Ok((nu * b.ln()).exp() * lower_incomplete_gamma(-nu, b / t0)?)
        }
        (true, true) => {
            let f = |t: f64| ((nu - 1.0) * t.ln() - a * t - b / t).exp();
            // scale the map to the slower of the two decay lengths past t0
            let peak = (((nu.re - 1.0) + ((nu.re - 1.0).powi(2) + 4.0 * a * b).sqrt()) / (2.0 * a)).max(t0);
            let scale = (peak - t0).max(1.0 / a);
            let r = quad::integrate_to_infinity(f, t0, scale, 0.0, 1e-14);
            Ok(r.value)
        }
    }
}

/// Bessel J₀ (rational approximations below x = 2, Hankel asymptotics with
/// fitted corrections above).
pub fn bessel_j0(x: f64) -> f64 {
    libm::j0(x)
}
