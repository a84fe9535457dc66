//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rand::Rng;
use torus_greens::linalg::{self, Mat};
use torus_greens::quad::gauss_legendre;
use torus_greens::special;

pub fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-30)
}

fn expi(t: f64) -> C {
    C::from_polar(1.0, 2.0 * PI * (t - t.round()))
}

fn box_points<const D: usize>(n: i64) -> Vec<[i64; D]> {
    let side = (2 * n + 1) as usize;
    let total = side.pow(D as u32);
    (0..total)
        .map(|mut k| {
            let mut p = [0i64; D];
            for c in p.iter_mut() {
                *c = (k % side) as i64 - n;
                k /= side;
            }
            p
        })
        .collect()
}

/// Terms `(Q, phase)` of a Gaussian theta sum, sorted by Q.
struct Theta {
    terms: Vec<(f64, C)>,
}

impl Theta {
    fn eval(&self, t: f64) -> C {
        let mut acc = C::new(0.0, 0.0);
        for &(q, ph) in &self.terms {
            let e = t * q;
            if e > 60.0 {
                break;
            }
            acc += ph * (-e).exp();
        }
        acc
    }
}

/// Γ(s)·R(s) for `c₀ = 1`, from the Mellin integral of box-truncated theta
/// functions: the lattice theta `Σ_{|n_i|≤N} χ(n) e^{−tQ(x+Lᵀn)}` above t*,
/// its Poisson image (box `|m_i − κ_i| ≤ N`) below t*. Requires Re s > d/2
/// whenever κ is integral.
pub fn theta_mellin<const D: usize>(s: C, m: &Mat<D>, x: &[f64; D], kappa: &[f64; D], l: &Mat<D>, n: i64) -> C {
    let mt = linalg::transpose(m);
    let lt = linalg::transpose(l);
    let mut direct: Vec<(f64, C)> = box_points::<D>(n)
        .into_iter()
        .map(|p| {
            let v = linalg::add(x, &linalg::mat_vec(&lt, &p.map(|k| k as f64)));
            let u = linalg::mat_vec(&mt, &v);
            let ph: f64 = kappa.iter().zip(&p).map(|(k, &j)| k * j as f64).sum();
            (linalg::dot(&u, &u), expi(ph))
        })
        .collect();
    direct.sort_by(|a, b| a.0.total_cmp(&b.0));
    let li = linalg::inverse(l).unwrap();
    let mi = linalg::inverse(m).unwrap();
    let vol = (linalg::det(l) * linalg::det(m)).abs();
    let centre = kappa.map(|k| k.round() as i64);
    let mut dual: Vec<(f64, C)> = box_points::<D>(n)
        .into_iter()
        .map(|p| {
            let mm: [f64; D] = std::array::from_fn(|i| (centre[i] + p[i]) as f64 - kappa[i]);
            let q = linalg::mat_vec(&li, &mm);
            let k = linalg::mat_vec(&mi, &q);
            (PI * PI * linalg::dot(&k, &k), expi(linalg::dot(&q, x)))
        })
        .collect();
    dual.sort_by(|a, b| a.0.total_cmp(&b.0));
    let direct = Theta { terms: direct };
    let dual = Theta { terms: dual };

    let tstar = PI / vol.powf(2.0 / D as f64);
    let (gx, gw) = gauss_legendre(48);
    let panel = 0.25;
    let mut total = C::new(0.0, 0.0);
    // above t*: u = ln t up to where e^{−tQ_min} is negligible
    let qmin = direct.terms[0].0.max(1e-300);
    let umax = (80.0 / qmin).ln().max(tstar.ln() + panel);
    let mut u0 = tstar.ln();
    while u0 < umax {
        for (xg, wg) in gx.iter().zip(&gw) {
            let u = u0 + panel * 0.5 * (xg + 1.0);
            let t = u.exp();
            total += (s * u).exp() * direct.eval(t) * (wg * panel * 0.5);
        }
        u0 += panel;
    }
    // below t*: substitute t = 1/v; ∫_{1/t*}^∞ v^{d/2−s−1} (π^{d/2}/V) Θ̂(1/v) dv
    let d2 = D as f64 / 2.0;
    let pmin = dual.terms.iter().map(|t| t.0).find(|&p| p > 1e-20).unwrap_or(1.0);
    let zero: C = dual.terms.iter().take_while(|t| t.0 <= 1e-20).map(|t| t.1).sum();
    let mut w0 = (1.0 / tstar).ln();
    let wmax = (80.0 / pmin).ln().max(w0 + panel);
    let nonzero = Theta { terms: dual.terms.iter().copied().filter(|t| t.0 > 1e-20).collect() };
    while w0 < wmax {
        for (xg, wg) in gx.iter().zip(&gw) {
            let w = w0 + panel * 0.5 * (xg + 1.0);
            let v = w.exp();
            total += ((d2 - s) * w).exp() * nonzero.eval(v) * (PI.powf(d2) / vol * wg * panel * 0.5);
        }
        w0 += panel;
    }
    // zero mode in closed form: ∫_{1/t*}^∞ v^{d/2−s−1} dv
    if zero.norm() > 0.0 {
        let e = C::new(d2, 0.0) - s;
        total += zero * PI.powf(d2) / vol * (-(e * (1.0 / tstar).ln()).exp() / e);
    }
    total
}

/// R(s) for `c₀ = 1` from `theta_mellin`.
pub fn theta_r<const D: usize>(s: C, m: &Mat<D>, x: &[f64; D], kappa: &[f64; D], l: &Mat<D>, n: i64) -> C {
    theta_mellin(s, m, x, kappa, l, n) * special::rgamma(s)
}

pub fn random_metric3<R: Rng>(rng: &mut R) -> Mat<3> {
    loop {
        let m: Mat<3> = std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 } + rng.gen_range(-0.3..0.3)));
        if linalg::det(&m).abs() > 0.3 {
            return m;
        }
    }
}

pub fn random_metric2<R: Rng>(rng: &mut R) -> Mat<2> {
    loop {
        let m: Mat<2> = std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 } + rng.gen_range(-0.3..0.3)));
        if linalg::det(&m).abs() > 0.3 {
            return m;
        }
    }
}
