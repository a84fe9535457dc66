//! Direct summation in the half-plane of absolute convergence.
//!
//! The raw shell-truncated sum converges like R^{d−2s}, far too slowly near
//! Re s = d/2. Instead the sum is split with a smooth radial window
//! `W(r) = ½ erfc((r − R)/(σR))`: the windowed part is a finite lattice sum,
//! and the complement `Σ χ (1 − W) r^{−2s}` is smooth, so its Poisson image
//! is concentrated on the few dual modes with `π|k|σR ≲ 7`. Each mode needs
//! one radial Fourier transform, done by quadrature plus a closed-form tail.
//! No incomplete gamma split is involved, which keeps this strategy an
//! independent check on the Ewald evaluator.

use std::f64::consts::PI;

use num_complex::Complex64 as C;

use super::ewald::{expi2pi, Problem, Raw};
use super::EvalConfig;
use crate::error::{Error, Result};
use crate::lattice::character;
use crate::linalg;
use crate::quad;
use crate::special::upper_gamma_cf;
use crate::sum::{ordered_map, Neumaier, ShellEnumerator};

const SIGMA_W: f64 = 0.15;
const EDGE: f64 = 6.5;
const MODE_CUT: f64 = 7.0;
const HANKEL_TERMS: usize = 10;

fn window(r: f64, rw: f64) -> f64 {
    0.5 * libm::erfc((r - rw) / (SIGMA_W * rw))
}

fn complement(r: f64, rw: f64) -> f64 {
    0.5 * libm::erfc((rw - r) / (SIGMA_W * rw))
}

/// `∫_X^∞ r^μ e^{±iar} dr = e^{±iπ(μ+1)/2} a^{−μ−1} Γ(μ+1, ∓iaX)`.
fn oscillatory_tail(mu: C, a: f64, x: f64, sign: f64) -> C {
    let ph = C::new(0.0, sign * PI / 2.0) * (mu + 1.0);
    ph.exp() * (-(mu + 1.0) * a.ln()).exp() * upper_gamma_cf(mu + 1.0, C::new(0.0, -sign * a * x))
}

/// `∫_X^∞ r^μ J₀(ar) dr` from the Hankel expansion of J₀ (aX ≥ 40).
fn j0_tail(mu: C, a: f64, x: f64) -> C {
    let mut coef = 1.0;
    let mut total = C::new(0.0, 0.0);
    let rot = C::from_polar(1.0, -PI / 4.0);
    let mut ik = C::new(1.0, 0.0);
    for k in 0..HANKEL_TERMS {
        if k > 0 {
            let kf = k as f64;
            coef *= -(2.0 * kf - 1.0).powi(2) / (8.0 * kf);
            ik *= C::new(0.0, 1.0);
        }
        let c = (2.0 / PI).sqrt() * a.powf(-0.5 - k as f64) * coef;
        let p = mu - 0.5 - k as f64;
        let t1 = ik * rot * oscillatory_tail(p, a, x, 1.0);
        let t2 = ik.conj() * rot.conj() * oscillatory_tail(p, a, x, -1.0);
        total += c * (t1 + t2) * 0.5;
    }
    total
}

/// Radial transform of `(1 − W(r)) r^{−2s}` at angular frequency `a = 2π|k|`.
fn radial_transform<const D: usize>(s: C, rw: f64, a: f64) -> Result<C> {
    let lo = (rw * (1.0 - EDGE * SIGMA_W)).max(1e-300);
    let hi = rw * (1.0 + EDGE * SIGMA_W);
    let x_end = if a > 0.0 { hi.max(40.0 / a) } else { hi };
    let dim = D as f64;
    let radial = |r: f64| -> C {
        let g = complement(r, rw) * r.powf(dim - 1.0);
        let kern = if a == 0.0 {
            1.0
        } else if D == 3 {
            let z = a * r;
            z.sin() / z
        } else {
            crate::special::bessel_j0(a * r)
        };
        (-2.0 * s * r.ln()).exp() * (g * kern)
    };
    // integrate in u = ln r over breakpoints that follow both the window edge
    // and the oscillation period
    let mut cuts = vec![lo, rw, hi];
    if a > 0.0 {
        let n = (((x_end - lo) * a / PI) as usize + 2).min(4000);
        cuts.extend((0..=n).map(|i| lo + (x_end - lo) * i as f64 / n as f64));
    }
    let mut g = lo * 2.0;
    while g < x_end {
        cuts.push(g);
        g *= 2.0;
    }
    cuts.push(x_end);
    cuts.retain(|&c| c >= lo && c <= x_end);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    // the transform is of size ~R^{d−2s}; pieces far below that need no
    // relative accuracy of their own
    let floor = 1e-17 * rw.powf(dim - 2.0 * s.re);
    let mut inner = Neumaier::new();
    for w in cuts.windows(2) {
        let (u0, u1) = (w[0].ln(), w[1].ln());
        let r = quad::integrate(|u| radial(u.exp()) * u.exp(), u0, u1, floor, 1e-14);
        inner.add(r.value);
    }
    let mu = C::new(dim - 1.0, 0.0) - 2.0 * s;
    let tail = if a == 0.0 {
        ((mu + 1.0) * x_end.ln()).exp() / (2.0 * s - dim)
    } else if D == 3 {
        // sin(ar)/(ar)·r² = r^{1−2s} sin(ar)/a
        (oscillatory_tail(mu - 1.0, a, x_end, 1.0) - oscillatory_tail(mu - 1.0, a, x_end, -1.0)) / (C::new(0.0, 2.0) * a)
    } else {
        j0_tail(mu, a, x_end)
    };
    let solid = if D == 3 { 4.0 * PI } else { 2.0 * PI };
    Ok((inner.value() + tail) * solid)
}

pub(crate) fn window_sum<const D: usize>(p: &Problem<D>, cfg: &EvalConfig) -> Result<Raw> {
    let dim = D as f64;
    if p.s.re <= dim / 2.0 {
        return Err(Error::InvalidInput(format!(
            "direct strategy requires Re s > {} (got Re s = {}); use ewald",
            dim / 2.0,
            p.s.re
        )));
    }
    if p.mu != 0.0 || p.offset != 0.0 || p.damping != 0.0 {
        return Err(Error::InvalidInput("direct strategy supports the plain quadratic-form series only".into()));
    }
    let vol = p.volume();
    let rw = 6.0 * vol.powf(1.0 / dim);
    let s = p.s;

    let (b, c) = p.direct_basis();
    let shells = ShellEnumerator::new(b, c, None);
    let near = 1e-10 * shells.width();
    let mut pts = Vec::new();
    shells.ball(rw * (1.0 + EDGE * SIGMA_W), |pt| pts.push(pt));
    // canonical order: by radius, then index
    pts.sort_by(|u, v| u.r2.total_cmp(&v.r2).then(u.n.cmp(&v.n)));
    if let Some(pt) = pts.iter().find(|pt| pt.r2.sqrt() < near) {
        return Err(Error::SingularPoint { index: pt.n.to_vec() });
    }
    let kappa = p.kappa;
    let terms = ordered_map(&pts, cfg.parallel, |pt| {
        let r = pt.r2.sqrt();
        character(&kappa, &pt.n) * (-s * pt.r2.ln()).exp() * window(r, rw)
    });
    let mut acc = Neumaier::new();
    acc.extend(terms.iter().copied());
    let last = terms.last().map_or(0.0, |t| t.norm());

    let (bq, cq, y) = p.dual_basis()?;
    let modes_enum = ShellEnumerator::new(bq, cq, None);
    let kcut = MODE_CUT / (PI * SIGMA_W * rw);
    let mut modes = Vec::new();
    modes_enum.ball(kcut, |pt| modes.push(pt));
    modes.sort_by(|u, v| u.r2.total_cmp(&v.r2).then(u.n.cmp(&v.n)));
    let zero = (1e-12 * modes_enum.width()).powi(2);
    let corr = ordered_map(&modes, cfg.parallel, |pt| {
        let k = if pt.r2 < zero { 0.0 } else { pt.r2.sqrt() };
        radial_transform::<D>(s, rw, 2.0 * PI * k).map(|v| character(&y, &pt.n) * v)
    });
    let phase0 = expi2pi(-linalg::dot(&p.kappa, &y)) / vol;
    for v in corr {
        acc.add(phase0 * v?);
    }
    Ok(Raw { value: acc.value(), shells: pts.len().max(1), last })
}
