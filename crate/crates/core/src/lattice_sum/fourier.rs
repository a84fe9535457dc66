//! Spectral form of the Green function,
//! `c₀/(π|det L|) Σ_m e^{2πi q·x} / |q|²` with `q = L⁻¹(m − κ)`, summed over
//! integer cubes around the nearest integer to κ; a vanishing q is dropped.

use std::f64::consts::PI;

use num_complex::Complex64 as C;

use super::ewald::expi2pi;
use super::{EvalConfig, SeriesValue, Strategy};
use crate::error::{Error, Result};
use crate::lattice::{character, dual3, Lattice3, Twist3};
use crate::linalg;
use crate::sum::{ordered_map, Neumaier};

fn cube_shell(k: i64) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            for l in -k..=k {
                if i.abs().max(j.abs()).max(l.abs()) == k {
                    out.push([i, j, l]);
                }
            }
        }
    }
    out
}

pub(crate) fn green(x: &[f64; 3], twist: &Twist3, l: &Lattice3, cfg: &EvalConfig) -> Result<SeriesValue> {
    cfg.validate()?;
    let li = dual3(l).matrix;
    // source-point test: fractional coordinates of x
    let frac = linalg::mat_vec(&linalg::transpose(&li), x);
    let nearest = frac.map(f64::round);
    let back = linalg::mat_vec(&linalg::transpose(&l.matrix()), &linalg::add(&frac, &linalg::scale(&nearest, -1.0)));
    let scale = (0..3).map(|i| linalg::norm(&l.generator(i))).fold(f64::INFINITY, f64::min);
    if linalg::norm(&back) < 1e-10 * scale {
        return Err(Error::SingularPoint { index: nearest.map(|v| v as i64).to_vec() });
    }

    let kappa = twist.kappa(&li);
    let centre = kappa.map(|v| v.round() as i64);
    let y = frac;
    let mut acc = Neumaier::new();
    let mut last = 0.0;
    let kmax = cfg.fourier_cutoff as i64;
    for k in 0..=kmax {
        let offs = cube_shell(k);
        let terms = ordered_map(&offs, cfg.parallel, |d| {
            let m = [centre[0] + d[0], centre[1] + d[1], centre[2] + d[2]];
            let delta = [m[0] as f64 - kappa[0], m[1] as f64 - kappa[1], m[2] as f64 - kappa[2]];
            let q = linalg::mat_vec(&li, &delta);
            let q2 = linalg::dot(&q, &q);
            if q2 < 1e-24 * linalg::dot(&li[0], &li[0]) {
                C::new(0.0, 0.0)
            } else {
                character(&y, &m) / q2
            }
        });
        let mut mag = 0.0;
        for t in terms {
            mag += t.norm();
            acc.add(t);
        }
        last = mag;
    }
    let pref = cfg.c0 / (PI * l.det()) * expi2pi(-linalg::dot(&kappa, &y));
    Ok(SeriesValue {
        value: pref * acc.value(),
        shells_used: kmax as usize + 1,
        last_shell_magnitude: last * pref.norm(),
        strategy: Strategy::Direct,
        pole_flag: false,
        diagnostic: None,
    })
}
