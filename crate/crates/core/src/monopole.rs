//! Abelian Dirac monopole on ℂ×ℝ in the gauge `A_z̄ = 0`, `A_y = iφ`:
//! `φ = c₀/r`, the piecewise connection `A_z`, its jump across `y = 0`, and
//! finite-difference residuals of the reduced Bogomolny system
//!
//! ```text
//! ∂_z̄ A_z = −(ig/2) ∂_y φ,    ∂_y A_z = 2i ∂_z φ
//! ```
//!
//! (the commutator drops out in the abelian case). Differentiating the closed
//! forms fixes g = 1.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::sum::ordered_map;
use crate::verify::ResidualReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonopoleConfig {
    pub c0: C,
    pub m: i64,
    pub g: f64,
}

impl MonopoleConfig {
    /// Quantized charge: `c₀ = i·m/2`.
    pub fn quantized(m: i64) -> Self {
        MonopoleConfig { c0: C::new(0.0, m as f64 / 2.0), m, g: 1.0 }
    }

    pub fn is_quantized(&self) -> bool {
        self.c0 == C::new(0.0, self.m as f64 / 2.0)
    }
}

impl Default for MonopoleConfig {
    fn default() -> Self {
        Self::quantized(1)
    }
}

/// `φ = c₀/|p|`.
pub fn dirac_phi(point: &[f64; 3], cfg: &MonopoleConfig) -> Result<C> {
    let r = point.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::SingularPoint { index: vec![0, 0, 0] });
    }
    Ok(cfg.c0 / r)
}

fn phi_zy(z: C, y: f64, cfg: &MonopoleConfig) -> Result<C> {
    dirac_phi(&[z.re, z.im, y], cfg)
}

/// The connection with `A_z → 0` as `y → +∞`:
/// `−ic₀(y/(z r) ∓ 1/z)` for `y ≷ 0`.
pub fn a_z(z: C, y: f64, cfg: &MonopoleConfig) -> Result<C> {
    if z == C::new(0.0, 0.0) {
        return Err(Error::AxisSingularity);
    }
    if y == 0.0 {
        return Err(Error::OnJumpLocus);
    }
    let r = (y * y + z.norm_sqr()).sqrt();
    let inv = 1.0 / z;
    let branch = if y > 0.0 { -inv } else { inv };
    Ok(C::new(0.0, -1.0) * cfg.c0 * (inv * (y / r) + branch))
}

/// `lim_{y→0⁻} A_z − lim_{y→0⁺} A_z = −2ic₀/z`; equals `m/z` when `c₀ = im/2`.
pub fn jump(z: C, cfg: &MonopoleConfig) -> Result<C> {
    if z == C::new(0.0, 0.0) {
        return Err(Error::AxisSingularity);
    }
    Ok(C::new(0.0, -2.0) * cfg.c0 / z)
}

/// Uniform tensor grid in (Re z, Im z, y) with spacing h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub origin: [f64; 3],
    pub h: f64,
    pub n: [usize; 3],
}

impl Grid {
    /// Grid covering `[lo, hi]` per axis with spacing h (the upper bound is
    /// rounded to the nearest node).
    pub fn new(lo: [f64; 3], hi: [f64; 3], h: f64) -> Result<Self> {
        if !(h > 0.0) || (0..3).any(|i| !(hi[i] > lo[i])) {
            return Err(Error::InvalidInput("grid needs h > 0 and hi > lo on every axis".into()));
        }
        let n = std::array::from_fn(|i| ((hi[i] - lo[i]) / h).round() as usize + 1);
        let g = Grid { origin: lo, h, n };
        if g.n.iter().any(|&k| k < 3) {
            return Err(Error::InvalidInput("grid needs at least 3 nodes per axis".into()));
        }
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.n.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n[1] + j) * self.n[2] + k
    }

    pub fn node(&self, i: usize, j: usize, k: usize) -> (C, f64) {
        let o = self.origin;
        (C::new(o[0] + i as f64 * self.h, o[1] + j as f64 * self.h), o[2] + k as f64 * self.h)
    }

    fn nodes(&self) -> Vec<(C, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.n[0] {
            for j in 0..self.n[1] {
                for k in 0..self.n[2] {
                    out.push(self.node(i, j, k));
                }
            }
        }
        out
    }

    /// Distance from the grid to the axis `z = 0` and the plane `y = 0`.
    pub fn singular_distance(&self) -> f64 {
        let hi: [f64; 3] = std::array::from_fn(|a| self.origin[a] + (self.n[a] - 1) as f64 * self.h);
        let gap = |lo: f64, hi: f64| if lo <= 0.0 && hi >= 0.0 { 0.0 } else { lo.abs().min(hi.abs()) };
        let dz = gap(self.origin[0], hi[0]).hypot(gap(self.origin[1], hi[1]));
        dz.min(gap(self.origin[2], hi[2]))
    }
}

/// Field samples on a grid, stored in `Grid::index` order.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianField {
    pub grid: Grid,
    pub phi: Vec<C>,
    pub a_z: Vec<C>,
    /// `iφ` in the fixed gauge.
    pub a_y: Vec<C>,
}

impl AbelianField {
    pub fn sample<F>(grid: Grid, parallel: bool, f: F) -> Result<Self>
    where
        F: Fn(C, f64) -> Result<(C, C)> + Sync + Send,
    {
        let nodes = grid.nodes();
        let vals = ordered_map(&nodes, parallel, |&(z, y)| f(z, y));
        let mut phi = Vec::with_capacity(vals.len());
        let mut a_z = Vec::with_capacity(vals.len());
        for v in vals {
            let (p, a) = v?;
            phi.push(p);
            a_z.push(a);
        }
        let a_y = phi.iter().map(|p| C::new(0.0, 1.0) * p).collect();
        Ok(AbelianField { grid, phi, a_z, a_y })
    }

    /// The closed-form monopole fields.
    pub fn dirac(grid: Grid, cfg: &MonopoleConfig, parallel: bool) -> Result<Self> {
        Self::sample(grid, parallel, |z, y| Ok((phi_zy(z, y, cfg)?, a_z(z, y, cfg)?)))
    }

    pub fn zero(grid: Grid) -> Self {
        let n = grid.len();
        let zero = vec![C::new(0.0, 0.0); n];
        AbelianField { grid, phi: zero.clone(), a_z: zero.clone(), a_y: zero }
    }

    pub fn scaled(&self, k: C) -> Self {
        let sc = |v: &Vec<C>| v.iter().map(|x| x * k).collect();
        AbelianField { grid: self.grid, phi: sc(&self.phi), a_z: sc(&self.a_z), a_y: sc(&self.a_y) }
    }

    /// CSV with `#` metadata lines followed by
    /// `re_z,im_z,y,re_phi,im_phi,re_Az,im_Az`.
    pub fn to_csv(&self, cfg: &MonopoleConfig) -> String {
        let g = &self.grid;
        let mut out = format!(
            "# grid origin={},{},{} h={} n={},{},{}\n# c0={},{} m={} g={}\n# gauge: A_zbar=0, A_y=i*phi\n",
            g.origin[0], g.origin[1], g.origin[2], g.h, g.n[0], g.n[1], g.n[2], cfg.c0.re, cfg.c0.im, cfg.m, cfg.g
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["re_z", "im_z", "y", "re_phi", "im_phi", "re_Az", "im_Az"]).expect("in-memory write");
        for i in 0..g.n[0] {
            for j in 0..g.n[1] {
                for k in 0..g.n[2] {
                    let (z, y) = g.node(i, j, k);
                    let idx = g.index(i, j, k);
                    let (p, a) = (self.phi[idx], self.a_z[idx]);
                    w.write_record([z.re, z.im, y, p.re, p.im, a.re, a.im].map(|v| format!("{v:e}"))).expect("in-memory write");
                }
            }
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf8"));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BogomolnyResidual {
    /// max |∂_z̄A_z + (ig/2)∂_yφ|
    pub r1: f64,
    /// max |∂_yA_z − 2i∂_zφ|
    pub r2: f64,
}

impl BogomolnyResidual {
    pub fn max(&self) -> f64 {
        self.r1.max(self.r2)
    }
}

/// Centered-difference residuals over the interior nodes.
pub fn bogomolny_residual(field: &AbelianField, h: f64, g: f64) -> Result<BogomolnyResidual> {
    let grid = &field.grid;
    if (h - grid.h).abs() > 1e-12 * grid.h {
        return Err(Error::InvalidInput(format!("spacing {h} does not match the grid spacing {}", grid.h)));
    }
    let dist = grid.singular_distance();
    if h > dist / 8.0 {
        return Err(Error::GridTooCoarse { h, distance: dist });
    }
    let i = C::new(0.0, 1.0);
    let inv2h = 0.5 / h;
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    for a in 1..grid.n[0] - 1 {
        for b in 1..grid.n[1] - 1 {
            for c in 1..grid.n[2] - 1 {
                let d = |v: &[C], axis: usize| {
                    let (p, m) = match axis {
                        0 => (grid.index(a + 1, b, c), grid.index(a - 1, b, c)),
                        1 => (grid.index(a, b + 1, c), grid.index(a, b - 1, c)),
                        _ => (grid.index(a, b, c + 1), grid.index(a, b, c - 1)),
                    };
                    (v[p] - v[m]) * inv2h
                };
                // ∂_z = ½(∂_u − i∂_v), ∂_z̄ = ½(∂_u + i∂_v)
                let dzbar_a = 0.5 * (d(&field.a_z, 0) + i * d(&field.a_z, 1));
                let dz_phi = 0.5 * (d(&field.phi, 0) - i * d(&field.phi, 1));
                let e1 = dzbar_a + i * (g / 2.0) * d(&field.phi, 2);
                let e2 = d(&field.a_z, 2) - 2.0 * i * dz_phi;
                r1 = r1.max(e1.norm());
                r2 = r2.max(e2.norm());
            }
        }
    }
    Ok(BogomolnyResidual { r1, r2 })
}

/// Residual maxima over the nodes of a fixed box `[lo, hi]` for each spacing;
/// the grid is padded by one node so the differenced nodes are exactly the
/// box nodes, and halving h keeps the coarse nodes.
pub fn convergence_orders(lo: [f64; 3], hi: [f64; 3], spacings: &[f64], cfg: &MonopoleConfig, parallel: bool) -> Result<Vec<(f64, BogomolnyResidual)>> {
    spacings
        .iter()
        .map(|&h| {
            let grid = Grid::new(lo.map(|v| v - h), hi.map(|v| v + h), h)?;
            let f = AbelianField::dirac(grid, cfg, parallel)?;
            Ok((h, bogomolny_residual(&f, h, cfg.g)?))
        })
        .collect()
}

/// Substitutes `φ → |τ|·φ(τz, y/|τ|)`, `A_z → τ·A_z(τz, y/|τ|)` into the
/// flat-space closed forms and compares the Bogomolny residual with that of
/// the untransformed fields. The substitution preserves the system only when
/// |τ| = 1; otherwise the first equation acquires a `(|τ|² − 1)∂_z̄A_z` term
/// and the check fails.
pub fn modular_field_check(tau: C, grid: &Grid, cfg: &MonopoleConfig, parallel: bool) -> Result<ResidualReport> {
    // τ = 1 (the identity) is admitted alongside the upper half-plane
    if tau.im < 0.0 || tau.norm() == 0.0 || !(tau.im > 0.0 || tau == C::new(1.0, 0.0)) {
        return Err(Error::Domain(format!("tau must lie in the upper half-plane or equal 1, got {tau}")));
    }
    let modulus = tau.norm();
    let base = AbelianField::dirac(*grid, cfg, parallel)?;
    let moved = AbelianField::sample(*grid, parallel, |z, y| {
        let (zz, yy) = (tau * z, y / modulus);
        Ok((phi_zy(zz, yy, cfg)? * modulus, a_z(zz, yy, cfg)? * tau))
    })?;
    let r0 = bogomolny_residual(&base, grid.h, cfg.g)?.max();
    let r1 = bogomolny_residual(&moved, grid.h, cfg.g)?.max();
    // discretization bound from the untransformed fields
    let bound = 8.0 * r0 + 1e-14;
    let echo = json!({"tau": [tau.re, tau.im], "grid": grid, "c0": [cfg.c0.re, cfg.c0.im], "g": cfg.g, "space": "flat C x R"});
    let mut rep = ResidualReport::new("modular_field[flat]", C::new(r1, 0.0), C::new(r0, 0.0), bound, echo);
    rep.passed = rep.abs_residual <= bound;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn phi_at_unit_radius_and_origin() {
        let cfg = MonopoleConfig::quantized(3);
        assert_eq!(dirac_phi(&[0.0, 0.6, 0.8], &cfg).unwrap(), cfg.c0);
        assert!(matches!(dirac_phi(&[0.0; 3], &cfg), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn a_z_errors_and_decay() {
        let cfg = MonopoleConfig::quantized(2);
        assert!(matches!(a_z(C::new(1.0, 0.0), 0.0, &cfg), Err(Error::OnJumpLocus)));
        assert!(matches!(a_z(C::new(0.0, 0.0), 1.0, &cfg), Err(Error::AxisSingularity)));
        let z = C::new(0.3, -0.7);
        let far = a_z(z, 1e3, &cfg).unwrap();
        assert!(far.norm() < 1e-3 * cfg.c0.norm());
        // decays like |z|/(2y²)
        assert!(a_z(z, 1e2, &cfg).unwrap().norm() > a_z(z, 1e3, &cfg).unwrap().norm());
    }

    #[test]
    fn one_sided_limits_reproduce_jump() {
        let cfg = MonopoleConfig { c0: C::new(0.4, -1.3), m: 0, g: 1.0 };
        let z = C::new(-0.8, 0.5);
        let eps = 1e-9;
        let num = a_z(z, -eps, &cfg).unwrap() - a_z(z, eps, &cfg).unwrap();
        assert!((num - jump(z, &cfg).unwrap()).norm() < 1e-8);
    }

    #[test]
    fn jump_is_gauge_shift_when_quantized() {
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut next = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for m in -5..=5 {
            let cfg = MonopoleConfig::quantized(m);
            assert!(cfg.is_quantized());
            for _ in 0..100 {
                let z = C::new(next(), next());
                assert_eq!(jump(z, &cfg).unwrap() - C::new(m as f64, 0.0) / z, C::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn coupling_from_closed_forms() {
        // ∂_z̄A_z and ∂_yφ analytically: i c₀ y/(2r³) and −c₀ y/r³, so the first
        // equation balances with g = 1
        let cfg = MonopoleConfig { c0: C::new(0.7, 0.2), m: 0, g: 1.0 };
        for (z, y) in [(C::new(0.3, 0.4), 1.2), (C::new(-1.0, 0.2), -0.7), (C::new(0.05, -2.0), 0.3)] {
            let r = (y * y + z.norm_sqr()).sqrt();
            let dzbar_a = C::new(0.0, 1.0) * cfg.c0 * y / (2.0 * r.powi(3));
            let dy_phi = -cfg.c0 * y / r.powi(3);
            assert!((dzbar_a + C::new(0.0, cfg.g / 2.0) * dy_phi).norm() < 1e-15);
        }
    }

    #[test]
    fn finite_difference_laplacian_of_phi() {
        let cfg = MonopoleConfig::quantized(1);
        let p = [0.7, -0.4, 0.9];
        let lap = |h: f64| {
            let mut acc = -6.0 * dirac_phi(&p, &cfg).unwrap();
            for a in 0..3 {
                for sgn in [-1.0, 1.0] {
                    let mut q = p;
                    q[a] += sgn * h;
                    acc += dirac_phi(&q, &cfg).unwrap();
                }
            }
            (acc / (h * h)).norm()
        };
        let (e1, e2) = (lap(0.02), lap(0.01));
        assert!(e1 < 1e-2);
        assert!((e1 / e2).log2() > 1.9);
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let grid = Grid::new([1.0, 1.0, 1.0], [1.2, 1.2, 1.2], 0.02).unwrap();
        let r = bogomolny_residual(&AbelianField::zero(grid), 0.02, 1.0).unwrap();
        assert_eq!((r.r1, r.r2), (0.0, 0.0));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let grid = Grid::new([0.1, 0.1, 0.5], [0.5, 0.5, 0.9], 0.1).unwrap();
        let f = AbelianField::dirac(grid, &MonopoleConfig::default(), false).unwrap();
        assert!(matches!(bogomolny_residual(&f, 0.1, 1.0), Err(Error::GridTooCoarse { .. })));
    }

    #[test]
    fn residual_is_linear_in_the_fields() {
        let grid = Grid::new([1.0, 0.5, 1.0], [1.2, 0.7, 1.2], 0.02).unwrap();
        let f = AbelianField::dirac(grid, &MonopoleConfig::default(), false).unwrap();
        let r = bogomolny_residual(&f, 0.02, 1.0).unwrap();
        // a power-of-two factor scales every rounding exactly
        let r2x = bogomolny_residual(&f.scaled(C::new(2.0, 0.0)), 0.02, 1.0).unwrap();
        assert_eq!((r2x.r1, r2x.r2), (2.0 * r.r1, 2.0 * r.r2));
        let r3 = bogomolny_residual(&f.scaled(C::new(0.0, 3.0)), 0.02, 1.0).unwrap();
        assert!((r3.r1 - 3.0 * r.r1).abs() <= 1e-8 * r3.r1);
        assert!((r3.r2 - 3.0 * r.r2).abs() <= 1e-8 * r3.r2);
    }

    #[test]
    fn modular_identity_is_exact() {
        let grid = Grid::new([0.8, 0.4, 0.8], [1.2, 0.8, 1.2], 0.02).unwrap();
        let rep = modular_field_check(C::new(1.0, 0.0), &grid, &MonopoleConfig::default(), false).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.lhs, rep.rhs);
        assert!(modular_field_check(C::new(0.5, -1.0), &grid, &MonopoleConfig::default(), false).is_err());
    }

    #[test]
    fn csv_has_metadata_and_columns() {
        let grid = Grid::new([1.0, 1.0, 1.0], [1.04, 1.04, 1.04], 0.02).unwrap();
        let cfg = MonopoleConfig::default();
        let text = AbelianField::dirac(grid, &cfg, false).unwrap().to_csv(&cfg);
        let mut lines = text.lines().skip_while(|l| l.starts_with('#'));
        assert_eq!(lines.next().unwrap(), "re_z,im_z,y,re_phi,im_phi,re_Az,im_Az");
        assert_eq!(lines.count(), 27);
    }

    proptest! {
        #[test]
        fn phi_scales_inversely(x in -3.0..3.0f64, y in -3.0..3.0f64, z in 0.1..3.0f64, lam in 0.1..10.0f64) {
            let cfg = MonopoleConfig::quantized(2);
            let a = dirac_phi(&[x, y, z], &cfg).unwrap();
            let b = dirac_phi(&[lam * x, lam * y, lam * z], &cfg).unwrap();
            prop_assert!((b * lam - a).norm() <= 1e-14 * a.norm());
        }
    }
}
