//! Ewald split of `∫_0^∞ t^{ν−1} Σ_n χ(n) e^{−t(Q_n + A) − B/t} dt`.
//!
//! Above λ the lattice sum is kept; below λ it is Poisson-transformed, which
//! turns the Gaussian into its Fourier image on the dual lattice:
//!
//!   I = Σ_n χ(n) K(ν, Q_n + A, B; λ)
//!     + π^{d/2}/|det L det M| · Σ_m e^{2πi q·x} K(d/2 − ν, π²|M⁻¹q|² + B, A; 1/λ),
//!
//! with `q = L⁻¹(m − κ)` and `K(ν, a, b; t₀) = ∫_{t₀}^∞ t^{ν−1} e^{−at − b/t} dt`.

use std::f64::consts::PI;

use num_complex::Complex64 as C;

use super::EvalConfig;
use crate::error::{Error, Result};
use crate::lattice::character;
use crate::linalg::{self, Mat, Vector};
use crate::special::mellin_tail;
use crate::sum::{sum_by_shells, ShellEnumerator, ShellSum};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Problem<const D: usize> {
    pub s: C,
    /// Exponent shift: the t-integrand is `t^{s−μ−1}`.
    pub mu: f64,
    pub metric: Mat<D>,
    pub lattice: Mat<D>,
    pub x: Vector<D>,
    pub kappa: Vector<D>,
    /// A: constant added to every quadratic form value.
    pub offset: f64,
    /// B: coefficient of the `e^{−B/t}` damping.
    pub damping: f64,
}

impl<const D: usize> Problem<D> {
    pub fn plain(s: C, metric: Mat<D>, lattice: Mat<D>, x: Vector<D>, kappa: Vector<D>) -> Self {
        Self { s, mu: 0.0, metric, lattice, x, kappa, offset: 0.0, damping: 0.0 }
    }

    pub fn volume(&self) -> f64 {
        (linalg::det(&self.lattice) * linalg::det(&self.metric)).abs()
    }

    /// `B` and `c` with `|B n + c|² = Q(x + Lᵀn)`.
    pub fn direct_basis(&self) -> (Mat<D>, Vector<D>) {
        let mt = linalg::transpose(&self.metric);
        (linalg::mul(&mt, &linalg::transpose(&self.lattice)), linalg::mat_vec(&mt, &self.x))
    }

    /// `B` and `c` with `|B m + c|² = |M⁻¹L⁻¹(m − κ)|²`, plus `L⁻ᵀx` for the phases.
    pub fn dual_basis(&self) -> Result<(Mat<D>, Vector<D>, Vector<D>)> {
        let li = linalg::inverse(&self.lattice).ok_or_else(|| Error::DegenerateLattice("lattice matrix is singular".into()))?;
        let mi = linalg::inverse(&self.metric).ok_or_else(|| Error::InvalidInput("metric is singular".into()))?;
        let b = linalg::mul(&mi, &li);
        let c = linalg::scale(&linalg::mat_vec(&b, &self.kappa), -1.0);
        let y = linalg::mat_vec(&linalg::transpose(&li), &self.x);
        Ok((b, c, y))
    }

    pub fn default_lambda(&self) -> f64 {
        PI / self.volume().powf(2.0 / D as f64)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Raw {
    pub value: C,
    pub shells: usize,
    pub last: f64,
}

pub(crate) fn expi2pi(t: f64) -> C {
    C::from_polar(1.0, 2.0 * PI * (t - t.round()))
}

fn remap_pole(s: C) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::PoleAtS { .. } => Error::PoleAtS { s },
        other => other,
    }
}

fn converged(sum: ShellSum, max_shells: usize) -> Result<ShellSum> {
    if sum.converged {
        Ok(sum)
    } else {
        Err(Error::NotConverged { max_shells, last: sum.last_shell_magnitude })
    }
}

/// Direct-lattice sum with every term `χ(n)·kernel(Q_n)`; raises
/// `SingularPoint` when a lattice point coincides with x and `kernel_at_zero`
/// is not available.
fn lattice_part<const D: usize, F>(p: &Problem<D>, cfg: &EvalConfig, kernel: F) -> Result<ShellSum>
where
    F: Fn(f64) -> Result<C> + Sync + Send,
{
    let (b, c) = p.direct_basis();
    let mut shells = ShellEnumerator::new(b, c, None);
    let near = (1e-10 * shells.width()).powi(2);
    let regular = p.offset > 0.0 || p.damping > 0.0;
    let kappa = p.kappa;
    let sum = sum_by_shells(&mut shells, cfg.tol, cfg.max_shells, cfg.parallel, |pt| {
        let q = if pt.r2 < near {
            if !regular {
                return Err(Error::SingularPoint { index: pt.n.to_vec() });
            }
            0.0
        } else {
            pt.r2
        };
        Ok(character(&kappa, &pt.n) * kernel(q)?)
    })?;
    converged(sum, cfg.max_shells)
}

pub(crate) fn integral<const D: usize>(p: &Problem<D>, cfg: &EvalConfig) -> Result<Raw> {
    let vol = p.volume();
    if !(vol > 0.0 && vol.is_finite()) {
        return Err(Error::DegenerateLattice(format!("|det L det M| = {vol:e}")));
    }
    let nu = p.s - p.mu;
    let lam = cfg.split_lambda.unwrap_or_else(|| p.default_lambda());
    let (a, b) = (p.offset, p.damping);
    let remap = remap_pole(p.s);

    let direct = lattice_part(p, cfg, |q| mellin_tail(nu, q + a, b, lam).map_err(&remap))?;

    let (bq, cq, y) = p.dual_basis()?;
    let mut shells = ShellEnumerator::new(bq, cq, None);
    let zero = (1e-12 * shells.width()).powi(2);
    let nu_dual = C::new(D as f64 / 2.0, 0.0) - nu;
    let dual = sum_by_shells(&mut shells, cfg.tol, cfg.max_shells, cfg.parallel, |pt| {
        let pp = if pt.r2 < zero { 0.0 } else { pt.r2 };
        Ok(character(&y, &pt.n) * mellin_tail(nu_dual, PI * PI * pp + b, a, 1.0 / lam).map_err(&remap)?)
    })?;
    let dual = converged(dual, cfg.max_shells)?;

    let pref = PI.powf(D as f64 / 2.0) / vol * expi2pi(-linalg::dot(&p.kappa, &y));
    Ok(Raw {
        value: direct.value + pref * dual.value,
        shells: direct.shells + dual.shells,
        last: direct.last_shell_magnitude.max(pref.norm() * dual.last_shell_magnitude),
    })
}

/// Unsplit sum `Σ_n χ(n) ∫_0^∞ t^{ν−1} e^{−t(Q_n + A) − B/t} dt`, convergent
/// term by term only with exponential damping (B > 0).
pub(crate) fn full_kernel_sum<const D: usize>(p: &Problem<D>, cfg: &EvalConfig) -> Result<Raw> {
    let nu = p.s - p.mu;
    let (a, b) = (p.offset, p.damping);
    let remap = remap_pole(p.s);
    let sum = lattice_part(p, cfg, |q| {
        let aa = q + a;
        // split at the saddle of the integrand; both halves are Mellin tails
        let t1 = if aa > 0.0 && b > 0.0 { (b / aa).sqrt() } else { 1.0 };
        let hi = mellin_tail(nu, aa, b, t1)?;
        let lo = mellin_tail(-nu, b, aa, 1.0 / t1)?;
        Ok(hi + lo)
    })
    .map_err(remap)?;
    Ok(Raw { value: sum.value, shells: sum.shells, last: sum.last_shell_magnitude })
}
