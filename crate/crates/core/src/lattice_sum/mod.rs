//! Evaluators for the twisted series R₃, R₂ (and their integral forms
//! I = Γ(s)·R), the T²×ℝ series I_cont and the quasi-periodic Green function.
//!
//! Every series is `c₀·Σ_n χ(n) / Q(x + Lᵀn)^s` with `Q(v) = |Mᵀv|²` and
//! `χ(n) = exp(2πi (wn)ᵀ L^∨ᵀ ξ)`.

mod direct;
mod ewald;
mod fourier;

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{dual2, dual3, Lattice2, Lattice3, Twist2, Twist3};
use crate::linalg::{self, Mat};
use crate::special;

pub(crate) use ewald::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Direct,
    Ewald,
}

impl Strategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Direct => "direct",
            Strategy::Ewald => "ewald",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Strategy::Direct),
            "ewald" => Ok(Strategy::Ewald),
            other => Err(Error::InvalidInput(format!("unknown strategy '{other}' (expected direct|ewald)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub strategy: Strategy,
    pub max_shells: usize,
    /// Relative truncation tolerance of the shell stopping rule.
    pub tol: f64,
    /// Split point λ of the t-integral; `None` picks π / |det(L·M)|^{2/d}.
    pub split_lambda: Option<f64>,
    pub c0: C,
    /// Evaluate shell terms on the rayon pool (no effect on results, so it is
    /// not part of the serialized configuration).
    #[serde(skip, default = "parallel_default")]
    pub parallel: bool,
    /// Half-width K of the integer cube `|m_i| ≤ K` for the Fourier Green function.
    pub fourier_cutoff: usize,
}

fn parallel_default() -> bool {
    true
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Ewald,
            max_shells: 2000,
            tol: 1e-14,
            split_lambda: None,
            c0: C::new(1.0, 0.0),
            parallel: true,
            fourier_cutoff: 40,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol <= 1e-2) {
            return Err(Error::InvalidInput(format!("tol must lie in (0, 1e-2], got {}", self.tol)));
        }
        if self.max_shells < 1 {
            return Err(Error::InvalidInput("max_shells must be at least 1".into()));
        }
        if let Some(l) = self.split_lambda {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidInput(format!("split_lambda must be positive, got {l}")));
            }
        }
        if !(self.c0.re.is_finite() && self.c0.im.is_finite()) {
            return Err(Error::InvalidInput("c0 must be finite".into()));
        }
        Ok(())
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = strategy;
        self
    }

    pub fn with_split(mut self, lambda: f64) -> Self {
        self.split_lambda = Some(lambda);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn with_c0(mut self, c0: C) -> Self {
        self.c0 = c0;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesValue {
    #[serde(serialize_with = "crate::complex_json::serialize")]
    pub value: C,
    pub shells_used: usize,
    pub last_shell_magnitude: f64,
    pub strategy: Strategy,
    pub pole_flag: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl SeriesValue {
    fn scaled(raw: ewald::Raw, factor: C, strategy: Strategy) -> Self {
        SeriesValue {
            value: raw.value * factor,
            shells_used: raw.shells,
            last_shell_magnitude: raw.last * factor.norm(),
            strategy,
            pole_flag: false,
            diagnostic: None,
        }
    }
}

fn check_s(s: C) -> Result<()> {
    if s.re.is_finite() && s.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("s must be finite, got {s}")))
    }
}

fn check_metric<const D: usize>(m: &Mat<D>) -> Result<()> {
    let d = linalg::det(m);
    if !(d.abs() > 1e-12) || m.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("metric must be invertible (|det M| > 1e-12), got det {d:e}")));
    }
    Ok(())
}

fn check_point<const D: usize>(x: &[f64; D]) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput("evaluation point must be finite".into()))
    }
}

fn sum_value<const D: usize>(p: &Problem<D>, cfg: &EvalConfig) -> Result<SeriesValue> {
    cfg.validate()?;
    let factor = cfg.c0 * special::rgamma(p.s);
    match cfg.strategy {
        Strategy::Ewald => Ok(SeriesValue::scaled(ewald::integral(p, cfg)?, factor, Strategy::Ewald)),
        Strategy::Direct => {
            let raw = direct::window_sum(p, cfg)?;
            Ok(SeriesValue::scaled(raw, cfg.c0, Strategy::Direct))
        }
    }
}

/// R₃(s, M, x, ξ) on the lattice `l`.
pub fn r3(s: C, metric: &Mat<3>, x: &[f64; 3], twist: &Twist3, l: &Lattice3, cfg: &EvalConfig) -> Result<SeriesValue> {
    check_s(s)?;
    check_metric(metric)?;
    check_point(x)?;
    let p = Problem::plain(s, *metric, l.matrix(), *x, twist.kappa(&dual3(l).matrix));
    sum_value(&p, cfg)
}

/// R₃ over the rows of an arbitrary invertible lattice matrix with the
/// character `e^{2πi κ·n}` given directly.
pub fn r3_general(s: C, metric: &Mat<3>, x: &[f64; 3], kappa: &[f64; 3], lattice: &Mat<3>, cfg: &EvalConfig) -> Result<SeriesValue> {
    check_s(s)?;
    check_metric(metric)?;
    check_point(x)?;
    check_point(kappa)?;
    if !(linalg::det(lattice).abs() > 1e-12) {
        return Err(Error::DegenerateLattice("lattice matrix is singular".into()));
    }
    let p = Problem::plain(s, *metric, *lattice, *x, *kappa);
    sum_value(&p, cfg)
}

/// `e^{2πit}`, with t reduced mod 1 first.
pub fn phase(t: f64) -> C {
    ewald::expi2pi(t)
}

/// R₂(s, M, x, ξ); the character uses the σ-twisted dual `L₂^{-1}σ`.
pub fn r2(s: C, metric: &Mat<2>, x: &[f64; 2], twist: &Twist2, l: &Lattice2, cfg: &EvalConfig) -> Result<SeriesValue> {
    check_s(s)?;
    check_metric(metric)?;
    check_point(x)?;
    let p = Problem::plain(s, *metric, l.matrix(), *x, twist.kappa(&dual2(l).matrix));
    sum_value(&p, cfg)
}

/// Complex form on `ℤ + τℤ`: `c₀ Σ_γ χ(γ, ξ) / ((pS)² + |w + γ|²)^s` with
/// `S = Im τ`, ξ and w read as plane vectors.
pub fn r2_complex(s: C, xi: C, w: C, p: f64, tau: C, cfg: &EvalConfig) -> Result<SeriesValue> {
    check_s(s)?;
    if !p.is_finite() {
        return Err(Error::InvalidInput("p must be finite".into()));
    }
    let l = Lattice2::from_tau(tau)?;
    let twist = Twist2::plain([xi.re, xi.im]);
    let mut prob = Problem::plain(s, linalg::identity(), l.matrix(), [w.re, w.im], twist.kappa(&dual2(&l).matrix));
    prob.offset = (p * tau.im).powi(2);
    if cfg.strategy == Strategy::Direct && prob.offset > 0.0 {
        return Err(Error::InvalidInput("direct strategy is only available for p = 0 in the complex form".into()));
    }
    sum_value(&prob, cfg)
}

/// I_cont(s, ξ, x, y) = c₀√π Σ_n χ(n) ∫_0^∞ t^{s−3/2} e^{−t|x+L₂ᵀn|² − π²y²/t} dt.
pub fn icont(s: C, xi2: &[f64; 2], x2: &[f64; 2], y: f64, l: &Lattice2, cfg: &EvalConfig) -> Result<SeriesValue> {
    check_s(s)?;
    check_point(x2)?;
    if !y.is_finite() {
        return Err(Error::InvalidInput("y must be finite".into()));
    }
    cfg.validate()?;
    let twist = Twist2::plain(*xi2);
    let mut p = Problem::plain(s, linalg::identity(), l.matrix(), *x2, twist.kappa(&dual2(l).matrix));
    p.mu = 0.5;
    p.damping = (PI * y).powi(2);
    let factor = cfg.c0 * PI.sqrt();
    match cfg.strategy {
        Strategy::Ewald => Ok(SeriesValue::scaled(ewald::integral(&p, cfg)?, factor, Strategy::Ewald)),
        Strategy::Direct => {
            if y == 0.0 {
                return Err(Error::InvalidInput("direct icont needs y != 0 (use ewald at y = 0)".into()));
            }
            Ok(SeriesValue::scaled(ewald::full_kernel_sum(&p, cfg)?, factor, Strategy::Direct))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GreenMode {
    Fourier,
    Ewald,
}

impl std::str::FromStr for GreenMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fourier" => Ok(GreenMode::Fourier),
            "ewald" => Ok(GreenMode::Ewald),
            other => Err(Error::InvalidInput(format!("unknown green mode '{other}' (expected fourier|ewald)"))),
        }
    }
}

/// Quasi-periodic Laplace Green function: R₃ at s = 1/2 with unit metric.
///
/// For a trivial twist the dual zero mode is dropped (fourier) or continued
/// (ewald); the value is then flagged as carrying the zero-mode ambiguity.
pub fn green3(x: &[f64; 3], twist: &Twist3, l: &Lattice3, mode: GreenMode, cfg: &EvalConfig) -> Result<SeriesValue> {
    check_point(x)?;
    let trivial = twist.is_trivial(&dual3(l).matrix);
    let mut v = match mode {
        GreenMode::Ewald => r3(C::new(0.5, 0.0), &linalg::identity(), x, twist, l, &cfg.with_strategy(Strategy::Ewald))?,
        GreenMode::Fourier => fourier::green(x, twist, l, cfg)?,
    };
    if trivial {
        v.pole_flag = true;
        v.diagnostic = Some("ZeroModeAmbiguity: trivial twist, value is the zero-mean continuation".into());
    }
    Ok(v)
}

/// I = Γ(s)·R.
pub fn i_from_r(s: C, r: &SeriesValue) -> Result<SeriesValue> {
    let g = special::gamma(s)?;
    Ok(SeriesValue {
        value: r.value * g,
        last_shell_magnitude: r.last_shell_magnitude * g.norm(),
        ..r.clone()
    })
}
