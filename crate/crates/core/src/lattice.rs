//! Period lattices in lower-triangular form, their duals, twist characters and
//! the SL(3,ℤ) moves that bring a transformed basis back to canonical form.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Symplectic unit entering the 2D dual convention `L₂·L₂^∨ = σ`.
pub const SIGMA: Mat<2> = [[0.0, 1.0], [-1.0, 0.0]];

pub type IMat3 = [[i64; 3]; 3];
pub type IMat2 = [[i64; 2]; 2];

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::DegenerateLattice(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateLattice(format!("{name} must be finite, got {v}")))
    }
}

/// Rows `(a, 0)` and `(b_x, b)` generate Γ₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice2 {
    pub a: f64,
    pub bx: f64,
    pub b: f64,
}

impl Lattice2 {
    pub fn new(a: f64, bx: f64, b: f64) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        check_finite("bx", bx)?;
        Ok(Self { a, bx, b })
    }

    pub fn square() -> Self {
        Self { a: 1.0, bx: 0.0, b: 1.0 }
    }

    /// The lattice `ℤ + τℤ` with `a = 1`, `τ = b_x + i b`.
    pub fn from_tau(tau: C) -> Result<Self> {
        if !(tau.im > 0.0) {
            return Err(Error::InvalidInput(format!("Im tau must be positive, got {tau}")));
        }
        Self::new(1.0, tau.re, tau.im)
    }

    pub fn matrix(&self) -> Mat<2> {
        [[self.a, 0.0], [self.bx, self.b]]
    }

    pub fn det(&self) -> f64 {
        self.a * self.b
    }

    pub fn generator(&self, i: usize) -> [f64; 2] {
        self.matrix()[i]
    }
}

/// Rows `(a,0,0)`, `(b_x,b,0)`, `(c_x,c_y,c)` generate Γ₃.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice3 {
    pub a: f64,
    pub bx: f64,
    pub b: f64,
    pub cx: f64,
    pub cy: f64,
    pub c: f64,
}

impl Lattice3 {
    pub fn new(a: f64, bx: f64, b: f64, cx: f64, cy: f64, c: f64) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        check_positive("c", c)?;
        check_finite("bx", bx)?;
        check_finite("cx", cx)?;
        check_finite("cy", cy)?;
        Ok(Self { a, bx, b, cx, cy, c })
    }

    pub fn cubic() -> Self {
        Self { a: 1.0, bx: 0.0, b: 1.0, cx: 0.0, cy: 0.0, c: 1.0 }
    }

    /// Reads a lower-triangular matrix; the strictly upper part must vanish.
    pub fn from_matrix(m: &Mat<3>) -> Result<Self> {
        let upper = m[0][1].abs().max(m[0][2].abs()).max(m[1][2].abs());
        let size = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
        if upper > 1e-12 * size.max(1.0) {
            return Err(Error::DegenerateLattice(format!("matrix is not lower triangular (upper entry {upper:e})")));
        }
        Self::new(m[0][0], m[1][0], m[1][1], m[2][0], m[2][1], m[2][2])
    }

    /// Block embedding of a 2D lattice with third generator `(0, 0, c)`.
    pub fn stacked(l2: &Lattice2, c: f64) -> Result<Self> {
        Self::new(l2.a, l2.bx, l2.b, 0.0, 0.0, c)
    }

    pub fn matrix(&self) -> Mat<3> {
        [[self.a, 0.0, 0.0], [self.bx, self.b, 0.0], [self.cx, self.cy, self.c]]
    }

    pub fn det(&self) -> f64 {
        self.a * self.b * self.c
    }

    /// The generator γ_i (row i).
    pub fn generator(&self, i: usize) -> [f64; 3] {
        self.matrix()[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualLattice2 {
    pub matrix: Mat<2>,
}

impl DualLattice2 {
    pub fn sigma(&self) -> Mat<2> {
        SIGMA
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualLattice3 {
    pub matrix: Mat<3>,
}

/// `L₂^∨ = L₂^{-1}σ = (1/ab)·[[0, b], [−a, −b_x]]`.
pub fn dual2(l: &Lattice2) -> DualLattice2 {
    let d = l.det();
    DualLattice2 { matrix: [[0.0, l.b / d], [-l.a / d, -l.bx / d]] }
}

/// `L₃^∨ = L₃^{-1}`, written out for the lower-triangular form.
pub fn dual3(l: &Lattice3) -> DualLattice3 {
    let (a, bx, b, cx, cy, c) = (l.a, l.bx, l.b, l.cx, l.cy, l.c);
    DualLattice3 {
        matrix: [
            [1.0 / a, 0.0, 0.0],
            [-bx / (a * b), 1.0 / b, 0.0],
            [(bx * cy - b * cx) / (a * b * c), -cy / (b * c), 1.0 / c],
        ],
    }
}

/// Quasi-periodicity data: the phase vector ξ and the unimodular relabeling w.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist<const D: usize> {
    pub xi: [f64; D],
    pub w: [[i64; D]; D],
}

pub type Twist3 = Twist<3>;
pub type Twist2 = Twist<2>;

impl<const D: usize> Twist<D> {
    pub fn new(xi: [f64; D], w: [[i64; D]; D]) -> Result<Self> {
        if xi.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("twist xi must be finite".into()));
        }
        let d = linalg::imat_det(&w);
        if d != 1 {
            return Err(Error::InvalidInput(format!("twist matrix w must have determinant 1, got {d}")));
        }
        Ok(Self { xi, w })
    }

    pub fn plain(xi: [f64; D]) -> Self {
        let mut w = [[0i64; D]; D];
        for (i, row) in w.iter_mut().enumerate() {
            row[i] = 1;
        }
        Self { xi, w }
    }

    pub fn trivial() -> Self {
        Self::plain([0.0; D])
    }

    /// Dual-space offset κ with `χ(n) = exp(2πi κ·n)`: κ = wᵀ L^∨ᵀ ξ.
    pub fn kappa(&self, dual: &Mat<D>) -> [f64; D] {
        let v = linalg::mat_vec(&linalg::transpose(dual), &self.xi);
        let wt = linalg::to_real(&linalg::imat_transpose(&self.w));
        linalg::mat_vec(&wt, &v)
    }

    /// True when the character is identically 1 on the lattice.
    pub fn is_trivial(&self, dual: &Mat<D>) -> bool {
        self.kappa(dual).iter().all(|k| (k - k.round()).abs() < 1e-12)
    }
}

// κ·n mod 1 in double-double so that χ(n+m) = χ(n)χ(m) holds to roundoff of
// the final angle even when |κ·n| is large.
fn phase(kappa: &[f64], n: &[i64]) -> C {
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    for (k, &m) in kappa.iter().zip(n) {
        let m = m as f64;
        let p = k * m;
        let pe = k.mul_add(m, -p);
        let t = hi + p;
        let bb = t - hi;
        lo += (hi - (t - bb)) + (p - bb) + pe;
        hi = t;
    }
    let mut f = (hi - hi.round()) + lo;
    f -= f.round();
    C::from_polar(1.0, 2.0 * PI * f)
}

/// χ₃(n) = exp(2πi (w n)ᵀ L^∨ᵀ ξ).
pub fn char3(n: [i64; 3], twist: &Twist3, l: &Lattice3) -> C {
    phase(&twist.kappa(&dual3(l).matrix), &n)
}

/// 2D character with the σ-twisted dual `L₂^{-1}σ`.
pub fn char2(n: [i64; 2], twist: &Twist2, l: &Lattice2) -> C {
    phase(&twist.kappa(&dual2(l).matrix), &n)
}

pub fn character(kappa: &[f64], n: &[i64]) -> C {
    phase(kappa, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularMove {
    pub w: IMat3,
    pub o: Mat<3>,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sl3Generators {
    pub u: IMat3,
    pub p: IMat3,
    pub q: IMat3,
    pub o: IMat3,
    /// `w₁ = U`, `w₂ = PO`, `w₃ = O`, `w₄ = POQ`.
    pub w: [IMat3; 4],
}

pub fn sl3_generators() -> Sl3Generators {
    let u = [[1, 1, 0], [0, 1, 0], [0, 0, 1]];
    let p = [[0, -1, 0], [-1, 0, 0], [0, 0, -1]];
    let q = [[0, 1, 0], [0, 0, 1], [1, 0, 0]];
    let o = [[1, 0, 0], [0, -1, 0], [0, 0, -1]];
    let po = linalg::imat_mul(&p, &o);
    let poq = linalg::imat_mul(&po, &q);
    let g = Sl3Generators { u, p, q, o, w: [u, po, o, poq] };
    for m in [u, p, q, o, po, poq] {
        assert_eq!(linalg::imat_det(&m), 1, "generator with determinant != 1");
    }
    g
}

/// Generator `w_i` for `i ∈ 1..=4`.
pub fn generator_w(i: usize) -> Result<IMat3> {
    if !(1..=4).contains(&i) {
        return Err(Error::InvalidInput(format!("generator index must be in 1..=4, got {i}")));
    }
    Ok(sl3_generators().w[i - 1])
}

/// Brings `w·L` back to lower-triangular form: `L' = (1/α)·w·L·O` with
/// `O` orthogonal (positive-diagonal LQ of `w·L`) and `α = |row₁(w·L)| / a`.
pub fn modular_reduce(w: &IMat3, l: &Lattice3) -> Result<(Lattice3, ModularMove)> {
    let d = linalg::imat_det(w);
    if d != 1 && d != -1 {
        return Err(Error::InvalidInput(format!("modular move needs det w = ±1, got {d}")));
    }
    let wl = linalg::mul(&linalg::to_real(w), &l.matrix());
    let (t, o) = linalg::lq(&wl).ok_or_else(|| Error::DegenerateLattice("w·L is singular".into()))?;
    let alpha = t[0][0] / l.a;
    let lp = linalg::scale_mat(&t, 1.0 / alpha);
    Ok((Lattice3::from_matrix(&lp)?, ModularMove { w: *w, o, alpha }))
}

pub fn rot_x(g: f64) -> Mat<3> {
    let (s, c) = g.sin_cos();
    [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]
}

pub fn rot_y(b: f64) -> Mat<3> {
    let (s, c) = b.sin_cos();
    [[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]]
}

pub fn rot_z(a: f64) -> Mat<3> {
    let (s, c) = a.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

/// Angles (α, β, γ) with `O = T_z^α · T_y^β · T_x^γ` for a rotation `O`.
pub fn euler_zyx(o: &Mat<3>) -> (f64, f64, f64) {
    let beta = (-o[2][0]).clamp(-1.0, 1.0).asin();
    let alpha = o[1][0].atan2(o[0][0]);
    let gamma = o[2][1].atan2(o[2][2]);
    (alpha, beta, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lattice3() -> impl Strategy<Value = Lattice3> {
        (0.1f64..=10.0, -10.0f64..10.0, 0.1f64..=10.0, -10.0f64..10.0, -10.0f64..10.0, 0.1f64..=10.0)
            .prop_map(|(a, bx, b, cx, cy, c)| Lattice3::new(a, bx, b, cx, cy, c).unwrap())
    }

    fn kron(i: usize, j: usize) -> f64 {
        if i == j {
            1.0
        } else {
            0.0
        }
    }

    fn unit() -> Mat<3> {
        linalg::identity()
    }

    #[test]
    fn dual2_examples() {
        assert_eq!(dual2(&Lattice2::square()).matrix, SIGMA);
        let d = dual2(&Lattice2::new(2.0, 1.0, 3.0).unwrap()).matrix;
        let want = [[0.0, 0.5], [-2.0 / 6.0, -1.0 / 6.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((d[i][j] - want[i][j]).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn dual3_is_inverse() {
        assert_eq!(dual3(&Lattice3::cubic()).matrix, unit());
        let l = Lattice3::new(1.0, 0.3, 1.2, 0.1, -0.2, 0.9).unwrap();
        let inv = linalg::inverse(&l.matrix()).unwrap();
        let d = dual3(&l).matrix;
        for i in 0..3 {
            for j in 0..3 {
                assert!((d[i][j] - inv[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn character_quarter_turn() {
        let t = Twist3::plain([0.25, 0.0, 0.0]);
        let v = char3([1, 0, 0], &t, &Lattice3::cubic());
        assert!((v - C::new(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(char3([0, 0, 0], &t, &Lattice3::cubic()), C::new(1.0, 0.0));
    }

    #[test]
    fn generator_entries() {
        let g = sl3_generators();
        assert_eq!(g.w[1], [[0, 1, 0], [-1, 0, 0], [0, 0, 1]]);
        assert_eq!(g.w[3], [[0, 0, 1], [0, -1, 0], [1, 0, 0]]);
        assert_eq!(g.w[0], g.u);
        assert_eq!(g.w[2], g.o);
        for w in g.w {
            assert_eq!(linalg::imat_det(&w), 1);
        }
    }

    #[test]
    fn reduce_identity_and_w2() {
        let l = Lattice3::new(1.3, 0.4, 0.9, -0.2, 0.5, 1.1).unwrap();
        assert!(matches!(modular_reduce(&[[0; 3]; 3], &l), Err(Error::InvalidInput(_))));
        let (lp, mv) = modular_reduce(&[[1, 0, 0], [0, 1, 0], [0, 0, 1]], &l).unwrap();
        assert!((mv.alpha - 1.0).abs() < 1e-15);
        assert!(lp.matrix().iter().flatten().zip(l.matrix().iter().flatten()).all(|(a, b)| (a - b).abs() < 1e-15));

        // w₂ on an (a, b_x, b, 0, 0, c) lattice: α₂ = |γ₂|/a, O₂ a z-rotation by ∠(γ₁, γ₂)
        let l = Lattice3::new(1.3, 0.4, 0.9, 0.0, 0.0, 1.1).unwrap();
        let (lp, mv) = modular_reduce(&generator_w(2).unwrap(), &l).unwrap();
        let g2 = (0.4f64 * 0.4 + 0.9 * 0.9).sqrt();
        assert!((mv.alpha - g2 / 1.3).abs() < 1e-14);
        let ang = (0.4f64 / g2).acos();
        let (a, b, c) = euler_zyx(&mv.o);
        assert!(b.abs() < 1e-14 && c.abs() < 1e-14);
        assert!((a.abs() - ang).abs() < 1e-14, "{a} vs {ang}");
        assert!((lp.a - l.a).abs() < 1e-15);
    }

    #[test]
    fn euler_recomposition() {
        let l = Lattice3::new(1.0, 0.3, 1.2, 0.1, -0.2, 0.9).unwrap();
        let (_, mv) = modular_reduce(&generator_w(4).unwrap(), &l).unwrap();
        let (a, b, g) = euler_zyx(&mv.o);
        let r = linalg::mul(&linalg::mul(&rot_z(a), &rot_y(b)), &rot_x(g));
        for i in 0..3 {
            for j in 0..3 {
                assert!((r[i][j] - mv.o[i][j]).abs() < 1e-14);
            }
        }
        let g1 = linalg::norm(&l.generator(0));
        let g3 = linalg::norm(&l.generator(2));
        assert!((mv.alpha - g3 / g1).abs() < 1e-14);
    }

    #[test]
    fn lattice_json_shape() {
        let l = Lattice3::new(1.0, 0.5, 2.0, 0.0, 0.25, 3.0).unwrap();
        let s = serde_json::to_string(&l).unwrap();
        assert_eq!(s, r#"{"a":1.0,"bx":0.5,"b":2.0,"cx":0.0,"cy":0.25,"c":3.0}"#);
        let back: Lattice3 = serde_json::from_str(&s).unwrap();
        assert_eq!(back, l);
        assert!(Lattice3::new(0.0, 0.0, 1.0, 0.0, 0.0, 1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn dual_identities(l in lattice3()) {
            // tolerance relative to Σ_k |L_ik||L^∨_kj|, the roundoff floor of the product
            let (m, d) = (l.matrix(), dual3(&l).matrix);
            let p = linalg::mul(&m, &d);
            for i in 0..3 {
                for j in 0..3 {
                    let size: f64 = (0..3).map(|k| (m[i][k] * d[k][j]).abs()).sum();
                    prop_assert!((p[i][j] - kron(i, j)).abs() < 1e-14 * size.max(1.0));
                }
            }
            let l2 = Lattice2::new(l.a, l.bx, l.b).unwrap();
            let (m, d) = (l2.matrix(), dual2(&l2).matrix);
            let p = linalg::mul(&m, &d);
            for i in 0..2 {
                for j in 0..2 {
                    let size: f64 = (0..2).map(|k| (m[i][k] * d[k][j]).abs()).sum();
                    prop_assert!((p[i][j] - SIGMA[i][j]).abs() < 1e-14 * size.max(1.0));
                }
            }
        }

        #[test]
        fn character_unit_and_multiplicative(
            l in lattice3(),
            xi in proptest::array::uniform3(-3.0f64..3.0),
            n in proptest::array::uniform3(-50i64..50),
            m in proptest::array::uniform3(-50i64..50),
            wi in 0usize..4,
        ) {
            let t = Twist3::new(xi, sl3_generators().w[wi]).unwrap();
            let a = char3(n, &t, &l);
            prop_assert!((a.norm() - 1.0).abs() < 1e-15);
            let nm = [n[0] + m[0], n[1] + m[1], n[2] + m[2]];
            prop_assert!((char3(nm, &t, &l) - a * char3(m, &t, &l)).norm() < 1e-13);
        }

        #[test]
        fn reduction_properties(l in lattice3(), wi in 0usize..4) {
            let w = sl3_generators().w[wi];
            let (lp, mv) = modular_reduce(&w, &l).unwrap();
            let oto = linalg::mul(&linalg::transpose(&mv.o), &mv.o);
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!((oto[i][j] - kron(i, j)).abs() < 1e-13);
                }
            }
            prop_assert!((linalg::det(&mv.o) - 1.0).abs() < 1e-13);
            let wl = linalg::mul(&linalg::to_real(&w), &l.matrix());
            let t = linalg::scale_mat(&linalg::mul(&wl, &mv.o), 1.0 / mv.alpha);
            let size = t.iter().flatten().fold(1.0f64, |s, v| s.max(v.abs()));
            prop_assert!(t[0][1].abs().max(t[0][2].abs()).max(t[1][2].abs()) < 1e-12 * size);
            prop_assert!((lp.a - l.a).abs() < 1e-12 * l.a);
            let lhs = lp.det() * mv.alpha.powi(3);
            prop_assert!((lhs - linalg::det(&wl).abs()).abs() < 1e-11 * lhs);
        }
    }
}
