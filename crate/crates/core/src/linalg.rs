//! Fixed-size dense helpers for 2×2 and 3×3 work.

pub type Mat<const D: usize> = [[f64; D]; D];
pub type Vector<const D: usize> = [f64; D];

pub fn identity<const D: usize>() -> Mat<D> {
    let mut m = [[0.0; D]; D];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn transpose<const D: usize>(a: &Mat<D>) -> Mat<D> {
    let mut t = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            t[j][i] = a[i][j];
        }
    }
    t
}

pub fn mul<const D: usize>(a: &Mat<D>, b: &Mat<D>) -> Mat<D> {
    let mut c = [[0.0; D]; D];
    for i in 0..D {
        for j in 0..D {
            c[i][j] = (0..D).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn mat_vec<const D: usize>(a: &Mat<D>, v: &Vector<D>) -> Vector<D> {
    let mut r = [0.0; D];
    for i in 0..D {
        r[i] = (0..D).map(|k| a[i][k] * v[k]).sum();
    }
    r
}

pub fn dot<const D: usize>(a: &Vector<D>, b: &Vector<D>) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm<const D: usize>(a: &Vector<D>) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale<const D: usize>(a: &Vector<D>, k: f64) -> Vector<D> {
    a.map(|v| v * k)
}

pub fn add<const D: usize>(a: &Vector<D>, b: &Vector<D>) -> Vector<D> {
    let mut r = *a;
    for (x, y) in r.iter_mut().zip(b) {
        *x += y;
    }
    r
}

pub fn scale_mat<const D: usize>(a: &Mat<D>, k: f64) -> Mat<D> {
    a.map(|row| row.map(|v| v * k))
}

pub fn det<const D: usize>(a: &Mat<D>) -> f64 {
    match D {
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        3 => {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
        _ => unimplemented!("determinant only for D <= 3"),
    }
}

/// Gauss–Jordan inverse with partial pivoting; `None` when singular.
pub fn inverse<const D: usize>(a: &Mat<D>) -> Option<Mat<D>> {
    let mut m = *a;
    let mut inv = identity::<D>();
    let scale = a.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    for col in 0..D {
        let piv = (col..D).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[piv][col].abs() <= 1e-300_f64.max(scale * 1e-15) {
            return None;
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col];
        for j in 0..D {
            m[col][j] /= p;
            inv[col][j] /= p;
        }
        for i in 0..D {
            if i != col {
                let f = m[i][col];
                if f != 0.0 {
                    for j in 0..D {
                        m[i][j] -= f * m[col][j];
                        inv[i][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Row Gram–Schmidt: returns `(T, O)` with `a·O = T`, `T` lower triangular
/// with positive diagonal and `O` orthogonal (columns are the orthonormalized
/// rows of `a`).
pub fn lq<const D: usize>(a: &Mat<D>) -> Option<(Mat<D>, Mat<D>)> {
    let mut e: [Vector<D>; D] = [[0.0; D]; D];
    for i in 0..D {
        let mut v = a[i];
        // two passes of modified Gram–Schmidt for orthogonality to roundoff
        for _ in 0..2 {
            for ej in e.iter().take(i) {
                let p = dot(&v, ej);
                for k in 0..D {
                    v[k] -= p * ej[k];
                }
            }
        }
        let n = norm(&v);
        if n <= 1e-300 {
            return None;
        }
        e[i] = scale(&v, 1.0 / n);
    }
    let o = transpose(&e);
    let mut t = mul(a, &o);
    for (i, row) in t.iter_mut().enumerate() {
        for v in row.iter_mut().skip(i + 1) {
            *v = 0.0;
        }
    }
    Some((t, o))
}

pub fn imat_mul<const D: usize>(a: &[[i64; D]; D], b: &[[i64; D]; D]) -> [[i64; D]; D] {
    let mut c = [[0i64; D]; D];
    for i in 0..D {
        for j in 0..D {
            c[i][j] = (0..D).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

pub fn imat_det<const D: usize>(a: &[[i64; D]; D]) -> i64 {
    match D {
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        3 => {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
        _ => unimplemented!("determinant only for D <= 3"),
    }
}

pub fn imat_transpose<const D: usize>(a: &[[i64; D]; D]) -> [[i64; D]; D] {
    let mut t = [[0i64; D]; D];
    for i in 0..D {
        for j in 0..D {
            t[j][i] = a[i][j];
        }
    }
    t
}

/// Exact inverse of a unimodular integer matrix (adjugate over ±1).
pub fn imat_inverse_unimodular<const D: usize>(a: &[[i64; D]; D]) -> Option<[[i64; D]; D]> {
    let d = imat_det(a);
    if d != 1 && d != -1 {
        return None;
    }
    let mut inv = [[0i64; D]; D];
    match D {
        2 => {
            inv[0][0] = a[1][1];
            inv[0][1] = -a[0][1];
            inv[1][0] = -a[1][0];
            inv[1][1] = a[0][0];
        }
        3 => {
            for i in 0..3 {
                for j in 0..3 {
                    let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                    let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                    inv[i][j] = a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
                }
            }
        }
        _ => return None,
    }
    Some(inv.map(|row| row.map(|v| v * d)))
}

pub fn to_real<const D: usize>(a: &[[i64; D]; D]) -> Mat<D> {
    a.map(|row| row.map(|v| v as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_lq() {
        let a = [[1.0, 0.2, -0.3], [0.4, 2.0, 0.1], [-0.5, 0.3, 1.5]];
        let ai = inverse(&a).unwrap();
        let p = mul(&a, &ai);
        for i in 0..3 {
            for j in 0..3 {
                assert!((p[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let (t, o) = lq(&a).unwrap();
        let oto = mul(&transpose(&o), &o);
        let ao = mul(&a, &o);
        for i in 0..3 {
            assert!(t[i][i] > 0.0);
            for j in 0..3 {
                assert!((oto[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
                assert!((ao[i][j] - t[i][j]).abs() < 1e-14);
            }
        }
        assert!(inverse(&[[1.0, 2.0], [2.0, 4.0]]).is_none());
    }

    #[test]
    fn unimodular_inverse() {
        let w = [[2i64, 1, 0], [1, 1, 0], [3, -1, 1]];
        let wi = imat_inverse_unimodular(&w).unwrap();
        assert_eq!(imat_mul(&w, &wi), [[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        let w2 = [[0i64, 1], [-1, 0]];
        assert_eq!(imat_mul(&w2, &imat_inverse_unimodular(&w2).unwrap()), [[1, 0], [0, 1]]);
    }
}
