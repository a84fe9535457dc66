//! Shell enumeration and deterministic reduction.
//!
//! Terms of one shell may be evaluated in parallel; they are collected in
//! enumeration order and folded sequentially with Neumaier compensation, so a
//! result never depends on the number of worker threads.

use num_complex::Complex64 as C;

use crate::linalg::{self, Mat, Vector};

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier1 {
    sum: f64,
    comp: f64,
}

impl Neumaier1 {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    re: Neumaier1,
    im: Neumaier1,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: C) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    pub fn value(&self) -> C {
        C::new(self.re.value(), self.im.value())
    }
}

impl Extend<C> for Neumaier {
    fn extend<I: IntoIterator<Item = C>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Order-preserving map, on the rayon pool when `parallel` is set and the
/// `parallel` feature is compiled in.
pub fn ordered_map<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel && items.len() > 1 {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    let _ = parallel;
    items.iter().map(f).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<const D: usize> {
    pub n: [i64; D],
    /// Squared metric radius `|B n + c|²`.
    pub r2: f64,
}

/// Integer points `n` grouped into shells `k·h ≤ |B n + c| < (k+1)·h`.
///
/// Enumeration is by Fincke–Pohst over the triangular factor of `B` inside a
/// ball that doubles whenever the requested shell lies beyond it.
pub struct ShellEnumerator<const D: usize> {
    b: Mat<D>,
    c: Vector<D>,
    r: Mat<D>,
    ct: Vector<D>,
    width: f64,
    covered: usize,
    pending: Vec<Vec<Point<D>>>,
    next: usize,
}

impl<const D: usize> ShellEnumerator<D> {
    /// `width = None` uses the shortest column length of `B`.
    pub fn new(b: Mat<D>, c: Vector<D>, width: Option<f64>) -> Self {
        // B = O·Tᵀ from the row factorization of Bᵀ, so |Bn + c| = |Tᵀn + Oᵀc|
        let (t, o) = linalg::lq(&linalg::transpose(&b)).expect("shell basis must be invertible");
        let r = linalg::transpose(&t);
        let ct = linalg::mat_vec(&linalg::transpose(&o), &c);
        let width = width.unwrap_or_else(|| shortest_column(&b));
        Self { b, c, r, ct, width, covered: 0, pending: Vec::new(), next: 0 }
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Index of the shell `next_shell` returns next.
    pub fn position(&self) -> usize {
        self.next
    }

    pub fn next_shell(&mut self) -> Vec<Point<D>> {
        if self.next >= self.covered {
            let upto = (self.covered * 2).max(8);
            let mut buckets: Vec<Vec<Point<D>>> = vec![Vec::new(); upto - self.covered];
            let lo = self.covered;
            self.ball(upto as f64 * self.width, |p| {
                let k = (p.r2.sqrt() / self.width) as usize;
                if k >= lo && k < upto {
                    buckets[k - lo].push(p);
                }
            });
            self.pending = buckets;
            self.pending.reverse();
            self.covered = upto;
        }
        self.next += 1;
        self.pending.pop().unwrap_or_default()
    }

    /// Calls `visit` for every point with `|B n + c| < radius`.
    pub fn ball<F: FnMut(Point<D>)>(&self, radius: f64, mut visit: F) {
        let mut n = [0i64; D];
        self.descend(D, radius * radius, 0.0, &mut n, &mut visit);
    }

    fn descend<F: FnMut(Point<D>)>(&self, level: usize, r2max: f64, acc: f64, n: &mut [i64; D], visit: &mut F) {
        if level == 0 {
            // recompute exactly from B rather than from the factor
            let v = linalg::add(&linalg::mat_vec(&self.b, &n.map(|k| k as f64)), &self.c);
            let r2 = linalg::dot(&v, &v);
            if r2 < r2max {
                visit(Point { n: *n, r2 });
            }
            return;
        }
        let i = level - 1;
        let off: f64 = self.ct[i] + ((i + 1)..D).map(|j| self.r[i][j] * n[j] as f64).sum::<f64>();
        let rem = r2max - acc;
        if rem < 0.0 {
            return;
        }
        // slack keeps boundary points whose exact radius is recomputed above
        let half = rem.sqrt() * (1.0 + 1e-12) + 1e-12 * self.width;
        let rii = self.r[i][i];
        let lo = ((-half - off) / rii).ceil() as i64;
        let hi = ((half - off) / rii).floor() as i64;
        for k in lo..=hi {
            n[i] = k;
            let y = rii * k as f64 + off;
            self.descend(i, r2max, acc + y * y, n, visit);
        }
        n[i] = 0;
    }
}

pub fn shortest_column<const D: usize>(b: &Mat<D>) -> f64 {
    (0..D)
        .map(|j| (0..D).map(|i| b[i][j] * b[i][j]).sum::<f64>().sqrt())
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShellSum {
    pub value: C,
    pub shells: usize,
    pub last_shell_magnitude: f64,
    pub converged: bool,
}

/// Sums `term` shell by shell until three consecutive non-empty shells each
/// stay below `tol` relative to the running total (or `max_shells` is hit).
pub fn sum_by_shells<const D: usize, E, F>(
    shells: &mut ShellEnumerator<D>,
    tol: f64,
    max_shells: usize,
    parallel: bool,
    term: F,
) -> Result<ShellSum, E>
where
    E: Send,
    F: Fn(&Point<D>) -> Result<C, E> + Sync + Send,
{
    let mut acc = Neumaier::new();
    let mut total_abs = 0.0;
    let mut quiet = 0;
    let mut last = 0.0;
    while shells.position() < max_shells {
        let pts = shells.next_shell();
        if pts.is_empty() {
            continue;
        }
        let terms = ordered_map(&pts, parallel, &term);
        let mut mag = 0.0;
        for t in terms {
            let t = t?;
            mag += t.norm();
            acc.add(t);
        }
        total_abs += mag;
        last = mag;
        let reference = acc.value().norm().max(1e-6 * total_abs);
        if mag <= tol * reference {
            quiet += 1;
            if quiet >= 3 {
                return Ok(ShellSum { value: acc.value(), shells: shells.position(), last_shell_magnitude: last, converged: true });
            }
        } else {
            quiet = 0;
        }
    }
    Ok(ShellSum { value: acc.value(), shells: shells.position(), last_shell_magnitude: last, converged: false })
}
