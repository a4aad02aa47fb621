//! Small banded solvers. The radial operators are tridiagonal; the coupled
//! Newton system interleaves (u_i, v_i) and becomes a band of half-width 3.

/// Solve a tridiagonal system in place (Thomas algorithm, no pivoting).
/// `lower[i]` couples row i+1 to column i, `upper[i]` row i to column i+1.
/// Suitable for the symmetric positive definite operators used here.
pub(crate) fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) -> bool {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = diag[0];
    if d == 0.0 || !d.is_finite() {
        return false;
    }
    rhs[0] /= d;
    if n > 1 {
        c[0] = upper[0] / d;
    }
    for i in 1..n {
        d = diag[i] - lower[i - 1] * c[i - 1];
        if d == 0.0 || !d.is_finite() {
            return false;
        }
        if i + 1 < n {
            c[i] = upper[i] / d;
        }
        rhs[i] = (rhs[i] - lower[i - 1] * rhs[i - 1]) / d;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    true
}

/// Band matrix with `kl` sub- and `ku` super-diagonals, LU-factorized with
/// partial pivoting (the LAPACK `gbtrf` layout, fill-in included).
pub(crate) struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    // row-major storage of width 2kl+ku+1; entry (i, j) at ab[i][j - i + kl + kl]
    ab: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    pub(crate) fn new(n: usize, kl: usize, ku: usize) -> BandLu {
        BandLu {
            n,
            kl,
            ku,
            ab: vec![0.0; n * (2 * kl + ku + 1)],
            piv: vec![0; n],
        }
    }

    fn width(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width() + (j + 2 * self.kl - i)
    }

    pub(crate) fn add(&mut self, i: usize, j: usize, x: f64) {
        debug_assert!(j + self.kl >= i && j <= i + self.ku);
        let k = self.idx(i, j);
        self.ab[k] += x;
    }

    /// Factorize in place; returns false on an exactly singular pivot.
    pub(crate) fn factor(&mut self) -> bool {
        let n = self.n;
        let kl = self.kl;
        let kuf = self.ku + kl; // upper bandwidth after fill-in
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.ab[self.idx(k, k)].abs();
            for i in k + 1..=last {
                let x = self.ab[self.idx(i, k)].abs();
                if x > best {
                    best = x;
                    p = i;
                }
            }
            self.piv[k] = p;
            if best == 0.0 || !best.is_finite() {
                return false;
            }
            let jmax = (k + kuf).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let a = self.idx(k, j);
                    let b = self.idx(p, j);
                    self.ab.swap(a, b);
                }
            }
            let pivot = self.ab[self.idx(k, k)];
            for i in k + 1..=last {
                let li = self.idx(i, k);
                let l = self.ab[li] / pivot;
                self.ab[li] = l;
                if l != 0.0 {
                    for j in k + 1..=jmax {
                        let kj = self.ab[self.idx(k, j)];
                        let ij = self.idx(i, j);
                        self.ab[ij] -= l * kj;
                    }
                }
            }
        }
        true
    }

    pub(crate) fn solve(&self, b: &mut [f64]) {
        let n = self.n;
        let kl = self.kl;
        let kuf = self.ku + kl;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let last = (k + kl).min(n - 1);
            let bk = b[k];
            for (i, bi) in b.iter_mut().enumerate().take(last + 1).skip(k + 1) {
                *bi -= self.ab[self.idx(i, k)] * bk;
            }
        }
        for k in (0..n).rev() {
            let jmax = (k + kuf).min(n - 1);
            let mut s = b[k];
            for (j, bj) in b.iter().enumerate().take(jmax + 1).skip(k + 1) {
                s -= self.ab[self.idx(k, j)] * bj;
            }
            b[k] = s / self.ab[self.idx(k, k)];
        }
    }
}

/// Gaussian elimination with partial pivoting for tiny dense systems.
pub(crate) fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k] == 0.0 || !a[p][k].is_finite() {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let l = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= l * a[k][j];
            }
            b[i] -= l * b[k];
        }
    }
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * b[j]).sum();
        b[k] = (b[k] - s) / a[k][k];
    }
    Some(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_matches_dense() {
        let n = 6;
        let lower = vec![-1.0; n - 1];
        let upper = vec![-0.5; n - 1];
        let diag: Vec<f64> = (0..n).map(|i| 3.0 + i as f64).collect();
        let x: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut b = vec![0.0; n];
        for i in 0..n {
            b[i] = diag[i] * x[i];
            if i > 0 {
                b[i] += lower[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                b[i] += upper[i] * x[i + 1];
            }
        }
        assert!(solve_tridiagonal(&lower, &diag, &upper, &mut b));
        for i in 0..n {
            assert!((b[i] - x[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn band_lu_handles_indefinite_and_zero_diagonal() {
        let n = 9;
        let (kl, ku) = (2, 3);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if j + kl >= i && j <= i + ku {
                    dense[i][j] = ((i * 7 + j * 3) % 5) as f64 - 2.0 + if i == j { 0.0 } else { 0.3 };
                }
            }
        }
        dense[0][0] = 0.0;
        let mut lu = BandLu::new(n, kl, ku);
        for i in 0..n {
            for j in 0..n {
                if dense[i][j] != 0.0 {
                    lu.add(i, j, dense[i][j]);
                }
            }
        }
        let x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 0.25).collect();
        let mut b: Vec<f64> = (0..n).map(|i| (0..n).map(|j| dense[i][j] * x[j]).sum()).collect();
        let expect = solve_dense(dense, b.clone()).unwrap();
        assert!(lu.factor());
        lu.solve(&mut b);
        for i in 0..n {
            assert!((b[i] - x[i]).abs() < 1e-10, "{} vs {}", b[i], x[i]);
            assert!((expect[i] - x[i]).abs() < 1e-10);
        }
    }
}
