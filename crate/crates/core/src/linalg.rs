//! Dense LU and sparse BiCGSTAB backends for the chain solvers.

/// Row-major dense matrix.
pub struct DenseMatrix {
    pub n: usize,
    pub data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    /// In-place LU factorization with partial pivoting; solves A x = b.
    /// Returns None when a pivot underflows.
    pub fn solve(mut self, mut b: Vec<f64>) -> Option<Vec<f64>> {
        let n = self.n;
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            // pivot
            let mut best = col;
            let mut best_abs = self.at(col, col).abs();
            for row in col + 1..n {
                let v = self.at(row, col).abs();
                if v > best_abs {
                    best = row;
                    best_abs = v;
                }
            }
            if best_abs < f64::MIN_POSITIVE * 4.0 {
                return None;
            }
            if best != col {
                for j in 0..n {
                    self.data.swap(col * n + j, best * n + j);
                }
                b.swap(col, best);
                perm.swap(col, best);
            }
            let pivot = self.at(col, col);
            for row in col + 1..n {
                let factor = self.at(row, col) / pivot;
                if factor == 0.0 {
                    continue;
                }
                self.set(row, col, 0.0);
                // row update; split borrows around the pivot row
                let (top, bottom) = self.data.split_at_mut(row * n);
                let pivot_row = &top[col * n..col * n + n];
                let this_row = &mut bottom[..n];
                for j in col + 1..n {
                    this_row[j] -= factor * pivot_row[j];
                }
                b[row] -= factor * b[col];
            }
        }
        // back substitution
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = b[i];
            for j in i + 1..n {
                acc -= self.at(i, j) * x[j];
            }
            x[i] = acc / self.at(i, i);
        }
        Some(x)
    }
}

/// Matrix-free linear operator.
pub trait LinearOp {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// Diagonal entries, used for Jacobi preconditioning.
    fn diagonal(&self) -> Vec<f64>;
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned BiCGSTAB with restart on breakdown or stagnation;
/// returns (x, relative residual).
pub fn bicgstab<O: LinearOp>(
    op: &O,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let n = op.dim();
    let b_norm = norm(b).max(f64::MIN_POSITIVE);
    let inv_diag: Vec<f64> = op
        .diagonal()
        .iter()
        .map(|&d| if d.abs() > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let precond = |v: &[f64]| -> Vec<f64> {
        v.iter().zip(&inv_diag).map(|(x, d)| x * d).collect()
    };

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut r0 = r.clone();
    let mut rho = 1.0f64;
    let mut alpha = 1.0f64;
    let mut omega = 1.0f64;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut best_x = x.clone();
    let mut best_res = norm(&r) / b_norm;
    let mut since_progress = 0usize;

    let mut iter = 0usize;
    while iter < max_iter {
        iter += 1;
        let mut restart = false;
        let rho_new = dot(&r0, &r);
        if rho_new.abs() < 1e-280 * b_norm * b_norm {
            restart = true;
        } else {
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..n {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            let p_hat = precond(&p);
            op.apply(&p_hat, &mut v);
            let denom = dot(&r0, &v);
            if denom.abs() < 1e-280 * b_norm {
                restart = true;
            } else {
                alpha = rho / denom;
                let s: Vec<f64> =
                    r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
                let s_norm = norm(&s) / b_norm;
                if s_norm < tol {
                    for i in 0..n {
                        x[i] += alpha * p_hat[i];
                    }
                    return (x, s_norm);
                }
                let s_hat = precond(&s);
                let mut t = vec![0.0; n];
                op.apply(&s_hat, &mut t);
                let tt = dot(&t, &t);
                if tt.abs() < 1e-280 {
                    restart = true;
                } else {
                    omega = dot(&t, &s) / tt;
                    for i in 0..n {
                        x[i] += alpha * p_hat[i] + omega * s_hat[i];
                        r[i] = s[i] - omega * t[i];
                    }
                    let res = norm(&r) / b_norm;
                    if std::env::var("METASTAB_DEBUG_SOLVE").is_ok() && iter % 500 == 1 {
                        eprintln!("  bicg iter {iter}: res={res:.3e} best={best_res:.3e} alpha={alpha:.3e} omega={omega:.3e}");
                    }
                    if res < best_res {
                        best_res = res;
                        best_x.copy_from_slice(&x);
                        since_progress = 0;
                    } else {
                        since_progress += 1;
                    }
                    if res < tol {
                        return (x, res);
                    }
                    if omega.abs() < 1e-280 || !res.is_finite() || since_progress > 500 {
                        restart = true;
                    }
                }
            }
        }
        if restart {
            // recompute the true residual at the best iterate and restart
            // the Krylov space from there
            x.copy_from_slice(&best_x);
            let mut ax = vec![0.0; n];
            op.apply(&x, &mut ax);
            for i in 0..n {
                r[i] = b[i] - ax[i];
            }
            r0.copy_from_slice(&r);
            rho = 1.0;
            alpha = 1.0;
            omega = 1.0;
            v.iter_mut().for_each(|z| *z = 0.0);
            p.iter_mut().for_each(|z| *z = 0.0);
            let res = norm(&r) / b_norm;
            if res < tol {
                return (x, res);
            }
            since_progress = 0;
        }
    }
    (best_x, best_res)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Dense(DenseMatrix);

    impl LinearOp for Dense {
        fn dim(&self) -> usize {
            self.0.n
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..self.0.n {
                y[i] = (0..self.0.n).map(|j| self.0.at(i, j) * x[j]).sum();
            }
        }
        fn diagonal(&self) -> Vec<f64> {
            (0..self.0.n).map(|i| self.0.at(i, i)).collect()
        }
    }

    fn laplacian_like(n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, 4.0 + (i % 3) as f64);
            if i + 1 < n {
                m.set(i, i + 1, -1.5);
                m.set(i + 1, i, -0.5);
            }
        }
        m
    }

    #[test]
    fn lu_solves_small_system() {
        let n = 40;
        let m = laplacian_like(n);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; n];
        Dense(laplacian_like(n)).apply(&x_true, &mut b);
        let x = m.solve(b).unwrap();
        for i in 0..n {
            assert!((x[i] - x_true[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn bicgstab_matches_lu() {
        let n = 120;
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.13).cos()).collect();
        let mut b = vec![0.0; n];
        let op = Dense(laplacian_like(n));
        op.apply(&x_true, &mut b);
        let (x, res) = bicgstab(&op, &b, 1e-13, 10_000);
        assert!(res < 1e-12);
        for i in 0..n {
            assert!((x[i] - x_true[i]).abs() < 1e-8);
        }
    }
}
