//! Dense complex linear algebra kernels used by the basis builder and the
//! companion-matrix root fallback. Matrices are small (a few hundred rows),
//! so simple O(n³) routines are used throughout.

use crate::{Complex64, Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone)]
pub struct CMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        CMatrix {
            n_rows,
            n_cols,
            data: vec![Complex64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n_cols + j] = v;
    }

    /// y = A·x.
    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| {
                let row = &self.data[i * self.n_cols..(i + 1) * self.n_cols];
                row.iter().zip(x).map(|(a, b)| a * b).sum()
            })
            .collect()
    }
}

/// Cholesky factorization A = L·Lᴴ of a Hermitian positive definite matrix.
/// Returns the lower-triangular factor.
pub fn cholesky(a: &CMatrix) -> Result<CMatrix> {
    let n = a.n_rows;
    assert_eq!(n, a.n_cols);
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a.get(j, j).re;
        for k in 0..j {
            d -= l.get(j, k).norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { index: j, pivot: d });
        }
        let djj = d.sqrt();
        l.set(j, j, Complex64::new(djj, 0.0));
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, s / djj);
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix by forward substitution.
pub fn invert_lower(l: &CMatrix) -> CMatrix {
    let n = l.n_rows;
    let mut inv = CMatrix::zeros(n, n);
    for j in 0..n {
        inv.set(j, j, Complex64::new(1.0, 0.0) / l.get(j, j));
        for i in j + 1..n {
            let mut s = Complex64::new(0.0, 0.0);
            for k in j..i {
                s += l.get(i, k) * inv.get(k, j);
            }
            inv.set(i, j, -s / l.get(i, i));
        }
    }
    inv
}

/// Eigendecomposition of a Hermitian matrix via the real symmetric embedding
/// [[X, -Y], [Y, X]] and cyclic Jacobi sweeps. Returns eigenvalues in
/// ascending order with matching complex eigenvectors (columns).
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.n_rows;
    let m = 2 * n;
    let mut s = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            let v = a.get(i, j);
            s[i * m + j] = v.re;
            s[i * m + (n + j)] = -v.im;
            s[(n + i) * m + j] = v.im;
            s[(n + i) * m + (n + j)] = v.re;
        }
    }
    let mut v = vec![0.0f64; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    // Cyclic Jacobi on the real symmetric embedding.
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..m {
            for q in p + 1..m {
                off += s[p * m + q] * s[p * m + q];
            }
        }
        if off.sqrt() < 1e-14 * (1.0 + frobenius(&s, m)) {
            break;
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = s[p * m + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = s[p * m + p];
                let aqq = s[q * m + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let skp = s[k * m + p];
                    let skq = s[k * m + q];
                    s[k * m + p] = c * skp - sn * skq;
                    s[k * m + q] = sn * skp + c * skq;
                }
                for k in 0..m {
                    let spk = s[p * m + k];
                    let sqk = s[q * m + k];
                    s[p * m + k] = c * spk - sn * sqk;
                    s[q * m + k] = sn * spk + c * sqk;
                }
                for k in 0..m {
                    let vkp = v[k * m + p];
                    let vkq = v[k * m + q];
                    v[k * m + p] = c * vkp - sn * vkq;
                    v[k * m + q] = sn * vkp + c * vkq;
                }
            }
        }
    }
    // Each eigenvalue of A appears twice in the embedding; keep one of each
    // conjugate pair, greedily pairing nearest duplicates.
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&i, &j| s[i * m + i].partial_cmp(&s[j * m + j]).unwrap());
    let mut vals = Vec::with_capacity(n);
    let mut vecs = CMatrix::zeros(n, n);
    for (col, pair) in idx.chunks(2).enumerate() {
        let i = pair[0];
        vals.push(0.5 * (s[i * m + i] + s[pair[1] * m + pair[1]]));
        // Complex eigenvector from the real one: x = u + i·w with [u; w].
        let mut norm = 0.0;
        for r in 0..n {
            let x = Complex64::new(v[r * m + i], v[(n + r) * m + i]);
            norm += x.norm_sqr();
            vecs.set(r, col, x);
        }
        let norm = norm.sqrt();
        for r in 0..n {
            let x = vecs.get(r, col);
            vecs.set(r, col, x / norm);
        }
    }
    (vals, vecs)
}

fn frobenius(s: &[f64], m: usize) -> f64 {
    s.iter().take(m * m).map(|x| x * x).sum::<f64>().sqrt()
}

/// Eigenvalues of a complex upper Hessenberg matrix by shifted QR with
/// Givens rotations. Used on companion matrices as the root-finding
/// fallback path.
pub fn hessenberg_eigenvalues(h: &CMatrix, max_iter: usize) -> Result<Vec<Complex64>> {
    let n = h.n_rows;
    let mut h = h.clone();
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n; // active block is 0..hi
    let mut iter = 0usize;
    while hi > 0 {
        if hi == 1 {
            eigs.push(h.get(0, 0));
            hi = 0;
            continue;
        }
        // Deflate where a subdiagonal entry is negligible.
        let mut deflated = false;
        for k in (1..hi).rev() {
            let sub = h.get(k, k - 1).norm();
            let scale = h.get(k - 1, k - 1).norm() + h.get(k, k).norm();
            if sub <= 1e-15 * (scale + 1e-300) {
                if k == hi - 1 {
                    eigs.push(h.get(hi - 1, hi - 1));
                    hi -= 1;
                    deflated = true;
                }
                break;
            }
        }
        if deflated {
            continue;
        }
        iter += 1;
        if iter > max_iter {
            return Err(Error::NonConvergent);
        }
        // Wilkinson shift from the trailing 2x2 block.
        let a = h.get(hi - 2, hi - 2);
        let b = h.get(hi - 2, hi - 1);
        let c = h.get(hi - 1, hi - 2);
        let d = h.get(hi - 1, hi - 1);
        let tr = a + d;
        let det = a * d - b * c;
        let disc = (tr * tr - 4.0 * det).sqrt();
        let l1 = (tr + disc) * 0.5;
        let l2 = (tr - disc) * 0.5;
        let shift = if (l1 - d).norm() < (l2 - d).norm() { l1 } else { l2 };
        // Occasional exceptional shift to break symmetry stalls.
        let shift = if iter % 17 == 0 {
            shift + Complex64::new(1.0, 0.5) * h.get(hi - 1, hi - 2).norm()
        } else {
            shift
        };
        for k in 0..hi {
            let v = h.get(k, k) - shift;
            h.set(k, k, v);
        }
        // QR by Givens on the subdiagonal, then RQ.
        let mut rots: Vec<(f64, Complex64, Complex64)> = Vec::with_capacity(hi - 1);
        for k in 0..hi - 1 {
            let x = h.get(k, k);
            let y = h.get(k + 1, k);
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            if r == 0.0 {
                rots.push((0.0, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
                continue;
            }
            let cx = x.conj() / r;
            let cy = y.conj() / r;
            // G = [[cx, cy], [-y, x]]/r rows applied to rows k, k+1.
            for j in k..hi {
                let hk = h.get(k, j);
                let hk1 = h.get(k + 1, j);
                h.set(k, j, cx * hk + cy * hk1);
                h.set(k + 1, j, (-y * hk + x * hk1) / r);
            }
            rots.push((r, x, y));
        }
        for (k, (r, x, y)) in rots.iter().enumerate() {
            if *r == 0.0 {
                continue;
            }
            for i in 0..(k + 2).min(hi) {
                let hik = h.get(i, k);
                let hik1 = h.get(i, k + 1);
                h.set(i, k, (hik * x + hik1 * y) / r);
                h.set(i, k + 1, (-hik * y.conj() + hik1 * x.conj()) / r);
            }
        }
        for k in 0..hi {
            let v = h.get(k, k) + shift;
            h.set(k, k, v);
        }
    }
    Ok(eigs)
}
