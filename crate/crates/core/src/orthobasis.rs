//! Orthonormal polynomial bases for the weighted norm ∫|f|²e^{-2nφₙ}dV.
//!
//! Monomials are rescaled to mₖ = z^k/σₖ with σₖ² the raw Gram diagonal, so
//! the scaled Gram matrix has unit diagonal and its conditioning reflects the
//! geometry of the weight rather than raw monomial growth. The ONB is the
//! inverse Cholesky factor applied to the scaled monomials; radial weights
//! take a diagonal fast path.

use crate::linalg::{self, CMatrix};
use crate::quadrature::PlanarQuadrature;
use crate::weights::WeightSequence;
use crate::{Complex64, Error, Result};

/// Conditioning ceiling: past this the downstream asymptotics are noise at
/// double precision, so construction fails hard.
pub const COND_LIMIT: f64 = 1e12;

/// Scaled Gram matrix G_{jk}/(σⱼσₖ) together with the log scaling factors.
pub struct GramMatrix {
    pub scaled: CMatrix,
    /// ln σₖ with σₖ = √(raw diagonal ∫|z|^{2k}e^{-2nφₙ}dV).
    pub log_sigma: Vec<f64>,
}

/// Raw log-diagonal entries ln ∫ |z|^{2k} e^{-2nφₙ} dV for k = 0..=n.
fn log_diagonal(q: &PlanarQuadrature, w: &WeightSequence, n: usize) -> Result<Vec<f64>> {
    let d = n + 1;
    let mut diag = vec![0.0f64; d];
    if w.radial() {
        for (r, wt) in q.radial_rule() {
            let e = -2.0 * n as f64 * w.eval(n, Complex64::new(r, 0.0));
            let lr2 = 2.0 * r.ln();
            for (k, dk) in diag.iter_mut().enumerate() {
                *dk += wt * (k as f64 * lr2 + e).exp();
            }
        }
    } else {
        for (&z, &wt) in q.nodes.iter().zip(&q.weights) {
            let e = -2.0 * n as f64 * w.eval(n, z);
            let lr2 = 2.0 * z.norm().ln();
            for (k, dk) in diag.iter_mut().enumerate() {
                *dk += wt * (k as f64 * lr2 + e).exp();
            }
        }
    }
    diag.iter()
        .enumerate()
        .map(|(k, &v)| {
            if v > 0.0 && v.is_finite() {
                Ok(v.ln())
            } else {
                Err(Error::NotPositiveDefinite { index: k, pivot: v })
            }
        })
        .collect()
}

/// Gram matrix of the scaled monomials under the weighted inner product.
pub fn gram_matrix(q: &PlanarQuadrature, w: &WeightSequence, n: usize) -> Result<GramMatrix> {
    let d = n + 1;
    let log_diag = log_diagonal(q, w, n)?;
    let log_sigma: Vec<f64> = log_diag.iter().map(|v| 0.5 * v).collect();
    let mut scaled = CMatrix::zeros(d, d);
    if w.radial() {
        // Angular orthogonality kills every off-diagonal entry.
        for k in 0..d {
            scaled.set(k, k, Complex64::new(1.0, 0.0));
        }
        return Ok(GramMatrix { scaled, log_sigma });
    }
    // Accumulate Hermitian outer products of vₖ = mₖ(z)·e^{-nφₙ(z)}.
    let mut v = vec![Complex64::new(0.0, 0.0); d];
    let step: Vec<f64> = (0..n)
        .map(|k| (log_sigma[k] - log_sigma[k + 1]).exp())
        .collect();
    for (&z, &wt) in q.nodes.iter().zip(&q.weights) {
        let e = (-(n as f64) * w.eval(n, z) - log_sigma[0]).exp();
        v[0] = Complex64::new(e, 0.0);
        for k in 0..n {
            v[k + 1] = v[k] * z * step[k];
        }
        for j in 0..d {
            let wvj = wt * v[j];
            for k in 0..=j {
                let cur = scaled.get(j, k) + wvj * v[k].conj();
                scaled.set(j, k, cur);
            }
        }
    }
    for j in 0..d {
        for k in 0..j {
            scaled.set(k, j, scaled.get(j, k).conj());
        }
    }
    Ok(GramMatrix { scaled, log_sigma })
}

/// Degree-n orthonormal basis {Pⱼ} realized as a lower-triangular coefficient
/// matrix over the scaled monomials.
pub struct OrthoBasis {
    pub n: usize,
    /// dim 𝒫ₙ = n + 1.
    pub d_n: usize,
    /// Lower-triangular: Pⱼ = Σ_{k≤j} coeffs[j][k]·mₖ.
    pub coeffs: CMatrix,
    pub log_sigma: Vec<f64>,
    pub cond_estimate: f64,
    pub weight: WeightSequence,
    /// Truncation radius of the quadrature the basis was built with.
    pub radius: f64,
    /// Outer equilibrium radius (computed for radial weights, hinted for
    /// near-radial ones); bulk membership tests need it.
    pub bulk_radius: Option<f64>,
    /// Radial fast path: coeffs is the identity.
    pub diagonal: bool,
}

/// Build the ONB by Cholesky factorization of the scaled Gram matrix.
pub fn build_onb(q: &PlanarQuadrature, w: &WeightSequence, n: usize) -> Result<OrthoBasis> {
    let gram = gram_matrix(q, w, n)?;
    let d = n + 1;
    let (coeffs, cond) = if w.radial() {
        let mut c = CMatrix::zeros(d, d);
        for k in 0..d {
            c.set(k, k, Complex64::new(1.0, 0.0));
        }
        (c, 1.0)
    } else {
        let l = linalg::cholesky(&gram.scaled)?;
        let (evals, _) = linalg::hermitian_eigen(&gram.scaled);
        let lo = evals.first().copied().unwrap_or(0.0).max(0.0);
        let hi = evals.last().copied().unwrap_or(0.0);
        let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if cond > COND_LIMIT {
            return Err(Error::IllConditioned(cond));
        }
        (linalg::invert_lower(&l), cond)
    };
    let bulk_radius = if w.radial() {
        crate::weights::equilibrium_radial(w, n)
            .ok()
            .map(|eq| eq.outer_radius)
    } else {
        w.equilibrium_radius_hint(n)
    };
    Ok(OrthoBasis {
        n,
        d_n: d,
        coeffs,
        log_sigma: gram.log_sigma,
        cond_estimate: cond,
        weight: w.clone(),
        radius: q.radius,
        bulk_radius,
        diagonal: w.radial(),
    })
}

impl OrthoBasis {
    /// σₖ scaling factor (√ of the raw Gram diagonal).
    pub fn sigma(&self, k: usize) -> f64 {
        self.log_sigma[k].exp()
    }

    /// Scaled monomial values mₖ(z) = z^k/σₖ for k = 0..=n. Can overflow for
    /// large n·log|z|; prefer [`weighted_values`] in kernel work.
    pub fn scaled_monomials(&self, z: Complex64) -> Vec<Complex64> {
        let mut m = vec![Complex64::new(0.0, 0.0); self.d_n];
        m[0] = Complex64::new((-self.log_sigma[0]).exp(), 0.0);
        for k in 0..self.n {
            m[k + 1] = m[k] * z * (self.log_sigma[k] - self.log_sigma[k + 1]).exp();
        }
        m
    }

    /// Raw basis values (P₀(z), …, Pₙ(z)).
    pub fn values(&self, z: Complex64) -> Vec<Complex64> {
        self.coeffs.mul_vec(&self.scaled_monomials(z))
    }

    /// Weighted basis values uⱼ(z) = Pⱼ(z)·e^{-nφₙ(z)}, the overflow-safe
    /// form: |u(z)|² = Bₙ(z) and u(z)·ū(w) is the weighted kernel.
    pub fn weighted_values(&self, z: Complex64) -> Vec<Complex64> {
        let mut t = vec![Complex64::new(0.0, 0.0); self.d_n];
        let e = -(self.n as f64) * self.weight.eval(self.n, z) - self.log_sigma[0];
        t[0] = Complex64::new(e.exp(), 0.0);
        for k in 0..self.n {
            t[k + 1] = t[k] * z * (self.log_sigma[k] - self.log_sigma[k + 1]).exp();
        }
        if self.diagonal {
            for (k, v) in t.iter_mut().enumerate() {
                *v *= self.coeffs.get(k, k);
            }
            t
        } else {
            self.coeffs.mul_vec(&t)
        }
    }

    /// Monomial-basis coefficients (over the scaled monomials mₖ) of the
    /// random polynomial Σ cⱼPⱼ: aₖ = Σⱼ cⱼ·coeffs[j][k].
    pub fn combine_coefficients(&self, c: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(c.len(), self.d_n);
        let mut a = vec![Complex64::new(0.0, 0.0); self.d_n];
        for j in 0..self.d_n {
            for k in 0..=j {
                a[k] += c[j] * self.coeffs.get(j, k);
            }
        }
        a
    }
}

/// max_{j,k} |⟨Pⱼ,Pₖ⟩_{φₙ} − δ_{jk}| re-integrated under the given rule.
pub fn orthonormality_residual(b: &OrthoBasis, q: &PlanarQuadrature) -> f64 {
    let d = b.d_n;
    let mut gram = CMatrix::zeros(d, d);
    for (&z, &wt) in q.nodes.iter().zip(&q.weights) {
        let u = b.weighted_values(z);
        for j in 0..d {
            let wuj = wt * u[j];
            for k in 0..=j {
                let cur = gram.get(j, k) + wuj * u[k].conj();
                gram.set(j, k, cur);
            }
        }
    }
    let mut res = 0.0f64;
    for j in 0..d {
        for k in 0..=j {
            let expect = if j == k { 1.0 } else { 0.0 };
            res = res.max((gram.get(j, k) - Complex64::new(expect, 0.0)).norm());
        }
    }
    res
}
