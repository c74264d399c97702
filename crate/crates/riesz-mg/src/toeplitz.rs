//! Matrix-free structured operators: symmetric Toeplitz, banded Toeplitz,
//! BTTB with diagonal scaling, plus dense materialization and extremal
//! eigenvalue estimation used as test oracles and coarse-solve fallbacks.

use nalgebra::DMatrix;

use crate::error::{Result, RieszError};
use crate::fft::{next_pow2, Circulant};
use crate::frac::{c_alpha, grunwald_coeffs, FracOrder};

/// Abstract real linear operator on R^n.
pub trait LinearOperator {
    fn size(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn diagonal(&self) -> Vec<f64>;

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.size()];
        self.apply(x, &mut y);
        y
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn size(&self) -> usize {
        (**self).size()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply(x, y)
    }
    fn diagonal(&self) -> Vec<f64> {
        (**self).diagonal()
    }
}

/// Symmetric Toeplitz matrix stored by its first column; products go through
/// a circulant embedding of the next power-of-two length >= 2M - 1.
pub struct SymmToeplitz {
    first_col: Vec<f64>,
    conv: Circulant,
}

impl SymmToeplitz {
    pub fn new(first_col: Vec<f64>) -> Self {
        let m = first_col.len();
        assert!(m >= 1);
        let len = next_pow2(2 * m - 1);
        let mut embed = vec![0.0; len];
        embed[..m].copy_from_slice(&first_col);
        for j in 1..m {
            embed[len - j] = first_col[j];
        }
        let conv = Circulant::new(&embed);
        Self { first_col, conv }
    }

    pub fn size(&self) -> usize {
        self.first_col.len()
    }

    pub fn first_col(&self) -> &[f64] {
        &self.first_col
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        let mut out = vec![0.0; self.conv.len()];
        self.conv.apply_into(x, &mut out);
        y.copy_from_slice(&out[..self.size()]);
    }
}

impl LinearOperator for SymmToeplitz {
    fn size(&self) -> usize {
        self.first_col.len()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.matvec_into(x, y);
    }
    fn diagonal(&self) -> Vec<f64> {
        vec![self.first_col[0]; self.size()]
    }
}

/// Fast symmetric-Toeplitz product with an explicit length check.
pub fn toeplitz_matvec(t: &SymmToeplitz, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != t.size() {
        return Err(RieszError::LengthMismatch {
            expected: t.size(),
            got: v.len(),
        });
    }
    Ok(t.apply_vec(v))
}

/// First column of the symmetrized Grunwald scheme matrix in the
/// positive-definite convention, scaled by `scale` (= d c(alpha) / h^alpha):
/// col[0] = 2 alpha, col[1] = -(g_0 + g_2), col[j] = -g_{j+1} for j >= 2,
/// truncated to `band` nonzero offsets (band = m for the full matrix).
pub fn riesz_first_col(alpha: FracOrder, m: usize, band: usize, scale: f64) -> Vec<f64> {
    let a = alpha.get();
    let band = band.min(m);
    let table = grunwald_coeffs(alpha, band + 1).expect("band >= 1");
    let g = &table.g;
    let mut col = vec![0.0; m];
    col[0] = scale * 2.0 * a;
    if band >= 2 {
        col[1] = -scale * (g[0] + g[2]);
    }
    for (j, c) in col.iter_mut().enumerate().take(band).skip(2) {
        *c = -scale * g[j + 1];
    }
    col
}

/// 1D Riesz fractional diffusion matrix A_M^alpha = d c(alpha)/h^alpha (G + G^T)
/// in the symmetric positive definite convention.
pub struct RieszMatrix1D {
    pub alpha: FracOrder,
    pub m: usize,
    pub h: f64,
    pub d: f64,
    pub toeplitz: SymmToeplitz,
}

pub fn assemble_riesz_1d(
    alpha: FracOrder,
    m: usize,
    domain: (f64, f64),
    d: f64,
) -> Result<RieszMatrix1D> {
    if m < 3 {
        return Err(RieszError::Size(format!("need M >= 3, got {m}")));
    }
    let h = (domain.1 - domain.0) / (m + 1) as f64;
    let scale = d * c_alpha(alpha) / h.powf(alpha.get());
    let col = riesz_first_col(alpha, m, m, scale);
    Ok(RieszMatrix1D {
        alpha,
        m,
        h,
        d,
        toeplitz: SymmToeplitz::new(col),
    })
}

impl LinearOperator for RieszMatrix1D {
    fn size(&self) -> usize {
        self.m
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.toeplitz.matvec_into(x, y);
    }
    fn diagonal(&self) -> Vec<f64> {
        self.toeplitz.diagonal()
    }
}

/// Banded approximation sB of the scheme matrix: T_M(g_s) scaled by
/// d c(alpha)/h^alpha. Nonzero offsets are 0..s-1.
pub struct BandedRiesz {
    pub alpha: FracOrder,
    pub s: usize,
    pub m: usize,
    pub toeplitz: SymmToeplitz,
}

pub fn assemble_banded_1d(
    alpha: FracOrder,
    m: usize,
    s: usize,
    domain: (f64, f64),
    d: f64,
) -> Result<BandedRiesz> {
    if m < 3 {
        return Err(RieszError::Size(format!("need M >= 3, got {m}")));
    }
    if s < 1 {
        return Err(RieszError::Size("bandwidth s must be >= 1".into()));
    }
    let h = (domain.1 - domain.0) / (m + 1) as f64;
    let scale = d * c_alpha(alpha) / h.powf(alpha.get());
    let col = riesz_first_col(alpha, m, s, scale);
    Ok(BandedRiesz {
        alpha,
        s,
        m,
        toeplitz: SymmToeplitz::new(col),
    })
}

impl LinearOperator for BandedRiesz {
    fn size(&self) -> usize {
        self.m
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.toeplitz.matvec_into(x, y);
    }
    fn diagonal(&self) -> Vec<f64> {
        self.toeplitz.diagonal()
    }
}

/// 2D operator c(x,y) times x-fractional part plus e(x,y) times y-fractional
/// part, with unknowns ordered x-fastest. The Toeplitz factors carry the
/// c(gamma)/h^gamma scaling; `cdiag`/`ediag` hold the coefficient samples.
pub struct Riesz2DOperator {
    pub alpha: FracOrder,
    pub beta: FracOrder,
    pub m1: usize,
    pub m2: usize,
    pub hx: f64,
    pub hy: f64,
    pub cdiag: Vec<f64>,
    pub ediag: Vec<f64>,
    pub gx: SymmToeplitz,
    pub gy: SymmToeplitz,
}

#[allow(clippy::too_many_arguments)]
pub fn assemble_riesz_2d(
    alpha: FracOrder,
    beta: FracOrder,
    m1: usize,
    m2: usize,
    domain: ((f64, f64), (f64, f64)),
    coeff_c: &dyn Fn(f64, f64) -> f64,
    coeff_e: &dyn Fn(f64, f64) -> f64,
) -> Result<Riesz2DOperator> {
    assemble_riesz_2d_banded(alpha, beta, m1, m2, domain, coeff_c, coeff_e, usize::MAX)
}

/// Same as [`assemble_riesz_2d`] with the per-dimension Toeplitz factors
/// truncated to `band` offsets (the 2D banded matrix sA).
#[allow(clippy::too_many_arguments)]
pub fn assemble_riesz_2d_banded(
    alpha: FracOrder,
    beta: FracOrder,
    m1: usize,
    m2: usize,
    domain: ((f64, f64), (f64, f64)),
    coeff_c: &dyn Fn(f64, f64) -> f64,
    coeff_e: &dyn Fn(f64, f64) -> f64,
    band: usize,
) -> Result<Riesz2DOperator> {
    if m1 < 3 || m2 < 3 {
        return Err(RieszError::Size(format!(
            "need M1, M2 >= 3, got {m1} x {m2}"
        )));
    }
    let ((a1, b1), (a2, b2)) = domain;
    let hx = (b1 - a1) / (m1 + 1) as f64;
    let hy = (b2 - a2) / (m2 + 1) as f64;
    let mut cdiag = Vec::with_capacity(m1 * m2);
    let mut ediag = Vec::with_capacity(m1 * m2);
    for j in 1..=m2 {
        let y = a2 + j as f64 * hy;
        for i in 1..=m1 {
            let x = a1 + i as f64 * hx;
            let (cv, ev) = (coeff_c(x, y), coeff_e(x, y));
            if cv < 0.0 || ev < 0.0 {
                return Err(RieszError::Domain(format!(
                    "negative diffusion coefficient at ({x}, {y})"
                )));
            }
            cdiag.push(cv);
            ediag.push(ev);
        }
    }
    let sx = c_alpha(alpha) / hx.powf(alpha.get());
    let sy = c_alpha(beta) / hy.powf(beta.get());
    let gx = SymmToeplitz::new(riesz_first_col(alpha, m1, band.min(m1), sx));
    let gy = SymmToeplitz::new(riesz_first_col(beta, m2, band.min(m2), sy));
    Ok(Riesz2DOperator {
        alpha,
        beta,
        m1,
        m2,
        hx,
        hy,
        cdiag,
        ediag,
        gx,
        gy,
    })
}

impl Riesz2DOperator {
    pub fn has_constant_coeffs(&self) -> bool {
        let c0 = self.cdiag[0];
        let e0 = self.ediag[0];
        self.cdiag.iter().all(|&v| (v - c0).abs() < 1e-14)
            && self.ediag.iter().all(|&v| (v - e0).abs() < 1e-14)
    }
}

impl LinearOperator for Riesz2DOperator {
    fn size(&self) -> usize {
        self.m1 * self.m2
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (m1, m2) = (self.m1, self.m2);
        assert_eq!(x.len(), m1 * m2);
        // x-direction: Tx on each contiguous row of length m1.
        let mut row_out = vec![0.0; m1];
        for j in 0..m2 {
            let base = j * m1;
            self.gx.matvec_into(&x[base..base + m1], &mut row_out);
            for i in 0..m1 {
                y[base + i] = self.cdiag[base + i] * row_out[i];
            }
        }
        // y-direction: Ty on strided columns.
        let mut col_in = vec![0.0; m2];
        let mut col_out = vec![0.0; m2];
        for i in 0..m1 {
            for j in 0..m2 {
                col_in[j] = x[j * m1 + i];
            }
            self.gy.matvec_into(&col_in, &mut col_out);
            for j in 0..m2 {
                let idx = j * m1 + i;
                y[idx] += self.ediag[idx] * col_out[j];
            }
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let (dx, dy) = (self.gx.first_col()[0], self.gy.first_col()[0]);
        self.cdiag
            .iter()
            .zip(self.ediag.iter())
            .map(|(&c, &e)| c * dx + e * dy)
            .collect()
    }
}

/// Dense materialization oracle: applies the operator to the canonical basis.
pub fn materialize_dense<T: LinearOperator + ?Sized>(op: &T) -> Result<DMatrix<f64>> {
    let n = op.size();
    if n > 4096 {
        return Err(RieszError::Size(format!(
            "dense materialization capped at 4096, got {n}"
        )));
    }
    let mut dense = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        e[j] = 0.0;
        for i in 0..n {
            dense[(i, j)] = col[i];
        }
    }
    Ok(dense)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremal {
    Min,
    Max,
}

/// Rayleigh-quotient estimate of an extremal eigenvalue of a symmetric
/// positive definite operator. The maximum uses power iteration; the minimum
/// inverse iteration on a dense Cholesky factorization.
pub fn extremal_eigs<T: LinearOperator + ?Sized>(
    op: &T,
    which: Extremal,
    tol: f64,
) -> Result<f64> {
    let n = op.size();
    let max_iter = 50_000;
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + ((i * 2654435761) % 1000) as f64 / 1000.0)
        .collect();
    normalize(&mut v);

    match which {
        Extremal::Max => {
            let mut lambda = 0.0;
            let mut w = vec![0.0; n];
            for _ in 0..max_iter {
                op.apply(&v, &mut w);
                let next = dot(&v, &w);
                let norm = norm2(&w);
                if norm == 0.0 {
                    return Ok(0.0);
                }
                for (vi, wi) in v.iter_mut().zip(w.iter()) {
                    *vi = wi / norm;
                }
                if (next - lambda).abs() <= tol * next.abs().max(1e-300) {
                    return Ok(next);
                }
                lambda = next;
            }
            Err(RieszError::EigNonConvergence(max_iter))
        }
        Extremal::Min => {
            let dense = materialize_dense(op)?;
            let chol = nalgebra::Cholesky::new(dense)
                .ok_or_else(|| RieszError::Domain("operator is not SPD".into()))?;
            let mut lambda = f64::INFINITY;
            for _ in 0..max_iter {
                let w = chol.solve(&nalgebra::DVector::from_column_slice(&v));
                let w = w.as_slice().to_vec();
                let mu = dot(&v, &w);
                let norm = norm2(&w);
                for (vi, wi) in v.iter_mut().zip(w.iter()) {
                    *vi = wi / norm;
                }
                let next = 1.0 / mu;
                if (next - lambda).abs() <= tol * next.abs().max(1e-300) {
                    return Ok(next);
                }
                lambda = next;
            }
            Err(RieszError::EigNonConvergence(max_iter))
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(v: &mut [f64]) {
    let n = norm2(v);
    for x in v.iter_mut() {
        *x /= n;
    }
}
