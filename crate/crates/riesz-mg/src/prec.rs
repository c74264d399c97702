//! Preconditioners for the fractional diffusion systems: Strang and Chan
//! circulants, tau-algebra (sine-transform) approximations, and multigrid
//! cycles used as preconditioners, in one and two dimensions.
//!
//! Variable diffusion coefficients are frozen at their mean value for all
//! structured (circulant / tau) preconditioners.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, RieszError};
use crate::fft::{Circulant, SineTransform};
use crate::frac::FracOrder;
use crate::multigrid::{
    build_1d_hierarchy, build_2d_hierarchy, Coarsening, CycleKind, MgConfig, MultigridHierarchy,
    SmootherConfig,
};
use crate::toeplitz::{Riesz2DOperator, RieszMatrix1D};

/// A symmetric positive definite approximation of the system matrix, applied
/// through its inverse: `apply` computes z = P^{-1} r.
pub trait Preconditioner {
    fn size(&self) -> usize;
    fn apply_into(&self, r: &[f64], z: &mut [f64]);

    fn apply(&self, r: &[f64]) -> Vec<f64> {
        let mut z = vec![0.0; r.len()];
        self.apply_into(r, &mut z);
        z
    }
}

impl<P: Preconditioner + ?Sized> Preconditioner for &P {
    fn size(&self) -> usize {
        (**self).size()
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        (**self).apply_into(r, z)
    }
}

pub struct IdentityPrec {
    pub n: usize,
}

impl Preconditioner for IdentityPrec {
    fn size(&self) -> usize {
        self.n
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CirculantKind {
    /// Copy the central diagonals, reflect the rest.
    Strang,
    /// Optimal (Frobenius-closest) circulant: c_j = ((m-j) a_j + j a_{m-j})/m.
    Chan,
}

/// First column of the circulant approximation of the symmetric Toeplitz
/// matrix with first column `a` (length m).
pub fn circulant_first_col(kind: CirculantKind, a: &[f64]) -> Vec<f64> {
    let m = a.len();
    let mut c = vec![0.0; m];
    c[0] = a[0];
    for j in 1..m {
        c[j] = match kind {
            CirculantKind::Strang => {
                if 2 * j <= m {
                    a[j]
                } else {
                    a[m - j]
                }
            }
            CirculantKind::Chan => ((m - j) as f64 * a[j] + j as f64 * a[m - j]) / m as f64,
        };
    }
    c
}

/// Circulant preconditioner for a 1D symmetric Toeplitz system.
pub struct CirculantPrec {
    circ: Circulant,
    pub first_col: Vec<f64>,
    pub eigenvalues: Vec<f64>,
}

impl CirculantPrec {
    pub fn from_first_col(col: Vec<f64>) -> Result<Self> {
        let circ = Circulant::new(&col);
        let eig = circ.eigenvalues();
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if min <= 0.0 {
            return Err(RieszError::IndefinitePreconditioner(min));
        }
        Ok(Self {
            circ,
            first_col: col,
            eigenvalues: eig,
        })
    }

    pub fn new(kind: CirculantKind, op: &RieszMatrix1D) -> Result<Self> {
        Self::from_first_col(circulant_first_col(kind, op.toeplitz.first_col()))
    }
}

impl Preconditioner for CirculantPrec {
    fn size(&self) -> usize {
        self.first_col.len()
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        self.circ.solve_into(r, z);
    }
}

/// 2D circulant preconditioner: c_av (I (x) C(Gx)) + e_av (C(Gy) (x) I),
/// inverted in the 2D Fourier basis.
pub struct CirculantPrec2D {
    m1: usize,
    m2: usize,
    /// Eigenvalues on the 2D Fourier grid, x index fastest.
    pub eigenvalues: Vec<f64>,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl CirculantPrec2D {
    pub fn new(kind: CirculantKind, op: &Riesz2DOperator) -> Result<Self> {
        let (m1, m2) = (op.m1, op.m2);
        let c_av = mean(&op.cdiag);
        let e_av = mean(&op.ediag);
        let eig_x = Circulant::new(&circulant_first_col(kind, op.gx.first_col())).eigenvalues();
        let eig_y = Circulant::new(&circulant_first_col(kind, op.gy.first_col())).eigenvalues();
        let mut eigenvalues = vec![0.0; m1 * m2];
        let mut min = f64::INFINITY;
        for j in 0..m2 {
            for i in 0..m1 {
                let v = c_av * eig_x[i] + e_av * eig_y[j];
                min = min.min(v);
                eigenvalues[j * m1 + i] = v;
            }
        }
        if min <= 0.0 {
            return Err(RieszError::IndefinitePreconditioner(min));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            m1,
            m2,
            eigenvalues,
            fwd_x: planner.plan_fft_forward(m1),
            inv_x: planner.plan_fft_inverse(m1),
            fwd_y: planner.plan_fft_forward(m2),
            inv_y: planner.plan_fft_inverse(m2),
        })
    }
}

impl Preconditioner for CirculantPrec2D {
    fn size(&self) -> usize {
        self.m1 * self.m2
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        let (m1, m2) = (self.m1, self.m2);
        let mut buf: Vec<Complex<f64>> = r.iter().map(|&v| Complex::new(v, 0.0)).collect();
        for row in buf.chunks_exact_mut(m1) {
            self.fwd_x.process(row);
        }
        let mut col = vec![Complex::new(0.0, 0.0); m2];
        for i in 0..m1 {
            for j in 0..m2 {
                col[j] = buf[j * m1 + i];
            }
            self.fwd_y.process(&mut col);
            for j in 0..m2 {
                buf[j * m1 + i] = col[j];
            }
        }
        for (b, &lam) in buf.iter_mut().zip(self.eigenvalues.iter()) {
            *b /= lam;
        }
        for i in 0..m1 {
            for j in 0..m2 {
                col[j] = buf[j * m1 + i];
            }
            self.inv_y.process(&mut col);
            for j in 0..m2 {
                buf[j * m1 + i] = col[j];
            }
        }
        for row in buf.chunks_exact_mut(m1) {
            self.inv_x.process(row);
        }
        let scale = 1.0 / (m1 * m2) as f64;
        for (zi, b) in z.iter_mut().zip(buf.iter()) {
            *zi = b.re * scale;
        }
    }
}

/// Eigenvalues of the tau-algebra approximation of the symmetric Toeplitz
/// matrix with first column `a`: lambda_j = a_0 + 2 sum_k a_k cos(k x_j),
/// x_j = j pi / (m+1).
pub fn tau_eigenvalues(a: &[f64]) -> Vec<f64> {
    let m = a.len();
    (1..=m)
        .map(|j| {
            let x = j as f64 * std::f64::consts::PI / (m + 1) as f64;
            let mut lam = a[0];
            for (k, &ak) in a.iter().enumerate().skip(1) {
                lam += 2.0 * ak * (k as f64 * x).cos();
            }
            lam
        })
        .collect()
}

/// Tau-algebra preconditioner for a 1D symmetric Toeplitz system; inverted in
/// the sine-transform basis.
pub struct TauPrec {
    st: SineTransform,
    pub eigenvalues: Vec<f64>,
}

impl TauPrec {
    pub fn from_first_col(a: &[f64]) -> Result<Self> {
        let eig = tau_eigenvalues(a);
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if min <= 0.0 {
            return Err(RieszError::IndefinitePreconditioner(min));
        }
        Ok(Self {
            st: SineTransform::new(a.len()),
            eigenvalues: eig,
        })
    }

    pub fn new(op: &RieszMatrix1D) -> Result<Self> {
        Self::from_first_col(op.toeplitz.first_col())
    }
}

impl Preconditioner for TauPrec {
    fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        let mut w = self.st.apply(r);
        for (wi, &lam) in w.iter_mut().zip(self.eigenvalues.iter()) {
            *wi /= lam;
        }
        z.copy_from_slice(&self.st.apply(&w));
    }
}

/// 2D tau preconditioner: D S (D1 (x) I + I (x) D2) S with the 2D sine
/// transform S = Sy (x) Sx and the diagonal matrix D of the pointwise
/// averaged diffusion coefficients (c + e)/2.  For constant equal
/// coefficients D is the identity scaling and the preconditioner is
/// symmetric; for variable coefficients it is nonsymmetric and intended for
/// GMRES.
pub struct TauPrec2D {
    stx: SineTransform,
    sty: SineTransform,
    /// Eigenvalues of the tau part on the 2D sine grid, x index fastest.
    pub eigenvalues: Vec<f64>,
    /// Pointwise diagonal scaling (c + e)/2.
    pub dscale: Vec<f64>,
}

impl TauPrec2D {
    pub fn new(op: &Riesz2DOperator) -> Result<Self> {
        let (m1, m2) = (op.m1, op.m2);
        let dx = tau_eigenvalues(op.gx.first_col());
        let dy = tau_eigenvalues(op.gy.first_col());
        let mut eigenvalues = vec![0.0; m1 * m2];
        let mut min = f64::INFINITY;
        for j in 0..m2 {
            for i in 0..m1 {
                let v = dx[i] + dy[j];
                min = min.min(v);
                eigenvalues[j * m1 + i] = v;
            }
        }
        let dscale: Vec<f64> = op
            .cdiag
            .iter()
            .zip(op.ediag.iter())
            .map(|(c, e)| 0.5 * (c + e))
            .collect();
        if let Some(&dmin) = dscale
            .iter()
            .min_by(|a, b| a.partial_cmp(b).unwrap())
        {
            if dmin <= 0.0 {
                return Err(RieszError::IndefinitePreconditioner(dmin));
            }
        }
        if min <= 0.0 {
            return Err(RieszError::IndefinitePreconditioner(min));
        }
        Ok(Self {
            stx: SineTransform::new(m1),
            sty: SineTransform::new(m2),
            eigenvalues,
            dscale,
        })
    }

    fn sine_2d(&self, v: &mut Vec<f64>) {
        let (m1, m2) = (self.stx.size(), self.sty.size());
        for j in 0..m2 {
            let out = self.stx.apply(&v[j * m1..(j + 1) * m1]);
            v[j * m1..(j + 1) * m1].copy_from_slice(&out);
        }
        let mut col = vec![0.0; m2];
        for i in 0..m1 {
            for j in 0..m2 {
                col[j] = v[j * m1 + i];
            }
            let out = self.sty.apply(&col);
            for j in 0..m2 {
                v[j * m1 + i] = out[j];
            }
        }
    }
}

impl Preconditioner for TauPrec2D {
    fn size(&self) -> usize {
        self.eigenvalues.len()
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        let mut w: Vec<f64> = r
            .iter()
            .zip(self.dscale.iter())
            .map(|(ri, di)| ri / di)
            .collect();
        self.sine_2d(&mut w);
        for (wi, &lam) in w.iter_mut().zip(self.eigenvalues.iter()) {
            *wi /= lam;
        }
        self.sine_2d(&mut w);
        z.copy_from_slice(&w);
    }
}

/// One multigrid cycle from a zero initial guess, used as a preconditioner.
pub struct MgPrec {
    pub hierarchy: MultigridHierarchy,
}

impl MgPrec {
    pub fn new(hierarchy: MultigridHierarchy) -> Self {
        Self { hierarchy }
    }
}

impl Preconditioner for MgPrec {
    fn size(&self) -> usize {
        self.hierarchy.fine_size()
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(&self.hierarchy.apply_cycle(r));
    }
}

fn v11_config(coarsening: Coarsening) -> MgConfig {
    MgConfig {
        coarsening,
        cycle: CycleKind::V,
        smoother: SmootherConfig {
            omega: None,
            nu_pre: 1,
            nu_post: 1,
        },
        ..MgConfig::default()
    }
}

/// Default half-bandwidth of the banded multigrid preconditioner:
/// log2(M+1) rounded up to the next odd integer.
pub fn default_bandwidth(m: usize) -> usize {
    let l = ((m + 1) as f64).log2().round() as usize;
    if l % 2 == 0 {
        l + 1
    } else {
        l
    }
}

/// V(1,1) multigrid cycle on the full 1D operator.
pub fn mg_prec_1d(
    alpha: FracOrder,
    m: usize,
    domain: (f64, f64),
    d: f64,
    coarsening: Coarsening,
) -> Result<MgPrec> {
    let hier = build_1d_hierarchy(alpha, m, domain, d, None, &v11_config(coarsening))?;
    Ok(MgPrec::new(hier))
}

/// V(1,1) Galerkin multigrid cycle on the banded approximation of the 1D
/// operator (half-bandwidth `s`); the Galerkin coarsening preserves the band.
pub fn banded_mg_prec_1d(
    alpha: FracOrder,
    m: usize,
    domain: (f64, f64),
    d: f64,
    s: usize,
) -> Result<MgPrec> {
    let hier = build_1d_hierarchy(
        alpha,
        m,
        domain,
        d,
        Some(s),
        &v11_config(Coarsening::Galerkin),
    )?;
    Ok(MgPrec::new(hier))
}

/// V(1,1) multigrid cycle on the full 2D operator.
#[allow(clippy::too_many_arguments)]
pub fn mg_prec_2d(
    alpha: FracOrder,
    beta: FracOrder,
    m1: usize,
    m2: usize,
    domain: ((f64, f64), (f64, f64)),
    coeff_c: &dyn Fn(f64, f64) -> f64,
    coeff_e: &dyn Fn(f64, f64) -> f64,
    coarsening: Coarsening,
) -> Result<MgPrec> {
    let hier = build_2d_hierarchy(
        alpha,
        beta,
        m1,
        m2,
        domain,
        coeff_c,
        coeff_e,
        None,
        &v11_config(coarsening),
    )?;
    Ok(MgPrec::new(hier))
}

/// V(1,1) Galerkin multigrid cycle on the banded 2D operator.
#[allow(clippy::too_many_arguments)]
pub fn banded_mg_prec_2d(
    alpha: FracOrder,
    beta: FracOrder,
    m1: usize,
    m2: usize,
    domain: ((f64, f64), (f64, f64)),
    coeff_c: &dyn Fn(f64, f64) -> f64,
    coeff_e: &dyn Fn(f64, f64) -> f64,
    s: usize,
) -> Result<MgPrec> {
    let hier = build_2d_hierarchy(
        alpha,
        beta,
        m1,
        m2,
        domain,
        coeff_c,
        coeff_e,
        Some(s),
        &v11_config(Coarsening::Galerkin),
    )?;
    Ok(MgPrec::new(hier))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toeplitz::{assemble_riesz_1d, assemble_riesz_2d};
    use nalgebra::DMatrix;

    fn order(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    /// Materializes the inverse action of a preconditioner as a dense matrix.
    fn dense_inverse<P: Preconditioner>(p: &P) -> DMatrix<f64> {
        let n = p.size();
        let mut out = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let z = p.apply(&e);
            e[j] = 0.0;
            for i in 0..n {
                out[(i, j)] = z[i];
            }
        }
        out
    }

    fn dense_circulant(col: &[f64]) -> DMatrix<f64> {
        let m = col.len();
        DMatrix::from_fn(m, m, |i, j| col[(m + i - j) % m])
    }

    /// Dense tau matrix as Toeplitz-minus-Hankel: the Hankel antidiagonals
    /// (1-based index s = i + j from 2 to 2m) are
    /// [a_2 .. a_{m-1}, 0, 0, 0, a_{m-1} .. a_2].
    fn dense_tau(a: &[f64]) -> DMatrix<f64> {
        let m = a.len();
        DMatrix::from_fn(m, m, |i, j| {
            let t = a[i.abs_diff(j)];
            let s = i + j + 2;
            let h = if s <= m - 1 {
                a[s]
            } else if s >= m + 3 {
                a[2 * (m + 1) - s]
            } else {
                0.0
            };
            t - h
        })
    }

    #[test]
    fn strang_copies_and_reflects() {
        let a = [10.0, 1.0, 2.0, 3.0, 4.0];
        let c = circulant_first_col(CirculantKind::Strang, &a);
        assert_eq!(c, vec![10.0, 1.0, 2.0, 2.0, 1.0]);
    }

    #[test]
    fn chan_is_frobenius_optimal() {
        // Chan's circulant minimizes ||C - T||_F over all circulants: its
        // first column must be the antidiagonal-wise average of T.
        let op = assemble_riesz_1d(order(1.5), 16, (0.0, 1.0), 1.0).unwrap();
        let a = op.toeplitz.first_col();
        let c = circulant_first_col(CirculantKind::Chan, a);
        let t = DMatrix::from_fn(16, 16, |i, j| a[i.abs_diff(j)]);
        let best = dense_circulant(&c);
        let res = (&t - &best).norm_squared();
        // Perturbing any circulant coefficient must not decrease the error.
        for k in 0..16 {
            for dv in [1e-4, -1e-4] {
                let mut c2 = c.clone();
                c2[k] += dv;
                let res2 = (&t - dense_circulant(&c2)).norm_squared();
                assert!(res2 >= res - 1e-14, "k={k} dv={dv}");
            }
        }
    }

    #[test]
    fn circulant_prec_inverts_its_matrix() {
        let op = assemble_riesz_1d(order(1.5), 32, (0.0, 1.0), 1.0).unwrap();
        for kind in [CirculantKind::Strang, CirculantKind::Chan] {
            let p = CirculantPrec::new(kind, &op).unwrap();
            let dense = dense_circulant(&p.first_col);
            let inv = dense_inverse(&p);
            let prod = dense * inv;
            let err = (&prod - DMatrix::<f64>::identity(32, 32)).abs().max();
            assert!(err < 1e-10, "{kind:?}: {err}");
        }
    }

    #[test]
    fn tau_matches_toeplitz_minus_hankel() {
        let op = assemble_riesz_1d(order(1.2), 24, (0.0, 1.0), 1.0).unwrap();
        let a = op.toeplitz.first_col();
        let p = TauPrec::new(&op).unwrap();
        // tau^{-1} from the preconditioner times the dense Toeplitz-minus-
        // Hankel construction must be the identity.
        let prod = dense_tau(a) * dense_inverse(&p);
        let err = (&prod - DMatrix::<f64>::identity(24, 24)).abs().max();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn tau_eigenvalues_match_dense_spectrum() {
        let op = assemble_riesz_1d(order(1.8), 20, (0.0, 1.0), 1.0).unwrap();
        let p = TauPrec::new(&op).unwrap();
        let mut dense_eig: Vec<f64> = dense_tau(op.toeplitz.first_col())
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .collect();
        dense_eig.sort_by(f64::total_cmp);
        let mut mine = p.eigenvalues.clone();
        mine.sort_by(f64::total_cmp);
        for (a, b) in mine.iter().zip(dense_eig.iter()) {
            assert!((a - b).abs() < 1e-8 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn preconditioners_are_linear_and_symmetric() {
        let op = assemble_riesz_1d(order(1.5), 31, (0.0, 1.0), 1.0).unwrap();
        let s = default_bandwidth(31);
        let precs: Vec<(&str, Box<dyn Preconditioner>)> = vec![
            (
                "strang",
                Box::new(CirculantPrec::new(CirculantKind::Strang, &op).unwrap()),
            ),
            (
                "chan",
                Box::new(CirculantPrec::new(CirculantKind::Chan, &op).unwrap()),
            ),
            ("tau", Box::new(TauPrec::new(&op).unwrap())),
            (
                "mg",
                Box::new(mg_prec_1d(order(1.5), 31, (0.0, 1.0), 1.0, Coarsening::Galerkin).unwrap()),
            ),
            (
                "banded-mg",
                Box::new(banded_mg_prec_1d(order(1.5), 31, (0.0, 1.0), 1.0, s).unwrap()),
            ),
        ];
        let x: Vec<f64> = (0..31).map(|i| ((i * 7 + 3) % 11) as f64 - 5.0).collect();
        let y: Vec<f64> = (0..31).map(|i| ((i * 5 + 1) % 13) as f64 - 6.0).collect();
        for (name, p) in &precs {
            let px = p.apply(&x);
            let py = p.apply(&y);
            let combo: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| 2.0 * a - 3.0 * b).collect();
            let pc = p.apply(&combo);
            for i in 0..31 {
                let lin = 2.0 * px[i] - 3.0 * py[i];
                assert!((pc[i] - lin).abs() < 1e-12 * (1.0 + lin.abs()), "{name} not linear");
            }
            // Symmetry: x' P^{-1} y == y' P^{-1} x.
            let xy: f64 = x.iter().zip(py.iter()).map(|(a, b)| a * b).sum();
            let yx: f64 = y.iter().zip(px.iter()).map(|(a, b)| a * b).sum();
            assert!(
                (xy - yx).abs() < 1e-10 * (1.0 + xy.abs()),
                "{name} not symmetric: {xy} vs {yx}"
            );
        }
    }

    #[test]
    fn tau_2d_inverts_kron_sum_of_taus() {
        let op = assemble_riesz_2d(
            order(1.5),
            order(1.8),
            7,
            5,
            ((0.0, 1.0), (0.0, 1.0)),
            &|_, _| 1.0,
            &|_, _| 1.0,
        )
        .unwrap();
        let p = TauPrec2D::new(&op).unwrap();
        let tx = dense_tau(op.gx.first_col());
        let ty = dense_tau(op.gy.first_col());
        let (m1, m2) = (7usize, 5usize);
        let n = m1 * m2;
        // Dense c_av * (I (x) Tx) + e_av * (Ty (x) I) with x fastest.
        let mut dense = DMatrix::<f64>::zeros(n, n);
        for j in 0..m2 {
            for i in 0..m1 {
                let row = j * m1 + i;
                for i2 in 0..m1 {
                    dense[(row, j * m1 + i2)] += tx[(i, i2)];
                }
                for j2 in 0..m2 {
                    dense[(row, j2 * m1 + i)] += ty[(j, j2)];
                }
            }
        }
        let prod = dense * dense_inverse(&p);
        let err = (&prod - DMatrix::<f64>::identity(n, n)).abs().max();
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn circulant_2d_matches_dense_kron_sum() {
        let op = assemble_riesz_2d(
            order(1.3),
            order(1.7),
            6,
            9,
            ((0.0, 1.0), (0.0, 1.0)),
            &|_, _| 1.0,
            &|_, _| 1.0,
        )
        .unwrap();
        let p = CirculantPrec2D::new(CirculantKind::Strang, &op).unwrap();
        let cx = dense_circulant(&circulant_first_col(
            CirculantKind::Strang,
            op.gx.first_col(),
        ));
        let cy = dense_circulant(&circulant_first_col(
            CirculantKind::Strang,
            op.gy.first_col(),
        ));
        let (m1, m2) = (6usize, 9usize);
        let n = m1 * m2;
        let mut dense = DMatrix::<f64>::zeros(n, n);
        for j in 0..m2 {
            for i in 0..m1 {
                let row = j * m1 + i;
                for i2 in 0..m1 {
                    dense[(row, j * m1 + i2)] += cx[(i, i2)];
                }
                for j2 in 0..m2 {
                    dense[(row, j2 * m1 + i)] += cy[(j, j2)];
                }
            }
        }
        let prod = dense * dense_inverse(&p);
        let err = (&prod - DMatrix::<f64>::identity(n, n)).abs().max();
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn mg_prec_is_close_to_operator_inverse() {
        // One V(1,1) cycle should capture the operator well: the spectrum of
        // P^{-1} A must be clustered near 1.
        let m = 31;
        let op = assemble_riesz_1d(order(1.5), m, (0.0, 1.0), 1.0).unwrap();
        let p = mg_prec_1d(order(1.5), m, (0.0, 1.0), 1.0, Coarsening::Galerkin).unwrap();
        let pa = {
            let mut out = DMatrix::zeros(m, m);
            let mut e = vec![0.0; m];
            let mut col = vec![0.0; m];
            for j in 0..m {
                e[j] = 1.0;
                op.toeplitz.matvec_into(&e, &mut col);
                e[j] = 0.0;
                let z = p.apply(&col);
                for i in 0..m {
                    out[(i, j)] = z[i];
                }
            }
            out
        };
        let eig = pa.complex_eigenvalues();
        for lam in eig.iter() {
            assert!(lam.im.abs() < 1e-8);
            assert!(lam.re > 0.3 && lam.re < 1.7, "eigenvalue {}", lam.re);
        }
    }

    #[test]
    fn default_bandwidth_matches_size_rule() {
        assert_eq!(default_bandwidth(63), 7);
        assert_eq!(default_bandwidth(127), 7);
        assert_eq!(default_bandwidth(255), 9);
        assert_eq!(default_bandwidth(511), 9);
        assert_eq!(default_bandwidth(1023), 11);
    }

    #[test]
    fn tau_2d_variable_coefficients_use_pointwise_diagonal() {
        // For variable coefficients the preconditioner is
        // diag((c+e)/2) * (tau_x (+) tau_y); verify against the dense form.
        let op = assemble_riesz_2d(
            order(1.4),
            order(1.6),
            6,
            8,
            ((0.0, 2.0), (0.0, 2.0)),
            &|_, _| 1.0,
            &|x, y| 1.0 + x * y,
        )
        .unwrap();
        let p = TauPrec2D::new(&op).unwrap();
        let tx = dense_tau(op.gx.first_col());
        let ty = dense_tau(op.gy.first_col());
        let (m1, m2) = (6usize, 8usize);
        let n = m1 * m2;
        let mut dense = DMatrix::<f64>::zeros(n, n);
        for j in 0..m2 {
            for i in 0..m1 {
                let row = j * m1 + i;
                let d = 0.5 * (op.cdiag[row] + op.ediag[row]);
                for i2 in 0..m1 {
                    dense[(row, j * m1 + i2)] += d * tx[(i, i2)];
                }
                for j2 in 0..m2 {
                    dense[(row, j2 * m1 + i)] += d * ty[(j, j2)];
                }
            }
        }
        let prod = dense * dense_inverse(&p);
        let err = (&prod - DMatrix::<f64>::identity(n, n)).abs().max();
        assert!(err < 1e-9, "{err}");
    }
}
