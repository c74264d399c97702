//! Tikhonov-regularized image deblurring with a fractional-diffusion
//! regularizer: Gaussian blur with zero Dirichlet boundary, exact-ratio
//! Gaussian noise, PCG on the normal equations B'B + mu A, and tau / circulant
//! preconditioners built in the sine and Fourier domains.

use std::io::{Read as _, Write as _};
use std::path::Path;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, RieszError};
use crate::fft::{next_pow2, SineTransform};
use crate::frac::FracOrder;
use crate::krylov::cg_solve;
use crate::prec::{circulant_first_col, tau_eigenvalues, CirculantKind, Preconditioner};
use crate::report::SolveReport;
use crate::toeplitz::{assemble_riesz_2d, LinearOperator, Riesz2DOperator};

/// Normalized (unit-sum) Gaussian point spread function of odd size.
pub fn gaussian_psf(size: usize, std: f64) -> Result<Vec<f64>> {
    if size % 2 == 0 || size == 0 {
        return Err(RieszError::Size(format!("PSF size {size} must be odd")));
    }
    if std <= 0.0 {
        return Err(RieszError::Domain(format!(
            "PSF standard deviation {std} must be positive"
        )));
    }
    let half = (size / 2) as isize;
    let mut psf = Vec::with_capacity(size * size);
    for q in -half..=half {
        for p in -half..=half {
            let r2 = (p * p + q * q) as f64;
            psf.push((-r2 / (2.0 * std * std)).exp());
        }
    }
    let sum: f64 = psf.iter().sum();
    for v in &mut psf {
        *v /= sum;
    }
    Ok(psf)
}

/// Discrete 2D convolution with zero (Dirichlet) boundary: a symmetric block
/// Toeplitz matrix with Toeplitz blocks.  The matvec runs through a padded 2D
/// FFT; the PSF symmetry makes the operator self-adjoint.
pub struct BlurOperator {
    pub m1: usize,
    pub m2: usize,
    pub psf_size: usize,
    pub psf: Vec<f64>,
    n1: usize,
    n2: usize,
    kernel_hat: Vec<Complex<f64>>,
    fwd1: Arc<dyn Fft<f64>>,
    inv1: Arc<dyn Fft<f64>>,
    fwd2: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
}

impl BlurOperator {
    pub fn new(m1: usize, m2: usize, psf: Vec<f64>, psf_size: usize) -> Result<Self> {
        if psf.len() != psf_size * psf_size || psf_size % 2 == 0 {
            return Err(RieszError::Size(format!(
                "PSF must be an odd square, got {} values for size {psf_size}",
                psf.len()
            )));
        }
        let half = psf_size / 2;
        let n1 = next_pow2(m1 + 2 * half);
        let n2 = next_pow2(m2 + 2 * half);
        let mut planner = FftPlanner::new();
        let fwd1 = planner.plan_fft_forward(n1);
        let inv1 = planner.plan_fft_inverse(n1);
        let fwd2 = planner.plan_fft_forward(n2);
        let inv2 = planner.plan_fft_inverse(n2);
        // Kernel embedded with wraparound so index 0 is the PSF center.
        let mut kernel = vec![Complex::new(0.0, 0.0); n1 * n2];
        for q in 0..psf_size {
            for p in 0..psf_size {
                let i = (p + n1 - half) % n1;
                let j = (q + n2 - half) % n2;
                kernel[j * n1 + i].re = psf[q * psf_size + p];
            }
        }
        fft2(&mut kernel, n1, n2, &fwd1, &fwd2);
        Ok(Self {
            m1,
            m2,
            psf_size,
            psf,
            n1,
            n2,
            kernel_hat: kernel,
            fwd1,
            inv1,
            fwd2,
            inv2,
        })
    }
}

fn fft2(
    buf: &mut [Complex<f64>],
    n1: usize,
    n2: usize,
    fx: &Arc<dyn Fft<f64>>,
    fy: &Arc<dyn Fft<f64>>,
) {
    for row in buf.chunks_exact_mut(n1) {
        fx.process(row);
    }
    let mut col = vec![Complex::new(0.0, 0.0); n2];
    for i in 0..n1 {
        for j in 0..n2 {
            col[j] = buf[j * n1 + i];
        }
        fy.process(&mut col);
        for j in 0..n2 {
            buf[j * n1 + i] = col[j];
        }
    }
}

impl LinearOperator for BlurOperator {
    fn size(&self) -> usize {
        self.m1 * self.m2
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (n1, n2) = (self.n1, self.n2);
        let mut buf = vec![Complex::new(0.0, 0.0); n1 * n2];
        for j in 0..self.m2 {
            for i in 0..self.m1 {
                buf[j * n1 + i].re = x[j * self.m1 + i];
            }
        }
        fft2(&mut buf, n1, n2, &self.fwd1, &self.fwd2);
        for (b, k) in buf.iter_mut().zip(self.kernel_hat.iter()) {
            *b *= k;
        }
        fft2(&mut buf, n1, n2, &self.inv1, &self.inv2);
        let scale = 1.0 / (n1 * n2) as f64;
        for j in 0..self.m2 {
            for i in 0..self.m1 {
                y[j * self.m1 + i] = buf[j * n1 + i].re * scale;
            }
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let half = self.psf_size / 2;
        let center = self.psf[half * self.psf_size + half];
        vec![center; self.m1 * self.m2]
    }
}

/// Blurs `u` and adds white Gaussian noise scaled so that
/// ||eta|| / ||B u|| equals `noise` exactly; deterministic in `seed`.
pub fn degrade(blur: &BlurOperator, u: &[f64], noise: f64, seed: u64) -> Result<Vec<f64>> {
    if u.len() != blur.size() {
        return Err(RieszError::LengthMismatch {
            expected: blur.size(),
            got: u.len(),
        });
    }
    let mut m = vec![0.0; u.len()];
    blur.apply(u, &mut m);
    if noise == 0.0 {
        return Ok(m);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = rand_distr::StandardNormal;
    let eta: Vec<f64> = (0..u.len()).map(|_| rng.sample::<f64, _>(normal)).collect();
    let bu_norm = m.iter().map(|v| v * v).sum::<f64>().sqrt();
    let eta_norm = eta.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = noise * bu_norm / eta_norm;
    for (mi, e) in m.iter_mut().zip(eta.iter()) {
        *mi += scale * e;
    }
    Ok(m)
}

/// The Tikhonov normal-equations operator B'B + mu A.
pub struct TikhonovOperator<'a> {
    pub blur: &'a BlurOperator,
    pub reg: &'a Riesz2DOperator,
    pub mu: f64,
}

impl LinearOperator for TikhonovOperator<'_> {
    fn size(&self) -> usize {
        self.blur.size()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = x.len();
        let mut t = vec![0.0; n];
        self.blur.apply(x, &mut t);
        let mut t2 = vec![0.0; n];
        // The Gaussian PSF is symmetric, so B' = B.
        self.blur.apply(&t, &mut t2);
        self.reg.apply(x, y);
        for (yi, v) in y.iter_mut().zip(t2.iter()) {
            *yi = v + self.mu * *yi;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        let bd = self.blur.diagonal();
        self.reg
            .diagonal()
            .iter()
            .zip(bd.iter())
            .map(|(a, b)| b * b + self.mu * a)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeblurPrec {
    None,
    /// 2-level Strang circulants in the Fourier domain.
    Strang,
    /// tau algebra approximations in the sine domain.
    Tau,
}

/// Symbol of the blur along one axis sampled at `xs` (the Gaussian PSF is
/// separable, so the 2D symbol is the product of the axis symbols).
fn blur_axis_symbol(psf: &[f64], psf_size: usize, xs: &[f64]) -> Vec<f64> {
    let half = psf_size / 2;
    // Axis marginal of the separable kernel.
    let mut axis = vec![0.0; psf_size];
    for q in 0..psf_size {
        for p in 0..psf_size {
            axis[p] += psf[q * psf_size + p];
        }
    }
    xs.iter()
        .map(|&x| {
            let mut s = axis[half];
            for k in 1..=half {
                s += 2.0 * axis[half + k] * (k as f64 * x).cos();
            }
            s
        })
        .collect()
}

/// tau preconditioner for the normal equations:
/// S (tau(B)^2 + mu (D1 (+) D2)) S in the 2D sine domain.
struct TauTikhonov {
    stx: SineTransform,
    sty: SineTransform,
    eig: Vec<f64>,
}

impl TauTikhonov {
    fn new(blur: &BlurOperator, reg: &Riesz2DOperator, mu: f64) -> Result<Self> {
        let (m1, m2) = (blur.m1, blur.m2);
        let xs: Vec<f64> = (1..=m1)
            .map(|j| j as f64 * std::f64::consts::PI / (m1 + 1) as f64)
            .collect();
        let ys: Vec<f64> = (1..=m2)
            .map(|j| j as f64 * std::f64::consts::PI / (m2 + 1) as f64)
            .collect();
        let bx = blur_axis_symbol(&blur.psf, blur.psf_size, &xs);
        let by = blur_axis_symbol(&blur.psf, blur.psf_size, &ys);
        let dx = tau_eigenvalues(reg.gx.first_col());
        let dy = tau_eigenvalues(reg.gy.first_col());
        let mut eig = vec![0.0; m1 * m2];
        let mut min = f64::INFINITY;
        for j in 0..m2 {
            for i in 0..m1 {
                let b = bx[i] * by[j];
                let v = b * b + mu * (dx[i] + dy[j]);
                min = min.min(v);
                eig[j * m1 + i] = v;
            }
        }
        if min <= 0.0 {
            return Err(RieszError::IndefinitePreconditioner(min));
        }
        Ok(Self {
            stx: SineTransform::new(m1),
            sty: SineTransform::new(m2),
            eig,
        })
    }
}

impl Preconditioner for TauTikhonov {
    fn size(&self) -> usize {
        self.eig.len()
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        let (m1, m2) = (self.stx.size(), self.sty.size());
        let mut w = r.to_vec();
        sine_2d(&self.stx, &self.sty, m1, m2, &mut w);
        for (wi, &l) in w.iter_mut().zip(self.eig.iter()) {
            *wi /= l;
        }
        sine_2d(&self.stx, &self.sty, m1, m2, &mut w);
        z.copy_from_slice(&w);
    }
}

fn sine_2d(stx: &SineTransform, sty: &SineTransform, m1: usize, m2: usize, v: &mut Vec<f64>) {
    for j in 0..m2 {
        let out = stx.apply(&v[j * m1..(j + 1) * m1]);
        v[j * m1..(j + 1) * m1].copy_from_slice(&out);
    }
    let mut col = vec![0.0; m2];
    for i in 0..m1 {
        for j in 0..m2 {
            col[j] = v[j * m1 + i];
        }
        let out = sty.apply(&col);
        for j in 0..m2 {
            v[j * m1 + i] = out[j];
        }
    }
}

/// Strang preconditioner for the normal equations:
/// F^* (|C(B)|^2 + mu (c1 (+) c2)) F in the 2D Fourier domain.
struct StrangTikhonov {
    m1: usize,
    m2: usize,
    eig: Vec<f64>,
    fwd1: Arc<dyn Fft<f64>>,
    inv1: Arc<dyn Fft<f64>>,
    fwd2: Arc<dyn Fft<f64>>,
    inv2: Arc<dyn Fft<f64>>,
}

impl StrangTikhonov {
    fn new(blur: &BlurOperator, reg: &Riesz2DOperator, mu: f64) -> Result<Self> {
        let (m1, m2) = (blur.m1, blur.m2);
        let xs: Vec<f64> = (0..m1)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / m1 as f64)
            .collect();
        let ys: Vec<f64> = (0..m2)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / m2 as f64)
            .collect();
        let bx = blur_axis_symbol(&blur.psf, blur.psf_size, &xs);
        let by = blur_axis_symbol(&blur.psf, blur.psf_size, &ys);
        let cx = crate::fft::Circulant::new(&circulant_first_col(
            CirculantKind::Strang,
            reg.gx.first_col(),
        ))
        .eigenvalues();
        let cy = crate::fft::Circulant::new(&circulant_first_col(
            CirculantKind::Strang,
            reg.gy.first_col(),
        ))
        .eigenvalues();
        let mut eig = vec![0.0; m1 * m2];
        let mut min = f64::INFINITY;
        for j in 0..m2 {
            for i in 0..m1 {
                let b = bx[i] * by[j];
                let v = b * b + mu * (cx[i] + cy[j]);
                min = min.min(v);
                eig[j * m1 + i] = v;
            }
        }
        if min <= 0.0 {
            return Err(RieszError::IndefinitePreconditioner(min));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            m1,
            m2,
            eig,
            fwd1: planner.plan_fft_forward(m1),
            inv1: planner.plan_fft_inverse(m1),
            fwd2: planner.plan_fft_forward(m2),
            inv2: planner.plan_fft_inverse(m2),
        })
    }
}

impl Preconditioner for StrangTikhonov {
    fn size(&self) -> usize {
        self.m1 * self.m2
    }

    fn apply_into(&self, r: &[f64], z: &mut [f64]) {
        let (m1, m2) = (self.m1, self.m2);
        let mut buf: Vec<Complex<f64>> = r.iter().map(|&v| Complex::new(v, 0.0)).collect();
        fft2(&mut buf, m1, m2, &self.fwd1, &self.fwd2);
        for (b, &l) in buf.iter_mut().zip(self.eig.iter()) {
            *b /= l;
        }
        fft2(&mut buf, m1, m2, &self.inv1, &self.inv2);
        let scale = 1.0 / (m1 * m2) as f64;
        for (zi, b) in z.iter_mut().zip(buf.iter()) {
            *zi = b.re * scale;
        }
    }
}

/// Configuration of a deblurring run.
pub struct DeblurConfig {
    pub alpha: FracOrder,
    pub beta: FracOrder,
    pub mu: f64,
    pub psf_std: f64,
    pub psf_size: usize,
    pub noise: f64,
    pub seed: u64,
    pub prec: DeblurPrec,
    pub tol: f64,
    pub maxit: usize,
}

impl DeblurConfig {
    pub fn new(mu: f64) -> Self {
        Self {
            alpha: FracOrder::new(1.1).unwrap(),
            beta: FracOrder::new(1.1).unwrap(),
            mu,
            psf_std: 2.0,
            psf_size: 9,
            noise: 0.05,
            seed: 1,
            prec: DeblurPrec::None,
            tol: 1e-6,
            maxit: 5000,
        }
    }
}

/// Outcome of a deblurring run.
pub struct DeblurResult {
    pub restored: Vec<f64>,
    pub observed: Vec<f64>,
    pub rre: f64,
    pub report: SolveReport,
}

/// Relative restoration error ||u - u_true|| / ||u_true||.
pub fn rre(u: &[f64], u_true: &[f64]) -> f64 {
    let num: f64 = u
        .iter()
        .zip(u_true.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let den: f64 = u_true.iter().map(|v| v * v).sum();
    (num / den).sqrt()
}

/// Degrades the true image and solves the Tikhonov normal equations
/// (B'B + mu A) u = B' m by PCG.
pub fn deblur(u_true: &[f64], m1: usize, m2: usize, cfg: &DeblurConfig) -> Result<DeblurResult> {
    if u_true.len() != m1 * m2 {
        return Err(RieszError::LengthMismatch {
            expected: m1 * m2,
            got: u_true.len(),
        });
    }
    let psf = gaussian_psf(cfg.psf_size, cfg.psf_std)?;
    let blur = BlurOperator::new(m1, m2, psf, cfg.psf_size)?;
    let reg = assemble_riesz_2d(
        cfg.alpha,
        cfg.beta,
        m1,
        m2,
        ((0.0, 1.0), (0.0, 1.0)),
        &|_, _| 1.0,
        &|_, _| 1.0,
    )?;
    let observed = degrade(&blur, u_true, cfg.noise, cfg.seed)?;
    let mut rhs = vec![0.0; m1 * m2];
    blur.apply(&observed, &mut rhs);
    let sys = TikhonovOperator {
        blur: &blur,
        reg: &reg,
        mu: cfg.mu,
    };
    let prec: Option<Box<dyn Preconditioner>> = match cfg.prec {
        DeblurPrec::None => None,
        DeblurPrec::Tau => Some(Box::new(TauTikhonov::new(&blur, &reg, cfg.mu)?)),
        DeblurPrec::Strang => Some(Box::new(StrangTikhonov::new(&blur, &reg, cfg.mu)?)),
    };
    let (restored, report) = cg_solve(&sys, &rhs, prec.as_deref(), cfg.tol, cfg.maxit)?;
    let err = rre(&restored, u_true);
    Ok(DeblurResult {
        restored,
        observed,
        rre: err,
        report,
    })
}

/// Deterministic synthetic test scene on a black background: a bright
/// ellipse, a rectangle, a thin diagonal strut and a small disc.
pub fn synthetic_image(m1: usize, m2: usize) -> Vec<f64> {
    let mut img = vec![0.0; m1 * m2];
    let (w, h) = (m1 as f64, m2 as f64);
    for j in 0..m2 {
        let y = (j as f64 + 0.5) / h;
        for i in 0..m1 {
            let x = (i as f64 + 0.5) / w;
            let mut v: f64 = 0.0;
            // Main ellipse body.
            let (ex, ey) = ((x - 0.45) / 0.22, (y - 0.5) / 0.14);
            if ex * ex + ey * ey <= 1.0 {
                v = v.max(0.9);
            }
            // Solar-panel rectangles.
            if (0.12..=0.30).contains(&x) && (0.42..=0.58).contains(&y) {
                v = v.max(0.7);
            }
            if (0.62..=0.80).contains(&x) && (0.42..=0.58).contains(&y) {
                v = v.max(0.7);
            }
            // Diagonal strut.
            if (x - y + 0.12).abs() < 0.015 && (0.55..=0.85).contains(&x) {
                v = v.max(1.0);
            }
            // Small antenna disc.
            let (dx, dy) = ((x - 0.45) / 0.05, (y - 0.24) / 0.05);
            if dx * dx + dy * dy <= 1.0 {
                v = v.max(1.0);
            }
            img[j * m1 + i] = v;
        }
    }
    img
}

/// Reads a binary (P5) 8-bit PGM file, rescaling values to [0, 1].
pub fn load_pgm(path: &Path) -> Result<(Vec<f64>, usize, usize)> {
    let mut raw = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut raw)?;
    let mut pos = 0usize;
    let mut fields = Vec::new();
    // Header: magic, width, height, maxval; '#' starts a comment line.
    while fields.len() < 4 {
        while pos < raw.len() && (raw[pos] as char).is_whitespace() {
            pos += 1;
        }
        if pos < raw.len() && raw[pos] == b'#' {
            while pos < raw.len() && raw[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < raw.len() && !(raw[pos] as char).is_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(RieszError::PgmFormat("truncated header".into()));
        }
        fields.push(
            std::str::from_utf8(&raw[start..pos])
                .map_err(|_| RieszError::PgmFormat("non-ASCII header".into()))?
                .to_string(),
        );
    }
    if fields[0] != "P5" {
        return Err(RieszError::PgmFormat(format!(
            "expected magic P5, got {}",
            fields[0]
        )));
    }
    let parse = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| RieszError::PgmFormat(format!("bad header field {s}")))
    };
    let w = parse(&fields[1])?;
    let h = parse(&fields[2])?;
    let maxval = parse(&fields[3])?;
    if maxval == 0 || maxval > 255 {
        return Err(RieszError::PgmFormat(format!("unsupported maxval {maxval}")));
    }
    pos += 1; // single whitespace after maxval
    if raw.len() < pos + w * h {
        return Err(RieszError::PgmFormat("truncated pixel data".into()));
    }
    let img = raw[pos..pos + w * h]
        .iter()
        .map(|&b| b as f64 / maxval as f64)
        .collect();
    Ok((img, w, h))
}

/// Writes a binary (P5) 8-bit PGM file, clipping values to [0, 1].
pub fn save_pgm(path: &Path, img: &[f64], w: usize, h: usize) -> Result<()> {
    if img.len() != w * h {
        return Err(RieszError::LengthMismatch {
            expected: w * h,
            got: img.len(),
        });
    }
    let mut f = std::fs::File::create(path)?;
    write!(f, "P5\n{w} {h}\n255\n")?;
    let bytes: Vec<u8> = img
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    f.write_all(&bytes)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_blur(psf: &[f64], size: usize, img: &[f64], m1: usize, m2: usize) -> Vec<f64> {
        let half = (size / 2) as isize;
        let mut out = vec![0.0; m1 * m2];
        for j in 0..m2 as isize {
            for i in 0..m1 as isize {
                let mut s = 0.0;
                for q in -half..=half {
                    for p in -half..=half {
                        let (ii, jj) = (i - p, j - q);
                        if ii >= 0 && ii < m1 as isize && jj >= 0 && jj < m2 as isize {
                            s += psf[((q + half) * size as isize + p + half) as usize]
                                * img[(jj * m1 as isize + ii) as usize];
                        }
                    }
                }
                out[(j * m1 as isize + i) as usize] = s;
            }
        }
        out
    }

    #[test]
    fn psf_is_normalized_and_symmetric() {
        let psf = gaussian_psf(9, 2.0).unwrap();
        let sum: f64 = psf.iter().sum();
        assert!((sum - 1.0).abs() < 1e-14);
        for q in 0..9 {
            for p in 0..9 {
                assert_eq!(psf[q * 9 + p], psf[p * 9 + q]);
                assert_eq!(psf[q * 9 + p], psf[(8 - q) * 9 + (8 - p)]);
            }
        }
        assert!(gaussian_psf(8, 2.0).is_err());
    }

    #[test]
    fn fft_blur_matches_direct_convolution() {
        let psf = gaussian_psf(5, 1.3).unwrap();
        let (m1, m2) = (17usize, 13usize);
        let blur = BlurOperator::new(m1, m2, psf.clone(), 5).unwrap();
        let img: Vec<f64> = (0..m1 * m2).map(|i| ((i * 37 + 11) % 23) as f64 / 23.0).collect();
        let mut fast = vec![0.0; m1 * m2];
        blur.apply(&img, &mut fast);
        let slow = direct_blur(&psf, 5, &img, m1, m2);
        for (a, b) in fast.iter().zip(slow.iter()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn blur_operator_is_symmetric() {
        let psf = gaussian_psf(9, 2.0).unwrap();
        let (m1, m2) = (12usize, 10usize);
        let blur = BlurOperator::new(m1, m2, psf, 9).unwrap();
        let x: Vec<f64> = (0..m1 * m2).map(|i| ((i * 7 + 1) % 13) as f64).collect();
        let y: Vec<f64> = (0..m1 * m2).map(|i| ((i * 11 + 3) % 17) as f64).collect();
        let mut bx = vec![0.0; m1 * m2];
        let mut by = vec![0.0; m1 * m2];
        blur.apply(&x, &mut bx);
        blur.apply(&y, &mut by);
        let xby: f64 = x.iter().zip(by.iter()).map(|(a, b)| a * b).sum();
        let ybx: f64 = y.iter().zip(bx.iter()).map(|(a, b)| a * b).sum();
        assert!((xby - ybx).abs() < 1e-10 * xby.abs());
    }

    #[test]
    fn degrade_hits_exact_noise_ratio_and_is_seeded() {
        let psf = gaussian_psf(9, 2.0).unwrap();
        let (m1, m2) = (32usize, 32usize);
        let blur = BlurOperator::new(m1, m2, psf, 9).unwrap();
        let img = synthetic_image(m1, m2);
        let mut bu = vec![0.0; m1 * m2];
        blur.apply(&img, &mut bu);
        let m = degrade(&blur, &img, 0.05, 7).unwrap();
        let eta_norm: f64 = m
            .iter()
            .zip(bu.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let bu_norm: f64 = bu.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((eta_norm / bu_norm - 0.05).abs() < 1e-12);
        let m2nd = degrade(&blur, &img, 0.05, 7).unwrap();
        assert_eq!(m, m2nd);
        let other = degrade(&blur, &img, 0.05, 8).unwrap();
        assert_ne!(m, other);
    }

    #[test]
    fn preconditioners_preserve_ordering_on_small_problem() {
        let (m1, m2) = (32usize, 32usize);
        let img = synthetic_image(m1, m2);
        let mut iters = Vec::new();
        for prec in [DeblurPrec::Tau, DeblurPrec::Strang, DeblurPrec::None] {
            let cfg = DeblurConfig {
                prec,
                ..DeblurConfig::new(1e-4)
            };
            let res = deblur(&img, m1, m2, &cfg).unwrap();
            assert!(res.report.converged);
            iters.push(res.report.iterations);
        }
        assert!(iters[0] < iters[1], "tau {} vs strang {}", iters[0], iters[1]);
        assert!(iters[1] < iters[2], "strang {} vs cg {}", iters[1], iters[2]);
    }

    #[test]
    fn restored_image_is_close_to_truth() {
        let (m1, m2) = (32usize, 32usize);
        let img = synthetic_image(m1, m2);
        let cfg = DeblurConfig {
            prec: DeblurPrec::Tau,
            ..DeblurConfig::new(1e-4)
        };
        let res = deblur(&img, m1, m2, &cfg).unwrap();
        assert!(res.rre < rre(&res.observed, &img));
        assert!(res.rre < 0.5, "rre = {}", res.rre);
    }

    #[test]
    fn pgm_round_trip() {
        let dir = std::env::temp_dir().join("riesz_mg_pgm_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("img.pgm");
        let img = synthetic_image(24, 16);
        save_pgm(&path, &img, 24, 16).unwrap();
        let (back, w, h) = load_pgm(&path).unwrap();
        assert_eq!((w, h), (24, 16));
        for (a, b) in back.iter().zip(img.iter()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn bundled_test_image_loads() {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets/test_image_128.pgm");
        let (img, w, h) = load_pgm(&path).unwrap();
        assert_eq!((w, h), (128, 128));
        // Black background with bright foreground shapes.
        assert_eq!(img[0], 0.0);
        assert!(img.iter().cloned().fold(0.0_f64, f64::max) > 0.9);
    }

    #[test]
    fn rre_of_identical_images_is_zero() {
        let img = synthetic_image(8, 8);
        assert_eq!(rre(&img, &img), 0.0);
    }
}
