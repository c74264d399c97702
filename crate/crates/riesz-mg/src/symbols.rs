//! Symbol-level analysis of the multigrid hierarchy: the coarse-symbol
//! recursion, the projector scaling constants C_k, smoothing constants,
//! monotonicity diagnostics and Weyl-distribution checks for preconditioned
//! spectra.

use std::f64::consts::PI;
use std::io::Write as IoWrite;

use crate::error::{Result, RieszError};
use crate::frac::{symbol_f_normalized, FracOrder};
use crate::toeplitz::{materialize_dense, LinearOperator};

/// Normalized coarse symbols f_k sampled on a common grid over [0, pi],
/// together with the projector constants C_k.
///
/// f_0 = f_alpha / c(alpha); each coarse symbol follows
/// f_{k+1}(x) = C_{k+1}^2 / 2 * [f_k(x/2)(1+cos(x/2))^2
///                              + f_k(pi-x/2)(1-cos(x/2))^2],
/// with C_{k+1}^2 = 2^(alpha+1) / f_k(pi/2) so that f_{k+1}(pi) = 2^(alpha+1)
/// at every level.
pub struct SymbolLevelChain {
    pub alpha: FracOrder,
    pub levels: usize,
    pub grid_n: usize,
    /// c_k[k] = C_{k,alpha} for k = 1..=levels (index 0 unused, set to NaN).
    pub c_k: Vec<f64>,
    /// samples[k][j] = f_k(j pi / grid_n) for k = 0..=levels.
    pub samples: Vec<Vec<f64>>,
}

/// Builds the chain by sampling f_0 on a grid refined by 2^levels and folding
/// it down one level at a time; each fold halves the grid, so every level is
/// available on the common grid of `grid_n + 1` points.
pub fn coarse_symbol_recursion(
    alpha: FracOrder,
    levels: usize,
    grid_n: usize,
) -> Result<SymbolLevelChain> {
    if levels < 1 {
        return Err(RieszError::Size("need at least one level".into()));
    }
    if grid_n < 256 {
        return Err(RieszError::Size("grid must have at least 256 points".into()));
    }
    let fine_n = grid_n
        .checked_shl(levels as u32)
        .filter(|&n| n <= 1 << 27)
        .ok_or_else(|| {
            RieszError::Size(format!(
                "recursion grid 2^{levels} * {grid_n} too large; lower levels or grid_n"
            ))
        })?;
    let a = alpha.get();
    let norm = 2f64.powf(a + 1.0);

    // Level-0 samples on the fully refined grid.
    let mut vals: Vec<f64> = (0..=fine_n)
        .map(|j| symbol_f_normalized(alpha, j as f64 * PI / fine_n as f64))
        .collect();

    let subsample = |v: &[f64], n_level: usize| -> Vec<f64> {
        let stride = n_level / grid_n;
        (0..=grid_n).map(|j| v[j * stride]).collect()
    };

    let mut c_k = vec![f64::NAN];
    let mut samples = vec![subsample(&vals, fine_n)];
    let mut n_level = fine_n;
    for _k in 1..=levels {
        let c2 = norm / vals[n_level / 2];
        if !(c2.is_finite() && c2 > 0.0) {
            return Err(RieszError::Domain(
                "projector constant is not positive finite".into(),
            ));
        }
        c_k.push(c2.sqrt());
        let half = n_level / 2;
        let next: Vec<f64> = (0..=half)
            .map(|j| {
                // x = j pi / half, so x/2 sits at index j of the finer grid.
                let t = (j as f64 * PI / n_level as f64).cos();
                let p0 = 1.0 + t;
                let p1 = 1.0 - t;
                0.5 * c2 * (vals[j] * p0 * p0 + vals[n_level - j] * p1 * p1)
            })
            .collect();
        debug_assert!((next[half] - norm).abs() <= 1e-11 * norm);
        samples.push(subsample(&next, half));
        vals = next;
        n_level = half;
    }
    Ok(SymbolLevelChain {
        alpha,
        levels,
        grid_n,
        c_k,
        samples,
    })
}

/// Point evaluation of f_k by unrolling the recursion (cost 2^k base-symbol
/// evaluations); `c_k` must hold constants for levels 1..=k.
pub fn eval_symbol_level(alpha: FracOrder, c_k: &[f64], k: usize, x: f64) -> f64 {
    if k == 0 {
        return symbol_f_normalized(alpha, x);
    }
    let c2 = c_k[k] * c_k[k];
    let t = (x / 2.0).cos();
    let p0 = 1.0 + t;
    let p1 = 1.0 - t;
    0.5 * c2
        * (eval_symbol_level(alpha, c_k, k - 1, x / 2.0) * p0 * p0
            + eval_symbol_level(alpha, c_k, k - 1, PI - x / 2.0) * p1 * p1)
}

/// Projector constants C_{1..levels} without grid sampling; suitable for
/// deep chains (cost sum of 2^k base evaluations).
pub fn projector_constants(alpha: FracOrder, levels: usize) -> Vec<f64> {
    let norm = 2f64.powf(alpha.get() + 1.0);
    let mut c_k = vec![f64::NAN];
    for k in 1..=levels {
        let fk_half = eval_symbol_level(alpha, &c_k, k - 1, PI / 2.0);
        c_k.push((norm / fk_half).sqrt());
    }
    c_k
}

/// The analytic limit of C_{k,alpha}: 2^((alpha-1)/2).
pub fn projector_constant_limit(alpha: FracOrder) -> f64 {
    2f64.powf((alpha.get() - 1.0) / 2.0)
}

/// Approximation-property diagnostics at level k.
#[derive(Debug, Clone, Copy)]
pub struct GammaReport {
    /// Aitken-extrapolated limit of p_k(x+pi)^2 / f_{k+1}(x) as x -> 0
    /// (zero for alpha < 2 since the projector zero has order 2 > alpha).
    pub gamma_limit: f64,
    /// The bounding quantity max_x g_{k,alpha}(x) = 4 C_{k+1}^2 / 2^(alpha+1),
    /// attained at x = pi by monotonicity.
    pub bound: f64,
    pub finite: bool,
}

pub fn gamma_k(alpha: FracOrder, k: usize, c_k: &[f64]) -> GammaReport {
    let c = c_k[k + 1];
    let mut v = [0.0f64; 3];
    for (i, &x) in [1e-2, 1e-3, 1e-4].iter().enumerate() {
        let p = c * (1.0 + (x + PI).cos());
        v[i] = p * p / eval_symbol_level(alpha, c_k, k + 1, x);
    }
    // Aitken delta-squared on the geometric-looking tail.
    let denom = v[2] - 2.0 * v[1] + v[0];
    let gamma_limit = if denom.abs() > 1e-300 {
        v[2] - (v[2] - v[1]) * (v[2] - v[1]) / denom
    } else {
        v[2]
    };
    let bound = 4.0 * c * c / 2f64.powf(alpha.get() + 1.0);
    GammaReport {
        gamma_limit,
        bound,
        finite: gamma_limit.is_finite() && bound.is_finite(),
    }
}

/// Monotonicity report for g_{k,alpha}(x) = p_k^2(pi-x)/f_k(x) and the sign
/// condition on its numerator-derivative combination
/// 2 sin(x) f_k(x) - (1 - cos x) f_k'(x).
#[derive(Debug, Clone, Default)]
pub struct MonotoneReport {
    pub ratio_violations: Vec<(f64, f64)>,
    pub sign_violations: Vec<(f64, f64)>,
}

impl MonotoneReport {
    pub fn is_clean(&self) -> bool {
        self.ratio_violations.is_empty() && self.sign_violations.is_empty()
    }
}

/// Checks monotonicity of g_{k,alpha} on `grid_n + 1` points of (0, pi].
/// Derivatives use central differences with step pi / 2^14.
pub fn check_g_monotone(
    alpha: FracOrder,
    k: usize,
    c_k: &[f64],
    grid_n: usize,
) -> MonotoneReport {
    let mut report = MonotoneReport::default();
    // The symbol extends evenly about pi (f(2 pi - x) = f(x)), which keeps
    // the central difference symmetric at the right endpoint.
    let fk = |x: f64| {
        let x = if x > PI { 2.0 * PI - x } else { x };
        eval_symbol_level(alpha, c_k, k, x)
    };
    let h = PI / 2f64.powi(14);
    let mut prev = f64::NEG_INFINITY;
    for j in 1..=grid_n {
        let x = j as f64 * PI / grid_n as f64;
        let f = fk(x);
        let p = 1.0 + (PI - x).cos(); // = 1 - cos x, projector factor sans constant
        let g = p * p / f;
        if g < prev - 1e-12 {
            report.ratio_violations.push((x, g - prev));
        }
        prev = g;
        let fp = (fk(x + h) - fk(x - h)) / (2.0 * h);
        let bold_g = 2.0 * x.sin() * f - (1.0 - x.cos()) * fp;
        if bold_g < -1e-10 {
            report.sign_violations.push((x, bold_g));
        }
    }
    report
}

/// Jacobi smoothing constants for the fine-level Toeplitz operator.
#[derive(Debug, Clone, Copy)]
pub struct SmoothingConstants {
    /// omega* = 2^(2-alpha) alpha / 3, the weight used in the benchmarks.
    pub omega_star: f64,
    /// sigma = 2^(-alpha)/9, the smoothing-property constant at omega*.
    pub sigma: f64,
    /// omega_max = alpha / 2^(alpha-1), the admissible upper bound.
    pub omega_max: f64,
}

pub fn smoothing_constants(alpha: FracOrder) -> SmoothingConstants {
    let a = alpha.get();
    SmoothingConstants {
        omega_star: 2f64.powf(2.0 - a) * a / 3.0,
        sigma: 2f64.powf(-a) / 9.0,
        omega_max: a / 2f64.powf(a - 1.0),
    }
}

/// Verifies the smoothing inequality ||S u||_A^2 <= ||u||_A^2 - sigma ||u||^2_{A D^-1 A}
/// for S = I - omega D^-1 A with D = diag(A); returns the slack (>= 0 on success).
pub fn smoothing_inequality_slack<T: LinearOperator + ?Sized>(
    a: &T,
    omega: f64,
    sigma: f64,
    u: &[f64],
) -> f64 {
    let n = a.size();
    assert_eq!(u.len(), n);
    let d = a.diagonal();
    let au = a.apply_vec(u);
    // s = u - omega D^-1 A u
    let s: Vec<f64> = u
        .iter()
        .zip(au.iter().zip(d.iter()))
        .map(|(&ui, (&aui, &di))| ui - omega * aui / di)
        .collect();
    let as_ = a.apply_vec(&s);
    let lhs: f64 = s.iter().zip(as_.iter()).map(|(x, y)| x * y).sum();
    let ua: f64 = u.iter().zip(au.iter()).map(|(x, y)| x * y).sum();
    let adainv: f64 = au.iter().zip(d.iter()).map(|(&r, &di)| r * r / di).sum();
    ua - sigma * adainv - lhs
}

/// Eigenvalues of G^{-1} F for SPD F, G via the symmetric generalized
/// eigenproblem L^{-1} F L^{-T} with G = L L^T. Dense; sizes <= 4096.
pub fn preconditioned_spectrum<F, G>(f: &F, g: &G) -> Result<Vec<f64>>
where
    F: LinearOperator + ?Sized,
    G: LinearOperator + ?Sized,
{
    if f.size() != g.size() {
        return Err(RieszError::LengthMismatch {
            expected: f.size(),
            got: g.size(),
        });
    }
    let fd = materialize_dense(f)?;
    let gd = materialize_dense(g)?;
    let chol = nalgebra::Cholesky::new(gd)
        .ok_or_else(|| RieszError::IndefinitePreconditioner(f64::NAN))?;
    let l = chol.l();
    // M = L^{-1} F L^{-T}
    let linv_f = l.solve_lower_triangular(&fd).ok_or_else(|| {
        RieszError::Domain("singular Cholesky factor".into())
    })?;
    let m = l
        .solve_lower_triangular(&linv_f.transpose())
        .ok_or_else(|| RieszError::Domain("singular Cholesky factor".into()))?;
    let sym = (&m + m.transpose()) * 0.5;
    let mut eig: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eig)
}

/// Comparison of the preconditioned spectrum with the symbol ratio
/// kappa(x) = f(x)/g(x) in the Weyl sense.
#[derive(Debug, Clone)]
pub struct WeylHistogram {
    pub eigenvalues: Vec<f64>,
    pub kappa_samples: Vec<f64>,
    pub eig_hist: Vec<usize>,
    pub kappa_hist: Vec<usize>,
    pub lo: f64,
    pub hi: f64,
    /// Mean absolute gap of averaged test functionals between the two
    /// distributions.
    pub discrepancy: f64,
}

pub fn weyl_histogram<F, G>(
    f_op: &F,
    g_op: &G,
    kappa: &dyn Fn(f64) -> f64,
    bins: usize,
) -> Result<WeylHistogram>
where
    F: LinearOperator + ?Sized,
    G: LinearOperator + ?Sized,
{
    if f_op.size() > 512 {
        return Err(RieszError::Size("weyl_histogram capped at size 512".into()));
    }
    let eigenvalues = preconditioned_spectrum(f_op, g_op)?;
    let m = eigenvalues.len();
    let kappa_samples: Vec<f64> = (1..=m).map(|j| kappa(j as f64 * PI / (m + 1) as f64)).collect();
    let lo = kappa_samples
        .iter()
        .chain(eigenvalues.iter())
        .fold(f64::INFINITY, |a, &b| a.min(b));
    let hi = kappa_samples
        .iter()
        .chain(eigenvalues.iter())
        .fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let width = (hi - lo).max(1e-300);
    let bucket = |v: f64| (((v - lo) / width * bins as f64) as usize).min(bins - 1);
    let mut eig_hist = vec![0usize; bins];
    let mut kappa_hist = vec![0usize; bins];
    for &l in &eigenvalues {
        eig_hist[bucket(l)] += 1;
    }
    for &k in &kappa_samples {
        kappa_hist[bucket(k)] += 1;
    }
    let tests: [&dyn Fn(f64) -> f64; 3] = [&|x| x, &|x| x * x, &|x: f64| (-x).exp()];
    let mut discrepancy = 0.0;
    for t in tests {
        let ev: f64 = eigenvalues.iter().map(|&x| t(x)).sum::<f64>() / m as f64;
        let kv: f64 = kappa_samples.iter().map(|&x| t(x)).sum::<f64>() / m as f64;
        discrepancy += (ev - kv).abs();
    }
    discrepancy /= tests.len() as f64;
    Ok(WeylHistogram {
        eigenvalues,
        kappa_samples,
        eig_hist,
        kappa_hist,
        lo,
        hi,
        discrepancy,
    })
}

/// CSV: level, C_k per order.
pub fn write_ck_csv(out: &mut dyn IoWrite, alphas: &[FracOrder], levels: usize) -> Result<()> {
    write!(out, "level")?;
    for a in alphas {
        write!(out, ",c_k_alpha_{}", a.get())?;
    }
    writeln!(out)?;
    let tables: Vec<Vec<f64>> = alphas
        .iter()
        .map(|&a| projector_constants(a, levels))
        .collect();
    for k in 1..=levels {
        write!(out, "{k}")?;
        for t in &tables {
            write!(out, ",{:.12}", t[k])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// CSV: x, f_0..f_levels on the common grid.
pub fn write_coarse_symbols_csv(out: &mut dyn IoWrite, chain: &SymbolLevelChain) -> Result<()> {
    write!(out, "x")?;
    for k in 0..=chain.levels {
        write!(out, ",f_{k}")?;
    }
    writeln!(out)?;
    for j in 0..=chain.grid_n {
        write!(out, "{:.12}", j as f64 * PI / chain.grid_n as f64)?;
        for k in 0..=chain.levels {
            write!(out, ",{:.12}", chain.samples[k][j])?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// CSV: x, g_{k,alpha} ratio and the sign quantity, per level.
pub fn write_g_monotone_csv(
    out: &mut dyn IoWrite,
    alpha: FracOrder,
    max_level: usize,
    grid_n: usize,
) -> Result<()> {
    let c_k = projector_constants(alpha, max_level + 1);
    writeln!(out, "x,level,ratio,sign_quantity")?;
    let h = PI / 2f64.powi(14);
    for k in 0..=max_level {
        let fk = |x: f64| {
            let x = if x > PI { 2.0 * PI - x } else { x };
            eval_symbol_level(alpha, &c_k, k, x)
        };
        for j in 1..=grid_n {
            let x = j as f64 * PI / grid_n as f64;
            let f = fk(x);
            let p = 1.0 - x.cos();
            let fp = (fk(x + h) - fk(x - h)) / (2.0 * h);
            let bold_g = 2.0 * x.sin() * f - p * fp;
            writeln!(out, "{x:.12},{k},{:.12},{:.12}", p * p / f, bold_g)?;
        }
    }
    Ok(())
}

/// CSV: x, kappa_s(x) for each truncation order in `orders`.
pub fn write_kappa_csv(
    out: &mut dyn IoWrite,
    alpha: FracOrder,
    orders: &[usize],
    grid_n: usize,
) -> Result<()> {
    write!(out, "x")?;
    for s in orders {
        write!(out, ",kappa_{s}")?;
    }
    writeln!(out)?;
    for j in 1..=grid_n {
        let x = j as f64 * PI / grid_n as f64;
        write!(out, "{x:.12}")?;
        for &s in orders {
            write!(out, ",{:.12}", crate::frac::symbol_kappa(alpha, s, x)?)?;
        }
        writeln!(out)?;
    }
    Ok(())
}
