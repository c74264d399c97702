//! Reference problems: a 1D constant-coefficient problem, a 2D
//! constant-coefficient problem with analytic forcing, and a 2D
//! variable-coefficient (nonsymmetric) problem.

use crate::error::Result;
use crate::frac::FracOrder;
use crate::toeplitz::{
    assemble_riesz_1d, assemble_riesz_2d, LinearOperator, Riesz2DOperator, RieszMatrix1D,
};

/// Gamma function via the Lanczos approximation (g = 7, 9 coefficients),
/// accurate to ~15 significant digits for positive arguments.
pub fn gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection formula.
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = COEF[0];
        let t = x + G + 0.5;
        for (i, &c) in COEF.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// 1D reference problem on [0, 1] with d = 1 and exact solution
/// u(x) = x^2 (1-x)^2; the right-hand side is the discrete image A u so the
/// sampled solution solves the linear system exactly.
pub struct Problem1D {
    pub op: RieszMatrix1D,
    pub rhs: Vec<f64>,
    pub exact: Vec<f64>,
}

pub fn example1(alpha: FracOrder, m: usize) -> Result<Problem1D> {
    let op = assemble_riesz_1d(alpha, m, (0.0, 1.0), 1.0)?;
    let exact: Vec<f64> = (1..=m)
        .map(|i| {
            let x = i as f64 * op.h;
            x * x * (1.0 - x) * (1.0 - x)
        })
        .collect();
    let mut rhs = vec![0.0; m];
    op.toeplitz.matvec_into(&exact, &mut rhs);
    Ok(Problem1D { op, rhs, exact })
}

/// 2D reference problem.
pub struct Problem2D {
    pub op: Riesz2DOperator,
    pub rhs: Vec<f64>,
    pub exact: Vec<f64>,
    /// True when the coefficient matrix is symmetric (constant coefficients).
    pub symmetric: bool,
}

/// One-dimensional factor of the analytic forcing of [`example2`]: the
/// negated Riesz derivative of t^2 (1-t)^2 of order `g`, with the
/// 1/(2 cos(g pi / 2)) constant and both reflected endpoints.
fn riesz_deriv_poly(g: f64, t: f64) -> f64 {
    let bracket = |s: f64| {
        2.0 / gamma(3.0 - g) * s.powf(2.0 - g) - 12.0 / gamma(4.0 - g) * s.powf(3.0 - g)
            + 24.0 / gamma(5.0 - g) * s.powf(4.0 - g)
    };
    (bracket(t) + bracket(1.0 - t)) / (2.0 * (g * std::f64::consts::PI / 2.0).cos())
}

/// 2D problem on [0,1]^2 with c = e = 1, exact solution
/// u = x^2 (1-x)^2 y^2 (1-y)^2 and analytic forcing; the discrete solution
/// therefore carries the truncation error of the scheme.
pub fn example2(alpha: FracOrder, beta: FracOrder, m1: usize, m2: usize) -> Result<Problem2D> {
    let op = assemble_riesz_2d(
        alpha,
        beta,
        m1,
        m2,
        ((0.0, 1.0), (0.0, 1.0)),
        &|_, _| 1.0,
        &|_, _| 1.0,
    )?;
    let poly = |t: f64| t * t * (1.0 - t) * (1.0 - t);
    let mut exact = vec![0.0; m1 * m2];
    let mut rhs = vec![0.0; m1 * m2];
    for j in 1..=m2 {
        let y = j as f64 * op.hy;
        for i in 1..=m1 {
            let x = i as f64 * op.hx;
            let idx = (j - 1) * m1 + i - 1;
            exact[idx] = poly(x) * poly(y);
            rhs[idx] = poly(y) * riesz_deriv_poly(alpha.get(), x)
                + poly(x) * riesz_deriv_poly(beta.get(), y);
        }
    }
    Ok(Problem2D {
        op,
        rhs,
        exact,
        symmetric: true,
    })
}

/// 2D variable-coefficient problem on [0,2]^2 with c = 1, e = 1 + xy and
/// exact solution u = x^4 (2-x)^4 y^4 (2-y)^4; the diagonal scaling makes the
/// matrix nonsymmetric, so GMRES is the intended solver.  The right-hand side
/// is the discrete image A u.
pub fn example3(alpha: FracOrder, beta: FracOrder, m1: usize, m2: usize) -> Result<Problem2D> {
    let op = assemble_riesz_2d(
        alpha,
        beta,
        m1,
        m2,
        ((0.0, 2.0), (0.0, 2.0)),
        &|_, _| 1.0,
        &|x, y| 1.0 + x * y,
    )?;
    let poly = |t: f64| {
        let w = t * (2.0 - t);
        w * w * w * w
    };
    let mut exact = vec![0.0; m1 * m2];
    for j in 1..=m2 {
        let y = j as f64 * op.hy;
        for i in 1..=m1 {
            let x = i as f64 * op.hx;
            exact[(j - 1) * m1 + i - 1] = poly(x) * poly(y);
        }
    }
    let mut rhs = vec![0.0; m1 * m2];
    op.apply(&exact, &mut rhs);
    Ok(Problem2D {
        op,
        rhs,
        exact,
        symmetric: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krylov::{cg_solve, gmres_solve};

    fn order(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    #[test]
    fn gamma_special_values() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(1.5) - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-14);
        assert!((gamma(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((gamma(5.0) - 24.0).abs() < 1e-11);
        assert!((gamma(2.3) - 1.166_711_905_198_160_4).abs() < 1e-12);
    }

    #[test]
    fn example1_exact_solves_system() {
        let p = example1(order(1.5), 63).unwrap();
        let (x, rep) = cg_solve(&p.op.toeplitz, &p.rhs, None, 1e-12, 1000).unwrap();
        assert!(rep.converged);
        let scale = p.exact.iter().cloned().fold(0.0_f64, f64::max);
        for (a, b) in x.iter().zip(p.exact.iter()) {
            assert!((a - b).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn example1_boundary_values_vanish() {
        let p = example1(order(1.2), 31).unwrap();
        // u = x^2 (1-x)^2 vanishes to second order at the boundary; the first
        // and last samples must be the smallest.
        let min = p.exact.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(p.exact[0] > 0.0);
        assert!((p.exact[0] - min).abs() < 1e-15 || (p.exact[30] - min).abs() < 1e-15);
    }

    #[test]
    fn example2_forcing_is_consistent() {
        // The discrete operator applied to the sampled exact solution must
        // approach the analytic forcing as the grid is refined.
        let mut errs = Vec::new();
        for m in [15usize, 31, 63] {
            let p = example2(order(1.5), order(1.8), m, m).unwrap();
            let mut au = vec![0.0; m * m];
            p.op.apply(&p.exact, &mut au);
            let err = au
                .iter()
                .zip(p.rhs.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0_f64, f64::max);
            errs.push(err);
        }
        // The shifted scheme loses a fractional order at the boundary, so
        // demand steady but sub-first-order decay.
        assert!(errs[1] < 0.85 * errs[0], "{errs:?}");
        assert!(errs[2] < 0.85 * errs[1], "{errs:?}");
        assert!(errs[2] < 0.6 * errs[0], "{errs:?}");
    }

    #[test]
    fn example2_solution_converges_to_exact() {
        let m = 63;
        let p = example2(order(1.5), order(1.5), m, m).unwrap();
        let (x, rep) = cg_solve(&p.op, &p.rhs, None, 1e-10, 5000).unwrap();
        assert!(rep.converged);
        let scale = p.exact.iter().cloned().fold(0.0_f64, f64::max);
        let err = x
            .iter()
            .zip(p.exact.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0_f64, f64::max);
        // First-order scheme: the discrete solution is O(h) away.
        assert!(err < 0.5 * scale / (m + 1) as f64 * 10.0, "err = {err}");
    }

    #[test]
    fn example3_matrix_is_nonsymmetric() {
        let p = example3(order(1.5), order(1.8), 9, 9).unwrap();
        let n = 81;
        let x: Vec<f64> = (0..n).map(|i| ((i * 13 + 5) % 17) as f64 - 8.0).collect();
        let y: Vec<f64> = (0..n).map(|i| ((i * 7 + 2) % 19) as f64 - 9.0).collect();
        let mut ax = vec![0.0; n];
        let mut ay = vec![0.0; n];
        p.op.apply(&x, &mut ax);
        p.op.apply(&y, &mut ay);
        let xay: f64 = x.iter().zip(ay.iter()).map(|(a, b)| a * b).sum();
        let yax: f64 = y.iter().zip(ax.iter()).map(|(a, b)| a * b).sum();
        assert!((xay - yax).abs() > 1e-6 * xay.abs());
        assert!(!p.symmetric);
    }

    #[test]
    fn example3_exact_solves_system() {
        let m = 15;
        let p = example3(order(1.7), order(1.9), m, m).unwrap();
        let (x, rep) = gmres_solve(&p.op, &p.rhs, None, 1e-12, 500).unwrap();
        assert!(rep.converged);
        let scale = p.exact.iter().cloned().fold(0.0_f64, f64::max);
        for (a, b) in x.iter().zip(p.exact.iter()) {
            assert!((a - b).abs() < 1e-8 * scale);
        }
    }
}
