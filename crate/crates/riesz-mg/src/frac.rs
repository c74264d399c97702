//! Fractional-order coefficients and generating functions.
//!
//! Everything downstream (Toeplitz operators, multigrid symbols, banded and
//! matrix-algebra preconditioners) is built from the alternating fractional
//! binomial coefficients g_k and the even symbol f_alpha on [0, pi].

use std::f64::consts::PI;

use crate::error::{Result, RieszError};

/// Fractional derivative order, restricted to (1, 2].
///
/// The open endpoint 1 is excluded by the model; 2 is admitted so that the
/// Laplacian limit can be exercised in tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 1.0 && alpha <= 2.0 && alpha.is_finite() {
            Ok(Self(alpha))
        } else {
            Err(RieszError::InvalidOrder(alpha))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// c(alpha) = -1 / (2 cos(alpha pi / 2)), positive on (1, 2].
pub fn c_alpha(alpha: FracOrder) -> f64 {
    -1.0 / (2.0 * (alpha.get() * PI / 2.0).cos())
}

/// Cached coefficients g_k for a fixed order, k = 0..=n.
#[derive(Debug, Clone)]
pub struct GrunwaldTable {
    pub alpha: FracOrder,
    pub g: Vec<f64>,
    pub c_alpha: f64,
}

/// Computes g_0..g_n by the stable recurrence
/// g_0 = 1, g_k = g_{k-1} (k - 1 - alpha) / k.
pub fn grunwald_coeffs(alpha: FracOrder, n: usize) -> Result<GrunwaldTable> {
    if n == 0 {
        return Err(RieszError::Size("coefficient table needs n >= 1".into()));
    }
    let a = alpha.get();
    let mut g = Vec::with_capacity(n + 1);
    g.push(1.0);
    for k in 1..=n {
        let prev = g[k - 1];
        g.push(prev * ((k as f64 - 1.0 - a) / k as f64));
    }
    Ok(GrunwaldTable {
        alpha,
        g,
        c_alpha: c_alpha(alpha),
    })
}

impl GrunwaldTable {
    /// Truncated symbol of the symmetrized scheme matrix in the
    /// positive-definite sign convention, without the c(alpha) factor:
    /// -2 sum_{k=0}^{s} g_k cos((k-1) x).
    pub fn symbol_g_s_normalized(&self, s: usize, x: f64) -> f64 {
        assert!(s < self.g.len(), "table too short for truncation order {s}");
        let mut acc = 0.0;
        for (k, &gk) in self.g.iter().take(s + 1).enumerate() {
            acc += gk * ((k as f64 - 1.0) * x).cos();
        }
        -2.0 * acc
    }
}

/// Generating function f_alpha of h^alpha A_M^alpha, evaluated by even
/// extension for x in [-pi, pi]. Nonnegative, with a unique zero of order
/// alpha at the origin; f_alpha(pi) = c(alpha) 2^(alpha+1).
pub fn symbol_f(alpha: FracOrder, x: f64) -> f64 {
    c_alpha(alpha) * symbol_f_normalized(alpha, x)
}

/// f_alpha / c(alpha): the symbol used throughout the multigrid recursion,
/// where the c(alpha) factor cancels.
pub fn symbol_f_normalized(alpha: FracOrder, x: f64) -> f64 {
    let a = alpha.get();
    let x = x.abs();
    debug_assert!(x <= PI + 1e-12);
    let two_pow = 2f64.powf(a + 1.0);
    -two_pow * (x / 2.0).sin().powf(a) * (x * (1.0 - a / 2.0) + a * PI / 2.0).cos()
}

/// Truncated Fourier sum g_s of order s approximating f_alpha, in the sign
/// convention of the banded matrix (nonnegative where f_alpha is).
pub fn symbol_g_s(alpha: FracOrder, s: usize, x: f64) -> f64 {
    let table = grunwald_coeffs(alpha, s).expect("s >= 1");
    c_alpha(alpha) * table.symbol_g_s_normalized(s, x)
}

/// kappa_s = f_alpha / g_s, the distribution function of the band-preconditioned
/// matrix sequence. Both numerator and denominator vanish at x = 0.
pub fn symbol_kappa(alpha: FracOrder, s: usize, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(RieszError::Pole);
    }
    Ok(symbol_f(alpha, x) / symbol_g_s(alpha, s, x))
}

/// delta_s = f_alpha - g_s, the absolute truncation error of the band symbol.
pub fn symbol_delta_s(alpha: FracOrder, s: usize, x: f64) -> f64 {
    symbol_f(alpha, x) - symbol_g_s(alpha, s, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    /// Independent oracle: the product formula (-1)^k/k! alpha(alpha-1)...(alpha-k+1).
    fn g_product(alpha: f64, k: usize) -> f64 {
        let mut v = 1.0;
        for j in 0..k {
            v *= alpha - j as f64;
        }
        let mut fact = 1.0;
        for j in 1..=k {
            fact *= j as f64;
        }
        (if k % 2 == 0 { 1.0 } else { -1.0 }) * v / fact
    }

    #[test]
    fn rejects_bad_orders() {
        assert!(FracOrder::new(1.0).is_err());
        assert!(FracOrder::new(2.0 + 1e-12).is_err());
        assert!(FracOrder::new(f64::NAN).is_err());
        assert!(FracOrder::new(2.0).is_ok());
    }

    #[test]
    fn rejects_zero_length_table() {
        assert!(grunwald_coeffs(order(1.5), 0).is_err());
    }

    #[test]
    fn coefficients_match_product_formula() {
        for &a in &[1.1, 1.5, 1.9] {
            let t = grunwald_coeffs(order(a), 12).unwrap();
            assert_eq!(t.g[0], 1.0);
            assert!((t.g[1] + a).abs() < 1e-15);
            for k in 0..=12 {
                assert!(
                    (t.g[k] - g_product(a, k)).abs() < 1e-13,
                    "alpha={a} k={k}: {} vs {}",
                    t.g[k],
                    g_product(a, k)
                );
            }
        }
        // g_2 at alpha = 1.5 is 0.375 by the product formula.
        let t = grunwald_coeffs(order(1.5), 2).unwrap();
        assert!((t.g[2] - 0.375).abs() < 1e-15);
    }

    #[test]
    fn lemma1_properties() {
        // Positivity and strict decrease for k >= 2, and negative partial sums,
        // for alpha in {1.1, ..., 1.9} up to n = 10^4.
        for i in 1..=9 {
            let a = 1.0 + i as f64 / 10.0;
            let t = grunwald_coeffs(order(a), 10_000).unwrap();
            let mut partial = t.g[0] + t.g[1];
            let mut prev = f64::INFINITY;
            for k in 2..t.g.len() {
                assert!(t.g[k] > 0.0, "alpha={a} k={k}");
                assert!(t.g[k] < prev + 1e-13, "alpha={a} k={k} not decreasing");
                prev = t.g[k];
                partial += t.g[k];
                assert!(partial < 0.0, "alpha={a} partial sum at {k} not negative");
            }
            // Partial sums increase towards 0 from below.
            assert!(partial > -1e-2, "alpha={a}: tail did not approach zero");
            assert!(c_alpha(order(a)) > 0.0);
        }
    }

    #[test]
    fn symbol_f_laplacian_limit() {
        let a2 = order(2.0);
        for i in 0..=64 {
            let x = PI * i as f64 / 64.0;
            let expect = 2.0 - 2.0 * x.cos();
            assert!((symbol_f(a2, x) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn symbol_f_endpoints_and_evenness() {
        for &a in &[1.2, 1.5, 1.8] {
            let al = order(a);
            assert!(symbol_f(al, 0.0).abs() < 1e-14);
            let at_pi = symbol_f(al, PI);
            assert!((at_pi - c_alpha(al) * 2f64.powf(a + 1.0)).abs() < 1e-12);
            for i in 1..32 {
                let x = PI * i as f64 / 32.0;
                assert!((symbol_f(al, x) - symbol_f(al, -x)).abs() < 1e-15);
                assert!(symbol_f(al, x) >= -1e-13);
            }
        }
    }

    #[test]
    fn symbol_f_nonnegative_fine_grid_and_zero_order() {
        for &a in &[1.2, 1.5, 1.8] {
            let al = order(a);
            let mut min = f64::INFINITY;
            for i in 0..=10_000 {
                let x = PI * i as f64 / 10_000.0;
                min = min.min(symbol_f(al, x));
            }
            assert!(min >= -1e-13);
            // log f vs log x slope over [1e-4, 1e-2] equals alpha within 0.02.
            let (x0, x1) = (1e-4, 1e-2);
            let slope = (symbol_f(al, x1).ln() - symbol_f(al, x0).ln()) / (x1.ln() - x0.ln());
            assert!((slope - a).abs() < 0.02, "alpha={a} slope={slope}");
        }
    }

    #[test]
    fn g_s_truncation_exact_for_laplacian() {
        let a2 = order(2.0);
        for i in 0..=32 {
            let x = PI * i as f64 / 32.0;
            assert!((symbol_g_s(a2, 2, x) - (2.0 - 2.0 * x.cos())).abs() < 1e-13);
            assert!((symbol_kappa(a2, 2, x.max(1e-3)).unwrap() - 1.0).abs() < 1e-10);
        }
        assert!(symbol_kappa(a2, 2, 0.0).is_err());
    }

    #[test]
    fn g_s_converges_to_f() {
        // s = 64 on a 1024-point grid: the gap is bounded by the coefficient tail.
        let al = order(1.5);
        let t = grunwald_coeffs(al, 4096).unwrap();
        let tail: f64 = 2.0 * c_alpha(al) * t.g[65..].iter().map(|v| v.abs()).sum::<f64>();
        for i in 1..=1024 {
            let x = PI * i as f64 / 1024.0;
            let gap = (symbol_g_s(al, 64, x) - symbol_f(al, x)).abs();
            assert!(gap <= tail + 1e-10, "x={x} gap={gap} tail={tail}");
        }
    }

    #[test]
    fn delta_s_shrinks_with_s() {
        for &a in &[1.2, 1.8] {
            let al = order(a);
            let mut last = f64::INFINITY;
            for &s in &[1usize, 3, 5, 9, 17] {
                let mut max = 0f64;
                for i in 1..=512 {
                    let x = PI * i as f64 / 512.0;
                    max = max.max(symbol_delta_s(al, s, x).abs());
                }
                assert!(max <= last + 1e-12, "alpha={a} s={s}");
                last = max;
            }
        }
    }

    #[test]
    fn kappa_near_one_away_from_origin() {
        let al = order(1.2);
        for &s in &[1usize, 3, 5] {
            for i in 256..=1024 {
                let x = PI * i as f64 / 1024.0;
                let k = symbol_kappa(al, s, x).unwrap();
                assert!((k - 1.0).abs() < 0.25, "s={s} x={x} kappa={k}");
            }
        }
    }
}
