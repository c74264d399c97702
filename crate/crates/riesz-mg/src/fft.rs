//! Thin wrappers around rustfft: circulant products, circular convolution and
//! the orthogonal sine transform (DST-I) used by the tau algebra.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Fast product with a fixed circulant matrix, given by its first column.
///
/// The spectrum of the circulant is precomputed at construction; every apply
/// costs two transforms of the embedding length.
pub struct Circulant {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    kernel_hat: Vec<Complex<f64>>,
}

impl Circulant {
    pub fn new(first_col: &[f64]) -> Self {
        let len = first_col.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut kernel_hat: Vec<Complex<f64>> =
            first_col.iter().map(|&v| Complex::new(v, 0.0)).collect();
        forward.process(&mut kernel_hat);
        Self {
            len,
            forward,
            inverse,
            kernel_hat,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Eigenvalues of the circulant (DFT of the first column). Imaginary parts
    /// are negligible for symmetric first columns.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.kernel_hat.iter().map(|c| c.re).collect()
    }

    /// y = C x where `x` is zero-extended to the embedding length.
    /// Only the first `out.len()` entries of the product are written.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let mut buf = vec![Complex::new(0.0, 0.0); self.len];
        for (b, &v) in buf.iter_mut().zip(x.iter()) {
            b.re = v;
        }
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(self.kernel_hat.iter()) {
            *b *= k;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        for (o, b) in out.iter_mut().zip(buf.iter()) {
            *o = b.re * scale;
        }
    }

    /// Solves C y = x in the Fourier domain (the circulant must be invertible).
    pub fn solve_into(&self, x: &[f64], out: &mut [f64]) {
        let mut buf = vec![Complex::new(0.0, 0.0); self.len];
        for (b, &v) in buf.iter_mut().zip(x.iter()) {
            b.re = v;
        }
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(self.kernel_hat.iter()) {
            *b /= k;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        for (o, b) in out.iter_mut().zip(buf.iter()) {
            *o = b.re * scale;
        }
    }
}

pub fn next_pow2(n: usize) -> usize {
    n.next_power_of_two()
}

/// Orthogonal sine transform of size `m`:
/// (S v)_j = sqrt(2/(m+1)) * sum_i v_i sin(i j pi / (m+1)).
///
/// S is symmetric and involutory (S * S = I), so the same call performs the
/// inverse transform.
pub struct SineTransform {
    m: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl SineTransform {
    pub fn new(m: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(2 * (m + 1));
        Self { m, fft }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.m);
        let n = 2 * (self.m + 1);
        // Odd extension: [0, v_1..v_m, 0, -v_m..-v_1]; the imaginary part of
        // the DFT then carries the sine sums.
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for (i, &x) in v.iter().enumerate() {
            buf[i + 1].re = x;
            buf[n - 1 - i].re = -x;
        }
        self.fft.process(&mut buf);
        let scale = (2.0 / (self.m + 1) as f64).sqrt() / 2.0;
        (1..=self.m).map(|j| -buf[j].im * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dst(v: &[f64]) -> Vec<f64> {
        let m = v.len();
        let c = (2.0 / (m + 1) as f64).sqrt();
        (1..=m)
            .map(|j| {
                c * v
                    .iter()
                    .enumerate()
                    .map(|(i, &x)| {
                        x * ((i + 1) as f64 * j as f64 * std::f64::consts::PI
                            / (m + 1) as f64)
                            .sin()
                    })
                    .sum::<f64>()
            })
            .collect()
    }

    #[test]
    fn sine_transform_matches_naive_and_is_involutory() {
        let v: Vec<f64> = (0..13).map(|i| (i as f64 * 0.7).sin() + 0.3).collect();
        let st = SineTransform::new(v.len());
        let fast = st.apply(&v);
        let slow = naive_dst(&v);
        for (a, b) in fast.iter().zip(slow.iter()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        let back = st.apply(&fast);
        for (a, b) in back.iter().zip(v.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn circulant_identity() {
        let c = Circulant::new(&[1.0, 0.0, 0.0, 0.0]);
        let x = [1.0, 2.0, 3.0, 4.0];
        let mut y = [0.0; 4];
        c.apply_into(&x, &mut y);
        for (a, b) in x.iter().zip(y.iter()) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
