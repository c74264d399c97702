//! Explores the generating symbols behind the solvers: the projector
//! constants of the Galerkin coarse hierarchy, the coarse-symbol chain, and
//! the Jacobi smoothing constants.

use riesz_mg::symbols::{
    coarse_symbol_recursion, projector_constant_limit, projector_constants, smoothing_constants,
};
use riesz_mg::FracOrder;

fn main() -> riesz_mg::Result<()> {
    for &a in &[1.2, 1.5, 1.8] {
        let alpha = FracOrder::new(a)?;
        let c_k = projector_constants(alpha, 10);
        let limit = projector_constant_limit(alpha);
        println!(
            "alpha = {a}: C_1 = {:.6}, C_5 = {:.6}, C_10 = {:.6}, limit 2^((a-1)/2) = {:.6}",
            c_k[1], c_k[5], c_k[10], limit
        );
        let sc = smoothing_constants(alpha);
        println!(
            "           omega* = {:.4}, sigma = {:.4}, omega_max = {:.4}",
            sc.omega_star, sc.sigma, sc.omega_max
        );
    }

    // The coarse symbols stay nonnegative with a single zero at the origin
    // and keep the value 2^(alpha+1) at pi on every level.
    let alpha = FracOrder::new(1.5)?;
    let chain = coarse_symbol_recursion(alpha, 6, 512)?;
    for k in 0..=6 {
        println!(
            "level {k}: f_k(pi/2) = {:.6}, f_k(pi) = {:.6}",
            chain.samples[k][256], chain.samples[k][512]
        );
    }
    Ok(())
}
