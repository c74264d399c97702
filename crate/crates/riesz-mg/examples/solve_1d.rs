//! Solves the 1D fractional diffusion reference problem with a stationary
//! V(1,1) multigrid iteration and reports the error against the exact
//! solution.

use riesz_mg::multigrid::{build_1d_hierarchy, mgm_solve, MgConfig};
use riesz_mg::problems::example1;
use riesz_mg::FracOrder;

fn main() -> riesz_mg::Result<()> {
    let alpha = FracOrder::new(1.5)?;
    let m = 255;
    let problem = example1(alpha, m)?;

    let hier = build_1d_hierarchy(alpha, m, (0.0, 1.0), 1.0, None, &MgConfig::default())?;
    let (u, report) = mgm_solve(&hier, &problem.rhs, 1e-10, 100)?;

    let err = u
        .iter()
        .zip(problem.exact.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    println!(
        "alpha = {}, M = {m}: {} iterations, relres = {:.2e}, max error vs exact = {:.2e}",
        alpha.get(),
        report.iterations,
        report.final_relres,
        err
    );
    Ok(())
}
