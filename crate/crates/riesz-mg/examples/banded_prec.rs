//! Compares plain CG with CG preconditioned by a V(1,1) multigrid cycle on
//! the banded truncation of the 1D operator.  The band keeps setup and cycle
//! costs linear while the iteration count stays bounded in the grid size.

use riesz_mg::krylov::cg_solve;
use riesz_mg::prec::{banded_mg_prec_1d, default_bandwidth};
use riesz_mg::problems::example1;
use riesz_mg::FracOrder;

fn main() -> riesz_mg::Result<()> {
    let alpha = FracOrder::new(1.5)?;
    println!("{:>8} {:>4} {:>6} {:>10}", "M+1", "s", "cg", "pcg_banded");
    for exp in 6..=10 {
        let m = (1usize << exp) - 1;
        let problem = example1(alpha, m)?;
        let (_, plain) = cg_solve(&problem.op.toeplitz, &problem.rhs, None, 1e-8, 5000)?;
        let s = default_bandwidth(m);
        let prec = banded_mg_prec_1d(alpha, m, (0.0, 1.0), 1.0, s)?;
        let (_, pre) = cg_solve(&problem.op.toeplitz, &problem.rhs, Some(&prec), 1e-8, 5000)?;
        println!(
            "{:>8} {:>4} {:>6} {:>10}",
            m + 1,
            s,
            plain.iterations,
            pre.iterations
        );
    }
    Ok(())
}
