//! 2D solves: preconditioned CG on the constant-coefficient problem and
//! preconditioned GMRES on the variable-coefficient (nonsymmetric) problem,
//! both with the 2D tau-algebra preconditioner.

use riesz_mg::krylov::{cg_solve, gmres_solve};
use riesz_mg::prec::TauPrec2D;
use riesz_mg::problems::{example2, example3};
use riesz_mg::FracOrder;

fn main() -> riesz_mg::Result<()> {
    let (alpha, beta) = (FracOrder::new(1.5)?, FracOrder::new(1.8)?);
    let m = 63;

    let sym = example2(alpha, beta, m, m)?;
    let prec = TauPrec2D::new(&sym.op)?;
    let (_, plain) = cg_solve(&sym.op, &sym.rhs, None, 1e-8, 5000)?;
    let (_, pre) = cg_solve(&sym.op, &sym.rhs, Some(&prec), 1e-8, 5000)?;
    println!(
        "constant coefficients ({m}x{m}): cg = {} iterations, tau-pcg = {}",
        plain.iterations, pre.iterations
    );

    let nonsym = example3(alpha, beta, m, m)?;
    let prec = TauPrec2D::new(&nonsym.op)?;
    let (_, plain) = gmres_solve(&nonsym.op, &nonsym.rhs, None, 1e-8, 2000)?;
    let (_, pre) = gmres_solve(&nonsym.op, &nonsym.rhs, Some(&prec), 1e-8, 2000)?;
    println!(
        "variable coefficients ({m}x{m}): gmres = {} iterations, tau-pgmres = {}",
        plain.iterations, pre.iterations
    );
    Ok(())
}
