//! Circulant (Strang, Chan) and tau-algebra preconditioners for the 1D
//! operator: all three are applied in O(n log n) via FFTs, but the tau
//! preconditioner matches the Toeplitz boundary behavior best.

use riesz_mg::krylov::cg_solve;
use riesz_mg::prec::{CirculantKind, CirculantPrec, Preconditioner, TauPrec};
use riesz_mg::problems::example1;
use riesz_mg::FracOrder;

fn main() -> riesz_mg::Result<()> {
    let alpha = FracOrder::new(1.8)?;
    println!("{:>8} {:>6} {:>8} {:>6} {:>6}", "M+1", "cg", "strang", "chan", "tau");
    for exp in 6..=10 {
        let m = (1usize << exp) - 1;
        let problem = example1(alpha, m)?;
        let precs: Vec<Option<Box<dyn Preconditioner>>> = vec![
            None,
            Some(Box::new(CirculantPrec::new(CirculantKind::Strang, &problem.op)?)),
            Some(Box::new(CirculantPrec::new(CirculantKind::Chan, &problem.op)?)),
            Some(Box::new(TauPrec::new(&problem.op)?)),
        ];
        let mut counts = Vec::new();
        for p in &precs {
            let (_, rep) = cg_solve(&problem.op.toeplitz, &problem.rhs, p.as_deref(), 1e-8, 5000)?;
            counts.push(rep.iterations);
        }
        println!(
            "{:>8} {:>6} {:>8} {:>6} {:>6}",
            m + 1,
            counts[0],
            counts[1],
            counts[2],
            counts[3]
        );
    }
    Ok(())
}
