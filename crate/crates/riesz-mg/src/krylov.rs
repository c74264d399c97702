//! Krylov solvers: preconditioned conjugate gradients and full GMRES with
//! left preconditioning (modified Gram-Schmidt Arnoldi, Givens rotations).

use std::time::Instant;

use crate::error::{Result, RieszError};
use crate::prec::Preconditioner;
use crate::report::SolveReport;
use crate::toeplitz::LinearOperator;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Preconditioned conjugate gradients from the zero initial guess.
///
/// Stops when the *unpreconditioned* relative residual ||r_k|| / ||b|| drops
/// below `tol`.  Fails with [`RieszError::IndefiniteOperator`] if a search
/// direction has non-positive curvature, and with
/// [`RieszError::IndefinitePreconditioner`] if r' P^{-1} r becomes
/// non-positive.
pub fn cg_solve<A: LinearOperator + ?Sized>(
    a: &A,
    rhs: &[f64],
    prec: Option<&dyn Preconditioner>,
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    let n = a.size();
    if rhs.len() != n {
        return Err(RieszError::LengthMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let start = Instant::now();
    let tag = if prec.is_some() { "pcg" } else { "cg" };
    let mut report = SolveReport::new(tag);
    let mut x = vec![0.0; n];
    let r0 = norm2(rhs);
    report.residual_history.push(r0);
    if r0 == 0.0 {
        report.final_relres = 0.0;
        report.converged = true;
        report.wall_time = start.elapsed().as_secs_f64();
        return Ok((x, report));
    }
    let mut r = rhs.to_vec();
    let apply_prec = |r: &[f64]| -> Vec<f64> {
        match prec {
            Some(p) => p.apply(r),
            None => r.to_vec(),
        }
    };
    let mut z = apply_prec(&r);
    let mut rz = dot(&r, &z);
    if rz <= 0.0 {
        return Err(RieszError::IndefinitePreconditioner(rz));
    }
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    for it in 1..=maxit {
        a.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if pq <= 0.0 {
            return Err(RieszError::IndefiniteOperator(pq));
        }
        let alpha = rz / pq;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        let rn = norm2(&r);
        report.residual_history.push(rn);
        report.iterations = it;
        if rn / r0 < tol {
            report.converged = true;
            break;
        }
        z = apply_prec(&r);
        let rz_new = dot(&r, &z);
        if rz_new <= 0.0 {
            return Err(RieszError::IndefinitePreconditioner(rz_new));
        }
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    report.final_relres = report.residual_history.last().unwrap() / r0;
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((x, report))
}

/// Full (unrestarted) GMRES with optional left preconditioning, from the zero
/// initial guess.
///
/// Stops when the *preconditioned* relative residual drops below `tol`; the
/// report's `final_relres` is the true unpreconditioned relative residual of
/// the returned iterate.
pub fn gmres_solve<A: LinearOperator + ?Sized>(
    a: &A,
    rhs: &[f64],
    prec: Option<&dyn Preconditioner>,
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    let n = a.size();
    if rhs.len() != n {
        return Err(RieszError::LengthMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let start = Instant::now();
    let tag = if prec.is_some() { "pgmres" } else { "gmres" };
    let mut report = SolveReport::new(tag);
    let apply_prec = |r: &[f64]| -> Vec<f64> {
        match prec {
            Some(p) => p.apply(r),
            None => r.to_vec(),
        }
    };

    let r0 = apply_prec(rhs);
    let beta0 = norm2(&r0);
    report.residual_history.push(beta0);
    let mut x = vec![0.0; n];
    if beta0 == 0.0 {
        report.final_relres = 0.0;
        report.converged = true;
        report.wall_time = start.elapsed().as_secs_f64();
        return Ok((x, report));
    }

    let maxit = maxit.min(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(maxit + 1);
    basis.push(r0.iter().map(|v| v / beta0).collect());
    // Column-major upper-Hessenberg entries after Givens rotations.
    let mut h_cols: Vec<Vec<f64>> = Vec::with_capacity(maxit);
    let mut cs: Vec<f64> = Vec::with_capacity(maxit);
    let mut sn: Vec<f64> = Vec::with_capacity(maxit);
    let mut g = vec![beta0];
    let mut happy = false;

    for j in 0..maxit {
        let mut w = vec![0.0; n];
        a.apply(&basis[j], &mut w);
        let mut w = apply_prec(&w);
        let mut h = vec![0.0; j + 2];
        for (i, v) in basis.iter().enumerate() {
            let hij = dot(&w, v);
            h[i] = hij;
            for (wk, vk) in w.iter_mut().zip(v.iter()) {
                *wk -= hij * vk;
            }
        }
        let hlast = norm2(&w);
        h[j + 1] = hlast;

        // Apply accumulated rotations, then the new one.
        for i in 0..j {
            let tmp = cs[i] * h[i] + sn[i] * h[i + 1];
            h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
            h[i] = tmp;
        }
        let denom = (h[j] * h[j] + h[j + 1] * h[j + 1]).sqrt();
        let (c, s) = if denom == 0.0 {
            (1.0, 0.0)
        } else {
            (h[j] / denom, h[j + 1] / denom)
        };
        cs.push(c);
        sn.push(s);
        h[j] = denom;
        h[j + 1] = 0.0;
        g.push(-s * g[j]);
        g[j] *= c;
        h_cols.push(h);

        let relres = g[j + 1].abs() / beta0;
        report.residual_history.push(g[j + 1].abs());
        report.iterations = j + 1;
        if relres < tol {
            report.converged = true;
            break;
        }
        if hlast <= 1e-14 * beta0 {
            // Happy breakdown: the Krylov space is exhausted; the solution in
            // it is exact up to roundoff.
            report.converged = true;
            happy = true;
            break;
        }
        basis.push(w.iter().map(|v| v / hlast).collect());
    }
    let _ = happy;

    // Back-substitute H y = g and expand x = V y.
    let k = report.iterations;
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for (l, yl) in y.iter().enumerate().skip(i + 1) {
            s -= h_cols[l][i] * yl;
        }
        y[i] = s / h_cols[i][i];
    }
    for (l, yl) in y.iter().enumerate() {
        for i in 0..n {
            x[i] += yl * basis[l][i];
        }
    }

    // True residual cross-check.
    let mut r = vec![0.0; n];
    a.apply(&x, &mut r);
    for (ri, &bi) in r.iter_mut().zip(rhs.iter()) {
        *ri = bi - *ri;
    }
    let bnorm = norm2(rhs);
    report.final_relres = if bnorm == 0.0 {
        0.0
    } else {
        norm2(&r) / bnorm
    };
    report.wall_time = start.elapsed().as_secs_f64();
    Ok((x, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frac::FracOrder;
    use crate::prec::{CirculantKind, CirculantPrec, IdentityPrec, TauPrec};
    use crate::toeplitz::{assemble_riesz_1d, assemble_riesz_2d, materialize_dense};
    use nalgebra::DMatrix;

    struct DenseOp(DMatrix<f64>);

    impl LinearOperator for DenseOp {
        fn size(&self) -> usize {
            self.0.nrows()
        }

        fn apply(&self, x: &[f64], y: &mut [f64]) {
            let v = &self.0 * nalgebra::DVector::from_column_slice(x);
            y.copy_from_slice(v.as_slice());
        }

        fn diagonal(&self) -> Vec<f64> {
            (0..self.0.nrows()).map(|i| self.0[(i, i)]).collect()
        }
    }

    fn order(a: f64) -> FracOrder {
        FracOrder::new(a).unwrap()
    }

    fn test_rhs(n: usize) -> Vec<f64> {
        (1..=n)
            .map(|i| {
                let x = i as f64 / (n + 1) as f64;
                x * (1.0 - x)
            })
            .collect()
    }

    #[test]
    fn cg_matches_dense_solve() {
        let op = assemble_riesz_1d(order(1.5), 40, (0.0, 1.0), 1.0).unwrap();
        let rhs = test_rhs(40);
        let (x, rep) = cg_solve(&op.toeplitz, &rhs, None, 1e-12, 1000).unwrap();
        assert!(rep.converged);
        let dense = materialize_dense(&op.toeplitz).unwrap();
        let xd = dense
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(&rhs))
            .unwrap();
        for (a, b) in x.iter().zip(xd.iter()) {
            assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn pcg_with_identity_equals_cg_exactly() {
        let op = assemble_riesz_1d(order(1.2), 33, (0.0, 1.0), 1.0).unwrap();
        let rhs = test_rhs(33);
        let id = IdentityPrec { n: 33 };
        let (x1, r1) = cg_solve(&op.toeplitz, &rhs, None, 1e-10, 500).unwrap();
        let (x2, r2) = cg_solve(&op.toeplitz, &rhs, Some(&id), 1e-10, 500).unwrap();
        assert_eq!(r1.iterations, r2.iterations);
        for (a, b) in x1.iter().zip(x2.iter()) {
            assert_eq!(a, b);
        }
        for (a, b) in r1.residual_history.iter().zip(r2.residual_history.iter()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn cg_error_is_monotone_in_a_norm() {
        let m = 25;
        let op = assemble_riesz_1d(order(1.8), m, (0.0, 1.0), 1.0).unwrap();
        let rhs = test_rhs(m);
        let dense = materialize_dense(&op.toeplitz).unwrap();
        let xstar = dense
            .clone()
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(&rhs))
            .unwrap();
        // Re-run CG step by step by truncating maxit, measuring the A-norm of
        // the error at each iterate.
        let mut prev = f64::INFINITY;
        for it in 1..=12 {
            let (x, _) = cg_solve(&op.toeplitz, &rhs, None, 0.0, it).unwrap();
            let e = nalgebra::DVector::from_column_slice(&x) - &xstar;
            let anorm = (e.transpose() * &dense * &e)[(0, 0)].sqrt();
            assert!(
                anorm <= prev * (1.0 + 1e-12),
                "A-norm error grew at iteration {it}: {anorm} > {prev}"
            );
            prev = anorm;
        }
    }

    #[test]
    fn cg_rejects_indefinite_operator() {
        let mut m = DMatrix::<f64>::identity(4, 4);
        m[(3, 3)] = -1.0;
        let rhs = vec![0.0, 0.0, 0.0, 1.0];
        let err = cg_solve(&DenseOp(m), &rhs, None, 1e-10, 10).unwrap_err();
        assert!(matches!(err, RieszError::IndefiniteOperator(_)));
    }

    #[test]
    fn preconditioned_cg_converges_faster() {
        let op = assemble_riesz_1d(order(1.5), 127, (0.0, 1.0), 1.0).unwrap();
        let rhs = test_rhs(127);
        let (_, plain) = cg_solve(&op.toeplitz, &rhs, None, 1e-8, 2000).unwrap();
        let tau = TauPrec::new(&op).unwrap();
        let (_, tau_rep) = cg_solve(&op.toeplitz, &rhs, Some(&tau), 1e-8, 2000).unwrap();
        let strang = CirculantPrec::new(CirculantKind::Strang, &op).unwrap();
        let (_, s_rep) = cg_solve(&op.toeplitz, &rhs, Some(&strang), 1e-8, 2000).unwrap();
        assert!(tau_rep.iterations < s_rep.iterations);
        assert!(s_rep.iterations < plain.iterations);
    }

    #[test]
    fn gmres_matches_dense_solve_nonsymmetric() {
        // Variable-coefficient 2D operator with distinct row scalings is
        // nonsymmetric; GMRES must still recover the dense solution.
        let op = assemble_riesz_2d(
            order(1.4),
            order(1.7),
            7,
            7,
            ((0.0, 2.0), (0.0, 2.0)),
            &|_, _| 1.0,
            &|x, y| 1.0 + x * y,
        )
        .unwrap();
        let n = 49;
        let rhs = test_rhs(n);
        let (x, rep) = gmres_solve(&op, &rhs, None, 1e-12, 200).unwrap();
        assert!(rep.converged);
        let dense = materialize_dense(&op).unwrap();
        let xd = dense
            .lu()
            .solve(&nalgebra::DVector::from_column_slice(&rhs))
            .unwrap();
        for (a, b) in x.iter().zip(xd.iter()) {
            assert!((a - b).abs() < 1e-8 * (1.0 + b.abs()), "{a} vs {b}");
        }
        assert!(rep.final_relres < 1e-10);
    }

    #[test]
    fn gmres_residual_history_is_nonincreasing() {
        let op = assemble_riesz_1d(order(1.3), 50, (0.0, 1.0), 1.0).unwrap();
        let rhs = test_rhs(50);
        let (_, rep) = gmres_solve(&op.toeplitz, &rhs, None, 1e-10, 200).unwrap();
        for w in rep.residual_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn gmres_with_identity_prec_matches_unpreconditioned() {
        let op = assemble_riesz_1d(order(1.6), 30, (0.0, 1.0), 1.0).unwrap();
        let rhs = test_rhs(30);
        let id = IdentityPrec { n: 30 };
        let (x1, r1) = gmres_solve(&op.toeplitz, &rhs, None, 1e-10, 100).unwrap();
        let (x2, r2) = gmres_solve(&op.toeplitz, &rhs, Some(&id), 1e-10, 100).unwrap();
        assert_eq!(r1.iterations, r2.iterations);
        for (a, b) in x1.iter().zip(x2.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn gmres_happy_breakdown_on_small_space() {
        // rhs is an eigenvector of the identity: one iteration suffices.
        let m = DMatrix::<f64>::identity(8, 8) * 3.0;
        let rhs = vec![1.0; 8];
        let (x, rep) = gmres_solve(&DenseOp(m), &rhs, None, 1e-30, 10).unwrap();
        assert!(rep.converged);
        assert!(rep.iterations <= 2);
        for v in x {
            assert!((v - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gmres_equals_cg_counts_on_spd_problem() {
        // On an SPD system both methods minimize over the same Krylov spaces;
        // the GMRES (2-norm) count cannot exceed the CG (stop on the same
        // unpreconditioned residual) count by more than a couple.
        let op = assemble_riesz_1d(order(1.5), 63, (0.0, 1.0), 1.0).unwrap();
        let rhs = test_rhs(63);
        let (_, cg) = cg_solve(&op.toeplitz, &rhs, None, 1e-8, 500).unwrap();
        let (_, gm) = gmres_solve(&op.toeplitz, &rhs, None, 1e-8, 500).unwrap();
        assert!(gm.iterations <= cg.iterations);
        assert!(cg.iterations <= gm.iterations + 5);
    }
}
