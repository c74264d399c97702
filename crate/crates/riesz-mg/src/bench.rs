//! Benchmark drivers: iteration-count tables for the 1D and 2D reference
//! problems, the deblurring study, and CSV exports of the symbol analysis.
//!
//! Tables carry preformatted cells, so the CSV and markdown renderings of the
//! same run contain identical numbers, and reruns are byte-identical (the
//! deblurring table's wall-time column is the one intentionally non-pinned
//! output).

use std::f64::consts::PI;
use std::io::Write as IoWrite;
use std::path::{Path, PathBuf};

use crate::deblur::{deblur, DeblurConfig, DeblurPrec};
use crate::error::Result;
use crate::frac::{symbol_delta_s, symbol_f, symbol_g_s, symbol_kappa, FracOrder};
use crate::krylov::{cg_solve, gmres_solve};
use crate::multigrid::{
    build_1d_hierarchy, build_2d_hierarchy, mgm_solve, Coarsening, CycleKind, MgConfig,
    SmootherConfig,
};
use crate::prec::{
    banded_mg_prec_1d, banded_mg_prec_2d, default_bandwidth, mg_prec_1d, mg_prec_2d,
    CirculantKind, CirculantPrec, CirculantPrec2D, Preconditioner, TauPrec2D,
};
use crate::problems::{example1, example2, example3};
use crate::symbols::{coarse_symbol_recursion, write_ck_csv, write_coarse_symbols_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Markdown,
}

/// A rendered results table: a name, a header row and preformatted cells.
#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.headers.len());
        self.rows.push(cells);
    }

    pub fn render(&self, format: TableFormat) -> String {
        let mut out = String::new();
        match format {
            TableFormat::Csv => {
                out.push_str(&self.headers.join(","));
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
            }
            TableFormat::Markdown => {
                out.push_str(&format!("| {} |\n", self.headers.join(" | ")));
                out.push_str(&format!(
                    "|{}\n",
                    " --- |".repeat(self.headers.len())
                ));
                for row in &self.rows {
                    out.push_str(&format!("| {} |\n", row.join(" | ")));
                }
            }
        }
        out
    }

    pub fn write_to(&self, out: &mut dyn IoWrite, format: TableFormat) -> Result<()> {
        out.write_all(self.render(format).as_bytes())?;
        Ok(())
    }
}

/// Options shared by the table runs.
#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    pub tol: f64,
    pub maxit: usize,
    /// Include the largest (slow) grid sizes.
    pub large: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            maxit: 5000,
            large: false,
        }
    }
}

fn mg_cfg(coarsening: Coarsening, cycle: CycleKind, nu_pre: usize, nu_post: usize) -> MgConfig {
    MgConfig {
        coarsening,
        cycle,
        smoother: SmootherConfig {
            omega: None,
            nu_pre,
            nu_post,
        },
        ..MgConfig::default()
    }
}

/// 1D iteration counts on grids 2^6..2^10: stationary two-grid and V-cycle
/// solvers under both coarsening strategies and three smoothing patterns,
/// followed by CG with the banded-multigrid, V-cycle, circulant and
/// tau-algebra preconditioners.
pub fn run_table1(opts: &BenchOptions) -> Result<Table> {
    let mut table = Table::new(
        "solvers_1d",
        &[
            "alpha",
            "m_plus_1",
            "tgm_gal_01",
            "tgm_gal_10",
            "tgm_gal_11",
            "v_gal_01",
            "v_gal_10",
            "v_gal_11",
            "tgm_geo_01",
            "tgm_geo_10",
            "tgm_geo_11",
            "v_geo_01",
            "v_geo_10",
            "v_geo_11",
            "cg",
            "s",
            "pcg_banded_v",
            "pcg_v_gal",
            "pcg_v_geo",
            "pcg_chan",
            "pcg_strang",
        ],
    );
    let top = if opts.large { 10 } else { 9 };
    for &a in &[1.2, 1.5, 1.8] {
        let alpha = FracOrder::new(a)?;
        for exp in 6..=top {
            let m = (1usize << exp) - 1;
            let problem = example1(alpha, m)?;
            let mut cells = vec![format!("{a}"), format!("{}", m + 1)];
            for (coarsening, cycle) in [
                (Coarsening::Galerkin, CycleKind::Tgm),
                (Coarsening::Galerkin, CycleKind::V),
                (Coarsening::Geometric, CycleKind::Tgm),
                (Coarsening::Geometric, CycleKind::V),
            ] {
                for (p, q) in [(0usize, 1usize), (1, 0), (1, 1)] {
                    let cfg = mg_cfg(coarsening, cycle, p, q);
                    let hier = build_1d_hierarchy(alpha, m, (0.0, 1.0), 1.0, None, &cfg)?;
                    let (_, rep) = mgm_solve(&hier, &problem.rhs, opts.tol, opts.maxit)?;
                    cells.push(format!("{}", rep.iterations));
                }
            }
            let s = default_bandwidth(m);
            let precs: Vec<Option<Box<dyn Preconditioner>>> = vec![
                None,
                Some(Box::new(banded_mg_prec_1d(alpha, m, (0.0, 1.0), 1.0, s)?)),
                Some(Box::new(mg_prec_1d(
                    alpha,
                    m,
                    (0.0, 1.0),
                    1.0,
                    Coarsening::Galerkin,
                )?)),
                Some(Box::new(mg_prec_1d(
                    alpha,
                    m,
                    (0.0, 1.0),
                    1.0,
                    Coarsening::Geometric,
                )?)),
                Some(Box::new(CirculantPrec::new(CirculantKind::Chan, &problem.op)?)),
                Some(Box::new(CirculantPrec::new(
                    CirculantKind::Strang,
                    &problem.op,
                )?)),
            ];
            for (i, p) in precs.iter().enumerate() {
                let (_, rep) =
                    cg_solve(&problem.op.toeplitz, &problem.rhs, p.as_deref(), opts.tol, opts.maxit)?;
                cells.push(format!("{}", rep.iterations));
                if i == 0 {
                    cells.push(format!("{s}"));
                }
            }
            table.push_row(cells);
        }
    }
    Ok(table)
}

/// 2D constant-coefficient iteration counts on grids 2^5..2^9 (the largest
/// behind `large`): CG, stationary V(1,1) solvers, and PCG with multigrid,
/// banded-multigrid, tau and circulant preconditioners.
pub fn run_table2(opts: &BenchOptions) -> Result<Table> {
    let mut table = Table::new(
        "constant_coeff_2d",
        &[
            "alpha",
            "beta",
            "m_plus_1",
            "cg",
            "v_gal",
            "v_geo",
            "pcg_v_gal",
            "pcg_v_geo",
            "pcg_banded_v",
            "pcg_tau",
            "pcg_strang",
        ],
    );
    let dom = ((0.0, 1.0), (0.0, 1.0));
    let one = |_: f64, _: f64| 1.0;
    let top = if opts.large { 9 } else { 8 };
    for &(a, b) in &[(1.1, 1.2), (1.5, 1.5), (1.7, 1.9)] {
        let alpha = FracOrder::new(a)?;
        let beta = FracOrder::new(b)?;
        for exp in 5..=top {
            let m = (1usize << exp) - 1;
            let problem = example2(alpha, beta, m, m)?;
            let s = default_bandwidth(m);
            let mut cells = vec![format!("{a}"), format!("{b}"), format!("{}", m + 1)];
            let (_, rep) = cg_solve(&problem.op, &problem.rhs, None, opts.tol, opts.maxit)?;
            cells.push(format!("{}", rep.iterations));
            for coarsening in [Coarsening::Galerkin, Coarsening::Geometric] {
                let cfg = MgConfig {
                    coarsening,
                    ..MgConfig::default()
                };
                let hier = build_2d_hierarchy(alpha, beta, m, m, dom, &one, &one, None, &cfg)?;
                let (_, rep) = mgm_solve(&hier, &problem.rhs, opts.tol, opts.maxit)?;
                cells.push(format!("{}", rep.iterations));
            }
            let precs: Vec<Box<dyn Preconditioner>> = vec![
                Box::new(mg_prec_2d(alpha, beta, m, m, dom, &one, &one, Coarsening::Galerkin)?),
                Box::new(mg_prec_2d(alpha, beta, m, m, dom, &one, &one, Coarsening::Geometric)?),
                Box::new(banded_mg_prec_2d(alpha, beta, m, m, dom, &one, &one, s)?),
                Box::new(TauPrec2D::new(&problem.op)?),
                Box::new(CirculantPrec2D::new(CirculantKind::Strang, &problem.op)?),
            ];
            for p in &precs {
                let (_, rep) =
                    cg_solve(&problem.op, &problem.rhs, Some(p.as_ref()), opts.tol, opts.maxit)?;
                cells.push(format!("{}", rep.iterations));
            }
            table.push_row(cells);
        }
    }
    Ok(table)
}

/// 2D variable-coefficient (nonsymmetric) iteration counts on grids 2^4..2^7:
/// GMRES with geometric-multigrid, banded-multigrid, tau and circulant
/// preconditioners.
pub fn run_table3(opts: &BenchOptions) -> Result<Table> {
    let mut table = Table::new(
        "variable_coeff_2d",
        &[
            "alpha",
            "beta",
            "m_plus_1",
            "gmres",
            "pgmres_v_geo",
            "pgmres_banded_v",
            "pgmres_tau",
            "pgmres_strang",
        ],
    );
    let dom = ((0.0, 2.0), (0.0, 2.0));
    let one = |_: f64, _: f64| 1.0;
    let exy = |x: f64, y: f64| 1.0 + x * y;
    for &(a, b) in &[(1.1, 1.2), (1.5, 1.5), (1.7, 1.9), (1.9, 1.9)] {
        let alpha = FracOrder::new(a)?;
        let beta = FracOrder::new(b)?;
        for exp in 4..=7 {
            let m = (1usize << exp) - 1;
            let problem = example3(alpha, beta, m, m)?;
            let s = default_bandwidth(m);
            let mut cells = vec![format!("{a}"), format!("{b}"), format!("{}", m + 1)];
            let precs: Vec<Option<Box<dyn Preconditioner>>> = vec![
                None,
                Some(Box::new(mg_prec_2d(
                    alpha,
                    beta,
                    m,
                    m,
                    dom,
                    &one,
                    &exy,
                    Coarsening::Geometric,
                )?)),
                Some(Box::new(banded_mg_prec_2d(alpha, beta, m, m, dom, &one, &exy, s)?)),
                Some(Box::new(TauPrec2D::new(&problem.op)?)),
                Some(Box::new(CirculantPrec2D::new(
                    CirculantKind::Strang,
                    &problem.op,
                )?)),
            ];
            for p in &precs {
                let (_, rep) =
                    gmres_solve(&problem.op, &problem.rhs, p.as_deref(), opts.tol, opts.maxit)?;
                cells.push(format!("{}", rep.iterations));
            }
            table.push_row(cells);
        }
    }
    Ok(table)
}

/// Deblurring study over a sweep of regularization weights: one row per
/// (mu, preconditioner) with iteration count, restoration error and wall time.
pub fn run_deblur_table(
    image: &[f64],
    m1: usize,
    m2: usize,
    base: &DeblurConfig,
    mus: &[f64],
) -> Result<Table> {
    let mut table = Table::new(
        "deblur",
        &["mu", "method", "iterations", "rre", "wall_time"],
    );
    for &mu in mus {
        for (name, prec) in [
            ("cg", DeblurPrec::None),
            ("pcg_tau", DeblurPrec::Tau),
            ("pcg_strang", DeblurPrec::Strang),
        ] {
            let cfg = DeblurConfig {
                mu,
                prec,
                alpha: base.alpha,
                beta: base.beta,
                psf_std: base.psf_std,
                psf_size: base.psf_size,
                noise: base.noise,
                seed: base.seed,
                tol: base.tol,
                maxit: base.maxit,
            };
            let res = deblur(image, m1, m2, &cfg)?;
            table.push_row(vec![
                format!("{mu:e}"),
                name.to_string(),
                format!("{}", res.report.iterations),
                format!("{:.6e}", res.rre),
                format!("{:.3}", res.report.wall_time),
            ]);
        }
    }
    Ok(table)
}

fn write_file(dir: &Path, name: &str, body: &[u8]) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, body)?;
    Ok(path)
}

/// Writes the symbol-analysis figure data as CSV files into `dir`:
/// projector constants per level, the coarse-symbol chain, the operator
/// symbol against its banded truncations, the truncation gap delta_s, and
/// the relative symbol ratio kappa_s - 1.  All outputs are deterministic.
pub fn run_figures(dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let alphas: Vec<FracOrder> = [1.2, 1.5, 1.8, 2.0]
        .iter()
        .map(|&a| FracOrder::new(a))
        .collect::<Result<_>>()?;
    let mut written = Vec::new();

    let mut buf = Vec::new();
    write_ck_csv(&mut buf, &alphas, 15)?;
    written.push(write_file(dir, "ck_vs_level.csv", &buf)?);

    let chain = coarse_symbol_recursion(FracOrder::new(1.5)?, 6, 512)?;
    let mut buf = Vec::new();
    write_coarse_symbols_csv(&mut buf, &chain)?;
    written.push(write_file(dir, "coarse_symbols.csv", &buf)?);

    let alpha = FracOrder::new(1.5)?;
    let orders = [3usize, 5, 7];
    let grid_n = 512;

    let mut buf = Vec::new();
    write!(buf, "x,f")?;
    for s in orders {
        write!(buf, ",g_{s}")?;
    }
    writeln!(buf)?;
    for j in 1..=grid_n {
        let x = j as f64 * PI / grid_n as f64;
        write!(buf, "{x:.12},{:.12}", symbol_f(alpha, x))?;
        for s in orders {
            write!(buf, ",{:.12}", symbol_g_s(alpha, s, x))?;
        }
        writeln!(buf)?;
    }
    written.push(write_file(dir, "f_vs_gs.csv", &buf)?);

    let mut buf = Vec::new();
    write!(buf, "x")?;
    for s in orders {
        write!(buf, ",delta_{s}")?;
    }
    writeln!(buf)?;
    for j in 1..=grid_n {
        let x = j as f64 * PI / grid_n as f64;
        write!(buf, "{x:.12}")?;
        for s in orders {
            write!(buf, ",{:.12}", symbol_delta_s(alpha, s, x))?;
        }
        writeln!(buf)?;
    }
    written.push(write_file(dir, "delta_s.csv", &buf)?);

    let mut buf = Vec::new();
    write!(buf, "x")?;
    for s in orders {
        write!(buf, ",kappa_{s}_minus_1")?;
    }
    writeln!(buf)?;
    for j in 1..=grid_n {
        let x = j as f64 * PI / grid_n as f64;
        write!(buf, "{x:.12}")?;
        for s in orders {
            write!(buf, ",{:.12}", symbol_kappa(alpha, s, x)? - 1.0)?;
        }
        writeln!(buf)?;
    }
    written.push(write_file(dir, "kappa_minus_1.csv", &buf)?);

    Ok(written)
}
