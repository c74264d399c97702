//! Command-line benchmark driver: iteration-count tables, figure data,
//! image deblurring and one-off solves for the fractional diffusion solvers.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use riesz_mg::bench::{
    run_deblur_table, run_figures, run_table1, run_table2, run_table3, BenchOptions, Table,
    TableFormat,
};
use riesz_mg::deblur::{deblur, load_pgm, save_pgm, DeblurConfig, DeblurPrec};
use riesz_mg::krylov::{cg_solve, gmres_solve};
use riesz_mg::multigrid::{
    build_1d_hierarchy, build_2d_hierarchy, mgm_solve, Coarsening, CycleKind, MgConfig,
    SmootherConfig,
};
use riesz_mg::prec::{
    banded_mg_prec_1d, banded_mg_prec_2d, default_bandwidth, mg_prec_1d, mg_prec_2d,
    CirculantKind, CirculantPrec, CirculantPrec2D, Preconditioner, TauPrec, TauPrec2D,
};
use riesz_mg::problems::{example1, example2};
use riesz_mg::report::SolveReport;
use riesz_mg::{FracOrder, Result};

#[derive(Parser)]
#[command(
    name = "riesz-mg",
    about = "Multigrid and matrix-algebra preconditioner benchmarks for Riesz-space fractional diffusion",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
}

impl From<FormatArg> for TableFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => TableFormat::Csv,
            FormatArg::Markdown => TableFormat::Markdown,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CoarseningArg {
    Galerkin,
    Geometric,
}

impl From<CoarseningArg> for Coarsening {
    fn from(c: CoarseningArg) -> Self {
        match c {
            CoarseningArg::Galerkin => Coarsening::Galerkin,
            CoarseningArg::Geometric => Coarsening::Geometric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CycleArg {
    Tgm,
    V,
    W,
}

impl From<CycleArg> for CycleKind {
    fn from(c: CycleArg) -> Self {
        match c {
            CycleArg::Tgm => CycleKind::Tgm,
            CycleArg::V => CycleKind::V,
            CycleArg::W => CycleKind::W,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecArg {
    None,
    Strang,
    Tau,
}

impl From<PrecArg> for DeblurPrec {
    fn from(p: PrecArg) -> Self {
        match p {
            PrecArg::None => DeblurPrec::None,
            PrecArg::Strang => DeblurPrec::Strang,
            PrecArg::Tau => DeblurPrec::Tau,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Stationary multigrid iteration.
    Mg,
    /// (Preconditioned) conjugate gradient.
    Cg,
    /// (Preconditioned) GMRES.
    Gmres,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolvePrecArg {
    None,
    VGal,
    VGeo,
    BandedV,
    Tau,
    Strang,
    Chan,
}

#[derive(Args)]
struct TableArgs {
    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Iteration cap per solve.
    #[arg(long, default_value_t = 5000)]
    maxit: usize,
    /// Include the largest (slow) grid sizes.
    #[arg(long)]
    large: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Subcommand)]
enum Command {
    /// 1D solver and preconditioner iteration counts.
    Table1(TableArgs),
    /// 2D constant-coefficient iteration counts.
    Table2(TableArgs),
    /// 2D variable-coefficient (GMRES) iteration counts.
    Table3(TableArgs),
    /// Tikhonov deblurring study.
    Deblur {
        /// Regularization weight(s); repeat the flag for a sweep.
        #[arg(long, num_args = 1.., default_values_t = [1e-3, 1e-4, 1e-5, 1e-6])]
        mu: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        psf_std: f64,
        #[arg(long, default_value_t = 9)]
        psf_size: usize,
        /// Relative noise level ||eta|| / ||B u||.
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Run a single preconditioner instead of the full comparison.
        #[arg(long, value_enum)]
        prec: Option<PrecArg>,
        #[arg(long, default_value_t = 1.1)]
        alpha: f64,
        #[arg(long, default_value_t = 1.1)]
        beta: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 5000)]
        maxit: usize,
        /// Input image (binary 8-bit PGM).
        #[arg(long, default_value = "assets/test_image_128.pgm")]
        image: PathBuf,
        /// Write the restored image of the last run here (PGM).
        #[arg(long)]
        restored: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Symbol-analysis figure data as CSV files.
    Figures {
        /// Output directory.
        #[arg(long, default_value = "figures")]
        out: PathBuf,
    },
    /// Solve one reference problem and report the iteration count.
    Solve {
        #[arg(long, default_value_t = 1.5)]
        alpha: f64,
        /// Order of the y-derivative; selects the 2D problem when given.
        #[arg(long)]
        beta: Option<f64>,
        /// Grid size M (unknowns per dimension).
        #[arg(long, default_value_t = 255)]
        size: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Mg)]
        method: MethodArg,
        /// Preconditioner for cg/gmres.
        #[arg(long, value_enum, default_value_t = SolvePrecArg::None)]
        prec: SolvePrecArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 5000)]
        maxit: usize,
        /// Jacobi weight; analyzed default when omitted.
        #[arg(long)]
        omega: Option<f64>,
        /// Half-bandwidth of the banded preconditioner; size-based default.
        #[arg(long)]
        bandwidth: Option<usize>,
        #[arg(long, value_enum, default_value_t = CoarseningArg::Galerkin)]
        coarsening: CoarseningArg,
        #[arg(long, value_enum, default_value_t = CycleArg::V)]
        cycle: CycleArg,
        #[arg(long, default_value_t = 1)]
        nu_pre: usize,
        #[arg(long, default_value_t = 1)]
        nu_post: usize,
    },
}

fn emit(table: &Table, out: Option<&PathBuf>, format: FormatArg) -> Result<()> {
    let body = table.render(format.into());
    match out {
        Some(path) => std::fs::write(path, body)?,
        None => std::io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn print_report(rep: &SolveReport) {
    println!(
        "method={} iterations={} relres={:.3e} wall_time={:.3}s converged={}",
        rep.method_tag, rep.iterations, rep.final_relres, rep.wall_time, rep.converged
    );
}

/// Ok(true) = converged, Ok(false) = iteration cap hit (exit code 2).
fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Table1(a) => {
            let opts = BenchOptions {
                tol: a.tol,
                maxit: a.maxit,
                large: a.large,
            };
            emit(&run_table1(&opts)?, a.out.as_ref(), a.format)?;
            Ok(true)
        }
        Command::Table2(a) => {
            let opts = BenchOptions {
                tol: a.tol,
                maxit: a.maxit,
                large: a.large,
            };
            emit(&run_table2(&opts)?, a.out.as_ref(), a.format)?;
            Ok(true)
        }
        Command::Table3(a) => {
            let opts = BenchOptions {
                tol: a.tol,
                maxit: a.maxit,
                large: a.large,
            };
            emit(&run_table3(&opts)?, a.out.as_ref(), a.format)?;
            Ok(true)
        }
        Command::Figures { out } => {
            for path in run_figures(&out)? {
                println!("wrote {}", path.display());
            }
            Ok(true)
        }
        Command::Deblur {
            mu,
            psf_std,
            psf_size,
            noise,
            seed,
            prec,
            alpha,
            beta,
            tol,
            maxit,
            image,
            restored,
            out,
            format,
        } => {
            let (img, w, h) = load_pgm(&image)?;
            let base = DeblurConfig {
                alpha: FracOrder::new(alpha)?,
                beta: FracOrder::new(beta)?,
                mu: mu[0],
                psf_std,
                psf_size,
                noise,
                seed,
                prec: prec.map(Into::into).unwrap_or(DeblurPrec::None),
                tol,
                maxit,
            };
            match prec {
                // Full comparison across preconditioners.
                None => {
                    let table = run_deblur_table(&img, w, h, &base, &mu)?;
                    emit(&table, out.as_ref(), format)?;
                    if let Some(path) = restored {
                        let cfg = DeblurConfig {
                            mu: *mu.last().unwrap(),
                            prec: DeblurPrec::Tau,
                            ..base
                        };
                        let res = deblur(&img, w, h, &cfg)?;
                        save_pgm(&path, &res.restored, w, h)?;
                    }
                    Ok(true)
                }
                Some(_) => {
                    let mut all_converged = true;
                    let mut last = None;
                    for &m in &mu {
                        let cfg = DeblurConfig { mu: m, ..base };
                        let res = deblur(&img, w, h, &cfg)?;
                        println!(
                            "mu={m:e} iterations={} rre={:.6e} converged={}",
                            res.report.iterations, res.rre, res.report.converged
                        );
                        all_converged &= res.report.converged;
                        last = Some(res.restored);
                    }
                    if let (Some(path), Some(img)) = (restored, last) {
                        save_pgm(&path, &img, w, h)?;
                    }
                    Ok(all_converged)
                }
            }
        }
        Command::Solve {
            alpha,
            beta,
            size,
            method,
            prec,
            tol,
            maxit,
            omega,
            bandwidth,
            coarsening,
            cycle,
            nu_pre,
            nu_post,
        } => {
            let alpha = FracOrder::new(alpha)?;
            let m = size;
            let s = bandwidth.unwrap_or_else(|| default_bandwidth(m));
            let cfg = MgConfig {
                coarsening: coarsening.into(),
                cycle: cycle.into(),
                smoother: SmootherConfig {
                    omega,
                    nu_pre,
                    nu_post,
                },
                ..MgConfig::default()
            };
            let rep = match beta {
                None => {
                    let p = example1(alpha, m)?;
                    match method {
                        MethodArg::Mg => {
                            let hier =
                                build_1d_hierarchy(alpha, m, (0.0, 1.0), 1.0, None, &cfg)?;
                            mgm_solve(&hier, &p.rhs, tol, maxit)?.1
                        }
                        MethodArg::Cg | MethodArg::Gmres => {
                            let pr: Option<Box<dyn Preconditioner>> = match prec {
                                SolvePrecArg::None => None,
                                SolvePrecArg::VGal => Some(Box::new(mg_prec_1d(
                                    alpha,
                                    m,
                                    (0.0, 1.0),
                                    1.0,
                                    Coarsening::Galerkin,
                                )?)),
                                SolvePrecArg::VGeo => Some(Box::new(mg_prec_1d(
                                    alpha,
                                    m,
                                    (0.0, 1.0),
                                    1.0,
                                    Coarsening::Geometric,
                                )?)),
                                SolvePrecArg::BandedV => Some(Box::new(banded_mg_prec_1d(
                                    alpha,
                                    m,
                                    (0.0, 1.0),
                                    1.0,
                                    s,
                                )?)),
                                SolvePrecArg::Tau => Some(Box::new(TauPrec::new(&p.op)?)),
                                SolvePrecArg::Strang => Some(Box::new(CirculantPrec::new(
                                    CirculantKind::Strang,
                                    &p.op,
                                )?)),
                                SolvePrecArg::Chan => Some(Box::new(CirculantPrec::new(
                                    CirculantKind::Chan,
                                    &p.op,
                                )?)),
                            };
                            match method {
                                MethodArg::Cg => {
                                    cg_solve(&p.op.toeplitz, &p.rhs, pr.as_deref(), tol, maxit)?.1
                                }
                                _ => gmres_solve(&p.op.toeplitz, &p.rhs, pr.as_deref(), tol, maxit)?
                                    .1,
                            }
                        }
                    }
                }
                Some(b) => {
                    let beta = FracOrder::new(b)?;
                    let dom = ((0.0, 1.0), (0.0, 1.0));
                    let one = |_: f64, _: f64| 1.0;
                    let p = example2(alpha, beta, m, m)?;
                    match method {
                        MethodArg::Mg => {
                            let hier =
                                build_2d_hierarchy(alpha, beta, m, m, dom, &one, &one, None, &cfg)?;
                            mgm_solve(&hier, &p.rhs, tol, maxit)?.1
                        }
                        MethodArg::Cg | MethodArg::Gmres => {
                            let pr: Option<Box<dyn Preconditioner>> = match prec {
                                SolvePrecArg::None => None,
                                SolvePrecArg::VGal => Some(Box::new(mg_prec_2d(
                                    alpha,
                                    beta,
                                    m,
                                    m,
                                    dom,
                                    &one,
                                    &one,
                                    Coarsening::Galerkin,
                                )?)),
                                SolvePrecArg::VGeo => Some(Box::new(mg_prec_2d(
                                    alpha,
                                    beta,
                                    m,
                                    m,
                                    dom,
                                    &one,
                                    &one,
                                    Coarsening::Geometric,
                                )?)),
                                SolvePrecArg::BandedV => Some(Box::new(banded_mg_prec_2d(
                                    alpha, beta, m, m, dom, &one, &one, s,
                                )?)),
                                SolvePrecArg::Tau => Some(Box::new(TauPrec2D::new(&p.op)?)),
                                SolvePrecArg::Strang => Some(Box::new(CirculantPrec2D::new(
                                    CirculantKind::Strang,
                                    &p.op,
                                )?)),
                                SolvePrecArg::Chan => Some(Box::new(CirculantPrec2D::new(
                                    CirculantKind::Chan,
                                    &p.op,
                                )?)),
                            };
                            match method {
                                MethodArg::Cg => {
                                    cg_solve(&p.op, &p.rhs, pr.as_deref(), tol, maxit)?.1
                                }
                                _ => gmres_solve(&p.op, &p.rhs, pr.as_deref(), tol, maxit)?.1,
                            }
                        }
                    }
                }
            };
            print_report(&rep);
            Ok(rep.converged)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful exits; everything else
            // is a usage error.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("solver did not reach the requested tolerance");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
