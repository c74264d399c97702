//! Tikhonov deblurring of the bundled test image: blur + noise, then PCG on
//! the normal equations with a fractional diffusion regularizer and the
//! tau-algebra preconditioner.  Writes the observed and restored images next
//! to the working directory.

use std::path::Path;

use riesz_mg::deblur::{deblur, load_pgm, save_pgm, DeblurConfig, DeblurPrec};

fn main() -> riesz_mg::Result<()> {
    let asset = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../assets/test_image_128.pgm");
    let (image, w, h) = load_pgm(&asset)?;

    for mu in [1e-3, 1e-4, 1e-5] {
        let cfg = DeblurConfig {
            prec: DeblurPrec::Tau,
            ..DeblurConfig::new(mu)
        };
        let res = deblur(&image, w, h, &cfg)?;
        println!(
            "mu = {mu:e}: {} iterations, restoration error = {:.3e}",
            res.report.iterations, res.rre
        );
        if mu == 1e-4 {
            save_pgm(Path::new("observed.pgm"), &res.observed, w, h)?;
            save_pgm(Path::new("restored.pgm"), &res.restored, w, h)?;
            println!("wrote observed.pgm and restored.pgm");
        }
    }
    Ok(())
}
