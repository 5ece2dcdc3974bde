//! Reconstruction through the truncated Gaussian kernel.
//!
//! The error is measured by quadrature in double-double arithmetic and
//! compared with the spectral identity and the bound `E-tilde`.

use gtl::kernels::precise::measured_l2_error;
use gtl::kernels::{
    error_bound_tilde, exact_l2_error, AliasingCoefficients, RegularizerParams, SamplingKernel,
};
use gtl::quadrature::QuadOptions;
use gtl::signal::random_signal;

fn main() -> gtl::Result<()> {
    let f = random_signal(2, 1, 7, true)?;
    println!(
        "{:>4} {:>9} {:>9} {:>12} {:>12} {:>12}",
        "N", "r", "sigma", "measured", "identity", "E-tilde"
    );
    for n in [32, 64, 128] {
        let p = RegularizerParams::standard(2, n)?;
        let measured = measured_l2_error(&f, &p, &QuadOptions::default())?;
        let exact = exact_l2_error(&f, &AliasingCoefficients::new(p)?)?;
        let bound = error_bound_tilde(&p)?;
        println!(
            "{n:>4} {:>9.5} {:>9.4} {measured:>12.4e} {exact:>12.4e} {:>12.4e}",
            p.r, p.sigma, bound.total
        );
    }

    // the kernel itself, at a point
    let p = RegularizerParams::standard(2, 32)?;
    let k = SamplingKernel::new(p)?;
    let s = f.sample_uniform(32);
    let x = 0.37;
    println!("f({x}) = {:.15}", f.evaluate(x)?[0]);
    println!("Rf({x}) = {:.15}", k.reconstruct(&s, x)?[0]);
    Ok(())
}
