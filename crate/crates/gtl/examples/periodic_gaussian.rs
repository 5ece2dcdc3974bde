//! The periodic Gaussian by its Fourier and Poisson series.

use gtl::kernels::{PeriodicGaussian, Route, DEFAULT_SERIES_TOL};

fn main() -> gtl::Result<()> {
    for sigma in [0.5, 2.0, 10.0] {
        let g = PeriodicGaussian::new(sigma, DEFAULT_SERIES_TOL)?;
        println!(
            "sigma = {sigma}: {} Fourier terms, {} comb terms, preferred {:?}",
            g.fourier_cutoff(),
            g.comb_cutoff(),
            g.preferred_route()
        );
        for x in [0.0, 0.1, 0.25, 0.5] {
            let a = g.eval_route(x, Route::Fourier);
            let b = g.eval_route(x, Route::Poisson);
            println!("  G({x:.2}) = {a:.15e}  gap {:.1e}", (a - b).abs());
        }
    }
    Ok(())
}
