//! Nyquist-rate sampling: band coefficients and the signal come back exactly.

use gtl::kernels::reconstruct_exact;
use gtl::signal::{coeffs_from_samples, random_signal, IndexBand};

fn main() -> gtl::Result<()> {
    let f = random_signal(4, 2, 11, false)?;
    for n in [4, 8, 16] {
        let s = f.sample_uniform(n);
        let back = coeffs_from_samples(&s, IndexBand::new(4)?)?;
        let coeff_err = back
            .coeffs()
            .iter()
            .zip(f.coeffs())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for i in 0..1000 {
            let x = i as f64 / 999.0;
            let exact = f.evaluate(x)?;
            for (a, b) in reconstruct_exact(&s, x).iter().zip(&exact) {
                worst = worst.max((a - b).norm());
            }
        }
        println!(
            "N = {n:2}: coefficient error {coeff_err:.2e}, pointwise error {worst:.2e}, energy {:.12} vs {:.12}",
            s.energy(),
            f.energy()
        );
    }
    Ok(())
}
