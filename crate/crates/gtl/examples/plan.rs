//! Pick N, r, sigma and a graph size for a target accuracy.
//!
//! ```text
//! cargo run --example plan -- 0.1 1
//! ```

use gtl::kernels::{plan_params, DEFAULT_ALPHA, DEFAULT_BETA};

fn main() -> gtl::Result<()> {
    let mut args = std::env::args().skip(1);
    let eps: f64 = args
        .next()
        .map(|a| a.parse().expect("epsilon"))
        .unwrap_or(0.1);
    let m: usize = args
        .next()
        .map(|a| a.parse().expect("bandwidth"))
        .unwrap_or(1);

    let plan = plan_params(eps, m, DEFAULT_ALPHA, DEFAULT_BETA, None, None)?;
    println!("eps = {eps}, m = {m}");
    println!(
        "N = {} ({} weights), n >= {}",
        plan.n, plan.weights, plan.n_min
    );
    println!("r = {:.6}, sigma = {:.6}", plan.r, plan.sigma);
    if plan.valid {
        println!("zone [{:.4}, {:.4}]", plan.zone.0, plan.zone.1);
    } else {
        for issue in &plan.issues {
            println!("not usable: {issue}");
        }
    }
    Ok(())
}
