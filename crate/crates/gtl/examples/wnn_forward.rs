//! The two-layer graphon network against the signal it was sampled from.

use std::sync::Arc;

use gtl::graphon::{builtin_graphon, GraphonSpec};
use gtl::kernels::RegularizerParams;
use gtl::quadrature::QuadOptions;
use gtl::signal::random_signal;
use gtl::wnn::{WnnKernel, WnnModel};

fn main() -> gtl::Result<()> {
    let f = random_signal(2, 1, 7, true)?;
    let ring = builtin_graphon(GraphonSpec::Ring, 0.45)?;
    let p = RegularizerParams::standard(2, 32)?;
    let kernel = Arc::new(WnnKernel::from_params(p, ring.graphon, ring.certificate)?);
    let model = WnnModel::from_signal(kernel, &f)?;
    println!("zone [{:.4}, {:.4}]", p.r, 1.0 - p.r);
    for x in [0.1, 0.4, 0.5, 0.6, 0.9] {
        let psi = model.forward(x)?[0];
        let fx = f.evaluate(x)?[0];
        println!(
            "x = {x:.2}  Psi = {psi:.6}  f = {fx:.6}  in zone: {}",
            model.in_zone(x)
        );
    }
    println!(
        "zone L2 error {:.6}",
        model.zone_error(&f, &QuadOptions::default())?
    );
    Ok(())
}
