//! One 2N-weight vector run on graphs of several sizes.

use std::sync::Arc;

use gtl::gnn::{step_l2_error, GnnKernel, GnnModel};
use gtl::graphon::{builtin_graphon, deterministic_graph, GraphonSpec};
use gtl::kernels::{RegularizerParams, SamplingKernel};
use gtl::quadrature::QuadOptions;
use gtl::signal::random_signal;

fn main() -> gtl::Result<()> {
    let f = random_signal(2, 1, 7, true)?;
    let ring = builtin_graphon(GraphonSpec::Ring, 0.45)?.graphon;
    let p = RegularizerParams::standard(2, 32)?;
    let (a, b) = p.zone();

    let adj = Arc::new(deterministic_graph(&ring, 512)?);
    let kernel = GnnKernel::new(SamplingKernel::new(p)?, ring.clone(), adj)?;
    let base = GnnModel::new(kernel, f.sample_uniform(32))?;
    for n in [512, 1024, 2048, 4096] {
        let model = base.transfer(Arc::new(deterministic_graph(&ring, n)?))?;
        let err = step_l2_error(
            &model.step_extension(),
            |x, o| f.eval_into(x, o),
            a,
            b,
            &QuadOptions::default(),
        )?;
        println!(
            "n = {n:5}: {} weights, zone error {err:.4}, error x n = {:.0}",
            model.weights().len(),
            err * n as f64
        );
    }
    Ok(())
}
