//! GNNs on realized random graphs against the deterministic graph.

use gtl::gnn::{random_trial_suite, TrialSettings};
use gtl::graphon::{builtin_graphon, GraphonSpec};
use gtl::kernels::RegularizerParams;
use gtl::quadrature::QuadOptions;
use gtl::signal::random_signal;

fn main() -> gtl::Result<()> {
    let f = random_signal(2, 1, 7, true)?;
    let ring = builtin_graphon(GraphonSpec::Ring, 0.45)?;
    let p = RegularizerParams::standard(2, 32)?;
    let settings = TrialSettings {
        n: 1024,
        seeds: (0..20).collect(),
        eta: ring.certificate.map(|c| c.eta).unwrap_or(f64::NAN),
        probability_constant: 1.0,
        opts: QuadOptions::default(),
    };
    let s = random_trial_suite(
        &ring.graphon,
        &p,
        &f.sample_uniform(32),
        |x, o| f.eval_into(x, o),
        &settings,
    )?;
    println!("deterministic error {:.4}", s.deterministic_error);
    println!(
        "random: mean {:.4}, max {:.4}, std {:.4}",
        s.mean_error, s.max_error, s.std_error
    );
    println!(
        "seed-mean vs deterministic: {:.3e}",
        s.mean_relative_difference
    );
    println!("within 1.5x: {:.0}%", 100.0 * s.within_factor);
    println!(
        "probability expression at C = 1: {:.4}",
        s.probability_bound
    );
    Ok(())
}
