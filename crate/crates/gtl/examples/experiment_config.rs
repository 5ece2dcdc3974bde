//! Running an experiment from its JSON config, as the CLI does.

use gtl::experiments::{run, ExperimentConfig};

fn main() -> gtl::Result<()> {
    let config = ExperimentConfig::from_json(
        r#"{
            "kind": "transfer",
            "graphon": { "kind": "tent", "eta0": 0.5 },
            "half_counts": [32],
            "vertices": [512, 2048],
            "fit_vertices": [256, 512, 1024],
            "seed": 3
        }"#,
    )?;
    let report = run(&config)?;
    report.write_csv(std::io::stdout())?;
    for s in &report.summary {
        println!("{} = {:.6e} ({:?})", s.name, s.value, s.provenance);
    }
    for v in &report.verdicts {
        println!("{}", v.line());
    }
    Ok(())
}
