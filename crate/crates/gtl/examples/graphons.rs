//! Builtin graphons, regularity certificates and sampled graphs.

use gtl::graphon::{
    builtin_graphon, deterministic_graph, estimate_regularity, local_average, random_graph,
    AdjacencyMatrix, GraphonSpec,
};

fn main() -> gtl::Result<()> {
    for spec in ["ring", "constant:0.7", "tent:0.5", "sbm:0.8,0.2,0.5"] {
        let spec: GraphonSpec = spec.parse()?;
        let b = builtin_graphon(spec, 0.1)?;
        let w = &b.graphon;
        print!(
            "{spec}: W(0.2, 0.3) = {:.4}, local average at 0.5 = {:.4}",
            w.eval(0.2, 0.3),
            local_average(w, 0.5, 0.25)?
        );
        match (&b.certificate, &b.caveat) {
            (Some(c), _) => println!(", eta = {:.4}, K = {:.4}", c.eta, c.lipschitz_k),
            (None, Some(why)) => println!(", no certificate: {why}"),
            _ => println!(),
        }
        if let Ok(est) = estimate_regularity(w, 0.1, 256) {
            println!(
                "  grid estimate: eta = {:.4}, K = {:.4}",
                est.eta, est.lipschitz_k
            );
        }
    }

    let ring = builtin_graphon(GraphonSpec::Ring, 0.1)?.graphon;
    let det = deterministic_graph(&ring, 8)?;
    let ran = random_graph(&ring, 8, 42)?;
    println!(
        "deterministic row 0: {:?}",
        det.row(0)
            .iter()
            .map(|v| format!("{v:.3}"))
            .collect::<Vec<_>>()
    );
    println!("realized row 0: {:?}", ran.row(0));

    let mut buf = Vec::new();
    ran.write_csv(&mut buf)?;
    let back = AdjacencyMatrix::read_csv(buf.as_slice())?;
    println!("csv round trip exact: {}", back.entries() == ran.entries());
    Ok(())
}
