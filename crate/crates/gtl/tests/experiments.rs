use gtl::experiments::{
    self, ExperimentConfig, ExperimentKind, ExperimentReport, GraphMode, OutputFormat, Provenance,
};
use gtl::graphon::GraphonSpec;

fn small(kind: ExperimentKind) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind);
    c.half_counts = Some(vec![32]);
    c.vertices = Some(vec![256]);
    c.fit_vertices = Some(vec![128, 256]);
    c.grid = 64;
    c.trials = 3;
    c
}

fn tempdir(name: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("gtl-experiments-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn every_kind_has_a_config_that_round_trips() {
    for kind in ExperimentKind::ALL {
        let c = small(kind);
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c, "{kind}");
    }
}

#[test]
fn minimal_config_takes_defaults() {
    let c = ExperimentConfig::from_json(
        r#"{"kind": "gnn-eval", "mode": "ran", "graphon": {"kind": "tent", "eta0": 0.3}}"#,
    )
    .unwrap();
    assert_eq!(c.mode, GraphMode::Ran);
    assert_eq!(c.graphon, GraphonSpec::Tent { eta0: 0.3 });
    assert_eq!(c.vertices(), vec![2048]);
    assert_eq!(c.m_frak, 2);
}

#[test]
fn bad_configs_are_usage_errors() {
    let unknown = ExperimentConfig::from_json(r#"{"kind": "plan", "epsilon": 0.1, "bogus": 1}"#);
    assert!(experiments::is_usage_error(&unknown.unwrap_err()));
    let nested = ExperimentConfig::from_json(
        r#"{"kind": "wnn-eval", "graphon": {"kind": "ring", "p": 0.5}}"#,
    );
    assert!(experiments::is_usage_error(&nested.unwrap_err()));

    let mut c = small(ExperimentKind::SweepSampling);
    c.half_counts = Some(vec![1]);
    assert!(experiments::is_usage_error(
        &experiments::run(&c).unwrap_err()
    ));

    let mut c = small(ExperimentKind::Verify);
    c.checks = vec!["no_such_check".into()];
    assert!(experiments::is_usage_error(
        &experiments::run(&c).unwrap_err()
    ));
}

#[test]
fn wnn_report_round_trips_through_json() {
    let c = small(ExperimentKind::WnnEval);
    let r = experiments::run(&c).unwrap();
    assert_eq!(r.rows.len(), 64);
    let mut buf = Vec::new();
    r.write_json(&mut buf).unwrap();
    let back: ExperimentReport = serde_json::from_slice(&buf).unwrap();
    assert_eq!(back, r);
}

#[test]
fn columns_carry_provenance() {
    let r = experiments::run(&small(ExperimentKind::Transfer)).unwrap();
    let prov = |name: &str| {
        r.columns
            .iter()
            .find(|c| c.name == name)
            .unwrap()
            .provenance
    };
    assert_eq!(prov("l2_err_zone"), Provenance::Measured);
    assert_eq!(prov("bound"), Provenance::BoundFormula);
    assert!(r
        .summary
        .iter()
        .any(|s| s.provenance == Provenance::FittedConstant));
}

#[test]
fn runs_are_byte_reproducible() {
    let dir = tempdir("repro");
    let mut c = small(ExperimentKind::GnnEval);
    c.mode = GraphMode::Ran;
    c.output.format = OutputFormat::Csv;
    let mut outputs = Vec::new();
    for threads in [1, 3] {
        c.threads = Some(threads);
        c.output.path = Some(dir.join("run.csv"));
        let r = experiments::run(&c).unwrap();
        let paths = r.save(&c.output).unwrap();
        assert_eq!(paths.len(), 2);
        let csv = std::fs::read(&paths[0]).unwrap();
        outputs.push(csv);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn directory_output_is_named_after_the_kind() {
    let dir = tempdir("dir");
    let mut c = small(ExperimentKind::Plan);
    c.epsilon = Some(0.05);
    c.output.path = Some(dir.clone());
    c.output.format = OutputFormat::Json;
    let r = experiments::run(&c).unwrap();
    let paths = r.save(&c.output).unwrap();
    assert_eq!(paths, vec![dir.join("plan.json")]);
}

#[test]
fn random_trials_with_complete_graphs_match_deterministic() {
    let mut c = small(ExperimentKind::RandomTrials);
    c.graphon = GraphonSpec::Constant { p: 1.0 };
    c.trials = 10;
    let r = experiments::run(&c).unwrap();
    assert!(!r.rows.is_empty());
    let errs = r.column("l2_err_zone").unwrap();
    let first = errs[0].as_f64().unwrap();
    for e in errs {
        assert_eq!(e.as_f64().unwrap(), first);
    }
}
