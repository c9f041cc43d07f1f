use cvbench_demo::{simulate, Benchmark, SETS};

#[test]
fn simulation_is_seeded() {
    let a = simulate(120, 15, 1.5, 7).unwrap();
    let b = simulate(120, 15, 1.5, 7).unwrap();
    let c = simulate(120, 15, 1.5, 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.response().positives(), 15);
    assert_eq!(a.descriptor_sets().len(), 2);
    assert!(simulate(10, 10, 1.0, 1).is_err());
}

#[test]
fn benchmark_round_trip() {
    let bench = Benchmark::build(150, 20, 1.2, 3, 1).unwrap();
    let view = bench.evaluate("auc", 30, 0.5).unwrap();
    assert!(view.mcs().starts_with("<svg"));
    assert!(view.anova().contains("Error"));
    assert_eq!(view.ranking().lines().count(), 8);
    for split in 1..=3 {
        for set in SETS {
            let svg = bench.curve(split, set).unwrap();
            assert!(svg.contains("Ideal") && svg.ends_with("</svg>\n"));
        }
    }
    assert!(bench.curve(4, "Strong").is_err());
    assert!(bench.curve(1, "Other").is_err());
    assert!(bench.evaluate("rmse", 30, 0.5).is_err());
}
