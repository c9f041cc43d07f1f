mod common;

use std::path::PathBuf;

use cvbench::inference::{Bucket, PairwiseComparison};
use cvbench::mcs::{build_mcs, mcs_svg, McsCell};
use cvbench::measures::{Combo, Metric};

fn comparison(a: usize, b: usize, means: &[f64], p: f64) -> PairwiseComparison {
    PairwiseComparison {
        combo_a: a,
        combo_b: b,
        mean_a: means[a],
        mean_b: means[b],
        diff: means[a] - means[b],
        se_diff: 0.01,
        q_stat: (means[a] - means[b]).abs() / 0.01,
        p_adj: p,
        bucket: Bucket::from_p(p),
    }
}

fn three() -> cvbench::mcs::McsMatrix {
    let combos = vec![
        Combo::new("Burden", "KNN"),
        Combo::new("Pharma", "RF"),
        Combo::new("Burden", "RF"),
    ];
    let means = [0.71, 0.84, 0.80];
    let cmps = vec![
        comparison(0, 1, &means, 0.002),
        comparison(0, 2, &means, 0.03),
        comparison(1, 2, &means, 0.41),
    ];
    build_mcs(&cmps, &combos, &means, Metric::Auc, None, None).unwrap()
}

#[test]
fn three_combo_matrix_layout() {
    let mx = three();
    assert_eq!(mx.labels(), ["Pharma-RF", "Burden-RF", "Burden-KNN"]);
    assert_eq!(mx.cells[0][2], McsCell::Pair(Bucket::P01));
    assert_eq!(mx.cells[1][2], McsCell::Pair(Bucket::P05));
    assert_eq!(mx.cells[0][1], McsCell::Pair(Bucket::NotSignificant));
    for i in 0..3 {
        assert_eq!(mx.cells[i][i], McsCell::SelfPair);
        for j in 0..3 {
            assert_eq!(mx.cells[i][j], mx.cells[j][i]);
        }
    }
}

#[test]
fn three_combo_svg_matches_golden() {
    let svg = mcs_svg(&three());
    common::svg_well_formed(&svg).unwrap();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/mcs_three.svg");
    if std::env::var_os("CVBENCH_BLESS").is_some() {
        std::fs::write(&path, &svg).unwrap();
    }
    let golden = std::fs::read_to_string(&path).unwrap();
    assert_eq!(svg, golden);
}
