use kgddi_core::gradcheck::{check_kge_gradient, check_rc_gradient, random_kge_case, random_rc_case, GradCheck};
use kgddi_core::{KgeModel, Norm, RcMode};

const CONFIGS: u64 = 20;
const EPS: f64 = 1e-5;
const TOL: f64 = 1e-4;

fn kge_suite(model: KgeModel, norm: Norm) -> GradCheck {
    (0..CONFIGS)
        .map(|seed| {
            let case = random_kge_case(model, norm, 8, seed);
            check_kge_gradient(&case.params, &case.positives, &case.negatives, case.margin, EPS).unwrap()
        })
        .reduce(GradCheck::merge)
        .unwrap()
}

#[test]
fn transe_l2() {
    let r = kge_suite(KgeModel::TransE, Norm::L2);
    assert!(r.max_rel_error < TOL, "{r:?}");
}

#[test]
fn transe_l1() {
    let r = kge_suite(KgeModel::TransE, Norm::L1);
    assert!(r.max_rel_error < TOL, "{r:?}");
}

#[test]
fn transr_l2() {
    let r = kge_suite(KgeModel::TransR, Norm::L2);
    assert!(r.max_rel_error < TOL, "{r:?}");
}

#[test]
fn transr_l1() {
    let r = kge_suite(KgeModel::TransR, Norm::L1);
    assert!(r.max_rel_error < TOL, "{r:?}");
}

#[test]
fn rescal() {
    let r = kge_suite(KgeModel::Rescal, Norm::L2);
    assert!(r.max_rel_error < TOL, "{r:?}");
}

#[test]
fn distmult() {
    let r = kge_suite(KgeModel::DistMult, Norm::L2);
    assert!(r.max_rel_error < TOL, "{r:?}");
}

#[test]
fn classification_head_both_modes() {
    for mode in [RcMode::Text, RcMode::Fused] {
        let r = (0..CONFIGS)
            .map(|seed| {
                let case = random_rc_case(6, 4, seed);
                check_rc_gradient(&case.batch, &case.params, mode, Some(&case.lookup), EPS).unwrap()
            })
            .reduce(GradCheck::merge)
            .unwrap();
        assert!(r.max_rel_error < TOL, "{mode}: {r:?}");
    }
}

#[test]
fn text_mode_without_kg_vectors() {
    let case = random_rc_case(5, 3, 7);
    let text_only = kgddi_core::RcParams::init(kgddi_core::rc::RcDims::new(5, 0), 7);
    let r = check_rc_gradient(&case.batch, &text_only, RcMode::Text, None, EPS).unwrap();
    assert!(r.max_rel_error < TOL, "{r:?}");
}
