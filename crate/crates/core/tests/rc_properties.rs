use kgddi_core::rc::{self, forward, logits, pool_entity, softmax, KgFeatures, RcDims};
use kgddi_core::synth::separable_instances;
use kgddi_core::{RcInstance, RcMode, RcParams};
use ndarray::{s, Array1, Array2};
use proptest::prelude::*;
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_params(hidden: usize, kg: usize, seed: u64) -> RcParams {
    let mut p = RcParams::init(RcDims::new(hidden, kg), seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let u = Uniform::new_inclusive(-1.0, 1.0);
    for block in p.blocks_mut() {
        block.iter_mut().for_each(|v| *v += u.sample(&mut rng));
    }
    p
}

fn setup(seed: u64) -> (Vec<RcInstance>, KgFeatures, RcParams) {
    let (insts, embs) = separable_instances(10, 5, 3, seed);
    (insts, KgFeatures::from_embeddings(embs).unwrap(), random_params(5, 3, seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn outputs_are_distributions(seed in any::<u64>(), fused in any::<bool>()) {
        let (insts, lookup, params) = setup(seed);
        let mode = if fused { RcMode::Fused } else { RcMode::Text };
        for inst in &insts {
            let p = forward(inst, &params, mode, Some(&lookup)).unwrap();
            prop_assert!(p.iter().all(|v| *v >= 0.0));
            prop_assert!((p.sum() - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn softmax_is_shift_covariant(z in prop::collection::vec(-50.0f64..50.0, 5), c in -1e3f64..1e3) {
        let z = Array1::from(z);
        let a = softmax(z.view());
        let b = softmax((&z + c).view());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    #[test]
    fn spans_share_pooling_weights(seed in any::<u64>(), len in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = Uniform::new_inclusive(-2.0, 2.0);
        let d = 4;
        let mut hidden = Array2::from_shape_simple_fn((2 + 2 * len, d), || u.sample(&mut rng));
        let first = hidden.slice(s![1..1 + len, ..]).to_owned();
        hidden.slice_mut(s![1 + len..1 + 2 * len, ..]).assign(&first);
        let p = random_params(d, 0, seed);
        let h1 = pool_entity(hidden.view(), (1, len), p.w.view(), p.b.view()).unwrap();
        let h2 = pool_entity(hidden.view(), (1 + len, 2 * len), p.w.view(), p.b.view()).unwrap();
        prop_assert_eq!(h1, h2);
    }

    #[test]
    fn fused_head_with_silent_kg_columns_equals_text_head(seed in any::<u64>()) {
        let (insts, lookup, mut params) = setup(seed);
        let text_width = params.w3_text.ncols();
        params.wf.fill(0.0);
        params.bf.fill(0.0);
        params.w3_fused.fill(0.0);
        let text_w3 = params.w3_text.clone();
        params.w3_fused.slice_mut(s![.., ..text_width]).assign(&text_w3);
        params.b3_fused.assign(&params.b3_text.clone());
        for inst in &insts {
            let text = forward(inst, &params, RcMode::Text, None).unwrap();
            let fused = forward(inst, &params, RcMode::Fused, Some(&lookup)).unwrap();
            for (a, b) in text.iter().zip(&fused) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn swapping_spans_swaps_pooled_blocks(seed in any::<u64>()) {
        // with one shared W, exchanging the spans and the matching output
        // columns leaves the text logits unchanged
        let (insts, _, params) = setup(seed);
        let d = params.dims.hidden;
        let mut swapped_params = params.clone();
        let w3 = params.w3_text.clone();
        swapped_params.w3_text.slice_mut(s![.., d..2 * d]).assign(&w3.slice(s![.., 2 * d..3 * d]));
        swapped_params.w3_text.slice_mut(s![.., 2 * d..3 * d]).assign(&w3.slice(s![.., d..2 * d]));
        for inst in &insts {
            let mut swapped = inst.clone();
            std::mem::swap(&mut swapped.span1, &mut swapped.span2);
            let a = logits(inst, &params, RcMode::Text, None).unwrap();
            let b = logits(&swapped, &swapped_params, RcMode::Text, None).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn loss_matches_forward_cross_entropy() {
    let (insts, lookup, params) = setup(3);
    for mode in [RcMode::Text, RcMode::Fused] {
        let (loss, _) = rc::loss_and_grad(&insts, &params, mode, Some(&lookup)).unwrap();
        let expected: f64 = insts
            .iter()
            .map(|i| -forward(i, &params, mode, Some(&lookup)).unwrap()[i.label.unwrap().index()].ln())
            .sum::<f64>()
            / insts.len() as f64;
        assert!((loss - expected).abs() < 1e-12);
    }
}

#[test]
fn training_is_deterministic() {
    let (insts, lookup, _) = setup(4);
    let config = rc::RcTrainConfig { epochs: 3, batch_size: 4, seed: 11, mode: RcMode::Fused, ..Default::default() };
    let a = rc::train_rc(&insts, &config, Some(&lookup)).unwrap();
    let b = rc::train_rc(&insts, &config, Some(&lookup)).unwrap();
    assert_eq!(a.params, b.params);
    assert_eq!(a.epoch_losses, b.epoch_losses);
}
