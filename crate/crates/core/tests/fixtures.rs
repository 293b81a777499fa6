//! Seeded generators are pinned to recorded outputs.

use apda_core::problems::{default_measurement_count, make_inpainting_problem, make_phase_retrieval_problem, Image};
use apda_core::SmoothObjective;

#[test]
fn inpainting_mask_4x4_seed42() {
    let img = Image::piecewise_constant(4, 4);
    let p = make_inpainting_problem(&img, 0.4, 0.01, 42).unwrap();
    let kept = p.image.unwrap().kept.unwrap();
    assert_eq!(kept.len(), 7);
    assert_eq!(kept, vec![1, 2, 5, 6, 7, 10, 12]);
}

#[test]
fn phase_retrieval_b_16x16_seed7() {
    let img = Image::piecewise_constant(16, 16);
    let m = default_measurement_count(256);
    assert_eq!(m, 617);
    let p = make_phase_retrieval_problem(&img, m, 0.3, 0.1, 0.01, 7).unwrap();
    let SmoothObjective::PhaseRetrieval { observed, .. } = &p.f else {
        panic!("wrong objective kind");
    };
    let expected: Vec<f64> = include_str!("fixtures/phase_b_16x16_seed7.hex")
        .lines()
        .map(|l| f64::from_bits(u64::from_str_radix(l, 16).unwrap()))
        .collect();
    assert_eq!(observed.len(), expected.len());
    for (i, (a, b)) in observed.iter().zip(&expected).enumerate() {
        assert_eq!(a.to_bits(), b.to_bits(), "b[{i}]: {a} vs {b}");
    }
    assert_eq!(observed.iter().filter(|&&v| v == 0.0).count(), 62);
}

#[test]
fn generators_are_reproducible() {
    let img = Image::piecewise_constant(8, 8);
    let a = make_phase_retrieval_problem(&img, 50, 0.3, 0.1, 0.01, 3).unwrap();
    let b = make_phase_retrieval_problem(&img, 50, 0.3, 0.1, 0.01, 3).unwrap();
    let x: Vec<f64> = (0..64).map(|i| i as f64 / 64.0).collect();
    assert_eq!(a.f.value(&x).unwrap().to_bits(), b.f.value(&x).unwrap().to_bits());
}
