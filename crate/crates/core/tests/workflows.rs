//! End-to-end estimator runs against the exact hard-rod oracles.

use std::sync::Arc;

use gibbs_core::activity::ActivityFunction;
use gibbs_core::counting::{
    approx_log_partition, tonks_density, tonks_emptiness, tonks_ring_log_partition, CountingOptions,
};
use gibbs_core::estimators::{estimate_density, estimate_emptiness, estimate_kpoint_density, DensityRequest};
use gibbs_core::geometry::{Point, Region};
use gibbs_core::potential::PairPotential;
use gibbs_core::rng::Streams;
use gibbs_core::sampler::{BlockDynamicsConfig, GibbsModel};

const R: f64 = 0.5;
const LAMBDA: f64 = 1.0;

fn rods(len: f64) -> GibbsModel<f64> {
    let g = Region::new_box(Point::new(&[0.0]), Point::new(&[len])).unwrap();
    GibbsModel::new(
        g.clone(),
        Arc::new(PairPotential::hard_sphere(R).unwrap()),
        ActivityFunction::constant_on(g, LAMBDA).unwrap(),
    )
    .unwrap()
}

fn request(model: GibbsModel<f64>, v: f64, n: usize) -> DensityRequest<f64> {
    DensityRequest::new(model, Point::new(&[v]), 0.05, 10.0, None)
        .unwrap()
        .with_repetitions(n)
}

#[test]
fn rod_density_matches_tonks() {
    for (v, seed) in [(0.0, 1), (0.7, 2), (1.5, 3)] {
        let est = estimate_density(&request(rods(3.0), v, 4000), &Streams::new(seed)).unwrap();
        let exact = tonks_density(0.0, 3.0, R, LAMBDA, v, &[]).unwrap();
        assert!(est.covers(exact, 4.0), "v = {v}: {} ± {} vs {exact}", est.value, est.std_error);
    }
}

#[test]
fn rod_emptiness_matches_tonks() {
    let model = rods(3.0);
    let cfg = BlockDynamicsConfig::for_model(&model, None, 10.0, 0.05).unwrap();
    let hole = Region::new_box(Point::new(&[1.0]), Point::new(&[2.0])).unwrap();
    let est = estimate_emptiness(&model, &hole, 4000, &cfg, &Streams::new(4)).unwrap();
    let exact = tonks_emptiness(0.0, 3.0, R, LAMBDA, 1.0, 2.0).unwrap();
    assert!(est.covers(exact, 4.0), "{} ± {} vs {exact}", est.value, est.std_error);
}

#[test]
fn two_point_density_factorises_through_tilts() {
    let (a, b) = (0.8, 1.9);
    let exact = tonks_density(0.0, 3.0, R, LAMBDA, a, &[]).unwrap() * tonks_density(0.0, 3.0, R, LAMBDA, b, &[a]).unwrap();
    let template = request(rods(3.0), a, 4000);
    let est =
        estimate_kpoint_density(&template, &[Point::new(&[a]), Point::new(&[b])], &Streams::new(5)).unwrap();
    assert!(est.covers(exact, 4.0), "{} ± {} vs {exact}", est.value, est.std_error);
    let overlapping =
        estimate_kpoint_density(&template, &[Point::new(&[a]), Point::new(&[a + 0.3])], &Streams::new(5)).unwrap();
    assert_eq!(overlapping.value, 0.0);
}

#[test]
fn ring_partition_function_from_the_counter() {
    let ring = Region::torus(1, 3.0).unwrap();
    let model = GibbsModel::new(
        ring,
        Arc::new(PairPotential::hard_sphere(R).unwrap()),
        ActivityFunction::constant(1, LAMBDA).unwrap(),
    )
    .unwrap();
    let opts = CountingOptions {
        sample_constant: 4.0,
        ..Default::default()
    };
    let rep = approx_log_partition(&model, 0.1, &opts, &Streams::new(6)).unwrap();
    let exact = tonks_ring_log_partition(3.0, R, LAMBDA);
    assert_eq!(rep.factors.len(), 3);
    assert!(rep.log_z.covers(exact, 4.0), "{} ± {} vs {exact}", rep.log_z.value, rep.log_z.std_error);
}

#[test]
fn fixed_seed_reproduces_and_other_seeds_differ() {
    let req = request(rods(3.0), 1.5, 200);
    let a = estimate_density(&req, &Streams::new(7)).unwrap();
    let b = estimate_density(&req, &Streams::new(7)).unwrap();
    let c = estimate_density(&req, &Streams::new(8)).unwrap();
    assert_eq!((a.value, a.std_error), (b.value, b.std_error));
    assert_ne!(a.value, c.value);
}
