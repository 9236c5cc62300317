#![allow(dead_code)]

use std::f64::consts::PI;

use optomech_core::Squeezing;
use proptest::prelude::*;
use rand::Rng;

/// Prefactor-free normalisation: `h_SQL²/8 = 1`.
pub const UNIT_H_SQL: f64 = 2.828_427_124_746_190_1;

#[derive(Debug, Clone)]
pub struct Scenario {
    pub kappas: Vec<f64>,
    pub squeezings: Vec<Squeezing>,
    pub thetas: Vec<f64>,
    pub eta: f64,
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn random_scenario<R: Rng>(rng: &mut R, max_carriers: usize, theta_max: f64) -> Scenario {
    let d = rng.gen_range(1..=max_carriers);
    let mut kappas: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..10.0)).collect();
    if kappas.iter().all(|k| *k == 0.0) {
        kappas[0] = 1.0;
    }
    Scenario {
        kappas,
        squeezings: (0..d)
            .map(|_| Squeezing::new(rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0 * PI)))
            .collect(),
        thetas: (0..d).map(|_| rng.gen_range(0.0..theta_max)).collect(),
        eta: rng.gen_range(0.5..=1.0),
    }
}

pub fn squeezing() -> impl Strategy<Value = Squeezing> {
    (0.0..2.0f64, 0.0..2.0 * PI).prop_map(|(r, phi)| Squeezing::new(r, phi))
}

pub fn scenario(max_carriers: usize) -> impl Strategy<Value = Scenario> {
    (1..=max_carriers).prop_flat_map(|d| {
        (
            prop::collection::vec(0.01..10.0f64, d),
            prop::collection::vec(squeezing(), d),
            prop::collection::vec(0.0..PI / 2.0, d),
            0.5..=1.0f64,
        )
            .prop_map(|(kappas, squeezings, thetas, eta)| Scenario {
                kappas,
                squeezings,
                thetas,
                eta,
            })
    })
}
