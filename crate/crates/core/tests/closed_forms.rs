mod common;

use std::f64::consts::PI;

use common::{rel, scenario, squeezing, UNIT_H_SQL};
use optomech_core::bounds::*;
use optomech_core::oracle::{homodyne_cfi, qfi_full_state};
use optomech_core::sensor::CouplingSet;
use optomech_core::Squeezing;
use proptest::prelude::*;

fn split(total: f64, weights: &[f64]) -> Vec<f64> {
    let sum: f64 = weights.iter().sum();
    weights.iter().map(|w| total * w / sum).collect()
}

#[test]
fn figure_parameters_equal_squeezing() {
    // e^{-2r} = 0.1, η = 0.95, φ = 0, κ_Tot = 1
    let r = 10.0_f64.ln() / 2.0;
    let eta = 0.95;
    let ch = (2.0 * r).cosh();
    let sh = (2.0 * r).sinh();
    let k_tot = ch + sh;
    let expected = (1.0 + 2.0 * eta * (1.0 - eta) * (ch - 1.0) + eta * (1.0 - eta) * k_tot)
        / (eta * ((1.0 - eta) + eta * k_tot));
    let b = qcrb_equal_squeezing(1.0, Squeezing::new(r, 0.0), eta, UNIT_H_SQL).unwrap();
    assert!(rel(b.variance_bound, expected) < 1e-13);
    let oracle = qfi_full_state(
        &CouplingSet::new(vec![0.3, 0.7], UNIT_H_SQL).unwrap(),
        &[Squeezing::new(r, 0.0); 2],
        eta,
        0.0,
    )
    .unwrap();
    assert!(rel(1.0 / oracle, b.variance_bound) < 1e-9);
}

#[test]
fn printed_equal_squeezing_variants_against_oracle() {
    let s = Squeezing::new(0.9, 0.35);
    let (eta, kappas) = (0.8, [0.6, 1.4]);
    let oracle = 1.0
        / qfi_full_state(&CouplingSet::new(kappas.to_vec(), UNIT_H_SQL).unwrap(), &[s; 2], eta, 0.0)
            .unwrap();
    let consistent =
        qcrb_equal_squeezing_with(EqualSqueezingForm::Consistent, 2.0, s, eta, UNIT_H_SQL).unwrap();
    let alternative =
        qcrb_equal_squeezing_with(EqualSqueezingForm::Alternative, 2.0, s, eta, UNIT_H_SQL).unwrap();
    assert!(rel(consistent.variance_bound, oracle) < 1e-9);
    assert!(rel(alternative.variance_bound, oracle) > 1e-3);

    let th_con = optimal_homodyne_angle_equal_with(EqualSqueezingForm::Consistent, 2.0, s, eta).unwrap();
    let th_alt = optimal_homodyne_angle_equal_with(EqualSqueezingForm::Alternative, 2.0, s, eta).unwrap();
    let couplings = CouplingSet::new(kappas.to_vec(), UNIT_H_SQL).unwrap();
    let con = 1.0 / homodyne_cfi(&couplings, &[s; 2], &[th_con; 2], eta).unwrap();
    let alt = 1.0 / homodyne_cfi(&couplings, &[s; 2], &[th_alt; 2], eta).unwrap();
    assert!(rel(con, oracle) < 1e-9);
    assert!(rel(alt, oracle) > 1e-3);
}

#[test]
fn printed_angle_variants_coincide_without_squeezing_angle() {
    let s = Squeezing::new(1.1, 0.0);
    let a = optimal_homodyne_angle_equal_with(EqualSqueezingForm::Consistent, 1.7, s, 0.9).unwrap();
    let b = optimal_homodyne_angle_equal_with(EqualSqueezingForm::Alternative, 1.7, s, 0.9).unwrap();
    assert!((a - b).abs() < 1e-15);
}

#[test]
fn unsqueezed_optimum_value() {
    let eta: f64 = 0.95;
    let k = 1.0 / (eta * (1.0 - eta)).sqrt();
    let b = qcrb_unsqueezed(k, eta, UNIT_H_SQL).unwrap().variance_bound;
    assert!(rel(b, 2.0 * (0.05_f64 / 0.95).sqrt()) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hyperbolic_identity(sqs in prop::collection::vec(squeezing(), 1..6), eta in 0.01..=1.0f64) {
        let m = SqueezeMatrices::new(&sqs, &[], eta).unwrap();
        for i in 0..sqs.len() {
            let scale = m.q[i] * m.r[i];
            prop_assert!((m.q[i] * m.r[i] - m.s[i] * m.s[i] - 1.0).abs() < 1e-12 * scale.max(1.0));
            prop_assert!(rel(1.0 / m.gamma[i], m.t[i] * m.w[i]) < 1e-10);
            for v in [m.q[i], m.r[i], m.t[i], m.gamma[i], m.p[i], m.w[i]] {
                prop_assert!(v > 0.0);
            }
        }
    }

    #[test]
    fn compact_and_expanded_quantum_limit_agree(s in scenario(5)) {
        let a = qcrb_general_with(QcrbForm::Compact, &s.kappas, &s.squeezings, s.eta, UNIT_H_SQL).unwrap();
        let b = qcrb_general_with(QcrbForm::Expanded, &s.kappas, &s.squeezings, s.eta, UNIT_H_SQL).unwrap();
        prop_assert!(rel(a.variance_bound, b.variance_bound) < 1e-12);
    }

    #[test]
    fn homodyne_reduces_to_signal_quadrature(s in scenario(5)) {
        let d = s.kappas.len();
        let a = crb_homodyne_general(&s.kappas, &s.squeezings, &vec![0.0; d], s.eta, UNIT_H_SQL).unwrap();
        let b = crb_signal_quadrature(&s.kappas, &s.squeezings, s.eta, UNIT_H_SQL).unwrap();
        prop_assert!(rel(a.variance_bound, b.variance_bound) < 1e-12);
        let m = SqueezeMatrices::new(&s.squeezings, &[], s.eta).unwrap();
        prop_assert!(rel(m.signal_quadrature_expanded(&s.kappas).unwrap(), m.signal_quadrature(&s.kappas).unwrap()) < 1e-12);
    }

    #[test]
    fn general_reduces_to_equal_squeezing(
        weights in prop::collection::vec(0.01..1.0f64, 1..6),
        total in 0.01..10.0f64,
        s in squeezing(),
        eta in 0.5..=1.0f64,
    ) {
        let kappas = split(total, &weights);
        let a = qcrb_general(&kappas, &vec![s; kappas.len()], eta, UNIT_H_SQL).unwrap();
        let b = qcrb_equal_squeezing(total, s, eta, UNIT_H_SQL).unwrap();
        prop_assert!(rel(a.variance_bound, b.variance_bound) < 1e-12);
    }

    #[test]
    fn equal_squeezing_reduces_to_unsqueezed(total in 0.01..10.0f64, phi in 0.0..2.0 * PI, eta in 0.5..=1.0f64) {
        let a = qcrb_equal_squeezing(total, Squeezing::new(0.0, phi), eta, UNIT_H_SQL).unwrap();
        let b = qcrb_unsqueezed(total, eta, UNIT_H_SQL).unwrap();
        prop_assert!(rel(a.variance_bound, b.variance_bound) < 1e-12);
    }

    #[test]
    fn general_reduces_to_lossless(s in scenario(5)) {
        let a = qcrb_general(&s.kappas, &s.squeezings, 1.0, UNIT_H_SQL).unwrap();
        let b = qcrb_lossless(&s.kappas, &s.squeezings, UNIT_H_SQL).unwrap();
        prop_assert!(rel(a.variance_bound, b.variance_bound) < 1e-12);
    }

    #[test]
    fn signal_quadrature_reduces_to_unsqueezed(s in scenario(5)) {
        let d = s.kappas.len();
        let total: f64 = s.kappas.iter().sum();
        let a = crb_signal_quadrature(&s.kappas, &vec![Squeezing::VACUUM; d], s.eta, UNIT_H_SQL).unwrap();
        let b = crb_signal_unsqueezed(total, s.eta, UNIT_H_SQL).unwrap();
        prop_assert!(rel(a.variance_bound, b.variance_bound) < 1e-12);
    }

    #[test]
    fn signal_quadrature_equal_squeezing(
        weights in prop::collection::vec(0.01..1.0f64, 1..6),
        total in 0.01..10.0f64,
        s in squeezing(),
        eta in 0.5..=1.0f64,
    ) {
        let kappas = split(total, &weights);
        let a = crb_signal_quadrature(&kappas, &vec![s; kappas.len()], eta, UNIT_H_SQL).unwrap();
        let b = crb_signal_equal_squeezing(total, s, eta, UNIT_H_SQL).unwrap();
        prop_assert!(rel(a.variance_bound, b.variance_bound) < 1e-12);
        let tuned = Squeezing::new(s.r, total.atan());
        let c = crb_signal_quadrature(&kappas, &vec![tuned; kappas.len()], eta, UNIT_H_SQL).unwrap();
        let d = crb_signal_equal_squeezing_optimal_phi(total, s.r, eta, UNIT_H_SQL).unwrap();
        prop_assert!(rel(c.variance_bound, d.variance_bound) < 1e-12);
    }

    #[test]
    fn lossless_signal_quadrature_form(s in scenario(5)) {
        let m = SqueezeMatrices::new(&s.squeezings, &[], 1.0).unwrap();
        prop_assert!(rel(m.signal_quadrature_lossless(&s.kappas).unwrap(), m.signal_quadrature(&s.kappas).unwrap()) < 1e-12);
    }

    #[test]
    fn equal_squeezing_redistribution_invariance(
        a in prop::collection::vec(0.01..1.0f64, 3),
        b in prop::collection::vec(0.01..1.0f64, 3),
        total in 0.01..10.0f64,
        s in squeezing(),
        theta in 0.0..PI / 2.0,
        eta in 0.5..=1.0f64,
    ) {
        let (ka, kb) = (split(total, &a), split(total, &b));
        let sq = [s; 3];
        let pairs = [
            (qcrb_general(&ka, &sq, eta, UNIT_H_SQL), qcrb_general(&kb, &sq, eta, UNIT_H_SQL)),
            (crb_signal_quadrature(&ka, &sq, eta, UNIT_H_SQL), crb_signal_quadrature(&kb, &sq, eta, UNIT_H_SQL)),
            (crb_homodyne_general(&ka, &sq, &[theta; 3], eta, UNIT_H_SQL), crb_homodyne_general(&kb, &sq, &[theta; 3], eta, UNIT_H_SQL)),
            (qcrb_lossless(&ka, &sq, UNIT_H_SQL), qcrb_lossless(&kb, &sq, UNIT_H_SQL)),
        ];
        for (x, y) in pairs {
            prop_assert!(rel(x.unwrap().variance_bound, y.unwrap().variance_bound) < 1e-12);
        }
    }

    #[test]
    fn equal_squeezing_angle_saturates(
        weights in prop::collection::vec(0.01..1.0f64, 1..5),
        total in 0.01..10.0f64,
        s in squeezing(),
        eta in 0.5..=1.0f64,
    ) {
        let kappas = split(total, &weights);
        let d = kappas.len();
        let theta = optimal_homodyne_angle_equal(total, s, eta).unwrap();
        let crb = crb_homodyne_general(&kappas, &vec![s; d], &vec![theta; d], eta, UNIT_H_SQL).unwrap();
        let qcrb = qcrb_equal_squeezing(total, s, eta, UNIT_H_SQL).unwrap();
        prop_assert!(rel(crb.variance_bound, qcrb.variance_bound) < 1e-10);
    }

    #[test]
    fn lossless_angles_saturate(s in scenario(5)) {
        let thetas = optimal_homodyne_angle_lossless(&s.kappas, &s.squeezings).unwrap();
        let crb = crb_homodyne_general(&s.kappas, &s.squeezings, &thetas, 1.0, UNIT_H_SQL).unwrap();
        let qcrb = qcrb_lossless(&s.kappas, &s.squeezings, UNIT_H_SQL).unwrap();
        prop_assert!(rel(crb.variance_bound, qcrb.variance_bound) < 1e-10);
    }

    #[test]
    fn signal_quadrature_never_beats_quantum_limit(total in 0.01..10.0f64, eta in 0.5..=1.0f64) {
        let a = crb_signal_unsqueezed(total, eta, UNIT_H_SQL).unwrap().variance_bound;
        let b = qcrb_unsqueezed(total, eta, UNIT_H_SQL).unwrap().variance_bound;
        prop_assert!(a >= b);
    }

    #[test]
    fn optimal_squeezing_angle_beats_fixed_angles(total in 0.001..100.0f64, r in 0.0..2.0f64, eta in 0.5..=1.0f64, phi in 0.0..PI) {
        let best = qcrb_equal_squeezing_optimal_phi(total, r, eta, UNIT_H_SQL).unwrap().variance_bound;
        let other = qcrb_equal_squeezing(total, Squeezing::new(r, phi), eta, UNIT_H_SQL).unwrap().variance_bound;
        prop_assert!(best <= other * (1.0 + 1e-12));
    }
}
