use std::f64::consts::PI;

use proptest::prelude::*;
use volkov_core::algebra::FourVector;
use volkov_core::field::{action, cycle_average, field_integrals, CachedFieldIntegrals, FieldProfile, PlaneWaveField};

fn constant(xi: f64, phase: f64) -> PlaneWaveField {
    PlaneWaveField::new(0.01, phase, FieldProfile::Constant { xi_star: xi })
}

#[test]
fn constant_profile_matches_antiderivatives_over_a_long_range() {
    for phase in [0.0, 0.7] {
        let f = constant(3.0, phase);
        let cache = CachedFieldIntegrals::new(&f, -1e6, 1e6);
        let w = f.omega;
        let mut x = -1e6;
        while x <= 1e6 {
            let r = cache.integrals(x).unwrap();
            // eA₁ = −ξ cos(ωx + φ)
            let i1 = -3.0 * ((w * x + phase).sin() - phase.sin()) / w;
            let i2 = 9.0 * (0.5 * x + ((2.0 * (w * x + phase)).sin() - (2.0 * phase).sin()) / (4.0 * w));
            assert!((r.i1 - i1).abs() <= 1e-8 * 300.0, "I1 at {x}: {} vs {i1}", r.i1);
            assert!((r.i2 - i2).abs() <= 1e-8 * i2.abs().max(1e3), "I2 at {x}: {} vs {i2}", r.i2);
            assert!((r.i2_avg - 4.5 * x).abs() <= 1e-8 * (4.5 * x).abs().max(1.0));
            x += 9973.1;
        }
    }
}

#[test]
fn super_gaussian_is_half_at_half_fwhm() {
    let p = FieldProfile::SuperGaussian {
        xi_star: 3.0,
        fwhm: 4.8e4,
        order: 4.0,
        center: 0.0,
    };
    assert!((p.envelope(2.4e4) - 1.5).abs() < 1e-12);
    assert!((p.envelope(-2.4e4) - 1.5).abs() < 1e-12);
    let f = PlaneWaveField::new(0.01, 0.0, p);
    assert!((f.potential(2.4e4) - 1.5 * (240.0f64).cos()).abs() < 1e-12);
}

#[test]
fn potential_examples() {
    let f = constant(3.0, 0.4);
    assert!((f.potential(-0.4 / 0.01) - 3.0).abs() < 1e-12);
    assert_eq!(PlaneWaveField::off().potential(123.0), 0.0);
    let cache = CachedFieldIntegrals::new(&PlaneWaveField::off(), -1e3, 1e3);
    assert_eq!(field_integrals(&cache, 500.0).unwrap(), (0.0, 0.0));
}

#[test]
fn pulse_integrals_freeze_outside_the_support() {
    let f = PlaneWaveField::new(
        0.01,
        0.0,
        FieldProfile::SuperGaussian {
            xi_star: 3.0,
            fwhm: 4.8e4,
            order: 4.0,
            center: 0.0,
        },
    );
    let cache = CachedFieldIntegrals::new(&f, -5e5, 5e5);
    let a = cache.integrals(2e5).unwrap();
    let b = cache.integrals(4.9e5).unwrap();
    assert_eq!(a, b);
    // Ĩ₂ across the whole pulse: (9/2)∫exp(−2 ln2 |2x/F|⁴) dx = 4.5·F/2·Γ(5/4)·(2 ln2)^{−1/4}·2
    let gamma_5_4 = 0.906_402_477_055_477;
    let total = 4.5 * 4.8e4 * gamma_5_4 / (2.0 * std::f64::consts::LN_2).powf(0.25);
    let span = b.i2_avg - cache.integrals(-4.9e5).unwrap().i2_avg;
    assert!((span - total).abs() < 1e-8 * total, "{span} vs {total}");
}

#[test]
fn action_examples() {
    let f = constant(3.0, 0.0);
    let cache = CachedFieldIntegrals::new(&f, -1e4, 1e4);
    let p = FourVector::new(5.0 / 3.0, 0.0, 0.0, -4.0 / 3.0);
    assert_eq!(action(&p, &FourVector::default(), &cache).unwrap(), 0.0);
    let x = FourVector::new(1200.0, 30.0, 0.0, -800.0);
    let xm = x.minus();
    let i2 = 9.0 * (0.5 * xm + (2.0 * 0.01 * xm).sin() / (4.0 * 0.01));
    let s = action(&p, &x, &cache).unwrap();
    let expected = -p.dot(&x) - i2 / (2.0 * 3.0);
    assert!((s - expected).abs() < 1e-9 * expected.abs(), "{s} vs {expected}");
    let off = CachedFieldIntegrals::new(&PlaneWaveField::off(), -1e4, 1e4);
    assert_eq!(action(&p, &x, &off).unwrap(), -p.dot(&x));
}

#[test]
fn cycle_average_examples() {
    let w = 0.01;
    assert!((cycle_average(|x| (w * x).cos().powi(2), 37.0, w) - 0.5).abs() < 1e-12);
    assert!(cycle_average(|x| (w * x).cos(), 37.0, w).abs() < 1e-10);
    let f = constant(3.0, 0.2);
    assert!((cycle_average(|x| f.potential(x).powi(2), -5e3, w) - 4.5).abs() < 1e-10);
}

#[test]
fn queries_outside_the_cache_fail() {
    let cache = CachedFieldIntegrals::new(&constant(1.0, 0.0), -10.0, 10.0);
    assert!(cache.integrals(1e3).is_err());
    assert!(cache.integrals(f64::NAN).is_err());
}

proptest! {
    #[test]
    fn integrals_are_odd_for_a_cosine_carrier(x in 0.0..2e4f64) {
        let cache = CachedFieldIntegrals::new(&constant(2.0, 0.0), -2e4, 2e4);
        let a = cache.integrals(x).unwrap();
        let b = cache.integrals(-x).unwrap();
        prop_assert!((a.i1 + b.i1).abs() < 1e-8 * 300.0);
        prop_assert!((a.i2 + b.i2).abs() < 1e-8 * a.i2.abs().max(1.0));
    }

    #[test]
    fn one_cycle_of_i1_returns_to_its_start(x in -1e4..1e4f64) {
        let f = constant(3.0, 0.0);
        let cache = CachedFieldIntegrals::new(&f, -2e4, 2e4);
        let a = cache.integrals(x).unwrap().i1;
        let b = cache.integrals(x + 2.0 * PI / f.omega).unwrap().i1;
        prop_assert!((a - b).abs() < 1e-6);
    }
}
