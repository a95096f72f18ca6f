use std::f64::consts::PI;

use volkov_core::algebra::Spin;
use volkov_core::field::{CachedFieldIntegrals, FieldProfile, PlaneWaveField};
use volkov_core::kinematics::{drift_velocity_1d, Branch, CorrelationSpec};
use volkov_core::run::{moments, velocity_shift};
use volkov_core::scenario::preset;
use volkov_core::spectral::{EtaWeight, ModalDistribution, SpectralShape, TransverseWeight};
use volkov_core::synthesis::Axis;
use volkov_core::trajectory::{
    comoving_transform, cycle_averaged_peak_velocity, expectation_trajectory, peak_trajectory, ExpectationMoments,
};
use volkov_core::Error;

const OMEGA: f64 = 0.01;

fn constant_cache(xi: f64, reach: f64) -> CachedFieldIntegrals {
    let f = PlaneWaveField::new(OMEGA, 0.0, FieldProfile::Constant { xi_star: xi });
    CachedFieldIntegrals::new(&f, -reach, reach)
}

fn spec(v_a: f64) -> CorrelationSpec {
    CorrelationSpec::new(v_a, Branch::Auto, 3.0)
}

fn cycle() -> Axis {
    Axis::new(-PI / OMEGA, PI / OMEGA, 257)
}

fn half_range(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let hi = v.clone().fold(f64::MIN, f64::max);
    let lo = v.fold(f64::MAX, f64::min);
    0.5 * (hi - lo)
}

#[test]
fn field_free_slope() {
    let cache = constant_cache(0.0, 1e4);
    let rec = peak_trajectory(&spec(-0.3), &cache, &Axis::new(-5e3, 5e3, 11)).unwrap();
    for s in &rec.samples {
        assert!((s.xf3 - (-0.3 / 1.3) * s.x_minus).abs() < 1e-9 * s.x_minus.abs().max(1.0));
        assert_eq!(s.xf1, 0.0);
        assert_eq!(s.xf2, 0.0);
    }
    let k = &rec.samples[10];
    assert!((k.xf3 / k.x_minus + 0.23077).abs() < 1e-5);
}

#[test]
fn constant_field_amplitudes() {
    let cache = constant_cache(3.0, 1e4);
    let rec = peak_trajectory(&spec(0.0), &cache, &cycle()).unwrap();
    let a1 = half_range(rec.samples.iter().map(|s| s.xf1));
    let osc = rec.samples.iter().map(|s| s.xf3 - s.xf3_tilde);
    assert!((a1 - 100.0).abs() < 0.01, "{a1}");
    assert!((half_range(osc) - 12.5).abs() < 0.01);
    assert!(rec.samples.iter().all(|s| s.xf2 == 0.0 && s.ex2 == 0.0));
}

#[test]
fn cycle_averaged_velocity_examples() {
    let cache = constant_cache(3.0, 1e4);
    let v = cycle_averaged_peak_velocity(&spec(0.0), &cache, 123.0).unwrap();
    assert!((v - 0.25).abs() < 1e-12);
    let v = cycle_averaged_peak_velocity(&spec(19.5), &cache, 0.0).unwrap();
    assert!((v + 0.80405).abs() < 1e-5, "{v}");
    let off = constant_cache(0.0, 1e4);
    let v = cycle_averaged_peak_velocity(&spec(-0.3), &off, 0.0).unwrap();
    assert!((v + 0.3 / 1.3).abs() < 1e-15);
    assert!(matches!(
        cycle_averaged_peak_velocity(&CorrelationSpec::new(1.0, Branch::Auto, 3.0), &off, 0.0),
        Err(Error::LuminalVa)
    ));
}

#[test]
fn figure_eight_in_the_peak_frame() {
    let s = preset("fig3").unwrap();
    let cache = s.cache();
    let rec = peak_trajectory(&s.spec, &cache, &cycle()).unwrap();
    let co = comoving_transform(&rec, s.derived.v_f);
    let first = co.samples.first().unwrap();
    let last = co.samples.last().unwrap();
    let a1 = half_range(co.samples.iter().map(|s| s.xf1));
    let a3 = half_range(co.samples.iter().map(|s| s.xf3));
    assert!((a1 - 100.0).abs() < 2.0, "{a1}");
    assert!((a3 - 12.5).abs() < 0.25, "{a3}");
    let gap = ((first.xf1 - last.xf1).powi(2) + (first.xf3 - last.xf3).powi(2)).sqrt();
    assert!(gap < 0.01 * 2.0 * a1, "{gap}");
    // x₃ runs at twice the x₁ frequency: the curve passes the origin at ωx₋ = 0 and ±π,
    // crossing itself with opposite x₃ slopes.
    let n = co.samples.len() - 1;
    let mid = &co.samples[n / 2];
    for p in [first, mid] {
        assert!(p.xf1.abs() < 1e-6 * a1 && p.xf3.abs() < 1e-6 * a3);
    }
    let slope = |i: usize, j: usize| (co.samples[j].xf3 - co.samples[i].xf3) / (co.samples[j].xf1 - co.samples[i].xf1);
    assert!(slope(n / 2, n / 2 + 1) * slope(0, 1) < 0.0);
    let interior = &co.samples[1..n];
    let x3_zeros = interior.windows(2).filter(|w| w[0].xf3.signum() != w[1].xf3.signum()).count();
    let x1_zeros = interior.windows(2).filter(|w| w[0].xf1.signum() != w[1].xf1.signum()).count();
    assert_eq!(x1_zeros, 1);
    assert_eq!(x3_zeros, 3);
}

#[test]
fn comoving_at_zero_velocity_is_identity() {
    let cache = constant_cache(3.0, 1e4);
    let rec = peak_trajectory(&spec(0.0), &cache, &cycle()).unwrap();
    assert_eq!(comoving_transform(&rec, 0.0).samples, rec.samples);
}

#[test]
fn expectation_closes_in_the_drift_frame() {
    let s = preset("fig3").unwrap();
    let m = moments(&s).unwrap();
    let cache = s.cache();
    let rec = expectation_trajectory(&m, &cache, &cycle()).unwrap();
    let co = comoving_transform(&rec, s.derived.v_1d);
    let first = co.samples.first().unwrap();
    let last = co.samples.last().unwrap();
    let size = half_range(co.samples.iter().map(|s| s.ex1)).max(half_range(co.samples.iter().map(|s| s.ex3)));
    let drift = ((first.ex1 - last.ex1).powi(2) + (first.ex3 - last.ex3).powi(2)).sqrt();
    assert!(drift < 0.01 * 2.0 * size, "{drift} vs {size}");
}

#[test]
fn expectation_velocity_in_field_and_out() {
    let s = preset("fig2b").unwrap();
    let m = moments(&s).unwrap();
    let v3 = |u: f64| u / (1.0 + u);
    assert!((v3(m.light_front_velocity(0.0)) + 0.8).abs() < 0.01);
    assert!((v3(m.light_front_velocity(3.0)) + 0.24).abs() < 0.01);
    assert!(m.p1_over_pm.abs() < 1e-12);
}

#[test]
fn narrow_planar_limit_matches_the_drift_velocity() {
    let sp = spec(-0.3);
    let r = sp.reference();
    let dist = ModalDistribution {
        spec: sp,
        eta: EtaWeight::new(r.eta, 1e-7, 10.0, SpectralShape::SuperGaussian),
        transverse: TransverseWeight { w: 1e5 },
        spin: Spin::Up,
    };
    let m = ExpectationMoments::from_distribution(&dist, 32, 32).unwrap();
    let v1 = drift_velocity_1d(r.p3_over_e(), 3.0, 3.0);
    let u = m.light_front_velocity(3.0);
    assert!((u / (v1 / (1.0 - v1)) - 1.0).abs() < 1e-3);
}

#[test]
fn small_spread_estimate_tracks_the_full_average() {
    for name in ["fig4a", "fig4b"] {
        let s = preset(name).unwrap();
        let v = velocity_shift(&s).unwrap();
        let corr = v.approx - v.one_d;
        assert!((v.full - v.approx).abs() < 0.1 * corr.abs(), "{name}: {v:?}");
    }
    let a = velocity_shift(&preset("fig4a").unwrap()).unwrap();
    let b = velocity_shift(&preset("fig4b").unwrap()).unwrap();
    let c = velocity_shift(&preset("fig4c").unwrap()).unwrap();
    assert!(a.full > a.one_d && b.full < b.one_d);
    assert!((c.full - c.one_d).abs() < 1e-3);
}
