use proptest::prelude::*;
use volkov_core::algebra::Spin;
use volkov_core::field::{CachedFieldIntegrals, FieldProfile, PlaneWaveField};
use volkov_core::kinematics::{drift_velocity_1d, Branch, CorrelationSpec};
use volkov_core::lifetime::{
    edge_trajectories, envelope_length, lifetime_constant_field, lifetime_field_free, peak_lifetime, EnvelopeModel,
};
use volkov_core::scenario::preset;
use volkov_core::spectral::{width_for_envelope, EtaWeight, ModalDistribution, SpectralShape, TransverseWeight};
use volkov_core::synthesis::WavepacketModel;
use volkov_core::Error;

fn spec(v_a: f64, pm: f64) -> CorrelationSpec {
    CorrelationSpec::new(v_a, Branch::Auto, pm)
}

fn constant(xi: f64, reach: f64) -> CachedFieldIntegrals {
    let f = PlaneWaveField::new(0.01, 0.0, FieldProfile::Constant { xi_star: xi });
    CachedFieldIntegrals::new(&f, -reach, reach)
}

fn envelope(delta_x3: f64) -> EnvelopeModel {
    EnvelopeModel {
        delta_x3,
        delta_eta: 1.0,
        kinematic: 1.0,
        c_n: 1.0,
    }
}

#[test]
fn closed_forms() {
    let v1 = drift_velocity_1d(-0.8, 3.0, 3.0);
    let b5 = lifetime_constant_field(1.0, -0.8, -4.1, v1);
    assert!((b5 / 0.3575 - 1.0).abs() < 1e-3, "{b5}");
    let b6 = lifetime_field_free(1.0, 19.5, -0.8);
    assert!((b6 / 0.0985 - 1.0).abs() < 1e-3, "{b6}");
}

#[test]
fn shorter_lifetime_further_from_the_drift_velocity() {
    let v1 = drift_velocity_1d(-0.8, 3.0, 3.0);
    let mut prev = f64::INFINITY;
    for vf in [0.0, 0.2, 0.5, 0.8] {
        let t = lifetime_constant_field(1e5, -0.8, vf, v1);
        assert!(t < prev);
        prev = t;
    }
}

#[test]
fn envelope_length_scales_inversely_with_width() {
    let sp = spec(0.0, 3.0);
    let eta = sp.reference().eta;
    let a = envelope_length(&sp, &EtaWeight::new(eta, 1e-4, 10.0, SpectralShape::FlatTopEnvelope));
    let b = envelope_length(&sp, &EtaWeight::new(eta, 2e-4, 10.0, SpectralShape::FlatTopEnvelope));
    assert!((a / b - 2.0).abs() < 1e-12);
}

#[test]
fn figure_two_envelopes_share_their_length() {
    let l: Vec<f64> = ["fig2a", "fig2b", "fig2c"]
        .iter()
        .map(|n| preset(n).unwrap().envelope.delta_x3)
        .collect();
    for x in &l[1..] {
        assert!((x / l[0] - 1.0).abs() < 0.01, "{l:?}");
    }
}

#[test]
fn edge_examples() {
    let sp = spec(0.0, 3.0);
    let env = envelope(9e3);
    let off = constant(0.0, 1e5);
    let (r0, f0) = edge_trajectories(&sp, &off, &env, 0.0).unwrap();
    assert!((r0 - f0 - 2.0 * 9e3 / 1.8).abs() < 1e-9);
    let (r1, f1) = edge_trajectories(&sp, &off, &env, 9e4).unwrap();
    assert!(((r1 - r0) / 9e4 + 4.0 / 9.0).abs() < 1e-12);
    assert!(((f1 - f0) / 9e4 + 4.0 / 9.0).abs() < 1e-12);
    let on = constant(3.0, 1e5);
    let (r2, _) = edge_trajectories(&sp, &on, &env, 9e4).unwrap();
    let (r3, _) = edge_trajectories(&sp, &on, &env, 0.0).unwrap();
    assert!(((r2 - r3) / 9e4 - (-4.0 / 9.0 + 0.25)).abs() < 1e-5);
}

#[test]
fn figure_two_c_root_find_matches_closed_form() {
    let s = preset("fig2c").unwrap();
    let cache = constant(3.0, 4e6);
    let rep = peak_lifetime(&s.spec, &cache, &s.envelope).unwrap();
    let analytic = rep.delta_x0_analytic.unwrap();
    assert!((rep.delta_x0_numeric / analytic - 1.0).abs() < 0.01);
    assert!(rep.roots.0 < 0.0 && rep.roots.1 > 0.0);
}

#[test]
fn field_free_root_find_matches_closed_form() {
    let sp = spec(19.5, 3.0);
    let env = envelope(2e4);
    let rep = peak_lifetime(&sp, &constant(0.0, 1e5), &env).unwrap();
    let t = rep.delta_x0_analytic.unwrap();
    assert!((t / (0.0985 * 2e4) - 1.0).abs() < 1e-3);
    assert!((rep.delta_x0_numeric / t - 1.0).abs() < 0.01);
}

#[test]
fn co_moving_peak_never_leaves() {
    // v_a equal to the field-free drift velocity −0.8.
    let sp = spec(-0.8, 3.0);
    let r = peak_lifetime(&sp, &constant(0.0, 1e6), &envelope(1e4));
    assert!(matches!(r, Err(Error::NoIntersection { .. })), "{r:?}");
}

#[test]
fn field_free_envelope_width_matches_the_model() {
    let sp = spec(0.0, 3.0);
    let r = sp.reference();
    let kin = (sp.v_a - r.p3_over_e()).abs();
    let dx3 = 2e3;
    let shape = SpectralShape::FlatTopEnvelope;
    let width = width_for_envelope(shape, 10.0, dx3, kin);
    let dist = ModalDistribution {
        spec: sp,
        eta: EtaWeight::new(r.eta, width, 10.0, shape),
        transverse: TransverseWeight { w: 1e4 },
        spin: Spin::Up,
    };
    let model = WavepacketModel::new(dist, constant(0.0, 10.0), 128, 8).unwrap();
    let half = dx3 / (1.0 - r.p3_over_e());
    let n = 801;
    let step = 4.0 * half / (n - 1) as f64;
    let rho = model.slice(0.0, 0.0, -2.0 * half, step, n).unwrap();
    // Envelope of the carrier fringes: running maximum over one carrier period in x₃.
    let span = (2.0 * std::f64::consts::PI / (r.eta * 2.0) / step).ceil() as usize + 1;
    let env: Vec<f64> = (0..n)
        .map(|i| rho[i.saturating_sub(span)..(i + span + 1).min(n)].iter().cloned().fold(0.0, f64::max))
        .collect();
    let peak = env.iter().cloned().fold(0.0, f64::max);
    let inside: Vec<usize> = (0..n).filter(|&i| env[i] >= 0.5 * peak).collect();
    let measured = 0.5 * (inside[inside.len() - 1] - inside[0]) as f64 * step;
    assert!((measured / half - 1.0).abs() < 0.15, "{measured} vs {half}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn constant_profile_root_find_agrees(v_a in -0.7..0.7f64, xi in 0.5..4.0f64, pm in 2.0..4.0f64) {
        let sp = spec(v_a, pm);
        let r = sp.reference();
        let v1 = drift_velocity_1d(r.p3_over_e(), xi, pm);
        let vf = volkov_core::kinematics::peak_velocity_infield(v_a, xi, pm);
        prop_assume!((v_a - r.p3_over_e()).abs() > 0.05 && (vf - v1).abs() > 0.05);
        let env = envelope(1e4);
        let analytic = lifetime_constant_field(env.delta_x3, r.p3_over_e(), vf, v1);
        let exit = env.delta_x3 / (1.0 - r.p3_over_e()) / (v_a / (1.0 - v_a) - r.p3 / pm).abs();
        let cache = constant(xi, 2.0 * exit);
        let rep = peak_lifetime(&sp, &cache, &env).unwrap();
        prop_assert!((rep.delta_x0_analytic.unwrap() / analytic - 1.0).abs() < 1e-12);
        prop_assert!((rep.delta_x0_numeric / analytic - 1.0).abs() < 0.01, "{} vs {}", rep.delta_x0_numeric, analytic);
    }
}
