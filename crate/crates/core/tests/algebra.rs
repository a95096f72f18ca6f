use num_complex::Complex64;
use proptest::prelude::*;
use volkov_core::algebra::{
    apply, dressed_bispinor, free_spinor, lightfront_density, lightfront_form, mat_add, mat_identity, mat_mul,
    mat_scale, minus_gamma1, Bispinor, FourVector, GammaBasis, Mat4, Spin,
};

const METRIC: [f64; 4] = [1.0, -1.0, -1.0, -1.0];

fn max_entry(m: &Mat4) -> f64 {
    m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sub(a: &Mat4, b: &Mat4) -> Mat4 {
    mat_add(a, &mat_scale(b, Complex64::from(-1.0)))
}

#[test]
fn anticommutators_are_exact() {
    let g = GammaBasis::dirac();
    for mu in 0..4 {
        for nu in 0..4 {
            let ac = mat_add(&mat_mul(&g.gamma[mu], &g.gamma[nu]), &mat_mul(&g.gamma[nu], &g.gamma[mu]));
            let expected = if mu == nu {
                mat_scale(&mat_identity(), Complex64::from(2.0 * METRIC[mu]))
            } else {
                [[Complex64::new(0.0, 0.0); 4]; 4]
            };
            assert_eq!(ac, expected, "mu = {mu}, nu = {nu}");
        }
    }
}

#[test]
fn gamma_minus_is_nilpotent() {
    let g = GammaBasis::dirac();
    let m = g.minus();
    assert_eq!(max_entry(&mat_mul(&m, &m)), 0.0);
    let g1m = mat_mul(&mat_mul(&m, &g.gamma[1]), &m);
    assert_eq!(max_entry(&g1m), 0.0);
}

#[test]
fn minus_gamma1_matches_dense_product() {
    let g = GammaBasis::dirac();
    let dense = mat_mul(&g.minus(), &g.gamma[1]);
    let psi = Bispinor([
        Complex64::new(0.3, -1.2),
        Complex64::new(2.0, 0.5),
        Complex64::new(-0.7, 0.1),
        Complex64::new(1.1, 0.9),
    ]);
    let a = apply(&dense, &psi);
    let b = minus_gamma1(&psi);
    for k in 0..4 {
        assert!((a.0[k] - b.0[k]).norm() < 1e-15);
    }
}

#[test]
fn four_vector_products() {
    let n = FourVector::lightlike();
    assert_eq!(n.dot(&n), 0.0);
    let p = FourVector::new(5.0 / 3.0, 0.0, 0.0, -4.0 / 3.0);
    assert!((p.dot(&p) - 1.0).abs() < 1e-15);
    let omega = 0.01;
    let k = FourVector::new(omega, 0.0, 0.0, omega);
    let x = FourVector::new(3.0, 1.0, 2.0, -5.0);
    assert!((k.dot(&x) - omega * x.minus()).abs() < 1e-15);
}

#[test]
fn spinor_normalization_examples() {
    let g = GammaBasis::dirac();
    let rest = free_spinor(&FourVector::new(1.0, 0.0, 0.0, 0.0), Spin::Up).unwrap();
    assert!((rest.bilinear(&g.minus(), &rest).re - 2.0).abs() < 1e-14);
    let p = FourVector::new(5.0 / 3.0, 0.0, 0.0, -4.0 / 3.0);
    let u = free_spinor(&p, Spin::Up).unwrap();
    assert!((u.bilinear(&g.minus(), &u).re - 6.0).abs() < 1e-13);
    assert!((lightfront_density(&u) - 6.0).abs() < 1e-13);
    assert_eq!(lightfront_density(&Bispinor::zero()), 0.0);
}

#[test]
fn off_shell_and_backward_momenta_are_rejected() {
    assert!(free_spinor(&FourVector::new(2.0, 0.0, 0.0, 0.5), Spin::Up).is_err());
    assert!(dressed_bispinor(&Bispinor::zero(), 0.0, 1.0).is_err());
}

#[test]
fn dressed_bispinor_dense_oracle() {
    let g = GammaBasis::dirac();
    let p = FourVector::new(5.0 / 3.0, 0.0, 0.0, -4.0 / 3.0);
    let u = free_spinor(&p, Spin::Up).unwrap();
    let (pm, e_a1) = (3.0, 3.0);
    let op = sub(
        &mat_identity(),
        &mat_scale(&mat_mul(&g.minus(), &g.gamma[1]), Complex64::from(e_a1 / (2.0 * pm))),
    );
    let dense = apply(&op, &u);
    let v = dressed_bispinor(&u, pm, e_a1).unwrap();
    for k in 0..4 {
        assert!((dense.0[k] - v.0[k]).norm() < 1e-14);
    }
    // u = (√(8/3), 0, −√(8/3)/2, 0): γ₋γ¹u only fills the second and fourth entries.
    let s = (8.0f64 / 3.0).sqrt();
    let expected = [s, 0.75 * s, -0.5 * s, -0.75 * s];
    for k in 0..4 {
        assert!((v.0[k] - Complex64::from(expected[k])).norm() < 1e-14, "{k}: {}", v.0[k]);
    }
    assert_eq!(dressed_bispinor(&u, pm, 0.0).unwrap(), u);
}

fn momentum() -> impl Strategy<Value = FourVector> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(a, b, c)| FourVector::on_shell(a, b, c))
        .prop_filter("p_minus must be positive", |p| p.minus() > 1e-3)
}

fn spin() -> impl Strategy<Value = Spin> {
    prop_oneof![Just(Spin::Up), Just(Spin::Down)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn dressing_preserves_the_light_front_norm(p in momentum(), s in spin(), a1 in -20.0..20.0f64) {
        let u = free_spinor(&p, s).unwrap();
        let v = dressed_bispinor(&u, p.minus(), a1).unwrap();
        let n = lightfront_form(&v, &v);
        let scale = 2.0 * p.minus();
        prop_assert!((n.re - scale).abs() < 1e-12 * scale.max(1.0) * (1.0 + a1.abs()));
        prop_assert!(n.im.abs() < 1e-12 * scale.max(1.0));
    }

    #[test]
    fn free_spinor_solves_the_dirac_equation(p in momentum(), s in spin()) {
        let g = GammaBasis::dirac();
        let u = free_spinor(&p, s).unwrap();
        let r = apply(&sub(&g.slash(&p), &mat_identity()), &u);
        prop_assert!(r.norm_sq().sqrt() < 1e-12 * p.t.max(1.0));
    }

    #[test]
    fn light_front_density_is_real_and_nonnegative(c in prop::array::uniform8(-5.0..5.0f64)) {
        let psi = Bispinor([
            Complex64::new(c[0], c[1]),
            Complex64::new(c[2], c[3]),
            Complex64::new(c[4], c[5]),
            Complex64::new(c[6], c[7]),
        ]);
        let f = lightfront_form(&psi, &psi);
        prop_assert!(f.im.abs() < 1e-14 * psi.norm_sq().max(1.0));
        prop_assert!(lightfront_density(&psi) >= 0.0);
        prop_assert!((f.re - lightfront_density(&psi)).abs() < 1e-12 * psi.norm_sq().max(1.0));
    }
}
