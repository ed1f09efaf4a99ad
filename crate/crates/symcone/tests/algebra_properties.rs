use proptest::prelude::*;
use symcone::jordan::*;

fn cone_point(n: usize) -> impl Strategy<Value = AlgebraElement> {
    (prop::collection::vec(-3.0..3.0f64, n - 1), 0.05..4.0f64).prop_map(|(bar, margin)| {
        let len = bar.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut coords = vec![len + margin];
        coords.extend(bar);
        AlgebraElement::new(coords)
    })
}

fn lorentz(n: usize) -> ConeDescriptor {
    ConeDescriptor::lorentz(n).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

proptest! {
    #[test]
    fn spectral_reconstruction(x in cone_point(4)) {
        let c = lorentz(4);
        let sd = spectral(&c, &x).unwrap();
        prop_assert!(sd.reconstruct().sub(&x).norm() <= 1e-12 * x.norm());
        prop_assert!(rel(sd.eigenvalues.iter().product(), determinant(&c, &x).unwrap()) < 1e-12);
        prop_assert!(sd.eigenvalues[0] >= sd.eigenvalues[1]);
    }

    #[test]
    fn frame_laws(x in cone_point(3)) {
        let c = lorentz(3);
        let sd = spectral(&c, &x).unwrap();
        let (c1, c2) = (&sd.idempotents[0], &sd.idempotents[1]);
        prop_assert!(jordan_product(&c, c1, c1).unwrap().sub(c1).norm() < 1e-12);
        prop_assert!(jordan_product(&c, c1, c2).unwrap().norm() < 1e-12);
        prop_assert!(c1.add(c2).sub(&c.identity()).norm() < 1e-12);
        prop_assert!((c.trace(c1.coords()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn inverse_is_jordan_inverse(x in cone_point(5)) {
        let c = lorentz(5);
        let inv = inverse(&c, &x).unwrap();
        let e = jordan_product(&c, &x, &inv).unwrap();
        prop_assert!(e.sub(&c.identity()).norm() < 1e-10);
    }

    #[test]
    fn power_homogeneity(x in cone_point(3), s1 in -2.0..4.0f64, s2 in -2.0..4.0f64, t in 0.1..10.0f64) {
        let c = lorentz(3);
        let s = MultiIndex::new(vec![s1, s2]);
        for rotated in [false, true] {
            let a = power_function(&c, &s, &x.scale(t), rotated).unwrap();
            let b = power_function(&c, &s, &x, rotated).unwrap();
            prop_assert!(rel(a, t.powf(s1 + s2) * b) < 1e-10);
        }
    }

    #[test]
    fn power_of_scalar_index_is_det_power(x in cone_point(3), a in -2.0..3.0f64) {
        let c = lorentz(3);
        let p = power_function(&c, &MultiIndex::scalar(2, a), &x, false).unwrap();
        prop_assert!(rel(p, determinant(&c, &x).unwrap().powf(a)) < 1e-12);
    }

    #[test]
    fn reflection_swaps_frames(x in cone_point(3)) {
        let c = lorentz(3);
        let m = AlgebraElement::new(c.reflect(x.coords()));
        prop_assert!(rel(determinant(&c, &m).unwrap(), determinant(&c, &x).unwrap()) < 1e-12);
        prop_assert!(rel(rotated_minor(&c, 1, &x).unwrap(), principal_minor(&c, 1, &m).unwrap()) < 1e-12);
    }

    #[test]
    fn membership_matches_minors(v in prop::collection::vec(-3.0..3.0f64, 3)) {
        let c = lorentz(3);
        let x = AlgebraElement::new(v);
        let by_minors = principal_minor(&c, 1, &x).unwrap() > 0.0 && principal_minor(&c, 2, &x).unwrap() > 0.0;
        prop_assert_eq!(in_cone(&c, &x), by_minors);
    }

    #[test]
    fn star_is_an_involution(s in prop::collection::vec(-5.0..5.0f64, 1..4)) {
        let s = MultiIndex::new(s);
        prop_assert_eq!(multiindex_star(&multiindex_star(&s)), s);
    }

    #[test]
    fn wallach_parameters_reproduce_s(u1 in 0.0..3.0f64, u2 in 0.0..3.0f64) {
        let c = lorentz(5);
        let half_d = c.d() / 2.0;
        let s = MultiIndex::new(vec![u1, u2 + if u1 > 0.0 { half_d } else { 0.0 }]);
        let u = wallach_parameters(&c, &s).unwrap();
        prop_assert!((u[0] - u1).abs() < 1e-12 && (u[1] - u2).abs() < 1e-12);
    }
}

#[test]
fn wallach_examples() {
    let c = lorentz(3);
    assert!(in_wallach(&c, &MultiIndex::new(vec![0.0, 0.0])));
    assert!(in_wallach(&c, &MultiIndex::new(vec![1.0, 1.5])));
    assert!(in_wallach(&c, &MultiIndex::new(vec![0.0, 0.3])));
    assert!(!in_wallach(&c, &MultiIndex::new(vec![1.0, 0.3])));
    assert!(in_wallach(&ConeDescriptor::halfline(), &MultiIndex::new(vec![2.0])));
}

#[test]
fn degenerate_spectral_input_uses_the_frame() {
    let c = lorentz(3);
    let sd = spectral(&c, &AlgebraElement::new(vec![2.0, 0.0, 0.0])).unwrap();
    assert_eq!(sd.eigenvalues, vec![2.0, 2.0]);
    assert!(sd.reconstruct().sub(&AlgebraElement::new(vec![2.0, 0.0, 0.0])).norm() < 1e-15);
}
