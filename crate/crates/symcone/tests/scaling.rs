use proptest::prelude::*;
use statrs::function::gamma::gamma;
use symcone::conefunc::{beta_closed, gamma_closed, laplace_power_closed};
use symcone::jordan::{AlgebraElement, ConeDescriptor, MultiIndex};
use symcone::paleywiener::{pw_synthesize_quadrature, ProfileFunction};
use symcone::quad::QuadratureSpec;
use symcone::spaces::{bergman_kernel, TubePoint};

fn l3() -> ConeDescriptor {
    ConeDescriptor::lorentz(3).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn tube_point(x: [f64; 3], y_bar: [f64; 2], margin: f64) -> TubePoint {
    let len = (y_bar[0] * y_bar[0] + y_bar[1] * y_bar[1]).sqrt();
    TubePoint::new(&l3(), x.to_vec(), AlgebraElement::new(vec![len + margin, y_bar[0], y_bar[1]])).unwrap()
}

proptest! {
    #[test]
    fn lorentz3_gamma_product(s1 in 0.1..6.0f64, s2 in 0.6..6.0f64) {
        // d = 1: Gamma_Omega(s) = (2 pi)^{1/2} Gamma(s_1) Gamma(s_2 - 1/2).
        let g = gamma_closed(&l3(), &MultiIndex::new(vec![s1, s2])).unwrap();
        let oracle = (2.0 * std::f64::consts::PI).sqrt() * gamma(s1) * gamma(s2 - 0.5);
        prop_assert!(rel(g, oracle) < 1e-10);
    }

    #[test]
    fn beta_is_symmetric(p1 in 0.6..4.0f64, p2 in 0.6..4.0f64, q1 in 0.6..4.0f64, q2 in 0.6..4.0f64) {
        let (p, q) = (MultiIndex::new(vec![p1, p2]), MultiIndex::new(vec![q1, q2]));
        prop_assert!(rel(beta_closed(&l3(), &p, &q).unwrap(), beta_closed(&l3(), &q, &p).unwrap()) < 1e-12);
    }

    #[test]
    fn laplace_homogeneity(s1 in 0.6..4.0f64, s2 in 0.6..4.0f64, t in 0.2..5.0f64, a in -0.9..0.9f64) {
        let s = MultiIndex::new(vec![s1, s2]);
        let y = AlgebraElement::new(vec![1.0, a, 0.0]);
        let l1 = laplace_power_closed(&l3(), &s, &y).unwrap();
        let lt = laplace_power_closed(&l3(), &s, &y.scale(t)).unwrap();
        prop_assert!(rel(lt, t.powf(-(s1 + s2)) * l1) < 1e-10);
    }

    #[test]
    fn kernel_dilation_and_translation(
        zx in prop::array::uniform3(-2.0..2.0f64),
        zy in prop::array::uniform2(-1.0..1.0f64),
        wx in prop::array::uniform3(-2.0..2.0f64),
        wy in prop::array::uniform2(-1.0..1.0f64),
        lambda in 0.2..5.0f64,
        shift in -3.0..3.0f64,
    ) {
        let nu = 2.0;
        let z = tube_point(zx, zy, 0.3);
        let w = tube_point(wx, wy, 0.5);
        let b = bergman_kernel(&l3(), nu, &z, &w).unwrap();
        let scaled = bergman_kernel(&l3(), nu, &z.scale(lambda), &w.scale(lambda)).unwrap();
        // r (nu + n/r) = 2 (2 + 3/2) = 7.
        prop_assert!((scaled - b * lambda.powf(-7.0)).norm() <= 1e-10 * scaled.norm());
        let mut zs = z.clone();
        let mut ws = w.clone();
        zs.x[1] += shift;
        ws.x[1] += shift;
        let moved = bergman_kernel(&l3(), nu, &zs, &ws).unwrap();
        prop_assert!((moved - b).norm() <= 1e-12 * b.norm());
    }
}

#[test]
fn halfline_synthesis_closed_form_matches_quadrature() {
    let h = ConeDescriptor::halfline();
    let s = MultiIndex::new(vec![1.0]);
    let f = ProfileFunction::exponential(&h, AlgebraElement::new(vec![1.0]));
    for (x, y) in [(0.0, 1.0), (0.7, 0.5), (-1.5, 2.0)] {
        let closed = f.synthesize_closed(&h, &s, &[x], &[y]).unwrap();
        let z = TubePoint::new(&h, vec![x], AlgebraElement::new(vec![y])).unwrap();
        let quad = pw_synthesize_quadrature(&h, &s, &f, &z, &QuadratureSpec::gauss(96)).unwrap();
        assert!((quad.value - closed).norm() < 1e-8 * closed.norm(), "{x} {y}: {} vs {closed}", quad.value);
    }
}
