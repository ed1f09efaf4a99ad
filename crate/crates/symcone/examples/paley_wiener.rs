//! Paley-Wiener synthesis on the halfline: the H^2_mu norm three ways, and a Hardy-to-Bergman dilation sweep.

use symcone::jordan::{AlgebraElement, ConeDescriptor, MultiIndex};
use symcone::paleywiener::*;
use symcone::quad::QuadratureSpec;
use symcone::spaces::{default_t_grid, hardy_mu_norm, TestFunction, TubePoint};

fn main() -> symcone::error::Result<()> {
    let h = ConeDescriptor::halfline();
    let s = MultiIndex::new(vec![1.0]);
    let f = ProfileFunction::exponential(&h, AlgebraElement::new(vec![1.0]));
    let spec = QuadratureSpec::gauss(64);

    let z = TubePoint::new(&h, vec![0.4], AlgebraElement::new(vec![0.8]))?;
    let closed = f.synthesize_closed(&h, &s, &z.x, z.y.coords())?;
    let quad = pw_synthesize_quadrature(&h, &s, &f, &z, &spec)?;
    println!("F(0.4 + 0.8i) = {closed:.10} (closed), {:.10} (quadrature)", quad.value);

    let big_f = TestFunction::profile(&h, &s, f.clone())?;
    let hardy = hardy_mu_norm(&big_f, 2.0, &s, &spec, &default_t_grid(&h))?;
    println!("||f||_L2 = {:.10} closed, {:.10} by quadrature", h2mu_norm_closed(&h, &s, &f)?, h2mu_norm_via_profile(&h, &s, &f, &spec)?.value);
    println!("||F||_H2mu = {:.10}", hardy.value);

    let sample = [f.clone(), ProfileFunction::exponential(&h, AlgebraElement::new(vec![2.5]))];
    for target in [EmbeddingTarget::Thm11 { q: 2.0 }, EmbeddingTarget::Thm12 { q: 4.0 }] {
        let e = embedding_ratio(&h, &s, &target, &sample, &dyadic_scales(), &spec)?;
        println!("{target:?}: slopes {:?}, expected {:?}, max ratio {:.6}", e.slopes, e.expected_slope, e.max_ratio);
    }
    Ok(())
}
