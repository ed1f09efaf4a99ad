//! The weighted Bergman kernel, its dilation law, and the projection reproducing a kernel function.

use symcone::jordan::{AlgebraElement, ConeDescriptor, MultiIndex};
use symcone::operators::bergman_project;
use symcone::quad::QuadratureSpec;
use symcone::spaces::{bergman_kernel, mixed_norm, TestFunction, TubePoint};

fn main() -> symcone::error::Result<()> {
    let l3 = ConeDescriptor::lorentz(3)?;
    let z = TubePoint::new(&l3, vec![0.3, -1.0, 0.2], AlgebraElement::new(vec![1.5, 0.4, 0.1]))?;
    let w = TubePoint::new(&l3, vec![-0.5, 0.0, 1.0], AlgebraElement::new(vec![2.0, -0.3, 0.5]))?;
    let nu = 2.0;
    let b = bergman_kernel(&l3, nu, &z, &w)?;
    println!("B_nu(z, w) = {b:.6e}");
    for lambda in [0.5, 2.0, 4.0] {
        let scaled = bergman_kernel(&l3, nu, &z.scale(lambda), &w.scale(lambda))?;
        println!("  lambda = {lambda}: B(lz, lw) / B(z, w) = {:.6e}, lambda^-7 = {:.6e}", (scaled / b).re, lambda.powi(-7));
    }

    // The kernel carries unit constant, so on A^2_nu the projection is a fixed
    // multiple of the identity; for the upper half-plane at nu = 1 that multiple is pi.
    let h = ConeDescriptor::halfline();
    let f = TestFunction::kernel_at(&h, &[1.0], 3.0)?;
    let spec = QuadratureSpec::gauss(64);
    let norm = mixed_norm(&f, 2.0, 2.0, &MultiIndex::new(vec![1.0]), &spec)?;
    println!("||f||_(A^2_1) = {:.8}", norm.value);
    for (x, y) in [(0.0, 1.0), (0.5, 2.0), (-2.0, 0.7)] {
        let z = TubePoint::new(&h, vec![x], AlgebraElement::new(vec![y]))?;
        let p = bergman_project(&h, 1.0, &f, &z, &spec)?;
        println!("  z = {x} + {y}i: P f / f = {:.10}", p.value / f.eval(&z)?);
    }
    Ok(())
}
