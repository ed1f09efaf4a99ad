//! Tensor Gauss rules and seeded Monte Carlo on a cone, with refinement.

use symcone::jordan::ConeDescriptor;
use symcone::quad::{integrate, refine, QuadratureSpec, Region};

fn main() -> symcone::error::Result<()> {
    let cone = ConeDescriptor::lorentz(3)?;
    let c = cone.clone();
    // int_Omega e^{-tr x} dx = Gamma_Omega(n/r) = (2 pi)^{1/2} Gamma(3/2) Gamma(1).
    let f = move |x: &[f64]| (-c.trace(x)).exp();
    let exact = (2.0 * std::f64::consts::PI).sqrt() * 0.5 * std::f64::consts::PI.sqrt();

    for nodes in [8, 16, 32, 64] {
        let est = integrate(&Region::cone(&cone), &f, &QuadratureSpec::gauss(nodes))?;
        println!("gauss {nodes:>3}: {:.12} rel err {:.1e} (estimate {:.1e})", est.value, (est.value / exact - 1.0).abs(), est.rel_error());
    }

    let mc = QuadratureSpec::monte_carlo(200_000, 7);
    let a = integrate(&Region::cone(&cone), &f, &mc)?;
    let b = integrate(&Region::cone(&cone), &f, &mc)?;
    println!("monte carlo: {:.6} +- {:.1e}, repeatable: {}", a.value, a.error_estimate, a.value == b.value);

    let coarse = QuadratureSpec::gauss(8).with_tol(1e-10);
    let mut est = integrate(&Region::cone(&cone), &f, &coarse)?;
    while !est.converged && est.level < 128 {
        est = refine(&est, &Region::cone(&cone), &f, &coarse)?;
        println!("refined to {} nodes: {:.12}, estimate {:.1e}", est.level, est.value, est.error_estimate);
    }
    Ok(())
}
