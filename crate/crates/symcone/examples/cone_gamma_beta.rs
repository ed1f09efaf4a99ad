//! Gamma and beta functions of the Lorentz cone: closed forms against cubature.

use symcone::conefunc::*;
use symcone::jordan::{AlgebraElement, ConeDescriptor, MultiIndex};
use symcone::quad::QuadratureSpec;

fn main() -> symcone::error::Result<()> {
    let cone = ConeDescriptor::lorentz(3)?;
    let spec = QuadratureSpec::gauss(64);

    for s in [vec![2.0, 1.5], vec![1.0, 3.0], vec![0.7, 2.2]] {
        let s = MultiIndex::new(s);
        let closed = gamma_closed(&cone, &s)?;
        let num = gamma_integral(&cone, &s, &spec)?;
        println!("Gamma({:?}) = {closed:.10}  cubature {:.10}  (err est {:.1e})", s.as_slice(), num.value, num.error_estimate);
    }

    let (p, q) = (MultiIndex::new(vec![2.0, 2.0]), MultiIndex::new(vec![1.5, 2.5]));
    let b = beta_integral(&cone, &p, &q, &spec)?;
    println!("B(p, q) = {:.10}  cubature {:.10}", beta_closed(&cone, &p, &q)?, b.value);

    let s = MultiIndex::new(vec![2.0, 1.5]);
    for y in [[1.0, 0.0, 0.0], [2.0, 1.0, 0.0], [3.0, 0.5, -1.0]] {
        let y = AlgebraElement::new(y.to_vec());
        println!(
            "Laplace of Delta_s at y = {:?}: {:.10} vs {:.10}",
            y.coords(),
            laplace_power(&cone, &s, &y, &spec)?.value,
            laplace_power_closed(&cone, &s, &y)?
        );
    }
    Ok(())
}
