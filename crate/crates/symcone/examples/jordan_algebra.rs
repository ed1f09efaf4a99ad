//! Spectral decomposition, minors and generalized powers in the spin factor R^4.

use symcone::jordan::*;

fn main() -> symcone::error::Result<()> {
    let cone = ConeDescriptor::lorentz(4)?;
    let x = AlgebraElement::new(vec![3.0, 1.0, -0.5, 2.0]);

    let sd = spectral(&cone, &x)?;
    println!("x = {:?} in cone: {}", x.coords(), in_cone(&cone, &x));
    println!("eigenvalues {:?}", sd.eigenvalues);
    for (i, c) in sd.idempotents.iter().enumerate() {
        println!("c_{} = {:?}", i + 1, c.coords());
    }
    println!("reconstruction error {:.1e}", sd.reconstruct().sub(&x).norm());

    println!("det = {}, Delta_1 = {}, Delta*_1 = {}", determinant(&cone, &x)?, principal_minor(&cone, 1, &x)?, rotated_minor(&cone, 1, &x)?);
    let inv = inverse(&cone, &x)?;
    println!("x^-1 = {:?}", inv.coords());
    println!("x o x^-1 = {:?}", jordan_product(&cone, &x, &inv)?.coords());

    let s = MultiIndex::new(vec![1.5, -0.5]);
    println!(
        "Delta_s(x) = {:.6}, Delta*_s(x) = {:.6}, s* = {:?}",
        power_function(&cone, &s, &x, false)?,
        power_function(&cone, &s, &x, true)?,
        multiindex_star(&s)
    );
    for s in [vec![0.0, 0.5], vec![0.5, 0.5], vec![2.0, 1.0]] {
        println!("{s:?} in Wallach set: {}", in_wallach(&cone, &MultiIndex::new(s.clone())));
    }
    Ok(())
}
