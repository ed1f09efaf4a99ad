//! Multilinear Bergman-type operators: the kernel-tuple factorisation and the boundedness conditions.

use symcone::jordan::{AlgebraElement, ConeDescriptor};
use symcone::operators::{search_admissible, t_beta_apply, OperatorParams};
use symcone::quad::QuadratureSpec;
use symcone::spaces::{TubeFunction, TubePoint};

fn main() -> symcone::error::Result<()> {
    let h = ConeDescriptor::halfline();
    let params = OperatorParams::new(&h, vec![2.0, 2.0], vec![1.0, 1.0], 1.0)?;
    println!("{params}: c1 {} c2 {} c3 {}", params.c1(), params.c2(), params.c3());

    // On a kernel tuple T_beta f(z_1, z_2) is a constant times f_1(z_1) f_2(z_2).
    let w = TubePoint::imaginary(&h, AlgebraElement::new(vec![1.0]))?;
    let tuple = params.kernel_tuple(&w)?;
    let fs: Vec<&dyn TubeFunction> = tuple.iter().map(|f| f as &dyn TubeFunction).collect();
    let spec = QuadratureSpec::gauss(48);
    for (a, b) in [((0.0, 1.0), (0.0, 1.0)), ((0.5, 2.0), (-1.0, 0.5)), ((2.0, 0.3), (1.0, 3.0))] {
        let z1 = TubePoint::new(&h, vec![a.0], AlgebraElement::new(vec![a.1]))?;
        let z2 = TubePoint::new(&h, vec![b.0], AlgebraElement::new(vec![b.1]))?;
        let t = t_beta_apply(&params, &fs, &[z1.clone(), z2.clone()], &spec)?;
        let prod = fs[0].value(&z1.x, z1.y.coords()) * fs[1].value(&z2.x, z2.y.coords());
        println!("  T f / (f_1 f_2) at ({a:?}, {b:?}) = {:.8}", t.value / prod);
    }

    let grid = [1.0, 1.5, 2.0, 4.0];
    let betas = [0.0, 1.0, 2.0, 4.0, 8.0, 16.0];
    for cone in [h, ConeDescriptor::lorentz(3)?] {
        match search_admissible(&cone, 2, &grid, &grid, &betas) {
            Some(p) => println!("{cone}: admissible {p}"),
            None => println!("{cone}: no admissible (p, nu, beta) on the grid"),
        }
    }
    Ok(())
}
