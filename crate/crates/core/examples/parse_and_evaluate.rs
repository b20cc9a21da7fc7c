//! Parses polynomials in the input grammar, evaluates them exactly and checks
//! integrality on a lattice.

use intersective::lattice::AffineLattice;
use intersective::poly::{parse_poly, parse_poly_vector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // integer-valued, though the coefficients are not integers
    let p = parse_poly("n*(n+1)/2", &["n"])?;
    println!("p = {p}, integral on Z: {}", p.is_integral());
    for n in [-3, 0, 4, 10] {
        println!("  p({n}) = {}", p.eval_i64(&[n])?);
    }

    let q = parse_poly("n^2/4", &["n"])?;
    let evens = AffineLattice::scalar(2, 0);
    println!("q = {q}: integral on Z {}, on 2Z {}", q.is_integral(), q.is_integral_on(&evens)?);

    let v = parse_poly_vector("(x^2 - y, x*y + 3, 2*x)", &["x", "y"])?;
    let rendered: Vec<String> = v.iter().map(|c| c.render(&["x", "y"])).collect();
    println!("vector map: ({})", rendered.join(", "));
    Ok(())
}
