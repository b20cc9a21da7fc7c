//! Bounded check that a vector map hits every finite-index subgroup of Z^k.

use intersective::intersect::{multidim_bounded_check, DEFAULT_BUDGET};
use intersective::poly::{parse_poly_vector, RationalVectorPoly};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for text in ["(x^2 - y, x*y)", "(x^2 + 1, y)", "(2*x + 1, y)"] {
        let map = RationalVectorPoly::new(parse_poly_vector(text, &["x", "y"])?)?;
        let rep = multidim_bounded_check(&[map], 6, DEFAULT_BUDGET)?;
        match rep.first_failure.map(|i| &rep.verdicts[i]) {
            None => println!("{text}: all {} subgroups of index <= 6 hit", rep.verdicts.len()),
            Some(v) => println!("{text}: misses the subgroup with HNF {:?} (index {})", v.hnf, v.index),
        }
    }
    Ok(())
}
